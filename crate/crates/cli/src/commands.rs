//! Subcommand implementations.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use shaperet_core::dataset::{generate_dataset, labels_file, DatasetConfig};
use shaperet_core::descriptor::{
    dhfp, grid_ring_counts, kdfpe_eq7, kdfpe_kde, optimal_bandwidth, Descriptor, DescriptorMode,
    RingCounts,
};
use shaperet_core::error::Error;
use shaperet_core::evaluation::{evaluate, LabeledQuery};
use shaperet_core::image::{BinaryMask, GrayImage};
use shaperet_core::netpbm::{read_netpbm, write_mask};
use shaperet_core::retrieval::{load_db, rank, save_db, DescriptorDatabase, DescriptorRecord};
use shaperet_core::segmentation::{chan_vese, largest_component, ChanVeseParams};
use shaperet_core::threshold::{binarize, ThresholdMethod};

use crate::parallel::ordered_map;
use crate::{
    BuildArgs, CmdError, CmdResult, EvalArgs, GenArgs, QueryArgs, SegMethod, SegOpts, SegmentArgs,
};

const LABELS_FILE: &str = "labels.tsv";
/// Label used when no labels file covers an id.
const UNLABELED: &str = "-";

fn fail(code: u8, message: impl Into<String>) -> CmdError {
    CmdError::new(code, message)
}

impl SegOpts {
    fn chan_vese_params(&self) -> ChanVeseParams {
        ChanVeseParams {
            mu: self.cv_mu,
            lambda1: 1.0,
            lambda2: 1.0,
            dt: self.cv_dt,
            epsilon: self.cv_epsilon,
            max_iters: self.cv_iters,
            tol: self.cv_tol,
            init: self.cv_init,
        }
    }
}

/// Silhouette extraction as configured: thresholding or contour evolution
/// followed by component cleanup, or a plain threshold for pre-segmented
/// inputs.
fn extract_silhouette(image: &GrayImage, opts: &SegOpts) -> Result<BinaryMask, Error> {
    match opts.seg {
        SegMethod::Otsu => {
            let mask = binarize(image, ThresholdMethod::Otsu)?;
            largest_component(&mask)
        }
        SegMethod::ChanVese => {
            let seg = chan_vese(image, &opts.chan_vese_params())?;
            if !seg.converged {
                eprintln!(
                    "warning: contour evolution hit the iteration cap ({})",
                    seg.iterations
                );
            }
            largest_component(&seg.mask)
        }
        SegMethod::None => binarize(image, ThresholdMethod::Fixed(opts.threshold)),
    }
}

fn transform(rings: &RingCounts, mode: DescriptorMode, constant: f64) -> Result<Descriptor, Error> {
    match mode {
        DescriptorMode::Dhfp => dhfp(rings),
        DescriptorMode::KdfpeEq7 => Ok(kdfpe_eq7(rings, &optimal_bandwidth(rings, constant)?)),
        DescriptorMode::KdfpeKde => Ok(kdfpe_kde(rings, &optimal_bandwidth(rings, constant)?)),
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

/// Regular files in `dir`, sorted by name, minus any labels file.
fn list_images(dir: &Path) -> Result<Vec<PathBuf>, CmdError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| fail(1, format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != LABELS_FILE))
        .collect();
    files.sort();
    Ok(files)
}

fn read_labels(path: &Path) -> Result<HashMap<String, String>, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(1, format!("cannot read labels {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        let (id, label) = line
            .split_once('\t')
            .ok_or_else(|| fail(1, format!("malformed labels line {line:?}")))?;
        map.insert(id.to_string(), label.to_string());
    }
    Ok(map)
}

/// One image through decode, segmentation, and ring extraction.
fn image_to_rings(path: &Path, opts: &SegOpts, grid: usize) -> Result<RingCounts, Error> {
    let bytes = fs::read(path).map_err(|_| Error::TruncatedData("unreadable file"))?;
    let image = read_netpbm(&bytes)?;
    let mask = extract_silhouette(&image, opts)?;
    grid_ring_counts(&mask, grid)
}

pub fn gen(args: GenArgs) -> CmdResult {
    let config = DatasetConfig {
        classes: args.classes,
        per_class: args.per_class,
        canvas: args.canvas,
        seed: args.seed,
    };
    let items = generate_dataset(&config).map_err(|e| fail(1, e.to_string()))?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| fail(2, format!("cannot create {}: {e}", args.out_dir.display())))?;
    for item in &items {
        let path = args.out_dir.join(format!("{}.pgm", item.id));
        fs::write(&path, write_mask(&item.mask, args.ascii))
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))?;
    }
    let labels_path = args.out_dir.join(LABELS_FILE);
    fs::write(&labels_path, labels_file(&items))
        .map_err(|e| fail(2, format!("cannot write {}: {e}", labels_path.display())))?;
    println!(
        "{} masks -> {} ({} classes x {})",
        items.len(),
        args.out_dir.display(),
        args.classes,
        args.per_class
    );
    Ok(())
}

pub fn build(args: BuildArgs) -> CmdResult {
    let files = list_images(&args.input_dir)?;
    // An explicitly named labels file must exist; the implicit sibling
    // labels.tsv is optional.
    let labels = match &args.labels {
        Some(path) => read_labels(path)?,
        None => {
            let sibling = args.input_dir.join(LABELS_FILE);
            if sibling.is_file() {
                read_labels(&sibling)?
            } else {
                HashMap::new()
            }
        }
    };

    let grid = args.descriptor.grid;
    let constant = args.descriptor.bandwidth_constant;
    let mode = args.descriptor.mode;
    let described: Vec<(String, Result<Descriptor, Error>)> = ordered_map(files, |path| {
        let result = image_to_rings(&path, &args.seg, grid)
            .and_then(|rings| transform(&rings, mode, constant));
        (file_stem(&path), result)
    });

    let mut db = DescriptorDatabase::new(grid, mode);
    for (id, result) in described {
        let descriptor = match result {
            Ok(d) => d,
            Err(e) => {
                eprintln!("warning: {id}: {e}");
                continue;
            }
        };
        let label = labels.get(&id).cloned().unwrap_or_else(|| UNLABELED.into());
        if let Err(e) = db.push(DescriptorRecord {
            id: id.clone(),
            label,
            descriptor,
        }) {
            eprintln!("warning: {id}: {e}");
        }
    }

    if db.is_empty() {
        return Err(fail(1, "no image produced a descriptor; database is empty"));
    }
    fs::write(&args.out, save_db(&db))
        .map_err(|e| fail(2, format!("cannot write {}: {e}", args.out.display())))?;
    println!("{} records -> {}", db.len(), args.out.display());
    Ok(())
}

pub fn query(args: QueryArgs) -> CmdResult {
    let bytes = fs::read(&args.db)
        .map_err(|e| fail(1, format!("cannot read {}: {e}", args.db.display())))?;
    let db = load_db(&bytes).map_err(|e| fail(1, e.to_string()))?;

    if let Some(grid) = args.grid {
        if grid != db.grid_n() {
            return Err(fail(
                1,
                format!("--grid {grid} does not match database grid {}", db.grid_n()),
            ));
        }
    }
    if let Some(mode) = args.mode {
        if mode != db.mode() {
            return Err(fail(
                1,
                format!("--mode {mode} does not match database mode {}", db.mode()),
            ));
        }
    }

    let rings = image_to_rings(&args.image, &args.seg, db.grid_n())
        .map_err(|e| fail(1, format!("{}: {e}", args.image.display())))?;
    let descriptor = transform(&rings, db.mode(), args.bandwidth_constant)
        .map_err(|e| fail(1, e.to_string()))?;

    let results = rank(&descriptor, &db, args.top_k).map_err(|e| fail(1, e.to_string()))?;
    let mut out = String::new();
    for (i, r) in results.iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\n",
            i + 1,
            r.id,
            r.label,
            r.score
        ));
    }
    print!("{out}");
    Ok(())
}

/// Per-image ring extraction results, keyed by file stem.
type RingOutcomes = Vec<(String, Result<RingCounts, Error>)>;

pub fn eval(args: EvalArgs) -> CmdResult {
    let labels = read_labels(&args.labels)?;
    let grid = args.descriptor.grid;
    let constant = args.descriptor.bandwidth_constant;

    let rings_of = |dir: &Path| -> Result<RingOutcomes, CmdError> {
        let files = list_images(dir)?;
        Ok(ordered_map(files, |path| {
            (file_stem(&path), image_to_rings(&path, &args.seg, grid))
        }))
    };

    let db_rings: Vec<(String, RingCounts)> = rings_of(&args.db_dir)?
        .into_iter()
        .filter_map(|(id, r)| match r {
            Ok(rings) => Some((id, rings)),
            Err(e) => {
                eprintln!("warning: {id}: {e}");
                None
            }
        })
        .collect();
    if db_rings.is_empty() {
        return Err(fail(1, "no database image produced a descriptor"));
    }

    let query_rings: Vec<(String, RingCounts)> = if args.query_dir == args.db_dir {
        db_rings.clone()
    } else {
        let mut out = Vec::new();
        for (id, r) in rings_of(&args.query_dir)? {
            let rings = r.map_err(|e| fail(1, format!("query {id}: {e}")))?;
            out.push((id, rings));
        }
        out
    };
    if query_rings.is_empty() {
        return Err(fail(1, "no query images found"));
    }
    for (id, _) in &query_rings {
        if !labels.contains_key(id) {
            return Err(fail(
                1,
                format!("label gap: query {id} missing from labels"),
            ));
        }
    }

    let mut modes = vec![args.descriptor.mode];
    if !modes.contains(&DescriptorMode::Dhfp) {
        modes.push(DescriptorMode::Dhfp);
    }

    fs::create_dir_all(&args.out)
        .map_err(|e| fail(2, format!("cannot create {}: {e}", args.out.display())))?;

    for mode in modes {
        let mut db = DescriptorDatabase::new(grid, mode);
        for (id, rings) in &db_rings {
            let descriptor = match transform(rings, mode, constant) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("warning: {id}: {e}");
                    continue;
                }
            };
            let label = labels.get(id).cloned().unwrap_or_else(|| UNLABELED.into());
            if let Err(e) = db.push(DescriptorRecord {
                id: id.clone(),
                label,
                descriptor,
            }) {
                eprintln!("warning: {id}: {e}");
            }
        }

        let queries: Vec<LabeledQuery> = query_rings
            .iter()
            .map(|(id, rings)| {
                let descriptor = transform(rings, mode, constant)
                    .map_err(|e| fail(1, format!("query {id}: {e}")))?;
                Ok(LabeledQuery {
                    id: id.clone(),
                    label: labels[id].clone(),
                    descriptor,
                })
            })
            .collect::<Result<_, CmdError>>()?;

        let report = evaluate(&db, &queries, args.top_k).map_err(|e| fail(1, e.to_string()))?;

        let csv_path = args.out.join(format!("pr_{mode}.csv"));
        let mut csv = String::from("recall,precision\n");
        for (r, p) in report.mean_pr {
            csv.push_str(&format!("{r:.6},{p:.6}\n"));
        }
        fs::write(&csv_path, csv)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", csv_path.display())))?;

        println!("BEP {mode} {:.2}", report.bep_percent);
    }
    Ok(())
}

pub fn segment(args: SegmentArgs) -> CmdResult {
    let bytes = fs::read(&args.image)
        .map_err(|e| fail(1, format!("cannot read {}: {e}", args.image.display())))?;
    let image = read_netpbm(&bytes).map_err(|e| fail(1, e.to_string()))?;
    let mask = extract_silhouette(&image, &args.seg).map_err(|e| fail(1, e.to_string()))?;
    fs::write(&args.out, write_mask(&mask, args.ascii))
        .map_err(|e| fail(2, format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "{} foreground pixels -> {}",
        mask.count_foreground(),
        args.out.display()
    );
    Ok(())
}

//! End-to-end flows across module boundaries: bytes in, rankings out.

use shaperet_core::descriptor::{describe, DescriptorConfig, DescriptorMode};
use shaperet_core::error::Error;
use shaperet_core::image::{BinaryMask, GrayImage};
use shaperet_core::netpbm::{read_netpbm, write_gray};
use shaperet_core::retrieval::{
    cosine_similarity, load_db, rank, save_db, DescriptorDatabase, DescriptorRecord,
};
use shaperet_core::segmentation::{chan_vese, largest_component, ChanVeseParams};
use shaperet_core::threshold::{binarize, ThresholdMethod};

fn disk_image(n: usize, r: f64) -> GrayImage {
    let c = (n - 1) as f64 / 2.0;
    GrayImage::from_fn(n, n, 255, |x, y| {
        if (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= r * r {
            230
        } else {
            26
        }
    })
}

#[test]
fn bytes_to_ranking_round_trip() {
    let cfg = DescriptorConfig::default();
    let shapes: Vec<(&str, BinaryMask)> = vec![
        (
            "slab",
            BinaryMask::from_fn(40, 40, |x, y| {
                (10..30).contains(&x) && (14..26).contains(&y)
            }),
        ),
        (
            "frame",
            BinaryMask::from_fn(40, 40, |x, y| {
                let inner = (14..26).contains(&x) && (14..26).contains(&y);
                let outer = (8..32).contains(&x) && (8..32).contains(&y);
                outer && !inner
            }),
        ),
        (
            "wedge",
            BinaryMask::from_fn(40, 40, |x, y| (8..=32).contains(&x) && y >= 8 && y <= x),
        ),
    ];

    let mut db = DescriptorDatabase::new(cfg.grid_n, cfg.mode);
    for (id, mask) in &shapes {
        // Serialize to real image bytes and come back in before describing.
        let bytes = write_gray(&mask.to_gray(255, 255), false);
        let img = read_netpbm(&bytes).unwrap();
        let recovered = binarize(&img, ThresholdMethod::Otsu).unwrap();
        let clean = largest_component(&recovered).unwrap();
        assert_eq!(&clean, mask);
        db.push(DescriptorRecord {
            id: id.to_string(),
            label: id.to_string(),
            descriptor: describe(&clean, &cfg).unwrap(),
        })
        .unwrap();
    }

    let db = load_db(&save_db(&db)).unwrap();
    for (id, mask) in &shapes {
        let results = rank(&describe(mask, &cfg).unwrap(), &db, db.len()).unwrap();
        assert_eq!(&results[0].id, id);
        assert_eq!(format!("{:.6}", results[0].score), "1.000000");
        assert!(results[1].score < 1.0);
    }
}

#[test]
fn contour_and_threshold_segmentations_agree_downstream() {
    let img = disk_image(64, 18.0);
    let cfg = DescriptorConfig::default();

    let by_contour = chan_vese(&img, &ChanVeseParams::default()).unwrap().mask;
    let by_threshold = binarize(&img, ThresholdMethod::Otsu).unwrap();
    let d1 = describe(&largest_component(&by_contour).unwrap(), &cfg).unwrap();
    let d2 = describe(&largest_component(&by_threshold).unwrap(), &cfg).unwrap();
    let s = cosine_similarity(&d1.values, &d2.values).unwrap();
    assert!(s >= 0.98, "segmentation routes diverge: cosine {s}");
}

#[test]
fn describe_propagates_stage_errors() {
    let cfg = DescriptorConfig::default();
    assert_eq!(
        describe(&BinaryMask::new(10, 10), &cfg).unwrap_err(),
        Error::EmptyMask
    );

    // A single centered pixel normalizes to an all-on grid whose centroid
    // pixel covers everything within one ring: too few rings for a
    // bandwidth on a 3x3 grid.
    let tiny = DescriptorConfig {
        grid_n: 3,
        ..DescriptorConfig::default()
    };
    let mut m = BinaryMask::new(5, 5);
    m.set(2, 2, true);
    assert_eq!(describe(&m, &tiny).unwrap_err(), Error::TooFewRings(1));

    // The raw-histogram mode rejects an all-zero ring vector: only the
    // centroid pixel is on after normalization to 3x3... which cannot
    // happen from normalize (it fills the grid), so drive dhfp directly.
    let rings = shaperet_core::descriptor::RingCounts::from_counts(vec![0, 0], 1);
    assert_eq!(
        shaperet_core::descriptor::dhfp(&rings).unwrap_err(),
        Error::AllZeroCounts
    );

    // A single-pixel mask upsamples to a full grid and still describes fine
    // in every mode.
    let mut single = BinaryMask::new(64, 64);
    single.set(1, 1, true);
    for mode in DescriptorMode::ALL {
        let cfg = DescriptorConfig {
            mode,
            ..DescriptorConfig::default()
        };
        assert!(describe(&single, &cfg).is_ok(), "{mode}");
    }
}

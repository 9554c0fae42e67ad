//! Shared fixtures for the pipeline benchmarks.

use shaperet_core::dataset::{generate_dataset, DatasetConfig};
use shaperet_core::descriptor::{describe, DescriptorConfig};
use shaperet_core::image::{BinaryMask, GrayImage};
use shaperet_core::retrieval::{DescriptorDatabase, DescriptorRecord};
use shaperet_core::segmentation::largest_component;

/// A filled disk on an `n` x `n` canvas.
pub fn disk_mask(n: usize, r: f64) -> BinaryMask {
    let c = (n - 1) as f64 / 2.0;
    BinaryMask::from_fn(n, n, |x, y| {
        (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= r * r
    })
}

/// Two-level image of the disk.
pub fn disk_image(n: usize, r: f64) -> GrayImage {
    disk_mask(n, r).to_gray(255, 230)
}

/// The default 200-item benchmark database.
pub fn corpus_database() -> DescriptorDatabase {
    let cfg = DescriptorConfig::default();
    let items = generate_dataset(&DatasetConfig::default()).unwrap();
    let mut db = DescriptorDatabase::new(cfg.grid_n, cfg.mode);
    for item in &items {
        let clean = largest_component(&item.mask).unwrap();
        db.push(DescriptorRecord {
            id: item.id.clone(),
            label: item.label.clone(),
            descriptor: describe(&clean, &cfg).unwrap(),
        })
        .unwrap();
    }
    db
}

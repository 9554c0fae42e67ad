//! Normalization of silhouettes onto the fixed square descriptor grid.

use crate::error::Result;
use crate::image::BinaryMask;

/// Crops the mask to the tight foreground bounding box and nearest-neighbor
/// resamples it to `grid_n` x `grid_n`.
///
/// The crop removes translation exactly; the resample removes scale up to
/// aliasing. Source coordinates are `floor((target + 0.5) * extent / grid_n)`,
/// clamped to the crop. The output always keeps at least one foreground
/// pixel: in the rare case where a sparse mask slips entirely between sample
/// points, the first foreground pixel is mapped into the grid directly.
pub fn normalize_to_grid(mask: &BinaryMask, grid_n: usize) -> Result<BinaryMask> {
    assert!(grid_n >= 1, "grid_n must be >= 1");
    let (x0, y0, x1, y1) = mask.bounding_box()?;
    let src_w = x1 - x0 + 1;
    let src_h = y1 - y0 + 1;

    let mut out = BinaryMask::new(grid_n, grid_n);
    for ty in 0..grid_n {
        let sy = sample_coord(ty, src_h, grid_n);
        for tx in 0..grid_n {
            let sx = sample_coord(tx, src_w, grid_n);
            out.set(tx, ty, mask.get(x0 + sx, y0 + sy));
        }
    }

    if out.is_empty() {
        let (fx, fy) = mask
            .foreground()
            .next()
            .expect("bounding box implies foreground");
        let tx = sample_coord(fx - x0, grid_n, src_w).min(grid_n - 1);
        let ty = sample_coord(fy - y0, grid_n, src_h).min(grid_n - 1);
        out.set(tx, ty, true);
    }
    Ok(out)
}

/// floor((t + 0.5) * extent / n), clamped; exact in integer arithmetic.
fn sample_coord(t: usize, extent: usize, n: usize) -> usize {
    (((2 * t as u64 + 1) * extent as u64) / (2 * n as u64)).min(extent as u64 - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    #[test]
    fn tight_grid_sized_mask_is_unchanged() {
        // Foreground touches all four sides so the crop is the identity.
        let m = BinaryMask::from_rows(&[".#...", "#..#.", ".##.#", "..#..", ".#..#"]);
        assert_eq!(normalize_to_grid(&m, 5).unwrap(), m);
    }

    #[test]
    fn uniform_downsample_of_all_on_region() {
        let m = BinaryMask::from_fn(90, 90, |_, _| true);
        let out = normalize_to_grid(&m, 45).unwrap();
        assert_eq!((out.width(), out.height()), (45, 45));
        assert_eq!(out.count_foreground(), 45 * 45);
    }

    #[test]
    fn empty_mask_is_rejected() {
        assert_eq!(
            normalize_to_grid(&BinaryMask::new(8, 8), 45),
            Err(Error::EmptyMask)
        );
    }

    #[test]
    fn single_pixel_fills_the_grid() {
        let mut m = BinaryMask::new(10, 10);
        m.set(7, 3, true);
        let out = normalize_to_grid(&m, 45).unwrap();
        assert_eq!(out.count_foreground(), 45 * 45);
    }

    #[test]
    fn pathological_downsample_still_keeps_foreground() {
        // Corners of a 91-extent box land between the sample points of a
        // 45-cell grid; the fallback must keep the output nonempty.
        let mut m = BinaryMask::new(92, 92);
        for (x, y) in [(0, 0), (0, 91), (91, 0), (91, 91)] {
            m.set(x, y, true);
        }
        let out = normalize_to_grid(&m, 45).unwrap();
        assert!(out.count_foreground() >= 1);
    }

    fn arbitrary_mask(max_side: usize) -> impl Strategy<Value = BinaryMask> {
        (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
            proptest::collection::vec(proptest::bool::weighted(0.3), w * h)
                .prop_map(move |bits| BinaryMask::from_bits(w, h, bits))
        })
    }

    proptest! {
        #[test]
        fn output_is_square_with_foreground(m in arbitrary_mask(30), grid in 3usize..20) {
            prop_assume!(!m.is_empty());
            let out = normalize_to_grid(&m, grid).unwrap();
            prop_assert_eq!((out.width(), out.height()), (grid, grid));
            prop_assert!(out.count_foreground() >= 1);
        }

        // Bounding-box cropping makes normalization exactly translation
        // invariant for any in-canvas shift.
        #[test]
        fn translation_invariance_is_exact(m in arbitrary_mask(20), dx in 0isize..8, dy in 0isize..8) {
            prop_assume!(!m.is_empty());
            // Re-canvas so the shift cannot clip foreground.
            let mut wide = BinaryMask::new(m.width() + 8, m.height() + 8);
            for (x, y) in m.foreground() {
                wide.set(x, y, true);
            }
            let shifted = wide.translate(dx, dy);
            prop_assert_eq!(
                normalize_to_grid(&wide, 13).unwrap(),
                normalize_to_grid(&shifted, 13).unwrap()
            );
        }
    }
}

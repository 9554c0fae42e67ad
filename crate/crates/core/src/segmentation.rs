//! Single-object silhouette extraction.
//!
//! The heavy path is a two-phase active-contour evolution without edges:
//! a level set splits the image into two regions, each pulled toward its
//! mean intensity, with a curvature penalty keeping the contour short.
//! `largest_component` cleans up stray blobs afterward so downstream stages
//! see one object.

use crate::error::{Error, Result};
use crate::image::{BinaryMask, GrayImage};

/// Tuning knobs for the level-set evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChanVeseParams {
    /// Contour-length weight.
    pub mu: f64,
    /// Inside region-fit weight.
    pub lambda1: f64,
    /// Outside region-fit weight.
    pub lambda2: f64,
    /// Time step.
    pub dt: f64,
    /// Width of the smoothed Heaviside/delta regularization.
    pub epsilon: f64,
    /// Hard iteration cap.
    pub max_iters: usize,
    /// Convergence threshold on the mean absolute level-set change.
    pub tol: f64,
    /// Initial contour layout.
    pub init: InitStyle,
}

impl Default for ChanVeseParams {
    fn default() -> Self {
        Self {
            mu: 0.2,
            lambda1: 1.0,
            lambda2: 1.0,
            dt: 0.5,
            epsilon: 1.0,
            max_iters: 500,
            tol: 1e-3,
            init: InitStyle::Checkerboard,
        }
    }
}

/// Initial level-set layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStyle {
    /// sin(pi x / 5) * sin(pi y / 5): contours everywhere, converges fast.
    Checkerboard,
    /// Signed distance to a centered circle of radius min(w, h) / 3.
    CenteredCircle,
}

/// The evolving signed field; positive inside the contour.
#[derive(Debug, Clone)]
pub struct LevelSet {
    width: usize,
    height: usize,
    phi: Vec<f64>,
}

impl LevelSet {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.phi[y * self.width + x]
    }
}

/// Builds the initial level set for a `width` x `height` grid.
pub fn init_levelset(width: usize, height: usize, style: InitStyle) -> LevelSet {
    assert!(
        width >= 3 && height >= 3,
        "level set needs a 3x3 grid at least"
    );
    let mut phi = Vec::with_capacity(width * height);
    match style {
        InitStyle::Checkerboard => {
            let f = std::f64::consts::PI / 5.0;
            for y in 0..height {
                for x in 0..width {
                    phi.push((f * x as f64).sin() * (f * y as f64).sin());
                }
            }
        }
        InitStyle::CenteredCircle => {
            let r0 = width.min(height) as f64 / 3.0;
            let cx = (width - 1) as f64 / 2.0;
            let cy = (height - 1) as f64 / 2.0;
            for y in 0..height {
                for x in 0..width {
                    let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                    phi.push(r0 - d);
                }
            }
        }
    }
    LevelSet { width, height, phi }
}

/// Result of a level-set segmentation run.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub mask: BinaryMask,
    /// False when the iteration cap was hit before the tolerance.
    pub converged: bool,
    pub iterations: usize,
}

/// Two-phase active-contour segmentation.
///
/// Intensities are min-max rescaled to `[0, 1]` first, which makes the
/// result exactly invariant to affine intensity maps `a*u + b` (a > 0).
/// Each step recomputes the two region means through the smoothed Heaviside
/// of the level set, then moves the level set by the regularized delta times
/// the curvature and region-fit forces. Stops at `max_iters` (not an error;
/// reported through `converged`) or when the mean absolute update drops
/// below `tol`. The returned mask is the positive phase, flipped if that
/// phase covers more than half the image.
pub fn chan_vese(image: &GrayImage, params: &ChanVeseParams) -> Result<Segmentation> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }

    let lo = *image.pixels().iter().min().unwrap();
    let hi = *image.pixels().iter().max().unwrap();
    if lo == hi {
        return Err(Error::ConstantImage);
    }
    let span = (hi - lo) as f64;
    let u: Vec<f64> = image
        .pixels()
        .iter()
        .map(|&p| (p - lo) as f64 / span)
        .collect();

    let mut phi = init_levelset(w, h, params.init).phi;
    let n = (w * h) as f64;
    let eps = params.epsilon;
    let mut converged = false;
    let mut iterations = 0;

    let mut next = vec![0.0f64; w * h];
    for it in 0..params.max_iters {
        iterations = it + 1;

        // Region means under the smoothed Heaviside.
        let mut sum_in = 0.0;
        let mut area_in = 0.0;
        let mut sum_out = 0.0;
        let mut area_out = 0.0;
        for (i, &p) in phi.iter().enumerate() {
            let hv = 0.5 * (1.0 + std::f64::consts::FRAC_2_PI * (p / eps).atan());
            sum_in += u[i] * hv;
            area_in += hv;
            sum_out += u[i] * (1.0 - hv);
            area_out += 1.0 - hv;
        }
        let c1 = sum_in / area_in.max(1e-12);
        let c2 = sum_out / area_out.max(1e-12);

        let mut total_change = 0.0;
        for y in 0..h {
            let ym = y.saturating_sub(1);
            let yp = (y + 1).min(h - 1);
            for x in 0..w {
                let xm = x.saturating_sub(1);
                let xp = (x + 1).min(w - 1);
                let i = y * w + x;

                let p = phi[i];
                let px = (phi[y * w + xp] - phi[y * w + xm]) / 2.0;
                let py = (phi[yp * w + x] - phi[ym * w + x]) / 2.0;
                let pxx = phi[y * w + xp] - 2.0 * p + phi[y * w + xm];
                let pyy = phi[yp * w + x] - 2.0 * p + phi[ym * w + x];
                let pxy =
                    (phi[yp * w + xp] + phi[ym * w + xm] - phi[yp * w + xm] - phi[ym * w + xp])
                        / 4.0;
                let grad2 = px * px + py * py;
                // Clamped to the grid-resolvable range: the discrete ratio
                // spikes near critical points of phi and would catapult
                // pixels past any force the fit terms can apply.
                let curvature = ((pxx * py * py - 2.0 * px * py * pxy + pyy * px * px)
                    / (grad2 + 1e-8).powf(1.5))
                .clamp(-1.0, 1.0);

                let delta = (eps / std::f64::consts::PI) / (eps * eps + p * p);
                let fit1 = u[i] - c1;
                let fit2 = u[i] - c2;
                let change = params.dt
                    * delta
                    * (params.mu * curvature - params.lambda1 * fit1 * fit1
                        + params.lambda2 * fit2 * fit2);
                next[i] = p + change;
                total_change += change.abs();
            }
        }
        std::mem::swap(&mut phi, &mut next);

        if total_change / n < params.tol {
            converged = true;
            break;
        }
    }

    let mut mask = BinaryMask::from_fn(w, h, |x, y| phi[y * w + x] > 0.0);
    if mask.count_foreground() * 2 > w * h {
        mask = BinaryMask::from_fn(w, h, |x, y| !mask.get(x, y));
    }
    Ok(Segmentation {
        mask,
        converged,
        iterations,
    })
}

/// Keeps only the largest 8-connected foreground component. Ties go to the
/// component whose first pixel comes earliest in row-major order.
pub fn largest_component(mask: &BinaryMask) -> Result<BinaryMask> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (w, h) = (mask.width(), mask.height());
    let mut label = vec![usize::MAX; w * h];
    let mut best: Option<(usize, usize)> = None; // (size, component id)
    let mut n_components = 0;
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !mask.bits()[start] || label[start] != usize::MAX {
            continue;
        }
        let id = n_components;
        n_components += 1;
        let mut size = 0usize;
        stack.push(start);
        label[start] = id;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if mask.bits()[j] && label[j] == usize::MAX {
                        label[j] = id;
                        stack.push(j);
                    }
                }
            }
        }
        // Strict > keeps the earlier component on ties; components are
        // discovered in row-major order of their first pixel.
        if best.is_none_or(|(s, _)| size > s) {
            best = Some((size, id));
        }
    }

    let keep = best.expect("nonempty mask has a component").1;
    Ok(BinaryMask::from_fn(w, h, |x, y| label[y * w + x] == keep))
}

/// Mask overlap score `2|X and Y| / (|X| + |Y|)` in `[0, 1]`.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> f64 {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    let inter = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| **x && **y)
        .count();
    let total = a.count_foreground() + b.count_foreground();
    if total == 0 {
        return 1.0;
    }
    2.0 * inter as f64 / total as f64
}

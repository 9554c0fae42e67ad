//! Silhouette shape descriptors.
//!
//! The pipeline from a normalized mask to a matchable vector:
//!
//! 1. centroid from the zeroth/first silhouette moments, rounded to a pixel;
//! 2. counts of foreground pixels on the square rings (Chebyshev shells of
//!    width 1) around that pixel — the raw histogram vector;
//! 3. either L1 normalization of the raw counts (`dhfp`), or a Gaussian
//!    transform with a plug-in bandwidth selected from the counts themselves
//!    (`kdfpe_eq7` / `kdfpe_kde`).
//!
//! Vectors have fixed length `grid_n - 1`; rings beyond the grid are
//! zero-count entries so descriptors from differently-placed centroids stay
//! comparable.

use crate::error::{Error, Result};
use crate::grid::normalize_to_grid;
use crate::image::BinaryMask;

/// Descriptor grid side length used throughout the reference setup.
pub const DEFAULT_GRID: usize = 45;

/// Multiplier of the plug-in bandwidth rule.
pub const DEFAULT_BANDWIDTH_CONSTANT: f64 = 1.059;

const SQRT_TWO_PI: f64 = 2.5066282746310002;

/// Raw silhouette moment `sum of x^i y^j` over foreground pixels.
///
/// Order (0,0) is the foreground area; (1,0)/(0,1) are the first-order
/// moments about the y and x axes. An empty mask yields 0.
pub fn moment(mask: &BinaryMask, i: u32, j: u32) -> f64 {
    mask.foreground()
        .map(|(x, y)| (x as f64).powi(i as i32) * (y as f64).powi(j as i32))
        .sum()
}

/// Geometric center of a silhouette, in real and rounded pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centroid {
    /// m10 / m00.
    pub x: f64,
    /// m01 / m00.
    pub y: f64,
    /// floor(x + 0.5).
    pub grid_x: usize,
    /// floor(y + 0.5).
    pub grid_y: usize,
}

/// Centroid of the mask; fails with `EmptyMask` when there is no foreground.
pub fn centroid(mask: &BinaryMask) -> Result<Centroid> {
    let m00 = moment(mask, 0, 0);
    if m00 == 0.0 {
        return Err(Error::EmptyMask);
    }
    let x = moment(mask, 1, 0) / m00;
    let y = moment(mask, 0, 1) / m00;
    Ok(Centroid {
        x,
        y,
        grid_x: (x + 0.5).floor() as usize,
        grid_y: (y + 0.5).floor() as usize,
    })
}

/// Foreground counts per square ring around the rounded centroid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingCounts {
    counts: Vec<u64>,
    effective: usize,
}

impl RingCounts {
    /// Count of foreground pixels at Chebyshev distance `k + 1`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of rings with nonzero geometric extent: the largest Chebyshev
    /// distance from the centroid pixel to any grid corner.
    pub fn effective_rings(&self) -> usize {
        self.effective
    }

    /// Fixed vector length (`grid_n - 1`).
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    /// Test/analysis constructor from raw counts.
    pub fn from_counts(counts: Vec<u64>, effective: usize) -> Self {
        assert!(effective <= counts.len());
        assert!(counts[effective..].iter().all(|&c| c == 0));
        Self { counts, effective }
    }
}

/// Counts foreground pixels on each ring of width 1 around the centroid
/// pixel. Ring `k` is the set of pixels at Chebyshev distance exactly `k`;
/// the centroid pixel itself (distance 0) is never counted.
///
/// The mask must be square (a normalized grid); the vector has length
/// `grid_n - 1` with zeros past the last geometrically existing ring.
pub fn ring_counts(mask: &BinaryMask, c: &Centroid) -> Result<RingCounts> {
    assert_eq!(
        mask.width(),
        mask.height(),
        "ring counts need a square grid"
    );
    let n = mask.width();
    if c.grid_x >= n || c.grid_y >= n {
        return Err(Error::CentroidOutOfGrid {
            x: c.grid_x,
            y: c.grid_y,
        });
    }
    let mut counts = vec![0u64; n - 1];
    for (x, y) in mask.foreground() {
        let d = c.grid_x.abs_diff(x).max(c.grid_y.abs_diff(y));
        if d > 0 {
            counts[d - 1] += 1;
        }
    }
    let effective = c
        .grid_x
        .max(n - 1 - c.grid_x)
        .max(c.grid_y)
        .max(n - 1 - c.grid_y);
    Ok(RingCounts { counts, effective })
}

/// A selected kernel bandwidth and the statistics it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    /// The bandwidth h.
    pub value: f64,
    /// Sample standard deviation of the effective ring counts.
    pub std_dev: f64,
    /// Number of effective rings the statistics were taken over.
    pub rings: usize,
    /// True when the counts were all equal and the unit fallback fired.
    pub degenerate: bool,
}

/// Plug-in rule `h = constant * m^(-1/5) * s` over raw sample values.
///
/// `s` is the sample standard deviation (denominator `m - 1`). When the
/// samples are all equal, `s` is replaced by one count unit and the result
/// is marked degenerate so the bandwidth stays positive.
pub fn plug_in_bandwidth(samples: &[f64], constant: f64) -> Result<Bandwidth> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::TooFewRings(m));
    }
    let mf = m as f64;
    let mean = samples.iter().sum::<f64>() / mf;
    let var = samples
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (mf - 1.0);
    let s = var.sqrt();
    let (s, degenerate) = if s == 0.0 { (1.0, true) } else { (s, false) };
    Ok(Bandwidth {
        value: constant * mf.powf(-0.2) * s,
        std_dev: s,
        rings: m,
        degenerate,
    })
}

/// Bandwidth from the first `m_effective` ring counts.
pub fn optimal_bandwidth(rings: &RingCounts, constant: f64) -> Result<Bandwidth> {
    let m = rings.effective_rings();
    if m < 2 {
        return Err(Error::TooFewRings(m));
    }
    let samples: Vec<f64> = rings.counts[..m].iter().map(|&c| c as f64).collect();
    plug_in_bandwidth(&samples, constant)
}

/// Which transform turned ring counts into the stored vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescriptorMode {
    /// L1-normalized raw ring counts.
    Dhfp,
    /// Zero-centered Gaussian of each count: the default representation.
    KdfpeEq7,
    /// Full kernel density estimate evaluated at each count.
    KdfpeKde,
}

impl DescriptorMode {
    pub const ALL: [DescriptorMode; 3] = [
        DescriptorMode::Dhfp,
        DescriptorMode::KdfpeEq7,
        DescriptorMode::KdfpeKde,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DescriptorMode::Dhfp => "dhfp",
            DescriptorMode::KdfpeEq7 => "kdfpe_eq7",
            DescriptorMode::KdfpeKde => "kdfpe_kde",
        }
    }
}

impl std::fmt::Display for DescriptorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DescriptorMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dhfp" => Ok(DescriptorMode::Dhfp),
            "kdfpe_eq7" => Ok(DescriptorMode::KdfpeEq7),
            "kdfpe_kde" => Ok(DescriptorMode::KdfpeKde),
            other => Err(format!("unknown descriptor mode {other:?}")),
        }
    }
}

/// A fixed-length nonnegative vector representing one silhouette.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub mode: DescriptorMode,
    pub values: Vec<f64>,
    /// Present for the kernel modes; `None` for `dhfp` and loaded records.
    pub bandwidth: Option<Bandwidth>,
}

/// Normal density with mean 0 and deviation `h`, evaluated at `x`.
pub fn zero_centered_gaussian(h: f64, x: f64) -> f64 {
    (-0.5 * (x / h) * (x / h)).exp() / (h * SQRT_TWO_PI)
}

/// Kernel density estimate over `samples` with bandwidth `h`, at `x`.
pub fn kde_at(samples: &[f64], h: f64, x: f64) -> f64 {
    let sum: f64 = samples
        .iter()
        .map(|&s| (-0.5 * ((x - s) / h) * ((x - s) / h)).exp())
        .sum();
    sum / (samples.len() as f64 * h * SQRT_TWO_PI)
}

/// Maps every ring count (zero-padded entries included) through the
/// zero-centered Gaussian. A zero count lands on the peak `1/(h*sqrt(2*pi))`;
/// larger counts map to strictly smaller values.
pub fn kdfpe_eq7(rings: &RingCounts, bandwidth: &Bandwidth) -> Descriptor {
    let h = bandwidth.value;
    Descriptor {
        mode: DescriptorMode::KdfpeEq7,
        values: rings
            .counts
            .iter()
            .map(|&c| zero_centered_gaussian(h, c as f64))
            .collect(),
        bandwidth: Some(*bandwidth),
    }
}

/// Evaluates the full kernel density estimate built from the effective ring
/// counts at each vector entry (zero-padded entries evaluate at 0).
pub fn kdfpe_kde(rings: &RingCounts, bandwidth: &Bandwidth) -> Descriptor {
    let m = rings.effective_rings().max(1).min(rings.len());
    let samples: Vec<f64> = rings.counts[..m].iter().map(|&c| c as f64).collect();
    Descriptor {
        mode: DescriptorMode::KdfpeKde,
        values: rings
            .counts
            .iter()
            .map(|&c| kde_at(&samples, bandwidth.value, c as f64))
            .collect(),
        bandwidth: Some(*bandwidth),
    }
}

/// The raw ring-count vector, L1-normalized.
pub fn dhfp(rings: &RingCounts) -> Result<Descriptor> {
    let total: u64 = rings.counts.iter().sum();
    if total == 0 {
        return Err(Error::AllZeroCounts);
    }
    Ok(Descriptor {
        mode: DescriptorMode::Dhfp,
        values: rings
            .counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect(),
        bandwidth: None,
    })
}

/// End-to-end descriptor settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorConfig {
    pub grid_n: usize,
    pub mode: DescriptorMode,
    pub bandwidth_constant: f64,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_GRID,
            mode: DescriptorMode::KdfpeEq7,
            bandwidth_constant: DEFAULT_BANDWIDTH_CONSTANT,
        }
    }
}

/// Full pipeline from an arbitrary silhouette to its descriptor:
/// grid normalization, centroid, ring counts, then the configured transform.
pub fn describe(mask: &BinaryMask, config: &DescriptorConfig) -> Result<Descriptor> {
    let rings = grid_ring_counts(mask, config.grid_n)?;
    match config.mode {
        DescriptorMode::Dhfp => dhfp(&rings),
        DescriptorMode::KdfpeEq7 => {
            let bw = optimal_bandwidth(&rings, config.bandwidth_constant)?;
            Ok(kdfpe_eq7(&rings, &bw))
        }
        DescriptorMode::KdfpeKde => {
            let bw = optimal_bandwidth(&rings, config.bandwidth_constant)?;
            Ok(kdfpe_kde(&rings, &bw))
        }
    }
}

/// Normalization plus ring extraction, shared by all modes.
pub fn grid_ring_counts(mask: &BinaryMask, grid_n: usize) -> Result<RingCounts> {
    let normalized = normalize_to_grid(mask, grid_n)?;
    let c = centroid(&normalized)?;
    ring_counts(&normalized, &c)
}

//! First-order intensity statistics over the masked voxels. Entropy and
//! Uniformity run on the discretized levels; everything else on raw values.

use crate::linalg::{percentile, xlog2};

use super::discretize::DiscretizedVoi;

pub const FIRST_ORDER_NAMES: [&str; 18] = [
    "Energy",
    "TotalEnergy",
    "Entropy",
    "Minimum",
    "10Percentile",
    "90Percentile",
    "Maximum",
    "Mean",
    "Median",
    "InterquartileRange",
    "Range",
    "MeanAbsoluteDeviation",
    "RobustMeanAbsoluteDeviation",
    "RootMeanSquared",
    "Skewness",
    "Kurtosis",
    "Variance",
    "Uniformity",
];

/// All 18 first-order values. `voxel_volume` is the physical volume of one
/// voxel (mm^3), used by TotalEnergy.
pub fn first_order_features(d: &DiscretizedVoi, voxel_volume: f64) -> [f64; 18] {
    let xs = &d.values;
    let n = xs.len() as f64;

    let energy: f64 = xs.iter().map(|x| x * x).sum();
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    let kurtosis = if m2 > 0.0 { m4 / (m2 * m2) } else { 0.0 };

    let mut sorted = xs.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let minimum = sorted[0];
    let maximum = sorted[sorted.len() - 1];
    let p10 = percentile(&sorted, 10.0);
    let p90 = percentile(&sorted, 90.0);
    let median = percentile(&sorted, 50.0);
    let iqr = percentile(&sorted, 75.0) - percentile(&sorted, 25.0);

    let mad = xs.iter().map(|x| (x - mean).abs()).sum::<f64>() / n;
    let robust: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|&x| x >= p10 && x <= p90)
        .collect();
    let rmad = if robust.is_empty() {
        0.0
    } else {
        let rmean = robust.iter().sum::<f64>() / robust.len() as f64;
        robust.iter().map(|x| (x - rmean).abs()).sum::<f64>() / robust.len() as f64
    };

    // discretized-bin probabilities for Entropy / Uniformity
    let counts = d.level_counts();
    let mut entropy = 0.0;
    let mut uniformity = 0.0;
    for c in counts {
        let p = c / n;
        entropy -= xlog2(p);
        uniformity += p * p;
    }

    [
        energy,
        energy * voxel_volume,
        entropy,
        minimum,
        p10,
        p90,
        maximum,
        mean,
        median,
        iqr,
        maximum - minimum,
        mad,
        rmad,
        (energy / n).sqrt(),
        skewness,
        kurtosis,
        m2,
        uniformity,
    ]
}

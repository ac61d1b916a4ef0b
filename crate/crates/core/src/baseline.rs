//! Classical point-set metrics: Chamfer, Hausdorff, EMD and thresholded
//! precision / recall / F-score.
//!
//! Per-point distances may be computed in parallel, but every reduction runs
//! sequentially in point order so results do not depend on thread count.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};
use crate::index::NnIndex;

pub const DEFAULT_EMD_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HausdorffVariant {
    /// Sum of the two one-sided distances.
    #[default]
    Sum,
    /// Maximum of the two one-sided distances.
    Max,
}

impl FromStr for HausdorffVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sum" => Ok(HausdorffVariant::Sum),
            "max" => Ok(HausdorffVariant::Max),
            other => Err(format!("expected `sum` or `max`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    /// mm².
    pub chamfer: f64,
    pub hausdorff: f64,
    pub hausdorff_variant: HausdorffVariant,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
    pub threshold_d: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub emd: Option<f64>,
}

/// Squared distance from each point of `from` to its nearest neighbor in `to`,
/// in `from` order.
fn directed_sq(from: &[Point3], to: &NnIndex) -> Vec<f64> {
    from.par_iter().map(|p| to.nearest_distance_sq(*p)).collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn max_sqrt(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max).sqrt()
}

fn fraction_within(sq: &[f64], d: f64) -> f64 {
    let hits = sq.iter().filter(|&&s| s.sqrt() < d).count();
    hits as f64 / sq.len() as f64
}

/// Nearest-neighbor distances in both directions, computed once and shared
/// by every NN-based metric.
pub struct DistancePair {
    /// p1 → p2, squared.
    forward: Vec<f64>,
    /// p2 → p1, squared.
    backward: Vec<f64>,
}

impl DistancePair {
    pub fn new(p1: &PointCloud, p2: &PointCloud) -> Result<Self> {
        let i1 = NnIndex::new(p1)?;
        let i2 = NnIndex::new(p2)?;
        Ok(DistancePair {
            forward: directed_sq(p1.points(), &i2),
            backward: directed_sq(p2.points(), &i1),
        })
    }

    pub fn chamfer(&self) -> f64 {
        mean(&self.forward) + mean(&self.backward)
    }

    pub fn hausdorff(&self, variant: HausdorffVariant) -> f64 {
        let (f, b) = (max_sqrt(&self.forward), max_sqrt(&self.backward));
        match variant {
            HausdorffVariant::Sum => f + b,
            HausdorffVariant::Max => f.max(b),
        }
    }

    /// Fraction of p1 within `d` of p2 (precision when p1 is the query).
    pub fn forward_within(&self, d: f64) -> f64 {
        fraction_within(&self.forward, d)
    }

    pub fn backward_within(&self, d: f64) -> f64 {
        fraction_within(&self.backward, d)
    }
}

pub fn chamfer_distance(p1: &PointCloud, p2: &PointCloud) -> Result<f64> {
    Ok(DistancePair::new(p1, p2)?.chamfer())
}

pub fn hausdorff_distance(p1: &PointCloud, p2: &PointCloud, variant: HausdorffVariant) -> Result<f64> {
    Ok(DistancePair::new(p1, p2)?.hausdorff(variant))
}

/// Minimum over bijections of the summed point distances. Both clouds must
/// have the same size, at most `cap` points.
pub fn emd_exact(p1: &PointCloud, p2: &PointCloud, cap: usize) -> Result<f64> {
    let n = p1.len();
    if n != p2.len() {
        return Err(Error::SizeMismatch {
            left: n,
            right: p2.len(),
        });
    }
    if n > cap {
        return Err(Error::OverCap { size: n, cap });
    }
    let (a, b) = (p1.points(), p2.points());
    let cost: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x.distance(*y))).collect();
    let assignment = assignment::solve(&cost, n);
    Ok(assignment.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum())
}

fn check_threshold(d: f64) -> Result<()> {
    Error::positive("threshold d", d)
}

/// Fraction of query points strictly closer than `d` to the ground truth.
pub fn precision_at(query: &PointCloud, gt: &PointCloud, d: f64) -> Result<f64> {
    check_threshold(d)?;
    let gt_index = NnIndex::new(gt)?;
    if query.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(fraction_within(&directed_sq(query.points(), &gt_index), d))
}

/// Fraction of ground-truth points strictly closer than `d` to the query.
pub fn recall_at(query: &PointCloud, gt: &PointCloud, d: f64) -> Result<f64> {
    precision_at(gt, query, d)
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn harmonic_fscore(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn fscore_at(query: &PointCloud, gt: &PointCloud, d: f64) -> Result<f64> {
    check_threshold(d)?;
    let pair = DistancePair::new(query, gt)?;
    Ok(harmonic_fscore(pair.forward_within(d), pair.backward_within(d)))
}

#[derive(Debug, Clone, Copy)]
pub struct BaselineOptions {
    pub threshold_d: f64,
    pub hausdorff: HausdorffVariant,
    /// Compute EMD, with the given size cap.
    pub emd_cap: Option<usize>,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        BaselineOptions {
            threshold_d: 10.0,
            hausdorff: HausdorffVariant::Sum,
            emd_cap: None,
        }
    }
}

/// All baseline metrics for a query against ground truth.
pub fn baseline_metrics(query: &PointCloud, gt: &PointCloud, opts: &BaselineOptions) -> Result<BaselineResult> {
    check_threshold(opts.threshold_d)?;
    let pair = DistancePair::new(query, gt)?;
    let precision = pair.forward_within(opts.threshold_d);
    let recall = pair.backward_within(opts.threshold_d);
    let emd = opts.emd_cap.map(|cap| emd_exact(query, gt, cap)).transpose()?;
    Ok(BaselineResult {
        chamfer: pair.chamfer(),
        hausdorff: pair.hausdorff(opts.hausdorff),
        hausdorff_variant: opts.hausdorff,
        precision,
        recall,
        fscore: harmonic_fscore(precision, recall),
        threshold_d: opts.threshold_d,
        emd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cloud(pts: &[(f64, f64, f64)]) -> PointCloud {
        PointCloud::from_points(pts.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect())
    }

    #[test]
    fn chamfer_examples() {
        let a = cloud(&[(0.0, 0.0, 0.0), (1.0, 2.0, 3.0)]);
        assert_eq!(chamfer_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(
            chamfer_distance(&cloud(&[(0.0, 0.0, 0.0)]), &cloud(&[(1.0, 0.0, 0.0)])).unwrap(),
            2.0
        );
        assert_eq!(
            chamfer_distance(&cloud(&[(0.0, 0.0, 0.0), (2.0, 0.0, 0.0)]), &cloud(&[(0.0, 0.0, 0.0)])).unwrap(),
            2.0
        );
        assert!(matches!(
            chamfer_distance(&a, &PointCloud::new()),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn hausdorff_examples() {
        let o = cloud(&[(0.0, 0.0, 0.0)]);
        let x3 = cloud(&[(3.0, 0.0, 0.0)]);
        assert_eq!(hausdorff_distance(&o, &o, HausdorffVariant::Sum).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&o, &o, HausdorffVariant::Max).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&o, &x3, HausdorffVariant::Sum).unwrap(), 6.0);
        assert_eq!(hausdorff_distance(&o, &x3, HausdorffVariant::Max).unwrap(), 3.0);
        let two = cloud(&[(0.0, 0.0, 0.0), (10.0, 0.0, 0.0)]);
        assert_eq!(hausdorff_distance(&two, &o, HausdorffVariant::Sum).unwrap(), 10.0);
        assert_eq!(hausdorff_distance(&two, &o, HausdorffVariant::Max).unwrap(), 10.0);
    }

    #[test]
    fn emd_examples() {
        let a = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        let b = cloud(&[(1.0, 0.0, 0.0), (0.0, 0.0, 0.0)]);
        assert_eq!(emd_exact(&a, &a, DEFAULT_EMD_CAP).unwrap(), 0.0);
        assert_eq!(emd_exact(&a, &b, DEFAULT_EMD_CAP).unwrap(), 0.0);
        let c = cloud(&[(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)]);
        let d = cloud(&[(2.0, 0.0, 0.0), (2.0, 0.0, 1.0)]);
        assert!((emd_exact(&c, &d, DEFAULT_EMD_CAP).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn emd_errors() {
        let a = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        let b = cloud(&[(0.0, 0.0, 0.0)]);
        assert!(matches!(
            emd_exact(&a, &b, 10),
            Err(Error::SizeMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(emd_exact(&a, &a, 1), Err(Error::OverCap { size: 2, cap: 1 })));
    }

    #[test]
    fn precision_recall_examples() {
        let q = cloud(&[(0.0, 0.0, 0.0), (5.0, 0.0, 0.0)]);
        let g = cloud(&[(0.0, 0.0, 0.0)]);
        assert_eq!(precision_at(&q, &q, 1.0).unwrap(), 1.0);
        assert_eq!(precision_at(&q, &g, 1.0).unwrap(), 0.5);
        assert_eq!(recall_at(&g, &q, 1.0).unwrap(), 0.5);
        assert_eq!(recall_at(&q, &q, 1.0).unwrap(), 1.0);
        // strict inequality at exactly d
        let at_d = cloud(&[(1.0, 0.0, 0.0)]);
        assert_eq!(precision_at(&at_d, &g, 1.0).unwrap(), 0.0);
        assert!(matches!(precision_at(&q, &g, 0.0), Err(Error::NonPositive { .. })));
        assert!(matches!(
            precision_at(&PointCloud::new(), &g, 1.0),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn fscore_examples() {
        assert_eq!(harmonic_fscore(0.5, 0.5), 0.5);
        assert_eq!(harmonic_fscore(1.0, 0.0), 0.0);
        assert_eq!(harmonic_fscore(0.0, 0.0), 0.0);
        let q = cloud(&[(0.0, 0.0, 0.0), (5.0, 0.0, 0.0)]);
        assert_eq!(fscore_at(&q, &q, 1.0).unwrap(), 1.0);
        // P = 0.5 (query), R = 1 (gt) → 2/3
        let g = cloud(&[(0.0, 0.0, 0.0)]);
        assert!((fscore_at(&q, &g, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identical_clouds_all_metrics() {
        let c = cloud(&[(0.0, 0.0, 0.0), (5.0, 1.0, 2.0), (-3.0, 4.0, 0.5)]);
        let r = baseline_metrics(
            &c,
            &c,
            &BaselineOptions {
                threshold_d: 10.0,
                hausdorff: HausdorffVariant::Sum,
                emd_cap: Some(DEFAULT_EMD_CAP),
            },
        )
        .unwrap();
        assert_eq!((r.chamfer, r.hausdorff), (0.0, 0.0));
        assert_eq!((r.precision, r.recall, r.fscore), (1.0, 1.0, 1.0));
        assert_eq!(r.emd, Some(0.0));
    }

    fn arb_cloud() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64), 1..60).prop_map(|v| cloud(&v))
    }

    proptest! {
        #[test]
        fn symmetric_metrics(a in arb_cloud(), b in arb_cloud()) {
            prop_assert_eq!(chamfer_distance(&a, &b).unwrap(), chamfer_distance(&b, &a).unwrap());
            for v in [HausdorffVariant::Sum, HausdorffVariant::Max] {
                prop_assert_eq!(hausdorff_distance(&a, &b, v).unwrap(), hausdorff_distance(&b, &a, v).unwrap());
            }
        }

        #[test]
        fn recall_is_swapped_precision(a in arb_cloud(), b in arb_cloud(), d in 0.1..40.0f64) {
            prop_assert_eq!(recall_at(&a, &b, d).unwrap(), precision_at(&b, &a, d).unwrap());
        }

        #[test]
        fn precision_recall_monotone_in_d(a in arb_cloud(), b in arb_cloud(), d1 in 0.1..40.0f64, extra in 0.0..40.0f64) {
            let d2 = d1 + extra;
            prop_assert!(precision_at(&a, &b, d1).unwrap() <= precision_at(&a, &b, d2).unwrap());
            prop_assert!(recall_at(&a, &b, d1).unwrap() <= recall_at(&a, &b, d2).unwrap());
        }

        #[test]
        fn translation_invariant(a in arb_cloud(), b in arb_cloud(), t in (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64)) {
            let off = Point3::new(t.0, t.1, t.2);
            let (ta, tb) = (a.clone().translated(off), b.clone().translated(off));
            let opts = BaselineOptions { threshold_d: 7.5, ..Default::default() };
            let r0 = baseline_metrics(&a, &b, &opts).unwrap();
            let r1 = baseline_metrics(&ta, &tb, &opts).unwrap();
            prop_assert!((r0.chamfer - r1.chamfer).abs() <= 1e-9 * r0.chamfer.max(1.0));
            prop_assert!((r0.hausdorff - r1.hausdorff).abs() <= 1e-9 * r0.hausdorff.max(1.0));
            prop_assert!((r0.precision - r1.precision).abs() <= 1e-9);
            prop_assert!((r0.recall - r1.recall).abs() <= 1e-9);
            prop_assert!((r0.fscore - r1.fscore).abs() <= 1e-9);
        }
    }
}

use serde::{Deserialize, Serialize};

use super::descent::PathOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Aligned,
    /// False positive collision: the query predicts a collision that the
    /// ground truth does not have within tolerance.
    Fpc,
    /// False negative collision: the query misses a ground-truth collision.
    Fnc,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Aligned => "Aligned",
            Label::Fpc => "FPC",
            Label::Fnc => "FNC",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "Aligned" => Some(Label::Aligned),
            "FPC" => Some(Label::Fpc),
            "FNC" => Some(Label::Fnc),
            _ => None,
        }
    }
}

/// Which query path a ground-truth path was matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Neighbor {
    Center,
    PlusI,
    MinusI,
    PlusJ,
    MinusJ,
}

impl Neighbor {
    /// Candidate order; ties go to the earlier entry.
    pub const ORDER: [Neighbor; 5] = [
        Neighbor::Center,
        Neighbor::PlusI,
        Neighbor::MinusI,
        Neighbor::PlusJ,
        Neighbor::MinusJ,
    ];

    pub fn offset(self) -> (i64, i64) {
        match self {
            Neighbor::Center => (0, 0),
            Neighbor::PlusI => (1, 0),
            Neighbor::MinusI => (-1, 0),
            Neighbor::PlusJ => (0, 1),
            Neighbor::MinusJ => (0, -1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Neighbor::Center => "center",
            Neighbor::PlusI => "+i",
            Neighbor::MinusI => "-i",
            Neighbor::PlusJ => "+j",
            Neighbor::MinusJ => "-j",
        }
    }

    pub fn parse(s: &str) -> Option<Neighbor> {
        Neighbor::ORDER.into_iter().find(|n| n.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelDecision {
    pub label: Label,
    pub neighbor: Neighbor,
    pub used: PathOutcome,
}

/// Disagreement between two outcomes: depth gap when both collide, zero when
/// both miss, infinite when only one collides.
pub fn depth_gap(gt: PathOutcome, query: PathOutcome) -> f64 {
    match (gt.collision, query.collision) {
        (Some(g), Some(q)) => (g - q).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Labels a ground-truth path against the co-located query path and its four
/// axis neighbors, given in [`Neighbor::ORDER`]. `None` marks neighbors
/// outside the grid.
pub fn label_path(gt: PathOutcome, candidates: [Option<PathOutcome>; 5], t_z: f64) -> LabelDecision {
    let center = candidates[0].unwrap_or(PathOutcome::MISS);
    let mut best = (Neighbor::Center, center, depth_gap(gt, center));
    for (neighbor, cand) in Neighbor::ORDER.into_iter().zip(candidates).skip(1) {
        if let Some(cand) = cand {
            let gap = depth_gap(gt, cand);
            if gap < best.2 {
                best = (neighbor, cand, gap);
            }
        }
    }
    let (neighbor, used, gap) = best;
    let label = if gap <= t_z {
        Label::Aligned
    } else {
        match (gt.collision, used.collision) {
            (None, Some(_)) => Label::Fpc,
            (Some(_), None) => Label::Fnc,
            (Some(g), Some(q)) if q < g - t_z => Label::Fpc,
            (Some(_), Some(_)) => Label::Fnc,
            (None, None) => unreachable!("both-miss gap is zero"),
        }
    };
    LabelDecision { label, neighbor, used }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MISS: PathOutcome = PathOutcome::MISS;

    fn hit(t: f64) -> Option<PathOutcome> {
        Some(PathOutcome::hit(t))
    }

    #[test]
    fn within_tolerance_is_aligned() {
        let d = label_path(PathOutcome::hit(50.0), [hit(52.0), None, None, None, None], 10.0);
        assert_eq!((d.label, d.neighbor), (Label::Aligned, Neighbor::Center));
    }

    #[test]
    fn all_queries_miss_is_fnc() {
        let d = label_path(PathOutcome::hit(100.0), [Some(MISS); 5], 10.0);
        assert_eq!((d.label, d.neighbor, d.used), (Label::Fnc, Neighbor::Center, MISS));
    }

    #[test]
    fn ghost_collision_is_fpc() {
        let d = label_path(MISS, [hit(40.0), None, None, None, None], 10.0);
        assert_eq!(d.label, Label::Fpc);
        assert_eq!(d.used, PathOutcome::hit(40.0));
    }

    #[test]
    fn early_query_collision_is_fpc() {
        let d = label_path(
            PathOutcome::hit(100.0),
            [hit(80.0), hit(75.0), None, hit(70.0), None],
            10.0,
        );
        assert_eq!((d.label, d.neighbor), (Label::Fpc, Neighbor::Center));
    }

    #[test]
    fn late_query_collision_is_fnc() {
        let d = label_path(PathOutcome::hit(100.0), [hit(120.0), None, None, None, None], 10.0);
        assert_eq!(d.label, Label::Fnc);
    }

    #[test]
    fn neighbor_rescues_alignment() {
        let d = label_path(
            PathOutcome::hit(100.0),
            [hit(130.0), hit(105.0), None, None, None],
            10.0,
        );
        assert_eq!((d.label, d.neighbor), (Label::Aligned, Neighbor::PlusI));
        assert_eq!(d.used, PathOutcome::hit(105.0));
    }

    #[test]
    fn ties_prefer_earlier_candidate() {
        let d = label_path(
            PathOutcome::hit(100.0),
            [hit(130.0), hit(70.0), hit(130.0), None, hit(70.0)],
            10.0,
        );
        assert_eq!(d.neighbor, Neighbor::Center);
        let d = label_path(
            PathOutcome::hit(100.0),
            [hit(150.0), hit(130.0), hit(70.0), None, None],
            10.0,
        );
        assert_eq!((d.neighbor, d.label), (Neighbor::PlusI, Label::Fnc));
        let d = label_path(MISS, [hit(5.0), None, Some(MISS), Some(MISS), None], 0.0);
        assert_eq!((d.neighbor, d.label), (Neighbor::MinusI, Label::Aligned));
    }

    #[test]
    fn both_miss_is_aligned() {
        assert_eq!(
            label_path(MISS, [Some(MISS), None, None, None, None], 0.0).label,
            Label::Aligned
        );
    }

    #[test]
    fn boundary_is_inclusive() {
        let d = label_path(PathOutcome::hit(100.0), [hit(90.0), None, None, None, None], 10.0);
        assert_eq!(d.label, Label::Aligned);
    }

    fn outcome() -> impl Strategy<Value = Option<PathOutcome>> {
        prop_oneof![
            Just(None),
            Just(Some(MISS)),
            (-100i32..100).prop_map(|t| Some(PathOutcome::hit(t as f64 * 0.5))),
        ]
    }

    proptest! {
        #[test]
        fn relabeling_only_moves_toward_aligned(
            gt in (-100i32..100).prop_map(|t| PathOutcome::hit(t as f64 * 0.5)),
            center in (-100i32..100).prop_map(|t| Some(PathOutcome::hit(t as f64 * 0.5))),
            n in prop::array::uniform4(outcome()),
            tz1 in 0.0..30.0f64,
            extra in 0.0..30.0f64,
        ) {
            let cands = [center, n[0], n[1], n[2], n[3]];
            let a = label_path(gt, cands, tz1);
            let b = label_path(gt, cands, tz1 + extra);
            prop_assert!(a.label == b.label || b.label == Label::Aligned);
        }
    }
}

//! Ideal kinds over a partition, membership certificates, and the covering
//! game.
//!
//! Five ideal kinds are supported over any partition 𝓐 of the grid:
//!
//! - `FinGen`: generated by the blocks — members sit inside finitely many
//!   blocks plus a finite delta.
//! - `Sel`: bounded selectors — at most `width` points in every block.
//! - `ED`: eventually bounded — at most `width` points per block outside a
//!   finite exceptional set of blocks.
//! - `OFin`: block-finite — an explicit finite bound per block.
//! - `FinFin`: finitely many whole blocks plus a block-finite rest.
//!
//! A [`Certificate`] is self-contained evidence of membership at window
//! scale; [`check_certificate`] replays it against the coloring oracle.  The
//! P(J) covering game ([`game_round`]) takes a countable family (cut to the
//! window), a candidate member presented with its own certificate, and a
//! J-budget; it reports the first family member whose residual overflows the
//! budget.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{set_difference, set_intersection, Point, PointSet, Window};
use crate::partition::{build_coloring, ColorId, Coloring, PartitionError, PartitionSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdealError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("point {0} lies outside the window")]
    WindowMismatch(Point),
    #[error("candidate certificate does not check against its own spec")]
    InvalidCandidate,
    #[error("the complement of the dual-filter set fails every certificate within budget")]
    InvalidDualWitness,
}

/// The five ideal kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum IdealKind {
    FinGen,
    Sel,
    #[serde(rename = "ed")]
    Ed,
    OFin,
    FinFin,
}

impl IdealKind {
    pub const ALL: [IdealKind; 5] = [
        IdealKind::FinGen,
        IdealKind::Sel,
        IdealKind::Ed,
        IdealKind::OFin,
        IdealKind::FinFin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdealKind::FinGen => "finGen",
            IdealKind::Sel => "sel",
            IdealKind::Ed => "ed",
            IdealKind::OFin => "oFin",
            IdealKind::FinFin => "finFin",
        }
    }
}

/// An ideal kind together with the partition inducing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSpec {
    pub kind: IdealKind,
    pub partition: PartitionSpec,
}

impl IdealSpec {
    pub fn new(kind: IdealKind, partition: PartitionSpec) -> Self {
        IdealSpec { kind, partition }
    }
}

/// Membership evidence for one set against one [`IdealSpec`].
///
/// Field use by kind: `FinGen` reads `colors` + `delta`; `Sel` reads
/// `width` + `delta`; `ED` reads `colors` (the exceptional blocks exempt
/// from the width bound) + `width` + `delta`; `OFin` reads `perBlock` +
/// `delta` (blocks missing from the map are bounded by 0); `FinFin` reads
/// `colors` (whole blocks) + `perBlock` for the rest + `delta`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Certificate {
    pub colors: BTreeSet<ColorId>,
    pub width: u64,
    pub per_block: BTreeMap<ColorId, u64>,
    pub delta: PointSet,
}

impl Certificate {
    pub fn from_colors<I: IntoIterator<Item = ColorId>>(colors: I) -> Self {
        Certificate {
            colors: colors.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn from_width(width: u64) -> Self {
        Certificate {
            width,
            ..Default::default()
        }
    }

    pub fn with_delta(mut self, delta: PointSet) -> Self {
        self.delta = delta;
        self
    }

    /// A uniform per-block bound over the named blocks.
    pub fn uniform_per_block<I: IntoIterator<Item = ColorId>>(blocks: I, bound: u64) -> Self {
        Certificate {
            per_block: blocks.into_iter().map(|c| (c, bound)).collect(),
            ..Default::default()
        }
    }
}

/// Search/enumeration budgets shared by certificate synthesis, the covering
/// game drivers and the classification table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Budgets {
    /// Most generator blocks a certificate may name.
    pub max_colors: usize,
    /// Most points a finite delta may hold.
    pub max_delta: usize,
    /// Largest selector width / per-block bound.
    pub max_width: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_colors: 6,
            max_delta: 20,
            max_width: 4,
        }
    }
}

fn ensure_in_window(x: &PointSet, w: Window) -> Result<(), IdealError> {
    match x.iter().find(|p| !w.contains(**p)) {
        Some(p) => Err(IdealError::WindowMismatch(*p)),
        None => Ok(()),
    }
}

fn block_counts(coloring: &Coloring, x: &PointSet) -> BTreeMap<ColorId, u64> {
    let mut counts = BTreeMap::new();
    for &p in x {
        *counts.entry(coloring.color(p)).or_insert(0) += 1;
    }
    counts
}

/// Replays `cert` as evidence that `x` belongs to the ideal at window scale.
pub fn check_certificate(
    spec: &IdealSpec,
    x: &PointSet,
    cert: &Certificate,
    w: Window,
) -> Result<bool, IdealError> {
    ensure_in_window(x, w)?;
    let coloring = build_coloring(&spec.partition, w)?;
    let core = set_difference(x, &cert.delta);
    let counts = block_counts(&coloring, &core);
    let ok = match spec.kind {
        IdealKind::FinGen => counts.keys().all(|c| cert.colors.contains(c)),
        IdealKind::Sel => counts.values().all(|&n| n <= cert.width),
        IdealKind::Ed => counts
            .iter()
            .all(|(c, &n)| cert.colors.contains(c) || n <= cert.width),
        IdealKind::OFin => counts
            .iter()
            .all(|(c, &n)| n <= cert.per_block.get(c).copied().unwrap_or(0)),
        IdealKind::FinFin => counts.iter().all(|(c, &n)| {
            cert.colors.contains(c) || n <= cert.per_block.get(c).copied().unwrap_or(0)
        }),
    };
    Ok(ok)
}

/// The least selector width admitting `x`: the largest block fiber of `x`.
pub fn minimal_width(a: &PartitionSpec, x: &PointSet, w: Window) -> Result<u64, IdealError> {
    ensure_in_window(x, w)?;
    let coloring = build_coloring(a, w)?;
    Ok(block_counts(&coloring, x).into_values().max().unwrap_or(0))
}

/// The window set a certificate stands for.
///
/// Kinds with generator blocks (`FinGen`, `ED`, `FinFin`) realize the union
/// of their named blocks plus the delta; `Sel` and `OFin` certificates
/// describe bounds rather than generators, so they realize the delta alone —
/// window-scale candidates for those kinds are explicit point sets.
pub fn realize(spec: &IdealSpec, cert: &Certificate, w: Window) -> Result<PointSet, IdealError> {
    let mut out = cert.delta.clone();
    match spec.kind {
        IdealKind::FinGen | IdealKind::Ed | IdealKind::FinFin => {
            let coloring = build_coloring(&spec.partition, w)?;
            for &c in &cert.colors {
                out.extend(coloring.block_points_in(c, w));
            }
        }
        IdealKind::Sel | IdealKind::OFin => {}
    }
    Ok(out)
}

/// Outcome of one round of the P(J) covering game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum GameOutcome {
    /// Every family member's residual fit the J-budget.
    AllCovered,
    /// `family[index] ∖ candidate` overflowed the budget; the residual is
    /// returned for independent recounting.
    Defeated { index: usize, residual: PointSet },
}

/// Plays one round of the covering game: the candidate (a certificate for
/// `candidate.0`) tries to absorb every member of `family` up to J-small
/// residuals measured by `jbudget` under `jspec`.
pub fn game_round(
    family: &[PointSet],
    candidate: (&IdealSpec, &Certificate),
    jspec: &IdealSpec,
    jbudget: &Certificate,
    w: Window,
) -> Result<GameOutcome, IdealError> {
    let (ispec, icert) = candidate;
    let realized = realize(ispec, icert, w)?;
    // A candidate whose realized set fails its own certificate — including
    // by smuggling points outside the window — forfeits instead of playing.
    match check_certificate(ispec, &realized, icert, w) {
        Ok(true) => {}
        Ok(false) | Err(IdealError::WindowMismatch(_)) => {
            return Err(IdealError::InvalidCandidate);
        }
        Err(other) => return Err(other),
    }
    for (index, member) in family.iter().enumerate() {
        let residual = set_difference(member, &realized);
        if !check_certificate(jspec, &residual, jbudget, w)? {
            return Ok(GameOutcome::Defeated { index, residual });
        }
    }
    Ok(GameOutcome::AllCovered)
}

/// True iff `a` checks into I and `w ∖ a` checks into J: the two ideals
/// split the window between them.
pub fn orthogonality_check(
    ispec: &IdealSpec,
    icert: &Certificate,
    jspec: &IdealSpec,
    jcert: &Certificate,
    a: &PointSet,
    w: Window,
) -> Result<bool, IdealError> {
    ensure_in_window(a, w)?;
    let complement: PointSet = w.points().filter(|p| !a.contains(p)).collect();
    Ok(check_certificate(ispec, a, icert, w)? && check_certificate(jspec, &complement, jcert, w)?)
}

/// Best-effort synthesis of a membership certificate for `x` within
/// `budgets`; `None` means `x` does not look I-small at this scale.
pub fn synthesize_certificate(
    spec: &IdealSpec,
    x: &PointSet,
    w: Window,
    budgets: &Budgets,
) -> Result<Option<Certificate>, IdealError> {
    ensure_in_window(x, w)?;
    let coloring = build_coloring(&spec.partition, w)?;
    let counts = block_counts(&coloring, x);
    let cert = match spec.kind {
        IdealKind::FinGen => {
            if counts.len() <= budgets.max_colors {
                Some(Certificate::from_colors(counts.into_keys()))
            } else {
                // Keep the largest blocks, spill the rest into the delta.
                let mut by_size: Vec<(ColorId, u64)> = counts.into_iter().collect();
                by_size.sort_by_key(|&(c, n)| (std::cmp::Reverse(n), c));
                let kept: BTreeSet<ColorId> = by_size
                    .iter()
                    .take(budgets.max_colors)
                    .map(|&(c, _)| c)
                    .collect();
                let delta: PointSet = x
                    .iter()
                    .filter(|&&p| !kept.contains(&coloring.color(p)))
                    .copied()
                    .collect();
                (delta.len() <= budgets.max_delta).then(|| {
                    Certificate::from_colors(kept.iter().copied()).with_delta(delta)
                })
            }
        }
        IdealKind::Sel => {
            let width = counts.values().copied().max().unwrap_or(0);
            (width <= budgets.max_width).then(|| Certificate::from_width(width))
        }
        IdealKind::Ed => (0..=budgets.max_width).find_map(|width| {
            let exceptional: BTreeSet<ColorId> = counts
                .iter()
                .filter(|&(_, &n)| n > width)
                .map(|(&c, _)| c)
                .collect();
            (exceptional.len() <= budgets.max_colors).then(|| Certificate {
                colors: exceptional,
                width,
                ..Default::default()
            })
        }),
        IdealKind::OFin => counts
            .values()
            .all(|&n| n <= budgets.max_width)
            .then(|| Certificate {
                per_block: counts.clone(),
                ..Default::default()
            }),
        IdealKind::FinFin => {
            let whole: BTreeSet<ColorId> = counts
                .iter()
                .filter(|&(_, &n)| n > budgets.max_width)
                .map(|(&c, _)| c)
                .collect();
            (whole.len() <= budgets.max_colors).then(|| Certificate {
                per_block: counts
                    .iter()
                    .filter(|(c, _)| !whole.contains(c))
                    .map(|(&c, &n)| (c, n))
                    .collect(),
                colors: whole,
                ..Default::default()
            })
        }
    };
    Ok(cert)
}

/// Outcome of the almost-subideal probe; the criteria layer wraps this into
/// a full verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum SubidealOutcome {
    /// `probes[index]` is I-small but its trace on the dual set overflows
    /// the J-budget.
    Refuted { index: usize, trace: PointSet },
    Consistent,
}

/// Tests `I restricted to e ⊆ J` at window scale: `e` is a dual-filter set
/// (its complement must be I-small within `budgets`), and each I-small probe
/// must leave a J-small trace on `e`.
pub fn almost_subideal_check(
    ispec: &IdealSpec,
    jspec: &IdealSpec,
    e: &PointSet,
    probes: &[PointSet],
    jbudget: &Certificate,
    w: Window,
    budgets: &Budgets,
) -> Result<SubidealOutcome, IdealError> {
    ensure_in_window(e, w)?;
    let complement: PointSet = w.points().filter(|p| !e.contains(p)).collect();
    if synthesize_certificate(ispec, &complement, w, budgets)?.is_none() {
        return Err(IdealError::InvalidDualWitness);
    }
    for (index, probe) in probes.iter().enumerate() {
        if synthesize_certificate(ispec, probe, w, budgets)?.is_none() {
            continue;
        }
        let trace = set_intersection(probe, e);
        if !check_certificate(jspec, &trace, jbudget, w)? {
            return Ok(SubidealOutcome::Refuted { index, trace });
        }
    }
    Ok(SubidealOutcome::Consistent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::DFamily;
    use proptest::prelude::*;

    fn vertical(kind: IdealKind) -> IdealSpec {
        IdealSpec::new(kind, PartitionSpec::Vertical)
    }

    fn column(n: u64, rows: u64) -> PointSet {
        (0..rows).map(|y| Point::new(n, y)).collect()
    }

    fn row(n: u64, cols: u64) -> PointSet {
        (0..cols).map(|x| Point::new(x, n)).collect()
    }

    fn blk(n: u64) -> ColorId {
        ColorId::Block { n }
    }

    #[test]
    fn fin_gen_certificate_checks_with_delta() {
        let w = Window::new(8, 8);
        let mut x = column(0, 8);
        x.extend(column(3, 8));
        x.insert(Point::new(5, 5));
        let spec = vertical(IdealKind::FinGen);
        let cert = Certificate::from_colors([blk(0), blk(3)])
            .with_delta([Point::new(5, 5)].into_iter().collect());
        assert!(check_certificate(&spec, &x, &cert, w).unwrap());
        let bare = Certificate::from_colors([blk(0), blk(3)]);
        assert!(!check_certificate(&spec, &x, &bare, w).unwrap());
    }

    #[test]
    fn sel_certificate_bounds_every_block() {
        let w = Window::new(6, 6);
        let diag: PointSet = (0..6).map(|n| Point::new(n, n)).collect();
        let spec = vertical(IdealKind::Sel);
        assert!(check_certificate(&spec, &diag, &Certificate::from_width(1), w).unwrap());
        assert!(!check_certificate(&spec, &diag, &Certificate::from_width(0), w).unwrap());
    }

    #[test]
    fn ed_certificate_exempts_exceptional_blocks() {
        let w = Window::new(6, 6);
        let mut x = column(0, 6);
        x.extend((0..6).map(|n| Point::new(n, n)));
        let spec = vertical(IdealKind::Ed);
        let cert = Certificate {
            colors: [blk(0)].into_iter().collect(),
            width: 1,
            ..Default::default()
        };
        assert!(check_certificate(&spec, &x, &cert, w).unwrap());
        let narrow = Certificate::from_width(1);
        assert!(!check_certificate(&spec, &x, &narrow, w).unwrap());
    }

    #[test]
    fn ofin_missing_block_bound_means_zero() {
        let w = Window::new(4, 4);
        let x: PointSet = [Point::new(0, 0), Point::new(1, 0)].into_iter().collect();
        let spec = vertical(IdealKind::OFin);
        let partial = Certificate::uniform_per_block([blk(0)], 1);
        assert!(!check_certificate(&spec, &x, &partial, w).unwrap());
        let full = Certificate::uniform_per_block([blk(0), blk(1)], 1);
        assert!(check_certificate(&spec, &x, &full, w).unwrap());
    }

    #[test]
    fn fin_fin_splits_whole_blocks_from_bounded_rest() {
        let w = Window::new(6, 6);
        let mut x = column(2, 6);
        x.extend((0..6).map(|n| Point::new(n, 0)));
        let spec = vertical(IdealKind::FinFin);
        let cert = Certificate {
            colors: [blk(2)].into_iter().collect(),
            per_block: (0..6).map(|n| (blk(n), 1)).collect(),
            ..Default::default()
        };
        assert!(check_certificate(&spec, &x, &cert, w).unwrap());
    }

    #[test]
    fn window_mismatch_reports_offending_point() {
        let w = Window::new(8, 8);
        let x: PointSet = [Point::new(9, 0)].into_iter().collect();
        let err = check_certificate(&vertical(IdealKind::Sel), &x, &Certificate::from_width(5), w)
            .unwrap_err();
        assert_eq!(err, IdealError::WindowMismatch(Point::new(9, 0)));
    }

    #[test]
    fn minimal_width_counts_largest_fiber() {
        let w = Window::new(8, 8);
        let mut x = row(0, 8);
        x.extend(row(1, 8));
        x.extend(row(2, 8));
        assert_eq!(minimal_width(&PartitionSpec::Vertical, &x, w).unwrap(), 3);
        assert_eq!(minimal_width(&PartitionSpec::Rows, &x, w).unwrap(), 8);
        assert_eq!(
            minimal_width(&PartitionSpec::Vertical, &PointSet::new(), w).unwrap(),
            0
        );
    }

    #[test]
    fn game_defeats_candidate_on_first_uncovered_vertical() {
        let w = Window::new(8, 8);
        let family: Vec<PointSet> = (0..8).map(|n| column(n, 8)).collect();
        let delta: PointSet = [Point::new(6, 0), Point::new(7, 0)].into_iter().collect();
        let cand_spec = vertical(IdealKind::FinGen);
        let cand = Certificate::from_colors((0..6).map(blk)).with_delta(delta);
        let jspec = vertical(IdealKind::OFin);
        let jbudget = Certificate::uniform_per_block((0..8).map(blk), 1);
        match game_round(&family, (&cand_spec, &cand), &jspec, &jbudget, w).unwrap() {
            GameOutcome::Defeated { index, residual } => {
                assert_eq!(index, 6);
                // V_6 minus the one delta point.
                assert_eq!(residual.len(), 7);
                assert!(residual.iter().all(|p| p.x == 6));
            }
            other => panic!("expected defeat, got {other:?}"),
        }
    }

    #[test]
    fn game_accepts_exact_cover() {
        let w = Window::new(8, 8);
        let family: Vec<PointSet> = (0..8).map(|n| row(n, 8)).collect();
        let whole: PointSet = w.points().collect();
        let cand_spec = vertical(IdealKind::Sel);
        let cand = Certificate::from_width(8).with_delta(whole);
        let jspec = vertical(IdealKind::FinGen);
        let outcome =
            game_round(&family, (&cand_spec, &cand), &jspec, &Certificate::default(), w).unwrap();
        assert_eq!(outcome, GameOutcome::AllCovered);
    }

    #[test]
    fn game_rejects_invalid_candidate() {
        let w = Window::new(4, 4);
        let family = vec![column(0, 4)];
        let cand_spec = vertical(IdealKind::Sel);
        // The delta reaches outside the window, so the realized set cannot
        // verify and the candidate forfeits.
        let cand = Certificate {
            width: 1,
            delta: [Point::new(100, 100)].into_iter().collect(),
            ..Default::default()
        };
        let err = game_round(&family, (&cand_spec, &cand), &cand_spec, &cand, w).unwrap_err();
        assert_eq!(err, IdealError::InvalidCandidate);
    }

    #[test]
    fn orthogonality_splits_window() {
        let w = Window::new(8, 8);
        let a: PointSet = (0..4).flat_map(|n| column(n, 8)).collect();
        let ispec = vertical(IdealKind::FinGen);
        let icert = Certificate::from_colors((0..4).map(blk));
        let jcert = Certificate::from_colors((4..8).map(blk));
        assert!(orthogonality_check(&ispec, &icert, &ispec, &jcert, &a, w).unwrap());
        let too_small = Certificate::from_colors((4..7).map(blk));
        assert!(!orthogonality_check(&ispec, &icert, &ispec, &too_small, &a, w).unwrap());
    }

    #[test]
    fn synthesize_matches_kind_semantics() {
        let w = Window::new(8, 8);
        let budgets = Budgets::default();
        let diag: PointSet = (0..8).map(|n| Point::new(n, n)).collect();
        let sel = synthesize_certificate(&vertical(IdealKind::Sel), &diag, w, &budgets)
            .unwrap()
            .unwrap();
        assert_eq!(sel.width, 1);

        let mut x = column(0, 8);
        x.extend(diag.clone());
        let ed = synthesize_certificate(&vertical(IdealKind::Ed), &x, w, &budgets)
            .unwrap()
            .unwrap();
        assert!(ed.colors.contains(&blk(0)));
        assert!(check_certificate(&vertical(IdealKind::Ed), &x, &ed, w).unwrap());

        // Eight full columns still synthesize: the six largest blocks are
        // kept and the remaining 16 points spill into the delta.
        let wide: PointSet = (0..8).flat_map(|n| column(n, 8)).collect();
        let spilled = synthesize_certificate(&vertical(IdealKind::FinGen), &wide, w, &budgets)
            .unwrap()
            .unwrap();
        assert_eq!(spilled.colors.len(), budgets.max_colors);
        assert_eq!(spilled.delta.len(), 16);
        assert!(check_certificate(&vertical(IdealKind::FinGen), &wide, &spilled, w).unwrap());

        // Nine full columns overflow: three spilled columns exceed the
        // delta budget of 20 points.
        let wider_window = Window::new(9, 8);
        let wider: PointSet = (0..9).flat_map(|n| column(n, 8)).collect();
        assert!(synthesize_certificate(
            &vertical(IdealKind::FinGen),
            &wider,
            wider_window,
            &budgets
        )
        .unwrap()
        .is_none());
    }

    #[test]
    fn almost_subideal_refutes_vertical_probe_against_row_ideal() {
        let w = Window::new(8, 8);
        let e: PointSet = w.points().collect();
        let ispec = IdealSpec::new(IdealKind::Ed, PartitionSpec::Vertical);
        let jspec = IdealSpec::new(IdealKind::FinGen, PartitionSpec::Rows);
        let jbudget = Certificate::from_colors([blk(0)]);
        let probe = column(2, 8);
        match almost_subideal_check(
            &ispec,
            &jspec,
            &e,
            std::slice::from_ref(&probe),
            &jbudget,
            w,
            &Budgets::default(),
        )
        .unwrap()
        {
            SubidealOutcome::Refuted { index, trace } => {
                assert_eq!(index, 0);
                assert_eq!(trace, probe);
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn almost_subideal_requires_dual_witness() {
        let w = Window::new(8, 8);
        // e = one column only: its complement is 7 full columns, far from
        // Sel-small.
        let e = column(0, 8);
        let ispec = vertical(IdealKind::Sel);
        let err = almost_subideal_check(
            &ispec,
            &ispec,
            &e,
            &[],
            &Certificate::from_width(4),
            w,
            &Budgets::default(),
        )
        .unwrap_err();
        assert_eq!(err, IdealError::InvalidDualWitness);
    }

    #[test]
    fn almost_subideal_consistent_for_inclusion() {
        let w = Window::new(8, 8);
        let e: PointSet = w.points().collect();
        let ispec = vertical(IdealKind::Sel);
        let jspec = vertical(IdealKind::Ed);
        let probes = vec![
            (0..8).map(|n| Point::new(n, n)).collect::<PointSet>(),
            row(3, 8),
        ];
        let outcome = almost_subideal_check(
            &ispec,
            &jspec,
            &e,
            &probes,
            &Certificate::from_width(4),
            w,
            &Budgets::default(),
        )
        .unwrap();
        assert_eq!(outcome, SubidealOutcome::Consistent);
    }

    #[test]
    fn certificate_json_shape() {
        let cert = Certificate {
            colors: [ColorId::A { j: 0, i: 1 }].into_iter().collect(),
            width: 2,
            per_block: [(blk(0), 3)].into_iter().collect(),
            delta: [Point::new(1, 1)].into_iter().collect(),
        };
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "colors": ["A:0:1"],
                "width": 2,
                "perBlock": {"blk:0": 3},
                "delta": [[1, 1]],
            })
        );
        let back: Certificate = serde_json::from_value(json).unwrap();
        assert_eq!(back, cert);
    }

    /// The staircase partition keeps E-colorings usable here too.
    #[test]
    fn check_certificate_over_staircase_partition() {
        let w = Window::new(16, 4);
        let spec = IdealSpec::new(
            IdealKind::FinGen,
            PartitionSpec::E {
                d: DFamily::CantorPairing,
            },
        );
        let coloring = build_coloring(&spec.partition, w).unwrap();
        let x = coloring.block_points_in(ColorId::A { j: 0, i: 0 }, w);
        let cert = Certificate::from_colors([ColorId::A { j: 0, i: 0 }]);
        assert!(check_certificate(&spec, &x, &cert, w).unwrap());
    }

    proptest! {
        /// Enlarging a certificate never invalidates it.
        #[test]
        fn certificate_checks_are_monotone(
            pts in proptest::collection::btree_set((0u64..12, 0u64..12), 0..40),
            extra_width in 0u64..4,
        ) {
            let w = Window::new(12, 12);
            let x: PointSet = pts.into_iter().map(|(a, b)| Point::new(a, b)).collect();
            let spec = vertical(IdealKind::Sel);
            let width = minimal_width(&PartitionSpec::Vertical, &x, w).unwrap();
            let base = Certificate::from_width(width);
            prop_assert!(check_certificate(&spec, &x, &base, w).unwrap());
            let wider = Certificate::from_width(width + extra_width);
            prop_assert!(check_certificate(&spec, &x, &wider, w).unwrap());
            if width > 0 {
                let narrower = Certificate::from_width(width - 1);
                prop_assert!(!check_certificate(&spec, &x, &narrower, w).unwrap());
            }
        }

        /// FinGen membership is closed under unions of witnesses.
        #[test]
        fn fin_gen_union_closure(
            cols_a in proptest::collection::btree_set(0u64..10, 0..5),
            cols_b in proptest::collection::btree_set(0u64..10, 0..5),
        ) {
            let w = Window::new(10, 6);
            let spec = vertical(IdealKind::FinGen);
            let xa: PointSet = cols_a.iter().flat_map(|&n| column(n, 6)).collect();
            let xb: PointSet = cols_b.iter().flat_map(|&n| column(n, 6)).collect();
            let union: PointSet = xa.union(&xb).copied().collect();
            let cert = Certificate::from_colors(
                cols_a.iter().chain(cols_b.iter()).map(|&n| blk(n)),
            );
            prop_assert!(check_certificate(&spec, &union, &cert, w).unwrap());
        }
    }
}

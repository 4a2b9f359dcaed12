//! The chain calculus over the staircase partition: block-interval chains,
//! color descent, covered-subchain extraction, and the refutation engine
//! built from them.
//!
//! A chain `Ch_i[s,t][u,v]` collects, for every color index `j ∈ [s,t]` and
//! block index `k ∈ [u,v]`, the single row-`i` point of `A(j,i)` inside
//! block `D_k` — the point `(element(k, j + k·i), i)`.  Writing
//! `l = t−s+1` and `d = v−u+1`, one descent step trades a chain at row `i`
//! for one at row `i−1` whose columns are a subset ([`descend_chain`]), and
//! one extraction step shrinks the block interval so every remaining point
//! is covered by the adversary's set `X`, or else certifies that some color
//! has more than `k_i` uncovered points ([`extract_covered`]).
//!
//! [`refute_witness`] alternates the two from an auto-sized initial chain
//! down to row 0.  Arriving at row 0 fully covered would exhibit a single
//! column carrying `|f|+1` distinct `X`-points — impossible when `X` is the
//! union of `|f|` functions — so every genuine run ends in a
//! [`CoverageWitness`]: a concrete scale at which the claimed width bounds
//! fail.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Point, PointSet, Window};
use crate::partition::{ColorId, DFamily};

/// Hard ceiling on auto-sized window columns.
pub const DEFAULT_COLUMN_LIMIT: u64 = 1 << 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("{0} is not an A-color")]
    NotAColor(ColorId),
    #[error("row 0 colors admit no further descent")]
    RowZero,
    #[error("chain with l={l} cannot descend across d={d} blocks")]
    TooShort { l: u64, d: u64 },
    #[error("{count} failures exceed the pigeonhole bound {bound}")]
    TooManyFailures { count: usize, bound: u64 },
    #[error("block range d={d} is below the ({k}+1)^{l} hypothesis")]
    HypothesisViolated { d: u64, k: u64, l: u64 },
    #[error("element {index} of D_{k} falls outside the window columns")]
    WindowTooSmall { k: u64, index: u64 },
    #[error("required window exceeds the {limit}-column limit")]
    Overflow { limit: u64 },
    #[error("no initial chain fits the column limit, even after headroom escalation")]
    WindowExhausted,
    #[error("cannot parse function spec {0:?}; expected const:C, lin:A:B or table:V,V,...")]
    BadFunctionSpec(String),
}

/// `Ch_i[s,t][u,v]` materialized inside a window: one point per
/// (color j, block k) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Chain {
    pub dfamily: DFamily,
    pub row: u64,
    pub color_lo: u64,
    pub color_hi: u64,
    pub block_lo: u64,
    pub block_hi: u64,
    pub points: PointSet,
}

impl Chain {
    /// Color-interval length `l = t−s+1`.
    pub fn l(&self) -> u64 {
        self.color_hi - self.color_lo + 1
    }

    /// Block-interval length `d = v−u+1`.
    pub fn d(&self) -> u64 {
        self.block_hi - self.block_lo + 1
    }

    fn frame(&self, stage: Stage) -> ChainFrame {
        ChainFrame {
            stage,
            row: self.row,
            color_lo: self.color_lo,
            color_hi: self.color_hi,
            block_lo: self.block_lo,
            block_hi: self.block_hi,
        }
    }
}

/// Index shift under one block-restriction step: the block-`k` trace of
/// `A(j, i+1)` sits inside `A(j+k, i)`.
pub fn down_color(c: ColorId, k: u64) -> Result<ColorId, ChainError> {
    match c {
        ColorId::A { j, i } if i >= 1 => Ok(ColorId::A { j: j + k, i: i - 1 }),
        ColorId::A { .. } => Err(ChainError::RowZero),
        other => Err(ChainError::NotAColor(other)),
    }
}

/// Builds `Ch_i[s,t][u,v]` in the window; every required element of the
/// D-family must resolve to a column below `w.cols`.
pub fn materialize_chain(
    d: DFamily,
    i: u64,
    s: u64,
    t: u64,
    u: u64,
    v: u64,
    w: Window,
) -> Result<Chain, ChainError> {
    assert!(s <= t && u <= v, "chain intervals must be nonempty");
    assert!(i < w.rows, "chain row {i} lies outside the window");
    let mut points = PointSet::new();
    for j in s..=t {
        for k in u..=v {
            let index = k
                .checked_mul(i)
                .and_then(|ki| j.checked_add(ki))
                .ok_or(ChainError::WindowTooSmall { k, index: u64::MAX })?;
            let col = d
                .element_checked(k, index)
                .filter(|&m| m < w.cols)
                .ok_or(ChainError::WindowTooSmall { k, index })?;
            points.insert(Point::new(col, i));
        }
    }
    debug_assert_eq!(points.len() as u64, (t - s + 1) * (v - u + 1));
    Ok(Chain {
        dfamily: d,
        row: i,
        color_lo: s,
        color_hi: t,
        block_lo: u,
        block_hi: v,
        points,
    })
}

/// One descent step: the chain at row `i−1` spanning colors
/// `[t+u−(L−1), t+u]` with `L = l−d+1`, over the same blocks.  Its columns
/// are a subset of the parent's, which is what lets a covered column
/// propagate downward.
pub fn descend_chain(a: &Chain, w: Window) -> Result<Chain, ChainError> {
    if a.row == 0 {
        return Err(ChainError::RowZero);
    }
    let (l, d) = (a.l(), a.d());
    if l < d {
        return Err(ChainError::TooShort { l, d });
    }
    let span = l - d + 1;
    let t_new = a.color_hi + a.block_lo;
    let s_new = t_new - (span - 1);
    let b = materialize_chain(a.dfamily, a.row - 1, s_new, t_new, a.block_lo, a.block_hi, w)
        .expect("descended chain columns are nested inside the parent's");
    debug_assert!({
        let parent: BTreeSet<u64> = a.points.iter().map(|p| p.x).collect();
        b.points.iter().all(|p| parent.contains(&p.x))
    });
    Ok(b)
}

/// Splits `[lo, hi]` into `k+1` equal blocks of size `⌊(hi−lo+1)/(k+1)⌋`
/// and returns the leftmost block containing no failure.  With at most `k`
/// failures one block must be clean; leftmost makes the choice canonical.
pub fn interval_pigeonhole(
    lo: u64,
    hi: u64,
    failures: &BTreeSet<u64>,
    k: u64,
) -> Result<(u64, u64), ChainError> {
    assert!(lo <= hi, "empty interval");
    let span = hi - lo + 1;
    assert!(span > k, "interval must hold k+1 blocks");
    let in_range = failures.range(lo..=hi).count();
    if in_range as u64 > k {
        return Err(ChainError::TooManyFailures {
            count: in_range,
            bound: k,
        });
    }
    let size = span / (k + 1);
    for b in 0..=k {
        let blo = lo + b * size;
        let bhi = blo + size - 1;
        if failures.range(blo..=bhi).next().is_none() {
            return Ok((blo, bhi));
        }
    }
    unreachable!("k+1 disjoint blocks cannot all meet a set of at most k failures")
}

/// Certified violation found during extraction: more than `k_i` points of
/// `A(colorIndex, row)` escaped the covering set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageWitness {
    pub row: u64,
    pub color_index: u64,
    pub failure_points: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extraction {
    Covered(Chain),
    Witness(CoverageWitness),
}

/// The extraction step: walks colors `s..=t`, each time shrinking the block
/// interval to a failure-free pigeonhole block, ending with a fully
/// `x`-covered subchain of size `⌊d/(k_i+1)^l⌋` — or stopping at the first
/// color with more than `k_i` uncovered points, which certifies
/// `|A(j,i) ∖ X| > k_i` at this scale.  The witness keeps the first `k_i+1`
/// failures, the minimal certified excess.
pub fn extract_covered(
    b: &Chain,
    x: impl Fn(Point) -> bool,
    k_i: u64,
    w: Window,
) -> Result<Extraction, ChainError> {
    let (l, d) = (b.l(), b.d());
    let exponent = u32::try_from(l).expect("chain length exceeds desk scale");
    if BigUint::from(d) < BigUint::from(k_i + 1).pow(exponent) {
        return Err(ChainError::HypothesisViolated { d, k: k_i, l });
    }
    let (mut lo, mut hi) = (b.block_lo, b.block_hi);
    for j in b.color_lo..=b.color_hi {
        let mut failures = BTreeSet::new();
        let mut failure_points = PointSet::new();
        for k in lo..=hi {
            let col = b
                .dfamily
                .element_checked(k, j + k * b.row)
                .expect("chain was materialized inside the window");
            let p = Point::new(col, b.row);
            if !x(p) {
                failures.insert(k);
                failure_points.insert(p);
                if failures.len() as u64 > k_i {
                    return Ok(Extraction::Witness(CoverageWitness {
                        row: b.row,
                        color_index: j,
                        failure_points,
                    }));
                }
            }
        }
        (lo, hi) = interval_pigeonhole(lo, hi, &failures, k_i)?;
    }
    let c = materialize_chain(b.dfamily, b.row, b.color_lo, b.color_hi, lo, hi, w)?;
    debug_assert!(c.points.iter().all(|&p| x(p)));
    debug_assert!(c.points.is_subset(&b.points));
    Ok(Extraction::Covered(c))
}

/// `⌊⌊a/b⌋/c⌋ = ⌊a/(b·c)⌋` — the collapse that makes the per-color
/// extraction sizes compose into a single floor.
pub fn floor_quotients_compose(a: u64, b: u64, c: u64) -> bool {
    assert!(b >= 1 && c >= 1, "divisors must be positive");
    let bc = b.checked_mul(c).expect("divisor product overflows");
    (a / b) / c == a / bc
}

/// The exact size bookkeeping of the descent: `p_0 = q_0 = 1`,
/// `q_l = q_{l−1}·(k_{l−1}+1)^{p_{l−1}}`, `p_l = q_l + p_{l−1} − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PQSequence {
    pub kvec: Vec<u64>,
    #[serde(with = "decimal_strings")]
    pub p: Vec<BigUint>,
    #[serde(with = "decimal_strings")]
    pub q: Vec<BigUint>,
}

/// Big naturals cross serialization as decimal strings, keeping reports
/// byte-stable and arbitrary-precision.
mod decimal_strings {
    use num_bigint::BigUint;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|b| b.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw: Vec<String> = Deserialize::deserialize(d)?;
        raw.iter()
            .map(|s| {
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| D::Error::custom(format!("bad decimal natural {s:?}")))
            })
            .collect()
    }
}

/// Evaluates the recurrences exactly.  A chain entering row `i` with
/// `(l, d) = (p_i, q_{i+1})` survives the row-`i` extraction at exactly
/// `(p_i, q_i)` and descends to `(p_{i−1}, q_i)`, so the top requirement for
/// bounds `kvec` is `l = p[|kvec|−1]`, `d = q[|kvec|]`.
pub fn pq_sequence(kvec: &[u64]) -> PQSequence {
    let mut p = vec![BigUint::one()];
    let mut q = vec![BigUint::one()];
    for (l, &k) in kvec.iter().enumerate() {
        let exponent = p[l]
            .to_u32()
            .expect("p-sequence exponent exceeds desk scale");
        let ql = &q[l] * BigUint::from(k + 1).pow(exponent);
        let pl = &ql + &p[l] - 1u32;
        q.push(ql);
        p.push(pl);
    }
    PQSequence {
        kvec: kvec.to_vec(),
        p,
        q,
    }
}

fn window_for(
    pq: &PQSequence,
    d: DFamily,
    headroom: u64,
    color_floor: u64,
    limit: u64,
) -> Result<Window, ChainError> {
    let level = pq.kvec.len();
    let l_top = pq.p[level.saturating_sub(1)]
        .to_u64()
        .ok_or(ChainError::Overflow { limit })?;
    let d_top = pq.q[level].to_u64().ok_or(ChainError::Overflow { limit })?;
    let i_top = level.saturating_sub(1) as u64;
    let k_max = d_top - 1;
    let r_max = k_max
        .checked_mul(i_top)
        .and_then(|ki| ki.checked_add(color_floor + l_top - 1))
        .ok_or(ChainError::Overflow { limit })?;
    let elem = d
        .element_checked(k_max, r_max)
        .ok_or(ChainError::Overflow { limit })?;
    let cols = headroom
        .checked_mul(elem + 1)
        .filter(|&c| c <= limit)
        .ok_or(ChainError::Overflow { limit })?;
    Ok(Window::new(cols, (level as u64).max(1)))
}

/// Sizes a window in which the full descent for `kvec` can start: enough
/// rows for every bound and `headroom` times the largest D-element the
/// initial chain touches.
pub fn required_window(kvec: &[u64], d: DFamily, headroom: u64) -> Result<Window, ChainError> {
    assert!(headroom >= 1, "headroom must be at least 1");
    window_for(&pq_sequence(kvec), d, headroom, 0, DEFAULT_COLUMN_LIMIT)
}

/// Closed-form total functions column → row; the adversary's covering set
/// is the union of their graphs, queried pointwise on arbitrarily wide
/// windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    /// `x ↦ value (mod rows)`.
    Const { value: u64 },
    /// `x ↦ (a·x + b) mod rows`.
    Linear { a: u64, b: u64 },
    /// `x ↦ values[x mod |values|] (mod rows)`; cycling keeps the function
    /// total however wide the auto-sized window gets.
    Table { values: Vec<u64> },
}

impl FunctionSpec {
    pub fn eval(&self, x: u64, rows: u64) -> u64 {
        debug_assert!(rows >= 1);
        match self {
            FunctionSpec::Const { value } => value % rows,
            FunctionSpec::Linear { a, b } => {
                ((*a as u128 * x as u128 + *b as u128) % rows as u128) as u64
            }
            FunctionSpec::Table { values } => {
                values[(x % values.len() as u64) as usize] % rows
            }
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Const { value } => write!(f, "const:{value}"),
            FunctionSpec::Linear { a, b } => write!(f, "lin:{a}:{b}"),
            FunctionSpec::Table { values } => {
                write!(f, "table:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ChainError::BadFunctionSpec(s.to_string());
        if let Some(rest) = s.strip_prefix("const:") {
            return Ok(FunctionSpec::Const {
                value: rest.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("lin:") {
            let (a, b) = rest.split_once(':').ok_or_else(bad)?;
            return Ok(FunctionSpec::Linear {
                a: a.parse().map_err(|_| bad())?,
                b: b.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let values: Result<Vec<u64>, _> = rest.split(',').map(str::parse).collect();
            let values = values.map_err(|_| bad())?;
            if values.is_empty() {
                return Err(bad());
            }
            return Ok(FunctionSpec::Table { values });
        }
        Err(bad())
    }
}

impl Serialize for FunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefuteMode {
    Sel,
    Ed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Initial,
    Extracted,
    Descended,
}

/// One audit line of the descent: the chain's frame without its points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainFrame {
    pub stage: Stage,
    pub row: u64,
    pub color_lo: u64,
    pub color_hi: u64,
    pub block_lo: u64,
    pub block_hi: u64,
}

/// ED-mode bookkeeping: the window-scale bad color set and the floor the
/// witness colors were required to clear.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdInfo {
    pub bad_set: Vec<u64>,
    pub color_floor: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RefutationOutcome {
    /// `|A(colorIndex, row) ∖ X| > k_row`, witnessed by the listed points.
    #[serde(rename_all = "camelCase")]
    Witness {
        row: u64,
        color_index: u64,
        uncovered_points: PointSet,
    },
    /// The descent reached row 0 fully covered: column `column` would carry
    /// one X-point per row, which |f| functions cannot produce.  Flagged as
    /// an internal inconsistency rather than a result.
    #[serde(rename_all = "camelCase")]
    ContradictionAtColumn { column: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RefutationReport {
    pub outcome: RefutationOutcome,
    pub trace: Vec<ChainFrame>,
    pub window_used: Window,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ed: Option<EdInfo>,
}

/// Window-scale bad color set `C`: colors `j` where some row already shows
/// more than `k_i` uncovered points inside the base window.
fn bad_color_set(f: &[FunctionSpec], kvec: &[u64], d: DFamily, w: Window) -> BTreeSet<u64> {
    let rows = w.rows;
    let covered = |p: Point| f.iter().any(|g| g.eval(p.x, rows) == p.y);
    let mut bad = BTreeSet::new();
    let mut j = 0;
    while d.element_checked(0, j).is_some_and(|m| m < w.cols) {
        'rows: for i in 0..rows {
            let mut misses = 0;
            let mut k: u64 = 0;
            while let Some(index) = k.checked_mul(i).map(|ki| j + ki) {
                match d.element_checked(k, index) {
                    Some(m) if m < w.cols => {
                        if !covered(Point::new(m, i)) {
                            misses += 1;
                            if misses > kvec[i as usize] {
                                bad.insert(j);
                                break 'rows;
                            }
                        }
                    }
                    _ => break,
                }
                k += 1;
            }
        }
        j += 1;
    }
    bad
}

/// Runs the full refutation for the adversary `(f, kvec)`: `X = ⋃f`, one
/// width bound per row.  Sel mode starts colors at 0; ED mode first computes
/// the window-scale bad set `C` on the base window and restarts the colors
/// above `max C` on a correspondingly wider window (with `C` kept fixed), so
/// the witness color provably clears every exception visible at base scale.
pub fn refute_witness(
    f: &[FunctionSpec],
    kvec: &[u64],
    mode: RefuteMode,
    d: DFamily,
) -> Result<RefutationReport, ChainError> {
    assert_eq!(
        kvec.len(),
        f.len() + 1,
        "kvec must supply one bound per row 0..=|f|"
    );
    let pq = pq_sequence(kvec);
    for headroom in [8, 16, 32, 64] {
        match refute_attempt(f, kvec, &pq, mode, d, headroom) {
            Err(ChainError::WindowTooSmall { .. }) => continue,
            Err(ChainError::Overflow { .. }) => return Err(ChainError::WindowExhausted),
            other => return other,
        }
    }
    Err(ChainError::WindowExhausted)
}

/// Runs one refutation inside the fixed `window` (no auto-sizing): the
/// initial chain must fit or the call fails with `WindowTooSmall`.  ED mode
/// computes its bad color set on this same window before starting above it.
pub fn refute_witness_in(
    f: &[FunctionSpec],
    kvec: &[u64],
    mode: RefuteMode,
    d: DFamily,
    window: Window,
) -> Result<RefutationReport, ChainError> {
    assert_eq!(
        kvec.len(),
        f.len() + 1,
        "kvec must supply one bound per row 0..=|f|"
    );
    if window.rows < kvec.len().max(1) as u64 {
        return Err(ChainError::WindowExhausted);
    }
    let pq = pq_sequence(kvec);
    let (color_floor, ed) = match mode {
        RefuteMode::Sel => (0, None),
        RefuteMode::Ed => {
            let bad = bad_color_set(f, kvec, d, window);
            let floor = bad.last().map_or(0, |&j| j + 1);
            let info = EdInfo {
                bad_set: bad.into_iter().collect(),
                color_floor: floor,
            };
            (floor, Some(info))
        }
    };
    run_refutation(f, kvec, &pq, d, color_floor, ed, window)
}

fn refute_attempt(
    f: &[FunctionSpec],
    kvec: &[u64],
    pq: &PQSequence,
    mode: RefuteMode,
    d: DFamily,
    headroom: u64,
) -> Result<RefutationReport, ChainError> {
    let base = window_for(pq, d, headroom, 0, DEFAULT_COLUMN_LIMIT)?;
    let (color_floor, ed, window) = match mode {
        RefuteMode::Sel => (0, None, base),
        RefuteMode::Ed => {
            let bad = bad_color_set(f, kvec, d, base);
            let floor = bad.last().map_or(0, |&j| j + 1);
            let window = window_for(pq, d, headroom, floor, DEFAULT_COLUMN_LIMIT)?;
            let info = EdInfo {
                bad_set: bad.into_iter().collect(),
                color_floor: floor,
            };
            (floor, Some(info), window)
        }
    };
    run_refutation(f, kvec, pq, d, color_floor, ed, window)
}

fn run_refutation(
    f: &[FunctionSpec],
    kvec: &[u64],
    pq: &PQSequence,
    d: DFamily,
    color_floor: u64,
    ed: Option<EdInfo>,
    window: Window,
) -> Result<RefutationReport, ChainError> {
    let rows = window.rows;
    let covered = |p: Point| f.iter().any(|g| g.eval(p.x, rows) == p.y);

    let level = (kvec.len() - 1) as u64;
    let limit = DEFAULT_COLUMN_LIMIT;
    let l_top = pq.p[level as usize]
        .to_u64()
        .ok_or(ChainError::Overflow { limit })?;
    let d_top = pq.q[kvec.len()]
        .to_u64()
        .ok_or(ChainError::Overflow { limit })?;
    let mut chain = materialize_chain(
        d,
        level,
        color_floor,
        color_floor + l_top - 1,
        0,
        d_top - 1,
        window,
    )?;
    let mut trace = vec![chain.frame(Stage::Initial)];
    loop {
        match extract_covered(&chain, covered, kvec[chain.row as usize], window)? {
            Extraction::Witness(cw) => {
                return Ok(RefutationReport {
                    outcome: RefutationOutcome::Witness {
                        row: cw.row,
                        color_index: cw.color_index,
                        uncovered_points: cw.failure_points,
                    },
                    trace,
                    window_used: window,
                    ed,
                });
            }
            Extraction::Covered(c) => {
                chain = c;
                trace.push(chain.frame(Stage::Extracted));
            }
        }
        if chain.row == 0 {
            let column = chain
                .points
                .iter()
                .next()
                .expect("covered chain is nonempty")
                .x;
            return Ok(RefutationReport {
                outcome: RefutationOutcome::ContradictionAtColumn { column },
                trace,
                window_used: window,
                ed,
            });
        }
        chain = descend_chain(&chain, window)?;
        trace.push(chain.frame(Stage::Descended));
    }
}

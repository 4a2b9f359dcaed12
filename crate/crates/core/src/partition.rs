//! Block families on ω∖{0}, partitions of the grid, and coloring oracles.
//!
//! A [`DFamily`] splits the positive naturals into infinitely many infinite
//! blocks `D_k` with a closed-form enumeration: `element(k, r)` is the r-th
//! element of `D_k` (0-indexed) and `decompose(m)` inverts it.
//!
//! The staircase partition built on top of a `DFamily` colors a grid point
//! `(m, i)` with `m ≥ 1` by decomposing `m = element(k, r)` and solving
//! `r = j + k·i`: when `j ≥ 0` the point belongs to the block `A(j, i)`,
//! which lives entirely in row `i` and meets each `D_k × {i}` in exactly one
//! point.  Points with `j < 0` are leftovers; together with column 0 they are
//! distributed into the blocks `B(t)`: the t-th leftover point in the
//! canonical order (sorted by `max(x, y)`, ties lexicographic) lands in
//! `B(t)`, and a column-0 point `(0, y)` lands in `B(first)` where `first`
//! is the first coordinate of the Cantor un-pairing of `y`.  Every `B(t)`
//! thus holds infinitely many column-0 points and exactly one point off
//! column 0.
//!
//! Colorings are lazy oracles: block membership is computed per point, never
//! materialized as a grid, so columns far beyond any practical window stay
//! addressable.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::de::{Deserializer, Error as DeError};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Point, PointSet, Window};

/// Marker for columns whose `D`-block index is 0 (they never shed leftovers).
const NO_LEFTOVER: u64 = u64::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("color {color} does not occur in partition {spec}")]
    UnknownColor { spec: String, color: ColorId },
    #[error("partition axiom violated at {point}: covered by {colors:?}")]
    PartitionAxiomViolation { point: Point, colors: Vec<ColorId> },
}

/// Closed-form partitions of ω∖{0} into infinitely many infinite blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DFamily {
    /// `element(k, r) = (k+r)(k+r+1)/2 + r + 1` (shifted Cantor pairing).
    #[serde(rename = "cantor")]
    CantorPairing,
    /// `element(k, r) = 2^k · (2r + 1)`.
    Dyadic,
}

/// Exact floor square root.
fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

impl DFamily {
    /// The r-th element of block `D_k`, or `None` on u64 overflow.
    pub fn element_checked(self, k: u64, r: u64) -> Option<u64> {
        match self {
            DFamily::CantorPairing => {
                let s = (k as u128).checked_add(r as u128)?;
                let tri = s.checked_mul(s + 1)? / 2;
                let v = tri.checked_add(r as u128)?.checked_add(1)?;
                u64::try_from(v).ok()
            }
            DFamily::Dyadic => {
                if k >= 64 {
                    return None;
                }
                let odd = (r as u128).checked_mul(2)?.checked_add(1)?;
                let v = odd.checked_mul(1u128 << k)?;
                u64::try_from(v).ok()
            }
        }
    }

    /// The r-th element of block `D_k`; panics on overflow.
    pub fn element(self, k: u64, r: u64) -> u64 {
        self.element_checked(k, r)
            .expect("D-family element overflows u64")
    }

    /// Inverts [`DFamily::element`]: returns `(k, r)` with `element(k, r) = m`.
    /// Requires `m ≥ 1`.
    pub fn decompose(self, m: u64) -> (u64, u64) {
        assert!(m >= 1, "0 is not covered by any D block");
        match self {
            DFamily::CantorPairing => {
                let n = (m - 1) as u128;
                let mut w = (isqrt(8 * n + 1) - 1) / 2;
                if w * (w + 1) / 2 > n {
                    w -= 1;
                }
                let r = n - w * (w + 1) / 2;
                ((w - r) as u64, r as u64)
            }
            DFamily::Dyadic => {
                let k = m.trailing_zeros() as u64;
                let r = ((m >> k) - 1) / 2;
                (k, r)
            }
        }
    }
}

/// Name of one block of a partition.
///
/// Sorts `A < B < blk`, with index order inside each kind; this is the
/// canonical color order used by searches and reports.  Serializes as the
/// strings `"A:j:i"`, `"B:i"`, `"blk:n"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColorId {
    /// Staircase block `A(j, i)`; lives entirely in row `i`.
    A { j: u64, i: u64 },
    /// Staircase block `B(t)`: column-0 points plus the t-th leftover.
    B { i: u64 },
    /// The n-th block of a generic one-parameter partition.
    Block { n: u64 },
}

impl std::fmt::Display for ColorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColorId::A { j, i } => write!(f, "A:{j}:{i}"),
            ColorId::B { i } => write!(f, "B:{i}"),
            ColorId::Block { n } => write!(f, "blk:{n}"),
        }
    }
}

impl FromStr for ColorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| format!("bad color index {t:?} in {s:?}"))
        };
        match parts.as_slice() {
            ["A", j, i] => Ok(ColorId::A {
                j: num(j)?,
                i: num(i)?,
            }),
            ["B", i] => Ok(ColorId::B { i: num(i)? }),
            ["blk", n] => Ok(ColorId::Block { n: num(n)? }),
            _ => Err(format!("unrecognized color {s:?}")),
        }
    }
}

impl Serialize for ColorId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ColorId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Classification of a grid point by the staircase rule, before leftover and
/// column-0 points are assigned their `B` indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EPointClass {
    A { j: u64, i: u64 },
    /// `m ≥ 1` but the staircase index `j = r − k·i` would be negative.
    Leftover,
    /// Column 0 is reserved for the `B` blocks.
    ColumnZero,
}

/// Pure staircase classification of `p` under the family `d`.  Independent
/// of any window; `B` indices for `Leftover`/`ColumnZero` points are resolved
/// by the [`Coloring`] oracle.
pub fn e_class(d: DFamily, p: Point) -> EPointClass {
    if p.x == 0 {
        return EPointClass::ColumnZero;
    }
    let (k, r) = d.decompose(p.x);
    match k.checked_mul(p.y) {
        Some(ki) if ki <= r => EPointClass::A { j: r - ki, i: p.y },
        _ => EPointClass::Leftover,
    }
}

/// Declarative description of a partition of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PartitionSpec {
    /// Blocks `blk:n` are the columns `{n} × ω`.
    Vertical,
    /// Blocks `blk:n` are the rows `ω × {n}`.
    Rows,
    /// The staircase partition over the given block family.
    #[serde(rename = "E")]
    E { d: DFamily },
    /// Explicit cell list for window-scale custom partitions.
    Table { cells: Vec<(u64, u64, ColorId)> },
}

impl std::fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PartitionSpec::Vertical => write!(f, "vertical"),
            PartitionSpec::Rows => write!(f, "rows"),
            PartitionSpec::E {
                d: DFamily::CantorPairing,
            } => write!(f, "E:cantor"),
            PartitionSpec::E { d: DFamily::Dyadic } => write!(f, "E:dyadic"),
            PartitionSpec::Table { cells } => write!(f, "table({} cells)", cells.len()),
        }
    }
}

/// Ranks of leftover points in the canonical enumeration, with a cache of
/// per-column first leftover rows and per-shell cumulative counts.
#[derive(Debug, Default)]
struct LeftoverIndex {
    /// `imin[m]` is the least row in which column `m` has a leftover point,
    /// or [`NO_LEFTOVER`] when it has none; entry 0 is a placeholder.
    imin: Vec<u64>,
    /// `shell_cum[s]` is the number of leftover points with `max(x, y) <= s`,
    /// so rank queries can bisect straight to their shell.
    shell_cum: Vec<u64>,
}

impl LeftoverIndex {
    fn ensure(&mut self, d: DFamily, upto: u64) {
        if self.imin.is_empty() {
            self.imin.push(NO_LEFTOVER);
            self.shell_cum.push(0);
        }
        while (self.imin.len() as u64) <= upto {
            let m = self.imin.len() as u64;
            let (k, r) = d.decompose(m);
            self.imin.push(match r.checked_div(k) {
                Some(q) => q + 1,
                None => NO_LEFTOVER,
            });
            // Shell m holds (col, m) for every earlier column already in its
            // leftover range, then column m's own rows imin[m] ..= m.
            let across = (1..m).filter(|&c| self.imin[c as usize] <= m).count() as u64;
            let own = match self.imin[m as usize] {
                im if im <= m => m - im + 1,
                _ => 0,
            };
            self.shell_cum.push(self.shell_cum[m as usize - 1] + across + own);
        }
    }

    /// Number of leftover points strictly before `(m, i)` in the canonical
    /// order: sorted by `max(x, y)`, ties lexicographic by `(x, y)`.
    fn rank(&mut self, d: DFamily, m: u64, i: u64) -> u64 {
        let shell = m.max(i);
        debug_assert!(shell >= 1, "(0,0) is never a leftover point");
        self.ensure(d, shell);
        // Complete shells below max(m, i).
        let mut count = self.shell_cum[shell as usize - 1];
        // Within the shell, the points (m', shell) with m' < m come first.
        for col in 1..m.min(shell) {
            if self.imin[col as usize] <= shell {
                count += 1;
            }
        }
        // Then (m, i') for i' below i, when m itself is the shell column.
        if m == shell {
            let im = self.imin[m as usize];
            if im < i {
                count += i - im;
            }
        }
        count
    }

    /// The leftover point of rank `t`, looking at shells up to `cap` only.
    fn with_rank(&mut self, d: DFamily, t: u64, cap: u64) -> Option<Point> {
        self.ensure(d, cap);
        // The cache may extend past `cap`; the slice keeps the original
        // contract of never answering from beyond the requested shells.
        let cum = &self.shell_cum[..=cap as usize];
        if *cum.last().expect("cache is never empty") <= t {
            return None;
        }
        let shell = cum.partition_point(|&c| c <= t) as u64;
        let mut seen = self.shell_cum[shell as usize - 1];
        for col in 1..shell {
            if self.imin[col as usize] <= shell {
                if seen == t {
                    return Some(Point::new(col, shell));
                }
                seen += 1;
            }
        }
        let im = self.imin[shell as usize];
        debug_assert!(im <= shell, "the cumulative count placed rank {t} on shell {shell}");
        Some(Point::new(shell, im + (t - seen)))
    }
}

#[derive(Debug, Clone)]
enum Oracle {
    Vertical,
    Rows,
    E {
        d: DFamily,
        leftovers: Arc<Mutex<LeftoverIndex>>,
    },
    Table {
        map: Arc<BTreeMap<Point, ColorId>>,
    },
}

/// A pure point-to-block oracle for one partition.
///
/// Cloning shares the internal caches; query results never depend on query
/// order or on any window, so a `Coloring` can be used freely across
/// threads and windows.
#[derive(Debug, Clone)]
pub struct Coloring {
    spec: PartitionSpec,
    oracle: Oracle,
}

/// Builds the coloring for `spec` and validates the partition axiom on `w`:
/// every window point must be covered by exactly one block.  The generator
/// specs satisfy this by construction; `Table` specs are checked cell by
/// cell and the lexicographically least violation is reported.
pub fn build_coloring(spec: &PartitionSpec, w: Window) -> Result<Coloring, PartitionError> {
    let oracle = match spec {
        PartitionSpec::Vertical => Oracle::Vertical,
        PartitionSpec::Rows => Oracle::Rows,
        PartitionSpec::E { d } => Oracle::E {
            d: *d,
            leftovers: Arc::new(Mutex::new(LeftoverIndex::default())),
        },
        PartitionSpec::Table { cells } => {
            let mut map: BTreeMap<Point, Vec<ColorId>> = BTreeMap::new();
            for &(x, y, c) in cells {
                map.entry(Point::new(x, y)).or_default().push(c);
            }
            for p in w.points() {
                let colors = map.get(&p).cloned().unwrap_or_default();
                if colors.len() != 1 {
                    return Err(PartitionError::PartitionAxiomViolation { point: p, colors });
                }
            }
            Oracle::Table {
                map: Arc::new(map.into_iter().map(|(p, mut v)| (p, v.pop().unwrap())).collect()),
            }
        }
    };
    Ok(Coloring {
        spec: spec.clone(),
        oracle,
    })
}

impl Coloring {
    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    /// The block containing `p`.  Total for the generator specs; panics for
    /// `Table` specs queried outside the tabulated cells.
    pub fn color(&self, p: Point) -> ColorId {
        match &self.oracle {
            Oracle::Vertical => ColorId::Block { n: p.x },
            Oracle::Rows => ColorId::Block { n: p.y },
            Oracle::E { d, leftovers } => match e_class(*d, p) {
                EPointClass::A { j, i } => ColorId::A { j, i },
                EPointClass::ColumnZero => ColorId::B {
                    i: DFamily::CantorPairing.decompose(p.y + 1).0,
                },
                EPointClass::Leftover => ColorId::B {
                    i: leftovers.lock().unwrap().rank(*d, p.x, p.y),
                },
            },
            Oracle::Table { map } => *map
                .get(&p)
                .unwrap_or_else(|| panic!("table coloring queried outside its cells: {p}")),
        }
    }

    /// Whether `c` names a block of this partition at all.
    pub fn knows_color(&self, c: ColorId) -> bool {
        match (&self.oracle, c) {
            (Oracle::Vertical | Oracle::Rows, ColorId::Block { .. }) => true,
            (Oracle::E { .. }, ColorId::A { .. } | ColorId::B { .. }) => true,
            (Oracle::Table { map }, c) => map.values().any(|&v| v == c),
            _ => false,
        }
    }

    /// The distinct block names meeting `w`, in canonical color order.
    pub fn window_colors(&self, w: Window) -> Vec<ColorId> {
        let set: BTreeSet<ColorId> = w.points().map(|p| self.color(p)).collect();
        set.into_iter().collect()
    }

    /// The in-window part of block `c`.  Closed-form where possible, a
    /// window scan otherwise.
    pub fn block_points_in(&self, c: ColorId, w: Window) -> PointSet {
        match (&self.oracle, c) {
            (Oracle::Vertical, ColorId::Block { n }) => {
                if n < w.cols {
                    (0..w.rows).map(|y| Point::new(n, y)).collect()
                } else {
                    PointSet::new()
                }
            }
            (Oracle::Rows, ColorId::Block { n }) => {
                if n < w.rows {
                    (0..w.cols).map(|x| Point::new(x, n)).collect()
                } else {
                    PointSet::new()
                }
            }
            (Oracle::E { d, .. }, ColorId::A { j, i }) => {
                let mut out = PointSet::new();
                if i < w.rows {
                    for k in 0u64.. {
                        let Some(r) = k.checked_mul(i).and_then(|ki| ki.checked_add(j)) else {
                            break;
                        };
                        match d.element_checked(k, r) {
                            Some(m) if m < w.cols => {
                                out.insert(Point::new(m, i));
                            }
                            _ => break,
                        }
                    }
                }
                out
            }
            (Oracle::E { d, leftovers }, ColorId::B { i: t }) => {
                let mut out = PointSet::new();
                for y in 0..w.rows {
                    if DFamily::CantorPairing.decompose(y + 1).0 == t {
                        out.insert(Point::new(0, y));
                    }
                }
                let cap = w.cols.max(w.rows);
                if let Some(p) = leftovers.lock().unwrap().with_rank(*d, t, cap) {
                    if w.contains(p) {
                        out.insert(p);
                    }
                }
                out
            }
            (Oracle::Table { map }, c) => map
                .iter()
                .filter(|&(p, &v)| v == c && w.contains(*p))
                .map(|(p, _)| *p)
                .collect(),
            _ => PointSet::new(),
        }
    }
}

/// `Finite(n)` is an exact or window count; `Infinite` is the distinguished
/// ω marker, only ever produced by a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountValue {
    Finite(u64),
    Infinite,
}

impl CountValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, CountValue::Infinite)
    }

    /// Whether the count is known to be below `k` (ω never is).
    pub fn below(self, k: u64) -> bool {
        match self {
            CountValue::Finite(n) => n < k,
            CountValue::Infinite => false,
        }
    }
}

impl std::fmt::Display for CountValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountValue::Finite(n) => write!(f, "{n}"),
            CountValue::Infinite => write!(f, "omega"),
        }
    }
}

impl Serialize for CountValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CountValue::Finite(n) => s.serialize_u64(*n),
            CountValue::Infinite => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for CountValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(n) => Ok(CountValue::Finite(n)),
            Repr::S(s) if s == "omega" => Ok(CountValue::Infinite),
            Repr::S(s) => Err(D::Error::custom(format!("bad count {s:?}"))),
        }
    }
}

/// How a [`CountReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Exactness {
    /// Closed-form count of the two infinite blocks.
    Exact,
    /// Count of the intersection restricted to the window; a lower bound
    /// for the infinite statement.
    WindowLowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub count: CountValue,
    pub exact: Exactness,
}

/// `|block_i of a ∩ block_j of b|`.
///
/// Exact answers are produced only for the closed-form pairs
/// vertical×rows, vertical×vertical, staircase-A×vertical and
/// staircase-A×rows (in either argument order); everything else is counted
/// inside `w` and flagged [`Exactness::WindowLowerBound`].
pub fn intersection_count(
    a: &PartitionSpec,
    i: ColorId,
    b: &PartitionSpec,
    j: ColorId,
    w: Window,
) -> Result<CountReport, PartitionError> {
    let ca = build_coloring(a, w)?;
    let cb = build_coloring(b, w)?;
    for (side, color) in [(&ca, i), (&cb, j)] {
        if !side.knows_color(color) {
            return Err(PartitionError::UnknownColor {
                spec: side.spec().to_string(),
                color,
            });
        }
    }

    let exact = |n: CountValue| CountReport {
        count: n,
        exact: Exactness::Exact,
    };
    let closed = |spec: &PartitionSpec, c: ColorId, other: &PartitionSpec, oc: ColorId| {
        match (spec, c, other, oc) {
            (PartitionSpec::Vertical, ColorId::Block { n }, PartitionSpec::Rows, _) => {
                let _ = n;
                Some(exact(CountValue::Finite(1)))
            }
            (
                PartitionSpec::Vertical,
                ColorId::Block { n },
                PartitionSpec::Vertical,
                ColorId::Block { n: m },
            ) => Some(exact(if n == m {
                CountValue::Infinite
            } else {
                CountValue::Finite(0)
            })),
            (PartitionSpec::E { d }, ColorId::A { j, i }, PartitionSpec::Vertical, ColorId::Block { n }) => {
                let hit = n >= 1 && {
                    let (k, r) = d.decompose(n);
                    k.checked_mul(i).is_some_and(|ki| r >= ki && r - ki == j)
                };
                Some(exact(CountValue::Finite(u64::from(hit))))
            }
            (PartitionSpec::E { .. }, ColorId::A { i, .. }, PartitionSpec::Rows, ColorId::Block { n }) => {
                Some(exact(if i == n {
                    CountValue::Infinite
                } else {
                    CountValue::Finite(0)
                }))
            }
            _ => None,
        }
    };

    if let Some(r) = closed(a, i, b, j) {
        return Ok(r);
    }
    if let Some(r) = closed(b, j, a, i) {
        return Ok(r);
    }

    let n = w
        .points()
        .filter(|&p| ca.color(p) == i && cb.color(p) == j)
        .count() as u64;
    Ok(CountReport {
        count: CountValue::Finite(n),
        exact: Exactness::WindowLowerBound,
    })
}

//! Points, windows, point sets and partial functions on the grid.
//!
//! A [`Point`] is a pair `(x, y)`: `x` is the column, `y` the row.  All
//! serialized forms write points as two-element arrays `[x, y]` and point
//! collections in lexicographic `(x, y)` order, which the `Ord` instance and
//! the sorted containers below provide for free.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// One cell of the grid; `x` is the column index, `y` the row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: u64,
    pub y: u64,
}

impl Point {
    pub const fn new(x: u64, y: u64) -> Self {
        Point { x, y }
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.x, self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y) = <(u64, u64)>::deserialize(d)?;
        Ok(Point { x, y })
    }
}

/// A finite view `[0, cols) × [0, rows)` of the grid.  Both sides are ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub cols: u64,
    pub rows: u64,
}

impl Window {
    /// Panics if either side is zero; windows are never empty.
    pub fn new(cols: u64, rows: u64) -> Self {
        assert!(cols >= 1 && rows >= 1, "window sides must be >= 1");
        Window { cols, rows }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x < self.cols && p.y < self.rows
    }

    /// All window points in lexicographic `(x, y)` order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let rows = self.rows;
        (0..self.cols).flat_map(move |x| (0..rows).map(move |y| Point::new(x, y)))
    }

    pub fn area(&self) -> u64 {
        self.cols.saturating_mul(self.rows)
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.cols, self.rows)
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    /// Parses the `COLSxROWS` form, e.g. `64x8`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("expected COLSxROWS, got {s:?}");
        let (cols, rows) = s.split_once(['x', 'X']).ok_or_else(err)?;
        let cols: u64 = cols.trim().parse().map_err(|_| err())?;
        let rows: u64 = rows.trim().parse().map_err(|_| err())?;
        if cols == 0 || rows == 0 {
            return Err("window sides must be >= 1".into());
        }
        Ok(Window { cols, rows })
    }
}

/// A finite set of grid points with canonical (sorted) iteration order.
pub type PointSet = BTreeSet<Point>;

/// `x ∖ y` as a fresh set.
pub fn set_difference(x: &PointSet, y: &PointSet) -> PointSet {
    x.difference(y).copied().collect()
}

/// `x ∩ y` as a fresh set.
pub fn set_intersection(x: &PointSet, y: &PointSet) -> PointSet {
    x.intersection(y).copied().collect()
}

/// A finite partial function from columns to rows, stored as its graph.
///
/// Serializes as the sorted list of graph points `[[x, y], …]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialFunction {
    map: BTreeMap<u64, u64>,
}

impl PartialFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a function from `(column, row)` pairs.  Later pairs overwrite
    /// earlier ones on the same column.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        PartialFunction {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, x: u64, y: u64) {
        self.map.insert(x, y);
    }

    pub fn value_at(&self, x: u64) -> Option<u64> {
        self.map.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.map.keys().copied()
    }

    pub fn graph(&self) -> impl Iterator<Item = Point> + '_ {
        self.map.iter().map(|(&x, &y)| Point::new(x, y))
    }

    pub fn graph_set(&self) -> PointSet {
        self.graph().collect()
    }

    /// Whether the graphs of `self` and `other` share no point.  Shared
    /// domain columns are fine as long as the values there differ.
    pub fn graph_disjoint(&self, other: &PartialFunction) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .map
            .iter()
            .all(|(x, y)| large.map.get(x) != Some(y))
    }
}

impl Serialize for PartialFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.graph())
    }
}

impl<'de> Deserialize<'de> for PartialFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let points = Vec::<Point>::deserialize(d)?;
        Ok(PartialFunction::from_pairs(
            points.into_iter().map(|p| (p.x, p.y)),
        ))
    }
}

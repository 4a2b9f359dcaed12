//! (κ,λ)-towers of monochromatic functions: validation, deterministic
//! search, and the pigeonhole extraction lemmas.
//!
//! A (κ,λ)-tower is a set of λ pairwise graph-disjoint partial functions
//! sharing one domain of κ columns; it is monochromatic for a coloring when
//! each function's graph sits inside a single block.  Because all functions
//! share the domain, graph-disjointness means the λ values at every domain
//! column are pairwise distinct.
//!
//! [`search_tower`] is exhaustive over the window under a color-major order:
//! candidate color multisets are enumerated lexicographically, and a column
//! supports a multiset exactly when every color supplies at least its
//! multiplicity of points there (distinct colors never compete for a point,
//! so this count test is the full matching condition).  `None` is therefore
//! a certain verdict for the window, and the returned witness is canonical:
//! least color multiset, then least domain columns, then least rows.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{PartialFunction, Point, Window};
use crate::partition::{ColorId, Coloring};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("cover has {cover} functions; the pigeonhole needs a tower of at least {cover}+1, got {lambda}")]
    TooFewFunctions { lambda: usize, cover: usize },
    #[error("need towers up to level {need} but only {have} levels are available")]
    InsufficientLevels { have: usize, need: u64 },
}

/// λ pairwise graph-disjoint functions on one common domain of κ columns,
/// optionally tagged with the block each function lives in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub domain: BTreeSet<u64>,
    pub functions: Vec<PartialFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<ColorId>>,
}

impl Tower {
    /// Domain size κ.
    pub fn kappa(&self) -> u64 {
        self.domain.len() as u64
    }

    /// Function count λ.
    pub fn lambda(&self) -> u64 {
        self.functions.len() as u64
    }

    /// The set of block colors used, when recorded.
    pub fn color_set(&self) -> Option<BTreeSet<ColorId>> {
        self.colors.as_ref().map(|cs| cs.iter().copied().collect())
    }
}

/// A sequence of towers; "essentially different" means pairwise disjoint
/// color sets and pairwise disjoint domains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSequence {
    pub towers: Vec<Tower>,
}

/// Checks every tower invariant against the stated shape; with a coloring,
/// additionally checks that each function is monochromatic and that any
/// recorded colors are the true ones.
pub fn validate_tower(t: &Tower, kappa: u64, lambda: u64, b: Option<&Coloring>) -> bool {
    if t.kappa() != kappa || t.lambda() != lambda {
        return false;
    }
    if !t
        .functions
        .iter()
        .all(|g| g.domain().collect::<BTreeSet<u64>>() == t.domain)
    {
        return false;
    }
    for (i, g) in t.functions.iter().enumerate() {
        for h in &t.functions[i + 1..] {
            if !g.graph_disjoint(h) {
                return false;
            }
        }
    }
    if let Some(colors) = &t.colors {
        if colors.len() != t.functions.len() {
            return false;
        }
    }
    if let Some(b) = b {
        for (i, g) in t.functions.iter().enumerate() {
            let mut blocks = g.graph().map(|p| b.color(p));
            let Some(first) = blocks.next() else { continue };
            if !blocks.all(|c| c == first) {
                return false;
            }
            if let Some(colors) = &t.colors {
                if colors[i] != first {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff the towers are pairwise essentially different (disjoint color
/// sets and disjoint domains) and each one validates for its own shape.
pub fn validate_ed_sequence(seq: &TowerSequence, b: Option<&Coloring>) -> bool {
    for t in &seq.towers {
        if t.colors.is_none() || !validate_tower(t, t.kappa(), t.lambda(), b) {
            return false;
        }
    }
    for (i, s) in seq.towers.iter().enumerate() {
        for t in &seq.towers[i + 1..] {
            let shared_color = s
                .color_set()
                .unwrap()
                .intersection(&t.color_set().unwrap())
                .next()
                .is_some();
            if shared_color || s.domain.intersection(&t.domain).next().is_some() {
                return false;
            }
        }
    }
    true
}

/// Restrictions threaded through tower search so sequence construction and
/// restricted readings (for instance "A-colors only, off column 0") reuse
/// one engine.
#[derive(Debug, Clone, Default)]
pub struct TowerConstraints {
    /// When set, only these colors may be used.
    pub allowed_colors: Option<BTreeSet<ColorId>>,
    pub forbidden_colors: BTreeSet<ColorId>,
    pub forbidden_columns: BTreeSet<u64>,
    /// Domain columns must be ≥ this.
    pub min_column: u64,
}

impl TowerConstraints {
    fn column_ok(&self, x: u64) -> bool {
        x >= self.min_column && !self.forbidden_columns.contains(&x)
    }

    fn color_ok(&self, c: ColorId) -> bool {
        !self.forbidden_colors.contains(&c)
            && self.allowed_colors.as_ref().is_none_or(|s| s.contains(&c))
    }
}

/// Exhaustive (pruned) search for a (κ,λ)-tower of `b`-monochromatic
/// functions inside the window; `None` is a certain verdict for the window.
pub fn search_tower(b: &Coloring, kappa: u64, lambda: u64, w: Window) -> Option<Tower> {
    search_tower_constrained(b, kappa, lambda, w, &TowerConstraints::default())
}

/// Rows available per color per column, restricted by the constraints.
fn candidate_rows(
    b: &Coloring,
    w: Window,
    cons: &TowerConstraints,
) -> BTreeMap<ColorId, BTreeMap<u64, Vec<u64>>> {
    let mut rows_by: BTreeMap<ColorId, BTreeMap<u64, Vec<u64>>> = BTreeMap::new();
    for x in (0..w.cols).filter(|&x| cons.column_ok(x)) {
        for y in 0..w.rows {
            let c = b.color(Point::new(x, y));
            if cons.color_ok(c) {
                rows_by.entry(c).or_default().entry(x).or_default().push(y);
            }
        }
    }
    rows_by
}

pub fn search_tower_constrained(
    b: &Coloring,
    kappa: u64,
    lambda: u64,
    w: Window,
    cons: &TowerConstraints,
) -> Option<Tower> {
    assert!(kappa >= 1 && lambda >= 1, "degenerate tower shapes are rejected");
    let rows_by = candidate_rows(b, w, cons);
    let palette: Vec<(&ColorId, &BTreeMap<u64, Vec<u64>>)> = rows_by.iter().collect();

    // Depth-first over nondecreasing color sequences of length λ.  `feasible`
    // holds the columns on which every chosen color still has enough rows for
    // its multiplicity; colors never share points, so that per-color count is
    // exactly the matching condition and the set only shrinks with depth.
    struct Dfs<'a> {
        palette: &'a [(&'a ColorId, &'a BTreeMap<u64, Vec<u64>>)],
        kappa: usize,
        lambda: usize,
    }
    impl Dfs<'_> {
        fn run(&self, start: usize, chosen: &mut Vec<usize>, feasible: &[u64]) -> Option<(Vec<usize>, Vec<u64>)> {
            if chosen.len() == self.lambda {
                return Some((chosen.clone(), feasible[..self.kappa].to_vec()));
            }
            for ci in start..self.palette.len() {
                let mult = 1 + chosen.iter().rev().take_while(|&&p| p == ci).count();
                let support = self.palette[ci].1;
                let next: Vec<u64> = if chosen.is_empty() {
                    support
                        .iter()
                        .filter(|&(_, rows)| rows.len() >= mult)
                        .map(|(&x, _)| x)
                        .collect()
                } else {
                    feasible
                        .iter()
                        .filter(|x| support.get(x).is_some_and(|rows| rows.len() >= mult))
                        .copied()
                        .collect()
                };
                if next.len() < self.kappa {
                    continue;
                }
                chosen.push(ci);
                if let Some(hit) = self.run(ci, chosen, &next) {
                    return Some(hit);
                }
                chosen.pop();
            }
            None
        }
    }

    let dfs = Dfs {
        palette: &palette,
        kappa: kappa as usize,
        lambda: lambda as usize,
    };
    let (chosen, columns) = dfs.run(0, &mut Vec::new(), &[])?;

    // Materialize: functions follow the nondecreasing color order; within a
    // color class, successive functions take successive rows.
    let colors: Vec<ColorId> = chosen.iter().map(|&ci| *palette[ci].0).collect();
    let mut functions = vec![PartialFunction::new(); chosen.len()];
    for &x in &columns {
        let mut used_of_color: BTreeMap<usize, usize> = BTreeMap::new();
        for (t, &ci) in chosen.iter().enumerate() {
            let occ = used_of_color.entry(ci).or_insert(0);
            let y = palette[ci].1[&x][*occ];
            *occ += 1;
            functions[t].insert(x, y);
        }
    }
    let tower = Tower {
        domain: columns.into_iter().collect(),
        functions,
        colors: Some(colors),
    };
    debug_assert!(validate_tower(&tower, kappa, lambda, Some(b)));
    Some(tower)
}

/// The greedy single-column step: the least usable column holding λ points
/// with usable colors, taking the lowest rows.
fn greedy_single_column(
    b: &Coloring,
    lambda: u64,
    w: Window,
    cons: &TowerConstraints,
) -> Option<Tower> {
    for x in (0..w.cols).filter(|&x| cons.column_ok(x)) {
        let mut picked: Vec<(u64, ColorId)> = Vec::new();
        for y in 0..w.rows {
            let c = b.color(Point::new(x, y));
            if cons.color_ok(c) {
                picked.push((y, c));
                if picked.len() as u64 == lambda {
                    break;
                }
            }
        }
        if picked.len() as u64 == lambda {
            return Some(Tower {
                domain: [x].into_iter().collect(),
                functions: picked
                    .iter()
                    .map(|&(y, _)| PartialFunction::from_pairs([(x, y)]))
                    .collect(),
                colors: Some(picked.iter().map(|&(_, c)| c).collect()),
            });
        }
    }
    None
}

/// Builds `count` essentially different towers, level k getting the shape
/// `shape(k)` (k = 1..count).  Single-column levels use the greedy
/// column-by-column construction; wider shapes fall back to the constrained
/// exhaustive search.  Colors and columns consumed by earlier towers are
/// barred from later ones.
pub fn search_ed_sequence(
    b: &Coloring,
    count: u64,
    shape: impl Fn(u64) -> (u64, u64),
    w: Window,
) -> Option<TowerSequence> {
    search_ed_sequence_constrained(b, count, shape, w, &TowerConstraints::default())
}

pub fn search_ed_sequence_constrained(
    b: &Coloring,
    count: u64,
    shape: impl Fn(u64) -> (u64, u64),
    w: Window,
    base: &TowerConstraints,
) -> Option<TowerSequence> {
    let mut cons = base.clone();
    let mut towers = Vec::new();
    for k in 1..=count {
        let (kappa, lambda) = shape(k);
        let tower = if kappa == 1 {
            greedy_single_column(b, lambda, w, &cons)?
        } else {
            search_tower_constrained(b, kappa, lambda, w, &cons)?
        };
        cons.forbidden_colors
            .extend(tower.colors.as_deref().unwrap_or_default().iter().copied());
        cons.forbidden_columns.extend(tower.domain.iter().copied());
        towers.push(tower);
    }
    Some(TowerSequence { towers })
}

fn covered(cover: &[PartialFunction], x: u64, y: u64) -> bool {
    cover.iter().any(|f| f.value_at(x) == Some(y))
}

fn uncovered_count(g: &PartialFunction, cover: &[PartialFunction]) -> u64 {
    g.graph().filter(|p| !covered(cover, p.x, p.y)).count() as u64
}

/// The one-tower pigeonhole: with λ > |cover| functions, some tower function
/// keeps at least ⌈κ/(|cover|+1)⌉ points off every covering function.
/// Returns the function of maximal uncovered count (least index on ties).
pub fn uncovered_omega(
    t: &Tower,
    cover: &[PartialFunction],
) -> Result<(usize, u64), TowerError> {
    if t.functions.len() <= cover.len() {
        return Err(TowerError::TooFewFunctions {
            lambda: t.functions.len(),
            cover: cover.len(),
        });
    }
    let (best, count) = t
        .functions
        .iter()
        .enumerate()
        .map(|(i, g)| (i, uncovered_count(g, cover)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("tower has at least one function");
    debug_assert!(count >= t.kappa().div_ceil(cover.len() as u64 + 1));
    Ok((best, count))
}

/// The levelled pigeonhole over a sequence where `towers[i]` is the level
/// i+1 (that is, (i+1,i+1)) tower: inside the level m·(|cover|+1) tower,
/// every column leaves one of the first |cover|+1 functions uncovered, so
/// some such function index repeats at least m times.  Returns that index,
/// the level used, and a full recount of its uncovered points.
pub fn uncovered_kk(
    towers: &[Tower],
    cover: &[PartialFunction],
    m: u64,
) -> Result<(usize, u64, u64), TowerError> {
    let level = (m * (cover.len() as u64 + 1)).max(1);
    if (towers.len() as u64) < level {
        return Err(TowerError::InsufficientLevels {
            have: towers.len(),
            need: level,
        });
    }
    let t = &towers[level as usize - 1];
    assert!(
        t.kappa() == level && t.lambda() == level,
        "towers[{}] must be a ({level},{level})-tower",
        level - 1
    );
    let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
    for &x in &t.domain {
        let i = (0..=cover.len())
            .find(|&i| {
                let y = t.functions[i].value_at(x).expect("function total on domain");
                !covered(cover, x, y)
            })
            .expect("cover functions hit at most |cover| of |cover|+1 disjoint points per column");
        *hits.entry(i).or_insert(0) += 1;
    }
    let (&best, _) = hits
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .expect("tower domain is nonempty");
    let count = uncovered_count(&t.functions[best], cover);
    debug_assert!(count >= m);
    Ok((best, level, count))
}

//! Finite two-valued Chu spaces and their structural properties.
//!
//! A [`ChuSpace`] is a set of points, a set of states and a boolean incidence
//! matrix between them. Rows are indexed by points and columns by states; both
//! are cached as [`Mask`]s so that row and column comparisons are cheap.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::Mask;

/// Default cap on `max_points * max_states` for [`enumerate_spaces`].
pub const DEFAULT_SPACE_BUDGET: usize = 12;

/// JSON shape of a Chu space: `relation[i][j]` pairs `points[i]` with `states[j]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawSpace {
    pub points: Vec<String>,
    pub states: Vec<String>,
    pub relation: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct ChuSpace {
    points: Vec<String>,
    states: Vec<String>,
    rows: Vec<Mask>,
    cols: Vec<Mask>,
}

impl TryFrom<RawSpace> for ChuSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        validate_space(raw)
    }
}

impl From<ChuSpace> for RawSpace {
    fn from(space: ChuSpace) -> Self {
        let relation = space
            .rows
            .iter()
            .map(|row| (0..space.states.len()).map(|j| row.get(j)).collect())
            .collect();
        RawSpace {
            points: space.points,
            states: space.states,
            relation,
        }
    }
}

/// Checks the invariants of a raw space and builds the immutable value.
pub fn validate_space(raw: RawSpace) -> Result<ChuSpace> {
    let RawSpace {
        points,
        states,
        relation,
    } = raw;
    check_unique(&points, "point")?;
    check_unique(&states, "state")?;
    if relation.len() != points.len() {
        return Err(Error::DimensionMismatch {
            rows: relation.len(),
            cols: relation.first().map_or(0, Vec::len),
            points: points.len(),
            states: states.len(),
        });
    }
    if let Some(first) = relation.first() {
        let expected = first.len();
        if let Some((row, r)) = relation.iter().enumerate().find(|(_, r)| r.len() != expected) {
            return Err(Error::RaggedMatrix {
                row,
                len: r.len(),
                expected,
            });
        }
        if expected != states.len() {
            return Err(Error::DimensionMismatch {
                rows: relation.len(),
                cols: expected,
                points: points.len(),
                states: states.len(),
            });
        }
    }
    let point_set: BTreeSet<&String> = points.iter().collect();
    if let Some(s) = states.iter().find(|s| point_set.contains(s)) {
        return Err(Error::SortCollision(s.clone()));
    }
    Ok(ChuSpace::from_matrix_unchecked(points, states, |i, j| relation[i][j]))
}

fn check_unique(labels: &[String], sort: &'static str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel {
                sort,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

impl ChuSpace {
    /// Builds a space from labels and an incidence predicate, validating labels.
    pub fn from_fn(
        points: Vec<String>,
        states: Vec<String>,
        related: impl Fn(usize, usize) -> bool,
    ) -> Result<ChuSpace> {
        let relation = (0..points.len())
            .map(|i| (0..states.len()).map(|j| related(i, j)).collect())
            .collect();
        validate_space(RawSpace {
            points,
            states,
            relation,
        })
    }

    /// Space over canonical labels `x0..`, `a0..`.
    pub fn canonical(
        num_points: usize,
        num_states: usize,
        related: impl Fn(usize, usize) -> bool,
    ) -> ChuSpace {
        ChuSpace::from_matrix_unchecked(
            canonical_labels("x", num_points),
            canonical_labels("a", num_states),
            related,
        )
    }

    pub(crate) fn from_matrix_unchecked(
        points: Vec<String>,
        states: Vec<String>,
        related: impl Fn(usize, usize) -> bool,
    ) -> ChuSpace {
        let rows: Vec<Mask> = (0..points.len())
            .map(|i| Mask::from_bools((0..states.len()).map(|j| related(i, j))))
            .collect();
        let cols = (0..states.len())
            .map(|j| Mask::from_bools(rows.iter().map(|r| r.get(j))))
            .collect();
        ChuSpace {
            points,
            states,
            rows,
            cols,
        }
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn related(&self, point: usize, state: usize) -> bool {
        self.rows[point].get(state)
    }

    /// Row of a point, as a mask over states.
    pub fn row(&self, point: usize) -> &Mask {
        &self.rows[point]
    }

    /// Column of a state, as a mask over points.
    pub fn column(&self, state: usize) -> &Mask {
        &self.cols[state]
    }

    pub fn columns(&self) -> &[Mask] {
        &self.cols
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// A state is consistent when some point is related to it.
    pub fn is_consistent(&self, state: usize) -> bool {
        !self.cols[state].is_zero()
    }

    pub fn to_raw(&self) -> RawSpace {
        self.clone().into()
    }

    /// The subspace keeping only the listed states (labels preserved).
    pub fn restrict_states(&self, keep: &[usize]) -> ChuSpace {
        let states = keep.iter().map(|&j| self.states[j].clone()).collect();
        ChuSpace::from_matrix_unchecked(self.points.clone(), states, |i, j| {
            self.related(i, keep[j])
        })
    }
}

pub fn canonical_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn is_separated(space: &ChuSpace) -> bool {
    all_distinct(&space.rows)
}

pub fn is_extensional(space: &ChuSpace) -> bool {
    all_distinct(&space.cols)
}

fn all_distinct(masks: &[Mask]) -> bool {
    let mut seen = BTreeSet::new();
    masks.iter().all(|m| seen.insert(m))
}

/// Result of quotienting a space by equal rows and equal columns.
///
/// `point_map[i]` is the index in `space` of the class of original point `i`,
/// likewise for states. Representatives are the least original indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collapse {
    pub space: ChuSpace,
    pub point_map: Vec<usize>,
    pub state_map: Vec<usize>,
}

pub fn biextensional_collapse(space: &ChuSpace) -> Collapse {
    let (point_reps, point_map) = classes(&space.rows);
    let (state_reps, state_map) = classes(&space.cols);
    let collapsed = ChuSpace::from_matrix_unchecked(
        point_reps.iter().map(|&i| space.points[i].clone()).collect(),
        state_reps.iter().map(|&j| space.states[j].clone()).collect(),
        |i, j| space.related(point_reps[i], state_reps[j]),
    );
    Collapse {
        space: collapsed,
        point_map,
        state_map,
    }
}

fn classes(masks: &[Mask]) -> (Vec<usize>, Vec<usize>) {
    let mut reps: Vec<usize> = Vec::new();
    let mut index: HashMap<&Mask, usize> = HashMap::new();
    let map = masks
        .iter()
        .enumerate()
        .map(|(i, m)| {
            *index.entry(m).or_insert_with(|| {
                reps.push(i);
                reps.len() - 1
            })
        })
        .collect();
    (reps, map)
}

pub fn admits_complements(space: &ChuSpace) -> bool {
    let cols: BTreeSet<&Mask> = space.cols.iter().collect();
    space.cols.iter().all(|c| cols.contains(&c.not()))
}

/// Every family of fewer than `k` states has its intersection as a column.
///
/// The empty family needs an all-true column; for `k >= 3` this reduces to
/// closure under pairwise intersection, which yields every finite size.
pub fn admits_intersections(space: &ChuSpace, k: usize) -> bool {
    admits_closure(space, k, &Mask::ones(space.num_points()), Mask::and)
}

pub fn admits_unions(space: &ChuSpace, k: usize) -> bool {
    admits_closure(space, k, &Mask::zeros(space.num_points()), Mask::or)
}

fn admits_closure(space: &ChuSpace, k: usize, unit: &Mask, op: fn(&Mask, &Mask) -> Mask) -> bool {
    assert!(k >= 1, "closure order must be positive");
    let cols: BTreeSet<&Mask> = space.cols.iter().collect();
    if !cols.contains(unit) {
        return false;
    }
    if k < 3 {
        return true;
    }
    space
        .cols
        .iter()
        .enumerate()
        .all(|(i, a)| space.cols[i + 1..].iter().all(|b| cols.contains(&op(a, b))))
}

/// Closed under finite intersections and arbitrary unions; at finite size the
/// bound `|states| + 1` covers every family.
pub fn is_topological_system(space: &ChuSpace) -> bool {
    let k = space.num_states() + 1;
    admits_intersections(space, k) && admits_unions(space, k)
}

/// Sort-preserving bijections commuting with the relations, if any.
pub fn find_isomorphism(a: &ChuSpace, b: &ChuSpace) -> Option<(Vec<usize>, Vec<usize>)> {
    if a.num_points() != b.num_points() || a.num_states() != b.num_states() {
        return None;
    }
    let mut pmap = vec![usize::MAX; a.num_points()];
    let mut used = vec![false; b.num_points()];
    iso_points(a, b, 0, &mut pmap, &mut used)
}

fn iso_points(
    a: &ChuSpace,
    b: &ChuSpace,
    i: usize,
    pmap: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if i == pmap.len() {
        // With points fixed, a state bijection exists iff permuted column multisets agree.
        let permuted = |j: usize| -> Mask {
            let mut m = Mask::zeros(b.num_points());
            for (x, &y) in pmap.iter().enumerate() {
                m.set(y, a.related(x, j));
            }
            m
        };
        let mut smap = Vec::with_capacity(a.num_states());
        let mut taken = vec![false; b.num_states()];
        for j in 0..a.num_states() {
            let col = permuted(j);
            let k = (0..b.num_states()).find(|&k| !taken[k] && b.cols[k] == col)?;
            taken[k] = true;
            smap.push(k);
        }
        return Some((pmap.clone(), smap));
    }
    for y in 0..b.num_points() {
        if !used[y] && a.rows[i].count() == b.rows[y].count() {
            used[y] = true;
            pmap[i] = y;
            if let Some(found) = iso_points(a, b, i + 1, pmap, used) {
                return Some(found);
            }
            used[y] = false;
        }
    }
    None
}

pub fn is_isomorphic(a: &ChuSpace, b: &ChuSpace) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Every space over canonical labels with at most the given numbers of
/// points and states, each relation matrix exactly once.
pub fn enumerate_spaces(max_points: usize, max_states: usize) -> Result<SpaceIter> {
    enumerate_spaces_with_budget(max_points, max_states, DEFAULT_SPACE_BUDGET)
}

pub fn enumerate_spaces_with_budget(
    max_points: usize,
    max_states: usize,
    budget: usize,
) -> Result<SpaceIter> {
    let product = max_points.saturating_mul(max_states);
    if product > budget || product >= 63 {
        return Err(Error::BudgetExceeded {
            requested: product as u128,
            budget: budget as u128,
        });
    }
    Ok(SpaceIter {
        max_points,
        max_states,
        points: 0,
        states: 0,
        matrix: 0,
    })
}

/// Iterator returned by [`enumerate_spaces`]; ordered by point count, then
/// state count, then matrix bits (bit `i * states + j` is entry `(i, j)`).
#[derive(Clone, Debug)]
pub struct SpaceIter {
    max_points: usize,
    max_states: usize,
    points: usize,
    states: usize,
    matrix: u64,
}

impl Iterator for SpaceIter {
    type Item = ChuSpace;

    fn next(&mut self) -> Option<ChuSpace> {
        if self.points > self.max_points {
            return None;
        }
        let (p, s, m) = (self.points, self.states, self.matrix);
        let space = ChuSpace::canonical(p, s, |i, j| m >> (i * s + j) & 1 == 1);
        self.matrix += 1;
        if self.matrix >= 1u64 << (p * s) {
            self.matrix = 0;
            self.states += 1;
            if self.states > self.max_states {
                self.states = 0;
                self.points += 1;
            }
        }
        Some(space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(points: &[&str], states: &[&str], relation: Vec<Vec<bool>>) -> RawSpace {
        RawSpace {
            points: points.iter().map(|s| s.to_string()).collect(),
            states: states.iter().map(|s| s.to_string()).collect(),
            relation,
        }
    }

    #[test]
    fn validation_examples() {
        assert!(validate_space(raw(&["x0"], &["a0"], vec![vec![true]])).is_ok());
        assert!(matches!(
            validate_space(raw(&["x0", "x0"], &["a0"], vec![vec![true], vec![false]])),
            Err(Error::DuplicateLabel { .. })
        ));
        assert!(matches!(
            validate_space(raw(&["x0"], &["a0"], vec![vec![true], vec![false]])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            validate_space(raw(&["x0", "x1"], &["a0"], vec![vec![true], vec![false, true]])),
            Err(Error::RaggedMatrix { .. })
        ));
        assert!(matches!(
            validate_space(raw(&["x0"], &["x0"], vec![vec![true]])),
            Err(Error::SortCollision(_))
        ));
        assert!(validate_space(raw(&[], &[], vec![])).is_ok());
    }

    #[test]
    fn separated_and_extensional() {
        let s = ChuSpace::canonical(2, 1, |i, _| i == 0);
        assert!(is_separated(&s));
        let s = ChuSpace::canonical(2, 1, |_, _| false);
        assert!(!is_separated(&s));
        let s = ChuSpace::canonical(1, 2, |_, j| j == 0);
        assert!(is_extensional(&s));
        let s = ChuSpace::canonical(1, 2, |_, _| false);
        assert!(!is_extensional(&s));
    }

    #[test]
    fn collapse_examples() {
        let full = ChuSpace::canonical(2, 2, |_, _| true);
        let c = biextensional_collapse(&full);
        assert_eq!(c.space.num_points(), 1);
        assert_eq!(c.space.num_states(), 1);
        assert!(c.space.related(0, 0));
        assert_eq!(c.point_map, vec![0, 0]);

        let diag = ChuSpace::canonical(2, 2, |i, j| i == j);
        let c = biextensional_collapse(&diag);
        assert_eq!(c.space, diag);
        assert_eq!(c.point_map, vec![0, 1]);
        assert_eq!(c.state_map, vec![0, 1]);
    }

    #[test]
    fn closure_examples() {
        let swap = ChuSpace::canonical(2, 2, |i, j| i == j);
        assert!(admits_complements(&swap));
        assert!(!admits_intersections(&swap, 3));
        assert!(!admits_unions(&swap, 3));
        assert!(!is_topological_system(&swap));

        let single = ChuSpace::canonical(2, 1, |i, _| i == 0);
        assert!(!admits_complements(&single));

        let with_full = ChuSpace::canonical(2, 2, |_, j| j == 0);
        assert!(admits_intersections(&with_full, 1));
        assert!(admits_unions(&with_full, 1));

        let empty_points = ChuSpace::canonical(0, 1, |_, _| false);
        assert!(is_topological_system(&empty_points));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_spaces(0, 0).unwrap().count(), 1);
        let exact = |p, s| {
            enumerate_spaces(p, s)
                .unwrap()
                .filter(|x| x.num_points() == p && x.num_states() == s)
                .count()
        };
        assert_eq!(exact(1, 1), 2);
        assert_eq!(exact(2, 2), 16);
        assert_eq!(enumerate_spaces(2, 2).unwrap().count(), 31);
        assert!(matches!(enumerate_spaces(4, 4), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn isomorphism_respects_relabelling() {
        let a = ChuSpace::canonical(2, 2, |i, j| i == 0 || j == 1);
        let b = ChuSpace::canonical(2, 2, |i, j| i == 1 || j == 0);
        assert!(is_isomorphic(&a, &b));
        let c = ChuSpace::canonical(2, 2, |i, j| i == j);
        assert!(!is_isomorphic(&a, &c));
    }
}

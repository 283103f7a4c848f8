//! Preservation of formulas along Chu transforms, exhaustive counterexample
//! search, and direct checks of the covering properties.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{evaluate, free_variables, tuple_count, Assignment, Compiled, Formula, TruthTable, Tuples};
use crate::formula::DEFAULT_ARITY_BUDGET;
use crate::mask::Mask;
use crate::space::{admits_complements, enumerate_spaces, ChuSpace};
use crate::transform::{check_adjoint, visit_adjoint, ChuTransform, ColumnIndex, TransformKind};

/// Size limits shared by source and target spaces in a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_points: usize,
    pub max_states: usize,
}

impl Bounds {
    pub fn new(max_points: usize, max_states: usize) -> Bounds {
        Bounds { max_points, max_states }
    }
}

/// A pair of tuples on which the preservation implication fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub transform: ChuTransform,
    /// Free point variables, in name order; `x` lists their source values.
    pub point_vars: Vec<String>,
    pub state_vars: Vec<String>,
    pub x: Vec<String>,
    /// Target states assigned to `state_vars`.
    pub b: Vec<String>,
    pub lhs: bool,
    pub rhs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub spaces: u64,
    pub transforms: u64,
    pub assignments: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum SearchReport {
    #[serde(rename = "PRESERVED")]
    Preserved(Certificate),
    #[serde(rename = "VIOLATED")]
    Violated(Box<Violation>),
}

impl SearchReport {
    pub fn is_preserved(&self) -> bool {
        matches!(self, SearchReport::Preserved(_))
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            SearchReport::Violated(v) => Some(v),
            SearchReport::Preserved(_) => None,
        }
    }

    /// Re-evaluates a reported violation from scratch with [`evaluate`].
    /// Returns `true` when the report is confirmed; preserved reports confirm trivially.
    pub fn recheck(&self, f: &Formula) -> Result<bool> {
        let v = match self {
            SearchReport::Preserved(_) => return Ok(true),
            SearchReport::Violated(v) => v,
        };
        let t = &v.transform;
        let f_map = t.f_labels();
        let g_map = t.g_labels();
        let mut src = Assignment::new();
        let mut tgt = Assignment::new();
        for (var, x) in v.point_vars.iter().zip(&v.x) {
            src = src.point(var, x);
            tgt = tgt.point(var, &f_map[x]);
        }
        for (var, b) in v.state_vars.iter().zip(&v.b) {
            src = src.state(var, &g_map[b]);
            tgt = tgt.state(var, b);
        }
        let lhs = evaluate(t.source(), f, &src)?;
        let rhs = evaluate(t.target(), f, &tgt)?;
        Ok(lhs == v.lhs && rhs == v.rhs && lhs && !rhs)
    }
}

fn tabulate(compiled: &Compiled, space: &ChuSpace) -> Result<TruthTable> {
    compiled.truth_table(space, DEFAULT_ARITY_BUDGET)
}

/// Outcome of checking one `(f, g)` pair against precomputed tables.
fn check_pair(
    src: &TruthTable,
    tgt: &TruthTable,
    n_points: usize,
    n_states: usize,
    f: &[usize],
    g: &[usize],
    assignments: &mut u64,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let (kp, ks) = (src.point_arity(), src.state_arity());
    let mut fx = vec![0; kp];
    let mut gb = vec![0; ks];
    for x in Tuples::new(n_points, kp) {
        for (o, &i) in fx.iter_mut().zip(&x) {
            *o = f[i];
        }
        for b in Tuples::new(n_states, ks) {
            *assignments += 1;
            for (o, &j) in gb.iter_mut().zip(&b) {
                *o = g[j];
            }
            if src.get(&x, &gb) && !tgt.get(&fx, &b) {
                return Some((x, b));
            }
        }
    }
    None
}

fn violation(compiled: &Compiled, t: ChuTransform, x: Vec<usize>, b: Vec<usize>) -> Violation {
    let xs = x.iter().map(|&i| t.source().points()[i].clone()).collect();
    let bs = b.iter().map(|&j| t.target().states()[j].clone()).collect();
    Violation {
        transform: t,
        point_vars: compiled.point_vars().to_vec(),
        state_vars: compiled.state_vars().to_vec(),
        x: xs,
        b: bs,
        lhs: true,
        rhs: false,
    }
}

/// Checks `source |= f[x, g(b)]  =>  target |= f[f(x), b]` for all tuples.
pub fn check_preservation(f: &Formula, t: &ChuTransform) -> Result<SearchReport> {
    let compiled = Compiled::new(f);
    let (kp, ks) = (compiled.point_vars().len(), compiled.state_vars().len());
    let requested = tuple_count(t.source().num_points(), kp).saturating_mul(tuple_count(t.target().num_states(), ks));
    if requested > DEFAULT_ARITY_BUDGET {
        return Err(Error::ArityBudgetExceeded {
            requested,
            budget: DEFAULT_ARITY_BUDGET,
        });
    }
    let src = tabulate(&compiled, t.source())?;
    let tgt = tabulate(&compiled, t.target())?;
    let mut assignments = 0;
    let found = check_pair(
        &src,
        &tgt,
        t.source().num_points(),
        t.target().num_states(),
        t.f(),
        t.g(),
        &mut assignments,
    );
    Ok(match found {
        Some((x, b)) => SearchReport::Violated(Box::new(violation(&compiled, t.clone(), x, b))),
        None => SearchReport::Preserved(Certificate {
            spaces: 2,
            transforms: 1,
            assignments,
            bounds: None,
        }),
    })
}

/// Parameters of an exhaustive search over all space pairs within bounds.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub kind: TransformKind,
    pub bounds: Bounds,
    /// Worker threads; `0` uses the rayon default.
    pub jobs: usize,
    /// Only spaces satisfying every one of these sentences take part.
    pub theory: Vec<Formula>,
}

impl SearchOptions {
    pub fn new(kind: TransformKind, max_points: usize, max_states: usize) -> SearchOptions {
        SearchOptions {
            kind,
            bounds: Bounds::new(max_points, max_states),
            jobs: 0,
            theory: Vec::new(),
        }
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn theory(mut self, theory: Vec<Formula>) -> Self {
        self.theory = theory;
        self
    }
}

/// All spaces within bounds that satisfy the theory, in enumeration order.
fn universe(opts: &SearchOptions) -> Result<Vec<ChuSpace>> {
    let theory = compile_theory(&opts.theory)?;
    let mut out = Vec::new();
    for space in enumerate_spaces(opts.bounds.max_points, opts.bounds.max_states)? {
        if satisfies(&theory, &space) {
            out.push(space);
        }
    }
    Ok(out)
}

fn compile_theory(theory: &[Formula]) -> Result<Vec<Compiled>> {
    theory
        .iter()
        .map(|s| {
            if free_variables(s).is_empty() {
                Ok(Compiled::new(s))
            } else {
                Err(Error::PreconditionFailed(format!("theory member `{s}` is not a sentence")))
            }
        })
        .collect()
}

fn satisfies(theory: &[Compiled], space: &ChuSpace) -> bool {
    theory.iter().all(|c| c.eval(space, &[], &[]))
}

/// Restrictions of `space` to each subset of its states, by bitmask order.
fn restrictions(space: &ChuSpace) -> Vec<ChuSpace> {
    let n = space.num_states();
    (0u64..1 << n)
        .map(|bits| {
            let keep: Vec<usize> = (0..n).filter(|j| bits >> j & 1 == 1).collect();
            space.restrict_states(&keep)
        })
        .collect()
}

struct Found<T> {
    source: usize,
    value: T,
}

fn run_pool<R: Send>(jobs: usize, work: impl FnOnce() -> R + Send) -> Result<R> {
    if jobs == 0 {
        return Ok(work());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::PreconditionFailed(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(work))
}

/// Every space pair within bounds, every transform of the requested kind and
/// every tuple; the first violation in enumeration order is reported.
///
/// Targets range over the whole universe except for `Restriction`, where
/// they are the restrictions of the source to its subsets of states.
pub fn search_counterexample(f: &Formula, opts: &SearchOptions) -> Result<SearchReport> {
    let compiled = Compiled::new(f);
    let theory = compile_theory(&opts.theory)?;
    let spaces = universe(opts)?;
    let tables: Vec<TruthTable> = spaces.iter().map(|s| tabulate(&compiled, s)).collect::<Result<_>>()?;
    let indexes: Vec<ColumnIndex> = spaces.iter().map(ColumnIndex::new).collect();
    let best = AtomicUsize::new(usize::MAX);

    let per_source = |i: usize| -> Result<(Certificate, Option<Found<Violation>>)> {
        let mut cert = Certificate {
            spaces: 0,
            transforms: 0,
            assignments: 0,
            bounds: None,
        };
        let source = &spaces[i];
        let owned;
        let targets: Vec<(&ChuSpace, Option<TruthTable>)> = if opts.kind == TransformKind::Restriction {
            owned = restrictions(source)
                .into_iter()
                .filter(|t| satisfies(&theory, t))
                .collect::<Vec<_>>();
            owned
                .iter()
                .map(|t| tabulate(&compiled, t).map(|tab| (t, Some(tab))))
                .collect::<Result<_>>()?
        } else {
            spaces.iter().map(|t| (t, None)).collect()
        };
        for (j, (target, own_table)) in targets.iter().enumerate() {
            if best.load(Ordering::Relaxed) < i {
                break;
            }
            let tgt_table = own_table.as_ref().unwrap_or_else(|| &tables[j]);
            cert.spaces += 1;
            let mut transforms = 0;
            let mut assignments = 0;
            let hit = visit_adjoint(source, target, &indexes[i], opts.kind, |fm, gm| {
                transforms += 1;
                match check_pair(
                    &tables[i],
                    tgt_table,
                    source.num_points(),
                    target.num_states(),
                    fm,
                    gm,
                    &mut assignments,
                ) {
                    Some((x, b)) => ControlFlow::Break((fm.to_vec(), gm.to_vec(), x, b)),
                    None => ControlFlow::Continue(()),
                }
            });
            cert.transforms += transforms;
            cert.assignments += assignments;
            if let Some((fm, gm, x, b)) = hit {
                best.fetch_min(i, Ordering::Relaxed);
                let t = check_adjoint(source.clone(), (*target).clone(), fm, gm)?;
                return Ok((
                    cert,
                    Some(Found {
                        source: i,
                        value: violation(&compiled, t, x, b),
                    }),
                ));
            }
        }
        Ok((cert, None))
    };

    let results: Vec<Result<(Certificate, Option<Found<Violation>>)>> =
        run_pool(opts.jobs, || (0..spaces.len()).into_par_iter().map(per_source).collect())?;
    let mut total = Certificate {
        spaces: spaces.len() as u64,
        transforms: 0,
        assignments: 0,
        bounds: Some(opts.bounds),
    };
    for r in results {
        let (cert, found) = r?;
        if let Some(found) = found {
            debug_assert!(found.source <= best.load(Ordering::Relaxed));
            return Ok(SearchReport::Violated(Box::new(found.value)));
        }
        total.transforms += cert.transforms;
        total.assignments += cert.assignments;
    }
    Ok(SearchReport::Preserved(total))
}

/// Result of checking whether transforms of a kind preserve a property of spaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    /// First transform (in enumeration order) from a space with the property
    /// to one without it.
    pub counterexample: Option<ChuTransform>,
    pub spaces: u64,
    /// Space pairs where the source has the property and the target lacks it.
    pub pairs_examined: u64,
}

/// Searches for a transform of the given kind from a space satisfying `pred`
/// to one that does not, over all spaces within bounds.
pub fn search_property_counterexample(
    pred: impl Fn(&ChuSpace) -> bool + Sync,
    kind: TransformKind,
    bounds: Bounds,
    jobs: usize,
) -> Result<PropertyReport> {
    let opts = SearchOptions {
        kind,
        bounds,
        jobs,
        theory: Vec::new(),
    };
    let spaces = universe(&opts)?;
    let holds: Vec<bool> = spaces.iter().map(&pred).collect();
    let indexes: Vec<ColumnIndex> = spaces.iter().map(ColumnIndex::new).collect();
    let per_source = |i: usize| -> (u64, Option<ChuTransform>) {
        if !holds[i] {
            return (0, None);
        }
        let source = &spaces[i];
        let targets: Vec<ChuSpace> = if kind == TransformKind::Restriction {
            restrictions(source)
        } else {
            spaces.iter().zip(&holds).filter(|(_, h)| !**h).map(|(s, _)| s.clone()).collect()
        };
        let mut examined = 0;
        for target in targets {
            if kind == TransformKind::Restriction && pred(&target) {
                continue;
            }
            examined += 1;
            let hit = visit_adjoint(source, &target, &indexes[i], kind, |f, g| ControlFlow::Break((f.to_vec(), g.to_vec())));
            if let Some((f, g)) = hit {
                let t = check_adjoint(source.clone(), target, f, g).expect("enumerated pairs are adjoint");
                return (examined, Some(t));
            }
        }
        (examined, None)
    };
    let results: Vec<(u64, Option<ChuTransform>)> =
        run_pool(jobs, || (0..spaces.len()).into_par_iter().map(per_source).collect())?;
    let mut report = PropertyReport {
        counterexample: None,
        spaces: spaces.len() as u64,
        pairs_examined: 0,
    };
    for (examined, found) in results {
        report.pairs_examined += examined;
        if found.is_some() {
            report.counterexample = found;
            break;
        }
    }
    Ok(report)
}

fn check_kl(k: usize, l: usize) -> Result<()> {
    if k == 0 || k > l {
        return Err(Error::PreconditionFailed(format!("need 1 <= k <= l, got k = {k}, l = {l}")));
    }
    Ok(())
}

fn union(space: &ChuSpace, family: &[usize]) -> Mask {
    family
        .iter()
        .fold(Mask::zeros(space.num_points()), |acc, &a| acc.or(space.column(a)))
}

fn intersection(space: &ChuSpace, family: &[usize]) -> Mask {
    family
        .iter()
        .fold(Mask::ones(space.num_points()), |acc, &a| acc.and(space.column(a)))
}

/// Nonempty families of at most `l` states.
fn families(space: &ChuSpace, l: usize) -> impl Iterator<Item = Vec<usize>> {
    let n = space.num_states();
    (1..=l.min(n)).flat_map(move |size| (0..n).combinations(size))
}

/// Subfamilies of `s` with fewer than `k` members.
fn small_subfamilies(s: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..k.min(s.len() + 1)).flat_map(move |size| s.iter().copied().combinations(size))
}

/// Every family `S` of at most `l` states either leaves some point uncovered
/// or has a subfamily of fewer than `k` states covering every point.
pub fn check_compactness(space: &ChuSpace, k: usize, l: usize) -> Result<bool> {
    check_kl(k, l)?;
    let full = Mask::ones(space.num_points());
    Ok(families(space, l).all(|s| {
        union(space, &s) != full || small_subfamilies(&s, k).any(|t| union(space, &t) == full)
    }))
}

/// As compactness, but the subfamily only needs to meet every consistent state.
pub fn check_absolute_closure(space: &ChuSpace, k: usize, l: usize) -> Result<bool> {
    check_kl(k, l)?;
    let full = Mask::ones(space.num_points());
    let consistent: Vec<&Mask> = space.columns().iter().filter(|c| !c.is_zero()).collect();
    Ok(families(space, l).all(|s| {
        union(space, &s) != full
            || small_subfamilies(&s, k).any(|t| {
                let u = union(space, &t);
                consistent.iter().all(|c| c.intersects(&u))
            })
    }))
}

/// If every subfamily of fewer than `k` states has a common point, so does the
/// whole family; checked for all families of at most `l` states. Agrees with
/// compactness on spaces closed under complements.
pub fn finite_satisfiability_oracle(space: &ChuSpace, k: usize, l: usize) -> Result<bool> {
    check_kl(k, l)?;
    if !admits_complements(space) {
        return Err(Error::PreconditionFailed("the space does not admit complements".into()));
    }
    Ok(families(space, l).all(|s| {
        !small_subfamilies(&s, k).all(|t| !intersection(space, &t).is_zero()) || !intersection(space, &s).is_zero()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize, parse_formula};
    use crate::transform::enumerate_transforms;

    fn co_singletons() -> ChuSpace {
        ChuSpace::canonical(3, 3, |i, j| i != j)
    }

    #[test]
    fn compactness_examples() {
        let one = ChuSpace::canonical(1, 1, |_, _| true);
        for (k, l) in [(2, 2), (2, 3), (3, 3)] {
            assert!(check_compactness(&one, k, l).unwrap());
            assert!(check_absolute_closure(&one, k, l).unwrap());
        }
        // with k = 1 only the empty subfamily is available, and it covers nothing
        assert!(!check_compactness(&one, 1, 1).unwrap());
        assert!(!check_absolute_closure(&one, 1, 1).unwrap());
        assert!(check_compactness(&co_singletons(), 3, 3).unwrap());
        assert!(!check_compactness(&co_singletons(), 2, 3).unwrap());
        assert!(check_compactness(&ChuSpace::canonical(0, 2, |_, _| false), 1, 2).unwrap());
        assert!(check_compactness(&one, 2, 1).is_err());
    }

    #[test]
    fn oracle_needs_complements() {
        let s = ChuSpace::canonical(2, 1, |i, _| i == 0);
        assert!(matches!(finite_satisfiability_oracle(&s, 1, 1), Err(Error::PreconditionFailed(_))));
        let one = ChuSpace::canonical(1, 2, |_, j| j == 0);
        assert!(finite_satisfiability_oracle(&one, 2, 2).unwrap());
        assert!(check_compactness(&one, 2, 2).unwrap());
        assert!(!finite_satisfiability_oracle(&one, 1, 2).unwrap());
        assert!(!check_compactness(&one, 1, 2).unwrap());
    }

    #[test]
    fn non_injective_map_breaks_inequality() {
        let src = ChuSpace::canonical(2, 0, |_, _| false);
        let tgt = ChuSpace::canonical(1, 0, |_, _| false);
        let t = enumerate_transforms(&src, &tgt, TransformKind::Any).unwrap().remove(0);
        let f = normalize(&parse_formula("!(x = y)").unwrap());
        let report = check_preservation(&f, &t).unwrap();
        let v = report.violation().unwrap();
        assert_ne!(v.x[0], v.x[1]);
        assert!(report.recheck(&f).unwrap());
    }

    #[test]
    fn sentence_reduces_to_one_implication() {
        let src = ChuSpace::canonical(1, 1, |_, _| true);
        let t = ChuTransform::identity(&src);
        let f = parse_formula("A a . E x . R(x,a)").unwrap();
        match check_preservation(&f, &t).unwrap() {
            SearchReport::Preserved(c) => assert_eq!(c.assignments, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn report_json_shape() {
        let src = ChuSpace::canonical(2, 0, |_, _| false);
        let tgt = ChuSpace::canonical(1, 0, |_, _| false);
        let t = enumerate_transforms(&src, &tgt, TransformKind::Any).unwrap().remove(0);
        let f = parse_formula("!(x = y)").unwrap();
        let report = check_preservation(&f, &t).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["outcome"], "VIOLATED");
        assert_eq!(json["lhs"], true);
        assert_eq!(json["rhs"], false);
        let back: SearchReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn parallel_search_matches_sequential() {
        let f = parse_formula("A x . R(x,a)").unwrap();
        let seq = search_counterexample(&f, &SearchOptions::new(TransformKind::Any, 2, 2).jobs(1)).unwrap();
        let par = search_counterexample(&f, &SearchOptions::new(TransformKind::Any, 2, 2).jobs(4)).unwrap();
        assert_eq!(seq, par);
        assert!(!seq.is_preserved());
        assert!(seq.recheck(&f).unwrap());
    }

    #[test]
    fn theory_filter_requires_sentences() {
        let f = parse_formula("R(x,a)").unwrap();
        let opts = SearchOptions::new(TransformKind::Any, 1, 1).theory(vec![f.clone()]);
        assert!(matches!(search_counterexample(&f, &opts), Err(Error::PreconditionFailed(_))));
    }
}

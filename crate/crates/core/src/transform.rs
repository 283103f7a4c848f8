//! Chu transforms: adjoint pairs `f: X -> Y`, `g: B -> A` with
//! `r(x, g(b)) <=> s(f(x), b)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Tuples;
use crate::mask::Mask;
use crate::space::ChuSpace;

/// Default cap on `|Y|^|X| * |A|^|B|` for transform enumeration.
pub const DEFAULT_TRANSFORM_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Any,
    Dense,
    Surjective,
    Restriction,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::Any,
        TransformKind::Dense,
        TransformKind::Surjective,
        TransformKind::Restriction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Any => "any",
            TransformKind::Dense => "dense",
            TransformKind::Surjective => "surjective",
            TransformKind::Restriction => "restriction",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        TransformKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown transform kind `{s}` (expected any, dense, surjective or restriction)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTransform", into = "RawTransform")]
pub struct ChuTransform {
    source: ChuSpace,
    target: ChuSpace,
    f: Vec<usize>,
    g: Vec<usize>,
}

/// JSON shape: maps given by labels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawTransform {
    pub source: ChuSpace,
    pub target: ChuSpace,
    pub f: BTreeMap<String, String>,
    pub g: BTreeMap<String, String>,
}

impl TryFrom<RawTransform> for ChuTransform {
    type Error = Error;

    fn try_from(raw: RawTransform) -> Result<Self> {
        check_adjoint_labels(raw.source, raw.target, &raw.f, &raw.g)
    }
}

impl From<ChuTransform> for RawTransform {
    fn from(t: ChuTransform) -> Self {
        let f = t.f_labels();
        let g = t.g_labels();
        RawTransform {
            source: t.source,
            target: t.target,
            f,
            g,
        }
    }
}

impl ChuTransform {
    pub fn source(&self) -> &ChuSpace {
        &self.source
    }

    pub fn target(&self) -> &ChuSpace {
        &self.target
    }

    /// Point map, by index.
    pub fn f(&self) -> &[usize] {
        &self.f
    }

    /// State map, by index.
    pub fn g(&self) -> &[usize] {
        &self.g
    }

    pub fn f_labels(&self) -> BTreeMap<String, String> {
        self.f
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.source.points()[x].clone(), self.target.points()[y].clone()))
            .collect()
    }

    pub fn g_labels(&self) -> BTreeMap<String, String> {
        self.g
            .iter()
            .enumerate()
            .map(|(b, &a)| (self.target.states()[b].clone(), self.source.states()[a].clone()))
            .collect()
    }

    pub fn identity(space: &ChuSpace) -> ChuTransform {
        ChuTransform {
            source: space.clone(),
            target: space.clone(),
            f: (0..space.num_points()).collect(),
            g: (0..space.num_states()).collect(),
        }
    }

    pub(crate) fn new_unchecked(source: ChuSpace, target: ChuSpace, f: Vec<usize>, g: Vec<usize>) -> ChuTransform {
        debug_assert!(adjoint_violation(&source, &target, &f, &g).is_none());
        ChuTransform { source, target, f, g }
    }
}

fn adjoint_violation(source: &ChuSpace, target: &ChuSpace, f: &[usize], g: &[usize]) -> Option<(usize, usize)> {
    (0..source.num_points())
        .flat_map(|x| (0..target.num_states()).map(move |b| (x, b)))
        .find(|&(x, b)| source.related(x, g[b]) != target.related(f[x], b))
}

/// Validates an index-based pair of maps.
pub fn check_adjoint(source: ChuSpace, target: ChuSpace, f: Vec<usize>, g: Vec<usize>) -> Result<ChuTransform> {
    if f.len() != source.num_points() {
        return Err(Error::IllTypedMap(format!(
            "f has {} entries but the source has {} points",
            f.len(),
            source.num_points()
        )));
    }
    if g.len() != target.num_states() {
        return Err(Error::IllTypedMap(format!(
            "g has {} entries but the target has {} states",
            g.len(),
            target.num_states()
        )));
    }
    if let Some(&y) = f.iter().find(|&&y| y >= target.num_points()) {
        return Err(Error::IllTypedMap(format!("f value {y} is not a target point")));
    }
    if let Some(&a) = g.iter().find(|&&a| a >= source.num_states()) {
        return Err(Error::IllTypedMap(format!("g value {a} is not a source state")));
    }
    if let Some((x, b)) = adjoint_violation(&source, &target, &f, &g) {
        return Err(Error::NotAdjoint {
            point: source.points()[x].clone(),
            state: target.states()[b].clone(),
        });
    }
    Ok(ChuTransform { source, target, f, g })
}

/// Validates a pair of maps given by labels; both maps must be total.
pub fn check_adjoint_labels(
    source: ChuSpace,
    target: ChuSpace,
    f: &BTreeMap<String, String>,
    g: &BTreeMap<String, String>,
) -> Result<ChuTransform> {
    let f_idx = resolve_map(f, source.points(), target.points(), "f", "source point", "target point")?;
    let g_idx = resolve_map(g, target.states(), source.states(), "g", "target state", "source state")?;
    check_adjoint(source, target, f_idx, g_idx)
}

fn resolve_map(
    map: &BTreeMap<String, String>,
    domain: &[String],
    codomain: &[String],
    name: &str,
    dom_sort: &str,
    cod_sort: &str,
) -> Result<Vec<usize>> {
    if let Some(k) = map.keys().find(|k| !domain.contains(k)) {
        return Err(Error::IllTypedMap(format!("{name} is defined on `{k}`, which is not a {dom_sort}")));
    }
    domain
        .iter()
        .map(|d| {
            let v = map
                .get(d)
                .ok_or_else(|| Error::IllTypedMap(format!("{name} is undefined on {dom_sort} `{d}`")))?;
            codomain
                .iter()
                .position(|c| c == v)
                .ok_or_else(|| Error::IllTypedMap(format!("{name} sends `{d}` to `{v}`, which is not a {cod_sort}")))
        })
        .collect()
}

fn image_mask(target: &ChuSpace, f: &[usize]) -> Mask {
    Mask::from_indices(target.num_points(), f.iter().copied())
}

fn dense_map(target: &ChuSpace, f: &[usize]) -> bool {
    let image = image_mask(target, f);
    target.columns().iter().all(|c| c.is_zero() || c.intersects(&image))
}

fn surjective_map(target: &ChuSpace, f: &[usize]) -> bool {
    image_mask(target, f).is_full()
}

fn restriction_maps(source: &ChuSpace, target: &ChuSpace, f: &[usize], g: &[usize]) -> bool {
    source.num_points() == target.num_points()
        && f.iter().enumerate().all(|(x, &y)| source.points()[x] == target.points()[y])
        && g.iter().enumerate().all(|(b, &a)| target.states()[b] == source.states()[a])
}

/// Every target state with a related point has one in the image of `f`.
pub fn is_dense(t: &ChuTransform) -> bool {
    dense_map(&t.target, &t.f)
}

pub fn is_surjective_transform(t: &ChuTransform) -> bool {
    surjective_map(&t.target, &t.f)
}

/// Same points with `f` the identity, and `g` the inclusion of fewer states.
pub fn is_restriction_second_sort(t: &ChuTransform) -> bool {
    restriction_maps(&t.source, &t.target, &t.f, &t.g)
}

pub fn is_kind(t: &ChuTransform, kind: TransformKind) -> bool {
    match kind {
        TransformKind::Any => true,
        TransformKind::Dense => is_dense(t),
        TransformKind::Surjective => is_surjective_transform(t),
        TransformKind::Restriction => is_restriction_second_sort(t),
    }
}

/// `(f2 . f1, g1 . g2)`.
pub fn compose(t1: &ChuTransform, t2: &ChuTransform) -> Result<ChuTransform> {
    if t1.target != t2.source {
        return Err(Error::SpaceMismatch);
    }
    let f = t1.f.iter().map(|&y| t2.f[y]).collect();
    let g = t2.g.iter().map(|&b| t1.g[b]).collect();
    check_adjoint(t1.source.clone(), t2.target.clone(), f, g)
}

/// Size of the naive `(f, g)` search space, `|Y|^|X| * |A|^|B|`.
pub fn map_pair_count(source: &ChuSpace, target: &ChuSpace) -> u128 {
    let fs = (target.num_points() as u128).saturating_pow(source.num_points() as u32);
    let gs = (source.num_states() as u128).saturating_pow(target.num_states() as u32);
    fs.saturating_mul(gs)
}

/// Precomputed lookup from column pattern to the source states having it.
pub(crate) struct ColumnIndex {
    by_column: HashMap<Mask, Vec<usize>>,
}

impl ColumnIndex {
    pub(crate) fn new(source: &ChuSpace) -> ColumnIndex {
        let mut by_column: HashMap<Mask, Vec<usize>> = HashMap::new();
        for (a, c) in source.columns().iter().enumerate() {
            by_column.entry(c.clone()).or_default().push(a);
        }
        ColumnIndex { by_column }
    }
}

/// Calls `visit(f, g)` for every adjoint pair of the given kind, in
/// lexicographic order of `(f, g)`, stopping early on `Break`.
pub(crate) fn visit_adjoint<T>(
    source: &ChuSpace,
    target: &ChuSpace,
    index: &ColumnIndex,
    kind: TransformKind,
    mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<T>,
) -> Option<T> {
    let (nx, nb) = (source.num_points(), target.num_states());
    'maps: for f in Tuples::new(target.num_points(), nx) {
        let ok = match kind {
            TransformKind::Any => true,
            TransformKind::Dense => dense_map(target, &f),
            TransformKind::Surjective | TransformKind::Restriction => surjective_map(target, &f),
        };
        if !ok {
            continue;
        }
        // g(b) must be a source state whose column is the pullback of b
        let mut choices: Vec<&Vec<usize>> = Vec::with_capacity(nb);
        for b in 0..nb {
            let pulled = Mask::from_bools((0..nx).map(|x| target.related(f[x], b)));
            match index.by_column.get(&pulled) {
                Some(list) => choices.push(list),
                None => continue 'maps,
            }
        }
        let mut pos = vec![0usize; nb];
        let mut g: Vec<usize> = choices.iter().map(|c| c[0]).collect();
        loop {
            if kind != TransformKind::Restriction || restriction_maps(source, target, &f, &g) {
                if let ControlFlow::Break(out) = visit(&f, &g) {
                    return Some(out);
                }
            }
            let mut i = nb;
            loop {
                if i == 0 {
                    continue 'maps;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < choices[i].len() {
                    g[i] = choices[i][pos[i]];
                    break;
                }
                pos[i] = 0;
                g[i] = choices[i][0];
            }
        }
    }
    None
}

/// Every adjoint pair of the requested kind, lexicographic in `(f, g)`.
pub fn enumerate_transforms(source: &ChuSpace, target: &ChuSpace, kind: TransformKind) -> Result<Vec<ChuTransform>> {
    enumerate_transforms_with_budget(source, target, kind, DEFAULT_TRANSFORM_BUDGET)
}

pub fn enumerate_transforms_with_budget(
    source: &ChuSpace,
    target: &ChuSpace,
    kind: TransformKind,
    budget: u128,
) -> Result<Vec<ChuTransform>> {
    let requested = map_pair_count(source, target);
    if requested > budget {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    let index = ColumnIndex::new(source);
    let mut out = Vec::new();
    visit_adjoint::<()>(source, target, &index, kind, |f, g| {
        out.push(ChuTransform::new_unchecked(
            source.clone(),
            target.clone(),
            f.to_vec(),
            g.to_vec(),
        ));
        ControlFlow::Continue(())
    });
    Ok(out)
}

//! Posets as `<P, <=, P>` and ultrafilters as `<U, ⊇, U>`, with adjoint pairs
//! and Rudin-Keisler reductions between them.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Tuples;
use crate::labels::{all_subsets, canonical_order, index_of, reject_chars, reject_duplicates, set_label};
use crate::space::ChuSpace;
use crate::transform::{check_adjoint, ChuTransform};

/// Suffix that turns an element label into its state label.
pub const STATE_SUFFIX: char = '\'';

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPoset", into = "RawPoset")]
pub struct Poset {
    carrier: Vec<String>,
    leq: Vec<Vec<bool>>,
}

/// JSON shape: the order as `[a, b]` pairs meaning `a <= b`; reflexive pairs
/// are added by the loader.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPoset {
    pub carrier: Vec<String>,
    pub order: Vec<(String, String)>,
}

impl TryFrom<RawPoset> for Poset {
    type Error = Error;

    fn try_from(raw: RawPoset) -> Result<Self> {
        let n = raw.carrier.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &raw.order {
            leq[index_of(&raw.carrier, a)?][index_of(&raw.carrier, b)?] = true;
        }
        Poset::new(raw.carrier, leq)
    }
}

impl From<Poset> for RawPoset {
    fn from(p: Poset) -> Self {
        let n = p.carrier.len();
        let order = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && p.leq[i][j])
            .map(|(i, j)| (p.carrier[i].clone(), p.carrier[j].clone()))
            .collect();
        RawPoset {
            carrier: p.carrier,
            order,
        }
    }
}

fn check_element_labels(carrier: &[String]) -> Result<()> {
    reject_duplicates(carrier, "element")?;
    if let Some(l) = carrier.iter().find(|l| l.ends_with(STATE_SUFFIX)) {
        return Err(Error::InvalidLabel {
            label: l.clone(),
            reason: "a trailing `'` marks state copies",
        });
    }
    Ok(())
}

impl Poset {
    /// Validates the order axioms; `leq[i][j]` means `carrier[i] <= carrier[j]`.
    pub fn new(carrier: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Poset> {
        check_element_labels(&carrier)?;
        let n = carrier.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                rows: leq.len(),
                cols: leq.first().map_or(0, Vec::len),
                points: n,
                states: n,
            });
        }
        if let Some(i) = (0..n).find(|&i| !leq[i][i]) {
            return Err(Error::NotReflexive(carrier[i].clone()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(carrier[i].clone(), carrier[j].clone()));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::NotTransitive(
                            carrier[i].clone(),
                            carrier[j].clone(),
                            carrier[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(Poset { carrier, leq })
    }

    /// Elements `0..n` ordered by `leq(i, j)`.
    pub fn on_indices(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        let m = (0..n).map(|i| (0..n).map(|j| leq(i, j)).collect()).collect();
        Poset::new((0..n).map(|i| i.to_string()).collect(), m)
    }

    pub fn chain(n: usize) -> Poset {
        Poset::on_indices(n, |i, j| i <= j).expect("chain")
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::on_indices(n, |i, j| i == j).expect("antichain")
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }
}

/// `<P, <=, P>`; state labels carry a trailing `'`.
pub fn poset_to_chu(p: &Poset) -> ChuSpace {
    let states = p.carrier.iter().map(|l| format!("{l}{STATE_SUFFIX}")).collect();
    ChuSpace::from_matrix_unchecked(p.carrier.clone(), states, |i, j| p.leq[i][j])
}

/// Every partial order on `0..n`, by bitmask of the off-diagonal entries.
pub fn all_posets(n: usize) -> Vec<Poset> {
    assert!(n <= 4, "poset enumeration is limited to 4 elements");
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    (0u64..1 << cells.len())
        .filter_map(|bits| {
            let mut leq = vec![vec![false; n]; n];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
            }
            for (c, &(i, j)) in cells.iter().enumerate() {
                leq[i][j] = bits >> c & 1 == 1;
            }
            Poset::new((0..n).map(|i| i.to_string()).collect(), leq).ok()
        })
        .collect()
}

/// The four conditions for `f: P -> Q`, `g: Q -> P` to form an adjoint pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchmidtReport {
    pub f_monotone: bool,
    pub g_monotone: bool,
    /// `p <= g(f(p))` for all `p`.
    pub unit: bool,
    /// `f(g(q)) <= q` for all `q`.
    pub counit: bool,
}

impl SchmidtReport {
    pub fn all(&self) -> bool {
        self.f_monotone && self.g_monotone && self.unit && self.counit
    }
}

pub fn schmidt_conditions(p: &Poset, q: &Poset, f: &[usize], g: &[usize]) -> SchmidtReport {
    let monotone = |dom: &Poset, cod: &Poset, h: &[usize]| {
        (0..dom.len()).all(|a| (0..dom.len()).all(|b| !dom.leq[a][b] || cod.leq[h[a]][h[b]]))
    };
    SchmidtReport {
        f_monotone: monotone(p, q, f),
        g_monotone: monotone(q, p, g),
        unit: (0..p.len()).all(|a| p.leq[a][g[f[a]]]),
        counit: (0..q.len()).all(|b| q.leq[f[g[b]]][b]),
    }
}

/// An ultrafilter over a finite index set. Members are kept in canonical
/// order: by size, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawUltrafilter", into = "RawUltrafilter")]
pub struct Ultrafilter {
    index: Vec<String>,
    family: Vec<BTreeSet<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawUltrafilter {
    #[serde(rename = "I")]
    pub index: Vec<String>,
    pub family: Vec<Vec<String>>,
}

impl TryFrom<RawUltrafilter> for Ultrafilter {
    type Error = Error;

    fn try_from(raw: RawUltrafilter) -> Result<Self> {
        ultrafilter_validate(raw.index, raw.family)
    }
}

impl From<Ultrafilter> for RawUltrafilter {
    fn from(u: Ultrafilter) -> Self {
        let family = u
            .family
            .iter()
            .map(|s| s.iter().map(|&i| u.index[i].clone()).collect())
            .collect();
        RawUltrafilter {
            index: u.index,
            family,
        }
    }
}

fn check_index_labels(index: &[String]) -> Result<()> {
    reject_duplicates(index, "index")?;
    reject_chars(index, &['{', '}', ',', STATE_SUFFIX], "set labels are built from `{`, `}`, `,` and `'`")
}

pub fn ultrafilter_validate(index: Vec<String>, family: Vec<Vec<String>>) -> Result<Ultrafilter> {
    check_index_labels(&index)?;
    let sets = family
        .iter()
        .map(|s| s.iter().map(|l| index_of(&index, l)).collect::<Result<BTreeSet<usize>>>())
        .collect::<Result<Vec<_>>>()?;
    Ultrafilter::from_sets(index, sets)
}

impl Ultrafilter {
    pub fn from_sets(index: Vec<String>, mut family: Vec<BTreeSet<usize>>) -> Result<Ultrafilter> {
        canonical_order(&mut family);
        family.dedup();
        let n = index.len();
        let label = |s: &BTreeSet<usize>| set_label(&index, s);
        let members: BTreeSet<&BTreeSet<usize>> = family.iter().collect();
        if family.iter().any(BTreeSet::is_empty) {
            return Err(Error::NotProper);
        }
        for s in &family {
            for t in all_subsets(n) {
                if s.is_subset(&t) && !members.contains(&t) {
                    return Err(Error::NotUpwardClosed(format!("{} ⊆ {} but {} is missing", label(s), label(&t), label(&t))));
                }
            }
        }
        for (i, a) in family.iter().enumerate() {
            for b in &family[i + 1..] {
                let meet: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !members.contains(&meet) {
                    return Err(Error::NotIntersectionClosed(format!("{} ∩ {}", label(a), label(b))));
                }
            }
        }
        for x in all_subsets(n) {
            let rest: BTreeSet<usize> = (0..n).filter(|i| !x.contains(i)).collect();
            if members.contains(&x) == members.contains(&rest) {
                return Err(Error::NotUltra(label(&x)));
            }
        }
        Ok(Ultrafilter { index, family })
    }

    pub fn index(&self) -> &[String] {
        &self.index
    }

    pub fn family(&self) -> &[BTreeSet<usize>] {
        &self.family
    }

    pub fn contains(&self, set: &BTreeSet<usize>) -> bool {
        self.family.contains(set)
    }

    /// The generating point, when the ultrafilter is principal.
    pub fn principal_point(&self) -> Option<usize> {
        (0..self.index.len()).find(|&i| self.contains(&BTreeSet::from([i])))
    }

    fn member_index(&self, set: &BTreeSet<usize>) -> Option<usize> {
        self.family.iter().position(|s| s == set)
    }
}

/// `{X ⊆ I : i ∈ X}`.
pub fn principal_ultrafilter(index: Vec<String>, i: usize) -> Result<Ultrafilter> {
    check_index_labels(&index)?;
    if i >= index.len() {
        return Err(Error::UnknownElement(i.to_string()));
    }
    let family = all_subsets(index.len()).filter(|s| s.contains(&i)).collect();
    Ultrafilter::from_sets(index, family)
}

/// Index labels `0..n`.
pub fn numeric_index(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Every ultrafilter over `0..n`, found by testing every family of subsets.
pub fn all_ultrafilters(n: usize) -> Vec<Ultrafilter> {
    assert!(n <= 4, "ultrafilter enumeration is limited to 4 indices");
    let subsets: Vec<BTreeSet<usize>> = all_subsets(n).collect();
    (0u64..1 << subsets.len())
        .filter_map(|bits| {
            let family = (0..subsets.len()).filter(|i| bits >> i & 1 == 1).map(|i| subsets[i].clone()).collect();
            Ultrafilter::from_sets(numeric_index(n), family).ok()
        })
        .collect()
}

/// The members ordered by reverse inclusion, as a poset.
pub fn ultrafilter_poset(u: &Ultrafilter) -> Poset {
    let carrier = u.family.iter().map(|s| set_label(&u.index, s)).collect();
    let leq = u
        .family
        .iter()
        .map(|a| u.family.iter().map(|b| a.is_superset(b)).collect())
        .collect();
    Poset::new(carrier, leq).expect("reverse inclusion is a partial order")
}

/// `<U, ⊇, U>`, built as the poset encoding of reverse inclusion.
pub fn ultrafilter_to_chu(u: &Ultrafilter) -> ChuSpace {
    poset_to_chu(&ultrafilter_poset(u))
}

fn preimage(h: &[usize], x: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..h.len()).filter(|&j| x.contains(&h[j])).collect()
}

fn image(h: &[usize], y: &BTreeSet<usize>) -> BTreeSet<usize> {
    y.iter().map(|&j| h[j]).collect()
}

fn check_h(u: &Ultrafilter, v: &Ultrafilter, h: &[usize]) -> Result<()> {
    if h.len() != v.index.len() || h.iter().any(|&i| i >= u.index.len()) {
        return Err(Error::IllTypedMap("h must send every index of J to an index of I".into()));
    }
    Ok(())
}

/// `X ∈ U ⟺ h⁻¹[X] ∈ V` for every `X ⊆ I`, with `h: J -> I`.
pub fn rk_reduce_check(u: &Ultrafilter, v: &Ultrafilter, h: &[usize]) -> Result<bool> {
    check_h(u, v, h)?;
    Ok(all_subsets(u.index.len()).all(|x| u.contains(&x) == v.contains(&preimage(h, &x))))
}

/// As [`rk_reduce_check`] for `h` defined only on a member `Y` of `V`; the
/// rest of `J` is sent to `fill`.
pub fn rk_reduce_check_partial(
    u: &Ultrafilter,
    v: &Ultrafilter,
    h: &BTreeMap<usize, usize>,
    fill: usize,
) -> Result<bool> {
    let y: BTreeSet<usize> = h.keys().copied().collect();
    if !v.contains(&y) {
        return Err(Error::PreconditionFailed(format!(
            "the domain {} of h is not a member of V",
            set_label(&v.index, &y)
        )));
    }
    let total: Vec<usize> = (0..v.index.len()).map(|j| h.get(&j).copied().unwrap_or(fill)).collect();
    rk_reduce_check(u, v, &total)
}

/// The transform `X ↦ h⁻¹[X]`, `Y ↦ h[Y]` from `<U, ⊇, U>` to `<V, ⊇, V>`.
pub fn transform_from_rk(u: &Ultrafilter, v: &Ultrafilter, h: &[usize]) -> Result<ChuTransform> {
    if !rk_reduce_check(u, v, h)? {
        return Err(Error::RkCheckFailed);
    }
    let f = u
        .family
        .iter()
        .map(|x| v.member_index(&preimage(h, x)).expect("reduction keeps preimages in V"))
        .collect();
    let g = v
        .family
        .iter()
        .map(|y| {
            let img = image(h, y);
            u.member_index(&img)
                .ok_or_else(|| Error::ImageNotInFilter(set_label(&u.index, &img)))
        })
        .collect::<Result<Vec<usize>>>()?;
    check_adjoint(ultrafilter_to_chu(u), ultrafilter_to_chu(v), f, g)
}

/// A reduction `h: J -> I` read off a transform between the encodings.
///
/// Over a finite index set `U` is principal at some `i`, and the constant map
/// to `i` is a reduction. The general construction is [`nonprincipal_extraction`].
pub fn rk_from_transform(u: &Ultrafilter, v: &Ultrafilter, t: &ChuTransform) -> Result<Vec<usize>> {
    if *t.source() != ultrafilter_to_chu(u) || *t.target() != ultrafilter_to_chu(v) {
        return Err(Error::NotUltrafilterEncoding);
    }
    if let Some(i) = u.principal_point() {
        return Ok(vec![i; v.index.len()]);
    }
    let n = u.index.len();
    let f = |x: &BTreeSet<usize>| -> BTreeSet<usize> {
        let k = u.member_index(x).expect("co-singletons are members");
        v.family[t.f()[k]].clone()
    };
    let (_, h) = nonprincipal_extraction(n, v.index.len(), |alpha| {
        let rest: BTreeSet<usize> = (0..n).filter(|&i| i != alpha).collect();
        u.contains(&rest).then(|| f(&rest))
    })?;
    Ok((0..v.index.len()).map(|j| h.get(&j).copied().unwrap_or(0)).collect())
}

/// `Y = J ∖ ⋂_α f(I ∖ {α})` and `h(y) = min {α : y ∉ f(I ∖ {α})}`.
///
/// `f_co_singleton(α)` gives `f(I ∖ {α})`, or `None` when `I ∖ {α}` is not a
/// member, in which case the construction does not apply.
pub fn nonprincipal_extraction(
    index_len: usize,
    j_len: usize,
    f_co_singleton: impl Fn(usize) -> Option<BTreeSet<usize>>,
) -> Result<(BTreeSet<usize>, BTreeMap<usize, usize>)> {
    let images = (0..index_len)
        .map(|alpha| {
            f_co_singleton(alpha).ok_or_else(|| {
                Error::PreconditionFailed(format!("I ∖ {{{alpha}}} is not a member of the ultrafilter"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let y: BTreeSet<usize> = (0..j_len).filter(|j| !images.iter().all(|img| img.contains(j))).collect();
    let h = y
        .iter()
        .map(|&j| (j, (0..index_len).find(|&a| !images[a].contains(&j)).unwrap()))
        .collect();
    Ok((y, h))
}

/// A bijection `π: I -> J` with `V = {π[X] : X ∈ U}`, if one exists.
pub fn rk_isomorphism_check(u: &Ultrafilter, v: &Ultrafilter) -> Option<Vec<usize>> {
    let n = u.index.len();
    if n != v.index.len() {
        return None;
    }
    (0..n).permutations(n).find(|pi| {
        let mapped: BTreeSet<BTreeSet<usize>> = u.family.iter().map(|x| image(pi, x)).collect();
        mapped == v.family.iter().cloned().collect()
    })
}

/// Every `h: J -> I` that is a reduction, by brute force.
pub fn rk_reductions(u: &Ultrafilter, v: &Ultrafilter) -> Vec<Vec<usize>> {
    Tuples::new(u.index.len(), v.index.len())
        .filter(|h| rk_reduce_check(u, v, h).unwrap_or(false))
        .collect()
}

//! Finite topologies encoded as Chu spaces `<X, in, opens>`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{all_subsets, canonical_order, index_of, reject_chars, reject_duplicates, set_label};
use crate::space::ChuSpace;
use crate::transform::{check_adjoint, ChuTransform};

const SET_SYNTAX: [char; 3] = ['{', '}', ','];

/// A topology on a finite carrier. Opens are kept in canonical order: by
/// size, then lexicographically by member indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTopology", into = "RawTopology")]
pub struct Topology {
    carrier: Vec<String>,
    opens: Vec<BTreeSet<usize>>,
}

/// JSON shape: `{"carrier": [...], "opens": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTopology {
    pub carrier: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

impl TryFrom<RawTopology> for Topology {
    type Error = Error;

    fn try_from(raw: RawTopology) -> Result<Self> {
        topology_validate(raw.carrier, raw.opens)
    }
}

impl From<Topology> for RawTopology {
    fn from(t: Topology) -> Self {
        let opens = t
            .opens
            .iter()
            .map(|o| o.iter().map(|&i| t.carrier[i].clone()).collect())
            .collect();
        RawTopology {
            carrier: t.carrier,
            opens,
        }
    }
}

fn resolve_family(carrier: &[String], family: &[Vec<String>]) -> Result<Vec<BTreeSet<usize>>> {
    let mut sets: Vec<BTreeSet<usize>> = family
        .iter()
        .map(|o| o.iter().map(|l| index_of(carrier, l)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    canonical_order(&mut sets);
    sets.dedup();
    Ok(sets)
}

fn check_carrier(carrier: &[String]) -> Result<()> {
    reject_duplicates(carrier, "point")?;
    reject_chars(carrier, &SET_SYNTAX, "set labels are built from `{`, `}` and `,`")
}

/// Checks the topology axioms on labelled data.
pub fn topology_validate(carrier: Vec<String>, opens: Vec<Vec<String>>) -> Result<Topology> {
    check_carrier(&carrier)?;
    let opens = resolve_family(&carrier, &opens)?;
    Topology::from_sets(carrier, opens)
}

impl Topology {
    /// Validates a family of index sets over the given carrier.
    pub fn from_sets(carrier: Vec<String>, mut opens: Vec<BTreeSet<usize>>) -> Result<Topology> {
        canonical_order(&mut opens);
        opens.dedup();
        let label = |s: &BTreeSet<usize>| set_label(&carrier, s);
        let full: BTreeSet<usize> = (0..carrier.len()).collect();
        if !opens.contains(&BTreeSet::new()) {
            return Err(Error::MissingEmpty);
        }
        if !opens.contains(&full) {
            return Err(Error::MissingCarrier);
        }
        let members: BTreeSet<&BTreeSet<usize>> = opens.iter().collect();
        for (i, a) in opens.iter().enumerate() {
            for b in &opens[i + 1..] {
                if !members.contains(&a.intersection(b).copied().collect::<BTreeSet<usize>>()) {
                    return Err(Error::NotClosedUnderIntersection(label(a), label(b)));
                }
            }
        }
        for (i, a) in opens.iter().enumerate() {
            for b in &opens[i + 1..] {
                if !members.contains(&a.union(b).copied().collect::<BTreeSet<usize>>()) {
                    return Err(Error::NotClosedUnderUnion(label(a), label(b)));
                }
            }
        }
        Ok(Topology { carrier, opens })
    }

    /// Carrier `0..n` with the given opens.
    pub fn on_indices(n: usize, opens: Vec<BTreeSet<usize>>) -> Result<Topology> {
        Topology::from_sets((0..n).map(|i| i.to_string()).collect(), opens)
    }

    pub fn discrete(n: usize) -> Topology {
        Topology::on_indices(n, all_subsets(n).collect()).expect("powerset is a topology")
    }

    pub fn indiscrete(n: usize) -> Topology {
        Topology::on_indices(n, vec![BTreeSet::new(), (0..n).collect()]).expect("indiscrete topology")
    }

    /// `{}`, `{1}`, `{0,1}` on `0, 1`.
    pub fn sierpinski() -> Topology {
        Topology::on_indices(2, vec![BTreeSet::new(), BTreeSet::from([1]), BTreeSet::from([0, 1])])
            .expect("Sierpinski space")
    }

    /// The empty set and every set containing `p`.
    pub fn particular_point(n: usize, p: usize) -> Topology {
        let opens = all_subsets(n).filter(|s| s.is_empty() || s.contains(&p)).collect();
        Topology::on_indices(n, opens).expect("particular point topology")
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn opens(&self) -> &[BTreeSet<usize>] {
        &self.opens
    }

    pub fn open_label(&self, i: usize) -> String {
        set_label(&self.carrier, &self.opens[i])
    }

    pub fn open_index(&self, set: &BTreeSet<usize>) -> Option<usize> {
        self.opens.iter().position(|o| o == set)
    }
}

/// `<X, in, opens>` with opens labelled like `{0,1}`.
pub fn topology_to_chu(t: &Topology) -> ChuSpace {
    family_to_chu(&t.carrier, &t.opens)
}

fn family_to_chu(carrier: &[String], family: &[BTreeSet<usize>]) -> ChuSpace {
    let states = family.iter().map(|s| set_label(carrier, s)).collect();
    ChuSpace::from_matrix_unchecked(carrier.to_vec(), states, |i, j| family[j].contains(&i))
}

/// `<X, in, basis>` after checking that the family is a basis: it covers the
/// carrier and each pairwise intersection is a union of members.
pub fn basis_to_chu(carrier: Vec<String>, basis: Vec<Vec<String>>) -> Result<ChuSpace> {
    check_carrier(&carrier)?;
    let sets = resolve_family(&carrier, &basis)?;
    let covered: BTreeSet<usize> = sets.iter().flatten().copied().collect();
    if covered.len() != carrier.len() {
        let missing = (0..carrier.len()).find(|i| !covered.contains(i)).unwrap();
        return Err(Error::InvalidBasis(format!("`{}` is not covered", carrier[missing])));
    }
    for a in &sets {
        for b in &sets {
            let meet: BTreeSet<usize> = a.intersection(b).copied().collect();
            for &x in &meet {
                if !sets.iter().any(|c| c.contains(&x) && c.is_subset(&meet)) {
                    return Err(Error::InvalidBasis(format!(
                        "no member contains `{}` inside {} ∩ {}",
                        carrier[x],
                        set_label(&carrier, a),
                        set_label(&carrier, b)
                    )));
                }
            }
        }
    }
    Ok(family_to_chu(&carrier, &sets))
}

/// Distinct points are told apart by some open.
pub fn is_t0(t: &Topology) -> bool {
    let n = t.carrier.len();
    (0..n).all(|x| (x + 1..n).all(|y| t.opens.iter().any(|o| o.contains(&x) != o.contains(&y))))
}

/// Every topology on `0..n`, in order of the bitmask of their opens.
pub fn all_topologies(n: usize) -> Vec<Topology> {
    assert!(n <= 4, "topology enumeration is limited to 4 points");
    let subsets: Vec<BTreeSet<usize>> = all_subsets(n).collect();
    let full = subsets.len() - 1;
    // the empty set and the carrier are forced, the rest is free
    let free: Vec<usize> = (1..full).collect();
    let mut out = Vec::new();
    for bits in 0u64..1 << free.len() {
        let mut opens = vec![subsets[0].clone(), subsets[full].clone()];
        opens.extend(free.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &s)| subsets[s].clone()));
        if let Ok(t) = Topology::on_indices(n, opens) {
            out.push(t);
        }
    }
    out
}

fn preimage(f: &[usize], set: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..f.len()).filter(|&x| set.contains(&f[x])).collect()
}

pub fn is_continuous(source: &Topology, target: &Topology, f: &[usize]) -> bool {
    target.opens.iter().all(|o| source.open_index(&preimage(f, o)).is_some())
}

/// For a continuous `f`, the transform `(f, preimage under f)`.
pub fn continuity_to_transform(source: &Topology, target: &Topology, f: &[usize]) -> Result<ChuTransform> {
    if f.len() != source.carrier.len() || f.iter().any(|&y| y >= target.carrier.len()) {
        return Err(Error::IllTypedMap("f must send every source point to a target point".into()));
    }
    let g = target
        .opens
        .iter()
        .enumerate()
        .map(|(b, o)| {
            source
                .open_index(&preimage(f, o))
                .ok_or_else(|| Error::NotContinuous(target.open_label(b)))
        })
        .collect::<Result<Vec<usize>>>()?;
    check_adjoint(topology_to_chu(source), topology_to_chu(target), f.to_vec(), g)
}

/// The restriction from `t` to the coarser topology `sub` on the same carrier.
pub fn coarsen_restriction(t: &Topology, sub: Vec<BTreeSet<usize>>) -> Result<ChuTransform> {
    let coarse =
        Topology::from_sets(t.carrier.clone(), sub).map_err(|e| Error::NotATopology(e.to_string()))?;
    let g = (0..coarse.opens.len())
        .map(|b| {
            t.open_index(&coarse.opens[b])
                .ok_or_else(|| Error::NotCoarser(coarse.open_label(b)))
        })
        .collect::<Result<Vec<usize>>>()?;
    check_adjoint(
        topology_to_chu(t),
        topology_to_chu(&coarse),
        (0..t.carrier.len()).collect(),
        g,
    )
}

/// Families of at most `l` opens that cover the carrier (bitmasks over opens).
fn covers(t: &Topology, l: usize) -> Vec<Vec<&BTreeSet<usize>>> {
    let n = t.carrier.len();
    let m = t.opens.len();
    (1u64..1 << m)
        .filter(|bits| (bits.count_ones() as usize) <= l)
        .map(|bits| (0..m).filter(|i| bits >> i & 1 == 1).map(|i| &t.opens[i]).collect::<Vec<_>>())
        .filter(|fam| fam.iter().flat_map(|s| s.iter()).collect::<BTreeSet<_>>().len() == n)
        .collect()
}

fn sub_families<'a>(fam: &[&'a BTreeSet<usize>], below: usize) -> Vec<Vec<&'a BTreeSet<usize>>> {
    (0u64..1 << fam.len())
        .filter(|bits| (bits.count_ones() as usize) < below)
        .map(|bits| (0..fam.len()).filter(|i| bits >> i & 1 == 1).map(|i| fam[i]).collect())
        .collect()
}

fn union_of(fam: &[&BTreeSet<usize>]) -> BTreeSet<usize> {
    fam.iter().flat_map(|s| s.iter().copied()).collect()
}

/// Every open cover with at most `l` members has a subcover with fewer than `k`.
pub fn cover_compactness_oracle(t: &Topology, k: usize, l: usize) -> bool {
    let n = t.carrier.len();
    covers(t, l)
        .iter()
        .all(|c| sub_families(c, k).iter().any(|s| union_of(s).len() == n))
}

/// Every open cover with at most `l` members has fewer than `k` members whose
/// union is dense, i.e. meets every nonempty open.
pub fn dense_union_oracle(t: &Topology, k: usize, l: usize) -> bool {
    covers(t, l).iter().all(|c| {
        sub_families(c, k).iter().any(|s| {
            let u = union_of(s);
            t.opens.iter().all(|o| o.is_empty() || !o.is_disjoint(&u))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{admits_complements, is_extensional, is_separated, is_topological_system};
    use crate::transform::is_restriction_second_sort;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn sets(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter().map(|s| strs(s)).collect()
    }

    #[test]
    fn validation() {
        let s = topology_validate(strs(&["0", "1"]), sets(&[&[], &["1"], &["0", "1"]])).unwrap();
        assert_eq!(s, Topology::sierpinski());
        assert_eq!(
            topology_validate(strs(&["0", "1"]), sets(&[&[], &["0"], &["1"]])),
            Err(Error::MissingCarrier)
        );
        assert_eq!(
            topology_validate(strs(&["0", "1"]), sets(&[&["0", "1"]])),
            Err(Error::MissingEmpty)
        );
        assert!(matches!(
            topology_validate(strs(&["0", "1", "2"]), sets(&[&[], &["0", "1"], &["1", "2"], &["0", "1", "2"]])),
            Err(Error::NotClosedUnderIntersection(..))
        ));
        assert!(matches!(
            topology_validate(strs(&["0", "1", "2"]), sets(&[&[], &["0"], &["1"], &["0", "1", "2"]])),
            Err(Error::NotClosedUnderUnion(..))
        ));
        assert!(
            topology_validate(strs(&["p", "q", "r"]), sets(&[&[], &["p"], &["p", "q"], &["p", "r"], &["p", "q", "r"]])).is_ok()
        );
        assert!(matches!(
            topology_validate(strs(&["{a}"]), sets(&[&[], &["{a}"]])),
            Err(Error::InvalidLabel { .. })
        ));
        assert_eq!(
            topology_validate(strs(&["0"]), sets(&[&[], &["9"]])),
            Err(Error::UnknownElement("9".into()))
        );
    }

    #[test]
    fn encodings() {
        let s = topology_to_chu(&Topology::sierpinski());
        assert_eq!((s.num_points(), s.num_states()), (2, 3));
        assert_eq!(s.states(), &["{}", "{1}", "{0,1}"]);
        assert!(is_topological_system(&s));
        assert!(!is_separated(&topology_to_chu(&Topology::indiscrete(2))));
        assert!(admits_complements(&topology_to_chu(&Topology::discrete(2))));
    }

    #[test]
    fn topology_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| all_topologies(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 29, 355]);
        for t in all_topologies(3) {
            let c = topology_to_chu(&t);
            assert!(is_extensional(&c) && is_topological_system(&c));
            assert_eq!(is_t0(&t), is_separated(&c));
        }
    }

    #[test]
    fn continuity() {
        let s = Topology::sierpinski();
        assert!(continuity_to_transform(&s, &s, &[0, 1]).is_ok());
        assert_eq!(
            continuity_to_transform(&Topology::indiscrete(2), &s, &[0, 1]).unwrap_err(),
            Error::NotContinuous("{1}".into())
        );
    }

    #[test]
    fn coarsening() {
        let s = Topology::sierpinski();
        let t = coarsen_restriction(&s, Topology::indiscrete(2).opens().to_vec()).unwrap();
        assert!(is_restriction_second_sort(&t));
        assert!(matches!(
            coarsen_restriction(&Topology::indiscrete(2), s.opens().to_vec()),
            Err(Error::NotCoarser(_))
        ));
        assert!(matches!(
            coarsen_restriction(&s, vec![BTreeSet::from([1])]),
            Err(Error::NotATopology(_))
        ));
    }

    #[test]
    fn basis() {
        let c = basis_to_chu(strs(&["0", "1", "2"]), sets(&[&["0"], &["1"], &["2"]])).unwrap();
        assert_eq!(c.num_states(), 3);
        assert!(matches!(
            basis_to_chu(strs(&["0", "1", "2"]), sets(&[&["0", "1"], &["1", "2"]])),
            Err(Error::InvalidBasis(_))
        ));
        assert!(matches!(
            basis_to_chu(strs(&["0", "1"]), sets(&[&["0"]])),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn cover_oracles() {
        assert!(cover_compactness_oracle(&Topology::sierpinski(), 2, 3));
        assert!(!cover_compactness_oracle(&Topology::discrete(3), 2, 3));
        // {0} is dense in the particular point space
        assert!(dense_union_oracle(&Topology::particular_point(3, 0), 2, 3));
    }

    #[test]
    fn json() {
        let text = r#"{"carrier":["0","1"],"opens":[[],["1"],["0","1"]]}"#;
        let t: Topology = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), text);
    }
}

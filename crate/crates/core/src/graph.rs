//! Graphs as `<V, ∈, E ∪ {∅}>` and orthosets with zero as `<X, ⊥, X>`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{index_of, reject_chars, reject_duplicates, set_label};
use crate::order::STATE_SUFFIX;
use crate::space::ChuSpace;
use crate::transform::{check_adjoint, ChuTransform};

/// Label of the empty state in a graph encoding.
pub const EMPTY_STATE: &str = "∅";

/// A simple undirected graph. Edges are stored as `(i, j)` with `i < j`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        let edges = raw
            .edges
            .iter()
            .map(|(u, v)| {
                let find = |l: &str| {
                    index_of(&raw.vertices, l).map_err(|_| Error::InvalidGraph(format!("unknown vertex `{l}`")))
                };
                Ok((find(u)?, find(v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Graph::new(raw.vertices, edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        let edges = g
            .edges
            .iter()
            .map(|&(i, j)| (g.vertices[i].clone(), g.vertices[j].clone()))
            .collect();
        RawGraph {
            vertices: g.vertices,
            edges,
        }
    }
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Graph> {
        reject_duplicates(&vertices, "vertex")?;
        reject_chars(&vertices, &['{', '}', ','], "edge labels are built from `{`, `}` and `,`")?;
        if let Some(l) = vertices.iter().find(|l| *l == EMPTY_STATE) {
            return Err(Error::InvalidLabel {
                label: l.clone(),
                reason: "reserved for the empty state",
            });
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) uses an unknown vertex")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at `{}`", vertices[u])));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Graph { vertices, edges: norm })
    }

    /// Vertices `0..n` with the given edges.
    pub fn on_indices(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        Graph::new((0..n).map(|i| i.to_string()).collect(), edges.to_vec())
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::on_indices(n, &edges).expect("complete graph")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::on_indices(n, &edges).expect("path graph")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    fn edge_index(&self, set: &BTreeSet<usize>) -> Option<usize> {
        let mut it = set.iter();
        match (it.next(), it.next(), it.next()) {
            (Some(&u), Some(&v), None) => self.edges.binary_search(&(u, v)).ok(),
            _ => None,
        }
    }
}

/// Points are vertices; states are the edges followed by the empty state `∅`.
pub fn graph_to_chu(g: &Graph) -> ChuSpace {
    let mut states: Vec<String> = g
        .edges
        .iter()
        .map(|&(u, v)| set_label(&g.vertices, &BTreeSet::from([u, v])))
        .collect();
    states.push(EMPTY_STATE.to_string());
    let edges = &g.edges;
    ChuSpace::from_matrix_unchecked(g.vertices.clone(), states, |x, s| {
        edges.get(s).is_some_and(|&(u, v)| x == u || x == v)
    })
}

/// Every graph on vertices `0..n`.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 6, "graph enumeration is limited to 6 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .map(|bits| {
            let edges: Vec<_> = (0..pairs.len()).filter(|c| bits >> c & 1 == 1).map(|c| pairs[c]).collect();
            Graph::on_indices(n, &edges).unwrap()
        })
        .collect()
}

/// Whether any two distinct vertices are joined by a path. The empty graph is
/// not connected.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.num_vertices();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in &g.edges {
            let other = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                stack.push(other);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn edge_preimage(f: &BTreeMap<usize, usize>, (u, v): (usize, usize)) -> BTreeSet<usize> {
    f.iter().filter(|&(_, &y)| y == u || y == v).map(|(&x, _)| x).collect()
}

/// `f: W -> V'` given as a map on `W ⊆ V`: every edge of the target pulls back
/// to nothing or to an edge of the source.
pub fn strictly_continuous(g: &Graph, g2: &Graph, f: &BTreeMap<usize, usize>) -> bool {
    g2.edges.iter().all(|&e| {
        let pre = edge_preimage(f, e);
        pre.is_empty() || g.edge_index(&pre).is_some()
    })
}

fn total(f: &[usize]) -> BTreeMap<usize, usize> {
    f.iter().copied().enumerate().collect()
}

/// The Chu transform whose state map is `e' ↦ f⁻¹[e']`, when that lands in
/// the source's states.
pub fn graph_transform_equiv(g: &Graph, g2: &Graph, f: &[usize]) -> Option<ChuTransform> {
    if f.len() != g.num_vertices() || f.iter().any(|&y| y >= g2.num_vertices()) {
        return None;
    }
    let fm = total(f);
    let source = graph_to_chu(g);
    let empty = source.num_states() - 1;
    let mut gmap = Vec::with_capacity(g2.edges.len() + 1);
    for &e in &g2.edges {
        let pre = edge_preimage(&fm, e);
        if pre.is_empty() {
            gmap.push(empty);
        } else {
            gmap.push(g.edge_index(&pre)?);
        }
    }
    gmap.push(empty);
    check_adjoint(source, graph_to_chu(g2), f.to_vec(), gmap).ok()
}

/// Outcome of testing the automorphism lemma on one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Confirmed,
    Refuted(String),
    NotApplicable(String),
}

/// For connected `g` and a strictly continuous `f: W -> V` with some vertex
/// of preimage size one, checks that `f` is an automorphism.
pub fn margolis_rhodes_check(g: &Graph, f: &BTreeMap<usize, usize>) -> Verdict {
    let n = g.num_vertices();
    if !is_connected(g) {
        return Verdict::NotApplicable("graph is not connected".into());
    }
    if f.iter().any(|(&x, &y)| x >= n || y >= n) {
        return Verdict::NotApplicable("map leaves the vertex set".into());
    }
    if !strictly_continuous(g, g, f) {
        return Verdict::NotApplicable("map is not strictly continuous".into());
    }
    let mut fibres = vec![0usize; n];
    for &y in f.values() {
        fibres[y] += 1;
    }
    if !fibres.contains(&1) {
        return Verdict::NotApplicable("no vertex has exactly one preimage".into());
    }
    let name = |i: usize| g.vertices[i].as_str();
    if f.len() != n {
        let missing = (0..n).find(|x| !f.contains_key(x)).unwrap();
        return Verdict::Refuted(format!("`{}` is outside the domain", name(missing)));
    }
    if let Some(y) = (0..n).find(|&y| fibres[y] != 1) {
        return Verdict::Refuted(format!("`{}` has {} preimages", name(y), fibres[y]));
    }
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) != g.has_edge(f[&u], f[&v]) {
                return Verdict::Refuted(format!("adjacency of `{}` and `{}` is not preserved", name(u), name(v)));
            }
        }
    }
    Verdict::Confirmed
}

/// Counts from sweeping the lemma over every connected graph on `0..n`, every
/// `W ⊆ V` and every `f: W -> V`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaSweep {
    pub graphs: usize,
    pub maps: u64,
    pub confirmed: u64,
    pub refuted: Vec<(Graph, BTreeMap<usize, usize>, String)>,
}

pub fn margolis_rhodes_sweep(n: usize) -> LemmaSweep {
    use rayon::prelude::*;
    all_graphs(n)
        .into_par_iter()
        .filter(is_connected)
        .map(|g| {
            let mut out = LemmaSweep {
                graphs: 1,
                ..LemmaSweep::default()
            };
            for w in 0u32..1 << n {
                let dom: Vec<usize> = (0..n).filter(|i| w >> i & 1 == 1).collect();
                for img in crate::formula::Tuples::new(n, dom.len()) {
                    out.maps += 1;
                    let f: BTreeMap<usize, usize> = dom.iter().copied().zip(img).collect();
                    match margolis_rhodes_check(&g, &f) {
                        Verdict::Confirmed => out.confirmed += 1,
                        Verdict::Refuted(why) => out.refuted.push((g.clone(), f, why)),
                        Verdict::NotApplicable(_) => {}
                    }
                }
            }
            out
        })
        .reduce(LemmaSweep::default, |mut a, b| {
            a.graphs += b.graphs;
            a.maps += b.maps;
            a.confirmed += b.confirmed;
            a.refuted.extend(b.refuted);
            a
        })
}

/// An orthoset with zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawOrthoset", into = "RawOrthoset")]
pub struct Orthoset {
    carrier: Vec<String>,
    perp: Vec<Vec<bool>>,
    zero: usize,
}

/// JSON shape. The loader closes `perp` under symmetry and adds the zero row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawOrthoset {
    pub carrier: Vec<String>,
    pub zero: String,
    pub perp: Vec<(String, String)>,
}

impl TryFrom<RawOrthoset> for Orthoset {
    type Error = Error;

    fn try_from(raw: RawOrthoset) -> Result<Self> {
        let n = raw.carrier.len();
        let zero = index_of(&raw.carrier, &raw.zero)?;
        let mut perp = vec![vec![false; n]; n];
        for row in perp.iter_mut() {
            row[zero] = true;
        }
        perp[zero] = vec![true; n];
        for (a, b) in &raw.perp {
            let (i, j) = (index_of(&raw.carrier, a)?, index_of(&raw.carrier, b)?);
            perp[i][j] = true;
            perp[j][i] = true;
        }
        orthoset_validate(raw.carrier, perp, zero)
    }
}

impl From<Orthoset> for RawOrthoset {
    fn from(o: Orthoset) -> Self {
        let n = o.carrier.len();
        let perp = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != o.zero && j != o.zero && o.perp[i][j])
            .map(|(i, j)| (o.carrier[i].clone(), o.carrier[j].clone()))
            .collect();
        RawOrthoset {
            zero: o.carrier[o.zero].clone(),
            carrier: o.carrier,
            perp,
        }
    }
}

/// Checks symmetry, that only zero is self-perpendicular, and that zero is
/// perpendicular to everything, in that order.
pub fn orthoset_validate(carrier: Vec<String>, perp: Vec<Vec<bool>>, zero: usize) -> Result<Orthoset> {
    let n = carrier.len();
    if n == 0 {
        return Err(Error::PreconditionFailed("an orthoset needs a nonempty carrier".into()));
    }
    reject_duplicates(&carrier, "element")?;
    if let Some(l) = carrier.iter().find(|l| l.ends_with(STATE_SUFFIX)) {
        return Err(Error::InvalidLabel {
            label: l.clone(),
            reason: "a trailing `'` marks state copies",
        });
    }
    if zero >= n {
        return Err(Error::UnknownElement(zero.to_string()));
    }
    if perp.len() != n || perp.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            rows: perp.len(),
            cols: perp.first().map_or(0, Vec::len),
            points: n,
            states: n,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            if perp[i][j] != perp[j][i] {
                return Err(Error::NotSymmetric(carrier[i].clone(), carrier[j].clone()));
            }
        }
    }
    if let Some(i) = (0..n).find(|&i| i != zero && perp[i][i]) {
        return Err(Error::SelfPerpNonZero(carrier[i].clone()));
    }
    if let Some(i) = (0..n).find(|&i| !perp[zero][i]) {
        return Err(Error::ZeroNotPerp(carrier[i].clone()));
    }
    Ok(Orthoset { carrier, perp, zero })
}

impl Orthoset {
    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn perp(&self, i: usize, j: usize) -> bool {
        self.perp[i][j]
    }
}

/// `<X, ⊥, X>`; state labels carry a trailing `'`.
pub fn orthoset_to_chu(o: &Orthoset) -> ChuSpace {
    let states = o.carrier.iter().map(|l| format!("{l}{STATE_SUFFIX}")).collect();
    ChuSpace::from_matrix_unchecked(o.carrier.clone(), states, |i, j| o.perp[i][j])
}

/// `x ⊥ g(y) ⟺ f(x) ⊥ y` for all `x`, `y`.
pub fn is_adjoint_pair(o: &Orthoset, o2: &Orthoset, f: &[usize], g: &[usize]) -> bool {
    f.len() == o.len()
        && g.len() == o2.len()
        && f.iter().all(|&y| y < o2.len())
        && g.iter().all(|&x| x < o.len())
        && (0..o.len()).all(|x| (0..o2.len()).all(|y| o.perp[x][g[y]] == o2.perp[f[x]][y]))
}

/// No two distinct elements share a ⊥-row.
pub fn is_irredundant(o: &Orthoset) -> bool {
    let rows: BTreeSet<&Vec<bool>> = o.perp.iter().collect();
    rows.len() == o.len()
}

/// The graph on the nonzero elements joined by ⊥.
pub fn induced_graph(o: &Orthoset) -> Graph {
    let keep: Vec<usize> = (0..o.len()).filter(|&i| i != o.zero).collect();
    let mut edges = Vec::new();
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate().skip(a + 1) {
            if o.perp[i][j] {
                edges.push((a, b));
            }
        }
    }
    let vertices = keep.iter().map(|&i| o.carrier[i].clone()).collect();
    Graph::new(vertices, edges).expect("orthoset labels are valid vertex labels")
}

/// Every orthoset on `0..n` with zero at index 0.
pub fn all_orthosets(n: usize) -> Vec<Orthoset> {
    assert!((1..=5).contains(&n), "orthoset enumeration needs 1 to 5 elements");
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .map(|bits| {
            let mut perp = vec![vec![false; n]; n];
            for row in perp.iter_mut() {
                row[0] = true;
            }
            perp[0] = vec![true; n];
            for (c, &(i, j)) in pairs.iter().enumerate() {
                let on = bits >> c & 1 == 1;
                perp[i][j] = on;
                perp[j][i] = on;
            }
            orthoset_validate((0..n).map(|i| i.to_string()).collect(), perp, 0).unwrap()
        })
        .collect()
}

//! Plücker monomials of G(2,N) drawn as multigraphs on ℤ/N.
//!
//! A monomial x_{i₁j₁}⋯x_{iₙjₙ} is the graph with one chord per factor.
//! Crossing chords are removed by the three-term Plücker relation; the pair
//! (sum of chord lengths, product of chord lengths) strictly decreases in
//! lexicographic order on both children, which makes straightening terminate.
//! Crossing-free graphs form the standard monomial basis.

mod rank1;

pub use rank1::{rank1_reduce, Rank1Outcome, ReductionStep, ReductionTrace, StepRule};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{int, Scalar};

pub type Edge = (usize, usize);

/// Circular distance min_k |i − j + kN|.
pub fn distance(n: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j) % n;
    d.min(n - d)
}

/// Multigraph on vertices 1..=N; edges stored sorted, each with i < j.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PluckerGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl PluckerGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::contract("a Plücker graph needs at least 2 vertices"));
        }
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::contract(format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::contract(format!("edge {a}-{b} outside 1..={n}")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        Ok(PluckerGraph { n, edges: out })
    }

    pub fn empty(n: usize) -> Self {
        PluckerGraph {
            n,
            edges: Vec::new(),
        }
    }

    /// The cycle 1-2, 2-3, …, N-1 of the section f = x₁₂x₂₃⋯x_{N1}.
    pub fn cyclic(n: usize) -> Self {
        PluckerGraph::new(n, (1..=n).map(|i| (i, i % n + 1))).expect("valid cycle")
    }

    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] <= w[1]));
        PluckerGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn valence(&self) -> Vec<usize> {
        let mut v = vec![0; self.n + 1];
        for &(a, b) in &self.edges {
            v[a] += 1;
            v[b] += 1;
        }
        v.remove(0);
        v
    }

    /// N·valence − 2·edges per vertex: zero exactly for torus-invariant
    /// monomials.
    pub fn torus_weight(&self) -> Vec<i64> {
        let e = self.edges.len() as i64;
        self.valence()
            .into_iter()
            .map(|v| self.n as i64 * v as i64 - 2 * e)
            .collect()
    }

    pub fn is_torus_invariant(&self) -> bool {
        self.torus_weight().iter().all(|&w| w == 0)
    }

    pub fn ia(&self) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| distance(self.n, a, b))
            .sum()
    }

    pub fn im(&self) -> BigUint {
        self.edges
            .iter()
            .fold(BigUint::one(), |acc, &(a, b)| acc * distance(self.n, a, b))
    }

    /// (I_a, I_m), the termination measure of straightening.
    pub fn measure(&self) -> (usize, BigUint) {
        (self.ia(), self.im())
    }

    /// Distinct pairs of edges whose endpoints strictly interleave, sorted.
    pub fn crossings(&self) -> Vec<(Edge, Edge)> {
        let mut distinct = self.edges.clone();
        distinct.dedup();
        let mut out = Vec::new();
        for (k, &e) in distinct.iter().enumerate() {
            for &g in &distinct[k + 1..] {
                if chords_cross(e, g) {
                    out.push((e, g));
                }
            }
        }
        out
    }

    pub fn first_crossing(&self) -> Option<(Edge, Edge)> {
        let mut prev = None;
        for (k, &e) in self.edges.iter().enumerate() {
            if prev == Some(e) {
                continue;
            }
            prev = Some(e);
            for &g in &self.edges[k + 1..] {
                if chords_cross(e, g) {
                    return Some((e, g));
                }
            }
        }
        None
    }

    pub fn is_crossing_free(&self) -> bool {
        self.first_crossing().is_none()
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.edges
            .binary_search(&(e.0.min(e.1), e.0.max(e.1)))
            .is_ok()
    }

    pub fn multiplicity(&self, e: Edge) -> usize {
        let e = (e.0.min(e.1), e.0.max(e.1));
        self.edges.iter().filter(|&&x| x == e).count()
    }

    /// Removes one copy of `e`; `None` when absent.
    pub fn without(&self, e: Edge) -> Option<PluckerGraph> {
        let e = (e.0.min(e.1), e.0.max(e.1));
        let pos = self.edges.binary_search(&e).ok()?;
        let mut edges = self.edges.clone();
        edges.remove(pos);
        Some(PluckerGraph::from_sorted(self.n, edges))
    }

    pub fn with(&self, e: Edge) -> PluckerGraph {
        let e = (e.0.min(e.1), e.0.max(e.1));
        let mut edges = self.edges.clone();
        let pos = edges.partition_point(|x| *x <= e);
        edges.insert(pos, e);
        PluckerGraph::from_sorted(self.n, edges)
    }

    /// Multiset union (product of monomials).
    pub fn union(&self, other: &PluckerGraph) -> PluckerGraph {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        edges.sort_unstable();
        PluckerGraph::from_sorted(self.n, edges)
    }

    /// Multiset difference, when `other` is a sub-multigraph.
    pub fn minus(&self, other: &PluckerGraph) -> Option<PluckerGraph> {
        let mut g = self.clone();
        for &e in &other.edges {
            g = g.without(e)?;
        }
        Some(g)
    }

    /// Number of edges of the cyclic graph F missing from this graph.
    pub fn d_value(&self) -> usize {
        let mut left = self.clone();
        let mut missing = 0;
        for &e in PluckerGraph::cyclic(self.n).edges() {
            match left.without(e) {
                Some(g) => left = g,
                None => missing += 1,
            }
        }
        missing
    }

    /// Maximal cyclic loops: (start vertex, length s ≥ 2) such that every
    /// pair of consecutive vertices in i, i+1, …, i+s−1, i is joined by an
    /// edge, and the run cannot be extended at either end.
    pub fn cyclic_loops(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let next = |v: usize| v % n + 1;
        let mut out = Vec::new();
        for start in 1..=n {
            // longest run of consecutive edges start, start+1, …
            let mut run = 0;
            let mut v = start;
            while run < n && self.contains_edge((v, next(v))) {
                run += 1;
                v = next(v);
            }
            for s in 2..=n {
                if s - 1 > run {
                    break;
                }
                let last = ((start - 1 + s - 1) % n) + 1;
                let closes = if s == n {
                    run >= n
                } else if s == 2 {
                    self.multiplicity((start, next(start))) >= 2
                } else {
                    self.contains_edge((last, start))
                };
                if closes {
                    out.push((start, s));
                }
            }
        }
        // keep maximal loops only: drop those strictly inside a longer loop
        let contains = |outer: (usize, usize), inner: (usize, usize)| {
            let off = (inner.0 + n - outer.0) % n;
            outer != inner && off + inner.1 <= outer.1
        };
        let all = out.clone();
        out.retain(|&l| !all.iter().any(|&o| contains(o, l)));
        if out.iter().any(|&(_, s)| s == n) {
            out.retain(|&(_, s)| s == n);
            out.truncate(1);
        }
        out
    }

    /// `N: i-j,i-j,...`
    pub fn to_text(&self) -> String {
        format!("{}: {}", self.n, self.edge_list())
    }

    pub fn edge_list(&self) -> String {
        self.edges
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (n, list) = text
            .split_once(':')
            .ok_or_else(|| Error::parse(text, "expected `N: i-j,...`"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(n.trim(), "bad vertex count"))?;
        PluckerGraph::parse_edges(n, list)
    }

    pub fn parse_edges(n: usize, list: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| Error::parse(tok, "expected an edge i-j"))?;
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| Error::parse(tok, "bad vertex"))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| Error::parse(tok, "bad vertex"))?;
            if a == b || a == 0 || b == 0 || a > n || b > n {
                return Err(Error::parse(
                    tok,
                    format!("edge must join distinct vertices in 1..={n}"),
                ));
            }
            edges.push((a, b));
        }
        PluckerGraph::new(n, edges)
    }
}

impl fmt::Display for PluckerGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.edge_list())
    }
}

/// Chords (a,b), (c,d) with a<b, c<d cross when their endpoints strictly
/// interleave around the circle.
pub fn chords_cross(e: Edge, g: Edge) -> bool {
    let (a, b) = e;
    let (c, d) = g;
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Formal rational combination of graphs sharing N and edge count.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(
    into = "Vec<(PluckerGraph, String)>",
    try_from = "Vec<(PluckerGraph, String)>"
)]
pub struct GraphSum {
    terms: BTreeMap<PluckerGraph, Scalar>,
}

impl GraphSum {
    pub fn zero() -> Self {
        GraphSum::default()
    }

    pub fn single(g: PluckerGraph) -> Self {
        GraphSum::term(g, Scalar::one())
    }

    pub fn term(g: PluckerGraph, c: Scalar) -> Self {
        let mut s = GraphSum::zero();
        s.add_term(g, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PluckerGraph, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &PluckerGraph) -> Scalar {
        self.terms.get(g).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, g: PluckerGraph, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(g).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &GraphSum, c: &Scalar) {
        for (g, v) in &other.terms {
            self.add_term(g.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> GraphSum {
        let mut out = GraphSum::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &GraphSum) -> GraphSum {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// True when all graphs share one vertex count and one edge count.
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|g| (g.n(), g.edge_count()));
        match it.next() {
            None => true,
            Some(first) => it.all(|x| x == first),
        }
    }

    pub fn is_crossing_free(&self) -> bool {
        self.terms.keys().all(PluckerGraph::is_crossing_free)
    }

    /// Terms joined by ` + ` / ` - `, coefficients written `c*` when not 1.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (g, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if !a.is_one() {
                out.push_str(&format!("{a}*"));
            }
            if g.edge_count() == 0 {
                out.push('1');
            } else {
                out.push_str(&g.edge_list());
            }
        }
        out
    }
}

impl From<GraphSum> for Vec<(PluckerGraph, String)> {
    fn from(s: GraphSum) -> Self {
        s.terms
            .into_iter()
            .map(|(g, c)| (g, c.to_string()))
            .collect()
    }
}

impl TryFrom<Vec<(PluckerGraph, String)>> for GraphSum {
    type Error = Error;

    fn try_from(v: Vec<(PluckerGraph, String)>) -> Result<Self> {
        let mut out = GraphSum::zero();
        for (g, c) in v {
            let c: Scalar = c
                .parse()
                .map_err(|_| Error::parse(c.clone(), "bad rational"))?;
            out.add_term(g, c);
        }
        Ok(out)
    }
}

impl fmt::Display for GraphSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// One Plücker operation: removes the crossing `pair` of `g`.
pub fn plucker_op(g: &PluckerGraph, pair: (Edge, Edge)) -> Result<GraphSum> {
    let (e, h) = pair;
    if !chords_cross(e, h) || !g.contains_edge(e) || !g.contains_edge(h) {
        return Err(Error::contract(format!(
            "{}-{} and {}-{} is not a crossing of {}",
            e.0, e.1, h.0, h.1, g
        )));
    }
    let mut pts = [e.0, e.1, h.0, h.1];
    pts.sort_unstable();
    let [i1, i2, i3, i4] = pts;
    let rest = g
        .without(e)
        .and_then(|x| x.without(h))
        .expect("edges present");
    // x_{i1 i3} x_{i2 i4} = x_{i1 i2} x_{i3 i4} + x_{i1 i4} x_{i2 i3}
    let mut out = GraphSum::zero();
    out.add_term(rest.with((i1, i2)).with((i3, i4)), Scalar::one());
    out.add_term(rest.with((i1, i4)).with((i2, i3)), Scalar::one());
    Ok(out)
}

/// A single recorded Plücker operation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PluckerStep {
    pub parent: PluckerGraph,
    pub crossing: (Edge, Edge),
    pub children: Vec<PluckerGraph>,
    pub parent_measure: (usize, String),
    pub child_measures: Vec<(usize, String)>,
}

/// Memoizing straightener. The crossing removed at each step is the
/// lexicographically least pair of edges.
#[derive(Debug, Default)]
pub struct Straightener {
    memo: HashMap<PluckerGraph, GraphSum>,
    log: Option<Vec<PluckerStep>>,
}

impl Straightener {
    pub fn new() -> Self {
        Straightener::default()
    }

    /// A straightener that records every Plücker operation it performs
    /// (memoized graphs are not re-derived).
    pub fn recording() -> Self {
        Straightener {
            memo: HashMap::new(),
            log: Some(Vec::new()),
        }
    }

    pub fn take_log(&mut self) -> Vec<PluckerStep> {
        self.log.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn graph(&mut self, g: &PluckerGraph) -> GraphSum {
        if let Some(s) = self.memo.get(g) {
            return s.clone();
        }
        let out = match g.first_crossing() {
            None => GraphSum::single(g.clone()),
            Some(pair) => {
                let children = plucker_op(g, pair).expect("first_crossing is a crossing");
                if let Some(log) = self.log.as_mut() {
                    let m = |x: &PluckerGraph| {
                        let (a, b) = x.measure();
                        (a, b.to_string())
                    };
                    log.push(PluckerStep {
                        parent: g.clone(),
                        crossing: pair,
                        children: children.terms().map(|(c, _)| c.clone()).collect(),
                        parent_measure: m(g),
                        child_measures: children.terms().map(|(c, _)| m(c)).collect(),
                    });
                }
                let mut acc = GraphSum::zero();
                for (child, c) in children.terms() {
                    let s = self.graph(child);
                    acc.add_scaled(&s, c);
                }
                acc
            }
        };
        self.memo.insert(g.clone(), out.clone());
        out
    }

    pub fn sum(&mut self, s: &GraphSum) -> GraphSum {
        let mut out = GraphSum::zero();
        for (g, c) in s.terms() {
            let r = self.graph(g);
            out.add_scaled(&r, c);
        }
        out
    }
}

/// Crossing-free combination equal to `s` modulo the Plücker ideal.
pub fn straighten(s: &GraphSum) -> GraphSum {
    Straightener::new().sum(s)
}

/// The derivation x_j∂_i on Plücker monomials:
/// x_j∂_i x_{pq} = δ_{pi} x_{jq} + δ_{qi} x_{pj}, with x_{pp} = 0 and
/// x_{qp} = −x_{pq}.
pub fn g_action(j: usize, i: usize, s: &GraphSum) -> Result<GraphSum> {
    if i == j {
        return Err(Error::contract("g_action needs i != j"));
    }
    let mut out = GraphSum::zero();
    for (g, c) in s.terms() {
        out.add_scaled(&g_action_graph(j, i, g), c);
    }
    Ok(out)
}

fn g_action_graph(j: usize, i: usize, g: &PluckerGraph) -> GraphSum {
    let mut out = GraphSum::zero();
    let mut k = 0;
    let edges = g.edges();
    while k < edges.len() {
        let e = edges[k];
        let mult = edges[k..].iter().take_while(|&&x| x == e).count();
        k += mult;
        let (p, q) = e;
        // endpoint replaced, with the other endpoint kept in place
        let replaced = if p == i {
            Some((j, q, false))
        } else if q == i {
            Some((p, j, false))
        } else {
            None
        };
        let Some((a, b, _)) = replaced else { continue };
        if a == b {
            continue;
        }
        let sign = if a < b { int(1) } else { int(-1) };
        let rest = g.without(e).expect("edge present");
        out.add_term(rest.with((a, b)), sign * int(mult as i64));
    }
    out
}

/// All crossing-free multigraphs on N vertices with `d` edges.
pub fn crossing_free_graphs(n: usize, d: usize) -> Vec<PluckerGraph> {
    let pairs: Vec<Edge> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Edge> = Vec::new();
    fn rec(
        pairs: &[Edge],
        k: usize,
        left: usize,
        chosen: &mut Vec<Edge>,
        n: usize,
        out: &mut Vec<PluckerGraph>,
    ) {
        if left == 0 {
            out.push(PluckerGraph::from_sorted(n, chosen.clone()));
            return;
        }
        for idx in k..pairs.len() {
            let e = pairs[idx];
            if chosen.iter().any(|&c| chords_cross(c, e)) {
                continue;
            }
            for mult in (1..=left).rev() {
                for _ in 0..mult {
                    chosen.push(e);
                }
                rec(pairs, idx + 1, left - mult, chosen, n, out);
                for _ in 0..mult {
                    chosen.pop();
                }
            }
        }
    }
    rec(&pairs, 0, d, &mut chosen, n, &mut out);
    out.sort();
    out
}

/// All multigraphs on N vertices with the given valence at every vertex
/// (crossings allowed).
pub fn graphs_with_valence(n: usize, valence: &[usize]) -> Vec<PluckerGraph> {
    assert_eq!(valence.len(), n);
    let pairs: Vec<Edge> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let mut left = valence.to_vec();
    let mut chosen = Vec::new();
    fn rec(
        pairs: &[Edge],
        k: usize,
        left: &mut Vec<usize>,
        chosen: &mut Vec<Edge>,
        n: usize,
        out: &mut Vec<PluckerGraph>,
    ) {
        if left.iter().all(|&v| v == 0) {
            out.push(PluckerGraph::from_sorted(n, chosen.clone()));
            return;
        }
        if k == pairs.len() {
            return;
        }
        let (a, b) = pairs[k];
        // every remaining edge at the smallest unsatisfied vertex must come from pairs ≥ k
        let max = left[a - 1].min(left[b - 1]);
        for mult in (0..=max).rev() {
            left[a - 1] -= mult;
            left[b - 1] -= mult;
            for _ in 0..mult {
                chosen.push((a, b));
            }
            // vertex a gets no further edges once all pairs starting at a are passed
            let last_for_a = pairs.get(k + 1).is_none_or(|p| p.0 != a);
            if !(last_for_a && left[a - 1] != 0) {
                rec(pairs, k + 1, left, chosen, n, out);
            }
            for _ in 0..mult {
                chosen.pop();
            }
            left[a - 1] += mult;
            left[b - 1] += mult;
        }
    }
    rec(&pairs, 0, &mut left, &mut chosen, n, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{plucker_relations, quotient_piece};
    use proptest::prelude::*;

    fn g(n: usize, list: &str) -> PluckerGraph {
        PluckerGraph::parse_edges(n, list).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(4, 1, 3), 2);
        assert_eq!(distance(5, 1, 5), 1);
        assert_eq!(distance(7, 3, 3), 0);
    }

    #[test]
    fn ia_im_examples() {
        let x = g(4, "1-3,2-4");
        assert_eq!((x.ia(), x.im()), (4, BigUint::from(4u32)));
        let y = g(4, "1-2,3-4");
        assert_eq!((y.ia(), y.im()), (2, BigUint::from(1u32)));
        let e = PluckerGraph::empty(4);
        assert_eq!((e.ia(), e.im()), (0, BigUint::from(1u32)));
    }

    #[test]
    fn crossing_examples() {
        assert_eq!(g(4, "1-3,2-4").crossings(), vec![((1, 3), (2, 4))]);
        assert!(g(4, "1-2,3-4").crossings().is_empty());
        assert!(g(4, "1-3,1-3").crossings().is_empty());
    }

    #[test]
    fn plucker_op_examples() {
        let s = plucker_op(&g(4, "1-3,2-4"), ((1, 3), (2, 4))).unwrap();
        assert_eq!(s.to_text(), "1-2,3-4 + 1-4,2-3");
        let s = plucker_op(&g(4, "1-2,1-3,2-4"), ((1, 3), (2, 4))).unwrap();
        assert_eq!(s.to_text(), "1-2,1-2,3-4 + 1-2,1-4,2-3");
        assert!(plucker_op(&g(4, "1-2,3-4"), ((1, 2), (3, 4))).is_err());
    }

    #[test]
    fn straighten_examples() {
        let free = GraphSum::single(g(5, "1-2,2-3,4-5"));
        assert_eq!(straighten(&free), free);
        let s = straighten(&GraphSum::single(g(4, "1-3,2-4")));
        assert_eq!(s.to_text(), "1-2,3-4 + 1-4,2-3");
    }

    #[test]
    fn g_action_examples() {
        let s = g_action(3, 1, &GraphSum::single(g(4, "1-2"))).unwrap();
        assert_eq!(s.to_text(), "-2-3");
        assert!(g_action(2, 1, &GraphSum::single(g(4, "1-2")))
            .unwrap()
            .is_zero());
        let s = g_action(3, 1, &GraphSum::single(g(4, "1-2,1-2"))).unwrap();
        assert_eq!(s.to_text(), "-2*1-2,2-3");
        assert!(g_action(1, 1, &GraphSum::zero()).is_err());
    }

    #[test]
    fn cyclic_loop_examples() {
        let f = PluckerGraph::cyclic(6);
        assert_eq!(f.cyclic_loops(), vec![(1, 6)]);
        assert_eq!(f.d_value(), 0);
        let x = g(6, "1-2,2-3,1-3,4-5,5-6,4-6");
        let loops = x.cyclic_loops();
        assert!(loops.contains(&(1, 3)));
        assert!(loops.contains(&(4, 3)));
        let y = g(4, "1-2,1-2,3-4,3-4");
        assert_eq!(y.cyclic_loops(), vec![(1, 2), (3, 2)]);
        assert_eq!(y.d_value(), 2);
    }

    #[test]
    fn graph_text_round_trip() {
        let x = PluckerGraph::parse("5: 2-1, 3-5,1-2").unwrap();
        assert_eq!(x.to_text(), "5: 1-2,1-2,3-5");
        assert_eq!(PluckerGraph::parse(&x.to_text()).unwrap(), x);
        assert!(PluckerGraph::parse("4: 1-1").is_err());
        assert!(PluckerGraph::parse("4: 1-5").is_err());
        assert!(PluckerGraph::parse("1-2").is_err());
    }

    #[test]
    fn every_plucker_child_decreases_measure() {
        for n in 4..=6 {
            for d in 2..=4 {
                for m in crate::ring::monomials_of_degree(n * (n - 1) / 2, d as u32) {
                    let x = graph_of(n, m.exponents());
                    let parent = x.measure();
                    for pair in x.crossings() {
                        let kids = plucker_op(&x, pair).unwrap();
                        let before = x.valence();
                        for (k, _) in kids.terms() {
                            assert!(k.measure() < parent, "{x} -> {k}");
                            assert_eq!(k.valence(), before);
                        }
                    }
                }
            }
        }
    }

    fn graph_of(n: usize, exps: &[u32]) -> PluckerGraph {
        let mut edges = Vec::new();
        for (idx, &e) in exps.iter().enumerate() {
            let p = crate::ring::plucker_pair(n, idx);
            for _ in 0..e {
                edges.push(p);
            }
        }
        PluckerGraph::new(n, edges).unwrap()
    }

    #[test]
    fn crossing_free_count_matches_quotient_dims() {
        let gens = plucker_relations(4);
        for d in 0..=5 {
            let q = quotient_piece(6, &gens, d as u32).unwrap();
            assert_eq!(crossing_free_graphs(4, d).len(), q.dim(), "d = {d}");
        }
        assert_eq!(crossing_free_graphs(4, 2).len(), 20);
    }

    #[test]
    fn valence_enumeration() {
        let two = graphs_with_valence(4, &[2, 2, 2, 2]);
        // three doubled matchings and three 4-cycles
        assert_eq!(two.len(), 6);
        assert!(two.iter().all(PluckerGraph::is_torus_invariant));
        let free: Vec<_> = two.iter().filter(|x| x.is_crossing_free()).collect();
        assert_eq!(free.len(), 3);
    }

    fn random_sum(n: usize, d: usize) -> impl Strategy<Value = GraphSum> {
        let pairs: Vec<Edge> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        let np = pairs.len();
        proptest::collection::vec((proptest::collection::vec(0..np, d), -3i64..=3), 1..4).prop_map(
            move |ts| {
                let mut s = GraphSum::zero();
                for (idx, c) in ts {
                    let gr = PluckerGraph::new(n, idx.into_iter().map(|k| pairs[k])).unwrap();
                    s.add_term(gr, int(c));
                }
                s
            },
        )
    }

    proptest! {
        #[test]
        fn straighten_is_idempotent_and_crossing_free(s in random_sum(6, 4)) {
            let once = straighten(&s);
            prop_assert!(once.is_crossing_free());
            prop_assert_eq!(straighten(&once), once);
        }

        #[test]
        fn action_commutes_with_straightening(s in random_sum(5, 3), i in 1usize..=5, j in 1usize..=5) {
            prop_assume!(i != j);
            let a = straighten(&g_action(j, i, &s).unwrap());
            let b = straighten(&g_action(j, i, &straighten(&s)).unwrap());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn plucker_op_preserves_valence(s in random_sum(6, 4)) {
            for (x, _) in s.terms() {
                for pair in x.crossings() {
                    for (k, _) in plucker_op(x, pair).unwrap().terms() {
                        prop_assert_eq!(k.valence(), x.valence());
                    }
                }
            }
        }
    }
}

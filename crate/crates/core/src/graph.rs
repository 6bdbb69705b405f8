//! Simple undirected graphs on `0..n` with bit-row adjacency.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bitset::VertexSet;
use crate::error::{input, Error, Result};

/// An immutable simple graph. Row `v` holds the neighbourhood of `v`, so a star
/// parity `par(v, X)` is one masked popcount over `n / 64` words.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<VertexSet>,
    edge_count: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, rows: (0..n).map(|_| VertexSet::empty(n)).collect(), edge_count: 0 }
    }

    /// Builds a graph from an edge list. Self-loops, duplicate edges and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u},{v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return input(format!("self-loop at vertex {u}"));
            }
            if !g.rows[u].insert(v) {
                return input(format!("duplicate edge ({u},{v})"));
            }
            g.rows[v].insert(u);
            g.edge_count += 1;
        }
        Ok(g)
    }

    /// Builds a graph from already-validated adjacency rows.
    pub(crate) fn from_rows(rows: Vec<VertexSet>) -> Self {
        let n = rows.len();
        let degree_sum: usize = rows.iter().map(VertexSet::len).sum();
        debug_assert!(degree_sum.is_multiple_of(2));
        Self { n, rows, edge_count: degree_sum / 2 }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.rows[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    /// Number of neighbours of `v` inside `within`.
    #[inline]
    pub fn degree_into(&self, v: usize, within: &VertexSet) -> usize {
        self.rows[v].intersection_count(within)
    }

    /// `par(v, X)`: parity of the number of edges between `v` and `X \ {v}`.
    #[inline]
    pub fn star_parity(&self, v: usize, within: &VertexSet) -> u8 {
        self.rows[v].intersection_parity(within)
    }

    /// `par(S)`: parity of `|E(G) ∩ S|` for an arbitrary potential-edge set.
    pub fn parity(&self, s: &PotentialEdgeSet) -> Result<u8> {
        let mut acc = 0u8;
        for &(u, v) in s.iter() {
            if v >= self.n {
                return input(format!("potential edge ({u},{v}) outside a graph on {} vertices", self.n));
            }
            acc ^= self.rows[u].contains(v) as u8;
        }
        Ok(acc)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.rows[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Number of edges with both endpoints in `within`.
    pub fn edges_within(&self, within: &VertexSet) -> usize {
        within.iter().map(|v| self.degree_into(v, within)).sum::<usize>() / 2
    }

    /// Induced subgraph on `vertices`, relabelled so that `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let m = vertices.len();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let rows = vertices
            .iter()
            .map(|&v| {
                VertexSet::from_iter(
                    m,
                    self.rows[v].iter().filter_map(|u| (local[u] != usize::MAX).then_some(local[u])),
                )
            })
            .collect();
        Graph::from_rows(rows)
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return input("relabelling must have one entry per vertex");
        }
        Graph::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Adjacency rows as `u32` masks for the exponential routines (n <= 32).
    pub(crate) fn small_masks(&self) -> Vec<u32> {
        assert!(self.n <= 32);
        self.rows.iter().map(|r| r.words().first().copied().unwrap_or(0) as u32).collect()
    }

    /// Text format: `n m`, then one `u v` line per edge with `u < v`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.edge_count * 10);
        let _ = writeln!(out, "{} {}", self.n, self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Input("empty graph file".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let (u, v) = parse_pair(line)?;
            if u >= v {
                return input(format!("edge line `{line}` must satisfy u < v"));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return input(format!("header announces {m} edges, file lists {}", edges.len()));
        }
        Graph::from_edges(n, edges)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Graph> {
        Graph::from_text(&fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let parse = |tok: Option<&str>| -> Result<usize> {
        tok.ok_or_else(|| Error::Input(format!("malformed line `{line}`")))?
            .parse::<usize>()
            .map_err(|e| Error::Input(format!("malformed line `{line}`: {e}")))
    };
    let a = parse(it.next())?;
    let b = parse(it.next())?;
    if it.next().is_some() {
        return input(format!("trailing tokens in line `{line}`"));
    }
    Ok((a, b))
}

/// A set of unordered vertex pairs `{u, v}`, `u != v`, stored as `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PotentialEdgeSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl PotentialEdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self> {
        let mut s = Self::new();
        for (u, v) in pairs {
            s.insert(u, v)?;
        }
        Ok(s)
    }

    /// `binom(A, 2)`: all pairs inside `a`.
    pub fn within(a: &[usize]) -> Self {
        let mut pairs = BTreeSet::new();
        for (i, &u) in a.iter().enumerate() {
            for &v in &a[i + 1..] {
                if u != v {
                    pairs.insert((u.min(v), u.max(v)));
                }
            }
        }
        Self { pairs }
    }

    /// `S(A, B) = {{a, b} : a in A, b in B, a != b}`.
    pub fn between(a: &[usize], b: &[usize]) -> Self {
        let mut pairs = BTreeSet::new();
        for &u in a {
            for &v in b {
                if u != v {
                    pairs.insert((u.min(v), u.max(v)));
                }
            }
        }
        Self { pairs }
    }

    /// The star `S(v, B)`.
    pub fn star(v: usize, b: &[usize]) -> Self {
        Self::between(&[v], b)
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return input(format!("potential edge needs distinct endpoints, got {{{u},{v}}}"));
        }
        Ok(self.pairs.insert((u.min(v), u.max(v))))
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.contains(&(u.min(v), u.max(v)))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.pairs.iter()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { pairs: self.pairs.union(&other.pairs).copied().collect() }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self { pairs: self.pairs.difference(&other.pairs).copied().collect() }
    }

    /// `S|_Σ = S ∩ Σ`.
    pub fn restrict(&self, sigma: &Self) -> Self {
        Self { pairs: self.pairs.intersection(&sigma.pairs).copied().collect() }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.pairs.is_disjoint(&other.pairs)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

impl FromIterator<(usize, usize)> for PotentialEdgeSet {
    /// Collects pairs, silently dropping degenerate `{v, v}` entries.
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        Self { pairs: iter.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect() }
    }
}

/// Small named graphs used by tests, fixtures and the CLI.
pub mod families {
    use super::Graph;

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid")
    }

    /// `K_{1,leaves}` with centre 0.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("valid")
    }

    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::from_edges(10, outer.chain(spokes).chain(inner)).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parity_examples() {
        let k3 = complete(3);
        assert_eq!(k3.parity(&PotentialEdgeSet::within(&[0, 1, 2])).unwrap(), 1);
        let e5 = Graph::empty(5);
        assert_eq!(e5.parity(&PotentialEdgeSet::within(&[0, 1, 2, 3, 4])).unwrap(), 0);
        let c4 = cycle(4);
        assert_eq!(c4.parity(&PotentialEdgeSet::between(&[0], &[1, 2, 3])).unwrap(), 0);
    }

    #[test]
    fn parity_rejects_out_of_range() {
        let g = Graph::empty(3);
        let s = PotentialEdgeSet::from_pairs([(0, 7)]).unwrap();
        assert!(matches!(g.parity(&s), Err(Error::Input(_))));
    }

    #[test]
    fn invariants_of_named_graphs() {
        for g in [complete(5), cycle(7), path(4), star(3), petersen()] {
            let degree_sum: usize = (0..g.n()).map(|v| g.degree(v)).sum();
            assert_eq!(degree_sum, 2 * g.edge_count());
            for (u, v) in g.edges() {
                assert!(g.has_edge(v, u));
                assert_ne!(u, v);
            }
        }
        assert_eq!(petersen().edge_count(), 15);
        assert!((0..10).all(|v| petersen().degree(v) == 3));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn text_format() {
        let g = cycle(4);
        assert_eq!(g.to_text(), "4 4\n0 1\n0 3\n1 2\n2 3\n");
        assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g);
        assert!(Graph::from_text("3 1\n2 1\n").is_err());
        assert!(Graph::from_text("3 2\n0 1\n").is_err());
    }

    #[test]
    fn induced_relabels() {
        let g = cycle(5);
        let h = g.induced(&[4, 0, 1]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..12).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
                Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn parity_is_additive_over_disjoint_sets(g in arb_graph(), split in any::<u64>()) {
            let all = PotentialEdgeSet::within(&(0..g.n()).collect::<Vec<_>>());
            let (s1, s2): (Vec<_>, Vec<_>) = all.iter().enumerate().partition(|(i, _)| (split >> (i % 64)) & 1 == 1);
            let s1: PotentialEdgeSet = s1.into_iter().map(|(_, &e)| e).collect();
            let s2: PotentialEdgeSet = s2.into_iter().map(|(_, &e)| e).collect();
            prop_assert!(s1.is_disjoint(&s2));
            let joint = g.parity(&s1.union(&s2)).unwrap();
            prop_assert_eq!(joint, g.parity(&s1).unwrap() ^ g.parity(&s2).unwrap());
            prop_assert_eq!(joint as usize, g.edge_count() % 2);
        }

        #[test]
        fn star_parity_matches_pair_iteration(g in arb_graph(), v in 0usize..12, mask in any::<u64>()) {
            let v = v % g.n();
            let within: Vec<usize> = (0..g.n()).filter(|u| (mask >> u) & 1 == 1).collect();
            let fast = g.star_parity(v, &VertexSet::from_iter(g.n(), within.iter().copied()));
            prop_assert_eq!(fast, g.parity(&PotentialEdgeSet::star(v, &within)).unwrap());
        }

        #[test]
        fn text_round_trip(g in arb_graph()) {
            prop_assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g);
        }
    }
}

//! Weighted, optionally signed, simple undirected graphs and their readers.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setfn::SubsetId;

/// Undirected edge stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
    pub sign: i8,
}

impl Edge {
    /// Signed weight `sign * w`.
    pub fn signed_weight(&self) -> f64 {
        self.sign as f64 * self.w
    }
}

/// Simple weighted graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    #[serde(skip)]
    adj: Vec<Vec<(usize, usize)>>,
    #[serde(skip)]
    deg: Vec<f64>,
}

impl Graph {
    /// Unsigned graph from `(u, v, w)` triples.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        Self::new_signed(n, edges.into_iter().map(|(u, v, w)| (u, v, w, 1i8)))
    }

    /// Signed graph from `(u, v, w, sign)` tuples, `w > 0`, `sign = +-1`.
    pub fn new_signed(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64, i8)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v, w, s) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("loop at vertex {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has sign {s}, expected +1 or -1"
                )));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({a}, {b})")));
            }
            list.push(Edge {
                u: a,
                v: b,
                w,
                sign: s,
            });
        }
        list.sort_by_key(|e| (e.u, e.v));
        let mut g = Self {
            n,
            edges: list,
            adj: Vec::new(),
            deg: Vec::new(),
        };
        g.rebuild();
        Ok(g)
    }

    fn rebuild(&mut self) {
        self.adj = vec![Vec::new(); self.n];
        self.deg = vec![0.0; self.n];
        for (k, e) in self.edges.iter().enumerate() {
            self.adj[e.u].push((e.v, k));
            self.adj[e.v].push((e.u, k));
            self.deg[e.u] += e.w;
            self.deg[e.v] += e.w;
        }
        for a in &mut self.adj {
            a.sort_unstable();
        }
    }

    pub fn complete(n: usize) -> Self {
        let e = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
        Self::new(n, e).expect("complete graph")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i, 1.0))).expect("path graph")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs n >= 3");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("cycle graph")
    }

    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0))).expect("star graph")
    }

    pub fn petersen() -> Self {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5, 1.0));
            e.push((i, i + 5, 1.0));
            e.push((5 + i, 5 + (i + 2) % 5, 1.0));
        }
        Self::new(10, e).expect("petersen graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `i` as `(j, edge index)`, sorted by `j`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.deg[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.deg
    }

    /// Number of neighbors (ignores weights).
    pub fn degree_count(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn vol(&self, a: SubsetId) -> f64 {
        a.elems().iter().map(|&i| self.deg[i]).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.deg.iter().sum()
    }

    pub fn is_signed(&self) -> bool {
        self.edges.iter().any(|e| e.sign < 0)
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.adj
            .get(i)?
            .binary_search_by_key(&j, |&(v, _)| v)
            .ok()
            .map(|p| self.adj[i][p].1)
    }

    /// Weight of edges with exactly one end in `a`.
    pub fn cut(&self, a: SubsetId) -> f64 {
        self.edges
            .iter()
            .filter(|e| a.contains(e.u) != a.contains(e.v))
            .map(|e| e.w)
            .sum()
    }

    /// Weight of edges between disjoint sets `a` and `b`.
    pub fn edges_between(&self, a: SubsetId, b: SubsetId) -> f64 {
        self.edges
            .iter()
            .filter(|e| {
                (a.contains(e.u) && b.contains(e.v)) || (b.contains(e.u) && a.contains(e.v))
            })
            .map(|e| e.w)
            .sum()
    }

    /// Weight of edges with both ends in `a`.
    pub fn inner_weight(&self, a: SubsetId) -> f64 {
        self.edges
            .iter()
            .filter(|e| a.contains(e.u) && a.contains(e.v))
            .map(|e| e.w)
            .sum()
    }

    /// Closed neighborhood `N[i]`, sorted.
    pub fn closed_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.adj[i].iter().map(|&(j, _)| j).collect();
        v.push(i);
        v.sort_unstable();
        v
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut q = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = q.pop_front() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    q.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Hop distances from `s` (`usize::MAX` when unreachable).
    pub fn bfs_distances(&self, s: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.n];
        d[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &(v, _) in &self.adj[u] {
                if d[v] == usize::MAX {
                    d[v] = d[u] + 1;
                    q.push_back(v);
                }
            }
        }
        d
    }

    /// Line graph: one vertex per edge, adjacent when edges share an endpoint.
    pub fn line_graph(&self) -> Self {
        let m = self.m();
        let mut e = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let (x, y) = (&self.edges[a], &self.edges[b]);
                if x.u == y.u || x.u == y.v || x.v == y.u || x.v == y.v {
                    e.push((a, b, 1.0));
                }
            }
        }
        Self::new(m.max(1), e).expect("line graph")
    }

    /// Unweighted complement.
    pub fn complement(&self) -> Self {
        let n = self.n;
        let e: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.has_edge(i, j))
            .map(|(i, j)| (i, j, 1.0))
            .collect();
        Self::new(n, e).expect("complement graph")
    }

    /// Induced subgraph on `keep`; returns the graph and the kept vertex list.
    pub fn induced(&self, keep: SubsetId) -> (Self, Vec<usize>) {
        let verts = keep.elems();
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in verts.iter().enumerate() {
            pos[v] = k;
        }
        let e: Vec<_> = self
            .edges
            .iter()
            .filter(|e| keep.contains(e.u) && keep.contains(e.v))
            .map(|e| (pos[e.u], pos[e.v], e.w, e.sign))
            .collect();
        let g = Self::new_signed(verts.len().max(1), e).expect("induced graph");
        (g, verts)
    }

    /// Same edges with new signs.
    pub fn with_signs(&self, signs: &[i8]) -> Result<Self> {
        if signs.len() != self.m() {
            return Err(Error::InvalidArgument("sign vector length mismatch".into()));
        }
        Self::new_signed(
            self.n,
            self.edges
                .iter()
                .zip(signs)
                .map(|(e, &s)| (e.u, e.v, e.w, s)),
        )
    }

    /// Switching at `v`: negate the sign of every edge incident to `v`.
    pub fn switch_at(&self, v: usize) -> Self {
        let signs: Vec<i8> = self
            .edges
            .iter()
            .map(|e| if e.u == v || e.v == v { -e.sign } else { e.sign })
            .collect();
        self.with_signs(&signs).expect("switching")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(n={}, m={})", self.n, self.m())
    }
}

/// Input format of a graph file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphFormat {
    /// `u v [w] [s]` per line, `#` comments.
    EdgeList,
    /// `p edge n m` header and `e u v [w]` lines, 1-indexed.
    Dimacs,
}

/// Parse a graph from text. `base` is the index of the first vertex in edge lists.
pub fn read_graph(text: &str, format: GraphFormat, base: usize) -> Result<Graph> {
    match format {
        GraphFormat::EdgeList => read_edge_list(text, base),
        GraphFormat::Dimacs => read_dimacs(text),
    }
}

pub fn read_graph_file(path: &Path, format: GraphFormat, base: usize) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    read_graph(&text, format, base)
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} '{tok}'"),
    })
}

fn read_edge_list(text: &str, base: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 4 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 'u v [w] [s]', got '{body}'"),
            });
        }
        let u: usize = parse_num(toks[0], line, "vertex")?;
        let v: usize = parse_num(toks[1], line, "vertex")?;
        if u < base || v < base {
            return Err(Error::Parse {
                line,
                msg: format!("vertex index below base {base}"),
            });
        }
        let w: f64 = match toks.get(2) {
            Some(t) => parse_num(t, line, "weight")?,
            None => 1.0,
        };
        let s: i8 = match toks.get(3) {
            Some(t) => {
                let s: f64 = parse_num(t, line, "sign")?;
                if s > 0.0 {
                    1
                } else if s < 0.0 {
                    -1
                } else {
                    return Err(Error::Parse {
                        line,
                        msg: "sign must be nonzero".into(),
                    });
                }
            }
            None => 1,
        };
        let (u, v) = (u - base, v - base);
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w, s, line));
    }
    check_edges(n, edges)
}

fn check_edges(n: usize, edges: Vec<(usize, usize, f64, i8, usize)>) -> Result<Graph> {
    let mut seen = HashSet::new();
    for &(u, v, w, _, line) in &edges {
        if u == v {
            return Err(Error::Parse {
                line,
                msg: format!("loop at vertex {u}"),
            });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Parse {
                line,
                msg: format!("non-positive weight {w}"),
            });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate edge ({u}, {v})"),
            });
        }
    }
    Graph::new_signed(n.max(1), edges.into_iter().map(|(u, v, w, s, _)| (u, v, w, s)))
}

fn read_dimacs(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => continue,
            Some(&"p") => {
                if toks.len() < 4 {
                    return Err(Error::Parse {
                        line,
                        msg: "expected 'p edge n m'".into(),
                    });
                }
                n = Some(parse_num(toks[2], line, "vertex count")?);
            }
            Some(&"e") => {
                let nn = n.ok_or(Error::Parse {
                    line,
                    msg: "edge before problem line".into(),
                })?;
                if toks.len() < 3 {
                    return Err(Error::Parse {
                        line,
                        msg: "expected 'e u v [w]'".into(),
                    });
                }
                let u: usize = parse_num(toks[1], line, "vertex")?;
                let v: usize = parse_num(toks[2], line, "vertex")?;
                if u == 0 || v == 0 || u > nn || v > nn {
                    return Err(Error::Parse {
                        line,
                        msg: format!("vertex out of range 1..={nn}"),
                    });
                }
                let w: f64 = match toks.get(3) {
                    Some(t) => parse_num(t, line, "weight")?,
                    None => 1.0,
                };
                edges.push((u - 1, v - 1, w, 1i8, line));
            }
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown line type '{other}'"),
                })
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing problem line".into(),
    })?;
    check_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_one_indexed_path() {
        let g = read_graph("1 2 1.0\n2 3 1.0", GraphFormat::EdgeList, 1).unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn dimacs_triangle() {
        let text = "c triangle\np edge 3 3\ne 1 2\ne 1 3\ne 2 3\n";
        let g = read_graph(text, GraphFormat::Dimacs, 0).unwrap();
        assert_eq!(g, Graph::complete(3));
        for i in 0..3 {
            assert_eq!(g.degree_count(i), 2);
        }
    }

    #[test]
    fn signed_column() {
        let g = read_graph("1 2 1.0 -1", GraphFormat::EdgeList, 1).unwrap();
        assert_eq!(g.edges()[0].sign, -1);
        assert!(g.is_signed());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = read_graph("0 1\n# c\n0 0\n", GraphFormat::EdgeList, 0).unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                msg: "loop at vertex 0".into()
            }
        );
        let e = read_graph("0 1\n1 0\n", GraphFormat::EdgeList, 0).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = read_graph("0 x\n", GraphFormat::EdgeList, 0).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn petersen_is_cubic() {
        let g = Graph::petersen();
        assert_eq!(g.m(), 15);
        assert!((0..10).all(|i| g.degree_count(i) == 3));
        assert!(g.is_connected());
    }

    #[test]
    fn cut_and_volume() {
        let g = Graph::complete(3);
        assert_eq!(g.cut(SubsetId::singleton(0)), 2.0);
        assert_eq!(g.vol(SubsetId::full(3)), 6.0);
        assert_eq!(g.edges_between(SubsetId(1), SubsetId(2)), 1.0);
        assert_eq!(g.inner_weight(SubsetId(3)), 1.0);
    }

    #[test]
    fn line_graph_of_path() {
        let l = Graph::path(4).line_graph();
        assert_eq!(l, Graph::path(3));
    }
}

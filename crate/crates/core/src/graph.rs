//! Metric graphs with complex vertex-condition matrices.
//!
//! Each edge carries a positive length and a coordinate running from its
//! tail (`x = 0`) to its head (`x = l`). Each vertex stores an ordered list
//! of incident edge-ends; the columns of its condition pair `(A, B)` follow
//! that order. Outgoing derivatives are `+f'(0)` at a tail and `−f'(l)` at a
//! head.

use crate::error::{Error, Result};
use crate::linalg::{
    cr, hstack, max_abs, rank, reduce_rows as reduce_rows_impl, solution_space, subspace_distance,
    CMat,
};
use crate::TOL_RANK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Tail,
    Head,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Tail => Side::Head,
            Side::Head => Side::Tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub side: Side,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Neumann,
    Dirichlet,
    Explicit,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub ends: Vec<EdgeEnd>,
    pub a: CMat,
    pub b: CMat,
    pub kind: BcKind,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct MetricGraph {
    pub edges: Vec<Edge>,
    pub vertices: Vec<Vertex>,
}

/// Neumann condition matrices for a degree-`d` vertex: value differences
/// plus a zero row for `A`, zeros plus an all-ones row for `B`. For `d = 1`
/// this is `A = (0)`, `B = (1)`.
pub fn neumann_pair(d: usize) -> (CMat, CMat) {
    assert!(d >= 1);
    let mut a = CMat::zeros(d, d);
    let mut b = CMat::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        a[(i, i)] = cr(1.0);
        a[(i, i + 1)] = cr(-1.0);
    }
    for j in 0..d {
        b[(d - 1, j)] = cr(1.0);
    }
    (a, b)
}

/// Dirichlet condition for a degree-1 vertex: `A = (1)`, `B = (0)`.
/// Higher degrees are rejected.
pub fn dirichlet_pair(d: usize) -> Result<(CMat, CMat)> {
    if d != 1 {
        return Err(Error::InvalidGraph(format!(
            "Dirichlet condition is only defined for degree-1 vertices (got degree {d})"
        )));
    }
    Ok((CMat::from_element(1, 1, cr(1.0)), CMat::zeros(1, 1)))
}

#[derive(Debug, Clone)]
enum BcSpec {
    Neumann,
    Dirichlet,
    Explicit(CMat, CMat),
}

/// Incremental builder. Vertex end lists are sorted by `(edge id, side)`
/// with tails first, which fixes the column order of all condition pairs.
pub struct GraphBuilder {
    names: Vec<String>,
    specs: Vec<BcSpec>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder {
            names: Vec::new(),
            specs: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn vertex(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.specs.push(BcSpec::Neumann);
        self.names.len() - 1
    }

    pub fn edge(&mut self, name: impl Into<String>, tail: usize, head: usize, length: f64) -> usize {
        self.edges.push(Edge {
            tail,
            head,
            length,
            name: name.into(),
        });
        self.edges.len() - 1
    }

    pub fn neumann(&mut self, v: usize) -> &mut Self {
        self.specs[v] = BcSpec::Neumann;
        self
    }

    pub fn dirichlet(&mut self, v: usize) -> &mut Self {
        self.specs[v] = BcSpec::Dirichlet;
        self
    }

    pub fn condition(&mut self, v: usize, a: CMat, b: CMat) -> &mut Self {
        self.specs[v] = BcSpec::Explicit(a, b);
        self
    }

    pub fn build(self) -> Result<MetricGraph> {
        let nv = self.names.len();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= nv || e.head >= nv {
                return Err(Error::InvalidGraph(format!("edge {i} references a missing vertex")));
            }
            if !(e.length > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {} has nonpositive length {}",
                    e.name, e.length
                )));
            }
        }
        let mut ends: Vec<Vec<EdgeEnd>> = vec![Vec::new(); nv];
        for (i, e) in self.edges.iter().enumerate() {
            ends[e.tail].push(EdgeEnd { edge: i, side: Side::Tail });
            ends[e.head].push(EdgeEnd { edge: i, side: Side::Head });
        }
        let mut vertices = Vec::with_capacity(nv);
        for (v, mut list) in ends.into_iter().enumerate() {
            list.sort();
            let d = list.len();
            if d == 0 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {} is isolated",
                    self.names[v]
                )));
            }
            let (a, b, kind) = match &self.specs[v] {
                BcSpec::Neumann => {
                    let (a, b) = neumann_pair(d);
                    (a, b, BcKind::Neumann)
                }
                BcSpec::Dirichlet => {
                    let (a, b) = dirichlet_pair(d)?;
                    (a, b, BcKind::Dirichlet)
                }
                BcSpec::Explicit(a, b) => {
                    if a.nrows() != d || a.ncols() != d || b.nrows() != d || b.ncols() != d {
                        return Err(Error::InvalidGraph(format!(
                            "vertex {}: condition matrices must be {d}×{d}",
                            self.names[v]
                        )));
                    }
                    (a.clone(), b.clone(), BcKind::Explicit)
                }
            };
            vertices.push(Vertex {
                ends: list,
                a,
                b,
                kind,
                name: self.names[v].clone(),
            });
        }
        Ok(MetricGraph {
            edges: self.edges,
            vertices,
        })
    }
}

impl Default for GraphBuilder {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Default)]
pub struct GraphReport {
    pub issues: Vec<String>,
}

impl GraphReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl MetricGraph {
    pub fn empty() -> Self {
        MetricGraph {
            edges: Vec::new(),
            vertices: Vec::new(),
        }
    }

    pub fn is_graph_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].ends.len()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Index of an end inside its vertex's ordered list.
    pub fn end_position(&self, v: usize, end: EdgeEnd) -> Option<usize> {
        self.vertices[v].ends.iter().position(|&x| x == end)
    }

    pub fn vertex_of_end(&self, end: EdgeEnd) -> usize {
        let e = &self.edges[end.edge];
        match end.side {
            Side::Tail => e.tail,
            Side::Head => e.head,
        }
    }

    /// Structural and rank validation. Collects problems instead of
    /// failing on the first.
    pub fn validate(&self) -> GraphReport {
        let mut report = GraphReport::default();
        let mut seen = vec![0usize; self.edges.len() * 2];
        for (ei, e) in self.edges.iter().enumerate() {
            if !(e.length > 0.0) {
                report
                    .issues
                    .push(format!("edge {} has nonpositive length", e.name));
            }
            if e.tail >= self.vertices.len() || e.head >= self.vertices.len() {
                report
                    .issues
                    .push(format!("edge {} references a missing vertex", e.name));
                continue;
            }
            let _ = ei;
        }
        for (vi, v) in self.vertices.iter().enumerate() {
            let d = v.ends.len();
            for &end in &v.ends {
                if end.edge >= self.edges.len() {
                    report
                        .issues
                        .push(format!("vertex {} lists a missing edge", v.name));
                    continue;
                }
                if self.vertex_of_end(end) != vi {
                    report.issues.push(format!(
                        "vertex {} lists an end that belongs elsewhere",
                        v.name
                    ));
                }
                let slot = end.edge * 2 + if end.side == Side::Tail { 0 } else { 1 };
                seen[slot] += 1;
            }
            if v.a.nrows() != d || v.a.ncols() != d || v.b.nrows() != d || v.b.ncols() != d {
                report
                    .issues
                    .push(format!("vertex {}: condition matrices are not {d}×{d}", v.name));
                continue;
            }
            let stacked = hstack(&[v.a.clone(), v.b.clone()]);
            if rank(&stacked, TOL_RANK) != d {
                report.issues.push(format!(
                    "vertex {}: (A B) has rank {} < {d}",
                    v.name,
                    rank(&stacked, TOL_RANK)
                ));
            }
        }
        for (slot, &count) in seen.iter().enumerate() {
            if count != 1 {
                let e = slot / 2;
                report.issues.push(format!(
                    "end {:?} of edge {} appears {count} times across vertices",
                    if slot % 2 == 0 { Side::Tail } else { Side::Head },
                    self.edges[e].name,
                ));
            }
        }
        report
    }

    /// Kostrykin–Schrader self-adjointness: `A·B†` Hermitian at every
    /// vertex. Returns the overall verdict and one flag per vertex.
    pub fn is_self_adjoint(&self) -> (bool, Vec<bool>) {
        let per: Vec<bool> = self
            .vertices
            .iter()
            .map(|v| {
                let ab = &v.a * v.b.adjoint();
                let scale = max_abs(&ab).max(1.0);
                max_abs(&(ab.clone() - ab.adjoint())) < 1e-10 * scale
            })
            .collect();
        (per.iter().all(|&x| x), per)
    }

    /// True when the vertex condition has the Neumann solution set.
    pub fn is_neumann_vertex(&self, v: usize) -> bool {
        let d = self.degree(v);
        let (na, nb) = neumann_pair(d);
        let s1 = solution_space(&self.vertices[v].a, &self.vertices[v].b, TOL_RANK);
        let s2 = solution_space(&na, &nb, TOL_RANK);
        subspace_distance(&s1, &s2) < 1e-9
    }

    /// Splits an edge at fraction `t` of its length by inserting a degree-2
    /// Neumann vertex. The original edge id keeps the tail half; the new
    /// edge (appended) carries the head half, and the head vertex's end
    /// entry is rewritten in place so its condition column order is intact.
    pub fn add_dummy_vertex(&self, edge: usize, t: f64) -> Result<MetricGraph> {
        if edge >= self.edges.len() {
            return Err(Error::InvalidGraph(format!("no edge {edge}")));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidGraph(format!("split fraction {t} outside (0,1)")));
        }
        let mut g = self.clone();
        let old = g.edges[edge].clone();
        let mid = g.vertices.len();
        let new_edge = g.edges.len();
        g.edges[edge] = Edge {
            tail: old.tail,
            head: mid,
            length: old.length * t,
            name: format!("{}:a", old.name),
        };
        g.edges.push(Edge {
            tail: mid,
            head: old.head,
            length: old.length * (1.0 - t),
            name: format!("{}:b", old.name),
        });
        let (a, b) = neumann_pair(2);
        g.vertices.push(Vertex {
            ends: vec![
                EdgeEnd { edge, side: Side::Head },
                EdgeEnd { edge: new_edge, side: Side::Tail },
            ],
            a,
            b,
            kind: BcKind::Neumann,
            name: format!("{}:mid", old.name),
        });
        let head_v = &mut g.vertices[old.head];
        let pos = head_v
            .ends
            .iter()
            .position(|&e| e == EdgeEnd { edge, side: Side::Head })
            .expect("edge head listed at its head vertex");
        head_v.ends[pos] = EdgeEnd { edge: new_edge, side: Side::Head };
        Ok(g)
    }

    /// Removes a degree-2 Neumann vertex by joining its two edges. The new
    /// edge runs from the far end of the vertex's first listed edge to the
    /// far end of the second.
    pub fn merge_dummy_vertex(&self, v: usize) -> Result<MetricGraph> {
        if self.degree(v) != 2 {
            return Err(Error::InvalidGraph("merge needs a degree-2 vertex".into()));
        }
        if !self.is_neumann_vertex(v) {
            return Err(Error::InvalidGraph("merge needs a Neumann vertex".into()));
        }
        let e1 = self.vertices[v].ends[0];
        let e2 = self.vertices[v].ends[1];
        if e1.edge == e2.edge {
            return Err(Error::InvalidGraph("cannot merge a loop".into()));
        }
        let far = |end: EdgeEnd| EdgeEnd { edge: end.edge, side: end.side.flip() };
        let tail_end = far(e1);
        let head_end = far(e2);
        let length = self.edges[e1.edge].length + self.edges[e2.edge].length;
        let name = format!("{}+{}", self.edges[e1.edge].name, self.edges[e2.edge].name);

        // Rebuild with remapped indices.
        let mut edge_map = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if i == e1.edge || i == e2.edge {
                continue;
            }
            edge_map[i] = edges.len();
            edges.push(e.clone());
        }
        let joined = edges.len();
        edges.push(Edge {
            tail: 0, // fixed below
            head: 0,
            length,
            name,
        });
        let mut vertex_map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, w) in self.vertices.iter().enumerate() {
            if i == v {
                continue;
            }
            vertex_map[i] = vertices.len();
            vertices.push(w.clone());
        }
        for w in &mut vertices {
            for end in &mut w.ends {
                if *end == tail_end {
                    *end = EdgeEnd { edge: joined, side: Side::Tail };
                } else if *end == head_end {
                    *end = EdgeEnd { edge: joined, side: Side::Head };
                } else {
                    end.edge = edge_map[end.edge];
                }
            }
        }
        for e in edges.iter_mut().take(joined) {
            e.tail = vertex_map[e.tail];
            e.head = vertex_map[e.head];
        }
        edges[joined].tail = vertex_map[self.vertex_of_end(tail_end)];
        edges[joined].head = vertex_map[self.vertex_of_end(head_end)];
        Ok(MetricGraph { edges, vertices })
    }

    /// Disjoint union, relabelling the second graph's indices.
    pub fn disjoint_union(&self, other: &MetricGraph) -> MetricGraph {
        let ve = self.vertices.len();
        let ee = self.edges.len();
        let mut edges = self.edges.clone();
        for e in &other.edges {
            edges.push(Edge {
                tail: e.tail + ve,
                head: e.head + ve,
                length: e.length,
                name: format!("u:{}", e.name),
            });
        }
        let mut vertices = self.vertices.clone();
        for v in &other.vertices {
            let ends = v
                .ends
                .iter()
                .map(|end| EdgeEnd { edge: end.edge + ee, side: end.side })
                .collect();
            vertices.push(Vertex {
                ends,
                a: v.a.clone(),
                b: v.b.clone(),
                kind: v.kind,
                name: format!("u:{}", v.name),
            });
        }
        MetricGraph { edges, vertices }
    }
}

/// Row reduction of a rectangular condition pair to square shape with the
/// same solution set.
pub fn reduce_rows(a: &CMat, b: &CMat) -> Result<(CMat, CMat)> {
    reduce_rows_impl(a, b, TOL_RANK)
}

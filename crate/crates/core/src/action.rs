//! Group actions on metric graphs.
//!
//! An action stores, for every group element, a vertex permutation plus an
//! edge permutation with a per-edge orientation sign: `+1` when the element
//! maps the edge preserving its coordinate, `−1` when it reverses it. The
//! transport convention for functions is `(g·f)|_{g·e}(x) = f|_e(x)` for
//! sign `+1` and `f|_e(l − x)` for sign `−1`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{EdgeEnd, MetricGraph, Side};
use crate::group::{Elem, FiniteGroup, Subgroup};
use crate::linalg::{solution_space, subspace_distance, CMat};
use crate::linalg::cr;
use crate::TOL_RANK;

/// The image data of one group element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMap {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub signs: Vec<i8>,
}

impl ElementMap {
    pub fn identity(graph: &MetricGraph) -> Self {
        ElementMap {
            vertices: (0..graph.vertices.len()).collect(),
            edges: (0..graph.edges.len()).collect(),
            signs: vec![1; graph.edges.len()],
        }
    }

    fn compose(outer: &ElementMap, inner: &ElementMap) -> Self {
        ElementMap {
            vertices: inner.vertices.iter().map(|&v| outer.vertices[v]).collect(),
            edges: inner.edges.iter().map(|&e| outer.edges[e]).collect(),
            signs: inner
                .edges
                .iter()
                .zip(&inner.signs)
                .map(|(&e, &s)| outer.signs[e] * s)
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphAction {
    group: Arc<FiniteGroup>,
    maps: Vec<ElementMap>,
}

#[derive(Debug, Default)]
pub struct ActionReport {
    pub issues: Vec<String>,
}

impl ActionReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl GraphAction {
    /// Assembles an action from explicit per-element maps.
    pub fn from_maps(group: Arc<FiniteGroup>, maps: Vec<ElementMap>) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(Error::InvalidAction("one map per group element required".into()));
        }
        Ok(GraphAction { group, maps })
    }

    /// Completes an action from generator images using the group table.
    /// Generator edge maps may be omitted when they are forced by the vertex
    /// images (no parallel edges between the image endpoints).
    pub fn from_generators(
        graph: &MetricGraph,
        group: Arc<FiniteGroup>,
        generators: &[(Elem, ElementMap)],
    ) -> Result<Self> {
        let n = group.order();
        let mut maps: Vec<Option<ElementMap>> = vec![None; n];
        maps[group.identity()] = Some(ElementMap::identity(graph));
        let mut frontier = vec![group.identity()];
        while let Some(x) = frontier.pop() {
            let mx = maps[x].clone().unwrap();
            for (gen, gm) in generators {
                let y = group.mul(*gen, x);
                let my = ElementMap::compose(gm, &mx);
                match &maps[y] {
                    None => {
                        maps[y] = Some(my);
                        frontier.push(y);
                    }
                    Some(existing) => {
                        if *existing != my {
                            return Err(Error::InvalidAction(format!(
                                "generator images are inconsistent at element {}",
                                group.name(y)
                            )));
                        }
                    }
                }
            }
        }
        let maps: Option<Vec<ElementMap>> = maps.into_iter().collect();
        let maps = maps.ok_or_else(|| {
            Error::InvalidAction("generators do not generate the full group".into())
        })?;
        Ok(GraphAction { group, maps })
    }

    /// Derives a generator's edge map from its vertex map. Fails for loops
    /// and parallel edges, where the image edge is ambiguous.
    pub fn edge_map_from_vertices(
        graph: &MetricGraph,
        vertex_map: &[usize],
    ) -> Result<(Vec<usize>, Vec<i8>)> {
        let mut edges = Vec::with_capacity(graph.edges.len());
        let mut signs = Vec::with_capacity(graph.edges.len());
        for e in &graph.edges {
            let (it, ih) = (vertex_map[e.tail], vertex_map[e.head]);
            if it == ih {
                return Err(Error::InvalidAction(
                    "cannot infer edge images in the presence of loops".into(),
                ));
            }
            let mut found = None;
            for (j, f) in graph.edges.iter().enumerate() {
                let fwd = f.tail == it && f.head == ih;
                let rev = f.tail == ih && f.head == it;
                if fwd || rev {
                    if found.is_some() {
                        return Err(Error::InvalidAction(
                            "parallel edges make the edge image ambiguous; specify it explicitly"
                                .into(),
                        ));
                    }
                    found = Some((j, if fwd { 1i8 } else { -1i8 }));
                }
            }
            let (j, s) = found.ok_or_else(|| {
                Error::InvalidAction(format!(
                    "vertex image of edge {} spans no edge",
                    e.name
                ))
            })?;
            edges.push(j);
            signs.push(s);
        }
        Ok((edges, signs))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn vertex_image(&self, g: Elem, v: usize) -> usize {
        self.maps[g].vertices[v]
    }

    pub fn edge_image(&self, g: Elem, e: usize) -> usize {
        self.maps[g].edges[e]
    }

    pub fn edge_sign(&self, g: Elem, e: usize) -> i8 {
        self.maps[g].signs[e]
    }

    /// Image of an edge-end: tails go to tails under sign `+1` and to heads
    /// under sign `−1`.
    pub fn end_image(&self, g: Elem, end: EdgeEnd) -> EdgeEnd {
        let edge = self.edge_image(g, end.edge);
        let side = if self.edge_sign(g, end.edge) == 1 {
            end.side
        } else {
            end.side.flip()
        };
        EdgeEnd { edge, side }
    }

    pub fn map(&self, g: Elem) -> &ElementMap {
        &self.maps[g]
    }

    /// Restriction of the action to a subgroup, re-indexed over the
    /// subgroup's own group.
    pub fn restrict(&self, sub: &Subgroup) -> Result<GraphAction> {
        if !crate::group::same_group(sub.parent(), &self.group) {
            return Err(Error::GroupMismatch("restrict: subgroup of another group".into()));
        }
        let maps = (0..sub.len()).map(|i| self.maps[sub.embed(i)].clone()).collect();
        Ok(GraphAction {
            group: sub.group().clone(),
            maps,
        })
    }

    /// Full validation: homomorphism property, trivial identity, length
    /// preservation, incidence compatibility, and boundary-condition
    /// preservation (solution sets compared under the induced end
    /// reordering).
    pub fn validate(&self, graph: &MetricGraph) -> ActionReport {
        let mut report = ActionReport::default();
        let g = &self.group;
        let nv = graph.vertices.len();
        let ne = graph.edges.len();
        for m in &self.maps {
            if m.vertices.len() != nv || m.edges.len() != ne || m.signs.len() != ne {
                report.issues.push("map sizes do not match the graph".into());
                return report;
            }
        }
        let id = &self.maps[g.identity()];
        if *id != ElementMap::identity(graph) {
            report.issues.push("identity does not act trivially".into());
        }
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                let composed = ElementMap::compose(&self.maps[a], &self.maps[b]);
                if composed != self.maps[ab] {
                    report.issues.push(format!(
                        "homomorphism fails: map({})∘map({}) ≠ map({})",
                        g.name(a),
                        g.name(b),
                        g.name(ab)
                    ));
                }
            }
        }
        for a in g.elements() {
            for (e, edge) in graph.edges.iter().enumerate() {
                let ie = self.edge_image(a, e);
                if (graph.edges[ie].length - edge.length).abs() > 1e-12 * edge.length.max(1.0) {
                    report.issues.push(format!(
                        "element {} changes the length of edge {}",
                        g.name(a),
                        edge.name
                    ));
                }
                // endpoint compatibility
                let it = self.vertex_image(a, edge.tail);
                let ih = self.vertex_image(a, edge.head);
                let (want_t, want_h) = if self.edge_sign(a, e) == 1 {
                    (graph.edges[ie].tail, graph.edges[ie].head)
                } else {
                    (graph.edges[ie].head, graph.edges[ie].tail)
                };
                if it != want_t || ih != want_h {
                    report.issues.push(format!(
                        "element {} maps edge {} inconsistently with its vertices",
                        g.name(a),
                        edge.name
                    ));
                }
            }
        }
        // Boundary conditions define the same solution set at image vertices.
        for a in g.elements() {
            for (v, vert) in graph.vertices.iter().enumerate() {
                let iv = self.vertex_image(a, v);
                let d = vert.ends.len();
                if graph.vertices[iv].ends.len() != d {
                    report.issues.push(format!(
                        "element {} maps vertex {} to one of different degree",
                        g.name(a),
                        vert.name
                    ));
                    continue;
                }
                // Permutation matrix: x' = P x with x indexed by ends of v
                // and x' by ends of the image vertex.
                let mut p = CMat::zeros(d, d);
                let mut ok = true;
                for (l, &end) in vert.ends.iter().enumerate() {
                    let img = self.end_image(a, end);
                    match graph.end_position(iv, img) {
                        Some(lp) => p[(lp, l)] = cr(1.0),
                        None => {
                            ok = false;
                            report.issues.push(format!(
                                "element {} maps an end of vertex {} outside vertex {}",
                                g.name(a),
                                vert.name,
                                graph.vertices[iv].name
                            ));
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let s1 = solution_space(&vert.a, &vert.b, TOL_RANK);
                let target = &graph.vertices[iv];
                let s2 = solution_space(&(&target.a * &p), &(&target.b * &p), TOL_RANK);
                if subspace_distance(&s1, &s2) > 1e-9 {
                    report.issues.push(format!(
                        "element {} does not preserve the conditions at vertex {}",
                        g.name(a),
                        vert.name
                    ));
                }
            }
        }
        report
    }

    /// Setwise stabilizer of an edge (orientation-reversing elements
    /// included; query them with [`GraphAction::edge_reversers`]).
    pub fn edge_stabilizer(&self, e: usize) -> Subgroup {
        let elems: Vec<Elem> = self
            .group
            .elements()
            .filter(|&g| self.edge_image(g, e) == e)
            .collect();
        Subgroup::from_elements(&self.group, &elems).expect("stabilizer is a subgroup")
    }

    /// Elements that map the edge onto itself with reversed orientation.
    pub fn edge_reversers(&self, e: usize) -> Vec<Elem> {
        self.group
            .elements()
            .filter(|&g| self.edge_image(g, e) == e && self.edge_sign(g, e) == -1)
            .collect()
    }

    pub fn vertex_stabilizer(&self, v: usize) -> Subgroup {
        let elems: Vec<Elem> = self
            .group
            .elements()
            .filter(|&g| self.vertex_image(g, v) == v)
            .collect();
        Subgroup::from_elements(&self.group, &elems).expect("stabilizer is a subgroup")
    }

    /// Freeness of the action (setwise stabilizers trivial).
    pub fn is_free(&self, graph: &MetricGraph) -> FreeReport {
        let on_edges = (0..graph.edges.len()).all(|e| self.edge_stabilizer(e).len() == 1);
        let on_vertices =
            (0..graph.vertices.len()).all(|v| self.vertex_stabilizer(v).len() == 1);
        FreeReport {
            free_on_edges: on_edges,
            free_on_vertices: on_vertices,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeReport {
    pub free_on_edges: bool,
    pub free_on_vertices: bool,
}

/// Orbit structure of an action with canonical (minimal-id) representatives
/// and per-item transporters.
#[derive(Debug, Clone)]
pub struct OrbitData {
    /// Orbit index per edge.
    pub edge_orbit: Vec<usize>,
    /// Representative edge per orbit (minimal id unless overridden).
    pub edge_reps: Vec<usize>,
    /// Minimal group element carrying the orbit representative onto each
    /// edge, with the orientation sign of that move.
    pub edge_transporter: Vec<(Elem, i8)>,
    pub vertex_orbit: Vec<usize>,
    pub vertex_reps: Vec<usize>,
    pub vertex_transporter: Vec<Elem>,
}

impl OrbitData {
    pub fn new(graph: &MetricGraph, action: &GraphAction) -> Self {
        Self::with_reps(graph, action, None, None).expect("canonical representatives")
    }

    /// Orbit data with optional representative overrides (one edge / vertex
    /// per orbit; every orbit keeps its canonical representative unless one
    /// of the listed items lies in it).
    pub fn with_reps(
        graph: &MetricGraph,
        action: &GraphAction,
        edge_reps: Option<&[usize]>,
        vertex_reps: Option<&[usize]>,
    ) -> Result<Self> {
        let ne = graph.edges.len();
        let nv = graph.vertices.len();
        let g = action.group();

        let mut edge_orbit = vec![usize::MAX; ne];
        let mut canonical_edges = Vec::new();
        for e in 0..ne {
            if edge_orbit[e] != usize::MAX {
                continue;
            }
            let orbit = canonical_edges.len();
            for a in g.elements() {
                edge_orbit[action.edge_image(a, e)] = orbit;
            }
            canonical_edges.push(e);
        }
        let mut reps = canonical_edges.clone();
        if let Some(over) = edge_reps {
            let mut used = vec![false; reps.len()];
            for &e in over {
                if e >= ne {
                    return Err(Error::InvalidAction(format!("edge override {e} out of range")));
                }
                let o = edge_orbit[e];
                if used[o] {
                    return Err(Error::InvalidAction(
                        "two edge representatives in one orbit".into(),
                    ));
                }
                used[o] = true;
                reps[o] = e;
            }
        }
        let mut edge_transporter = vec![(usize::MAX, 1i8); ne];
        for (o, &r) in reps.iter().enumerate() {
            for a in g.elements() {
                let img = action.edge_image(a, r);
                if edge_transporter[img].0 == usize::MAX {
                    edge_transporter[img] = (a, action.edge_sign(a, r));
                }
            }
            let _ = o;
        }

        let mut vertex_orbit = vec![usize::MAX; nv];
        let mut canonical_vertices = Vec::new();
        for v in 0..nv {
            if vertex_orbit[v] != usize::MAX {
                continue;
            }
            let orbit = canonical_vertices.len();
            for a in g.elements() {
                vertex_orbit[action.vertex_image(a, v)] = orbit;
            }
            canonical_vertices.push(v);
        }
        let mut vreps = canonical_vertices.clone();
        if let Some(over) = vertex_reps {
            let mut used = vec![false; vreps.len()];
            for &v in over {
                if v >= nv {
                    return Err(Error::InvalidAction(format!(
                        "vertex override {v} out of range"
                    )));
                }
                let o = vertex_orbit[v];
                if used[o] {
                    return Err(Error::InvalidAction(
                        "two vertex representatives in one orbit".into(),
                    ));
                }
                used[o] = true;
                vreps[o] = v;
            }
        }
        let mut vertex_transporter = vec![usize::MAX; nv];
        for &r in &vreps {
            for a in g.elements() {
                let img = action.vertex_image(a, r);
                if vertex_transporter[img] == usize::MAX {
                    vertex_transporter[img] = a;
                }
            }
        }

        Ok(OrbitData {
            edge_orbit,
            edge_reps: reps,
            edge_transporter,
            vertex_orbit,
            vertex_reps: vreps,
            vertex_transporter,
        })
    }

    pub fn edge_orbit_count(&self) -> usize {
        self.edge_reps.len()
    }

    pub fn vertex_orbit_count(&self) -> usize {
        self.vertex_reps.len()
    }

    pub fn edges_of_orbit(&self, orbit: usize) -> Vec<usize> {
        (0..self.edge_orbit.len())
            .filter(|&e| self.edge_orbit[e] == orbit)
            .collect()
    }
}

/// Preprocessing required by the quotient construction: inserts midpoint
/// dummy vertices, equivariantly over whole edge orbits, until no group
/// element carries a vertex to one of its neighbours (which also rules out
/// loops and edges mapped onto themselves reversed).
pub fn ensure_quotient_ready(
    graph: &MetricGraph,
    action: &GraphAction,
) -> Result<(MetricGraph, GraphAction, bool)> {
    let mut graph = graph.clone();
    let mut action = action.clone();
    let mut changed = false;
    for pass in 0.. {
        let offending = neighbour_violations(&graph, &action);
        if offending.is_empty() {
            break;
        }
        if pass >= 2 {
            return Err(Error::InvalidAction(
                "dummy-vertex insertion did not stabilise after two passes".into(),
            ));
        }
        changed = true;
        let orbits = OrbitData::new(&graph, &action);
        let mut mark = vec![false; orbits.edge_orbit_count()];
        for &e in &offending {
            mark[orbits.edge_orbit[e]] = true;
        }
        let split: Vec<usize> = (0..graph.edges.len())
            .filter(|&e| mark[orbits.edge_orbit[e]])
            .collect();
        let (g2, a2) = subdivide_edges(&graph, &action, &split)?;
        graph = g2;
        action = a2;
    }
    Ok((graph, action, changed))
}

/// Edges witnessing a violation of the no-vertex-to-neighbour condition.
fn neighbour_violations(graph: &MetricGraph, action: &GraphAction) -> Vec<usize> {
    let mut bad = Vec::new();
    for (e, edge) in graph.edges.iter().enumerate() {
        if edge.tail == edge.head {
            bad.push(e); // loop: the identity already carries tail to a neighbour
            continue;
        }
        let hit = action.group().elements().any(|g| {
            action.vertex_image(g, edge.tail) == edge.head
                || action.vertex_image(g, edge.head) == edge.tail
        });
        if hit {
            bad.push(e);
        }
    }
    bad
}

/// Splits the listed edges at their midpoint and extends the action. The
/// edge set must be action-invariant.
fn subdivide_edges(
    graph: &MetricGraph,
    action: &GraphAction,
    edges: &[usize],
) -> Result<(MetricGraph, GraphAction)> {
    let mut g = graph.clone();
    // second_half[e] = id of the appended head half of edge e.
    let mut second_half: Vec<Option<usize>> = vec![None; graph.edges.len()];
    let mut midpoint: Vec<Option<usize>> = vec![None; graph.edges.len()];
    for &e in edges {
        let mid = g.vertices.len();
        let new_edge = g.edges.len();
        g = g.add_dummy_vertex(e, 0.5)?;
        second_half[e] = Some(new_edge);
        midpoint[e] = Some(mid);
    }
    let group = action.group().clone();
    let mut maps = Vec::with_capacity(group.order());
    for a in group.elements() {
        let old = action.map(a);
        let mut vertices = old.vertices.clone();
        vertices.resize(g.vertices.len(), usize::MAX);
        let mut edges_map = old.edges.clone();
        edges_map.resize(g.edges.len(), usize::MAX);
        let mut signs = old.signs.clone();
        signs.resize(g.edges.len(), 1);
        for &e in edges {
            let ie = old.edges[e];
            let s = old.signs[e];
            let (m, im) = (midpoint[e].unwrap(), midpoint[ie].ok_or_else(|| {
                Error::InvalidAction("subdivided edge set is not action-invariant".into())
            })?);
            vertices[m] = im;
            let (e2, ie2) = (second_half[e].unwrap(), second_half[ie].unwrap());
            if s == 1 {
                edges_map[e] = ie;
                edges_map[e2] = ie2;
            } else {
                // Reversal swaps the tail and head halves.
                edges_map[e] = ie2;
                edges_map[e2] = ie;
            }
            signs[e] = s;
            signs[e2] = s;
        }
        maps.push(ElementMap {
            vertices,
            edges: edges_map,
            signs,
        });
    }
    let action = GraphAction::from_maps(group, maps)?;
    Ok((g, action))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::group::FiniteGroup;

    /// Z2 flipping a path of two edges end to end.
    fn flip_path() -> (MetricGraph, GraphAction) {
        let mut b = GraphBuilder::new();
        let v0 = b.vertex("v0");
        let v1 = b.vertex("v1");
        let v2 = b.vertex("v2");
        b.edge("e0", v0, v1, 1.0);
        b.edge("e1", v1, v2, 1.0);
        let g = b.build().unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let flip = ElementMap {
            vertices: vec![2, 1, 0],
            edges: vec![1, 0],
            signs: vec![-1, -1],
        };
        let action = GraphAction::from_generators(&g, z2, &[(1, flip)]).unwrap();
        (g, action)
    }

    #[test]
    fn identity_only_action_is_valid() {
        let mut b = GraphBuilder::new();
        let v0 = b.vertex("v0");
        let v1 = b.vertex("v1");
        b.edge("e", v0, v1, 1.0);
        let g = b.build().unwrap();
        let triv = FiniteGroup::trivial();
        let action = GraphAction::from_maps(triv, vec![ElementMap::identity(&g)]).unwrap();
        assert!(action.validate(&g).is_ok());
        let orbits = OrbitData::new(&g, &action);
        assert_eq!(orbits.edge_orbit_count(), 1);
        assert_eq!(orbits.vertex_orbit_count(), 2);
    }

    #[test]
    fn flip_action_validates_and_orbits() {
        let (g, action) = flip_path();
        assert!(action.validate(&g).is_ok());
        let free = action.is_free(&g);
        assert!(!free.free_on_vertices); // middle vertex fixed
        assert!(free.free_on_edges); // edges swapped, neither fixed setwise
        let orbits = OrbitData::new(&g, &action);
        assert_eq!(orbits.edge_orbit_count(), 1);
        assert_eq!(orbits.vertex_orbit_count(), 2);
        assert_eq!(orbits.edge_transporter[1].0, 1);
        assert_eq!(orbits.edge_transporter[1].1, -1);
        // orbit-stabilizer: |orbit| · |stab| = |G|
        for v in 0..3 {
            let orbit_size = (0..3)
                .filter(|&w| orbits.vertex_orbit[w] == orbits.vertex_orbit[v])
                .count();
            assert_eq!(orbit_size * action.vertex_stabilizer(v).len(), 2);
        }
    }

    #[test]
    fn perturbed_length_is_flagged() {
        let (mut g, action) = flip_path();
        g.edges[1].length = 1.5;
        let report = action.validate(&g);
        assert!(report.issues.iter().any(|m| m.contains("length")));
    }

    #[test]
    fn quotient_readiness_inserts_midpoints() {
        // Single edge flipped onto itself: needs a midpoint.
        let mut b = GraphBuilder::new();
        let v0 = b.vertex("v0");
        let v1 = b.vertex("v1");
        b.edge("e", v0, v1, 2.0);
        let g = b.build().unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let flip = ElementMap {
            vertices: vec![1, 0],
            edges: vec![0],
            signs: vec![-1],
        };
        let action = GraphAction::from_generators(&g, z2, &[(1, flip)]).unwrap();
        assert!(action.validate(&g).is_ok());
        let (g2, a2, changed) = ensure_quotient_ready(&g, &action).unwrap();
        assert!(changed);
        assert_eq!(g2.edges.len(), 2);
        assert_eq!(g2.vertices.len(), 3);
        assert!(a2.validate(&g2).is_ok());
        assert!((g2.total_length() - 2.0).abs() < 1e-14);
        assert!(neighbour_violations(&g2, &a2).is_empty());
        // No edge is reversed onto itself any more.
        for e in 0..2 {
            assert!(a2.edge_reversers(e).is_empty());
        }
        // Idempotent afterwards.
        let (_, _, changed) = ensure_quotient_ready(&g2, &a2).unwrap();
        assert!(!changed);
    }

    #[test]
    fn restriction_to_subgroup() {
        let (g, action) = flip_path();
        let triv = Subgroup::trivial(action.group());
        let r = action.restrict(&triv).unwrap();
        assert_eq!(r.group().order(), 1);
        assert!(r.validate(&g).is_ok());
    }
}

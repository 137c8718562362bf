//! The quotient construction.
//!
//! Given a metric graph `Γ`, an action of a finite group `G` and a
//! `d`-dimensional matrix representation, the quotient graph has one vertex
//! per vertex orbit and `d_i` copies of each edge-orbit representative,
//! where `d_i` is the dimension of the trivial component of the
//! representation restricted to that representative's stabilizer. Vertex
//! conditions are assembled from the parent conditions, the transporting
//! group elements and the chosen bases:
//!
//! ```text
//! A_v = (A_ṽ ⊗ I_d) · diag(X₁ᵀ, …, X_nᵀ) · Θ,   X_l = S_{ν_l}⁻¹ ρ(g_l⁻¹) S_B
//! ```
//!
//! with `Θ` the orbit-merging column selector that also drops the copies
//! beyond `d_i`. The assembled rectangular pair is reduced to square shape
//! by selecting independent rows; the parent being self-adjoint guarantees
//! full rank.

use std::collections::BTreeMap;

use crate::action::{ensure_quotient_ready, GraphAction, OrbitData};
use crate::error::{Error, Result};
use crate::graph::{EdgeEnd, GraphBuilder, MetricGraph, Side};
use crate::group::{Elem, Subgroup};
use crate::linalg::{
    block_diag, cr, identity, inverse, is_unitary, kron, max_abs, reduce_rows, CMat,
};
use crate::rep::{averaging_projector, char_inner, MatrixRep};
use crate::{TOL_RANK, TOL_REP};

/// Everything the construction needs, with invariants validated on build.
pub struct QuotientSpec {
    pub graph: MetricGraph,
    pub action: GraphAction,
    pub rep: MatrixRep,
    pub orbits: OrbitData,
    /// Per edge-orbit basis: columns in the representation's stored basis,
    /// trivial component of the stabilizer restriction first.
    pub orbit_bases: Vec<CMat>,
    /// Trivial-component dimension per edge orbit.
    pub d_i: Vec<usize>,
    /// Edge-orbit representative stabilizers.
    pub stabilizers: Vec<Subgroup>,
    /// Global basis, columns in the stored basis.
    pub global_basis: CMat,
}

/// Builder for [`QuotientSpec`]. Defaults: the representation is unitarized
/// when necessary, orbit bases come from the trivial-component construction,
/// the global basis is the (possibly unitarized) stored basis, and orbit
/// representatives are the minimal-id ones.
pub struct QuotientBuilder {
    graph: MetricGraph,
    action: GraphAction,
    rep: MatrixRep,
    edge_reps: Option<Vec<usize>>,
    vertex_reps: Option<Vec<usize>>,
    orbit_bases: BTreeMap<usize, CMat>,
    global_basis: Option<CMat>,
    auto_unitarize: bool,
}

impl QuotientBuilder {
    pub fn new(graph: &MetricGraph, action: &GraphAction, rep: &MatrixRep) -> Result<Self> {
        if !crate::group::same_group(action.group(), rep.group()) {
            return Err(Error::GroupMismatch(
                "quotient: representation and action use different groups".into(),
            ));
        }
        Ok(QuotientBuilder {
            graph: graph.clone(),
            action: action.clone(),
            rep: rep.clone(),
            edge_reps: None,
            vertex_reps: None,
            orbit_bases: BTreeMap::new(),
            global_basis: None,
            auto_unitarize: true,
        })
    }

    /// Overrides edge-orbit representatives (one listed edge per orbit; the
    /// remaining orbits keep the canonical choice).
    pub fn edge_reps(mut self, reps: &[usize]) -> Self {
        self.edge_reps = Some(reps.to_vec());
        self
    }

    pub fn vertex_reps(mut self, reps: &[usize]) -> Self {
        self.vertex_reps = Some(reps.to_vec());
        self
    }

    /// Basis override for the orbit that will contain the given edge
    /// representative index (after orbit numbering).
    pub fn orbit_basis(mut self, orbit: usize, basis: CMat) -> Self {
        self.orbit_bases.insert(orbit, basis);
        self
    }

    /// Sets the same basis globally and for every orbit.
    pub fn uniform_basis(mut self, basis: CMat) -> Self {
        self.global_basis = Some(basis.clone());
        self.orbit_bases.insert(usize::MAX, basis);
        self
    }

    pub fn global_basis(mut self, basis: CMat) -> Self {
        self.global_basis = Some(basis);
        self
    }

    /// Disables the automatic unitarization of non-unitary representations.
    pub fn keep_basis(mut self) -> Self {
        self.auto_unitarize = false;
        self
    }

    /// Validates all invariants and produces the spec.
    pub fn into_spec(self) -> Result<QuotientSpec> {
        let report = self.graph.validate();
        if !report.is_ok() {
            return Err(Error::InvalidGraph(report.issues.join("; ")));
        }
        let report = self.action.validate(&self.graph);
        if !report.is_ok() {
            return Err(Error::InvalidAction(report.issues.join("; ")));
        }
        let (graph, action, _) = ensure_quotient_ready(&self.graph, &self.action)?;
        let mut rep = self.rep;
        if self.auto_unitarize
            && !rep.is_unitary(TOL_REP)
            && self.global_basis.is_none()
            && self.orbit_bases.is_empty()
        {
            rep = rep.unitarize()?;
        }
        let orbits = OrbitData::with_reps(
            &graph,
            &action,
            self.edge_reps.as_deref(),
            self.vertex_reps.as_deref(),
        )?;
        let d = rep.dim();
        let uniform = self.orbit_bases.get(&usize::MAX).cloned();
        let global_basis = self.global_basis.unwrap_or_else(|| identity(d));
        if global_basis.nrows() != d || global_basis.ncols() != d {
            return Err(Error::InvalidQuotient("global basis has wrong shape".into()));
        }
        inverse(&global_basis)?;
        let mut orbit_bases = Vec::new();
        let mut d_i = Vec::new();
        let mut stabilizers = Vec::new();
        for (o, &rep_edge) in orbits.edge_reps.iter().enumerate() {
            let stab = action.edge_stabilizer(rep_edge);
            if !action.edge_reversers(rep_edge).is_empty() {
                return Err(Error::InvalidQuotient(
                    "an orbit representative is reversed onto itself; preprocessing failed".into(),
                ));
            }
            let basis = match self.orbit_bases.get(&o).cloned().or_else(|| uniform.clone()) {
                Some(b) => b,
                None => rep.trivial_component_basis(&stab)?.0,
            };
            if basis.nrows() != d || basis.ncols() != d {
                return Err(Error::InvalidQuotient(format!(
                    "orbit {o}: basis has wrong shape"
                )));
            }
            inverse(&basis)?;
            // d_i and the trivial-first invariant: the first d_i columns are
            // fixed by the averaging projector, the rest annihilated.
            let p = averaging_projector(&rep, &stab)?;
            let pb = &p * &basis;
            let mut di = 0;
            let mut in_trivial = true;
            for j in 0..d {
                let col = basis.column(j).into_owned();
                let pcol = pb.column(j).into_owned();
                let fixed = (&pcol - &col).norm() < 1e-10 * col.norm().max(1.0);
                let killed = pcol.norm() < 1e-10 * col.norm().max(1.0);
                match (fixed, killed, in_trivial) {
                    (true, false, true) => di += 1,
                    (false, true, _) => in_trivial = false,
                    (true, true, _) => {
                        // zero column cannot happen for an invertible basis
                        return Err(Error::InvalidQuotient(format!(
                            "orbit {o}: basis column {j} is degenerate"
                        )));
                    }
                    _ => {
                        return Err(Error::InvalidQuotient(format!(
                            "orbit {o}: basis column {j} is not adapted to the trivial component"
                        )));
                    }
                }
            }
            orbit_bases.push(basis);
            d_i.push(di);
            stabilizers.push(stab);
        }
        Ok(QuotientSpec {
            graph,
            action,
            rep,
            orbits,
            orbit_bases,
            d_i,
            stabilizers,
            global_basis,
        })
    }

    pub fn build(self) -> Result<QuotientGraph> {
        build_quotient(&self.into_spec()?)
    }
}

/// Which end of the orbit representative sits in the given vertex orbit.
/// Unique after preprocessing (no group element carries a vertex to a
/// neighbour, so the two ends of a representative lie in distinct orbits).
fn rep_end_side(
    graph: &MetricGraph,
    orbits: &OrbitData,
    rep_edge: usize,
    vertex_orbit: usize,
) -> Result<Side> {
    let e = &graph.edges[rep_edge];
    let t = orbits.vertex_orbit[e.tail] == vertex_orbit;
    let h = orbits.vertex_orbit[e.head] == vertex_orbit;
    match (t, h) {
        (true, false) => Ok(Side::Tail),
        (false, true) => Ok(Side::Head),
        _ => Err(Error::InvalidQuotient(
            "representative edge endpoints are not separated by vertex orbits".into(),
        )),
    }
}

/// Per-vertex assembly records kept for encode/decode, transplantation and
/// the self-adjointness analysis.
#[derive(Debug, Clone)]
pub struct VertexAssembly {
    /// Parent orbit-representative vertex.
    pub parent_vertex: usize,
    /// Per parent end (in stored order): `(g_l, ν_l)` with
    /// `g_l · ẽ^{ν_l} = ` that end's edge, `g_l` minimal.
    pub incidences: Vec<(Elem, usize)>,
    /// Distinct orbits at the vertex, ascending.
    pub orbit_list: Vec<usize>,
    /// The `n×m` orbit-merging indicator.
    pub theta_prime: CMat,
}

#[derive(Debug, Clone)]
pub struct QuotientGraph {
    pub graph: MetricGraph,
    /// `(orbit, copy)` behind each quotient edge.
    pub edge_index: Vec<(usize, usize)>,
    /// Parent representative vertex behind each quotient vertex.
    pub vertex_parent: Vec<usize>,
    pub assemblies: Vec<VertexAssembly>,
    /// The preprocessed parent graph and action the quotient was built from.
    pub parent: MetricGraph,
    pub action: GraphAction,
    pub rep: MatrixRep,
    pub orbits: OrbitData,
    pub orbit_bases: Vec<CMat>,
    pub d_i: Vec<usize>,
    pub global_basis: CMat,
}

impl QuotientGraph {
    /// Quotient edge id for an orbit/copy pair, if the copy survived.
    pub fn edge_of(&self, orbit: usize, copy: usize) -> Option<usize> {
        self.edge_index.iter().position(|&(o, j)| o == orbit && j == copy)
    }
}

/// Runs the construction on a validated spec.
pub fn build_quotient(spec: &QuotientSpec) -> Result<QuotientGraph> {
    let graph = &spec.graph;
    let orbits = &spec.orbits;
    let rep = &spec.rep;
    let d = rep.dim();
    let group = spec.action.group();

    // Degenerate outcome: no surviving copies anywhere.
    if spec.d_i.iter().all(|&x| x == 0) {
        return Ok(QuotientGraph {
            graph: MetricGraph::empty(),
            edge_index: Vec::new(),
            vertex_parent: Vec::new(),
            assemblies: Vec::new(),
            parent: graph.clone(),
            action: spec.action.clone(),
            rep: rep.clone(),
            orbits: orbits.clone(),
            orbit_bases: spec.orbit_bases.clone(),
            d_i: spec.d_i.clone(),
            global_basis: spec.global_basis.clone(),
        });
    }

    let mut builder = GraphBuilder::new();
    // Quotient vertices: one per parent vertex orbit that still carries
    // surviving edge copies.
    let mut qvertex: Vec<Option<usize>> = vec![None; orbits.vertex_orbit_count()];
    let mut vertex_parent = Vec::new();
    for (k, &vrep) in orbits.vertex_reps.iter().enumerate() {
        let alive = graph.vertices[vrep]
            .ends
            .iter()
            .any(|end| spec.d_i[orbits.edge_orbit[end.edge]] > 0);
        if alive {
            qvertex[k] = Some(builder.vertex(format!("q:{}", graph.vertices[vrep].name)));
            vertex_parent.push(vrep);
        }
    }

    // Quotient edges: d_i copies per orbit, orbit-major so that the sorted
    // end lists of the built graph follow the (orbit, copy) column order.
    let mut edge_index = Vec::new();
    for (o, &erep) in orbits.edge_reps.iter().enumerate() {
        let e = &graph.edges[erep];
        let (kt, kh) = (orbits.vertex_orbit[e.tail], orbits.vertex_orbit[e.head]);
        if kt == kh {
            return Err(Error::InvalidQuotient(
                "edge orbit connects a vertex orbit to itself; preprocessing failed".into(),
            ));
        }
        for j in 0..spec.d_i[o] {
            let tail = qvertex[kt].expect("incident orbit is alive");
            let head = qvertex[kh].expect("incident orbit is alive");
            builder.edge(
                format!("q:{}[{}]", e.name, j),
                tail,
                head,
                e.length,
            );
            edge_index.push((o, j));
        }
    }

    // Vertex conditions.
    let mut assemblies = Vec::new();
    let mut conditions = Vec::new();
    for &vrep in &vertex_parent {
        let vert = &graph.vertices[vrep];
        let n = vert.ends.len();
        // g_l and ν_l per parent end, in stored order.
        let mut incidences = Vec::with_capacity(n);
        for &end in &vert.ends {
            let o = orbits.edge_orbit[end.edge];
            let erep = orbits.edge_reps[o];
            let g_l = group
                .elements()
                .find(|&g| spec.action.edge_image(g, erep) == end.edge)
                .ok_or_else(|| Error::InvalidQuotient("orbit transporter missing".into()))?;
            incidences.push((g_l, o));
        }
        // Distinct incident orbits, ascending; survived copies only.
        let mut orbit_list: Vec<usize> = incidences.iter().map(|&(_, o)| o).collect();
        orbit_list.sort_unstable();
        orbit_list.dedup();
        let d_v: usize = orbit_list.iter().map(|&o| spec.d_i[o]).sum();
        if d_v == 0 {
            return Err(Error::InvalidQuotient(
                "live vertex with no surviving edge copies".into(),
            ));
        }
        // Θ' (n × m) and Θ (nd × d_v).
        let m = orbit_list.len();
        let mut theta_prime = CMat::zeros(n, m);
        for (l, &(_, o)) in incidences.iter().enumerate() {
            let lp = orbit_list.iter().position(|&x| x == o).unwrap();
            theta_prime[(l, lp)] = cr(1.0);
        }
        let full = kron(&theta_prime, &identity(d));
        let mut keep_cols = Vec::new();
        for (lp, &o) in orbit_list.iter().enumerate() {
            for j in 0..spec.d_i[o] {
                keep_cols.push(lp * d + j);
            }
        }
        let mut theta = CMat::zeros(n * d, d_v);
        for (c, &col) in keep_cols.iter().enumerate() {
            theta.set_column(c, &full.column(col));
        }
        // diag(X_lᵀ) with X_l = S_{ν_l}⁻¹ ρ(g_l⁻¹) S_B.
        let s_b = &spec.global_basis;
        let blocks: Vec<CMat> = incidences
            .iter()
            .map(|&(g_l, o)| {
                let s_nu_inv = inverse(&spec.orbit_bases[o])?;
                Ok((s_nu_inv * rep.matrix(group.inv(g_l)) * s_b).transpose())
            })
            .collect::<Result<_>>()?;
        let diag = block_diag(&blocks);
        let a_raw = kron(&vert.a, &identity(d)) * &diag * &theta;
        let b_raw = kron(&vert.b, &identity(d)) * &diag * &theta;
        let (a, b) = reduce_rows(&a_raw, &b_raw, TOL_RANK).map_err(|e| {
            Error::RankDeficient(format!(
                "assembled conditions at parent vertex {} are rank deficient \
                 (is the parent graph self-adjoint?): {e}",
                vert.name
            ))
        })?;
        assemblies.push(VertexAssembly {
            parent_vertex: vrep,
            incidences,
            orbit_list,
            theta_prime,
        });
        conditions.push((a, b));
    }

    let mut built = builder.build()?;
    for (qi, (a, b)) in conditions.into_iter().enumerate() {
        // Vertex ids in the builder follow the vertex_parent order.
        built.vertices[qi].a = a;
        built.vertices[qi].b = b;
        built.vertices[qi].kind = crate::graph::BcKind::Explicit;
    }
    Ok(QuotientGraph {
        graph: built,
        edge_index,
        vertex_parent,
        assemblies,
        parent: graph.clone(),
        action: spec.action.clone(),
        rep: rep.clone(),
        orbits: orbits.clone(),
        orbit_bases: spec.orbit_bases.clone(),
        d_i: spec.d_i.clone(),
        global_basis: spec.global_basis.clone(),
    })
}

/// Outcome of the self-adjointness analysis of a quotient spec.
#[derive(Debug, Clone)]
pub struct SelfAdjointPrediction {
    /// The prediction, when one of the two sufficient analyses applies.
    pub verdict: Option<bool>,
    /// Which branch fired.
    pub branch: String,
    /// Per-vertex-orbit diagnosis for the Neumann-parent analysis.
    pub per_vertex: Vec<String>,
}

/// Predicts quotient self-adjointness without building the quotient.
///
/// Branch 1: free action (edges and vertices) with unitary mixed-basis
/// matrices and a self-adjoint parent. Branch 2: all-Neumann parent with
/// unitary mixed-basis matrices; the quotient is self-adjoint iff at every
/// vertex the restriction to the vertex stabilizer has no trivial component
/// or all incident edge stabilizers have equal order.
pub fn check_quotient_self_adjoint(spec: &QuotientSpec) -> Result<SelfAdjointPrediction> {
    let graph = &spec.graph;
    let rep = &spec.rep;
    let group = spec.action.group();
    let s_b = &spec.global_basis;
    let mixed_unitary = {
        let mut ok = true;
        'outer: for basis in &spec.orbit_bases {
            let s_inv = inverse(basis)?;
            for g in group.elements() {
                let x = &s_inv * rep.matrix(g) * s_b;
                if !is_unitary(&x, 1e-9) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        ok
    };
    let free = spec.action.is_free(graph);
    let parent_sa = graph.is_self_adjoint().0;
    if free.free_on_edges && free.free_on_vertices && mixed_unitary && parent_sa {
        return Ok(SelfAdjointPrediction {
            verdict: Some(true),
            branch: "free action with unitary mixed bases".into(),
            per_vertex: Vec::new(),
        });
    }
    let all_neumann = (0..graph.vertices.len()).all(|v| graph.is_neumann_vertex(v));
    if all_neumann && mixed_unitary {
        let mut verdict = true;
        let mut per_vertex = Vec::new();
        for &vrep in &spec.orbits.vertex_reps {
            let stab_v = spec.action.vertex_stabilizer(vrep);
            let chi = rep.restrict(&stab_v)?.character();
            let triv = crate::rep::MatrixRep::trivial(stab_v.group().clone()).character();
            let ip = char_inner(&chi, &triv)?;
            let cond_a = ip.norm() < 1e-9;
            let orders: Vec<usize> = graph.vertices[vrep]
                .ends
                .iter()
                .map(|end| spec.action.edge_stabilizer(end.edge).len())
                .collect();
            let cond_b = orders.windows(2).all(|w| w[0] == w[1]);
            let ok = cond_a || cond_b;
            per_vertex.push(format!(
                "vertex {}: ⟨χ,1⟩ = {:.3} ({}), stabilizer orders {:?} ({})",
                graph.vertices[vrep].name,
                ip.re,
                if cond_a { "zero" } else { "nonzero" },
                orders,
                if cond_b { "equal" } else { "mixed" },
            ));
            verdict &= ok;
        }
        return Ok(SelfAdjointPrediction {
            verdict: Some(verdict),
            branch: "Neumann parent, per-vertex trivial-component / stabilizer-order analysis"
                .into(),
            per_vertex,
        });
    }
    Ok(SelfAdjointPrediction {
        verdict: None,
        branch: "no sufficient analysis applies; use the direct matrix check".into(),
        per_vertex: Vec::new(),
    })
}

/// Trigonometric coefficient pair `(c₁, c₂)` of `c₁ cos(kx) + c₂ sin(kx)`
/// (or `c₁ + c₂ x` at `k = 0`) per edge.
pub type EdgeCoeffs = Vec<(crate::linalg::C64, crate::linalg::C64)>;

/// Reverses an edge function's coefficients: `f(l − x)` in the same basis.
pub fn reverse_coeffs(
    k: f64,
    length: f64,
    c: (crate::linalg::C64, crate::linalg::C64),
) -> (crate::linalg::C64, crate::linalg::C64) {
    if k == 0.0 {
        (c.0 + c.1 * cr(length), -c.1)
    } else {
        let (s, co) = (k * length).sin_cos();
        (c.0 * cr(co) + c.1 * cr(s), c.0 * cr(s) - c.1 * cr(co))
    }
}

/// Reconstructs the `d` parent functions (in the global basis) from a
/// quotient eigenfunction at wavenumber `k`. Transport determinations that
/// disagree beyond `1e-8` are reported as errors.
pub fn decode(q: &QuotientGraph, k: f64, coeffs: &EdgeCoeffs) -> Result<Vec<EdgeCoeffs>> {
    if coeffs.len() != q.graph.edges.len() {
        return Err(Error::InvalidQuotient("coefficient count mismatch".into()));
    }
    let d = q.rep.dim();
    let group = q.action.group();
    let ne = q.parent.edges.len();
    let zero = (cr(0.0), cr(0.0));
    // Global-basis functions on each orbit representative.
    // f̃^B_m |_{ẽ} = Σ_j (S⁻ᵀ)_{m j} f|_{e_j}, with S the orbit basis
    // relative to the global one; copies beyond d_i contribute zero.
    let mut out = vec![vec![zero; ne]; d];
    let mut have = vec![false; ne];
    let g_b_inv = inverse(&q.global_basis)?;
    for (o, &erep) in q.orbits.edge_reps.iter().enumerate() {
        let s_rel = &g_b_inv * &q.orbit_bases[o];
        let s_inv_t = inverse(&s_rel)?.transpose();
        for m in 0..d {
            let mut acc = zero;
            for j in 0..q.d_i[o] {
                let qe = q
                    .edge_of(o, j)
                    .ok_or_else(|| Error::InvalidQuotient("missing edge copy".into()))?;
                let w = s_inv_t[(m, j)];
                acc.0 += w * coeffs[qe].0;
                acc.1 += w * coeffs[qe].1;
            }
            out[m][erep] = acc;
        }
        have[erep] = true;
    }
    // Transport along the group: f̃_m |_{g·ẽ} = Σ_p ρ(g⁻¹)_{p m} f̃_p |_{ẽ},
    // with a coordinate reversal when the move flips the edge.
    let mut full = vec![vec![zero; ne]; d];
    let mut checked = vec![false; ne];
    for g in group.elements() {
        for (o, &erep) in q.orbits.edge_reps.iter().enumerate() {
            let _ = o;
            let img = q.action.edge_image(g, erep);
            let sign = q.action.edge_sign(g, erep);
            let rho = q.rep.matrix(group.inv(g));
            let mut vals = vec![zero; d];
            for m in 0..d {
                let mut acc = zero;
                for p in 0..d {
                    let w = rho[(p, m)];
                    acc.0 += w * out[p][erep].0;
                    acc.1 += w * out[p][erep].1;
                }
                vals[m] = if sign == 1 {
                    acc
                } else {
                    reverse_coeffs(k, q.parent.edges[erep].length, acc)
                };
            }
            if !checked[img] {
                for m in 0..d {
                    full[m][img] = vals[m];
                }
                checked[img] = true;
            } else {
                // Overlapping determination: must agree.
                let scale: f64 = coeffs
                    .iter()
                    .map(|c| c.0.norm().max(c.1.norm()))
                    .fold(1.0, f64::max);
                for m in 0..d {
                    let diff = (full[m][img].0 - vals[m].0).norm()
                        + (full[m][img].1 - vals[m].1).norm();
                    if diff > 1e-8 * scale {
                        return Err(Error::InvalidQuotient(format!(
                            "inconsistent transport on parent edge {img} (residual {diff:.2e})"
                        )));
                    }
                }
            }
        }
    }
    if !checked.iter().all(|&c| c) {
        return Err(Error::InvalidQuotient("transport missed a parent edge".into()));
    }
    Ok(full)
}

/// Restricts `d` parent functions (global basis) to a quotient function,
/// checking that they transform according to the representation.
pub fn encode(q: &QuotientGraph, k: f64, parent: &[EdgeCoeffs]) -> Result<EdgeCoeffs> {
    let d = q.rep.dim();
    if parent.len() != d {
        return Err(Error::InvalidQuotient("need d parent functions".into()));
    }
    let group = q.action.group();
    let scale: f64 = parent
        .iter()
        .flatten()
        .map(|c| c.0.norm().max(c.1.norm()))
        .fold(1.0, f64::max);
    // Transformation law: g·f̃_m = Σ_p ρ(g)_{p m} f̃_p on every edge.
    for g in group.elements() {
        let rho = q.rep.matrix(g);
        for (e, edge) in q.parent.edges.iter().enumerate() {
            let img = q.action.edge_image(g, e);
            let sign = q.action.edge_sign(g, e);
            for m in 0..d {
                // (g·f̃_m)|_{g·e}: transport of f̃_m across the move.
                let moved = if sign == 1 {
                    parent[m][e]
                } else {
                    reverse_coeffs(k, edge.length, parent[m][e])
                };
                let mut want = (cr(0.0), cr(0.0));
                for p in 0..d {
                    let w = rho[(p, m)];
                    want.0 += w * parent[p][img].0;
                    want.1 += w * parent[p][img].1;
                }
                let diff = (moved.0 - want.0).norm() + (moved.1 - want.1).norm();
                if diff > 1e-8 * scale {
                    return Err(Error::InvalidQuotient(format!(
                        "functions do not transform by the representation \
                         (element {}, edge {e}, residual {diff:.2e})",
                        group.name(g)
                    )));
                }
            }
        }
    }
    // Restriction: f|_{e^i_j} = (orbit-basis coordinates)_j on ẽ^i.
    let g_b_inv = inverse(&q.global_basis)?;
    let mut out = vec![(cr(0.0), cr(0.0)); q.graph.edges.len()];
    for (qe, &(o, j)) in q.edge_index.iter().enumerate() {
        let erep = q.orbits.edge_reps[o];
        let s_rel = &g_b_inv * &q.orbit_bases[o];
        let s_t = s_rel.transpose();
        let mut acc = (cr(0.0), cr(0.0));
        for m in 0..d {
            let w = s_t[(j, m)];
            acc.0 += w * parent[m][erep].0;
            acc.1 += w * parent[m][erep].1;
        }
        out[qe] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ElementMap;
    use crate::graph::{neumann_pair, GraphBuilder};
    use crate::group::FiniteGroup;
    use crate::linalg::{c64, hstack, solution_space, subspace_distance};
    use crate::rep::MatrixRep;

    /// Z2 swapping two pendant edges hanging off a path; a small non-free
    /// vertex action with a mixed-stabilizer vertex.
    fn mixed_stabilizer_setup() -> (MetricGraph, GraphAction) {
        let mut b = GraphBuilder::new();
        let x = b.vertex("x");
        let c = b.vertex("c");
        let y = b.vertex("y");
        let w = b.vertex("w");
        b.edge("ex", x, c, 1.0);
        b.edge("ey", y, c, 1.0);
        b.edge("ew", c, w, 0.7);
        let g = b.build().unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let flip = ElementMap {
            vertices: vec![2, 1, 0, 3],
            edges: vec![1, 0, 2],
            signs: vec![1, 1, 1],
        };
        let action = GraphAction::from_generators(&g, z2.clone(), &[(1, flip)]).unwrap();
        assert!(action.validate(&g).is_ok());
        (g, action)
    }

    #[test]
    fn trivial_rep_of_trivial_group_reproduces_parent() {
        let mut b = GraphBuilder::new();
        let v0 = b.vertex("v0");
        let v1 = b.vertex("v1");
        b.edge("e", v0, v1, 1.25);
        let g = b.build().unwrap();
        let triv = FiniteGroup::trivial();
        let action = GraphAction::from_maps(triv.clone(), vec![ElementMap::identity(&g)]).unwrap();
        let rep = MatrixRep::trivial(triv);
        let q = QuotientBuilder::new(&g, &action, &rep).unwrap().build().unwrap();
        assert_eq!(q.graph.edges.len(), 1);
        assert_eq!(q.graph.vertices.len(), 2);
        assert!((q.graph.edges[0].length - 1.25).abs() < 1e-15);
        for v in 0..2 {
            let (na, nb) = neumann_pair(1);
            let s1 = solution_space(&q.graph.vertices[v].a, &q.graph.vertices[v].b, TOL_RANK);
            let s2 = solution_space(&na, &nb, TOL_RANK);
            assert!(subspace_distance(&s1, &s2) < 1e-10);
        }
    }

    #[test]
    fn folding_a_mirrored_edge_gives_neumann_and_dirichlet_halves() {
        // One Neumann edge flipped onto itself; quotients by the two Z2
        // characters are half-intervals with Neumann resp. Dirichlet cut.
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
        let action = GraphAction::from_generators(&g, z2.clone(), &[(1, flip)]).unwrap();

        let triv = MatrixRep::trivial(z2.clone());
        let q = QuotientBuilder::new(&g, &action, &triv).unwrap().build().unwrap();
        assert_eq!(q.graph.edges.len(), 1);
        assert!((q.graph.edges[0].length - 1.0).abs() < 1e-14);
        let (ok, _) = q.graph.is_self_adjoint();
        assert!(ok);
        // Midpoint vertex is Neumann for the trivial character.
        let mid = q
            .graph
            .vertices
            .iter()
            .position(|v| v.name.contains("mid"))
            .unwrap();
        assert!(q.graph.is_neumann_vertex(mid));

        let sign = MatrixRep::one_dim(z2.clone(), &[cr(1.0), cr(-1.0)], "sign").unwrap();
        let q = QuotientBuilder::new(&g, &action, &sign).unwrap().build().unwrap();
        let mid = q
            .graph
            .vertices
            .iter()
            .position(|v| v.name.contains("mid"))
            .unwrap();
        // Dirichlet: A x = 0 with A ≠ 0, B = 0.
        let v = &q.graph.vertices[mid];
        let s1 = solution_space(&v.a, &v.b, TOL_RANK);
        let s2 = solution_space(
            &CMat::from_element(1, 1, cr(1.0)),
            &CMat::zeros(1, 1),
            TOL_RANK,
        );
        assert!(subspace_distance(&s1, &s2) < 1e-10);
    }

    #[test]
    fn empty_quotient_when_no_trivial_component() {
        // Sign character of the swap action: the pendant pair carries no
        // invariant part on the swapped orbit only when the restriction to
        // the stabilizer is nontrivial; here the full space dies for the
        // antisymmetric character on the fixed edge orbit.
        let mut b = GraphBuilder::new();
        let v0 = b.vertex("v0");
        let v1 = b.vertex("v1");
        b.edge("e", v0, v1, 1.0);
        let g = b.build().unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        // Identity action of Z2 (both elements act trivially).
        let idm = ElementMap::identity(&g);
        let action = GraphAction::from_maps(z2.clone(), vec![idm.clone(), idm]).unwrap();
        let sign = MatrixRep::one_dim(z2, &[cr(1.0), cr(-1.0)], "sign").unwrap();
        let q = QuotientBuilder::new(&g, &action, &sign).unwrap().build().unwrap();
        assert!(q.graph.is_graph_empty());
    }

    #[test]
    fn self_adjointness_prediction_counterexample() {
        let (g, action) = mixed_stabilizer_setup();
        let z2 = action.group().clone();
        // Trivial representation: ⟨χ,1⟩ = 1 at the centre vertex whose edge
        // stabilizers have orders {1, 1, 2} — predicted non-self-adjoint.
        let triv = MatrixRep::trivial(z2.clone());
        let spec = QuotientBuilder::new(&g, &action, &triv).unwrap().into_spec().unwrap();
        let pred = check_quotient_self_adjoint(&spec).unwrap();
        assert_eq!(pred.verdict, Some(false));
        let q = build_quotient(&spec).unwrap();
        assert!(!q.graph.is_self_adjoint().0);

        // Sign representation: trivial component vanishes at that vertex,
        // predicted self-adjoint.
        let sign = MatrixRep::one_dim(z2, &[cr(1.0), cr(-1.0)], "sign").unwrap();
        let spec = QuotientBuilder::new(&g, &action, &sign).unwrap().into_spec().unwrap();
        let pred = check_quotient_self_adjoint(&spec).unwrap();
        assert_eq!(pred.verdict, Some(true));
        let q = build_quotient(&spec).unwrap();
        assert!(q.graph.is_self_adjoint().0);
    }

    #[test]
    fn complex_character_quotient_is_self_adjoint() {
        // Z4 rotating a 4-cycle, character i: quotient is a loop-free edge
        // with the complex vertex pair; A·B† must still be Hermitian.
        let mut b = GraphBuilder::new();
        let vs: Vec<usize> = (0..4).map(|i| b.vertex(format!("v{i}"))).collect();
        for i in 0..4 {
            b.edge(format!("e{i}"), vs[i], vs[(i + 1) % 4], 1.0);
        }
        let g = b.build().unwrap();
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let rot = ElementMap {
            vertices: vec![1, 2, 3, 0],
            edges: vec![1, 2, 3, 0],
            signs: vec![1, 1, 1, 1],
        };
        let action = GraphAction::from_generators(&g, z4.clone(), &[(1, rot)]).unwrap();
        assert!(action.validate(&g).is_ok());
        let chi_i = MatrixRep::one_dim(
            z4,
            &[cr(1.0), c64(0.0, 1.0), cr(-1.0), c64(0.0, -1.0)],
            "X1",
        )
        .unwrap();
        let q = QuotientBuilder::new(&g, &action, &chi_i).unwrap().build().unwrap();
        assert!(q.graph.validate().is_ok());
        assert!(q.graph.is_self_adjoint().0);
        // Vertex pair couples the two ends with a factor of i.
        let v = &q.graph.vertices[0];
        let st = hstack(&[v.a.clone(), v.b.clone()]);
        assert_eq!(crate::linalg::rank(&st, TOL_RANK), 2);
    }

    #[test]
    fn decode_encode_roundtrip_on_folded_edge() {
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
        let action = GraphAction::from_generators(&g, z2.clone(), &[(1, flip)]).unwrap();
        let sign = MatrixRep::one_dim(z2, &[cr(1.0), cr(-1.0)], "sign").unwrap();
        let q = QuotientBuilder::new(&g, &action, &sign).unwrap().build().unwrap();
        // Eigenfunction of the folded interval with a Dirichlet midpoint:
        // sin(k x) from the Neumann end; k = π/2 on length-1 half.
        let k = std::f64::consts::FRAC_PI_2;
        // quotient edge runs tail (original v0) to the midpoint; Neumann at
        // v0 means cos(kx) there.
        let coeffs = vec![(cr(1.0), cr(0.0))];
        let parents = decode(&q, k, &coeffs).unwrap();
        assert_eq!(parents.len(), 1);
        // Antisymmetric on the two halves.
        let f = &parents[0];
        let (a0, a1) = (f[0], f[1]);
        let r = reverse_coeffs(k, 1.0, a1);
        assert!((a0.0 + r.0).norm() < 1e-12 && (a0.1 + r.1).norm() < 1e-12);
        let back = encode(&q, k, &parents).unwrap();
        assert!((back[0].0 - coeffs[0].0).norm() < 1e-12);
        assert!((back[0].1 - coeffs[0].1).norm() < 1e-12);
    }
}

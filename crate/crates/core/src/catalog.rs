//! Built-in graphs, actions, subgroups and representations.
//!
//! Each entry bundles a symmetric metric graph with the action of its
//! symmetry group and the named subgroups/representations used by the test
//! suite and the CLI. Vertex and edge numbering is chosen so that the
//! canonical (minimal-id) orbit representatives coincide with the
//! fundamental-domain choices the expected condition matrices refer to.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::action::{ElementMap, GraphAction};
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MetricGraph};
use crate::group::{Elem, FiniteGroup, Subgroup};
use crate::linalg::{c64, cr, CMat};
use crate::quotient::QuotientBuilder;
use crate::rep::MatrixRep;

pub struct CatalogEntry {
    pub id: String,
    pub graph: MetricGraph,
    pub group: Arc<FiniteGroup>,
    pub action: GraphAction,
    pub subgroups: BTreeMap<String, Subgroup>,
    pub reps: BTreeMap<String, MatrixRep>,
    /// Group elements generating the action, as stored in action files.
    pub generators: Vec<Elem>,
    pub notes: String,
}

impl CatalogEntry {
    /// Quotient builder for a named representation; when the representation
    /// lives on a named subgroup the action is restricted accordingly.
    pub fn quotient_builder(&self, rep_name: &str) -> Result<QuotientBuilder> {
        let rep = self
            .reps
            .get(rep_name)
            .ok_or_else(|| Error::parse(format!("no representation {rep_name:?} in {}", self.id)))?;
        let action = if crate::group::same_group(rep.group(), &self.group) {
            self.action.clone()
        } else {
            let sub = self
                .subgroups
                .values()
                .find(|s| crate::group::same_group(s.group(), rep.group()))
                .ok_or_else(|| {
                    Error::parse(format!(
                        "representation {rep_name:?} lives on no named subgroup of {}",
                        self.id
                    ))
                })?;
            self.action.restrict(sub)?
        };
        QuotientBuilder::new(&self.graph, &action, rep)
    }
}

pub fn list() -> Vec<&'static str> {
    vec![
        "d4-square",
        "d4-cayley",
        "tetrahedron",
        "cube",
        "d3-triangle",
    ]
}

pub fn entry(id: &str) -> Result<CatalogEntry> {
    match id {
        "d4-square" => Ok(d4_square_graph(1.0, 2f64.sqrt(), 3f64.sqrt())),
        "d4-cayley" => Ok(d4_cayley_graph(1.0, 2f64.sqrt())),
        "tetrahedron" => Ok(tetrahedron_graph(1.0)),
        "cube" => Ok(cube_graph(1.0, 2f64.sqrt(), 3f64.sqrt())),
        "d3-triangle" => Ok(d3_triangle_graph(1.0, std::f64::consts::FRAC_PI_4)),
        _ => Err(Error::parse(format!("unknown catalog id {id:?}"))),
    }
}

/// The rotation matrix whose columns form the orthogonal basis family of
/// the two-dimensional representation; `theta = 0` is the reference basis.
pub fn rotation_basis(theta: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    CMat::from_row_slice(2, 2, &[cr(c), cr(-s), cr(s), cr(c)])
}

/// Reference matrix form of the two-dimensional irreducible representation
/// of the dihedral group of the square: σ ↦ [[0,1],[−1,0]],
/// τ ↦ [[−1,0],[0,1]].
pub fn d4_reference_rep(group: &Arc<FiniteGroup>) -> MatrixRep {
    let m = |a: f64, b: f64, c: f64, d: f64| CMat::from_row_slice(2, 2, &[cr(a), cr(b), cr(c), cr(d)]);
    let mats = vec![
        m(1.0, 0.0, 0.0, 1.0),
        m(0.0, 1.0, -1.0, 0.0),
        m(-1.0, 0.0, 0.0, -1.0),
        m(0.0, -1.0, 1.0, 0.0),
        m(-1.0, 0.0, 0.0, 1.0),
        m(0.0, -1.0, -1.0, 0.0),
        m(1.0, 0.0, 0.0, -1.0),
        m(0.0, 1.0, 1.0, 0.0),
    ];
    MatrixRep::new(group.clone(), mats, "reference").expect("reference rep")
}

fn one_dim_by_names(
    sub: &Subgroup,
    values: &[(&str, crate::linalg::C64)],
    label: &str,
) -> MatrixRep {
    let hg = sub.group().clone();
    let vals: Vec<crate::linalg::C64> = (0..hg.order())
        .map(|i| {
            let name = hg.name(i);
            values
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| panic!("missing value for element {name}"))
        })
        .collect();
    MatrixRep::one_dim(hg, &vals, label).expect("character values")
}

/// A graph with the dihedral symmetry of the square.
///
/// Four axis vertices `u_k` (degree 2) and four inner axis vertices `w_k`
/// sit at angles `kπ/2`; four diagonal vertices `d_k` at `π/4 + kπ/2`;
/// eight free vertices `c_s` at `(2s+1)π/8`. Edges: `a`-spokes `u_k—c`,
/// `b`-spokes `w_k—c`, `c`-spokes `d_k—c` (24 edges, three free orbits).
/// σ rotates by a quarter turn, τ reflects across the horizontal axis.
pub fn d4_square_graph(a: f64, b: f64, c: f64) -> CatalogEntry {
    assert!(a > 0.0 && b > 0.0 && c > 0.0, "lengths must be positive");
    let group = FiniteGroup::dihedral(4).unwrap();
    let mut gb = GraphBuilder::new();
    // Vertex numbering puts the fundamental-domain representatives first:
    // u1 (90°), w1 (90°), d0 (45°), c1 (67.5°), c2 (112.5°).
    let u1 = gb.vertex("u1");
    let w1 = gb.vertex("w1");
    let d0 = gb.vertex("d0");
    let c1 = gb.vertex("c1");
    let c2 = gb.vertex("c2");
    let u0 = gb.vertex("u0");
    let u2 = gb.vertex("u2");
    let u3 = gb.vertex("u3");
    let w0 = gb.vertex("w0");
    let w2 = gb.vertex("w2");
    let w3 = gb.vertex("w3");
    let d1 = gb.vertex("d1");
    let d2 = gb.vertex("d2");
    let d3 = gb.vertex("d3");
    let c0 = gb.vertex("c0");
    let c3 = gb.vertex("c3");
    let c4 = gb.vertex("c4");
    let c5 = gb.vertex("c5");
    let c6 = gb.vertex("c6");
    let c7 = gb.vertex("c7");
    let u = [u0, u1, u2, u3];
    let w = [w0, w1, w2, w3];
    let d = [d0, d1, d2, d3];
    let cs = [c0, c1, c2, c3, c4, c5, c6, c7];

    // Fundamental-domain edges first (ids 0..5), then the rest.
    gb.edge("a:u1-c1", u1, c1, a);
    gb.edge("b:w1-c1", w1, c1, b);
    gb.edge("c:d0-c1", d0, c1, c);
    gb.edge("a:u1-c2", u1, c2, a);
    gb.edge("b:w1-c2", w1, c2, b);
    gb.edge("c:d1-c2", d1, c2, c);
    // u_k — c_{2k}, c_{2k-1}; w likewise; d_k — c_{2k}, c_{2k+1}.
    for k in [0usize, 2, 3] {
        gb.edge(format!("a:u{k}-c{}", 2 * k), u[k], cs[2 * k], a);
        gb.edge(
            format!("a:u{k}-c{}", (2 * k + 7) % 8),
            u[k],
            cs[(2 * k + 7) % 8],
            a,
        );
    }
    for k in [0usize, 2, 3] {
        gb.edge(format!("b:w{k}-c{}", 2 * k), w[k], cs[2 * k], b);
        gb.edge(
            format!("b:w{k}-c{}", (2 * k + 7) % 8),
            w[k],
            cs[(2 * k + 7) % 8],
            b,
        );
    }
    gb.edge("c:d0-c0", d0, cs[0], c);
    gb.edge("c:d1-c3", d1, cs[3], c);
    gb.edge("c:d2-c4", d2, cs[4], c);
    gb.edge("c:d2-c5", d2, cs[5], c);
    gb.edge("c:d3-c6", d3, cs[6], c);
    gb.edge("c:d3-c7", d3, cs[7], c);
    let graph = gb.build().expect("square graph");

    // σ: quarter rotation; τ: reflection across the horizontal axis.
    let nv = graph.vertices.len();
    let mut sigma_v = vec![0usize; nv];
    let mut tau_v = vec![0usize; nv];
    for k in 0..4 {
        sigma_v[u[k]] = u[(k + 1) % 4];
        sigma_v[w[k]] = w[(k + 1) % 4];
        sigma_v[d[k]] = d[(k + 1) % 4];
        tau_v[u[k]] = u[(4 - k) % 4];
        tau_v[w[k]] = w[(4 - k) % 4];
        tau_v[d[k]] = d[3 - k];
    }
    for s in 0..8 {
        sigma_v[cs[s]] = cs[(s + 2) % 8];
        tau_v[cs[s]] = cs[7 - s];
    }
    let sigma = generator_from_vertices(&graph, &sigma_v);
    let tau = generator_from_vertices(&graph, &tau_v);
    let s_el = group.element_by_name("s").unwrap();
    let t_el = group.element_by_name("t").unwrap();
    let action =
        GraphAction::from_generators(&graph, group.clone(), &[(s_el, sigma), (t_el, tau)])
            .expect("square action");

    let by = |n: &str| group.element_by_name(n).unwrap();
    let h1 = Subgroup::generated(&group, &[by("t"), by("ts2")]).unwrap();
    let h2 = Subgroup::generated(&group, &[by("ts"), by("ts3")]).unwrap();
    let h3 = Subgroup::generated(&group, &[by("s")]).unwrap();

    let r1 = one_dim_by_names(
        &h1,
        &[("e", cr(1.0)), ("t", cr(-1.0)), ("ts2", cr(1.0)), ("s2", cr(-1.0))],
        "R1",
    );
    let r2 = one_dim_by_names(
        &h2,
        &[("e", cr(1.0)), ("ts", cr(1.0)), ("ts3", cr(-1.0)), ("s2", cr(-1.0))],
        "R2",
    );
    let r3 = one_dim_by_names(
        &h3,
        &[
            ("e", cr(1.0)),
            ("s", c64(0.0, 1.0)),
            ("s2", cr(-1.0)),
            ("s3", c64(0.0, -1.0)),
        ],
        "R3",
    );
    let r = d4_reference_rep(&group);

    let mut subgroups = BTreeMap::new();
    subgroups.insert("H1".into(), h1);
    subgroups.insert("H2".into(), h2);
    subgroups.insert("H3".into(), h3);
    let mut reps = BTreeMap::new();
    reps.insert("R1".into(), r1);
    reps.insert("R2".into(), r2);
    reps.insert("R3".into(), r3);
    reps.insert("R".into(), r);

    CatalogEntry {
        id: "d4-square".into(),
        graph,
        group,
        action,
        subgroups,
        reps,
        generators: vec![s_el, t_el],
        notes: "square-symmetric spoke graph; quotients by R1/R2/R3 are isospectral".into(),
    }
}

fn generator_from_vertices(graph: &MetricGraph, vertex_map: &[usize]) -> ElementMap {
    let (edges, signs) =
        GraphAction::edge_map_from_vertices(graph, vertex_map).expect("edge images");
    ElementMap {
        vertices: vertex_map.to_vec(),
        edges,
        signs,
    }
}

/// The Cayley graph of the dihedral group of the square with generating set
/// `{σ, τ}`: 8 vertices, 12 edges (two σ-squares and a τ-matching) and the
/// left-multiplication action.
pub fn d4_cayley_graph(l_sigma: f64, l_tau: f64) -> CatalogEntry {
    assert!(l_sigma > 0.0 && l_tau > 0.0);
    let group = FiniteGroup::dihedral(4).unwrap();
    let n = group.order();
    let s_el = group.element_by_name("s").unwrap();
    let t_el = group.element_by_name("t").unwrap();
    let mut gb = GraphBuilder::new();
    let verts: Vec<usize> = (0..n)
        .map(|g| gb.vertex(format!("g:{}", group.name(g))))
        .collect();
    let mut edge_lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for g in 0..n {
        let gs = group.mul(g, s_el);
        let key = (g.min(gs), g.max(gs));
        if let std::collections::btree_map::Entry::Vacant(slot) = edge_lookup.entry(key) {
            let id = gb.edge(
                format!("s:{}-{}", group.name(g), group.name(gs)),
                verts[g],
                verts[gs],
                l_sigma,
            );
            slot.insert(id);
        }
    }
    for g in 0..n {
        let gt = group.mul(g, t_el);
        let key = (g.min(gt), g.max(gt));
        if let std::collections::btree_map::Entry::Vacant(slot) = edge_lookup.entry(key) {
            let id = gb.edge(
                format!("t:{}-{}", group.name(g), group.name(gt)),
                verts[g],
                verts[gt],
                l_tau,
            );
            slot.insert(id);
        }
    }
    let graph = gb.build().expect("cayley graph");

    // Left multiplication: h·g = hg; edge images follow from the vertices.
    let maps: Vec<ElementMap> = (0..n)
        .map(|h| {
            let vmap: Vec<usize> = (0..n).map(|g| verts[group.mul(h, g)]).collect();
            let (edges, signs) =
                GraphAction::edge_map_from_vertices(&graph, &vmap).expect("cayley edges");
            ElementMap {
                vertices: vmap,
                edges,
                signs,
            }
        })
        .collect();
    let action = GraphAction::from_maps(group.clone(), maps).expect("cayley action");

    let by = |nm: &str| group.element_by_name(nm).unwrap();
    let h1 = Subgroup::generated(&group, &[by("t"), by("ts2")]).unwrap();
    let h2 = Subgroup::generated(&group, &[by("ts"), by("ts3")]).unwrap();
    let h3 = Subgroup::generated(&group, &[by("s")]).unwrap();
    let r1 = one_dim_by_names(
        &h1,
        &[("e", cr(1.0)), ("t", cr(-1.0)), ("ts2", cr(1.0)), ("s2", cr(-1.0))],
        "R1",
    );
    let r2 = one_dim_by_names(
        &h2,
        &[("e", cr(1.0)), ("ts", cr(1.0)), ("ts3", cr(-1.0)), ("s2", cr(-1.0))],
        "R2",
    );
    let r3 = one_dim_by_names(
        &h3,
        &[
            ("e", cr(1.0)),
            ("s", c64(0.0, 1.0)),
            ("s2", cr(-1.0)),
            ("s3", c64(0.0, -1.0)),
        ],
        "R3",
    );

    let mut subgroups = BTreeMap::new();
    subgroups.insert("H1".into(), h1);
    subgroups.insert("H2".into(), h2);
    subgroups.insert("H3".into(), h3);
    let mut reps = BTreeMap::new();
    reps.insert("R1".into(), r1);
    reps.insert("R2".into(), r2);
    reps.insert("R3".into(), r3);

    CatalogEntry {
        id: "d4-cayley".into(),
        graph,
        group: group.clone(),
        action,
        subgroups,
        reps,
        generators: vec![s_el, t_el],
        notes: "Cayley graph of the square's dihedral group; three mutually \
                isospectral quotients"
            .into(),
    }
}

/// Equilateral tetrahedron with Neumann conditions, subdivided at the edge
/// midpoints, carrying the vertex-permutation action of `S4`. Twelve
/// half-edges of length `l/2`.
pub fn tetrahedron_graph(l: f64) -> CatalogEntry {
    assert!(l > 0.0);
    let group = FiniteGroup::symmetric(4).unwrap();
    let mut gb = GraphBuilder::new();
    let corners: Vec<usize> = (1..=4).map(|i| gb.vertex(format!("v{i}"))).collect();
    let pairs: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut mid = BTreeMap::new();
    for &(i, j) in &pairs {
        let m = gb.vertex(format!("m{}{}", i + 1, j + 1));
        mid.insert((i, j), m);
    }
    // Half-edge ids: (corner 1 → m12) is edge 0, the orbit representative
    // the expected condition matrices refer to.
    for &(i, j) in &pairs {
        let m = mid[&(i, j)];
        gb.edge(
            format!("h{}-{}{}", i + 1, i + 1, j + 1),
            corners[i],
            m,
            l / 2.0,
        );
        gb.edge(
            format!("h{}-{}{}", j + 1, i + 1, j + 1),
            corners[j],
            m,
            l / 2.0,
        );
    }
    let graph = gb.build().expect("tetrahedron");

    // Permutations act on corners; midpoints and halves follow.
    let perms = s4_one_line(&group);
    let maps: Vec<ElementMap> = perms
        .iter()
        .map(|p| {
            let mut vmap = vec![0usize; graph.vertices.len()];
            for i in 0..4 {
                vmap[corners[i]] = corners[p[i] as usize];
            }
            for &(i, j) in &pairs {
                let (a, b) = (p[i] as usize, p[j] as usize);
                let key = (a.min(b), a.max(b));
                vmap[mid[&(i, j)]] = mid[&key];
            }
            let (edges, signs) =
                GraphAction::edge_map_from_vertices(&graph, &vmap).expect("tetra edges");
            ElementMap {
                vertices: vmap,
                edges,
                signs,
            }
        })
        .collect();
    let action = GraphAction::from_maps(group.clone(), maps).expect("tetra action");

    let sign_vals: Vec<crate::linalg::C64> =
        perms.iter().map(|p| cr(crate::rep::perm_sign(p))).collect();
    let sign = MatrixRep::one_dim(group.clone(), &sign_vals, "sign").unwrap();
    let perm4 =
        MatrixRep::permutation(group.clone(), 4, |g, x| perms[g][x] as usize, "perm4").unwrap();

    let mut reps = BTreeMap::new();
    reps.insert("sign".into(), sign);
    reps.insert("perm".into(), perm4);
    CatalogEntry {
        id: "tetrahedron".into(),
        graph,
        group: group.clone(),
        action,
        subgroups: BTreeMap::new(),
        reps,
        generators: (0..group.order()).collect(),
        notes: "equilateral tetrahedron with midpoint vertices; sign-quotient \
                is empty, permutation-quotient keeps three edge copies"
            .into(),
    }
}

fn s4_one_line(group: &Arc<FiniteGroup>) -> Vec<Vec<u8>> {
    // Same lexicographic enumeration the constructor used.
    let n = 4;
    let mut out = Vec::with_capacity(group.order());
    let mut current: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..n - 1).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Signed 3×3 permutation matrices in row-major i8 storage.
type Sp = [i8; 9];

fn sp_mul(a: &Sp, b: &Sp) -> Sp {
    let mut out = [0i8; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0i8;
            for k in 0..3 {
                acc += a[i * 3 + k] * b[k * 3 + j];
            }
            out[i * 3 + j] = acc;
        }
    }
    out
}

fn sp_det(m: &Sp) -> i8 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

fn sp_sign_product(m: &Sp) -> i8 {
    m.iter().filter(|&&x| x != 0).product()
}

fn sp_name(m: &Sp) -> String {
    let mut s = String::new();
    for i in 0..3 {
        for j in 0..3 {
            match m[i * 3 + j] {
                1 => s.push(['x', 'y', 'z'][j]),
                -1 => {
                    s.push('-');
                    s.push(['x', 'y', 'z'][j]);
                }
                _ => {}
            }
        }
        if i < 2 {
            s.push(',');
        }
    }
    s
}

/// Permutation of the four cube diagonals induced by a signed permutation
/// matrix.
fn sp_diagonal_perm(m: &Sp) -> Vec<u8> {
    let diags: [[i8; 3]; 4] = [[1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]];
    let apply = |m: &Sp, v: &[i8; 3]| -> [i8; 3] {
        let mut out = [0i8; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += m[i * 3 + j] * v[j];
            }
        }
        out
    };
    let mut perm = vec![0u8; 4];
    for (i, d) in diags.iter().enumerate() {
        let img = apply(m, d);
        let neg = [-img[0], -img[1], -img[2]];
        let j = diags
            .iter()
            .position(|x| *x == img || *x == neg)
            .expect("image is a diagonal");
        perm[i] = j as u8;
    }
    perm
}

/// The symmetric graph of the cube: the Cayley graph of its full symmetry
/// group with respect to the three reflections bounding a fundamental
/// tetrahedron. 48 vertices, 72 edges of lengths `2a`, `2b`, `2c`, each
/// with multiplicity 24; three-regular and bipartite.
pub fn cube_graph(a: f64, b: f64, c: f64) -> CatalogEntry {
    assert!(a > 0.0 && b > 0.0 && c > 0.0);
    let idm: Sp = [1, 0, 0, 0, 1, 0, 0, 0, 1];
    let swap_xy: Sp = [0, 1, 0, 1, 0, 0, 0, 0, 1];
    let swap_yz: Sp = [1, 0, 0, 0, 0, 1, 0, 1, 0];
    let flip_z: Sp = [1, 0, 0, 0, 1, 0, 0, 0, -1];
    let gens = [swap_xy, swap_yz, flip_z];
    let (group, elems) = FiniteGroup::generated_from(idm, &gens, sp_mul, sp_name, 64)
        .expect("octahedral group");
    assert_eq!(group.order(), 48);

    let lengths = [2.0 * a, 2.0 * b, 2.0 * c];
    let mut gb = GraphBuilder::new();
    let verts: Vec<usize> = (0..48).map(|g| gb.vertex(format!("t{g}"))).collect();
    let gen_elems: Vec<Elem> = gens
        .iter()
        .map(|m| elems.iter().position(|e| e == m).unwrap())
        .collect();
    for g in 0..48 {
        for (gi, &ge) in gen_elems.iter().enumerate() {
            let img = group.mul(g, ge);
            if g < img {
                gb.edge(format!("e{gi}:{g}-{img}"), verts[g], verts[img], lengths[gi]);
            }
        }
    }
    let graph = gb.build().expect("cube graph");
    assert_eq!(graph.edges.len(), 72);

    let maps: Vec<ElementMap> = (0..48)
        .map(|h| {
            let vmap: Vec<usize> = (0..48).map(|g| verts[group.mul(h, g)]).collect();
            let (edges, signs) =
                GraphAction::edge_map_from_vertices(&graph, &vmap).expect("cube edges");
            ElementMap {
                vertices: vmap,
                edges,
                signs,
            }
        })
        .collect();
    let action = GraphAction::from_maps(group.clone(), maps).expect("cube action");

    // Rotations (det = +1) and the tetrahedral subgroup (sign product +1).
    let o_elems: Vec<Elem> = (0..48).filter(|&g| sp_det(&elems[g]) == 1).collect();
    let td_elems: Vec<Elem> = (0..48).filter(|&g| sp_sign_product(&elems[g]) == 1).collect();
    let o = Subgroup::from_elements(&group, &o_elems).expect("rotation subgroup");
    let td = Subgroup::from_elements(&group, &td_elems).expect("tetrahedral subgroup");

    // Two-dimensional representation through the diagonal permutation
    // action (which factors through the three pair-partitions).
    let two_dim = |sub: &Subgroup, label: &str| -> MatrixRep {
        let mats: Vec<CMat> = (0..sub.len())
            .map(|i| {
                let m = &elems[sub.embed(i)];
                let p4 = sp_diagonal_perm(m);
                crate::rep::std_rep_matrix(&crate::rep::s4_to_s3(&p4))
            })
            .collect();
        MatrixRep::new(sub.group().clone(), mats, label).expect("two-dim rep")
    };
    let r1 = two_dim(&o, "R1");
    let r2 = two_dim(&td, "R2");

    let mut subgroups = BTreeMap::new();
    subgroups.insert("O".into(), o);
    subgroups.insert("Td".into(), td);
    let mut reps = BTreeMap::new();
    reps.insert("R1".into(), r1);
    reps.insert("R2".into(), r2);

    CatalogEntry {
        id: "cube".into(),
        graph,
        group: group.clone(),
        action,
        subgroups,
        reps,
        generators: gen_elems,
        notes: "three-regular bipartite cube-symmetry graph; the rotation and \
                tetrahedral subgroups carry matching two-dimensional representations"
            .into(),
    }
}

/// A graph with a free action of the triangle's dihedral group: two
/// triangles of `side`-length edges joined, at each corner pair, by the two
/// arcs of a perpendicular circle of circumference `loop_len`.
///
/// The free action forces all six sides into one length class and all six
/// arcs into another, so the entry takes exactly these two lengths.
pub fn d3_triangle_graph(side: f64, loop_len: f64) -> CatalogEntry {
    assert!(side > 0.0 && loop_len > 0.0);
    let group = FiniteGroup::dihedral(3).unwrap();
    let n = group.order();
    let s_el = group.element_by_name("s").unwrap();
    let t_el = group.element_by_name("t").unwrap();
    let mut gb = GraphBuilder::new();
    let p: Vec<usize> = (0..n)
        .map(|g| gb.vertex(format!("p:{}", group.name(g))))
        .collect();
    // Sides (p_g, p_{gσ}), ids 0..5; side id equals its tail's element.
    for g in 0..n {
        gb.edge(
            format!("side:{}", group.name(g)),
            p[g],
            p[group.mul(g, s_el)],
            side,
        );
    }
    // Corner pairs {σ^a, σ^a·τ} indexed by the rotation part; two arcs each.
    let corner_of = |g: Elem| -> usize {
        if g < 3 {
            g
        } else {
            // τσ^a pairs with the rotation σ^a·... : σ^b·τ = τσ^{-b}, so the
            // reflection τσ^a sits at the corner of σ^{(3-a) % 3}.
            (3 - (g - 3)) % 3
        }
    };
    let mut arc_up = vec![0usize; 3];
    let mut arc_dn = vec![0usize; 3];
    for cor in 0..3usize {
        let g = cor;
        let gt = group.mul(g, t_el);
        arc_up[cor] = gb.edge(format!("arcU:{cor}"), p[g], p[gt], loop_len / 2.0);
        arc_dn[cor] = gb.edge(format!("arcD:{cor}"), p[g], p[gt], loop_len / 2.0);
    }
    let graph = gb.build().expect("triangle graph");

    // Generators with explicit edge maps (the parallel arcs are ambiguous
    // from vertices alone): rotations keep the upper/lower arc classes, the
    // reflection swaps them.
    let build_gen = |h: Elem, swap_arcs: bool| -> ElementMap {
        let vertices: Vec<usize> = (0..n).map(|g| p[group.mul(h, g)]).collect();
        let mut edges = vec![0usize; graph.edges.len()];
        let mut signs = vec![1i8; graph.edges.len()];
        for g in 0..n {
            edges[g] = group.mul(h, g);
            signs[g] = 1;
        }
        for cor in 0..3usize {
            let img_cor = corner_of(group.mul(h, cor));
            let (iu, idn) = if swap_arcs {
                (arc_dn[img_cor], arc_up[img_cor])
            } else {
                (arc_up[img_cor], arc_dn[img_cor])
            };
            // Stored arcs run from the rotation member of the pair; the
            // move reverses the arc when it sends the tail to a reflection.
            let tail_img = group.mul(h, cor);
            let sign = if tail_img < 3 { 1 } else { -1 };
            edges[arc_up[cor]] = iu;
            signs[arc_up[cor]] = sign;
            edges[arc_dn[cor]] = idn;
            signs[arc_dn[cor]] = sign;
        }
        ElementMap {
            vertices,
            edges,
            signs,
        }
    };
    let sigma = build_gen(s_el, false);
    let tau = build_gen(t_el, true);
    let action = GraphAction::from_generators(&graph, group.clone(), &[(s_el, sigma), (t_el, tau)])
        .expect("triangle action");

    // Representations: the block-diagonal eight-dimensional forms plus the
    // irreducible pieces for the disjoint-union identity.
    let table = crate::rep::IrrepTable::dihedral(group.clone(), 3).unwrap();
    let s1 = table.by_name("triv").unwrap().clone();
    let s2 = table.by_name("sgn_t").unwrap().clone();
    let s3 = table.by_name("E1").unwrap().clone();
    let regular = MatrixRep::regular(group.clone());
    let block1 = MatrixRep::direct_sum(&[&regular, &s1, &s1]).unwrap();
    // Permutation representation on the three corners.
    let perm3 = MatrixRep::permutation(group.clone(), 3, |g, x| corner_of(group.mul(g, x)), "corners")
        .unwrap();
    let swap2 = MatrixRep::new(
        group.clone(),
        (0..n)
            .map(|g| {
                if g < 3 {
                    crate::linalg::identity(2)
                } else {
                    CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
                }
            })
            .collect(),
        "swap",
    )
    .unwrap();
    let block2 = MatrixRep::direct_sum(&[&perm3, &perm3, &swap2]).unwrap();

    let mut reps = BTreeMap::new();
    reps.insert("S1".into(), s1);
    reps.insert("S2".into(), s2);
    reps.insert("S3".into(), s3);
    reps.insert("block1".into(), block1);
    reps.insert("block2".into(), block2);

    CatalogEntry {
        id: "d3-triangle".into(),
        graph,
        group: group.clone(),
        action,
        subgroups: BTreeMap::new(),
        reps,
        generators: vec![s_el, t_el],
        notes: "free dihedral action; all quotient conditions stay Neumann".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::OrbitData;

    #[test]
    fn square_entry_validates() {
        let e = d4_square_graph(1.0, 2f64.sqrt(), 3f64.sqrt());
        assert_eq!(e.graph.vertices.len(), 20);
        assert_eq!(e.graph.edges.len(), 24);
        assert!(e.graph.validate().is_ok());
        assert!(e.action.validate(&e.graph).is_ok());
        assert!(e.graph.is_self_adjoint().0);
        let orbits = OrbitData::new(&e.graph, &e.action);
        assert_eq!(orbits.edge_orbit_count(), 3);
        assert_eq!(orbits.vertex_orbit_count(), 4);
        let free = e.action.is_free(&e.graph);
        assert!(free.free_on_edges);
        assert!(!free.free_on_vertices);
    }

    #[test]
    fn cayley_entry_validates() {
        let e = d4_cayley_graph(1.0, 2f64.sqrt());
        assert_eq!(e.graph.vertices.len(), 8);
        assert_eq!(e.graph.edges.len(), 12);
        for v in 0..8 {
            assert_eq!(e.graph.degree(v), 3);
        }
        assert!(e.graph.validate().is_ok());
        assert!(e.action.validate(&e.graph).is_ok());
    }

    #[test]
    fn tetrahedron_entry_validates() {
        let e = tetrahedron_graph(1.0);
        assert_eq!(e.graph.vertices.len(), 10);
        assert_eq!(e.graph.edges.len(), 12);
        assert!(e.graph.validate().is_ok());
        assert!(e.action.validate(&e.graph).is_ok());
        let orbits = OrbitData::new(&e.graph, &e.action);
        assert_eq!(orbits.edge_orbit_count(), 1);
        // Stabilizer of the representative half-edge is {e, (3 4)}.
        let stab = e.action.edge_stabilizer(orbits.edge_reps[0]);
        assert_eq!(stab.len(), 2);
        let names: Vec<&str> = stab.elements().iter().map(|&x| e.group.name(x)).collect();
        assert!(names.contains(&"(3 4)"));
        // Orbit-stabilizer bookkeeping across all edges.
        for edge in 0..e.graph.edges.len() {
            let orbit = orbits
                .edge_orbit
                .iter()
                .filter(|&&o| o == orbits.edge_orbit[edge])
                .count();
            assert_eq!(orbit * e.action.edge_stabilizer(edge).len(), 24);
        }
    }

    #[test]
    fn cube_entry_validates() {
        let e = cube_graph(1.0, 2f64.sqrt(), 3f64.sqrt());
        assert_eq!(e.graph.vertices.len(), 48);
        assert_eq!(e.graph.edges.len(), 72);
        for v in 0..48 {
            assert_eq!(e.graph.degree(v), 3);
        }
        // Bipartite via 2-colouring.
        let mut colour = vec![-1i8; 48];
        let mut queue = vec![0usize];
        colour[0] = 0;
        while let Some(v) = queue.pop() {
            for end in &e.graph.vertices[v].ends {
                let edge = &e.graph.edges[end.edge];
                let w = if edge.tail == v { edge.head } else { edge.tail };
                if colour[w] == -1 {
                    colour[w] = 1 - colour[v];
                    queue.push(w);
                } else {
                    assert_ne!(colour[w], colour[v], "odd cycle");
                }
            }
        }
        // 24 edges of each length.
        for l in [2.0, 2.0 * 2f64.sqrt(), 2.0 * 3f64.sqrt()] {
            let count = e
                .graph
                .edges
                .iter()
                .filter(|edge| (edge.length - l).abs() < 1e-12)
                .count();
            assert_eq!(count, 24);
        }
        assert!(e.graph.validate().is_ok());
        assert_eq!(e.subgroups["O"].len(), 24);
        assert_eq!(e.subgroups["Td"].len(), 24);
        let both = e.subgroups["O"]
            .elements()
            .iter()
            .filter(|&&g| e.subgroups["Td"].contains(g))
            .count();
        assert_eq!(both, 12);
        assert!(e.action.validate(&e.graph).is_ok());
    }

    #[test]
    fn triangle_entry_validates() {
        let e = d3_triangle_graph(1.0, std::f64::consts::FRAC_PI_4);
        assert_eq!(e.graph.vertices.len(), 6);
        assert_eq!(e.graph.edges.len(), 12);
        assert!(e.graph.validate().is_ok());
        assert!(e.action.validate(&e.graph).is_ok());
        let free = e.action.is_free(&e.graph);
        assert!(free.free_on_edges && free.free_on_vertices);
    }
}

//! JSON file formats for groups, graphs, actions and representations, plus
//! CSV spectra.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested
//! lists. Vertex conditions accept the shortcuts `"neumann"` and
//! `"dirichlet"` or explicit matrices with `"bc": "explicit"`. All numbers
//! are parsed locale-independently by `serde_json`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{ElementMap, GraphAction};
use crate::error::{Error, Result};
use crate::graph::{BcKind, GraphBuilder, MetricGraph, Side};
use crate::group::{FiniteGroup, Subgroup};
use crate::linalg::{c64, CMat, C64};
use crate::rep::MatrixRep;
use crate::spectral::{Spectrum, SpectrumEntry};

type Cpx = [f64; 2];

fn to_cpx(z: C64) -> Cpx {
    [z.re, z.im]
}

fn mat_to_rows(m: &CMat) -> Vec<Vec<Cpx>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| to_cpx(m[(r, c)])).collect())
        .collect()
}

fn rows_to_mat(rows: &[Vec<Cpx>]) -> Result<CMat> {
    let nr = rows.len();
    let nc = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::parse("ragged matrix"));
    }
    let mut m = CMat::zeros(nr, nc);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = c64(re, im);
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------- groups

#[derive(Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

pub fn group_to_json(g: &FiniteGroup) -> String {
    let file = GroupFile {
        order: g.order(),
        table: g.table_rows(),
        names: Some(g.names().to_vec()),
    };
    serde_json::to_string_pretty(&file).expect("group serialization")
}

/// Loads a group from JSON, running the full axiom check.
pub fn group_from_json(s: &str) -> Result<Arc<FiniteGroup>> {
    let file: GroupFile =
        serde_json::from_str(s).map_err(|e| Error::parse(format!("group file: {e}")))?;
    if file.table.len() != file.order {
        return Err(Error::parse("group file: order does not match the table"));
    }
    FiniteGroup::from_table(file.table, file.names)
}

/// Resolves `"id:..."` strings to built-ins or parses inline JSON.
pub fn group_from_spec(spec: &str) -> Result<Arc<FiniteGroup>> {
    let trimmed = spec.trim();
    if trimmed.starts_with('{') {
        group_from_json(trimmed)
    } else {
        crate::group::builtin(trimmed)
    }
}

// ---------------------------------------------------------------- graphs

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    id: String,
    tail: String,
    head: String,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct VertexFile {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ends: Option<Vec<(String, String)>>,
    bc: String,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "A")]
    a: Option<Vec<Vec<Cpx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "B")]
    b: Option<Vec<Vec<Cpx>>>,
}

#[derive(Serialize, Deserialize)]
pub struct GraphFile {
    edges: Vec<EdgeFile>,
    vertices: Vec<VertexFile>,
}

pub fn graph_to_json(g: &MetricGraph) -> String {
    let edges = g
        .edges
        .iter()
        .map(|e| EdgeFile {
            id: e.name.clone(),
            tail: g.vertices[e.tail].name.clone(),
            head: g.vertices[e.head].name.clone(),
            length: e.length,
        })
        .collect();
    let vertices = g
        .vertices
        .iter()
        .map(|v| {
            let ends = v
                .ends
                .iter()
                .map(|end| {
                    (
                        g.edges[end.edge].name.clone(),
                        match end.side {
                            Side::Tail => "tail".to_string(),
                            Side::Head => "head".to_string(),
                        },
                    )
                })
                .collect();
            match v.kind {
                BcKind::Neumann => VertexFile {
                    id: v.name.clone(),
                    ends: Some(ends),
                    bc: "neumann".into(),
                    a: None,
                    b: None,
                },
                BcKind::Dirichlet => VertexFile {
                    id: v.name.clone(),
                    ends: Some(ends),
                    bc: "dirichlet".into(),
                    a: None,
                    b: None,
                },
                BcKind::Explicit => VertexFile {
                    id: v.name.clone(),
                    ends: Some(ends),
                    bc: "explicit".into(),
                    a: Some(mat_to_rows(&v.a)),
                    b: Some(mat_to_rows(&v.b)),
                },
            }
        })
        .collect();
    serde_json::to_string_pretty(&GraphFile { edges, vertices }).expect("graph serialization")
}

pub fn graph_from_json(s: &str) -> Result<MetricGraph> {
    let file: GraphFile =
        serde_json::from_str(s).map_err(|e| Error::parse(format!("graph file: {e}")))?;
    let mut builder = GraphBuilder::new();
    let mut vid = BTreeMap::new();
    for v in &file.vertices {
        if vid.contains_key(&v.id) {
            return Err(Error::parse(format!("duplicate vertex id {:?}", v.id)));
        }
        vid.insert(v.id.clone(), builder.vertex(v.id.clone()));
    }
    let mut eid = BTreeMap::new();
    for e in &file.edges {
        let tail = *vid
            .get(&e.tail)
            .ok_or_else(|| Error::parse(format!("edge {:?}: unknown tail {:?}", e.id, e.tail)))?;
        let head = *vid
            .get(&e.head)
            .ok_or_else(|| Error::parse(format!("edge {:?}: unknown head {:?}", e.id, e.head)))?;
        if eid.contains_key(&e.id) {
            return Err(Error::parse(format!("duplicate edge id {:?}", e.id)));
        }
        eid.insert(e.id.clone(), builder.edge(e.id.clone(), tail, head, e.length));
    }
    for v in &file.vertices {
        let idx = vid[&v.id];
        match v.bc.as_str() {
            "neumann" => {
                builder.neumann(idx);
            }
            "dirichlet" => {
                builder.dirichlet(idx);
            }
            "explicit" => {
                let a = rows_to_mat(
                    v.a.as_deref()
                        .ok_or_else(|| Error::parse(format!("vertex {:?}: missing A", v.id)))?,
                )?;
                let b = rows_to_mat(
                    v.b.as_deref()
                        .ok_or_else(|| Error::parse(format!("vertex {:?}: missing B", v.id)))?,
                )?;
                builder.condition(idx, a, b);
            }
            other => {
                return Err(Error::parse(format!(
                    "vertex {:?}: unknown bc {other:?}",
                    v.id
                )))
            }
        }
    }
    // The stored end order of an explicit-condition vertex is normative; the
    // builder sorts ends by (edge, side), so demand the same order in files.
    let graph = builder.build()?;
    for v in &file.vertices {
        if let Some(ends) = &v.ends {
            let idx = vid[&v.id];
            let got: Vec<(String, String)> = graph.vertices[idx]
                .ends
                .iter()
                .map(|end| {
                    (
                        graph.edges[end.edge].name.clone(),
                        match end.side {
                            Side::Tail => "tail".into(),
                            Side::Head => "head".into(),
                        },
                    )
                })
                .collect();
            if *ends != got {
                return Err(Error::parse(format!(
                    "vertex {:?}: listed end order {ends:?} does not match the canonical \
                     (edge, side) order {got:?}",
                    v.id
                )));
            }
        }
    }
    Ok(graph)
}

// ---------------------------------------------------------------- actions

#[derive(Serialize, Deserialize)]
struct GeneratorFile {
    vertices: BTreeMap<String, String>,
    #[serde(default)]
    edges: BTreeMap<String, EdgeImageFile>,
}

#[derive(Serialize, Deserialize)]
struct EdgeImageFile {
    image: String,
    sign: i8,
}

#[derive(Serialize, Deserialize)]
pub struct ActionFile {
    pub group: String,
    generators: BTreeMap<String, GeneratorFile>,
}

pub fn action_to_json(
    graph: &MetricGraph,
    action: &GraphAction,
    generators: &[usize],
) -> String {
    let group = action.group();
    let gens = generators
        .iter()
        .map(|&g| {
            let vertices = graph
                .vertices
                .iter()
                .enumerate()
                .map(|(v, vert)| {
                    (
                        vert.name.clone(),
                        graph.vertices[action.vertex_image(g, v)].name.clone(),
                    )
                })
                .collect();
            let edges = graph
                .edges
                .iter()
                .enumerate()
                .map(|(e, edge)| {
                    (
                        edge.name.clone(),
                        EdgeImageFile {
                            image: graph.edges[action.edge_image(g, e)].name.clone(),
                            sign: action.edge_sign(g, e),
                        },
                    )
                })
                .collect();
            (group.name(g).to_string(), GeneratorFile { vertices, edges })
        })
        .collect();
    let file = ActionFile {
        group: "inline".into(),
        generators: gens,
    };
    serde_json::to_string_pretty(&file).expect("action serialization")
}

/// Loads an action from generator images, completing it via the group table.
pub fn action_from_json(
    s: &str,
    graph: &MetricGraph,
    group: Arc<FiniteGroup>,
) -> Result<GraphAction> {
    let file: ActionFile =
        serde_json::from_str(s).map_err(|e| Error::parse(format!("action file: {e}")))?;
    let vname: BTreeMap<&str, usize> = graph
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let ename: BTreeMap<&str, usize> = graph
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.name.as_str(), i))
        .collect();
    let mut gens = Vec::new();
    for (el_name, gf) in &file.generators {
        let el = group
            .element_by_name(el_name)
            .ok_or_else(|| Error::parse(format!("unknown generator element {el_name:?}")))?;
        let mut vertices = vec![usize::MAX; graph.vertices.len()];
        for (from, to) in &gf.vertices {
            let fi = *vname
                .get(from.as_str())
                .ok_or_else(|| Error::parse(format!("unknown vertex {from:?}")))?;
            let ti = *vname
                .get(to.as_str())
                .ok_or_else(|| Error::parse(format!("unknown vertex {to:?}")))?;
            vertices[fi] = ti;
        }
        if vertices.iter().any(|&v| v == usize::MAX) {
            return Err(Error::parse(format!(
                "generator {el_name:?}: vertex map incomplete"
            )));
        }
        let (edges, signs) = if gf.edges.is_empty() {
            GraphAction::edge_map_from_vertices(graph, &vertices)?
        } else {
            let mut edges = vec![usize::MAX; graph.edges.len()];
            let mut signs = vec![1i8; graph.edges.len()];
            for (from, img) in &gf.edges {
                let fi = *ename
                    .get(from.as_str())
                    .ok_or_else(|| Error::parse(format!("unknown edge {from:?}")))?;
                let ti = *ename
                    .get(img.image.as_str())
                    .ok_or_else(|| Error::parse(format!("unknown edge {:?}", img.image)))?;
                edges[fi] = ti;
                signs[fi] = img.sign;
            }
            if edges.iter().any(|&e| e == usize::MAX) {
                return Err(Error::parse(format!(
                    "generator {el_name:?}: edge map incomplete"
                )));
            }
            (edges, signs)
        };
        gens.push((
            el,
            ElementMap {
                vertices,
                edges,
                signs,
            },
        ));
    }
    GraphAction::from_generators(graph, group, &gens)
}

// --------------------------------------------------------- representations

#[derive(Serialize, Deserialize)]
pub struct RepFile {
    pub group: String,
    pub dim: usize,
    pub matrices: BTreeMap<String, Vec<Vec<Cpx>>>,
    #[serde(default)]
    pub basis_label: String,
}

pub fn rep_to_json(rep: &MatrixRep) -> String {
    let g = rep.group();
    let matrices = g
        .elements()
        .map(|e| (g.name(e).to_string(), mat_to_rows(rep.matrix(e))))
        .collect();
    let file = RepFile {
        group: "inline".into(),
        dim: rep.dim(),
        matrices,
        basis_label: rep.basis_label().to_string(),
    };
    serde_json::to_string_pretty(&file).expect("rep serialization")
}

pub fn rep_from_json(s: &str, group: Arc<FiniteGroup>) -> Result<MatrixRep> {
    let file: RepFile =
        serde_json::from_str(s).map_err(|e| Error::parse(format!("rep file: {e}")))?;
    let mut mats = Vec::with_capacity(group.order());
    for e in group.elements() {
        let rows = file.matrices.get(group.name(e)).ok_or_else(|| {
            Error::parse(format!("rep file: no matrix for element {:?}", group.name(e)))
        })?;
        let m = rows_to_mat(rows)?;
        if m.nrows() != file.dim || m.ncols() != file.dim {
            return Err(Error::parse(format!(
                "rep file: matrix for {:?} is not {}×{}",
                group.name(e),
                file.dim,
                file.dim
            )));
        }
        mats.push(m);
    }
    MatrixRep::new(group, mats, file.basis_label)
}

/// Resolves a subgroup given by comma-separated generator names.
pub fn subgroup_from_names(group: &Arc<FiniteGroup>, names: &str) -> Result<Subgroup> {
    let mut gens = Vec::new();
    for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let el = group
            .element_by_name(name)
            .ok_or_else(|| Error::parse(format!("unknown element {name:?}")))?;
        gens.push(el);
    }
    Subgroup::generated(group, &gens)
}

// ---------------------------------------------------------------- spectra

/// Deterministic CSV: `k,multiplicity` with fixed-precision `k`.
pub fn spectrum_to_csv(s: &Spectrum) -> String {
    let mut out = String::from("k,multiplicity\n");
    for e in &s.entries {
        out.push_str(&format!("{:.12e},{}\n", e.k, e.multiplicity));
    }
    out
}

pub fn spectrum_from_csv(s: &str) -> Result<Spectrum> {
    let mut entries = Vec::new();
    let mut k_max: f64 = 0.0;
    for (i, line) in s.lines().enumerate() {
        if i == 0 && line.trim() == "k,multiplicity" {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let k: f64 = parts
            .next()
            .ok_or_else(|| Error::parse(format!("line {}: missing k", i + 1)))?
            .trim()
            .parse()
            .map_err(|e| Error::parse(format!("line {}: bad k ({e})", i + 1)))?;
        let multiplicity: usize = parts
            .next()
            .ok_or_else(|| Error::parse(format!("line {}: missing multiplicity", i + 1)))?
            .trim()
            .parse()
            .map_err(|e| Error::parse(format!("line {}: bad multiplicity ({e})", i + 1)))?;
        k_max = k_max.max(k);
        entries.push(SpectrumEntry { k, multiplicity });
    }
    Ok(Spectrum {
        entries,
        k_max,
        warnings: Vec::new(),
        weyl_ok: true,
    })
}

//! Eigenvalues and eigenfunctions of quantum graphs.
//!
//! On each edge an eigenfunction at wavenumber `k > 0` is
//! `c₁ cos(kx) + c₂ sin(kx)`; at `k = 0` the basis is `{1, x}`. Collecting
//! the vertex conditions row-wise gives the square secular matrix `M(k)`
//! whose nontrivial nullspace marks the eigenvalue `λ = k²`. Roots are
//! located by scanning the smallest singular value of the row-equilibrated
//! `M(k)` on a grid and refining each bracketed minimum by golden-section
//! search; multiplicities are the number of singular values below the
//! nullspace threshold. Complex condition matrices are fully supported —
//! sign-tracking a determinant would not work for them, which is why the
//! singular-value scan is used.

use crate::action::GraphAction;
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Side};
use crate::linalg::{c64, cr, hermitian_sqrt_inv, max_abs, CMat, C64};
use crate::quotient::reverse_coeffs;
use crate::rep::{char_inner, Character, MatrixRep};
use crate::{RESOLUTION, TOL_NULL, TOL_RANK};

#[derive(Debug, Clone)]
pub struct SolveOpts {
    /// Grid refinement factor relative to the mean eigenvalue spacing.
    pub oversample: f64,
    /// Relative nullspace threshold on the singular values of `M(k)`.
    pub tol_null: f64,
    /// Roots closer than this are merged (multiplicities summed).
    pub resolution: f64,
    /// Also scan `λ = −κ² < 0` with the hyperbolic basis.
    pub negative: bool,
    /// Worker threads for the scan; 0 means read `ISOGRAPH_THREADS` or 1.
    pub threads: usize,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            oversample: 8.0,
            tol_null: TOL_NULL,
            resolution: RESOLUTION,
            negative: false,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub k: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted ascending in `k`; negative eigenvalues `λ = −κ²` are reported
    /// with `k = −κ` in front when the negative scan is enabled.
    pub entries: Vec<SpectrumEntry>,
    pub k_max: f64,
    pub warnings: Vec<String>,
    /// Eigenvalue count agrees with the total-length estimate within the
    /// coarse `|E| + |V|` net.
    pub weyl_ok: bool,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// First `n` eigenvalues, multiplicity expanded.
    pub fn flattened(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        for e in &self.entries {
            for _ in 0..e.multiplicity {
                if out.len() == n {
                    return out;
                }
                out.push(e.k);
            }
        }
        out
    }
}

/// The secular system of a validated graph.
pub struct SecularSystem<'g> {
    graph: &'g MetricGraph,
    size: usize,
}

impl<'g> SecularSystem<'g> {
    pub fn new(graph: &'g MetricGraph) -> Result<Self> {
        let report = graph.validate();
        if !report.is_ok() {
            return Err(Error::InvalidGraph(report.issues.join("; ")));
        }
        Ok(SecularSystem {
            graph,
            size: 2 * graph.edges.len(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Value and outgoing-derivative weights of the two coefficients at one
    /// end of an edge. `k = 0` uses the affine basis `{1, x}`; `k < 0`
    /// encodes the hyperbolic basis `{cosh(κx), sinh(κx)}` with `κ = −k`.
    fn end_weights(k: f64, length: f64, side: Side) -> ((C64, C64), (C64, C64)) {
        if k == 0.0 {
            match side {
                Side::Tail => ((cr(1.0), cr(0.0)), (cr(0.0), cr(1.0))),
                Side::Head => ((cr(1.0), cr(length)), (cr(0.0), cr(-1.0))),
            }
        } else if k > 0.0 {
            let (s, c) = (k * length).sin_cos();
            match side {
                Side::Tail => ((cr(1.0), cr(0.0)), (cr(0.0), cr(k))),
                // value: c₁cos(kl) + c₂sin(kl); outgoing: −f'(l).
                Side::Head => ((cr(c), cr(s)), (cr(k * s), cr(-k * c))),
            }
        } else {
            let kappa = -k;
            let (s, c) = ((kappa * length).sinh(), (kappa * length).cosh());
            match side {
                Side::Tail => ((cr(1.0), cr(0.0)), (cr(0.0), cr(kappa))),
                Side::Head => ((cr(c), cr(s)), (cr(-kappa * s), cr(-kappa * c))),
            }
        }
    }

    /// Assembles `M(k)`: one row block per vertex, column pair per edge.
    pub fn matrix(&self, k: f64) -> CMat {
        let mut m = CMat::zeros(self.size, self.size);
        let mut row0 = 0;
        for v in &self.graph.vertices {
            let d = v.ends.len();
            for (l, &end) in v.ends.iter().enumerate() {
                let length = self.graph.edges[end.edge].length;
                let (val, der) = Self::end_weights(k, length, end.side);
                for r in 0..d {
                    let (a, b) = (v.a[(r, l)], v.b[(r, l)]);
                    m[(row0 + r, 2 * end.edge)] += a * val.0 + b * der.0;
                    m[(row0 + r, 2 * end.edge + 1)] += a * val.1 + b * der.1;
                }
            }
            row0 += d;
        }
        m
    }

    /// Row-equilibrated secular matrix and its scale.
    fn equilibrated(&self, k: f64) -> CMat {
        let mut m = self.matrix(k);
        for r in 0..m.nrows() {
            let scale = m.row(r).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if scale > 0.0 {
                for c in 0..m.ncols() {
                    m[(r, c)] /= cr(scale);
                }
            }
        }
        m
    }

    fn sigma_min(&self, k: f64) -> f64 {
        let m = self.equilibrated(k);
        let svd = m.svd(false, false);
        svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Multiplicity of `k` as the number of singular values below the
    /// threshold.
    fn multiplicity(&self, k: f64, tol_null: f64) -> usize {
        let m = self.equilibrated(k);
        let scale = max_abs(&m).max(1e-300);
        let svd = m.svd(false, false);
        svd.singular_values
            .iter()
            .filter(|&&s| s < tol_null * scale)
            .count()
    }
}

fn thread_count(opts: &SolveOpts) -> usize {
    if opts.threads > 0 {
        return opts.threads;
    }
    std::env::var("ISOGRAPH_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Locates the spectrum of `graph` on `(0, k_max]`, plus the `k = 0`
/// eigenspace (and optionally `λ < 0`). Deterministic for fixed options.
pub fn eigenvalues(graph: &MetricGraph, k_max: f64, opts: &SolveOpts) -> Result<Spectrum> {
    if !(k_max > 0.0) {
        return Err(Error::InvalidGraph("k_max must be positive".into()));
    }
    if graph.is_graph_empty() {
        return Ok(Spectrum {
            entries: Vec::new(),
            k_max,
            warnings: Vec::new(),
            weyl_ok: true,
        });
    }
    let system = SecularSystem::new(graph)?;
    let mut entries = Vec::new();
    let mut warnings = Vec::new();

    // λ = 0 by its own basis.
    let zero_mult = system.multiplicity(0.0, opts.tol_null);
    if zero_mult > 0 {
        entries.push(SpectrumEntry { k: 0.0, multiplicity: zero_mult });
    }

    let mut positive = scan_interval(&system, k_max, opts)?;
    entries.append(&mut positive);

    if opts.negative {
        // Hyperbolic scan for λ = −κ²; bound κ by the largest condition
        // scale, in practice a short range suffices for the catalogue.
        let neg = scan_negative(&system, k_max, opts)?;
        let mut neg_entries: Vec<SpectrumEntry> = neg
            .into_iter()
            .map(|e| SpectrumEntry { k: -e.k, multiplicity: e.multiplicity })
            .collect();
        neg_entries.reverse();
        neg_entries.append(&mut entries);
        entries = neg_entries;
    }

    // Merge near-coincident roots.
    let mut merged: Vec<SpectrumEntry> = Vec::new();
    for e in entries {
        match merged.last_mut() {
            Some(last) if (e.k - last.k).abs() < opts.resolution => {
                warnings.push(format!(
                    "roots {:.9} and {:.9} within resolution; multiplicities summed",
                    last.k, e.k
                ));
                last.multiplicity += e.multiplicity;
            }
            _ => merged.push(e),
        }
    }

    // Coarse eigenvalue-count net against the total-length estimate.
    let found: usize = merged
        .iter()
        .filter(|e| e.k >= 0.0)
        .map(|e| e.multiplicity)
        .sum();
    let expected = graph.total_length() * k_max / std::f64::consts::PI;
    let slack = (graph.edges.len() + graph.vertices.len()) as f64;
    let weyl_ok = (found as f64 - expected).abs() <= slack;
    if !weyl_ok {
        warnings.push(format!(
            "eigenvalue count {found} deviates from the length estimate {expected:.1} \
             by more than {slack}; the scan may have missed roots"
        ));
    }
    Ok(Spectrum {
        entries: merged,
        k_max,
        warnings,
        weyl_ok,
    })
}

/// Scans σ_min over a uniform grid, brackets local minima and refines them.
fn scan_interval(
    system: &SecularSystem,
    k_max: f64,
    opts: &SolveOpts,
) -> Result<Vec<SpectrumEntry>> {
    let total_len = system.graph.total_length();
    let step = std::f64::consts::PI / (opts.oversample * total_len).max(1e-6);
    let n_steps = (k_max / step).ceil() as usize + 1;
    let ks: Vec<f64> = (1..=n_steps).map(|i| (i as f64) * step).filter(|&k| k <= k_max + step).collect();
    let sigmas = parallel_map(&ks, thread_count(opts), |&k| system.sigma_min(k));

    let mut out = Vec::new();
    for i in 0..ks.len() {
        let here = sigmas[i];
        let left = if i == 0 { f64::INFINITY } else { sigmas[i - 1] };
        let right = if i + 1 == ks.len() { f64::INFINITY } else { sigmas[i + 1] };
        // Bracket any local minimum; flat plateaus tie-break to the left.
        if here <= left && here < right {
            let lo = if i == 0 { ks[i] * 0.5 } else { ks[i - 1] };
            let hi = if i + 1 == ks.len() { ks[i] } else { ks[i + 1] };
            let k_star = golden_section(|k| system.sigma_min(k), lo, hi, 1e-12);
            if k_star > k_max {
                continue;
            }
            let m = system.equilibrated(k_star);
            let scale = max_abs(&m).max(1e-300);
            let sigma = system.sigma_min(k_star);
            if sigma < opts.tol_null * scale {
                let mult = system.multiplicity(k_star, opts.tol_null);
                out.push(SpectrumEntry { k: k_star, multiplicity: mult.max(1) });
            }
        }
    }
    out.sort_by(|a, b| a.k.partial_cmp(&b.k).unwrap());
    out.dedup_by(|b, a| {
        if (b.k - a.k).abs() < 1e-10 {
            a.multiplicity = a.multiplicity.max(b.multiplicity);
            true
        } else {
            false
        }
    });
    Ok(out)
}

fn scan_negative(
    system: &SecularSystem,
    kappa_max: f64,
    opts: &SolveOpts,
) -> Result<Vec<SpectrumEntry>> {
    // Reuse the positive-scan machinery through k ↦ −κ.
    let total_len = system.graph.total_length();
    let step = std::f64::consts::PI / (opts.oversample * total_len).max(1e-6);
    let n_steps = (kappa_max / step).ceil() as usize + 1;
    let ks: Vec<f64> = (1..=n_steps).map(|i| (i as f64) * step).collect();
    let sigmas = parallel_map(&ks, thread_count(opts), |&k| system.sigma_min(-k));
    let mut out = Vec::new();
    for i in 0..ks.len() {
        let here = sigmas[i];
        let left = if i == 0 { f64::INFINITY } else { sigmas[i - 1] };
        let right = if i + 1 == ks.len() { f64::INFINITY } else { sigmas[i + 1] };
        if here <= left && here < right {
            let lo = if i == 0 { ks[i] * 0.5 } else { ks[i - 1] };
            let hi = if i + 1 == ks.len() { ks[i] } else { ks[i + 1] };
            let k_star = golden_section(|k| system.sigma_min(-k), lo, hi, 1e-12);
            let m = system.equilibrated(-k_star);
            let scale = max_abs(&m).max(1e-300);
            if system.sigma_min(-k_star) < opts.tol_null * scale {
                let mult = system.multiplicity(-k_star, opts.tol_null);
                out.push(SpectrumEntry { k: k_star, multiplicity: mult.max(1) });
            }
        }
    }
    Ok(out)
}

fn parallel_map<T: Sync, U: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    if threads <= 1 || items.len() < 16 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    let slots: Vec<(usize, &[T])> = items.chunks(chunk).enumerate().collect();
    let mut results: Vec<(usize, Vec<U>)> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = slots
            .into_iter()
            .map(|(i, part)| scope.spawn({ let f = &f; move || (i, part.iter().map(f).collect::<Vec<U>>()) }))
            .collect();
        for h in handles {
            results.push(h.join().expect("scan worker panicked"));
        }
    });
    results.sort_by_key(|(i, _)| *i);
    let mut flat = Vec::with_capacity(items.len());
    for (_, mut part) in results {
        flat.append(&mut part);
    }
    flat
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > width {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// An eigenfunction as per-edge coefficient pairs, L²-normalized.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub k: f64,
    pub coeffs: Vec<(C64, C64)>,
}

/// Closed-form L² inner product of two coefficient functions on one edge.
pub fn edge_inner(k: f64, length: f64, f: (C64, C64), g: (C64, C64)) -> C64 {
    if k == 0.0 {
        // (c₁ + c₂x, d₁ + d₂x)
        let l = length;
        f.0.conj() * g.0 * cr(l)
            + (f.0.conj() * g.1 + f.1.conj() * g.0) * cr(l * l / 2.0)
            + f.1.conj() * g.1 * cr(l * l * l / 3.0)
    } else {
        let l = length;
        let (s2, c2) = (2.0 * k * l).sin_cos();
        let icc = l / 2.0 + s2 / (4.0 * k);
        let iss = l / 2.0 - s2 / (4.0 * k);
        let ics = (1.0 - c2) / (4.0 * k);
        f.0.conj() * g.0 * cr(icc)
            + (f.0.conj() * g.1 + f.1.conj() * g.0) * cr(ics)
            + f.1.conj() * g.1 * cr(iss)
    }
}

/// L² inner product over the whole graph.
pub fn graph_inner(graph: &MetricGraph, k: f64, f: &[(C64, C64)], g: &[(C64, C64)]) -> C64 {
    graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| edge_inner(k, edge.length, f[e], g[e]))
        .sum()
}

/// Orthonormal basis of the eigenspace at `k` (which must be an accepted
/// eigenvalue). Residuals of the vertex conditions are below
/// `1e-8` relative to the coefficient scale.
pub fn eigenfunctions(graph: &MetricGraph, k: f64, opts: &SolveOpts) -> Result<Vec<Eigenfunction>> {
    let system = SecularSystem::new(graph)?;
    let m = system.equilibrated(k);
    let ns = crate::linalg::nullspace(&m, opts.tol_null.max(TOL_RANK));
    if ns.ncols() == 0 {
        return Err(Error::NotAnEigenvalue {
            k,
            detail: "secular matrix has trivial nullspace".into(),
        });
    }
    // L² Gram matrix and its inverse square root.
    let dim = ns.ncols();
    let coeff = |col: usize| -> Vec<(C64, C64)> {
        (0..graph.edges.len())
            .map(|e| (ns[(2 * e, col)], ns[(2 * e + 1, col)]))
            .collect()
    };
    let mut gram = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            gram[(i, j)] = graph_inner(graph, k, &coeff(i), &coeff(j));
        }
    }
    let (_, inv_sqrt) = hermitian_sqrt_inv(&gram)?;
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut coeffs = vec![(cr(0.0), cr(0.0)); graph.edges.len()];
        for i in 0..dim {
            let w = inv_sqrt[(i, j)];
            let ci = coeff(i);
            for e in 0..graph.edges.len() {
                coeffs[e].0 += w * ci[e].0;
                coeffs[e].1 += w * ci[e].1;
            }
        }
        out.push(Eigenfunction { k, coeffs });
    }
    // Residual check.
    for f in &out {
        let scale = f
            .coeffs
            .iter()
            .map(|c| c.0.norm().max(c.1.norm()))
            .fold(1e-300, f64::max);
        let mut flat = CMat::zeros(system.size(), 1);
        for e in 0..graph.edges.len() {
            flat[(2 * e, 0)] = f.coeffs[e].0;
            flat[(2 * e + 1, 0)] = f.coeffs[e].1;
        }
        let resid = max_abs(&(m.clone() * flat));
        if resid > 1e-7 * scale {
            return Err(Error::NotAnEigenvalue {
                k,
                detail: format!("eigenfunction residual {resid:.2e}"),
            });
        }
    }
    Ok(out)
}

/// Parent spectrum together with orthonormal eigenbases, the shared input of
/// every representation-weighted subspectrum computation.
pub struct ParentEigendata {
    pub spectrum: Spectrum,
    pub bases: Vec<Vec<Eigenfunction>>,
}

impl ParentEigendata {
    pub fn compute(graph: &MetricGraph, k_max: f64, opts: &SolveOpts) -> Result<Self> {
        let spectrum = eigenvalues(graph, k_max, opts)?;
        let mut bases = Vec::with_capacity(spectrum.entries.len());
        for e in &spectrum.entries {
            let basis = eigenfunctions(graph, e.k, opts)?;
            bases.push(basis);
        }
        Ok(ParentEigendata { spectrum, bases })
    }
}

/// Trace character of the group action on each eigenspace:
/// `χ(g) = Σᵢ ⟨fᵢ, g·fᵢ⟩`, computed with closed-form trigonometric
/// integrals and orientation-sign transport.
pub fn eigenspace_character(
    graph: &MetricGraph,
    action: &GraphAction,
    basis: &[Eigenfunction],
) -> Result<Character> {
    let group = action.group().clone();
    let k = basis.first().map(|f| f.k).unwrap_or(0.0);
    let mut values = Vec::with_capacity(group.order());
    for g in group.elements() {
        let mut trace = cr(0.0);
        for f in basis {
            // (g·f)|_ê = transport of f|_{g⁻¹·ê}.
            for (e_img, edge) in graph.edges.iter().enumerate() {
                let e_src = action.edge_image(group.inv(g), e_img);
                let sign = action.edge_sign(g, e_src);
                let moved = if sign == 1 {
                    f.coeffs[e_src]
                } else {
                    reverse_coeffs(k, graph.edges[e_src].length, f.coeffs[e_src])
                };
                trace += edge_inner(k, edge.length, f.coeffs[e_img], moved);
            }
        }
        values.push(trace);
    }
    Character::new(group, values)
}

/// Representation-weighted subspectrum: for each parent eigenvalue the
/// multiplicity is `⟨χ_R, χ_{eigenspace}⟩`, rounded to an integer (an error
/// above `1e-6` indicates a missed degeneracy or an invalid action). Zero
/// multiplicities are dropped.
pub fn r_spectrum_from(
    graph: &MetricGraph,
    action: &GraphAction,
    rep: &MatrixRep,
    data: &ParentEigendata,
) -> Result<Spectrum> {
    if !crate::group::same_group(action.group(), rep.group()) {
        return Err(Error::GroupMismatch("r_spectrum: rep on a different group".into()));
    }
    let chi_r = rep.character();
    let mut entries = Vec::new();
    for (entry, basis) in data.spectrum.entries.iter().zip(&data.bases) {
        let chi_space = eigenspace_character(graph, action, basis)?;
        let ip = char_inner(&chi_r, &chi_space)?;
        let rounded = ip.re.round();
        if (ip.re - rounded).abs() > 1e-6 || ip.im.abs() > 1e-6 || rounded < -0.5 {
            return Err(Error::InvalidRep(format!(
                "non-integral subspectrum multiplicity {ip} at k = {:.9}",
                entry.k
            )));
        }
        if rounded > 0.0 {
            entries.push(SpectrumEntry {
                k: entry.k,
                multiplicity: rounded as usize,
            });
        }
    }
    Ok(Spectrum {
        entries,
        k_max: data.spectrum.k_max,
        warnings: data.spectrum.warnings.clone(),
        weyl_ok: data.spectrum.weyl_ok,
    })
}

/// One-call version of [`r_spectrum_from`].
pub fn r_spectrum(
    graph: &MetricGraph,
    action: &GraphAction,
    rep: &MatrixRep,
    k_max: f64,
    opts: &SolveOpts,
) -> Result<Spectrum> {
    let data = ParentEigendata::compute(graph, k_max, opts)?;
    r_spectrum_from(graph, action, rep, &data)
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub matched: bool,
    pub mismatches: Vec<String>,
    pub pairs: usize,
}

/// Greedy pairing of two sorted spectra: positions must agree within `tol`
/// in `k` and exactly in multiplicity. `count` limits the comparison to the
/// first so-many eigenvalues (multiplicity expanded); pass `usize::MAX` for
/// everything both lists cover.
pub fn compare_spectra(s1: &Spectrum, s2: &Spectrum, tol: f64, count: usize) -> CompareReport {
    let f1 = s1.flattened(count.min(s1.total_multiplicity()));
    let f2 = s2.flattened(count.min(s2.total_multiplicity()));
    let n = f1.len().min(f2.len()).min(count);
    let mut mismatches = Vec::new();
    if count != usize::MAX && (f1.len() < count || f2.len() < count) {
        mismatches.push(format!(
            "requested {count} eigenvalues, lists carry {} and {}",
            f1.len(),
            f2.len()
        ));
    }
    for i in 0..n {
        if (f1[i] - f2[i]).abs() > tol {
            mismatches.push(format!(
                "position {i}: {:.10} vs {:.10} (Δ = {:.2e})",
                f1[i],
                f2[i],
                (f1[i] - f2[i]).abs()
            ));
        }
    }
    CompareReport {
        matched: mismatches.is_empty(),
        mismatches,
        pairs: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn interval(length: f64, d0: bool, d1: bool) -> MetricGraph {
        let mut b = GraphBuilder::new();
        let v0 = b.vertex("v0");
        let v1 = b.vertex("v1");
        b.edge("e", v0, v1, length);
        if d0 {
            b.dirichlet(v0);
        }
        if d1 {
            b.dirichlet(v1);
        }
        b.build().unwrap()
    }

    #[test]
    fn interval_spectra_match_closed_forms() {
        let pi = std::f64::consts::PI;
        let opts = SolveOpts::default();

        // Dirichlet-Dirichlet on [0, 1]: k = nπ.
        let g = interval(1.0, true, true);
        let s = eigenvalues(&g, 10.0, &opts).unwrap();
        let expect: Vec<f64> = (1..=3).map(|n| n as f64 * pi).collect();
        assert_eq!(s.entries.len(), 3);
        for (e, want) in s.entries.iter().zip(expect) {
            assert!((e.k - want).abs() < 1e-10, "{} vs {}", e.k, want);
            assert_eq!(e.multiplicity, 1);
        }
        assert!(s.weyl_ok);

        // Neumann-Neumann: k = 0 and nπ.
        let g = interval(1.0, false, false);
        let s = eigenvalues(&g, 10.0, &opts).unwrap();
        assert_eq!(s.entries[0].k, 0.0);
        for (n, e) in s.entries[1..].iter().enumerate() {
            assert!((e.k - (n as f64 + 1.0) * pi).abs() < 1e-10);
        }

        // Mixed: k = (n − ½)π.
        let g = interval(1.0, true, false);
        let s = eigenvalues(&g, 10.0, &opts).unwrap();
        for (n, e) in s.entries.iter().enumerate() {
            assert!((e.k - (n as f64 + 0.5) * pi).abs() < 1e-10);
        }
    }

    #[test]
    fn dirichlet_string_via_dense_bisection_oracle() {
        // Independent oracle: the mixed条件 interval has secular function
        // cos(kl); bracket sign changes of it on a fine grid and bisect.
        let l = 1.37;
        let g = interval(l, true, false);
        let mut oracle = Vec::new();
        let f = |k: f64| (k * l).cos();
        let grid = 1e-3;
        let mut k = grid;
        while k < 12.0 {
            if f(k).signum() != f(k + grid).signum() {
                let (mut a, mut b) = (k, k + grid);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if f(a).signum() == f(m).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                oracle.push(0.5 * (a + b));
            }
            k += grid;
        }
        let s = eigenvalues(&g, 12.0, &SolveOpts::default()).unwrap();
        assert_eq!(s.entries.len(), oracle.len());
        for (e, want) in s.entries.iter().zip(oracle) {
            assert!((e.k - want).abs() < 1e-8);
        }
    }

    #[test]
    fn equilateral_star_matches_enumeration_oracle() {
        // Neumann 3-star with edge length l. Symmetric modes solve
        // sin(kl) = 0 (multiplicity 1), the two antisymmetric families
        // cos(kl) = 0 (multiplicity 2); plus the constant at k = 0.
        let l = 1.0;
        let mut b = GraphBuilder::new();
        let c = b.vertex("c");
        let outer: Vec<usize> = (0..3).map(|i| b.vertex(format!("o{i}"))).collect();
        for (i, &o) in outer.iter().enumerate() {
            b.edge(format!("e{i}"), c, o, l);
        }
        let g = b.build().unwrap();
        let pi = std::f64::consts::PI;
        let mut oracle: Vec<(f64, usize)> = vec![(0.0, 1)];
        for n in 1..=6 {
            oracle.push((n as f64 * pi / l, 1));
        }
        for n in 0..6 {
            oracle.push(((n as f64 + 0.5) * pi / l, 2));
        }
        oracle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let oracle: Vec<(f64, usize)> = oracle.into_iter().take(10).collect();

        let s = eigenvalues(&g, oracle.last().unwrap().0 + 0.2, &SolveOpts::default()).unwrap();
        for (i, &(k, m)) in oracle.iter().enumerate() {
            assert!((s.entries[i].k - k).abs() < 1e-8, "root {i}");
            assert_eq!(s.entries[i].multiplicity, m, "multiplicity at {k}");
        }
    }

    #[test]
    fn disjoint_identical_edges_double_multiplicity() {
        let g1 = interval(1.0, false, false);
        let g = g1.disjoint_union(&g1);
        let s = eigenvalues(&g, 8.0, &SolveOpts::default()).unwrap();
        for e in &s.entries {
            assert_eq!(e.multiplicity, 2, "at k = {}", e.k);
        }
    }

    #[test]
    fn row_scaling_does_not_move_eigenvalues() {
        let mut g = interval(1.0, true, false);
        let s1 = eigenvalues(&g, 8.0, &SolveOpts::default()).unwrap();
        g.vertices[0].a *= cr(37.0);
        g.vertices[1].b *= c64(0.0, 2.0); // complex scaling too
        let s2 = eigenvalues(&g, 8.0, &SolveOpts::default()).unwrap();
        let r = compare_spectra(&s1, &s2, 1e-9, usize::MAX);
        assert!(r.matched, "{:?}", r.mismatches);
    }

    #[test]
    fn eigenfunctions_are_orthonormal_and_satisfy_conditions() {
        let l = 1.0;
        let mut b = GraphBuilder::new();
        let c = b.vertex("c");
        let outer: Vec<usize> = (0..3).map(|i| b.vertex(format!("o{i}"))).collect();
        for (i, &o) in outer.iter().enumerate() {
            b.edge(format!("e{i}"), c, o, l);
        }
        let g = b.build().unwrap();
        let k = std::f64::consts::FRAC_PI_2; // antisymmetric, multiplicity 2
        let fs = eigenfunctions(&g, k, &SolveOpts::default()).unwrap();
        assert_eq!(fs.len(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let ip = graph_inner(&g, k, &fs[i].coeffs, &fs[j].coeffs);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - cr(want)).norm() < 1e-8);
            }
        }
        assert!(eigenfunctions(&g, 1.1, &SolveOpts::default()).is_err());
    }

    #[test]
    fn interval_dirichlet_eigenfunction_is_sine() {
        let g = interval(1.0, true, true);
        let k = std::f64::consts::PI;
        let fs = eigenfunctions(&g, k, &SolveOpts::default()).unwrap();
        assert_eq!(fs.len(), 1);
        // Pure sine: cosine coefficient vanishes.
        assert!(fs[0].coeffs[0].0.norm() < 1e-9);
        let norm = graph_inner(&g, k, &fs[0].coeffs, &fs[0].coeffs);
        assert!((norm - cr(1.0)).norm() < 1e-10);
    }

    #[test]
    fn trivial_action_r_spectrum_is_full_spectrum() {
        use crate::action::{ElementMap, GraphAction};
        use crate::group::FiniteGroup;
        let g = interval(1.0, false, false);
        let triv = FiniteGroup::trivial();
        let action = GraphAction::from_maps(triv.clone(), vec![ElementMap::identity(&g)]).unwrap();
        let rep = MatrixRep::trivial(triv);
        let s = eigenvalues(&g, 7.0, &SolveOpts::default()).unwrap();
        let rs = r_spectrum(&g, &action, &rep, 7.0, &SolveOpts::default()).unwrap();
        assert_eq!(s.entries.len(), rs.entries.len());
        for (a, b) in s.entries.iter().zip(&rs.entries) {
            assert_eq!(a.multiplicity, b.multiplicity);
            assert!((a.k - b.k).abs() < 1e-12);
        }
        // The constant mode at k = 0 is invariant.
        assert_eq!(rs.entries[0].k, 0.0);
    }

    #[test]
    fn undersampled_scan_trips_the_count_net() {
        let g = interval(1.0, true, true);
        let opts = SolveOpts {
            oversample: 0.22,
            ..SolveOpts::default()
        };
        let s = eigenvalues(&g, 40.0, &opts).unwrap();
        assert!(!s.weyl_ok);
        assert!(s.warnings.iter().any(|w| w.contains("missed")));
    }

    #[test]
    fn compare_spectra_reports_mismatches() {
        let g = interval(1.0, true, true);
        let s = eigenvalues(&g, 10.0, &SolveOpts::default()).unwrap();
        let r = compare_spectra(&s, &s, 1e-12, usize::MAX);
        assert!(r.matched);
        let mut shifted = s.clone();
        shifted.entries[0].k += 1e-3;
        let r = compare_spectra(&s, &shifted, 1e-7, usize::MAX);
        assert!(!r.matched);
    }
}

//! Dense complex linear algebra helpers.
//!
//! Everything operates on `DMatrix<Complex<f64>>`. Rank decisions use a
//! threshold relative to the largest singular value (or largest initial
//! column norm for the pivoted QR).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::TOL_RANK;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real scalar as a complex number.
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn block_diag(blocks: &[CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[CMat]) -> CMat {
    assert!(!blocks.is_empty());
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows);
        out.view_mut((0, c0), (rows, b.ncols())).copy_from(b);
        c0 += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[CMat]) -> CMat {
    assert!(!blocks.is_empty());
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols);
        out.view_mut((r0, 0), (b.nrows(), cols)).copy_from(b);
        r0 += b.nrows();
    }
    out
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let svd = m.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Smallest singular value of a square (or rectangular) matrix.
pub fn sigma_min(m: &CMat) -> f64 {
    let s = singular_values(m);
    s.last().copied().unwrap_or(0.0)
}

pub fn rank(m: &CMat, tol_rel: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&s0) if s0 == 0.0 => 0,
        Some(&s0) => s.iter().filter(|&&x| x > tol_rel * s0).count(),
    }
}

/// Orthonormal basis of the kernel of `m`, as matrix columns.
///
/// The matrix is padded with zero rows to at least square shape so that the
/// thin SVD carries the full right-singular basis.
pub fn nullspace(m: &CMat, tol_rel: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd v_t");
    let s = &svd.singular_values;
    let s0 = s.iter().copied().fold(0.0, f64::max);
    let r = if s0 == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > tol_rel * s0).count()
    };
    let dim = n - r;
    let mut out = CMat::zeros(n, dim);
    // Rows of v_t with the smallest singular values span the kernel.
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap());
    for (col, &row) in order.iter().skip(r).enumerate() {
        for c in 0..n {
            out[(c, col)] = v_t[(row, c)].conj();
        }
    }
    out
}

/// Orthonormal basis of the solution set `{(x, y) : A x + B y = 0}` in
/// `C^{2c}`, with the `x` block first.
pub fn solution_space(a: &CMat, b: &CMat, tol_rel: f64) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    nullspace(&hstack(&[a.clone(), b.clone()]), tol_rel)
}

/// Spectral-norm distance between the orthogonal projectors onto the column
/// spans of `a` and `b` (both assumed to have orthonormal columns). Returns
/// `INFINITY` when the dimensions differ.
pub fn subspace_distance(a: &CMat, b: &CMat) -> f64 {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let pa = a * a.adjoint();
    let pb = b * b.adjoint();
    singular_values(&(pa - pb)).first().copied().unwrap_or(0.0)
}

/// Column-pivoted Householder QR.
pub struct PivotedQr {
    /// Original column index of each pivot, in pivot order.
    pub pivots: Vec<usize>,
    /// Orthonormal columns (`m × min(m, n)`), pivot-ordered.
    pub q: CMat,
    /// Numerical rank at the given relative threshold.
    pub rank: usize,
}

/// Householder QR with column pivoting on the largest remaining column norm.
pub fn pivoted_qr(m: &CMat, tol_rel: f64) -> PivotedQr {
    let (nr, nc) = m.shape();
    let kmax = nr.min(nc);
    let mut r = m.clone();
    let mut pivots: Vec<usize> = (0..nc).collect();
    let mut q = CMat::identity(nr, nr);
    let norm0 = (0..nc)
        .map(|j| r.column(j).norm())
        .fold(0.0_f64, f64::max);
    let mut rank = 0;
    for k in 0..kmax {
        // Pivot: remaining column with the largest trailing norm.
        let (jbest, nbest) = (k..nc)
            .map(|j| (j, r.view((k, j), (nr - k, 1)).norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if norm0 == 0.0 || nbest <= tol_rel * norm0 {
            break;
        }
        if jbest != k {
            r.swap_columns(k, jbest);
            pivots.swap(k, jbest);
        }
        rank = k + 1;
        // Householder reflector zeroing r[k+1.., k].
        let x0 = r[(k, k)];
        let alpha = if x0.norm() == 0.0 {
            cr(-nbest)
        } else {
            -(x0 / x0.norm()) * nbest
        };
        let mut v = CVec::zeros(nr - k);
        for i in k..nr {
            v[i - k] = r[(i, k)];
        }
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm > 0.0 {
            let v = v / cr(vnorm);
            // r[k.., k..] -= 2 v (v† r)
            let sub = r.view((k, k), (nr - k, nc - k)).into_owned();
            let w = v.adjoint() * &sub;
            let upd = &sub - &v * &w * cr(2.0);
            r.view_mut((k, k), (nr - k, nc - k)).copy_from(&upd);
            // q[:, k..] -= 2 (q v) v†
            let qsub = q.view((0, k), (nr, nr - k)).into_owned();
            let qv = &qsub * &v;
            let qupd = &qsub - &qv * v.adjoint() * cr(2.0);
            q.view_mut((0, k), (nr, nr - k)).copy_from(&qupd);
        }
    }
    PivotedQr {
        pivots,
        q: q.view((0, 0), (nr, kmax)).into_owned(),
        rank,
    }
}

/// Orthonormal basis of the column space.
pub fn col_space(m: &CMat, tol_rel: f64) -> CMat {
    let qr = pivoted_qr(m, tol_rel);
    qr.q.view((0, 0), (m.nrows(), qr.rank)).into_owned()
}

/// Select `target` linearly independent rows of `m`, ascending. Errors if the
/// numerical rank differs from `target`.
pub fn select_independent_rows(m: &CMat, target: usize, tol_rel: f64) -> Result<Vec<usize>> {
    let qr = pivoted_qr(&m.adjoint(), tol_rel);
    if qr.rank != target {
        return Err(Error::RankDeficient(format!(
            "expected rank {target}, found {} in a {}x{} block",
            qr.rank,
            m.nrows(),
            m.ncols()
        )));
    }
    let mut rows: Vec<usize> = qr.pivots[..target].to_vec();
    rows.sort_unstable();
    Ok(rows)
}

/// Keep a maximal independent set of rows of the stacked block `(A B)`,
/// returning square `c×c` matrices that describe the same solution set.
pub fn reduce_rows(a: &CMat, b: &CMat, tol_rel: f64) -> Result<(CMat, CMat)> {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let c = a.ncols();
    let stacked = hstack(&[a.clone(), b.clone()]);
    let rows = select_independent_rows(&stacked, c, tol_rel)?;
    let mut ra = CMat::zeros(c, c);
    let mut rb = CMat::zeros(c, c);
    for (i, &row) in rows.iter().enumerate() {
        ra.set_row(i, &a.row(row));
        rb.set_row(i, &b.row(row));
    }
    Ok((ra, rb))
}

/// Inverse via LU; errors on (numerically) singular input.
pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{}x{} matrix not invertible", m.nrows(), m.ncols())))
}

/// Condition number estimate from the singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let d = m.adjoint() * m - identity(m.ncols());
    max_abs(&d) < tol
}

/// Hermitian square root and inverse square root of a positive definite
/// matrix, via the eigendecomposition.
pub fn hermitian_sqrt_inv(m: &CMat) -> Result<(CMat, CMat)> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut sq = CMat::zeros(n, n);
    let mut inv = CMat::zeros(n, n);
    for i in 0..n {
        let ev = eig.eigenvalues[i];
        if ev <= 0.0 {
            return Err(Error::Singular(format!(
                "matrix not positive definite (eigenvalue {ev:.3e})"
            )));
        }
        sq[(i, i)] = cr(ev.sqrt());
        inv[(i, i)] = cr(1.0 / ev.sqrt());
    }
    let u = &eig.eigenvectors;
    Ok((u * &sq * u.adjoint(), u * &inv * u.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        // x + y + z = 0 has a two dimensional kernel.
        let m = CMat::from_row_slice(1, 3, &[cr(1.0), cr(1.0), cr(1.0)]);
        let ns = nullspace(&m, TOL_RANK);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&m * &ns)) < 1e-12);
        let gram = ns.adjoint() * &ns;
        assert!(max_abs_diff(&gram, &identity(2)) < 1e-12);
    }

    #[test]
    fn pivoted_qr_detects_rank_and_pivots() {
        // Third column dominates, first two dependent.
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                cr(1.0),
                cr(2.0),
                cr(100.0),
                cr(1.0),
                cr(2.0),
                cr(0.0),
                cr(1.0),
                cr(2.0),
                cr(0.0),
            ],
        );
        let qr = pivoted_qr(&m, TOL_RANK);
        assert_eq!(qr.rank, 2);
        assert_eq!(qr.pivots[0], 2);
        let q2 = col_space(&m, TOL_RANK);
        assert_eq!(q2.ncols(), 2);
        // Columns of m lie in span(q2).
        let proj = &q2 * q2.adjoint() * &m;
        assert!(max_abs_diff(&proj, &m) < 1e-10);
    }

    #[test]
    fn reduce_rows_keeps_solution_set() {
        // 4x2 rank-2 stacked system with redundant rows.
        let a = CMat::from_row_slice(
            4,
            2,
            &[
                cr(1.0),
                c64(0.0, 1.0),
                cr(2.0),
                c64(0.0, 2.0),
                cr(0.0),
                cr(0.0),
                cr(1.0),
                cr(1.0),
            ],
        );
        let b = CMat::from_row_slice(
            4,
            2,
            &[
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(1.0),
                cr(-1.0),
                cr(0.5),
                cr(3.0),
            ],
        );
        let (ra, rb) = reduce_rows(&a, &b, TOL_RANK).unwrap();
        assert_eq!(ra.shape(), (2, 2));
        let s1 = solution_space(&a, &b, TOL_RANK);
        let s2 = solution_space(&ra, &rb, TOL_RANK);
        assert!(subspace_distance(&s1, &s2) < 1e-10);
    }

    #[test]
    fn hermitian_sqrt_roundtrip() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[cr(2.0), c64(0.0, -0.5), c64(0.0, 0.5), cr(1.0)],
        );
        let (sq, inv) = hermitian_sqrt_inv(&a).unwrap();
        assert!(max_abs_diff(&(&sq * &sq), &a) < 1e-10);
        assert!(max_abs_diff(&(&sq * &inv), &identity(2)) < 1e-10);
    }

    #[test]
    fn sigma_min_of_singular_matrix_is_zero() {
        let m = CMat::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(2.0), cr(4.0)]);
        assert!(approx(sigma_min(&m), 0.0, 1e-12));
        assert_eq!(rank(&m, TOL_RANK), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Row selection never changes the solution set of a full-rank pair.
        #[test]
        fn prop_reduce_rows_preserves_nullspace(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c = rng.gen_range(1..4usize);
            let extra = rng.gen_range(0..3usize);
            let r = c + extra;
            let mut rnd = |n: usize, m: usize| {
                CMat::from_fn(n, m, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            };
            // Start from a square invertible-ish pair, then append random
            // linear combinations of its rows.
            let a0 = rnd(c, c) + identity(c) * cr(2.0);
            let b0 = rnd(c, c);
            let mix = rnd(extra, c);
            let a = vstack(&[a0.clone(), &mix * &a0]);
            let b = vstack(&[b0.clone(), &mix * &b0]);
            prop_assume!(rank(&hstack(&[a.clone(), b.clone()]), TOL_RANK) == c);
            let (ra, rb) = reduce_rows(&a, &b, TOL_RANK).unwrap();
            let s1 = solution_space(&a, &b, TOL_RANK);
            let s2 = solution_space(&ra, &rb, TOL_RANK);
            prop_assert!(subspace_distance(&s1, &s2) < 1e-8);
        }
    }
}

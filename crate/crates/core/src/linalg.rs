//! Dense complex linear algebra used throughout the crate.
//!
//! Every matrix is stored as `DMatrix<Complex<f64>>`; real-field data simply
//! carries zero imaginary parts. The helpers here wrap nalgebra's SVD and
//! Hermitian eigensolver with the conventions the rest of the crate relies
//! on: sorted spectra, full right singular bases, and empty-matrix safety.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v);
    }
    m
}

/// Build a complex matrix from a real row-major slice.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| c(data[i * cols + j]))
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let mut a = if m.nrows() >= m.ncols() { m.clone() } else { m.adjoint() };
    jacobi_orthogonalize(&mut a);
    a.column_iter().fold(0.0_f64, |acc, col| acc.max(col.norm()))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖M - M*‖`.
pub fn hermitian_residual(m: &CMat) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// `‖B*B - I‖`, zero for a basis with no columns.
pub fn orthonormality_residual(b: &CMat) -> f64 {
    if b.ncols() == 0 {
        return 0.0;
    }
    op_norm(&(b.adjoint() * b - identity(b.ncols())))
}

/// Largest absolute imaginary part.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs()))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    // Symmetrize so roundoff asymmetry in the input does not leak in.
    let h = (m + m.adjoint()) * c(0.5);
    let (diagonal, v) = jacobi_eigen(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diagonal[a].total_cmp(&diagonal[b]));
    let values = order.iter().map(|&i| diagonal[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, j| v[(r, order[j])]);
    (values, vectors)
}

/// Cyclic two-sided Jacobi for a Hermitian matrix: returns the diagonal of
/// the converged matrix and the accumulated unitary.
fn jacobi_eigen(mut h: CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let mut v = identity(n);
    let scale = frobenius(&h).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += h[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = h[(p, q)];
                let g = hpq.norm();
                if g <= 1e-18 * scale {
                    continue;
                }
                let phase = hpq.conj().unscale(g);
                let phase = phase.unscale(phase.norm());
                let zeta = (h[(q, q)].re - h[(p, p)].re) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for r in 0..n {
                    let x = h[(r, p)];
                    let y = h[(r, q)] * phase;
                    h[(r, p)] = x * cs - y * sn;
                    h[(r, q)] = x * sn + y * cs;
                }
                let phase_bar = phase.conj();
                for r in 0..n {
                    let x = h[(p, r)];
                    let y = h[(q, r)] * phase_bar;
                    h[(p, r)] = x * cs - y * sn;
                    h[(q, r)] = x * sn + y * cs;
                }
                h[(p, q)] = ZERO;
                h[(q, p)] = ZERO;
                for r in 0..n {
                    let x = v[(r, p)];
                    let y = v[(r, q)] * phase;
                    v[(r, p)] = x * cs - y * sn;
                    v[(r, q)] = x * sn + y * cs;
                }
            }
        }
    }
    ((0..n).map(|i| h[(i, i)].re).collect(), v)
}

/// Singular value decomposition with singular values descending and a full
/// `cols x cols` right basis `V`, so that `M V[:, i] = s_i U[:, i]` for every
/// column of `M` (trailing singular values are zero when `rows < cols`).
///
/// Returns `(U, s, V)` with `U` of size `max(rows, cols) x cols`; rows of `U`
/// beyond `rows` belong to zero padding.
pub struct FullSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn svd_full_right(m: &CMat) -> FullSvd {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return FullSvd {
            u: zeros(rows, 0),
            s: Vec::new(),
            v: zeros(0, 0),
        };
    }
    let padded_rows = rows.max(cols);
    let mut a = zeros(padded_rows, cols);
    a.view_mut((0, 0), (rows, cols)).copy_from(m);
    let v = jacobi_orthogonalize(&mut a);
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let mut u = zeros(padded_rows, cols);
    for (j, &i) in order.iter().enumerate() {
        if norms[i] > 0.0 {
            u.set_column(j, &(a.column(i) / c(norms[i])));
        }
    }
    let v = CMat::from_fn(cols, cols, |r, j| v[(r, order[j])]);
    FullSvd { u, s, v }
}

/// One-sided Jacobi: rotates the columns of `a` in place until they are
/// mutually orthogonal and returns the accumulated unitary `V`, so that the
/// input equals `a V*`. Accurate even when the columns are already nearly
/// orthogonal, where bidiagonalization-based SVDs can stall.
fn jacobi_orthogonalize(a: &mut CMat) -> CMat {
    let cols = a.ncols();
    let mut v = identity(cols);
    // Pairs whose inner product is negligible against the whole matrix are
    // left alone; rotating them only churns roundoff (and, deep in the
    // subnormal range, loses the unit modulus of the phase).
    let floor = 1e-30 * a.norm_squared();
    for _sweep in 0..80 {
        let mut rotated = false;
        for j in 0..cols {
            for k in j + 1..cols {
                let alpha = a.column(j).norm_squared();
                let beta = a.column(k).norm_squared();
                let gamma = a.column(j).dotc(&a.column(k));
                let g = gamma.norm();
                if g <= floor || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj().unscale(g);
                let phase = phase.unscale(phase.norm());
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut *a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, j)];
                        let y = mat[(r, k)] * phase;
                        mat[(r, j)] = x * cs - y * sn;
                        mat[(r, k)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

/// Closest unitary (or isometry, for tall input) in the polar sense.
pub fn polar_unitary(m: &CMat) -> CMat {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return zeros(rows, cols);
    }
    if rows < cols {
        return polar_unitary(&m.adjoint()).adjoint();
    }
    let svd = svd_full_right(m);
    let scale = svd.s[0].max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..cols).filter(|&i| svd.s[i] > 1e-13 * scale).collect();
    let mut u = select_columns(&svd.u, &keep);
    if keep.len() < cols {
        let extra = orthonormal_complement(&u, rows);
        let need = cols - keep.len();
        u = hstack(&[&u, &extra.columns(0, need).into_owned()], rows);
    }
    u * svd.v.adjoint()
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `cols` (assumed orthonormal) inside `C^dim`.
pub fn orthonormal_complement(cols: &CMat, dim: usize) -> CMat {
    if cols.ncols() == 0 {
        return identity(dim);
    }
    let proj = identity(dim) - cols * cols.adjoint();
    let (values, vectors) = hermitian_eigen(&proj);
    let keep: Vec<usize> = (0..dim).filter(|&i| values[i] > 0.5).collect();
    select_columns(&vectors, &keep)
}

/// Basis of the span of `b` (orthonormal columns) that depends only on the
/// subspace: Gram-Schmidt over the columns of the projector `B B*`, in order.
/// Coordinate subspaces come back as their standard axes, and every pivot
/// entry is real and positive.
pub fn canonical_basis(b: &CMat) -> CMat {
    let (n, d) = b.shape();
    if d == 0 {
        return zeros(n, 0);
    }
    let proj = b * b.adjoint();
    let mut out: Vec<CVec> = Vec::with_capacity(d);
    for j in 0..n {
        if out.len() == d {
            break;
        }
        let mut v: CVec = proj.column(j).into_owned();
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for u in &out {
                let coef = u.dotc(&v);
                v -= u * coef;
            }
        }
        let norm = v.norm();
        if norm > 1e-3 {
            out.push(v / c(norm));
        }
    }
    if out.len() < d {
        // Cannot happen for orthonormal input; fall back to the input basis.
        return b.clone();
    }
    CMat::from_fn(n, d, |r, k| out[k][r])
}

pub fn select_columns(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), idx.len(), |r, j| m[(r, idx[j])])
}

/// Concatenate column blocks with a shared row count.
pub fn hstack(blocks: &[&CMat], rows: usize) -> CMat {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Block-diagonal matrix.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(n, n);
    let mut at = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((at, at), (k, k)).copy_from(*b);
        at += k;
    }
    out
}

/// `U M U*`.
pub fn conjugate(u: &CMat, m: &CMat) -> CMat {
    u * m * u.adjoint()
}

/// Rotate the global phase of `u` so its largest-magnitude entry is real
/// and positive.
pub fn fix_global_phase(u: &CMat) -> CMat {
    let mut best = ZERO;
    for z in u.iter() {
        if z.norm() > best.norm() + 1e-12 {
            best = *z;
        }
    }
    if best.norm() == 0.0 {
        return u.clone();
    }
    let phase = best.conj() / best.norm();
    u * phase
}

//! Orthogonal projections and subspace bases.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::sampling;

/// Default tolerance for idempotency, self-adjointness and orthonormality.
pub const TOL_PROJ: f64 = 1e-10;

/// Maximum distance of the trace from an integer before the rank is
/// considered ambiguous.
pub const TOL_TRACE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn is_real(self) -> bool {
        self == ScalarField::Real
    }
}

impl std::fmt::Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Real => write!(f, "real"),
            ScalarField::Complex => write!(f, "complex"),
        }
    }
}

impl std::str::FromStr for ScalarField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(ScalarField::Real),
            "complex" => Ok(ScalarField::Complex),
            other => Err(Error::Json(format!("unknown field {other:?}"))),
        }
    }
}

/// A Hermitian idempotent matrix with its rank.
///
/// The complement of a projection remembers the matrix it came from, so
/// `p.complement().complement()` returns the original entries bit for bit.
#[derive(Debug, Clone)]
pub struct Projection {
    matrix: Arc<CMat>,
    rank: usize,
    field: ScalarField,
    complement: Option<Arc<CMat>>,
}

impl PartialEq for Projection {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rank == other.rank && self.matrix == other.matrix
    }
}

impl Projection {
    /// Validate `m` as a projection at tolerance `tol`.
    pub fn validate(m: CMat, field: ScalarField, tol: f64) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if field.is_real() && linalg::max_imag(&m) > 0.0 {
            return Err(Error::FieldMismatch(
                "real projection has nonzero imaginary parts".into(),
            ));
        }
        let herm = linalg::hermitian_residual(&m);
        if herm > tol {
            return Err(Error::NotHermitian { residual: herm });
        }
        let idem = linalg::op_norm(&(&m * &m - &m));
        if idem > tol {
            return Err(Error::NotIdempotent { residual: idem });
        }
        let rank = rank_from_trace(&m)?;
        Ok(Self::from_parts(m, rank, field))
    }

    /// Trusted constructor for matrices built as projections by construction.
    pub(crate) fn from_parts(m: CMat, rank: usize, field: ScalarField) -> Self {
        Projection {
            matrix: Arc::new(m),
            rank,
            field,
            complement: None,
        }
    }

    /// `B B*` for an orthonormal basis `B`.
    pub fn from_basis(basis: &SubspaceBasis) -> Self {
        let b = basis.columns();
        let m = b * b.adjoint();
        Self::from_parts(m, basis.dim(), basis.field())
    }

    /// Haar-distributed projection of rank `rank`, deterministic in `seed`.
    pub fn random(dim: usize, rank: usize, seed: u64, field: ScalarField) -> Result<Self> {
        let mut rng = sampling::rng(seed);
        sampling::random_projection(&mut rng, dim, rank, field)
    }

    pub fn zero(dim: usize, field: ScalarField) -> Self {
        Self::from_parts(linalg::zeros(dim, dim), 0, field)
    }

    pub fn identity(dim: usize, field: ScalarField) -> Self {
        Self::from_parts(linalg::identity(dim), dim, field)
    }

    /// Coordinate projection onto the listed standard basis vectors.
    pub fn coordinate(dim: usize, axes: &[usize], field: ScalarField) -> Self {
        let mut m = linalg::zeros(dim, dim);
        for &i in axes {
            m[(i, i)] = linalg::ONE;
        }
        let rank = (0..dim).filter(|&i| m[(i, i)] == linalg::ONE).count();
        Self::from_parts(m, rank, field)
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        let m = match &self.complement {
            Some(m) => Arc::clone(m),
            None => Arc::new(linalg::identity(n) - self.matrix.as_ref()),
        };
        Projection {
            matrix: m,
            rank: n - self.rank,
            field: self.field,
            complement: Some(Arc::clone(&self.matrix)),
        }
    }

    /// `U P U*` for a unitary `U`.
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        Self::from_parts(linalg::conjugate(u, &self.matrix), self.rank, self.field)
    }

    /// Entrywise complex conjugate (a no-op over the reals).
    pub fn entrywise_conj(&self) -> Self {
        if self.field.is_real() {
            return self.clone();
        }
        Self::from_parts(linalg::conj(&self.matrix), self.rank, self.field)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn corank(&self) -> usize {
        self.dim() - self.rank
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn idempotency_residual(&self) -> f64 {
        linalg::op_norm(&(self.matrix.as_ref() * self.matrix.as_ref() - self.matrix.as_ref()))
    }

    pub fn hermitian_residual(&self) -> f64 {
        linalg::hermitian_residual(&self.matrix)
    }

    /// Orthonormal basis of the image.
    pub fn image(&self) -> SubspaceBasis {
        self.spectral_basis(true)
    }

    /// Orthonormal basis of the kernel.
    pub fn kernel(&self) -> SubspaceBasis {
        self.spectral_basis(false)
    }

    fn spectral_basis(&self, image: bool) -> SubspaceBasis {
        let n = self.dim();
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        // Eigenvalues ascend, so the kernel is the first N - r columns.
        let idx: Vec<usize> = if image {
            (n - self.rank..n).collect()
        } else {
            (0..n - self.rank).collect()
        };
        debug_assert!(idx.iter().all(|&i| (values[i] > 0.5) == image));
        SubspaceBasis {
            columns: linalg::select_columns(&vectors, &idx),
            field: self.field,
        }
    }

    pub(crate) fn check_compatible(&self, other: &Projection) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Field of a binary operation; complex wins.
    pub(crate) fn joint_field(&self, other: &Projection) -> ScalarField {
        if self.field.is_real() && other.field.is_real() {
            ScalarField::Real
        } else {
            ScalarField::Complex
        }
    }
}

fn rank_from_trace(m: &CMat) -> Result<usize> {
    let trace = m.trace().re;
    let rounded = trace.round();
    if (trace - rounded).abs() > TOL_TRACE || rounded < 0.0 {
        return Err(Error::RankAmbiguous { trace });
    }
    Ok(rounded as usize)
}

/// `N x k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    columns: CMat,
    field: ScalarField,
}

impl SubspaceBasis {
    pub fn new(columns: CMat, field: ScalarField, tol: f64) -> Result<Self> {
        let residual = linalg::orthonormality_residual(&columns);
        if residual > tol {
            return Err(Error::NonOrthonormalBasis { residual });
        }
        Ok(SubspaceBasis { columns, field })
    }

    pub(crate) fn from_columns(columns: CMat, field: ScalarField) -> Self {
        SubspaceBasis { columns, field }
    }

    pub fn empty(parent_dim: usize, field: ScalarField) -> Self {
        SubspaceBasis {
            columns: linalg::zeros(parent_dim, 0),
            field,
        }
    }

    pub fn columns(&self) -> &CMat {
        &self.columns
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn parent_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }
}

/// Projection onto the span of an orthonormal basis.
pub fn projection_from_basis(basis: &SubspaceBasis) -> Result<Projection> {
    let residual = linalg::orthonormality_residual(basis.columns());
    if residual > TOL_PROJ {
        return Err(Error::NonOrthonormalBasis { residual });
    }
    Ok(Projection::from_basis(basis))
}

/// Numerical intersection of two subspaces: the principal vectors whose
/// cosine is at least `1 - tol`.
pub fn subspace_intersect(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<SubspaceBasis> {
    if a.parent_dim() != b.parent_dim() {
        return Err(Error::DimensionMismatch(format!(
            "parent dimensions {} vs {}",
            a.parent_dim(),
            b.parent_dim()
        )));
    }
    let field = if a.field.is_real() && b.field.is_real() {
        ScalarField::Real
    } else {
        ScalarField::Complex
    };
    let n = a.parent_dim();
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(SubspaceBasis::empty(n, field));
    }
    // Cosines are the singular values of A*B; work from the smaller side so
    // the left singular vectors are all genuine.
    let cross = b.columns.adjoint() * &a.columns;
    let svd = linalg::svd_full_right(&cross);
    let keep: Vec<usize> = (0..svd.s.len()).filter(|&i| svd.s[i] >= 1.0 - tol).collect();
    let coords = linalg::select_columns(&svd.v, &keep);
    Ok(SubspaceBasis::from_columns(&a.columns * coords, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;

    fn axes(n: usize, idx: &[usize]) -> SubspaceBasis {
        let mut m = linalg::zeros(n, idx.len());
        for (j, &i) in idx.iter().enumerate() {
            m[(i, j)] = linalg::ONE;
        }
        SubspaceBasis::new(m, ScalarField::Real, TOL_PROJ).unwrap()
    }

    #[test]
    fn basis_e1_gives_diag_one_zero() {
        let p = projection_from_basis(&axes(2, &[0])).unwrap();
        assert_eq!(p.matrix(), &linalg::diag(&[1.0, 0.0]));
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn empty_basis_gives_zero_projection() {
        let p = projection_from_basis(&SubspaceBasis::empty(3, ScalarField::Real)).unwrap();
        assert_eq!(p.rank(), 0);
        assert_eq!(p.matrix(), &linalg::zeros(3, 3));
    }

    #[test]
    fn complex_random_basis_gives_projection() {
        let mut rng = sampling::rng(11);
        let b = sampling::random_isometry(&mut rng, 6, 2, ScalarField::Complex);
        let basis = SubspaceBasis::new(b, ScalarField::Complex, TOL_PROJ).unwrap();
        let p = projection_from_basis(&basis).unwrap();
        assert!(p.idempotency_residual() <= 1e-12);
        assert_eq!(p.rank(), 2);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let b = from_real_rows(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            SubspaceBasis::new(b, ScalarField::Real, TOL_PROJ),
            Err(Error::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn random_projection_extreme_ranks() {
        for seed in [0, 5, 99] {
            let z = Projection::random(4, 0, seed, ScalarField::Complex).unwrap();
            assert_eq!(z.matrix(), &linalg::zeros(4, 4));
            let i = Projection::random(4, 4, seed, ScalarField::Real).unwrap();
            assert!(linalg::op_norm(&(i.matrix() - linalg::identity(4))) < 1e-14);
        }
        assert!(matches!(
            Projection::random(4, 5, 0, ScalarField::Real),
            Err(Error::BadRank { .. })
        ));
    }

    #[test]
    fn random_projection_invariants() {
        let p = Projection::random(8, 3, 1, ScalarField::Complex).unwrap();
        assert!((p.matrix().trace().re - 3.0).abs() <= 1e-12);
        assert!(p.hermitian_residual() <= 1e-12);
        assert!(p.idempotency_residual() <= 1e-12);
    }

    #[test]
    fn random_projection_is_deterministic() {
        let a = Projection::random(5, 2, 42, ScalarField::Complex).unwrap();
        let b = Projection::random(5, 2, 42, ScalarField::Complex).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complement_examples() {
        let p = Projection::coordinate(2, &[0], ScalarField::Real);
        assert_eq!(p.complement().matrix(), &linalg::diag(&[0.0, 1.0]));
        let z = Projection::zero(3, ScalarField::Real);
        assert_eq!(z.complement().matrix(), &linalg::identity(3));
        assert_eq!(z.complement().rank(), 3);
    }

    #[test]
    fn complement_is_an_exact_involution() {
        let p = Projection::random(7, 3, 9, ScalarField::Complex).unwrap();
        let back = p.complement().complement();
        assert_eq!(back.matrix(), p.matrix());
        assert_eq!(back.rank(), 3);
    }

    #[test]
    fn validate_examples() {
        let half = from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let p = Projection::validate(half, ScalarField::Real, TOL_PROJ).unwrap();
        assert_eq!(p.rank(), 1);

        let bad = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        assert!(matches!(
            Projection::validate(bad, ScalarField::Real, TOL_PROJ),
            Err(Error::NotIdempotent { .. })
        ));

        // M^2 - M has entries ~1e-4 here; the residual is measured directly.
        let near = from_real_rows(2, 2, &[0.5, 0.5001, 0.5001, 0.5]);
        let residual = linalg::op_norm(&(&near * &near - &near));
        assert!(residual > 1e-6 && residual < 1e-3);
        match Projection::validate(near, ScalarField::Real, 1e-6) {
            Err(Error::NotIdempotent { residual: r }) => assert!((r - residual).abs() < 1e-15),
            other => panic!("expected NotIdempotent, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_non_hermitian_and_non_square() {
        let m = from_real_rows(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            Projection::validate(m, ScalarField::Real, TOL_PROJ),
            Err(Error::NotHermitian { .. })
        ));
        let m = linalg::zeros(2, 3);
        assert!(matches!(
            Projection::validate(m, ScalarField::Real, TOL_PROJ),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn intersect_coordinate_planes() {
        let i = subspace_intersect(&axes(4, &[0, 1]), &axes(4, &[1, 2]), 1e-8).unwrap();
        assert_eq!(i.dim(), 1);
        assert!((i.columns()[(1, 0)].norm() - 1.0).abs() < 1e-14);

        let i = subspace_intersect(&axes(2, &[0]), &axes(2, &[1]), 1e-8).unwrap();
        assert_eq!(i.dim(), 0);

        assert!(matches!(
            subspace_intersect(&axes(2, &[0]), &axes(3, &[1]), 1e-8),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn intersect_recovers_planted_common_part() {
        let mut rng = sampling::rng(2024);
        // Common 2-dim part plus 3 independent directions on each side.
        let frame = sampling::haar_unitary(&mut rng, 8, ScalarField::Real);
        let common = frame.columns(0, 2).into_owned();
        let rest_a = frame.columns(2, 3).into_owned();
        let mixed = sampling::haar_unitary(&mut rng, 6, ScalarField::Real);
        let rest_b = frame.columns(2, 6) * mixed.columns(0, 3);
        let a = linalg::hstack(&[&common, &rest_a], 8);
        let b = linalg::hstack(&[&common, &rest_b], 8);
        let a = SubspaceBasis::new(a, ScalarField::Real, TOL_PROJ).unwrap();
        let b = SubspaceBasis::new(b, ScalarField::Real, 1e-9).unwrap();
        let i = subspace_intersect(&a, &b, 1e-8).unwrap();
        assert_eq!(i.dim(), 2);
        // Each recovered vector lies in the planted common part.
        let leak = &i.columns().clone() - &common * (common.adjoint() * i.columns());
        assert!(linalg::op_norm(&leak) < 1e-8);
    }

    #[test]
    fn self_intersection_spans_the_subspace() {
        let mut rng = sampling::rng(5);
        let a = sampling::random_isometry(&mut rng, 7, 3, ScalarField::Complex);
        let a = SubspaceBasis::new(a, ScalarField::Complex, TOL_PROJ).unwrap();
        let i = subspace_intersect(&a, &a, 1e-8).unwrap();
        assert_eq!(i.dim(), 3);
        // Sines of the principal angles between span(I) and span(A).
        let outside = i.columns() - a.columns() * (a.columns().adjoint() * i.columns());
        assert!(linalg::op_norm(&outside) <= 1e-8);
        let back = a.columns() - i.columns() * (i.columns().adjoint() * a.columns());
        assert!(linalg::op_norm(&back) <= 1e-8);
    }
}

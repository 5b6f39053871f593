//! Seeded random generation: Gaussian matrices, Haar unitaries, random
//! projections and projection pairs with prescribed canonical blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::halmos::{self, BlockDims};
use crate::linalg::{self, CMat, C64};
use crate::projection::{Projection, ScalarField};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, field: ScalarField) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = match field {
            ScalarField::Real => 0.0,
            ScalarField::Complex => rng.sample(StandardNormal),
        };
        C64::new(re, im)
    })
}

/// `rows x cols` matrix with Haar-distributed orthonormal columns.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, field: ScalarField) -> CMat {
    assert!(cols <= rows);
    if cols == 0 {
        return linalg::zeros(rows, 0);
    }
    let g = gaussian_matrix(rng, rows, cols, field);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix the phase ambiguity of QR so the distribution is exactly Haar.
    for j in 0..cols {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize, field: ScalarField) -> CMat {
    random_isometry(rng, n, n, field)
}

pub fn random_projection<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize, field: ScalarField) -> Result<Projection> {
    if rank > dim {
        return Err(Error::BadRank { rank, dim });
    }
    if rank == 0 {
        return Ok(Projection::zero(dim, field));
    }
    if rank == dim {
        return Ok(Projection::identity(dim, field));
    }
    let b = random_isometry(rng, dim, rank, field);
    Ok(Projection::from_parts(&b * b.adjoint(), rank, field))
}

/// Canonical model pair for the given block dimensions and generic sines,
/// in the block order `H1, H2, H3, H4, K, K`.
pub fn model_pair(dims: BlockDims, sines: &[f64]) -> (CMat, CMat) {
    assert_eq!(dims.k, sines.len());
    let cosines: Vec<f64> = sines.iter().map(|s| (1.0 - s * s).max(0.0).sqrt()).collect();
    halmos::model_pair(dims, sines, &cosines)
}

/// Random pair with the prescribed canonical blocks, hidden behind a Haar
/// change of basis. Returns `(P, Q, frame)`.
pub fn planted_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dims: BlockDims,
    sines: &[f64],
    field: ScalarField,
) -> (Projection, Projection, CMat) {
    let (p, q) = model_pair(dims, sines);
    let w = haar_unitary(rng, dims.total(), field);
    let rank_p = dims.d1 + dims.d3 + dims.k;
    let rank_q = dims.d2 + dims.d3 + dims.k;
    let p = Projection::from_parts(linalg::conjugate(&w, &p), rank_p, field);
    let q = Projection::from_parts(linalg::conjugate(&w, &q), rank_q, field);
    (p, q, w)
}

/// Sines drawn uniformly from `[lo, hi]`.
pub fn random_sines<R: Rng + ?Sized>(rng: &mut R, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(lo..=hi)).collect()
}

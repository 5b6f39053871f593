//! Canonical form of a pair of projections.
//!
//! Any pair `(P, Q)` is unitarily similar to a block pair over
//! `H1 ⊕ H2 ⊕ H3 ⊕ H4 ⊕ K ⊕ K` where
//!
//! ```text
//! H1 = Im P ∩ Ker Q     H2 = Ker P ∩ Im Q
//! H3 = Im P ∩ Im Q      H4 = Ker P ∩ Ker Q
//! ```
//!
//! and on `K ⊕ K` the pair reads `P = [[I, 0], [0, 0]]`,
//! `Q = [[C², SC], [SC, S²]]` with commuting `0 < S, C < 1`, `S² + C² = I`.
//! In finite dimension `S` and `C` are diagonal, so the generic part is a
//! list of 2x2 rotations described by one sine/cosine each.
//!
//! The decomposition works from a CS decomposition of `Im Q` against
//! `Im P ⊕ Ker P`. Small angles take their right singular vectors from the
//! sine block and large angles from the cosine block, which keeps both
//! tiny sines and tiny cosines accurate.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::MatrixJson;
use crate::linalg::{self, CMat, CVec};
use crate::projection::{Projection, ScalarField};

/// Generic-part guard: a principal pair whose sine or cosine is at most this
/// is folded into the fixed blocks.
pub const TOL_GEN: f64 = 1e-8;

/// Maximum reconstruction residual accepted from a decomposition.
pub const TOL_RECON: f64 = 1e-8;

/// Two sines closer than this are treated as a tie when ordering the frame.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BlockDims {
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
    pub d4: usize,
    pub k: usize,
}

impl BlockDims {
    pub fn new(d1: usize, d2: usize, d3: usize, d4: usize, k: usize) -> Self {
        BlockDims { d1, d2, d3, d4, k }
    }

    pub fn total(&self) -> usize {
        self.d1 + self.d2 + self.d3 + self.d4 + 2 * self.k
    }

    /// Column offsets of `H1, H2, H3, H4, K(e), K(f)` in the adapted frame.
    pub fn offsets(&self) -> [usize; 6] {
        let o2 = self.d1;
        let o3 = o2 + self.d2;
        let o4 = o3 + self.d3;
        let oe = o4 + self.d4;
        let of = oe + self.k;
        [0, o2, o3, o4, oe, of]
    }

    pub fn as_array(&self) -> [usize; 5] {
        [self.d1, self.d2, self.d3, self.d4, self.k]
    }

    pub fn rank_p(&self) -> usize {
        self.d1 + self.d3 + self.k
    }

    pub fn rank_q(&self) -> usize {
        self.d2 + self.d3 + self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalmosOptions {
    pub tol_gen: f64,
    pub tol_recon: f64,
}

impl Default for HalmosOptions {
    fn default() -> Self {
        HalmosOptions {
            tol_gen: TOL_GEN,
            tol_recon: TOL_RECON,
        }
    }
}

impl HalmosOptions {
    /// Options for a caller-chosen generic-part guard. Folding a pair whose
    /// sine is `t` into a fixed block moves the reconstruction by `t`, so the
    /// accepted residual scales with it.
    pub fn with_tol(tol_gen: f64) -> Self {
        HalmosOptions {
            tol_gen,
            tol_recon: TOL_RECON.max(2.0 * tol_gen),
        }
    }
}

/// Adapted frame, block dimensions, and generic sines of a projection pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HalmosForm {
    w: CMat,
    dims: BlockDims,
    sines: Vec<f64>,
    cosines: Vec<f64>,
    field: ScalarField,
}

impl HalmosForm {
    /// Assemble a form from its parts; cosines are derived from the sines.
    pub fn new(w: CMat, dims: BlockDims, sines: Vec<f64>, field: ScalarField) -> Result<Self> {
        let cosines = sines.iter().map(|s| (1.0 - s * s).max(0.0).sqrt()).collect();
        Self::with_cosines(w, dims, sines, cosines, field)
    }

    pub fn with_cosines(
        w: CMat,
        dims: BlockDims,
        sines: Vec<f64>,
        cosines: Vec<f64>,
        field: ScalarField,
    ) -> Result<Self> {
        let n = w.nrows();
        if w.ncols() != n || dims.total() != n {
            return Err(Error::DimensionMismatch(format!(
                "frame is {}x{} but block dimensions sum to {}",
                n,
                w.ncols(),
                dims.total()
            )));
        }
        if sines.len() != dims.k || cosines.len() != dims.k {
            return Err(Error::DimensionMismatch(format!(
                "{} sines / {} cosines for k = {}",
                sines.len(),
                cosines.len(),
                dims.k
            )));
        }
        if let Some(s) = sines.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return Err(Error::HypothesisViolated(format!(
                "generic sine {s} outside (0, 1)"
            )));
        }
        if sines.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::HypothesisViolated("sines not ascending".into()));
        }
        let residual = linalg::orthonormality_residual(&w);
        if residual > 1e-8 {
            return Err(Error::DecompositionFailed { residual });
        }
        Ok(HalmosForm {
            w,
            dims,
            sines,
            cosines,
            field,
        })
    }

    pub fn w(&self) -> &CMat {
        &self.w
    }

    pub fn dims(&self) -> BlockDims {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn sines(&self) -> &[f64] {
        &self.sines
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// Principal angles of the generic part, `atan2(s, c)`, ascending.
    pub fn generic_angles(&self) -> Vec<f64> {
        self.sines
            .iter()
            .zip(&self.cosines)
            .map(|(s, c)| s.atan2(*c))
            .collect()
    }

    /// Largest generic sine, zero when there is no generic part.
    pub fn max_sine(&self) -> f64 {
        self.sines.last().copied().unwrap_or(0.0)
    }

    fn block(&self, idx: usize) -> CMat {
        let offs = self.dims.offsets();
        let len = [
            self.dims.d1,
            self.dims.d2,
            self.dims.d3,
            self.dims.d4,
            self.dims.k,
            self.dims.k,
        ][idx];
        self.w.columns(offs[idx], len).into_owned()
    }

    /// Orthonormal basis of `Im P ∩ Ker Q`.
    pub fn h1(&self) -> CMat {
        self.block(0)
    }
    /// Orthonormal basis of `Ker P ∩ Im Q`.
    pub fn h2(&self) -> CMat {
        self.block(1)
    }
    /// Orthonormal basis of `Im P ∩ Im Q`.
    pub fn h3(&self) -> CMat {
        self.block(2)
    }
    /// Orthonormal basis of `Ker P ∩ Ker Q`.
    pub fn h4(&self) -> CMat {
        self.block(3)
    }
    /// First copy of `K` (inside `Im P`).
    pub fn k_first(&self) -> CMat {
        self.block(4)
    }
    /// Second copy of `K` (inside `Ker P`).
    pub fn k_second(&self) -> CMat {
        self.block(5)
    }

    /// Model pair in the adapted basis.
    pub fn model(&self) -> (CMat, CMat) {
        model_pair(self.dims, &self.sines, &self.cosines)
    }

    /// `(W M_P W*, W M_Q W*)`.
    pub fn reconstruct(&self) -> (Projection, Projection) {
        let (mp, mq) = self.model();
        let p = Projection::from_parts(
            linalg::conjugate(&self.w, &mp),
            self.dims.rank_p(),
            self.field,
        );
        let q = Projection::from_parts(
            linalg::conjugate(&self.w, &mq),
            self.dims.rank_q(),
            self.field,
        );
        (p, q)
    }

    pub fn reconstruction_residual(&self, p: &Projection, q: &Projection) -> f64 {
        let (ph, qh) = self.reconstruct();
        linalg::op_norm(&(p.matrix() - ph.matrix())).max(linalg::op_norm(&(q.matrix() - qh.matrix())))
    }

    pub fn to_json(&self) -> HalmosFormJson {
        HalmosFormJson {
            dims: self.dims.as_array(),
            sines: self.sines.clone(),
            cosines: Some(self.cosines.clone()),
            w: MatrixJson::from_matrix(&self.w, self.field),
        }
    }

    pub fn from_json(j: &HalmosFormJson) -> Result<Self> {
        let [d1, d2, d3, d4, k] = j.dims;
        let dims = BlockDims { d1, d2, d3, d4, k };
        let w = j.w.to_matrix()?;
        match &j.cosines {
            Some(c) => Self::with_cosines(w, dims, j.sines.clone(), c.clone(), j.w.field),
            None => Self::new(w, dims, j.sines.clone(), j.w.field),
        }
    }
}

/// Serialized form: `{"dims": [d1, d2, d3, d4, k], "sines": [...], "W": matrix}`.
/// `cosines` is written for precision and optional on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalmosFormJson {
    pub dims: [usize; 5],
    pub sines: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosines: Option<Vec<f64>>,
    #[serde(rename = "W")]
    pub w: MatrixJson,
}

/// Canonical block pair for the given dimensions and generic part.
pub fn model_pair(dims: BlockDims, sines: &[f64], cosines: &[f64]) -> (CMat, CMat) {
    let n = dims.total();
    let mut p = linalg::zeros(n, n);
    let mut q = linalg::zeros(n, n);
    let [o1, o2, o3, _, oe, of] = dims.offsets();
    for i in 0..dims.d1 {
        p[(o1 + i, o1 + i)] = linalg::ONE;
    }
    for i in 0..dims.d2 {
        q[(o2 + i, o2 + i)] = linalg::ONE;
    }
    for i in 0..dims.d3 {
        p[(o3 + i, o3 + i)] = linalg::ONE;
        q[(o3 + i, o3 + i)] = linalg::ONE;
    }
    for i in 0..dims.k {
        let (s, c) = (sines[i], cosines[i]);
        let (e, f) = (oe + i, of + i);
        p[(e, e)] = linalg::ONE;
        q[(e, e)] = linalg::c(c * c);
        q[(e, f)] = linalg::c(s * c);
        q[(f, e)] = linalg::c(s * c);
        q[(f, f)] = linalg::c(s * s);
    }
    (p, q)
}

struct GenericPair {
    sine: f64,
    cosine: f64,
    e: CVec,
    f: CVec,
}

pub fn halmos_decompose(p: &Projection, q: &Projection, tol: f64) -> Result<HalmosForm> {
    halmos_decompose_with(p, q, &HalmosOptions::with_tol(tol))
}

pub fn halmos_decompose_with(p: &Projection, q: &Projection, opts: &HalmosOptions) -> Result<HalmosForm> {
    p.check_compatible(q)?;
    let n = p.dim();
    let field = p.joint_field(q);
    let tol = opts.tol_gen;

    let a = p.image().columns().clone();
    let a_bar = p.kernel().columns().clone();
    let b = q.image().columns().clone();
    let (rp, kp) = (a.ncols(), a_bar.ncols());

    // Coordinates of Im Q against Im P (cosine block) and Ker P (sine block).
    let y = a.adjoint() * &b;
    let x = a_bar.adjoint() * &b;

    let xs = linalg::svd_full_right(&x);
    let (small, large): (Vec<usize>, Vec<usize>) =
        (0..xs.s.len()).partition(|&i| xs.s[i] * xs.s[i] < 0.5);
    let v_small = linalg::select_columns(&xs.v, &small);
    let v_large = {
        let v2 = linalg::select_columns(&xs.v, &large);
        let ys = linalg::svd_full_right(&(&y * &v2));
        v2 * ys.v
    };

    let mut h2: Vec<CVec> = Vec::new();
    let mut h3: Vec<CVec> = Vec::new();
    let mut generic: Vec<GenericPair> = Vec::new();
    // Unit coordinates (in Im P resp. Ker P) already claimed by a block.
    let mut claimed_p: Vec<CVec> = Vec::new();
    let mut claimed_k: Vec<CVec> = Vec::new();

    for v in v_small.column_iter().chain(v_large.column_iter()) {
        let yv = &y * v;
        let xv = &x * v;
        let cosine = yv.norm();
        let sine = xv.norm();
        if sine <= tol {
            let coord = yv / linalg::c(cosine);
            h3.push(&a * &coord);
            claimed_p.push(coord);
        } else if cosine <= tol {
            let coord = xv / linalg::c(sine);
            h2.push(&a_bar * &coord);
            claimed_k.push(coord);
        } else {
            let cp = yv / linalg::c(cosine);
            let ck = xv / linalg::c(sine);
            generic.push(GenericPair {
                sine,
                cosine,
                e: &a * &cp,
                f: &a_bar * &ck,
            });
            claimed_p.push(cp);
            claimed_k.push(ck);
        }
    }

    let h1 = linalg::canonical_basis(&(&a * linalg::orthonormal_complement(&stack(&claimed_p, rp), rp)));
    let h4 = linalg::canonical_basis(&(&a_bar * linalg::orthonormal_complement(&stack(&claimed_k, kp), kp)));
    let h2 = linalg::canonical_basis(&stack(&h2, n));
    let h3 = linalg::canonical_basis(&stack(&h3, n));

    for g in generic.iter_mut() {
        // The pair (e, f) carries one free phase; pin it on e.
        if let Some(z) = g.e.iter().find(|z| z.norm() > 1e-8).copied() {
            let phase = z.conj() / linalg::c(z.norm());
            g.e *= phase;
            g.f *= phase;
        }
    }
    sort_generic(&mut generic);

    let dims = BlockDims {
        d1: h1.ncols(),
        d2: h2.ncols(),
        d3: h3.ncols(),
        d4: h4.ncols(),
        k: generic.len(),
    };
    if dims.total() != n {
        return Err(Error::DecompositionFailed {
            residual: (dims.total() as f64 - n as f64).abs(),
        });
    }

    let e = stack(&generic.iter().map(|g| g.e.clone()).collect::<Vec<_>>(), n);
    let f = stack(&generic.iter().map(|g| g.f.clone()).collect::<Vec<_>>(), n);
    let mut w = linalg::hstack(&[&h1, &h2, &h3, &h4, &e, &f], n);
    if field.is_real() {
        w.iter_mut().for_each(|z| z.im = 0.0);
    }

    let unitarity = linalg::orthonormality_residual(&w);
    let form = HalmosForm {
        w,
        dims,
        sines: generic.iter().map(|g| g.sine).collect(),
        cosines: generic.iter().map(|g| g.cosine).collect(),
        field,
    };
    let residual = form.reconstruction_residual(p, q).max(unitarity);
    if residual > opts.tol_recon {
        return Err(Error::DecompositionFailed { residual });
    }
    Ok(form)
}

fn stack(cols: &[CVec], rows: usize) -> CMat {
    CMat::from_fn(rows, cols.len(), |r, j| cols[j][r])
}

/// Ascending sines; ties ordered by the first significant entry of the
/// `K`-frame column so the output does not depend on solver internals.
fn sort_generic(pairs: &mut [GenericPair]) {
    pairs.sort_by(|a, b| a.sine.total_cmp(&b.sine));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].sine - pairs[end - 1].sine <= TIE_TOL {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| column_key_cmp(&a.e, &b.e));
        }
        start = end;
    }
}

fn column_key_cmp(a: &CVec, b: &CVec) -> Ordering {
    let key = |v: &CVec| {
        let idx = v.iter().position(|z| z.norm() > 1e-8).unwrap_or(v.len());
        let z = v.get(idx).copied().unwrap_or(linalg::ZERO);
        (idx, z.re, z.im)
    };
    let (ia, ra, ma) = key(a);
    let (ib, rb, mb) = key(b);
    ia.cmp(&ib)
        .then_with(|| ra.total_cmp(&rb))
        .then_with(|| ma.total_cmp(&mb))
}

/// Principal angles between `Im P` and `Im Q`, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAngles {
    pub angles: Vec<f64>,
}

/// Principal angles read off the canonical form: `0` on `H3`, `atan2(s, c)`
/// on the generic part, `π/2` for the `min(d1, d2)` unmatched directions.
pub fn principal_angles(p: &Projection, q: &Projection) -> Result<PrincipalAngles> {
    let form = halmos_decompose(p, q, TOL_GEN)?;
    Ok(angles_of(&form))
}

pub fn angles_of(form: &HalmosForm) -> PrincipalAngles {
    let d = form.dims();
    let mut angles = vec![0.0; d.d3];
    angles.extend(form.generic_angles());
    angles.extend(std::iter::repeat_n(std::f64::consts::FRAC_PI_2, d.d1.min(d.d2)));
    PrincipalAngles { angles }
}

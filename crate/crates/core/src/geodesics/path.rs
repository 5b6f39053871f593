use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geodesics::reparam::ReparamFunction;
use crate::halmos::{halmos_decompose, HalmosForm, TOL_GEN};
use crate::linalg::{self, CMat};
use crate::metric::gap_direct;
use crate::projection::{Projection, ScalarField};

/// One group of frame columns and how the path acts on it.
#[derive(Debug, Clone, PartialEq)]
pub enum PathBlock {
    /// Columns `start..start + len` held at `1` (`on`) or `0`.
    Fixed { start: usize, len: usize, on: bool },
    /// Column pairs `(e + i, f + i)`; at time `θ` the pair carries the rank-one
    /// projection onto `cos φ e + sin φ f` with `φ = (2 f(θ)/π) angles[i]`.
    Rotation {
        e: usize,
        f: usize,
        angles: Vec<f64>,
        reparam: ReparamFunction,
    },
}

/// A curve `θ ↦ γ(θ)` on `[0, π/2]` of projections, stored as a frame plus
/// block rotations so evaluation is a cheap conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    frame: CMat,
    blocks: Vec<PathBlock>,
    psi: f64,
    complemented: bool,
    field: ScalarField,
    rank: usize,
}

impl GeodesicPath {
    pub(crate) fn new(frame: CMat, blocks: Vec<PathBlock>, psi: f64, field: ScalarField) -> Self {
        let rank = blocks
            .iter()
            .map(|b| match b {
                PathBlock::Fixed { len, on, .. } => if *on { *len } else { 0 },
                PathBlock::Rotation { angles, .. } => angles.len(),
            })
            .sum();
        GeodesicPath {
            frame,
            blocks,
            psi,
            complemented: false,
            field,
            rank,
        }
    }

    /// The path `θ ↦ I − γ(θ)`.
    pub(crate) fn complemented(mut self) -> Self {
        self.complemented = !self.complemented;
        self.rank = self.frame.nrows() - self.rank;
        self
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn blocks(&self) -> &[PathBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// Block matrix of `γ(θ)` in the frame (before any complement).
    fn model(&self, theta: f64) -> CMat {
        let n = self.dim();
        let mut m = linalg::zeros(n, n);
        for b in &self.blocks {
            match b {
                PathBlock::Fixed { start, len, on } => {
                    if *on {
                        for i in *start..start + len {
                            m[(i, i)] = linalg::ONE;
                        }
                    }
                }
                PathBlock::Rotation { e, f, angles, reparam } => {
                    let t = reparam.eval(theta) / FRAC_PI_2;
                    for (i, a) in angles.iter().enumerate() {
                        let (s, c) = (t * a).sin_cos();
                        let (ei, fi) = (e + i, f + i);
                        m[(ei, ei)] = linalg::c(c * c);
                        m[(ei, fi)] = linalg::c(c * s);
                        m[(fi, ei)] = linalg::c(c * s);
                        m[(fi, fi)] = linalg::c(s * s);
                    }
                }
            }
        }
        m
    }

    pub fn eval(&self, theta: f64) -> Result<Projection> {
        if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&theta) {
            return Err(Error::HypothesisViolated(format!(
                "θ = {theta} outside [0, π/2]"
            )));
        }
        let theta = theta.clamp(0.0, FRAC_PI_2);
        let mut m = linalg::conjugate(&self.frame, &self.model(theta));
        if self.complemented {
            m = linalg::identity(self.dim()) - m;
        }
        Ok(Projection::from_parts(m, self.rank, self.field))
    }

    /// Distance the path promises between two times: `sin(2|θ1 − θ2|ψ/π)`.
    pub fn law(&self, t1: f64, t2: f64) -> f64 {
        (2.0 * (t1 - t2).abs() * self.psi / std::f64::consts::PI).sin()
    }

    /// Largest deviation from the distance law over all pairs of grid times.
    pub fn law_residual(&self, grid: &[f64]) -> Result<f64> {
        let samples: Vec<Projection> = grid.iter().map(|&t| self.eval(t)).collect::<Result<_>>()?;
        let mut worst = 0.0_f64;
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let d = gap_direct(&samples[i], &samples[j])?;
                worst = worst.max((d - self.law(grid[i], grid[j])).abs());
            }
        }
        Ok(worst)
    }
}

/// Uniform grid of `n` points on `[0, π/2]`, endpoints included.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// The rotation geodesic from `P` to `Q`: identity on `Im P ∩ Im Q`, zero on
/// `Ker P ∩ Ker Q`, and on each generic pair a rotation by
/// `(2θ/π) arcsin s_i`.
pub fn geodesic(p: &Projection, q: &Projection) -> Result<GeodesicPath> {
    let form = halmos_decompose(p, q, TOL_GEN)?;
    geodesic_from_form(&form)
}

pub fn geodesic_from_form(form: &HalmosForm) -> Result<GeodesicPath> {
    let d = form.dims();
    if d.d1 > 0 || d.d2 > 0 {
        return Err(Error::GapOneObstruction { d1: d.d1, d2: d.d2 });
    }
    if d.k == 0 {
        return Err(Error::DegeneratePair);
    }
    let [_, _, o3, o4, oe, of] = d.offsets();
    let angles = form.generic_angles();
    let psi = angles.iter().copied().fold(0.0, f64::max);
    let blocks = vec![
        PathBlock::Fixed { start: o3, len: d.d3, on: true },
        PathBlock::Fixed { start: o4, len: d.d4, on: false },
        PathBlock::Rotation {
            e: oe,
            f: of,
            angles,
            reparam: ReparamFunction::Identity,
        },
    ];
    Ok(GeodesicPath::new(form.w().clone(), blocks, psi, form.field()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;
    use crate::sampling;
    use crate::halmos::BlockDims;
    use std::f64::consts::FRAC_PI_6;

    fn rotated(theta: f64) -> Projection {
        let (s, c) = theta.sin_cos();
        Projection::validate(from_real_rows(2, 2, &[c * c, s * c, s * c, s * s]), ScalarField::Real, 1e-12).unwrap()
    }

    #[test]
    fn endpoints_of_planar_geodesic() {
        let p = Projection::coordinate(2, &[0], ScalarField::Real);
        let q = rotated(FRAC_PI_6);
        let g = geodesic(&p, &q).unwrap();
        assert!(linalg::op_norm(&(g.eval(FRAC_PI_2).unwrap().matrix() - q.matrix())) < 1e-10);
        assert!(linalg::op_norm(&(g.eval(0.0).unwrap().matrix() - p.matrix())) < 1e-10);
        assert!((g.psi() - FRAC_PI_6).abs() < 1e-15);
    }

    #[test]
    fn obstructed_and_degenerate_pairs() {
        let p = Projection::coordinate(2, &[0], ScalarField::Real);
        let q = Projection::coordinate(2, &[1], ScalarField::Real);
        assert!(matches!(geodesic(&p, &q), Err(Error::GapOneObstruction { d1: 1, d2: 1 })));
        assert!(matches!(geodesic(&p, &p), Err(Error::DegeneratePair)));
    }

    #[test]
    fn distance_law_and_rank_on_planted_pair() {
        let mut rng = sampling::rng(21);
        let dims = BlockDims::new(0, 0, 2, 2, 4);
        let sines = sampling::random_sines(&mut rng, 4, 0.1, 0.95);
        let mut sorted = sines.clone();
        sorted.sort_by(f64::total_cmp);
        let (p, q, _) = sampling::planted_pair(&mut rng, dims, &sorted, ScalarField::Complex);
        let g = geodesic(&p, &q).unwrap();
        let grid = uniform_grid(9);
        assert!(g.law_residual(&grid).unwrap() < 1e-8);
        for &t in &grid {
            let r = g.eval(t).unwrap();
            let (vals, _) = linalg::hermitian_eigen(r.matrix());
            assert_eq!(vals.iter().filter(|v| **v > 0.5).count(), p.rank());
        }
    }

    #[test]
    fn eval_rejects_out_of_range_times() {
        let p = Projection::coordinate(2, &[0], ScalarField::Real);
        let g = geodesic(&p, &rotated(0.4)).unwrap();
        assert!(g.eval(2.0).is_err());
    }
}

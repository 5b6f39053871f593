//! The geodesic through `P`, a midpoint `R`, and `Q` when `P ⊥ Q` (or
//! `(I − P) ⊥ (I − Q)`).
//!
//! With `P ⊥ Q` and `‖R − P‖ = ‖R − Q‖ = 1/√2`, `R` has the form
//! `[[I/2, U*/2], [U/2, I/2]]` on `Im P ⊕ Im Q` and vanishes elsewhere.
//! Replacing the `Im Q` frame by its image under `U` turns `R` into the
//! standard midpoint, after which the curve is the plain rotation by `θ`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::geodesics::path::{GeodesicPath, PathBlock};
use crate::geodesics::reparam::ReparamFunction;
use crate::halmos::{halmos_decompose, TOL_GEN};
use crate::linalg::{self, CMat};
use crate::metric::gap_direct;
use crate::projection::{Projection, ScalarField};

/// `‖PQ‖` at or below this counts as orthogonal.
pub const TOL_PERP: f64 = 1e-8;
/// Allowed deviation of `‖R − P‖`, `‖R − Q‖` from `1/√2`.
pub const TOL_MID: f64 = 1e-8;
/// Allowed distance of `2 W_Q* R W_P` from its unitary polar factor.
pub const TOL_POLAR: f64 = 1e-8;

/// Frame in which `P`, `Q`, `R` are standard, for the orthogonal case.
struct Standard {
    frame: CMat,
    half: usize,
    complemented: bool,
}

fn standardize(p: &Projection, q: &Projection, r: &Projection) -> Result<Standard> {
    p.check_compatible(q)?;
    p.check_compatible(r)?;
    let perp = linalg::op_norm(&(p.matrix() * q.matrix()));
    let (pc, qc) = (p.complement(), q.complement());
    let coperp = linalg::op_norm(&(pc.matrix() * qc.matrix()));
    for (which, other) in [("P", p), ("Q", q)] {
        let distance = gap_direct(r, other)?;
        if (distance - FRAC_1_SQRT_2).abs() > TOL_MID {
            return Err(Error::NotMidpoint { which, distance });
        }
    }
    let (p, q, r, complemented) = if perp <= TOL_PERP {
        (p.clone(), q.clone(), r.clone(), false)
    } else if coperp <= TOL_PERP {
        (pc, qc, r.complement(), true)
    } else {
        return Err(Error::NotSimRelated { perp, coperp });
    };

    let form = halmos_decompose(&p, &q, TOL_GEN)?;
    let d = form.dims();
    if d.d1 != d.d2 || d.d3 != 0 || d.k != 0 {
        return Err(Error::DimensionMismatch(format!(
            "orthogonal pair has block dimensions {:?}",
            d.as_array()
        )));
    }
    let (h1, h2) = (form.h1(), form.h2());
    let twice = (h2.adjoint() * r.matrix() * &h1) * linalg::c(2.0);
    let u = linalg::polar_unitary(&twice);
    let off = linalg::op_norm(&(&twice - &u));
    if off > TOL_POLAR {
        return Err(Error::HypothesisViolated(format!(
            "off-diagonal block of R is {off:.3e} away from a unitary"
        )));
    }
    let frame = linalg::hstack(&[&h1, &(h2 * u), &form.h4()], p.dim());
    Ok(Standard {
        frame,
        half: d.d1,
        complemented,
    })
}

pub fn three_point_geodesic(p: &Projection, q: &Projection, r: &Projection) -> Result<GeodesicPath> {
    let st = standardize(p, q, r)?;
    let n = st.frame.nrows();
    let h = st.half;
    let blocks = vec![
        PathBlock::Rotation {
            e: 0,
            f: h,
            angles: vec![FRAC_PI_2; h],
            reparam: ReparamFunction::Identity,
        },
        PathBlock::Fixed {
            start: 2 * h,
            len: n - 2 * h,
            on: false,
        },
    ];
    let field = if p.joint_field(q).is_real() && r.field().is_real() {
        ScalarField::Real
    } else {
        ScalarField::Complex
    };
    let path = GeodesicPath::new(st.frame, blocks, FRAC_PI_2, field);
    Ok(if st.complemented { path.complemented() } else { path })
}

/// Measurements behind the uniqueness of the three-point geodesic: an
/// alternative element `S(V)` of `P^{≤ sin θ} ∩ Q^{≤ cos θ}` built with a
/// unitary `V` in place of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessProbe {
    pub theta: f64,
    /// `‖S(V) − R‖`.
    pub distance_to_midpoint: f64,
    /// `‖S(V) − γ(θ)‖`.
    pub distance_to_path: f64,
    /// `sin|π/4 − θ|`, the value a geodesic through `R` must attain.
    pub law: f64,
    /// `√‖I/2 − cos θ sin θ (V + V*)/2‖`, which bounds `‖S(V) − R‖` below.
    pub lower_bound: f64,
}

pub fn uniqueness_probe(p: &Projection, q: &Projection, r: &Projection, v: &CMat, theta: f64) -> Result<UniquenessProbe> {
    let st = standardize(p, q, r)?;
    let h = st.half;
    if v.shape() != (h, h) {
        return Err(Error::DimensionMismatch(format!(
            "V is {}x{}, expected {h}x{h}",
            v.nrows(),
            v.ncols()
        )));
    }
    let n = st.frame.nrows();
    let (s, c) = theta.sin_cos();
    let mut m = linalg::zeros(n, n);
    for i in 0..h {
        m[(i, i)] = linalg::c(c * c);
        m[(h + i, h + i)] = linalg::c(s * s);
    }
    m.view_mut((h, 0), (h, h)).copy_from(&(v * linalg::c(c * s)));
    m.view_mut((0, h), (h, h)).copy_from(&(v.adjoint() * linalg::c(c * s)));
    let mut sv = linalg::conjugate(&st.frame, &m);
    if st.complemented {
        sv = linalg::identity(n) - sv;
    }
    let path = three_point_geodesic(p, q, r)?;
    let at = path.eval(theta)?;
    let half = (linalg::identity(h) - (v + v.adjoint()) * linalg::c(c * s)) * linalg::c(0.5);
    Ok(UniquenessProbe {
        theta,
        distance_to_midpoint: linalg::op_norm(&(&sv - r.matrix())),
        distance_to_path: linalg::op_norm(&(&sv - at.matrix())),
        law: (FRAC_PI_4 - theta).abs().sin(),
        lower_bound: linalg::op_norm(&half).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::midpoint::midpoint_element;
    use crate::geodesics::path::uniform_grid;
    use crate::linalg::from_real_rows;
    use num_complex::Complex;
    use std::f64::consts::FRAC_PI_3;

    fn canonical() -> (Projection, Projection, Projection) {
        let p = Projection::coordinate(2, &[0], ScalarField::Real);
        let q = Projection::coordinate(2, &[1], ScalarField::Real);
        let r = Projection::validate(from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5]), ScalarField::Real, 1e-12).unwrap();
        (p, q, r)
    }

    #[test]
    fn passes_through_all_three_points() {
        let (p, q, r) = canonical();
        let g = three_point_geodesic(&p, &q, &r).unwrap();
        for (t, want) in [(0.0, &p), (FRAC_PI_4, &r), (FRAC_PI_2, &q)] {
            assert!(linalg::op_norm(&(g.eval(t).unwrap().matrix() - want.matrix())) < 1e-10);
        }
        assert!(g.law_residual(&uniform_grid(9)).unwrap() < 1e-8);
    }

    #[test]
    fn complement_case_goes_through_complements() {
        let (p, q, r) = canonical();
        let (pc, qc, rc) = (p.complement(), q.complement(), r.complement());
        // Pad with a shared axis so (I − P) ⊥ (I − Q) but P is not ⊥ Q.
        let pad = |x: &Projection| {
            let m = linalg::block_diag(&[x.matrix(), &linalg::identity(1)]);
            Projection::validate(m, ScalarField::Real, 1e-12).unwrap()
        };
        let (p3, q3, r3) = (pad(&pc), pad(&qc), pad(&rc));
        let g = three_point_geodesic(&p3, &q3, &r3).unwrap();
        for (t, want) in [(0.0, &p3), (FRAC_PI_4, &r3), (FRAC_PI_2, &q3)] {
            assert!(linalg::op_norm(&(g.eval(t).unwrap().matrix() - want.matrix())) < 1e-10);
        }
        assert!(g.law_residual(&uniform_grid(7)).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_non_midpoints_and_unrelated_pairs() {
        let (p, q, _) = canonical();
        let far = Projection::coordinate(2, &[0], ScalarField::Real);
        assert!(matches!(
            three_point_geodesic(&p, &q, &far),
            Err(Error::NotMidpoint { which: "P", .. })
        ));
        let a = Projection::coordinate(3, &[0, 1], ScalarField::Real);
        let b = Projection::coordinate(3, &[1], ScalarField::Real);
        let m = Projection::validate(
            from_real_rows(3, 3, &[0.5, 0.0, 0.5, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5]),
            ScalarField::Real,
            1e-12,
        )
        .unwrap();
        assert!(matches!(three_point_geodesic(&a, &b, &m), Err(Error::NotMidpoint { .. }) | Err(Error::NotSimRelated { .. })));
    }

    #[test]
    fn twisted_alternative_is_farther_than_the_law_allows() {
        let p = Projection::coordinate(4, &[0, 1], ScalarField::Complex);
        let q = Projection::coordinate(4, &[2, 3], ScalarField::Complex);
        let r = midpoint_element(&p, &q, FRAC_PI_4, &linalg::identity(2), None).unwrap();
        let mut v = linalg::identity(2);
        v[(1, 1)] = Complex::from_polar(1.0, FRAC_PI_3);
        let probe = uniqueness_probe(&p, &q, &r, &v, FRAC_PI_3).unwrap();
        assert!(probe.distance_to_path > probe.law + 1e-3);
        assert!(probe.distance_to_midpoint >= probe.lower_bound - 1e-12);
        assert!(probe.lower_bound > probe.law + 1e-3);
        // With V = I the alternative is the path itself.
        let probe = uniqueness_probe(&p, &q, &r, &linalg::identity(2), FRAC_PI_3).unwrap();
        assert!(probe.distance_to_path < 1e-12);
        assert!((probe.distance_to_midpoint - probe.law).abs() < 1e-12);
    }
}

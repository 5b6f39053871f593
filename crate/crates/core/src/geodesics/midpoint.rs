//! Elements of `P^{≤ sin θ} ∩ Q^{≤ cos θ}`.
//!
//! In the adapted frame of `(P, Q)` every such element is
//!
//! ```text
//! [ cos²θ I        sinθ cosθ U* ]
//! [ sinθ cosθ U    sin²θ I      ]  ⊕  tail
//! ```
//!
//! on `H1 ⊕ H2`, with `U: H1 → H2` unitary, so the set is empty unless
//! `dim H1 = dim H2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::halmos::{halmos_decompose, HalmosForm, TOL_GEN};
use crate::linalg::{self, CMat};
use crate::projection::Projection;

/// Everything needed to assemble one midpoint element.
#[derive(Debug, Clone)]
pub struct MidpointSpec {
    pub theta: f64,
    /// `d1 x d1` unitary, read as a map from the `H1` frame to the `H2` frame.
    pub u: CMat,
    /// Projection on the remaining frame columns (`H3, H4, K, K`), in frame
    /// coordinates. `None` uses the rotation geodesic of the remaining pair
    /// evaluated at `θ`.
    pub tail: Option<Projection>,
}

impl MidpointSpec {
    pub fn assemble(&self, p: &Projection, q: &Projection) -> Result<Projection> {
        midpoint_element(p, q, self.theta, &self.u, self.tail.as_ref())
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(format!("θ = {theta} outside (0, π/2)")))
    }
}

pub fn midpoint_feasible(p: &Projection, q: &Projection, theta: f64) -> Result<bool> {
    check_theta(theta)?;
    let d = halmos_decompose(p, q, TOL_GEN)?.dims();
    Ok(d.d1 == d.d2)
}

pub fn midpoint_element(
    p: &Projection,
    q: &Projection,
    theta: f64,
    u: &CMat,
    tail: Option<&Projection>,
) -> Result<Projection> {
    check_theta(theta)?;
    let form = halmos_decompose(p, q, TOL_GEN)?;
    midpoint_from_form(&form, theta, u, tail)
}

pub fn midpoint_from_form(form: &HalmosForm, theta: f64, u: &CMat, tail: Option<&Projection>) -> Result<Projection> {
    let d = form.dims();
    if d.d1 != d.d2 {
        return Err(Error::DimensionMismatch(format!(
            "dim H1 = {} differs from dim H2 = {}",
            d.d1, d.d2
        )));
    }
    if u.shape() != (d.d1, d.d1) {
        return Err(Error::DimensionMismatch(format!(
            "U is {}x{}, expected {}x{}",
            u.nrows(),
            u.ncols(),
            d.d1,
            d.d1
        )));
    }
    let residual = linalg::orthonormality_residual(u);
    if residual > 1e-8 {
        return Err(Error::HypothesisViolated(format!(
            "U is not unitary (residual {residual:.3e})"
        )));
    }
    let field = form.field();
    if field.is_real() && linalg::max_imag(u) > 0.0 {
        return Err(Error::FieldMismatch("complex U for a real pair".into()));
    }

    let n = form.dim();
    let h = d.d1;
    let rest = n - 2 * h;
    let (s, c) = theta.sin_cos();
    let mut m = linalg::zeros(n, n);
    for i in 0..h {
        m[(i, i)] = linalg::c(c * c);
        m[(h + i, h + i)] = linalg::c(s * s);
    }
    m.view_mut((h, 0), (h, h)).copy_from(&(u * linalg::c(s * c)));
    m.view_mut((0, h), (h, h)).copy_from(&(u.adjoint() * linalg::c(s * c)));

    let tail_rank = match tail {
        Some(t) => {
            if t.dim() != rest {
                return Err(Error::DimensionMismatch(format!(
                    "tail has dimension {}, the remaining blocks have {}",
                    t.dim(),
                    rest
                )));
            }
            if field.is_real() && !t.field().is_real() {
                return Err(Error::FieldMismatch("complex tail for a real pair".into()));
            }
            m.view_mut((2 * h, 2 * h), (rest, rest)).copy_from(t.matrix());
            t.rank()
        }
        None => {
            let [_, _, o3, _, oe, of] = d.offsets();
            for i in o3..o3 + d.d3 {
                m[(i, i)] = linalg::ONE;
            }
            for (i, a) in form.generic_angles().iter().enumerate() {
                let (sa, ca) = (2.0 * theta / std::f64::consts::PI * a).sin_cos();
                let (e, f) = (oe + i, of + i);
                m[(e, e)] = linalg::c(ca * ca);
                m[(e, f)] = linalg::c(ca * sa);
                m[(f, e)] = linalg::c(ca * sa);
                m[(f, f)] = linalg::c(sa * sa);
            }
            d.d3 + d.k
        }
    };
    let r = linalg::conjugate(form.w(), &m);
    Ok(Projection::from_parts(r, h + tail_rank, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;
    use crate::metric::gap_direct;
    use crate::projection::ScalarField;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn axes() -> (Projection, Projection) {
        (
            Projection::coordinate(2, &[0], ScalarField::Real),
            Projection::coordinate(2, &[1], ScalarField::Real),
        )
    }

    #[test]
    fn standard_midpoint_of_orthogonal_axes() {
        let (p, q) = axes();
        let r = midpoint_element(&p, &q, FRAC_PI_4, &linalg::identity(1), None).unwrap();
        let want = from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(linalg::op_norm(&(r.matrix() - want)) < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((gap_direct(&r, &p).unwrap() - h).abs() < 1e-15);
        assert!((gap_direct(&r, &q).unwrap() - h).abs() < 1e-15);
    }

    #[test]
    fn flipped_unitary_gives_other_diagonal() {
        let (p, q) = axes();
        let r = midpoint_element(&p, &q, FRAC_PI_4, &linalg::diag(&[-1.0]), None).unwrap();
        let want = from_real_rows(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!(linalg::op_norm(&(r.matrix() - want)) < 1e-15);
    }

    #[test]
    fn off_center_midpoint_distances() {
        let (p, q) = axes();
        let r = midpoint_element(&p, &q, FRAC_PI_3, &linalg::identity(1), None).unwrap();
        assert!((gap_direct(&r, &p).unwrap() - FRAC_PI_3.sin()).abs() < 1e-12);
        assert!((gap_direct(&r, &q).unwrap() - FRAC_PI_3.cos()).abs() < 1e-12);
    }

    #[test]
    fn unequal_blocks_are_infeasible() {
        // d1 = 1, d2 = 2, plus a fixed H3 and H4 axis each and one generic pair.
        let p = Projection::coordinate(7, &[0, 3, 5], ScalarField::Real);
        let mut qm = Projection::coordinate(7, &[1, 2, 3], ScalarField::Real).matrix().clone();
        let (s, c) = 0.3f64.sin_cos();
        qm[(5, 5)] = linalg::c(c * c);
        qm[(5, 6)] = linalg::c(s * c);
        qm[(6, 5)] = linalg::c(s * c);
        qm[(6, 6)] = linalg::c(s * s);
        let q = Projection::validate(qm, ScalarField::Real, 1e-12).unwrap();
        assert!(!midpoint_feasible(&p, &q, FRAC_PI_4).unwrap());
        assert!(matches!(
            midpoint_element(&p, &q, FRAC_PI_4, &linalg::identity(1), None),
            Err(Error::DimensionMismatch(_))
        ));
        let (p, q) = axes();
        assert!(midpoint_feasible(&p, &q, FRAC_PI_4).unwrap());
    }

    #[test]
    fn wrong_size_unitary_is_rejected() {
        let (p, q) = axes();
        assert!(matches!(
            midpoint_element(&p, &q, FRAC_PI_4, &linalg::identity(2), None),
            Err(Error::DimensionMismatch(_))
        ));
    }
}

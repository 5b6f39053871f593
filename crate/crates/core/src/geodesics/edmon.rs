//! Given `Px = x`, `Qx = 0` and `R` within `sin θ` of `P` and `cos θ` of `Q`,
//! `R` must rotate `x` by exactly `θ` towards a unit vector `y ⊥ x` that `Q`
//! fixes and `P` kills. This module extracts `y` and measures how closely
//! every entry of the resulting 3x3 block form holds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesics::midpoint::check_theta;
use crate::linalg::{self, CMat, CVec};
use crate::metric::gap_direct;
use crate::projection::Projection;

/// Slack on the hypotheses `Px = x`, `Qx = 0`, and the two distance bounds.
pub const TOL_HYP: f64 = 1e-9;

/// Deviations from the block form in the frame `span{x} ⊕ span{y} ⊕ {x, y}⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdmonResiduals {
    /// `⟨x, Rx⟩ − cos²θ`.
    pub r1: f64,
    /// `‖y‖ − 1`.
    pub y_norm: f64,
    /// `|⟨x, y⟩|`.
    pub xy: f64,
    /// `⟨y, Ry⟩ − sin²θ`.
    pub r2: f64,
    /// Norm of the part of `Ry` outside `span{x, y}`.
    pub z: f64,
    /// `⟨y, Py⟩`.
    pub p2: f64,
    /// Norm of the part of `Py` outside `span{x, y}`.
    pub v: f64,
    /// `⟨y, Qy⟩ − 1`.
    pub q2: f64,
    /// Norm of the part of `Qy` outside `span{x, y}`.
    pub w: f64,
    /// `‖R − P‖ − sin θ`.
    pub dist_p: f64,
    /// `‖R − Q‖ − cos θ`.
    pub dist_q: f64,
}

impl EdmonResiduals {
    pub fn max_abs(&self) -> f64 {
        [
            self.r1, self.y_norm, self.xy, self.r2, self.z, self.p2, self.v, self.q2, self.w, self.dist_p,
            self.dist_q,
        ]
        .iter()
        .fold(0.0_f64, |acc, r| acc.max(r.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdmonCertificate {
    pub y: CVec,
    /// `⟨x, Rx⟩`.
    pub r1: f64,
    pub residuals: EdmonResiduals,
}

fn violated(msg: String) -> Error {
    Error::HypothesisViolated(msg)
}

pub fn edmon_extract(p: &Projection, q: &Projection, r: &Projection, x: &CVec, theta: f64) -> Result<EdmonCertificate> {
    p.check_compatible(q)?;
    p.check_compatible(r)?;
    check_theta(theta)?;
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, projections act on dimension {}",
            x.len(),
            p.dim()
        )));
    }
    let x_norm = x.norm();
    if (x_norm - 1.0).abs() > 1e-10 {
        return Err(violated(format!("‖x‖ = {x_norm}, expected 1")));
    }
    let px = (p.matrix() * x - x).norm();
    if px > TOL_HYP {
        return Err(violated(format!("‖Px − x‖ = {px:.3e}")));
    }
    let qx = (q.matrix() * x).norm();
    if qx > TOL_HYP {
        return Err(violated(format!("‖Qx‖ = {qx:.3e}")));
    }
    let (s, c) = theta.sin_cos();
    let dp = gap_direct(r, p)?;
    if dp > s + TOL_HYP {
        return Err(violated(format!("‖R − P‖ = {dp:.12} exceeds sin θ = {s:.12} by {:.3e}", dp - s)));
    }
    let dq = gap_direct(r, q)?;
    if dq > c + TOL_HYP {
        return Err(violated(format!("‖R − Q‖ = {dq:.12} exceeds cos θ = {c:.12} by {:.3e}", dq - c)));
    }

    let rx = r.matrix() * x;
    let r1 = x.dotc(&rx);
    let u = &rx - x * r1;
    let y = &u / linalg::c(c * s);

    let yn = &y / linalg::c(y.norm().max(f64::MIN_POSITIVE));
    let n = p.dim();
    let span = linalg::hstack(&[&CMat::from_column_slice(n, 1, x.as_slice()), &CMat::from_column_slice(n, 1, yn.as_slice())], n);
    let outside = linalg::identity(n) - &span * span.adjoint();
    let quad = |m: &CMat| yn.dotc(&(m * &yn)).re;
    let leak = |m: &CMat| (&outside * (m * &yn)).norm();

    let residuals = EdmonResiduals {
        r1: r1.re - c * c,
        y_norm: y.norm() - 1.0,
        xy: x.dotc(&y).norm(),
        r2: quad(r.matrix()) - s * s,
        z: leak(r.matrix()),
        p2: quad(p.matrix()),
        v: leak(p.matrix()),
        q2: quad(q.matrix()) - 1.0,
        w: leak(q.matrix()),
        dist_p: dp - s,
        dist_q: dq - c,
    };
    Ok(EdmonCertificate { y, r1: r1.re, residuals })
}

//! The gap metric `‖P − Q‖` and its closed forms.

use crate::error::{Error, Result};
use crate::halmos::{halmos_decompose, HalmosForm, TOL_GEN};
use crate::linalg;
use crate::projection::Projection;

/// Slack allowed outside `[0, 1]` before a value counts as unstable.
pub const CLAMP_SLACK: f64 = 1e-12;

/// Snap roundoff just outside `[0, 1]` back into range.
pub fn clamp_unit(value: f64, context: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if value > 1.0 && value <= 1.0 + CLAMP_SLACK {
        Ok(1.0)
    } else if (-CLAMP_SLACK..0.0).contains(&value) {
        Ok(0.0)
    } else {
        Err(Error::NumericalInstability {
            context: context.to_string(),
            value,
        })
    }
}

/// Largest singular value of `P − Q`.
pub fn gap_direct(p: &Projection, q: &Projection) -> Result<f64> {
    p.check_compatible(q)?;
    clamp_unit(linalg::op_norm(&(p.matrix() - q.matrix())), "gap")
}

/// Gap read from the canonical form: `1` when `H1` or `H2` is nonzero,
/// otherwise the largest generic sine.
pub fn gap_formula(p: &Projection, q: &Projection) -> Result<f64> {
    Ok(gap_from_form(&halmos_decompose(p, q, TOL_GEN)?))
}

pub fn gap_from_form(form: &HalmosForm) -> f64 {
    let d = form.dims();
    if d.d1 > 0 || d.d2 > 0 {
        1.0
    } else {
        form.max_sine()
    }
}

/// `√‖(I − P) Q (I − P)‖`, a lower bound for the gap.
///
/// Evaluated as `‖Q (I − P)‖`, the same number: the square root of the
/// compressed operator would inflate roundoff of order `ε` to `√ε` when `Q`
/// is close to `P`.
pub fn gap_lower_bound(p: &Projection, q: &Projection) -> Result<f64> {
    p.check_compatible(q)?;
    let m = q.matrix() * p.complement().matrix();
    clamp_unit(linalg::op_norm(&m), "lower bound")
}

/// `√(1 − tr PQ)` for a pair of rank-one projections.
pub fn gap_rank1(p: &Projection, q: &Projection) -> Result<f64> {
    p.check_compatible(q)?;
    for r in [p, q] {
        if r.rank() != 1 {
            return Err(Error::BadRank {
                rank: r.rank(),
                dim: r.dim(),
            });
        }
    }
    let tr = (p.matrix() * q.matrix()).trace().re;
    // Roundoff can push the trace a hair outside [0, 1]; that is not an error here.
    Ok((1.0 - tr).clamp(0.0, 1.0).sqrt())
}

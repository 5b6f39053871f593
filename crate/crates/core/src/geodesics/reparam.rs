//! Reparameterizations `f: [0, π/2] → [0, π/2]` that drive the extra block of
//! a branching geodesic.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid spacing used to check Lipschitz bounds.
pub const GRID_STEP: f64 = 1e-3;

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ReparamFunction {
    Identity,
    /// Zero outside `[start, end]`, rising linearly to `height` at the
    /// midpoint and back down.
    Triangle { start: f64, end: f64, height: f64 },
    /// Piecewise-linear through `knots` (sorted by abscissa), held constant
    /// beyond the first and last knot.
    Pwl { knots: Vec<(f64, f64)> },
}

/// Lipschitz bound and pinned values a reparameterization must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct ReparamConstraints {
    pub lipschitz: f64,
    pub anchors: Vec<(f64, f64)>,
}

impl ReparamConstraints {
    /// Lipschitz 1, vanishing at `0`, `π/4`, `π/2`.
    pub fn vanishing() -> Self {
        ReparamConstraints {
            lipschitz: 1.0,
            anchors: vec![(0.0, 0.0), (FRAC_PI_2 / 2.0, 0.0), (FRAC_PI_2, 0.0)],
        }
    }

    /// Lipschitz `π/(2ψ)`, fixing `0`, `π/4`, `π/2`.
    pub fn fixing(psi: f64) -> Self {
        let q = FRAC_PI_2 / 2.0;
        ReparamConstraints {
            lipschitz: FRAC_PI_2 / psi,
            anchors: vec![(0.0, 0.0), (q, q), (FRAC_PI_2, FRAC_PI_2)],
        }
    }
}

impl ReparamFunction {
    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            ReparamFunction::Identity => theta,
            ReparamFunction::Triangle { start, end, height } => {
                if theta <= *start || theta >= *end {
                    return 0.0;
                }
                let mid = 0.5 * (start + end);
                let half = 0.5 * (end - start);
                height * (1.0 - (theta - mid).abs() / half)
            }
            ReparamFunction::Pwl { knots } => {
                let Some(first) = knots.first() else {
                    return 0.0;
                };
                if theta <= first.0 {
                    return first.1;
                }
                for w in knots.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if theta <= x1 {
                        if x1 == x0 {
                            return y1;
                        }
                        return y0 + (y1 - y0) * (theta - x0) / (x1 - x0);
                    }
                }
                knots.last().map(|k| k.1).unwrap_or(0.0)
            }
        }
    }

    /// Check range, anchors and the Lipschitz bound on the `10⁻³` grid.
    pub fn validate(&self, c: &ReparamConstraints) -> Result<()> {
        self.check_shape()?;
        for &(theta, want) in &c.anchors {
            let got = self.eval(theta);
            if (got - want).abs() > SLACK {
                return Err(Error::BadReparam(format!(
                    "f({theta:.6}) = {got:.6}, anchor requires {want:.6}"
                )));
            }
        }
        let grid = grid();
        let values: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        if let Some((t, v)) = grid
            .iter()
            .zip(&values)
            .find(|(_, v)| !(-SLACK..=FRAC_PI_2 + SLACK).contains(*v))
        {
            return Err(Error::BadReparam(format!(
                "f({t:.6}) = {v:.6} leaves [0, π/2]"
            )));
        }
        for i in 1..grid.len() {
            let slope = (values[i] - values[i - 1]).abs() / (grid[i] - grid[i - 1]);
            if slope > c.lipschitz * (1.0 + 1e-9) + SLACK {
                return Err(Error::BadReparam(format!(
                    "slope {slope:.6} near θ = {:.6} exceeds Lipschitz bound {:.6}",
                    grid[i], c.lipschitz
                )));
            }
        }
        Ok(())
    }

    fn check_shape(&self) -> Result<()> {
        match self {
            ReparamFunction::Identity => Ok(()),
            ReparamFunction::Triangle { start, end, height } => {
                if !(start < end) || !height.is_finite() {
                    return Err(Error::BadReparam(format!(
                        "triangle needs start < end, got [{start}, {end}] height {height}"
                    )));
                }
                Ok(())
            }
            ReparamFunction::Pwl { knots } => {
                if knots.is_empty() {
                    return Err(Error::BadReparam("piecewise-linear map without knots".into()));
                }
                if knots.windows(2).any(|w| w[1].0 < w[0].0) {
                    return Err(Error::BadReparam("knots not sorted by abscissa".into()));
                }
                Ok(())
            }
        }
    }

    /// Largest `|f(θ) − g(θ)|` over the validation grid.
    pub fn sup_distance(&self, other: &ReparamFunction) -> f64 {
        grid()
            .iter()
            .map(|&t| (self.eval(t) - other.eval(t)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> ReparamJson {
        let (kind, params) = match self {
            ReparamFunction::Identity => ("identity", vec![]),
            ReparamFunction::Triangle { start, end, height } => ("triangle", vec![*start, *end, *height]),
            ReparamFunction::Pwl { knots } => ("pwl", knots.iter().flat_map(|&(x, y)| [x, y]).collect()),
        };
        ReparamJson {
            kind: kind.to_string(),
            params,
        }
    }

    pub fn from_json(j: &ReparamJson) -> Result<Self> {
        let p = &j.params;
        match j.kind.as_str() {
            "identity" if p.is_empty() => Ok(ReparamFunction::Identity),
            "triangle" if p.len() == 3 => Ok(ReparamFunction::Triangle {
                start: p[0],
                end: p[1],
                height: p[2],
            }),
            "pwl" if !p.is_empty() && p.len().is_multiple_of(2) => Ok(ReparamFunction::Pwl {
                knots: p.chunks(2).map(|c| (c[0], c[1])).collect(),
            }),
            "identity" | "triangle" | "pwl" => Err(Error::BadReparam(format!(
                "wrong parameter count {} for kind {}",
                p.len(),
                j.kind
            ))),
            other => Err(Error::BadReparam(format!("unknown reparameterization kind {other:?}"))),
        }
    }
}

/// `{"kind": "identity" | "triangle" | "pwl", "params": [...]}`; `pwl`
/// params are flattened `x0, y0, x1, y1, ...` knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReparamJson {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

/// Uniform grid on `[0, π/2]` with spacing at most [`GRID_STEP`], endpoints included.
pub fn grid() -> Vec<f64> {
    let n = (FRAC_PI_2 / GRID_STEP).ceil() as usize;
    (0..=n).map(|i| FRAC_PI_2 * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn bump() -> ReparamFunction {
        ReparamFunction::Triangle {
            start: 0.0,
            end: FRAC_PI_4,
            height: FRAC_PI_8,
        }
    }

    #[test]
    fn triangle_bump_meets_vanishing_constraints() {
        bump().validate(&ReparamConstraints::vanishing()).unwrap();
        assert!((bump().eval(FRAC_PI_8) - FRAC_PI_8).abs() < 1e-15);
        assert!((bump().sup_distance(&ReparamFunction::Pwl { knots: vec![(0.0, 0.0)] }) - FRAC_PI_8).abs() < 1e-3);
    }

    #[test]
    fn anchor_violation_is_rejected() {
        let f = ReparamFunction::Triangle {
            start: 0.0,
            end: FRAC_PI_2,
            height: 0.3,
        };
        let err = f.validate(&ReparamConstraints::vanishing()).unwrap_err();
        assert!(matches!(err, Error::BadReparam(_)));
    }

    #[test]
    fn steep_bump_breaks_lipschitz_bound() {
        let f = ReparamFunction::Triangle {
            start: 0.0,
            end: FRAC_PI_4,
            height: 0.5,
        };
        assert!(f.validate(&ReparamConstraints::vanishing()).is_err());
    }

    #[test]
    fn fixing_constraints_accept_identity_and_fast_pwl() {
        let psi = FRAC_PI_6;
        let c = ReparamConstraints::fixing(psi);
        ReparamFunction::Identity.validate(&c).unwrap();
        let q = FRAC_PI_4;
        let f = ReparamFunction::Pwl {
            knots: vec![(0.0, 0.0), (q / 2.0, q), (q, q), (1.5 * q, q), (FRAC_PI_2, FRAC_PI_2)],
        };
        f.validate(&c).unwrap();
        // Slope 2 is too fast once the bound drops to 1.
        assert!(f.validate(&ReparamConstraints::fixing(FRAC_PI_2)).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let f = bump();
        let j = f.to_json();
        assert_eq!(j.kind, "triangle");
        assert_eq!(ReparamFunction::from_json(&j).unwrap(), f);
        let bad = ReparamJson {
            kind: "spline".into(),
            params: vec![],
        };
        assert!(ReparamFunction::from_json(&bad).is_err());
        let odd = ReparamJson {
            kind: "pwl".into(),
            params: vec![0.0, 0.0, 1.0],
        };
        assert!(ReparamFunction::from_json(&odd).is_err());
    }
}

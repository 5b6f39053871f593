//! Triples `(P, R, Q)` through which more than one curve obeys
//! `‖γ(θ1) − γ(θ2)‖ = sin|θ1 − θ2|`.
//!
//! Every configuration starts from a pair of equal-dimensional orthogonal
//! blocks `L ⊕ L` (rotated by `θ` exactly as in the three-point geodesic)
//! and adds an extra part that can be moved along its own schedule `f(θ)`
//! without ever being the binding constraint:
//!
//! * `ExtraBlocks`: one axis of `Im P ∩ Im Q` and one of `Ker P ∩ Ker Q`
//!   spin into each other by angle `f(θ)`; `f` is 1-Lipschitz and vanishes
//!   at `0`, `π/4`, `π/2`.
//! * `GenericSubcritical`: a generic part with largest angle `ψ < π/2`
//!   follows its rotation geodesic at time `f(θ)`; `f` is
//!   `π/(2ψ)`-Lipschitz and fixes `0`, `π/4`, `π/2`.
//! * `CriticalSine`: as above, but part of the generic block has sine
//!   exactly one and moves with `L`. In finite dimension such a pair is
//!   indistinguishable from an extra copy of `L`, so `L` itself may be empty.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::path::{uniform_grid, GeodesicPath, PathBlock};
use crate::geodesics::reparam::{ReparamConstraints, ReparamFunction};
use crate::linalg::{self, CMat};
use crate::metric::gap_direct;
use crate::projection::{Projection, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchConfig {
    ExtraBlocks,
    GenericSubcritical,
    CriticalSine,
}

impl FromStr for BranchConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "extrablocks" => Ok(BranchConfig::ExtraBlocks),
            "genericsubcritical" => Ok(BranchConfig::GenericSubcritical),
            "criticalsine" => Ok(BranchConfig::CriticalSine),
            _ => Err(Error::BadConfig(format!("unknown configuration {s:?}"))),
        }
    }
}

/// Block sizes of a branching configuration. Fields a configuration does
/// not use must be left at their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchParams {
    /// Dimension of each copy of `L`.
    #[serde(default)]
    pub l: usize,
    /// Number of generic pairs with sine exactly one (`CriticalSine`).
    #[serde(default)]
    pub critical: usize,
    #[serde(default)]
    pub d3: usize,
    #[serde(default)]
    pub d4: usize,
    /// Subcritical generic sines, each in `(0, 1)`.
    #[serde(default)]
    pub sines: Vec<f64>,
}

impl BranchParams {
    pub fn dim(&self) -> usize {
        2 * (self.l + self.critical) + self.d3 + self.d4 + 2 * self.sines.len()
    }
}

#[derive(Debug, Clone)]
pub struct Branching {
    pub p: Projection,
    pub q: Projection,
    pub r: Projection,
    pub paths: [GeodesicPath; 2],
}

impl Branching {
    /// Largest `‖γ1(θ) − γ2(θ)‖` over the grid.
    pub fn separation(&self, grid: &[f64]) -> Result<f64> {
        let mut worst = 0.0_f64;
        for &t in grid {
            worst = worst.max(gap_direct(&self.paths[0].eval(t)?, &self.paths[1].eval(t)?)?);
        }
        Ok(worst)
    }

    /// Largest deviation of either path from `P`, `R`, `Q` at `0`, `π/4`, `π/2`.
    pub fn interpolation_residual(&self) -> Result<f64> {
        let mut worst = 0.0_f64;
        for path in &self.paths {
            for (t, want) in [(0.0, &self.p), (FRAC_PI_2 / 2.0, &self.r), (FRAC_PI_2, &self.q)] {
                worst = worst.max(linalg::op_norm(&(path.eval(t)?.matrix() - want.matrix())));
            }
        }
        Ok(worst)
    }
}

/// Grid used for separation reports.
pub fn separation_grid() -> Vec<f64> {
    uniform_grid(129)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadConfig(msg.into())
}

/// Frame columns are laid out as `[M(e) | M(f) | X(e) | X(f) | H3 rest | H4 rest]`,
/// with `M = L ⊕ (sine-one pairs)` and `X` the extra axis pair or the
/// subcritical generic part.
struct Layout {
    blocks_for: Box<dyn Fn(ReparamFunction) -> Vec<PathBlock>>,
    constraints: ReparamConstraints,
}

fn layout(config: BranchConfig, params: &BranchParams) -> Result<Layout> {
    let BranchParams { l, critical, d3, d4, ref sines } = *params;
    let k = sines.len();
    if let Some(s) = sines.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
        return Err(bad(format!("subcritical sine {s} outside (0, 1)")));
    }
    match config {
        BranchConfig::ExtraBlocks => {
            if l == 0 || d3 == 0 || d4 == 0 {
                return Err(bad("ExtraBlocks needs l, d3, d4 all positive"));
            }
            if critical != 0 || k != 0 {
                return Err(bad("ExtraBlocks takes no generic part"));
            }
        }
        BranchConfig::GenericSubcritical => {
            if l == 0 || k == 0 {
                return Err(bad("GenericSubcritical needs l > 0 and at least one sine"));
            }
            if critical != 0 {
                return Err(bad("GenericSubcritical takes no critical pairs"));
            }
        }
        BranchConfig::CriticalSine => {
            if critical == 0 || k == 0 {
                return Err(bad("CriticalSine needs critical > 0 and at least one subcritical sine"));
            }
        }
    }

    let lc = l + critical;
    let (pair_len, pair_angles, constraints, h3_rest, h4_rest) = match config {
        BranchConfig::ExtraBlocks => (1, vec![FRAC_PI_2], ReparamConstraints::vanishing(), d3 - 1, d4 - 1),
        _ => {
            let angles: Vec<f64> = sines.iter().map(|s| s.asin()).collect();
            let psi = angles.iter().copied().fold(0.0, f64::max);
            (k, angles, ReparamConstraints::fixing(psi), d3, d4)
        }
    };
    let pe = 2 * lc;
    let pf = pe + pair_len;
    let o3 = pf + pair_len;
    let o4 = o3 + h3_rest;
    let blocks_for = Box::new(move |f: ReparamFunction| {
        vec![
            PathBlock::Rotation {
                e: 0,
                f: lc,
                angles: vec![FRAC_PI_2; lc],
                reparam: ReparamFunction::Identity,
            },
            PathBlock::Rotation {
                e: pe,
                f: pf,
                angles: pair_angles.clone(),
                reparam: f,
            },
            PathBlock::Fixed { start: o3, len: h3_rest, on: true },
            PathBlock::Fixed { start: o4, len: h4_rest, on: false },
        ]
    });
    Ok(Layout { blocks_for, constraints })
}

/// Two distinct curves through the configuration's `(P, R, Q)`, in the
/// standard frame.
pub fn branching_pair(
    config: BranchConfig,
    params: &BranchParams,
    f1: &ReparamFunction,
    f2: &ReparamFunction,
) -> Result<Branching> {
    branching_pair_in_frame(config, params, f1, f2, None, ScalarField::Real)
}

/// As [`branching_pair`], with every matrix conjugated by `frame` when given.
pub fn branching_pair_in_frame(
    config: BranchConfig,
    params: &BranchParams,
    f1: &ReparamFunction,
    f2: &ReparamFunction,
    frame: Option<&CMat>,
    field: ScalarField,
) -> Result<Branching> {
    let lay = layout(config, params)?;
    f1.validate(&lay.constraints)?;
    f2.validate(&lay.constraints)?;
    if f1.sup_distance(f2) <= 1e-12 {
        return Err(Error::BadReparam("f1 and f2 coincide on the grid".into()));
    }
    let n = params.dim();
    let frame = match frame {
        Some(w) => {
            if w.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "frame is {}x{}, configuration needs {n}x{n}",
                    w.nrows(),
                    w.ncols()
                )));
            }
            w.clone()
        }
        None => linalg::identity(n),
    };
    // psi = π/2: the L block makes every path move at the full rate.
    let g1 = GeodesicPath::new(frame.clone(), (lay.blocks_for)(f1.clone()), FRAC_PI_2, field);
    let g2 = GeodesicPath::new(frame, (lay.blocks_for)(f2.clone()), FRAC_PI_2, field);
    let p = g1.eval(0.0)?;
    let r = g1.eval(FRAC_PI_2 / 2.0)?;
    let q = g1.eval(FRAC_PI_2)?;
    Ok(Branching {
        p,
        q,
        r,
        paths: [g1, g2],
    })
}

//! Orthogonality-type relations between projections and short chains that
//! connect any two admissible projections through them.
//!
//! "Infinite rank and infinite corank" is modelled in dimension `N` by a
//! margin `m`: a projection is admissible when both its rank and corank are
//! at least `m`. Chains that would need genuinely infinite room fail with
//! [`Error::CapacityExhausted`] instead of silently degrading.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halmos::{halmos_decompose, HalmosForm, TOL_GEN};
use crate::json::{projection_from_json, projection_to_json, MatrixJson};
use crate::linalg::{self, CMat};
use crate::projection::{Projection, ScalarField};

/// Default tolerance for the relation predicates.
pub const TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityModel {
    n: usize,
    margin: usize,
}

impl AdmissibilityModel {
    pub fn new(n: usize, margin: usize) -> Result<Self> {
        if margin == 0 || 2 * margin > n {
            return Err(Error::BadConfig(format!(
                "margin {margin} needs 0 < 2m ≤ N = {n}"
            )));
        }
        Ok(AdmissibilityModel { n, margin })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn admits_rank(&self, rank: usize) -> bool {
        rank >= self.margin && self.n - rank.min(self.n) >= self.margin
    }

    pub fn is_admissible(&self, p: &Projection) -> bool {
        p.dim() == self.n && self.admits_rank(p.rank())
    }

    fn check_dim(&self, p: &Projection) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "projection on dimension {} in a model of dimension {}",
                p.dim(),
                self.n
            )));
        }
        Ok(())
    }
}

/// `‖PQ‖ ≤ tol`.
pub fn is_orthogonal(p: &Projection, q: &Projection, tol: f64) -> Result<bool> {
    p.check_compatible(q)?;
    Ok(linalg::op_norm(&(p.matrix() * q.matrix())) <= tol)
}

/// `P ⊥ Q` or `(I − P) ⊥ (I − Q)`.
pub fn is_sim(p: &Projection, q: &Projection, tol: f64) -> Result<bool> {
    Ok(is_orthogonal(p, q, tol)? || is_orthogonal(&p.complement(), &q.complement(), tol)?)
}

/// `P ⊥ Q` with `P`, `Q` and `P + Q` all admissible.
pub fn is_sharp(p: &Projection, q: &Projection, model: &AdmissibilityModel, tol: f64) -> Result<bool> {
    model.check_dim(p)?;
    model.check_dim(q)?;
    Ok(is_orthogonal(p, q, tol)?
        && model.is_admissible(p)
        && model.is_admissible(q)
        && p.rank() + q.rank() + model.margin <= model.n)
}

/// `Im P ⊆ Im Q`, tested as `‖P − QP‖ ≤ tol`.
pub fn is_le(p: &Projection, q: &Projection, tol: f64) -> Result<bool> {
    p.check_compatible(q)?;
    Ok(linalg::op_norm(&(p.matrix() - q.matrix() * p.matrix())) <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Perp,
    Sharp,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Perp => "perp",
            Relation::Sharp => "sharp",
        })
    }
}

impl std::str::FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perp" => Ok(Relation::Perp),
            "sharp" => Ok(Relation::Sharp),
            other => Err(Error::BadConfig(format!("unknown relation {other:?}"))),
        }
    }
}

/// Which construction produced a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Route {
    /// The endpoints are already related.
    Direct,
    /// One intermediate node inside `Ker P ∩ Ker Q`.
    CommonKernel,
    /// Two intermediate nodes built from a split of the generic part plus
    /// the fixed blocks; `k1` generic pairs feed the first node, `h4a`
    /// columns of `Ker P ∩ Ker Q` go to the first node and the rest to the
    /// second.
    GenericSplit { k1: usize, h4a: usize },
    /// Both `Im P ∩ Ker Q` and `Ker P ∩ Im Q` are large enough to host an
    /// intermediate node each.
    FixedBlocks,
    /// `P ⊥ Q` without room for `P + Q`: go `P, Q', P', Q` with `Q' ≤ Q`, `P' ≤ P`.
    Extension,
}

#[derive(Debug, Clone)]
pub struct Chain {
    pub nodes: Vec<Projection>,
    pub relation: Relation,
    pub route: Route,
}

impl Chain {
    /// Number of links.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `‖P_{k−1} P_k‖` per link.
    pub fn link_residuals(&self) -> Vec<f64> {
        self.nodes
            .windows(2)
            .map(|w| linalg::op_norm(&(w[0].matrix() * w[1].matrix())))
            .collect()
    }

    /// Check every node and link; returns the largest link residual.
    pub fn validate(&self, model: &AdmissibilityModel, tol: f64) -> Result<f64> {
        if self.is_empty() || self.len() > 3 {
            return Err(Error::HypothesisViolated(format!(
                "chain has {} links, expected 1 to 3",
                self.len()
            )));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if !model.is_admissible(node) {
                return Err(Error::HypothesisViolated(format!(
                    "node {i} has rank {} outside [{}, {}]",
                    node.rank(),
                    model.margin,
                    model.n - model.margin
                )));
            }
        }
        let residuals = self.link_residuals();
        for (i, w) in self.nodes.windows(2).enumerate() {
            let ok = match self.relation {
                Relation::Perp => residuals[i] <= tol,
                Relation::Sharp => is_sharp(&w[0], &w[1], model, tol)?,
            };
            if !ok {
                return Err(Error::HypothesisViolated(format!(
                    "link {i} fails {} (‖PQ‖ = {:.3e}, ranks {} + {})",
                    self.relation,
                    residuals[i],
                    w[0].rank(),
                    w[1].rank()
                )));
            }
        }
        Ok(residuals.iter().copied().fold(0.0, f64::max))
    }
}

/// `{"relation": "perp", "route": {...}, "nodes": [matrix, ...], "residuals": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainJson {
    pub relation: Relation,
    pub route: Route,
    pub nodes: Vec<MatrixJson>,
    pub residuals: Vec<f64>,
}

impl Chain {
    pub fn to_json(&self) -> ChainJson {
        ChainJson {
            relation: self.relation,
            route: self.route,
            nodes: self.nodes.iter().map(projection_to_json).collect(),
            residuals: self.link_residuals(),
        }
    }

    pub fn from_json(j: &ChainJson, tol: f64) -> Result<Self> {
        Ok(Chain {
            nodes: j
                .nodes
                .iter()
                .map(|m| projection_from_json(m, tol))
                .collect::<Result<Vec<_>>>()?,
            relation: j.relation,
            route: j.route,
        })
    }
}

fn check_endpoints(p: &Projection, q: &Projection, model: &AdmissibilityModel) -> Result<()> {
    model.check_dim(p)?;
    model.check_dim(q)?;
    for (name, x) in [("P", p), ("Q", q)] {
        if !model.is_admissible(x) {
            return Err(Error::HypothesisViolated(format!(
                "{name} has rank {} outside [{}, {}]",
                x.rank(),
                model.margin,
                model.n - model.margin
            )));
        }
    }
    Ok(())
}

/// Projection onto the first `rank` columns of `pool`.
fn node_from(pool: &CMat, rank: usize, field: ScalarField) -> Projection {
    let b = pool.columns(0, rank).into_owned();
    let mut m = &b * b.adjoint();
    if field.is_real() {
        m.iter_mut().for_each(|z| z.im = 0.0);
    }
    Projection::from_parts(m, rank, field)
}

/// Unit vectors `−s e_i + c f_i`: the part of the generic plane killed by `Q`.
fn generic_partners(form: &HalmosForm, idx: std::ops::Range<usize>) -> CMat {
    let (e, f) = (form.k_first(), form.k_second());
    let n = form.dim();
    let mut out = linalg::zeros(n, idx.len());
    for (j, i) in idx.enumerate() {
        let (s, c) = (form.sines()[i], form.cosines()[i]);
        let col = f.column(i) * linalg::c(c) - e.column(i) * linalg::c(s);
        out.set_column(j, &col);
    }
    out
}

/// Connect two admissible projections by at most three orthogonal links.
///
/// Intermediate nodes have the smallest admissible rank `m`, taken from the
/// leading columns of a pool orthogonal to the relevant neighbours.
pub fn perp_chain(p: &Projection, q: &Projection, model: &AdmissibilityModel) -> Result<Chain> {
    check_endpoints(p, q, model)?;
    let field = p.joint_field(q);
    let m = model.margin;
    if is_orthogonal(p, q, TOL_REL)? {
        return Ok(Chain {
            nodes: vec![p.clone(), q.clone()],
            relation: Relation::Perp,
            route: Route::Direct,
        });
    }
    let form = halmos_decompose(p, q, TOL_GEN)?;
    let d = form.dims();
    let n = form.dim();

    if d.d4 >= m {
        let p1 = node_from(&form.h4(), m, field);
        return Ok(Chain {
            nodes: vec![p.clone(), p1, q.clone()],
            relation: Relation::Perp,
            route: Route::CommonKernel,
        });
    }

    let (h1, h2, h4, f) = (form.h1(), form.h2(), form.h4(), form.k_second());
    if d.k > 0 {
        // First node lives in Ker P: f-vectors of the pairs in G1, H2, part of H4.
        // Second node lives in Ker Q: partners of the pairs in G2, H1, the rest of H4.
        for k1 in 0..=d.k {
            for h4a in 0..=d.d4 {
                let pool1 = k1 + d.d2 + h4a;
                let pool2 = (d.k - k1) + d.d1 + (d.d4 - h4a);
                if pool1 < m || pool2 < m {
                    continue;
                }
                let b1 = linalg::hstack(
                    &[&f.columns(0, k1).into_owned(), &h2, &h4.columns(0, h4a).into_owned()],
                    n,
                );
                let b2 = linalg::hstack(
                    &[
                        &generic_partners(&form, k1..d.k),
                        &h1,
                        &h4.columns(h4a, d.d4 - h4a).into_owned(),
                    ],
                    n,
                );
                return Ok(Chain {
                    nodes: vec![p.clone(), node_from(&b1, m, field), node_from(&b2, m, field), q.clone()],
                    relation: Relation::Perp,
                    route: Route::GenericSplit { k1, h4a },
                });
            }
        }
    }

    if d.d1 >= m && d.d2 >= m {
        return Ok(Chain {
            nodes: vec![p.clone(), node_from(&h2, m, field), node_from(&h1, m, field), q.clone()],
            relation: Relation::Perp,
            route: Route::FixedBlocks,
        });
    }

    let total = d.k + d.d1 + d.d2 + d.d4;
    Err(Error::CapacityExhausted(format!(
        "N = {}, m = {m}, blocks {:?}: common kernel short by {}, \
         generic split short by {} (needs 2m = {} columns, has {}), \
         fixed blocks short by {}",
        model.n,
        d.as_array(),
        m - d.d4,
        (2 * m).saturating_sub(total),
        2 * m,
        total,
        (m.saturating_sub(d.d1)).max(m.saturating_sub(d.d2)),
    )))
}

/// Connect two admissible projections by at most three `♯` links.
pub fn sharp_chain(p: &Projection, q: &Projection, model: &AdmissibilityModel) -> Result<Chain> {
    check_endpoints(p, q, model)?;
    let (n, m) = (model.n, model.margin);
    let field = p.joint_field(q);
    // Every ♯ neighbour has rank ≥ m, so an endpoint of rank r needs r + 2m ≤ N.
    for (name, x) in [("P", p), ("Q", q)] {
        if x.rank() + 2 * m > n {
            return Err(Error::CapacityExhausted(format!(
                "{name} has rank {}; a ♯ neighbour needs rank ≥ {m} and the sum must leave corank ≥ {m}, \
                 so rank must be ≤ N − 2m = {}",
                x.rank(),
                n - 2 * m
            )));
        }
    }
    if is_sharp(p, q, model, TOL_REL)? {
        return Ok(Chain {
            nodes: vec![p.clone(), q.clone()],
            relation: Relation::Sharp,
            route: Route::Direct,
        });
    }
    if is_orthogonal(p, q, TOL_REL)? {
        // P ⊥ Q but P + Q is too big: P, Q' ≤ Q, P' ≤ P, Q.
        if 3 * m > n {
            return Err(Error::CapacityExhausted(format!(
                "two rank-{m} nodes need N ≥ 3m = {}, have N = {n}",
                3 * m
            )));
        }
        let q1 = node_from(q.image().columns(), m, field);
        let p1 = node_from(p.image().columns(), m, field);
        return Ok(Chain {
            nodes: vec![p.clone(), q1, p1, q.clone()],
            relation: Relation::Sharp,
            route: Route::Extension,
        });
    }
    let perp = perp_chain(p, q, model)?;
    let chain = Chain {
        relation: Relation::Sharp,
        ..perp
    };
    match chain.validate(model, TOL_REL) {
        Ok(_) => Ok(chain),
        Err(Error::HypothesisViolated(msg)) => Err(Error::CapacityExhausted(msg)),
        Err(e) => Err(e),
    }
}

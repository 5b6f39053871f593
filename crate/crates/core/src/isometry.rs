//! Gap isometries of the form `P ↦ U P U*`, `P ↦ U P̄ U*` and their
//! complemented versions: applying them, checking that a sampled map
//! preserves the gap, recovering `U` from data, and classifying an unknown
//! map. Also the rank strata and chains of sub-unit steps between
//! projections of equal rank.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::midpoint_element;
use crate::halmos::{halmos_decompose, TOL_GEN};
use crate::json::MatrixJson;
use crate::linalg::{self, CMat};
use crate::metric::gap_direct;
use crate::projection::{Projection, ScalarField};
use crate::relations::{self, AdmissibilityModel};
use crate::sampling;

/// Allowed deviation of `U*U` from the identity.
pub const TOL_UNITARY: f64 = 1e-10;
/// Best fit above this means the map is not of any supported form.
pub const TOL_CLASSIFY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryKind {
    Unitary,
    Antiunitary,
    UnitaryComplement,
    AntiunitaryComplement,
}

impl IsometryKind {
    pub const ALL: [IsometryKind; 4] = [
        IsometryKind::Unitary,
        IsometryKind::Antiunitary,
        IsometryKind::UnitaryComplement,
        IsometryKind::AntiunitaryComplement,
    ];

    pub fn is_complement(self) -> bool {
        matches!(self, IsometryKind::UnitaryComplement | IsometryKind::AntiunitaryComplement)
    }

    pub fn is_antiunitary(self) -> bool {
        matches!(self, IsometryKind::Antiunitary | IsometryKind::AntiunitaryComplement)
    }

    /// Over the reals conjugation is trivial, so antiunitary kinds collapse.
    pub fn over(self, field: ScalarField) -> Self {
        match (field, self) {
            (ScalarField::Real, IsometryKind::Antiunitary) => IsometryKind::Unitary,
            (ScalarField::Real, IsometryKind::AntiunitaryComplement) => IsometryKind::UnitaryComplement,
            (_, k) => k,
        }
    }

    pub fn kinds_for(field: ScalarField) -> &'static [IsometryKind] {
        match field {
            ScalarField::Real => &[IsometryKind::Unitary, IsometryKind::UnitaryComplement],
            ScalarField::Complex => &Self::ALL,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IsometryKind::Unitary => "unitary",
            IsometryKind::Antiunitary => "antiunitary",
            IsometryKind::UnitaryComplement => "unitary_complement",
            IsometryKind::AntiunitaryComplement => "antiunitary_complement",
        }
    }
}

impl fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IsometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown isometry kind {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct IsometrySpec {
    kind: IsometryKind,
    u: CMat,
    field: ScalarField,
    /// Set when an antiunitary kind was requested for a real `U` and
    /// replaced by its unitary counterpart.
    normalized: bool,
}

impl IsometrySpec {
    pub fn new(kind: IsometryKind, u: CMat) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::NotSquare { rows: u.nrows(), cols: u.ncols() });
        }
        let residual = linalg::orthonormality_residual(&u);
        if residual > TOL_UNITARY {
            return Err(Error::HypothesisViolated(format!(
                "U is not unitary (‖U*U − I‖ = {residual:.3e})"
            )));
        }
        let field = if linalg::max_imag(&u) == 0.0 {
            ScalarField::Real
        } else {
            ScalarField::Complex
        };
        Ok(IsometrySpec {
            kind,
            u,
            field,
            normalized: false,
        })
    }

    /// Spec for a real space: antiunitary kinds are folded into unitary ones
    /// and flagged.
    pub fn new_in(kind: IsometryKind, u: CMat, field: ScalarField) -> Result<Self> {
        let mut spec = Self::new(kind.over(field), u)?;
        if field.is_real() {
            if !spec.field.is_real() {
                return Err(Error::FieldMismatch("complex U for a real space".into()));
            }
            spec.normalized = kind != spec.kind;
        }
        Ok(spec)
    }

    pub fn random(kind: IsometryKind, n: usize, field: ScalarField, seed: u64) -> Result<Self> {
        let mut rng = sampling::rng(seed);
        Self::new_in(kind, sampling::haar_unitary(&mut rng, n, field), field)
    }

    pub fn kind(&self) -> IsometryKind {
        self.kind
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn to_json(&self) -> IsometrySpecJson {
        IsometrySpecJson {
            kind: self.kind,
            u: MatrixJson::from_matrix(&self.u, self.field),
        }
    }

    pub fn from_json(j: &IsometrySpecJson) -> Result<Self> {
        Self::new_in(j.kind, j.u.to_matrix()?, j.u.field)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometrySpecJson {
    pub kind: IsometryKind,
    #[serde(rename = "U")]
    pub u: MatrixJson,
}

/// Image of `P` under the map described by `spec`.
pub fn apply_isometry(spec: &IsometrySpec, p: &Projection) -> Result<Projection> {
    if p.dim() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "U is {}x{}, P acts on dimension {}",
            spec.dim(),
            spec.dim(),
            p.dim()
        )));
    }
    let mut x = if spec.kind.is_complement() { p.complement() } else { p.clone() };
    if spec.kind.is_antiunitary() {
        x = x.entrywise_conj();
    }
    let field = if x.field().is_real() && spec.field.is_real() {
        ScalarField::Real
    } else {
        ScalarField::Complex
    };
    Ok(Projection::from_parts(linalg::conjugate(&spec.u, x.matrix()), x.rank(), field))
}

/// Largest change of the gap over all index pairs of `(P_i, φ(P_i))`.
pub fn isometry_residual(pairs: &[(Projection, Projection)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::TooFewSamples {
            got: pairs.len(),
            need: 2,
        });
    }
    let mut worst = 0.0_f64;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let before = gap_direct(&pairs[i].0, &pairs[j].0)?;
            let after = gap_direct(&pairs[i].1, &pairs[j].1)?;
            worst = worst.max((after - before).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions { max_iter: 200, tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    /// Best unitary, with its largest entry rotated to be real and positive.
    pub u: CMat,
    /// `max_i ‖U P_i U* − Q_i‖`.
    pub residual: f64,
    /// More than one unitary (beyond a phase) fits the data.
    pub ambiguous: bool,
    pub iterations: usize,
}

fn fit_residual(u: &CMat, pairs: &[(Projection, Projection)]) -> f64 {
    pairs
        .iter()
        .map(|(p, q)| linalg::op_norm(&(linalg::conjugate(u, p.matrix()) - q.matrix())))
        .fold(0.0, f64::max)
}

/// Unitary `U` with `U P_i U* ≈ Q_i`.
///
/// The exact solutions span the null space of `X ↦ Σ (X P_i − Q_i X)`
/// adjoint-composed with itself, so the smallest eigenvectors of that
/// `N² x N²` operator give a starting point; when the null space has more
/// than one dimension the identity is projected onto it, so maps that fix
/// every `P_i` return `U = I`. Fixed-point steps `U ← polar(Σ Q_i U P_i)`
/// then increase `Σ Re tr(U* Q_i U P_i)` monotonically.
pub fn recover_unitary(pairs: &[(Projection, Projection)], opts: &RecoveryOptions) -> Result<RecoveryResult> {
    let first = pairs.first().ok_or(Error::TooFewSamples { got: 0, need: 1 })?;
    let n = first.0.dim();
    for (p, q) in pairs {
        if p.dim() != n || q.dim() != n {
            return Err(Error::DimensionMismatch("pairs act on different dimensions".into()));
        }
    }
    let nn = n * n;
    // vec(X) is column-major: index i + n j holds X[i, j].
    // L_k vec(X) = vec(X P_k − Q_k X).
    let mut g = linalg::zeros(nn, nn);
    let mut l = linalg::zeros(nn, nn);
    for (p, q) in pairs {
        let (pm, qm) = (p.matrix(), q.matrix());
        l.fill(linalg::ZERO);
        for j in 0..n {
            for i in 0..n {
                let col = i + n * j;
                // Basis matrix E_ij: (E_ij P)[i, c] = P[j, c]; (Q E_ij)[r, j] = Q[r, i].
                for cc in 0..n {
                    l[(i + n * cc, col)] += pm[(j, cc)];
                }
                for r in 0..n {
                    l[(r + n * j, col)] -= qm[(r, i)];
                }
            }
        }
        g += l.adjoint() * &l;
    }
    let (values, vectors) = linalg::hermitian_eigen(&g);
    let null_tol = 1e-9 * pairs.len() as f64;
    let null_dim = values.iter().take_while(|&&v| v <= null_tol).count();
    let ambiguous = null_dim > 1;

    let reshape = |v: &crate::linalg::CVec| CMat::from_fn(n, n, |i, j| v[i + n * j]);
    let mut start = reshape(&vectors.column(0).into_owned());
    if ambiguous {
        let id = linalg::identity(n);
        let basis = vectors.columns(0, null_dim);
        let id_vec = crate::linalg::CVec::from_iterator(nn, (0..nn).map(|k| id[(k % n, k / n)]));
        let coords = basis.adjoint() * &id_vec;
        if coords.norm() > 1e-6 {
            start = reshape(&(basis * coords));
        }
    }
    let mut u = linalg::polar_unitary(&start);
    let mut residual = fit_residual(&u, pairs);
    let mut iterations = 0;
    let mut converged = residual <= opts.tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut grad = linalg::zeros(n, n);
        for (p, q) in pairs {
            grad += q.matrix() * &u * p.matrix();
        }
        let next = linalg::polar_unitary(&grad);
        let step = linalg::op_norm(&(&next - &u));
        u = next;
        residual = fit_residual(&u, pairs);
        converged = step <= opts.tol || residual <= opts.tol;
    }
    if !converged {
        return Err(Error::NoConvergence { iterations, residual });
    }
    Ok(RecoveryResult {
        u: linalg::fix_global_phase(&u),
        residual,
        ambiguous,
        iterations,
    })
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub spec: IsometrySpec,
    pub residual: f64,
    pub ambiguous: bool,
    /// Best fit residual per kind tried, in the order tried.
    pub per_kind: Vec<(IsometryKind, f64)>,
}

/// Decide which supported form a map takes by probing it on random
/// projections and fitting each form in turn.
pub fn classify_map(
    oracle: &dyn Fn(&Projection) -> Result<Projection>,
    n: usize,
    field: ScalarField,
    samples: usize,
    seed: u64,
) -> Result<Classification> {
    if samples < 2 {
        return Err(Error::TooFewSamples { got: samples, need: 2 });
    }
    if n < 2 {
        return Err(Error::BadConfig(format!("dimension {n} is too small to probe")));
    }
    let mut rng = sampling::rng(seed);
    let mut probes = Vec::with_capacity(samples);
    for i in 0..samples {
        let rank = 1 + i % (n - 1);
        let p = sampling::random_projection(&mut rng, n, rank, field)?;
        let image = oracle(&p)?;
        if image.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "oracle returned dimension {} for input dimension {n}",
                image.dim()
            )));
        }
        probes.push((p, image));
    }

    let opts = RecoveryOptions::default();
    let mut per_kind = Vec::new();
    let mut best: Option<(IsometryKind, RecoveryResult)> = None;
    for &kind in IsometryKind::kinds_for(field) {
        let pairs: Vec<(Projection, Projection)> = probes
            .iter()
            .map(|(p, image)| {
                let src = if kind.is_antiunitary() { p.entrywise_conj() } else { p.clone() };
                let dst = if kind.is_complement() { image.complement() } else { image.clone() };
                (src, dst)
            })
            .collect();
        // A rank change rules a kind out before any fitting.
        if pairs.iter().any(|(a, b)| a.rank() != b.rank()) {
            per_kind.push((kind, 1.0));
            continue;
        }
        let fit = match recover_unitary(&pairs, &opts) {
            Ok(fit) => fit,
            Err(Error::NoConvergence { residual, .. }) => {
                per_kind.push((kind, residual));
                continue;
            }
            Err(e) => return Err(e),
        };
        per_kind.push((kind, fit.residual));
        if best.as_ref().is_none_or(|(_, b)| fit.residual < b.residual) {
            best = Some((kind, fit));
        }
    }
    let best_residual = per_kind.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
    match best {
        Some((kind, fit)) if fit.residual <= TOL_CLASSIFY => {
            let mut u = fit.u;
            if field.is_real() {
                u.iter_mut().for_each(|z| z.im = 0.0);
            }
            Ok(Classification {
                spec: IsometrySpec::new_in(kind, u, field)?,
                residual: fit.residual,
                ambiguous: fit.ambiguous,
                per_kind,
            })
        }
        _ => Err(Error::Unclassifiable { residual: best_residual }),
    }
}

/// Orthogonal `P`, `Q` whose images under `P ↦ I − P` are not orthogonal.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub p: Projection,
    pub q: Projection,
    pub phi_p: Projection,
    pub phi_q: Projection,
    /// `‖PQ‖`.
    pub pq_norm: f64,
    /// `‖φ(P) φ(Q)‖`.
    pub phi_product_norm: f64,
    pub gap_pq: f64,
    pub gap_phi: f64,
    pub orthogonal_before: bool,
    pub orthogonal_after: bool,
    pub sim_before: bool,
    pub sim_after: bool,
}

/// On `K ⊕ K ⊕ K` with `dim K = k`: `P = I ⊕ 0 ⊕ 0`, `Q = 0 ⊕ I ⊕ 0`.
pub fn orthogonality_counterexample(k: usize) -> Result<Counterexample> {
    if k == 0 {
        return Err(Error::BadConfig("block dimension must be at least 1".into()));
    }
    let n = 3 * k;
    let p = Projection::coordinate(n, &(0..k).collect::<Vec<_>>(), ScalarField::Real);
    let q = Projection::coordinate(n, &(k..2 * k).collect::<Vec<_>>(), ScalarField::Real);
    let (phi_p, phi_q) = (p.complement(), q.complement());
    let tol = relations::TOL_REL;
    Ok(Counterexample {
        pq_norm: linalg::op_norm(&(p.matrix() * q.matrix())),
        phi_product_norm: linalg::op_norm(&(phi_p.matrix() * phi_q.matrix())),
        gap_pq: gap_direct(&p, &q)?,
        gap_phi: gap_direct(&phi_p, &phi_q)?,
        orthogonal_before: relations::is_orthogonal(&p, &q, tol)?,
        orthogonal_after: relations::is_orthogonal(&phi_p, &phi_q, tol)?,
        sim_before: relations::is_sim(&p, &q, tol)?,
        sim_after: relations::is_sim(&phi_p, &phi_q, tol)?,
        p,
        q,
        phi_p,
        phi_q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StratumLabel {
    RankN { n: usize },
    CorankN { n: usize },
    Middle,
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumLabel::RankN { n } => write!(f, "rank_n({n})"),
            StratumLabel::CorankN { n } => write!(f, "corank_n({n})"),
            StratumLabel::Middle => f.write_str("middle"),
        }
    }
}

pub fn stratum(p: &Projection, model: &AdmissibilityModel) -> Result<StratumLabel> {
    if p.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "projection on dimension {} in a model of dimension {}",
            p.dim(),
            model.dim()
        )));
    }
    let m = model.margin();
    Ok(if p.rank() < m {
        StratumLabel::RankN { n: p.rank() }
    } else if p.corank() < m {
        StratumLabel::CorankN { n: p.corank() }
    } else {
        StratumLabel::Middle
    })
}

#[derive(Debug, Clone)]
pub struct ConnectChain {
    pub nodes: Vec<Projection>,
    /// Gap of each consecutive pair.
    pub links: Vec<f64>,
    /// `1 − max link`.
    pub delta: f64,
}

/// Gaps at or above `1 − GAP_ONE_SLACK` count as 1.
pub const GAP_ONE_SLACK: f64 = 1e-9;

/// Projections from `P` to `Q` with every consecutive gap below 1.
///
/// Equal ranks force `dim H1 = dim H2`, so when `‖P − Q‖ = 1` the midpoint at
/// `θ = π/4` exists and sits at distance at most `1/√2` from both ends.
pub fn connect_chain_lt1(p: &Projection, q: &Projection) -> Result<ConnectChain> {
    p.check_compatible(q)?;
    if p.rank() != q.rank() {
        return Err(Error::RankMismatch {
            left: p.rank(),
            right: q.rank(),
        });
    }
    let direct = gap_direct(p, q)?;
    let nodes = if direct < 1.0 - GAP_ONE_SLACK {
        vec![p.clone(), q.clone()]
    } else {
        let d = halmos_decompose(p, q, TOL_GEN)?.dims();
        let r = midpoint_element(p, q, FRAC_PI_4, &linalg::identity(d.d1), None)?;
        vec![p.clone(), r, q.clone()]
    };
    let links = nodes
        .windows(2)
        .map(|w| gap_direct(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let worst = links.iter().copied().fold(0.0, f64::max);
    if worst >= 1.0 - GAP_ONE_SLACK {
        return Err(Error::NumericalInstability {
            context: "connect_chain_lt1".into(),
            value: worst,
        });
    }
    Ok(ConnectChain {
        nodes,
        links,
        delta: 1.0 - worst,
    })
}

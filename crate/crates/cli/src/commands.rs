use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::path::Path;

use grassgap::geodesics::{
    branching_pair, edmon_extract, midpoint_feasible, separation_grid, three_point_geodesic,
    uniform_grid, uniqueness_probe, BranchConfig, BranchParams, GeodesicPath, MidpointSpec, ReparamFunction,
    ReparamJson,
};
use grassgap::halmos::{angles_of, TOL_GEN};
use grassgap::isometry::{
    self, apply_isometry, classify_map, connect_chain_lt1, orthogonality_counterexample, IsometrySpec,
    IsometrySpecJson,
};
use grassgap::json::{parse_matrix, projection_to_json, MatrixJson};
use grassgap::linalg::{self, CMat};
use grassgap::metric::{gap_direct, gap_lower_bound, gap_rank1};
use grassgap::relations::{self, perp_chain, sharp_chain, AdmissibilityModel};
use grassgap::{halmos_decompose, sampling, Projection, ScalarField};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::report::{real, reals, InputLog};
use crate::{ConfigArg, Field, GapMethod, OracleArg, Pair, RelationArg};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input.
    Input(String),
    Core(grassgap::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<grassgap::Error> for CliError {
    fn from(e: grassgap::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub outputs: Value,
    pub residuals: Map<String, Value>,
}

fn outcome(outputs: Value, residuals: &[(&str, f64)]) -> Outcome {
    Outcome {
        outputs,
        residuals: residuals.iter().map(|&(k, v)| (k.to_string(), real(v))).collect(),
    }
}

fn read(log: &mut InputLog, name: &str, path: &Path) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    log.file(name, &bytes);
    Ok(bytes)
}

fn utf8(bytes: Vec<u8>, name: &str) -> Result<String> {
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("--{name} is not UTF-8")))
}

fn load_matrix(log: &mut InputLog, name: &str, path: &Path) -> Result<MatrixJson> {
    let text = utf8(read(log, name, path)?, name)?;
    Ok(parse_matrix(&text)?)
}

fn load_projection(log: &mut InputLog, name: &str, path: &Path) -> Result<Projection> {
    let text = utf8(read(log, name, path)?, name)?;
    Ok(grassgap::json::parse_projection(&text)?)
}

fn load_pair(log: &mut InputLog, pair: &Pair) -> Result<(Projection, Projection)> {
    Ok((load_projection(log, "p", &pair.p)?, load_projection(log, "q", &pair.q)?))
}

/// JSON given inline (starting with `{`) or as a path to a file.
fn load_json<T: DeserializeOwned>(log: &mut InputLog, name: &str, arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        log.file(name, arg.as_bytes());
        arg.to_string()
    } else {
        utf8(read(log, name, Path::new(arg))?, name)?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("--{name}: {e}")))
}

fn mat(p: &Projection) -> Value {
    to_value(&projection_to_json(p))
}

fn raw(m: &CMat, field: ScalarField) -> Value {
    to_value(&MatrixJson::from_matrix(m, field))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn field_of(f: Field) -> ScalarField {
    match f {
        Field::Real => ScalarField::Real,
        Field::Complex => ScalarField::Complex,
    }
}

fn distance(a: &CMat, b: &CMat) -> f64 {
    linalg::op_norm(&(a - b))
}

fn trace_drift(p: &Projection) -> f64 {
    (p.matrix().trace().re - p.rank() as f64).abs()
}

pub fn decompose(log: &mut InputLog, pair: &Pair, tol: Option<f64>) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    let tol = tol.unwrap_or(TOL_GEN);
    log.param("tol", real(tol));
    let form = halmos_decompose(&p, &q, tol)?;
    let d = form.dims();
    let pythagoras = form
        .sines()
        .iter()
        .zip(form.cosines())
        .map(|(s, c)| (s * s + c * c - 1.0).abs())
        .fold(0.0, f64::max);
    let outputs = json!({
        "dims": {"d1": d.d1, "d2": d.d2, "d3": d.d3, "d4": d.d4, "k": d.k},
        "rank_p": p.rank(),
        "rank_q": q.rank(),
        "sines": reals(form.sines()),
        "cosines": reals(form.cosines()),
        "principal_angles": reals(&angles_of(&form).angles),
        "form": to_value(&form.to_json()),
    });
    Ok(outcome(
        outputs,
        &[
            ("reconstruction", form.reconstruction_residual(&p, &q)),
            ("frame_unitarity", linalg::orthonormality_residual(form.w())),
            ("pythagoras", pythagoras),
        ],
    ))
}

pub fn gap(log: &mut InputLog, pair: &Pair, method: GapMethod, tol: Option<f64>) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    log.param("method", json!(format!("{method:?}").to_lowercase()));
    let tol = tol.unwrap_or(TOL_GEN);
    log.param("tol", real(tol));
    let direct = gap_direct(&p, &q)?;
    let formula = || -> Result<f64> { Ok(grassgap::metric::gap_from_form(&halmos_decompose(&p, &q, tol)?)) };
    let (outputs, residuals) = match method {
        GapMethod::Direct => (
            json!({"direct": real(direct)}),
            vec![("symmetry", (direct - gap_direct(&q, &p)?).abs())],
        ),
        GapMethod::Formula => {
            let f = formula()?;
            (json!({"formula": real(f)}), vec![("agreement_with_direct", (f - direct).abs())])
        }
        GapMethod::Lower => {
            let lb = gap_lower_bound(&p, &q)?;
            (json!({"lower_bound": real(lb)}), vec![("excess_over_gap", (lb - direct).max(0.0))])
        }
        GapMethod::Rank1 => {
            let r = gap_rank1(&p, &q)?;
            (json!({"rank1": real(r)}), vec![("agreement_with_direct", (r - direct).abs())])
        }
        GapMethod::Both => {
            let f = formula()?;
            (
                json!({"direct": real(direct), "formula": real(f)}),
                vec![("agreement", (f - direct).abs())],
            )
        }
    };
    Ok(outcome(outputs, &residuals))
}

fn samples(path: &GeodesicPath, thetas: &[f64]) -> Result<Value> {
    let mut out = Vec::with_capacity(thetas.len());
    for &t in thetas {
        out.push(json!({"theta": real(t), "matrix": mat(&path.eval(t)?)}));
    }
    Ok(Value::Array(out))
}

fn endpoint_residual(path: &GeodesicPath, ends: &[(f64, &Projection)]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &(t, want) in ends {
        worst = worst.max(distance(path.eval(t)?.matrix(), want.matrix()));
    }
    Ok(worst)
}

/// The sample times plus the endpoints, sorted, for the distance-law check.
fn law_grid(thetas: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = thetas.iter().copied().chain([0.0, FRAC_PI_2]).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn geodesic(log: &mut InputLog, pair: &Pair, theta: Option<f64>, grid: Option<usize>) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    let thetas = match (theta, grid) {
        (Some(t), _) => {
            log.param("theta", real(t));
            vec![t]
        }
        (None, Some(n)) => {
            log.param("grid", json!(n));
            uniform_grid(n)
        }
        (None, None) => return Err(CliError::Input("one of --theta or --grid is required".into())),
    };
    let path = grassgap::geodesics::geodesic(&p, &q)?;
    let outputs = json!({
        "psi": real(path.psi()),
        "rank": path.rank(),
        "samples": samples(&path, &thetas)?,
    });
    Ok(outcome(
        outputs,
        &[
            ("endpoints", endpoint_residual(&path, &[(0.0, &p), (FRAC_PI_2, &q)])?),
            ("distance_law", path.law_residual(&law_grid(&thetas))?),
        ],
    ))
}

pub fn midpoint(log: &mut InputLog, pair: &Pair, theta: f64, u: Option<&Path>) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    log.param("theta", real(theta));
    if !midpoint_feasible(&p, &q, theta)? {
        let d = halmos_decompose(&p, &q, TOL_GEN)?.dims();
        return Ok(outcome(
            json!({"feasible": false, "d1": d.d1, "d2": d.d2, "r": null}),
            &[],
        ));
    }
    let u = match u {
        Some(path) => load_matrix(log, "u", path)?.to_matrix()?,
        None => linalg::identity(halmos_decompose(&p, &q, TOL_GEN)?.dims().d1),
    };
    let spec = MidpointSpec { theta, u, tail: None };
    let r = spec.assemble(&p, &q)?;
    let (to_p, to_q) = (gap_direct(&r, &p)?, gap_direct(&r, &q)?);
    let outputs = json!({
        "feasible": true,
        "r": mat(&r),
        "rank": r.rank(),
        "gap_to_p": real(to_p),
        "gap_to_q": real(to_q),
    });
    Ok(outcome(
        outputs,
        &[
            ("gap_to_p_vs_sin", (to_p - theta.sin()).abs()),
            ("gap_to_q_vs_cos", (to_q - theta.cos()).abs()),
            ("idempotency", r.idempotency_residual()),
            ("trace", trace_drift(&r)),
        ],
    ))
}

pub fn three_point(
    log: &mut InputLog,
    pair: &Pair,
    r_path: &Path,
    grid: usize,
    probe: Option<(&Path, f64)>,
) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    let r = load_projection(log, "r", r_path)?;
    log.param("grid", json!(grid));
    let path = three_point_geodesic(&p, &q, &r)?;
    let thetas = uniform_grid(grid);
    let mut outputs = json!({
        "psi": real(path.psi()),
        "rank": path.rank(),
        "samples": samples(&path, &thetas)?,
    });
    let mut residuals = vec![
        ("interpolation", endpoint_residual(&path, &[(0.0, &p), (FRAC_PI_4, &r), (FRAC_PI_2, &q)])?),
        ("distance_law", path.law_residual(&law_grid(&thetas))?),
    ];
    if let Some((v_path, theta)) = probe {
        log.param("theta", real(theta));
        let v = load_matrix(log, "v", v_path)?.to_matrix()?;
        let pr = uniqueness_probe(&p, &q, &r, &v, theta)?;
        outputs["probe"] = json!({
            "theta": real(pr.theta),
            "distance_to_midpoint": real(pr.distance_to_midpoint),
            "distance_to_path": real(pr.distance_to_path),
            "law": real(pr.law),
            "lower_bound": real(pr.lower_bound),
            "margin": real(pr.distance_to_midpoint - pr.lower_bound),
        });
        residuals.push(("probe_unitarity", linalg::orthonormality_residual(&v)));
    }
    Ok(outcome(outputs, &residuals))
}

pub fn branch(log: &mut InputLog, config: ConfigArg, params: &str, f1: &str, f2: &str, grid: usize) -> Result<Outcome> {
    let config = match config {
        ConfigArg::ExtraBlocks => BranchConfig::ExtraBlocks,
        ConfigArg::GenericSubcritical => BranchConfig::GenericSubcritical,
        ConfigArg::CriticalSine => BranchConfig::CriticalSine,
    };
    log.param("config", to_value(&config));
    log.param("grid", json!(grid));
    let params: BranchParams = load_json(log, "params", params)?;
    let f1 = ReparamFunction::from_json(&load_json::<ReparamJson>(log, "f1", f1)?)?;
    let f2 = ReparamFunction::from_json(&load_json::<ReparamJson>(log, "f2", f2)?)?;
    let b = branching_pair(config, &params, &f1, &f2)?;
    let g = uniform_grid(grid);
    let outputs = json!({
        "p": mat(&b.p),
        "q": mat(&b.q),
        "r": mat(&b.r),
        "psi": reals(&[b.paths[0].psi(), b.paths[1].psi()]),
        "separation": real(b.separation(&separation_grid())?),
    });
    Ok(outcome(
        outputs,
        &[
            ("interpolation", b.interpolation_residual()?),
            ("distance_law_1", b.paths[0].law_residual(&g)?),
            ("distance_law_2", b.paths[1].law_residual(&g)?),
        ],
    ))
}

pub fn chain(
    log: &mut InputLog,
    pair: &Pair,
    relation: RelationArg,
    margin: usize,
    tol: Option<f64>,
) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    let tol = tol.unwrap_or(relations::TOL_REL);
    log.param("margin", json!(margin));
    log.param("tol", real(tol));
    let model = AdmissibilityModel::new(p.dim(), margin)?;
    let c = match relation {
        RelationArg::Perp => {
            log.param("relation", json!("perp"));
            perp_chain(&p, &q, &model)?
        }
        RelationArg::Sharp => {
            log.param("relation", json!("sharp"));
            sharp_chain(&p, &q, &model)?
        }
    };
    let worst = c.validate(&model, tol)?;
    let outputs = json!({
        "links": c.len(),
        "ranks": c.nodes.iter().map(|n| n.rank()).collect::<Vec<_>>(),
        "chain": to_value(&c.to_json()),
    });
    Ok(outcome(outputs, &[("max_link", worst)]))
}

pub fn edmon(log: &mut InputLog, pair: &Pair, r_path: &Path, x_path: &Path, theta: f64) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    let r = load_projection(log, "r", r_path)?;
    let xj = load_matrix(log, "x", x_path)?;
    log.param("theta", real(theta));
    let x = xj.to_matrix()?;
    if x.ncols() != 1 {
        return Err(CliError::Input(format!("--x must be a column vector, got {}x{}", x.nrows(), x.ncols())));
    }
    let cert = edmon_extract(&p, &q, &r, &x.column(0).into_owned(), theta)?;
    let field = if [p.field(), q.field(), r.field(), xj.field].iter().all(|f| f.is_real()) {
        ScalarField::Real
    } else {
        ScalarField::Complex
    };
    let y = CMat::from_iterator(cert.y.len(), 1, cert.y.iter().copied());
    let outputs = json!({
        "y": raw(&y, field),
        "r1": real(cert.r1),
        "cos2_theta": real(theta.cos().powi(2)),
    });
    let mut out = outcome(outputs, &[("max_abs", cert.residuals.max_abs())]);
    if let Value::Object(parts) = to_value(&cert.residuals) {
        out.residuals.extend(parts);
    }
    Ok(out)
}

/// Random projections of every rank, each followed by one inside its
/// kernel so that `∼` holds for some pairs.
fn probe_set(n: usize, count: usize, field: ScalarField, seed: u64) -> Result<Vec<Projection>> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(2 * count);
    for i in 0..count {
        let p = sampling::random_projection(&mut rng, n, i % (n + 1), field)?;
        let c = p.corank();
        if c > 0 {
            let b = p.kernel().columns() * sampling::random_isometry(&mut rng, c, 1 + i % c, field);
            out.push(p);
            out.push(Projection::validate(&b * b.adjoint(), field, 1e-10)?);
        } else {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn verify_map(
    log: &mut InputLog,
    spec_path: &Path,
    seed: u64,
    samples: usize,
    field: Option<Field>,
    p_path: Option<&Path>,
) -> Result<Outcome> {
    let text = utf8(read(log, "spec", spec_path)?, "spec")?;
    let sj: IsometrySpecJson = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("--spec: {e}")))?;
    let spec = IsometrySpec::from_json(&sj)?;
    let field = field.map_or(sj.u.field, field_of);
    log.param("seed", json!(seed));
    log.param("samples", json!(samples));
    log.param("field", json!(field.to_string()));

    let points = probe_set(spec.dim(), samples, field, seed)?;
    let pairs = points
        .iter()
        .map(|x| Ok((x.clone(), apply_isometry(&spec, x)?)))
        .collect::<Result<Vec<_>>>()?;
    let gap_residual = isometry::isometry_residual(&pairs)?;
    let tol = relations::TOL_REL;
    let (mut sim_pairs, mut sim_mismatches, mut perp_pairs, mut perp_broken) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, fa) = &pairs[i];
            let (b, fb) = &pairs[j];
            let before = relations::is_sim(a, b, tol)?;
            sim_pairs += before as usize;
            if before != relations::is_sim(fa, fb, tol)? {
                sim_mismatches += 1;
            }
            if relations::is_orthogonal(a, b, tol)? {
                perp_pairs += 1;
                perp_broken += !relations::is_orthogonal(fa, fb, tol)? as usize;
            }
        }
    }
    let mut outputs = json!({
        "kind": spec.kind().as_str(),
        "normalized": spec.normalized(),
        "points": points.len(),
        "gap_preserved": gap_residual <= 1e-10,
        "sim_pairs": sim_pairs,
        "sim_mismatches": sim_mismatches,
        "orthogonal_pairs": perp_pairs,
        "orthogonality_broken": perp_broken,
    });
    let mut residuals = vec![("gap_change", gap_residual)];
    if let Some(path) = p_path {
        let p = load_projection(log, "p", path)?;
        let image = apply_isometry(&spec, &p)?;
        residuals.push(("image_idempotency", image.idempotency_residual()));
        outputs["image"] = mat(&image);
    }
    Ok(outcome(outputs, &residuals))
}

pub fn classify(
    log: &mut InputLog,
    oracle: OracleArg,
    spec_path: Option<&Path>,
    dim: Option<usize>,
    field: Option<Field>,
    samples: usize,
    seed: u64,
) -> Result<Outcome> {
    let spec = match spec_path {
        Some(path) if oracle == OracleArg::Spec => {
            let text = utf8(read(log, "spec", path)?, "spec")?;
            let sj: IsometrySpecJson =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("--spec: {e}")))?;
            Some((IsometrySpec::from_json(&sj)?, sj.u.field))
        }
        _ => None,
    };
    let (spec, declared) = match spec {
        Some((s, f)) => (Some(s), f),
        None => (None, ScalarField::Complex),
    };
    let n = match (&spec, dim) {
        (Some(s), _) => s.dim(),
        (None, Some(n)) => n,
        (None, None) => return Err(CliError::Input("--dim is required for built-in oracles".into())),
    };
    let field = field.map_or(declared, field_of);
    log.param("oracle", json!(format!("{oracle:?}").to_lowercase()));
    log.param("dim", json!(n));
    log.param("field", json!(field.to_string()));
    log.param("samples", json!(samples));
    log.param("seed", json!(seed));

    let map = |p: &Projection| -> grassgap::Result<Projection> {
        match (oracle, &spec) {
            (OracleArg::Spec, Some(s)) => apply_isometry(s, p),
            (OracleArg::Complement, _) => Ok(p.complement()),
            (OracleArg::Conjugate, _) => Ok(p.entrywise_conj()),
            _ => Ok(p.clone()),
        }
    };
    let cls = classify_map(&map, n, field, samples, seed)?;

    // Held-out projections the classifier never saw.
    let mut rng = sampling::rng(seed.wrapping_add(1));
    let mut held_out = 0.0_f64;
    for i in 0..10 {
        let p = sampling::random_projection(&mut rng, n, i % (n + 1), field)?;
        held_out = held_out.max(distance(apply_isometry(&cls.spec, &p)?.matrix(), map(&p)?.matrix()));
    }
    let per_kind: Vec<Value> = cls
        .per_kind
        .iter()
        .map(|(k, r)| json!({"kind": k.as_str(), "residual": real(*r)}))
        .collect();
    let outputs = json!({
        "kind": cls.spec.kind().as_str(),
        "ambiguous": cls.ambiguous,
        "spec": to_value(&cls.spec.to_json()),
        "per_kind": per_kind,
    });
    Ok(outcome(outputs, &[("fit", cls.residual), ("held_out", held_out)]))
}

pub fn counterexample(log: &mut InputLog, k: usize) -> Result<Outcome> {
    log.param("k", json!(k));
    let c = orthogonality_counterexample(k)?;
    let outputs = json!({
        "p": mat(&c.p),
        "q": mat(&c.q),
        "phi_p": mat(&c.phi_p),
        "phi_q": mat(&c.phi_q),
        "pq_norm": real(c.pq_norm),
        "phi_product_norm": real(c.phi_product_norm),
        "gap_pq": real(c.gap_pq),
        "gap_phi": real(c.gap_phi),
        "orthogonal_before": c.orthogonal_before,
        "orthogonal_after": c.orthogonal_after,
        "sim_before": c.sim_before,
        "sim_after": c.sim_after,
    });
    Ok(outcome(
        outputs,
        &[
            ("pq_norm", c.pq_norm),
            ("phi_product_vs_one", (c.phi_product_norm - 1.0).abs()),
            ("gap_change", (c.gap_pq - c.gap_phi).abs()),
        ],
    ))
}

pub fn stratum(log: &mut InputLog, p_path: &Path, margin: usize) -> Result<Outcome> {
    let p = load_projection(log, "p", p_path)?;
    log.param("margin", json!(margin));
    let model = AdmissibilityModel::new(p.dim(), margin)?;
    let label = isometry::stratum(&p, &model)?;
    let outputs = json!({
        "label": label.to_string(),
        "stratum": to_value(&label),
        "rank": p.rank(),
        "corank": p.corank(),
    });
    Ok(outcome(outputs, &[("trace", trace_drift(&p))]))
}

pub fn connect(log: &mut InputLog, pair: &Pair) -> Result<Outcome> {
    let (p, q) = load_pair(log, pair)?;
    let c = connect_chain_lt1(&p, &q)?;
    let outputs = json!({
        "nodes": c.nodes.iter().map(mat).collect::<Vec<_>>(),
        "links": reals(&c.links),
        "delta": real(c.delta),
        "direct_gap": real(gap_direct(&p, &q)?),
    });
    let idem = c.nodes.iter().map(|n| n.idempotency_residual()).fold(0.0, f64::max);
    let drift = c.nodes.iter().map(trace_drift).fold(0.0, f64::max);
    Ok(outcome(outputs, &[("node_idempotency", idem), ("node_trace", drift)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_grid_adds_endpoints_once() {
        assert_eq!(law_grid(&[0.3]), vec![0.0, 0.3, FRAC_PI_2]);
        assert_eq!(law_grid(&uniform_grid(3)).len(), 3);
    }

    #[test]
    fn probe_set_pairs_each_point_with_a_kernel_partner() {
        let pts = probe_set(4, 5, ScalarField::Complex, 9).unwrap();
        // Ranks 0..=4; the full-rank one has no kernel partner.
        assert_eq!(pts.len(), 9);
        assert!(relations::is_orthogonal(&pts[0], &pts[1], 1e-9).unwrap());
    }

    #[test]
    fn exit_codes_split_input_from_numerics() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(grassgap::Error::DegeneratePair).exit_code(), 2);
        assert_eq!(CliError::Core(grassgap::Error::CapacityExhausted("x".into())).exit_code(), 3);
    }
}

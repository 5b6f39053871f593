//! End-to-end acceptance checks. Runs as a plain binary (no libtest harness)
//! so every criterion prints exactly one PASS/FAIL line, then exits non-zero
//! if any failed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use grassgap::geodesics::{
    branching_pair_in_frame, geodesic, midpoint_element, midpoint_feasible, three_point_geodesic, uniform_grid,
    uniqueness_probe, BranchConfig, BranchParams, MidpointSpec, ReparamFunction,
};
use grassgap::halmos::halmos_decompose;
use grassgap::isometry::{
    apply_isometry, classify_map, connect_chain_lt1, isometry_residual, orthogonality_counterexample, IsometryKind,
    IsometrySpec,
};
use grassgap::linalg::{self, CMat};
use grassgap::metric::{gap_direct, gap_formula, gap_lower_bound};
use grassgap::relations::{perp_chain, sharp_chain, AdmissibilityModel};
use grassgap::sampling::{self, SeededRng};
use grassgap::{BlockDims, Error, Projection, ScalarField};
use num_complex::Complex;
use rand::Rng;

type Check = std::result::Result<String, String>;

fn field_of(i: usize) -> ScalarField {
    if i % 2 == 0 {
        ScalarField::Real
    } else {
        ScalarField::Complex
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<T>(r: grassgap::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_dims(rng: &mut SeededRng, max_fixed: usize, max_k: usize) -> BlockDims {
    BlockDims::new(
        rng.random_range(0..=max_fixed),
        rng.random_range(0..=max_fixed),
        rng.random_range(0..=max_fixed),
        rng.random_range(0..=max_fixed),
        rng.random_range(0..=max_k),
    )
}

fn planted(rng: &mut SeededRng, dims: BlockDims, field: ScalarField) -> (Projection, Projection) {
    let sines = sampling::random_sines(rng, dims.k, 0.05, 0.95);
    let (p, q, _) = sampling::planted_pair(rng, dims, &sines, field);
    (p, q)
}

fn gap_formula_equivalence() -> Check {
    let mut rng = sampling::rng(101);
    let (mut worst, mut worst_lower) = (0.0_f64, f64::NEG_INFINITY);
    for i in 0..1000 {
        let field = field_of(i);
        let (p, q) = if i % 5 < 3 {
            let n = rng.random_range(1..=9);
            let rp = rng.random_range(0..=n);
            let rq = rng.random_range(0..=n);
            (
                e2s(sampling::random_projection(&mut rng, n, rp, field))?,
                e2s(sampling::random_projection(&mut rng, n, rq, field))?,
            )
        } else {
            let mut dims = random_dims(&mut rng, 3, 3);
            if dims.total() == 0 {
                dims.d1 = 1;
            }
            planted(&mut rng, dims, field)
        };
        let direct = e2s(gap_direct(&p, &q))?;
        let formula = e2s(gap_formula(&p, &q))?;
        let lower = e2s(gap_lower_bound(&p, &q))?;
        worst = worst.max((formula - direct).abs());
        worst_lower = worst_lower.max(lower - direct);
    }
    ensure(worst <= 1e-9, || format!("max |formula − direct| = {worst:.3e}"))?;
    ensure(worst_lower <= 1e-10, || format!("lower bound exceeds gap by {worst_lower:.3e}"))?;
    Ok(format!(
        "1000 pairs, max |formula − direct| = {worst:.2e}, max (lower − gap) = {worst_lower:.2e}"
    ))
}

fn halmos_round_trip() -> Check {
    let mut rng = sampling::rng(202);
    let mut worst = 0.0_f64;
    for i in 0..500 {
        let field = field_of(i);
        let (p, q) = if i % 2 == 0 {
            let n = rng.random_range(2..=12);
            let rp = rng.random_range(0..=n);
            let rq = rng.random_range(0..=n);
            (
                e2s(sampling::random_projection(&mut rng, n, rp, field))?,
                e2s(sampling::random_projection(&mut rng, n, rq, field))?,
            )
        } else {
            let mut dims = random_dims(&mut rng, 3, 4);
            if dims.total() == 0 {
                dims.k = 1;
            }
            planted(&mut rng, dims, field)
        };
        let form = e2s(halmos_decompose(&p, &q, 1e-8))?;
        worst = worst.max(form.reconstruction_residual(&p, &q));
        let w = sampling::haar_unitary(&mut rng, p.dim(), field);
        let moved = e2s(halmos_decompose(&p.conjugate_by(&w), &q.conjugate_by(&w), 1e-8))?;
        ensure(moved.dims() == form.dims(), || {
            format!(
                "pair {i}: dims {:?} became {:?} after conjugation",
                form.dims().as_array(),
                moved.dims().as_array()
            )
        })?;
    }
    ensure(worst <= 1e-8, || format!("max reconstruction residual {worst:.3e}"))?;
    Ok(format!("500 pairs, max residual = {worst:.2e}, dims conjugation-invariant"))
}

fn geodesic_distance_law() -> Check {
    let mut rng = sampling::rng(303);
    let grid = uniform_grid(64);
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let field = field_of(i);
        let n = rng.random_range(4..=10);
        let r = rng.random_range(1..=n / 2);
        let p = e2s(sampling::random_projection(&mut rng, n, r, field))?;
        let q = e2s(sampling::random_projection(&mut rng, n, r, field))?;
        let path = e2s(geodesic(&p, &q))?;
        worst = worst.max(e2s(path.law_residual(&grid))?);
    }
    ensure(worst <= 1e-8, || format!("max law residual {worst:.3e}"))?;
    Ok(format!("50 pairs on a 64-point grid, max residual = {worst:.2e}"))
}

fn midpoint_set() -> Check {
    let mut rng = sampling::rng(404);
    let mut worst = 0.0_f64;
    let mut assembled = 0;
    for i in 0..100 {
        let field = field_of(i);
        let h = rng.random_range(1..=3);
        let dims = BlockDims::new(h, h, rng.random_range(0..=2), rng.random_range(0..=2), rng.random_range(0..=3));
        let (p, q) = planted(&mut rng, dims, field);
        let theta = rng.random_range(0.05..FRAC_PI_2 - 0.05);
        ensure(e2s(midpoint_feasible(&p, &q, theta))?, || format!("pair {i}: equal dims reported infeasible"))?;
        let spec = MidpointSpec {
            theta,
            u: sampling::haar_unitary(&mut rng, h, field),
            tail: None,
        };
        let r = e2s(spec.assemble(&p, &q))?;
        worst = worst.max((e2s(gap_direct(&r, &p))? - theta.sin()).abs());
        worst = worst.max((e2s(gap_direct(&r, &q))? - theta.cos()).abs());
        assembled += 1;
    }
    ensure(worst <= 1e-8, || format!("max distance error {worst:.3e}"))?;
    let mut mismatches = 0;
    for i in 0..100 {
        let field = field_of(i);
        let d1 = rng.random_range(0..=3);
        let mut d2 = rng.random_range(0..=3);
        if d2 == d1 {
            d2 = d1 + 1;
        }
        let dims = BlockDims::new(d1, d2, rng.random_range(0..=2), rng.random_range(0..=2), rng.random_range(0..=3));
        let (p, q) = planted(&mut rng, dims, field);
        if e2s(midpoint_feasible(&p, &q, FRAC_PI_4))? {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} unequal-dims pairs reported feasible"))?;
    Ok(format!(
        "{assembled} midpoints, max distance error = {worst:.2e}; 100/100 unequal pairs infeasible"
    ))
}

fn three_point() -> Check {
    let mut rng = sampling::rng(505);
    let grid = uniform_grid(64);
    let (mut interp, mut law) = (0.0_f64, 0.0_f64);
    for i in 0..20 {
        let field = field_of(i);
        let h = rng.random_range(1..=3);
        let d4 = rng.random_range(0..=3);
        let (mut p, mut q) = planted(&mut rng, BlockDims::new(h, h, 0, d4, 0), field);
        let u = sampling::haar_unitary(&mut rng, h, field);
        let mut r = e2s(midpoint_element(&p, &q, FRAC_PI_4, &u, None))?;
        if i % 4 == 3 {
            (p, q, r) = (p.complement(), q.complement(), r.complement());
        }
        let g = e2s(three_point_geodesic(&p, &q, &r))?;
        for (t, want) in [(0.0, &p), (FRAC_PI_4, &r), (FRAC_PI_2, &q)] {
            interp = interp.max(linalg::op_norm(&(e2s(g.eval(t))?.matrix() - want.matrix())));
        }
        law = law.max(e2s(g.law_residual(&grid))?);
    }
    ensure(interp <= 1e-8, || format!("interpolation error {interp:.3e}"))?;
    ensure(law <= 1e-8, || format!("law residual {law:.3e}"))?;

    let mut min_margin = f64::INFINITY;
    for i in 0..20 {
        let field = ScalarField::Complex;
        let h = 1 + i % 3;
        let (p, q) = planted(&mut rng, BlockDims::new(h, h, 0, i % 2, 0), field);
        let r = e2s(midpoint_element(&p, &q, FRAC_PI_4, &linalg::identity(h), None))?;
        // V with every eigenphase at least 0.4 away from 0.
        let basis = sampling::haar_unitary(&mut rng, h, field);
        let phases: Vec<f64> = (0..h)
            .map(|_| rng.random_range(0.4..std::f64::consts::PI) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let d = CMat::from_fn(h, h, |a, b| if a == b { Complex::from_polar(1.0, phases[a]) } else { linalg::ZERO });
        let v = &basis * d * basis.adjoint();
        let theta = rng.random_range(0.15..FRAC_PI_2 - 0.15);
        let probe = e2s(uniqueness_probe(&p, &q, &r, &v, theta))?;
        let margin = probe.distance_to_midpoint - probe.law;
        min_margin = min_margin.min(margin);
    }
    ensure(min_margin >= 1e-3, || format!("uniqueness margin only {min_margin:.3e}"))?;
    Ok(format!(
        "20 triples, interpolation {interp:.2e}, law {law:.2e}; 20 twisted midpoints, min margin {min_margin:.3e}"
    ))
}

fn branching() -> Check {
    let mut rng = sampling::rng(606);
    let grid = uniform_grid(64);
    let zero = ReparamFunction::Pwl { knots: vec![(0.0, 0.0)] };
    let bump = ReparamFunction::Triangle {
        start: 0.0,
        end: FRAC_PI_4,
        height: FRAC_PI_8,
    };
    let q4 = FRAC_PI_4;
    let fast = ReparamFunction::Pwl {
        knots: vec![(0.0, 0.0), (q4 / 2.0, q4), (q4, q4), (1.5 * q4, q4), (FRAC_PI_2, FRAC_PI_2)],
    };
    let cases = [
        (
            BranchConfig::ExtraBlocks,
            BranchParams { l: 1, d3: 2, d4: 2, ..Default::default() },
            zero,
            bump,
        ),
        (
            BranchConfig::GenericSubcritical,
            BranchParams { l: 1, d3: 1, d4: 1, sines: vec![0.3, 0.5], ..Default::default() },
            ReparamFunction::Identity,
            fast.clone(),
        ),
        (
            BranchConfig::CriticalSine,
            BranchParams { l: 0, critical: 1, d3: 0, d4: 1, sines: vec![0.5] },
            ReparamFunction::Identity,
            fast,
        ),
    ];
    let mut lines = Vec::new();
    for (i, (config, params, f1, f2)) in cases.iter().enumerate() {
        let field = field_of(i + 1);
        let w = sampling::haar_unitary(&mut rng, params.dim(), field);
        let b = e2s(branching_pair_in_frame(*config, params, f1, f2, Some(&w), field))?;
        let law = b
            .paths
            .iter()
            .map(|g| g.law_residual(&grid))
            .collect::<grassgap::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .fold(0.0, f64::max);
        let sep = e2s(b.separation(&grassgap::geodesics::separation_grid()))?;
        let interp = e2s(b.interpolation_residual())?;
        ensure(law <= 1e-8, || format!("{config:?}: law residual {law:.3e}"))?;
        ensure(interp <= 1e-8, || format!("{config:?}: interpolation residual {interp:.3e}"))?;
        ensure(sep > 0.05, || format!("{config:?}: separation {sep:.3e}"))?;
        lines.push(format!("{config:?} law {law:.1e} sep {sep:.3}"));
    }
    Ok(lines.join("; "))
}

fn chains() -> Check {
    let model = AdmissibilityModel::new(16, 4).unwrap();
    let mut rng = sampling::rng(707);
    let (mut perp_max, mut sharp_max) = (0.0_f64, 0.0_f64);
    let mut longest = 0;
    for i in 0..200 {
        let field = field_of(i);
        // Any ♯ neighbour has rank ≥ m, so endpoints need rank ≤ N − 2m.
        let rp = rng.random_range(4..=8);
        let rq = rng.random_range(4..=8);
        let p = e2s(sampling::random_projection(&mut rng, 16, rp, field))?;
        let q = if i % 20 == 0 {
            p.clone()
        } else {
            e2s(sampling::random_projection(&mut rng, 16, rq, field))?
        };
        let c = e2s(perp_chain(&p, &q, &model))?;
        perp_max = perp_max.max(e2s(c.validate(&model, 1e-9))?);
        let s = e2s(sharp_chain(&p, &q, &model))?;
        sharp_max = sharp_max.max(e2s(s.validate(&model, 1e-9))?);
        for ch in [&c, &s] {
            ensure(ch.len() <= 3, || format!("pair {i}: chain of length {}", ch.len()))?;
            ensure(
                ch.nodes[0].matrix() == p.matrix() && ch.nodes.last().unwrap().matrix() == q.matrix(),
                || format!("pair {i}: endpoints moved"),
            )?;
            longest = longest.max(ch.len());
        }
    }
    let small = AdmissibilityModel::new(6, 3).unwrap();
    for i in 0..10 {
        let field = field_of(i);
        let p = e2s(sampling::random_projection(&mut rng, 6, 3, field))?;
        let q = e2s(sampling::random_projection(&mut rng, 6, 3, field))?;
        match sharp_chain(&p, &q, &small) {
            Err(Error::CapacityExhausted(_)) => {}
            other => return Err(format!("N=6, m=3: expected CapacityExhausted, got {other:?}")),
        }
    }
    Ok(format!(
        "200 pairs at N=16, m=4: max link ‖PQ‖ perp {perp_max:.1e}, sharp {sharp_max:.1e}, longest j = {longest}; \
         N=6, m=3 exhausted 10/10"
    ))
}

fn isometry_classification() -> Check {
    let n = 8;
    let mut worst_fit = 0.0_f64;
    let mut worst_held = 0.0_f64;
    let mut worst_iso = 0.0_f64;
    let mut count = 0;
    for (ki, &kind) in IsometryKind::ALL.iter().enumerate() {
        for j in 0..50 {
            let seed = 1000 * ki as u64 + j as u64;
            let truth = e2s(IsometrySpec::random(kind, n, ScalarField::Complex, seed))?;
            let oracle = |p: &Projection| apply_isometry(&truth, p);
            let c = e2s(classify_map(&oracle, n, ScalarField::Complex, 6, seed + 7))?;
            ensure(c.spec.kind() == kind, || format!("spec {seed}: {kind} classified as {}", c.spec.kind()))?;
            worst_fit = worst_fit.max(c.residual);
            let mut rng = sampling::rng(seed + 13);
            let mut sample = Vec::new();
            for r in 1..n {
                let p = e2s(sampling::random_projection(&mut rng, n, r, ScalarField::Complex))?;
                let truth_image = e2s(apply_isometry(&truth, &p))?;
                let fit_image = e2s(apply_isometry(&c.spec, &p))?;
                worst_held = worst_held.max(linalg::op_norm(&(truth_image.matrix() - fit_image.matrix())));
                sample.push((p, truth_image));
            }
            worst_iso = worst_iso.max(e2s(isometry_residual(&sample))?);
            count += 1;
        }
    }
    ensure(worst_held <= 1e-8, || format!("held-out action error {worst_held:.3e}"))?;
    ensure(worst_iso <= 1e-10, || format!("isometry residual {worst_iso:.3e}"))?;
    let ce = e2s(orthogonality_counterexample(2))?;
    ensure(ce.pq_norm == 0.0, || format!("‖PQ‖ = {}", ce.pq_norm))?;
    ensure((ce.phi_product_norm - 1.0).abs() <= 1e-12, || {
        format!("‖φ(P)φ(Q)‖ = {}", ce.phi_product_norm)
    })?;
    let pairs = vec![(ce.p.clone(), ce.phi_p.clone()), (ce.q.clone(), ce.phi_q.clone())];
    let ce_iso = e2s(isometry_residual(&pairs))?;
    ensure(ce_iso <= 1e-10, || format!("counterexample isometry residual {ce_iso:.3e}"))?;
    Ok(format!(
        "{count} specs, max fit {worst_fit:.1e}, held-out {worst_held:.1e}, isometry residual {worst_iso:.1e}; \
         counterexample ‖PQ‖ = 0, ‖φPφQ‖ = 1"
    ))
}

fn stratification() -> Check {
    let mut rng = sampling::rng(909);
    let mut worst = 0.0_f64;
    for i in 0..200 {
        let field = field_of(i);
        let n = rng.random_range(2..=12);
        let rp = rng.random_range(0..=n);
        let mut rq = rng.random_range(0..=n);
        if rq == rp {
            rq = if rp == n { rp - 1 } else { rp + 1 };
        }
        let p = e2s(sampling::random_projection(&mut rng, n, rp, field))?;
        let q = e2s(sampling::random_projection(&mut rng, n, rq, field))?;
        worst = worst.max((e2s(gap_direct(&p, &q))? - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("cross-rank gap off 1 by {worst:.3e}"))?;
    let mut max_link = 0.0_f64;
    let mut via_midpoint = 0;
    for i in 0..100 {
        let field = field_of(i);
        let (p, q) = if i % 2 == 0 {
            let h = rng.random_range(1..=3);
            let dims = BlockDims::new(h, h, rng.random_range(0..=2), rng.random_range(0..=2), rng.random_range(0..=2));
            planted(&mut rng, dims, field)
        } else {
            let n = rng.random_range(2..=10);
            let r = rng.random_range(1..n);
            (
                e2s(sampling::random_projection(&mut rng, n, r, field))?,
                e2s(sampling::random_projection(&mut rng, n, r, field))?,
            )
        };
        let chain = e2s(connect_chain_lt1(&p, &q))?;
        if chain.nodes.len() > 2 {
            via_midpoint += 1;
        }
        max_link = max_link.max(chain.links.iter().copied().fold(0.0, f64::max));
    }
    ensure(max_link < 1.0, || format!("a link reached {max_link}"))?;
    Ok(format!(
        "200 cross-rank pairs off by ≤ {worst:.1e}; 100 equal-rank chains ({via_midpoint} via midpoint), max link {max_link:.4}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("gap formula equivalence", gap_formula_equivalence),
        ("canonical form round trip", halmos_round_trip),
        ("geodesic distance law", geodesic_distance_law),
        ("midpoint set", midpoint_set),
        ("three-point geodesic", three_point),
        ("branching geodesics", branching),
        ("orthogonality chains", chains),
        ("isometry classification", isometry_classification),
        ("stratification", stratification),
    ];
    // Keep panic messages out of the report; they surface in the FAIL line.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

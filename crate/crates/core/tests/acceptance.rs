//! One pass/fail line per acceptance criterion. Exits non-zero if any fail.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{Matrix2, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoflux::device;
use topoflux::dynamics::{
    default_dt, evolve, NoiseParams, PulseSchedule, PulseSegment, PulseShape,
};
use topoflux::experiment::output::{to_json, trajectory_csv};
use topoflux::experiment::{
    run_resolved, run_robustness, run_robustness_with, run_sweep, run_sweep_with, simulate_point,
    Execution, Experiment, PointCouplings, ResolvedScenario, ScenarioConfig, SweepAxis,
    SweepConfig, SweepSpec,
};
use topoflux::gates::{
    gate_fidelity, ideal_pulse_unitary, makhlin_invariants, pulse_unitary_from_dynamics,
    synthesize_cp, verify_cp, GateMatrix,
};
use topoflux::hilbert::{DensityMatrix, HilbertSpec, Spin, StateVector, C64};
use topoflux::units::rad_per_ns_to_ghz;

struct Check {
    ok: bool,
    detail: String,
}

fn within(label: &str, value: f64, target: f64, tol: f64) -> Check {
    Check {
        ok: (value - target).abs() <= tol,
        detail: format!("{label}={value:.6} (want {target}±{tol})"),
    }
}

fn rel_within(label: &str, value: f64, target: f64, rel: f64) -> Check {
    Check {
        ok: ((value - target) / target).abs() <= rel,
        detail: format!("{label}={value:.6} (want {target}±{}%)", rel * 100.0),
    }
}

fn in_range(label: &str, value: f64, lo: f64, hi: f64) -> Check {
    Check {
        ok: (lo..=hi).contains(&value),
        detail: format!("{label}={value:.6} (want [{lo}, {hi}])"),
    }
}

fn below(label: &str, value: f64, limit: f64) -> Check {
    Check {
        ok: value < limit,
        detail: format!("{label}={value:.3e} (want <{limit:e})"),
    }
}

fn flag(label: &str, ok: bool, note: String) -> Check {
    Check {
        ok,
        detail: format!("{label}: {note}"),
    }
}

fn config(name: &str) -> ScenarioConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name]
        .iter()
        .collect();
    ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn resolve(name: &str) -> ResolvedScenario {
    ResolvedScenario::from_config(&config(name)).expect("resolves")
}

fn fidelity(name: &str) -> f64 {
    run_resolved(&resolve(name)).expect("runs").summary.fidelity
}

fn ghz(x: f64) -> f64 {
    rad_per_ns_to_ghz(x)
}

fn c1() -> Vec<Check> {
    let r = resolve("fig2a.json");
    let c = r.couplings;
    vec![
        rel_within("omega_f/2pi", ghz(c.omega_f), 50.0, 0.002),
        within("theta", c.theta, 0.052, 0.001),
        within("zeta", c.zeta, 0.145, 0.001),
        within("phi_on", r.device.phi_c, -1.73, 0.01),
        within("Lambda", c.lambda_phi, -7.75, 0.05),
        rel_within(
            "ratio",
            device::ratio_formula(&r.device).unwrap(),
            2.0,
            0.02,
        ),
        in_range("g/2pi", ghz(c.g), -2.1, -2.0),
        in_range("g'/2pi", ghz(c.g_prime), -1.05, -1.0),
    ]
}

fn c2() -> Vec<Check> {
    let r = resolve("alt_params.json");
    let c = r.couplings;
    vec![
        within("theta", c.theta, 0.086, 0.001),
        within("zeta", c.zeta, 0.040, 0.001),
        within("phi_on", r.device.phi_c, -0.646, 0.01),
        rel_within("g'/g", c.g_prime / c.g, 3.0, 0.02),
        rel_within("g'/2pi", ghz(c.g_prime), -6.0, 0.02),
    ]
}

fn c3() -> Vec<Check> {
    vec![within("F1", fidelity("fig2a.json"), 0.993, 0.005)]
}

fn c4() -> Vec<Check> {
    vec![within("F2", fidelity("fig2b.json"), 0.996, 0.005)]
}

fn c5() -> Vec<Check> {
    vec![within("F1", fidelity("alt_params.json"), 0.982, 0.005)]
}

fn c6() -> Vec<Check> {
    let cfg = config("robustness.json");
    let Experiment::Robustness(rc) = cfg.experiment else {
        panic!("robustness config")
    };
    let r = ResolvedScenario::from_config(&cfg).unwrap();
    let s = run_robustness(&r, 0.10, rc.samples, rc.seed).unwrap();
    vec![
        within("worst-corner F1", s.worst_corner.f1, 0.968, 0.01),
        Check {
            ok: s.mean_f1 >= 0.96,
            detail: format!(
                "mean F1={:.6} (want >=0.96; min {:.6}, max {:.6})",
                s.mean_f1, s.min_f1, s.max_f1
            ),
        },
    ]
}

fn c7() -> Vec<Check> {
    let base = resolve("fig2a.json");
    let mut out = Vec::new();
    for axis in [SweepAxis::Eta1, SweepAxis::Eta2] {
        let spec = SweepSpec::from_config(axis, &SweepConfig::default()).unwrap();
        let res = run_sweep(&base, &spec).unwrap();
        let mut worst: f64 = f64::NEG_INFINITY;
        for row in &res.f1 {
            for w in row.windows(2) {
                worst = worst.max(w[1] - w[0]);
            }
        }
        out.push(flag(
            &format!("{axis:?} columns non-increasing in g'/g"),
            worst <= 0.0,
            format!("max increase {worst:.3e} over {} rows", res.f1.len()),
        ));
    }
    let clean = PointCouplings {
        g_prime: 0.0,
        ..PointCouplings::from(&base.couplings)
    };
    let (f, _) = simulate_point(
        &base,
        clean,
        &NoiseParams::from_rates(0.0, 0.0).unwrap(),
        None,
    )
    .unwrap();
    out.push(within("F1(eta=0, g'=0)", f, 1.0, 1e-4));
    out
}

fn c8() -> Vec<Check> {
    let mut out = Vec::new();
    let spec = HilbertSpec::default();
    let up0 = DensityMatrix::pure(&StateVector::basis(&spec, Spin::Up, 0));

    let fig2a = resolve("fig2a.json");
    let traj = run_resolved(&fig2a).unwrap().trajectory;
    out.push(below("trace drift", traj.max_trace_drift(), 1e-7));
    out.push(below("hermiticity", traj.max_hermiticity_error, 1e-9));
    out.push(Check {
        ok: traj.min_eigenvalue_overall() > -1e-8,
        detail: format!(
            "min eig={:.3e} (want >-1e-8)",
            traj.min_eigenvalue_overall()
        ),
    });

    let mut clean = fig2a.clone();
    clean.noise = NoiseParams::disabled();
    let (_, t) = simulate_point(
        &clean,
        PointCouplings::from(&clean.couplings),
        &clean.noise,
        Some(0.002),
    )
    .unwrap();
    let purity = t.purity.iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max);
    out.push(below("|purity-1| noise-free", purity, 1e-7));

    let g = fig2a.couplings.g;
    let seg = PulseSegment {
        duration: 2.0 * PI / g.abs(),
        g,
        g_prime: 0.0,
        phase_freq: fig2a.couplings.energy_e,
        shape: PulseShape::Rectangular,
    };
    let sched = PulseSchedule::single(seg, 0.002).unwrap();
    let rabi = evolve(&up0, &sched, &NoiseParams::disabled(), default_dt(&sched)).unwrap();
    let err = rabi
        .times
        .iter()
        .zip(&rabi.rho22)
        .map(|(t, r)| (r.re - (g * t / 2.0).cos().powi(2)).abs())
        .fold(0.0, f64::max);
    out.push(below("Rabi oracle", err, 1e-6));

    let dark = DensityMatrix::pure(&StateVector::basis(&spec, Spin::Down, 0));
    let seg10 = PulseSegment {
        duration: 10.0,
        ..seg
    };
    let sched10 = PulseSchedule::single(seg10, 1.0).unwrap();
    let d = evolve(
        &dark,
        &sched10,
        &NoiseParams::new(900.0, 20.0).unwrap(),
        1.5e-4,
    )
    .unwrap();
    let dev = (d.final_state.matrix() - dark.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    out.push(below("dark state", dev, 1e-9));

    let at = PointCouplings::from(&fig2a.couplings);
    let duration = fig2a.pulse_duration().unwrap();
    let seg_f = PulseSegment {
        duration,
        g: at.g,
        g_prime: at.g_prime,
        phase_freq: at.energy_e,
        shape: PulseShape::Rectangular,
    };
    let dt = default_dt(&PulseSchedule::single(seg_f, duration).unwrap());
    let mut fine = fig2a.clone();
    fine.dt = Some(dt / 2.0);
    let (f_full, _) = simulate_point(&fig2a, at, &fig2a.noise, None).unwrap();
    let (f_half, _) = simulate_point(&fine, at, &fine.noise, None).unwrap();
    out.push(below("dt-halving dF1", (f_full - f_half).abs(), 1e-7));

    let p = fig2a.device;
    let mut fd_worst: f64 = 0.0;
    for k in 0..20 {
        let phi = -2.6 + 1.4 * k as f64 / 19.0;
        let h = 1e-5;
        let fd = (device::energy_of_phi(&p, phi + h).unwrap()
            - device::energy_of_phi(&p, phi - h).unwrap())
            / (2.0 * h);
        let exact = device::de_dphi(&p, phi).unwrap();
        fd_worst = fd_worst.max(((fd - exact) / exact).abs());
    }
    out.push(below("dE/dphi vs FD (rel)", fd_worst, 1e-6));

    let mut rt_worst: f64 = 0.0;
    for w_ghz in [36.0, 42.5, 50.0, 57.0, 64.0] {
        let w = w_ghz * 2.0 * PI;
        let phi = device::solve_resonant_phase(&p, w).unwrap();
        rt_worst = rt_worst.max(((device::energy_of_phi(&p, phi).unwrap() - w) / w).abs());
    }
    out.push(below("resonance round trip", rt_worst, 1e-10));
    out
}

/// Hand-written matrices, independent of the crate's gate builders.
fn cp_oracle() -> Matrix4<C64> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rz = |deg: f64| {
        let a = deg.to_radians() / 2.0;
        Matrix2::new(C64::from_polar(1.0, -a), z, z, C64::from_polar(1.0, a))
    };
    let kron = |a: Matrix2<C64>, b: Matrix2<C64>| {
        let mut m = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        m
    };
    let id = Matrix2::identity();
    // −3π/2 pulse: cos(−3π/4) = −1/√2, i·sin(−3π/4) = −i/√2
    #[rustfmt::skip]
    let s = Matrix4::new(
        one, z, z, z,
        z, C64::new(-h, 0.0), C64::new(0.0, -h), z,
        z, C64::new(0.0, -h), C64::new(-h, 0.0), z,
        z, z, z, one,
    );
    kron(rz(90.0), id) * kron(id, rz(-90.0)) * s * kron(rz(180.0), id) * s
}

fn random_local(rng: &mut ChaCha8Rng) -> GateMatrix {
    let mut su2 = || {
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(-PI..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(-PI..PI),
        );
        let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
        Matrix2::new(
            C64::from_polar(cb, -(a + c) / 2.0),
            C64::from_polar(-sb, -(a - c) / 2.0),
            C64::from_polar(sb, (a - c) / 2.0),
            C64::from_polar(cb, (a + c) / 2.0),
        )
    };
    let (a, b) = (su2(), su2());
    GateMatrix(Matrix4::from_fn(|r, c| {
        a[(r / 2, c / 2)] * b[(r % 2, c % 2)]
    }))
}

fn c9() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut add_worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b) = (
            rng.gen_range(-4.0 * PI..4.0 * PI),
            rng.gen_range(-4.0 * PI..4.0 * PI),
        );
        add_worst = add_worst.max(
            ideal_pulse_unitary(a + b)
                .max_distance(&(ideal_pulse_unitary(a) * ideal_pulse_unitary(b))),
        );
    }

    let r = resolve("fig2a.json");
    let dyn_u = pulse_unitary_from_dynamics(-PI, r.couplings.g, r.couplings.energy_e).unwrap();
    let fid = gate_fidelity(&dyn_u, &ideal_pulse_unitary(-PI));

    let cp = synthesize_cp();
    let base = makhlin_invariants(&cp).unwrap();
    let mut inv_worst: f64 = 0.0;
    for _ in 0..100 {
        let dressed = random_local(&mut rng) * cp * random_local(&mut rng);
        inv_worst = inv_worst.max(makhlin_invariants(&dressed).unwrap().distance(&base));
    }

    let oracle = (cp.matrix() - cp_oracle())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let report = verify_cp(r.couplings.g, r.couplings.energy_e).unwrap();
    let json = to_json(&report);
    let recorded =
        !report.verdict.is_empty() && json.contains("\"verdict\"") && json.contains("leftToRight");

    vec![
        below("area additivity", add_worst, 1e-12),
        Check {
            ok: fid >= 1.0 - 1e-6,
            detail: format!("dynamics pi-pulse fidelity={fid:.10} (want >=1-1e-6)"),
        },
        below("invariants under 100 dressings", inv_worst, 1e-10),
        below("synthesize_cp vs oracle", oracle, 1e-12),
        flag("CP verdict recorded", recorded, report.verdict),
    ]
}

fn c10() -> Vec<Check> {
    let r = resolve("fig2a.json");
    let a = run_resolved(&r).unwrap();
    let b = run_resolved(&r).unwrap();
    let csv_same = trajectory_csv(&a.trajectory).unwrap() == trajectory_csv(&b.trajectory).unwrap();
    let json_same = to_json(&a.summary) == to_json(&b.summary);

    let rb = resolve("robustness.json");
    let s1 = run_robustness_with(&rb, 0.1, 24, 77, Execution::Parallel).unwrap();
    let s2 = run_robustness_with(&rb, 0.1, 24, 77, Execution::Sequential).unwrap();
    let rob_same = to_json(&s1) == to_json(&s2);

    let spec = SweepSpec::from_config(
        SweepAxis::Eta2,
        &SweepConfig {
            range: None,
            points: 3,
            family: vec![0.0, 2.0, 4.0],
        },
    )
    .unwrap();
    let w1 = run_sweep_with(&r, &spec, Execution::Parallel).unwrap();
    let w2 = run_sweep_with(&r, &spec, Execution::Sequential).unwrap();
    let sweep_same = to_json(&w1) == to_json(&w2);

    vec![
        flag("trajectory CSV bytes", csv_same, "identical".into()),
        flag("summary JSON bytes", json_same, "identical".into()),
        flag(
            "robustness JSON bytes (par vs seq)",
            rob_same,
            "identical".into(),
        ),
        flag(
            "sweep JSON bytes (par vs seq)",
            sweep_same,
            "identical".into(),
        ),
    ]
}

fn main() {
    type Criterion = (&'static str, &'static str, fn() -> Vec<Check>, Option<f64>);
    let criteria: [Criterion; 10] = [
        ("C1", "parameter pipeline, set 1", c1, Some(1.0)),
        ("C2", "parameter pipeline, set 2", c2, None),
        ("C3", "state transfer F1, set 1", c3, Some(10.0)),
        ("C4", "entangling pulse F2, set 1", c4, None),
        ("C5", "state transfer F1, set 2 (g'=3g)", c5, None),
        ("C6", "robustness under 10% errors", c6, None),
        ("C7", "sweep ordering and noiseless limit", c7, None),
        ("C8", "property suite", c8, Some(30.0)),
        ("C9", "gate suite", c9, None),
        ("C10", "determinism", c10, None),
    ];
    let mut failed = Vec::new();
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let checks = run();
        let secs = start.elapsed().as_secs_f64();
        let time_ok = budget.is_none_or(|b| secs < b);
        let ok = time_ok && checks.iter().all(|c| c.ok);
        let budget_note = budget.map_or(String::new(), |b| format!(" (budget {b} s)"));
        println!(
            "{} {id:<3} {name} [{secs:.2} s{budget_note}]",
            if ok { "PASS" } else { "FAIL" }
        );
        for c in &checks {
            println!("       {} {}", if c.ok { "ok  " } else { "FAIL" }, c.detail);
        }
        if !ok {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {} of 10 criteria passed{}",
        10 - failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {}", failed.join(", "))
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

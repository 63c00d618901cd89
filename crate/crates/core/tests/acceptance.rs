//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line
//! each, and exits non-zero if any failed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use churate::chu::ChuCircuit;
use churate::experiments::{builtin_scenarios, find_scenario, run, RunOptions, Scenario, ScenarioKind};
use churate::interference::{
    gamma_match, interference_moments, ppp_oracle, rate_fixed_antenna_closed_form, rate_fixed_antenna_numeric,
    AveragingOptions, GammaModel, InterferenceField,
};
use churate::matching::{optimal_transmission, solve_for_size, verify_kkt, KktTolerances, SolverOptions};
use churate::model::{Link, SystemConfig};
use churate::numerics::QuadratureSpec;
use churate::rate::{rate_for_mode, Matching, RateOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lossless_identity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for a in [0.0005, 0.005, 0.05, 0.5, 5.0] {
        let chu = ChuCircuit::new(a, 3e8).unwrap();
        for i in 0..10_000 {
            let f = 10f64.powf(3.0 + 10.0 * i as f64 / 9_999.0);
            let e = chu.unmatched_reflection(f).norm_sqr() + chu.unmatched_transmission(f).norm_sqr() - 1.0;
            worst = worst.max(e.abs());
        }
    }
    let t = start.elapsed().as_secs_f64();
    ensure(worst < 1e-12 && t < 1.0, format!("max error {worst:.2e} over 5e4 points in {t:.3} s"))
}

fn fano_saturation() -> Outcome {
    let start = Instant::now();
    let c = 3e8;
    let spec = QuadratureSpec::with_rel_tol(1e-10);
    let mut worst: f64 = 0.0;
    for a in [0.0005, 0.005, 0.05] {
        let (i1, i2) = ChuCircuit::new(a, c).unwrap().bare_fano_integrals(&spec).unwrap();
        let e1 = i1 / (4.0 * PI * PI * a / c) - 1.0;
        let e2 = i2 / (32.0 * PI.powi(4) * a.powi(3) / (3.0 * c.powi(3))) - 1.0;
        worst = worst.max(e1.abs()).max(e2.abs());
    }
    let t = start.elapsed().as_secs_f64();
    ensure(worst < 1e-6 && t < 5.0, format!("max rel. error {worst:.2e} in {t:.3} s"))
}

fn solver_self_consistency() -> Outcome {
    let start = Instant::now();
    let scenario = find_scenario("fig7a").unwrap();
    let spec = QuadratureSpec::with_rel_tol(1e-10);
    let mut lines = Vec::new();
    let mut ok = true;
    for cfg in scenario.configs() {
        let link = Link::new(cfg).unwrap();
        let sol = solve_for_size(&link, cfg.radius, &SolverOptions::default()).unwrap();
        let report = verify_kkt(&link, &sol, &spec, &KktTolerances::default()).unwrap();
        let round_trip = (sol.achieved_a / cfg.radius - 1.0).abs();
        let (i1, i2) = report.integrals;
        let (k1, k2) = report.budgets;
        let eq = ((i1 - k1) / k1).abs().max(((i2 - k2) / k2).abs());
        let (lo, hi) = link.band();
        let n = 1 << 14;
        let t_ok = (0..n).all(|i| {
            let f = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let t = optimal_transmission(&link, f, &sol.multipliers).unwrap();
            (0.0..1.0).contains(&t)
        });
        let pass = round_trip < 1e-4 && eq < 1e-6 && report.all_passed() && t_ok;
        ok &= pass;
        lines.push(format!(
            "λ/a={:.0}: a err {round_trip:.1e}, constraints {eq:.1e}, KKT {}/9, T* in [0,1) {t_ok}",
            cfg.lambda_over_a(),
            report.checks.iter().filter(|c| c.passed).count()
        ));
    }
    let t = start.elapsed().as_secs_f64();
    ensure(ok && t < 60.0, format!("{} ({t:.2} s)", lines.join("; ")))
}

fn ordering() -> Outcome {
    let opts = RateOptions::default();
    let mut checked = 0;
    let mut failures = Vec::new();
    for s in builtin_scenarios() {
        if s.kind == ScenarioKind::InterferenceVsDensity {
            continue;
        }
        for cfg in s.configs() {
            let opt = rate_for_mode(&cfg, Matching::Optimal, &opts).unwrap();
            let none = rate_for_mode(&cfg, Matching::None, &opts).unwrap();
            checked += 1;
            if !(opt.rate_bps >= none.rate_bps && none.rate_bps >= 0.0 && opt.rate_bps <= opt.shannon_bps * (1.0 + 1e-9))
            {
                failures.push(format!("{} at λ/a={:.3}", s.name, cfg.lambda_over_a()));
            }
        }
    }
    // interference sweep: adaptive >= unmatched, both <= 1
    let fig11 = run(&find_scenario("fig11").unwrap(), &RunOptions::default()).unwrap();
    let rows = parse_rows(&fig11.rows);
    for r in rows.iter().filter(|r| r.2 == "optimal") {
        let none = rows.iter().find(|q| q.0 == r.0 && q.1 == r.1 && q.2 == "none").unwrap();
        checked += 1;
        if !(r.3 >= none.3 && r.3 <= 1.0 + 1e-9) {
            failures.push(format!("fig11 at rho={:e}, λ/a={}", r.0, r.1));
        }
    }
    // fraction non-increasing in λ/a
    let fig8 = run(&find_scenario("fig8").unwrap(), &RunOptions::default()).unwrap();
    let rows = parse_rows(&fig8.rows);
    let mut mono = 0;
    for w in rows.windows(2) {
        if w[0].1 == w[1].1 && w[0].2 == w[1].2 {
            mono += 1;
            if w[1].3 > w[0].3 * (1.0 + 1e-9) {
                failures.push(format!("fig8 {} bw={} rises at λ/a={}", w[0].2, w[0].1, w[1].0));
            }
        }
    }
    ensure(
        failures.is_empty(),
        format!("{checked} rate comparisons, {mono} monotonicity steps; failures: {failures:?}"),
    )
}

/// `(x, y, mode, value)` from the first four CSV columns.
fn parse_rows(rows: &[String]) -> Vec<(f64, f64, String, f64)> {
    rows.iter()
        .map(|r| {
            let c: Vec<&str> = r.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap(), c[2].to_owned(), c[3].parse().unwrap())
        })
        .collect()
}

fn fraction_drop() -> Outcome {
    let mut base = SystemConfig::baseline();
    base.fc = 5e9;
    base.bw = 0.4 * base.fc;
    let base = base.with_power(4.0);
    let opts = RateOptions::default();
    let f = |m: Matching, r: f64| rate_for_mode(&base.with_lambda_over_a(r), m, &opts).unwrap().fraction;
    let none = f(Matching::None, 5.0) - f(Matching::None, 10.0);
    let opt = f(Matching::Optimal, 5.0) - f(Matching::Optimal, 10.0);
    let none_ok = (none - 0.40).abs() <= 0.10;
    let opt_ok = opt < 0.10;
    ensure(
        none_ok && opt_ok,
        format!(
            "unmatched drop {none:.4} (want 0.40 ± 0.10: {}), optimal drop {opt:.4} (want < 0.10: {})",
            if none_ok { "ok" } else { "FAIL" },
            if opt_ok { "ok" } else { "FAIL" }
        ),
    )
}

fn small_antenna_scaling() -> Outcome {
    let c = 3e8;
    let mut worst: f64 = 0.0;
    for a in [1e-3, 5e-3, 2e-2] {
        let big = ChuCircuit::new(a, c).unwrap();
        let small = ChuCircuit::new(a / 2.0, c).unwrap();
        for x in [0.001, 0.01, 0.03, 0.05] {
            let f = x * c / (2.0 * PI * a);
            let ratio = small.transmission_power(f) / big.transmission_power(f);
            worst = worst.max((ratio * 16.0 - 1.0).abs());
        }
    }
    ensure(worst < 0.05, format!("|T̃|² ratio under a -> a/2 deviates from 1/16 by at most {:.3}%", 100.0 * worst))
}

fn interference_moments_check() -> Outcome {
    let cell = InterferenceField::one_per_cell(1000.0, 2.5, 6.0, 0.5);
    let k = gamma_match(&cell).unwrap().k;
    let mut ident: f64 = 0.0;
    for (rho, alpha, r0) in [(cell.density, 2.5, 1000.0), (1e-6, 3.0, 200.0), (3e-9, 4.2, 5e3)] {
        let f = InterferenceField {
            density: rho,
            alpha,
            r0,
            ..cell
        };
        let (m, v) = interference_moments(&f).unwrap();
        let g = gamma_match(&f).unwrap();
        ident = ident.max((g.mean() / m - 1.0).abs()).max((g.variance() / v - 1.0).abs());
    }
    let sparse = InterferenceField {
        density: 0.01 / (PI * 1e6),
        ..cell
    };
    let (m, v) = interference_moments(&sparse).unwrap();
    let e = ppp_oracle(&sparse, 100_000, 100.0 * sparse.r0, 20_240_607).unwrap();
    let zm = (e.mean - m) / e.mean_stderr;
    let zv = (e.variance - v) / e.variance_stderr;
    ensure(
        (k - 12.0).abs() < 1e-12 && ident < 4.0 * f64::EPSILON && zm.abs() < 3.0 && zv.abs() < 3.0,
        format!("k = {k}, identity error {ident:.1e}, PPP z-scores mean {zm:.2}, variance {zv:.2}"),
    )
}

fn closed_form_vs_quadrature() -> Outcome {
    let s = find_scenario("fig11").unwrap();
    let cfg = s.base.with_lambda_over_a(50.0);
    let link = Link::new(cfg).unwrap();
    let chu = ChuCircuit::new(cfg.radius, cfg.constants.c).unwrap();
    let t = |f: f64| chu.transmission_power(f);
    let opts = AveragingOptions::default();
    let k = 100.0;
    let mut worst: f64 = 0.0;
    for scale in [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4] {
        let mean = scale * link.n_lna * cfg.bw / chu.transmission_power(cfg.fc);
        let gm = GammaModel::new(k, mean / k).unwrap();
        let cf = rate_fixed_antenna_closed_form(&link, t, &gm, &opts.quad).unwrap();
        let num = rate_fixed_antenna_numeric(&link, t, &gm, &opts).unwrap();
        worst = worst.max(((cf.rate_bps - num) / num).abs());
    }
    ensure(worst <= 0.01, format!("k = {k}, worst relative gap {worst:.2e} over 8 scales"))
}

fn interference_plateau() -> Outcome {
    let s = find_scenario("fig11").unwrap();
    let table = run(&s, &RunOptions::default()).unwrap();
    let rows = parse_rows(&table.rows);
    let rho_max = s.values("rho").iter().cloned().fold(f64::MIN, f64::max);
    let top: Vec<f64> = rows
        .iter()
        .filter(|r| r.2 == "optimal" && (r.0 / rho_max - 1.0).abs() < 1e-6)
        .map(|r| r.3)
        .collect();
    let in_range = top.iter().all(|&v| (0.98..=1.0 + 1e-9).contains(&v));
    let agree = (top[0] / top[1] - 1.0).abs() < 0.01;
    let mut monotone = true;
    for mode in ["optimal", "none"] {
        for &ratio in s.values("lambda_over_a") {
            let series: Vec<f64> = rows
                .iter()
                .filter(|r| r.2 == mode && (r.1 / ratio - 1.0).abs() < 1e-6)
                .map(|r| r.3)
                .collect();
            monotone &= series.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
        }
    }
    ensure(
        in_range && agree && top.len() == 2 && monotone,
        format!("ratios at rho={rho_max:e}: {top:?}; monotone in rho: {monotone}"),
    )
}

fn determinism() -> Outcome {
    let opts = RunOptions {
        seed: 7,
        ..RunOptions::default()
    };
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let scenarios: Vec<Scenario> = builtin_scenarios();
    for s in &scenarios {
        let (p1, _) = churate::experiments::run_to_dir(s, &opts, dir1.path()).unwrap();
        let (p2, _) = churate::experiments::run_to_dir(s, &opts, dir2.path()).unwrap();
        if std::fs::read(p1).unwrap() != std::fs::read(p2).unwrap() {
            differing.push(s.name.clone());
        }
    }
    ensure(
        differing.is_empty(),
        format!("{} scenarios run twice, differing: {differing:?}", scenarios.len()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("lossless identity", lossless_identity),
        ("bare-antenna Fano saturation", fano_saturation),
        ("solver self-consistency (600 MHz sizes)", solver_self_consistency),
        ("rate ordering and monotone fraction", ordering),
        ("fraction drop λ/a 5 -> 10 at 5 GHz, BW 0.4 fc", fraction_drop),
        ("small-antenna a⁴ scaling", small_antenna_scaling),
        ("interference moments", interference_moments_check),
        ("closed-form vs quadrature interference rate", closed_form_vs_quadrature),
        ("interference-limited plateau", interference_plateau),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS [{:>2}] {name}: {d} [{secs:.2} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {d} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

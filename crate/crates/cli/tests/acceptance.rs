//! Runs each acceptance criterion and prints one PASS or FAIL line per
//! criterion. Exits nonzero when any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::Command;
use std::time::Instant;

use qlin_core::envelopes::PairKind;
use qlin_core::instance::Sense;
use qlin_core::oracle::{compare_with_bounds, dominance_violations, feasible_points, CompareOptions, FlagKind};
use qlin_core::{
    add_cuts, build_model, check_identities, compute_bound_set, solve_lp, solve_milp, BoundOptions, BoundSetExact,
    CutFamily, LinearModel64, LpStatus, MilpConfig, ModelVariant, ProblemInstance, Rational, Scalar, ThetaMode,
    VarRole,
};

type Outcome = Result<String, String>;

fn conditional() -> BoundOptions {
    BoundOptions { conditional: true, ..BoundOptions::default() }
}

fn exact_bounds(inst: &ProblemInstance, options: &BoundOptions) -> Result<BoundSetExact, String> {
    compute_bound_set(inst, options).map_err(|e| e.to_string())
}

fn identities() -> Outcome {
    let mut points = 0;
    for (seed, inst) in support::suite(200, 3, 10) {
        let b = exact_bounds(&inst, &conditional())?;
        for x in feasible_points(&inst).map_err(|e| e.to_string())? {
            let report = check_identities(&inst, &b, &x).map_err(|e| e.to_string())?;
            for matrix in ["Q", "G", "G-Q"] {
                for pair in [PairKind::Plain, PairKind::Conditional] {
                    let count = report.entries.iter().filter(|e| e.matrix == matrix && e.pair == pair).count();
                    if count != inst.n() {
                        return Err(format!("seed {seed}: {count} {matrix} {pair:?} entries"));
                    }
                }
            }
            if report.max_residual != Rational::from_integer(0.into()) || !report.sandwich_holds {
                return Err(format!("seed {seed} {x:?}: residual {}", report.max_residual));
            }
            points += 1;
        }
    }
    Ok(format!("200 instances, {points} feasible points, residual 0"))
}

/// Reports of the equivalence suite, shared by several criteria.
struct Suite {
    reports: Vec<(u64, qlin_core::ComparisonReport)>,
    bounds: Vec<(u64, BoundSetExact)>,
}

fn run_suite() -> Result<Suite, String> {
    let mut reports = Vec::new();
    let mut bounds = Vec::new();
    for (seed, inst) in support::suite(50, 4, 12) {
        let opts = CompareOptions { instance_id: format!("s{seed}"), ..CompareOptions::default() };
        let b = exact_bounds(&inst, &opts.bounds)?;
        reports.push((seed, compare_with_bounds(&inst, &b, &opts).map_err(|e| e.to_string())?));
        bounds.push((seed, b));
    }
    Ok(Suite { reports, bounds })
}

fn flags_of(suite: &Suite, kinds: &[FlagKind]) -> Vec<String> {
    suite
        .reports
        .iter()
        .flat_map(|(seed, r)| {
            r.flags.iter().filter(|f| kinds.contains(&f.kind)).map(move |f| format!("seed {seed}: {f}"))
        })
        .collect()
}

fn equivalence(suite: &Suite) -> Outcome {
    let kinds =
        [FlagKind::OracleMismatch, FlagKind::ExtractedPointInvalid, FlagKind::LiftInfeasible, FlagKind::LpAboveOptimum];
    let flags = flags_of(suite, &kinds);
    let rows: usize = suite.reports.iter().map(|(_, r)| r.rows.len()).sum();
    if flags.is_empty() {
        Ok(format!("50 instances, {rows} model solves, zero flags"))
    } else {
        Err(format!("{} flags, first: {}", flags.len(), flags[0]))
    }
}

fn dominance(suite: &Suite) -> Outcome {
    let tol = Rational::approx(1e-9);
    for (seed, b) in &suite.bounds {
        let found = dominance_violations(b, &tol);
        if let Some(first) = found.first() {
            return Err(format!("seed {seed}: {first}"));
        }
    }
    Ok(format!("{} bound sets inside their unconditional ranges", suite.bounds.len()))
}

fn tightness(suite: &Suite) -> Outcome {
    let kinds = [FlagKind::NbpLooserThanBpBar, FlagKind::CutLoweredBound, FlagKind::CutChangedOptimum];
    let flags = flags_of(suite, &kinds);
    if flags.is_empty() {
        Ok("NBP-bar never looser than BP-bar; cuts never lower the bound or move the optimum".into())
    } else {
        Err(format!("{} flags, first: {}", flags.len(), flags[0]))
    }
}

fn small_matches_bp_bar(suite: &Suite) -> Outcome {
    for (seed, r) in &suite.reports {
        let small = r.row(ModelVariant::Small, None).and_then(|row| row.milp_objective);
        let bar = r.row(ModelVariant::BpBar, None).and_then(|row| row.milp_objective);
        match (small, bar) {
            (Some(a), Some(b)) if (a - b).abs() <= 1e-6 * b.abs().max(1.0) => {}
            _ => return Err(format!("seed {seed}: small {small:?} versus bp-bar {bar:?}")),
        }
    }
    Ok(format!("equal optima on {} instances", suite.reports.len()))
}

fn theta_machinery() -> Outcome {
    let mut checked = 0;
    for (seed, inst) in support::suite(20, 3, 7) {
        let quad = inst.quad().expect("suite has a quadratic constraint").clone();
        for alpha in [Rational::new(1.into(), 4.into()), Rational::from_integer(3.into())] {
            let q: Vec<Vec<Rational>> =
                quad.g_matrix.iter().map(|row| row.iter().map(|g| g * &alpha).collect()).collect();
            if q.iter().flatten().all(|v| *v == Rational::from_integer(0.into())) {
                continue;
            }
            let scaled = ProblemInstance::new(
                inst.c().to_vec(),
                q,
                Some(quad.clone()),
                inst.side_constraints().to_vec(),
                Default::default(),
            )
            .map_err(|e| e.to_string())?;
            let b = exact_bounds(&scaled, &conditional())?;
            let theta = b.theta.clone().ok_or("no theta")?;
            if (theta.as_f64() - alpha.as_f64()).abs() > 1e-12 {
                return Err(format!("seed {seed}: theta {theta} for alpha {alpha}"));
            }
        }
        let opts = BoundOptions { theta_mode: ThetaMode::Fixed(1.0), ..conditional() };
        let b = exact_bounds(&inst, &opts)?;
        if b.w_theta != b.w_cond {
            return Err(format!("seed {seed}: theta bounds at 1 differ from the w bounds"));
        }
        let model = build_model(&inst, &b, ModelVariant::NbpBar).map_err(|e| e.to_string())?;
        let cond = add_cuts(&model, &inst, &b, CutFamily::Cond).map_err(|e| e.to_string())?;
        let theta = add_cuts(&model, &inst, &b, CutFamily::Theta).map_err(|e| e.to_string())?;
        let base = model.num_rows();
        if cond.num_rows() != theta.num_rows() {
            return Err(format!("seed {seed}: row counts differ"));
        }
        for (a, t) in cond.rows[base..].iter().zip(&theta.rows[base..]) {
            if (&a.coeffs, a.sense, &a.rhs) != (&t.coeffs, t.sense, &t.rhs) {
                return Err(format!("seed {seed}: cut {} differs from {}", t.name, a.name));
            }
        }
        checked += 1;
    }
    Ok(format!("trace ratio recovers alpha; theta = 1 matches on {checked} instances"))
}

fn enhanced_region() -> Outcome {
    let w1 =
        qlin_core::read_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/data/w1.json")).map_err(|e| e.to_string())?;
    let opts = BoundOptions { enhanced: true, ..conditional() };
    let b = exact_bounds(&w1, &opts)?;
    let forced: Vec<(usize, u8)> = b.forced.iter().map(|(&i, &v)| (i, v)).collect();
    if forced != [(0, 1), (1, 1)] {
        return Err(format!("forced fixings {forced:?}"));
    }
    let model = build_model(&w1, &b.to_f64(), ModelVariant::NbpBar).map_err(|e| e.to_string())?;
    let sol = solve_milp(&model, &MilpConfig::default()).map_err(|e| e.to_string())?;
    match sol.objective {
        Some(-2.0) => Ok("x1 = x2 = 1 forced; NBP-bar optimum -2".into()),
        other => Err(format!("NBP-bar optimum {other:?}")),
    }
}

fn solver_sanity() -> Outcome {
    let mut optimal = 0;
    for seed in 0..500 {
        let lp = support::random_lp(seed);
        let sol = solve_lp(&lp).map_err(|e| e.to_string())?;
        match (sol.status, sol.objective, support::vertex_minimum(&lp)) {
            (LpStatus::Optimal, Some(got), Some(v)) if (got - v).abs() <= 1e-7 => optimal += 1,
            (LpStatus::Infeasible, _, None) => {}
            (status, got, v) => return Err(format!("LP {seed}: {status:?} {got:?} versus vertices {v:?}")),
        }
    }
    let mut m = LinearModel64::new(None);
    for i in 0..2 {
        m.add_var(VarRole::X, i, None, None, true);
    }
    m.add_row("cap".to_string(), [(0, 2.0), (1, 2.0)], Sense::Le, 3.0, "knapsack");
    m.set_objective([(0, -1.0), (1, -1.0)], 0.0);
    let sol = solve_milp(&m, &MilpConfig::default()).map_err(|e| e.to_string())?;
    if sol.objective != Some(-1.0) || sol.root_bound != Some(-1.5) {
        return Err(format!("root example gave {:?} with root bound {:?}", sol.objective, sol.root_bound));
    }
    Ok(format!("500 LPs ({optimal} optimal) match vertex enumeration; root example -1 with bound -1.5"))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("qlin-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let generated = dir.join("g7.json");
    std::fs::write(&generated, qlin_core::save_instance(&support::suite_instance(7, 8))).map_err(|e| e.to_string())?;
    let w1 = std::path::PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/w1.json"));
    let run = |path: &std::path::Path, extra: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qlin"))
            .arg("compare")
            .arg("--in")
            .arg(path)
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    for (path, extra) in [(&w1, &["--conditional"][..]), (&generated, &["--conditional", "--theta-mode", "grid"][..])] {
        let (a, b) = (run(path, extra)?, run(path, extra)?);
        if a != b || a.is_empty() {
            return Err(format!("{} output differs between runs", path.display()));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("two instances, byte-identical CSV across runs".into())
}

fn main() {
    let mut failed = 0;
    let mut report = |k: usize, name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {k} {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {k} {name}: {detail} ({secs:.1}s)");
            }
        }
    };

    let t = Instant::now();
    report(1, "piecewise identities", t, identities());
    let t = Instant::now();
    let suite = run_suite();
    let suite_secs = t.elapsed();
    let shared = |f: fn(&Suite) -> Outcome| suite.as_ref().map_err(Clone::clone).and_then(f);
    let t = Instant::now() - suite_secs;
    report(2, "equivalence", t, shared(equivalence));
    let t = Instant::now();
    report(3, "bound dominance", t, shared(dominance));
    report(4, "relaxation tightness", t, shared(tightness));
    report(5, "small model redundancy", t, shared(small_matches_bp_bar));
    let t = Instant::now();
    report(6, "theta machinery", t, theta_machinery());
    let t = Instant::now();
    report(7, "enhanced region", t, enhanced_region());
    let t = Instant::now();
    report(8, "solver sanity", t, solver_sanity());
    let t = Instant::now();
    report(9, "determinism", t, determinism());
    if failed > 0 {
        std::process::exit(1);
    }
}

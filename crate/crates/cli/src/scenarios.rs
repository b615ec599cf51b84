//! Built-in scenario registry and the check runner.

use anyhow::{anyhow, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use folcc_core::dynamics::{
    classify_fixed_points, reeb_probe, Interval, LocalDiffeo, PseudogroupPresentation,
    ReebProbeReport,
};
use folcc_core::expr::{parse, ExprAst};
use folcc_core::frames::{
    check_invariance, connection_from_conjugacy, structure_identities,
    verify_affine_connection, verify_projective_connection, ConnectionCandidate,
    ConnectionReport, GridSpec, DEFAULT_COCYCLE_TOLERANCE,
};
use folcc_core::jets::Jet;
use folcc_core::Q;

use crate::config::{
    build_presentation, CheckConfig, GeneratorConfig, PresentationConfig, ScenarioConfig,
};
use crate::report::{envelope, CheckResult};
use crate::Outcome;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;
pub const SQRT2_MINUS_1: f64 = 0.41421356237309515;
/// The profile used by the shipped holonomy scenario.
pub const REEB_PROFILE: &str = "exp(1/(1 - x^2)) - exp(1)";
/// The same profile seen from the complementary solid torus through the
/// coordinate sqrt(2 - x^2).
pub const REEB_MIRROR_PROFILE: &str = "exp(1/(x^2 - 1)) - exp(1)";
/// Conjugacy used by the perturbed-rotation scenario.
pub const ROTATION_CONJUGACY: &str = "x + 0.12*sin(6.283185307179586*x)";

/// The scenarios shipped with the tool, reproducing the worked examples.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    vec![
        ScenarioConfig {
            name: "hyperbolic".into(),
            description: "one linear contraction on the line; the flat connection passes"
                .into(),
            presentation: PresentationConfig {
                chart: None,
                window: Some([-2.0, 2.0]),
                generators: vec![GeneratorConfig::Explicit {
                    name: "doubling".into(),
                    expr: "2*x".into(),
                    domain: None,
                }],
            },
            checks: vec![CheckConfig::AffineConnection {
                candidate: Some("0".into()),
                candidate_from_conjugacy: None,
                tolerance: None,
            }],
        },
        ScenarioConfig {
            name: "translation".into(),
            description: "unit shift on the line".into(),
            presentation: PresentationConfig {
                chart: None,
                window: Some([-2.0, 2.0]),
                generators: vec![GeneratorConfig::Explicit {
                    name: "shift".into(),
                    expr: "x + 1".into(),
                    domain: None,
                }],
            },
            checks: vec![CheckConfig::AffineConnection {
                candidate: Some("0".into()),
                candidate_from_conjugacy: None,
                tolerance: None,
            }],
        },
        ScenarioConfig {
            name: "orbifold-z2".into(),
            description: "reflection through the origin on (-1, 1)".into(),
            presentation: PresentationConfig {
                chart: Some([-1.0, 1.0]),
                window: None,
                generators: vec![GeneratorConfig::Explicit {
                    name: "reflection".into(),
                    expr: "-x".into(),
                    domain: None,
                }],
            },
            checks: vec![CheckConfig::AffineConnection {
                candidate: Some("0".into()),
                candidate_from_conjugacy: None,
                tolerance: None,
            }],
        },
        ScenarioConfig {
            name: "resilient".into(),
            description: "unit shift and halving generate a resilient orbit at 0".into(),
            presentation: PresentationConfig {
                chart: None,
                window: Some([-2.0, 2.0]),
                generators: vec![
                    GeneratorConfig::Explicit {
                        name: "shift".into(),
                        expr: "x + 1".into(),
                        domain: None,
                    },
                    GeneratorConfig::Explicit {
                        name: "halving".into(),
                        expr: "x/2".into(),
                        domain: None,
                    },
                ],
            },
            checks: vec![CheckConfig::AffineConnection {
                candidate: Some("0".into()),
                candidate_from_conjugacy: None,
                tolerance: None,
            }],
        },
        ScenarioConfig {
            name: "conjugated-rotation".into(),
            description:
                "an irrational rotation conjugated by a sine perturbation; the connection \
                 is synthesized from the conjugacy"
                    .into(),
            presentation: PresentationConfig {
                chart: None,
                window: Some([0.0, 1.0]),
                generators: vec![GeneratorConfig::ConjugatedShift {
                    name: "rotation".into(),
                    profile: ROTATION_CONJUGACY.into(),
                    shift: SQRT2_MINUS_1,
                    domain: None,
                    lift: true,
                }],
            },
            checks: vec![CheckConfig::AffineConnection {
                candidate: None,
                candidate_from_conjugacy: Some(ROTATION_CONJUGACY.into()),
                tolerance: None,
            }],
        },
        ScenarioConfig {
            name: "reeb".into(),
            description:
                "holonomy of the compact leaf of the standard two-torus gluing: a flat \
                 conjugated shift on each side of 1, identity across it; no connection \
                 candidate ships"
                    .into(),
            presentation: PresentationConfig {
                chart: Some([0.0, SQRT2]),
                window: Some([0.05, SQRT2 - 0.05]),
                generators: vec![
                    GeneratorConfig::HolonomyShift {
                        name: "inner".into(),
                        profile: REEB_PROFILE.into(),
                        domain: [0.0, 1.0],
                        extend_to: SQRT2,
                    },
                    GeneratorConfig::HolonomyShift {
                        name: "outer".into(),
                        profile: REEB_MIRROR_PROFILE.into(),
                        domain: [1.0, SQRT2],
                        extend_to: 0.0,
                    },
                ],
            },
            checks: vec![
                CheckConfig::Identities { invariance_samples: Some(8) },
                CheckConfig::ReebProbe { profile: REEB_PROFILE.into(), n_max: 12 },
                CheckConfig::FixedPoints {
                    generator: "inner".into(),
                    window: Some([0.05, SQRT2 - 0.05]),
                    grid: Some(257),
                    tolerance: None,
                },
            ],
        },
    ]
}

pub fn find_builtin(name: &str) -> Option<ScenarioConfig> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Draws a random polynomial of degree ≤ 4 regular at `at`, returning the
/// expression and its jet there.
fn random_regular_polynomial(rng: &mut ChaCha8Rng, at: f64) -> ExprAst {
    loop {
        let coeffs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // h'(at) bounded away from zero keeps the prolonged action sane.
        let deriv: f64 = (1..5)
            .map(|k| k as f64 * coeffs[k] * at.powi(k as i32 - 1))
            .sum();
        if deriv.abs() < 0.3 {
            continue;
        }
        let mut ast = ExprAst::constant(Q::from_float(coeffs[0]).unwrap());
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            ast = ExprAst::add(
                ast,
                ExprAst::mul(
                    ExprAst::constant(Q::from_float(*c).unwrap()),
                    ExprAst::pow(ExprAst::var(), ExprAst::int(k as i64)),
                ),
            );
        }
        return ast;
    }
}

fn random_regular_frame(rng: &mut ChaCha8Rng, order: usize) -> Jet<f64> {
    let mut derivs: Vec<f64> = (0..=order).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sign: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    derivs[1] = sign * rng.gen_range(0.5..2.0);
    Jet::new(0.0, derivs).expect("non-empty")
}

/// Randomized invariance spot checks: polynomial diffeomorphisms of degree
/// at most 4 against random regular frames, all four canonical levels.
pub fn invariance_spot_checks(seed: u64, cases: u32) -> (f64, Value) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_case = json!(null);
    for case in 0..cases {
        let frame = random_regular_frame(&mut rng, 5);
        let h_ast = random_regular_polynomial(&mut rng, *frame.value());
        let h = LocalDiffeo::explicit(h_ast.clone(), Interval::real_line());
        for k in 0..=3 {
            match check_invariance(&h, k, &frame) {
                Ok(defect) => {
                    if defect > worst {
                        worst = defect;
                        worst_case = json!({
                            "case": case,
                            "level": k,
                            "map": h_ast.to_string(),
                            "defect": defect,
                        });
                    }
                }
                Err(e) => {
                    return (
                        f64::INFINITY,
                        json!({ "case": case, "level": k, "error": e.to_string() }),
                    );
                }
            }
        }
    }
    (worst, worst_case)
}

fn identity_check(invariance_samples: u32, seed: u64) -> CheckResult {
    let symbolic = structure_identities();
    let (worst, worst_case) = invariance_spot_checks(seed, invariance_samples);
    let tol = 1e-9;
    let pass = symbolic.all_hold && worst <= tol;
    CheckResult {
        name: "identity-suite".into(),
        kind: "identities".into(),
        status: if pass { "pass" } else { "fail" }.into(),
        residual: Some(worst),
        tolerance: Some(tol),
        details: json!({
            "symbolic": symbolic,
            "invariance": {
                "cases": invariance_samples,
                "max_defect": worst,
                "worst": worst_case,
            },
        }),
    }
}

fn connection_check_result(name: &str, report: &ConnectionReport) -> CheckResult {
    let residual = report
        .generators
        .iter()
        .map(|g| g.max_residual)
        .fold(0.0f64, f64::max);
    CheckResult {
        name: name.into(),
        kind: format!("{}-connection", report.kind),
        status: if report.pass { "pass" } else { "fail" }.into(),
        residual: Some(residual),
        tolerance: Some(report.tolerance),
        details: serde_json::to_value(report).expect("serializable"),
    }
}

/// Qualitative assessment of a holonomy probe: the ratio columns decrease
/// toward zero, the log-derivative column increases past 50 on the
/// geometric extension, and its ratio to the level tends to zero.
pub fn assess_reeb_probe(report: &ReebProbeReport) -> (bool, Value) {
    let mut ratio_monotone = [true; 3];
    for k in 0..3 {
        for pair in report.rows.windows(2) {
            if pair[1].ratios[k].abs() >= pair[0].ratios[k].abs() {
                ratio_monotone[k] = false;
            }
        }
    }
    let ratios_small = report
        .rows
        .last()
        .map(|r| r.ratios.iter().all(|v| v.abs() < 0.2))
        .unwrap_or(false);
    let mut all: Vec<(f64, f64, f64)> = report
        .rows
        .iter()
        .chain(report.geometric_rows.iter())
        .map(|r| (r.n, r.ln_fprime, r.ln_fprime_over_f))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    all.dedup_by(|a, b| a.0 == b.0);
    let log_deriv_increasing = all.windows(2).all(|w| w[1].1 > w[0].1);
    let log_deriv_unbounded = all.last().map(|r| r.1 > 50.0).unwrap_or(false);
    let normalized_vanishes = all.last().map(|r| r.2 < 1e-8).unwrap_or(false);
    let pass = ratio_monotone.iter().all(|&m| m)
        && ratios_small
        && log_deriv_increasing
        && log_deriv_unbounded
        && normalized_vanishes;
    (
        pass,
        json!({
            "ratio_columns_decrease": ratio_monotone,
            "final_ratios_below_0.2": ratios_small,
            "log_derivative_increasing": log_deriv_increasing,
            "log_derivative_exceeds_50": log_deriv_unbounded,
            "log_derivative_over_level_below_1e-8": normalized_vanishes,
            "levels_probed": all.len(),
        }),
    )
}

fn run_check(
    cfg: &ScenarioConfig,
    pres: &PseudogroupPresentation,
    check: &CheckConfig,
    index: usize,
    seed: u64,
) -> Result<CheckResult> {
    let grid = GridSpec {
        window: cfg.window(),
        ..GridSpec::default()
    };
    Ok(match check {
        CheckConfig::Identities { invariance_samples } => {
            identity_check(invariance_samples.unwrap_or(8), seed)
        }
        CheckConfig::AffineConnection { candidate, candidate_from_conjugacy, tolerance } => {
            let cand = resolve_candidate(candidate, candidate_from_conjugacy)?;
            let tol = tolerance.unwrap_or(DEFAULT_COCYCLE_TOLERANCE);
            let report = verify_affine_connection(pres, &cand, &grid, tol);
            connection_check_result(&format!("check-{index}"), &report)
        }
        CheckConfig::ProjectiveConnection { candidate, tolerance } => {
            let cand = resolve_candidate(candidate, &None)?;
            let tol = tolerance.unwrap_or(DEFAULT_COCYCLE_TOLERANCE);
            let report = verify_projective_connection(pres, &cand, &grid, tol);
            connection_check_result(&format!("check-{index}"), &report)
        }
        CheckConfig::ReebProbe { profile, n_max } => {
            let ast = parse(profile).map_err(|e| anyhow!("probe profile: {e}"))?;
            let report = reeb_probe(&ast, *n_max).map_err(|e| anyhow!("probe: {e}"))?;
            let (pass, assessment) = assess_reeb_probe(&report);
            CheckResult {
                name: format!("check-{index}"),
                kind: "reeb-probe".into(),
                status: if pass { "pass" } else { "fail" }.into(),
                residual: None,
                tolerance: None,
                details: json!({
                    "assessment": assessment,
                    "table": report,
                }),
            }
        }
        CheckConfig::FixedPoints { generator, window, grid: grid_points, tolerance } => {
            let (_, phi) = pres
                .generators()
                .iter()
                .find(|(n, _)| n == generator)
                .ok_or_else(|| anyhow!("no generator named `{generator}`"))?;
            let w = window
                .map(|[a, b]| Interval::new(a, b))
                .unwrap_or(pres.chart);
            let records = classify_fixed_points(
                phi,
                w,
                grid_points.unwrap_or(257),
                tolerance.unwrap_or(1e-9),
            )
            .map_err(|e| anyhow!("fixed points: {e}"))?;
            CheckResult {
                name: format!("check-{index}"),
                kind: "fixed-points".into(),
                status: "pass".into(),
                residual: None,
                tolerance: None,
                details: serde_json::to_value(&records).expect("serializable"),
            }
        }
    })
}

fn resolve_candidate(
    candidate: &Option<String>,
    from_conjugacy: &Option<String>,
) -> Result<ConnectionCandidate> {
    match (candidate, from_conjugacy) {
        (Some(expr), None) => Ok(ConnectionCandidate::new(
            parse(expr).map_err(|e| anyhow!("candidate: {e}"))?,
        )),
        (None, Some(conj)) => {
            let ast = parse(conj).map_err(|e| anyhow!("conjugacy: {e}"))?;
            let f = LocalDiffeo::explicit(ast, Interval::real_line());
            connection_from_conjugacy(&f).map_err(|e| anyhow!("conjugacy: {e}"))
        }
        (Some(_), Some(_)) => Err(anyhow!(
            "give either `candidate` or `candidate-from-conjugacy`, not both"
        )),
        (None, None) => Err(anyhow!(
            "a connection check needs `candidate` or `candidate-from-conjugacy`"
        )),
    }
}

/// Executes a scenario and assembles its deterministic report.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    seed: u64,
    jet_order: usize,
) -> Result<(Value, Outcome)> {
    let pres = build_presentation(cfg)?;
    let mut results = Vec::new();
    for (index, check) in cfg.checks.iter().enumerate() {
        results.push(run_check(cfg, &pres, check, index, seed)?);
    }
    let all_pass = results.iter().all(|r| r.passed());
    let payload = json!({
        "scenario": cfg.name,
        "description": cfg.description,
        "generators": pres
            .generators()
            .iter()
            .map(|(n, g)| json!({ "name": n, "domain": g.domain() }))
            .collect::<Vec<_>>(),
        "checks": results,
    });
    let status = if all_pass { "pass" } else { "fail" };
    let outcome = if all_pass { Outcome::Pass } else { Outcome::CheckFailed };
    Ok((envelope("scenario", seed, jet_order, status, payload), outcome))
}

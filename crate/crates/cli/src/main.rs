//! `folcc`: cohomology of the formal-vector-field complex, canonical-form
//! identities, transverse connection verification, and circle-dynamics
//! probes, with JSON and CSV reporting.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use folcc::config::{load_config, ScenarioConfig};
use folcc::formspec::parse_form;
use folcc::report::{csv_table, envelope, f as fnum, to_pretty};
use folcc::scenarios::{
    assess_reeb_probe, builtin_scenarios, find_builtin, invariance_spot_checks,
    run_scenario,
};
use folcc::Outcome;
use folcc_core::dynamics::{
    classify_fixed_points, diophantine_exponent, reeb_probe, rotation_number,
    Interval, LocalDiffeo,
};
use folcc_core::expr::{eval, parse, EvalOptions};
use folcc_core::frames::{structure_identities, Chart, CoordForm};
use folcc_core::gf::{cohomology_dim, duminy_cohomology, Flavor};
use folcc_core::multipoly::MultiPoly;
use folcc_core::Q;

#[derive(Parser)]
#[command(
    name = "folcc",
    about = "characteristic-class computations for codimension-one leaf spaces",
    version
)]
struct Cli {
    /// Emit JSON (the default output format).
    #[arg(long, global = true)]
    json: bool,
    /// Emit flat CSV tables instead of JSON where a table exists.
    #[arg(long, global = true)]
    csv: bool,
    /// Tolerance override for verification subcommands.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Jet order for frame computations (2..=16).
    #[arg(long, global = true, default_value_t = 8)]
    jet_order: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Full,
    O1,
    Gl1,
    Duminy,
}

#[derive(Subcommand)]
enum Command {
    /// Cohomology dimensions of a (degree, weight-window) block.
    GfCohomology {
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
        weight_min: i64,
        #[arg(long, default_value_t = 6, allow_negative_numbers = true)]
        weight_max: i64,
        /// Truncation index for the divisible subcomplex.
        #[arg(long, default_value_t = 4)]
        max_index: u32,
    },
    /// Symbolic structure identities of the canonical forms plus random
    /// invariance spot checks.
    Identities {
        #[arg(long, default_value_t = 16)]
        invariance_checks: u32,
    },
    /// Connection cocycle verification against a scenario configuration.
    Connection {
        #[command(subcommand)]
        action: ConnectionAction,
    },
    /// Fiber integration of a quotient-chart form.
    Gysin {
        /// Form specification, e.g. `gvl`, `cl1`, or `x1*dx1^dx0 - dx2^dx0`.
        #[arg(long)]
        form: String,
    },
    /// Rotation number of a circle-map lift by Birkhoff averaging.
    Rotation {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 1_000_000)]
        iters: u64,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
    },
    /// Continued-fraction Diophantine diagnostics of a constant.
    Diophantine {
        /// Constant expression, e.g. `(sqrt(5)-1)/2`.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Derivative identity of a flow-generating field at sample points.
    Szekeres {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated sample points.
        #[arg(long, default_value = "0.1,0.2,0.5", allow_hyphen_values = true)]
        samples: String,
    },
    /// Orbit probe of a blow-up profile: derivative ratios and log growth.
    ReebProbe {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 12)]
        nmax: u32,
    },
    /// Locate and classify fixed points of a map on a window.
    FixedPoints {
        #[command(flatten)]
        map: MapArg,
        /// Window `a,b` to scan (defaults to the map's domain).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 257)]
        grid: usize,
    },
    /// Run a named or file-based scenario and write its report.
    Scenario {
        #[arg(long, conflicts_with = "config")]
        name: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the JSON report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Subcommand)]
enum ConnectionAction {
    /// Verify a candidate from a scenario configuration file.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Affine)]
        kind: KindArg,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum KindArg {
    Affine,
    Projective,
}

/// A map given either as a closed-form lift expression or as a conjugated
/// shift `profile⁻¹(profile(x) + shift)`.
#[derive(Args)]
struct MapArg {
    /// Closed-form map expression in `x`.
    #[arg(long)]
    map: Option<String>,
    /// Monotone profile for a conjugated shift.
    #[arg(long, requires = "shift", conflicts_with = "map")]
    profile: Option<String>,
    /// Shift amount for the conjugated form.
    #[arg(long, requires = "profile")]
    shift: Option<f64>,
    /// Domain `a,b` for non-lift explicit maps.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
}

impl MapArg {
    fn build(&self, as_lift: bool) -> Result<LocalDiffeo> {
        let domain = match &self.domain {
            Some(text) => {
                let (a, b) = parse_pair(text)?;
                Interval::new(a, b)
            }
            None => Interval::real_line(),
        };
        match (&self.map, &self.profile, self.shift) {
            (Some(expr), None, None) => {
                let ast = parse(expr).map_err(|e| anyhow!("--map: {e}"))?;
                if as_lift {
                    LocalDiffeo::circle_lift(ast).map_err(|e| anyhow!("--map: {e}"))
                } else {
                    Ok(LocalDiffeo::explicit(ast, domain))
                }
            }
            (None, Some(profile), Some(shift)) => {
                let ast = parse(profile).map_err(|e| anyhow!("--profile: {e}"))?;
                if as_lift {
                    LocalDiffeo::conjugated_shift_lift(ast, shift)
                        .map_err(|e| anyhow!("--profile: {e}"))
                } else {
                    LocalDiffeo::conjugated_shift(ast, shift, domain)
                        .map_err(|e| anyhow!("--profile: {e}"))
                }
            }
            _ => bail!("give either --map EXPR or --profile EXPR --shift S"),
        }
    }
}

fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("expected `a,b`, got `{text}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn parse_samples(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("bad sample: {e}")))
        .collect()
}

/// Renders a coefficient polynomial with `x{k}` variable names.
fn render_poly(p: &MultiPoly<Q>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (mono, coeff) in p.terms() {
        let mut s = coeff.to_string();
        for (v, e) in mono {
            s.push_str(&format!("*x{v}"));
            if *e != 1 {
                s.push_str(&format!("^{e}"));
            }
        }
        parts.push(s);
    }
    parts.join(" + ").replace("+ -", "- ")
}

fn render_form(form: &CoordForm) -> Value {
    let chart = match form.chart {
        Chart::X => "x",
        Chart::Y => "y",
    };
    let terms: Vec<Value> = form
        .terms()
        .map(|(tuple, coeff)| {
            json!({
                "differentials": tuple,
                "coefficient": render_poly(coeff),
            })
        })
        .collect();
    json!({ "chart": chart, "is_zero": form.is_zero(), "terms": terms })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((output, outcome)) => {
            print!("{output}");
            ExitCode::from(outcome.code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(Outcome::ConfigError.code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(String, Outcome)> {
    if !(2..=16).contains(&cli.jet_order) {
        bail!("--jet-order must be between 2 and 16");
    }
    match &cli.command {
        Command::GfCohomology { flavor, degree, weight_min, weight_max, max_index } => {
            gf_cohomology(cli, *flavor, *degree, *weight_min, *weight_max, *max_index)
        }
        Command::Identities { invariance_checks } => identities(cli, *invariance_checks),
        Command::Connection { action } => match action {
            ConnectionAction::Verify { config, kind } => {
                connection_verify(cli, config, *kind)
            }
        },
        Command::Gysin { form } => gysin(cli, form),
        Command::Rotation { map, iters, start } => rotation(cli, map, *iters, *start),
        Command::Diophantine { alpha, cap } => diophantine(cli, alpha, *cap),
        Command::Szekeres { field, n, samples } => szekeres(cli, field, *n, samples),
        Command::ReebProbe { profile, nmax } => reeb(cli, profile, *nmax),
        Command::FixedPoints { map, window, grid } => {
            fixed_points(cli, map, window.as_deref(), *grid)
        }
        Command::Scenario { name, config, out } => {
            scenario(cli, name.as_deref(), config.as_deref(), out.as_deref())
        }
        Command::ListScenarios => list_scenarios(cli),
    }
}

fn gf_cohomology(
    cli: &Cli,
    flavor: FlavorArg,
    degree: Option<usize>,
    w_lo: i64,
    w_hi: i64,
    max_index: u32,
) -> Result<(String, Outcome)> {
    if w_lo > w_hi {
        bail!("--weight-min exceeds --weight-max");
    }
    let payload = match flavor {
        FlavorArg::Duminy => {
            if max_index < 2 {
                bail!("--max-index must be at least 2");
            }
            let report = duminy_cohomology(max_index);
            if cli.csv {
                let rows: Vec<Vec<String>> = report
                    .degrees
                    .iter()
                    .map(|d| vec![d.degree.to_string(), d.dim.to_string()])
                    .collect();
                return Ok((csv_table(&["degree", "dim"], &rows), Outcome::Pass));
            }
            serde_json::to_value(&report)?
        }
        _ => {
            let flavor = match flavor {
                FlavorArg::Full => Flavor::Full,
                FlavorArg::O1 => Flavor::RelativeO1,
                FlavorArg::Gl1 => Flavor::RelativeGl1,
                FlavorArg::Duminy => unreachable!(),
            };
            let degree =
                degree.ok_or_else(|| anyhow!("--degree is required for this flavor"))?;
            let summary = cohomology_dim(flavor, degree, w_lo, w_hi);
            if cli.csv {
                let rows: Vec<Vec<String>> = summary
                    .by_weight
                    .iter()
                    .map(|w| {
                        vec![
                            w.weight.to_string(),
                            w.dim.to_string(),
                            w.basis_size.to_string(),
                        ]
                    })
                    .collect();
                return Ok((
                    csv_table(&["weight", "dim", "basis_size"], &rows),
                    Outcome::Pass,
                ));
            }
            serde_json::to_value(&summary)?
        }
    };
    let doc = envelope("gf-cohomology", cli.seed, cli.jet_order, "pass", payload);
    Ok((to_pretty(&doc), Outcome::Pass))
}

fn identities(cli: &Cli, invariance_checks: u32) -> Result<(String, Outcome)> {
    let symbolic = structure_identities();
    let (worst, worst_case) = invariance_spot_checks(cli.seed, invariance_checks);
    let tol = cli.tol.unwrap_or(1e-9);
    let pass = symbolic.all_hold && worst <= tol;
    let payload = json!({
        "symbolic": symbolic,
        "invariance": {
            "cases": invariance_checks,
            "max_defect": worst,
            "tolerance": tol,
            "worst": worst_case,
        },
    });
    let status = if pass { "pass" } else { "fail" };
    let doc = envelope("identities", cli.seed, cli.jet_order, status, payload);
    let outcome = if pass { Outcome::Pass } else { Outcome::CheckFailed };
    Ok((to_pretty(&doc), outcome))
}

fn connection_verify(cli: &Cli, config: &std::path::Path, kind: KindArg) -> Result<(String, Outcome)> {
    let cfg = load_config(config)?;
    // Keep only the matching connection checks from the file.
    let filtered: Vec<_> = cfg
        .checks
        .iter()
        .filter(|c| match kind {
            KindArg::Affine => {
                matches!(c, folcc::config::CheckConfig::AffineConnection { .. })
            }
            KindArg::Projective => {
                matches!(c, folcc::config::CheckConfig::ProjectiveConnection { .. })
            }
        })
        .cloned()
        .collect();
    if filtered.is_empty() {
        bail!("the configuration has no matching connection check");
    }
    let narrowed = ScenarioConfig { checks: filtered, ..cfg };
    let (mut doc, outcome) = run_scenario(&narrowed, cli.seed, cli.jet_order)?;
    if let Some(obj) = doc.as_object_mut() {
        obj.insert("command".into(), json!("connection-verify"));
    }
    Ok((to_pretty(&doc), outcome))
}

fn gysin(cli: &Cli, form: &str) -> Result<(String, Outcome)> {
    let input = parse_form(form)?;
    let integrated = input
        .gysin()
        .map_err(|e| anyhow!("fiber integration failed: {e}"))?;
    let payload = json!({
        "input": render_form(&input),
        "pushforward": render_form(&integrated),
    });
    let doc = envelope("gysin", cli.seed, cli.jet_order, "pass", payload);
    Ok((to_pretty(&doc), Outcome::Pass))
}

fn rotation(cli: &Cli, map: &MapArg, iters: u64, start: f64) -> Result<(String, Outcome)> {
    let phi = map.build(true)?;
    let estimate = rotation_number(&phi, iters, start)
        .map_err(|e| anyhow!("rotation number: {e}"))?;
    if cli.csv {
        let rows = vec![vec![
            estimate.iterations.to_string(),
            fnum(estimate.raw),
            fnum(estimate.reduced),
            fnum(estimate.error_bound),
        ]];
        return Ok((
            csv_table(&["iterations", "raw", "reduced", "error_bound"], &rows),
            Outcome::Pass,
        ));
    }
    let doc = envelope(
        "rotation",
        cli.seed,
        cli.jet_order,
        "pass",
        serde_json::to_value(&estimate)?,
    );
    Ok((to_pretty(&doc), Outcome::Pass))
}

fn diophantine(cli: &Cli, alpha_src: &str, cap: u64) -> Result<(String, Outcome)> {
    let ast = parse(alpha_src).map_err(|e| anyhow!("--alpha: {e}"))?;
    let alpha = eval(&ast, 0.0, &EvalOptions::default())
        .map_err(|e| anyhow!("--alpha does not evaluate: {e}"))?;
    let report =
        diophantine_exponent(alpha, cap).map_err(|e| anyhow!("diophantine: {e}"))?;
    if cli.csv {
        let rows: Vec<Vec<String>> = report
            .convergents
            .iter()
            .map(|c| {
                vec![
                    c.p.to_string(),
                    c.q.to_string(),
                    fnum(c.error),
                    c.exponent.map(fnum).unwrap_or_default(),
                ]
            })
            .collect();
        return Ok((
            csv_table(&["p", "q", "error", "exponent"], &rows),
            Outcome::Pass,
        ));
    }
    let doc = envelope(
        "diophantine",
        cli.seed,
        cli.jet_order,
        "pass",
        serde_json::to_value(&report)?,
    );
    Ok((to_pretty(&doc), Outcome::Pass))
}

fn szekeres(cli: &Cli, field: &str, n: usize, samples: &str) -> Result<(String, Outcome)> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let ast = parse(field).map_err(|e| anyhow!("--field: {e}"))?;
    let xs = parse_samples(samples)?;
    let report = folcc_core::dynamics::verify_szekeres_identity(&ast, n, &xs)
        .map_err(|e| anyhow!("identity check: {e}"))?;
    let tol = cli.tol.unwrap_or(1e-8);
    let pass = report.max_residual <= tol;
    if cli.csv {
        let rows: Vec<Vec<String>> = report
            .samples
            .iter()
            .map(|(x, r)| vec![fnum(*x), fnum(*r)])
            .collect();
        return Ok((
            csv_table(&["x", "residual"], &rows),
            if pass { Outcome::Pass } else { Outcome::CheckFailed },
        ));
    }
    let status = if pass { "pass" } else { "fail" };
    let doc = envelope(
        "szekeres",
        cli.seed,
        cli.jet_order,
        status,
        json!({ "report": report, "tolerance": tol }),
    );
    let outcome = if pass { Outcome::Pass } else { Outcome::CheckFailed };
    Ok((to_pretty(&doc), outcome))
}

fn reeb(cli: &Cli, profile: &str, nmax: u32) -> Result<(String, Outcome)> {
    let ast = parse(profile).map_err(|e| anyhow!("--profile: {e}"))?;
    let report = reeb_probe(&ast, nmax).map_err(|e| anyhow!("probe: {e}"))?;
    let (pass, assessment) = assess_reeb_probe(&report);
    if cli.csv {
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .chain(report.geometric_rows.iter())
            .map(|r| {
                vec![
                    fnum(r.n),
                    fnum(r.x0),
                    fnum(r.ratios[0]),
                    fnum(r.ratios[1]),
                    fnum(r.ratios[2]),
                    fnum(r.ln_fprime),
                    fnum(r.ln_fprime_over_f),
                ]
            })
            .collect();
        return Ok((
            csv_table(
                &["n", "x0", "ratio2", "ratio3", "ratio4", "ln_fprime", "ln_fprime_over_f"],
                &rows,
            ),
            if pass { Outcome::Pass } else { Outcome::CheckFailed },
        ));
    }
    let status = if pass { "pass" } else { "fail" };
    let doc = envelope(
        "reeb-probe",
        cli.seed,
        cli.jet_order,
        status,
        json!({ "assessment": assessment, "table": report }),
    );
    let outcome = if pass { Outcome::Pass } else { Outcome::CheckFailed };
    Ok((to_pretty(&doc), outcome))
}

fn fixed_points(
    cli: &Cli,
    map: &MapArg,
    window: Option<&str>,
    grid: usize,
) -> Result<(String, Outcome)> {
    let phi = map.build(false)?;
    let w = match window {
        Some(text) => {
            let (a, b) = parse_pair(text)?;
            Interval::new(a, b)
        }
        None => {
            let d = phi.domain();
            if !d.is_bounded() {
                bail!("--window a,b is required for maps on unbounded domains");
            }
            d
        }
    };
    let tol = cli.tol.unwrap_or(1e-9);
    let records = classify_fixed_points(&phi, w, grid, tol)
        .map_err(|e| anyhow!("classification: {e}"))?;
    if cli.csv {
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| {
                vec![
                    fnum(r.point),
                    fnum(r.derivative),
                    format!("{:?}", r.class).to_lowercase(),
                    r.left_semi_isolated.map(|b| b.to_string()).unwrap_or_default(),
                    r.right_semi_isolated.map(|b| b.to_string()).unwrap_or_default(),
                    fnum(r.resolution),
                ]
            })
            .collect();
        return Ok((
            csv_table(
                &["point", "derivative", "class", "left_isolated", "right_isolated", "resolution"],
                &rows,
            ),
            Outcome::Pass,
        ));
    }
    let doc = envelope(
        "fixed-points",
        cli.seed,
        cli.jet_order,
        "pass",
        json!({ "tolerance": tol, "records": records }),
    );
    Ok((to_pretty(&doc), Outcome::Pass))
}

fn scenario(
    cli: &Cli,
    name: Option<&str>,
    config: Option<&std::path::Path>,
    out: Option<&std::path::Path>,
) -> Result<(String, Outcome)> {
    let cfg = match (name, config) {
        (Some(n), None) => {
            find_builtin(n).ok_or_else(|| anyhow!("no built-in scenario named `{n}`"))?
        }
        (None, Some(path)) => load_config(path)?,
        _ => bail!("give exactly one of --name or --config"),
    };
    let (doc, outcome) = run_scenario(&cfg, cli.seed, cli.jet_order)?;
    let text = to_pretty(&doc);
    if let Some(path) = out {
        std::fs::write(path, &text)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok((text, outcome))
}

fn list_scenarios(cli: &Cli) -> Result<(String, Outcome)> {
    let list: Vec<Value> = builtin_scenarios()
        .iter()
        .map(|s| {
            json!({
                "name": s.name,
                "description": s.description,
                "generators": s.presentation.generators.len(),
                "checks": s.checks.len(),
            })
        })
        .collect();
    let doc = envelope(
        "list-scenarios",
        cli.seed,
        cli.jet_order,
        "pass",
        json!({ "scenarios": list }),
    );
    Ok((to_pretty(&doc), Outcome::Pass))
}

//! Scenario configuration: a human-editable TOML file naming a
//! presentation (chart plus generators) and a list of checks to run.
//!
//! ```toml
//! name = "resilient"
//! description = "unit shift and halving on the line"
//!
//! [presentation]
//! window = [-2.0, 2.0]        # sampling window; chart defaults to the line
//!
//! [[presentation.generators]]
//! name = "shift"
//! kind = "explicit"
//! expr = "x + 1"
//!
//! [[presentation.generators]]
//! name = "halving"
//! kind = "explicit"
//! expr = "x/2"
//!
//! [[checks]]
//! kind = "affine-connection"
//! candidate = "0"
//! ```

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use folcc_core::dynamics::{Interval, LocalDiffeo, PseudogroupPresentation};
use folcc_core::expr::{parse, ExprAst};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub presentation: PresentationConfig,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationConfig {
    /// Chart interval; omitted means the whole line.
    pub chart: Option<[f64; 2]>,
    /// Finite sampling window for grid checks on unbounded charts.
    pub window: Option<[f64; 2]>,
    pub generators: Vec<GeneratorConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "kebab-case", deny_unknown_fields)]
pub enum GeneratorConfig {
    /// Closed-form map.
    Explicit {
        name: String,
        expr: String,
        domain: Option<[f64; 2]>,
    },
    /// `x ↦ f⁻¹(f(x) + shift)`.
    ConjugatedShift {
        name: String,
        profile: String,
        shift: f64,
        domain: Option<[f64; 2]>,
        /// Mark (and verify) the map as a lift of a circle map.
        #[serde(default)]
        lift: bool,
    },
    /// The holonomy generator of a compact leaf: a conjugated unit shift
    /// of `profile` on `domain`, extended by the identity up to the chart
    /// end.
    HolonomyShift {
        name: String,
        profile: String,
        domain: [f64; 2],
        extend_to: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "kebab-case", deny_unknown_fields)]
pub enum CheckConfig {
    /// Symbolic structure identities plus randomized invariance spot
    /// checks of the canonical forms.
    Identities {
        #[serde(default)]
        invariance_samples: Option<u32>,
    },
    AffineConnection {
        candidate: Option<String>,
        candidate_from_conjugacy: Option<String>,
        tolerance: Option<f64>,
    },
    ProjectiveConnection {
        candidate: Option<String>,
        tolerance: Option<f64>,
    },
    ReebProbe {
        profile: String,
        n_max: u32,
    },
    FixedPoints {
        generator: String,
        window: Option<[f64; 2]>,
        #[serde(default)]
        grid: Option<usize>,
        tolerance: Option<f64>,
    },
}

fn interval(pair: Option<[f64; 2]>) -> Interval {
    match pair {
        Some([lo, hi]) => Interval::new(lo, hi),
        None => Interval::real_line(),
    }
}

fn parse_expr(src: &str, what: &str) -> Result<ExprAst> {
    parse(src).with_context(|| format!("cannot parse {what}: `{src}`"))
}

pub fn build_generator(cfg: &GeneratorConfig, chart: Interval) -> Result<(String, LocalDiffeo)> {
    match cfg {
        GeneratorConfig::Explicit { name, expr, domain } => {
            let ast = parse_expr(expr, "generator expression")?;
            let dom = match domain {
                Some(pair) => interval(Some(*pair)),
                None => chart,
            };
            Ok((name.clone(), LocalDiffeo::explicit(ast, dom)))
        }
        GeneratorConfig::ConjugatedShift { name, profile, shift, domain, lift } => {
            let ast = parse_expr(profile, "conjugated-shift profile")?;
            let map = if *lift {
                LocalDiffeo::conjugated_shift_lift(ast, *shift)
                    .map_err(|e| anyhow!("generator `{name}`: {e}"))?
            } else {
                let dom = match domain {
                    Some(pair) => interval(Some(*pair)),
                    None => chart,
                };
                LocalDiffeo::conjugated_shift(ast, *shift, dom)
                    .map_err(|e| anyhow!("generator `{name}`: {e}"))?
            };
            Ok((name.clone(), map))
        }
        GeneratorConfig::HolonomyShift { name, profile, domain, extend_to } => {
            let ast = parse_expr(profile, "holonomy profile")?;
            let map = holonomy_shift(ast, *domain, *extend_to)
                .map_err(|e| anyhow!("generator `{name}`: {e}"))?;
            Ok((name.clone(), map))
        }
    }
}

/// Conjugated unit shift on `domain`, extended by the identity out to
/// `extend_to`. The overall domain stretches from the shift region to the
/// extension end, with the identity branch taking over at the boundary.
pub fn holonomy_shift(
    profile: ExprAst,
    domain: [f64; 2],
    extend_to: f64,
) -> Result<LocalDiffeo, folcc_core::dynamics::DynError> {
    let [lo, hi] = domain;
    let shift_region = Interval::new(lo, hi);
    let shifted = LocalDiffeo::conjugated_shift(profile, 1.0, shift_region)?;
    if extend_to > hi {
        // A hair of overlap so the boundary point itself takes the
        // identity branch.
        let pad = 1e-12 * (1.0 + hi.abs());
        let extension = Interval::new(hi - pad, extend_to);
        Ok(LocalDiffeo::piecewise(
            vec![
                (shift_region, shifted),
                (extension, LocalDiffeo::identity(extension)),
            ],
            Interval::new(lo, extend_to),
        ))
    } else if extend_to < lo {
        let pad = 1e-12 * (1.0 + lo.abs());
        let extension = Interval::new(extend_to, lo + pad);
        Ok(LocalDiffeo::piecewise(
            vec![
                (extension, LocalDiffeo::identity(extension)),
                (shift_region, shifted),
            ],
            Interval::new(extend_to, hi),
        ))
    } else {
        Ok(shifted)
    }
}

pub fn build_presentation(cfg: &ScenarioConfig) -> Result<PseudogroupPresentation> {
    let chart = interval(cfg.presentation.chart);
    if cfg.presentation.generators.is_empty() {
        bail!("presentation needs at least one generator");
    }
    let mut generators = Vec::new();
    for g in &cfg.presentation.generators {
        generators.push(build_generator(g, chart)?);
    }
    PseudogroupPresentation::new(cfg.name.clone(), cfg.description.clone(), chart, generators)
        .map_err(|e| anyhow!("invalid presentation: {e}"))
}

pub fn load_config(path: &std::path::Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let cfg: ScenarioConfig =
        toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn window(&self) -> Option<(f64, f64)> {
        self.presentation.window.map(|[a, b]| (a, b))
    }
}

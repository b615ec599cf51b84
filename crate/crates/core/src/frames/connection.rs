//! Transverse connection candidates and their cocycle verification.
//!
//! An affine connection assigns to the chart coordinate `w` a Christoffel
//! function `T_w`; under a chart morphism `t = φ(w)` the cocycle law is
//!
//! ```text
//! T_t(φ(w)) + φ''(w)/(φ'(w))² = T_w(w)/φ'(w).
//! ```
//!
//! A projective connection assigns `q_w` transforming through the
//! Schwarzian derivative:
//!
//! ```text
//! q_t(φ(w)) · (φ'(w))² = q_w(w) - S(φ)(w),
//! S(φ) = φ'''/φ' - (3/2)(φ''/φ')².
//! ```

use serde::Serialize;

use super::FramesError;
use crate::dynamics::{LocalDiffeo, PseudogroupPresentation};
use crate::expr::{eval, EvalOptions, ExprAst};

/// Sampling plan for cocycle verification.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub samples: usize,
    /// Fraction of the interval length trimmed from each endpoint;
    /// generators may lose regularity at the ends.
    pub trim: f64,
    /// Finite sampling window, required for unbounded charts.
    pub window: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { samples: 256, trim: 0.01, window: None }
    }
}

impl GridSpec {
    pub fn with_window(window: (f64, f64)) -> Self {
        GridSpec { window: Some(window), ..Default::default() }
    }
}

/// Per-chart connection data: a closed-form function of the coordinate.
#[derive(Debug, Clone)]
pub struct ConnectionCandidate {
    pub expr: ExprAst,
}

impl ConnectionCandidate {
    pub fn new(expr: ExprAst) -> Self {
        ConnectionCandidate { expr }
    }

    pub fn zero() -> Self {
        ConnectionCandidate { expr: ExprAst::int(0) }
    }
}

/// The Schwarzian derivative of `h` at `w`.
pub fn schwarzian(h: &LocalDiffeo, w: f64) -> Result<f64, FramesError> {
    let jet = h
        .jet_at(w, 3)
        .map_err(|e| FramesError::MapEvaluation(e.to_string()))?;
    let d1 = *jet.deriv(1);
    if d1 == 0.0 || !d1.is_finite() {
        return Err(FramesError::NotRegular);
    }
    let d2 = *jet.deriv(2);
    let d3 = *jet.deriv(3);
    Ok(d3 / d1 - 1.5 * (d2 / d1).powi(2))
}

/// Residual of the affine cocycle at one point, with independent source
/// and target chart functions.
pub fn affine_cocycle_residual(
    phi: &LocalDiffeo,
    t_source: &ExprAst,
    t_target: &ExprAst,
    w: f64,
) -> Result<f64, FramesError> {
    let opts = EvalOptions::default();
    let jet = phi
        .jet_at(w, 2)
        .map_err(|e| FramesError::MapEvaluation(e.to_string()))?;
    let image = *jet.value();
    let d1 = *jet.deriv(1);
    let d2 = *jet.deriv(2);
    if d1 == 0.0 || !d1.is_finite() {
        return Err(FramesError::NotRegular);
    }
    let t_at_image = eval(t_target, image, &opts)?;
    let t_here = eval(t_source, w, &opts)?;
    Ok((t_at_image + d2 / (d1 * d1) - t_here / d1).abs())
}

/// Residual of the projective cocycle at one point.
pub fn projective_cocycle_residual(
    phi: &LocalDiffeo,
    q_source: &ExprAst,
    q_target: &ExprAst,
    w: f64,
) -> Result<f64, FramesError> {
    let opts = EvalOptions::default();
    let jet = phi
        .jet_at(w, 3)
        .map_err(|e| FramesError::MapEvaluation(e.to_string()))?;
    let image = *jet.value();
    let d1 = *jet.deriv(1);
    if d1 == 0.0 || !d1.is_finite() {
        return Err(FramesError::NotRegular);
    }
    let s = schwarzian(phi, w)?;
    let q_at_image = eval(q_target, image, &opts)?;
    let q_here = eval(q_source, w, &opts)?;
    Ok((q_at_image * d1 * d1 - (q_here - s)).abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCheck {
    pub name: String,
    pub max_residual: f64,
    pub worst_point: f64,
    pub evaluated: usize,
    pub skipped: usize,
    /// First few evaluation failures, as point and message.
    pub errors: Vec<(f64, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectionReport {
    pub kind: String,
    pub tolerance: f64,
    pub pass: bool,
    pub generators: Vec<GeneratorCheck>,
}

pub const DEFAULT_COCYCLE_TOLERANCE: f64 = 1e-8;

fn verify_cocycle(
    kind: &str,
    pres: &PseudogroupPresentation,
    cand: &ConnectionCandidate,
    grid: &GridSpec,
    tol: f64,
    residual: impl Fn(&LocalDiffeo, &ExprAst, f64) -> Result<f64, FramesError>,
) -> ConnectionReport {
    let mut generators = Vec::new();
    let mut pass = true;
    for (name, phi) in pres.generators() {
        let points = phi.domain().samples(grid.samples, grid.trim, grid.window);
        let mut check = GeneratorCheck {
            name: name.clone(),
            max_residual: 0.0,
            worst_point: f64::NAN,
            evaluated: 0,
            skipped: 0,
            errors: Vec::new(),
        };
        for w in points {
            match residual(phi, &cand.expr, w) {
                Ok(r) => {
                    check.evaluated += 1;
                    if r > check.max_residual {
                        check.max_residual = r;
                        check.worst_point = w;
                    }
                }
                Err(e) => {
                    check.skipped += 1;
                    if check.errors.len() < 4 {
                        check.errors.push((w, e.to_string()));
                    }
                }
            }
        }
        if check.evaluated == 0 || check.max_residual > tol {
            pass = false;
        }
        generators.push(check);
    }
    ConnectionReport { kind: kind.into(), tolerance: tol, pass, generators }
}

/// Verifies the affine cocycle for every generator over the grid; the same
/// chart function serves as source and target because the generators are
/// chart self-morphisms.
pub fn verify_affine_connection(
    pres: &PseudogroupPresentation,
    cand: &ConnectionCandidate,
    grid: &GridSpec,
    tol: f64,
) -> ConnectionReport {
    verify_cocycle("affine", pres, cand, grid, tol, |phi, t, w| {
        affine_cocycle_residual(phi, t, t, w)
    })
}

/// Verifies the projective cocycle for every generator over the grid.
pub fn verify_projective_connection(
    pres: &PseudogroupPresentation,
    cand: &ConnectionCandidate,
    grid: &GridSpec,
    tol: f64,
) -> ConnectionReport {
    verify_cocycle("projective", pres, cand, grid, tol, |phi, q, w| {
        projective_cocycle_residual(phi, q, q, w)
    })
}

/// Builds the Christoffel function from a conjugacy to shifts or
/// rotations: when `F ∘ φ = F + α` for every generator `φ`, then
/// `ln F'(φ(w)) = ln F'(w) - ln φ'(w)`, and differentiating shows that
///
/// ```text
/// T = (d/dz) ln F' = F''/F'
/// ```
///
/// satisfies the affine cocycle above for each generator. Requires a
/// closed-form conjugacy.
pub fn connection_from_conjugacy(f: &LocalDiffeo) -> Result<ConnectionCandidate, FramesError> {
    let ast = f
        .expression()
        .ok_or_else(|| FramesError::MapEvaluation(
            "conjugacy must be a closed-form map".into(),
        ))?;
    let first = ast.derivative();
    let second = first.derivative();
    Ok(ConnectionCandidate::new(ExprAst::div(second, first)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Interval;
    use crate::expr::parse;

    fn single(
        name: &str,
        phi: LocalDiffeo,
        chart: Interval,
    ) -> PseudogroupPresentation {
        PseudogroupPresentation::new(name, "", chart, vec![(name.into(), phi)]).unwrap()
    }

    #[test]
    fn schwarzian_of_moebius_maps_vanishes() {
        // (2w + 1)/(w + 3) and relatives.
        let h = LocalDiffeo::explicit(
            parse("(2*x+1)/(x+3)").unwrap(),
            Interval::new(-2.0, 5.0),
        );
        for &w in &[-1.5, 0.0, 0.7, 3.9] {
            assert!(schwarzian(&h, w).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn schwarzian_of_exponential_is_minus_half() {
        let h = LocalDiffeo::explicit(parse("exp(x)").unwrap(), Interval::real_line());
        for &w in &[-1.0, 0.0, 0.5, 2.0] {
            assert!((schwarzian(&h, w).unwrap() + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn schwarzian_of_affine_maps_vanishes() {
        let h = LocalDiffeo::explicit(parse("3*x - 7").unwrap(), Interval::real_line());
        assert_eq!(schwarzian(&h, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn schwarzian_cocycle_identity() {
        // S(φ∘ψ)(w) = S(φ)(ψ(w)) ψ'(w)² + S(ψ)(w).
        let phi_ast = parse("exp(x) + x^2").unwrap();
        let psi_ast = parse("x + sin(x)/3").unwrap();
        let phi = LocalDiffeo::explicit(phi_ast.clone(), Interval::real_line());
        let psi = LocalDiffeo::explicit(psi_ast.clone(), Interval::real_line());
        let comp = LocalDiffeo::explicit(phi_ast.compose(&psi_ast), Interval::real_line());
        for &w in &[-0.8, 0.1, 0.9] {
            let psi_w = psi.value(w).unwrap();
            let dpsi = psi.derivative(w).unwrap();
            let lhs = schwarzian(&comp, w).unwrap();
            let rhs = schwarzian(&phi, psi_w).unwrap() * dpsi * dpsi
                + schwarzian(&psi, w).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-9 * 1.0f64.max(lhs.abs()),
                "w = {w}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn zero_christoffel_passes_for_linear_generators() {
        let pres = single(
            "hyperbolic",
            LocalDiffeo::explicit(parse("x/2").unwrap(), Interval::real_line()),
            Interval::real_line(),
        );
        let grid = GridSpec::with_window((-2.0, 2.0));
        let report = verify_affine_connection(
            &pres,
            &ConnectionCandidate::zero(),
            &grid,
            DEFAULT_COCYCLE_TOLERANCE,
        );
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn zero_christoffel_passes_for_translations() {
        let pres = single(
            "translation",
            LocalDiffeo::explicit(parse("x+1").unwrap(), Interval::real_line()),
            Interval::real_line(),
        );
        let grid = GridSpec::with_window((-2.0, 2.0));
        let report = verify_affine_connection(
            &pres,
            &ConnectionCandidate::zero(),
            &grid,
            DEFAULT_COCYCLE_TOLERANCE,
        );
        assert!(report.pass);
    }

    #[test]
    fn zero_christoffel_passes_on_the_orbifold_reflection() {
        let pres = single(
            "reflection",
            LocalDiffeo::explicit(parse("-x").unwrap(), Interval::new(-1.0, 1.0)),
            Interval::new(-1.0, 1.0),
        );
        let report = verify_affine_connection(
            &pres,
            &ConnectionCandidate::zero(),
            &GridSpec::default(),
            DEFAULT_COCYCLE_TOLERANCE,
        );
        assert!(report.pass);
    }

    #[test]
    fn wrong_candidate_fails() {
        let pres = single(
            "hyperbolic",
            LocalDiffeo::explicit(parse("x/2").unwrap(), Interval::real_line()),
            Interval::real_line(),
        );
        let grid = GridSpec::with_window((1.0, 2.0));
        let cand = ConnectionCandidate::new(parse("1").unwrap());
        let report =
            verify_affine_connection(&pres, &cand, &grid, DEFAULT_COCYCLE_TOLERANCE);
        assert!(!report.pass);
    }

    #[test]
    fn conjugacy_construction_for_perturbed_rotation() {
        // φ = F⁻¹ ∘ (z + α) ∘ F with F(z) = z + ε sin(2πz).
        let alpha = 0.41421356237309515;
        let f_ast = parse("x + 0.12*sin(6.283185307179586*x)").unwrap();
        let f = LocalDiffeo::explicit(f_ast.clone(), Interval::real_line());
        let phi = LocalDiffeo::conjugated_shift_lift(f_ast, alpha).unwrap();
        let pres = PseudogroupPresentation::new(
            "conjugated-rotation",
            "",
            Interval::real_line(),
            vec![("phi".into(), phi)],
        )
        .unwrap();
        let cand = connection_from_conjugacy(&f).unwrap();
        let grid = GridSpec::with_window((0.0, 1.0));
        let report =
            verify_affine_connection(&pres, &cand, &grid, DEFAULT_COCYCLE_TOLERANCE);
        assert!(report.pass, "{report:?}");
        // With ε = 0 the construction degenerates to T ≡ 0.
        let trivial =
            connection_from_conjugacy(&LocalDiffeo::identity(Interval::real_line()))
                .unwrap();
        let opts = EvalOptions::default();
        for &z in &[0.0, 0.4, 1.3] {
            assert_eq!(eval(&trivial.expr, z, &opts).unwrap(), 0.0);
        }
    }

    #[test]
    fn projective_cocycle_moebius_with_zero_candidate() {
        let pres = single(
            "moebius",
            LocalDiffeo::explicit(parse("x/(1+x)").unwrap(), Interval::new(0.0, 4.0)),
            Interval::new(0.0, 4.0),
        );
        let report = verify_projective_connection(
            &pres,
            &ConnectionCandidate::zero(),
            &GridSpec::default(),
            DEFAULT_COCYCLE_TOLERANCE,
        );
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn projective_cocycle_for_the_exponential_chart_change() {
        // φ(w) = e^w with q_w ≡ 0 and q_t(t) = 1/(2t²):
        // q_t(e^w) e^{2w} = 1/2 = 0 - S(e^w).
        let phi = LocalDiffeo::explicit(parse("exp(x)").unwrap(), Interval::new(-2.0, 2.0));
        let q_source = parse("0").unwrap();
        let q_target = parse("1/(2*x^2)").unwrap();
        for &w in &[-1.5, -0.3, 0.0, 1.2, 1.9] {
            let r = projective_cocycle_residual(&phi, &q_source, &q_target, w).unwrap();
            assert!(r < 1e-12, "w = {w}: {r}");
        }
    }

    #[test]
    fn identity_generator_accepts_any_matching_candidate() {
        let pres = single(
            "identity",
            LocalDiffeo::identity(Interval::new(0.5, 2.0)),
            Interval::new(0.5, 2.0),
        );
        let cand = ConnectionCandidate::new(parse("sin(x) + x^2").unwrap());
        let affine = verify_affine_connection(
            &pres,
            &cand,
            &GridSpec::default(),
            DEFAULT_COCYCLE_TOLERANCE,
        );
        assert!(affine.pass);
        let projective = verify_projective_connection(
            &pres,
            &cand,
            &GridSpec::default(),
            DEFAULT_COCYCLE_TOLERANCE,
        );
        assert!(projective.pass);
    }
}

//! Randomized invariants: differentiation against finite differences,
//! chain rules, functoriality of the prolonged action, reversion against
//! the Lagrange-inversion oracle, differential-algebra laws, and dynamics
//! consistency checks.

use num::traits::Zero;
use proptest::prelude::*;

use folcc_core::expr::{self, eval, eval_jet, eval_jet_exact, EvalOptions, ExprAst};
use folcc_core::gf::ExteriorCochain;
use folcc_core::jets::{prolong, Jet};
use folcc_core::{qi, qr, Q};

fn opts() -> EvalOptions {
    EvalOptions::default()
}

// ---------------------------------------------------------------------
// Expression ASTs
// ---------------------------------------------------------------------

/// Random polynomial expression trees of bounded depth.
fn polynomial_ast(depth: u32) -> BoxedStrategy<ExprAst> {
    let leaf = prop_oneof![
        (-6i64..=6).prop_map(ExprAst::int),
        ((-6i64..=6), (1i64..=4)).prop_map(|(p, q)| ExprAst::constant(qr(p, q))),
        Just(ExprAst::var()),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::mul(a, b)),
            (inner.clone(), 0i64..=3).prop_map(|(a, n)| ExprAst::pow(a, ExprAst::int(n))),
            inner.clone().prop_map(ExprAst::neg),
        ]
    })
    .boxed()
}

/// Random expression trees that may use the transcendental functions, kept
/// shallow so magnitudes stay moderate.
fn analytic_ast() -> BoxedStrategy<ExprAst> {
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(ExprAst::int),
        Just(ExprAst::var()),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::mul(a, b)),
            inner.clone().prop_map(|a| ExprAst::unary(expr::UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| ExprAst::unary(expr::UnaryOp::Cos, a)),
            // exp of a scaled-down argument to avoid overflow pile-ups.
            inner.clone().prop_map(|a| {
                ExprAst::unary(expr::UnaryOp::Exp, ExprAst::mul(ExprAst::constant(qr(1, 4)), a))
            }),
        ]
    })
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// parse ∘ print is the identity on expression trees.
    #[test]
    fn print_parse_round_trip(ast in polynomial_ast(4)) {
        let printed = ast.to_string();
        let reparsed = expr::parse(&printed).unwrap();
        prop_assert_eq!(reparsed, ast);
    }

    /// Jet derivatives of orders 1..3 agree with central finite differences
    /// of plain evaluation for polynomial expressions, within a relative
    /// tolerance of 1e-6 plus the finite-difference scheme's own truncation
    /// and rounding budget (computed from the order-5 jet).
    #[test]
    fn jet_derivatives_match_finite_differences(
        ast in polynomial_ast(3),
        base in -2.0f64..2.0,
    ) {
        let jet = eval_jet(&ast, &Jet::identity(base, 5), &opts()).unwrap();
        prop_assume!(jet.is_finite());
        let h = 1e-4;
        let f = |x: f64| eval(&ast, x, &opts()).unwrap();
        let stencil = [
            f(base - 2.0 * h), f(base - h), f(base), f(base + h), f(base + 2.0 * h),
        ];
        let fmax = stencil.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let eps = f64::EPSILON;
        let scale = 1.0 + (0..=5).map(|p| jet.deriv(p).abs()).fold(0.0, f64::max);
        prop_assume!(scale < 1e6);
        let fd1 = (stencil[3] - stencil[1]) / (2.0 * h);
        let fd2 = (stencil[3] - 2.0 * stencil[2] + stencil[1]) / (h * h);
        let fd3 = (stencil[4] - 2.0 * stencil[3] + 2.0 * stencil[1] - stencil[0])
            / (2.0 * h * h * h);
        // Truncation terms of the central schemes plus rounding noise.
        let tol1 = 1e-6 * scale + jet.deriv(3).abs() * h * h / 6.0 + 8.0 * eps * fmax / h;
        let tol2 = 1e-6 * scale
            + jet.deriv(4).abs() * h * h / 12.0
            + 16.0 * eps * fmax / (h * h);
        let tol3 = 1e-6 * scale
            + jet.deriv(5).abs() * h * h / 4.0
            + 24.0 * eps * fmax / (h * h * h);
        prop_assert!((jet.deriv(1) - fd1).abs() <= tol1, "{} vs {}", jet.deriv(1), fd1);
        prop_assert!((jet.deriv(2) - fd2).abs() <= tol2, "{} vs {}", jet.deriv(2), fd2);
        prop_assert!((jet.deriv(3) - fd3).abs() <= tol3, "{} vs {}", jet.deriv(3), fd3);
    }

    /// Truncating a jet to order zero reproduces plain evaluation exactly.
    #[test]
    fn order_zero_jet_is_plain_evaluation(
        ast in polynomial_ast(3),
        base in -2.0f64..2.0,
    ) {
        let direct = eval(&ast, base, &opts()).unwrap();
        let jet = eval_jet(&ast, &Jet::identity(base, 0), &opts()).unwrap();
        prop_assert_eq!(*jet.value(), direct);
    }

    /// Chain rule: evaluating g on the jet of h equals evaluating g∘h,
    /// exactly in rational arithmetic.
    #[test]
    fn chain_rule_exact_for_polynomials(
        g in polynomial_ast(3),
        h in polynomial_ast(3),
        num in -4i64..=4,
    ) {
        let input: Jet<Q> = Jet::identity(qr(num, 3), 4);
        let inner = eval_jet_exact(&h, &input).unwrap();
        let two_step = eval_jet_exact(&g, &inner).unwrap();
        let composed = eval_jet_exact(&g.compose(&h), &input).unwrap();
        prop_assert_eq!(two_step, composed);
    }

    /// Chain rule for analytic expressions within 1e-10 relative.
    #[test]
    fn chain_rule_close_for_analytic_expressions(
        g in analytic_ast(),
        h in analytic_ast(),
        base in -1.0f64..1.0,
    ) {
        let input = Jet::identity(base, 4);
        let inner = eval_jet(&h, &input, &opts());
        prop_assume!(inner.is_ok());
        let inner = inner.unwrap();
        prop_assume!(inner.is_finite());
        let two_step = eval_jet(&g, &inner, &opts());
        let composed = eval_jet(&g.compose(&h), &input, &opts());
        prop_assume!(two_step.is_ok() && composed.is_ok());
        let (a, b) = (two_step.unwrap(), composed.unwrap());
        for p in 0..=4 {
            let scale = 1.0f64.max(a.deriv(p).abs()).max(b.deriv(p).abs());
            prop_assume!(scale < 1e8);
            prop_assert!(
                (a.deriv(p) - b.deriv(p)).abs() <= 1e-10 * scale,
                "order {}: {} vs {}", p, a.deriv(p), b.deriv(p)
            );
        }
    }
}

// ---------------------------------------------------------------------
// Jets: functoriality and reversion
// ---------------------------------------------------------------------

fn rational_jet(order: usize) -> BoxedStrategy<Jet<Q>> {
    (
        proptest::collection::vec((-5i64..=5, 1i64..=3), order + 1),
        -3i64..=3,
        prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2), Just(3)],
    )
        .prop_map(move |(entries, base, lead)| {
            let mut derivs: Vec<Q> = entries.into_iter().map(|(p, q)| qr(p, q)).collect();
            derivs[1] = qi(lead); // regular
            Jet::new(qi(base), derivs).unwrap()
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Functoriality of the prolonged action, exactly in rational mode:
    /// acting by g∘h equals acting by h then by g.
    #[test]
    fn prolongation_is_functorial_exactly(seed_frame in rational_jet(6)) {
        // Build h at the frame's value and g at h's value.
        let frame = seed_frame;
        let h = {
            let mut derivs: Vec<Q> =
                (0..=6).map(|p| qr((p as i64 * 7 + 3) % 5 - 2, 2)).collect();
            derivs[0] = qi(1);
            derivs[1] = qr(3, 2);
            Jet::new(frame.value().clone(), derivs).unwrap()
        };
        let g = {
            let mut derivs: Vec<Q> =
                (0..=6).map(|p| qr((p as i64 * 5 + 1) % 7 - 3, 3)).collect();
            derivs[0] = qi(-2);
            derivs[1] = qi(2);
            Jet::new(h.value().clone(), derivs).unwrap()
        };
        let gh = Jet::compose(&g, &h).unwrap();
        let via_composite = prolong(&gh, &frame).unwrap();
        let via_two_steps = prolong(&g, &prolong(&h, &frame).unwrap()).unwrap();
        prop_assert_eq!(via_composite, via_two_steps);
    }

    /// Same law in floating point within 1e-10 relative.
    #[test]
    fn prolongation_is_functorial_in_floats(
        frame_tail in proptest::collection::vec(-1.5f64..1.5, 5),
        z1 in prop_oneof![0.4f64..1.6, -1.6f64..-0.4],
        h_tail in proptest::collection::vec(-1.0f64..1.0, 5),
        hp in prop_oneof![0.5f64..1.5, -1.5f64..-0.5],
        g_tail in proptest::collection::vec(-1.0f64..1.0, 5),
        gp in prop_oneof![0.5f64..1.5, -1.5f64..-0.5],
    ) {
        let mut fd = vec![0.1];
        fd.push(z1);
        fd.extend(frame_tail);
        let frame = Jet::new(0.0, fd).unwrap();
        let mut hd = vec![0.3];
        hd.push(hp);
        hd.extend(h_tail);
        let h = Jet::new(*frame.value(), hd).unwrap();
        let mut gd = vec![-0.2];
        gd.push(gp);
        gd.extend(g_tail);
        let g = Jet::new(*h.value(), gd).unwrap();
        let gh = Jet::compose(&g, &h).unwrap();
        let one = prolong(&gh, &frame).unwrap();
        let two = prolong(&g, &prolong(&h, &frame).unwrap()).unwrap();
        for p in 0..=6 {
            let scale = 1.0f64.max(one.deriv(p).abs()).max(two.deriv(p).abs());
            prop_assert!(
                (one.deriv(p) - two.deriv(p)).abs() <= 1e-10 * scale,
                "coordinate {}: {} vs {}", p, one.deriv(p), two.deriv(p)
            );
        }
    }

    /// Newton reversion against the classical Lagrange-inversion formula.
    #[test]
    fn reversion_matches_lagrange_inversion(jet in rational_jet(6)) {
        let reverted = jet.revert().unwrap();
        let expected = lagrange_invert(&jet);
        let got = reverted.taylor_coeffs();
        for n in 1..=jet.order() {
            prop_assert_eq!(&got[n], &expected[n], "coefficient {}", n);
        }
    }

    /// Reversion is an involution on regular jets.
    #[test]
    fn reversion_is_involutive(jet in rational_jet(5)) {
        let back = jet.revert().unwrap().revert().unwrap();
        prop_assert_eq!(back, jet);
    }
}

/// Independent oracle: coefficients of the compositional inverse by the
/// Lagrange formula `b_n = (1/n) [w^{n-1}] (w/u(w))^n`, computed with
/// stand-alone dense polynomial helpers.
fn lagrange_invert(jet: &Jet<Q>) -> Vec<Q> {
    let q = jet.order();
    let a = jet.taylor_coeffs();
    // s = u(w)/w = a1 + a2 w + … (shifted down one degree).
    let s: Vec<Q> = (1..=q).map(|p| a[p].clone()).collect();
    // r = 1/s mod w^q by the triangular recurrence.
    let mut r = vec![Q::zero(); q];
    r[0] = qi(1) / s[0].clone();
    for n in 1..q {
        let mut acc = Q::zero();
        for k in 1..=n {
            acc += s[k].clone() * r[n - k].clone();
        }
        r[n] = -acc / s[0].clone();
    }
    // b_n = (1/n) [w^{n-1}] r^n.
    let mut out = vec![Q::zero(); q + 1];
    for n in 1..=q {
        let mut power = vec![Q::zero(); q];
        power[0] = qi(1);
        for _ in 0..n {
            power = dense_mul_trunc(&power, &r, q);
        }
        out[n] = power[n - 1].clone() / qi(n as i64);
    }
    out
}

fn dense_mul_trunc(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    let mut c = vec![Q::zero(); len];
    for i in 0..len {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..len - i {
            let prod = a[i].clone() * b[j].clone();
            c[i + j] += prod;
        }
    }
    c
}

// ---------------------------------------------------------------------
// Exterior algebra laws
// ---------------------------------------------------------------------

fn random_cochain() -> BoxedStrategy<ExteriorCochain> {
    proptest::collection::vec(
        (
            proptest::collection::btree_set(0u32..=12, 1..=4),
            (-4i64..=4, 1i64..=3),
        ),
        1..=4,
    )
    .prop_map(|terms| {
        let mut out = ExteriorCochain::zero();
        for (indices, (p, q)) in terms {
            let tuple: Vec<u32> = indices.into_iter().collect();
            out = out.add(&ExteriorCochain::monomial(&tuple, qr(p, q)));
        }
        out
    })
    .boxed()
}

fn homogeneous_cochain(degree: usize) -> BoxedStrategy<ExteriorCochain> {
    proptest::collection::vec(
        (
            proptest::collection::btree_set(0u32..=10, degree..=degree),
            (-3i64..=3, 1i64..=2),
        ),
        1..=3,
    )
    .prop_map(|terms| {
        let mut out = ExteriorCochain::zero();
        for (indices, (p, q)) in terms {
            let tuple: Vec<u32> = indices.into_iter().collect();
            out = out.add(&ExteriorCochain::monomial(&tuple, qr(p, q)));
        }
        out
    })
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// d ∘ d = 0 exactly.
    #[test]
    fn differential_squares_to_zero(a in random_cochain()) {
        prop_assert!(a.differential().differential().is_zero());
    }

    /// Every term of d(m) keeps the weight of m.
    #[test]
    fn differential_preserves_weight(a in random_cochain()) {
        for (tuple, _) in a.terms() {
            let m = ExteriorCochain::monomial(tuple, qi(1));
            let w = folcc_core::gf::monomial_weight(tuple);
            for (t, _) in m.differential().terms() {
                prop_assert_eq!(folcc_core::gf::monomial_weight(t), w);
            }
        }
    }

    /// Graded Leibniz rule on homogeneous factors.
    #[test]
    fn graded_leibniz(
        (deg_a, a) in (1usize..=3).prop_flat_map(|d| (Just(d), homogeneous_cochain(d))),
        (_db, b) in (1usize..=3).prop_flat_map(|d| (Just(d), homogeneous_cochain(d))),
    ) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let lhs = a.wedge(&b).differential();
        let sign = if deg_a % 2 == 0 { qi(1) } else { qi(-1) };
        let rhs = a
            .differential()
            .wedge(&b)
            .add(&a.wedge(&b.differential()).scale(&sign));
        prop_assert_eq!(lhs, rhs);
    }

    /// Wedge is graded-anticommutative on homogeneous cochains.
    #[test]
    fn wedge_graded_anticommutativity(
        (deg_a, a) in (1usize..=3).prop_flat_map(|d| (Just(d), homogeneous_cochain(d))),
        (deg_b, b) in (1usize..=3).prop_flat_map(|d| (Just(d), homogeneous_cochain(d))),
    ) {
        let sign = if (deg_a * deg_b) % 2 == 0 { qi(1) } else { qi(-1) };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign));
    }
}

// ---------------------------------------------------------------------
// Frame chart consistency
// ---------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The scale action commutes with the chart change between raw and
    /// normalized frame coordinates.
    #[test]
    fn chart_consistency_of_scale_actions(
        tail in proptest::collection::vec(-2.0f64..2.0, 4),
        z1 in prop_oneof![0.3f64..2.0, -2.0f64..-0.3],
        lambda in prop_oneof![0.2f64..3.0, -3.0f64..-0.2],
    ) {
        let mut derivs = vec![0.7, z1];
        derivs.extend(tail);
        let jet = Jet::new(0.0, derivs).unwrap();
        let via_z = folcc_core::jets::gl1_action_z(&jet, lambda).unwrap();
        let via_y = folcc_core::jets::FrameCoordsY::from_jet(&jet)
            .unwrap()
            .gl1_action(lambda)
            .unwrap()
            .to_jet();
        for p in 0..=jet.order() {
            let scale = 1.0f64.max(via_z.deriv(p).abs());
            prop_assert!((via_z.deriv(p) - via_y.deriv(p)).abs() <= 1e-9 * scale);
        }
    }

    /// The closed low-order formulas in the quotient chart agree with
    /// conjugating the prolonged action through the chart maps.
    #[test]
    fn quotient_lift_matches_prolongation(
        coords_tail in proptest::collection::vec(-1.5f64..1.5, 4),
        x1 in -1.0f64..1.0,
        h_tail in proptest::collection::vec(-1.0f64..1.0, 4),
        hp in 0.4f64..1.8,
    ) {
        let mut coords = vec![0.2, x1];
        coords.extend(coords_tail);
        let coords = folcc_core::jets::FrameCoordsX::new(coords).unwrap();
        let mut hd = vec![0.5, hp];
        hd.extend(h_tail);
        let h = Jet::new(0.2, hd).unwrap();
        let lifted = folcc_core::jets::lift_s2(&h, &coords).unwrap();
        let z = coords.to_y().to_jet();
        let moved = prolong(&h.truncate(coords.order()), &z).unwrap();
        let direct = folcc_core::jets::FrameCoordsY::from_jet(&moved).unwrap().to_x();
        for p in 0..=coords.order() {
            let scale = 1.0f64.max(direct.coords()[p].abs());
            prop_assert!(
                (lifted.coords()[p] - direct.coords()[p]).abs() <= 1e-8 * scale,
                "coordinate {}", p
            );
        }
    }
}

// ---------------------------------------------------------------------
// Dynamics invariants
// ---------------------------------------------------------------------

use folcc_core::dynamics::{
    reduce_mod1_upper, rigid_rotation, rotation_number, LocalDiffeo,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Rotation number is invariant under smooth periodic conjugation.
    #[test]
    fn rotation_number_is_conjugation_invariant(
        alpha in 0.05f64..0.95,
        eps in -0.14f64..0.14,
    ) {
        let profile = expr::parse(&format!(
            "x + {eps:.17}*sin(6.283185307179586*x)"
        ))
        .unwrap();
        let conjugated = LocalDiffeo::conjugated_shift_lift(profile, alpha).unwrap();
        let rigid = rigid_rotation(alpha);
        let n = 4000;
        let a = rotation_number(&conjugated, n, 0.2).unwrap();
        let b = rotation_number(&rigid, n, 0.2).unwrap();
        let dist = (a.reduced - b.reduced).abs();
        let dist = dist.min((dist - 1.0).abs());
        prop_assert!(dist <= a.error_bound + b.error_bound);
    }

    /// ρ(φ^n) = n ρ(φ) mod 1 within the combined bounds.
    #[test]
    fn rotation_number_of_iterates(
        alpha in 0.05f64..0.45,
        power in 2u32..=5,
    ) {
        let profile = expr::parse("x + 0.1*sin(6.283185307179586*x)").unwrap();
        let base = LocalDiffeo::conjugated_shift_lift(profile.clone(), alpha).unwrap();
        // The k-th iterate of a conjugated shift is the conjugated shift by
        // k α for the same profile.
        let iterate =
            LocalDiffeo::conjugated_shift_lift(profile, power as f64 * alpha).unwrap();
        let n = 4000;
        let r1 = rotation_number(&base, n, 0.0).unwrap();
        let rk = rotation_number(&iterate, n, 0.0).unwrap();
        let expected = reduce_mod1_upper(power as f64 * r1.reduced);
        let dist = (rk.reduced - expected).abs();
        let dist = dist.min((dist - 1.0).abs());
        prop_assert!(
            dist <= (2 * power + 2) as f64 * r1.error_bound,
            "{} vs {}", rk.reduced, expected
        );
    }

    /// Conjugated shifts satisfy their defining relation on samples.
    #[test]
    fn conjugated_shift_consistency(
        shift in 0.1f64..1.5,
        eps in -0.1f64..0.1,
        x in -1.0f64..1.0,
    ) {
        let profile = expr::parse(&format!(
            "x + {eps:.17}*sin(6.283185307179586*x)"
        ))
        .unwrap();
        let phi = LocalDiffeo::conjugated_shift_lift(profile.clone(), shift).unwrap();
        let y = phi.value(x).unwrap();
        let f = |t: f64| eval(&profile, t, &opts()).unwrap();
        prop_assert!((f(y) - f(x) - shift).abs() <= 1e-9);
    }
}

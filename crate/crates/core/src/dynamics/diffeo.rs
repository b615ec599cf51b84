//! One-dimensional local diffeomorphisms with evaluable derivative stacks.

use serde::Serialize;

use super::solve::{invert_monotone_bounded, invert_monotone_unbounded};
use super::DynError;
use crate::expr::{eval_jet, CompiledExpr, EvalOptions, ExprAst};
use crate::jets::Jet;

/// An interval of the real line; infinite endpoints are allowed. Treated as
/// open: evaluation never happens at the endpoints themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn real_line() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// Containment with a little slack at finite endpoints, for checks on
    /// images that may land on a boundary up to rounding.
    pub fn contains_closure(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// A representative interior point.
    pub fn anchor(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    /// Uniform interior samples, trimming `trim` of the length (or a fixed
    /// margin on unbounded sides) away from each endpoint.
    pub fn samples(&self, n: usize, trim: f64, window: Option<(f64, f64)>) -> Vec<f64> {
        let (lo, hi) = match window {
            Some((a, b)) => (a.max(self.lo), b.min(self.hi)),
            None => (self.lo, self.hi),
        };
        let (lo, hi) = if lo.is_finite() && hi.is_finite() {
            let len = hi - lo;
            (lo + trim * len, hi - trim * len)
        } else {
            (lo.max(-8.0), hi.min(8.0))
        };
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// Closed-form map `x ↦ ast(x)`.
    Explicit { ast: ExprAst, compiled: CompiledExpr, dcompiled: CompiledExpr },
    /// `x ↦ f⁻¹(f(x) + shift)` for a strictly monotone profile `f`.
    ConjugatedShift {
        profile: ExprAst,
        compiled: CompiledExpr,
        dcompiled: CompiledExpr,
        shift: f64,
        increasing: bool,
    },
    /// Branches tried in order; the first with `x < hi` wins.
    Piecewise { pieces: Vec<(Interval, LocalDiffeo)> },
}

/// A local diffeomorphism of an interval, with derivatives of any order
/// obtained through jet evaluation.
#[derive(Debug, Clone)]
pub struct LocalDiffeo {
    kind: Kind,
    domain: Interval,
    /// Marks maps intended as lifts of circle maps (`F(z+1) = F(z)+1`).
    circle_lift: bool,
    opts: EvalOptions,
}

impl LocalDiffeo {
    /// Closed-form map on the given domain.
    pub fn explicit(ast: ExprAst, domain: Interval) -> Self {
        let compiled = CompiledExpr::new(&ast);
        let dcompiled = CompiledExpr::new(&ast.derivative());
        LocalDiffeo {
            kind: Kind::Explicit { ast, compiled, dcompiled },
            domain,
            circle_lift: false,
            opts: EvalOptions::default(),
        }
    }

    /// Lift of a circle map: a closed-form map on the line satisfying
    /// `F(z+1) = F(z) + 1`; the property is checked on samples.
    pub fn circle_lift(ast: ExprAst) -> Result<Self, DynError> {
        let mut map = LocalDiffeo::explicit(ast, Interval::real_line());
        map.circle_lift = true;
        map.check_lift_property()?;
        Ok(map)
    }

    /// The map `x ↦ f⁻¹(f(x) + shift)`; `f` must be strictly monotone on
    /// `domain`, which is also used as the inversion bracket when bounded.
    pub fn conjugated_shift(
        profile: ExprAst,
        shift: f64,
        domain: Interval,
    ) -> Result<Self, DynError> {
        let compiled = CompiledExpr::new(&profile);
        let dcompiled = CompiledExpr::new(&profile.derivative());
        let opts = EvalOptions::default();
        // Orientation of the profile from a few interior derivative samples.
        let mut increasing = None;
        for x in domain.samples(5, 0.1, None) {
            if let Ok(d) = dcompiled.eval(x, &opts) {
                if d.is_finite() && d != 0.0 {
                    let up = d > 0.0;
                    if let Some(prev) = increasing {
                        if prev != up {
                            return Err(DynError::NotMonotone);
                        }
                    }
                    increasing = Some(up);
                }
            }
        }
        let increasing = increasing.ok_or(DynError::NotMonotone)?;
        Ok(LocalDiffeo {
            kind: Kind::ConjugatedShift { profile, compiled, dcompiled, shift, increasing },
            domain,
            circle_lift: false,
            opts,
        })
    }

    /// Conjugated shift flagged as a circle-map lift (profile is a lift).
    pub fn conjugated_shift_lift(profile: ExprAst, shift: f64) -> Result<Self, DynError> {
        let mut map = LocalDiffeo::conjugated_shift(profile, shift, Interval::real_line())?;
        map.circle_lift = true;
        map.check_lift_property()?;
        Ok(map)
    }

    /// Piecewise map; branches are tried in order and the first one whose
    /// upper endpoint exceeds the argument is used.
    pub fn piecewise(pieces: Vec<(Interval, LocalDiffeo)>, domain: Interval) -> Self {
        LocalDiffeo {
            kind: Kind::Piecewise { pieces },
            domain,
            circle_lift: false,
            opts: EvalOptions::default(),
        }
    }

    pub fn identity(domain: Interval) -> Self {
        LocalDiffeo::explicit(ExprAst::var(), domain)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_circle_lift(&self) -> bool {
        self.circle_lift
    }

    pub fn division_tolerance(&self) -> f64 {
        self.opts.division_tolerance
    }

    /// The defining expression, for kinds that have a single one.
    pub fn expression(&self) -> Option<&ExprAst> {
        match &self.kind {
            Kind::Explicit { ast, .. } => Some(ast),
            Kind::ConjugatedShift { .. } | Kind::Piecewise { .. } => None,
        }
    }

    pub fn profile(&self) -> Option<(&ExprAst, f64)> {
        match &self.kind {
            Kind::ConjugatedShift { profile, shift, .. } => Some((profile, *shift)),
            _ => None,
        }
    }

    fn check_lift_property(&self) -> Result<(), DynError> {
        let mut worst: f64 = 0.0;
        for i in 0..17 {
            let z = -2.0 + 4.0 * i as f64 / 16.0;
            let a = self.value(z + 1.0)?;
            let b = self.value(z)?;
            worst = worst.max((a - b - 1.0).abs());
        }
        if worst > 1e-10 {
            return Err(DynError::NotALift(worst));
        }
        Ok(())
    }

    fn piece_for(&self, x: f64) -> Option<&(Interval, LocalDiffeo)> {
        match &self.kind {
            Kind::Piecewise { pieces } => pieces.iter().find(|(iv, _)| x < iv.hi),
            _ => None,
        }
    }

    /// Applies the map at `x`; the closure of the domain is accepted, with
    /// endpoint misbehaviour surfacing as evaluation errors.
    pub fn value(&self, x: f64) -> Result<f64, DynError> {
        if !self.domain.contains_closure(x, 0.0) {
            return Err(DynError::OutsideDomain(x));
        }
        match &self.kind {
            Kind::Explicit { compiled, .. } => Ok(compiled.eval(x, &self.opts)?),
            Kind::ConjugatedShift { compiled, dcompiled, shift, increasing, .. } => {
                let fx = compiled.eval(x, &self.opts)?;
                let target = fx + shift;
                let f = |t: f64| compiled.eval(t, &self.opts).ok();
                let df = |t: f64| dcompiled.eval(t, &self.opts).ok();
                if self.domain.is_bounded() {
                    invert_monotone_bounded(
                        &f,
                        Some(&df),
                        target,
                        self.domain.lo,
                        self.domain.hi,
                        *increasing,
                    )
                } else {
                    invert_monotone_unbounded(&f, Some(&df), target, x + shift, *increasing)
                }
            }
            Kind::Piecewise { .. } => {
                let (_, branch) = self
                    .piece_for(x)
                    .ok_or(DynError::OutsideDomain(x))?;
                branch.value(x)
            }
        }
    }

    /// Jet of the map at `x` to the requested order.
    pub fn jet_at(&self, x: f64, order: usize) -> Result<Jet<f64>, DynError> {
        if !self.domain.contains_closure(x, 0.0) {
            return Err(DynError::OutsideDomain(x));
        }
        match &self.kind {
            Kind::Explicit { ast, .. } => {
                Ok(eval_jet(ast, &Jet::identity(x, order), &self.opts)?)
            }
            Kind::ConjugatedShift { profile, shift, .. } => {
                let y = self.value(x)?;
                let jet_at_x = eval_jet(profile, &Jet::identity(x, order), &self.opts)?;
                let jet_at_y = eval_jet(profile, &Jet::identity(y, order), &self.opts)?;
                let inverse = jet_at_y.revert()?;
                let shifted = jet_at_x.add_scalar(shift);
                Ok(Jet::compose(&inverse, &shifted)?)
            }
            Kind::Piecewise { .. } => {
                let (_, branch) = self
                    .piece_for(x)
                    .ok_or(DynError::OutsideDomain(x))?;
                branch.jet_at(x, order)
            }
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64, DynError> {
        match &self.kind {
            Kind::Explicit { dcompiled, .. } => Ok(dcompiled.eval(x, &self.opts)?),
            _ => Ok(*self.jet_at(x, 1)?.deriv(1)),
        }
    }

    /// Sign of the derivative at a representative interior point.
    pub fn orientation(&self) -> Result<i8, DynError> {
        let x = match &self.kind {
            Kind::Piecewise { pieces } => pieces
                .first()
                .map(|(iv, _)| {
                    Interval::new(iv.lo.max(self.domain.lo), iv.hi.min(self.domain.hi)).anchor()
                })
                .unwrap_or(self.domain.anchor()),
            _ => self.domain.anchor(),
        };
        let d = self.derivative(x)?;
        if d == 0.0 || !d.is_finite() {
            return Err(DynError::NotRegularAt(x));
        }
        Ok(if d > 0.0 { 1 } else { -1 })
    }
}

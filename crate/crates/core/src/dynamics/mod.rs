//! Circle and interval dynamics: rotation numbers, Diophantine estimation,
//! conjugacy verification, fixed-point classification, vector-field
//! recursion identities, flow checks, and the Reeb holonomy probe.

mod diffeo;
mod fixed_points;
mod reeb;
mod rotation;
mod solve;
mod szekeres;

pub use diffeo::{Interval, LocalDiffeo};
pub use fixed_points::{classify_fixed_points, FixedPointClass, FixedPointRecord};
pub use reeb::{reeb_probe, sample_profile as sample_reeb_profile, ReebProbeReport, ReebRow};
pub use rotation::{
    diophantine_exponent, reduce_mod1_upper, rigid_rotation, rotation_number,
    verify_conjugacy, ConjugacyReport, Convergent, DiophantineReport, RotationEstimate,
};
pub use szekeres::{
    flow_check, integrate_flow, q_polynomial, verify_szekeres_identity, FlowReport,
    QPolynomial, SzekeresReport,
};

use thiserror::Error;

use crate::expr::EvalError;
use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynError {
    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),
    #[error("jet error: {0}")]
    Jet(#[from] JetError),
    #[error("point {0} lies outside the map's domain")]
    OutsideDomain(f64),
    #[error("monotone inversion failed (target outside range or no bracket)")]
    InversionFailed,
    #[error("empty bracket for inversion")]
    EmptyBracket,
    #[error("profile is not strictly monotone on its interval")]
    NotMonotone,
    #[error("map does not satisfy the lift property F(z+1) = F(z)+1 (residual {0:.3e})")]
    NotALift(f64),
    #[error("map is not regular at {0}")]
    NotRegularAt(f64),
    #[error("rotation number needs a lift of a circle map")]
    NotACircleLift,
    #[error("{0}")]
    Invalid(String),
    #[error("generator `{name}` maps {point} outside the chart")]
    GeneratorEscapesChart { name: String, point: f64 },
    #[error("continued fraction terminated immediately: {0} is rational to working precision")]
    RationalAlpha(f64),
    #[error("flow integration failed: {0}")]
    FlowFailed(String),
}

/// Chart interval plus generating local diffeomorphisms: the presentation
/// of an orbit space such as a leaf space.
#[derive(Debug, Clone)]
pub struct PseudogroupPresentation {
    pub name: String,
    pub description: String,
    pub chart: Interval,
    generators: Vec<(String, LocalDiffeo)>,
}

impl PseudogroupPresentation {
    /// Builds a presentation, checking on samples that every generator maps
    /// its domain into the chart.
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        chart: Interval,
        generators: Vec<(String, LocalDiffeo)>,
    ) -> Result<Self, DynError> {
        let slack = 1e-9;
        for (gname, g) in &generators {
            for x in g.domain().samples(33, 0.01, Some((chart.lo, chart.hi))) {
                match g.value(x) {
                    Ok(y) => {
                        if !chart.contains_closure(y, slack * (1.0 + y.abs())) {
                            return Err(DynError::GeneratorEscapesChart {
                                name: gname.clone(),
                                point: x,
                            });
                        }
                    }
                    // Blow-up samples near an endpoint are tolerated; the
                    // generator is only required to stay in the chart where
                    // it evaluates.
                    Err(_) => continue,
                }
            }
        }
        Ok(PseudogroupPresentation {
            name: name.into(),
            description: description.into(),
            chart,
            generators,
        })
    }

    pub fn generators(&self) -> &[(String, LocalDiffeo)] {
        &self.generators
    }
}

//! Checks the planar prediction at a point of the unfolding against a PDE run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{diagnostics, DiagnosticsConfig, PatternDiagnostics};
use crate::error::{Error, Result};
use crate::sim::{simulate, InitialCondition, SimConfig};
use crate::unfolding::{classify, PlanarUnfolding, RegionClass, Region};

/// Default bound on `|alpha|` for which the local prediction is trusted.
pub const DEFAULT_ALPHA_BUDGET: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Match,
    Mismatch,
    /// `alpha` lies on a region boundary; nothing was simulated.
    OnBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub init: InitialCondition,
    pub diagnostics: PatternDiagnostics,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub alpha: [f64; 2],
    pub classification: RegionClass,
    pub outcomes: Vec<CaseOutcome>,
    pub agreement: Agreement,
}

/// Simulates at `(r* + alpha1, tau* + alpha2)` from each initial condition and
/// compares the observed pattern with the classification.
pub fn verify_region(
    pu: &PlanarUnfolding,
    alpha: [f64; 2],
    inits: &[InitialCondition],
    sim_cfg: &SimConfig,
    alpha_budget: f64,
) -> Result<RegionReport> {
    let crit = pu
        .critical
        .ok_or_else(|| Error::DegenerateCase("critical point not attached".into()))?;
    if alpha[0].hypot(alpha[1]) > alpha_budget {
        return Err(Error::InvalidParams(format!(
            "|alpha| = {} exceeds the budget {alpha_budget}",
            alpha[0].hypot(alpha[1])
        )));
    }
    let classification = classify(pu, alpha[0], alpha[1])?;
    if classification.region == Region::Boundary {
        return Ok(RegionReport {
            alpha,
            classification,
            outcomes: Vec::new(),
            agreement: Agreement::OnBoundary,
        });
    }

    let params = crit.params.shifted(alpha[0], alpha[1]);
    let diag_cfg = DiagnosticsConfig {
        period_scale: Some(2.0 * std::f64::consts::PI / crit.omega_star),
        ..DiagnosticsConfig::default()
    };
    let outcomes = inits
        .par_iter()
        .map(|init| {
            let res = simulate(&params, init, sim_cfg)?;
            let diagnostics = diagnostics(&res, &diag_cfg)?;
            let agrees = classification.predicted.contains(&diagnostics.label);
            Ok(CaseOutcome {
                init: init.clone(),
                diagnostics,
                agrees,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let agreement = if outcomes.iter().all(|o| o.agrees) {
        Agreement::Match
    } else {
        Agreement::Mismatch
    };
    Ok(RegionReport {
        alpha,
        classification,
        outcomes,
        agreement,
    })
}

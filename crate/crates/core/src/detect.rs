// SPDX-License-Identifier: MIT OR Apache-2.0

//! Single change-point detection: scan statistic plus p-value.

use crate::data::{DistanceMatrix, WindowBounds};
use crate::distance::Metric;
use crate::error::{CpdError, Result};
use crate::kernel::{estimate_eigenvalues, Truncation};
use crate::null::{
    permutation_pvalue, pvalue_from_null, pvalue_s2_corrected, simulate_null_s1,
    simulate_null_s1_tilde, simulate_null_s2, CorrectionVariant, PValue, PValueMethod,
};
use crate::scan::{ScanProfile, StatValue, Statistic};
use serde::{Deserialize, Serialize};
use std::sync::Once;

/// P-value engine settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub method: PValueMethod,
    /// Monte-Carlo or permutation replicates; `None` uses the method default.
    pub reps: Option<usize>,
    pub seed: u64,
    pub variant: CorrectionVariant,
    pub truncation: Truncation,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            method: PValueMethod::Asymptotic,
            reps: None,
            seed: 0,
            variant: CorrectionVariant::default(),
            truncation: Truncation::default(),
        }
    }
}

impl EngineConfig {
    pub fn new(method: PValueMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = Some(reps);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_variant(mut self, variant: CorrectionVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn reps(&self) -> usize {
        self.reps.unwrap_or_else(|| self.method.default_reps())
    }

    /// Rejects statistic/engine pairs without a defined tail.
    pub fn check(&self, which: Statistic) -> Result<()> {
        if self.method == PValueMethod::Corrected
            && matches!(which, Statistic::S1 | Statistic::S1Tilde)
        {
            return Err(CpdError::InvalidConfig(format!(
                "the corrected tail is defined for S2, S2t and S3, not {which}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub s_hat: f64,
    pub m2: f64,
    pub m4: f64,
    pub m6: f64,
    /// Eigenvalues feeding the location null; empty for other engines.
    pub kept_eigenvalues: Vec<f64>,
    pub trace_fraction: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub stat: StatValue,
    pub p_value: PValue,
    pub bounds: WindowBounds,
    pub diagnostics: Diagnostics,
}

impl Detection {
    pub fn tau_hat(&self) -> usize {
        self.stat.argmax
    }
}

/// Scans `d` over `bounds`, then attaches a p-value from the configured engine.
pub fn detect(
    d: &DistanceMatrix,
    which: Statistic,
    bounds: WindowBounds,
    engine: &EngineConfig,
) -> Result<Detection> {
    engine.check(which)?;
    let profile = ScanProfile::build(d, bounds);
    let stat = profile.statistic(which)?;
    let m = *profile.moments();
    let mut diagnostics = Diagnostics {
        s_hat: m.s_hat,
        m2: m.m2,
        m4: m.m4,
        m6: m.m6,
        ..Diagnostics::default()
    };
    let reps = engine.reps();
    let p_value = match engine.method {
        PValueMethod::Asymptotic => match which {
            Statistic::S1 | Statistic::S1Tilde => {
                let spectrum = estimate_eigenvalues(d, engine.truncation)?;
                diagnostics.kept_eigenvalues = spectrum.kept_values().to_vec();
                diagnostics.trace_fraction = Some(spectrum.trace_fraction);
                if spectrum.kept == 0 {
                    diagnostics
                        .warnings
                        .push("empty spectrum: the null is a point mass at zero".into());
                    PValue::one(PValueMethod::Asymptotic)
                } else {
                    let null = if which == Statistic::S1 {
                        simulate_null_s1(&spectrum, bounds, reps, engine.seed)?
                    } else {
                        simulate_null_s1_tilde(&spectrum, bounds, reps, engine.seed)?
                    };
                    pvalue_from_null(&null, stat.value)
                }
            }
            Statistic::S2 | Statistic::S2Tilde => {
                pvalue_from_null(&simulate_null_s2(bounds, reps, engine.seed)?, stat.value)
            }
            Statistic::S3 => pvalue_from_null(
                &simulate_null_s2(bounds, reps, engine.seed)?.squared(),
                stat.value,
            ),
        },
        PValueMethod::Corrected => {
            let x = if which == Statistic::S3 {
                stat.value.max(0.0).sqrt()
            } else {
                stat.value
            };
            pvalue_s2_corrected(x, &m, bounds, engine.variant)?
        }
        PValueMethod::Permutation => permutation_pvalue(d, which, bounds, reps, engine.seed)?,
    };
    Ok(Detection {
        stat,
        p_value,
        bounds,
        diagnostics,
    })
}

static DELTACON_WARNING: Once = Once::new();

/// Warning text when `metric` is not known to be of negative type and an
/// asymptotic engine is requested. Logged once per process.
pub fn metric_warning(metric: &Metric, method: PValueMethod) -> Option<String> {
    if metric.is_negative_type() || method == PValueMethod::Permutation {
        return None;
    }
    let msg = format!(
        "metric {} is not known to be of negative type; the {} p-value may be miscalibrated, \
         permutation p-values are recommended",
        metric.name(),
        method.name()
    );
    DELTACON_WARNING.call_once(|| log::warn!("{msg}"));
    Some(msg)
}

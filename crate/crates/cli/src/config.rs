//! JSON configuration schemas for the subcommands, converted into the core
//! problem types. Example documents ship in `configs/`.

use serde::Deserialize;

use blackstock::model::{
    BcKind, BoundaryData1D, DomainSpec, ForcingSpec, ModelParams, ProblemSpec,
};
use blackstock::picard::FixedPointConfig;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: u8,
    pub b_over_a: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub dimension: usize,
    pub lengths: Vec<f64>,
    pub bc_kind: BcKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingTermConfig {
    pub amplitude: f64,
    pub temporal_mode: i64,
    #[serde(default)]
    pub phase: f64,
    pub spatial: Vec<usize>,
}

/// One boundary-trace term: `amplitude * cos(m w t + phase)` at one endpoint
/// (`"left"` or `"right"`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceTermConfig {
    pub endpoint: String,
    pub amplitude: f64,
    #[serde(default)]
    pub mode: i64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub g: Vec<TraceTermConfig>,
    #[serde(default)]
    pub h: Vec<TraceTermConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub params: ParamsConfig,
    pub domain: DomainConfig,
    pub period: f64,
    pub n_temporal_modes: usize,
    pub n_spatial_modes: Vec<usize>,
    #[serde(default)]
    pub forcing: Vec<ForcingTermConfig>,
    #[serde(default)]
    pub boundary: Option<BoundaryConfig>,
}

impl ProblemConfig {
    pub fn build(&self) -> Result<ProblemSpec<f64>, String> {
        let params = ModelParams::new(
            self.params.a,
            self.params.b,
            self.params.c,
            self.params.s,
            self.params.b_over_a,
        )
        .map_err(|e| format!("params: {e}"))?;
        let domain = DomainSpec {
            dimension: self.domain.dimension,
            lengths: self.domain.lengths.clone(),
            bc_kind: self.domain.bc_kind,
        };
        let forcing = ForcingSpec {
            terms: self
                .forcing
                .iter()
                .map(|t| blackstock::model::ForcingTerm {
                    amplitude: t.amplitude,
                    temporal_mode: t.temporal_mode,
                    phase: t.phase,
                    spatial: t.spatial.clone(),
                })
                .collect(),
        };
        let boundary = match &self.boundary {
            Some(b) => {
                let mut data = BoundaryData1D::zero(self.n_temporal_modes);
                for (series, terms) in [(&mut data.g, &b.g), (&mut data.h, &b.h)] {
                    for term in terms.iter() {
                        let endpoint = match term.endpoint.as_str() {
                            "left" => 0,
                            "right" => 1,
                            other => {
                                return Err(format!(
                                "boundary endpoint must be \"left\" or \"right\", got {other:?}"
                            ))
                            }
                        };
                        if term.mode.unsigned_abs() as usize > self.n_temporal_modes {
                            return Err(format!(
                                "boundary mode {} outside the temporal truncation",
                                term.mode
                            ));
                        }
                        series.add_cosine(endpoint, term.amplitude, term.mode, term.phase);
                    }
                }
                Some(data)
            }
            None => None,
        };
        Ok(ProblemSpec {
            params,
            domain,
            period: self.period,
            n_temporal_modes: self.n_temporal_modes,
            n_spatial_modes: self.n_spatial_modes.clone(),
            forcing,
            boundary,
        })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointConfigInput {
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    pub relaxation: Option<f64>,
    pub norm_ceiling: Option<f64>,
    pub ratio_guard: Option<usize>,
    pub report_exponent: Option<f64>,
}

impl FixedPointConfigInput {
    pub fn build(&self) -> FixedPointConfig<f64> {
        let mut cfg = FixedPointConfig::default();
        if let Some(v) = self.max_iterations {
            cfg.max_iterations = v;
        }
        if let Some(v) = self.tolerance {
            cfg.tolerance = v;
        }
        if let Some(v) = self.relaxation {
            cfg.relaxation = v;
        }
        if let Some(v) = self.norm_ceiling {
            cfg.norm_ceiling = v;
        }
        if let Some(v) = self.ratio_guard {
            cfg.ratio_guard = v;
        }
        if let Some(v) = self.report_exponent {
            cfg.report_exponent = v;
        }
        cfg
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub fixed_point: FixedPointConfigInput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    pub n_temporal_modes: usize,
    pub n_spatial_modes: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsConfig {
    pub problem: ProblemConfig,
    /// the manufactured solution as a separable mode list
    pub manufactured: Vec<ForcingTermConfig>,
    pub resolutions: Vec<ResolutionConfig>,
    #[serde(default)]
    pub fixed_point: FixedPointConfigInput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunedModeConfig {
    pub temporal_mode: i64,
    pub spatial: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSweepConfig {
    pub problem: ProblemConfig,
    pub deltas: Vec<f64>,
    pub tuned: TunedModeConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSettings {
    pub steps_per_period: usize,
    pub max_periods: usize,
    pub tol: f64,
    pub random_initial: bool,
    pub initial_scale: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            steps_per_period: 512,
            max_periods: 200,
            tol: 1e-8,
            random_initial: false,
            initial_scale: 1e-3,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCompareConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub fixed_point: FixedPointConfigInput,
    #[serde(default)]
    pub oracle: OracleSettings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonScanConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub fixed_point: FixedPointConfigInput,
    pub amplitudes: Vec<f64>,
}

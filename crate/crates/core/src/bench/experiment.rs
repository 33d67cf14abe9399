use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::GraphStats;
use crate::error::{Result, TapError};
use crate::instance::{AgentProfile, Instance};
use crate::instances::{augment, random_population};
use crate::mechanisms::{
    opt_lower_bound, optimal_allocation, ratio, rsd_expected_cost, serial_dictatorship, AgentOrder,
    OptimalConfig, ReferenceKind, RsdMode,
};
use crate::network::RoadNetwork;

#[derive(Clone, Debug)]
pub enum Population {
    /// `count` random agents per trial.
    Random { count: usize },
    /// The same agents in every trial.
    Fixed(Vec<AgentProfile>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceMode {
    Exact(OptimalConfig),
    Proxy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsdSampling {
    Exact,
    MonteCarlo { orderings: u32 },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub network: Arc<RoadNetwork>,
    pub population: Population,
    pub gammas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub reference: ReferenceMode,
    pub rsd: RsdSampling,
}

pub const DEFAULT_GAMMAS: [f64; 6] = [1.0, 1.2, 1.4, 1.6, 1.8, 2.0];

impl ExperimentConfig {
    pub fn new(network: impl Into<Arc<RoadNetwork>>, population: Population) -> Self {
        Self {
            network: network.into(),
            population,
            gammas: DEFAULT_GAMMAS.to_vec(),
            trials: 1,
            seed: 0,
            reference: ReferenceMode::Proxy,
            rsd: RsdSampling::MonteCarlo { orderings: 32 },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(TapError::InvalidArgument("need at least one trial".into()));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(**g >= 1.0 && g.is_finite())) {
            return Err(TapError::InvalidArgument(format!("gamma {g} is below 1")));
        }
        if let RsdSampling::MonteCarlo { orderings: 0 } = self.rsd {
            return Err(TapError::InvalidArgument("monte-carlo needs at least one ordering".into()));
        }
        Ok(())
    }
}

/// One line of the sweep: averages over the trials that were feasible at
/// this `γ`. Cost columns are NaN when none was.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub gamma: f64,
    pub sc_sd: f64,
    pub sc_rsd_mean: f64,
    /// Standard error of the RSD column due to sampled orderings (zero for
    /// exact expectations).
    pub sc_rsd_stderr: f64,
    pub sc_ref: f64,
    pub ref_kind: ReferenceKind,
    pub ratio_sd: f64,
    pub ratio_rsd: f64,
    pub stats: GraphStats,
    pub feasible_trials: usize,
    pub trials: usize,
}

impl ResultRow {
    pub fn is_feasible(&self) -> bool {
        self.feasible_trials > 0
    }
}

struct TrialSeeds {
    population: u64,
    rsd: u64,
}

struct Reference {
    cost: f64,
    certified: bool,
}

struct TrialOutcome {
    sd: f64,
    rsd: f64,
    rsd_stderr: f64,
    reference: f64,
    ratio_sd: f64,
    ratio_rsd: f64,
}

fn trial_seeds(seed: u64, trials: usize) -> Vec<TrialSeeds> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| TrialSeeds { population: rng.random(), rsd: rng.random() }).collect()
}

fn reference(instance: &Instance, mode: ReferenceMode) -> Result<Reference> {
    match mode {
        ReferenceMode::Proxy => Ok(Reference { cost: opt_lower_bound(instance)?, certified: true }),
        ReferenceMode::Exact(cfg) => {
            let out = optimal_allocation(instance, cfg)?;
            Ok(Reference { cost: out.allocation.social_cost(), certified: out.certified })
        }
    }
}

fn run_trial(
    config: &ExperimentConfig,
    augmented: &Arc<RoadNetwork>,
    agents: &[AgentProfile],
    reference: &Reference,
    rsd_seed: u64,
) -> Result<TrialOutcome> {
    let instance = Instance::new(Arc::clone(augmented), agents.to_vec())?;
    let sd = serial_dictatorship(&instance, &AgentOrder::natural(agents.len()))?.social_cost();
    let mode = match config.rsd {
        RsdSampling::Exact => RsdMode::Exact,
        RsdSampling::MonteCarlo { orderings } => RsdMode::MonteCarlo { trials: orderings, seed: rsd_seed },
    };
    let rsd = rsd_expected_cost(&instance, mode)?;
    Ok(TrialOutcome {
        sd,
        rsd: rsd.mean,
        rsd_stderr: rsd.stderr,
        reference: reference.cost,
        ratio_sd: ratio(sd, reference.cost),
        ratio_rsd: ratio(rsd.mean, reference.cost),
    })
}

/// Runs the `γ` sweep. Each trial draws one population (reused across all
/// `γ`) and compares SD (agents in id order) and RSD on the augmented
/// network against the reference on the original network. Trials and `γ`
/// values run in parallel; output depends only on the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let base = &config.network;
    let seeds = trial_seeds(config.seed, config.trials);
    let populations: Vec<Vec<AgentProfile>> = seeds
        .iter()
        .map(|s| match &config.population {
            Population::Random { count } => random_population(base, *count, s.population),
            Population::Fixed(agents) => Ok(agents.clone()),
        })
        .collect::<Result<_>>()?;
    let references: Vec<Option<Reference>> = populations
        .par_iter()
        .map(|agents| {
            let inst = Instance::new(Arc::clone(base), agents.clone())?;
            match reference(&inst, config.reference) {
                Ok(r) => Ok(Some(r)),
                Err(e @ (TapError::InvalidArgument(_) | TapError::Io(_))) => Err(e),
                Err(e) => {
                    log::warn!("reference unavailable: {e}");
                    Ok(None)
                }
            }
        })
        .collect::<Result<_>>()?;
    let augmented: Vec<Arc<RoadNetwork>> =
        config.gammas.iter().map(|&g| augment(base, g).map(Arc::new)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..config.gammas.len()).flat_map(|g| (0..config.trials).map(move |t| (g, t))).collect();
    let outcomes: Vec<Option<TrialOutcome>> = jobs
        .par_iter()
        .map(|&(g, t)| {
            let r = references[t].as_ref()?;
            match run_trial(config, &augmented[g], &populations[t], r, seeds[t].rsd) {
                Ok(o) => Some(o),
                Err(e) => {
                    log::info!("gamma {} trial {t}: {e}", config.gammas[g]);
                    None
                }
            }
        })
        .collect();
    let exact_kind = if references.iter().flatten().all(|r| r.certified) {
        ReferenceKind::Exact
    } else {
        ReferenceKind::UncertifiedOptimum
    };
    let ref_kind = match config.reference {
        ReferenceMode::Exact(_) => exact_kind,
        ReferenceMode::Proxy => ReferenceKind::LowerBoundProxy,
    };
    let rows = config
        .gammas
        .iter()
        .enumerate()
        .map(|(g, &gamma)| {
            let done: Vec<&TrialOutcome> =
                outcomes[g * config.trials..(g + 1) * config.trials].iter().flatten().collect();
            let k = done.len() as f64;
            let mean = |f: &dyn Fn(&TrialOutcome) -> f64| {
                if done.is_empty() {
                    f64::NAN
                } else {
                    done.iter().map(|o| f(o)).sum::<f64>() / k
                }
            };
            let stderr = if done.is_empty() {
                f64::NAN
            } else {
                done.iter().map(|o| o.rsd_stderr.powi(2)).sum::<f64>().sqrt() / k
            };
            if done.is_empty() {
                log::warn!("gamma {gamma}: no feasible trial");
            }
            ResultRow {
                gamma,
                sc_sd: mean(&|o| o.sd),
                sc_rsd_mean: mean(&|o| o.rsd),
                sc_rsd_stderr: stderr,
                sc_ref: mean(&|o| o.reference),
                ref_kind,
                ratio_sd: mean(&|o| o.ratio_sd),
                ratio_rsd: mean(&|o| o.ratio_rsd),
                stats: GraphStats::of(&augmented[g]),
                feasible_trials: done.len(),
                trials: config.trials,
            }
        })
        .collect();
    Ok(rows)
}

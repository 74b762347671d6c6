//! Greedy thinning-schedule search.
//!
//! Starting from the no-thinning optimum, one thinning at a time is
//! proposed by exhaustive grid search over its timing, severity,
//! species scope, and diameter-class allocation. A proposal is accepted
//! only if it improves the maximal expected return rate over the
//! rotation window by more than the tolerance; after an acceptance the
//! already-placed thinnings are refined by block coordinate descent
//! over the same grid. The search stops at the first non-improving
//! proposal or at the thinning cap.

use serde::{Deserialize, Serialize};

use crate::economics::{CycleExpectation, EconomicConfig};
use crate::error::{Error, Result};
use crate::grid::{self, STEP_YEARS};
use crate::growth::{GrowthParams, Species, StandState};
use crate::schedule::{
    optimal_rotation, rotation_curve, simulate_trajectory, Schedule, ThinningSpec,
    SCHEDULE_SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    /// Rotation search window, years.
    pub window: (f64, f64),
    /// Candidate severities (fraction of basal area removed).
    pub q_values: Vec<f64>,
    /// Candidate allocation exponents.
    pub gamma_values: Vec<i32>,
    /// Candidate thinning times reach this far beyond the observed age.
    pub thinning_horizon_years: f64,
    /// Minimum improvement of max expected return rate for acceptance, 1/a.
    pub epsilon: f64,
    pub max_thinnings: usize,
    /// Cap on coordinate-descent passes after each acceptance.
    pub max_refinement_passes: usize,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            window: (0.0, 120.0),
            q_values: (1..=18).map(|i| i as f64 * 0.05).collect(),
            gamma_values: vec![-2, -1, 0, 1, 2],
            thinning_horizon_years: 37.5,
            epsilon: 1e-5,
            max_thinnings: 3,
            max_refinement_passes: 10,
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::schema(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.window.0 > self.window.1 || !self.window.1.is_finite() {
            return Err(Error::schema("invalid rotation search window".to_string()));
        }
        Ok(())
    }
}

/// One optimizer trace row: a proposal or refinement step and the best
/// max-over-rotation return rate known after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub candidate: String,
    pub max_return_rate: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Accepted schedule with the rotation set to the optimum.
    pub schedule: Schedule,
    /// Optimum point of the final expectation curve.
    pub best: CycleExpectation,
    /// Expectation curve of the final schedule over the whole window.
    pub curve: Vec<CycleExpectation>,
    pub trace: Vec<TraceRow>,
}

/// Candidate species scopes: thin every species present, or a single one.
fn species_scopes(state: &StandState) -> Vec<Vec<Species>> {
    let present: Vec<Species> = state
        .distributions
        .iter()
        .filter(|d| d.total_stems() > 0.0)
        .map(|d| d.species)
        .collect();
    let mut scopes = vec![present.clone()];
    if present.len() > 1 {
        for &s in &present {
            scopes.push(vec![s]);
        }
    }
    scopes
}

struct Evaluator<'a> {
    initial: &'a StandState,
    growth: &'a GrowthParams,
    cfg: &'a EconomicConfig,
    window: (f64, f64),
    fertilizations: Vec<f64>,
    /// Rotations must end after every fixed fertilization.
    min_tau: f64,
}

impl Evaluator<'_> {
    fn schedule(&self, thinnings: &[ThinningSpec]) -> Schedule {
        Schedule {
            schema_version: SCHEDULE_SCHEMA_VERSION,
            rotation: self.window.1,
            thinnings: thinnings.to_vec(),
            fertilizations: self.fertilizations.clone(),
        }
    }

    /// Best expectation over admissible rotations, with the full curve.
    /// Evaluated from the trajectory and curve alone; the committed
    /// ledger is only built for the final accepted schedule.
    fn evaluate(&self, thinnings: &[ThinningSpec]) -> Result<(CycleExpectation, Vec<CycleExpectation>)> {
        let schedule = self.schedule(thinnings);
        let horizon = grid::ceil_to_grid(schedule.rotation.max(self.window.1).max(self.initial.age));
        let trajectory = simulate_trajectory(self.initial, &schedule, self.growth, horizon)?;
        let curve = rotation_curve(&trajectory, self.growth, self.cfg, self.window)?;
        let admissible: Vec<CycleExpectation> =
            curve.iter().copied().filter(|p| p.tau > self.min_tau + 1e-9).collect();
        let best = optimal_rotation(&admissible)?;
        Ok((best, curve))
    }

    fn objective(&self, thinnings: &[ThinningSpec]) -> Result<f64> {
        Ok(self.evaluate(thinnings)?.0.expected_return_rate)
    }
}

fn describe(spec: &ThinningSpec) -> String {
    let q = spec.intensity.values().next().copied().unwrap_or(0.0);
    let scope = if spec.intensity.len() == 1 {
        spec.intensity.keys().next().unwrap().name().to_string()
    } else {
        "all".to_string()
    };
    format!(
        "thin t={} q={:.2} gamma={} species={scope}",
        spec.time, q, spec.allocation_exponent
    )
}

/// Exhaustive search for the best single thinning to insert into (or
/// substitute at `replace_index` of) the accepted list. Candidates are
/// enumerated in deterministic order (time, severity, exponent, scope)
/// and ties keep the earliest candidate, so the result is independent
/// of evaluation order.
fn best_single_thinning(
    evaluator: &Evaluator,
    accepted: &[ThinningSpec],
    replace_index: Option<usize>,
    candidate_times: &[f64],
    opt: &OptimizationConfig,
    scopes: &[Vec<Species>],
) -> Result<Option<(ThinningSpec, f64)>> {
    let mut best: Option<(ThinningSpec, f64)> = None;
    for &time in candidate_times {
        let occupied = accepted
            .iter()
            .enumerate()
            .any(|(i, t)| Some(i) != replace_index && grid::step_index(t.time) == grid::step_index(time));
        if occupied {
            continue;
        }
        for &q in &opt.q_values {
            for &gamma in &opt.gamma_values {
                for scope in scopes {
                    let candidate = ThinningSpec::uniform(time, q, scope, gamma);
                    let mut thinnings: Vec<ThinningSpec> = accepted
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| Some(*i) != replace_index)
                        .map(|(_, t)| t.clone())
                        .collect();
                    thinnings.push(candidate.clone());
                    thinnings.sort_by(|a, b| a.time.total_cmp(&b.time));
                    let value = evaluator.objective(&thinnings)?;
                    if best.as_ref().map_or(true, |(_, v)| value > *v) {
                        best = Some((candidate, value));
                    }
                }
            }
        }
    }
    Ok(best)
}

fn sorted_insert(thinnings: &mut Vec<ThinningSpec>, spec: ThinningSpec) {
    thinnings.push(spec);
    thinnings.sort_by(|a, b| a.time.total_cmp(&b.time));
}

/// The paper's incremental thinning search with fixed fertilization
/// times (empty for the plain search).
pub fn greedy_thinning_search_with_fertilizations(
    initial: &StandState,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
    opt: &OptimizationConfig,
    fertilizations: &[f64],
) -> Result<SearchOutcome> {
    opt.validate()?;
    initial.validate()?;
    let min_tau = fertilizations.iter().copied().fold(0.0, f64::max);
    let evaluator = Evaluator {
        initial,
        growth,
        cfg,
        window: opt.window,
        fertilizations: fertilizations.to_vec(),
        min_tau,
    };
    let scopes = species_scopes(initial);
    let time_lo = grid::ceil_to_grid(initial.age);
    let time_hi = (initial.age + opt.thinning_horizon_years).min(opt.window.1 - STEP_YEARS);
    let candidate_times: Vec<f64> = (grid::step_index(time_lo)..=grid::step_index(time_hi))
        .map(grid::step_time)
        .collect();

    let mut trace = Vec::new();
    let mut accepted: Vec<ThinningSpec> = Vec::new();
    let (mut best_point, mut curve) = evaluator.evaluate(&accepted)?;
    let mut best_value = best_point.expected_return_rate;
    trace.push(TraceRow {
        iteration: 0,
        candidate: "baseline (no thinning)".to_string(),
        max_return_rate: best_value,
        accepted: true,
    });

    let mut iteration = 0;
    while accepted.len() < opt.max_thinnings {
        iteration += 1;
        let proposal =
            best_single_thinning(&evaluator, &accepted, None, &candidate_times, opt, &scopes)?;
        let Some((spec, value)) = proposal else { break };
        if value <= best_value + opt.epsilon {
            trace.push(TraceRow {
                iteration,
                candidate: format!("{} (rejected)", describe(&spec)),
                max_return_rate: best_value,
                accepted: false,
            });
            break;
        }
        trace.push(TraceRow {
            iteration,
            candidate: describe(&spec),
            max_return_rate: value,
            accepted: true,
        });
        sorted_insert(&mut accepted, spec);
        best_value = value;

        // Re-optimize every placed thinning, one at a time, until no
        // single substitution improves the objective.
        for _ in 0..opt.max_refinement_passes {
            let mut improved = false;
            for index in 0..accepted.len() {
                iteration += 1;
                let replacement = best_single_thinning(
                    &evaluator,
                    &accepted,
                    Some(index),
                    &candidate_times,
                    opt,
                    &scopes,
                )?;
                if let Some((spec, value)) = replacement {
                    if value > best_value + opt.epsilon {
                        trace.push(TraceRow {
                            iteration,
                            candidate: format!("refine #{index}: {}", describe(&spec)),
                            max_return_rate: value,
                            accepted: true,
                        });
                        accepted.remove(index);
                        sorted_insert(&mut accepted, spec);
                        best_value = value;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let evaluated = evaluator.evaluate(&accepted)?;
        best_point = evaluated.0;
        curve = evaluated.1;
        best_value = best_point.expected_return_rate;
    }

    let (final_best, final_curve) = (best_point, curve);
    let schedule = Schedule {
        schema_version: SCHEDULE_SCHEMA_VERSION,
        rotation: final_best.tau,
        thinnings: accepted,
        fertilizations: fertilizations.to_vec(),
    };
    schedule.validate()?;
    Ok(SearchOutcome { schedule, best: final_best, curve: final_curve, trace })
}

/// Incremental thinning search without fertilizations.
pub fn greedy_thinning_search(
    initial: &StandState,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
    opt: &OptimizationConfig,
) -> Result<SearchOutcome> {
    greedy_thinning_search_with_fertilizations(initial, growth, cfg, opt, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{DiameterClassDistribution, SiteDescriptor, NUM_CLASSES};
    use crate::schedule::simulate_schedule;

    fn test_state() -> StandState {
        let mut spruce = vec![0.0; NUM_CLASSES];
        spruce[1] = 1000.0;
        spruce[2] = 700.0;
        spruce[3] = 250.0;
        StandState {
            age: 32.5,
            distributions: vec![DiameterClassDistribution {
                species: Species::Spruce,
                stems: spruce,
            }],
            site: SiteDescriptor::mesic(26.0),
            fert_remaining: 0.0,
        }
    }

    fn coarse_opt() -> OptimizationConfig {
        OptimizationConfig {
            window: (0.0, 100.0),
            q_values: vec![0.2, 0.4, 0.6],
            gamma_values: vec![0],
            thinning_horizon_years: 5.0,
            epsilon: 1e-5,
            max_thinnings: 1,
            max_refinement_passes: 4,
        }
    }

    #[test]
    fn coarse_grid_matches_exhaustive_enumeration() {
        // 3 times x 3 intensities x 1 allocation, single thinning: the
        // greedy first acceptance must equal the exhaustive optimum.
        let state = test_state();
        let growth = GrowthParams::default();
        let cfg = EconomicConfig::default();
        let opt = coarse_opt();
        let outcome = greedy_thinning_search(&state, &growth, &cfg, &opt).unwrap();

        // Independent exhaustive oracle over all 9 candidates plus the
        // empty schedule.
        let mut oracle_best_r = f64::NEG_INFINITY;
        let mut oracle_best: Option<ThinningSpec> = None;
        for time in [32.5, 35.0, 37.5] {
            for q in [0.2, 0.4, 0.6] {
                let spec = ThinningSpec::uniform(time, q, &[Species::Spruce], 0);
                let schedule = Schedule {
                    schema_version: SCHEDULE_SCHEMA_VERSION,
                    rotation: 100.0,
                    thinnings: vec![spec.clone()],
                    fertilizations: Vec::new(),
                };
                let out = simulate_schedule(&state, &schedule, &growth, &cfg, (0.0, 100.0)).unwrap();
                let best = optimal_rotation(&out.curve).unwrap();
                if best.expected_return_rate > oracle_best_r {
                    oracle_best_r = best.expected_return_rate;
                    oracle_best = Some(spec);
                }
            }
        }
        let no_thin = simulate_schedule(
            &state,
            &Schedule::clearcut_only(100.0),
            &growth,
            &cfg,
            (0.0, 100.0),
        )
        .unwrap();
        let no_thin_r = optimal_rotation(&no_thin.curve).unwrap().expected_return_rate;

        if oracle_best_r > no_thin_r + opt.epsilon {
            assert_eq!(outcome.schedule.thinnings.len(), 1);
            assert_eq!(outcome.schedule.thinnings[0], oracle_best.unwrap());
            assert!((outcome.best.expected_return_rate - oracle_best_r).abs() < 1e-12);
        } else {
            assert!(outcome.schedule.thinnings.is_empty());
        }
    }

    #[test]
    fn hopeless_thinnings_yield_empty_schedule() {
        // An acceptance margin no candidate can clear leaves the
        // clearcut-only schedule in place after a single failed round.
        let state = test_state();
        let growth = GrowthParams::default();
        let cfg = EconomicConfig::default();
        let mut opt = coarse_opt();
        opt.epsilon = 1.0;
        let outcome = greedy_thinning_search(&state, &growth, &cfg, &opt).unwrap();
        assert!(outcome.schedule.thinnings.is_empty());
        assert_eq!(outcome.trace.len(), 2);
        assert!(!outcome.trace[1].accepted);
    }

    #[test]
    fn accepted_trace_is_strictly_improving() {
        let state = test_state();
        let growth = GrowthParams::default();
        let cfg = EconomicConfig::default();
        let mut opt = OptimizationConfig::default();
        opt.q_values = vec![0.15, 0.3, 0.45];
        opt.gamma_values = vec![0, 1];
        opt.thinning_horizon_years = 20.0;
        let outcome = greedy_thinning_search(&state, &growth, &cfg, &opt).unwrap();
        let accepted: Vec<f64> = outcome
            .trace
            .iter()
            .filter(|row| row.accepted)
            .map(|row| row.max_return_rate)
            .collect();
        for pair in accepted.windows(2) {
            assert!(pair[1] > pair[0] + opt.epsilon);
        }
        // Grid closure: everything lands on the 2.5-year grid.
        assert!(grid::is_on_grid(outcome.schedule.rotation));
        for t in &outcome.schedule.thinnings {
            assert!(grid::is_on_grid(t.time));
        }
    }
}

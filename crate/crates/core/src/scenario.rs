//! The four nitrogen-fertilization timing scenarios and the
//! rotation-extension expense accounting.
//!
//! Each scenario pairs an unfertilized baseline (the thinning-optimized
//! rotation) with a fertilized treatment:
//!
//! * after the first thinning, re-running the thinning search with the
//!   fertilization fixed (planned fertilization changes the suitable
//!   thinning intensity);
//! * after the second thinning, likewise (only for stands whose
//!   baseline carries two thinnings);
//! * ten years before stand maturity, keeping the baseline schedule
//!   untouched;
//! * at stand maturity, extending the rotation by exactly ten years,
//!   schedule otherwise unchanged.
//!
//! "Maturity" is the rotation age maximizing the expected return rate
//! of the baseline.

use serde::{Deserialize, Serialize};

use crate::economics::{carbon_equivalent, CarbonMode, CycleExpectation, EconomicConfig};
use crate::error::{Error, Result};
use crate::grid;
use crate::growth::{GrowthParams, Species, StandState};
use crate::optimizer::{
    greedy_thinning_search, greedy_thinning_search_with_fertilizations, OptimizationConfig,
    SearchOutcome, TraceRow,
};
use crate::schedule::{simulate_schedule, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    AfterFirstThinning,
    AfterSecondThinning,
    TenYearsBeforeMaturity,
    AtMaturityExtendTen,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::AfterFirstThinning,
        ScenarioKind::AfterSecondThinning,
        ScenarioKind::TenYearsBeforeMaturity,
        ScenarioKind::AtMaturityExtendTen,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::AfterFirstThinning => "after_first_thinning",
            ScenarioKind::AfterSecondThinning => "after_second_thinning",
            ScenarioKind::TenYearsBeforeMaturity => "ten_years_before_maturity",
            ScenarioKind::AtMaturityExtendTen => "at_maturity_extend_ten",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::schema(format!("unknown scenario kind '{s}'")))
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Financial expense of extending the rotation:
/// `-delta_r * (tau + delta_tau) * (C + delta_C)`. A negative result
/// means the extension is profitable.
pub fn rotation_extension_expense(delta_r: f64, tau_plus: f64, cap_plus: f64) -> f64 {
    debug_assert!(tau_plus > 0.0 && cap_plus > 0.0);
    -delta_r * tau_plus * cap_plus
}

/// Expense of enhanced timber stock per year and excess volume,
/// Eur/(m³·a): `expense / (delta_v * (tau + delta_tau))`.
pub fn stock_expense_rate(expense: f64, delta_v: f64, tau_plus: f64) -> Result<f64> {
    if delta_v == 0.0 {
        return Err(Error::precondition(
            "stock expense rate undefined: no stock enhancement (delta_v = 0)".to_string(),
        ));
    }
    if !(tau_plus > 0.0) {
        return Err(Error::precondition(format!("tau + delta_tau must be > 0, got {tau_plus}")));
    }
    Ok(expense / (delta_v * tau_plus))
}

/// The same expense allocated to the extension period only, scaled by
/// `(tau + delta_tau) / delta_tau`.
pub fn extension_only_rate(rate: f64, tau_plus: f64, delta_tau: f64) -> Result<f64> {
    if delta_tau == 0.0 {
        return Err(Error::precondition(
            "extension-only rate undefined: delta_tau = 0".to_string(),
        ));
    }
    Ok(rate * tau_plus / delta_tau)
}

/// Differences between a fertilized point and its comparison baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaBlock {
    pub delta_return_rate: f64,
    pub delta_capitalization: f64,
    pub delta_volume: f64,
    /// Relative volume change, percent of the baseline volume.
    pub delta_volume_pct: f64,
    pub delta_carbon_stem: f64,
    pub delta_carbon_total: f64,
}

impl DeltaBlock {
    fn between(fertilized: &CycleExpectation, baseline: &CycleExpectation, cfg: &EconomicConfig) -> Self {
        let delta_volume = fertilized.expected_volume - baseline.expected_volume;
        DeltaBlock {
            delta_return_rate: fertilized.expected_return_rate - baseline.expected_return_rate,
            delta_capitalization: fertilized.expected_capitalization
                - baseline.expected_capitalization,
            delta_volume,
            delta_volume_pct: if baseline.expected_volume != 0.0 {
                100.0 * delta_volume / baseline.expected_volume
            } else {
                0.0
            },
            delta_carbon_stem: carbon_equivalent(delta_volume, cfg, CarbonMode::Stem),
            delta_carbon_total: carbon_equivalent(delta_volume, cfg, CarbonMode::Total),
        }
    }
}

/// One arm of the rotation-extension economics (with or without
/// fertilization), measured against the unextended baseline optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionArm {
    pub delta_return_rate: f64,
    pub delta_capitalization: f64,
    pub delta_volume: f64,
    pub delta_volume_pct: f64,
    /// Financial expense of the extension, Eur/ha.
    pub expense: f64,
    /// Expense per year and excess volume, Eur/(m³·a); absent when the
    /// extension adds no volume.
    pub stock_expense_rate: Option<f64>,
    /// The same, allocated to the extension period only.
    pub extension_only_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionEconomics {
    pub tau_plus: f64,
    pub delta_tau: f64,
    pub fertilized: ExtensionArm,
    pub unfertilized: ExtensionArm,
}

fn extension_arm(
    extended: &CycleExpectation,
    baseline: &CycleExpectation,
    tau_plus: f64,
    delta_tau: f64,
) -> Result<ExtensionArm> {
    let delta_r = extended.expected_return_rate - baseline.expected_return_rate;
    let delta_v = extended.expected_volume - baseline.expected_volume;
    let expense = rotation_extension_expense(delta_r, tau_plus, extended.expected_capitalization);
    let rate = if delta_v != 0.0 { Some(stock_expense_rate(expense, delta_v, tau_plus)?) } else { None };
    let only = match rate {
        Some(r) if delta_tau != 0.0 => Some(extension_only_rate(r, tau_plus, delta_tau)?),
        _ => None,
    };
    Ok(ExtensionArm {
        delta_return_rate: delta_r,
        delta_capitalization: extended.expected_capitalization - baseline.expected_capitalization,
        delta_volume: delta_v,
        delta_volume_pct: if baseline.expected_volume != 0.0 {
            100.0 * delta_v / baseline.expected_volume
        } else {
            0.0
        },
        expense,
        stock_expense_rate: rate,
        extension_only_rate: only,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub kind: ScenarioKind,
    pub baseline_schedule: Schedule,
    pub fertilized_schedule: Schedule,
    pub baseline_curve: Vec<CycleExpectation>,
    pub fertilized_curve: Vec<CycleExpectation>,
    /// Baseline optimum ("stand maturity").
    pub tau_baseline: f64,
    /// Fertilized rotation: re-optimized for the re-searched scenarios,
    /// pinned for the fixed-schedule ones.
    pub tau_fertilized: f64,
    pub delta_tau: f64,
    pub baseline_at_optimum: CycleExpectation,
    pub fertilized_at_optimum: CycleExpectation,
    /// Fertilized vs baseline, each at its own rotation.
    pub at_optima: DeltaBlock,
    /// Fertilize but keep the rotation matched to the comparison
    /// baseline (for the extension scenario: both rotations extended).
    pub fixed_rotation: DeltaBlock,
    /// Rotation-extension economics; present for the extension scenario.
    pub extension: Option<ExtensionEconomics>,
    pub trace: Vec<TraceRow>,
}

fn curve_point(curve: &[CycleExpectation], tau: f64) -> Result<CycleExpectation> {
    curve
        .iter()
        .find(|p| grid::step_index(p.tau) == grid::step_index(tau))
        .copied()
        .ok_or_else(|| {
            Error::precondition(format!("rotation {tau} not covered by the evaluated curve"))
        })
}

fn check_scenario_stand(initial: &StandState) -> Result<()> {
    initial.validate()?;
    // Site class and soil are already constrained to mesic mineral by
    // the type system; dominance still has to be checked.
    if initial.basal_area_share(Species::Spruce) <= 0.5 {
        return Err(Error::precondition(
            "scenario layer accepts only spruce-dominated stands".to_string(),
        ));
    }
    Ok(())
}

fn fixed_schedule_run(
    initial: &StandState,
    baseline: &SearchOutcome,
    fertilization_time: f64,
    rotation: f64,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
    opt: &OptimizationConfig,
) -> Result<(Schedule, Vec<CycleExpectation>)> {
    let mut schedule = baseline.schedule.clone();
    schedule.rotation = rotation;
    schedule.fertilizations = vec![fertilization_time];
    schedule.validate()?;
    let window = (opt.window.0, opt.window.1.max(rotation));
    let out = simulate_schedule(initial, &schedule, growth, cfg, window)?;
    Ok((schedule, out.curve))
}

/// Run one fertilization scenario for one stand.
pub fn run_scenario(
    kind: ScenarioKind,
    initial: &StandState,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
    opt: &OptimizationConfig,
) -> Result<ScenarioResult> {
    check_scenario_stand(initial)?;
    let baseline = greedy_thinning_search(initial, growth, cfg, opt)?;
    run_scenario_with_baseline(kind, initial, growth, cfg, opt, &baseline)
}

/// `run_scenario` with a precomputed baseline thinning search, so a
/// caller evaluating several scenarios on one stand pays for the
/// baseline only once.
pub fn run_scenario_with_baseline(
    kind: ScenarioKind,
    initial: &StandState,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
    opt: &OptimizationConfig,
    baseline: &SearchOutcome,
) -> Result<ScenarioResult> {
    check_scenario_stand(initial)?;
    let tau_baseline = baseline.best.tau;
    let baseline_at_optimum = baseline.best;

    let (fertilized_schedule, fertilized_curve, tau_fertilized, mut trace) = match kind {
        ScenarioKind::AfterFirstThinning | ScenarioKind::AfterSecondThinning => {
            let index = if kind == ScenarioKind::AfterFirstThinning { 0 } else { 1 };
            let Some(thinning) = baseline.schedule.thinnings.get(index) else {
                return Err(Error::precondition(format!(
                    "scenario {kind} needs a baseline with at least {} thinning(s), found {}",
                    index + 1,
                    baseline.schedule.thinnings.len()
                )));
            };
            let fert_time = thinning.time;
            let searched = greedy_thinning_search_with_fertilizations(
                initial,
                growth,
                cfg,
                opt,
                &[fert_time],
            )?;
            (searched.schedule, searched.curve, searched.best.tau, searched.trace)
        }
        ScenarioKind::TenYearsBeforeMaturity => {
            let fert_time = tau_baseline - 10.0;
            if fert_time < initial.age {
                return Err(Error::precondition(format!(
                    "fertilization time {fert_time} precedes the observed stand age {}",
                    initial.age
                )));
            }
            let (schedule, curve) =
                fixed_schedule_run(initial, baseline, fert_time, tau_baseline, growth, cfg, opt)?;
            // The rotation is deliberately not re-optimized.
            (schedule, curve, tau_baseline, Vec::new())
        }
        ScenarioKind::AtMaturityExtendTen => {
            let fert_time = tau_baseline;
            let rotation = tau_baseline + 10.0;
            let (schedule, curve) =
                fixed_schedule_run(initial, baseline, fert_time, rotation, growth, cfg, opt)?;
            (schedule, curve, rotation, Vec::new())
        }
    };

    let fertilized_at_optimum = curve_point(&fertilized_curve, tau_fertilized)?;
    let at_optima = DeltaBlock::between(&fertilized_at_optimum, &baseline_at_optimum, cfg);

    // Matched-rotation comparison: same tau on both curves.
    let matched_tau = match kind {
        ScenarioKind::AtMaturityExtendTen => tau_fertilized,
        _ => tau_baseline,
    };
    let fertilized_matched = curve_point(&fertilized_curve, matched_tau)?;
    let baseline_matched = curve_point(&baseline.curve, matched_tau)?;
    let fixed_rotation = DeltaBlock::between(&fertilized_matched, &baseline_matched, cfg);

    let extension = if kind == ScenarioKind::AtMaturityExtendTen {
        let tau_plus = tau_fertilized;
        let delta_tau = tau_fertilized - tau_baseline;
        let extended_unfertilized = curve_point(&baseline.curve, tau_plus)?;
        Some(ExtensionEconomics {
            tau_plus,
            delta_tau,
            fertilized: extension_arm(&fertilized_at_optimum, &baseline_at_optimum, tau_plus, delta_tau)?,
            unfertilized: extension_arm(
                &extended_unfertilized,
                &baseline_at_optimum,
                tau_plus,
                delta_tau,
            )?,
        })
    } else {
        None
    };

    let mut full_trace = baseline.trace.clone();
    full_trace.append(&mut trace);

    Ok(ScenarioResult {
        kind,
        baseline_schedule: baseline.schedule.clone(),
        fertilized_schedule,
        baseline_curve: baseline.curve.clone(),
        fertilized_curve,
        tau_baseline,
        tau_fertilized,
        delta_tau: tau_fertilized - tau_baseline,
        baseline_at_optimum,
        fertilized_at_optimum,
        at_optima,
        fixed_rotation,
        extension,
        trace: full_trace,
    })
}

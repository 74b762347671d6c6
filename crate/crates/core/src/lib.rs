//! Boreal stand rotation economics.
//!
//! A diameter-class matrix growth model drives stand development in
//! 30-month timesteps. Stands and harvests are priced on a balance-sheet
//! ledger over one rotation, and the expected rate of return on capital
//! is taken under periodic boundary conditions (the rotation repeats
//! forever; expectations are averages over one cycle observed at a
//! uniformly random time). On top of that sit a greedy thinning-schedule
//! search and four nitrogen-fertilization timing scenarios with
//! rotation-extension expense accounting and carbon equivalents.

pub mod economics;
pub mod error;
pub mod grid;
pub mod growth;
pub mod optimizer;
pub mod scenario;
pub mod schedule;
pub mod synth;

pub use economics::{
    build_ledger, carbon_equivalent, expected_capitalization, expected_profit_rate,
    expected_return_rate, expected_volume, harvest_revenue, stand_value, stumpage_value,
    Assortment, CarbonMode,
    CycleExpectation, EconomicConfig, HarvestType, Ledger, LedgerEvent, LedgerEventKind,
    VolumeBySpecies,
};
pub use error::{Error, Result};
pub use growth::{
    advance_step, apply_fertilization, class_midpoint_cm, effective_site_index, stand_metrics,
    stem_basal_area_m2, AssortmentVolumes, DiameterClassDistribution, GrowthParams, SiteClass,
    SiteDescriptor, Soil, Species, StandMetrics, StandState, FERTILIZATION_DURATION_YEARS,
    NUM_CLASSES,
};
pub use optimizer::{
    greedy_thinning_search, greedy_thinning_search_with_fertilizations, OptimizationConfig,
    SearchOutcome, TraceRow,
};
pub use scenario::{
    extension_only_rate, rotation_extension_expense, run_scenario, run_scenario_with_baseline,
    stock_expense_rate, DeltaBlock, ExtensionArm, ExtensionEconomics, ScenarioKind, ScenarioResult,
};
pub use schedule::{
    apply_thinning, optimal_rotation, rotation_curve, simulate_schedule, simulate_trajectory,
    Schedule, SimEvent, SimEventKind, SimulationOutput, ThinningSpec, Trajectory,
};
pub use synth::{bundled_stands, gen_stands, StandFile, BUNDLED_COUNT, BUNDLED_SEED};

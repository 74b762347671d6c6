//! Pricing, the balance-sheet/profit-loss ledger along a rotation, and
//! the periodic-boundary expectations.
//!
//! The rotation repeats identically forever and is observed at a
//! uniformly random time, so the probability density over the cycle is
//! p(t) = 1/tau. The expected profit rate and expected capitalization
//! are integrals of the piecewise-linear ledger curves over [0, tau],
//! with instantaneous amortization write-offs entering the profit
//! expectation as point masses. The expected return rate on capital is
//! their ratio.
//!
//! Accounting rules: the profit rate carries value growth of the
//! standing stock, interest expense, and amortization write-offs, but
//! no investments or withdrawals. Capitalization carries the stock's
//! stumpage value, bare land value, and the book values of investments
//! not yet amortized. Regeneration cost is written off at the final
//! harvest; a fertilization cost at the first harvest after its
//! application.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, STEP_YEARS};
use crate::growth::{stand_metrics, AssortmentVolumes, GrowthParams, Species, StandState};
use crate::schedule::{Schedule, SimEventKind, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assortment {
    Sawlog,
    Pulp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HarvestType {
    Thinning,
    Clearcut,
}

impl HarvestType {
    pub fn name(&self) -> &'static str {
        match self {
            HarvestType::Thinning => "thinning",
            HarvestType::Clearcut => "clearcut",
        }
    }
}

/// Roadside-net stumpage prices for one species, Eur/m³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssortmentPrices {
    pub sawlog: f64,
    pub pulp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesPrices {
    pub thinning: AssortmentPrices,
    pub clearcut: AssortmentPrices,
}

/// Volumes keyed by species, split into assortments, m³/ha.
pub type VolumeBySpecies = BTreeMap<Species, AssortmentVolumes>;

pub const ECONOMIC_CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicConfig {
    pub schema_version: u32,
    /// Label of the price/expense level, e.g. "2019".
    pub price_level: String,
    pub prices: BTreeMap<Species, SpeciesPrices>,
    pub regeneration_cost: f64,
    pub fertilization_cost: f64,
    pub bare_land_value: f64,
    /// Interest rate on capitalization, 1/a. Default 0 (debt-free).
    pub interest_rate: f64,
    /// Stored CO2 per cubic meter of stemwood, tCO2/m³.
    pub carbon_factor_stem: f64,
    /// Stored CO2 per cubic meter including roots, branches, litter and
    /// soil, tCO2/m³.
    pub carbon_factor_total: f64,
}

impl EconomicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != ECONOMIC_CONFIG_SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "economic config schema_version {} unsupported (expected {})",
                self.schema_version, ECONOMIC_CONFIG_SCHEMA_VERSION
            )));
        }
        for (species, p) in &self.prices {
            for v in [p.thinning.sawlog, p.thinning.pulp, p.clearcut.sawlog, p.clearcut.pulp] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::schema(format!("{species}: prices must be finite and >= 0")));
                }
            }
        }
        for (label, v) in [
            ("regeneration_cost", self.regeneration_cost),
            ("fertilization_cost", self.fertilization_cost),
            ("bare_land_value", self.bare_land_value),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::schema(format!("{label} must be finite and >= 0")));
            }
        }
        if !self.interest_rate.is_finite() || self.interest_rate < 0.0 {
            return Err(Error::schema("interest_rate must be finite and >= 0".to_string()));
        }
        if self.carbon_factor_stem < 0.0 || self.carbon_factor_total < self.carbon_factor_stem {
            return Err(Error::schema(
                "carbon factors must satisfy 0 <= stem <= total".to_string(),
            ));
        }
        Ok(())
    }

    fn species_prices(&self, species: Species) -> Result<&SpeciesPrices> {
        self.prices
            .get(&species)
            .ok_or_else(|| Error::precondition(format!("no price row for species {species}")))
    }

    /// All monetary fields scaled by a positive factor. The return-rate
    /// curve is invariant under this scaling.
    pub fn scaled(&self, factor: f64) -> EconomicConfig {
        let mut out = self.clone();
        for p in out.prices.values_mut() {
            p.thinning.sawlog *= factor;
            p.thinning.pulp *= factor;
            p.clearcut.sawlog *= factor;
            p.clearcut.pulp *= factor;
        }
        out.regeneration_cost *= factor;
        out.fertilization_cost *= factor;
        out.bare_land_value *= factor;
        out
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let cfg: EconomicConfig = serde_json::from_str(json)
            .map_err(|e| Error::schema(format!("economic config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("economic config serialize")
    }
}

impl Default for EconomicConfig {
    /// 2019-level price and expense defaults.
    fn default() -> Self {
        let mut prices = BTreeMap::new();
        prices.insert(
            Species::Spruce,
            SpeciesPrices {
                thinning: AssortmentPrices { sawlog: 48.0, pulp: 14.0 },
                clearcut: AssortmentPrices { sawlog: 58.0, pulp: 18.0 },
            },
        );
        prices.insert(
            Species::Pine,
            SpeciesPrices {
                thinning: AssortmentPrices { sawlog: 47.0, pulp: 13.0 },
                clearcut: AssortmentPrices { sawlog: 56.0, pulp: 17.0 },
            },
        );
        prices.insert(
            Species::Birch,
            SpeciesPrices {
                thinning: AssortmentPrices { sawlog: 37.0, pulp: 13.0 },
                clearcut: AssortmentPrices { sawlog: 44.0, pulp: 17.0 },
            },
        );
        prices.insert(
            Species::Other,
            SpeciesPrices {
                thinning: AssortmentPrices { sawlog: 33.0, pulp: 11.0 },
                clearcut: AssortmentPrices { sawlog: 40.0, pulp: 15.0 },
            },
        );
        EconomicConfig {
            schema_version: ECONOMIC_CONFIG_SCHEMA_VERSION,
            price_level: "2019".to_string(),
            prices,
            regeneration_cost: 1400.0,
            fertilization_cost: 350.0,
            bare_land_value: 400.0,
            interest_rate: 0.0,
            carbon_factor_stem: 1.0,
            carbon_factor_total: 2.0,
        }
    }
}

/// Value of a volume set at the given harvest-type price row, Eur/ha.
pub fn stumpage_value(
    volumes: &VolumeBySpecies,
    harvest_type: HarvestType,
    cfg: &EconomicConfig,
) -> Result<f64> {
    let mut total = 0.0;
    for (species, v) in volumes {
        if v.sawlog < 0.0 || v.pulp < 0.0 {
            return Err(Error::precondition(format!("{species}: negative harvest volume")));
        }
        let row = cfg.species_prices(*species)?;
        let prices = match harvest_type {
            HarvestType::Thinning => row.thinning,
            HarvestType::Clearcut => row.clearcut,
        };
        total += v.sawlog * prices.sawlog + v.pulp * prices.pulp;
    }
    Ok(total)
}

/// Per-species, per-class stock value and volume per stem, precomputed
/// once per (growth, prices) pair. Class midpoints are fixed, so the
/// hot per-trajectory-index stock evaluation reduces to multiply-adds.
pub(crate) struct StockTables {
    /// (clearcut value Eur/stem, volume m³/stem) by class.
    per_species: Vec<(Species, [(f64, f64); crate::growth::NUM_CLASSES])>,
}

impl StockTables {
    pub(crate) fn new(growth: &GrowthParams, cfg: &EconomicConfig) -> Result<Self> {
        let mut per_species = Vec::with_capacity(growth.species.len());
        for (&species, block) in &growth.species {
            let prices = cfg.species_prices(species)?.clearcut;
            let mut rows = [(0.0, 0.0); crate::growth::NUM_CLASSES];
            for (c, row) in rows.iter_mut().enumerate() {
                let d = crate::growth::class_midpoint_cm(c);
                let volume = block.volume.volume(d);
                let share = block.sawlog.share(d);
                *row = (
                    volume * (share * prices.sawlog + (1.0 - share) * prices.pulp),
                    volume,
                );
            }
            per_species.push((species, rows));
        }
        Ok(StockTables { per_species })
    }

    /// Clearcut-priced stock value and total volume of the state.
    pub(crate) fn stock_and_volume(&self, state: &StandState) -> Result<(f64, f64)> {
        let mut value = 0.0;
        let mut volume = 0.0;
        for dist in &state.distributions {
            let rows = self
                .per_species
                .iter()
                .find(|(s, _)| *s == dist.species)
                .map(|(_, rows)| rows)
                .ok_or_else(|| {
                    Error::schema(format!(
                        "growth params have no coefficient block for {}",
                        dist.species
                    ))
                })?;
            for (c, &n) in dist.stems.iter().enumerate() {
                value += n * rows[c].0;
                volume += n * rows[c].1;
            }
        }
        Ok((value, volume))
    }
}

/// Revenue of a harvest removal, Eur/ha. This is a withdrawal on the
/// balance sheet, never a profit contribution.
pub fn harvest_revenue(
    removed: &VolumeBySpecies,
    harvest_type: HarvestType,
    cfg: &EconomicConfig,
) -> Result<f64> {
    stumpage_value(removed, harvest_type, cfg)
}

/// Balance-sheet value of the stand: standing stock at clearcut prices,
/// bare land value, and any unamortized book values.
pub fn stand_value(
    state: &StandState,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
    open_book_value: f64,
) -> Result<f64> {
    let metrics = stand_metrics(state, growth)?;
    Ok(stumpage_value(&metrics.volumes, HarvestType::Clearcut, cfg)?
        + cfg.bare_land_value
        + open_book_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerEventKind {
    BookRegeneration,
    BookFertilization,
    AmortizeRegeneration,
    AmortizeFertilization,
    HarvestRevenue(HarvestType),
}

impl LedgerEventKind {
    pub fn is_amortization(&self) -> bool {
        matches!(
            self,
            LedgerEventKind::AmortizeRegeneration | LedgerEventKind::AmortizeFertilization
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            LedgerEventKind::BookRegeneration => "book_regeneration",
            LedgerEventKind::BookFertilization => "book_fertilization",
            LedgerEventKind::AmortizeRegeneration => "amortize_regeneration",
            LedgerEventKind::AmortizeFertilization => "amortize_fertilization",
            LedgerEventKind::HarvestRevenue(HarvestType::Thinning) => "harvest_revenue_thinning",
            LedgerEventKind::HarvestRevenue(HarvestType::Clearcut) => "harvest_revenue_clearcut",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub time: f64,
    pub kind: LedgerEventKind,
    pub amount: f64,
}

/// Piecewise-linear ledger curves over one rotation [0, tau] on the
/// 2.5-year grid. Each grid point carries a (left, right) value pair so
/// harvest discontinuities are representable; the curve is linear from
/// the right value at one grid point to the left value at the next.
#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    pub tau: f64,
    pub grid: Vec<f64>,
    pub capitalization: Vec<(f64, f64)>,
    pub profit_rate: Vec<(f64, f64)>,
    /// Standing commercial volume, m³/ha, same convention.
    pub volume: Vec<(f64, f64)>,
    pub events: Vec<LedgerEvent>,
}

impl Ledger {
    fn check(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::precondition(format!("cycle duration must be > 0, got {}", self.tau)));
        }
        let n = self.grid.len();
        if n < 2
            || self.capitalization.len() != n
            || self.profit_rate.len() != n
            || self.volume.len() != n
        {
            return Err(Error::invariant("ledger sample vectors inconsistent".to_string()));
        }
        Ok(())
    }
}

/// Integral of a (left, right)-sampled piecewise-linear curve.
fn integrate_samples(grid: &[f64], samples: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.len() - 1 {
        let h = grid[i + 1] - grid[i];
        total += 0.5 * h * (samples[i].1 + samples[i + 1].0);
    }
    total
}

/// Expected profit rate over the cycle, Eur/ha/a: the p(t) = 1/tau
/// average of the continuous profit-rate curve, with amortization
/// write-offs as point masses.
pub fn expected_profit_rate(ledger: &Ledger) -> Result<f64> {
    ledger.check()?;
    let continuous = integrate_samples(&ledger.grid, &ledger.profit_rate);
    let atoms: f64 = ledger
        .events
        .iter()
        .filter(|e| e.kind.is_amortization())
        .map(|e| -e.amount)
        .sum();
    Ok((continuous + atoms) / ledger.tau)
}

/// Expected capitalization over the cycle, Eur/ha.
pub fn expected_capitalization(ledger: &Ledger) -> Result<f64> {
    ledger.check()?;
    Ok(integrate_samples(&ledger.grid, &ledger.capitalization) / ledger.tau)
}

/// Expected standing volume over the cycle, m³/ha.
pub fn expected_volume(ledger: &Ledger) -> Result<f64> {
    ledger.check()?;
    Ok(integrate_samples(&ledger.grid, &ledger.volume) / ledger.tau)
}

/// Expected rate of return on capital, 1/a.
pub fn expected_return_rate(ledger: &Ledger) -> Result<f64> {
    let capitalization = expected_capitalization(ledger)?;
    if capitalization <= 0.0 {
        return Err(Error::precondition(format!(
            "expected capitalization must be > 0, got {capitalization}"
        )));
    }
    Ok(expected_profit_rate(ledger)? / capitalization)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarbonMode {
    Stem,
    Total,
}

/// Stored CO2 equivalent of a timber volume, tCO2/ha.
pub fn carbon_equivalent(volume: f64, cfg: &EconomicConfig, mode: CarbonMode) -> f64 {
    debug_assert!(volume.is_finite());
    match mode {
        CarbonMode::Stem => volume * cfg.carbon_factor_stem,
        CarbonMode::Total => volume * cfg.carbon_factor_total,
    }
}

/// Expectations of one candidate rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleExpectation {
    /// Rotation age (cycle duration), years.
    pub tau: f64,
    /// Cycle start; fixed at stand establishment.
    pub b: f64,
    pub expected_profit_rate: f64,
    pub expected_capitalization: f64,
    pub expected_return_rate: f64,
    pub expected_volume: f64,
}

impl CycleExpectation {
    pub fn from_ledger(ledger: &Ledger) -> Result<CycleExpectation> {
        Ok(CycleExpectation {
            tau: ledger.tau,
            b: 0.0,
            expected_profit_rate: expected_profit_rate(ledger)?,
            expected_capitalization: expected_capitalization(ledger)?,
            expected_return_rate: expected_return_rate(ledger)?,
            expected_volume: expected_volume(ledger)?,
        })
    }
}

/// Build the full ledger of one committed rotation.
///
/// The trajectory must be consistent with the schedule: it starts at the
/// observed stand age, samples post-event states on the grid, and lists
/// the applied events with their removals. The rotation ends with a
/// final (clearcut) harvest at `tau`; all schedule events must lie
/// strictly inside (0, tau).
///
/// Before the observed age the growth model cannot be run; the stock
/// value and volume ramp linearly from zero to the first observed
/// values, and the profit rate on that segment is the ramp slope.
pub fn build_ledger(
    trajectory: &Trajectory,
    schedule: &Schedule,
    growth: &GrowthParams,
    cfg: &EconomicConfig,
) -> Result<Ledger> {
    cfg.validate()?;
    let tau = schedule.rotation;
    if !grid::is_on_grid(tau) || tau <= 0.0 {
        return Err(Error::precondition(format!("rotation {tau} is not a positive grid time")));
    }
    let first_age = trajectory.first_age()?;
    if tau < first_age {
        return Err(Error::precondition(format!(
            "rotation {tau} precedes the observed stand age {first_age}"
        )));
    }
    for event in &trajectory.events {
        if event.time <= 0.0 || event.time >= tau {
            return Err(Error::precondition(format!(
                "schedule event at {} lies outside (0, {tau})",
                event.time
            )));
        }
    }

    let n = grid::step_index(tau);
    let i0 = grid::step_index(first_age);
    let grid: Vec<f64> = (0..=n).map(grid::step_time).collect();

    // Pre/post stock values and volumes at observed grid points.
    let mut stock = vec![(0.0, 0.0); n + 1];
    let mut volume = vec![(0.0, 0.0); n + 1];
    for i in i0..=n {
        let state = trajectory.state_at(grid[i])?;
        let metrics = stand_metrics(state, growth)?;
        let value_post = stumpage_value(&metrics.volumes, HarvestType::Clearcut, cfg)?;
        let volume_post = metrics.total_volume();
        let mut value_pre = value_post;
        let mut volume_pre = volume_post;
        for event in trajectory.events_at(grid[i]) {
            if let SimEventKind::Thinning { removed } = &event.kind {
                value_pre += stumpage_value(removed, HarvestType::Clearcut, cfg)?;
                volume_pre += removed.values().map(|v| v.total()).sum::<f64>();
            }
        }
        stock[i] = (value_pre, value_post);
        volume[i] = (volume_pre, volume_post);
    }
    // Juvenile ramp from establishment to the first observed age.
    if i0 > 0 {
        let value_slope = stock[i0].0 / first_age;
        let volume_slope = volume[i0].0 / first_age;
        for i in 0..i0 {
            let v = value_slope * grid[i];
            stock[i] = (v, v);
            let w = volume_slope * grid[i];
            volume[i] = (w, w);
        }
    }

    // Unamortized book values. Regeneration is booked over the whole
    // cycle and written off at the final harvest; each fertilization is
    // booked from its application to the first strictly later harvest.
    let mut events: Vec<LedgerEvent> = vec![LedgerEvent {
        time: 0.0,
        kind: LedgerEventKind::BookRegeneration,
        amount: cfg.regeneration_cost,
    }];
    let mut books = vec![(cfg.regeneration_cost, cfg.regeneration_cost); n + 1];
    let thinning_times: Vec<f64> = trajectory
        .events
        .iter()
        .filter(|e| matches!(e.kind, SimEventKind::Thinning { .. }))
        .map(|e| e.time)
        .collect();
    for event in &trajectory.events {
        match &event.kind {
            SimEventKind::Thinning { removed } => {
                events.push(LedgerEvent {
                    time: event.time,
                    kind: LedgerEventKind::HarvestRevenue(HarvestType::Thinning),
                    amount: harvest_revenue(removed, HarvestType::Thinning, cfg)?,
                });
            }
            SimEventKind::Fertilization => {
                let cost = cfg.fertilization_cost;
                let amort_time = thinning_times
                    .iter()
                    .copied()
                    .filter(|&t| t > event.time)
                    .fold(tau, f64::min);
                events.push(LedgerEvent {
                    time: event.time,
                    kind: LedgerEventKind::BookFertilization,
                    amount: cost,
                });
                events.push(LedgerEvent {
                    time: amort_time,
                    kind: LedgerEventKind::AmortizeFertilization,
                    amount: cost,
                });
                let i_book = grid::step_index(event.time);
                let i_amort = grid::step_index(amort_time);
                for (i, book) in books.iter_mut().enumerate().take(i_amort + 1).skip(i_book) {
                    if i > i_book {
                        book.0 += cost;
                    }
                    if i < i_amort {
                        book.1 += cost;
                    }
                }
            }
        }
    }
    events.push(LedgerEvent {
        time: tau,
        kind: LedgerEventKind::AmortizeRegeneration,
        amount: cfg.regeneration_cost,
    });
    let final_state = trajectory.state_at(tau)?;
    let final_metrics = stand_metrics(final_state, growth)?;
    events.push(LedgerEvent {
        time: tau,
        kind: LedgerEventKind::HarvestRevenue(HarvestType::Clearcut),
        amount: harvest_revenue(&final_metrics.volumes, HarvestType::Clearcut, cfg)?,
    });
    events.sort_by(|a, b| a.time.total_cmp(&b.time));

    let capitalization: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            (
                stock[i].0 + cfg.bare_land_value + books[i].0,
                stock[i].1 + cfg.bare_land_value + books[i].1,
            )
        })
        .collect();

    // Piecewise-constant value-growth rate per interval, plus interest
    // expense on the capitalization (piecewise linear).
    let mut profit_rate = vec![(0.0, 0.0); n + 1];
    for i in 0..n {
        let slope = (stock[i + 1].0 - stock[i].1) / STEP_YEARS;
        profit_rate[i].1 = slope;
        profit_rate[i + 1].0 = slope;
    }
    profit_rate[0].0 = profit_rate[0].1;
    profit_rate[n].1 = profit_rate[n].0;
    if cfg.interest_rate != 0.0 {
        for i in 0..=n {
            profit_rate[i].0 -= cfg.interest_rate * capitalization[i].0;
            profit_rate[i].1 -= cfg.interest_rate * capitalization[i].1;
        }
    }

    Ok(Ledger { tau, grid, capitalization, profit_rate, volume, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_ledger(tau: f64, profit: f64, cap: f64) -> Ledger {
        let n = grid::step_index(tau);
        Ledger {
            tau,
            grid: (0..=n).map(grid::step_time).collect(),
            capitalization: vec![(cap, cap); n + 1],
            profit_rate: vec![(profit, profit); n + 1],
            volume: vec![(0.0, 0.0); n + 1],
            events: Vec::new(),
        }
    }

    #[test]
    fn expected_profit_rate_examples() {
        assert_eq!(expected_profit_rate(&flat_ledger(50.0, 0.0, 1.0)).unwrap(), 0.0);

        // profit_rate(t) = t on [0, 10] -> 5 by symmetry.
        let mut ledger = flat_ledger(10.0, 0.0, 1.0);
        for (i, p) in ledger.profit_rate.iter_mut().enumerate() {
            let t = grid::step_time(i);
            *p = (t, t);
        }
        assert!((expected_profit_rate(&ledger).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn expected_capitalization_examples() {
        assert_eq!(expected_capitalization(&flat_ledger(25.0, 0.0, 5000.0)).unwrap(), 5000.0);

        let mut ledger = flat_ledger(25.0, 0.0, 0.0);
        for (i, k) in ledger.capitalization.iter_mut().enumerate() {
            let v = 1000.0 * grid::step_time(i) / 25.0;
            *k = (v, v);
        }
        assert!((expected_capitalization(&ledger).unwrap() - 500.0).abs() < 1e-12);
    }

    #[test]
    fn expected_return_rate_examples() {
        let ledger = flat_ledger(50.0, 100.0, 5000.0);
        assert!((expected_return_rate(&ledger).unwrap() - 0.02).abs() < 1e-15);

        let zero = flat_ledger(50.0, 0.0, 5000.0);
        assert_eq!(expected_return_rate(&zero).unwrap(), 0.0);

        let degenerate = flat_ledger(50.0, 1.0, 0.0);
        assert!(expected_return_rate(&degenerate).is_err());
    }

    #[test]
    fn amortization_atom_enters_profit() {
        let mut ledger = flat_ledger(50.0, 0.0, 5000.0);
        ledger.events.push(LedgerEvent {
            time: 50.0,
            kind: LedgerEventKind::AmortizeRegeneration,
            amount: 1000.0,
        });
        assert!((expected_profit_rate(&ledger).unwrap() + 20.0).abs() < 1e-12);

        // Harvest revenue is a withdrawal; no profit contribution.
        ledger.events.push(LedgerEvent {
            time: 40.0,
            kind: LedgerEventKind::HarvestRevenue(HarvestType::Thinning),
            amount: 2500.0,
        });
        assert!((expected_profit_rate(&ledger).unwrap() + 20.0).abs() < 1e-12);
    }

    #[test]
    fn harvest_revenue_examples() {
        let cfg = EconomicConfig::default();
        assert_eq!(harvest_revenue(&VolumeBySpecies::new(), HarvestType::Thinning, &cfg).unwrap(), 0.0);

        let mut removed = VolumeBySpecies::new();
        removed.insert(Species::Pine, AssortmentVolumes { sawlog: 0.0, pulp: 10.0 });
        // 10 m3 pine pulp at the clearcut row (17 Eur/m3).
        assert!((harvest_revenue(&removed, HarvestType::Clearcut, &cfg).unwrap() - 170.0).abs() < 1e-12);
        // The thinning row differs and is used when asked for.
        assert!((harvest_revenue(&removed, HarvestType::Thinning, &cfg).unwrap() - 130.0).abs() < 1e-12);
    }

    #[test]
    fn stand_value_examples() {
        let growth = GrowthParams::default();
        let cfg = EconomicConfig::default();
        let empty = StandState {
            age: 30.0,
            distributions: Vec::new(),
            site: crate::growth::SiteDescriptor::mesic(26.0),
            fert_remaining: 0.0,
        };
        assert_eq!(stand_value(&empty, &growth, &cfg, 0.0).unwrap(), cfg.bare_land_value);

        // 100 m3 sawlog at 58 + 50 m3 pulp at 17, no bare land, no books.
        let mut cfg2 = cfg.clone();
        cfg2.bare_land_value = 0.0;
        let mut volumes = VolumeBySpecies::new();
        volumes.insert(Species::Spruce, AssortmentVolumes { sawlog: 100.0, pulp: 0.0 });
        volumes.insert(Species::Pine, AssortmentVolumes { sawlog: 0.0, pulp: 50.0 });
        let value = stumpage_value(&volumes, HarvestType::Clearcut, &cfg2).unwrap();
        assert!((value - 6650.0).abs() < 1e-12);

        // Doubling every price doubles value net of land and books.
        let doubled = stumpage_value(&volumes, HarvestType::Clearcut, &cfg2.scaled(2.0)).unwrap();
        assert!((doubled - 2.0 * value).abs() < 1e-9);
    }

    #[test]
    fn carbon_equivalent_examples() {
        let cfg = EconomicConfig::default();
        assert_eq!(carbon_equivalent(100.0, &cfg, CarbonMode::Total), 200.0);
        assert_eq!(carbon_equivalent(100.0, &cfg, CarbonMode::Stem), 100.0);
        assert_eq!(carbon_equivalent(0.0, &cfg, CarbonMode::Total), 0.0);
    }

    #[test]
    fn config_json_round_trip_and_validation() {
        let cfg = EconomicConfig::default();
        let back = EconomicConfig::from_json_str(&cfg.to_json_string()).unwrap();
        assert_eq!(cfg, back);

        let mut bad = cfg.clone();
        bad.carbon_factor_total = 0.5;
        assert!(bad.validate().is_err());
    }
}

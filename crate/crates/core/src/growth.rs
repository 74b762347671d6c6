//! Diameter-class matrix growth engine.
//!
//! A stand is a set of per-species stem-count vectors over 12 diameter
//! classes of 5 cm width (midpoints 5..60 cm). One step advances the
//! stand by 30 months: stems survive with a logistic survival rate, a
//! fraction of survivors moves up one class in proportion to the
//! diameter increment, and ingrowth enters the smallest class. Nitrogen
//! fertilization raises the effective site index for ten years (four
//! steps); all three component functions respond to site index, so the
//! fertilization effect propagates through increment, survival, and
//! ingrowth.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::STEP_YEARS;

/// Number of diameter classes.
pub const NUM_CLASSES: usize = 12;
/// Class width, cm.
pub const CLASS_WIDTH_CM: f64 = 5.0;
/// Active duration of one nitrogen fertilization, years (four steps).
pub const FERTILIZATION_DURATION_YEARS: f64 = 10.0;

/// Midpoint diameter of a class, cm (5, 10, ..., 60).
pub fn class_midpoint_cm(class: usize) -> f64 {
    CLASS_WIDTH_CM + class as f64 * CLASS_WIDTH_CM
}

/// Cross-sectional area at breast height of one stem of the class, m².
pub fn stem_basal_area_m2(class: usize) -> f64 {
    let radius_m = class_midpoint_cm(class) / 200.0;
    PI * radius_m * radius_m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Spruce,
    Pine,
    Birch,
    Other,
}

impl Species {
    pub const ALL: [Species; 4] = [Species::Spruce, Species::Pine, Species::Birch, Species::Other];

    pub fn name(&self) -> &'static str {
        match self {
            Species::Spruce => "spruce",
            Species::Pine => "pine",
            Species::Birch => "birch",
            Species::Other => "other",
        }
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteClass {
    Mesic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Soil {
    Mineral,
}

/// Site description. The site index is the dominant height in meters at
/// breast-height age 40 years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteDescriptor {
    pub site_index: f64,
    pub site_class: SiteClass,
    pub soil: Soil,
}

impl SiteDescriptor {
    pub fn mesic(site_index: f64) -> Self {
        SiteDescriptor { site_index, site_class: SiteClass::Mesic, soil: Soil::Mineral }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.site_index > 5.0 && self.site_index < 40.0) {
            return Err(Error::schema(format!(
                "site_index must lie in (5, 40) m, got {}",
                self.site_index
            )));
        }
        Ok(())
    }
}

/// Stems per hectare by diameter class for one species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterClassDistribution {
    pub species: Species,
    pub stems: Vec<f64>,
}

impl DiameterClassDistribution {
    pub fn new(species: Species, stems: Vec<f64>) -> Result<Self> {
        let dist = DiameterClassDistribution { species, stems };
        dist.validate()?;
        Ok(dist)
    }

    pub fn empty(species: Species) -> Self {
        DiameterClassDistribution { species, stems: vec![0.0; NUM_CLASSES] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stems.len() != NUM_CLASSES {
            return Err(Error::schema(format!(
                "{}: expected {} diameter classes, got {}",
                self.species,
                NUM_CLASSES,
                self.stems.len()
            )));
        }
        for (c, &n) in self.stems.iter().enumerate() {
            if !n.is_finite() || n < 0.0 {
                return Err(Error::schema(format!(
                    "{} class {}: stems must be finite and >= 0, got {}",
                    self.species, c, n
                )));
            }
        }
        Ok(())
    }

    pub fn total_stems(&self) -> f64 {
        self.stems.iter().sum()
    }

    pub fn basal_area(&self) -> f64 {
        self.stems
            .iter()
            .enumerate()
            .map(|(c, &n)| n * stem_basal_area_m2(c))
            .sum()
    }
}

/// Full stand state at one point in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandState {
    /// Years since stand establishment.
    pub age: f64,
    pub distributions: Vec<DiameterClassDistribution>,
    pub site: SiteDescriptor,
    /// Years of active fertilization effect left, in [0, 10].
    pub fert_remaining: f64,
}

impl StandState {
    pub fn validate(&self) -> Result<()> {
        if !self.age.is_finite() || self.age < 0.0 {
            return Err(Error::schema(format!("age must be >= 0, got {}", self.age)));
        }
        if !(0.0..=FERTILIZATION_DURATION_YEARS).contains(&self.fert_remaining) {
            return Err(Error::schema(format!(
                "fert_remaining must lie in [0, {}], got {}",
                FERTILIZATION_DURATION_YEARS, self.fert_remaining
            )));
        }
        self.site.validate()?;
        let mut seen = Vec::new();
        for dist in &self.distributions {
            dist.validate()?;
            if seen.contains(&dist.species) {
                return Err(Error::schema(format!("duplicate species block: {}", dist.species)));
            }
            seen.push(dist.species);
        }
        Ok(())
    }

    /// Total basal area over all species and classes, m²/ha.
    pub fn basal_area(&self) -> f64 {
        self.distributions.iter().map(|d| d.basal_area()).sum()
    }

    pub fn total_stems(&self) -> f64 {
        self.distributions.iter().map(|d| d.total_stems()).sum()
    }

    /// Basal-area share of one species, 0 when the stand is empty.
    pub fn basal_area_share(&self, species: Species) -> f64 {
        let total = self.basal_area();
        if total <= 0.0 {
            return 0.0;
        }
        self.distributions
            .iter()
            .filter(|d| d.species == species)
            .map(|d| d.basal_area())
            .sum::<f64>()
            / total
    }
}

/// Diameter increment per step, cm:
/// `max(0, intercept + diameter*d + diameter_sq*d² + basal_area*BA + site_index*SI)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementCoefficients {
    pub intercept: f64,
    pub diameter: f64,
    pub diameter_sq: f64,
    pub basal_area: f64,
    pub site_index: f64,
}

/// Per-step survival probability, logistic in the same regressors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCoefficients {
    pub intercept: f64,
    pub diameter: f64,
    pub diameter_sq: f64,
    pub basal_area: f64,
    pub site_index: f64,
}

/// Ingrowth into the smallest class, stems/ha per step:
/// `max(0, intercept + basal_area*BA + site_index*SI)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IngrowthCoefficients {
    pub intercept: f64,
    pub basal_area: f64,
    pub site_index: f64,
}

/// Stem volume power law `v(d) = coefficient * d^exponent`, m³ per stem
/// with d in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeFn {
    pub coefficient: f64,
    pub exponent: f64,
}

impl VolumeFn {
    pub fn volume(&self, diameter_cm: f64) -> f64 {
        self.coefficient * diameter_cm.powf(self.exponent)
    }
}

/// Sawlog share of stem volume: 0 below `start_cm`, linear ramp up to
/// `max_share` at `full_cm`, constant above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SawlogRamp {
    pub start_cm: f64,
    pub full_cm: f64,
    pub max_share: f64,
}

impl SawlogRamp {
    pub fn share(&self, diameter_cm: f64) -> f64 {
        if diameter_cm <= self.start_cm {
            0.0
        } else if diameter_cm >= self.full_cm {
            self.max_share
        } else {
            self.max_share * (diameter_cm - self.start_cm) / (self.full_cm - self.start_cm)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesGrowth {
    pub increment: IncrementCoefficients,
    pub survival: SurvivalCoefficients,
    pub ingrowth: IngrowthCoefficients,
    pub volume: VolumeFn,
    pub sawlog: SawlogRamp,
}

impl SpeciesGrowth {
    /// Diameter increment over one step, cm, truncated at 0.
    pub fn increment_cm(&self, diameter_cm: f64, basal_area: f64, site_index: f64) -> f64 {
        let c = &self.increment;
        (c.intercept
            + c.diameter * diameter_cm
            + c.diameter_sq * diameter_cm * diameter_cm
            + c.basal_area * basal_area
            + c.site_index * site_index)
            .max(0.0)
    }

    /// Per-step survival probability, in (0, 1).
    pub fn survival(&self, diameter_cm: f64, basal_area: f64, site_index: f64) -> f64 {
        let c = &self.survival;
        let logit = c.intercept
            + c.diameter * diameter_cm
            + c.diameter_sq * diameter_cm * diameter_cm
            + c.basal_area * basal_area
            + c.site_index * site_index;
        1.0 / (1.0 + (-logit).exp())
    }

    /// Ingrowth into the smallest class over one step, stems/ha.
    pub fn ingrowth(&self, basal_area: f64, site_index: f64) -> f64 {
        let c = &self.ingrowth;
        (c.intercept + c.basal_area * basal_area + c.site_index * site_index).max(0.0)
    }

    fn validate(&self, species: Species) -> Result<()> {
        let coeffs = [
            self.increment.intercept,
            self.increment.diameter,
            self.increment.diameter_sq,
            self.increment.basal_area,
            self.increment.site_index,
            self.survival.intercept,
            self.survival.diameter,
            self.survival.diameter_sq,
            self.survival.basal_area,
            self.survival.site_index,
            self.ingrowth.intercept,
            self.ingrowth.basal_area,
            self.ingrowth.site_index,
            self.volume.coefficient,
            self.volume.exponent,
            self.sawlog.start_cm,
            self.sawlog.full_cm,
            self.sawlog.max_share,
        ];
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::schema(format!("{species}: non-finite growth coefficient")));
        }
        // Monotone response to site fertility is a hard requirement on
        // any accepted parameter set.
        if self.increment.site_index < 0.0 {
            return Err(Error::schema(format!(
                "{species}: increment site_index coefficient must be >= 0"
            )));
        }
        if self.survival.site_index < 0.0 || self.ingrowth.site_index < 0.0 {
            return Err(Error::schema(format!(
                "{species}: survival/ingrowth site_index coefficients must be >= 0"
            )));
        }
        if self.volume.coefficient <= 0.0 || !(0.0..5.0).contains(&self.volume.exponent) {
            return Err(Error::schema(format!("{species}: implausible volume power law")));
        }
        if !(0.0..=1.0).contains(&self.sawlog.max_share) || self.sawlog.full_cm <= self.sawlog.start_cm
        {
            return Err(Error::schema(format!("{species}: invalid sawlog ramp")));
        }
        Ok(())
    }
}

/// Versioned growth parameter file contents.
///
/// The coefficient set is configuration, not code: defaults ship with
/// the crate, calibrated to plausibility for semi-fertile boreal stands
/// (see the `note` field of the shipped file), and any replacement set
/// must pass [`GrowthParams::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub schema_version: u32,
    #[serde(default)]
    pub note: String,
    /// Fixed at 30; the whole artifact assumes the 2.5-year grid.
    pub step_months: u32,
    /// Site-index rise while a fertilization is active, m. Default 5.
    pub fertilization_boost_m: f64,
    pub species: BTreeMap<Species, SpeciesGrowth>,
}

pub const GROWTH_PARAMS_SCHEMA_VERSION: u32 = 1;

impl GrowthParams {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != GROWTH_PARAMS_SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "growth params schema_version {} unsupported (expected {})",
                self.schema_version, GROWTH_PARAMS_SCHEMA_VERSION
            )));
        }
        if self.step_months != 30 {
            return Err(Error::schema(format!(
                "step_months must be 30, got {}",
                self.step_months
            )));
        }
        if !self.fertilization_boost_m.is_finite() || self.fertilization_boost_m < 0.0 {
            return Err(Error::schema("fertilization_boost_m must be finite and >= 0".to_string()));
        }
        if self.species.is_empty() {
            return Err(Error::schema("growth params define no species".to_string()));
        }
        for (species, block) in &self.species {
            block.validate(*species)?;
        }
        Ok(())
    }

    pub fn species_block(&self, species: Species) -> Result<&SpeciesGrowth> {
        self.species.get(&species).ok_or_else(|| {
            Error::schema(format!("growth params have no coefficient block for {species}"))
        })
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let params: GrowthParams =
            serde_json::from_str(json).map_err(|e| Error::schema(format!("growth params: {e}")))?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("growth params serialize")
    }
}

/// Site index as seen by the growth functions: raised by the configured
/// boost (default five meters) while a fertilization is active.
pub fn effective_site_index(state: &StandState, params: &GrowthParams) -> f64 {
    if state.fert_remaining > 0.0 {
        state.site.site_index + params.fertilization_boost_m
    } else {
        state.site.site_index
    }
}

/// Advance the stand by one 30-month step.
///
/// Per species and class: survivors = stems * s; a fraction
/// u = clamp(increment / class width, 0, 1) of survivors moves up one
/// class (the top class retains everything); ingrowth enters the
/// smallest class. Age advances 2.5 years and the fertilization clock
/// runs down by the same amount, floored at zero. Survival and
/// increment are evaluated at the effective site index of the state
/// *before* the step.
pub fn advance_step(state: &StandState, params: &GrowthParams) -> Result<StandState> {
    state.validate()?;
    params.validate()?;
    advance_step_unchecked(state, params)
}

/// `advance_step` without re-validating the inputs. The step preserves
/// state validity, so a caller that validated once may loop on this.
pub(crate) fn advance_step_unchecked(state: &StandState, params: &GrowthParams) -> Result<StandState> {
    let basal_area = state.basal_area();
    let site_index = effective_site_index(state, params);

    let mut distributions = Vec::with_capacity(state.distributions.len());
    for dist in &state.distributions {
        let block = params.species_block(dist.species)?;
        let mut stems = vec![0.0; NUM_CLASSES];
        for (c, &n) in dist.stems.iter().enumerate() {
            if n <= 0.0 {
                continue;
            }
            let d = class_midpoint_cm(c);
            let survivors = n * block.survival(d, basal_area, site_index);
            if c + 1 < NUM_CLASSES {
                let upgrowth =
                    (block.increment_cm(d, basal_area, site_index) / CLASS_WIDTH_CM).clamp(0.0, 1.0);
                // Complementary split: the stems that do not move up are
                // the survivors minus the ones that do.
                let moved = survivors * upgrowth;
                stems[c] += survivors - moved;
                stems[c + 1] += moved;
            } else {
                stems[c] += survivors;
            }
        }
        stems[0] += block.ingrowth(basal_area, site_index);
        distributions.push(DiameterClassDistribution { species: dist.species, stems });
    }

    Ok(StandState {
        age: state.age + STEP_YEARS,
        distributions,
        site: state.site,
        fert_remaining: (state.fert_remaining - STEP_YEARS).max(0.0),
    })
}

/// Start a fertilization: set the effect clock to ten years.
/// Overlapping applications are rejected.
pub fn apply_fertilization(state: &StandState) -> Result<StandState> {
    if state.fert_remaining > 0.0 {
        return Err(Error::precondition(format!(
            "fertilization already active for another {} years",
            state.fert_remaining
        )));
    }
    let mut next = state.clone();
    next.fert_remaining = FERTILIZATION_DURATION_YEARS;
    Ok(next)
}

/// Commercial volume of one species split into sawlog and pulpwood, m³/ha.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AssortmentVolumes {
    pub sawlog: f64,
    pub pulp: f64,
}

impl AssortmentVolumes {
    pub fn total(&self) -> f64 {
        self.sawlog + self.pulp
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StandMetrics {
    pub basal_area: f64,
    pub stems: f64,
    pub volumes: BTreeMap<Species, AssortmentVolumes>,
}

impl StandMetrics {
    pub fn total_volume(&self) -> f64 {
        self.volumes.values().map(|v| v.total()).sum()
    }
}

/// Basal area, stem count, and per-species assortment volumes.
pub fn stand_metrics(state: &StandState, params: &GrowthParams) -> Result<StandMetrics> {
    let mut metrics = StandMetrics { basal_area: 0.0, stems: 0.0, volumes: BTreeMap::new() };
    for dist in &state.distributions {
        let block = params.species_block(dist.species)?;
        let entry = metrics.volumes.entry(dist.species).or_default();
        for (c, &n) in dist.stems.iter().enumerate() {
            let d = class_midpoint_cm(c);
            metrics.basal_area += n * stem_basal_area_m2(c);
            metrics.stems += n;
            let volume = n * block.volume.volume(d);
            let sawlog = volume * block.sawlog.share(d);
            entry.sawlog += sawlog;
            entry.pulp += volume - sawlog;
        }
    }
    Ok(metrics)
}

impl Default for GrowthParams {
    /// The shipped default coefficient set. Calibrated to plausibility
    /// for semi-fertile (mesic, mineral-soil) boreal stands: spruce
    /// diameter increment around 2..4 mm/a at moderate density, strong
    /// basal-area self-limitation, roughly 1..2 %/a background
    /// mortality, and a fertilization response that raises increment,
    /// survival, and ingrowth through the site-index terms.
    fn default() -> Self {
        let spruce = SpeciesGrowth {
            increment: IncrementCoefficients {
                intercept: -0.438,
                diameter: 0.040,
                diameter_sq: -0.00070,
                basal_area: -0.030,
                site_index: 0.060,
            },
            survival: SurvivalCoefficients {
                intercept: 1.80,
                diameter: 0.070,
                diameter_sq: -0.00056,
                basal_area: 0.0,
                site_index: 0.016,
            },
            ingrowth: IngrowthCoefficients { intercept: 8.0, basal_area: -0.15, site_index: 0.10 },
            volume: VolumeFn { coefficient: 1.6e-4, exponent: 2.35 },
            sawlog: SawlogRamp { start_cm: 17.0, full_cm: 28.0, max_share: 0.85 },
        };
        let pine = SpeciesGrowth {
            increment: IncrementCoefficients {
                intercept: -0.232,
                diameter: 0.034,
                diameter_sq: -0.00066,
                basal_area: -0.030,
                site_index: 0.050,
            },
            survival: SurvivalCoefficients {
                intercept: 2.00,
                diameter: 0.065,
                diameter_sq: -0.00052,
                basal_area: 0.0,
                site_index: 0.012,
            },
            ingrowth: IngrowthCoefficients { intercept: 5.0, basal_area: -0.10, site_index: 0.05 },
            volume: VolumeFn { coefficient: 1.7e-4, exponent: 2.30 },
            sawlog: SawlogRamp { start_cm: 17.0, full_cm: 28.0, max_share: 0.80 },
        };
        // Birch responds weakly to nitrogen; small site-index terms.
        let birch = SpeciesGrowth {
            increment: IncrementCoefficients {
                intercept: 0.308,
                diameter: 0.030,
                diameter_sq: -0.00072,
                basal_area: -0.028,
                site_index: 0.020,
            },
            survival: SurvivalCoefficients {
                intercept: 1.60,
                diameter: 0.068,
                diameter_sq: -0.00055,
                basal_area: 0.0,
                site_index: 0.008,
            },
            ingrowth: IngrowthCoefficients { intercept: 6.0, basal_area: -0.12, site_index: 0.04 },
            volume: VolumeFn { coefficient: 1.4e-4, exponent: 2.30 },
            sawlog: SawlogRamp { start_cm: 17.0, full_cm: 28.0, max_share: 0.45 },
        };
        let other = SpeciesGrowth {
            increment: IncrementCoefficients {
                intercept: 0.188,
                diameter: 0.030,
                diameter_sq: -0.00070,
                basal_area: -0.028,
                site_index: 0.020,
            },
            survival: SurvivalCoefficients {
                intercept: 1.40,
                diameter: 0.065,
                diameter_sq: -0.00054,
                basal_area: 0.0,
                site_index: 0.008,
            },
            ingrowth: IngrowthCoefficients { intercept: 4.0, basal_area: -0.10, site_index: 0.03 },
            volume: VolumeFn { coefficient: 1.3e-4, exponent: 2.25 },
            sawlog: SawlogRamp { start_cm: 17.0, full_cm: 28.0, max_share: 0.20 },
        };

        let mut species = BTreeMap::new();
        species.insert(Species::Spruce, spruce);
        species.insert(Species::Pine, pine);
        species.insert(Species::Birch, birch);
        species.insert(Species::Other, other);

        GrowthParams {
            schema_version: GROWTH_PARAMS_SCHEMA_VERSION,
            note: "Default coefficient set for mesic mineral-soil stands. Calibrated to \
                   plausibility only (increment, mortality, and fertilization response in \
                   realistic ranges); not fitted to inventory data. Coefficients are per \
                   30-month step; no rescaling from any other step length is implied."
                .to_string(),
            step_months: 30,
            fertilization_boost_m: 5.0,
            species,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_species_state(stems: Vec<f64>) -> StandState {
        StandState {
            age: 32.5,
            distributions: vec![DiameterClassDistribution { species: Species::Spruce, stems }],
            site: SiteDescriptor::mesic(26.0),
            fert_remaining: 0.0,
        }
    }

    /// Parameter set with hand-pickable survival/upgrowth and no ingrowth.
    fn synthetic_params(survival_logit: f64, increment_cm: f64) -> GrowthParams {
        let mut params = GrowthParams::default();
        for block in params.species.values_mut() {
            block.increment = IncrementCoefficients {
                intercept: increment_cm,
                diameter: 0.0,
                diameter_sq: 0.0,
                basal_area: 0.0,
                site_index: 0.0,
            };
            block.survival = SurvivalCoefficients {
                intercept: survival_logit,
                diameter: 0.0,
                diameter_sq: 0.0,
                basal_area: 0.0,
                site_index: 0.0,
            };
            block.ingrowth = IngrowthCoefficients { intercept: 0.0, basal_area: 0.0, site_index: 0.0 };
        }
        params
    }

    #[test]
    fn effective_site_index_examples() {
        let params = GrowthParams::default();
        let mut state = one_species_state(vec![0.0; NUM_CLASSES]);
        state.fert_remaining = 10.0;
        assert_eq!(effective_site_index(&state, &params), 31.0);
        state.fert_remaining = 0.0;
        assert_eq!(effective_site_index(&state, &params), 26.0);
        state.fert_remaining = 2.5;
        assert_eq!(effective_site_index(&state, &params), 31.0);
    }

    #[test]
    fn empty_stand_with_zero_ingrowth_stays_empty() {
        let params = synthetic_params(3.0, 1.0);
        let state = one_species_state(vec![0.0; NUM_CLASSES]);
        let next = advance_step(&state, &params).unwrap();
        assert_eq!(next.age, 35.0);
        assert!(next.distributions[0].stems.iter().all(|&n| n == 0.0));
    }

    #[test]
    fn transition_rule_hand_evaluation() {
        // s = 0.95 (logit ln 19), u = 0.3 (1.5 cm / 5 cm), no ingrowth:
        // 1000 stems -> 665 stay, 285 move up.
        let params = synthetic_params((19.0f64).ln(), 1.5);
        let mut stems = vec![0.0; NUM_CLASSES];
        stems[3] = 1000.0;
        let state = one_species_state(stems);
        let next = advance_step(&state, &params).unwrap();
        let out = &next.distributions[0].stems;
        assert!((out[3] - 665.0).abs() < 1e-9, "stayers: {}", out[3]);
        assert!((out[4] - 285.0).abs() < 1e-9, "movers: {}", out[4]);
    }

    #[test]
    fn identity_transition_preserves_distribution() {
        // survival ~ 1 (huge logit), u = 0, ingrowth = 0.
        let params = synthetic_params(60.0, 0.0);
        let mut stems = vec![0.0; NUM_CLASSES];
        stems[2] = 800.0;
        stems[7] = 120.0;
        let state = one_species_state(stems.clone());
        let next = advance_step(&state, &params).unwrap();
        assert_eq!(next.distributions[0].stems, stems);
        assert_eq!(next.age, state.age + 2.5);
    }

    #[test]
    fn fertilization_clock() {
        let params = GrowthParams::default();
        let state = one_species_state(vec![100.0; NUM_CLASSES]);
        let fertilized = apply_fertilization(&state).unwrap();
        assert_eq!(fertilized.fert_remaining, 10.0);
        assert!(apply_fertilization(&fertilized).is_err());

        let mut s = fertilized;
        for _ in 0..4 {
            s = advance_step(&s, &params).unwrap();
        }
        assert_eq!(s.fert_remaining, 0.0);
        // A new application is legal once the clock has run out.
        assert!(apply_fertilization(&s).is_ok());
    }

    #[test]
    fn metrics_basal_area_example() {
        // 1000 stems/ha at the 20 cm midpoint: 1000 * pi * 0.1^2.
        let params = GrowthParams::default();
        let mut stems = vec![0.0; NUM_CLASSES];
        stems[3] = 1000.0;
        let state = one_species_state(stems);
        let m = stand_metrics(&state, &params).unwrap();
        assert!((m.basal_area - 1000.0 * PI * 0.01).abs() < 1e-9);
        assert!((m.basal_area - 31.4159265).abs() < 1e-6);
    }

    #[test]
    fn metrics_empty_and_additive() {
        let params = GrowthParams::default();
        let empty = one_species_state(vec![0.0; NUM_CLASSES]);
        let m = stand_metrics(&empty, &params).unwrap();
        assert_eq!(m.basal_area, 0.0);
        assert_eq!(m.stems, 0.0);
        assert_eq!(m.total_volume(), 0.0);

        let mut a = vec![0.0; NUM_CLASSES];
        a[2] = 500.0;
        let mut b = vec![0.0; NUM_CLASSES];
        b[5] = 300.0;
        let mut ab = vec![0.0; NUM_CLASSES];
        ab[2] = 500.0;
        ab[5] = 300.0;
        let ma = stand_metrics(&one_species_state(a), &params).unwrap();
        let mb = stand_metrics(&one_species_state(b), &params).unwrap();
        let mab = stand_metrics(&one_species_state(ab), &params).unwrap();
        assert!((mab.basal_area - (ma.basal_area + mb.basal_area)).abs() < 1e-12);
        assert!((mab.total_volume() - (ma.total_volume() + mb.total_volume())).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonfinite_coefficients() {
        let mut params = GrowthParams::default();
        params.species.get_mut(&Species::Spruce).unwrap().increment.basal_area = f64::NAN;
        assert!(params.validate().is_err());
    }

    #[test]
    fn rejects_decreasing_site_index_response() {
        let mut params = GrowthParams::default();
        params.species.get_mut(&Species::Spruce).unwrap().increment.site_index = -0.01;
        assert!(params.validate().is_err());
    }

    #[test]
    fn params_json_round_trip() {
        let params = GrowthParams::default();
        let json = params.to_json_string();
        let back = GrowthParams::from_json_str(&json).unwrap();
        assert_eq!(params, back);
    }
}

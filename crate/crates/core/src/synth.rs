//! Stand files and the synthetic stand generator.
//!
//! The generator replaces unpublished field inventories: it draws
//! never-thinned, spruce-dominated mesic stands whose aggregates fall
//! inside observed ranges (age 30..45 a, stems 1655..2451/ha, basal
//! area 29..49 m²/ha) and stamps the provenance into each file.
//! Generation is deterministic per seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{
    class_midpoint_cm, stem_basal_area_m2, DiameterClassDistribution, SiteDescriptor, Species,
    StandState, NUM_CLASSES,
};

pub const STAND_FILE_SCHEMA_VERSION: u32 = 1;

/// Seed of the five stands bundled with the crate.
pub const BUNDLED_SEED: u64 = 42;
pub const BUNDLED_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandFile {
    pub schema_version: u32,
    pub id: String,
    /// Observed stand age, years.
    pub age: f64,
    pub site: SiteDescriptor,
    pub distributions: Vec<DiameterClassDistribution>,
    pub provenance: String,
}

impl StandFile {
    pub fn to_state(&self) -> Result<StandState> {
        if self.schema_version != STAND_FILE_SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "stand file schema_version {} unsupported (expected {})",
                self.schema_version, STAND_FILE_SCHEMA_VERSION
            )));
        }
        let state = StandState {
            age: self.age,
            distributions: self.distributions.clone(),
            site: self.site,
            fert_remaining: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: StandFile =
            serde_json::from_str(json).map_err(|e| Error::schema(format!("stand file: {e}")))?;
        file.to_state()?;
        Ok(file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("stand file serialize")
    }
}

/// Stems spread over the lower diameter classes as a discretized normal
/// around the target quadratic mean diameter.
fn bell_distribution(total_stems: f64, mean_cm: f64, sigma_cm: f64) -> Vec<f64> {
    let mut weights = vec![0.0; NUM_CLASSES];
    let mut sum = 0.0;
    for (c, w) in weights.iter_mut().enumerate() {
        let d = class_midpoint_cm(c);
        // Young never-thinned stands carry nothing above 30 cm.
        if d > 30.0 {
            break;
        }
        let z = (d - mean_cm) / sigma_cm;
        *w = (-0.5 * z * z).exp();
        sum += *w;
    }
    weights.iter().map(|w| total_stems * w / sum).collect()
}

fn basal_area_of(stems: &[f64]) -> f64 {
    stems.iter().enumerate().map(|(c, &n)| n * stem_basal_area_m2(c)).sum()
}

/// Generate `count` synthetic stands, deterministically for the seed.
pub fn gen_stands(seed: u64, count: usize) -> Result<Vec<StandFile>> {
    if count < 1 {
        return Err(Error::precondition("stand count must be >= 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stands = Vec::with_capacity(count);
    for index in 0..count {
        let age = 30.0 + 2.5 * rng.gen_range(0..=6) as f64;
        let stems_total = rng.gen_range(1700.0..2400.0);
        let ba_target = rng.gen_range(30.0..48.0);
        let site_index = rng.gen_range(24.0..28.0);
        let spruce_share = rng.gen_range(0.82..0.94);
        let birch_share = (1.0 - spruce_share) * rng.gen_range(0.5..1.0);
        let pine_share = 1.0 - spruce_share - birch_share;
        let sigma = rng.gen_range(2.8..3.8);

        // Quadratic mean diameter that would hit the basal-area target
        // exactly if all stems sat at one diameter; the spread shifts
        // the realized basal area, so iterate the mean a few times.
        let mut mean = 200.0 * (ba_target / (stems_total * std::f64::consts::PI)).sqrt();
        let shares = [
            (Species::Spruce, spruce_share, 1.0),
            (Species::Birch, birch_share, 0.9),
            (Species::Pine, pine_share, 0.95),
        ];
        let mut distributions = Vec::new();
        for _ in 0..40 {
            distributions = shares
                .iter()
                .filter(|(_, share, _)| *share > 0.01)
                .map(|&(species, share, mean_factor)| DiameterClassDistribution {
                    species,
                    stems: bell_distribution(stems_total * share, mean * mean_factor, sigma),
                })
                .collect();
            let ba: f64 = distributions.iter().map(|d| basal_area_of(&d.stems)).sum();
            if (ba - ba_target).abs() < 1e-6 {
                break;
            }
            mean *= (ba_target / ba).sqrt();
        }

        let file = StandFile {
            schema_version: STAND_FILE_SCHEMA_VERSION,
            id: format!("synthetic-{seed}-{:02}", index + 1),
            age,
            site: SiteDescriptor::mesic(site_index),
            distributions,
            provenance: format!(
                "synthetic stand drawn from aggregate ranges (seed {seed}, index {index}); \
                 not field data"
            ),
        };
        debug_assert!(file.to_state().is_ok());
        stands.push(file);
    }
    Ok(stands)
}

/// The five synthetic stands bundled with the crate.
pub fn bundled_stands() -> Vec<StandFile> {
    gen_stands(BUNDLED_SEED, BUNDLED_COUNT).expect("bundled stand generation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_stands_hit_published_ranges() {
        for file in gen_stands(1, 5).unwrap() {
            let state = file.to_state().unwrap();
            assert!((30.0..=45.0).contains(&state.age), "age {}", state.age);
            let stems = state.total_stems();
            assert!((1655.0..=2451.0).contains(&stems), "stems {stems}");
            let ba = state.basal_area();
            assert!((29.0..=49.0).contains(&ba), "basal area {ba}");
            assert!(state.basal_area_share(Species::Spruce) > 0.5);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        assert_eq!(gen_stands(7, 3).unwrap(), gen_stands(7, 3).unwrap());
        assert_ne!(gen_stands(7, 3).unwrap(), gen_stands(8, 3).unwrap());
    }

    #[test]
    fn stand_file_round_trip() {
        let file = &gen_stands(3, 1).unwrap()[0];
        let back = StandFile::from_json_str(&file.to_json_string()).unwrap();
        assert_eq!(*file, back);
    }

    #[test]
    fn bundled_stands_are_five_valid_stands() {
        let stands = bundled_stands();
        assert_eq!(stands.len(), 5);
        for file in &stands {
            file.to_state().unwrap();
        }
    }
}

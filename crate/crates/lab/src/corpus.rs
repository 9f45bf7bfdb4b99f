//! Test fields: four fixed entries and two gaussians drawn from the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radwave_core::functionals::morawetz_integrand;
use radwave_core::spectral::{lp_project, smooth_low_pass, Band};
use radwave_core::{Profile, RadialField, RadialGrid};

use crate::error::LabResult;

pub const CORPUS_SIZE: usize = 6;

/// Dyadic levels scanned by the projection bound.
pub const LEVELS: std::ops::RangeInclusive<i32> = -3..=8;

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub profile: Profile,
    pub amplitude: f64,
}

impl CorpusEntry {
    fn new(name: impl Into<String>, profile: Profile, amplitude: f64) -> Self {
        CorpusEntry {
            name: name.into(),
            profile,
            amplitude,
        }
    }

    pub fn sample(&self, grid: &RadialGrid) -> LabResult<RadialField> {
        Ok(self.profile.sample(grid)?.scaled(self.amplitude))
    }
}

/// The six-field corpus. Entries 4 and 5 depend on `seed` alone.
pub fn corpus(seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = |k: usize| {
        let a = rng.random_range(0.5..8.0);
        let magnitude = rng.random_range(0.5..2.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let profile = Profile::gaussian(a).expect("rate is positive");
        CorpusEntry::new(format!("random_gaussian_{k}"), profile, sign * magnitude)
    };
    let drawn = [random(0), random(1)];
    let mut entries = vec![
        CorpusEntry::new("gaussian_1", Profile::Gaussian { a: 1.0 }, 1.0),
        CorpusEntry::new("gaussian_4", Profile::Gaussian { a: 4.0 }, 2.0),
        CorpusEntry::new("bump_1_2", Profile::Bump { a: 1.0, b: 2.0 }, 1.0),
        CorpusEntry::new("polydecay_1_4", Profile::PolyDecay { a: 1.0, m: 4.0 }, 1.0),
    ];
    entries.extend(drawn);
    entries
}

/// Ratios `∫|P f|^{p+1}/|x| ÷ ∫|f|^{p+1}/|x|` at one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionRatios {
    pub j: i32,
    pub sharp_low: f64,
    pub sharp_high: f64,
    pub smooth_low: f64,
}

impl ProjectionRatios {
    pub fn max(&self) -> f64 {
        self.sharp_low.max(self.sharp_high).max(self.smooth_low)
    }
}

/// Projection ratios of `f` over [`LEVELS`]; empty for a field with no
/// Morawetz density.
pub fn projection_ratios(f: &RadialField, p: f64) -> Vec<ProjectionRatios> {
    let base = morawetz_integrand(f, p);
    if !(base > 0.0) {
        return Vec::new();
    }
    let ratio = |g: RadialField| morawetz_integrand(&g, p) / base;
    LEVELS
        .map(|j| ProjectionRatios {
            j,
            sharp_low: ratio(lp_project(f, j, Band::Leq)),
            sharp_high: ratio(lp_project(f, j, Band::Geq)),
            smooth_low: ratio(smooth_low_pass(f, j)),
        })
        .collect()
}

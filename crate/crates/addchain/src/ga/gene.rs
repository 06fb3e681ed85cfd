//! Probabilistic growth of chain suffixes: the rule roulette, overshoot
//! repair, and population seeding.

use std::fmt;

use rand::Rng;

use crate::chain::{AdditionChain, Exponent};
use crate::ga::{Chromosome, GaConfig, Rule};

/// A suffix-growing pass appended far more genes than any plausible chain
/// needs without reaching the target. Only degenerate rule probabilities
/// (for example `p_random = 1` on a large exponent) can get here.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NonTermination {
    pub exponent: u64,
    pub appended: usize,
}

impl fmt::Display for NonTermination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gene generation appended {} genes without reaching {}",
            self.appended, self.exponent
        )
    }
}

impl std::error::Error for NonTermination {}

/// Genes appended per growth pass before giving up: four per target bit.
fn gene_budget(exponent: Exponent) -> usize {
    4 * (exponent.bit_len_minus_one() + 1)
}

/// The largest chain element that still fits: adding it to the last element
/// stays at or below the target. Requires an incomplete chain (last value
/// strictly below the target).
pub fn repair_overshoot(values: &[u64], exponent: Exponent) -> u64 {
    values[repair_partner(values, exponent)]
}

/// Index of [`repair_overshoot`]'s element. Always exists: headroom is at
/// least 1 and the chain starts at 1.
pub(crate) fn repair_partner(values: &[u64], exponent: Exponent) -> usize {
    let last = *values.last().expect("chain is never empty");
    debug_assert!(last < exponent.get(), "repair needs an incomplete chain");
    let headroom = exponent.get() - last;
    values.partition_point(|&v| v <= headroom) - 1
}

/// Appends one gene: draws double / add-last-two / random-partner from the
/// rule roulette, repairs overshoot by swapping in the largest partner that
/// fits, and records the tag (forced to `Gen` when `force_gen` is set, as
/// during crossover regeneration).
pub(crate) fn generation_step(
    chromosome: &mut Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
    force_gen: bool,
) {
    let len = chromosome.len();
    debug_assert!(len >= 2, "gene generation grows prefixes of at least (1, 2)");
    let last = chromosome.last();
    let roll: f64 = rng.random();
    let (partner, rule) = if roll < config.p_double {
        (len - 1, Rule::Double)
    } else if roll < config.p_double + config.p_add {
        (len - 2, Rule::AddLastTwo)
    } else {
        let partner = rng.random_range(0..len);
        (partner, Rule::Random { partner })
    };

    let fits = last
        .checked_add(chromosome.values()[partner])
        .is_some_and(|sum| sum <= exponent.get());
    let (partner, rule) = if fits {
        (partner, rule)
    } else {
        let repaired = repair_partner(chromosome.values(), exponent);
        (repaired, Rule::Random { partner: repaired })
    };
    let rule = if force_gen { Rule::Gen } else { rule };
    chromosome.push_partner(partner, rule);
}

/// Grows `chromosome` gene by gene until its last value hits the target.
pub(crate) fn grow(
    chromosome: &mut Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
    force_gen: bool,
) -> Result<(), NonTermination> {
    let budget = gene_budget(exponent);
    let mut appended = 0;
    while chromosome.last() < exponent.get() {
        if appended == budget {
            return Err(NonTermination { exponent: exponent.get(), appended });
        }
        generation_step(chromosome, exponent, config, rng, force_gen);
        appended += 1;
    }
    Ok(())
}

/// Completes a partial chromosome into a full chain for the target by
/// repeatedly applying the rule roulette with overshoot repair.
pub fn gene_generation(
    chromosome: &mut Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<(), NonTermination> {
    grow(chromosome, exponent, config, rng, false)
}

/// One randomized chromosome: fixed prefix 1, 2, then a third element of 3
/// or 4 (coin flip, repaired for targets below 4), then roulette growth.
fn seed_chromosome(
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<Chromosome, NonTermination> {
    let mut chromosome = Chromosome::from_parts(AdditionChain::unit(), vec![Rule::Fixed]);
    if exponent.get() == 1 {
        return Ok(chromosome);
    }
    chromosome.push_partner(0, Rule::Fixed);
    if exponent.get() == 2 {
        return Ok(chromosome);
    }

    let pick = rng.random_range(1..=2u64);
    let partner = if 2 + pick > exponent.get() {
        repair_partner(chromosome.values(), exponent)
    } else {
        pick as usize - 1
    };
    chromosome.push_partner(partner, Rule::Fixed);
    gene_generation(&mut chromosome, exponent, config, rng)?;
    Ok(chromosome)
}

/// Seeds `config.population_size` independent chromosomes for the target.
pub fn initial_population(
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Chromosome>, NonTermination> {
    (0..config.population_size).map(|_| seed_chromosome(exponent, config, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::test_support::assert_chromosome;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(n: u64) -> Exponent {
        Exponent::new(n).unwrap()
    }

    #[test]
    fn repair_picks_the_largest_partner_that_fits() {
        // Headroom 21 - 16 = 5, and the largest element not above 5 is 4.
        assert_eq!(repair_overshoot(&[1, 2, 4, 8, 16], e(21)), 4);
        // Headroom 1 always falls back to the leading 1.
        assert_eq!(repair_overshoot(&[1, 2, 4, 8, 16], e(17)), 1);
        // Plenty of headroom lets the last element through (a double).
        assert_eq!(repair_overshoot(&[1, 2, 4], e(100)), 4);
    }

    #[test]
    fn grown_chromosomes_are_valid_complete_chains() {
        let cfg = GaConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3, 4, 5, 7, 23, 55, 97, 1_000_003, u32::MAX as u64] {
            for _ in 0..20 {
                let c = seed_chromosome(e(n), &cfg, &mut rng).unwrap();
                assert_chromosome(&c, e(n));
            }
        }
    }

    #[test]
    fn pure_doubling_probabilities_still_complete_on_odd_targets() {
        // With p_double = 1 every draw doubles; odd targets force repairs,
        // which must land exactly on the target.
        let cfg = GaConfig { p_double: 1.0, p_add: 0.0, p_random: 0.0, ..GaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [31, 37, 1_000_003] {
            for _ in 0..10 {
                let c = seed_chromosome(e(n), &cfg, &mut rng).unwrap();
                assert_chromosome(&c, e(n));
            }
        }
    }

    #[test]
    fn initial_population_has_configured_size_and_is_seed_deterministic() {
        let cfg = GaConfig { population_size: 37, ..GaConfig::default() };
        let a = initial_population(e(12_345), &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = initial_population(e(12_345), &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a.len(), 37);
        assert_eq!(a, b);
        for c in &a {
            assert_chromosome(c, e(12_345));
        }
        // Both third elements appear across a population this size.
        assert!(a.iter().any(|c| c.values()[2] == 3));
        assert!(a.iter().any(|c| c.values()[2] == 4));
    }

    #[test]
    fn degenerate_targets_seed_fixed_chromosomes() {
        let cfg = GaConfig { population_size: 4, ..GaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for c in initial_population(e(1), &cfg, &mut rng).unwrap() {
            assert_eq!(c.values(), &[1]);
            assert_eq!(c.rules(), &[Rule::Fixed]);
        }
        for c in initial_population(e(2), &cfg, &mut rng).unwrap() {
            assert_eq!(c.values(), &[1, 2]);
            assert_eq!(c.rules(), &[Rule::Fixed, Rule::Fixed]);
        }
        // Target 3: a drawn third element of 4 must be repaired down to 3.
        for c in initial_population(e(3), &cfg, &mut rng).unwrap() {
            assert_eq!(c.values(), &[1, 2, 3]);
        }
    }

    #[test]
    fn pathological_probabilities_trip_the_growth_guard() {
        // Random-partner-only growth crawls on a 63-bit target; the budget
        // of four genes per bit aborts instead of looping for hours.
        let cfg = GaConfig { p_double: 0.0, p_add: 0.0, p_random: 1.0, ..GaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let result = seed_chromosome(e((1 << 62) + 1), &cfg, &mut rng);
        assert!(matches!(result, Err(NonTermination { .. })));
    }
}

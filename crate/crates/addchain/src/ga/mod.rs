//! Genetic search for short addition chains.
//!
//! A chromosome is an addition chain for the target exponent plus one rule
//! tag per position recording how the position was produced. The search
//! seeds a population with randomized chains, then repeatedly breeds it:
//! fitness-weighted roulette selection, one of three crossovers (each
//! replays rule tags of one parent onto values of the other), and an
//! N-mutant mutation that regrows a random suffix. Chains only ever shrink
//! or hold; every intermediate chromosome is a valid chain by construction.

pub mod config;
mod crossover;
mod gene;
mod mutation;
mod selection;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::chain::{lower_bound, AdditionChain, ChainLength, Exponent};

pub use config::{ConfigFileError, ConfigInvalid, GaConfig};
pub use crossover::{crossover, crossover_single_point, crossover_two_point, crossover_uniform};
pub use gene::{gene_generation, initial_population, repair_overshoot, NonTermination};
pub use mutation::mutate;
pub use selection::roulette_select;

/// How a chromosome position was produced. Tags drive crossover replay;
/// the actual summands of every position live in the chain's steps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    /// Positions fixed by construction: 1, 2, and the third element.
    Fixed,
    /// Double the previous element.
    Double,
    /// Add the two previous elements.
    AddLastTwo,
    /// Add the element at `partner` (0-based) to the previous one.
    Random { partner: usize },
    /// Regenerated by a fresh gene-generation step during crossover.
    Gen,
    /// Rule taken from the other parent by uniform crossover.
    Exchanged,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Fixed => write!(f, "FIXED"),
            Rule::Double => write!(f, "D"),
            Rule::AddLastTwo => write!(f, "A"),
            Rule::Random { partner } => write!(f, "R({partner})"),
            Rule::Gen => write!(f, "G"),
            Rule::Exchanged => write!(f, "E"),
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An addition chain for the target exponent together with the rule tag of
/// every position. Always a valid chain: each element past the first is a
/// recorded sum of two earlier ones, and only complete chromosomes (chain
/// ending exactly at the exponent) leave the breeding operators.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Chromosome {
    chain: AdditionChain,
    rules: Vec<Rule>,
}

impl Chromosome {
    /// The underlying addition chain.
    pub fn chain(&self) -> &AdditionChain {
        &self.chain
    }

    /// Chain values, strictly increasing from 1.
    pub fn values(&self) -> &[u64] {
        self.chain.values()
    }

    /// One rule tag per position.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    /// True only for the degenerate chromosome of exponent 1 before any
    /// breeding; kept for completeness.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Last (largest) chain value.
    pub fn last(&self) -> u64 {
        self.chain.last()
    }

    /// Fitness = chain length in additions; smaller is fitter.
    pub fn fitness(&self) -> usize {
        self.chain.length().additions()
    }

    /// First `keep` positions as a new chromosome (values, steps and tags).
    pub(crate) fn prefix(&self, keep: usize) -> Chromosome {
        let mut chain = self.chain.clone();
        chain.truncate(keep);
        Chromosome { chain, rules: self.rules[..keep].to_vec() }
    }

    /// Appends `last + values[partner]`, recording the step and `rule`.
    /// The caller guarantees the sum stays within the target.
    pub(crate) fn push_partner(&mut self, partner: usize, rule: Rule) {
        let last = self.chain.len() - 1;
        self.chain.push_sum(partner, last).expect("partner sum exceeds last element");
        self.rules.push(rule);
    }

    pub(crate) fn from_parts(chain: AdditionChain, rules: Vec<Rule>) -> Chromosome {
        debug_assert_eq!(chain.len(), rules.len());
        Chromosome { chain, rules }
    }
}

/// Everything a finished search reports.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct GaResult {
    /// Shortest chromosome ever observed (may predate the final population).
    pub best: Chromosome,
    /// Length of `best`, in additions.
    pub length: ChainLength,
    /// Breeding generations actually run (0 if the initial population
    /// already reached the lower bound and early stop is on).
    pub generations_run: usize,
    /// Chromosomes scored: the initial population plus every bred child.
    pub evaluations: u64,
    /// Best length known after seeding and after each generation;
    /// non-increasing, `generations_run + 1` entries.
    pub best_length_per_generation: Vec<usize>,
    /// Seed the run was started with.
    pub seed: u64,
}

/// Why a search could not run to completion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GaError {
    Config(ConfigInvalid),
    NonTermination(NonTermination),
}

impl fmt::Display for GaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaError::Config(e) => e.fmt(f),
            GaError::NonTermination(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for GaError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            GaError::Config(e) => Some(e),
            GaError::NonTermination(e) => Some(e),
        }
    }
}

impl From<ConfigInvalid> for GaError {
    fn from(e: ConfigInvalid) -> Self {
        GaError::Config(e)
    }
}

impl From<NonTermination> for GaError {
    fn from(e: NonTermination) -> Self {
        GaError::NonTermination(e)
    }
}

/// Runs the full generational search for `exponent` and returns the best
/// chain found. Deterministic for a given `(exponent, config)` pair: all
/// randomness comes from one ChaCha8 stream seeded with `config.seed`.
pub fn evolve(exponent: Exponent, config: &GaConfig) -> Result<GaResult, GaError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = lower_bound(exponent).additions();

    let mut population = initial_population(exponent, config, &mut rng)?;
    let mut evaluations = population.len() as u64;
    let mut best = population
        .iter()
        .min_by_key(|c| c.fitness())
        .expect("population is never empty")
        .clone();
    let mut best_length_per_generation = vec![best.fitness()];
    let mut generations_run = 0;

    let done = |best: &Chromosome| config.early_stop_at_lower_bound && best.fitness() == bound;
    if !done(&best) {
        for generation in 1..=config.max_generations {
            population.shuffle(&mut rng);
            let mut offspring = Vec::with_capacity(config.population_size);
            while offspring.len() < config.population_size {
                let first = roulette_select(&population, &mut rng).clone();
                let second = roulette_select(&population, &mut rng).clone();
                let (child1, child2) = crossover(&first, &second, exponent, config, &mut rng)?;
                offspring.push(mutate(&child1, exponent, config, &mut rng)?);
                if offspring.len() < config.population_size {
                    offspring.push(mutate(&child2, exponent, config, &mut rng)?);
                }
            }
            evaluations += offspring.len() as u64;
            population = offspring;
            for chromosome in &population {
                if chromosome.fitness() < best.fitness() {
                    best = chromosome.clone();
                }
            }
            best_length_per_generation.push(best.fitness());
            generations_run = generation;
            if done(&best) {
                break;
            }
        }
    }

    let length = best.chain.length();
    Ok(GaResult { best, length, generations_run, evaluations, best_length_per_generation, seed: config.seed })
}

/// Hooks for the crate's own test and acceptance suites: operator entry
/// points and chromosome scaffolding. Hidden from docs; not a stable API.
#[doc(hidden)]
pub mod test_support {
    use super::*;

    pub use super::crossover::crossover;
    pub use super::mutation::mutate;
    pub use super::selection::roulette_select;

    /// Builds a chromosome by appending explicit (partner, rule) genes to
    /// the fixed prefix 1, 2, `third`.
    pub fn build(third: u64, genes: &[(usize, Rule)]) -> Chromosome {
        let mut c = Chromosome::from_parts(AdditionChain::unit(), vec![Rule::Fixed]);
        c.push_partner(0, Rule::Fixed);
        c.push_partner(if third == 3 { 0 } else { 1 }, Rule::Fixed);
        for &(partner, rule) in genes {
            c.push_partner(partner, rule);
        }
        c
    }

    /// Checks the structural invariants every chromosome must satisfy for
    /// target `e`: valid complete chain, one tag per position, fixed first
    /// positions, and each tag consistent with the recorded summands.
    pub fn assert_chromosome(c: &Chromosome, e: Exponent) {
        let report = crate::chain::validate_chain(c.values(), e);
        assert!(report.valid, "invalid chain for {}: {report}", e.get());
        assert_eq!(c.rules().len(), c.len(), "one rule tag per position");
        assert_eq!(c.values()[0], 1);
        assert_eq!(c.rules()[0], Rule::Fixed);
        if c.len() >= 2 {
            assert_eq!(c.values()[1], 2);
            assert_eq!(c.rules()[1], Rule::Fixed);
        }
        if c.len() >= 3 {
            assert!(
                c.values()[2] == 3 || c.values()[2] == 4,
                "third element must be 3 or 4, got {}",
                c.values()[2]
            );
            assert_eq!(c.rules()[2], Rule::Fixed);
        }
        for (index, rule) in c.rules().iter().enumerate().skip(3) {
            let (j, k) = c.chain().steps()[index - 1];
            match *rule {
                Rule::Fixed => panic!("FIXED tag past position 3 at index {index}"),
                Rule::Double => assert_eq!((j, k), (index - 1, index - 1)),
                Rule::AddLastTwo => assert_eq!((j, k), (index - 2, index - 1)),
                Rule::Random { partner } => {
                    assert!(partner < index);
                    assert_eq!((j, k), (partner.min(index - 1), index - 1));
                }
                // Regenerated or exchanged genes still add something to the
                // previous element.
                Rule::Gen | Rule::Exchanged => assert_eq!(k, index - 1),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use test_support::assert_chromosome;

    fn e(n: u64) -> Exponent {
        Exponent::new(n).unwrap()
    }

    #[test]
    fn finds_known_optimal_lengths_on_small_exponents() {
        // Small targets where the shortest length is known; the defaults
        // find them quickly and early-stop proves most of them.
        for (n, expected) in [(1, 0), (2, 1), (3, 2), (7, 4), (15, 5), (31, 7), (97, 8)] {
            let result = evolve(e(n), &GaConfig::default()).unwrap();
            assert_eq!(result.length.additions(), expected, "exponent {n}");
            assert_chromosome(&result.best, e(n));
        }
    }

    #[test]
    fn runs_are_deterministic_for_a_fixed_seed() {
        let cfg = GaConfig { population_size: 40, max_generations: 25, seed: 123, ..GaConfig::default() };
        let a = evolve(e(45_678), &cfg).unwrap();
        let b = evolve(e(45_678), &cfg).unwrap();
        assert_eq!(a, b);
        // A different seed is still a valid run on the same exponent.
        let c = evolve(e(45_678), &cfg.with_seed(124)).unwrap();
        assert_ne!(a.seed, c.seed);
        test_support::assert_chromosome(&c.best, e(45_678));
    }

    #[test]
    fn history_is_non_increasing_and_sized_by_generations() {
        let cfg = GaConfig {
            population_size: 30,
            max_generations: 12,
            early_stop_at_lower_bound: false,
            seed: 7,
            ..GaConfig::default()
        };
        let result = evolve(e(1_000_003), &cfg).unwrap();
        assert_eq!(result.generations_run, 12);
        assert_eq!(result.best_length_per_generation.len(), 13);
        assert!(result.best_length_per_generation.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*result.best_length_per_generation.last().unwrap(), result.length.additions());
        assert_eq!(result.evaluations, 30 + 12 * 30);
        assert_chromosome(&result.best, e(1_000_003));
    }

    #[test]
    fn early_stop_halts_at_the_lower_bound() {
        // 97 = 1100001b has lower bound 6 + 2 = 8, which is also its true
        // optimum, so the search should stop well before the generation cap.
        let fast = evolve(e(97), &GaConfig::default()).unwrap();
        assert_eq!(fast.length.additions(), 8);
        assert!(fast.generations_run < GaConfig::default().max_generations);

        // With the flag off the loop always runs to the cap.
        let cfg = GaConfig {
            population_size: 30,
            max_generations: 20,
            early_stop_at_lower_bound: false,
            ..GaConfig::default()
        };
        let slow = evolve(e(97), &cfg).unwrap();
        assert_eq!(slow.generations_run, 20);
        assert_eq!(slow.best_length_per_generation.len(), 21);
    }

    #[test]
    fn degenerate_exponents_work_with_and_without_early_stop() {
        for n in [1, 2] {
            let quick = evolve(e(n), &GaConfig::default()).unwrap();
            assert_eq!(quick.length.additions(), (n - 1) as usize);
            assert_eq!(quick.generations_run, 0);

            let cfg = GaConfig {
                population_size: 8,
                max_generations: 3,
                early_stop_at_lower_bound: false,
                ..GaConfig::default()
            };
            let full = evolve(e(n), &cfg).unwrap();
            assert_eq!(full.length.additions(), (n - 1) as usize);
            assert_eq!(full.generations_run, 3);
        }
    }

    #[test]
    fn rejects_invalid_config() {
        // p_double 0.9 makes the rule probabilities sum past 1.
        let cfg = GaConfig { p_double: 0.9, ..GaConfig::default() };
        assert!(matches!(evolve(e(97), &cfg), Err(GaError::Config(_))));
    }

    #[test]
    fn result_serializes_with_readable_rule_tags() {
        let cfg = GaConfig { population_size: 10, max_generations: 5, ..GaConfig::default() };
        let result = evolve(e(43), &cfg).unwrap();
        let json = serde_json::to_string(&result).unwrap();
        assert!(json.contains("\"FIXED\""));
        assert!(json.contains("\"values\""));
    }
}

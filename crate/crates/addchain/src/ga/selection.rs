//! Fitness-weighted parent selection.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::ga::Chromosome;

/// Roulette-wheel selection. A chromosome of fitness `f` (chain length, so
/// lower is better) gets weight `worst - f + 1`: the worst member keeps a
/// weight of 1 and every addition saved adds one ticket.
pub fn roulette_select<'a>(population: &'a [Chromosome], rng: &mut impl Rng) -> &'a Chromosome {
    assert!(!population.is_empty(), "selection needs a non-empty population");
    let worst = population.iter().map(Chromosome::fitness).max().expect("non-empty population");
    let weights = population.iter().map(|c| (worst - c.fitness() + 1) as u64);
    let wheel = WeightedIndex::new(weights).expect("every weight is at least 1");
    &population[wheel.sample(rng)]
}

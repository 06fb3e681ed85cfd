//! N-mutant suffix mutation.

use rand::Rng;

use crate::chain::Exponent;
use crate::ga::gene::{gene_generation, repair_partner, NonTermination};
use crate::ga::{Chromosome, GaConfig, Rule};

/// Mutates a bred child with probability `mutation_rate`: picks a mutation
/// point `i` anywhere from position 3 to the end, keeps the prefix through
/// `i`, forces one gene that adds a random element from before `i` (repaired
/// on overshoot), regrows the rest `n_mutants` times independently, and
/// returns the shortest mutant — by default even when that is longer than
/// the original (`elitist_mutation` keeps the better of the two instead).
pub fn mutate(
    child: &Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<Chromosome, NonTermination> {
    // Chains for 1 and 2 have nothing past the fixed prefix to mutate.
    if exponent.get() <= 2 {
        return Ok(child.clone());
    }
    if rng.random::<f64>() >= config.mutation_rate {
        return Ok(child.clone());
    }

    let i = rng.random_range(3..=child.len());
    let prefix = child.prefix(i);
    if prefix.last() == exponent.get() {
        // The cut landed on the full chain; every regrowth would reproduce
        // the child, so skip the mutant draws entirely.
        return Ok(child.clone());
    }

    let mut best: Option<Chromosome> = None;
    for _ in 0..config.n_mutants {
        let mut mutant = prefix.clone();
        let pick = rng.random_range(0..i - 1);
        let fits = mutant
            .last()
            .checked_add(mutant.values()[pick])
            .is_some_and(|sum| sum <= exponent.get());
        let partner = if fits { pick } else { repair_partner(mutant.values(), exponent) };
        mutant.push_partner(partner, Rule::Random { partner });
        gene_generation(&mut mutant, exponent, config, rng)?;
        if best.as_ref().is_none_or(|current| mutant.fitness() < current.fitness()) {
            best = Some(mutant);
        }
    }
    let best = best.expect("n_mutants is validated to be at least 1");

    if config.elitist_mutation && child.fitness() < best.fitness() {
        return Ok(child.clone());
    }
    Ok(best)
}

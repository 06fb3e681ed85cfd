//! Three rule-replay crossovers plus the rate/variant dispatch.
//!
//! Children never mix raw values from both parents (that would rarely be a
//! valid chain). Instead a child keeps a values prefix from one parent and
//! replays the other parent's rule tags on top of it: doubles and
//! add-last-two transfer as-is, random-partner rules redraw a partner, and
//! anything infeasible (overshoot, exhausted donor, non-replayable tag) is
//! regenerated by a gene-generation step tagged `G`.

use rand::Rng;

use crate::chain::{AdditionChain, Exponent};
use crate::ga::gene::{generation_step, grow, NonTermination};
use crate::ga::{Chromosome, GaConfig, Rule};

/// Which crossover the variant roulette picked.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Variant {
    SinglePoint,
    TwoPoint,
    Uniform,
}

/// One roulette draw over `p_single` / `p_two` / `p_uniform`.
pub(crate) fn choose_variant(config: &GaConfig, rng: &mut impl Rng) -> Variant {
    let roll: f64 = rng.random();
    if roll < config.p_single {
        Variant::SinglePoint
    } else if roll < config.p_single + config.p_two {
        Variant::TwoPoint
    } else {
        Variant::Uniform
    }
}

/// Breeds one parent pair: with probability `crossover_rate` dispatches a
/// variant, otherwise returns plain copies.
pub fn crossover(
    first: &Chromosome,
    second: &Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<(Chromosome, Chromosome), NonTermination> {
    if rng.random::<f64>() >= config.crossover_rate {
        return Ok((first.clone(), second.clone()));
    }
    match choose_variant(config, rng) {
        Variant::SinglePoint => crossover_single_point(first, second, exponent, config, rng),
        Variant::TwoPoint => crossover_two_point(first, second, exponent, config, rng),
        Variant::Uniform => crossover_uniform(first, second, exponent, config, rng),
    }
}

/// True when adding `values[partner]` to the last element stays within the
/// target.
fn fits(child: &Chromosome, partner: usize, exponent: Exponent) -> bool {
    child.last().checked_add(child.values()[partner]).is_some_and(|sum| sum <= exponent.get())
}

/// Replays one donor tag onto `child`: doubles and add-last-two transfer
/// directly, a random-partner tag redraws its partner, and infeasible or
/// non-replayable tags fall back to a fresh gene-generation step tagged `G`.
/// `exchanged` marks cleanly replayed genes as `E` (uniform crossover).
fn replay_rule(
    child: &mut Chromosome,
    rule: Rule,
    exchanged: bool,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) {
    let len = child.len();
    let tentative = match rule {
        Rule::Double => Some((len - 1, Rule::Double)),
        Rule::AddLastTwo => Some((len - 2, Rule::AddLastTwo)),
        Rule::Random { .. } => {
            let partner = rng.random_range(0..len);
            Some((partner, Rule::Random { partner }))
        }
        Rule::Fixed | Rule::Gen | Rule::Exchanged => None,
    };
    match tentative {
        Some((partner, tag)) if fits(child, partner, exponent) => {
            child.push_partner(partner, if exchanged { Rule::Exchanged } else { tag });
        }
        _ => generation_step(child, exponent, config, rng, true),
    }
}

/// Replays `feed` (donor tag, exchanged flag) onto `prefix` until the target
/// is reached, then finishes with gene generation if the feed ran dry.
fn build_child(
    prefix: Chromosome,
    feed: impl IntoIterator<Item = (Rule, bool)>,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<Chromosome, NonTermination> {
    let mut child = prefix;
    for (rule, exchanged) in feed {
        if child.last() >= exponent.get() {
            break;
        }
        replay_rule(&mut child, rule, exchanged, exponent, config, rng);
    }
    grow(&mut child, exponent, config, rng, true)?;
    Ok(child)
}

/// Cut at one position `p` in `[4, shorter_parent_len - 1]`: each child keeps
/// its own values through `p` and replays the other parent's tags from
/// position `p + 1`. Parents too short to cut are copied unchanged.
pub fn crossover_single_point(
    first: &Chromosome,
    second: &Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<(Chromosome, Chromosome), NonTermination> {
    let shorter = first.len().min(second.len());
    if shorter < 5 {
        return Ok((first.clone(), second.clone()));
    }
    let p = rng.random_range(4..=shorter - 1);
    let tail = |donor: &Chromosome| donor.rules()[p..].to_vec();
    let child1 = build_child(
        first.prefix(p),
        tail(second).into_iter().map(|r| (r, false)),
        exponent,
        config,
        rng,
    )?;
    let child2 = build_child(
        second.prefix(p),
        tail(first).into_iter().map(|r| (r, false)),
        exponent,
        config,
        rng,
    )?;
    Ok((child1, child2))
}

/// Cut at two positions `p < q` in `[4, shorter_parent_len - 1]`: each child
/// keeps its own values before `p`, replays the other parent's tags over
/// `[p, q)`, then resumes its own tags from `q`. Parents too short for two
/// distinct cuts are copied unchanged.
pub fn crossover_two_point(
    first: &Chromosome,
    second: &Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<(Chromosome, Chromosome), NonTermination> {
    let shorter = first.len().min(second.len());
    if shorter < 6 {
        return Ok((first.clone(), second.clone()));
    }
    let (p, q) = loop {
        let a = rng.random_range(4..=shorter - 1);
        let b = rng.random_range(4..=shorter - 1);
        if a != b {
            break (a.min(b), a.max(b));
        }
    };
    let splice = |own: &Chromosome, donor: &Chromosome| {
        let mut rules: Vec<(Rule, bool)> =
            donor.rules()[p - 1..q - 1].iter().map(|&r| (r, false)).collect();
        rules.extend(own.rules()[q - 1..].iter().map(|&r| (r, false)));
        rules
    };
    let child1 = build_child(first.prefix(p - 1), splice(first, second), exponent, config, rng)?;
    let child2 = build_child(second.prefix(p - 1), splice(second, first), exponent, config, rng)?;
    Ok((child1, child2))
}

/// Draws one boolean mask over the shorter parent's positions. A set bit at
/// position 3 swaps the third element (3 vs 4); a set bit at a later
/// position replays the other parent's rule there (tagged `E`), a clear bit
/// replays the chromosome's own rule. Positions past the mask regrow by gene
/// generation.
pub fn crossover_uniform(
    first: &Chromosome,
    second: &Chromosome,
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<(Chromosome, Chromosome), NonTermination> {
    let shorter = first.len().min(second.len());
    if shorter < 3 {
        return Ok((first.clone(), second.clone()));
    }
    let mask: Vec<bool> = (0..shorter).map(|_| rng.random()).collect();
    let child1 = uniform_child(first, second, &mask, exponent, config, rng)?;
    let child2 = uniform_child(second, first, &mask, exponent, config, rng)?;
    Ok((child1, child2))
}

fn uniform_child(
    own: &Chromosome,
    other: &Chromosome,
    mask: &[bool],
    exponent: Exponent,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<Chromosome, NonTermination> {
    let third = if mask[2] { other.values()[2] } else { own.values()[2] };
    let mut prefix = Chromosome::from_parts(AdditionChain::unit(), vec![Rule::Fixed]);
    prefix.push_partner(0, Rule::Fixed);
    prefix.push_partner(if third == 3 { 0 } else { 1 }, Rule::Fixed);

    let feed: Vec<(Rule, bool)> = (3..mask.len())
        .map(|i| if mask[i] { (other.rules()[i], true) } else { (own.rules()[i], false) })
        .collect();
    build_child(prefix, feed, exponent, config, rng)
}

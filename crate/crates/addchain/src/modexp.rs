//! Executing addition chains as modular exponentiation programs.
//!
//! A chain for `e` turns into a straight-line program whose instructions are
//! modular multiplications: slot 0 holds `base mod N`, and every later slot
//! is the product of two earlier ones, so slot `i` holds `base^(x_{i+1})`.
//! The multiplication count therefore equals the chain length — the whole
//! point of searching for short chains.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::chain::{to_program, AdditionChain};

/// Base and modulus for chain execution. The modulus must be at least 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModContext {
    base: BigUint,
    modulus: BigUint,
}

impl ModContext {
    pub fn new(base: BigUint, modulus: BigUint) -> Result<Self, ModulusTooSmall> {
        if modulus < BigUint::from(2u32) {
            return Err(ModulusTooSmall(modulus));
        }
        Ok(ModContext { base, modulus })
    }

    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
}

/// Error for a modulus of 0 or 1 (no meaningful residues).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModulusTooSmall(pub BigUint);

impl fmt::Display for ModulusTooSmall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "modulus {} is too small, must be at least 2", self.0)
    }
}

impl std::error::Error for ModulusTooSmall {}

/// Result of running a chain: the final power and how many modular
/// multiplications it took (always the chain's addition count).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Execution {
    pub result: BigUint,
    pub multiplications: usize,
}

/// Computes `base^(chain target) mod N` by executing the chain's program.
pub fn execute(chain: &AdditionChain, ctx: &ModContext) -> Execution {
    let program = to_program(chain);
    let first = ctx.base.clone() % &ctx.modulus;
    let powers = program.eval_with(first, |a, b| (a * b) % &ctx.modulus);
    Execution {
        result: powers.last().expect("program has at least slot 0").clone(),
        multiplications: program.operations(),
    }
}

/// Independent reference: left-to-right square-and-multiply straight off the
/// exponent bits. `exponent` 0 yields `1 mod N`.
pub fn reference_modexp(base: &BigUint, exponent: u64, modulus: &BigUint) -> BigUint {
    let mut acc = BigUint::one() % modulus;
    for bit in (0..64 - exponent.leading_zeros().min(63)).rev() {
        acc = (&acc * &acc) % modulus;
        if (exponent >> bit) & 1 == 1 {
            acc = (acc * base) % modulus;
        }
    }
    acc
}

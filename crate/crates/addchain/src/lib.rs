//! Short addition chains for fast modular exponentiation.
//!
//! Raising `p` to the power `e` needs one multiplication per addition in an
//! addition chain for `e`, so shorter chains mean faster exponentiation. This
//! crate bundles:
//!
//! - [`chain`]: chain representation, validation, and straight-line programs
//! - [`ga`]: a genetic search for short chains (probabilistic gene generation
//!   with overshoot repair, rule-based crossover, N-mutant mutation)
//! - [`baselines`]: the classic binary and m-ary methods
//! - [`oracle`]: exact minimal lengths via iterative-deepening search
//! - [`modexp`]: executing chains as modular exponentiation programs
//! - [`bench`]: reproducible comparisons of all methods, with JSON/CSV reports
//!
//! All randomized components draw from a seeded ChaCha stream, so results are
//! reproducible across runs and platforms.

pub mod baselines;
pub mod bench;
pub mod chain;
pub mod ga;
pub mod modexp;
pub mod oracle;

pub use baselines::{binary_chain, binary_length, mary_chain, Radix};
pub use chain::{
    decompose_step, lower_bound, parse_chain_text, to_program, validate_chain, AdditionChain,
    ChainLength, Exponent, StraightLineProgram, ValidationReport, Violation, ViolationKind,
};
pub use ga::{evolve, Chromosome, GaConfig, GaError, GaResult, Rule};
pub use modexp::{reference_modexp, Execution, ModContext, ModulusTooSmall};
pub use oracle::{optimal_chain, optimal_length, optimal_table, OptimalTable};

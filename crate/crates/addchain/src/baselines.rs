//! Classic exponentiation baselines: the binary (square-and-multiply) method
//! and the m-ary sliding-radix method with digit-occurrence pruning.
//!
//! Both construct explicit addition chains so they can be validated, executed
//! and benchmarked through the same pipeline as the searched chains.

use std::fmt;

use crate::chain::{AdditionChain, ChainLength, Exponent};

/// A power-of-two radix `m >= 2` for the m-ary method.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Radix(u64);

impl Radix {
    /// Accepts powers of two >= 2 (the digit windows must align with bits).
    pub fn new(m: u64) -> Result<Self, RadixInvalid> {
        if m >= 2 && m.is_power_of_two() {
            Ok(Radix(m))
        } else {
            Err(RadixInvalid(m))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Bits per digit: log2 of the radix.
    fn window(self) -> u32 {
        self.0.trailing_zeros()
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Error for a radix that is not a power of two >= 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RadixInvalid(pub u64);

impl fmt::Display for RadixInvalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "radix {} is not a power of two >= 2", self.0)
    }
}

impl std::error::Error for RadixInvalid {}

/// Left-to-right binary method: scan bits below the leading one, doubling for
/// every bit and adding 1 for every set bit. Length is always
/// `floor(log2 e) + popcount(e) - 1`.
pub fn binary_chain(e: Exponent) -> AdditionChain {
    let value = e.get();
    let mut chain = AdditionChain::unit();
    for bit in (0..e.bit_len_minus_one()).rev() {
        let last = chain.len() - 1;
        chain.push_sum(last, last).expect("doubling grows the chain");
        if (value >> bit) & 1 == 1 {
            let last = chain.len() - 1;
            chain.push_sum(0, last).expect("+1 grows the chain");
        }
    }
    debug_assert_eq!(chain.last(), value);
    chain
}

/// Closed form for the binary method's length without building the chain.
pub fn binary_length(e: Exponent) -> ChainLength {
    ChainLength(e.bit_len_minus_one() + e.popcount() - 1)
}

/// Left-to-right m-ary method. Digits of `e` in base `m` are processed most
/// significant first: log2(m) doublings per digit, plus one addition per
/// non-zero digit. Precomputation covers 2..=d_max by successive +1 steps,
/// where d_max is the largest digit that actually occurs — digits beyond it
/// are never precomputed (digit-occurrence pruning). Values that already
/// appear in the chain (small doublings overlapping the precomputed run) are
/// reused rather than re-added.
pub fn mary_chain(e: Exponent, m: Radix) -> AdditionChain {
    let mut digits = Vec::new();
    let mut rest = e.get();
    while rest > 0 {
        digits.push(rest % m.get());
        rest /= m.get();
    }
    digits.reverse();
    let d_max = *digits.iter().max().expect("e >= 1 has at least one digit");

    let mut chain = AdditionChain::unit();
    for _ in 2..=d_max {
        let last = chain.len() - 1;
        chain.push_sum(0, last).expect("+1 grows the precomputed run");
    }

    let mut acc = digits[0];
    let mut acc_idx = chain.position_of(acc).expect("leading digit is precomputed");
    for &d in &digits[1..] {
        for _ in 0..m.window() {
            acc *= 2;
            acc_idx = match chain.position_of(acc) {
                Some(i) => i,
                None => {
                    chain.push_sum(acc_idx, acc_idx).expect("doubling exceeds the chain");
                    chain.len() - 1
                }
            };
        }
        if d > 0 {
            let d_idx = chain.position_of(d).expect("occurring digit is precomputed");
            acc += d;
            chain.push_sum(d_idx, acc_idx).expect("digit addition exceeds the chain");
            acc_idx = chain.len() - 1;
        }
    }
    debug_assert_eq!(chain.last(), e.get());
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::validate_chain;

    fn exp(v: u64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn radix(m: u64) -> Radix {
        Radix::new(m).unwrap()
    }

    #[test]
    fn binary_chain_for_97() {
        let chain = binary_chain(exp(97));
        assert_eq!(chain.values(), &[1, 2, 3, 6, 12, 24, 48, 96, 97]);
        assert_eq!(chain.length(), ChainLength(8));
    }

    #[test]
    fn binary_chain_degenerate_targets() {
        assert_eq!(binary_chain(exp(1)).values(), &[1]);
        assert_eq!(binary_chain(exp(2)).values(), &[1, 2]);
        assert_eq!(binary_chain(exp(1 << 20)).length(), ChainLength(20));
    }

    #[test]
    fn binary_length_matches_built_chains_exhaustively() {
        for v in 1..=4096u64 {
            let e = exp(v);
            let chain = binary_chain(e);
            assert_eq!(chain.length(), binary_length(e), "e = {v}");
            assert!(validate_chain(chain.values(), e).valid, "e = {v}");
        }
    }

    #[test]
    fn binary_length_closed_form_on_random_large_exponents() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1_000 {
            let v = rng.random_range(1..=1u64 << 20);
            let e = exp(v);
            assert_eq!(binary_chain(e).length(), binary_length(e), "e = {v}");
        }
    }

    #[test]
    fn radix_accepts_only_binary_powers() {
        assert!(Radix::new(0).is_err());
        assert!(Radix::new(1).is_err());
        assert!(Radix::new(3).is_err());
        assert!(Radix::new(6).is_err());
        for m in [2u64, 4, 8, 16, 256] {
            assert_eq!(Radix::new(m).unwrap().get(), m);
        }
    }

    #[test]
    fn quaternary_chain_for_97_prunes_unused_digit() {
        // Base-4 digits of 97 are 1,2,0,1: digit 3 never occurs, so only 2 is
        // precomputed and the first doubling reuses it.
        let chain = mary_chain(exp(97), radix(4));
        assert_eq!(chain.values(), &[1, 2, 4, 6, 12, 24, 48, 96, 97]);
        assert_eq!(chain.length(), ChainLength(8));
    }

    #[test]
    fn quaternary_chain_for_15() {
        // Digits 3,3: precompute (1,2,3), then double twice and add 3.
        let chain = mary_chain(exp(15), radix(4));
        assert_eq!(chain.values(), &[1, 2, 3, 6, 12, 15]);
        assert_eq!(chain.length(), ChainLength(5));
    }

    #[test]
    fn mary_with_radix_two_collapses_to_binary() {
        for v in 1..=10_000u64 {
            let e = exp(v);
            assert_eq!(
                mary_chain(e, radix(2)).values(),
                binary_chain(e).values(),
                "e = {v}"
            );
        }
    }

    #[test]
    fn mary_chains_validate_across_radixes() {
        for m in [2u64, 4, 8, 16] {
            for v in (1..=2_000u64).chain([12345, 99991, 1 << 30]) {
                let e = exp(v);
                let chain = mary_chain(e, radix(m));
                let report = validate_chain(chain.values(), e);
                assert!(report.valid, "e = {v}, m = {m}: {report}");
            }
        }
    }
}

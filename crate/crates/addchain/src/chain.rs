//! Addition chains and their validation.
//!
//! An addition chain for a target `e` is a strictly increasing sequence
//! `1 = x_1 < x_2 < ... < x_r = e` in which every element after the first is
//! the sum of two (not necessarily distinct) earlier elements. Its length is
//! the number of additions, `r - 1`; a chain of length L evaluates `p^e`
//! with exactly L multiplications (see [`crate::modexp`]).

use std::fmt;

use serde::{Deserialize, Serialize};

/// A positive integer exponent. The whole toolkit searches for chains whose
/// final element equals this value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(u64);

impl Exponent {
    /// Wraps `value`, rejecting zero (no addition chain reaches 0).
    pub fn new(value: u64) -> Result<Self, InvalidExponent> {
        if value == 0 {
            Err(InvalidExponent)
        } else {
            Ok(Exponent(value))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Index of the highest set bit: floor(log2 e).
    pub fn bit_len_minus_one(self) -> usize {
        (63 - self.0.leading_zeros()) as usize
    }

    /// Number of set bits in the binary expansion.
    pub fn popcount(self) -> usize {
        self.0.count_ones() as usize
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u64> for Exponent {
    type Error = InvalidExponent;

    fn try_from(value: u64) -> Result<Self, Self::Error> {
        Exponent::new(value)
    }
}

/// Error for a zero exponent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InvalidExponent;

impl fmt::Display for InvalidExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exponent must be at least 1")
    }
}

impl std::error::Error for InvalidExponent {}

/// Length of a chain measured in additions (element count minus one).
/// Equals the multiplication count when the chain is executed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainLength(pub usize);

impl ChainLength {
    pub fn additions(self) -> usize {
        self.0
    }
}

impl fmt::Display for ChainLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Floor of log2, i.e. the doubling count any chain for `e` must contain.
fn lambda(e: Exponent) -> usize {
    e.bit_len_minus_one()
}

/// Proven lower bound on chain length: floor(log2 e) + ceil(log2 popcount(e)).
///
/// `lower_bound(1) = 0`, and `lower_bound(2^k) = k` is tight.
pub fn lower_bound(e: Exponent) -> ChainLength {
    let nu = e.popcount();
    // ceil(log2 v) == bit_length(v - 1) for v >= 1
    let log_nu = (64 - (nu as u64 - 1).leading_zeros()) as usize * usize::from(nu > 1);
    ChainLength(lambda(e) + log_nu)
}

/// Ways a candidate chain can violate the addition-chain contract for a
/// target exponent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    /// First element is not 1 (or the chain is empty).
    NotOneAtStart,
    /// An element is not strictly greater than its predecessor.
    NotIncreasing,
    /// An element is not the sum of two earlier elements.
    NoSummandPair,
    /// An element exceeds the target exponent.
    Overshoot,
    /// The final element differs from the target exponent.
    WrongTerminal,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ViolationKind::NotOneAtStart => "NOT_ONE_AT_START",
            ViolationKind::NotIncreasing => "NOT_INCREASING",
            ViolationKind::NoSummandPair => "NO_SUMMAND_PAIR",
            ViolationKind::Overshoot => "OVERSHOOT",
            ViolationKind::WrongTerminal => "WRONG_TERMINAL",
        };
        f.write_str(name)
    }
}

/// A single violation, pinpointing the first failing 1-based position for
/// its kind.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based position in the sequence.
    pub position: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at position {} ({})", self.kind, self.position, self.detail)
    }
}

/// Outcome of [`validate_chain`]: valid, or a list of violations with at most
/// one entry (the first failing position) per kind.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub exponent: u64,
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "valid chain for {}", self.exponent);
        }
        write!(f, "invalid chain for {}: ", self.exponent)?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks raw values against the addition-chain contract for target `e`.
///
/// Never fails: malformed input (wrong start, non-monotone values, missing
/// summand pairs, overshoot, wrong terminal) is described in the report.
pub fn validate_chain(values: &[u64], e: Exponent) -> ValidationReport {
    let mut violations = Vec::new();
    let target = e.get();

    if values.first() != Some(&1) {
        let detail = match values.first() {
            None => "chain is empty".to_string(),
            Some(v) => format!("starts with {v}, must start with 1"),
        };
        violations.push(Violation { kind: ViolationKind::NotOneAtStart, position: 1, detail });
    }
    if let Some(i) = (1..values.len()).find(|&i| values[i] <= values[i - 1]) {
        violations.push(Violation {
            kind: ViolationKind::NotIncreasing,
            position: i + 1,
            detail: format!("{} follows {}", values[i], values[i - 1]),
        });
    }
    if let Some(i) = (1..values.len()).find(|&i| summand_pair(values, i).is_none()) {
        violations.push(Violation {
            kind: ViolationKind::NoSummandPair,
            position: i + 1,
            detail: format!("{} is not a sum of two earlier elements", values[i]),
        });
    }
    if let Some(i) = values.iter().position(|&v| v > target) {
        violations.push(Violation {
            kind: ViolationKind::Overshoot,
            position: i + 1,
            detail: format!("{} > {target}", values[i]),
        });
    }
    match values.last() {
        Some(&last) if last != target => violations.push(Violation {
            kind: ViolationKind::WrongTerminal,
            position: values.len(),
            detail: format!("ends at {last}, target is {target}"),
        }),
        _ => {}
    }

    ValidationReport { exponent: target, valid: violations.is_empty(), violations }
}

/// Finds any `(j, k)` with `values[j] + values[k] == values[i]`, `j <= k < i`.
/// Robust against unsorted prefixes (used by the validator); prefers the
/// two-pointer scan when the prefix is sorted.
fn summand_pair(values: &[u64], i: usize) -> Option<(usize, usize)> {
    let (prefix, rest) = values.split_at(i);
    let target = rest[0];
    if prefix.windows(2).all(|w| w[0] < w[1]) {
        let (mut lo, mut hi) = (0usize, i - 1);
        while lo <= hi {
            match prefix[lo].checked_add(prefix[hi]) {
                Some(s) if s == target => return Some((lo, hi)),
                Some(s) if s < target => lo += 1,
                _ => {
                    if hi == 0 {
                        break;
                    }
                    hi -= 1;
                }
            }
        }
        None
    } else {
        for k in 0..i {
            for j in 0..=k {
                if prefix[j].checked_add(prefix[k]) == Some(target) {
                    return Some((j, k));
                }
            }
        }
        None
    }
}

/// Error carrying the report of a failed [`AdditionChain::from_values`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvalidChain(pub ValidationReport);

impl fmt::Display for InvalidChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for InvalidChain {}

/// Error from [`AdditionChain::push_sum`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StepError {
    /// An operand index is out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// The sum does not exceed the current last element (or overflows u64).
    NotIncreasing { sum: u64, last: u64 },
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::IndexOutOfRange { index, len } => {
                write!(f, "operand index {index} out of range for chain of {len} elements")
            }
            StepError::NotIncreasing { sum, last } => {
                write!(f, "sum {sum} does not extend chain ending at {last}")
            }
        }
    }
}

impl std::error::Error for StepError {}

/// A validated addition chain: strictly increasing values starting at 1, plus
/// one `(j, k)` operand pair (0-based, `j <= k`) per element after the first.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AdditionChain {
    values: Vec<u64>,
    steps: Vec<(usize, usize)>,
}

impl AdditionChain {
    /// The chain `(1)`: zero additions, target 1.
    pub fn unit() -> Self {
        AdditionChain { values: vec![1], steps: Vec::new() }
    }

    /// Builds a chain from raw values, deriving an operand pair for every
    /// element. The target is the final value; any contract violation is
    /// returned as a report.
    pub fn from_values(values: &[u64]) -> Result<Self, InvalidChain> {
        let target = match values.last() {
            Some(&last) if last >= 1 => Exponent(last),
            _ => Exponent(1), // empty or zero terminal: validation below fails
        };
        let report = validate_chain(values, target);
        if !report.valid {
            return Err(InvalidChain(report));
        }
        let mut chain = AdditionChain::unit();
        for i in 1..values.len() {
            let (j, k) = decompose_step(values, i).expect("validated chain decomposes");
            chain.push_sum(j, k).expect("validated chain extends");
        }
        Ok(chain)
    }

    /// Appends `values[j] + values[k]` as a new element and records the step.
    /// Returns the new value.
    pub fn push_sum(&mut self, j: usize, k: usize) -> Result<u64, StepError> {
        let len = self.values.len();
        let index = j.max(k);
        if index >= len {
            return Err(StepError::IndexOutOfRange { index, len });
        }
        let last = *self.values.last().expect("chain is never empty");
        let sum = self.values[j]
            .checked_add(self.values[k])
            .filter(|&s| s > last)
            .ok_or(StepError::NotIncreasing { sum: self.values[j].wrapping_add(self.values[k]), last })?;
        self.values.push(sum);
        self.steps.push((j.min(k), j.max(k)));
        Ok(sum)
    }

    /// Drops all elements after the first `keep` (which must be >= 1).
    pub fn truncate(&mut self, keep: usize) {
        assert!(keep >= 1, "a chain always contains the element 1");
        if keep < self.values.len() {
            self.values.truncate(keep);
            self.steps.truncate(keep - 1);
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Operand pairs: `steps()[i]` produced `values()[i + 1]`.
    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    /// Element count (one more than the length in additions).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a chain always contains at least the element 1
    }

    /// Length in additions, i.e. the multiplication count.
    pub fn length(&self) -> ChainLength {
        ChainLength(self.values.len() - 1)
    }

    pub fn last(&self) -> u64 {
        *self.values.last().expect("chain is never empty")
    }

    /// Position of `value` if present (values are strictly increasing).
    pub fn position_of(&self, value: u64) -> Option<usize> {
        self.values.binary_search(&value).ok()
    }

    /// The chain as a whitespace-separated line, e.g. `1 2 4 8`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&v.to_string());
        }
        out
    }
}

impl fmt::Display for AdditionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Error from [`decompose_step`]: no operand pair exists for the element at
/// the given 0-based index.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NoSummandPair {
    pub index: usize,
    pub value: u64,
}

impl fmt::Display for NoSummandPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (index {}) is not a sum of two earlier elements",
            self.value, self.index
        )
    }
}

impl std::error::Error for NoSummandPair {}

/// Finds the operand pair `(j, k)`, `j <= k < i`, with
/// `values[j] + values[k] == values[i]`, preferring the largest `k` (for a
/// strictly increasing prefix, `j` is then unique). Indices are 0-based.
pub fn decompose_step(values: &[u64], i: usize) -> Result<(usize, usize), NoSummandPair> {
    assert!(i < values.len(), "index {i} out of range");
    let target = values[i];
    let prefix = &values[..i];
    for k in (0..i).rev() {
        let Some(need) = target.checked_sub(prefix[k]) else { continue };
        if let Ok(j) = prefix[..=k].binary_search(&need) {
            return Ok((j, k));
        }
    }
    Err(NoSummandPair { index: i, value: target })
}

/// One instruction of a straight-line exponentiation program: combine the
/// results at `lhs` and `rhs` (0-based, `lhs <= rhs`) into slot `target`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Instruction {
    pub target: usize,
    pub lhs: usize,
    pub rhs: usize,
}

/// A chain flattened into instructions. Evaluating it over any associative
/// operation with `x_1` in slot 0 reproduces every chain power.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StraightLineProgram {
    pub instructions: Vec<Instruction>,
}

impl StraightLineProgram {
    /// Number of combine operations (equals the chain length in additions).
    pub fn operations(&self) -> usize {
        self.instructions.len()
    }

    /// Runs the program: slot 0 holds `first`, each instruction fills its
    /// target slot with `combine(lhs, rhs)`. Returns all slots in order.
    pub fn eval_with<T: Clone>(&self, first: T, mut combine: impl FnMut(&T, &T) -> T) -> Vec<T> {
        let mut slots = Vec::with_capacity(self.instructions.len() + 1);
        slots.push(first);
        for ins in &self.instructions {
            debug_assert_eq!(ins.target, slots.len());
            let value = combine(&slots[ins.lhs], &slots[ins.rhs]);
            slots.push(value);
        }
        slots
    }
}

/// Flattens a chain into its straight-line program: instruction `i` writes
/// slot `i + 1` from the chain's recorded operand pair.
pub fn to_program(chain: &AdditionChain) -> StraightLineProgram {
    let instructions = chain
        .steps()
        .iter()
        .enumerate()
        .map(|(i, &(j, k))| Instruction { target: i + 1, lhs: j, rhs: k })
        .collect();
    StraightLineProgram { instructions }
}

/// Error from [`parse_chain_text`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseChainError {
    pub token: String,
}

impl fmt::Display for ParseChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid chain value {:?} (expected a decimal integer)", self.token)
    }
}

impl std::error::Error for ParseChainError {}

/// Parses the chain file format: whitespace-separated decimal values, with
/// `#` starting a comment that runs to end of line. Returns the raw values;
/// semantic checks are [`validate_chain`]'s job.
pub fn parse_chain_text(text: &str) -> Result<Vec<u64>, ParseChainError> {
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            let value = token
                .parse::<u64>()
                .map_err(|_| ParseChainError { token: token.to_string() })?;
            values.push(value);
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(v: u64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn exponent_rejects_zero() {
        assert_eq!(Exponent::new(0), Err(InvalidExponent));
        assert_eq!(Exponent::new(1).unwrap().get(), 1);
    }

    #[test]
    fn lower_bound_matches_closed_form_anchors() {
        assert_eq!(lower_bound(exp(1)), ChainLength(0));
        assert_eq!(lower_bound(exp(2)), ChainLength(1));
        for k in 0..=20 {
            assert_eq!(lower_bound(exp(1 << k)), ChainLength(k as usize));
        }
        // 97 = 0b1100001: floor(log2) = 6, popcount = 3, ceil(log2 3) = 2
        assert_eq!(lower_bound(exp(97)), ChainLength(8));
        assert_eq!(lower_bound(exp(43)), ChainLength(7));
        assert_eq!(lower_bound(exp(15)), ChainLength(5));
    }

    #[test]
    fn validates_known_good_chain_for_43() {
        let values = [1, 2, 3, 6, 12, 24, 36, 42, 43];
        let report = validate_chain(&values, exp(43));
        assert!(report.valid, "{report}");
        assert_eq!(AdditionChain::from_values(&values).unwrap().length(), ChainLength(8));
    }

    #[test]
    fn validates_unit_chain_for_one() {
        let report = validate_chain(&[1], exp(1));
        assert!(report.valid);
        assert_eq!(AdditionChain::unit().length(), ChainLength(0));
    }

    #[test]
    fn rejects_overshooting_chain() {
        // Same prefix as the valid 43-chain but jumping past the target.
        let values = [1, 2, 3, 6, 12, 24, 36, 42, 66];
        let report = validate_chain(&values, exp(43));
        assert!(!report.valid);
        let kinds: Vec<_> = report.violations.iter().map(|v| (v.kind, v.position)).collect();
        assert!(kinds.contains(&(ViolationKind::Overshoot, 9)), "{kinds:?}");
        assert!(kinds.contains(&(ViolationKind::WrongTerminal, 9)), "{kinds:?}");
        // 66 = 42 + 24 is still a legal sum, so no summand violation.
        assert!(!kinds.iter().any(|k| k.0 == ViolationKind::NoSummandPair));
    }

    #[test]
    fn rejects_wrong_start_and_empty_input() {
        let report = validate_chain(&[2, 4], exp(4));
        assert_eq!(report.violations[0].kind, ViolationKind::NotOneAtStart);
        let report = validate_chain(&[], exp(1));
        assert!(!report.valid);
        assert_eq!(report.violations[0].kind, ViolationKind::NotOneAtStart);
    }

    #[test]
    fn reports_first_position_per_kind() {
        // 5 breaks the summand rule first at position 3; 11 would too.
        let report = validate_chain(&[1, 2, 5, 11], exp(11));
        let summand: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.kind == ViolationKind::NoSummandPair)
            .collect();
        assert_eq!(summand.len(), 1);
        assert_eq!(summand[0].position, 3);
    }

    #[test]
    fn decompose_prefers_largest_high_operand() {
        // 9 = 1 + 8, not 4 + 5 (5 is absent) — and k = 3 beats any smaller k.
        assert_eq!(decompose_step(&[1, 2, 4, 8, 9], 4), Ok((0, 3)));
        assert_eq!(decompose_step(&[1, 2, 3], 2), Ok((0, 1)));
        // 6 = 2 + 4: the only pair, found at (1, 2).
        assert_eq!(decompose_step(&[1, 2, 4, 6], 3), Ok((1, 2)));
        // Doubling decomposes as (i-1, i-1) when no larger split exists.
        assert_eq!(decompose_step(&[1, 2], 1), Ok((0, 0)));
    }

    #[test]
    fn decompose_reports_gap() {
        let err = decompose_step(&[1, 2, 4, 7], 3).unwrap_err();
        assert_eq!(err, NoSummandPair { index: 3, value: 7 });
    }

    #[test]
    fn decompose_result_is_maximal_in_high_operand() {
        // Independent check of the tie-break contract on a chain with many
        // representable sums: for the returned (j, k) no k' > k admits a pair.
        let values = [1u64, 2, 3, 4, 6, 8, 12, 16, 24];
        for i in 1..values.len() {
            let (j, k) = decompose_step(&values, i).unwrap();
            assert_eq!(values[j] + values[k], values[i]);
            for bigger_k in (k + 1)..i {
                let need = values[i].checked_sub(values[bigger_k]);
                let found = need
                    .map(|n| values[..=bigger_k].binary_search(&n).is_ok())
                    .unwrap_or(false);
                assert!(!found, "i={i}: ({j},{k}) returned but k'={bigger_k} works");
            }
        }
    }

    #[test]
    fn program_mirrors_steps_and_reproduces_values() {
        let chain = AdditionChain::from_values(&[1, 2, 3, 6, 12, 24, 48, 96, 97]).unwrap();
        let program = to_program(&chain);
        assert_eq!(program.operations(), 8);
        assert_eq!(program.instructions[0], Instruction { target: 1, lhs: 0, rhs: 0 });
        assert_eq!(program.instructions[1], Instruction { target: 2, lhs: 0, rhs: 1 });
        let last = *program.instructions.last().unwrap();
        assert_eq!((last.target, last.lhs, last.rhs), (8, 0, 7)); // 97 = 1 + 96
        // Evaluating over (u64, +) starting at 1 reproduces the chain itself.
        let replay = program.eval_with(1u64, |a, b| a + b);
        assert_eq!(replay, chain.values());
    }

    #[test]
    fn push_sum_enforces_growth_and_bounds() {
        let mut chain = AdditionChain::unit();
        assert_eq!(chain.push_sum(0, 0), Ok(2));
        assert_eq!(chain.push_sum(0, 1), Ok(3));
        assert!(matches!(chain.push_sum(0, 5), Err(StepError::IndexOutOfRange { .. })));
        // 1 + 2 = 3 is not > 3
        assert!(matches!(chain.push_sum(0, 1), Err(StepError::NotIncreasing { .. })));
        assert_eq!(chain.values(), &[1, 2, 3]);
    }

    #[test]
    fn truncate_keeps_valid_prefix() {
        let mut chain = AdditionChain::from_values(&[1, 2, 4, 8, 16]).unwrap();
        chain.truncate(3);
        assert_eq!(chain.values(), &[1, 2, 4]);
        assert_eq!(chain.steps().len(), 2);
        let report = validate_chain(chain.values(), exp(4));
        assert!(report.valid);
    }

    #[test]
    fn parses_chain_text_with_comments() {
        let text = "# a chain for 8\n1 2 # inline comment\n4\n8\n";
        assert_eq!(parse_chain_text(text).unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(parse_chain_text("").unwrap(), Vec::<u64>::new());
        assert!(parse_chain_text("1 2 x").is_err());
    }

    #[test]
    fn chain_text_round_trips() {
        let chain = AdditionChain::from_values(&[1, 2, 4, 5, 10]).unwrap();
        let text = chain.to_text();
        assert_eq!(text, "1 2 4 5 10");
        assert_eq!(parse_chain_text(&text).unwrap(), chain.values());
    }
}

//! Exact minimal chain lengths via iterative-deepening depth-first search.
//!
//! Depth starts at the proven lower bound and increases until a chain is
//! found; the binary method supplies the initial upper bound and witness, so
//! a budgeted search always has a valid chain to report. Candidate moves
//! extend the chain by `x_j + x_last` (largest first), falling back to full
//! pair enumeration so non-star optima — the first at e = 12509 — are not
//! missed.

use std::io;
use std::path::Path;

use rayon::prelude::*;

use crate::baselines::binary_chain;
use crate::chain::{lower_bound, AdditionChain, ChainLength, Exponent};

/// Result of an exact search: the best chain found, whether its optimality
/// was proven (always true without a budget), and the nodes expanded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchResult {
    pub chain: AdditionChain,
    pub proven: bool,
    pub nodes: u64,
}

impl SearchResult {
    pub fn length(&self) -> ChainLength {
        self.chain.length()
    }
}

/// Searches for a provably minimal chain, expanding at most `node_budget`
/// nodes if one is given. On budget exhaustion the result carries the best
/// chain found so far (at worst the binary chain) with `proven = false`.
pub fn search(e: Exponent, node_budget: Option<u64>) -> SearchResult {
    let target = e.get();
    let lb = lower_bound(e).additions();
    let fallback = binary_chain(e);
    let ub = fallback.length().additions();
    if lb == ub {
        return SearchResult { chain: fallback, proven: true, nodes: 0 };
    }

    let budget = node_budget.unwrap_or(u64::MAX);
    let mut dfs = Dfs {
        target,
        chain: Vec::with_capacity(ub + 1),
        scratch: vec![Vec::new(); ub + 1],
        nodes: 0,
        budget,
    };
    for depth in lb..ub {
        dfs.chain.clear();
        dfs.chain.push(1);
        match dfs.run(depth) {
            Ok(true) => {
                let chain = AdditionChain::from_values(&dfs.chain)
                    .expect("search constructs valid chains");
                debug_assert_eq!(chain.length().additions(), depth);
                return SearchResult { chain, proven: true, nodes: dfs.nodes };
            }
            Ok(false) => {}
            Err(BudgetExhausted) => {
                return SearchResult { chain: fallback, proven: false, nodes: dfs.nodes };
            }
        }
    }
    // Every depth below the binary length failed, so the binary chain is
    // minimal.
    SearchResult { chain: fallback, proven: true, nodes: dfs.nodes }
}

/// Provably minimal length (unbudgeted search).
pub fn optimal_length(e: Exponent) -> ChainLength {
    search(e, None).chain.length()
}

/// A provably minimal chain (unbudgeted search). Deterministic: candidate
/// ordering is fixed, so equal inputs yield the identical witness.
pub fn optimal_chain(e: Exponent) -> AdditionChain {
    search(e, None).chain
}

struct BudgetExhausted;

struct Dfs {
    target: u64,
    chain: Vec<u64>,
    scratch: Vec<Vec<u64>>,
    nodes: u64,
    budget: u64,
}

impl Dfs {
    fn run(&mut self, remaining: usize) -> Result<bool, BudgetExhausted> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExhausted);
        }
        let last = *self.chain.last().expect("chain starts at 1");
        if last == self.target {
            return Ok(true);
        }
        if remaining == 0 || ((last as u128) << remaining) < self.target as u128 {
            return Ok(false);
        }

        let level = self.chain.len();
        let mut cands = std::mem::take(&mut self.scratch[level]);
        cands.clear();
        self.collect_candidates(remaining, &mut cands);
        let mut found = false;
        for &v in &cands {
            self.chain.push(v);
            match self.run(remaining - 1) {
                Ok(true) => {
                    found = true;
                    break; // keep the witness on the chain stack
                }
                Ok(false) => {
                    self.chain.pop();
                }
                Err(stop) => {
                    self.scratch[level] = cands;
                    return Err(stop);
                }
            }
        }
        self.scratch[level] = cands;
        Ok(found)
    }

    /// Fills `out` with the next-element candidates in trial order: sums
    /// involving the last element first (descending), then the remaining
    /// pair sums (descending, excluding values the star pass already
    /// covers). Candidates that cannot reach the target within the remaining
    /// depth even by pure doubling are dropped.
    fn collect_candidates(&self, remaining: usize, out: &mut Vec<u64>) {
        let chain = &self.chain;
        let last = *chain.last().expect("chain starts at 1");
        let child_shift = remaining - 1;
        let reachable = |v: u64| ((v as u128) << child_shift) >= self.target as u128;

        for j in (0..chain.len()).rev() {
            let Some(v) = last.checked_add(chain[j]) else { continue };
            if v > self.target {
                continue;
            }
            if !reachable(v) {
                break; // j descending makes v descending
            }
            out.push(v);
        }

        let star_count = out.len();
        for k in (0..chain.len().saturating_sub(1)).rev() {
            if ((chain[k] as u128) << (child_shift + 1)) < self.target as u128 {
                break; // k descending bounds every remaining pair sum
            }
            for j in (0..=k).rev() {
                let Some(v) = chain[j].checked_add(chain[k]) else { continue };
                if v > self.target {
                    continue;
                }
                if v <= last || !reachable(v) {
                    break; // j descending makes v descending
                }
                if chain.binary_search(&(v - last)).is_ok() {
                    continue; // equal-valued star candidate already queued
                }
                out.push(v);
            }
        }
        if out.len() > star_count {
            out[star_count..].sort_unstable_by(|a, b| b.cmp(a));
            let mut write = star_count;
            for read in star_count..out.len() {
                if write == star_count || out[write - 1] != out[read] {
                    out[write] = out[read];
                    write += 1;
                }
            }
            out.truncate(write);
        }
    }
}

/// Exact lengths for every exponent in `1..=limit`, with optional on-disk
/// caching.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OptimalTable {
    limit: u64,
    lengths: Vec<u16>,
}

impl OptimalTable {
    /// Computes the whole table, one independent search per exponent
    /// (parallelized; the result does not depend on thread count).
    pub fn compute(limit: u64) -> Self {
        let lengths = (1..=limit)
            .into_par_iter()
            .map(|n| {
                let e = Exponent::new(n).expect("range starts at 1");
                optimal_length(e).additions() as u16
            })
            .collect();
        OptimalTable { limit, lengths }
    }

    /// Largest exponent covered.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Minimal length for `n` (1-based, `n <= limit`).
    pub fn length(&self, n: u64) -> ChainLength {
        assert!((1..=self.limit).contains(&n), "exponent {n} outside table");
        ChainLength(self.lengths[(n - 1) as usize] as usize)
    }

    /// Sum of minimal lengths over `1..=up_to`.
    pub fn accumulated(&self, up_to: u64) -> u64 {
        assert!(up_to <= self.limit, "accumulation limit {up_to} outside table");
        self.lengths[..up_to as usize].iter().map(|&l| l as u64).sum()
    }

    /// Serializes as magic, version, limit, lengths, checksum (all
    /// little-endian).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(16 + self.lengths.len() * 2 + 8);
        bytes.extend_from_slice(CACHE_MAGIC);
        bytes.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        bytes.extend_from_slice(&self.limit.to_le_bytes());
        for &l in &self.lengths {
            bytes.extend_from_slice(&l.to_le_bytes());
        }
        let checksum = fnv1a64(&bytes);
        bytes.extend_from_slice(&checksum.to_le_bytes());
        bytes
    }

    /// Parses and verifies a serialized table.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CacheCorrupt> {
        if bytes.len() < 4 || &bytes[..4] != CACHE_MAGIC {
            return Err(CacheCorrupt::BadMagic);
        }
        if bytes.len() < 24 {
            return Err(CacheCorrupt::BadLength);
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("sized slice"));
        if version != CACHE_VERSION {
            return Err(CacheCorrupt::BadVersion(version));
        }
        let limit = u64::from_le_bytes(bytes[8..16].try_into().expect("sized slice"));
        let expected_len = 16 + limit as usize * 2 + 8;
        if bytes.len() != expected_len {
            return Err(CacheCorrupt::BadLength);
        }
        let (payload, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().expect("sized slice"));
        if fnv1a64(payload) != stored {
            return Err(CacheCorrupt::BadChecksum);
        }
        let lengths = payload[16..]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes(c.try_into().expect("sized slice")))
            .collect();
        Ok(OptimalTable { limit, lengths })
    }
}

const CACHE_MAGIC: &[u8; 4] = b"ACOT";
const CACHE_VERSION: u32 = 1;

/// Reasons a cache file is rejected (the caller recomputes in every case).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CacheCorrupt {
    BadMagic,
    BadVersion(u32),
    BadLength,
    BadChecksum,
}

impl std::fmt::Display for CacheCorrupt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CacheCorrupt::BadMagic => write!(f, "cache file has wrong magic bytes"),
            CacheCorrupt::BadVersion(v) => write!(f, "cache file has unsupported version {v}"),
            CacheCorrupt::BadLength => write!(f, "cache file is truncated or oversized"),
            CacheCorrupt::BadChecksum => write!(f, "cache file fails its checksum"),
        }
    }
}

impl std::error::Error for CacheCorrupt {}

/// FNV-1a, the 64-bit variant.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Loads the table from `cache_path` when it is present, uncorrupted, and
/// covers `limit`; otherwise computes it and (re)writes the cache. The file
/// is written once, after all lengths are known.
pub fn optimal_table(limit: u64, cache_path: Option<&Path>) -> io::Result<OptimalTable> {
    if let Some(path) = cache_path {
        if let Ok(bytes) = std::fs::read(path) {
            if let Ok(table) = OptimalTable::from_bytes(&bytes) {
                if table.limit() >= limit {
                    return Ok(table);
                }
            }
        }
    }
    let table = OptimalTable::compute(limit);
    if let Some(path) = cache_path {
        std::fs::write(path, table.to_bytes())?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::binary_length;
    use crate::chain::validate_chain;

    fn exp(v: u64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn anchors_match_known_minimal_lengths() {
        for (n, l) in [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (7, 4), (15, 5), (43, 7), (97, 8)] {
            assert_eq!(optimal_length(exp(n)), ChainLength(l), "n = {n}");
        }
        assert_eq!(optimal_length(exp(1 << 12)), ChainLength(12));
    }

    #[test]
    fn witnesses_validate_and_match_lengths() {
        for n in 1..=64u64 {
            let e = exp(n);
            let chain = optimal_chain(e);
            let report = validate_chain(chain.values(), e);
            assert!(report.valid, "n = {n}: {report}");
            assert_eq!(chain.length(), optimal_length(e), "n = {n}");
        }
    }

    #[test]
    fn search_is_deterministic() {
        let a = search(exp(383), None);
        let b = search(exp(383), None);
        assert_eq!(a, b);
    }

    #[test]
    fn self_consistency_on_small_range() {
        let table = OptimalTable::compute(256);
        for n in 1..=128u64 {
            let l_n = table.length(n).additions();
            let l_2n = table.length(2 * n).additions();
            assert!(l_2n <= l_n + 1, "doubling: n = {n}");
            assert!(table.length(n) >= lower_bound(exp(n)), "lower bound: n = {n}");
            assert!(table.length(n) <= binary_length(exp(n)), "binary bound: n = {n}");
        }
    }

    #[test]
    fn first_non_star_optimum_is_found() {
        // 12509 is the smallest exponent where every minimal chain contains a
        // non-star step; the pair-enumeration fallback must find length 17.
        assert_eq!(optimal_length(exp(12509)), ChainLength(17));
    }

    #[test]
    fn budget_exhaustion_reports_unproven_fallback() {
        let result = search(exp(12509), Some(10));
        assert!(!result.proven);
        assert_eq!(result.chain.values(), binary_chain(exp(12509)).values());
        let unbudgeted = search(exp(12509), Some(u64::MAX));
        assert!(unbudgeted.proven);
    }

    #[test]
    fn cache_round_trips_and_detects_corruption() {
        let table = OptimalTable::compute(64);
        let bytes = table.to_bytes();
        assert_eq!(OptimalTable::from_bytes(&bytes).unwrap(), table);

        let mut flipped = bytes.clone();
        let mid = flipped.len() / 2;
        flipped[mid] ^= 0x01;
        assert_eq!(OptimalTable::from_bytes(&flipped), Err(CacheCorrupt::BadChecksum));

        let mut wrong_magic = bytes.clone();
        wrong_magic[0] = b'X';
        assert_eq!(OptimalTable::from_bytes(&wrong_magic), Err(CacheCorrupt::BadMagic));

        assert_eq!(OptimalTable::from_bytes(&bytes[..20]), Err(CacheCorrupt::BadLength));
    }

    #[test]
    fn table_cache_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lengths.bin");
        let computed = optimal_table(96, Some(&path)).unwrap();
        assert!(path.exists());
        let loaded = optimal_table(96, Some(&path)).unwrap();
        assert_eq!(computed, loaded);
        // A corrupt file is silently recomputed and rewritten.
        std::fs::write(&path, b"ACOTgarbage").unwrap();
        let recovered = optimal_table(96, Some(&path)).unwrap();
        assert_eq!(recovered, computed);
        assert_eq!(OptimalTable::from_bytes(&std::fs::read(&path).unwrap()).unwrap(), computed);
    }

    #[test]
    fn accumulated_sums_prefix() {
        let table = OptimalTable::compute(16);
        let manual: u64 = (1..=10u64).map(|n| optimal_length(exp(n)).additions() as u64).sum();
        assert_eq!(table.accumulated(10), manual);
    }
}

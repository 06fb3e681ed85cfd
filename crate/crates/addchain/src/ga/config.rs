//! Genetic-search parameters and the flat `key = value` config format.

use std::fmt;

use serde::{Deserialize, Serialize};

/// All knobs of the genetic search. `Default` gives the tuned values used
/// throughout the benchmarks; every field can be overridden via config file
/// or CLI flags.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct GaConfig {
    /// Chromosomes per generation (>= 2).
    pub population_size: usize,
    /// Breeding generations before the search stops (>= 1).
    pub max_generations: usize,
    /// Probability the single-point variant is dispatched on crossover.
    pub p_single: f64,
    /// Probability the two-point variant is dispatched on crossover.
    pub p_two: f64,
    /// Probability the uniform variant is dispatched on crossover.
    pub p_uniform: f64,
    /// Probability a selected parent pair undergoes crossover at all.
    pub crossover_rate: f64,
    /// Probability a child undergoes mutation.
    pub mutation_rate: f64,
    /// Mutant completions generated per mutation; the shortest survives.
    pub n_mutants: usize,
    /// Gene-generation rule probabilities: double the last element...
    pub p_double: f64,
    /// ...add the last two elements...
    pub p_add: f64,
    /// ...or add a random earlier element to the last one.
    pub p_random: f64,
    /// Stop as soon as the best length reaches the proven lower bound.
    pub early_stop_at_lower_bound: bool,
    /// Keep the original child when every mutant is worse (off by default:
    /// the best mutant replaces the child unconditionally).
    pub elitist_mutation: bool,
    /// Seed for the ChaCha stream; together with the exponent it fixes every
    /// draw of a run.
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 200,
            max_generations: 300,
            p_single: 0.20,
            p_two: 0.35,
            p_uniform: 0.45,
            crossover_rate: 0.4,
            mutation_rate: 1.0,
            n_mutants: 4,
            p_double: 0.65,
            p_add: 0.25,
            p_random: 0.10,
            early_stop_at_lower_bound: true,
            elitist_mutation: false,
            seed: 0,
        }
    }
}

impl GaConfig {
    /// Checks ranges and that both probability triples sum to 1 (within
    /// 1e-9).
    pub fn validate(&self) -> Result<(), ConfigInvalid> {
        fn probability(field: &'static str, v: f64) -> Result<(), ConfigInvalid> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigInvalid { field, reason: format!("{v} is not a probability in [0, 1]") })
            }
        }

        if self.population_size < 2 {
            return Err(ConfigInvalid {
                field: "population_size",
                reason: "must be at least 2 (a breeding step selects two parents)".into(),
            });
        }
        if self.max_generations < 1 {
            return Err(ConfigInvalid { field: "max_generations", reason: "must be at least 1".into() });
        }
        if self.n_mutants < 1 {
            return Err(ConfigInvalid { field: "n_mutants", reason: "must be at least 1".into() });
        }
        probability("p_single", self.p_single)?;
        probability("p_two", self.p_two)?;
        probability("p_uniform", self.p_uniform)?;
        probability("crossover_rate", self.crossover_rate)?;
        probability("mutation_rate", self.mutation_rate)?;
        probability("p_double", self.p_double)?;
        probability("p_add", self.p_add)?;
        probability("p_random", self.p_random)?;
        let crossover_sum = self.p_single + self.p_two + self.p_uniform;
        if (crossover_sum - 1.0).abs() > 1e-9 {
            return Err(ConfigInvalid {
                field: "p_single/p_two/p_uniform",
                reason: format!("must sum to 1, got {crossover_sum}"),
            });
        }
        let rule_sum = self.p_double + self.p_add + self.p_random;
        if (rule_sum - 1.0).abs() > 1e-9 {
            return Err(ConfigInvalid {
                field: "p_double/p_add/p_random",
                reason: format!("must sum to 1, got {rule_sum}"),
            });
        }
        Ok(())
    }

    /// Same config with a different seed (handy for multi-run benchmarks).
    pub fn with_seed(&self, seed: u64) -> Self {
        GaConfig { seed, ..self.clone() }
    }

    /// Sets one field by its name, as written in config files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigFileError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigFileError> {
            value.trim().parse().map_err(|_| ConfigFileError::BadValue {
                key: key.to_string(),
                value: value.trim().to_string(),
            })
        }

        match key {
            "population_size" => self.population_size = parse(key, value)?,
            "max_generations" => self.max_generations = parse(key, value)?,
            "p_single" => self.p_single = parse(key, value)?,
            "p_two" => self.p_two = parse(key, value)?,
            "p_uniform" => self.p_uniform = parse(key, value)?,
            "crossover_rate" => self.crossover_rate = parse(key, value)?,
            "mutation_rate" => self.mutation_rate = parse(key, value)?,
            "n_mutants" => self.n_mutants = parse(key, value)?,
            "p_double" => self.p_double = parse(key, value)?,
            "p_add" => self.p_add = parse(key, value)?,
            "p_random" => self.p_random = parse(key, value)?,
            "early_stop_at_lower_bound" => self.early_stop_at_lower_bound = parse(key, value)?,
            "elitist_mutation" => self.elitist_mutation = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(ConfigFileError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies a flat config file: one `key = value` per line, `#` comments,
    /// blank lines ignored, unknown keys rejected.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigFileError> {
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigFileError::BadLine { number: number + 1, line: line.to_string() });
            };
            self.set(key.trim(), value)?;
        }
        Ok(())
    }
}

/// A config field with an out-of-range or inconsistent value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConfigInvalid {
    pub field: &'static str,
    pub reason: String,
}

impl fmt::Display for ConfigInvalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigInvalid {}

/// A config file that cannot be applied.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConfigFileError {
    UnknownKey(String),
    BadValue { key: String, value: String },
    BadLine { number: usize, line: String },
}

impl fmt::Display for ConfigFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigFileError::UnknownKey(key) => write!(f, "unknown config key {key:?}"),
            ConfigFileError::BadValue { key, value } => {
                write!(f, "cannot parse value {value:?} for config key {key:?}")
            }
            ConfigFileError::BadLine { number, line } => {
                write!(f, "config line {number} is not `key = value`: {line:?}")
            }
        }
    }
}

impl std::error::Error for ConfigFileError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert_eq!(GaConfig::default().validate(), Ok(()));
    }

    #[test]
    fn rejects_bad_probability_sums_and_ranges() {
        // p_single 0.5 makes the crossover weights sum to 1.3.
        let cfg = GaConfig { p_single: 0.5, ..GaConfig::default() };
        assert!(cfg.validate().is_err());

        let cfg = GaConfig { mutation_rate: 1.5, ..GaConfig::default() };
        assert!(cfg.validate().is_err());

        let cfg = GaConfig { population_size: 1, ..GaConfig::default() };
        assert!(cfg.validate().is_err());

        let cfg = GaConfig { n_mutants: 0, ..GaConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tolerates_float_noise_in_sums() {
        let cfg = GaConfig {
            p_single: 0.1 + 0.1, // 0.2 with representation error
            p_two: 0.35,
            p_uniform: 0.45,
            ..GaConfig::default()
        };
        assert_eq!(cfg.validate(), Ok(()));
    }

    #[test]
    fn file_text_round_trip_and_overrides() {
        let mut cfg = GaConfig::default();
        cfg.apply_file_text(
            "# tuning\npopulation_size = 50\nseed = 9\nmutation_rate = 0.5 # trailing note\n\n",
        )
        .unwrap();
        assert_eq!(cfg.population_size, 50);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.mutation_rate, 0.5);
        assert_eq!(cfg.max_generations, GaConfig::default().max_generations);
    }

    #[test]
    fn file_text_rejects_unknown_keys_and_junk() {
        let mut cfg = GaConfig::default();
        assert_eq!(
            cfg.apply_file_text("popsize = 10"),
            Err(ConfigFileError::UnknownKey("popsize".to_string()))
        );
        assert!(matches!(
            cfg.apply_file_text("population_size = many"),
            Err(ConfigFileError::BadValue { .. })
        ));
        assert!(matches!(cfg.apply_file_text("just words"), Err(ConfigFileError::BadLine { .. })));
    }

    #[test]
    fn seed_helper_keeps_other_fields() {
        let cfg = GaConfig::default().with_seed(77);
        assert_eq!(cfg.seed, 77);
        assert_eq!(cfg.population_size, GaConfig::default().population_size);
    }
}

//! Strict TOML scenario files.
//!
//! ```toml
//! schema = 1
//! scheme = "all_user"          # all_user | pairwise | modified_two_user
//! seed = 7
//! mc_samples = 2000
//! snr_grid = [12, 14, 16, 18, 20, 22, 24]
//!
//! [network]                    # all_user and pairwise
//! antennas = [2, 2, 2]
//! n_eve = 3
//! k2 = 2
//! k1 = 4                       # optional, defaults to N_T − N_min
//! pair = [1, 2]                # optional, 1-based
//!
//! [two_user]                   # modified_two_user
//! n1 = 2
//! n2 = 3
//! k = 7
//! n_eve = 6
//! ```

use std::path::Path;

use anece_core::capacity::DEFAULT_MC_SAMPLES;
use anece_core::dofcalc::{pairwise_k2_session, Scheme};
use anece_core::{NetworkConfig, SnrGrid, TwoUserModifiedConfig, Violation};
use serde::Deserialize;

use crate::error::ScenarioError;

pub const SCHEMA_VERSION: u32 = 1;

const TOP_KEYS: &[&str] = &[
    "schema",
    "scheme",
    "seed",
    "mc_samples",
    "snr_grid",
    "network",
    "two_user",
];
const NETWORK_KEYS: &[&str] = &["antennas", "n_eve", "k1", "k2", "pair"];
const TWO_USER_KEYS: &[&str] = &["n1", "n2", "k", "n_eve"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: Option<u32>,
    scheme: Option<String>,
    seed: Option<u64>,
    mc_samples: Option<usize>,
    snr_grid: Option<Vec<f64>>,
    network: Option<RawNetwork>,
    two_user: Option<RawTwoUser>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    antennas: Vec<usize>,
    n_eve: usize,
    k2: usize,
    k1: Option<usize>,
    pair: Option<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTwoUser {
    n1: usize,
    n2: usize,
    k: usize,
    n_eve: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Setup {
    /// All-user or pair-wise network; `pair` is 0-based.
    Network {
        cfg: NetworkConfig,
        pair: (usize, usize),
    },
    TwoUser(TwoUserModifiedConfig),
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scheme: Scheme,
    pub setup: Setup,
    pub snr_grid: SnrGrid,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Scenario {
    /// The network view: the configured network, or the M = 2 network of a
    /// modified scenario with K_2 = K − N_2.
    pub fn network(&self) -> NetworkConfig {
        match &self.setup {
            Setup::Network { cfg, .. } => cfg.clone(),
            Setup::TwoUser(c) => {
                let mut cfg = c.network();
                cfg.k2 = c.k_total - c.n2;
                cfg
            }
        }
    }
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ScenarioError::Syntax(e.message().to_string()))?;
    check_keys(&table)?;
    let raw: RawScenario = table
        .try_into()
        .map_err(|e: toml::de::Error| ScenarioError::Syntax(e.message().to_string()))?;
    build(raw)
}

fn check_keys(table: &toml::Table) -> Result<(), ScenarioError> {
    for (key, value) in table {
        let allowed = match key.as_str() {
            "network" => NETWORK_KEYS,
            "two_user" => TWO_USER_KEYS,
            k if TOP_KEYS.contains(&k) => continue,
            _ => return Err(ScenarioError::UnknownKey(key.clone())),
        };
        let inner = value
            .as_table()
            .ok_or_else(|| ScenarioError::invalid(key.as_str(), "expected a table"))?;
        if let Some(bad) = inner.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(ScenarioError::UnknownKey(format!("{key}.{bad}")));
        }
    }
    Ok(())
}

fn first_violation(
    section: &str,
    v: Vec<Violation>,
    rename: fn(&str) -> &str,
) -> Result<(), ScenarioError> {
    match v.into_iter().next() {
        None => Ok(()),
        Some(v) => Err(ScenarioError::invalid(
            format!("{section}.{}", rename(v.field)),
            v.message,
        )),
    }
}

fn build(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    match raw.schema {
        None => return Err(ScenarioError::MissingKey("schema".into())),
        Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(ScenarioError::invalid(
                "schema",
                format!("unsupported version {other}, expected {SCHEMA_VERSION}"),
            ))
        }
    }
    let scheme: Scheme = raw
        .scheme
        .ok_or_else(|| ScenarioError::MissingKey("scheme".into()))?
        .parse()
        .map_err(|e: anece_core::Error| ScenarioError::invalid("scheme", e.to_string()))?;
    let mc_samples = raw.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
    if mc_samples == 0 {
        return Err(ScenarioError::invalid("mc_samples", "must be ≥ 1"));
    }
    let snr_grid = match raw.snr_grid {
        None => SnrGrid::high_snr(),
        Some(p) => {
            SnrGrid::new(p).map_err(|e| ScenarioError::invalid("snr_grid", e.to_string()))?
        }
    };
    let setup = match (scheme, raw.network, raw.two_user) {
        (Scheme::ModifiedTwoUser, None, Some(t)) => {
            let c = TwoUserModifiedConfig::new(t.n1, t.n2, t.k, t.n_eve);
            first_violation("two_user", c.validate(), |f| {
                if f == "k_total" {
                    "k"
                } else {
                    f
                }
            })?;
            Setup::TwoUser(c)
        }
        (Scheme::ModifiedTwoUser, _, _) => {
            return Err(ScenarioError::MissingKey("two_user".into()));
        }
        (_, Some(n), None) => network_setup(scheme, n)?,
        (_, _, Some(_)) => {
            return Err(ScenarioError::invalid(
                "two_user",
                format!("only valid with scheme \"{}\"", Scheme::ModifiedTwoUser),
            ))
        }
        (_, None, None) => return Err(ScenarioError::MissingKey("network".into())),
    };
    Ok(Scenario {
        scheme,
        setup,
        snr_grid,
        mc_samples,
        seed: raw.seed.unwrap_or(0),
    })
}

fn network_setup(scheme: Scheme, n: RawNetwork) -> Result<Setup, ScenarioError> {
    let mut cfg = NetworkConfig::new(n.antennas, n.n_eve, n.k2);
    if let Some(k1) = n.k1 {
        cfg.k1 = k1;
    }
    first_violation("network", cfg.validate(), |f| f)?;
    let [a, b] = n.pair.unwrap_or([1, 2]);
    let m = cfg.m();
    if a == b || !(1..=m).contains(&a) || !(1..=m).contains(&b) {
        return Err(ScenarioError::invalid(
            "network.pair",
            format!("need two distinct users in 1..={m}"),
        ));
    }
    if scheme == Scheme::Pairwise {
        if m < 3 {
            return Err(ScenarioError::invalid(
                "network.antennas",
                "pair-wise needs M ≥ 3",
            ));
        }
        pairwise_k2_session(m, cfg.k2)
            .map_err(|e| ScenarioError::invalid("network.k2", e.to_string()))?;
    }
    Ok(Setup::Network {
        cfg,
        pair: (a - 1, b - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "schema = 1\nscheme = \"all_user\"\n[network]\nantennas = [1, 1]\nn_eve = 1\nk2 = 1\n";

    #[test]
    fn minimal_file() {
        let s = parse_scenario_str(MINIMAL).unwrap();
        assert_eq!(s.scheme, Scheme::AllUser);
        assert_eq!(s.mc_samples, DEFAULT_MC_SAMPLES);
        assert_eq!(s.snr_grid, SnrGrid::high_snr());
        let Setup::Network { cfg, pair } = s.setup else {
            panic!()
        };
        assert_eq!((cfg.k1, pair), (1, (0, 1)));
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let e = parse_scenario_str(&MINIMAL.replace("n_eve", "n_eves")).unwrap_err();
        assert_eq!(e.to_string(), "unknown key `network.n_eves`");
        let e = parse_scenario_str(&format!("extra = 1\n{MINIMAL}")).unwrap_err();
        assert_eq!(e.to_string(), "unknown key `extra`");
    }

    #[test]
    fn short_pilot_names_k1() {
        let text = "schema = 1\nscheme = \"all_user\"\n[network]\nantennas = [2, 2, 2]\nn_eve = 1\nk2 = 1\nk1 = 3\n";
        let e = parse_scenario_str(text).unwrap_err().to_string();
        assert!(
            e.contains("network.k1") && e.contains("N_T−N_min") && e.contains("4"),
            "{e}"
        );
    }

    #[test]
    fn modified_and_pairwise_checks() {
        let text = "schema = 1\nscheme = \"modified_two_user\"\n[two_user]\nn1 = 2\nn2 = 3\nk = 2\nn_eve = 1\n";
        assert!(parse_scenario_str(text)
            .unwrap_err()
            .to_string()
            .contains("two_user.k"));
        let pw = "schema = 1\nscheme = \"pairwise\"\n[network]\nantennas = [2, 2, 2]\nn_eve = 1\nk2 = 2\n";
        assert!(parse_scenario_str(pw)
            .unwrap_err()
            .to_string()
            .contains("network.k2"));
        assert!(parse_scenario_str(&pw.replace("k2 = 2", "k2 = 3")).is_ok());
        assert!(parse_scenario_str(&MINIMAL.replace("schema = 1", "schema = 2")).is_err());
        assert!(parse_scenario_str(&MINIMAL.replace("schema = 1\n", "")).is_err());
        assert!(parse_scenario_str("schema = [").is_err());
    }
}

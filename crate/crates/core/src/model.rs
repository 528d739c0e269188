//! Configuration and result value types shared across the crate.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Dense complex matrix used for every pilot, channel, signal and covariance.
pub type ComplexMatrix = DMatrix<Complex<f64>>;

/// A single violated constraint. `field` names the offending config key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// An M-user full-duplex network with an N_E-antenna eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// N_1..N_M; `antennas.len()` is M.
    pub antennas: Vec<usize>,
    pub n_eve: usize,
    pub k1: usize,
    pub k2: usize,
    /// Eve's noise variance; kept at 1.
    pub eve_noise_var: f64,
}

impl NetworkConfig {
    /// Builds a config with the minimal pilot length K_1 = N_T − N_min.
    pub fn new(antennas: Vec<usize>, n_eve: usize, k2: usize) -> Self {
        let k1 = min_pilot_len(&antennas);
        Self {
            antennas,
            n_eve,
            k1,
            k2,
            eve_noise_var: 1.0,
        }
    }

    pub fn with_k1(mut self, k1: usize) -> Self {
        self.k1 = k1;
        self
    }

    /// Symmetric network with M users of N antennas each.
    pub fn symmetric(m: usize, n: usize, n_eve: usize, k2: usize) -> Self {
        Self::new(vec![n; m], n_eve, k2)
    }

    pub fn m(&self) -> usize {
        self.antennas.len()
    }

    pub fn n_total(&self) -> usize {
        self.antennas.iter().sum()
    }

    pub fn n_min(&self) -> usize {
        self.antennas.iter().copied().min().unwrap_or(0)
    }

    /// Row offset of user `i` in any N_T-row stack.
    pub fn offset(&self, i: usize) -> usize {
        self.antennas[..i].iter().sum()
    }

    /// Rank target for the stacked pilot matrix.
    pub fn pilot_rank(&self) -> usize {
        self.n_total() - self.n_min()
    }

    /// Lists every violated invariant; empty when the config is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.m() < 2 {
            out.push(Violation::new("antennas", "M < 2"));
        }
        for (i, &n) in self.antennas.iter().enumerate() {
            if n == 0 {
                out.push(Violation::new("antennas", format!("N_{} < 1", i + 1)));
            }
        }
        if self.m() >= 2 {
            let need = self.pilot_rank();
            if self.k1 < need {
                out.push(Violation::new(
                    "k1",
                    format!("K_1 < N_T−N_min (need ≥ {need})"),
                ));
            }
        }
        if self.eve_noise_var != 1.0 {
            out.push(Violation::new("eve_noise_var", "ω² must be 1"));
        }
        out
    }

    /// `validate`, folded into a `Result`.
    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    pub(crate) fn check_user(&self, i: usize) -> Result<()> {
        if i >= self.m() {
            return Err(Error::InvalidArgument(format!(
                "user index {i} out of range for M = {}",
                self.m()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_user(i)?;
        self.check_user(j)?;
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "pair ({i},{j}) is not distinct"
            )));
        }
        Ok(())
    }
}

/// K_1 default: N_T − N_min.
pub fn min_pilot_len(antennas: &[usize]) -> usize {
    let total: usize = antennas.iter().sum();
    total - antennas.iter().copied().min().unwrap_or(0)
}

/// Two nodes with square pilots of unequal lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoUserModifiedConfig {
    pub n1: usize,
    pub n2: usize,
    /// Coherence period length K.
    pub k_total: usize,
    pub n_eve: usize,
}

impl TwoUserModifiedConfig {
    pub fn new(n1: usize, n2: usize, k_total: usize, n_eve: usize) -> Self {
        Self {
            n1,
            n2,
            k_total,
            n_eve,
        }
    }

    pub fn n_total(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn delta_n(&self) -> usize {
        self.n2.saturating_sub(self.n1)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n1 == 0 {
            out.push(Violation::new("n1", "N_1 < 1"));
        }
        if self.n2 < self.n1 {
            out.push(Violation::new("n2", "N_2 < N_1"));
        }
        if self.k_total < self.n2 {
            out.push(Violation::new(
                "k_total",
                format!("K < N_2 (need ≥ {})", self.n2),
            ));
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    /// The equivalent M = 2 network, used for channel sampling.
    pub fn network(&self) -> NetworkConfig {
        NetworkConfig::new(vec![self.n1, self.n2], self.n_eve, 0)
    }
}

/// Ordered log2(σ²) points.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrGrid {
    points: Vec<f64>,
}

impl SnrGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegenerateGrid(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateGrid("non-finite point".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGrid(
                "points must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `start, start+step, ..., ≤ stop`.
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if step <= 0.0 {
            return Err(Error::DegenerateGrid("step must be positive".into()));
        }
        let n = ((stop - start) / step + 1e-9).floor() as i64 + 1;
        let pts = (0..n.max(0)).map(|k| start + step * k as f64).collect();
        Self::new(pts)
    }

    /// log2 σ² ∈ {12, 14, ..., 24}.
    pub fn high_snr() -> Self {
        Self::range(12.0, 24.0, 2.0).expect("static grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn sigma2(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|x| x.exp2())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for SnrGrid {
    fn default() -> Self {
        Self::high_snr()
    }
}

/// Integer DoF values keyed by formula identifier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DofReport {
    pub entries: BTreeMap<String, i64>,
}

impl DofReport {
    pub fn insert(&mut self, key: impl Into<String>, value: i64) {
        self.entries.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<i64> {
        self.entries.get(key).copied()
    }
}

/// One measured-versus-target comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Self {
            name: name.into(),
            measured,
            target,
            tolerance,
            passed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_valid() {
        let cfg = NetworkConfig::new(vec![1, 1], 1, 1).with_k1(1);
        assert!(cfg.validate().is_empty());
    }

    #[test]
    fn short_pilot_reported() {
        let cfg = NetworkConfig::new(vec![2, 2, 2], 4, 2).with_k1(3);
        let msgs: Vec<_> = cfg.validate().iter().map(|v| v.to_string()).collect();
        assert_eq!(msgs, vec!["K_1 < N_T−N_min (need ≥ 4)"]);
        assert_eq!(cfg.validate()[0].field, "k1");
    }

    #[test]
    fn single_user_rejected() {
        let cfg = NetworkConfig::new(vec![2], 0, 1).with_k1(1);
        let msgs: Vec<_> = cfg.validate().iter().map(|v| v.to_string()).collect();
        assert_eq!(msgs, vec!["M < 2"]);
    }

    #[test]
    fn zero_antennas_rejected() {
        let cfg = NetworkConfig::new(vec![0, 2], 0, 1);
        assert!(cfg.validate().iter().any(|v| v.message == "N_1 < 1"));
    }

    #[test]
    fn default_k1_is_minimal() {
        assert_eq!(NetworkConfig::new(vec![2, 3], 0, 0).k1, 3);
        assert_eq!(NetworkConfig::symmetric(3, 2, 0, 0).k1, 4);
    }

    #[test]
    fn modified_config_bounds() {
        assert!(TwoUserModifiedConfig::new(2, 3, 7, 6).validate().is_empty());
        assert_eq!(TwoUserModifiedConfig::new(3, 2, 7, 0).validate().len(), 1);
        assert_eq!(
            TwoUserModifiedConfig::new(2, 3, 2, 0).validate()[0].field,
            "k_total"
        );
    }

    #[test]
    fn grid_rules() {
        assert_eq!(
            SnrGrid::high_snr().points(),
            &[12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0]
        );
        assert!(SnrGrid::new(vec![1.0, 2.0]).is_err());
        assert!(SnrGrid::new(vec![1.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn check_result_band_is_closed() {
        assert!(CheckResult::new("x", 1.15, 1.0, 0.15 + 1e-12).passed);
        assert!(!CheckResult::new("x", 1.2, 1.0, 0.15).passed);
        assert!(CheckResult::new("x", 3.0, 3.0, 0.0).passed);
    }
}

//! Received-signal synthesis for both phases and the modified session.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{ComplexMatrix, NetworkConfig, TwoUserModifiedConfig};
use crate::numkernel::channels::ChannelRealization;
use crate::numkernel::linalg::{hstack, real, vstack};
use crate::numkernel::rng::{cn_matrix, substream};
use crate::pilots::{ModifiedPilotPair, PilotSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Signals {
    /// Y_i^(1), N_i × K_1.
    pub user_rx: Vec<ComplexMatrix>,
    /// Y_E^(1), N_E × K_1.
    pub eve_rx: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Signals {
    /// X_i, N_i × K_2.
    pub symbols: Vec<ComplexMatrix>,
    pub user_rx: Vec<ComplexMatrix>,
    pub eve_rx: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedSessionSignals {
    /// Node 1, slots 1..=N_2: σ·H_{1,2}·P_2 + W.
    pub y1_p1: ComplexMatrix,
    /// Node 2, slots 1..=N_1: σ·H_{2,1}·P_1 + W.
    pub y2_p1: ComplexMatrix,
    /// Node 1, slots N_2+1..=K.
    pub y1_p2: ComplexMatrix,
    /// Node 2, slots N_1+1..=K.
    pub y2_p2: ComplexMatrix,
    /// Eve over all K slots.
    pub eve_rx_full: ComplexMatrix,
    /// X_1, N_1 × (K − N_1).
    pub x1: ComplexMatrix,
    /// X_2, N_2 × (K − N_2).
    pub x2: ComplexMatrix,
}

fn noise<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let w = cn_matrix(rng, rows, cols);
    if scale == 1.0 {
        w
    } else {
        w * real(scale)
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_nan() || sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "σ must be finite and ≥ 0, got {sigma}"
        )));
    }
    Ok(())
}

/// Phase-1 receptions with unit noise.
pub fn synth_phase1(
    ch: &ChannelRealization,
    ps: &PilotSet,
    sigma: f64,
    seed: u64,
) -> Result<Phase1Signals> {
    synth_phase1_scaled(ch, ps, sigma, 1.0, seed)
}

/// Phase-1 receptions with noise standard deviation `noise_scale` (0 gives the noiseless model).
pub fn synth_phase1_scaled(
    ch: &ChannelRealization,
    ps: &PilotSet,
    sigma: f64,
    noise_scale: f64,
    seed: u64,
) -> Result<Phase1Signals> {
    check_sigma(sigma)?;
    if ps.antennas() != ch.antennas() {
        return Err(Error::ShapeMismatch(
            "pilot blocks do not match channel antennas".into(),
        ));
    }
    let k1 = ps.k1();
    let mut rng = substream(seed, "phase1-noise", 0);
    let user_rx = (0..ch.m())
        .map(|i| {
            let clean = ch.h_row(i) * ps.without(i) * real(sigma);
            clean + noise(&mut rng, ch.antennas()[i], k1, noise_scale)
        })
        .collect();
    let eve = &ch.eve_stacked;
    let eve_rx = eve * &ps.stacked * real(sigma) + noise(&mut rng, eve.nrows(), k1, noise_scale);
    Ok(Phase1Signals { user_rx, eve_rx })
}

/// Phase-2 receptions with fresh symbols and unit noise.
pub fn synth_phase2(
    ch: &ChannelRealization,
    cfg: &NetworkConfig,
    sigma: f64,
    seed: u64,
) -> Result<Phase2Signals> {
    synth_phase2_scaled(ch, cfg, sigma, 1.0, seed)
}

pub fn synth_phase2_scaled(
    ch: &ChannelRealization,
    cfg: &NetworkConfig,
    sigma: f64,
    noise_scale: f64,
    seed: u64,
) -> Result<Phase2Signals> {
    check_sigma(sigma)?;
    if cfg.antennas != ch.antennas() {
        return Err(Error::ShapeMismatch(
            "config does not match channel antennas".into(),
        ));
    }
    if cfg.k2 == 0 {
        return Err(Error::InvalidArgument("phase 2 needs K_2 ≥ 1".into()));
    }
    let mut rng = substream(seed, "phase2", 0);
    let symbols = synth_symbols(cfg, &mut rng);
    let user_rx = (0..cfg.m())
        .map(|i| {
            let mut y = noise(&mut rng, cfg.antennas[i], cfg.k2, noise_scale);
            for (j, x) in symbols.iter().enumerate().filter(|&(j, _)| j != i) {
                y += ch.h(i, j) * x * real(sigma);
            }
            y
        })
        .collect();
    let x_all = vstack(&symbols.iter().collect::<Vec<_>>())?;
    let eve_rx =
        &ch.eve_stacked * x_all * real(sigma) + noise(&mut rng, cfg.n_eve, cfg.k2, noise_scale);
    Ok(Phase2Signals {
        symbols,
        user_rx,
        eve_rx,
    })
}

fn synth_symbols<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Vec<ComplexMatrix> {
    cfg.antennas
        .iter()
        .map(|&n| cn_matrix(rng, n, cfg.k2))
        .collect()
}

pub fn synth_modified_session(
    cfg: &TwoUserModifiedConfig,
    pp: &ModifiedPilotPair,
    ch: &ChannelRealization,
    sigma: f64,
    seed: u64,
) -> Result<ModifiedSessionSignals> {
    synth_modified_session_scaled(cfg, pp, ch, sigma, 1.0, seed)
}

/// Modified two-user session. Node 1 sends [P_1, X_1], node 2 sends [P_2, X_2], both over K slots.
pub fn synth_modified_session_scaled(
    cfg: &TwoUserModifiedConfig,
    pp: &ModifiedPilotPair,
    ch: &ChannelRealization,
    sigma: f64,
    noise_scale: f64,
    seed: u64,
) -> Result<ModifiedSessionSignals> {
    cfg.check()?;
    check_sigma(sigma)?;
    let (n1, n2, k) = (cfg.n1, cfg.n2, cfg.k_total);
    if ch.antennas() != [n1, n2] || ch.eve_stacked.nrows() != cfg.n_eve {
        return Err(Error::ShapeMismatch(
            "channel does not match the two-user config".into(),
        ));
    }
    if pp.p1.shape() != (n1, n1) || pp.p2.shape() != (n2, n2) {
        return Err(Error::ShapeMismatch(
            "square pilots do not match N_1, N_2".into(),
        ));
    }
    let mut rng = substream(seed, "modified", 0);
    let x1 = cn_matrix(&mut rng, n1, k - n1);
    let x2 = cn_matrix(&mut rng, n2, k - n2);
    let s = real(sigma);
    let y1_p1 = ch.h(0, 1) * &pp.p2 * s + noise(&mut rng, n1, n2, noise_scale);
    let y2_p1 = ch.h(1, 0) * &pp.p1 * s + noise(&mut rng, n2, n1, noise_scale);
    let y1_p2 = ch.h(0, 1) * &x2 * s + noise(&mut rng, n1, k - n2, noise_scale);
    let y2_p2 = ch.h(1, 0) * &x1 * s + noise(&mut rng, n2, k - n1, noise_scale);
    let tx = modified_transmit(pp, &x1, &x2)?;
    let eve_rx_full = &ch.eve_stacked * tx * s + noise(&mut rng, cfg.n_eve, k, noise_scale);
    Ok(ModifiedSessionSignals {
        y1_p1,
        y2_p1,
        y1_p2,
        y2_p2,
        eve_rx_full,
        x1,
        x2,
    })
}

/// The N_T × K transmit matrix [[P_1, X_1], [P_2, X_2]] as seen by Eve.
pub fn modified_transmit(
    pp: &ModifiedPilotPair,
    x1: &ComplexMatrix,
    x2: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let top = hstack(&[&pp.p1, x1])?;
    let bottom = hstack(&[&pp.p2, x2])?;
    vstack(&[&top, &bottom])
}

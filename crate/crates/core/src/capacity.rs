//! Gaussian secret-key-capacity terms, in bits per coherence period.
//!
//! Phase 1 is evaluated exactly from the pilot covariances. Phase-2 terms are
//! channel averages and use Monte Carlo with common random numbers across
//! SNR points: draw `k` of every point comes from substream `k`, so the
//! slope of a curve is not polluted by independent noise at each point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ComplexMatrix, NetworkConfig, SnrGrid, TwoUserModifiedConfig};
use crate::numkernel::channels::{sample_channels_with, ChannelRealization};
use crate::numkernel::linalg::{
    block_diag, identity, kron, logdet_gram_plus_identity, logdet_hpd, real, vec_col,
};
use crate::numkernel::rng::{cn_matrix, substream};
use crate::pilots::PilotSet;

/// Default Monte Carlo sample count per grid point.
pub const DEFAULT_MC_SAMPLES: usize = 2000;

/// Values of one capacity term over an SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub grid: SnrGrid,
    pub values: Vec<f64>,
    /// 0 for exact curves.
    pub mc_samples: usize,
    pub mc_stderr: Vec<f64>,
}

impl CapacityCurve {
    pub fn exact(grid: SnrGrid, values: Vec<f64>) -> Self {
        let n = values.len();
        Self {
            grid,
            values,
            mc_samples: 0,
            mc_stderr: vec![0.0; n],
        }
    }
}

/// Monte Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

// ---------------------------------------------------------------------------
// phase 1

/// S_i = Σ_{l≠i} P_l^T P_l^*, K_1 × K_1.
fn pilot_gram_without(ps: &PilotSet, i: usize) -> ComplexMatrix {
    let p = ps.without(i);
    p.transpose() * p.conjugate()
}

/// R_{Y,i} = (σ²S_i + I_{K_1}) ⊗ I_{N_i}: covariance of vec(Y_i^(1)).
pub fn phase1_cov_single(ps: &PilotSet, i: usize, sigma2: f64) -> ComplexMatrix {
    let k1 = ps.k1();
    let inner = pilot_gram_without(ps, i) * real(sigma2) + identity(k1);
    kron(&inner, &identity(ps.blocks[i].nrows()))
}

/// R'_{Y,j} = I_{N_j} ⊗ (σ²S_j + I_{K_1}): covariance of vec(Y_j^(1)T).
pub fn phase1_cov_single_transposed(ps: &PilotSet, j: usize, sigma2: f64) -> ComplexMatrix {
    let k1 = ps.k1();
    let inner = pilot_gram_without(ps, j) * real(sigma2) + identity(k1);
    kron(&identity(ps.blocks[j].nrows()), &inner)
}

/// Joint covariance of [vec(Y_i^(1)); vec(Y_j^(1)T)].
///
/// The off-diagonal block σ²·P_j^T ⊗ P_i^* comes from the reciprocal channel
/// H_{i,j} = H_{j,i}^T, which appears in both observations.
pub fn phase1_cov_joint(ps: &PilotSet, i: usize, j: usize, sigma2: f64) -> ComplexMatrix {
    let a = phase1_cov_single(ps, i, sigma2);
    let d = phase1_cov_single_transposed(ps, j, sigma2);
    let cross = kron(&ps.blocks[j].transpose(), &ps.blocks[i].conjugate()) * real(sigma2);
    let n = a.nrows();
    let mut out = block_diag(&[&a, &d]);
    out.view_mut((0, n), cross.shape()).copy_from(&cross);
    out.view_mut((n, 0), (cross.ncols(), cross.nrows()))
        .copy_from(&cross.adjoint());
    out
}

fn check_pilot_pair(ps: &PilotSet, i: usize, j: usize) -> Result<()> {
    let m = ps.m();
    if i >= m || j >= m || i == j {
        return Err(Error::InvalidArgument(format!(
            "pair ({i},{j}) invalid for M = {m}"
        )));
    }
    Ok(())
}

/// Exact phase-1 secret-key capacity between users i and j.
pub fn phase1_skc_exact(ps: &PilotSet, i: usize, j: usize, sigma2: f64) -> Result<f64> {
    check_pilot_pair(ps, i, j)?;
    let k1 = ps.k1();
    let ni = ps.blocks[i].nrows() as f64;
    let nj = ps.blocks[j].nrows() as f64;
    // |A ⊗ I_n| = |A|^n, so the single-user terms stay K_1 × K_1
    let gi = pilot_gram_without(ps, i) * real(sigma2) + identity(k1);
    let gj = pilot_gram_without(ps, j) * real(sigma2) + identity(k1);
    let joint = phase1_cov_joint(ps, i, j, sigma2);
    Ok(ni * logdet_hpd(&gi)? + nj * logdet_hpd(&gj)? - logdet_hpd(&joint)?)
}

pub fn phase1_curve(ps: &PilotSet, i: usize, j: usize, grid: &SnrGrid) -> Result<CapacityCurve> {
    let values = grid
        .sigma2()
        .map(|s2| phase1_skc_exact(ps, i, j, s2))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityCurve::exact(grid.clone(), values))
}

/// 0/1 covariance of h = [vec(H_i); vec(H_j^T)] read off a realization.
///
/// Two entries are correlated exactly when they are the same channel
/// coefficient, which reciprocity makes bit-identical in the realization.
pub fn joint_channel_covariance(ch: &ChannelRealization, i: usize, j: usize) -> ComplexMatrix {
    let hi = vec_col(&ch.h_row(i));
    let hj = vec_col(&ch.h_row(j).transpose());
    let all: Vec<_> = hi.iter().chain(hj.iter()).copied().collect();
    let n = all.len();
    ComplexMatrix::from_fn(n, n, |r, c| real(if all[r] == all[c] { 1.0 } else { 0.0 }))
}

/// σ²·A·R_h·A^H + I with A = diag(P_(i)^T ⊗ I_{N_i}, I_{N_j} ⊗ P_(j)^T).
pub fn phase1_cov_joint_from_channels(
    ps: &PilotSet,
    r_h: &ComplexMatrix,
    i: usize,
    j: usize,
    sigma2: f64,
) -> ComplexMatrix {
    let ni = ps.blocks[i].nrows();
    let nj = ps.blocks[j].nrows();
    let a_i = kron(&ps.without(i).transpose(), &identity(ni));
    let a_j = kron(&identity(nj), &ps.without(j).transpose());
    let a = block_diag(&[&a_i, &a_j]);
    &a * r_h * a.adjoint() * real(sigma2) + identity(a.nrows())
}

// ---------------------------------------------------------------------------
// Monte Carlo machinery

/// Runs `draw` for every sample index and averages per grid point.
///
/// Samples are evaluated in parallel into a vector and summed in index order,
/// so the result does not depend on the worker count.
fn mc_points<F>(
    n_samples: usize,
    seed: u64,
    tag: &str,
    points: usize,
    draw: F,
) -> Result<Vec<Estimate>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be ≥ 1".into()));
    }
    let rows: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|k| draw(&mut substream(seed, tag, k as u64)))
        .collect::<Result<_>>()?;
    let n = n_samples as f64;
    Ok((0..points)
        .map(|p| {
            let mean = rows.iter().map(|r| r[p]).sum::<f64>() / n;
            let stderr = if n_samples > 1 {
                let var = rows.iter().map(|r| (r[p] - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            Estimate { mean, stderr }
        })
        .collect())
}

fn to_curve(grid: &SnrGrid, n_samples: usize, est: Vec<Estimate>) -> CapacityCurve {
    CapacityCurve {
        grid: grid.clone(),
        values: est.iter().map(|e| e.mean).collect(),
        mc_samples: n_samples,
        mc_stderr: est.iter().map(|e| e.stderr).collect(),
    }
}

// ---------------------------------------------------------------------------
// phase 2

/// K_2·[log2|σ²R_{H,i}+I| + log2|σ²R_{H,j}+I| − log2|σ²R_{H,(i,j)}+I|] for one realization.
pub fn cij_single_draw(
    ch: &ChannelRealization,
    k2: usize,
    i: usize,
    j: usize,
    sigma2: f64,
) -> Result<f64> {
    let a = logdet_gram_plus_identity(&ch.h_row(i), sigma2)?;
    let b = logdet_gram_plus_identity(&ch.h_row(j), sigma2)?;
    // an empty l ∉ {i,j} set leaves the zero matrix, log2|I| = 0
    let c = logdet_gram_plus_identity(&ch.h_pair_row(i, j), sigma2)?;
    Ok(k2 as f64 * (a + b - c))
}

pub fn cij_curve(
    cfg: &NetworkConfig,
    i: usize,
    j: usize,
    grid: &SnrGrid,
    n_samples: usize,
    seed: u64,
) -> Result<CapacityCurve> {
    let est = cij_points(
        cfg,
        i,
        j,
        &grid.sigma2().collect::<Vec<_>>(),
        n_samples,
        seed,
    )?;
    Ok(to_curve(grid, n_samples, est))
}

fn cij_points(
    cfg: &NetworkConfig,
    i: usize,
    j: usize,
    sigma2: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    cfg.check_pair(i, j)?;
    mc_points(n_samples, seed, "mc-cij", sigma2.len(), |rng| {
        let ch = sample_channels_with(cfg, rng);
        sigma2
            .iter()
            .map(|&s2| cij_single_draw(&ch, cfg.k2, i, j, s2))
            .collect()
    })
}

/// Phase-2 encryption capacity C_ij at one power.
pub fn cij_phase2_mc(
    cfg: &NetworkConfig,
    i: usize,
    j: usize,
    sigma2: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(cij_points(cfg, i, j, &[sigma2], n_samples, seed)?[0])
}

// ---------------------------------------------------------------------------
// modified two-user scheme

fn ckey0_points(
    cfg: &TwoUserModifiedConfig,
    sigma2: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    cfg.check()?;
    let (n1, n2, k) = (cfg.n1, cfg.n2, cfg.k_total);
    mc_points(n_samples, seed, "mc-ckey0", sigma2.len(), |rng| {
        let h12 = cn_matrix(rng, n1, n2);
        let h21 = h12.transpose();
        sigma2
            .iter()
            .map(|&s2| {
                Ok((k - n1) as f64 * logdet_gram_plus_identity(&h21, s2)?
                    + (k - n2) as f64 * logdet_gram_plus_identity(&h12, s2)?)
            })
            .collect()
    })
}

/// C_key,0 of the modified scheme at one power.
pub fn ckey0_modified_mc(
    cfg: &TwoUserModifiedConfig,
    sigma2: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(ckey0_points(cfg, &[sigma2], n_samples, seed)?[0])
}

pub fn ckey0_curve(
    cfg: &TwoUserModifiedConfig,
    grid: &SnrGrid,
    n_samples: usize,
    seed: u64,
) -> Result<CapacityCurve> {
    let est = ckey0_points(cfg, &grid.sigma2().collect::<Vec<_>>(), n_samples, seed)?;
    Ok(to_curve(grid, n_samples, est))
}

// ---------------------------------------------------------------------------
// conditional Gaussian entropy

/// mk·log2(eπ): entropy of an m × k block of unit complex Gaussian noise.
pub fn noise_entropy(m: usize, k: usize) -> f64 {
    (m * k) as f64 * (std::f64::consts::E * std::f64::consts::PI).log2()
}

fn entropy_points(
    m: usize,
    n: usize,
    k: usize,
    sigma2: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if m == 0 || n == 0 || k == 0 {
        return Err(Error::InvalidArgument("m, n, k must be ≥ 1".into()));
    }
    let floor = noise_entropy(m, k);
    mc_points(n_samples, seed, "mc-entropy", sigma2.len(), |rng| {
        let h = cn_matrix(rng, m, n);
        sigma2
            .iter()
            .map(|&s2| Ok(floor + k as f64 * logdet_gram_plus_identity(&h, s2)?))
            .collect()
    })
}

/// h(Y | H) for Y = σ·H·X + W, H m × n, X n × k, all unit Gaussian.
pub fn entropy_cond_gaussian_mc(
    m: usize,
    n: usize,
    k: usize,
    sigma2: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(entropy_points(m, n, k, &[sigma2], n_samples, seed)?[0])
}

pub fn entropy_curve(
    m: usize,
    n: usize,
    k: usize,
    grid: &SnrGrid,
    n_samples: usize,
    seed: u64,
) -> Result<CapacityCurve> {
    let est = entropy_points(m, n, k, &grid.sigma2().collect::<Vec<_>>(), n_samples, seed)?;
    Ok(to_curve(grid, n_samples, est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::channels::sample_channels;
    use crate::numkernel::linalg::{max_abs, rank};
    use crate::pilots::build_pilots;
    use nalgebra::Complex;

    fn ones_pilot() -> PilotSet {
        PilotSet::from_stacked(
            &[1, 1],
            ComplexMatrix::from_element(2, 1, Complex::new(1.0, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn phase1_hand_value() {
        let got = phase1_skc_exact(&ones_pilot(), 0, 1, 1.0).unwrap();
        let want = 2.0 - 3f64.log2();
        assert!((got - want).abs() < 1e-12, "{got}");
        assert_eq!(phase1_skc_exact(&ones_pilot(), 0, 1, 0.0).unwrap(), 0.0);
        assert!(phase1_skc_exact(&ones_pilot(), 0, 0, 1.0).is_err());
    }

    #[test]
    fn joint_cov_matches_channel_model() {
        for (ants, seed) in [(vec![1, 1], 1), (vec![2, 3], 2), (vec![1, 2, 2], 3)] {
            let cfg = NetworkConfig::new(ants, 0, 1);
            let ps = build_pilots(&cfg, seed).unwrap();
            let ch = sample_channels(&cfg, seed);
            for (i, j) in [(0, 1), (1, 0)] {
                let r_h = joint_channel_covariance(&ch, i, j);
                let explicit = phase1_cov_joint_from_channels(&ps, &r_h, i, j, 3.0);
                let closed = phase1_cov_joint(&ps, i, j, 3.0);
                assert!(max_abs(&(explicit - closed)) < 1e-10);
            }
        }
    }

    #[test]
    fn joint_channel_deficiency() {
        let cfg = NetworkConfig::new(vec![2, 1, 3], 0, 1);
        let ch = sample_channels(&cfg, 4);
        let r_h = joint_channel_covariance(&ch, 0, 2);
        let dim = 2 * 4 + 3 * 3;
        assert_eq!(r_h.nrows(), dim);
        assert_eq!(rank(&r_h), dim - 2 * 3);
    }

    #[test]
    fn cij_two_users_ignores_third_term() {
        let cfg = NetworkConfig::new(vec![1, 1], 0, 1);
        let ch = sample_channels(&cfg, 1);
        let h = ch.h(0, 1)[(0, 0)].norm_sqr();
        let got = cij_single_draw(&ch, 1, 0, 1, 2.0).unwrap();
        assert!((got - 2.0 * (2.0 * h + 1.0).log2()).abs() < 1e-12);
        assert_eq!(cij_phase2_mc(&cfg, 0, 1, 0.0, 10, 1).unwrap().mean, 0.0);
    }

    #[test]
    fn mc_is_reproducible() {
        let cfg = NetworkConfig::symmetric(3, 2, 0, 2);
        let a = cij_phase2_mc(&cfg, 0, 1, 100.0, 64, 9).unwrap();
        let b = cij_phase2_mc(&cfg, 0, 1, 100.0, 64, 9).unwrap();
        assert_eq!(a, b);
        let c = cij_phase2_mc(&cfg, 0, 1, 100.0, 64, 10).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn ckey0_and_entropy_at_zero_power() {
        let cfg = TwoUserModifiedConfig::new(2, 3, 7, 1);
        assert_eq!(ckey0_modified_mc(&cfg, 0.0, 5, 1).unwrap().mean, 0.0);
        let e = entropy_cond_gaussian_mc(2, 3, 4, 0.0, 5, 1).unwrap();
        assert!((e.mean - 8.0 * (std::f64::consts::E * std::f64::consts::PI).log2()).abs() < 1e-12);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(entropy_cond_gaussian_mc(1, 1, 1, 1.0, 0, 1).is_err());
    }
}

//! Slope fitting, oracle suites and scheme comparison.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::capacity::{
    cij_curve, ckey0_curve, entropy_curve, joint_channel_covariance, phase1_cov_joint,
    phase1_cov_single, phase1_curve, CapacityCurve,
};
use crate::dofcalc::{self as dc, DofScenario, FreedomTerm, OracleDims, Scheme};
use crate::error::{Error, Result};
use crate::model::{CheckResult, ComplexMatrix, NetworkConfig, SnrGrid, TwoUserModifiedConfig};
use crate::numkernel::channels::sample_channels_with;
use crate::numkernel::linalg::{
    eig_growth_count, rank, vstack, DEFAULT_GROWTH_FRACTION, DEFAULT_POWER_RATIO,
};
use crate::numkernel::rng::{cn_matrix, substream};
use crate::pilots::{build_pairwise_matrix, PilotSet};

/// Least-squares line through a capacity curve, against log2 σ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} grid points but {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 3 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateGrid("all grid points are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
    })
}

pub fn fit_slope(curve: &CapacityCurve) -> Result<SlopeFit> {
    fit_line(curve.grid.points(), &curve.values)
}

/// max(0.15, 3% of |target|).
pub fn default_slope_tolerance(target: f64) -> f64 {
    (0.03 * target.abs()).max(0.15)
}

pub fn verify_slope(
    name: &str,
    curve: &CapacityCurve,
    target_dof: i64,
    tol: f64,
) -> Result<CheckResult> {
    let fit = fit_slope(curve)?;
    Ok(CheckResult::new(name, fit.slope, target_dof as f64, tol))
}

// ---------------------------------------------------------------------------
// slope suites

/// Slope checks for an all-user network on the pair (i, j).
///
/// Phase-1 SKC against N_iN_j, C_ij against its DoF, and h(Y_i | H_i) against
/// min(N_i, N_T − N_i)·K_2 through the conditional-Gaussian entropy.
pub fn network_slope_suite(
    cfg: &NetworkConfig,
    ps: &PilotSet,
    pair: (usize, usize),
    grid: &SnrGrid,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let (i, j) = pair;
    let s = DofScenario::new(cfg.clone(), i, j)?;
    let mut out = Vec::new();
    let p1_target = dc::dof_phase1(cfg.antennas[i], cfg.antennas[j]);
    let p1 = phase1_curve(ps, i, j, grid)?;
    out.push(verify_slope(
        "slope/phase1_skc",
        &p1,
        p1_target,
        default_slope_tolerance(p1_target as f64),
    )?);
    if cfg.k2 > 0 {
        let target = dc::dof_cij(&s);
        let c = cij_curve(cfg, i, j, grid, n_samples, seed)?;
        out.push(verify_slope(
            "slope/cij",
            &c,
            target,
            default_slope_tolerance(target as f64),
        )?);
        let ni = cfg.antennas[i];
        let h = entropy_curve(ni, cfg.n_total() - ni, cfg.k2, grid, n_samples, seed)?;
        let target = dc::dof_entropy_terms(&s).h_yi_given_hi;
        out.push(verify_slope(
            "slope/h_yi_given_hi",
            &h,
            target,
            default_slope_tolerance(target as f64),
        )?);
    }
    Ok(out)
}

/// Slope check of C_key,0 for the modified scheme.
pub fn modified_slope_suite(
    cfg: &TwoUserModifiedConfig,
    grid: &SnrGrid,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let target = dc::dof_modified_terms(cfg)?.term1;
    let c = ckey0_curve(cfg, grid, n_samples, seed)?;
    let mut out = vec![verify_slope(
        "slope/c_key0",
        &c,
        target,
        default_slope_tolerance(target as f64),
    )?];
    let k2 = cfg.k_total - cfg.n2;
    if k2 > 0 {
        // node 1 hears X_2 through H_{1,2}: h(Y_1^(2) | H_{1,2})
        let h = entropy_curve(cfg.n1, cfg.n2, k2, grid, n_samples, seed)?;
        let target = dc::dof_modified_terms(cfg)?.h_y1;
        out.push(verify_slope(
            "slope/h_y1_given_h12",
            &h,
            target,
            default_slope_tolerance(target as f64),
        )?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// eigenvalue growth

/// σ² at the low end of the eigenvalue-growth comparison.
pub const GROWTH_SIGMA2_LO: f64 = 1024.0;

/// Growth count of R_{Y,i} and of the joint R'_{Y,(i,j)}, for every pair i < j.
pub fn eig_growth_suite(cfg: &NetworkConfig, ps: &PilotSet) -> Result<Vec<CheckResult>> {
    let lo = GROWTH_SIGMA2_LO;
    let hi = lo * DEFAULT_POWER_RATIO;
    let nt = cfg.n_total();
    let count = |a: &ComplexMatrix, b: &ComplexMatrix| {
        eig_growth_count(a, b, DEFAULT_POWER_RATIO, DEFAULT_GROWTH_FRACTION)
    };
    let mut out = Vec::new();
    for i in 0..cfg.m() {
        let ni = cfg.antennas[i];
        let got = count(&phase1_cov_single(ps, i, lo), &phase1_cov_single(ps, i, hi))?;
        out.push(CheckResult::new(
            format!("eig/single/{}", i + 1),
            got as f64,
            (ni * (nt - ni)) as f64,
            0.0,
        ));
    }
    for (i, j) in dc::unordered_pairs(cfg.m()) {
        let (ni, nj) = (cfg.antennas[i], cfg.antennas[j]);
        let got = count(
            &phase1_cov_joint(ps, i, j, lo),
            &phase1_cov_joint(ps, i, j, hi),
        )?;
        let target = ni * (nt - ni) + nj * (nt - nj) - ni * nj;
        out.push(CheckResult::new(
            format!("eig/joint/{}-{}", i + 1, j + 1),
            got as f64,
            target as f64,
            0.0,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// rank oracles

/// Outcome of the rank checks on one draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankDraw {
    pub rh_deficiency: bool,
    pub channel_sum: bool,
    pub stacked_eve: bool,
    /// `None` when M < 3.
    pub p_pair: Option<bool>,
}

/// One draw of the probability-one rank statements.
pub fn rank_draw(cfg: &NetworkConfig, seed: u64, draw: u64) -> Result<RankDraw> {
    let mut rng = substream(seed, "rank-oracle", draw);
    let ch = sample_channels_with(cfg, &mut rng);
    let m = cfg.m();
    let nt = cfg.n_total();
    let ants = &cfg.antennas;

    let rh_deficiency = dc::unordered_pairs(m).into_iter().all(|(i, j)| {
        let r_h = joint_channel_covariance(&ch, i, j);
        r_h.nrows() - rank(&r_h) == ants[i] * ants[j]
    });
    let channel_sum = (0..m).all(|i| {
        let h = ch.h_row(i);
        rank(&(&h * h.adjoint())) == ants[i].min(nt - ants[i])
    });
    let stacked_eve = dc::ordered_pairs(m)
        .map(|(i, j)| {
            let s = vstack(&[ch.h(i, j), &ch.eve(j)])?;
            Ok(rank(&s) == (cfg.n_eve + ants[i]).min(ants[j]))
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|ok| ok);
    let p_pair = if m >= 3 {
        let k1 = ants.iter().copied().max().unwrap_or(0);
        let blocks: Vec<ComplexMatrix> = ants.iter().map(|&n| cn_matrix(&mut rng, n, k1)).collect();
        let pp = build_pairwise_matrix(cfg, &blocks)?;
        Some(rank(&pp.matrix) == nt)
    } else {
        None
    };
    Ok(RankDraw {
        rh_deficiency,
        channel_sum,
        stacked_eve,
        p_pair,
    })
}

/// Pass counts of each rank check over `n_draws` draws; target is every draw.
pub fn rank_oracle_suite(
    cfg: &NetworkConfig,
    seed: u64,
    n_draws: usize,
) -> Result<Vec<CheckResult>> {
    cfg.check()?;
    let draws: Vec<RankDraw> = (0..n_draws as u64)
        .into_par_iter()
        .map(|k| rank_draw(cfg, seed, k))
        .collect::<Result<_>>()?;
    let count = |f: &dyn Fn(&RankDraw) -> bool| draws.iter().filter(|d| f(d)).count() as f64;
    let target = n_draws as f64;
    let mut out = vec![
        CheckResult::new(
            "rank/rh_deficiency",
            count(&|d| d.rh_deficiency),
            target,
            0.0,
        ),
        CheckResult::new("rank/channel_sum", count(&|d| d.channel_sum), target, 0.0),
        CheckResult::new("rank/stacked_eve", count(&|d| d.stacked_eve), target, 0.0),
    ];
    if cfg.m() >= 3 {
        out.push(CheckResult::new(
            "rank/p_pair",
            count(&|d| d.p_pair == Some(true)),
            target,
            0.0,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// identity suite

/// Parameter ranges for the identity suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityGrid {
    pub m_min: usize,
    pub m_max: usize,
    pub n_max: usize,
    pub ne_max: usize,
    pub k2_max: usize,
    /// Largest M for the symmetric-network identities, which need large M to bite.
    pub symmetric_m_max: usize,
    /// Two-user grid: N_1 ≤ N_2 ≤ `two_user_n_max`.
    pub two_user_n_max: usize,
    pub two_user_ne_max: usize,
    pub two_user_k_max: usize,
}

impl Default for IdentityGrid {
    fn default() -> Self {
        Self {
            m_min: 2,
            m_max: 5,
            n_max: 3,
            ne_max: 12,
            k2_max: 8,
            symmetric_m_max: 10,
            two_user_n_max: 4,
            two_user_ne_max: 10,
            two_user_k_max: 10,
        }
    }
}

/// Every identity the suite reports, in output order.
pub const IDENTITY_MANIFEST: &[&str] = &[
    "gap_consistency",
    "lower_decomposition",
    "monotone_k2_lower_below_nmin",
    "monotone_modified",
    "monotone_ne_lower",
    "monotone_original",
    "modified_lower_from_terms",
    "modified_lower_order",
    "modified_minus_original",
    "modified_up_equals_low",
    "oracle_joint_i_e",
    "oracle_joint_i_j_e",
    "oracle_modified_term2",
    "oracle_modified_term3",
    "oracle_modified_term4",
    "oracle_ye_given_hep",
    "pairwise_gap",
    "pairwise_symmetric",
    "region_boundary_modified",
    "region_boundary_original",
    "symmetric_eq69",
    "symmetric_gap_table",
    "symmetric_k2_eq_n",
    "symmetric_large_m",
    "symmetric_zero_gap_k2_le_n",
    "two_user_gap_21",
    "two_user_original",
    "upper_from_entropy_terms",
    "upper_symmetric",
];

#[derive(Debug, Default, Clone)]
struct Tally {
    /// name → (cases, violations)
    counts: BTreeMap<&'static str, (usize, usize)>,
    tamper: Option<&'static str>,
}

impl Tally {
    fn with_tamper(tamper: Option<&'static str>) -> Self {
        Self {
            counts: BTreeMap::new(),
            tamper,
        }
    }

    /// Records one case; a tampered identity sees its left side shifted by one.
    fn eq(&mut self, name: &'static str, lhs: i64, rhs: i64) {
        let lhs = if self.tamper == Some(name) {
            lhs + 1
        } else {
            lhs
        };
        let e = self.counts.entry(name).or_default();
        e.0 += 1;
        if lhs != rhs {
            e.1 += 1;
        }
    }

    fn holds(&mut self, name: &'static str, ok: bool) {
        self.eq(name, i64::from(ok), 1);
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (k, (c, v)) in other.counts {
            let e = self.counts.entry(k).or_default();
            e.0 += c;
            e.1 += v;
        }
        self
    }
}

/// All antenna vectors of length `m` over 1..=n_max.
fn antenna_vectors(m: usize, n_max: usize) -> Vec<Vec<usize>> {
    (0..m).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (1..=n_max).map(move |n| {
                    let mut w = v.clone();
                    w.push(n);
                    w
                })
            })
            .collect()
    })
}

fn scenario(ants: &[usize], ne: usize, k2: usize, i: usize, j: usize) -> DofScenario {
    DofScenario {
        cfg: NetworkConfig::new(ants.to_vec(), ne, k2),
        i,
        j,
    }
}

fn network_case(
    t: &mut Tally,
    ants: &[usize],
    ne: usize,
    k2: usize,
    i: usize,
    j: usize,
    grid: &IdentityGrid,
) {
    let s = scenario(ants, ne, k2, i, j);
    let lower = dc::dof_phase2_lower(&s);
    let upper = dc::dof_phase2_upper(&s);
    t.eq("gap_consistency", upper - lower, dc::dof_gap(&s));
    t.eq(
        "lower_decomposition",
        lower,
        dc::dof_cij(&s) - dc::dof_leakage(&s),
    );
    t.eq(
        "upper_from_entropy_terms",
        upper,
        dc::dof_phase2_upper_from_terms(&s),
    );
    t.eq("upper_symmetric", upper, dc::dof_phase2_upper(&s.swapped()));
    let dims = OracleDims::Network(s.clone());
    for (name, term) in [
        ("oracle_ye_given_hep", FreedomTerm::YeGivenHep),
        ("oracle_joint_i_e", FreedomTerm::JointIE),
        ("oracle_joint_i_j_e", FreedomTerm::JointIJE),
    ] {
        let a = dc::freedom_count_oracle(term, &dims).expect("network term");
        let b = dc::closed_form_term(term, &dims).expect("network term");
        t.eq(name, a, b);
    }
    if ne < grid.ne_max {
        let next = scenario(ants, ne + 1, k2, i, j);
        t.holds("monotone_ne_lower", dc::dof_phase2_lower(&next) <= lower);
    }
    let n_min = ants.iter().copied().min().unwrap_or(0);
    if k2 < n_min {
        let next = scenario(ants, ne, k2 + 1, i, j);
        t.holds(
            "monotone_k2_lower_below_nmin",
            dc::dof_phase2_lower(&next) >= lower,
        );
    }
    if ants.len() == 2 && ants[i] <= ants[j] {
        let (n1, n2) = (ants[i], ants[j]);
        let orig = dc::dof_two_user_original(n1, n2, ne, k2).expect("n1 ≤ n2");
        t.eq("two_user_original", lower, orig);
        t.eq("two_user_original", upper, orig);
        let dk2 = k2.saturating_sub(n1) as i64;
        let dn = (n2 - n1) as i64;
        t.eq(
            "two_user_gap_21",
            dc::dof_gap(&s.swapped()),
            dk2 * (ne as i64).min(dn),
        );
    }
}

fn symmetric_case(t: &mut Tally, m: usize, n: usize, ne: usize, k2: usize) {
    let s = scenario(&vec![n; m], ne, k2, 0, 1);
    let lower = dc::dof_phase2_lower(&s);
    let upper = dc::dof_phase2_upper(&s);
    let gap = dc::dof_gap(&s);
    if ne >= m * n {
        t.eq(
            "symmetric_eq69",
            dc::dof_phase2_lower_plus(&s),
            dc::symmetric_lower_plus_large_eve(m, n, k2),
        );
        if m >= 4 {
            t.eq("symmetric_eq69", upper, 0);
        }
    }
    if m >= dc::symmetric_zero_gap_m(n, ne) {
        t.eq("symmetric_large_m", lower, 0);
        t.eq("symmetric_large_m", upper, 0);
    }
    if k2 == n && m <= 3 {
        let want = if m == 2 { 2 * n * n } else { n * n } as i64;
        t.eq("symmetric_k2_eq_n", lower, want);
        t.eq("symmetric_k2_eq_n", upper, want);
    }
    t.eq("symmetric_gap_table", gap, dc::symmetric_gap(m, n, ne, k2));
    if k2 <= n {
        t.eq("symmetric_zero_gap_k2_le_n", gap, 0);
    }
}

fn two_user_case(t: &mut Tally, n1: usize, n2: usize, ne: usize, k: usize, grid: &IdentityGrid) {
    let c = TwoUserModifiedConfig::new(n1, n2, k, ne);
    let d = dc::dof_modified_two_user(&c).expect("valid two-user config");
    let (i_ne, dn) = (ne as i64, (n2 - n1) as i64);
    let tail = (k as i64 - (n1 + n2) as i64).max(0);
    t.eq("modified_up_equals_low", d.upper, d.lower_12);
    let (l12, l21) = dc::modified_lower_from_terms(&c).expect("valid");
    t.eq("modified_lower_from_terms", l12, d.lower_12);
    t.eq("modified_lower_from_terms", l21, d.lower_21);
    t.eq(
        "modified_lower_order",
        d.lower_12 - d.lower_21,
        i_ne.min(dn) * tail,
    );
    let orig = dc::dof_two_user_original(n1, n2, ne, k - n2).expect("n1 ≤ n2");
    t.eq(
        "modified_minus_original",
        d.lower_12 - orig,
        (n1 * (n2 - n1)) as i64,
    );

    let dims = OracleDims::Modified(c);
    for (name, term) in [
        ("oracle_modified_term2", FreedomTerm::ModifiedTerm2),
        ("oracle_modified_term3", FreedomTerm::ModifiedTerm3),
        ("oracle_modified_term4", FreedomTerm::ModifiedTerm4),
    ] {
        let a = dc::freedom_count_oracle(term, &dims).expect("modified term");
        let b = dc::closed_form_term(term, &dims).expect("modified term");
        t.eq(name, a, b);
    }

    // branches meet where the regions touch
    let ob = dc::two_user_original_branches(n1, n2, ne, k - n2).expect("n1 ≤ n2");
    let mb = dc::modified_lower_branches(&c).expect("valid");
    if ne == n2 - n1 {
        t.eq("region_boundary_original", ob[0], ob[1]);
        t.eq("region_boundary_modified", mb[0], mb[1]);
    }
    if ne == n1 + n2 {
        t.eq("region_boundary_original", ob[1], ob[2]);
        t.eq("region_boundary_modified", mb[1], mb[2]);
    }

    if ne < grid.two_user_ne_max {
        let next = TwoUserModifiedConfig::new(n1, n2, k, ne + 1);
        let dn_next = dc::dof_modified_two_user(&next).expect("valid");
        t.holds("monotone_modified", dn_next.lower_12 <= d.lower_12);
        let o_next = dc::dof_two_user_original(n1, n2, ne + 1, k - n2).expect("n1 ≤ n2");
        t.holds("monotone_original", o_next <= orig);
    }
    if k < grid.two_user_k_max {
        let next = TwoUserModifiedConfig::new(n1, n2, k + 1, ne);
        let dk_next = dc::dof_modified_two_user(&next).expect("valid");
        t.holds("monotone_modified", dk_next.lower_12 >= d.lower_12);
        let o_next = dc::dof_two_user_original(n1, n2, ne, k + 1 - n2).expect("n1 ≤ n2");
        t.holds("monotone_original", o_next >= orig);
    }
}

fn pairwise_case(t: &mut Tally, nip: usize, njp: usize, ne: usize, k2: usize) {
    let p = dc::dof_pairwise(nip, njp, ne, k2);
    t.eq("pairwise_gap", p.upper - p.lower, p.gap);
    if nip == njp {
        let want = (2 * nip as i64 - (ne as i64).min(2 * nip as i64)) * k2 as i64;
        t.eq("pairwise_symmetric", p.lower, want);
        t.eq("pairwise_symmetric", p.upper, want);
    }
}

fn run_identities(grid: &IdentityGrid, tamper: Option<&'static str>) -> Vec<CheckResult> {
    let network = (grid.m_min..=grid.m_max)
        .flat_map(|m| antenna_vectors(m, grid.n_max))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|ants| {
            let mut t = Tally::with_tamper(tamper);
            for ne in 0..=grid.ne_max {
                for k2 in 0..=grid.k2_max {
                    for (i, j) in dc::ordered_pairs(ants.len()) {
                        network_case(&mut t, &ants, ne, k2, i, j, grid);
                    }
                }
            }
            t
        })
        .reduce(|| Tally::with_tamper(tamper), Tally::merge);

    let mut t = network;
    for m in grid.m_min..=grid.symmetric_m_max {
        for n in 1..=grid.n_max {
            for ne in 0..=grid.ne_max {
                for k2 in 0..=grid.k2_max {
                    symmetric_case(&mut t, m, n, ne, k2);
                }
            }
        }
    }
    for n1 in 1..=grid.two_user_n_max {
        for n2 in n1..=grid.two_user_n_max {
            for ne in 0..=grid.two_user_ne_max {
                for k in n2..=grid.two_user_k_max {
                    two_user_case(&mut t, n1, n2, ne, k, grid);
                }
            }
        }
    }
    for nip in 1..=grid.n_max {
        for njp in 1..=grid.n_max {
            for ne in 0..=grid.ne_max {
                for k2 in 0..=grid.k2_max {
                    pairwise_case(&mut t, nip, njp, ne, k2);
                }
            }
        }
    }

    IDENTITY_MANIFEST
        .iter()
        .map(|&name| {
            let (cases, violations) = t.counts.get(name).copied().unwrap_or((0, 0));
            // an identity that matched no case is reported as one violation
            let measured = if cases == 0 { 1 } else { violations };
            CheckResult::new(format!("identity/{name}"), measured as f64, 0.0, 0.0)
        })
        .collect()
}

/// Every closed-form identity over the grid, one result per manifest entry.
pub fn identity_suite(grid: &IdentityGrid) -> Vec<CheckResult> {
    run_identities(grid, None)
}

/// Same as [`identity_suite`] with the named identity deliberately broken.
pub fn identity_suite_tampered(grid: &IdentityGrid, name: &str) -> Result<Vec<CheckResult>> {
    let key = IDENTITY_MANIFEST
        .iter()
        .copied()
        .find(|&k| k == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown identity `{name}`")))?;
    Ok(run_identities(grid, Some(key)))
}

// ---------------------------------------------------------------------------
// scheme comparison

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub scheme: Scheme,
    pub phase1_dof: i64,
    pub phase2_dof: i64,
    pub total_dof: i64,
    pub phase1_slots: usize,
    pub phase2_slots: usize,
}

impl ComparisonRow {
    fn new(
        scheme: Scheme,
        phase1_dof: i64,
        phase2_dof: i64,
        phase1_slots: usize,
        phase2_slots: usize,
    ) -> Self {
        Self {
            scheme,
            phase1_dof,
            phase2_dof,
            total_dof: phase1_dof + phase2_dof.max(0),
            phase1_slots,
            phase2_slots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, scheme: Scheme) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.scheme == scheme)
    }
}

/// Compares the schemes on users 1 and 2 with a phase-2 budget of `k2` slots.
///
/// The pair is oriented so the user with fewer antennas comes first. The
/// pair-wise row needs M ≥ 3 and splits `k2` evenly over the P_0 sessions;
/// the modified row appears only for M = 2, over K = k2 + max(N_1, N_2) slots.
pub fn compare_schemes(cfg: &NetworkConfig, k2: usize) -> Result<ComparisonTable> {
    let mut cfg = cfg.clone();
    cfg.k2 = k2;
    cfg.check()?;
    let (i, j) = if cfg.antennas[0] <= cfg.antennas[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let (ni, nj) = (cfg.antennas[i], cfg.antennas[j]);
    let s = DofScenario::new(cfg.clone(), i, j)?;
    let phase1 = dc::dof_phase1(ni, nj);
    let mut rows = vec![ComparisonRow::new(
        Scheme::AllUser,
        phase1,
        dc::dof_phase2_lower(&s),
        cfg.k1,
        k2,
    )];
    let m = cfg.m();
    if m >= 3 {
        let k2s = dc::pairwise_k2_session(m, k2)?;
        let p0 = dc::session_count(m);
        let k1_session = cfg.antennas.iter().copied().max().unwrap_or(0);
        let p = dc::dof_pairwise(ni, nj, cfg.n_eve, k2s);
        rows.push(ComparisonRow::new(
            Scheme::Pairwise,
            phase1,
            p.upper,
            p0 * k1_session,
            p0 * k2s,
        ));
    } else {
        let c = TwoUserModifiedConfig::new(ni, nj, k2 + nj, cfg.n_eve);
        let d = dc::dof_modified_two_user(&c)?;
        rows.push(ComparisonRow::new(
            Scheme::ModifiedTwoUser,
            phase1,
            d.lower_12,
            nj,
            k2,
        ));
    }
    Ok(ComparisonTable { rows })
}

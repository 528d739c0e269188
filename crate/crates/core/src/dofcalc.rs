//! Closed-form degree-of-freedom formulas and a block-freedom counting oracle.
//!
//! Everything is exact integer arithmetic. `pos(x)` is (x)^+ = max(x, 0).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{DofReport, NetworkConfig, TwoUserModifiedConfig};
use crate::pilots::sessions;

fn pos(x: i64) -> i64 {
    x.max(0)
}

fn int(x: usize) -> i64 {
    x as i64
}

/// A network config plus the ordered pair (i, j) under study.
///
/// Derived quantities are methods, so they can never go stale.
#[derive(Debug, Clone, PartialEq)]
pub struct DofScenario {
    pub cfg: NetworkConfig,
    pub i: usize,
    pub j: usize,
}

impl DofScenario {
    pub fn new(cfg: NetworkConfig, i: usize, j: usize) -> Result<Self> {
        cfg.check_pair(i, j)?;
        if cfg.antennas.contains(&0) {
            return Err(Error::InvalidConfig(cfg.validate()));
        }
        Ok(Self { cfg, i, j })
    }

    pub fn ni(&self) -> i64 {
        int(self.cfg.antennas[self.i])
    }

    pub fn nj(&self) -> i64 {
        int(self.cfg.antennas[self.j])
    }

    pub fn nt(&self) -> i64 {
        int(self.cfg.n_total())
    }

    pub fn n_min(&self) -> i64 {
        int(self.cfg.n_min())
    }

    pub fn ne(&self) -> i64 {
        int(self.cfg.n_eve)
    }

    pub fn k2(&self) -> i64 {
        int(self.cfg.k2)
    }

    /// ΔK_2 = (K_2 − N_min)^+.
    pub fn delta_k2(&self) -> i64 {
        pos(self.k2() - self.n_min())
    }

    /// ΔN_E = (N_E − N_T)^+.
    pub fn delta_ne(&self) -> i64 {
        pos(self.ne() - self.nt())
    }

    /// The same scenario with i and j swapped.
    pub fn swapped(&self) -> Self {
        Self {
            cfg: self.cfg.clone(),
            i: self.j,
            j: self.i,
        }
    }
}

pub fn dof_phase1(ni: usize, nj: usize) -> i64 {
    int(ni) * int(nj)
}

/// DoF of the phase-2 encryption capacity C_ij.
pub fn dof_cij(s: &DofScenario) -> i64 {
    let (ni, nj, nt, k2) = (s.ni(), s.nj(), s.nt(), s.k2());
    k2 * (ni.min(nt - ni) + nj.min(nt - nj) - (ni + nj).min(nt - ni - nj))
}

/// DoFs of the four entropy terms behind the leakage and the upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntropyTerms {
    /// h(Y_i | H_i).
    pub h_yi_given_hi: i64,
    /// h(Y_E | H_{E,P}).
    pub h_ye_given_hep: i64,
    /// h(Y_i, Y_E | X_i, H_i, H_{E,P}).
    pub h_joint_i_e: i64,
    /// h(Y_i, Y_j, Y_E | X_i, X_j, H, H_{E,P}).
    pub h_joint_i_j_e: i64,
}

pub fn dof_entropy_terms(s: &DofScenario) -> EntropyTerms {
    let (ni, nj, nt, nmin, ne, k2) = (s.ni(), s.nj(), s.nt(), s.n_min(), s.ne(), s.k2());
    let dk2 = s.delta_k2();
    let eve_alpha = ne * nmin.min(k2);
    EntropyTerms {
        h_yi_given_hi: ni.min(nt - ni) * k2,
        h_ye_given_hep: eve_alpha + ne.min(nt) * dk2,
        h_joint_i_e: k2 * ni.min(nt - ni) + eve_alpha + dk2 * ne.min(pos(nt - 2 * ni)),
        h_joint_i_j_e: k2 * ni.min(nt - ni - nj)
            + k2 * nj.min(pos(nt - 2 * ni - nj))
            + eve_alpha
            + dk2 * ne.min(pos(nt - 2 * ni - 2 * nj)),
    }
}

/// DoF of the leakage C_iE.
pub fn dof_leakage(s: &DofScenario) -> i64 {
    let t = dof_entropy_terms(s);
    t.h_yi_given_hi + t.h_ye_given_hep - t.h_joint_i_e
}

/// Raw lower bound on the phase-2 SDoF; may be negative.
pub fn dof_phase2_lower(s: &DofScenario) -> i64 {
    let (ni, nj, nt, ne, k2) = (s.ni(), s.nj(), s.nt(), s.ne(), s.k2());
    let dk2 = s.delta_k2();
    k2 * nj.min(nt - nj) + k2 * ni.min(nt - ni) + dk2 * ne.min(pos(nt - 2 * ni))
        - k2 * (ni + nj).min(nt - ni - nj)
        - dk2 * ne.min(nt)
}

/// DoF^+ of the lower bound.
pub fn dof_phase2_lower_plus(s: &DofScenario) -> i64 {
    pos(dof_phase2_lower(s))
}

pub fn dof_phase2_upper(s: &DofScenario) -> i64 {
    let (ni, nj, nt, ne, k2) = (s.ni(), s.nj(), s.nt(), s.ne(), s.k2());
    let dk2 = s.delta_k2();
    k2 * ni.min(nt - ni)
        + k2 * nj.min(nt - nj)
        + dk2 * ne.min(pos(nt - 2 * ni))
        + dk2 * ne.min(pos(nt - 2 * nj))
        - dk2 * ne.min(nt)
        - dk2 * ne.min(pos(nt - 2 * ni - 2 * nj))
        - k2 * ni.min(nt - ni - nj)
        - k2 * nj.min(pos(nt - 2 * ni - nj))
}

/// Gap between the upper and lower bounds, in its own five-term form.
pub fn dof_gap(s: &DofScenario) -> i64 {
    let (ni, nj, nt, ne, k2) = (s.ni(), s.nj(), s.nt(), s.ne(), s.k2());
    let dk2 = s.delta_k2();
    dk2 * ne.min(pos(nt - 2 * nj)) + k2 * (ni + nj).min(nt - ni - nj)
        - k2 * ni.min(nt - ni - nj)
        - k2 * nj.min(pos(nt - 2 * ni - nj))
        - dk2 * ne.min(pos(nt - 2 * ni - 2 * nj))
}

/// The upper bound rebuilt from its entropy terms:
/// −h(Y_E|·) + h(Y_i,Y_E|·) + h(Y_j,Y_E|·) − h(Y_i,Y_j,Y_E|·).
pub fn dof_phase2_upper_from_terms(s: &DofScenario) -> i64 {
    let a = dof_entropy_terms(s);
    let b = dof_entropy_terms(&s.swapped());
    -a.h_ye_given_hep + a.h_joint_i_e + b.h_joint_i_e - a.h_joint_i_j_e
}

// ---------------------------------------------------------------------------
// symmetric reductions

/// DoF^+ of the lower bound for N_i = N and N_E ≥ M·N.
pub fn symmetric_lower_plus_large_eve(m: usize, n: usize, k2: usize) -> i64 {
    let (n, k2) = (int(n), int(k2));
    match m {
        2 => 2 * n * n.min(k2),
        3 => n * pos(2 * n.min(k2) - k2),
        _ => 0,
    }
}

/// Symmetric gap, by number of users.
pub fn symmetric_gap(m: usize, n: usize, ne: usize, k2: usize) -> i64 {
    let (n, ne, dk2) = (int(n), int(ne), pos(int(k2) - int(n)));
    match m {
        0..=2 => 0,
        3 => dk2 * ne.min(n),
        _ => dk2 * (ne.min((int(m) - 2) * n) - ne.min((int(m) - 4) * n)),
    }
}

/// Smallest M with a provably zero symmetric gap: ⌈4 + N_E/N⌉.
pub fn symmetric_zero_gap_m(n: usize, ne: usize) -> usize {
    4 + ne.div_ceil(n)
}

// ---------------------------------------------------------------------------
// two-user original scheme

/// Region of N_E relative to ΔN and N_T.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveRegion {
    /// N_E ≤ ΔN.
    Small,
    /// ΔN ≤ N_E ≤ N_T.
    Medium,
    /// N_E ≥ N_T.
    Large,
}

pub fn eve_region(n1: usize, n2: usize, ne: usize) -> EveRegion {
    if ne <= n2 - n1 {
        EveRegion::Small
    } else if ne <= n1 + n2 {
        EveRegion::Medium
    } else {
        EveRegion::Large
    }
}

fn check_two_user(n1: usize, n2: usize) -> Result<()> {
    if n1 == 0 || n1 > n2 {
        return Err(Error::InvalidArgument(format!(
            "two-user formulas need 1 ≤ N_1 ≤ N_2, got ({n1}, {n2})"
        )));
    }
    Ok(())
}

/// Values of each piecewise branch of the original two-user SDoF, in region order.
pub fn two_user_original_branches(n1: usize, n2: usize, ne: usize, k2: usize) -> Result<[i64; 3]> {
    check_two_user(n1, n2)?;
    let (n1, ne, k2) = (int(n1), int(ne), int(k2));
    let dn = int(n2) - n1;
    let dk2 = pos(k2 - n1);
    Ok([
        2 * k2 * n1,
        2 * k2 * n1 - dk2 * (ne - dn),
        2 * n1.min(k2) * n1,
    ])
}

/// Phase-2 SDoF of the original two-user scheme (N_1 ≤ N_2).
pub fn dof_two_user_original(n1: usize, n2: usize, ne: usize, k2: usize) -> Result<i64> {
    let b = two_user_original_branches(n1, n2, ne, k2)?;
    Ok(match eve_region(n1, n2, ne) {
        EveRegion::Small => b[0],
        EveRegion::Medium => b[1],
        EveRegion::Large => b[2],
    })
}

// ---------------------------------------------------------------------------
// pair-wise scheme

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseDof {
    pub lower: i64,
    pub upper: i64,
    pub gap: i64,
}

/// Per-session bounds with `k2_session` phase-2 slots.
pub fn dof_pairwise(nip: usize, njp: usize, ne: usize, k2_session: usize) -> PairwiseDof {
    let (nip, njp, ne, k2) = (int(nip), int(njp), int(ne), int(k2_session));
    let common = -ne.min(nip + njp) * k2 + (ne + nip).min(njp) * k2;
    let gap = if nip <= njp {
        0
    } else {
        ((ne + njp).min(nip) - njp) * k2
    };
    PairwiseDof {
        lower: nip.min(njp) * k2 + common,
        upper: common + (ne + njp).min(nip) * k2,
        gap,
    }
}

/// Number of pair-wise sessions P_0 = M(M−1)/2.
pub fn session_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// k_2 = K_2 / P_0, rejecting schedules that would need rounding.
pub fn pairwise_k2_session(m: usize, k2: usize) -> Result<usize> {
    if m < 3 {
        return Err(Error::TooFewUsersForPairwise(m));
    }
    let p0 = session_count(m);
    if !k2.is_multiple_of(p0) {
        return Err(Error::NonDivisibleBudget { k2, sessions: p0 });
    }
    Ok(k2 / p0)
}

// ---------------------------------------------------------------------------
// modified two-user scheme

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModifiedTerms {
    /// C_key,0.
    pub term1: i64,
    /// h(Y_1^(2) | H_{1,2}).
    pub h_y1: i64,
    /// h(Y_2^(2) | H_{2,1}).
    pub h_y2: i64,
    /// h(Y_E' | H_{E,P'}).
    pub term2: i64,
    /// h(Y_1, Y_E' | X_1, H_{1,2}, H_{E,P'}).
    pub term3: i64,
    /// h(Y_2, Y_E' | X_2, H_{2,1}, H_{E,P'}).
    pub term4: i64,
    /// h(Y_1, Y_2, Y_E' | X_1, X_2, H, H_{E,P'}).
    pub joint_all: i64,
}

pub fn dof_modified_terms(c: &TwoUserModifiedConfig) -> Result<ModifiedTerms> {
    c.check()?;
    let (n1, n2, k, ne) = (int(c.n1), int(c.n2), int(c.k_total), int(c.n_eve));
    let nt = n1 + n2;
    let dn = n2 - n1;
    let tail = pos(k - nt);
    let alpha = ne * n2.min(k - n1);
    Ok(ModifiedTerms {
        term1: n1 * (k - n1) + n1 * (k - n2),
        h_y1: n1 * (k - n2),
        h_y2: n1 * (k - n1),
        term2: alpha + ne.min(nt) * tail,
        term3: n1 * (k - n2) + alpha + ne.min(dn) * tail,
        term4: n1 * (k - n1) + alpha,
        joint_all: alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModifiedDof {
    pub lower_12: i64,
    pub lower_21: i64,
    pub upper: i64,
}

/// Values of each piecewise branch of the modified lower bound, in region order.
pub fn modified_lower_branches(c: &TwoUserModifiedConfig) -> Result<[i64; 3]> {
    c.check()?;
    let (n1, n2, k, ne) = (int(c.n1), int(c.n2), int(c.k_total), int(c.n_eve));
    let nt = n1 + n2;
    let base = n1 * (2 * k - nt);
    Ok([
        base,
        base - (ne - (n2 - n1)) * pos(k - nt),
        n1 * (2 * k - nt - pos(2 * k - 2 * nt)),
    ])
}

pub fn dof_modified_two_user(c: &TwoUserModifiedConfig) -> Result<ModifiedDof> {
    let b = modified_lower_branches(c)?;
    let lower_12 = match eve_region(c.n1, c.n2, c.n_eve) {
        EveRegion::Small => b[0],
        EveRegion::Medium => b[1],
        EveRegion::Large => b[2],
    };
    let (n1, nt, k, ne) = (int(c.n1), int(c.n_total()), int(c.k_total), int(c.n_eve));
    let lower_21 = n1 * (2 * k - nt) - ne.min(nt) * pos(k - nt);
    let t = dof_modified_terms(c)?;
    let upper = -t.term2 + t.term3 + t.term4 - t.joint_all;
    Ok(ModifiedDof {
        lower_12,
        lower_21,
        upper,
    })
}

/// Lower bounds rebuilt from the entropy terms: term1 − leakage.
pub fn modified_lower_from_terms(c: &TwoUserModifiedConfig) -> Result<(i64, i64)> {
    let t = dof_modified_terms(c)?;
    let l12 = t.term1 - (t.h_y1 + t.term2 - t.term3);
    let l21 = t.term1 - (t.h_y2 + t.term2 - t.term4);
    Ok((l12, l21))
}

// ---------------------------------------------------------------------------
// totals

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    AllUser,
    Pairwise,
    ModifiedTwoUser,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::AllUser => "all_user",
            Scheme::Pairwise => "pairwise",
            Scheme::ModifiedTwoUser => "modified_two_user",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_user" => Ok(Scheme::AllUser),
            "pairwise" => Ok(Scheme::Pairwise),
            "modified_two_user" => Ok(Scheme::ModifiedTwoUser),
            other => Err(Error::InvalidArgument(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Inputs for [`dof_total`].
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeParams {
    Network(DofScenario),
    Modified(TwoUserModifiedConfig),
}

/// Phase-1 plus clamped phase-2 SDoF.
///
/// All-user uses the clamped lower bound. Pair-wise uses the per-session upper
/// bound, which is achievable, with k_2 = K_2/P_0. Modified uses its lower bound,
/// which meets the upper bound.
pub fn dof_total(scheme: Scheme, params: &SchemeParams) -> Result<i64> {
    match (scheme, params) {
        (Scheme::AllUser, SchemeParams::Network(s)) => {
            Ok(dof_phase1(s.cfg.antennas[s.i], s.cfg.antennas[s.j]) + dof_phase2_lower_plus(s))
        }
        (Scheme::Pairwise, SchemeParams::Network(s)) => {
            let k2s = pairwise_k2_session(s.cfg.m(), s.cfg.k2)?;
            let (ni, nj) = (s.cfg.antennas[s.i], s.cfg.antennas[s.j]);
            let p = dof_pairwise(ni, nj, s.cfg.n_eve, k2s);
            Ok(dof_phase1(ni, nj) + pos(p.upper))
        }
        (Scheme::ModifiedTwoUser, SchemeParams::Modified(c)) => {
            Ok(dof_phase1(c.n1, c.n2) + pos(dof_modified_two_user(c)?.lower_12))
        }
        (scheme, _) => Err(Error::InvalidArgument(format!(
            "parameters do not fit scheme `{scheme}`"
        ))),
    }
}

/// Every applicable formula for an all-user or pair-wise scenario.
pub fn network_report(scheme: Scheme, s: &DofScenario) -> Result<DofReport> {
    let mut r = DofReport::default();
    let (ni, nj) = (s.cfg.antennas[s.i], s.cfg.antennas[s.j]);
    r.insert("dof_phase1", dof_phase1(ni, nj));
    match scheme {
        Scheme::AllUser => {
            let t = dof_entropy_terms(s);
            r.insert("dof_cij", dof_cij(s));
            r.insert("dof_leakage", dof_leakage(s));
            r.insert("dof_h_yi_given_hi", t.h_yi_given_hi);
            r.insert("dof_h_ye_given_hep", t.h_ye_given_hep);
            r.insert("dof_h_joint_i_e", t.h_joint_i_e);
            r.insert("dof_h_joint_i_j_e", t.h_joint_i_j_e);
            r.insert("dof_phase2_lower", dof_phase2_lower(s));
            r.insert("dof_phase2_lower_plus", dof_phase2_lower_plus(s));
            r.insert("dof_phase2_upper", dof_phase2_upper(s));
            r.insert("dof_gap", dof_gap(s));
            r.insert("delta_k2", s.delta_k2());
        }
        Scheme::Pairwise => {
            let k2s = pairwise_k2_session(s.cfg.m(), s.cfg.k2)?;
            let p = dof_pairwise(ni, nj, s.cfg.n_eve, k2s);
            r.insert("p0", int(session_count(s.cfg.m())));
            r.insert("k2_session", int(k2s));
            r.insert("dof_phase2_lower", p.lower);
            r.insert("dof_phase2_lower_plus", pos(p.lower));
            r.insert("dof_phase2_upper", p.upper);
            r.insert("dof_gap", p.gap);
        }
        Scheme::ModifiedTwoUser => {
            return Err(Error::InvalidArgument(
                "modified_two_user takes a two-user config".into(),
            ))
        }
    }
    r.insert(
        "dof_total",
        dof_total(scheme, &SchemeParams::Network(s.clone()))?,
    );
    Ok(r)
}

/// Every applicable formula for the modified two-user scheme.
pub fn modified_report(c: &TwoUserModifiedConfig) -> Result<DofReport> {
    let d = dof_modified_two_user(c)?;
    let t = dof_modified_terms(c)?;
    let mut r = DofReport::default();
    let phase1 = dof_phase1(c.n1, c.n2);
    r.insert("dof_phase1", phase1);
    r.insert("dof_phase2", pos(d.lower_12));
    r.insert("dof_phase2_lower", d.lower_12);
    r.insert("dof_phase2_lower_21", d.lower_21);
    r.insert("dof_phase2_upper", d.upper);
    r.insert("dof_gap", d.upper - d.lower_12);
    r.insert("dof_c_key0", t.term1);
    r.insert(
        "dof_total",
        dof_total(Scheme::ModifiedTwoUser, &SchemeParams::Modified(*c))?,
    );
    let k2 = c.k_total - c.n2;
    let original = dof_two_user_original(c.n1, c.n2, c.n_eve, k2)?;
    r.insert("dof_original_phase2", original);
    r.insert("dof_original_total", phase1 + original);
    r.insert("dof_gain_over_original", pos(d.lower_12) - original);
    Ok(r)
}

// ---------------------------------------------------------------------------
// freedom-counting oracle

/// Entropy terms the oracle can count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreedomTerm {
    YeGivenHep,
    JointIE,
    JointIJE,
    ModifiedTerm2,
    ModifiedTerm3,
    ModifiedTerm4,
}

impl FreedomTerm {
    pub const ALL: [FreedomTerm; 6] = [
        FreedomTerm::YeGivenHep,
        FreedomTerm::JointIE,
        FreedomTerm::JointIJE,
        FreedomTerm::ModifiedTerm2,
        FreedomTerm::ModifiedTerm3,
        FreedomTerm::ModifiedTerm4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FreedomTerm::YeGivenHep => "ye_given_hep",
            FreedomTerm::JointIE => "joint_i_e",
            FreedomTerm::JointIJE => "joint_i_j_e",
            FreedomTerm::ModifiedTerm2 => "modified_term2",
            FreedomTerm::ModifiedTerm3 => "modified_term3",
            FreedomTerm::ModifiedTerm4 => "modified_term4",
        }
    }
}

impl FromStr for FreedomTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown freedom term `{s}`")))
    }
}

/// Dimensions the oracle counts over.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleDims {
    Network(DofScenario),
    Modified(TwoUserModifiedConfig),
}

/// Rank of a generic `rows × cols` matrix.
fn generic_rank(rows: usize, cols: usize) -> usize {
    rows.min(cols)
}

/// Column count of Eve's "alpha" block: the slots it takes for the unknown
/// ambiguity channel (`ambiguity` columns wide) to be fully exercised.
fn alpha_cols(ambiguity: usize, slots: usize) -> usize {
    generic_rank(ambiguity, slots)
}

/// Free dimensions of Eve's reception split into alpha and beta-a blocks.
///
/// Alpha: every entry is free because the ambiguity channel is still unknown.
/// Beta-a: after alpha the channel is pinned down, and each remaining column
/// carries the part of the unknown symbols Eve's channel can see, at most
/// `unknown_dim` per column. Beta-b carries nothing.
fn eve_blocks(
    n_eve: usize,
    ambiguity: usize,
    slots: usize,
    unknown_dim: usize,
    n_total: usize,
) -> usize {
    let a = alpha_cols(ambiguity, slots);
    let beta = slots - a;
    let eve_rank = generic_rank(n_eve, n_total);
    n_eve * a + generic_rank(eve_rank, unknown_dim) * beta
}

/// Successive conditioning on user receptions: returns (free dims per slot,
/// remaining symbol nullity per slot) after each user observes the unknown
/// symbols through a generic channel with `rows` rows.
fn observe(unknown: usize, rows: usize) -> (usize, usize) {
    let r = generic_rank(rows, unknown);
    (r, unknown - r)
}

/// Entropy DoF recounted from block dimensions.
pub fn freedom_count_oracle(term: FreedomTerm, dims: &OracleDims) -> Result<i64> {
    use FreedomTerm::*;
    let count = match (term, dims) {
        (YeGivenHep | JointIE | JointIJE, OracleDims::Network(s)) => {
            let c = &s.cfg;
            let (ni, nj, nt) = (c.antennas[s.i], c.antennas[s.j], c.n_total());
            let slots = c.k2;
            let amb = c.n_min();
            match term {
                YeGivenHep => eve_blocks(c.n_eve, amb, slots, nt, nt),
                JointIE => {
                    let (free_i, null_i) = observe(nt - ni, ni);
                    free_i * slots + eve_blocks(c.n_eve, amb, slots, null_i, nt)
                }
                _ => {
                    let (free_i, null_i) = observe(nt - ni - nj, ni);
                    let (free_j, null_j) = observe(null_i, nj);
                    (free_i + free_j) * slots + eve_blocks(c.n_eve, amb, slots, null_j, nt)
                }
            }
        }
        (ModifiedTerm2 | ModifiedTerm3 | ModifiedTerm4, OracleDims::Modified(m)) => {
            m.check()?;
            let nt = m.n_total();
            // Eve's second segment spans K − N_1 slots; the ambiguity has N_2 columns
            let slots = m.k_total - m.n1;
            let amb = m.n2;
            match term {
                ModifiedTerm2 => eve_blocks(m.n_eve, amb, slots, nt, nt),
                ModifiedTerm3 => {
                    // node 1 sees X_2 (N_2 × (K − N_2)) through H_{1,2}
                    let (free, null) = observe(m.n2, m.n1);
                    free * (m.k_total - m.n2) + eve_blocks(m.n_eve, amb, slots, null, nt)
                }
                _ => {
                    // node 2 sees X_1 (N_1 × (K − N_1)) through H_{2,1}
                    let (free, null) = observe(m.n1, m.n2);
                    free * (m.k_total - m.n1) + eve_blocks(m.n_eve, amb, slots, null, nt)
                }
            }
        }
        (term, _) => {
            return Err(Error::InvalidArgument(format!(
                "term `{}` does not apply to these dimensions",
                term.as_str()
            )))
        }
    };
    Ok(int(count))
}

/// The closed-form value the oracle is compared against.
pub fn closed_form_term(term: FreedomTerm, dims: &OracleDims) -> Result<i64> {
    use FreedomTerm::*;
    match (term, dims) {
        (YeGivenHep, OracleDims::Network(s)) => Ok(dof_entropy_terms(s).h_ye_given_hep),
        (JointIE, OracleDims::Network(s)) => Ok(dof_entropy_terms(s).h_joint_i_e),
        (JointIJE, OracleDims::Network(s)) => Ok(dof_entropy_terms(s).h_joint_i_j_e),
        (ModifiedTerm2, OracleDims::Modified(m)) => Ok(dof_modified_terms(m)?.term2),
        (ModifiedTerm3, OracleDims::Modified(m)) => Ok(dof_modified_terms(m)?.term3),
        (ModifiedTerm4, OracleDims::Modified(m)) => Ok(dof_modified_terms(m)?.term4),
        (term, _) => Err(Error::InvalidArgument(format!(
            "term `{}` does not apply to these dimensions",
            term.as_str()
        ))),
    }
}

/// Ordered pairs (i, j), i ≠ j.
pub fn ordered_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Unordered pairs, re-exported for callers that only need one orientation.
pub fn unordered_pairs(m: usize) -> Vec<(usize, usize)> {
    sessions(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(ants: &[usize], ne: usize, k2: usize) -> DofScenario {
        DofScenario::new(NetworkConfig::new(ants.to_vec(), ne, k2), 0, 1).unwrap()
    }

    #[test]
    fn phase1() {
        assert_eq!(dof_phase1(1, 1), 1);
        assert_eq!(dof_phase1(2, 3), 6);
        assert_eq!(dof_phase1(4, 4), 16);
    }

    #[test]
    fn cij_examples() {
        assert_eq!(dof_cij(&sc(&[2, 2], 0, 3)), 12);
        assert_eq!(dof_cij(&sc(&[2, 2, 2], 0, 2)), 4);
        assert_eq!(dof_cij(&sc(&[2, 2, 2], 0, 0)), 0);
    }

    #[test]
    fn entropy_examples() {
        let t = dof_entropy_terms(&sc(&[2, 2], 5, 3));
        assert_eq!(t.h_yi_given_hi, 6);
        assert_eq!(t.h_ye_given_hep, 14);
        assert_eq!(t.h_joint_i_e, 16);
        assert_eq!(dof_entropy_terms(&sc(&[2, 2, 2], 4, 3)).h_joint_i_j_e, 14);
        assert_eq!(dof_entropy_terms(&sc(&[2, 3], 4, 2)).h_ye_given_hep, 8);
    }

    #[test]
    fn leakage_examples() {
        assert_eq!(dof_leakage(&sc(&[2, 2], 5, 3)), 4);
        assert_eq!(dof_leakage(&sc(&[2, 2], 5, 0)), 0);
        assert_eq!(dof_leakage(&sc(&[2, 3, 1], 0, 4)), 0);
    }

    #[test]
    fn bound_examples() {
        for ne in 0..10 {
            assert_eq!(dof_phase2_lower(&sc(&[2, 2, 2], ne, 2)), 4);
            assert_eq!(dof_phase2_upper(&sc(&[2, 2, 2], ne, 2)), 4);
        }
        let s = sc(&[2, 2, 2], 4, 3);
        assert_eq!(dof_phase2_lower(&s), 4);
        assert_eq!(dof_phase2_upper(&s), 6);
        assert_eq!(dof_gap(&s), 2);
        assert_eq!(dof_phase2_lower(&sc(&[2, 2], 5, 3)), 8);
    }

    #[test]
    fn two_user_original_examples() {
        assert_eq!(dof_two_user_original(2, 3, 6, 4).unwrap(), 8);
        assert_eq!(dof_two_user_original(2, 3, 1, 4).unwrap(), 16);
        assert_eq!(dof_two_user_original(2, 3, 4, 4).unwrap(), 10);
        let sweep: Vec<i64> = (0..=8)
            .map(|ne| dof_two_user_original(2, 3, ne, 4).unwrap())
            .collect();
        assert_eq!(sweep, vec![16, 16, 14, 12, 10, 8, 8, 8, 8]);
        assert!(dof_two_user_original(3, 2, 0, 1).is_err());
    }

    #[test]
    fn pairwise_examples() {
        assert_eq!(
            dof_pairwise(2, 2, 1, 2),
            PairwiseDof {
                lower: 6,
                upper: 6,
                gap: 0
            }
        );
        for ne in 4..9 {
            assert_eq!(dof_pairwise(2, 2, ne, 3).upper, 0);
        }
        assert_eq!(
            dof_pairwise(3, 2, 2, 1),
            PairwiseDof {
                lower: 2,
                upper: 3,
                gap: 1
            }
        );
        assert_eq!(
            dof_pairwise(3, 2, 4, 1),
            PairwiseDof {
                lower: 0,
                upper: 1,
                gap: 1
            }
        );
    }

    #[test]
    fn modified_examples() {
        let d = dof_modified_two_user(&TwoUserModifiedConfig::new(2, 3, 7, 6)).unwrap();
        assert_eq!(d.lower_12, 10);
        assert_eq!(d.upper, 10);
        let d1 = dof_modified_two_user(&TwoUserModifiedConfig::new(2, 3, 7, 1)).unwrap();
        assert_eq!(d1.lower_12, 18);
        assert_eq!(d1.lower_12 - d1.lower_21, 2);
        let sweep: Vec<i64> = (3..=8)
            .map(|k| {
                dof_modified_two_user(&TwoUserModifiedConfig::new(2, 3, k, 6))
                    .unwrap()
                    .lower_12
            })
            .collect();
        assert_eq!(sweep, vec![2, 6, 10, 10, 10, 10]);
    }

    #[test]
    fn totals() {
        let m = SchemeParams::Modified(TwoUserModifiedConfig::new(2, 3, 7, 6));
        assert_eq!(dof_total(Scheme::ModifiedTwoUser, &m).unwrap(), 16);
        let a = SchemeParams::Network(sc(&[2, 2, 2], 3, 2));
        assert_eq!(dof_total(Scheme::AllUser, &a).unwrap(), 8);
        let p = SchemeParams::Network(sc(&[2, 2, 2], 4, 3));
        assert_eq!(dof_total(Scheme::Pairwise, &p).unwrap(), 4);
        assert!(dof_total(Scheme::ModifiedTwoUser, &a).is_err());
        let odd = SchemeParams::Network(sc(&[2, 2, 2], 4, 2));
        assert!(matches!(
            dof_total(Scheme::Pairwise, &odd),
            Err(Error::NonDivisibleBudget { k2: 2, sessions: 3 })
        ));
    }

    #[test]
    fn oracle_examples() {
        let d = OracleDims::Network(sc(&[2, 2], 5, 3));
        assert_eq!(
            freedom_count_oracle(FreedomTerm::YeGivenHep, &d).unwrap(),
            14
        );
        let d3 = OracleDims::Network(sc(&[2, 2, 2], 4, 3));
        assert_eq!(
            freedom_count_oracle(FreedomTerm::JointIJE, &d3).unwrap(),
            14
        );
        let dm = OracleDims::Modified(TwoUserModifiedConfig::new(2, 3, 7, 6));
        assert_eq!(
            freedom_count_oracle(FreedomTerm::ModifiedTerm3, &dm).unwrap(),
            28
        );
        assert!(freedom_count_oracle(FreedomTerm::ModifiedTerm2, &d).is_err());
        assert!("nope".parse::<FreedomTerm>().is_err());
        assert_eq!(
            "joint_i_e".parse::<FreedomTerm>().unwrap(),
            FreedomTerm::JointIE
        );
    }

    #[test]
    fn symmetric_helpers() {
        assert_eq!(symmetric_gap(3, 2, 4, 3), 2);
        assert_eq!(symmetric_zero_gap_m(2, 3), 6);
        assert_eq!(symmetric_lower_plus_large_eve(3, 2, 3), 2);
    }

    #[test]
    fn reports() {
        let r = network_report(Scheme::AllUser, &sc(&[2, 2, 2], 0, 2)).unwrap();
        assert_eq!(r.get("dof_total"), Some(8));
        assert_eq!(r.get("dof_gap"), Some(0));
        let m = modified_report(&TwoUserModifiedConfig::new(2, 3, 7, 6)).unwrap();
        assert_eq!(m.get("dof_phase2"), Some(10));
        assert_eq!(m.get("dof_total"), Some(16));
        assert_eq!(m.get("dof_original_total"), Some(14));
        assert_eq!(m.get("dof_gain_over_original"), Some(2));
    }
}

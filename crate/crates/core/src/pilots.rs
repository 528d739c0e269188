//! Collaborative pilots for the all-user, pair-wise and modified schemes.

use std::fmt::Write as _;

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::model::{ComplexMatrix, NetworkConfig, TwoUserModifiedConfig, Violation};
use crate::numkernel::linalg::{hstack, identity, rank, vstack};
use crate::numkernel::rng::{cn_matrix, substream};

type ComplexVector = DVector<Complex<f64>>;

/// Retries before a construction is declared failed.
pub const MAX_ATTEMPTS: usize = 8;

/// Relative column-norm threshold below which Gram-Schmidt treats a residual as zero.
const GS_RTOL: f64 = 1e-9;

/// Per-user pilot blocks P_i and their vertical stack P.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSet {
    pub blocks: Vec<ComplexMatrix>,
    pub stacked: ComplexMatrix,
}

impl PilotSet {
    pub fn from_blocks(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
        let stacked = vstack(&refs)?;
        Ok(Self { blocks, stacked })
    }

    /// Splits an N_T-row matrix into blocks of the given heights.
    pub fn from_stacked(antennas: &[usize], stacked: ComplexMatrix) -> Result<Self> {
        let total: usize = antennas.iter().sum();
        if stacked.nrows() != total {
            return Err(Error::ShapeMismatch(format!(
                "stacked pilot has {} rows, expected N_T = {total}",
                stacked.nrows()
            )));
        }
        let mut off = 0;
        let blocks = antennas
            .iter()
            .map(|&n| {
                let b = stacked.rows(off, n).into_owned();
                off += n;
                b
            })
            .collect();
        Ok(Self { blocks, stacked })
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn k1(&self) -> usize {
        self.stacked.ncols()
    }

    pub fn antennas(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    /// P_(i): P with block i removed.
    pub fn without(&self, i: usize) -> ComplexMatrix {
        let rest: Vec<&ComplexMatrix> = self
            .blocks
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != i)
            .map(|(_, b)| b)
            .collect();
        vstack(&rest).expect("blocks share K_1 columns")
    }
}

/// P = Q_P · R_P together with the complement Q_{P,⊥}.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotQrSplit {
    pub q_p: ComplexMatrix,
    pub q_perp: ComplexMatrix,
    pub r_p: ComplexMatrix,
}

impl PilotQrSplit {
    /// [Q_P, Q_{P,⊥}].
    pub fn unitary(&self) -> ComplexMatrix {
        hstack(&[&self.q_p, &self.q_perp]).expect("same N_T rows")
    }
}

/// Pair-wise schedule: session p occupies `k1` slots and carries P_{i_p}, P_{j_p}.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwisePilotMatrix {
    pub matrix: ComplexMatrix,
    pub session_index: Vec<(usize, usize)>,
    pub k1: usize,
}

/// Square nonsingular pilots of the modified two-user scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedPilotPair {
    pub p1: ComplexMatrix,
    pub p2: ComplexMatrix,
}

/// Pairs (i, j), i < j, in lexicographic order.
pub fn sessions(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect()
}

/// Random pilots satisfying the three rank conditions.
///
/// A generic N_T × (N_T − N_min) Gaussian matrix already has every block and
/// every block-deleted stack at full generic rank. Columns beyond that are
/// random combinations of the first ones so rank(P) does not grow.
pub fn build_pilots(cfg: &NetworkConfig, seed: u64) -> Result<PilotSet> {
    cfg.check()?;
    let nt = cfg.n_total();
    let r = cfg.pilot_rank();
    let mut last = Vec::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(seed, "pilots", attempt as u64);
        let base = cn_matrix(&mut rng, nt, r);
        let stacked = if cfg.k1 > r {
            let mix = cn_matrix(&mut rng, r, cfg.k1 - r);
            hstack(&[&base, &(&base * mix)])?
        } else {
            base
        };
        let ps = PilotSet::from_stacked(&cfg.antennas, stacked)?;
        last = validate_pilots(&ps, cfg)?;
        if last.is_empty() {
            return Ok(ps);
        }
    }
    Err(Error::PilotConstruction {
        attempts: MAX_ATTEMPTS,
        reason: last
            .iter()
            .map(|v| v.message.clone())
            .collect::<Vec<_>>()
            .join("; "),
    })
}

/// Checks rank(P_i) = N_i, rank(P_(i)) = N_T − N_i and rank(P) = N_T − N_min.
///
/// Block-level failures are reported alone: a deficient P_i drags the
/// block-deleted stacks down with it, so those would only repeat the cause.
pub fn validate_pilots(ps: &PilotSet, cfg: &NetworkConfig) -> Result<Vec<Violation>> {
    if ps.antennas() != cfg.antennas {
        return Err(Error::ShapeMismatch(format!(
            "pilot block heights {:?} do not match antennas {:?}",
            ps.antennas(),
            cfg.antennas
        )));
    }
    if ps.blocks.iter().any(|b| b.ncols() != cfg.k1) {
        return Err(Error::ShapeMismatch(format!(
            "pilot blocks must have K_1 = {} columns",
            cfg.k1
        )));
    }
    let block_issues: Vec<Violation> = ps
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| rank(b) < b.nrows())
        .map(|(i, _)| Violation::new("pilots", format!("rank(P_{0}) < N_{0}", i + 1)))
        .collect();
    if !block_issues.is_empty() {
        return Ok(block_issues);
    }
    let nt = cfg.n_total();
    let mut out: Vec<Violation> = (0..cfg.m())
        .filter(|&i| rank(&ps.without(i)) != nt - cfg.antennas[i])
        .map(|i| Violation::new("pilots", format!("rank(P_({0})) ≠ N_T−N_{0}", i + 1)))
        .collect();
    if rank(&ps.stacked) != cfg.pilot_rank() {
        out.push(Violation::new("pilots", "rank(P) ≠ N_T−N_min"));
    }
    Ok(out)
}

fn project_out(basis: &[ComplexVector], v: &mut ComplexVector) {
    // two passes keep the basis orthonormal to working precision
    for _ in 0..2 {
        for q in basis {
            let coef = q.dotc(v);
            v.axpy(-coef, q, Complex::new(1.0, 0.0));
        }
    }
}

/// Orthonormal basis of the column span, via two-pass Gram-Schmidt.
fn orth_columns(a: &ComplexMatrix, start: Vec<ComplexVector>, max: usize) -> Vec<ComplexVector> {
    let scale = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis = start;
    let mut found = Vec::new();
    for col in a.column_iter() {
        if found.len() == max {
            break;
        }
        let mut v = col.into_owned();
        project_out(&basis, &mut v);
        let nv = v.norm();
        if nv > GS_RTOL * scale && nv > 0.0 {
            let q = v.unscale(nv);
            basis.push(q.clone());
            found.push(q);
        }
    }
    found
}

fn columns_to_matrix(rows: usize, cols: &[ComplexVector]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, cols.len());
    for (k, c) in cols.iter().enumerate() {
        out.set_column(k, c);
    }
    out
}

/// QR split of the stacked pilot.
///
/// Q_P spans the columns of P, Q_{P,⊥} completes it to a unitary matrix and
/// R_P = Q_P^H P. Pivot entries of R_P come out real and positive.
pub fn qr_split(ps: &PilotSet) -> Result<PilotQrSplit> {
    let p = &ps.stacked;
    let nt = p.nrows();
    let n_min = ps.antennas().into_iter().min().unwrap_or(0);
    let r = nt - n_min;
    let q_cols = orth_columns(p, Vec::new(), nt);
    if q_cols.len() != r {
        return Err(Error::RankDeficient(format!(
            "rank(P) = {} but N_T−N_min = {r}",
            q_cols.len()
        )));
    }
    let perp = orth_columns(&identity(nt), q_cols.clone(), nt - r);
    if perp.len() != nt - r {
        return Err(Error::RankDeficient(
            "could not complete the unitary basis".into(),
        ));
    }
    let q_p = columns_to_matrix(nt, &q_cols);
    let q_perp = columns_to_matrix(nt, &perp);
    let r_p = q_p.adjoint() * p;
    Ok(PilotQrSplit { q_p, q_perp, r_p })
}

/// Lays out the pair-wise schedule from per-user blocks of `k1` columns.
pub fn build_pairwise_matrix(
    cfg: &NetworkConfig,
    per_session_blocks: &[ComplexMatrix],
) -> Result<PairwisePilotMatrix> {
    let m = cfg.m();
    if m < 3 {
        return Err(Error::TooFewUsersForPairwise(m));
    }
    if per_session_blocks.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "{} pilot blocks for {m} users",
            per_session_blocks.len()
        )));
    }
    let k1 = per_session_blocks[0].ncols();
    for (i, b) in per_session_blocks.iter().enumerate() {
        if b.shape() != (cfg.antennas[i], k1) {
            return Err(Error::ShapeMismatch(format!(
                "P_{} must be {}×{k1}, got {}×{}",
                i + 1,
                cfg.antennas[i],
                b.nrows(),
                b.ncols()
            )));
        }
        if rank(b) < b.nrows() {
            return Err(Error::RankDeficient(format!("rank(P_{0}) < N_{0}", i + 1)));
        }
    }
    let session_index = sessions(m);
    let mut matrix = ComplexMatrix::zeros(cfg.n_total(), session_index.len() * k1);
    for (p, &(i, j)) in session_index.iter().enumerate() {
        for u in [i, j] {
            matrix
                .view_mut((cfg.offset(u), p * k1), (cfg.antennas[u], k1))
                .copy_from(&per_session_blocks[u]);
        }
    }
    Ok(PairwisePilotMatrix {
        matrix,
        session_index,
        k1,
    })
}

/// Random full-row-rank blocks P_i of `k1` columns for the pair-wise schedule.
pub fn random_session_blocks(
    cfg: &NetworkConfig,
    k1: usize,
    seed: u64,
) -> Result<Vec<ComplexMatrix>> {
    if k1 < cfg.antennas.iter().copied().max().unwrap_or(0) {
        return Err(Error::InvalidArgument(format!(
            "per-session pilot length {k1} is shorter than max N_i"
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(seed, "pairwise-pilots", attempt as u64);
        let blocks: Vec<ComplexMatrix> = cfg
            .antennas
            .iter()
            .map(|&n| cn_matrix(&mut rng, n, k1))
            .collect();
        if blocks.iter().all(|b| rank(b) == b.nrows()) {
            return Ok(blocks);
        }
    }
    Err(Error::PilotConstruction {
        attempts: MAX_ATTEMPTS,
        reason: "session blocks not full row rank".into(),
    })
}

/// Square pilots P_1 (N_1 × N_1) and P_2 (N_2 × N_2).
pub fn build_square_pilots(cfg: &TwoUserModifiedConfig, seed: u64) -> Result<ModifiedPilotPair> {
    cfg.check()?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(seed, "pilots", attempt as u64);
        let p1 = cn_matrix(&mut rng, cfg.n1, cfg.n1);
        let p2 = cn_matrix(&mut rng, cfg.n2, cfg.n2);
        if rank(&p1) == cfg.n1 && rank(&p2) == cfg.n2 {
            return Ok(ModifiedPilotPair { p1, p2 });
        }
    }
    Err(Error::PilotConstruction {
        attempts: MAX_ATTEMPTS,
        reason: "square pilots not full rank".into(),
    })
}

/// Plain-text matrix: `rows cols` header, then one line per row of `re im` pairs.
pub fn matrix_to_text(m: &ComplexMatrix) -> String {
    let mut s = format!("{} {}\n", m.nrows(), m.ncols());
    for row in m.row_iter() {
        let line = row
            .iter()
            .map(|z| format!("{} {}", z.re, z.im))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, "{line}");
    }
    s
}

/// Inverse of [`matrix_to_text`].
pub fn matrix_from_text(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::MatrixParse("empty input".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::MatrixParse(format!("bad header `{header}`")))
        })
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::MatrixParse(format!("bad header `{header}`")));
    };
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::MatrixParse(format!("missing row {}", r + 1)))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::MatrixParse(format!("bad number `{t}`")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 2 * cols {
            return Err(Error::MatrixParse(format!(
                "row {} has {} numbers, expected {}",
                r + 1,
                vals.len(),
                2 * cols
            )));
        }
        for c in 0..cols {
            m[(r, c)] = Complex::new(vals[2 * c], vals[2 * c + 1]);
        }
    }
    if lines.next().is_some() {
        return Err(Error::MatrixParse("trailing rows".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::linalg::max_abs;

    fn re(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_iterator(rows, cols, v.iter().map(|&x| Complex::new(x, 0.0)))
    }

    #[test]
    fn minimal_pilot() {
        let cfg = NetworkConfig::new(vec![1, 1], 1, 1);
        let ps = build_pilots(&cfg, 1).unwrap();
        assert_eq!(ps.stacked.shape(), (2, 1));
        assert!(ps.stacked.iter().all(|z| z.norm() > 0.0));
        assert_eq!(rank(&ps.stacked), 1);
    }

    #[test]
    fn unequal_users_ranks() {
        let cfg = NetworkConfig::new(vec![2, 3], 0, 1);
        let ps = build_pilots(&cfg, 3).unwrap();
        assert_eq!(ps.stacked.shape(), (5, 3));
        assert_eq!(rank(&ps.stacked), 3);
        assert_eq!(rank(&ps.blocks[0]), 2);
        assert_eq!(rank(&ps.blocks[1]), 3);
        assert_eq!(rank(&ps.without(0)), 3);
        assert_eq!(rank(&ps.without(1)), 2);
    }

    #[test]
    fn long_pilot_keeps_rank() {
        let cfg = NetworkConfig::new(vec![1, 2, 2], 0, 1).with_k1(7);
        let ps = build_pilots(&cfg, 9).unwrap();
        assert_eq!(ps.k1(), 7);
        assert_eq!(rank(&ps.stacked), 4);
        assert!(validate_pilots(&ps, &cfg).unwrap().is_empty());
    }

    #[test]
    fn hand_pilots() {
        let cfg = NetworkConfig::new(vec![1, 1, 1], 0, 1);
        let good =
            PilotSet::from_stacked(&cfg.antennas, re(3, 2, &[1., 0., 0., 1., 1., 1.])).unwrap();
        assert!(validate_pilots(&good, &cfg).unwrap().is_empty());
        let bad =
            PilotSet::from_stacked(&cfg.antennas, re(3, 2, &[1., 0., 0., 1., 0., 0.])).unwrap();
        let msgs: Vec<String> = validate_pilots(&bad, &cfg)
            .unwrap()
            .into_iter()
            .map(|v| v.message)
            .collect();
        assert_eq!(msgs, vec!["rank(P_3) < N_3"]);

        let two = NetworkConfig::new(vec![1, 1], 0, 1);
        let ones = PilotSet::from_stacked(&two.antennas, re(2, 1, &[1., 1.])).unwrap();
        assert!(validate_pilots(&ones, &two).unwrap().is_empty());
    }

    #[test]
    fn block_deleted_rank_reported() {
        // every block nonzero but users 1 and 2 share a pilot
        let cfg = NetworkConfig::new(vec![1, 1, 1], 0, 1);
        let ps =
            PilotSet::from_stacked(&cfg.antennas, re(3, 2, &[1., 0., 1., 0., 0., 1.])).unwrap();
        let msgs: Vec<String> = validate_pilots(&ps, &cfg)
            .unwrap()
            .into_iter()
            .map(|v| v.message)
            .collect();
        assert_eq!(msgs, vec!["rank(P_(3)) ≠ N_T−N_3"]);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let cfg = NetworkConfig::new(vec![1, 2], 0, 1);
        let ps = PilotSet::from_stacked(&[2, 1], re(3, 2, &[1.; 6])).unwrap();
        assert!(matches!(
            validate_pilots(&ps, &cfg),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn qr_of_ones() {
        let ps = PilotSet::from_stacked(&[1, 1], re(2, 1, &[1., 1.])).unwrap();
        let qr = qr_split(&ps).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(max_abs(&(&qr.q_p - re(2, 1, &[h, h]))) < 1e-15);
        assert!(max_abs(&(&qr.q_perp - re(2, 1, &[h, -h]))) < 1e-15);
        assert!((qr.r_p[(0, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(qr.r_p[(0, 0)].im, 0.0);
    }

    #[test]
    fn qr_dimensions_and_unitarity() {
        let cfg = NetworkConfig::new(vec![2, 3], 0, 1);
        let ps = build_pilots(&cfg, 4).unwrap();
        let qr = qr_split(&ps).unwrap();
        assert_eq!(qr.q_p.shape(), (5, 3));
        assert_eq!(qr.q_perp.shape(), (5, 2));
        let u = qr.unitary();
        assert!(max_abs(&(u.adjoint() * &u - identity(5))) < 1e-10);
        assert!(max_abs(&(&ps.stacked - &qr.q_p * &qr.r_p)) < 1e-10);
        for k in 0..3 {
            assert!(qr.r_p[(k, k)].re > 0.0 && qr.r_p[(k, k)].im.abs() < 1e-12);
        }
    }

    #[test]
    fn pairwise_scalar_layout() {
        let cfg = NetworkConfig::new(vec![1, 1, 1], 0, 3);
        let one = re(1, 1, &[1.]);
        let pp = build_pairwise_matrix(&cfg, &[one.clone(), one.clone(), one]).unwrap();
        assert_eq!(pp.matrix, re(3, 3, &[1., 1., 0., 1., 0., 1., 0., 1., 1.]));
        assert_eq!(rank(&pp.matrix), 3);
        assert_eq!(pp.session_index, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn pairwise_random_blocks_full_rank() {
        let cfg = NetworkConfig::symmetric(3, 2, 0, 3);
        let blocks = random_session_blocks(&cfg, 2, 1).unwrap();
        let pp = build_pairwise_matrix(&cfg, &blocks).unwrap();
        assert_eq!(pp.matrix.shape(), (6, 6));
        assert_eq!(rank(&pp.matrix), 6);
    }

    #[test]
    fn pairwise_needs_three_users() {
        let cfg = NetworkConfig::new(vec![1, 1], 0, 1);
        let one = re(1, 1, &[1.]);
        assert!(matches!(
            build_pairwise_matrix(&cfg, &[one.clone(), one]),
            Err(Error::TooFewUsersForPairwise(2))
        ));
    }

    #[test]
    fn square_pilots() {
        for (n1, n2) in [(1, 1), (2, 3), (2, 2)] {
            let cfg = TwoUserModifiedConfig::new(n1, n2, n2 + 1, 1);
            let pp = build_square_pilots(&cfg, 2).unwrap();
            assert_eq!(pp.p1.shape(), (n1, n1));
            assert_eq!(pp.p2.shape(), (n2, n2));
            assert_eq!(rank(&pp.p1), n1);
            assert_eq!(rank(&pp.p2), n2);
            assert_eq!(pp, build_square_pilots(&cfg, 2).unwrap());
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let mut rng = substream(8, "test", 0);
        let m = cn_matrix(&mut rng, 3, 2);
        let text = matrix_to_text(&m);
        assert!(text.starts_with("3 2\n"));
        assert_eq!(matrix_from_text(&text).unwrap(), m);
        assert!(matrix_from_text("2 2\n1 0 1 0\n").is_err());
        assert!(matrix_from_text("x").is_err());
    }
}

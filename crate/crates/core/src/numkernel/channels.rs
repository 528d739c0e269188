//! Reciprocal user channels and the eavesdropper's channel.

use rand::Rng;

use crate::error::Result;
use crate::model::{ComplexMatrix, NetworkConfig};
use crate::numkernel::linalg::{hstack, vstack};
use crate::numkernel::rng::{cn_matrix, substream};

/// One coherence period of channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    antennas: Vec<usize>,
    /// Row-major M×M table; the diagonal is empty.
    user: Vec<Option<ComplexMatrix>>,
    /// H_E, N_E × N_T.
    pub eve_stacked: ComplexMatrix,
}

impl ChannelRealization {
    pub fn m(&self) -> usize {
        self.antennas.len()
    }

    pub fn antennas(&self) -> &[usize] {
        &self.antennas
    }

    /// H_{i,j}, N_i × N_j. Panics on `i == j`.
    pub fn h(&self, i: usize, j: usize) -> &ComplexMatrix {
        self.user[i * self.m() + j]
            .as_ref()
            .expect("no self channel")
    }

    /// H_{E,i}, the N_E × N_i column block of H_E.
    pub fn eve(&self, i: usize) -> ComplexMatrix {
        let off: usize = self.antennas[..i].iter().sum();
        self.eve_stacked.columns(off, self.antennas[i]).into_owned()
    }

    /// H_i = [H_{i,l}]_{l≠i}, N_i × (N_T − N_i).
    pub fn h_row(&self, i: usize) -> ComplexMatrix {
        let blocks: Vec<&ComplexMatrix> = (0..self.m())
            .filter(|&l| l != i)
            .map(|l| self.h(i, l))
            .collect();
        if blocks.is_empty() {
            return ComplexMatrix::zeros(self.antennas[i], 0);
        }
        hstack(&blocks).expect("blocks share N_i rows")
    }

    /// [H_{i,l}; H_{j,l}] stacked over l ∉ {i, j}, (N_i + N_j) × (N_T − N_i − N_j).
    pub fn h_pair_row(&self, i: usize, j: usize) -> ComplexMatrix {
        let rows = self.antennas[i] + self.antennas[j];
        let cols: Vec<ComplexMatrix> = (0..self.m())
            .filter(|&l| l != i && l != j)
            .map(|l| vstack(&[self.h(i, l), self.h(j, l)]).expect("same N_l columns"))
            .collect();
        if cols.is_empty() {
            return ComplexMatrix::zeros(rows, 0);
        }
        let refs: Vec<&ComplexMatrix> = cols.iter().collect();
        hstack(&refs).expect("same row count")
    }
}

/// Draws one realization from `rng`.
///
/// Upper-triangular blocks are drawn in (i, j) lexicographic order, then H_E.
/// H_{j,i} is set to H_{i,j}^T.
pub fn sample_channels_with<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    rng: &mut R,
) -> ChannelRealization {
    let m = cfg.m();
    let mut user = vec![None; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let h = cn_matrix(rng, cfg.antennas[i], cfg.antennas[j]);
            user[j * m + i] = Some(h.transpose());
            user[i * m + j] = Some(h);
        }
    }
    let eve_stacked = cn_matrix(rng, cfg.n_eve, cfg.n_total());
    ChannelRealization {
        antennas: cfg.antennas.clone(),
        user,
        eve_stacked,
    }
}

/// Deterministic realization for `seed`.
pub fn sample_channels(cfg: &NetworkConfig, seed: u64) -> ChannelRealization {
    sample_channels_with(cfg, &mut substream(seed, "channels", 0))
}

/// Rebuilds a realization from explicit blocks (used by tests and fixtures).
pub fn from_parts(
    antennas: Vec<usize>,
    upper: impl Fn(usize, usize) -> ComplexMatrix,
    eve_stacked: ComplexMatrix,
) -> Result<ChannelRealization> {
    let m = antennas.len();
    let mut user = vec![None; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let h = upper(i, j);
            if h.shape() != (antennas[i], antennas[j]) {
                return Err(crate::Error::ShapeMismatch(format!(
                    "H_{{{},{}}} must be {}×{}",
                    i + 1,
                    j + 1,
                    antennas[i],
                    antennas[j]
                )));
            }
            user[j * m + i] = Some(h.transpose());
            user[i * m + j] = Some(h);
        }
    }
    Ok(ChannelRealization {
        antennas,
        user,
        eve_stacked,
    })
}

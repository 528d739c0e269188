//! Sampling, synthesis and linear-algebra primitives.

pub mod channels;
pub mod linalg;
pub mod rng;
pub mod signals;

pub use channels::{sample_channels, sample_channels_with, ChannelRealization};
pub use linalg::{eig_growth_count, logdet_hpd, numerical_rank, rank};
pub use rng::substream;
pub use signals::{
    synth_modified_session, synth_phase1, synth_phase2, ModifiedSessionSignals, Phase1Signals,
    Phase2Signals,
};

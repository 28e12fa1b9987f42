//! Exact finite-alphabet probability: distributions, channels, joint laws
//! over the enrollment/identification chain, information functionals, and
//! strong typicality tests.

mod dist;
mod joint;
mod sample;
mod typicality;

pub use dist::{
    compose_channels, entropy, BisSystem, ChannelMatrix, DiscreteDistribution, MASS_TOL,
    MAX_ALPHABET,
};
pub use joint::{
    chain_joint, mutual_information, JointDistribution, AXIS_U, AXIS_V, AXIS_X, AXIS_Y, AXIS_Z,
};
pub use sample::{sample_sequence, sample_through_channel};
pub(crate) use sample::draw_symbol;
pub use typicality::{is_jointly_typical, is_strongly_typical, Sequence};

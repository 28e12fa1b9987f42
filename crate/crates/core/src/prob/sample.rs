//! Memoryless sampling of sequences from sources and through channels.

use rand::Rng;

use crate::prob::dist::{ChannelMatrix, DiscreteDistribution};
use crate::prob::typicality::Sequence;
use crate::rng::Stream;

/// Inverse-CDF draw from a probability row.
pub(crate) fn draw_symbol(probs: &[f64], rng: &mut Stream) -> u8 {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last_nonzero = 0u8;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i as u8;
            cum += p;
            if u < cum {
                return i as u8;
            }
        }
    }
    // u landed in the rounding dust above the last cumulative step
    last_nonzero
}

/// i.i.d. sequence of length `n` from a source distribution.
pub fn sample_sequence(d: &DiscreteDistribution, n: usize, rng: &mut Stream) -> Sequence {
    assert!(n >= 1, "block length must be at least 1");
    let probs = d.probs();
    let symbols = (0..n).map(|_| draw_symbol(probs, rng)).collect();
    Sequence::new(symbols, d.len())
}

/// Memoryless channel applied symbol by symbol.
pub fn sample_through_channel(seq: &Sequence, channel: &ChannelMatrix, rng: &mut Stream) -> Sequence {
    assert_eq!(seq.alphabet(), channel.rows(), "sequence alphabet does not match channel input");
    let symbols = seq
        .symbols()
        .iter()
        .map(|&x| draw_symbol(channel.row(x as usize), rng))
        .collect();
    Sequence::new(symbols, channel.cols())
}

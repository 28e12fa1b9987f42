//! Symbol sequences and the letter-frequency (strong) typicality test.

use crate::prob::dist::{DiscreteDistribution, MAX_ALPHABET};
use crate::prob::joint::JointDistribution;

/// A sequence of alphabet indices with a fixed alphabet size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    symbols: Vec<u8>,
    alphabet: u8,
}

impl Sequence {
    /// Panics if any symbol is outside the alphabet.
    pub fn new(symbols: Vec<u8>, alphabet: usize) -> Self {
        assert!(alphabet >= 1 && alphabet <= MAX_ALPHABET, "alphabet size {alphabet}");
        assert!(
            symbols.iter().all(|&s| (s as usize) < alphabet),
            "symbol outside alphabet {alphabet}"
        );
        Self { symbols, alphabet: alphabet as u8 }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet as usize
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Occurrence counts per symbol (the empirical type, unnormalized).
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.alphabet()];
        for &s in &self.symbols {
            counts[s as usize] += 1;
        }
        counts
    }
}

/// Letter-frequency typicality of a single sequence against a distribution:
/// every symbol `a` satisfies |N(a)/n - P(a)| <= delta, and symbols with
/// P(a) = 0 never occur.
pub fn is_strongly_typical(seq: &Sequence, d: &DiscreteDistribution, delta: f64) -> bool {
    assert!(delta > 0.0, "delta must be positive");
    assert_eq!(seq.alphabet(), d.len(), "sequence alphabet does not match distribution");
    assert!(!seq.is_empty(), "empty sequence");
    let n = seq.len() as f64;
    let counts = seq.counts();
    for (a, &c) in counts.iter().enumerate() {
        let p = d.prob(a);
        if p == 0.0 {
            if c != 0 {
                return false;
            }
            continue;
        }
        if (c as f64 / n - p).abs() > delta {
            return false;
        }
    }
    true
}

/// The same letter-frequency test applied to the empirical joint type of
/// parallel sequences against a joint distribution. `seqs[i]` runs over axis
/// `i` of `joint`; all sequences must share one length.
pub fn is_jointly_typical(seqs: &[&Sequence], joint: &JointDistribution, delta: f64) -> bool {
    assert!(delta > 0.0, "delta must be positive");
    assert_eq!(seqs.len(), joint.num_axes(), "one sequence per joint axis");
    let n = seqs[0].len();
    assert!(n > 0, "empty sequence");
    for (i, s) in seqs.iter().enumerate() {
        assert_eq!(s.len(), n, "sequence lengths differ");
        assert_eq!(s.alphabet(), joint.axes()[i], "sequence alphabet does not match axis {i}");
    }

    let strides = joint.strides();
    let mut counts = vec![0u32; joint.probs().len()];
    for t in 0..n {
        let mut cell = 0usize;
        for (s, &stride) in seqs.iter().zip(&strides) {
            cell += s.symbols()[t] as usize * stride;
        }
        counts[cell] += 1;
    }

    let nf = n as f64;
    for (&c, &p) in counts.iter().zip(joint.probs()) {
        if p == 0.0 {
            if c != 0 {
                return false;
            }
            continue;
        }
        if (c as f64 / nf - p).abs() > delta {
            return false;
        }
    }
    true
}

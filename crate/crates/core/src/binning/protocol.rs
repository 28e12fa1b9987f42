//! Encoder and decoders operating on a codebook: typicality enrollment,
//! full identification over the database, and the secret-only partial
//! decoder.

use rand::Rng;

use crate::binning::codebook::{Codebook, Database, Template, FALLBACK_SECRET, FALLBACK_TEMPLATE};
use crate::prob::{is_jointly_typical, Sequence};
use crate::rng::Stream;

/// Outcome of enrolling one observed sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enrollment {
    pub template: Template,
    pub secret: usize,
    /// Set when no codeword pair was jointly typical and the fixed fallback
    /// record was issued instead.
    pub fallback: bool,
}

/// Enroll an observed sequence: scan every (outer, inner) pair for joint
/// typicality with the encoder law, pick uniformly among the matches, and
/// map the matched inner index through the permutation to (bin, secret).
///
/// With no match, the fallback record (template (0, 0), secret 0) is issued
/// and flagged.
pub fn enroll(book: &Codebook, observed: &Sequence, delta: f64, rng: &mut Stream) -> Enrollment {
    let params = book.params();
    assert_eq!(observed.len(), params.n, "observed block length mismatch");

    let mut matches: Vec<(usize, usize)> = Vec::new();
    for m in 0..params.n_v {
        let outer = book.outer_word(m);
        for k in 0..params.n_u {
            let inner = book.inner_word(m, k);
            if is_jointly_typical(&[observed, outer, inner], book.encoder_joint(), delta) {
                matches.push((m, k));
            }
        }
    }

    if matches.is_empty() {
        return Enrollment { template: FALLBACK_TEMPLATE, secret: FALLBACK_SECRET, fallback: true };
    }
    let (m, k) = matches[rng.gen_range(0..matches.len())];
    let (b, s) = book.inner_to_bin_secret(m, k);
    Enrollment { template: Template { m, b }, secret: s, fallback: false }
}

/// Identify an observation against every stored record.
///
/// Returns `(individual, secret)` when exactly one individual has typical
/// codewords and exactly one secret within that record is typical; any
/// ambiguity or absence yields the fallback output (individual 0, secret 0).
pub fn identify(book: &Codebook, db: &Database, observed: &Sequence, delta: f64) -> (usize, usize) {
    let params = book.params();
    assert_eq!(observed.len(), params.n, "observed block length mismatch");

    let mut unique: Option<(usize, usize)> = None;
    for (i, record) in db.records().iter().enumerate() {
        let hits = typical_secrets(book, *record, observed, delta);
        match hits.len() {
            0 => continue,
            1 if unique.is_none() => unique = Some((i, hits[0])),
            // a second matching individual, or an ambiguous secret
            _ => return (0, FALLBACK_SECRET),
        }
    }
    unique.unwrap_or((0, FALLBACK_SECRET))
}

/// Secret-only decoder for one known record: returns the unique typical
/// secret, or 0 when none or several are typical.
pub fn partial_decode(
    book: &Codebook,
    template: Template,
    observed: &Sequence,
    delta: f64,
) -> usize {
    assert_eq!(observed.len(), book.params().n, "observed block length mismatch");
    let hits = typical_secrets(book, template, observed, delta);
    if hits.len() == 1 {
        hits[0]
    } else {
        FALLBACK_SECRET
    }
}

fn typical_secrets(
    book: &Codebook,
    template: Template,
    observed: &Sequence,
    delta: f64,
) -> Vec<usize> {
    let params = book.params();
    assert!(template.m < params.n_v && template.b < params.n_b, "template out of range");
    let outer = book.outer_word(template.m);
    (0..params.m_s)
        .filter(|&s| {
            let inner = book.binned_word(template.m, template.b, s);
            is_jointly_typical(&[observed, outer, inner], book.decoder_joint(), delta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::codebook::{build_codebook, CodeParams};
    use crate::prob::{BisSystem, ChannelMatrix, DiscreteDistribution};
    use crate::region::degradation_channel;
    use crate::rng;

    fn noiseless_system() -> BisSystem {
        BisSystem::new(
            DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
            ChannelMatrix::identity(2).unwrap(),
            ChannelMatrix::identity(2).unwrap(),
        )
        .unwrap()
    }

    fn toy_book(seed: u64) -> Codebook {
        let params = CodeParams { n: 6, delta: 0.4, n_v: 2, n_u: 4, m_s: 2, n_b: 2, m_i: 2 };
        build_codebook(
            &noiseless_system(),
            &ChannelMatrix::identity(2).unwrap(),
            &degradation_channel(2, 0.7).unwrap(),
            &params,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn unique_match_is_returned_with_its_bin_and_secret() {
        // With identity channels the observed sequence must be jointly
        // typical with a codeword pair close to it; enroll the outer word 0's
        // own shape by probing each inner word directly.
        let book = toy_book(5);
        let params = *book.params();
        let mut rng = rng::master(1);
        // pick an observed sequence equal to an inner word's Y-profile: use
        // the typicality scan itself as ground truth by checking consistency
        for m in 0..params.n_v {
            for k in 0..params.n_u {
                let y = book.inner_word(m, k).clone();
                // skip alphabets that differ (V/U alphabets match Y here)
                if y.alphabet() != 2 {
                    continue;
                }
                let e = enroll(&book, &y, params.delta, &mut rng);
                if !e.fallback {
                    let inner = book.bin_secret_to_inner(e.template.m, e.template.b, e.secret);
                    assert!(inner < params.n_u);
                }
            }
        }
    }

    #[test]
    fn impossible_observation_falls_back() {
        let book = toy_book(5);
        // constant sequence is far from the uniform marginal at tiny delta
        let y = Sequence::new(vec![0; 6], 2);
        let e = enroll(&book, &y, 1e-6, &mut rng::master(2));
        assert!(e.fallback);
        assert_eq!(e.template, FALLBACK_TEMPLATE);
        assert_eq!(e.secret, FALLBACK_SECRET);
    }

    #[test]
    fn identification_with_empty_matches_falls_back() {
        let book = toy_book(9);
        let db = Database::new(vec![Template { m: 0, b: 0 }, Template { m: 1, b: 1 }]);
        let z = Sequence::new(vec![0; 6], 2);
        assert_eq!(identify(&book, &db, &z, 1e-6), (0, FALLBACK_SECRET));
    }

    #[test]
    fn two_matching_individuals_force_the_fallback() {
        let book = toy_book(9);
        // identical records plus a slack that accepts everything: both
        // individuals match, so the decoder must give up
        let db = Database::new(vec![Template { m: 0, b: 0 }, Template { m: 0, b: 0 }]);
        let z = Sequence::new(vec![0, 1, 0, 1, 0, 1], 2);
        assert_eq!(identify(&book, &db, &z, 10.0), (0, FALLBACK_SECRET));
    }

    #[test]
    fn partial_decoder_falls_back_on_ambiguity() {
        let book = toy_book(9);
        // a huge slack makes every secret typical, forcing the fallback
        let z = Sequence::new(vec![0, 1, 0, 1, 0, 1], 2);
        assert_eq!(partial_decode(&book, Template { m: 0, b: 0 }, &z, 10.0), 0);
    }
}

//! Layered random codebooks: an outer layer of coarse codewords, an inner
//! layer of conditionally drawn codewords per outer word, and a uniformly
//! permuted partition of each inner layer into equal bins. The bin index is
//! the public half of a stored template; the within-bin position is the
//! secret.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prob::{
    chain_joint, BisSystem, ChannelMatrix, JointDistribution, Sequence, AXIS_U, AXIS_V, AXIS_Y,
    AXIS_Z,
};
use crate::rng::{substream, Stream};

/// Cap on total stored codeword symbols per codebook.
pub const STORAGE_CAP_SYMBOLS: usize = 1 << 20;

/// Cap on `n * rate` for any codebook exponent, keeping counts <= 2^16.
pub const MAX_EXPONENT: f64 = 16.0;

/// Sizes of one code instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams {
    /// Block length in symbols.
    pub n: usize,
    /// Typicality slack used by the encoder and decoders.
    pub delta: f64,
    /// Outer codewords.
    pub n_v: usize,
    /// Inner codewords per outer word.
    pub n_u: usize,
    /// Secrets per bin.
    pub m_s: usize,
    /// Bins per inner layer; `n_b * m_s == n_u` always.
    pub n_b: usize,
    /// Enrolled individuals.
    pub m_i: usize,
}

/// Designed rates, bits per symbol; counts become `ceil(2^(n * rate))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSpec {
    /// Outer-layer rate (covering).
    pub v_rate: f64,
    /// Inner-layer rate per outer word (covering).
    pub u_rate: f64,
    /// Secrets-per-bin rate (packing).
    pub s_rate: f64,
    /// Individual-count rate (packing).
    pub i_rate: f64,
}

impl RateSpec {
    /// The operating point the scheme targets for a given pair of test
    /// channels, pulled `margin` inside: covering exponents are scaled up by
    /// `1 + margin`, packing exponents down by `1 - margin`.
    ///
    /// The exponents are I(Y;V), I(Y;U|V), I(Z;U|V), I(Z;V) computed on the
    /// five-variable chain joint.
    pub fn corner_with_margin(
        system: &BisSystem,
        u_channel: &ChannelMatrix,
        v_channel: &ChannelMatrix,
        margin: f64,
    ) -> Result<RateSpec> {
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::invalid(format!("margin {margin} outside [0, 1)")));
        }
        let joint = chain_joint(system, u_channel, Some(v_channel))?;
        let i_yv = joint.mutual_information(&[AXIS_Y], &[AXIS_V])?;
        let i_yu_v = joint.conditional_mutual_information(&[AXIS_Y], &[AXIS_U], &[AXIS_V])?;
        let i_zu_v = joint.conditional_mutual_information(&[AXIS_Z], &[AXIS_U], &[AXIS_V])?;
        let i_zv = joint.mutual_information(&[AXIS_Z], &[AXIS_V])?;
        Ok(RateSpec {
            v_rate: (1.0 + margin) * i_yv,
            u_rate: (1.0 + margin) * i_yu_v,
            s_rate: (1.0 - margin) * i_zu_v,
            i_rate: (1.0 - margin) * i_zv,
        })
    }
}

fn count_from_rate(n: usize, rate: f64) -> usize {
    let raw = (n as f64 * rate).exp2().ceil();
    (raw as usize).max(1)
}

impl CodeParams {
    /// Derive counts from designed rates at block length `n`.
    ///
    /// Exact powers of two rarely align at desk scale, so the secrets-per-bin
    /// count is rounded down to the largest divisor of the inner-layer count
    /// and the bin count recomputed from the partition identity.
    pub fn from_rates(n: usize, delta: f64, rates: &RateSpec) -> Result<CodeParams> {
        if n == 0 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        if delta <= 0.0 {
            return Err(Error::invalid(format!("typicality slack {delta} must be positive")));
        }
        for (name, rate) in [
            ("outer", rates.v_rate),
            ("inner", rates.u_rate),
            ("secret", rates.s_rate),
            ("individual", rates.i_rate),
        ] {
            if rate < 0.0 {
                return Err(Error::invalid(format!("{name} rate {rate} is negative")));
            }
            if n as f64 * rate > MAX_EXPONENT {
                return Err(Error::ResourceLimit(format!(
                    "{name} exponent n * rate = {} exceeds cap {MAX_EXPONENT}",
                    n as f64 * rate
                )));
            }
        }
        let n_v = count_from_rate(n, rates.v_rate);
        let n_u = count_from_rate(n, rates.u_rate);
        let target_m_s = count_from_rate(n, rates.s_rate).min(n_u);
        let m_s = (1..=target_m_s).rev().find(|m| n_u % m == 0).unwrap_or(1);
        let n_b = n_u / m_s;
        let m_i = count_from_rate(n, rates.i_rate);
        let params = CodeParams { n, delta, n_v, n_u, m_s, n_b, m_i };
        params.validate()?;
        Ok(params)
    }

    /// Default typicality slack at block length `n`: 2 / sqrt(n).
    pub fn default_delta(n: usize) -> f64 {
        2.0 / (n as f64).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0
            || self.n_v == 0
            || self.n_u == 0
            || self.m_s == 0
            || self.n_b == 0
            || self.m_i == 0
        {
            return Err(Error::invalid("all code counts must be at least 1"));
        }
        if self.delta <= 0.0 {
            return Err(Error::invalid("typicality slack must be positive"));
        }
        if self.n_b * self.m_s != self.n_u {
            return Err(Error::invalid(format!(
                "bins must partition the inner layer: {} * {} != {}",
                self.n_b, self.m_s, self.n_u
            )));
        }
        Ok(())
    }

    /// Total stored symbols for one codebook instance.
    pub fn storage_symbols(&self) -> usize {
        self.n_v
            .saturating_mul(self.n_u)
            .saturating_add(self.n_v)
            .saturating_mul(self.n)
    }

    /// Template alphabet size: outer index times bin index.
    pub fn template_count(&self) -> usize {
        self.n_v * self.n_b
    }

    /// Exact designed rates (bits per symbol) of the instance: the
    /// identification, secrecy, and template log-cardinalities over `n`.
    pub fn rate_accounting(&self) -> RateAccounting {
        let n = self.n as f64;
        RateAccounting {
            identification: (self.m_i as f64).log2() / n,
            secrecy: (self.m_s as f64).log2() / n,
            template: (self.template_count() as f64).log2() / n,
        }
    }
}

/// Exact log-cardinality rates of a code instance, bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAccounting {
    pub identification: f64,
    pub secrecy: f64,
    pub template: f64,
}

/// Public half of one enrolled record: outer index and bin index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Template {
    pub m: usize,
    pub b: usize,
}

/// Fallback record used when enrollment or identification fails.
pub const FALLBACK_TEMPLATE: Template = Template { m: 0, b: 0 };
pub const FALLBACK_SECRET: usize = 0;

/// The stored public records of all enrolled individuals. Secrets are
/// returned to the individuals and never stored here.
#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    records: Vec<Template>,
}

impl Database {
    pub fn new(records: Vec<Template>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, individual: usize) -> Template {
        self.records[individual]
    }

    pub fn records(&self) -> &[Template] {
        &self.records
    }
}

/// A generated code instance: outer words, conditional inner words, and one
/// uniform permutation per outer word defining the bin layout.
#[derive(Debug, Clone)]
pub struct Codebook {
    params: CodeParams,
    seed: u64,
    v_words: Vec<Sequence>,
    u_words: Vec<Vec<Sequence>>,
    /// `perms[m][k]` is the permuted position of inner word `k`.
    perms: Vec<Vec<usize>>,
    /// `inv_perms[m][pos]` is the inner word at permuted position `pos`.
    inv_perms: Vec<Vec<usize>>,
    /// Joint law over (Y, V, U) used by the encoder.
    p_yvu: JointDistribution,
    /// Joint law over (Z, V, U) used by the decoders.
    p_zvu: JointDistribution,
}

impl Codebook {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn outer_word(&self, m: usize) -> &Sequence {
        &self.v_words[m]
    }

    pub fn inner_word(&self, m: usize, k: usize) -> &Sequence {
        &self.u_words[m][k]
    }

    /// The inner word stored in bin `b` at within-bin position `s`.
    pub fn binned_word(&self, m: usize, b: usize, s: usize) -> &Sequence {
        &self.u_words[m][self.bin_secret_to_inner(m, b, s)]
    }

    /// Map an inner index to its (bin, secret) pair through the permutation.
    pub fn inner_to_bin_secret(&self, m: usize, k: usize) -> (usize, usize) {
        let pos = self.perms[m][k];
        (pos / self.params.m_s, pos % self.params.m_s)
    }

    /// Inverse of [`Self::inner_to_bin_secret`].
    pub fn bin_secret_to_inner(&self, m: usize, b: usize, s: usize) -> usize {
        self.inv_perms[m][b * self.params.m_s + s]
    }

    pub fn permutation(&self, m: usize) -> &[usize] {
        &self.perms[m]
    }

    pub fn encoder_joint(&self) -> &JointDistribution {
        &self.p_yvu
    }

    pub fn decoder_joint(&self) -> &JointDistribution {
        &self.p_zvu
    }
}

/// Conditional channel P(U | V) extracted from a (V, U) marginal. Rows with
/// zero mass get a uniform placeholder; they are never sampled.
fn conditional_from_marginal(vu: &JointDistribution) -> Result<ChannelMatrix> {
    let nv = vu.axes()[0];
    let nu = vu.axes()[1];
    let mut rows = Vec::with_capacity(nv);
    for v in 0..nv {
        let mass: f64 = (0..nu).map(|u| vu.prob(&[v, u])).sum();
        if mass <= 0.0 {
            rows.push(vec![1.0 / nu as f64; nu]);
        } else {
            let mut row: Vec<f64> = (0..nu).map(|u| vu.prob(&[v, u]) / mass).collect();
            // guard rounding so the row passes the stochasticity check
            let sum: f64 = row.iter().sum();
            for p in &mut row {
                *p /= sum;
            }
            rows.push(row);
        }
    }
    ChannelMatrix::new(rows)
}

/// Generate a codebook for the given system and test channels.
///
/// Outer words are i.i.d. from the V marginal of the chain; inner words are
/// drawn symbol-by-symbol from P(U | V) conditioned on their outer word;
/// each outer word's permutation is an independent uniform shuffle. Lane
/// layout makes the result deterministic in `seed` and independent of
/// scheduling.
pub fn build_codebook(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
    v_channel: &ChannelMatrix,
    params: &CodeParams,
    seed: u64,
) -> Result<Codebook> {
    params.validate()?;
    if params.storage_symbols() > STORAGE_CAP_SYMBOLS {
        return Err(Error::ResourceLimit(format!(
            "codebook would store {} symbols, cap {STORAGE_CAP_SYMBOLS}",
            params.storage_symbols()
        )));
    }

    let joint = chain_joint(system, u_channel, Some(v_channel))?;
    let p_v = {
        let m = joint.marginal(&[AXIS_V])?;
        crate::prob::DiscreteDistribution::new(m.probs().to_vec())?
    };
    let p_u_given_v = conditional_from_marginal(&joint.marginal(&[AXIS_V, AXIS_U])?)?;
    let p_yvu = joint.marginal(&[AXIS_Y, AXIS_V, AXIS_U])?;
    let p_zvu = joint.marginal(&[AXIS_Z, AXIS_V, AXIS_U])?;

    let n_u_alphabet = u_channel.cols();

    // lane 0: outer words; lanes 1..=n_v: inner words; lanes n_v+1..: shuffles
    let v_words: Vec<Sequence> = {
        let mut rng = substream(seed, 0);
        (0..params.n_v).map(|_| crate::prob::sample_sequence(&p_v, params.n, &mut rng)).collect()
    };

    let u_words: Vec<Vec<Sequence>> = (0..params.n_v)
        .into_par_iter()
        .map(|m| {
            let mut rng = substream(seed, 1 + m as u64);
            let v = &v_words[m];
            (0..params.n_u)
                .map(|_| {
                    let symbols = v
                        .symbols()
                        .iter()
                        .map(|&vs| crate::prob::draw_symbol(p_u_given_v.row(vs as usize), &mut rng))
                        .collect();
                    Sequence::new(symbols, n_u_alphabet)
                })
                .collect()
        })
        .collect();

    let perms: Vec<Vec<usize>> = (0..params.n_v)
        .into_par_iter()
        .map(|m| {
            let mut rng = substream(seed, 1 + params.n_v as u64 + m as u64);
            let mut perm: Vec<usize> = (0..params.n_u).collect();
            perm.shuffle(&mut rng);
            perm
        })
        .collect();
    let inv_perms: Vec<Vec<usize>> = perms
        .iter()
        .map(|perm| {
            let mut inv = vec![0usize; perm.len()];
            for (k, &pos) in perm.iter().enumerate() {
                inv[pos] = k;
            }
            inv
        })
        .collect();

    Ok(Codebook {
        params: *params,
        seed,
        v_words,
        u_words,
        perms,
        inv_perms,
        p_yvu,
        p_zvu,
    })
}

/// Draw a fresh seed for a derived codebook from a trial stream.
pub fn derive_seed(rng: &mut Stream) -> u64 {
    rng.gen()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::DiscreteDistribution;
    use crate::region::degradation_channel;

    fn fig_system() -> BisSystem {
        BisSystem::new(
            DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
        )
        .unwrap()
    }

    fn toy_params() -> CodeParams {
        CodeParams { n: 8, delta: 0.5, n_v: 4, n_u: 16, m_s: 4, n_b: 4, m_i: 2 }
    }

    #[test]
    fn single_word_book_has_identity_permutation() {
        let params = CodeParams { n: 4, delta: 0.5, n_v: 1, n_u: 1, m_s: 1, n_b: 1, m_i: 1 };
        let book = build_codebook(
            &fig_system(),
            &ChannelMatrix::identity(2).unwrap(),
            &degradation_channel(2, 0.5).unwrap(),
            &params,
            3,
        )
        .unwrap();
        assert_eq!(book.permutation(0), &[0]);
        assert_eq!(book.inner_to_bin_secret(0, 0), (0, 0));
    }

    #[test]
    fn same_seed_rebuilds_identical_codebook() {
        let params = toy_params();
        let u = ChannelMatrix::identity(2).unwrap();
        let v = degradation_channel(2, 0.5).unwrap();
        let a = build_codebook(&fig_system(), &u, &v, &params, 77).unwrap();
        let b = build_codebook(&fig_system(), &u, &v, &params, 77).unwrap();
        for m in 0..params.n_v {
            assert_eq!(a.outer_word(m), b.outer_word(m));
            assert_eq!(a.permutation(m), b.permutation(m));
            for k in 0..params.n_u {
                assert_eq!(a.inner_word(m, k), b.inner_word(m, k));
            }
        }
    }

    #[test]
    fn bins_partition_the_inner_layer_exactly() {
        let params = toy_params();
        let book = build_codebook(
            &fig_system(),
            &ChannelMatrix::identity(2).unwrap(),
            &degradation_channel(2, 0.5).unwrap(),
            &params,
            123,
        )
        .unwrap();
        for m in 0..params.n_v {
            let mut per_bin = vec![0usize; params.n_b];
            let mut seen = vec![false; params.n_u];
            for k in 0..params.n_u {
                let (b, s) = book.inner_to_bin_secret(m, k);
                assert!(b < params.n_b && s < params.m_s);
                per_bin[b] += 1;
                // round-trip through the inverse mapping
                let k2 = book.bin_secret_to_inner(m, b, s);
                assert_eq!(k2, k);
                assert!(!seen[k], "inner word mapped twice");
                seen[k] = true;
            }
            assert!(per_bin.iter().all(|&c| c == params.m_s), "bin sizes {per_bin:?}");
        }
    }

    #[test]
    fn inner_words_follow_their_outer_word() {
        // both test channels lossless: the conditional law P(U | V) is the
        // identity, so every inner word must copy its outer word
        let params = toy_params();
        let book = build_codebook(
            &fig_system(),
            &ChannelMatrix::identity(2).unwrap(),
            &ChannelMatrix::identity(2).unwrap(),
            &params,
            9,
        )
        .unwrap();
        for m in 0..params.n_v {
            for k in 0..params.n_u {
                assert_eq!(book.inner_word(m, k).symbols(), book.outer_word(m).symbols());
            }
        }
    }

    #[test]
    fn params_from_rates_keep_partition_identity() {
        let rates = RateSpec { v_rate: 0.1, u_rate: 0.3, s_rate: 0.1, i_rate: 0.05 };
        for n in [8, 16, 24, 32] {
            let p = CodeParams::from_rates(n, CodeParams::default_delta(n), &rates).unwrap();
            assert_eq!(p.n_b * p.m_s, p.n_u);
            assert!(p.m_i >= 1);
        }
    }

    #[test]
    fn oversized_exponent_is_a_resource_error() {
        let rates = RateSpec { v_rate: 0.1, u_rate: 0.9, s_rate: 0.1, i_rate: 0.05 };
        assert!(matches!(
            CodeParams::from_rates(32, 0.2, &rates),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn storage_cap_is_enforced() {
        let params =
            CodeParams { n: 64, delta: 0.25, n_v: 256, n_u: 4096, m_s: 4, n_b: 1024, m_i: 2 };
        assert!(matches!(
            build_codebook(
                &fig_system(),
                &ChannelMatrix::identity(2).unwrap(),
                &degradation_channel(2, 0.5).unwrap(),
                &params,
                1,
            ),
            Err(Error::ResourceLimit(_))
        ));
    }
}

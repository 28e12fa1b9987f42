//! Monte Carlo estimation of the scheme's operational quantities: worst-
//! individual error rate, the secret-only decoder's error rate, plug-in
//! secrecy leakage, and a type-bucketed plug-in estimate of the privacy-
//! leakage rate.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::binning::codebook::{
    build_codebook, derive_seed, CodeParams, Codebook, Database, RateAccounting,
};
use crate::binning::protocol::{enroll, identify, partial_decode};
use crate::error::{Error, Result};
use crate::prob::{sample_sequence, sample_through_channel, BisSystem, ChannelMatrix};
use crate::rng::substream;

/// Lane offsets: one lane per trial, one for the shared-codebook mode.
/// Blocks are disjoint from the region-search lanes so one master seed can
/// drive both layers without stream reuse.
const LANE_TRIAL: u64 = 4 << 32;
const LANE_SHARED_BOOK: u64 = 5 << 32;

/// Simulation policy knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Draw a fresh codebook every trial (the ensemble average). Disable to
    /// keep one fixed codebook across trials, which stabilizes the leakage
    /// histograms.
    pub fresh_codebook: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { fresh_codebook: true }
    }
}

/// Estimates from one simulation run. Error rates are worst-individual
/// fractions; leakage values are plug-in estimates from empirical
/// histograms aggregated over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// Worst per-individual identification error rate.
    pub max_error_rate: f64,
    /// 95% binomial half-width of `max_error_rate` at its individual.
    pub max_error_half_width: f64,
    /// Worst per-individual error rate of the secret-only decoder, measured
    /// on the same observations as the full decoder.
    pub partial_error_rate: f64,
    /// Plug-in I(secret; template) in bits over the pooled histogram.
    pub secrecy_leakage_bits: f64,
    /// Upper-biased plug-in estimate of the per-symbol leakage between raw
    /// bio-data and the stored template: I(type bucket; template) / n. The
    /// exact quantity conditions on the full sequence, which is exponential
    /// in n, so sequences are bucketed by empirical type.
    pub privacy_leakage_rate: f64,
    pub trials: usize,
    /// Fraction of enrollments that hit the no-typical-pair fallback.
    pub fallback_rate: f64,
    /// Exact designed rates of the instance (log-cardinalities over n).
    pub rates: RateAccounting,
}

#[derive(Clone)]
struct Tally {
    full_errors: Vec<u64>,
    full_samples: Vec<u64>,
    partial_errors: Vec<u64>,
    enrollments: u64,
    fallbacks: u64,
    secret_template: BTreeMap<(u32, u32), u64>,
    type_template: BTreeMap<(Vec<u16>, u32), u64>,
}

impl Tally {
    fn new(individuals: usize) -> Self {
        Self {
            full_errors: vec![0; individuals],
            full_samples: vec![0; individuals],
            partial_errors: vec![0; individuals],
            enrollments: 0,
            fallbacks: 0,
            secret_template: BTreeMap::new(),
            type_template: BTreeMap::new(),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.full_errors.iter_mut().zip(&other.full_errors) {
            *a += b;
        }
        for (a, b) in self.full_samples.iter_mut().zip(&other.full_samples) {
            *a += b;
        }
        for (a, b) in self.partial_errors.iter_mut().zip(&other.partial_errors) {
            *a += b;
        }
        self.enrollments += other.enrollments;
        self.fallbacks += other.fallbacks;
        for (k, v) in other.secret_template {
            *self.secret_template.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.type_template {
            *self.type_template.entry(k).or_insert(0) += v;
        }
        self
    }
}

/// Plug-in mutual information (bits) of an empirical joint histogram.
fn plugin_mi<A: Ord + Clone, B: Ord + Clone>(counts: &BTreeMap<(A, B), u64>) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let tf = total as f64;
    let mut left: BTreeMap<A, u64> = BTreeMap::new();
    let mut right: BTreeMap<B, u64> = BTreeMap::new();
    for ((a, b), &c) in counts {
        *left.entry(a.clone()).or_insert(0) += c;
        *right.entry(b.clone()).or_insert(0) += c;
    }
    let h = |iter: &mut dyn Iterator<Item = u64>| -> f64 {
        let mut acc = 0.0;
        for c in iter {
            if c > 0 {
                let p = c as f64 / tf;
                acc -= p * p.log2();
            }
        }
        acc
    };
    let h_a = h(&mut left.values().copied());
    let h_b = h(&mut right.values().copied());
    let h_ab = h(&mut counts.values().copied());
    h_a + h_b - h_ab
}

fn binomial_half_width(errors: u64, samples: u64) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let p = errors as f64 / samples as f64;
    1.96 * (p * (1.0 - p) / samples as f64).sqrt()
}

/// Run `trials` independent enrollment/identification rounds and aggregate.
///
/// Each trial enrolls `params.m_i` fresh individuals, identifies one of them
/// in round-robin order (so the max over individuals is measured, not an
/// average over a prior), and also runs the secret-only decoder for the
/// identified individual on the same observation. Deterministic in
/// `(seed, params, trials, options)`.
pub fn run_simulation(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
    v_channel: &ChannelMatrix,
    params: &CodeParams,
    trials: usize,
    seed: u64,
    options: SimOptions,
) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    params.validate()?;

    let shared_book: Option<Arc<Codebook>> = if options.fresh_codebook {
        None
    } else {
        let book_seed = derive_seed(&mut substream(seed, LANE_SHARED_BOOK));
        Some(Arc::new(build_codebook(system, u_channel, v_channel, params, book_seed)?))
    };

    // Probe one build in fresh mode so size violations fail before the
    // parallel loop.
    if options.fresh_codebook {
        let probe_seed = derive_seed(&mut substream(seed, LANE_TRIAL));
        build_codebook(system, u_channel, v_channel, params, probe_seed)?;
    }

    let m_i = params.m_i;
    let n = params.n;
    let delta = params.delta;

    let tally = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Tally> {
            let mut rng = substream(seed, LANE_TRIAL + t as u64);
            let book_local;
            let book: &Codebook = match &shared_book {
                Some(shared) => {
                    let _ = derive_seed(&mut rng); // keep stream layout mode-independent
                    shared
                }
                None => {
                    let book_seed = derive_seed(&mut rng);
                    book_local =
                        build_codebook(system, u_channel, v_channel, params, book_seed)?;
                    &book_local
                }
            };

            let mut tally = Tally::new(m_i);
            let w = t % m_i;

            let mut sources = Vec::with_capacity(m_i);
            let mut templates = Vec::with_capacity(m_i);
            let mut secrets = Vec::with_capacity(m_i);
            for _ in 0..m_i {
                let x = sample_sequence(system.source(), n, &mut rng);
                let y = sample_through_channel(&x, system.enrollment(), &mut rng);
                let e = enroll(book, &y, delta, &mut rng);
                tally.enrollments += 1;
                if e.fallback {
                    tally.fallbacks += 1;
                }
                let template_index = (e.template.m * params.n_b + e.template.b) as u32;
                *tally
                    .secret_template
                    .entry((e.secret as u32, template_index))
                    .or_insert(0) += 1;
                let x_type: Vec<u16> = x.counts().iter().map(|&c| c as u16).collect();
                *tally.type_template.entry((x_type, template_index)).or_insert(0) += 1;
                sources.push(x);
                templates.push(e.template);
                secrets.push(e.secret);
            }

            let observed =
                sample_through_channel(&sources[w], system.identification(), &mut rng);
            let db = Database::new(templates.clone());
            let decoded = identify(book, &db, &observed, delta);
            tally.full_samples[w] += 1;
            if decoded != (w, secrets[w]) {
                tally.full_errors[w] += 1;
            }
            let partial = partial_decode(book, templates[w], &observed, delta);
            if partial != secrets[w] {
                tally.partial_errors[w] += 1;
            }
            Ok(tally)
        })
        .try_reduce(|| Tally::new(m_i), |a, b| Ok(a.merge(b)))?;

    let mut max_error_rate = 0.0f64;
    let mut max_error_half_width = 0.0f64;
    let mut partial_error_rate = 0.0f64;
    for i in 0..m_i {
        let samples = tally.full_samples[i];
        if samples == 0 {
            continue;
        }
        let full = tally.full_errors[i] as f64 / samples as f64;
        if full > max_error_rate {
            max_error_rate = full;
            max_error_half_width = binomial_half_width(tally.full_errors[i], samples);
        }
        partial_error_rate =
            partial_error_rate.max(tally.partial_errors[i] as f64 / samples as f64);
    }

    Ok(SimulationResult {
        max_error_rate,
        max_error_half_width,
        partial_error_rate,
        secrecy_leakage_bits: plugin_mi(&tally.secret_template),
        privacy_leakage_rate: plugin_mi(&tally.type_template) / n as f64,
        trials,
        fallback_rate: tally.fallbacks as f64 / tally.enrollments.max(1) as f64,
        rates: params.rate_accounting(),
    })
}

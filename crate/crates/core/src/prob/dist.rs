//! Finite-alphabet distributions, row-stochastic channels, and the system
//! triple (source, enrollment channel, identification channel).

use crate::error::{Error, Result};

/// Absolute tolerance for probability-mass checks.
pub const MASS_TOL: f64 = 1e-12;

/// Largest alphabet accepted per axis. Keeps dense joint tensors small
/// (at most 16^5 cells for the five-variable chain).
pub const MAX_ALPHABET: usize = 16;

fn check_alphabet(len: usize, what: &str) -> Result<()> {
    if len == 0 {
        return Err(Error::invalid(format!("{what}: alphabet must be non-empty")));
    }
    if len > MAX_ALPHABET {
        return Err(Error::invalid(format!(
            "{what}: alphabet size {len} exceeds cap {MAX_ALPHABET}"
        )));
    }
    Ok(())
}

fn check_mass(probs: &[f64], what: &str) -> Result<()> {
    let mut sum = 0.0;
    for &p in probs {
        if !p.is_finite() || p < 0.0 || p > 1.0 + MASS_TOL {
            return Err(Error::invalid(format!("{what}: entry {p} outside [0, 1]")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > MASS_TOL {
        return Err(Error::invalid(format!("{what}: mass {sum} is not 1 within {MASS_TOL}")));
    }
    Ok(())
}

/// Probability vector over a finite alphabet.
///
/// Entries are validated on construction (each in `[0, 1]`, total mass 1
/// within [`MASS_TOL`]) and immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_alphabet(probs.len(), "distribution")?;
        check_mass(&probs, "distribution")?;
        Ok(Self { probs })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        check_alphabet(len, "distribution")?;
        Ok(Self { probs: vec![1.0 / len as f64; len] })
    }

    /// All mass on `symbol`.
    pub fn point_mass(len: usize, symbol: usize) -> Result<Self> {
        check_alphabet(len, "distribution")?;
        if symbol >= len {
            return Err(Error::invalid(format!("point mass at {symbol} outside alphabet {len}")));
        }
        let mut probs = vec![0.0; len];
        probs[symbol] = 1.0;
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Shannon entropy in bits, with the convention 0 log 0 = 0.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }
}

/// -sum p log2 p over the given mass values (need not be a full vector).
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Entropy of a distribution, in bits.
pub fn entropy(d: &DiscreteDistribution) -> f64 {
    d.entropy()
}

/// Row-stochastic conditional distribution: `rows` input symbols, `cols`
/// output symbols, row `x` holding `P(output | input = x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>, // row-major
}

impl ChannelMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        check_alphabet(rows.len(), "channel input")?;
        let cols = rows[0].len();
        check_alphabet(cols, "channel output")?;
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(format!(
                    "channel row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            check_mass(row, &format!("channel row {i}"))?;
            entries.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, entries })
    }

    pub fn identity(len: usize) -> Result<Self> {
        check_alphabet(len, "channel")?;
        let mut entries = vec![0.0; len * len];
        for i in 0..len {
            entries[i * len + i] = 1.0;
        }
        Ok(Self { rows: len, cols: len, entries })
    }

    /// Every row equals the uniform distribution on `cols` symbols:
    /// output independent of input.
    pub fn uniform(rows: usize, cols: usize) -> Result<Self> {
        check_alphabet(rows, "channel input")?;
        check_alphabet(cols, "channel output")?;
        Ok(Self { rows, cols, entries: vec![1.0 / cols as f64; rows * cols] })
    }

    /// Deterministic map: input `x` goes to `map[x]` with probability 1.
    pub fn deterministic(map: &[usize], cols: usize) -> Result<Self> {
        check_alphabet(map.len(), "channel input")?;
        check_alphabet(cols, "channel output")?;
        let mut entries = vec![0.0; map.len() * cols];
        for (x, &y) in map.iter().enumerate() {
            if y >= cols {
                return Err(Error::invalid(format!("map sends {x} to {y} outside alphabet {cols}")));
            }
            entries[x * cols + y] = 1.0;
        }
        Ok(Self { rows: map.len(), cols, entries })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn binary_symmetric(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.cols..(x + 1) * self.cols]
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.cols + y]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|x| self.row(x).to_vec()).collect()
    }
}

/// Matrix product of two channels: feed the output of `first` into `second`.
///
/// `first.cols` must equal `second.rows`; the product is row-stochastic
/// within [`MASS_TOL`] by construction.
pub fn compose_channels(first: &ChannelMatrix, second: &ChannelMatrix) -> Result<ChannelMatrix> {
    if first.cols != second.rows {
        return Err(Error::invalid(format!(
            "cannot compose {}x{} with {}x{}",
            first.rows, first.cols, second.rows, second.cols
        )));
    }
    let mut rows = Vec::with_capacity(first.rows);
    for x in 0..first.rows {
        let mut row = vec![0.0; second.cols];
        for mid in 0..first.cols {
            let w = first.entry(x, mid);
            if w == 0.0 {
                continue;
            }
            for (z, out) in row.iter_mut().enumerate() {
                *out += w * second.entry(mid, z);
            }
        }
        rows.push(row);
    }
    ChannelMatrix::new(rows)
}

/// One problem instance: source `P_X`, enrollment channel `P_{Y|X}`, and
/// identification channel `P_{Z|X}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BisSystem {
    source: DiscreteDistribution,
    enrollment: ChannelMatrix,
    identification: ChannelMatrix,
}

impl BisSystem {
    pub fn new(
        source: DiscreteDistribution,
        enrollment: ChannelMatrix,
        identification: ChannelMatrix,
    ) -> Result<Self> {
        if enrollment.rows() != source.len() || identification.rows() != source.len() {
            return Err(Error::invalid(format!(
                "channel input sizes ({}, {}) must match source alphabet {}",
                enrollment.rows(),
                identification.rows(),
                source.len()
            )));
        }
        Ok(Self { source, enrollment, identification })
    }

    pub fn source(&self) -> &DiscreteDistribution {
        &self.source
    }

    pub fn enrollment(&self) -> &ChannelMatrix {
        &self.enrollment
    }

    pub fn identification(&self) -> &ChannelMatrix {
        &self.identification
    }

    pub fn source_len(&self) -> usize {
        self.source.len()
    }

    pub fn enrolled_len(&self) -> usize {
        self.enrollment.cols()
    }

    pub fn observed_len(&self) -> usize {
        self.identification.cols()
    }

    /// Same source and identification channel, enrollment replaced by the
    /// identity (the stored observation equals the raw bio-data).
    pub fn with_noiseless_enrollment(&self) -> Self {
        Self {
            source: self.source.clone(),
            enrollment: ChannelMatrix::identity(self.source.len()).expect("valid size"),
            identification: self.identification.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Closed-form binary entropy, used as the oracle for derived values.
    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn entropy_uniform_binary() {
        let d = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(d.entropy(), 1.0);
    }

    #[test]
    fn entropy_deterministic() {
        let d = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(d.entropy(), 0.0);
    }

    #[test]
    fn entropy_skewed_binary_matches_closed_form() {
        let d = DiscreteDistribution::new(vec![0.9, 0.1]).unwrap();
        assert_abs_diff_eq!(d.entropy(), h2(0.1), epsilon = 1e-15);
        // 0.46899 to five decimals
        assert_abs_diff_eq!(d.entropy(), 0.468_995_593_589_281, epsilon = 1e-12);
    }

    #[test]
    fn distribution_rejects_bad_mass() {
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, -0.5, 1.0]).is_err());
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0 / 17.0; 17]).is_err());
    }

    #[test]
    fn channel_rejects_non_stochastic_rows() {
        assert!(ChannelMatrix::new(vec![vec![0.9, 0.2], vec![0.1, 0.9]]).is_err());
        assert!(ChannelMatrix::new(vec![vec![0.9, 0.1], vec![0.1]]).is_err());
    }

    #[test]
    fn compose_identity_is_exact() {
        let c = ChannelMatrix::new(vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let id = ChannelMatrix::identity(2).unwrap();
        assert_eq!(compose_channels(&id, &c).unwrap(), c);
    }

    #[test]
    fn compose_binary_symmetric_crossovers_add() {
        // p then q gives crossover p(1-q) + q(1-p)
        let a = ChannelMatrix::binary_symmetric(0.1).unwrap();
        let c = compose_channels(&a, &a).unwrap();
        assert_abs_diff_eq!(c.entry(0, 1), 0.18, epsilon = 1e-15);
        assert_abs_diff_eq!(c.entry(1, 0), 0.18, epsilon = 1e-15);
    }

    #[test]
    fn compose_into_constant_channel_erases_input() {
        let c = ChannelMatrix::new(vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let constant = ChannelMatrix::uniform(2, 3).unwrap();
        let out = compose_channels(&c, &constant).unwrap();
        for x in 0..2 {
            for z in 0..3 {
                assert_abs_diff_eq!(out.entry(x, z), 1.0 / 3.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = ChannelMatrix::uniform(2, 3).unwrap();
        let b = ChannelMatrix::uniform(2, 2).unwrap();
        assert!(compose_channels(&a, &b).is_err());
    }

    #[test]
    fn system_checks_dimensions() {
        let src = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        let good = ChannelMatrix::binary_symmetric(0.1).unwrap();
        let bad = ChannelMatrix::uniform(3, 2).unwrap();
        assert!(BisSystem::new(src.clone(), good.clone(), good.clone()).is_ok());
        assert!(BisSystem::new(src, good, bad).is_err());
    }
}

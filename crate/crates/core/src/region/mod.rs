//! Achievable-rate geometry for the identification / secrecy / template /
//! privacy-leakage trade-off.
//!
//! A test channel `P_{U|Y}` applied to the chain Z - X - Y - U yields the
//! rate triple (I(Z;U), I(Y;U), I(X;U)). For a fixed witness and a feasible
//! identification rate `r_i` (with secrecy slice `r_s`), the minimal template
//! and privacy-leakage rates are
//!
//!   r_j = I(Y;U) - I(Z;U) + r_i,
//!   r_l = I(X;U) - I(Z;U) + r_i,
//!
//! subject to r_i + r_s <= I(Z;U). [`search::sample_region`] traces the
//! boundary over sampled witnesses; [`a2_witness_for`] realizes the same
//! point in the two-auxiliary-variable form by degrading U into V until
//! I(Z;V) hits r_i.

pub mod search;

use rand::Rng;

use crate::error::{Error, Result};
use crate::prob::{
    chain_joint, BisSystem, ChannelMatrix, JointDistribution, AXIS_U, AXIS_V, AXIS_X, AXIS_Y,
    AXIS_Z,
};
use crate::rng::Stream;

pub use search::{
    random_stochastic_channel, sample_region, CornerRecord, RegionSample, SearchConfig,
};

/// Tolerance used for feasibility slack on rate budgets.
const BUDGET_TOL: f64 = 1e-12;

/// Convergence target for the degradation bisection.
const WITNESS_TOL: f64 = 1e-6;

const BISECTION_MAX_ITERS: usize = 200;

/// A rate point (bits per symbol). Identification and secrecy rates are
/// nonnegative by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTuple {
    pub r_i: f64,
    pub r_s: f64,
    pub r_j: f64,
    pub r_l: f64,
}

/// The three mutual informations a witness test channel induces on the
/// chain, together with the witness itself.
#[derive(Debug, Clone)]
pub struct TestChannelRates {
    pub i_zu: f64,
    pub i_yu: f64,
    pub i_xu: f64,
    pub u_channel: ChannelMatrix,
}

/// Minimal (r_j, r_l) for a witness at a given (r_i, r_s), with a flag
/// recording whether either coordinate was clamped up to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerPoint {
    pub rates: RateTuple,
    pub clamped: bool,
}

/// Degradation witness realizing a target identification rate in the
/// two-auxiliary-variable form: `v_channel` mixes the identity with a
/// uniform output, and `lambda` is the mixing weight found by bisection.
#[derive(Debug, Clone)]
pub struct A2Witness {
    pub u_channel: ChannelMatrix,
    pub v_channel: ChannelMatrix,
    pub lambda: f64,
    pub achieved_i_zv: f64,
}

/// Evaluate a witness test channel on the chain.
///
/// The witness may use at most |Y| + 2 output symbols; larger alphabets are
/// rejected (use [`rates_for_test_channel_unbounded`] to experiment past the
/// bound).
pub fn rates_for_test_channel(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
) -> Result<TestChannelRates> {
    let cap = system.enrolled_len() + 2;
    if u_channel.cols() > cap {
        return Err(Error::invalid(format!(
            "witness uses {} output symbols, cardinality bound is {cap}",
            u_channel.cols()
        )));
    }
    rates_for_test_channel_unbounded(system, u_channel)
}

/// Same as [`rates_for_test_channel`] without the cardinality bound.
pub fn rates_for_test_channel_unbounded(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
) -> Result<TestChannelRates> {
    let joint = chain_joint(system, u_channel, None)?;
    Ok(TestChannelRates {
        i_zu: joint.mutual_information(&[AXIS_Z], &[AXIS_U])?,
        i_yu: joint.mutual_information(&[AXIS_Y], &[AXIS_U])?,
        i_xu: joint.mutual_information(&[AXIS_X], &[AXIS_U])?,
        u_channel: u_channel.clone(),
    })
}

/// Minimal template and privacy-leakage rates for `rates` at `(r_i, r_s)`.
pub fn corner_point(rates: &TestChannelRates, r_i: f64, r_s: f64) -> Result<CornerPoint> {
    if r_i < 0.0 || r_s < 0.0 {
        return Err(Error::invalid(format!("rates must be nonnegative, got ({r_i}, {r_s})")));
    }
    if r_i + r_s > rates.i_zu + BUDGET_TOL {
        return Err(Error::infeasible(format!(
            "r_i + r_s = {} exceeds the witness budget {}",
            r_i + r_s,
            rates.i_zu
        )));
    }
    let raw_j = rates.i_yu - rates.i_zu + r_i;
    let raw_l = rates.i_xu - rates.i_zu + r_i;
    let clamped = raw_j < 0.0 || raw_l < 0.0;
    Ok(CornerPoint {
        rates: RateTuple { r_i, r_s, r_j: raw_j.max(0.0), r_l: raw_l.max(0.0) },
        clamped,
    })
}

/// The degradation family: `lambda` * identity + (1 - `lambda`) * uniform
/// output, on a square alphabet.
pub fn degradation_channel(len: usize, lambda: f64) -> Result<ChannelMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("mixing weight {lambda} outside [0, 1]")));
    }
    let off = (1.0 - lambda) / len as f64;
    let rows = (0..len)
        .map(|i| (0..len).map(|j| if i == j { lambda + off } else { off }).collect())
        .collect();
    ChannelMatrix::new(rows)
}

fn i_zv_at(system: &BisSystem, u_channel: &ChannelMatrix, lambda: f64) -> Result<f64> {
    let v = degradation_channel(u_channel.cols(), lambda)?;
    let joint = chain_joint(system, u_channel, Some(&v))?;
    joint.mutual_information(&[AXIS_Z], &[AXIS_V])
}

/// Find a second test channel `P_{V|U}` with I(Z;V) equal to the target
/// identification rate, by bisecting the degradation family's mixing weight.
///
/// Requires `0 <= r_i <= I(Z;U)` for the given witness. Fails with
/// `NumericalFailure` if bisection does not converge to within 1e-6 in 200
/// iterations.
pub fn a2_witness_for(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
    r_i: f64,
) -> Result<A2Witness> {
    if r_i < 0.0 {
        return Err(Error::invalid(format!("target rate {r_i} is negative")));
    }
    let joint = chain_joint(system, u_channel, None)?;
    let i_zu = joint.mutual_information(&[AXIS_Z], &[AXIS_U])?;
    if r_i > i_zu + 1e-9 {
        return Err(Error::infeasible(format!(
            "target rate {r_i} exceeds I(Z;U) = {i_zu} for this witness"
        )));
    }

    let witness = |lambda: f64, achieved: f64| -> Result<A2Witness> {
        Ok(A2Witness {
            u_channel: u_channel.clone(),
            v_channel: degradation_channel(u_channel.cols(), lambda)?,
            lambda,
            achieved_i_zv: achieved,
        })
    };

    // Endpoints first: lambda = 0 detaches V, lambda = 1 copies U.
    let f_lo = i_zv_at(system, u_channel, 0.0)?;
    if (f_lo - r_i).abs() <= WITNESS_TOL {
        return witness(0.0, f_lo);
    }
    let f_hi = i_zv_at(system, u_channel, 1.0)?;
    if (f_hi - r_i).abs() <= WITNESS_TOL {
        return witness(1.0, f_hi);
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let f_mid = i_zv_at(system, u_channel, mid)?;
        if (f_mid - r_i).abs() <= WITNESS_TOL {
            return witness(mid, f_mid);
        }
        if f_mid < r_i {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NumericalFailure(format!(
        "degradation bisection did not reach {r_i} within {BISECTION_MAX_ITERS} iterations"
    )))
}

/// Both rate bounds shared by the one- and two-auxiliary forms, evaluated on
/// a five-variable joint: (template bound, leakage bound) with I(Z;V) taken
/// from the joint itself.
pub fn two_auxiliary_bounds(joint: &JointDistribution) -> Result<(f64, f64)> {
    let i_zu = joint.mutual_information(&[AXIS_Z], &[AXIS_U])?;
    let i_zv = joint.mutual_information(&[AXIS_Z], &[AXIS_V])?;
    let i_yu = joint.mutual_information(&[AXIS_Y], &[AXIS_U])?;
    let i_xu = joint.mutual_information(&[AXIS_X], &[AXIS_U])?;
    Ok((i_yu - i_zu + i_zv, i_xu - i_zu + i_zv))
}

/// Outcome of the reduction checks in [`check_special_cases`].
#[derive(Debug, Clone, Copy)]
pub struct SpecialCasesReport {
    /// Max |I(Y;U) - I(X;U)| over witnesses on the noiseless-enrollment
    /// variant of the system (template and leakage minima must coincide).
    pub noiseless_max_dev: f64,
    pub noiseless_pass: bool,
    /// Max deviation of the r_i = 0 corner from (I(Y;U) - I(Z;U),
    /// I(X;U) - I(Z;U)), including independence of the corner from r_s.
    pub single_user_max_dev: f64,
    pub single_user_pass: bool,
    pub witnesses: usize,
}

/// Check the two named reductions over `samples` random witnesses:
///
/// 1. With a noiseless enrollment channel the minimal template rate and the
///    minimal privacy-leakage rate coincide exactly for every witness.
/// 2. At r_i = 0 the corner collapses to (I(Y;U) - I(Z;U), I(X;U) - I(Z;U))
///    regardless of r_s (the single-individual form).
pub fn check_special_cases(
    system: &BisSystem,
    samples: usize,
    rng: &mut Stream,
) -> Result<SpecialCasesReport> {
    let noiseless = system.with_noiseless_enrollment();
    let noiseless_cols = noiseless.enrolled_len() + 2;
    let cols = system.enrolled_len() + 2;

    let mut noiseless_max_dev = 0.0f64;
    let mut single_user_max_dev = 0.0f64;

    for _ in 0..samples {
        let witness =
            random_stochastic_channel(noiseless.enrolled_len(), noiseless_cols, rng)?;
        let rates = rates_for_test_channel(&noiseless, &witness)?;
        noiseless_max_dev = noiseless_max_dev.max((rates.i_yu - rates.i_xu).abs());

        let witness = random_stochastic_channel(system.enrolled_len(), cols, rng)?;
        let rates = rates_for_test_channel(system, &witness)?;
        let corner = corner_point(&rates, 0.0, 0.0)?;
        let expect_j = (rates.i_yu - rates.i_zu).max(0.0);
        let expect_l = (rates.i_xu - rates.i_zu).max(0.0);
        single_user_max_dev = single_user_max_dev
            .max((corner.rates.r_j - expect_j).abs())
            .max((corner.rates.r_l - expect_l).abs());
        // the r_i = 0 corner must not depend on the secrecy slice
        let r_s_probe = 0.5 * rates.i_zu;
        let shifted = corner_point(&rates, 0.0, r_s_probe)?;
        single_user_max_dev = single_user_max_dev
            .max((shifted.rates.r_j - corner.rates.r_j).abs())
            .max((shifted.rates.r_l - corner.rates.r_l).abs());
    }

    Ok(SpecialCasesReport {
        noiseless_max_dev,
        noiseless_pass: noiseless_max_dev <= 1e-12,
        single_user_max_dev,
        single_user_pass: single_user_max_dev <= 1e-12,
        witnesses: samples,
    })
}

/// Uniform draw from the simplex for each row (all Dirichlet weights 1),
/// via normalized unit exponentials.
pub(crate) fn dirichlet_uniform_row(cols: usize, rng: &mut Stream) -> Vec<f64> {
    let mut row: Vec<f64> = (0..cols)
        .map(|_| {
            let u: f64 = rng.gen();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = row.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / cols as f64; cols];
    }
    for p in &mut row {
        *p /= sum;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::DiscreteDistribution;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    fn fig_system() -> BisSystem {
        BisSystem::new(
            DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_witness_rates_match_closed_forms() {
        let rates =
            rates_for_test_channel(&fig_system(), &ChannelMatrix::identity(2).unwrap()).unwrap();
        assert_abs_diff_eq!(rates.i_zu, 1.0 - h2(0.18), epsilon = 1e-12);
        assert_abs_diff_eq!(rates.i_yu, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rates.i_xu, 1.0 - h2(0.1), epsilon = 1e-12);
    }

    #[test]
    fn constant_witness_rates_vanish() {
        let rates =
            rates_for_test_channel(&fig_system(), &ChannelMatrix::uniform(2, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(rates.i_zu, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rates.i_yu, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rates.i_xu, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_enrollment_equates_the_two_informations() {
        let system = fig_system().with_noiseless_enrollment();
        let mut rng = rng::master(11);
        for _ in 0..50 {
            let w = random_stochastic_channel(2, 4, &mut rng).unwrap();
            let rates = rates_for_test_channel(&system, &w).unwrap();
            assert_eq!(rates.i_yu, rates.i_xu);
        }
    }

    #[test]
    fn cardinality_bound_is_enforced_but_overridable() {
        let system = fig_system();
        let wide = ChannelMatrix::uniform(2, 5).unwrap();
        assert!(rates_for_test_channel(&system, &wide).is_err());
        assert!(rates_for_test_channel_unbounded(&system, &wide).is_ok());
    }

    #[test]
    fn corner_point_substitutes_linearly() {
        let rates =
            rates_for_test_channel(&fig_system(), &ChannelMatrix::identity(2).unwrap()).unwrap();
        // full identification budget, no secrecy
        let c = corner_point(&rates, rates.i_zu, 0.0).unwrap();
        assert_abs_diff_eq!(c.rates.r_j, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.rates.r_l, 1.0 - h2(0.1), epsilon = 1e-12);
        assert!(!c.clamped);
        // zero rates leave the raw differences
        let c0 = corner_point(&rates, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(c0.rates.r_j, rates.i_yu - rates.i_zu, epsilon = 1e-15);
        assert_abs_diff_eq!(c0.rates.r_l, rates.i_xu - rates.i_zu, epsilon = 1e-15);
        assert_abs_diff_eq!(c0.rates.r_j, 0.680_077_045_728_280, epsilon = 1e-12);
        assert_abs_diff_eq!(c0.rates.r_l, 0.211_081_452_138_998, epsilon = 1e-12);
    }

    #[test]
    fn corner_point_for_constant_witness_is_origin() {
        let rates =
            rates_for_test_channel(&fig_system(), &ChannelMatrix::uniform(2, 2).unwrap()).unwrap();
        let c = corner_point(&rates, 0.0, 0.0).unwrap();
        assert!(c.rates.r_j.abs() <= 1e-12 && c.rates.r_l.abs() <= 1e-12);
    }

    #[test]
    fn corner_point_rejects_budget_violation() {
        let rates =
            rates_for_test_channel(&fig_system(), &ChannelMatrix::identity(2).unwrap()).unwrap();
        assert!(matches!(
            corner_point(&rates, rates.i_zu, 0.1),
            Err(Error::Infeasible(_))
        ));
        assert!(corner_point(&rates, -0.1, 0.0).is_err());
    }

    #[test]
    fn degradation_endpoints_are_exact() {
        let system = fig_system();
        let u = ChannelMatrix::identity(2).unwrap();

        let w0 = a2_witness_for(&system, &u, 0.0).unwrap();
        assert_eq!(w0.lambda, 0.0);
        assert!(w0.achieved_i_zv.abs() <= 1e-9);

        let i_zu = rates_for_test_channel(&system, &u).unwrap().i_zu;
        let w1 = a2_witness_for(&system, &u, i_zu).unwrap();
        assert_eq!(w1.lambda, 1.0);
        assert_abs_diff_eq!(w1.achieved_i_zv, i_zu, epsilon = 1e-9);
    }

    #[test]
    fn degradation_bisection_hits_interior_target() {
        let system = fig_system();
        let u = ChannelMatrix::identity(2).unwrap();
        let w = a2_witness_for(&system, &u, 0.16).unwrap();
        assert_abs_diff_eq!(w.achieved_i_zv, 0.16, epsilon = 1e-6);
        assert!(w.lambda > 0.0 && w.lambda < 1.0);
    }

    #[test]
    fn degradation_rejects_unreachable_target() {
        let system = fig_system();
        let u = ChannelMatrix::identity(2).unwrap();
        assert!(matches!(a2_witness_for(&system, &u, 0.9), Err(Error::Infeasible(_))));
    }

    #[test]
    fn special_cases_hold_on_the_binary_example() {
        let report = check_special_cases(&fig_system(), 100, &mut rng::master(5)).unwrap();
        assert!(report.noiseless_pass, "noiseless deviation {}", report.noiseless_max_dev);
        assert!(report.single_user_pass, "corner deviation {}", report.single_user_max_dev);
    }
}

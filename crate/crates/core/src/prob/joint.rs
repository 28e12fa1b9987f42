//! Dense joint distributions over a few small axes, and the factorized
//! joint law of the chain Z - X - Y - U (- V).

use crate::error::{Error, Result};
use crate::prob::dist::{entropy_of, BisSystem, ChannelMatrix, MASS_TOL, MAX_ALPHABET};

/// Axis order of the joints produced by [`chain_joint`].
pub const AXIS_Z: usize = 0;
pub const AXIS_X: usize = 1;
pub const AXIS_Y: usize = 2;
pub const AXIS_U: usize = 3;
pub const AXIS_V: usize = 4;

/// Hard cap on dense tensor size (16^5 cells).
const MAX_CELLS: usize = MAX_ALPHABET.pow(5);

/// Dense joint probability tensor over an ordered list of finite axes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axes: Vec<usize>,
    probs: Vec<f64>, // row-major over `axes`
}

impl JointDistribution {
    pub fn new(axes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("joint needs at least one axis"));
        }
        let mut cells: usize = 1;
        for &len in &axes {
            if len == 0 || len > MAX_ALPHABET {
                return Err(Error::invalid(format!(
                    "axis size {len} outside [1, {MAX_ALPHABET}]"
                )));
            }
            cells = cells.saturating_mul(len);
        }
        if cells > MAX_CELLS {
            return Err(Error::invalid(format!("joint would need {cells} cells, cap {MAX_CELLS}")));
        }
        if probs.len() != cells {
            return Err(Error::invalid(format!(
                "joint has {} entries, axes require {cells}",
                probs.len()
            )));
        }
        let mut mass = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!("joint entry {p} is negative")));
            }
            mass += p;
        }
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("joint mass {mass} is not 1 within {MASS_TOL}")));
        }
        Ok(Self { axes, probs })
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Row-major strides for index arithmetic.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1];
        }
        strides
    }

    pub fn prob(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.axes.len(), "index arity mismatch");
        let strides = self.strides();
        let mut flat = 0;
        for (axis, (&i, &s)) in index.iter().zip(&strides).enumerate() {
            assert!(i < self.axes[axis], "index {i} out of range on axis {axis}");
            flat += i * s;
        }
        self.probs[flat]
    }

    /// Marginal onto `keep`, in the order given. Axes may be reordered but
    /// not repeated.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDistribution> {
        self.check_axis_set(keep)?;
        let out_axes: Vec<usize> = keep.iter().map(|&a| self.axes[a]).collect();
        let mut out_strides = vec![1; out_axes.len()];
        for i in (0..out_axes.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * out_axes[i + 1];
        }
        let cells: usize = out_axes.iter().product();
        let mut out = vec![0.0; cells];

        let strides = self.strides();
        let mut index = vec![0usize; self.axes.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut rem = flat;
            for (axis, &s) in strides.iter().enumerate() {
                index[axis] = rem / s;
                rem %= s;
            }
            let mut target = 0;
            for (pos, &axis) in keep.iter().enumerate() {
                target += index[axis] * out_strides[pos];
            }
            out[target] += p;
        }
        JointDistribution::new(out_axes, out)
    }

    /// Joint entropy of all axes, in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    /// Entropy of the marginal on `axes`, in bits.
    pub fn marginal_entropy(&self, axes: &[usize]) -> Result<f64> {
        Ok(self.marginal(axes)?.entropy())
    }

    /// I(A; B) = H(A) + H(B) - H(A, B), in bits. `a` and `b` must be
    /// disjoint subsets of the axes.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        self.check_disjoint(a, b)?;
        let ha = self.marginal_entropy(a)?;
        let hb = self.marginal_entropy(b)?;
        let joint: Vec<usize> = a.iter().chain(b).copied().collect();
        let hab = self.marginal_entropy(&joint)?;
        Ok(ha + hb - hab)
    }

    /// I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), in bits.
    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64> {
        self.check_disjoint(a, b)?;
        self.check_disjoint(a, c)?;
        self.check_disjoint(b, c)?;
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        Ok(self.marginal_entropy(&ac)? + self.marginal_entropy(&bc)?
            - self.marginal_entropy(&abc)?
            - self.marginal_entropy(c)?)
    }

    fn check_axis_set(&self, axes: &[usize]) -> Result<()> {
        if axes.is_empty() {
            return Err(Error::invalid("empty axis set"));
        }
        let mut seen = vec![false; self.axes.len()];
        for &a in axes {
            if a >= self.axes.len() {
                return Err(Error::invalid(format!(
                    "axis {a} out of range for {}-axis joint",
                    self.axes.len()
                )));
            }
            if seen[a] {
                return Err(Error::invalid(format!("axis {a} repeated")));
            }
            seen[a] = true;
        }
        Ok(())
    }

    fn check_disjoint(&self, a: &[usize], b: &[usize]) -> Result<()> {
        self.check_axis_set(a)?;
        self.check_axis_set(b)?;
        if a.iter().any(|x| b.contains(x)) {
            return Err(Error::invalid("axis sets overlap"));
        }
        Ok(())
    }
}

/// I(A; B) on a joint, in bits.
pub fn mutual_information(joint: &JointDistribution, a: &[usize], b: &[usize]) -> Result<f64> {
    joint.mutual_information(a, b)
}

/// Joint law of the chain Z - X - Y - U (- V), built by factorization:
///
/// P(z, x, y, u[, v]) =
///   P_X(x) P_{Y|X}(y|x) P_{Z|X}(z|x) P_{U|Y}(u|y) [ P_{V|U}(v|u) ]
///
/// Axis order is (Z, X, Y, U[, V]); see the `AXIS_*` constants. The chain's
/// conditional-independence structure holds exactly by construction.
pub fn chain_joint(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
    v_channel: Option<&ChannelMatrix>,
) -> Result<JointDistribution> {
    if u_channel.rows() != system.enrolled_len() {
        return Err(Error::invalid(format!(
            "test channel has {} input symbols, enrollment output has {}",
            u_channel.rows(),
            system.enrolled_len()
        )));
    }
    if let Some(v) = v_channel {
        if v.rows() != u_channel.cols() {
            return Err(Error::invalid(format!(
                "second test channel has {} input symbols, first has {} outputs",
                v.rows(),
                u_channel.cols()
            )));
        }
    }

    let nx = system.source_len();
    let ny = system.enrolled_len();
    let nz = system.observed_len();
    let nu = u_channel.cols();

    let mut axes = vec![nz, nx, ny, nu];
    if let Some(v) = v_channel {
        axes.push(v.cols());
    }
    let cells: usize = axes.iter().product();
    let mut probs = Vec::with_capacity(cells);

    for z in 0..nz {
        for x in 0..nx {
            let px = system.source().prob(x);
            let pzx = system.identification().entry(x, z);
            for y in 0..ny {
                let pyx = system.enrollment().entry(x, y);
                for u in 0..nu {
                    let puy = u_channel.entry(y, u);
                    let base = px * pzx * pyx * puy;
                    match v_channel {
                        None => probs.push(base),
                        Some(v) => {
                            for w in 0..v.cols() {
                                probs.push(base * v.entry(u, w));
                            }
                        }
                    }
                }
            }
        }
    }
    JointDistribution::new(axes, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::dist::DiscreteDistribution;
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
    fn identity_channel_gives_full_information() {
        // uniform binary source observed through the identity: I(X;X) = H(X)
        let joint = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(joint.mutual_information(&[0], &[1]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn product_distribution_has_zero_information() {
        let joint =
            JointDistribution::new(vec![2, 3], vec![0.1, 0.2, 0.2, 0.1, 0.2, 0.2]).unwrap();
        assert_abs_diff_eq!(joint.mutual_information(&[0], &[1]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_channel_information_matches_closed_form() {
        // uniform binary input through crossover 0.1: I = 1 - h(0.1)
        let joint =
            JointDistribution::new(vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let i = joint.mutual_information(&[0], &[1]).unwrap();
        assert_abs_diff_eq!(i, 1.0 - h2(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(i, 0.531_004_406_410_719, epsilon = 1e-12);
    }

    #[test]
    fn mutual_information_is_symmetric_and_rejects_overlap() {
        let joint =
            JointDistribution::new(vec![2, 2], vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let ab = joint.mutual_information(&[0], &[1]).unwrap();
        let ba = joint.mutual_information(&[1], &[0]).unwrap();
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-15);
        assert!(joint.mutual_information(&[0], &[0]).is_err());
    }

    #[test]
    fn chain_with_identity_test_channel_pins_u_to_y() {
        let system = fig_system();
        let joint =
            chain_joint(&system, &ChannelMatrix::identity(2).unwrap(), None).unwrap();
        // P(U != Y) must be exactly zero
        let yu = joint.marginal(&[AXIS_Y, AXIS_U]).unwrap();
        assert_eq!(yu.prob(&[0, 1]), 0.0);
        assert_eq!(yu.prob(&[1, 0]), 0.0);
    }

    #[test]
    fn chain_with_constant_test_channel_detaches_u() {
        let system = fig_system();
        let u = ChannelMatrix::uniform(2, 3).unwrap();
        let joint = chain_joint(&system, &u, None).unwrap();
        assert_abs_diff_eq!(
            joint.mutual_information(&[AXIS_Y], &[AXIS_U]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn chain_source_marginal_is_exact() {
        let system = fig_system();
        let joint = chain_joint(&system, &ChannelMatrix::uniform(2, 2).unwrap(), None).unwrap();
        let mx = joint.marginal(&[AXIS_X]).unwrap();
        assert_abs_diff_eq!(mx.prob(&[0]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn chain_identity_u_observed_information_is_two_hop_composition() {
        // Z and Y are two independent crossover-0.1 observations of X, so the
        // effective Y-to-Z channel has crossover 0.18 and I(Z;U) = 1 - h(0.18)
        // when U = Y.
        let system = fig_system();
        let joint = chain_joint(&system, &ChannelMatrix::identity(2).unwrap(), None).unwrap();
        let i_zu = joint.mutual_information(&[AXIS_Z], &[AXIS_U]).unwrap();
        assert_abs_diff_eq!(i_zu, 1.0 - h2(0.18), epsilon = 1e-12);
        assert_abs_diff_eq!(i_zu, 0.319_922_954_271_720, epsilon = 1e-12);
    }

    #[test]
    fn chain_dimension_mismatch_is_rejected() {
        let system = fig_system();
        let u3 = ChannelMatrix::uniform(3, 2).unwrap();
        assert!(chain_joint(&system, &u3, None).is_err());
        let u = ChannelMatrix::uniform(2, 2).unwrap();
        let v3 = ChannelMatrix::uniform(3, 2).unwrap();
        assert!(chain_joint(&system, &u, Some(&v3)).is_err());
    }

    #[test]
    fn marginal_reorders_axes() {
        let joint =
            JointDistribution::new(vec![2, 3], vec![0.1, 0.2, 0.2, 0.1, 0.2, 0.2]).unwrap();
        let swapped = joint.marginal(&[1, 0]).unwrap();
        assert_eq!(swapped.axes(), &[3, 2]);
        assert_abs_diff_eq!(swapped.prob(&[2, 1]), joint.prob(&[1, 2]), epsilon = 1e-15);
    }
}

//! Boundary sampling for the achievable region at a fixed secrecy slice.
//!
//! The region is convex (time-sharing), so the tracer samples witnesses —
//! random row-stochastic matrices plus every deterministic map — evaluates
//! their corner lines over an identification-rate grid, keeps the
//! pareto-minimal corners, locally refines the best witnesses by coordinate
//! descent, and finally reports the lower convex envelopes of the minimal
//! template and leakage rates. Global optimality over test channels is not
//! attempted.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prob::{BisSystem, ChannelMatrix, MAX_ALPHABET};
use crate::region::{corner_point, dirichlet_uniform_row, TestChannelRates};
use crate::rng::{substream, Stream};

/// Lane offsets for sub-stream derivation, so witness generation and
/// refinement never share a stream.
const LANE_DIRICHLET: u64 = 1 << 32;
const LANE_REFINE: u64 = 2 << 32;

/// Enumerating deterministic maps is capped at this count; beyond it only
/// the random pool is used.
const DETERMINISTIC_CAP: usize = 4096;

/// Search budget for [`sample_region`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Random witnesses with Dirichlet(1, ..., 1) rows.
    pub dirichlet_samples: usize,
    /// Coordinate-descent iterations per refined objective.
    pub refine_steps: usize,
    /// Identification-rate grid resolution.
    pub grid_points: usize,
    /// Witness output alphabet; defaults to |Y| + 2 (capped at 16).
    pub u_cols: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { dirichlet_samples: 4096, refine_steps: 64, grid_points: 101, u_cols: None }
    }
}

/// One sampled corner: the minimal (r_j, r_l) achieved by `witness` at `r_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerRecord {
    pub r_i: f64,
    pub r_j: f64,
    pub r_l: f64,
    pub witness: usize,
    pub clamped: bool,
}

/// Sampled boundary of the region at a fixed secrecy slice.
///
/// `points` holds, per grid rate, the pareto-minimal corners over all
/// witnesses; `hull` holds one record per grid rate whose r_j and r_l are
/// the lower convex envelopes of the per-rate minima (the time-sharing
/// closure of the two boundary projections). Witness ids index `witnesses`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSample {
    pub r_s: f64,
    pub points: Vec<CornerRecord>,
    pub hull: Vec<CornerRecord>,
    pub witnesses: Vec<ChannelMatrix>,
}

/// Row-stochastic matrix with rows drawn uniformly from the simplex.
pub fn random_stochastic_channel(
    rows: usize,
    cols: usize,
    rng: &mut Stream,
) -> Result<ChannelMatrix> {
    let rows_vec = (0..rows).map(|_| dirichlet_uniform_row(cols, rng)).collect();
    ChannelMatrix::new(rows_vec)
}

/// All deterministic maps from `rows` inputs into `cols` outputs, provided
/// the family is small enough to enumerate. Includes every constant map and,
/// when `cols >= rows`, the identity padded with unused outputs.
fn deterministic_witnesses(rows: usize, cols: usize) -> Vec<ChannelMatrix> {
    let count = (cols as u64).checked_pow(rows as u32);
    match count {
        Some(c) if (c as usize) <= DETERMINISTIC_CAP => {}
        _ => return Vec::new(),
    }
    let mut out = Vec::new();
    let mut map = vec![0usize; rows];
    loop {
        out.push(ChannelMatrix::deterministic(&map, cols).expect("valid map"));
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == rows {
                return out;
            }
            map[pos] += 1;
            if map[pos] < cols {
                break;
            }
            map[pos] = 0;
            pos += 1;
        }
    }
}

/// Objective refined by coordinate descent: the constant part of one corner
/// line, subject to the witness staying feasible at the given budget.
#[derive(Clone, Copy)]
enum RefineTarget {
    TemplateRate,
    LeakageRate,
}

fn objective(rates: &TestChannelRates, target: RefineTarget, budget: f64) -> f64 {
    let base = match target {
        RefineTarget::TemplateRate => rates.i_yu - rates.i_zu,
        RefineTarget::LeakageRate => rates.i_xu - rates.i_zu,
    };
    // heavy penalty keeps descent inside the feasible set
    let deficit = (budget - rates.i_zu).max(0.0);
    base + 1e6 * deficit
}

/// Local coordinate descent on the witness entries: move probability mass
/// between two entries of one row, keep the move if the objective improves.
fn refine_witness(
    system: &BisSystem,
    start: &TestChannelRates,
    target: RefineTarget,
    budget: f64,
    steps: usize,
    rng: &mut Stream,
) -> Result<TestChannelRates> {
    let mut best = start.clone();
    let mut best_obj = objective(&best, target, budget);
    let rows = best.u_channel.rows();
    let cols = best.u_channel.cols();
    if cols < 2 {
        return Ok(best);
    }
    let mut entries = best.u_channel.to_rows();

    for step in 0..steps {
        let row = rng.gen_range(0..rows);
        let from = rng.gen_range(0..cols);
        let mut to = rng.gen_range(0..cols - 1);
        if to >= from {
            to += 1;
        }
        // geometric step-size decay over the run
        let scale = 0.5 * (1.0 - step as f64 / steps as f64).max(0.05);
        let amount = (entries[row][from] * scale).min(entries[row][from]);
        if amount <= 0.0 {
            continue;
        }
        entries[row][from] -= amount;
        entries[row][to] += amount;

        let candidate = ChannelMatrix::new(entries.clone())?;
        let rates = rates_for_test_channel_relaxed(system, &candidate)?;
        let obj = objective(&rates, target, budget);
        if obj < best_obj {
            best_obj = obj;
            best = rates;
        } else {
            entries[row][from] += amount;
            entries[row][to] -= amount;
        }
    }
    Ok(best)
}

/// Witness evaluation without the cardinality check (the search already
/// restricts its pool to the bound).
fn rates_for_test_channel_relaxed(
    system: &BisSystem,
    u_channel: &ChannelMatrix,
) -> Result<TestChannelRates> {
    crate::region::rates_for_test_channel_unbounded(system, u_channel)
}

/// Strictly lower convex hull of `(x, y)` points with strictly increasing x,
/// evaluated back onto the x grid by linear interpolation.
fn lower_envelope(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n <= 2 {
        return ys.to_vec();
    }
    // Andrew's monotone chain, lower hull only
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        while seg + 1 < hull.len() - 1 && xs[hull[seg + 1]] <= xs[i] {
            seg += 1;
        }
        let (a, b) = (hull[seg], hull[seg + 1]);
        if xs[b] == xs[a] {
            out.push(ys[a].min(ys[b]));
        } else {
            let t = (xs[i] - xs[a]) / (xs[b] - xs[a]);
            out.push(ys[a] + t * (ys[b] - ys[a]));
        }
    }
    out
}

/// Pareto-minimal subset of (r_j, r_l) corner records (ties kept once).
fn pareto_minimal(mut records: Vec<CornerRecord>) -> Vec<CornerRecord> {
    records.sort_by(|a, b| {
        (a.r_j, a.r_l, a.witness).partial_cmp(&(b.r_j, b.r_l, b.witness)).expect("finite rates")
    });
    let mut out: Vec<CornerRecord> = Vec::new();
    let mut best_l = f64::INFINITY;
    for rec in records {
        if rec.r_l < best_l {
            best_l = rec.r_l;
            out.push(rec);
        }
    }
    out
}

/// Trace the boundary of the achievable region at secrecy slice `r_s`.
///
/// Deterministic for a fixed `(seed, config)`: witnesses and refinement draw
/// from sub-streams keyed by index, and all reductions are order-stable.
pub fn sample_region(
    system: &BisSystem,
    r_s: f64,
    config: &SearchConfig,
    seed: u64,
) -> Result<RegionSample> {
    if r_s < 0.0 {
        return Err(Error::invalid(format!("secrecy slice {r_s} is negative")));
    }
    if config.grid_points < 1 {
        return Err(Error::invalid("grid needs at least one point"));
    }
    let y_len = system.enrolled_len();
    let default_cols = (y_len + 2).min(MAX_ALPHABET);
    let u_cols = config.u_cols.unwrap_or(default_cols);
    if u_cols == 0 || u_cols > (y_len + 2).min(MAX_ALPHABET) {
        return Err(Error::invalid(format!(
            "witness alphabet {u_cols} outside [1, {}]",
            (y_len + 2).min(MAX_ALPHABET)
        )));
    }

    // Witness pool: structured family first, then the random pool.
    let mut witnesses = deterministic_witnesses(y_len, u_cols);
    let random: Vec<ChannelMatrix> = (0..config.dirichlet_samples)
        .into_par_iter()
        .map(|w| {
            let mut rng = substream(seed, LANE_DIRICHLET + w as u64);
            random_stochastic_channel(y_len, u_cols, &mut rng)
        })
        .collect::<Result<_>>()?;
    witnesses.extend(random);

    let mut rates: Vec<TestChannelRates> = witnesses
        .par_iter()
        .map(|w| rates_for_test_channel_relaxed(system, w))
        .collect::<Result<_>>()?;

    let max_budget = rates.iter().map(|r| r.i_zu).fold(0.0f64, f64::max);
    let max_ri = max_budget - r_s;
    if max_ri < 0.0 {
        // the slice is above every witness budget: empty region
        return Ok(RegionSample { r_s, points: Vec::new(), hull: Vec::new(), witnesses });
    }

    let grid: Vec<f64> = if config.grid_points == 1 || max_ri == 0.0 {
        vec![0.0]
    } else {
        (0..config.grid_points)
            .map(|g| max_ri * g as f64 / (config.grid_points - 1) as f64)
            .collect()
    };

    // Refine the best witness per grid point for each objective, then fold
    // the refined witnesses back into the pool.
    let refined: Vec<TestChannelRates> = grid
        .par_iter()
        .enumerate()
        .flat_map_iter(|(g, &r_i)| {
            let budget = r_i + r_s;
            let mut local = Vec::new();
            for (t, target) in
                [RefineTarget::TemplateRate, RefineTarget::LeakageRate].into_iter().enumerate()
            {
                let start = rates
                    .iter()
                    .filter(|r| r.i_zu + 1e-12 >= budget)
                    .min_by(|a, b| {
                        objective(a, target, budget)
                            .partial_cmp(&objective(b, target, budget))
                            .expect("finite objective")
                    })
                    .cloned();
                if let Some(start) = start {
                    let mut rng = substream(seed, LANE_REFINE + (g * 2 + t) as u64);
                    local.push(refine_witness(
                        system,
                        &start,
                        target,
                        budget,
                        config.refine_steps,
                        &mut rng,
                    ));
                }
            }
            local
        })
        .collect::<Result<_>>()?;
    for r in refined {
        witnesses.push(r.u_channel.clone());
        rates.push(r);
    }

    // Pareto-minimal corners per grid rate.
    let per_grid: Vec<Vec<CornerRecord>> = grid
        .par_iter()
        .map(|&r_i| {
            let budget = r_i + r_s;
            let mut records = Vec::new();
            for (w, r) in rates.iter().enumerate() {
                if r.i_zu + 1e-12 < budget {
                    continue;
                }
                let corner = corner_point(r, r_i, r_s)?;
                records.push(CornerRecord {
                    r_i,
                    r_j: corner.rates.r_j,
                    r_l: corner.rates.r_l,
                    witness: w,
                    clamped: corner.clamped,
                });
            }
            Ok(pareto_minimal(records))
        })
        .collect::<Result<_>>()?;

    // Convex envelopes of the per-grid minima.
    let min_j: Vec<f64> = per_grid
        .iter()
        .map(|recs| recs.iter().map(|r| r.r_j).fold(f64::INFINITY, f64::min))
        .collect();
    let min_l: Vec<f64> = per_grid
        .iter()
        .map(|recs| recs.iter().map(|r| r.r_l).fold(f64::INFINITY, f64::min))
        .collect();
    let env_j = lower_envelope(&grid, &min_j);
    let env_l = lower_envelope(&grid, &min_l);

    let hull: Vec<CornerRecord> = grid
        .iter()
        .enumerate()
        .map(|(g, &r_i)| {
            let best = per_grid[g]
                .iter()
                .min_by(|a, b| (a.r_j, a.r_l).partial_cmp(&(b.r_j, b.r_l)).expect("finite"))
                .expect("grid point has at least one feasible witness");
            CornerRecord {
                r_i,
                r_j: env_j[g],
                r_l: env_l[g],
                witness: best.witness,
                clamped: best.clamped,
            }
        })
        .collect();

    let points = per_grid.into_iter().flatten().collect();
    Ok(RegionSample { r_s, points, hull, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::DiscreteDistribution;

    fn fig_system() -> BisSystem {
        BisSystem::new(
            DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
        )
        .unwrap()
    }

    fn small_config() -> SearchConfig {
        SearchConfig { dirichlet_samples: 128, refine_steps: 8, grid_points: 21, u_cols: None }
    }

    #[test]
    fn deterministic_family_enumerates_all_maps() {
        let fam = deterministic_witnesses(2, 4);
        assert_eq!(fam.len(), 16);
        assert!(fam.iter().any(|m| m.entry(0, 0) == 1.0 && m.entry(1, 1) == 1.0));
    }

    #[test]
    fn degenerate_identification_collapses_region() {
        // identification output independent of the source: no witness can
        // carry identification rate
        let system = BisSystem::new(
            DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
            ChannelMatrix::binary_symmetric(0.1).unwrap(),
            ChannelMatrix::uniform(2, 2).unwrap(),
        )
        .unwrap();
        let sample = sample_region(&system, 0.0, &small_config(), 7).unwrap();
        let max_ri = sample.hull.iter().map(|r| r.r_i).fold(0.0f64, f64::max);
        assert!(max_ri <= 1e-9, "max r_i {max_ri}");
    }

    #[test]
    fn empty_slice_above_all_budgets() {
        let system = fig_system();
        let sample = sample_region(&system, 2.0, &small_config(), 7).unwrap();
        assert!(sample.hull.is_empty());
        assert!(sample.points.is_empty());
    }

    #[test]
    fn same_seed_reproduces_sample() {
        let system = fig_system();
        let a = sample_region(&system, 0.0, &small_config(), 42).unwrap();
        let b = sample_region(&system, 0.0, &small_config(), 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hull_lies_below_raw_points() {
        let system = fig_system();
        let sample = sample_region(&system, 0.0, &small_config(), 9).unwrap();
        for rec in &sample.points {
            let hull = sample
                .hull
                .iter()
                .find(|h| h.r_i == rec.r_i)
                .expect("hull covers every grid rate");
            assert!(rec.r_j >= hull.r_j - 1e-12);
            assert!(rec.r_l >= hull.r_l - 1e-12);
        }
    }

    #[test]
    fn envelope_interpolates_convex_minorant() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 2.0, 1.0, 3.0];
        let env = lower_envelope(&xs, &ys);
        assert_eq!(env[0], 0.0);
        assert_eq!(env[2], 1.0);
        assert_eq!(env[3], 3.0);
        assert!(env[1] <= 0.5 + 1e-12);
    }
}

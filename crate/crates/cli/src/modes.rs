//! Execution of the four experiment modes against the core library.

use rand::Rng;

use bis_core::binning::{run_simulation, CodeParams, RateSpec, SimOptions};
use bis_core::prob::{chain_joint, ChannelMatrix, MAX_ALPHABET};
use bis_core::region::{
    a2_witness_for, check_special_cases, random_stochastic_channel, rates_for_test_channel,
    sample_region, two_auxiliary_bounds,
};
use bis_core::rng;

use crate::config::{ExperimentConfig, Mode};
use crate::output::{fmt6, Table};
use crate::CliError;

pub fn execute(config: &ExperimentConfig) -> Result<Table, CliError> {
    match config.mode {
        Mode::Region => region(config),
        Mode::Equivalence => equivalence(config),
        Mode::Simulate => simulate(config),
        Mode::SpecialCases => special_cases(config),
    }
}

fn missing_section(mode: Mode) -> CliError {
    CliError::config(format!("config lacks the '{}' section", mode.name()))
}

fn region(config: &ExperimentConfig) -> Result<Table, CliError> {
    let params = config.region.as_ref().ok_or_else(|| missing_section(Mode::Region))?;
    let system = config.system.build()?;
    let sample = sample_region(&system, params.r_s, &params.search_config(), config.seed)?;

    let mut table = Table::new(&["r_i", "r_s", "r_j", "r_l", "witness_id", "clamped"]);
    for rec in &sample.hull {
        table.push(vec![
            fmt6(rec.r_i),
            fmt6(sample.r_s),
            fmt6(rec.r_j),
            fmt6(rec.r_l),
            rec.witness.to_string(),
            u8::from(rec.clamped).to_string(),
        ]);
    }
    Ok(table)
}

fn equivalence(config: &ExperimentConfig) -> Result<Table, CliError> {
    let params = config.equivalence.as_ref().ok_or_else(|| missing_section(Mode::Equivalence))?;
    let system = config.system.build()?;
    let u_cols = (system.enrolled_len() + 2).min(MAX_ALPHABET);
    let mut stream = rng::master(config.seed);

    let mut table = Table::new(&[
        "pair",
        "r_i",
        "lambda",
        "achieved_i_zv",
        "template_bound",
        "leakage_bound",
        "template_gap",
        "leakage_gap",
    ]);
    for pair in 0..params.pairs {
        let witness = random_stochastic_channel(system.enrolled_len(), u_cols, &mut stream)?;
        let rates = rates_for_test_channel(&system, &witness)?;
        let r_i = stream.gen::<f64>() * rates.i_zu;

        let a2 = a2_witness_for(&system, &witness, r_i)?;
        let joint = chain_joint(&system, &witness, Some(&a2.v_channel))?;
        let (bound_j, bound_l) = two_auxiliary_bounds(&joint)?;
        let single_j = rates.i_yu - rates.i_zu + r_i;
        let single_l = rates.i_xu - rates.i_zu + r_i;

        table.push(vec![
            pair.to_string(),
            fmt6(r_i),
            fmt6(a2.lambda),
            fmt6(a2.achieved_i_zv),
            fmt6(bound_j),
            fmt6(bound_l),
            fmt6((bound_j - single_j).abs()),
            fmt6((bound_l - single_l).abs()),
        ]);
    }
    Ok(table)
}

fn simulate(config: &ExperimentConfig) -> Result<Table, CliError> {
    let params = config.simulate.as_ref().ok_or_else(|| missing_section(Mode::Simulate))?;
    let system = config.system.build()?;
    let u_channel = ChannelMatrix::new(params.u_channel.clone()).map_err(CliError::config)?;
    let v_channel = ChannelMatrix::new(params.v_channel.clone()).map_err(CliError::config)?;
    if params.block_lengths.is_empty() {
        return Err(CliError::config("simulate.block_lengths is empty"));
    }

    let rate_spec: RateSpec = match params.rates {
        Some(r) => r.into(),
        None => RateSpec::corner_with_margin(&system, &u_channel, &v_channel, params.margin)?,
    };
    let options = SimOptions { fresh_codebook: params.fresh_codebook };

    let mut table = Table::new(&[
        "n",
        "trials",
        "delta",
        "n_v",
        "n_u",
        "m_s",
        "n_b",
        "m_i",
        "rate_i",
        "rate_s",
        "rate_j",
        "max_error_rate",
        "max_error_half_width",
        "partial_error_rate",
        "secrecy_leakage_bits",
        "privacy_leakage_rate",
        "fallback_rate",
    ]);
    for &n in &params.block_lengths {
        let delta = params.delta.unwrap_or_else(|| CodeParams::default_delta(n));
        let code = CodeParams::from_rates(n, delta, &rate_spec)?;
        let result = run_simulation(
            &system,
            &u_channel,
            &v_channel,
            &code,
            params.trials,
            config.seed,
            options,
        )?;
        table.push(vec![
            n.to_string(),
            result.trials.to_string(),
            fmt6(delta),
            code.n_v.to_string(),
            code.n_u.to_string(),
            code.m_s.to_string(),
            code.n_b.to_string(),
            code.m_i.to_string(),
            fmt6(result.rates.identification),
            fmt6(result.rates.secrecy),
            fmt6(result.rates.template),
            fmt6(result.max_error_rate),
            fmt6(result.max_error_half_width),
            fmt6(result.partial_error_rate),
            fmt6(result.secrecy_leakage_bits),
            fmt6(result.privacy_leakage_rate),
            fmt6(result.fallback_rate),
        ]);
    }
    Ok(table)
}

fn special_cases(config: &ExperimentConfig) -> Result<Table, CliError> {
    let params =
        config.special_cases.as_ref().ok_or_else(|| missing_section(Mode::SpecialCases))?;
    let system = config.system.build()?;
    let report = check_special_cases(&system, params.witnesses, &mut rng::master(config.seed))?;

    let mut table = Table::new(&["check", "witnesses", "max_deviation", "pass"]);
    table.push(vec![
        "noiseless_enrollment_reduction".to_string(),
        report.witnesses.to_string(),
        fmt6(report.noiseless_max_dev),
        u8::from(report.noiseless_pass).to_string(),
    ]);
    table.push(vec![
        "single_user_corner".to_string(),
        report.witnesses.to_string(),
        fmt6(report.single_user_max_dev),
        u8::from(report.single_user_pass).to_string(),
    ]);
    Ok(table)
}

//! The experiments behind each subcommand. Each returns a fully built table;
//! nothing is written until the whole run has succeeded.
//!
//! Schemas (column order is fixed):
//!
//! - `dj`: `kind, sample, input, accept_probability`
//! - `compose-fail`: `stop_time, accept_amplitude, accept_probability, exited_mass`
//! - `purifier`: `p0, epsilon, d, total_weight, resistance, complexity,
//!   perturbation_bound, overlap, threshold, accept`
//! - `commute`: `s, t, h_st, h_ts, mc_h_st, mc_h_st_stderr, mc_h_ts,
//!   mc_h_ts_stderr, total_weight, resistance, two_w_r, residual`
//! - `costs`: `model, cost, note`
//! - `majority-vs-purifier`: `delta, majority_k, majority_error, purifier_d,
//!   perturbation, purifier_overhead`

use std::path::Path;

use qcompose::compose::{run_composed_dj_h, StopTime};
use qcompose::{
    classical_avg_cost, majority_vs_purifier_table, purifier_record, quantum_naive_cost,
    quantum_walk_cost, run_dj, BitString, ComposedInstance, CostProfile, Error, GInput, Result,
    WeightedGraph,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::table::Table;

pub const MAX_DJ_DIM: usize = 1 << 14;

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::BadParameter(format!("cannot read {}: {e}", path.display())))
}

/// Accept probability of the constant input, then `samples` seeded balanced
/// inputs. Sample `i` is shuffled with seed `seed + i`.
pub fn dj(m: usize, samples: usize, seed: u64) -> Result<Table> {
    if m < 2 || !m.is_power_of_two() || m > MAX_DJ_DIM {
        return Err(Error::BadDimension(m));
    }
    let mut table = Table::new(&["kind", "sample", "input", "accept_probability"]);
    let constant = GInput::new(BitString::zeros(m))?;
    table.push(vec![
        "constant".into(),
        0usize.into(),
        constant.bits().to_hex().into(),
        run_dj(&constant)?.into(),
    ]);
    let rows = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut bits = BitString::leading_ones(m, m / 2).bits().to_vec();
            bits.shuffle(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64)));
            let x = GInput::new(BitString::new(bits))?;
            Ok((x.bits().to_hex(), run_dj(&x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, (hex, p)) in rows.into_iter().enumerate() {
        table.push(vec![
            "balanced".into(),
            (i + 1).into(),
            hex.into(),
            p.into(),
        ]);
    }
    Ok(table)
}

/// One row per stop time `1..=max_stop`, then `FULL`.
pub fn compose_fail(
    m: Option<usize>,
    max_stop: Option<usize>,
    instance: Option<&Path>,
) -> Result<Table> {
    let inst = match (instance, m) {
        (Some(path), _) => {
            let inst = ComposedInstance::from_json(&read_input(path)?)?;
            if let Some(m) = m.filter(|&m| m != inst.inner_m()) {
                return Err(Error::BadParameter(format!(
                    "--m {m} disagrees with the instance's m = {}",
                    inst.inner_m()
                )));
            }
            inst
        }
        (None, Some(m)) => ComposedInstance::structured_counterexample(m)?,
        (None, None) => return Err(Error::BadParameter("need --m or --instance".into())),
    };
    let max_stop = max_stop.unwrap_or(inst.inner_m() / 2 + 1);
    if max_stop == 0 {
        return Err(Error::BadParameter("--max-stop must be at least 1".into()));
    }
    let mut table = Table::new(&[
        "stop_time",
        "accept_amplitude",
        "accept_probability",
        "exited_mass",
    ]);
    let stops = (1..=max_stop).map(StopTime::Steps).chain([StopTime::Full]);
    for stop in stops {
        let r = run_composed_dj_h(&inst, stop)?;
        table.push(vec![
            r.stop_time.to_string().into(),
            r.accept_amplitude.re.into(),
            r.accept_probability.into(),
            r.exited_mass.into(),
        ]);
    }
    Ok(table)
}

/// Sweep over `(p0, D)`, sorted by `p0` then `D`.
pub fn purifier(epsilon: f64, d_list: &[usize], p0_list: &[f64]) -> Result<Table> {
    if d_list.is_empty() || p0_list.is_empty() {
        return Err(Error::BadParameter("empty --d-list or --p0-list".into()));
    }
    let mut tuples: Vec<(f64, usize)> = p0_list
        .iter()
        .flat_map(|&p0| d_list.iter().map(move |&d| (p0, d)))
        .collect();
    tuples.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    tuples.dedup();
    let records = tuples
        .par_iter()
        .map(|&(p0, d)| purifier_record(p0, epsilon, d))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "p0",
        "epsilon",
        "d",
        "total_weight",
        "resistance",
        "complexity",
        "perturbation_bound",
        "overlap",
        "threshold",
        "accept",
    ]);
    for r in records {
        table.push(vec![
            r.p0.into(),
            r.epsilon.into(),
            r.d.into(),
            r.total_weight.into(),
            r.resistance.into(),
            r.complexity.into(),
            r.perturbation_bound.into(),
            r.overlap.into(),
            r.threshold.into(),
            r.accept.into(),
        ]);
    }
    Ok(table)
}

/// Exact hitting times both ways, Monte-Carlo estimates (`s → t` with
/// `seed`, `t → s` with `seed + 1`), and both sides of the commute identity.
pub fn commute(
    graph: &Path,
    s: Option<usize>,
    t: Option<usize>,
    trials: usize,
    seed: u64,
) -> Result<Table> {
    let g = WeightedGraph::from_json(&read_input(graph)?)?;
    let s = s.unwrap_or(0);
    let t = t.unwrap_or(g.n() - 1);
    let report = g.commute_report(s, t)?;
    let (fwd, bwd) = rayon::join(
        || g.hitting_time_mc(s, t, seed, trials),
        || g.hitting_time_mc(t, s, seed.wrapping_add(1), trials),
    );
    let (fwd, bwd) = (fwd?, bwd?);
    let mut table = Table::new(&[
        "s",
        "t",
        "h_st",
        "h_ts",
        "mc_h_st",
        "mc_h_st_stderr",
        "mc_h_ts",
        "mc_h_ts_stderr",
        "total_weight",
        "resistance",
        "two_w_r",
        "residual",
    ]);
    table.push(vec![
        s.into(),
        t.into(),
        report.h_st.into(),
        report.h_ts.into(),
        fwd.mean.into(),
        fwd.stderr.into(),
        bwd.mean.into(),
        bwd.stderr.into(),
        report.total_weight.into(),
        report.resistance.into(),
        (2.0 * report.total_weight * report.resistance).into(),
        report.residual.into(),
    ]);
    Ok(table)
}

pub fn costs(profile: &Path) -> Result<Table> {
    let p = CostProfile::from_json(&read_input(profile)?)?;
    let mut table = Table::new(&["model", "cost", "note"]);
    table.push(vec![
        "classical_avg".into(),
        classical_avg_cost(&p)?.into(),
        "".into(),
    ]);
    table.push(vec![
        "quantum_naive".into(),
        quantum_naive_cost(&p)?.into(),
        "".into(),
    ]);
    table.push(vec![
        "quantum_walk".into(),
        quantum_walk_cost(&p)?.into(),
        "up to the hidden constant, taken as 1".into(),
    ]);
    Ok(table)
}

pub fn majority_vs_purifier(epsilon: f64, deltas: &[f64]) -> Result<Table> {
    let rows = majority_vs_purifier_table(epsilon, deltas)?;
    let mut table = Table::new(&[
        "delta",
        "majority_k",
        "majority_error",
        "purifier_d",
        "perturbation",
        "purifier_overhead",
    ]);
    for r in rows {
        table.push(vec![
            r.delta.into(),
            r.majority_k.into(),
            r.majority_error.into(),
            r.purifier_d.into(),
            r.perturbation.into(),
            r.purifier_overhead.into(),
        ]);
    }
    Ok(table)
}

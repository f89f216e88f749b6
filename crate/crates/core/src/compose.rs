//! Composition experiments: Deutsch-Jozsa, Deutsch-Jozsa with its query
//! replaced by the Las Vegas subroutine for `h` and stopped early, cost
//! models for composed algorithms, and the majority-vote vs. purifier
//! overhead comparison.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::promise::{majority_vote_error, ComposedInstance, GInput};
use crate::state::{check_power_of_two, walsh_hadamard, Amplitude, StateVector};
use crate::walk::{odds, perturbation_bound, purifier_complexity};

/// Subroutine-call statistics of a composed algorithm.
///
/// `weights[j][i]` is the probability (classically) or squared amplitude
/// (quantumly) that the `j`-th call goes to subroutine `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    #[serde(rename = "Q")]
    pub calls: usize,
    pub subroutine_times: Vec<f64>,
    #[serde(rename = "L")]
    pub extra_ops: f64,
    pub weights: Vec<Vec<f64>>,
}

const ROW_SUM_TOL: f64 = 1e-12;

impl CostProfile {
    pub fn new(
        calls: usize,
        subroutine_times: Vec<f64>,
        extra_ops: f64,
        weights: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let p = Self {
            calls,
            subroutine_times,
            extra_ops,
            weights,
        };
        p.validate()?;
        Ok(p)
    }

    /// Every call uniformly distributed over the subroutines.
    pub fn uniform(calls: usize, subroutine_times: Vec<f64>, extra_ops: f64) -> Result<Self> {
        let n = subroutine_times.len().max(1);
        let row = vec![1.0 / n as f64; n];
        Self::new(calls, subroutine_times, extra_ops, vec![row; calls])
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        let n = self.subroutine_times.len();
        if n == 0 {
            return bad("no subroutines".into());
        }
        if let Some(t) = self
            .subroutine_times
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0))
        {
            return bad(format!(
                "subroutine time {t} is not a finite nonnegative number"
            ));
        }
        if !(self.extra_ops.is_finite() && self.extra_ops >= 0.0) {
            return bad(format!(
                "L = {} is not a finite nonnegative number",
                self.extra_ops
            ));
        }
        if self.weights.len() != self.calls {
            return bad(format!(
                "{} weight rows for Q = {}",
                self.weights.len(),
                self.calls
            ));
        }
        for (j, row) in self.weights.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {j} has {} entries, expected {n}", row.len()));
            }
            if row.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return bad(format!("row {j} has a negative or non-finite entry"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return bad(format!("row {j} sums to {sum}"));
            }
        }
        Ok(())
    }

    fn max_time(&self) -> f64 {
        self.subroutine_times.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ_j row_j + L` with each row cost evaluated by `row_cost`.
    fn accumulate(&self, row_cost: impl Fn(&[f64]) -> f64) -> f64 {
        self.weights.iter().map(|row| row_cost(row)).sum::<f64>() + self.extra_ops
    }

    fn expected_row_time(&self, row: &[f64]) -> f64 {
        let avg: f64 = row
            .iter()
            .zip(&self.subroutine_times)
            .map(|(w, t)| w * t)
            .sum();
        // a convex combination; clamp rounding overshoot past the max
        avg.min(self.max_time())
    }
}

/// `E[T(A)] = Σ_j Σ_i p_{j,i} T(B_i) + L`.
pub fn classical_avg_cost(profile: &CostProfile) -> Result<f64> {
    profile.validate()?;
    Ok(profile.accumulate(|row| profile.expected_row_time(row)))
}

/// `Q · max_i T(B_i) + L`: every call waits for the slowest branch.
pub fn quantum_naive_cost(profile: &CostProfile) -> Result<f64> {
    profile.validate()?;
    let max = profile.max_time();
    Ok(profile.accumulate(|_| max))
}

/// `Σ_j Σ_i q_{j,i} T(B_i) + L`, reported with the hidden constant set to 1.
pub fn quantum_walk_cost(profile: &CostProfile) -> Result<f64> {
    profile.validate()?;
    Ok(profile.accumulate(|row| profile.expected_row_time(row)))
}

/// Deutsch-Jozsa: uniform transform, phase oracle, uniform transform.
/// Returns the probability of the accepting basis state `e₀`.
pub fn run_dj(x: &GInput) -> Result<f64> {
    let m = x.len();
    check_power_of_two(m)?;
    StateVector::basis(m, 0)?
        .apply_uniform_transform()?
        .apply_phase_oracle(x.bits().bits())?
        .apply_uniform_transform()?
        .basis_probability(0)
}

/// When the inner subroutine is paused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StopTime {
    Steps(usize),
    Full,
}

impl fmt::Display for StopTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopTime::Steps(t) => write!(f, "{t}"),
            StopTime::Full => f.write_str("FULL"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedRunResult {
    pub stop_time: StopTime,
    /// Unrenormalized amplitude on the accepting terminal.
    pub accept_amplitude: Amplitude,
    pub accept_probability: f64,
    /// Total probability that has left the subroutines.
    pub exited_mass: f64,
}

/// Deutsch-Jozsa over `g`, with each branch's query answered by the Las
/// Vegas algorithm for `h` paused after `stop` steps.
///
/// Branch `i` carries amplitude `1/√m`; by the stop time an amplitude of
/// magnitude `√P_exit,i / √m` has left the subroutine with sign
/// `(−1)^{h(block_i)}`. Only exited amplitude reaches the final transform.
pub fn run_composed_dj_h(inst: &ComposedInstance, stop: StopTime) -> Result<ComposedRunResult> {
    let m = inst.arity();
    check_power_of_two(m)?;
    if let StopTime::Steps(0) = stop {
        return Err(Error::BadParameter("stop time must be at least 1".into()));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut branches: Vec<Amplitude> = inst
        .blocks()
        .iter()
        .map(|b| {
            let exited = match stop {
                StopTime::Steps(t) => b.exit_probability(t),
                StopTime::Full => 1.0,
            };
            let sign = if b.eval() { -1.0 } else { 1.0 };
            Complex64::new(sign * scale * exited.sqrt(), 0.0)
        })
        .collect();
    let exited_mass = branches.iter().map(|a| a.norm_sqr()).sum::<f64>().min(1.0);
    walsh_hadamard(&mut branches)?;
    let accept_amplitude = branches[0];
    Ok(ComposedRunResult {
        stop_time: stop,
        accept_amplitude,
        accept_probability: accept_amplitude.norm_sqr(),
        exited_mass,
    })
}

/// One row of the majority-vote vs. purifier comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadRow {
    pub delta: f64,
    /// Smallest odd repetition count reaching error `≤ δ`.
    pub majority_k: usize,
    pub majority_error: f64,
    /// Smallest line length `D ≥ 2` with perturbation `≤ δ`.
    pub purifier_d: usize,
    pub perturbation: f64,
    /// `purifier_complexity(ε, D)`.
    pub purifier_overhead: f64,
}

/// Smallest odd `k` with `majority_vote_error(k, p_err) ≤ delta`.
pub fn min_majority_votes(p_err: f64, delta: f64) -> Result<usize> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::BadParameter(format!(
            "target error {delta} must be positive"
        )));
    }
    let ok = |k: usize| majority_vote_error(k, p_err).map(|e| e <= delta);
    if ok(1)? {
        return Ok(1);
    }
    // galloping search over odd k = 2h + 1; the error is decreasing in k
    let mut hi = 1usize;
    while !ok(2 * hi + 1)? {
        hi *= 2;
        if hi > 1 << 26 {
            return Err(Error::BadParameter(format!(
                "target error {delta} is unreachable"
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(2 * mid + 1)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(2 * hi + 1)
}

/// Smallest `D ≥ 2` with `(ε/(1−ε))^D ≤ delta`.
pub fn min_purifier_length(epsilon: f64, delta: f64) -> Result<usize> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::BadParameter(format!(
            "target perturbation {delta} must be positive"
        )));
    }
    let ratio = odds(epsilon);
    let guess = (delta.ln() / ratio.ln()).ceil().max(2.0) as usize;
    let mut d = guess.saturating_sub(1).max(2);
    while perturbation_bound(epsilon, d)? > delta {
        d += 1;
    }
    Ok(d)
}

/// For each target `δ ∈ (0, 1/2)`: the majority overhead (votes) and the
/// purifier overhead (complexity of the shortest adequate line). Rows are
/// sorted by `δ` descending.
pub fn majority_vs_purifier_table(epsilon: f64, targets: &[f64]) -> Result<Vec<OverheadRow>> {
    if targets.is_empty() {
        return Err(Error::BadParameter("no target perturbations given".into()));
    }
    if let Some(d) = targets.iter().find(|d| !(**d > 0.0 && **d < 0.5)) {
        return Err(Error::BadParameter(format!("target {d} outside (0, 1/2)")));
    }
    let mut rows = targets
        .par_iter()
        .map(|&delta| {
            let majority_k = min_majority_votes(epsilon, delta)?;
            let purifier_d = min_purifier_length(epsilon, delta)?;
            Ok(OverheadRow {
                delta,
                majority_k,
                majority_error: majority_vote_error(majority_k, epsilon)?,
                purifier_d,
                perturbation: perturbation_bound(epsilon, purifier_d)?,
                purifier_overhead: purifier_complexity(epsilon, purifier_d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::promise::{BitString, HInput};

    fn t_1_100() -> CostProfile {
        CostProfile::uniform(2, vec![1.0, 100.0], 0.0).unwrap()
    }

    #[test]
    fn cost_examples() {
        let p = t_1_100();
        assert_eq!(classical_avg_cost(&p).unwrap(), 101.0);
        assert_eq!(quantum_walk_cost(&p).unwrap(), 101.0);
        assert_eq!(quantum_naive_cost(&p).unwrap(), 200.0);

        let single = CostProfile::uniform(7, vec![3.5], 2.0).unwrap();
        for c in [classical_avg_cost, quantum_naive_cost, quantum_walk_cost] {
            assert!((c(&single).unwrap() - (7.0 * 3.5 + 2.0)).abs() < 1e-12);
        }

        let cheapest =
            CostProfile::new(3, vec![4.0, 1.5, 9.0], 1.0, vec![vec![0.0, 1.0, 0.0]; 3]).unwrap();
        assert_eq!(classical_avg_cost(&cheapest).unwrap(), 3.0 * 1.5 + 1.0);

        let flat =
            CostProfile::new(2, vec![5.0, 5.0], 0.0, vec![vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
        assert_eq!(
            quantum_walk_cost(&flat).unwrap(),
            quantum_naive_cost(&flat).unwrap()
        );
    }

    #[test]
    fn profile_validation() {
        assert!(CostProfile::new(1, vec![1.0, 2.0], 0.0, vec![vec![0.5, 0.6]]).is_err());
        assert!(CostProfile::new(2, vec![1.0], 0.0, vec![vec![1.0]]).is_err());
        assert!(CostProfile::new(1, vec![-1.0], 0.0, vec![vec![1.0]]).is_err());
        assert!(CostProfile::new(1, vec![1.0, 1.0], 0.0, vec![vec![1.5, -0.5]]).is_err());
        assert!(CostProfile::new(1, vec![], 0.0, vec![vec![]]).is_err());
        assert!(CostProfile::new(1, vec![1.0], f64::NAN, vec![vec![1.0]]).is_err());
        let json = r#"{"Q":2,"subroutine_times":[1,100],"L":0,"weights":[[0.5,0.5],[0.5,0.5]]}"#;
        assert_eq!(CostProfile::from_json(json).unwrap(), t_1_100());
        assert!(matches!(
            CostProfile::from_json("[1,2]"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn dj_examples() {
        for (x, want) in [
            ("0000", 1.0),
            ("0011", 0.0),
            ("1100", 0.0),
            ("01", 0.0),
            ("00", 1.0),
        ] {
            let p = run_dj(&x.parse().unwrap()).unwrap();
            assert!((p - want).abs() < 1e-12, "{x}");
        }
        let six: GInput = "000111".parse().unwrap();
        assert_eq!(run_dj(&six), Err(Error::BadDimension(6)));
    }

    #[test]
    fn composed_counterexample_m4() {
        let inst = ComposedInstance::structured_counterexample(4).unwrap();
        let one = run_composed_dj_h(&inst, StopTime::Steps(1)).unwrap();
        // exit probabilities (3/4, 1, 1/2, 3/4), signs (−, +, −, +)
        let amp = (-(0.75f64.sqrt()) + 1.0 - 0.5f64.sqrt() + 0.75f64.sqrt()) / 4.0;
        assert!((one.accept_amplitude.re - amp).abs() < 1e-15);
        assert!((one.accept_probability - amp * amp).abs() < 1e-15);
        assert!((one.exited_mass - 3.0 / 4.0).abs() < 1e-15);
        let full = run_composed_dj_h(&inst, StopTime::Full).unwrap();
        assert!(full.accept_probability <= 1e-12);
        assert_eq!(full.exited_mass, 1.0);
        assert!(run_composed_dj_h(&inst, StopTime::Steps(0)).is_err());
    }

    #[test]
    fn composed_constant_instance_accepts() {
        // constant induced input 0000: every block is a 0-input
        let block = HInput::new(BitString::leading_ones(4, 2), BitString::zeros(4)).unwrap();
        let inst = ComposedInstance::new(vec![block; 4]).unwrap();
        let full = run_composed_dj_h(&inst, StopTime::Full).unwrap();
        assert!((full.accept_probability - 1.0).abs() < 1e-12);
        // induced 1111 is outside g's promise
        let one = HInput::new(BitString::zeros(4), BitString::leading_ones(4, 2)).unwrap();
        assert!(matches!(
            ComposedInstance::new(vec![one; 4]),
            Err(Error::PromiseViolation(_))
        ));
    }

    #[test]
    fn table_examples() {
        let eps = 1.0 / 3.0;
        let rows = majority_vs_purifier_table(eps, &[2f64.powi(-20), eps]).unwrap();
        assert_eq!(rows[0].delta, eps);
        assert_eq!(rows[0].majority_k, 1);
        let deep = rows[1];
        assert!(deep.purifier_overhead <= 2.0);
        assert!(deep.majority_k > rows[0].majority_k);
        assert!(deep.majority_error <= deep.delta);
        assert!(majority_vote_error(deep.majority_k - 2, eps).unwrap() > deep.delta);
        assert_eq!(deep.purifier_d, 20);
        assert!(majority_vs_purifier_table(eps, &[]).is_err());
        assert!(majority_vs_purifier_table(eps, &[0.5]).is_err());
        assert!(majority_vs_purifier_table(eps, &[0.0]).is_err());
    }

    #[test]
    fn min_length_is_minimal() {
        for eps in [0.1, 0.25, 1.0 / 3.0, 0.45] {
            for delta in [0.4, 0.1, 1e-3, 1e-9] {
                let d = min_purifier_length(eps, delta).unwrap();
                assert!(perturbation_bound(eps, d).unwrap() <= delta);
                assert!(d == 2 || perturbation_bound(eps, d - 1).unwrap() > delta);
            }
        }
    }
}

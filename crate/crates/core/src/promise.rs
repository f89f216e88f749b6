//! The promise problems `g` (constant vs. balanced) and `h` (which half is
//! nonzero), their composition `g∘h`, the Las Vegas algorithm for `h`, and
//! majority-vote error arithmetic.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Inner block sizes up to this use exact tree enumeration for exit
/// probabilities; larger blocks use the hypergeometric closed form.
pub const ENUMERATION_LIMIT: usize = 8;

/// A binary string, index 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// `len` bits with the first `weight` set.
    pub fn leading_ones(len: usize, weight: usize) -> Self {
        Self((0..len).map(|i| i < weight).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Packs bits MSB-first into hex nibbles; the last nibble is zero-padded.
    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|nib| {
                let v = nib
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << (3 - i)));
                char::from_digit(v, 16).expect("nibble < 16")
            })
            .collect()
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "hex string {hex:?} has wrong length for {len} bits"
            )));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {ch:?}")))?;
            bits.extend((0..4).map(|i| (v >> (3 - i)) & 1 == 1));
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::Parse("nonzero padding bits".into()));
        }
        bits.truncate(len);
        Ok(Self(bits))
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad bit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Input to `g`: an even-length string of weight 0 or exactly half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GInput(BitString);

impl GInput {
    pub fn new(bits: BitString) -> Result<Self> {
        let m = bits.len();
        if m < 2 || m % 2 != 0 {
            return Err(Error::PromiseViolation(format!(
                "g needs an even length >= 2, got {m}"
            )));
        }
        let w = bits.weight();
        if w != 0 && w != m / 2 {
            return Err(Error::PromiseViolation(format!(
                "g input weight {w} is neither 0 nor {}",
                m / 2
            )));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `g(x)`: true (1) iff `x` is the all-zero string.
    pub fn eval(&self) -> bool {
        self.0.is_zero()
    }
}

impl FromStr for GInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// Input to `h`: one half all-zero, the other of weight at least `m/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HInput {
    left: BitString,
    right: BitString,
}

impl HInput {
    pub fn new(left: BitString, right: BitString) -> Result<Self> {
        let m = left.len();
        if m == 0 || right.len() != m {
            return Err(Error::PromiseViolation(format!(
                "h halves must be nonempty and equal length ({} vs {})",
                left.len(),
                right.len()
            )));
        }
        let nonzero = match (left.is_zero(), right.is_zero()) {
            (true, false) => &right,
            (false, true) => &left,
            _ => {
                return Err(Error::PromiseViolation(
                    "exactly one half of an h input must be all-zero".into(),
                ))
            }
        };
        if 2 * nonzero.weight() < m {
            return Err(Error::PromiseViolation(format!(
                "nonzero half has weight {} < m/2 = {}",
                nonzero.weight(),
                m as f64 / 2.0
            )));
        }
        Ok(Self { left, right })
    }

    pub fn from_strs(left: &str, right: &str) -> Result<Self> {
        Self::new(left.parse()?, right.parse()?)
    }

    /// Half length `m`.
    pub fn m(&self) -> usize {
        self.left.len()
    }

    pub fn left(&self) -> &BitString {
        &self.left
    }

    pub fn right(&self) -> &BitString {
        &self.right
    }

    /// `h(z)`: true (1) iff the left half is all-zero.
    pub fn eval(&self) -> bool {
        self.left.is_zero()
    }

    pub fn nonzero_half(&self) -> &BitString {
        if self.eval() {
            &self.right
        } else {
            &self.left
        }
    }

    pub fn nonzero_weight(&self) -> usize {
        self.nonzero_half().weight()
    }

    /// Probability the Las Vegas algorithm stops after its first step.
    pub fn first_step_exit_prob(&self) -> f64 {
        self.nonzero_weight() as f64 / self.m() as f64
    }

    /// Exact distribution of the step at which [`las_vegas_h`] stops:
    /// entry `k` is `P(stop at step k+1)`. Computed by walking the full
    /// tree of sampling orders, branching on each unqueried index.
    pub fn exit_distribution(&self) -> Vec<f64> {
        let hits = self.nonzero_half().bits();
        let mut dist = vec![0.0; self.m() - self.nonzero_weight() + 1];
        let mut queried = vec![false; hits.len()];
        walk_sampling_tree(hits, &mut queried, 0, 1.0, &mut dist);
        dist
    }

    /// `P(stop within `steps` steps)` via the hypergeometric tail
    /// `1 − C(m−w, t)/C(m, t)`.
    pub fn exit_probability_closed_form(&self, steps: usize) -> f64 {
        let m = self.m();
        let zeros = m - self.nonzero_weight();
        if steps > zeros {
            return 1.0;
        }
        let miss: f64 = (0..steps)
            .map(|i| (zeros - i) as f64 / (m - i) as f64)
            .product();
        1.0 - miss
    }

    /// `P(stop within `steps` steps)`; exact enumeration for small blocks.
    pub fn exit_probability(&self, steps: usize) -> f64 {
        if self.m() <= ENUMERATION_LIMIT {
            let dist = self.exit_distribution();
            if steps >= dist.len() {
                1.0
            } else {
                dist[..steps].iter().sum::<f64>().min(1.0)
            }
        } else {
            self.exit_probability_closed_form(steps)
        }
    }

    /// Worst-case number of steps, `m − w + 1`.
    pub fn max_steps(&self) -> usize {
        self.m() - self.nonzero_weight() + 1
    }
}

fn walk_sampling_tree(
    hits: &[bool],
    queried: &mut [bool],
    depth: usize,
    prob: f64,
    dist: &mut [f64],
) {
    let remaining = queried.len() - depth;
    let branch = prob / remaining as f64;
    for j in 0..queried.len() {
        if queried[j] {
            continue;
        }
        if hits[j] {
            dist[depth] += branch;
        } else {
            queried[j] = true;
            walk_sampling_tree(hits, queried, depth + 1, branch, dist);
            queried[j] = false;
        }
    }
}

/// Outcome of one run of the Las Vegas algorithm for `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LasVegasTrace {
    pub answer: bool,
    /// Charged two per step (one left query, one right query).
    pub queries: usize,
    pub steps: usize,
}

/// Samples unqueried indices `j` without replacement, querying `x_j` and
/// `x_{m+j}` each step, until a 1 is seen.
pub fn las_vegas_h(z: &HInput, seed: u64) -> LasVegasTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    las_vegas_h_with(z, &mut rng)
}

pub fn las_vegas_h_with<R: Rng + ?Sized>(z: &HInput, rng: &mut R) -> LasVegasTrace {
    let m = z.m();
    let mut order: Vec<usize> = (0..m).collect();
    // incremental Fisher-Yates: only the prefix actually used is drawn
    run_in_order(z, |step| {
        let pick = rng.random_range(step..m);
        order.swap(step, pick);
        order[step]
    })
}

/// Runs the algorithm with a fixed sampling order, a permutation of `0..m`.
pub fn las_vegas_h_ordered(z: &HInput, order: &[usize]) -> Result<LasVegasTrace> {
    let m = z.m();
    let mut seen = vec![false; m];
    if order.len() != m
        || !order
            .iter()
            .all(|&j| j < m && !std::mem::replace(&mut seen[j], true))
    {
        return Err(Error::BadParameter(format!(
            "sampling order is not a permutation of 0..{m}"
        )));
    }
    Ok(run_in_order(z, |step| order[step]))
}

fn run_in_order(z: &HInput, mut index_at: impl FnMut(usize) -> usize) -> LasVegasTrace {
    for step in 0..z.m() {
        let j = index_at(step);
        let (l, r) = (z.left.bits()[j], z.right.bits()[j]);
        if l || r {
            let steps = step + 1;
            return LasVegasTrace {
                answer: r,
                queries: 2 * steps,
                steps,
            };
        }
    }
    unreachable!("promise guarantees a 1 in the nonzero half")
}

/// An input to `g∘h`: blocks of `h`-inputs whose induced string is a
/// valid `g`-input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedInstance {
    blocks: Vec<HInput>,
}

impl ComposedInstance {
    pub fn new(blocks: Vec<HInput>) -> Result<Self> {
        let inst = Self { blocks };
        if let Some(first) = inst.blocks.first() {
            if inst.blocks.iter().any(|b| b.m() != first.m()) {
                return Err(Error::PromiseViolation(
                    "all blocks must share one inner length".into(),
                ));
            }
        }
        inst.induced()?;
        Ok(inst)
    }

    /// The four-block instance whose induced `g`-input is balanced but whose
    /// nonzero halves have weights `3m/4, m, m/2, 3m/4`; ones are placed
    /// lexicographically first.
    pub fn structured_counterexample(m: usize) -> Result<Self> {
        if m < 4 || m % 4 != 0 {
            return Err(Error::BadArity(m));
        }
        let zero = BitString::zeros(m);
        let ones = |w| BitString::leading_ones(m, w);
        Self::new(vec![
            HInput::new(zero.clone(), ones(3 * m / 4))?,
            HInput::new(ones(m), zero.clone())?,
            HInput::new(zero.clone(), ones(m / 2))?,
            HInput::new(ones(3 * m / 4), zero)?,
        ])
    }

    pub fn blocks(&self) -> &[HInput] {
        &self.blocks
    }

    /// Outer arity.
    pub fn arity(&self) -> usize {
        self.blocks.len()
    }

    pub fn inner_m(&self) -> usize {
        self.blocks.first().map_or(0, HInput::m)
    }

    /// `(h(block_1), …, h(block_m))` as a validated `g`-input.
    pub fn induced(&self) -> Result<GInput> {
        GInput::new(BitString::new(
            self.blocks.iter().map(HInput::eval).collect(),
        ))
    }

    pub fn eval(&self) -> bool {
        self.induced().expect("validated on construction").eval()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ComposedWire {
    m: usize,
    blocks: Vec<String>,
}

impl Serialize for ComposedInstance {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut bits = b.left.bits().to_vec();
                bits.extend_from_slice(b.right.bits());
                BitString(bits).to_hex()
            })
            .collect();
        ComposedWire {
            m: self.inner_m(),
            blocks,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ComposedInstance {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = ComposedWire::deserialize(de)?;
        let blocks = wire
            .blocks
            .iter()
            .map(|hex| {
                let bits = BitString::from_hex(hex, 2 * wire.m)?;
                let (l, r) = bits.bits().split_at(wire.m);
                HInput::new(BitString(l.to_vec()), BitString(r.to_vec()))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ComposedInstance::new(blocks).map_err(D::Error::custom)
    }
}

/// Probability that a majority of `k` independent votes, each wrong with
/// probability `p_err`, is wrong: `Σ_{j>k/2} C(k,j) p^j (1−p)^{k−j}`.
pub fn majority_vote_error(k: usize, p_err: f64) -> Result<f64> {
    if k == 0 || k % 2 == 0 {
        return Err(Error::BadRepetitionCount(k));
    }
    if !(0.0..0.5).contains(&p_err) {
        return Err(Error::BadParameter(format!(
            "per-vote error {p_err} outside [0, 1/2)"
        )));
    }
    if p_err == 0.0 {
        return Ok(0.0);
    }
    let j0 = k / 2 + 1;
    // ln C(k, j0) by a running product of ratios
    let ln_binom: f64 = (1..=j0)
        .map(|i| ((k - j0 + i) as f64 / i as f64).ln())
        .sum();
    let (lp, lq) = (p_err.ln(), (-p_err).ln_1p());
    let mut term = (ln_binom + j0 as f64 * lp + (k - j0) as f64 * lq).exp();
    let ratio = p_err / (1.0 - p_err);
    let mut total = 0.0;
    for j in j0..=k {
        total += term;
        term *= (k - j) as f64 / (j + 1) as f64 * ratio;
    }
    Ok(total.min(1.0))
}

/// Hoeffding exponent: `majority_vote_error(k, p) ≤ 2^{−c·k}` with
/// `c = 2(1/2 − p)² / ln 2`.
pub fn majority_decay_constant(p_err: f64) -> f64 {
    2.0 * (0.5 - p_err).powi(2) / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(l: &str, r: &str) -> HInput {
        HInput::from_strs(l, r).unwrap()
    }

    #[test]
    fn g_eval_examples() {
        assert!("0000".parse::<GInput>().unwrap().eval());
        assert!(!"0101".parse::<GInput>().unwrap().eval());
        assert!(matches!(
            "0001".parse::<GInput>(),
            Err(Error::PromiseViolation(_))
        ));
        assert!("000".parse::<GInput>().is_err());
    }

    #[test]
    fn h_eval_examples() {
        assert!(h("0000", "1110").eval());
        assert!(!h("1011", "0000").eval());
        for (l, r) in [("0000", "0100"), ("0000", "0000"), ("1100", "0011")] {
            assert!(matches!(
                HInput::from_strs(l, r),
                Err(Error::PromiseViolation(_))
            ));
        }
    }

    #[test]
    fn structured_counterexample_shape() {
        let inst = ComposedInstance::structured_counterexample(4).unwrap();
        let weights: Vec<_> = inst
            .blocks()
            .iter()
            .map(|b| (b.left().weight(), b.right().weight()))
            .collect();
        assert_eq!(weights, vec![(0, 3), (4, 0), (0, 2), (3, 0)]);
        assert_eq!(inst.induced().unwrap().bits().to_string(), "1010");
        assert!(!inst.eval());
        assert_eq!(inst.blocks()[0].right().to_string(), "1110");
        for m in [4, 8, 16, 32] {
            let inst = ComposedInstance::structured_counterexample(m).unwrap();
            assert_eq!(inst.arity(), 4);
            assert_eq!(inst.inner_m(), m);
        }
        for m in [0, 2, 6, 10] {
            assert_eq!(
                ComposedInstance::structured_counterexample(m),
                Err(Error::BadArity(m))
            );
        }
    }

    #[test]
    fn first_step_exit_prob_examples() {
        assert_eq!(h("0000", "1110").first_step_exit_prob(), 0.75);
        assert_eq!(h("1111", "0000").first_step_exit_prob(), 1.0);
        assert_eq!(h("0000", "0110").first_step_exit_prob(), 0.5);
    }

    #[test]
    fn las_vegas_full_weight_stops_immediately() {
        let z = h("1111", "0000");
        for seed in 0..50 {
            let t = las_vegas_h(&z, seed);
            assert_eq!(
                t,
                LasVegasTrace {
                    answer: false,
                    queries: 2,
                    steps: 1
                }
            );
        }
    }

    #[test]
    fn ordered_runs() {
        let z = h("0000", "0011");
        let t = las_vegas_h_ordered(&z, &[0, 1, 2, 3]).unwrap();
        assert_eq!(
            t,
            LasVegasTrace {
                answer: true,
                queries: 6,
                steps: 3
            }
        );
        let t = las_vegas_h_ordered(&z, &[3, 0, 1, 2]).unwrap();
        assert_eq!(t.steps, 1);
        assert!(las_vegas_h_ordered(&z, &[0, 1, 2]).is_err());
        assert!(las_vegas_h_ordered(&z, &[0, 1, 1, 2]).is_err());
        assert!(las_vegas_h_ordered(&z, &[0, 1, 2, 4]).is_err());
    }

    #[test]
    fn exit_distribution_m4_half_weight() {
        let d = h("0000", "1010").exit_distribution();
        assert_eq!(d.len(), 3);
        let expect = [1.0 / 2.0, 1.0 / 3.0, 1.0 / 6.0];
        for (a, e) in d.iter().zip(expect) {
            assert!((a - e).abs() < 1e-15);
        }
        let mean: f64 = d.iter().enumerate().map(|(k, p)| (k + 1) as f64 * p).sum();
        assert!((mean - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let blocks = [
            h("00000000", "11110000"),
            h("10101110", "00000000"),
            h("00000000", "11111111"),
            h("000000", "101100"),
        ];
        for z in &blocks {
            for t in 0..=z.m() + 1 {
                let e = z.exit_probability(t);
                let c = z.exit_probability_closed_form(t);
                assert!((e - c).abs() < 1e-14, "{z:?} t={t}: {e} vs {c}");
            }
        }
    }

    #[test]
    fn hex_round_trip_and_json() {
        let inst = ComposedInstance::structured_counterexample(4).unwrap();
        let json = inst.to_json();
        assert_eq!(json, r#"{"m":4,"blocks":["0e","f0","0c","e0"]}"#);
        assert_eq!(ComposedInstance::from_json(&json).unwrap(), inst);
        // odd bit count pads the last nibble
        let b: BitString = "101".parse().unwrap();
        assert_eq!(b.to_hex(), "a");
        assert_eq!(BitString::from_hex("a", 3).unwrap(), b);
        assert!(BitString::from_hex("b", 3).is_err());
        assert!(
            ComposedInstance::from_json(r#"{"m":4,"blocks":["0e","f0","0e","f0","0e"]}"#).is_err()
        );
        assert!(ComposedInstance::from_json(r#"{"m":4,"blocks":["01","f0"]}"#).is_err());
    }

    #[test]
    fn majority_examples() {
        assert!((majority_vote_error(1, 1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((majority_vote_error(3, 1.0 / 3.0).unwrap() - 7.0 / 27.0).abs() < 1e-15);
        let p = 1.0 / 3.0;
        let e31 = majority_vote_error(31, p).unwrap();
        let e29 = majority_vote_error(29, p).unwrap();
        assert!(e31 < e29);
        assert!(e31 <= 2f64.powf(-31.0 * majority_decay_constant(p)));
        assert_eq!(majority_vote_error(5, 0.0), Ok(0.0));
        assert_eq!(
            majority_vote_error(4, 0.1),
            Err(Error::BadRepetitionCount(4))
        );
        assert_eq!(
            majority_vote_error(0, 0.1),
            Err(Error::BadRepetitionCount(0))
        );
        assert!(majority_vote_error(3, 0.5).is_err());
    }

    #[test]
    fn majority_matches_direct_sum() {
        // independent evaluation with exact integer binomials
        fn direct(k: u64, p: f64) -> f64 {
            let mut c = 1u128;
            let mut total = 0.0;
            for j in 0..=k {
                if j > 0 {
                    c = c * (k - j + 1) as u128 / j as u128;
                }
                if 2 * j > k {
                    total += c as f64 * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32);
                }
            }
            total
        }
        for k in (1..60).step_by(2) {
            for p in [0.01, 0.2, 1.0 / 3.0, 0.45] {
                let a = majority_vote_error(k, p).unwrap();
                let b = direct(k as u64, p);
                assert!((a - b).abs() <= 1e-13 * b.max(1e-300), "k={k} p={p}");
            }
        }
    }

    proptest! {
        #[test]
        fn majority_strictly_decreasing(p in 0.01f64..0.49, half in 0usize..60) {
            let k = 2 * half + 1;
            let a = majority_vote_error(k, p).unwrap();
            let b = majority_vote_error(k + 2, p).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn las_vegas_never_errs(seed in any::<u64>(), w in 2usize..=4, right in any::<bool>()) {
            let ones = BitString::leading_ones(4, w);
            let z = if right {
                HInput::new(BitString::zeros(4), ones).unwrap()
            } else {
                HInput::new(ones, BitString::zeros(4)).unwrap()
            };
            let t = las_vegas_h(&z, seed);
            prop_assert_eq!(t.answer, z.eval());
            prop_assert_eq!(t.queries, 2 * t.steps);
            prop_assert!(t.steps <= z.max_steps());
        }
    }
}

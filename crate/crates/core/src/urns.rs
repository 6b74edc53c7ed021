//! Probabilistic symmetric pairs: the coin model, the ascent-set model and
//! the Pólya-Eggenberger urn (single and multi-urn), with a brute-force
//! outcome enumerator and a seeded Monte Carlo simulator.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial_row, factorial, rising_factorial, Rational};
use crate::transforms::{sie_transform, Sequence};

/// One urn with `r` red and `b` black balls (both positive rationals).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Urn {
    pub r: Rational,
    pub b: Rational,
}

impl Urn {
    pub fn new(r: Rational, b: Rational) -> Result<Self> {
        check_positive(&r, &b)?;
        Ok(Urn { r, b })
    }

    pub fn total(&self) -> Rational {
        &self.r + &self.b
    }
}

fn check_positive(r: &Rational, b: &Rational) -> Result<()> {
    if !r.is_positive() || !b.is_positive() {
        return Err(Error::InvalidUrn(format!("r = {r} and b = {b} must both be positive")));
    }
    Ok(())
}

/// Parameters of `m >= 1` independent urns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Urn>", into = "Vec<Urn>")]
pub struct UrnSpec(Vec<Urn>);

impl UrnSpec {
    pub fn new(urns: Vec<Urn>) -> Result<Self> {
        if urns.is_empty() {
            return Err(Error::InvalidUrn("at least one urn is required".into()));
        }
        for u in &urns {
            check_positive(&u.r, &u.b)?;
        }
        Ok(UrnSpec(urns))
    }

    pub fn single(r: Rational, b: Rational) -> Result<Self> {
        UrnSpec::new(vec![Urn::new(r, b)?])
    }

    /// `m` identical urns.
    pub fn repeated(m: usize, r: Rational, b: Rational) -> Result<Self> {
        let urn = Urn::new(r, b)?;
        UrnSpec::new(vec![urn; m])
    }

    /// Urns that add `c` balls of the drawn colour per step are the same
    /// process as one-ball urns started at `r/c` and `b/c`.
    pub fn with_increment(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidUrn(format!("increment {c} must be positive")));
        }
        UrnSpec::new(
            self.0
                .iter()
                .map(|u| Urn { r: &u.r / c, b: &u.b / c })
                .collect(),
        )
    }

    pub fn urns(&self) -> &[Urn] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<Urn>> for UrnSpec {
    type Error = Error;
    fn try_from(v: Vec<Urn>) -> Result<Self> {
        UrnSpec::new(v)
    }
}

impl From<UrnSpec> for Vec<Urn> {
    fn from(s: UrnSpec) -> Self {
        s.0
    }
}

impl FromStr for UrnSpec {
    type Err = Error;

    /// Parses `"r1:b1,r2:b2"`.
    fn from_str(s: &str) -> Result<Self> {
        let urns = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                let (r, b) = t
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected r:b, got {t:?}")))?;
                Urn::new(r.parse()?, b.parse()?)
            })
            .collect::<Result<Vec<_>>>()?;
        UrnSpec::new(urns)
    }
}

impl fmt::Display for UrnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|u| format!("{}:{}", u.r, u.b)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Probability that the first `reds + blacks` draws form one particular
/// sequence with the given colour counts: `(r)_m (b)_n / (r+b)_{m+n}`.
pub fn polya_sequence_prob(r: &Rational, b: &Rational, reds: u64, blacks: u64) -> Result<Rational> {
    check_positive(r, b)?;
    Ok(rising_factorial(r, reds) * rising_factorial(b, blacks)
        / rising_factorial(&(r + b), reds + blacks))
}

/// Probability that `n` given draws are all red.
pub fn urn_abar(n: u64, r: &Rational, b: &Rational) -> Result<Rational> {
    polya_sequence_prob(r, b, n, 0)
}

/// Probability that `n` given draws are all black, `(b)_n / (r+b)_n`.
pub fn urn_bbar(n: u64, r: &Rational, b: &Rational) -> Result<Rational> {
    let closed = polya_sequence_prob(r, b, 0, n)?;
    debug_assert_eq!(
        closed,
        sie_transform(&abar_sequence(n, r, b)?)[n as usize],
        "alternating sum disagrees with closed form"
    );
    Ok(closed)
}

/// `(urn_abar(k))_{k=0..=n}`.
pub fn abar_sequence(n: u64, r: &Rational, b: &Rational) -> Result<Sequence> {
    Sequence::new((0..=n).map(|k| urn_abar(k, r, b)).collect::<Result<_>>()?)
}

/// Probability that every urn yields red on `n` given steps.
pub fn multi_urn_abar(n: u64, spec: &UrnSpec) -> Result<Rational> {
    spec.urns().iter().map(|u| urn_abar(n, &u.r, &u.b)).product()
}

/// Probability that at each of `n` steps at least one urn yields black,
/// computed by the alternating sum `Σ_k (-1)^k C(n,k) Π_i (r_i)_k/(r_i+b_i)_k`.
pub fn multi_urn_bbar(n: u64, spec: &UrnSpec) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (k, c) in binomial_row(n).into_iter().enumerate() {
        let term = Rational::from(c) * multi_urn_abar(k as u64, spec)?;
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Strictly increasing set of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteIndexSet(Vec<u64>);

impl FiniteIndexSet {
    pub fn new(members: Vec<u64>) -> Result<Self> {
        if members.first() == Some(&0) {
            return Err(Error::InvalidIndexSet("members must be positive".into()));
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet("members must be strictly increasing".into()));
        }
        Ok(FiniteIndexSet(members))
    }

    pub fn members(&self) -> &[u64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// Lengths of the maximal runs of consecutive integers.
    pub fn block_lengths(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        for (i, &m) in self.0.iter().enumerate() {
            if i > 0 && self.0[i - 1] + 1 == m {
                *out.last_mut().unwrap() += 1;
            } else {
                out.push(1);
            }
        }
        out
    }
}

impl TryFrom<Vec<u64>> for FiniteIndexSet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        FiniteIndexSet::new(v)
    }
}

impl From<FiniteIndexSet> for Vec<u64> {
    fn from(s: FiniteIndexSet) -> Self {
        s.0
    }
}

/// Probability that `x_i < x_{i+1}` for all `i` in `s`, for i.i.d. uniform
/// reals: the product of `1/(s_j+1)!` over the block lengths `s_j` of `s`.
pub fn ascent_prob(s: &FiniteIndexSet) -> Rational {
    let den: BigInt = s.block_lengths().into_iter().map(|len| factorial(len + 1)).product();
    Rational::new(1, den).expect("factorials are positive")
}

/// Coin with heads probability `p`: `ā_k = p^k`, `b̄_k = (1-p)^k`.
pub fn coin_pair(n: u64, p: &Rational) -> (Sequence, Sequence) {
    let q = Rational::one() - p;
    let powers = |base: &Rational| {
        let mut acc = Rational::one();
        let mut v = Vec::with_capacity(n as usize + 1);
        for _ in 0..=n {
            v.push(acc.clone());
            acc *= base;
        }
        Sequence::new(v).expect("n + 1 >= 1 entries")
    };
    (powers(p), powers(&q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    /// A red draw.
    Right,
    /// A black draw.
    Up,
}

/// Probability of following `path` in the lattice walk where the step from
/// `(i, j)` goes right with probability `(r+i)/(r+b+i+j)`.
pub fn lattice_path_prob(path: &[Step], r: &Rational, b: &Rational) -> Result<Rational> {
    check_positive(r, b)?;
    let (mut i, mut j) = (Rational::zero(), Rational::zero());
    let mut acc = Rational::one();
    let one = Rational::one();
    for step in path {
        let total = r + b + &i + &j;
        match step {
            Step::Right => {
                acc *= (r + &i) / total;
                i += &one;
            }
            Step::Up => {
                acc *= (b + &j) / total;
                j += &one;
            }
        }
    }
    Ok(acc)
}

pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Result of summing over every admissible outcome sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeEnumeration {
    pub total: Rational,
    /// Number of outcome sequences visited.
    pub outcomes: u64,
    /// Smallest single-outcome probability (1 when there are no steps).
    pub min_summand: Rational,
    pub all_positive: bool,
}

/// Sums, over all colour sequences for `n` steps in which no step is
/// all-red, the product over urns of the sequence probability.
pub fn enumerate_outcomes_bbar(n: u64, spec: &UrnSpec) -> Result<OutcomeEnumeration> {
    enumerate_outcomes(n, spec, true)
}

/// Same sum over every colour sequence; equals 1.
pub fn total_outcome_probability(n: u64, spec: &UrnSpec) -> Result<OutcomeEnumeration> {
    enumerate_outcomes(n, spec, false)
}

fn enumerate_outcomes(n: u64, spec: &UrnSpec, exclude_all_red: bool) -> Result<OutcomeEnumeration> {
    let m = spec.len();
    let per_step = 1u64
        .checked_shl(m as u32)
        .filter(|_| m < 64)
        .ok_or(Error::EnumerationTooLarge)?
        - u64::from(exclude_all_red);
    let count = u32::try_from(n)
        .ok()
        .and_then(|n| per_step.checked_pow(n))
        .filter(|&c| c <= ENUMERATION_LIMIT)
        .ok_or(Error::EnumerationTooLarge)?;

    // Every outcome's probability depends only on the per-urn red counts, so
    // outcomes are visited one by one and tallied by that count vector.
    let first_mask = u64::from(exclude_all_red);
    let mut tally: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut reds = vec![0u64; m];
    visit(n, first_mask, per_step + first_mask, &mut reds, &mut tally);

    let tables: Vec<Vec<Rational>> = spec
        .urns()
        .iter()
        .map(|u| {
            (0..=n)
                .map(|k| polya_sequence_prob(&u.r, &u.b, k, n - k))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    let mut classes: Vec<_> = tally.into_iter().collect();
    classes.sort();
    let mut total = Rational::zero();
    let mut min_summand: Option<Rational> = None;
    for (reds, multiplicity) in classes {
        let p: Rational = reds.iter().zip(&tables).map(|(&k, t)| t[k as usize].clone()).product();
        if min_summand.as_ref().is_none_or(|cur| p < *cur) {
            min_summand = Some(p.clone());
        }
        total += Rational::from(multiplicity) * p;
    }
    let min_summand = min_summand.unwrap_or_else(Rational::zero);
    Ok(OutcomeEnumeration {
        total,
        outcomes: count,
        all_positive: min_summand.is_positive(),
        min_summand,
    })
}

// Depth-first walk over colour vectors; bit i of a mask means urn i drew black.
fn visit(steps_left: u64, lo: u64, hi: u64, reds: &mut [u64], tally: &mut HashMap<Vec<u64>, u64>) {
    if steps_left == 0 {
        *tally.entry(reds.to_vec()).or_insert(0) += 1;
        return;
    }
    for mask in lo..hi {
        for (i, r) in reds.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                *r += 1;
            }
        }
        visit(steps_left - 1, lo, hi, reds, tally);
        for (i, r) in reds.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                *r -= 1;
            }
        }
    }
}

/// A generative process with a known closed-form success probability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    /// `n` draws from one urn, success when all are red.
    SingleUrnAbar { n: u64, r: Rational, b: Rational },
    /// `n` steps drawing once from every urn, success when every step has a
    /// black ball.
    MultiUrnBbar { n: u64, spec: UrnSpec },
    /// `max(S)+1` uniform reals, success when `x_i < x_{i+1}` for all `i` in `S`.
    Ascent { set: FiniteIndexSet },
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        match self {
            Experiment::SingleUrnAbar { r, b, .. } => check_positive(r, b),
            Experiment::MultiUrnBbar { spec, .. } => UrnSpec::new(spec.urns().to_vec()).map(drop),
            Experiment::Ascent { set } if set.is_empty() => {
                Err(Error::InvalidIndexSet("ascent simulation needs a nonempty set".into()))
            }
            Experiment::Ascent { .. } => Ok(()),
        }
    }

    pub fn exact(&self) -> Result<Rational> {
        match self {
            Experiment::SingleUrnAbar { n, r, b } => urn_abar(*n, r, b),
            Experiment::MultiUrnBbar { n, spec } => multi_urn_bbar(*n, spec),
            Experiment::Ascent { set } => Ok(ascent_prob(set)),
        }
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            Experiment::SingleUrnAbar { n, r, b } => {
                let mut urn = UrnState::new(r, b);
                (0..*n).all(|_| urn.draw(rng))
            }
            Experiment::MultiUrnBbar { n, spec } => {
                let mut urns: Vec<UrnState> = spec.urns().iter().map(|u| UrnState::new(&u.r, &u.b)).collect();
                let mut ok = true;
                for _ in 0..*n {
                    // Draw from every urn so each keeps its own reinforcement.
                    let mut all_red = true;
                    for urn in urns.iter_mut() {
                        all_red &= urn.draw(rng);
                    }
                    ok &= !all_red;
                }
                ok
            }
            Experiment::Ascent { set } => {
                let len = set.max().unwrap_or(0) as usize + 1;
                let xs: Vec<f64> = (0..len).map(|_| uniform_f64(rng)).collect();
                // Ties count as failures.
                set.members().iter().all(|&i| xs[i as usize - 1] < xs[i as usize])
            }
        }
    }
}

struct UrnState {
    red: Rational,
    black: Rational,
}

impl UrnState {
    fn new(r: &Rational, b: &Rational) -> Self {
        UrnState { red: r.clone(), black: b.clone() }
    }

    /// Draws one ball, reinforces its colour, and reports whether it was red.
    fn draw(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let p = &self.red / (&self.red + &self.black);
        let red = bernoulli(rng, &p);
        if red {
            self.red += Rational::one();
        } else {
            self.black += Rational::one();
        }
        red
    }
}

const MANTISSA_BITS: u32 = 53;

fn uniform_bits(rng: &mut ChaCha8Rng) -> u64 {
    rng.next_u64() >> (64 - MANTISSA_BITS)
}

fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    uniform_bits(rng) as f64 / (1u64 << MANTISSA_BITS) as f64
}

/// `u < p` for `u = k / 2^53` uniform in `[0, 1)`, compared exactly.
fn bernoulli(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    let k = BigInt::from(uniform_bits(rng));
    k * p.denom() < (p.numer() << MANTISSA_BITS)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub experiment: Experiment,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub exact: Rational,
    pub z_score: f64,
    pub seed: u64,
    pub workers: usize,
}

/// Single-stream simulation.
pub fn simulate(experiment: &Experiment, trials: u64, seed: u64) -> Result<SimulationReport> {
    simulate_sharded(experiment, trials, seed, 1)
}

/// Splits `trials` across `workers` threads. Worker `w` uses ChaCha stream `w`
/// seeded from `seed`; the merged report is deterministic for a fixed worker
/// count.
pub fn simulate_sharded(experiment: &Experiment, trials: u64, seed: u64, workers: usize) -> Result<SimulationReport> {
    experiment.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidParameter("workers must be at least 1".into()));
    }
    let exact = experiment.exact()?;
    let share = |w: usize| trials / workers as u64 + u64::from((w as u64) < trials % workers as u64);
    let run = |w: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(w as u64);
        (0..share(w)).filter(|_| experiment.trial(&mut rng)).count() as u64
    };
    let successes: u64 = if workers == 1 {
        run(0)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || run(w))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
        })
    };
    let estimate = successes as f64 / trials as f64;
    Ok(SimulationReport {
        experiment: experiment.clone(),
        trials,
        successes,
        estimate,
        z_score: z_score(estimate, &exact, trials),
        exact,
        seed,
        workers,
    })
}

fn z_score(estimate: f64, exact: &Rational, trials: u64) -> f64 {
    let p = exact.to_f64();
    if p > 0.0 && p < 1.0 {
        (estimate - p) * (trials as f64 / (p * (1.0 - p))).sqrt()
    } else if estimate == p {
        0.0
    } else {
        (estimate - p).signum() * f64::INFINITY
    }
}

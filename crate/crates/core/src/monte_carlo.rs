//! Simulation of the OST walk and of its strong stationary time.
//!
//! Let `T_j` be the first step whose first draw (the uniformly chosen right
//! position) is `j`, and `T = max_j T_j` the first step by which every
//! position has been drawn. `T` is a strong stationary time, hence
//! `d_TV(t) <= d_Sep(t) <= P(T > t)`, and `T` is a coupon-collector time with
//! `P(T > n ln n + c n) <= e^{-c}`.
//!
//! Every trial draws from its own ChaCha8 stream, selected by the trial index
//! under a master seed, so results do not depend on how trials are scheduled
//! across threads. All reductions are over integer counts.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{DenseDistribution, ExactEngine};
use crate::group::{GroupElement, GroupParams, DEFAULT_EXACT_CAP};
use crate::shuffle::{ost_generators, Generator, GeneratorDistribution};

/// Groups with fewer conditioned samples than `MIN_SAMPLES_PER_OUTCOME * m * j`
/// are flagged as undersampled by [`empirical_pj_check`].
pub const MIN_SAMPLES_PER_OUTCOME: u64 = 20;

/// The random stream for one trial.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// `X^t` together with the first-draw bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    element: GroupElement,
    t: usize,
    // T_j for each position, once observed
    first_draw_times: Vec<Option<usize>>,
    uncollected: usize,
    sst: Option<usize>,
}

impl ChainState {
    pub fn new(params: GroupParams) -> Self {
        let n = params.n() as usize;
        Self {
            element: GroupElement::identity(params),
            t: 0,
            first_draw_times: vec![None; n],
            uncollected: n,
            sst: None,
        }
    }

    /// Draws one generator `s` and sets `X <- s X`.
    pub fn step<R: Rng + ?Sized>(&mut self, dist: &GeneratorDistribution, rng: &mut R) -> Generator {
        let (g, first_draw) = dist.sample_step(rng);
        self.element
            .left_mul_transposition(g.i() as usize - 1, g.j() as usize - 1, g.k());
        self.t += 1;
        let slot = &mut self.first_draw_times[first_draw as usize - 1];
        if slot.is_none() {
            *slot = Some(self.t);
            self.uncollected -= 1;
            if self.uncollected == 0 {
                self.sst = Some(self.t);
            }
        }
        g
    }

    pub fn element(&self) -> &GroupElement {
        &self.element
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `T`, once every position has been a first draw.
    pub fn sst(&self) -> Option<usize> {
        self.sst
    }

    /// `T_j` for a 1-based position, if it has happened.
    pub fn first_draw_time(&self, j: u32) -> Option<usize> {
        self.first_draw_times.get(j as usize - 1).copied().flatten()
    }

    /// Positions (1-based) not yet seen as a first draw.
    pub fn uncollected(&self) -> Vec<u32> {
        self.first_draw_times
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_none())
            .map(|(p, _)| p as u32 + 1)
            .collect()
    }
}

pub fn simulate_chain<R: Rng + ?Sized>(params: GroupParams, t: usize, rng: &mut R) -> ChainState {
    let dist = ost_generators(params);
    let mut state = ChainState::new(params);
    for _ in 0..t {
        state.step(&dist, rng);
    }
    state
}

/// Like [`simulate_chain`], also returning the generators drawn.
pub fn trace_chain<R: Rng + ?Sized>(params: GroupParams, t: usize, rng: &mut R) -> (ChainState, Vec<Generator>) {
    let dist = ost_generators(params);
    let mut state = ChainState::new(params);
    let moves = (0..t).map(|_| state.step(&dist, rng)).collect();
    (state, moves)
}

/// Outcome of one simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub master_seed: u64,
    pub trial: u64,
    pub element: GroupElement,
    pub sst: Option<usize>,
}

pub fn run_trial(params: GroupParams, t: usize, master_seed: u64, trial: u64) -> TrialRecord {
    let state = simulate_chain(params, t, &mut trial_rng(master_seed, trial));
    TrialRecord {
        master_seed,
        trial,
        sst: state.sst(),
        element: state.element,
    }
}

/// Frequencies of `X^t` over `trials` independent chains.
pub fn empirical_law(params: GroupParams, t: usize, trials: u64, master_seed: u64) -> Result<DenseDistribution> {
    let order = params.exact_order(DEFAULT_EXACT_CAP)?;
    check_trials(trials)?;
    let dist = ost_generators(params);
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; order],
            |mut counts, trial| {
                let mut rng = trial_rng(master_seed, trial);
                let mut state = ChainState::new(params);
                for _ in 0..t {
                    state.step(&dist, &mut rng);
                }
                counts[state.element.rank().expect("under cap").get()] += 1;
                counts
            },
        )
        .reduce(|| vec![0u64; order], add_counts);
    let mass = counts.into_iter().map(|c| c as f64 / trials as f64).collect();
    DenseDistribution::from_masses(params, mass)
}

/// A strong stationary time draw, or the fact that it exceeded the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SstSample {
    Hit(usize),
    Censored,
}

impl SstSample {
    /// Whether `T > t`. Censored draws count as exceeding any `t` below the cap.
    pub fn exceeds(self, t: usize) -> bool {
        match self {
            SstSample::Hit(value) => value > t,
            SstSample::Censored => true,
        }
    }
}

/// Samples `T` from the first draws alone, without building the chain.
pub fn sample_sst<R: Rng + ?Sized>(params: GroupParams, rng: &mut R, t_cap: usize) -> Result<SstSample> {
    if t_cap == 0 {
        return Err(Error::InvalidArgument("t_cap must be at least 1".into()));
    }
    let n = params.n();
    let mut seen = vec![false; n as usize];
    let mut missing = n;
    for t in 1..=t_cap {
        let j = rng.random_range(1..=n) as usize - 1;
        if !seen[j] {
            seen[j] = true;
            missing -= 1;
            if missing == 0 {
                return Ok(SstSample::Hit(t));
            }
        }
    }
    Ok(SstSample::Censored)
}

/// Monte Carlo estimate of `P(T > t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: usize,
    pub trials: u64,
    pub exceed_count: u64,
    pub p_hat: f64,
    pub stderr: f64,
}

impl TailEstimate {
    pub fn new(t: usize, trials: u64, exceed_count: u64) -> Self {
        assert!(exceed_count <= trials && trials > 0);
        let p_hat = exceed_count as f64 / trials as f64;
        Self {
            t,
            trials,
            exceed_count,
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        }
    }
}

/// `⌈n ln n + c n⌉`, floored at 1.
pub fn coupon_threshold(n: u32, c: f64) -> usize {
    let n = n as f64;
    (n * n.ln() + c * n).ceil().max(1.0) as usize
}

/// Samples `T` once per trial (capped at `t_cap`) and counts `T > t` for each `t`.
fn tail_counts(params: GroupParams, ts: &[usize], t_cap: usize, trials: u64, master_seed: u64) -> Result<Vec<u64>> {
    check_trials(trials)?;
    let t_cap = t_cap.max(1);
    let zeros = || vec![0u64; ts.len()];
    Ok((0..trials)
        .into_par_iter()
        .fold(zeros, |mut counts, trial| {
            let sample = sample_sst(params, &mut trial_rng(master_seed, trial), t_cap).expect("t_cap >= 1");
            for (count, &t) in counts.iter_mut().zip(ts) {
                *count += sample.exceeds(t) as u64;
            }
            counts
        })
        .reduce(zeros, add_counts))
}

/// `P(T > t)` for each `t`, sharing one SST draw per trial.
pub fn tail_probabilities(params: GroupParams, ts: &[usize], trials: u64, master_seed: u64) -> Result<Vec<TailEstimate>> {
    let cap = ts.iter().copied().max().unwrap_or(0) + 1;
    let counts = tail_counts(params, ts, cap, trials, master_seed)?;
    Ok(ts
        .iter()
        .zip(counts)
        .map(|(&t, exceed)| TailEstimate::new(t, trials, exceed))
        .collect())
}

/// One row of the coupon-collector tail check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SstTailRow {
    pub n: u32,
    pub c: f64,
    pub estimate: TailEstimate,
    /// `e^{-c}`
    pub bound: f64,
}

impl SstTailRow {
    pub const CSV_HEADER: &'static str = "n,c,t,trials,exceed,p_hat,stderr,bound_e_minus_c";

    /// Whether `p_hat > e^{-c} + z * stderr`.
    pub fn violates(&self, z: f64) -> bool {
        self.estimate.p_hat > self.bound + z * self.estimate.stderr
    }

    pub fn to_csv_line(&self) -> String {
        let e = &self.estimate;
        format!(
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e}",
            self.n, self.c, e.t, e.trials, e.exceed_count, e.p_hat, e.stderr, self.bound
        )
    }
}

/// Estimates `P(T > ⌈n ln n + c n⌉)`.
pub fn sst_tail(params: GroupParams, c: f64, trials: u64, master_seed: u64) -> Result<SstTailRow> {
    Ok(sst_tail_grid(params, &[c], trials, master_seed)?.remove(0))
}

/// [`sst_tail`] for several offsets, sharing one SST draw per trial.
pub fn sst_tail_grid(params: GroupParams, cs: &[f64], trials: u64, master_seed: u64) -> Result<Vec<SstTailRow>> {
    if let Some(c) = cs.iter().find(|c| !c.is_finite() || **c <= 0.0) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    let n = params.n();
    let thresholds: Vec<usize> = cs.iter().map(|&c| coupon_threshold(n, c)).collect();
    let estimates = tail_probabilities(params, &thresholds, trials, master_seed)?;
    Ok(cs
        .iter()
        .zip(estimates)
        .map(|(&c, estimate)| SstTailRow {
            n,
            c,
            estimate,
            bound: (-c).exp(),
        })
        .collect())
}

/// Exact separation distance next to the Monte Carlo tail of `T` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SepBoundRow {
    pub t: usize,
    pub exact_sep: f64,
    pub tail: TailEstimate,
}

impl SepBoundRow {
    /// Whether `sep(t) <= P(T > t) + z * stderr`.
    /// `exact_sep` carries summation roundoff, so a vanishing separation is
    /// compared with a small absolute slack.
    pub fn holds(&self, z: f64) -> bool {
        self.exact_sep <= self.tail.p_hat + z * self.tail.stderr + SEP_ROUNDOFF
    }
}

/// Absolute slack for roundoff in an exact separation distance.
pub const SEP_ROUNDOFF: f64 = 1e-12;

pub fn sep_upper_bound_check(
    params: GroupParams,
    ts: &[usize],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<SepBoundRow>> {
    let engine = ExactEngine::new(params)?;
    let t_max = ts.iter().copied().max().unwrap_or(0);
    let mut seps = vec![0.0; t_max + 1];
    engine.walk(t_max, |t, p| seps[t] = crate::exact::sep_distance(p));
    let tails = tail_probabilities(params, ts, trials, master_seed)?;
    Ok(ts
        .iter()
        .zip(tails)
        .map(|(&t, tail)| SepBoundRow {
            t,
            exact_sep: seps[t],
            tail,
        })
        .collect())
}

/// Reads the deck off the inverse chain `Y = X⁻¹`: entry `p` is the card
/// (label, orientation) lying at position `p + 1`.
///
/// `Y` maps card `c` to position `σ_Y(c)` with offset `k_c`; the card lying
/// un-rotated at that position is `ξ^{-k_c} c`.
pub fn cards_by_position(inverse_chain: &GroupElement) -> Vec<(u32, u32)> {
    let m = inverse_chain.params().m();
    let mut deck = vec![(0, 0); inverse_chain.perm_raw().len()];
    for (card, (&pos, &k)) in inverse_chain
        .perm_raw()
        .iter()
        .zip(inverse_chain.colors())
        .enumerate()
    {
        deck[pos as usize] = (card as u32 + 1, (m - k) % m);
    }
    deck
}

/// Conditional frequencies of the card at position `j` given the cards above it.
#[derive(Debug, Clone, PartialEq)]
pub struct PjGroup {
    /// Cards at positions `j+1..=n`.
    pub context: Vec<(u32, u32)>,
    pub samples: u64,
    /// The `m j` cards that may sit at position `j`, with their counts.
    pub outcomes: Vec<((u32, u32), u64)>,
    pub max_deviation: f64,
    /// Binomial standard error of one outcome frequency at `p = 1/(mj)`.
    pub stderr: f64,
    pub undersampled: bool,
}

impl PjGroup {
    pub fn within(&self, z: f64) -> bool {
        self.max_deviation <= z * self.stderr + 1e-15
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PjReport {
    pub j: u32,
    pub t: usize,
    pub trials: u64,
    /// Trials with `T_j <= t`.
    pub conditioned: u64,
    pub groups: Vec<PjGroup>,
    pub max_deviation: f64,
}

impl PjReport {
    pub fn within(&self, z: f64) -> bool {
        self.groups.iter().all(|g| g.within(z))
    }

    pub fn undersampled(&self) -> impl Iterator<Item = &PjGroup> {
        self.groups.iter().filter(|g| g.undersampled)
    }
}

/// Checks that once `T_j <= t`, the card at position `j` is uniform over the
/// `m j` signed cards not already placed above `j`.
///
/// Trials are grouped by the exact cards at positions `j+1..=n`, and within
/// each group the frequencies of the card at `j` are compared with `1/(mj)`.
pub fn empirical_pj_check(
    params: GroupParams,
    j: u32,
    t: usize,
    trials: u64,
    master_seed: u64,
) -> Result<PjReport> {
    let (m, n) = (params.m(), params.n());
    if j == 0 || j > n {
        return Err(Error::PositionOutOfRange { position: j, n });
    }
    check_trials(trials)?;
    let dist = ost_generators(params);
    let slots = (m * n) as usize;
    type Groups = BTreeMap<Vec<(u32, u32)>, Vec<u64>>;

    let merged: Groups = (0..trials)
        .into_par_iter()
        .fold(Groups::new, |mut groups, trial| {
            let mut rng = trial_rng(master_seed, trial);
            let mut state = ChainState::new(params);
            for _ in 0..t {
                state.step(&dist, &mut rng);
            }
            if state.first_draw_time(j).is_some() {
                let deck = cards_by_position(&state.element.inverse());
                let (card, orientation) = deck[j as usize - 1];
                let counts = groups
                    .entry(deck[j as usize..].to_vec())
                    .or_insert_with(|| vec![0; slots]);
                counts[((card - 1) * m + orientation) as usize] += 1;
            }
            groups
        })
        .reduce(Groups::new, |mut a, b| {
            for (key, counts) in b {
                let slot = a.entry(key).or_insert_with(|| vec![0; slots]);
                add_counts_into(slot, &counts);
            }
            a
        });

    if merged.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no trial reached T_{j} <= {t}; increase t or trials"
        )));
    }

    let p = 1.0 / (m * j) as f64;
    let groups: Vec<PjGroup> = merged
        .into_iter()
        .map(|(context, counts)| {
            let samples: u64 = counts.iter().sum();
            let outcomes: Vec<((u32, u32), u64)> = (1..=n)
                .filter(|c| context.iter().all(|&(above, _)| above != *c))
                .flat_map(|c| (0..m).map(move |o| (c, o)))
                .map(|(c, o)| ((c, o), counts[((c - 1) * m + o) as usize]))
                .collect();
            debug_assert_eq!(outcomes.len(), (m * j) as usize);
            let max_deviation = outcomes
                .iter()
                .map(|&(_, k)| (k as f64 / samples as f64 - p).abs())
                .fold(0.0, f64::max);
            PjGroup {
                stderr: (p * (1.0 - p) / samples as f64).sqrt(),
                undersampled: samples < MIN_SAMPLES_PER_OUTCOME * (m * j) as u64,
                context,
                samples,
                outcomes,
                max_deviation,
            }
        })
        .collect();

    Ok(PjReport {
        j,
        t,
        trials,
        conditioned: groups.iter().map(|g| g.samples).sum(),
        max_deviation: groups.iter().map(|g| g.max_deviation).fold(0.0, f64::max),
        groups,
    })
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    add_counts_into(&mut a, &b);
    a
}

fn add_counts_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

//! Exact simulation of Kendall random walks and Monte Carlo estimators.
//!
//! Paths are driven by a counter-based generator: every path owns a stream
//! keyed by `(seed, path_index)` and consumes an ordered sequence of uniform
//! variates from it. A path is therefore a pure function of its key, which
//! makes every estimate reproducible bit for bit regardless of how paths are
//! distributed over worker threads.

use crate::error::{KendallError, Result};
use crate::steps::{pareto_magnitude, Alpha, StepLaw};

const MIX_MUL_1: u64 = 0xbf58476d1ce4e5b9;
const MIX_MUL_2: u64 = 0x94d049bb133111eb;
const GOLDEN_GAMMA: u64 = 0x9e3779b97f4a7c15;
const PATH_SALT: u64 = 0x632be59bd9b4e019;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(MIX_MUL_1);
    z ^= z >> 27;
    z = z.wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

/// Counter-based uniform generator. Word `k` of stream `key` is
/// `mix64(key + k * gamma)`, so any draw is addressable without sequencing
/// through its predecessors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    key: u64,
    counter: u64,
}

impl RngState {
    /// Stream for free-standing sampling with the given seed.
    pub fn new(seed: u64) -> Self {
        RngState { key: mix64(seed.wrapping_add(GOLDEN_GAMMA)), counter: 0 }
    }

    /// Independent stream for one simulated path.
    pub fn for_path(seed: u64, path_index: u64) -> Self {
        let key = mix64(mix64(seed.wrapping_add(GOLDEN_GAMMA)) ^ mix64(path_index ^ PATH_SALT));
        RngState { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let word = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)));
        self.counter += 1;
        word
    }

    /// Uniform variate on `(0, 1]` with 53-bit resolution. The closed right
    /// end point keeps logarithms and negative powers finite.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }
}

/// One literal transition of the walk: from state `x` with step `y`,
/// branch variate `xi` in `(0, 1]` and Pareto multiplier `theta`, the next
/// state is
/// `max(|x|, |y|) * r * (theta if xi < rho else 1)` where
/// `rho = (min(|x|, |y|) / max(|x|, |y|))^alpha` and `r` is the sign of
/// whichever of `x, y` attains the maximum modulus (`tie_sign` breaks an
/// exact modulus tie between values of opposite sign). `xi = rho` takes the
/// non-Pareto branch; both states zero return zero.
pub fn walk_step(x: f64, y: f64, xi: f64, theta: f64, alpha: Alpha, tie_sign: f64) -> f64 {
    let ax = x.abs();
    let ay = y.abs();
    let big = ax.max(ay);
    if big == 0.0 {
        return 0.0;
    }
    let small = ax.min(ay);
    let rho = (small / big).powf(alpha.get());
    let r = if ax > ay {
        x.signum()
    } else if ay > ax {
        y.signum()
    } else if x.signum() == y.signum() {
        x.signum()
    } else {
        tie_sign.signum()
    };
    if xi < rho {
        big * r * theta
    } else {
        big * r
    }
}

/// Configuration of one simulated path.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub law: StepLaw,
    pub n_steps: u32,
    pub seed: u64,
    pub path_index: u64,
}

/// A realized trajectory `X_0, ..., X_n` together with the stream key that
/// reproduces it.
#[derive(Debug, Clone)]
pub struct WalkPath {
    values: Vec<f64>,
    pub seed: u64,
    pub path_index: u64,
}

impl WalkPath {
    /// States `X_0, ..., X_n` (so `len() == n_steps + 1`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Advances the chain one step using the transition kernel: given the
/// current modulus and a fresh step magnitude, the next state is the larger
/// modulus times an independent symmetric factor which is a Pareto variable
/// with probability `rho = (small / big)^alpha` and `+-1` otherwise.
///
/// Uniform variates consumed per step, in order: the step magnitude draw(s)
/// of the law, the branch variate, the Pareto magnitude (only when the
/// Pareto branch is taken), and the output sign.
#[inline]
fn kernel_step(law: &StepLaw, x_abs: f64, rng: &mut RngState) -> f64 {
    let y_abs = law.sample_magnitude(rng);
    let big = x_abs.max(y_abs);
    let small = x_abs.min(y_abs);
    let alpha = law.alpha().get();
    let rho = if big > 0.0 { (small / big).powf(alpha) } else { 0.0 };
    let xi = rng.next_uniform();
    let magnitude = if xi < rho { big * pareto_magnitude(alpha, rng.next_uniform()) } else { big };
    debug_assert!(magnitude >= big, "the next modulus can never fall below max(|x|, |y|)");
    let sign_u = rng.next_uniform();
    if sign_u <= 0.5 {
        -magnitude
    } else {
        magnitude
    }
}

/// Simulates the walk started at `X_0 = 0` for `n_steps` transitions.
pub fn simulate_path(config: &WalkConfig) -> WalkPath {
    let mut rng = RngState::for_path(config.seed, config.path_index);
    let mut values = Vec::with_capacity(config.n_steps as usize + 1);
    values.push(0.0);
    let mut x_abs = 0.0;
    for _ in 0..config.n_steps {
        let x = kernel_step(&config.law, x_abs, &mut rng);
        x_abs = x.abs();
        values.push(x);
    }
    WalkPath { values, seed: config.seed, path_index: config.path_index }
}

/// First epoch `n >= 1` with `X_n > a` within the path, and the value of the
/// walk there. Returns `None` when the path never exceeds `a`.
pub fn first_passage_above(path: &WalkPath, a: f64) -> Option<(u32, f64)> {
    for (k, &x) in path.values.iter().enumerate().skip(1) {
        if x > a {
            return Some((k as u32, x));
        }
    }
    None
}

/// Tail mass the first passage is allowed to keep beyond the horizon when a
/// ladder height law is estimated; larger tails make the estimate biased and
/// are rejected up front.
const HEIGHT_TAIL_BOUND: f64 = 1e-4;

/// Largest horizon [`default_horizon`] proposes for ladder height laws.
const MAX_DEFAULT_HORIZON: u32 = 4096;

/// A path functional estimated by Monte Carlo. Each statistic is the
/// probability of an event of the walk within a finite horizon.
///
/// Crossing conventions match the analytic laws: the ascending ladder epoch
/// crosses strictly (`X > a`), height targets are weak (`X_tau <= t`), the
/// running maximum is weak (`max <= t`) and the running minimum is strict
/// (`min < t`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimStatistic {
    /// `P(tau_a = n)` for the first epoch with `X > a`, `a >= 0`.
    TauPmf { a: f64, n: u32 },
    /// `P(tau = n)` for the first epoch with `X <= a`, `a > 0`.
    TauWeakDescPmf { a: f64, n: u32 },
    /// `P(tau = n)` for the first epoch with `X < a`, `a > 0`.
    TauStrictDescPmf { a: f64, n: u32 },
    /// `P(tau = n)` for the first epoch with `X >= a`, `a > 0`.
    TauWeakAscPmf { a: f64, n: u32 },
    /// `P(X_{tau_a} <= t)`, the ladder height law over `a >= 0`. Paths whose
    /// first passage escapes the horizon count as misses, which is why the
    /// horizon must keep their probability below `1e-4`.
    LadderHeightCdf { a: f64, t: f64 },
    /// `P(tau_a = n, X_{tau_a} <= t)` for `t >= a`.
    JointLadder { a: f64, n: u32, t: f64 },
    /// `P(max(X_0, ..., X_n) <= t)` for `t > 0`.
    MaxCdf { n: u32, t: f64 },
    /// `P(min(X_0, ..., X_n) < t)` for `t < 0`.
    MinCdf { n: u32, t: f64 },
}

/// A Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub point: f64,
    pub std_error: f64,
    pub n_paths: u64,
}

/// The four first-crossing events a statistic can reduce to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    /// First epoch with `X > level`.
    Above,
    /// First epoch with `X >= level`.
    WeakAbove,
    /// First epoch with `X <= level`.
    WeakBelow,
    /// First epoch with `X < level`.
    StrictBelow,
}

fn stat_event(stat: &SimStatistic) -> (EventKind, f64) {
    match *stat {
        SimStatistic::TauPmf { a, .. } => (EventKind::Above, a),
        SimStatistic::TauWeakDescPmf { a, .. } => (EventKind::WeakBelow, a),
        SimStatistic::TauStrictDescPmf { a, .. } => (EventKind::StrictBelow, a),
        SimStatistic::TauWeakAscPmf { a, .. } => (EventKind::WeakAbove, a),
        SimStatistic::LadderHeightCdf { a, .. } => (EventKind::Above, a),
        SimStatistic::JointLadder { a, .. } => (EventKind::Above, a),
        SimStatistic::MaxCdf { t, .. } => (EventKind::Above, t),
        SimStatistic::MinCdf { t, .. } => (EventKind::StrictBelow, t),
    }
}

/// Steps of simulation the statistic actually looks at.
fn needed_steps(stat: &SimStatistic, horizon: u32) -> u32 {
    match *stat {
        SimStatistic::TauPmf { n, .. }
        | SimStatistic::TauWeakDescPmf { n, .. }
        | SimStatistic::TauStrictDescPmf { n, .. }
        | SimStatistic::TauWeakAscPmf { n, .. }
        | SimStatistic::JointLadder { n, .. }
        | SimStatistic::MaxCdf { n, .. }
        | SimStatistic::MinCdf { n, .. } => n,
        SimStatistic::LadderHeightCdf { .. } => horizon,
    }
}

fn validate_stat(law: &StepLaw, stat: &SimStatistic, horizon: u32) -> Result<()> {
    let check_level = |a: f64, allow_zero: bool| -> Result<()> {
        if a.is_finite() && (a > 0.0 || (allow_zero && a == 0.0)) {
            Ok(())
        } else {
            Err(KendallError::InvalidParameter { name: "a", value: a })
        }
    };
    let check_epoch = |n: u32| -> Result<()> {
        if n == 0 {
            return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
        }
        if n > horizon {
            return Err(KendallError::InsufficientHorizon {
                horizon,
                why: format!("the statistic looks at epoch {n}"),
            });
        }
        Ok(())
    };
    match *stat {
        SimStatistic::TauPmf { a, n } => {
            check_level(a, true)?;
            check_epoch(n)
        }
        SimStatistic::TauWeakDescPmf { a, n }
        | SimStatistic::TauStrictDescPmf { a, n }
        | SimStatistic::TauWeakAscPmf { a, n } => {
            check_level(a, false)?;
            check_epoch(n)
        }
        SimStatistic::LadderHeightCdf { a, t } => {
            check_level(a, true)?;
            if t.is_nan() {
                return Err(KendallError::Domain("target point t is NaN".into()));
            }
            let tail = crate::fluctuations::ladder_epoch_tail(law, a, horizon)?;
            if tail >= HEIGHT_TAIL_BOUND {
                return Err(KendallError::InsufficientHorizon {
                    horizon,
                    why: format!(
                        "the first passage above a = {a} escapes the horizon with \
                         probability {tail:.3e}, which would bias the height estimate"
                    ),
                });
            }
            Ok(())
        }
        SimStatistic::JointLadder { a, n, t } => {
            check_level(a, true)?;
            check_epoch(n)?;
            if t.is_nan() || t < a {
                return Err(KendallError::Domain(format!(
                    "the ladder height lives above the level: need t >= a, got a = {a}, t = {t}"
                )));
            }
            Ok(())
        }
        SimStatistic::MaxCdf { n, t } => {
            if !(t.is_finite() && t > 0.0) {
                return Err(KendallError::Domain(format!(
                    "the running maximum starts at X_0 = 0, its CDF is defined for t > 0, got {t}"
                )));
            }
            if n > horizon {
                return Err(KendallError::InsufficientHorizon {
                    horizon,
                    why: format!("the statistic looks at epoch {n}"),
                });
            }
            Ok(())
        }
        SimStatistic::MinCdf { n, t } => {
            if !(t.is_finite() && t < 0.0) {
                return Err(KendallError::Domain(format!(
                    "the running minimum starts at X_0 = 0, its CDF is defined for t < 0, got {t}"
                )));
            }
            if n > horizon {
                return Err(KendallError::InsufficientHorizon {
                    horizon,
                    why: format!("the statistic looks at epoch {n}"),
                });
            }
            Ok(())
        }
    }
}

/// Smallest horizon [`estimate`] accepts for these statistics: the largest
/// epoch an epoch statistic looks at, and for ladder height laws the first
/// horizon whose escape probability drops below `1e-4` (capped at 4096).
pub fn default_horizon(law: &StepLaw, stats: &[SimStatistic]) -> Result<u32> {
    let mut needed = 1u32;
    for stat in stats {
        let req = match *stat {
            SimStatistic::LadderHeightCdf { a, .. } => {
                if !(a.is_finite() && a >= 0.0) {
                    return Err(KendallError::InvalidParameter { name: "a", value: a });
                }
                if crate::fluctuations::ladder_epoch_tail(law, a, MAX_DEFAULT_HORIZON)?
                    >= HEIGHT_TAIL_BOUND
                {
                    MAX_DEFAULT_HORIZON
                } else {
                    let mut lo = 1u32;
                    let mut hi = MAX_DEFAULT_HORIZON;
                    while lo < hi {
                        let mid = lo + (hi - lo) / 2;
                        if crate::fluctuations::ladder_epoch_tail(law, a, mid)?
                            < HEIGHT_TAIL_BOUND
                        {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    lo
                }
            }
            _ => needed_steps(stat, 1),
        };
        needed = needed.max(req);
    }
    Ok(needed)
}

/// Sorted first-crossing levels, grouped by crossing kind. Upward crossings
/// are kept ascending and downward crossings descending, so that within one
/// step the levels a state crosses form a prefix of the list and each list
/// needs only a single advancing cursor per path.
struct EventTable {
    above: Vec<f64>,
    weak_above: Vec<f64>,
    weak_below: Vec<f64>,
    strict_below: Vec<f64>,
}

impl EventTable {
    fn build(stats: &[SimStatistic]) -> (EventTable, Vec<(EventKind, usize)>) {
        let mut above = Vec::new();
        let mut weak_above = Vec::new();
        let mut weak_below = Vec::new();
        let mut strict_below = Vec::new();
        for stat in stats {
            let (kind, level) = stat_event(stat);
            // Normalizes -0.0 to 0.0 so equal levels dedup.
            let level = level + 0.0;
            match kind {
                EventKind::Above => above.push(level),
                EventKind::WeakAbove => weak_above.push(level),
                EventKind::WeakBelow => weak_below.push(level),
                EventKind::StrictBelow => strict_below.push(level),
            }
        }
        let ascending = |v: &mut Vec<f64>| {
            v.sort_by(|p, q| p.partial_cmp(q).expect("levels are validated finite"));
            v.dedup();
        };
        let descending = |v: &mut Vec<f64>| {
            v.sort_by(|p, q| q.partial_cmp(p).expect("levels are validated finite"));
            v.dedup();
        };
        ascending(&mut above);
        ascending(&mut weak_above);
        descending(&mut weak_below);
        descending(&mut strict_below);
        let table = EventTable { above, weak_above, weak_below, strict_below };
        let mappings = stats
            .iter()
            .map(|stat| {
                let (kind, level) = stat_event(stat);
                let level = level + 0.0;
                let idx = match kind {
                    EventKind::Above => table
                        .above
                        .binary_search_by(|p| p.partial_cmp(&level).unwrap()),
                    EventKind::WeakAbove => table
                        .weak_above
                        .binary_search_by(|p| p.partial_cmp(&level).unwrap()),
                    EventKind::WeakBelow => table
                        .weak_below
                        .binary_search_by(|p| level.partial_cmp(p).unwrap()),
                    EventKind::StrictBelow => table
                        .strict_below
                        .binary_search_by(|p| level.partial_cmp(p).unwrap()),
                }
                .expect("every level was inserted into its table");
                (kind, idx)
            })
            .collect();
        (table, mappings)
    }
}

/// Per-path record of the first crossing epoch and the state value there,
/// one slot per event, reused across the paths a worker processes.
struct CrossingRecords {
    above: Vec<Option<(u32, f64)>>,
    weak_above: Vec<Option<(u32, f64)>>,
    weak_below: Vec<Option<(u32, f64)>>,
    strict_below: Vec<Option<(u32, f64)>>,
}

impl CrossingRecords {
    fn new(table: &EventTable) -> Self {
        CrossingRecords {
            above: vec![None; table.above.len()],
            weak_above: vec![None; table.weak_above.len()],
            weak_below: vec![None; table.weak_below.len()],
            strict_below: vec![None; table.strict_below.len()],
        }
    }

    fn get(&self, kind: EventKind, idx: usize) -> Option<(u32, f64)> {
        match kind {
            EventKind::Above => self.above[idx],
            EventKind::WeakAbove => self.weak_above[idx],
            EventKind::WeakBelow => self.weak_below[idx],
            EventKind::StrictBelow => self.strict_below[idx],
        }
    }
}

/// Simulates one path and fills the first-crossing records. Stops as soon
/// as every event has crossed or the horizon is reached.
fn run_path(
    law: &StepLaw,
    seed: u64,
    path_index: u64,
    h_max: u32,
    table: &EventTable,
    rec: &mut CrossingRecords,
) {
    rec.above.fill(None);
    rec.weak_above.fill(None);
    rec.weak_below.fill(None);
    rec.strict_below.fill(None);
    let mut rng = RngState::for_path(seed, path_index);
    let mut x_abs = 0.0f64;
    let mut p_above = 0;
    let mut p_weak_above = 0;
    let mut p_weak_below = 0;
    let mut p_strict_below = 0;
    for k in 1..=h_max {
        let x = kernel_step(law, x_abs, &mut rng);
        x_abs = x.abs();
        while p_above < table.above.len() && x > table.above[p_above] {
            rec.above[p_above] = Some((k, x));
            p_above += 1;
        }
        while p_weak_above < table.weak_above.len() && x >= table.weak_above[p_weak_above] {
            rec.weak_above[p_weak_above] = Some((k, x));
            p_weak_above += 1;
        }
        while p_weak_below < table.weak_below.len() && x <= table.weak_below[p_weak_below] {
            rec.weak_below[p_weak_below] = Some((k, x));
            p_weak_below += 1;
        }
        while p_strict_below < table.strict_below.len() && x < table.strict_below[p_strict_below] {
            rec.strict_below[p_strict_below] = Some((k, x));
            p_strict_below += 1;
        }
        if p_above == table.above.len()
            && p_weak_above == table.weak_above.len()
            && p_weak_below == table.weak_below.len()
            && p_strict_below == table.strict_below.len()
        {
            break;
        }
    }
}

fn indicator(stat: &SimStatistic, mapping: (EventKind, usize), rec: &CrossingRecords) -> bool {
    let crossing = rec.get(mapping.0, mapping.1);
    match *stat {
        SimStatistic::TauPmf { n, .. }
        | SimStatistic::TauWeakDescPmf { n, .. }
        | SimStatistic::TauStrictDescPmf { n, .. }
        | SimStatistic::TauWeakAscPmf { n, .. } => {
            matches!(crossing, Some((k, _)) if k == n)
        }
        SimStatistic::JointLadder { n, t, .. } => {
            matches!(crossing, Some((k, v)) if k == n && v <= t)
        }
        SimStatistic::LadderHeightCdf { t, .. } => matches!(crossing, Some((_, v)) if v <= t),
        SimStatistic::MaxCdf { n, .. } => !matches!(crossing, Some((k, _)) if k <= n),
        SimStatistic::MinCdf { n, .. } => matches!(crossing, Some((k, _)) if k <= n),
    }
}

/// Estimates a family of statistics over one shared set of simulated paths.
///
/// Paths are distributed over the rayon thread pool; because each path owns
/// a counter-based stream and the per-statistic hit counts are exact
/// integers, the result is identical bit for bit whatever the pool size.
/// The horizon must cover every statistic (see [`default_horizon`]).
pub fn estimate_grid(
    law: &StepLaw,
    stats: &[SimStatistic],
    n_paths: u64,
    horizon: u32,
    seed: u64,
) -> Result<Vec<EstimateWithCI>> {
    use rayon::prelude::*;

    if stats.is_empty() {
        return Ok(Vec::new());
    }
    if n_paths == 0 {
        return Err(KendallError::InvalidParameter { name: "n_paths", value: 0.0 });
    }
    if horizon == 0 {
        return Err(KendallError::InvalidParameter { name: "horizon", value: 0.0 });
    }
    for stat in stats {
        validate_stat(law, stat, horizon)?;
    }
    let (table, mappings) = EventTable::build(stats);
    let h_max = stats.iter().map(|s| needed_steps(s, horizon)).max().unwrap_or(1).max(1);
    let counts = (0..n_paths)
        .into_par_iter()
        .fold(
            || (vec![0u64; stats.len()], CrossingRecords::new(&table)),
            |(mut counts, mut rec), path_index| {
                run_path(law, seed, path_index, h_max, &table, &mut rec);
                for ((stat, mapping), count) in
                    stats.iter().zip(mappings.iter()).zip(counts.iter_mut())
                {
                    if indicator(stat, *mapping, &rec) {
                        *count += 1;
                    }
                }
                (counts, rec)
            },
        )
        .map(|(counts, _)| counts)
        .reduce(
            || vec![0u64; stats.len()],
            |mut left, right| {
                for (l, r) in left.iter_mut().zip(right) {
                    *l += r;
                }
                left
            },
        );
    let n = n_paths as f64;
    Ok(counts
        .into_iter()
        .map(|hits| {
            let point = hits as f64 / n;
            EstimateWithCI { point, std_error: (point * (1.0 - point) / n).sqrt(), n_paths }
        })
        .collect())
}

/// Estimates a single statistic; see [`estimate_grid`].
pub fn estimate(
    law: &StepLaw,
    stat: SimStatistic,
    n_paths: u64,
    horizon: u32,
    seed: u64,
) -> Result<EstimateWithCI> {
    Ok(estimate_grid(law, &[stat], n_paths, horizon, seed)?
        .pop()
        .expect("one statistic in, one estimate out"))
}

//! Fluctuation laws of the Kendall random walk: first ladder epochs over a
//! level, the joint and marginal laws of the first ladder height, and the
//! distributions of the running maximum and minimum.
//!
//! Every distribution is available through two independent routes, an
//! explicit closed form and the defining kernel recurrence, so each can
//! check the other. Closed forms switch to the recurrence near their
//! removable singularities and report that through
//! [`Evaluated::fell_back`].

use crate::algebra::{
    self, Evaluated, IterIntegralCoeffs, LevelContext, Mode, DEGENERATE_EPS, GT_MIN,
};
use crate::error::{KendallError, Result};
use crate::steps::StepLaw;

/// Closed-form coefficients of the first ladder epoch over a level `a > 0`:
/// `P(tau_a = n) = a_coef 2^{-n} + b_coef n (1-G(a))^2 G(a)^{n-1}
///               + c_coef G(a)^{n-1} (1 - G(a))`.
/// The three coefficients sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCoefficients {
    pub a_coef: f64,
    pub b_coef: f64,
    pub c_coef: f64,
}

/// State of the kernel recursion behind the running-minimum law; `j` steps
/// in, the triple represents the mass the walk keeps strictly above the
/// (negative) target level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinRecursionState {
    pub a_j: f64,
    pub b_j: f64,
    pub c_j: f64,
    g: f64,
    h: f64,
}

/// A bundled fluctuation query: level, epoch and target point for one of
/// the laws in this module.
#[derive(Debug, Clone)]
pub struct FluctuationQuery {
    pub law: StepLaw,
    pub a: f64,
    pub n: u32,
    pub t: f64,
}

impl FluctuationQuery {
    pub fn new(law: StepLaw, a: f64, n: u32, t: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(KendallError::InvalidParameter { name: "a", value: a });
        }
        if n == 0 {
            return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
        }
        if t.is_nan() {
            return Err(KendallError::Domain("query point t is NaN".into()));
        }
        Ok(FluctuationQuery { law, a, n, t })
    }
}

fn check_level(a: f64, allow_zero: bool) -> Result<()> {
    let ok = a.is_finite() && (a > 0.0 || (allow_zero && a == 0.0));
    if ok {
        Ok(())
    } else {
        Err(KendallError::InvalidParameter { name: "a", value: a })
    }
}

fn level_g_h(law: &StepLaw, a: f64) -> (f64, f64) {
    if a > 0.0 {
        (law.g_unchecked(a), law.h_unchecked(a))
    } else {
        (0.0, 0.0)
    }
}

/// Closed-form ladder-epoch coefficients at level `a > 0`. Signals the
/// removable singularity `|2 G(a) - 1| < 1e-9` and the boundary
/// `G(a) ~ 1` where the coefficients are unbounded.
pub fn ladder_epoch_coeffs(law: &StepLaw, a: f64) -> Result<LadderCoefficients> {
    check_level(a, false)?;
    let (g, h) = level_g_h(law, a);
    let d = 2.0 * g - 1.0;
    if d.abs() < DEGENERATE_EPS {
        return Err(KendallError::Degenerate(format!(
            "2 G(a) = 1 at a = {a}; the epoch coefficients have a pole here"
        )));
    }
    if 1.0 - g < DEGENERATE_EPS {
        return Err(KendallError::Degenerate(format!(
            "G(a) = 1 at a = {a}; the epoch coefficients are unbounded here"
        )));
    }
    Ok(LadderCoefficients {
        a_coef: 1.0 + h / (d * d) - g / d,
        b_coef: h / (d * (1.0 - g)),
        c_coef: g / d - h * g / (d * d * (1.0 - g)),
    })
}

/// One step of the epoch recursion. The state `(A, B, C)` carries the
/// coefficients of `2^{-j}`, `H(a)` and `G(a)` in the iterated kernel
/// integral; the probability `P(tau_a = n)` is assembled from the state at
/// `j = n` started from `(1/2, -1/2, -1/2)`.
#[inline]
fn epoch_state_advance(state: (f64, f64, f64), g: f64) -> (f64, f64, f64) {
    let (a, b, c) = state;
    let half = 0.5 * a;
    (half, half + g * (b + c), half + g * c)
}

fn epoch_pmf_recurrence(g: f64, h: f64, n: u32) -> f64 {
    let mut state = (0.5, -0.5, -0.5);
    for _ in 1..n {
        state = epoch_state_advance(state, g);
    }
    state.0 + h * state.1 + g * state.2
}

fn epoch_pmf_closed(g: f64, h: f64, n: u32) -> Option<f64> {
    let d = 2.0 * g - 1.0;
    if d.abs() < DEGENERATE_EPS {
        return None;
    }
    // Folded form of the coefficient expansion; it stays finite as
    // G(a) -> 1 even though b_coef and c_coef individually do not.
    let a_coef = 1.0 + h / (d * d) - g / d;
    let nf = n as f64;
    let bracket = nf * h * (1.0 - g) / d + (1.0 - g) * g / d - h * g / (d * d);
    Some(a_coef * 0.5f64.powi(n as i32) + g.powi(n as i32 - 1) * bracket)
}

/// `P(tau_a = n)` for the first epoch at which the walk strictly exceeds
/// `a >= 0`. At `a = 0` the law is exactly geometric, `2^{-n}`, whatever
/// the step law. Closed mode falls back to the recurrence (and flags it)
/// on the removable singularity `2 G(a) = 1`.
pub fn ladder_epoch_pmf(law: &StepLaw, a: f64, n: u32, mode: Mode) -> Result<Evaluated> {
    check_level(a, true)?;
    if n == 0 {
        return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
    }
    let (g, h) = level_g_h(law, a);
    match mode {
        Mode::Recurrence => Ok(Evaluated { value: epoch_pmf_recurrence(g, h, n), fell_back: false }),
        Mode::Closed => {
            if a == 0.0 {
                return Ok(Evaluated { value: 0.5f64.powi(n as i32), fell_back: false });
            }
            match epoch_pmf_closed(g, h, n) {
                Some(value) => Ok(Evaluated { value, fell_back: false }),
                None => Ok(Evaluated { value: epoch_pmf_recurrence(g, h, n), fell_back: true }),
            }
        }
    }
}

/// `P(tau_a > n)`, the survival function of the first ladder epoch over
/// `a >= 0`. Uses the closed form away from `2 G(a) = 1` and otherwise
/// accumulates the recurrence.
pub fn ladder_epoch_tail(law: &StepLaw, a: f64, n: u32) -> Result<f64> {
    check_level(a, true)?;
    if n == 0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok(0.5f64.powi(n as i32));
    }
    let (g, h) = level_g_h(law, a);
    Ok(epoch_tail_from_values(g, h, n))
}

fn epoch_tail_from_values(g: f64, h: f64, n: u32) -> f64 {
    let d = 2.0 * g - 1.0;
    if d.abs() >= DEGENERATE_EPS {
        let a_coef = 1.0 + h / (d * d) - g / d;
        let nf = n as f64;
        // B n g^n (1-g) + (B+C) g^n folded so no (1-g) division is needed.
        let bracket = nf * h / d + g / d - h / (d * d);
        (a_coef * 0.5f64.powi(n as i32) + g.powi(n as i32) * bracket).clamp(0.0, 1.0)
    } else {
        let mut state = (0.5, -0.5, -0.5);
        let mut tail = 1.0 - (state.0 + h * state.1 + g * state.2);
        for _ in 1..n {
            state = epoch_state_advance(state, g);
            tail -= state.0 + h * state.1 + g * state.2;
        }
        tail.clamp(0.0, 1.0)
    }
}

/// `P(tau_a^{weak-} = n)`: the first epoch at which the walk is at or below
/// `a > 0`. The step either lands there immediately (probability `F(a)`) or
/// the epoch is geometric afterwards:
/// `P = F(a)` for `n = 1` and `(1 - F(a)) 2^{-(n-1)}` for `n >= 2`.
pub fn weak_desc_epoch_pmf(law: &StepLaw, a: f64, n: u32) -> Result<f64> {
    check_level(a, false)?;
    if n == 0 {
        return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
    }
    let f = law.cdf(a);
    if n == 1 {
        Ok(f)
    } else {
        Ok((1.0 - f) * 0.5f64.powi(n as i32 - 1))
    }
}

/// Joint law of the first ladder epoch and height over `a >= 0`:
/// `P(tau_a = n, X_{tau_a} <= t)` for `t >= a`. Closed mode assembles the
/// explicit forms of the iterated integrals; near the removable singularity
/// `G(t) = 2 G(a)` (or when `G(t)` vanishes) it substitutes the recurrence
/// and flags the result.
pub fn joint_ladder_cdf(law: &StepLaw, a: f64, n: u32, t: f64, mode: Mode) -> Result<Evaluated> {
    check_level(a, true)?;
    if n == 0 {
        return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
    }
    if t.is_nan() || t < a {
        return Err(KendallError::Domain(format!(
            "the ladder height lives above the level: need t >= a, got a = {a}, t = {t}"
        )));
    }
    if t == a {
        return Ok(Evaluated { value: 0.0, fell_back: false });
    }
    if t.is_infinite() {
        return ladder_epoch_pmf(law, a, n, mode);
    }
    if n == 1 {
        return Ok(Evaluated { value: law.cdf(t) - law.cdf(a), fell_back: false });
    }
    let ctx = LevelContext::new(law, a, t);
    match mode {
        Mode::Recurrence => {
            let (i, ii) = algebra::iterate_integrals(&ctx, n - 1);
            Ok(Evaluated { value: assemble_joint(&ctx, n, i, ii), fell_back: false })
        }
        Mode::Closed => {
            if a == 0.0 {
                // At level zero the joint law factorizes through the
                // convolution powers:
                // 2^{-n} G^{n-1} [2 n (F - 1/2) - (n-1) G] at the target.
                let f = law.cdf(t);
                let nf = n as f64;
                let value = 0.5f64.powi(n as i32)
                    * ctx.gt.powi(n as i32 - 1)
                    * (2.0 * nf * (f - 0.5) - (nf - 1.0) * ctx.gt);
                return Ok(Evaluated { value, fell_back: false });
            }
            if ctx.gt < GT_MIN || ctx.dd().abs() < DEGENERATE_EPS {
                let (i, ii) = algebra::iterate_integrals(&ctx, n - 1);
                return Ok(Evaluated { value: assemble_joint(&ctx, n, i, ii), fell_back: true });
            }
            let k = n - 1;
            let (i, ii) = if k == 1 {
                (ctx.i1(), ctx.ii1())
            } else {
                let i = algebra::closed_i(&ctx, k).value;
                match algebra::closed_ii(&ctx, k) {
                    Some(v) => (i, v.value),
                    None => {
                        let (ri, rii) = algebra::iterate_integrals(&ctx, k);
                        return Ok(Evaluated {
                            value: assemble_joint(&ctx, n, ri, rii),
                            fell_back: true,
                        });
                    }
                }
            };
            Ok(Evaluated { value: assemble_joint(&ctx, n, i, ii), fell_back: false })
        }
    }
}

/// `P(tau_a = n, X_tau <= t) = H(t)/2 I_{n-1} + G(t)/2 II_{n-1}
///  - H(a)/2 G(a)^{n-1} - G(a)/2 II_{n-1}(a, a)` for `n >= 2`.
fn assemble_joint(ctx: &LevelContext, n: u32, i_prev: f64, ii_prev: f64) -> f64 {
    let k = n - 1;
    0.5 * ctx.ht * i_prev + 0.5 * ctx.gt * ii_prev
        - 0.5 * ctx.h * ctx.diag_i(k)
        - 0.5 * ctx.g * ctx.diag_ii(k)
}

/// Marginal CDF of the first ladder height over `a >= 0`:
/// `P(X_{tau_a} <= t)`, summing the joint law over all epochs. Returns the
/// closed geometric sums when they exist; otherwise (near a removable
/// singularity) accumulates the recurrence series and flags the result.
/// Points `t <= a` carry no mass.
pub fn ladder_height_cdf(law: &StepLaw, a: f64, t: f64) -> Result<Evaluated> {
    check_level(a, true)?;
    if t.is_nan() {
        return Err(KendallError::Domain("target point t is NaN".into()));
    }
    if t <= a {
        return Ok(Evaluated { value: 0.0, fell_back: false });
    }
    if t.is_infinite() {
        return Ok(Evaluated { value: 1.0, fell_back: false });
    }
    let ctx = LevelContext::new(law, a, t);
    if a == 0.0 {
        // Summing the factorized joint law gives
        // (4 F(t) - 2 - G(t)^2) / (2 - G(t))^2.
        let f = law.cdf(t);
        let gt = ctx.gt;
        let value = (4.0 * f - 2.0 - gt * gt) / ((2.0 - gt) * (2.0 - gt));
        return Ok(Evaluated { value, fell_back: false });
    }
    let head = law.cdf(t) - law.cdf(a);
    if ctx.gt < GT_MIN || ctx.dd().abs() < DEGENERATE_EPS || 1.0 - ctx.g < DEGENERATE_EPS {
        return Ok(Evaluated { value: head + joint_series_tail(&ctx), fell_back: true });
    }
    let c = algebra::coeffs_from_context(&ctx);
    Ok(Evaluated { value: head + closed_joint_sum(&ctx, &c), fell_back: false })
}

/// Geometric sums of the assembled joint law over all epochs `n >= 2`.
fn closed_joint_sum(ctx: &LevelContext, c: &IterIntegralCoeffs) -> f64 {
    let g = ctx.g;
    let q = 0.5 * ctx.gt;
    let d = ctx.dd();
    let one_g = 1.0 - g;
    let one_q = 1.0 - q;
    // sum_{k>=1} I_k = c1/(1-q) + c2 g/(1-g)^2 + c3 g/(1-g).
    let sum_i = c.c1 / one_q + c.c2 * g / (one_g * one_g) + c.c3 * g / one_g;
    // Closed II_k = g^k (beta0 + beta1 k) + q^{k-1} (gamma0 + gamma1 (k-1)).
    let beta1 = ctx.h / d + ctx.ht * c.c2 / d;
    let beta0 = (ctx.h + ctx.g) / d - 2.0 * g * ctx.h / (d * d)
        + ctx.ht / d * (c.c3 - 2.0 * c.c2 * g / d);
    let gamma1 = c.c1 * ctx.ht / ctx.gt;
    let gamma0 = ctx.ii1() - g * (ctx.h + ctx.g) / d + g * ctx.gt * ctx.h / (d * d)
        - g * ctx.ht / d * (c.c3 - c.c2 * ctx.gt / d);
    let sum_ii = beta0 * g / one_g + beta1 * g / (one_g * one_g)
        + gamma0 / one_q
        + gamma1 * q / (one_q * one_q);
    // sum_{k>=1} of the diagonal subtractions.
    let sum_diag = 0.5 * ctx.h * g / one_g
        + 0.5 * g * (ctx.h / (one_g * one_g) + g / one_g);
    0.5 * ctx.ht * sum_i + 0.5 * ctx.gt * sum_ii - sum_diag
}

/// Series tail `sum_{n >= 2} P(tau = n, X_tau <= t)` accumulated from the
/// kernel recurrence; used where the closed sums are singular.
fn joint_series_tail(ctx: &LevelContext) -> f64 {
    let m_at = ctx.m_at();
    let mut i = ctx.i1();
    let mut ii = ctx.ii1();
    let mut g_km1 = 1.0;
    let mut total = 0.0;
    for k in 1..=2_000_000u32 {
        let diag_i = g_km1 * ctx.g;
        let diag_ii = g_km1 * (k as f64 * ctx.h + ctx.g);
        let term = 0.5 * ctx.ht * i + 0.5 * ctx.gt * ii
            - 0.5 * ctx.h * diag_i
            - 0.5 * ctx.g * diag_ii;
        total += term;
        if k >= 8 && term.abs() < 1e-16 {
            break;
        }
        let i_next = 0.5 * ctx.gt * i + 0.5 * m_at * diag_i + 0.5 * ctx.g * ctx.psi_at * diag_ii;
        let ii_next =
            0.5 * ctx.h * diag_i + 0.5 * ctx.g * diag_ii + 0.5 * ctx.ht * i + 0.5 * ctx.gt * ii;
        i = i_next;
        ii = ii_next;
        g_km1 *= ctx.g;
    }
    total
}

/// CDF of the running maximum: `P(max(X_0..X_n) <= t)` for `t > 0`, which
/// equals the epoch survival `P(tau_t > n)`. Closed mode uses the folded
/// coefficient form and falls back to accumulating the epoch recurrence
/// (flagged) on the singularity `2 G(t) = 1`; recurrence mode always
/// accumulates.
pub fn max_cdf(law: &StepLaw, n: u32, t: f64, mode: Mode) -> Result<Evaluated> {
    if !(t.is_finite() && t > 0.0) {
        return Err(KendallError::Domain(format!(
            "the running maximum starts at X_0 = 0, its CDF is defined for t > 0, got {t}"
        )));
    }
    if n == 0 {
        return Ok(Evaluated { value: 1.0, fell_back: false });
    }
    let (g, h) = level_g_h(law, t);
    let d = 2.0 * g - 1.0;
    match mode {
        Mode::Recurrence => {
            let mut state = (0.5, -0.5, -0.5);
            let mut tail = 1.0 - (state.0 + h * state.1 + g * state.2);
            for _ in 1..n {
                state = epoch_state_advance(state, g);
                tail -= state.0 + h * state.1 + g * state.2;
            }
            Ok(Evaluated { value: tail.clamp(0.0, 1.0), fell_back: false })
        }
        Mode::Closed => {
            if d.abs() < DEGENERATE_EPS {
                let value = epoch_tail_from_values(g, h, n);
                return Ok(Evaluated { value, fell_back: true });
            }
            Ok(Evaluated { value: epoch_tail_from_values(g, h, n), fell_back: false })
        }
    }
}

impl MinRecursionState {
    /// State after the first step, for a negative target `t`:
    /// `(1/2, H(|t|)/2, G(|t|)/2)`.
    pub fn initial(law: &StepLaw, t: f64) -> Result<Self> {
        if !(t.is_finite() && t < 0.0) {
            return Err(KendallError::Domain(format!(
                "the running minimum starts at X_0 = 0, its CDF is defined for t < 0, got {t}"
            )));
        }
        let (g, h) = level_g_h(law, -t);
        Ok(MinRecursionState { a_j: 0.5, b_j: 0.5 * h, c_j: 0.5 * g, g, h })
    }

    /// Advances the recursion one step:
    /// `A' = A/2`, `B' = G B + H (A/2 + C)`, `C' = G (A/2 + C)`.
    pub fn advance(&self) -> Self {
        let half = 0.5 * self.a_j;
        MinRecursionState {
            a_j: half,
            b_j: self.g * self.b_j + self.h * (half + self.c_j),
            c_j: self.g * (half + self.c_j),
            g: self.g,
            h: self.h,
        }
    }

    /// The mass kept strictly above the target after `j` steps is
    /// `a_j + b_j + c_j`.
    pub fn survival(&self) -> f64 {
        self.a_j + self.b_j + self.c_j
    }
}

fn min_cdf_closed(g: f64, h: f64, n: u32) -> Option<f64> {
    let d = 2.0 * g - 1.0;
    if d.abs() < DEGENERATE_EPS {
        return None;
    }
    let nf = n as f64;
    let value = 1.0
        - 0.5f64.powi(n as i32) * (1.0 + h / (d * d) - g / d)
        - g.powi(n as i32) * (g / d - h / (d * d) + nf * h / d);
    Some(value.clamp(0.0, 1.0))
}

fn min_cdf_recurrence(law: &StepLaw, n: u32, t: f64) -> Result<f64> {
    let mut state = MinRecursionState::initial(law, t)?;
    for _ in 1..n {
        state = state.advance();
    }
    Ok((1.0 - state.survival()).clamp(0.0, 1.0))
}

/// CDF of the running minimum at a negative target: the probability that
/// the walk dips strictly below `t < 0` within `n` steps (at targets
/// carrying an atom of the walk this is the open-interval version of the
/// event; elsewhere the two coincide). By the symmetry of the chain it
/// equals `1 - P(max <= |t|)`. Evaluates the closed form and substitutes
/// the recurrence on its removable singularity.
pub fn min_cdf(law: &StepLaw, n: u32, t: f64) -> Result<f64> {
    Ok(min_cdf_mode(law, n, t, Mode::Closed)?.value)
}

/// [`min_cdf`] with the route made explicit, so the closed form and the
/// recurrence can be compared directly.
pub fn min_cdf_mode(law: &StepLaw, n: u32, t: f64, mode: Mode) -> Result<Evaluated> {
    if !(t.is_finite() && t < 0.0) {
        return Err(KendallError::Domain(format!(
            "the running minimum starts at X_0 = 0, its CDF is defined for t < 0, got {t}"
        )));
    }
    if n == 0 {
        return Ok(Evaluated { value: 0.0, fell_back: false });
    }
    match mode {
        Mode::Recurrence => {
            Ok(Evaluated { value: min_cdf_recurrence(law, n, t)?, fell_back: false })
        }
        Mode::Closed => {
            let (g, h) = level_g_h(law, -t);
            match min_cdf_closed(g, h, n) {
                Some(value) => Ok(Evaluated { value, fell_back: false }),
                None => Ok(Evaluated { value: min_cdf_recurrence(law, n, t)?, fell_back: true }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steps::Alpha;
    use approx::assert_abs_diff_eq;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn point1() -> StepLaw {
        StepLaw::symmetric_point(a(1.0), 1.0).unwrap()
    }

    fn catalog() -> Vec<StepLaw> {
        vec![
            point1(),
            StepLaw::symmetric_pareto(a(0.5)),
            StepLaw::kendall_stable(a(1.0), 1.0).unwrap(),
            StepLaw::kendall_stable(a(2.0), 0.7).unwrap(),
        ]
    }

    #[test]
    fn ladder_coeffs_frozen_values() {
        let c = ladder_epoch_coeffs(&point1(), 3.0).unwrap();
        assert_abs_diff_eq!(c.a_coef, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.b_coef, 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.c_coef, -4.0, epsilon = 1e-13);
    }

    #[test]
    fn ladder_coeffs_sum_to_one() {
        for law in catalog() {
            for &lev in &[1.5, 2.9, 7.0] {
                match ladder_epoch_coeffs(&law, lev) {
                    Ok(c) => {
                        assert_abs_diff_eq!(c.a_coef + c.b_coef + c.c_coef, 1.0, epsilon = 1e-12)
                    }
                    Err(KendallError::Degenerate(_)) => {}
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn ladder_coeffs_signals_degenerate_level() {
        // Two-point law, alpha = 1: G(2) = 1/2 exactly.
        let r = ladder_epoch_coeffs(&point1(), 2.0);
        assert!(matches!(r, Err(KendallError::Degenerate(_))));
    }

    #[test]
    fn epoch_pmf_frozen_values() {
        for mode in [Mode::Closed, Mode::Recurrence] {
            let p2 = ladder_epoch_pmf(&point1(), 3.0, 2, mode).unwrap();
            assert_abs_diff_eq!(p2.value, 1.0 / 18.0, epsilon = 1e-14);
            assert!(!p2.fell_back);
            let p3 = ladder_epoch_pmf(&point1(), 3.0, 3, mode).unwrap();
            assert_abs_diff_eq!(p3.value, 11.0 / 108.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn epoch_pmf_at_level_zero_is_geometric() {
        for law in catalog() {
            for n in 1..=30u32 {
                for mode in [Mode::Closed, Mode::Recurrence] {
                    let p = ladder_epoch_pmf(&law, 0.0, n, mode).unwrap();
                    assert_eq!(p.value, 0.5f64.powi(n as i32));
                }
            }
        }
    }

    #[test]
    fn epoch_pmf_first_step_is_upper_tail() {
        for law in catalog() {
            for &lev in &[1.5, 3.0] {
                for mode in [Mode::Closed, Mode::Recurrence] {
                    let p = ladder_epoch_pmf(&law, lev, 1, mode).unwrap();
                    assert_abs_diff_eq!(p.value, 1.0 - law.cdf(lev), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn epoch_pmf_closed_matches_recurrence() {
        for law in catalog() {
            for &lev in &[1.5, 3.0] {
                for n in 1..=60u32 {
                    let pc = ladder_epoch_pmf(&law, lev, n, Mode::Closed).unwrap();
                    let pr = ladder_epoch_pmf(&law, lev, n, Mode::Recurrence).unwrap();
                    if !pc.fell_back {
                        assert_abs_diff_eq!(pc.value, pr.value, epsilon = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn epoch_pmf_degenerate_level_falls_back() {
        // 2 G(2) = 1 for the unit two-point law.
        let p = ladder_epoch_pmf(&point1(), 2.0, 5, Mode::Closed).unwrap();
        assert!(p.fell_back);
        let r = ladder_epoch_pmf(&point1(), 2.0, 5, Mode::Recurrence).unwrap();
        assert_eq!(p.value, r.value);
        assert!(!r.fell_back);
    }

    #[test]
    fn epoch_pmf_sums_to_one() {
        for law in catalog() {
            for &lev in &[0.0, 1.5, 3.0] {
                let mut total = 0.0;
                for n in 1..=4000u32 {
                    total += ladder_epoch_pmf(&law, lev, n, Mode::Recurrence).unwrap().value;
                }
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn epoch_tail_frozen_values_and_pmf_identity() {
        assert_abs_diff_eq!(
            ladder_epoch_tail(&point1(), 3.0, 2).unwrap(),
            17.0 / 18.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            ladder_epoch_tail(&point1(), 3.0, 3).unwrap(),
            91.0 / 108.0,
            epsilon = 1e-14
        );
        for law in catalog() {
            for &lev in &[0.0, 1.5, 2.0, 3.0] {
                let mut acc = 1.0;
                for n in 1..=40u32 {
                    acc -= ladder_epoch_pmf(&law, lev, n, Mode::Recurrence).unwrap().value;
                    let tail = ladder_epoch_tail(&law, lev, n).unwrap();
                    assert_abs_diff_eq!(tail, acc, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn weak_desc_epoch_values() {
        let law = point1();
        let f = law.cdf(3.0);
        assert_eq!(weak_desc_epoch_pmf(&law, 3.0, 1).unwrap(), f);
        assert_abs_diff_eq!(
            weak_desc_epoch_pmf(&law, 3.0, 4).unwrap(),
            (1.0 - f) * 0.125,
            epsilon = 1e-15
        );
        let mut total = 0.0;
        for n in 1..=60 {
            total += weak_desc_epoch_pmf(&law, 3.0, n).unwrap();
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(weak_desc_epoch_pmf(&law, 0.0, 1).is_err());
    }

    #[test]
    fn joint_ladder_frozen_values() {
        // Level zero, two-point law at t = 2:
        // P(tau_0 = 2, X_tau <= 2) = 3/16.
        for mode in [Mode::Closed, Mode::Recurrence] {
            let v = joint_ladder_cdf(&point1(), 0.0, 2, 2.0, mode).unwrap();
            assert_abs_diff_eq!(v.value, 3.0 / 16.0, epsilon = 1e-14);
            // Level 3 at t = 4, epoch 2: 7/288.
            let v = joint_ladder_cdf(&point1(), 3.0, 2, 4.0, mode).unwrap();
            assert_abs_diff_eq!(v.value, 7.0 / 288.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn joint_ladder_boundaries() {
        let law = point1();
        let v = joint_ladder_cdf(&law, 3.0, 4, 3.0, Mode::Closed).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(joint_ladder_cdf(&law, 3.0, 4, 2.9, Mode::Closed).is_err());
        // n = 1 is the plain step law between the level and the target.
        let v = joint_ladder_cdf(&law, 3.0, 1, 4.0, Mode::Closed).unwrap();
        assert_abs_diff_eq!(v.value, law.cdf(4.0) - law.cdf(3.0), epsilon = 1e-15);
        // At t = +inf the joint law reduces to the epoch pmf.
        let v = joint_ladder_cdf(&law, 3.0, 2, f64::INFINITY, Mode::Closed).unwrap();
        assert_abs_diff_eq!(v.value, 1.0 / 18.0, epsilon = 1e-14);
    }

    #[test]
    fn joint_ladder_closed_matches_recurrence() {
        for law in catalog() {
            for &lev in &[0.0, 1.5, 3.0] {
                for &t in &[1.6, 2.5, 6.0, 30.0] {
                    if t <= lev {
                        continue;
                    }
                    for n in 1..=30u32 {
                        let c = joint_ladder_cdf(&law, lev, n, t, Mode::Closed).unwrap();
                        let r = joint_ladder_cdf(&law, lev, n, t, Mode::Recurrence).unwrap();
                        assert_abs_diff_eq!(c.value, r.value, epsilon = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn joint_sums_to_epoch_pmf() {
        // Summing the joint law over a fine ladder of epochs at t -> inf
        // recovers the epoch pmf; at finite t it stays below it.
        let law = StepLaw::kendall_stable(a(1.0), 1.0).unwrap();
        for n in 2..=6u32 {
            let pmf = ladder_epoch_pmf(&law, 1.5, n, Mode::Closed).unwrap().value;
            let big = joint_ladder_cdf(&law, 1.5, n, 1e9, Mode::Closed).unwrap().value;
            assert_abs_diff_eq!(big, pmf, epsilon = 1e-6);
            let mid = joint_ladder_cdf(&law, 1.5, n, 4.0, Mode::Closed).unwrap().value;
            assert!(mid < pmf);
            assert!(mid > 0.0);
        }
    }

    #[test]
    fn ladder_height_frozen_marginal_at_level_zero() {
        // Two-point law, alpha = 1, t = 2: (4 - 2 - 1/4) / (3/2)^2 = 7/9.
        let v = ladder_height_cdf(&point1(), 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(v.value, 7.0 / 9.0, epsilon = 1e-14);
        assert!(!v.fell_back);
    }

    #[test]
    fn ladder_height_matches_joint_series() {
        for law in catalog() {
            for &lev in &[0.0, 1.5, 3.0] {
                for &t in &[2.1, 3.5, 8.0] {
                    if t <= lev {
                        continue;
                    }
                    let closed = ladder_height_cdf(&law, lev, t).unwrap().value;
                    let mut series = 0.0;
                    for n in 1..=600u32 {
                        series +=
                            joint_ladder_cdf(&law, lev, n, t, Mode::Recurrence).unwrap().value;
                    }
                    assert_abs_diff_eq!(closed, series, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn ladder_height_boundaries() {
        let law = point1();
        assert_eq!(ladder_height_cdf(&law, 3.0, 3.0).unwrap().value, 0.0);
        assert_eq!(ladder_height_cdf(&law, 3.0, 1.0).unwrap().value, 0.0);
        assert_eq!(ladder_height_cdf(&law, 3.0, f64::INFINITY).unwrap().value, 1.0);
        // The height CDF increases towards one.
        let lo = ladder_height_cdf(&law, 3.0, 4.0).unwrap().value;
        let hi = ladder_height_cdf(&law, 3.0, 40.0).unwrap().value;
        assert!(0.0 < lo && lo < hi && hi < 1.0);
    }

    #[test]
    fn ladder_height_degenerate_level_uses_series() {
        // 2 G(2) = 1 for the unit two-point law, so the closed sums for the
        // epoch part are singular at a = 2 ... but the relevant singularity
        // here is G(t) = 2 G(a): take a with G(t) = 2 G(a).
        let law = point1();
        let lev = 1.0 / 0.7;
        let t = 2.5;
        let v = ladder_height_cdf(&law, lev, t).unwrap();
        assert!(v.fell_back);
        // Against a brute-force joint series.
        let mut series = 0.0;
        for n in 1..=600u32 {
            series += joint_ladder_cdf(&law, lev, n, t, Mode::Recurrence).unwrap().value;
        }
        assert_abs_diff_eq!(v.value, series, epsilon = 1e-10);
    }

    #[test]
    fn max_cdf_frozen_values() {
        for mode in [Mode::Closed, Mode::Recurrence] {
            let v = max_cdf(&point1(), 2, 3.0, mode).unwrap();
            assert_abs_diff_eq!(v.value, 17.0 / 18.0, epsilon = 1e-14);
            let v = max_cdf(&point1(), 3, 3.0, mode).unwrap();
            assert_abs_diff_eq!(v.value, 91.0 / 108.0, epsilon = 1e-14);
        }
        assert_eq!(max_cdf(&point1(), 0, 3.0, Mode::Closed).unwrap().value, 1.0);
        assert!(max_cdf(&point1(), 2, 0.0, Mode::Closed).is_err());
        assert!(max_cdf(&point1(), 2, -1.0, Mode::Closed).is_err());
    }

    #[test]
    fn max_cdf_is_epoch_survival() {
        for law in catalog() {
            for &t in &[1.2, 2.0, 3.0, 10.0] {
                for n in 0..=30u32 {
                    let v = max_cdf(&law, n, t, Mode::Closed).unwrap().value;
                    let tail = ladder_epoch_tail(&law, t, n).unwrap();
                    assert_abs_diff_eq!(v, tail, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn min_recursion_frozen_trace() {
        let s1 = MinRecursionState::initial(&point1(), -3.0).unwrap();
        assert_abs_diff_eq!(s1.a_j, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s1.b_j, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s1.c_j, 1.0 / 3.0, epsilon = 1e-15);
        let s2 = s1.advance();
        assert_abs_diff_eq!(s2.a_j, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(s2.b_j, 11.0 / 36.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s2.c_j, 7.0 / 18.0, epsilon = 1e-15);
        assert_abs_diff_eq!(1.0 - s2.survival(), 1.0 / 18.0, epsilon = 1e-15);
    }

    #[test]
    fn min_cdf_frozen_values() {
        assert_abs_diff_eq!(min_cdf(&point1(), 2, -3.0).unwrap(), 1.0 / 18.0, epsilon = 1e-14);
        assert_abs_diff_eq!(min_cdf(&point1(), 3, -3.0).unwrap(), 17.0 / 108.0, epsilon = 1e-14);
        assert_eq!(min_cdf(&point1(), 0, -3.0).unwrap(), 0.0);
        assert!(min_cdf(&point1(), 2, 0.0).is_err());
        assert!(min_cdf(&point1(), 2, 1.0).is_err());
    }

    #[test]
    fn min_closed_matches_recurrence() {
        for law in catalog() {
            for &t in &[-1.2, -2.0, -3.0, -10.0] {
                for n in 0..=40u32 {
                    let c = min_cdf_mode(&law, n, t, Mode::Closed).unwrap();
                    let r = min_cdf_mode(&law, n, t, Mode::Recurrence).unwrap();
                    if !c.fell_back {
                        assert_abs_diff_eq!(c.value, r.value, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn min_is_reflected_max() {
        // P(min < t) = 1 - P(max <= |t|) exactly, by the sign symmetry of
        // the chain.
        for law in catalog() {
            for &t in &[-1.7, -4.0, -11.0] {
                for n in 0..=25u32 {
                    let mn = min_cdf(&law, n, t).unwrap();
                    let mx = max_cdf(&law, n, -t, Mode::Closed).unwrap().value;
                    assert_abs_diff_eq!(mn, 1.0 - mx, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn min_degenerate_level_falls_back() {
        // 2 G(2) = 1 for the unit two-point law.
        let c = min_cdf_mode(&point1(), 6, -2.0, Mode::Closed).unwrap();
        assert!(c.fell_back);
        let r = min_cdf_mode(&point1(), 6, -2.0, Mode::Recurrence).unwrap();
        assert_eq!(c.value, r.value);
    }

    #[test]
    fn fluctuation_query_validation() {
        let q = FluctuationQuery::new(point1(), 1.0, 3, 2.0);
        assert!(q.is_ok());
        assert!(FluctuationQuery::new(point1(), -1.0, 3, 2.0).is_err());
        assert!(FluctuationQuery::new(point1(), 1.0, 0, 2.0).is_err());
        assert!(FluctuationQuery::new(point1(), 1.0, 3, f64::NAN).is_err());
    }

}

//! The Kendall convolution algebra.
//!
//! Everything here reduces to the kernel `psi(t) = (1 - |t|^alpha)_+`: the
//! convolution of two point masses is a two-component mixture scaled by the
//! larger modulus, convolution powers multiply Williamson transforms, and
//! the fluctuation theory consumes two families of iterated integrals that
//! this module evaluates both in closed form and by the defining kernel
//! recurrence.

use crate::error::{KendallError, Result};
use crate::quad;
use crate::steps::{Alpha, MagnitudeMeasure, StepLaw};

/// Below this distance from a removable singularity the closed forms switch
/// to their degenerate branches (or to the recurrence).
pub(crate) const DEGENERATE_EPS: f64 = 1e-9;
/// Closed forms that divide by `G(t)` refuse values below this and fall back
/// to the recurrence.
pub(crate) const GT_MIN: f64 = 1e-12;

const CONV_TOL: f64 = 1e-8;
const CONV_INNER_TOL: f64 = 5e-11;
const CONV_OUTER_TOL: f64 = 2e-9;
const CONV_DEPTH: u32 = 40;

/// Evaluation mode for quantities that exist both as a closed form and as a
/// kernel recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Closed,
    Recurrence,
}

/// Result of an evaluation that may have substituted the recurrence for a
/// closed form near a removable singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub fell_back: bool,
}

impl Evaluated {
    fn closed(value: f64) -> Self {
        Evaluated { value, fell_back: false }
    }

    fn fallback(value: f64) -> Self {
        Evaluated { value, fell_back: true }
    }
}

/// The Kendall kernel `psi(t) = (1 - |t|^alpha)_+`.
#[inline]
pub fn psi(alpha: Alpha, t: f64) -> f64 {
    let r = t.abs().powf(alpha.get());
    if r >= 1.0 {
        0.0
    } else {
        1.0 - r
    }
}

/// The kernel as a reusable callable.
#[derive(Debug, Clone, Copy)]
pub struct PsiKernel {
    alpha: Alpha,
}

impl PsiKernel {
    pub fn new(alpha: Alpha) -> Self {
        PsiKernel { alpha }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        psi(self.alpha, t)
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }
}

/// The convolution of two (symmetrized) point masses: a mixture of the
/// symmetric unit two-point law and the symmetric Pareto law with index
/// `2 alpha`, both rescaled by `scale_m = max(|x|, |y|)`. The Pareto
/// component carries weight `(min(|x|, |y|) / max(|x|, |y|))^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvMixture {
    pub scale_m: f64,
    pub pareto_weight: f64,
}

/// Mixture representation of the convolution of the point masses at `x`
/// and `y`. Both masses at the origin give the degenerate mixture with zero
/// scale.
pub fn conv_point(x: f64, y: f64, alpha: Alpha) -> ConvMixture {
    let ax = x.abs();
    let ay = y.abs();
    let big = ax.max(ay);
    if big == 0.0 {
        return ConvMixture { scale_m: 0.0, pareto_weight: 0.0 };
    }
    let small = ax.min(ay);
    ConvMixture { scale_m: big, pareto_weight: (small / big).powf(alpha.get()) }
}

/// Mass that the convolution of the point masses at `x` and `y` puts on the
/// open interval `(0, t)`:
/// `(1 - |x y / t^2|^alpha) / 2` when both `|x| < t` and `|y| < t`, zero
/// otherwise. The interval is empty for `t <= 0`, and two masses at the
/// origin convolve to the point mass at zero, which puts no mass on the
/// open interval.
pub fn conv_point_cdf(x: f64, y: f64, t: f64, alpha: Alpha) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let ax = x.abs();
    let ay = y.abs();
    if ax >= t || ay >= t {
        return 0.0;
    }
    if ax == 0.0 && ay == 0.0 {
        return 0.0;
    }
    0.5 * (1.0 - ((ax / t) * (ay / t)).powf(alpha.get()))
}

/// CDF of the n-fold convolution power of the step law:
/// `F_n(t) = [G(t)^n + 1 + n G(t)^{n-1} H(t)] / 2` for `t > 0`, extended to
/// `t < 0` by symmetry. The formula degenerates at `t = 0`, which is
/// rejected.
pub fn conv_power_cdf(law: &StepLaw, n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
    }
    if t == 0.0 || t.is_nan() {
        return Err(KendallError::Domain(format!(
            "convolution power CDF is evaluated away from t = 0, got {t}"
        )));
    }
    if t < 0.0 {
        return Ok(1.0 - conv_power_cdf(law, n, -t)?);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let g = law.g_unchecked(t);
    let h = law.h_unchecked(t);
    let gp = g.powi(n as i32 - 1);
    Ok(0.5 * (gp * g + 1.0 + n as f64 * gp * h))
}

/// Mass that the `n`-step transition law started from `x` puts on `(0, t)`
/// for `t > 0`:
/// `[psi(x/t) n G(t)^{n-1} H(t) + G(t)^n] / 2` when `|x| < t`, zero
/// otherwise.
pub fn transition_cdf(law: &StepLaw, x: f64, n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(KendallError::Domain(format!(
            "transition CDF is evaluated on intervals (0, t) with t > 0, got {t}"
        )));
    }
    if x.abs() >= t {
        return Ok(0.0);
    }
    let g = law.g_unchecked(t);
    let h = law.h_unchecked(t);
    let gp = g.powi(n as i32 - 1);
    let h_n = n as f64 * gp * h;
    Ok(0.5 * (psi(law.alpha(), x / t) * h_n + gp * g))
}

/// Truncated moment of order `alpha` of the one-step law from `y`:
/// `integral of x^alpha over (0, a)` under the convolution of the point
/// mass at `y` with the step law, which is
/// `a^alpha [H(a) psi(y/a) + (1 - psi(y/a)) G(a)] / 2` for `|y| < a` and
/// zero otherwise.
pub fn truncated_moment(law: &StepLaw, y: f64, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(KendallError::InvalidParameter { name: "a", value: a });
    }
    if y.abs() >= a {
        return Ok(0.0);
    }
    let g = law.g_unchecked(a);
    let h = law.h_unchecked(a);
    let p = psi(law.alpha(), y / a);
    Ok(0.5 * a.powf(law.alpha().get()) * (h * p + (1.0 - p) * g))
}

/// The kernel-weighted mass of the half-line `(-inf, a]` under the one-step
/// law from `y`, weighted by `psi(. / t)` with `t >= a`:
/// `psi(y/a) m(a, t) / 2 + G(a) psi(a/t) 1[|y| < a] / 2 + psi(y/t) G(t) / 2`
/// where `m(a, t) = H(a) psi(a/t) + (1 - psi(a/t)) G(a)`. This is the
/// one-step building block of the iterated integrals below.
pub fn psi_integral(law: &StepLaw, y: f64, a: f64, t: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(KendallError::InvalidParameter { name: "a", value: a });
    }
    if !(t.is_finite() && t >= a) {
        return Err(KendallError::Domain(format!("need t >= a > 0, got a = {a}, t = {t}")));
    }
    let ctx = LevelContext::new(law, a, t);
    let alpha = law.alpha();
    let below = if y.abs() < a { 1.0 } else { 0.0 };
    Ok(0.5 * psi(alpha, y / a) * ctx.m_at()
        + 0.5 * ctx.g * ctx.psi_at * below
        + 0.5 * psi(alpha, y / t) * ctx.gt)
}

/// Transform values of a step law at a level `a` and a target `t >= a`.
/// `a = 0` is allowed and gives `g = h = 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LevelContext {
    pub g: f64,
    pub h: f64,
    pub gt: f64,
    pub ht: f64,
    pub psi_at: f64,
}

impl LevelContext {
    pub(crate) fn new(law: &StepLaw, a: f64, t: f64) -> Self {
        debug_assert!(a >= 0.0 && t >= a && t > 0.0);
        let (g, h) = if a > 0.0 { (law.g_unchecked(a), law.h_unchecked(a)) } else { (0.0, 0.0) };
        let (gt, ht) =
            if t == a { (g, h) } else { (law.g_unchecked(t), law.h_unchecked(t)) };
        let psi_at = psi(law.alpha(), a / t);
        LevelContext { g, h, gt, ht, psi_at }
    }

    /// `m(a, t) = H(a) psi(a/t) + (1 - psi(a/t)) G(a)`.
    #[inline]
    pub(crate) fn m_at(&self) -> f64 {
        self.h * self.psi_at + (1.0 - self.psi_at) * self.g
    }

    /// First iterated integral, `I_1 = [G(t) + H(a) psi(a/t) + G(a)] / 2`.
    #[inline]
    pub(crate) fn i1(&self) -> f64 {
        0.5 * (self.gt + self.h * self.psi_at + self.g)
    }

    /// Second iterated integral, `II_1 = [H(a) + H(t) + G(a) + G(t)] / 2`.
    #[inline]
    pub(crate) fn ii1(&self) -> f64 {
        0.5 * (self.h + self.ht + self.g + self.gt)
    }

    /// Diagonal values `I_n(a, a) = G(a)^n`.
    #[inline]
    pub(crate) fn diag_i(&self, n: u32) -> f64 {
        self.g.powi(n as i32)
    }

    /// Diagonal values `II_n(a, a) = G(a)^{n-1} (n H(a) + G(a))`.
    #[inline]
    pub(crate) fn diag_ii(&self, n: u32) -> f64 {
        self.g.powi(n as i32 - 1) * (n as f64 * self.h + self.g)
    }

    /// `2 G(a) - G(t)`, the denominator of the closed-form coefficients.
    #[inline]
    pub(crate) fn dd(&self) -> f64 {
        2.0 * self.g - self.gt
    }
}

/// Coefficients of the closed form of the first iterated integral:
/// `I_n = c1 (G(t)/2)^{n-1} + G(a)^n (c2 n + c3)` for `n >= 2`, valid away
/// from the removable singularity `G(t) = 2 G(a)`. `m_at` is the mixed
/// transform value `m(a, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterIntegralCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub m_at: f64,
}

pub(crate) fn coeffs_from_context(ctx: &LevelContext) -> IterIntegralCoeffs {
    let d = ctx.dd();
    let hp = ctx.h * ctx.psi_at;
    let c2 = hp / d;
    let c3 = (hp + ctx.g) / d - 2.0 * ctx.h * ctx.g * ctx.psi_at / (d * d);
    let c1 = ctx.i1() - (ctx.g / d) * (ctx.g + hp * (1.0 - ctx.gt / d));
    IterIntegralCoeffs { c1, c2, c3, m_at: ctx.m_at() }
}

/// Closed-form coefficients of the first iterated integral at level `a` and
/// target `t`. Signals when the parameters sit on the removable singularity
/// `|2 G(a) - G(t)| < 1e-9`.
pub fn iter_integral_coeffs(law: &StepLaw, a: f64, t: f64) -> Result<IterIntegralCoeffs> {
    if !(a.is_finite() && a > 0.0) {
        return Err(KendallError::InvalidParameter { name: "a", value: a });
    }
    if !(t.is_finite() && t >= a) {
        return Err(KendallError::Domain(format!("need t >= a > 0, got a = {a}, t = {t}")));
    }
    let ctx = LevelContext::new(law, a, t);
    if ctx.dd().abs() < DEGENERATE_EPS {
        return Err(KendallError::Degenerate(format!(
            "G(t) = 2 G(a) at a = {a}, t = {t}; the closed-form coefficients have a pole here"
        )));
    }
    Ok(coeffs_from_context(&ctx))
}

/// Joint kernel recurrence for the two iterated integrals, running both
/// sequences in lockstep:
/// `I_{k+1} = G(t)/2 I_k + m(a,t)/2 G(a)^k + G(a) psi(a/t)/2 II_k(a,a)`,
/// `II_{k+1} = H(a)/2 G(a)^k + G(a)/2 II_k(a,a) + H(t)/2 I_k + G(t)/2 II_k`.
pub(crate) fn iterate_integrals(ctx: &LevelContext, n: u32) -> (f64, f64) {
    let mut i = ctx.i1();
    let mut ii = ctx.ii1();
    let m_at = ctx.m_at();
    // g^{k-1} for the running diagonal values.
    let mut g_km1 = 1.0;
    for k in 1..n {
        let diag_i = g_km1 * ctx.g;
        let diag_ii = g_km1 * (k as f64 * ctx.h + ctx.g);
        let i_next = 0.5 * ctx.gt * i + 0.5 * m_at * diag_i + 0.5 * ctx.g * ctx.psi_at * diag_ii;
        let ii_next =
            0.5 * ctx.h * diag_i + 0.5 * ctx.g * diag_ii + 0.5 * ctx.ht * i + 0.5 * ctx.gt * ii;
        i = i_next;
        ii = ii_next;
        g_km1 *= ctx.g;
    }
    (i, ii)
}

pub(crate) fn closed_i(ctx: &LevelContext, n: u32) -> Evaluated {
    debug_assert!(n >= 2);
    let d = ctx.dd();
    let nf = n as f64;
    if d.abs() < DEGENERATE_EPS {
        // Degenerate branch at G(t) = 2 G(a).
        let b = ctx.h * ctx.psi_at + ctx.g;
        let value = ctx.g.powi(n as i32 - 1)
            * (ctx.i1() + 0.5 * (nf - 1.0) * (b + 0.5 * nf * ctx.h * ctx.psi_at));
        return Evaluated::closed(value);
    }
    let c = coeffs_from_context(ctx);
    let q = 0.5 * ctx.gt;
    Evaluated::closed(c.c1 * q.powi(n as i32 - 1) + ctx.g.powi(n as i32) * (c.c2 * nf + c.c3))
}

pub(crate) fn closed_ii(ctx: &LevelContext, n: u32) -> Option<Evaluated> {
    debug_assert!(n >= 2);
    let d = ctx.dd();
    let nf = n as f64;
    if ctx.gt < GT_MIN {
        return None;
    }
    if d.abs() < DEGENERATE_EPS {
        if ctx.g < GT_MIN {
            return None;
        }
        let b = ctx.h * ctx.psi_at + ctx.g;
        let inner = (nf - 1.0) * ctx.i1()
            + b * (nf - 1.0) * (nf - 2.0) / 4.0
            + ctx.h * ctx.psi_at * nf * (nf - 1.0) * (nf - 2.0) / 12.0;
        let value = ctx.g.powi(n as i32 - 1)
            * (ctx.ii1()
                + 0.5 * ctx.h * (nf - 1.0) * (1.0 + 0.5 * nf)
                + 0.5 * ctx.g * (nf - 1.0)
                + ctx.ht / (2.0 * ctx.g) * inner);
        return Some(Evaluated::closed(value));
    }
    let c = coeffs_from_context(ctx);
    let q = 0.5 * ctx.gt;
    let term_g = ctx.g.powi(n as i32)
        * (((nf + 1.0) * ctx.h + ctx.g) / d - 2.0 * ctx.g * ctx.h / (d * d)
            + ctx.ht / d * (nf * c.c2 + c.c3 - 2.0 * c.c2 * ctx.g / d));
    let term_q = q.powi(n as i32 - 1)
        * (ctx.ii1() - ctx.g * (ctx.h + ctx.g) / d
            + ctx.g * ctx.gt * ctx.h / (d * d)
            + (nf - 1.0) * c.c1 * ctx.ht / ctx.gt
            - ctx.g * ctx.ht / d * (c.c3 - c.c2 * ctx.gt / d));
    Some(Evaluated::closed(term_g + term_q))
}

fn validate_iterated_args(n: u32, a: f64, t: f64, allow_zero_level: bool) -> Result<()> {
    if n == 0 {
        return Err(KendallError::InvalidParameter { name: "n", value: 0.0 });
    }
    let level_ok = a.is_finite() && (a > 0.0 || (allow_zero_level && a == 0.0));
    if !level_ok {
        return Err(KendallError::InvalidParameter { name: "a", value: a });
    }
    if !(t.is_finite() && t >= a && t > 0.0) {
        return Err(KendallError::Domain(format!("need t >= a, got a = {a}, t = {t}")));
    }
    Ok(())
}

pub(crate) fn integral_i_at(
    law: &StepLaw,
    n: u32,
    a: f64,
    t: f64,
    mode: Mode,
) -> Result<Evaluated> {
    validate_iterated_args(n, a, t, true)?;
    let ctx = LevelContext::new(law, a, t);
    match mode {
        Mode::Recurrence => Ok(Evaluated::closed(iterate_integrals(&ctx, n).0)),
        Mode::Closed => {
            if t == a {
                return Ok(Evaluated::closed(ctx.diag_i(n)));
            }
            if n == 1 {
                return Ok(Evaluated::closed(ctx.i1()));
            }
            Ok(closed_i(&ctx, n))
        }
    }
}

pub(crate) fn integral_ii_at(
    law: &StepLaw,
    n: u32,
    a: f64,
    t: f64,
    mode: Mode,
) -> Result<Evaluated> {
    validate_iterated_args(n, a, t, true)?;
    let ctx = LevelContext::new(law, a, t);
    match mode {
        Mode::Recurrence => Ok(Evaluated::closed(iterate_integrals(&ctx, n).1)),
        Mode::Closed => {
            if t == a {
                return Ok(Evaluated::closed(ctx.diag_ii(n)));
            }
            if n == 1 {
                return Ok(Evaluated::closed(ctx.ii1()));
            }
            match closed_ii(&ctx, n) {
                Some(v) => Ok(v),
                // The closed form divides by G(t) (or by G(a) in its
                // degenerate branch); run the recurrence instead.
                None => Ok(Evaluated::fallback(iterate_integrals(&ctx, n).1)),
            }
        }
    }
}

/// First iterated fluctuation integral `I_n(a, t)`: the expectation of
/// `psi(X_n / t)` on the event that the walk stays at or below `a` through
/// its first `n` steps. Closed mode evaluates the explicit geometric form
/// (`t = a` short-circuits to `G(a)^n`, the removable singularity
/// `G(t) = 2 G(a)` uses the degenerate branch); recurrence mode iterates the
/// defining kernel recursion.
pub fn integral_i(law: &StepLaw, n: u32, a: f64, t: f64, mode: Mode) -> Result<Evaluated> {
    validate_iterated_args(n, a, t, false)?;
    integral_i_at(law, n, a, t, mode)
}

/// Second iterated fluctuation integral `II_n(a, t)`, the companion of
/// [`integral_i`] in the joint ladder law. In closed mode the formula
/// divides by `G(t)`; when `G(t)` vanishes (or the degenerate branch would
/// divide by a vanishing `G(a)`) the recurrence is substituted and the
/// result is marked `fell_back`.
pub fn integral_ii(law: &StepLaw, n: u32, a: f64, t: f64, mode: Mode) -> Result<Evaluated> {
    validate_iterated_args(n, a, t, false)?;
    integral_ii_at(law, n, a, t, mode)
}

/// Integrates `f` against a magnitude measure over `[0, upper]`, splitting
/// at the measure's own break points and at `extra_knots`. Returns the
/// value and the largest unresolved quadrature error estimate.
fn measure_integral(
    measure: &MagnitudeMeasure,
    upper: f64,
    extra_knots: &[f64],
    tol: f64,
    f: &dyn Fn(f64) -> f64,
) -> (f64, f64) {
    match measure {
        MagnitudeMeasure::Atoms(atoms) => {
            let mut acc = 0.0;
            for &(s, w) in atoms {
                acc += w * f(s);
            }
            (acc, 0.0)
        }
        MagnitudeMeasure::Density { lo, hi, knots, density } => {
            let b = upper.min(*hi);
            if b <= *lo {
                return (0.0, 0.0);
            }
            let mut cuts: Vec<f64> = knots.clone();
            cuts.extend_from_slice(extra_knots);
            let g = |u: f64| density(u) * f(u);
            let r = quad::integrate_with_knots(&g, *lo, b, &cuts, tol, CONV_DEPTH);
            (r.value, r.unresolved)
        }
        MagnitudeMeasure::PiecewiseConstant(pieces) => {
            let mut acc = 0.0;
            let mut unresolved: f64 = 0.0;
            let live: Vec<&(f64, f64, f64)> =
                pieces.iter().filter(|(a0, ..)| *a0 < upper).collect();
            if live.is_empty() {
                return (0.0, 0.0);
            }
            let piece_tol = tol / live.len() as f64;
            for (a0, b0, d) in live {
                let b = b0.min(upper);
                let r = quad::integrate_with_knots(f, *a0, b, extra_knots, piece_tol, CONV_DEPTH);
                acc += d * r.value;
                unresolved = unresolved.max(r.unresolved * d);
            }
            (acc, unresolved)
        }
    }
}

/// Double integral of `kernel(u, v)` against the magnitude measures of the
/// two laws over `[0, t]^2`. `inner_knots(u)` lists kinks of
/// `v -> kernel(u, v)`.
fn double_magnitude_integral(
    law1: &StepLaw,
    law2: &StepLaw,
    t: f64,
    kernel: &(dyn Fn(f64, f64) -> f64 + Sync),
    inner_knots: &dyn Fn(f64) -> Vec<f64>,
) -> Result<f64> {
    let m1 = law1.magnitude_measure();
    let m2 = law2.magnitude_measure();
    // Outer integration sees kinks of the inner result wherever the support
    // structure of the inner measure changes.
    let mut outer_knots: Vec<f64> = Vec::new();
    match &m2 {
        MagnitudeMeasure::Atoms(atoms) => outer_knots.extend(atoms.iter().map(|&(s, _)| s)),
        MagnitudeMeasure::Density { lo, hi, knots, .. } => {
            outer_knots.push(*lo);
            if hi.is_finite() {
                outer_knots.push(*hi);
            }
            outer_knots.extend_from_slice(knots);
        }
        MagnitudeMeasure::PiecewiseConstant(pieces) => {
            for &(a0, b0, _) in pieces {
                outer_knots.push(a0);
                outer_knots.push(b0);
            }
        }
    }
    let unresolved_inner = std::sync::atomic::AtomicU64::new(0);
    let note_inner = |e: f64| {
        // Track the max inner unresolved error across closure calls.
        let bits = e.to_bits();
        unresolved_inner.fetch_max(bits, std::sync::atomic::Ordering::Relaxed);
    };
    let inner_value = |u: f64| {
        let (v, e) =
            measure_integral(&m2, t, &inner_knots(u), CONV_INNER_TOL, &|w| kernel(u, w));
        note_inner(e);
        v
    };
    let (value, unresolved_outer) =
        measure_integral(&m1, t, &outer_knots, CONV_OUTER_TOL, &inner_value);
    let inner_err = f64::from_bits(unresolved_inner.load(std::sync::atomic::Ordering::Relaxed));
    let achieved = unresolved_outer + inner_err;
    if achieved > CONV_TOL {
        return Err(KendallError::QuadratureAccuracy { requested: CONV_TOL, achieved });
    }
    Ok(value)
}

fn check_common_alpha(law1: &StepLaw, law2: &StepLaw) -> Result<Alpha> {
    let a1 = law1.alpha();
    if a1.get() != law2.alpha().get() {
        return Err(KendallError::Domain(format!(
            "convolved laws must share the exponent alpha, got {} and {}",
            a1.get(),
            law2.alpha().get()
        )));
    }
    Ok(a1)
}

/// Mass that the convolution of two step laws puts on `(0, t)`, by exact
/// summation over atoms and adaptive quadrature over continuous components.
pub fn conv_cdf(law1: &StepLaw, law2: &StepLaw, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(KendallError::Domain(format!(
            "convolution CDF is evaluated on intervals (0, t) with t > 0, got {t}"
        )));
    }
    let alpha = check_common_alpha(law1, law2)?;
    let kernel = move |u: f64, v: f64| conv_point_cdf(u, v, t, alpha);
    double_magnitude_integral(law1, law2, t, &kernel, &|_u| Vec::new())
}

/// Williamson transform of the convolution of two step laws at `t`,
/// computed from the defining mixture of the point-mass convolution (not
/// from transform multiplication, so it can serve as an independent check
/// of that identity): for magnitudes `u, v` with `big = max(u, v)` the
/// mixture transform is
/// `w base^2 + (1 - w) base` with `base = psi(big / t)` and
/// `w = (min(u, v) / big)^alpha`.
pub fn conv_williamson_g(law1: &StepLaw, law2: &StepLaw, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(KendallError::Domain(format!(
            "williamson transform is evaluated at t > 0, got {t}"
        )));
    }
    let alpha = check_common_alpha(law1, law2)?;
    let kernel = move |u: f64, v: f64| {
        let big = u.max(v);
        if big == 0.0 {
            return 1.0;
        }
        let base = psi(alpha, big / t);
        if base == 0.0 {
            return 0.0;
        }
        let w = (u.min(v) / big).powf(alpha.get());
        w * base * base + (1.0 - w) * base
    };
    // The kernel has a kink across the diagonal u = v.
    double_magnitude_integral(law1, law2, t, &kernel, &|u| vec![u])
}

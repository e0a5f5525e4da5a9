//! Step distributions for Kendall random walks.
//!
//! A step law is a symmetric probability measure on the real line with a
//! finite moment of order `alpha` and no atom at the origin. The module
//! provides the built-in families (symmetric two-point, symmetric Pareto,
//! Kendall alpha-stable) plus laws tabulated from a CDF grid, together with
//! their Williamson transforms, the associated `H` function, moments of
//! order `alpha`, transform inversion and exact samplers.

use crate::error::{KendallError, Result};
use crate::quad;
use crate::simulator::RngState;

/// Tail/transform exponent of the Kendall convolution, `alpha > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Alpha(value))
        } else {
            Err(KendallError::InvalidAlpha(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Moment of order `alpha` of a step law, `E|Y|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentAlpha {
    pub m_alpha: f64,
}

/// Piecewise-linear CDF grid backing a tabulated law.
#[derive(Debug, Clone)]
struct Table {
    ts: Vec<f64>,
    fs: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Family {
    /// `(delta_s + delta_{-s}) / 2`.
    SymmetricPoint { scale: f64 },
    /// Density `alpha |y|^{-2 alpha - 1}` on `|y| >= 1`.
    SymmetricPareto,
    /// CDF `1/2 + (1 + m t^{-alpha}) exp(-m t^{-alpha}) / 2` for `t > 0`.
    KendallStable { m_alpha: f64 },
    /// Symmetric law given by a piecewise-linear CDF on `t >= 0`.
    Tabulated(Table),
}

/// A symmetric step distribution together with its convolution exponent.
#[derive(Debug, Clone)]
pub struct StepLaw {
    alpha: Alpha,
    family: Family,
}

/// Quadrature settings used for tabulated laws.
const TABLE_TOL: f64 = 1e-10;
const TABLE_DEPTH: u32 = 40;

/// Magnitude of a draw from the symmetric Pareto law with index `2 alpha`,
/// from a uniform variate in `(0, 1]`.
#[inline]
pub(crate) fn pareto_magnitude(alpha: f64, u: f64) -> f64 {
    u.powf(-1.0 / (2.0 * alpha))
}

#[inline]
fn sign_from_uniform(u: f64) -> f64 {
    // u lives on the lattice k * 2^-53 for k in 1..=2^53, so exactly half of
    // the lattice satisfies u <= 1/2.
    if u <= 0.5 {
        -1.0
    } else {
        1.0
    }
}

impl StepLaw {
    /// Symmetric two-point law `(delta_s + delta_{-s}) / 2` with `s = scale`.
    pub fn symmetric_point(alpha: Alpha, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(KendallError::InvalidParameter { name: "scale", value: scale });
        }
        Ok(StepLaw { alpha, family: Family::SymmetricPoint { scale } })
    }

    /// Symmetric Pareto law with density `alpha |y|^{-2 alpha - 1}` on `|y| >= 1`.
    pub fn symmetric_pareto(alpha: Alpha) -> Self {
        StepLaw { alpha, family: Family::SymmetricPareto }
    }

    /// Kendall alpha-stable law with moment parameter `m_alpha > 0`.
    pub fn kendall_stable(alpha: Alpha, m_alpha: f64) -> Result<Self> {
        if !(m_alpha.is_finite() && m_alpha > 0.0) {
            return Err(KendallError::InvalidParameter { name: "m_alpha", value: m_alpha });
        }
        Ok(StepLaw { alpha, family: Family::KendallStable { m_alpha } })
    }

    /// Symmetric law tabulated as a piecewise-linear CDF on the nonnegative
    /// half-line. `points` are `(t, F(t))` pairs with strictly increasing
    /// nonnegative `t` and nondecreasing `F`; the first `F` value must be
    /// `1/2` (the law is symmetric with no atom at zero) and the last must
    /// be `1` (the grid covers the whole support).
    pub fn tabulated(alpha: Alpha, points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(KendallError::InvalidTable("need at least two grid points".into()));
        }
        let mut ts = Vec::with_capacity(points.len());
        let mut fs = Vec::with_capacity(points.len());
        for &(t, f) in points {
            if !t.is_finite() || !f.is_finite() {
                return Err(KendallError::InvalidTable(format!("non-finite entry ({t}, {f})")));
            }
            if let Some(&prev) = ts.last() {
                if t <= prev {
                    return Err(KendallError::InvalidTable(format!(
                        "grid must be strictly increasing, got {prev} then {t}"
                    )));
                }
            } else if t < 0.0 {
                return Err(KendallError::InvalidTable(format!("grid starts at {t} < 0")));
            }
            if let Some(&prev) = fs.last() {
                if f < prev {
                    return Err(KendallError::InvalidTable(format!(
                        "CDF values must be nondecreasing, got {prev} then {f}"
                    )));
                }
            }
            if !(0.0..=1.0 + 1e-12).contains(&f) {
                return Err(KendallError::InvalidTable(format!("CDF value {f} outside [0, 1]")));
            }
            ts.push(t);
            fs.push(f);
        }
        if (fs[0] - 0.5).abs() > 1e-12 {
            return Err(KendallError::InvalidTable(format!(
                "first CDF value must be 1/2 for a symmetric law with no atom at zero, got {}",
                fs[0]
            )));
        }
        if (fs[fs.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(KendallError::InvalidTable(format!(
                "last CDF value must be 1, got {}",
                fs[fs.len() - 1]
            )));
        }
        fs[0] = 0.5;
        let last = fs.len() - 1;
        fs[last] = 1.0;
        Ok(StepLaw { alpha, family: Family::Tabulated(Table { ts, fs }) })
    }

    #[inline]
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Short family tag, used in reports and error messages.
    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::SymmetricPoint { .. } => "symmetric-point",
            Family::SymmetricPareto => "symmetric-pareto",
            Family::KendallStable { .. } => "kendall-stable",
            Family::Tabulated(_) => "tabulated",
        }
    }

    /// CDF of the step law, defined on the whole real line.
    pub fn cdf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        let a = self.alpha.get();
        match &self.family {
            Family::SymmetricPoint { scale } => {
                if t >= *scale {
                    1.0
                } else if t >= -*scale {
                    0.5
                } else {
                    0.0
                }
            }
            Family::SymmetricPareto => {
                if t >= 1.0 {
                    1.0 - 0.5 * t.powf(-2.0 * a)
                } else if t > -1.0 {
                    0.5
                } else {
                    0.5 * (-t).powf(-2.0 * a)
                }
            }
            Family::KendallStable { m_alpha } => {
                if t > 0.0 {
                    let w = m_alpha * t.powf(-a);
                    0.5 + 0.5 * (1.0 + w) * (-w).exp()
                } else if t == 0.0 {
                    0.5
                } else {
                    let w = m_alpha * (-t).powf(-a);
                    0.5 - 0.5 * (1.0 + w) * (-w).exp()
                }
            }
            Family::Tabulated(tb) => {
                if t >= 0.0 {
                    tb.cdf_pos(t)
                } else {
                    1.0 - tb.cdf_pos(-t)
                }
            }
        }
    }

    /// Williamson transform `G(t) = integral of (1 - |x/t|^alpha)_+ dnu(x)`
    /// for `t > 0`.
    pub fn williamson_g(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(KendallError::Domain(format!(
                "williamson transform is evaluated at t > 0, got {t}"
            )));
        }
        Ok(self.g_unchecked(t))
    }

    /// `H(t) = 2 F(t) - 1 - G(t)`, the normalized truncated moment
    /// `t^{-alpha} integral of |x|^alpha over [-t, t]`, for `t > 0`.
    pub fn h_fn(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(KendallError::Domain(format!("H is evaluated at t > 0, got {t}")));
        }
        Ok(self.h_unchecked(t))
    }

    pub(crate) fn g_unchecked(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        let a = self.alpha.get();
        match &self.family {
            Family::SymmetricPoint { scale } => {
                let r = (scale / t).powf(a);
                if r >= 1.0 {
                    0.0
                } else {
                    1.0 - r
                }
            }
            Family::SymmetricPareto => {
                if t <= 1.0 {
                    0.0
                } else {
                    let r = 1.0 - t.powf(-a);
                    r * r
                }
            }
            Family::KendallStable { m_alpha } => (-m_alpha * t.powf(-a)).exp(),
            Family::Tabulated(tb) => tb.williamson_g(a, t),
        }
    }

    pub(crate) fn h_unchecked(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        let a = self.alpha.get();
        match &self.family {
            Family::SymmetricPoint { scale } => {
                if t >= *scale {
                    (scale / t).powf(a)
                } else {
                    0.0
                }
            }
            Family::SymmetricPareto => {
                if t <= 1.0 {
                    0.0
                } else {
                    let r = t.powf(-a);
                    2.0 * r * (1.0 - r)
                }
            }
            Family::KendallStable { m_alpha } => {
                let w = m_alpha * t.powf(-a);
                w * (-w).exp()
            }
            Family::Tabulated(tb) => {
                (2.0 * tb.cdf_pos(t) - 1.0 - tb.williamson_g(a, t)).max(0.0)
            }
        }
    }

    /// Moment of order `alpha`, `E|Y|^alpha`.
    pub fn moment_alpha(&self) -> MomentAlpha {
        let a = self.alpha.get();
        let m_alpha = match &self.family {
            Family::SymmetricPoint { scale } => scale.powf(a),
            // 2 alpha * integral over [1, inf) of y^{alpha} y^{-2 alpha - 1} dy = 2.
            Family::SymmetricPareto => 2.0,
            Family::KendallStable { m_alpha } => *m_alpha,
            Family::Tabulated(tb) => tb.moment(a),
        };
        MomentAlpha { m_alpha }
    }

    /// Draws one step. The sign and the magnitude come from separate uniform
    /// variates, sign first, so the consumption pattern per draw is fixed
    /// within each family.
    pub fn sample_step(&self, rng: &mut RngState) -> f64 {
        let sign = sign_from_uniform(rng.next_uniform());
        sign * self.sample_magnitude(rng)
    }

    /// Draws `|Y|`. Uniform variates consumed: two-point 0, Pareto 1,
    /// stable 2, tabulated 1.
    pub(crate) fn sample_magnitude(&self, rng: &mut RngState) -> f64 {
        let a = self.alpha.get();
        match &self.family {
            Family::SymmetricPoint { scale } => *scale,
            Family::SymmetricPareto => pareto_magnitude(a, rng.next_uniform()),
            Family::KendallStable { m_alpha } => {
                // |Y| = (m / W)^{1/alpha} with W a sum of two unit
                // exponentials: P(|Y| <= y) = P(W >= m y^-alpha)
                //            = (1 + m y^-alpha) exp(-m y^-alpha).
                let e1 = -rng.next_uniform().ln();
                let e2 = -rng.next_uniform().ln();
                let w = (e1 + e2).max(f64::MIN_POSITIVE);
                (m_alpha / w).powf(1.0 / a)
            }
            Family::Tabulated(tb) => tb.quantile_magnitude(rng.next_uniform()),
        }
    }

    /// Measure of the magnitude |Y| for numeric integration: either a finite
    /// list of atoms or a piecewise representation of the density.
    pub(crate) fn magnitude_measure(&self) -> MagnitudeMeasure {
        let a = self.alpha.get();
        match &self.family {
            Family::SymmetricPoint { scale } => MagnitudeMeasure::Atoms(vec![(*scale, 1.0)]),
            Family::SymmetricPareto => MagnitudeMeasure::Density {
                lo: 1.0,
                hi: f64::INFINITY,
                knots: vec![],
                density: Box::new(move |u: f64| {
                    if u < 1.0 {
                        0.0
                    } else {
                        2.0 * a * u.powf(-2.0 * a - 1.0)
                    }
                }),
            },
            Family::KendallStable { m_alpha } => {
                let m = *m_alpha;
                MagnitudeMeasure::Density {
                    lo: 0.0,
                    hi: f64::INFINITY,
                    knots: vec![],
                    density: Box::new(move |u: f64| {
                        if u <= 0.0 {
                            return 0.0;
                        }
                        let w = m * u.powf(-a);
                        if w > 700.0 {
                            // exp(-w) underflows; the density is zero to
                            // within f64 resolution.
                            return 0.0;
                        }
                        a * m * m * u.powf(-2.0 * a - 1.0) * (-w).exp()
                    }),
                }
            }
            Family::Tabulated(tb) => {
                let mut pieces = Vec::new();
                for j in 1..tb.ts.len() {
                    let d = (tb.fs[j] - tb.fs[j - 1]) / (tb.ts[j] - tb.ts[j - 1]);
                    if d > 0.0 {
                        pieces.push((tb.ts[j - 1], tb.ts[j], 2.0 * d));
                    }
                }
                MagnitudeMeasure::PiecewiseConstant(pieces)
            }
        }
    }
}

/// Magnitude distribution of a step law in a form the numeric convolution
/// can integrate against.
pub(crate) enum MagnitudeMeasure {
    /// `(magnitude, weight)` pairs, weights summing to one.
    Atoms(Vec<(f64, f64)>),
    /// Smooth density on `[lo, hi)`.
    Density { lo: f64, hi: f64, knots: Vec<f64>, density: Box<dyn Fn(f64) -> f64 + Sync> },
    /// Constant density values on consecutive intervals `(lo, hi, value)`.
    PiecewiseConstant(Vec<(f64, f64, f64)>),
}

impl Table {
    fn cdf_pos(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let n = self.ts.len();
        if t < self.ts[0] {
            return 0.5;
        }
        if t >= self.ts[n - 1] {
            return 1.0;
        }
        let j = self.ts.partition_point(|&x| x <= t);
        let (t0, t1) = (self.ts[j - 1], self.ts[j]);
        let (f0, f1) = (self.fs[j - 1], self.fs[j]);
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }

    /// Adaptive quadrature of `2 * integral (1 - (x/t)^alpha) dF(x)` over the
    /// positive support truncated at `t`, segment by segment so the
    /// piecewise-constant density never straddles a quadrature interval.
    fn williamson_g(&self, alpha: f64, t: f64) -> f64 {
        let n = self.ts.len();
        let hi = t.min(self.ts[n - 1]);
        if hi <= self.ts[0] {
            return 0.0;
        }
        let pieces = (n - 1) as f64;
        let mut acc = 0.0;
        for j in 1..n {
            let a0 = self.ts[j - 1];
            if a0 >= hi {
                break;
            }
            let b0 = self.ts[j].min(hi);
            let slope = (self.fs[j] - self.fs[j - 1]) / (self.ts[j] - self.ts[j - 1]);
            if slope <= 0.0 || b0 <= a0 {
                continue;
            }
            let f = |x: f64| 1.0 - (x / t).powf(alpha);
            acc += slope * quad::integrate(&f, a0, b0, TABLE_TOL / pieces, TABLE_DEPTH).value;
        }
        (2.0 * acc).clamp(0.0, 1.0)
    }

    fn moment(&self, alpha: f64) -> f64 {
        let n = self.ts.len();
        let mut acc = 0.0;
        for j in 1..n {
            let slope = (self.fs[j] - self.fs[j - 1]) / (self.ts[j] - self.ts[j - 1]);
            if slope <= 0.0 {
                continue;
            }
            let f = |x: f64| x.powf(alpha);
            acc += slope
                * quad::integrate(&f, self.ts[j - 1], self.ts[j], TABLE_TOL / (n as f64), TABLE_DEPTH)
                    .value;
        }
        2.0 * acc
    }

    /// Left-continuous inverse of the magnitude CDF `2 F - 1` at `u`.
    fn quantile_magnitude(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u <= 1.0);
        let target = 0.5 * (1.0 + u);
        let j = self.fs.partition_point(|&f| f < target);
        if j == 0 {
            return self.ts[0];
        }
        if j >= self.fs.len() {
            return self.ts[self.ts.len() - 1];
        }
        let df = self.fs[j] - self.fs[j - 1];
        if df <= 0.0 {
            return self.ts[j - 1];
        }
        self.ts[j - 1] + (target - self.fs[j - 1]) / df * (self.ts[j] - self.ts[j - 1])
    }
}

/// Recovers the CDF at `t != 0` from a Williamson transform `g` by the
/// inversion formula
/// `F(t) = [alpha (G(t) + 1) + t G'(t)] / (2 alpha)` for `t > 0`
/// (and `F(t) = 1 - F(-t)` for `t < 0`), with the derivative taken as a
/// central finite difference at relative step `1e-6`. At a point where the
/// transform has a kink the symmetric difference averages the one-sided
/// derivatives.
pub fn invert_williamson<GF: Fn(f64) -> f64>(g: GF, alpha: Alpha, t: f64) -> Result<f64> {
    if t == 0.0 || t.is_nan() {
        return Err(KendallError::Domain(format!(
            "williamson inversion is undefined at t = {t}"
        )));
    }
    let a = alpha.get();
    let tt = t.abs();
    let h = 1e-6 * tt;
    let g_minus = g(tt - h);
    let g_plus = g(tt + h);
    let g_mid = g(tt);
    if !(g_minus.is_finite() && g_plus.is_finite() && g_mid.is_finite()) {
        return Err(KendallError::Inversion(format!(
            "transform returned a non-finite value near t = {tt}"
        )));
    }
    if g_plus < g_minus - 1e-9 {
        return Err(KendallError::Inversion(format!(
            "transform is decreasing near t = {tt} ({g_minus} -> {g_plus})"
        )));
    }
    let deriv = (g_plus - g_minus) / (2.0 * h);
    let f = ((a * (g_mid + 1.0)) + tt * deriv) / (2.0 * a);
    let f = f.clamp(0.0, 1.0);
    Ok(if t > 0.0 { f } else { 1.0 - f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn uniform_magnitude_table() -> StepLaw {
        // |Y| uniform on [1, 2]: F(t) = 0.5 + 0.5 (t - 1) on [1, 2].
        StepLaw::tabulated(a(1.0), &[(1.0, 0.5), (1.5, 0.75), (2.0, 1.0)]).unwrap()
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(0.5).is_ok());
        assert!(matches!(Alpha::new(0.0), Err(KendallError::InvalidAlpha(_))));
        assert!(matches!(Alpha::new(-1.0), Err(KendallError::InvalidAlpha(_))));
        assert!(matches!(Alpha::new(f64::NAN), Err(KendallError::InvalidAlpha(_))));
        assert!(matches!(Alpha::new(f64::INFINITY), Err(KendallError::InvalidAlpha(_))));
    }

    #[test]
    fn point_law_values() {
        let law = StepLaw::symmetric_point(a(1.0), 1.0).unwrap();
        assert_eq!(law.cdf(-2.0), 0.0);
        assert_eq!(law.cdf(-1.0), 0.5);
        assert_eq!(law.cdf(0.0), 0.5);
        assert_eq!(law.cdf(0.999), 0.5);
        assert_eq!(law.cdf(1.0), 1.0);
        assert_eq!(law.williamson_g(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(law.williamson_g(2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(law.williamson_g(3.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.williamson_g(4.0).unwrap(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(law.h_fn(3.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(law.h_fn(1.0).unwrap(), 1.0);
        assert_eq!(law.h_fn(0.5).unwrap(), 0.0);
        assert_eq!(law.moment_alpha().m_alpha, 1.0);
        let law2 = StepLaw::symmetric_point(a(0.5), 2.0).unwrap();
        assert_abs_diff_eq!(law2.moment_alpha().m_alpha, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn pareto_law_values() {
        let law = StepLaw::symmetric_pareto(a(1.0));
        assert_abs_diff_eq!(law.cdf(2.0), 0.875, epsilon = 1e-15);
        assert_abs_diff_eq!(law.cdf(-2.0), 0.125, epsilon = 1e-15);
        assert_eq!(law.cdf(0.5), 0.5);
        assert_abs_diff_eq!(law.williamson_g(2.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(law.williamson_g(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(law.h_fn(2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(law.moment_alpha().m_alpha, 2.0);
    }

    #[test]
    fn stable_law_values() {
        let law = StepLaw::kendall_stable(a(1.0), 1.0).unwrap();
        let e = (-0.5f64).exp();
        assert_abs_diff_eq!(law.cdf(2.0), 0.5 + 0.75 * e, epsilon = 1e-15);
        assert_abs_diff_eq!(law.cdf(-2.0), 0.5 - 0.75 * e, epsilon = 1e-15);
        assert_abs_diff_eq!(law.williamson_g(2.0).unwrap(), e, epsilon = 1e-15);
        assert_abs_diff_eq!(law.h_fn(2.0).unwrap(), 0.5 * e, epsilon = 1e-15);
        assert_eq!(law.moment_alpha().m_alpha, 1.0);
        assert_eq!(law.cdf(0.0), 0.5);
    }

    #[test]
    fn h_matches_cdf_identity() {
        // H = 2 F - 1 - G for every family and several exponents.
        let laws = [
            StepLaw::symmetric_point(a(0.5), 1.5).unwrap(),
            StepLaw::symmetric_pareto(a(2.0)),
            StepLaw::kendall_stable(a(0.5), 2.0).unwrap(),
            uniform_magnitude_table(),
        ];
        for law in &laws {
            for &t in &[0.3, 0.9, 1.0, 1.3, 2.0, 5.0, 25.0] {
                let lhs = law.h_fn(t).unwrap();
                let rhs = 2.0 * law.cdf(t) - 1.0 - law.williamson_g(t).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tabulated_matches_uniform_magnitude() {
        // For |Y| uniform on [1, 2] and alpha = 1:
        //   G(t) = 1 - E|Y|/t = 1 - 1.5/t          for t >= 2,
        //   G(t) = (t - 1)^2 / (2 t)               for 1 <= t <= 2,
        // and m_alpha = E|Y| = 1.5.
        let law = uniform_magnitude_table();
        assert_abs_diff_eq!(law.williamson_g(3.0).unwrap(), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(law.williamson_g(2.0).unwrap(), 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(law.williamson_g(1.5).unwrap(), 0.25 / 3.0, epsilon = 1e-9);
        assert_eq!(law.williamson_g(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(law.moment_alpha().m_alpha, 1.5, epsilon = 1e-9);
        assert_abs_diff_eq!(law.cdf(1.25), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(law.cdf(-1.25), 0.375, epsilon = 1e-15);
        assert_eq!(law.cdf(3.0), 1.0);
        assert_eq!(law.cdf(-3.0), 0.0);
    }

    #[test]
    fn tabulated_validation_rejects_bad_grids() {
        let e = StepLaw::tabulated(a(1.0), &[(1.0, 0.5)]);
        assert!(matches!(e, Err(KendallError::InvalidTable(_))));
        let e = StepLaw::tabulated(a(1.0), &[(1.0, 0.5), (1.0, 1.0)]);
        assert!(matches!(e, Err(KendallError::InvalidTable(_))));
        let e = StepLaw::tabulated(a(1.0), &[(1.0, 0.5), (2.0, 0.4)]);
        assert!(matches!(e, Err(KendallError::InvalidTable(_))));
        let e = StepLaw::tabulated(a(1.0), &[(1.0, 0.6), (2.0, 1.0)]);
        assert!(matches!(e, Err(KendallError::InvalidTable(_))));
        let e = StepLaw::tabulated(a(1.0), &[(1.0, 0.5), (2.0, 0.9)]);
        assert!(matches!(e, Err(KendallError::InvalidTable(_))));
        let e = StepLaw::tabulated(a(1.0), &[(-1.0, 0.5), (2.0, 1.0)]);
        assert!(matches!(e, Err(KendallError::InvalidTable(_))));
    }

    #[test]
    fn williamson_rejects_nonpositive_argument() {
        let law = StepLaw::symmetric_pareto(a(1.0));
        assert!(law.williamson_g(0.0).is_err());
        assert!(law.williamson_g(-1.0).is_err());
        assert!(law.h_fn(0.0).is_err());
    }

    #[test]
    fn inversion_recovers_cdfs() {
        let point = StepLaw::symmetric_point(a(1.0), 1.0).unwrap();
        for &t in &[1.5, 3.0, 10.0] {
            let f = invert_williamson(|u| point.g_unchecked(u), a(1.0), t).unwrap();
            assert_abs_diff_eq!(f, 1.0, epsilon = 1e-9);
        }
        let f = invert_williamson(|u| point.g_unchecked(u), a(1.0), 0.5).unwrap();
        assert_abs_diff_eq!(f, 0.5, epsilon = 1e-12);

        let pareto = StepLaw::symmetric_pareto(a(1.0));
        let f = invert_williamson(|u| pareto.g_unchecked(u), a(1.0), 2.0).unwrap();
        assert_abs_diff_eq!(f, 0.875, epsilon = 1e-9);
        let f = invert_williamson(|u| pareto.g_unchecked(u), a(1.0), -2.0).unwrap();
        assert_abs_diff_eq!(f, 0.125, epsilon = 1e-9);

        let stable = StepLaw::kendall_stable(a(0.5), 2.0).unwrap();
        for &t in &[0.7, 2.0, 9.0] {
            let f = invert_williamson(|u| stable.g_unchecked(u), a(0.5), t).unwrap();
            assert_abs_diff_eq!(f, stable.cdf(t), epsilon = 1e-9);
        }
    }

    #[test]
    fn inversion_rejects_bad_inputs() {
        assert!(invert_williamson(|_| 0.5, a(1.0), 0.0).is_err());
        let r = invert_williamson(|u| 1.0 / u, a(1.0), 2.0);
        assert!(matches!(r, Err(KendallError::Inversion(_))));
    }

    #[test]
    fn samplers_hit_their_supports() {
        let mut rng = RngState::new(7);
        let point = StepLaw::symmetric_point(a(1.0), 2.0).unwrap();
        let mut seen_neg = false;
        let mut seen_pos = false;
        for _ in 0..200 {
            let y = point.sample_step(&mut rng);
            assert!(y == 2.0 || y == -2.0);
            seen_neg |= y < 0.0;
            seen_pos |= y > 0.0;
        }
        assert!(seen_neg && seen_pos);

        let pareto = StepLaw::symmetric_pareto(a(0.5));
        for _ in 0..200 {
            let y = pareto.sample_step(&mut rng);
            assert!(y.abs() >= 1.0);
        }

        let stable = StepLaw::kendall_stable(a(1.0), 1.0).unwrap();
        for _ in 0..200 {
            let y = stable.sample_step(&mut rng);
            assert!(y.is_finite() && y != 0.0);
        }

        let table = uniform_magnitude_table();
        for _ in 0..200 {
            let y = table.sample_step(&mut rng);
            assert!((1.0..=2.0).contains(&y.abs()));
        }
    }

    #[test]
    fn tabulated_quantile_is_inverse_of_cdf() {
        let law = uniform_magnitude_table();
        if let Family::Tabulated(tb) = &law.family {
            for &u in &[0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
                let x = tb.quantile_magnitude(u);
                assert_abs_diff_eq!(2.0 * tb.cdf_pos(x) - 1.0, u, epsilon = 1e-12);
            }
        } else {
            unreachable!();
        }
    }
}

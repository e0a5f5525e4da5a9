//! Adaptive Simpson quadrature for piecewise-smooth integrands.
//!
//! The integrands in this crate are smooth between a small number of known
//! break points (support edges, indicator boundaries, grid knots of a
//! tabulated law), so the driver accepts an explicit knot list and runs an
//! adaptive Simpson refinement on every sub-interval.

/// Outcome of an adaptive quadrature run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: f64,
    /// Largest per-interval error estimate that was left unresolved when the
    /// depth limit was hit; zero when every interval converged.
    pub unresolved: f64,
}

impl QuadResult {
    #[cfg(test)]
    pub fn converged(&self) -> bool {
        self.unresolved == 0.0
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    unresolved: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // The factor 15 comes from the Richardson error model of Simpson's rule.
    if delta.abs() <= 15.0 * tol || b - a < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        let missed = delta.abs() / 15.0;
        if missed > *unresolved {
            *unresolved = missed;
        }
        return left + right + delta / 15.0;
    }
    let half = 0.5 * tol;
    refine(f, a, m, fa, flm, fm, left, half, depth - 1, unresolved)
        + refine(f, m, b, fm, frm, fb, right, half, depth - 1, unresolved)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> QuadResult {
    if !(b > a) {
        return QuadResult { value: 0.0, unresolved: 0.0 };
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let mut unresolved = 0.0;
    let value = refine(f, a, b, fa, fm, fb, whole, tol, max_depth, &mut unresolved);
    QuadResult { value, unresolved }
}

/// Integrates `f` over `[lo, hi]`, splitting at the interior knots so each
/// smooth piece is refined independently. Knots outside `(lo, hi)` are
/// ignored; the list does not need to be deduplicated.
pub(crate) fn integrate_with_knots(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    knots: &[f64],
    tol: f64,
    max_depth: u32,
) -> QuadResult {
    if !(hi > lo) {
        return QuadResult { value: 0.0, unresolved: 0.0 };
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(knots.len() + 2);
    cuts.push(lo);
    for &k in knots {
        if k > lo && k < hi {
            cuts.push(k);
        }
    }
    cuts.push(hi);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let pieces = (cuts.len() - 1).max(1);
    let piece_tol = tol / pieces as f64;
    let mut value = 0.0;
    let mut unresolved: f64 = 0.0;
    for w in cuts.windows(2) {
        let r = integrate(f, w[0], w[1], piece_tol, max_depth);
        value += r.value;
        unresolved = unresolved.max(r.unresolved);
    }
    QuadResult { value, unresolved }
}

//! Cross-checks of the fluctuation laws: closed ladder-epoch forms against
//! the kernel recurrence, coefficient normalization, the extrema laws
//! against epoch sums and reflection, and the ladder-height marginal
//! against the summed joint law.

use kendall::{
    joint_ladder_cdf, ladder_epoch_coeffs, ladder_epoch_pmf, ladder_height_cdf, max_cdf, min_cdf,
    Alpha, Mode, StepLaw,
};

fn alpha(v: f64) -> Alpha {
    Alpha::new(v).unwrap()
}

fn epoch_catalog() -> Vec<StepLaw> {
    let mut laws = Vec::new();
    for av in [0.5, 1.0, 2.0] {
        laws.push(StepLaw::symmetric_point(alpha(av), 1.0).unwrap());
        laws.push(StepLaw::symmetric_pareto(alpha(av)));
        laws.push(StepLaw::kendall_stable(alpha(av), 1.0).unwrap());
    }
    laws
}

#[test]
fn closed_epoch_pmf_matches_the_recurrence() {
    for law in epoch_catalog() {
        for a in [1.5, 3.0] {
            for n in 1..=60u32 {
                let closed = ladder_epoch_pmf(&law, a, n, Mode::Closed).unwrap();
                let rec = ladder_epoch_pmf(&law, a, n, Mode::Recurrence).unwrap();
                assert!(
                    (closed.value - rec.value).abs() <= 1e-9,
                    "{} a = {a}, n = {n}: {} vs {}",
                    law.family_name(),
                    closed.value,
                    rec.value
                );
                assert!(rec.value >= -1e-15, "pmf must be nonnegative");
            }
        }
    }
}

#[test]
fn epoch_coefficients_are_normalized() {
    // A + B + C telescopes the total epoch mass, so it must equal one
    // whenever the coefficients are defined.
    for law in epoch_catalog() {
        for a in [1.5, 3.0] {
            match ladder_epoch_coeffs(&law, a) {
                Ok(c) => {
                    let total = c.a_coef + c.b_coef + c.c_coef;
                    assert!(
                        (total - 1.0).abs() <= 1e-12,
                        "{} a = {a}: A + B + C = {total}",
                        law.family_name()
                    );
                }
                // Levels sitting on the removable singularity are allowed
                // to refuse the closed coefficients.
                Err(_) => continue,
            }
        }
    }
}

#[test]
fn epoch_pmf_pins_at_the_unit_point_law() {
    // P(tau_3 = 2) = 1/18 for the unit two-point law with alpha = 1.
    let law = StepLaw::symmetric_point(alpha(1.0), 1.0).unwrap();
    for mode in [Mode::Closed, Mode::Recurrence] {
        let p = ladder_epoch_pmf(&law, 3.0, 2, mode).unwrap().value;
        assert!((p - 1.0 / 18.0).abs() <= 1e-15, "mode {mode:?}: {p}");
    }
}

#[test]
fn zero_level_epochs_are_exactly_geometric() {
    for law in [
        StepLaw::symmetric_pareto(alpha(0.7)),
        StepLaw::kendall_stable(alpha(1.3), 0.4).unwrap(),
    ] {
        for n in 1..=30u32 {
            let p = ladder_epoch_pmf(&law, 0.0, n, Mode::Closed).unwrap().value;
            assert!(
                (p - 0.5f64.powi(n as i32)).abs() < 1e-15,
                "{} n = {n}: {p}",
                law.family_name()
            );
        }
    }
}

#[test]
fn running_maximum_is_the_epoch_survival_function() {
    // P(max_{k <= n} X_k <= t) equals 1 minus the summed epoch pmf at
    // level t, for every horizon.
    for law in epoch_catalog() {
        for t in [1.5, 3.0, 7.0] {
            let mut epoch_sum = 0.0;
            for n in 1..=40u32 {
                epoch_sum += ladder_epoch_pmf(&law, t, n, Mode::Recurrence).unwrap().value;
                let max_p = max_cdf(&law, n, t, Mode::Closed).unwrap().value;
                assert!(
                    (max_p - (1.0 - epoch_sum)).abs() <= 1e-10,
                    "{} t = {t}, n = {n}: {max_p} vs {}",
                    law.family_name(),
                    1.0 - epoch_sum
                );
            }
        }
    }
}

#[test]
fn minimum_law_reflects_the_maximum_law() {
    // P(min_{k <= n} X_k < t) = 1 - P(max_{k <= n} X_k <= -t) for t < 0:
    // the walk's sign is symmetric, and the complement of a weak maximum
    // bound is a strict minimum bound for the reflected path.
    for law in epoch_catalog() {
        for t in [-1.2, -3.0, -8.5] {
            for n in 1..=25u32 {
                let min_p = min_cdf(&law, n, t).unwrap();
                let max_p = max_cdf(&law, n, -t, Mode::Closed).unwrap().value;
                assert!(
                    (min_p - (1.0 - max_p)).abs() <= 1e-9,
                    "{} t = {t}, n = {n}: {min_p} vs {}",
                    law.family_name(),
                    1.0 - max_p
                );
                assert!((0.0..=1.0).contains(&min_p));
            }
        }
    }
}

#[test]
fn zero_level_height_marginal_is_the_summed_joint_law() {
    // At level zero the joint law has a closed form in n; summing it over
    // n must reproduce the marginal height CDF. The tail beyond n = 50 is
    // bounded by 2^{-50}, far below the comparison tolerance.
    let laws = [
        StepLaw::symmetric_point(alpha(1.0), 1.0).unwrap(),
        StepLaw::symmetric_pareto(alpha(1.0)),
        StepLaw::kendall_stable(alpha(0.5), 1.0).unwrap(),
    ];
    for law in &laws {
        for t in [0.4, 1.0, 2.0, 6.0] {
            let marginal = ladder_height_cdf(law, 0.0, t).unwrap().value;
            let mut summed = 0.0;
            for n in 1..=50u32 {
                summed += joint_ladder_cdf(law, 0.0, n, t, Mode::Closed).unwrap().value;
            }
            assert!(
                (marginal - summed).abs() <= 1e-10,
                "{} t = {t}: {marginal} vs {summed}",
                law.family_name()
            );
        }
    }
}

#[test]
fn height_marginal_pin_at_the_unit_point_law() {
    // P(X_{tau_0} <= 2) = 7/9 for the unit two-point law with alpha = 1.
    let law = StepLaw::symmetric_point(alpha(1.0), 1.0).unwrap();
    let p = ladder_height_cdf(&law, 0.0, 2.0).unwrap().value;
    assert!((p - 7.0 / 9.0).abs() <= 1e-12, "got {p}");
}

#[test]
fn joint_ladder_closed_form_matches_the_recurrence() {
    for law in epoch_catalog() {
        for a in [1.5, 3.0] {
            for offset in [0.0, 0.5, 2.0, 9.0] {
                let t = a + offset * a / 1.5;
                for n in 1..=30u32 {
                    let closed = joint_ladder_cdf(&law, a, n, t, Mode::Closed).unwrap();
                    let rec = joint_ladder_cdf(&law, a, n, t, Mode::Recurrence).unwrap();
                    assert!(
                        (closed.value - rec.value).abs() <= 1e-9,
                        "{} a = {a}, t = {t}, n = {n}: {} vs {}",
                        law.family_name(),
                        closed.value,
                        rec.value
                    );
                    assert!(rec.value >= -1e-12 && rec.value <= 1.0 + 1e-12);
                }
            }
        }
    }
}

#[test]
fn joint_ladder_sums_to_the_height_marginal_at_positive_levels() {
    // The n-sum of the joint law converges to the marginal; with
    // G(a) <= 3/4 on these points the truncation error at n = 400 is
    // negligible against the tolerance.
    let laws = [
        StepLaw::symmetric_pareto(alpha(1.0)),
        StepLaw::kendall_stable(alpha(1.0), 1.0).unwrap(),
    ];
    for law in &laws {
        for (a, t) in [(1.5, 2.0), (1.5, 6.0), (3.0, 4.5)] {
            let marginal = ladder_height_cdf(law, a, t).unwrap().value;
            let mut summed = 0.0;
            for n in 1..=400u32 {
                summed += joint_ladder_cdf(law, a, n, t, Mode::Recurrence).unwrap().value;
            }
            assert!(
                (marginal - summed).abs() <= 1e-9,
                "{} a = {a}, t = {t}: {marginal} vs {summed}",
                law.family_name()
            );
        }
    }
}

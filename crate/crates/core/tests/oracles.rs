//! Values frozen from independent computations (exact integer recurrences,
//! closed forms, high-precision quadrature) and the worked examples the
//! modules are expected to reproduce.

use std::sync::{Arc, OnceLock};

use lsign::errfun::{
    classify_branch, geometric_grid, verify_lemma25, Branch, ErrorFunction, BRANCH_BAND,
};
use lsign::meanvalue::{
    compare_moments, corollary24_envelope, hall_tenenbaum_check, mean_constant, MomentKind,
};
use lsign::multfun::{expand_coefficients_par, PrimePowerRule};
use lsign::piltz::{piltz_rule, piltz_table};
use lsign::primes::FactorSieve;
use lsign::satake::{delta_form, CoefficientSource, DeltaExpansion};
use lsign::signs::{
    cauchy_schwarz_report, count_signs_exact, hypothesis_h_partial, theorem1_lower_bound,
    HypothesisForm, SignPart,
};

fn sieve() -> &'static FactorSieve {
    static S: OnceLock<FactorSieve> = OnceLock::new();
    S.get_or_init(|| FactorSieve::new(10_000_000).unwrap())
}

fn delta() -> &'static (Arc<DeltaExpansion>, CoefficientSource) {
    static D: OnceLock<(Arc<DeltaExpansion>, CoefficientSource)> = OnceLock::new();
    D.get_or_init(|| {
        let e = Arc::new(DeltaExpansion::new(1_000_000).unwrap());
        let s = CoefficientSource::from_form(&delta_form(e.clone())).unwrap();
        (e, s)
    })
}

#[test]
fn tau_against_integer_product_expansion() {
    // q∏(1 − qⁿ)^24 expanded with exact integers
    let n = 300;
    let mut c = vec![0i128; n + 1];
    c[0] = 1;
    for k in 1..=n {
        for _ in 0..24 {
            for i in (k..=n).rev() {
                c[i] -= c[i - k];
            }
        }
    }
    let d = DeltaExpansion::new(n as u64).unwrap();
    for m in 1..=n {
        assert_eq!(d.tau(m as u64).unwrap(), c[m - 1], "τ({m})");
    }
}

#[test]
fn tau_near_the_top_of_the_range() {
    let (d, _) = delta();
    // Hecke multiplicativity and the prime-square relation far from the
    // small values that a product expansion can check directly
    let t = |n: u64| d.tau(n).unwrap();
    assert_eq!(t(2 * 499_979), t(2) * t(499_979));
    let p: u64 = 997;
    assert_eq!(t(p * p), t(p) * t(p) - (p as i128).pow(11));
    assert_eq!(t(1000 * 999), t(1000) * t(999));
}

#[test]
fn squarefree_constant_is_inverse_zeta_two() {
    let c = mean_constant(&PrimePowerRule::squarefree(), 1.0, 1_000_000, sieve()).unwrap();
    assert!((c.value - 0.607_927_101_854_026_6).abs() < 1e-4);
}

#[test]
fn constant_stability_within_tail() {
    for (rule, kappa) in [(PrimePowerRule::squarefree(), 1.0), (piltz_rule(0.5).unwrap(), 0.5)] {
        let cs: Vec<_> = [10_000, 100_000, 1_000_000]
            .iter()
            .map(|&p| mean_constant(&rule, kappa, p, sieve()).unwrap())
            .collect();
        for w in cs.windows(2) {
            let change = (w[1].value.ln() - w[0].value.ln()).abs();
            assert!(change <= w[0].tail_magnitude + 1e-14, "{} : {change} vs {}", rule.label(), w[0].tail_magnitude);
            assert!(w[1].tail_magnitude <= w[0].tail_magnitude + 1e-15);
        }
    }
}

#[test]
fn moment_ratios() {
    let s = sieve();
    let r = ErrorFunction::power(0.5).unwrap();
    let one = compare_moments(MomentKind::Sum, &PrimePowerRule::constant_one(), 1.0, &r, &[1e3, 1e6], s).unwrap();
    assert!(one.ratios().iter().all(|q| (q - 1.0).abs() < 1e-3));
    let d = compare_moments(MomentKind::Sum, &PrimePowerRule::divisor(), 2.0, &r, &[1e7], s).unwrap();
    let q = d.points[0].ratio;
    let gamma = 0.577_215_664_901_532_9;
    assert!((1.0..=1.03).contains(&q));
    assert!((q - (1.0 + (2.0 * gamma - 1.0) / 1e7f64.ln())).abs() < 1e-3);
    let sf = compare_moments(MomentKind::Sum, &PrimePowerRule::squarefree(), 1.0, &r, &[1e7], s).unwrap();
    assert!((sf.points[0].ratio - 1.0).abs() < 1e-3);
}

#[test]
fn ratio_oscillation_shrinks() {
    let s = sieve();
    let r = ErrorFunction::power(0.5).unwrap();
    let xs = [1e4, 1e5, 1e6, 1e7];
    for (rule, kappa) in [(PrimePowerRule::squarefree(), 1.0), (PrimePowerRule::divisor(), 2.0)] {
        let q = compare_moments(MomentKind::Sum, &rule, kappa, &r, &xs, s).unwrap().ratios();
        let steps: Vec<f64> = q.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(steps.windows(2).all(|w| w[1] < w[0]), "{}: {steps:?}", rule.label());
    }
}

#[test]
fn hall_tenenbaum_divisor_estimated() {
    let rep = hall_tenenbaum_check(&PrimePowerRule::divisor(), None, 1e4, sieve()).unwrap();
    assert!(rep.estimated && rep.slack > 0.0);
}

#[test]
fn corollary_envelopes() {
    let s = sieve();
    let one = corollary24_envelope(&PrimePowerRule::constant_one(), 1.0, &[1e4, 1e5], s).unwrap();
    assert!((one - 1.0).abs() < 1e-12);
    let d = corollary24_envelope(&PrimePowerRule::divisor(), 2.0, &[1e4, 1e5, 1e6, 1e7], s).unwrap();
    assert!(d <= 1.1, "{d}");
    // λ_Δ²/d₂ has mean exponent κ = 1/2
    let (_, src) = delta();
    let rule = src.lambda_rule().squared().divided_by(&PrimePowerRule::divisor()).non_negative();
    let t = expand_coefficients_par(&rule, 1_000_000, s).unwrap();
    let env = lsign::meanvalue::normalized_envelope(&t, 0.5, &[1e4, 1e5, 1e6]).unwrap();
    let each: Vec<f64> = [1e4, 1e5, 1e6]
        .iter()
        .map(|&x| lsign::meanvalue::normalized_envelope(&t, 0.5, &[x]).unwrap())
        .collect();
    assert!(env.is_finite() && each.iter().all(|v| (v / each[0] - 1.0).abs() < 0.1), "{each:?}");
}

#[test]
fn sign_lower_bound_at_three_scales() {
    let (d, _) = delta();
    for x in [1e4, 1e5, 1e6] {
        let c = count_signs_exact(d, x).unwrap();
        assert!(c.n_plus.min(c.n_minus) as f64 >= theorem1_lower_bound(2, x).unwrap());
    }
}

#[test]
fn cauchy_schwarz_at_1e5() {
    let (d, _) = delta();
    let table = d.table();
    for part in [SignPart::Plus, SignPart::Minus] {
        let r = cauchy_schwarz_report(&table, 2, 1e5, part).unwrap();
        assert!(r.holds);
        assert!(r.l > 0.0);
        assert!(r.q_over_x <= r.q_bound, "{} > {}", r.q_over_x, r.q_bound);
    }
}

#[test]
fn hypothesis_h_increments_decrease() {
    let (_, src) = delta();
    for nu in [2, 3] {
        for form in [HypothesisForm::Strong, HypothesisForm::Weak] {
            let v: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
                .iter()
                .map(|&x| hypothesis_h_partial(src, nu, x, form, sieve()).unwrap())
                .collect();
            let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
            assert!(inc.windows(2).all(|w| w[1] < w[0]), "ν={nu} {form:?}: {inc:?}");
        }
    }
}

#[test]
fn half_order_convolution() {
    let half = piltz_table(0.5, 10_000, sieve()).unwrap();
    let one = lsign::multfun::dirichlet_convolve(&half, &half).unwrap();
    assert!(one.values()[1..].iter().all(|v| (v - 1.0).abs() < 1e-9));
}

#[test]
fn branch_is_stable_under_refinement() {
    for s in ["power:1", "log-power:1,0", "log-power:1,2", "loglog-power:0.5", "exp-loglog-power:1", "exp-sqrt-log:1"] {
        let r = ErrorFunction::parse(s).unwrap();
        let coarse = classify_branch(&r, &geometric_grid(1e3, 1e12, 16).unwrap(), BRANCH_BAND).unwrap();
        let fine = classify_branch(&r, &geometric_grid(1e3, 1e12, 64).unwrap(), BRANCH_BAND).unwrap();
        assert_eq!(coarse.branch, fine.branch, "{s}");
    }
}

#[test]
fn single_log_functional_is_smaller() {
    let r = ErrorFunction::log_power(1.0, 0.0).unwrap();
    assert_eq!(r.branch(), Branch::AscendsToOne);
    for x in [1e6, 1e9, 1e12] {
        assert!(r.log_error_functional(x).unwrap() <= r.error_functional(x).unwrap());
    }
}

#[test]
fn r0_derivative_matches_finite_difference() {
    for s in ["log-power:1,0", "log-power:1,0.5", "exp-loglog-power:1"] {
        let r0 = ErrorFunction::parse(s).unwrap().derive_r0().unwrap();
        for z in geometric_grid(1e3, 1e12, 12).unwrap() {
            let u = z.ln();
            let h = 1e-6;
            let fd = (r0.ln_value((u * (1.0 + h)).exp()) - r0.ln_value((u * (1.0 - h)).exp())) / (2.0 * h);
            assert!((fd - r0.rplus(z)).abs() <= 1e-6 * r0.rplus(z).abs(), "{s} at {z}");
        }
    }
}

#[test]
fn lemma25_examples() {
    let zs = geometric_grid(1e3, 1e12, 40).unwrap();
    let r = ErrorFunction::exp_sqrt_log(1.0).unwrap();
    let rep = verify_lemma25(&r, &zs).unwrap();
    assert!(rep.max_constant()[1].is_finite() && rep.drift()[1] < 2.0);
    let sq = ErrorFunction::log_power(2.0, 0.0).unwrap();
    assert_eq!(sq.branch(), Branch::Other);
    let rep = verify_lemma25(&sq, &zs).unwrap();
    assert!(rep.drift()[2] < 2.0);
}

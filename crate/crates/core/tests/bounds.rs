use periodic_loss::stochastic::{
    fourier_bound_exponential, fourier_bound_general, self_convolve, sup_distance_to_uniform,
    wrap_density, GeneralDensity, DEFAULT_TERMS,
};
use periodic_loss::theory::{
    covariance_report, theorem1_bound, variance_upper_bound, ActiveBound, BoundInputs,
};
use periodic_loss::Error;

/// `|f_j - 1/p| <= (2/p) sum_n |g(n)|^j <= 2 C alpha^j / p` for `j >= 2`.
#[test]
fn doubled_bound_dominates_wrapped_sums() {
    for (rate, p) in [(10.0, 1.0), (1.0, 2.0), (0.5, 24.0), (3.0, 5.0)] {
        let fb = fourier_bound_exponential(rate, p, DEFAULT_TERMS).unwrap();
        let w = wrap_density(&GeneralDensity::Exponential { rate }, p, 4096).unwrap();
        for j in 2..=30 {
            let d = sup_distance_to_uniform(&self_convolve(&w, j).unwrap());
            let bound = 2.0 * theorem1_bound(j, &fb, p).unwrap();
            assert!(
                d <= bound + 1e-6 / p,
                "rate {rate} p {p} j {j}: {d} > {bound}"
            );
        }
    }
}

#[test]
fn single_bound_fails_for_few_terms() {
    // the j = 1 distance is the peak of the wrapped density, far above C alpha / p
    let fb = fourier_bound_exponential(10.0, 1.0, DEFAULT_TERMS).unwrap();
    let w = wrap_density(&GeneralDensity::Exponential { rate: 10.0 }, 1.0, 4096).unwrap();
    let d1 = sup_distance_to_uniform(&w);
    assert!(d1 > 3.0 * theorem1_bound(1, &fb, 1.0).unwrap());
    // and holds once the leading mode dominates
    for j in 5..=30 {
        let d = sup_distance_to_uniform(&self_convolve(&w, j).unwrap());
        assert!(d <= theorem1_bound(j, &fb, 1.0).unwrap(), "j {j}");
    }
}

#[test]
fn uniform_inter_arrivals_give_zero_constants() {
    let p = 24.0;
    let fb = fourier_bound_general(
        &GeneralDensity::Uniform {
            low: 0.0,
            high: 2.0 * p,
        },
        p,
        500,
    )
    .unwrap();
    assert_eq!((fb.alpha, fb.c), (0.0, 0.0));
    let b = BoundInputs::new(&fb, 1.0 / p, p, 6.0, 4.75, 9.0).unwrap();
    // phases are exactly uniform, so the cycle losses are uncorrelated
    let r = covariance_report(3, 4, &b).unwrap();
    assert_eq!(r.paper, 0.0);
    assert_eq!(
        variance_upper_bound(10, &b).unwrap(),
        (4.75f64.powi(2) * 9.0 - 36.0) / 10.0
    );
}

#[test]
fn covariance_report_uses_the_smaller_bound() {
    let b = BoundInputs::exponential(
        0.019,
        24.0,
        6.383,
        4.75,
        2.0 / 0.47f64.powi(2),
        DEFAULT_TERMS,
    )
    .unwrap();
    for (j, k) in [(1, 1), (1, 50), (20, 20), (50, 50)] {
        let r = covariance_report(j, k, &b).unwrap();
        assert_eq!(r.value, r.paper.min(r.trivial));
        assert_eq!(r.active == ActiveBound::Paper, r.paper <= r.trivial);
    }
    // far apart the bound vanishes geometrically
    let near = covariance_report(2, 2, &b).unwrap();
    let far = covariance_report(20, 20, &b).unwrap();
    assert!(
        far.paper >= 0.0 && far.paper < 1e-15 * near.paper.max(1.0),
        "{} {}",
        near.paper,
        far.paper
    );
}

#[test]
fn variance_bound_scales_like_one_over_n() {
    let b = BoundInputs::exponential(
        0.019,
        24.0,
        6.383,
        4.75,
        2.0 / 0.47f64.powi(2),
        DEFAULT_TERMS,
    )
    .unwrap();
    let v: Vec<f64> = [10, 100, 1000, 10_000]
        .iter()
        .map(|&n| variance_upper_bound(n, &b).unwrap())
        .collect();
    for w in v.windows(2) {
        assert!((w[0] / w[1] - 10.0).abs() < 0.05, "{v:?}");
    }
}

#[test]
fn non_contracting_inputs_rejected() {
    let fb = fourier_bound_exponential(1.0, 1.0, 100).unwrap();
    let mut bad = fb;
    bad.alpha = 1.0;
    assert!(matches!(
        BoundInputs::new(&bad, 1.0, 1.0, 1.0, 1.0, 1.0),
        Err(Error::NonContracting { .. })
    ));
}

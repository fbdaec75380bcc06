use proptest::prelude::*;
use ringsqueeze::cavity_io::{
    jsi, output_moments, output_transfer, variance_extrema, Detunings, OutputMoments, SeedAmplitudes,
};
use ringsqueeze::interferometer::{
    critical_length, improvement_factor, mzi_transform, GaussianPortState, SensorSpec,
};
use ringsqueeze::params::{derive_rates, efficiency, fwm_gain, sigma_from_power, RingGeometry};
use ringsqueeze::{CavityRatesF64, InjectionF64, PhysicalConstantsF64};

fn reference() -> (RingGeometry<f64>, PhysicalConstantsF64) {
    (RingGeometry::si3n4_reference(), PhysicalConstantsF64::codata2018())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn rates_strategy() -> impl Strategy<Value = CavityRatesF64> {
    (1e6f64..1e10, 0.0f64..1e10).prop_map(|(k, g)| CavityRatesF64::from_decay(k, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn extraction_rate_scales_inversely_with_length(scale in 0.1f64..10.0) {
        let (geom, c) = reference();
        let mut longer = geom;
        longer.ring_length *= scale;
        let k0 = derive_rates(&geom, &c).unwrap().kappa();
        let k1 = derive_rates(&longer, &c).unwrap().kappa();
        prop_assert!(rel(k0, k1 * scale) < 1e-12);
    }

    #[test]
    fn efficiency_is_multiplicative(alpha in 0.0f64..2.0, l1 in 0.0f64..20.0, l2 in 0.0f64..20.0) {
        let joint = efficiency(alpha, l1 + l2);
        prop_assert!(rel(joint, efficiency(alpha, l1) * efficiency(alpha, l2)) < 1e-12);
    }

    #[test]
    fn injection_is_linear_in_power(p in 1e-6f64..1e-1, factor in 0.1f64..10.0) {
        let (geom, c) = reference();
        let rates = derive_rates(&geom, &c).unwrap();
        let g = fwm_gain(&geom, &c).unwrap().g;
        let w = c.angular_frequency(geom.lambda_p);
        let a = sigma_from_power(p, &rates, g, w, 0.0, &c).unwrap().normalized();
        let b = sigma_from_power(p * factor, &rates, g, w, 0.0, &c).unwrap().normalized();
        prop_assert!(rel(b, a * factor) < 1e-12);
    }

    #[test]
    fn uncertainty_product_at_least_one(rates in rates_strategy(), sn in 0.0f64..0.999) {
        let inj = InjectionF64::from_normalized(sn, &rates).unwrap();
        let (sq, anti) = variance_extrema(&rates, &inj).unwrap();
        prop_assert!(sq * anti >= 1.0 - 1e-9, "{}", sq * anti);
        prop_assert!(sq <= 1.0 + 1e-12 && anti >= 1.0 - 1e-12);
    }

    #[test]
    fn lossless_cavity_is_minimum_uncertainty(k in 1e6f64..1e10, sn in 0.0f64..0.999) {
        let rates = CavityRatesF64::from_decay(k, 0.0).unwrap();
        let inj = InjectionF64::from_normalized(sn, &rates).unwrap();
        let (sq, anti) = variance_extrema(&rates, &inj).unwrap();
        prop_assert!((sq * anti - 1.0).abs() < 1e-9 * anti.max(1.0));
    }

    #[test]
    fn pair_moments_are_physical_and_symmetric(
        rates in rates_strategy(),
        sn in 0.0f64..0.999,
        ds in -3.0f64..3.0,
        di in -3.0f64..3.0,
    ) {
        let inj = InjectionF64::from_normalized(sn, &rates).unwrap();
        let det = Detunings::new(ds * rates.total(), di * rates.total());
        let m = output_moments(&rates, &inj, &det, &SeedAmplitudes::vacuum()).unwrap();
        prop_assert!(rel(m.n_s, m.n_i) < 1e-12);
        prop_assert!(m.m_si.norm_sqr() <= m.n_s * (m.n_s + 1.0) * (1.0 + 1e-9));
    }

    #[test]
    fn closed_forms_match_scattering(
        rates in rates_strategy(),
        sn in 0.0f64..0.99,
        ds in -2.0f64..2.0,
        di in -2.0f64..2.0,
    ) {
        let inj = InjectionF64::from_normalized(sn, &rates).unwrap();
        let det = Detunings::new(ds * rates.total(), di * rates.total());
        let closed = output_moments(&rates, &inj, &det, &SeedAmplitudes::vacuum()).unwrap();
        let numeric = output_transfer(&rates, &inj, &det).unwrap().moments(&SeedAmplitudes::vacuum());
        let scale = closed.n_s.max(closed.m_si.norm()).max(1e-300);
        prop_assert!((closed.n_s - numeric.n_s).abs() <= 1e-8 * scale);
        prop_assert!((closed.m_si - numeric.m_si).norm() <= 1e-8 * scale);
    }

    #[test]
    fn jsi_symmetric_under_pair_exchange(sn in 0.0f64..0.999, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (geom, c) = reference();
        let rates = derive_rates(&geom, &c).unwrap();
        let inj = InjectionF64::from_normalized(sn, &rates).unwrap();
        let t = rates.total();
        let x = jsi(&rates, &inj, a * t, b * t).unwrap();
        let y = jsi(&rates, &inj, b * t, a * t).unwrap();
        prop_assert!(rel(x, y) < 1e-10);
    }

    #[test]
    fn pair_flux_grows_with_pump(rates in rates_strategy(), a in 0.0f64..0.998, step in 1e-4f64..1e-3) {
        let b = (a + step).min(0.999);
        let at = |s: f64| {
            let inj = InjectionF64::from_normalized(s, &rates).unwrap();
            let m = output_moments(&rates, &inj, &Detunings::zero(), &SeedAmplitudes::vacuum()).unwrap();
            let (_, anti) = variance_extrema(&rates, &inj).unwrap();
            (m.n_s, anti)
        };
        let (n0, v0) = at(a);
        let (n1, v1) = at(b);
        prop_assert!(n1 > n0 || (a == 0.0 && n1 >= n0));
        prop_assert!(v1 >= v0);
    }

    #[test]
    fn lossless_interferometer_conserves_photons(
        phi in -6.3f64..6.3,
        alpha in 0.0f64..1e4,
        n in 0.0f64..1e3,
        offset in -3.2f64..3.2,
    ) {
        let m = (n * (n + 1.0)).sqrt();
        let pair = OutputMoments { n_s: n, n_i: n, m_si: num_complex::Complex64::new(m, 0.0), ..OutputMoments::vacuum() };
        let input = GaussianPortState::coherent(num_complex::Complex64::new(alpha, 0.0)).with_squeezed_port(&pair, offset);
        let spec = SensorSpec::new(phi, 1.0, alpha).unwrap();
        let out = mzi_transform(&input, &spec).unwrap();
        let total = input.total_photons();
        prop_assert!((out.total_photons() - total).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn critical_length_inverse_in_loss(alpha in 1e-3f64..10.0) {
        let l = critical_length(alpha).unwrap();
        prop_assert!(rel(critical_length(2.0 * alpha).unwrap(), l / 2.0) < 1e-15);
        prop_assert!(rel(efficiency(alpha, l), (-2.0f64).exp()) < 1e-12);
    }

    #[test]
    fn short_sensor_improvement_grows_with_decay_ratio(lo in 1.0f64..500.0, factor in 1.01f64..4.0) {
        let (geom, c) = reference();
        let rates = derive_rates(&geom, &c).unwrap();
        let spec = SensorSpec::new(std::f64::consts::FRAC_PI_2, 1.0, 1e5).unwrap();
        let at = |dr: f64| {
            let r = rates.with_decay_ratio(dr).unwrap();
            let inj = InjectionF64::from_normalized(0.99895, &r).unwrap();
            improvement_factor(&spec, &r, &inj).unwrap()
        };
        prop_assert!(at(lo * factor) > at(lo));
    }
}

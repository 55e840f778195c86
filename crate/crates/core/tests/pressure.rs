mod common;

use common::{carpet, mcmullen, random_markov, random_model, random_probability, rng};
use proptest::prelude::*;
use rand::Rng;
use weighted_thermo::equilibrium::{InvariantMeasure, WeightedGibbsMeasure};
use weighted_thermo::pressure::{
    cascaded_sums, pressure, pressure_closed_form_depth1, pressure_enclosure, pressure_function,
    PressureOptions,
};
use weighted_thermo::{FactorChain, FiniteDepth, Potential, PushMode, WeightVector, Workers};

fn enumerate_opts() -> PressureOptions {
    PressureOptions {
        push_mode: PushMode::Enumerate,
        ..Default::default()
    }
}

#[test]
fn carpet_enclosure_contains_mcmullen() {
    let (chain, a) = carpet();
    let zero = FiniteDepth::zero(0, 3);
    let e = pressure_enclosure(&zero.into(), &chain, &a, &enumerate_opts()).unwrap();
    assert_eq!(e.n_used, 12);
    assert!(e.contains(mcmullen()));
    assert!(e.width() <= 0.05, "{e:?}");
}

#[test]
fn disguised_depth_enclosure_contains_closed_form() {
    for seed in 0..10 {
        let (chain, a, phi) = random_model(seed);
        let closed = pressure_closed_form_depth1(&phi, &chain, &a).unwrap().estimate;
        let wide = phi.broadcast(2).unwrap();
        let e = pressure(&wide, &chain, &a, &Default::default()).unwrap();
        assert!(e.contains(closed), "seed {seed}: {closed} not in {e:?}");
        assert!((e.estimate - closed).abs() < 1e-6, "seed {seed}: {e:?} vs {closed}");
    }
}

#[test]
fn workers_do_not_change_bits() {
    let chain = FactorChain::new(vec![3, 2], vec![vec![0, 1, 1]]).unwrap();
    let a = WeightVector::new(vec![0.7, 0.4]).unwrap();
    let phi = FiniteDepth::new(0, 3, 2, vec![0.1, 0.5, -0.3, 0.9, 0.0, 0.2, -0.7, 0.4, 0.3]).unwrap();
    let run = |workers| {
        let opts = PressureOptions {
            workers,
            n_max: 10,
            ..Default::default()
        };
        pressure(&phi, &chain, &a, &opts).unwrap()
    };
    let seq = run(Workers::Sequential);
    let par = run(Workers::Parallel);
    assert_eq!(seq.estimate.to_bits(), par.estimate.to_bits());
    assert_eq!(seq.lo.to_bits(), par.lo.to_bits());
    assert_eq!(seq.hi.to_bits(), par.hi.to_bits());
}

#[test]
fn zero_potential_scales_with_weights() {
    for seed in 0..20 {
        let (chain, a, _) = random_model(seed);
        let zero = FiniteDepth::zero(0, chain.alphabet_size(0));
        let base = pressure(&zero, &chain, &a, &Default::default()).unwrap().estimate;
        for lambda in [0.25, 3.0, 17.5] {
            let scaled = pressure(&zero, &chain, &a.scaled(lambda).unwrap(), &Default::default())
                .unwrap()
                .estimate;
            assert!((scaled - lambda * base).abs() < 1e-12 * scaled.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn upper_bounds_nonincreasing(seed in any::<u64>(), depth in 1usize..=2) {
        let (chain, a, phi) = random_model(seed);
        let phi = if depth == 2 {
            let na = chain.alphabet_size(0);
            let mut r = rng(seed ^ 0x5eed);
            FiniteDepth::new(0, na, 2, (0..na * na).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
        } else {
            phi
        };
        let p: Potential = phi.into();
        let opts = PressureOptions { n_max: 8, ..enumerate_opts() };
        let sums = cascaded_sums(&p, &chain, &a, &opts).unwrap();
        let c = sums.constant;
        let ub: Vec<f64> = sums.s.iter().enumerate().map(|(i, s)| (s + c) / (i + 1) as f64).collect();
        for pair in ub.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-9, "{ub:?}");
        }
    }

    #[test]
    fn variational_inequality(seed in any::<u64>()) {
        let (chain, a, phi) = random_model(seed);
        let p = pressure(&phi, &chain, &a, &Default::default()).unwrap().estimate;
        let mu = WeightedGibbsMeasure::new(&phi, &chain, &a, &Default::default()).unwrap();
        let eq = mu.as_bernoulli().unwrap();
        let at_eq = eq.expectation(&phi).unwrap() + eq.weighted_entropy(&chain, &a).unwrap().value;
        prop_assert!((at_eq - p).abs() < 1e-9);
        let mut r = rng(seed.wrapping_add(1));
        let na = chain.alphabet_size(0);
        for _ in 0..10 {
            let eta = InvariantMeasure::bernoulli(random_probability(&mut r, na)).unwrap();
            let v = eta.expectation(&phi).unwrap() + eta.weighted_entropy(&chain, &a).unwrap().value;
            prop_assert!(v <= p + 1e-9);
        }
        for _ in 0..3 {
            let eta = random_markov(&mut r, na);
            let h = eta.weighted_entropy(&chain, &a).unwrap();
            prop_assert!(eta.expectation(&phi).unwrap() + h.lo <= p + 1e-9);
        }
    }

    #[test]
    fn analytic_gradient_matches_differences(seed in any::<u64>()) {
        let (chain, a, phi) = random_model(seed);
        let mut r = rng(seed ^ 7);
        let psi = FiniteDepth::depth_one(0, (0..chain.alphabet_size(0)).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let phis = [phi, psi];
        let q = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        let s = pressure_function(&phis, &chain, &a, &q, &Default::default(), &Default::default()).unwrap();
        let h = 1e-4;
        for i in 0..2 {
            let at = |t: f64| {
                let mut qq = q;
                qq[i] += t;
                weighted_thermo::pressure::pressure_value(&phis, &chain, &a, &qq, &Default::default())
                    .unwrap()
                    .estimate
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            prop_assert!((fd - s.gradient[i]).abs() <= 1e-5);
        }
    }
}

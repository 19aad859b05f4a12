use num_complex::Complex64 as C64;
use qwalk_core::coins::CoinSpec;
use qwalk_core::graphs::{build_lattice, build_line, LatticeKind};
use qwalk_core::walk::{prepare, run, CoinField, InitialCoinState, Observer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn line_run(coin: &CoinSpec, init: &InitialCoinState, steps: usize, obs: &[Observer]) -> qwalk_core::observables::ObservableSeries {
    let g = build_line(steps.max(1)).unwrap();
    let field = CoinField::from_spec(&g, coin, None).unwrap();
    let start = g.center().unwrap();
    run(prepare(&g, start, init).unwrap(), &field, steps, obs, start).unwrap()
}

/// Sums amplitudes over every coin history `c_0 … c_t`; the walker moves
/// left on L (index 0) and right on R (index 1) after each coin toss.
fn path_sum(coin: [[C64; 2]; 2], init: [C64; 2], t: usize) -> Vec<f64> {
    let mut amp = vec![[C64::new(0.0, 0.0); 2]; 2 * t + 1];
    for c0 in 0..2 {
        for history in 0..1usize << t {
            let mut a = init[c0];
            let mut prev = c0;
            let mut x = t as i64;
            for k in 0..t {
                let c = (history >> k) & 1;
                a *= coin[c][prev];
                x += if c == 1 { 1 } else { -1 };
                prev = c;
            }
            amp[x as usize][prev] += a;
        }
    }
    amp.iter().map(|z| z[0].norm_sqr() + z[1].norm_sqr()).collect()
}

#[test]
fn distribution_matches_path_sum() {
    let r = |x: f64| C64::new(x, 0.0);
    let (a, b) = (0.2f64.sqrt(), 0.8f64.sqrt());
    let coins = [
        (CoinSpec::Hadamard, [[r(S), r(S)], [r(S), r(-S)]]),
        (CoinSpec::Bias { rho: 0.2 }, [[r(a), r(b)], [r(b), r(-a)]]),
    ];
    let starts = [
        (InitialCoinState::symmetric(), [r(S), C64::new(0.0, S)]),
        (InitialCoinState::Bias { eta: 1.0, beta: 0.0 }, [r(1.0), r(0.0)]),
        (InitialCoinState::Bias { eta: 0.3, beta: 1.1 }, [r(0.3f64.sqrt()), C64::from_polar(0.7f64.sqrt(), 1.1)]),
    ];
    for (spec, matrix) in &coins {
        for (init, vector) in &starts {
            for t in 0..=10 {
                let engine = line_run(spec, init, t, &[Observer::Distribution]);
                let got = engine.distributions()[t];
                let radius = t.max(1);
                let want = path_sum(*matrix, *vector, t);
                for (i, p) in got.iter().enumerate() {
                    let x = i as i64 - radius as i64;
                    let w = if x.unsigned_abs() as usize <= t { want[(x + t as i64) as usize] } else { 0.0 };
                    assert!((p - w).abs() < 1e-12, "{spec} {init} t={t} x={x}: {p} vs {w}");
                }
            }
        }
    }
}

#[test]
fn phased_coin_matches_biased_coin_with_shifted_start() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let rho: f64 = rng.gen_range(0.0..=1.0);
        let theta: f64 = rng.gen_range(0.0..=std::f64::consts::PI);
        let phi: f64 = rng.gen_range(0.0..=std::f64::consts::PI);
        let eta: f64 = rng.gen_range(0.0..=1.0);
        let beta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let general = line_run(
            &CoinSpec::General { rho, theta, phi },
            &InitialCoinState::Bias { eta, beta },
            50,
            &[Observer::Distribution],
        );
        let biased = line_run(
            &CoinSpec::Bias { rho },
            &InitialCoinState::Bias { eta, beta: beta + theta },
            50,
            &[Observer::Distribution],
        );
        for (p, q) in general.distributions().iter().zip(biased.distributions()) {
            for (x, y) in p.iter().zip(q) {
                assert!((x - y).abs() < 1e-10, "rho={rho} theta={theta} phi={phi}");
            }
        }
    }
}

#[test]
fn norm_holds_over_five_thousand_steps() {
    let s = line_run(&CoinSpec::Hadamard, &InitialCoinState::symmetric(), 5000, &[]);
    for r in s.records() {
        assert!((r.norm - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn sites_of_wrong_parity_stay_empty() {
    let s = line_run(&CoinSpec::Hadamard, &InitialCoinState::symmetric(), 60, &[Observer::Distribution]);
    for (t, p) in s.distributions().iter().enumerate() {
        for (i, &q) in p.iter().enumerate() {
            if (i + t) % 2 == 1 {
                assert_eq!(q, 0.0);
            }
        }
    }
    let g = build_lattice(LatticeKind::Cartesian4, 12).unwrap();
    let field = CoinField::from_spec(&g, &CoinSpec::Grover { d: 4 }, None).unwrap();
    let c = g.center().unwrap();
    let s = run(prepare(&g, c, &InitialCoinState::UniformOverPorts).unwrap(), &field, 11, &[Observer::Distribution], c).unwrap();
    for (t, p) in s.distributions().iter().enumerate() {
        for (v, &q) in p.iter().enumerate() {
            let (x, y) = g.position(v).unwrap();
            if (x + y + t as i64).rem_euclid(2) == 1 {
                assert_eq!(q, 0.0);
            }
        }
    }
}

#[test]
fn unbiased_coin_extremes() {
    let sigma_x = CoinSpec::Bias { rho: 0.0 };
    let left = line_run(&sigma_x, &InitialCoinState::Bias { eta: 1.0, beta: 0.0 }, 100, &[Observer::Entropy]);
    assert!(left.entropies().iter().all(|e| e.abs() <= 1e-12));
    let sym = line_run(&sigma_x, &InitialCoinState::symmetric(), 100, &[Observer::Entropy]);
    for (t, e) in sym.entropies().iter().enumerate() {
        let want = if t % 2 == 1 { 1.0 } else { 0.0 };
        assert!((e - want).abs() <= 1e-10, "t={t}: {e}");
    }
}

#[test]
fn hadamard_entanglement_settles_near_its_asymptote() {
    let s = line_run(&CoinSpec::Hadamard, &InitialCoinState::symmetric(), 1000, &[Observer::Entropy]);
    let e = s.entropies();
    let mean = e[900..=1000].iter().sum::<f64>() / 101.0;
    assert!((mean - 0.872).abs() < 0.01, "{mean}");
    assert!(e.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
}

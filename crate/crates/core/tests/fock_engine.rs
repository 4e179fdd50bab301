use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use remote_hom::analytic::benchmark::{D1, D2, FOUR_FOLD, SIGNAL_PAIR};
use remote_hom::analytic::{EnsembleParams, ExperimentConfig, PolarizationConfig, Site};
use remote_hom::fock::{
    build_experiment_state, experiment_clicks, experiment_clicks_mixed, Detector, FockState, MixedState, ModeLabel,
    ModeRegistry, OpticalCircuit,
};

fn modes(names: &[&str], cutoff: usize) -> ModeRegistry {
    ModeRegistry::new(names.iter().map(|n| ModeLabel::named(n)).collect(), cutoff).unwrap()
}

fn m(name: &str) -> ModeLabel {
    ModeLabel::named(name)
}

/// `exp(K)` by scaling and squaring of a truncated Taylor series.
fn expm(k: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = k.len();
    let norm: f64 = k.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = 0.5f64.powi(squarings);
    let a: Vec<Vec<f64>> = k.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| {
        let mut z = vec![vec![0.0; n]; n];
        for i in 0..n {
            for l in 0..n {
                if x[i][l] != 0.0 {
                    for j in 0..n {
                        z[i][j] += x[i][l] * y[l][j];
                    }
                }
            }
        }
        z
    };
    let mut result: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut term = result.clone();
    for p in 1..30 {
        term = mul(&term, &a);
        for row in &mut term {
            for x in row.iter_mut() {
                *x /= p as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result
}

/// Pair-number distribution of the squeezed vacuum from the generator
/// `r (a†b† - ab)` restricted to the ladder `|n, n>`, n < 60.
fn tmsv_oracle(r: f64) -> Vec<f64> {
    let dim = 60;
    let mut k = vec![vec![0.0; dim]; dim];
    for n in 0..dim - 1 {
        k[n + 1][n] = r * (n + 1) as f64;
        k[n][n + 1] = -r * (n + 1) as f64;
    }
    let u = expm(&k);
    (0..dim).map(|n| u[n][0] * u[n][0]).collect()
}

#[test]
fn hom_dip_for_single_photons() {
    let mut s = FockState::number_state(modes(&["a", "b"], 2), &[1, 1]).unwrap();
    s.apply_beamsplitter(&m("a"), &m("b"), 0.5).unwrap();
    let d = s
        .click_probabilities(&[Detector::new("1", vec![m("a")]), Detector::new("2", vec![m("b")])])
        .unwrap();
    assert!(d.probabilities[3] < 1e-12);
    assert!((d.probabilities[1] - 0.5).abs() < 1e-12);
}

#[test]
fn single_photon_splits_evenly() {
    let mut s = FockState::number_state(modes(&["a", "b"], 3), &[1, 0]).unwrap();
    s.apply_beamsplitter(&m("a"), &m("b"), 0.5).unwrap();
    assert!((s.mean_photon_number(&m("a")).unwrap() - 0.5).abs() < 1e-15);
    assert!((s.mean_photon_number(&m("b")).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn zero_reflectance_keeps_occupations() {
    let mut s = FockState::number_state(modes(&["a", "b"], 3), &[2, 1]).unwrap();
    s.apply_beamsplitter(&m("a"), &m("b"), 0.0).unwrap();
    assert!((s.amplitude(&[2, 1]).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
}

#[test]
fn squeezed_vacuum_matches_matrix_exponential() {
    for r in [0.05, 0.2, 0.35, 0.5] {
        let oracle = tmsv_oracle(r);
        let mut s = FockState::vacuum(modes(&["a", "b"], 8)).unwrap();
        s.apply_two_mode_squeezer(&m("a"), &m("b"), r).unwrap();
        for n in 0..=4 {
            let p = s.amplitude(&[n, n]).unwrap().norm_sqr();
            let closed = r.tanh().powi(2 * n as i32) / r.cosh().powi(2);
            assert!((p - oracle[n]).abs() < 1e-10, "r={r} n={n}");
            assert!((p - closed).abs() < 1e-12);
        }
        let marginal = s.marginal(&m("a")).unwrap();
        for n in 0..=4 {
            assert!((marginal[n] - oracle[n]).abs() < 1e-10);
        }
        let mean_oracle: f64 = oracle.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        assert!((mean_oracle - r.sinh().powi(2)).abs() < 1e-10);
        let truncated: f64 = oracle.iter().take(9).enumerate().map(|(n, p)| n as f64 * p).sum();
        let mean = s.mean_photon_number(&m("a")).unwrap();
        assert!((mean - truncated).abs() < 1e-10, "r={r}: {mean} vs {truncated}");
    }
}

#[test]
fn squeezer_emits_pairs_only() {
    let mut s = FockState::vacuum(modes(&["a", "b", "c"], 4)).unwrap();
    s.apply_two_mode_squeezer(&m("a"), &m("b"), 0.4).unwrap();
    s.apply_two_mode_squeezer(&m("b"), &m("c"), 0.3).unwrap();
    let layout_len = 5;
    for (idx, a) in s.amplitudes().iter().enumerate() {
        if a.norm_sqr() > 0.0 {
            let (na, nb, nc) = (idx % layout_len, idx / 5 % 5, idx / 25);
            assert_eq!(na + nc, nb, "photon-number difference broken at {na} {nb} {nc}");
        }
    }
}

#[test]
fn leakage_follows_thermal_tail() {
    let r: f64 = 0.6;
    let lambda = r.tanh().powi(2);
    let leak = |cutoff: usize| {
        let mut s = FockState::vacuum(modes(&["a", "b"], cutoff)).unwrap();
        s.apply_two_mode_squeezer(&m("a"), &m("b"), r).unwrap();
        s.norm_deficit()
    };
    let (l4, l8) = (leak(4), leak(8));
    assert!((l4 - lambda.powi(5)).abs() < 1e-12);
    assert!(l8 <= l4 * lambda.powi(4) * (1.0 + 1e-9));
}

#[test]
fn passive_gates_conserve_photon_number() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let reg = modes(&["h", "v"], 4);
    let amps: Vec<Complex64> = (0..25)
        .map(|i| if i % 5 + i / 5 <= 4 { Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) } else { Complex64::new(0.0, 0.0) })
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
    let mut s = FockState::from_amplitudes(reg, amps).unwrap();
    let number = |s: &FockState| s.mean_photon_number(&m("h")).unwrap() + s.mean_photon_number(&m("v")).unwrap();
    let before = number(&s);
    s.apply_beamsplitter(&m("h"), &m("v"), 0.37).unwrap();
    s.apply_polarization_rotation(&m("h"), &m("v"), 0.9).unwrap();
    assert!((number(&s) - before).abs() < 1e-13);
    assert!((s.norm() - 1.0).abs() < 1e-13);
}

#[test]
fn loss_thins_single_photon() {
    for t in [0.0, 0.13, 0.5, 0.9, 1.0] {
        let mut s = FockState::number_state(modes(&["a"], 2), &[1]).unwrap();
        s.apply_loss(&m("a"), t).unwrap();
        let d = s.click_probabilities(&[Detector::new("D", vec![m("a")])]).unwrap();
        assert!((d.probabilities[1] - t).abs() < 1e-12);
    }
}

#[test]
fn loss_then_detection_is_binomial_thinning() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..5 {
        let reg = modes(&["a", "b"], 6);
        let amps: Vec<Complex64> = (0..49).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        let (ta, tb) = (rng.gen::<f64>(), rng.gen::<f64>());
        // Oracle: exact joint photon statistics thinned by hand.
        let mut want = [0.0; 4];
        for (idx, a) in amps.iter().enumerate() {
            let (na, nb) = (idx % 7, idx / 7);
            let qa = (1.0 - ta).powi(na as i32);
            let qb = (1.0 - tb).powi(nb as i32);
            let p = a.norm_sqr();
            want[0] += p * qa * qb;
            want[1] += p * (1.0 - qa) * qb;
            want[2] += p * qa * (1.0 - qb);
            want[3] += p * (1.0 - qa) * (1.0 - qb);
        }
        let mut s = FockState::from_amplitudes(reg, amps).unwrap();
        s.apply_loss(&m("a"), ta).unwrap();
        s.apply_loss(&m("b"), tb).unwrap();
        let det = [Detector::new("A", vec![m("a")]), Detector::new("B", vec![m("b")])];
        let got = s.click_probabilities(&det).unwrap();
        let mut rho = MixedState::from_pure(&FockState::from_amplitudes(modes(&["a", "b"], 6), s.amplitudes().to_vec()).unwrap());
        rho.apply_loss(&m("a"), ta).unwrap();
        rho.apply_loss(&m("b"), tb).unwrap();
        let kraus = rho.click_probabilities(&det).unwrap();
        for k in 0..4 {
            assert!((got.probabilities[k] - want[k]).abs() < 1e-13);
            assert!((kraus.probabilities[k] - want[k]).abs() < 1e-13);
        }
    }
}

#[test]
fn purification_matches_kraus_on_split_pair() {
    let reg = modes(&["s", "i", "vac"], 5);
    let mut c = OpticalCircuit::new();
    c.squeezer(m("s"), m("i"), 0.3)
        .loss(m("s"), 0.7)
        .loss(m("vac"), 0.2)
        .beamsplitter(m("s"), m("vac"), 0.5)
        .loss(m("vac"), 0.4)
        .squeezer(m("vac"), m("i"), 0.1);
    let det = [Detector::new("D1", vec![m("s")]), Detector::new("D2", vec![m("vac")]), Detector::new("D3", vec![m("i")])];
    let pure = c.apply(FockState::vacuum(reg.clone()).unwrap()).unwrap();
    assert!(pure.registry().len() > 3, "loss on an active mode should have been purified");
    let mixed = c.apply_mixed(MixedState::vacuum(reg).unwrap()).unwrap();
    let (p, q) = (pure.click_probabilities(&det).unwrap(), mixed.click_probabilities(&det).unwrap());
    for k in 0..8 {
        assert!((p.probabilities[k] - q.probabilities[k]).abs() < 1e-10, "pattern {k}");
    }
    assert!((p.marginal(0b011) - q.marginal(0b011)).abs() < 1e-10);
    assert!((p.leakage - q.leakage).abs() < 1e-12);
}

fn experiment(s2: f64, reflectance: f64, polarization: PolarizationConfig) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::symmetric(0.0, polarization);
    for site in &mut cfg.sites {
        site.chi = EnsembleParams::chi_for_s2(s2, site.cos_eta);
    }
    cfg.reflectance = reflectance;
    cfg
}

#[test]
fn experiment_matches_kraus_with_unequal_losses() {
    for pol in [PolarizationConfig::Parallel, PolarizationConfig::Perpendicular] {
        let mut cfg = experiment(0.04, 0.45, pol);
        cfg.sites[0].epsilon = 0.3;
        cfg.sites[1].epsilon = 0.6;
        cfg.sites[1].retrieval_efficiency = 0.8;
        let a = experiment_clicks(&cfg, 3).unwrap();
        let b = experiment_clicks_mixed(&cfg, 3).unwrap();
        for k in 0..16 {
            assert!((a.probabilities[k] - b.probabilities[k]).abs() < 1e-10, "{pol:?} pattern {k}");
        }
    }
}

#[test]
fn experiment_without_sources_is_dark() {
    let d = experiment_clicks(&experiment(0.0, 0.5, PolarizationConfig::Parallel), 4).unwrap();
    assert_eq!(d.probabilities[0], 1.0);
    assert!(d.probabilities[1..].iter().all(|&p| p == 0.0));
}

#[test]
fn two_fold_ratio_tends_to_two_thirds() {
    let mut last = f64::INFINITY;
    for s2 in [0.05, 0.01, 0.002, 4e-4] {
        let mut ratios = [0.0; 2];
        for (k, pol) in [PolarizationConfig::Parallel, PolarizationConfig::Perpendicular].into_iter().enumerate() {
            let mut cfg = experiment(s2, 0.5, pol);
            for site in &mut cfg.sites {
                site.epsilon = 1e-3;
            }
            ratios[k] = experiment_clicks(&cfg, 4).unwrap().marginal(SIGNAL_PAIR);
        }
        let dev = (ratios[0] / ratios[1] - 2.0 / 3.0).abs();
        assert!(dev < last);
        last = dev;
    }
    assert!(last < 1e-3);
}

#[test]
fn blocked_site_leaves_multiphoton_term() {
    let eps = 1e-3;
    let mut cfg = experiment(0.03, 0.4, PolarizationConfig::Parallel).with_blocked(Site::B);
    for site in &mut cfg.sites {
        site.epsilon = eps;
    }
    let p = experiment_clicks(&cfg, 6).unwrap().marginal(D1 | D2);
    let s2 = cfg.sites[0].s2();
    let w = cfg.sites[0].signal_weight() * s2;
    let analytic = 2.0 * 0.4 * 0.6 * w * w;
    assert!((p / analytic - 1.0).abs() < 3.0 * eps, "{p} vs {analytic}");
}

#[test]
fn perpendicular_differs_by_the_wave_plate_only() {
    let par = remote_hom::fock::experiment_circuit(&experiment(0.02, 0.5, PolarizationConfig::Parallel));
    let perp = remote_hom::fock::experiment_circuit(&experiment(0.02, 0.5, PolarizationConfig::Perpendicular));
    let extra: Vec<_> = perp.elements().iter().filter(|e| !par.elements().contains(e)).collect();
    assert_eq!(extra.len(), 1);
    assert!(matches!(extra[0], remote_hom::fock::Element::PolarizationRotation { .. }));
    assert_eq!(perp.elements().len(), par.elements().len() + 1);
}

#[test]
fn weak_source_fits_default_cutoff() {
    let s = build_experiment_state(&experiment(0.05, 0.5, PolarizationConfig::Perpendicular), 4).unwrap();
    assert!(s.norm_deficit() < 1e-5);
    let d = experiment_clicks(&experiment(0.05, 0.5, PolarizationConfig::Perpendicular), 4).unwrap();
    assert!((d.probabilities.iter().sum::<f64>() + d.leakage - 1.0).abs() < 1e-12);
    assert!(d.marginal(FOUR_FOLD) > 0.0);
}

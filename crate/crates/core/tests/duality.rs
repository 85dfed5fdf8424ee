use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tentropy::system::Mode;
use tentropy::tentropy::{
    oscillation_partition, phi_eps, phi_eps_bounds, tau_direct, tau_dual, tau_n, young_local_check, PartitionSearch,
};
use tentropy::varprin::{divergence_witness, young_check};
use tentropy::{fixtures, random, spectral, Functional, PartitionOfUnity, Potential};

#[test]
fn direct_route_matches_dual_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..30 {
        let atoms = rng.random_range(1..=6);
        let sys = random::system::<f64, _>(&mut rng, atoms, 0.2);
        let mu = random::polytope_measure(&mut rng, &sys);
        let search = PartitionSearch { seed: i, ..Default::default() };
        let direct = tau_direct(&sys, &mu, 3, search).unwrap().value;
        let dual = tau_dual(&sys, &mu).unwrap().value;
        assert_eq!(dual, 0.0);
        assert!((-1e-12..=1e-3).contains(&(direct - dual)), "direct {direct}");
    }
}

#[test]
fn dichotomy_on_random_functionals() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (name, sys) in fixtures::all::<f64>() {
        for i in 0..500 {
            let mu = match i % 4 {
                0 => random::polytope_measure(&mut rng, &sys),
                1 => random::probability(&mut rng, &sys),
                2 => random::functional(&mut rng, &sys, Mode::Full),
                _ => random::null_charging(&mut rng, &sys).unwrap_or_else(|| random::functional(&mut rng, &sys, Mode::Essential)),
            };
            let dual = tau_dual(&sys, &mu).unwrap();
            let witness = divergence_witness(&sys, &mu);
            if dual.value == 0.0 {
                assert!(witness.is_err(), "{name}");
            } else {
                assert_eq!(dual.value, f64::NEG_INFINITY);
                assert!(dual.descent_value.unwrap() < -1e3, "{name}: {:?} {:?} {:?}", dual.descent_value, mu, dual.defect);
                if let Ok(w) = witness {
                    assert!(w.check_ray(&sys, &mu).holds);
                } else {
                    assert!(dual.rate.unwrap() > 1e-9);
                }
            }
        }
    }
}

#[test]
fn concavity_proxy_along_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (_, sys) in fixtures::all::<f64>() {
        for _ in 0..50 {
            let a = random::polytope_measure(&mut rng, &sys);
            let b = random::polytope_measure(&mut rng, &sys);
            let t: f64 = rng.random();
            let mid = a.lerp(&b, t);
            let lhs = tau_dual(&sys, &mid).unwrap().value;
            let rhs = (1.0 - t) * tau_dual(&sys, &a).unwrap().value + t * tau_dual(&sys, &b).unwrap().value;
            assert!(lhs >= rhs - 1e-9);
        }
    }
}

#[test]
fn young_both_forms_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..300 {
        let atoms = rng.random_range(1..=6);
        let sys = random::system::<f64, _>(&mut rng, atoms, 0.2);
        let mu = random::polytope_measure(&mut rng, &sys);
        let phi: Potential<f64> = random::potential(&mut rng, atoms, 3.0);
        assert!(young_check(&sys, &phi, &mu).unwrap().holds);
        for eps in [1.0, 0.1] {
            let n = rng.random_range(1..=4);
            assert!(young_local_check(&sys, &phi, &mu, n, eps).unwrap().holds);
        }
    }
}

#[test]
fn oscillation_partition_members_have_small_oscillation() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..200 {
        let atoms = rng.random_range(1..=8);
        let sys = random::system::<f64, _>(&mut rng, atoms, 0.2);
        let phi: Potential<f64> = random::potential(&mut rng, atoms, 3.0);
        let n = rng.random_range(1..=4);
        let eps = rng.random_range(0.05..2.0);
        let d = oscillation_partition(&sys, &phi, n, eps).unwrap();
        let s = sys.birkhoff(&phi, n).unwrap();
        for g in d.members() {
            let on: Vec<usize> = (0..atoms).filter(|&x| g[x] > 0.0 && sys.is_supported(x)).collect();
            if let (Some(lo), Some(hi)) = (
                on.iter().map(|&x| s[x]).reduce(f64::min),
                on.iter().map(|&x| s[x]).reduce(f64::max),
            ) {
                assert!(hi - lo <= eps + 1e-12);
            }
        }
    }
}

#[test]
fn phi_eps_bounds_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..1000 {
        let atoms = rng.random_range(1..=6);
        let sys = random::system::<f64, _>(&mut rng, atoms, 0.2);
        let mu = random::polytope_measure(&mut rng, &sys);
        let n = rng.random_range(1..=3);
        let eps = [1.0, 0.1, 0.01][rng.random_range(0..3)];
        let d = PartitionOfUnity::atomic(atoms);
        let s = tau_n(&sys, &mu, &d, n).unwrap();
        let phi = phi_eps(&sys, &mu, &d, n, eps, &s).unwrap();
        let b = phi_eps_bounds(&sys, &mu, n, eps, &phi, &s).unwrap();
        assert!(b.holds, "{b:?}");
        let unweighted = spectral::op_norm(&sys, &Potential::zeros(atoms), n).unwrap();
        assert!(b.weighted_log_norm <= (1.0 + eps * unweighted).ln() + 1e-8);
    }
}

#[test]
fn full_mode_without_null_atoms_behaves_like_essential() {
    let sys = fixtures::twocyc::<f64>();
    let w = vec![0.25; 4];
    let a = tau_dual(&sys, &Functional::full(w.clone()).unwrap()).unwrap();
    let b = tau_dual(&sys, &Functional::essential(w).unwrap()).unwrap();
    assert_eq!(a.value, b.value);
}

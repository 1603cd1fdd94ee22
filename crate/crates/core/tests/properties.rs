mod common;

use common::{brute_force_max_gain, random_rational_ensemble};
use heatcomp_core::circuits::{examples, Circuit, Gate};
use heatcomp_core::embed::TargetWavefunction;
use heatcomp_core::engine::probability_keys;
use heatcomp_core::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn real_ensemble(r: &mut ChaCha8Rng) -> Ensemble {
    let parts = (0..r.random_range(1..=3))
        .map(|i| {
            let d = r.random_range(2..=4);
            let mut levels: Vec<f64> = (0..d).map(|_| r.random_range(0.0..3.0)).collect();
            levels.sort_by(f64::total_cmp);
            let sys = LevelSystem::new(format!("r{i}"), levels.into_iter().map(Scalar::real_f64).collect()).unwrap();
            ThermalState::new(sys, Temperature::finite(Scalar::real_f64(r.random_range(0.2..4.0))).unwrap())
        })
        .collect();
    Ensemble::new(parts)
}

fn random_circuit(r: &mut ChaCha8Rng, width: usize, len: usize) -> Circuit {
    let gates = (0..len)
        .map(|_| loop {
            let (a, b, t) = (r.random_range(0..width), r.random_range(0..width), r.random_range(0..width));
            let g = match r.random_range(0..3) {
                0 => Gate::Not(t),
                1 => Gate::Cnot { control: a, target: t },
                _ => Gate::Toffoli { c1: a.min(b), c2: a.max(b), target: t },
            };
            if g.validate(width).is_ok() {
                break g;
            }
        })
        .collect();
    Circuit::new(width, 0, gates).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_are_normalized(seed in any::<u64>()) {
        let ens = random_rational_ensemble(&mut rng(seed), 64);
        let total: Scalar = ens.probabilities().iter().cloned().sum();
        prop_assert_eq!(total, Scalar::one());
        let ens = real_ensemble(&mut rng(seed));
        let total: Scalar = ens.probabilities().iter().cloned().sum();
        prop_assert!(total.tol_eq(&Scalar::one()));
    }

    #[test]
    fn energy_and_log_weight_are_additive(seed in any::<u64>()) {
        let ens = real_ensemble(&mut rng(seed));
        for i in 0..ens.dim() {
            let s = ens.multi_index(i);
            let e: Scalar = ens.parts().iter().zip(&s).map(|(p, &j)| p.system().energy(j).clone()).sum();
            prop_assert!(ens.energy_at(i).tol_eq(&e));
            let q: Scalar = ens.parts().iter().zip(&s).map(|(p, &j)| p.log_weight(j).unwrap().clone()).sum();
            match ens.log_weight_at(i) {
                LogWeight::Finite(x) => prop_assert!(x.tol_eq(&q)),
                LogWeight::ZeroProbability => prop_assert!(false, "finite temperatures populate every state"),
            }
        }
    }

    #[test]
    fn probability_is_monotone_in_log_weight(seed in any::<u64>()) {
        let ens = real_ensemble(&mut rng(seed));
        let q: Vec<Scalar> = probability_keys(&ens).into_iter().map(|k| k.unwrap()).collect();
        for a in 0..ens.dim() {
            for b in 0..ens.dim() {
                if q[a].tol_eq(&q[b]) {
                    continue;
                }
                prop_assert_eq!(ens.probability_at(a).gt(ens.probability_at(b)), q[a].lt(&q[b]));
            }
        }
    }

    #[test]
    fn gibbs_states_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = Temperature::inverse_ln(1, r.random_range(2..6)).unwrap();
        let a: Vec<i64> = { let mut v: Vec<i64> = (0..3).map(|_| r.random_range(0..4)).collect(); v.sort(); v };
        let b: Vec<i64> = { let mut v: Vec<i64> = (0..2).map(|_| r.random_range(0..4)).collect(); v.sort(); v };
        let sys = |v: &[i64]| LevelSystem::new("s", v.iter().copied().map(Scalar::int).collect()).unwrap();
        let ens = Ensemble::new(vec![ThermalState::new(sys(&a), t.clone()), ThermalState::new(sys(&b), t.clone())]);
        let mut joint: Vec<(i64, usize)> = (0..6).map(|i| (a[i / 2] + b[i % 2], i)).collect();
        joint.sort();
        let composite = ThermalState::new(sys(&joint.iter().map(|x| x.0).collect::<Vec<_>>()), t);
        for (rank, &(_, i)) in joint.iter().enumerate() {
            prop_assert_eq!(ens.probability_at(i), composite.probability(rank));
        }
    }

    #[test]
    fn optimal_engine_beats_every_permutation(seed in any::<u64>()) {
        let ens = random_rational_ensemble(&mut rng(seed), 7);
        let r = optimal_engine(&ens);
        prop_assert_eq!(r.gain, Scalar::Exact(brute_force_max_gain(&ens)));
    }

    #[test]
    fn aligned_after_the_engine(seed in any::<u64>()) {
        let ens = random_rational_ensemble(&mut rng(seed), 64);
        let r = optimal_engine(&ens);
        let inv = r.permutation.inverse();
        let p: Vec<&Scalar> = r.orders.k_order.iter().map(|&s| ens.probability_at(inv.image(s))).collect();
        prop_assert!(p.windows(2).all(|w| !w[1].gt(w[0])));
    }

    #[test]
    fn zero_gain_iff_already_aligned(seed in any::<u64>()) {
        let ens = random_rational_ensemble(&mut rng(seed), 16);
        let aligned = (0..ens.dim()).all(|a| (0..ens.dim()).all(|b| {
            !(ens.energy_at(a).lt(ens.energy_at(b)) && ens.probability_at(a).lt(ens.probability_at(b)))
        }));
        prop_assert_eq!(optimal_engine(&ens).gain.is_zero(), aligned);
    }

    #[test]
    fn tie_breaking_does_not_change_gain(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ens = Ensemble::equal_gap_qubits(r.random_range(1..4), Temperature::inverse_ln(1, 2).unwrap(),
            r.random_range(1..3), Temperature::Zero, Scalar::one()).unwrap();
        let (orders, ties) = rank_orders(&ens);
        let mut k = orders.k_order.clone();
        let mut l = orders.l_order.clone();
        for t in &ties {
            let seq = if t.order == OrderKind::Energy { &mut k } else { &mut l };
            let pos: Vec<usize> = t.members.iter().map(|m| seq.iter().position(|x| x == m).unwrap()).collect();
            let mut shuffled = t.members.clone();
            for i in (1..shuffled.len()).rev() { shuffled.swap(i, r.random_range(0..=i)); }
            for (p, m) in pos.into_iter().zip(shuffled) { seq[p] = m; }
        }
        let mut images = vec![0; ens.dim()];
        for (a, b) in l.iter().zip(&k) { images[*a] = *b; }
        prop_assert_eq!(energy_gain(&ens, &images).unwrap(), optimal_engine(&ens).gain);
    }

    #[test]
    fn simulate_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let width = r.random_range(3..=6);
        let (la, lb) = (r.random_range(0..8), r.random_range(0..8));
        let a = random_circuit(&mut r, width, la);
        let b = random_circuit(&mut r, width, lb);
        prop_assert_eq!(simulate(&a.concat(&b)), simulate(&a).then(&simulate(&b)));
        prop_assert!(simulate(&a.concat(&a.reversed())).is_identity());
        for g in &a.gates {
            let single = Circuit::new(width, 0, vec![*g]).unwrap();
            prop_assert!(simulate(&single).pow(2).is_identity());
        }
    }

    #[test]
    fn circuits_never_beat_the_optimum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ens = Ensemble::equal_gap_qubits(3, Temperature::inverse_ln(1, 2).unwrap(), 2, Temperature::Zero, Scalar::one()).unwrap();
        let len = r.random_range(0..10);
        let c = random_circuit(&mut r, 5, len);
        prop_assert!(!circuit_gain(&c, &ens).unwrap().gt(&optimal_engine(&ens).gain));
    }

    #[test]
    fn gap_predicate_matches_optimal_engine(n_a in 1usize..=4, n_b in 1usize..=4, num in 21i64..80) {
        let ratio = Scalar::ratio(num, 20);
        let t_b = Temperature::finite(Scalar::one()).unwrap();
        let t_a = Temperature::finite(ratio.clone().into_real_mode(DEFAULT_PRECISION)).unwrap();
        let ens = Ensemble::equal_gap_qubits(n_a, t_a, n_b, t_b, Scalar::one()).unwrap();
        prop_assert_eq!(gap_engine_exists(n_a, n_b, &ratio).is_some(), optimal_engine(&ens).gain.is_positive());
    }

    #[test]
    fn embeddings_conserve_energy_and_transport_populations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ens = random_rational_ensemble(&mut r, 12);
        let mut images: Vec<usize> = (0..ens.dim()).collect();
        for i in (1..images.len()).rev() { images.swap(i, r.random_range(0..=i)); }
        let perm = Permutation::from_images(images).unwrap();
        let emb = build_embedding(&ens, &perm, 24).unwrap();
        prop_assert!(emb.check_energy_conservation().conserved);
        emb.lift().unwrap();
        let width = r.random_range(1..12);
        let psi = TargetWavefunction::uniform(24, r.random_range(-3..=3), width).unwrap();
        let g = emb.restricted_channel(&psi).unwrap();
        let d = ens.dim();
        for j in 0..d {
            prop_assert!((g.coeff[j * d + j] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn copies_of_gibbs_states_never_help(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.random_range(2..=3);
        let mut levels: Vec<i64> = (0..d).map(|_| r.random_range(0..4)).collect();
        levels.sort();
        prop_assume!(levels[0] != levels[d - 1]);
        let sys = LevelSystem::new("g", levels.iter().copied().map(Scalar::int).collect()).unwrap();
        let st = ThermalState::new(sys.clone(), Temperature::inverse_ln(1, r.random_range(2..5)).unwrap());
        let res = copies_witness(st.probabilities(), sys.levels(), 6).unwrap();
        prop_assert!(matches!(res, CopiesResult::NoneUpTo(6)));
    }
}

#[test]
fn fig2_is_the_bare_transposition() {
    assert_eq!(simulate(&examples::fig2()), Permutation::transposition(8, 0b110, 0b001));
}

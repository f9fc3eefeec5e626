//! Randomised invariants over types, foldings and height functions.

use proptest::prelude::*;
use qcombinat::kostant;
use qcombinat::lweight::{self, OmegaQ};
use qcombinat::qcartan::QuantumCartan;
use qcombinat::qdatum::{random_datum, ConvexOrder, DiagramAutomorphism, QDatum};
use qcombinat::rootsys::{CartanData, Root, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PAIRS: &[(&str, &[&[usize]])] = &[
    ("A1", &[]),
    ("A2", &[]),
    ("A3", &[]),
    ("A4", &[]),
    ("D4", &[]),
    ("D5", &[]),
    ("A3", &[&[0, 2]]),
    ("A5", &[&[0, 4], &[1, 3]]),
    ("D4", &[&[2, 3]]),
    ("D4", &[&[0, 2, 3]]),
];

const LABELS: &[&str] = &["A1", "A3", "B2", "B3", "C3", "D4", "G2", "F4", "E6"];

fn datum(pair: usize, seed: u64) -> QDatum {
    let (label, cycles) = PAIRS[pair];
    let c = CartanData::from_label(label).unwrap();
    let cycles: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
    let sigma = DiagramAutomorphism::from_cycles(c.rank(), &cycles).unwrap();
    random_datum(&c, &sigma, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn pair_index() -> impl Strategy<Value = usize> {
    0..PAIRS.len()
}

/// Indices into `PAIRS` whose commutation classes are small enough to list.
fn small_pair_index() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![0usize, 1, 2, 3, 4, 6, 8, 9])
}

fn cartan() -> impl Strategy<Value = CartanData> {
    (0..LABELS.len()).prop_map(|k| CartanData::from_label(LABELS[k]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn reflections_are_involutions(c in cartan(), i in 0usize..8, w in prop::collection::vec(-4i64..=4, 8)) {
        let i = i % c.rank();
        let w = Weight(w[..c.rank()].to_vec());
        prop_assert_eq!(c.reflect(i, &c.reflect(i, &w).unwrap()).unwrap(), w);
    }

    #[test]
    fn reflections_preserve_the_form(c in cartan(), i in 0usize..8, a in 0usize..64, b in 0usize..64) {
        let i = i % c.rank();
        let roots = c.positive_roots();
        let (x, y) = (&roots[a % roots.len()], &roots[b % roots.len()]);
        let (sx, sy) = (c.reflect_root(i, x).unwrap(), c.reflect_root(i, y).unwrap());
        prop_assert_eq!(c.root_form(&sx, &sy), c.root_form(x, y));
    }

    #[test]
    fn random_data_are_valid_with_fundamental_congruences(pair in pair_index(), seed in any::<u64>()) {
        let q = datum(pair, seed);
        prop_assert!(q.is_valid());
        for v in 0..q.rank() {
            let m = 2 * q.s(v);
            for l in 0..q.sigma.order {
                let w = q.sigma.pow_apply(v, l);
                prop_assert_eq!((q.xi[w] - q.xi[v] + 2 * i64::from(l)).rem_euclid(m), 0);
            }
        }
    }

    #[test]
    fn source_reflection_keeps_validity_and_image(pair in pair_index(), seed in any::<u64>()) {
        let q = datum(pair, seed);
        for v in q.sources() {
            let r = q.reflect_source(v).unwrap();
            prop_assert!(r.is_valid());
            prop_assert_eq!(r.adapted_word().unwrap().image(), r.image_formula());
        }
    }

    #[test]
    fn omega_tilde_is_independent_of_the_adapted_word(pair in small_pair_index(), seed in any::<u64>()) {
        let q = datum(pair, seed);
        let base = q.adapted_word().unwrap().omega_map();
        for w in q.all_adapted_words(20_000).unwrap() {
            let o = ConvexOrder::new(q.clone(), w).unwrap();
            prop_assert_eq!(o.omega_map(), base.clone());
        }
    }

    #[test]
    fn rho_is_linear(pair in pair_index(), seed in any::<u64>(), a in prop::collection::vec(-3i64..=3, 64), b in prop::collection::vec(-3i64..=3, 64)) {
        let o = datum(pair, seed).adapted_word().unwrap();
        let l = o.len();
        let (a, b) = (&a[..l], &b[..l]);
        let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let lhs = kostant::rho(&o.order, &sum);
        let rhs: Vec<i64> = kostant::rho(&o.order, a).iter().zip(kostant::rho(&o.order, b)).map(|(x, y)| x + y).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rho_separates_kostant_partitions(pair in pair_index(), seed in any::<u64>(), k in 0usize..64, t in 0usize..64) {
        let o = datum(pair, seed).adapted_word().unwrap();
        let betas = o.betas();
        let beta = betas[k % betas.len()].add(&betas[t % betas.len()]);
        let kps = kostant::enumerate(&o.order, &beta, Some(10_000)).unwrap();
        let mut rhos: Vec<Vec<i64>> = kps.iter().map(|m| kostant::rho(&o.order, &m.mults)).collect();
        rhos.sort();
        rhos.dedup();
        prop_assert_eq!(rhos.len(), kps.len());
    }

    #[test]
    fn leq_is_reflexive_and_transitive(pair in pair_index(), seed in any::<u64>(), k in 0usize..64, t in 0usize..64) {
        let o = datum(pair, seed).adapted_word().unwrap();
        let betas = o.betas();
        let beta: Root = betas[k % betas.len()].add(&betas[t % betas.len()]);
        let omega = OmegaQ::new(&o).unwrap();
        let solver = omega.solver().unwrap();
        let pis: Vec<_> = kostant::enumerate(&o.order, &beta, Some(10_000))
            .unwrap()
            .iter()
            .map(|m| omega.apply(&m.mults))
            .collect();
        let rel: Vec<Vec<bool>> = pis
            .iter()
            .map(|a| pis.iter().map(|b| solver.leq(a, b).unwrap()).collect())
            .collect();
        for x in 0..pis.len() {
            prop_assert!(rel[x][x]);
            for y in 0..pis.len() {
                for z in 0..pis.len() {
                    prop_assert!(!(rel[x][y] && rel[y][z]) || rel[x][z]);
                }
            }
        }
    }

    #[test]
    fn l_roots_lie_over_simple_roots(c in cartan(), i in 0usize..8, p in -20i64..20) {
        let i = i % c.rank();
        prop_assert_eq!(lweight::lroot(&c, i, p).cl(c.rank()), c.simple_root_weight(i));
    }

    #[test]
    fn inverse_series_inverts(c in cartan(), cutoff in 4i64..30) {
        let a = QuantumCartan::build(&c);
        let s = a.invert(cutoff).unwrap();
        prop_assert!(s.check_back_multiplication(&a).is_ok());
        prop_assert!(s.check_vanishing_below_one().is_ok());
    }

    #[test]
    fn tau_q_satisfies_its_identities(pair in pair_index(), seed in any::<u64>()) {
        let q = datum(pair, seed);
        let o = q.adapted_word().unwrap();
        let tau = q.tau_q().unwrap();
        prop_assert!(q.check_tau(&tau, &o).is_ok());
    }
}

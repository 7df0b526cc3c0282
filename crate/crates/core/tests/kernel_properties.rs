use proptest::prelude::*;
use wiener_kernels::covariance::CovarianceElement;
use wiener_kernels::generate::{self, generate_kernel, Profile};
use wiener_kernels::group::Group;
use wiener_kernels::io;
use wiener_kernels::kernel::{Kernel, Side};
use wiener_kernels::linalg::C64;

fn groups() -> Vec<Group> {
    vec![
        Group::zd(1),
        Group::zd(2),
        Group::heisenberg(),
        Group::cyclic(5),
        Group::heisenberg_mod(3),
    ]
}

fn support(g: &Group) -> Vec<wiener_kernels::group::GroupPoint> {
    g.elements().unwrap_or_else(|| g.ball(2))
}

fn random_pair(gi: usize, d: usize, seed: u64) -> (Group, Kernel, Kernel) {
    let g = groups()[gi].clone();
    let sup = support(&g);
    let mut rng = generate::rng(seed);
    let a = generate::random_kernel(&mut rng, &g, d, &sup, &sup, 0.4);
    let b = generate::random_kernel(&mut rng, &g, d, &sup, &sup, 0.4);
    (g, a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn involution_is_an_isometric_antilinear_anti_automorphism(gi in 0usize..5, d in 1usize..3, seed: u64) {
        let (_, a, b) = random_pair(gi, d, seed);
        let scale = a.envelope_norm().max(1.0) * b.envelope_norm().max(1.0);
        prop_assert_eq!(a.involution().involution(), a.clone());
        let c = C64::new(0.3, -1.1);
        prop_assert!(a.scale(c).involution().max_diff(&a.involution().scale(c.conj())) <= 1e-15 * scale);
        let ab = a.compose(&b).unwrap();
        prop_assert!(ab.involution().max_diff(&b.involution().compose(&a.involution()).unwrap()) <= 1e-12 * scale);
        prop_assert!((a.involution().envelope_norm() - a.envelope_norm()).abs() <= 1e-12 * scale);
    }

    #[test]
    fn envelope_is_submultiplicative_and_subadditive(gi in 0usize..5, d in 1usize..3, seed: u64) {
        let (_, a, b) = random_pair(gi, d, seed);
        let (na, nb) = (a.envelope_norm(), b.envelope_norm());
        prop_assert!(a.compose(&b).unwrap().envelope_norm() <= na * nb * (1.0 + 1e-12));
        prop_assert!(a.add(&b).unwrap().envelope_norm() <= (na + nb) * (1.0 + 1e-12));
        // pointwise: β_{ab} <= β_a * β_b
        let conv = a.min_envelope().convolve(&b.min_envelope()).unwrap();
        for (s, v) in a.compose(&b).unwrap().min_envelope().iter() {
            prop_assert!(v <= conv.get(s) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn operator_is_bounded_by_envelope_and_adjoint_is_involution(gi in 0usize..5, d in 1usize..3, seed: u64) {
        let (g, a, _) = random_pair(gi, d, seed);
        let mut rng = generate::rng(seed ^ 0x5eed);
        let window = g.elements().unwrap_or_else(|| g.ball(3));
        let f = generate::random_test_vector(&mut rng, &g, d, &window);
        let h = generate::random_test_vector(&mut rng, &g, d, &window);
        let af = a.apply(&f).unwrap();
        prop_assert!(af.l2_norm() <= a.envelope_norm() * f.l2_norm() * (1.0 + 1e-12));
        let lhs = af.inner(&h);
        let rhs = f.inner(&a.involution().apply(&h).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + a.envelope_norm() * f.l2_norm() * h.l2_norm()));
    }

    #[test]
    fn left_and_right_conjugations_commute(gi in 0usize..5, seed: u64,
                                           ca in prop::array::uniform3(-3i64..4), cb in prop::array::uniform3(-3i64..4)) {
        let (g, a, _) = random_pair(gi, 2, seed);
        let x = g.point(&ca[..g.arity()]).unwrap();
        let y = g.point(&cb[..g.arity()]).unwrap();
        let lr = a.conjugate_by_translation(&x, Side::Left).unwrap().conjugate_by_translation(&y, Side::Right).unwrap();
        let rl = a.conjugate_by_translation(&y, Side::Right).unwrap().conjugate_by_translation(&x, Side::Left).unwrap();
        prop_assert_eq!(&lr, &rl);
        prop_assert_eq!(lr.envelope_norm(), a.envelope_norm());
        // each side is a group action
        let xy = g.mul(&x, &y);
        let twice = a.conjugate_by_translation(&y, Side::Left).unwrap().conjugate_by_translation(&x, Side::Left).unwrap();
        prop_assert_eq!(twice, a.conjugate_by_translation(&xy, Side::Left).unwrap());
        let twice = a.conjugate_by_translation(&y, Side::Right).unwrap().conjugate_by_translation(&x, Side::Right).unwrap();
        prop_assert_eq!(twice, a.conjugate_by_translation(&xy, Side::Right).unwrap());
    }

    #[test]
    fn r_map_round_trips(gi in 0usize..5, d in 1usize..3, seed: u64) {
        let (g, a, _) = random_pair(gi, d, seed);
        prop_assert_eq!(CovarianceElement::r_inverse(&a).r_map(), a.clone());
        let sup = support(&g);
        let f = generate::random_covariance(&mut generate::rng(seed), &g, d, &sup, &sup, 0.4);
        prop_assert_eq!(CovarianceElement::r_inverse(&f.r_map()), f.clone());
        prop_assert!((f.r_map().envelope_norm() - f.l1_norm()).abs() <= 1e-12 * f.l1_norm().max(1.0));
    }

    #[test]
    fn file_formats_round_trip(gi in 0usize..5, d in 1usize..4, seed: u64, rate in 0.0f64..3.0) {
        let g = groups()[gi].clone();
        let k = generate_kernel(&g, d, seed, Profile::Exponential { rate, radius: 2 }, &g.ball(1)).unwrap().kernel;
        prop_assert_eq!(io::kernel_from_str(&io::kernel_to_string(&k)).unwrap(), k.clone());
        let env = k.min_envelope();
        prop_assert_eq!(io::envelope_from_str(&io::envelope_to_string(&env)).unwrap(), env);
        let f = CovarianceElement::r_inverse(&k);
        prop_assert_eq!(io::covariance_from_str(&io::covariance_to_string(&f)).unwrap(), f);
    }
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let g = Group::heisenberg();
    let k = generate_kernel(&g, 2, 11, Profile::Polynomial { power: 1.5, radius: 2 }, &g.ball(1))
        .unwrap()
        .kernel;
    let path = dir.path().join("k.json");
    io::write_kernel(&path, &k).unwrap();
    assert_eq!(io::read_kernel(&path).unwrap(), k);
    let env_path = dir.path().join("env.json");
    io::write_envelope(&env_path, &k.min_envelope()).unwrap();
    assert_eq!(io::read_envelope(&env_path).unwrap(), k.min_envelope());
    assert!(io::read_kernel(&dir.path().join("missing.json")).is_err());
}

#[test]
fn unit_is_neutral_on_finite_groups() {
    for g in [Group::cyclic(5), Group::heisenberg_mod(3)] {
        let (_, a, _) = random_pair(if g.order() == Some(5) { 3 } else { 4 }, 2, 3);
        let one = Kernel::unit(g.clone(), 2).unwrap();
        assert!(one.compose(&a).unwrap().max_diff(&a) <= 1e-15);
        assert!(a.compose(&one).unwrap().max_diff(&a) <= 1e-15);
        assert_eq!(one.envelope_norm(), 1.0);
    }
}

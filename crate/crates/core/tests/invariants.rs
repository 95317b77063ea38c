use nag_core::condition::{construct_minimizer, dist_to_sigma, k_local, kappa_local, local_data, mu_norm};
use nag_core::ensembles::{draw_kss_complex, draw_system, Law};
use nag_core::homology::{cech_betti, miniball};
use nag_core::homotopy::{projective_newton, quadratic_inf_norm, QuadraticSystem};
use nag_core::linalg::{normalize, projective_distance};
use nag_core::norms::linf_norm_real;
use nag_core::random::{random_orthogonal, random_unitary, stream, uniform_sphere_points, unit_vector};
use nag_core::PolySystem;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

fn real_system(seed: u64, n: usize, degrees: &[u32]) -> PolySystem<f64> {
    draw_system::<f64, _>(n, degrees, Law::KssReal, &mut stream(seed, 0)).unwrap()
}

fn shape() -> impl Strategy<Value = (usize, Vec<u32>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(1u32..=3, 1..=n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weyl_norm_is_orthogonally_invariant(seed in any::<u64>(), (n, degrees) in shape()) {
        let f = real_system(seed, n, &degrees);
        let u = random_orthogonal(&mut stream(seed, 1), n + 1);
        let g = f.compose_linear(&u);
        prop_assert!((g.weyl_norm() - f.weyl_norm()).abs() <= 1e-10 * f.weyl_norm());
    }

    #[test]
    fn certified_norm_sandwiches_sampled_values(seed in any::<u64>(), (n, degrees) in shape()) {
        prop_assume!(n <= 2);
        let f = real_system(seed, n, &degrees);
        let c = linf_norm_real(&f, 5).unwrap();
        prop_assert!(c.lower <= c.upper && c.lower >= (1.0 - 2f64.powi(-5)) * c.upper * (1.0 - 1e-12));
        for x in uniform_sphere_points(n + 1, 200, seed) {
            let v = f.eval(&x).unwrap().iter().fold(0.0f64, |m, y| m.max(y.abs()));
            prop_assert!(v <= c.upper * (1.0 + 1e-12));
        }
    }

    #[test]
    fn condition_numbers_are_scale_invariant_and_at_least_one(
        seed in any::<u64>(),
        (n, degrees) in shape(),
        lambda in prop_oneof![Just(3.0), 0.01f64..100.0],
    ) {
        let f = real_system(seed, n, &degrees);
        let x = unit_vector(&mut stream(seed, 2), n + 1);
        let a = kappa_local(&f, &x).unwrap().value;
        let b = kappa_local(&f.scale(lambda), &x).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-13 * a);
        prop_assert!(a >= 1.0 - 1e-12);
        let norm = linf_norm_real(&f, 4).unwrap();
        prop_assert!(k_local(&f, &x, &norm).unwrap().value >= 1.0);
    }

    #[test]
    fn minimizer_is_singular_and_at_the_predicted_distance(seed in any::<u64>(), (n, degrees) in shape()) {
        let f = real_system(seed, n, &degrees);
        let x = unit_vector(&mut stream(seed, 3), n + 1);
        let g = construct_minimizer(&f, &x).unwrap();
        let ld = local_data(&g, &x).unwrap();
        let scale = f.weyl_norm();
        prop_assert!(ld.residual <= 1e-9 * scale);
        prop_assert!(ld.sigma_weyl <= 1e-9 * scale);
        let d = dist_to_sigma(&f, &x).unwrap();
        let gap = f.sub(&g).unwrap().weyl_norm();
        prop_assert!((gap - d).abs() <= 1e-9 * d.max(1e-300));
    }

    #[test]
    fn mu_norm_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let degrees: Vec<u32> = (0..n).map(|i| 1 + (i as u32 % 3)).collect();
        let mut rng = stream(seed, 0);
        let f = draw_kss_complex(n, &degrees, &mut rng).unwrap();
        let u = random_unitary(&mut rng, n + 1);
        let z = nag_core::random::complex_unit_vector(&mut rng, n + 1);
        let fu = f.compose_linear(&u);
        let uz: Vec<Complex64> = (u.adjoint() * DVector::from_vec(z.clone())).iter().copied().collect();
        let a = mu_norm(&f, &z).unwrap().value;
        let b = mu_norm(&fu, &uz).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn newton_fixes_zeros_of_linear_systems(seed in any::<u64>(), n in 1usize..=4) {
        let f = draw_kss_complex(n, &vec![1; n], &mut stream(seed, 0)).unwrap();
        let z = nag_core::random::complex_unit_vector(&mut stream(seed, 1), n + 1);
        let next = projective_newton(&f, &z).unwrap();
        // One Newton step solves a linear system exactly.
        let res: f64 = f.eval(&next).unwrap().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-10 * f.weyl_norm());
        let again = projective_newton(&f, &next).unwrap();
        prop_assert!(projective_distance(&next, &again) <= 1e-10);
    }

    #[test]
    fn quadratic_surrogate_sandwich(seed in any::<u64>(), n in 1usize..=4) {
        let f = draw_kss_complex(n, &vec![2; n], &mut stream(seed, 0)).unwrap();
        let nrm = quadratic_inf_norm(&QuadraticSystem::from_system(&f).unwrap());
        prop_assert!(nrm.exact() <= nrm.surrogate * (1.0 + 1e-12));
        prop_assert!(nrm.surrogate <= (n as f64).sqrt() * nrm.exact() * (1.0 + 1e-12));
    }

    #[test]
    fn miniball_encloses_its_points(pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..9)) {
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let b = miniball(&refs);
        let mut farthest: f64 = 0.0;
        for p in &pts {
            let d = p.iter().zip(&b.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
            prop_assert!(d <= b.radius * (1.0 + 1e-9) + 1e-12);
            farthest = farthest.max(d);
        }
        // Some point lies on the boundary.
        prop_assert!(farthest >= b.radius * (1.0 - 1e-9) - 1e-12);
    }

    #[test]
    fn cech_beta0_counts_distance_components(
        pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..12),
        eps in 0.05f64..0.6,
    ) {
        // Two balls meet iff their centers are within 2ε, so β_0 is the number of components of that graph.
        let m = pts.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                i = p[i];
            }
            i
        }
        for i in 0..m {
            for j in i + 1..m {
                let d = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                if d <= 2.0 * eps {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let components = (0..m).filter(|&i| root(&mut parent, i) == i).count();
        let betti = cech_betti(&pts, eps, 2).unwrap().betti;
        prop_assert_eq!(betti.0[0], components);
    }
}

#[test]
fn normalize_and_distance_agree_on_scalar_multiples() {
    let mut rng = stream(11, 0);
    for _ in 0..50 {
        let z = nag_core::random::complex_unit_vector(&mut rng, 4);
        let phase = Complex64::from_polar(2.5, 0.7);
        let w: Vec<Complex64> = z.iter().map(|c| *c * phase).collect();
        let w = normalize(&w).unwrap();
        assert!(projective_distance(&z, &w) < 1e-7);
        assert!((nag_core::linalg::norm2(&w) - 1.0).abs() < 1e-15);
        assert!(w.iter().all(|c| c.norm().is_finite()));
    }
}

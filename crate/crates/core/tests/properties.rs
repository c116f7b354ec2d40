use crystal_zeta::dist::{
    compound_poisson_law, finite_support_to_shintani, geometric_check, shintani_distribution, CompoundPoissonLaw,
};
use crystal_zeta::lattice::{betti, is_maximal_abelian, maximal_abelian_cover, BaseGraph, LatticePoint};
use crystal_zeta::presets::{preset, PRESET_NAMES};
use crystal_zeta::verify::{brute_force_cp_pmf, empirical_cf};
use crystal_zeta::walk::{simulate, WalkSpec};
use crystal_zeta::zeta::{finite_euler_eval, finite_euler_series, FiniteEulerSpec, TruncationPolicy};
use num_complex::Complex64;
use proptest::prelude::*;

/// Nonnegative alpha, `<a_l, sigma> >= 0`, so every ratio is at most `max_alpha`.
fn euler_law(max_dim: usize, max_m: usize, max_alpha: f64) -> impl Strategy<Value = CompoundPoissonLaw> {
    (1..=max_dim, 1..=max_m).prop_flat_map(move |(d, m)| {
        (
            prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), m),
            prop::collection::vec(0.0..max_alpha, m),
            prop::collection::vec(-0.3..0.3f64, d),
        )
            .prop_map(move |(mut a, alpha, sigma)| {
                for v in &mut a {
                    if v.iter().zip(&sigma).map(|(x, s)| x * s).sum::<f64>() < 0.0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                let spec = FiniteEulerSpec::new(d, alpha, a).unwrap();
                compound_poisson_law(&spec, &sigma).unwrap()
            })
    })
}

fn t_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
}

fn complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

proptest! {
    #[test]
    fn locate_inverts_realize(which in 0..4usize, v in 0..2usize, cell in prop::collection::vec(-10..=10i64, 2)) {
        let m = preset(PRESET_NAMES[which]).unwrap();
        let r = m.realization();
        let p = LatticePoint::new(v % r.lattice().base().vertex_count(), cell[..r.dim()].to_vec());
        prop_assert_eq!(r.locate(&r.realize(&p), 1e-9).unwrap(), Some(p));
    }

    #[test]
    fn realization_is_equivariant(which in 0..4usize, v in 0..2usize, cell in prop::collection::vec(-10..=10i64, 2), g in prop::collection::vec(-5..=5i64, 2)) {
        let m = preset(PRESET_NAMES[which]).unwrap();
        let r = m.realization();
        let d = r.dim();
        let p = LatticePoint::new(v % r.lattice().base().vertex_count(), cell[..d].to_vec());
        let lhs = r.realize(&p.translated(&g[..d]));
        let rhs: Vec<f64> = r.realize(&p).iter().zip(r.translation(&g[..d])).map(|(a, b)| a + b).collect();
        for (x, y) in lhs.iter().zip(&rhs) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn maximal_cover_has_betti_rank(n in 1..6usize, parents in prop::collection::vec(any::<prop::sample::Index>(), 5), extra in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 1..6)) {
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|v| (parents[v - 1].index(v), v)).collect();
        pairs.extend(extra.iter().map(|(a, b)| (a.index(n), b.index(n))));
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let base = BaseGraph::from_pairs(&names, &pairs).unwrap();
        prop_assert_eq!(betti(&base), pairs.len() + 1 - n);
        let cover = maximal_abelian_cover(&base).unwrap();
        prop_assert_eq!(cover.dim(), betti(&base));
        prop_assert!(is_maximal_abelian(&cover));
    }

    #[test]
    fn euler_series_converges_to_product(law in euler_law(3, 4, 0.5), t in t_vec(3)) {
        let d = law.dim();
        let s: Vec<Complex64> = law.sigma().iter().zip(&t).map(|(&x, &y)| Complex64::new(x, y)).collect();
        let prod = finite_euler_eval(law.spec(), &s).unwrap();
        let series = finite_euler_series(law.spec(), &s, 80).unwrap();
        prop_assert!((series.value - prod).norm() <= series.tail_bound + 1e-12, "d = {}", d);
    }

    #[test]
    fn euler_product_conjugate_symmetry(law in euler_law(3, 4, 0.9), t in t_vec(3)) {
        let s: Vec<Complex64> = law.sigma().iter().zip(&t).map(|(&x, &y)| Complex64::new(x, y)).collect();
        let sc: Vec<Complex64> = s.iter().map(|z| z.conj()).collect();
        let z = finite_euler_eval(law.spec(), &s).unwrap();
        let zc = finite_euler_eval(law.spec(), &sc).unwrap();
        prop_assert!((z.conj() - zc).norm() <= 1e-12 * z.norm().max(1.0));
    }

    #[test]
    fn levy_measure_reproduces_cf(law in euler_law(3, 4, 0.9), t in t_vec(3)) {
        let t = &t[..law.dim()];
        let f = law.cf(t).unwrap();
        prop_assert!((law.levy().cf(t) - f).norm() <= 1e-9);
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        let zero = vec![0.0; law.dim()];
        prop_assert!((law.cf(&zero).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn geometric_check_recovers_ratios(d in 1..=3usize, alpha in prop::collection::vec(0.05..1.0f64, 3), sigma in prop::collection::vec(0.0..1.0f64, 3), noise in prop::collection::vec(-0.3..0.3f64, 9)) {
        let a: Vec<Vec<f64>> = (0..d)
            .map(|l| (0..d).map(|i| if i == l { 1.0 } else { noise[3 * l + i] }).collect())
            .collect();
        let sigma: Vec<f64> = sigma[..d].to_vec();
        let mut alpha = alpha[..d].to_vec();
        for (l, v) in a.iter().enumerate() {
            let dot: f64 = v.iter().zip(&sigma).map(|(x, s)| x * s).sum();
            // Keep the ratio below 0.95.
            alpha[l] = alpha[l].min(0.95 * dot.exp());
        }
        let spec = FiniteEulerSpec::new(d, alpha, a.clone()).unwrap();
        let law = compound_poisson_law(&spec, &sigma).unwrap();
        let mut beta = vec![Vec::new(); d];
        for atom in &law.levy().atoms {
            let row = &mut beta[atom.factor];
            if row.len() < atom.order as usize {
                row.resize(atom.order as usize, 0.0);
            }
            row[atom.order as usize - 1] = atom.weight / law.total_mass();
        }
        let g = geometric_check(&beta, &a).unwrap().unwrap();
        for (x, y) in g.ratios.iter().zip(law.ratios()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        prop_assert!(g.mixing_consistent);
    }

    #[test]
    fn finite_support_round_trip(points in prop::collection::vec(prop::collection::vec(-3..=3i32, 2), 1..6), raw in prop::collection::vec(0.01..1.0f64, 6), sigma in prop::collection::vec(0.2..1.5f64, 2)) {
        let points: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|&x| x as f64).collect()).collect();
        let mut seen = std::collections::HashSet::new();
        let points: Vec<Vec<f64>> = points.into_iter().filter(|p| seen.insert(format!("{p:?}"))).collect();
        let total: f64 = raw[..points.len()].iter().sum();
        let weights: Vec<f64> = raw[..points.len()].iter().map(|w| w / total).collect();
        let spec = finite_support_to_shintani(&points, &weights, &sigma).unwrap();
        let law = shintani_distribution(&spec, &sigma, &TruncationPolicy::default()).unwrap();
        prop_assert_eq!(law.len(), points.len());
        for (p, w) in points.iter().zip(&weights) {
            prop_assert!((law.mass_at(p) - w).abs() <= 1e-12);
        }
    }

    #[test]
    fn empirical_cf_ignores_order(xs in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2), 1..40).prop_shuffle(), t in t_vec(2)) {
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let e1 = empirical_cf(&xs, &t).unwrap();
        let e2 = empirical_cf(&sorted, &t).unwrap();
        prop_assert!((e1 - e2).norm() < 1e-12);
        prop_assert!(e1.norm() <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn oracle_cf_matches_euler_ratio(d in 1..=2usize, ints in prop::collection::vec(-2..=2i32, 6), alpha in prop::collection::vec(0.0..0.5f64, 3), t in t_vec(2)) {
        let mut a: Vec<Vec<f64>> = ints.chunks(2).map(|c| c[..d].iter().map(|&x| x as f64).collect()).collect();
        a.retain(|v: &Vec<f64>| v.iter().any(|&x| x != 0.0));
        prop_assume!(!a.is_empty());
        let m = a.len();
        let spec = FiniteEulerSpec::new(d, alpha[..m].to_vec(), a).unwrap();
        let law = compound_poisson_law(&spec, &vec![0.0; d]).unwrap();
        let oracle = brute_force_cp_pmf(&law, 20.0);
        prop_assert!((oracle.total() + oracle.deficit - 1.0).abs() <= 1e-9);
        let t = &t[..d];
        let num = finite_euler_eval(&spec, &t.iter().map(|&x| Complex64::new(0.0, x)).collect::<Vec<_>>()).unwrap();
        let den = finite_euler_eval(&spec, &complex(&vec![0.0; d])).unwrap();
        prop_assert!((oracle.cf(t) - num / den).norm() <= oracle.deficit + 1e-9);
    }

    #[test]
    fn trajectories_step_within_kernel_support(which in 0..4usize, seed in any::<u64>(), infinite in any::<bool>()) {
        let m = preset(PRESET_NAMES[which]).unwrap();
        let infinite = infinite && m.euler().is_ok();
        let spec = m.walk(infinite).unwrap();
        let runs = simulate(&spec, 20, 8, seed).unwrap();
        prop_assert_eq!(&runs, &simulate(&spec, 20, 8, seed).unwrap());
        for tr in &runs {
            for k in 0..20 {
                let step: Vec<f64> = tr.realized[k + 1].iter().zip(&tr.realized[k]).map(|(a, b)| a - b).collect();
                match &spec {
                    WalkSpec::Finite(f) => {
                        let law = f.kernel(tr.points[k].base_vertex).unwrap().law();
                        prop_assert!(law.mass_at(&step) > 0.0, "{:?} not in kernel support", step);
                    }
                    WalkSpec::Infinite(_) => {
                        // Increments are sums of -r a_l with nonnegative a_l here.
                        prop_assert!(step.iter().all(|&x| x <= 1e-12 && x.fract().abs() < 1e-9));
                    }
                }
            }
        }
    }
}

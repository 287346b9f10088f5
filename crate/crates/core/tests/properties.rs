mod common;

use std::sync::Arc;

use common::*;
use jsray_core::asymptotics::log_ratios;
use jsray_core::conformal::{glue_involution, rect_to_round_half, round_flow, Half, RoundAnnulus};
use jsray_core::extremal::{e_functional_squared, length_area_bound, proportional_to_circumferences, sup_ratio};
use jsray_core::qcmap::{affine_dilatation, dilatation_trajectory, QcMapConfig};
use jsray_core::surface::CurveFamily;
use jsray_core::surface_text::{parse_surface_spec, to_spec_text, SurfaceSpec};
use jsray_core::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

fn family(n: usize, core: usize, entries: &[Q]) -> Arc<CurveFamily<Q>> {
    let mut m = vec![vec![q(0, 1); n]; n];
    let mut it = entries.iter().cycle();
    for i in 0..n {
        for j in i + 1..n {
            if i < core && j < core {
                continue;
            }
            let v = it.next().unwrap().clone();
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    let labels = (0..n).map(|j| format!("g{j}")).collect();
    Arc::new(CurveFamily::new(labels, core, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_is_symmetric_and_bilinear(
        entries in prop::collection::vec(0i64..5, 1..10),
        a in prop::collection::vec(0i64..6, 5),
        b in prop::collection::vec(0i64..6, 5),
        c in prop::collection::vec(0i64..6, 5),
        s in 0i64..7,
    ) {
        let fam = family(5, 2, &entries.iter().map(|&e| q(e, 1)).collect::<Vec<_>>());
        let mc = |w: &[i64]| MeasuredMulticurve::new(fam.clone(), w.iter().map(|&x| q(x, 1)).collect()).unwrap();
        let (ma, mb, mcc) = (mc(&a), mc(&b), mc(&c));
        prop_assert_eq!(intersection_number(&ma, &mb).unwrap(), intersection_number(&mb, &ma).unwrap());
        let combo: Vec<i64> = a.iter().zip(&c).map(|(x, y)| s * x + y).collect();
        let lhs = intersection_number(&mc(&combo), &mb).unwrap();
        let rhs = q(s, 1) * intersection_number(&ma, &mb).unwrap() + intersection_number(&mcc, &mb).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn core_multicurves_do_not_self_intersect(w in prop::collection::vec(0i64..9, 4)) {
        let fam = Arc::new(CurveFamily::<Q>::cores(4));
        let mu = MeasuredMulticurve::new(fam, w.iter().map(|&x| q(x, 1)).collect()).unwrap();
        prop_assert_eq!(intersection_number(&mu, &mu).unwrap(), q(0, 1));
    }

    #[test]
    fn moduli_invariant_under_relabeling(
        dims in prop::collection::vec((pos_rational(6, 3), pos_rational(8, 4)), 1..=5),
        perm_seed in any::<u64>(),
    ) {
        let n = dims.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = perm_seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let identity: Vec<usize> = (0..n).collect();
        let s1 = interval_surface(&dims, &identity);
        let permuted: Vec<_> = perm.iter().map(|&p| dims[p].clone()).collect();
        let s2 = interval_surface(&permuted, &identity);
        let mut m1 = s1.moduli_vector();
        let mut m2 = s2.moduli_vector();
        m1.sort();
        m2.sort();
        prop_assert_eq!(m1, m2);
    }

    #[test]
    fn flow_scales_moduli_and_is_a_semigroup(surface in surface_strategy(1..=5), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let once = flow(&surface, s + t).unwrap();
        let twice = flow(&flow(&surface, s).unwrap(), t).unwrap();
        for ((c0, c1), c2) in surface.cylinders().iter().zip(once.cylinders()).zip(twice.cylinders()) {
            prop_assert!(rel_close(c1.modulus(), (2.0 * (s + t)).exp() * c0.modulus().to_f64(), 1e-12));
            prop_assert!(rel_close(c1.circumference, c2.circumference, 1e-12));
            prop_assert!(rel_close(c1.height, c2.height, 1e-12));
        }
        prop_assert!(rel_close(once.area(), surface.area().to_f64(), 1e-12));
    }

    #[test]
    fn endpoint_is_flow_invariant(surface in surface_strategy(1..=5), t in 0.0f64..12.0) {
        let d0 = endpoint_descriptor(&surface);
        let dt = endpoint_descriptor(&flow(&surface, t).unwrap());
        prop_assert!(endpoints_equal(&d0, &dt));
        prop_assert_eq!(d0.canonical_text(), dt.canonical_text());
    }

    #[test]
    fn endpoint_equality_is_an_equivalence(
        a in surface_strategy(1..=3),
        b in surface_strategy(1..=3),
        c in surface_strategy(1..=3),
    ) {
        let d = [endpoint_descriptor(&a), endpoint_descriptor(&b), endpoint_descriptor(&c)];
        for x in &d {
            prop_assert!(endpoints_equal(x, x));
            for y in &d {
                prop_assert_eq!(endpoints_equal(x, y), endpoints_equal(y, x));
                for z in &d {
                    if endpoints_equal(x, y) && endpoints_equal(y, z) {
                        prop_assert!(endpoints_equal(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn round_flow_semigroup(r in 0.01f64..0.99, theta in -3.0f64..3.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let w = Complex64::from_polar(r, theta);
        let lhs = round_flow(round_flow(w, s).unwrap(), t).unwrap();
        let rhs = round_flow(w, s + t).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn half_cylinder_keeps_modulus(a in 0.1f64..10.0, b in 0.1f64..10.0, x in 0.0f64..1.0) {
        let w = rect_to_round_half(Complex64::new(x * a, b / 2.0), a, b, Half::Lower);
        let annulus = RoundAnnulus::new(w.norm()).unwrap();
        prop_assert!((annulus.modulus() - b / (2.0 * a)).abs() < 1e-12);
    }

    #[test]
    fn glue_involution_is_an_involution(m in 0.05f64..3.0, r in 0.01f64..1.0, theta in -3.0f64..3.0) {
        let w = Complex64::from_polar(r, theta);
        let back = glue_involution(glue_involution(w, m).unwrap(), m).unwrap();
        prop_assert!((back - w).norm() < 1e-14);
    }

    #[test]
    fn detour_axioms(m in moduli(3..=3), mp in moduli(3..=3), mpp in moduli(3..=3), lambda in pos_rational(50, 9)) {
        let d = |x: &[Q], y: &[Q]| detour_metric(x, y).unwrap();
        prop_assert_eq!(d(&m, &mp), d(&mp, &m));
        let scaled: Vec<Q> = m.iter().map(|x| x.clone() * lambda.clone()).collect();
        prop_assert_eq!(d(&m, &scaled), 0.0);
        prop_assert!(d(&m, &mpp) <= d(&m, &mp) + d(&mp, &mpp) + 1e-12);
    }

    #[test]
    fn limit_distance_dominates_half_detour((m, mp) in moduli_pair(1..=6)) {
        let (vm, vmp) = (ModuliVector::new(m.clone()).unwrap(), ModuliVector::new(mp.clone()).unwrap());
        prop_assert!(limit_distance(&vm, &vmp).unwrap() + 1e-15 >= detour_metric(&m, &mp).unwrap() / 2.0);
    }

    #[test]
    fn limit_distance_is_half_log_of_sup_ratio((m, mp) in moduli_pair(1..=6)) {
        let (vm, vmp) = (ModuliVector::new(m.clone()).unwrap(), ModuliVector::new(mp.clone()).unwrap());
        let up = sup_ratio(&m, &mp).unwrap().finite().unwrap();
        let down = sup_ratio(&mp, &m).unwrap().finite().unwrap();
        let expected = 0.5 * up.max(down).to_f64().ln();
        prop_assert_eq!(limit_distance(&vm, &vmp).unwrap(), expected);
    }

    #[test]
    fn shifted_limit_minimum_matches_optimal_shift((m, mp) in moduli_pair(1..=6)) {
        let (vm, vmp) = (ModuliVector::new(m).unwrap(), ModuliVector::new(mp).unwrap());
        let opt = optimal_shift(&vm, &vmp).unwrap();
        let step = 1e-3;
        let logs = log_ratios(&vm, &vmp);
        let grid_min = (-6000..=6000)
            .map(|i| shifted_limit_from(&logs, i as f64 * step))
            .fold(f64::INFINITY, f64::min);
        // piecewise linear with slopes of size 1
        prop_assert!(grid_min >= opt.min_value - 1e-12);
        prop_assert!(grid_min <= opt.min_value + step);
        // convexity on a coarse grid
        let values: Vec<f64> = (-50..=50).map(|i| shifted_limit(&vm, &vmp, i as f64 * 0.1).unwrap()).collect();
        for w in values.windows(3) {
            prop_assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-12);
        }
    }

    #[test]
    fn sup_ratio_product_at_least_one((m, mp) in moduli_pair(1..=6), lambda in pos_rational(30, 7)) {
        let up = sup_ratio(&m, &mp).unwrap().finite().unwrap();
        let down = sup_ratio(&mp, &m).unwrap().finite().unwrap();
        let product = up * down;
        let (vm, vmp) = (ModuliVector::new(m.clone()).unwrap(), ModuliVector::new(mp.clone()).unwrap());
        let equivalent = modular_equivalence(&vm, &vmp).unwrap().is_some();
        prop_assert!(product >= q(1, 1));
        prop_assert_eq!(product == q(1, 1), equivalent);
        let scaled: Vec<Q> = m.iter().map(|x| x.clone() * lambda.clone()).collect();
        let up = sup_ratio(&m, &scaled).unwrap().finite().unwrap();
        let down = sup_ratio(&scaled, &m).unwrap().finite().unwrap();
        prop_assert_eq!(up * down, q(1, 1));
    }

    #[test]
    fn e_functional_is_homogeneous(m in moduli(1..=6), s in pos_rational(20, 5), seed in prop::collection::vec(0i64..9, 6)) {
        let k = m.len();
        let vm = ModuliVector::new(m).unwrap();
        let i: Vec<Q> = seed[..k].iter().map(|&x| q(x, 1)).collect();
        let scaled: Vec<Q> = i.iter().map(|x| x.clone() * s.clone()).collect();
        let lhs = e_functional_squared(&vm, &scaled).unwrap();
        let rhs = s.clone() * s * e_functional_squared(&vm, &i).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn length_area_inequality(surface in surface_strategy(1..=5), seed in prop::collection::vec(0i64..9, 5), proportional in any::<bool>()) {
        let k = surface.cylinder_count();
        let i: Vec<Q> = if proportional {
            surface.cylinders().iter().map(|c| c.circumference.clone() * q(seed[0] + 1, 2)).collect()
        } else {
            seed[..k].iter().map(|&x| q(x, 1)).collect()
        };
        let bound = length_area_bound(&surface, &i).unwrap();
        prop_assert!(bound.bound <= bound.e_squared);
        let nonzero = i.iter().any(|x| *x != q(0, 1));
        if nonzero {
            prop_assert_eq!(bound.is_tight(), proportional_to_circumferences(&surface, &i));
        }
    }

    #[test]
    fn affine_dilatation_ignores_sign_of_shear(alpha in -5.0f64..5.0, beta in 0.01f64..10.0) {
        prop_assert_eq!(affine_dilatation(-alpha, beta).unwrap(), affine_dilatation(alpha, beta).unwrap());
    }

    #[test]
    fn dilatation_converges_exponentially(
        ratio_index in 0usize..4,
        modulus in 0.2f64..2.0,
        arg in -3.0f64..3.0,
        norm in 0.5f64..3.0,
    ) {
        let ratio = [0.25, 0.5, 2.0, 4.0][ratio_index];
        let cfg = QcMapConfig::new(ratio, modulus, 0.3, Complex64::from_polar(norm, arg)).unwrap();
        let grid: Vec<f64> = (0..=12).map(|i| 1.0 + 0.5 * i as f64).collect();
        let report = dilatation_trajectory(&cfg, &grid).unwrap();
        // (K(P) - target) e^{2t} settles to a constant
        let scaled: Vec<f64> = report.rows.iter().map(|r| (r.k_p - report.limit_target) * (2.0 * r.t).exp()).collect();
        let settled = *scaled.last().unwrap();
        let bound = scaled.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        for (row, s) in report.rows.iter().zip(&scaled) {
            prop_assert!((row.k_p - report.limit_target).abs() <= bound * (-2.0 * row.t).exp() * (1.0 + 1e-12));
            if row.t >= 4.0 {
                prop_assert!((s - settled).abs() <= 0.02 * settled.abs() + 1e-6, "t={} scaled={} settled={}", row.t, s, settled);
            }
        }
        // validity is monotone along the grid
        let mut seen = false;
        for row in &report.rows {
            if seen {
                prop_assert!(row.valid);
            }
            seen |= row.valid;
        }
    }

    #[test]
    fn spec_text_round_trips(surface in surface_strategy(1..=4)) {
        let k = surface.cylinder_count();
        let fam = Arc::new(CurveFamily::new(surface.cylinders().iter().map(|c| c.label.clone()).collect(), k, (0..k).map(|_| vec![q(0, 1); k]).collect()).unwrap());
        let curve = MeasuredMulticurve::new(fam.clone(), vec![q(1, 3); k]).unwrap();
        let spec = SurfaceSpec { surface, family: fam, curves: vec![("mu".into(), curve)] };
        let again = parse_surface_spec(&to_spec_text(&spec)).unwrap();
        prop_assert_eq!(again, spec);
    }
}

fn shifted_limit_from(logs: &[f64], s: f64) -> f64 {
    jsray_core::asymptotics::shifted_limit_from_logs(logs, s)
}

#[test]
fn asymptotic_verdicts_need_equivalence_and_equal_endpoints() {
    let relations = [
        FoliationRelation::TopEquivAbsCont,
        FoliationRelation::TopEquivNotAbsCont,
        FoliationRelation::NotTopEquivZeroIntersection,
        FoliationRelation::NotTopEquivPositiveIntersection,
    ];
    let mut asymptotic = 0;
    for relation in relations {
        for bits in 0u32..64 {
            let flag = |i: u32| bits & (1 << i) != 0;
            let d = PairDescriptor {
                relation,
                jenkins_strebel: (flag(0), flag(1)),
                uniquely_ergodic: flag(2),
                critical_graph_has_closed_loops: flag(3),
                modularly_equivalent: flag(4),
                endpoints_equal: flag(5),
            };
            if let Ok(v) = classify(&d) {
                assert!(v.is_consistent());
                if v.outcome == Outcome::Asymptotic && d.jenkins_strebel.0 {
                    asymptotic += 1;
                    assert!(d.modularly_equivalent && d.endpoints_equal);
                }
            }
        }
    }
    assert!(asymptotic > 0);
}

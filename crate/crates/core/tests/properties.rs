//! Randomized checks of the algebraic invariants across several dilations.

use std::sync::OnceLock;

use framelet::cascade::subdivide_phi;
use framelet::design::{parametrize, AffineFilterFamily, Constraints};
use framelet::dual::{build_dual_bank, coset_defect, difference_ideal_divide, merge_proportional, DualOptions, Origin};
use framelet::io::{filter_from_json, filter_to_json};
use framelet::laurent::{int, multi_indices, nabla_delta, rat, to_f64};
use framelet::moments::{linear_phase_moment_order, sum_rule_order, vanishing_moment_order};
use framelet::quasitight::{build_quasitight, hermitian_sos_decompose, sos_expand, term_count_bound};
use framelet::symmetry::{detect_symmetry, transfer_symmetry, SymmetryGroup, SymmetryType};
use framelet::verify::{frequency_residual, has_interpolatory_zero_coset, identity_failure, polyphase_defect};
use framelet::{DilationContext, Filter, Point, Scalar, SupportBox};
use proptest::prelude::*;

const DILATIONS: [&str; 5] = ["2", "2 0; 0 2", "1 1; 1 -1", "1 -2; 2 -1", "2 1; 0 2"];

fn boxes(d: usize) -> SupportBox {
    if d == 1 {
        SupportBox::cube(1, -3, 3)
    } else {
        SupportBox::cube(2, -2, 2)
    }
}

struct Case {
    ctx: DilationContext,
    family: AffineFilterFamily,
}

/// Interpolatory families with two sum rules, one per dilation.
fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        DILATIONS
            .iter()
            .map(|m| {
                let ctx = DilationContext::parse(m).unwrap();
                let c = Constraints {
                    sum_rules: 2,
                    interpolatory: true,
                    symmetry: None,
                };
                let family = parametrize(&boxes(ctx.dim()), &ctx, &c).unwrap();
                assert!(family.dimension() > 0, "{m}");
                Case { ctx, family }
            })
            .collect()
    })
}

fn small_rational() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, prop::sample::select(vec![8i64, 16, 32, 64])).prop_map(|(p, q)| rat(p, q))
}

/// A random member of the family for dilation `i`.
fn member(i: usize, seed: &[Scalar]) -> Filter {
    let fam = &cases()[i].family;
    let params: Vec<Scalar> = (0..fam.dimension()).map(|k| seed[k % seed.len()].clone() * int(k as i64 % 3 + 1)).collect();
    fam.instantiate(&params).unwrap()
}

fn seeds() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(small_rational(), 1..6)
}

fn random_filter(dim: usize) -> impl Strategy<Value = Filter> {
    let point = prop::collection::vec(-2i64..=2, dim);
    prop::collection::vec((point, -5i64..=5, 1i64..=4), 1..7).prop_map(move |terms| {
        Filter::from_coeffs(dim, terms.into_iter().map(|(p, n, d)| (p, rat(n, d))))
    })
}

fn ctx_of(i: usize) -> &'static DilationContext {
    &cases()[i].ctx
}

fn random_xis(dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..20)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 * std::f64::consts::PI
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_algebra(u in random_filter(2), v in random_filter(2), w in random_filter(2)) {
        let uv = u.convolve(&v).unwrap();
        prop_assert_eq!(&uv, &v.convolve(&u).unwrap());
        prop_assert_eq!(uv.convolve(&w).unwrap(), u.convolve(&v.convolve(&w).unwrap()).unwrap());
        prop_assert_eq!(uv.star(), u.star().convolve(&v.star()).unwrap());
        if let (Some(su), Some(sv), Some(suv)) = (u.support(), v.support(), uv.support()) {
            prop_assert!(suv.is_subset_of(&su.add(sv)));
        }
        let xi = [0.37, -1.21];
        let lhs = uv.evaluate_at(&xi);
        let rhs = u.evaluate_at(&xi) * v.evaluate_at(&xi);
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn coset_split_and_merge_are_inverse(i in 0..DILATIONS.len(), u in random_filter(2), v in random_filter(1)) {
        let ctx = ctx_of(i);
        let f = if ctx.dim() == 1 { v } else { u };
        prop_assert_eq!(ctx.coset_merge(&ctx.coset_split(&f)).unwrap(), f);
    }

    #[test]
    fn file_round_trip(u in random_filter(2), k in prop::sample::select(vec![1i64, 2, 3, 6])) {
        let f = u.mul_sqrt(&int(k));
        prop_assert_eq!(filter_from_json(&filter_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn vanishing_moments_add(u in random_filter(2), a in 0u32..3, b in 0u32..3) {
        prop_assume!(!u.is_zero());
        let diff = |n: u32, axis: usize| {
            let mut e = vec![0; 2];
            e[axis] = 1;
            let step = Filter::delta(2).sub(&Filter::monomial(e, int(1))).unwrap();
            (0..n).fold(Filter::delta(2), |acc, _| acc.convolve(&step).unwrap())
        };
        let x = diff(a, 0).convolve(&u).unwrap();
        let y = diff(b, 1);
        let (vx, vy) = (vanishing_moment_order(&x, 12), vanishing_moment_order(&y, 12));
        let vxy = vanishing_moment_order(&x.convolve(&y).unwrap(), 12);
        prop_assert!(vxy.value() >= vx.value() + vy.value());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn interpolatory_members_have_linear_phase(i in 0..DILATIONS.len(), s in seeds()) {
        let ctx = ctx_of(i);
        let a = member(i, &s);
        let sr = sum_rule_order(&a, ctx, 12);
        prop_assert!(sr.value() >= 2);
        prop_assert!(linear_phase_moment_order(&a, 12).value() >= sr.value());
        // The zero coset of an interpolatory filter is d_M^{-1} δ.
        prop_assert_eq!(ctx.coset(&a, 0), Filter::delta(ctx.dim()).scale(&ctx.inv_det()));
    }

    #[test]
    fn subdivision_interpolates(i in 0..DILATIONS.len(), s in seeds()) {
        let ctx = ctx_of(i);
        let a = member(i, &s);
        let g = subdivide_phi(&a, ctx, 3).unwrap();
        let v = g.exact.as_ref().unwrap();
        let m3 = ctx.matrix().mul(ctx.matrix()).mul(ctx.matrix());
        for k in SupportBox::cube(ctx.dim(), -2, 2).points() {
            let expected = if k.iter().all(|x| *x == 0) { int(1) } else { int(0) };
            prop_assert_eq!(v.coeff(&m3.apply(&k)), expected);
        }
        prop_assert!((g.integral(ctx) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn division_reconvolves(i in 0..DILATIONS.len(), s in seeds(), t in seeds()) {
        let ctx = ctx_of(i);
        let (a, ta) = (member(i, &s), member(i, &t));
        for j in 1..ctx.det_abs() {
            let h = coset_defect(&a, &ta, ctx, j).unwrap();
            let parts = difference_ideal_divide(&h, 2).unwrap();
            let sum = parts.iter().fold(Filter::zero(ctx.dim()), |acc, (alpha, v)| {
                acc.add(&nabla_delta(alpha).convolve(v).unwrap()).unwrap()
            });
            prop_assert_eq!(sum, h);
        }
    }

    #[test]
    fn sos_terms_re_expand(i in 0..DILATIONS.len(), s in seeds()) {
        let ctx = ctx_of(i);
        let a = member(i, &s);
        for j in 1..ctx.det_abs() {
            let aj = ctx.coset(&a, j);
            let h = Filter::delta(ctx.dim())
                .scale(&ctx.inv_det())
                .sub(&aj.star().convolve(&aj).unwrap().scale(&ctx.det_scalar()))
                .unwrap();
            // h vanishes to order 2 at the origin, so it lies in the ideal of order 2.
            let terms = hermitian_sos_decompose(&h, 1).unwrap();
            prop_assert_eq!(sos_expand(&terms, ctx.dim()).unwrap(), h);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn dual_banks_are_sound(i in 0..DILATIONS.len(), s in seeds(), t in seeds(), merge in any::<bool>()) {
        let ctx = ctx_of(i);
        let a = member(i, &s);
        let ta = member(i, &t);
        let opts = DualOptions { merge_proportional: merge, ..DualOptions::default() };
        let bank = build_dual_bank(&a, &ta, ctx, 1, 1, &opts).unwrap();
        prop_assert!(identity_failure(&a, &ta, &bank.pairs(), ctx).is_none());
        let d = ctx.dim();
        let binom = multi_indices(d, 1).len();
        prop_assert!(bank.len() <= ctx.det_abs() + (ctx.det_abs() - 1) * binom);
        for (b, tb) in bank.bs.iter().zip(&bank.tbs) {
            prop_assert!(vanishing_moment_order(b, 8).value() >= 1);
            prop_assert!(vanishing_moment_order(tb, 8).value() >= 1);
            prop_assert!(has_interpolatory_zero_coset(b, ctx));
            prop_assert!(has_interpolatory_zero_coset(tb, ctx));
        }
        let abox = a.support().unwrap();
        for (b, o) in bank.bs.iter().zip(&bank.origins) {
            if matches!(o, Origin::LowPass | Origin::Coset { .. }) {
                prop_assert!(b.support().unwrap().is_subset_of(abox));
            }
        }
        let residual = frequency_residual(ctx, &a, &ta, &bank.pairs(), &random_xis(d, s.len() as u64));
        prop_assert!(residual < 1e-8, "residual {}", residual);
    }

    #[test]
    fn perturbation_breaks_the_identity(
        i in 0..DILATIONS.len(),
        s in seeds(),
        which in 0usize..8,
        at in prop::collection::vec(-3i64..=3, 2),
        eps in small_rational(),
    ) {
        prop_assume!(eps != int(0));
        let ctx = ctx_of(i);
        let a = member(i, &s);
        let mut bank = build_dual_bank(&a, &a, ctx, 1, 1, &DualOptions::default()).unwrap();
        let at: Point = at[..ctx.dim()].to_vec();
        let k = which % bank.len();
        let bump = Filter::monomial(at, eps);
        if bank.bs[k].is_rational() {
            bank.bs[k] = bank.bs[k].add(&bump).unwrap();
        } else {
            bank.tbs[k] = bank.tbs[k].add(&bump.mul_sqrt(&int(bank.tbs[k].radicand() as i64))).unwrap();
        }
        prop_assert!(identity_failure(&bank.a, &bank.ta, &bank.pairs(), ctx).is_some());
    }

    #[test]
    fn split_then_merge_keeps_the_identity(i in 0..DILATIONS.len(), s in seeds()) {
        let ctx = ctx_of(i);
        let a = member(i, &s);
        let mut bank = build_dual_bank(&a, &a, ctx, 1, 1, &DualOptions::default()).unwrap();
        let before = polyphase_defect(&bank.a, &bank.ta, ctx);
        let n = bank.len();
        merge_proportional(&mut bank);
        prop_assert!(bank.len() <= n);
        prop_assert_eq!(polyphase_defect(&bank.a, &bank.ta, ctx), before);
        prop_assert!(identity_failure(&bank.a, &bank.ta, &bank.pairs(), ctx).is_none());
    }

    #[test]
    fn quasi_tight_banks_are_sound(i in 0..DILATIONS.len(), s in seeds()) {
        let ctx = ctx_of(i);
        let a = member(i, &s);
        let bank = build_quasitight(&a, ctx, 1).unwrap();
        prop_assert!(identity_failure(&a, &a, &bank.pairs(), ctx).is_none());
        prop_assert!(bank.len() <= term_count_bound(ctx, 1));
        prop_assert_eq!(bank.eps[0], -1);
        let sr = sum_rule_order(&a, ctx, 12);
        prop_assert_eq!(vanishing_moment_order(&bank.bs[0], 12), sr);
        for b in &bank.bs {
            prop_assert!(vanishing_moment_order(b, 8).value() >= 1);
        }
    }

    #[test]
    fn symmetry_transfers_through_upsampling(i in 1..DILATIONS.len(), u in random_filter(2)) {
        let ctx = ctx_of(i);
        let group = match i {
            1 | 2 => SymmetryGroup::d4(),
            3 => SymmetryGroup::d6(),
            _ => SymmetryGroup::pm_identity(2),
        };
        prop_assume!(!u.is_zero());
        // Symmetrize about the origin.
        let sym = group.elements().iter().fold(Filter::zero(2), |acc, e| {
            acc.add(&u.map_points(|p| e.apply(p))).unwrap()
        });
        prop_assume!(!sym.is_zero());
        let t = SymmetryType::new(group.clone(), vec![int(0), int(0)], 1);
        prop_assert!(t.holds_for(&sym));
        for gamma in ctx.gamma() {
            let v = ctx.upsample_shift(&sym, gamma);
            let predicted = transfer_symmetry(&t, gamma, ctx).unwrap();
            prop_assert!(predicted.holds_for(&v));
            let found = detect_symmetry(&v, &predicted.group, std::slice::from_ref(&predicted.center));
            prop_assert!(found.is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn designed_quincunx_filters_meet_their_constraints(p in small_rational(), q in small_rational()) {
        static FAM: OnceLock<(DilationContext, AffineFilterFamily)> = OnceLock::new();
        let (ctx, fam) = FAM.get_or_init(|| {
            let ctx = DilationContext::parse("1 1; 1 -1").unwrap();
            let c = Constraints {
                sum_rules: 4,
                interpolatory: true,
                symmetry: Some(SymmetryType::new(SymmetryGroup::d4(), vec![int(0), int(0)], 1)),
            };
            let fam = parametrize(&SupportBox::cube(2, -3, 3), &ctx, &c).unwrap();
            (ctx, fam)
        });
        let a = fam.instantiate(&[p, q]).unwrap();
        prop_assert!(ctx.is_interpolatory(&a));
        prop_assert!(sum_rule_order(&a, ctx, 8).value() >= 4);
        let t = detect_symmetry(&a, &SymmetryGroup::d4(), &[]).unwrap();
        prop_assert!(t.center.iter().all(|c| to_f64(c) == 0.0));
        prop_assert_eq!(t.sign, 1);
    }
}

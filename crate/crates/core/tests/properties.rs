use proptest::prelude::*;

use swindle_core::decomp::fragment;
use swindle_core::funcspace::{Func, FuncVec, PlBump, SeedSpec, Telescope};
use swindle_core::geometry::{ball_of, chart_map, locate, BallIndex, ChartDirection};
use swindle_core::group::{commutator, equal_on_samples, inv, mul, GroupElement, SamplingPlan};
use swindle_core::plcore::{cmp_third_pow2_recip, rat, PlMap1D, Rat, TentProfile};
use swindle_core::swindle::{DiagAffine, Homeo, SwindleKind};
use swindle_core::torus::mod1;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn small_rat() -> impl Strategy<Value = (i64, i64)> {
    (-200i64..200, 1i64..60)
}

fn unit_rat() -> impl Strategy<Value = Rat> {
    (1u32..40).prop_flat_map(|d| (0..=d, Just(d))).prop_map(|(n, d)| rat(n as i64, d as i64))
}

fn point(m: usize) -> impl Strategy<Value = Vec<Rat>> {
    proptest::collection::vec((-8i64..72, 1i64..64).prop_map(|(n, d)| rat(n, d)), m)
        .prop_map(|v| v.into_iter().map(|x| x.min(rat(9, 8)).max(rat(-1, 8))).collect())
}

fn kind() -> impl Strategy<Value = SwindleKind> {
    prop::sample::select(SwindleKind::ALL.to_vec())
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced `(p, q)` with `q > 0`, computed with machine integers.
fn reduce(p: i128, q: i128) -> (i128, i128) {
    let g = gcd(p, q).max(1);
    let (p, q) = (p / g, q / g);
    if q < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

fn as_pair(r: &Rat) -> (i128, i128) {
    let text = r.to_string();
    let (p, q) = text.split_once('/').unwrap();
    (p.parse().unwrap(), q.parse().unwrap())
}

/// Monotone breakpoint list with fixed ends built from positive gaps.
fn monotone_map() -> impl Strategy<Value = PlMap1D> {
    (proptest::collection::vec((1i64..9, 1i64..9), 2..7), -3i64..3).prop_map(|(gaps, start)| {
        let mut xs = vec![Rat::int(start)];
        let mut ys = vec![Rat::int(start)];
        for (a, b) in &gaps {
            xs.push(xs.last().unwrap() + rat(*a, 4));
            ys.push(ys.last().unwrap() + rat(*b, 4));
        }
        // Rescale the outputs so the last breakpoint is fixed too.
        let (x0, x1) = (xs[0].clone(), xs.last().unwrap().clone());
        let (y0, y1) = (ys[0].clone(), ys.last().unwrap().clone());
        let ys: Vec<Rat> = ys.iter().map(|y| &x0 + (y - &y0) * (&x1 - &x0) / (&y1 - &y0)).collect();
        PlMap1D::new(xs.into_iter().zip(ys).collect()).unwrap()
    })
}

fn seed_telescope() -> std::sync::Arc<Telescope> {
    Telescope::new(SeedSpec::default_for(2, &rat(1, 8), 0).unwrap().func(), 2, &rat(1, 8)).unwrap()
}

fn bump_at(c: (i64, i64), peak: i64) -> Func {
    let (cx, cy) = (rat(c.0, 16), rat(c.1, 16));
    let w = rat(1, 8);
    Func::bump(
        PlBump::new(vec![&cx - &w, &cy - &w], vec![cx.clone(), cy.clone()], vec![&cx + &w, &cy + &w], Rat::int(peak))
            .unwrap(),
    )
}

fn homeo_word(word: &[(SwindleKind, bool)]) -> Homeo {
    let tent = TentProfile::new(rat(1, 8)).unwrap();
    word.iter().fold(Homeo::identity(), |acc, (k, invert)| {
        let h = Homeo::swindle(*k, tent.clone(), 2);
        acc.compose(&if *invert { h.inverse() } else { h })
    })
}

fn element() -> impl Strategy<Value = GroupElement> {
    (proptest::collection::vec((kind(), any::<bool>()), 0..3), (2i64..14, 2i64..14), -3i64..4).prop_map(
        |(word, c, peak)| GroupElement::new(homeo_word(&word), FuncVec(vec![bump_at(c, peak)])),
    )
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn rational_arithmetic_matches_integer_oracle(a in small_rat(), b in small_rat()) {
        let (x, y) = (rat(a.0, a.1), rat(b.0, b.1));
        let (ap, aq, bp, bq) = (a.0 as i128, a.1 as i128, b.0 as i128, b.1 as i128);
        prop_assert_eq!(as_pair(&(&x + &y)), reduce(ap * bq + bp * aq, aq * bq));
        prop_assert_eq!(as_pair(&(&x - &y)), reduce(ap * bq - bp * aq, aq * bq));
        prop_assert_eq!(as_pair(&(&x * &y)), reduce(ap * bp, aq * bq));
        if bp != 0 {
            prop_assert_eq!(as_pair(&(&x / &y)), reduce(ap * bq, aq * bp));
        }
        prop_assert_eq!(x < y, ap * bq < bp * aq);
        prop_assert_eq!(x.to_string().parse::<Rat>().unwrap(), x.clone());
        prop_assert_eq!(x.floor().to_string().parse::<i128>().unwrap(), (ap as f64 / aq as f64).floor() as i128);
    }

    #[test]
    fn third_power_comparison_matches_direct(a in small_rat(), e in 0u32..20) {
        let x = rat(a.0, a.1);
        let direct = x.cmp(&rat(1, 3 * (1i64 << e)));
        prop_assert_eq!(cmp_third_pow2_recip(&x, &e.into()), direct);
    }

    #[test]
    fn mod_one_matches_integer_oracle(a in small_rat(), b in small_rat()) {
        let s = rat(a.0, a.1) + rat(b.0, b.1);
        let (p, q) = as_pair(&s);
        let expected = reduce(p.rem_euclid(q), q);
        prop_assert_eq!(as_pair(&mod1(&s)), expected);
    }

    #[test]
    fn pl_maps_invert_and_compose(f in monotone_map(), g in monotone_map(), x in small_rat()) {
        let x = rat(x.0, x.1);
        prop_assert_eq!(f.inverse_eval(&f.eval(&x)), x.clone());
        prop_assert_eq!(f.inverse().eval(&x), f.inverse_eval(&x));
        prop_assert_eq!(PlMap1D::compose(&f, &g).eval(&x), f.eval(&g.eval(&x)));
        let y = &x + rat(1, 7);
        prop_assert!(f.eval(&x) < f.eval(&y));
    }

    #[test]
    fn chart_round_trip(t in unit_rat()) {
        prop_assume!(t.is_positive() && t < Rat::one());
        let s = chart_map(&t, ChartDirection::Forward).unwrap();
        prop_assert_eq!(chart_map(&s, ChartDirection::Inverse).unwrap(), t);
    }

    #[test]
    fn locate_agrees_with_brute_force(p in point(2)) {
        let mut hits = Vec::new();
        for n in 0..8u64 {
            for k in 0..(1u64 << n) {
                if ball_of(n, k).unwrap().contains(&p) {
                    hits.push(BallIndex::new(n, k).unwrap());
                }
            }
        }
        prop_assert!(hits.len() <= 1);
        match locate(&p) {
            Some(idx) if idx.level < 8 => prop_assert_eq!(hits, vec![idx]),
            _ => prop_assert!(hits.is_empty()),
        }
    }

    #[test]
    fn swindles_are_invertible_and_fix_the_outside(k in kind(), p in point(3)) {
        let h = Homeo::swindle(k, TentProfile::new(rat(1, 8)).unwrap(), 3);
        let image = h.eval(&p);
        prop_assert_eq!(h.eval_inverse(&image), p.clone());
        prop_assert_eq!(&image[1..], &p[1..]);
        if p.iter().any(|x| *x <= Rat::zero() || *x >= Rat::one()) {
            prop_assert_eq!(image, p);
        }
    }

    #[test]
    fn swindles_are_monotone_in_the_first_coordinate(k in kind(), a in unit_rat(), b in unit_rat(), y in unit_rat()) {
        prop_assume!(a < b);
        let h = Homeo::swindle(k, TentProfile::new(rat(1, 8)).unwrap(), 2);
        prop_assert!(h.eval(&[a, y.clone()])[0] < h.eval(&[b, y])[0]);
    }

    #[test]
    fn level_terms_have_disjoint_supports(p in point(2)) {
        let t = seed_telescope();
        let mut nonzero = Vec::new();
        for n in 0..7u64 {
            for k in 0..(1u64 << n) {
                let idx = BallIndex::new(n, k).unwrap();
                if !t.level_term_eval(&idx, &p).is_zero() {
                    nonzero.push(idx);
                }
            }
        }
        prop_assert!(nonzero.len() <= 1);
        if let Some(idx) = nonzero.first() {
            prop_assert_eq!(locate(&p), Some(idx.clone()));
        }
    }

    #[test]
    fn shells_telescope_to_the_seed(level in 0u64..9, k in any::<u64>(), y in 1i64..15, n in 1u64..10) {
        let t = seed_telescope();
        let idx = BallIndex::new(level, k % (1u64 << level)).unwrap();
        let p = t.chain_forward(&idx, &[rat(5, 16), rat(y, 16)]);
        let all = Func::shells(&t, 0, Some(n));
        let tail = Func::shells(&t, 1, Some(n));
        prop_assert_eq!(all.eval(&p) - tail.eval(&p), t.seed().eval(&p));
    }

    #[test]
    fn affine_fit_hits_target(lo in (1i64..5, 1i64..5), w in (1i64..5, 1i64..5)) {
        let from = swindle_core::geometry::Region {
            lo: vec![rat(lo.0, 2), rat(lo.1, 3)],
            hi: vec![rat(lo.0, 2) + rat(w.0, 3), rat(lo.1, 3) + rat(w.1, 5)],
        };
        let to = swindle_core::geometry::Region::unit_cube(2);
        let a = DiagAffine::fit(&from, &to).unwrap();
        prop_assert_eq!(a.image(&from), to);
        prop_assert_eq!(a.eval_inverse(&a.eval(&from.center())), from.center());
    }

    #[test]
    fn fragments_sum_exactly(cell in 1i64..5, p in point(2)) {
        let u = FuncVec(vec![bump_at((5, 7), 3), bump_at((11, 4), -2)]);
        let pieces = fragment(&u, &rat(cell, 8)).unwrap();
        let total: Vec<Rat> = pieces.iter().fold(vec![Rat::zero(); 2], |acc, piece| {
            acc.iter().zip(piece.func.eval(&p)).map(|(a, b)| a + b).collect()
        });
        prop_assert_eq!(total, u.eval(&p));
    }
}

proptest! {
    #![proptest_config(config(60))]

    #[test]
    fn group_axioms(a in element(), b in element(), c in element(), pts in proptest::collection::vec(point(2), 12)) {
        let plan = SamplingPlan::from_points(pts);
        let left = mul(&mul(&a, &b).unwrap(), &c).unwrap();
        let right = mul(&a, &mul(&b, &c).unwrap()).unwrap();
        prop_assert!(equal_on_samples(&left, &right, &plan).unwrap().pass());
        let id = GroupElement::identity(1);
        prop_assert!(equal_on_samples(&mul(&a, &inv(&a)).unwrap(), &id, &plan).unwrap().pass());
        prop_assert!(equal_on_samples(&mul(&inv(&a), &a).unwrap(), &id, &plan).unwrap().pass());
        prop_assert!(equal_on_samples(&inv(&inv(&a)), &a, &plan).unwrap().pass());
        prop_assert!(equal_on_samples(&mul(&a, &id).unwrap(), &a, &plan).unwrap().pass());
    }

    #[test]
    fn commutators_are_bilinear_in_the_fiber(
        word in proptest::collection::vec((kind(), any::<bool>()), 1..3),
        v in element(),
        w in element(),
        pts in proptest::collection::vec(point(2), 12),
    ) {
        let plan = SamplingPlan::from_points(pts);
        let g = GroupElement::base(homeo_word(&word), 1);
        let (v, w) = (GroupElement::fiber(v.func), GroupElement::fiber(w.func));
        let joint = commutator(&g, &mul(&v, &w).unwrap()).unwrap();
        let split = mul(&commutator(&g, &v).unwrap(), &commutator(&g, &w).unwrap()).unwrap();
        prop_assert!(equal_on_samples(&joint, &split, &plan).unwrap().pass());
    }

    #[test]
    fn commutator_with_inverse_map_is_the_difference(
        word in proptest::collection::vec((kind(), any::<bool>()), 1..3),
        v in element(),
        pts in proptest::collection::vec(point(2), 12),
    ) {
        let g = homeo_word(&word);
        let v = v.func;
        let lhs = commutator(&GroupElement::base(g.inverse(), 1), &GroupElement::fiber(v.clone())).unwrap();
        for p in &pts {
            let expected: Vec<Rat> = v.eval(&g.eval(p)).iter().zip(v.eval(p)).map(|(a, b)| a - b).collect();
            prop_assert_eq!(lhs.eval_func(p), expected);
            prop_assert_eq!(lhs.eval_homeo(p), p.clone());
        }
    }
}

//! Lazy evaluation of the global slab maps in chart coordinates.
//!
//! On the window `[b, b + 2]` every source interval sits at level `b` and
//! its target at level `b + 1`, offset by `c = 0` ("minus") or `c = 1/2`
//! ("plus"). All source endpoints map through the same affine rule
//! `u ↦ 1 + c + u/2` (local coordinate `u = s - b`), so the window map has
//! just three pieces with breakpoints `0, e, 1 - e, 2` where
//! `e = 1 / (3 · 2^b)`. Damping by `λ` takes the convex combination
//! `(1 - λ) u + λ F(u)`, which keeps the same breakpoints.
//!
//! `e` is materialized only for points inside the two outer pieces; such
//! points already carry `2^b`-sized denominators.

use num_bigint::BigInt;
use std::cmp::Ordering;

use super::SwindleKind;
use crate::plcore::{cmp_third_pow2_recip, Rat};

fn epsilon(base: &BigInt) -> Rat {
    let exp = usize::try_from(base).expect("window base fits in memory");
    Rat::new(1, BigInt::from(3u32) << exp)
}

/// Window base containing `s`, or `None` where the map is the identity.
pub(crate) fn window_base(kind: SwindleKind, s: &Rat) -> Option<BigInt> {
    let two = BigInt::from(2u32);
    if kind.is_phi() {
        if !s.is_positive() {
            return None;
        }
        Some((s / Rat::int(2)).floor() * &two)
    } else {
        if *s <= Rat::one() {
            return None;
        }
        Some(((s - Rat::one()) / Rat::int(2)).floor() * &two + 1u32)
    }
}

/// `(1 - λ) s + λ F(s)` for the slab map `F` of `kind`.
pub fn slab_eval(kind: SwindleKind, lambda: &Rat, s: &Rat) -> Rat {
    let base = match window_base(kind, s) {
        Some(b) => b,
        None => return s.clone(),
    };
    let b = Rat::int(base.clone());
    let u = s - &b;
    if u.is_zero() {
        return s.clone();
    }
    let one = Rat::one();
    let half = Rat::new(1, 2);
    let c = kind.offset();
    let kappa = &one - lambda * &half;
    let lifted = lambda * (&one + &c);
    let out = if cmp_third_pow2_recip(&u, &base) == Ordering::Less {
        let e = epsilon(&base);
        let g1 = &lifted + &e * &kappa;
        &u * g1 / e
    } else if cmp_third_pow2_recip(&(&one - &u), &base) == Ordering::Less {
        let e = epsilon(&base);
        let top = (&one - lambda) + lambda * (Rat::new(3, 2) + &c);
        let g2 = &top - &e * &kappa;
        let two = Rat::int(2);
        &g2 + (&u - &one + &e) * (&two - &g2) / (&one + &e)
    } else {
        &u * &kappa + lifted
    };
    b + out
}

/// Exact inverse of [`slab_eval`].
pub fn slab_inverse(kind: SwindleKind, lambda: &Rat, t: &Rat) -> Rat {
    let base = match window_base(kind, t) {
        Some(b) => b,
        None => return t.clone(),
    };
    let b = Rat::int(base.clone());
    let v = t - &b;
    if v.is_zero() {
        return t.clone();
    }
    let one = Rat::one();
    let c = kind.offset();
    let kappa = &one - lambda * Rat::new(1, 2);
    let lifted = lambda * (&one + &c);
    let over = &v - &lifted;
    let in_first = !over.is_positive() || cmp_third_pow2_recip(&(&over / &kappa), &base) == Ordering::Less;
    let u = if in_first {
        let e = epsilon(&base);
        let g1 = &lifted + &e * &kappa;
        &v * e / g1
    } else {
        let top = (&one - lambda) + lambda * (Rat::new(3, 2) + &c);
        let under = &top - &v;
        if !under.is_positive() || cmp_third_pow2_recip(&(&under / &kappa), &base) == Ordering::Less {
            let e = epsilon(&base);
            let g2 = &top - &e * &kappa;
            let two = Rat::int(2);
            (&one - &e) + (&v - &g2) * (&one + &e) / (two - g2)
        } else {
            over / kappa
        }
    };
    b + u
}

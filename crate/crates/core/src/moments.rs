//! Sum rules, vanishing moments and linear-phase moments as exact lattice sums.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::DilationContext;
use crate::laurent::{monomial_power, multi_indices, Filter, Scalar};

pub const DEFAULT_CAP: u32 = 16;

/// An order that is exact below the search cap, or only bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Order {
    Exact(u32),
    AtLeast(u32),
}

impl Order {
    /// The order, or the cap if only bounded.
    pub fn value(self) -> u32 {
        match self {
            Order::Exact(n) | Order::AtLeast(n) => n,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Order::Exact(_))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact(n) => write!(f, "{n}"),
            Order::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentReport {
    pub sr: Option<Order>,
    pub vmo: Order,
    pub lpm: Order,
    pub cap: u32,
}

/// `Σ_k u(k) k^μ` (rational part).
pub fn moment(u: &Filter, mu: &[u32]) -> Scalar {
    u.iter().fold(Scalar::zero(), |acc, (p, v)| {
        acc + v * Scalar::from_integer(monomial_power(p, mu))
    })
}

pub fn vanishing_moment_order(u: &Filter, cap: u32) -> Order {
    for n in 0..cap {
        if multi_indices(u.dim(), n)
            .iter()
            .any(|mu| !moment(u, mu).is_zero())
        {
            return Order::Exact(n);
        }
    }
    Order::AtLeast(cap)
}

pub fn linear_phase_moment_order(u: &Filter, cap: u32) -> Order {
    if !u.is_normalized() {
        return Order::Exact(0);
    }
    let diff = u
        .sub(&Filter::delta(u.dim()))
        .expect("rational filters share a radicand");
    vanishing_moment_order(&diff, cap)
}

/// Coset moments `S_μ(γ) = Σ_k a(γ+Mk)(γ+Mk)^μ`, one per coset.
pub fn coset_moments(a: &Filter, ctx: &DilationContext, mu: &[u32]) -> Vec<Scalar> {
    let mut s = vec![Scalar::zero(); ctx.det_abs()];
    for (p, v) in a.iter() {
        let (i, _) = ctx.decompose(p);
        s[i] += v * Scalar::from_integer(monomial_power(p, mu));
    }
    s
}

pub fn sum_rule_order(a: &Filter, ctx: &DilationContext, cap: u32) -> Order {
    for n in 0..cap {
        for mu in multi_indices(a.dim(), n) {
            let s = coset_moments(a, ctx, &mu);
            if s.iter().any(|x| *x != s[0]) {
                return Order::Exact(n);
            }
        }
    }
    Order::AtLeast(cap)
}

/// `u_{a,ã} = δ - a⋆ * ã`.
pub fn mixing_filter(a: &Filter, ta: &Filter) -> Result<Filter> {
    Filter::delta(a.dim()).sub(&a.star().convolve(ta)?)
}

pub fn report(u: &Filter, ctx: Option<&DilationContext>, cap: u32) -> MomentReport {
    MomentReport {
        sr: ctx.map(|c| sum_rule_order(u, c, cap)),
        vmo: vanishing_moment_order(u, cap),
        lpm: linear_phase_moment_order(u, cap),
        cap,
    }
}

/// `Σ_k u(k)`, handy for normalization checks.
pub fn dc_gain_is_one(u: &Filter) -> bool {
    u.is_rational() && u.sum() == Scalar::one()
}

/// Exact integer check `p^μ` helper exposed for tests.
pub fn power(p: &[i64], mu: &[u32]) -> BigInt {
    monomial_power(p, mu)
}

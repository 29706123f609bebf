//! Interpolatory dual framelet construction through coset defects and
//! difference-ideal factorization.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DilationContext;
use crate::laurent::{multi_indices, nabla_delta, MultiIndex, Filter, Point, Scalar};
use crate::linalg::LinearSystem;
use crate::moments::{sum_rule_order, vanishing_moment_order, Order, DEFAULT_CAP};
use crate::verify::{identity_failure, WeightedPair};

/// Extra rings tried around the minimal unknown box before giving up.
const MAX_RINGS: i64 = 3;

fn check_low_pass(a: &Filter, ctx: &DilationContext) -> Result<()> {
    if a.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch(a.dim(), ctx.dim()));
    }
    if !a.is_rational() || !ctx.is_interpolatory(a) {
        return Err(Error::NotInterpolatory);
    }
    if !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    Ok(())
}

/// `h_j = d_M^{-1} δ - d_M · a^{[γ_j]⋆} * ã^{[γ_j]}` for `1 <= j < d_M`
/// (index into `Γ_M`, the zero coset being index 0).
pub fn coset_defect(a: &Filter, ta: &Filter, ctx: &DilationContext, j: usize) -> Result<Filter> {
    check_low_pass(a, ctx)?;
    check_low_pass(ta, ctx)?;
    let d = ctx.det_abs();
    if j == 0 || j >= d {
        return Err(Error::CosetIndexOutOfRange(j, d));
    }
    let prod = ctx.coset(a, j).star().convolve(&ctx.coset(ta, j))?;
    Filter::delta(ctx.dim())
        .scale(&ctx.inv_det())
        .sub(&prod.scale(&ctx.det_scalar()))
}

/// Writes `h = Σ_{|α|=n} ∇^α v_α` with finitely supported rational `v_α`.
///
/// Solved as an exact linear system on a support box that starts from the
/// minimal one and grows by up to three rings. The returned list follows
/// [`multi_indices`] order and always reconvolves to `h`.
pub fn difference_ideal_divide(h: &Filter, n: u32) -> Result<Vec<(MultiIndex, Filter)>> {
    let dim = h.dim();
    let alphas = multi_indices(dim, n);
    if h.is_zero() {
        return Ok(alphas.into_iter().map(|a| (a, Filter::zero(dim))).collect());
    }
    if !h.is_rational() {
        return Err(Error::InvalidArgument("difference-ideal division needs a rational filter".into()));
    }
    let vmo = vanishing_moment_order(h, n + 1);
    if vmo.value() < n {
        return Err(Error::InsufficientVanishingMoments {
            required: n,
            found: vmo.value(),
        });
    }
    let bx = h.support().expect("nonzero filter").clone();
    let nablas: Vec<Filter> = alphas.iter().map(|a| nabla_delta(a)).collect();
    for ring in 0..=MAX_RINGS {
        let lo: Point = bx.lo.iter().map(|x| x - ring).collect();
        let eq_hi: Point = bx.hi.iter().map(|x| x + ring).collect();
        let mut offsets = Vec::with_capacity(alphas.len());
        let mut boxes = Vec::with_capacity(alphas.len());
        let mut total = 0usize;
        for alpha in &alphas {
            let hi: Point = eq_hi.iter().zip(alpha).map(|(x, a)| x - *a as i64).collect();
            let b = crate::laurent::SupportBox::new(lo.clone(), hi);
            offsets.push(total);
            total += b.len();
            boxes.push(b);
        }
        let mut rows: BTreeMap<Point, Vec<(usize, Scalar)>> = BTreeMap::new();
        for (ai, b) in boxes.iter().enumerate() {
            for (qi, q) in b.points().iter().enumerate() {
                for (s, c) in nablas[ai].iter() {
                    let p: Point = q.iter().zip(s).map(|(x, y)| x + y).collect();
                    rows.entry(p).or_default().push((offsets[ai] + qi, c.clone()));
                }
            }
        }
        let mut sys = LinearSystem::new(total);
        for p in crate::laurent::SupportBox::new(lo.clone(), eq_hi.clone()).points() {
            let coeffs = rows.remove(&p).unwrap_or_default();
            sys.push(coeffs, h.coeff(&p));
        }
        let Some(sol) = sys.solve() else { continue };
        let mut out = Vec::with_capacity(alphas.len());
        let mut recon = Filter::zero(dim);
        for (ai, (alpha, b)) in alphas.iter().zip(&boxes).enumerate() {
            let v = Filter::from_coeffs(
                dim,
                b.points()
                    .into_iter()
                    .enumerate()
                    .map(|(qi, q)| (q, sol.particular[offsets[ai] + qi].clone())),
            );
            recon = recon.add(&nablas[ai].convolve(&v)?)?;
            out.push((alpha.clone(), v));
        }
        if recon == *h {
            return Ok(out);
        }
    }
    Err(Error::NoSolutionInBox)
}

/// One factor `(u, ũ)` with `u⋆ * ũ` equal to a group of terms `∇^α v_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorTerm {
    pub mu: MultiIndex,
    pub u: Filter,
    pub tu: Filter,
}

/// Splits each `∇^α v_α` (with `|α| = n1 + n2`) into `u⋆ * ũ` where
/// `u = (∇^μ)⋆` carries `n1` vanishing moments and `ũ = ∇^{α-μ} v_α` carries
/// at least `n2`.
///
/// `μ` is the first multi-index of degree `n1` (graded-lex) below `α`. With
/// `group` set, terms sharing the same `μ` are summed. With `center` set, `u`
/// is shifted to be as centered as possible and `ũ` is shifted to match.
pub fn split_vanishing_factors(
    terms: &[(MultiIndex, Filter)],
    n1: u32,
    n2: u32,
    group: bool,
    center: bool,
) -> Result<Vec<FactorTerm>> {
    let mut out: Vec<FactorTerm> = Vec::new();
    for (alpha, v) in terms {
        let total: u32 = alpha.iter().sum();
        if total != n1 + n2 {
            return Err(Error::BadOrderSplit { n1, n2, total });
        }
        if v.is_zero() {
            continue;
        }
        let mu = multi_indices(alpha.len(), n1)
            .into_iter()
            .find(|m| m.iter().zip(alpha).all(|(a, b)| a <= b))
            .expect("some μ <= α exists when |α| >= n1");
        let nu: MultiIndex = alpha.iter().zip(&mu).map(|(a, m)| a - m).collect();
        let tu = nabla_delta(&nu).convolve(v)?;
        match out.iter_mut().find(|t| group && t.mu == mu) {
            Some(t) => t.tu = t.tu.add(&tu)?,
            None => out.push(FactorTerm {
                u: nabla_delta(&mu).star(),
                mu,
                tu,
            }),
        }
    }
    out.retain(|t| !t.tu.is_zero());
    if center {
        for t in &mut out {
            let s: Point = t.mu.iter().map(|m| (*m / 2) as i64).collect();
            t.u = t.u.shift(&s);
            t.tu = t.tu.shift(&s);
        }
    }
    Ok(out)
}

/// Sign convention for the explicit first pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstPair {
    /// `b_1 = a - δ`, `b̃_1 = δ - ã`.
    #[default]
    Standard,
    /// `b_1 = δ - a`, `b̃_1 = ã - δ`.
    Flipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualOptions {
    pub first_pair: FirstPair,
    pub group_by_mu: bool,
    pub center: bool,
    pub merge_proportional: bool,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            first_pair: FirstPair::Standard,
            group_by_mu: true,
            center: true,
            merge_proportional: false,
        }
    }
}

/// Where a high-pass pair came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    LowPass,
    Coset { coset: usize },
    Factor { coset: usize, mu: MultiIndex },
    SumOfSquares { coset: usize },
    Merged { from: Vec<usize> },
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::LowPass => write!(f, "low-pass pair"),
            Origin::Coset { coset } => write!(f, "coset {} pair", coset + 1),
            Origin::Factor { coset, mu } => write!(f, "coset {} factor mu={:?}", coset + 1, mu),
            Origin::SumOfSquares { coset } => write!(f, "coset {} square term", coset + 1),
            Origin::Merged { from } => {
                let ids: Vec<String> = from.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "merged from {}", ids.join("+"))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualBank {
    pub a: Filter,
    pub ta: Filter,
    pub bs: Vec<Filter>,
    pub tbs: Vec<Filter>,
    pub origins: Vec<Origin>,
    pub n1: u32,
    pub n2: u32,
}

impl DualBank {
    pub fn len(&self) -> usize {
        self.bs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs.is_empty()
    }

    pub fn pairs(&self) -> Vec<WeightedPair<'_>> {
        self.bs
            .iter()
            .zip(&self.tbs)
            .map(|(b, tb)| WeightedPair {
                b,
                tb,
                weight: Scalar::one(),
            })
            .collect()
    }
}

/// `b_j = √(1/d_M) (δ - d_M · (a^{[γ_j]})↑ shifted to γ_j)`.
fn coset_high_pass(a: &Filter, ctx: &DilationContext, j: usize) -> Result<Filter> {
    let gamma = &ctx.gamma()[j];
    let lifted = ctx.upsample_shift(&ctx.coset(a, j), gamma);
    Ok(Filter::delta(ctx.dim())
        .sub(&lifted.scale(&ctx.det_scalar()))?
        .mul_sqrt(&ctx.inv_det()))
}

fn min_sum_rule(a: &Filter, ta: &Filter, ctx: &DilationContext) -> u32 {
    let sa = sum_rule_order(a, ctx, DEFAULT_CAP);
    let st = sum_rule_order(ta, ctx, DEFAULT_CAP);
    sa.value().min(st.value())
}

/// Builds an interpolatory dual framelet filter bank from interpolatory
/// `a`, `ã` with `n1` vanishing moments on the `b` side and `n2` on the `b̃`
/// side. The result is verified exactly before it is returned.
pub fn build_dual_bank(
    a: &Filter,
    ta: &Filter,
    ctx: &DilationContext,
    n1: u32,
    n2: u32,
    opts: &DualOptions,
) -> Result<DualBank> {
    check_low_pass(a, ctx)?;
    check_low_pass(ta, ctx)?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("vanishing moment orders must be positive".into()));
    }
    let available = min_sum_rule(a, ta, ctx);
    if n1 + n2 > available {
        return Err(Error::OrderBudgetExceeded { n1, n2, available });
    }
    let dim = ctx.dim();
    let delta = Filter::delta(dim);
    let (b1, tb1) = match opts.first_pair {
        FirstPair::Standard => (a.sub(&delta)?, delta.sub(ta)?),
        FirstPair::Flipped => (delta.sub(a)?, ta.sub(&delta)?),
    };
    let mut bs = vec![b1];
    let mut tbs = vec![tb1];
    let mut origins = vec![Origin::LowPass];
    for j in 1..ctx.det_abs() {
        bs.push(coset_high_pass(a, ctx, j)?);
        tbs.push(coset_high_pass(ta, ctx, j)?);
        origins.push(Origin::Coset { coset: j });
    }
    for j in 1..ctx.det_abs() {
        let h = coset_defect(a, ta, ctx, j)?;
        let terms = difference_ideal_divide(&h, n1 + n2)?;
        let gamma = &ctx.gamma()[j];
        for t in split_vanishing_factors(&terms, n1, n2, opts.group_by_mu, opts.center)? {
            bs.push(ctx.upsample_shift(&t.u, gamma));
            tbs.push(ctx.upsample_shift(&t.tu, gamma));
            origins.push(Origin::Factor { coset: j, mu: t.mu });
        }
    }
    let mut bank = DualBank {
        a: a.clone(),
        ta: ta.clone(),
        bs,
        tbs,
        origins,
        n1,
        n2,
    };
    if opts.merge_proportional {
        merge_proportional(&mut bank);
    }
    if let Some((r, c)) = identity_failure(a, ta, &bank.pairs(), ctx) {
        return Err(Error::VerificationFailed(r, c));
    }
    Ok(bank)
}

/// Folds pairs with `b_k = λ b_i` and `b̃_k = ν b̃_i` (`λν` rational) into
/// `b̃_i ← (1 + λν) b̃_i`, dropping pair `k`, and pair `i` too if the factor
/// vanishes.
pub fn merge_proportional(bank: &mut DualBank) {
    let mut i = 0;
    while i < bank.bs.len() {
        let mut k = i + 1;
        while k < bank.bs.len() {
            let lam = bank.bs[i].ratio_to(&bank.bs[k]);
            let nu = bank.tbs[i].ratio_to(&bank.tbs[k]);
            if let (Some((q1, r1)), Some((q2, r2))) = (lam, nu) {
                if r1 == r2 {
                    let factor = Scalar::one() + q1 * q2 * Scalar::from_integer(r1.into());
                    let mut from = match &bank.origins[i] {
                        Origin::Merged { from } => from.clone(),
                        _ => vec![i],
                    };
                    from.push(k);
                    bank.bs.remove(k);
                    bank.tbs.remove(k);
                    bank.origins.remove(k);
                    if factor.is_zero() {
                        bank.bs.remove(i);
                        bank.tbs.remove(i);
                        bank.origins.remove(i);
                        k = i + 1;
                        continue;
                    }
                    bank.tbs[i] = bank.tbs[i].scale(&factor);
                    bank.origins[i] = Origin::Merged { from };
                    continue;
                }
            }
            k += 1;
        }
        i += 1;
    }
}

/// Vanishing moment orders of the constructed high-pass filters.
pub fn high_pass_orders(bank: &DualBank) -> (Vec<Order>, Vec<Order>) {
    (
        bank.bs.iter().map(|b| vanishing_moment_order(b, DEFAULT_CAP)).collect(),
        bank.tbs.iter().map(|b| vanishing_moment_order(b, DEFAULT_CAP)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rat};

    fn hat() -> Filter {
        Filter::from_ints(1, rat(1, 4), [(vec![-1], 1), (vec![0], 2), (vec![1], 1)])
    }

    fn dd4() -> Filter {
        Filter::from_ints(
            1,
            rat(1, 32),
            [(vec![-3], -1), (vec![-1], 9), (vec![0], 16), (vec![1], 9), (vec![3], -1)],
        )
    }

    #[test]
    fn division_of_second_difference() {
        let h = nabla_delta(&[2]).scale(&int(3)).shift(&[-1]);
        let v = difference_ideal_divide(&h, 2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].1, Filter::delta(1).scale(&int(3)).shift(&[-1]));
    }

    #[test]
    fn division_rejects_low_order() {
        let h = nabla_delta(&[1]);
        assert!(matches!(
            difference_ideal_divide(&h, 2),
            Err(Error::InsufficientVanishingMoments { required: 2, found: 1 })
        ));
    }

    #[test]
    fn division_in_two_dimensions_reconvolves() {
        let h = nabla_delta(&[1, 1])
            .convolve(&Filter::from_ints(2, int(1), [(vec![0, 0], 2), (vec![1, -1], 5)]))
            .unwrap()
            .add(&nabla_delta(&[0, 2]).scale(&rat(1, 3)))
            .unwrap();
        let terms = difference_ideal_divide(&h, 2).unwrap();
        let mut recon = Filter::zero(2);
        for (a, v) in &terms {
            recon = recon.add(&nabla_delta(a).convolve(v).unwrap()).unwrap();
        }
        assert_eq!(recon, h);
    }

    #[test]
    fn split_groups_and_centers() {
        let terms = difference_ideal_divide(&nabla_delta(&[4]).shift(&[-2]), 4).unwrap();
        let f = split_vanishing_factors(&terms, 2, 2, true, true).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].u, nabla_delta(&[2]).shift(&[-1]));
        assert_eq!(f[0].u.star().convolve(&f[0].tu).unwrap(), nabla_delta(&[4]).shift(&[-2]));
        assert!(matches!(
            split_vanishing_factors(&terms, 1, 2, true, true),
            Err(Error::BadOrderSplit { .. })
        ));
    }

    #[test]
    fn one_dimensional_dual_bank_verifies() {
        let ctx = DilationContext::parse("2").unwrap();
        let bank = build_dual_bank(&dd4(), &hat(), &ctx, 1, 1, &DualOptions::default()).unwrap();
        let (vb, vtb) = high_pass_orders(&bank);
        assert!(vb.iter().all(|o| o.value() >= 1));
        assert!(vtb.iter().all(|o| o.value() >= 1));
    }

    #[test]
    fn budget_is_enforced() {
        let ctx = DilationContext::parse("2").unwrap();
        assert!(matches!(
            build_dual_bank(&dd4(), &hat(), &ctx, 2, 1, &DualOptions::default()),
            Err(Error::OrderBudgetExceeded { available: 2, .. })
        ));
    }

    #[test]
    fn defect_index_range() {
        let ctx = DilationContext::parse("2").unwrap();
        assert!(matches!(
            coset_defect(&hat(), &hat(), &ctx, 0),
            Err(Error::CosetIndexOutOfRange(0, 2))
        ));
        assert!(coset_defect(&hat(), &hat(), &ctx, 1).is_ok());
    }
}

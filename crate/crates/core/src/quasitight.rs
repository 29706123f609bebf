//! Signed sum-of-squares factorization and quasi-tight framelet construction.

use num_traits::{One, Signed};

use crate::dual::{difference_ideal_divide, split_vanishing_factors, Origin};
use crate::error::{Error, Result};
use crate::lattice::DilationContext;
use crate::laurent::{int, rat, Filter, Scalar};
use crate::moments::{sum_rule_order, DEFAULT_CAP};
use crate::verify::{identity_failure, WeightedPair};

/// Writes a Hermitian `A` with `vmo(A) >= 2m` as `Σ ε_l u_l⋆ * u_l` with
/// `vmo(u_l) >= m`.
///
/// Each grouped term `p⋆ * q + q⋆ * p` is polarized into
/// `¼|p+q|² - ¼|p-q|²`. When `q` is a rational multiple `λp` the pair
/// collapses to the single term `sign(λ) |√|λ| p|²`.
pub fn hermitian_sos_decompose(a: &Filter, m: u32) -> Result<Vec<(i8, Filter)>> {
    if a.star() != *a {
        return Err(Error::NotHermitian);
    }
    if a.is_zero() {
        return Ok(Vec::new());
    }
    let terms = difference_ideal_divide(a, 2 * m)?;
    let half = rat(1, 2);
    let mut out = Vec::new();
    for t in split_vanishing_factors(&terms, m, m, true, true)? {
        let (p, q) = (t.u, t.tu);
        if let Some((lambda, 1)) = p.ratio_to(&q) {
            let sign = if lambda.is_negative() { -1 } else { 1 };
            out.push((sign, p.mul_sqrt(&lambda.abs())));
            continue;
        }
        out.push((1, p.add(&q)?.scale(&half)));
        out.push((-1, p.sub(&q)?.scale(&half)));
    }
    Ok(out)
}

/// `Σ ε_l u_l⋆ * u_l`, for checking decompositions.
pub fn sos_expand(terms: &[(i8, Filter)], dim: usize) -> Result<Filter> {
    let mut acc = Filter::zero(dim);
    for (e, u) in terms {
        acc = acc.add(&u.star().convolve(u)?.scale(&int(*e as i64)))?;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct QuasiTightBank {
    pub a: Filter,
    pub bs: Vec<Filter>,
    pub eps: Vec<i8>,
    pub origins: Vec<Origin>,
    pub m: u32,
}

impl QuasiTightBank {
    pub fn len(&self) -> usize {
        self.bs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs.is_empty()
    }

    pub fn pairs(&self) -> Vec<WeightedPair<'_>> {
        self.bs
            .iter()
            .zip(&self.eps)
            .map(|(b, &e)| WeightedPair {
                b,
                tb: b,
                weight: int(e as i64),
            })
            .collect()
    }
}

/// Builds an interpolatory quasi-tight framelet filter bank from an
/// interpolatory `a` with `sr(a, M) >= 2m`. The result is verified exactly
/// before it is returned.
pub fn build_quasitight(a: &Filter, ctx: &DilationContext, m: u32) -> Result<QuasiTightBank> {
    if a.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch(a.dim(), ctx.dim()));
    }
    if !a.is_rational() || !ctx.is_interpolatory(a) {
        return Err(Error::NotInterpolatory);
    }
    if !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let sr = sum_rule_order(a, ctx, DEFAULT_CAP).value();
    if sr == 0 {
        return Err(Error::SumRuleZero);
    }
    if m == 0 || 2 * m > sr {
        return Err(Error::OddSumRuleOrder { sr, m });
    }
    let dim = ctx.dim();
    let delta = Filter::delta(dim);
    let d = ctx.det_scalar();
    let mut bs = vec![delta.sub(a)?];
    let mut eps = vec![-1i8];
    let mut origins = vec![Origin::LowPass];
    for j in 1..ctx.det_abs() {
        let gamma = &ctx.gamma()[j];
        let lifted = ctx.upsample_shift(&ctx.coset(a, j), gamma);
        bs.push(delta.sub(&lifted.scale(&d))?.mul_sqrt(&ctx.inv_det()));
        eps.push(1);
        origins.push(Origin::Coset { coset: j });
    }
    for j in 1..ctx.det_abs() {
        let gamma = &ctx.gamma()[j];
        let aj = ctx.coset(a, j);
        let h = delta
            .scale(&ctx.inv_det())
            .sub(&aj.star().convolve(&aj)?.scale(&d))?;
        for (e, u) in hermitian_sos_decompose(&h, m)? {
            bs.push(ctx.upsample_shift(&u, gamma));
            eps.push(e);
            origins.push(Origin::SumOfSquares { coset: j });
        }
    }
    let bank = QuasiTightBank {
        a: a.clone(),
        bs,
        eps,
        origins,
        m,
    };
    if let Some((r, c)) = identity_failure(a, a, &bank.pairs(), ctx) {
        return Err(Error::VerificationFailed(r, c));
    }
    Ok(bank)
}

/// Upper bound on the number of high-pass filters produced by
/// [`build_quasitight`]: `d_M + 2(d_M - 1) C(2m + d - 1, d - 1)`.
pub fn term_count_bound(ctx: &DilationContext, m: u32) -> usize {
    let d = ctx.dim() as u64;
    let n = 2 * m as u64;
    let mut binom = Scalar::one();
    for i in 1..d {
        binom = binom * int((n + i) as i64) / int(i as i64);
    }
    let c: usize = binom.to_integer().try_into().unwrap_or(usize::MAX);
    ctx.det_abs() + 2 * (ctx.det_abs() - 1) * c
}

/// True if every ε is ±1 and the explicit first pair carries ε = -1.
pub fn signs_follow_convention(bank: &QuasiTightBank) -> bool {
    bank.bs.len() == bank.eps.len()
        && bank.eps.first() == Some(&-1)
        && bank.eps.iter().all(|e| *e == 1 || *e == -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::nabla_delta;

    #[test]
    fn squared_difference_collapses_to_one_term() {
        let a = Filter::from_ints(2, int(1), [(vec![-1, 0], -1), (vec![0, 0], 2), (vec![1, 0], -1)]);
        let t = hermitian_sos_decompose(&a, 1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, 1);
        assert_eq!(sos_expand(&t, 2).unwrap(), a);
        assert_eq!(t[0].1.star().convolve(&t[0].1).unwrap(), nabla_delta(&[1, 0]).star().convolve(&nabla_delta(&[1, 0])).unwrap());
    }

    #[test]
    fn zero_and_non_hermitian() {
        assert!(hermitian_sos_decompose(&Filter::zero(1), 1).unwrap().is_empty());
        assert!(matches!(
            hermitian_sos_decompose(&nabla_delta(&[2]), 1),
            Err(Error::NotHermitian)
        ));
    }

    #[test]
    fn mixed_term_re_expands() {
        let p = nabla_delta(&[1, 1]);
        let a = p.star().convolve(&p).unwrap().scale(&int(3))
            .add(&nabla_delta(&[2, 0]).star().convolve(&nabla_delta(&[0, 2])).unwrap())
            .unwrap();
        let a = a.add(&a.star()).unwrap();
        let t = hermitian_sos_decompose(&a, 2).unwrap();
        assert_eq!(sos_expand(&t, 2).unwrap(), a);
    }

    #[test]
    fn haar_has_too_few_sum_rules() {
        let ctx = DilationContext::parse("2").unwrap();
        let haar = Filter::from_ints(1, rat(1, 2), [(vec![0], 1), (vec![1], 1)]);
        assert!(build_quasitight(&haar, &ctx, 1).is_err());
        let hat = Filter::from_ints(1, rat(1, 4), [(vec![-1], 1), (vec![0], 2), (vec![1], 1)]);
        assert!(matches!(build_quasitight(&hat, &ctx, 2), Err(Error::OddSumRuleOrder { sr: 2, m: 2 })));
        let bank = build_quasitight(&hat, &ctx, 1).unwrap();
        assert!(signs_follow_convention(&bank));
        assert!(bank.len() <= term_count_bound(&ctx, 1));
    }
}

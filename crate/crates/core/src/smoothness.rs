//! Numeric estimates of the L2 smoothness exponent of a refinement filter.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::DenseArray;
use crate::error::Result;
use crate::lattice::DilationContext;
use crate::laurent::{monomial_power, multi_indices, nabla_delta, to_f64, Filter, Point};
use crate::moments::{sum_rule_order, DEFAULT_CAP};

/// Arrays larger than this stop the norm iteration early.
const MAX_DENSE_LEN: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sm2Method {
    Eig,
    Norm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sm2Options {
    pub method: Sm2Method,
    /// Also run the other method and warn on disagreement.
    pub cross_check: bool,
    pub max_n: u32,
}

impl Default for Sm2Options {
    fn default() -> Self {
        Sm2Options {
            method: Sm2Method::Eig,
            cross_check: false,
            max_n: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessEstimate {
    pub sm2: f64,
    pub method: Sm2Method,
    pub sum_rule_order: u32,
    /// Leading eigenvalue moduli (eig) or successive ratio estimates (norm).
    pub diagnostics: Vec<f64>,
    pub sm_inf_lower: f64,
    pub sm_inf_upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_method: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `â_n(ξ) = â(ξ) â(M^T ξ) ⋯ â((M^T)^{n-1} ξ)`, exactly.
pub fn filter_power(a: &Filter, ctx: &DilationContext, n: u32) -> Filter {
    assert!(n >= 1, "filter power needs n >= 1");
    let mut an = a.clone();
    for _ in 1..n {
        an = a.convolve(&ctx.upsample(&an)).expect("same dimension");
    }
    an
}

fn taps(f: &Filter) -> Vec<(Point, f64)> {
    f.to_f64_map().into_iter().collect()
}

/// Floating-point `a_n` for `n = 1, 2, …` while arrays stay reasonably small.
pub fn filter_powers_f64(a: &Filter, ctx: &DilationContext, max_n: u32) -> Vec<DenseArray> {
    let t = taps(a);
    let mut out = vec![DenseArray::from_filter(a)];
    while (out.len() as u32) < max_n {
        let up = out.last().unwrap().upsample(ctx.matrix());
        if up.len() > MAX_DENSE_LEN {
            break;
        }
        out.push(up.convolve_taps(&t));
    }
    out
}

fn sm2_from_rho(rho_m: f64, ctx: &DilationContext) -> f64 {
    ctx.dim() as f64 / 2.0 - rho_m.ln() / ctx.spectral_radius().ln()
}

/// Smallest set `K ⊇ S` with `M^{-1}(K + S) ∩ Z^d ⊆ K`.
pub fn invariant_set(support: &[Point], ctx: &DilationContext) -> Vec<Point> {
    let mut k: BTreeSet<Point> = support.iter().cloned().collect();
    loop {
        let mut next = k.clone();
        for p in &k {
            for s in support {
                let q: Point = p.iter().zip(s).map(|(a, b)| a + b).collect();
                let (i, r) = ctx.decompose(&q);
                if i == 0 {
                    next.insert(r);
                }
            }
        }
        if next == k {
            return k.into_iter().collect();
        }
        k = next;
    }
}

/// Orthonormal basis of the span of the moment functionals `k ↦ k^μ`,
/// `|μ| < order`, restricted to `K`.
fn moment_basis(kset: &[Point], order: u32) -> DMatrix<f64> {
    let d = kset.first().map_or(1, |p| p.len());
    let scale = kset
        .iter()
        .flat_map(|p| p.iter().map(|x| x.unsigned_abs()))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let mus: Vec<Vec<u32>> = (0..order).flat_map(|n| multi_indices(d, n)).collect();
    if mus.is_empty() {
        return DMatrix::zeros(kset.len(), 0);
    }
    let p = DMatrix::from_fn(kset.len(), mus.len(), |r, c| {
        let v = monomial_power(&kset[r], &mus[c]);
        let deg: u32 = mus[c].iter().sum();
        num_traits::ToPrimitive::to_f64(&v).unwrap() / scale.powi(deg as i32)
    });
    let svd = p.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let smax = svd.singular_values.max();
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax)
        .collect();
    DMatrix::from_fn(kset.len(), cols.len(), |r, c| u[(r, cols[c])])
}

/// Transition operator estimate: spectral radius of `T_c` on the moment-free
/// subspace of order `2m`, with `c = a⋆ * a`.
fn eig_estimate(a: &Filter, ctx: &DilationContext, m: u32) -> (f64, Vec<f64>) {
    let c = a.star().convolve(a).expect("same dimension");
    let cmap: BTreeMap<Point, f64> = c.to_f64_map();
    let support: Vec<Point> = cmap.keys().cloned().collect();
    let kset = invariant_set(&support, ctx);
    let index: BTreeMap<&Point, usize> = kset.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = kset.len();
    let dm = ctx.det_abs() as f64;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for (ki, k) in kset.iter().enumerate() {
        let mk = ctx.matrix().apply(k);
        for (s, v) in &cmap {
            let j: Point = mk.iter().zip(s).map(|(a, b)| a - b).collect();
            if let Some(&ji) = index.get(&j) {
                t[(ki, ji)] += dm * v;
            }
        }
    }
    let u = moment_basis(&kset, 2 * m);
    let b = if u.ncols() > 0 {
        let ut = u.transpose() * &t;
        t - &u * ut
    } else {
        t
    };
    let mods = leading_eigen_moduli(&b);
    let lambda = mods.first().copied().unwrap_or(0.0);
    let rho_m = (dm * lambda).sqrt();
    (sm2_from_rho(rho_m, ctx), mods)
}

/// Largest eigenvalue moduli, descending. The QR iteration can stall on
/// some transition matrices; the transpose is tried next and, failing that,
/// the spectral radius alone from repeated squaring.
fn leading_eigen_moduli(b: &DMatrix<f64>) -> Vec<f64> {
    use nalgebra::linalg::Schur;
    let schur = Schur::try_new(b.clone(), 1e-12, 20_000)
        .or_else(|| Schur::try_new(b.transpose(), 1e-12, 20_000));
    match schur {
        Some(s) => {
            let mut mods: Vec<f64> = s.complex_eigenvalues().iter().map(|z| z.norm()).collect();
            mods.sort_by(|x, y| y.total_cmp(x));
            mods.truncate(8);
            mods
        }
        None => vec![spectral_radius_by_squaring(b)],
    }
}

/// `lim ‖B^(2^j)‖^(2^-j)`, renormalizing at each squaring.
pub fn spectral_radius_by_squaring(b: &DMatrix<f64>) -> f64 {
    let nrm = b.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    let mut m = b / nrm;
    let mut log = nrm.ln();
    let mut est = nrm;
    for j in 1..=40 {
        m = &m * &m;
        log *= 2.0;
        let n = m.norm();
        if n == 0.0 {
            return 0.0;
        }
        m /= n;
        log += n.ln();
        est = (log / 2f64.powi(j)).exp();
    }
    est
}

fn norm_estimate(a: &Filter, ctx: &DilationContext, m: u32, max_n: u32) -> (f64, Vec<f64>) {
    let powers = filter_powers_f64(a, ctx, max_n.max(2));
    let diffs: Vec<Vec<(Point, f64)>> = multi_indices(ctx.dim(), m)
        .iter()
        .map(|mu| taps(&nabla_delta(mu)))
        .collect();
    let norms: Vec<f64> = powers
        .iter()
        .map(|an| {
            diffs
                .iter()
                .map(|t| an.convolve_taps(t).norm2())
                .fold(0.0, f64::max)
        })
        .collect();
    let dm = ctx.det_abs() as f64;
    let mut ests = Vec::new();
    for n in 1..norms.len() {
        let r = if n >= 2 {
            (norms[n] / norms[n - 2]).sqrt()
        } else {
            norms[n] / norms[n - 1]
        };
        ests.push(sm2_from_rho(dm * r, ctx));
    }
    (*ests.last().expect("at least two powers"), ests)
}

pub fn sm2_estimate(a: &Filter, ctx: &DilationContext, opts: &Sm2Options) -> Result<SmoothnessEstimate> {
    if a.dim() != ctx.dim() {
        return Err(crate::Error::DimensionMismatch(a.dim(), ctx.dim()));
    }
    let m = sum_rule_order(a, ctx, DEFAULT_CAP).value();
    let mut warnings = Vec::new();
    if m == 0 {
        warnings.push("sum rule order is zero; estimate uses the unrestricted operator".into());
    }
    let run = |method| match method {
        Sm2Method::Eig => eig_estimate(a, ctx, m),
        Sm2Method::Norm => norm_estimate(a, ctx, m.max(1), opts.max_n),
    };
    let (sm2, diagnostics) = run(opts.method);
    let other_method = opts.cross_check.then(|| {
        let other = match opts.method {
            Sm2Method::Eig => Sm2Method::Norm,
            Sm2Method::Norm => Sm2Method::Eig,
        };
        run(other).0
    });
    if let Some(o) = other_method {
        if (o - sm2).abs() > 0.1 {
            warnings.push(format!("methods disagree: {sm2:.4} vs {o:.4}"));
        }
    }
    let (lo, hi) = sm_inf_bracket(sm2, ctx.dim());
    Ok(SmoothnessEstimate {
        sm2,
        method: opts.method,
        sum_rule_order: m,
        diagnostics,
        sm_inf_lower: lo,
        sm_inf_upper: hi,
        other_method,
        warnings,
    })
}

/// `sm₂ - d/2 <= sm_∞ <= sm₂`.
pub fn sm_inf_bracket(sm2: f64, d: usize) -> (f64, f64) {
    (sm2 - d as f64 / 2.0, sm2)
}

/// Exact `‖u‖₂²` helper for tests of the norm method.
pub fn l2_norm_sq(u: &Filter) -> f64 {
    u.iter().map(|(_, v)| to_f64(v).powi(2)).sum::<f64>() * u.radicand() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;

    fn haar() -> Filter {
        Filter::from_ints(1, rat(1, 2), [(vec![0], 1), (vec![1], 1)])
    }

    #[test]
    fn power_of_haar() {
        let ctx = DilationContext::parse("2").unwrap();
        let a2 = filter_power(&haar(), &ctx, 2);
        let want = Filter::from_ints(1, rat(1, 4), (0..4).map(|k| (vec![k], 1)));
        assert_eq!(a2, want);
        assert_eq!(filter_power(&Filter::delta(1), &ctx, 3), Filter::delta(1));
        let dense = filter_powers_f64(&haar(), &ctx, 3);
        assert!((dense[2].norm2() - l2_norm_sq(&filter_power(&haar(), &ctx, 3)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn haar_and_hat() {
        let ctx = DilationContext::parse("2").unwrap();
        let both = Sm2Options {
            cross_check: true,
            ..Sm2Options::default()
        };
        let e = sm2_estimate(&haar(), &ctx, &both).unwrap();
        assert!((e.sm2 - 0.5).abs() < 0.02, "{e:?}");
        assert!((e.other_method.unwrap() - 0.5).abs() < 0.02, "{e:?}");
        let hat = Filter::from_ints(1, rat(1, 4), [(vec![-1], 1), (vec![0], 2), (vec![1], 1)]);
        let e = sm2_estimate(&hat, &ctx, &both).unwrap();
        assert!((e.sm2 - 1.5).abs() < 0.02, "{e:?}");
    }

    #[test]
    fn bracket() {
        assert_eq!(sm_inf_bracket(1.0, 2), (0.0, 1.0));
    }
}

//! Exact sparse multivariate Laurent polynomials over `Q·√k`.
//!
//! A [`Filter`] is a finitely supported sequence on `Z^d`. Its Fourier series
//! is the Laurent polynomial `Σ u(n) z^n` with `z_i = e^{-iξ_i}`. Every
//! coefficient shares one square-free radicand `k`, so the value of the
//! coefficient stored as `q` is `q·√k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;
pub type Point = Vec<i64>;
pub type MultiIndex = Vec<u32>;

pub fn rat(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Scalar) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Splits `n = s²·r` with `r` square-free.
pub fn square_free_split(n: u64) -> (u64, u64) {
    assert!(n > 0, "radicand must be positive");
    let mut s = 1u64;
    let mut r = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    r *= rest;
    (s, r)
}

/// Tight bounding box `[lo_1, hi_1] × … × [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportBox {
    pub lo: Point,
    pub hi: Point,
}

impl SupportBox {
    pub fn new(lo: Point, hi: Point) -> Self {
        assert_eq!(lo.len(), hi.len());
        SupportBox { lo, hi }
    }

    pub fn cube(dim: usize, lo: i64, hi: i64) -> Self {
        SupportBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as usize)
            .product()
    }

    /// Minkowski sum.
    pub fn add(&self, other: &SupportBox) -> SupportBox {
        SupportBox::new(
            self.lo.iter().zip(&other.lo).map(|(a, b)| a + b).collect(),
            self.hi.iter().zip(&other.hi).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn negate(&self) -> SupportBox {
        SupportBox::new(
            self.hi.iter().map(|x| -x).collect(),
            self.lo.iter().map(|x| -x).collect(),
        )
    }

    pub fn grow(&self, r: i64) -> SupportBox {
        SupportBox::new(
            self.lo.iter().map(|x| x - r).collect(),
            self.hi.iter().map(|x| x + r).collect(),
        )
    }

    pub fn is_subset_of(&self, other: &SupportBox) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a >= b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a <= b)
    }

    /// All lattice points, lexicographic with the first coordinate slowest.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.len());
        if self.is_empty() {
            return out;
        }
        let mut cur = self.lo.clone();
        loop {
            out.push(cur.clone());
            let mut i = self.dim();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lo[i];
            }
        }
    }
}

impl fmt::Display for SupportBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| format!("[{l},{h}]"))
            .collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// A finitely supported filter `u ∈ l_0(Z^d)` with coefficients in `Q·√k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    dim: usize,
    radicand: u64,
    coeffs: BTreeMap<Point, Scalar>,
    support: Option<SupportBox>,
}

impl Filter {
    pub fn zero(dim: usize) -> Self {
        Filter {
            dim,
            radicand: 1,
            coeffs: BTreeMap::new(),
            support: None,
        }
    }

    pub fn delta(dim: usize) -> Self {
        Filter::monomial(vec![0; dim], Scalar::one())
    }

    pub fn monomial(at: Point, value: Scalar) -> Self {
        let dim = at.len();
        Filter::from_coeffs(dim, [(at, value)])
    }

    /// Builds a rational filter; zero coefficients are dropped and repeated
    /// points are summed.
    pub fn from_coeffs<I>(dim: usize, coeffs: I) -> Self
    where
        I: IntoIterator<Item = (Point, Scalar)>,
    {
        let mut map: BTreeMap<Point, Scalar> = BTreeMap::new();
        for (p, v) in coeffs {
            assert_eq!(p.len(), dim, "point dimension mismatch");
            *map.entry(p).or_insert_with(Scalar::zero) += v;
        }
        Filter::from_map(dim, 1, map)
    }

    /// Builds a filter from integer coefficients times a common rational scale.
    pub fn from_ints<I>(dim: usize, scale: Scalar, coeffs: I) -> Self
    where
        I: IntoIterator<Item = (Point, i64)>,
    {
        Filter::from_coeffs(
            dim,
            coeffs.into_iter().map(|(p, v)| (p, int(v) * &scale)),
        )
    }

    fn from_map(dim: usize, radicand: u64, mut coeffs: BTreeMap<Point, Scalar>) -> Self {
        coeffs.retain(|_, v| !v.is_zero());
        let radicand = if coeffs.is_empty() { 1 } else { radicand };
        let support = tight_box(dim, &coeffs);
        Filter {
            dim,
            radicand,
            coeffs,
            support,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> Option<&SupportBox> {
        self.support.as_ref()
    }

    /// Rational part of the coefficient at `p` (the value is this times `√k`).
    pub fn coeff(&self, p: &[i64]) -> Scalar {
        self.coeffs.get(p).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Scalar)> {
        self.coeffs.iter()
    }

    /// Rational part of `û(0)`.
    pub fn sum(&self) -> Scalar {
        self.coeffs.values().fold(Scalar::zero(), |acc, v| acc + v)
    }

    /// `û(0) = 1` exactly.
    pub fn is_normalized(&self) -> bool {
        self.radicand == 1 && self.sum().is_one()
    }

    fn check_dim(&self, other: &Filter) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Filter) -> Result<Filter> {
        self.check_dim(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.radicand != other.radicand {
            return Err(Error::RadicandMismatch(self.radicand, other.radicand));
        }
        let mut map = self.coeffs.clone();
        for (p, v) in &other.coeffs {
            *map.entry(p.clone()).or_insert_with(Scalar::zero) += v;
        }
        Ok(Filter::from_map(self.dim, self.radicand, map))
    }

    pub fn sub(&self, other: &Filter) -> Result<Filter> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Filter {
        self.scale(&-Scalar::one())
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, s: &Scalar) -> Filter {
        if s.is_zero() {
            return Filter::zero(self.dim);
        }
        Filter {
            dim: self.dim,
            radicand: self.radicand,
            coeffs: self.coeffs.iter().map(|(p, v)| (p.clone(), v * s)).collect(),
            support: self.support.clone(),
        }
    }

    /// Multiplies by `√k` for a positive rational `k`, folding square factors
    /// into the coefficients so the radicand stays square-free.
    pub fn mul_sqrt(&self, k: &Scalar) -> Filter {
        assert!(!k.is_negative(), "square root of a negative rational");
        if k.is_zero() || self.is_zero() {
            return Filter::zero(self.dim);
        }
        let p = k.numer().to_u64().expect("radicand numerator too large");
        let q = k.denom().to_u64().expect("radicand denominator too large");
        let (s, r) = square_free_split(self.radicand * p * q);
        let factor = BigRational::new(BigInt::from(s), BigInt::from(q));
        let mut out = self.scale(&factor);
        out.radicand = r;
        out
    }

    /// Returns the filter with the radical factor removed, i.e. the rational
    /// part only. Useful for support and moment computations.
    pub fn rational_part(&self) -> Filter {
        let mut out = self.clone();
        out.radicand = 1;
        out
    }

    pub fn convolve(&self, other: &Filter) -> Result<Filter> {
        self.check_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Filter::zero(self.dim));
        }
        let mut map: BTreeMap<Point, Scalar> = BTreeMap::new();
        for (p, u) in &self.coeffs {
            for (q, v) in &other.coeffs {
                let k: Point = p.iter().zip(q).map(|(a, b)| a + b).collect();
                *map.entry(k).or_insert_with(Scalar::zero) += u * v;
            }
        }
        let (s, r) = square_free_split(self.radicand * other.radicand);
        let out = Filter::from_map(self.dim, 1, map);
        let mut out = out.scale(&int(s as i64));
        if !out.is_zero() {
            out.radicand = r;
        }
        Ok(out)
    }

    /// `u⋆(k) = conj(u(-k))`; coefficients are real so this reverses indices.
    pub fn star(&self) -> Filter {
        let map = self
            .coeffs
            .iter()
            .map(|(p, v)| (p.iter().map(|x| -x).collect(), v.clone()))
            .collect();
        Filter::from_map(self.dim, self.radicand, map)
    }

    /// Multiplication by the monomial `z^s`: `result(k) = u(k - s)`.
    pub fn shift(&self, s: &[i64]) -> Filter {
        assert_eq!(s.len(), self.dim);
        let map = self
            .coeffs
            .iter()
            .map(|(p, v)| (p.iter().zip(s).map(|(a, b)| a + b).collect(), v.clone()))
            .collect();
        Filter::from_map(self.dim, self.radicand, map)
    }

    /// Maps every coefficient position through `f`; `f` must be injective on
    /// the support.
    pub fn map_points<F: Fn(&Point) -> Point>(&self, f: F) -> Filter {
        let map = self.coeffs.iter().map(|(p, v)| (f(p), v.clone())).collect();
        let dim = self.coeffs.keys().next().map(|p| f(p).len()).unwrap_or(self.dim);
        Filter::from_map(dim, self.radicand, map)
    }

    /// Fourier series `û(ξ) = √k Σ u(n) e^{-i n·ξ}` in double precision.
    pub fn evaluate_at(&self, xi: &[f64]) -> Complex64 {
        assert_eq!(xi.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, v) in &self.coeffs {
            let phase: f64 = p.iter().zip(xi).map(|(n, x)| *n as f64 * x).sum();
            acc += Complex64::from_polar(to_f64(v), -phase);
        }
        acc * (self.radicand as f64).sqrt()
    }

    /// Coefficient values (including the radical) as floats.
    pub fn to_f64_map(&self) -> BTreeMap<Point, f64> {
        let r = (self.radicand as f64).sqrt();
        self.coeffs.iter().map(|(p, v)| (p.clone(), to_f64(v) * r)).collect()
    }

    /// If `other = λ·self` for some `λ ∈ Q·√r`, returns `λ` as `(q, r)` with
    /// `λ = q·√r`.
    pub fn ratio_to(&self, other: &Filter) -> Option<(Scalar, u64)> {
        if self.is_zero() || other.is_zero() || self.coeffs.len() != other.coeffs.len() {
            return None;
        }
        let mut ratio: Option<Scalar> = None;
        for ((p, u), (q, v)) in self.coeffs.iter().zip(&other.coeffs) {
            if p != q {
                return None;
            }
            let r = v / u;
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev == r => {}
                Some(_) => return None,
            }
        }
        // other = (q_o/q_s)·√(k_o/k_s) · self
        let (s, r) = square_free_split(self.radicand * other.radicand);
        let q = ratio.unwrap() * BigRational::new(BigInt::from(s), BigInt::from(self.radicand));
        Some((q, r))
    }
}

fn tight_box(dim: usize, coeffs: &BTreeMap<Point, Scalar>) -> Option<SupportBox> {
    let mut it = coeffs.keys();
    let first = it.next()?;
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in it {
        for i in 0..dim {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    Some(SupportBox::new(lo, hi))
}

/// `∇^μ δ`, the filter with Fourier series `Π_i (1 - e^{-iξ_i})^{μ_i}`.
pub fn nabla_delta(mu: &[u32]) -> Filter {
    let dim = mu.len();
    let mut out = Filter::delta(dim);
    for (i, &m) in mu.iter().enumerate() {
        let mut e = vec![0; dim];
        e[i] = 1;
        let step = Filter::from_coeffs(
            dim,
            [(vec![0; dim], Scalar::one()), (e, -Scalar::one())],
        );
        for _ in 0..m {
            out = out.convolve(&step).expect("same dimension");
        }
    }
    out
}

/// Multi-indices `μ ∈ N_0^d` with `|μ| = n`, in graded-lex order:
/// `(n,0,…) , (n-1,1,…), …, (0,…,n)`.
pub fn multi_indices(dim: usize, n: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == dim {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            rec(dim, n - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, n, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// `p^μ` as an exact integer.
pub fn monomial_power(p: &[i64], mu: &[u32]) -> BigInt {
    p.iter()
        .zip(mu)
        .fold(BigInt::one(), |acc, (&x, &e)| acc * BigInt::from(x).pow(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1(pairs: &[(i64, i64)]) -> Filter {
        Filter::from_ints(1, int(1), pairs.iter().map(|&(p, v)| (vec![p], v)))
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let u = f1(&[(0, 3), (2, -1)]);
        assert_eq!(u.add(&Filter::zero(1)).unwrap(), u);
        let d = Filter::delta(2);
        assert!(d.add(&d.neg()).unwrap().is_zero());
    }

    #[test]
    fn incompatible_radicals_fail() {
        let a = Filter::delta(1).mul_sqrt(&int(2));
        let b = Filter::delta(1).mul_sqrt(&int(3));
        assert!(matches!(a.add(&b), Err(Error::RadicandMismatch(2, 3))));
    }

    #[test]
    fn convolution_identity_and_square() {
        let u = f1(&[(-1, 2), (4, 7)]);
        assert_eq!(Filter::delta(1).convolve(&u).unwrap(), u);
        let n = nabla_delta(&[1, 0]);
        let sq = n.convolve(&n).unwrap();
        assert_eq!(
            sq,
            Filter::from_ints(2, int(1), [(vec![0, 0], 1), (vec![1, 0], -2), (vec![2, 0], 1)])
        );
    }

    #[test]
    fn radical_normalization() {
        let r2 = Filter::delta(1).mul_sqrt(&int(2));
        let prod = r2.convolve(&r2).unwrap();
        assert_eq!(prod.radicand(), 1);
        assert_eq!(prod, Filter::delta(1).scale(&int(2)));
        // √(1/2) = √2/2
        let h = Filter::delta(1).mul_sqrt(&rat(1, 2));
        assert_eq!(h.radicand(), 2);
        assert_eq!(h.coeff(&[0]), rat(1, 2));
        // √12 = 2√3
        let t = Filter::delta(1).mul_sqrt(&int(12));
        assert_eq!((t.radicand(), t.coeff(&[0])), (3, int(2)));
    }

    #[test]
    fn star_reverses_and_is_involution() {
        assert_eq!(Filter::delta(2).star(), Filter::delta(2));
        let u = Filter::from_ints(2, int(1), [(vec![0, 0], 1), (vec![1, 0], -2)]);
        let s = u.star();
        assert_eq!(s.coeff(&[-1, 0]), int(-2));
        assert_eq!(s.star(), u);
        assert_eq!(s.support().unwrap(), &u.support().unwrap().negate());
    }

    #[test]
    fn nabla_examples() {
        assert_eq!(nabla_delta(&[0, 0]), Filter::delta(2));
        assert_eq!(
            nabla_delta(&[1, 0]),
            Filter::from_ints(2, int(1), [(vec![0, 0], 1), (vec![1, 0], -1)])
        );
        // independent expansion of (1 - z1)(1 - z2)
        let expected = Filter::from_ints(
            2,
            int(1),
            [(vec![0, 0], 1), (vec![1, 0], -1), (vec![0, 1], -1), (vec![1, 1], 1)],
        );
        assert_eq!(nabla_delta(&[1, 1]), expected);
    }

    #[test]
    fn evaluate_examples() {
        let one = Filter::delta(2).evaluate_at(&[0.3, -1.2]);
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = nabla_delta(&[1, 0]).evaluate_at(&[std::f64::consts::PI, 0.0]);
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn multi_index_order() {
        assert_eq!(multi_indices(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(3, 1).len(), 3);
        assert_eq!(multi_indices(1, 4), vec![vec![4]]);
    }

    #[test]
    fn ratio_detects_radical_multiples() {
        let u = f1(&[(0, 1), (1, -3)]);
        let v = u.mul_sqrt(&int(2)).scale(&int(-1));
        assert_eq!(u.ratio_to(&v), Some((int(-1), 2)));
        assert_eq!(u.ratio_to(&f1(&[(0, 1), (1, 3)])), None);
    }

    #[test]
    fn support_box_points_order() {
        let b = SupportBox::new(vec![0, -1], vec![1, 0]);
        assert_eq!(
            b.points(),
            vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]
        );
        assert_eq!(b.len(), 4);
    }
}

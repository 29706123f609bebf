//! Dilation matrices, coset representatives and polyphase split/merge.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::laurent::{int, Filter, Point, Scalar};

/// An expansive integer matrix together with `Γ_M`, `Ω_M` and `ρ(M)`.
#[derive(Clone, Debug)]
pub struct DilationContext {
    m: IntMatrix,
    adj: IntMatrix,
    det: i64,
    gamma: Vec<Point>,
    omega: Vec<Vec<Scalar>>,
    key_to_index: HashMap<Vec<i64>, usize>,
    spectral_radius: f64,
}

/// Residue key of `p` modulo `M Z^d`: `adj(M) p` reduced modulo `|det M|`.
fn residue_key(adj: &IntMatrix, det: i64, p: &[i64]) -> Vec<i64> {
    let s = det.signum();
    adj.apply(p)
        .into_iter()
        .map(|x| (s * x).rem_euclid(det.abs()))
        .collect()
}

/// Enumerates `M[0,1)^d ∩ Z^d` in colex order with the origin first.
fn fundamental_points(m: &IntMatrix) -> Vec<Point> {
    let d = m.dim();
    let det = m.det();
    let adj = m.adjugate();
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for i in 0..d {
        for j in 0..d {
            let v = m.get(i, j);
            if v < 0 {
                lo[i] += v;
            } else {
                hi[i] += v;
            }
        }
    }
    let bx = crate::laurent::SupportBox::new(lo, hi);
    let mut pts: Vec<Point> = bx
        .points()
        .into_iter()
        .filter(|k| {
            adj.apply(k).iter().all(|&x| {
                // 0 <= x/det < 1
                let (x, dd) = if det < 0 { (-x, -det) } else { (x, det) };
                0 <= x && x < dd
            })
        })
        .collect();
    pts.sort_by(|a, b| {
        let za = a.iter().all(|&x| x == 0);
        let zb = b.iter().all(|&x| x == 0);
        zb.cmp(&za).then_with(|| a.iter().rev().cmp(b.iter().rev()))
    });
    pts
}

pub fn spectral_radius_and_min(m: &IntMatrix) -> (f64, f64) {
    let ev = m.to_f64().complex_eigenvalues();
    let mods: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
    let max = mods.iter().cloned().fold(0.0, f64::max);
    let min = mods.iter().cloned().fold(f64::INFINITY, f64::min);
    (max, min)
}

impl DilationContext {
    pub fn new(m: IntMatrix) -> Result<Self> {
        let (rho, min) = spectral_radius_and_min(&m);
        if min <= 1.0 + 1e-9 {
            return Err(Error::NotExpansive(min));
        }
        let det = m.det();
        let adj = m.adjugate();
        let gamma = fundamental_points(&m);
        debug_assert_eq!(gamma.len() as i64, det.abs());
        let key_to_index = gamma
            .iter()
            .enumerate()
            .map(|(i, g)| (residue_key(&adj, det, g), i))
            .collect();
        // Ω_M = M^{-T} Γ_{M^T}, which lies in [0,1)^d by construction.
        let mt = m.transpose();
        let omega = fundamental_points(&mt)
            .iter()
            .map(|g| mt.solve_rational(&g.iter().map(|&x| int(x)).collect::<Vec<_>>()))
            .collect();
        Ok(DilationContext {
            m,
            adj,
            det,
            gamma,
            omega,
            key_to_index,
            spectral_radius: rho,
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        DilationContext::new(IntMatrix::from_rows(rows)?)
    }

    pub fn parse(s: &str) -> Result<Self> {
        DilationContext::new(IntMatrix::parse(s)?)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// `d_M = |det M|`.
    pub fn det_abs(&self) -> usize {
        self.det.unsigned_abs() as usize
    }

    pub fn gamma(&self) -> &[Point] {
        &self.gamma
    }

    pub fn omega(&self) -> &[Vec<Scalar>] {
        &self.omega
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Writes `p = γ_i + M k` and returns `(i, k)`.
    pub fn decompose(&self, p: &[i64]) -> (usize, Point) {
        let i = self.key_to_index[&residue_key(&self.adj, self.det, p)];
        let diff: Vec<i64> = p.iter().zip(&self.gamma[i]).map(|(a, b)| a - b).collect();
        let k = self
            .adj
            .apply(&diff)
            .into_iter()
            .map(|x| x / self.det)
            .collect();
        (i, k)
    }

    pub fn coset_index(&self, gamma: &[i64]) -> Option<usize> {
        let (i, k) = self.decompose(gamma);
        (self.gamma[i] == gamma && k.iter().all(|&x| x == 0)).then_some(i)
    }

    pub fn in_lattice(&self, p: &[i64]) -> bool {
        self.decompose(p).0 == 0
    }

    /// `M^{-1} p` over the rationals.
    pub fn inverse_apply(&self, p: &[Scalar]) -> Vec<Scalar> {
        let d = BigRational::from_integer(BigInt::from(self.det));
        self.adj
            .apply_rational(p)
            .into_iter()
            .map(|x| x / &d)
            .collect()
    }

    /// Polyphase components `u^{[γ,M]}(k) = u(γ + Mk)`, ordered like `Γ_M`.
    pub fn coset_split(&self, u: &Filter) -> Vec<Filter> {
        let mut parts: Vec<Vec<(Point, Scalar)>> = vec![Vec::new(); self.gamma.len()];
        for (p, v) in u.iter() {
            let (i, k) = self.decompose(p);
            parts[i].push((k, v.clone()));
        }
        parts
            .into_iter()
            .map(|c| {
                let f = Filter::from_coeffs(self.dim(), c);
                if f.is_zero() {
                    f
                } else {
                    f.mul_sqrt(&int(u.radicand() as i64))
                }
            })
            .collect()
    }

    /// Single polyphase component for coset index `j`.
    pub fn coset(&self, u: &Filter, j: usize) -> Filter {
        self.coset_split(u).swap_remove(j)
    }

    /// Inverse of [`coset_split`](Self::coset_split).
    pub fn coset_merge(&self, parts: &[Filter]) -> Result<Filter> {
        if parts.len() < self.gamma.len() {
            return Err(Error::MissingCoset(self.gamma[parts.len()].clone()));
        }
        if parts.len() > self.gamma.len() {
            return Err(Error::CosetIndexOutOfRange(parts.len(), self.gamma.len()));
        }
        let mut out = Filter::zero(self.dim());
        for (g, part) in self.gamma.iter().zip(parts) {
            out = out.add(&self.upsample_shift(part, g))?;
        }
        Ok(out)
    }

    /// `result(γ + Mk) = u(k)`, zero off that coset.
    pub fn upsample_shift(&self, u: &Filter, gamma: &[i64]) -> Filter {
        u.map_points(|k| {
            self.m
                .apply(k)
                .into_iter()
                .zip(gamma)
                .map(|(a, b)| a + b)
                .collect()
        })
    }

    pub fn upsample(&self, u: &Filter) -> Filter {
        self.upsample_shift(u, &vec![0; self.dim()])
    }

    /// `u(Mk) = d_M^{-1} δ(k)`.
    pub fn is_interpolatory(&self, u: &Filter) -> bool {
        let c0 = self.coset(u, 0);
        c0 == Filter::delta(self.dim()).scale(&self.inv_det())
    }

    /// `d_M^{-1}` as a rational.
    pub fn inv_det(&self) -> Scalar {
        Scalar::new(BigInt::one(), BigInt::from(self.det_abs()))
    }

    pub fn det_scalar(&self) -> Scalar {
        int(self.det_abs() as i64)
    }
}

/// True iff `γ_i - γ_j ∉ M Z^d` for all distinct pairs.
pub fn residues_distinct(ctx: &DilationContext) -> bool {
    let g = ctx.gamma();
    (0..g.len()).all(|i| {
        (0..i).all(|j| {
            let diff: Vec<i64> = g[i].iter().zip(&g[j]).map(|(a, b)| a - b).collect();
            !ctx.in_lattice(&diff)
        })
    })
}

/// Whether `ω` entries lie in `[0,1)`.
pub fn omega_in_unit_cube(ctx: &DilationContext) -> bool {
    ctx.omega()
        .iter()
        .all(|w| w.iter().all(|x| *x >= Scalar::zero() && *x < Scalar::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;

    fn sqrt2() -> DilationContext {
        DilationContext::parse("1 1; 1 -1").unwrap()
    }

    #[test]
    fn gamma_sets() {
        assert_eq!(sqrt2().gamma(), &[vec![0, 0], vec![1, 0]]);
        let two = DilationContext::parse("2 0; 0 2").unwrap();
        assert_eq!(two.gamma(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let s3 = DilationContext::parse("1 -2; 2 -1").unwrap();
        assert_eq!(s3.gamma(), &[vec![0, 0], vec![-1, 0], vec![0, 1]]);
        assert!(residues_distinct(&s3));
        assert!(omega_in_unit_cube(&s3));
        assert_eq!(s3.omega().len(), 3);
    }

    #[test]
    fn rejects_non_expansive() {
        assert!(matches!(
            DilationContext::parse("1 0; 0 2"),
            Err(Error::NotExpansive(_))
        ));
        assert!(matches!(DilationContext::parse("1 2"), Err(Error::NotSquare)));
    }

    #[test]
    fn omega_for_quincunx() {
        let w = sqrt2().omega().to_vec();
        assert_eq!(w, vec![vec![rat(0, 1), rat(0, 1)], vec![rat(1, 2), rat(1, 2)]]);
    }

    #[test]
    fn split_of_delta() {
        let ctx = DilationContext::parse("2 0; 0 2").unwrap();
        let parts = ctx.coset_split(&Filter::delta(2));
        assert_eq!(parts[0], Filter::delta(2));
        assert!(parts[1..].iter().all(|p| p.is_zero()));
    }

    #[test]
    fn merge_of_constant_coset() {
        let ctx = DilationContext::parse("2 0; 0 2").unwrap();
        let mut parts = vec![Filter::zero(2); 4];
        parts[0] = Filter::delta(2).scale(&ctx.inv_det());
        let m = ctx.coset_merge(&parts).unwrap();
        assert_eq!(m, Filter::delta(2).scale(&rat(1, 4)));
        assert!(ctx.coset_merge(&vec![Filter::zero(2); 4]).unwrap().is_zero());
        assert!(matches!(
            ctx.coset_merge(&parts[..2]),
            Err(Error::MissingCoset(_))
        ));
    }

    #[test]
    fn upsample_shift_examples() {
        let two = DilationContext::parse("2 0; 0 2").unwrap();
        assert_eq!(
            two.upsample_shift(&Filter::delta(2), &[1, 0]),
            Filter::monomial(vec![1, 0], int(1))
        );
        let n = crate::laurent::nabla_delta(&[1, 0]);
        let up = sqrt2().upsample_shift(&n, &[1, 0]);
        assert_eq!(
            up,
            Filter::from_ints(2, int(1), [(vec![1, 0], 1), (vec![2, 1], -1)])
        );
        assert_eq!(sqrt2().coset(&up, 1), n);
    }

    #[test]
    fn interpolatory_flags() {
        let two = DilationContext::parse("2 0; 0 2").unwrap();
        assert!(!two.is_interpolatory(&Filter::delta(2)));
        assert!(two.is_interpolatory(&Filter::delta(2).scale(&rat(1, 4))));
    }

    #[test]
    fn radical_cosets_round_trip() {
        let ctx = DilationContext::parse("3").unwrap();
        let u = Filter::from_ints(1, rat(1, 5), [(vec![-2], 1), (vec![0], 3), (vec![4], -7)])
            .mul_sqrt(&int(3));
        let parts = ctx.coset_split(&u);
        assert!(parts.iter().filter(|p| !p.is_zero()).all(|p| p.radicand() == 3));
        assert_eq!(ctx.coset_merge(&parts).unwrap(), u);
    }
}

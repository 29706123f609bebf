//! Parametric design of interpolatory filters: the affine family of all
//! filters on a box satisfying sum rules, interpolation and symmetry.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::io::parse_rational;
use crate::lattice::DilationContext;
use crate::laurent::{int, monomial_power, multi_indices, Filter, Point, Scalar, SupportBox};
use crate::linalg::LinearSystem;
use crate::moments::{sum_rule_order, DEFAULT_CAP};
use crate::smoothness::{sm2_estimate, Sm2Options, SmoothnessEstimate};
use crate::symmetry::{SymmetryGroup, SymmetryType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraints {
    pub sum_rules: u32,
    pub interpolatory: bool,
    pub symmetry: Option<SymmetryType>,
}

/// `{ base + Σ t_i directions_i }`, indexed by the points of `support`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFilterFamily {
    pub dilation: IntMatrix,
    pub support: SupportBox,
    pub constraints: Constraints,
    pub base: Vec<Scalar>,
    pub directions: Vec<Vec<Scalar>>,
}

fn push_sum_rules(sys: &mut LinearSystem, pts: &[Point], ctx: &DilationContext, m: u32) {
    let coset: Vec<usize> = pts.iter().map(|p| ctx.decompose(p).0).collect();
    for n in 0..m {
        for mu in multi_indices(ctx.dim(), n) {
            for g in 1..ctx.det_abs() {
                let row = pts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| coset[*i] == g || coset[*i] == 0)
                    .map(|(i, p)| {
                        let v = Scalar::from_integer(monomial_power(p, &mu));
                        (i, if coset[i] == g { v } else { -v })
                    })
                    .collect();
                sys.push(row, Scalar::zero());
            }
        }
    }
}

fn push_symmetry(sys: &mut LinearSystem, pts: &[Point], bx: &SupportBox, t: &SymmetryType) -> Result<()> {
    if !t.is_admissible() {
        return Err(Error::InvalidArgument(format!(
            "center {} is not admissible for the group",
            t.center_string()
        )));
    }
    let index = |p: &Point| pts.binary_search(p).ok();
    let id = IntMatrix::identity(bx.dim());
    let eps = int(t.sign as i64);
    for e in t.group.elements() {
        if *e == id {
            continue;
        }
        // q = E(p - c) + c = Ep + (I - E)c, with (I - E)c integral.
        let shift: Vec<i64> = id
            .sub(e)
            .apply_rational(&t.center)
            .iter()
            .map(|v| i64::try_from(v.to_integer()).expect("small center"))
            .collect();
        for (i, p) in pts.iter().enumerate() {
            let q: Point = e.apply(p).iter().zip(&shift).map(|(a, b)| a + b).collect();
            match index(&q) {
                Some(j) => sys.push(vec![(j, Scalar::one()), (i, -eps.clone())], Scalar::zero()),
                None => sys.push(vec![(i, Scalar::one())], Scalar::zero()),
            }
        }
    }
    Ok(())
}

/// Solves the combined linear constraints on the box exactly.
pub fn parametrize(bx: &SupportBox, ctx: &DilationContext, c: &Constraints) -> Result<AffineFilterFamily> {
    if bx.dim() != ctx.dim() || bx.is_empty() {
        return Err(Error::InvalidArgument("support box must be nonempty and match the dilation".into()));
    }
    if let Some(t) = &c.symmetry {
        if !crate::symmetry::is_compatible(ctx, &t.group) {
            return Err(Error::NotCompatible);
        }
    }
    let pts = bx.points();
    let mut sys = LinearSystem::new(pts.len());
    sys.push((0..pts.len()).map(|i| (i, Scalar::one())).collect(), Scalar::one());
    push_sum_rules(&mut sys, &pts, ctx, c.sum_rules);
    if c.interpolatory {
        for (i, p) in pts.iter().enumerate() {
            let (g, k) = ctx.decompose(p);
            if g == 0 {
                let rhs = if k.iter().all(|x| *x == 0) { ctx.inv_det() } else { Scalar::zero() };
                sys.push(vec![(i, Scalar::one())], rhs);
            }
        }
    }
    if let Some(t) = &c.symmetry {
        push_symmetry(&mut sys, &pts, bx, t)?;
    }
    let sol = sys.solve().ok_or(Error::Infeasible)?;
    Ok(AffineFilterFamily {
        dilation: ctx.matrix().clone(),
        support: bx.clone(),
        constraints: c.clone(),
        base: sol.particular,
        directions: sol.nullspace,
    })
}

impl AffineFilterFamily {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    fn values(&self, params: &[Scalar]) -> Vec<Scalar> {
        let mut v = self.base.clone();
        for (t, dir) in params.iter().zip(&self.directions) {
            if t.is_zero() {
                continue;
            }
            for (x, d) in v.iter_mut().zip(dir) {
                *x += t * d;
            }
        }
        v
    }

    fn to_filter(&self, values: Vec<Scalar>) -> Filter {
        Filter::from_coeffs(self.support.dim(), self.support.points().into_iter().zip(values))
    }

    /// `base + Σ t_i directions_i`, with every constraint re-checked exactly.
    pub fn instantiate(&self, params: &[Scalar]) -> Result<Filter> {
        if params.len() != self.dimension() {
            return Err(Error::Arity {
                expected: self.dimension(),
                got: params.len(),
            });
        }
        let f = self.to_filter(self.values(params));
        let ctx = DilationContext::new(self.dilation.clone())?;
        if !f.is_normalized() {
            return Err(Error::ConstraintViolation("normalization".into()));
        }
        if self.constraints.interpolatory && !ctx.is_interpolatory(&f) {
            return Err(Error::ConstraintViolation("interpolatory".into()));
        }
        if sum_rule_order(&f, &ctx, self.constraints.sum_rules + 1).value() < self.constraints.sum_rules {
            return Err(Error::ConstraintViolation("sum rules".into()));
        }
        if let Some(t) = &self.constraints.symmetry {
            if !t.holds_for(&f) {
                return Err(Error::ConstraintViolation(format!("symmetry {t}")));
            }
        }
        Ok(f)
    }

    /// Re-expresses the family so that parameter `i` is the coefficient at
    /// `coords[i]`.
    pub fn reparametrize(&self, coords: &[Point]) -> Result<AffineFilterFamily> {
        let k = self.dimension();
        if coords.len() != k {
            return Err(Error::Arity {
                expected: k,
                got: coords.len(),
            });
        }
        let pts = self.support.points();
        let idx: Vec<usize> = coords
            .iter()
            .map(|c| {
                pts.binary_search(c)
                    .map_err(|_| Error::InvalidArgument(format!("coordinate {c:?} outside the support box")))
            })
            .collect::<Result<_>>()?;
        // Solve D x = e_j column by column, D[i][j] = directions_j(coords_i).
        let mut inv = vec![vec![Scalar::zero(); k]; k];
        for j in 0..k {
            let mut sys = LinearSystem::new(k);
            for (i, &p) in idx.iter().enumerate() {
                let row = (0..k).map(|c| (c, self.directions[c][p].clone())).collect();
                sys.push(row, if i == j { Scalar::one() } else { Scalar::zero() });
            }
            let sol = sys.solve().filter(|s| s.nullspace.is_empty()).ok_or_else(|| {
                Error::InvalidArgument("chosen coordinates do not determine the parameters".into())
            })?;
            for (r, row) in inv.iter_mut().enumerate() {
                row[j] = sol.particular[r].clone();
            }
        }
        let n = self.base.len();
        let directions: Vec<Vec<Scalar>> = (0..k)
            .map(|j| {
                (0..n)
                    .map(|p| (0..k).fold(Scalar::zero(), |acc, c| acc + &self.directions[c][p] * &inv[c][j]))
                    .collect()
            })
            .collect();
        let base_at: Vec<Scalar> = idx.iter().map(|&p| self.base[p].clone()).collect();
        let base = (0..n)
            .map(|p| {
                (0..k).fold(self.base[p].clone(), |acc, j| acc - &directions[j][p] * &base_at[j])
            })
            .collect();
        Ok(AffineFilterFamily {
            directions,
            base,
            ..self.clone()
        })
    }

    pub fn to_file(&self) -> FamilyFile {
        let s = |v: &[Scalar]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        FamilyFile {
            dilation: self.dilation.to_string(),
            support: self.support.lo.iter().zip(&self.support.hi).map(|(l, h)| [*l, *h]).collect(),
            sum_rules: self.constraints.sum_rules,
            interpolatory: self.constraints.interpolatory,
            symmetry: self.constraints.symmetry.as_ref().map(|t| SymmetryFile {
                group: t.group.to_string(),
                generators: t.group.elements().iter().map(|e| e.to_string()).collect(),
                center: s(&t.center),
                sign: t.sign,
            }),
            base: s(&self.base),
            directions: self.directions.iter().map(|d| s(d)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetryFile {
    pub group: String,
    pub generators: Vec<String>,
    pub center: Vec<String>,
    pub sign: i8,
}

/// On-disk form of a family; coefficients follow the support box points in
/// lexicographic order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    pub dilation: String,
    pub support: Vec<[i64; 2]>,
    pub sum_rules: u32,
    pub interpolatory: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryFile>,
    pub base: Vec<String>,
    pub directions: Vec<Vec<String>>,
}

impl FamilyFile {
    pub fn to_family(&self) -> Result<AffineFilterFamily> {
        let dilation = IntMatrix::parse(&self.dilation)?;
        let d = dilation.dim();
        let support = SupportBox::new(
            self.support.iter().map(|s| s[0]).collect(),
            self.support.iter().map(|s| s[1]).collect(),
        );
        let rats = |v: &[String]| v.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>();
        let symmetry = match &self.symmetry {
            None => None,
            Some(s) => {
                let group = match SymmetryGroup::parse(&s.group, d) {
                    Ok(g) => g,
                    Err(_) => SymmetryGroup::parse(&s.generators.join(" | "), d)?.with_name(&s.group),
                };
                Some(SymmetryType::new(group, rats(&s.center)?, s.sign))
            }
        };
        let base = rats(&self.base)?;
        if base.len() != support.len() {
            return Err(Error::Parse("family base does not match the support box".into()));
        }
        let directions = self.directions.iter().map(|v| rats(v)).collect::<Result<Vec<_>>>()?;
        Ok(AffineFilterFamily {
            dilation,
            support,
            constraints: Constraints {
                sum_rules: self.sum_rules,
                interpolatory: self.interpolatory,
                symmetry,
            },
            base,
            directions,
        })
    }
}

/// Candidate values for each parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchGrid {
    pub values: Vec<Vec<Scalar>>,
    /// Rounds of local refinement around the best point; each halves the step.
    pub refine_rounds: u32,
}

impl SearchGrid {
    /// `lo, lo + step, …, hi` for each of `k` parameters.
    pub fn uniform(k: usize, lo: &Scalar, hi: &Scalar, step: &Scalar) -> Self {
        assert!(*step > Scalar::zero(), "grid step must be positive");
        let mut axis = Vec::new();
        let mut t = lo.clone();
        while t <= *hi {
            axis.push(t.clone());
            t += step;
        }
        SearchGrid {
            values: vec![axis; k],
            refine_rounds: 0,
        }
    }

    fn points(&self) -> Vec<Vec<Scalar>> {
        self.values.iter().fold(vec![Vec::new()], |acc, axis| {
            acc.iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v.clone());
                        p
                    })
                })
                .collect()
        })
    }
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub params: Vec<Scalar>,
    pub estimate: SmoothnessEstimate,
    pub evaluated: Vec<(Vec<Scalar>, f64)>,
    /// `sm₂ > d/2`, which makes the lower bound for `sm_∞` positive.
    pub certifies: bool,
}

fn evaluate(fam: &AffineFilterFamily, ctx: &DilationContext, p: &[Scalar]) -> Option<SmoothnessEstimate> {
    let f = fam.instantiate(p).ok()?;
    let e = sm2_estimate(&f, ctx, &Sm2Options::default()).ok()?;
    e.sm2.is_finite().then_some(e)
}

/// Grid search (in parallel) plus optional coordinate refinement maximizing
/// the `sm₂` estimate. No optimality claim.
pub fn optimize_sm2(fam: &AffineFilterFamily, ctx: &DilationContext, grid: &SearchGrid) -> Result<Optimum> {
    if grid.values.len() != fam.dimension() {
        return Err(Error::Arity {
            expected: fam.dimension(),
            got: grid.values.len(),
        });
    }
    let mut evaluated: Vec<(Vec<Scalar>, Option<SmoothnessEstimate>)> = grid
        .points()
        .into_par_iter()
        .map(|p| {
            let e = evaluate(fam, ctx, &p);
            (p, e)
        })
        .collect();
    let best_of = |ev: &[(Vec<Scalar>, Option<SmoothnessEstimate>)]| {
        ev.iter()
            .filter_map(|(p, e)| e.as_ref().map(|e| (p.clone(), e.clone())))
            .max_by(|a, b| a.1.sm2.total_cmp(&b.1.sm2))
    };
    let mut best = best_of(&evaluated).ok_or(Error::Infeasible)?;
    let mut step: Vec<Scalar> = grid
        .values
        .iter()
        .map(|axis| {
            if axis.len() > 1 {
                (&axis[1] - &axis[0]).abs()
            } else {
                Scalar::zero()
            }
        })
        .collect();
    for _ in 0..grid.refine_rounds {
        for s in &mut step {
            *s /= int(2);
        }
        let cands: Vec<Vec<Scalar>> = (0..fam.dimension())
            .filter(|&i| !step[i].is_zero())
            .flat_map(|i| {
                [-1i64, 1].into_iter().map({
                    let base = best.0.clone();
                    let s = step[i].clone();
                    move |sg| {
                        let mut p = base.clone();
                        p[i] += &s * int(sg);
                        p
                    }
                })
            })
            .collect();
        let round: Vec<_> = cands
            .into_par_iter()
            .map(|p| {
                let e = evaluate(fam, ctx, &p);
                (p, e)
            })
            .collect();
        if let Some(b) = best_of(&round) {
            if b.1.sm2 > best.1.sm2 {
                best = b;
            }
        }
        evaluated.extend(round);
    }
    let certifies = best.1.sm2 > ctx.dim() as f64 / 2.0;
    Ok(Optimum {
        params: best.0,
        estimate: best.1,
        evaluated: evaluated
            .into_iter()
            .map(|(p, e)| (p, e.map_or(f64::NEG_INFINITY, |e| e.sm2)))
            .collect(),
        certifies,
    })
}

/// Sum-rule order of an instantiated filter, for reports.
pub fn achieved_sum_rules(f: &Filter, ctx: &DilationContext) -> u32 {
    sum_rule_order(f, ctx, DEFAULT_CAP).value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;

    #[test]
    fn one_dimensional_interpolatory_family() {
        let ctx = DilationContext::parse("2").unwrap();
        let c = Constraints {
            sum_rules: 4,
            interpolatory: true,
            symmetry: None,
        };
        let fam = parametrize(&SupportBox::cube(1, -3, 3), &ctx, &c).unwrap();
        assert_eq!(fam.dimension(), 0);
        let dd4 = Filter::from_ints(
            1,
            rat(1, 32),
            [(vec![-3], -1), (vec![-1], 9), (vec![0], 16), (vec![1], 9), (vec![3], -1)],
        );
        assert_eq!(fam.instantiate(&[]).unwrap(), dd4);
        assert!(matches!(fam.instantiate(&[int(1)]), Err(Error::Arity { expected: 0, got: 1 })));
    }

    #[test]
    fn symmetric_family_and_reparametrization() {
        let ctx = DilationContext::parse("2").unwrap();
        let g = SymmetryGroup::pm_identity(1);
        let c = Constraints {
            sum_rules: 2,
            interpolatory: true,
            symmetry: Some(SymmetryType::new(g, vec![int(0)], 1)),
        };
        let fam = parametrize(&SupportBox::cube(1, -3, 3), &ctx, &c).unwrap();
        assert_eq!(fam.dimension(), 1);
        let fam = fam.reparametrize(&[vec![3]]).unwrap();
        let f = fam.instantiate(&[rat(-1, 32)]).unwrap();
        assert_eq!(f.coeff(&[3]), rat(-1, 32));
        assert_eq!(f.coeff(&[-3]), rat(-1, 32));
        let back = FamilyFile::to_family(&fam.to_file()).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn too_many_sum_rules_is_infeasible() {
        let ctx = DilationContext::parse("2").unwrap();
        let c = Constraints {
            sum_rules: 6,
            interpolatory: true,
            symmetry: None,
        };
        assert!(matches!(
            parametrize(&SupportBox::cube(1, -1, 1), &ctx, &c),
            Err(Error::Infeasible)
        ));
    }

    #[test]
    fn grid_points_are_a_product() {
        let g = SearchGrid::uniform(2, &rat(-1, 2), &rat(1, 2), &rat(1, 2));
        assert_eq!(g.points().len(), 9);
    }
}

//! Finite integer symmetry groups and symmetry types of filters.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::lattice::DilationContext;
use crate::laurent::{int, rat, Filter, Scalar};
use crate::moments::{sum_rule_order, Order, DEFAULT_CAP};

/// A finite group of unimodular integer matrices, stored sorted.
/// Equality ignores the name.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    elements: Vec<IntMatrix>,
    name: Option<String>,
}

impl PartialEq for SymmetryGroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for SymmetryGroup {}

fn m2(a: i64, b: i64, c: i64, d: i64) -> IntMatrix {
    IntMatrix::from_rows(&[vec![a, b], vec![c, d]]).expect("2x2")
}

fn with_negatives(ms: Vec<IntMatrix>) -> Vec<IntMatrix> {
    ms.into_iter().flat_map(|m| [m.scale(-1), m]).collect()
}

impl SymmetryGroup {
    /// Validates the group axioms exhaustively.
    pub fn new(elements: Vec<IntMatrix>, name: Option<&str>) -> Result<Self> {
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let Some(first) = elements.first() else {
            return Err(Error::NotAGroup("empty set".into()));
        };
        let d = first.dim();
        if elements.iter().any(|e| e.dim() != d) {
            return Err(Error::NotAGroup("mixed dimensions".into()));
        }
        if !elements.contains(&IntMatrix::identity(d)) {
            return Err(Error::NotAGroup("identity missing".into()));
        }
        for e in &elements {
            let Some(inv) = e.inverse_unimodular() else {
                return Err(Error::NotAGroup(format!("[{e}] is not unimodular")));
            };
            if !elements.contains(&inv) {
                return Err(Error::NotAGroup(format!("inverse of [{e}] missing")));
            }
            for f in &elements {
                if !elements.contains(&e.mul(f)) {
                    return Err(Error::NotAGroup(format!("[{e}]·[{f}] missing")));
                }
            }
        }
        Ok(SymmetryGroup {
            elements,
            name: name.map(str::to_string),
        })
    }

    /// Closure of a set of unimodular generators under multiplication.
    pub fn generated_by(gens: Vec<IntMatrix>, name: Option<&str>) -> Result<Self> {
        let d = gens
            .first()
            .map(|g| g.dim())
            .ok_or_else(|| Error::NotAGroup("no generators".into()))?;
        let mut elems = vec![IntMatrix::identity(d)];
        let mut frontier = elems.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in &frontier {
                for g in &gens {
                    let y = x.mul(g);
                    if !elems.contains(&y) {
                        if elems.len() > 1024 {
                            return Err(Error::NotAGroup("generated set is not finite".into()));
                        }
                        elems.push(y.clone());
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        SymmetryGroup::new(elems, name)
    }

    pub fn d4() -> Self {
        let elems = with_negatives(vec![
            IntMatrix::identity(2),
            m2(1, 0, 0, -1),
            m2(0, 1, 1, 0),
            m2(0, 1, -1, 0),
        ]);
        SymmetryGroup::new(elems, Some("D4")).expect("D4 is a group")
    }

    pub fn d6() -> Self {
        let elems = with_negatives(vec![
            IntMatrix::identity(2),
            m2(0, 1, 1, 0),
            m2(-1, 1, 0, 1),
            m2(1, 0, 1, -1),
            m2(0, 1, -1, 1),
            m2(1, -1, 1, 0),
        ]);
        SymmetryGroup::new(elems, Some("D6")).expect("D6 is a group")
    }

    pub fn pm_identity(d: usize) -> Self {
        let i = IntMatrix::identity(d);
        SymmetryGroup::new(vec![i.scale(-1), i], Some("pmI")).expect("{±I} is a group")
    }

    pub fn trivial(d: usize) -> Self {
        SymmetryGroup::new(vec![IntMatrix::identity(d)], Some("I")).expect("trivial group")
    }

    /// `"D4"`, `"D6"`, `"pmI"`, or generators `"a b; c d | e f; g h"`.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        match s.trim() {
            "D4" | "d4" if dim == 2 => Ok(SymmetryGroup::d4()),
            "D6" | "d6" if dim == 2 => Ok(SymmetryGroup::d6()),
            "pmI" | "pmi" | "±I" => Ok(SymmetryGroup::pm_identity(dim)),
            "D4" | "d4" | "D6" | "d6" => Err(Error::InvalidArgument(format!(
                "group {s} needs dimension 2"
            ))),
            other => {
                let gens = other
                    .split('|')
                    .map(IntMatrix::parse)
                    .collect::<Result<Vec<_>>>()?;
                if gens.iter().any(|g| g.dim() != dim) {
                    return Err(Error::DimensionMismatch(gens[0].dim(), dim));
                }
                SymmetryGroup::generated_by(gens, None)
            }
        }
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn contains(&self, e: &IntMatrix) -> bool {
        self.elements.binary_search(e).is_ok()
    }

    /// `M G M^{-1}`, if every conjugate is an integer matrix.
    pub fn conjugate_by(&self, m: &IntMatrix) -> Option<SymmetryGroup> {
        let elems = self
            .elements
            .iter()
            .map(|e| m.conjugate(e))
            .collect::<Option<Vec<_>>>()?;
        SymmetryGroup::new(elems, None).ok()
    }

    /// Elements with `(I - E)x ∈ Z^d`.
    pub fn stabilizer_mod_lattice(&self, x: &[Scalar]) -> SymmetryGroup {
        let d = self.dim();
        let id = IntMatrix::identity(d);
        let elems = self
            .elements
            .iter()
            .filter(|e| id.sub(e).apply_rational(x).iter().all(|v| v.is_integer()))
            .cloned()
            .collect();
        SymmetryGroup::new(elems, None).expect("stabilizer of a point modulo Z^d is a subgroup")
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            return write!(f, "{n}");
        }
        let parts: Vec<String> = self.elements.iter().map(|e| format!("[{e}]")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Symmetry type `(G, c, ε)`: `u(E(k - c) + c) = ε u(k)` for `E ≠ I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryType {
    pub group: SymmetryGroup,
    pub center: Vec<Scalar>,
    pub sign: i8,
}

impl SymmetryType {
    pub fn new(group: SymmetryGroup, center: Vec<Scalar>, sign: i8) -> Self {
        SymmetryType { group, center, sign }
    }

    pub fn center_string(&self) -> String {
        let parts: Vec<String> = self.center.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }

    /// `(I - E)c ∈ Z^d` for every element.
    pub fn is_admissible(&self) -> bool {
        center_admissible(&self.group, &self.center)
    }

    pub fn holds_for(&self, u: &Filter) -> bool {
        satisfies(u, &self.group, &self.center, self.sign)
    }
}

impl fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {:+})", self.group, self.center_string(), self.sign)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub group: String,
    pub center: Vec<String>,
    pub sign: i8,
}

impl From<&SymmetryType> for SymmetryReport {
    fn from(t: &SymmetryType) -> Self {
        SymmetryReport {
            group: t.group.to_string(),
            center: t.center.iter().map(|c| c.to_string()).collect(),
            sign: t.sign,
        }
    }
}

fn center_admissible(g: &SymmetryGroup, c: &[Scalar]) -> bool {
    let id = IntMatrix::identity(g.dim());
    g.elements()
        .iter()
        .all(|e| id.sub(e).apply_rational(c).iter().all(|v| v.is_integer()))
}

fn satisfies(u: &Filter, g: &SymmetryGroup, c: &[Scalar], sign: i8) -> bool {
    let d = g.dim();
    if u.dim() != d || !center_admissible(g, c) {
        return false;
    }
    let id = IntMatrix::identity(d);
    let s = int(sign as i64);
    for e in g.elements() {
        if *e == id {
            continue;
        }
        let t: Vec<i64> = id
            .sub(e)
            .apply_rational(c)
            .iter()
            .map(|v| i64::try_from(v.to_integer()).expect("small center"))
            .collect();
        for (k, v) in u.iter() {
            let p: Vec<i64> = e.apply(k).iter().zip(&t).map(|(a, b)| a + b).collect();
            if u.coeff(&p) != v * &s {
                return false;
            }
        }
    }
    true
}

fn push_unique(list: &mut Vec<Vec<Scalar>>, c: Vec<Scalar>) {
    if !list.contains(&c) {
        list.push(c);
    }
}

/// Lattice `(1/q)Z^d` points inside a box.
fn fractional_points(lo: &[i64], hi: &[i64], q: i64) -> Vec<Vec<Scalar>> {
    let bx = crate::laurent::SupportBox::new(
        lo.iter().map(|x| x * q).collect(),
        hi.iter().map(|x| x * q).collect(),
    );
    bx.points()
        .into_iter()
        .map(|p| p.into_iter().map(|x| rat(x, q)).collect())
        .collect()
}

/// Finds a center and sign for which `u` has symmetry type `(G, c, ε)`.
///
/// Candidates are tried in order: the mean of the support points, the box
/// midpoint, the supplied hints, then the half- and third-integer points of
/// the support box.
pub fn detect_symmetry(u: &Filter, g: &SymmetryGroup, hints: &[Vec<Scalar>]) -> Option<SymmetryType> {
    let bx = u.support()?;
    let d = u.dim();
    if d != g.dim() {
        return None;
    }
    let mut cands: Vec<Vec<Scalar>> = Vec::new();
    let n = int(u.len() as i64);
    let mean: Vec<Scalar> = (0..d)
        .map(|i| u.iter().fold(Scalar::zero(), |acc, (p, _)| acc + int(p[i])) / &n)
        .collect();
    push_unique(&mut cands, mean);
    push_unique(
        &mut cands,
        (0..d).map(|i| rat(bx.lo[i] + bx.hi[i], 2)).collect(),
    );
    for h in hints {
        push_unique(&mut cands, h.clone());
    }
    for q in [2, 3] {
        for c in fractional_points(&bx.lo, &bx.hi, q) {
            push_unique(&mut cands, c);
        }
    }
    for c in cands {
        for sign in [1i8, -1] {
            if satisfies(u, g, &c, sign) {
                return Some(SymmetryType::new(g.clone(), c, sign));
            }
        }
    }
    None
}

/// `M E M^{-1} ∈ G` for all `E ∈ G`.
pub fn is_compatible(ctx: &DilationContext, g: &SymmetryGroup) -> bool {
    ctx.dim() == g.dim()
        && g.elements()
            .iter()
            .all(|e| ctx.matrix().conjugate(e).is_some_and(|c| g.contains(&c)))
}

/// Maximal subgroup `G_γ` with `(I - E)M^{-1}γ ∈ Z^d`.
pub fn coset_symmetry_subgroup(
    g: &SymmetryGroup,
    gamma: &[i64],
    ctx: &DilationContext,
) -> Result<SymmetryGroup> {
    if !is_compatible(ctx, g) {
        return Err(Error::NotCompatible);
    }
    let x = ctx.inverse_apply(&gamma.iter().map(|&v| int(v)).collect::<Vec<_>>());
    Ok(g.stabilizer_mod_lattice(&x))
}

/// Predicted type `(G_γ, -M^{-1}γ, 1)` of the γ-coset of a `(G, 0, 1)` filter.
pub fn coset_symmetry_type(
    g: &SymmetryGroup,
    gamma: &[i64],
    ctx: &DilationContext,
) -> Result<SymmetryType> {
    let sub = coset_symmetry_subgroup(g, gamma, ctx)?;
    let c = ctx
        .inverse_apply(&gamma.iter().map(|&v| int(v)).collect::<Vec<_>>())
        .into_iter()
        .map(|v| -v)
        .collect();
    Ok(SymmetryType::new(sub, c, 1))
}

/// Type of `v̂(ξ) = e^{-iγ·ξ} û(M^T ξ)` given the type of `u`.
pub fn transfer_symmetry(
    t: &SymmetryType,
    gamma: &[i64],
    ctx: &DilationContext,
) -> Result<SymmetryType> {
    let group = t
        .group
        .conjugate_by(ctx.matrix())
        .ok_or(Error::NotCompatible)?;
    let mc = ctx.matrix().apply_rational(&t.center);
    let center = mc.into_iter().zip(gamma).map(|(a, &b)| a + int(b)).collect();
    Ok(SymmetryType::new(group, center, t.sign))
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferDiagnostic {
    /// 1 when `(I - E)c ∈ M Z^d`, else 2.
    pub branch: u8,
    pub element: String,
    pub sum_rule_order: Order,
    /// Whether the filter agrees with the branch conclusion.
    pub consistent: bool,
}

/// Checks the dichotomy for an interpolatory filter of type `t`: either the
/// center is the origin with sign `+1`, or the filter has at most one sum rule.
pub fn transfer_check(a: &Filter, ctx: &DilationContext, t: &SymmetryType) -> Result<TransferDiagnostic> {
    let d = ctx.dim();
    let id = IntMatrix::identity(d);
    let e = t
        .group
        .elements()
        .iter()
        .find(|e| id.sub(e).det() != 0)
        .ok_or(Error::ConditionNotMet)?;
    if !ctx.is_interpolatory(a) {
        return Err(Error::NotInterpolatory);
    }
    let v: Vec<i64> = id
        .sub(e)
        .apply_rational(&t.center)
        .iter()
        .map(|x| {
            if x.is_integer() {
                Ok(i64::try_from(x.to_integer()).expect("small center"))
            } else {
                Err(Error::InvalidArgument(format!(
                    "center {} is not admissible",
                    t.center_string()
                )))
            }
        })
        .collect::<Result<_>>()?;
    let sr = sum_rule_order(a, ctx, DEFAULT_CAP);
    if ctx.in_lattice(&v) {
        let zero = t.center.iter().all(|c| c.is_zero());
        Ok(TransferDiagnostic {
            branch: 1,
            element: e.to_string(),
            sum_rule_order: sr,
            consistent: zero && t.sign == 1,
        })
    } else {
        Ok(TransferDiagnostic {
            branch: 2,
            element: e.to_string(),
            sum_rule_order: sr,
            consistent: sr.value() <= 1,
        })
    }
}

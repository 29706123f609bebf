//! Exact polyphase verification of dual and quasi-tight filter banks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::lattice::DilationContext;
use crate::laurent::{int, Filter, Scalar};
use crate::moments::{
    linear_phase_moment_order, sum_rule_order, vanishing_moment_order, Order,
    DEFAULT_CAP,
};
use crate::symmetry::{detect_symmetry, SymmetryGroup, SymmetryReport};

/// A rectangular grid of filters.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Filter>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize, dim: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            entries: vec![Filter::zero(dim); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Filter {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, f: Filter) {
        self.entries[r * self.cols + c] = f;
    }
}

/// A sum of filters with possibly different radicands, kept per radicand so
/// that `q√2 + p√3` is never collapsed.
#[derive(Clone, Debug, Default)]
pub struct RadicalSum {
    parts: BTreeMap<u64, Filter>,
}

impl RadicalSum {
    pub fn add(&mut self, f: &Filter) {
        if f.is_zero() {
            return;
        }
        let e = self
            .parts
            .entry(f.radicand())
            .or_insert_with(|| Filter::zero(f.dim()));
        *e = e.add(f).expect("same radicand by construction");
        if e.is_zero() {
            self.parts.remove(&f.radicand());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The rational part if no irrational residue remains.
    pub fn rational(&self, dim: usize) -> Option<Filter> {
        match self.parts.len() {
            0 => Some(Filter::zero(dim)),
            1 => self.parts.get(&1).cloned(),
            _ => None,
        }
    }
}

/// `N(r,c) = d_M^{-1} δ [r = c] - a^{[γ_r]⋆} * ã^{[γ_c]}`.
pub fn polyphase_defect(a: &Filter, ta: &Filter, ctx: &DilationContext) -> LaurentMatrix {
    let d = ctx.det_abs();
    let ca = ctx.coset_split(a);
    let cta = ctx.coset_split(ta);
    let mut n = LaurentMatrix::zeros(d, d, ctx.dim());
    let inv = Filter::delta(ctx.dim()).scale(&ctx.inv_det());
    for (r, ar) in ca.iter().enumerate() {
        let sa = ar.star();
        for (c, tc) in cta.iter().enumerate() {
            let prod = sa.convolve(tc).expect("same dimension");
            let entry = if r == c {
                inv.sub(&prod).expect("rational low-pass filters")
            } else {
                prod.neg()
            };
            n.set(r, c, entry);
        }
    }
    n
}

/// One high-pass pair with weight `w`: contributes `w · b^{[γ_r]⋆} * b̃^{[γ_c]}`.
pub struct WeightedPair<'a> {
    pub b: &'a Filter,
    pub tb: &'a Filter,
    pub weight: Scalar,
}

/// First entry `(r, c)` where the polyphase identity fails, if any.
pub fn identity_failure(
    a: &Filter,
    ta: &Filter,
    pairs: &[WeightedPair<'_>],
    ctx: &DilationContext,
) -> Option<(usize, usize)> {
    let d = ctx.det_abs();
    let n = polyphase_defect(a, ta, ctx);
    let split: Vec<(Vec<Filter>, Vec<Filter>)> = pairs
        .iter()
        .map(|p| {
            let cb: Vec<Filter> = ctx.coset_split(p.b).into_iter().map(|f| f.star()).collect();
            (cb, ctx.coset_split(p.tb))
        })
        .collect();
    for r in 0..d {
        for c in 0..d {
            let mut acc = RadicalSum::default();
            acc.add(&n.get(r, c).neg());
            for ((cb, ctb), p) in split.iter().zip(pairs) {
                let term = cb[r].convolve(&ctb[c]).expect("same dimension");
                acc.add(&term.scale(&p.weight));
            }
            if !acc.is_zero() {
                return Some((r, c));
            }
        }
    }
    None
}

/// `b(Mk) = 0` for all `k ≠ 0`.
pub fn has_interpolatory_zero_coset(b: &Filter, ctx: &DilationContext) -> bool {
    let c0 = ctx.coset(b, 0);
    let ok = c0.iter().all(|(k, _)| k.iter().all(|&x| x == 0));
    ok
}

#[derive(Clone, Debug, Serialize)]
pub struct FilterReport {
    pub index: usize,
    pub side: &'static str,
    pub vmo: Order,
    pub interpolatory_high_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: u32,
    pub rhs: Order,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BankReport {
    pub kind: &'static str,
    pub identity_holds: bool,
    pub first_failure: Option<(usize, usize)>,
    pub s: usize,
    pub sr_a: Order,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sr_ta: Option<Order>,
    pub lpm_mixing: Order,
    pub filters: Vec<FilterReport>,
    pub inequalities: Vec<InequalityCheck>,
}

impl BankReport {
    pub fn all_ok(&self) -> bool {
        self.identity_holds
            && self.filters.iter().all(|f| f.interpolatory_high_pass)
            && self.inequalities.iter().all(|c| c.holds)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("kind: {}\n", self.kind));
        out.push_str(&format!(
            "identity: {}\n",
            match self.first_failure {
                None => "holds (exact)".to_string(),
                Some((r, c)) => format!("FAILS at polyphase entry ({}, {})", r + 1, c + 1),
            }
        ));
        out.push_str(&format!("high-pass count s = {}\n", self.s));
        out.push_str(&format!("sr(a) = {}", self.sr_a));
        if let Some(s) = self.sr_ta {
            out.push_str(&format!(", sr(ta) = {s}"));
        }
        out.push_str(&format!(", lpm(mixing) = {}\n", self.lpm_mixing));
        for f in &self.filters {
            out.push_str(&format!(
                "  {}{}: vmo {}, zero coset {}",
                f.side,
                f.index + 1,
                f.vmo,
                if f.interpolatory_high_pass { "ok" } else { "VIOLATED" }
            ));
            if let Some(s) = f.sign {
                out.push_str(&format!(", eps {s:+}"));
            }
            if let Some(sym) = &f.symmetry {
                out.push_str(&format!(
                    ", symmetry ({}, ({}), {:+})",
                    sym.group,
                    sym.center.join(","),
                    sym.sign
                ));
            }
            out.push('\n');
        }
        for c in &self.inequalities {
            out.push_str(&format!(
                "  {}: {} <= {} {}\n",
                c.name,
                c.lhs,
                c.rhs,
                if c.holds { "ok" } else { "VIOLATED" }
            ));
        }
        out
    }
}

fn filter_report(
    f: &Filter,
    index: usize,
    side: &'static str,
    ctx: &DilationContext,
    group: Option<&SymmetryGroup>,
    sign: Option<i8>,
) -> FilterReport {
    FilterReport {
        index,
        side,
        vmo: vanishing_moment_order(f, DEFAULT_CAP),
        interpolatory_high_pass: has_interpolatory_zero_coset(f, ctx),
        symmetry: group
            .and_then(|g| detect_symmetry(f, g, &[]))
            .map(|t| SymmetryReport::from(&t)),
        sign,
    }
}

fn min_vmo(reports: &[FilterReport], side: &str) -> u32 {
    reports
        .iter()
        .filter(|r| r.side == side)
        .map(|r| r.vmo.value())
        .min()
        .unwrap_or(DEFAULT_CAP)
}

fn check(name: &str, lhs: u32, rhs: Order) -> InequalityCheck {
    InequalityCheck {
        name: name.to_string(),
        lhs,
        rhs,
        holds: !rhs.is_exact() || lhs <= rhs.value(),
    }
}

/// Full report for a dual bank `({a; b_l}, {ã; b̃_l})`.
pub fn verify_dual(
    ctx: &DilationContext,
    a: &Filter,
    ta: &Filter,
    bs: &[Filter],
    tbs: &[Filter],
    group: Option<&SymmetryGroup>,
) -> Result<BankReport> {
    if bs.len() != tbs.len() {
        return Err(crate::Error::Arity {
            expected: bs.len(),
            got: tbs.len(),
        });
    }
    let pairs: Vec<WeightedPair<'_>> = bs
        .iter()
        .zip(tbs)
        .map(|(b, tb)| WeightedPair {
            b,
            tb,
            weight: int(1),
        })
        .collect();
    let failure = identity_failure(a, ta, &pairs, ctx);
    let mut filters = Vec::new();
    for (i, b) in bs.iter().enumerate() {
        filters.push(filter_report(b, i, "b", ctx, group, None));
    }
    for (i, tb) in tbs.iter().enumerate() {
        filters.push(filter_report(tb, i, "tb", ctx, group, None));
    }
    let sr_a = sum_rule_order(a, ctx, DEFAULT_CAP);
    let sr_ta = sum_rule_order(ta, ctx, DEFAULT_CAP);
    let lpm = linear_phase_moment_order(&a.star().convolve(ta)?, DEFAULT_CAP);
    let mb = min_vmo(&filters, "b");
    let mtb = min_vmo(&filters, "tb");
    let inequalities = vec![
        check("min vmo(b) <= sr(ta)", mb, sr_ta),
        check("min vmo(tb) <= sr(a)", mtb, sr_a),
        check("min vmo(b) + min vmo(tb) <= lpm(mixing)", mb + mtb, lpm),
    ];
    Ok(BankReport {
        kind: "dual",
        identity_holds: failure.is_none(),
        first_failure: failure,
        s: bs.len(),
        sr_a,
        sr_ta: Some(sr_ta),
        lpm_mixing: lpm,
        filters,
        inequalities,
    })
}

/// Full report for a quasi-tight bank `{a; b_l}_{ε_l}`.
pub fn verify_quasitight(
    ctx: &DilationContext,
    a: &Filter,
    bs: &[Filter],
    eps: &[i8],
    group: Option<&SymmetryGroup>,
) -> Result<BankReport> {
    if bs.len() != eps.len() {
        return Err(crate::Error::Arity {
            expected: bs.len(),
            got: eps.len(),
        });
    }
    let pairs: Vec<WeightedPair<'_>> = bs
        .iter()
        .zip(eps)
        .map(|(b, &e)| WeightedPair {
            b,
            tb: b,
            weight: int(e as i64),
        })
        .collect();
    let failure = identity_failure(a, a, &pairs, ctx);
    let filters: Vec<FilterReport> = bs
        .iter()
        .zip(eps)
        .enumerate()
        .map(|(i, (b, &e))| filter_report(b, i, "b", ctx, group, Some(e)))
        .collect();
    let sr_a = sum_rule_order(a, ctx, DEFAULT_CAP);
    let lpm = linear_phase_moment_order(&a.star().convolve(a)?, DEFAULT_CAP);
    let mb = min_vmo(&filters, "b");
    let inequalities = vec![
        check("min vmo(b) <= sr(a)", mb, sr_a),
        check("2 min vmo(b) <= lpm(mixing)", 2 * mb, lpm),
    ];
    Ok(BankReport {
        kind: "quasitight",
        identity_holds: failure.is_none(),
        first_failure: failure,
        s: bs.len(),
        sr_a,
        sr_ta: None,
        lpm_mixing: lpm,
        filters,
        inequalities,
    })
}

/// Numeric spot check of the modulated identity
/// `conj(â(ξ)) ã̂(ξ+2πω) + Σ conj(b̂_l(ξ)) b̃̂_l(ξ+2πω) = δ(ω)`; returns the
/// largest deviation over the given frequencies.
pub fn frequency_residual(
    ctx: &DilationContext,
    a: &Filter,
    ta: &Filter,
    pairs: &[WeightedPair<'_>],
    xis: &[Vec<f64>],
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut worst: f64 = 0.0;
    for xi in xis {
        for (wi, w) in ctx.omega().iter().enumerate() {
            let shifted: Vec<f64> = xi
                .iter()
                .zip(w)
                .map(|(x, o)| x + two_pi * crate::laurent::to_f64(o))
                .collect();
            let mut s = a.evaluate_at(xi).conj() * ta.evaluate_at(&shifted);
            for p in pairs {
                s += p.b.evaluate_at(xi).conj()
                    * p.tb.evaluate_at(&shifted)
                    * crate::laurent::to_f64(&p.weight);
            }
            let target = if wi == 0 { 1.0 } else { 0.0 };
            worst = worst.max((s - num_complex::Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

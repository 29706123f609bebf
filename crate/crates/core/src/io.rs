//! JSON file formats for filters and filter banks.
//!
//! Filter coefficients are written as exact rational strings. For `d = 2` the
//! nested array mirrors the usual matrix display: the first row holds the
//! largest second coordinate, and within a row the first coordinate
//! increases. In general the outer levels run over the last coordinates in
//! decreasing order and the innermost level over the first coordinate.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::laurent::{int, Filter, Point, Scalar, SupportBox};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterFile {
    pub dim: usize,
    #[serde(default = "default_radicand")]
    pub radicand: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    pub support: Vec<[i64; 2]>,
    pub coeffs: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

fn default_radicand() -> u64 {
    1
}

pub fn parse_rational(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    Scalar::from_str(t).map_err(|_| Error::Parse(format!("bad rational '{s}'")))
}

fn value_to_rational(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(int)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}; use a rational string"))),
        other => Err(Error::Parse(format!("expected rational, found {other}"))),
    }
}

/// Lattice points of a box in display order (see module docs).
fn display_order(bx: &SupportBox) -> Vec<Point> {
    let mut pts = bx.points();
    pts.sort_by(|a, b| {
        for i in (1..a.len()).rev() {
            match b[i].cmp(&a[i]) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        a[0].cmp(&b[0])
    });
    pts
}

fn flatten(v: &Value, depth: usize, out: &mut Vec<Value>) -> Result<()> {
    if depth == 0 {
        out.push(v.clone());
        return Ok(());
    }
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("coefficient array nesting does not match dim".into()))?;
    for x in arr {
        flatten(x, depth - 1, out)?;
    }
    Ok(())
}

fn shape_ok(v: &Value, extents: &[usize]) -> bool {
    match extents.split_first() {
        None => !v.is_array(),
        Some((n, rest)) => v
            .as_array()
            .is_some_and(|a| a.len() == *n && a.iter().all(|x| shape_ok(x, rest))),
    }
}

impl FilterFile {
    pub fn to_filter(&self) -> Result<Filter> {
        if self.dim == 0 || self.support.len() != self.dim {
            return Err(Error::Parse(format!(
                "support has {} intervals for dim {}",
                self.support.len(),
                self.dim
            )));
        }
        if self.radicand == 0 {
            return Err(Error::Parse("radicand must be positive".into()));
        }
        let bx = SupportBox::new(
            self.support.iter().map(|s| s[0]).collect(),
            self.support.iter().map(|s| s[1]).collect(),
        );
        let extents: Vec<usize> = (0..self.dim)
            .rev()
            .map(|i| (bx.hi[i] - bx.lo[i] + 1).max(0) as usize)
            .collect();
        if !shape_ok(&self.coeffs, &extents) {
            return Err(Error::Parse("coefficient array shape does not match support".into()));
        }
        let mut flat = Vec::new();
        flatten(&self.coeffs, self.dim, &mut flat)?;
        let scale = match &self.scale {
            Some(s) => parse_rational(s)?,
            None => Scalar::one(),
        };
        let pts = display_order(&bx);
        let coeffs = pts
            .into_iter()
            .zip(flat.iter())
            .map(|(p, v)| Ok((p, value_to_rational(v)? * &scale)))
            .collect::<Result<Vec<_>>>()?;
        let f = Filter::from_coeffs(self.dim, coeffs);
        Ok(f.mul_sqrt(&int(self.radicand as i64)))
    }

    pub fn from_filter(f: &Filter, provenance: Option<String>) -> Self {
        let dim = f.dim();
        let bx = f
            .support()
            .cloned()
            .unwrap_or_else(|| SupportBox::cube(dim, 0, 0));
        let lcm = f
            .iter()
            .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let scale = (!lcm.is_one()).then(|| format!("1/{lcm}"));
        let factor = Scalar::from_integer(lcm);
        let flat: Vec<Value> = display_order(&bx)
            .iter()
            .map(|p| Value::String((f.coeff(p) * &factor).to_string()))
            .collect();
        let extents: Vec<usize> = (0..dim)
            .rev()
            .map(|i| (bx.hi[i] - bx.lo[i] + 1) as usize)
            .collect();
        FilterFile {
            dim,
            radicand: f.radicand(),
            scale,
            support: bx.lo.iter().zip(&bx.hi).map(|(l, h)| [*l, *h]).collect(),
            coeffs: nest(&flat, &extents),
            provenance,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn nest(flat: &[Value], extents: &[usize]) -> Value {
    match extents.split_first() {
        None => flat[0].clone(),
        Some((_, rest)) => {
            let stride: usize = rest.iter().product();
            Value::Array(flat.chunks(stride.max(1)).map(|c| nest(c, rest)).collect())
        }
    }
}

pub fn read_filter(path: impl AsRef<Path>) -> Result<Filter> {
    FilterFile::load(path)?.to_filter()
}

pub fn filter_to_json(f: &Filter) -> String {
    render_pretty(&serde_json::to_value(FilterFile::from_filter(f, None)).expect("serializable"))
}

pub fn filter_from_json(text: &str) -> Result<Filter> {
    let ff: FilterFile = serde_json::from_str(text)?;
    ff.to_filter()
}

pub fn write_filter(path: impl AsRef<Path>, f: &Filter, provenance: Option<String>) -> Result<()> {
    let v = serde_json::to_value(FilterFile::from_filter(f, provenance))?;
    std::fs::write(path, render_pretty(&v) + "\n")?;
    Ok(())
}

/// Pretty JSON with innermost arrays of scalars kept on one line.
pub fn render_pretty(v: &Value) -> String {
    fn is_flat(v: &Value) -> bool {
        v.as_array()
            .is_some_and(|a| a.iter().all(|x| !x.is_array() && !x.is_object()))
    }
    fn go(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) if !map.is_empty() => {
                out.push_str("{\n");
                let n = map.len();
                for (i, (k, x)) in map.iter().enumerate() {
                    out.push_str(&format!("{pad}  {}: ", Value::String(k.clone())));
                    go(x, indent + 1, out);
                    out.push_str(if i + 1 < n { ",\n" } else { "\n" });
                }
                out.push_str(&format!("{pad}}}"));
            }
            Value::Array(a) if !a.is_empty() && !is_flat(v) => {
                out.push_str("[\n");
                for (i, x) in a.iter().enumerate() {
                    out.push_str(&format!("{pad}  "));
                    go(x, indent + 1, out);
                    out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
                }
                out.push_str(&format!("{pad}]"));
            }
            _ => out.push_str(&serde_json::to_string(v).expect("serializable")),
        }
    }
    let mut s = String::new();
    go(v, 0, &mut s);
    s
}

/// Ordered string map for bank metadata.
pub type Metadata = BTreeMap<String, Value>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BankMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Symmetry group used when reporting filter symmetry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub origins: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// A filter bank with its dilation matrix inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankFile {
    pub kind: String,
    pub dilation: String,
    pub a: FilterFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ta: Option<FilterFile>,
    pub bs: Vec<FilterFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tbs: Option<Vec<FilterFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<i8>>,
    #[serde(default)]
    pub metadata: BankMetadata,
}

/// Parsed contents of a [`BankFile`].
#[derive(Clone, Debug, PartialEq)]
pub enum Bank {
    Dual {
        a: Filter,
        ta: Filter,
        bs: Vec<Filter>,
        tbs: Vec<Filter>,
    },
    QuasiTight {
        a: Filter,
        bs: Vec<Filter>,
        eps: Vec<i8>,
    },
}

impl Bank {
    pub fn a(&self) -> &Filter {
        match self {
            Bank::Dual { a, .. } | Bank::QuasiTight { a, .. } => a,
        }
    }

    pub fn bs(&self) -> &[Filter] {
        match self {
            Bank::Dual { bs, .. } | Bank::QuasiTight { bs, .. } => bs,
        }
    }
}

fn files(fs: &[Filter]) -> Vec<FilterFile> {
    fs.iter().map(|f| FilterFile::from_filter(f, None)).collect()
}

fn filters(fs: &[FilterFile]) -> Result<Vec<Filter>> {
    fs.iter().map(FilterFile::to_filter).collect()
}

impl BankFile {
    pub fn new(bank: &Bank, dilation: &IntMatrix, metadata: BankMetadata) -> Self {
        let dilation = dilation.to_string();
        match bank {
            Bank::Dual { a, ta, bs, tbs } => BankFile {
                kind: "dual".into(),
                dilation,
                a: FilterFile::from_filter(a, None),
                ta: Some(FilterFile::from_filter(ta, None)),
                bs: files(bs),
                tbs: Some(files(tbs)),
                eps: None,
                metadata,
            },
            Bank::QuasiTight { a, bs, eps } => BankFile {
                kind: "quasitight".into(),
                dilation,
                a: FilterFile::from_filter(a, None),
                ta: None,
                bs: files(bs),
                tbs: None,
                eps: Some(eps.clone()),
                metadata,
            },
        }
    }

    pub fn bank(&self) -> Result<Bank> {
        let a = self.a.to_filter()?;
        let bs = filters(&self.bs)?;
        match (self.kind.as_str(), &self.ta, &self.tbs, &self.eps) {
            ("dual", Some(ta), Some(tbs), None) => {
                let tbs = filters(tbs)?;
                if tbs.len() != bs.len() {
                    return Err(Error::Parse(format!("{} b filters but {} tb filters", bs.len(), tbs.len())));
                }
                Ok(Bank::Dual {
                    a,
                    ta: ta.to_filter()?,
                    bs,
                    tbs,
                })
            }
            ("quasitight", None, None, Some(eps)) => {
                if eps.len() != bs.len() || eps.iter().any(|e| e.abs() != 1) {
                    return Err(Error::Parse("eps must hold one sign ±1 per b filter".into()));
                }
                Ok(Bank::QuasiTight {
                    a,
                    bs,
                    eps: eps.clone(),
                })
            }
            ("dual", ..) => Err(Error::Parse("dual bank needs ta and tbs and no eps".into())),
            ("quasitight", ..) => Err(Error::Parse("quasi-tight bank needs eps and no ta or tbs".into())),
            (k, ..) => Err(Error::Parse(format!("unknown bank kind '{k}'"))),
        }
    }

    pub fn dilation(&self) -> Result<IntMatrix> {
        IntMatrix::parse(&self.dilation)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, render_pretty(&serde_json::to_value(self)?) + "\n")?;
        Ok(())
    }
}

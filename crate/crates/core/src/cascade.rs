//! Cascade sampling of refinable functions and framelet generators.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dense::DenseArray;
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::lattice::DilationContext;
use crate::laurent::{Filter, Point};

/// Levels up to this one are computed in exact arithmetic.
pub const EXACT_LEVELS: u32 = 4;

/// Samples `v(k) ≈ f(M^{-level} k)`.
#[derive(Clone, Debug)]
pub struct SampledGrid {
    pub level: u32,
    pub matrix: IntMatrix,
    pub values: DenseArray,
    pub exact: Option<Filter>,
}

impl SampledGrid {
    pub fn value(&self, k: &[i64]) -> f64 {
        self.values.get(k)
    }

    /// `d_M^{-level} Σ_k v(k)`, a Riemann sum for the integral.
    pub fn integral(&self, ctx: &DilationContext) -> f64 {
        let s: f64 = self.values.iter().map(|(_, v)| v).sum();
        s / (ctx.det_abs() as f64).powi(self.level as i32)
    }

    /// `M^{-level}` as a float matrix.
    pub fn scaling(&self) -> DMatrix<f64> {
        let m = self.matrix.to_f64();
        let d = m.nrows();
        let inv = m.try_inverse().expect("dilation is invertible");
        (0..self.level).fold(DMatrix::identity(d, d), |acc, _| acc * &inv)
    }
}

fn refine(prev: &SampledGrid, mask: &Filter, ctx: &DilationContext) -> Result<SampledGrid> {
    let level = prev.level + 1;
    let exact = match &prev.exact {
        Some(v) if level <= EXACT_LEVELS => Some(
            mask.convolve(&ctx.upsample(v))?
                .scale(&ctx.det_scalar()),
        ),
        _ => None,
    };
    let values = match &exact {
        Some(e) => DenseArray::from_filter(e),
        None => {
            let taps: Vec<(Point, f64)> = mask.to_f64_map().into_iter().collect();
            let mut v = prev.values.upsample(ctx.matrix()).convolve_taps(&taps);
            v.scale(ctx.det_abs() as f64);
            v
        }
    };
    Ok(SampledGrid {
        level,
        matrix: ctx.matrix().clone(),
        values,
        exact,
    })
}

/// `v_0 = δ`, `v_{j+1} = d_M · a * (v_j ↑ M)`; `v_n(k) ≈ φ(M^{-n}k)`.
pub fn subdivide_phi(a: &Filter, ctx: &DilationContext, n: u32) -> Result<SampledGrid> {
    if !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let delta = Filter::delta(ctx.dim());
    let mut g = SampledGrid {
        level: 0,
        matrix: ctx.matrix().clone(),
        values: DenseArray::from_filter(&delta),
        exact: Some(delta),
    };
    for _ in 0..n {
        g = refine(&g, a, ctx)?;
    }
    Ok(g)
}

/// Samples of `ψ(x) = d_M Σ_k b(k) φ(Mx - k)` one level finer than the
/// given `φ` grid.
pub fn sample_psi(b: &Filter, phi: &SampledGrid, ctx: &DilationContext) -> Result<SampledGrid> {
    if phi.matrix != *ctx.matrix() {
        return Err(Error::LevelMismatch(format!(
            "grid sampled for dilation {} but context uses {}",
            phi.matrix,
            ctx.matrix()
        )));
    }
    if b.is_zero() {
        return Ok(SampledGrid {
            level: phi.level + 1,
            matrix: phi.matrix.clone(),
            values: DenseArray::from_filter(&Filter::zero(ctx.dim())),
            exact: Some(Filter::zero(ctx.dim())),
        });
    }
    refine(phi, b, ctx)
}

#[derive(Serialize)]
struct GridJson {
    level: u32,
    dilation: String,
    points: Vec<Point>,
    x: Vec<Vec<f64>>,
    values: Vec<f64>,
}

/// Writes every point of the grid's bounding box in lexicographic order on
/// `k`, as CSV (`x_1,…,x_d,value`) or JSON.
pub fn export_grid(g: &SampledGrid, path: impl AsRef<Path>, format: &str) -> Result<()> {
    let s = g.scaling();
    let pts = g.values.bounds().points();
    let coords = |k: &Point| -> Vec<f64> {
        let v = nalgebra::DVector::from_iterator(k.len(), k.iter().map(|x| *x as f64));
        (&s * v).iter().copied().collect()
    };
    match format {
        "csv" => {
            let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
            let d = g.values.dim();
            let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
            writeln!(w, "{},value", header.join(","))?;
            for k in &pts {
                let x: Vec<String> = coords(k).iter().map(|v| format!("{v}")).collect();
                writeln!(w, "{},{}", x.join(","), g.value(k))?;
            }
            w.flush()?;
        }
        "json" => {
            let j = GridJson {
                level: g.level,
                dilation: g.matrix.to_string(),
                x: pts.iter().map(coords).collect(),
                values: pts.iter().map(|k| g.value(k)).collect(),
                points: pts,
            };
            std::fs::write(path, serde_json::to_string(&j)?)?;
        }
        other => return Err(Error::UnsupportedFormat(other.to_string())),
    }
    Ok(())
}

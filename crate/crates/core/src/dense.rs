//! Dense floating-point arrays on integer boxes, for the numeric parts
//! (subdivision, filter powers) where exact arithmetic would be too slow.

use crate::intmat::IntMatrix;
use crate::laurent::{Filter, Point, SupportBox};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseArray {
    lo: Point,
    ext: Vec<usize>,
    data: Vec<f64>,
}

impl DenseArray {
    pub fn zeros(bx: &SupportBox) -> Self {
        let ext: Vec<usize> = bx
            .lo
            .iter()
            .zip(&bx.hi)
            .map(|(l, h)| (h - l + 1).max(0) as usize)
            .collect();
        let n = ext.iter().product();
        DenseArray {
            lo: bx.lo.clone(),
            ext,
            data: vec![0.0; n],
        }
    }

    pub fn from_filter(f: &Filter) -> Self {
        let bx = f
            .support()
            .cloned()
            .unwrap_or_else(|| SupportBox::cube(f.dim(), 0, 0));
        let mut out = DenseArray::zeros(&bx);
        for (p, v) in f.to_f64_map() {
            out.set(&p, v);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn bounds(&self) -> SupportBox {
        SupportBox::new(
            self.lo.clone(),
            self.lo
                .iter()
                .zip(&self.ext)
                .map(|(l, e)| l + *e as i64 - 1)
                .collect(),
        )
    }

    /// Linear index with the last coordinate fastest.
    fn index(&self, p: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((x, lo), ext) in p.iter().zip(&self.lo).zip(&self.ext) {
            let off = x - lo;
            if off < 0 || off as usize >= *ext {
                return None;
            }
            idx = idx * ext + off as usize;
        }
        Some(idx)
    }

    fn point(&self, mut idx: usize) -> Point {
        let mut p = vec![0; self.lo.len()];
        for i in (0..self.lo.len()).rev() {
            p[i] = self.lo[i] + (idx % self.ext[i]) as i64;
            idx /= self.ext[i];
        }
        p
    }

    pub fn get(&self, p: &[i64]) -> f64 {
        self.index(p).map_or(0.0, |i| self.data[i])
    }

    pub fn set(&mut self, p: &[i64], v: f64) {
        let i = self.index(p).expect("point inside array bounds");
        self.data[i] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (self.point(i), *v))
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// `small * self`, where `small` is a short list of nonzero taps.
    pub fn convolve_taps(&self, taps: &[(Point, f64)]) -> DenseArray {
        if taps.is_empty() {
            return DenseArray::zeros(&SupportBox::cube(self.dim(), 0, 0));
        }
        let d = self.dim();
        let mut lo = taps[0].0.clone();
        let mut hi = taps[0].0.clone();
        for (p, _) in taps {
            for i in 0..d {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let own = self.bounds();
        let bx = SupportBox::new(
            lo.iter().zip(&own.lo).map(|(a, b)| a + b).collect(),
            hi.iter().zip(&own.hi).map(|(a, b)| a + b).collect(),
        );
        let mut out = DenseArray::zeros(&bx);
        // Rows along the last coordinate are contiguous in both arrays.
        let row = *self.ext.last().unwrap();
        let nrows = self.data.len() / row.max(1);
        for (s, v) in taps {
            for r in 0..nrows {
                let start = self.point(r * row);
                let q: Point = start.iter().zip(s).map(|(a, b)| a + b).collect();
                let o = out.index(&q).expect("inside output box");
                let src = &self.data[r * row..(r + 1) * row];
                for (dst, x) in out.data[o..o + row].iter_mut().zip(src) {
                    *dst += v * x;
                }
            }
        }
        out
    }

    /// `result(Mk) = self(k)`, zero off `MZ^d`.
    pub fn upsample(&self, m: &IntMatrix) -> DenseArray {
        let own = self.bounds();
        let d = self.dim();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for corner in 0..(1usize << d) {
            let c: Point = (0..d)
                .map(|i| if corner >> i & 1 == 1 { own.hi[i] } else { own.lo[i] })
                .collect();
            let img = m.apply(&c);
            for i in 0..d {
                lo[i] = lo[i].min(img[i]);
                hi[i] = hi[i].max(img[i]);
            }
        }
        let mut out = DenseArray::zeros(&SupportBox::new(lo, hi));
        for (i, v) in self.data.iter().enumerate() {
            if *v != 0.0 {
                let p = m.apply(&self.point(i));
                out.set(&p, *v);
            }
        }
        out
    }
}

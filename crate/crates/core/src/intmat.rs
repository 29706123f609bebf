//! Small dense integer matrices.

use std::fmt;

use num_rational::BigRational;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::laurent::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        Ok(IntMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn scalar(n: usize, s: i64) -> Self {
        IntMatrix::identity(n).scale(s)
    }

    /// Parses `"r11 r12; r21 r22"`.
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<Vec<i64>> = s
            .split(';')
            .map(|row| {
                row.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad matrix entry '{t}'")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        IntMatrix::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, s: i64) -> Self {
        IntMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j);
            }
        }
        IntMatrix { n, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        IntMatrix { n, data }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn apply_rational(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(Scalar::from_integer(BigInt::from(0)), |acc, j| {
                    acc + &v[j] * BigInt::from(self.get(i, j))
                })
            })
            .collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        let mut m: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                    return 0;
                };
                for c in 0..n {
                    m.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
                }
            }
            prev = m[k * n + k];
        }
        (sign * m[n * n - 1]) as i64
    }

    fn minor(&self, row: usize, col: usize) -> IntMatrix {
        let n = self.n;
        let data = (0..n)
            .filter(|&i| i != row)
            .flat_map(|i| (0..n).filter(move |&j| j != col).map(move |j| self.get(i, j)))
            .collect();
        IntMatrix { n: n - 1, data }
    }

    /// Adjugate, so that `M · adj(M) = det(M) · I`.
    pub fn adjugate(&self) -> IntMatrix {
        let n = self.n;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                data[j * n + i] = s * self.minor(i, j).det();
            }
        }
        IntMatrix { n, data }
    }

    /// Integer inverse, if `det = ±1`.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        match self.det() {
            1 => Some(self.adjugate()),
            -1 => Some(self.adjugate().scale(-1)),
            _ => None,
        }
    }

    /// `M^{-1} v` over the rationals.
    pub fn solve_rational(&self, v: &[Scalar]) -> Vec<Scalar> {
        let d = BigRational::from_integer(BigInt::from(self.det()));
        self.adjugate()
            .apply_rational(v)
            .into_iter()
            .map(|x| x / &d)
            .collect()
    }

    /// `M A M^{-1}` if it is an integer matrix.
    pub fn conjugate(&self, a: &IntMatrix) -> Option<IntMatrix> {
        let det = self.det();
        let p = self.mul(a).mul(&self.adjugate());
        if p.data.iter().all(|x| x % det == 0) {
            Some(IntMatrix {
                n: self.n,
                data: p.data.iter().map(|x| x / det).collect(),
            })
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "{}", rows.join("; "))
    }
}

use rug::Float;

use super::complex::Complex;
use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(dim: usize, prec: u32) -> Self {
        CMatrix {
            dim,
            data: vec![Complex::zero(prec); dim * dim],
        }
    }

    pub fn identity(dim: usize, prec: u32) -> Self {
        let mut m = CMatrix::zeros(dim, prec);
        for i in 0..dim {
            m[(i, i)] = Complex::one(prec);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    pub fn diagonal(values: &[Float]) -> Self {
        let prec = values.first().map_or(64, |v| v.prec());
        let mut m = CMatrix::zeros(values.len(), prec);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex::from_real(v.clone());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(64, Complex::prec)
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks(self.dim.max(1))
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other)?;
        let n = self.dim;
        let p = self.prec();
        let mut out = CMatrix::zeros(n, p);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * n + j].add_mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other)?;
        Ok(CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other)?;
        Ok(CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: &Float) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.scale(k)).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        let mut t = Complex::zero(self.prec());
        for i in 0..self.dim {
            t += &self[(i, i)];
        }
        t
    }

    /// `max_{ij} |a_ij|`.
    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec());
        for z in &self.data {
            let a = z.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn frobenius(&self) -> Float {
        let mut s = Float::new(self.prec());
        for z in &self.data {
            s += z.norm_sqr();
        }
        s.sqrt()
    }

    /// Max-entry distance `‖self − other‖_max`.
    pub fn max_dist(&self, other: &CMatrix) -> Result<Float> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn with_prec(&self, prec: u32) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.with_prec(prec)).collect(),
        }
    }

    /// Largest Hermiticity defect relative to `max(|a_ij|, |a_ji|, floor)`.
    /// Returns the offending position and its absolute deviation when the
    /// relative defect exceeds `tol`.
    pub fn hermitian_defect(&self, tol: &Float, floor: &Float) -> Option<(usize, usize, Float)> {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                let a = &self[(i, j)];
                let b = &self[(j, i)];
                let dev = a.sub_ref(&b.conj()).abs();
                let mut scale = a.abs();
                let bs = b.abs();
                if bs > scale {
                    scale = bs;
                }
                if *floor > scale {
                    scale = floor.clone();
                }
                if dev > Float::with_val(scale.prec(), &scale * tol) {
                    return Some((i, j, dev));
                }
            }
        }
        None
    }

    fn check_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.dim + j]
    }
}

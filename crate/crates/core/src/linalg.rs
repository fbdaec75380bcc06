//! Fixed-size complex matrices for the 4x4 cavity transfer problem.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Dense `N x N` complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<T: Real, const N: usize>(pub [[Cplx<T>; N]; N]);

pub type Mat4<T> = Mat<T, 4>;
pub type Mat2<T> = Mat<T, 2>;

impl<T: Real, const N: usize> Mat<T, N> {
    pub fn zeros() -> Self {
        Mat([[Cplx::zero(); N]; N])
    }

    pub fn identity() -> Self {
        Self::scaled_identity(Cplx::one())
    }

    pub fn scaled_identity(s: Cplx<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = s;
        }
        m
    }

    pub fn from_rows(rows: [[Cplx<T>; N]; N]) -> Self {
        Mat(rows)
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..N).fold(Cplx::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn mul_vec(&self, v: &[Cplx<T>; N]) -> [Cplx<T>; N] {
        let mut out = [Cplx::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).fold(Cplx::zero(), |acc, j| acc + self.0[i][j] * v[j]);
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..N)
            .map(|j| (0..N).fold(T::zero(), |acc, i| acc + self.0[i][j].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..N {
            for j in 0..N {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] on an exactly zero pivot or when the
    /// 1-norm condition estimate exceeds `max_condition`.
    pub fn inverse(&self, max_condition: T) -> Result<Self> {
        let mut a = self.0;
        let mut inv = Self::identity().0;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&r, &s| {
                    a[r][col]
                        .norm()
                        .partial_cmp(&a[s][col].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot][col].norm() == T::zero() || !a[pivot][col].norm().is_finite() {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].inv();
            for j in 0..N {
                a[col][j] *= p;
                inv[col][j] *= p;
            }
            for r in 0..N {
                if r == col {
                    continue;
                }
                let f = a[r][col];
                if f == Cplx::zero() {
                    continue;
                }
                for j in 0..N {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
        let inv = Mat(inv);
        let condition = self.norm1() * inv.norm1();
        if !(condition <= max_condition) {
            return Err(Error::Singular {
                condition: condition.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        Ok(inv)
    }
}

impl<T: Real, const N: usize> Index<(usize, usize)> for Mat<T, N> {
    type Output = Cplx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.0[i][j]
    }
}

impl<T: Real, const N: usize> IndexMut<(usize, usize)> for Mat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.0[i][j]
    }
}

impl<T: Real, const N: usize> Add for Mat<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Sub for Mat<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Neg for Mat<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-Cplx::one())
    }
}

impl<T: Real, const N: usize> Mul for Mat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] = (0..N).fold(Cplx::zero(), |acc, k| acc + self.0[i][k] * rhs.0[k][j]);
            }
        }
        out
    }
}

//! Dense 3×3 complex matrices and 3-vectors.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

pub type Vector3<T> = [Complex<T>; 3];

/// Row-major 3×3 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix3<T> {
    pub m: [[Complex<T>; 3]; 3],
}

impl<T: Real> Default for ComplexMatrix3<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real> ComplexMatrix3<T> {
    pub fn zeros() -> Self {
        Self {
            m: [[Complex::zero(); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        Self::diagonal([Complex::one(); 3])
    }

    pub fn diagonal(d: [Complex<T>; 3]) -> Self {
        let mut out = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            out.m[i][i] = v;
        }
        out
    }

    pub fn from_rows(m: [[Complex<T>; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn from_real(m: [[T; 3]; 3]) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = Complex::new(m[i][j], T::zero());
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn apply(&self, v: &Vector3<T>) -> Vector3<T> {
        let mut out = [Complex::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn column(&self, j: usize) -> Vector3<T> {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    /// Largest entry modulus (entrywise ∞-norm).
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Largest off-diagonal entry modulus.
    pub fn max_offdiag(&self) -> T {
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    acc = acc.max(self.m[i][j].norm());
                }
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// `‖M†M − I‖∞`.
    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    /// `‖M − M†‖∞`.
    pub fn hermiticity_defect(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() < tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn is_diagonal(&self, tol: T) -> bool {
        self.max_offdiag() < tol
    }

    /// Entrywise squared moduli, `|M_ij|²`.
    pub fn abs_sqr(&self) -> [[T; 3]; 3] {
        let mut out = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.m[i][j].norm_sqr();
            }
        }
        out
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix3<U> {
        let mut out = ComplexMatrix3::<U>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let z = self.m[i][j];
                out.m[i][j] = Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()));
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix3<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.m[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.m[i][j]
    }
}

impl<T: Real> Mul for ComplexMatrix3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][0] * rhs.m[0][j]
                    + self.m[i][1] * rhs.m[1][j]
                    + self.m[i][2] * rhs.m[2][j];
            }
        }
        out
    }
}

impl<T: Real> Add for ComplexMatrix3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for ComplexMatrix3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] - rhs.m[i][j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary_hermitian_diagonal() {
        let i = ComplexMatrix3::<f64>::identity();
        assert!(i.is_unitary(1e-15));
        assert!(i.is_hermitian(1e-15));
        assert!(i.is_diagonal(1e-15));
        assert_eq!(i.trace(), Complex::new(3.0, 0.0));
    }

    #[test]
    fn adjoint_reverses_products() {
        let a = ComplexMatrix3::from_rows([
            [Complex::new(1.0, 2.0), Complex::new(0.5, -1.0), Complex::new(0.0, 0.3)],
            [Complex::new(-0.2, 0.1), Complex::new(2.0, 0.0), Complex::new(1.0, 1.0)],
            [Complex::new(0.0, -1.0), Complex::new(0.7, 0.7), Complex::new(-1.0, 0.0)],
        ]);
        let b = a.conj().transpose() * a.scale(0.5);
        let lhs = (a * b).adjoint();
        let rhs = b.adjoint() * a.adjoint();
        assert!((lhs - rhs).max_abs() < 1e-14);
        assert!(b.is_hermitian(1e-14));
    }
}

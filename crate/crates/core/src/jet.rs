//! Second-order jets of scalar functions.
//!
//! A [`ScalarJet2`] carries the value, gradient and Hessian of a function at a
//! point. Arithmetic on jets applies the product and chain rules exactly, so a
//! metric or embedding written as an expression in coordinate jets yields its
//! first and second derivatives with no truncation error.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `dim × dim`, symmetric.
    pub hess: Vec<f64>,
}

impl ScalarJet2 {
    pub fn constant(value: f64, dim: usize) -> Self {
        Self {
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; dim * dim],
        }
    }

    /// The coordinate function `x^index` evaluated at `value`.
    pub fn variable(index: usize, value: f64, dim: usize) -> Self {
        let mut jet = Self::constant(value, dim);
        jet.grad[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    #[inline]
    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    /// Chain rule for `f ∘ self` given `f(u)`, `f'(u)`, `f''(u)` at `u = self.value`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let grad = self.grad.iter().map(|g| f1 * g).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = f1 * self.hess[i * n + j] + f2 * self.grad[i] * self.grad[j];
            }
        }
        Self {
            value: f0,
            grad,
            hess,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
            hess: self.hess.iter().map(|h| c * h).collect(),
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let u = self.value;
        self.compose(u.ln(), 1.0 / u, -1.0 / (u * u))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.compose(c, -s, -c)
    }

    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * r * r))
    }

    pub fn recip(&self) -> Self {
        let u = self.value;
        self.compose(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn powi(&self, k: i32) -> Self {
        let u = self.value;
        let kf = f64::from(k);
        let f1 = if k == 0 { 0.0 } else { kf * u.powi(k - 1) };
        let f2 = if k == 0 || k == 1 {
            0.0
        } else {
            kf * (kf - 1.0) * u.powi(k - 2)
        };
        self.compose(u.powi(k), f1, f2)
    }

    pub fn powf(&self, a: f64) -> Self {
        let u = self.value;
        self.compose(u.powf(a), a * u.powf(a - 1.0), a * (a - 1.0) * u.powf(a - 2.0))
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        Self {
            value: self.value + rhs.value,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a + b),
            hess: zip_with(&self.hess, &rhs.hess, |a, b| a + b),
        }
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        Self {
            value: self.value - rhs.value,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a - b),
            hess: zip_with(&self.hess, &rhs.hess, |a, b| a - b),
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let n = self.dim();
        let (a, b) = (self.value, rhs.value);
        let grad = zip_with(&self.grad, &rhs.grad, |ga, gb| a * gb + b * ga);
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                hess[k] = a * rhs.hess[k]
                    + b * self.hess[k]
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j];
            }
        }
        Self {
            value: a * b,
            grad,
            hess,
        }
    }

    fn offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.value += c;
        out
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&ScalarJet2> for &ScalarJet2 {
            type Output = ScalarJet2;
            fn $method(self, rhs: &ScalarJet2) -> ScalarJet2 {
                self.$inner(rhs)
            }
        }
        impl $trait<ScalarJet2> for ScalarJet2 {
            type Output = ScalarJet2;
            fn $method(self, rhs: ScalarJet2) -> ScalarJet2 {
                self.$inner(&rhs)
            }
        }
        impl $trait<&ScalarJet2> for ScalarJet2 {
            type Output = ScalarJet2;
            fn $method(self, rhs: &ScalarJet2) -> ScalarJet2 {
                self.$inner(rhs)
            }
        }
        impl $trait<ScalarJet2> for &ScalarJet2 {
            type Output = ScalarJet2;
            fn $method(self, rhs: ScalarJet2) -> ScalarJet2 {
                self.$inner(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, add_ref);
jet_binop!(Sub, sub, sub_ref);
jet_binop!(Mul, mul, mul_ref);

impl Div<&ScalarJet2> for &ScalarJet2 {
    type Output = ScalarJet2;
    fn div(self, rhs: &ScalarJet2) -> ScalarJet2 {
        self.mul_ref(&rhs.recip())
    }
}

impl Div<ScalarJet2> for ScalarJet2 {
    type Output = ScalarJet2;
    fn div(self, rhs: ScalarJet2) -> ScalarJet2 {
        self.mul_ref(&rhs.recip())
    }
}

impl Add<f64> for ScalarJet2 {
    type Output = ScalarJet2;
    fn add(self, rhs: f64) -> ScalarJet2 {
        self.offset(rhs)
    }
}

impl Add<f64> for &ScalarJet2 {
    type Output = ScalarJet2;
    fn add(self, rhs: f64) -> ScalarJet2 {
        self.offset(rhs)
    }
}

impl Sub<f64> for ScalarJet2 {
    type Output = ScalarJet2;
    fn sub(self, rhs: f64) -> ScalarJet2 {
        self.offset(-rhs)
    }
}

impl Sub<f64> for &ScalarJet2 {
    type Output = ScalarJet2;
    fn sub(self, rhs: f64) -> ScalarJet2 {
        self.offset(-rhs)
    }
}

impl Mul<f64> for ScalarJet2 {
    type Output = ScalarJet2;
    fn mul(self, rhs: f64) -> ScalarJet2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ScalarJet2 {
    type Output = ScalarJet2;
    fn mul(self, rhs: f64) -> ScalarJet2 {
        self.scale(rhs)
    }
}

impl Mul<ScalarJet2> for f64 {
    type Output = ScalarJet2;
    fn mul(self, rhs: ScalarJet2) -> ScalarJet2 {
        rhs.scale(self)
    }
}

impl Mul<&ScalarJet2> for f64 {
    type Output = ScalarJet2;
    fn mul(self, rhs: &ScalarJet2) -> ScalarJet2 {
        rhs.scale(self)
    }
}

impl Neg for ScalarJet2 {
    type Output = ScalarJet2;
    fn neg(self) -> ScalarJet2 {
        self.scale(-1.0)
    }
}

impl Neg for &ScalarJet2 {
    type Output = ScalarJet2;
    fn neg(self) -> ScalarJet2 {
        self.scale(-1.0)
    }
}

/// Coordinate jets `x^0, …, x^{n-1}` at `p`.
pub fn coordinate_jets(p: &[f64]) -> Vec<ScalarJet2> {
    let n = p.len();
    p.iter()
        .enumerate()
        .map(|(i, &x)| ScalarJet2::variable(i, x, n))
        .collect()
}

/// A scalar function on a chart, evaluated as a 2-jet.
pub trait ScalarField {
    fn dim(&self) -> usize;
    fn jet(&self, p: &[f64]) -> ScalarJet2;
}

/// Scalar field given by a closure over coordinate jets.
pub struct FnScalarField<F> {
    dim: usize,
    f: F,
}

impl<F> FnScalarField<F>
where
    F: Fn(&[ScalarJet2]) -> ScalarJet2,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> ScalarField for FnScalarField<F>
where
    F: Fn(&[ScalarJet2]) -> ScalarJet2,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, p: &[f64]) -> ScalarJet2 {
        (self.f)(&coordinate_jets(p))
    }
}

/// Product of two scalar fields.
pub struct ProductField<A, B>(pub A, pub B);

impl<A: ScalarField, B: ScalarField> ScalarField for ProductField<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, p: &[f64]) -> ScalarJet2 {
        self.0.jet(p) * self.1.jet(p)
    }
}

/// `c · field`.
pub struct ScaledField<A>(pub f64, pub A);

impl<A: ScalarField> ScalarField for ScaledField<A> {
    fn dim(&self) -> usize {
        self.1.dim()
    }

    fn jet(&self, p: &[f64]) -> ScalarJet2 {
        self.1.jet(p).scale(self.0)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn jet(&self, p: &[f64]) -> ScalarJet2 {
        (**self).jet(p)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for alloc::boxed::Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn jet(&self, p: &[f64]) -> ScalarJet2 {
        (**self).jet(p)
    }
}

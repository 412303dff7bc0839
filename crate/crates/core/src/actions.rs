//! The circle and `SL(2,R)` actions on `H^2 x C`, their generators, the
//! circle Hamiltonian and the `SL(2,R)` moment map.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{j_embed, mobius, SL2Element};
use crate::kahler::{TangentVector4, WeightFunction};
use crate::pick::{norm_sq, ModuliPoint};

/// `X = [[a, b], [c, -a]]` in `sl(2,R)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SL2AlgebraElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SL2AlgebraElement {
    pub const XI1: SL2AlgebraElement = SL2AlgebraElement { a: 0.0, b: -1.0, c: 1.0 };
    pub const XI2: SL2AlgebraElement = SL2AlgebraElement { a: 1.0, b: 0.0, c: 0.0 };
    pub const XI3: SL2AlgebraElement = SL2AlgebraElement { a: 0.0, b: 1.0, c: 1.0 };

    pub fn basis() -> [SL2AlgebraElement; 3] {
        [Self::XI1, Self::XI2, Self::XI3]
    }

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        Self {
            a: 0.5 * (m[(0, 0)] - m[(1, 1)]),
            b: m[(0, 1)],
            c: m[(1, 0)],
        }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a, self.b, self.c, -self.a)
    }

    /// Coefficients on `ξ1, ξ2, ξ3`.
    pub fn coordinates(&self) -> [f64; 3] {
        [0.5 * (self.c - self.b), self.a, 0.5 * (self.b + self.c)]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s)
    }

    /// `Ad(P) X = P X P^-1`.
    pub fn adjoint(&self, p: &SL2Element) -> Self {
        Self::from_matrix(&(p.matrix() * self.matrix() * p.inverse().matrix()))
    }

    /// `exp(tX)` in closed form, using `X^2 = (a^2 + bc) Id`.
    pub fn exp(&self, t: f64) -> SL2Element {
        let delta = (self.a * self.a + self.b * self.c) * t * t;
        let (c0, c1) = if delta > 0.0 {
            let s = delta.sqrt();
            (s.cosh(), s.sinh() / s)
        } else if delta < 0.0 {
            let s = (-delta).sqrt();
            (s.cos(), s.sin() / s)
        } else {
            (1.0, 1.0)
        };
        let m = Matrix2::identity() * c0 + self.matrix() * (c1 * t);
        SL2Element {
            a: m[(0, 0)],
            b: m[(0, 1)],
            c: m[(1, 0)],
            d: m[(1, 1)],
        }
    }
}

/// Values of `μ` on the basis `ξ1, ξ2, ξ3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
}

impl MomentValue {
    pub fn eval(&self, x: &SL2AlgebraElement) -> f64 {
        let [p, q, r] = x.coordinates();
        p * self.xi1 + q * self.xi2 + r * self.xi3
    }
}

pub fn circle_act(theta: f64, p: &ModuliPoint) -> ModuliPoint {
    ModuliPoint::new(p.z, Complex64::from_polar(1.0, theta) * p.w)
}

pub fn circle_generator(p: &ModuliPoint) -> TangentVector4 {
    TangentVector4::new(0.0, 0.0, -p.w.im, p.w.re)
}

pub fn circle_differential(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let mut m = Matrix4::identity();
    m[(2, 2)] = c;
    m[(2, 3)] = -s;
    m[(3, 2)] = s;
    m[(3, 3)] = c;
    m
}

/// `H = (2/3) f(|q|^2)`.
pub fn hamiltonian(p: &ModuliPoint, wf: &WeightFunction) -> f64 {
    2.0 / 3.0 * wf.at_point(p).0
}

/// `P (z, w) = ((az + b)/(cz + d), (cz + d)^3 w)`.
pub fn sl2_act(pm: &SL2Element, p: &ModuliPoint) -> ModuliPoint {
    let j = pm.automorphy(p.z.as_complex());
    ModuliPoint::new(mobius(pm, &p.z), j * j * j * p.w)
}

fn real_form(z: Complex64) -> Matrix2<f64> {
    Matrix2::new(z.re, -z.im, z.im, z.re)
}

/// Jacobian of [`sl2_act`] in `(x, y, u, v)`.
pub fn sl2_differential(pm: &SL2Element, p: &ModuliPoint) -> Matrix4<f64> {
    let j = pm.automorphy(p.z.as_complex());
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&real_form(1.0 / (j * j)));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&real_form(3.0 * pm.c * j * j * p.w));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&real_form(j * j * j));
    m
}

/// `(zdot, wdot) = (b + 2az - cz^2, 3(cz - a) w)`.
pub fn sl2_generator(x: &SL2AlgebraElement, p: &ModuliPoint) -> TangentVector4 {
    let z = p.z.as_complex();
    let zdot = x.b + 2.0 * x.a * z - x.c * z * z;
    let wdot = 3.0 * (x.c * z - x.a) * p.w;
    TangentVector4::new(zdot.re, zdot.im, wdot.re, wdot.im)
}

/// `μ^X = (1 - f(|q|^2)) tr(j(z) X)` on the basis.
pub fn moment_map(p: &ModuliPoint, wf: &WeightFunction) -> MomentValue {
    let (f, _) = wf.eval(norm_sq(p)).expect("norm is non-negative");
    let j = *j_embed(&p.z).matrix();
    let value = |x: &SL2AlgebraElement| (1.0 - f) * (j * x.matrix()).trace();
    MomentValue {
        xi1: value(&SL2AlgebraElement::XI1),
        xi2: value(&SL2AlgebraElement::XI2),
        xi3: value(&SL2AlgebraElement::XI3),
    }
}

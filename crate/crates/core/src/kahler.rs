//! The weighted pseudo-Kähler structure `(g, I, ω)` on `H^2 x C`, both in
//! tensorial form on pairs `(Jdot, Adot)` and as 4x4 matrices in the
//! coordinates `(x, y, u, v)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{j_differential, tangent_pair, HyperbolicPoint, TangentJ};
use crate::pick::{norm_sq, pick_form_at, variation_at, ModuliPoint, PickForm, PickVariation};

/// A tangent vector `xdot ∂x + ydot ∂y + udot ∂u + vdot ∂v`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TangentVector4 {
    pub xdot: f64,
    pub ydot: f64,
    pub udot: f64,
    pub vdot: f64,
}

impl TangentVector4 {
    pub const fn new(xdot: f64, ydot: f64, udot: f64, vdot: f64) -> Self {
        Self {
            xdot,
            ydot,
            udot,
            vdot,
        }
    }

    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 4];
        c[k] = 1.0;
        Self::from_array(c)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.xdot, self.ydot, self.udot, self.vdot]
    }

    pub fn to_vector(&self) -> nalgebra::Vector4<f64> {
        nalgebra::Vector4::from(self.to_array())
    }

    pub fn from_vector(v: &nalgebra::Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// A decreasing weight `f: [0, ∞) -> (-∞, 0]` with `f(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightFunction {
    /// `f(t) = -k t`
    Linear { k: f64 },
    /// `f(t) = -k ln(1 + t)`
    Logarithmic { k: f64 },
}

impl WeightFunction {
    pub fn linear(k: f64) -> Result<Self> {
        check_parameter(k).map(|k| Self::Linear { k })
    }

    pub fn logarithmic(k: f64) -> Result<Self> {
        check_parameter(k).map(|k| Self::Logarithmic { k })
    }

    /// The shipped presets used by the verification sweeps.
    pub fn presets() -> [WeightFunction; 2] {
        [Self::Linear { k: 1.0 }, Self::Logarithmic { k: 1.0 }]
    }

    /// `(f(t), f'(t))`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::NegativeWeightArgument(t));
        }
        Ok(match *self {
            Self::Linear { k } => (-k * t, -k),
            Self::Logarithmic { k } => (-k * t.ln_1p(), -k / (1.0 + t)),
        })
    }

    /// Evaluation at `|q|^2 = y^3 |w|^2`, which is never negative.
    pub fn at_point(&self, p: &ModuliPoint) -> (f64, f64) {
        self.eval(norm_sq(p)).expect("norm is non-negative")
    }
}

fn check_parameter(k: f64) -> Result<f64> {
    if k > 0.0 && k.is_finite() {
        Ok(k)
    } else {
        Err(Error::InvalidWeightParameter(k))
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { k } => write!(f, "linear:{k}"),
            Self::Logarithmic { k } => write!(f, "log:{k}"),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// Parses `linear:<k>` or `log:<k>`; a bare name means `k = 1`.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedWeightSpec(s.to_string());
        let (name, k) = match s.split_once(':') {
            Some((name, k)) => (name, k.trim().parse::<f64>().map_err(|_| malformed())?),
            None => (s, 1.0),
        };
        match name.trim() {
            "linear" => Self::linear(k),
            "log" | "logarithmic" => Self::logarithmic(k),
            _ => Err(malformed()),
        }
    }
}

/// Coordinate matrix of `g` at `(z, w)` in the basis `(∂x, ∂y, ∂u, ∂v)`.
pub fn metric_at(p: &ModuliPoint, wf: &WeightFunction) -> Matrix4<f64> {
    let [_, y, u, v] = p.coords();
    let (f, fp) = wf.at_point(p);
    let y2 = y * y;
    let y3 = y2 * y;
    let base = (1.0 - f + 3.0 * (u * u + v * v) * y3 * fp) / y2;
    let fiber = 4.0 / 3.0 * fp * y3;
    let (g02, g03) = (2.0 * fp * v * y2, -2.0 * fp * u * y2);
    let (g12, g13) = (2.0 * fp * u * y2, 2.0 * fp * v * y2);
    Matrix4::new(
        base, 0.0, g02, g03, //
        0.0, base, g12, g13, //
        g02, g12, fiber, 0.0, //
        g03, g13, 0.0, fiber,
    )
}

/// Determinant of a 4x4 matrix by Laplace expansion along the first row.
pub fn cofactor_det4(m: &Matrix4<f64>) -> f64 {
    let minor = |col: usize| {
        let mut r = [[0.0; 3]; 3];
        for (ri, i) in (1..4).enumerate() {
            for (rj, j) in (0..4).filter(|&j| j != col).enumerate() {
                r[ri][rj] = m[(i, j)];
            }
        }
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    };
    (0..4)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[(0, j)] * minor(j)
        })
        .sum()
}

/// `(closed, numeric)` values of `det g`.
pub fn metric_det(p: &ModuliPoint, wf: &WeightFunction) -> (f64, f64) {
    let y = p.z.y();
    let (f, fp) = wf.at_point(p);
    let closed = 16.0 / 9.0 * y * y * fp * fp * (1.0 - f) * (1.0 - f);
    (closed, cofactor_det4(&metric_at(p, wf)))
}

/// Coordinate matrix of `ω`, with `Ω[(i, j)] = ω(∂_i, ∂_j)`.
pub fn omega_at(p: &ModuliPoint, wf: &WeightFunction) -> Matrix4<f64> {
    let [_, y, u, v] = p.coords();
    let (f, fp) = wf.at_point(p);
    let y2 = y * y;
    let y3 = y2 * y;
    let mut m = Matrix4::zeros();
    let mut set = |i: usize, j: usize, val: f64| {
        m[(i, j)] = val;
        m[(j, i)] = -val;
    };
    set(0, 1, (-1.0 + f - 3.0 * fp * y3 * (u * u + v * v)) / y2);
    set(2, 3, -4.0 / 3.0 * fp * y3);
    let s = -2.0 * y2 * fp;
    set(0, 2, s * u);
    set(1, 3, s * u);
    set(2, 1, s * v);
    set(3, 0, -s * v);
    m
}

/// `I(Jdot, Adot) = (-J Jdot, -Adot J - A Jdot)` on a pair at the base `a`.
pub fn apply_complex_structure(a: &PickForm, jdot: &TangentJ, var: &PickVariation) -> (TangentJ, PickVariation) {
    let j = a.j.matrix();
    let (d1, d2) = var.full();
    let n1 = -d1 * j - a.a1 * jdot.m;
    let n2 = -d2 * j - a.a2 * jdot.m;
    (jdot.rotate(), PickVariation::from_full(n1, n2))
}

/// Reads coordinates back off a pair at `(i, w)`.
fn coordinates_at_i(w: Complex64, jdot: &Matrix2<f64>, var: &PickVariation) -> TangentVector4 {
    let (u, v) = (w.re, w.im);
    let xdot = jdot[(0, 0)];
    let ydot = -jdot[(0, 1)];
    let udot = var.adot0_1[(0, 0)] - u * ydot - v * xdot;
    let vdot = var.adot0_1[(0, 1)] + u * xdot - v * ydot;
    TangentVector4::new(xdot, ydot, udot, vdot)
}

/// Coordinate matrix of `I`, obtained by applying the tensorial definition
/// to the coordinate basis at the normalized point `(i, w')` and then
/// transporting by the normalizer. Independent of `(z, w)`.
pub fn complex_structure_at(p: &ModuliPoint) -> Matrix4<f64> {
    let w = crate::pick::normalized_fiber(p);
    let q = ModuliPoint::new(HyperbolicPoint::I, w);
    let a = pick_form_at(&q);
    let mut at_i = Matrix4::zeros();
    for k in 0..4 {
        let t = TangentVector4::basis(k);
        let jdot = j_differential(&q.z, t.xdot, t.ydot);
        let (jn, vn) = apply_complex_structure(&a, &jdot, &variation_at(&q, &t));
        let col = coordinates_at_i(w, &jn.m, &vn).to_array();
        for (i, c) in col.iter().enumerate() {
            at_i[(i, k)] = *c;
        }
    }
    let y = p.z.y();
    let d = [1.0 / y, 1.0 / y, y.powf(1.5), y.powf(1.5)];
    Matrix4::from_fn(|i, j| at_i[(i, j)] * (d[j] / d[i]) + 0.0)
}

/// A tangent vector to `Q^3(H^2)` in tensorial form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickTangent {
    pub jdot: TangentJ,
    pub adot: PickVariation,
}

/// The tensorial image of a coordinate tangent at `p`.
pub fn pick_tangent(p: &ModuliPoint, t: &TangentVector4) -> PickTangent {
    PickTangent {
        jdot: j_differential(&p.z, t.xdot, t.ydot),
        adot: variation_at(p, t),
    }
}

/// `(1 - f)<Jdot, Jdot'> + (f'/3)<Adot0, Adot0'> - (f'/6)<Adot_tr, Adot_tr'>`
/// with `f`, `f'` evaluated at `|A|^2 / 4`.
pub fn tensorial_metric(
    a: &PickForm,
    v: &PickTangent,
    v2: &PickTangent,
    wf: &WeightFunction,
) -> Result<f64> {
    if v.jdot.base != a.j || v2.jdot.base != a.j {
        return Err(Error::BaseMismatch);
    }
    let (f, fp) = wf.eval(0.25 * a.norm_squared())?;
    Ok((1.0 - f) * tangent_pair(&v.jdot, &v2.jdot)
        + fp / 3.0 * v.adot.inner_trace_free(&v2.adot)
        - fp / 6.0 * v.adot.inner_trace(&v2.adot))
}

/// The quadratic form `g(t, t)` at `(i, w)` by its coordinate expression.
pub fn quadratic_form_at_i(w: Complex64, t: &TangentVector4, wf: &WeightFunction) -> Result<f64> {
    let (u, v) = (w.re, w.im);
    let TangentVector4 {
        xdot: xd,
        ydot: yd,
        udot: ud,
        vdot: vd,
    } = *t;
    let (f, fp) = wf.eval(w.norm_sqr())?;
    Ok((1.0 - f + 3.0 * fp * (u * u + v * v)) * (xd * xd + yd * yd)
        + 4.0 / 3.0 * fp * (ud * ud + vd * vd)
        + 4.0 * fp * (u * (ud * yd - xd * vd) + v * (yd * vd + ud * xd)))
}

/// Numbers of positive and negative eigenvalues of a symmetric matrix.
/// Eigenvalues within `zero_tol * max|λ|` of zero are counted in neither.
pub fn signature(m: &Matrix4<f64>, zero_tol: f64) -> (usize, usize) {
    let eig = SymmetricEigen::new(*m).eigenvalues;
    let scale = eig.amax();
    let pos = eig.iter().filter(|&&l| l > zero_tol * scale).count();
    let neg = eig.iter().filter(|&&l| l < -zero_tol * scale).count();
    (pos, neg)
}

//! Hyperbolic-plane coordinates, linear complex structures on the plane and
//! the `SL(2,R)` substrate shared by the rest of the crate.
//!
//! The area form is `rho = dx0 ^ dy0`, so `rho((1,0),(0,1)) = 1`, and every
//! `J` in `J(R^2)` induces the inner product `g_J(v, u) = rho(v, J u)`.
//! The map [`j_embed`] identifies the upper half-plane with `J(R^2)` and sends
//! `i` to the standard structure `J0 = [[0,-1],[1,0]]`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for algebraic identities on 2x2 kernels.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// A point `z = x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoint {
    x: f64,
    y: f64,
}

impl HyperbolicPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::NonPositiveImaginary(y));
        }
        Ok(Self { x, y })
    }

    /// The base point `i`.
    pub const I: HyperbolicPoint = HyperbolicPoint { x: 0.0, y: 1.0 };

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// The standard area form `rho(v, u) = v1 u2 - v2 u1`.
#[inline]
pub fn area_form(v: &Vector2<f64>, u: &Vector2<f64>) -> f64 {
    v[0] * u[1] - v[1] * u[0]
}

/// Matrix of `rho` in the standard basis: `rho(v, u) = v^T R u`.
#[inline]
pub fn area_matrix() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// A `rho`-compatible linear complex structure on the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearComplexStructure(Matrix2<f64>);

impl LinearComplexStructure {
    /// Validates `J^2 = -1`, `tr J = 0`, `det J = 1` and positive orientation.
    /// The tolerance is relative to `max(1, |J|^2)`.
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        let scale = 1.0_f64.max(m.norm_squared());
        let square_defect = (m * m + Matrix2::identity()).abs().max();
        let trace_defect = m.trace().abs();
        let det_defect = (m.determinant() - 1.0).abs();
        let defect = square_defect.max(trace_defect).max(det_defect);
        // rho(e1, J e1) = J[(1,0)]
        if defect > ALGEBRAIC_TOL * scale || !(m[(1, 0)] > 0.0) {
            return Err(Error::NotComplexStructure { defect });
        }
        Ok(Self(m))
    }

    /// The standard structure `J0`, rotation by `+pi/2`.
    pub fn standard() -> Self {
        Self(Matrix2::new(0.0, -1.0, 1.0, 0.0))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    /// Inverse of [`j_embed`].
    pub fn to_point(&self) -> HyperbolicPoint {
        let y = 1.0 / self.0[(1, 0)];
        HyperbolicPoint { x: self.0[(0, 0)] * y, y }
    }

    /// Matrix of the inner product `g_J` in the standard basis.
    pub fn metric_matrix(&self) -> Matrix2<f64> {
        area_matrix() * self.0
    }

    /// A `g_J`-orthonormal frame with `J e1 = e2`, returned as the columns of
    /// a matrix. It is the image of the standard frame under the inverse of
    /// the normalizer of the corresponding half-plane point.
    pub fn orthonormal_frame(&self) -> Matrix2<f64> {
        normalizer(&self.to_point()).inverse().matrix()
    }
}

/// A tangent vector to `J(R^2)` at `base`: a traceless endomorphism that
/// anticommutes with `J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentJ {
    pub base: LinearComplexStructure,
    pub m: Matrix2<f64>,
}

impl TangentJ {
    pub fn new(base: LinearComplexStructure, m: Matrix2<f64>) -> Result<Self> {
        let j = base.matrix();
        let scale = 1.0_f64.max(j.norm() * m.norm());
        let defect = (j * m + m * j).abs().max().max(m.trace().abs());
        if defect > ALGEBRAIC_TOL * scale {
            return Err(Error::NotComplexStructure { defect });
        }
        Ok(Self { base, m })
    }

    /// The complex structure of `T_J J(R^2)`: `Jdot -> -J Jdot`.
    pub fn rotate(&self) -> TangentJ {
        TangentJ {
            base: self.base,
            m: -self.base.matrix() * self.m,
        }
    }

    pub fn scale(&self, s: f64) -> TangentJ {
        TangentJ {
            base: self.base,
            m: self.m * s,
        }
    }
}

/// An element of `SL(2,R)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SL2Element {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SL2Element {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = 1.0_f64.max((a * d).abs()).max((b * c).abs());
        if (det - 1.0).abs() > ALGEBRAIC_TOL * scale {
            return Err(Error::NotUnimodular(det));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn from_matrix(m: &Matrix2<f64>) -> Result<Self> {
        Self::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            a: c,
            b: -s,
            c: s,
            d: c,
        }
    }

    /// `diag(e^s, e^-s)`.
    pub fn scaling(s: f64) -> Self {
        Self {
            a: s.exp(),
            b: 0.0,
            c: 0.0,
            d: (-s).exp(),
        }
    }

    /// Upper-triangular shear `[[1, t], [0, 1]]`.
    pub fn shear(t: f64) -> Self {
        Self {
            a: 1.0,
            b: t,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a, self.b, self.c, self.d)
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, other: &SL2Element) -> Self {
        let m = self.matrix() * other.matrix();
        Self {
            a: m[(0, 0)],
            b: m[(0, 1)],
            c: m[(1, 0)],
            d: m[(1, 1)],
        }
    }

    /// `cz + d`, the automorphy factor of the action at `z`.
    #[inline]
    pub fn automorphy(&self, z: Complex64) -> Complex64 {
        z * self.c + self.d
    }
}

/// The `SL(2,R)`-equivariant Kähler isometry `H^2 -> J(R^2)` with `j(i) = J0`.
pub fn j_embed(z: &HyperbolicPoint) -> LinearComplexStructure {
    let (x, y) = (z.x, z.y);
    LinearComplexStructure(Matrix2::new(
        x / y,
        -(x * x + y * y) / y,
        1.0 / y,
        -x / y,
    ))
}

/// Differential of [`j_embed`] at `z` applied to `(xdot, ydot)`.
pub fn j_differential(z: &HyperbolicPoint, xdot: f64, ydot: f64) -> TangentJ {
    let (x, y) = (z.x, z.y);
    let dx = Matrix2::new(1.0 / y, -2.0 * x / y, 0.0, -1.0 / y);
    let dy = Matrix2::new(
        -x / (y * y),
        x * x / (y * y) - 1.0,
        -1.0 / (y * y),
        x / (y * y),
    );
    TangentJ {
        base: j_embed(z),
        m: dx * xdot + dy * ydot,
    }
}

/// Möbius action `(az + b) / (cz + d)`, with `Im = y / |cz + d|^2`.
pub fn mobius(p: &SL2Element, z: &HyperbolicPoint) -> HyperbolicPoint {
    let zc = z.as_complex();
    let w = (zc * p.a + p.b) / p.automorphy(zc);
    let y = z.y / p.automorphy(zc).norm_sqr();
    HyperbolicPoint { x: w.re, y }
}

/// The element `[[1/sqrt y, -x/sqrt y], [0, sqrt y]]` sending `z` to `i`.
pub fn normalizer(z: &HyperbolicPoint) -> SL2Element {
    let s = z.y.sqrt();
    SL2Element {
        a: 1.0 / s,
        b: -z.x / s,
        c: 0.0,
        d: s,
    }
}

/// `P J P^-1`.
pub fn conjugate_j(p: &SL2Element, j: &LinearComplexStructure) -> LinearComplexStructure {
    LinearComplexStructure(p.matrix() * j.matrix() * p.inverse().matrix())
}

/// `P Jdot P^-1`, the induced action on tangent vectors.
pub fn conjugate_tangent(p: &SL2Element, t: &TangentJ) -> TangentJ {
    TangentJ {
        base: conjugate_j(p, &t.base),
        m: p.matrix() * t.m * p.inverse().matrix(),
    }
}

/// `<a, b>_J = tr(a b) / 2`.
pub fn tangent_pair(a: &TangentJ, b: &TangentJ) -> f64 {
    0.5 * trace_of_product(&a.m, &b.m)
}

/// `tr(a b)`, exactly symmetric in `a` and `b`.
pub fn trace_of_product(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    a[(0, 0)] * b[(0, 0)] + a[(1, 1)] * b[(1, 1)] + (a[(0, 1)] * b[(1, 0)] + a[(1, 0)] * b[(0, 1)])
}

/// `g_J(v, u) = rho(v, J u)`.
pub fn metric_gj(j: &LinearComplexStructure, v: &Vector2<f64>, u: &Vector2<f64>) -> f64 {
    area_form(v, &(j.matrix() * u))
}

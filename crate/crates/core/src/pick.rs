//! Pick calculus on the torus: conversions among the fiber coordinate `w` of
//! a cubic differential `w dz^3`, the Pick tensor `C = Re(q)` and the Pick
//! form `A` with `C(X, Y, Z) = g_J(A(X) Y, Z)`.
//!
//! Cubic differentials on the torus are translation invariant and the torus
//! has unit area, so every `L^2` pairing reduces to a pointwise trace.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    j_differential, j_embed, normalizer, trace_of_product, HyperbolicPoint, LinearComplexStructure, TangentJ,
    ALGEBRAIC_TOL,
};
use crate::kahler::TangentVector4;

/// A point `(z, w)` of `Q^3(H^2) = H^2 x C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    pub z: HyperbolicPoint,
    pub w: Complex64,
}

impl ModuliPoint {
    pub fn new(z: HyperbolicPoint, w: Complex64) -> Self {
        Self { z, w }
    }

    pub fn from_coords(x: f64, y: f64, u: f64, v: f64) -> Result<Self> {
        Ok(Self {
            z: HyperbolicPoint::new(x, y)?,
            w: Complex64::new(u, v),
        })
    }

    /// `(x, y, u, v)`.
    pub fn coords(&self) -> [f64; 4] {
        [self.z.x(), self.z.y(), self.w.re, self.w.im]
    }

    /// Moves the point along `t`; fails if the result leaves the half-plane.
    pub fn offset(&self, t: &TangentVector4, s: f64) -> Result<Self> {
        let [x, y, u, v] = self.coords();
        Self::from_coords(x + s * t.xdot, y + s * t.ydot, u + s * t.udot, v + s * t.vdot)
    }

    /// Points with `w = 0` lie on the zero section, outside `B_0(T^2)`.
    pub fn is_on_zero_section(&self) -> bool {
        self.w == Complex64::new(0.0, 0.0)
    }
}

/// Totally symmetric trilinear form on the plane, stored by its four
/// independent components in the standard basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickTensor {
    pub c111: f64,
    pub c112: f64,
    pub c122: f64,
    pub c222: f64,
}

impl PickTensor {
    pub const ZERO: PickTensor = PickTensor {
        c111: 0.0,
        c112: 0.0,
        c122: 0.0,
        c222: 0.0,
    };

    /// Component `C_{ijk}` for indices in `{0, 1}`; by total symmetry it only
    /// depends on how many indices equal 1.
    pub fn component(&self, i: usize, j: usize, k: usize) -> f64 {
        match i + j + k {
            0 => self.c111,
            1 => self.c112,
            2 => self.c122,
            3 => self.c222,
            _ => panic!("index out of range"),
        }
    }

    pub fn eval(&self, x: &Vector2<f64>, y: &Vector2<f64>, z: &Vector2<f64>) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    acc += self.component(i, j, k) * x[i] * y[j] * z[k];
                }
            }
        }
        acc
    }

    pub fn sub(&self, other: &PickTensor) -> PickTensor {
        PickTensor {
            c111: self.c111 - other.c111,
            c112: self.c112 - other.c112,
            c122: self.c122 - other.c122,
            c222: self.c222 - other.c222,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.c111
            .abs()
            .max(self.c112.abs())
            .max(self.c122.abs())
            .max(self.c222.abs())
    }
}

fn basis() -> [Vector2<f64>; 2] {
    [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)]
}

/// Largest violation of `C(JX, JY, JZ) = -C(JX, Y, Z)` over basis triples.
pub fn compatibility_defect(j: &LinearComplexStructure, c: &PickTensor) -> f64 {
    let e = basis();
    let jm = j.matrix();
    let mut defect: f64 = 0.0;
    for x in &e {
        for y in &e {
            for z in &e {
                let (jx, jy, jz) = (jm * x, jm * y, jm * z);
                defect = defect.max((c.eval(&jx, &jy, &jz) + c.eval(&jx, y, z)).abs());
            }
        }
    }
    defect
}

/// Largest violation of `C(J., ., .) = C(., J., .) = C(., ., J.)`.
pub fn equal_slot_defect(j: &LinearComplexStructure, c: &PickTensor) -> f64 {
    let e = basis();
    let jm = j.matrix();
    let mut defect: f64 = 0.0;
    for x in &e {
        for y in &e {
            for z in &e {
                let first = c.eval(&(jm * x), y, z);
                let second = c.eval(x, &(jm * y), z);
                let third = c.eval(x, y, &(jm * z));
                defect = defect.max((first - second).abs()).max((second - third).abs());
            }
        }
    }
    defect
}

/// Real part of `w̄ (dx0 - z̄ dy0)^3`.
pub fn pick_tensor_at(p: &ModuliPoint) -> PickTensor {
    let [x, y, u, v] = p.coords();
    PickTensor {
        c111: u,
        c112: -x * u + y * v,
        c122: u * x * x - u * y * y - 2.0 * x * y * v,
        c222: -u * x * x * x - v * y * y * y + 3.0 * (u * y * y * x + x * x * y * v),
    }
}

/// Directional derivative of [`pick_tensor_at`] along `t`.
pub fn pick_tensor_variation(p: &ModuliPoint, t: &TangentVector4) -> PickTensor {
    let [x, y, u, v] = p.coords();
    let TangentVector4 {
        xdot: xd,
        ydot: yd,
        udot: ud,
        vdot: vd,
    } = *t;
    PickTensor {
        c111: ud,
        c112: -xd * u - x * ud + yd * v + y * vd,
        c122: ud * (x * x - y * y) + u * (2.0 * x * xd - 2.0 * y * yd)
            - 2.0 * (xd * y * v + x * yd * v + x * y * vd),
        c222: -ud * x * x * x - 3.0 * u * x * x * xd - vd * y * y * y - 3.0 * v * y * y * yd
            + 3.0
                * (ud * y * y * x
                    + 2.0 * u * y * yd * x
                    + u * y * y * xd
                    + 2.0 * x * xd * y * v
                    + x * x * yd * v
                    + x * x * y * vd),
    }
}

/// The anti-linear fiber map `v -> w̄ (v1 - z̄ v2)^3`.
pub fn fiber_map(p: &ModuliPoint, v: &Vector2<f64>) -> Complex64 {
    let l = Complex64::new(v[0], 0.0) - p.z.as_complex().conj() * v[1];
    p.w.conj() * l * l * l
}

/// Pick form `A = A1 e1* + A2 e2*` in a `g_J`-orthonormal frame with
/// `J e1 = e2`. The matrices `a1 = A(e1)`, `a2 = A(e2)` are endomorphisms
/// written in the standard basis; `frame` holds `e1, e2` as columns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickForm {
    pub j: LinearComplexStructure,
    pub frame: Matrix2<f64>,
    pub a1: Matrix2<f64>,
    pub a2: Matrix2<f64>,
}

impl PickForm {
    /// `A(X)` for a vector in standard coordinates.
    pub fn apply(&self, x: &Vector2<f64>) -> Matrix2<f64> {
        let alpha = self.frame_coords(x);
        self.a1 * alpha[0] + self.a2 * alpha[1]
    }

    pub fn frame_coords(&self, x: &Vector2<f64>) -> Vector2<f64> {
        let f = &self.frame;
        let inv = Matrix2::new(f[(1, 1)], -f[(0, 1)], -f[(1, 0)], f[(0, 0)]);
        inv * x
    }

    /// `C(X, Y, Z) = g_J(A(X) Y, Z)`.
    pub fn to_tensor(&self) -> PickTensor {
        let g = self.j.metric_matrix();
        let e = basis();
        let c = |i: usize, j: usize, k: usize| {
            let ay = self.apply(&e[i]) * e[j];
            (ay.transpose() * g * e[k])[(0, 0)]
        };
        PickTensor {
            c111: c(0, 0, 0),
            c112: c(0, 0, 1),
            c122: c(0, 1, 1),
            c222: c(1, 1, 1),
        }
    }

    /// `<A, B> = tr(A1 B1) + tr(A2 B2)` for forms sharing the frame.
    pub fn inner(&self, other: &PickForm) -> f64 {
        (self.a1 * other.a1).trace() + (self.a2 * other.a2).trace()
    }

    /// `|A|^2_J`.
    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }

    /// `A(.) J`, the pointwise right multiplication.
    pub fn right_mul_j(&self) -> PickForm {
        let j = self.j.matrix();
        PickForm {
            a1: self.a1 * j,
            a2: self.a2 * j,
            ..*self
        }
    }

    pub fn combine(&self, s: f64, other: &PickForm, t: f64) -> PickForm {
        PickForm {
            a1: self.a1 * s + other.a1 * t,
            a2: self.a2 * s + other.a2 * t,
            ..*self
        }
    }
}

fn standard_pick_form(w: Complex64) -> (Matrix2<f64>, Matrix2<f64>) {
    let (u, v) = (w.re, w.im);
    (Matrix2::new(u, v, v, -u), Matrix2::new(v, -u, -u, -v))
}

/// Fiber coordinate after normalizing `z` to `i`: `(cz + d)^3 w = y^{3/2} w`.
pub fn normalized_fiber(p: &ModuliPoint) -> Complex64 {
    p.w * p.z.y().powf(1.5)
}

/// Pick form at `(z, w)`, obtained by transporting the form at `(i, w')`
/// back with the normalizer `P` of `z`: `A(X) = P^-1 A'(P X) P`.
pub fn pick_form_at(p: &ModuliPoint) -> PickForm {
    let pn = normalizer(&p.z);
    let (m, minv) = (pn.matrix(), pn.inverse().matrix());
    let (a1, a2) = standard_pick_form(normalized_fiber(p));
    PickForm {
        j: j_embed(&p.z),
        frame: minv,
        a1: minv * a1 * m,
        a2: minv * a2 * m,
    }
}

/// Holomorphic cubic form `q(v) = C(v, v, v) + i C(Jv, Jv, Jv)` attached to
/// a compatible Pick tensor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicForm {
    pub j: LinearComplexStructure,
    pub tensor: PickTensor,
    /// `q(e1)` for the orthonormal frame `e1, e2 = J e1` of `j`.
    pub coefficient: Complex64,
}

impl CubicForm {
    pub fn eval(&self, v: &Vector2<f64>) -> Complex64 {
        let jv = self.j.matrix() * v;
        Complex64::new(self.tensor.eval(v, v, v), self.tensor.eval(&jv, &jv, &jv))
    }

    /// The second expression `C(v, v, v) - i C(Jv, v, v)`; agrees with
    /// [`CubicForm::eval`] whenever `C` is compatible with `J`.
    pub fn eval_alternate(&self, v: &Vector2<f64>) -> Complex64 {
        let jv = self.j.matrix() * v;
        Complex64::new(self.tensor.eval(v, v, v), -self.tensor.eval(&jv, v, v))
    }

    /// `q(a e1 + b e2) = (a + ib)^3 q(e1)`.
    pub fn eval_from_coefficient(&self, v: &Vector2<f64>) -> Complex64 {
        let frame = self.j.orthonormal_frame();
        let ab = frame.try_inverse().expect("frame is invertible") * v;
        let s = Complex64::new(ab[0], ab[1]);
        s * s * s * self.coefficient
    }
}

pub fn tensor_to_cubic(j: &LinearComplexStructure, c: &PickTensor) -> Result<CubicForm> {
    let scale = 1.0_f64.max(c.max_abs()) * 1.0_f64.max(j.matrix().norm_squared() * j.matrix().norm());
    let defect = compatibility_defect(j, c);
    if defect > ALGEBRAIC_TOL * scale {
        return Err(Error::IncompatiblePickTensor { defect });
    }
    let e1 = j.orthonormal_frame().column(0).into_owned();
    let mut form = CubicForm {
        j: *j,
        tensor: *c,
        coefficient: Complex64::new(0.0, 0.0),
    };
    form.coefficient = form.eval(&e1);
    Ok(form)
}

/// `|q|^2_{j(z)} = y^3 |w|^2`, which also equals `|A|^2 / 4`.
pub fn norm_sq(p: &ModuliPoint) -> f64 {
    p.z.y().powi(3) * p.w.norm_sqr()
}

/// Variation of the Pick form split into its trace-free part and the two
/// half-traces: `Adot_k = Adot0_k + atr_k * Id`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickVariation {
    pub adot0_1: Matrix2<f64>,
    pub adot0_2: Matrix2<f64>,
    pub atr_1: f64,
    pub atr_2: f64,
}

impl PickVariation {
    pub fn full(&self) -> (Matrix2<f64>, Matrix2<f64>) {
        (
            self.adot0_1 + Matrix2::identity() * self.atr_1,
            self.adot0_2 + Matrix2::identity() * self.atr_2,
        )
    }

    /// Splits a pair of endomorphisms into trace-free and trace parts.
    pub fn from_full(a1: Matrix2<f64>, a2: Matrix2<f64>) -> Self {
        let (t1, t2) = (0.5 * a1.trace(), 0.5 * a2.trace());
        Self {
            adot0_1: a1 - Matrix2::identity() * t1,
            adot0_2: a2 - Matrix2::identity() * t2,
            atr_1: t1,
            atr_2: t2,
        }
    }

    /// `<Adot0, Bdot0> = tr(Adot0_1 Bdot0_1) + tr(Adot0_2 Bdot0_2)`.
    pub fn inner_trace_free(&self, other: &PickVariation) -> f64 {
        trace_of_product(&self.adot0_1, &other.adot0_1) + trace_of_product(&self.adot0_2, &other.adot0_2)
    }

    /// `<Adot_tr, Bdot_tr>` with `Adot_tr = atr_1 Id e1* + atr_2 Id e2*`.
    pub fn inner_trace(&self, other: &PickVariation) -> f64 {
        2.0 * (self.atr_1 * other.atr_1 + self.atr_2 * other.atr_2)
    }

    fn conjugate(&self, left: &Matrix2<f64>, right: &Matrix2<f64>) -> Self {
        Self {
            adot0_1: left * self.adot0_1 * right,
            adot0_2: left * self.adot0_2 * right,
            ..*self
        }
    }
}

/// `(|A|^2)' = 2 <A, Adot0>`; the trace part of the variation drops out.
pub fn norm_derivative(a: &PickForm, variation: &PickVariation) -> f64 {
    2.0 * ((a.a1 * variation.adot0_1).trace() + (a.a2 * variation.adot0_2).trace())
}

/// Coordinate formulas for the variation at the normalized point `(i, w)`.
fn variation_at_i(w: Complex64, t: &TangentVector4) -> PickVariation {
    let (u, v) = (w.re, w.im);
    let TangentVector4 {
        xdot: xd,
        ydot: yd,
        udot: ud,
        vdot: vd,
    } = *t;
    let d11 = ud + u * yd + v * xd;
    let d12 = -u * xd + vd + v * yd;
    let e11 = vd + 2.0 * (v * yd - u * xd);
    let e12 = -ud - 2.0 * (u * yd + v * xd);
    PickVariation {
        adot0_1: Matrix2::new(d11, d12, d12, -d11),
        adot0_2: Matrix2::new(e11, e12, e12, -e11),
        atr_1: -(u * yd + v * xd),
        atr_2: u * xd - v * yd,
    }
}

/// Tangent vector at `p` carried to the normalized point `(i, w')`: the
/// normalizer acts by `1/y` on the base and `y^{3/2}` on the fiber.
pub fn normalized_tangent(p: &ModuliPoint, t: &TangentVector4) -> TangentVector4 {
    let y = p.z.y();
    let s = y.powf(1.5);
    TangentVector4 {
        xdot: t.xdot / y,
        ydot: t.ydot / y,
        udot: t.udot * s,
        vdot: t.vdot * s,
    }
}

/// Variation `Adot = g_J^-1 Cdot` of the Pick form along `t`, in the frame
/// of [`pick_form_at`]. Computed at the normalized point and transported
/// back, like the Pick form itself.
pub fn variation_at(p: &ModuliPoint, t: &TangentVector4) -> PickVariation {
    let at_i = variation_at_i(normalized_fiber(p), &normalized_tangent(p, t));
    let pn = normalizer(&p.z);
    at_i.conjugate(&pn.inverse().matrix(), &pn.matrix())
}

/// `Jdot = dj(xdot, ydot)`, the base component of a coordinate tangent.
pub fn tangent_j_at(p: &ModuliPoint, t: &TangentVector4) -> TangentJ {
    j_differential(&p.z, t.xdot, t.ydot)
}

//! Hyperbolic affine spheres over the torus `C / Λ` with constant cubic
//! differential `q = c dz^3`.
//!
//! Wang's equation has the constant solution `ψ = ln(2|c|^2) / 3`, the frame
//! system `∂F = A F`, `∂̄F = B F` has constant coefficients, and the two
//! coefficient matrices are simultaneously diagonalizable. The resulting
//! surface is the Ţiţeica surface `x y w = 1`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent passed to `exp` before reporting a range error.
pub const EXP_LIMIT: f64 = 700.0;

/// Relative tolerance on the determinant of an initial frame.
pub const FRAME_DET_TOL: f64 = 1e-8;

/// The coefficient `c` of `q = c dz^3`, kept with its polar data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficient {
    c: Complex64,
    rho: f64,
    theta: f64,
}

impl CubicCoefficient {
    pub fn new(c: Complex64) -> Result<Self> {
        let rho = c.norm();
        if !(rho > 0.0) {
            return Err(Error::VanishingCubicDifferential);
        }
        if !rho.is_finite() {
            return Err(Error::ExponentRange { exponent: rho });
        }
        Ok(Self {
            c,
            rho,
            theta: c.arg(),
        })
    }

    pub fn value(&self) -> Complex64 {
        self.c
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Argument in `(-π, π]`.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `ψ = ln(2|c|^2) / 3`.
pub fn wang_solution(c: &CubicCoefficient) -> f64 {
    (2.0 * c.rho * c.rho).ln() / 3.0
}

/// `4|c|^2 e^{-2u} - 2 e^u`, the residual of Wang's equation at a constant `u`.
pub fn wang_residual(c: &CubicCoefficient, u: f64) -> f64 {
    4.0 * c.rho * c.rho * (-2.0 * u).exp() - 2.0 * u.exp()
}

/// `ψ_{zz̄} + |Q|^2 e^{-2ψ} + (λ/2) e^ψ` with `λ = -1` at a constant `ψ`
/// and constant `Q = c`.
pub fn integrability_residual(c: &CubicCoefficient, psi: f64) -> f64 {
    c.rho * c.rho * (-2.0 * psi).exp() - 0.5 * psi.exp()
}

/// Newton iteration for the constant solution of Wang's equation.
/// Returns the root and the number of iterations used.
pub fn wang_newton(c: &CubicCoefficient, u0: f64, max_iter: usize) -> Option<(f64, usize)> {
    let r2 = c.rho * c.rho;
    let mut u = u0;
    for it in 0..max_iter {
        let g = 4.0 * r2 * (-2.0 * u).exp() - 2.0 * u.exp();
        let dg = -8.0 * r2 * (-2.0 * u).exp() - 2.0 * u.exp();
        let step = g / dg;
        u -= step;
        if !u.is_finite() {
            return None;
        }
        if step.abs() <= 1e-15 * (1.0 + u.abs()) {
            return Some((u, it + 1));
        }
    }
    None
}

pub type CMatrix3 = Matrix3<Complex64>;

/// Coefficient matrices of the frame system.
pub fn ode_matrices(c: &CubicCoefficient) -> (CMatrix3, CMatrix3) {
    let e = wang_solution(c).exp();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let half = Complex64::new(0.5 * e, 0.0);
    let a = CMatrix3::new(
        zero, c.c / e, zero, //
        zero, zero, half, //
        one, zero, zero,
    );
    let b = CMatrix3::new(
        zero, zero, half, //
        c.c.conj() / e, zero, zero, //
        zero, one, zero,
    );
    (a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub lambda0: Complex64,
    pub zeta: Complex64,
    /// Columns `v_0, v_1, v_2`; `A v_k = ζ^k λ0 v_k`, `B v_k = ζ^{-k} λ̄0 v_k`.
    pub eigvecs: CMatrix3,
}

impl SpectralData {
    /// `ζ^k λ0`.
    pub fn branch(&self, k: usize) -> Complex64 {
        self.zeta.powu(k as u32) * self.lambda0
    }
}

pub fn zeta() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

pub fn spectral_data(c: &CubicCoefficient) -> SpectralData {
    let s = (c.rho / 2.0).cbrt();
    let lambda0 = Complex64::from_polar(s, c.theta / 3.0);
    let zeta = zeta();
    let top = Complex64::from_polar(1.0, 2.0 * c.theta / 3.0);
    let bottom = Complex64::from_polar(1.0 / s, c.theta / 3.0);
    let one = Complex64::new(1.0, 0.0);
    let column = |k: u32| Vector3::new(zeta.powu(2 * k) * top, one, zeta.powu(k) * bottom);
    SpectralData {
        lambda0,
        zeta,
        eigvecs: CMatrix3::from_columns(&[column(0), column(1), column(2)]),
    }
}

/// The constant matrix with columns `(ζ^k λ0, ζ^{-k} λ̄0, 1)`, for which the
/// third row of `e^{Az + Bz̄} C` is real.
pub fn reference_frame(c: &CubicCoefficient) -> CMatrix3 {
    let sd = spectral_data(c);
    let one = Complex64::new(1.0, 0.0);
    let cols: Vec<Vector3<Complex64>> = (0..3)
        .map(|k| {
            let l = sd.branch(k);
            Vector3::new(l, sd.zeta.powu(((3 - k) % 3) as u32) * sd.lambda0.conj(), one)
        })
        .collect();
    CMatrix3::from_columns(&cols)
}

fn checked_exp(e: f64) -> Result<f64> {
    if e.abs() > EXP_LIMIT || !e.is_finite() {
        return Err(Error::ExponentRange { exponent: e });
    }
    Ok(e.exp())
}

/// The exponents `2 Re(ζ^k λ0 z)`; they sum to zero.
pub fn log_coordinates(c: &CubicCoefficient, z: Complex64) -> [f64; 3] {
    let sd = spectral_data(c);
    [0, 1, 2].map(|k| 2.0 * (sd.branch(k) * z).re)
}

/// `e^{Az + Bz̄}`, through the simultaneous diagonalization.
pub fn frame_exponential(c: &CubicCoefficient, z: Complex64) -> Result<CMatrix3> {
    let sd = spectral_data(c);
    let p = sd.eigvecs;
    let pinv = p.try_inverse().expect("eigenvector matrix is invertible");
    let mut d = CMatrix3::zeros();
    for (k, e) in log_coordinates(c, z).into_iter().enumerate() {
        d[(k, k)] = Complex64::new(checked_exp(e)?, 0.0);
    }
    Ok(p * d * pinv)
}

/// `F(z) = e^{Az + Bz̄} C` with `C` the reference frame.
pub fn closed_form_frame(c: &CubicCoefficient, z: Complex64) -> Result<CMatrix3> {
    Ok(frame_exponential(c, z)? * reference_frame(c))
}

/// The Ţiţeica parametrization `(e^{2Re(λ0 z)}, e^{2Re(ζλ0 z)}, e^{2Re(ζ²λ0 z)})`.
pub fn parametrize(c: &CubicCoefficient, z: Complex64) -> Result<Vector3<f64>> {
    let [a, b, d] = log_coordinates(c, z);
    Ok(Vector3::new(checked_exp(a)?, checked_exp(b)?, checked_exp(d)?))
}

/// A frame `(f_z, f_z̄, f)` (as rows) at the end point of a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSolution {
    pub z: Complex64,
    pub frame: CMatrix3,
}

impl FrameSolution {
    /// Real part of the third row.
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.frame[(2, 0)].re, self.frame[(2, 1)].re, self.frame[(2, 2)].re)
    }

    /// Largest imaginary part in the third row.
    pub fn position_imaginary_defect(&self) -> f64 {
        (0..3).map(|k| self.frame[(2, k)].im.abs()).fold(0.0, f64::max)
    }
}

/// Determinant every admissible initial frame must carry; it is the
/// determinant of [`reference_frame`] and does not depend on the base point.
pub fn frame_determinant(c: &CubicCoefficient) -> Complex64 {
    reference_frame(c).determinant()
}

/// RK4 integration of `dF = (A dz + B dz̄) F` along the polygonal `path`,
/// with at most `max_step` per step in `|dz|`.
pub fn integrate_frame(
    c: &CubicCoefficient,
    path: &[Complex64],
    f0: &CMatrix3,
    max_step: f64,
) -> Result<FrameSolution> {
    if !(max_step > 0.0) {
        return Err(Error::NonPositiveStep(max_step));
    }
    let expected = frame_determinant(c);
    let found = f0.determinant();
    let defect = (found - expected).norm() / expected.norm();
    if !(defect <= FRAME_DET_TOL) {
        return Err(Error::InvalidFrame {
            found,
            expected,
            defect,
        });
    }
    let (a, b) = ode_matrices(c);
    let mut f = *f0;
    let start = path.first().copied().unwrap_or_default();
    for seg in path.windows(2) {
        let delta = seg[1] - seg[0];
        let n = (delta.norm() / max_step).ceil().max(1.0) as usize;
        let dz = delta / n as f64;
        let m = a * dz + b * dz.conj();
        let (half, two, sixth) = (Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0 / 6.0, 0.0));
        for _ in 0..n {
            let k1 = m * f;
            let k2 = m * (f + k1 * half);
            let k3 = m * (f + k2 * half);
            let k4 = m * (f + k3);
            f += (k1 + k2 * two + k3 * two + k4) * sixth;
        }
    }
    Ok(FrameSolution {
        z: path.last().copied().unwrap_or(start),
        frame: f,
    })
}

/// Deck transformation `diag(e^{2Re(ζ^k λ0 ω)})` of the lattice vector `ω`.
pub fn holonomy(c: &CubicCoefficient, omega: Complex64) -> Result<Matrix3<f64>> {
    let h = parametrize(c, omega)?;
    Ok(Matrix3::from_diagonal(&h))
}

/// `parametrize(c, t dir)` normalized into the plane `x + y + w = 1`.
pub fn triangle_limit(c: &CubicCoefficient, direction: Complex64, t: f64) -> Vector3<f64> {
    let e = log_coordinates(c, direction * t);
    let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let v = Vector3::from(e.map(|x| (x - top).exp()));
    v / v.sum()
}

/// Index of the vertex `t -> ∞` approaches along `direction`.
pub fn limit_vertex(c: &CubicCoefficient, direction: Complex64) -> usize {
    let e = log_coordinates(c, direction);
    (0..3)
        .max_by(|&i, &j| e[i].total_cmp(&e[j]))
        .expect("three exponents")
}

/// `det(f_z, f_z̄, ξ)` with `ξ = f`, differentiating the closed form.
pub fn blaschke_det_check(c: &CubicCoefficient, z: Complex64) -> Result<Complex64> {
    let sd = spectral_data(c);
    let f = parametrize(c, z)?;
    let mut m = CMatrix3::zeros();
    for k in 0..3 {
        let l = sd.branch(k);
        m[(0, k)] = l * f[k];
        m[(1, k)] = l.conj() * f[k];
        m[(2, k)] = Complex64::new(f[k], 0.0);
    }
    Ok(m.transpose().determinant())
}

/// `i e^ψ`.
pub fn blaschke_target(c: &CubicCoefficient) -> Complex64 {
    Complex64::new(0.0, wang_solution(c).exp())
}

/// A triangulated grid sample of the surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vector3<f64>>,
    /// Zero-based, counter-clockwise in the parameter plane.
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn titeica_max_deviation(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v[0] * v[1] * v[2] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Plain OBJ with `v` and `f` records; indices are one-based.
    pub fn write_obj<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {:.8e} {:.8e} {:.8e}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        out.flush()
    }
}

/// Samples `parametrize` on an `n x n` grid over `[-r, r]^2`.
pub fn build_mesh(c: &CubicCoefficient, n: usize, r: f64) -> Result<Mesh> {
    if n < 2 || !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidGrid { n, r });
    }
    let coord = |i: usize| -r + 2.0 * r * i as f64 / (n - 1) as f64;
    let rows: Vec<Vec<Vector3<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| parametrize(c, Complex64::new(coord(i), coord(j))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let vertices = rows.into_iter().flatten().collect();
    let mut faces = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let v00 = j * n + i;
            let (v10, v01, v11) = (v00 + 1, v00 + n, v00 + n + 1);
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    Ok(Mesh { vertices, faces })
}

pub fn export_mesh(c: &CubicCoefficient, n: usize, r: f64, path: &Path) -> Result<Mesh> {
    let mesh = build_mesh(c, n, r)?;
    let file = std::fs::File::create(path)?;
    mesh.write_obj(std::io::BufWriter::new(file))?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cc(re: f64, im: f64) -> CubicCoefficient {
        CubicCoefficient::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn vanishing_coefficient_is_rejected() {
        assert!(matches!(
            CubicCoefficient::new(Complex64::new(0.0, 0.0)),
            Err(Error::VanishingCubicDifferential)
        ));
    }

    #[test]
    fn wang_examples() {
        assert_abs_diff_eq!(wang_solution(&cc(2.0, 0.0)), 2.0_f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(wang_solution(&cc(0.5_f64.sqrt(), 0.0)), 0.0, epsilon = 1e-15);
        let c = cc(0.3, -1.7);
        assert!(wang_residual(&c, wang_solution(&c)).abs() < 1e-12);
        assert!(integrability_residual(&c, wang_solution(&c)).abs() < 1e-12);
    }

    #[test]
    fn newton_converges_from_far_starts() {
        for c in [cc(0.05, 0.0), cc(2.0, 0.0), cc(-14.0, 14.0)] {
            for u0 in [-10.0, -3.0, 0.0, 4.0, 10.0] {
                let (u, _) = wang_newton(&c, u0, 200).expect("converges");
                assert_abs_diff_eq!(u, wang_solution(&c), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ode_matrices_example() {
        let (a, b) = ode_matrices(&cc(2.0, 0.0));
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let expected = CMatrix3::new(zero, one, zero, zero, zero, one, one, zero, zero);
        assert!((a - expected).norm() < 1e-15);
        assert_eq!(a.trace(), zero);
        assert_eq!(b.trace(), zero);
    }

    #[test]
    fn matrices_commute_and_share_eigenvectors() {
        let c = cc(-0.7, 3.1);
        let (a, b) = ode_matrices(&c);
        let z = Complex64::new(0.4, -1.3);
        let (az, bz) = (a * z, b * z.conj());
        assert!((az * bz - bz * az).norm() < 1e-12);
        let sd = spectral_data(&c);
        for k in 0..3 {
            let v = sd.eigvecs.column(k).into_owned();
            let la = sd.branch(k);
            let lb = sd.zeta.powu(((3 - k) % 3) as u32) * sd.lambda0.conj();
            assert!((a * v - v * la).norm() < 1e-10);
            assert!((b * v - v * lb).norm() < 1e-10);
        }
    }

    #[test]
    fn spectral_example() {
        let sd = spectral_data(&cc(2.0, 0.0));
        assert_abs_diff_eq!(sd.lambda0.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sd.lambda0.im, 0.0, epsilon = 1e-15);
        let sum: Complex64 = (0..3).map(|k| sd.zeta.powu(k)).sum();
        assert!(sum.norm() < 1e-15);
    }

    #[test]
    fn parametrize_examples() {
        let c = cc(2.0, 0.0);
        assert_eq!(parametrize(&c, Complex64::new(0.0, 0.0)).unwrap(), Vector3::new(1.0, 1.0, 1.0));
        let f = parametrize(&c, Complex64::new(1.0, 0.0)).unwrap();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(f, Vector3::new(e * e, 1.0 / e, 1.0 / e), epsilon = 1e-14);
        assert!(matches!(
            parametrize(&c, Complex64::new(1000.0, 0.0)),
            Err(Error::ExponentRange { .. })
        ));
    }

    #[test]
    fn closed_form_frame_is_diagonal_in_reference_columns() {
        let c = cc(1.3, 0.8);
        let z = Complex64::new(0.6, -0.9);
        let f = closed_form_frame(&c, z).unwrap();
        let p = parametrize(&c, z).unwrap();
        let direct = reference_frame(&c) * CMatrix3::from_diagonal(&p.map(|x| Complex64::new(x, 0.0)));
        assert!((f - direct).norm() < 1e-12);
        let sol = FrameSolution { z, frame: f };
        assert!(sol.position_imaginary_defect() < 1e-10);
        assert_abs_diff_eq!(sol.position(), p, epsilon = 1e-12);
    }

    #[test]
    fn zero_length_path_returns_initial_frame() {
        let c = cc(2.0, 0.0);
        let f0 = reference_frame(&c);
        let sol = integrate_frame(&c, &[Complex64::new(0.0, 0.0)], &f0, 1e-3).unwrap();
        assert_eq!(sol.frame, f0);
    }

    #[test]
    fn rk4_matches_closed_form() {
        let c = cc(2.0, 0.0);
        let end = Complex64::new(1.0, 1.0);
        let sol = integrate_frame(&c, &[Complex64::new(0.0, 0.0), end], &reference_frame(&c), 1e-3).unwrap();
        let p = parametrize(&c, end).unwrap();
        assert!((sol.position() - p).amax() < 1e-6);
    }

    #[test]
    fn rk4_is_path_independent() {
        let c = cc(-0.4, 1.1);
        let f0 = reference_frame(&c);
        let o = Complex64::new(0.0, 0.0);
        let end = Complex64::new(0.8, 0.6);
        let a = integrate_frame(&c, &[o, Complex64::new(0.8, 0.0), end], &f0, 1e-3).unwrap();
        let b = integrate_frame(&c, &[o, Complex64::new(0.0, 0.6), end], &f0, 1e-3).unwrap();
        assert!((a.frame - b.frame).norm() < 1e-6);
    }

    #[test]
    fn bad_initial_frame_is_rejected() {
        let c = cc(2.0, 0.0);
        let f0 = reference_frame(&c) * Complex64::new(2.0, 0.0);
        assert!(matches!(
            integrate_frame(&c, &[Complex64::new(0.0, 0.0)], &f0, 1e-3),
            Err(Error::InvalidFrame { .. })
        ));
    }

    #[test]
    fn holonomy_examples() {
        let c = cc(0.9, -2.2);
        assert_eq!(holonomy(&c, Complex64::new(0.0, 0.0)).unwrap(), Matrix3::identity());
        let omega = Complex64::new(0.7, 1.9);
        let h = holonomy(&c, omega).unwrap();
        assert_abs_diff_eq!(h.determinant(), 1.0, epsilon = 1e-12);
        let z = Complex64::new(-0.3, 0.5);
        let lhs = parametrize(&c, z + omega).unwrap();
        let rhs = h * parametrize(&c, z).unwrap();
        assert!((lhs - rhs).amax() < 1e-10 * lhs.amax());
    }

    #[test]
    fn triangle_limit_examples() {
        let c = cc(2.0, 0.0);
        let third = Vector3::new(1.0, 1.0, 1.0) / 3.0;
        assert_abs_diff_eq!(triangle_limit(&c, Complex64::new(1.0, 0.0), 0.0), third, epsilon = 1e-15);
        let v = triangle_limit(&c, Complex64::new(1.0, 0.0), 50.0);
        assert_abs_diff_eq!(v, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-10);
        let far = triangle_limit(&c, Complex64::new(0.0, 1.0), 1e3);
        assert!(far.iter().all(|x| x.is_finite()));
        assert_eq!(limit_vertex(&c, Complex64::new(1.0, 0.0)), 0);
    }

    #[test]
    fn blaschke_determinant_is_imaginary_and_constant() {
        let c = cc(2.0, 0.0);
        let d0 = blaschke_det_check(&c, Complex64::new(0.0, 0.0)).unwrap();
        assert!(d0.re.abs() < 1e-10);
        assert_abs_diff_eq!(d0.im, -3.0 * 3.0_f64.sqrt(), epsilon = 1e-12);
        let d1 = blaschke_det_check(&c, Complex64::new(0.7, -1.2)).unwrap();
        assert!((d1 - d0).norm() < 1e-10);
        assert!((frame_determinant(&c) - d0).norm() < 1e-12);
    }

    #[test]
    fn mesh_counts_and_titeica() {
        let c = cc(2.0, 0.0);
        let m = build_mesh(&c, 2, 1.0).unwrap();
        assert_eq!((m.vertices.len(), m.faces.len()), (4, 2));
        let m = build_mesh(&c, 101, 2.0).unwrap();
        assert_eq!((m.vertices.len(), m.faces.len()), (10201, 20000));
        assert!(m.titeica_max_deviation() < 1e-9);
        assert!(matches!(build_mesh(&c, 1, 1.0), Err(Error::InvalidGrid { .. })));
    }

    #[test]
    fn faces_are_counter_clockwise() {
        let c = cc(1.0, 0.0);
        let n = 4;
        let m = build_mesh(&c, n, 1.0).unwrap();
        let uv = |k: usize| ((k % n) as f64, (k / n) as f64);
        for f in &m.faces {
            let (a, b, d) = (uv(f[0]), uv(f[1]), uv(f[2]));
            let cross = (b.0 - a.0) * (d.1 - a.1) - (b.1 - a.1) * (d.0 - a.0);
            assert!(cross > 0.0);
        }
    }

    #[test]
    fn obj_output_format() {
        let c = cc(2.0, 0.0);
        let mut buf = Vec::new();
        build_mesh(&c, 2, 1.0).unwrap().write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2);
        assert!(text.contains("f 1 2 4"));
    }
}

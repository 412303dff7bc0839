//! Finite-difference utilities and the named verification suites.
//!
//! Every suite draws its inputs sequentially from a seeded [`Sampler`],
//! evaluates them in parallel and reduces with a sequential maximum, so a
//! report depends only on `(suite, weight, samples, seed, tolerance)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{
    circle_act, circle_differential, circle_generator, hamiltonian, moment_map, sl2_act,
    sl2_differential, sl2_generator, SL2AlgebraElement,
};
use crate::error::{Error, Result};
use crate::kahler::{
    complex_structure_at, metric_at, metric_det, omega_at, signature, TangentVector4,
    WeightFunction,
};
use crate::pick::ModuliPoint;
use crate::sampling::Sampler;
use crate::sphere::{
    blaschke_det_check, holonomy, log_coordinates, ode_matrices, parametrize, spectral_data,
    triangle_limit, wang_residual, wang_solution, CubicCoefficient,
};

/// Step used by every finite-difference check.
pub const FD_STEP: f64 = 1e-4;

fn check_step(p: &ModuliPoint, h: f64, reach: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveStep(h));
    }
    if p.z.y() - reach * h <= 0.0 {
        return Err(Error::StepCrossesBoundary { y: p.z.y(), h });
    }
    Ok(())
}

fn shifted(p: &ModuliPoint, k: usize, s: f64) -> ModuliPoint {
    p.offset(&TangentVector4::basis(k), s)
        .expect("step was checked against the boundary")
}

/// Five-point central derivative of `at` at zero.
fn five_point<T, F>(at: F, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: Sub<Output = T> + Add<Output = T> + Mul<f64, Output = T>,
{
    (at(h) - at(-h)) * (8.0 / (12.0 * h)) + (at(-2.0 * h) - at(2.0 * h)) * (1.0 / (12.0 * h))
}

/// Gradient in `(x, y, u, v)` by the five-point stencil; samples reach `y ± 2h`.
pub fn fd_gradient<F>(field: F, p: &ModuliPoint, h: f64) -> Result<TangentVector4>
where
    F: Fn(&ModuliPoint) -> f64,
{
    check_step(p, h, 2.0)?;
    let g = [0, 1, 2, 3].map(|k| five_point(|s| field(&shifted(p, k, s)), h));
    Ok(TangentVector4::from_array(g))
}

/// Jacobian of a map of moduli points in `(x, y, u, v)` coordinates.
pub fn fd_jacobian<F>(map: F, p: &ModuliPoint, h: f64) -> Result<Matrix4<f64>>
where
    F: Fn(&ModuliPoint) -> ModuliPoint,
{
    check_step(p, h, 2.0)?;
    let columns = [0, 1, 2, 3].map(|k| five_point(|s| Vector4::from(map(&shifted(p, k, s)).coords()), h));
    Ok(Matrix4::from_columns(&columns))
}

/// Index triples of the four components of a 3-form in dimension 4.
pub const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// `(dω)_{ijk} = ∂_i ω_{jk} - ∂_j ω_{ik} + ∂_k ω_{ij}` by the five-point
/// central stencil, in the order of [`TRIPLES`]. Samples reach `y ± 2h`.
pub fn fd_exterior_derivative<F>(form: F, p: &ModuliPoint, h: f64) -> Result<[f64; 4]>
where
    F: Fn(&ModuliPoint) -> Matrix4<f64>,
{
    check_step(p, h, 2.0)?;
    let partial = [0, 1, 2, 3].map(|k| five_point(|s| form(&shifted(p, k, s)), h));
    Ok(TRIPLES.map(|[i, j, k]| partial[i][(j, k)] - partial[j][(i, k)] + partial[k][(i, j)]))
}

/// `ω(X, .)` as a covector.
pub fn contract(omega: &Matrix4<f64>, x: &TangentVector4) -> Vector4<f64> {
    omega.transpose() * x.to_vector()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Closedness,
    Compatibility,
    Nondegeneracy,
    Sl2Invariance,
    Circle,
    Moment,
    Sphere,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Closedness,
        Suite::Compatibility,
        Suite::Nondegeneracy,
        Suite::Sl2Invariance,
        Suite::Circle,
        Suite::Moment,
        Suite::Sphere,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Closedness => "closedness",
            Suite::Compatibility => "compatibility",
            Suite::Nondegeneracy => "nondegeneracy",
            Suite::Sl2Invariance => "sl2-invariance",
            Suite::Circle => "circle",
            Suite::Moment => "moment",
            Suite::Sphere => "sphere",
        }
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            Suite::Closedness | Suite::Circle | Suite::Moment => 1e-6,
            Suite::Compatibility => 1e-12,
            Suite::Nondegeneracy | Suite::Sphere => 1e-10,
            Suite::Sl2Invariance => 1e-9,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstOffender {
    pub sample: usize,
    /// `(x, y, u, v)` for the moduli suites, `(Re c, Im c, Re z, Im z)` for the sphere suite.
    pub point: [f64; 4],
    pub component: usize,
    pub check: String,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub weight: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_abs_error: f64,
    pub passed: bool,
    pub worst: Option<WorstOffender>,
}

/// Error of one sample: value, component index and the name of the check.
#[derive(Clone, Copy, Debug)]
struct SampleError {
    error: f64,
    component: usize,
    check: &'static str,
}

impl SampleError {
    const NONE: SampleError = SampleError {
        error: 0.0,
        component: 0,
        check: "",
    };

    fn worse(self, other: SampleError) -> SampleError {
        if other.error > self.error {
            other
        } else {
            self
        }
    }

    fn from_values(check: &'static str, values: impl IntoIterator<Item = f64>) -> SampleError {
        values
            .into_iter()
            .enumerate()
            .fold(SampleError::NONE, |acc, (component, e)| {
                let error = if e.is_nan() { f64::INFINITY } else { e.abs() };
                acc.worse(SampleError {
                    error,
                    component,
                    check,
                })
            })
    }
}

fn matrix_error(check: &'static str, m: &Matrix4<f64>) -> SampleError {
    SampleError::from_values(check, m.iter().copied())
}

fn difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Components of `dω` at `p` with step [`FD_STEP`].
pub fn closedness_defect(p: &ModuliPoint, wf: &WeightFunction) -> Result<[f64; 4]> {
    fd_exterior_derivative(|q| omega_at(q, wf), p, FD_STEP)
}

fn closedness(p: &ModuliPoint, wf: &WeightFunction) -> SampleError {
    match closedness_defect(p, wf) {
        Ok(d) => SampleError::from_values("d omega", d),
        Err(_) => SampleError::from_values("d omega", [f64::INFINITY]),
    }
}

fn compatibility(p: &ModuliPoint, wf: &WeightFunction) -> SampleError {
    let g = metric_at(p, wf);
    let i = complex_structure_at(p);
    let o = omega_at(p, wf);
    matrix_error("I^2 + 1", &(i * i + Matrix4::identity()))
        .worse(matrix_error("I^T G I - G", &(i.transpose() * g * i - g)))
        .worse(matrix_error("G I - omega", &(g * i - o)))
}

fn nondegeneracy(p: &ModuliPoint, wf: &WeightFunction) -> SampleError {
    let (closed, numeric) = metric_det(p, wf);
    let relative = SampleError::from_values("det relative", [(closed - numeric) / closed]);
    let sig = if signature(&metric_at(p, wf), 1e-12) == (2, 2) { 0.0 } else { 1.0 };
    let positive = if closed > 0.0 && numeric > 0.0 { 0.0 } else { 1.0 };
    relative
        .worse(SampleError::from_values("signature (2,2)", [sig]))
        .worse(SampleError::from_values("det positive", [positive]))
}

fn sl2_invariance(p: &ModuliPoint, g: &crate::geometry::SL2Element, wf: &WeightFunction) -> SampleError {
    let d = sl2_differential(g, p);
    let q = sl2_act(g, p);
    let gp = metric_at(p, wf);
    let op = omega_at(p, wf);
    let pulled_g = d.transpose() * metric_at(&q, wf) * d;
    let pulled_o = d.transpose() * omega_at(&q, wf) * d;
    SampleError::from_values("pullback G", difference(pulled_g.as_slice(), gp.as_slice()))
        .worse(SampleError::from_values("pullback omega", difference(pulled_o.as_slice(), op.as_slice())))
}

fn hamiltonian_identity(p: &ModuliPoint, wf: &WeightFunction) -> SampleError {
    let omega = omega_at(p, wf);
    let exact = contract(&omega, &circle_generator(p));
    let fd = match fd_gradient(|q| hamiltonian(q, wf), p, FD_STEP) {
        Ok(v) => v.to_vector(),
        Err(_) => return SampleError::from_values("dH", [f64::INFINITY]),
    };
    SampleError::from_values("dH - omega(X, .)", difference(fd.as_slice(), exact.as_slice()))
}

fn circle(p: &ModuliPoint, theta: f64, wf: &WeightFunction) -> SampleError {
    let d = circle_differential(theta);
    let q = circle_act(theta, p);
    let gp = metric_at(p, wf);
    let op = omega_at(p, wf);
    let pulled_g = d.transpose() * metric_at(&q, wf) * d;
    let pulled_o = d.transpose() * omega_at(&q, wf) * d;
    hamiltonian_identity(p, wf)
        .worse(SampleError::from_values("circle pullback G", difference(pulled_g.as_slice(), gp.as_slice())))
        .worse(SampleError::from_values("circle pullback omega", difference(pulled_o.as_slice(), op.as_slice())))
}

fn moment(p: &ModuliPoint, wf: &WeightFunction) -> SampleError {
    let omega = omega_at(p, wf);
    SL2AlgebraElement::basis()
        .iter()
        .fold(SampleError::NONE, |acc, x| {
            let exact = contract(&omega, &sl2_generator(x, p));
            let fd = match fd_gradient(|q| moment_map(q, wf).eval(x), p, FD_STEP) {
                Ok(v) => v.to_vector(),
                Err(_) => return acc.worse(SampleError::from_values("d mu", [f64::INFINITY])),
            };
            acc.worse(SampleError::from_values(
                "d mu - omega(V, .)",
                difference(fd.as_slice(), exact.as_slice()),
            ))
        })
}

fn sphere(c: &CubicCoefficient, z: Complex64, omega: Complex64, dir: Complex64) -> SampleError {
    let run = || -> Result<SampleError> {
        let psi = wang_solution(c);
        let wang = SampleError::from_values("wang residual", [wang_residual(c, psi)]);
        let f = parametrize(c, z)?;
        let titeica = SampleError::from_values("titeica product", [f[0] * f[1] * f[2] - 1.0]);
        let logs = SampleError::from_values("log coordinate sum", [log_coordinates(c, z).iter().sum::<f64>()]);
        let (a, b) = ode_matrices(c);
        let (az, bz) = (a * z, b * z.conj());
        let comm = (az * bz - bz * az).norm();
        let sd = spectral_data(c);
        let eig: Vec<f64> = (0..3)
            .flat_map(|k| {
                let v = sd.eigvecs.column(k).into_owned();
                let la = sd.branch(k);
                let lb = sd.zeta.powu(((3 - k) % 3) as u32) * sd.lambda0.conj();
                [(a * v - v * la).norm(), (b * v - v * lb).norm()]
            })
            .collect();
        let spectral = SampleError::from_values("commutator", [comm])
            .worse(SampleError::from_values("eigenvector residual", eig));
        let h = holonomy(c, omega)?;
        let shifted = parametrize(c, z + omega)?;
        let moved = h * f;
        let hol = SampleError::from_values(
            "holonomy translation",
            moved.iter().zip(shifted.iter()).map(|(a, b)| (a - b) / b),
        )
            .worse(SampleError::from_values("holonomy det", [h.determinant() - 1.0]));
        let d0 = blaschke_det_check(c, Complex64::new(0.0, 0.0))?;
        let dz = blaschke_det_check(c, z)?;
        let scale = d0.norm().max(1.0);
        let blaschke = SampleError::from_values("blaschke real part", [dz.re / scale])
            .worse(SampleError::from_values("blaschke constancy", [(dz - d0).norm() / scale]));
        let t = 50.0;
        let tri = triangle_limit(c, dir, t);
        let direct = parametrize(c, dir * t)?;
        let direct = direct / direct.sum();
        let triangle = SampleError::from_values("triangle normalization", (tri - direct).iter().copied());
        Ok(wang
            .worse(titeica)
            .worse(logs)
            .worse(spectral)
            .worse(hol)
            .worse(blaschke)
            .worse(triangle))
    };
    run().unwrap_or_else(|_| SampleError::from_values("exponent range", [f64::INFINITY]))
}

enum SampleInput {
    Point(ModuliPoint),
    PointWithGroup(ModuliPoint, crate::geometry::SL2Element),
    PointWithAngle(ModuliPoint, f64),
    Sphere {
        c: CubicCoefficient,
        z: Complex64,
        omega: Complex64,
        dir: Complex64,
    },
}

impl SampleInput {
    fn coordinates(&self) -> [f64; 4] {
        match self {
            SampleInput::Point(p) | SampleInput::PointWithGroup(p, _) | SampleInput::PointWithAngle(p, _) => p.coords(),
            SampleInput::Sphere { c, z, .. } => [c.value().re, c.value().im, z.re, z.im],
        }
    }
}

fn draw(suite: Suite, sampler: &mut Sampler) -> SampleInput {
    match suite {
        Suite::Closedness | Suite::Compatibility | Suite::Nondegeneracy | Suite::Moment => {
            SampleInput::Point(sampler.moduli_point())
        }
        Suite::Sl2Invariance => {
            let p = sampler.moduli_point();
            SampleInput::PointWithGroup(p, sampler.sl2_element())
        }
        Suite::Circle => {
            let p = sampler.moduli_point();
            SampleInput::PointWithAngle(p, sampler.uniform(-std::f64::consts::PI, std::f64::consts::PI))
        }
        Suite::Sphere => {
            let c = sampler.cubic_coefficient();
            let z = sampler.complex_in_box(1.0);
            let omega = sampler.lattice_vector();
            let dir = sampler.unit_direction();
            SampleInput::Sphere { c, z, omega, dir }
        }
    }
}

fn evaluate(suite: Suite, input: &SampleInput, wf: &WeightFunction) -> SampleError {
    match (suite, input) {
        (Suite::Closedness, SampleInput::Point(p)) => closedness(p, wf),
        (Suite::Compatibility, SampleInput::Point(p)) => compatibility(p, wf),
        (Suite::Nondegeneracy, SampleInput::Point(p)) => nondegeneracy(p, wf),
        (Suite::Moment, SampleInput::Point(p)) => moment(p, wf),
        (Suite::Sl2Invariance, SampleInput::PointWithGroup(p, g)) => sl2_invariance(p, g, wf),
        (Suite::Circle, SampleInput::PointWithAngle(p, theta)) => circle(p, *theta, wf),
        (Suite::Sphere, SampleInput::Sphere { c, z, omega, dir }) => sphere(c, *z, *omega, *dir),
        _ => unreachable!("inputs are drawn per suite"),
    }
}

/// Runs `suite` on `samples` seeded inputs.
pub fn run_suite(
    suite: Suite,
    wf: &WeightFunction,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> VerificationReport {
    let tolerance = tol.unwrap_or_else(|| suite.default_tolerance());
    let mut sampler = Sampler::new(seed);
    let inputs: Vec<SampleInput> = (0..samples).map(|_| draw(suite, &mut sampler)).collect();
    let errors: Vec<SampleError> = inputs.par_iter().map(|input| evaluate(suite, input, wf)).collect();
    let mut worst: Option<(usize, SampleError)> = None;
    for (i, e) in errors.iter().enumerate() {
        if worst.is_none_or(|(_, w)| e.error > w.error) {
            worst = Some((i, *e));
        }
    }
    let max_abs_error = worst.map_or(0.0, |(_, e)| e.error);
    VerificationReport {
        suite: suite.name().to_string(),
        weight: wf.to_string(),
        samples,
        seed,
        tolerance,
        max_abs_error,
        passed: max_abs_error <= tolerance,
        worst: worst.map(|(i, e)| WorstOffender {
            sample: i,
            point: inputs[i].coordinates(),
            component: e.component,
            check: e.check.to_string(),
            error: e.error,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pick::norm_sq;
    use approx::assert_abs_diff_eq;

    const LIN: WeightFunction = WeightFunction::Linear { k: 1.0 };

    fn at_i1() -> ModuliPoint {
        ModuliPoint::from_coords(0.0, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn gradient_examples() {
        let g = fd_gradient(norm_sq, &at_i1(), 1e-5).unwrap().to_array();
        for (a, b) in g.iter().zip([0.0, 3.0, 2.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-8);
        }
        assert_eq!(fd_gradient(|_| 4.2, &at_i1(), 1e-5).unwrap().to_array(), [0.0; 4]);
        let h = fd_gradient(|q| hamiltonian(q, &LIN), &at_i1(), 1e-5).unwrap().to_array();
        for (a, b) in h.iter().zip([0.0, -2.0, -4.0 / 3.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn step_validation() {
        let p = ModuliPoint::from_coords(0.0, 0.5, 0.0, 0.0).unwrap();
        assert!(matches!(fd_gradient(norm_sq, &p, 0.6), Err(Error::StepCrossesBoundary { .. })));
        assert!(matches!(fd_gradient(norm_sq, &p, 0.0), Err(Error::NonPositiveStep(_))));
    }

    #[test]
    fn exterior_derivative_examples() {
        let constant = |_: &ModuliPoint| omega_at(&at_i1(), &LIN);
        assert_eq!(fd_exterior_derivative(constant, &at_i1(), 1e-4).unwrap(), [0.0; 4]);
        // u dx ∧ dy
        let control = |q: &ModuliPoint| {
            let mut m = Matrix4::zeros();
            m[(0, 1)] = q.w.re;
            m[(1, 0)] = -q.w.re;
            m
        };
        let d = fd_exterior_derivative(control, &at_i1(), 1e-4).unwrap();
        assert_abs_diff_eq!(d[0], 1.0, epsilon = 1e-10);
        assert_eq!(&d[1..], &[0.0, 0.0, 0.0]);
        let near = ModuliPoint::from_coords(0.0, 0.5, 1.0, 0.0).unwrap();
        assert!(matches!(
            fd_exterior_derivative(control, &near, 0.3),
            Err(Error::StepCrossesBoundary { .. })
        ));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("bogus".parse::<Suite>(), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite(Suite::Moment, &LIN, 20, 5, None);
        let b = run_suite(Suite::Moment, &LIN, 20, 5, None);
        assert_eq!(a, b);
        assert_eq!(a.passed, a.max_abs_error <= a.tolerance);
    }
}

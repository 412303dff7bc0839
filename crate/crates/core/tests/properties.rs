use nalgebra::{Matrix4, Vector2};
use num_complex::Complex64;
use proptest::prelude::*;

use pktorus::actions::{
    circle_act, circle_differential, hamiltonian, moment_map, sl2_act, sl2_differential, SL2AlgebraElement,
};
use pktorus::geometry::{j_embed, SL2Element};
use pktorus::kahler::{
    complex_structure_at, metric_at, metric_det, omega_at, pick_tangent, signature, tensorial_metric,
};
use pktorus::pick::{pick_form_at, pick_tensor_at, tensor_to_cubic};
use pktorus::sphere::{holonomy, log_coordinates, parametrize, wang_residual, wang_solution};
use pktorus::{CubicCoefficient, ModuliPoint, TangentVector4, WeightFunction};

fn point() -> impl Strategy<Value = ModuliPoint> {
    (-3.0..3.0f64, 0.2..4.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(x, y, u, v)| ModuliPoint::from_coords(x, y, u, v).unwrap())
}

fn weight() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        (0.1..3.0f64).prop_map(|k| WeightFunction::linear(k).unwrap()),
        (0.1..3.0f64).prop_map(|k| WeightFunction::logarithmic(k).unwrap()),
    ]
}

fn tangent() -> impl Strategy<Value = TangentVector4> {
    prop::array::uniform4(-1.0..1.0f64).prop_map(TangentVector4::from_array)
}

fn group_element() -> impl Strategy<Value = SL2Element> {
    (-3.0..3.0f64, -1.0..1.0f64, -1.5..1.5f64).prop_map(|(theta, s, t)| {
        SL2Element::rotation(theta)
            .compose(&SL2Element::scaling(s.exp()))
            .compose(&SL2Element::shear(t))
    })
}

fn coefficient() -> impl Strategy<Value = CubicCoefficient> {
    (0.1..5.0f64, -3.1..3.1f64)
        .prop_map(|(r, th)| CubicCoefficient::new(Complex64::from_polar(r, th)).unwrap())
}

fn rel(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn metric_is_symmetric_with_split_signature(p in point(), wf in weight()) {
        let g = metric_at(&p, &wf);
        prop_assert_eq!(g, g.transpose());
        prop_assert_eq!(signature(&g, 1e-12), (2, 2));
    }

    #[test]
    fn closed_determinant_matches_numeric(p in point(), wf in weight()) {
        let (closed, numeric) = metric_det(&p, &wf);
        prop_assert!(((closed - numeric) / closed).abs() < 1e-10);
    }

    #[test]
    fn complex_structure_is_compatible(p in point(), wf in weight()) {
        let g = metric_at(&p, &wf);
        let i = complex_structure_at(&p);
        prop_assert_eq!(i * i, -Matrix4::identity());
        prop_assert!(rel(&(i.transpose() * g * i), &g) < 1e-12);
        let omega = omega_at(&p, &wf);
        prop_assert!(rel(&(g * i), &omega) < 1e-12);
        prop_assert_eq!(omega, -omega.transpose());
    }

    #[test]
    fn coordinate_and_tensorial_metrics_agree(p in point(), wf in weight(), t in tangent(), s in tangent()) {
        let a = pick_form_at(&p);
        let tensorial = tensorial_metric(&a, &pick_tangent(&p, &t), &pick_tangent(&p, &s), &wf).unwrap();
        let coordinate = (t.to_vector().transpose() * metric_at(&p, &wf) * s.to_vector())[0];
        prop_assert!((tensorial - coordinate).abs() < 1e-10 * coordinate.abs().max(1.0));
    }

    #[test]
    fn circle_action_preserves_structure(p in point(), wf in weight(), theta in -6.3..6.3f64) {
        let q = circle_act(theta, &p);
        let d = circle_differential(theta);
        prop_assert!(rel(&(d.transpose() * metric_at(&q, &wf) * d), &metric_at(&p, &wf)) < 1e-12);
        prop_assert!((hamiltonian(&q, &wf) - hamiltonian(&p, &wf)).abs() < 1e-12 * hamiltonian(&p, &wf).abs().max(1.0));
    }

    #[test]
    fn sl2_action_is_an_isometric_group_action(p in point(), wf in weight(), a in group_element(), b in group_element()) {
        let composed = sl2_act(&a, &sl2_act(&b, &p)).coords();
        let direct = sl2_act(&a.compose(&b), &p).coords();
        for k in 0..4 {
            prop_assert!((composed[k] - direct[k]).abs() < 1e-9 * direct[k].abs().max(1.0));
        }
        let d = sl2_differential(&a, &p);
        let q = sl2_act(&a, &p);
        prop_assert!(rel(&(d.transpose() * metric_at(&q, &wf) * d), &metric_at(&p, &wf)) < 1e-9);
        prop_assert!(rel(&(d.transpose() * omega_at(&q, &wf) * d), &omega_at(&p, &wf)) < 1e-9);
    }

    #[test]
    fn moment_map_is_equivariant(p in point(), wf in weight(), a in group_element(), c in prop::array::uniform3(-1.0..1.0f64)) {
        let x = SL2AlgebraElement::new(c[0], c[1], c[2]);
        let lhs = moment_map(&sl2_act(&a, &p), &wf).eval(&x);
        let rhs = moment_map(&p, &wf).eval(&x.adjoint(&a.inverse()));
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn algebra_exponential_is_a_one_parameter_subgroup(c in prop::array::uniform3(-1.0..1.0f64), s in -1.0..1.0f64, t in -1.0..1.0f64) {
        let x = SL2AlgebraElement::new(c[0], c[1], c[2]);
        let product = x.exp(s).compose(&x.exp(t)).matrix();
        let direct = x.exp(s + t).matrix();
        prop_assert!((product - direct).amax() < 1e-12 * direct.amax());
        prop_assert!((direct.determinant() - 1.0).abs() < 1e-12 * direct.amax().powi(2));
    }

    #[test]
    fn pick_tensor_round_trips(p in point(), v in prop::array::uniform2(-1.0..1.0f64)) {
        let c = pick_tensor_at(&p);
        let a = pick_form_at(&p);
        prop_assert!(a.to_tensor().sub(&c).max_abs() < 1e-12 * c.max_abs().max(1.0));
        let j = j_embed(&p.z);
        let q = tensor_to_cubic(&j, &c).unwrap();
        let v = Vector2::new(v[0], v[1]);
        let scale = c.max_abs().max(1.0) * j.matrix().amax().powi(3);
        prop_assert!((q.eval(&v) - q.eval_alternate(&v)).norm() < 1e-12 * scale);
    }

    #[test]
    fn affine_sphere_lies_on_titeica_surface(c in coefficient(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let z = Complex64::new(x, y);
        let f = parametrize(&c, z).unwrap();
        prop_assert!((f[0] * f[1] * f[2] - 1.0).abs() < 1e-12);
        prop_assert!(log_coordinates(&c, z).iter().sum::<f64>().abs() < 1e-12);
        prop_assert!(wang_residual(&c, wang_solution(&c)).abs() < 1e-12);
    }

    #[test]
    fn holonomy_is_a_unimodular_translation(c in coefficient(), z in prop::array::uniform2(-1.0..1.0f64), w in prop::array::uniform2(-1.0..1.0f64)) {
        let (z, w) = (Complex64::new(z[0], z[1]), Complex64::new(w[0], w[1]));
        let h = holonomy(&c, w).unwrap();
        let moved = h * parametrize(&c, z).unwrap();
        let target = parametrize(&c, z + w).unwrap();
        prop_assert!((moved - target).amax() < 1e-10 * target.amax().max(1.0));
        prop_assert!((h.determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weight_spec_round_trips(wf in weight()) {
        let parsed: WeightFunction = wf.to_string().parse().unwrap();
        prop_assert_eq!(parsed, wf);
        let json = serde_json::to_string(&wf).unwrap();
        prop_assert_eq!(serde_json::from_str::<WeightFunction>(&json).unwrap(), wf);
    }

    #[test]
    fn moduli_point_serializes(p in point()) {
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<ModuliPoint>(&json).unwrap(), p);
    }
}

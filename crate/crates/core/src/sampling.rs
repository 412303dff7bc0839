//! Seeded sampler shared by the tests and the verification suites. A sample
//! is determined by the seed and the draw order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{HyperbolicPoint, SL2Element};
use crate::pick::ModuliPoint;
use crate::sphere::CubicCoefficient;

pub const X_RANGE: (f64, f64) = (-3.0, 3.0);
pub const Y_RANGE: (f64, f64) = (0.2, 5.0);
pub const FIBER_RANGE: (f64, f64) = (-1.0, 1.0);
pub const GENERATOR_RANGE: (f64, f64) = (-2.0, 2.0);

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// `x` uniform, `y` log-uniform.
    pub fn hyperbolic_point(&mut self) -> HyperbolicPoint {
        let x = self.uniform(X_RANGE.0, X_RANGE.1);
        let y = self.uniform(Y_RANGE.0.ln(), Y_RANGE.1.ln()).exp();
        HyperbolicPoint::new(x, y).expect("sampled y is positive")
    }

    pub fn fiber(&mut self) -> Complex64 {
        Complex64::new(
            self.uniform(FIBER_RANGE.0, FIBER_RANGE.1),
            self.uniform(FIBER_RANGE.0, FIBER_RANGE.1),
        )
    }

    pub fn moduli_point(&mut self) -> ModuliPoint {
        let z = self.hyperbolic_point();
        let w = self.fiber();
        ModuliPoint::new(z, w)
    }

    /// Product of a rotation, a diagonal scaling and a shear.
    pub fn sl2_element(&mut self) -> SL2Element {
        let (lo, hi) = GENERATOR_RANGE;
        let r = SL2Element::rotation(self.uniform(lo, hi));
        let s = SL2Element::scaling(self.uniform(lo, hi));
        let n = SL2Element::shear(self.uniform(lo, hi));
        r.compose(&s).compose(&n)
    }

    pub fn complex_in_box(&mut self, half_width: f64) -> Complex64 {
        Complex64::new(
            self.uniform(-half_width, half_width),
            self.uniform(-half_width, half_width),
        )
    }

    /// A nonzero lattice vector `m + n i` with `|m|, |n| <= 1`.
    pub fn lattice_vector(&mut self) -> Complex64 {
        loop {
            let (m, n) = (self.rng.gen_range(-1..=1), self.rng.gen_range(-1..=1));
            if (m, n) != (0, 0) {
                return Complex64::new(f64::from(m), f64::from(n));
            }
        }
    }

    pub fn unit_direction(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.uniform(-std::f64::consts::PI, std::f64::consts::PI))
    }

    /// Cubic coefficient with modulus log-uniform in `[0.05, 20]`.
    pub fn cubic_coefficient(&mut self) -> CubicCoefficient {
        let rho = self.uniform(0.05_f64.ln(), 20.0_f64.ln()).exp();
        let theta = self.uniform(-std::f64::consts::PI, std::f64::consts::PI);
        CubicCoefficient::new(Complex64::from_polar(rho, theta)).expect("modulus is positive")
    }
}

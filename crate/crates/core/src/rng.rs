//! Reference pseudo-random generator for seeded simulations.
//!
//! The recurrence and the normal transform are fixed so that ports in other
//! languages reproduce identical draws:
//!
//! * state update `x <- 6364136223846793005 * x + 1442695040888963407 (mod 2^64)`
//! * uniform from the high 32 bits of the new state, `u = hi / 2^32`
//! * normal by Box–Muller on two consecutive uniforms `u1`, `u2`:
//!   `z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` (the `1 - u1` keeps the log finite).

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const INCREMENT: u64 = 1_442_695_040_888_963_407;
const TWO_POW_32: f64 = 4_294_967_296.0;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(MULTIPLIER)
            .wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform on `[0, 1)` with 32-bit resolution.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 32) as f64 / TWO_POW_32
    }

    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_normal()).collect()
    }
}

/// Gaussian random walk of length `n` starting at zero.
pub fn random_walk(rng: &mut Lcg64, n: usize) -> Vec<f64> {
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += rng.next_normal();
            level
        })
        .collect()
}

/// Gaussian AR(1) `y_t = phi * y_{t-1} + e_t` started at zero.
pub fn ar1(rng: &mut Lcg64, n: usize, phi: f64) -> Vec<f64> {
    let mut y = 0.0;
    (0..n)
        .map(|_| {
            y = phi * y + rng.next_normal();
            y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_states_follow_recurrence() {
        let mut g = Lcg64::new(0);
        assert_eq!(g.next_u64(), INCREMENT);
        assert_eq!(
            g.next_u64(),
            INCREMENT.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT)
        );
    }

    #[test]
    fn normal_moments() {
        let mut g = Lcg64::new(42);
        let z = g.normals(200_000);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
        assert!(z.iter().all(|v| v.is_finite()));
    }
}

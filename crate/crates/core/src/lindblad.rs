//! Continuous-time limit: `ρ̇ = −i[Y, ρ] − C·{(1−Z)/2, ρ}` on the unflipped
//! part of the state.
//!
//! Tracing against `X`, `Z` and `1` gives a closed linear system on
//! [`BlochState`]:
//!
//! ```text
//! ẋ = 2z − c·x
//! ż = −2x + c·(t − z)
//! ṫ = −c·(t − z)
//! ```

use nalgebra::{Matrix3, Vector3};

use crate::blochmap::BlochState;
use crate::charpoly::CharPoly;
use crate::error::{check_finite, Error, Result};
use crate::spectral::EigenTriple;

const BRACKET_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladParams {
    c: f64,
}

impl LindbladParams {
    pub fn new(c: f64) -> Result<Self> {
        check_finite("c", c)?;
        if c < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "damping rate must be >= 0, got {c}"
            )));
        }
        Ok(LindbladParams { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Generator `A` of `d/dt (x, z, t) = A·(x, z, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladGenerator(pub Matrix3<f64>);

pub fn generator_matrix(params: &LindbladParams) -> LindbladGenerator {
    let c = params.c;
    #[rustfmt::skip]
    let a = Matrix3::new(
        -c, 2.0, 0.0,
        -2.0, -c, c,
        0.0, c, -c,
    );
    LindbladGenerator(a)
}

impl LindbladGenerator {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn derivative(&self, state: &BlochState) -> BlochState {
        BlochState::from_vector(&(self.0 * state.to_vector()))
    }

    /// `exp(time·A)` by scaling and squaring.
    pub fn propagator(&self, time: f64) -> Matrix3<f64> {
        (self.0 * time).exp()
    }

    pub fn eigenvalues(&self) -> EigenTriple {
        EigenTriple(CharPoly::of(&self.0).roots())
    }

    pub fn discriminant(&self) -> f64 {
        CharPoly::of(&self.0).discriminant()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub state: BlochState,
}

/// Classical fourth-order Runge–Kutta with fixed step `dt`; the final step is
/// shortened so the last sample lands exactly on `total_time`.
pub fn integrate(
    state0: &BlochState,
    params: &LindbladParams,
    total_time: f64,
    dt: f64,
) -> Result<Vec<Sample>> {
    for (name, v) in [
        ("x", state0.x),
        ("z", state0.z),
        ("t", state0.t),
        ("total_time", total_time),
        ("dt", dt),
    ] {
        check_finite(name, v)?;
    }
    if dt <= 0.0 || total_time < dt {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and total_time >= dt, got dt = {dt}, total_time = {total_time}"
        )));
    }
    let a = generator_matrix(params).0;
    let steps = (total_time / dt - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = state0.to_vector();
    out.push(Sample {
        time: 0.0,
        state: *state0,
    });
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let time = if k == steps {
            total_time
        } else {
            k as f64 * dt
        };
        y = rk4_step(&a, &y, time - t_prev);
        out.push(Sample {
            time,
            state: BlochState::from_vector(&y),
        });
    }
    Ok(out)
}

fn rk4_step(a: &Matrix3<f64>, y: &Vector3<f64>, h: f64) -> Vector3<f64> {
    let k1 = a * y;
    let k2 = a * (y + k1 * (0.5 * h));
    let k3 = a * (y + k2 * (0.5 * h));
    let k4 = a * (y + k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Damping rate at which the generator's eigenvalues stop oscillating: the
/// zero of its cubic discriminant in `(0, c_max]`, by bisection.
pub fn continuous_critical(c_max: f64, tol: f64) -> Result<f64> {
    check_finite("c_max", c_max)?;
    if c_max <= 0.0 || tol <= 0.0 {
        return Err(Error::InvalidArgument("need c_max > 0 and tol > 0".into()));
    }
    let disc = |c: f64| generator_matrix(&LindbladParams { c }).discriminant();
    let step = c_max / BRACKET_SAMPLES as f64;
    let mut lo = step;
    let mut d_lo = disc(lo);
    let mut bracket = None;
    for k in 2..=BRACKET_SAMPLES {
        let hi = step * k as f64;
        let d_hi = disc(hi);
        if d_lo < 0.0 && d_hi > 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        d_lo = d_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoBracket {
        lo: step,
        hi: c_max,
    })?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if disc(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Complex;

    fn params(c: f64) -> LindbladParams {
        LindbladParams::new(c).unwrap()
    }

    /// Trace of `M·L(ρ)` for `L(ρ) = −i[Y,ρ] − c{P,ρ}` with 2×2 complex
    /// matrices, evaluated directly from the master equation.
    fn trace_oracle(state: &BlochState, c: f64) -> Vector3<f64> {
        use nalgebra::Matrix2;
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let x = Matrix2::new(zero, one, one, zero);
        let y = Matrix2::new(zero, -i, i, zero);
        let z = Matrix2::new(one, zero, zero, -one);
        let id = Matrix2::identity();
        let p = (id - z) * Complex::new(0.5, 0.0);
        let re = |v: f64| Complex::new(v, 0.0);
        let rho = (id * re(state.t) + x * re(state.x) + z * re(state.z)) * re(0.5);
        let drho = -(y * rho - rho * y) * i - (p * rho + rho * p) * re(c);
        Vector3::new(
            (x * drho).trace().re,
            (z * drho).trace().re,
            drho.trace().re,
        )
    }

    #[test]
    fn generator_agrees_with_master_equation() {
        for c in [0.0, 0.3, 2.0, 7.5] {
            let g = generator_matrix(&params(c));
            for s in [
                BlochState::new(0.3, -0.2, 0.9),
                BlochState::new(0.0, -1.0, 1.0),
                BlochState::new(0.6, 0.8, 1.0),
            ] {
                let d = g.derivative(&s).to_vector() - trace_oracle(&s, c);
                assert!(d.amax() < 1e-15, "c {c}: {d}");
            }
        }
    }

    #[test]
    fn pure_target_decay_rate() {
        let d = generator_matrix(&params(0.7)).derivative(&BlochState::new(0.0, -1.0, 1.0));
        assert!((d.t + 1.4).abs() < 1e-15);
    }

    #[test]
    fn undamped_generator_is_a_rotation() {
        let a = generator_matrix(&params(0.0)).0;
        assert_eq!(
            a,
            Matrix3::new(0.0, 2.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    /// One discrete step with rotation `2δ` and `sin²φ/2 = c·δ` agrees with
    /// `exp(δ·A)` up to second order in `δ`.
    #[test]
    fn small_step_matches_discrete_map() {
        let c: f64 = 0.8;
        let delta: f64 = 1e-3;
        let phi = (2.0 * c * delta).sqrt().asin();
        let map = crate::blochmap::DampedMap::new(delta, phi).unwrap();
        let exact = generator_matrix(&params(c)).propagator(delta);
        let diff = (map.matrix() - exact).amax();
        assert!(diff < 10.0 * delta * delta, "{diff}");
        assert!(diff > 0.0);
    }

    #[test]
    fn quarter_period_rotation() {
        // ẋ = 2z, ż = −2x: period π; a quarter period maps (x, z) to (z, −x).
        let s0 = BlochState::new(0.6, 0.8, 1.0);
        let out = integrate(&s0, &params(0.0), std::f64::consts::FRAC_PI_4, 1e-3).unwrap();
        let end = out.last().unwrap();
        assert!((end.time - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((end.state.x - 0.8).abs() < 1e-10);
        assert!((end.state.z + 0.6).abs() < 1e-10);
        assert_eq!(end.state.t, 1.0);
    }

    #[test]
    fn strong_damping_decays_trace_monotonically() {
        let out = integrate(&BlochState::new(0.2, 0.1, 1.0), &params(25.0), 5.0, 1e-3).unwrap();
        for w in out.windows(2) {
            assert!(w[1].state.t <= w[0].state.t + 1e-15);
        }
        assert!(out.last().unwrap().state.t < out[0].state.t);
    }

    #[test]
    fn integrator_matches_exponential() {
        let s0 = BlochState::new(0.0199, 0.9998, 1.0);
        for c in [0.5, 2.0, 4.0] {
            let g = generator_matrix(&params(c));
            let out = integrate(&s0, &params(c), 20.0, 1e-3).unwrap();
            let exact = g.propagator(20.0) * s0.to_vector();
            let d = (out.last().unwrap().state.to_vector() - exact).amax();
            assert!(d < 1e-8, "c {c}: {d}");
        }
    }

    #[test]
    fn bad_inputs_rejected() {
        let s = BlochState::new(0.0, 1.0, 1.0);
        assert!(LindbladParams::new(-1.0).is_err());
        assert!(LindbladParams::new(f64::NAN).is_err());
        assert!(integrate(&s, &params(1.0), 1.0, 0.0).is_err());
        assert!(integrate(&s, &params(1.0), 1e-4, 1e-3).is_err());
        assert!(integrate(&s, &params(1.0), f64::INFINITY, 1e-3).is_err());
        assert!(integrate(
            &BlochState::new(f64::NAN, 0.0, 1.0),
            &params(1.0),
            1.0,
            1e-3
        )
        .is_err());
    }

    #[test]
    fn critical_rate() {
        let c_star = continuous_critical(10.0, 1e-12).unwrap();
        assert!((c_star - 2.0).abs() < 1e-8, "{c_star}");
        assert!(generator_matrix(&params(1.0)).eigenvalues().max_imag() > 0.1);
        assert_eq!(generator_matrix(&params(3.0)).eigenvalues().max_imag(), 0.0);
        assert!(matches!(
            continuous_critical(1.5, 1e-10),
            Err(Error::NoBracket { .. })
        ));
    }
}

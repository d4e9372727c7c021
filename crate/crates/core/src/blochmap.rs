//! Reduced two-dimensional dynamics of the damped search.
//!
//! All of the dynamics live in the plane spanned by `|α⟩` (uniform over
//! non-targets) and `|β⟩` (uniform over targets). The unflipped-branch density
//! matrix is real there, so it is carried as the 3-vector
//! `(Tr ρX, Tr ρZ, Tr ρ)`. States are unnormalized: `t` is the probability that
//! the ancilla has not flipped yet.

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{check_finite, check_phi, Error, Result};

/// Database of `n` items of which `m` are targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpace {
    n: u64,
    m: u64,
    theta: f64,
}

impl SearchSpace {
    pub fn new(n: u64, m: u64) -> Result<Self> {
        if n < 2 || m < 1 || m >= n {
            return Err(Error::DegenerateSpace { n, m });
        }
        let theta = 2.0 * (m as f64 / n as f64).sqrt().asin();
        Ok(SearchSpace { n, m, theta })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Rotation angle of one Grover step, `2·arcsin(√(m/n))`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `sin θ` evaluated from the integers, `2√(m(n−m))/n`.
    pub fn sin_theta(&self) -> f64 {
        let (n, m) = (self.n as f64, self.m as f64);
        2.0 * (m * (n - m)).sqrt() / n
    }
}

/// Unnormalized unflipped-branch state `(Tr ρX, Tr ρZ, Tr ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochState {
    pub x: f64,
    pub z: f64,
    pub t: f64,
}

impl BlochState {
    pub const fn new(x: f64, z: f64, t: f64) -> Self {
        BlochState { x, z, t }
    }

    /// The uniform superposition, `(sin θ, cos θ, 1)`.
    pub fn initial(space: &SearchSpace) -> Self {
        let theta = space.theta();
        BlochState::new(theta.sin(), theta.cos(), 1.0)
    }

    /// Population of the target state `|β⟩`, `(t − z)/2`.
    pub fn target_population(&self) -> f64 {
        0.5 * (self.t - self.z)
    }

    /// Checks `0 ≤ t ≤ 1`, `x² + z² ≤ t²(1 + rel_tol)` and `t − z ≥ −abs_tol`.
    pub fn is_physical(&self, rel_tol: f64, abs_tol: f64) -> bool {
        self.t >= -abs_tol
            && self.t <= 1.0 + abs_tol
            && self.x * self.x + self.z * self.z <= self.t * self.t * (1.0 + rel_tol) + abs_tol
            && self.t - self.z >= -abs_tol
    }

    pub fn max_abs_diff(&self, other: &BlochState) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.z - other.z).abs())
            .max((self.t - other.t).abs())
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.z, self.t)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        BlochState::new(v[0], v[1], v[2])
    }
}

/// One damped iteration (controlled Grover step followed by an ancilla
/// measurement) as a linear map on [`BlochState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedMap {
    matrix: Matrix3<f64>,
    theta: f64,
    phi: f64,
}

impl DampedMap {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_finite("theta", theta)?;
        check_phi(phi)?;
        let c = phi.cos();
        let c2 = c * c;
        let keep = 0.5 * (1.0 + c2);
        let leak = 0.5 * (1.0 - c2);
        let (s2t, c2t) = (2.0 * theta).sin_cos();
        #[rustfmt::skip]
        let matrix = Matrix3::new(
            c2t * c, s2t * keep, s2t * leak,
            -s2t * c, c2t * keep, c2t * leak,
            0.0, leak, keep,
        );
        Ok(DampedMap { matrix, theta, phi })
    }

    /// The undamped Grover map: a rotation by `2θ` in the x–z block.
    pub fn undamped(theta: f64) -> Self {
        let (s2t, c2t) = (2.0 * theta).sin_cos();
        #[rustfmt::skip]
        let matrix = Matrix3::new(
            c2t, s2t, 0.0,
            -s2t, c2t, 0.0,
            0.0, 0.0, 1.0,
        );
        DampedMap {
            matrix,
            theta,
            phi: 0.0,
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn apply(&self, state: &BlochState) -> BlochState {
        BlochState::from_vector(&(self.matrix * state.to_vector()))
    }
}

/// One damped iteration evaluated on the 2×2 density matrix directly.
///
/// The unflipped branch is `K ρ Kᵀ` with `K = G·diag(1, cos φ)` in the
/// `(|α⟩, |β⟩)` basis and `G = exp(−iθY)`; the flipped branch has Kraus
/// operator `diag(0, sin φ)`. Returns the new state and the absolute flip
/// probability. This path does not touch [`DampedMap`] and serves as its
/// cross-check.
pub fn kraus_step(state: &BlochState, theta: f64, phi: f64) -> Result<(BlochState, f64)> {
    check_finite("theta", theta)?;
    check_phi(phi)?;
    let rho = Matrix2::new(
        0.5 * (state.t + state.z),
        0.5 * state.x,
        0.5 * state.x,
        0.5 * (state.t - state.z),
    );
    let (s, c) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let grover = Matrix2::new(c, -s, s, c);
    let keep = grover * Matrix2::new(1.0, 0.0, 0.0, cp);
    let flip = Matrix2::new(0.0, 0.0, 0.0, sp);

    let next = keep * rho * keep.transpose();
    let flipped = flip * rho * flip.transpose();
    let out = BlochState::new(
        next[(0, 1)] + next[(1, 0)],
        next[(0, 0)] - next[(1, 1)],
        next[(0, 0)] + next[(1, 1)],
    );
    Ok((out, flipped.trace()))
}

/// Damping angles supplied to [`trajectory`]: one value for every step, or a
/// per-step sequence.
#[derive(Debug, Clone, Copy)]
pub enum Phis<'a> {
    Constant(f64),
    PerStep(&'a [f64]),
}

impl From<f64> for Phis<'_> {
    fn from(phi: f64) -> Self {
        Phis::Constant(phi)
    }
}

impl<'a> From<&'a [f64]> for Phis<'a> {
    fn from(phis: &'a [f64]) -> Self {
        match phis {
            [phi] => Phis::Constant(*phi),
            _ => Phis::PerStep(phis),
        }
    }
}

/// States after `0..=steps` iterations starting from the uniform superposition.
///
/// The unflipped branch `KρKᵀ` of a pure state stays pure, so the trajectory is
/// carried as the two real amplitudes on `(|α⟩, |β⟩)` and converted at each
/// step. Consecutive states agree with [`DampedMap::apply`] to rounding, while
/// `x² + z² = t²` holds to a few ulps of `t²` however far `t` has decayed;
/// iterating the 3×3 matrix loses that relative accuracy once the trace has
/// dropped by many orders of magnitude.
pub fn trajectory<'a>(
    space: &SearchSpace,
    phis: impl Into<Phis<'a>>,
    steps: usize,
) -> Result<Vec<BlochState>> {
    let phis = phis.into();
    let per_step = |k: usize| match phis {
        Phis::Constant(phi) => phi,
        Phis::PerStep(phis) => phis[k],
    };
    match phis {
        Phis::Constant(phi) => check_phi(phi)?,
        Phis::PerStep(phis) => {
            if phis.len() < steps {
                return Err(Error::InvalidArgument(format!(
                    "{} damping angles supplied for {steps} steps",
                    phis.len()
                )));
            }
            for &phi in &phis[..steps] {
                check_phi(phi)?;
            }
        }
    }

    let (s, c) = space.theta().sin_cos();
    let (n, m) = (space.n() as f64, space.m() as f64);
    let (mut a, mut b) = (((n - m) / n).sqrt(), (m / n).sqrt());
    let mut out = Vec::with_capacity(steps + 1);
    out.push(BlochState::initial(space));
    for k in 0..steps {
        let damped = b * per_step(k).cos();
        (a, b) = (c * a - s * damped, s * a + c * damped);
        out.push(BlochState::new(2.0 * a * b, a * a - b * b, a * a + b * b));
    }
    Ok(out)
}

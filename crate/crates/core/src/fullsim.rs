//! Dense state-vector simulation of the damped search on the item register
//! plus one ancilla spin.
//!
//! Amplitudes are stored at index `2·s + a` for item `s` (zero-based) and
//! ancilla `a` (`0` = ↓, `1` = ↑). Items are not decomposed into qubits. The
//! oracle is a phase flip on the target items and the diffusion is
//! `2|ψ₀⟩⟨ψ₀| − 1` on the item register.

use nalgebra::Complex;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::blochmap::BlochState;
use crate::error::{check_finite, Error, Result};

pub type C64 = Complex<f64>;

/// Largest register the simulator accepts.
pub const MAX_ITEMS: usize = 4096;
/// Out-of-span residual above which [`FullState::reduced_bloch`] fails.
pub const SPAN_TOL: f64 = 1e-10;

const DOWN: usize = 0;
const UP: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    amps: Vec<C64>,
    is_target: Vec<bool>,
    targets: Vec<usize>,
}

fn idx(item: usize, ancilla: usize) -> usize {
    2 * item + ancilla
}

impl FullState {
    /// Uniform superposition over `n` items with the ancilla down.
    pub fn initial(n: usize, targets: &[usize]) -> Result<Self> {
        let mut state = FullState::zeroed(n, targets)?;
        let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        for s in 0..n {
            state.amps[idx(s, DOWN)] = a;
        }
        Ok(state)
    }

    /// Uniform initial state with `m` targets placed by a seeded generator.
    pub fn initial_random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m >= n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= m < n, got n = {n}, m = {m}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut targets = sample(&mut rng, n, m).into_vec();
        targets.sort_unstable();
        FullState::initial(n, &targets)
    }

    /// Arbitrary amplitudes (length `2n`, layout as in the module docs).
    pub fn from_amplitudes(n: usize, targets: &[usize], amps: Vec<C64>) -> Result<Self> {
        let mut state = FullState::zeroed(n, targets)?;
        if amps.len() != 2 * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                2 * n,
                amps.len()
            )));
        }
        state.amps = amps;
        Ok(state)
    }

    fn zeroed(n: usize, targets: &[usize]) -> Result<Self> {
        if n > MAX_ITEMS {
            return Err(Error::InvalidArgument(format!(
                "at most {MAX_ITEMS} items are simulated, got {n}"
            )));
        }
        let mut is_target = vec![false; n];
        for &s in targets {
            if s >= n {
                return Err(Error::InvalidArgument(format!("target {s} outside 0..{n}")));
            }
            if is_target[s] {
                return Err(Error::InvalidArgument(format!("target {s} listed twice")));
            }
            is_target[s] = true;
        }
        if targets.is_empty() || targets.len() >= n {
            return Err(Error::InvalidArgument(format!(
                "need between 1 and n - 1 targets, got {} of {n}",
                targets.len()
            )));
        }
        let mut sorted = targets.to_vec();
        sorted.sort_unstable();
        Ok(FullState {
            amps: vec![C64::new(0.0, 0.0); 2 * n],
            is_target,
            targets: sorted,
        })
    }

    pub fn n(&self) -> usize {
        self.is_target.len()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Phase flip on every target item, both ancilla branches.
    pub fn apply_oracle(&mut self) {
        for &s in &self.targets {
            self.amps[idx(s, DOWN)] = -self.amps[idx(s, DOWN)];
            self.amps[idx(s, UP)] = -self.amps[idx(s, UP)];
        }
    }

    fn oracle_on(&mut self, ancilla: usize) {
        for &s in &self.targets {
            self.amps[idx(s, ancilla)] = -self.amps[idx(s, ancilla)];
        }
    }

    fn diffusion_on(&mut self, ancilla: usize) {
        let n = self.n();
        let mean = (0..n).map(|s| self.amps[idx(s, ancilla)]).sum::<C64>() / n as f64;
        for s in 0..n {
            let a = &mut self.amps[idx(s, ancilla)];
            *a = mean * 2.0 - *a;
        }
    }

    /// Inversion about the mean on the item register, both ancilla branches.
    pub fn apply_diffusion(&mut self) {
        self.diffusion_on(DOWN);
        self.diffusion_on(UP);
    }

    /// Ancilla rotation `exp(−i·angle·S_y)` on the listed items; with `(↑, ↓)`
    /// ordering the matrix is `[[cos, −sin], [sin, cos]]`.
    fn rotate_ancilla(&mut self, items: impl Iterator<Item = usize>, angle: f64) {
        let (s, c) = angle.sin_cos();
        for item in items {
            let up = self.amps[idx(item, UP)];
            let down = self.amps[idx(item, DOWN)];
            self.amps[idx(item, UP)] = up * c - down * s;
            self.amps[idx(item, DOWN)] = up * s + down * c;
        }
    }

    /// `U = [G·(1−S_z)/2 + (1+S_z)/2]·[e^{−iφS_y}·(1−Z)/2 + (1+Z)/2]`:
    /// rotate the ancilla on target items, then a Grover step on the
    /// unflipped branch.
    pub fn apply_u(&mut self, phi: f64) {
        let targets = self.targets.clone();
        self.rotate_ancilla(targets.into_iter(), phi);
        self.oracle_on(DOWN);
        self.diffusion_on(DOWN);
    }

    /// The one-query form
    /// `[E(1−S_z)/2 + (1+S_z)/2]·e^{iφS_y/2}·[Z(1−S_z)/2 + (1+S_z)/2]·e^{−iφS_y/2}`.
    pub fn apply_u_factored(&mut self, phi: f64) {
        let n = self.n();
        self.rotate_ancilla(0..n, 0.5 * phi);
        self.oracle_on(DOWN);
        self.rotate_ancilla(0..n, -0.5 * phi);
        self.diffusion_on(DOWN);
    }

    /// Projects the ancilla onto ↓ without renormalizing. Returns the flip
    /// probability relative to the incoming norm.
    pub fn measure_ancilla(&mut self) -> f64 {
        let total = self.norm_sqr();
        let mut up = 0.0;
        for s in 0..self.n() {
            up += self.amps[idx(s, UP)].norm_sqr();
            self.amps[idx(s, UP)] = C64::new(0.0, 0.0);
        }
        if total > 0.0 {
            up / total
        } else {
            0.0
        }
    }

    /// Overlaps of the ↓ branch with `|α⟩` and `|β⟩`, plus the norm of the
    /// part outside their span.
    fn down_overlaps(&self) -> (C64, C64, f64) {
        let n = self.n();
        let m = self.targets.len();
        let (wa, wb) = (1.0 / ((n - m) as f64).sqrt(), 1.0 / (m as f64).sqrt());
        let mut alpha = C64::new(0.0, 0.0);
        let mut beta = C64::new(0.0, 0.0);
        for s in 0..n {
            if self.is_target[s] {
                beta += self.amps[idx(s, DOWN)] * wb;
            } else {
                alpha += self.amps[idx(s, DOWN)] * wa;
            }
        }
        let residual: f64 = (0..n)
            .map(|s| {
                let proj = if self.is_target[s] {
                    beta * wb
                } else {
                    alpha * wa
                };
                (self.amps[idx(s, DOWN)] - proj).norm_sqr()
            })
            .sum();
        (alpha, beta, residual.sqrt())
    }

    /// Norm of the ↓ branch outside `span{|α⟩, |β⟩}`.
    pub fn span_residual(&self) -> f64 {
        self.down_overlaps().2
    }

    /// `(Tr ρX, Tr ρZ, Tr ρ)` of the ↓ branch in the `{|α⟩, |β⟩}` basis.
    pub fn reduced_bloch(&self) -> Result<BlochState> {
        let (alpha, beta, residual) = self.down_overlaps();
        if residual > SPAN_TOL {
            return Err(Error::Invariant(format!(
                "down branch leaves span{{|alpha>, |beta>}} (residual {residual:e})"
            )));
        }
        let (pa, pb) = (alpha.norm_sqr(), beta.norm_sqr());
        Ok(BlochState::new(
            2.0 * (alpha.conj() * beta).re,
            pa - pb,
            pa + pb,
        ))
    }

    /// `Tr ρY` of the ↓ branch.
    pub fn y_component(&self) -> f64 {
        let (alpha, beta, _) = self.down_overlaps();
        2.0 * (alpha.conj() * beta).im
    }

    /// True when the ↑ branch has no weight on non-target items.
    pub fn verify_flip_certainty(&self) -> bool {
        let stray: f64 = (0..self.n())
            .filter(|&s| !self.is_target[s])
            .map(|s| self.amps[idx(s, UP)].norm_sqr())
            .sum();
        stray.sqrt() <= 1e-12
    }
}

/// Reduced trajectory of `steps` rounds of (apply U, measure), together with
/// the per-step flip probabilities relative to the incoming norm.
pub fn simulate(
    state: &mut FullState,
    phis: &[f64],
    steps: usize,
) -> Result<(Vec<BlochState>, Vec<f64>)> {
    if phis.is_empty() || (phis.len() != 1 && phis.len() < steps) {
        return Err(Error::InvalidArgument(format!(
            "{} damping angles supplied for {steps} steps",
            phis.len()
        )));
    }
    let mut traj = Vec::with_capacity(steps + 1);
    let mut flips = Vec::with_capacity(steps);
    traj.push(state.reduced_bloch()?);
    for k in 0..steps {
        let phi = if phis.len() == 1 { phis[0] } else { phis[k] };
        check_finite("phi", phi)?;
        state.apply_u(phi);
        flips.push(state.measure_ancilla());
        traj.push(state.reduced_bloch()?);
    }
    Ok((traj, flips))
}

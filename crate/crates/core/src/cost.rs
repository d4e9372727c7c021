//! Expected oracle-query costs of the undamped and damped searches.
//!
//! Accounting: every application of the damped iteration is one oracle call.
//! An ancilla flip ends the search with a target in hand at no further cost.
//! A fixed-length attempt of `R` iterations that ends unflipped is followed by
//! one verification query, and the whole attempt is repeated from scratch if
//! that query fails.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::blochmap::{BlochState, DampedMap, SearchSpace};
use crate::error::{check_phi, Error, Result};

/// Hard cap on the restart length scanned by the fixed-length models.
pub const MAX_RESTART_LENGTH: u64 = 1_000_000;
/// Hard cap on the number of scheduled iterations.
pub const MAX_SCHEDULE_ITERATIONS: u64 = 10_000_000;
/// Default truncation threshold on the survival probability.
pub const DEFAULT_EPS: f64 = 1e-12;

/// How the probability mass of one attempt splits up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakdown {
    /// Probability the ancilla flipped before the attempt ended, `Σ q_r`.
    pub flip_mass: f64,
    /// Probability of reaching the end of the attempt unflipped.
    pub survival: f64,
    /// Probability the verification query succeeds given no flip; `None` when
    /// no verification is made.
    pub verification_success: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostResult {
    pub expected_calls: f64,
    /// Optimal restart length; `None` for the scheduled search.
    pub best_r: Option<u64>,
    pub breakdown: Breakdown,
    /// Upper estimate of the truncated tail, kept out of `expected_calls`.
    pub tail: f64,
    /// Truncation horizon of the scheduled search.
    pub horizon: Option<u64>,
}

/// Probability the undamped search finds a target after `r` iterations,
/// `sin²((2r+1)θ/2)`.
pub fn grover_success_prob(theta: f64, r: u64) -> f64 {
    ((2 * r + 1) as f64 * theta / 2.0).sin().powi(2)
}

/// Tracks the running minimum of `E(R)` and when the scan may stop.
struct RestartScan {
    window: u64,
    stale: u64,
    best: Option<(f64, u64)>,
}

impl RestartScan {
    fn new(theta: f64) -> Self {
        RestartScan {
            window: 3 * (PI / theta).ceil() as u64,
            stale: 0,
            best: None,
        }
    }

    fn offer(&mut self, cost: f64, r: u64) {
        match self.best {
            Some((b, _)) if cost >= b => self.stale += 1,
            _ if !cost.is_finite() => self.stale += 1,
            _ => {
                self.best = Some((cost, r));
                self.stale = 0;
            }
        }
    }

    fn done(&self) -> bool {
        self.stale >= self.window
    }
}

/// Undamped search with known `m`: minimizes `(R+1)/p(R)` over `R ≥ 1`.
pub fn undamped_expected_calls(space: &SearchSpace) -> CostResult {
    let theta = space.theta();
    let mut scan = RestartScan::new(theta);
    for r in 1..=MAX_RESTART_LENGTH {
        let p = grover_success_prob(theta, r);
        if p > 0.0 {
            scan.offer((r + 1) as f64 / p, r);
        } else {
            scan.offer(f64::INFINITY, r);
        }
        if scan.done() {
            break;
        }
    }
    let (expected_calls, r) = scan
        .best
        .expect("p(R) > 0 for some R within the scan window");
    CostResult {
        expected_calls,
        best_r: Some(r),
        breakdown: Breakdown {
            flip_mass: 0.0,
            survival: 1.0,
            verification_success: Some(grover_success_prob(theta, r)),
        },
        tail: 0.0,
        horizon: None,
    }
}

/// Restart strategy at fixed damping: minimizes over `R`
/// `E(R) = [Σ_{r≤R} r·q_r + (R+1)·t_R] / [1 − (t_R + z_R)/2]`.
pub fn damped_expected_calls_fixed(space: &SearchSpace, phi: f64) -> Result<CostResult> {
    check_phi(phi)?;
    let theta = space.theta();
    let map = DampedMap::new(theta, phi)?;
    let mut scan = RestartScan::new(theta);
    let mut state = BlochState::initial(space);
    let mut weighted_flips = 0.0;
    let mut best_state = state;

    for r in 1..=MAX_RESTART_LENGTH {
        let next = map.apply(&state);
        weighted_flips += r as f64 * (state.t - next.t);
        state = next;
        let success = 1.0 - 0.5 * (state.t + state.z);
        if success <= 0.0 {
            if phi > 0.0 {
                return Err(Error::Invariant(format!(
                    "restart probability {} >= 1 at R = {r}",
                    1.0 - success
                )));
            }
            scan.offer(f64::INFINITY, r);
        } else {
            let before = scan.best;
            scan.offer((weighted_flips + (r + 1) as f64 * state.t) / success, r);
            if scan.best != before {
                best_state = state;
            }
        }
        if scan.done() {
            break;
        }
    }
    let (expected_calls, r) = scan
        .best
        .ok_or_else(|| Error::Invariant("no restart length with nonzero success".into()))?;
    let verification_success = if best_state.t > 0.0 {
        Some(best_state.target_population() / best_state.t)
    } else {
        None
    };
    Ok(CostResult {
        expected_calls,
        best_r: Some(r),
        breakdown: Breakdown {
            flip_mass: 1.0 - best_state.t,
            survival: best_state.t,
            verification_success,
        },
        tail: 0.0,
        horizon: None,
    })
}

/// Damping angle of the `n`-th scheduled iteration (`n ≥ 1`):
/// `cos φ_n = (1 − sin(π/2n))/(1 + sin(π/2n))`, so `φ_1 = π/2`.
///
/// Uses `tan²(φ/2) = sin(π/2n)`, which is exact for the same angle.
pub fn schedule_phi(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("schedule index starts at 1".into()));
    }
    if n == 1 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let s = (PI / (2.0 * n as f64)).sin();
    Ok(2.0 * s.sqrt().atan())
}

/// Rule assigning a damping angle to each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingSchedule {
    /// Decreasing from `π/2`, see [`schedule_phi`].
    Decreasing,
    Constant(f64),
}

impl DampingSchedule {
    pub fn phi(&self, n: u64) -> Result<f64> {
        match *self {
            DampingSchedule::Decreasing => schedule_phi(n),
            DampingSchedule::Constant(phi) => {
                check_phi(phi)?;
                Ok(phi)
            }
        }
    }
}

/// Expected calls when iterating until the ancilla flips, `Σ n·q_n`,
/// truncated once the survival probability drops to `eps`.
pub fn schedule_expected_calls(
    space: &SearchSpace,
    schedule: DampingSchedule,
    eps: f64,
) -> Result<CostResult> {
    if !(eps > 0.0 && eps <= 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1e-6], got {eps}"
        )));
    }
    let theta = space.theta();
    let mut state = BlochState::initial(space);
    let mut expected = 0.0;
    let mut n = 0;
    while state.t > eps {
        if n >= MAX_SCHEDULE_ITERATIONS {
            return Err(Error::NotConverged(MAX_SCHEDULE_ITERATIONS));
        }
        n += 1;
        let next = DampedMap::new(theta, schedule.phi(n)?)?.apply(&state);
        expected += n as f64 * (state.t - next.t);
        state = next;
    }
    Ok(CostResult {
        expected_calls: expected,
        best_r: None,
        breakdown: Breakdown {
            flip_mass: 1.0 - state.t,
            survival: state.t,
            verification_success: None,
        },
        tail: n as f64 * state.t,
        horizon: Some(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRow {
    pub n: u64,
    pub phi: f64,
    pub expected_calls: f64,
    pub best_r: u64,
}

/// Fixed-damping cost over every `(n, φ)` pair, rows in input order
/// (`n` outer, `φ` inner).
pub fn cost_surface(n_values: &[u64], phi_grid: &[f64], m: u64) -> Result<Vec<SurfaceRow>> {
    let pairs: Vec<(u64, f64)> = n_values
        .iter()
        .flat_map(|&n| phi_grid.iter().map(move |&phi| (n, phi)))
        .collect();
    pairs
        .par_iter()
        .map(|&(n, phi)| {
            let space = SearchSpace::new(n, m)?;
            let cost = damped_expected_calls_fixed(&space, phi)?;
            Ok(SurfaceRow {
                n,
                phi,
                expected_calls: cost.expected_calls,
                best_r: cost
                    .best_r
                    .expect("fixed-damping cost always has a restart length"),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub m: u64,
    pub scheduled: f64,
    pub baseline: f64,
    pub ratio: f64,
}

/// Scheduled-damping cost relative to the undamped search with known `m`.
pub fn ratio_curve(n: u64, m_values: &[u64], eps: f64) -> Result<Vec<RatioRow>> {
    m_values
        .par_iter()
        .map(|&m| {
            let space = SearchSpace::new(n, m)?;
            let scheduled =
                schedule_expected_calls(&space, DampingSchedule::Decreasing, eps)?.expected_calls;
            let baseline = undamped_expected_calls(&space).expected_calls;
            Ok(RatioRow {
                m,
                scheduled,
                baseline,
                ratio: scheduled / baseline,
            })
        })
        .collect()
}

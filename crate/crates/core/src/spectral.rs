//! Eigenvalues of the damped map and the critical damping angle.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Complex, Matrix3};
use rayon::prelude::*;

use crate::blochmap::DampedMap;
use crate::charpoly::CharPoly;
use crate::error::{check_finite, check_phi, Error, Result};

/// Number of coarse samples used to bracket the discriminant sign change.
const BRACKET_SAMPLES: usize = 512;
/// Bisection stops once the bracket is narrower than this (radians).
const BISECT_TOL: f64 = 1e-12;

/// The three eigenvalues of a real 3×3 map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTriple(pub [Complex<f64>; 3]);

impl EigenTriple {
    pub fn values(&self) -> &[Complex<f64>; 3] {
        &self.0
    }

    pub fn product(&self) -> Complex<f64> {
        self.0[0] * self.0[1] * self.0[2]
    }

    pub fn sum(&self) -> Complex<f64> {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|l| l.im.abs()).fold(0.0, f64::max)
    }

    /// Every non-real eigenvalue has its conjugate in the triple.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        self.0
            .iter()
            .all(|l| l.im.abs() <= tol || self.0.iter().any(|k| (k - l.conj()).norm() <= tol))
    }
}

pub fn char_poly(map: &DampedMap) -> CharPoly {
    CharPoly::of(map.matrix())
}

pub fn eigenvalues_of(matrix: &Matrix3<f64>) -> EigenTriple {
    EigenTriple(CharPoly::of(matrix).roots())
}

pub fn eigenvalues(map: &DampedMap) -> EigenTriple {
    eigenvalues_of(map.matrix())
}

fn check_theta(theta: f64) -> Result<()> {
    check_finite("theta", theta)?;
    if theta <= 0.0 || theta >= std::f64::consts::PI {
        return Err(Error::InvalidArgument(format!(
            "theta must lie in (0, pi), got {theta}"
        )));
    }
    Ok(())
}

/// Critical damping from the closed form `cos φ* = (1 − sin θ)/(1 + sin θ)`.
///
/// Evaluated as `φ* = 2·atan(√sin θ)`, the same angle without the `acos`
/// cancellation near `cos φ* → 1`.
pub fn critical_phi_closed(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(2.0 * theta.sin().sqrt().atan())
}

/// Critical damping located numerically: the `φ` where the discriminant of the
/// damped map's characteristic cubic changes sign from negative (complex pair)
/// to positive (three real eigenvalues).
///
/// The map depends on `θ` only through `cos²θ`, so the search is valid on the
/// whole of `(0, π)` except near `θ = π/2`, where the crossing moves onto the
/// boundary `φ = π/2` and the discriminant is pure rounding noise.
pub fn critical_phi_numeric(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if theta.cos().abs() < 1e-8 {
        return Err(Error::NoBracket {
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    let disc =
        |phi: f64| -> Result<f64> { Ok(char_poly(&DampedMap::new(theta, phi)?).discriminant()) };
    let step = FRAC_PI_2 / BRACKET_SAMPLES as f64;
    let mut lo = step;
    let mut d_lo = disc(lo)?;
    let mut bracket = None;
    for k in 2..BRACKET_SAMPLES {
        let hi = step * k as f64;
        let d_hi = disc(hi)?;
        if d_lo < 0.0 && d_hi > 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        d_lo = d_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoBracket {
        lo: step,
        hi: FRAC_PI_2 - step,
    })?;
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if disc(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of an eigenvalue sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRow {
    pub phi: f64,
    pub values: [Complex<f64>; 3],
}

/// Eigenvalues along an ascending `φ` grid, columns paired so each traces a
/// continuous curve.
///
/// Pairing picks, at every grid point, the permutation of the new eigenvalues
/// closest (summed squared distance) to the previous row.
pub fn eigencurve(theta: f64, phi_grid: &[f64]) -> Result<Vec<EigenRow>> {
    check_finite("theta", theta)?;
    if phi_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "phi grid must be sorted ascending".into(),
        ));
    }
    for &phi in phi_grid {
        check_phi(phi)?;
    }
    let raw: Vec<[Complex<f64>; 3]> = phi_grid
        .par_iter()
        .map(|&phi| DampedMap::new(theta, phi).map(|m| eigenvalues(&m).0))
        .collect::<Result<_>>()?;

    let mut rows: Vec<EigenRow> = Vec::with_capacity(raw.len());
    for (&phi, values) in phi_grid.iter().zip(raw) {
        let values = match rows.last() {
            Some(prev) => closest_permutation(&prev.values, values),
            None => values,
        };
        rows.push(EigenRow { phi, values });
    }
    Ok(rows)
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn closest_permutation(prev: &[Complex<f64>; 3], next: [Complex<f64>; 3]) -> [Complex<f64>; 3] {
    let cost =
        |perm: &[usize; 3]| -> f64 { (0..3).map(|i| (next[perm[i]] - prev[i]).norm_sqr()).sum() };
    let best = PERMUTATIONS
        .iter()
        .min_by(|a, b| cost(a).total_cmp(&cost(b)))
        .expect("non-empty permutation table");
    [next[best[0]], next[best[1]], next[best[2]]]
}

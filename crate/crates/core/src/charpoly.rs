//! Characteristic cubic of a real 3×3 matrix and its roots.
//!
//! The invariants are computed twice: plainly (trace, sum of principal
//! minors, determinant) for reporting, and from the trace-shifted matrix
//! `A − (tr A/3)·1` for the depressed cubic `s³ + p·s + q`. The shifted form
//! keeps `p` and `q` accurate near a triple root, where the plain
//! coefficients cancel catastrophically.

use nalgebra::{Complex, Matrix3};

/// A root pair whose squared separation (the discriminant of its quadratic
/// factor) is below this fraction of the squared scale is snapped to its mean.
const SNAP_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly {
    /// `λ³ − trace·λ² + minor_sum·λ − det`.
    pub trace: f64,
    pub minor_sum: f64,
    pub det: f64,
    /// Depressed cubic `s³ + p·s + q` with `λ = s + trace/3`.
    pub p: f64,
    pub q: f64,
    /// `‖A‖²_F / 3`, the size of the entries `p` and `q` were computed from.
    pub entry_scale_sq: f64,
}

fn minor_sum(a: &Matrix3<f64>) -> f64 {
    a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)]
}

impl CharPoly {
    pub fn of(a: &Matrix3<f64>) -> Self {
        let trace = a.trace();
        let shifted = a - Matrix3::identity() * (trace / 3.0);
        CharPoly {
            trace,
            minor_sum: minor_sum(a),
            det: a.determinant(),
            p: minor_sum(&shifted),
            q: -shifted.determinant(),
            entry_scale_sq: a.norm_squared() / 3.0,
        }
    }

    /// Cubic discriminant `−4p³ − 27q²`: negative for a complex pair, positive
    /// for three distinct real roots.
    pub fn discriminant(&self) -> f64 {
        -4.0 * self.p.powi(3) - 27.0 * self.q * self.q
    }

    /// Squared scale against which root separations are judged: the roots'
    /// own magnitude or the matrix entries, whichever is larger.
    fn scale_sq(&self) -> f64 {
        let shift = self.trace / 3.0;
        let roots = shift * shift + self.p.abs() + self.q.abs().powf(2.0 / 3.0);
        roots.max(self.entry_scale_sq)
    }

    pub fn eval(&self, lambda: Complex<f64>) -> Complex<f64> {
        ((lambda - self.trace) * lambda + self.minor_sum) * lambda - self.det
    }

    /// `|charpoly(λ)|` divided by the magnitude of its individual terms.
    pub fn relative_residual(&self, lambda: Complex<f64>) -> f64 {
        let r = lambda.norm();
        let scale =
            r.powi(3) + self.trace.abs() * r * r + self.minor_sum.abs() * r + self.det.abs();
        if scale == 0.0 {
            0.0
        } else {
            self.eval(lambda).norm() / scale
        }
    }

    /// Roots ordered by descending real part, then descending imaginary part.
    pub fn roots(&self) -> [Complex<f64>; 3] {
        let (p, q) = (self.p, self.q);
        let shift = self.trace / 3.0;
        let scale2 = self.scale_sq();

        let mut roots = if self.discriminant() > 0.0 {
            // three real roots
            let r = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
            let base = arg.acos() / 3.0;
            let mut out = [0.0; 3];
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = polish(
                    r * (base - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos(),
                    p,
                    q,
                );
            }
            out.sort_by(|a, b| b.total_cmp(a));
            // the closest pair is adjacent once sorted
            let i = if out[0] - out[1] <= out[1] - out[2] {
                0
            } else {
                1
            };
            let gap = out[i] - out[i + 1];
            if gap * gap <= SNAP_REL * scale2 {
                // depressed roots sum to zero and the isolated one is accurate
                let mid = -0.5 * out[2 - 2 * i];
                out[i] = mid;
                out[i + 1] = mid;
            }
            out.map(|s| Complex::new(s, 0.0))
        } else {
            let half_q = 0.5 * q;
            let d = (half_q * half_q + p.powi(3) / 27.0).max(0.0).sqrt();
            let a = -(half_q.abs() + d).cbrt().copysign(q);
            let b = if a == 0.0 { 0.0 } else { -p / (3.0 * a) };
            let s1 = polish(a + b, p, q);
            // deflate: s² + s1·s + (p + s1²)
            let quad_disc = -3.0 * s1 * s1 - 4.0 * p;
            let mid = -0.5 * s1;
            let pair = if quad_disc.abs() <= SNAP_REL * scale2 {
                [Complex::new(mid, 0.0), Complex::new(mid, 0.0)]
            } else if quad_disc < 0.0 {
                let im = 0.5 * (-quad_disc).sqrt();
                [Complex::new(mid, im), Complex::new(mid, -im)]
            } else {
                let h = 0.5 * quad_disc.sqrt();
                [
                    Complex::new(polish(mid + h, p, q), 0.0),
                    Complex::new(polish(mid - h, p, q), 0.0),
                ]
            };
            [Complex::new(s1, 0.0), pair[0], pair[1]]
        };
        for r in roots.iter_mut() {
            r.re += shift;
        }
        roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        roots
    }
}

/// Newton steps on `s³ + p·s + q`, kept only while they reduce the residual.
fn polish(mut s: f64, p: f64, q: f64) -> f64 {
    let f = |s: f64| (s * s + p) * s + q;
    let mut fs = f(s);
    for _ in 0..3 {
        let d = 3.0 * s * s + p;
        if d == 0.0 || fs == 0.0 {
            break;
        }
        let next = s - fs / d;
        let fnext = f(next);
        if fnext.abs() >= fs.abs() {
            break;
        }
        s = next;
        fs = fnext;
    }
    s
}

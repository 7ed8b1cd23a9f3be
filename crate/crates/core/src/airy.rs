//! The Airy kernel `A` normalised by `Â(ξ) = e^{iξ³}`, so that
//!
//! ```text
//! A(x) = ∫ e^{ixξ} e^{iξ³} dξ = (2π / 3^{1/3}) Ai(x / 3^{1/3}),
//! ```
//!
//! with `Ai` the classical Airy function, and the constant `C_A = A(0)`.
//!
//! `Ai(y)` is evaluated from its Maclaurin series on a central interval, from
//! `K_{1/3}` (Steed's continued fraction) to the right of it and from the
//! oscillatory asymptotic expansion to the left.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `Ai(0)` and `-Ai'(0)`.
const AI0: f64 = 0.355_028_053_887_817_239;
const AIP0: f64 = 0.258_819_403_792_806_798;
/// Right end of the Maclaurin range.
const POSITIVE_SWITCH: f64 = 2.5;

/// Evaluator for `Ai` and `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryEvaluator {
    /// Series range on the negative axis: `Ai(y)` uses the Maclaurin series for
    /// `-switchover_radius <= y`.
    pub switchover_radius: f64,
    /// Relative size at which the asymptotic series is truncated.
    pub target_precision: f64,
}

impl Default for AiryEvaluator {
    fn default() -> Self {
        Self {
            switchover_radius: 7.0,
            target_precision: 1e-13,
        }
    }
}

impl AiryEvaluator {
    pub fn new(switchover_radius: f64, target_precision: f64) -> Result<Self> {
        if !(4.0..=9.0).contains(&switchover_radius) {
            return Err(Error::InvalidArgument(format!(
                "switchover radius {switchover_radius} outside [4, 9]"
            )));
        }
        if !(target_precision > 0.0 && target_precision < 1e-6) {
            return Err(Error::InvalidArgument(format!(
                "target precision {target_precision} outside (0, 1e-6)"
            )));
        }
        Ok(Self {
            switchover_radius,
            target_precision,
        })
    }

    /// Classical `Ai(y)`.
    pub fn ai(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(Error::NonFinite { what: "Airy argument", index: 0 });
        }
        Ok(if y > POSITIVE_SWITCH {
            if y > 100.0 {
                0.0
            } else {
                ai_bessel(y)
            }
        } else if y >= -self.switchover_radius {
            ai_series(y)
        } else {
            self.ai_oscillatory(-y)
        })
    }

    /// `A(x) = (2π / 3^{1/3}) Ai(x / 3^{1/3})`.
    pub fn airy_a(&self, x: f64) -> Result<f64> {
        let c = 3f64.cbrt();
        Ok(2.0 * PI / c * self.ai(x / c)?)
    }

    /// `Ai(-z)` for large `z`, truncated at the requested precision or at the
    /// smallest term.
    fn ai_oscillatory(&self, z: f64) -> f64 {
        let zeta = 2.0 / 3.0 * z * z.sqrt();
        let mut even = 0.0;
        let mut odd = 0.0;
        let mut u = 1.0;
        let mut power = 1.0;
        let mut last = f64::INFINITY;
        for k in 0..200usize {
            if k > 0 {
                let kf = k as f64;
                u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
                power /= zeta;
            }
            let term = u * power;
            if term > last {
                break;
            }
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                even += sign * term;
            } else {
                odd += sign * term;
            }
            if term < self.target_precision {
                break;
            }
            last = term;
        }
        let phase = zeta - PI / 4.0;
        (phase.cos() * even + phase.sin() * odd) / (PI.sqrt() * z.powf(0.25))
    }
}

fn ai_series(y: f64) -> f64 {
    let y3 = y * y * y;
    let mut f = 1.0;
    let mut g = y;
    let mut t = 1.0;
    let mut u = y;
    for k in 1..200usize {
        let kf = 3.0 * k as f64;
        t *= y3 / ((kf - 1.0) * kf);
        u *= y3 / (kf * (kf + 1.0));
        f += t;
        g += u;
        if t.abs() <= 1e-18 * f.abs().max(1.0) && u.abs() <= 1e-18 * g.abs().max(1.0) {
            break;
        }
    }
    AI0 * f - AIP0 * g
}

/// `Ai(y) = (1/π) √(y/3) K_{1/3}(ζ)`, `ζ = (2/3) y^{3/2} >= 2`.
fn ai_bessel(y: f64) -> f64 {
    let zeta = 2.0 / 3.0 * y * y.sqrt();
    (y / 3.0).sqrt() * bessel_k_third(zeta) / PI
}

/// `K_{1/3}(x)` for `x >= 2` by Steed's method for the second continued
/// fraction.
fn bessel_k_third(x: f64) -> f64 {
    let mu2 = 1.0 / 9.0;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut c = a1;
    let mut q = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000usize {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let _ = h;
    (PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

/// `A(x)` with the default evaluator.
pub fn airy_a(x: f64) -> Result<f64> {
    AiryEvaluator::default().airy_a(x)
}

/// `C_A = A(0) = 2π / (3 Γ(2/3))`, computed once.
pub fn constant_ca() -> f64 {
    static CA: OnceLock<f64> = OnceLock::new();
    *CA.get_or_init(|| airy_a(0.0).expect("A(0) is finite"))
}

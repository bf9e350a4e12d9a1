//! Bath spectral functions and zero-temperature half-Fourier rates.
//!
//! Two reservoir types: a broadband radiative bath coupled through
//! `sigma_x/2` with flat spectral function `G(w) = 2 kappa / pi`, and an
//! Ohmic dephasing bath coupled through `sigma_z/2` with
//! `G(w) = alpha w exp(-w / omega_c)`. Reservoirs are in vacuum, so G
//! vanishes for non-positive frequency and only emission processes carry
//! weight.

use crate::floquet::CouplingOp;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// One reservoir with its coupling operator and spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathSpec {
    /// Broadband radiative reservoir, `G^x(w) = 2 kappa / pi` for `w > 0`.
    Radiative { kappa: f64 },
    /// Ohmic dephasing reservoir, `G^z(w) = alpha w exp(-w/omega_c)`.
    Ohmic { alpha: f64, omega_c: f64 },
}

impl BathSpec {
    pub fn radiative(kappa: f64) -> Self {
        BathSpec::Radiative { kappa }
    }

    pub fn ohmic(alpha: f64, omega_c: f64) -> Self {
        BathSpec::Ohmic { alpha, omega_c }
    }

    /// Operator through which this bath couples to the TLS.
    pub fn coupling_operator(&self) -> CouplingOp {
        match self {
            BathSpec::Radiative { .. } => CouplingOp::X,
            BathSpec::Ohmic { .. } => CouplingOp::Z,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        match *self {
            BathSpec::Radiative { kappa } if kappa < 0.0 || !kappa.is_finite() => Err(
                crate::Error::InvalidConfig(format!("radiative kappa must be >= 0, got {kappa}")),
            ),
            BathSpec::Ohmic { alpha, omega_c } if alpha < 0.0 || !(omega_c > 0.0) => {
                Err(crate::Error::InvalidConfig(format!(
                    "ohmic bath needs alpha >= 0 and omega_c > 0, got alpha={alpha}, omega_c={omega_c}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Spectral function `G(w)`; zero for `w <= 0` (vacuum reservoirs
    /// cannot be absorbed from).
    pub fn spectral_function(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match *self {
            BathSpec::Radiative { kappa } => 2.0 * kappa / std::f64::consts::PI,
            BathSpec::Ohmic { alpha, omega_c } => alpha * omega * (-omega / omega_c).exp(),
        }
    }

    /// Half-Fourier transform of the vacuum correlation function at gap
    /// `delta`: real part `pi G(-delta)`, imaginary part `-R(-delta)`.
    /// The principal-value part `R` defaults to zero; pass
    /// `lamb_shift = true` to evaluate it by quadrature.
    pub fn half_fourier_rate(&self, delta: f64, lamb_shift: bool) -> C64 {
        let re = std::f64::consts::PI * self.spectral_function(-delta);
        let im = if lamb_shift {
            -self.principal_value(-delta)
        } else {
            0.0
        };
        C64::new(re, im)
    }

    /// Principal-value integral `R(x) = P \int_0^inf G(v) / (v - x) dv`.
    ///
    /// Convergent only for the Ohmic bath; the broadband form diverges
    /// logarithmically and its shift is taken as absorbed into the bare
    /// splitting, so the radiative contribution is zero.
    pub fn principal_value(&self, x: f64) -> f64 {
        let (alpha, omega_c) = match *self {
            BathSpec::Radiative { .. } => return 0.0,
            BathSpec::Ohmic { alpha, omega_c } => (alpha, omega_c),
        };
        if alpha == 0.0 {
            return 0.0;
        }
        let g = |v: f64| alpha * v * (-v / omega_c).exp();
        let upper = 40.0 * omega_c;
        if x <= 0.0 {
            return simpson(|v| g(v) / (v - x), 0.0, upper, 8000);
        }
        // Symmetric window around the pole: the [x-d, x+d] part reduces to
        // a regular integrand (G(x+s) - G(x-s)) / s.
        let d = x.min(omega_c).min(upper - x).max(1e-12);
        let mut total = simpson(
            |s| {
                if s.abs() < 1e-14 {
                    // lim_{s->0} (G(x+s) - G(x-s)) / s = 2 G'(x)
                    2.0 * alpha * (1.0 - x / omega_c) * (-x / omega_c).exp()
                } else {
                    (g(x + s) - g(x - s)) / s
                }
            },
            0.0,
            d,
            4000,
        );
        if x - d > 0.0 {
            total += simpson(|v| g(v) / (v - x), 0.0, x - d, 4000);
        }
        if x + d < upper {
            total += simpson(|v| g(v) / (v - x), x + d, upper, 8000);
        }
        total
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = if panels % 2 == 0 { panels } else { panels + 1 };
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

//! Periodic driving signals for the two-level system.
//!
//! The drive enters the Hamiltonian as `H_drive(t) = f(t) * sigma_x` with
//! `f(t) = sum_m a_m cos(m * omega_l * t + phi_m)`. All constructors absorb
//! the conventional factor 1/2, i.e. `harmonic(A, wl)` stores a single
//! component of amplitude `A/2` so that the sigma_x coefficient is
//! `(A/2) cos(wl t)`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Waveform of a drive component as supplied by the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Waveform {
    Cosine,
    Sine,
}

/// One Fourier component of the drive, in canonical cosine form:
/// `amplitude * cos(harmonic * omega_l * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveComponent {
    pub harmonic: usize,
    pub amplitude: f64,
    pub phase: f64,
}

/// Fourier description of the periodic sigma_x drive plus the bare TLS
/// splitting `omega0`.
///
/// Immutable after construction; safe to share across parallel workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingSpec {
    pub omega0: f64,
    pub omega_l: f64,
    components: Vec<DriveComponent>,
}

impl DrivingSpec {
    /// Build a spec from raw components (waveforms converted to canonical
    /// cosine form, same-harmonic components merged by phasor addition).
    pub fn new(
        omega0: f64,
        omega_l: f64,
        raw: impl IntoIterator<Item = (usize, f64, f64, Waveform)>,
    ) -> Result<Self> {
        if !(omega_l > 0.0) {
            return Err(Error::NonPositiveFrequency(omega_l));
        }
        let mut phasors: Vec<(usize, f64, f64)> = Vec::new(); // (m, re, im)
        for (m, a, phi, wf) in raw {
            if m == 0 {
                return Err(Error::InvalidDriving(
                    "harmonic index must be >= 1".into(),
                ));
            }
            if !a.is_finite() || !phi.is_finite() {
                return Err(Error::InvalidDriving(
                    "amplitude and phase must be finite".into(),
                ));
            }
            // a cos(x + p): phasor a e^{ip}; sine shifts the phase by -pi/2.
            let p = match wf {
                Waveform::Cosine => phi,
                Waveform::Sine => phi - std::f64::consts::FRAC_PI_2,
            };
            match phasors.iter_mut().find(|(mm, _, _)| *mm == m) {
                Some((_, re, im)) => {
                    *re += a * p.cos();
                    *im += a * p.sin();
                }
                None => phasors.push((m, a * p.cos(), a * p.sin())),
            }
        }
        phasors.sort_by_key(|&(m, _, _)| m);
        let components = phasors
            .into_iter()
            .filter_map(|(m, re, im)| {
                let amp = re.hypot(im);
                (amp > 0.0).then(|| DriveComponent {
                    harmonic: m,
                    amplitude: amp,
                    phase: im.atan2(re),
                })
            })
            .collect();
        Ok(Self {
            omega0,
            omega_l,
            components,
        })
    }

    /// Monochromatic drive: sigma_x coefficient `(A/2) cos(omega_l t)`.
    pub fn harmonic(amplitude: f64, omega_l: f64) -> Result<Self> {
        Self::new(
            1.0,
            omega_l,
            [(1, amplitude / 2.0, 0.0, Waveform::Cosine)],
        )
    }

    /// Two-color drive: `(A/2) [cos(omega_l t) + r cos(2 omega_l t + phi)]`.
    pub fn biharmonic(amplitude: f64, r: f64, phi: f64, omega_l: f64) -> Result<Self> {
        Self::new(
            1.0,
            omega_l,
            [
                (1, amplitude / 2.0, 0.0, Waveform::Cosine),
                (2, r * amplitude / 2.0, phi, Waveform::Cosine),
            ],
        )
    }

    /// Truncated square-wave drive:
    /// `(A/2) sum_{l=1}^{N} sin((2l-1) omega_l t) / (2l-1)`.
    pub fn square_wave_like(amplitude: f64, omega_l: f64, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::InvalidDriving(
                "square-wave driving needs at least one term".into(),
            ));
        }
        Self::new(
            1.0,
            omega_l,
            (1..=n_terms).map(|l| {
                let m = 2 * l - 1;
                (m, amplitude / 2.0 / m as f64, 0.0, Waveform::Sine)
            }),
        )
    }

    /// sigma_x coefficient at time `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.amplitude * (c.harmonic as f64 * self.omega_l * t + c.phase).cos())
            .sum()
    }

    /// Canonical cosine components, sorted by harmonic index.
    pub fn components(&self) -> &[DriveComponent] {
        &self.components
    }

    /// Drive period `2 pi / omega_l`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_l
    }

    /// Highest harmonic index present (0 for a free TLS).
    pub fn max_harmonic(&self) -> usize {
        self.components.iter().map(|c| c.harmonic).max().unwrap_or(0)
    }

    /// Whether any component carries a nonzero amplitude.
    pub fn is_driven(&self) -> bool {
        !self.components.is_empty()
    }

    /// True if the drive is a single first-harmonic cosine (phase 0), the
    /// only shape the CHRW and RWA treatments cover. Returns the nominal
    /// amplitude `A` (twice the stored component amplitude).
    pub fn as_pure_harmonic(&self) -> Option<f64> {
        match self.components.as_slice() {
            [] => Some(0.0),
            [c] if c.harmonic == 1 && c.phase.abs() < 1e-12 => Some(2.0 * c.amplitude),
            _ => None,
        }
    }

    /// Default Sambe truncation for this drive.
    pub fn default_n_max(&self) -> usize {
        let m_max = self.max_harmonic().max(1);
        let a_eff: f64 = 2.0 * self.components.iter().map(|c| c.amplitude.abs()).sum::<f64>();
        4 * (m_max as f64 * (1.0 + a_eff / self.omega_l)).ceil() as usize + 16
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_drive() {
        let d = DrivingSpec::harmonic(0.0, 1.0).unwrap();
        for t in [0.0, 0.3, 10.0] {
            assert_eq!(d.evaluate(t), 0.0);
        }
        assert!(!d.is_driven());
        assert_eq!(d.as_pure_harmonic(), Some(0.0));
    }

    #[test]
    fn harmonic_values() {
        let d = DrivingSpec::harmonic(0.3, 1.0).unwrap();
        assert_abs_diff_eq!(d.evaluate(0.0), 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(d.evaluate(std::f64::consts::PI), -0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(d.evaluate(std::f64::consts::TAU), 0.15, epsilon = 1e-15);
    }

    #[test]
    fn biharmonic_values() {
        let d = DrivingSpec::biharmonic(0.5, 1.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(d.evaluate(0.0), 0.5, epsilon = 1e-15);
        let d = DrivingSpec::biharmonic(0.5, 1.0, std::f64::consts::PI, 1.0).unwrap();
        assert_abs_diff_eq!(d.evaluate(0.0), 0.0, epsilon = 1e-15);
        let d = DrivingSpec::biharmonic(0.5, 1.0, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert_abs_diff_eq!(d.evaluate(0.0), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn biharmonic_r_zero_equals_harmonic() {
        let a = DrivingSpec::biharmonic(0.5, 0.0, 1.2, 1.0).unwrap();
        let b = DrivingSpec::harmonic(0.5, 1.0).unwrap();
        assert_eq!(a.components(), b.components());
    }

    #[test]
    fn square_wave_leibniz_partial_sum() {
        // Direct-summation oracle at t = pi / (2 omega_l).
        let n = 100;
        let d = DrivingSpec::square_wave_like(1.0, 1.0, n).unwrap();
        let oracle: f64 = (1..=n)
            .map(|l| {
                let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
                sign / (2 * l - 1) as f64
            })
            .sum::<f64>()
            / 2.0;
        assert_abs_diff_eq!(
            d.evaluate(std::f64::consts::FRAC_PI_2),
            oracle,
            epsilon = 1e-12
        );
        // t = 0: sum of sines vanishes.
        assert_abs_diff_eq!(d.evaluate(0.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn square_wave_single_term_is_sine() {
        let d = DrivingSpec::square_wave_like(1.0, 2.0, 1).unwrap();
        for t in [0.1, 0.5, 2.0] {
            assert_abs_diff_eq!(d.evaluate(t), 0.5 * (2.0 * t).sin(), epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DrivingSpec::harmonic(0.1, 0.0).is_err());
        assert!(DrivingSpec::harmonic(0.1, -1.0).is_err());
        assert!(DrivingSpec::square_wave_like(1.0, 1.0, 0).is_err());
        assert!(DrivingSpec::new(1.0, 1.0, [(0, 1.0, 0.0, Waveform::Cosine)]).is_err());
    }

    #[test]
    fn merges_duplicate_harmonics() {
        let d = DrivingSpec::new(
            1.0,
            1.0,
            [
                (1, 0.3, 0.0, Waveform::Cosine),
                (1, 0.4, 0.0, Waveform::Cosine),
            ],
        )
        .unwrap();
        assert_eq!(d.components().len(), 1);
        assert_abs_diff_eq!(d.components()[0].amplitude, 0.7, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn periodicity(a in 0.0..2.0f64, r in 0.0..2.0f64, phi in 0.0..6.28f64,
                       wl in 0.1..3.0f64, t in -20.0..20.0f64) {
            let d = DrivingSpec::biharmonic(a, r, phi, wl).unwrap();
            let v0 = d.evaluate(t);
            let v1 = d.evaluate(t + d.period());
            prop_assert!((v0 - v1).abs() <= 1e-12 * (1.0 + v0.abs()));
        }

        #[test]
        fn sine_cosine_equivalence(a in 0.01..2.0f64, wl in 0.1..3.0f64, t in -5.0..5.0f64) {
            let s = DrivingSpec::new(1.0, wl, [(1, a, 0.0, Waveform::Sine)]).unwrap();
            let c = DrivingSpec::new(
                1.0, wl,
                [(1, a, -std::f64::consts::FRAC_PI_2, Waveform::Cosine)],
            ).unwrap();
            prop_assert!((s.evaluate(t) - c.evaluate(t)).abs() < 1e-13);
        }
    }
}

//! Fluorescence spectrum assembly.
//!
//! The steady-state first-order correlation function decomposes into a
//! catalog of emission lines: coherent delta spikes at the drive harmonics
//! `n omega_l`, a central Lorentzian of width `gamma_rel` at each harmonic,
//! and red/blue sidebands of width `gamma_deph` displaced by the
//! Floquet-state gap. Line weights combine `|X^+_{alpha beta, n}|^2` with
//! the steady populations. The overall proportionality constant is fixed
//! to one; all comparisons are shape and ratio comparisons.

use crate::floquet::{Mode, TransitionTable};
use crate::rates::RateSet;
use serde::Serialize;

/// Weights below this are dropped from the catalog.
pub const WEIGHT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    CoherentDelta,
    IncoherentCentral,
    IncoherentRed,
    IncoherentBlue,
}

impl LineKind {
    pub fn tag(self) -> &'static str {
        match self {
            LineKind::CoherentDelta => "coherent_delta",
            LineKind::IncoherentCentral => "incoherent_central",
            LineKind::IncoherentRed => "incoherent_red",
            LineKind::IncoherentBlue => "incoherent_blue",
        }
    }
}

/// One emission line. For Lorentzians the sampled contribution is
/// `weight * hwhm / (hwhm^2 + (omega - center)^2)`; coherent deltas carry
/// their integrated weight (including the factor pi) and are never
/// rasterized onto the grid.
#[derive(Debug, Clone, Copy)]
pub struct SpectralLine {
    pub kind: LineKind,
    pub center: f64,
    pub weight: f64,
    pub hwhm: f64,
    /// Transition provenance `(alpha, beta, n)`.
    pub alpha: Mode,
    pub beta: Mode,
    pub n: i64,
    /// Lines centered at non-positive frequency are kept but flagged;
    /// they contribute negligibly to the physical spectrum.
    pub nonpositive_center: bool,
}

/// Line catalog plus (optionally) a sampled intensity grid.
#[derive(Debug, Clone, Default)]
pub struct Spectrum {
    pub lines: Vec<SpectralLine>,
    pub grid: Vec<(f64, f64)>,
}

impl Spectrum {
    pub fn coherent_weight(&self) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.kind == LineKind::CoherentDelta)
            .map(|l| l.weight)
            .sum()
    }

    pub fn incoherent_weight(&self) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.kind != LineKind::CoherentDelta)
            .map(|l| l.weight)
            .sum()
    }
}

/// Assemble the emission-line catalog from the `sigma_+` transition table
/// and the rate set.
///
/// `n_window` restricts the harmonic index; `None` keeps every line above
/// the weight floor. Sidebands are classified red/blue by their actual
/// position relative to `n omega_l` (the labeling convention can make the
/// gap `omega_pm` negative, which swaps the formula roles).
pub fn assemble(
    xplus: &TransitionTable,
    rates: &RateSet,
    omega_l: f64,
    n_window: Option<std::ops::RangeInclusive<i64>>,
) -> Vec<SpectralLine> {
    let h = xplus.n_half as i64;
    let window = n_window.unwrap_or(-h..=h);
    let (rho_pp, rho_mm) = rates.steady_populations();
    let pop_diff = rho_pp - rho_mm;
    let mut lines = Vec::new();
    let mut push = |kind: LineKind,
                    center: f64,
                    weight: f64,
                    hwhm: f64,
                    alpha: Mode,
                    beta: Mode,
                    n: i64| {
        if weight.abs() > WEIGHT_FLOOR {
            lines.push(SpectralLine {
                kind,
                center,
                weight,
                hwhm,
                alpha,
                beta,
                n,
                nonpositive_center: center <= 0.0,
            });
        }
    };
    for n in window {
        let harmonic = n as f64 * omega_l;
        let x_pp = xplus.get(Mode::Plus, Mode::Plus, n).norm_sqr();
        push(
            LineKind::CoherentDelta,
            harmonic,
            std::f64::consts::PI * x_pp * pop_diff * pop_diff,
            0.0,
            Mode::Plus,
            Mode::Plus,
            n,
        );
        push(
            LineKind::IncoherentCentral,
            harmonic,
            x_pp * (1.0 - pop_diff * pop_diff),
            rates.gamma_rel,
            Mode::Plus,
            Mode::Plus,
            n,
        );
        // |u_{-,n}> -> |u_+>: position n w_l - omega_pm.
        let w_mp = xplus.get(Mode::Minus, Mode::Plus, n).norm_sqr() * rho_mm;
        let c_mp = harmonic - rates.omega_pm;
        // |u_{+,n}> -> |u_->: position n w_l + omega_pm.
        let w_pm = xplus.get(Mode::Plus, Mode::Minus, n).norm_sqr() * rho_pp;
        let c_pm = harmonic + rates.omega_pm;
        let (kind_mp, kind_pm) = if rates.omega_pm >= 0.0 {
            (LineKind::IncoherentRed, LineKind::IncoherentBlue)
        } else {
            (LineKind::IncoherentBlue, LineKind::IncoherentRed)
        };
        push(kind_mp, c_mp, w_mp, rates.gamma_deph, Mode::Minus, Mode::Plus, n);
        push(kind_pm, c_pm, w_pm, rates.gamma_deph, Mode::Plus, Mode::Minus, n);
    }
    lines
}

/// Sample the incoherent part on a uniform grid; deltas stay in the
/// catalog only.
pub fn sample(lines: &[SpectralLine], omega_min: f64, omega_max: f64, points: usize) -> Vec<(f64, f64)> {
    assert!(points >= 2, "need at least two sample points");
    let step = (omega_max - omega_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let w = omega_min + i as f64 * step;
            let mut intensity = 0.0;
            for line in lines {
                if line.kind == LineKind::CoherentDelta {
                    continue;
                }
                let d = w - line.center;
                intensity += line.weight * line.hwhm / (line.hwhm * line.hwhm + d * d);
            }
            (w, intensity)
        })
        .collect()
}

/// Weights of the red (lower) and blue (upper) sidebands of the order-`n`
/// triplet.
pub fn sideband_weights(lines: &[SpectralLine], n: i64) -> (f64, f64) {
    let mut red = 0.0;
    let mut blue = 0.0;
    for line in lines.iter().filter(|l| l.n == n) {
        match line.kind {
            LineKind::IncoherentRed => red += line.weight,
            LineKind::IncoherentBlue => blue += line.weight,
            _ => {}
        }
    }
    (red, blue)
}

/// First-order correlation at zero delay:
/// `sum_n |X^+_{++,n}|^2 + |X^+_{-+,n}|^2 rho_-- + |X^+_{+-,n}|^2 rho_++`.
///
/// Equals (coherent weight)/pi + (incoherent weight) of the assembled
/// catalog; the equality is the sum-rule regression check.
pub fn g1_at_zero(xplus: &TransitionTable, rates: &RateSet) -> f64 {
    let h = xplus.n_half as i64;
    let (rho_pp, rho_mm) = rates.steady_populations();
    (-h..=h)
        .map(|n| {
            xplus.get(Mode::Plus, Mode::Plus, n).norm_sqr()
                + xplus.get(Mode::Minus, Mode::Plus, n).norm_sqr() * rho_mm
                + xplus.get(Mode::Plus, Mode::Minus, n).norm_sqr() * rho_pp
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathSpec;
    use crate::chrw::{chrw_solution, rwa_solution};
    use crate::driving::DrivingSpec;
    use crate::floquet;
    use crate::rates::{compute_rates, RateOptions, SolvedSystem};
    use approx::assert_abs_diff_eq;

    const KAPPA: f64 = 0.02;

    fn mollow() -> (SolvedSystem, RateSet) {
        let (_, sys) = rwa_solution(0.2, 1.0, 1.0).unwrap();
        let rates = compute_rates(&sys, &[BathSpec::radiative(KAPPA)], RateOptions::default())
            .unwrap();
        (sys, rates)
    }

    #[test]
    fn standard_mollow_triplet() {
        let (sys, rates) = mollow();
        let lines = assemble(&sys.plus, &rates, 1.0, None);
        // Exactly three incoherent lines, no coherent weight.
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.kind != LineKind::CoherentDelta));
        let central = lines
            .iter()
            .find(|l| l.kind == LineKind::IncoherentCentral)
            .unwrap();
        assert_abs_diff_eq!(central.center, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(central.hwhm, KAPPA / 2.0, epsilon = 1e-15);
        // Peak numerator weight * hwhm = kappa / 8.
        assert_abs_diff_eq!(central.weight * central.hwhm, KAPPA / 8.0, epsilon = 1e-15);
        let (red, blue) = sideband_weights(&lines, 1);
        assert_abs_diff_eq!(red, blue, epsilon = 1e-15);
        let side = lines
            .iter()
            .find(|l| l.kind == LineKind::IncoherentRed)
            .unwrap();
        assert_abs_diff_eq!(side.hwhm, 3.0 * KAPPA / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(side.weight * side.hwhm, 3.0 * KAPPA / 32.0, epsilon = 1e-15);
        assert_abs_diff_eq!(side.center, 1.0 - 0.1, epsilon = 1e-13);
    }

    #[test]
    fn balanced_populations_kill_coherent_lines() {
        let (sys, rates) = mollow();
        assert_abs_diff_eq!(rates.rho_pp_ss, 0.5, epsilon = 1e-14);
        let lines = assemble(&sys.plus, &rates, 1.0, None);
        assert_eq!(lines.iter().filter(|l| l.kind == LineKind::CoherentDelta).count(), 0);
    }

    #[test]
    fn lorentzian_peak_value() {
        let line = SpectralLine {
            kind: LineKind::IncoherentCentral,
            center: 1.0,
            weight: 0.25,
            hwhm: 0.01,
            alpha: Mode::Plus,
            beta: Mode::Plus,
            n: 1,
            nonpositive_center: false,
        };
        let grid = sample(&[line], 1.0, 1.5, 2);
        assert_abs_diff_eq!(grid[0].1, 0.25 / 0.01, epsilon = 1e-12);
        assert_eq!(sample(&[], 0.0, 1.0, 5).iter().map(|p| p.1).sum::<f64>(), 0.0);
    }

    #[test]
    fn two_disjoint_lorentzians_oracle() {
        let mk = |center: f64, weight: f64, hwhm: f64| SpectralLine {
            kind: LineKind::IncoherentCentral,
            center,
            weight,
            hwhm,
            alpha: Mode::Plus,
            beta: Mode::Plus,
            n: 0,
            nonpositive_center: false,
        };
        let lines = [mk(1.0, 0.3, 0.005), mk(50.0, 0.1, 0.005)];
        // Closed-form: at the bigger peak the far line adds
        // w g / (g^2 + 49^2).
        let expected_max = 0.3 / 0.005 + 0.1 * 0.005 / (0.005f64.powi(2) + 49.0f64.powi(2));
        let grid = sample(&lines, 0.0, 60.0, 60_001);
        let max = grid.iter().map(|p| p.1).fold(0.0f64, f64::max);
        assert!((max - expected_max).abs() < 1e-6 * expected_max.max(1.0));
    }

    #[test]
    fn grid_matches_line_sum_and_is_nonnegative() {
        let (sys, rates) = mollow();
        let lines = assemble(&sys.plus, &rates, 1.0, None);
        let grid = sample(&lines, 0.5, 1.5, 501);
        for &(w, i) in &grid {
            assert!(i >= 0.0);
            let direct: f64 = lines
                .iter()
                .filter(|l| l.kind != LineKind::CoherentDelta)
                .map(|l| l.weight * l.hwhm / (l.hwhm * l.hwhm + (w - l.center).powi(2)))
                .sum();
            assert_abs_diff_eq!(i, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn sum_rule() {
        // coherent/pi + incoherent = g1(0) for a detuned case with
        // nonzero coherent weight.
        let (_, sys) = rwa_solution(0.3, 1.0, 0.9).unwrap();
        let rates = compute_rates(&sys, &[BathSpec::radiative(KAPPA)], RateOptions::default())
            .unwrap();
        let lines = assemble(&sys.plus, &rates, 0.9, None);
        let spectrum = Spectrum {
            lines: lines.clone(),
            grid: Vec::new(),
        };
        assert!(spectrum.coherent_weight() > 0.0);
        let total = spectrum.coherent_weight() / std::f64::consts::PI + spectrum.incoherent_weight();
        assert_abs_diff_eq!(total, g1_at_zero(&sys.plus, &rates), epsilon = 1e-12);
    }

    #[test]
    fn g1_zero_drive_limit() {
        // Undriven TLS: dominated by the single bare-emission term with
        // the ground state filled.
        let (_, sys) = rwa_solution(1e-9, 1.0, 0.8).unwrap();
        let rates = compute_rates(&sys, &[BathSpec::radiative(KAPPA)], RateOptions::default())
            .unwrap();
        let g1 = g1_at_zero(&sys.plus, &rates);
        let dominant = sys.plus.get(Mode::Minus, Mode::Plus, 1).norm_sqr()
            * rates.steady_populations().1;
        assert_abs_diff_eq!(g1, dominant, epsilon = 1e-9);
    }

    #[test]
    fn harmonic_lines_sit_at_odd_harmonics() {
        let spec = DrivingSpec::harmonic(0.5, 1.0).unwrap();
        let sys = SolvedSystem::solve_sambe(&spec, None).unwrap();
        let rates = compute_rates(&sys, &[BathSpec::radiative(KAPPA)], RateOptions::default())
            .unwrap();
        let lines = assemble(&sys.plus, &rates, 1.0, None);
        for line in &lines {
            assert!(line.n % 2 != 0, "line at even n={} kind {:?}", line.n, line.kind);
        }
    }

    #[test]
    fn label_swap_leaves_sampled_spectrum_invariant() {
        let spec = DrivingSpec::biharmonic(0.5, 1.0, 0.3, 1.0).unwrap();
        let sol = floquet::solve_default(&spec).unwrap();
        let sys = SolvedSystem::from_floquet(&sol);
        let swapped_sol = sol.label_swapped();
        let sys_swapped = SolvedSystem::from_floquet(&swapped_sol);
        let baths = [BathSpec::radiative(KAPPA)];
        let (r1, r2) = (
            compute_rates(&sys, &baths, RateOptions::default()).unwrap(),
            compute_rates(&sys_swapped, &baths, RateOptions::default()).unwrap(),
        );
        let l1 = assemble(&sys.plus, &r1, 1.0, None);
        let l2 = assemble(&sys_swapped.plus, &r2, 1.0, None);
        let g1 = sample(&l1, 0.0, 4.0, 801);
        let g2 = sample(&l2, 0.0, 4.0, 801);
        for (a, b) in g1.iter().zip(&g2) {
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn mode_shift_leaves_sampled_spectrum_invariant() {
        let spec = DrivingSpec::biharmonic(0.4, 0.8, 0.0, 1.0).unwrap();
        let sol = floquet::solve_default(&spec).unwrap();
        let baths = [BathSpec::radiative(KAPPA)];
        let base = {
            let sys = SolvedSystem::from_floquet(&sol);
            let r = compute_rates(&sys, &baths, RateOptions::default()).unwrap();
            sample(&assemble(&sys.plus, &r, 1.0, None), 0.0, 4.0, 801)
        };
        for k in [-1i64, 1] {
            for mode in [Mode::Plus, Mode::Minus] {
                let shifted = sol.shifted_copy(mode, k);
                let sys = SolvedSystem::from_floquet(&shifted);
                let r = compute_rates(&sys, &baths, RateOptions::default()).unwrap();
                let grid = sample(&assemble(&sys.plus, &r, 1.0, None), 0.0, 4.0, 801);
                for (a, b) in base.iter().zip(&grid) {
                    assert!(
                        (a.1 - b.1).abs() <= 1e-9 * (1.0 + a.1.abs()),
                        "shift k={k} mode {mode:?}: {} vs {}",
                        a.1,
                        b.1
                    );
                }
            }
        }
    }

    #[test]
    fn provenance_maps_to_nonzero_entries() {
        let (_, sys) = chrw_solution(0.5, 1.0, 1.0).unwrap();
        let rates = compute_rates(&sys, &[BathSpec::radiative(KAPPA)], RateOptions::default())
            .unwrap();
        for line in assemble(&sys.plus, &rates, 1.0, None) {
            assert!(sys.plus.get(line.alpha, line.beta, line.n).norm() > 0.0);
        }
    }

    #[test]
    fn sideband_weights_match_formula_quantities() {
        let (_, sys) = chrw_solution(0.5, 1.0, 1.0).unwrap();
        let rates = compute_rates(&sys, &[BathSpec::radiative(KAPPA)], RateOptions::default())
            .unwrap();
        let lines = assemble(&sys.plus, &rates, 1.0, None);
        let (red, blue) = sideband_weights(&lines, 1);
        let (rp, rm) = rates.steady_populations();
        // At resonance the gap is positive: red <-> (-,+), blue <-> (+,-).
        assert!(rates.omega_pm > 0.0);
        assert_abs_diff_eq!(
            red,
            sys.plus.get(Mode::Minus, Mode::Plus, 1).norm_sqr() * rm,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            blue,
            sys.plus.get(Mode::Plus, Mode::Minus, 1).norm_sqr() * rp,
            epsilon = 1e-15
        );
        // Driving-induced asymmetry: blue above red.
        assert!(blue > red);
    }
}

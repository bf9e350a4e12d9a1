//! Secular master-equation rates and steady Floquet-state populations.
//!
//! With the Floquet modes and their transition tables in hand, the secular
//! equations of motion decouple populations from coherences. Everything
//! downstream needs four numbers per parameter point: the upward pumping
//! rate `W_{-+}`, the relaxation rate `gamma_rel = W_{-+} + W_{+-}`, the
//! coherence decay rate `gamma_deph`, and the (optional) bath-induced gap
//! shift. Zero-temperature reservoirs make every rate a one-sided sum of
//! `|X_{alpha beta, n}|^2 G(Delta_{alpha beta, n})` terms over emission
//! channels `Delta > 0`.

use crate::bath::BathSpec;
use crate::chrw;
use crate::floquet::{fold_zone, CouplingOp, FloquetSolution, Mode, TransitionTable};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// Quasienergies plus the transition tables the rate and spectrum layers
/// consume. Both the numeric and the analytic solvers produce this.
#[derive(Debug, Clone)]
pub struct SolvedSystem {
    pub omega_l: f64,
    /// Gauge quasienergies consistent with the table indexing.
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub x: TransitionTable,
    pub z: TransitionTable,
    pub plus: TransitionTable,
}

impl SolvedSystem {
    pub fn new(
        omega_l: f64,
        eps_plus: f64,
        eps_minus: f64,
        x: TransitionTable,
        z: TransitionTable,
        plus: TransitionTable,
    ) -> Self {
        Self {
            omega_l,
            eps_plus,
            eps_minus,
            x,
            z,
            plus,
        }
    }

    pub fn from_floquet(sol: &FloquetSolution) -> Self {
        Self {
            omega_l: sol.omega_l,
            eps_plus: sol.eps(Mode::Plus),
            eps_minus: sol.eps(Mode::Minus),
            x: sol.transition_coefficients(CouplingOp::X),
            z: sol.transition_coefficients(CouplingOp::Z),
            plus: sol.transition_coefficients(CouplingOp::Plus),
        }
    }

    /// Numeric Sambe solution for a drive.
    pub fn solve_sambe(spec: &crate::driving::DrivingSpec, n_max: Option<usize>) -> Result<Self> {
        let n = n_max.unwrap_or_else(|| spec.default_n_max());
        Ok(Self::from_floquet(&crate::floquet::solve(spec, n)?))
    }

    /// Analytic solution for a pure harmonic drive.
    pub fn solve_chrw(spec: &crate::driving::DrivingSpec) -> Result<Self> {
        let a = spec.as_pure_harmonic().ok_or_else(|| {
            Error::InvalidConfig("chrw solver requires a single-harmonic cosine drive".into())
        })?;
        Ok(chrw::chrw_solution(a, spec.omega0, spec.omega_l)?.1)
    }

    /// Rotating-wave solution for a pure harmonic drive.
    pub fn solve_rwa(spec: &crate::driving::DrivingSpec) -> Result<Self> {
        let a = spec.as_pure_harmonic().ok_or_else(|| {
            Error::InvalidConfig("rwa solver requires a single-harmonic cosine drive".into())
        })?;
        Ok(chrw::rwa_solution(a, spec.omega0, spec.omega_l)?.1)
    }

    /// Table for a bath's coupling operator.
    pub fn table(&self, op: CouplingOp) -> &TransitionTable {
        match op {
            CouplingOp::X => &self.x,
            CouplingOp::Z => &self.z,
            CouplingOp::Plus => &self.plus,
            CouplingOp::Minus => &self.plus, // magnitudes only via duality
        }
    }

    /// Gap `eps_+ - eps_-` in the table gauge.
    pub fn gap(&self) -> f64 {
        self.eps_plus - self.eps_minus
    }

    /// Relabel/reshift to the canonical convention: "+" is the mode with
    /// the larger time-averaged sigma_z, and the gap is folded into
    /// `(-omega_l/2, omega_l/2]`. The numeric solver already produces this
    /// form; analytic solutions call it at construction.
    pub fn canonicalized(mut self) -> Self {
        let sz_plus = 2.0 * self.z.get(Mode::Plus, Mode::Plus, 0).re;
        let sz_minus = 2.0 * self.z.get(Mode::Minus, Mode::Minus, 0).re;
        let swap = if (sz_plus - sz_minus).abs() > 1e-12 {
            sz_plus < sz_minus
        } else {
            self.eps_plus < self.eps_minus
        };
        if swap {
            std::mem::swap(&mut self.eps_plus, &mut self.eps_minus);
            for t in [&mut self.x, &mut self.z, &mut self.plus] {
                let old = t.clone();
                *t = TransitionTable::from_entries(old.op, old.n_half, |a, b, n| {
                    old.get(a.other(), b.other(), n)
                });
            }
        }
        let g0 = self.gap();
        let g = fold_zone(g0, self.omega_l);
        let k = ((g - g0) / self.omega_l).round() as i64;
        if k != 0 {
            // Shift the "+" mode: eps_+ += k w_l, X_{+-,n} -> X_{+-,n+k},
            // X_{-+,n} -> X_{-+,n-k}; diagonals untouched.
            self.eps_plus += k as f64 * self.omega_l;
            for t in [&mut self.x, &mut self.z, &mut self.plus] {
                let old = t.clone();
                *t = TransitionTable::from_entries(old.op, old.n_half, |a, b, n| match (a, b) {
                    (Mode::Plus, Mode::Minus) => old.get(a, b, n + k),
                    (Mode::Minus, Mode::Plus) => old.get(a, b, n - k),
                    _ => old.get(a, b, n),
                });
            }
        }
        self
    }
}

/// Rates and steady populations of the secular master equation.
#[derive(Debug, Clone, Copy)]
pub struct RateSet {
    /// Pumping rate into the "+" Floquet state.
    pub w_minus_plus: f64,
    /// Decay rate out of the "+" Floquet state.
    pub w_plus_minus: f64,
    /// Population relaxation rate (`w_minus_plus + w_plus_minus`).
    pub gamma_rel: f64,
    /// Coherence decay rate.
    pub gamma_deph: f64,
    /// Bath-induced shift of the quasienergy gap (zero unless the
    /// Lamb-shift gate is on).
    pub delta_omega: f64,
    /// Steady population of the "+" Floquet state.
    pub rho_pp_ss: f64,
    /// Gap entering the emission line positions:
    /// `eps_+ - eps_- + delta_omega`.
    pub omega_pm: f64,
    /// False when the emission lines are not well separated
    /// (`|omega_pm| < 10 max(gamma_rel, gamma_deph)`), i.e. the secular
    /// approximation is strained.
    pub secular_ok: bool,
}

impl RateSet {
    /// Steady populations `(rho_++, rho_--)`.
    pub fn steady_populations(&self) -> (f64, f64) {
        (self.rho_pp_ss, 1.0 - self.rho_pp_ss)
    }
}

/// Options for the rate computation.
#[derive(Debug, Clone, Copy, Default)]
pub struct RateOptions {
    /// Evaluate the principal-value gap shift and fold it into `omega_pm`.
    pub lamb_shift: bool,
}

/// Sum the secular rates over all baths and all table channels.
///
/// Emission channel `|u_{alpha,n}> -> |u_beta>` carries weight
/// `2 pi |X_{alpha beta, n}|^2 G(Delta_{alpha beta, n})` with
/// `Delta_{alpha beta, n} = eps_alpha - eps_beta + n omega_l`; the pure
/// dephasing part adds `2 pi |X_{++,n}|^2 [G(n w_l) + G(-n w_l)]`.
pub fn compute_rates(sys: &SolvedSystem, baths: &[BathSpec], opts: RateOptions) -> Result<RateSet> {
    if baths.is_empty() {
        return Err(Error::EmptyBathList);
    }
    for b in baths {
        b.validate()?;
    }
    let gap = sys.gap();
    let wl = sys.omega_l;
    let pi = std::f64::consts::PI;

    let mut w_mp = 0.0; // |-> to |+>
    let mut w_pm = 0.0; // |+> to |->
    let mut gamma_deph = 0.0;
    let mut delta_omega = 0.0;
    let mut outer_shell = 0.0;
    let mut total_mag = 0.0;

    for bath in baths {
        let table = sys.table(bath.coupling_operator());
        let h = table.n_half as i64;
        for n in -h..=h {
            let x_mp = table.get(Mode::Minus, Mode::Plus, n).norm_sqr();
            let x_pm = table.get(Mode::Plus, Mode::Minus, n).norm_sqr();
            let x_pp = table.get(Mode::Plus, Mode::Plus, n).norm_sqr();
            let d_mp = -gap + n as f64 * wl;
            let d_pm = gap + n as f64 * wl;
            let w_up = 2.0 * pi * x_mp * bath.spectral_function(d_mp);
            let w_down = 2.0 * pi * x_pm * bath.spectral_function(d_pm);
            let deph = pi
                * (x_mp * (bath.spectral_function(d_mp) + bath.spectral_function(-d_mp))
                    + 2.0
                        * x_pp
                        * (bath.spectral_function(n as f64 * wl)
                            + bath.spectral_function(-(n as f64) * wl)));
            w_mp += w_up;
            w_pm += w_down;
            gamma_deph += deph;
            total_mag += w_up + w_down + deph;
            if n.abs() == h {
                outer_shell += w_up + w_down + deph;
            }
            if opts.lamb_shift {
                // Im(gamma^+ + gamma^-) at the (-,+,n) channel:
                // R(Delta) - R(-Delta).
                delta_omega +=
                    x_mp * (bath.principal_value(d_mp) - bath.principal_value(-d_mp));
            }
        }
    }
    if total_mag > 0.0 && outer_shell > 1e-12 * total_mag {
        return Err(Error::RateSumNotConverged {
            contribution: outer_shell / total_mag,
        });
    }

    let gamma_rel = w_mp + w_pm;
    let rho_pp_ss = if gamma_rel > 0.0 { w_mp / gamma_rel } else { 0.0 };
    let omega_pm = gap + delta_omega;
    let secular_ok = omega_pm.abs() >= 10.0 * gamma_rel.max(gamma_deph);
    Ok(RateSet {
        w_minus_plus: w_mp,
        w_plus_minus: w_pm,
        gamma_rel,
        gamma_deph,
        delta_omega,
        rho_pp_ss,
        omega_pm,
        secular_ok,
    })
}

/// Convenience: solve tables and rates in one go for the numeric solver.
pub fn rates_for(
    spec: &crate::driving::DrivingSpec,
    baths: &[BathSpec],
    n_max: Option<usize>,
    opts: RateOptions,
) -> Result<(SolvedSystem, RateSet)> {
    let sys = SolvedSystem::solve_sambe(spec, n_max)?;
    let rates = compute_rates(&sys, baths, opts)?;
    Ok((sys, rates))
}

/// Keep complex table accessors usable for X^- via duality when needed.
pub fn x_minus(table_plus: &TransitionTable, alpha: Mode, beta: Mode, n: i64) -> C64 {
    table_plus.get(beta, alpha, -n).conj()
}

//! Analytic Floquet solution for a single-harmonic drive.
//!
//! A unitary transformation with generator proportional to
//! `xi sin(omega_l t) sigma_x` removes part of the counter-rotating drive;
//! fixing `xi` self-consistently and dropping the remaining fast terms
//! leaves a rotating-frame Hamiltonian with renormalized amplitude and
//! detuning (the CHRW treatment). Setting `xi = 0` and dropping the
//! renormalization recovers the plain RWA. Both give closed-form
//! quasienergies and transition-coefficient tables with Bessel-function
//! structure.

use crate::driving::DrivingSpec;
use crate::floquet::{fold_zone, CouplingOp, Mode, TransitionTable};
use crate::rates::SolvedSystem;
use crate::special::{bessel_j1, bessel_j_array};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// Renormalized parameters of the CHRW transformation.
#[derive(Debug, Clone, Copy)]
pub struct ChrwParams {
    pub omega0: f64,
    pub omega_l: f64,
    pub amplitude: f64,
    /// Self-consistent transformation weight in [0, 1].
    pub xi: f64,
    /// Renormalized amplitude `A~ = 2 A (1 - xi)`.
    pub a_tilde: f64,
    /// Effective detuning `J_0(A xi / omega_l) omega0 - omega_l`.
    pub delta_tilde: f64,
    /// Effective Rabi frequency `sqrt(delta~^2 + A~^2/4)`.
    pub omega_r_tilde: f64,
    /// Mixing angle, principal branch, in [0, pi/2].
    pub theta: f64,
}

/// Bare rotating-wave parameters.
#[derive(Debug, Clone, Copy)]
pub struct RwaParams {
    pub omega0: f64,
    pub omega_l: f64,
    pub amplitude: f64,
    /// Bare detuning `omega0 - omega_l`.
    pub delta: f64,
    /// Rabi frequency `sqrt(delta^2 + A^2/4)`.
    pub omega_r: f64,
    /// Mixing angle `arctan[2 (omega_r - delta) / A]`.
    pub theta: f64,
}

fn mixing_angle(gap: f64, amp: f64, detuning: f64) -> f64 {
    if amp > 0.0 {
        (2.0 * (gap - detuning) / amp).atan()
    } else if detuning > 0.0 {
        0.0
    } else if detuning < 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        std::f64::consts::FRAC_PI_4
    }
}

/// Solve `omega0 J_1(A xi / omega_l) = A (1 - xi) / 2` for `xi` in [0, 1]
/// by bracketed bisection (residual below 1e-13). `A = 0` takes the
/// small-amplitude limit `xi = omega_l / (omega0 + omega_l)`.
pub fn solve_xi(amplitude: f64, omega0: f64, omega_l: f64) -> Result<f64> {
    if !(omega_l > 0.0) {
        return Err(Error::NonPositiveFrequency(omega_l));
    }
    if amplitude == 0.0 {
        return Ok(omega_l / (omega0 + omega_l));
    }
    let residual =
        |xi: f64| omega0 * bessel_j1(amplitude * xi / omega_l) - amplitude * (1.0 - xi) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (r_lo, r_hi) = (residual(lo), residual(hi));
    if r_lo == 0.0 {
        return Ok(lo);
    }
    if r_hi == 0.0 {
        return Ok(hi);
    }
    if r_lo.signum() == r_hi.signum() {
        return Err(Error::XiBracketFailure {
            res_lo: r_lo,
            res_hi: r_hi,
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let r_mid = residual(mid);
        if r_mid == 0.0 || hi - lo < 1e-13 {
            return Ok(mid);
        }
        if r_mid.signum() == r_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl ChrwParams {
    pub fn new(amplitude: f64, omega0: f64, omega_l: f64) -> Result<Self> {
        let xi = solve_xi(amplitude, omega0, omega_l)?;
        let a_tilde = 2.0 * amplitude * (1.0 - xi);
        let delta_tilde = bessel_j_array(amplitude * xi / omega_l, 0)[0] * omega0 - omega_l;
        let omega_r_tilde = delta_tilde.hypot(a_tilde / 2.0);
        let theta = mixing_angle(omega_r_tilde, a_tilde / 2.0, delta_tilde);
        Ok(Self {
            omega0,
            omega_l,
            amplitude,
            xi,
            a_tilde,
            delta_tilde,
            omega_r_tilde,
            theta,
        })
    }

    /// Bessel argument `A xi / omega_l`.
    pub fn bessel_argument(&self) -> f64 {
        self.amplitude * self.xi / self.omega_l
    }

    /// Residual of the self-consistency condition
    /// `omega0 J_1(A xi / omega_l) - A (1 - xi) / 2`.
    pub fn residual(&self) -> f64 {
        self.omega0 * bessel_j1(self.bessel_argument()) - self.a_tilde / 4.0
    }

    /// Natural-gauge quasienergies `(omega_l +- omega_r~) / 2`, unfolded.
    pub fn quasienergies(&self) -> (f64, f64) {
        (
            (self.omega_l + self.omega_r_tilde) / 2.0,
            (self.omega_l - self.omega_r_tilde) / 2.0,
        )
    }

    /// Quasienergies folded into the first zone.
    pub fn quasienergies_folded(&self) -> (f64, f64) {
        let (p, m) = self.quasienergies();
        (fold_zone(p, self.omega_l), fold_zone(m, self.omega_l))
    }
}

impl RwaParams {
    pub fn new(amplitude: f64, omega0: f64, omega_l: f64) -> Result<Self> {
        if !(omega_l > 0.0) {
            return Err(Error::NonPositiveFrequency(omega_l));
        }
        let delta = omega0 - omega_l;
        let omega_r = delta.hypot(amplitude / 2.0);
        let theta = mixing_angle(omega_r, amplitude / 2.0, delta);
        Ok(Self {
            omega0,
            omega_l,
            amplitude,
            delta,
            omega_r,
            theta,
        })
    }

    pub fn quasienergies(&self) -> (f64, f64) {
        (
            (self.omega_l + self.omega_r) / 2.0,
            (self.omega_l - self.omega_r) / 2.0,
        )
    }
}

/// Matrix elements of sigma_z and sigma_- between the dressed eigenstates,
/// indexed by mode.
fn dressed_elements(theta: f64) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let c2 = (2.0 * theta).cos();
    let s2 = (2.0 * theta).sin();
    let s = theta.sin();
    let c = theta.cos();
    // c_{alpha beta} = <alpha~| sigma_z |beta~>
    let cz = [[c2, s2], [s2, -c2]];
    // d_{alpha beta} = <alpha~| sigma_- |beta~>
    let dm = [[s2 / 2.0, s * s], [-c * c, -s2 / 2.0]];
    (cz, dm)
}

/// Bessel terms are dropped once `J_k < 1e-16`; returns the table half-width
/// that keeps every nonzero entry.
fn bessel_orders(z: f64) -> Vec<f64> {
    let mut k_max = 8usize.max((2.0 * z) as usize + 20);
    let mut j = bessel_j_array(z, k_max);
    while j[k_max].abs() >= 1e-16 {
        k_max *= 2;
        j = bessel_j_array(z, k_max);
    }
    while k_max > 2 && j[k_max - 1].abs() < 1e-16 {
        k_max -= 1;
    }
    j.truncate(k_max + 1);
    j
}

/// `X^z_{alpha beta, n}` from the CHRW Floquet states.
pub fn chrw_x_z(params: &ChrwParams, alpha: Mode, beta: Mode, n: i64) -> C64 {
    let (cz, dm) = dressed_elements(params.theta);
    let j = bessel_orders(params.bessel_argument());
    let jn = |k: i64| -> f64 {
        let k = k.unsigned_abs() as usize;
        if k < j.len() {
            j[k]
        } else {
            0.0
        }
    };
    let (a, b) = (alpha.index(), beta.index());
    let mut v = 0.0;
    if n % 2 == 0 {
        // c-term: J_|n| at even n.
        v += cz[a][b] * jn(n);
        // d_{alpha beta}: +J_{n+1} for n >= 0, -J_{-n-1} for n <= -2.
        if n >= 0 {
            v += dm[a][b] * jn(n + 1);
        } else {
            v -= dm[a][b] * jn(-n - 1);
        }
        // d_{beta alpha}: -J_{n-1} for n >= 2, +J_{1-n} for n <= 0.
        if n >= 2 {
            v -= dm[b][a] * jn(n - 1);
        } else {
            v += dm[b][a] * jn(1 - n);
        }
    }
    C64::new(v / 2.0, 0.0)
}

/// `X^x_{alpha beta, n}` (only `n = +-1` are nonzero).
pub fn chrw_x_x(params: &ChrwParams, alpha: Mode, beta: Mode, n: i64) -> C64 {
    let (_, dm) = dressed_elements(params.theta);
    let (a, b) = (alpha.index(), beta.index());
    let v = match n {
        -1 => dm[a][b],
        1 => dm[b][a],
        _ => 0.0,
    };
    C64::new(v / 2.0, 0.0)
}

/// `X^+_{alpha beta, n}` (odd `n` only).
pub fn chrw_x_plus(params: &ChrwParams, alpha: Mode, beta: Mode, n: i64) -> C64 {
    let (cz, dm) = dressed_elements(params.theta);
    let j = bessel_orders(params.bessel_argument());
    let jn = |k: i64| -> f64 {
        let k = k.unsigned_abs() as usize;
        if k < j.len() {
            j[k]
        } else {
            0.0
        }
    };
    let (a, b) = (alpha.index(), beta.index());
    if n % 2 == 0 {
        return C64::new(0.0, 0.0);
    }
    let mut v = 0.0;
    // d_{beta alpha} branch: (1 + J_0) at n = 1, J_{n-1} for n >= 3,
    // J_{1-n} for n <= -1.
    if n == 1 {
        v += dm[b][a] * (1.0 + jn(0));
    } else if n >= 3 {
        v += dm[b][a] * jn(n - 1);
    }
    if n <= -1 {
        v += dm[b][a] * jn(1 - n);
    }
    // d_{alpha beta} branch: (1 - J_0) at n = -1, minus J_{n+1} for n >= 1,
    // minus J_{-n-1} for n <= -3.
    if n == -1 {
        v += dm[a][b] * (1.0 - jn(0));
    }
    if n >= 1 {
        v -= dm[a][b] * jn(n + 1);
    } else if n <= -3 {
        v -= dm[a][b] * jn(-n - 1);
    }
    // c branch: -J_n for n >= 1, +J_{-n} for n <= -1.
    if n >= 1 {
        v -= cz[a][b] * jn(n);
    } else {
        v += cz[a][b] * jn(-n);
    }
    C64::new(v / 2.0, 0.0)
}

fn analytic_tables(
    theta_tables: impl Fn(CouplingOp, Mode, Mode, i64) -> C64,
    n_half: usize,
) -> (TransitionTable, TransitionTable, TransitionTable) {
    let x = TransitionTable::from_entries(CouplingOp::X, n_half, |a, b, n| {
        theta_tables(CouplingOp::X, a, b, n)
    });
    let z = TransitionTable::from_entries(CouplingOp::Z, n_half, |a, b, n| {
        theta_tables(CouplingOp::Z, a, b, n)
    });
    let p = TransitionTable::from_entries(CouplingOp::Plus, n_half, |a, b, n| {
        theta_tables(CouplingOp::Plus, a, b, n)
    });
    (x, z, p)
}

/// Full CHRW solution packaged for the rate/spectrum pipeline.
pub fn chrw_solution(amplitude: f64, omega0: f64, omega_l: f64) -> Result<(ChrwParams, SolvedSystem)> {
    let params = ChrwParams::new(amplitude, omega0, omega_l)?;
    let n_half = bessel_orders(params.bessel_argument()).len() + 2;
    let (x, z, p) = analytic_tables(
        |op, a, b, n| match op {
            CouplingOp::X => chrw_x_x(&params, a, b, n),
            CouplingOp::Z => chrw_x_z(&params, a, b, n),
            CouplingOp::Plus => chrw_x_plus(&params, a, b, n),
            CouplingOp::Minus => unreachable!(),
        },
        n_half,
    );
    let (ep, em) = params.quasienergies();
    let system = SolvedSystem::new(omega_l, ep, em, x, z, p).canonicalized();
    Ok((params, system))
}

/// Plain RWA solution: quasienergies `(omega_l +- omega_r)/2`, `X^+`
/// nonzero only at `n = 1`.
pub fn rwa_solution(amplitude: f64, omega0: f64, omega_l: f64) -> Result<(RwaParams, SolvedSystem)> {
    let params = RwaParams::new(amplitude, omega0, omega_l)?;
    let (cz, dm) = dressed_elements(params.theta);
    let (x, z, p) = analytic_tables(
        |op, a, b, n| {
            let (a, b) = (a.index(), b.index());
            let v = match (op, n) {
                (CouplingOp::X, -1) => dm[a][b] / 2.0,
                (CouplingOp::X, 1) => dm[b][a] / 2.0,
                (CouplingOp::Z, 0) => cz[a][b] / 2.0,
                (CouplingOp::Plus, 1) => dm[b][a],
                _ => 0.0,
            };
            C64::new(v, 0.0)
        },
        4,
    );
    let (ep, em) = params.quasienergies();
    let system = SolvedSystem::new(omega_l, ep, em, x, z, p).canonicalized();
    Ok((params, system))
}

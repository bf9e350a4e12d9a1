//! Sambe-space Floquet solver for the driven two-level system.
//!
//! The Floquet Hamiltonian `H_S(t) - i d/dt` becomes a time-independent
//! Hermitian matrix on the composite basis `|gamma, n>` (bare level x
//! Fourier index). Truncating `n` to `[-n_max, n_max]` gives a dense
//! `2(2 n_max + 1)` eigenproblem; the two physical Floquet modes are the
//! in-zone eigenpairs whose Fourier weight concentrates near `n = 0`.
//!
//! An independent monodromy-matrix oracle (one-period RK4 propagation)
//! cross-checks the quasienergies.

use crate::driving::DrivingSpec;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Boundary Fourier weight above which a solution counts as not converged.
pub const TRUNCATION_TOL: f64 = 1e-10;

/// Floquet-mode label. `Plus` is the mode with the larger time-averaged
/// `<sigma_z>`; it reduces to the bare upper level for vanishing drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Plus,
    Minus,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Plus, Mode::Minus];

    pub fn index(self) -> usize {
        match self {
            Mode::Plus => 0,
            Mode::Minus => 1,
        }
    }

    pub fn other(self) -> Mode {
        match self {
            Mode::Plus => Mode::Minus,
            Mode::Minus => Mode::Plus,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Mode::Plus => "+",
            Mode::Minus => "-",
        }
    }
}

/// Coupling operator whose Floquet-basis Fourier components are tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingOp {
    /// sigma_x / 2
    X,
    /// sigma_z / 2
    Z,
    /// sigma_+
    Plus,
    /// sigma_-
    Minus,
}

impl CouplingOp {
    /// 2x2 matrix elements `<gamma| Op |delta>` in the bare basis
    /// (index 0 = upper level, 1 = lower level).
    pub fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            CouplingOp::X => [[0.0, 0.5], [0.5, 0.0]],
            CouplingOp::Z => [[0.5, 0.0], [0.0, -0.5]],
            CouplingOp::Plus => [[0.0, 1.0], [0.0, 0.0]],
            CouplingOp::Minus => [[0.0, 0.0], [1.0, 0.0]],
        }
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, CouplingOp::X | CouplingOp::Z)
    }
}

/// Fold a quasienergy into the first zone `(-omega_l/2, omega_l/2]`.
pub fn fold_zone(eps: f64, omega_l: f64) -> f64 {
    let mut r = eps - omega_l * (eps / omega_l).round();
    if r <= -omega_l / 2.0 {
        r += omega_l;
    }
    if r > omega_l / 2.0 {
        r -= omega_l;
    }
    r
}

/// Circular distance between two quasienergies defined modulo `omega_l`.
pub fn circular_distance(a: f64, b: f64, omega_l: f64) -> f64 {
    let d = (a - b).rem_euclid(omega_l);
    d.min(omega_l - d)
}

/// Fourier coefficients of one Floquet mode: `u[gamma][n + n_max]` with
/// gamma in {upper, lower}.
#[derive(Debug, Clone)]
pub struct ModeCoefficients {
    pub n_max: usize,
    /// Flat storage: index `(n + n_max) * 2 + gamma`.
    pub c: Vec<C64>,
}

impl ModeCoefficients {
    fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            c: vec![C64::new(0.0, 0.0); 2 * (2 * n_max + 1)],
        }
    }

    /// Coefficient `u_{gamma, n}`; zero outside the stored range.
    pub fn get(&self, gamma: usize, n: i64) -> C64 {
        let m = self.n_max as i64;
        if n < -m || n > m {
            return C64::new(0.0, 0.0);
        }
        self.c[((n + m) as usize) * 2 + gamma]
    }

    fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Weight on the outermost Fourier shells `n = +-n_max`.
    fn boundary_weight(&self) -> f64 {
        let last = self.n_max as i64;
        (0..2)
            .map(|g| self.get(g, last).norm_sqr() + self.get(g, -last).norm_sqr())
            .sum()
    }

    fn central_weight(&self) -> f64 {
        (0..2)
            .map(|g| {
                self.get(g, 0).norm_sqr() + self.get(g, 1).norm_sqr() + self.get(g, -1).norm_sqr()
            })
            .sum()
    }

    /// Time-averaged `<sigma_z>`.
    fn sigma_z_average(&self) -> f64 {
        let m = self.n_max as i64;
        (-m..=m)
            .map(|n| self.get(0, n).norm_sqr() - self.get(1, n).norm_sqr())
            .sum()
    }

    /// Shift the Fourier index by `k`, i.e. multiply the mode by
    /// `exp(i k omega_l t)`; coefficients move as `u'_n = u_{n-k}` and the
    /// quasienergy gains `k * omega_l`.
    fn shifted(&self, k: i64) -> Self {
        let mut out = Self::zeros(self.n_max);
        let m = self.n_max as i64;
        for n in -m..=m {
            let src = n - k;
            if (-m..=m).contains(&src) {
                for g in 0..2 {
                    out.c[((n + m) as usize) * 2 + g] = self.get(g, src);
                }
            }
        }
        out
    }

    /// Mode state at t = 0 (sum of Fourier coefficients).
    pub fn at_time_zero(&self) -> [C64; 2] {
        let m = self.n_max as i64;
        let mut v = [C64::new(0.0, 0.0); 2];
        for n in -m..=m {
            for (g, slot) in v.iter_mut().enumerate() {
                *slot += self.get(g, n);
            }
        }
        v
    }
}

/// Solved Floquet problem: quasienergies and mode Fourier tables.
///
/// `eps[Mode]` holds the gauge quasienergies the coefficient tables are
/// consistent with: the Minus representative lies in the first zone and the
/// Plus one is shifted so that the gap `eps_+ - eps_-` is folded to
/// `(-omega_l/2, omega_l/2]`. `folded(mode)` reports the zone value.
#[derive(Debug, Clone)]
pub struct FloquetSolution {
    pub omega0: f64,
    pub omega_l: f64,
    pub n_max: usize,
    eps: [f64; 2],
    modes: [ModeCoefficients; 2],
    sigma_z_avg: [f64; 2],
    boundary_weight: f64,
    pub zone_edge_warning: bool,
}

impl FloquetSolution {
    /// Gauge quasienergy of a mode (consistent with its Fourier table).
    pub fn eps(&self, mode: Mode) -> f64 {
        self.eps[mode.index()]
    }

    /// Quasienergy folded into the first zone.
    pub fn folded(&self, mode: Mode) -> f64 {
        fold_zone(self.eps(mode), self.omega_l)
    }

    /// Gap `eps_+ - eps_-` in the table gauge.
    pub fn gap(&self) -> f64 {
        self.eps[0] - self.eps[1]
    }

    pub fn mode(&self, mode: Mode) -> &ModeCoefficients {
        &self.modes[mode.index()]
    }

    /// Time-averaged `<sigma_z>` per mode (labeling metadata).
    pub fn sigma_z_average(&self, mode: Mode) -> f64 {
        self.sigma_z_avg[mode.index()]
    }

    /// Largest outer-shell Fourier weight among the two modes.
    pub fn boundary_weight(&self) -> f64 {
        self.boundary_weight
    }

    /// Copy with one mode replaced by its `k`-shifted gauge copy
    /// (`u_n -> u_{n-k}`, `eps -> eps + k omega_l`). Downstream observables
    /// are invariant under this.
    pub fn shifted_copy(&self, mode: Mode, k: i64) -> Self {
        let mut out = self.clone();
        out.eps[mode.index()] += k as f64 * self.omega_l;
        out.modes[mode.index()] = self.modes[mode.index()].shifted(k);
        out
    }

    /// Copy with the two labels swapped everywhere.
    pub fn label_swapped(&self) -> Self {
        let mut out = self.clone();
        out.eps.swap(0, 1);
        out.modes.swap(0, 1);
        out.sigma_z_avg.swap(0, 1);
        out
    }

    /// Fourier table of a coupling operator between the two modes.
    pub fn transition_coefficients(&self, op: CouplingOp) -> TransitionTable {
        let n_half = 2 * self.n_max;
        let mat = op.matrix();
        let m = self.n_max as i64;
        let mut data = vec![C64::new(0.0, 0.0); 4 * (2 * n_half + 1)];
        for (ai, a) in Mode::BOTH.iter().enumerate() {
            for (bi, b) in Mode::BOTH.iter().enumerate() {
                let ua = self.mode(*a);
                let ub = self.mode(*b);
                for n in -(n_half as i64)..=(n_half as i64) {
                    let mut s = C64::new(0.0, 0.0);
                    for l in -m..=m {
                        let ln = l - n;
                        if ln < -m || ln > m {
                            continue;
                        }
                        for g in 0..2 {
                            for d in 0..2 {
                                if mat[g][d] != 0.0 {
                                    s += ua.get(g, ln).conj() * ub.get(d, l) * mat[g][d];
                                }
                            }
                        }
                    }
                    data[(ai * 2 + bi) * (2 * n_half + 1) + (n + n_half as i64) as usize] = s;
                }
            }
        }
        TransitionTable {
            op,
            n_half,
            data,
        }
    }
}

/// Complex coefficients `X_{alpha beta, n}` of one coupling operator.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    pub op: CouplingOp,
    /// Table covers `n` in `[-n_half, n_half]`.
    pub n_half: usize,
    data: Vec<C64>,
}

impl TransitionTable {
    pub fn from_entries(
        op: CouplingOp,
        n_half: usize,
        mut fill: impl FnMut(Mode, Mode, i64) -> C64,
    ) -> Self {
        let width = 2 * n_half + 1;
        let mut data = vec![C64::new(0.0, 0.0); 4 * width];
        for (ai, a) in Mode::BOTH.iter().enumerate() {
            for (bi, b) in Mode::BOTH.iter().enumerate() {
                for n in -(n_half as i64)..=(n_half as i64) {
                    data[(ai * 2 + bi) * width + (n + n_half as i64) as usize] = fill(*a, *b, n);
                }
            }
        }
        Self { op, n_half, data }
    }

    /// `X_{alpha beta, n}`; zero outside the stored range.
    pub fn get(&self, alpha: Mode, beta: Mode, n: i64) -> C64 {
        let h = self.n_half as i64;
        if n < -h || n > h {
            return C64::new(0.0, 0.0);
        }
        let width = 2 * self.n_half + 1;
        self.data[(alpha.index() * 2 + beta.index()) * width + (n + h) as usize]
    }

    /// Parseval sum `sum_{beta, n} |X_{alpha beta, n}|^2`.
    pub fn parseval(&self, alpha: Mode) -> f64 {
        let h = self.n_half as i64;
        Mode::BOTH
            .iter()
            .map(|b| {
                (-h..=h)
                    .map(|n| self.get(alpha, *b, n).norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Build the truncated Floquet Hamiltonian in Sambe space.
///
/// Basis ordering: flat index `(n + n_max) * 2 + gamma` with gamma 0 = upper
/// level, 1 = lower level. A drive component `a cos(m w t + phi)` couples
/// photon sector `n` to `n - m` with entry `(a/2) e^{i phi}` and to `n + m`
/// with `(a/2) e^{-i phi}` on the sigma_x off-diagonals.
pub fn build_floquet_matrix(spec: &DrivingSpec, n_max: usize) -> Result<DMatrix<C64>> {
    if n_max < spec.max_harmonic() {
        return Err(Error::TruncationTooSmall {
            n_max,
            max_harmonic: spec.max_harmonic(),
        });
    }
    let m = n_max as i64;
    let dim = 2 * (2 * n_max + 1);
    let idx = |n: i64, g: usize| ((n + m) as usize) * 2 + g;
    let mut h = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for n in -m..=m {
        h[(idx(n, 0), idx(n, 0))] = C64::new(spec.omega0 / 2.0 + n as f64 * spec.omega_l, 0.0);
        h[(idx(n, 1), idx(n, 1))] = C64::new(-spec.omega0 / 2.0 + n as f64 * spec.omega_l, 0.0);
        for comp in spec.components() {
            let half = comp.amplitude / 2.0;
            let phase = C64::from_polar(half, comp.phase);
            for (row, entry) in [
                (n - comp.harmonic as i64, phase),
                (n + comp.harmonic as i64, phase.conj()),
            ] {
                if row < -m || row > m {
                    continue;
                }
                for g in 0..2 {
                    h[(idx(row, 1 - g), idx(n, g))] += entry;
                }
            }
        }
    }
    Ok(h)
}

struct RawMode {
    eps: f64,
    coeffs: ModeCoefficients,
    central: f64,
    sigma_z: f64,
}

fn eigen_modes(h: DMatrix<C64>, omega_l: f64, n_max: usize) -> Vec<RawMode> {
    // The matrix is real symmetric whenever every component phase is a
    // multiple of pi; the real path is noticeably faster for sweeps.
    let is_real = h.iter().all(|v| v.im == 0.0);
    let (eigenvalues, vectors): (DVector<f64>, Vec<DVector<C64>>) = if is_real {
        let hr = h.map(|v| v.re);
        let se = nalgebra::SymmetricEigen::new(hr);
        let vecs = (0..se.eigenvectors.ncols())
            .map(|j| se.eigenvectors.column(j).map(|v| C64::new(v, 0.0)))
            .collect();
        (se.eigenvalues, vecs)
    } else {
        let se = nalgebra::SymmetricEigen::new(h);
        let vecs = (0..se.eigenvectors.ncols())
            .map(|j| se.eigenvectors.column(j).into_owned())
            .collect();
        (se.eigenvalues, vecs)
    };

    let half = omega_l / 2.0;
    let mut raw: Vec<RawMode> = Vec::new();
    for (j, &eps) in eigenvalues.iter().enumerate() {
        if !(eps > -half && eps <= half) {
            continue;
        }
        let mut coeffs = ModeCoefficients::zeros(n_max);
        coeffs.c.copy_from_slice(vectors[j].as_slice());
        // Phase fixing: largest-magnitude coefficient real positive.
        let (mut best, mut best_mag) = (0usize, -1.0f64);
        for (i, v) in coeffs.c.iter().enumerate() {
            let mag = v.norm_sqr();
            if mag > best_mag + 1e-30 {
                best = i;
                best_mag = mag;
            }
        }
        let pivot = coeffs.c[best];
        if pivot.norm() > 0.0 {
            let rot = pivot.conj() / pivot.norm();
            for v in coeffs.c.iter_mut() {
                *v *= rot;
            }
        }
        raw.push(RawMode {
            eps,
            central: coeffs.central_weight(),
            sigma_z: coeffs.sigma_z_average(),
            coeffs,
        });
    }
    // Most centrally concentrated first; deterministic tie-breaking.
    raw.sort_by(|a, b| {
        b.central
            .partial_cmp(&a.central)
            .unwrap()
            .then(a.eps.partial_cmp(&b.eps).unwrap())
    });
    raw
}

/// Select, label, and gauge-fix the two physical modes from any Hermitian
/// Sambe-space matrix (full drive or a co-rotating comparison form).
pub fn solve_from_matrix(
    omega0: f64,
    omega_l: f64,
    h: DMatrix<C64>,
    n_max: usize,
) -> Result<FloquetSolution> {
    let raw = eigen_modes(h, omega_l, n_max);
    if raw.len() < 2 {
        return Err(Error::ModeSelectionFailed(raw.len()));
    }
    let mut picked: Vec<RawMode> = raw.into_iter().take(2).collect();
    // Label "+" = larger time-averaged <sigma_z>; ties by larger quasienergy.
    let swap = {
        let (a, b) = (&picked[0], &picked[1]);
        let ds = a.sigma_z - b.sigma_z;
        if ds.abs() > 1e-12 {
            ds < 0.0
        } else {
            a.eps < b.eps
        }
    };
    if swap {
        picked.swap(0, 1);
    }
    let minus = picked.pop().expect("two modes");
    let plus = picked.pop().expect("two modes");

    let boundary = plus.coeffs.boundary_weight().max(minus.coeffs.boundary_weight());
    let norm_err = (plus.coeffs.norm_sq() - 1.0)
        .abs()
        .max((minus.coeffs.norm_sq() - 1.0).abs());
    if norm_err > 1e-12 {
        return Err(Error::TruncationNotConverged {
            achieved: norm_err,
            tolerance: 1e-12,
            n_max,
        });
    }

    // Relative gauge: shift the "+" representative so the gap folds into
    // (-omega_l/2, omega_l/2]. This keeps the transition tables aligned
    // with the physical sideband splitting.
    let g0 = plus.eps - minus.eps;
    let g = fold_zone(g0, omega_l);
    let k = ((g - g0) / omega_l).round() as i64;
    let (eps_plus, coeffs_plus) = if k != 0 {
        (plus.eps + k as f64 * omega_l, plus.coeffs.shifted(k))
    } else {
        (plus.eps, plus.coeffs)
    };

    let zone_edge_warning = {
        let fp = fold_zone(eps_plus, omega_l);
        let fm = fold_zone(minus.eps, omega_l);
        circular_distance(fp, fm, omega_l) < 1e-8 * omega_l
            || (fp.abs() - omega_l / 2.0).abs() < 1e-8 * omega_l
    };

    let sol = FloquetSolution {
        omega0,
        omega_l,
        n_max,
        eps: [eps_plus, minus.eps],
        sigma_z_avg: [plus.sigma_z, minus.sigma_z],
        modes: [coeffs_plus, minus.coeffs],
        boundary_weight: boundary,
        zone_edge_warning,
    };
    if boundary > TRUNCATION_TOL {
        return Err(Error::TruncationNotConverged {
            achieved: boundary,
            tolerance: TRUNCATION_TOL,
            n_max,
        });
    }
    Ok(sol)
}

fn solve_at(spec: &DrivingSpec, n_max: usize) -> Result<FloquetSolution> {
    let h = build_floquet_matrix(spec, n_max)?;
    solve_from_matrix(spec.omega0, spec.omega_l, h, n_max)
}

/// Solve the Floquet problem, escalating the truncation once (doubling
/// `n_max`) if the boundary weight is above tolerance.
pub fn solve(spec: &DrivingSpec, n_max: usize) -> Result<FloquetSolution> {
    match solve_at(spec, n_max) {
        Err(Error::TruncationNotConverged { .. }) => solve_at(spec, 2 * n_max),
        other => other,
    }
}

/// Solve with the default truncation for the drive.
pub fn solve_default(spec: &DrivingSpec) -> Result<FloquetSolution> {
    solve(spec, spec.default_n_max())
}

/// Default step count for the monodromy integrator.
pub fn default_monodromy_steps(n_max: usize) -> usize {
    4096.max(512 * n_max)
}

/// Quasienergies and Floquet modes at t = 0 from one-period propagation.
///
/// Integrates `i dU/dt = H_S(t) U` over one period with a fixed-step
/// classical 4th-order scheme and eigen-decomposes the propagator. The
/// eigenphases divided by the period give the quasienergies modulo
/// `omega_l`, returned folded into the first zone. Serves as an oracle
/// independent of the Sambe-space path.
pub fn monodromy_oracle(spec: &DrivingSpec, steps: usize) -> Result<([f64; 2], [[C64; 2]; 2])> {
    let period = spec.period();
    let h_at = |t: f64| -> [[C64; 2]; 2] {
        let f = spec.evaluate(t);
        [
            [C64::new(spec.omega0 / 2.0, 0.0), C64::new(f, 0.0)],
            [C64::new(f, 0.0), C64::new(-spec.omega0 / 2.0, 0.0)],
        ]
    };
    let mul = |a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]| -> [[C64; 2]; 2] {
        let mut c = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let minus_i_h = |t: f64| -> [[C64; 2]; 2] {
        let h = h_at(t);
        let mi = C64::new(0.0, -1.0);
        [
            [mi * h[0][0], mi * h[0][1]],
            [mi * h[1][0], mi * h[1][1]],
        ]
    };
    let axpy = |y: &[[C64; 2]; 2], a: f64, x: &[[C64; 2]; 2]| -> [[C64; 2]; 2] {
        let mut out = *y;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += C64::new(a, 0.0) * x[i][j];
            }
        }
        out
    };

    let mut u = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ];
    let h = period / steps as f64;
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = mul(&minus_i_h(t), &u);
        let k2 = mul(&minus_i_h(t + h / 2.0), &axpy(&u, h / 2.0, &k1));
        let k3 = mul(&minus_i_h(t + h / 2.0), &axpy(&u, h / 2.0, &k2));
        let k4 = mul(&minus_i_h(t + h), &axpy(&u, h, &k3));
        for i in 0..2 {
            for j in 0..2 {
                u[i][j] += C64::new(h / 6.0, 0.0)
                    * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }

    // Unitarity drift check.
    let mut drift = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut v = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            if i == j {
                v -= 1.0;
            }
            drift = drift.max(v.norm());
        }
    }
    if drift > 1e-8 {
        return Err(Error::NonUnitaryPropagator { drift });
    }

    // Closed-form eigendecomposition of the 2x2 propagator.
    let tr = u[0][0] + u[1][1];
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let eigvec = |l: C64| -> [C64; 2] {
        let v1 = [u[0][1], l - u[0][0]];
        let v2 = [l - u[1][1], u[1][0]];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n < 1e-28 {
            // Degenerate propagator (e.g. zero drive at integer periods).
            return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        }
        let s = 1.0 / n.sqrt();
        [v[0] * s, v[1] * s]
    };
    let mut pairs = [(l1, eigvec(l1)), (l2, eigvec(l2))];
    if (disc.norm()) < 1e-12 {
        // Degenerate pair: return the canonical basis.
        pairs[0].1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        pairs[1].1 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    }
    let eps = [
        fold_zone(-pairs[0].0.arg() / period, spec.omega_l),
        fold_zone(-pairs[1].0.arg() / period, spec.omega_l),
    ];
    Ok((eps, [pairs[0].1, pairs[1].1]))
}

//! Command implementations shared by the CLI and the integration tests.

use crate::bath::BathSpec;
use crate::chrw;
use crate::config::{RunConfig, SolverMethod};
use crate::driving::DrivingSpec;
use crate::floquet::{self, fold_zone, Mode};
use crate::output::{self, fmt_float};
use crate::rates::{compute_rates, RateOptions, RateSet, SolvedSystem};
use crate::resonance;
use crate::spectrum::{assemble, g1_at_zero, sample, sideband_weights};
use crate::{Error, Result};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// Solve the configured system with the configured solver.
pub fn solve_system(cfg: &RunConfig) -> Result<(DrivingSpec, SolvedSystem)> {
    let spec = cfg.driving.build()?;
    let sys = match cfg.solver.method {
        SolverMethod::Sambe => SolvedSystem::solve_sambe(&spec, cfg.solver.n_max)?,
        SolverMethod::Chrw => SolvedSystem::solve_chrw(&spec)?,
        SolverMethod::Rwa => SolvedSystem::solve_rwa(&spec)?,
    };
    Ok((spec, sys))
}

fn rates_for_system(cfg: &RunConfig, sys: &SolvedSystem) -> Result<RateSet> {
    compute_rates(
        sys,
        &cfg.baths,
        RateOptions {
            lamb_shift: cfg.solver.lamb_shift,
        },
    )
}

fn spectrum_header(cfg: &RunConfig, command: &str, sys: &SolvedSystem, rates: &RateSet) -> String {
    let mut extra = vec![
        ("eps_plus_folded", fmt_float(fold_zone(sys.eps_plus, sys.omega_l))),
        ("eps_minus_folded", fmt_float(fold_zone(sys.eps_minus, sys.omega_l))),
        ("gap", fmt_float(sys.gap())),
        ("gamma_rel", fmt_float(rates.gamma_rel)),
        ("gamma_deph", fmt_float(rates.gamma_deph)),
        ("rho_pp_ss", fmt_float(rates.rho_pp_ss)),
    ];
    if !rates.secular_ok {
        extra.push((
            "warning",
            "emission lines are not well separated; secular rates are strained".into(),
        ));
    }
    output::header(command, &cfg.to_toml(), &extra)
}

/// `spectrum` command: line catalog plus sampled intensity grid.
pub fn cmd_spectrum(cfg: &RunConfig, outdir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let (_, sys) = solve_system(cfg)?;
    let rates = rates_for_system(cfg, &sys)?;
    let window = cfg.spectrum.n_window.map(|w| -w..=w);
    let lines = assemble(&sys.plus, &rates, sys.omega_l, window);
    let grid = sample(
        &lines,
        cfg.spectrum.omega_min,
        cfg.spectrum.omega_max,
        cfg.spectrum.points,
    );
    let header = spectrum_header(cfg, "spectrum", &sys, &rates);

    let lines_path = outdir.join("lines.tsv");
    output::write_line_catalog(&lines_path, &header, &lines)?;
    let grid_path = outdir.join("spectrum.tsv");
    let rows: Vec<Vec<f64>> = grid.iter().map(|&(w, i)| vec![w, i]).collect();
    output::write_table(&grid_path, &header, &["omega", "intensity"], &rows)?;
    if !rates.secular_ok {
        eprintln!("warning: emission lines are not well separated; secular rates are strained");
    }
    Ok(vec![lines_path, grid_path])
}

/// One row of the three-solver comparison.
pub(crate) fn compare_row(a_over_wl: f64, omega_l: f64) -> Result<Vec<f64>> {
    let a = a_over_wl * omega_l;
    let spec = DrivingSpec::harmonic(a, omega_l)?;
    let sambe = SolvedSystem::solve_sambe(&spec, None)?;
    let gap = |sys: &SolvedSystem| floquet::circular_distance(sys.gap(), 0.0, omega_l);
    let abs_eps = |sys: &SolvedSystem| fold_zone(sys.eps_plus, omega_l).abs();
    let xz = |sys: &SolvedSystem, n: i64| sys.z.get(Mode::Plus, Mode::Plus, n).norm();
    let mut row = vec![a_over_wl, abs_eps(&sambe), gap(&sambe), xz(&sambe, 0), xz(&sambe, 2)];
    match chrw::chrw_solution(a, spec.omega0, omega_l) {
        Ok((_, sys)) => {
            row.extend([abs_eps(&sys), gap(&sys), xz(&sys, 0), xz(&sys, 2)]);
        }
        Err(Error::XiBracketFailure { .. }) => row.extend([f64::NAN; 4]),
        Err(e) => return Err(e),
    }
    let (_, rwa) = chrw::rwa_solution(a, spec.omega0, omega_l)?;
    row.extend([abs_eps(&rwa), gap(&rwa), xz(&rwa, 0), xz(&rwa, 2)]);
    Ok(row)
}

pub const COMPARE_COLUMNS: &[&str] = &[
    "a_over_omega_l",
    "abs_eps_sambe",
    "gap_sambe",
    "xz00_sambe",
    "xz02_sambe",
    "abs_eps_chrw",
    "gap_chrw",
    "xz00_chrw",
    "xz02_chrw",
    "abs_eps_rwa",
    "gap_rwa",
    "xz00_rwa",
    "xz02_rwa",
];

/// `compare` command: quasienergies and |X| coefficients from the three
/// solvers over an amplitude grid.
pub fn cmd_compare(cfg: &RunConfig, outdir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let grid = cfg.compare.clone().unwrap_or_default();
    let omega_l = cfg.driving.omega_l;
    let step = (grid.a_over_omega_l_max - grid.a_over_omega_l_min) / (grid.points - 1) as f64;
    let axis: Vec<f64> = (0..grid.points)
        .map(|i| grid.a_over_omega_l_min + i as f64 * step)
        .collect();
    let rows: Vec<Vec<f64>> = axis
        .par_iter()
        .map(|&a| compare_row(a, omega_l))
        .collect::<Result<Vec<_>>>()?;
    let header = output::header("compare", &cfg.to_toml(), &[]);
    let path = outdir.join("compare.tsv");
    output::write_table(&path, &header, COMPARE_COLUMNS, &rows)?;
    Ok(vec![path])
}

/// `resonance-scan` command: P_bar curve plus refined peak table.
pub fn cmd_resonance_scan(cfg: &RunConfig, outdir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let res = cfg
        .resonance
        .clone()
        .ok_or_else(|| Error::InvalidConfig("resonance-scan needs a [resonance] section".into()))?;
    let driving = cfg.driving.clone();
    let template = move |wl: f64| -> Result<DrivingSpec> {
        let mut d = driving.clone();
        d.omega_l = wl;
        d.build()
    };
    let scan = resonance::scan_resonances(
        &template,
        res.omega_l_min,
        res.omega_l_max,
        res.grid_points,
        res.refine_tol,
        res.threshold,
    )?;

    let harmonic_ref: Option<Vec<f64>> = if res.harmonic_reference {
        let driving = cfg.driving.clone();
        let template = move |wl: f64| -> Result<DrivingSpec> {
            let mut d = driving.clone();
            d.omega_l = wl;
            d.r = 0.0;
            d.kind = "harmonic".into();
            d.build()
        };
        Some(
            scan.omega_l_grid
                .par_iter()
                .map(|&wl| {
                    resonance::mean_transition_probability_default(&template(wl)?)
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let rwa_ref: Option<Vec<f64>> = if res.rwa_reference {
        let d = cfg.driving.clone();
        Some(
            scan.omega_l_grid
                .par_iter()
                .map(|&wl| {
                    let n_max = DrivingSpec::biharmonic(d.amplitude, d.r, d.phi, wl)?
                        .default_n_max();
                    resonance::rwa_biharmonic_pbar(d.amplitude, d.r, d.phi, wl, n_max)
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };

    let mut columns = vec!["omega_l", "pbar"];
    if harmonic_ref.is_some() {
        columns.push("pbar_harmonic");
    }
    if rwa_ref.is_some() {
        columns.push("pbar_rwa");
    }
    let rows: Vec<Vec<f64>> = scan
        .omega_l_grid
        .iter()
        .enumerate()
        .map(|(i, &wl)| {
            let mut row = vec![wl, scan.pbar_values[i]];
            if let Some(h) = &harmonic_ref {
                row.push(h[i]);
            }
            if let Some(r) = &rwa_ref {
                row.push(r[i]);
            }
            row
        })
        .collect();
    let header = output::header("resonance-scan", &cfg.to_toml(), &[]);
    let curve_path = outdir.join("pbar.tsv");
    output::write_table(&curve_path, &header, &columns, &rows)?;
    let peaks_path = outdir.join("peaks.tsv");
    let peak_rows: Vec<Vec<f64>> = scan.peaks.iter().map(|&(w, p)| vec![w, p]).collect();
    output::write_table(&peaks_path, &header, &["omega_l", "pbar"], &peak_rows)?;
    Ok(vec![curve_path, peaks_path])
}

/// `sweep` command: spectrum pipeline across parameter values, plus a
/// summary table. Points run in parallel; output order follows ascending
/// parameter value.
pub fn cmd_sweep(cfg: &RunConfig, outdir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::InvalidConfig("sweep needs a [sweep] section".into()))?;
    let mut values = sweep.values.clone();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());

    struct Point {
        value: f64,
        rows: Vec<f64>,
        lines: Vec<crate::spectrum::SpectralLine>,
        grid: Vec<(f64, f64)>,
        header: String,
    }
    let points: Vec<Point> = values
        .par_iter()
        .map(|&value| -> Result<Point> {
            let sub = cfg.with_parameter(&sweep.parameter, value)?;
            let (_, sys) = solve_system(&sub)?;
            let rates = rates_for_system(&sub, &sys)?;
            let window = sub.spectrum.n_window.map(|w| -w..=w);
            let lines = assemble(&sys.plus, &rates, sys.omega_l, window);
            let grid = sample(
                &lines,
                sub.spectrum.omega_min,
                sub.spectrum.omega_max,
                sub.spectrum.points,
            );
            let g1 = g1_at_zero(&sys.plus, &rates);
            let (red, blue) = sideband_weights(&lines, 1);
            let rows = vec![
                value,
                fold_zone(sys.eps_plus, sys.omega_l),
                fold_zone(sys.eps_minus, sys.omega_l),
                sys.gap(),
                rates.gamma_rel,
                rates.gamma_deph,
                rates.rho_pp_ss,
                g1,
                red,
                blue,
            ];
            let header = spectrum_header(&sub, "sweep", &sys, &rates);
            Ok(Point {
                value,
                rows,
                lines,
                grid,
                header,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut written = Vec::new();
    let summary_rows: Vec<Vec<f64>> = points.iter().map(|p| p.rows.clone()).collect();
    let header = output::header(
        "sweep",
        &cfg.to_toml(),
        &[("parameter", sweep.parameter.clone())],
    );
    let summary_path = outdir.join("sweep_summary.tsv");
    output::write_table(
        &summary_path,
        &header,
        &[
            "value",
            "eps_plus_folded",
            "eps_minus_folded",
            "gap",
            "gamma_rel",
            "gamma_deph",
            "rho_pp_ss",
            "g1_zero",
            "red_weight_n1",
            "blue_weight_n1",
        ],
        &summary_rows,
    )?;
    written.push(summary_path);
    for (i, p) in points.iter().enumerate() {
        let lines_path = outdir.join(format!("sweep_{i:03}_lines.tsv"));
        output::write_line_catalog(&lines_path, &p.header, &p.lines)?;
        let grid_path = outdir.join(format!("sweep_{i:03}_spectrum.tsv"));
        let rows: Vec<Vec<f64>> = p.grid.iter().map(|&(w, v)| vec![w, v]).collect();
        output::write_table(&grid_path, &p.header, &["omega", "intensity"], &rows)?;
        written.push(lines_path);
        written.push(grid_path);
        let _ = p.value;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn mollow_cfg() -> RunConfig {
        RunConfig::from_toml(
            r#"
[driving]
kind = "harmonic"
amplitude = 0.2
omega_l = 1.0

[[baths]]
kind = "radiative"
kappa = 0.02

[solver]
method = "rwa"

[spectrum]
omega_min = 0.5
omega_max = 1.5
points = 101
"#,
        )
        .unwrap()
    }

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("flospec_run_{tag}_{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn spectrum_command_writes_deterministic_files() {
        let cfg = mollow_cfg();
        let dir = tmpdir("spec");
        let paths = cmd_spectrum(&cfg, &dir).unwrap();
        assert_eq!(paths.len(), 2);
        let first: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let paths2 = cmd_spectrum(&cfg, &dir).unwrap();
        let second: Vec<Vec<u8>> = paths2.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        // Three Mollow lines.
        let catalog = String::from_utf8(first[0].clone()).unwrap();
        let data_lines: Vec<&str> = catalog.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 3);
    }

    #[test]
    fn header_reproduces_run() {
        let cfg = mollow_cfg();
        let dir = tmpdir("hdr");
        let paths = cmd_spectrum(&cfg, &dir).unwrap();
        let text = std::fs::read_to_string(&paths[1]).unwrap();
        let embedded = crate::output::extract_config(&text).unwrap();
        let cfg2 = RunConfig::from_toml(&embedded).unwrap();
        let dir2 = tmpdir("hdr2");
        let paths2 = cmd_spectrum(&cfg2, &dir2).unwrap();
        assert_eq!(
            std::fs::read(&paths[1]).unwrap(),
            std::fs::read(&paths2[1]).unwrap()
        );
    }

    #[test]
    fn compare_command_smoke() {
        let mut cfg = mollow_cfg();
        cfg.solver.method = crate::config::SolverMethod::Sambe;
        cfg.compare = Some(crate::config::CompareConfig {
            a_over_omega_l_min: 0.0,
            a_over_omega_l_max: 1.0,
            points: 5,
        });
        let dir = tmpdir("cmp");
        let paths = cmd_compare(&cfg, &dir).unwrap();
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 5);
        // A = 0 row: all three solvers agree to 1e-10.
        let first: Vec<f64> = rows[0].split('\t').map(|v| v.parse().unwrap()).collect();
        let (gs, gc, gr) = (first[2], first[6], first[10]);
        assert!((gs - gc).abs() < 1e-10 && (gs - gr).abs() < 1e-10);
    }

    #[test]
    fn sweep_command_orders_by_value() {
        let mut cfg = mollow_cfg();
        cfg.sweep = Some(crate::config::SweepConfig {
            parameter: "amplitude".into(),
            values: vec![0.3, 0.1, 0.2],
        });
        let dir = tmpdir("sweep");
        let paths = cmd_sweep(&cfg, &dir).unwrap();
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let values: Vec<f64> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split('\t').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(values, vec![0.1, 0.2, 0.3]);
    }
}

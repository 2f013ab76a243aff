//! The `validate`, `sweep`, `flux` and `recover` commands.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use viscowave_core::bernstein::{default_pick_grid, recover_density, verify_pick, PickSense, RecoverOptions};
use viscowave_core::cpd::{check_cpd_freq, check_cpd_time, default_t_grid, log_grid, Probe};
use viscowave_core::energyflux::{collinear_wave, mean_flux, orthogonal_to, solve_tilted, InhomogeneousWave};
use viscowave_core::linalg::{vdot, CMat};
use viscowave_core::medium::{check_strong_ellipticity, icosphere, RelaxationModel, PSD_TOL};
use viscowave_core::planewave::{
    channel_expected_mass, channel_value, constant_eigvec_check, k_matrix, matrix_wave, modal_solve,
    ScalarChannel,
};

use crate::config::SweepConfig;
use crate::format::sci;
use crate::mediumfile::load_medium;
use crate::CliError;

/// Human-readable outcome of a check run.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub text: String,
    pub pass: bool,
}

pub const PICK_TOL: f64 = 1e-9;
pub const ACUTE_TOL: f64 = 1e-10;
pub const RECOVER_TOL: f64 = 1e-3;
/// Samples for the time-domain CPD check.
pub const CPD_SAMPLES: usize = 64;
const MAX_WITNESS_LINES: usize = 3;

fn status_line(out: &mut String, name: &str, pass: bool, detail: &str) {
    let flag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{name:<20} {flag}  {detail}");
}

/// Strong ellipticity, PSD Prony weights, both CPD routes and the Pick test
/// of `K_n` on the default grid.
pub fn validate_model(model: &RelaxationModel, seed: u64, tol: Option<f64>) -> Report {
    let mut text = String::new();
    let mut pass = true;
    let mut record = |text: &mut String, name: &str, r: Result<(bool, String), viscowave_core::Error>| {
        let (ok, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        pass &= ok;
        status_line(text, name, ok, &detail);
    };

    let dirs = icosphere(2);
    record(
        &mut text,
        "strong_ellipticity",
        check_strong_ellipticity(model, &dirs)
            .map(|r| (r.pass, format!("min_eigenvalue={}", sci(r.min_eigenvalue)))),
    );

    let weights: Vec<f64> = model
        .terms()
        .iter()
        .map(|t| t.modulus.min_voigt_eigenvalue())
        .collect::<Result<_, _>>()
        .unwrap_or_default();
    let wmin = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let detail = if weights.is_empty() {
        "no relaxation terms".to_string()
    } else {
        format!("min_eigenvalue={}", sci(wmin))
    };
    record(&mut text, "prony_weights_psd", Ok((!(wmin < -PSD_TOL), detail)));

    let t_grid = default_t_grid(model, 200);
    let w_grid = log_grid(1e-3, 1e3, 61);
    for (name, r) in [
        ("cpd_time", check_cpd_time(model, CPD_SAMPLES, &t_grid, seed).map(|r| (r.time_domain_pass, r))),
        ("cpd_freq", check_cpd_freq(model, &w_grid).map(|r| (r.freq_domain_pass, r))),
    ] {
        match r {
            Ok((ok, r)) => {
                record(&mut text, name, Ok((ok, format!("worst_margin={}", sci(r.worst_margin)))));
                for w in r.witnesses.iter().take(MAX_WITNESS_LINES) {
                    let probe = match &w.probe {
                        Probe::Strain { direction, t } => format!(
                            "strain [{}] at t={}",
                            direction.map(sci).join(" "),
                            sci(*t)
                        ),
                        Probe::Frequency(om) => format!("omega={}", sci(*om)),
                        Probe::Equilibrium => "equilibrium modulus".to_string(),
                    };
                    let _ = writeln!(text, "  witness: {probe} margin={}", sci(w.margin));
                }
            }
            Err(e) => record(&mut text, name, Err(e)),
        }
    }

    let grid = default_pick_grid();
    let pick_tol = tol.unwrap_or(PICK_TOL);
    let pick = icosphere(0).iter().try_fold((true, f64::INFINITY), |acc, n| {
        let r = verify_pick(|z| k_matrix(model, n, z), &grid, pick_tol, PickSense::Cbf)?;
        Ok((acc.0 && r.pass, acc.1.min(r.worst)))
    });
    record(
        &mut text,
        "pick_k_n",
        pick.map(|(ok, worst)| (ok, format!("worst={}", sci(worst)))),
    );
    Report { text, pass }
}

pub fn cmd_validate(config: &SweepConfig) -> Result<Report, CliError> {
    let model = load_medium(&config.medium)?;
    Ok(validate_model(&model, config.seed, config.tol))
}

pub const SWEEP_HEADER: [&str; 17] = [
    "omega",
    "nx",
    "ny",
    "nz",
    "mode",
    "re_kappa",
    "im_kappa",
    "phase_speed",
    "attenuation",
    "a0",
    "c_eigs_1",
    "c_eigs_2",
    "c_eigs_3",
    "a_eigs_1",
    "a_eigs_2",
    "a_eigs_3",
    "status",
];

fn status_of(e: &viscowave_core::Error) -> String {
    format!("error: {e}")
}

fn sweep_rows(model: &RelaxationModel, omega: f64, n: &[f64; 3]) -> Vec<Vec<String>> {
    let head = |mode: usize| {
        let mut r = vec![sci(omega)];
        r.extend(n.iter().map(|&x| sci(x)));
        r.push(mode.to_string());
        r
    };
    let solved = modal_solve(model, n, omega).and_then(|modes| {
        let d = matrix_wave(model, n, omega)?;
        Ok((modes, d.a0, d.c_eigenvalues()?, d.a_eigenvalues()?))
    });
    match solved {
        Ok((modes, a0, c, a)) => modes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut r = head(i + 1);
                r.extend(
                    [m.kappa.re, m.kappa.im, m.phase_speed, m.attenuation, a0]
                        .into_iter()
                        .chain(c.iter().copied())
                        .chain(a.iter().copied())
                        .map(sci),
                );
                r.push("ok".into());
                r
            })
            .collect(),
        Err(e) => (1..=3)
            .map(|i| {
                let mut r = head(i);
                r.extend(std::iter::repeat_n(sci(f64::NAN), 11));
                r.push(status_of(&e));
                r
            })
            .collect(),
    }
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Modal sweep over the frequency grid (outer) and directions (middle),
/// three rows per pair in ascending phase speed. Rows are computed in
/// parallel and assembled in that fixed order.
pub fn sweep_csv(model: &RelaxationModel, omegas: &[f64], dirs: &[[f64; 3]]) -> String {
    let tasks: Vec<(f64, [f64; 3])> = omegas
        .iter()
        .flat_map(|&w| dirs.iter().map(move |n| (w, *n)))
        .collect();
    let rows: Vec<Vec<Vec<String>>> = tasks
        .par_iter()
        .map(|(w, n)| sweep_rows(model, *w, n))
        .collect();
    to_csv(&SWEEP_HEADER, rows.into_iter().flatten())
}

pub fn cmd_sweep(config: &SweepConfig) -> Result<String, CliError> {
    config.validate()?;
    let model = load_medium(&config.medium)?;
    Ok(sweep_csv(
        &model,
        &config.frequencies.values(),
        &config.directions.directions()?,
    ))
}

pub const FLUX_HEADER: [&str; 18] = [
    "omega",
    "nx",
    "ny",
    "nz",
    "mx",
    "my",
    "mz",
    "mode",
    "alpha",
    "beta",
    "flux_x",
    "flux_y",
    "flux_z",
    "dot_kI",
    "angle_deg",
    "residual",
    "attack_deg",
    "status",
];

/// Largest angle step of the continuation from the collinear wave.
const CONTINUATION_STEP_DEG: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct FluxOutcome {
    pub csv: String,
    pub report: Report,
    pub worst_dot: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub failed: usize,
}

struct FluxRow {
    fields: Vec<String>,
    dot: Option<f64>,
    rejected: bool,
}

fn flux_row(
    model: &RelaxationModel,
    omega: f64,
    n: &[f64; 3],
    mode_idx: usize,
    deg: f64,
) -> FluxRow {
    let t = orthogonal_to(n);
    let wave: viscowave_core::Result<InhomogeneousWave> = modal_solve(model, n, omega).and_then(|modes| {
        let mode = &modes[mode_idx];
        if deg == 0.0 {
            collinear_wave(model, n, omega, mode)
        } else {
            let steps = (deg / CONTINUATION_STEP_DEG).ceil() as usize;
            solve_tilted(model, omega, n, &t, mode, deg.to_radians(), steps)
        }
    });
    let m = viscowave_core::energyflux::tilt(n, &t, deg.to_radians());
    let mut fields = vec![sci(omega)];
    fields.extend(n.iter().chain(&m).map(|&x| sci(x)));
    fields.push((mode_idx + 1).to_string());
    let res = wave.and_then(|w| Ok((mean_flux(model, &w)?, w)));
    match res {
        Ok((f, w)) => {
            let alpha: f64 = (0..3).map(|i| w.k_r[i] * n[i]).sum();
            let beta: f64 = (0..3).map(|i| w.k_i[i] * m[i]).sum();
            let ok = w.accepted(model);
            fields.extend(
                [alpha, beta]
                    .into_iter()
                    .chain(f.mean_flux)
                    .chain([f.dot_ki, f.angle_deg, w.residual, deg])
                    .map(sci),
            );
            fields.push(if ok { "ok".into() } else { "rejected: residual".into() });
            FluxRow {
                fields,
                dot: ok.then_some(f.dot_ki),
                rejected: !ok,
            }
        }
        Err(e) => {
            fields.extend(std::iter::repeat_n(sci(f64::NAN), 8));
            fields.push(sci(deg));
            fields.push(status_of(&e));
            FluxRow {
                fields,
                dot: None,
                rejected: false,
            }
        }
    }
}

/// Flux sweep over frequencies, directions, the three modes and the attack
/// angles between `k_I` and `k_R`; the attenuation direction is tilted from
/// `n` towards a fixed orthogonal vector.
pub fn flux_csv(
    model: &RelaxationModel,
    omegas: &[f64],
    dirs: &[[f64; 3]],
    angles_deg: &[f64],
    tol: f64,
) -> FluxOutcome {
    let mut tasks = Vec::new();
    for &w in omegas {
        for n in dirs {
            for mode in 0..3 {
                for &a in angles_deg {
                    tasks.push((w, *n, mode, a));
                }
            }
        }
    }
    let rows: Vec<FluxRow> = tasks
        .par_iter()
        .map(|(w, n, mode, a)| flux_row(model, *w, n, *mode, *a))
        .collect();
    let mut worst = f64::INFINITY;
    let mut worst_row = 0;
    let (mut accepted, mut rejected, mut failed) = (0, 0, 0);
    for (i, r) in rows.iter().enumerate() {
        match r.dot {
            Some(d) => {
                accepted += 1;
                if d < worst {
                    worst = d;
                    worst_row = i + 1;
                }
            }
            None if r.rejected => rejected += 1,
            None => failed += 1,
        }
    }
    let pass = accepted > 0 && worst >= -tol;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "worst dot_kI = {} (row {worst_row}); {accepted} accepted, {rejected} rejected, {failed} failed",
        sci(worst)
    );
    status_line(&mut text, "acute_angle", pass, &format!("tol={}", sci(tol)));
    FluxOutcome {
        csv: to_csv(&FLUX_HEADER, rows.into_iter().map(|r| r.fields)),
        report: Report { text, pass },
        worst_dot: worst,
        accepted,
        rejected,
        failed,
    }
}

pub fn cmd_flux(config: &SweepConfig) -> Result<FluxOutcome, CliError> {
    config.validate()?;
    let model = load_medium(&config.medium)?;
    Ok(flux_csv(
        &model,
        &config.frequencies.values(),
        &config.directions.directions()?,
        &config.angles_deg,
        config.tol.unwrap_or(ACUTE_TOL),
    ))
}

const CHANNEL_OMEGAS: [f64; 5] = [1e-2, 1e-1, 1.0, 1e1, 1e2];

/// Frequency-independent eigenvectors of `K_n`, slowest first.
pub fn scalar_channels(model: &RelaxationModel, n: &[f64; 3]) -> Result<Vec<ScalarChannel>, CliError> {
    let rep = constant_eigvec_check(model, n, &CHANNEL_OMEGAS, &default_pick_grid())?;
    let mut ch = rep.channels;
    // split[2] is w = 1; larger 1/c is slower
    ch.sort_by(|a, b| b.split[2].1.total_cmp(&a.split[2].1));
    Ok(ch)
}

/// `(q_inf, [(r_k, g_k)])` of the channel `v`: the quadratic forms of the
/// acoustic tensors of each relaxation term.
fn channel_moduli(model: &RelaxationModel, n: &[f64; 3], v: &[Complex64; 3]) -> (f64, Vec<(f64, f64)>) {
    let form = |t: &viscowave_core::medium::SymTensor4| {
        let g = t.contract(n);
        let m = CMat::from_fn(3, |i, j| Complex64::new(g[i][j], 0.0));
        vdot(v, &m.mul_vec(v)).re
    };
    let terms = model.terms().iter().map(|t| (t.rate, form(&t.modulus))).collect();
    (form(model.g_inf()), terms)
}

/// Recovers the measure of a scalar channel on `]a, b]` and compares it
/// with the closed form. `channel` is 1-based, slowest first.
pub fn recover_channel(
    model: &RelaxationModel,
    n: &[f64; 3],
    channel: usize,
    interval: Option<(f64, f64)>,
    tol: f64,
) -> Result<Report, CliError> {
    let channels = scalar_channels(model, n)?;
    if channels.is_empty() {
        return Err(CliError::Physics(format!(
            "no frequency-independent eigenvector of K_n for n = [{}]; a scalar \
             measure exists only for channels whose polarization does not depend \
             on frequency, as for all the plane wave modes in isotropic media",
            n.map(sci).join(" ")
        )));
    }
    let Some(ch) = channel.checked_sub(1).and_then(|i| channels.get(i)) else {
        return Err(CliError::Usage(format!(
            "channel {channel} out of range: {} channel(s) found",
            channels.len()
        )));
    };
    let v = ch.vector;
    let (q_inf, terms) = channel_moduli(model, n, &v);
    let (expected, (z1, r_max)) = channel_expected_mass(model.rho(), q_inf, &terms);
    let (a, b) = match interval {
        Some(ab) => ab,
        None if terms.is_empty() => (0.5, 1.5),
        None => (0.99 * z1, 1.01 * r_max),
    };
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(CliError::Usage(format!("interval must satisfy 0 < a < b, got [{a}, {b}]")));
    }
    let rec = recover_density(
        |z| Ok(CMat::from_diag(&[channel_value(model, n, &v, z)?])),
        a,
        b,
        &RecoverOptions::default(),
    )?;

    let mut text = String::new();
    let _ = writeln!(text, "channels found: {}", channels.len());
    for (i, c) in channels.iter().enumerate() {
        let vs: Vec<String> = c.vector.iter().map(|x| sci(x.norm())).collect();
        let _ = writeln!(
            text,
            "  channel {}: |v| = [{}], drift = {}",
            i + 1,
            vs.join(" "),
            sci(c.drift)
        );
    }
    let _ = writeln!(text, "interval: ]{}, {}]", sci(a), sci(b));
    let _ = writeln!(text, "recovered mass: {}", sci(rec.trace));
    let covers = terms.is_empty() || (a < z1 && b >= r_max);
    let pass = if covers {
        let diff = (rec.trace - expected).abs();
        let ok = diff <= tol * expected.max(1.0);
        let _ = writeln!(
            text,
            "expected mass: {} (support [{}, {}]), difference {}",
            sci(expected),
            sci(z1),
            sci(r_max),
            sci(diff)
        );
        status_line(&mut text, "recovery", ok, &format!("tol={}", sci(tol)));
        ok
    } else {
        let _ = writeln!(
            text,
            "expected total mass {} lies on [{}, {}], not inside the interval; no comparison",
            sci(expected),
            sci(z1),
            sci(r_max)
        );
        true
    };
    Ok(Report { text, pass })
}

pub fn cmd_recover(
    config: &SweepConfig,
    n: &[f64; 3],
    channel: usize,
    interval: Option<(f64, f64)>,
) -> Result<Report, CliError> {
    let model = load_medium(&config.medium)?;
    let dirs = crate::config::DirectionSpec::List(vec![*n]).directions()?;
    recover_channel(&model, &dirs[0], channel, interval, config.tol.unwrap_or(RECOVER_TOL))
}

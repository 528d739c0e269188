//! The five subcommands, as functions from a scenario to output text.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anece_core::capacity::{entropy_curve, phase1_curve};
use anece_core::dofcalc::{
    modified_report, network_report, pairwise_k2_session, DofScenario, Scheme,
};
use anece_core::numkernel::linalg::rank;
use anece_core::pilots::{
    build_pairwise_matrix, build_pilots, build_square_pilots, matrix_to_text, random_session_blocks,
};
use anece_core::verify::{
    compare_schemes, default_slope_tolerance, eig_growth_suite, identity_suite,
    identity_suite_tampered, modified_slope_suite, network_slope_suite, rank_oracle_suite,
    verify_slope, IdentityGrid,
};
use anece_core::{CheckResult, DofReport, NetworkConfig};

use crate::error::CliError;
use crate::output::{format_number, report_json, write_checks, write_table};
use crate::scenario::{Scenario, Setup};

/// Below this many Monte Carlo samples slope rows get noisy enough to flake.
pub const MIN_MC_SAMPLES: usize = 100;

/// Draws per rank-oracle check.
pub const RANK_DRAWS: usize = 100;

/// Name prefix of rows that are supposed to fail.
pub const NEGATIVE_CONTROL_PREFIX: &str = "negctl/";

/// Identity broken on purpose by the identity negative control.
pub const TAMPERED_IDENTITY: &str = "gap_consistency";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    ChecksFailed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::ChecksFailed => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// formula

pub fn report_for(scheme: Scheme, setup: &Setup) -> Result<DofReport, CliError> {
    Ok(match setup {
        Setup::Network { cfg, pair } => {
            network_report(scheme, &DofScenario::new(cfg.clone(), pair.0, pair.1)?)?
        }
        Setup::TwoUser(c) => modified_report(c)?,
    })
}

/// One JSON line.
pub fn cmd_formula(sc: &Scenario) -> Result<String, CliError> {
    Ok(report_json(&report_for(sc.scheme, &sc.setup)?)? + "\n")
}

// ---------------------------------------------------------------------------
// verify

pub fn is_negative_control(c: &CheckResult) -> bool {
    c.name.starts_with(NEGATIVE_CONTROL_PREFIX)
}

/// Regular rows must pass and negative controls must fail.
pub fn verification_status(rows: &[CheckResult]) -> Status {
    let ok = rows.iter().all(|c| c.passed != is_negative_control(c));
    if ok {
        Status::Success
    } else {
        Status::ChecksFailed
    }
}

fn negated(mut c: CheckResult, name: &str) -> CheckResult {
    c.name = format!("{NEGATIVE_CONTROL_PREFIX}{name}");
    c
}

/// Every check for the scenario, sorted by name.
///
/// `tamper` breaks the named identity in the regular identity rows.
pub fn verification_rows(
    sc: &Scenario,
    tamper: Option<&str>,
) -> Result<Vec<CheckResult>, CliError> {
    let grid = &sc.snr_grid;
    let (n, seed) = (sc.mc_samples, sc.seed);
    let mut rows = Vec::new();
    let slope_pilot = match &sc.setup {
        Setup::Network { cfg, pair } => {
            // pair-wise sessions are two-user networks with k_2 = K_2/P_0
            let (sub, sub_pair) = if sc.scheme == Scheme::Pairwise {
                let k2s = pairwise_k2_session(cfg.m(), cfg.k2)?;
                let ants = vec![cfg.antennas[pair.0], cfg.antennas[pair.1]];
                (NetworkConfig::new(ants, cfg.n_eve, k2s), (0, 1))
            } else {
                (cfg.clone(), *pair)
            };
            let ps = build_pilots(&sub, seed)?;
            rows.extend(network_slope_suite(&sub, &ps, sub_pair, grid, n, seed)?);
            rows.extend(eig_growth_suite(&sub, &ps)?);
            rows.extend(rank_oracle_suite(cfg, seed, RANK_DRAWS)?);
            Some((
                ps,
                sub_pair,
                sub.antennas[sub_pair.0] * sub.antennas[sub_pair.1],
            ))
        }
        Setup::TwoUser(c) => {
            rows.extend(modified_slope_suite(c, grid, n, seed)?);
            rows.extend(rank_oracle_suite(&c.network(), seed, RANK_DRAWS)?);
            None
        }
    };
    let igrid = IdentityGrid::default();
    rows.extend(match tamper {
        Some(name) => identity_suite_tampered(&igrid, name)?,
        None => identity_suite(&igrid),
    });

    // negative controls
    let wrong = match slope_pilot {
        Some((ps, (i, j), dof)) => {
            let target = dof as i64 + 1;
            let curve = phase1_curve(&ps, i, j, grid)?;
            verify_slope("", &curve, target, default_slope_tolerance(target as f64))?
        }
        None => {
            let curve = entropy_curve(1, 1, 1, grid, n, seed)?;
            verify_slope("", &curve, 2, default_slope_tolerance(2.0))?
        }
    };
    rows.push(negated(wrong, "slope_wrong_target"));
    let tampered = identity_suite_tampered(&igrid, TAMPERED_IDENTITY)?
        .into_iter()
        .find(|c| c.name.ends_with(TAMPERED_IDENTITY))
        .expect("tampered identity is in the manifest");
    rows.push(negated(tampered, "identity_tampered"));

    rows.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(rows)
}

/// CSV report and the resulting status.
pub fn cmd_verify(
    sc: &Scenario,
    tamper: Option<&str>,
    allow_low_samples: bool,
) -> Result<(String, Status), CliError> {
    if sc.mc_samples < MIN_MC_SAMPLES && !allow_low_samples {
        return Err(CliError::Usage(format!(
            "mc_samples = {} is below {MIN_MC_SAMPLES}; slope rows would be unreliable (pass --allow-low-samples to run anyway)",
            sc.mc_samples
        )));
    }
    let rows = verification_rows(sc, tamper)?;
    let mut buf = Vec::new();
    write_checks(&mut buf, &rows)?;
    Ok((
        String::from_utf8(buf).expect("csv is utf-8"),
        verification_status(&rows),
    ))
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    #[value(name = "n_eve")]
    NEve,
    #[value(name = "k2")]
    K2,
    #[value(name = "m")]
    M,
    /// Coherence length K of the modified scheme.
    #[value(name = "k")]
    K,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::NEve => "n_eve",
            Axis::K2 => "k2",
            Axis::M => "m",
            Axis::K => "k",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive integer range written `A..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for AxisRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad bound `{t}`"))
        };
        let (start, end) = (parse(a)?, parse(b)?);
        if start > end {
            return Err(format!("empty range `{s}`"));
        }
        Ok(Self { start, end })
    }
}

fn setup_at(sc: &Scenario, axis: Axis, v: usize) -> Result<Setup, CliError> {
    let mismatch = || {
        CliError::Usage(format!(
            "axis `{axis}` does not apply to scheme {}",
            sc.scheme
        ))
    };
    Ok(match (&sc.setup, axis) {
        (Setup::Network { cfg, pair }, Axis::NEve | Axis::K2 | Axis::M) => {
            let mut cfg = cfg.clone();
            match axis {
                Axis::NEve => cfg.n_eve = v,
                Axis::K2 => cfg.k2 = v,
                _ => {
                    let n = cfg.antennas[0];
                    if cfg.antennas.iter().any(|&a| a != n) {
                        return Err(CliError::Usage("axis `m` needs a symmetric network".into()));
                    }
                    cfg = NetworkConfig::symmetric(v, n, cfg.n_eve, cfg.k2);
                }
            }
            cfg.check()?;
            if pair.0.max(pair.1) >= cfg.m() {
                return Err(CliError::Usage(format!(
                    "pair does not exist for M = {}",
                    cfg.m()
                )));
            }
            Setup::Network { cfg, pair: *pair }
        }
        (Setup::TwoUser(c), Axis::NEve | Axis::K) => {
            let mut c = *c;
            if axis == Axis::NEve {
                c.n_eve = v;
            } else {
                c.k_total = v;
            }
            c.check()?;
            Setup::TwoUser(c)
        }
        _ => return Err(mismatch()),
    })
}

/// One row per axis value: the axis column then every formula key, sorted.
pub fn cmd_sweep(sc: &Scenario, axis: Axis, range: AxisRange) -> Result<String, CliError> {
    let reports = (range.start..=range.end)
        .map(|v| Ok((v, report_for(sc.scheme, &setup_at(sc, axis, v)?)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let keys: Vec<&str> = reports[0].1.entries.keys().map(String::as_str).collect();
    let mut header = vec![axis.as_str()];
    header.extend(&keys);
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|(v, r)| {
            std::iter::once(v.to_string())
                .chain(
                    keys.iter()
                        .map(|k| r.get(k).map_or_else(String::new, |x| x.to_string())),
                )
                .collect()
        })
        .collect();
    let mut buf = Vec::new();
    write_table(&mut buf, &header, &rows)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

// ---------------------------------------------------------------------------
// pilots

fn audit_line(label: &str, got: usize, want: usize, ok: &mut bool) -> String {
    if got == want {
        format!("rank({label})={got} OK")
    } else {
        *ok = false;
        format!("rank({label})={got} FAIL (expected {want})")
    }
}

/// `dir/name.ext` → `dir/name_<suffix>.ext`.
pub fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "pilots".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

/// Writes pilot matrix files and returns the rank audit.
pub fn cmd_pilots(sc: &Scenario, out: &Path) -> Result<(String, Status), CliError> {
    let mut ok = true;
    let mut lines = Vec::new();
    match (&sc.setup, sc.scheme) {
        (Setup::Network { cfg, .. }, Scheme::Pairwise) => {
            let k1 = cfg.antennas.iter().copied().max().unwrap_or(0);
            let blocks = random_session_blocks(cfg, k1, sc.seed)?;
            let pp = build_pairwise_matrix(cfg, &blocks)?;
            std::fs::write(out, matrix_to_text(&pp.matrix))?;
            lines.push(format!(
                "wrote {} ({}×{})",
                out.display(),
                pp.matrix.nrows(),
                pp.matrix.ncols()
            ));
            lines.push(audit_line(
                "P_pair",
                rank(&pp.matrix),
                cfg.n_total(),
                &mut ok,
            ));
        }
        (Setup::Network { cfg, .. }, _) => {
            let ps = build_pilots(cfg, sc.seed)?;
            std::fs::write(out, matrix_to_text(&ps.stacked))?;
            lines.push(format!(
                "wrote {} ({}×{})",
                out.display(),
                ps.stacked.nrows(),
                ps.stacked.ncols()
            ));
            let nt = cfg.n_total();
            for (i, b) in ps.blocks.iter().enumerate() {
                lines.push(audit_line(
                    &format!("P_{}", i + 1),
                    rank(b),
                    cfg.antennas[i],
                    &mut ok,
                ));
            }
            for i in 0..cfg.m() {
                let want = nt - cfg.antennas[i];
                lines.push(audit_line(
                    &format!("P_({})", i + 1),
                    rank(&ps.without(i)),
                    want,
                    &mut ok,
                ));
            }
            lines.push(audit_line(
                "P",
                rank(&ps.stacked),
                cfg.pilot_rank(),
                &mut ok,
            ));
        }
        (Setup::TwoUser(c), _) => {
            let pp = build_square_pilots(c, sc.seed)?;
            for (label, m, want) in [("P1", &pp.p1, c.n1), ("P2", &pp.p2, c.n2)] {
                let path = suffixed(out, &label.to_lowercase());
                std::fs::write(&path, matrix_to_text(m))?;
                lines.push(format!(
                    "wrote {} ({}×{})",
                    path.display(),
                    m.nrows(),
                    m.ncols()
                ));
                lines.push(audit_line(label, rank(m), want, &mut ok));
            }
        }
    }
    let status = if ok {
        Status::Success
    } else {
        Status::ChecksFailed
    };
    Ok((lines.join("\n") + "\n", status))
}

// ---------------------------------------------------------------------------
// compare

pub const COMPARE_HEADER: [&str; 6] = [
    "scheme",
    "phase1_dof",
    "phase2_dof",
    "total_dof",
    "phase1_slots",
    "phase2_slots",
];

pub fn cmd_compare(sc: &Scenario) -> Result<String, CliError> {
    let cfg = sc.network();
    let table = compare_schemes(&cfg, cfg.k2)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.scheme.to_string(),
                format_number(r.phase1_dof as f64),
                format_number(r.phase2_dof as f64),
                format_number(r.total_dof as f64),
                r.phase1_slots.to_string(),
                r.phase2_slots.to_string(),
            ]
        })
        .collect();
    let mut buf = Vec::new();
    write_table(&mut buf, &COMPARE_HEADER, &rows)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

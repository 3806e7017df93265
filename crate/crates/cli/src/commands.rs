use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lenscount_core::constructions::{
    add_mass, circle_config, perturbed_rhie_config, poly_example, random_config, rhie_config, ConstructionResult,
};
use lenscount_core::scanner::{default_palette, export_csv, render, scan as scan_map};
use lenscount_core::timedelay::petters_check_with;
use lenscount_core::{certify as certify_report, solve as solve_field, Error, Execution, MassConfig};
use num_complex::Complex64;

use crate::documents::{
    read_json, to_json, BoundsVerdict, ConstructDocument, Problem, RunConfig, ScanConfig, ScanSummary, SolveDocument,
    Status, TimeDelayDocument, TimeDelayEntry, FORMAT_VERSION,
};
use crate::{Family, ToleranceFlags, EXIT_OK, EXIT_UNCERTIFIED};

/// Side of the square in which sweep configurations place their masses.
const SWEEP_BOX_RADIUS: f64 = 1.0;

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Certified | Status::Solved => EXIT_OK,
        Status::NonSimple | Status::Uncertified => EXIT_UNCERTIFIED,
    }
}

fn load_config(path: &Path, flags: ToleranceFlags) -> anyhow::Result<RunConfig> {
    let mut config: RunConfig = read_json(path)?;
    if let Some(tol) = flags.tol {
        config.tolerances.tol = tol;
    }
    if let Some(sing_tol) = flags.sing_tol {
        config.tolerances.sing_tol = sing_tol;
    }
    config.tolerances.validate()?;
    Ok(config)
}

/// Certifies `report` unless it is already known not to be simple.
fn assess(config: RunConfig, report: lenscount_core::SolveReport, certify: bool) -> anyhow::Result<SolveDocument> {
    let field = config.problem.field()?;
    let (status, certificate, message) = if !report.simple {
        let msg = "a zero is singular or two zeros are not separated".to_string();
        (Status::NonSimple, None, Some(msg))
    } else if certify {
        match certify_report(&field, &report, None) {
            Ok(c) => (Status::Certified, Some(c), None),
            Err(Error::NonSimple(msg)) => (Status::NonSimple, None, Some(msg)),
            Err(e) => (Status::Uncertified, None, Some(e.to_string())),
        }
    } else {
        (Status::Solved, None, None)
    };
    if let Some(msg) = &message {
        eprintln!("{}: {msg}", serde_json::to_value(status)?.as_str().unwrap_or("failed"));
    }
    Ok(SolveDocument {
        format_version: FORMAT_VERSION,
        status,
        k: report.k(),
        theorem_bounds: BoundsVerdict::new(config.problem.bounds_kind(), report.degree_n, report.k()),
        config,
        report,
        certificate,
        message,
    })
}

pub fn solve(config_path: &Path, out: Option<&Path>, flags: ToleranceFlags) -> anyhow::Result<i32> {
    let config = load_config(config_path, flags)?;
    let field = config.problem.field()?;
    let report = solve_field(&field, &config.tolerances.options())?;
    let certify = config.certify;
    let doc = assess(config, report, certify)?;
    write_output(out, &to_json(&doc))?;
    Ok(status_code(doc.status))
}

pub fn certify(
    config_path: &Path,
    report_path: Option<&Path>,
    out: Option<&Path>,
    flags: ToleranceFlags,
) -> anyhow::Result<i32> {
    let config = load_config(config_path, flags)?;
    let report = match report_path {
        Some(path) => {
            let doc: SolveDocument = read_json(path)?;
            if doc.config.problem != config.problem {
                bail!(
                    "{} reports on a different equation than {}",
                    path.display(),
                    config_path.display()
                );
            }
            doc.report
        }
        None => solve_field(&config.problem.field()?, &config.tolerances.options())?,
    };
    let doc = assess(config, report, true)?;
    write_output(out, &to_json(&doc))?;
    Ok(status_code(doc.status))
}

#[derive(Debug, Clone)]
pub struct ConstructRequest {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub radius: Option<f64>,
    pub eps: Option<f64>,
    pub at: Option<Complex64>,
    pub base: Option<PathBuf>,
}

impl ConstructRequest {
    fn sizes<const N: usize>(&self, usage: &str) -> anyhow::Result<[usize; N]> {
        self.sizes
            .as_slice()
            .try_into()
            .map_err(|_| anyhow::anyhow!("usage: construct {usage}"))
    }

    fn build(&self) -> anyhow::Result<ConstructionResult> {
        let result = match self.family {
            Family::Circle => {
                let [n] = self.sizes("circle N [--radius A]")?;
                circle_config(n, self.radius)
            }
            Family::Rhie => {
                let [m] = self.sizes("rhie M [--eps E]")?;
                rhie_config(m, self.eps)
            }
            Family::Perturbed => {
                let [m] = self.sizes("perturbed M")?;
                perturbed_rhie_config(m)
            }
            Family::Poly => {
                let [n, k] = self.sizes("poly N K")?;
                poly_example(n, k)
            }
            Family::Addmass => {
                let usage = "addmass --config BASE --at RE,IM [--eps E]";
                let [] = self.sizes(usage)?;
                let (Some(base), Some(at)) = (&self.base, self.at) else {
                    bail!("usage: construct {usage}");
                };
                let config: RunConfig = read_json(base)?;
                let Problem::Masses(cfg) = config.problem else {
                    bail!("addmass needs a masses configuration");
                };
                add_mass(&cfg, at, self.eps)
            }
        };
        Ok(result?)
    }
}

pub fn construct(req: &ConstructRequest, out: Option<&Path>, config_out: Option<&Path>) -> anyhow::Result<i32> {
    let result = match req.build() {
        Ok(r) => r,
        Err(err) => {
            if let Some(Error::ValidationFailed { reason, trace }) = err.downcast_ref::<Error>() {
                eprintln!("validation failed: {reason}");
                for step in trace {
                    eprintln!("  {step}");
                }
                return Ok(EXIT_UNCERTIFIED);
            }
            return Err(err);
        }
    };
    let config = RunConfig::new(Problem::from(result.config));
    let kind = config.problem.bounds_kind();
    let doc = ConstructDocument {
        format_version: FORMAT_VERSION,
        family: format!("{:?}", req.family).to_lowercase(),
        expected_k: result.expected_k,
        params_used: result.params_used,
        status: Status::Certified,
        k: result.report.k(),
        theorem_bounds: BoundsVerdict::new(kind, result.report.degree_n, result.report.k()),
        report: result.report,
        certificate: result.certificate,
        config,
    };
    if let Some(path) = config_out {
        write_output(Some(path), &to_json(&doc.config))?;
    }
    write_output(out, &to_json(&doc))?;
    Ok(EXIT_OK)
}

pub fn scan(config_path: &Path, out: Option<&Path>, resolution: Option<(usize, usize)>) -> anyhow::Result<i32> {
    let mut config: ScanConfig = read_json(config_path)?;
    if let Some(res) = resolution {
        config.resolution = res;
    }
    let spec = config.spec()?;
    let map = scan_map(&spec)?;
    let prefix = out.map_or_else(|| config_path.with_extension(""), Path::to_path_buf);

    write_output(Some(&with_suffix(&prefix, ".csv")), &export_csv(&map))?;
    let pixmap = render(&map, &default_palette())?;
    let ppm = with_suffix(&prefix, ".ppm");
    std::fs::write(&ppm, pixmap).with_context(|| format!("cannot write {}", ppm.display()))?;
    let summary = ScanSummary {
        format_version: FORMAT_VERSION,
        cells: map.cells.len(),
        histogram: map.histogram.clone(),
        non_simple: map.non_simple,
        excluded: map.excluded,
    };
    write_output(Some(&with_suffix(&prefix, ".summary.json")), &to_json(&summary))?;

    let mut stdout = std::io::stdout().lock();
    for (count, cells) in &map.histogram {
        writeln!(stdout, "{count} images: {cells} cells")?;
    }
    writeln!(stdout, "non-simple: {} cells", map.non_simple)?;
    writeln!(stdout, "excluded: {} cells", map.excluded)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub struct TimeDelayRequest {
    pub config: Option<PathBuf>,
    pub sweep: Option<usize>,
    pub seed: Option<u64>,
    pub masses: Option<usize>,
    pub grid: usize,
}

pub fn timedelay(req: &TimeDelayRequest, out: Option<&Path>, flags: ToleranceFlags) -> anyhow::Result<i32> {
    if req.grid < 2 {
        bail!("grid must have at least 2 points per side");
    }
    let (configs, opts): (Vec<(Option<u64>, MassConfig)>, _) = match (&req.config, req.sweep) {
        (Some(path), None) => {
            let config = load_config(path, flags)?;
            let Problem::Masses(cfg) = config.problem else {
                bail!("timedelay needs a masses configuration");
            };
            (vec![(None, cfg)], config.tolerances.options())
        }
        (None, Some(0)) => bail!("--sweep needs at least one configuration"),
        (None, Some(count)) => {
            let Some(seed) = req.seed else {
                bail!("--sweep needs an explicit --seed");
            };
            let mut tolerances = crate::documents::Tolerances::default();
            tolerances.tol = flags.tol.unwrap_or(tolerances.tol);
            tolerances.sing_tol = flags.sing_tol.unwrap_or(tolerances.sing_tol);
            tolerances.validate()?;
            let configs = (0..count as u64)
                .map(|i| {
                    let n = req.masses.unwrap_or(2 + (i % 4) as usize);
                    Ok((Some(seed + i), random_config(n, seed + i, SWEEP_BOX_RADIUS)?))
                })
                .collect::<lenscount_core::Result<Vec<_>>>()?;
            (configs, tolerances.options())
        }
        _ => bail!("timedelay needs either --config or --sweep with --seed"),
    };

    let sweep = req.sweep.is_some();
    let mut doc = TimeDelayDocument {
        format_version: FORMAT_VERSION,
        grid: req.grid,
        entries: Vec::with_capacity(configs.len()),
        passed: 0,
        failed: 0,
        skipped: 0,
    };
    for (seed, cfg) in configs {
        match petters_check_with(&cfg, &opts, req.grid, Execution::default()) {
            Ok(rep) => {
                if rep.passed {
                    doc.passed += 1;
                } else {
                    doc.failed += 1;
                }
                doc.entries.push(TimeDelayEntry {
                    seed,
                    config: cfg,
                    passed: rep.passed,
                    petters: Some(rep),
                    error: None,
                });
            }
            Err(err) => {
                if sweep && matches!(err, Error::NonSimple(_)) {
                    doc.skipped += 1;
                } else {
                    eprintln!("{err}");
                    doc.failed += 1;
                }
                doc.entries.push(TimeDelayEntry {
                    seed,
                    config: cfg,
                    passed: false,
                    petters: None,
                    error: Some(err.to_string()),
                });
            }
        }
    }
    write_output(out, &to_json(&doc))?;
    if sweep {
        eprintln!(
            "{} passed, {} failed, {} skipped as not simple",
            doc.passed, doc.failed, doc.skipped
        );
    }
    Ok(if doc.failed == 0 && doc.passed > 0 {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    })
}

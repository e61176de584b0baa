//! The work behind each subcommand, as replayable parameter sets.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use latic::channel::{class_h1_membership, ratio_product, DEFAULT_MAX_DEN, DEFAULT_TOL};
use latic::rates::symmetric::Regime;
use latic::rates::{
    dof_symmetric, hk_sym_rate, nonsym_sweep, sym_rate_lattice_hk, very_strong_conditions, very_strong_general,
    ConditionSet,
};
use latic::sim::{alignment_report, simulate, PlacementCheck, SimConfig, SimRecord};
use latic::{ChannelMatrix3, RateReport, Witness};

use crate::table::{csv, json, num};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DofCurve {
    pub a2_min: f64,
    pub a2_max: f64,
    pub steps: usize,
    pub log_axis: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymRateCompare {
    pub a: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub hk_grid: usize,
}

/// Channel matrix file, optionally with the powers and noise variances
/// used to test the gain conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub h: [[f64; 3]; 3],
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_den")]
    pub max_den: i64,
    #[serde(default)]
    pub powers: Option<[f64; 3]>,
    #[serde(default = "unit_noise")]
    pub sigma2: [f64; 3],
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_den() -> i64 {
    DEFAULT_MAX_DEN
}
fn unit_noise() -> [f64; 3] {
    [1.0; 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignCheck {
    pub matrix: MatrixFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulate {
    pub configs: Vec<SimConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DofNonsym {
    pub gains: [f64; 3],
    pub n_max: usize,
}

/// A fully resolved command: everything needed to reproduce its output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Job {
    DofCurve(DofCurve),
    SymRateCompare(SymRateCompare),
    AlignCheck(AlignCheck),
    Simulate(Simulate),
    DofNonsym(DofNonsym),
}

/// Rendered output plus messages for stderr.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
}

impl Job {
    pub fn default_format(&self) -> Format {
        match self {
            Job::AlignCheck(_) | Job::Simulate(_) => Format::Json,
            _ => Format::Csv,
        }
    }

    pub fn run(&self, format: Format) -> Result<Output, CliError> {
        match self {
            Job::DofCurve(j) => j.run(format),
            Job::SymRateCompare(j) => j.run(format),
            Job::AlignCheck(j) => j.run(format),
            Job::Simulate(j) => j.run(format),
            Job::DofNonsym(j) => j.run(format),
        }
    }
}

fn finite_positive(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::validation(format!("{name} must be positive, got {x}")))
    }
}

/// `steps` points from `lo` to `hi`, endpoints exact.
pub fn grid(lo: f64, hi: f64, steps: usize, log: bool) -> Vec<f64> {
    if steps <= 1 || lo == hi {
        return vec![lo];
    }
    (0..steps)
        .map(|i| {
            if i == 0 {
                return lo;
            }
            if i == steps - 1 {
                return hi;
            }
            let t = i as f64 / (steps - 1) as f64;
            if log {
                let (l, h) = (lo.log10(), hi.log10());
                10f64.powf(l + (h - l) * t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect()
}

#[derive(Serialize)]
struct CurveRow {
    param: f64,
    value: f64,
    scheme: &'static str,
}

impl DofCurve {
    fn run(&self, format: Format) -> Result<Output, CliError> {
        finite_positive("a2_min", self.a2_min)?;
        finite_positive("a2_max", self.a2_max)?;
        if self.a2_min >= self.a2_max {
            return Err(CliError::validation("a2_min must be below a2_max"));
        }
        if self.steps < 2 {
            return Err(CliError::validation("steps must be at least 2"));
        }
        let rows = grid(self.a2_min, self.a2_max, self.steps, self.log_axis)
            .into_iter()
            .map(|a2| {
                Ok(CurveRow {
                    param: a2,
                    value: dof_symmetric(a2)?,
                    scheme: "layered-lattice",
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let text = match format {
            Format::Csv => csv(
                &["param", "value", "scheme"],
                rows.iter().map(|r| vec![num(r.param), num(r.value), r.scheme.to_string()]),
            )?,
            Format::Json => json(&serde_json::json!({ "rows": rows })),
        };
        Ok(Output {
            text,
            warnings: vec![],
        })
    }
}

#[derive(Serialize)]
struct CompareRow {
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "R_lattice")]
    lattice: f64,
    #[serde(rename = "R_HK")]
    hk: f64,
    binding_constraint: String,
}

/// Smallest sampled power from which the lattice rate is never below the
/// HK rate.
fn crossover(rows: &[CompareRow]) -> Option<f64> {
    let mut from = None;
    for r in rows.iter().rev() {
        if r.lattice + 1e-12 >= r.hk {
            from = Some(r.p);
        } else {
            break;
        }
    }
    from
}

impl SymRateCompare {
    fn run(&self, format: Format) -> Result<Output, CliError> {
        finite_positive("a", self.a.abs())?;
        finite_positive("p_min", self.p_min)?;
        finite_positive("p_max", self.p_max)?;
        if self.p_min > self.p_max {
            return Err(CliError::validation("p_min must not exceed p_max"));
        }
        if self.steps == 0 || self.hk_grid < 2 {
            return Err(CliError::validation("steps must be at least 1 and hk_grid at least 2"));
        }
        let a2 = self.a * self.a;
        let rows = grid(self.p_min, self.p_max, self.steps, true)
            .into_iter()
            .map(|p| {
                let lat = sym_rate_lattice_hk(a2, p, self.hk_grid)?;
                Ok(CompareRow {
                    p,
                    lattice: lat.symmetric_rate(),
                    hk: hk_sym_rate(p, 1.0, self.a, self.hk_grid),
                    binding_constraint: lat.binding_constraint,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let cross = crossover(&rows);
        let mut warnings = vec![];
        let band = Regime::of(a2) == Regime::Band;
        let band_note = "a^2 lies strictly between 1/3 and 2: the lattice column repeats the HK rate";
        if band {
            warnings.push(band_note.to_string());
        }
        match cross {
            Some(p) => warnings.push(format!("lattice rate at or above HK rate for P >= {}", num(p))),
            None => warnings.push("lattice rate below HK rate at the largest sampled P".into()),
        }
        let text = match format {
            Format::Csv => {
                let mut out = Vec::with_capacity(rows.len() + 1);
                if band {
                    out.push(vec![format!("warning: {band_note}"), String::new(), String::new()]);
                }
                out.extend(rows.iter().map(|r| vec![num(r.p), num(r.lattice), num(r.hk)]));
                csv(&["P", "R_lattice", "R_HK"], out)?
            }
            Format::Json => json(&serde_json::json!({
                "a": self.a,
                "rows": rows,
                "crossover": cross,
                "warning": band.then_some(band_note),
            })),
        };
        Ok(Output { text, warnings })
    }
}

#[derive(Serialize)]
struct AlignReport {
    member: bool,
    ratio_product: f64,
    witness: Option<Witness>,
    /// Which of the three gain-condition sets hold, when powers are given.
    condition_sets: Option<[bool; 3]>,
    condition_set: Option<ConditionSet>,
    rates: Option<RateReport>,
    placement: Option<ConditionSet>,
    scale_factors: Option<[f64; 3]>,
    residuals: Option<[f64; 3]>,
    placements: Vec<PlacementCheck>,
}

impl AlignCheck {
    fn run(&self, format: Format) -> Result<Output, CliError> {
        if format == Format::Csv {
            return Err(CliError::validation("align-check writes JSON only"));
        }
        let m = &self.matrix;
        finite_positive("tol", m.tol)?;
        if m.max_den < 1 {
            return Err(CliError::validation("max_den must be at least 1"));
        }
        let witness = class_h1_membership(&m.h, m.tol, m.max_den)?;
        let ch = ChannelMatrix3 { h: m.h, witness };
        let placements = match witness {
            Some(_) => alignment_report(&ch)?.to_vec(),
            None => vec![],
        };
        let (mut condition_sets, mut condition_set, mut rates) = (None, None, None);
        if let (Some(w), Some(powers)) = (witness, m.powers) {
            condition_sets = Some(very_strong_conditions(&ch, powers, m.sigma2, w.p, w.q));
            if let Some((report, set)) = very_strong_general(&ch, powers, m.sigma2)? {
                condition_set = Some(set);
                rates = Some(report);
            }
        }
        let chosen = witness.map(|_| condition_set.unwrap_or(ConditionSet::One));
        let check = chosen.and_then(|set| placements.iter().find(|c| c.placement == set));
        let report = AlignReport {
            member: witness.is_some(),
            ratio_product: ratio_product(&m.h),
            witness,
            condition_sets,
            condition_set,
            rates,
            placement: chosen,
            scale_factors: check.map(|c| c.scales),
            residuals: check.map(|c| c.residuals),
            placements,
        };
        Ok(Output {
            text: json(&report),
            warnings: vec![],
        })
    }
}

impl Simulate {
    fn run(&self, format: Format) -> Result<Output, CliError> {
        if self.configs.is_empty() {
            return Err(CliError::validation("config file holds no runs"));
        }
        let mut records = Vec::with_capacity(self.configs.len());
        for cfg in &self.configs {
            cfg.validate()?;
            let stats = simulate(cfg)?;
            records.push(SimRecord::new(cfg, &stats));
        }
        let text = match format {
            Format::Json => records.iter().map(|r| r.to_json_line() + "\n").collect(),
            Format::Csv => csv(
                &[
                    "config_hash",
                    "scheme",
                    "n",
                    "trials",
                    "block_errors",
                    "block_error",
                    "wilson_lo",
                    "wilson_hi",
                    "alignment_violations",
                    "seed",
                ],
                records.iter().map(|r| {
                    vec![
                        r.config_hash.clone(),
                        r.scheme.name().to_string(),
                        r.n.to_string(),
                        r.trials.to_string(),
                        r.block_errors.to_string(),
                        num(r.block_error),
                        num(r.wilson[0]),
                        num(r.wilson[1]),
                        r.alignment_violations.to_string(),
                        r.seed.to_string(),
                    ]
                }),
            )?,
        };
        Ok(Output {
            text,
            warnings: vec![],
        })
    }
}

#[derive(Serialize)]
struct NonsymRow {
    #[serde(rename = "N")]
    layers: usize,
    sum_rate: Option<f64>,
    total_power: Option<f64>,
    dof_estimate: Option<f64>,
    status: &'static str,
}

impl DofNonsym {
    fn run(&self, format: Format) -> Result<Output, CliError> {
        for (j, &a) in self.gains.iter().enumerate() {
            if !(a.is_finite() && a * a >= 2.0) {
                return Err(CliError::validation(format!("a{} must satisfy a^2 >= 2, got {a}", j + 1)));
            }
        }
        if self.n_max == 0 {
            return Err(CliError::validation("n_max must be at least 1"));
        }
        let sweep = nonsym_sweep(self.gains, self.n_max)?;
        let mut rows: Vec<NonsymRow> = sweep
            .points
            .iter()
            .map(|p| NonsymRow {
                layers: p.layers,
                sum_rate: Some(p.sum_rate),
                total_power: Some(p.total_power),
                dof_estimate: Some(p.dof_estimate),
                status: "ok",
            })
            .collect();
        let mut warnings = vec![];
        for n in sweep.points.len() + 1..=self.n_max {
            warnings.push(format!("N = {n}: stage powers overflow"));
            rows.push(NonsymRow {
                layers: n,
                sum_rate: None,
                total_power: None,
                dof_estimate: None,
                status: "overflow",
            });
        }
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        let text = match format {
            Format::Csv => csv(
                &["N", "sum_rate", "total_power", "dof_estimate", "dof_numeric", "status"],
                rows.iter().map(|r| {
                    vec![
                        r.layers.to_string(),
                        opt(r.sum_rate),
                        opt(r.total_power),
                        opt(r.dof_estimate),
                        num(sweep.dof),
                        r.status.to_string(),
                    ]
                }),
            )?,
            Format::Json => json(&serde_json::json!({
                "gains": self.gains,
                "rows": rows,
                "dof_numeric": sweep.dof,
            })),
        };
        Ok(Output { text, warnings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = grid(0.01, 100.0, 200, true);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[199], 100.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(grid(1.0, 1e6, 7, true), vec![1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6]);
        assert_eq!(grid(3.0, 3.0, 10, true), vec![3.0]);
    }

    #[test]
    fn band_curve_is_flat() {
        let job = DofCurve {
            a2_min: 1.0 / 3.0,
            a2_max: 2.0,
            steps: 50,
            log_axis: false,
        };
        let out = job.run(Format::Csv).unwrap().text;
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "param,value,scheme");
        assert_eq!(lines.len(), 51);
        assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("1.0")));
    }

    #[test]
    fn crossover_scans_from_top() {
        let row = |p: f64, lattice: f64, hk: f64| CompareRow {
            p,
            lattice,
            hk,
            binding_constraint: String::new(),
        };
        let rows = [row(1.0, 1.0, 0.5), row(2.0, 0.4, 0.5), row(3.0, 1.0, 0.5), row(4.0, 2.0, 0.5)];
        assert_eq!(crossover(&rows), Some(3.0));
        assert_eq!(crossover(&rows[..2]), None);
    }

    #[test]
    fn job_round_trips_through_json() {
        let job = Job::DofNonsym(DofNonsym {
            gains: [2.0, 3.0, 4.0],
            n_max: 5,
        });
        let text = serde_json::to_string(&job).unwrap();
        assert!(text.starts_with(r#"{"command":"dof-nonsym","params":"#));
        assert_eq!(serde_json::from_str::<Job>(&text).unwrap(), job);
    }
}

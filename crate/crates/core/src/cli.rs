//! Command surface shared by the `gapdiff` binary and tests.
//!
//! | subcommand | input             | main output                  | side output            |
//! |------------|-------------------|------------------------------|------------------------|
//! | `spectrum` | chain JSON        | atoms JSON                   |                        |
//! | `levy`     | chain JSON        | CSV `y,n_y`                  | Knight value, rep JSON |
//! | `exponent` | chain JSON        | CSV `z,psi_z`                |                        |
//! | `oracle`   | chain JSON        | CSV `z,T_z`                  |                        |
//! | `simulate` | chain JSON        | CSV `duration`               | counts JSON            |
//! | `refine`   | speed measure JSON| CSV `N,series,z_or_y,value`  | summary JSON           |
//!
//! Side outputs go to their explicit path, else next to the main output file
//! (`<output>.counts.json`, `<output>.summary.json`, `<output>.rep.json`), else
//! to the diagnostics stream.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::chain::{
    chain_from_json, first_passage_transform, speed_measure_from_json, ChainSpec, Endpoint,
};
use crate::error::{Error, Result};
use crate::formats::{
    fmt_num, write_column_csv, write_xy_csv, DENSITY_HEADER, DURATION_HEADER, EXPONENT_HEADER,
    ORACLE_HEADER, REFINE_HEADER,
};
use crate::jfraction::jfraction_from_chain;
use crate::levy::{
    knight_functional, laplace_exponent, levy_density, Convention, LevyRepresentation,
};
use crate::montecarlo::simulate_excursions;
use crate::refinement::{convergence_experiment, cutoff_for_y_grid, RefinementPlan};
use crate::spectral::spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Levy,
    Exponent,
    Oracle,
    Simulate,
    Refine,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Levy => "levy",
            Command::Exponent => "exponent",
            Command::Oracle => "oracle",
            Command::Simulate => "simulate",
            Command::Refine => "refine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `min` to `max`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let g = GridSpec {
            min,
            max,
            count,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return usage(format!("grid needs at least 2 points, got {}", self.count));
        }
        if !(self.min > 0.0) || !(self.max > self.min) || !self.max.is_finite() {
            return usage(format!(
                "grid bounds must satisfy 0 < min < max, got [{}, {}]",
                self.min, self.max
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

fn usage<T>(msg: String) -> Result<T> {
    Err(Error::InvalidArgument { op: "usage", msg })
}

/// Everything a single invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandConfig {
    pub command: Command,
    /// Input JSON path; `-` reads standard input.
    pub input: PathBuf,
    /// `None` writes to the standard-output stream.
    pub output: Option<PathBuf>,
    pub z_grid: Option<GridSpec>,
    pub y_grid: Option<GridSpec>,
    pub seed: Option<u64>,
    pub replicas: usize,
    /// Local-time budget per simulated path.
    pub budget: f64,
    pub sizes: Vec<usize>,
    pub convention: Convention,
    pub cutoff: Option<f64>,
    pub side_output: Option<PathBuf>,
}

impl CommandConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        CommandConfig {
            command,
            input: input.into(),
            output: None,
            z_grid: None,
            y_grid: None,
            seed: None,
            replicas: 1000,
            budget: 1.0,
            sizes: vec![25, 50, 100, 200],
            convention: Convention::ChainUnits,
            cutoff: None,
            side_output: None,
        }
    }

    /// Default z-grid of a command (refine uses the window of the power-law fit).
    pub fn default_z_grid(command: Command) -> GridSpec {
        let (min, max, count) = match command {
            Command::Refine => (1.0, 100.0, 40),
            _ => (0.1, 100.0, 50),
        };
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    /// Default y-grid of a command.
    pub fn default_y_grid(command: Command) -> GridSpec {
        let (min, max, count) = match command {
            Command::Refine => (0.01, 0.5, 40),
            _ => (0.01, 10.0, 50),
        };
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    fn z_points(&self) -> Result<Vec<f64>> {
        let g = self.z_grid.unwrap_or(Self::default_z_grid(self.command));
        g.validate()?;
        Ok(g.points())
    }

    fn y_points(&self) -> Result<Vec<f64>> {
        let g = self.y_grid.unwrap_or(Self::default_y_grid(self.command));
        g.validate()?;
        Ok(g.points())
    }

    fn side_path(&self, suffix: &str) -> Option<PathBuf> {
        self.side_output.clone().or_else(|| {
            self.output.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(suffix);
                PathBuf::from(s)
            })
        })
    }
}

/// Executes one command. Main output goes to `config.output` or `out`;
/// side outputs without a destination and notes go to `diag`.
pub fn run(config: &CommandConfig, out: &mut dyn Write, diag: &mut dyn Write) -> Result<()> {
    let text = read_input(&config.input)?;
    let mut main = Vec::new();
    match config.command {
        Command::Spectrum => {
            let chain = chain_from_json(&text)?;
            let sm = spectrum(&jfraction_from_chain(&chain))?;
            serde_json::to_writer(&mut main, &sm)?;
            main.push(b'\n');
        }
        Command::Levy => {
            let ys = config.y_points()?;
            let rep = representation(&chain_from_json(&text)?, config.convention)?;
            let rows: Vec<(f64, f64)> = ys.iter().map(|&y| (y, levy_density(&rep, y))).collect();
            write_xy_csv(&mut main, DENSITY_HEADER, &rows)?;
            writeln!(
                diag,
                "knight_functional,{}",
                fmt_num(knight_functional(&rep))
            )?;
            let json = serde_json::to_vec(&rep)?;
            emit_side(config, ".rep.json", &json, diag)?;
        }
        Command::Exponent => {
            let zs = config.z_points()?;
            let rep = representation(&chain_from_json(&text)?, config.convention)?;
            let rows: Vec<(f64, f64)> =
                zs.iter().map(|&z| (z, laplace_exponent(&rep, z))).collect();
            write_xy_csv(&mut main, EXPONENT_HEADER, &rows)?;
        }
        Command::Oracle => {
            let zs = config.z_points()?;
            let chain = chain_from_json(&text)?;
            let rows = zs
                .iter()
                .map(|&z| Ok((z, first_passage_transform(&chain, z)?)))
                .collect::<Result<Vec<_>>>()?;
            write_xy_csv(&mut main, ORACLE_HEADER, &rows)?;
        }
        Command::Simulate => {
            let seed = config
                .seed
                .map_or_else(|| usage("simulate requires --seed".into()), Ok)?;
            if config.replicas == 0 {
                return usage("--replicas must be positive".into());
            }
            if !(config.budget > 0.0) {
                return usage("--budget must be positive".into());
            }
            let chain = chain_from_json(&text)?;
            let summary = simulate_excursions(&chain, config.budget, config.replicas, seed)?;
            write_column_csv(&mut main, DURATION_HEADER, &summary.excursion_durations)?;
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for c in &summary.excursion_count_by_local_time {
                *counts.entry(c.count).or_default() += 1;
            }
            let json = serde_json::to_vec(&CountsFile {
                counts: counts
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect(),
                seed,
                replicas: config.replicas,
                budget: config.budget,
            })?;
            emit_side(config, ".counts.json", &json, diag)?;
        }
        Command::Refine => {
            let target = speed_measure_from_json(&text)?;
            let zs = config.z_points()?;
            let ys = config.y_points()?;
            let cutoff = match (config.cutoff, target.endpoint) {
                (Some(c), _) => Some(c),
                (None, Endpoint::Infinite) => Some(cutoff_for_y_grid(&ys)),
                (None, Endpoint::Finite(_)) => None,
            };
            let plan = RefinementPlan::new(target, config.sizes.clone(), cutoff)?;
            let report = convergence_experiment(&plan, &zs, &ys)?;
            writeln!(main, "{REFINE_HEADER}")?;
            for level in &report.levels {
                for (series, rows) in [("psi", &level.psi), ("n", &level.density)] {
                    for &(x, v) in rows.iter() {
                        writeln!(
                            main,
                            "{},{series},{},{}",
                            level.size,
                            fmt_num(x),
                            fmt_num(v)
                        )?;
                    }
                }
            }
            let json = serde_json::to_vec(&report.summary())?;
            emit_side(config, ".summary.json", &json, diag)?;
        }
    }
    match &config.output {
        Some(path) => fs::write(path, &main)?,
        None => out.write_all(&main)?,
    }
    Ok(())
}

fn representation(chain: &ChainSpec, convention: Convention) -> Result<LevyRepresentation> {
    LevyRepresentation::from_chain(chain, convention)
}

#[derive(Serialize)]
struct CountsFile {
    counts: BTreeMap<String, usize>,
    seed: u64,
    replicas: usize,
    budget: f64,
}

fn emit_side(
    config: &CommandConfig,
    suffix: &str,
    json: &[u8],
    diag: &mut dyn Write,
) -> Result<()> {
    match config.side_path(suffix) {
        Some(path) => {
            let mut bytes = json.to_vec();
            bytes.push(b'\n');
            fs::write(path, bytes)?;
        }
        None => {
            diag.write_all(json)?;
            diag.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

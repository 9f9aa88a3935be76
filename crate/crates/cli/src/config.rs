use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use mob_rkhs::decompose::Parity;

pub const MIN_DEGREE: usize = 4;
pub const MAX_DEGREE: usize = 24;
pub const DEFAULT_SEED: u64 = 20240331;

/// Default tolerance per named check; `--tol NAME=VALUE` overrides.
pub const DEFAULT_TOLERANCES: [(&str, f64); 9] = [
    ("ladder", 1e-5),
    ("kernel_law", 1e-7),
    ("route_gap", 1e-9),
    ("cocycle_identity", 1e-10),
    ("kernel_transform", 1e-9),
    ("block_structure", 1e-10),
    ("shift_equivalence", 1e-6),
    ("intertwining", 1e-8),
    ("polydisc_parameters", 1e-6),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Decompose,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub lambdas: Vec<f64>,
    pub degree: usize,
    pub parity: Option<Parity>,
    pub out: Option<(PathBuf, Format)>,
    pub tolerances: BTreeMap<String, f64>,
    pub noise: Option<f64>,
    pub seed: u64,
}

/// Raw flag values before validation.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    pub lambdas: Option<Vec<f64>>,
    pub polydisc: Option<Vec<f64>>,
    pub degree: Option<usize>,
    pub parity: Option<Parity>,
    pub out: Option<PathBuf>,
    pub tol: Vec<String>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    ensure!(v > 0.0 && v.is_finite(), "{name} must be positive and finite, got {v}");
    Ok(v)
}

impl RunConfig {
    pub fn validate(command: Command, raw: RawConfig) -> Result<Self> {
        let lambdas = match (raw.lambdas, raw.polydisc) {
            (Some(_), Some(_)) => bail!("--lambdas and --polydisc are mutually exclusive"),
            (Some(l), None) => l,
            (None, Some(p)) => {
                ensure!(p.len() == 3, "--polydisc takes three weights, got {}", p.len());
                p
            }
            (None, None) => bail!("one of --lambdas or --polydisc is required"),
        };
        ensure!(
            lambdas.len() == 2 || lambdas.len() == 3,
            "expected two or three weights, got {}",
            lambdas.len()
        );
        for (i, &l) in lambdas.iter().enumerate() {
            positive(&format!("λ{}", i + 1), l)?;
        }
        let degree = raw.degree.unwrap_or(if lambdas.len() == 2 { 12 } else { 8 });
        ensure!(
            (MIN_DEGREE..=MAX_DEGREE).contains(&degree),
            "degree {degree} outside [{MIN_DEGREE}, {MAX_DEGREE}]"
        );
        if lambdas.len() == 3 {
            ensure!(degree >= 6, "three-factor runs need degree ≥ 6, got {degree}");
            ensure!(raw.parity.is_none(), "--parity applies to two-factor runs only");
            ensure!(raw.noise.is_none(), "--inject-noise applies to two-factor runs only");
        }
        if raw.parity.is_some() {
            ensure!(
                lambdas[0] == lambdas[1],
                "--parity needs equal weights, got {} and {}",
                lambdas[0],
                lambdas[1]
            );
        }
        let mut tolerances: BTreeMap<String, f64> =
            DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for t in &raw.tol {
            let (name, value) = t
                .split_once('=')
                .with_context(|| format!("--tol expects NAME=VALUE, got {t:?}"))?;
            let value: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("tolerance {value:?} is not a number"))?;
            let slot = tolerances.get_mut(name.trim()).with_context(|| {
                format!(
                    "unknown tolerance {name:?}; known: {}",
                    DEFAULT_TOLERANCES.map(|(k, _)| k).join(", ")
                )
            })?;
            *slot = positive(name, value)?;
        }
        let noise = raw.noise.map(|e| positive("--inject-noise", e)).transpose()?;
        if let Some(e) = noise {
            ensure!(e < 1.0, "--inject-noise must be below 1, got {e}");
        }
        let out = raw.out.map(|p| {
            let format = match p.extension().and_then(|e| e.to_str()) {
                Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
                _ => Format::Csv,
            };
            (p, format)
        });
        Ok(Self {
            command,
            lambdas,
            degree,
            parity: raw.parity,
            out,
            tolerances,
            noise,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
        })
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn is_polydisc(&self) -> bool {
        self.lambdas.len() == 3
    }
}

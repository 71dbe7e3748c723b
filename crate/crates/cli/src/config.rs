//! Run configuration: `key = value` file, then command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use privpoly::{Convention, PartitionSpec};

pub const DEFAULT_PRIME: u64 = 2305843009213693951;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub prime: u64,
    pub dims: (usize, usize, usize),
    pub m: usize,
    pub n: usize,
    pub library_size: usize,
    pub workers: usize,
    pub per_worker: usize,
    /// 1-based, as typed by the user.
    pub desired: usize,
    pub seed: u64,
    pub trials: usize,
    pub convention: Convention,
    pub figure: u8,
    pub gamma: f64,
    pub mu: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prime: DEFAULT_PRIME,
            dims: (4, 4, 4),
            m: 2,
            n: 3,
            library_size: 4,
            workers: 12,
            per_worker: 1,
            desired: 1,
            seed: 0,
            trials: 0,
            convention: Convention::Harmonic,
            figure: 2,
            gamma: 0.1,
            mu: 0.1,
            out: None,
        }
    }
}

pub fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
    if parts.len() != 3 {
        bail!("dims must look like RxSxT, got `{s}`");
    }
    let mut v = [0usize; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().with_context(|| format!("bad dimension `{p}` in `{s}`"))?;
        if *slot == 0 {
            bail!("dimensions must be positive, got `{s}`");
        }
    }
    Ok((v[0], v[1], v[2]))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value.parse().with_context(|| format!("bad value `{value}` for `{key}`"))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "prime" | "p" => self.prime = parse_num(key, value)?,
            "dims" => self.dims = parse_dims(value)?,
            "m" => self.m = parse_num(key, value)?,
            "n" => self.n = parse_num(key, value)?,
            "big_m" | "big-m" | "M" => self.library_size = parse_num(key, value)?,
            "workers" | "N" => self.workers = parse_num(key, value)?,
            "l" | "L" => self.per_worker = parse_num(key, value)?,
            "desired" | "D" => self.desired = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "convention" => self.convention = value.parse()?,
            "fig" | "figure" => self.figure = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "mu" => self.mu = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected `key = value`", i + 1))?;
            self.set(key.trim(), value.trim()).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_text(&text)
    }

    pub fn spec(&self) -> Result<PartitionSpec> {
        Ok(PartitionSpec::new(self.m, self.n, self.library_size, self.workers, self.per_worker)?)
    }

    /// Checks the protocol invariants and returns the spec with a 0-based
    /// desired index.
    pub fn validate(&self) -> Result<(PartitionSpec, usize)> {
        let spec = self.spec()?;
        if self.desired == 0 || self.desired > self.library_size {
            bail!("D ∈ [1, M] violated (D = {}, M = {})", self.desired, self.library_size);
        }
        Ok((spec, self.desired - 1))
    }
}

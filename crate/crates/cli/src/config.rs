//! Run configuration: flat `key = value` files overlaid by command flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use helmfft::BoundaryKind;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Verify,
    Bench,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Verify => "verify",
            Mode::Bench => "bench",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "solve" => Ok(Mode::Solve),
            "verify" => Ok(Mode::Verify),
            "bench" => Ok(Mode::Bench),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Right-hand side source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RhsSpec {
    /// 0.01 on the first `n_1` unknowns in lexicographic order, 1 elsewhere.
    Paper,
    Random(u64),
    File(PathBuf),
}

impl FromStr for RhsSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "paper" {
            return Ok(RhsSpec::Paper);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed
                .parse()
                .map(RhsSpec::Random)
                .map_err(|_| format!("bad random seed `{seed}`"));
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err("empty rhs file path".into());
            }
            return Ok(RhsSpec::File(PathBuf::from(path)));
        }
        Err(format!("rhs must be paper, random:<seed> or file:<path>, got `{s}`"))
    }
}

impl fmt::Display for RhsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsSpec::Paper => write!(f, "paper"),
            RhsSpec::Random(seed) => write!(f, "random:{seed}"),
            RhsSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("format must be csv or json, got `{s}`")),
        }
    }
}

/// Ends of the `x_1` direction; every other direction is Neumann.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndCondition(pub BoundaryKind);

impl FromStr for EndCondition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "absorbing" | "abc" => Ok(EndCondition(BoundaryKind::Absorbing)),
            "neumann" => Ok(EndCondition(BoundaryKind::Neumann)),
            _ => Err(format!("bc must be absorbing or neumann, got `{s}`")),
        }
    }
}

/// Which extents a bench sweep overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sweep {
    /// Every direction takes the swept size.
    #[default]
    All,
    /// Only `n_1`; the others keep their configured values.
    N1,
}

impl FromStr for Sweep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Sweep::All),
            "n1" => Ok(Sweep::N1),
            _ => Err(format!("sweep must be all or n1, got `{s}`")),
        }
    }
}

/// Comma-separated list of sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeList(pub Vec<usize>);

impl FromStr for SizeList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad size `{t}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(SizeList)
    }
}

/// Flags shared by `solve`, `verify` and `bench`. Every flag may also be
/// given as a `key = value` line in `--config`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Config file with `key = value` lines and `#` comments.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Space dimension, 2 or 3.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    /// Defaults to n1.
    #[arg(long)]
    pub n2: Option<usize>,
    /// Defaults to n2; 3D only.
    #[arg(long)]
    pub n3: Option<usize>,
    /// Wave number (default 2π).
    #[arg(long)]
    pub omega: Option<f64>,
    /// paper, random:<seed> or file:<path>.
    #[arg(long)]
    pub rhs: Option<RhsSpec>,
    /// Where to write the records; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<Format>,
    /// Timed solves per problem; the minimum is reported.
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Worker threads, 0 = one per core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Ends of x1: absorbing (default) or neumann.
    #[arg(long)]
    pub bc: Option<EndCondition>,
    /// Bench only: comma-separated sizes, one record each.
    #[arg(long)]
    pub sizes: Option<SizeList>,
    /// Bench only: `all` sets every extent to the swept size, `n1` only the first.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    /// Verify only: largest accepted oracle error.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub d: usize,
    /// `[n1, n2, n3]`; `n3` is ignored in 2D.
    pub n: [usize; 3],
    pub omega: f64,
    pub bc: BoundaryKind,
    pub rhs: RhsSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub repeats: usize,
    pub threads: usize,
    pub sizes: Vec<usize>,
    pub sweep: Sweep,
    pub tol: f64,
}

impl RunConfig {
    /// Extents of the problem, `d` entries.
    pub fn dims(&self) -> &[usize] {
        &self.n[..self.d]
    }

    /// One config per bench size, or just `self`.
    pub fn expand(&self) -> Vec<RunConfig> {
        if self.mode != Mode::Bench || self.sizes.is_empty() {
            return vec![self.clone()];
        }
        self.sizes
            .iter()
            .map(|&s| {
                let mut c = self.clone();
                match self.sweep {
                    Sweep::All => c.n = [s; 3],
                    Sweep::N1 => c.n[0] = s,
                }
                c.sizes.clear();
                c
            })
            .collect()
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
        let key = key.trim().replace('-', "_");
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key `{key}`", no + 1)));
        }
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
}

fn take<T: FromStr>(map: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    map.remove(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Config(format!("{key}: {e}")))
        })
        .transpose()
}

impl RunArgs {
    /// Fills unset flags from the config file, if any.
    pub fn merged(mut self) -> Result<RunArgs> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let mut map = read_config(&path)?;
        macro_rules! fill {
            ($($field:ident),*) => {
                $( if self.$field.is_none() { self.$field = take(&mut map, stringify!($field))?; }
                   else { map.remove(stringify!($field)); } )*
            };
        }
        fill!(d, n1, n2, n3, omega, rhs, format, repeats, threads, bc, sizes, sweep, tol);
        if self.out.is_none() {
            self.out = map.remove("out").map(PathBuf::from);
        } else {
            map.remove("out");
        }
        if let Some(key) = map.keys().next() {
            return Err(CliError::Config(format!("unknown key `{key}` in {}", path.display())));
        }
        Ok(self)
    }

    pub fn into_config(self, mode: Mode) -> Result<RunConfig> {
        let a = self.merged()?;
        let d = a.d.unwrap_or(2);
        if d != 2 && d != 3 {
            return Err(CliError::Config(format!("d must be 2 or 3, got {d}")));
        }
        let sizes = a.sizes.map(|s| s.0).unwrap_or_default();
        if !sizes.is_empty() && mode != Mode::Bench {
            return Err(CliError::Config("sizes is only valid in bench mode".into()));
        }
        let n1 = match (a.n1, sizes.first()) {
            (Some(n), _) => n,
            (None, Some(&s)) => s,
            (None, None) => return Err(CliError::Config("n1 is required".into())),
        };
        let n2 = a.n2.unwrap_or(n1);
        let n3 = a.n3.unwrap_or(n2);
        if d == 2 && a.n3.is_some() {
            return Err(CliError::Config("n3 given for a 2D problem".into()));
        }
        let omega = a.omega.unwrap_or(2.0 * std::f64::consts::PI);
        if !omega.is_finite() || omega < 0.0 {
            return Err(CliError::Config(format!("omega must be finite and non-negative, got {omega}")));
        }
        let repeats = a.repeats.unwrap_or(3);
        if repeats == 0 {
            return Err(CliError::Config("repeats must be at least 1".into()));
        }
        let tol = a.tol.unwrap_or(1e-9);
        if !(tol > 0.0) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        Ok(RunConfig {
            mode,
            d,
            n: [n1, n2, n3],
            omega,
            bc: a.bc.map(|b| b.0).unwrap_or(BoundaryKind::Absorbing),
            rhs: a.rhs.unwrap_or(RhsSpec::Paper),
            out: a.out,
            format: a.format.unwrap_or_default(),
            repeats,
            threads: a.threads.unwrap_or(0),
            sizes,
            sweep: a.sweep.unwrap_or_default(),
            tol,
        })
    }
}

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::volumetry::EnvelopeConstants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Knorm,
    Sknorm,
    Blockpos,
    Dual,
    Ppt,
    Prob,
    Width,
    Bounds,
    Santalo,
    Verify,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Knorm,
        Command::Sknorm,
        Command::Blockpos,
        Command::Dual,
        Command::Ppt,
        Command::Prob,
        Command::Width,
        Command::Bounds,
        Command::Santalo,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Knorm => "knorm",
            Command::Sknorm => "sknorm",
            Command::Blockpos => "blockpos",
            Command::Dual => "dual",
            Command::Ppt => "ppt",
            Command::Prob => "prob",
            Command::Width => "width",
            Command::Bounds => "bounds",
            Command::Santalo => "santalo",
            Command::Verify => "verify",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Command::Knorm | Command::Ppt => 1000,
            Command::Prob => 10_000,
            Command::Sknorm | Command::Width => 20,
            _ => 100,
        }
    }

    fn default_restarts(self) -> usize {
        match self {
            Command::Prob | Command::Width => 4,
            _ => 20,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Norms,
    Chain,
    Duality,
    Width,
    Prob,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norms" => Ok(Suite::Norms),
            "chain" => Ok(Suite::Chain),
            "duality" => Ok(Suite::Duality),
            "width" => Ok(Suite::Width),
            "prob" => Ok(Suite::Prob),
            _ => Err(Error::Config(format!(
                "unknown suite '{s}' (expected norms, chain, duality, width or prob)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected json or csv)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Transpose,
    Identity,
    Depolarizing,
}

impl FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transpose" => Ok(MapKind::Transpose),
            "identity" => Ok(MapKind::Identity),
            "depolarizing" => Ok(MapKind::Depolarizing),
            _ => Err(Error::Config(format!("unknown map '{s}'"))),
        }
    }
}

/// Parses `"3"`, `"2..5"` (inclusive) or comma-separated mixtures such as
/// `"2,4..6"` into a sorted, deduplicated list of positive integers.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = |why: &str| Error::Config(format!("bad range '{s}': {why}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad("expected positive integers"));
    let mut out = Vec::new();
    for part in s.split(',') {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(bad("empty interval"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.contains(&0) {
        return Err(bad("values must be at least 1"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    Default,
    Env(&'static str),
    File { path: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => f.write_str("default"),
            Origin::Env(v) => write!(f, "environment variable {v}"),
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

pub const KEYS: &[&str] = &[
    "command", "d", "k", "samples", "restarts", "max_iters", "tol", "seed", "workers", "out", "format", "suite",
    "m", "map", "input", "t_max", "ppt_tol", "santalo_c", "c0_upper", "c0_lower", "c_upper", "c_lower",
];

const CONSTANT_KEYS: &[&str] = &["c0_upper", "c0_lower", "c_upper", "c_lower"];

/// Raw `key = value` settings with the place each one came from.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>, origin: Origin) {
        self.entries.insert(key.to_string(), (value.into(), origin));
    }

    pub fn get(&self, key: &str) -> Option<&(String, Origin)> {
        self.entries.get(key)
    }

    /// Later layers win.
    pub fn overlay(&mut self, other: &RawConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    /// Plain `key = value` lines; blank lines and lines starting with `#`
    /// are ignored. Unknown and repeated keys are errors.
    pub fn parse(text: &str, path: &Path, allowed: &[&str]) -> Result<Self> {
        let mut raw = RawConfig::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let at = |msg: String| Error::Config(format!("{}:{line_no}: {msg}", path.display()));
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or_else(|| at(format!("expected key = value, found '{t}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !allowed.contains(&key) {
                return Err(at(format!("unknown key '{key}'")));
            }
            if value.is_empty() {
                return Err(at(format!("empty value for '{key}'")));
            }
            if raw.entries.contains_key(key) {
                return Err(at(format!("duplicate key '{key}'")));
            }
            raw.set(key, value, Origin::File { path: path.to_path_buf(), line: line_no });
        }
        Ok(raw)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path, KEYS)
    }

    /// A constants file holding only envelope constants.
    pub fn read_constants(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read constants {}: {e}", path.display())))?;
        Self::parse(&text, path, CONSTANT_KEYS)
    }
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub d: Vec<usize>,
    /// `None` means every `k` in `1..=d`.
    pub k: Option<Vec<usize>>,
    pub samples: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Not part of any result: outputs are identical for every worker count.
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub suite: Option<Suite>,
    pub m: Vec<usize>,
    pub map: MapKind,
    pub input: Option<PathBuf>,
    pub t_max: f64,
    pub ppt_tol: f64,
    pub santalo_c: f64,
    pub constants: EnvelopeConstants,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn default_d(command: Command, suite: Option<Suite>) -> &'static str {
    match (command, suite) {
        (Command::Verify, Some(Suite::Norms)) => "2..8",
        (Command::Verify, Some(Suite::Width)) | (Command::Width, _) => "2..3",
        (Command::Prob, _) | (Command::Verify, Some(Suite::Prob)) => "2..3",
        _ => "2..4",
    }
}

impl ExperimentConfig {
    /// Resolves `defaults < ENTGEO_WORKERS < file < flags`, reporting the
    /// origin of any invalid value.
    pub fn resolve(command: Command, file: Option<&RawConfig>, flags: &RawConfig, env_workers: Option<&str>) -> Result<Self> {
        let mut raw = RawConfig::new();
        if let Some(w) = env_workers {
            raw.set("workers", w, Origin::Env("ENTGEO_WORKERS"));
        }
        if let Some(f) = file {
            raw.overlay(f);
        }
        raw.overlay(flags);

        if let Some((v, origin)) = raw.get("command") {
            if v != command.name() {
                return Err(Error::Config(format!("{origin}: config is for command '{v}', not '{command}'")));
            }
        }

        fn field<T, F: Fn(&str) -> Result<T>>(raw: &RawConfig, key: &str, default: Option<&str>, parse: F) -> Result<Option<T>> {
            match raw.get(key) {
                Some((v, origin)) => parse(v).map(Some).map_err(|e| {
                    let msg = match e {
                        Error::Config(m) => m,
                        other => other.to_string(),
                    };
                    Error::Config(format!("{origin}: {key}: {msg}"))
                }),
                None => default.map(parse).transpose(),
            }
        }
        fn num<T: FromStr>(s: &str) -> Result<T> {
            s.parse::<T>().map_err(|_| Error::Config(format!("invalid number '{s}'")))
        }
        fn positive(s: &str) -> Result<f64> {
            let x: f64 = num(s)?;
            if x > 0.0 && x.is_finite() {
                Ok(x)
            } else {
                Err(Error::Config(format!("must be a positive finite number, got '{s}'")))
            }
        }
        fn at_least(min: usize) -> impl Fn(&str) -> Result<usize> {
            move |s| {
                let x: usize = num(s)?;
                if x >= min {
                    Ok(x)
                } else {
                    Err(Error::Config(format!("must be at least {min}, got {x}")))
                }
            }
        }

        let suite = field(&raw, "suite", None, Suite::from_str)?;
        if command == Command::Verify && suite.is_none() {
            return Err(Error::Config("verify needs a suite (norms, chain, duality, width, prob)".into()));
        }
        let workers_default = default_workers().to_string();
        let defaults = EnvelopeConstants::default();
        let constant = |key: &str, d: f64| -> Result<f64> {
            Ok(field(&raw, key, None, positive)?.unwrap_or(d))
        };
        let constants = EnvelopeConstants {
            c0_upper: constant("c0_upper", defaults.c0_upper)?,
            c0_lower: constant("c0_lower", defaults.c0_lower)?,
            c_upper: constant("c_upper", defaults.c_upper)?,
            c_lower: constant("c_lower", defaults.c_lower)?,
        };
        let k = match raw.get("k") {
            Some((v, _)) if v == "all" => None,
            _ => field(&raw, "k", None, parse_range)?,
        };
        let mc_min = if matches!(command, Command::Bounds | Command::Santalo | Command::Blockpos) { 1 } else { 2 };

        let cfg = ExperimentConfig {
            command,
            d: field(&raw, "d", Some(default_d(command, suite)), parse_range)?.expect("default"),
            k,
            samples: field(&raw, "samples", Some(&command.default_samples().to_string()), at_least(mc_min))?
                .expect("default"),
            restarts: field(&raw, "restarts", Some(&command.default_restarts().to_string()), at_least(1))?
                .expect("default"),
            max_iters: field(&raw, "max_iters", Some("500"), at_least(1))?.expect("default"),
            tol: field(&raw, "tol", Some("1e-10"), positive)?.expect("default"),
            seed: field(&raw, "seed", Some("0"), num::<u64>)?.expect("default"),
            workers: field(&raw, "workers", Some(&workers_default), at_least(1))?.expect("default"),
            out: field(&raw, "out", None, |s| Ok(PathBuf::from(s)))?,
            format: field(&raw, "format", Some("json"), Format::from_str)?.expect("default"),
            suite,
            m: field(&raw, "m", Some("1..10"), parse_range)?.expect("default"),
            map: field(&raw, "map", Some("transpose"), MapKind::from_str)?.expect("default"),
            input: field(&raw, "input", None, |s| Ok(PathBuf::from(s)))?,
            t_max: field(&raw, "t_max", Some("1"), positive)?.expect("default"),
            ppt_tol: field(&raw, "ppt_tol", Some("1e-10"), positive)?.expect("default"),
            santalo_c: field(&raw, "santalo_c", Some("0.1"), positive)?.expect("default"),
            constants,
        };
        Ok(cfg)
    }

    /// The `k` values to run for dimension `d`.
    pub fn ks(&self, d: usize) -> Vec<usize> {
        match &self.k {
            None => (1..=d).collect(),
            Some(ks) => ks.iter().copied().filter(|&k| k <= d).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> RawConfig {
        let mut r = RawConfig::new();
        for (k, v) in pairs {
            r.set(k, *v, Origin::Flag);
        }
        r
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2").unwrap(), vec![2]);
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("5,2,3").unwrap(), vec![2, 3, 5]);
        assert_eq!(parse_range("1,3..4").unwrap(), vec![1, 3, 4]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("0").is_err());
        assert!(parse_range("x").is_err());
        assert!(parse_range("").is_err());
    }

    #[test]
    fn precedence() {
        let file = RawConfig::parse("samples = 7\nseed=3\n", Path::new("run.cfg"), KEYS).unwrap();
        let cfg = ExperimentConfig::resolve(Command::Width, Some(&file), &flags(&[("seed", "9")]), Some("3")).unwrap();
        assert_eq!(cfg.samples, 7);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.workers, 3);
        assert_eq!(cfg.restarts, 4);
        let file = RawConfig::parse("workers = 2\n", Path::new("run.cfg"), KEYS).unwrap();
        let cfg = ExperimentConfig::resolve(Command::Width, Some(&file), &flags(&[]), Some("3")).unwrap();
        assert_eq!(cfg.workers, 2);
    }

    #[test]
    fn line_precise_errors() {
        let e = RawConfig::parse("# comment\n\nsamples = 5\nbogus = 1\n", Path::new("a.cfg"), KEYS).unwrap_err();
        assert!(e.to_string().contains("a.cfg:4: unknown key 'bogus'"), "{e}");
        let e = RawConfig::parse("samples\n", Path::new("a.cfg"), KEYS).unwrap_err();
        assert!(e.to_string().contains("a.cfg:1:"), "{e}");
        let e = RawConfig::parse("seed = 1\nseed = 2\n", Path::new("a.cfg"), KEYS).unwrap_err();
        assert!(e.to_string().contains("a.cfg:2: duplicate key"), "{e}");

        let file = RawConfig::parse("\nsamples = 1\n", Path::new("b.cfg"), KEYS).unwrap();
        let e = ExperimentConfig::resolve(Command::Prob, Some(&file), &flags(&[]), None).unwrap_err();
        assert!(e.to_string().contains("b.cfg:2: samples: must be at least 2"), "{e}");
    }

    #[test]
    fn verify_needs_known_suite() {
        assert!(ExperimentConfig::resolve(Command::Verify, None, &flags(&[]), None).is_err());
        let e = ExperimentConfig::resolve(Command::Verify, None, &flags(&[("suite", "foo")]), None).unwrap_err();
        assert!(e.to_string().contains("unknown suite"), "{e}");
        let cfg = ExperimentConfig::resolve(Command::Verify, None, &flags(&[("suite", "norms")]), None).unwrap();
        assert_eq!(cfg.d, (2..=8).collect::<Vec<_>>());
    }

    #[test]
    fn k_selection() {
        let cfg = ExperimentConfig::resolve(Command::Knorm, None, &flags(&[("k", "2,5")]), None).unwrap();
        assert_eq!(cfg.ks(4), vec![2]);
        let cfg = ExperimentConfig::resolve(Command::Knorm, None, &flags(&[("k", "all")]), None).unwrap();
        assert_eq!(cfg.ks(3), vec![1, 2, 3]);
    }

    #[test]
    fn command_mismatch() {
        let file = RawConfig::parse("command = prob\n", Path::new("c.cfg"), KEYS).unwrap();
        let e = ExperimentConfig::resolve(Command::Width, Some(&file), &flags(&[]), None).unwrap_err();
        assert!(e.to_string().contains("c.cfg:1"), "{e}");
    }
}

//! Declarative experiment configs (TOML, `schema = 1`) and their validation.
//!
//! Rationals are written as strings (`nu = "1/10"`). Every key is checked
//! against the schema before deserialization, so all unknown keys are reported
//! together with the cross-field violations.

use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::generate::CantorSpec;
use crate::interval::{parse_rational, rat, Interval, IntervalSet, Rational};
use crate::iteration::KernelShape;

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Porosity,
    Norm,
    Sweep,
    Holes,
    Chain,
    Harmonic,
    Cover,
    Weight,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Porosity => "porosity",
            Command::Norm => "norm",
            Command::Sweep => "sweep",
            Command::Holes => "holes",
            Command::Chain => "chain",
            Command::Harmonic => "harmonic",
            Command::Cover => "cover",
            Command::Weight => "weight",
        }
    }

    fn uses_x(&self) -> bool {
        !matches!(self, Command::Harmonic)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetConfig {
    Cantor { base: u32, digits: Vec<u32>, depth: u32 },
    Random { nu: String, depth: u32, seed: Option<u64> },
    Intervals { intervals: Vec<[String; 2]> },
}

fn default_alpha1() -> String {
    "1".into()
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iterations() -> usize {
    100_000
}
fn default_max_k0() -> u32 {
    20
}
fn default_shape() -> String {
    "bump".into()
}
fn default_chain_corpus() -> usize {
    100
}
fn default_hole() -> [f64; 2] {
    [0.45, 0.55]
}
fn default_walks() -> u64 {
    100_000
}
fn default_shell() -> f64 {
    1e-4
}
fn default_max_steps() -> u64 {
    100_000
}
fn default_harmonic_corpus() -> usize {
    50
}
fn default_degree() -> usize {
    8
}
fn default_ramp() -> f64 {
    1.0
}
fn default_patch_radius() -> f64 {
    32.0
}
fn default_patch_mesh() -> f64 {
    1.0 / 64.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorositySection {
    pub nu: String,
    pub alpha0: String,
    #[serde(default = "default_alpha1")]
    pub alpha1: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSection {
    pub n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub ns: Vec<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolesSection {
    pub nu: String,
    pub k: u32,
    pub n: usize,
    pub k0: Option<u32>,
    #[serde(default = "default_max_k0")]
    pub max_k0: u32,
    #[serde(default = "default_shape")]
    pub shape: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSection {
    pub nu: String,
    pub n: usize,
    pub k_max: u32,
    pub k0: Option<u32>,
    #[serde(default = "default_max_k0")]
    pub max_k0: u32,
    #[serde(default = "default_shape")]
    pub shape: String,
    #[serde(default = "default_chain_corpus")]
    pub corpus: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSection {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    #[serde(default = "default_hole")]
    pub hole: [f64; 2],
    #[serde(default = "default_walks")]
    pub walks: u64,
    #[serde(default = "default_shell")]
    pub shell: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default = "default_harmonic_corpus")]
    pub corpus: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSection {
    pub nu: String,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSection {
    pub nu: String,
    pub k: u32,
    #[serde(default = "default_ramp")]
    pub ramp_fraction: f64,
    #[serde(default = "default_patch_radius")]
    pub patch_radius: f64,
    #[serde(default = "default_patch_mesh")]
    pub patch_mesh: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: i64,
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    pub x: Option<SetConfig>,
    pub y: Option<SetConfig>,
    pub porosity: Option<PorositySection>,
    pub norm: Option<NormSection>,
    pub sweep: Option<SweepSection>,
    pub holes: Option<HolesSection>,
    pub chain: Option<ChainSection>,
    pub harmonic: Option<HarmonicSection>,
    pub cover: Option<CoverSection>,
    pub weight: Option<WeightSection>,
}

const TOP_KEYS: &[&str] = &[
    "schema", "command", "seed", "x", "y", "porosity", "norm", "sweep", "holes", "chain", "harmonic", "cover", "weight",
];

fn table_keys(name: &str) -> &'static [&'static str] {
    match name {
        "x" | "y" => &["kind", "base", "digits", "depth", "nu", "seed", "intervals"],
        "porosity" => &["nu", "alpha0", "alpha1"],
        "norm" => &["n", "tol", "max_iterations"],
        "sweep" => &["ns", "tol", "max_iterations"],
        "holes" => &["nu", "k", "n", "k0", "max_k0", "shape"],
        "chain" => &["nu", "n", "k_max", "k0", "max_k0", "shape", "corpus", "tol"],
        "harmonic" => &["r", "t", "hole", "walks", "shell", "max_steps", "corpus", "degree"],
        "cover" => &["nu", "k"],
        "weight" => &["nu", "k", "ramp_fraction", "patch_radius", "patch_mesh"],
        _ => &[],
    }
}

fn unknown_keys(value: &toml::Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(top) = value.as_table() else {
        return vec![Diagnostic::new("<root>", "config must be a table")];
    };
    for (key, v) in top {
        if !TOP_KEYS.contains(&key.as_str()) {
            out.push(Diagnostic::new(key.clone(), "unknown key"));
            continue;
        }
        let allowed = table_keys(key);
        if let Some(t) = v.as_table() {
            for sub in t.keys() {
                if !allowed.contains(&sub.as_str()) {
                    out.push(Diagnostic::new(format!("{key}.{sub}"), "unknown key"));
                }
            }
        }
    }
    out
}

/// Parses and validates; on failure returns every diagnostic found.
pub fn parse_config(text: &str) -> std::result::Result<ExperimentConfig, Vec<Diagnostic>> {
    let value: toml::Value = toml::from_str(text).map_err(|e| vec![Diagnostic::new("<syntax>", e.message())])?;
    let mut diags = unknown_keys(&value);
    let config = match ExperimentConfig::deserialize(value) {
        Ok(c) => Some(c),
        Err(e) => {
            diags.push(Diagnostic::new("<schema>", e.message()));
            None
        }
    };
    if let Some(c) = &config {
        diags.extend(validate(c));
    }
    match config {
        Some(c) if diags.is_empty() => Ok(c),
        _ => Err(diags),
    }
}

fn check_rational(path: &str, s: &str, diags: &mut Vec<Diagnostic>) -> Option<Rational> {
    match parse_rational(s) {
        Ok(r) => Some(r),
        Err(e) => {
            diags.push(Diagnostic::new(path, format!("not a rational: {e}")));
            None
        }
    }
}

fn check_nu(path: &str, s: &str, diags: &mut Vec<Diagnostic>) -> Option<Rational> {
    let nu = check_rational(path, s, diags)?;
    if !(nu.is_positive() && nu < Rational::one()) {
        diags.push(Diagnostic::new(path, "nu must lie in (0,1)"));
        return None;
    }
    Some(nu)
}

pub fn parse_shape(s: &str) -> Option<KernelShape> {
    match s {
        "bump" => Some(KernelShape::Bump),
        "fejer" => Some(KernelShape::Fejer),
        _ => None,
    }
}

fn check_shape(path: &str, s: &str, diags: &mut Vec<Diagnostic>) {
    if parse_shape(s).is_none() {
        diags.push(Diagnostic::new(path, "shape must be \"bump\" or \"fejer\""));
    }
}

fn check_band(path: &str, k: u32, k0: u32, n: usize, diags: &mut Vec<Diagnostic>) {
    let fits = k + k0 < 62 && (1u64 << (k + k0)) <= (n as u64) / 4;
    if !fits {
        diags.push(Diagnostic::new(
            path,
            format!("band constraint 2^(k+k0) <= N/4 fails: k = {k}, k0 = {k0}, N = {n}"),
        ));
    }
}

fn check_set(path: &str, set: &SetConfig, diags: &mut Vec<Diagnostic>) {
    match set {
        SetConfig::Cantor { base, digits, depth } => {
            if let Err(e) = CantorSpec::new(*base, digits.clone(), *depth) {
                diags.push(Diagnostic::new(path, e.to_string()));
            }
        }
        SetConfig::Random { nu, depth, .. } => {
            if let Some(v) = check_nu(&format!("{path}.nu"), nu, diags) {
                if v > rat(1, 3) {
                    diags.push(Diagnostic::new(format!("{path}.nu"), "random sets need nu <= 1/3"));
                }
            }
            if *depth == 0 || *depth > 20 {
                diags.push(Diagnostic::new(format!("{path}.depth"), "depth must lie in 1..=20"));
            }
        }
        SetConfig::Intervals { intervals } => {
            for (i, [a, b]) in intervals.iter().enumerate() {
                let p = format!("{path}.intervals[{i}]");
                let lo = check_rational(&p, a, diags);
                let hi = check_rational(&p, b, diags);
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    if let Err(e) = Interval::new(lo, hi) {
                        diags.push(Diagnostic::new(p, e.to_string()));
                    }
                }
            }
        }
    }
}

fn missing(path: &str) -> Diagnostic {
    Diagnostic::new(path, "section required by this command is missing")
}

/// Schema and cross-field checks; performs no computation.
pub fn validate(c: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    if c.schema != SCHEMA_VERSION {
        d.push(Diagnostic::new(
            "schema",
            format!("unsupported schema {}, expected {SCHEMA_VERSION}", c.schema),
        ));
    }
    if let Some(x) = &c.x {
        check_set("x", x, &mut d);
    } else if c.command.uses_x() {
        d.push(missing("x"));
    }
    if let Some(y) = &c.y {
        check_set("y", y, &mut d);
    }
    match c.command {
        Command::Porosity => match &c.porosity {
            None => d.push(missing("porosity")),
            Some(p) => {
                check_nu("porosity.nu", &p.nu, &mut d);
                let a0 = check_rational("porosity.alpha0", &p.alpha0, &mut d);
                let a1 = check_rational("porosity.alpha1", &p.alpha1, &mut d);
                if let (Some(a0), Some(a1)) = (a0, a1) {
                    if !a0.is_positive() || a1 < a0 {
                        d.push(Diagnostic::new("porosity", "need 0 < alpha0 <= alpha1"));
                    }
                }
            }
        },
        Command::Norm => match &c.norm {
            None => d.push(missing("norm")),
            Some(s) => {
                if s.n == 0 {
                    d.push(Diagnostic::new("norm.n", "N must be positive"));
                }
                check_tol("norm.tol", s.tol, &mut d);
            }
        },
        Command::Sweep => match &c.sweep {
            None => d.push(missing("sweep")),
            Some(s) => {
                if s.ns.len() < 2 {
                    d.push(Diagnostic::new("sweep.ns", "need at least two sizes"));
                }
                if s.ns.windows(2).any(|w| w[0] >= w[1]) || s.ns.first() == Some(&0) {
                    d.push(Diagnostic::new(
                        "sweep.ns",
                        "sizes must be positive and strictly increasing",
                    ));
                }
                check_tol("sweep.tol", s.tol, &mut d);
            }
        },
        Command::Holes => match &c.holes {
            None => d.push(missing("holes")),
            Some(s) => {
                check_nu("holes.nu", &s.nu, &mut d);
                check_shape("holes.shape", &s.shape, &mut d);
                if let Some(k0) = s.k0 {
                    check_band("holes.k0", s.k, k0, s.n, &mut d);
                }
                if s.k > 30 {
                    d.push(Diagnostic::new("holes.k", "level above 30"));
                }
            }
        },
        Command::Chain => match &c.chain {
            None => d.push(missing("chain")),
            Some(s) => {
                check_nu("chain.nu", &s.nu, &mut d);
                check_shape("chain.shape", &s.shape, &mut d);
                check_tol("chain.tol", s.tol, &mut d);
                if let Some(k0) = s.k0 {
                    if k0 == 0 {
                        d.push(Diagnostic::new("chain.k0", "k0 must be >= 1"));
                    } else {
                        let k_total = s.k_max.div_ceil(k0) * k0;
                        check_band("chain.k0", k_total, k0, s.n, &mut d);
                    }
                }
                if s.corpus == 0 {
                    d.push(Diagnostic::new("chain.corpus", "corpus must be nonempty"));
                }
            }
        },
        Command::Harmonic => match &c.harmonic {
            None => d.push(missing("harmonic")),
            Some(s) => check_harmonic(s, &mut d),
        },
        Command::Cover => match &c.cover {
            None => d.push(missing("cover")),
            Some(s) => {
                check_nu("cover.nu", &s.nu, &mut d);
                if s.k > 60 {
                    d.push(Diagnostic::new("cover.k", "K above 60 is not supported"));
                }
            }
        },
        Command::Weight => match &c.weight {
            None => d.push(missing("weight")),
            Some(s) => {
                check_nu("weight.nu", &s.nu, &mut d);
                if s.k > 60 {
                    d.push(Diagnostic::new("weight.k", "K above 60 is not supported"));
                }
                if !(0.01..=1.0).contains(&s.ramp_fraction) {
                    d.push(Diagnostic::new("weight.ramp_fraction", "must lie in [1/100, 1]"));
                }
                if !(s.patch_radius > 0.0 && s.patch_mesh > 0.0 && s.patch_mesh <= s.patch_radius) {
                    d.push(Diagnostic::new("weight", "need 0 < patch_mesh <= patch_radius"));
                }
            }
        },
    }
    d
}

fn check_tol(path: &str, tol: f64, d: &mut Vec<Diagnostic>) {
    if !(tol > 0.0 && tol < 1.0) {
        d.push(Diagnostic::new(path, "tolerance must lie in (0,1)"));
    }
}

fn check_harmonic(s: &HarmonicSection, d: &mut Vec<Diagnostic>) {
    let [a, b] = s.hole;
    if !(0.0 <= a && a < b && b <= 1.0) {
        d.push(Diagnostic::new("harmonic.hole", "hole must be a subinterval of [0,1]"));
    }
    if s.r.is_empty() || s.r.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        d.push(Diagnostic::new("harmonic.r", "need at least one positive finite r"));
    }
    if s.t.is_empty() {
        d.push(Diagnostic::new("harmonic.t", "need at least one start point"));
    }
    for (i, &t) in s.t.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) || (a < t && t < b) {
            d.push(Diagnostic::new(
                format!("harmonic.t[{i}]"),
                "start point must lie in I minus the slit",
            ));
        }
    }
    let rmin = s.r.iter().copied().fold(f64::INFINITY, f64::min);
    let limit = rmin.min(b - a) / 10.0;
    if !(s.shell > 0.0 && s.shell < limit) {
        d.push(Diagnostic::new(
            "harmonic.shell",
            format!("shell must lie in (0, {limit})"),
        ));
    }
    if s.walks == 0 {
        d.push(Diagnostic::new("harmonic.walks", "need at least one walk"));
    }
    if s.degree == 0 || s.degree > 1000 {
        d.push(Diagnostic::new("harmonic.degree", "degree must lie in 1..=1000"));
    }
}

impl ExperimentConfig {
    /// Exact sets, with the global seed standing in for a missing random-set seed.
    pub fn build_set(&self, which: &SetConfig) -> crate::Result<IntervalSet> {
        use crate::generate::{make_cantor, make_random_porous};
        match which {
            SetConfig::Cantor { base, digits, depth } => make_cantor(&CantorSpec::new(*base, digits.clone(), *depth)?),
            SetConfig::Random { nu, depth, seed } => {
                make_random_porous(&parse_rational(nu)?, *depth, seed.unwrap_or(self.seed))
            }
            SetConfig::Intervals { intervals } => {
                let mut out = Vec::with_capacity(intervals.len());
                for [a, b] in intervals {
                    out.push(Interval::new(parse_rational(a)?, parse_rational(b)?)?);
                }
                Ok(IntervalSet::from_intervals(out))
            }
        }
    }

    /// `(X, Y)`, with `Y = X` when no `[y]` table is given.
    pub fn sets(&self) -> crate::Result<(IntervalSet, IntervalSet)> {
        let x = match &self.x {
            Some(s) => self.build_set(s)?,
            None => IntervalSet::empty(),
        };
        let y = match &self.y {
            Some(s) => self.build_set(s)?,
            None => x.clone(),
        };
        Ok((x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
schema = 1
command = "sweep"
seed = 3

[x]
kind = "cantor"
base = 3
digits = [0, 2]
depth = 5

[sweep]
ns = [27, 81, 243]
"#;

    #[test]
    fn valid_config_has_no_diagnostics() {
        let c = parse_config(SWEEP).unwrap();
        assert_eq!(c.command, Command::Sweep);
        assert_eq!(c.sweep.as_ref().unwrap().tol, 1e-10);
        assert!(validate(&c).is_empty());
    }

    #[test]
    fn unknown_keys_all_reported() {
        let text = SWEEP
            .replace("seed = 3", "seed = 3\ncolour = 1")
            .replace("depth = 5", "depth = 5\nwidth = 2");
        let d = parse_config(&text).unwrap_err();
        let paths: Vec<&str> = d.iter().map(|x| x.path.as_str()).collect();
        assert!(paths.contains(&"colour"));
        assert!(paths.contains(&"x.width"));
    }

    #[test]
    fn band_constraint_named() {
        let text = r#"
schema = 1
command = "holes"
[x]
kind = "cantor"
base = 3
digits = [0, 2]
depth = 4
[holes]
nu = "1/3"
k = 3
n = 256
k0 = 4
"#;
        let d = parse_config(text).unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, "holes.k0");
        assert!(d[0].message.contains("2^(k+k0) <= N/4"));
    }

    #[test]
    fn lists_every_violation() {
        let text = r#"
schema = 2
command = "porosity"
[x]
kind = "random"
nu = "1/2"
depth = 0
"#;
        let d = parse_config(text).unwrap_err();
        let paths: Vec<&str> = d.iter().map(|x| x.path.as_str()).collect();
        assert_eq!(paths, vec!["schema", "x.nu", "x.depth", "porosity"]);
    }

    #[test]
    fn interval_sets_build() {
        let text = r#"
schema = 1
command = "porosity"
[x]
kind = "intervals"
intervals = [["0", "1/3"], ["2/3", "1"]]
[porosity]
nu = "1/4"
alpha0 = "1/8"
"#;
        let c = parse_config(text).unwrap();
        let (x, y) = c.sets().unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x, y);
    }
}

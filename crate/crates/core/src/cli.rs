//! Command-line front end.
//!
//! Every setting is a `key = value` pair drawn from one table. Values are
//! resolved with the precedence flags > config file > defaults, normalized
//! (numbers in shortest round-trip form) and echoed as `# key = value` lines at
//! the top of each CSV, so a header parses back into the same [`RunConfig`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Arg, ArgAction, ArgMatches, Command as ClapCommand};
use serde_json::json;

use crate::coupled::{self, CoupledParams, Interaction};
use crate::disorder::{DisorderKind, DisorderSpec, Estimator, QuenchPlan};
use crate::doublejc::{self, grid_axis, DoubleJcConfig, Family, RegionGrid, RegionScanConfig};
use crate::series::{time_grid, TimeSeries};
use crate::singlejc::{self, SingleJcConfig};
use crate::{Error, Result};

pub const TOOL: &str = concat!("glassyjc ", env!("CARGO_PKG_VERSION"));
pub const THREADS_ENV: &str = "GLASSYJC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Inversion,
    ApEntanglement,
    Concurrence,
    EsdRegion,
    Coupled,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Inversion,
        Command::ApEntanglement,
        Command::Concurrence,
        Command::EsdRegion,
        Command::Coupled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Inversion => "inversion",
            Command::ApEntanglement => "ap-entanglement",
            Command::Concurrence => "concurrence",
            Command::EsdRegion => "esd-region",
            Command::Coupled => "coupled",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Command::Inversion => "Population inversion of the single JC model",
            Command::ApEntanglement => "Atom-photon entanglement of the single JC model",
            Command::Concurrence => "Atom-atom concurrence of the double JC model",
            Command::EsdRegion => "Sudden-death persistence over (strength A, strength B, alpha)",
            Command::Coupled => "Double JC model with Ising or XY atom-atom coupling",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Real,
    Positive,
    Count,
    Seed,
    Flag,
    Kind,
    KindOrClean,
    Pair,
    Axis,
    Family,
    Interaction,
    Estimator,
    Method,
}

struct Key {
    name: &'static str,
    value: Value,
    commands: u8,
    help: &'static str,
}

const INV: u8 = 1 << Command::Inversion as u8;
const AP: u8 = 1 << Command::ApEntanglement as u8;
const CONC: u8 = 1 << Command::Concurrence as u8;
const REGION: u8 = 1 << Command::EsdRegion as u8;
const COUP: u8 = 1 << Command::Coupled as u8;
const ALL: u8 = INV | AP | CONC | REGION | COUP;

const KEYS: &[Key] = &[
    Key { name: "nbar", value: Value::Positive, commands: INV | AP, help: "mean photon number" },
    Key { name: "dn", value: Value::Positive, commands: INV | AP, help: "photon-number standard deviation" },
    Key { name: "g", value: Value::Positive, commands: INV | AP | REGION | COUP, help: "atom-cavity coupling" },
    Key { name: "ga", value: Value::Positive, commands: CONC, help: "coupling of atom A" },
    Key { name: "gb", value: Value::Positive, commands: CONC, help: "coupling of atom B" },
    Key { name: "family", value: Value::Family, commands: CONC, help: "initial state family: psi or phi" },
    Key { name: "alpha", value: Value::Real, commands: CONC | COUP, help: "initial-state angle in [0, pi/2]" },
    Key { name: "interaction", value: Value::Interaction, commands: COUP, help: "ising or xy" },
    Key { name: "jz", value: Value::Real, commands: COUP, help: "Ising coupling" },
    Key { name: "j", value: Value::Real, commands: COUP, help: "XY coupling" },
    Key { name: "gamma", value: Value::Real, commands: COUP, help: "XY anisotropy" },
    Key { name: "omega", value: Value::Real, commands: COUP, help: "excitation frequency" },
    Key { name: "model", value: Value::KindOrClean, commands: INV | AP, help: "disorder kind or `clean`" },
    Key { name: "s", value: Value::Real, commands: INV | AP, help: "disorder strength" },
    Key { name: "disorder", value: Value::Pair, commands: CONC | COUP, help: "kind:strength[,kind:strength] for atoms A and B" },
    Key { name: "kind", value: Value::Kind, commands: REGION, help: "disorder kind of the scan" },
    Key { name: "grid", value: Value::Axis, commands: REGION, help: "strength axis lo:hi:step (both atoms)" },
    Key { name: "alpha-grid", value: Value::Axis, commands: REGION, help: "alpha axis lo:hi:step" },
    Key { name: "horizon", value: Value::Positive, commands: REGION, help: "scan horizon in g t" },
    Key { name: "method", value: Value::Method, commands: INV, help: "auto, closed or mc" },
    Key { name: "samples", value: Value::Count, commands: ALL, help: "disorder realizations" },
    Key { name: "estimator", value: Value::Estimator, commands: ALL, help: "auto, mean or median" },
    Key { name: "seed", value: Value::Seed, commands: ALL, help: "master seed" },
    Key { name: "bootstrap", value: Value::Seed, commands: ALL, help: "bootstrap resamples for median spreads" },
    Key { name: "tmax-tr", value: Value::Positive, commands: INV | AP, help: "horizon in revival periods" },
    Key { name: "dt-tr", value: Value::Positive, commands: INV | AP, help: "time step in revival periods" },
    Key { name: "tmax", value: Value::Positive, commands: CONC | COUP, help: "horizon in g t" },
    Key { name: "dt", value: Value::Positive, commands: CONC | REGION | COUP, help: "time step in g t" },
    Key { name: "eps", value: Value::Real, commands: CONC | REGION, help: "dead-concurrence threshold" },
    Key { name: "min-gap", value: Value::Positive, commands: CONC | REGION, help: "shortest death interval in g t" },
    Key { name: "saturation", value: Value::Positive, commands: CONC | COUP, help: "trailing fraction averaged for the saturation value" },
    Key { name: "json", value: Value::Flag, commands: ALL, help: "also write a JSON mirror" },
    Key { name: "plot", value: Value::Flag, commands: ALL, help: "also write matplotlib scripts" },
];

fn default_for(key: &str, command: Command) -> &'static str {
    match (key, command) {
        ("nbar", _) => "50",
        ("dn", _) => "2",
        ("g" | "ga" | "gb" | "omega", _) => "1",
        ("family", _) => "phi",
        ("alpha", _) => "0.5235987755982988",
        ("interaction", _) => "ising",
        ("jz" | "j", _) => "0.1",
        ("gamma", _) => "0.5",
        ("model", _) => "clean",
        ("s", _) => "0",
        ("disorder", _) => "clean,clean",
        ("kind", _) => "gaussian",
        ("grid", _) => "0:1:0.05",
        ("alpha-grid", _) => "0:1.5707963267948966:0.04363323129985824",
        ("horizon", _) => "25",
        ("method" | "estimator", _) => "auto",
        ("samples", _) => "5000",
        ("seed", _) => "24301",
        ("bootstrap", _) => "100",
        ("tmax-tr", _) => "3",
        ("dt-tr", _) => "0.002",
        ("tmax", Command::Coupled) => "60",
        ("tmax", _) => "25",
        ("dt", Command::Coupled) => "0.05",
        ("dt", _) => "0.005",
        ("eps", _) => "1e-10",
        ("min-gap", _) => "0.05",
        ("saturation", _) => "0.2",
        ("json" | "plot", _) => "false",
        _ => unreachable!("no default for {key}"),
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(format!("`{key}` expects a number, got `{raw}`")))
}

fn parse_spec(raw: &str) -> Result<DisorderSpec> {
    raw.parse()
}

fn fmt_spec(s: &DisorderSpec) -> String {
    if s.is_degenerate() {
        "clean".into()
    } else {
        format!("{}:{}", s.kind(), fmt_f64(s.strength()))
    }
}

fn parse_axis(key: &str, raw: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("`{key}` expects lo:hi:step, got `{raw}`")));
    }
    let (lo, hi, step) = (
        parse_f64(key, parts[0])?,
        parse_f64(key, parts[1])?,
        parse_f64(key, parts[2])?,
    );
    grid_axis(lo, hi, step).map_err(|e| Error::config(e.to_string()))?;
    Ok((lo, hi, step))
}

/// Checks a raw value and returns its canonical spelling.
fn normalize(key: &Key, raw: &str) -> Result<String> {
    let bad = |what: &str| Error::config(format!("`{}` expects {what}, got `{raw}`", key.name));
    let raw = raw.trim();
    Ok(match key.value {
        Value::Real => fmt_f64(parse_f64(key.name, raw)?),
        Value::Positive => {
            let x = parse_f64(key.name, raw)?;
            if x <= 0.0 {
                return Err(bad("a positive number"));
            }
            fmt_f64(x)
        }
        Value::Count => match raw.parse::<usize>() {
            Ok(n) if n > 0 => n.to_string(),
            _ => return Err(bad("a positive integer")),
        },
        Value::Seed => raw.parse::<u64>().map_err(|_| bad("a non-negative integer"))?.to_string(),
        Value::Flag => match raw {
            "true" | "1" | "yes" | "on" => "true".into(),
            "false" | "0" | "no" | "off" => "false".into(),
            _ => return Err(bad("true or false")),
        },
        Value::Kind => raw.parse::<DisorderKind>()?.to_string(),
        Value::KindOrClean => {
            if raw.eq_ignore_ascii_case("clean") {
                "clean".into()
            } else {
                raw.parse::<DisorderKind>()?.to_string()
            }
        }
        Value::Pair => {
            let specs = raw
                .split(',')
                .map(parse_spec)
                .collect::<Result<Vec<_>>>()?;
            match specs.as_slice() {
                [one] => format!("{},{}", fmt_spec(one), fmt_spec(one)),
                [a, b] => format!("{},{}", fmt_spec(a), fmt_spec(b)),
                _ => return Err(bad("one or two disorder specs")),
            }
        }
        Value::Axis => {
            let (lo, hi, step) = parse_axis(key.name, raw)?;
            format!("{}:{}:{}", fmt_f64(lo), fmt_f64(hi), fmt_f64(step))
        }
        Value::Family => raw.parse::<Family>()?.to_string(),
        Value::Interaction => match raw.to_ascii_lowercase().as_str() {
            "ising" => "ising".into(),
            "xy" => "xy".into(),
            _ => return Err(bad("ising or xy")),
        },
        Value::Estimator => {
            if raw.eq_ignore_ascii_case("auto") {
                "auto".into()
            } else {
                raw.parse::<Estimator>()?.to_string()
            }
        }
        Value::Method => match raw.to_ascii_lowercase().as_str() {
            "auto" | "closed" | "mc" => raw.to_ascii_lowercase(),
            _ => return Err(bad("auto, closed or mc")),
        },
    })
}

fn key(name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.name == name)
}

/// A fully resolved run: the command and every applicable setting, canonicalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    command: Command,
    values: BTreeMap<&'static str, String>,
}

impl RunConfig {
    /// Defaults overlaid by `overrides` (later entries win).
    pub fn resolve<'a>(
        command: Command,
        overrides: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        for k in KEYS.iter().filter(|k| k.commands & command.bit() != 0) {
            values.insert(k.name, normalize(k, default_for(k.name, command))?);
        }
        for (name, raw) in overrides {
            let name = name.trim().replace('_', "-");
            let k = key(&name).ok_or_else(|| Error::config(format!("unknown setting `{name}`")))?;
            if k.commands & command.bit() == 0 {
                return Err(Error::config(format!(
                    "setting `{name}` does not apply to `{}`",
                    command.name()
                )));
            }
            values.insert(k.name, normalize(k, raw)?);
        }
        Ok(Self { command, values })
    }

    pub fn defaults(command: Command) -> Self {
        Self::resolve(command, []).expect("defaults are valid")
    }

    pub fn command(&self) -> Command {
        self.command
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    /// `key = value` lines in table order, starting with the command.
    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![format!("command = {}", self.command.name())];
        for k in KEYS {
            if let Some(v) = self.values.get(k.name) {
                out.push(format!("{} = {}", k.name, v));
            }
        }
        out
    }

    /// Rebuilds a config from the `# key = value` lines of an output file.
    pub fn from_header(text: &str) -> Result<Self> {
        let mut command = None;
        let mut pairs = Vec::new();
        for line in text.lines() {
            let Some(body) = line.strip_prefix('#') else { break };
            let body = body.trim();
            if body.starts_with('@') {
                continue;
            }
            if let Some((k, v)) = body.split_once('=') {
                let (k, v) = (k.trim(), v.trim());
                if k == "command" {
                    command = Some(v.parse::<Command>()?);
                } else {
                    pairs.push((k.to_string(), v.to_string()));
                }
            }
        }
        let command = command.ok_or_else(|| Error::config("header has no command line"))?;
        Self::resolve(command, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    fn str(&self, name: &str) -> &str {
        self.get(name).unwrap_or_else(|| panic!("`{name}` not set for {}", self.command.name()))
    }

    fn f64(&self, name: &str) -> f64 {
        self.str(name).parse().expect("normalized number")
    }

    fn u64(&self, name: &str) -> u64 {
        self.str(name).parse().expect("normalized integer")
    }

    fn flag(&self, name: &str) -> bool {
        self.str(name) == "true"
    }

    fn axis(&self, name: &str) -> Vec<f64> {
        let (lo, hi, step) = parse_axis(name, self.str(name)).expect("normalized axis");
        grid_axis(lo, hi, step).expect("normalized axis")
    }

    fn disorder_pair(&self) -> Result<(DisorderSpec, DisorderSpec)> {
        let (a, b) = self.str("disorder").split_once(',').expect("normalized pair");
        Ok((parse_spec(a)?, parse_spec(b)?))
    }

    fn plan(&self, specs: &[DisorderSpec]) -> Result<QuenchPlan> {
        let estimator = match self.str("estimator") {
            "auto" => {
                if specs.iter().any(|s| s.kind() == DisorderKind::Cauchy) {
                    Estimator::Median
                } else {
                    Estimator::Mean
                }
            }
            e => e.parse()?,
        };
        let plan = QuenchPlan {
            samples: self.u64("samples") as usize,
            estimator,
            master_seed: self.u64("seed"),
            bootstrap_resamples: self.u64("bootstrap") as usize,
            ..QuenchPlan::default()
        };
        plan.validate_for(specs)?;
        Ok(plan)
    }

    fn single_spec(&self) -> Result<DisorderSpec> {
        match self.str("model") {
            "clean" => Ok(DisorderSpec::clean()),
            k => DisorderSpec::new(k.parse()?, self.f64("s")),
        }
    }
}

/// A table to be written as CSV (and optionally JSON).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// `@key = value` metadata lines.
    pub meta: Vec<(String, String)>,
}

impl Table {
    fn from_series(series: &TimeSeries, tr: Option<f64>) -> Self {
        let rows = series
            .iter()
            .map(|(t, v, s)| match tr {
                Some(tr) => vec![t, t / tr, v, s],
                None => vec![t, v, s],
            })
            .collect();
        let columns = match tr {
            Some(_) => vec!["t", "t_over_tr", "value", "spread"],
            None => vec!["t", "value", "spread"],
        };
        Self {
            columns,
            rows,
            meta: Vec::new(),
        }
    }

    pub fn to_csv(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# @tool = {TOOL}");
        for line in config.header_lines() {
            let _ = writeln!(out, "# {line}");
        }
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# @{k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, config: &RunConfig) -> String {
        let cfg: serde_json::Map<String, serde_json::Value> = std::iter::once((
            "command".to_string(),
            json!(config.command.name()),
        ))
        .chain(config.values.iter().map(|(k, v)| (k.to_string(), json!(v))))
        .collect();
        let meta: serde_json::Map<String, serde_json::Value> =
            self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({
            "tool": TOOL,
            "config": cfg,
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }
}

/// What a run produced, in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub warnings: Vec<String>,
    /// Region scans: alpha values, one plot panel each.
    pub panels: Vec<f64>,
}

/// Validates the config, computes, and returns the table.
pub fn compute(config: &RunConfig) -> Result<RunOutput> {
    match config.command {
        Command::Inversion | Command::ApEntanglement => single(config),
        Command::Concurrence => concurrence(config),
        Command::EsdRegion => region(config),
        Command::Coupled => coupled_run(config),
    }
}

fn single(config: &RunConfig) -> Result<RunOutput> {
    let photons = singlejc::photon_weights(config.f64("nbar"), config.f64("dn"))?;
    let warnings: Vec<String> = photons.warning().into_iter().collect();
    let cfg = SingleJcConfig::new(config.f64("g"), photons)?;
    let spec = config.single_spec()?;
    let plan = config.plan(&[spec])?;
    let tr = singlejc::revival_period(&cfg);
    let times = time_grid(config.f64("tmax-tr") * tr, config.f64("dt-tr") * tr)?;
    let series = if config.command == Command::Inversion {
        let closed_available = singlejc::inversion_closed_form(&cfg, &spec, 0.0).is_some();
        match (config.str("method"), closed_available) {
            ("closed", false) => {
                return Err(Error::config(
                    "cauchy disorder has no closed form; use method = mc",
                ))
            }
            ("closed", true) | ("auto", true) => singlejc::inversion_closed_series(&cfg, &spec, &times)?,
            _ => singlejc::inversion_quenched_series(&cfg, &spec, &plan, &times)?,
        }
    } else {
        singlejc::ap_entanglement_series(&cfg, &spec, &plan, &times)?
    };
    let mut table = Table::from_series(&series, Some(tr));
    table.meta.push(("revival_period".into(), fmt_f64(tr)));
    table.meta.push(("estimator".into(), plan.estimator.to_string()));
    for w in &warnings {
        table.meta.push(("warning".into(), w.clone()));
    }
    Ok(RunOutput { table, warnings, panels: Vec::new() })
}

fn concurrence(config: &RunConfig) -> Result<RunOutput> {
    let family: Family = config.str("family").parse()?;
    let cfg = DoubleJcConfig::new(config.f64("alpha"), config.f64("ga"), config.f64("gb"), family)?;
    let (a, b) = config.disorder_pair()?;
    let plan = config.plan(&[a, b])?;
    let times = time_grid(config.f64("tmax"), config.f64("dt"))?;
    let series = doublejc::concurrence_quenched_series(&cfg, &a, &b, &plan, &times)?;
    let mut table = Table::from_series(&series, None);
    table.meta.push(("estimator".into(), plan.estimator.to_string()));
    esd_meta(&mut table, &series, config);
    saturation_meta(&mut table, &series, config)?;
    Ok(RunOutput { table, warnings: Vec::new(), panels: Vec::new() })
}

fn esd_meta(table: &mut Table, series: &TimeSeries, config: &RunConfig) {
    match doublejc::detect_esd(series, config.f64("eps"), config.f64("min-gap")) {
        Ok(r) => {
            let iv: Vec<String> = r
                .death_intervals
                .iter()
                .map(|(a, b)| format!("{}:{}", fmt_f64(*a), fmt_f64(*b)))
                .collect();
            table.meta.push(("esd_intervals".into(), iv.join(" ")));
            table.meta.push(("touch_points".into(), r.touch_points.len().to_string()));
        }
        Err(e) => table.meta.push(("esd".into(), format!("skipped: {e}"))),
    }
}

fn saturation_meta(table: &mut Table, series: &TimeSeries, config: &RunConfig) -> Result<()> {
    let sat = series.saturation(config.f64("saturation").min(1.0))?;
    table.meta.push(("saturation".into(), fmt_f64(sat.estimate)));
    table.meta.push(("saturation_spread".into(), fmt_f64(sat.spread)));
    Ok(())
}

fn region(config: &RunConfig) -> Result<RunOutput> {
    let kind: DisorderKind = config.str("kind").parse()?;
    let strengths = config.axis("grid");
    let alphas = config.axis("alpha-grid");
    let specs = strengths
        .iter()
        .map(|&s| DisorderSpec::new(kind, s))
        .collect::<Result<Vec<_>>>()?;
    let plan = config.plan(&specs)?;
    let scan = RegionScanConfig {
        kind,
        g: config.f64("g"),
        plan,
        horizon: config.f64("horizon"),
        dt: config.f64("dt"),
        eps: config.f64("eps"),
        min_gap: config.f64("min-gap"),
    };
    let grid = RegionGrid::square(strengths, alphas.clone());
    let field = doublejc::esd_region_scan(&grid, &scan)?;
    let mut rows = Vec::with_capacity(grid.cells());
    for (ia, &sa) in grid.strengths_a.iter().enumerate() {
        for (ib, &sb) in grid.strengths_b.iter().enumerate() {
            for (k, &al) in grid.alphas.iter().enumerate() {
                rows.push(vec![sa, sb, al, if field.get(ia, ib, k) { 1.0 } else { 0.0 }]);
            }
        }
    }
    let table = Table {
        columns: vec!["strength_a", "strength_b", "alpha", "esd"],
        rows,
        meta: vec![
            ("estimator".into(), plan.estimator.to_string()),
            ("fraction_true".into(), fmt_f64(field.fraction_true())),
        ],
    };
    Ok(RunOutput { table, warnings: Vec::new(), panels: alphas })
}

fn coupled_run(config: &RunConfig) -> Result<RunOutput> {
    let interaction = match config.str("interaction") {
        "ising" => Interaction::Ising { jz: config.f64("jz") },
        _ => Interaction::Xy {
            j: config.f64("j"),
            gamma: config.f64("gamma"),
        },
    };
    let params = CoupledParams {
        g: config.f64("g"),
        omega: config.f64("omega"),
        interaction,
    };
    params.validate()?;
    let alpha = config.f64("alpha");
    DoubleJcConfig::new(alpha, params.g, params.g, Family::Phi)?;
    let (a, b) = config.disorder_pair()?;
    let plan = config.plan(&[a, b])?;
    let mut warnings = Vec::new();
    if coupled::is_experimental(&a) || coupled::is_experimental(&b) {
        warnings.push("non-gaussian disorder in the coupled model is experimental".to_string());
    }
    let times = time_grid(config.f64("tmax"), config.f64("dt"))?;
    let series = coupled::coupled_quenched_series(&params, alpha, &a, &b, &plan, &times)?;
    let mut table = Table::from_series(&series, None);
    table.meta.push(("estimator".into(), plan.estimator.to_string()));
    saturation_meta(&mut table, &series, config)?;
    for w in &warnings {
        table.meta.push(("warning".into(), w.clone()));
    }
    Ok(RunOutput { table, warnings, panels: Vec::new() })
}

fn series_script(csv_name: &str, config: &RunConfig, panel: Option<(usize, f64)>) -> String {
    let (xcol, xlabel, ylabel) = match config.command {
        Command::Inversion => ("t_over_tr", "t / T_R", "W"),
        Command::ApEntanglement => ("t_over_tr", "t / T_R", "E (ebits)"),
        _ => ("t", "g t", "C"),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# generated by {TOOL}");
    s.push_str("from pathlib import Path\n\nimport matplotlib.pyplot as plt\nimport numpy as np\n\n");
    let _ = writeln!(s, "csv = Path(__file__).with_name({csv_name:?})");
    s.push_str("data = np.genfromtxt(csv, delimiter=\",\", comments=\"#\", names=True)\n");
    match panel {
        None => {
            s.push_str("fig, ax = plt.subplots(figsize=(8, 4))\n");
            let _ = writeln!(s, "ax.plot(data[{xcol:?}], data[\"value\"], lw=0.8)");
            if config.command != Command::Inversion {
                let _ = writeln!(
                    s,
                    "ax.fill_between(data[{xcol:?}], data[\"value\"] - data[\"spread\"], data[\"value\"] + data[\"spread\"], alpha=0.3, lw=0)"
                );
            }
            let _ = writeln!(s, "ax.set_xlabel({xlabel:?})\nax.set_ylabel({ylabel:?})");
        }
        Some((k, alpha)) => {
            let _ = writeln!(s, "alpha = {}", fmt_f64(alpha));
            s.push_str("sel = np.isclose(data[\"alpha\"], alpha, rtol=0, atol=1e-12)\n");
            s.push_str("sa = np.unique(data[\"strength_a\"][sel])\nsb = np.unique(data[\"strength_b\"][sel])\n");
            s.push_str("z = data[\"esd\"][sel].reshape(len(sa), len(sb))\n");
            s.push_str("fig, ax = plt.subplots(figsize=(5, 4))\n");
            s.push_str("ax.pcolormesh(sb, sa, z, shading=\"nearest\", cmap=\"Greys\", vmin=0, vmax=1)\n");
            s.push_str("ax.set_xlabel(\"strength B\")\nax.set_ylabel(\"strength A\")\n");
            let _ = writeln!(s, "ax.set_title(\"panel {k}: alpha = %.4f\" % alpha)");
        }
    }
    s.push_str("fig.tight_layout()\n");
    let _ = writeln!(s, "fig.savefig(csv.with_suffix(\"\").as_posix() + {:?})", match panel {
        None => ".png".to_string(),
        Some((k, _)) => format!("_alpha{k:03}.png"),
    });
    s
}

/// Plot scripts for an output written at `csv_path`: `(file name, contents)`.
pub fn emit_plot_scripts(csv_path: &Path, config: &RunConfig, out: &RunOutput) -> Vec<(PathBuf, String)> {
    let csv_name = csv_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = csv_path.with_extension("");
    let stem_name = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if out.panels.is_empty() {
        return vec![(stem.with_extension("py"), series_script(&csv_name, config, None))];
    }
    let mut files = Vec::new();
    let mut index = format!("# generated by {TOOL}\n# one script per alpha panel of {csv_name}\n");
    for (k, &alpha) in out.panels.iter().enumerate() {
        let name = format!("{stem_name}_alpha{k:03}.py");
        let _ = writeln!(index, "{name}\talpha = {}", fmt_f64(alpha));
        files.push((stem.with_file_name(&name), series_script(&csv_name, config, Some((k, alpha)))));
    }
    files.push((stem.with_file_name(format!("{stem_name}_index.txt")), index));
    files
}

/// Writes every file or none: each goes to a temporary sibling first and is
/// renamed into place only after all have been staged.
fn write_all_atomic(files: &[(PathBuf, String)]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, body) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    }
    Ok(())
}

/// Computes and writes the CSV plus any requested mirrors and scripts.
pub fn run(config: &RunConfig, output: &Path) -> Result<Vec<PathBuf>> {
    let out = compute(config)?;
    let mut files = vec![(output.to_path_buf(), out.table.to_csv(config))];
    if config.flag("json") {
        files.push((output.with_extension("json"), out.table.to_json(config)));
    }
    if config.flag("plot") {
        files.extend(emit_plot_scripts(output, config, &out));
    }
    write_all_atomic(&files)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

/// Reads a flat `key = value` file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config file {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("{}:{}: expected `key = value`", path.display(), n + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn clap_command() -> ClapCommand {
    let mut root = ClapCommand::new("glassyjc")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Disordered Jaynes-Cummings dynamics: inversion, entanglement, sudden death")
        .subcommand_required(true)
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .env(THREADS_ENV)
                .value_parser(clap::value_parser!(usize))
                .help("worker threads (0 = all cores)"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_parser(clap::value_parser!(PathBuf))
                .help("flat key = value settings file"),
        );
    for cmd in Command::ALL {
        let mut sub = ClapCommand::new(cmd.name()).about(cmd.about()).arg(
            Arg::new("output")
                .short('o')
                .long("output")
                .value_parser(clap::value_parser!(PathBuf))
                .help("CSV path [default: <command>.csv]"),
        );
        for k in KEYS.iter().filter(|k| k.commands & cmd.bit() != 0) {
            let mut arg = Arg::new(k.name).long(k.name).help(k.help);
            arg = if k.value == Value::Flag {
                arg.action(ArgAction::SetTrue)
            } else {
                arg.allow_negative_numbers(true)
            };
            if k.name == "grid" {
                arg = arg.alias("strength-grid");
            }
            sub = sub.arg(arg);
        }
        root = root.subcommand(sub);
    }
    root
}

/// What `main` should do after parsing.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config: RunConfig,
    pub output: PathBuf,
    pub threads: Option<usize>,
}

fn invocation(m: &ArgMatches) -> Result<Invocation> {
    let (name, sub) = m.subcommand().expect("subcommand required");
    let command: Command = name.parse()?;
    let mut pairs: Vec<(String, String)> = Vec::new();
    if let Some(path) = m.get_one::<PathBuf>("config") {
        pairs.extend(read_config_file(path)?);
    }
    for k in KEYS.iter().filter(|k| k.commands & command.bit() != 0) {
        if k.value == Value::Flag {
            if sub.get_flag(k.name) {
                pairs.push((k.name.to_string(), "true".into()));
            }
        } else if let Some(v) = sub.get_one::<String>(k.name) {
            pairs.push((k.name.to_string(), v.clone()));
        }
    }
    let config = RunConfig::resolve(command, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    let output = sub
        .get_one::<PathBuf>("output")
        .cloned()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())));
    Ok(Invocation {
        config,
        output,
        threads: m.get_one::<usize>("threads").copied(),
    })
}

/// Parses arguments; `Ok(None)` when help or version was printed.
pub fn parse_args<I, T>(args: I) -> Result<Option<Invocation>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match clap_command().try_get_matches_from(args) {
        Ok(m) => invocation(&m).map(Some),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = e.print();
                Ok(None)
            }
            _ => Err(Error::config(e.render().to_string().trim().to_string())),
        },
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Validation(_) => 2,
        Error::Numerical { .. } => 3,
        Error::Io(_) => 1,
    }
}

fn error_json(err: &Error) -> String {
    let kind = match err {
        Error::Config(_) => "config",
        Error::Validation(_) => "validation",
        Error::Numerical { .. } => "numerical",
        Error::Io(_) => "io",
    };
    json!({"error": kind, "code": exit_code(err), "message": err.to_string()}).to_string()
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_args(args).and_then(|inv| {
        let Some(inv) = inv else { return Ok(()) };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(inv.threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?;
        pool.install(|| run(&inv.config, &inv.output)).map(|_| ())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_every_command() {
        for c in Command::ALL {
            let cfg = RunConfig::defaults(c);
            assert_eq!(cfg.command(), c);
        }
    }

    #[test]
    fn normalization_and_precedence() {
        let cfg = RunConfig::resolve(
            Command::Concurrence,
            [("alpha", "0.50"), ("disorder", "gaussian:0.10"), ("alpha", "0.25")],
        )
        .unwrap();
        assert_eq!(cfg.get("alpha"), Some("0.25"));
        assert_eq!(cfg.get("disorder"), Some("gaussian:0.1,gaussian:0.1"));
        assert!(RunConfig::resolve(Command::Concurrence, [("nbar", "3")]).is_err());
        assert!(RunConfig::resolve(Command::Inversion, [("samples", "0")]).is_err());
        assert!(RunConfig::resolve(Command::Inversion, [("model", "lorentzian")]).is_err());
    }

    #[test]
    fn header_round_trip() {
        let cfg = RunConfig::resolve(
            Command::EsdRegion,
            [("kind", "cauchy"), ("grid", "0:1:0.25"), ("samples", "10")],
        )
        .unwrap();
        let table = Table {
            columns: vec!["x"],
            rows: vec![vec![1.0]],
            meta: vec![("note".into(), "a = b".into())],
        };
        let csv = table.to_csv(&cfg);
        assert_eq!(RunConfig::from_header(&csv).unwrap(), cfg);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0, 1e-20, 44.42882938158366, -3.5e300] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn cauchy_mean_is_a_config_error() {
        let cfg = RunConfig::resolve(
            Command::Inversion,
            [("model", "cauchy"), ("s", "0.01"), ("estimator", "mean"), ("samples", "10")],
        )
        .unwrap();
        let err = compute(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }
}

//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, lists are comma separated.
//! Every key can also be given on the command line as `--<key> <value>`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::model::WernerParams;
use crate::noise::{MemorySides, NoiseModel};
use crate::protocols::{BaseProtocol, ProtocolKind, ProtocolSpec, TimeModel};

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

pub const KEYS: &[Key] = &[
    key("noise.p", "0.99", "two-qubit gate reliability"),
    key("noise.eta", "0.99", "measurement reliability"),
    key("noise.kappa", "1.0", "inverse memory coherence time (1/s)"),
    key("noise.single_sided_memory", "false", "memory noise on one qubit of a pair only"),
    key("time.t0_s", "0.333e-4", "signal time over one elementary segment (s)"),
    key("time.segment_km", "10", "elementary segment length (km)"),
    key("time.gate_time_s", "0", "extra memory time per operation (s)"),
    key("protocol.kind", "standard", "standard | innsbruck | blind_topped"),
    key("protocol.levels", "11", "number of repeater levels"),
    key("protocol.steps", "3", "purification steps per level, one value or one per level"),
    key("protocol.initial_f", "0.8", "Werner fidelity of the elementary pairs"),
    key("protocol.blind_levels", "0", "topmost levels run blind (blind_topped)"),
    key("protocol.blind_base", "standard", "runner below the blind levels: standard | innsbruck"),
    key("protocol.branching", "2", "pairs connected per level"),
    key("protocol.pump_f", "0.8", "elementary fidelity for the pumping regime column"),
    key("protocol.min_fidelity", "", "fidelity floor on every level for the optimizer (empty: none)"),
    key("protocol.level_cap", "12", "highest level the optimizer tries"),
    key("protocol.max_steps", "6", "most pumping steps per level the optimizer tries"),
    key("regime.levels", "12", "levels listed by the regime table"),
    key("sweep.error_rates", "0.03,0.02,0.01,0.005,0.002,0.001", "values of 1 - p = 1 - eta"),
    key("sweep.coherence_times_s", "1", "values of 1/kappa (s)"),
    key("blind.steps", "3", "purification steps per blind level"),
    key("blind.branching", "2", "pairs connected per blind level"),
    key("blind.levels", "1,2,3,4", "numbers of blind levels"),
    key("blind.p_suc", "0.95,0.9", "per-step success probabilities"),
    key("oracle.samples", "1000", "random input pairs for oracle-check"),
    key("output.path", "", "output file (empty: stdout)"),
    key("output.format", "csv", "csv | json"),
    key("seed", "1", "seed for random inputs"),
];

pub fn find_key(name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.name == name)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Layered settings: defaults, then a config file, then flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
    explicit: BTreeMap<&'static str, String>,
}

impl Settings {
    pub fn new() -> Self {
        Settings {
            values: KEYS.iter().map(|k| (k.name, k.default.to_string())).collect(),
            explicit: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, name: &str, value: &str) -> Result<(), CliError> {
        let k = find_key(name).ok_or_else(|| CliError::Config(format!("unknown key `{name}`")))?;
        self.values.insert(k.name, value.trim().to_string());
        self.explicit.insert(k.name, value.trim().to_string());
        Ok(())
    }

    pub fn merge_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{origin}:{}: expected `key = value`", n + 1)))?;
            self.set(k.trim(), v)
                .map_err(|e| CliError::Config(format!("{origin}:{}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.merge_text(&text, &path.display().to_string())
    }

    pub fn get(&self, name: &str) -> &str {
        self.values.get(name).map(String::as_str).unwrap_or("")
    }

    pub fn is_explicit(&self, name: &str) -> bool {
        self.explicit.contains_key(name)
    }

    pub fn values(&self) -> &BTreeMap<&'static str, String> {
        &self.values
    }

    fn parse<T: FromStr>(&self, name: &str) -> Result<T, CliError> {
        let raw = self.get(name);
        raw.parse()
            .map_err(|_| CliError::Config(format!("{name}: cannot parse `{raw}`")))
    }

    fn parse_list<T: FromStr>(&self, name: &str) -> Result<Vec<T>, CliError> {
        let raw = self.get(name);
        let items: Vec<T> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| CliError::Config(format!("{name}: cannot parse `{s}`")))
            })
            .collect::<Result<_, _>>()?;
        if items.is_empty() {
            return Err(CliError::Config(format!("{name}: empty list")));
        }
        Ok(items)
    }

    fn parse_optional(&self, name: &str) -> Result<Option<f64>, CliError> {
        if self.get(name).is_empty() {
            Ok(None)
        } else {
            self.parse(name).map(Some)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub error_rates: Vec<f64>,
    pub coherence_times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlindGrid {
    pub steps: usize,
    pub branching: usize,
    pub levels: Vec<usize>,
    pub p_suc: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub noise: NoiseModel,
    pub time: TimeModel,
    pub protocol: ProtocolSpec,
    pub pump_f: f64,
    pub min_fidelity: Option<f64>,
    pub level_cap: usize,
    pub max_steps: usize,
    pub regime_levels: usize,
    pub sweep: SweepGrid,
    pub blind: BlindGrid,
    pub oracle_samples: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub settings: Settings,
}

fn domain(e: crate::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn from_settings(settings: Settings) -> Result<Self, CliError> {
        let s = &settings;
        let memory = if s.parse::<bool>("noise.single_sided_memory")? {
            MemorySides::One
        } else {
            MemorySides::Both
        };
        let noise = NoiseModel::new(s.parse("noise.p")?, s.parse("noise.eta")?, s.parse("noise.kappa")?)
            .map_err(domain)?
            .with_memory(memory);
        let time = TimeModel::new(
            s.parse("time.t0_s")?,
            s.parse("time.segment_km")?,
            s.parse("time.gate_time_s")?,
        )
        .map_err(domain)?;

        let kind = match s.get("protocol.kind") {
            "standard" => ProtocolKind::Standard,
            "innsbruck" => ProtocolKind::Innsbruck,
            "blind_topped" => ProtocolKind::BlindTopped,
            other => return Err(CliError::Config(format!("protocol.kind: unknown kind `{other}`"))),
        };
        let blind_base = match s.get("protocol.blind_base") {
            "standard" => BaseProtocol::Standard,
            "innsbruck" => BaseProtocol::Innsbruck,
            other => return Err(CliError::Config(format!("protocol.blind_base: unknown `{other}`"))),
        };
        let steps: Vec<usize> = s.parse_list("protocol.steps")?;
        let levels = if steps.len() > 1 && !s.is_explicit("protocol.levels") {
            steps.len()
        } else {
            s.parse("protocol.levels")?
        };
        let steps_per_level = match steps.len() {
            1 => vec![steps[0]; levels],
            n if n == levels => steps,
            n => {
                return Err(CliError::Config(format!(
                    "protocol.steps has {n} entries for {levels} levels"
                )))
            }
        };
        let protocol = ProtocolSpec {
            kind,
            levels,
            steps_per_level,
            initial: WernerParams::from_fidelity(s.parse("protocol.initial_f")?).map_err(domain)?,
            blind_levels: s.parse("protocol.blind_levels")?,
            blind_base,
            branching: s.parse("protocol.branching")?,
            blind_p_suc: None,
        };
        protocol.validate().map_err(domain)?;

        let format = match s.get("output.format") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::Config(format!("output.format: unknown `{other}`"))),
        };
        let output = match s.get("output.path") {
            "" => None,
            p => Some(PathBuf::from(p)),
        };

        let sweep = SweepGrid {
            error_rates: s.parse_list("sweep.error_rates")?,
            coherence_times: s.parse_list("sweep.coherence_times_s")?,
        };
        if let Some(e) = sweep.error_rates.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(CliError::Config(format!("sweep.error_rates: {e} outside [0, 1]")));
        }
        if let Some(t) = sweep.coherence_times.iter().find(|t| !(**t > 0.0)) {
            return Err(CliError::Config(format!("sweep.coherence_times_s: {t} must be > 0")));
        }
        let blind = BlindGrid {
            steps: s.parse("blind.steps")?,
            branching: s.parse("blind.branching")?,
            levels: s.parse_list("blind.levels")?,
            p_suc: s.parse_list("blind.p_suc")?,
        };

        Ok(RunConfig {
            noise,
            time,
            protocol,
            pump_f: s.parse("protocol.pump_f")?,
            min_fidelity: s.parse_optional("protocol.min_fidelity")?,
            level_cap: s.parse("protocol.level_cap")?,
            max_steps: s.parse("protocol.max_steps")?,
            regime_levels: s.parse("regime.levels")?,
            sweep,
            blind,
            oracle_samples: s.parse("oracle.samples")?,
            output,
            format,
            seed: s.parse("seed")?,
            settings,
        })
    }
}

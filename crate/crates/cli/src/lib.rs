//! `waveqed` command-line front end.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Parser;
use serde_json::{Map, Value};
use waveqed::config::{BandSelector, Command, OmegaE, OutputFormat, RunConfig};
use waveqed::presets::{preset, Series};
use waveqed::scattering::InputKind;
use waveqed::selfenergy::TruncationPolicy;
use waveqed::validation::Fault;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "waveqed", version, about = "Single-photon scattering in a multi-mode rectangular waveguide")]
pub struct Args {
    /// modes, spectrum, phase-map, dressed or validate
    pub command: Command,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Waveguide width in units of the height b.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Emitter frequency, or "mid" for the band midpoint.
    #[arg(long, allow_negative_numbers = true)]
    pub omega_e: Option<OmegaE>,
    #[arg(long, allow_negative_numbers = true)]
    pub rabi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub detuning: Option<f64>,
    /// Number of propagating channels, or an explicit lo:hi interval.
    #[arg(long)]
    pub band: Option<BandSelector>,
    /// scss, sms:<n>, dark, equal or custom:<c1,c2,...>
    #[arg(long)]
    pub input: Option<InputKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub omega_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub rabi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rabi_max: Option<f64>,
    #[arg(long)]
    pub rabi_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub detuning_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub detuning_max: Option<f64>,
    #[arg(long)]
    pub detuning_points: Option<usize>,
    /// Upper frequency for the mode table.
    #[arg(long, allow_negative_numbers = true)]
    pub modes_max: Option<f64>,
    /// Include every coupled mode below this multiple of the band ceiling
    /// in the Lamb shift.
    #[arg(long, allow_negative_numbers = true)]
    pub truncation_multiplier: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output file, or directory for multi-series presets.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// fig2a, fig2c, fig2d, fig3a, fig3b or fig4
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

/// Error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_CONFIG,
            error: error.into(),
        }
    }

    fn domain(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            error: error.into(),
        }
    }
}

impl From<waveqed::Error> for Failure {
    fn from(e: waveqed::Error) -> Self {
        use waveqed::Error::*;
        match e {
            InvalidGeometry(_) | InvalidParameter(_) | InvalidInput(_) => Self::config(e),
            _ => Self::domain(e),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn merge(base: &mut Value, patch: &Map<String, Value>) {
    if let Value::Object(target) = base {
        for (key, value) in patch {
            target.insert(key.clone(), value.clone());
        }
    }
}

fn apply_flags(cfg: &mut RunConfig, args: &Args) -> Outcome<()> {
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = &args.$field { cfg.$field = v.clone(); })*
        };
    }
    set!(a, z0, g, omega_e, rabi, detuning, band, input, omega_points, rabi_points, detuning_points, modes_max, seed, samples, format);
    if args.omega_min.is_some() {
        cfg.omega_min = args.omega_min;
    }
    if args.omega_max.is_some() {
        cfg.omega_max = args.omega_max;
    }
    if let Some(v) = args.rabi_min {
        cfg.rabi_range[0] = v;
    }
    if let Some(v) = args.rabi_max {
        cfg.rabi_range[1] = v;
    }
    if let Some(v) = args.detuning_min {
        cfg.detuning_range[0] = v;
    }
    if let Some(v) = args.detuning_max {
        cfg.detuning_range[1] = v;
    }
    if let Some(multiplier) = args.truncation_multiplier {
        cfg.truncation = TruncationPolicy::CutoffMultiplier { multiplier };
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.truncation.validate()?;
    Ok(())
}

/// Resolves preset, config file and flags, in that order of precedence
/// from lowest to highest, into one config per output series.
pub fn resolve(args: &Args) -> Outcome<Vec<Series>> {
    let file: Map<String, Value> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::config)?;
            match serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(Failure::config)?
            {
                Value::Object(map) => map,
                _ => return Err(Failure::config(anyhow!("{} must hold a JSON object", path.display()))),
            }
        }
        None => Map::new(),
    };
    let preset_name = args
        .preset
        .clone()
        .or_else(|| file.get("preset").and_then(Value::as_str).map(str::to_string));
    let bases: Vec<Series> = match &preset_name {
        Some(name) => preset(name)?,
        None => vec![Series {
            label: String::new(),
            config: RunConfig::new(args.command),
        }],
    };
    bases
        .into_iter()
        .map(|series| {
            let mut value = serde_json::to_value(&series.config).map_err(Failure::config)?;
            merge(&mut value, &file);
            let mut cfg: RunConfig = serde_json::from_value(value)
                .context("invalid configuration")
                .map_err(Failure::config)?;
            apply_flags(&mut cfg, args)?;
            cfg.command = args.command;
            cfg.preset = preset_name.clone();
            Ok(Series {
                label: series.label,
                config: cfg,
            })
        })
        .collect()
}

fn write_output(path: Option<&Path>, content: &str, stdout: &mut dyn Write) -> Outcome<()> {
    match path {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))
                    .map_err(Failure::config)?;
            }
            std::fs::write(path, content)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::config)
        }
        None => stdout
            .write_all(content.as_bytes())
            .context("writing to stdout")
            .map_err(Failure::config),
    }
}

fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn execute(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome<i32> {
    let fault = match args.inject_fault.as_deref() {
        None => None,
        Some("flip-decay-sign") => Some(Fault::FlipDecaySign),
        Some(other) => return Err(Failure::config(anyhow!("unknown fault {other:?}"))),
    };
    let series = resolve(args)?;
    if let Some(threads) = series[0].config.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }

    let multi = series.len() > 1;
    let dir = if multi {
        let dir = series[0].config.out.clone().ok_or_else(|| {
            Failure::config(anyhow!(
                "preset {} writes {} files; pass --out <dir>",
                series[0].config.preset.as_deref().unwrap_or(""),
                series.len()
            ))
        })?;
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(Failure::config)?;
        Some(dir)
    } else {
        None
    };

    let mut code = EXIT_OK;
    for s in &series {
        let cfg = &s.config;
        let produced = match cfg.command {
            Command::Modes => output::modes(cfg, stderr)?,
            Command::Spectrum => output::spectrum(cfg)?,
            Command::PhaseMap => output::phase_map(cfg)?,
            Command::Dressed => output::dressed(cfg)?,
            Command::Validate => {
                let (text, passed) = output::validate(cfg, fault)?;
                if !passed {
                    code = EXIT_VALIDATION;
                }
                text
            }
        };
        let target = match &dir {
            Some(dir) => Some(dir.join(format!(
                "{}_{}.{}",
                cfg.preset.as_deref().unwrap_or("run"),
                s.label,
                extension(cfg.format)
            ))),
            None => cfg.out.clone(),
        };
        write_output(target.as_deref(), &produced, stdout)?;
        if let Some(path) = &target {
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
    }
    Ok(code)
}

/// Runs the tool and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&args, stdout, stderr) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {:#}", failure.error);
            failure.code
        }
    }
}

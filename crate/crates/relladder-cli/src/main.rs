//! Command-line front end: reliabilities, sweeps, generating functions,
//! zeros, failure frequency, and self-verification.

use clap::{Args, Parser, Subcommand};
use relladder::ladder::{format_rational, parse_rational};
use relladder::spectral::{self, ComponentRates, RateSpec};
use relladder::zeros::{self, CriticalCase, Region};
use relladder::{
    expand_graph, oracle_enumerate, verify, ComponentId, Destination, LadderConfig, Preset, Rat,
};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "relladder",
    about = "Exact two-terminal reliability of K4-ladder networks",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON configuration file (full or uniform shorthand schema)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset for a uniform config built from flags
    #[arg(long)]
    preset: Option<String>,
    /// Ladder length (number of cells after the boundary cell)
    #[arg(short)]
    n: Option<usize>,
    /// Edge reliability (decimal or num/den)
    #[arg(short)]
    p: Option<String>,
    /// Node reliability (decimal or num/den)
    #[arg(long)]
    rho: Option<String>,
    /// Destination node of the last cell: S or T
    #[arg(long, default_value = "S")]
    destination: String,
}

impl ConfigArgs {
    fn load(&self) -> Result<LadderConfig, String> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            return LadderConfig::from_json_str(&text).map_err(|e| e.to_string());
        }
        let preset: Preset = self
            .preset
            .as_deref()
            .ok_or("need --config or --preset with -n, -p, --rho")?
            .parse()
            .map_err(|e| format!("{e}"))?;
        let n = self.n.ok_or("uniform config needs -n")?;
        let p = parse_rational(self.p.as_deref().ok_or("uniform config needs -p")?)
            .map_err(|e| e.to_string())?;
        let rho = parse_rational(self.rho.as_deref().ok_or("uniform config needs --rho")?)
            .map_err(|e| e.to_string())?;
        let mut cfg = LadderConfig::uniform(preset, n, &p, &rho).map_err(|e| e.to_string())?;
        cfg.destination = match self.destination.as_str() {
            "S" => Destination::S,
            "T" => Destination::T,
            other => return Err(format!("destination must be S or T, got {other}")),
        };
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Two-terminal reliability of one configuration
    Rel2 {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also print every component sensitivity dRel2/d(component)
        #[arg(long)]
        gradient: bool,
        /// Cross-check against the exact oracle when the graph is small enough
        #[arg(long)]
        oracle: bool,
    },
    /// CSV sweep over (p, rho): reliability, dominant eigenvalue, rate slope
    Sweep {
        #[arg(long)]
        preset: String,
        #[arg(short, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value = "0.05")]
        p_min: String,
        #[arg(long, default_value = "1")]
        p_max: String,
        #[arg(long, default_value = "0.05")]
        p_step: String,
        #[arg(long, default_value = "1")]
        rho_min: String,
        #[arg(long, default_value = "1")]
        rho_max: String,
        #[arg(long, default_value = "0.1")]
        rho_step: String,
        /// Component failure rate used for the asymptotic slope column
        #[arg(long, default_value = "1")]
        lambda: f64,
    },
    /// Exact generating function N(z)/D(z) at rational (p, rho)
    Gf {
        #[arg(long)]
        preset: String,
        #[arg(short)]
        p: String,
        #[arg(long)]
        rho: String,
    },
    /// Complex zeros of the reliability polynomial, optional limiting curve
    Zeros {
        #[arg(long)]
        preset: String,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        rho: String,
        /// Mantissa bits for the root finder
        #[arg(long)]
        precision: Option<usize>,
        /// Output CSV path for roots (default stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also sample the limiting curve into this CSV
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = -1.0)]
        re_min: f64,
        #[arg(long, default_value_t = 6.0)]
        re_max: f64,
        #[arg(long, default_value_t = -4.0)]
        im_min: f64,
        #[arg(long, default_value_t = 4.0)]
        im_max: f64,
        /// Grid resolution per axis for the limiting curve
        #[arg(long, default_value_t = 160)]
        grid: usize,
    },
    /// Availability, failure frequency and failure rate from a rates file
    Freq {
        #[command(flatten)]
        config: ConfigArgs,
        /// JSON rates: {"edge":{"lambda":..},"node":{"lambda":..},"overrides":{...}}
        #[arg(long)]
        rates: PathBuf,
    },
    /// Critical node reliabilities of the zero structures
    Critical {
        /// directed or undirected
        #[arg(long)]
        case: String,
    },
    /// Run the oracle-equivalence and reference-formula suites
    Verify {
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 20260810)]
        seed: u64,
    },
}

fn precision_bits(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("RELLADDER_PRECISION")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(relladder::DEFAULT_PRECISION_BITS)
}

fn sig15(x: f64) -> String {
    format!("{:.14e}", x)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(AppError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

enum AppError {
    Usage(String),
    Numerical(String),
}

fn usage<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Usage(e.to_string())
}

fn numerical<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Numerical(e.to_string())
}

fn run(command: Command) -> Result<u8, AppError> {
    match command {
        Command::Rel2 {
            config,
            gradient,
            oracle,
        } => {
            let cfg = config.load().map_err(AppError::Usage)?;
            let exact = relladder::rel2_exact(&cfg);
            let value = exact.to_f64().unwrap_or(f64::NAN);
            println!("Rel2 = {}", sig15(value));
            println!("exact = {}", format_rational(&exact));
            if gradient {
                let grad = relladder::rel2_gradient_f64(&cfg);
                for (id, g) in grad {
                    println!("dRel2/d({id}) = {}", sig15(g));
                }
            }
            if oracle {
                let graph = expand_graph(&cfg);
                match oracle_enumerate(&graph).or_else(|_| relladder::oracle_factoring(&graph)) {
                    Ok(reference) => {
                        let dev = (&exact - &reference).to_f64().unwrap_or(f64::NAN).abs();
                        println!("oracle = {}", format_rational(&reference));
                        println!("max deviation = {:e}", dev);
                    }
                    Err(e) => eprintln!("warning: oracle skipped: {e}"),
                }
            }
            Ok(EXIT_OK)
        }
        Command::Sweep {
            preset,
            n,
            p_min,
            p_max,
            p_step,
            rho_min,
            rho_max,
            rho_step,
            lambda,
        } => {
            let preset: Preset = preset.parse().map_err(usage)?;
            let parse = |s: &str| parse_rational(s).map_err(usage);
            let (p0, p1, dp) = (parse(&p_min)?, parse(&p_max)?, parse(&p_step)?);
            let (r0, r1, dr) = (parse(&rho_min)?, parse(&rho_max)?, parse(&rho_step)?);
            println!("p,rho,rel2,zeta_plus,lambda_slope,note");
            let mut rho = r0;
            while rho <= r1 {
                let mut p = p0.clone();
                while p <= p1 {
                    let row = sweep_row(preset, n, &p, &rho, lambda);
                    println!("{}", row);
                    p += dp.clone();
                }
                rho += dr.clone();
                if dr.to_f64().unwrap_or(0.0) == 0.0 {
                    break;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Gf { preset, p, rho } => {
            let preset: Preset = preset.parse().map_err(usage)?;
            let p = parse_rational(&p).map_err(usage)?;
            let rho = parse_rational(&rho).map_err(usage)?;
            let gf = spectral::gf_extract(preset, &p, &rho).map_err(numerical)?;
            println!("N(z) = {}", gf.numerator);
            println!("D(z) = {}", gf.denominator);
            Ok(EXIT_OK)
        }
        Command::Zeros {
            preset,
            n,
            rho,
            precision,
            out,
            curve,
            re_min,
            re_max,
            im_min,
            im_max,
            grid,
        } => {
            let preset: Preset = preset.parse().map_err(usage)?;
            let rho = parse_rational(&rho).map_err(usage)?;
            let bits = precision_bits(precision);
            let zeros_out = zeros::ladder_zeros(preset, n, &rho, bits).map_err(numerical)?;
            let csv = zeros::roots_csv(&zeros_out);
            match &out {
                Some(path) => std::fs::write(path, csv).map_err(numerical)?,
                None => print!("{csv}"),
            }
            eprintln!(
                "degree {} at {} bits, max normalized residual {:e}",
                zeros_out.degree,
                zeros_out.set.precision_bits,
                zeros_out.set.max_residual()
            );
            if let Some(curve_path) = curve {
                let sample = zeros::limit_curve(
                    preset,
                    &rho,
                    Region {
                        re_min,
                        re_max,
                        im_min,
                        im_max,
                    },
                    grid,
                )
                .map_err(numerical)?;
                std::fs::write(curve_path, zeros::curve_csv(&sample)).map_err(numerical)?;
            }
            Ok(EXIT_OK)
        }
        Command::Freq { config, rates } => {
            let cfg = config.load().map_err(AppError::Usage)?;
            let rates_text = std::fs::read_to_string(&rates)
                .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", rates.display())))?;
            let rates = parse_rates(&rates_text).map_err(AppError::Usage)?;
            let out = spectral::failure_frequency(&cfg, &rates).map_err(numerical)?;
            println!(
                "A = {}",
                sig15(out.availability.to_f64().unwrap_or(f64::NAN))
            );
            println!(
                "nu_bar = {}",
                sig15(out.frequency.to_f64().unwrap_or(f64::NAN))
            );
            match &out.rate {
                Some(rate) => println!("lambda_bar = {}", sig15(rate.to_f64().unwrap_or(f64::NAN))),
                None => println!("lambda_bar = undefined (zero availability)"),
            }
            if let Some(repair) = &out.repair_frequency {
                println!(
                    "nu_bar_repair = {}",
                    sig15(repair.to_f64().unwrap_or(f64::NAN))
                );
            }
            Ok(EXIT_OK)
        }
        Command::Critical { case } => {
            let case = match case.as_str() {
                "directed" => CriticalCase::Directed,
                "undirected" => CriticalCase::Undirected,
                other => {
                    return Err(AppError::Usage(format!(
                        "case must be directed or undirected, got {other}"
                    )))
                }
            };
            let value = zeros::critical_rho(case).map_err(numerical)?;
            println!("critical rho = {}", sig15(value));
            Ok(EXIT_OK)
        }
        Command::Verify { json, seed } => {
            let report = verify::run_all(seed);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                for check in &report.checks {
                    let tag = if check.passed { "PASS" } else { "FAIL" };
                    if check.detail.is_empty() {
                        println!("{tag} {}", check.name);
                    } else {
                        println!("{tag} {} ({})", check.name, check.detail);
                    }
                }
            }
            if report.all_passed() {
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_VERIFY)
            }
        }
    }
}

fn sweep_row(preset: Preset, n: usize, p: &Rat, rho: &Rat, lambda: f64) -> String {
    let pf = p.to_f64().unwrap_or(f64::NAN);
    let rf = rho.to_f64().unwrap_or(f64::NAN);
    let rel = match LadderConfig::uniform(preset, n, p, rho) {
        Ok(cfg) => sig15(relladder::rel2(&cfg)),
        Err(_) => String::new(),
    };
    let zeta = dominant_eigenvalue(preset, p, rho);
    let slope = match spectral::asymptotic_rate(preset, pf, rf, lambda) {
        Ok((_, slope)) => sig15(slope),
        Err(_) => String::new(),
    };
    let (zeta_str, note) = match zeta {
        Ok(z) => (sig15(z), String::new()),
        Err(e) => (String::new(), e),
    };
    format!(
        "{},{},{},{},{},{}",
        format_rational(p),
        format_rational(rho),
        rel,
        zeta_str,
        slope,
        note
    )
}

fn dominant_eigenvalue(preset: Preset, p: &Rat, rho: &Rat) -> Result<f64, String> {
    let pf = p.to_f64().unwrap_or(f64::NAN);
    let rf = rho.to_f64().unwrap_or(f64::NAN);
    let form = match preset {
        Preset::AngeleDirected => spectral::closed_form_directed(pf, rf).map_err(|e| e.to_string()),
        Preset::AngeleUndirected if rf == 1.0 => {
            spectral::closed_form_undirected_perfect(pf).map_err(|e| e.to_string())
        }
        _ => spectral::numeric_spectrum(preset, p, rho).map_err(|e| e.to_string()),
    }?;
    if form.eigenvalues.is_empty() {
        return Err("empty spectrum".into());
    }
    Ok(form.dominant().re)
}

fn parse_rates(text: &str) -> Result<ComponentRates, String> {
    let root: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let obj = root.as_object().ok_or("rates file must be an object")?;
    let parse_spec = |v: &serde_json::Value| -> Result<RateSpec, String> {
        let o = v.as_object().ok_or("rate entry must be an object")?;
        let lambda = rational_field(o, "lambda")?.ok_or("rate entry needs lambda")?;
        let mu = rational_field(o, "mu")?;
        Ok(RateSpec { lambda, mu })
    };
    let mut rates = ComponentRates::default();
    if let Some(v) = obj.get("edge") {
        rates.edge = Some(parse_spec(v)?);
    }
    if let Some(v) = obj.get("node") {
        rates.node = Some(parse_spec(v)?);
    }
    if let Some(v) = obj.get("overrides") {
        let o = v.as_object().ok_or("overrides must be an object")?;
        let mut map = BTreeMap::new();
        for (key, spec) in o {
            let id = ComponentId::from_str(key).map_err(|e| e.to_string())?;
            map.insert(id, parse_spec(spec)?);
        }
        rates.overrides = map;
    }
    Ok(rates)
}

fn rational_field(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<Option<Rat>, String> {
    match obj.get(key) {
        None => Ok(None),
        Some(serde_json::Value::Number(n)) => parse_rational(&n.to_string())
            .map(Some)
            .map_err(|e| e.to_string()),
        Some(serde_json::Value::String(s)) => {
            parse_rational(s).map(Some).map_err(|e| e.to_string())
        }
        Some(other) => Err(format!("{key}: expected number, got {other}")),
    }
}

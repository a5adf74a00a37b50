use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qlang::doubleslit::{DoubleSlitConfig, Grid2D};
use qlang::scenarios::{self, emit, to_csv_files, to_json, BranchSelection, EraserSpec, Format, ScenarioResult};
use qlang::{Error, C64};

#[derive(Parser)]
#[command(name = "qlang", version, about = "Worked quantum-measurement scenarios and a 2D double-slit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario: eraser, wheeler, hardy, three-boxes, doubleslit.
    Scenario {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
        /// Eraser amplitude alpha1 as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "alpha2")]
        alpha1: Option<C64>,
        /// Eraser amplitude alpha2 as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "alpha1")]
        alpha2: Option<C64>,
    },
    /// Run the double-slit pipeline with explicit settings.
    Doubleslit(DoubleSlitArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write JSON (default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Write CSV: one file per pmf and histogram.
    #[arg(long)]
    csv: bool,
    /// JSON file or CSV directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Default,
    Compact,
}

#[derive(Args)]
struct DoubleSlitArgs {
    #[arg(long, value_enum, default_value = "both")]
    branch: BranchArg,
    /// Starting configuration before the overrides below.
    #[arg(long, value_enum, default_value = "default")]
    preset: Preset,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    k0: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok(C64::new(parse(re)?, parse(im)?))
}

fn doubleslit_config(args: &DoubleSlitArgs) -> qlang::Result<DoubleSlitConfig> {
    let mut c = match args.preset {
        Preset::Default => DoubleSlitConfig::default(),
        Preset::Compact => DoubleSlitConfig::compact(),
    };
    if args.nx.is_some() || args.ny.is_some() {
        let spacing = c.grid.dx();
        c.grid = Grid2D::with_spacing(args.nx.unwrap_or(c.grid.nx), args.ny.unwrap_or(c.grid.ny), spacing)?;
    }
    c.dt = args.dt.unwrap_or(c.dt);
    c.max_steps = args.max_steps.unwrap_or(c.max_steps);
    c.params.k0 = args.k0.unwrap_or(c.params.k0);
    c.params.sigma = args.sigma.unwrap_or(c.params.sigma);
    c.params.delta = args.delta.unwrap_or(c.params.delta);
    c.params.b = args.b.unwrap_or(c.params.b);
    c.shots = args.shots.unwrap_or(c.shots);
    c.seed = args.seed.unwrap_or(c.seed);
    Ok(c)
}

fn write(result: &ScenarioResult, output: &OutputArgs) -> qlang::Result<()> {
    let format = if output.csv { Format::Csv } else { Format::Json };
    match &output.out {
        Some(path) => emit(result, format, path),
        None => {
            match format {
                Format::Json => print!("{}", to_json(result)?),
                Format::Csv => {
                    for (name, body) in to_csv_files(result) {
                        print!("# {name}\n{body}");
                    }
                }
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> qlang::Result<()> {
    match cli.command {
        Command::Scenario { name, output, alpha1, alpha2 } => {
            let result = match (name.as_str(), alpha1.zip(alpha2)) {
                ("eraser", Some((a1, a2))) => scenarios::run_eraser(&EraserSpec::new(a1, a2)?)?,
                (_, Some(_)) => {
                    return Err(Error::InvalidParameter("--alpha1/--alpha2 only apply to the eraser".into()))
                }
                (name, None) => scenarios::run_named(name)?,
            };
            write(&result, &output)
        }
        Command::Doubleslit(args) => {
            let config = doubleslit_config(&args)?;
            let selection = match args.branch {
                BranchArg::One => BranchSelection::One,
                BranchArg::Two => BranchSelection::Two,
                BranchArg::Both => BranchSelection::Both,
            };
            write(&scenarios::run_doubleslit(&config, selection)?, &args.output)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::IoFailure(_) | Error::Serialization(_) => ExitCode::from(1),
                e if e.is_numeric() => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

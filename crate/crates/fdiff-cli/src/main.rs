use clap::{Parser, Subcommand};
use fdiff_cli::commands::{self, NewtonOpts, VerifyOpts};
use fdiff_cli::config::Config;
use fdiff_cli::output::Format;
use fdiff_cli::parse::ParseError;

/// An exact difference calculus for endofunctors of finite sets.
#[derive(Parser)]
#[command(name = "fdiff", version, about)]
struct Cli {
    /// Seed for all pseudo-random sampling (also FDIFF_SEED / fdiff.toml).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size bound for tautness checks (also FDIFF_BOUND / fdiff.toml).
    #[arg(long, global = true)]
    bound: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression at given set sizes, listing elements.
    Eval {
        expr: String,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        sizes: Vec<usize>,
    },
    /// Tabulate |expr(k)| for k = 0..=maxk, with the closed-form
    /// difference when one is known.
    Table {
        expr: String,
        #[arg(long, default_value_t = 4)]
        maxk: usize,
    },
    /// Symbolic and operational difference of an expression, with the
    /// comparison bijection verified.
    Delta { expr: String },
    /// The chain-rule comparison for a pair of expressions.
    Chain {
        #[arg(long = "F")]
        f: String,
        #[arg(long = "G")]
        g: String,
        #[arg(long, default_value_t = 3)]
        maxk: usize,
    },
    /// Named verification suites: taut, product-rule, chain-rule,
    /// confluence, newton-roundtrip, dirichlet, monads.
    Verify {
        suite: String,
        #[arg(long = "F")]
        f: Option<String>,
        #[arg(long = "G")]
        g: Option<String>,
        #[arg(long)]
        expr: Option<String>,
        #[arg(short = 'N', long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long)]
        lattice_file: Option<std::path::PathBuf>,
    },
    /// Newton summation: --sum <species-file>, --delta-star <expr>,
    /// --roundtrip <expr>.
    Newton {
        #[arg(long)]
        sum: Option<std::path::PathBuf>,
        #[arg(long)]
        delta_star: Option<String>,
        #[arg(long)]
        roundtrip: Option<String>,
        #[arg(short = 'N', long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        maxk: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let cfg = Config::load(cli.seed, cli.bound);
    let result = match &cli.command {
        Command::Eval { expr, sizes } => commands::cmd_eval(expr, sizes, &cfg),
        Command::Table { expr, maxk } => commands::cmd_table(expr, *maxk, &cfg),
        Command::Delta { expr } => commands::cmd_delta(expr, &cfg),
        Command::Chain { f, g, maxk } => commands::cmd_chain(f, g, *maxk, &cfg),
        Command::Verify { suite, f, g, expr, degree, trials, lattice_file } => {
            commands::cmd_verify(
                suite,
                &VerifyOpts {
                    f: f.clone(),
                    g: g.clone(),
                    expr: expr.clone(),
                    degree: *degree,
                    trials: *trials,
                    lattice_file: lattice_file.clone(),
                },
                &cfg,
            )
        }
        Command::Newton { sum, delta_star, roundtrip, degree, maxk } => commands::cmd_newton(
            &NewtonOpts {
                sum: sum.clone(),
                delta_star: delta_star.clone(),
                roundtrip: roundtrip.clone(),
                degree: *degree,
                maxk: *maxk,
            },
            &cfg,
        ),
    };
    match result {
        Ok(out) => {
            print!("{}", out.render(cli.format));
            std::process::exit(out.exit_code());
        }
        Err(err) => {
            if let Some(parse_err) = err.downcast_ref::<ParseError>() {
                eprintln!("{parse_err}");
            } else {
                eprintln!("error: {err:#}");
            }
            std::process::exit(2);
        }
    }
}

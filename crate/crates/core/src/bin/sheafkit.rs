use clap::{Parser, Subcommand};
use sheafkit::cli::{
    cmd_check_sheaf, cmd_cohomology, cmd_epr_demo, cmd_sheafify, cmd_validate,
    max_points_from_env, CmdOutcome, CoverChoice, DemoSource,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "sheafkit",
    version,
    about = "Presheaves, sheaf cohomology and entanglement demos on finite topological spaces"
)]
struct Cli {
    /// Emit the machine-readable JSON report instead of the human form.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the topology, presheaf and cover blocks of a workspace file.
    Validate { file: PathBuf },
    /// Decide whether a named presheaf satisfies the sheaf condition.
    CheckSheaf {
        file: PathBuf,
        #[arg(long)]
        presheaf: String,
    },
    /// Sheafify a named presheaf and write the result as a new workspace.
    Sheafify {
        file: PathBuf,
        #[arg(long)]
        presheaf: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compute Čech cohomology of a presheaf against a cover.
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        presheaf: String,
        /// Named cover from the workspace file.
        #[arg(long, conflicts_with = "minimal")]
        cover: Option<String>,
        /// Use the minimal-open cover of the full space.
        #[arg(long)]
        minimal: bool,
    },
    /// Run the entanglement scenario: position independence, measurability
    /// and the induced measurement on the partner.
    EprDemo {
        /// Scenario workspace file; omit with --builtin.
        scenario: Option<PathBuf>,
        /// Run the builtin scenario.
        #[arg(long, conflicts_with = "scenario")]
        builtin: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let max_points = max_points_from_env();
    let outcome: CmdOutcome = match &cli.command {
        Command::Validate { file } => cmd_validate(file, max_points),
        Command::CheckSheaf { file, presheaf } => cmd_check_sheaf(file, presheaf, max_points),
        Command::Sheafify { file, presheaf, out } => {
            cmd_sheafify(file, presheaf, out, max_points)
        }
        Command::Cohomology {
            file,
            presheaf,
            cover,
            minimal,
        } => {
            let choice = match (cover, minimal) {
                (Some(name), _) => CoverChoice::Named(name),
                (None, true) => CoverChoice::Minimal,
                (None, false) => {
                    eprintln!("error: pass either --cover NAME or --minimal");
                    std::process::exit(2);
                }
            };
            cmd_cohomology(file, presheaf, choice, max_points)
        }
        Command::EprDemo { scenario, builtin } => {
            let source = match (scenario, builtin) {
                (Some(path), _) => DemoSource::File(path),
                (None, true) => DemoSource::Builtin,
                (None, false) => {
                    eprintln!("error: pass a scenario file or --builtin");
                    std::process::exit(2);
                }
            };
            cmd_epr_demo(source, max_points)
        }
    };
    if cli.machine {
        print!("{}", outcome.report.machine_json());
    } else {
        print!("{}", outcome.report.human());
    }
    std::process::exit(outcome.exit_code);
}

//! `divweb`: analyses of divergence-free webs from JSON specs.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod input;
mod output;
mod svg;

use commands::{analysis, measure, plot, reconstruct, Common, Outcome};
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "divweb",
    version,
    about = "Curvature, holonomy and normal forms of divergence-free webs"
)]
#[command(
    after_help = "Exit codes: 0 success, 1 negative verdict, 2 input error, 3 numeric failure.\n\
The DIVWEB_TOL environment variable sets the default zero-test tolerance."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonuniformity tensor and curvature forms, symbolic and sampled
    Curvature(analysis::CurvatureArgs),
    /// Decide local triviality; exit 1 when the web is not trivial
    Trivial(analysis::TrivialArgs),
    /// Reflection loops, curvature fits and Taylor checks
    Holonomy(measure::HolonomyArgs),
    /// Rebuild a density from its tensor and axis-leaf values
    Reconstruct(reconstruct::ReconstructArgs),
    /// Coordinates in which the density is 1 on the axis leaves
    Normalize(analysis::NormalizeArgs),
    /// Planar invariants and the canonical form check
    Invariants(analysis::InvariantsArgs),
    /// Box volumes, the bd = ac test and equal-volume splits
    Volumes(measure::VolumesArgs),
    /// SVG of leaves, geodesics or a holonomy orbit
    Plot(plot::PlotArgs),
    /// 3+1 slicing report for a built-in spacetime
    Spacetime(analysis::SpacetimeArgs),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Curvature(a) => &a.common,
            Command::Trivial(a) => &a.common,
            Command::Holonomy(a) => &a.common,
            Command::Reconstruct(a) => &a.common,
            Command::Normalize(a) => &a.common,
            Command::Invariants(a) => &a.common,
            Command::Volumes(a) => &a.common,
            Command::Plot(a) => &a.common,
            Command::Spacetime(a) => &a.common,
        }
    }

    fn run(&self) -> Result<Outcome> {
        match self {
            Command::Curvature(a) => analysis::curvature(a),
            Command::Trivial(a) => analysis::trivial(a),
            Command::Holonomy(a) => measure::holonomy(a),
            Command::Reconstruct(a) => reconstruct::reconstruct(a),
            Command::Normalize(a) => analysis::normalize(a),
            Command::Invariants(a) => analysis::invariants(a),
            Command::Volumes(a) => measure::volumes(a),
            Command::Plot(a) => plot::plot(a),
            Command::Spacetime(a) => analysis::spacetime(a),
        }
    }
}

fn emit(cmd: &Command, out: &Outcome) -> Result<()> {
    for (path, bytes) in &out.files {
        output::write_atomic(path, bytes)?;
    }
    let text = analysis::pretty(&out.report);
    match &cmd.common().output {
        Some(path) => output::write_atomic(path, &text),
        None => std::io::stdout()
            .write_all(&text)
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = cli.command.run().and_then(|out| {
        emit(&cli.command, &out)?;
        Ok(out.negative)
    });
    match res {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("divweb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

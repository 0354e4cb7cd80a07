// SPDX-License-Identifier: Apache-2.0

//! `torsion`: class groups, unit-resultant witnesses, orbit counts and surveys.

mod cache;
mod commands;
mod error;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use torsion_core::{BinForm, GroupModel, OrbitOptions, QuadForm};

use crate::cache::DiskCache;
use crate::error::CliResult;
use crate::parse::DiscRange;

#[derive(Parser)]
#[command(name = "torsion", version, about = "Torsion in class groups of quadratic orders via unit resultants")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Directory for the class-group cache
    #[arg(long, global = true, env = "TORSION_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// unipotents, signs and GL₂(ℤ)
    Lifted,
    /// also δ ↦ −δ
    Full,
}

impl From<Model> for GroupModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Lifted => GroupModel::Lifted,
            Model::Full => GroupModel::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the classes of discriminant d
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: BigInt,
        /// Include the composition table
        #[arg(long)]
        table: bool,
    },
    /// Construct δ with res(q, δ) = ±1 when [q] is n-torsion
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        disc: BigInt,
        /// a,b,c for ax² + bxy + cy²
        #[arg(long, allow_hyphen_values = true, value_parser = parse::form)]
        form: QuadForm,
        #[arg(long)]
        n: u64,
    },
    /// Check a witness δ against q
    Verify {
        #[arg(long, allow_hyphen_values = true, value_parser = parse::form)]
        form: QuadForm,
        /// t0,…,tn for Σ tᵢ xⁱ y^(n−i)
        #[arg(long, allow_hyphen_values = true, value_parser = parse::delta)]
        delta: BinForm,
    },
    /// Resultant of q and δ
    Resultant {
        #[arg(long, allow_hyphen_values = true, value_parser = parse::form)]
        form: QuadForm,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::delta)]
        delta: BinForm,
    },
    /// Enumerate orbits of unit-resultant pairs up to a coefficient height
    Orbits {
        #[arg(long, allow_hyphen_values = true)]
        disc: BigInt,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        height: u64,
        /// Only report the predicted count
        #[arg(long)]
        predict_only: bool,
        #[arg(long, value_enum, default_value = "full")]
        model: Model,
        /// Stop at this many candidate forms
        #[arg(long, default_value_t = OrbitOptions::default().max_candidates)]
        max_candidates: u64,
        /// Keep searching after the predicted number of orbits is reached
        #[arg(long)]
        exhaustive: bool,
    },
    /// Describe the finite group whose inversion orbits count the pair orbits
    Selmer {
        #[arg(long, allow_hyphen_values = true)]
        disc: BigInt,
        #[arg(long)]
        n: u64,
    },
    /// Survey every valid discriminant in a range, writing CSV
    Survey {
        /// Inclusive LO..HI
        #[arg(long, allow_hyphen_values = true, value_parser = parse::disc_range)]
        disc_range: DiscRange,
        /// Comma-separated degrees
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Also count orbits by enumeration at this height (n ≥ 3)
        #[arg(long)]
        height: Option<u64>,
        /// CSV path; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads
        #[arg(long)]
        jobs: Option<usize>,
    },
}

impl Command {
    fn discs(&self) -> Vec<BigInt> {
        match self {
            Command::Classgroup { disc, .. }
            | Command::Witness { disc, .. }
            | Command::Orbits { disc, .. }
            | Command::Selmer { disc, .. } => vec![disc.clone()],
            Command::Verify { form, .. } => vec![form.discriminant()],
            Command::Resultant { .. } => vec![],
            Command::Survey { disc_range, .. } => commands::survey_discs(*disc_range),
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let discs = cli.command.discs();
    let cache = match &cli.cache_dir {
        Some(dir) => {
            let mut c = DiskCache::open(dir)?;
            c.load(&discs)?;
            c.spot_check()?;
            Some(c)
        }
        None => None,
    };
    let json = cli.json;
    match cli.command {
        Command::Classgroup { disc, table } => commands::classgroup(&disc, table, json)?,
        Command::Witness { disc, form, n } => commands::witness(&disc, &form, n, json)?,
        Command::Verify { form, delta } => commands::verify(&form, &delta, json)?,
        Command::Resultant { form, delta } => commands::resultant_cmd(&form, &delta, json)?,
        Command::Orbits { disc, n, height, predict_only, model, max_candidates, exhaustive } => {
            let opts = OrbitOptions { model: model.into(), max_candidates, short_circuit: !exhaustive };
            commands::orbits(&disc, n, height, predict_only, &opts, json)?
        }
        Command::Selmer { disc, n } => commands::selmer(&disc, n, json)?,
        Command::Survey { n, height, out, jobs, .. } => {
            commands::survey(&discs, &n, height, out.as_deref(), jobs, json)?
        }
    }
    if let Some(c) = cache {
        c.persist(&discs)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

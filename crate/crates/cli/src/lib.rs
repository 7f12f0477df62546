//! Front end for the okapain binary. `run` does the work so tests can call it directly.

use clap::{Parser, Subcommand, ValueEnum};
use okapain_core::atlas::{load_atlas_file, okamoto_painleve_check, verify_transitions, Atlas, AtlasError, Surface};
use okapain_core::cartan::{self, AffineType, CartanError};
use okapain_core::cas::render_q;
use okapain_core::cech::{self, CechError, ScanReport, SolverConfig};
use okapain_core::sheaf::{check_twisted_membership, cocycle_check_theta, theta_section};
use okapain_core::Report;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "okapain", version, about = "Exact delta matrices of Okamoto-Painleve pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output layout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Transitions, intersection form and every generator check.
    VerifyAtlas {
        atlas: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        twist: u32,
    },
    /// The delta matrix with its rank, determinant and kernel.
    ComputeDelta {
        atlas: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        twist: u32,
    },
    /// Only the kernel block of the delta matrix.
    Kernel {
        atlas: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        twist: u32,
    },
    /// det and kernel of delta_n for n = 1..n_max on a multiplicative atlas.
    VanishingScan {
        atlas: PathBuf,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
    },
    /// Library intersection matrix of an affine type such as E7~.
    Cartan {
        #[arg(value_name = "TYPE", required_unless_present = "type_flag")]
        label: Option<String>,
        #[arg(long = "type", conflicts_with = "label")]
        type_flag: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// What a command produced. `output` goes to stdout or the output file, `diagnostics` to stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: u8,
    pub output: String,
    pub diagnostics: String,
}

impl Outcome {
    fn ok(output: String) -> Outcome {
        Outcome {
            code: EXIT_OK,
            output,
            diagnostics: String::new(),
        }
    }

    fn error(code: u8, diagnostics: String) -> Outcome {
        Outcome {
            code,
            output: String::new(),
            diagnostics,
        }
    }
}

/// Parse and input errors are usage failures, everything else is a computation failure.
fn atlas_code(e: &AtlasError) -> u8 {
    match e {
        AtlasError::Parse { .. } | AtlasError::UnknownReference { .. } | AtlasError::UnsupportedTwist { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn cech_code(e: &CechError) -> u8 {
    match e {
        CechError::Atlas(a) => atlas_code(a),
        CechError::UnsupportedAtlasClass { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn load(path: &PathBuf) -> Result<Atlas, Outcome> {
    load_atlas_file(path).map_err(|e| Outcome::error(atlas_code(&e), format!("{}: {}", path.display(), e)))
}

pub fn run(cli: &Cli) -> Outcome {
    let cfg = SolverConfig::from_env();
    let result = match &cli.command {
        Command::VerifyAtlas { atlas, twist } => verify_atlas(atlas, *twist),
        Command::ComputeDelta { atlas, twist } => compute_delta(atlas, *twist, cli.format, &cfg, false),
        Command::Kernel { atlas, twist } => compute_delta(atlas, *twist, cli.format, &cfg, true),
        Command::VanishingScan { atlas, n_max } => vanishing_scan(atlas, *n_max, cli.format, &cfg),
        Command::Cartan { label, type_flag } => {
            cartan_cmd(label.as_deref().or(type_flag.as_deref()).unwrap_or_default(), cli.format)
        }
    };
    result.unwrap_or_else(|o| o)
}

fn verify_atlas(path: &PathBuf, twist: u32) -> Result<Outcome, Outcome> {
    let atlas = load(path)?;
    let fail_with = |e: AtlasError| Outcome::error(atlas_code(&e), format!("{}: {}", path.display(), e));
    let mut reports = vec![verify_transitions(&atlas).map_err(fail_with)?, okamoto_painleve_check(&atlas)];
    if let Ok(t) = AffineType::parse(&atlas.type_label) {
        reports.push(intersection_against_library(&atlas, t));
    }
    let s = Surface::new(&atlas, twist).map_err(fail_with)?;
    let mut gens = Report::new(format!("generators of {} at twist {}", atlas.name, twist));
    for i in 0..s.components.len() {
        let id = s.components[i].id.clone();
        match theta_section(&s, i) {
            Ok(sec) => {
                gens.absorb(check_twisted_membership(&s, &sec));
                match cocycle_check_theta(&s, i) {
                    Ok(r) => gens.absorb(r),
                    Err(e) => gens.fail("theta cocycle", &id, e.to_string()),
                }
            }
            Err(e) => gens.fail("theta membership", &id, e.to_string()),
        }
        match cech::eta_cochain(&s, i) {
            Ok(_) => gens.pass(),
            Err(e) => gens.fail("eta membership", &id, e.to_string()),
        }
    }
    reports.push(gens);

    let output: String = reports.iter().map(|r| r.to_string()).collect();
    match reports.iter().flat_map(|r| &r.failures).next() {
        None => Ok(Outcome::ok(output)),
        Some(f) => Ok(Outcome {
            code: EXIT_FAILURE,
            output,
            diagnostics: format!("first failing check: {} at {}: {}", f.check, f.location, f.detail),
        }),
    }
}

fn intersection_against_library(atlas: &Atlas, t: AffineType) -> Report {
    let mut r = Report::new(format!("intersection form against {}", t));
    let want = cartan::cartan_matrix(t);
    if want.len() != atlas.intersection.len() {
        r.fail("dimension", t.label(), format!("atlas has {} components", atlas.intersection.len()));
        return r;
    }
    for (i, (a, b)) in atlas.intersection.iter().zip(&want).enumerate() {
        r.record(a == b, "row", atlas.components[i].id.clone(), || format!("{:?}, {} has {:?}", a, t, b));
    }
    r
}

fn compute_delta(path: &PathBuf, twist: u32, format: Format, cfg: &SolverConfig, kernel_only: bool) -> Result<Outcome, Outcome> {
    let atlas = load(path)?;
    let engine = |e: CechError| Outcome::error(cech_code(&e), format!("{}: {}", path.display(), e));
    let d = cech::assemble_delta(&atlas, twist, cfg).map_err(engine)?;
    let k = cech::kernel_report(&d.entries).map_err(engine)?;
    let output = match (format, kernel_only) {
        (Format::Structured, false) => d.to_structured(&k),
        (Format::Text, false) => {
            let mut s = d.to_text(&k);
            if let Ok(t) = AffineType::parse(&d.type_label) {
                s.push('\n');
                s.push_str(&cartan::compare(&d, t).to_string());
            }
            s
        }
        (Format::Structured, true) => format!("kernel\natlas = {}\ntwist = {}\n{}", d.atlas, d.twist, k.structured()),
        (Format::Text, true) => format!("kernel of delta for {} at twist {}\n{}", d.atlas, d.twist, k.structured()),
    };
    Ok(Outcome::ok(output))
}

fn scan_structured(r: &ScanReport) -> String {
    let mut s = format!("vanishing-scan\natlas = {}\nn_max = {}\n", r.atlas, r.rows.len());
    for row in &r.rows {
        s.push_str(&format!("\n[n = {}]\n", row.n));
        s.push_str(&format!("determinant = {}\n", row.determinant.render()));
        s.push_str(&format!("kernel_dimension = {}\n", row.kernel_dimension));
        s.push_str(&format!("closed_form = {}\n", if row.matches_closed_form { "match" } else { "mismatch" }));
        for (t, rank) in &row.rational_locus {
            s.push_str(&format!("locus = t = {} ; rank {}\n", render_q(t), rank));
        }
    }
    s
}

fn vanishing_scan(path: &PathBuf, n_max: u32, format: Format, cfg: &SolverConfig) -> Result<Outcome, Outcome> {
    let atlas = load(path)?;
    let r = cech::vanishing_scan(&atlas, n_max, cfg)
        .map_err(|e| Outcome::error(cech_code(&e), format!("{}: {}", path.display(), e)))?;
    let output = match format {
        Format::Text => r.to_string(),
        Format::Structured => scan_structured(&r),
    };
    Ok(match r.first_mismatch() {
        None => Outcome::ok(output),
        Some(n) => Outcome {
            code: EXIT_FAILURE,
            output,
            diagnostics: format!("determinant differs from ((-t)^n - 1)^2/(-t)^n first at n = {n}"),
        },
    })
}

fn cartan_cmd(label: &str, format: Format) -> Result<Outcome, Outcome> {
    let t = AffineType::parse(label).map_err(|e: CartanError| Outcome::error(EXIT_USAGE, e.to_string()))?;
    Ok(Outcome::ok(match format {
        Format::Text => cartan::render_text(t),
        Format::Structured => cartan::render_structured(t),
    }))
}

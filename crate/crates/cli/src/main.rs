//! `kb4` — batch front end for the model library: validation, conversion,
//! model checking, crash-model generation, soundness sweeps and DOT export.
//!
//! Exit codes: 0 when the command succeeds and any checked property holds,
//! 1 when a checked property is false, 2 on input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use kb4_core::complex::{check_simplicial_model_morphism, SimplicialMap};
use kb4_core::dot::{complex_to_dot, frame_to_dot};
use kb4_core::frame::check_model_morphism;
use kb4_core::functors::{kappa_obj, roundtrip_complex, roundtrip_frame, sigma_obj, FunctorError};
use kb4_core::json::{
    frame_to_json, model_from_json, morphism_from_json, resolve_world_map,
    simplicial_model_to_json, ModelFile, MorphismFile,
};
use kb4_core::logic::{
    check_knowledge_gain, eval_all_kripke, eval_all_simplicial, eval_kripke, eval_simplicial,
    parse_formula, GainError, GainVerdict,
};
use kb4_core::verify::{soundness_sweep, Scheme, SweepBounds};

#[derive(Parser)]
#[command(name = "kb4", version, about = "Epistemic models over simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetKind {
    Frame,
    Complex,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a model file; frames are also
    /// checked for properness.
    Validate {
        file: PathBuf,
        /// Close each relation under symmetry and transitivity first.
        #[arg(long)]
        close: bool,
    },
    /// Translate between the complex and frame representations.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: TargetKind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        close: bool,
    },
    /// Evaluate a formula at a world, a facet, or everywhere.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// World or facet name (or index), or `all`.
        #[arg(long)]
        at: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        close: bool,
    },
    /// Check a morphism file between two models.
    Morphism {
        file: PathBuf,
        #[arg(long)]
        src: Option<PathBuf>,
        #[arg(long)]
        dst: Option<PathBuf>,
        #[arg(long)]
        close: bool,
    },
    /// Translate there and back and verify the isomorphism witness.
    Roundtrip {
        file: PathBuf,
        #[arg(long)]
        close: bool,
    },
    /// Generate the synchronous crash-failure model.
    GenCrash {
        /// Comma-separated agent names.
        #[arg(long, value_delimiter = ',')]
        agents: Vec<String>,
        /// Comma-separated input values, one per agent.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long)]
        max_crashes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a DOT rendering of the complex.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate small models and check the axiom schemes semantically.
    SoundnessSweep {
        #[arg(long, default_value_t = 2)]
        agents: usize,
        /// Largest world count; all smaller counts are swept too.
        #[arg(long, default_value_t = 3)]
        worlds: usize,
        #[arg(long, default_value_t = 2)]
        atoms: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        proper_only: bool,
        /// Check a single scheme instead of the full battery.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Check the knowledge-gain property on a pointed morphism.
    KnowledgeGain {
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Render a model file as graphviz input.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        close: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path, close: bool) -> Result<ModelFile> {
    let loaded = model_from_json(&read(path)?)
        .with_context(|| format!("loading {}", path.display()))?;
    Ok(match loaded {
        ModelFile::Frame(m) if close => ModelFile::Frame(m.per_closed()),
        other => other,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { file, close } => validate(&file, close),
        Command::Convert { file, to, out, close } => convert(&file, to, &out, close),
        Command::Check { model, at, formula, close } => check(&model, &at, &formula, close),
        Command::Morphism { file, src, dst, close } => morphism(&file, src, dst, close),
        Command::Roundtrip { file, close } => roundtrip(&file, close),
        Command::GenCrash { agents, inputs, rounds, max_crashes, out, dot } => {
            gen_crash(&agents, &inputs, rounds, max_crashes, &out, &dot)
        }
        Command::SoundnessSweep { agents, worlds, atoms, depth, proper_only, scheme } => {
            sweep(agents, worlds, atoms, depth, proper_only, scheme)
        }
        Command::KnowledgeGain { morphism, formula } => knowledge_gain(&morphism, &formula),
        Command::ExportDot { file, out, close } => export_dot(&file, &out, close),
    }
}

fn validate(path: &Path, close: bool) -> Result<bool> {
    match load_model(path, close)? {
        ModelFile::Simplicial(s) => {
            let report = s.validate();
            if report.is_valid() {
                let c = s.complex();
                let purity = match c.pure_dimension() {
                    Some(d) => format!("pure of dimension {d}"),
                    None if c.facet_count() == 0 => "empty".to_string(),
                    None => "impure".to_string(),
                };
                println!(
                    "ok: complex with {} vertices, {} facets, {purity}",
                    c.vertices().len(),
                    c.facet_count()
                );
                Ok(true)
            } else {
                print!("{report}");
                Ok(false)
            }
        }
        ModelFile::Frame(m) => {
            let report = m.validate_per();
            if !report.is_valid() {
                for v in &report.violations {
                    let law = match v.law {
                        kb4_core::frame::PerLaw::Symmetry => "symmetry",
                        kb4_core::frame::PerLaw::Transitivity => "transitivity",
                    };
                    println!(
                        "{law} failure for agent {}: missing ({}, {})",
                        m.vocab().agent_name(v.agent),
                        m.world_name(v.missing.0),
                        m.world_name(v.missing.1)
                    );
                }
                return Ok(false);
            }
            match m.is_proper() {
                Ok(()) => {
                    println!("ok: proper frame with {} worlds", m.world_count());
                    Ok(true)
                }
                Err(v) => {
                    println!(
                        "not proper: no agent alive in {} distinguishes it from {}",
                        m.world_name(v.world),
                        m.world_name(v.other)
                    );
                    Ok(false)
                }
            }
        }
    }
}

fn convert(path: &Path, to: TargetKind, out: &Option<PathBuf>, close: bool) -> Result<bool> {
    let text = match (load_model(path, close)?, to) {
        (ModelFile::Simplicial(s), TargetKind::Frame) => frame_to_json(&kappa_obj(&s)),
        (ModelFile::Frame(m), TargetKind::Complex) => match sigma_obj(&m) {
            Ok(s) => simplicial_model_to_json(&s),
            Err(FunctorError::NotProper(v)) => {
                println!(
                    "not proper: no agent alive in {} distinguishes it from {}",
                    m.world_name(v.world),
                    m.world_name(v.other)
                );
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        },
        (ModelFile::Simplicial(s), TargetKind::Complex) => simplicial_model_to_json(&s),
        (ModelFile::Frame(m), TargetKind::Frame) => frame_to_json(&m),
    };
    emit(out, &text)?;
    Ok(true)
}

fn check(path: &Path, at: &str, formula: &str, close: bool) -> Result<bool> {
    match load_model(path, close)? {
        ModelFile::Simplicial(s) => {
            let phi = parse_formula(formula, s.vocab())?;
            if at == "all" {
                let summary = eval_all_simplicial(&s, &phi);
                for (i, value) in summary.values.iter().enumerate() {
                    println!("{}: {value}", s.complex().facet_display_name(i));
                }
                println!("all: {}", summary.all_true);
                Ok(summary.all_true)
            } else {
                let facet = s
                    .complex()
                    .facet_by_name(at)
                    .ok_or_else(|| anyhow!("unknown facet `{at}`"))?;
                let value = eval_simplicial(&s, facet, &phi)?;
                println!("{value}");
                Ok(value)
            }
        }
        ModelFile::Frame(m) => {
            let phi = parse_formula(formula, m.vocab())?;
            if at == "all" {
                let summary = eval_all_kripke(&m, &phi);
                for (i, value) in summary.values.iter().enumerate() {
                    println!("{}: {value}", m.world_name(i));
                }
                println!("all: {}", summary.all_true);
                Ok(summary.all_true)
            } else {
                let world =
                    m.world_by_name(at).ok_or_else(|| anyhow!("unknown world `{at}`"))?;
                let value = eval_kripke(&m, world, &phi)?;
                println!("{value}");
                Ok(value)
            }
        }
    }
}

fn endpoint(flag: Option<PathBuf>, embedded: &Option<String>, which: &str) -> Result<PathBuf> {
    flag.or_else(|| embedded.as_ref().map(PathBuf::from))
        .ok_or_else(|| anyhow!("no {which} model: pass --{which} or set `{which}` in the file"))
}

fn morphism(path: &Path, src: Option<PathBuf>, dst: Option<PathBuf>, close: bool) -> Result<bool> {
    let file = morphism_from_json(&read(path)?)?;
    let src_path = endpoint(src, &file.src, "src")?;
    let dst_path = endpoint(dst, &file.dst, "dst")?;
    if let Some(pairs) = &file.vertex_map {
        let (s, d) = match (load_model(&src_path, close)?, load_model(&dst_path, close)?) {
            (ModelFile::Simplicial(s), ModelFile::Simplicial(d)) => (s, d),
            _ => bail!("vertex_map requires two complex files"),
        };
        let map = SimplicialMap::new(pairs.iter().copied());
        match check_simplicial_model_morphism(&map, &s, &d) {
            Ok(()) => {
                println!("ok: morphism of simplicial models");
                Ok(true)
            }
            Err(v) => {
                println!("not a morphism: {v}");
                Ok(false)
            }
        }
    } else if let Some(map) = &file.world_map {
        let (s, d) = match (load_model(&src_path, close)?, load_model(&dst_path, close)?) {
            (ModelFile::Frame(s), ModelFile::Frame(d)) => (s, d),
            _ => bail!("world_map requires two frame files"),
        };
        let f = resolve_world_map(map, &s, &d)?;
        match check_model_morphism(&f, &s, &d) {
            Ok(()) => {
                println!("ok: morphism of partial epistemic models");
                Ok(true)
            }
            Err(v) => {
                println!("not a morphism: {v}");
                Ok(false)
            }
        }
    } else {
        bail!("morphism file has no map")
    }
}

fn roundtrip(path: &Path, close: bool) -> Result<bool> {
    match load_model(path, close)? {
        ModelFile::Simplicial(s) => match roundtrip_complex(&s) {
            Ok(rt) => {
                println!(
                    "ok: vertex bijection of size {} onto the facet frame and back",
                    rt.vertex_witness.len()
                );
                Ok(true)
            }
            Err(e) => {
                println!("round-trip failed: {e}");
                Ok(false)
            }
        },
        ModelFile::Frame(m) => match roundtrip_frame(&m) {
            Ok(rt) => {
                println!(
                    "ok: world bijection of size {} through the facet complex",
                    rt.witness.len()
                );
                Ok(true)
            }
            Err(e) => {
                println!("round-trip failed: {e}");
                Ok(false)
            }
        },
    }
}

fn gen_crash(
    agents: &[String],
    inputs: &[String],
    rounds: usize,
    max_crashes: usize,
    out: &Option<PathBuf>,
    dot: &Option<PathBuf>,
) -> Result<bool> {
    let model = kb4_core::crashgen::gen_crash_model(agents, inputs, rounds, max_crashes)?;
    emit(out, &simplicial_model_to_json(&model))?;
    if let Some(path) = dot {
        fs::write(path, complex_to_dot(model.complex()))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!(
        "generated {} facets over {} vertices",
        model.complex().facet_count(),
        model.complex().vertices().len()
    );
    Ok(true)
}

fn sweep(
    agents: usize,
    worlds: usize,
    atoms: usize,
    depth: usize,
    proper_only: bool,
    scheme: Option<String>,
) -> Result<bool> {
    let only = match scheme {
        Some(name) => Some(name.parse::<Scheme>().map_err(|e| anyhow!(e))?),
        None => None,
    };
    let bounds = SweepBounds { agents, max_worlds: worlds, atoms, depth, proper_only };
    let summary = soundness_sweep(&bounds, only)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(match only {
        Some(s) => summary.counterexamples.get(s.name()).copied().unwrap_or(0) == 0,
        None => summary.sound(),
    })
}

fn knowledge_gain(path: &Path, formula: &str) -> Result<bool> {
    let file: MorphismFile = morphism_from_json(&read(path)?)?;
    let pairs = file
        .vertex_map
        .as_ref()
        .ok_or_else(|| anyhow!("knowledge-gain needs a vertex_map between complexes"))?;
    let src_path = endpoint(None, &file.src, "src")?;
    let dst_path = endpoint(None, &file.dst, "dst")?;
    let (s, d) = match (load_model(&src_path, false)?, load_model(&dst_path, false)?) {
        (ModelFile::Simplicial(s), ModelFile::Simplicial(d)) => (s, d),
        _ => bail!("knowledge-gain endpoints must be complex files"),
    };
    let (at_src, at_dst) = file
        .at
        .as_ref()
        .ok_or_else(|| anyhow!("morphism file needs `at: [src_facet, dst_facet]`"))?;
    let x = s
        .complex()
        .facet_by_name(at_src)
        .ok_or_else(|| anyhow!("unknown source facet `{at_src}`"))?;
    let y = d
        .complex()
        .facet_by_name(at_dst)
        .ok_or_else(|| anyhow!("unknown target facet `{at_dst}`"))?;
    let phi = parse_formula(formula, s.vocab())?;
    let map = SimplicialMap::new(pairs.iter().copied());
    match check_knowledge_gain(&map, &s, x, &d, y, &phi) {
        Ok(GainVerdict::Confirmed) => {
            println!("confirmed: formula holds at the target and at the source");
            Ok(true)
        }
        Ok(GainVerdict::Vacuous) => {
            println!("vacuous: formula does not hold at the target");
            Ok(true)
        }
        Ok(GainVerdict::Violation) => {
            println!("VIOLATION: formula holds at the target but not at the source");
            Ok(false)
        }
        Err(e @ (GainError::NotGuarded(_) | GainError::UnknownFacet(_))) => Err(e.into()),
        Err(GainError::InvalidMorphism(v)) => {
            println!("not a morphism: {v}");
            Ok(false)
        }
        Err(GainError::NotPointed { src, dst }) => {
            println!("not pointed: image of facet {src} is not inside facet {dst}");
            Ok(false)
        }
    }
}

fn export_dot(path: &Path, out: &Option<PathBuf>, close: bool) -> Result<bool> {
    let text = match load_model(path, close)? {
        ModelFile::Simplicial(s) => complex_to_dot(s.complex()),
        ModelFile::Frame(m) => frame_to_dot(&m),
    };
    emit(out, &text)?;
    Ok(true)
}

//! `slocc224`: classify 2x2xn three-party pure states into the nine
//! entanglement classes, dump invariants, realize class conversions, build
//! the two-Bell-pair preparation measurement, and run the self-check suite.
//!
//! Exit codes: 0 success (including a documented conversion refusal),
//! 1 malformed input or an impossible request, 2 ambiguous classification
//! (the rank pattern matches no class row, or the two classifier routes
//! disagree), 3 self-check suite failure.

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use slocc224::classify::classify_with;
use slocc224::invariants::{admits_hyperdeterminant, signature_with};
use slocc224::mixed::{classify_decomposition_with, MixedEnsemble};
use slocc224::orbits::{
    apply_local, conversion_witness, dominates, grade, necessary_condition, order_dot,
    order_edges, random_orbit_sample_rng, representative, SAMPLE_CONDITION_CAP,
};
use slocc224::prepare::{build_povm, verify_povm};
use slocc224::{suite, Error, PureState, SloccClass, Tolerances};

#[derive(Parser)]
#[command(
    name = "slocc224",
    version,
    about = "Entanglement classification on C^2 x C^2 x C^n",
    propagate_version = true
)]
struct Cli {
    /// Relative singular-value cutoff for rank decisions (expert use;
    /// default 1e-9). Applies to classify, invariants, convert, mixed-class.
    #[arg(long, global = true, value_name = "REL")]
    tolerance: Option<f64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a state file and print the decision trail
    Classify {
        state: PathBuf,
        /// Print the full report as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Print the complete invariant signature of a state as JSON
    Invariants { state: PathBuf },
    /// Write the canonical representative of a class to a state file
    Representative {
        class: String,
        #[arg(short, long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Write seeded random states from a class orbit into a directory
    Sample {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Apply a proven conversion chain to reach a lower class, or explain
    /// why none exists
    Convert {
        state: PathBuf,
        #[arg(long, value_name = "CLASS")]
        to: String,
        #[arg(short, long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Build and verify the 16-branch measurement preparing a target state
    /// from two Bell pairs
    Prepare {
        target: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Classify a pure-state decomposition on the mixed-order scale
    MixedClass { ensemble: PathBuf },
    /// Print the conversion partial order (text, or DOT with --dot)
    Order {
        #[arg(long)]
        dot: bool,
    },
    /// Run the self-check battery; nonzero exit on any failure
    VerifySuite {
        #[arg(long, default_value_t = 48)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

/// Ambiguity in either classifier route is the one library failure with its
/// own exit code; everything else a state file can provoke is treated as bad
/// input.
fn lib_fail(err: &Error) -> Failure {
    let code = match err {
        Error::Ambiguous { .. } | Error::Disagreement { .. } => 2,
        _ => 1,
    };
    fail(code, err.to_string())
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`slocc224 order | head`) instead of
    // panicking mid-print; Rust masks SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not errors.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut tol = Tolerances::default();
    if let Some(rel) = cli.tolerance {
        if !rel.is_finite() || rel <= 0.0 || rel >= 1.0 {
            return Err(fail(1, format!("--tolerance must lie in (0, 1), got {rel}")));
        }
        tol.rel = rel;
    }
    match cli.cmd {
        Cmd::Classify { state, json } => cmd_classify(&state, json, &tol),
        Cmd::Invariants { state } => cmd_invariants(&state, &tol),
        Cmd::Representative { class, out } => cmd_representative(&class, &out),
        Cmd::Sample { class, count, seed, out } => cmd_sample(&class, count, seed, &out),
        Cmd::Convert { state, to, out } => cmd_convert(&state, &to, &out, &tol),
        Cmd::Prepare { target, out } => cmd_prepare(&target, &out),
        Cmd::MixedClass { ensemble } => cmd_mixed_class(&ensemble, &tol),
        Cmd::Order { dot } => {
            cmd_order(dot);
            Ok(())
        }
        Cmd::VerifySuite { trials, seed } => cmd_verify_suite(trials, seed),
    }
}

fn read_state(path: &Path) -> Result<PureState, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(1, format!("cannot read {}: {e}", path.display())))?;
    let file: io::StateFile = serde_json::from_str(&text)
        .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    file.into_state().map_err(|m| fail(1, format!("{}: {m}", path.display())))
}

fn parse_class(name: &str) -> Result<SloccClass, Failure> {
    SloccClass::from_str(name).map_err(|m| fail(1, m))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| fail(1, format!("serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| fail(1, format!("cannot write {}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| fail(1, format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn cmd_classify(path: &Path, json: bool, tol: &Tolerances) -> Result<(), Failure> {
    let state = read_state(path)?;
    let report = classify_with(&state, tol).map_err(|e| lib_fail(&e))?;
    if json {
        return print_json(&io::ReportFile::new(&report, tol.rel, None));
    }
    let sig = &report.signature;
    println!(
        "{}  local ranks ({}, {}, {})  rank R {}  rank R^T R {}",
        report.class,
        sig.local_ranks.r1,
        sig.local_ranks.r2,
        sig.local_ranks.r3,
        sig.rank_r,
        sig.rank_rtr
    );
    println!("method: {}", report.method);
    println!("|det224| = {:e}", sig.det224.norm());
    if let Some(h) = sig.hdet223 {
        println!("|hdet223| = {:e}", h.norm());
    }
    if let Some(h) = sig.hdet222 {
        println!("|hdet222| = {:e}", h.norm());
    }
    println!("margins:");
    for m in &report.margins {
        if m.margin == f64::MAX {
            println!(
                "  {}: value {:e}, threshold {:e}, margin exact",
                m.quantity, m.value, m.threshold
            );
        } else {
            println!(
                "  {}: value {:e}, threshold {:e}, margin {:.3e}",
                m.quantity, m.value, m.threshold, m.margin
            );
        }
    }
    Ok(())
}

fn cmd_invariants(path: &Path, tol: &Tolerances) -> Result<(), Failure> {
    let state = read_state(path)?;
    let sig = signature_with(&state, tol).map_err(|e| lib_fail(&e))?;
    let admits = admits_hyperdeterminant(&[2, 2, state.n()]);
    print_json(&io::InvariantsFile::new(state.n(), &sig, admits, tol.rel))
}

fn cmd_representative(class: &str, out: &Path) -> Result<(), Failure> {
    let class = parse_class(class)?;
    let rep = representative(class);
    write_json(out, &io::StateFile::from_state(&rep))?;
    println!("wrote {} representative (n = {}) to {}", class, rep.n(), out.display());
    Ok(())
}

fn cmd_sample(class: &str, count: usize, seed: u64, out_dir: &Path) -> Result<(), Failure> {
    let class = parse_class(class)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| fail(1, format!("cannot create {}: {e}", out_dir.display())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("sampling {count} states from the {class} orbit, seed {seed}");
    for i in 0..count {
        let state = random_orbit_sample_rng(class, &mut rng, SAMPLE_CONDITION_CAP)
            .map_err(|e| fail(1, e.to_string()))?;
        let path = out_dir.join(format!("sample_{i:03}.json"));
        write_json(&path, &io::StateFile::from_state(&state))?;
        println!("  {}", path.display());
    }
    Ok(())
}

fn cmd_convert(path: &Path, to: &str, out: &Path, tol: &Tolerances) -> Result<(), Failure> {
    let state = read_state(path)?;
    let to = parse_class(to)?;
    let from = classify_with(&state, tol).map_err(|e| lib_fail(&e))?.class;
    let Some(edge) = conversion_witness(from, to) else {
        // A documented determination, not an error: nothing is written and
        // the exit is clean, but the reason is spelled out.
        debug_assert!(!dominates(from, to));
        if necessary_condition(from, to) {
            println!(
                "refusal: no proven conversion from {from} to {to}; dominates({from}, {to}) = \
                 false (the monotone invariants do not exclude it, but no witness is cataloged)"
            );
        } else {
            println!(
                "refusal: no conversion from {from} to {to}; dominates({from}, {to}) = false \
                 (forbidden: a rank monotone would have to increase)"
            );
        }
        return Ok(());
    };
    let image = apply_local(&state, &edge.op).map_err(|e| lib_fail(&e))?;
    let got = classify_with(&image, tol).map_err(|e| lib_fail(&e))?.class;
    if got != to {
        // Witness chains are certified on class representatives; a state
        // aligned badly with a projection in the chain can land elsewhere.
        return Err(fail(
            1,
            format!(
                "the {from} -> {to} witness chain landed this state in {got}; chains are \
                 certified on representatives, so convert `representative {from}` instead"
            ),
        ));
    }
    write_json(out, &io::StateFile::from_state(&image))?;
    println!("converted {from} -> {to} via {}; wrote {}", edge.description, out.display());
    Ok(())
}

fn cmd_prepare(path: &Path, out: &Path) -> Result<(), Failure> {
    // Preparation is defined on rays; feed the builder the unit vector.
    // (State parsing already refused the zero vector.)
    let target = read_state(path)?.normalized();
    let ensemble = build_povm(&target).map_err(|e| lib_fail(&e))?;
    let report = verify_povm(&ensemble, &target).map_err(|e| lib_fail(&e))?;
    write_json(out, &io::PovmFile::new(&ensemble, &report))?;
    println!("{} branches; wrote {}", ensemble.branches.len(), out.display());
    println!("completeness residual: {:e}", report.completeness_residual);
    println!("min branch fidelity:   {}", report.min_branch_fidelity);
    println!("probability sum:       {}", report.probability_sum);
    Ok(())
}

fn cmd_mixed_class(path: &Path, tol: &Tolerances) -> Result<(), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(1, format!("cannot read {}: {e}", path.display())))?;
    let file: io::EnsembleFile = serde_json::from_str(&text)
        .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    let mut components = Vec::with_capacity(file.components.len());
    for (k, item) in file.components.into_iter().enumerate() {
        let state = item
            .state
            .into_state()
            .map_err(|m| fail(1, format!("{}: component {k}: {m}", path.display())))?;
        components.push((item.weight, state));
    }
    let ensemble = MixedEnsemble::new(components).map_err(|e| lib_fail(&e))?;
    let level = classify_decomposition_with(&ensemble, tol).map_err(|e| lib_fail(&e))?;
    println!("mixed class: {level}");
    println!("components:");
    for (w, state) in ensemble.components() {
        let class = classify_with(state, tol).map_err(|e| lib_fail(&e))?.class;
        println!("  weight {w}: {class}");
    }
    Ok(())
}

fn cmd_order(dot: bool) {
    if dot {
        print!("{}", order_dot());
        return;
    }
    println!("conversion order (arrows point to the reachable class):");
    for g in (0..=4).rev() {
        let row: Vec<String> = SloccClass::ALL
            .iter()
            .filter(|&&c| grade(c) == g)
            .map(|c| c.to_string())
            .collect();
        println!("  grade {g}: {}", row.join(", "));
    }
    println!("covering conversions:");
    for e in order_edges() {
        println!("  {} -> {}  [{}]", e.from, e.to, e.description);
    }
}

fn cmd_verify_suite(trials: usize, seed: u64) -> Result<(), Failure> {
    let report = suite::run(trials, seed);
    for outcome in &report.outcomes {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", outcome.name, outcome.detail);
    }
    let passed = report.outcomes.iter().filter(|o| o.passed).count();
    let total = report.outcomes.len();
    println!("suite: {passed}/{total} checks passed (trials {trials}, seed {seed})");
    if report.all_passed() {
        Ok(())
    } else {
        Err(fail(3, format!("{} of {total} checks failed", total - passed)))
    }
}

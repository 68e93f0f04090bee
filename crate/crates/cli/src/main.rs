//! `bcc`: invariants of stabilized fundamental groups of branch curve
//! complements.
//!
//! Subcommands: `invariants` (diagram + homology report for one surface),
//! `catalog` (list or show homological catalog entries), `verify` (named
//! deterministic check suites), `vankampen` (presentation from a braid
//! factorization file).

use anyhow::{anyhow, bail, Context, Result};
use bcc_core::braidvk::{
    check_delta_squared, stabilize, validate_theta, vk_presentation, FactorizationFile,
    MonodromyRep,
};
use bcc_core::diagram::SurfaceSpec;
use bcc_core::homology::{self, SurfaceReport};
use bcc_core::suites::{self, SuiteReport};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "bcc", version, about = "branch curve complement invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    /// Template name: cp1xcp1, f1, doublecover, cp2, delpezzo, k3,
    /// hirzebruch_dc
    #[arg(long)]
    template: Option<String>,
    /// Surface spec JSON file ({"template": ..., "params": {...}})
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    p: Option<i64>,
    #[arg(long)]
    q: Option<i64>,
    #[arg(long)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    m: Option<i64>,
    /// Variant selector for delpezzo (3 | 22) and k3 (4 | 32 | 222)
    #[arg(long)]
    variant: Option<i64>,
}

impl SurfaceArgs {
    fn into_spec(self) -> Result<SurfaceSpec> {
        if let Some(path) = self.spec {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text).context("parsing surface spec JSON");
        }
        let template = self.template.ok_or_else(|| anyhow!("--template or --spec required"))?;
        let mut params = BTreeMap::new();
        for (key, value) in [
            ("p", self.p),
            ("q", self.q),
            ("a", self.a),
            ("b", self.b),
            ("k", self.k),
            ("m", self.m),
            ("variant", self.variant),
        ] {
            if let Some(v) = value {
                params.insert(key.to_string(), v);
            }
        }
        Ok(SurfaceSpec { template, params })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the diagram-side and homology-side invariants of a surface
    Invariants {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Emit the full JSON report instead of the text table
        #[arg(long)]
        json: bool,
    },
    /// List the homological catalog, or show one entry
    Catalog {
        /// Entry name; omit to list all entries
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run a named verification suite
    Verify {
        /// lemma31 | halftwists | epsilon | pair | vk-oracle | fp-oracle |
        /// diagram-crosscheck | conjecture16
        #[arg(long)]
        suite: String,
        /// Strand count for the reduced-braid-group suites
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Parameter bound for diagram sweeps
        #[arg(long, default_value_t = 4)]
        pmax: i64,
        /// Template for the conjecture16 suite
        #[arg(long, default_value = "cp1xcp1")]
        template: String,
        #[arg(long)]
        json: bool,
    },
    /// Zariski-Van Kampen presentation from a braid factorization file
    Vankampen {
        /// Factorization JSON file
        #[arg(long)]
        file: PathBuf,
        /// Add the projective closure relation g_1 ... g_d = 1
        #[arg(long)]
        projective: bool,
        /// Skip the full-twist precondition (local / partial studies)
        #[arg(long)]
        partial: bool,
        /// Add stabilization commutators up to this conjugation depth
        #[arg(long)]
        stabilize_depth: Option<usize>,
        /// Monodromy representation JSON file: {"n": ..., "images": \[\[a,b\],...\]}
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            let payload = json!({ "schema": 1, "error": format!("{e:#}") });
            eprintln!("{}", serde_json::to_string_pretty(&payload).unwrap());
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Invariants { surface, json } => cmd_invariants(surface.into_spec()?, json),
        Command::Catalog { name, surface, json } => cmd_catalog(name, surface, json),
        Command::Verify { suite, n, seed, trials, pmax, template, json } => {
            cmd_verify(&suite, n, seed, trials, pmax, &template, json)
        }
        Command::Vankampen { file, projective, partial, stabilize_depth, theta, json } => {
            cmd_vankampen(file, projective, partial, stabilize_depth, theta, json)
        }
    }
}

fn print_report_table(r: &SurfaceReport) {
    let width = 26;
    let line = |k: &str, v: String| println!("{:<width$} {}", k, v, width = width);
    line("surface", r.surface.name.clone());
    line(
        "params",
        r.surface
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    line("n (covering degree)", r.surface.n.to_string());
    line(
        "homology Lambda_k",
        format!("{:?}", r.surface.pairing_rows),
    );
    line("homology Z^2/Lambda_k", r.homology_factor.to_string());
    match &r.diagram {
        Some(d) => {
            line("diagram Lambda", format!("{:?}", d.lambda_gens));
            line("diagram Z^2/Lambda", d.ab_g0_factor.to_string());
            line(
                "Ab G0",
                format!("({})^{}", d.ab_g0_factor, d.multiplicity),
            );
            line("commutator subgroup", d.commutator.to_string());
            line("property (*)", format!("{} (asserted for template)", d.property_star));
            if let Some(red) = d.corner_redundant {
                line("corner constraint", if red { "redundant".into() } else { "NOT redundant".into() });
            }
            line(
                "match",
                r.crosscheck_matches
                    .map(|m| if m { "yes".to_string() } else { "NO".to_string() })
                    .unwrap_or_default(),
            );
        }
        None => {
            line("diagram", r.diagram_note.clone().unwrap_or_default());
            line(
                "Ab G0 (homology side)",
                format!("({})^{}", r.homology_factor, r.surface.n - 1),
            );
        }
    }
    line(
        "Galois cover prediction",
        format!("{} [conjectural]", r.galois.description),
    );
    let spin = match r.spin_parity.group_order() {
        Some(1) => "trivial [conjectural]".to_string(),
        Some(2) => "Z_2 [conjectural]".to_string(),
        Some(4) => "Z_2 x Z_2 [conjectural]".to_string(),
        _ => "insufficient data".to_string(),
    };
    line("spin/parity commutator", spin);
}

fn cmd_invariants(spec: SurfaceSpec, as_json: bool) -> Result<i32> {
    let report = homology::surface_report(&spec)?;
    if as_json {
        let mut value = serde_json::to_value(&report)?;
        value["schema"] = json!(1);
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        print_report_table(&report);
    }
    let ok = report.crosscheck_matches.unwrap_or(true);
    Ok(if ok { 0 } else { 1 })
}

fn cmd_catalog(name: Option<String>, surface: SurfaceArgs, as_json: bool) -> Result<i32> {
    match name {
        None => {
            let entries = [
                ("cp1xcp1", "p, q >= 2", "diagram + homology"),
                ("f1", "p > q >= 2", "diagram + homology"),
                ("doublecover", "a, b >= 1; p, q >= 2", "diagram + homology"),
                ("cp2", "k >= 1 (group statements need k >= 3)", "homology only"),
                ("delpezzo", "k >= 2; variant 3 | 22", "homology only"),
                ("k3", "k >= 2; variant 4 | 32 | 222", "homology only"),
                ("hirzebruch_dc", "m, a >= 1; q >= 2; p > 2mq", "homology only, conjectural"),
            ];
            if as_json {
                let list: Vec<_> = entries
                    .iter()
                    .map(|(n, p, s)| json!({"name": n, "parameters": p, "sides": s}))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&json!({"schema": 1, "entries": list}))?);
            } else {
                for (n, p, s) in entries {
                    println!("{:<14} {:<34} {}", n, p, s);
                }
            }
            Ok(0)
        }
        Some(name) => {
            let mut surface = surface;
            surface.template = Some(name);
            let spec = surface.into_spec()?;
            let data = homology::catalog(&spec.template, &spec.params)?;
            let (rows, factor) = data.lambda_from_pairing();
            if as_json {
                let mut value = serde_json::to_value(&data)?;
                value["schema"] = json!(1);
                value["quotient"] = json!(factor.to_string());
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                println!("{:<26} {}", "entry", data.name);
                println!("{:<26} {}", "n", data.n);
                println!("{:<26} {:?}", "pairing rows", rows);
                println!("{:<26} {}", "Z^2/Lambda_k", factor);
                println!("{:<26} {}", "conjectural", data.conjectural);
                println!("{:<26} {}", "notes", data.notes);
            }
            Ok(0)
        }
    }
}

/// Run jobs across workers when BCC_WORKERS > 1, preserving input order.
fn run_jobs<T: Send, F: Fn(usize) -> T + Sync>(count: usize, f: F) -> Vec<T> {
    let workers: usize = std::env::var("BCC_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1);
    if workers <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slice) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(w * chunk + off));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("job completed")).collect()
}

fn cmd_verify(
    suite: &str,
    n: usize,
    seed: u64,
    trials: usize,
    pmax: i64,
    template: &str,
    as_json: bool,
) -> Result<i32> {
    let reports: Vec<SuiteReport> = match suite {
        "lemma31" => vec![suites::lemma31(3, n.max(3))],
        "halftwists" => vec![suites::halftwists(n.max(3), trials, seed)],
        "epsilon" => vec![suites::epsilon(n.max(3), trials.min(200), seed)],
        "pair" => vec![suites::pair_checks(n.max(3), trials.min(200), seed)],
        "vk-oracle" => vec![suites::vk_oracle(seed)],
        "fp-oracle" => vec![suites::fp_oracle()],
        "diagram-crosscheck" => vec![suites::diagram_crosscheck(pmax)],
        "conjecture16" => {
            let templates: Vec<&str> = if template == "all" {
                vec!["cp1xcp1", "f1", "doublecover"]
            } else {
                vec![template]
            };
            run_jobs(templates.len(), |i| suites::conjecture16(templates[i], pmax))
        }
        other => bail!(
            "unknown suite {other}; expected lemma31, halftwists, epsilon, pair, vk-oracle, \
             fp-oracle, diagram-crosscheck or conjecture16"
        ),
    };
    let pass = reports.iter().all(|r| r.pass());
    if as_json {
        let value = json!({ "schema": 1, "pass": pass, "reports": reports });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        for r in &reports {
            println!("suite {} (seed {})", r.suite, r.seed);
            for c in &r.checks {
                let mark = if c.pass { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("  {} {}", mark, c.label);
                } else {
                    println!("  {} {} -- {}", mark, c.label, c.detail);
                }
            }
        }
        println!("{}", if pass { "all checks passed" } else { "FAILURES present" });
    }
    Ok(if pass { 0 } else { 1 })
}

fn cmd_vankampen(
    file: PathBuf,
    projective: bool,
    partial: bool,
    stabilize_depth: Option<usize>,
    theta_path: Option<PathBuf>,
    as_json: bool,
) -> Result<i32> {
    let text =
        std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let wire: FactorizationFile = serde_json::from_str(&text).context("parsing factorization")?;
    let factorization = wire.into_factorization()?;
    let delta = check_delta_squared(&factorization);
    let vk = vk_presentation(&factorization, projective, partial)?;
    let mut presentation = vk.presentation.clone();
    let theta = match &theta_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Some(serde_json::from_str::<MonodromyRep>(&text).context("parsing theta")?)
        }
        None => None,
    };
    let theta_verdict = theta.as_ref().map(|t| validate_theta(&vk, t));
    if let (Some(depth), Some(t)) = (stabilize_depth, &theta) {
        presentation = stabilize(&presentation, t, depth)?;
    }
    let ab = presentation.abelianization();
    let theta_pass = theta_verdict.as_ref().is_none_or(|v| v.pass());
    if as_json {
        let value = json!({
            "schema": 1,
            "delta_squared": delta,
            "presentation": presentation.export(),
            "abelianization": ab.to_string(),
            "projective": projective,
            "theta": theta_verdict,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("{:<26} {}", "factorization", file.display());
        println!(
            "{:<26} degree {}/{}, trivial permutation {}, full-twist action {}",
            "delta^2 check",
            delta.degree_found,
            delta.degree_expected,
            delta.permutation_trivial,
            delta.action_is_full_conjugation
        );
        if delta.partial_factorization_hint && partial {
            println!("{:<26} degree shortfall: partial factorization", "note");
        }
        println!("{:<26} {}", "generators", presentation.generators());
        println!("{:<26} {}", "relators", presentation.relators().len());
        println!("{:<26} {}", "abelianization", ab);
        if let Some(v) = &theta_verdict {
            if v.pass() {
                println!("{:<26} consistent", "theta");
            } else {
                println!("{:<26} {} violations", "theta", v.violations.len());
                for viol in &v.violations {
                    println!("  - {:?}: {}", viol.relation_index, viol.reason);
                }
            }
        }
    }
    Ok(if theta_pass { 0 } else { 1 })
}

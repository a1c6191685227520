use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde_json::json;

use lcstorsion_core::claims::{self, Config, Status, REGISTRY};
use lcstorsion_core::exprparse;
use lcstorsion_core::ideals::{ComponentCache, IdealSpec};
use lcstorsion_core::par::Exec;
use lcstorsion_core::zlinalg::{hnf, snf, IntMatrix};
use lcstorsion_core::ParseError;

/// Exact computations with T-ideals and lower central series terms of the
/// free associative ring over the integers.
#[derive(Parser, Debug)]
#[command(name = "lcstorsion", version)]
struct Cli {
    /// Emit one JSON object per line and nothing else on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Total-degree bound for verification sweeps.
    #[arg(long, global = true, value_name = "N")]
    max_degree: Option<u32>,
    /// Number of variables for verification sweeps.
    #[arg(long, global = true, value_name = "N")]
    max_var: Option<u32>,
    /// Custom ideal: one generator per line, in expression syntax.
    #[arg(long, global = true, value_name = "PATH")]
    spec_file: Option<PathBuf>,
    /// Include unimodular transforms in matrix output and witnesses.
    #[arg(long, global = true)]
    transforms: bool,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is the expression in the ideal?
    Member { expr: String, spec: Option<String> },
    /// Order of the expression modulo the ideal (a number or `infinite`).
    Order { expr: String, spec: Option<String> },
    /// Run a verification suite: a claim id or `all`.
    Verify { claim: String },
    /// Parse an expression and print its expansion.
    Parse { expr: String },
    /// Row Hermite normal form of a matrix (file or stdin).
    Hnf { path: Option<PathBuf> },
    /// Smith invariant factors of a matrix (file or stdin).
    Snf { path: Option<PathBuf> },
    /// List the claim ids accepted by `verify`.
    Claims,
}

/// Failure classes mapped to exit codes.
enum Fail {
    Usage(String),
    Verification,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verification) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Fail> {
    configure_threads()?;
    let cache = ComponentCache::global();
    match &cli.cmd {
        Command::Member { expr, spec } => {
            let (f, spec) = (parse_expr(expr)?, resolve_spec(cli, spec.as_deref())?);
            let member = cache.ideal_member(&f, &spec).map_err(usage)?;
            emit(cli, &json!({ "command": "member", "expr": expr, "spec": spec.to_string(), "member": member }), || {
                member.to_string()
            });
        }
        Command::Order { expr, spec } => {
            let (f, spec) = (parse_expr(expr)?, resolve_spec(cli, spec.as_deref())?);
            let order = cache.order_mod_ideal(&f, &spec).map_err(usage)?;
            emit(cli, &json!({ "command": "order", "expr": expr, "spec": spec.to_string(), "order": order }), || {
                order.to_string()
            });
        }
        Command::Verify { claim } => return verify(cli, claim, cache),
        Command::Parse { expr } => {
            let e = exprparse::parse(expr).map_err(|err| parse_failure(expr, &err))?;
            let p = e.eval();
            emit(
                cli,
                &json!({
                    "command": "parse",
                    "expr": e.to_string(),
                    "poly": p.to_string(),
                    "terms": p.len(),
                    "multihomogeneous": p.is_multihomogeneous(),
                }),
                || p.to_string(),
            );
        }
        Command::Hnf { path } => {
            let m = read_matrix(path.as_ref())?;
            let (h, u) = hnf(&m);
            let rank = (0..h.nrows()).filter(|&i| !h.row(i).iter().all(Zero::is_zero)).count();
            let mut j = json!({ "command": "hnf", "rank": rank, "hnf": h.to_json() });
            if cli.transforms {
                j["u"] = u.to_json();
            }
            emit(cli, &j, || {
                let mut s = h.to_string();
                if cli.transforms {
                    s.push_str(&u.to_string());
                }
                s.trim_end().to_string()
            });
        }
        Command::Snf { path } => {
            let m = read_matrix(path.as_ref())?;
            let s = snf(&m, cli.transforms);
            let d: Vec<String> = s.d.iter().map(ToString::to_string).collect();
            let mut j = json!({ "command": "snf", "rank": s.rank, "invariant_factors": d });
            if let Some((u, v)) = &s.transforms {
                j["u"] = u.to_json();
                j["v"] = v.to_json();
            }
            emit(cli, &j, || {
                let mut out = format!("rank {}\n{}", s.rank, d.join(" "));
                if let Some((u, v)) = &s.transforms {
                    out = format!("{out}\n{u}{v}");
                }
                out.trim_end().to_string()
            });
        }
        Command::Claims => {
            for id in REGISTRY {
                emit(cli, &json!({ "claim_id": id }), || id.to_string());
            }
        }
    }
    Ok(())
}

fn usage(e: impl std::fmt::Display) -> Fail {
    Fail::Usage(e.to_string())
}

fn emit(cli: &Cli, j: &serde_json::Value, human: impl FnOnce() -> String) {
    let line = if cli.json { j.to_string() } else { human() };
    let mut out = io::stdout().lock();
    // A closed pipe is not an error worth reporting.
    let _ = writeln!(out, "{line}");
}

fn parse_failure(text: &str, e: &ParseError) -> Fail {
    let caret = " ".repeat(text.get(..e.offset).map_or(text.chars().count(), |p| p.chars().count()));
    Fail::Usage(format!("{e}\n  {text}\n  {caret}^"))
}

fn parse_expr(text: &str) -> Result<lcstorsion_core::Poly, Fail> {
    exprparse::parse_poly(text).map_err(|e| parse_failure(text, &e))
}

fn resolve_spec(cli: &Cli, spec: Option<&str>) -> Result<IdealSpec, Fail> {
    match (spec, &cli.spec_file) {
        (Some(_), Some(_)) => Err(Fail::Usage("give either a spec argument or --spec-file, not both".into())),
        (Some(s), None) => s.parse().map_err(usage),
        (None, Some(p)) => IdealSpec::custom_from_file(p).map_err(usage),
        (None, None) => Err(Fail::Usage("missing ideal spec (T<n>, T32, I32, gamma<n>, custom:<file>)".into())),
    }
}

fn read_matrix(path: Option<&PathBuf>) -> Result<IntMatrix, Fail> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(usage)?;
            s
        }
    };
    text.parse().map_err(usage)
}

fn configure_threads() -> Result<(), Fail> {
    let Ok(v) = std::env::var("LCSTORSION_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Fail::Usage(format!("LCSTORSION_THREADS must be a positive integer, got `{v}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn verify(cli: &Cli, claim: &str, cache: &ComponentCache) -> Result<(), Fail> {
    let defaults = Config::default();
    let cfg = Config {
        max_degree: cli.max_degree.unwrap_or(defaults.max_degree),
        max_var: cli.max_var.unwrap_or(defaults.max_var),
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
        transforms: cli.transforms,
        ..defaults
    };
    let ids: Vec<&str> = if claim == "all" {
        REGISTRY.to_vec()
    } else if REGISTRY.contains(&claim) {
        vec![claim]
    } else {
        return Err(Fail::Usage(format!("unknown claim `{claim}`; see `lcstorsion claims`")));
    };
    let mut all_ok = true;
    for id in ids {
        let r = claims::verify(id, &cfg, cache).map_err(usage)?;
        all_ok &= r.verified();
        emit(cli, &serde_json::to_value(&r).expect("serializable"), || {
            let status = match r.status {
                Status::Verified => "verified",
                Status::Failed => "FAILED",
                Status::Skipped => "skipped",
            };
            let mut line = format!("{:<20} {:<9} {:>8} ms", r.claim_id, status, r.elapsed_ms);
            if r.status == Status::Failed {
                line.push_str(&format!("\n  witnesses: {}", r.witnesses));
            }
            line
        });
    }
    if all_ok {
        Ok(())
    } else {
        Err(Fail::Verification)
    }
}

//! `hilbres`: exact reflection-group and stratification analysis from
//! the command line.
//!
//! Exit codes: 0 success, 1 domain error (machine-readable error
//! object on stdout), 2 usage error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hilbres_core::hilbstrata::{strata_poset, stratum_info, torus_fixed_points};
use hilbres_core::linalg::Matrix;
use hilbres_core::numberfield::{parse_rational, Rational};
use hilbres_core::permaction::Perm;
use hilbres_core::pipeline::{analyze, ginzburg_example, AnalysisRequest, GinzburgType};
use hilbres_core::toruslat::{genericity_check, kummer_fixed_strata};
use hilbres_core::Caps;

#[derive(Parser)]
#[command(name = "hilbres", version, about = "Exact reflection-group analysis of subspace normalizers, Hilbert-scheme strata, and torus lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of the S_k-normalizer action on a subspace.
    Analyze(AnalyzeArgs),
    /// Torus-fixed points (staircase ideals) of the Hilbert scheme of
    /// k points.
    FixedPoints {
        #[arg(long)]
        k: u64,
    },
    /// Subdivision poset of the strata of the symmetric product.
    Strata {
        #[arg(long)]
        k: u64,
    },
    /// Genericity of a complex structure J (square rational matrix
    /// read from FILE, same row syntax as --basis).
    Genericity {
        #[arg(long, value_name = "FILE")]
        j: String,
    },
    /// Fixed strata of the Kummer involution on K^[n].
    Kummer {
        #[arg(long)]
        n: u64,
    },
    /// Emit and analyze a standard Weyl example.
    Ginzburg {
        #[arg(long, value_name = "A|B")]
        r#type: String,
        #[arg(long)]
        rank: usize,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Number of coordinates.
    #[arg(long)]
    k: Option<usize>,
    /// Inline basis: rows separated by ';', rational entries "p/q"
    /// separated by ','.
    #[arg(long)]
    basis: Option<String>,
    /// Affine offset vector, comma-separated rationals.
    #[arg(long)]
    offset: Option<String>,
    /// Search subgroup generators: permutations in image notation,
    /// e.g. "1,2,0;1,0,2".
    #[arg(long)]
    search_group: Option<String>,
    /// Work over the N-th cyclotomic field.
    #[arg(long)]
    field: Option<u32>,
    /// Read a full request from a JSON file instead of inline flags.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["k", "basis", "offset", "search_group", "field"])]
    input: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut caps = Caps::default();
    if let Ok(spec) = std::env::var("HILBRES_CAPS") {
        for kv in spec.split(',').filter(|s| !s.is_empty()) {
            let Some((key, value)) = kv.split_once('=') else {
                eprintln!("HILBRES_CAPS entry {kv:?} is not key=value");
                return ExitCode::from(2);
            };
            if let Err(e) = caps.set(key.trim(), value.trim()) {
                eprintln!("HILBRES_CAPS: {e}");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli, caps) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Domain(msg)) => {
            let obj = json!({ "error": msg, "schema_version": 1 });
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            ExitCode::from(1)
        }
    }
}

enum RunError {
    Usage(String),
    Domain(String),
}

fn domain<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Domain(e.to_string())
}

fn run(cli: &Cli, caps: Caps) -> Result<String, RunError> {
    match &cli.command {
        Command::Analyze(args) => {
            let req = build_request(args, caps)?;
            let report = analyze(&req).map_err(domain)?;
            Ok(match cli.output {
                Output::Json => report.to_json(),
                Output::Table => report_table(&report),
            })
        }
        Command::FixedPoints { k } => {
            let ideals = torus_fixed_points(*k, caps.partition_k).map_err(domain)?;
            match cli.output {
                Output::Json => {
                    let rows: Vec<_> = ideals
                        .iter()
                        .map(|i| {
                            json!({
                                "steps": i.steps(),
                                "colength": i.colength(),
                                "generators": i.generator_strings(),
                            })
                        })
                        .collect();
                    to_json(&json!({
                        "schema_version": 1,
                        "k": k,
                        "count": ideals.len(),
                        "fixed_points": rows,
                    }))
                }
                Output::Table => {
                    let mut out = format!("torus-fixed points of Hilb^{k}: {}\n", ideals.len());
                    for i in &ideals {
                        out.push_str(&format!(
                            "  steps {:?}  ideal <{}>\n",
                            i.steps(),
                            i.generator_strings().join(", ")
                        ));
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }
        Command::Strata { k } => {
            let poset = strata_poset(*k, caps.poset_k).map_err(domain)?;
            let strata: Vec<_> = poset
                .partitions()
                .iter()
                .map(|p| {
                    let info = stratum_info(p);
                    json!({
                        "partition": p.parts(),
                        "length": p.len(),
                        "dim_symmetric": info.dim_symmetric,
                        "dim_fiber": info.dim_fiber,
                        "dim_hilbert_stratum": info.dim_hilbert_stratum,
                        "sigma_order": info.sigma_order,
                    })
                })
                .collect();
            match cli.output {
                Output::Json => to_json(&json!({
                    "schema_version": 1,
                    "k": k,
                    "count": poset.len(),
                    "relation_count": poset.relation_count(),
                    "covers": poset.covers(),
                    "strata": strata,
                })),
                Output::Table => {
                    let mut out = format!(
                        "strata of Sym^{k}: {} partitions, {} relations\n",
                        poset.len(),
                        poset.relation_count()
                    );
                    for s in &strata {
                        out.push_str(&format!(
                            "  {:?}: dim {}\n",
                            s["partition"], s["dim_hilbert_stratum"]
                        ));
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }
        Command::Genericity { j } => {
            let text = fs::read_to_string(j)
                .map_err(|e| RunError::Usage(format!("cannot read {j}: {e}")))?;
            let rows = parse_matrix(text.trim()).map_err(RunError::Usage)?;
            let m = Matrix::from_rational_rows(rows);
            let rep = genericity_check(&m).map_err(domain)?;
            let endos: Vec<Vec<Vec<String>>> = rep
                .basis_of_endos
                .iter()
                .map(|e| e.to_string_rows())
                .collect();
            match cli.output {
                Output::Json => to_json(&json!({
                    "schema_version": 1,
                    "generic": rep.generic,
                    "endo_dim": rep.endo_dim,
                    "basis_of_endos": endos,
                })),
                Output::Table => Ok(format!(
                    "generic: {} (commutant dimension {})",
                    rep.generic, rep.endo_dim
                )),
            }
        }
        Command::Kummer { n } => {
            let rep = kummer_fixed_strata(*n, caps.kummer_points).map_err(domain)?;
            match cli.output {
                Output::Json => {
                    let strata: Vec<_> = rep
                        .strata
                        .iter()
                        .map(|s| {
                            let torsion: serde_json::Map<String, serde_json::Value> = s
                                .torsion_labels()
                                .into_iter()
                                .map(|(l, m)| (l, json!(m)))
                                .collect();
                            json!({
                                "torsion": torsion,
                                "pairs": s.pair_count,
                                "dim": s.dimension,
                            })
                        })
                        .collect();
                    to_json(&json!({
                        "schema_version": 1,
                        "n": rep.n,
                        "points": rep.total_points,
                        "involution_trivial_on_fiber": rep.involution_trivial_on_fiber,
                        "stratum_count": rep.strata.len(),
                        "strata": strata,
                    }))
                }
                Output::Table => {
                    let mut out = format!(
                        "Kummer involution on K^[{}]: {} fixed strata\n",
                        rep.n,
                        rep.strata.len()
                    );
                    for s in rep.strata.iter().take(20) {
                        out.push_str(&format!(
                            "  dim {}: {} pairs, torsion {:?}\n",
                            s.dimension,
                            s.pair_count,
                            s.torsion_labels()
                        ));
                    }
                    if rep.strata.len() > 20 {
                        out.push_str(&format!("  ... and {} more\n", rep.strata.len() - 20));
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }
        Command::Ginzburg { r#type, rank } => {
            let t = match r#type.as_str() {
                "A" | "a" => GinzburgType::A,
                "B" | "b" => GinzburgType::B,
                other => return Err(RunError::Usage(format!("unknown type {other}, expected A or B"))),
            };
            let mut req = ginzburg_example(t, *rank).map_err(domain)?;
            req.caps = caps;
            let report = analyze(&req).map_err(domain)?;
            Ok(match cli.output {
                Output::Json => report.to_json(),
                Output::Table => report_table(&report),
            })
        }
    }
}

fn to_json(v: &serde_json::Value) -> Result<String, RunError> {
    Ok(serde_json::to_string_pretty(v).unwrap())
}

fn build_request(args: &AnalyzeArgs, caps: Caps) -> Result<AnalysisRequest, RunError> {
    if let Some(path) = &args.input {
        let text = fs::read_to_string(path)
            .map_err(|e| RunError::Usage(format!("cannot read {path}: {e}")))?;
        return request_from_json(&text, caps);
    }
    let k = args
        .k
        .ok_or_else(|| RunError::Usage("--k is required (or use --input FILE)".into()))?;
    let basis = args
        .basis
        .as_deref()
        .ok_or_else(|| RunError::Usage("--basis is required (or use --input FILE)".into()))?;
    let basis = parse_matrix(basis).map_err(RunError::Usage)?;
    let mut req = AnalysisRequest::new(k, basis);
    if let Some(c) = &args.offset {
        req.offset = Some(parse_vector(c).map_err(RunError::Usage)?);
    }
    if let Some(sg) = &args.search_group {
        req.search_group = Some(parse_perms(sg).map_err(RunError::Usage)?);
    }
    req.field_hint = args.field;
    req.caps = caps;
    Ok(req)
}

fn request_from_json(text: &str, caps: Caps) -> Result<AnalysisRequest, RunError> {
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| RunError::Usage(format!("bad request file: {e}")))?;
    let k = v["k"]
        .as_u64()
        .ok_or_else(|| RunError::Usage("request file: integer field \"k\" required".into()))?
        as usize;
    let basis_str = v["basis"]
        .as_str()
        .ok_or_else(|| RunError::Usage("request file: string field \"basis\" required".into()))?;
    let mut req = AnalysisRequest::new(k, parse_matrix(basis_str).map_err(RunError::Usage)?);
    if let Some(c) = v["offset"].as_str() {
        req.offset = Some(parse_vector(c).map_err(RunError::Usage)?);
    }
    if let Some(sg) = v["search_group"].as_str() {
        req.search_group = Some(parse_perms(sg).map_err(RunError::Usage)?);
    }
    if let Some(n) = v["field"].as_u64() {
        req.field_hint = Some(n as u32);
    }
    let mut caps = caps;
    if let Some(obj) = v["caps"].as_object() {
        for (key, val) in obj {
            let s = match val {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            caps.set(key, &s)
                .map_err(|e| RunError::Usage(format!("request file caps: {e}")))?;
        }
    }
    req.caps = caps;
    Ok(req)
}

/// "1,-1,0;0,1,-1" with rational entries "p/q".
fn parse_matrix(s: &str) -> Result<Vec<Vec<Rational>>, String> {
    s.split(';').map(parse_vector).collect()
}

fn parse_vector(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',')
        .map(|e| parse_rational(e.trim()).map_err(|err| format!("bad entry {e:?}: {err}")))
        .collect()
}

/// Permutations in image notation: "1,2,0;1,0,2".
fn parse_perms(s: &str) -> Result<Vec<Perm>, String> {
    s.split(';')
        .map(|p| {
            let images: Vec<usize> = p
                .split(',')
                .map(|e| e.trim().parse::<usize>().map_err(|err| format!("bad image {e:?}: {err}")))
                .collect::<Result<_, _>>()?;
            Perm::from_images(images).ok_or_else(|| format!("not a permutation: {p:?}"))
        })
        .collect()
}

fn report_table(r: &hilbres_core::pipeline::AnalysisReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "normalizer order {}, kernel {}, induced {}\n",
        r.group_order, r.kernel_order, r.induced_order
    ));
    out.push_str(&format!(
        "reflections {}, smooth {}, all real {}\n",
        r.reflection_count, r.smooth, r.all_real
    ));
    if let Some(w) = &r.witness {
        out.push_str(&format!("singular witness {w}\n"));
    }
    if r.coxeter_components.is_empty() {
        out.push_str("Coxeter components: none\n");
    } else {
        let labels: Vec<_> = r
            .coxeter_components
            .iter()
            .map(|c| c.type_label.clone())
            .collect();
        out.push_str(&format!(
            "Coxeter components: {} (Weyl product: {})\n",
            labels.join(" x "),
            r.weyl_product
        ));
    }
    if let Some(f) = &r.filtration {
        out.push_str(&format!(
            "filtration |G_affine|={} |G_1|={} |G_0|={}, translation orders [{}], isogeny index {}\n",
            f.g_affine_order,
            f.g1_order,
            f.g0_order,
            f.translation_orders.join(", "),
            f.isogeny_index
        ));
    }
    out.push_str(&format!(
        "gram nondegenerate {}, distinct locus {}",
        r.gram_nondegenerate, r.distinct_locus_ok
    ));
    out
}

//! Batch front door: validate documents, run named check suites, generate
//! example spaces, enumerate homomorphisms, export DOT diagrams.
//!
//! Exit codes: 0 = pass/valid, 1 = property failure, 2 = usage or malformed
//! input.

mod documents;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use convtop::adjunction::{adjunction_mismatch, check_idempotent, is_geometric, teetotal_report};
use convtop::corpus;
use convtop::instances::{
    classify_perm_homs, measure_algebra_space, measure_betweenness_matches_intervals,
    measure_recovered_from_metric, PermClassification,
};
use convtop::spaces::{enumerate_pre_homs, enumerate_tc_homs, PreconvexSpace, DEFAULT_HOM_LIMIT};
use convtop::stone::{lattice_of_family, stone_roundtrip_lattice, stone_roundtrip_space};
use convtop::suplat::{hom_equivalence_check, is_tcg, j_from_s, s_from_j, validate_partial_sup};
use convtop::FiniteLattice;

use documents::*;

#[derive(Parser)]
#[command(
    name = "convtop",
    about = "Finite-model toolkit for topological convexity spaces and their Stone duality",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a document and print its violation report.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a named check suite: adjunction, idempotent, teetotal, geometric,
    /// stone-roundtrip, psl-roundtrip, hom-equivalence, perm-classify,
    /// measure-metric.
    Check {
        name: String,
        files: Vec<PathBuf>,
        /// Cap on exhaustive function enumeration.
        #[arg(long)]
        limit: Option<u128>,
        /// Degree of the domain permutation group (perm-classify).
        #[arg(long)]
        n: Option<usize>,
        /// Degree of the codomain permutation group (perm-classify).
        #[arg(long)]
        m: Option<usize>,
        /// Seed for sampled corpus checks (geometric without a file).
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sampled instances for corpus checks.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a document: chain, boolean, sn, lattice-ideal,
    /// metric-betweenness, measure-algebra, subgroup.
    Gen {
        kind: String,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        cyclic: Option<usize>,
        /// Input document for kinds derived from another document.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra output path for the metric of a measure algebra.
        #[arg(long)]
        metric_out: Option<PathBuf>,
    },
    /// Enumerate all homomorphisms between two spaces.
    Homs {
        src: PathBuf,
        dst: PathBuf,
        /// Category: tc (topological convexity) or pre (preconvexity).
        #[arg(long)]
        category: String,
        #[arg(long)]
        limit: Option<u128>,
        #[arg(long)]
        json: bool,
    },
    /// Export a lattice, or a space's closed-convex inclusion order, as DOT.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A usage or input error: exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

#[derive(Serialize)]
struct CheckReport {
    name: String,
    pass: bool,
    detail: String,
    witnesses: Vec<String>,
    elapsed_ms: u128,
}

impl CheckReport {
    fn emit(self, json: bool) -> i32 {
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(&self).expect("report serializes")
            );
        } else {
            let status = if self.pass { "PASS" } else { "FAIL" };
            println!(
                "check {}: {} — {} ({} ms)",
                self.name, status, self.detail, self.elapsed_ms
            );
            for w in &self.witnesses {
                println!("  witness: {w}");
            }
        }
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(Usage(message)) => {
            eprintln!("error: {message}");
            2
        }
    };
    std::process::exit(code);
}

fn read_document(path: &Path) -> Result<Document, Usage> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Usage> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, Usage> {
    match cli.command {
        Command::Validate { file, json } => cmd_validate(&file, json),
        Command::Check {
            name,
            files,
            limit,
            n,
            m,
            seed,
            samples,
            json,
        } => {
            let limit = limit.unwrap_or(DEFAULT_HOM_LIMIT);
            let report = run_check(&name, &files, limit, n, m, seed, samples)?;
            Ok(report.emit(json))
        }
        Command::Gen {
            kind,
            height,
            atoms,
            n,
            cyclic,
            input,
            out,
            metric_out,
        } => cmd_gen(
            &kind,
            height,
            atoms,
            n,
            cyclic,
            input.as_deref(),
            out.as_deref(),
            metric_out.as_deref(),
        ),
        Command::Homs {
            src,
            dst,
            category,
            limit,
            json,
        } => cmd_homs(
            &src,
            &dst,
            &category,
            limit.unwrap_or(DEFAULT_HOM_LIMIT),
            json,
        ),
        Command::ExportDot { file, out } => cmd_export_dot(&file, out.as_deref()),
    }
}

#[derive(Serialize)]
struct ValidationOutput {
    kind: String,
    valid: bool,
    violations: Vec<String>,
}

fn cmd_validate(file: &Path, json: bool) -> Result<i32, Usage> {
    let doc = read_document(file)?;
    let (valid, violations): (bool, Vec<String>) = match &doc {
        Document::Topconvex { .. } => {
            let x = topconvex_from_doc(&doc)?;
            let report = x.validate();
            (
                report.is_valid(),
                report.violations.iter().map(|v| v.to_string()).collect(),
            )
        }
        Document::Preconvex { .. } => {
            let p = preconvex_from_doc(&doc)?;
            let report = p.validate();
            (
                report.is_valid(),
                report.violations.iter().map(|v| v.to_string()).collect(),
            )
        }
        Document::Lattice { .. } => match lattice_from_doc(&doc) {
            Ok(_) => (true, Vec::new()),
            Err(e) => (false, vec![e]),
        },
        Document::PointedLattice { .. } => match pointed_from_doc(&doc) {
            Ok(_) => (true, Vec::new()),
            Err(e) => (false, vec![e]),
        },
        Document::PartialSup { .. } => match partial_sup_from_doc(&doc) {
            Ok(psl) => {
                let report = validate_partial_sup(&psl);
                let notes = if report.is_valid() {
                    vec![]
                } else {
                    vec![report.summary()]
                };
                (report.is_valid(), notes)
            }
            Err(e) => (false, vec![e]),
        },
        Document::Map { .. } => match space_map_from_doc(&doc) {
            Ok(_) => (true, Vec::new()),
            Err(e) => (false, vec![e]),
        },
        Document::Metric { .. } => match metric_from_doc(&doc) {
            Ok(_) => (true, Vec::new()),
            Err(e) => (false, vec![e]),
        },
        Document::Measure { .. } => match measure_from_doc(&doc) {
            Ok(_) => (true, Vec::new()),
            Err(e) => (false, vec![e]),
        },
    };
    if json {
        let out = ValidationOutput {
            kind: doc.kind().to_string(),
            valid,
            violations,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializes")
        );
    } else if valid {
        println!("{}: valid {}", file.display(), doc.kind());
    } else {
        println!("{}: invalid {}", file.display(), doc.kind());
        for v in &violations {
            println!("  violation: {v}");
        }
    }
    Ok(if valid { 0 } else { 1 })
}

fn arity<'a>(files: &'a [PathBuf], want: usize, name: &str) -> Result<&'a [PathBuf], Usage> {
    if files.len() != want {
        return Err(Usage(format!(
            "check {name} expects {want} input file(s), got {}",
            files.len()
        )));
    }
    Ok(files)
}

// Downset-family operations enumerate all downsets, which is exponential in
// lattice size; refuse inputs beyond desk scale.
fn desk_scale(l: &FiniteLattice, context: &str) -> Result<(), Usage> {
    const LIMIT: usize = 20;
    if l.size() > LIMIT {
        return Err(Usage(format!(
            "{context} enumerates downsets and supports at most {LIMIT} lattice elements, got {}",
            l.size()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    name: &str,
    files: &[PathBuf],
    limit: u128,
    n: Option<usize>,
    m: Option<usize>,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<CheckReport, Usage> {
    let start = Instant::now();
    let report = |pass: bool, detail: String, witnesses: Vec<String>| CheckReport {
        name: name.to_string(),
        pass,
        detail,
        witnesses,
        elapsed_ms: start.elapsed().as_millis(),
    };
    match name {
        "adjunction" => {
            let files = arity(files, 2, name)?;
            let x = topconvex_from_doc(&read_document(&files[0])?)?;
            let p = preconvex_from_doc(&read_document(&files[1])?)?;
            let mismatch = adjunction_mismatch(&x, &p, limit)?;
            let pass = mismatch.is_none();
            let witnesses = mismatch.map(|f| vec![f.to_string()]).unwrap_or_default();
            Ok(report(
                pass,
                "hom-set equality over all functions".to_string(),
                witnesses,
            ))
        }
        "idempotent" => {
            let files = arity(files, 1, name)?;
            let x = topconvex_from_doc(&read_document(&files[0])?)?;
            let pass = check_idempotent(&x)?;
            Ok(report(
                pass,
                "closed-convex functor is idempotent on this space".to_string(),
                vec![],
            ))
        }
        "teetotal" => {
            let files = arity(files, 1, name)?;
            let x = topconvex_from_doc(&read_document(&files[0])?)?;
            let tr = teetotal_report(&x)?;
            let mut witnesses: Vec<String> = tr
                .nonunion_convex
                .iter()
                .map(|c| format!("convex {c} is not closed"))
                .collect();
            witnesses.extend(tr.unseparated.iter().map(|(v, pt)| {
                format!(
                    "closed {v} not separated from point {}",
                    v.ground().label(*pt)
                )
            }));
            Ok(report(
                tr.holds(),
                "both teetotal conditions".to_string(),
                witnesses,
            ))
        }
        "geometric" => {
            if files.is_empty() {
                // Corpus sweep: every preconvexity on up to 3 points plus
                // seeded 4-element samples.
                let seed = seed.unwrap_or(0x5EED);
                let samples = samples.unwrap_or(200);
                let mut instances = corpus::preconvex_corpus();
                instances.extend(
                    corpus::seeded_preconvex_families(4, samples, seed)
                        .into_iter()
                        .map(PreconvexSpace::new),
                );
                let failures: Vec<String> = instances
                    .iter()
                    .filter(|p| !is_geometric(p).unwrap_or(false))
                    .map(|p| p.preconvex().to_string())
                    .collect();
                let detail = format!(
                    "{} corpus instances plus {samples} seeded (seed {seed})",
                    instances.len() - samples
                );
                Ok(report(failures.is_empty(), detail, failures))
            } else {
                let files = arity(files, 1, name)?;
                let p = preconvex_from_doc(&read_document(&files[0])?)?;
                let pass = is_geometric(&p)?;
                Ok(report(
                    pass,
                    "closure intersection recovers the family".to_string(),
                    vec![],
                ))
            }
        }
        "stone-roundtrip" => {
            let files = arity(files, 1, name)?;
            let doc = read_document(&files[0])?;
            match &doc {
                Document::Topconvex { .. } => {
                    let x = topconvex_from_doc(&doc)?;
                    let pass = stone_roundtrip_space(&x)?;
                    Ok(report(
                        pass,
                        "space ≅ space of its pointed coframe".to_string(),
                        vec![],
                    ))
                }
                Document::PointedLattice { .. } => {
                    let pl = pointed_from_doc(&doc)?;
                    let pass = stone_roundtrip_lattice(&pl)?;
                    Ok(report(
                        pass,
                        "pointed coframe ≅ coframe of its space".to_string(),
                        vec![],
                    ))
                }
                _ => Err(Usage(format!(
                    "stone-roundtrip expects a topconvex or pointed_lattice document, got {}",
                    doc.kind()
                ))),
            }
        }
        "psl-roundtrip" => {
            let files = arity(files, 1, name)?;
            let doc = read_document(&files[0])?;
            match &doc {
                Document::PointedLattice { .. } => {
                    let pl = pointed_from_doc(&doc)?;
                    desk_scale(pl.lattice(), "psl-roundtrip")?;
                    let psl = j_from_s(&pl);
                    let valid = validate_partial_sup(&psl).is_valid();
                    let roundtrip = s_from_j(&psl) == pl.chosen();
                    Ok(report(
                        valid && roundtrip,
                        "chosen set recovered from its join family".to_string(),
                        vec![],
                    ))
                }
                Document::PartialSup { .. } => {
                    let psl = partial_sup_from_doc(&doc)?;
                    desk_scale(psl.lattice(), "psl-roundtrip")?;
                    let validation = validate_partial_sup(&psl);
                    if !validation.is_valid() {
                        return Ok(report(false, validation.summary(), vec![]));
                    }
                    if !is_tcg(&psl) {
                        return Ok(report(
                            false,
                            "not totally compactly generated".to_string(),
                            vec![],
                        ));
                    }
                    let chosen = s_from_j(&psl);
                    let pl = convtop::PointedLattice::new(psl.lattice(), chosen)
                        .map_err(|e| Usage(e.to_string()))?;
                    let pass = j_from_s(&pl) == psl;
                    Ok(report(
                        pass,
                        "join family recovered from its chosen set".to_string(),
                        vec![],
                    ))
                }
                _ => Err(Usage(format!(
                    "psl-roundtrip expects a pointed_lattice or partial_sup document, got {}",
                    doc.kind()
                ))),
            }
        }
        "hom-equivalence" => {
            let files = arity(files, 2, name)?;
            let a = partial_sup_from_doc(&read_document(&files[0])?)?;
            let b = partial_sup_from_doc(&read_document(&files[1])?)?;
            desk_scale(a.lattice(), "hom-equivalence")?;
            desk_scale(b.lattice(), "hom-equivalence")?;
            let pass = hom_equivalence_check(&a, &b)?;
            Ok(report(
                pass,
                "partial-sup homs coincide with adjoints preserving total compactness".to_string(),
                vec![],
            ))
        }
        "perm-classify" => {
            if !files.is_empty() {
                return Err(Usage(
                    "perm-classify takes --n and --m, no files".to_string(),
                ));
            }
            let n = n.ok_or(Usage("perm-classify requires --n".to_string()))?;
            let m = m.unwrap_or(n);
            match classify_perm_homs(n, m)? {
                PermClassification::Automorphisms { count, expected } => Ok(report(
                    count == expected,
                    format!(
                        "automorphisms: {count} found, {expected} from translations and reversal"
                    ),
                    vec![],
                )),
                PermClassification::Surjections {
                    found,
                    expected,
                    matches,
                } => {
                    let witnesses = if matches {
                        found.iter().map(|a| format!("{a:?}")).collect()
                    } else {
                        vec![format!(
                            "found {} maps, family has {}",
                            found.len(),
                            expected.len()
                        )]
                    };
                    Ok(report(
                        matches,
                        format!(
                            "surjective homs: {} found, equal to the collapse family",
                            found.len()
                        ),
                        witnesses,
                    ))
                }
            }
        }
        "measure-metric" => {
            let files = arity(files, 1, name)?;
            let ms = measure_from_doc(&read_document(&files[0])?)?;
            let ma = measure_algebra_space(&ms)?;
            let equivalence = measure_betweenness_matches_intervals(&ma);
            let recovery = measure_recovered_from_metric(&ms, &ma);
            let mut witnesses = Vec::new();
            if !equivalence {
                witnesses.push("betweenness/interval equivalence fails".to_string());
            }
            if !recovery {
                witnesses.push("measure is not recovered from the metric".to_string());
            }
            Ok(report(
                equivalence && recovery,
                "symmetric-difference metric induces the interval convexity".to_string(),
                witnesses,
            ))
        }
        other => Err(Usage(format!("unknown check `{other}`"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: &str,
    height: Option<usize>,
    atoms: Option<usize>,
    n: Option<usize>,
    cyclic: Option<usize>,
    input: Option<&Path>,
    out: Option<&Path>,
    metric_out: Option<&Path>,
) -> Result<i32, Usage> {
    let doc = match kind {
        "chain" => {
            let height = height.ok_or(Usage("gen chain requires --height".to_string()))?;
            doc_from_lattice(&FiniteLattice::chain(height)?)
        }
        "boolean" => {
            let atoms = atoms.ok_or(Usage("gen boolean requires --atoms".to_string()))?;
            doc_from_lattice(&FiniteLattice::boolean(atoms)?)
        }
        "sn" => {
            let n = n.ok_or(Usage("gen sn requires --n".to_string()))?;
            doc_from_topconvex(&convtop::instances::perm_space(n)?)
        }
        "lattice-ideal" => {
            let input = input.ok_or(Usage("gen lattice-ideal requires --input".to_string()))?;
            let lattice = lattice_from_doc(&read_document(input)?)?;
            desk_scale(&lattice, "gen lattice-ideal")?;
            doc_from_topconvex(&convtop::instances::lattice_ideal_space(&lattice)?)
        }
        "metric-betweenness" => {
            let input =
                input.ok_or(Usage("gen metric-betweenness requires --input".to_string()))?;
            let metric = metric_from_doc(&read_document(input)?)?;
            doc_from_topconvex(&convtop::instances::metric_betweenness_space(&metric)?)
        }
        "measure-algebra" => {
            let input = input.ok_or(Usage("gen measure-algebra requires --input".to_string()))?;
            let ms = measure_from_doc(&read_document(input)?)?;
            let ma = measure_algebra_space(&ms)?;
            if let Some(path) = metric_out {
                write_output(Some(path), &doc_from_metric(&ma.metric).to_canonical_json())?;
            }
            doc_from_topconvex(&ma.space)
        }
        "subgroup" => {
            let order = cyclic.ok_or(Usage("gen subgroup requires --cyclic".to_string()))?;
            let table = convtop::instances::cyclic_group_table(order);
            doc_from_topconvex(&convtop::instances::subalgebra_space(&table)?)
        }
        other => return Err(Usage(format!("unknown gen kind `{other}`"))),
    };
    write_output(out, &doc.to_canonical_json())?;
    Ok(0)
}

#[derive(Serialize)]
struct HomOutput {
    count: usize,
    maps: Vec<std::collections::BTreeMap<String, String>>,
}

fn cmd_homs(src: &Path, dst: &Path, category: &str, limit: u128, json: bool) -> Result<i32, Usage> {
    let src_doc = read_document(src)?;
    let dst_doc = read_document(dst)?;
    let homs = match category {
        "tc" => {
            let s = topconvex_from_doc(&src_doc)?;
            let d = topconvex_from_doc(&dst_doc)?;
            enumerate_tc_homs(&s, &d, limit)?
        }
        "pre" => {
            let s = preconvex_from_doc(&src_doc)?;
            let d = preconvex_from_doc(&dst_doc)?;
            enumerate_pre_homs(&s, &d, limit)?
        }
        other => return Err(Usage(format!("unknown category `{other}` (use tc or pre)"))),
    };
    if json {
        let maps = homs
            .iter()
            .map(|h| {
                (0..h.dom().size())
                    .map(|i| {
                        (
                            h.dom().label(i).to_string(),
                            h.cod().label(h.apply(i)).to_string(),
                        )
                    })
                    .collect()
            })
            .collect();
        let out = HomOutput {
            count: homs.len(),
            maps,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializes")
        );
    } else {
        println!("{} homomorphism(s)", homs.len());
        for h in &homs {
            println!("  {h}");
        }
    }
    Ok(0)
}

fn escape_label(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn lattice_dot(l: &FiniteLattice) -> String {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    for i in 0..l.size() {
        out.push_str(&format!(
            "  n{} [label=\"{}\"];\n",
            i,
            escape_label(l.label(i))
        ));
    }
    for (a, b) in l.covers() {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    out
}

fn cmd_export_dot(file: &Path, out: Option<&Path>) -> Result<i32, Usage> {
    let doc = read_document(file)?;
    let dot = match &doc {
        Document::Lattice { .. }
        | Document::PointedLattice { .. }
        | Document::PartialSup { .. } => {
            let lattice = lattice_from_doc(&doc)?;
            lattice_dot(&lattice)
        }
        Document::Topconvex { .. } => {
            // Inclusion order of the closed convex sets.
            let x = topconvex_from_doc(&doc)?;
            let family = x
                .closed()
                .intersect_family(x.convex())
                .map_err(|e| Usage(e.to_string()))?;
            let (lattice, _) = lattice_of_family(&family)?;
            lattice_dot(&lattice)
        }
        other => {
            return Err(Usage(format!(
                "export-dot expects a lattice-bearing or topconvex document, got {}",
                other.kind()
            )))
        }
    };
    write_output(out, &dot)?;
    Ok(0)
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use klein::ainfty::{check_ainfty_relations, check_calabi_yau, check_involution_compatibility, check_unit_axioms, AInfinityCategory, CalabiYauData};
use klein::error::Error;
use klein::exactlin::SparseMatrix;
use klein::format::{self, CategoryFile, LoadedCategory};
use klein::fuzz;
use klein::graphs::{self, MobiusGraph};
use klein::hochschild::{build_variant, homology, HomologyRow, Variant};
use klein::invcat::{check_dg_axioms, check_involution_axioms, InvolutiveCategory};
use klein::report::CheckReport;
use klein::surfcat::{self, MorphismWord, Slot};

#[derive(Parser)]
#[command(name = "klein", version, about = "Involutive A∞ categories, Möbius graphs, surface words and involutive Hochschild homology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Style::Text)]
    format: Style,
    /// Seed for commands that draw a random category.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Style {
    Text,
    Rows,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a category file.
    Check {
        category: PathBuf,
        /// Highest product arity built from DG data.
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Hochschild homology of a DG category, truncated by word length.
    Hh {
        category: PathBuf,
        #[arg(long, default_value_t = 4)]
        trunc: usize,
        #[arg(long, value_enum, default_value_t = HhVariant::All)]
        variant: HhVariant,
    },
    /// Möbius graph operations.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Surface words.
    Surf {
        #[command(subcommand)]
        command: SurfCommand,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HhVariant {
    Ordinary,
    Involutive,
    Normalized,
    All,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Contract the edge through a half-edge; prints the new graph file.
    Contract { graph: PathBuf, half_edge: usize },
    /// Contract all reducible edges; prints the new graph file.
    Reduce { graph: PathBuf },
    /// Exit 0 when the graphs are isomorphic, 1 otherwise.
    Iso { first: PathBuf, second: PathBuf },
    /// Topological type (g,u,h) of the thickening.
    Type { graph: PathBuf },
    /// Whether the moduli space of type (g,u,h) with n points is nonempty.
    Moduli { g: usize, u: usize, h: usize, n: usize },
}

#[derive(Subcommand)]
enum SurfCommand {
    /// Normal form of a word.
    Normalize { word: PathBuf },
    /// Normal form of the differential of a word.
    Diff { word: PathBuf },
    /// Matrix of a word; with a second word, exit 0 iff the matrices agree.
    Evaluate {
        word: PathBuf,
        other: Option<PathBuf>,
        /// Category with a trace; a random one from `--seed` otherwise.
        #[arg(long)]
        category: Option<PathBuf>,
    },
    /// Compare the closed-state complex with the normalized involutive
    /// Hochschild complex.
    ClosedVsHh {
        category: PathBuf,
        #[arg(long, default_value_t = 3)]
        trunc: usize,
    },
}

/// Outcome of a command: printed output and whether it passed.
struct Outcome {
    out: String,
    pass: bool,
}

impl Outcome {
    fn pass(out: String) -> Self {
        Outcome { out, pass: true }
    }
}

type Run = Result<Outcome, Error>;

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn check_trunc(trunc: usize) -> Result<(), Error> {
    if trunc == 0 {
        return Err(usage("--trunc must be at least 1"));
    }
    Ok(())
}

fn reports_outcome(reports: &[CheckReport], style: Style) -> Outcome {
    let pass = reports.iter().all(CheckReport::passed);
    let mut out = String::new();
    match style {
        Style::Text => {
            for r in reports {
                writeln!(out, "{r}").unwrap();
            }
            writeln!(out, "{}", if pass { "PASS" } else { "FAIL" }).unwrap();
        }
        Style::Rows => {
            writeln!(out, "report\tstatus\tchecked\tfailures").unwrap();
            for r in reports {
                writeln!(out, "{}\t{}\t{}\t{}", r.name, if r.passed() { "pass" } else { "fail" }, r.checked, r.failures).unwrap();
            }
            writeln!(out, "witness\tlaw\tinputs\tcoordinate\tlhs\trhs").unwrap();
            for r in reports {
                for w in &r.witnesses {
                    writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.name, w.law, w.inputs.join(","), w.coordinate, w.lhs, w.rhs).unwrap();
                }
            }
        }
    }
    Outcome { out, pass }
}

fn ainfty_reports(a: &AInfinityCategory, cy: Option<&CalabiYauData>) -> Result<Vec<CheckReport>, Error> {
    let mut reports = vec![check_ainfty_relations(a)?, check_unit_axioms(a)?, check_involution_compatibility(a)?];
    if let Some(cy) = cy {
        reports.push(check_calabi_yau(a, cy)?);
    }
    Ok(reports)
}

fn dg_reports(c: &InvolutiveCategory) -> Result<Vec<CheckReport>, Error> {
    Ok(vec![check_dg_axioms(c)?, check_involution_axioms(c)?])
}

fn cmd_check(path: &Path, nmax: Option<usize>, style: Style) -> Run {
    if nmax.is_some_and(|n| n < 2) {
        return Err(usage("--nmax must be at least 2"));
    }
    let f = format::load_category(path)?;
    let cy = f.calabi_yau();
    let reports = match &f.category {
        LoadedCategory::Dg(c) => {
            let mut reports = dg_reports(c)?;
            let a = f.ainfty(nmax.unwrap_or(2))?;
            reports.extend(ainfty_reports(&a, cy.as_ref())?);
            reports
        }
        LoadedCategory::AInfinity(a) => ainfty_reports(a, cy.as_ref())?,
    };
    Ok(reports_outcome(&reports, style))
}

fn dg_category(f: &CategoryFile) -> Result<&InvolutiveCategory, Error> {
    f.dg().ok_or_else(|| usage("this command needs a DG category (compose/diff), not a products table"))
}

fn homology_cell(r: Option<&HomologyRow>) -> String {
    match r {
        Some(r) if r.reliable => r.homology.to_string(),
        Some(r) => format!("{}*", r.homology),
        None => "-".into(),
    }
}

fn cmd_hh(path: &Path, trunc: usize, which: HhVariant, style: Style) -> Run {
    check_trunc(trunc)?;
    let f = format::load_category(path)?;
    let c = dg_category(&f)?;
    let checks = dg_reports(c)?;
    if !checks.iter().all(CheckReport::passed) {
        return Ok(reports_outcome(&checks, style));
    }
    let variants: Vec<Variant> = match which {
        HhVariant::Ordinary => vec![Variant::Ordinary],
        HhVariant::Involutive => vec![Variant::Involutive],
        HhVariant::Normalized => vec![Variant::Normalized],
        HhVariant::All => Variant::ALL.to_vec(),
    };
    let mut tables = Vec::new();
    for v in &variants {
        tables.push((*v, homology(&build_variant(c, trunc, *v)?, None)?));
    }
    let mut out = String::new();
    match style {
        Style::Rows => {
            writeln!(out, "variant\tdegree\tchain_dim\trank_d\thomology\treliable").unwrap();
            for (v, rows) in &tables {
                for r in rows {
                    writeln!(out, "{v}\t{}\t{}\t{}\t{}\t{}", r.degree, r.chain_dim, r.rank_out, r.homology, r.reliable).unwrap();
                }
            }
        }
        Style::Text => {
            for (v, rows) in &tables {
                writeln!(out, "{v} Hochschild homology, trunc {trunc}").unwrap();
                writeln!(out, "degree  chain  rank d  homology  reliable").unwrap();
                for r in rows {
                    writeln!(out, "{:>6}  {:>5}  {:>6}  {:>8}  {:>8}", r.degree, r.chain_dim, r.rank_out, r.homology, if r.reliable { "yes" } else { "no" })
                        .unwrap();
                }
                out.push('\n');
            }
            if tables.len() > 1 {
                let degrees: std::collections::BTreeSet<i64> = tables.iter().flat_map(|(_, rows)| rows.iter().map(|r| r.degree)).collect();
                writeln!(out, "homology side by side (* = outside the reliable window)").unwrap();
                writeln!(out, "degree  {}", tables.iter().map(|(v, _)| format!("{:>12}", v.name())).collect::<String>()).unwrap();
                for k in degrees {
                    let cells: String = tables.iter().map(|(_, rows)| format!("{:>12}", homology_cell(rows.iter().find(|r| r.degree == k)))).collect();
                    writeln!(out, "{k:>6}  {cells}").unwrap();
                }
            }
        }
    }
    Ok(Outcome::pass(out))
}

fn print_graph(g: &MobiusGraph) -> String {
    format::to_pretty(&format::graph_json("", g))
}

fn cmd_graph(cmd: &GraphCommand, style: Style) -> Run {
    match cmd {
        GraphCommand::Contract { graph, half_edge } => {
            let g = format::load_graph(graph)?;
            Ok(Outcome::pass(print_graph(&graphs::contract_edge(&g, *half_edge)?)))
        }
        GraphCommand::Reduce { graph } => {
            let g = format::load_graph(graph)?;
            Ok(Outcome::pass(print_graph(&graphs::reduce(&g)?)))
        }
        GraphCommand::Iso { first, second } => {
            let (a, b) = (format::load_graph(first)?, format::load_graph(second)?);
            Ok(match graphs::is_isomorphic(&a, &b) {
                Some(iso) => {
                    let mut out = String::from("isomorphic\n");
                    if style == Style::Rows {
                        writeln!(out, "vertex_map\t{:?}\nhalf_edge_map\t{:?}\nreversed\t{:?}", iso.vertex_map, iso.half_edge_map, iso.reversed).unwrap();
                    }
                    Outcome::pass(out)
                }
                None => Outcome { out: "not isomorphic\n".into(), pass: false },
            })
        }
        GraphCommand::Type { graph } => {
            let t = graphs::thicken_type(&format::load_graph(graph)?)?;
            Ok(Outcome::pass(match style {
                Style::Text => format!("{t}\n"),
                Style::Rows => format!("g\tu\th\n{}\t{}\t{}\n", t.g, t.u, t.h),
            }))
        }
        GraphCommand::Moduli { g, u, h, n } => {
            let nonempty = graphs::is_moduli_nonempty(*g, *u, *h, *n)?;
            Ok(Outcome::pass(if nonempty { "nonempty\n" } else { "empty\n" }.into()))
        }
    }
}

fn word_output(w: &MorphismWord, style: Style) -> String {
    match style {
        Style::Text => format!("{w}\n"),
        Style::Rows => format::to_pretty(&format::word_json("", w)),
    }
}

fn matrix_output(m: &SparseMatrix, style: Style) -> String {
    let mut out = String::new();
    match style {
        Style::Text => {
            writeln!(out, "{} × {} matrix", m.rows(), m.cols()).unwrap();
            for i in 0..m.rows() {
                let row: Vec<String> = (0..m.cols()).map(|j| format!("{:>5}", m.get(i, j).to_string())).collect();
                writeln!(out, "[{} ]", row.join(" ")).unwrap();
            }
        }
        Style::Rows => {
            writeln!(out, "row\tcol\tvalue").unwrap();
            for (i, j, x) in m.entries() {
                writeln!(out, "{i}\t{j}\t{x}").unwrap();
            }
        }
    }
    out
}

fn random_cy(seed: u64) -> (String, AInfinityCategory, CalabiYauData) {
    let mut r = fuzz::rng(seed);
    loop {
        let f = fuzz::random_involutive_algebra(&mut r, 4);
        if let Some(t) = f.trace {
            let a = klein::ainfty::from_dg(&f.category).expect("fuzzed algebras are valid");
            return (f.name, a, CalabiYauData::new(t));
        }
    }
}

fn uses_several_branes(w: &MorphismWord) -> bool {
    let (src, tgt) = (w.source(), w.target());
    src.slots().iter().chain(tgt.slots()).any(|s| matches!(s, Slot::Open(a, b) if *a > 0 || *b > 0))
}

fn cmd_surf(cmd: &SurfCommand, style: Style, seed: u64) -> Run {
    match cmd {
        SurfCommand::Normalize { word } => Ok(Outcome::pass(word_output(&surfcat::normalize(&format::load_word(word)?)?, style))),
        SurfCommand::Diff { word } => {
            let w = format::load_word(word)?;
            Ok(Outcome::pass(word_output(&surfcat::normalize(&surfcat::differential(&w))?, style)))
        }
        SurfCommand::Evaluate { word, other, category } => {
            let (label, a, cy) = match category {
                Some(p) => {
                    let f = format::load_category(p)?;
                    let a = f.ainfty(2)?;
                    (f.name.clone(), a, f.calabi_yau())
                }
                None => {
                    let (name, a, cy) = random_cy(seed);
                    (format!("{name} (seed {seed})"), a, Some(cy))
                }
            };
            let w = format::load_word(word)?;
            if category.is_none() && uses_several_branes(&w) {
                return Err(usage("random categories have one brane; pass --category for words with several labels"));
            }
            let m = surfcat::evaluate(&w, &a, cy.as_ref())?;
            let mut out = format!("category: {label}\n");
            match other {
                None => {
                    out.push_str(&matrix_output(&m, style));
                    Ok(Outcome::pass(out))
                }
                Some(p) => {
                    let m2 = surfcat::evaluate(&format::load_word(p)?, &a, cy.as_ref())?;
                    let equal = m == m2;
                    out.push_str(if equal { "equal matrices\n" } else { "different matrices\n" });
                    if !equal {
                        out.push_str(&matrix_output(&m, style));
                        out.push_str(&matrix_output(&m2, style));
                    }
                    Ok(Outcome { out, pass: equal })
                }
            }
        }
        SurfCommand::ClosedVsHh { category, trunc } => {
            check_trunc(*trunc)?;
            let f = format::load_category(category)?;
            let cmp = surfcat::compare_with_hochschild(dg_category(&f)?, *trunc)?;
            let out = match style {
                Style::Text => format!("{cmp}\n"),
                Style::Rows => {
                    let mut out = String::from("degree\tclosed_dim\thochschild_dim\tinvertible\tcommutes\n");
                    for r in &cmp.rows {
                        writeln!(out, "{}\t{}\t{}\t{}\t{}", r.degree, r.closed_dim, r.hochschild_dim, r.invertible, r.commutes).unwrap();
                    }
                    out
                }
            };
            Ok(Outcome { out, pass: cmp.equal() })
        }
    }
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Check { category, nmax } => cmd_check(category, *nmax, cli.format),
        Command::Hh { category, trunc, variant } => cmd_hh(category, *trunc, *variant, cli.format),
        Command::Graph { command } => cmd_graph(command, cli.format),
        Command::Surf { command } => cmd_surf(command, cli.format, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.out);
            ExitCode::from(if o.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

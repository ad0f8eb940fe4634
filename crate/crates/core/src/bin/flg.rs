use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use flg::cnf::CnfFormula;
use flg::coloring::{color_trianglefree_fl, edgecolor_reduction};
use flg::gadgets::assemble_gf;
use flg::intersect::{detect_patterns, intersection_graph, ArcCertificate, ForbiddenPattern, PatternName};
use flg::optimize::{max_stable_set, solve_uflp, uflp_brute, UflpInstance};
use flg::preimage::{count_up_to_automorphism, enumerate_preimages, SearchOptions};
use flg::recognize::{recognize, Recognition};
use flg::reductions::{cubic_to_hard_digraph, poljak_subdivision};
use flg::sat::{verify_gad1, verify_gad2, witness_from_assignment, Status};
use flg::{Digraph, FlgError, UGraph};

#[derive(Parser)]
#[command(name = "flg", version, about = "Intersection graphs of digraphs and facility location")]
struct Cli {
    /// Print JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for commands that take several input files.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Step budget for exhaustive preimage searches.
    #[arg(long, global = true, default_value_t = 2_000_000_000)]
    budget: u64,

    /// Wall-clock limit for exhaustive preimage searches, in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the intersection graph of a digraph.
    Intersect {
        digraph: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide whether triangle-free graphs are FL graphs, with a preimage.
    Recognize {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Colour triangle-free FL graphs with at most three colours.
    Color {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
    },
    /// Enumerate the preimages of a small graph.
    Preimages {
        graph: PathBuf,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Graph constructions used in the hardness proofs.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Preimage of the 3-SAT graph read off a satisfying assignment.
    Witness {
        cnf: PathBuf,
        /// Literals such as `1 -2 3`, or a 0/1 string, or a file holding either.
        #[arg(allow_hyphen_values = true)]
        assignment: String,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check the gadget lemmas by exhaustive search.
    #[command(subcommand)]
    Verify(Verify),
    /// Exact solvers.
    #[command(subcommand)]
    Solve(Solve),
    /// Find forbidden patterns in a digraph.
    Patterns {
        #[arg(required = true)]
        digraphs: Vec<PathBuf>,
        /// Patterns to look for (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<PatternName>,
        /// Exit with status 1 if any of these patterns occurs.
        #[arg(long, value_delimiter = ',')]
        forbid: Vec<PatternName>,
    },
}

#[derive(Subcommand)]
enum Reduce {
    /// 3-SAT formula (DIMACS cnf) to its gadget graph.
    Sat2flg {
        cnf: PathBuf,
        /// Write node names as JSON here.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Replace every edge by a path of three edges.
    Poljak {
        graph: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Digraph whose intersection graph is k-colourable iff the graph is k-edge-colourable.
    Edgecolor {
        #[arg(long)]
        k: usize,
        graph: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Pattern-free digraph whose intersection graph is the subdivided cubic graph.
    Cubic2flg {
        graph: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Orientation schemes of the variable gadget.
    Gad1 {
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Branch configurations of the clause gadget.
    Gad2,
}

#[derive(Subcommand)]
enum Solve {
    /// Maximum (weighted) stable set.
    Stable {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
    },
    /// Uncapacitated facility location.
    Uflp {
        instance: PathBuf,
        /// Enumerate open sets instead of going through stable sets.
        #[arg(long)]
        brute: bool,
    },
}

/// Result of one command: exit status plus both renderings.
struct Report {
    code: u8,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { code: 0, text, json }
    }
}

const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Library errors with node numbers as they appear in the input files.
fn lib<T>(r: flg::Result<T>) -> Result<T> {
    r.map_err(|e| e.one_based().into())
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_ugraph(path: &Path) -> Result<UGraph> {
    lib(UGraph::parse(&read_input(path)?)).with_context(|| format!("parsing {}", path.display()))
}

fn read_digraph(path: &Path) -> Result<Digraph> {
    lib(Digraph::parse(&read_input(path)?)).with_context(|| format!("parsing {}", path.display()))
}

fn read_cnf(path: &Path) -> Result<CnfFormula> {
    lib(CnfFormula::parse_dimacs(&read_input(path)?)).with_context(|| format!("parsing {}", path.display()))
}

fn write_dot(path: &Option<PathBuf>, dot: impl FnOnce() -> String) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, dot()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn digraph_json(d: &Digraph, cert: Option<&ArcCertificate>) -> Value {
    let arcs: Vec<[usize; 2]> = d.arcs().iter().map(|a| [a.tail + 1, a.head + 1]).collect();
    let mut v = json!({ "nodes": d.node_count(), "arcs": arcs });
    if let Some(c) = cert {
        v["certificate"] = json!(c.map.iter().map(|a| a + 1).collect::<Vec<_>>());
    }
    v
}

fn ugraph_json(g: &UGraph) -> Value {
    let edges: Vec<[usize; 2]> = g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect();
    json!({ "nodes": g.node_count(), "edges": edges })
}

/// Digraph text with a comment line per graph node giving its arc.
fn digraph_text(d: &Digraph, cert: &ArcCertificate) -> String {
    let mut s = d.to_text();
    for (v, a) in cert.map.iter().enumerate() {
        s.push_str(&format!("c node {} arc {}\n", v + 1, a + 1));
    }
    s
}

fn search_options(cli: &Cli) -> SearchOptions {
    SearchOptions {
        max_steps: cli.budget,
        deadline: cli.time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s)),
        ..SearchOptions::default()
    }
}

/// Runs `f` on every input with `jobs` threads; results keep input order.
fn batch<T: Send>(inputs: &[PathBuf], jobs: usize, f: impl Fn(&Path) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, inputs.len().max(1));
    if jobs == 1 {
        return inputs.iter().map(|p| f(p)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..inputs.len()).map(|_| None).collect();
    let done = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some(p) = inputs.get(i) else { break };
                let r = f(p);
                done.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every input handled")).collect()
}

/// Combines per-file reports: the worst status wins, JSON becomes an array
/// when there are several files. A failing file does not stop the others.
fn merge(inputs: &[PathBuf], reports: Vec<Result<Report>>) -> Result<Report> {
    if reports.len() == 1 {
        return reports.into_iter().next().expect("one report");
    }
    let mut code = 0;
    let mut text = String::new();
    let mut items = Vec::new();
    for (p, r) in inputs.iter().zip(reports) {
        let file = p.display().to_string();
        match r {
            Ok(r) => {
                code = code.max(r.code);
                text.push_str(&format!("c file {file}\n{}", r.text));
                items.push(json!({ "file": file, "result": r.json }));
            }
            Err(e) => {
                eprintln!("flg: {file}: {e:#}");
                code = code.max(exit_code(&e));
                text.push_str(&format!("c file {file}\nc error\n"));
                items.push(json!({ "file": file, "error": format!("{e:#}") }));
            }
        }
    }
    Ok(Report {
        code,
        text,
        json: Value::Array(items),
    })
}

fn cmd_intersect(path: &Path, dot: &Option<PathBuf>) -> Result<Report> {
    let d = read_digraph(path)?;
    let (g, _) = lib(intersection_graph(&d))?;
    write_dot(dot, || g.to_dot("intersection", None))?;
    Ok(Report::ok(g.to_text(), ugraph_json(&g)))
}

fn cmd_recognize(path: &Path, dot: &Option<PathBuf>) -> Result<Report> {
    let g = read_ugraph(path)?;
    match lib(recognize(&g))? {
        Recognition::Accepted(d, cert) => {
            write_dot(dot, || d.to_dot("preimage"))?;
            let mut j = digraph_json(&d, Some(&cert));
            j["accepted"] = json!(true);
            Ok(Report::ok(digraph_text(&d, &cert), j))
        }
        Recognition::Refused(r) => {
            let comp: Vec<usize> = r.component.iter().map(|v| v + 1).collect();
            let text = format!(
                "c not an FL graph: component {:?} keeps {} independent cycles\n",
                comp, r.cycles
            );
            Ok(Report {
                code: EXIT_NO,
                text,
                json: json!({ "accepted": false, "component": comp, "cycles": r.cycles }),
            })
        }
    }
}

fn cmd_color(path: &Path) -> Result<Report> {
    let g = read_ugraph(path)?;
    let c = lib(color_trianglefree_fl(&g))?;
    let mut text = format!("c colours {}\n", c.count());
    let mut map = serde_json::Map::new();
    for (v, &k) in c.colors.iter().enumerate() {
        text.push_str(&format!("v {} {}\n", v + 1, k));
        map.insert((v + 1).to_string(), json!(k));
    }
    Ok(Report::ok(text, json!({ "colors": map, "count": c.count() })))
}

fn cmd_preimages(cli: &Cli, path: &Path, count_only: bool, dot: &Option<PathBuf>) -> Result<Report> {
    let g = read_ugraph(path)?;
    let set = lib(enumerate_preimages(&g, &search_options(cli)))?;
    let digraphs: Vec<Digraph> = set.members.iter().map(|(d, _)| d.clone()).collect();
    let orbits = count_up_to_automorphism(&g, &digraphs, 100_000);
    write_dot(dot, || {
        digraphs
            .iter()
            .enumerate()
            .map(|(i, d)| d.to_dot(&format!("preimage{}", i + 1)))
            .collect()
    })?;
    if count_only {
        return Ok(Report::ok(format!("{}\n", set.count()), json!({ "count": set.count() })));
    }
    let mut text = format!("c preimages {}\n", set.count());
    if let Some(k) = orbits {
        text.push_str(&format!("c up to isomorphism {k}\n"));
    }
    for (d, cert) in &set.members {
        text.push('\n');
        text.push_str(&digraph_text(d, cert));
    }
    let members: Vec<Value> = set.members.iter().map(|(d, c)| digraph_json(d, Some(c))).collect();
    Ok(Report::ok(
        text,
        json!({
            "count": set.count(),
            "up_to_isomorphism": orbits,
            "steps": set.stats.steps,
            "preimages": members,
        }),
    ))
}

fn cmd_reduce(which: &Reduce) -> Result<Report> {
    match which {
        Reduce::Sat2flg { cnf, labels, dot } => {
            let f = read_cnf(cnf)?;
            let (g, names) = lib(assemble_gf(&f))?;
            write_dot(dot, || g.to_dot("gf", Some(&names.primaries())))?;
            if let Some(p) = labels {
                fs::write(p, serde_json::to_string_pretty(&names.names)?)?;
            }
            let mut j = ugraph_json(&g);
            j["labels"] = json!(names.names);
            Ok(Report::ok(g.to_text(), j))
        }
        Reduce::Poljak { graph, dot } => {
            let g = read_ugraph(graph)?;
            let (s, notes) = poljak_subdivision(&g);
            write_dot(dot, || s.to_dot("subdivision", None))?;
            let inner: Vec<Value> = notes
                .iter()
                .map(|n| json!({ "edge": [n.edge.0 + 1, n.edge.1 + 1], "inner": [n.inner[0] + 1, n.inner[1] + 1] }))
                .collect();
            let mut j = ugraph_json(&s);
            j["subdivided"] = json!(inner);
            Ok(Report::ok(s.to_text(), j))
        }
        Reduce::Edgecolor { k, graph, dot } => {
            let g = read_ugraph(graph)?;
            let (d, notes) = lib(edgecolor_reduction(&g, *k))?;
            write_dot(dot, || d.to_dot("edgecolor"))?;
            let mut j = digraph_json(&d, None);
            j["edges"] = json!(notes
                .iter()
                .map(|n| json!({
                    "edge": [n.edge.0 + 1, n.edge.1 + 1],
                    "incoming": [n.incoming[0] + 1, n.incoming[1] + 1],
                    "pendants": n.pendants.iter().map(|a| a + 1).collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>());
            Ok(Report::ok(d.to_text(), j))
        }
        Reduce::Cubic2flg { graph, dot } => {
            let g = read_ugraph(graph)?;
            let (d, cert) = lib(cubic_to_hard_digraph(&g))?;
            write_dot(dot, || d.to_dot("cubic"))?;
            Ok(Report::ok(digraph_text(&d, &cert), digraph_json(&d, Some(&cert))))
        }
    }
}

fn parse_assignment(raw: &str, n: usize) -> Result<Vec<bool>> {
    let text = match fs::read_to_string(raw) {
        Ok(s) => s,
        Err(_) => raw.to_owned(),
    };
    let trimmed = text.trim();
    if !trimmed.is_empty() && trimmed.chars().all(|c| c == '0' || c == '1') {
        if trimmed.len() != n {
            bail!("assignment has {} values for {n} variables", trimmed.len());
        }
        return Ok(trimmed.chars().map(|c| c == '1').collect());
    }
    let mut out = vec![None; n];
    for tok in trimmed.split_whitespace() {
        let lit: i64 = tok.parse().with_context(|| format!("bad literal `{tok}`"))?;
        if lit == 0 {
            continue;
        }
        let v = lit.unsigned_abs() as usize;
        if v > n {
            bail!("literal {lit} names variable {v} of {n}");
        }
        out[v - 1] = Some(lit > 0);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, b)| b.with_context(|| format!("variable {} has no value", i + 1)))
        .collect()
}

fn cmd_witness(cnf: &Path, assignment: &str, dot: &Option<PathBuf>) -> Result<Report> {
    let f = read_cnf(cnf)?;
    let a = parse_assignment(assignment, f.variable_count)?;
    let (d, cert) = lib(witness_from_assignment(&f, &a))?;
    write_dot(dot, || d.to_dot("witness"))?;
    Ok(Report::ok(digraph_text(&d, &cert), digraph_json(&d, Some(&cert))))
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Verified => 0,
        Status::Failed => EXIT_NO,
        Status::Unknown => EXIT_BUDGET,
    }
}

fn cmd_verify(cli: &Cli, which: &Verify) -> Result<Report> {
    let opts = search_options(cli);
    let (status, json) = match which {
        Verify::Gad1 { m } => {
            let r = lib(verify_gad1(*m, &opts))?;
            (r.status, serde_json::to_value(&r)?)
        }
        Verify::Gad2 => {
            let r = lib(verify_gad2(&opts))?;
            (r.status, serde_json::to_value(&r)?)
        }
    };
    Ok(Report {
        code: status_code(status),
        text: serde_json::to_string_pretty(&json)? + "\n",
        json,
    })
}

fn cmd_stable(path: &Path) -> Result<Report> {
    let g = read_ugraph(path)?;
    let s = lib(max_stable_set(&g))?;
    let nodes: Vec<usize> = s.nodes.iter().map(|v| v + 1).collect();
    let text = format!("c weight {}\nv {}\n", s.weight, nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
    Ok(Report::ok(text, json!({ "nodes": nodes, "weight": s.weight.to_string() })))
}

fn cmd_uflp(path: &Path, brute: bool) -> Result<Report> {
    let inst = lib(UflpInstance::parse(&read_input(path)?)).with_context(|| format!("parsing {}", path.display()))?;
    let sol = if brute { lib(uflp_brute(&inst))? } else { lib(solve_uflp(&inst))? };
    let open: Vec<usize> = sol.open.iter().map(|v| v + 1).collect();
    let assign: Vec<[usize; 2]> = sol.assignment.iter().map(|&(u, a)| [u + 1, a + 1]).collect();
    let mut text = format!("c objective {}\n", sol.objective);
    text.push_str(&format!("o {}\n", open.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")));
    for [u, a] in &assign {
        text.push_str(&format!("x {u} {a}\n"));
    }
    Ok(Report::ok(
        text,
        json!({ "objective": sol.objective.to_string(), "open": open, "assignment": assign }),
    ))
}

fn cmd_patterns(path: &Path, only: &[PatternName], forbid: &[PatternName]) -> Result<Report> {
    let d = read_digraph(path)?;
    let names: Vec<PatternName> = if only.is_empty() { PatternName::ALL.to_vec() } else { only.to_vec() };
    let mut wanted = names.clone();
    for f in forbid {
        if !wanted.contains(f) {
            wanted.push(*f);
        }
    }
    let patterns: Vec<ForbiddenPattern> = wanted.into_iter().map(ForbiddenPattern::new).collect();
    let found = detect_patterns(&d, &patterns);
    let hit = found.iter().any(|m| forbid.contains(&m.name));
    let mut text = String::new();
    let mut items = Vec::new();
    for m in &found {
        let nodes: Vec<usize> = m.embedding.iter().map(|v| v + 1).collect();
        text.push_str(&format!("{} {}\n", m.name, nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")));
        items.push(json!({ "pattern": m.name.to_string(), "nodes": nodes }));
    }
    Ok(Report {
        code: if hit { EXIT_NO } else { 0 },
        text,
        json: json!({ "matches": items, "forbidden_found": hit }),
    })
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Intersect { digraph, dot } => cmd_intersect(digraph, dot),
        Command::Recognize { graphs, dot } => {
            let dot = if graphs.len() == 1 { dot.clone() } else { None };
            merge(graphs, batch(graphs, cli.jobs, |p| cmd_recognize(p, &dot)))
        }
        Command::Color { graphs } => merge(graphs, batch(graphs, cli.jobs, cmd_color)),
        Command::Preimages { graph, count_only, dot } => cmd_preimages(cli, graph, *count_only, dot),
        Command::Reduce(which) => cmd_reduce(which),
        Command::Witness { cnf, assignment, dot } => cmd_witness(cnf, assignment, dot),
        Command::Verify(which) => cmd_verify(cli, which),
        Command::Solve(Solve::Stable { graphs }) => merge(graphs, batch(graphs, cli.jobs, cmd_stable)),
        Command::Solve(Solve::Uflp { instance, brute }) => cmd_uflp(instance, *brute),
        Command::Patterns { digraphs, only, forbid } => {
            merge(digraphs, batch(digraphs, cli.jobs, |p| cmd_patterns(p, only, forbid)))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let budget = e
        .chain()
        .any(|c| matches!(c.downcast_ref::<FlgError>(), Some(FlgError::BudgetExhausted(_))));
    if budget {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.json);
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("flg: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

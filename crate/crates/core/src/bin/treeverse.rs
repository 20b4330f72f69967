use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use treeverse::embed::{embed_traced, embed_with_trace, validate_embedding};
use treeverse::error::Error;
use treeverse::graph::{generate, generate_legacy, generate_prefix, GeneratedGraph};
use treeverse::io::{parse_guest, GraphFile, HostFile};
use treeverse::ks::{build_tk, prefix_universal_graph, tk_size};
use treeverse::oracle::{verify_interval_universal, verify_universal};
use treeverse::taux::check_taux;
use treeverse::tree::OrderedTree;
use treeverse::treewidth::{
    build_universal_tw, embed_tw, gen_partial_ktree, min_degree_decomposition,
    normalize_decomposition, validate_decomposition, validate_tw_embedding,
};
use treeverse::{bounds, ks};

const DEFAULT_SEED: u64 = 0x7EE5;

#[derive(Parser)]
#[command(
    name = "treeverse",
    version,
    about = "Sparse universal graphs for trees and bounded treewidth"
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Tk,
    Bk,
    Legacy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Edgelist,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph; stats go to stdout when --out is given, else stderr.
    Build {
        #[arg(long, value_enum)]
        family: Family,
        /// Required unless --n picks the tk graph.
        #[arg(long, required_unless_present = "n")]
        k: Option<usize>,
        /// Offset for G4; defaults to 2 for tk and 0 for bk.
        #[arg(long)]
        h: Option<usize>,
        /// Keep only the first N vertices (tk: the N-vertex universal graph,
        /// k is then ignored).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a guest forest into a host written by `build --format json`.
    Embed {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        guest: PathBuf,
        #[arg(long, default_value_t = 0)]
        x1: usize,
        #[arg(long)]
        x2: Option<usize>,
        /// Also emit the recursion tree and its checks (guest must be a tree).
        #[arg(long)]
        trace: bool,
    },
    /// Check the N-vertex universal graph against every N-vertex tree, or
    /// every DFS window of G^2_{T_k} (or legacy G(k)) with --interval.
    Verify {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        interval: bool,
        #[arg(long, default_value_t = 7)]
        max_m: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        legacy: bool,
        /// Cross-check with exhaustive search up to this size.
        #[arg(long, default_value_t = 8)]
        oracle_upto: usize,
    },
    /// Blow-up universal graph for n-vertex graphs of treewidth k.
    TwBuild {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Write the blown-up edge list here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a graph of treewidth <= k; uses its stored decomposition or a
    /// minimum-degree one.
    TwEmbed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Random partial k-tree with its decomposition.
    TwGen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge counts of the binary-tree construction vs the T_k construction at
    /// n = |T_k|, as CSV.
    Bench {
        #[arg(long, default_value_t = 2)]
        kmin: usize,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
    },
}

enum Fail {
    Invalid(String),
    Counterexample(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(m) => Fail::Counterexample(m),
            e => Fail::Invalid(e.to_string()),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail::Invalid(e.to_string())
}

fn read(path: &PathBuf) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

fn csv(g: &GeneratedGraph) -> String {
    let mut s = String::from("u,w,rules\n");
    for &(a, b) in g.graph.edges() {
        let p = g.provenance(a, b).unwrap();
        let mut rules: Vec<&str> = p
            .forward()
            .into_iter()
            .chain(p.backward())
            .map(|r| r.name())
            .collect();
        rules.sort_unstable();
        rules.dedup();
        s += &format!("{a},{b},{}\n", rules.join("|"));
    }
    s
}

fn build(
    family: Family,
    k: Option<usize>,
    h: Option<usize>,
    n: Option<usize>,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), Fail> {
    let need_k = || k.ok_or_else(|| invalid("--k is required here"));
    let (name, k, g) = match family {
        Family::Tk => match n {
            Some(n) => {
                let p = prefix_universal_graph(n)?;
                (
                    "tk",
                    p.k,
                    generate_prefix(&build_tk(p.k)?.tree, h.unwrap_or(2), n)?,
                )
            }
            None => {
                let k = need_k()?;
                ("tk", k, generate(&build_tk(k)?.tree, h.unwrap_or(2)))
            }
        },
        Family::Bk => {
            let k = need_k()?;
            if k > ks::max_k() + 6 {
                return Err(Fail::Invalid(format!("B({k}) is above the size budget")));
            }
            let t = OrderedTree::perfect_binary(k);
            let g = match n {
                Some(n) => generate_prefix(&t, h.unwrap_or(0), n)?,
                None => generate(&t, h.unwrap_or(0)),
            };
            ("bk", k, g)
        }
        Family::Legacy => {
            let k = need_k()?;
            if k > ks::max_k() + 6 {
                return Err(Fail::Invalid(format!("G({k}) is above the size budget")));
            }
            ("legacy", k, generate_legacy(k))
        }
    };
    let body = match format {
        Format::Json => pretty(&HostFile::from_graph(name, k, &g)),
        Format::Edgelist => g.graph.to_edge_list(),
        Format::Dot => g.to_dot(),
        Format::Csv => csv(&g),
    };
    let nv = g.len() as u64;
    let stats = json!({
        "family": name,
        "k": k,
        "h": g.h,
        "vertices": g.len(),
        "edges": g.edge_count(),
        "arcs": g.arc_count(),
        "edge_bound": bounds::bound_value(nv, 600),
        "bound_holds": bounds::edge_bound_holds(g.edge_count() as u64, nv),
    });
    emit(out, &body)?;
    if out.is_some() {
        print!("{}", pretty(&stats));
    } else {
        eprint!("{}", pretty(&stats));
    }
    Ok(())
}

fn embed_cmd(
    host: &PathBuf,
    guest: &PathBuf,
    x1: usize,
    x2: Option<usize>,
    trace: bool,
) -> Result<(), Fail> {
    let hf: HostFile =
        serde_json::from_str(&read(host)?).map_err(|e| invalid(format!("host: {e}")))?;
    let g = hf.graph()?;
    let f = parse_guest(&read(guest)?)?;
    let x2 = x2.unwrap_or(x1);
    let (e, records, taux) = if trace {
        let (e, t, a) = embed_with_trace(&g.tree, &f, x1, x2)?;
        (e, t, Some(a))
    } else {
        let (e, t) = embed_traced(&g.tree, &f, x1, x2)?;
        (e, t, None)
    };
    let report = validate_embedding(&g, &f, &e.map);
    let mut out = json!({ "embedding": e.to_json(), "validation": report });
    if let Some(a) = &taux {
        out["trace"] = json!({
            "steps": records.step_counts(),
            "max_depth": records.max_depth,
            "taux": a,
            "invariants": check_taux(&g.tree, &f, &e.map, a),
        });
    }
    print!("{}", pretty(&out));
    if report.ok() {
        Ok(())
    } else {
        Err(Fail::Counterexample("embedding failed validation".into()))
    }
}

fn verify(
    n: Option<usize>,
    interval: bool,
    max_m: usize,
    k: usize,
    legacy: bool,
    oracle_upto: usize,
) -> Result<(), Fail> {
    if interval {
        let host = if legacy {
            generate_legacy(k)
        } else {
            generate(&build_tk(k)?.tree, 2)
        };
        let rep = verify_interval_universal(&host, max_m, oracle_upto)?;
        print!("{}", pretty(&rep));
        return if rep.ok() {
            Ok(())
        } else {
            Err(Fail::Counterexample("a window misses a tree".into()))
        };
    }
    let n = n.ok_or_else(|| invalid("--n is required without --interval"))?;
    let reports: Vec<_> = (1..=n)
        .into_par_iter()
        .map(|m| verify_universal(&prefix_universal_graph(m)?.graph, m, oracle_upto))
        .collect::<Result<_, _>>()?;
    print!("{}", pretty(&reports));
    if reports.iter().all(|r| r.ok()) {
        Ok(())
    } else {
        Err(Fail::Counterexample("some tree was not embedded".into()))
    }
}

fn tw_build(n: usize, k: usize, out: &Option<PathBuf>) -> Result<(), Fail> {
    let g = build_universal_tw(n, k)?;
    if out.is_some() {
        let mut s = String::new();
        for (a, b) in g.edges() {
            s += &format!("{a} {b}\n");
        }
        emit(out, &s)?;
    }
    print!("{}", pretty(&g.stats()));
    Ok(())
}

fn tw_embed(path: &PathBuf, k: usize) -> Result<(), Fail> {
    let gf: GraphFile =
        serde_json::from_str(&read(path)?).map_err(|e| invalid(format!("graph: {e}")))?;
    let h = gf.graph()?;
    let witness = gf
        .decomposition
        .clone()
        .unwrap_or_else(|| min_degree_decomposition(&h));
    let rep = validate_decomposition(&h, &witness);
    if !rep.ok() {
        return Err(invalid(format!(
            "decomposition is invalid: {}",
            serde_json::to_string(&rep).unwrap()
        )));
    }
    let d = normalize_decomposition(&h, &witness, k)?;
    let g = build_universal_tw(h.vertex_count().max(k), k)?;
    let e = embed_tw(&h, &d, &g)?;
    let check = validate_tw_embedding(&h, &g, &e.pi);
    let out = json!({
        "universal": g.stats(),
        "witness_width": rep.width,
        "bags": d.len(),
        "pi": e.pi,
        "validation": check,
    });
    print!("{}", pretty(&out));
    if check.ok() {
        Ok(())
    } else {
        Err(Fail::Counterexample(
            "blow-up embedding failed validation".into(),
        ))
    }
}

fn tw_gen(n: usize, k: usize, seed: u64, out: &Option<PathBuf>) -> Result<(), Fail> {
    let (h, d) = gen_partial_ktree(n, k, seed)?;
    let gf = GraphFile {
        n,
        edges: h.edges().to_vec(),
        decomposition: Some(d),
        seed: Some(seed),
    };
    emit(out, &pretty(&gf))
}

fn bench(kmin: usize, kmax: usize) -> Result<(), Fail> {
    if kmin > kmax {
        return Err(invalid("--kmin above --kmax"));
    }
    println!("n,edges_legacy_fixed,edges_new,ratio");
    for k in kmin..=kmax {
        let n = tk_size(k) as usize;
        let l = (usize::BITS - n.leading_zeros()) as usize;
        let old = generate_prefix(&OrderedTree::perfect_binary(l), 0, n)?.edge_count();
        let new = prefix_universal_graph(n)?.graph.edge_count();
        println!("{n},{old},{new},{:.4}", new as f64 / old as f64);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    let r = match &cli.cmd {
        Cmd::Build {
            family,
            k,
            h,
            n,
            format,
            out,
        } => build(*family, *k, *h, *n, *format, out),
        Cmd::Embed {
            host,
            guest,
            x1,
            x2,
            trace,
        } => embed_cmd(host, guest, *x1, *x2, *trace),
        Cmd::Verify {
            n,
            interval,
            max_m,
            k,
            legacy,
            oracle_upto,
        } => verify(*n, *interval, *max_m, *k, *legacy, *oracle_upto),
        Cmd::TwBuild { n, k, out } => tw_build(*n, *k, out),
        Cmd::TwEmbed { graph, k } => tw_embed(graph, *k),
        Cmd::TwGen { n, k, seed, out } => tw_gen(*n, *k, *seed, out),
        Cmd::Bench { kmin, kmax } => bench(*kmin, *kmax),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Counterexample(m)) => {
            eprintln!("counterexample: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

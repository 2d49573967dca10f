use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use tropigon::divisor::{linearly_equivalent, rank, reduce, Divisor};
use tropigon::io::{self, DotOptions, IdMap, Kind};
use tropigon::metric::MetricGraph;
use tropigon::moduli::{build_3_ladders, enumerate_trees, facets_and_adjacency, maximal_cells_with_jobs, Cell};
use tropigon::morphism::{check_morphism, pullback, remove_contractions};
use tropigon::search::{find_trigonal_divisor_with, DEFAULT_ORDER};
use tropigon::trigonal::{build_trigonal_cover_with_loops, verify_equivalence_roundtrip};
use tropigon::Error;

#[derive(Parser)]
#[command(name = "tropigon", version, about = "Divisors on metric graphs and degree-3 covers of trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size, genus and connectivity of a graph.
    Info { graph: PathBuf },
    /// Rank of a divisor.
    Rank { graph: PathBuf, divisor: PathBuf },
    /// Reduced form of a divisor with respect to a base point.
    Reduce {
        graph: PathBuf,
        divisor: PathBuf,
        /// `v:ID` or `e:ID@p/q`
        #[arg(long, default_value = "v:0")]
        base: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Whether two divisors are linearly equivalent; exit status 1 if not.
    Equiv { graph: PathBuf, first: PathBuf, second: PathBuf },
    /// Harmonicity report of a morphism; exit status 1 if not harmonic.
    CheckMorphism { morphism: PathBuf },
    /// Pull back a divisor on the target of a morphism.
    Pullback {
        morphism: PathBuf,
        divisor: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replace contracted edges by edges over new leaves of the target.
    RemoveContractions {
        morphism: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Degree-3 cover of a tree built from a divisor of degree 3 and rank 1.
    TrigonalCover {
        graph: PathBuf,
        divisor: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Search for a divisor of degree 3 and rank at least 1; exit status 1 if
    /// none is found.
    FindDivisor {
        graph: PathBuf,
        /// Comma separated strategy names, tried in order.
        #[arg(long)]
        strategy: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ladders over all trees with the given number of vertices.
    Ladders {
        #[arg(long)]
        genus: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Maximal cells, their dimensions and connectivity through facets.
    Moduli {
        #[arg(long, conflicts_with = "max_genus")]
        genus: Option<usize>,
        /// Every genus from 3 up to this one.
        #[arg(long)]
        max_genus: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Graphviz rendering of a graph, morphism or trigonal type document.
    ToDot {
        document: PathBuf,
        /// Divisor drawn as chip labels; only for graphs.
        #[arg(long)]
        divisor: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// 1 for a negative answer, 2 for bad input.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Format(_) | Error::InvalidGraph(_) | Error::UnknownEdge(_) | Error::UnknownVertex(_) | Error::InvalidPoint(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<io::Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?;
    io::parse_document(&text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn write_or_print(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure(2, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn metric_and_divisor(graph: &Path, divisor: &Path) -> Result<(MetricGraph, IdMap, Divisor), Failure> {
    let (m, ids) = io::read_metric_graph(&read(graph)?)?;
    let d = io::read_divisor(&read(divisor)?, &m, &ids)?;
    Ok((m, ids, d))
}

fn moduli_line(g: usize, cells: &[Cell]) -> Result<String, Failure> {
    let mut dims: Vec<usize> = cells.iter().flat_map(|c| c.types.iter().map(|t| t.1)).collect();
    dims.sort_unstable();
    dims.dedup();
    let types: usize = cells.iter().map(|c| c.types.len()).sum();
    let adj = facets_and_adjacency(cells)?;
    Ok(format!(
        "genus {g}: {} maximal cells, {types} types, dimensions {dims:?}, {} adjacencies, connected {}",
        cells.len(),
        adj.edges.len(),
        adj.connected
    ))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Info { graph } => {
            let doc = read(&graph)?;
            let (g, _) = io::read_graph(&doc)?;
            println!("vertices {}", g.vertex_count());
            println!("edges {}", g.edge_count());
            println!("genus {}", g.genus());
            println!("connected {}", g.is_connected());
            match g.edge_connectivity() {
                Some(k) => println!("edge connectivity {k}"),
                None => println!("edge connectivity -"),
            }
            if doc.kind == Kind::MetricGraph {
                let (m, _) = io::read_metric_graph(&doc)?;
                println!("total length {}", io::q_string(&m.total_length()));
                if let Ok(c) = m.canonical_model() {
                    println!("canonical model {} vertices, {} edges", c.model.vertex_count(), c.model.edge_count());
                }
            }
            Ok(())
        }
        Command::Rank { graph, divisor } => {
            let (m, _, d) = metric_and_divisor(&graph, &divisor)?;
            println!("{}", rank(&m, &d)?);
            Ok(())
        }
        Command::Reduce {
            graph,
            divisor,
            base,
            output,
        } => {
            let (m, ids, d) = metric_and_divisor(&graph, &divisor)?;
            let b = io::parse_point(&base, &m, &ids)?;
            let r = reduce(&m, &d, &b)?;
            write_or_print(output.as_deref(), &io::to_text(&io::divisor_document(&r)))
        }
        Command::Equiv { graph, first, second } => {
            let (m, ids, d1) = metric_and_divisor(&graph, &first)?;
            let d2 = io::read_divisor(&read(&second)?, &m, &ids)?;
            let eq = linearly_equivalent(&m, &d1, &d2)?;
            println!("{eq}");
            if eq {
                Ok(())
            } else {
                Err(Failure(1, "divisors are not linearly equivalent".into()))
            }
        }
        Command::CheckMorphism { morphism } => {
            let f = io::read_morphism(&read(&morphism)?)?;
            let r = check_morphism(&f)?;
            let report = json!({
                "harmonic": r.harmonic,
                "non_degenerate": r.non_degenerate,
                "degree": r.degree,
                "metric_consistent": r.metric_consistent,
                "multiplicity": r.multiplicity,
                "violations": r.violations,
            });
            print!("{}", io::to_text(&io::report_document(report)));
            if r.harmonic {
                Ok(())
            } else {
                Err(Failure(1, "morphism is not harmonic".into()))
            }
        }
        Command::Pullback {
            morphism,
            divisor,
            output,
        } => {
            let f = io::read_morphism(&read(&morphism)?)?;
            let t = f.target_metric()?;
            let d = io::read_divisor(&read(&divisor)?, &t, &IdMap::identity(t.graph()))?;
            let p = pullback(&f, &d)?;
            write_or_print(output.as_deref(), &io::to_text(&io::divisor_document(&p)))
        }
        Command::RemoveContractions { morphism, output } => {
            let f = io::read_morphism(&read(&morphism)?)?;
            let r = remove_contractions(&f)?;
            write_or_print(output.as_deref(), &io::to_text(&io::morphism_document(&r.morphism)))
        }
        Command::TrigonalCover {
            graph,
            divisor,
            output,
            dot,
        } => {
            let (m, _, d) = metric_and_divisor(&graph, &divisor)?;
            let cover = build_trigonal_cover_with_loops(&m, &d)?;
            let rt = verify_equivalence_roundtrip(&cover)?;
            if !rt.passed() {
                return Err(Failure(1, "cover failed the pullback check".into()));
            }
            if let Some(p) = dot {
                write_or_print(Some(&p), &io::morphism_to_dot(&cover.morphism))?;
            }
            match output {
                Some(p) => {
                    write_or_print(Some(&p), &io::to_text(&io::morphism_document(&cover.morphism)))?;
                    println!(
                        "cover of degree 3 onto a tree with {} vertices; source has {} vertices and {} edges",
                        cover.target.vertex_count(),
                        cover.source.vertex_count(),
                        cover.source.edge_count()
                    );
                    Ok(())
                }
                None => write_or_print(None, &io::to_text(&io::morphism_document(&cover.morphism))),
            }
        }
        Command::FindDivisor { graph, strategy, output } => {
            let (m, _) = io::read_metric_graph(&read(&graph)?)?;
            let names: Vec<String> = match strategy {
                Some(s) => s.split(',').map(|x| x.trim().to_string()).collect(),
                None => DEFAULT_ORDER.iter().map(|s| s.to_string()).collect(),
            };
            let order: Vec<&str> = names.iter().map(String::as_str).collect();
            let hit = find_trigonal_divisor_with(&m, &order).map_err(|e| match e {
                Error::Precondition(s) => Failure(2, s),
                e => e.into(),
            })?;
            match hit {
                Some(h) => {
                    eprintln!("found by {}", h.strategy);
                    write_or_print(output.as_deref(), &io::to_text(&io::divisor_document(&h.divisor)))
                }
                None => Err(Failure(1, "no divisor found; this does not prove that none exists".into())),
            }
        }
        Command::Ladders { genus, output } => {
            if genus < 2 {
                return Err(Failure(2, "ladders need trees with at least two vertices".into()));
            }
            let mut docs = Vec::new();
            for (i, t) in enumerate_trees(genus, 3).iter().enumerate() {
                let ls = build_3_ladders(t)?;
                println!("tree {i}: {} ladders", ls.len());
                docs.extend(ls.iter().map(|l| io::trigonal_type_document(&l.ttype)));
            }
            println!("total {}", docs.len());
            if let Some(p) = output {
                let text = serde_json::to_string_pretty(&docs).expect("documents serialize") + "\n";
                write_or_print(Some(&p), &text)?;
            }
            Ok(())
        }
        Command::Moduli { genus, max_genus, jobs } => {
            let range = match (genus, max_genus) {
                (Some(g), None) => g..=g,
                (None, Some(g)) => 3..=g,
                _ => return Err(Failure(2, "give --genus or --max-genus".into())),
            };
            for g in range {
                let cells = maximal_cells_with_jobs(g, jobs).map_err(|e| match e {
                    Error::GenusTooSmall(_) => Failure(2, e.to_string()),
                    e => e.into(),
                })?;
                println!("{}", moduli_line(g, &cells)?);
            }
            Ok(())
        }
        Command::ToDot {
            document,
            divisor,
            output,
        } => {
            let doc = read(&document)?;
            let text = match doc.kind {
                Kind::Graph | Kind::MetricGraph => {
                    let (g, ids) = io::read_graph(&doc)?;
                    let metric = io::read_metric_graph(&doc).ok();
                    let mut opts = DotOptions {
                        lengths: metric.is_some(),
                        divisor: None,
                    };
                    if let Some(p) = divisor {
                        let (m, _) = metric.clone().ok_or_else(|| Failure(2, "chips need edge lengths".into()))?;
                        opts.divisor = Some(io::read_divisor(&read(&p)?, &m, &ids)?);
                    }
                    match metric {
                        Some((m, _)) => io::metric_graph_to_dot(&m, &opts),
                        None => io::graph_to_dot(&g, None, &opts),
                    }
                }
                Kind::Morphism => io::morphism_to_dot(&io::read_morphism(&doc)?),
                Kind::TrigonalType => io::trigonal_type_to_dot(&io::read_trigonal_type(&doc)?),
                k => return Err(Failure(2, format!("cannot draw a {k:?} document"))),
            };
            write_or_print(output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

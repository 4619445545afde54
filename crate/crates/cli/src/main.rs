use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use torquiv::cohomology::{cohomology_oracle, forbidden_sets_json, projected_cone};
use torquiv::{
    bundles_nef_check, do_higher_self_exts_vanish, do_higher_self_exts_vanish_twisted, forbidden_sets, Database,
    DivisorClass, Int, QuiverOfSections, ToricVariety,
};

/// Quivers of sections and exceptional collections on toric varieties.
///
/// Predicates exit with 0 when true and 1 when false; errors exit with 2.
#[derive(Parser, Debug)]
#[command(name = "torquiv", version)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Database file to use instead of the built-in one (overrides TORQUIV_DB_PATH).
    #[arg(long, global = true, value_name = "FILE")]
    db_path: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct VarietyArgs {
    /// Database variety, given by dimension and index.
    #[arg(long, num_args = 2, value_names = ["DIM", "INDEX"], conflicts_with = "fan")]
    db: Option<Vec<usize>>,

    /// Fan file in JSON.
    #[arg(long, value_name = "FILE")]
    fan: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct QuiverArgs {
    #[command(flatten)]
    variety: VarietyArgs,

    /// Collection file: a JSON list of class vectors. Defaults to the stored collection.
    #[arg(long, value_name = "FILE", conflicts_with = "quiver")]
    collection: Option<PathBuf>,

    /// Quiver file in JSON, as written by `quiver --out json`.
    #[arg(long, value_name = "FILE")]
    quiver: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Dot,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe a database variety.
    Fano { dim: usize, index: usize },
    /// Build and print a quiver of sections.
    Quiver {
        #[command(flatten)]
        args: QuiverArgs,
        #[arg(long, value_enum, default_value = "text")]
        out: Format,
        /// Also list relations between paths of at most this length.
        #[arg(long, value_name = "LEN")]
        relations: Option<usize>,
    },
    /// Check that all higher Ext groups between the vertices vanish.
    Check {
        #[command(flatten)]
        args: QuiverArgs,
        /// Also check twists by the anticanonical bundle up to this power.
        #[arg(long, value_name = "P")]
        twist: Option<u32>,
        /// Push the collection along database contractions, e.g. 4,3,2,0.
        #[arg(long, value_delimiter = ',', value_name = "INDICES")]
        chain: Option<Vec<usize>>,
    },
    /// List the forbidden sets of a variety.
    Forbidden {
        #[command(flatten)]
        variety: VarietyArgs,
        /// Also print the projected non-vanishing cones.
        #[arg(long)]
        cones: bool,
    },
    /// Check that every L_i ⊗ L_j^{-1} ⊗ ω^{-n} is nef.
    Nef {
        #[command(flatten)]
        args: QuiverArgs,
        #[arg(long)]
        n: u32,
    },
    /// Cohomology dimensions of a torus-invariant divisor.
    Oracle {
        #[command(flatten)]
        variety: VarietyArgs,
        /// Divisor coefficients, one per ray, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        divisor: Vec<i64>,
    },
    /// Print the database as JSON.
    ExportDb {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    Predicate(bool),
}

struct Session {
    json: bool,
    db: Database,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl Session {
    fn variety(&self, args: &VarietyArgs) -> Result<(Arc<ToricVariety>, Option<(usize, usize)>)> {
        match (&args.db, &args.fan) {
            (Some(key), None) => Ok((self.db.smooth_fano(key[0], key[1])?, Some((key[0], key[1])))),
            (None, Some(path)) => Ok((Arc::new(ToricVariety::from_json(&read(path)?)?), None)),
            _ => bail!("give either --db DIM INDEX or --fan FILE"),
        }
    }

    fn quiver(&self, args: &QuiverArgs) -> Result<(QuiverOfSections, Option<(usize, usize)>)> {
        let (x, key) = self.variety(&args.variety)?;
        if let Some(path) = &args.quiver {
            return Ok((QuiverOfSections::from_json(x, &read(path)?)?, key));
        }
        let classes: Vec<DivisorClass> = match (&args.collection, key) {
            (Some(path), _) => {
                let raw: Vec<Vec<i64>> =
                    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
                raw.iter().map(|v| DivisorClass::from_i64(v)).collect()
            }
            (None, Some((dim, index))) => self.db.full_str_exc_coll(dim, index)?,
            (None, None) => bail!("a fan file needs --collection or --quiver"),
        };
        if classes.is_empty() {
            bail!("the collection is empty");
        }
        let q = QuiverOfSections::new(x, &classes)?;
        if !q.non_line_bundles().is_empty() {
            eprintln!(
                "warning: vertices {:?} are not line bundles; relations may not present the endomorphism algebra",
                q.non_line_bundles()
            );
        }
        Ok((q, key))
    }

    fn predicate(&self, name: &str, value: bool) -> Outcome {
        if self.json {
            println!("{}", json!({ name: value }));
        } else {
            println!("{value}");
        }
        Outcome::Predicate(value)
    }
}

fn set_list(sets: &[Vec<usize>]) -> String {
    let inner: Vec<String> = sets
        .iter()
        .map(|s| format!("{{{}}}", s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("{{{}}}", inner.join(","))
}

fn run(cli: Cli) -> Result<Outcome> {
    let db = match &cli.db_path {
        Some(path) => Database::from_path(path)?,
        None => Database::load()?,
    };
    let ctx = Session { json: cli.json, db };
    match cli.command {
        Command::Fano { dim, index } => {
            let entry = ctx.db.get((dim, index))?;
            let spec = entry.variety.to_spec()?;
            if ctx.json {
                let value = json!({
                    "dim": dim,
                    "index": index,
                    "name": entry.name,
                    "rays": spec.rays,
                    "max_cones": spec.max_cones,
                    "cl_rank": entry.variety.cl_rank(),
                    "deg": spec.deg,
                });
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                println!("{} ({dim}, {index})", entry.name);
                println!("rays: {:?}", spec.rays);
                println!("max cones: {:?}", spec.max_cones);
                println!("class group rank: {}", entry.variety.cl_rank());
                print!("deg:\n{}", entry.variety.deg());
            }
            Ok(Outcome::Done)
        }
        Command::Quiver { args, out, relations } => {
            let (q, _) = ctx.quiver(&args)?;
            let out = if ctx.json { Format::Json } else { out };
            match out {
                Format::Json => println!("{}", q.to_json()?),
                Format::Dot => print!("{}", q.to_dot()),
                Format::Text => {
                    for (i, _) in q.vertices().iter().enumerate() {
                        println!("vertex {i}:");
                        for line in q.vertex_summary(i).lines() {
                            println!("  {line}");
                        }
                    }
                    println!("arrows: {}", q.arrows().len());
                }
            }
            if let Some(len) = relations {
                for r in q.relations(len) {
                    eprintln!("relation {:?} = {:?}", r.lhs, r.rhs);
                }
            }
            Ok(Outcome::Done)
        }
        Command::Check { args, twist, chain } => {
            let (q, key) = ctx.quiver(&args)?;
            let value = match chain {
                Some(chain) => {
                    if key.is_none() {
                        bail!("--chain needs a database variety");
                    }
                    ctx.db.do_higher_self_exts_vanish_chain(&q, &chain, twist)?
                }
                None => match twist {
                    Some(p) => do_higher_self_exts_vanish_twisted(&q, p)?,
                    None => do_higher_self_exts_vanish(&q)?,
                },
            };
            Ok(ctx.predicate("strong_exceptional", value))
        }
        Command::Forbidden { variety, cones } => {
            let (x, _) = ctx.variety(&variety)?;
            if ctx.json {
                let mut value = json!(forbidden_sets_json(&x));
                if cones {
                    let list: Vec<_> = forbidden_sets(&x)
                        .into_iter()
                        .map(|(i, sets)| {
                            let cones = sets
                                .iter()
                                .map(|s| projected_cone(&x, s).to_json_value())
                                .collect::<torquiv::Result<Vec<_>>>()?;
                            Ok(json!({ "i": i, "cones": cones }))
                        })
                        .collect::<torquiv::Result<_>>()?;
                    value = json!({ "forbidden": value, "cones": list });
                }
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                for (i, sets) in forbidden_sets(&x) {
                    let rays: Vec<Vec<usize>> = sets.iter().map(|s| s.rays.clone()).collect();
                    println!("{i} => {}", set_list(&rays));
                    if cones {
                        for s in &sets {
                            let c = projected_cone(&x, s);
                            println!("  {s}: w = {:?}", c.w.iter().map(Int::to_string).collect::<Vec<_>>());
                            for line in c.h.to_string().lines() {
                                println!("    {line}");
                            }
                        }
                    }
                }
            }
            Ok(Outcome::Done)
        }
        Command::Nef { args, n } => {
            let (q, _) = ctx.quiver(&args)?;
            Ok(ctx.predicate("nef", bundles_nef_check(&q, n)?))
        }
        Command::Oracle { variety, divisor } => {
            let (x, _) = ctx.variety(&variety)?;
            let d: Vec<Int> = divisor.iter().map(|&v| Int::from(v)).collect();
            let h = cohomology_oracle(&x, &d)?;
            if ctx.json {
                println!("{}", json!({ "divisor": divisor, "h": h }));
            } else {
                for (i, v) in h.iter().enumerate() {
                    println!("h^{i} = {v}");
                }
            }
            Ok(Outcome::Done)
        }
        Command::ExportDb { out } => {
            let text = ctx.db.to_json()?;
            match out {
                Some(path) => std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Done) | Ok(Outcome::Predicate(true)) => ExitCode::SUCCESS,
        Ok(Outcome::Predicate(false)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

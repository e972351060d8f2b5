use clap::{Args, Parser, Subcommand};
use nmsp_cli::checks::{self, Scale};
use nmsp_core::correlator::{
    assemble, check_polynomiality, report_json, report_text, CorrelatorError, CorrelatorSpec, InsertionSpec, SCHEMA_VERSION,
};
use nmsp_core::enumerate::{enumerate, EnumError, EnumSpec};
use nmsp_core::graphs::{to_dot, DecoratedGraph, GraphError};
use nmsp_core::localization::{contribution, Insertion, LocConfig, LocError};
use nmsp_core::oracles::{load_table, OracleError, Oracles};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nmsp", version, about = "Exact NMSP localization graph sums on the quintic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// input spec (JSON)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// oracle table of key -> rational value (JSON object); repeatable
    #[arg(long = "oracle-table")]
    oracle_tables: Vec<PathBuf>,
    #[arg(long)]
    include_irregular: bool,
    #[arg(long)]
    include_pure_loops: bool,
    #[arg(long)]
    dmax: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Stream the graphs of an enumeration spec as JSON lines
    Enumerate(Common),
    /// Evaluate one graph's contribution
    Contrib(Common),
    /// Assemble a correlator series and check its shape
    Correlator(Common),
    /// Run the invariant suites
    Check {
        #[command(flatten)]
        common: Common,
        /// use the full acceptance grids
        #[arg(long)]
        full: bool,
    },
    /// Render graphs (a graph file or JSON lines) as Graphviz DOT
    Dot(Common),
}

/// Exit status and message.
struct Failure(u8, String);

const SPEC_INVALID: u8 = 2;
const ORACLE_MISSING: u8 = 3;
const VANISHING_FAILED: u8 = 4;
const INTERNAL: u8 = 5;

fn invalid(m: impl std::fmt::Display) -> Failure {
    Failure(SPEC_INVALID, m.to_string())
}

fn oracle_code(e: &OracleError) -> u8 {
    match e {
        OracleError::OutOfRange(_) | OracleError::Missing(_) => ORACLE_MISSING,
        OracleError::BadRow { .. } | OracleError::BadTable(_) => SPEC_INVALID,
    }
}

fn loc_failure(e: &LocError) -> Failure {
    let code = match e {
        LocError::Oracle(o) => oracle_code(o),
        LocError::Graph(_) | LocError::Precondition(_) | LocError::Unsupported(_) => SPEC_INVALID,
        LocError::Algebra(_) => INTERNAL,
    };
    Failure(code, e.to_string())
}

fn enum_failure(e: &EnumError) -> Failure {
    match e {
        EnumError::Unstable(_) | EnumError::BadSpec(_) | EnumError::Bound(_) => invalid(e),
    }
}

fn corr_failure(e: &CorrelatorError) -> Failure {
    match e {
        CorrelatorError::BadSpec(_) => invalid(e),
        CorrelatorError::Enum(x) => enum_failure(x),
        CorrelatorError::Graph { source, .. } => Failure(loc_failure(source).0, e.to_string()),
        CorrelatorError::Specialize { .. } => Failure(INTERNAL, e.to_string()),
    }
}

fn read_json(path: &Option<PathBuf>) -> Result<Value, Failure> {
    let p = path.as_ref().ok_or_else(|| invalid("--spec is required"))?;
    let text = std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {}", p.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {}", p.display(), e)))
}

/// Strip and check the schema_version field.
fn versioned(mut v: Value) -> Result<Value, Failure> {
    let obj = v.as_object_mut().ok_or_else(|| invalid("spec must be a JSON object"))?;
    match obj.remove("schema_version").and_then(|x| x.as_u64()) {
        Some(x) if x == SCHEMA_VERSION as u64 => Ok(v),
        Some(x) => Err(invalid(format!("unsupported schema_version {}", x))),
        None => Err(invalid("missing schema_version")),
    }
}

fn oracles(c: &Common) -> Result<Oracles, Failure> {
    let mut tables = Vec::new();
    for p in &c.oracle_tables {
        tables.push(load_table(p).map_err(|e| Failure(oracle_code(&e), e.to_string()))?);
    }
    Ok(Oracles::with_tables(tables))
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let res = match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure(INTERNAL, e.to_string()))
}

fn pool(c: &Common) -> Result<rayon::ThreadPool, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = c.workers {
        if w == 0 {
            return Err(invalid("--workers must be positive"));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Failure(INTERNAL, e.to_string()))
}

fn run_enumerate(c: &Common) -> Result<(), Failure> {
    let v = versioned(read_json(&c.spec)?)?;
    let mut spec: EnumSpec = serde_json::from_value(v).map_err(invalid)?;
    spec.include_irregular |= c.include_irregular;
    spec.include_pure_loops |= c.include_pure_loops;
    let gs = pool(c)?.install(|| enumerate(&spec)).map_err(|e| enum_failure(&e))?;
    let mut s = String::new();
    for g in gs {
        s.push_str(&g.to_json().to_string());
        s.push('\n');
    }
    write_out(&c.out, &s)
}

fn insertions(v: Option<&Value>, n_legs: usize) -> Result<Vec<Insertion>, Failure> {
    let Some(v) = v else { return Ok(vec![Insertion::one(); n_legs]) };
    let specs: Vec<InsertionSpec> = serde_json::from_value(v.clone()).map_err(invalid)?;
    if specs.len() != n_legs {
        return Err(invalid(format!("{} insertions for {} legs", specs.len(), n_legs)));
    }
    specs.iter().map(|s| s.coeffs().map(Insertion::H).map_err(|e| corr_failure(&e))).collect()
}

fn graph_from(v: &Value) -> Result<DecoratedGraph, GraphError> {
    let mut v = v.clone();
    if let Some(o) = v.as_object_mut() {
        o.remove("canonical");
        o.remove("regularity");
    }
    let g = DecoratedGraph::from_json(&v)?;
    let errs = g.validate();
    if errs.is_empty() {
        Ok(g)
    } else {
        Err(GraphError::Invalid(errs.join("; ")))
    }
}

fn run_contrib(c: &Common) -> Result<(), Failure> {
    let v = versioned(read_json(&c.spec)?)?;
    let gv = v.get("graph").ok_or_else(|| invalid("contrib spec needs a \"graph\""))?;
    let g = graph_from(gv).map_err(invalid)?;
    let ins = insertions(v.get("insertions"), g.legs.len())?;
    let cfg: LocConfig = match v.get("config") {
        Some(x) => serde_json::from_value(x.clone()).map_err(invalid)?,
        None => LocConfig::default(),
    };
    let or = oracles(c)?;
    let cont = contribution(&g, &ins, &or, &cfg).map_err(|e| loc_failure(&e))?;
    let mut out = cont.to_json();
    out["schema_version"] = json!(SCHEMA_VERSION);
    if !or.tables.is_empty() {
        let sub = cont.value.substitute(&|s| or.symbol_value(s));
        out["substituted"] = sub.to_json();
    }
    write_out(&c.out, &format!("{}\n", serde_json::to_string_pretty(&out).map_err(|e| Failure(INTERNAL, e.to_string()))?))
}

fn run_correlator(c: &Common) -> Result<(), Failure> {
    let v = read_json(&c.spec)?;
    let mut spec: CorrelatorSpec = serde_json::from_value(v).map_err(invalid)?;
    if c.dmax.is_some() {
        spec.dmax = c.dmax;
    }
    spec.check().map_err(|e| corr_failure(&e))?;
    let or = oracles(c)?;
    let series = pool(c)?.install(|| assemble(&spec, &or)).map_err(|e| corr_failure(&e))?;
    let verdict = check_polynomiality(&series, &spec);
    let doc = serde_json::to_string_pretty(&report_json(&series, &verdict)).map_err(|e| Failure(INTERNAL, e.to_string()))?;
    match &c.out {
        Some(_) => {
            write_out(&c.out, &format!("{}\n", doc))?;
            print!("{}", report_text(&series, &verdict));
        }
        None => write_out(&None, &format!("{}\n", doc))?,
    }
    if !verdict.forced_vanishing_ok {
        return Err(Failure(VANISHING_FAILED, "forced-vanishing coefficient is nonzero".into()));
    }
    Ok(())
}

fn run_check(c: &Common, full: bool) -> Result<(), Failure> {
    let scale = if full { Scale::Full } else { Scale::Quick };
    let outcomes = pool(c)?.install(|| checks::run_all(scale, |o| println!("{}", o.line())));
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "scale": if full { "full" } else { "quick" },
        "results": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
    });
    if c.out.is_some() {
        write_out(&c.out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap_or_default()))?;
    }
    let vanishing = outcomes.iter().any(|o| matches!(o.id, 1 | 2) && !o.pass());
    if vanishing {
        Err(Failure(VANISHING_FAILED, "forced vanishing check failed".into()))
    } else {
        Ok(())
    }
}

fn run_dot(c: &Common) -> Result<(), Failure> {
    let p: &Path = c.spec.as_deref().ok_or_else(|| invalid("--spec is required"))?;
    let text = std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {}", p.display(), e)))?;
    // a single document, or one graph per line
    let docs: Vec<Value> = match serde_json::from_str::<Value>(&text) {
        Ok(v) => vec![v],
        Err(_) => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(invalid))
            .collect::<Result<_, _>>()?,
    };
    let mut s = String::new();
    for d in &docs {
        s.push_str(&to_dot(&graph_from(d).map_err(invalid)?));
    }
    write_out(&c.out, &s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Enumerate(c) => run_enumerate(c),
        Command::Contrib(c) => run_contrib(c),
        Command::Correlator(c) => run_correlator(c),
        Command::Check { common, full } => run_check(common, *full),
        Command::Dot(c) => run_dot(c),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("nmsp: {}", msg);
            ExitCode::from(code)
        }
    }
}

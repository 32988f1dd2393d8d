//! The `vcoop` command line. [`run`] does all the work and returns the exit
//! code with both output streams, so tests can drive it directly.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cooperad::{
    filtration_basis, filtration_level, in_connective, insert_at, insert_component, kernel_routes,
    kernel_table, verify_axioms, KernelKind, SortSignature, VerifyConfig,
};
use crate::fock::{realization_dims, series_dims, SeriesKind};
use crate::localfn::{canonicalize_str, LocalFn};
use crate::rational::fmt_rational;
use crate::va::{
    bracket, check_uniform_bound, graded_dims, lattice_check, load_presentation, npoint_vacuum,
    ope_singular, parse_element, radical_slice, Presentation, VAElement,
};

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "vcoop", about = "Local functions, the correlation co-operad and presented vertex algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct PresetArgs {
    /// heisenberg, virasoro or lattice_rank1
    #[arg(long)]
    preset: Option<String>,
    /// Central charge for virasoro
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Lattice norm for lattice_rank1
    #[arg(long)]
    norm: Option<i64>,
    /// Rank for heisenberg (identity form)
    #[arg(long = "rank", default_value_t = 1)]
    rank: usize,
    /// Presentation document (JSON)
    #[arg(long)]
    file: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical form of a local function
    Canon {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        json: bool,
        expr: String,
    },
    /// One component of an insertion
    Insert {
        #[arg(long)]
        arity: usize,
        /// Number of variables kept outside (inserts the last arity-m)
        #[arg(long)]
        m: Option<usize>,
        /// Inserted variables, one-based and comma separated, instead of --m
        #[arg(long)]
        subset: Option<String>,
        /// Outer grading of the component
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        #[arg(long)]
        json: bool,
        expr: String,
    },
    /// Expansion kernel tables, checked along both expansion orders
    Kernels {
        /// Largest index m (and n)
        #[arg(long, default_value_t = 8)]
        m: u32,
        #[arg(long)]
        json: bool,
    },
    /// Filtration level of a function, or the filtration basis when no
    /// expression is given
    Filtration {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        subset: String,
        /// Level N for the basis listing
        #[arg(long)]
        p: Option<u32>,
        /// Grading for the basis listing
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<i64>,
        /// Pole budget for the basis listing
        #[arg(long, default_value_t = 4)]
        cutoff: u32,
        #[arg(long)]
        json: bool,
        expr: Option<String>,
    },
    /// Membership in the k-connective subspace
    Connective {
        #[arg(long)]
        arity: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// Sorts as "n;n1,n2,..."
        #[arg(long, allow_hyphen_values = true)]
        sorts: String,
        #[arg(long)]
        json: bool,
        expr: String,
    },
    /// Random check of the co-operad axioms
    VerifyCooperad {
        /// Largest arity
        #[arg(long, default_value_t = 4)]
        arity: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        order: i64,
        #[arg(long)]
        json: bool,
    },
    /// Graded dimensions of the spanning set
    Dims {
        #[command(flatten)]
        pres: PresetArgs,
        #[arg(long = "max-weight")]
        max_weight: i64,
    },
    /// Singular part of the OPE of two generators
    Ope {
        #[command(flatten)]
        pres: PresetArgs,
        a: String,
        b: String,
    },
    /// x(n) y in normal form
    Bracket {
        #[command(flatten)]
        pres: PresetArgs,
        x: String,
        y: String,
        #[arg(allow_hyphen_values = true)]
        n: i64,
    },
    /// Radical slice at one weight
    Radical {
        #[command(flatten)]
        pres: PresetArgs,
        #[arg(long)]
        weight: i64,
    },
    /// Vacuum correlator of generators as a local function
    Npoint {
        #[command(flatten)]
        pres: PresetArgs,
        /// Pole bound (default: twice the total weight)
        #[arg(long)]
        cutoff: Option<u32>,
        gens: Vec<String>,
    },
    /// Lattice relations checked in the Fock realization
    LatticeCheck {
        #[command(flatten)]
        pres: PresetArgs,
        #[arg(long, default_value_t = 4)]
        cutoff: i64,
    },
    /// Series oracles: partitions, min2, theta, or the lattice realization
    OracleDims {
        kind: String,
        #[arg(long, default_value_t = 2)]
        norm: i64,
        #[arg(long = "max-weight")]
        max_weight: usize,
        #[arg(long)]
        json: bool,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Res = Result<String, Failure>;

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            Outcome { code: 0, stdout: out, stderr: String::new() }
        }
        Err(Failure(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn parse_subset(s: &str, arity: usize) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part
            .parse()
            .map_err(|_| Failure(format!("bad subset entry `{part}`")))?;
        if i == 0 || i > arity {
            return Err(Failure(format!("subset entry {i} outside 1..{arity}")));
        }
        out.push(i - 1);
    }
    Ok(out)
}

fn parse_sorts(s: &str) -> Result<SortSignature, Failure> {
    let (out, ins) = s
        .split_once(';')
        .ok_or_else(|| Failure("sorts must look like \"n;n1,n2\"".into()))?;
    let num = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Failure(format!("bad sort `{t}`")))
    };
    let in_sorts = ins
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(num)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SortSignature::new(num(out)?, in_sorts))
}

fn presentation(a: &PresetArgs) -> Result<Presentation, Failure> {
    let doc: Value = if let Some(path) = &a.file {
        let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))?;
        serde_json::from_str(&text)?
    } else {
        match a.preset.as_deref() {
            Some("virasoro") => json!({"preset": "virasoro", "c": a.c.clone().unwrap_or("1".into())}),
            Some("heisenberg") => json!({"preset": "heisenberg", "rank": a.rank}),
            Some("lattice_rank1") => json!({"preset": "lattice_rank1", "norm": a.norm.unwrap_or(2)}),
            Some(other) => return Err(Failure(format!("unknown preset `{other}`"))),
            None => return Err(Failure("give --preset or --file".into())),
        }
    };
    Ok(load_presentation(&doc)?)
}

#[derive(Serialize)]
struct ElementTermDoc {
    word: Vec<(String, i64)>,
    coeff: String,
}

fn element_doc(p: &Presentation, x: &VAElement) -> Vec<ElementTermDoc> {
    x.terms()
        .map(|(w, c)| ElementTermDoc {
            word: w
                .modes
                .iter()
                .map(|&(g, n)| (p.generators[g].name.clone(), n))
                .collect(),
            coeff: fmt_rational(c),
        })
        .collect()
}

fn generator(p: &Presentation, name: &str) -> Result<usize, Failure> {
    p.generator_index(name)
        .ok_or_else(|| Failure(format!("unknown generator `{name}`")))
}

fn dispatch(cmd: Command) -> Res {
    match cmd {
        Command::Canon { arity, json, expr } => {
            let f = canonicalize_str(&expr, arity)?;
            Ok(if json { pretty(&f.to_doc()) } else { f.to_string() })
        }
        Command::Insert { arity, m, subset, p, json, expr } => {
            let f = canonicalize_str(&expr, arity)?;
            let t = match (m, subset) {
                (_, Some(s)) => insert_at(&f, &parse_subset(&s, arity)?, p)?,
                (Some(m), None) => insert_component(&f, m, p)?,
                (None, None) => return Err(Failure("give --m or --subset".into())),
            };
            Ok(if json { pretty(&t.to_doc()) } else { t.to_string() })
        }
        Command::Kernels { m, json } => kernels(m, json),
        Command::Filtration { arity, subset, p, weight, cutoff, json, expr } => {
            let s = parse_subset(&subset, arity)?;
            match expr {
                Some(e) => {
                    let f = canonicalize_str(&e, arity)?;
                    let level = filtration_level(&f, &s)?;
                    Ok(if json { pretty(&json!({ "level": level })) } else { level.to_string() })
                }
                None => {
                    let (Some(n), Some(g)) = (p, weight) else {
                        return Err(Failure("basis listing needs --p (level) and --weight (grading)".into()));
                    };
                    let basis = filtration_basis(arity, &s, n, g, cutoff)?;
                    if json {
                        let docs: Vec<_> = basis
                            .iter()
                            .map(|m| LocalFn::monomial(m.clone()).to_doc())
                            .collect();
                        Ok(pretty(&docs))
                    } else {
                        Ok(basis.iter().map(|m| format!("{m}\n")).collect())
                    }
                }
            }
        }
        Command::Connective { arity, k, sorts, json, expr } => {
            let f = canonicalize_str(&expr, arity)?;
            let sig = parse_sorts(&sorts)?;
            let ok = in_connective(&f, k, &sig);
            Ok(if json { pretty(&json!({ "member": ok })) } else { ok.to_string() })
        }
        Command::VerifyCooperad { arity, samples, order, json } => {
            let config = VerifyConfig { max_arity: arity, samples, order, ..VerifyConfig::default() };
            let report = verify_axioms(&config)?;
            if report.failures > 0 {
                let mut msg = format!("{} failing components", report.failures);
                if let Some(c) = report.checks.iter().find(|c| c.status != "pass") {
                    let _ = write!(msg, "; first: {} on {} at {:?}", c.kind, c.input, c.component);
                }
                return Err(Failure(msg));
            }
            Ok(if json {
                pretty(&report)
            } else {
                format!(
                    "{} nonzero components checked, {} zero components, 0 failures",
                    report.checks.len(),
                    report.zero_components
                )
            })
        }
        Command::Dims { pres, max_weight } => {
            let p = presentation(&pres)?;
            let dims = graded_dims(&p, max_weight);
            Ok(if pres.json {
                pretty(&dims)
            } else {
                dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
            })
        }
        Command::Ope { pres, a, b } => {
            let p = presentation(&pres)?;
            let (ga, gb) = (generator(&p, &a)?, generator(&p, &b)?);
            let terms = ope_singular(&p, ga, gb);
            if pres.json {
                let docs: Vec<_> = terms
                    .iter()
                    .map(|(n, x)| json!({ "n": n, "result": element_doc(&p, x) }))
                    .collect();
                return Ok(pretty(&json!({
                    "terms": docs,
                    "bound": check_uniform_bound(&p, ga, gb)
                })));
            }
            let mut out = String::new();
            for (n, x) in &terms {
                let _ = writeln!(out, "[{a},{b}]_{n} = {}", x.show(&p));
            }
            let _ = write!(out, "bound {}", check_uniform_bound(&p, ga, gb));
            Ok(out)
        }
        Command::Bracket { pres, x, y, n } => {
            let p = presentation(&pres)?;
            let (ex, ey) = (parse_element(&p, &x)?, parse_element(&p, &y)?);
            let r = bracket(&p, &ex, &ey, n)?;
            Ok(if pres.json { pretty(&element_doc(&p, &r)) } else { r.show(&p) })
        }
        Command::Radical { pres, weight } => {
            let p = presentation(&pres)?;
            let r = radical_slice(&p, weight)?;
            if pres.json {
                let basis: Vec<String> = r.basis.iter().map(|w| w.show(&p)).collect();
                let kernel: Vec<_> = r.kernel.iter().map(|x| element_doc(&p, x)).collect();
                return Ok(pretty(&json!({
                    "weight": r.weight,
                    "dimension": r.dimension,
                    "basis": basis,
                    "kernel": kernel
                })));
            }
            let mut out = format!("weight {} dimension {}", r.weight, r.dimension);
            for x in &r.kernel {
                let _ = write!(out, "\n{}", x.show(&p));
            }
            Ok(out)
        }
        Command::Npoint { pres, cutoff, gens } => {
            let p = presentation(&pres)?;
            let idx = gens
                .iter()
                .map(|g| generator(&p, g))
                .collect::<Result<Vec<_>, _>>()?;
            let weights: Vec<i64> = idx.iter().map(|&g| p.weight(g)).collect();
            let bound = cutoff.unwrap_or(2 * weights.iter().sum::<i64>() as u32);
            let f = npoint_vacuum(&p, &idx, bound)?;
            let member = in_connective(&f, 0, &SortSignature::new(0, weights));
            Ok(if pres.json {
                pretty(&json!({ "function": f.to_doc(), "connective": member }))
            } else {
                format!("{f}\nconnective(k=0): {member}")
            })
        }
        Command::LatticeCheck { pres, cutoff } => {
            let p = presentation(&pres)?;
            let report = lattice_check(&p, cutoff)?;
            if pres.json {
                return Ok(pretty(&json!({ "passed": report.passed(), "report": report })));
            }
            let mut out = String::new();
            for c in &report.checks {
                let tag = match (c.relation.as_str(), c.passed) {
                    ("literal", true) => "holds",
                    ("literal", false) => "fails (informational)",
                    (_, true) => "pass",
                    (_, false) => "FAIL",
                };
                let _ = writeln!(
                    out,
                    "{:<13} ({})({})({}) = {}  [{tag}]",
                    c.relation,
                    lattice_name(c.lambda),
                    c.mode,
                    lattice_name(c.mu),
                    c.realization
                );
            }
            let dims: Vec<String> = report.dims.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "realization dims: {}", dims.join(" "));
            if !report.passed() {
                return Err(Failure(format!("lattice relations failed\n{out}")));
            }
            let _ = write!(out, "all required relations pass");
            Ok(out)
        }
        Command::OracleDims { kind, norm, max_weight, json } => {
            let dims: Vec<u64> = match kind.as_str() {
                "partitions" => series_dims(SeriesKind::Partitions, max_weight),
                "min2" => series_dims(SeriesKind::PartitionsMinPart2, max_weight),
                "theta" => series_dims(SeriesKind::ThetaOverEta(norm), max_weight),
                "realization" => realization_dims(norm, max_weight as i64)?
                    .into_iter()
                    .map(|d| d as u64)
                    .collect(),
                other => return Err(Failure(format!("unknown series `{other}`"))),
            };
            Ok(if json {
                pretty(&dims)
            } else {
                dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
            })
        }
    }
}

fn lattice_name(s: i64) -> &'static str {
    if s > 0 {
        "lambda"
    } else {
        "-lambda"
    }
}

fn kernels(max: u32, json: bool) -> Res {
    let mut mismatches = Vec::new();
    for kind in [KernelKind::Symmetric, KernelKind::Associative] {
        for m in 0..=max {
            for n in 0..=max {
                let (a, b) = kernel_routes(kind, m, n);
                if a != b {
                    mismatches.push(format!("{kind:?} ({m},{n}): {} vs {}", fmt_rational(&a), fmt_rational(&b)));
                }
            }
        }
    }
    if !mismatches.is_empty() {
        return Err(Failure(mismatches.join("\n")));
    }
    let tables: Vec<_> = [KernelKind::Symmetric, KernelKind::Associative]
        .into_iter()
        .map(|k| kernel_table(k, max, max))
        .collect();
    if json {
        let docs: Vec<_> = tables
            .iter()
            .map(|t| {
                let rows: Vec<Vec<String>> = (0..=max)
                    .map(|m| (0..=max).map(|n| fmt_rational(&t.coefficients[&(m, n)])).collect())
                    .collect();
                json!({ "kind": t.kind, "rows": rows })
            })
            .collect();
        return Ok(pretty(&docs));
    }
    let mut out = String::new();
    for t in &tables {
        let _ = writeln!(out, "{:?} (rows m, columns n)", t.kind);
        for m in 0..=max {
            let row: Vec<String> = (0..=max)
                .map(|n| fmt_rational(&t.coefficients[&(m, n)]))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    let _ = write!(out, "both expansion orders agree for m, n <= {max}");
    Ok(out)
}

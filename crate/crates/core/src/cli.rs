//! Command-line surface. Every command writes JSON (or JSON lines) to the
//! given writer and returns a process exit code:
//! 0 property holds, 1 property fails, 2 input or resource error,
//! 3 the characterizations disagree (a bug in this crate, never the input).

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify;
use crate::clkernel::{self, Characterization, Family, Witness};
use crate::error::Error;
use crate::setcore::{count_partitions, enumerate_partitions, KSubset};
use crate::spectral;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "clsets", version, about = "Exact toolkit for Cameron-Liebler classes of k-sets")]
pub struct Cli {
    /// Worker threads for enumeration; output is identical at any count.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every characterization on a family file ("-" reads stdin).
    Check { file: PathBuf },
    /// Count or list the k-uniform partitions of an n-set.
    Partitions {
        n: usize,
        k: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Verify the predicted Kneser spectrum exactly.
    Spectrum {
        n: usize,
        k: usize,
        #[arg(long, default_value_t = spectral::DEFAULT_MAX_SIZE)]
        max_size: u64,
    },
    /// Enumerate all classes by brute force.
    Classify {
        n: usize,
        k: usize,
        #[arg(long)]
        up_to_iso: bool,
    },
    /// Print a standard family as a family document.
    Generate {
        kind: Kind,
        n: usize,
        k: usize,
        #[arg(short = 'p')]
        p: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Pencil,
    Anti,
    Empty,
    Full,
}

/// `{"n": 6, "k": 2, "sets": [[0,1],[0,2]]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub n: usize,
    pub k: usize,
    pub sets: Vec<Vec<usize>>,
}

impl FamilyDocument {
    pub fn from_family(f: &Family) -> Self {
        Self {
            n: f.n(),
            k: f.k(),
            sets: f.members().iter().map(|s| s.elements().collect()).collect(),
        }
    }

    pub fn to_family(&self) -> Result<Family, CliError> {
        let schema = |msg: String| CliError::new("schema", msg);
        let mut subsets = Vec::with_capacity(self.sets.len());
        for (i, set) in self.sets.iter().enumerate() {
            if set.len() != self.k {
                return Err(schema(format!("set {i} has {} elements, expected k = {}", set.len(), self.k)));
            }
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(schema(format!("set {i} is not strictly increasing")));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= self.n) {
                return Err(schema(format!("set {i} has element {e} outside 0..{}", self.n)));
            }
            subsets.push(KSubset::from_elements(self.n, set)?);
        }
        let f = Family::from_subsets(self.n, self.k, &subsets)?;
        if f.size() != subsets.len() {
            return Err(schema("duplicate sets".into()));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    fn new(kind: &str, message: String) -> Self {
        Self { kind: kind.into(), message }
    }

    fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "message": self.message } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::new("io", e.to_string())
    }
}

fn write_json(out: &mut dyn Write, v: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

/// Runs a parsed command inside a pool of `cli.threads` workers.
pub fn execute(cli: Cli, out: &mut (dyn Write + Send)) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            let err = CliError::new("threads", e.to_string());
            let _ = write_json(out, &err.to_json());
            return EXIT_INPUT;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Check { file } => cmd_check(&file, out),
        Command::Partitions { n, k, count_only } => cmd_partitions(n, k, count_only, out),
        Command::Spectrum { n, k, max_size } => cmd_spectrum(n, k, max_size, out),
        Command::Classify { n, k, up_to_iso } => cmd_classify(n, k, up_to_iso, out),
        Command::Generate { kind, n, k, p } => cmd_generate(kind, n, k, p, out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = write_json(out, &e.to_json());
            EXIT_INPUT
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

pub fn parse_document(text: &str) -> Result<FamilyDocument, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::new("json", e.to_string()))
}

fn witness_json(w: &Witness) -> Value {
    let elems = |s: &KSubset| s.elements().collect::<Vec<_>>();
    match w {
        Witness::Partition(p) => json!({
            "kind": "partition",
            "blocks": p.blocks().iter().map(elems).collect::<Vec<_>>(),
        }),
        Witness::Subset(s) => json!({ "kind": "subset", "elements": elems(s) }),
        Witness::KernelVector(v) => json!({
            "kind": "kernel_vector",
            "entries": v.entries().iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
    }
}

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    k: usize,
    size: usize,
    parameter: BTreeMap<&'static str, String>,
    verdicts: BTreeMap<Characterization, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
    consistent: bool,
    equivalence_asserted: bool,
    notes: Vec<String>,
}

pub fn cmd_check(path: &PathBuf, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let doc = parse_document(&read_input(path)?)?;
    let family = doc.to_family()?;
    let report = clkernel::full_check(&family)?;
    let body = CheckReport {
        n: report.n,
        k: report.k,
        size: report.size,
        parameter: BTreeMap::from([
            ("num", report.parameter.numerator().to_string()),
            ("den", report.parameter.denominator().to_string()),
        ]),
        verdicts: report.verdicts.clone(),
        witness: report.witness.as_ref().map(witness_json),
        consistent: report.consistent,
        equivalence_asserted: report.equivalence_asserted,
        notes: report.notes.clone(),
    };
    write_json(out, &body)?;
    Ok(if report.all_true() {
        EXIT_OK
    } else if report.all_false() {
        EXIT_FAIL
    } else if report.equivalence_asserted {
        EXIT_INCONSISTENT
    } else if report.is_cl() {
        // Disagreement the mathematics allows: the definition decides.
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

pub fn cmd_partitions(n: usize, k: usize, count_only: bool, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let expected = count_partitions(n, k)?;
    let stream = enumerate_partitions(n, k)?;
    if count_only {
        writeln!(out, "{expected}")?;
        return Ok(EXIT_OK);
    }
    let mut streamed = 0u64;
    for p in stream {
        let blocks: Vec<Vec<usize>> = p.blocks().iter().map(|b| b.elements().collect()).collect();
        write_json(out, &blocks)?;
        streamed += 1;
    }
    Ok(if expected == streamed.into() { EXIT_OK } else { EXIT_INCONSISTENT })
}

pub fn cmd_spectrum(n: usize, k: usize, max_size: u64, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let r = spectral::verify_spectrum_bounded(n, k, max_size)?;
    let body = json!({
        "n": r.n,
        "k": r.k,
        "predicted": r.predicted.pairs.iter().map(|&(l, m)| json!([l, m])).collect::<Vec<_>>(),
        "verified": {
            "symmetric": r.symmetric,
            "regular": r.regular,
            "multiplicities_sum": r.multiplicities_sum,
            "annihilation": r.annihilation,
            "ranks": r.ranks,
            "traces": r.traces,
        },
        "passed": r.passed,
    });
    write_json(out, &body)?;
    Ok(if r.passed { EXIT_OK } else { EXIT_FAIL })
}

fn keyed(m: &BTreeMap<u64, usize>) -> BTreeMap<String, usize> {
    m.iter().map(|(x, c)| (x.to_string(), *c)).collect()
}

pub fn cmd_classify(n: usize, k: usize, up_to_iso: bool, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let c = classify::census(n, k, up_to_iso)?;
    let mut body = serde_json::Map::new();
    body.insert("n".into(), json!(n));
    body.insert("k".into(), json!(k));
    body.insert("counts_by_parameter".into(), json!(keyed(&c.counts_by_parameter)));
    body.insert("total".into(), json!(c.families.len()));
    if let Some(m) = c.matches_theorem {
        body.insert("matches_theorem".into(), json!(m));
    }
    if let Some(o) = &c.orbits {
        body.insert("orbits".into(), json!(keyed(o)));
    }
    write_json(out, &Value::Object(body))?;
    Ok(if c.matches_theorem == Some(false) { EXIT_FAIL } else { EXIT_OK })
}

pub fn cmd_generate(kind: Kind, n: usize, k: usize, p: Option<usize>, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let need_p = || p.ok_or_else(|| CliError::new("usage", format!("{kind:?} needs -p <element>")));
    let family = match kind {
        Kind::Pencil => clkernel::point_pencil(n, k, need_p()?)?,
        Kind::Anti => clkernel::anti_pencil(n, k, need_p()?)?,
        Kind::Empty => Family::empty(n, k)?,
        Kind::Full => Family::full(n, k)?,
    };
    write_json(out, &FamilyDocument::from_family(&family))?;
    Ok(EXIT_OK)
}

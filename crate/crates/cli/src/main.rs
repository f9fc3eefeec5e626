//! `qcombinat`: batch front end for Q-data, Kostant partitions and the
//! inverse quantum Cartan matrix. Vertices and nodes are 1-based on the
//! command line and in every output format.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcombinat::kostant;
use qcombinat::lweight::{self, OmegaQ};
use qcombinat::qcartan::{self, QuantumCartan};
use qcombinat::qdatum::{DiagramAutomorphism, QDatum, QDatumSpec, Violation};
use qcombinat::rootsys::twisted::TwistedType;
use qcombinat::rootsys::{CartanData, Root};
use qcombinat::verify::{self, Status, SuiteResult, VerifyConfig};
use qcombinat::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qcombinat", version, about = "Exact combinatorics of Q-data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the height-function axioms (exit 0 valid, 1 invalid, 2 malformed).
    Validate(Common),
    /// The adapted word and the table β_k ↦ (ι_k, p_k).
    Table(Common),
    /// Coefficients ã_ij(u) of the inverse quantum Cartan matrix.
    InverseCartan(Common),
    /// Kostant partitions of β with ρ, Ω_Q and the Hasse diagram of ⪯.
    Kp(Common),
    /// Compare (KP(β), ⪯) with (𝒫⁺_{Q,β}, ≤).
    PosetCheck(Common),
    /// Run every verification suite on the datum (exit 0 iff all pass).
    VerifyAll(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Type label such as A3 or D4; verify-all also accepts twisted labels such as A5^(2).
    #[arg(long = "type")]
    type_label: Option<String>,
    /// σ in 1-based cycle notation, e.g. "(1 3)(2 4)".
    #[arg(long)]
    sigma: Option<String>,
    /// Heights ξ, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// A positive root-lattice vector in simple-root coordinates, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Window U for ã_ij(u).
    #[arg(long)]
    cutoff: Option<i64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumeration budget (adapted words, Kostant partitions).
    #[arg(long, env = "QCOMBINAT_BUDGET", default_value_t = 100_000)]
    budget: usize,
    /// JSON datum file: {"type": "A3", "sigma": [[1, 3]], "xi": [1, 0, -1]}.
    #[arg(long)]
    datum: Option<String>,
}

/// Failure of a command: malformed input exits 2, anything else 1.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::IndexOutOfRange { .. } | Error::UnsupportedType(_) | Error::NotAutomorphism(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(c) => validate(c),
        Command::Table(c) => table(c),
        Command::InverseCartan(c) => inverse_cartan(c),
        Command::Kp(c) => kp(c),
        Command::PosetCheck(c) => poset_check(c),
        Command::VerifyAll(c) => verify_all(c),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_list(name: &str, s: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| malformed(format!("bad {name} entry {t:?}"))))
        .collect()
}

/// The datum from `--datum` or from `--type/--sigma/--xi`, axioms unchecked.
fn datum(c: &Common) -> Result<QDatum, Failure> {
    if let Some(path) = &c.datum {
        let text = fs::read_to_string(path).map_err(|e| malformed(format!("{path}: {e}")))?;
        let spec: QDatumSpec = serde_json::from_str(&text).map_err(|e| malformed(format!("{path}: {e}")))?;
        return Ok(QDatum::from_spec_unchecked(&spec)?);
    }
    let label = c.type_label.as_deref().ok_or_else(|| malformed("--type or --datum is required"))?;
    let xi = c.xi.as_deref().ok_or_else(|| malformed("--xi is required"))?;
    let cartan = CartanData::from_label(label)?;
    let sigma = match &c.sigma {
        Some(s) => DiagramAutomorphism::parse_cycles(s, cartan.rank())?,
        None => DiagramAutomorphism::identity(cartan.rank()),
    };
    Ok(QDatum::new(cartan, sigma, parse_list("xi", xi)?)?)
}

fn valid_datum(c: &Common) -> Result<QDatum, Failure> {
    let q = datum(c)?;
    q.ensure_valid()?;
    Ok(q)
}

fn beta(c: &Common, rank: usize) -> Result<Root, Failure> {
    let b = parse_list("beta", c.beta.as_deref().ok_or_else(|| malformed("--beta is required"))?)?;
    if b.len() != rank {
        return Err(malformed(format!("β has {} coordinates, rank is {rank}", b.len())));
    }
    Ok(Root(b))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn validate(c: &Common) -> Outcome {
    let q = datum(c)?;
    let violations = q.validate();
    let code = u8::from(!violations.is_empty());
    #[derive(Serialize)]
    struct Report<'a> {
        valid: bool,
        violations: &'a [Violation],
    }
    let out = match c.format {
        Format::Json => json(&Report {
            valid: violations.is_empty(),
            violations: &violations,
        }),
        Format::Csv => {
            let mut s = String::from("axiom,vertices,detail\n");
            for v in &violations {
                writeln!(s, "{:?},{},\"{}\"", v.axiom, join(&v.vertices, " "), v.detail.replace('"', "'")).unwrap();
            }
            s
        }
        Format::Text if violations.is_empty() => "valid\n".into(),
        Format::Text => {
            let mut s = String::from("invalid\n");
            for v in &violations {
                writeln!(s, "  {v}").unwrap();
            }
            s
        }
    };
    Ok((out, code))
}

fn table(c: &Common) -> Outcome {
    let q = valid_datum(c)?;
    let o = q.adapted_word()?;
    let word = one_based(o.word());
    #[derive(Serialize)]
    struct Row {
        k: usize,
        root: Root,
        vertex: usize,
        p: i64,
    }
    let rows: Vec<Row> = o
        .omega_tilde()
        .into_iter()
        .enumerate()
        .map(|(k, e)| Row {
            k: k + 1,
            root: e.root,
            vertex: e.vertex + 1,
            p: e.p,
        })
        .collect();
    let out = match c.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Table {
                word: Vec<usize>,
                rows: Vec<Row>,
            }
            json(&Table { word, rows })
        }
        Format::Csv => {
            let mut s = String::from("k,root,vertex,p\n");
            for r in &rows {
                writeln!(s, "{},{},{},{}", r.k, join(&r.root.0, " "), r.vertex, r.p).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = format!("word: {}\n", join(&word, " "));
            for r in &rows {
                writeln!(s, "β_{:<3} {:<20} ({}, {})", r.k, r.root.to_string(), r.vertex, r.p).unwrap();
            }
            s
        }
    };
    Ok((out, 0))
}

fn inverse_cartan(c: &Common) -> Outcome {
    // With heights given, the series is that of 𝔤₀ and the window defaults
    // to what the datum's identities need.
    let (g0, default) = if c.xi.is_some() || c.datum.is_some() {
        let q = valid_datum(c)?;
        let u = qcartan::default_cutoff(&q);
        (q.g0, u)
    } else {
        let label = c.type_label.as_deref().ok_or_else(|| malformed("--type or --datum is required"))?;
        (CartanData::from_label(label)?, 20)
    };
    let cutoff = c.cutoff.unwrap_or(default);
    if cutoff < 1 {
        return Err(malformed("--cutoff must be positive"));
    }
    let series = QuantumCartan::build(&g0).invert(cutoff)?;
    #[derive(Serialize)]
    struct Entry {
        i: usize,
        j: usize,
        u: i64,
        coeff: i64,
    }
    let entries: Vec<Entry> = series
        .rows()
        .into_iter()
        .filter(|&(_, _, u, _)| u >= 1)
        .map(|(i, j, u, coeff)| Entry {
            i: i + 1,
            j: j + 1,
            u,
            coeff,
        })
        .collect();
    let out = match c.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Series<'a> {
                r#type: String,
                cutoff: i64,
                entries: &'a [Entry],
            }
            json(&Series {
                r#type: g0.label.to_string(),
                cutoff,
                entries: &entries,
            })
        }
        Format::Csv => {
            let mut s = String::from("i,j,u,coeff\n");
            for e in &entries {
                writeln!(s, "{},{},{},{}", e.i, e.j, e.u, e.coeff).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} inverse quantum Cartan matrix, u = 1..{cutoff}\n", g0.label);
            let n = g0.rank();
            for i in 0..n {
                for j in 0..n {
                    let coeffs: Vec<i64> = (1..=cutoff).map(|u| series.coeff(i, j, u).expect("inside the window")).collect();
                    writeln!(s, "ã_{}{}: {}", i + 1, j + 1, join(&coeffs, " ")).unwrap();
                }
            }
            s
        }
    };
    Ok((out, 0))
}

fn kp(c: &Common) -> Outcome {
    let q = valid_datum(c)?;
    let o = q.adapted_word()?;
    let b = beta(c, q.rank())?;
    let kps = kostant::enumerate(&o.order, &b, Some(c.budget))?;
    let t = kostant::rho_matrix(&o.order);
    let rhos: Vec<Vec<i64>> = kps.iter().map(|m| kostant::rho_with(&t, &m.mults)).collect();
    let omega = OmegaQ::new(&o)?;
    let edges: Vec<(usize, usize)> = kostant::hasse_edges(&rhos)
        .into_iter()
        .map(|(a, b)| (a + 1, b + 1))
        .collect();
    #[derive(Serialize)]
    struct Partition {
        index: usize,
        mults: Vec<i64>,
        rho: Vec<i64>,
        omega: lweight::LWeight,
    }
    let parts: Vec<Partition> = kps
        .iter()
        .zip(&rhos)
        .enumerate()
        .map(|(k, (m, r))| Partition {
            index: k + 1,
            mults: m.mults.clone(),
            rho: r.clone(),
            omega: omega.apply(&m.mults),
        })
        .collect();
    let out = match c.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Poset<'a> {
                beta: &'a Root,
                word: Vec<usize>,
                partitions: &'a [Partition],
                hasse: &'a [(usize, usize)],
            }
            json(&Poset {
                beta: &b,
                word: one_based(o.word()),
                partitions: &parts,
                hasse: &edges,
            })
        }
        Format::Csv => {
            let mut s = String::from("index,mults,rho\n");
            for p in &parts {
                writeln!(s, "{},{},{}", p.index, join(&p.mults, " "), join(&p.rho, " ")).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = format!("KP({b}): {} partitions over word {}\n", parts.len(), join(&one_based(o.word()), " "));
            for p in &parts {
                writeln!(s, "{:>3}  m = ({})  ρ = ({})  Ω = {}", p.index, join(&p.mults, ","), join(&p.rho, ","), p.omega).unwrap();
            }
            writeln!(s, "Hasse edges (a ≺ b):").unwrap();
            for (a, b) in &edges {
                writeln!(s, "  {a} -> {b}").unwrap();
            }
            s
        }
    };
    Ok((out, 0))
}

fn poset_check(c: &Common) -> Outcome {
    let q = valid_datum(c)?;
    let o = q.adapted_word()?;
    let b = beta(c, q.rank())?;
    let r = lweight::poset_iso_check(&o, &b, Some(c.budget))?;
    let passed = r.passed();
    let out = match c.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                status: Status,
                report: &'a lweight::PosetIsoReport,
            }
            json(&Report {
                status: if passed { Status::Pass } else { Status::Fail },
                report: &r,
            })
        }
        Format::Csv => format!(
            "status,beta,size,strict,discrepancies,injective\n{},{},{},{},{},{}\n",
            if passed { "PASS" } else { "FAIL" },
            join(&b.0, " "),
            r.size,
            r.strict,
            r.discrepancies.len(),
            r.injective
        ),
        Format::Text => {
            let mut s = format!(
                "{} {}: |KP| = {}, {} strict relations, {} discrepancies, injective = {}\n",
                if passed { "PASS" } else { "FAIL" },
                verify::POSET,
                r.size,
                r.strict,
                r.discrepancies.len(),
                r.injective
            );
            for (a, b) in &r.discrepancies {
                writeln!(s, "  partitions {} and {} disagree", a + 1, b + 1).unwrap();
            }
            s
        }
    };
    Ok((out, u8::from(!passed)))
}

fn verify_all(c: &Common) -> Outcome {
    let twisted: Option<TwistedType> = c
        .type_label
        .as_deref()
        .filter(|t| t.contains('('))
        .map(str::parse)
        .transpose()?;
    let q = match &twisted {
        Some(tt) => {
            if c.sigma.is_some() {
                return Err(malformed("twisted labels take a σ = id datum on the simply-laced side"));
            }
            let xi = c.xi.as_deref().ok_or_else(|| malformed("--xi is required"))?;
            QDatum::new(tt.g.clone(), DiagramAutomorphism::identity(tt.g.rank()), parse_list("xi", xi)?)?
        }
        None => datum(c)?,
    };
    let cfg = VerifyConfig {
        budget: c.budget,
        cutoff: c.cutoff,
        seed: c.seed,
        ..VerifyConfig::default()
    };
    let mut results = verify::verify_all(&q, &cfg);
    if let Some(tt) = &twisted {
        if q.is_valid() {
            results.extend(verify::twisted_suites(tt, &q));
        }
    }
    let status = overall(&results);
    let out = match c.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                datum: QDatumSpec,
                #[serde(skip_serializing_if = "Option::is_none")]
                twisted: Option<String>,
                status: Status,
                suites: &'a [SuiteResult],
            }
            json(&Report {
                datum: q.to_spec(),
                twisted: twisted.as_ref().map(ToString::to_string),
                status,
                suites: &results,
            })
        }
        Format::Csv => {
            let mut s = String::from("suite,status,checked,statement\n");
            for r in &results {
                writeln!(s, "{},{},{},\"{}\"", r.suite, r.status, r.checked, r.statement).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                writeln!(s, "{r}").unwrap();
            }
            writeln!(s, "{status}").unwrap();
            s
        }
    };
    Ok((out, u8::from(status != Status::Pass)))
}

/// FAIL dominates INCOMPLETE, which dominates PASS; a skip after a failed
/// axiom check is already covered by that failure.
fn overall(results: &[SuiteResult]) -> Status {
    if results.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if results.iter().any(|r| r.status == Status::Incomplete) {
        Status::Incomplete
    } else {
        Status::Pass
    }
}

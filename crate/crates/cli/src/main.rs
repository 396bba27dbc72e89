use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mes_core::drop1::drop1;
use mes_core::linalg::{columns_json, default_primes, matrix_records, ColumnIndex};
use mes_core::moulds::{fourier_expansion, goncharov_coproduct_word, SignConvention};
use mes_core::operators::{d_bim, delta, der, phi, r_bracket, tau, weight_op};
use mes_core::products::{ds, harmonic, harmonic_b, reg0, shuffle, Product};
use mes_core::relspaces::checks::{run_check, CheckId};
use mes_core::relspaces::diamond::{diamond_defect, diamond_derivative_defect};
use mes_core::relspaces::sums::truncated_sums_harness;
use mes_core::relspaces::{
    conj_dim_series, ge2_dimension, generator_span, ideal_rows, ideal_span, table_row, Family, RankMethod, TableRow,
};
use mes_core::word::enumerate_basis;
use mes_core::{BWord, Error, LinComb, Space, ZWord};

#[derive(Parser)]
#[command(name = "mes", version, about = "Exact computations with multiple Eisenstein series relations")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "MES_THREADS", default_value_t = 0)]
    threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// Compute ranks modulo primes instead of exactly.
    #[arg(long, global = true)]
    modular: bool,

    /// Number of primes for `--modular`.
    #[arg(long, global = true, default_value_t = 3)]
    primes: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Tsv,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductOp {
    Harmonic,
    Shuffle,
    #[value(name = "harmonic_b")]
    HarmonicB,
    Ds,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApplyOp {
    Phi,
    #[value(name = "R")]
    R,
    Delta,
    #[value(name = "W")]
    W,
    #[value(name = "D")]
    D,
    Drop1,
    Der,
    #[value(name = "reg0-harmonic")]
    Reg0Harmonic,
    #[value(name = "reg0-shuffle")]
    Reg0Shuffle,
    Tau,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "DR", alias = "dr")]
    Dr,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportWhat {
    Basis,
    Matrix,
    Span,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    H1,
    H0,
    Ge2,
}

#[derive(Subcommand)]
enum Command {
    /// Product of two words.
    Product {
        #[arg(long, value_enum)]
        op: ProductOp,
        left: String,
        right: String,
    },
    /// Apply an operator to a word (two words for `R`; balanced words as
    /// flat index lists for `D` and `tau`).
    Apply {
        #[arg(long, value_enum)]
        op: ApplyOp,
        #[arg(required = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Goncharov coproduct of a word.
    Coproduct { word: String },
    /// Symbolic Fourier expansion of G at an index with entries ≥ 2.
    Fourier { index: String },
    /// Relation counts per weight.
    Table {
        #[arg(long, default_value_t = 6)]
        from: u32,
        #[arg(long, default_value_t = 14)]
        to: u32,
        #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
        family: FamilyArg,
        /// Skip weights with more generators than this.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Coefficients of the conjectured dimension series.
    Dims {
        #[arg(long)]
        to: u32,
    },
    /// Run identity checks; the full suite when no check is named.
    Verify {
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        max_weight: Option<u32>,
    },
    /// Diamond defect of a pair, or of the derivative when one word is given.
    Diamond {
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        pair: Option<Vec<String>>,
        #[arg(long)]
        derivative: Option<String>,
    },
    /// Truncated harmonic-sum harness for the regularisation maps.
    A2 {
        #[arg(long, default_value_t = 6)]
        cutoff: u32,
        #[arg(long, default_value_t = 5)]
        max_weight: u32,
    },
    /// Export a basis, a relation matrix or a relation span.
    Export {
        #[arg(long, value_enum)]
        what: ExportWhat,
        #[arg(long)]
        weight: u32,
        #[arg(long, value_enum, default_value_t = FamilyArg::Dr)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = SpaceArg::Ge2)]
        space: SpaceArg,
        /// Export generators instead of the full ideal piece.
        #[arg(long)]
        generators: bool,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    VerificationFailed(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed(detail)) => {
            eprintln!("{}", serde_json::to_string_pretty(&detail).unwrap_or_default());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn word(text: &str) -> Result<ZWord> {
    ZWord::parse(text).with_context(|| format!("cannot parse word `{text}`"))
}

fn bword(text: &str) -> Result<BWord> {
    let flat: Vec<u8> = text
        .split(',')
        .map(|t| t.trim().parse::<u8>().map_err(|_| anyhow!("`{t}` is not a letter index")))
        .collect::<Result<_>>()?;
    Ok(BWord::from_flat(&flat)?)
}

fn one(w: &ZWord) -> LinComb<ZWord> {
    LinComb::from_word(w.clone())
}

fn echo(w: &ZWord) -> Value {
    json!({ "index": w.letters(), "xy": w.to_xy().to_string() })
}

fn emit(format: Format, plain: &str, value: Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?,
        _ => writeln!(out, "{plain}")?,
    }
    Ok(())
}

fn emit_word_result(format: Format, op: &str, inputs: &[ZWord], result: &LinComb<ZWord>) -> Result<()> {
    if format == Format::Json {
        let inputs: Vec<Value> = inputs.iter().map(echo).collect();
        return emit(format, "", json!({ "op": op, "inputs": inputs, "result": result.to_json() }));
    }
    let mut out = std::io::stdout().lock();
    for w in inputs {
        writeln!(out, "# {w} = {}", w.to_xy())?;
    }
    writeln!(out, "{}", result.to_plain())?;
    Ok(())
}

fn families(f: FamilyArg) -> Vec<Family> {
    match f {
        FamilyArg::R => vec![Family::R],
        FamilyArg::Dr => vec![Family::Dr],
        FamilyArg::Both => vec![Family::R, Family::Dr],
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Product { op, left, right } => {
            if let ProductOp::HarmonicB = op {
                let (u, v) = (bword(left)?, bword(right)?);
                let r = harmonic_b(&LinComb::from_word(u.clone()), &LinComb::from_word(v.clone()));
                let value = json!({ "op": "harmonic_b", "result": r.to_json() });
                emit(format, &r.to_plain(), value)?;
                return Ok(Outcome::Ok);
            }
            let (u, v) = (word(left)?, word(right)?);
            let (name, r) = match op {
                ProductOp::Harmonic => ("harmonic", harmonic(&one(&u), &one(&v))),
                ProductOp::Shuffle => ("shuffle", shuffle(&one(&u), &one(&v))),
                ProductOp::Ds => ("ds", ds(&one(&u), &one(&v))),
                ProductOp::HarmonicB => unreachable!(),
            };
            emit_word_result(format, name, &[u, v], &r)?;
        }
        Command::Apply { op, args } => apply(format, *op, args)?,
        Command::Coproduct { word: w } => {
            let w = word(w)?;
            let d = goncharov_coproduct_word(&w, SignConvention::Derived);
            emit(format, &d.to_plain(), json!({ "input": echo(&w), "coproduct": d.to_json() }))?;
        }
        Command::Fourier { index } => {
            let k = word(index)?;
            let f = fourier_expansion(k.letters())?;
            emit(format, &f.to_string(), json!({ "index": k.letters(), "expansion": f.to_json() }))?;
        }
        Command::Table { from, to, family, budget } => {
            return table(cli, *from, *to, *family, *budget).map(|()| Outcome::Ok);
        }
        Command::Dims { to } => {
            let series = conj_dim_series(*to);
            if format == Format::Json {
                let value: Vec<Value> = series
                    .iter()
                    .enumerate()
                    .map(|(k, d)| json!({ "weight": k, "conjectured_dim": *d as i64, "ge2_dim": ge2_dimension(k as u32) }))
                    .collect();
                emit(format, "", Value::Array(value))?;
            } else {
                let lines: Vec<Vec<String>> = series
                    .iter()
                    .enumerate()
                    .map(|(k, d)| vec![k.to_string(), d.to_string(), ge2_dimension(k as u32).to_string()])
                    .collect();
                write_delimited(format, &["weight", "conjectured_dim", "ge2_dim"], &lines)?;
            }
        }
        Command::Verify { check, max_weight } => return verify(format, check.as_deref(), *max_weight),
        Command::Diamond { pair, derivative } => {
            let report = match (pair, derivative) {
                (Some(p), None) => diamond_defect(&word(&p[0])?, &word(&p[1])?)?,
                (None, Some(w)) => diamond_derivative_defect(&word(w)?)?,
                _ => bail!("give exactly one of --pair U V or --derivative W"),
            };
            let plain =
                format!("weight {}\ndefect {}\nin DR: {}", report.weight, report.defect.to_plain(), report.member);
            emit(format, &plain, report.to_json())?;
        }
        Command::A2 { cutoff, max_weight } => {
            let report = truncated_sums_harness(*cutoff, *max_weight)?;
            let value = report.to_json();
            let plain =
                format!("cutoff ≤ {cutoff}, weight ≤ {max_weight}: {}", if report.passed() { "PASS" } else { "FAIL" });
            emit(format, &plain, value.clone())?;
            if !report.passed() {
                return Ok(Outcome::VerificationFailed(value));
            }
        }
        Command::Export { what, weight, family, space, generators } => {
            export(format, *what, *weight, *family, *space, *generators)?;
        }
    }
    Ok(Outcome::Ok)
}

fn apply(format: Format, op: ApplyOp, args: &[String]) -> Result<()> {
    let arity = if matches!(op, ApplyOp::R) { 2 } else { 1 };
    if args.len() != arity {
        return Err(Error::Usage(format!("this operator takes {arity} argument(s)")).into());
    }
    if matches!(op, ApplyOp::D | ApplyOp::Tau) {
        let b = LinComb::from_word(bword(&args[0])?);
        let (name, r) = match op {
            ApplyOp::D => ("D", d_bim(&b)),
            _ => ("tau", tau(&b)),
        };
        return emit(format, &r.to_plain(), json!({ "op": name, "result": r.to_json() }));
    }
    let words: Vec<ZWord> = args.iter().map(|a| word(a)).collect::<Result<_>>()?;
    let w = one(&words[0]);
    let (name, r) = match op {
        ApplyOp::Phi => ("phi", phi(&w)),
        ApplyOp::R => ("R", r_bracket(&w, &one(&words[1]))),
        ApplyOp::Delta => ("delta", delta(&w)),
        ApplyOp::W => ("W", weight_op(&w)),
        ApplyOp::Drop1 => ("drop1", drop1(&w)?),
        ApplyOp::Der => ("der", der(&w)?),
        ApplyOp::Reg0Harmonic => ("reg0-harmonic", reg0(&w, Product::Harmonic)?),
        ApplyOp::Reg0Shuffle => ("reg0-shuffle", reg0(&w, Product::Shuffle)?),
        ApplyOp::D | ApplyOp::Tau => unreachable!(),
    };
    emit_word_result(format, name, &words, &r)
}

fn table(cli: &Cli, from: u32, to: u32, family: FamilyArg, budget: Option<u64>) -> Result<()> {
    let method =
        if cli.modular { RankMethod::Modular(default_primes(cli.primes.max(1), 0)) } else { RankMethod::Exact };
    let mut rows: Vec<Option<TableRow>> = Vec::new();
    for k in from..=to {
        if budget.is_some_and(|b| ge2_dimension(k) > b) {
            rows.push(None);
            continue;
        }
        rows.push(Some(table_row(k, &method)?));
    }
    let fams = families(family);
    let cols = |r: &TableRow| -> Vec<String> {
        let mut v = vec![r.weight.to_string(), r.generator_count.to_string()];
        for f in &fams {
            v.push(match f {
                Family::R => r.rank_r.to_string(),
                _ => r.rank_dr.to_string(),
            });
        }
        v.push(r.conjectured_dim.to_string());
        v.push(r.etilde_dim.to_string());
        v
    };
    let mut header = vec!["weight", "generator_count"];
    for f in &fams {
        header.push(match f {
            Family::R => "rank_R",
            _ => "rank_DR",
        });
    }
    header.extend(["conjectured_dim", "etilde_dim"]);
    let skipped = |k: u32| -> Vec<String> {
        let mut v = vec![k.to_string(), ge2_dimension(k).to_string()];
        v.extend(std::iter::repeat_n("SKIPPED".to_string(), header.len() - 2));
        v
    };
    let lines: Vec<Vec<String>> =
        rows.iter().zip(from..=to).map(|(r, k)| r.as_ref().map_or_else(|| skipped(k), &cols)).collect();
    let mut out = std::io::stdout().lock();
    match cli.format {
        Format::Json => {
            let value: Vec<Value> = rows
                .iter()
                .zip(from..=to)
                .map(|(r, k)| match r {
                    Some(r) => r.to_json(),
                    None => json!({ "weight": k, "skipped": true }),
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&Value::Array(value))?)?;
        }
        _ => write_delimited(cli.format, &header, &lines)?,
    }
    Ok(())
}

fn write_delimited(format: Format, header: &[&str], lines: &[Vec<String>]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    if format == Format::Csv {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        for l in lines {
            w.write_record(l)?;
        }
        w.flush()?;
    } else {
        writeln!(out, "{}", header.join("\t"))?;
        for l in lines {
            writeln!(out, "{}", l.join("\t"))?;
        }
    }
    Ok(())
}

fn default_weight(id: CheckId) -> u32 {
    match id {
        CheckId::Sl2Phi | CheckId::Sl2Der | CheckId::DeltaLeibnizR | CheckId::RInGe2 => 10,
        _ => 8,
    }
}

fn verify(format: Format, check: Option<&str>, max_weight: Option<u32>) -> Result<Outcome> {
    let ids: Vec<CheckId> = match check {
        Some(c) => vec![c.parse::<CheckId>()?],
        None => CheckId::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut out = std::io::stdout().lock();
    for id in ids {
        let report = run_check(id, max_weight.unwrap_or_else(|| default_weight(id)))?;
        if format != Format::Json {
            writeln!(
                out,
                "{}\t{}\tweight ≤ {}\t{} instances",
                id.name(),
                if report.passed() { "PASS" } else { "FAIL" },
                report.max_weight,
                report.instances.len()
            )?;
        }
        if !report.passed() {
            failures.push(report.to_json());
        }
        reports.push(report.to_json());
    }
    if format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(&Value::Array(reports))?)?;
    }
    Ok(if failures.is_empty() { Outcome::Ok } else { Outcome::VerificationFailed(Value::Array(failures)) })
}

fn export(
    format: Format,
    what: ExportWhat,
    k: u32,
    family: FamilyArg,
    space: SpaceArg,
    generators: bool,
) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let family = match family {
        FamilyArg::R => Family::R,
        FamilyArg::Dr => Family::Dr,
        FamilyArg::Both => bail!("export needs a single family"),
    };
    match what {
        ExportWhat::Basis => {
            let space = match space {
                SpaceArg::H1 => Space::H1,
                SpaceArg::H0 => Space::H0,
                SpaceArg::Ge2 => Space::Ge2,
            };
            let words = enumerate_basis(k, space);
            match format {
                Format::Json => {
                    let cols = ColumnIndex::from_words(k, words);
                    writeln!(out, "{}", serde_json::to_string(&columns_json(&cols))?)?;
                }
                _ => {
                    for w in words {
                        writeln!(out, "{}\t{}", w.format(), w.to_xy())?;
                    }
                }
            }
        }
        ExportWhat::Matrix => {
            let rows = if generators { generator_span(k, family)?.basis() } else { ideal_rows(k, family)? };
            let cols = ColumnIndex::new(k, family.space());
            let records = matrix_records(&cols, &rows)?;
            match format {
                Format::Json => {
                    let entries: Vec<Value> =
                        records.iter().map(|(r, c, n, d)| json!({ "row": r, "col": c, "num": n, "den": d })).collect();
                    let value = json!({ "columns": columns_json(&cols), "rows": rows.len(), "entries": entries });
                    writeln!(out, "{}", serde_json::to_string(&value)?)?;
                }
                _ => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["row", "col", "num", "den"])?;
                    for (r, c, n, d) in records {
                        w.write_record([r.to_string(), c.to_string(), n, d])?;
                    }
                    w.flush()?;
                }
            }
        }
        ExportWhat::Span => {
            let span = if generators { generator_span(k, family)? } else { ideal_span(k, family)? };
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&span.to_json())?)?,
                _ => {
                    writeln!(out, "# weight {k}, rank {}", span.rank())?;
                    for b in span.basis() {
                        writeln!(out, "{}", b.to_plain())?;
                    }
                }
            }
        }
    }
    Ok(())
}

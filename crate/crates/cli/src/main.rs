use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use omega_rb::classify::{
    default_samples, diff_with_fixture, enumerate, verify_lambda_ets_table, verify_table_remarks, EtsFixture,
    LambdaFixture, SearchLevel,
};
use omega_rb::omega::{
    check_diassociative, check_eds, check_ets, check_ets_maps_level, check_lambda_ets, check_maps_level,
};
use omega_rb::rba::{dendriform_from, OmegaRba};
use omega_rb::trees::{check_dendriform_up_to, trees_up_to, TreeAlgebra};
use omega_rb::words::{FiniteAlgebra, WordAlgebra};
use omega_rb::{AxiomReport, FormalSum, OmegaStructure};

#[derive(Parser)]
#[command(name = "omega-rb", version, about = "Parameter structures and free Omega-Rota-Baxter algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every randomized choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, env = "OMEGA_RB_WORKERS", global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckLevel {
    /// Every level the file has data for.
    Auto,
    Diassoc,
    Eds,
    LambdaEts,
    Ets,
    Maps,
    EtsMaps,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumLevel {
    Diassoc,
    Eds,
    Ets,
}

#[derive(Subcommand)]
enum Command {
    /// Run the axiom checkers on a structure file.
    Check {
        structure: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckLevel::Auto)]
        level: CheckLevel,
    },
    /// Evaluate a tree expression, e.g. `([a](|)) * ([b](|))`.
    Product {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        alphabet: Vec<String>,
        /// Drop the weight term.
        #[arg(long)]
        weight_zero: bool,
    },
    /// Evaluate a typed-word expression over a finite algebra.
    Words {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        expr: String,
        /// Adjoin a unit to the algebra first.
        #[arg(long)]
        unitize: bool,
    },
    /// Enumerate all structures of a given size and level.
    Enumerate {
        #[arg(long, value_enum)]
        level: EnumLevel,
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// Compare the classes with an ETS fixture file.
        #[arg(long)]
        diff: Option<PathBuf>,
    },
    /// Check the enumeration and both cardinality-two tables.
    VerifyTables {
        #[arg(long)]
        ets_fixture: Option<PathBuf>,
        #[arg(long)]
        lambda_fixture: Option<PathBuf>,
    },
    /// Check the dendriform identities on a pool of trees (weight zero).
    Dendriform {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        alphabet: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Bound on the total leaf count of a triple.
        #[arg(long, default_value_t = 5)]
        leaves: usize,
        /// Check this many random triples instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Apply the universal morphism defined by a substitution file.
    Evaluate {
        #[arg(long)]
        omega: PathBuf,
        /// Parameter structure of the target; defaults to `--omega`.
        #[arg(long)]
        target_omega: Option<PathBuf>,
        #[arg(long)]
        expr: String,
        /// Source words over this algebra; trees when absent.
        #[arg(long)]
        source_algebra: Option<PathBuf>,
        #[arg(long)]
        target_algebra: PathBuf,
        /// Lines `name = word expression`, one per generator.
        #[arg(long)]
        subst: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        alphabet: Vec<String>,
    },
}

struct Outcome {
    text: String,
    json: serde_json::Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(ok) => ExitCode::from(if ok { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let outcome = match &cli.command {
        Command::Check { structure, level } => check(&read_structure(structure)?, *level)?,
        Command::Product { omega, expr, alphabet, weight_zero } => product(omega, expr, alphabet, *weight_zero)?,
        Command::Words { omega, algebra, expr, unitize } => words(omega, algebra, expr, *unitize)?,
        Command::Enumerate { level, size, diff } => enumerate_cmd(*level, *size, diff.as_deref())?,
        Command::VerifyTables { ets_fixture, lambda_fixture } => {
            verify_tables(ets_fixture.as_deref(), lambda_fixture.as_deref())?
        }
        Command::Dendriform { omega, alphabet, depth, leaves, sample } => {
            dendriform(omega, alphabet, *depth, *leaves, *sample, cli.seed)?
        }
        Command::Evaluate { omega, target_omega, expr, source_algebra, target_algebra, subst, alphabet } => evaluate(
            omega,
            target_omega.as_deref(),
            expr,
            source_algebra.as_deref(),
            target_algebra,
            subst,
            alphabet,
        )?,
    };
    let body = match cli.format {
        Format::Text => outcome.text,
        Format::Json => serde_json::to_string_pretty(&outcome.json)? + "\n",
    };
    match &cli.out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{body}"),
    }
    Ok(outcome.ok)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_structure(path: &Path) -> Result<OmegaStructure> {
    OmegaStructure::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_algebra(path: &Path) -> Result<FiniteAlgebra> {
    FiniteAlgebra::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn check(s: &OmegaStructure, level: CheckLevel) -> Result<Outcome> {
    let reports: Vec<AxiomReport> = match level {
        CheckLevel::Auto => {
            let mut r = vec![check_diassociative(s)];
            if s.lhd.is_some() {
                r.push(check_eds(s));
            }
            if s.has_strict_weight() {
                r.push(check_lambda_ets(s));
            }
            if s.has_weight() {
                r.push(check_maps_level(s));
            }
            if s.star.is_some() && s.dot.is_some() {
                r.push(check_ets(s));
                r.push(check_ets_maps_level(s));
            }
            r
        }
        CheckLevel::Diassoc => vec![check_diassociative(s)],
        CheckLevel::Eds => vec![check_eds(s)],
        CheckLevel::LambdaEts => vec![check_lambda_ets(s)],
        CheckLevel::Ets => vec![check_ets(s)],
        CheckLevel::Maps => vec![check_maps_level(s)],
        CheckLevel::EtsMaps => vec![check_ets_maps_level(s)],
    };
    if level != CheckLevel::Auto {
        if let Some(r) = reports.iter().find(|r| !r.is_applicable()) {
            bail!("{}", r.render(&s.labels).trim_end());
        }
    }
    Ok(Outcome {
        text: reports.iter().map(|r| r.render(&s.labels)).collect(),
        json: serde_json::to_value(&reports)?,
        ok: reports.iter().all(AxiomReport::holds),
    })
}

fn tree_algebra(s: &OmegaStructure, alphabet: &[String], weight_zero: bool) -> Result<TreeAlgebra> {
    let alphabet = alphabet.to_vec();
    Ok(if weight_zero { TreeAlgebra::weight_zero(s, alphabet)? } else { TreeAlgebra::new(s, alphabet)? })
}

fn product(omega: &Path, expr: &str, alphabet: &[String], weight_zero: bool) -> Result<Outcome> {
    let s = read_structure(omega)?;
    let alg = tree_algebra(&s, alphabet, weight_zero)?;
    let u = alg.parse_expr(expr).context("parsing the expression")?;
    let out = alg.render_sum(&u);
    Ok(Outcome { text: format!("{out}\n"), json: json!({ "expr": expr, "result": out }), ok: true })
}

fn words(omega: &Path, algebra: &Path, expr: &str, unitize: bool) -> Result<Outcome> {
    let s = read_structure(omega)?;
    let mut a = read_algebra(algebra)?;
    if unitize {
        a = a.unitize();
    }
    let w = WordAlgebra::new(&s, a)?;
    let u = w.parse_expr(expr).context("parsing the expression")?;
    let out = w.render_sum(&u);
    Ok(Outcome { text: format!("{out}\n"), json: json!({ "expr": expr, "result": out }), ok: true })
}

fn enumerate_cmd(level: EnumLevel, size: usize, diff: Option<&Path>) -> Result<Outcome> {
    if size == 0 {
        bail!("size must be positive");
    }
    let level = match level {
        EnumLevel::Diassoc => SearchLevel::Diassociative,
        EnumLevel::Eds => SearchLevel::Eds,
        EnumLevel::Ets => SearchLevel::Ets,
    };
    let result = enumerate(level, size);
    let mut text = result.render_text();
    let mut json = json!({
        "level": result.level,
        "size": result.size,
        "raw_count": result.raw_count,
        "class_count": result.class_count,
        "structures": result.records(),
    });
    let mut ok = true;
    if let Some(path) = diff {
        if level != SearchLevel::Ets || size != 2 {
            bail!("--diff compares with a two-element ETS fixture");
        }
        let fixture = EtsFixture::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        let d = diff_with_fixture(&result, &fixture)?;
        ok = d.is_exact();
        text.push_str(&render_diff(&d));
        json["diff"] = serde_json::to_value(&d)?;
    }
    Ok(Outcome { text, json, ok })
}

fn render_diff(d: &omega_rb::classify::FixtureDiff) -> String {
    if d.is_exact() {
        return "fixture: exact match\n".into();
    }
    let mut out = String::from("fixture: MISMATCH\n");
    for m in &d.missing {
        out.push_str(&format!("  missing from the search: {m}\n"));
    }
    for u in &d.unexpected {
        let cells = [Some(&u.left), Some(&u.right), u.lhd.as_ref(), u.rhd.as_ref(), u.star.as_ref(), u.dot.as_ref()];
        let row: Vec<&str> = cells.into_iter().flatten().map(String::as_str).collect();
        out.push_str(&format!("  not in the fixture: {}\n", row.join(" ")));
    }
    for (a, b) in &d.duplicates {
        out.push_str(&format!("  same class: {a} and {b}\n"));
    }
    out
}

fn verify_tables(ets: Option<&Path>, lambda: Option<&Path>) -> Result<Outcome> {
    let ets = match ets {
        Some(p) => EtsFixture::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => EtsFixture::builtin(),
    };
    let lambda = match lambda {
        Some(p) => LambdaFixture::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => LambdaFixture::builtin(),
    };
    let samples = default_samples();
    let diff = diff_with_fixture(&enumerate(SearchLevel::Ets, 2), &ets)?;
    let table = verify_lambda_ets_table(&lambda, &samples)?;
    let remarks = verify_table_remarks(&lambda, &samples)?;
    let ok = diff.is_exact() && table.holds() && table.disagreements().is_empty() && remarks.holds();
    let text = format!(
        "ETS table\n{}\nλ-ETS table\n{}\nremarks\n{}",
        render_diff(&diff),
        table.render(),
        remarks.render()
    );
    let json = json!({ "ets": diff, "lambda_ets": table, "remarks": remarks, "ok": ok });
    Ok(Outcome { text, json, ok })
}

fn dendriform(
    omega: &Path,
    alphabet: &[String],
    depth: usize,
    leaves: usize,
    sample: Option<usize>,
    seed: u64,
) -> Result<Outcome> {
    let s = read_structure(omega)?;
    let alg = TreeAlgebra::weight_zero(&s, alphabet.to_vec())?;
    let (cases, failure) = match sample {
        None => {
            let r = check_dendriform_up_to(&alg, depth, leaves)?;
            (r.cases, r.failure.map(|f| (f.alpha, f.beta, f.tags, f.trees.to_vec())))
        }
        Some(n) => {
            let view = dendriform_from(&alg)?;
            let pool = trees_up_to(alphabet.len(), s.size, depth, leaves.saturating_sub(2).max(1));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failure = None;
            for _ in 0..n {
                let t: Vec<_> = (0..3).map(|_| pool.choose(&mut rng).expect("nonempty pool").clone()).collect();
                let e: Vec<_> = t.iter().map(|x| FormalSum::basis(x.clone())).collect();
                let (al, be) = (rand::Rng::gen_range(&mut rng, 0..s.size), rand::Rng::gen_range(&mut rng, 0..s.size));
                let tags = view.violations(al, be, &e[0], &e[1], &e[2]);
                if !tags.is_empty() {
                    failure = Some((al, be, tags, t));
                    break;
                }
            }
            (n, failure)
        }
    };
    let text = match &failure {
        None => format!("dendriform identities hold on {cases} cases\n"),
        Some((al, be, tags, t)) => format!(
            "FAIL {} at alpha={}, beta={}: {}\n",
            tags.join(", "),
            s.labels[*al],
            s.labels[*be],
            t.iter().map(|x| alg.render_tree(x)).collect::<Vec<_>>().join("  ")
        ),
    };
    let json = json!({
        "cases": cases,
        "holds": failure.is_none(),
        "failure": failure.as_ref().map(|(al, be, tags, t)| json!({
            "alpha": s.labels[*al],
            "beta": s.labels[*be],
            "tags": tags,
            "trees": t.iter().map(|x| alg.render_tree(x)).collect::<Vec<_>>(),
        })),
    });
    Ok(Outcome { text, json, ok: failure.is_none() })
}

/// `name = expression` lines; `#` comments and blank lines are skipped.
fn read_subst(path: &Path) -> Result<Vec<(String, String)>> {
    read(path)?
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| anyhow!("{}: line {}: expected `name = expression`", path.display(), i + 1))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    omega: &Path,
    target_omega: Option<&Path>,
    expr: &str,
    source_algebra: Option<&Path>,
    target_algebra: &Path,
    subst: &Path,
    alphabet: &[String],
) -> Result<Outcome> {
    let s = read_structure(omega)?;
    let t = match target_omega {
        Some(p) => read_structure(p)?,
        None => s.clone(),
    };
    let target = WordAlgebra::new(&t, read_algebra(target_algebra)?)?;
    let entries = read_subst(subst)?;
    let lookup = |name: &str| -> Result<FormalSum<_>> {
        let (_, v) = entries
            .iter()
            .find(|(k, _)| k == name)
            .ok_or_else(|| anyhow!("{} gives no value for `{name}`", subst.display()))?;
        target.parse_expr(v).with_context(|| format!("parsing the value of `{name}`"))
    };
    let value = match source_algebra {
        None => {
            let src = TreeAlgebra::new(&s, alphabet.to_vec())?;
            let images = alphabet.iter().map(|x| lookup(x)).collect::<Result<Vec<_>>>()?;
            let u = src.parse_expr(expr).context("parsing the expression")?;
            src.evaluate(&u, &|i| images[i].clone(), &target)?
        }
        Some(path) => {
            let src = WordAlgebra::new(&s, read_algebra(path)?)?;
            let a = src.algebra();
            let given = |i: usize| entries.iter().any(|(k, _)| *k == a.labels()[i]);
            let images = (0..a.dim())
                .map(|i| if Some(i) == a.unit() && !given(i) { Ok(target.one()) } else { lookup(&a.labels()[i]) })
                .collect::<Result<Vec<_>>>()?;
            let u = src.parse_expr(expr).context("parsing the expression")?;
            src.evaluate(&u, &|i| images[i].clone(), &target)?
        }
    };
    let out = target.render(&value);
    Ok(Outcome { text: format!("{out}\n"), json: json!({ "expr": expr, "result": out }), ok: true })
}

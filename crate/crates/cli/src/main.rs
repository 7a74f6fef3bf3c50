use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qzeta::arith::{render, render_poly, series_expand, MonomialRatio, RationalFn};
use qzeta::closed_forms::{builtin_formula, elliptic_point_count, FORMULA_NAMES};
use qzeta::funeq::{predicted_symmetry, verify_funeq, FunEqReport, SymmetryData};
use qzeta::lattice::{count_subreps, CountOptions, CountTable, Mode};
use qzeta::linalg::IntMatrix;
use qzeta::ppartition::{delta_chain, hasse_rep, ppartition_count, stanley_gf, Poset};
use qzeta::quiver::{
    builtin_rep, check_homogeneity, cocentral_grading, Grading, Params, Representation,
    BUILTIN_NAMES,
};
use qzeta::suite::{run_all, SuiteOptions};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qzeta", version, about = "Zeta functions of integral nilpotent quiver representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count subrepresentations of p-power index.
    Count(CountArgs),
    /// Print a closed-form zeta function from the catalog.
    Formula(FormulaArgs),
    /// Check the functional equation predicted by the centralizer series.
    Funeq(FuneqArgs),
    /// P-partitions, Stanley generating functions and delta-chains of a poset.
    Ppart(PpartArgs),
    /// Check homogeneity of the endomorphism algebra generators for a grading.
    Homog(HomogArgs),
    /// Run the acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Args)]
struct RepSource {
    /// Representation JSON file.
    #[arg(long, conflicts_with = "builtin")]
    rep: Option<PathBuf>,
    /// Builtin representation name.
    #[arg(long)]
    builtin: Option<String>,
    /// Builtin parameters, e.g. "m=1 a=3".
    #[arg(long, default_value = "")]
    params: String,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    source: RepSource,
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    max_exp: u32,
    /// One variable per vertex instead of a single t.
    #[arg(long)]
    multivariate: bool,
    /// Write the count table as JSON to this file.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Enumerate tails inside preimages of heads (acyclic quivers).
    #[arg(long)]
    accelerate: bool,
    /// Refuse runs visiting more candidate tuples than this.
    #[arg(long)]
    ceiling: Option<u128>,
    /// Refuse runs keeping more per-vertex candidate lattices in memory than this.
    #[arg(long)]
    max_stored: Option<u128>,
}

#[derive(Args)]
struct FormulaArgs {
    /// Catalog name; omit to list the catalog.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value = "")]
    params: String,
    /// Expand as a power series up to this t-degree.
    #[arg(long, value_name = "B")]
    series: Option<u32>,
    /// Evaluate the series coefficients at q = P.
    #[arg(long, value_name = "P", requires = "series")]
    at_q: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FuneqArgs {
    #[command(flatten)]
    source: RepSource,
    /// Catalog formula to test; defaults to the builtin's own name.
    #[arg(long)]
    formula: Option<String>,
    /// Formula parameters; defaults to the builtin parameters.
    #[arg(long)]
    formula_params: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PpartArgs {
    /// Poset JSON file.
    #[arg(long)]
    poset: PathBuf,
    /// Print the Stanley generating function.
    #[arg(long)]
    gf: bool,
    /// Report whether the poset satisfies the delta-chain condition.
    #[arg(long)]
    check_delta: bool,
    /// Compare P-partition counts with subrepresentation counts of the Hasse quiver.
    #[arg(long, requires_all = ["prime", "bound"])]
    verify_quiver: bool,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    bound: Option<u32>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HomogArgs {
    #[command(flatten)]
    source: RepSource,
    /// Grading JSON file; the cocentral grading is computed when omitted.
    #[arg(long)]
    grading: Option<PathBuf>,
    /// JSON array of square matrices; the arrow extensions when omitted.
    #[arg(long)]
    generators: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    fast: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the full report as JSON.
    #[arg(long, value_name = "OUT.json")]
    report: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Input problems exit with 2, failed verifications with 1.
enum Outcome {
    Passed,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(a) => count(a),
        Command::Formula(a) => formula(a),
        Command::Funeq(a) => funeq(a),
        Command::Ppart(a) => ppart(a),
        Command::Homog(a) => homog(a),
        Command::VerifyAll(a) => verify_all(a),
    };
    match result {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_rep(source: &RepSource) -> anyhow::Result<(Representation, Option<Grading>)> {
    match (&source.rep, &source.builtin) {
        (Some(path), None) => {
            let rep = Representation::from_json(&read(path)?)
                .with_context(|| format!("in {}", path.display()))?;
            Ok((rep, None))
        }
        (None, Some(name)) => {
            let b = builtin_rep(name, &Params::parse(&source.params)?).with_context(|| {
                format!("builtin representations: {}", BUILTIN_NAMES.join(", "))
            })?;
            Ok((b.rep, b.grading))
        }
        _ => bail!("give exactly one of --rep FILE or --builtin NAME"),
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn count(a: CountArgs) -> anyhow::Result<Outcome> {
    let (rep, _) = load_rep(&a.source)?;
    let mut options = CountOptions {
        accelerate: a.accelerate,
        ..CountOptions::default()
    };
    if let Some(c) = a.ceiling {
        options.ceiling = c;
    }
    if let Some(m) = a.max_stored {
        options.max_stored = m;
    }
    let mode = if a.multivariate { Mode::Multivariate } else { Mode::Univariate };
    let table = count_subreps(&rep, a.prime, a.max_exp, mode, &options)?;
    if let Some(out) = &a.json {
        std::fs::write(out, table.to_json()).with_context(|| format!("writing {}", out.display()))?;
    }
    print_table(&table, a.max_exp, mode);
    Ok(Outcome::Passed)
}

fn print_table(table: &CountTable, max_exp: u32, mode: Mode) {
    match mode {
        Mode::Univariate => {
            println!("{:>4}  count", "e");
            for (e, c) in table.univariate(max_exp).iter().enumerate() {
                println!("{e:>4}  {c}");
            }
        }
        Mode::Multivariate => {
            let value = table.to_json_value();
            println!("exponents  count");
            if let Some(counts) = value.get("counts").and_then(|c| c.as_object()) {
                for (k, c) in counts {
                    println!("{k:>9}  {c}");
                }
            }
        }
    }
}

fn formula(a: FormulaArgs) -> anyhow::Result<Outcome> {
    let Some(name) = &a.name else {
        if a.json {
            let list: Vec<_> = FORMULA_NAMES
                .iter()
                .map(|(n, p, d)| json!({"name": n, "params": p, "description": d}))
                .collect();
            print_json(&json!(list));
        } else {
            for (n, p, d) in FORMULA_NAMES {
                println!("{n:<18} {p:<12} {d}");
            }
        }
        return Ok(Outcome::Passed);
    };
    let params = Params::parse(&a.params)?;
    let w = builtin_formula(name, &params)?;
    let text = render(&w);
    let Some(bound) = a.series else {
        if a.json {
            print_json(&json!({"name": name, "formula": text}));
        } else {
            println!("{text}");
        }
        return Ok(Outcome::Passed);
    };
    let series = series_expand(&w, bound)?;
    match a.at_q {
        Some(q) => {
            let symbols = symbol_values(&w, q, &params)?;
            let coeffs: Vec<String> = if w.arity() == 1 {
                series.univariate_at(q, &symbols)?.iter().map(|c| c.to_string()).collect()
            } else {
                series
                    .evaluate(q, &symbols)?
                    .iter()
                    .map(|(e, c)| format!("{e:?}: {c}"))
                    .collect()
            };
            if a.json {
                print_json(&json!({"name": name, "formula": text, "q": q, "coefficients": coeffs}));
            } else {
                println!("{text}");
                for (e, c) in coeffs.iter().enumerate() {
                    if w.arity() == 1 {
                        println!("{e:>4}  {c}");
                    } else {
                        println!("  {c}");
                    }
                }
            }
        }
        None => {
            let sig = w.sig();
            let all = sig.var_names();
            let mut names = vec![all[0].clone()];
            names.extend(all[sig.symbol_range()].iter().cloned());
            let lines: Vec<String> = series
                .coeffs()
                .iter()
                .map(|(e, c)| {
                    let poly = render_poly(&c.poly, &names);
                    match c.shift {
                        0 => format!("{e:?}: {poly}"),
                        k => format!("{e:?}: q^{k}*({poly})"),
                    }
                })
                .collect();
            if a.json {
                print_json(&json!({"name": name, "formula": text, "coefficients": lines}));
            } else {
                println!("{text}");
                for l in lines {
                    println!("  {l}");
                }
            }
        }
    }
    Ok(Outcome::Passed)
}

/// The elliptic formula's symbol is the point count of its curve over F_q.
fn symbol_values(w: &RationalFn, q: u64, params: &Params) -> anyhow::Result<Vec<num_bigint::BigInt>> {
    if w.sig().symbols().is_empty() {
        return Ok(vec![]);
    }
    let d = params.int("D", None)?;
    Ok(vec![elliptic_point_count(d, q)?.into()])
}

fn funeq(a: FuneqArgs) -> anyhow::Result<Outcome> {
    let (rep, _) = load_rep(&a.source)?;
    let symmetry = predicted_symmetry(&rep)?;
    let name = a.formula.clone().or_else(|| a.source.builtin.clone());
    let params = a.formula_params.clone().unwrap_or_else(|| a.source.params.clone());
    let w = match &name {
        Some(n) if a.formula.is_some() => Some(builtin_formula(n, &Params::parse(&params)?)?),
        Some(n) => builtin_formula(n, &Params::parse(&params)?).ok(),
        None => None,
    };
    let Some(w) = w else {
        print_symmetry(&symmetry, a.json);
        if !a.json {
            println!("no catalog formula to test; pass --formula NAME");
        }
        return Ok(Outcome::Passed);
    };
    let mode = if w.arity() > 1 { Mode::Multivariate } else { Mode::Univariate };
    let report = verify_funeq(&w, &symmetry, mode)?;
    if a.json {
        print_json(&json!({"formula": render(&w), "symmetry": symmetry, "report": report}));
    } else {
        print_report(&w, &report);
    }
    Ok(if report.holds { Outcome::Passed } else { Outcome::Failed })
}

fn print_symmetry(s: &SymmetryData, json: bool) {
    if json {
        print_json(&json!({ "symmetry": s }));
    } else {
        println!("predicted: sign {}, q^{}, t exponents {:?}", s.sign, s.q_exp, s.t_exps);
    }
}

fn print_report(w: &RationalFn, report: &FunEqReport) {
    let ratio = |r: &MonomialRatio| r.render(w.sig());
    println!("W = {}", render(w));
    println!("predicted W(1/q, 1/t) / W = {}", ratio(&report.predicted));
    match &report.observed {
        Some(r) => println!("observed  W(1/q, 1/t) / W = {}", ratio(r)),
        None => println!("observed  W(1/q, 1/t) / W is not a monomial"),
    }
    if report.holds {
        println!("functional equation holds");
    } else {
        println!("functional equation FAILS");
        if let Some(res) = &report.residual {
            println!("residual: {res}");
        }
    }
}

fn ppart(a: PpartArgs) -> anyhow::Result<Outcome> {
    let poset = Poset::from_json(&read(&a.poset)?).with_context(|| format!("in {}", a.poset.display()))?;
    let mut out = serde_json::Map::new();
    let mut passed = true;
    if a.gf || !(a.check_delta || a.verify_quiver) {
        let g = stanley_gf(&poset)?;
        out.insert("generating_function".into(), json!(render(&g)));
        if !a.json {
            println!("Stanley generating function: {}", render(&g));
        }
    }
    if a.check_delta {
        let dc = delta_chain(&poset);
        out.insert("delta_chain".into(), json!({"holds": dc.holds, "delta": dc.delta}));
        if !a.json {
            println!("delta-chain condition: {} (delta = {})", dc.holds, dc.delta);
        }
    }
    if a.verify_quiver {
        let (prime, bound) = (a.prime.expect("required"), a.bound.expect("required"));
        let rep = hasse_rep(&poset);
        let table = count_subreps(&rep, prime, bound, Mode::Univariate, &CountOptions::default())?;
        let counts = table.univariate(bound);
        let direct: Vec<_> = (0..=bound).map(|m| ppartition_count(&poset, m)).collect();
        let agree = counts == direct;
        passed &= agree;
        out.insert(
            "verify_quiver".into(),
            json!({
                "prime": prime,
                "agree": agree,
                "subrep_counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "ppartition_counts": direct.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }),
        );
        if !a.json {
            println!("{:>4}  {:>12}  {:>12}", "m", "subreps", "P-partitions");
            for (m, (c, d)) in counts.iter().zip(&direct).enumerate() {
                let mark = if c == d { "" } else { "  <- differs" };
                println!("{m:>4}  {c:>12}  {d:>12}{mark}");
            }
            println!("Hasse quiver counts at p={prime} {}", if agree { "agree" } else { "DIFFER" });
        }
    }
    if a.json {
        print_json(&serde_json::Value::Object(out));
    }
    Ok(if passed { Outcome::Passed } else { Outcome::Failed })
}

fn homog(a: HomogArgs) -> anyhow::Result<Outcome> {
    let (rep, builtin_grading) = load_rep(&a.source)?;
    let grading = match &a.grading {
        Some(path) => Grading::from_json(&read(path)?, &rep).with_context(|| format!("in {}", path.display()))?,
        None => match builtin_grading {
            Some(g) => g,
            None => cocentral_grading(&rep)?,
        },
    };
    let gens = match &a.generators {
        Some(path) => parse_generators(&read(path)?, rep.total_rank())
            .with_context(|| format!("in {}", path.display()))?,
        None => rep.arrow_extensions(),
    };
    let report = check_homogeneity(&rep, &grading, &gens)?;
    if a.json {
        print_json(&json!(report));
    } else if report.homogeneous {
        println!("homogeneous with respect to the supplied grading and generators");
    } else {
        let w = report.witness.expect("witness for a failure");
        println!(
            "not homogeneous: generator {} block ({}, {}) maps layer {} into layer {}",
            w.k, rep.quiver.vertices[w.tail], rep.quiver.vertices[w.head], w.from, w.to
        );
        println!("this refers to the supplied data only; other generators may still be homogeneous");
    }
    Ok(if report.homogeneous { Outcome::Passed } else { Outcome::Failed })
}

fn parse_generators(text: &str, n: usize) -> anyhow::Result<Vec<IntMatrix>> {
    let raw: Vec<Vec<Vec<i64>>> = serde_json::from_str(text).context("expected a JSON array of matrices")?;
    raw.iter()
        .enumerate()
        .map(|(k, m)| {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                bail!("generators[{k}]: expected a {n}x{n} matrix");
            }
            let flat: Vec<i64> = m.iter().flatten().copied().collect();
            Ok(IntMatrix::from_i64(n, n, &flat))
        })
        .collect()
}

fn verify_all(a: VerifyArgs) -> anyhow::Result<Outcome> {
    let opts = SuiteOptions {
        fast: a.fast,
        seed: a.seed,
        ..SuiteOptions::default()
    };
    let report = run_all(&opts);
    if let Some(out) = &a.report {
        let text = serde_json::to_string_pretty(&report)?;
        std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    if a.json {
        print_json(&json!(report));
    } else {
        println!("seed {}, fast {}", report.seed, report.fast);
        for c in &report.criteria {
            println!(
                "{} {} {:<52} {:>7} checks {:>7.1}s",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.title,
                c.checks,
                c.seconds
            );
            for f in &c.failures {
                println!("      {f}");
            }
        }
        println!("{}", if report.passed { "all criteria passed" } else { "some criteria failed" });
    }
    Ok(if report.passed { Outcome::Passed } else { Outcome::Failed })
}

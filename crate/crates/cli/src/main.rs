//! `phantom`: command-line reports over the exact-arithmetic toolkit.
//! Every command prints a JSON document; `report --table` renders the same
//! payload as key/value lines. Nonzero exit when a report fails.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use phantom_core::deformation::{hull_quadrics, quadratic_dimension_bound, special_locus_report};
use phantom_core::hom::{curve_genus, hom, Entry, ObjectSpec};
use phantom_core::interp::{
    interp_dim, krah_class_list, verify_generality, FatPointProblem, DEFAULT_PRIME,
};
use phantom_core::parse::{parse_class, parse_object};
use phantom_core::picard::{DivisorClass, NUM_POINTS};
use phantom_core::projection::{
    curve_projection_report, e1_page, einfty_total, negative_hom_check, project_numclass,
    E1Page, ExceptionalCollection, NumClass,
};
use phantom_core::systems::{decide, enumerate_split_cases, CaseConstraint, SystemVerdict, VerdictKind};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "phantom", version, about = "Exact computations on the blowup of the plane at ten general points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear-system verdicts and base-locus case enumeration
    Systems {
        #[command(subcommand)]
        cmd: SystemsCmd,
    },
    /// Graded Hom dimensions between two objects
    Hom {
        /// first object: line:<class>, sky:<label> or curve:n=<n>
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Projection spectral-sequence pages and numerical classes
    Project {
        #[command(subcommand)]
        cmd: ProjectCmd,
    },
    /// Deformation-hull quadrics
    Hull {
        #[command(subcommand)]
        cmd: HullCmd,
    },
    /// Candidate special-locus systems and their refutations
    SpecialLocus,
    /// Fat-point interpolation oracle
    Interp(InterpArgs),
    /// Bundled reports reproducing the headline tables
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum SystemsCmd {
    /// Decide |D| for a divisor class
    Decide {
        #[arg(allow_hyphen_values = true)]
        class: String,
    },
    /// Enumerate slope-surviving splittings B + B' of a total class
    Enumerate {
        #[arg(long, allow_hyphen_values = true)]
        total: String,
        /// scan box, e.g. d=0..14,m=0..9,s=0..10
        #[arg(long = "box")]
        box_spec: String,
    },
}

#[derive(Subcommand)]
enum ProjectCmd {
    /// E1 page of the projection spectral sequence
    E1 {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// E-infinity totals for the worked cases
    Dims {
        #[arg(long, value_enum)]
        case: DimsCase,
        #[arg(long, default_value_t = 3)]
        n: i64,
    },
    /// Numerical class of an object and of its projection
    Class {
        #[arg(allow_hyphen_values = true)]
        object: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DimsCase {
    SkyscraperSame,
    SkyscraperDistinct,
    Curve,
}

#[derive(Subcommand)]
enum HullCmd {
    /// Print the 78 quadric generators
    Quadrics,
    /// Rank and surviving tangent directions
    Rank,
}

#[derive(clap::Args)]
struct InterpArgs {
    #[command(subcommand)]
    cmd: Option<InterpCmd>,
    /// degree of the plane curves
    #[arg(long)]
    d: Option<i64>,
    /// multiplicities, e.g. 18x10 or 6,6,6,6,6,6,6,6,6,6
    #[arg(long)]
    m: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum InterpCmd {
    /// Cross-check the decision procedure on a list of classes
    VerifyGenerality {
        #[arg(long, value_enum, default_value = "krah")]
        list: GeneralityList,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneralityList {
    Krah,
    SpecialLocus,
    All,
}

#[derive(clap::Args)]
struct ReportArgs {
    #[arg(value_enum)]
    bundle: BundleName,
    #[arg(long, default_value_t = 3)]
    n: i64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// machine format (default)
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// key/value rendering of the same payload
    #[arg(long)]
    table: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BundleName {
    Krah,
    Skyscraper,
    Curve,
    SpecialLocus,
    Hull,
    Generality,
}

fn resolve_seed(cli: Option<u64>) -> u64 {
    cli.or_else(|| std::env::var("PHANTOM_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(42)
}

fn parse_mults(s: &str) -> Result<[i64; NUM_POINTS]> {
    if let Some((val, count)) = s.split_once('x') {
        let val: i64 = val.trim().parse().context("multiplicity value")?;
        let count: usize = count.trim().parse().context("multiplicity count")?;
        if count != NUM_POINTS {
            bail!("expected {}x{NUM_POINTS}, got {s}", val);
        }
        return Ok([val; NUM_POINTS]);
    }
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse().context("multiplicity entry"))
        .collect::<Result<_>>()?;
    let m: [i64; NUM_POINTS] =
        parts.try_into().map_err(|_| anyhow!("expected {NUM_POINTS} multiplicities"))?;
    Ok(m)
}

fn parse_range(s: &str) -> Result<RangeInclusive<i64>> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| anyhow!("range must be lo..hi: {s}"))?;
    Ok(lo.trim().parse::<i64>()?..=hi.trim().parse::<i64>()?)
}

struct BoxSpec {
    d: RangeInclusive<i64>,
    m: RangeInclusive<i64>,
    s: Option<RangeInclusive<i64>>,
}

fn parse_box(spec: &str) -> Result<BoxSpec> {
    let mut d = None;
    let mut m = None;
    let mut s = None;
    for part in spec.split(',') {
        let (key, range) =
            part.split_once('=').ok_or_else(|| anyhow!("box entries are key=lo..hi: {part}"))?;
        let range = parse_range(range)?;
        match key.trim() {
            "d" => d = Some(range),
            "m" => m = Some(range),
            "s" | "mp-box" => s = Some(range),
            other => bail!("unknown box key {other:?} (expected d, m, s)"),
        }
    }
    Ok(BoxSpec {
        d: d.ok_or_else(|| anyhow!("box needs d=lo..hi"))?,
        m: m.ok_or_else(|| anyhow!("box needs m=lo..hi"))?,
        s,
    })
}

fn verdict_json(v: &SystemVerdict) -> Value {
    let (kind, dim) = match v.kind {
        VerdictKind::Empty => ("empty", json!(-1)),
        VerdictKind::Dim(k) => ("dim", json!(k)),
        VerdictKind::Unknown => ("unknown", Value::Null),
    };
    let trace: Vec<Value> = v
        .trace
        .iter()
        .map(|t| json!({ "rule": t.rule, "class": t.class.to_string() }))
        .collect();
    json!({ "kind": kind, "projective_dim": dim, "trace": trace })
}

fn page_json(page: &E1Page) -> Value {
    let map: BTreeMap<String, &Entry> =
        page.entries.iter().map(|(&(p, q), e)| (format!("{p},{q}"), e)).collect();
    serde_json::to_value(map).expect("page serializes")
}

fn num_class_json(v: &NumClass) -> Value {
    json!({ "rank": v.rank, "c1": v.c1.to_string(), "chi": v.chi })
}

/// Total class written as dH - m*(E1+..+E10) - mp*E_i; returns (m, mp, i).
fn distinguished_view(total: &DivisorClass) -> Result<(i64, i64, usize)> {
    let m = total.mults();
    if total.is_homogeneous() {
        return Ok((m[0], 0, 0));
    }
    for i in 0..NUM_POINTS {
        let rest: Vec<i64> = (0..NUM_POINTS).filter(|&j| j != i).map(|j| m[j]).collect();
        if rest.iter().all(|&x| x == rest[0]) {
            return Ok((rest[0], m[i] - rest[0], i));
        }
    }
    bail!("total class must be homogeneous away from at most one distinguished index")
}

fn case_class(d: i64, m: i64, mp: i64, index: usize) -> DivisorClass {
    let mut mults = [m; NUM_POINTS];
    mults[index] += mp;
    DivisorClass::from_deg_mults(d, mults)
}

fn cmd_enumerate(total: &str, box_spec: &str) -> Result<Value> {
    let total = parse_class(total)?;
    let spec = parse_box(box_spec)?;
    let (tm, tmp, index) = distinguished_view(&total)?;
    let td = total.degree();
    let constraint = if tmp == 0 {
        CaseConstraint::homogeneous_split(td, tm, spec.d, spec.m)
    } else {
        let s = spec.s.unwrap_or(0..=tm + tmp);
        CaseConstraint::distinguished_split(td, tm, tmp, spec.d, spec.m, s)
    };
    let cases: Vec<Value> = enumerate_split_cases(&constraint)
        .into_iter()
        .map(|(d, m, mp)| {
            let component = case_class(d, m, mp, index);
            let complement = total.sub(&component);
            json!({
                "case": [d, m, mp],
                "component": component.to_string(),
                "component_verdict": verdict_json(&decide(&component)),
                "complement": complement.to_string(),
                "complement_verdict": verdict_json(&decide(&complement)),
            })
        })
        .collect();
    Ok(json!({ "total": total.to_string(), "cases": cases }))
}

fn parse_objects(a: &str, b: &str) -> Result<(ObjectSpec, ObjectSpec)> {
    Ok((parse_object(a)?, parse_object(b)?))
}

fn dims_case(case: DimsCase, n: i64) -> Result<Value> {
    let coll = ExceptionalCollection::default_krah();
    let (label, page, ranks) = match case {
        DimsCase::SkyscraperSame => {
            let x = ObjectSpec::sky("x");
            ("skyscraper-same", e1_page(&x, &x, &coll)?, BTreeMap::from([((-1, 2), 1)]))
        }
        DimsCase::SkyscraperDistinct => {
            let (x, y) = (ObjectSpec::sky("x"), ObjectSpec::sky("y"));
            ("skyscraper-distinct", e1_page(&y, &x, &coll)?, BTreeMap::new())
        }
        DimsCase::Curve => {
            let g = ObjectSpec::curve(n);
            ("curve", e1_page(&g, &g, &coll)?, BTreeMap::new())
        }
    };
    let totals = einfty_total(&page, &ranks).map_err(|e| anyhow!("{e}"))?;
    Ok(json!({
        "case": label,
        "page": page_json(&page),
        "d1_ranks": ranks.iter().map(|(&(p, q), r)| json!({"source": [p, q], "rank": r})).collect::<Vec<_>>(),
        "totals": serde_json::to_value(&totals)?,
    }))
}

fn special_locus_classes() -> Vec<DivisorClass> {
    let k = DivisorClass::canonical();
    let f = DivisorClass::f_class();
    vec![
        k.scale(-1).add(&DivisorClass::exceptional(1)),
        k.sub(&f),
        DivisorClass::homogeneous(19, 6),
        k.sub(&f.scale(2)),
        k.sub(&f).add(&DivisorClass::d_class(1)),
        k.sub(&f.scale(2)).add(&DivisorClass::d_class(1)),
    ]
}

fn named_oracle_classes() -> Vec<DivisorClass> {
    vec![
        DivisorClass::f_class().scale(-3),
        DivisorClass::homogeneous(57, 19),
        DivisorClass::from_deg_mults(57, [19, 18, 18, 18, 18, 18, 18, 18, 18, 18]),
        DivisorClass::from_deg_mults(1, [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]),
        DivisorClass::from_deg_mults(2, [1, 1, 1, 1, 1, 1, 0, 0, 0, 0]),
        DivisorClass::from_deg_mults(26, [10, 8, 8, 8, 8, 8, 8, 8, 8, 8]),
    ]
}

fn generality_classes(list: GeneralityList) -> Vec<DivisorClass> {
    match list {
        GeneralityList::Krah => krah_class_list(),
        GeneralityList::SpecialLocus => special_locus_classes(),
        GeneralityList::All => {
            let mut all = krah_class_list();
            all.extend(special_locus_classes());
            all.extend(named_oracle_classes());
            all
        }
    }
}

fn bundle(name: BundleName, n: i64, prime: u64, seed: u64) -> Result<(Value, bool)> {
    match name {
        BundleName::Krah => {
            let coll = ExceptionalCollection::default_krah();
            let mut forward = BTreeMap::new();
            for i in 0..coll.len() {
                for j in (i + 1)..coll.len() {
                    let g = hom(&coll.object(i), &coll.object(j)).map_err(|e| anyhow!("{e}"))?;
                    forward.insert(format!("{i},{j}"), serde_json::to_value(&g)?);
                }
            }
            let sky = negative_hom_check(&ObjectSpec::sky("x"), &ObjectSpec::sky("x"), &coll)
                .map_err(|e| anyhow!("{e}"))?;
            let curve = negative_hom_check(&ObjectSpec::curve(n), &ObjectSpec::curve(n), &coll)
                .map_err(|e| anyhow!("{e}"))?;
            let pass = sky.certified_zero && curve.certified_zero;
            Ok((
                json!({
                    "collection": coll.classes().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "exceptional": true,
                    "forward_homs": forward,
                    "negative_homs_skyscraper": serde_json::to_value(&sky)?,
                    "negative_homs_curve": serde_json::to_value(&curve)?,
                }),
                pass,
            ))
        }
        BundleName::Skyscraper => {
            let same = dims_case(DimsCase::SkyscraperSame, n)?;
            let distinct = dims_case(DimsCase::SkyscraperDistinct, n)?;
            let expect =
                |v: &Value, dims: [i64; 5]| -> bool {
                    (0..5).all(|d| v["totals"][d.to_string()] == json!(dims[d as usize])
                        || (dims[d as usize] == 0 && v["totals"][d.to_string()].is_null()))
                };
            let pass = expect(&same, [1, 14, 92, 139, 60]) && expect(&distinct, [0, 13, 92, 139, 60]);
            Ok((json!({ "same_point": same, "distinct_points": distinct }), pass))
        }
        BundleName::Curve => {
            let dims = dims_case(DimsCase::Curve, n)?;
            let report = curve_projection_report(n).map_err(|e| anyhow!("{e}"))?;
            let pass = report.pass;
            Ok((
                json!({
                    "n": n,
                    "genus": curve_genus(n),
                    "dims": dims,
                    "constraint": "ext1 - ext2 = n^2 + 1",
                    "cohomology_sheaves": serde_json::to_value(&report)?,
                }),
                pass,
            ))
        }
        BundleName::SpecialLocus => {
            let report = special_locus_report();
            let pass = report.pass;
            Ok((serde_json::to_value(&report)?, pass))
        }
        BundleName::Hull => {
            let report = quadratic_dimension_bound();
            let pass = report.pass;
            Ok((serde_json::to_value(&report)?, pass))
        }
        BundleName::Generality => {
            let report = verify_generality(&generality_classes(GeneralityList::All), prime, seed);
            let pass = report.pass;
            Ok((serde_json::to_value(&report)?, pass))
        }
    }
}

fn bundle_name(name: BundleName) -> &'static str {
    match name {
        BundleName::Krah => "krah",
        BundleName::Skyscraper => "skyscraper",
        BundleName::Curve => "curve",
        BundleName::SpecialLocus => "special-locus",
        BundleName::Hull => "hull",
        BundleName::Generality => "generality",
    }
}

fn render_table(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_table(&key, val, out);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                render_table(&format!("{prefix}[{i}]"), val, out);
            }
        }
        other => out.push(format!("{prefix}\t{other}")),
    }
}

fn emit(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Systems { cmd } => match cmd {
            SystemsCmd::Decide { class } => {
                let class = parse_class(&class)?;
                let verdict = decide(&class);
                emit(&json!({ "class": class.to_string(), "verdict": verdict_json(&verdict) }))?;
                Ok(true)
            }
            SystemsCmd::Enumerate { total, box_spec } => {
                emit(&cmd_enumerate(&total, &box_spec)?)?;
                Ok(true)
            }
        },
        Command::Hom { a, b } => {
            let (a, b) = parse_objects(&a, &b)?;
            let g = hom(&a, &b).map_err(|e| anyhow!("{e}"))?;
            emit(&serde_json::to_value(&g)?)?;
            Ok(true)
        }
        Command::Project { cmd } => match cmd {
            ProjectCmd::E1 { from, to } => {
                let (from, to) = parse_objects(&from, &to)?;
                let coll = ExceptionalCollection::default_krah();
                let page = e1_page(&from, &to, &coll).map_err(|e| anyhow!("{e}"))?;
                emit(&page_json(&page))?;
                Ok(true)
            }
            ProjectCmd::Dims { case, n } => {
                emit(&dims_case(case, n)?)?;
                Ok(true)
            }
            ProjectCmd::Class { object } => {
                let object = parse_object(&object)?;
                let coll = ExceptionalCollection::default_krah();
                let class = NumClass::of_object(&object);
                let projected = project_numclass(&class, &coll);
                emit(&json!({
                    "class": num_class_json(&class),
                    "projected": num_class_json(&projected),
                }))?;
                Ok(true)
            }
        },
        Command::Hull { cmd } => match cmd {
            HullCmd::Quadrics => {
                let ideal = hull_quadrics();
                let gens: Vec<String> = ideal.generators.iter().map(|q| q.to_string()).collect();
                emit(&json!({ "count": gens.len(), "generators": gens }))?;
                Ok(true)
            }
            HullCmd::Rank => {
                let report = quadratic_dimension_bound();
                emit(&serde_json::to_value(&report)?)?;
                Ok(report.pass)
            }
        },
        Command::SpecialLocus => {
            let report = special_locus_report();
            emit(&serde_json::to_value(&report)?)?;
            Ok(report.pass)
        }
        Command::Interp(args) => match args.cmd {
            Some(InterpCmd::VerifyGenerality { list, prime, seed }) => {
                let seed = resolve_seed(seed);
                let report = verify_generality(&generality_classes(list), prime, seed);
                emit(&serde_json::to_value(&report)?)?;
                Ok(report.pass)
            }
            None => {
                let d = args.d.ok_or_else(|| anyhow!("--d is required"))?;
                let m = parse_mults(&args.m.ok_or_else(|| anyhow!("--m is required"))?)?;
                let seed = resolve_seed(args.seed);
                let problem = FatPointProblem::new(d, m, args.prime, seed);
                let result = interp_dim(&problem).map_err(|e| anyhow!("{e}"))?;
                emit(&json!({
                    "problem": serde_json::to_value(problem)?,
                    "result": serde_json::to_value(result)?,
                }))?;
                Ok(true)
            }
        },
        Command::Report(args) => {
            let seed = resolve_seed(args.seed);
            let (payload, pass) = bundle(args.bundle, args.n, args.prime, seed)?;
            let doc = json!({
                "bundle": bundle_name(args.bundle),
                "pass": pass,
                "payload": payload,
            });
            if args.table {
                let mut lines = Vec::new();
                render_table("", &doc, &mut lines);
                for line in lines {
                    println!("{line}");
                }
            } else {
                emit(&doc)?;
            }
            Ok(pass)
        }
    }
}

fn main() {
    match run() {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

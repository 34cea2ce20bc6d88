//! `circperm`: build, verify and compare few-term permutation polynomials over GF(q^2).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use circperm::catalog::{read_jsonl, write_csv, write_jsonl, CatalogEntry, Provenance};
use circperm::constructions::{
    beta_tilde, build_family, param_grid, validate_params, ConstructionError, ConstructionParams, FamilyId, GridLimits,
};
use circperm::qm::{
    classify_from_links, earlier_equivalent, qm_equivalent, qm_functional_search, QmError, QmOptions, VSearch,
    DEFAULT_QM_CAP,
};
use circperm::repro;
use circperm::verification::{
    decompose, is_permutation_exhaustive, verify_both, Decomposition, VerifyError, DEFAULT_CAP,
};
use circperm::wire::{parse_element, parse_polynomial, FieldSpec, ParamsJson, PolyJson, QmResultJson, ReportJson};
use circperm::{FieldCtx, FieldElement, QuadExtension, SparsePolynomial};

#[derive(Parser)]
#[command(name = "circperm", version, about = "Few-term permutation polynomials over GF(q^2)")]
struct Cli {
    /// Field as inline JSON or a path to a JSON file ({"p": .., "modulus": [..], "generator": [..]}).
    #[arg(long, global = true)]
    field: Option<String>,
    /// Characteristic, used with --m when --field is absent.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Degree of GF(q) over GF(p); the working field is GF(p^(2m)).
    #[arg(long, global = true)]
    m: Option<u32>,
    /// Degree-2m modulus for --p/--m, least-degree-first, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grids and classification (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Largest field order q^2 to work with.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a family member (or its whole grid), verify it and emit catalog entries.
    Construct(ConstructArgs),
    /// Decide whether a polynomial permutes GF(q^2).
    Verify {
        /// Polynomial text ("g^3*X^7 + X"), JSON, or a file holding either.
        poly: String,
    },
    /// Decide quasi-multiplicative equivalence f = u g(v X^d).
    QmTest {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value_t = Search::Roots)]
        search: Search,
    },
    /// Partition a JSONL catalog into equivalence classes.
    QmClassify {
        #[arg(long)]
        catalog: PathBuf,
        /// Also write the catalog back with class ids filled in.
        #[arg(long)]
        annotate: Option<PathBuf>,
    },
    /// Rebuild the worked examples and compare them coefficient by coefficient.
    Repro,
    /// Describe the working field.
    FieldInfo,
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(long)]
    family: String,
    /// Every valid parameter tuple of the family, in grid order.
    #[arg(long)]
    grid: bool,
    /// Parameters as ParamsJson, inline or a file.
    #[arg(long, conflicts_with = "grid")]
    params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Defaults to the value forced by the family relation.
    #[arg(long, allow_hyphen_values = true)]
    beta_t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta_t: Option<String>,
    /// alpha or a, for the families that take one.
    #[arg(long, allow_hyphen_values = true)]
    aux: Option<String>,
    /// CSV instead of JSONL.
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Search {
    /// Prefilter plus discrete-log solving for v.
    Roots,
    /// Prefilter plus every nonzero v.
    Brute,
    /// Every (u, v, d), compared pointwise.
    Functional,
}

/// Exit status and the JSON printed on stderr.
struct Failure {
    code: u8,
    body: Value,
}

const FALSE: u8 = 1;
const INPUT: u8 = 2;
const CAP: u8 = 3;

fn input(msg: impl ToString) -> Failure {
    Failure { code: INPUT, body: json!({ "error": msg.to_string() }) }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        input(e)
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::CapExceeded { .. } => Failure { code: CAP, body: json!({ "error": e.to_string() }) },
            VerifyError::Disagreement { .. } => Failure { code: FALSE, body: json!({ "error": e.to_string() }) },
            _ => input(e),
        }
    }
}

impl From<QmError> for Failure {
    fn from(e: QmError) -> Self {
        match e {
            QmError::CapExceeded { .. } => Failure { code: CAP, body: json!({ "error": e.to_string() }) },
            _ => input(e),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::InvalidParams(v) => Failure { code: INPUT, body: json!({ "violations": v }) },
            ConstructionError::LimitExceeded(_) => Failure { code: CAP, body: json!({ "error": e.to_string() }) },
            _ => input(e),
        }
    }
}

/// Inline text, or the contents of the file it names.
fn inline_or_file(s: &str) -> Result<String, Failure> {
    let t = s.trim();
    if !t.starts_with('{') && Path::new(t).is_file() {
        return Ok(std::fs::read_to_string(t)?);
    }
    Ok(t.to_string())
}

fn field(cli: &Cli) -> Result<QuadExtension, Failure> {
    let ext = match (&cli.field, cli.p, cli.m) {
        (Some(f), _, _) => {
            let spec: FieldSpec = serde_json::from_str(&inline_or_file(f)?).map_err(input)?;
            spec.build_ext().map_err(input)?
        }
        (None, Some(p), Some(m)) => match &cli.modulus {
            Some(modulus) => QuadExtension::new(p, m, modulus, None).map_err(input)?,
            None => QuadExtension::canonical(p, m).map_err(input)?,
        },
        _ => return Err(input("give --field, or --p and --m")),
    };
    if let Some(cap) = cli.cap {
        let order = ext.big().order();
        if order > cap {
            return Err(Failure {
                code: CAP,
                body: json!({ "error": format!("q^2 = {order} exceeds the cap {cap}") }),
            });
        }
    }
    Ok(ext)
}

fn element(ctx: &FieldCtx, name: &str, s: &Option<String>) -> Result<Option<FieldElement>, Failure> {
    s.as_deref().map(|s| parse_element(ctx, s).map_err(|e| input(format!("{name}: {e}")))).transpose()
}

fn polynomial(ctx: &FieldCtx, s: &str) -> Result<SparsePolynomial, Failure> {
    parse_polynomial(ctx, &inline_or_file(s)?).map_err(input)
}

fn output(cli: &Cli) -> Result<Box<dyn Write>, Failure> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(input)
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FALSE)
    }
}

fn single_params(ext: &QuadExtension, family: FamilyId, a: &ConstructArgs) -> Result<ConstructionParams, Failure> {
    let ctx = ext.big();
    if let Some(p) = &a.params {
        let pj: ParamsJson = serde_json::from_str(&inline_or_file(p)?).map_err(input)?;
        return pj.decode(ctx).map_err(input);
    }
    let need = |name: &str, v: Option<FieldElement>| v.ok_or_else(|| input(format!("--{name} is required")));
    let beta = need("beta", element(ctx, "beta", &a.beta)?)?;
    Ok(ConstructionParams {
        family,
        beta,
        beta_t: element(ctx, "beta-t", &a.beta_t)?.unwrap_or_else(|| beta_tilde(ext, family, beta)),
        delta: need("delta", element(ctx, "delta", &a.delta)?)?,
        delta_t: need("delta-t", element(ctx, "delta-t", &a.delta_t)?)?,
        aux: element(ctx, "aux", &a.aux)?,
    })
}

fn entry(
    ext: &QuadExtension,
    params: &ConstructionParams,
    cap: u64,
    prov: Provenance,
) -> Result<CatalogEntry, Failure> {
    let c = build_family(ext, params)?;
    let report = verify_both(&c.poly, c.r, &c.h, ext, cap)?;
    Ok(CatalogEntry::from_construction(ext, &c, &report, prov))
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<ExitCode, Failure> {
    let family: FamilyId = a.family.parse().map_err(input)?;
    let ext = field(cli)?;
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    let entries = if a.grid {
        let limits = GridLimits { max_order: cap, ..GridLimits::default() };
        let grid: Vec<ConstructionParams> = param_grid(&ext, family, limits)?.collect();
        pool(cli.workers)?
            .install(|| grid.par_iter().map(|p| entry(&ext, p, cap, Provenance::Grid)).collect::<Result<Vec<_>, _>>())?
    } else {
        let params = single_params(&ext, family, a)?;
        let violations = validate_params(&ext, &params);
        if !violations.is_empty() {
            return Err(ConstructionError::InvalidParams(violations).into());
        }
        vec![entry(&ext, &params, cap, Provenance::User)?]
    };
    let mut out = output(cli)?;
    if a.csv {
        write_csv(&mut out, &entries)?;
    } else {
        write_jsonl(&mut out, &entries)?;
    }
    out.flush()?;
    Ok(verdict(entries.iter().all(|e| e.report.is_permutation)))
}

fn verify(cli: &Cli, poly: &str) -> Result<ExitCode, Failure> {
    let ext = field(cli)?;
    let ctx = ext.big();
    let f = polynomial(ctx, poly)?;
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    let (report, rh) = match decompose(&f, &ext) {
        Decomposition::Decomposed { r, h } => (verify_both(&f, r, &h, &ext, cap)?, Some((r, h))),
        Decomposition::NotDecomposable => (is_permutation_exhaustive(&f, ctx, cap)?, None),
    };
    let mut body = serde_json::to_value(ReportJson::encode(ctx, &report)).map_err(input)?;
    if let Some((r, h)) = &rh {
        body["r"] = json!(r);
        body["h"] = serde_json::to_value(PolyJson::encode(ctx, h)).map_err(input)?;
    }
    let mut out = output(cli)?;
    writeln!(out, "{body}")?;
    out.flush()?;
    Ok(verdict(report.is_permutation))
}

fn qm_test(cli: &Cli, f: &str, g: &str, search: Search) -> Result<ExitCode, Failure> {
    let ext = field(cli)?;
    let ctx = ext.big();
    let (f, g) = (polynomial(ctx, f)?, polynomial(ctx, g)?);
    let cap = cli.cap.unwrap_or(DEFAULT_QM_CAP);
    let res = match search {
        Search::Roots => qm_equivalent(&f, &g, &ext, QmOptions { cap, ..QmOptions::default() })?,
        Search::Brute => {
            qm_equivalent(&f, &g, &ext, QmOptions { cap, prefilter: true, v_search: VSearch::BruteForce })?
        }
        Search::Functional => qm_functional_search(&f, &g, &ext, cap)?,
    };
    let mut out = output(cli)?;
    writeln!(out, "{}", serde_json::to_string(&QmResultJson::encode(ctx, &res)).map_err(input)?)?;
    out.flush()?;
    Ok(verdict(res.equivalent))
}

fn qm_classify(cli: &Cli, catalog: &Path, annotate: &Option<PathBuf>) -> Result<ExitCode, Failure> {
    let mut entries = read_jsonl(BufReader::new(File::open(catalog)?)).map_err(input)?;
    let Some(first) = entries.first() else {
        return Err(input("empty catalog"));
    };
    let spec = first.field.clone();
    if entries.iter().any(|e| e.field != spec) {
        return Err(input("catalog entries live in different fields"));
    }
    let ext = spec.build_ext().map_err(input)?;
    let ctx = ext.big();
    let opts = QmOptions { cap: cli.cap.unwrap_or(DEFAULT_QM_CAP), ..QmOptions::default() };
    let polys = entries.iter().map(|e| e.poly.decode(ctx)).collect::<Result<Vec<_>, _>>().map_err(input)?;
    let reduced: Vec<SparsePolynomial> = polys.iter().map(|p| p.reduce_exponents(ctx)).collect();
    let links = pool(cli.workers)?.install(|| {
        (0..reduced.len())
            .into_par_iter()
            .map(|j| earlier_equivalent(&reduced, j, &ext, opts))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let cls = classify_from_links(&polys, &ext, &links)?;
    let mut out = output(cli)?;
    let body = json!({
        "classes": cls.classes,
        "representatives": cls.representatives,
        "class_of": cls.class_of,
    });
    writeln!(out, "{body}")?;
    out.flush()?;
    if let Some(path) = annotate {
        for (e, &k) in entries.iter_mut().zip(&cls.class_of) {
            e.qm_class = Some(k);
        }
        let mut w = BufWriter::new(File::create(path)?);
        write_jsonl(&mut w, &entries)?;
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn repro_table(cli: &Cli) -> Result<ExitCode, Failure> {
    let mut out = output(cli)?;
    let outcomes = repro::run_all();
    writeln!(out, "{:<34} {:>6} {:>8} {:>7} {:>8} {:>9}  verdict", "example", "q", "g", "coeffs", "permutes", "ms")?;
    for o in &outcomes {
        writeln!(
            out,
            "{:<34} {:>6} {:>8} {:>7} {:>8} {:>9.1}  {}",
            o.name,
            o.q,
            o.g_used.as_deref().unwrap_or("-"),
            if o.coeffs_match { "match" } else { "differ" },
            o.is_permutation,
            o.ms,
            if o.pass() { "PASS" } else { "FAIL" }
        )?;
        if let Some(e) = &o.build_error {
            writeln!(out, "    build error: {e}")?;
        }
        for m in &o.mismatches {
            writeln!(out, "    {m}")?;
        }
    }
    writeln!(out, "\nstated moduli")?;
    for n in repro::primitivity_report().map_err(input)? {
        writeln!(
            out,
            "  p = {}, {}: root has order {} of {} ({})",
            n.p,
            repro::modulus_text(&n.modulus, "g"),
            n.root_order,
            n.group_order,
            if n.primitive() { "primitive" } else { "not primitive" }
        )?;
    }
    let errata: Vec<_> =
        repro::EXAMPLES.iter().zip(&outcomes).filter_map(|(ex, o)| ex.erratum.map(|e| (e, o))).collect();
    if !errata.is_empty() {
        writeln!(out, "\nerrata (diagnostic only, verdicts above are unchanged)")?;
        for (e, o) in errata {
            let status = match o.erratum_reproduces {
                Some(true) => "reproduces exactly",
                _ => "does not reproduce",
            };
            writeln!(out, "  {}: {} ; corrected reading {status}", o.name, e.note)?;
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass()).count();
    writeln!(out, "\n{passed}/{} PASS", outcomes.len())?;
    out.flush()?;
    Ok(verdict(passed == outcomes.len()))
}

fn field_info(cli: &Cli) -> Result<ExitCode, Failure> {
    let ext = field(cli)?;
    let ctx = ext.big();
    let sub = ext.subfield();
    let body = json!({
        "field": FieldSpec::of(ctx),
        "p": ctx.characteristic(),
        "q": ext.q(),
        "order": ctx.order(),
        "modulus": repro::modulus_text(ctx.modulus(), "x"),
        "generator": ctx.coords(ctx.generator()),
        "circle_size": ext.circle_members().len(),
        "subfield_size": sub.elements().len(),
        "subfield_generator": ctx.display(ctx.gen_pow(ext.q() as i64 + 1)),
    });
    let mut out = output(cli)?;
    writeln!(out, "{body}")?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.cmd {
        Cmd::Construct(a) => construct(cli, a),
        Cmd::Verify { poly } => verify(cli, poly),
        Cmd::QmTest { f, g, search } => qm_test(cli, f, g, *search),
        Cmd::QmClassify { catalog, annotate } => qm_classify(cli, catalog, annotate),
        Cmd::Repro => repro_table(cli),
        Cmd::FieldInfo => field_info(cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(INPUT);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.body);
            ExitCode::from(f.code)
        }
    }
}

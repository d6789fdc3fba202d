//! Subcommand implementations and report output.

use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use tautsys::exact::format_scalar;
use tautsys::griffiths::{
    derivative_query, filtration_generators, membership_test, scan_family, verify_certificate, verify_witness,
    MembershipOutcome, ScanLine, SectionPoint, SolveMode, NON_MEMBER_CAVEAT,
};
use tautsys::model::{build_projective_model, BasisOrdering, ModelSpec, MAX_PRODUCT_DEGREE};
use tautsys::periods::{closed_form_derivatives_at, derivative_generating_series, period_series, verify_annihilation};
use tautsys::selftest::run_selftest;
use tautsys::tautsys::{
    build_scalar_system, build_tautological_system, build_vector_system, compare_fourier_families,
};

use crate::parse::{parse_alpha, parse_line, parse_scalars};
use crate::{
    BuildArgs, Cli, Command, FourierArgs, MembershipArgs, Mode, ModelArgs, Ordering, ScanArgs, SelftestArgs,
    SurjectivityArgs, VerifyArgs,
};

pub const MAX_D: usize = 3;
pub const MAX_P: u32 = 3;
pub const MAX_ORDER: u32 = 30;
pub const MAX_DEGREE_BOUND: usize = 4;
pub const MAX_CASES: usize = 500;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub config: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub result: Value,
    #[serde(skip)]
    pub summary: Vec<String>,
}

struct Output {
    checks: Vec<Check>,
    result: Value,
    summary: Vec<String>,
}

impl Output {
    fn new(result: Value) -> Self {
        Output {
            checks: Vec::new(),
            result,
            summary: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::BuildSystem(_) => "build-system",
        Command::VerifyPeriods(_) => "verify-periods",
        Command::Fourier(_) => "fourier",
        Command::Membership(_) => "membership",
        Command::Scan(_) => "scan",
        Command::Surjectivity(_) => "surjectivity",
        Command::Selftest(_) => "selftest",
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let out = match &cli.command {
        Command::BuildSystem(a) => build_system(a)?,
        Command::VerifyPeriods(a) => verify_periods(a)?,
        Command::Fourier(a) => fourier(a)?,
        Command::Membership(a) => membership(a)?,
        Command::Scan(a) => scan(a)?,
        Command::Surjectivity(a) => surjectivity(a)?,
        Command::Selftest(a) => selftest(a, cli.seed)?,
    };
    let passed = out.checks.iter().all(|c| c.passed);
    Ok(Report {
        command: command_name(&cli.command),
        seed: cli.seed,
        config: serde_json::to_value(&cli.command)?,
        checks: out.checks,
        passed,
        result: out.result,
        summary: out.summary,
    })
}

pub fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    if let Some(dir) = &cli.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}.json", report.command));
        fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.json {
        print!("{text}");
    } else {
        for line in &report.summary {
            println!("{line}");
        }
        for c in &report.checks {
            println!("{}: {}", c.name, if c.passed { "yes" } else { "no" });
        }
    }
    Ok(())
}

fn model(args: &ModelArgs) -> Result<ModelSpec> {
    if args.d == 0 || args.d > MAX_D {
        bail!("--d must lie in 1..={MAX_D}");
    }
    let ordering = match args.ordering {
        Ordering::InteriorFirst => BasisOrdering::InteriorFirst,
        Ordering::Grlex => BasisOrdering::GradedLex,
    };
    Ok(build_projective_model(args.d, ordering)?)
}

fn check_p(p: u32) -> Result<()> {
    if p > MAX_P {
        bail!("--p must lie in 0..={MAX_P}");
    }
    Ok(())
}

fn check_degree_bound(b: usize) -> Result<()> {
    if !(2..=MAX_DEGREE_BOUND).contains(&b) {
        bail!("--degree-bound must lie in 2..={MAX_DEGREE_BOUND}");
    }
    Ok(())
}

fn build_system(a: &BuildArgs) -> Result<Output> {
    check_p(a.p)?;
    check_degree_bound(a.degree_bound)?;
    let spec = model(&a.model)?;
    let rels = spec.lattice_relations(a.degree_bound);
    let sys = build_scalar_system(&spec, &rels, a.p)?;
    let mut vector_equations = None;
    let mut out = Output::new(Value::Null);
    out.line(format!("model: d = {}, n = {}, {} relations", spec.d(), spec.n(), rels.len()));
    out.line(format!("operators: {}", sys.operators.len()));
    for o in &sys.operators {
        out.line(format!("  [{}] {}: {}", o.family.name(), o.label, o.op));
    }
    if a.vector {
        if !(1..=2).contains(&a.p) {
            bail!("--vector needs --p 1 or --p 2");
        }
        let v = build_vector_system(&spec, &rels, a.p)?;
        vector_equations = Some(v.equations.len());
        out.line(format!("vector equations: {}", v.equations.len()));
        out.check("vector system derives from the base system", v.derivation_consistent());
    }
    out.result = json!({
        "model": spec.to_record(),
        "system": sys.to_record(),
        "vector_equations": vector_equations,
    });
    Ok(out)
}

fn verify_periods(a: &VerifyArgs) -> Result<Output> {
    check_p(a.p)?;
    check_degree_bound(a.degree_bound)?;
    if a.order > MAX_ORDER {
        bail!("--order must lie in 0..={MAX_ORDER}");
    }
    let spec = model(&a.model)?;
    let rels = spec.lattice_relations(a.degree_bound);
    let base = period_series(&spec, a.order);
    let (sys, series) = if a.p == 0 {
        (build_tautological_system(&spec, &rels)?, base)
    } else {
        let phi = derivative_generating_series(&base, a.p, a.order as i64)?;
        (build_scalar_system(&spec, &rels, a.p)?, phi)
    };
    let report = verify_annihilation(&sys, &series)?;
    let mut out = Output::new(Value::Null);
    out.line(format!("series terms: {}", series.poly().len()));
    out.line(format!("operators: {}", report.residuals.len()));
    out.line(format!("verified order: {}", report.verified_order));
    out.check(
        format!("all residuals vanish to order {}", report.verified_order),
        report.all_zero,
    );
    out.result = json!({
        "annihilation": report,
        "series": if a.emit_series { Some(series.to_record()) } else { None },
    });
    Ok(out)
}

fn fourier(a: &FourierArgs) -> Result<Output> {
    check_p(a.p)?;
    check_degree_bound(a.degree_bound)?;
    let spec = model(&a.model)?;
    let rels = spec.lattice_relations(a.degree_bound);
    let dual = build_scalar_system(&spec, &rels, a.p)?.fourier();
    let mut out = Output::new(Value::Null);
    out.line(format!("transformed operators: {}", dual.operators.len()));
    let comparison = if a.p == 1 {
        let cmp = compare_fourier_families(&spec, &rels, &dual)?;
        for f in &cmp.families {
            out.line(format!(
                "  {} ({}): {} produced, {} expected",
                f.family.name(),
                f.mode,
                f.produced,
                f.expected
            ));
        }
        out.check("matches reference Fourier generator families", cmp.all_match);
        Some(cmp)
    } else {
        out.line("reference generator families exist only for p = 1");
        None
    };
    out.result = json!({ "system": dual.to_record(), "comparison": comparison });
    Ok(out)
}

fn mode(m: Mode) -> SolveMode {
    match m {
        Mode::Full => SolveMode::Full,
        Mode::DegreeClass => SolveMode::DegreeClass,
    }
}

fn membership(a: &MembershipArgs) -> Result<Output> {
    let spec = model(&a.model)?;
    let point = match &a.point {
        Some(p) => SectionPoint::new(&spec, parse_scalars(p)?)?,
        None => SectionPoint::fermat(&spec),
    };
    let alpha = parse_alpha(&a.alpha, spec.n())?;
    let query = derivative_query(&spec, &alpha)?;
    let solve_mode = mode(a.mode);
    let outcome = membership_test(&spec, &point, &query, solve_mode)?;
    let coords: Vec<String> = point.coords().iter().map(format_scalar).collect();
    let mut out = Output::new(Value::Null);
    out.line(format!("query: {}", query.poly()));
    out.line(format!("point: ({})", coords.join(", ")));
    out.line(format!("verdict: {}", outcome.verdict()));
    let detail = match &outcome {
        MembershipOutcome::Member(cert) => {
            for (i, q) in cert.q.iter().enumerate() {
                out.line(format!("q{i} = {q}"));
            }
            out.check("certificate verified", verify_certificate(&spec, &point, &query, cert));
            json!({ "certificate": cert.to_record() })
        }
        MembershipOutcome::NonMember(w) => {
            out.line(format!("note: {NON_MEMBER_CAVEAT}"));
            out.check("witness verified", verify_witness(&spec, &point, &query, solve_mode, w)?);
            json!({ "witness": w, "caveat": NON_MEMBER_CAVEAT })
        }
    };
    // For the conic family a member must have a vanishing closed-form derivative.
    let mut closed_form = None;
    if spec.d() == 1 && a.model.ordering == Ordering::InteriorFirst && alpha.iter().sum::<u32>() == 1 {
        if let Ok(r) = closed_form_derivatives_at(point.coords()) {
            let i = alpha.iter().position(|&x| x == 1).expect("unit multi-index");
            let vanishes = r.derivatives[i].vanishes;
            out.line(format!(
                "closed-form prefactor of d/da{i}: {}",
                r.derivatives[i].prefactor_value
            ));
            out.check("consistent with the closed-form derivative", !outcome.is_member() || vanishes);
            closed_form = Some(r);
        }
    }
    out.result = json!({
        "query": query.poly().to_string(),
        "alpha": alpha,
        "point": coords,
        "verdict": outcome.verdict(),
        "detail": detail,
        "closed_form": closed_form,
    });
    Ok(out)
}

fn scan(a: &ScanArgs) -> Result<Output> {
    let spec = model(&a.model)?;
    let alpha = parse_alpha(&a.alpha, spec.n())?;
    let query = derivative_query(&spec, &alpha)?;
    let (base, direction, params) = parse_line(&a.line)?;
    let samples = scan_family(
        &spec,
        &query,
        &ScanLine {
            base,
            direction,
            params,
        },
    )?;
    let mut out = Output::new(Value::Null);
    out.line(format!("query: {}", query.poly()));
    for s in &samples {
        out.line(format!("t = {}: {}", s.t, s.verdict));
    }
    out.result = json!({ "query": query.poly().to_string(), "samples": samples });
    Ok(out)
}

fn surjectivity(a: &SurjectivityArgs) -> Result<Output> {
    let dims: Vec<usize> = match a.d {
        Some(d) if (1..=MAX_D).contains(&d) => vec![d],
        Some(_) => bail!("--d must lie in 1..={MAX_D}"),
        None => (1..=MAX_D).collect(),
    };
    if !(2..=MAX_PRODUCT_DEGREE).contains(&a.max_total) {
        bail!("--max-total must lie in 2..={MAX_PRODUCT_DEGREE}");
    }
    if !(1..=MAX_PRODUCT_DEGREE).contains(&a.max_p) {
        bail!("--max-p must lie in 1..={MAX_PRODUCT_DEGREE}");
    }
    let mut out = Output::new(Value::Null);
    let mut maps = Vec::new();
    let mut filtration = Vec::new();
    for &d in &dims {
        let spec = build_projective_model(d, BasisOrdering::InteriorFirst)?;
        for k in 1..a.max_total {
            for l in 1..=(a.max_total - k) {
                let s = spec.multiplication_surjectivity(k, l)?;
                out.check(format!("d={d} k={k} l={l} multiplication surjective"), s.is_surjective());
                maps.push(json!({ "d": d, "k": k, "l": l, "result": s }));
            }
        }
        if d <= 2 {
            for p in 1..=a.max_p {
                let f = filtration_generators(&spec, p)?;
                out.check(format!("d={d} p={p} filtration generated"), f.spanning);
                filtration.push(json!({ "d": d, "check": f }));
            }
        }
    }
    out.result = json!({ "multiplication": maps, "filtration": filtration });
    Ok(out)
}

fn selftest(a: &SelftestArgs, seed: u64) -> Result<Output> {
    if a.cases == 0 || a.cases > MAX_CASES {
        bail!("--cases must lie in 1..={MAX_CASES}");
    }
    let report = run_selftest(seed, a.cases);
    let mut out = Output::new(Value::Null);
    for p in &report.properties {
        out.check(
            format!("{} ({} cases, {} failures)", p.name, p.cases, p.failures),
            p.failures == 0,
        );
    }
    out.result = serde_json::to_value(&report)?;
    Ok(out)
}

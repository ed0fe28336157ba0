//! Executes one non-manifest command and records the result.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use superlie_core::engine::{
    consequence_space, identity_space, independent_monomials, is_identity, is_identity_general, spaces_equal,
    subs_relations_check, ConsequenceBounds, SubspaceBasis, Verdict, Witness, DEFAULT_DEGREE_CAP,
};
use superlie_core::grassmann::GrassmannContext;
use superlie_core::lang;
use superlie_core::supermatrix::eval_poly;
use superlie_core::{AlgebraSpec, Field, LiePoly, MultiDegree, SuperMatrix, Var};

use crate::args::{
    parse_var, AlgebraArgs, CheckArgs, Cli, Command, ConsequencesArgs, DegreeArgs, EqualArgs, KernelArgs, SubsArgs,
};
use crate::ids::Ids;
use crate::report::{CheckRecord, ComponentRecord, WitnessRecord};
use crate::CliError;

/// Shell-quotes tokens, leaving flag-like tokens such as `--p=3` bare.
pub fn quote(tokens: &[String]) -> String {
    let safe = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_alphanumeric() || b"-_=./:,@+%".contains(&b));
    tokens
        .iter()
        .map(|t| {
            if safe(t) {
                t.clone()
            } else if !t.contains('\'') {
                format!("'{t}'")
            } else {
                shlex::try_quote(t).map(|q| q.into_owned()).unwrap_or_else(|_| t.clone())
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses `tokens` (without the program name) as a single command.
pub fn parse_command(tokens: &[String]) -> Result<Command, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("superlie".to_string()).chain(tokens.iter().cloned()))
        .map_err(|e| CliError::Usage(e.to_string().trim_end().to_string()))?;
    Ok(cli.command)
}

/// Runs a command other than `verify`. `tokens` is the command line used
/// for replay strings.
pub fn execute(command: &Command, tokens: &[String], ids: &Ids) -> Result<CheckRecord, CliError> {
    let start = Instant::now();
    let mut record = match command {
        Command::Check(a) => check(a, ids)?,
        Command::Kernel(a) => kernel(a)?,
        Command::Consequences(a) => consequences(a, ids)?,
        Command::Equal(a) => equal(a, ids)?,
        Command::Subs(a) => subs(a, ids)?,
        Command::Verify(_) => return Err(CliError::Usage("verify cannot be nested".into())),
    };
    record.millis = start.elapsed().as_millis() as u64;
    record.input("command", quote(tokens));
    let expected = command.input().and_then(|i| i.expect).map(|o| o.as_str());
    record.expect(expected);
    if !record.passed {
        record.replay = Some(replay_command(tokens, ids.paths(), None));
    }
    Ok(record)
}

/// Checks the inputs of a command without running it: fields, names,
/// expressions, multidegrees and assignments.
pub fn validate(command: &Command, ids: &Ids) -> Result<(), CliError> {
    match command {
        Command::Check(a) => {
            let field = a.algebra.field.field()?;
            ids.resolve(&a.expr, field)?;
            if let Some(at) = &a.at {
                parse_assignment(at, field, a.algebra.unital)?;
            }
        }
        Command::Kernel(a) => {
            a.algebra.field.field()?;
            degree_of(&a.degree)?;
        }
        Command::Consequences(a) => {
            let field = a.field.field()?;
            generators(a, field, ids)?;
            match &a.contains {
                Some(c) => {
                    ids.resolve(c, field)?;
                    a.degree.get()?;
                }
                None => {
                    degree_of(&a.degree)?;
                }
            }
        }
        Command::Equal(a) => {
            degree_of(&a.degree)?;
            space_spec(&a.left, &a.algebra, ids)?;
            space_spec(&a.right, &a.algebra, ids)?;
        }
        Command::Subs(a) => {
            let field = a.algebra.field.field()?;
            if a.target.trim() == "kernel" {
                degree_of(&a.degree)?;
            } else {
                ids.resolve(&a.target, field)?;
            }
        }
        Command::Verify(_) => return Err(CliError::Usage("verify cannot be nested".into())),
    }
    Ok(())
}

/// `superlie <tokens> [--ids ...] [--expect ...]`.
pub fn replay_command(tokens: &[String], ids: &[PathBuf], expect: Option<&str>) -> String {
    let mut t = vec!["superlie".to_string()];
    t.extend(tokens.iter().cloned());
    for p in ids {
        if !tokens.iter().any(|x| x.starts_with("--ids")) {
            t.push(format!("--ids={}", p.display()));
        }
    }
    if let Some(e) = expect {
        t.push(format!("--expect={e}"));
    }
    quote(&t)
}

fn spec_of(a: &AlgebraArgs) -> Result<AlgebraSpec, CliError> {
    Ok(AlgebraSpec::new(a.field.field()?, a.unital))
}

fn algebra_tokens(a: &AlgebraArgs) -> Vec<String> {
    let mut t = a.field.tokens();
    if a.unital {
        t.push("--unital".into());
    }
    t
}

fn degree_of(d: &DegreeArgs) -> Result<MultiDegree, CliError> {
    d.get()?
        .ok_or_else(|| CliError::Usage("a multidegree is required: --multilinear N or --degree x:3,y:3,z1".into()))
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Identity => "identity",
        Verdict::NonIdentity(_) => "non-identity",
        Verdict::IdentityUpToBound(_) => "identity-up-to-bound",
    }
}

/// `x=((a, b), (d, c)); y=...`
pub fn format_assignment(asg: &BTreeMap<Var, SuperMatrix>) -> String {
    asg.iter().map(|(v, m)| format!("{v}={m}")).collect::<Vec<_>>().join("; ")
}

/// Inverse of [`format_assignment`]; matrices are read over `field`, in
/// the unital algebra when `unital` is set.
pub fn parse_assignment(text: &str, field: Field, unital: bool) -> Result<BTreeMap<Var, SuperMatrix>, CliError> {
    let ctx = GrassmannContext::new(field, unital, lang::max_generator_in(text).max(1));
    let mut out = BTreeMap::new();
    for part in text.split(';').filter(|p| !p.trim().is_empty()) {
        let (name, matrix) = part.split_once('=').ok_or_else(|| CliError::Parse {
            what: "assignment".into(),
            message: format!("expected `var=((a, b), (d, c))`, found {:?}", part.trim()),
        })?;
        let v = parse_var(name.trim()).ok_or_else(|| CliError::Parse {
            what: "assignment".into(),
            message: format!("bad variable {:?}", name.trim()),
        })?;
        let m = lang::parse_matrix(matrix, ctx).map_err(|e| CliError::Parse {
            what: format!("matrix for {v}"),
            message: e.to_string(),
        })?;
        if out.insert(v, m).is_some() {
            return Err(CliError::Parse {
                what: "assignment".into(),
                message: format!("{v} assigned twice"),
            });
        }
    }
    Ok(out)
}

fn witness_record(f: &LiePoly, w: &Witness, a: &AlgebraArgs) -> Result<WitnessRecord, CliError> {
    if !w.confirms(f)? {
        return Err(CliError::Engine(superlie_core::engine::EngineError::Internal(format!(
            "witness for {f} does not replay"
        ))));
    }
    let at = format_assignment(&w.assignment);
    let mut t = vec!["check".to_string(), f.to_string()];
    t.extend(algebra_tokens(a));
    t.push(format!("--at={at}"));
    Ok(WitnessRecord {
        replay: replay_command(&t, &[], Some("non-identity")),
        at,
        value: w.value.to_string(),
    })
}

fn check(a: &CheckArgs, ids: &Ids) -> Result<CheckRecord, CliError> {
    let mut spec = spec_of(&a.algebra)?;
    let field = spec.field;
    let resolved = ids.resolve(&a.expr, field)?;
    let f = resolved.poly;
    let mut record = CheckRecord::new("check", "");
    record.input("expression", f.to_string());
    record.input("algebra", spec.to_string());
    record.notes.extend(resolved.warnings);

    if let Some(at) = &a.at {
        let asg = parse_assignment(at, field, a.algebra.unital)?;
        if let Some(v) = f.variables().into_iter().find(|v| !asg.contains_key(v)) {
            return Err(CliError::Usage(format!("--at does not assign {v}")));
        }
        let value = eval_poly(&f, &asg).map_err(superlie_core::engine::EngineError::from)?;
        record.input("at", format_assignment(&asg));
        if value.is_zero() {
            record.result = "vanishes-at-point".into();
        } else {
            record.result = "non-identity".into();
            let w = Witness { assignment: asg, value };
            record.witness = Some(witness_record(&f, &w, &a.algebra)?);
        }
        return Ok(record);
    }

    if f.total_degree() > a.cap {
        return Err(superlie_core::engine::EngineError::DegreeCap {
            degree: f.total_degree(),
            cap: a.cap,
        }
        .into());
    }
    if let Some(n) = a.generators {
        spec = spec.with_generators(n);
        record.input("algebra", spec.to_string());
    }
    let components = f.multidegree_components();
    let verdict = if components.len() > 1 {
        if field.is_finite() && spec.unital {
            record.notes.push(
                "over a finite field the multihomogeneous components of an identity of M11(E1) need not be identities; \
                 the verdict is for the whole expression"
                    .into(),
            );
        }
        for (d, g) in &components {
            let v = is_identity(g, &spec)?;
            record.components.push(ComponentRecord {
                multidegree: d.to_string(),
                expression: g.to_string(),
                result: verdict_name(&v).into(),
                witness: v.witness().map(|w| witness_record(g, w, &a.algebra)).transpose()?,
                bounds: match &v {
                    Verdict::IdentityUpToBound(b) => Some(b.clone()),
                    _ => None,
                },
            });
        }
        is_identity_general(&f, &spec)?
    } else {
        is_identity(&f, &spec)?
    };
    record.result = verdict_name(&verdict).into();
    if let Verdict::IdentityUpToBound(b) = &verdict {
        record.bounds = Some(b.clone());
    }
    if let Some(w) = verdict.witness() {
        record.witness = Some(witness_record(&f, w, &a.algebra)?);
    }
    Ok(record)
}

fn basis_strings(s: &SubspaceBasis) -> Vec<String> {
    s.basis().into_iter().map(|b| b.poly.to_string()).collect()
}

fn kernel(a: &KernelArgs) -> Result<CheckRecord, CliError> {
    let spec = spec_of(&a.algebra)?;
    let d = degree_of(&a.degree)?;
    let space = identity_space(&d, &spec, DEFAULT_DEGREE_CAP)?;
    let mut record = CheckRecord::new("kernel", "computed");
    record.input("algebra", spec.to_string());
    record.input("multidegree", d.to_string());
    record.dimension("component", independent_monomials(&d, spec.field).len());
    record.dimension("kernel", space.dim());
    record.bounds = space.bound().map(str::to_string);
    record.basis = Some(basis_strings(&space));
    Ok(record)
}

fn generators(a: &ConsequencesArgs, field: Field, ids: &Ids) -> Result<Vec<(String, LiePoly)>, CliError> {
    let mut gens = Vec::new();
    for g in &a.gens {
        let r = ids.resolve(g, field)?;
        gens.push((r.label, r.poly));
    }
    if let Some(path) = &a.gens_file {
        for i in Ids::all_in(path, field)? {
            gens.push((i.name, i.poly));
        }
    }
    if gens.is_empty() {
        return Err(CliError::Usage("no generators given".into()));
    }
    Ok(gens)
}

fn bounds_text(bounds: &ConsequenceBounds, space: &SubspaceBasis) -> String {
    match space.bound() {
        Some(note) => format!("{bounds}; {note}"),
        None => bounds.to_string(),
    }
}

fn consequences(a: &ConsequencesArgs, ids: &Ids) -> Result<CheckRecord, CliError> {
    let field = a.field.field()?;
    let gens = generators(a, field, ids)?;
    let target = a.contains.as_ref().map(|c| ids.resolve(c, field)).transpose()?;
    let d = match (a.degree.get()?, &target) {
        (Some(d), _) => d,
        (None, Some(t)) => t.poly.multidegree().ok_or_else(|| {
            CliError::Usage(format!("{} is not multihomogeneous; give --degree", t.poly))
        })?,
        (None, None) => return Err(CliError::Usage("a multidegree or --contains is required".into())),
    };
    let bounds = a.bounds.bounds();
    let space = consequence_space(&gens, &d, field, bounds)?;
    let mut record = CheckRecord::new("consequences", "computed");
    record.input("field", field.to_string());
    record.input("generators", gens.iter().map(|g| g.0.as_str()).collect::<Vec<_>>().join(", "));
    record.input("multidegree", d.to_string());
    record.dimension("component", independent_monomials(&d, field).len());
    record.dimension("consequences", space.dim());
    record.bounds = Some(bounds_text(&bounds, &space));
    match target {
        Some(t) => {
            record.input("expression", t.poly.to_string());
            record.notes.extend(t.warnings);
            let m = space.contains(&t.poly)?;
            record.result = if m.member { "consequence" } else { "not-consequence" }.into();
            if m.member {
                record.certificate = Some(m.certificate.iter().map(|(c, s)| format!("{c} * {}", s.label)).collect());
            }
        }
        None => record.basis = Some(basis_strings(&space)),
    }
    Ok(record)
}

/// One side of `equal`.
enum SpaceSpec {
    Kernel(bool),
    Zero,
    Consequences(Vec<(String, LiePoly)>),
}

fn space_spec(text: &str, a: &AlgebraArgs, ids: &Ids) -> Result<SpaceSpec, CliError> {
    let t = text.trim();
    match t {
        "kernel" => return Ok(SpaceSpec::Kernel(a.unital)),
        "kernel(E)" => return Ok(SpaceSpec::Kernel(false)),
        "kernel(E1)" => return Ok(SpaceSpec::Kernel(true)),
        "zero" => return Ok(SpaceSpec::Zero),
        _ => {}
    }
    let names = t.strip_prefix("consequences(").and_then(|r| r.strip_suffix(')')).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown space {t:?}: expected kernel, kernel(E), kernel(E1), zero or consequences(a,b,...)"
        ))
    })?;
    let field = a.field.field()?;
    let mut gens = Vec::new();
    for n in names.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let r = ids.resolve(n, field)?;
        gens.push((r.label, r.poly));
    }
    if gens.is_empty() {
        return Err(CliError::Usage(format!("{t}: no generators")));
    }
    Ok(SpaceSpec::Consequences(gens))
}

fn space_of(spec: &SpaceSpec, d: &MultiDegree, field: Field, bounds: ConsequenceBounds) -> Result<SubspaceBasis, CliError> {
    Ok(match spec {
        SpaceSpec::Kernel(unital) => identity_space(d, &AlgebraSpec::new(field, *unital), DEFAULT_DEGREE_CAP)?,
        SpaceSpec::Zero => SubspaceBasis::new(field, d.clone()),
        SpaceSpec::Consequences(gens) => consequence_space(gens, d, field, bounds)?,
    })
}

fn equal(a: &EqualArgs, ids: &Ids) -> Result<CheckRecord, CliError> {
    let d = degree_of(&a.degree)?;
    let bounds = a.bounds.bounds();
    let field = a.algebra.field.field()?;
    let left = space_of(&space_spec(&a.left, &a.algebra, ids)?, &d, field, bounds)?;
    let right = space_of(&space_spec(&a.right, &a.algebra, ids)?, &d, field, bounds)?;
    let eq = spaces_equal(&left, &right)?;
    let mut record = CheckRecord::new("equal", if eq { "spaces-equal" } else { "spaces-differ" });
    record.input("algebra", spec_of(&a.algebra)?.to_string());
    record.input("left", a.left.trim());
    record.input("right", a.right.trim());
    record.input("multidegree", d.to_string());
    record.dimension("component", independent_monomials(&d, left.field()).len());
    record.dimension("left", left.dim());
    record.dimension("right", right.dim());
    let notes: Vec<&str> = [left.bound(), right.bound()].into_iter().flatten().collect();
    if !notes.is_empty() {
        record.bounds = Some(notes.join("; "));
    }
    Ok(record)
}

fn subs(a: &SubsArgs, ids: &Ids) -> Result<CheckRecord, CliError> {
    let spec = spec_of(&a.algebra)?;
    let x1 = a
        .x1
        .as_deref()
        .map(|v| parse_var(v).ok_or_else(|| CliError::Usage(format!("bad variable {v:?}"))))
        .transpose()?;
    let mut record = CheckRecord::new("subs", "");
    record.input("algebra", spec.to_string());
    let targets: Vec<LiePoly> = if a.target.trim() == "kernel" {
        let d = degree_of(&a.degree)?;
        record.input("multidegree", d.to_string());
        let space = identity_space(&d, &spec, DEFAULT_DEGREE_CAP)?;
        space.basis().into_iter().map(|b| b.poly.clone()).collect()
    } else {
        let r = ids.resolve(&a.target, spec.field)?;
        record.input("expression", r.poly.to_string());
        vec![r.poly]
    };
    let mut solutions = 0;
    let mut holds = !targets.is_empty();
    for f in &targets {
        let r = subs_relations_check(f, x1)?;
        solutions += r.cases.iter().map(|c| c.solutions).sum::<usize>();
        if !r.holds() {
            holds = false;
            if !r.identity {
                record.notes.push(format!("{f}: not an identity of M11(E1)"));
            }
            for c in &r.cases {
                if !c.expressible {
                    record.notes.push(format!("{f}: no normal form for x_k = {}", c.k));
                }
                record.notes.extend(c.failures.iter().map(|m| format!("{f}: x_k = {}: {m}", c.k)));
            }
        }
    }
    record.dimension("polynomials", targets.len());
    record.dimension("solutions", solutions);
    record.result = if holds { "relations-hold" } else { "relations-fail" }.into();
    Ok(record)
}

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::str::FromStr;

use kgraph_core::alignment::DEFAULT_CLOSURE_BUDGET;
use kgraph_core::boundary::DEFAULT_CONSTRUCTION_STEPS;
use kgraph_core::exhaustive::DEFAULT_SUBSET_BUDGET;
use kgraph_core::repn::{
    boundary_rep, canonical_windows, expectation_contraction_check, faithful_on_core_check, gap_product,
    gauge_average_check, gauge_unitary_check, matrix_unit_check, sample_torus, shift_gaps_check, verify_family,
    CheckOutcome, Complex, Rational, UniquenessCertificate,
};
use kgraph_core::satiation::show_family;
use kgraph_core::{
    CKFamily, ExhaustiveStatus, FamilyCollection, FormalElement, KGraph, Membership, Path, PathFamily, Scalar,
    Universe, Window,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::format::{parse_graph, MatrixBundle};
use crate::report::{CheckResult, Report, Status};
use crate::{Backend, BoundaryCommand, CliError, Command, ExhaustiveCommand, Generators, Options, RunConfig};

type Outcome = Result<(Vec<CheckResult>, Value), CliError>;

/// Runs one command and returns its report and exit code.
pub fn run(config: &RunConfig) -> (Report, i32) {
    let outcome = match config.options.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(config)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => execute(config),
    };
    let (results, output, code) = match outcome {
        Ok((results, output)) => {
            let ok = results.iter().all(|r| matches!(r.status, Status::Pass | Status::Skip));
            (results, output, if ok { 0 } else { 1 })
        }
        Err(e) => {
            let code = e.exit_code();
            (vec![CheckResult::new("error", Status::Fail).witness(e.to_string())], Value::Null, code)
        }
    };
    let report = Report {
        command: command_name(&config.command).to_string(),
        config: serde_json::to_value(config).expect("configs always serialise"),
        results,
        output,
        seed: config.options.seed,
    };
    (report, code)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Paths { .. } => "paths",
        Command::Mce { .. } => "mce",
        Command::Ext { .. } => "ext",
        Command::PiClosure { .. } => "pi-closure",
        Command::Exhaustive(ExhaustiveCommand::Check { .. }) => "exhaustive check",
        Command::Exhaustive(ExhaustiveCommand::Enumerate { .. }) => "exhaustive enumerate",
        Command::Satiate(_) => "satiate",
        Command::Boundary(BoundaryCommand::List(_)) => "boundary list",
        Command::Boundary(BoundaryCommand::Construct { .. }) => "boundary construct",
        Command::Boundary(BoundaryCommand::Aperiodic { .. }) => "boundary aperiodic",
        Command::Boundary(BoundaryCommand::ConditionC(_)) => "boundary condition-c",
        Command::Represent(_) => "represent",
        Command::Verify { .. } => "verify",
    }
}

fn read(path: &std::path::Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn execute(config: &RunConfig) -> Outcome {
    let g = KGraph::new(parse_graph(&read(&config.graph)?)?)?;
    let opts = &config.options;
    if let Some(d) = &opts.depth {
        if d.rank() != g.rank() {
            return Err(CliError::Usage(format!("--depth has {} coordinates, the graph has rank {}", d.rank(), g.rank())));
        }
    }
    let budget = opts.budget.map(|b| b as usize);
    match &config.command {
        Command::Validate => {
            let shape = json!({
                "rank": g.rank(),
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "acyclic": g.is_acyclic(),
                "max_degree": g.max_degree().map(|d| d.coords().to_vec()),
            });
            Ok((vec![CheckResult::new("valid", Status::Pass)], shape))
        }
        Command::Paths { vertex } => {
            let vertices = match vertex {
                Some(name) => vec![vertex_id(&g, name)?],
                None => g.vertices().collect(),
            };
            let mut out = Map::new();
            for v in vertices {
                let paths = match (&opts.depth, g.is_acyclic()) {
                    (Some(d), _) => g.paths_up_to(v, d),
                    (None, true) => g.paths_from(v)?,
                    (None, false) => return Err(needs_depth()),
                };
                out.insert(g.vertex_name(v).to_string(), labels(&g, &paths));
            }
            Ok((vec![], Value::Object(out)))
        }
        Command::Mce { p, q } => {
            let found: Vec<Path> = g.mce(&path(&g, p)?, &path(&g, q)?).into_iter().collect();
            Ok((vec![], labels(&g, &found)))
        }
        Command::Ext { mu, family: e } => {
            let ext = g.ext(&path(&g, mu)?, &family(&g, e)?)?;
            Ok((vec![], labels(&g, &ext.iter().cloned().collect::<Vec<_>>())))
        }
        Command::PiClosure { paths } => {
            let seed: BTreeSet<Path> = paths.iter().map(|p| path(&g, p)).collect::<Result<_, _>>()?;
            let closed: Vec<Path> = g.pi_closure(&seed, budget.unwrap_or(DEFAULT_CLOSURE_BUDGET))?.into_iter().collect();
            Ok((vec![], labels(&g, &closed)))
        }
        Command::Exhaustive(ExhaustiveCommand::Check { family: e }) => {
            let verdict = g.is_exhaustive(&family(&g, e)?, opts.depth.as_ref());
            let status = match verdict.status {
                ExhaustiveStatus::Exhaustive => Status::Pass,
                ExhaustiveStatus::NotExhaustive => Status::Fail,
                ExhaustiveStatus::Unknown => Status::Unknown,
            };
            let mut result = CheckResult::new("exhaustive", status);
            if let Some(w) = &verdict.witness {
                result = result.witness(g.show(w).to_string());
            }
            Ok((vec![result], json!({ "searched_depth": verdict.searched_depth.coords() })))
        }
        Command::Exhaustive(ExhaustiveCommand::Enumerate { vertex }) => {
            let v = vertex_id(&g, vertex)?;
            let depth = match (&opts.depth, g.max_degree()) {
                (Some(d), _) => d.clone(),
                (None, Some(m)) => m.clone(),
                (None, None) => return Err(needs_depth()),
            };
            let found =
                g.fe_enumerate(v, &depth, opts.max_size.unwrap_or(usize::MAX), budget.unwrap_or(DEFAULT_SUBSET_BUDGET))?;
            Ok((vec![], families(&g, found.iter())))
        }
        Command::Satiate(gens) => {
            let u = universe(&g, opts)?;
            let s = satiation(&u, gens, budget)?;
            let results = vec![CheckResult::pass_if("satiated", u.is_satiated(&s)?)];
            let out = json!({
                "members": families(&g, s.iter()),
                "minimal": families(&g, s.minimal().iter()),
            });
            Ok((results, out))
        }
        Command::Boundary(BoundaryCommand::List(gens)) => {
            let u = universe(&g, opts)?;
            let s = satiation(&u, gens, budget)?;
            let xs: Vec<Path> = u.all_boundary_paths(&s)?.into_iter().map(|x| x.into_path()).collect();
            Ok((vec![], labels(&g, &xs)))
        }
        Command::Boundary(BoundaryCommand::Construct { generators, vertex, avoid }) => {
            let u = universe(&g, opts)?;
            let s = satiation(&u, generators, budget)?;
            let v = vertex_id(&g, vertex)?;
            let avoid = avoid.as_deref().map(|f| family(&g, f)).transpose()?;
            let x = u.construct_boundary_with_budget(v, &s, avoid.as_ref(), opts.budget.unwrap_or(DEFAULT_CONSTRUCTION_STEPS))?;
            let mut results = vec![CheckResult::pass_if("boundary path", u.is_boundary(&s, x.path())?)];
            if let Some(f) = &avoid {
                let hit = f.iter().find(|lam| g.has_prefix(x.path(), lam));
                let mut r = CheckResult::pass_if("avoids the family", hit.is_none());
                if let Some(lam) = hit {
                    r = r.witness(g.show(lam).to_string());
                }
                results.push(r);
            }
            Ok((results, json!(g.show(x.path()).to_string())))
        }
        Command::Boundary(BoundaryCommand::Aperiodic { path: p }) => {
            let x = path(&g, p)?;
            let status = match (g.is_acyclic(), &opts.depth) {
                (true, _) => Some(g.is_aperiodic_path(&x)?),
                (false, Some(d)) => g.is_aperiodic_path_bounded(&x, d),
                (false, None) => return Err(needs_depth()),
            };
            let status = match status {
                Some(true) => Status::Pass,
                Some(false) => Status::Fail,
                None => Status::Unknown,
            };
            Ok((vec![CheckResult::new("aperiodic", status)], Value::Null))
        }
        Command::Boundary(BoundaryCommand::ConditionC(gens)) => {
            let u = universe(&g, opts)?;
            let s = satiation(&u, gens, budget)?;
            let report = u.condition_c(&s)?;
            let requirement = |(v, f): &(kgraph_core::VertexId, Option<PathFamily>)| match f {
                Some(f) => format!("{} avoiding {}", g.vertex_name(*v), show_family(&g, f)),
                None => g.vertex_name(*v).to_string(),
            };
            let mut result = CheckResult::pass_if("condition (C)", report.holds());
            if !report.failures.is_empty() {
                result = result.witness(report.failures.iter().map(requirement).collect::<Vec<_>>().join("; "));
            }
            let witnesses: Map<String, Value> =
                report.witnesses.iter().map(|(k, x)| (requirement(k), json!(g.show(x).to_string()))).collect();
            Ok((vec![result], Value::Object(witnesses)))
        }
        Command::Represent(gens) => {
            let u = universe(&g, opts)?;
            let s = satiation(&u, gens, budget)?;
            let bundle = match opts.backend {
                Backend::Exact => MatrixBundle::from_family(&g, &boundary_rep::<Rational>(&u, &s)?, "exact"),
                Backend::Float => MatrixBundle::from_family(&g, &boundary_rep::<Complex>(&u, &s)?, "float"),
            };
            Ok((vec![], serde_json::to_value(bundle).expect("bundles always serialise")))
        }
        Command::Verify { generators, family: bundle, all } => {
            let u = universe(&g, opts)?;
            let gens = generator_collection(&u, generators)?;
            let s = satiate(&u, &gens, budget)?;
            let bundle: Option<MatrixBundle> = match bundle {
                Some(file) => Some(serde_json::from_str(&read(file)?).map_err(|e| CliError::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                })?),
                None => None,
            };
            let backend = match &bundle {
                Some(b) if b.backend == "exact" => Backend::Exact,
                Some(b) if b.backend == "float" => Backend::Float,
                Some(b) => return Err(CliError::Usage(format!("unknown backend `{}` in the bundle", b.backend))),
                None => opts.backend,
            };
            let ctx = Verify { u: &u, gens: &gens, s: &s, bundle: bundle.as_ref(), all: *all, seed: opts.seed };
            let results = match backend {
                Backend::Exact => ctx.run::<Rational>()?,
                Backend::Float => ctx.run::<Complex>()?,
            };
            Ok((results, Value::Null))
        }
    }
}

fn needs_depth() -> CliError {
    CliError::Usage("the graph has cycles; pass --depth".into())
}

fn vertex_id(g: &KGraph, name: &str) -> Result<kgraph_core::VertexId, CliError> {
    g.vertex_id(name).ok_or_else(|| kgraph_core::Error::UnknownId(name.to_string()).into())
}

fn path(g: &KGraph, text: &str) -> Result<Path, CliError> {
    Ok(g.parse_path(text)?)
}

fn family(g: &KGraph, text: &str) -> Result<PathFamily, CliError> {
    let members = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| path(g, p))
        .collect::<Result<Vec<_>, _>>()?;
    if members.is_empty() {
        return Err(CliError::Usage(format!("family `{text}` is empty")));
    }
    Ok(PathFamily::from_paths(members)?)
}

fn labels(g: &KGraph, paths: &[Path]) -> Value {
    Value::Array(paths.iter().map(|p| json!(g.show(p).to_string())).collect())
}

fn families<'a>(g: &KGraph, fams: impl Iterator<Item = &'a PathFamily>) -> Value {
    Value::Array(fams.map(|f| json!(show_family(g, f))).collect())
}

/// The exact universe when the graph is finite and no window is given,
/// otherwise the window from the options.
fn universe<'g>(g: &'g KGraph, opts: &Options) -> Result<Universe<'g>, CliError> {
    let budget = opts.budget.map_or(DEFAULT_SUBSET_BUDGET, |b| b as usize);
    let depth = match (&opts.depth, g.max_degree()) {
        (Some(d), _) => d.clone(),
        (None, Some(_)) if opts.max_size.is_none() => return Ok(Universe::exact(g)?),
        (None, Some(m)) => m.clone(),
        (None, None) => return Err(needs_depth()),
    };
    Ok(Universe::new(g, Window::new(depth, opts.max_size), budget)?)
}

fn generator_collection(u: &Universe<'_>, gens: &Generators) -> Result<FamilyCollection, CliError> {
    let fams = gens.generators.iter().map(|f| family(u.graph(), f)).collect::<Result<Vec<_>, _>>()?;
    Ok(u.collection(fams)?)
}

fn satiate(u: &Universe<'_>, gens: &FamilyCollection, budget: Option<usize>) -> Result<FamilyCollection, CliError> {
    Ok(match budget {
        Some(rounds) => u.satiate_with_budget(gens, rounds)?,
        None => u.satiate(gens)?,
    })
}

fn satiation(u: &Universe<'_>, gens: &Generators, budget: Option<usize>) -> Result<FamilyCollection, CliError> {
    satiate(u, &generator_collection(u, gens)?, budget)
}

fn outcome_result(o: &CheckOutcome) -> CheckResult {
    let mut r = CheckResult::pass_if(o.name.clone(), o.passed).deviation(o.deviation);
    if let Some(w) = &o.witness {
        r = r.witness(w.clone());
    }
    r
}

struct Verify<'a, 'g> {
    u: &'a Universe<'g>,
    gens: &'a FamilyCollection,
    s: &'a FamilyCollection,
    bundle: Option<&'a MatrixBundle>,
    all: bool,
    seed: u64,
}

impl Verify<'_, '_> {
    fn run<S: Scalar + FromStr + Display>(&self) -> Result<Vec<CheckResult>, CliError> {
        let (u, s) = (self.u, self.s);
        let g = u.graph();
        let t: CKFamily<S> = match self.bundle {
            Some(b) => b.to_family(g)?,
            None => boundary_rep(u, s)?,
        };
        let mut results: Vec<CheckResult> = verify_family(g, &t, self.gens)?.checks.iter().map(outcome_result).collect();
        if !self.all {
            return Ok(results);
        }
        let tol = S::TOLERANCE;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let ck = verify_family(g, &t, s)?;
        let mut r = outcome_result(ck.check("CK").expect("verify_family reports CK"));
        r.name = "CK over the satiation".into();
        results.push(r);

        let windows = canonical_windows(u, s);
        let verdict = faithful_on_core_check(u, s, &t, &windows)?;
        let mut a = CheckResult::pass_if("faithful on the core: matrix units", verdict.route_a);
        if let Some(w) = verdict.failures_a.first() {
            a = a.witness(w.clone());
        }
        let mut b = CheckResult::pass_if("faithful on the core: gap products", verdict.route_b);
        if let Some(w) = verdict.failures_b.first() {
            b = b.witness(w.clone());
        }
        results.extend([a, b, CheckResult::pass_if("faithful on the core: routes agree", verdict.agree())]);

        let mut units: Vec<CheckResult> = Vec::new();
        for seed in &windows {
            let pie = g.pi_closure(seed, DEFAULT_CLOSURE_BUDGET)?;
            for (i, o) in matrix_unit_check(g, &t, &pie)?.iter().enumerate() {
                let r = outcome_result(o);
                match units.get_mut(i) {
                    Some(prev) if prev.status == Status::Pass && r.status == Status::Fail => *prev = r,
                    Some(prev) => {
                        let worst = prev.deviation.unwrap_or(0.0).max(o.deviation);
                        prev.deviation = Some(worst);
                    }
                    None => units.push(r),
                }
            }
        }
        results.extend(units);

        if self.bundle.is_none() && u.is_exact() {
            let mut r = CheckResult::new("gap products vanish exactly on the satiation", Status::Pass);
            for e in u.iter() {
                let zero = gap_product(g, &t, e.range(), e.iter())?.max_abs() <= tol;
                if zero != (u.member(e, s) == Membership::Yes) {
                    r = CheckResult::new(r.name, Status::Fail).witness(u.show(e));
                    break;
                }
            }
            results.push(r);
        }

        let fams: Vec<&PathFamily> = u.iter().collect();
        let mut worst: f64 = 0.0;
        let mut witness = None;
        for _ in 0..50.min(fams.len() * 4) {
            let e = fams.choose(&mut rng).expect("nonempty");
            let mu = u.window_paths(e.range()).choose(&mut rng).expect("the vertex itself is a path");
            let dev = shift_gaps_check(g, &t, e, mu)?;
            if dev > tol && witness.is_none() {
                witness = Some(format!("E = {}, mu = {}", u.show(e), g.show(mu)));
            }
            worst = worst.max(dev);
        }
        let mut r = CheckResult::pass_if("shift of gap products", witness.is_none()).deviation(worst);
        if let Some(w) = witness {
            r = r.witness(w);
        }
        results.push(r);

        let tc = t.to_complex();
        let pool = formal_pool(u);
        if tc.basis().is_some() {
            let dev = gauge_unitary_check(&tc, &sample_torus(g.rank(), 8, rng.gen()))?;
            results.push(CheckResult::pass_if("gauge unitaries", dev <= 1e-12).deviation(dev));
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                worst = worst.max(gauge_average_check(g, &tc, &random_formal(&pool, &mut rng, 10))?);
            }
            results.push(CheckResult::pass_if("gauge expectation is the average", worst <= 1e-9).deviation(worst));
        } else {
            results.push(CheckResult::new("gauge unitaries", Status::Skip).witness("family has no path basis"));
        }

        if !u.is_exact() {
            results.push(CheckResult::new("condition (C)", Status::Skip).witness("window is not exact"));
            return Ok(results);
        }
        let c = u.condition_c(s)?;
        if !c.holds() {
            let (v, _) = &c.failures[0];
            results.push(
                CheckResult::new("condition (C)", Status::Skip)
                    .witness(format!("{} requirements fail, first at {}", c.failures.len(), g.vertex_name(*v))),
            );
            return Ok(results);
        }
        results.push(CheckResult::new("condition (C)", Status::Pass));
        match UniquenessCertificate::establish(u, s, &tc) {
            Ok(cert) => {
                let mut gap = f64::NEG_INFINITY;
                for _ in 0..20 {
                    let (lhs, rhs) = expectation_contraction_check(&cert, &tc, &random_formal(&pool, &mut rng, 10))?;
                    gap = gap.max(lhs - rhs);
                }
                results.push(CheckResult::pass_if("expectation contraction", gap <= 1e-9).deviation(gap.max(0.0)));
            }
            Err(e) => results.push(CheckResult::new("uniqueness hypotheses", Status::Fail).witness(e.to_string())),
        }
        Ok(results)
    }
}

fn formal_pool(u: &Universe<'_>) -> Vec<Path> {
    let g = u.graph();
    g.vertices().flat_map(|v| u.window_paths(v).iter().cloned()).collect()
}

/// Up to `terms` distinct terms `c t_lambda t_mu^*` with `s(lambda) = s(mu)`.
fn random_formal(pool: &[Path], rng: &mut ChaCha8Rng, terms: usize) -> FormalElement<Complex> {
    let mut a = FormalElement::zero();
    for _ in 0..terms * 4 {
        if a.terms().len() >= terms {
            break;
        }
        let lam = pool.choose(rng).expect("every graph has a vertex");
        let partners: Vec<&Path> = pool.iter().filter(|m| m.source() == lam.source()).collect();
        let mu = partners.choose(rng).expect("lambda partners itself");
        let c = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        a.add_term(lam.clone(), (*mu).clone(), c).expect("sources agree");
    }
    a
}

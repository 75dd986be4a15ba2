use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::family::CKFamily;
use super::formal::FormalElement;
use super::scalar::Scalar;
use super::sparse::SparseMatrix;
use crate::alignment::{PathFamily, DEFAULT_CLOSURE_BUDGET};
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::graph::{KGraph, VertexId};
use crate::path::Path;
use crate::satiation::{FamilyCollection, Membership, Universe};

/// One named relation check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Largest deviation seen over all instances.
    pub deviation: f64,
    /// The first failing instance.
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        CheckOutcome { name: name.to_string(), passed: true, deviation: 0.0, witness: None }
    }

    fn record(&mut self, deviation: f64, tolerance: f64, instance: impl FnOnce() -> String) {
        self.deviation = self.deviation.max(deviation);
        if deviation > tolerance {
            if self.passed {
                self.witness = Some(instance());
            }
            self.passed = false;
        }
    }

    fn fail(&mut self, instance: String) {
        if self.passed {
            self.witness = Some(instance);
        }
        self.passed = false;
    }
}

/// Outcome of [`verify_family`].
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub checks: Vec<CheckOutcome>,
    /// Whether every vertex projection vanishes.
    pub degenerate: bool,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn label(g: &KGraph, p: &Path) -> String {
    g.show(p).to_string()
}

/// Checks the Toeplitz-Cuntz-Krieger relations, the gap relation for every
/// generator, commutation of range projections, and that `t_v != 0` for
/// all `v` forces `t_lambda != 0` for all `lambda`.
///
/// For acyclic graphs every path must be present. For cyclic graphs the
/// relations are checked on the instances that stay inside the family's
/// window.
pub fn verify_family<S: Scalar>(g: &KGraph, t: &CKFamily<S>, generators: &FamilyCollection) -> Result<FamilyReport> {
    if let Ok(all) = g.all_paths() {
        if let Some(missing) = all.iter().find(|p| !t.contains(p)) {
            return Err(Error::IncompleteFamily(label(g, missing)));
        }
    }
    let tol = S::TOLERANCE;
    let paths: Vec<&Path> = t.paths().collect();
    let vertices: Vec<&Path> = paths.iter().copied().filter(|p| p.is_vertex()).collect();
    if vertices.len() != g.vertex_count() {
        return Err(Error::IncompleteFamily("vertex projections".into()));
    }

    let mut tck1 = CheckOutcome::new("TCK1");
    for &v in &vertices {
        let tv = t.t(v)?;
        tck1.record(tv.distance(&tv.adjoint()), tol, || format!("t_{} not self-adjoint", label(g, v)));
        tck1.record(tv.distance(&tv.matmul(tv)), tol, || format!("t_{} not idempotent", label(g, v)));
        for &w in &vertices {
            if v != w {
                let prod = tv.matmul(t.t(w)?);
                tck1.record(prod.max_abs(), tol, || format!("t_{} t_{} != 0", label(g, v), label(g, w)));
            }
        }
    }

    let mut tck2 = CheckOutcome::new("TCK2");
    for &l in &paths {
        for &m in paths.iter().filter(|m| m.range() == l.source()) {
            let lm = g.compose(l, m)?;
            if let Ok(target) = t.t(&lm) {
                let prod = t.t(l)?.matmul(t.t(m)?);
                tck2.record(prod.distance(target), tol, || format!("t_{} t_{} != t_{}", label(g, l), label(g, m), label(g, &lm)));
            }
        }
    }

    let mut tck3 = CheckOutcome::new("TCK3");
    for &l in &paths {
        for &m in paths.iter().filter(|m| m.range() == l.range()) {
            let pairs = g.lambda_min(l, m);
            let mut rhs = SparseMatrix::zeros(t.dim(), t.dim());
            let mut inside = true;
            for pair in &pairs {
                match (t.t(&pair.alpha), t.t(&pair.beta)) {
                    (Ok(a), Ok(b)) => rhs = rhs.plus(&a.matmul(&b.adjoint())),
                    _ => inside = false,
                }
            }
            if inside {
                let lhs = t.t(l)?.adjoint().matmul(t.t(m)?);
                tck3.record(lhs.distance(&rhs), tol, || format!("t_{}^* t_{}", label(g, l), label(g, m)));
            }
        }
    }

    let mut ck = CheckOutcome::new("CK");
    for e in generators.iter() {
        let gap = gap_product(g, t, e.range(), e.iter())?;
        ck.record(gap.max_abs(), tol, || format!("gap product of {}", crate::satiation::show_family(g, e)));
    }

    let mut commute = CheckOutcome::new("range projections commute");
    let projections: Vec<(&Path, SparseMatrix<S>)> =
        paths.iter().map(|&p| Ok((p, t.range_projection(p)?))).collect::<Result<_>>()?;
    for (i, (p, a)) in projections.iter().enumerate() {
        for (q, b) in &projections[i + 1..] {
            let dev = a.matmul(b).distance(&b.matmul(a));
            commute.record(dev, tol, || format!("{} and {}", label(g, p), label(g, q)));
        }
    }

    let mut nonvanishing = CheckOutcome::new("nonzero vertices give nonzero paths");
    let vertex_zero = |v: &Path| t.t(v).map(|m| m.max_abs() <= tol);
    let mut all_vertices_nonzero = true;
    for &v in &vertices {
        if vertex_zero(v)? {
            all_vertices_nonzero = false;
        }
    }
    if all_vertices_nonzero {
        for &p in &paths {
            if t.t(p)?.max_abs() <= tol {
                nonvanishing.fail(format!("t_{} = 0", label(g, p)));
            }
        }
    }
    let degenerate = vertices.iter().all(|v| vertex_zero(v).unwrap_or(true));

    Ok(FamilyReport { checks: vec![tck1, tck2, tck3, ck, commute, nonvanishing], degenerate })
}

/// `prod_{lambda in E} (t_v - t_lambda t_lambda^*)`, with the empty product
/// read as `t_v`.
pub fn gap_product<'a, S: Scalar>(
    g: &KGraph,
    t: &CKFamily<S>,
    v: VertexId,
    members: impl IntoIterator<Item = &'a Path>,
) -> Result<SparseMatrix<S>> {
    let tv = t.t(&g.vertex_path(v))?.clone();
    let mut out = tv.clone();
    for lam in members {
        out = out.matmul(&tv.minus(&t.range_projection(lam)?));
    }
    Ok(out)
}

/// `T^{Pi E}(lambda) = {nu not a vertex : lambda nu in Pi E}`.
pub fn tail_set(g: &KGraph, pie: &BTreeSet<Path>, lambda: &Path) -> BTreeSet<Path> {
    pie.iter()
        .filter(|p| p.degree() != lambda.degree() && g.has_prefix(p, lambda))
        .map(|p| g.segment(p, lambda.degree(), p.degree()).expect("lambda is a prefix"))
        .collect()
}

fn require_pair(g: &KGraph, pie: &BTreeSet<Path>, lambda: &Path, mu: &Path) -> Result<()> {
    let ok = pie.contains(lambda) && pie.contains(mu) && lambda.degree() == mu.degree() && lambda.source() == mu.source();
    if ok {
        Ok(())
    } else {
        Err(Error::PairNotInGrid(label(g, lambda), label(g, mu)))
    }
}

/// `Theta(t)_{lambda,mu} = t_lambda prod_{nu in T(lambda)} (t_{s(lambda)} - t_nu t_nu^*) t_mu^*`.
pub fn theta<S: Scalar>(g: &KGraph, t: &CKFamily<S>, pie: &BTreeSet<Path>, lambda: &Path, mu: &Path) -> Result<SparseMatrix<S>> {
    require_pair(g, pie, lambda, mu)?;
    let tails = tail_set(g, pie, lambda);
    let gap = gap_product(g, t, lambda.source(), tails.iter())?;
    Ok(t.t(lambda)?.matmul(&gap).matmul(&t.t(mu)?.adjoint()))
}

/// [`theta`] as a formal element, expanded with the formal product.
pub fn formal_theta<S: Scalar>(g: &KGraph, pie: &BTreeSet<Path>, lambda: &Path, mu: &Path) -> Result<FormalElement<S>> {
    require_pair(g, pie, lambda, mu)?;
    let s = g.vertex_path(lambda.source());
    let unit = FormalElement::term(s.clone(), s.clone(), S::one())?;
    let mut product = unit.clone();
    for nu in tail_set(g, pie, lambda) {
        let factor = unit.minus(&FormalElement::term(nu.clone(), nu, S::one())?);
        product = product.mul(g, &factor);
    }
    let left = FormalElement::term(lambda.clone(), s.clone(), S::one())?;
    let right = FormalElement::term(s, mu.clone(), S::one())?;
    Ok(left.mul(g, &product).mul(g, &right))
}

/// Checks `Theta_{lambda,mu}^* = Theta_{mu,lambda}`,
/// `Theta_{lambda,mu} Theta_{sigma,tau} = delta_{mu,sigma} Theta_{lambda,tau}`
/// and `t_lambda t_mu^* = sum_{lambda nu in Pi E} Theta_{lambda nu, mu nu}`
/// over the grid `Pi E x_{d,s} Pi E`.
pub fn matrix_unit_check<S: Scalar>(g: &KGraph, t: &CKFamily<S>, pie: &BTreeSet<Path>) -> Result<Vec<CheckOutcome>> {
    let tol = S::TOLERANCE;
    let grid = g.pairs_ds(pie);
    let thetas: BTreeMap<(Path, Path), SparseMatrix<S>> = grid
        .iter()
        .map(|(l, m)| Ok(((l.clone(), m.clone()), theta(g, t, pie, l, m)?)))
        .collect::<Result<_>>()?;
    let zero = SparseMatrix::zeros(t.dim(), t.dim());

    let mut adjoint = CheckOutcome::new("matrix units: adjoint");
    let mut product = CheckOutcome::new("matrix units: product");
    let mut expansion = CheckOutcome::new("matrix units: expansion");
    for ((l, m), th) in &thetas {
        let other = &thetas[&(m.clone(), l.clone())];
        adjoint.record(th.adjoint().distance(other), tol, || format!("({}, {})", label(g, l), label(g, m)));
        for ((s, tau), th2) in &thetas {
            let lhs = th.matmul(th2);
            let rhs = if m == s { thetas.get(&(l.clone(), tau.clone())).unwrap_or(&zero) } else { &zero };
            product.record(lhs.distance(rhs), tol, || {
                format!("({}, {}) x ({}, {})", label(g, l), label(g, m), label(g, s), label(g, tau))
            });
        }
        let mut sum = SparseMatrix::zeros(t.dim(), t.dim());
        for lnu in pie.iter().filter(|p| g.has_prefix(p, l)) {
            let nu = g.segment(lnu, l.degree(), lnu.degree())?;
            let mnu = g.compose(m, &nu)?;
            match thetas.get(&(lnu.clone(), mnu.clone())) {
                Some(piece) => sum = sum.plus(piece),
                None => expansion.fail(format!("{} in Pi E but {} is not", label(g, lnu), label(g, &mnu))),
            }
        }
        let direct = t.t(l)?.matmul(&t.t(m)?.adjoint());
        expansion.record(direct.distance(&sum), tol, || format!("t_{} t_{}^*", label(g, l), label(g, m)));
    }
    Ok(vec![adjoint, product, expansion])
}

/// The pairs of the grid where the universal matrix unit is nonzero:
/// those `(lambda, mu)` with `T^{Pi E}(lambda)` outside `s`.
pub fn nonzero_theta_pattern(u: &Universe<'_>, s: &FamilyCollection, pie: &BTreeSet<Path>) -> Result<BTreeSet<(Path, Path)>> {
    let g = u.graph();
    let mut out = BTreeSet::new();
    for (l, m) in g.pairs_ds(pie) {
        let tails = PathFamily::new(l.source(), tail_set(g, pie, &l))?;
        match u.member(&tails, s) {
            Membership::No => {
                out.insert((l, m));
            }
            Membership::Yes => {}
            Membership::Unknown => return Err(Error::InexactUniverse("nonzero_theta_pattern")),
        }
    }
    Ok(out)
}

/// Seeds `{v}` and `{v} u F` for every vertex `v` and every `F` in the
/// universe at `v` outside `s`.
pub fn canonical_windows(u: &Universe<'_>, s: &FamilyCollection) -> Vec<BTreeSet<Path>> {
    let g = u.graph();
    let mut out = Vec::new();
    for v in g.vertices() {
        let vp = g.vertex_path(v);
        out.push(BTreeSet::from([vp.clone()]));
        for f in u.at(v).iter().filter(|f| !s.contains(f)) {
            let mut seed: BTreeSet<Path> = f.iter().cloned().collect();
            seed.insert(vp.clone());
            out.push(seed);
        }
    }
    out
}

/// Both readings of faithfulness on the core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaithfulVerdict {
    /// Every matrix unit that is nonzero universally is nonzero in `t`.
    pub route_a: bool,
    /// Every `t_v` is nonzero and every gap product of a finite exhaustive
    /// set outside the collection is nonzero.
    pub route_b: bool,
    pub failures_a: Vec<String>,
    pub failures_b: Vec<String>,
}

impl FaithfulVerdict {
    pub fn agree(&self) -> bool {
        self.route_a == self.route_b
    }

    pub fn faithful(&self) -> bool {
        self.route_a && self.route_b
    }
}

/// Decides whether `t` is faithful on the core of the algebra of the
/// satiated collection `s`, in two ways. Route (a) runs over the closures
/// of the given seed sets.
pub fn faithful_on_core_check<S: Scalar>(
    u: &Universe<'_>,
    s: &FamilyCollection,
    t: &CKFamily<S>,
    windows: &[BTreeSet<Path>],
) -> Result<FaithfulVerdict> {
    let g = u.graph();
    let tol = S::TOLERANCE;
    let mut failures_a = Vec::new();
    for seed in windows {
        let pie = g.pi_closure(seed, DEFAULT_CLOSURE_BUDGET)?;
        for (l, m) in nonzero_theta_pattern(u, s, &pie)? {
            if theta(g, t, &pie, &l, &m)?.max_abs() <= tol {
                failures_a.push(format!("Theta_({}, {}) vanishes", label(g, &l), label(g, &m)));
            }
        }
    }
    let mut failures_b = Vec::new();
    for v in g.vertices() {
        if t.t(&g.vertex_path(v))?.max_abs() <= tol {
            failures_b.push(format!("t_{} = 0", g.vertex_name(v)));
        }
        for f in u.at(v).iter().filter(|f| !s.contains(f)) {
            if gap_product(g, t, v, f.iter())?.max_abs() <= tol {
                failures_b.push(format!("gap product of {} vanishes", u.show(f)));
            }
        }
    }
    Ok(FaithfulVerdict { route_a: failures_a.is_empty(), route_b: failures_b.is_empty(), failures_a, failures_b })
}

/// `|gap(E) t_mu t_mu^* - t_mu gap(Ext(mu; E)) t_mu^*|`, the largest entry.
pub fn shift_gaps_check<S: Scalar>(g: &KGraph, t: &CKFamily<S>, e: &PathFamily, mu: &Path) -> Result<f64> {
    let ext = g.ext(mu, e)?;
    let left = gap_product(g, t, e.range(), e.iter())?.matmul(&t.range_projection(mu)?);
    let tm = t.t(mu)?;
    let right = tm.matmul(&gap_product(g, t, mu.source(), ext.iter())?).matmul(&tm.adjoint());
    Ok(left.distance(&right))
}

/// Evidence that a family meets the hypotheses for uniqueness:
/// the relations hold, the family is faithful on the core, and condition
/// (C) holds.
#[derive(Clone, Debug)]
pub struct UniquenessCertificate {
    _private: (),
}

impl UniquenessCertificate {
    pub fn establish<S: Scalar>(
        u: &Universe<'_>,
        s: &FamilyCollection,
        t: &CKFamily<S>,
    ) -> Result<Self> {
        let report = verify_family(u.graph(), t, s)?;
        if !report.passed() {
            return Err(Error::HypothesisNotMet("family fails the relations".into()));
        }
        let verdict = faithful_on_core_check(u, s, t, &[])?;
        if !verdict.route_b {
            return Err(Error::HypothesisNotMet(format!("not faithful on the core: {:?}", verdict.failures_b)));
        }
        let c = u.condition_c(s)?;
        if !c.holds() {
            return Err(Error::HypothesisNotMet(format!("condition (C) fails at {} requirements", c.failures.len())));
        }
        Ok(UniquenessCertificate { _private: () })
    }
}

/// Operator norms of `Phi(a)` and `a` in `t`, where `Phi` is the gauge
/// expectation; the first never exceeds the second (up to `1e-9`).
pub fn expectation_contraction_check(
    _certificate: &UniquenessCertificate,
    t: &CKFamily<Complex64>,
    a: &FormalElement<Complex64>,
) -> Result<(f64, f64)> {
    let lhs = a.gauge_expectation().eval(t)?.operator_norm();
    let rhs = a.eval(t)?.operator_norm();
    if lhs > rhs + 1e-9 {
        return Err(Error::InvariantViolated(format!("|Phi(a)| = {lhs} > |a| = {rhs}")));
    }
    Ok((lhs, rhs))
}

/// `z^n = prod z_i^{n_i}`.
pub fn torus_power(z: &[Complex64], n: &Degree) -> Complex64 {
    z.iter().zip(n.coords()).map(|(zi, &ni)| zi.powu(ni)).product()
}

/// `count` pseudo-random points of the k-torus.
pub fn sample_torus(rank: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..rank)
                .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect()
        })
        .collect()
}

/// `U_z = diag(z^{d(x)})` over the path-labelled basis.
fn gauge_unitary(t: &CKFamily<Complex64>, z: &[Complex64]) -> Result<SparseMatrix<Complex64>> {
    let basis = t.basis().ok_or_else(|| Error::PreconditionFailed("family has no path basis".into()))?;
    Ok(SparseMatrix::from_triplets(
        t.dim(),
        t.dim(),
        basis.iter().enumerate().map(|(i, x)| (i, i, torus_power(z, x.degree()))),
    ))
}

/// Largest Frobenius norm of `U_z t_lambda U_z^* - z^{d(lambda)} t_lambda`
/// over the sampled `z` and all `lambda`.
pub fn gauge_unitary_check(t: &CKFamily<Complex64>, zs: &[Vec<Complex64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in zs {
        let u = gauge_unitary(t, z)?;
        let u_star = u.adjoint();
        for (lam, op) in t.operators() {
            let conj = u.matmul(op).matmul(&u_star);
            let scaled = op.scale(&torus_power(z, lam.degree()));
            worst = worst.max(conj.minus(&scaled).frobenius());
        }
    }
    Ok(worst)
}

/// Eight points `z_a = (w^{a g_1}, ..., w^{a g_k})`, `w = e^{2 pi i/8}`,
/// with `g` chosen so that `g . delta` is nonzero mod 8 for every nonzero
/// degree difference `delta` of `a`. Averaging `gamma_z` over these points
/// then keeps exactly the terms with `d(lambda) = d(mu)`.
pub fn gauge_lattice(rank: usize, a: &FormalElement<Complex64>) -> Result<Vec<Vec<Complex64>>> {
    const N: i64 = 8;
    let deltas: BTreeSet<Vec<i64>> = a
        .terms()
        .keys()
        .map(|(l, m)| l.degree().coords().iter().zip(m.degree().coords()).map(|(&x, &y)| x as i64 - y as i64).collect::<Vec<_>>())
        .filter(|d| d.iter().any(|&x| x != 0))
        .collect();
    let mut gen = vec![0i64; rank];
    let found = loop {
        let ok = deltas.iter().all(|d| d.iter().zip(&gen).map(|(x, y)| x * y).sum::<i64>().rem_euclid(N) != 0);
        if ok {
            break true;
        }
        // Next generator in base-N counting.
        let mut i = 0;
        while i < rank && gen[i] == N - 1 {
            gen[i] = 0;
            i += 1;
        }
        if i == rank {
            break false;
        }
        gen[i] += 1;
    };
    if !found {
        return Err(Error::PreconditionFailed("no 8-point lattice separates the degree differences".into()));
    }
    let w = Complex64::from_polar(1.0, std::f64::consts::TAU / N as f64);
    Ok((0..N).map(|step| gen.iter().map(|&gi| w.powi((step * gi) as i32)).collect()).collect())
}

/// Largest entry of `eval(Phi(a)) - mean_z U_z eval(a) U_z^*` over the
/// lattice of [`gauge_lattice`].
pub fn gauge_average_check(g: &KGraph, t: &CKFamily<Complex64>, a: &FormalElement<Complex64>) -> Result<f64> {
    let zs = gauge_lattice(g.rank(), a)?;
    let image = a.eval(t)?;
    let mut avg = SparseMatrix::zeros(t.dim(), t.dim());
    for z in &zs {
        let u = gauge_unitary(t, z)?;
        avg = avg.plus(&u.matmul(&image).matmul(&u.adjoint()));
    }
    let avg = avg.scale(&Complex64::new(1.0 / zs.len() as f64, 0.0));
    Ok(a.gauge_expectation().eval(t)?.distance(&avg))
}

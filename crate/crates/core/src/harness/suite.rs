//! Suite configuration, operator registry and the suite runner.

use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    asym_linf_projection, asym_lp_projection, classified_operator, difference_body_simplex, moment_power,
    moment_power_monte_carlo, phi_reflected, phi_simplex, phi_simplex_closed_form, phi_valuation, polar_body,
    radial_function, Body, Coefficients, DifferenceParams, Family, Mode, OperatorSpec, Sign,
};
use crate::operators::difference::difference_field;
use crate::polytope::Polytope;
use crate::probes;
use crate::scalar::{int, rat, to_f64, Num, Order, Rational, Value};
use crate::support::{homogeneity_check, subadditivity_check, SupportEval};
use crate::vector::Vector;

use super::checks::{
    check_equivariance, check_projection_property, check_valuation_identity,
    sublinearity_counterexample, CaseResult, Variance, Witness,
};
use super::generators::{
    default_lambdas, default_scales, generate_simplex_splits, generate_union_chain, rational_grid, transform_battery,
    Quadruple, SimplexSplit,
};
use super::par_map;

pub const SUITES: &[&str] = &[
    "closed-form",
    "counterexample",
    "difference-phi",
    "equivariance",
    "homogeneity",
    "limit",
    "lower-dimensional",
    "moment",
    "polar",
    "projection-property",
    "splits",
    "subadditivity",
    "valuation",
];

pub const FAMILY_GROUPS: &[&str] = &[
    "asym-linf",
    "asym-lp",
    "covariant-difference",
    "difference",
    "linf-contravariant",
    "linf-covariant",
    "lp-contravariant",
    "lp-covariant",
    "moment",
    "phi",
    "pi-o",
    "projection",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    pub families: Vec<String>,
    pub dims: Vec<usize>,
    pub lambdas: Vec<Num>,
    pub scales: Vec<Num>,
    pub probes: usize,
    /// Probe count for checks outside the split grid (chains, equivariance, homogeneity).
    pub light_probes: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub mc_samples: usize,
    pub chain_depth: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            families: FAMILY_GROUPS.iter().map(|s| s.to_string()).collect(),
            dims: vec![3, 4],
            lambdas: default_lambdas().into_iter().map(Num).collect(),
            scales: default_scales().into_iter().map(Num).collect(),
            probes: 500,
            light_probes: 100,
            seed: 20240917,
            tolerance: 1e-9,
            mc_samples: 1_000_000,
            chain_depth: 3,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let Some(s) = self.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return bad(format!("unknown suite {s:?}"));
        }
        if let Some(f) = self.families.iter().find(|f| !FAMILY_GROUPS.contains(&f.as_str())) {
            return bad(format!("unknown family {f:?}"));
        }
        if let Some(n) = self.dims.iter().find(|n| !(3..=4).contains(*n)) {
            return bad(format!("ambient dimension {n} outside 3..=4"));
        }
        if self.lambdas.iter().any(|l| !l.0.is_positive() || l.0 >= Rational::one()) {
            return bad("lambda values must lie in (0, 1)".into());
        }
        if self.scales.iter().any(|s| !s.0.is_positive()) {
            return bad("scales must be positive".into());
        }
        if self.probes == 0 || self.light_probes == 0 || self.mc_samples == 0 {
            return bad("probe and sample counts must be positive".into());
        }
        if !(1..=3).contains(&self.chain_depth) {
            return bad("chain_depth outside 1..=3".into());
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return bad("tolerance must be nonnegative".into());
        }
        Ok(())
    }

    fn runs(&self, suite: &str) -> bool {
        self.suites.iter().any(|s| s == suite)
    }

    fn has(&self, group: &str) -> bool {
        self.families.iter().any(|f| f == group)
    }

    fn probe_set(&self, n: usize) -> Vec<Vector> {
        probes_of_size(n, self.probes, self.seed)
    }

    fn light_probe_set(&self, n: usize) -> Vec<Vector> {
        probes_of_size(n, self.light_probes.min(self.probes), self.seed)
    }
}

/// Combinatorial probes first, then seeded random directions, `count` in total.
pub fn probes_of_size(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let combo = probes::combinatorial_probes(n).len();
    let mut out = probes::probe_set(n, count.saturating_sub(combo), seed);
    out.truncate(count);
    out
}

/// Result of one sub-suite.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub suite: String,
    pub pass: bool,
    pub cases: Vec<CaseResult>,
    pub elapsed_ms: u128,
}

impl Verdict {
    fn new(suite: &str, mut cases: Vec<CaseResult>, started: Instant) -> Self {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        Verdict {
            suite: suite.to_string(),
            pass: cases.iter().all(CaseResult::as_expected),
            cases,
            elapsed_ms: started.elapsed().as_millis(),
        }
    }

    pub fn witnesses(&self) -> Vec<(&str, &Witness)> {
        self.cases.iter().filter_map(|c| c.witness.as_ref().map(|w| (c.key.as_str(), w))).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Bundle {
    pub config: SuiteConfig,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
}

impl Bundle {
    pub fn verdict(&self, suite: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.suite == suite)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}

/// An operator of the registry with its equivariance type and expected valuation status.
#[derive(Clone, Debug)]
pub struct NamedOperator {
    pub group: &'static str,
    pub name: String,
    pub variance: Variance,
    pub spec: OperatorSpec,
    pub expect_valuation: bool,
}

impl NamedOperator {
    pub fn apply(&self, p: &Polytope) -> Result<Body> {
        classified_operator(&self.spec, p)
    }
}

fn nums(v: &[i64]) -> Vec<Num> {
    v.iter().map(|&x| Num(int(x))).collect()
}

fn some(v: Rational) -> Option<Num> {
    Some(Num(v))
}

/// The operators exercised by the valuation and equivariance suites in `R^n`.
pub fn operator_registry(n: usize) -> Vec<NamedOperator> {
    use Variance::{Contravariant as Contra, Covariant as Co};
    let mut out = Vec::new();
    let mut push = |group: &'static str, name: String, variance, spec: OperatorSpec, ok: bool| {
        out.push(NamedOperator { group, name, variance, spec, expect_valuation: ok });
    };
    push("projection", "projection".into(), Contra, OperatorSpec::new(Family::Projection), true);
    push("pi-o", "pi-o".into(), Contra, OperatorSpec::new(Family::PiO), true);
    for sign in [Sign::Plus, Sign::Minus] {
        for p in 1..=3 {
            let spec = OperatorSpec::new(Family::AsymLp).with_p(Order::Int(p)).with_sign(sign);
            push("asym-lp", format!("asym-lp{sign}[{p}]"), Contra, spec, true);
            let spec = OperatorSpec::new(Family::Moment).with_p(Order::Int(p)).with_sign(sign);
            push("moment", format!("moment{sign}[{p}]"), Co, spec, true);
        }
        push("asym-linf", format!("asym-linf{sign}"), Contra, OperatorSpec::new(Family::AsymLinf).with_sign(sign), true);
        let spec = OperatorSpec::new(Family::Moment).with_p(Order::Infinity).with_sign(sign);
        push("moment", format!("moment{sign}[inf]"), Co, spec, true);
    }
    for p in 1..=2 {
        let c = Coefficients { a1: some(int(1)), a2: some(int(3)), ..Default::default() };
        let spec = OperatorSpec::new(Family::Phi).with_p(Order::Int(p)).with_coefficients(c);
        push("phi", format!("phi[{p};1,3]"), Co, spec, true);
    }
    let monotone = |off: i64| nums(&(0..n as i64).map(|i| i / 2 + off).collect::<Vec<_>>());
    let c = Coefficients { a: Some(monotone(1)), b: Some(monotone(0)), ..Default::default() };
    push("linf-covariant", "linf-covariant".into(), Co, OperatorSpec::new(Family::LinfCovariant).with_coefficients(c), true);
    if n == 4 {
        let c = Coefficients { a: Some(nums(&[1, 3, 2, 4])), b: Some(nums(&[0, 0, 0, 0])), ..Default::default() };
        let spec = OperatorSpec::new(Family::LinfCovariant).with_coefficients(c).with_mode(Mode::Unchecked);
        push("linf-covariant", "linf-covariant-nonmonotone".into(), Co, spec, false);
    }
    let c = Coefficients { c1: some(int(1)), c2: some(int(2)), ..Default::default() };
    push("linf-contravariant", "linf-contravariant".into(), Contra, OperatorSpec::new(Family::LinfContravariant).with_coefficients(c), true);
    let c = Coefficients { c1: some(int(1)), c2: some(int(2)), c3: some(int(1)), c4: some(rat(1, 2)), ..Default::default() };
    let spec = OperatorSpec::new(Family::LpCovariant).with_p(Order::Int(2)).with_coefficients(c.clone());
    push("lp-covariant", "lp-covariant[2]".into(), Co, spec, true);
    if n >= 4 {
        let spec = OperatorSpec::new(Family::LpCovariant).with_p(Order::Int(1)).with_coefficients(c);
        push("lp-covariant", "lp-covariant[1]".into(), Co, spec, true);
    }
    let c = Coefficients { c1: some(int(1)), c2: some(rat(-1, 2)), c3: some(int(1)), ..Default::default() };
    let spec = OperatorSpec::new(Family::LpContravariant).with_p(Order::Int(1)).with_coefficients(c);
    push("lp-contravariant", "lp-contravariant[1]".into(), Contra, spec, true);
    let c = Coefficients { c1: some(int(2)), c2: some(int(1)), ..Default::default() };
    let spec = OperatorSpec::new(Family::LpContravariant).with_p(Order::Int(2)).with_coefficients(c);
    push("lp-contravariant", "lp-contravariant[2]".into(), Contra, spec, true);
    if n == 3 {
        let d = Coefficients { a1: some(int(0)), a2: some(int(1)), b1: some(int(0)), b2: some(int(1)), ..Default::default() };
        push("difference", "difference[0,1,0,1]".into(), Co, OperatorSpec::new(Family::Difference).with_coefficients(d), true);
        let c = Coefficients {
            c1: some(int(1)),
            c2: some(int(2)),
            a1: some(int(1)),
            a2: some(int(2)),
            b1: some(int(1)),
            b2: some(int(1)),
            ..Default::default()
        };
        let spec = OperatorSpec::new(Family::CovariantDifference).with_coefficients(c);
        push("covariant-difference", "covariant-difference".into(), Co, spec, true);
    }
    out
}

type FieldOp = Box<dyn Fn(&Polytope) -> Result<SupportEval> + Send + Sync>;

type Task<'a> = Box<dyn Fn() -> CaseResult + Send + Sync + 'a>;

fn run_tasks(tasks: Vec<Task<'_>>) -> Vec<CaseResult> {
    par_map(&tasks, |t| t())
}

fn error_case(key: String, expected_pass: bool, e: Error) -> CaseResult {
    CaseResult::new(key, expected_pass).fail(format!("error: {e}"))
}

/// Runs the configured sub-suites; an empty family list yields an empty bundle.
pub fn run_suite(config: &SuiteConfig) -> Result<Bundle> {
    config.validate()?;
    let mut verdicts = Vec::new();
    if !config.families.is_empty() {
        for suite in SUITES {
            if !config.runs(suite) {
                continue;
            }
            let started = Instant::now();
            let cases = match *suite {
                "splits" => splits_suite(config)?,
                "valuation" => valuation_suite(config)?,
                "equivariance" => equivariance_suite(config)?,
                "homogeneity" => homogeneity_suite(config)?,
                "lower-dimensional" => lower_dimensional_suite(config)?,
                "projection-property" => projection_property_suite(config)?,
                "polar" => polar_suite(config)?,
                "closed-form" => closed_form_suite(config)?,
                "difference-phi" => difference_phi_suite(config)?,
                "limit" => limit_suite(config)?,
                "moment" => moment_suite(config)?,
                "subadditivity" => subadditivity_suite(config)?,
                "counterexample" => counterexample_suite(config)?,
                _ => unreachable!(),
            };
            if !cases.is_empty() {
                verdicts.push(Verdict::new(suite, cases, started));
            }
        }
    }
    Ok(Bundle { config: config.clone(), pass: verdicts.iter().all(|v| v.pass), verdicts })
}

fn all_splits(config: &SuiteConfig, n: usize) -> Result<Vec<SimplexSplit>> {
    let (lambdas, scales) = (rational_grid(&config.lambdas), rational_grid(&config.scales));
    let mut out = Vec::new();
    for d in 2..=n {
        out.extend(generate_simplex_splits(n, d, &lambdas, &scales)?);
    }
    Ok(out)
}

fn splits_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for &n in &config.dims {
        for s in all_splits(config, n)? {
            let mut case = CaseResult::new(format!("split {}", s.key()), true);
            case.probes = 1;
            if !s.predictions_hold() {
                case = case.fail("pieces differ from the predicted linear images");
            } else if !s.quadruple().is_sound() {
                case = case.fail("pieces do not reassemble the simplex");
            } else if let Some(dist) = s.phi3_float_distance()? {
                if dist > 1e-12 {
                    case = case.fail(format!("double-precision image distance {dist:e}"));
                }
            }
            cases.push(case);
        }
        let chain = generate_union_chain(n, config.chain_depth, config.seed)?;
        for (i, q) in chain.quadruples.iter().enumerate() {
            let mut case = CaseResult::new(format!("chain n={n} #{i}"), true);
            if !q.is_sound() {
                case = case.fail("chain quadruple is not a convex decomposition");
            }
            cases.push(case);
        }
    }
    Ok(cases)
}

fn valuation_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for &n in &config.dims {
        let full = config.probe_set(n);
        let light = config.light_probe_set(n);
        let mut quads: Vec<(String, Quadruple, &[Vector])> =
            all_splits(config, n)?.iter().map(|s| (s.key(), s.quadruple(), full.as_slice())).collect();
        let chain = generate_union_chain(n, config.chain_depth, config.seed)?;
        quads.extend(
            chain.quadruples.iter().enumerate().map(|(i, q)| (format!("n={n} chain#{i}"), q.clone(), light.as_slice())),
        );
        let registry: Vec<NamedOperator> =
            operator_registry(n).into_iter().filter(|o| config.has(o.group)).collect();
        let mut tasks: Vec<Task> = Vec::new();
        for entry in &registry {
            if entry.expect_valuation {
                for (key, q, probes) in &quads {
                    tasks.push(Box::new(move || {
                        let name = format!("{} {key}", entry.name);
                        let op = |p: &Polytope| entry.apply(p);
                        match check_valuation_identity(&op, q, probes, config.tolerance) {
                            Ok(w) => {
                                let mut c = CaseResult::new(name, true);
                                c.absorb(probes.len(), w);
                                c
                            }
                            Err(e) => error_case(name, true, e),
                        }
                    }));
                }
            } else {
                let quads = &quads;
                tasks.push(Box::new(move || {
                    let mut c = CaseResult::new(format!("{} n={n} all splits", entry.name), false);
                    let op = |p: &Polytope| entry.apply(p);
                    for (key, q, probes) in quads {
                        match check_valuation_identity(&op, q, probes, config.tolerance) {
                            Ok(None) => c.probes += probes.len(),
                            Ok(w) => {
                                c.absorb(probes.len(), w);
                                c.note = Some(format!("first failure at {key}"));
                                break;
                            }
                            Err(e) => return error_case(c.key, false, e),
                        }
                    }
                    c
                }));
            }
        }
        cases.extend(run_tasks(tasks));
    }
    Ok(cases)
}

/// Polytopes used for equivariance and homogeneity checks in `R^n`.
fn test_polytopes(config: &SuiteConfig, n: usize) -> Result<Vec<(String, Polytope)>> {
    let one = int(1);
    Ok(vec![
        (format!("T^{n}"), Polytope::standard_simplex(n, n, &one)?),
        (format!("hat-T^{n}"), Polytope::hat_simplex(n, n, &one)?),
        ("chain-root".into(), generate_union_chain(n, 2, config.seed)?.root().clone()),
    ])
}

fn equivariance_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for &n in &config.dims {
        let probes = config.light_probe_set(n);
        let maps = transform_battery(n, config.seed)?;
        let polys = test_polytopes(config, n)?;
        let registry: Vec<NamedOperator> = operator_registry(n)
            .into_iter()
            .filter(|o| config.has(o.group) && o.expect_valuation)
            .collect();
        let mut tasks: Vec<Task> = Vec::new();
        for entry in &registry {
            for (mname, map) in &maps {
                let (polys, probes) = (&polys, &probes);
                tasks.push(Box::new(move || {
                    let mut c = CaseResult::new(format!("{} n={n} {mname}", entry.name), true);
                    let op = |p: &Polytope| entry.apply(p);
                    for (_, p) in polys {
                        match check_equivariance(&op, entry.variance, map, p, probes, config.tolerance) {
                            Ok(w) => c.absorb(probes.len(), w),
                            Err(e) => return error_case(c.key, true, e),
                        }
                    }
                    c
                }));
            }
        }
        cases.extend(run_tasks(tasks));
    }
    Ok(cases)
}

struct Homogeneous {
    name: String,
    degree: Rational,
    op: FieldOp,
}

fn homogeneous_operators(config: &SuiteConfig, n: usize) -> Vec<Homogeneous> {
    let nn = int(n as i64);
    let mut out = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        for p in 1..=3u32 {
            let pr = int(p as i64);
            if config.has("moment") {
                out.push(Homogeneous {
                    name: format!("moment{sign}[{p}]"),
                    degree: &nn / &pr + int(1),
                    op: Box::new(move |q| crate::operators::moment_field(q, Order::Int(p), sign)),
                });
            }
            if config.has("asym-lp") {
                out.push(Homogeneous {
                    name: format!("asym-lp{sign}[{p}]"),
                    degree: &nn / &pr - int(1),
                    op: Box::new(move |q| asym_lp_projection(q, Order::Int(p), sign)),
                });
            }
        }
        if config.has("asym-linf") {
            out.push(Homogeneous {
                name: format!("asym-linf{sign}"),
                degree: int(-1),
                op: Box::new(move |q| Ok(SupportEval::from_polytope(&asym_linf_projection(q, sign)?))),
            });
        }
    }
    if config.has("projection") {
        out.push(Homogeneous {
            name: "projection".into(),
            degree: &nn - int(1),
            op: Box::new(crate::operators::projection_body),
        });
    }
    out
}

fn homogeneity_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let scales = [rat(1, 2), int(2), int(3)];
    let mut cases = Vec::new();
    for &n in &config.dims {
        let probes = config.light_probe_set(n);
        let polys = test_polytopes(config, n)?;
        let ops = homogeneous_operators(config, n);
        let mut tasks: Vec<Task> = Vec::new();
        for h in &ops {
            for (pname, p) in &polys {
                let (probes, scales) = (&probes, &scales);
                tasks.push(Box::new(move || {
                    let key = format!("{} n={n} {pname}", h.name);
                    match homogeneity_check(&*h.op, p, &h.degree, scales, probes, config.tolerance.min(1e-10)) {
                        Ok(r) => {
                            let mut c = CaseResult::new(key, true).with_note(format!(
                                "degree {} measured {:?}",
                                r.degree, r.measured
                            ));
                            c.probes = r.samples;
                            if let Some((s, x, disc)) = r.witness {
                                c.pass = false;
                                c.witness =
                                    Some(Witness { direction: x, values: vec![format!("s = {s}")], discrepancy: disc });
                            }
                            c
                        }
                        Err(e) => error_case(key, true, e),
                    }
                }));
            }
        }
        cases.extend(run_tasks(tasks));
    }
    Ok(cases)
}

fn lower_dimensional_polytopes(n: usize) -> Result<Vec<(String, Polytope)>> {
    let one = int(1);
    Ok(vec![
        (format!("T^{}", n - 1), Polytope::standard_simplex(n - 1, n, &one)?),
        ("T^1".into(), Polytope::standard_simplex(1, n, &one)?),
        (format!("hat-T^{}", n - 1), Polytope::hat_simplex(n - 1, n, &one)?),
        ("{o}".into(), Polytope::origin(n)),
    ])
}

fn lower_dimensional_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for &n in &config.dims {
        let probes = config.probe_set(n);
        for (pname, p) in lower_dimensional_polytopes(n)? {
            for entry in operator_registry(n) {
                if !["moment", "asym-lp", "asym-linf"].contains(&entry.group) || !config.has(entry.group) {
                    continue;
                }
                let mut c = CaseResult::new(format!("{} n={n} {pname}", entry.name), true);
                match entry.apply(&p) {
                    Ok(Body::Polytope(q)) => {
                        c.probes = 1;
                        if q != Polytope::origin(n) {
                            c = c.fail(format!("expected {{o}}, got {} vertices", q.vertices().len()));
                        }
                    }
                    Ok(Body::Field(f)) => {
                        for x in &probes {
                            let v = f.field(x)?;
                            let zero = Value::Exact(Rational::zero());
                            let w = (!v.approx_eq_tol(&zero, config.tolerance)).then(|| Witness {
                                direction: x.clone(),
                                values: vec![v.to_string()],
                                discrepancy: v.to_f64().abs(),
                            });
                            c.absorb(1, w);
                        }
                    }
                    Err(e) => c = c.fail(format!("error: {e}")),
                }
                cases.push(c);
            }
        }
    }
    Ok(cases)
}

fn projection_property_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for &n in &config.dims {
        let probes = config.light_probe_set(n);
        let polys = lower_dimensional_polytopes(n)?;
        let registry: Vec<NamedOperator> = operator_registry(n)
            .into_iter()
            .filter(|o| config.has(o.group) && o.expect_valuation && o.variance == Variance::Covariant)
            .collect();
        let mut tasks: Vec<Task> = Vec::new();
        for entry in &registry {
            let (polys, probes) = (&polys, &probes);
            tasks.push(Box::new(move || {
                let mut c = CaseResult::new(format!("{} n={n}", entry.name), true);
                let op = |p: &Polytope| entry.apply(p);
                for (_, p) in polys {
                    match check_projection_property(&op, p, probes, config.tolerance) {
                        Ok(w) => c.absorb(probes.len(), w),
                        Err(e) => return error_case(c.key, true, e),
                    }
                }
                c
            }));
        }
        cases.extend(run_tasks(tasks));
    }
    Ok(cases)
}

/// A simplex with the origin as its centroid, seeded.
pub fn random_centered_simplex(n: usize, seed: u64) -> Result<Polytope> {
    let mut rng = probes::rng(seed);
    for _ in 0..100 {
        let mut pts: Vec<Vector> = (0..n)
            .map(|_| Vector::from_ints(&(0..n).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>()))
            .collect();
        let sum = pts.iter().fold(Vector::zeros(n), |acc, v| &acc + v);
        pts.push(-&sum);
        let p = Polytope::convex_hull(&pts)?;
        if p.is_full_dimensional() && p.is_simplex() {
            return Ok(p);
        }
    }
    Err(Error::GenerationFailed("centered simplex".into()))
}

/// Bodies with the origin in the interior used for the polar identity.
pub fn polar_test_bodies(n: usize, seed: u64) -> Result<Vec<(String, Polytope)>> {
    let sym: Vec<(Rational, Rational)> = (0..n).map(|_| (int(-1), int(1))).collect();
    let mut long = sym.clone();
    long[0] = (int(-1), int(2));
    Ok(vec![
        (format!("[-1,1]^{n}"), Polytope::cuboid(&sym)?),
        (format!("[-1,2]x[-1,1]^{}", n - 1), Polytope::cuboid(&long)?),
        ("centered-simplex".into(), random_centered_simplex(n, seed)?),
    ])
}

fn polar_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    if !config.has("asym-linf") {
        return Ok(Vec::new());
    }
    let mut cases = Vec::new();
    for &n in &config.dims {
        let probes: Vec<Vector> = config.probe_set(n).into_iter().take(100).collect();
        for (name, k) in polar_test_bodies(n, config.seed)? {
            let hat = asym_linf_projection(&k, Sign::Plus)?;
            let polar = polar_body(&k)?;
            let mut c = CaseResult::new(format!("polar n={n} {name}"), true);
            c.probes = 1;
            if hat != polar {
                c = c.fail("asymmetric L_inf projection body differs from the polar body");
            }
            cases.push(c);
            let mut c = CaseResult::new(format!("support-radial n={n} {name}"), true);
            for x in &probes {
                let prod = polar.support(x) * radial_function(&k, x)?;
                let w = (prod != Rational::one()).then(|| Witness {
                    direction: x.clone(),
                    values: vec![prod.to_string()],
                    discrepancy: (to_f64(&prod) - 1.0).abs(),
                });
                c.absorb(1, w);
            }
            cases.push(c);
        }
    }
    Ok(cases)
}

/// `(a1, a2)` and `(b1, b2)` used for the closed-form comparison.
pub fn closed_form_coefficients() -> ((Rational, Rational), (Rational, Rational)) {
    ((int(1), int(3)), (int(2), int(5)))
}

/// `(name, v0, d, m)` for the simplices compared against the closed form in `R^4`.
pub fn closed_form_simplices() -> Vec<(String, Vector, usize, usize)> {
    let n = 4;
    let mut out: Vec<(String, Vector, usize, usize)> =
        (1..=4).map(|d| (format!("T^{d}"), Vector::zeros(n), d, 0)).collect();
    out.extend((2..=4).map(|d| (format!("[-e1,e1..e{d}]"), -&Vector::unit(n, 0), d, 1)));
    out
}

fn closed_form_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    if !config.has("phi") {
        return Ok(Vec::new());
    }
    let ((a1, a2), (b1, b2)) = closed_form_coefficients();
    let probes = config.probe_set(4);
    let mut cases = Vec::new();
    for (name, v0, d, m) in closed_form_simplices() {
        let p = phi_simplex(&v0, d)?;
        for k in 1..=3u32 {
            let order = Order::Int(k);
            let fa = phi_valuation(&p, order, &a1, &a2)?;
            let fb = phi_reflected(&p, order, &b1, &b2)?;
            let tol = if k == 1 { 0.0 } else { 1e-12 };
            let mut c = CaseResult::new(format!("closed-form {name} p={k}"), true);
            for x in &probes {
                let (ca, cb) = phi_simplex_closed_form(&v0, d, m, x, order, (&a1, &a2), (&b1, &b2))?;
                let (va, vb) = (fa.field(x)?, fb.field(x)?);
                let w = if !va.approx_eq_tol(&ca, tol) {
                    Some(Witness { direction: x.clone(), values: vec![va.to_string(), ca.to_string()], discrepancy: va.discrepancy(&ca) })
                } else if !vb.approx_eq_tol(&cb, tol) {
                    Some(Witness { direction: x.clone(), values: vec![vb.to_string(), cb.to_string()], discrepancy: vb.discrepancy(&cb) })
                } else {
                    None
                };
                c.absorb(1, w);
            }
            cases.push(c);
        }
    }
    let mut spot = CaseResult::new("closed-form spot values at e1", true);
    for d in 1..=4 {
        let t = Polytope::standard_simplex(d, 4, &int(1))?;
        let v = phi_valuation(&t, Order::Int(1), &a1, &a2)?.field(&Vector::unit(4, 0))?;
        let want = Value::Exact(if d >= 2 { a2.clone() } else { a1.clone() });
        let w = (v != want).then(|| Witness {
            direction: Vector::unit(4, 0),
            values: vec![format!("d = {d}"), v.to_string(), want.to_string()],
            discrepancy: v.discrepancy(&want),
        });
        spot.absorb(1, w);
    }
    cases.push(spot);
    Ok(cases)
}

/// Parameter tuples `(a1, a2, b1, b2)` satisfying the difference-body constraints.
pub fn difference_parameter_tuples() -> Vec<DifferenceParams> {
    [
        (int(0), int(1), int(0), int(1)),
        (int(1), int(2), int(1), int(1)),
        (int(1), int(3), int(2), int(3)),
        (rat(1, 2), int(1), int(0), rat(1, 2)),
        (int(2), int(2), int(1), int(3)),
    ]
    .into_iter()
    .map(|(a, b, c, d)| DifferenceParams::new(a, b, c, d))
    .collect()
}

fn difference_phi_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    if !config.has("difference") {
        return Ok(Vec::new());
    }
    let probes = config.probe_set(4);
    let mut cases = Vec::new();
    for params in difference_parameter_tuples() {
        for d in 1..=4 {
            let t = Polytope::standard_simplex(d, 4, &int(1))?;
            let body = difference_body_simplex(&t, &params, true)?;
            let field = difference_field(&t, &params, true)?;
            let mut c = CaseResult::new(
                format!("D T^{d} [{},{},{},{}]", params.a1.0, params.a2.0, params.b1.0, params.b2.0),
                true,
            );
            for x in &probes {
                let (lhs, rhs) = (Value::Exact(body.support(x)), field.field(x)?);
                let w = (lhs != rhs).then(|| Witness {
                    direction: x.clone(),
                    values: vec![lhs.to_string(), rhs.to_string()],
                    discrepancy: lhs.discrepancy(&rhs),
                });
                c.absorb(1, w);
            }
            cases.push(c);
        }
    }
    Ok(cases)
}

pub const LIMIT_ORDERS: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];

/// Relative distance `|h_p / h_∞ - 1|` of `Π̂_p^+ K` from `Π̂_∞^+ K` at `x`, for each order in
/// [`LIMIT_ORDERS`]; `None` where `h_∞(x) = 0`.
pub fn limit_errors(k: &Polytope, x: &Vector) -> Result<Option<Vec<f64>>> {
    let hinf = to_f64(&asym_linf_projection(k, Sign::Plus)?.support(x));
    if hinf <= 0.0 {
        return Ok(None);
    }
    let mut out = Vec::new();
    for p in LIMIT_ORDERS {
        let h = asym_lp_projection(k, Order::Int(p), Sign::Plus)?.eval(x)?.to_f64();
        out.push((h / hinf - 1.0).abs());
    }
    Ok(Some(out))
}

fn limit_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    if !config.has("asym-lp") {
        return Ok(Vec::new());
    }
    let n = 3;
    let bodies = vec![
        ("T^3".to_string(), Polytope::standard_simplex(3, 3, &int(1))?),
        ("[-1,1]^3".to_string(), Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1)), (int(-1), int(1))])?),
    ];
    let probes = config.probe_set(n);
    let mut cases = Vec::new();
    for (name, k) in bodies {
        let mut c = CaseResult::new(format!("limit {name}"), true);
        let mut used = 0;
        for x in &probes {
            if used == 50 {
                break;
            }
            let Some(errs) = limit_errors(&k, x)? else { continue };
            used += 1;
            let monotone = errs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let last = *errs.last().expect("orders");
            let w = (!monotone || last > 0.05).then(|| Witness {
                direction: x.clone(),
                values: errs.iter().map(|e| format!("{e:.6}")).collect(),
                discrepancy: last,
            });
            c.absorb(1, w);
        }
        cases.push(c);
    }
    Ok(cases)
}

/// `(name, polytope, direction, p)` for the Monte-Carlo comparison.
pub fn monte_carlo_instances() -> Result<Vec<(String, Polytope, Vector, u32)>> {
    let sq = Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1))])?;
    let long = Polytope::cuboid(&[(int(-1), int(2)), (int(-1), int(1)), (int(-1), int(1))])?;
    Ok(vec![
        ("T^2".into(), Polytope::standard_simplex(2, 2, &int(1))?, Vector::from_ints(&[1, 0]), 1),
        ("[-1,1]^2".into(), sq, Vector::from_ints(&[1, 2]), 2),
        ("T^3".into(), Polytope::standard_simplex(3, 3, &int(1))?, Vector::from_ints(&[1, 2, -1]), 2),
        ("[-1,2]x[-1,1]^2".into(), long, Vector::from_ints(&[1, 1, 1]), 3),
        ("hat-T^4".into(), Polytope::hat_simplex(4, 4, &int(1))?, Vector::from_ints(&[1, -1, 2, 1]), 1),
    ])
}

fn moment_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    if !config.has("moment") {
        return Ok(Vec::new());
    }
    let mut cases = Vec::new();
    let t2 = Polytope::standard_simplex(2, 2, &int(1))?;
    let sq = Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1))])?;
    for (name, p, want) in [("T^2", t2, rat(1, 6)), ("[-1,1]^2", sq, int(1))] {
        let got = moment_power(&p, &Vector::from_ints(&[1, 0]), 1);
        let mut c = CaseResult::new(format!("moment exact {name} at e1"), true);
        c.probes = 1;
        if got != want {
            c = c.fail(format!("got {got}, expected {want}"));
        }
        cases.push(c);
    }
    let instances = monte_carlo_instances()?;
    let tasks: Vec<Task> = instances
        .iter()
        .enumerate()
        .map(|(i, (name, p, x, k))| -> Task {
            Box::new(move || {
                let key = format!("moment monte-carlo {name} p={k}");
                let exact = to_f64(&moment_power(p, x, *k));
                match moment_power_monte_carlo(p, x, f64::from(*k), config.mc_samples, config.seed + i as u64) {
                    Ok(est) => {
                        let mut c = CaseResult::new(key, true)
                            .with_note(format!("exact {exact:.6} estimate {:.6} se {:.2e}", est.value, est.std_err));
                        c.probes = est.samples;
                        if (est.value - exact).abs() > 3.0 * est.std_err {
                            c.pass = false;
                            c.witness = Some(Witness {
                                direction: x.clone(),
                                values: vec![exact.to_string(), est.value.to_string()],
                                discrepancy: (est.value - exact).abs(),
                            });
                        }
                        c
                    }
                    Err(e) => error_case(key, true, e),
                }
            })
        })
        .collect();
    cases.extend(run_tasks(tasks));
    Ok(cases)
}

/// Polytopes in `R^3` used for subadditivity checks.
pub fn subadditivity_polytopes(seed: u64) -> Result<Vec<(String, Polytope)>> {
    let one = int(1);
    let unit = (int(0), int(1));
    Ok(vec![
        ("T^1".into(), Polytope::standard_simplex(1, 3, &one)?),
        ("T^2".into(), Polytope::standard_simplex(2, 3, &one)?),
        ("T^3".into(), Polytope::standard_simplex(3, 3, &one)?),
        ("hat-T^3".into(), Polytope::hat_simplex(3, 3, &one)?),
        ("[0,1]^3".into(), Polytope::cuboid(&[unit.clone(), unit.clone(), unit.clone()])?),
        ("[-1,1]x[0,1]^2".into(), Polytope::cuboid(&[(int(-1), int(1)), unit.clone(), unit])?),
        ("chain-root".into(), generate_union_chain(3, 2, seed)?.root().clone()),
    ])
}

/// Difference-body parameters on the boundary `a2 - a1 = b2` and just beyond it.
pub fn difference_boundary_params() -> (DifferenceParams, DifferenceParams) {
    (
        DifferenceParams::new(int(0), int(1), int(0), int(1)),
        DifferenceParams::new(int(0), rat(11, 10), int(0), int(1)),
    )
}

fn subadditivity_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let polys = subadditivity_polytopes(config.seed)?;
    let mut fields: Vec<(String, bool, FieldOp)> = Vec::new();
    if config.has("difference") {
        let (ok, bad) = difference_boundary_params();
        fields.push(("difference boundary a2-a1=b2".into(), true, Box::new(move |p| difference_field(p, &ok, true))));
        fields.push((
            "difference beyond boundary a2-a1=b2+1/10".into(),
            false,
            Box::new(move |p| difference_field(p, &bad, false)),
        ));
    }
    for entry in operator_registry(3) {
        if entry.expect_valuation
            && ["lp-covariant", "lp-contravariant", "covariant-difference"].contains(&entry.group)
            && config.has(entry.group)
        {
            let name = entry.name.clone();
            fields.push((name, true, Box::new(move |p| Ok(entry.apply(p)?.support_eval()))));
        }
    }
    let tasks: Vec<Task> = fields
        .iter()
        .map(|(name, expected, f)| -> Task {
            let polys = &polys;
            Box::new(move || {
                let mut c = CaseResult::new(format!("subadditive {name}"), *expected);
                for (pname, p) in polys {
                    let report = match f(p).and_then(|h| subadditivity_check(&h, config.probes, config.seed, config.tolerance)) {
                        Ok(r) => r,
                        Err(e) => return error_case(c.key, *expected, e),
                    };
                    let w = report.witness.map(|w| Witness {
                        direction: w.x.clone(),
                        values: vec![format!("P = {pname}"), format!("y = {}", w.y), w.hx.to_string(), w.hy.to_string(), w.hxy.to_string()],
                        discrepancy: w.excess.to_f64(),
                    });
                    c.absorb(report.samples, w);
                }
                c
            })
        })
        .collect();
    Ok(run_tasks(tasks))
}

fn counterexample_suite(config: &SuiteConfig) -> Result<Vec<CaseResult>> {
    if !config.has("phi") {
        return Ok(Vec::new());
    }
    let ce = sublinearity_counterexample()?;
    let values = format!("h(x) = {}, h(y) = {}, h(x+y) = {}, margin {}", ce.hx, ce.hy, ce.hxy, ce.margin);
    let mut exact = CaseResult::new("counterexample values", true).with_note(values.clone());
    exact.probes = 3;
    if (ce.hx.clone(), ce.hy.clone(), ce.hxy.clone()) != (Value::Exact(int(4)), Value::Exact(int(4)), Value::Exact(int(9))) {
        exact.pass = false;
    }
    let mut sub = CaseResult::new("counterexample subadditivity", false).with_note(values);
    sub.probes = 1;
    if !ce.subadditive {
        sub.pass = false;
        sub.witness = Some(Witness {
            direction: ce.x.clone(),
            values: vec![format!("y = {}", ce.y), ce.hxy.to_string()],
            discrepancy: ce.margin.to_f64(),
        });
    }
    Ok(vec![exact, sub])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suites: &[&str]) -> SuiteConfig {
        SuiteConfig {
            suites: suites.iter().map(|s| s.to_string()).collect(),
            dims: vec![3],
            lambdas: vec![Num(rat(1, 2))],
            scales: vec![Num(int(1))],
            probes: 30,
            mc_samples: 20_000,
            chain_depth: 2,
            ..Default::default()
        }
    }

    #[test]
    fn empty_family_list_gives_empty_bundle() {
        let cfg = SuiteConfig { families: Vec::new(), ..small(&["valuation"]) };
        let b = run_suite(&cfg).unwrap();
        assert!(b.verdicts.is_empty());
        assert!(b.pass);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(SuiteConfig::from_json(r#"{"dims":[7]}"#), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"bogus":1}"#), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"families":["nope"]}"#), Err(Error::Config(_))));
        let cfg = SuiteConfig::from_json(r#"{"probes":12,"lambdas":["1/3"]}"#).unwrap();
        assert_eq!(cfg.lambdas, vec![Num(rat(1, 3))]);
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = small(&["splits", "valuation", "counterexample", "closed-form", "subadditivity"]);
        let a = run_suite(&cfg).unwrap();
        for v in &a.verdicts {
            for c in &v.cases {
                assert!(c.as_expected(), "{}: {c:?}", v.suite);
            }
        }
        assert!(a.pass);
        let b = run_suite(&cfg).unwrap();
        let keys = |x: &Bundle| -> Vec<(String, bool, Option<Witness>)> {
            x.verdicts.iter().flat_map(|v| v.cases.iter().map(|c| (c.key.clone(), c.pass, c.witness.clone()))).collect()
        };
        assert_eq!(keys(&a), keys(&b));
    }

    #[test]
    fn registry_sizes() {
        assert!(operator_registry(3).iter().all(|o| o.expect_valuation));
        assert_eq!(operator_registry(4).iter().filter(|o| !o.expect_valuation).count(), 1);
    }
}

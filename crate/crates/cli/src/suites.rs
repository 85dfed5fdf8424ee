//! Randomized certification suites behind `tentropy certify`.

use std::collections::BTreeMap;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tentropy::entstat;
use tentropy::spectral::{self, L1Vector};
use tentropy::tentropy::{
    lemma5_check, phi_eps, phi_eps_bounds, tau_direct, tau_dual, tau_n, young_local_check, PartitionSearch,
};
use tentropy::varprin::{self, divergence_witness, lemma11_check, verify_subgradient, vp_spectral, young_check};
use tentropy::{random, Error, Functional, Mode, PartitionOfUnity, Potential, System};

use crate::report::{real, reals, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Young,
    Vp,
    Lemmas,
    Entstat,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Young => "young",
            Suite::Vp => "vp",
            Suite::Lemmas => "lemmas",
            Suite::Entstat => "entstat",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Quick,
    Deep,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Quick => "quick",
            Profile::Deep => "deep",
        }
    }

    /// Draws per randomized check.
    pub fn draws(self) -> usize {
        match self {
            Profile::Quick => 1_000,
            Profile::Deep => 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub n_max: usize,
    /// Replaces every built-in ε grid when set.
    pub eps: Option<Vec<f64>>,
    /// Replaces every built-in pass tolerance when set.
    pub tolerance: Option<f64>,
    pub profile: Profile,
    /// Extra functional added to the sampled ones.
    pub mu: Option<Functional<f64>>,
}

impl CertifyOptions {
    pub fn new(suite: Suite, seed: u64) -> Self {
        Self {
            suite,
            seed,
            n_max: 12,
            eps: None,
            tolerance: None,
            profile: Profile::Quick,
            mu: None,
        }
    }

    fn eps_grid(&self, default: &[f64]) -> Vec<f64> {
        self.eps.clone().unwrap_or_else(|| default.to_vec())
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn scaled(&self, divisor: usize) -> usize {
        (self.profile.draws() / divisor).max(1)
    }
}

/// Result of one named check before it is stamped into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub verdict: Verdict,
    pub residual: f64,
    pub values: BTreeMap<String, Value>,
    pub witness: Option<Value>,
}

/// Stream of draws with worst residual and first failing instance.
struct Sweep {
    name: &'static str,
    tol: f64,
    draws: usize,
    violations: usize,
    worst: f64,
    witness: Option<Value>,
    values: BTreeMap<String, Value>,
}

impl Sweep {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            draws: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
            witness: None,
            values: BTreeMap::new(),
        }
    }

    /// Records a residual that passes when `≤ tol`.
    fn record(&mut self, residual: f64, witness: impl FnOnce() -> Value) {
        let ok = residual <= self.tol;
        self.record_with(residual, ok, witness);
    }

    fn record_with(&mut self, residual: f64, ok: bool, witness: impl FnOnce() -> Value) {
        self.draws += 1;
        if residual > self.worst || residual.is_nan() {
            self.worst = residual;
        }
        if !ok {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.values.insert(key.to_string(), v);
    }

    fn finish(mut self) -> Outcome {
        self.values.insert("draws".into(), json!(self.draws));
        self.values.insert("violations".into(), json!(self.violations));
        self.values.insert("tolerance".into(), real(self.tol));
        Outcome {
            name: self.name.to_string(),
            verdict: if self.violations == 0 { Verdict::Pass } else { Verdict::Fail },
            residual: self.worst,
            values: self.values,
            witness: self.witness,
        }
    }
}

fn skipped(name: &str, reason: &str) -> Outcome {
    let mut values = BTreeMap::new();
    values.insert("reason".to_string(), json!(reason));
    Outcome {
        name: name.to_string(),
        verdict: Verdict::Skip,
        residual: 0.0,
        values,
        witness: None,
    }
}

/// Independent stream per check, derived from the run seed and the check name.
fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let h = Sha256::digest(format!("{seed}:{name}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&h[..8]);
    ChaCha8Rng::seed_from_u64(u64::from_le_bytes(bytes))
}

fn pot(phi: &Potential<f64>) -> Value {
    reals(phi.values())
}

fn fun(mu: &Functional<f64>) -> Value {
    json!({ "weights": reals(mu.weights()), "mode": mu.mode() })
}

fn is_invariant_probability(sys: &System, mu: &Functional<f64>) -> bool {
    let r = sys.is_invariant(mu);
    r.invariant && r.positive && r.normalized
}

/// Functional of a rotating category: polytope point, probability, signed, null-charging.
fn mixed_functional(rng: &mut ChaCha8Rng, sys: &System, i: usize) -> Functional<f64> {
    match i % 4 {
        0 => random::polytope_measure(rng, sys),
        1 => random::probability(rng, sys),
        2 => random::functional(rng, sys, Mode::Full),
        _ => random::null_charging(rng, sys).unwrap_or_else(|| random::functional(rng, sys, Mode::Essential)),
    }
}

pub fn certify(sys: &System, opts: &CertifyOptions) -> Vec<Outcome> {
    let mut out = Vec::new();
    if opts.suite.includes(Suite::Young) {
        out.push(young_inequality(sys, opts));
        out.push(young_local(sys, opts));
        out.push(young_equality(sys, opts));
    }
    if opts.suite.includes(Suite::Vp) {
        out.push(vp_gap(sys, opts));
        out.push(vp_subgradient(sys, opts));
        out.push(vp_dichotomy(sys, opts));
    }
    if opts.suite.includes(Suite::Lemmas) {
        out.push(operator_norm(sys, opts));
        out.push(lemma4(sys, opts));
        out.push(lemma5(sys, opts));
        out.push(lemma6(sys, opts));
        out.push(phi_eps_check(sys, opts));
        out.push(theorem1(sys, opts));
        out.push(lemma11(sys, opts));
    }
    if opts.suite.includes(Suite::Entstat) {
        out.push(empirical_identity(sys, opts));
        out.push(estimate(sys, opts));
        out.push(extreme_points(sys, opts));
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

fn young_inequality(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "young.inequality";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    let extra = opts.mu.as_ref().filter(|mu| is_invariant_probability(sys, mu));
    for i in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let mu = match extra {
            Some(mu) if i % 2 == 1 => mu.clone(),
            _ => random::polytope_measure(&mut rng, sys),
        };
        let y = young_check(sys, &phi, &mu).expect("invariant sample");
        sweep.record(-y.slack, || json!({ "phi": pot(&phi), "mu": fun(&mu), "slack": real(y.slack) }));
    }
    sweep.finish()
}

fn young_local(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "young.local";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-8));
    let grid = opts.eps_grid(&[1.0, 0.1]);
    sweep.set("eps", reals(&grid));
    let n_top = opts.n_max.clamp(1, 4);
    for i in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let mu = random::polytope_measure(&mut rng, sys);
        let n = rng.random_range(1..=n_top);
        let eps = grid[i % grid.len()];
        match young_local_check(sys, &phi, &mu, n, eps) {
            Ok(r) => sweep.record(-r.slack, || {
                json!({ "phi": pot(&phi), "mu": fun(&mu), "n": n, "eps": eps, "lhs": real(r.lhs), "rhs": real(r.rhs) })
            }),
            Err(e) => sweep.record(f64::INFINITY, || json!({ "error": e.to_string() })),
        }
    }
    sweep.finish()
}

fn young_equality(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "young.equality";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    for _ in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let mu = varprin::subgradient(sys, &phi).expect("valid system");
        let y = young_check(sys, &phi, &mu).expect("vertex is invariant");
        sweep.record(y.slack.abs(), || json!({ "phi": pot(&phi), "mu": fun(&mu), "slack": real(y.slack) }));
    }
    sweep.finish()
}

fn vp_gap(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "vp.gap";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    let mut degenerate = 0;
    for _ in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let v = vp_spectral(sys, &phi).expect("valid system");
        if v.face.len() > 1 {
            degenerate += 1;
        }
        let residual = if is_invariant_probability(sys, &v.maximizer) { v.gap.abs() } else { f64::INFINITY };
        sweep.record(residual, || {
            json!({ "phi": pot(&phi), "lambda": real(v.lambda_value), "maximizer": fun(&v.maximizer), "gap": real(v.gap) })
        });
    }
    sweep.set("degenerate_faces", json!(degenerate));
    sweep.finish()
}

fn vp_subgradient(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "vp.subgradient";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    let psi_draws = 1000;
    sweep.set("psi_per_phi", json!(psi_draws));
    for _ in 0..opts.scaled(100) {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let mu = varprin::subgradient(sys, &phi).expect("valid system");
        let c = verify_subgradient(sys, &phi, &mu, &mut rng, psi_draws, 5.0).expect("valid system");
        let residual = (-c.worst_slack).max(c.identity_residual);
        sweep.record(residual, || {
            json!({ "phi": pot(&phi), "mu": fun(&mu), "worst_slack": real(c.worst_slack), "identity_residual": real(c.identity_residual) })
        });
    }
    sweep.finish()
}

fn vp_dichotomy(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "vp.dichotomy";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    let (mut members, mut defects, mut separated) = (0, 0, 0);
    let mut sample: Vec<Functional<f64>> = Vec::new();
    if let Some(mu) = &opts.mu {
        sample.push(mu.clone());
    }
    for i in 0..opts.profile.draws() {
        sample.push(mixed_functional(&mut rng, sys, i));
    }
    for mu in &sample {
        let dual = tau_dual(sys, mu).expect("valid inputs");
        let witness = divergence_witness(sys, mu);
        let descent = dual.descent_value.unwrap_or(f64::NAN);
        let (residual, ok) = match (dual.value == 0.0, &witness) {
            (true, Err(Error::NotDivergent)) => {
                members += 1;
                (0.0, descent.abs() <= 1e-9)
            }
            (false, Ok(w)) => {
                defects += 1;
                let ray = w.check_ray(sys, mu);
                (ray.worst_excess, ray.holds && descent < -1e3)
            }
            (false, Err(Error::NotDivergent)) => {
                separated += 1;
                let rate = dual.rate.unwrap_or(0.0);
                (-rate, rate > 0.0 && descent < -1e3)
            }
            _ => (f64::INFINITY, false),
        };
        sweep.record_with(residual, ok, || {
            json!({ "mu": fun(mu), "tau_dual": real(dual.value), "descent": real(descent),
                    "defect": dual.defect.map(|d| d.as_str()) })
        });
    }
    sweep.set("members", json!(members));
    sweep.set("defects", json!(defects));
    sweep.set("separated", json!(separated));
    sweep.finish()
}

fn operator_norm(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.operator_norm";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-12));
    let n_top = opts.n_max.clamp(1, 5);
    for _ in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let n = rng.random_range(1..=n_top);
        let closed = spectral::op_norm(sys, &phi, n).expect("n ≥ 1");
        let power = |f: L1Vector<f64>| (0..n).fold(f, |g, _| spectral::apply(sys, &phi, &g));
        let brute = sys
            .supported_atoms()
            .into_iter()
            .map(|y| power(L1Vector::normalized_indicator(sys, y)).norm(sys))
            .fold(0.0, f64::max);
        let agreement = (closed - brute).abs() / brute.max(1.0);
        let mut excess = f64::NEG_INFINITY;
        for _ in 0..10 {
            let f = L1Vector::new(sys, random::unit_l1(&mut rng, sys)).expect("finite");
            excess = excess.max((power(f).norm(sys) - closed) / closed.max(1.0));
        }
        let ok = agreement <= sweep.tol && excess <= 1e-9;
        sweep.record_with(agreement.max(excess), ok, || {
            json!({ "phi": pot(&phi), "n": n, "closed": real(closed), "brute": real(brute) })
        });
    }
    sweep.finish()
}

fn lemma4(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.lemma4";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-12));
    let mut strict = 0;
    for _ in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let n = rng.random_range(1..=5);
        let g = spectral::lemma4_gap(sys, &phi, n).expect("n ≥ 1");
        if g.gap > 1e-9 {
            strict += 1;
        }
        sweep.record(g.scaled - g.power, || json!({ "phi": pot(&phi), "n": n, "gap": real(g.gap) }));
    }
    sweep.set("strict_gaps", json!(strict));
    sweep.finish()
}

fn lemma5(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.lemma5";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-6));
    let n_top = opts.n_max.clamp(1, 4);
    for i in 0..opts.scaled(10) {
        let mu = random::polytope_measure(&mut rng, sys);
        let n = rng.random_range(1..=n_top);
        let d = if i % 2 == 0 {
            PartitionOfUnity::atomic(sys.len())
        } else {
            let k = rng.random_range(1..=sys.len() + 1);
            PartitionOfUnity::random_soft(&mut rng, sys.len(), k)
        };
        let s = tau_n(sys, &mu, &d, n).expect("probability sample");
        if s.value == f64::NEG_INFINITY {
            continue;
        }
        let residual = match lemma5_check(sys, &mu, &d, n, &s) {
            Ok(sup) | Err(Error::NotOptimal(sup)) => (sup - 1.0).abs(),
            Err(_) => f64::INFINITY,
        };
        sweep.record(residual, || json!({ "mu": fun(&mu), "partition": d.members(), "n": n }));
    }
    sweep.finish()
}

fn lemma6(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.lemma6";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-12));
    for i in 0..opts.profile.draws() {
        let phi = random::potential(&mut rng, sys.len(), 5.0);
        let psi = if i % 3 == 0 {
            // a dominated ψ exercises monotonicity
            phi.map(|v| v - 1.0).zip(&random::potential::<f64, _>(&mut rng, sys.len(), 1.0), |a, b| a - b.abs())
        } else {
            random::potential(&mut rng, sys.len(), 5.0)
        };
        let t = if i % 2 == 0 { rng.random_range(0.0..=1.0) } else { rng.random_range(-5.0..=5.0) };
        let r = spectral::lemma6_check(sys, &phi, &psi, t);
        sweep.record(r.worst(), || json!({ "phi": pot(&phi), "psi": pot(&psi), "t": real(t) }));
    }
    sweep.finish()
}

fn phi_eps_check(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.phi_eps";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-8));
    let grid = opts.eps_grid(&[1.0, 0.1, 0.01]);
    sweep.set("eps", reals(&grid));
    let d = PartitionOfUnity::atomic(sys.len());
    for i in 0..opts.profile.draws() {
        let mu = random::polytope_measure(&mut rng, sys);
        let n = rng.random_range(1..=3);
        let eps = grid[i % grid.len()];
        let s = tau_n(sys, &mu, &d, n).expect("probability sample");
        let residual = phi_eps(sys, &mu, &d, n, eps, &s)
            .and_then(|phi| phi_eps_bounds(sys, &mu, n, eps, &phi, &s))
            .map_or(f64::INFINITY, |b| (-b.slack_lambda).max(-b.slack_pairing));
        sweep.record(residual, || json!({ "mu": fun(&mu), "n": n, "eps": eps }));
    }
    sweep.finish()
}

fn theorem1(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.theorem1";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-3));
    let n_direct = opts.n_max.clamp(1, 4);
    sweep.set("n_max_direct", json!(n_direct));
    for _ in 0..opts.scaled(100) {
        let mu = random::polytope_measure(&mut rng, sys);
        let search = PartitionSearch { seed: rng.random(), ..Default::default() };
        let direct = tau_direct(sys, &mu, n_direct, search).expect("probability sample").value;
        let dual = tau_dual(sys, &mu).expect("valid inputs").value;
        let d = direct - dual;
        let ok = dual == 0.0 && d >= -1e-12 && d <= sweep.tol;
        sweep.record_with(d, ok, || json!({ "mu": fun(&mu), "direct": real(direct), "dual": real(dual) }));
    }
    sweep.finish()
}

fn lemma11(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "lemmas.lemma11";
    if !sys.has_null_atoms() {
        return skipped(name, "system has no null atoms");
    }
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    let mut sample: Vec<Functional<f64>> = Vec::new();
    if let Some(mu) = &opts.mu {
        if lemma11_check(sys, mu).is_ok() {
            sample.push(mu.clone());
        }
    }
    for _ in 0..opts.scaled(10) {
        sample.push(random::null_charging(&mut rng, sys).expect("null atoms exist"));
    }
    for mu in &sample {
        let dual = tau_dual(sys, mu).expect("valid inputs");
        match lemma11_check(sys, mu) {
            Ok(r) => {
                let ok = r.holds && dual.value == f64::NEG_INFINITY;
                sweep.record_with(r.ray.worst_excess, ok, || {
                    json!({ "mu": fun(mu), "partition": r.partition.members(), "tau_n": real(r.inner.value),
                            "direction": pot(&r.witness.direction) })
                });
            }
            Err(e) => sweep.record(f64::INFINITY, || json!({ "mu": fun(mu), "error": e.to_string() })),
        }
    }
    sweep.finish()
}

fn empirical_identity(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "entstat.empirical";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-12));
    for _ in 0..opts.profile.draws() {
        let x = rng.random_range(0..sys.len());
        let n = rng.random_range(1..=50);
        let f = random::potential(&mut rng, sys.len(), 5.0);
        let d = entstat::empirical(sys, x, n).expect("n ≥ 1");
        let s = sys.birkhoff(&f, n).expect("matching length")[x] / n as f64;
        let residual = (d.pair(&f) - s).abs().max((d.weights.iter().sum::<f64>() - 1.0).abs());
        sweep.record(residual, || json!({ "x": x, "n": n, "f": pot(&f) }));
    }
    sweep.finish()
}

fn estimate(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "entstat.estimate";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-9));
    let grid = opts.eps_grid(&[1.0, 0.5, 0.1]);
    sweep.set("eps", reals(&grid));
    let per_class = opts.scaled(100);
    let mut sample: Vec<Functional<f64>> = opts.mu.iter().cloned().collect();
    for _ in 0..per_class {
        sample.push(random::polytope_measure(&mut rng, sys));
        sample.push(random::probability(&mut rng, sys));
        sample.push(random::functional(&mut rng, sys, Mode::Full));
        if let Some(mu) = random::null_charging(&mut rng, sys) {
            sample.push(mu);
        }
    }
    let (mut divergent, mut rows, mut empty) = (0, 0, 0);
    for mu in &sample {
        for &eps in &grid {
            match entstat::verify_estimate(sys, mu, eps, opts.n_max) {
                Ok(r) => {
                    if r.neighborhood.tau == f64::NEG_INFINITY {
                        divergent += 1;
                    }
                    rows += r.rows.len();
                    empty += r.empty_rows;
                    let w = *r.worst_row();
                    sweep.record_with(w.ratio - 1.0, r.holds, || {
                        json!({ "mu": fun(mu), "eps": eps, "n": w.n, "y": w.y, "lhs": real(w.lhs), "rhs": real(w.rhs),
                                "x_n_size": w.x_n_size })
                    });
                }
                Err(e) => sweep.record(f64::INFINITY, || json!({ "mu": fun(mu), "eps": eps, "error": e.to_string() })),
            }
        }
    }
    sweep.set("divergent_branch", json!(divergent));
    sweep.set("rows", json!(rows));
    sweep.set("empty_rows", json!(empty));
    sweep.finish()
}

fn extreme_points(sys: &System, opts: &CertifyOptions) -> Outcome {
    let name = "entstat.extreme_points";
    let mut rng = stream(opts.seed, name);
    let mut sweep = Sweep::new(name, opts.tol(1e-12));
    let n_top = opts.n_max.clamp(1, 4);
    for i in 0..opts.scaled(10) {
        let mu = mixed_functional(&mut rng, sys, i);
        let n = rng.random_range(1..=n_top);
        let nb = match entstat::build_neighborhood(sys, &mu, 0.5) {
            Ok(nb) => nb,
            Err(e) => {
                sweep.record(f64::INFINITY, || json!({ "mu": fun(&mu), "error": e.to_string() }));
                continue;
            }
        };
        let set = entstat::x_n_set(sys, &nb, n).expect("n ≥ 1");
        let worst = sys
            .supported_atoms()
            .into_iter()
            .map(|y| {
                let mut f = vec![0.0; sys.len()];
                f[y] = 1.0 / sys.mass(y);
                entstat::restricted_integral(sys, &set, n, &f)
            })
            .fold(0.0, f64::max);
        let mut residual = f64::NEG_INFINITY;
        for _ in 0..100 {
            let f = random::unit_l1(&mut rng, sys);
            residual = residual.max(entstat::restricted_integral(sys, &set, n, &f) - worst);
        }
        sweep.record(residual, || json!({ "mu": fun(&mu), "n": n }));
    }
    sweep.finish()
}

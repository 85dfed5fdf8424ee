//! Library side of the `tentropy` command-line tool: loading inputs, running
//! computations and suites, and assembling reports.

pub mod report;
pub mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tentropy::tentropy::{tau_direct, tau_dual, PartitionSearch, TauResult};
use tentropy::{io, random, spectral, Error, Functional, System};

use report::{digest, real, reals, CheckRecord, ConfigEcho, ExtReal, Report, Verdict};
use suites::{CertifyOptions, Profile, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CERTIFY: i32 = 3;

const COLLAPSE_NOTE: &str = "t-entropy degenerates on finite deterministic systems: tau is 0 on the \
invariant polytope and -inf off it, mirroring zero Kolmogorov-Sinai entropy";

/// Failure that prevents a report from being produced.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn input_error(e: impl fmt::Display) -> CliError {
    CliError {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

/// Options shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Options {
    pub n_max: usize,
    pub eps: Option<Vec<f64>>,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub profile: Profile,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            n_max: 12,
            eps: None,
            seed: 0,
            tolerance: None,
            profile: Profile::Quick,
        }
    }
}

impl Options {
    fn echo(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("n_max".into(), json!(self.n_max));
        m.insert("eps".into(), self.eps.as_ref().map_or(Value::Null, |e| reals(e)));
        m.insert("seed".into(), json!(self.seed));
        m.insert("tolerance".into(), self.tolerance.map_or(Value::Null, real));
        m.insert("profile".into(), json!(self.profile.as_str()));
        m
    }

    fn flags(&self) -> String {
        let mut s = format!(" --n-max {} --seed {} --profile {}", self.n_max, self.seed, self.profile.as_str());
        if let Some(eps) = &self.eps {
            let list: Vec<String> = eps.iter().map(|e| e.to_string()).collect();
            s.push_str(&format!(" --eps {}", list.join(",")));
        }
        if let Some(t) = self.tolerance {
            s.push_str(&format!(" --tolerance {t}"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Direct,
    Dual,
    Both,
}

impl Route {
    fn as_str(self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Dual => "dual",
            Route::Both => "both",
        }
    }
}

/// A finished run: the report and the process exit status.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: Report,
    pub exit: i32,
}

impl Run {
    fn from_report(report: Report) -> Self {
        let exit = if report.all_passed() { EXIT_OK } else { EXIT_CERTIFY };
        Self { report, exit }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// Loads a system, returning its canonical text for digests. Parse errors exit 1.
fn load_system(path: &Path) -> Result<(System, String), CliError> {
    let sys = io::parse_system(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let canonical = io::system_to_string(&sys);
    Ok((sys, canonical))
}

fn load_valid_system(path: &Path) -> Result<(System, String), CliError> {
    let (sys, canonical) = load_system(path)?;
    sys.ensure_valid().map_err(|e| CliError {
        code: EXIT_INVALID,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok((sys, canonical))
}

fn load_functional(path: &Path, sys: &System) -> Result<(Functional<f64>, String), CliError> {
    let mu = io::parse_functional(&read(path)?, sys.len()).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok((mu.clone(), io::functional_to_string(&mu)))
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

fn record(
    name: &str,
    inputs_digest: &str,
    verdict: Verdict,
    residual: f64,
    values: BTreeMap<String, Value>,
    witness: Option<Value>,
    repro: &str,
) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        inputs_digest: inputs_digest.to_string(),
        verdict,
        residual: ExtReal(residual),
        values,
        witness,
        repro: (verdict == Verdict::Fail).then(|| repro.to_string()),
    }
}

pub fn cmd_validate(system: &Path, opts: &Options) -> Result<Run, CliError> {
    let (sys, canonical) = load_system(system)?;
    let v = sys.validate();
    let cycles = sys.cycles();
    let mut values = BTreeMap::new();
    values.insert("atoms".into(), json!(sys.len()));
    values.insert("supported".into(), json!(sys.supported_atoms()));
    values.insert("constant".into(), real(v.constant));
    values.insert("support_closed".into(), json!(v.support_closed));
    values.insert(
        "violations".into(),
        json!(v.violations.iter().map(|s| [s.atom, s.preimage]).collect::<Vec<_>>()),
    );
    values.insert("cycles".into(), json!(cycles.cycles));
    values.insert("supported_cycles".into(), json!(cycles.supported_cycles().collect::<Vec<_>>()));
    let verdict = if v.is_valid() { Verdict::Pass } else { Verdict::Fail };
    let repro = format!("tentropy validate {}{}", show(system), opts.flags());
    let check = record("system.validate", &digest([canonical.as_str()]), verdict, 0.0, values, None, &repro);
    let config = ConfigEcho {
        command: "validate".into(),
        inputs: BTreeMap::from([("system".to_string(), show(system))]),
        options: opts.echo(),
    };
    let report = Report::new(config, vec![check], Vec::new());
    let exit = if v.is_valid() { EXIT_OK } else { EXIT_INVALID };
    Ok(Run { report, exit })
}

pub fn cmd_lambda(system: &Path, phi_path: &Path, opts: &Options) -> Result<Run, CliError> {
    let (sys, canonical) = load_valid_system(system)?;
    let phi_text = read(phi_path)?;
    let phi = io::parse_potential(&phi_text, sys.len()).map_err(|e| input_error(format!("{}: {e}", phi_path.display())))?;
    let r = spectral::lambda(&sys, &phi, opts.n_max.max(1));
    let mut values = BTreeMap::new();
    values.insert("lambda".into(), real(r.lambda));
    values.insert("witness_cycle".into(), json!(r.witness_cycle));
    values.insert("norm_sequence".into(), reals(&r.norm_sequence));
    values.insert("convergence_gap".into(), real(r.convergence_gap));
    values.insert("from_above".into(), json!(r.from_above));
    let verdict = if r.from_above { Verdict::Pass } else { Verdict::Fail };
    let repro = format!("tentropy lambda {} {}{}", show(system), show(phi_path), opts.flags());
    let d = digest([canonical.as_str(), &serde_json::to_string(&reals(phi.values())).expect("json")]);
    let check = record("lambda", &d, verdict, r.convergence_gap, values, None, &repro);
    let config = ConfigEcho {
        command: "lambda".into(),
        inputs: BTreeMap::from([("system".to_string(), show(system)), ("phi".to_string(), show(phi_path))]),
        options: opts.echo(),
    };
    Ok(Run::from_report(Report::new(config, vec![check], Vec::new())))
}

fn tau_values(r: &TauResult<f64>) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert(
        "route".into(),
        json!(match r.route {
            tentropy::tentropy::Route::Direct => "direct",
            tentropy::tentropy::Route::Dual => "dual",
        }),
    );
    m.insert("value".into(), real(r.value));
    if let Some(n) = r.achieving_n {
        m.insert("achieving_n".into(), json!(n));
    }
    if let Some(d) = &r.achieving_partition {
        m.insert("achieving_partition".into(), json!(d.members()));
    }
    if let Some(w) = &r.dual_witness {
        m.insert("dual_witness".into(), reals(w.values()));
    }
    if let Some(d) = r.defect {
        m.insert("defect".into(), json!(d.as_str()));
    }
    if let Some(rate) = r.rate {
        m.insert("rate".into(), real(rate));
    }
    if let Some(v) = r.descent_value {
        m.insert("descent_value".into(), real(v));
    }
    if r.route == tentropy::tentropy::Route::Direct {
        m.insert("evaluated".into(), json!(r.evaluated));
    }
    m
}

pub fn cmd_tau(system: &Path, mu_path: &Path, route: Route, opts: &Options) -> Result<Run, CliError> {
    let (sys, canonical) = load_valid_system(system)?;
    let (mu, mu_text) = load_functional(mu_path, &sys)?;
    sys.check_functional(&mu).map_err(input_error)?;
    let d = digest([canonical.as_str(), mu_text.as_str()]);
    let repro = format!(
        "tentropy tau {} {} --route {}{}",
        show(system),
        show(mu_path),
        route.as_str(),
        opts.flags()
    );
    let mut checks = Vec::new();
    let mut direct_value = None;
    let mut dual_value = None;
    if route != Route::Dual {
        let search = PartitionSearch {
            seed: opts.seed,
            ..Default::default()
        };
        match tau_direct(&sys, &mu, opts.n_max.max(1), search) {
            Ok(r) => {
                direct_value = Some(r.value);
                checks.push(record("tau.direct", &d, Verdict::Pass, 0.0, tau_values(&r), None, &repro));
            }
            Err(Error::NotProbability) => {
                let values = BTreeMap::from([(
                    "reason".to_string(),
                    json!("the direct route needs a positive normalized functional"),
                )]);
                checks.push(record("tau.direct", &d, Verdict::Skip, 0.0, values, None, &repro));
            }
            Err(e) => return Err(input_error(e)),
        }
    }
    if route != Route::Direct {
        let r = tau_dual(&sys, &mu).map_err(input_error)?;
        dual_value = Some(r.value);
        checks.push(record("tau.dual", &d, Verdict::Pass, 0.0, tau_values(&r), None, &repro));
    }
    if let (Some(direct), Some(dual)) = (direct_value, dual_value) {
        let tol = opts.tolerance.unwrap_or(1e-3);
        let residual = if direct == dual { 0.0 } else { direct - dual };
        // the direct search is an upper bound; it only has to reach a finite dual value
        let ok = residual >= -1e-12 && (dual == f64::NEG_INFINITY || residual <= tol);
        let values = BTreeMap::from([
            ("direct".to_string(), real(direct)),
            ("dual".to_string(), real(dual)),
            ("tolerance".to_string(), real(tol)),
        ]);
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        checks.push(record("tau.residual", &d, verdict, residual, values, None, &repro));
    }
    let config = ConfigEcho {
        command: "tau".into(),
        inputs: BTreeMap::from([("system".to_string(), show(system)), ("mu".to_string(), show(mu_path))]),
        options: {
            let mut o = opts.echo();
            o.insert("route".into(), json!(route.as_str()));
            o
        },
    };
    Ok(Run::from_report(Report::new(config, checks, vec![COLLAPSE_NOTE.to_string()])))
}

pub fn cmd_certify(system: &Path, suite: Suite, mu_path: Option<&Path>, opts: &Options) -> Result<Run, CliError> {
    let (sys, canonical) = load_valid_system(system)?;
    let mut inputs = BTreeMap::from([("system".to_string(), show(system))]);
    let mut parts = vec![canonical];
    let mut mu = None;
    if let Some(p) = mu_path {
        let (m, text) = load_functional(p, &sys)?;
        sys.check_functional(&m).map_err(input_error)?;
        inputs.insert("mu".to_string(), show(p));
        parts.push(text);
        mu = Some(m);
    }
    let d = digest(parts.iter().map(String::as_str));
    let mut repro = format!("tentropy certify {} --suite {}", show(system), suite.as_str());
    if let Some(p) = mu_path {
        repro.push_str(&format!(" --mu {}", show(p)));
    }
    repro.push_str(&opts.flags());
    let copts = CertifyOptions {
        suite,
        seed: opts.seed,
        n_max: opts.n_max.max(1),
        eps: opts.eps.clone(),
        tolerance: opts.tolerance,
        profile: opts.profile,
        mu,
    };
    let checks = suites::certify(&sys, &copts)
        .into_iter()
        .map(|o| record(&o.name, &d, o.verdict, o.residual, o.values, o.witness, &repro))
        .collect();
    let config = ConfigEcho {
        command: "certify".into(),
        inputs,
        options: {
            let mut o = opts.echo();
            o.insert("suite".into(), json!(suite.as_str()));
            o
        },
    };
    Ok(Run::from_report(Report::new(config, checks, vec![COLLAPSE_NOTE.to_string()])))
}

/// Writes `count` random valid systems as `system_<i>.json` into `dir`.
pub fn cmd_random_systems(count: usize, max_atoms: usize, dir: &Path, opts: &Options) -> Result<Run, CliError> {
    if max_atoms == 0 || max_atoms > 12 {
        return Err(input_error(format!("max atoms must be in 1..=12, got {max_atoms}")));
    }
    fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let width = count.saturating_sub(1).to_string().len().max(3);
    let mut files = Vec::new();
    let mut texts = Vec::new();
    let mut all_valid = true;
    for i in 0..count {
        let atoms = rng.random_range(1..=max_atoms);
        let sys: System = random::system(&mut rng, atoms, 0.2);
        all_valid &= sys.validate().is_valid();
        let mut text = io::system_to_string(&sys);
        text.push('\n');
        let path: PathBuf = dir.join(format!("system_{i:0width$}.json"));
        fs::write(&path, &text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        files.push(show(&path));
        texts.push(text);
    }
    let values = BTreeMap::from([("files".to_string(), json!(files)), ("count".to_string(), json!(count))]);
    let verdict = if all_valid { Verdict::Pass } else { Verdict::Fail };
    let repro = format!(
        "tentropy random-systems --count {count} --max-atoms {max_atoms} --out-dir {}{}",
        show(dir),
        opts.flags()
    );
    let check = record(
        "random_systems",
        &digest(texts.iter().map(String::as_str)),
        verdict,
        0.0,
        values,
        None,
        &repro,
    );
    let config = ConfigEcho {
        command: "random-systems".into(),
        inputs: BTreeMap::from([("out_dir".to_string(), show(dir))]),
        options: {
            let mut o = opts.echo();
            o.insert("count".into(), json!(count));
            o.insert("max_atoms".into(), json!(max_atoms));
            o
        },
    };
    Ok(Run::from_report(Report::new(config, vec![check], Vec::new())))
}

//! Randomized property suites shared by the CLI `verify` verb and the tests.
//!
//! Every suite draws from its own ChaCha stream derived from the configured
//! seed, so a report is a pure function of (seed, trials, fault).

pub mod gen;
mod bounds;
mod identities;
mod stokes;

pub use bounds::bound_suite;
pub use identities::identity_suite;
pub use stokes::stokes_suite;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::str::FromStr;

/// Deliberate defects for checking that the suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Retraction returns the negated chain.
    RetractSign,
}

impl FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "retract-sign" => Ok(Fault::RetractSign),
            _ => Err(format!("unknown fault `{}` (known: retract-sign)", s)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    /// Random instances per property.
    pub trials: usize,
    pub fault: Option<Fault>,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 1, trials: 200, fault: None }
    }
}

impl Config {
    pub(crate) fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

/// Outcome of one property over all its instances.
#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub property: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest residual seen; for inequalities, the largest lb/bound ratio.
    pub max_residual: f64,
    pub tolerance: f64,
    pub first_failure: Option<String>,
}

impl Check {
    pub(crate) fn new(suite: &'static str, property: &'static str, tolerance: f64) -> Self {
        Check { suite, property, instances: 0, failures: 0, max_residual: 0.0, tolerance, first_failure: None }
    }

    /// Records one instance; `ok` decides, `residual` is only reported.
    pub(crate) fn record(&mut self, residual: f64, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if residual > self.max_residual || residual.is_nan() {
            self.max_residual = residual;
        }
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: Config,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn suite_passed(&self, suite: &str) -> bool {
        self.checks.iter().filter(|c| c.suite == suite).all(|c| c.passed())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("verify report\n");
        let _ = writeln!(s, "config seed={} trials={} fault={}", self.config.seed, self.config.trials, match self.config.fault {
            Some(Fault::RetractSign) => "retract-sign",
            None => "none",
        });
        s.push_str("config tolerances: identities 0 (rational), stokes 0 (rational) / 1e-12 (float), bounds lb <= bound*ub\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} [{}] {}: {} instances, {} failures, max residual {:.3e} (tolerance {:e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.suite,
                c.property,
                c.instances,
                c.failures,
                c.max_residual,
                c.tolerance
            );
            if let Some(f) = &c.first_failure {
                let _ = writeln!(s, "  first failure: {}", f);
            }
        }
        let _ = writeln!(s, "result: {}", if self.passed() { "all properties hold" } else { "FAILED" });
        s
    }
}

pub fn run(cfg: &Config) -> Report {
    let mut checks = identity_suite(cfg);
    checks.extend(stokes_suite(cfg));
    checks.extend(bound_suite(cfg));
    Report { config: cfg.clone(), checks }
}

//! The axiom suite: exact identity checks on seeded random points.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::CubicNormStructure;
use crate::error::{Error, Result};
use crate::rational::{scale_vec, Q, Sampler};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub identity: String,
    pub passed: bool,
    pub evaluations: usize,
    /// Offending point; two-point identities list `x` then `y`.
    pub witness: Option<Vec<Q>>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub structure: String,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn ensure(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::AxiomFailure {
                identity: c.identity.clone(),
                witness: c.witness.clone().unwrap_or_default(),
            }),
        }
    }
}

pub const N_OF_BASE: &str = "N(c)=1";
pub const SHARP_SHARP: &str = "x##=N(x)x";
pub const NORM_SHARP: &str = "N(x#)=N(x)^2";
pub const NORM_U: &str = "N(U_x y)=N(x)^2 N(y)";
pub const TRACE_NONDEGENERATE: &str = "T nondegenerate";
pub const NORM_HOMOGENEOUS: &str = "N(tx)=t^3 N(x)";
pub const SHARP_HOMOGENEOUS: &str = "(tx)#=t^2 x#";
pub const U_BASE: &str = "U_c=id";

struct Tally {
    identity: &'static str,
    evaluations: usize,
    failure: Option<(Vec<Q>, String)>,
}

impl Tally {
    fn new(identity: &'static str) -> Self {
        Tally {
            identity,
            evaluations: 0,
            failure: None,
        }
    }

    /// Records one evaluation unless an earlier one already failed.
    fn record(&mut self, witness: impl FnOnce() -> Vec<Q>, outcome: Result<bool>) {
        if self.failure.is_some() {
            return;
        }
        self.evaluations += 1;
        match outcome {
            Ok(true) => {}
            Ok(false) => self.failure = Some((witness(), "identity violated".to_string())),
            Err(e) => self.failure = Some((witness(), format!("evaluation error: {e}"))),
        }
    }

    fn finish(self) -> AxiomCheck {
        let passed = self.failure.is_none();
        let (witness, detail) = match self.failure {
            Some((w, d)) => (Some(w), Some(d)),
            None => (None, None),
        };
        AxiomCheck {
            identity: self.identity.to_string(),
            passed,
            evaluations: self.evaluations,
            witness,
            detail,
        }
    }
}

/// Runs every identity on `trials` seeded random points.
pub fn axiom_suite(s: &CubicNormStructure, trials: usize, seed: u64) -> AxiomReport {
    let n = s.dim();
    let c = s.base_point().to_vec();
    let mut checks = Vec::new();

    let mut base = Tally::new(N_OF_BASE);
    base.record(|| c.clone(), s.norm(&c).map(|v| v.is_one()));
    checks.push(base.finish());

    let mut nondeg = Tally::new(TRACE_NONDEGENERATE);
    nondeg.record(Vec::new, Ok(s.trace_form().is_nondegenerate()));
    checks.push(nondeg.finish());

    let mut sharp_sharp = Tally::new(SHARP_SHARP);
    let mut norm_sharp = Tally::new(NORM_SHARP);
    let mut norm_u = Tally::new(NORM_U);
    let mut norm_hom = Tally::new(NORM_HOMOGENEOUS);
    let mut sharp_hom = Tally::new(SHARP_HOMOGENEOUS);
    let mut u_base = Tally::new(U_BASE);

    let mut rng = Sampler::new(seed);
    for _ in 0..trials {
        let x = rng.vector(n);
        let y = rng.vector(n);
        let t = rng.nonzero_coordinate();
        let both = || [x.clone(), y.clone()].concat();

        let nx = s.norm(&x);
        let xs = s.adjoint(&x);
        match (&nx, &xs) {
            (Ok(nx), Ok(xs)) => {
                sharp_sharp.record(|| x.clone(), s.adjoint(xs).map(|v| v == scale_vec(nx, &x)));
                norm_sharp.record(|| x.clone(), s.norm(xs).map(|v| v == nx * nx));
                let lhs = s.u_operator(&x, &y).and_then(|u| s.norm(&u));
                let rhs = s.norm(&y).map(|ny| nx * nx * ny);
                norm_u.record(both, lhs.and_then(|l| rhs.map(|r| l == r)));
                let tx = scale_vec(&t, &x);
                norm_hom.record(|| x.clone(), s.norm(&tx).map(|v| v == &t * &t * &t * nx));
                sharp_hom.record(|| x.clone(), s.adjoint(&tx).map(|v| v == scale_vec(&(&t * &t), xs)));
            }
            _ => {
                let err = nx.clone().and(xs.clone().map(|_| Q::zero())).map(|_| true);
                for tally in [&mut sharp_sharp, &mut norm_sharp, &mut norm_u, &mut norm_hom, &mut sharp_hom] {
                    tally.record(|| x.clone(), err.clone());
                }
            }
        }
        u_base.record(|| y.clone(), s.u_operator(&c, &y).map(|v| v == y));
    }
    checks.extend([sharp_sharp, norm_sharp, norm_u, norm_hom, sharp_hom, u_base].map(Tally::finish));

    AxiomReport {
        structure: s.describe(),
        dim: n,
        trials,
        seed,
        checks,
    }
}

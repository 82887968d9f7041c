//! Subcommand execution. Every command builds what it needs from the
//! config, appends check records, and leaves verdicts to the report.

use std::collections::BTreeMap;
use std::time::Instant;

use albert_core::assoc::{AssocElement, AssocModel};
use albert_core::catalog::cyclic_permutation_automorphism;
use albert_core::conformal::{ConformalWord, Letter};
use albert_core::cubic::{axiom_suite, CubicNormStructure, Sweep};
use albert_core::rational::{add_vec, Sampler};
use albert_core::strgroup::{classify_subalgebra, fixed_subalgebra, Generator, StrGroup};
use albert_core::tits::{extend_galois, isotope, isotope_params, isotope_params_albert, CertifiedOperator};
use albert_core::Error;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::config::{AutomorphismName, Coords, GeneratorSpec, LetterSpec, RunConfig};
use crate::error::ForgeError;
use crate::recipe::{parse_rat, parse_rats, Built, Registry};
use crate::report::{rat, rats_value, CheckRecord, Report};

pub const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    CheckAxioms,
    Isotope,
    VerifyIso,
    ExtendAut,
    Word,
    Fixed,
    Conformal,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::CheckAxioms => "check-axioms",
            Command::Isotope => "isotope",
            Command::VerifyIso => "verify-iso",
            Command::ExtendAut => "extend-aut",
            Command::Word => "word",
            Command::Fixed => "fixed",
            Command::Conformal => "conformal",
            Command::Report => "report",
        }
    }

    fn randomized(self, config: &RunConfig) -> bool {
        match self {
            Command::CheckAxioms => !config.suite.axioms.is_empty(),
            Command::Isotope => !config.isotope.is_empty(),
            Command::Conformal => !config.conformal.is_empty(),
            Command::Report => {
                !config.suite.axioms.is_empty() || !config.isotope.is_empty() || !config.conformal.is_empty()
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

/// Core errors that say the input was wrong rather than that a check failed.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::SpecMismatch
            | Error::AlgebraMismatch
            | Error::NotInvertible
            | Error::MapUndefinedForSpec { .. }
            | Error::InvalidSpec(_)
            | Error::InvalidAlgebra(_)
            | Error::NotHermitian
            | Error::NotAdmissible(_)
            | Error::DimensionMismatch { .. }
            | Error::DimensionTooLarge(_)
            | Error::HypothesisViolation(_)
            | Error::StructureMismatch
    )
}

/// Splits a core error into a failed check or a configuration error.
fn settle(record: CheckRecord, what: &str, e: Error) -> Result<CheckRecord, ForgeError> {
    if is_input_error(&e) {
        Err(ForgeError::build(what, e))
    } else {
        Ok(record.fail(e.to_string(), None))
    }
}

pub struct Runner<'c> {
    config: &'c RunConfig,
    registry: Registry<'c>,
    sweep: &'c dyn Sweep,
    seed: Option<u64>,
    trials: usize,
    automorphisms: BTreeMap<(String, AutomorphismName), CertifiedOperator>,
    checks: Vec<CheckRecord>,
}

impl<'c> Runner<'c> {
    pub fn new(config: &'c RunConfig, options: &Options, sweep: &'c dyn Sweep) -> Self {
        Runner {
            config,
            registry: Registry::new(config),
            sweep,
            seed: options.seed.or(config.seed),
            trials: options.trials.or(config.trials).unwrap_or(DEFAULT_TRIALS),
            automorphisms: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    fn seed(&self) -> Result<u64, ForgeError> {
        self.seed
            .ok_or_else(|| ForgeError::Config("--seed is required for randomized suites".to_string()))
    }

    pub fn run(mut self, command: Command) -> Result<Report, ForgeError> {
        let start = Instant::now();
        if command.randomized(self.config) {
            self.seed()?;
        }
        match command {
            Command::Build => self.build()?,
            Command::CheckAxioms => self.check_axioms()?,
            Command::Isotope => self.isotope()?,
            Command::VerifyIso => self.verify_iso()?,
            Command::ExtendAut => self.extend_aut()?,
            Command::Word => self.word()?,
            Command::Fixed => self.fixed()?,
            Command::Conformal => self.conformal()?,
            Command::Report => {
                self.build()?;
                self.check_axioms()?;
                self.isotope()?;
                self.verify_iso()?;
                self.extend_aut()?;
                self.word()?;
                self.fixed()?;
                self.conformal()?;
            }
        }
        Ok(Report::new(
            command.name(),
            self.seed,
            self.trials,
            self.config.clone(),
            self.checks,
            start.elapsed(),
        ))
    }

    fn tits(&mut self, name: &str) -> Result<Built, ForgeError> {
        let built = self.registry.structure(name)?;
        if built.tits.is_none() {
            return Err(ForgeError::Config(format!("{name} is not a Tits process")));
        }
        Ok(built)
    }

    fn build(&mut self) -> Result<(), ForgeError> {
        for built in self.registry.all_structures()? {
            let t = Instant::now();
            let s = &built.structure;
            let nc = s.norm(s.base_point());
            let mut rec = CheckRecord::new("build", &built.name)
                .with("dim", s.dim())
                .with("description", s.describe())
                .with("provenance", format!("{:?}", s.provenance()))
                .with("trace_nondegenerate", s.trace_form().is_nondegenerate())
                .evaluated(1);
            rec = match nc {
                Ok(n) => rec.with("norm_of_base_point", rat(&n)).require(n.is_one(), "N(c) != 1"),
                Err(e) => settle(rec, &built.name, e)?,
            };
            self.checks.push(rec.timed(t.elapsed()));
        }
        Ok(())
    }

    fn push_axioms(&mut self, prefix: &str, name: &str, s: &CubicNormStructure, seed: u64) {
        let t = Instant::now();
        let report = axiom_suite(s, self.trials, seed);
        let elapsed = t.elapsed() / report.checks.len().max(1) as u32;
        for c in report.checks {
            let mut rec = CheckRecord::new(format!("{prefix}{}", c.identity), name).evaluated(c.evaluations);
            if !c.passed {
                rec = rec.fail(c.detail.unwrap_or_default(), c.witness.as_deref());
            }
            self.checks.push(rec.timed(elapsed));
        }
    }

    fn check_axioms(&mut self) -> Result<(), ForgeError> {
        let names = self.config.suite.axioms.clone();
        for name in names {
            let seed = self.seed()?;
            let built = self.registry.structure(&name)?;
            self.push_axioms("axioms/", &name, &built.structure, seed);
        }
        Ok(())
    }

    fn isotope(&mut self) -> Result<(), ForgeError> {
        for task in self.config.isotope.clone() {
            let seed = self.seed()?;
            let t = Instant::now();
            let built = self.registry.structure(&task.structure)?;
            let v = self.registry.coords(&built, &task.v)?;
            let s = &built.structure;
            let iso = isotope(s, &v).map_err(|e| ForgeError::build(&task.structure, e))?;
            let nv = s.norm(&v).map_err(|e| ForgeError::build(&task.structure, e))?;
            let unit = iso.base_point().to_vec();
            let rec = CheckRecord::new("isotope/unit", &task.structure)
                .with("v", rats_value(&v))
                .with("norm_of_v", rat(&nv))
                .with("unit", rats_value(&unit))
                .evaluated(1);
            let rec = match iso.norm(&unit) {
                Ok(n) => rec.require(n.is_one(), format!("N^(v)(c^(v)) = {n}")),
                Err(e) => settle(rec, &task.structure, e)?,
            };
            self.checks.push(rec.timed(t.elapsed()));
            self.push_axioms("isotope/axioms/", &task.structure, &iso, seed);
        }
        Ok(())
    }

    fn verify_iso(&mut self) -> Result<(), ForgeError> {
        for task in self.config.verify_iso.clone() {
            let t = Instant::now();
            let built = self.tits(&task.structure)?;
            let j = built.tits.as_ref().expect("checked");
            let v = AssocElement::new(j.algebra(), parse_rats(&task.v)?)
                .map_err(|e| ForgeError::build(&task.structure, e))?;
            let etale = matches!(j.algebra().model(), AssocModel::Etale { .. });
            let result = if etale {
                isotope_params(j, &v, self.sweep)
            } else {
                isotope_params_albert(j, &v, self.sweep)
            };
            let rec = CheckRecord::new("verify-iso", &task.structure).with("v", rats_value(v.coords()));
            let rec = match result {
                Ok(iso) => rec
                    .with("target_u", rats_value(iso.target_u.coords()))
                    .with("target_mu", rats_value(iso.target_mu.coords()))
                    .with("nu", rat(&iso.map.certificate.nu))
                    .with("fixes_identity", iso.map.fixes_identity)
                    .evaluated(iso.map.certificate.evaluations),
                Err(e) => settle(rec, &task.structure, e)?,
            };
            self.checks.push(rec.timed(t.elapsed()));
        }
        Ok(())
    }

    fn automorphism(&mut self, structure: &str, which: AutomorphismName) -> Result<Result<CertifiedOperator, Error>, ForgeError> {
        let key = (structure.to_string(), which);
        if let Some(op) = self.automorphisms.get(&key) {
            return Ok(Ok(op.clone()));
        }
        let built = self.tits(structure)?;
        let j = built.tits.as_ref().expect("checked");
        let op = match which {
            AutomorphismName::Galois => extend_galois(j, self.sweep),
            AutomorphismName::CyclicPermutation => cyclic_permutation_automorphism(j, self.sweep),
        };
        match op {
            Ok(op) => {
                self.automorphisms.insert(key, op.clone());
                Ok(Ok(op))
            }
            Err(e) if is_input_error(&e) => Err(ForgeError::build(structure, e)),
            Err(e) => Ok(Err(e)),
        }
    }

    fn extend_aut(&mut self) -> Result<(), ForgeError> {
        for task in self.config.extend_aut.clone() {
            let t = Instant::now();
            let rec = CheckRecord::new(format!("extend-aut/{}", auto_label(task.automorphism)), &task.structure);
            let rec = match self.automorphism(&task.structure, task.automorphism)? {
                Ok(op) => {
                    let order_three = op.matrix.pow(3).is_identity();
                    rec.with("nu", rat(&op.certificate.nu))
                        .with("fixes_identity", op.fixes_identity)
                        .with("order_three", order_three)
                        .evaluated(op.certificate.evaluations)
                        .require(op.is_isomorphism(), "not an automorphism")
                        .require(order_three, "cube is not the identity")
                }
                Err(e) => rec.fail(e.to_string(), None),
            };
            self.checks.push(rec.timed(t.elapsed()));
        }
        Ok(())
    }

    /// Builds the generators of a word; `Err(record)` when an automorphism
    /// letter itself failed to certify.
    fn generators(
        &mut self,
        structure: &str,
        s: &CubicNormStructure,
        specs: &[GeneratorSpec],
    ) -> Result<Result<Vec<Generator>, String>, ForgeError> {
        let mut out = Vec::with_capacity(specs.len());
        for g in specs {
            out.push(match g {
                GeneratorSpec::ScalarHomothety(l) => Generator::Scalar(parse_rat(l)?),
                GeneratorSpec::UOperator(Coords::Named(n)) if n == "c" => Generator::UOperator(s.base_point().to_vec()),
                GeneratorSpec::UOperator(Coords::Named(n)) => {
                    return Err(ForgeError::Config(format!("unknown named element {n:?}; only \"c\" is defined")))
                }
                GeneratorSpec::UOperator(Coords::Explicit(v)) => {
                    let built = self.registry.structure(structure)?;
                    Generator::UOperator(self.registry.coords(&built, v)?)
                }
                GeneratorSpec::Automorphism(which) => match self.automorphism(structure, *which)? {
                    Ok(op) => Generator::Automorphism {
                        label: auto_label(*which).to_string(),
                        matrix: op.matrix,
                    },
                    Err(e) => return Ok(Err(e.to_string())),
                },
            });
        }
        Ok(Ok(out))
    }

    fn word(&mut self) -> Result<(), ForgeError> {
        let tasks = self.config.word.clone();
        for (k, task) in tasks.iter().enumerate() {
            let t = Instant::now();
            let s = self.registry.structure(&task.structure)?.structure;
            let rec = CheckRecord::new(format!("word/{k}"), &task.structure);
            let gens = match self.generators(&task.structure, &s, &task.generators)? {
                Ok(g) => g,
                Err(detail) => {
                    self.checks.push(rec.fail(detail, None).timed(t.elapsed()));
                    continue;
                }
            };
            let letters: Vec<Value> = gens.iter().map(|g| Value::from(g.label())).collect();
            let multipliers = gens
                .iter()
                .map(|g| g.multiplier(&s).map(|m| Value::from(rat(&m))))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ForgeError::build(&task.structure, e))?;
            let rec = rec.with("letters", letters).with("letter_multipliers", multipliers);
            let group = StrGroup::new(&s, self.sweep).map_err(|e| ForgeError::build(&task.structure, e))?;
            let rec = match group.make_word(gens) {
                Ok(w) => {
                    let mut rec = rec
                        .with("nu", rat(w.nu()))
                        .with("image_of_identity", rats_value(&w.image_of_identity()))
                        .with("automorphism", w.is_automorphism())
                        .evaluated(w.certificate().evaluations);
                    if let Some(expect) = &task.expect_nu {
                        let expect = parse_rat(expect)?;
                        rec = rec.require(w.nu() == &expect, format!("nu = {}, expected {expect}", w.nu()));
                    }
                    rec
                }
                Err(e) => settle(rec, &task.structure, e)?,
            };
            self.checks.push(rec.timed(t.elapsed()));
        }
        Ok(())
    }

    fn fixed(&mut self) -> Result<(), ForgeError> {
        let tasks = self.config.fixed.clone();
        for (k, task) in tasks.iter().enumerate() {
            let t = Instant::now();
            let s = self.registry.structure(&task.structure)?.structure;
            let rec = CheckRecord::new(format!("fixed/{k}"), &task.structure);
            let gens = match self.generators(&task.structure, &s, &task.generators)? {
                Ok(g) => g,
                Err(detail) => {
                    self.checks.push(rec.fail(detail, None).timed(t.elapsed()));
                    continue;
                }
            };
            let group = StrGroup::new(&s, self.sweep).map_err(|e| ForgeError::build(&task.structure, e))?;
            let outcome = group.make_word(gens).and_then(|w| {
                let h = fixed_subalgebra(&w)?;
                let closed = h.is_closed()?;
                let stratum = classify_subalgebra(&h)?;
                Ok((h, closed, stratum))
            });
            let rec = match outcome {
                Ok((h, closed, stratum)) => {
                    let mut rec = rec
                        .with("dim", h.dim())
                        .with("stratum", stratum.dim.to_string())
                        .with("kind", stratum.label)
                        .with("diagnostic", stratum.diagnostic.clone())
                        .with("sharp_closed", closed)
                        .evaluated(1)
                        .require(closed, "fixed subspace is not closed under #");
                    if let Some(d) = task.expect_dim {
                        rec = rec.require(h.dim() == d, format!("dimension {}, expected {d}", h.dim()));
                    }
                    rec
                }
                Err(e) => settle(rec, &task.structure, e)?,
            };
            self.checks.push(rec.timed(t.elapsed()));
        }
        Ok(())
    }

    fn conformal(&mut self) -> Result<(), ForgeError> {
        let tasks = self.config.conformal.clone();
        for (k, task) in tasks.iter().enumerate() {
            let seed = self.seed()?;
            let s = self.registry.structure(&task.structure)?.structure;
            for rec in conformal_identities(&task.structure, &s, self.trials, seed, k as u64) {
                self.checks.push(rec);
            }
            if task.letters.is_empty() {
                continue;
            }
            let t = Instant::now();
            let mut letters = Vec::with_capacity(task.letters.len());
            for l in &task.letters {
                letters.push(match l {
                    LetterSpec::Translate(a) => {
                        let built = self.registry.structure(&task.structure)?;
                        Letter::Translate(self.registry.coords(&built, a)?)
                    }
                    LetterSpec::InvertJ => Letter::InvertJ,
                });
            }
            let w = ConformalWord::new(&s, letters).map_err(|e| ForgeError::build(&task.structure, e))?;
            let rec = CheckRecord::new(format!("conformal/{k}/domain"), &task.structure);
            let rec = match w.sample_domain(self.trials, seed) {
                Ok(d) => rec
                    .with("defined", d.defined)
                    .with("trials", d.trials)
                    .with("undefined_at_step", d.undefined_at.clone())
                    .evaluated(d.trials),
                Err(e) => settle(rec, &task.structure, e)?,
            };
            self.checks.push(rec.timed(t.elapsed()));
        }
        Ok(())
    }
}

fn auto_label(a: AutomorphismName) -> &'static str {
    match a {
        AutomorphismName::Galois => "galois",
        AutomorphismName::CyclicPermutation => "cyclic-permutation",
    }
}

/// `j∘j = id` and `N(j(x)) = -N(x)⁻¹` on invertible samples, and
/// `t_a∘t_b = t_(a+b)` everywhere.
pub fn conformal_identities(name: &str, s: &CubicNormStructure, trials: usize, seed: u64, stream: u64) -> Vec<CheckRecord> {
    let n = s.dim();
    let mut rng = Sampler::split(seed, stream);
    let j = ConformalWord::new(s, vec![Letter::InvertJ]).expect("valid");
    let jj = ConformalWord::new(s, vec![Letter::InvertJ, Letter::InvertJ]).expect("valid");
    let mut involution = CheckRecord::new("conformal/j∘j=id", name);
    let mut norm = CheckRecord::new("conformal/N(j(x))=-N(x)^-1", name);
    let mut translate = CheckRecord::new("conformal/t_a∘t_b=t_(a+b)", name);
    let (mut defined, mut singular) = (0usize, 0usize);
    let t = Instant::now();
    for _ in 0..trials {
        let x = rng.vector(n);
        let a = rng.vector(n);
        let b = rng.vector(n);
        let tt = ConformalWord::new(s, vec![Letter::Translate(a.clone()), Letter::Translate(b.clone())]).expect("dims");
        let t1 = ConformalWord::new(s, vec![Letter::Translate(add_vec(&a, &b))]).expect("dims");
        if translate.passed() {
            translate.evaluations += 1;
            match (tt.eval(&x), t1.eval(&x)) {
                (Ok(l), Ok(r)) if l == r => {}
                _ => translate = translate.fail("translations do not compose", Some(&x)),
            }
        }
        let nx = match s.norm(&x) {
            Ok(v) => v,
            Err(e) => {
                involution = involution.fail(e.to_string(), Some(&x));
                break;
            }
        };
        if nx.is_zero() {
            singular += 1;
            if involution.passed() && !matches!(jj.eval(&x), Err(Error::Undefined { step: 0 })) {
                involution = involution.fail("j is defined at a point of norm zero", Some(&x));
            }
            continue;
        }
        defined += 1;
        if involution.passed() {
            involution.evaluations += 1;
            if jj.eval(&x).ok().as_deref() != Some(&x[..]) {
                involution = involution.fail("j(j(x)) != x", Some(&x));
            }
        }
        if norm.passed() {
            norm.evaluations += 1;
            let ok = j
                .eval(&x)
                .and_then(|y| s.norm(&y))
                .map(|ny| ny == -nx.recip())
                .unwrap_or(false);
            if !ok {
                norm = norm.fail("N(j(x)) != -1/N(x)", Some(&x));
            }
        }
    }
    let elapsed = t.elapsed() / 3;
    let defined_v = Value::from(defined);
    let singular_v = Value::from(singular);
    vec![
        involution.with("defined", defined_v.clone()).with("singular", singular_v.clone()).timed(elapsed),
        norm.with("defined", defined_v).with("singular", singular_v).timed(elapsed),
        translate.timed(elapsed),
    ]
}

//! Partial birational maps generated by translations `t_a(x) = x + a`,
//! the inversion `j(x) = -x⁻¹` and structure-group words.
//!
//! Letters are stored in written order: `[w, t_a, j]` is `w ∘ t_a ∘ j`, so
//! evaluation applies the last letter first. Step `i` is the `i`-th
//! application, counted from zero.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cubic::CubicNormStructure;
use crate::error::{Error, Result};
use crate::rational::{add_vec, is_zero_vec, neg_vec, show, Q, Sampler};
use crate::strgroup::{StrGroup, StrWord};

#[derive(Clone)]
pub enum Letter {
    Translate(Vec<Q>),
    InvertJ,
    Str(StrWord),
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Translate(a) => write!(f, "t{}", show(a)),
            Letter::InvertJ => f.write_str("j"),
            Letter::Str(w) => write!(f, "{w:?}"),
        }
    }
}

#[derive(Clone)]
pub struct ConformalWord {
    structure: CubicNormStructure,
    letters: Vec<Letter>,
}

impl fmt::Debug for ConformalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.letters).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainReport {
    pub trials: usize,
    pub defined: usize,
    /// `undefined_at[i]`: samples first undefined at step `i`.
    pub undefined_at: Vec<usize>,
}

impl DomainReport {
    /// Defined fraction as `(defined, trials)`.
    pub fn density(&self) -> (usize, usize) {
        (self.defined, self.trials)
    }

    /// `defined / trials > num / den`.
    pub fn exceeds(&self, num: usize, den: usize) -> bool {
        self.defined * den > num * self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticCheck {
    pub compared: usize,
    pub mismatch: Option<Vec<Q>>,
}

impl SemanticCheck {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

impl ConformalWord {
    pub fn new(structure: &CubicNormStructure, letters: Vec<Letter>) -> Result<Self> {
        for l in &letters {
            match l {
                Letter::Translate(a) if a.len() != structure.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: structure.dim(),
                        found: a.len(),
                    })
                }
                Letter::Str(w) if !w.structure().same_as(structure) => return Err(Error::StructureMismatch),
                _ => {}
            }
        }
        Ok(ConformalWord {
            structure: structure.clone(),
            letters,
        })
    }

    pub fn identity(structure: &CubicNormStructure) -> Self {
        ConformalWord {
            structure: structure.clone(),
            letters: Vec::new(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Evaluates at `x`; `Error::Undefined { step }` when an inversion meets
    /// a point of norm zero.
    pub fn eval(&self, x: &[Q]) -> Result<Vec<Q>> {
        let mut v = x.to_vec();
        for (step, letter) in self.letters.iter().rev().enumerate() {
            v = match letter {
                Letter::Translate(a) => add_vec(&v, a),
                Letter::InvertJ => match self.structure.invert(&v) {
                    Ok(inv) => neg_vec(&inv),
                    Err(Error::NotInvertible) => return Err(Error::Undefined { step }),
                    Err(e) => return Err(e),
                },
                Letter::Str(w) => w.apply(&v),
            };
        }
        Ok(v)
    }

    /// `u ∘ v`.
    pub fn compose_words(&self, other: &ConformalWord) -> Result<ConformalWord> {
        if !self.structure.same_as(&other.structure) {
            return Err(Error::StructureMismatch);
        }
        let letters = self.letters.iter().chain(&other.letters).cloned().collect();
        Ok(ConformalWord {
            structure: self.structure.clone(),
            letters,
        })
    }

    /// Local rewrites `t_a t_b → t_{a+b}`, `t_0 → id`, `j j → id`,
    /// `w1 w2 → (w1 ∘ w2)`.
    pub fn simplify(&self, group: &StrGroup<'_>) -> Result<ConformalWord> {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for letter in &self.letters {
            let merged = match (out.last(), letter) {
                (Some(Letter::Translate(a)), Letter::Translate(b)) => Some(Some(Letter::Translate(add_vec(a, b)))),
                (Some(Letter::InvertJ), Letter::InvertJ) => Some(None),
                (Some(Letter::Str(w1)), Letter::Str(w2)) => Some(Some(Letter::Str(group.compose(w1, w2)?))),
                _ => None,
            };
            match merged {
                Some(replacement) => {
                    out.pop();
                    if let Some(r) = replacement {
                        if !matches!(&r, Letter::Translate(a) if is_zero_vec(a)) {
                            out.push(r);
                        }
                    }
                }
                None => {
                    if !matches!(letter, Letter::Translate(a) if is_zero_vec(a)) {
                        out.push(letter.clone());
                    }
                }
            }
        }
        Ok(ConformalWord {
            structure: self.structure.clone(),
            letters: out,
        })
    }

    /// Whether the word has the shape `w ∘ t_a ∘ j ∘ t_b ∘ j ∘ t_c`, with any
    /// of `w`, `t_a`, `t_b`, `t_c` possibly absent.
    pub fn is_normal_form(&self) -> bool {
        let shape: String = self
            .letters
            .iter()
            .map(|l| match l {
                Letter::Translate(_) => 't',
                Letter::InvertJ => 'j',
                Letter::Str(_) => 'w',
            })
            .collect();
        let mut rest = shape.as_str();
        rest = rest.strip_prefix('w').unwrap_or(rest);
        rest = rest.strip_prefix('t').unwrap_or(rest);
        let Some(r) = rest.strip_prefix('j') else {
            return rest.is_empty();
        };
        rest = r.strip_prefix('t').unwrap_or(r);
        let Some(r) = rest.strip_prefix('j') else {
            return rest.is_empty();
        };
        r.is_empty() || r == "t"
    }

    pub fn sample_domain(&self, trials: usize, seed: u64) -> Result<DomainReport> {
        let mut rng = Sampler::new(seed);
        let mut undefined_at = alloc::vec![0; self.letters.len()];
        let mut defined = 0;
        for _ in 0..trials {
            let x = rng.vector(self.structure.dim());
            match self.eval(&x) {
                Ok(_) => defined += 1,
                Err(Error::Undefined { step }) => undefined_at[step] += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(DomainReport {
            trials,
            defined,
            undefined_at,
        })
    }

    /// Compares two words on `points` random points where both are defined.
    pub fn semantic_equal(&self, other: &ConformalWord, points: usize, seed: u64) -> Result<SemanticCheck> {
        if !self.structure.same_as(&other.structure) {
            return Err(Error::StructureMismatch);
        }
        let mut rng = Sampler::new(seed);
        let mut compared = 0;
        let mut attempts = 0;
        while compared < points && attempts < 20 * points {
            attempts += 1;
            let x = rng.vector(self.structure.dim());
            let (a, b) = match (self.eval(&x), other.eval(&x)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(Error::Undefined { .. }), _) | (_, Err(Error::Undefined { .. })) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            compared += 1;
            if a != b {
                return Ok(SemanticCheck {
                    compared,
                    mismatch: Some(x),
                });
            }
        }
        Ok(SemanticCheck {
            compared,
            mismatch: None,
        })
    }
}

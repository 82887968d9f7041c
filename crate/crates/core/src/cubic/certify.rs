//! Exact certification of `N_2(f(x)) = ν N_1(x)` as polynomials.
//!
//! A cubic form in `n` variables has `C(n+2, 3)` coefficients, and the
//! evaluation set `{e_i} ∪ {e_i ± e_j : i<j} ∪ {e_i + e_j + e_k : i<j<k}`
//! determines them by a triangular solve. Two cubic forms therefore agree
//! iff they agree on that set.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::CubicNormStructure;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{zeros, Q};

/// Index-ordered search strategy over the evaluation set. The core ships a
/// sequential sweep; std callers can plug in a parallel one.
pub trait Sweep: Sync {
    /// Smallest index in `0..count` at which `check` is not `Ok(true)`,
    /// with errors reported for the smallest such index.
    fn first_failure(&self, count: usize, check: &(dyn Fn(usize) -> Result<bool> + Sync)) -> Result<Option<usize>>;

    fn values(&self, count: usize, eval: &(dyn Fn(usize) -> Result<Q> + Sync)) -> Result<Vec<Q>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialSweep;

impl Sweep for SequentialSweep {
    fn first_failure(&self, count: usize, check: &(dyn Fn(usize) -> Result<bool> + Sync)) -> Result<Option<usize>> {
        for i in 0..count {
            if !check(i)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn values(&self, count: usize, eval: &(dyn Fn(usize) -> Result<Q> + Sync)) -> Result<Vec<Q>> {
        (0..count).map(eval).collect()
    }
}

/// `Σ signs[k] e_{idx[k]}` over the first `len` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarPoint {
    pub idx: [usize; 3],
    pub signs: [i8; 3],
    pub len: usize,
}

impl PolarPoint {
    pub fn to_vec(&self, n: usize) -> Vec<Q> {
        let mut v = zeros(n);
        for k in 0..self.len {
            v[self.idx[k]] += Q::from_integer(self.signs[k].into());
        }
        v
    }

    /// `f(p)` from the columns of `f`.
    pub fn image(&self, columns: &[Vec<Q>]) -> Vec<Q> {
        let mut v = columns[self.idx[0]].clone();
        if self.signs[0] < 0 {
            v.iter_mut().for_each(|x| *x = -&*x);
        }
        for k in 1..self.len {
            let col = &columns[self.idx[k]];
            if self.signs[k] > 0 {
                v.iter_mut().zip(col).for_each(|(a, b)| *a += b);
            } else {
                v.iter_mut().zip(col).for_each(|(a, b)| *a -= b);
            }
        }
        v
    }
}

/// The evaluation set in canonical order: singles, then `e_i + e_j`,
/// `e_i - e_j` per pair, then triples.
pub fn polarization_points(n: usize) -> Vec<PolarPoint> {
    let mut pts = Vec::with_capacity(polarization_count(n));
    for i in 0..n {
        pts.push(PolarPoint {
            idx: [i, 0, 0],
            signs: [1, 0, 0],
            len: 1,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                pts.push(PolarPoint {
                    idx: [i, j, 0],
                    signs: [1, s, 0],
                    len: 2,
                });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                pts.push(PolarPoint {
                    idx: [i, j, k],
                    signs: [1, 1, 1],
                    len: 3,
                });
            }
        }
    }
    pts
}

/// `C(n+2, 3)`, the number of cubic monomials in `n` variables.
pub fn polarization_count(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub holds: bool,
    pub nu: Q,
    /// Points evaluated before the verdict (all of them when `holds`).
    pub evaluations: usize,
    /// First evaluation point where the identity fails.
    pub witness: Option<Vec<Q>>,
    /// `(N_2(f(p)), ν N_1(p))` at the witness.
    pub witness_values: Option<(Q, Q)>,
}

/// Source-side norm values on the evaluation set, reusable across
/// certifications against the same source structure.
#[derive(Debug, Clone)]
pub struct PolarizationOracle {
    source: CubicNormStructure,
    points: Vec<PolarPoint>,
    values: Vec<Q>,
}

impl PolarizationOracle {
    pub fn new(source: &CubicNormStructure, sweep: &dyn Sweep) -> Result<Self> {
        let n = source.dim();
        let points = polarization_points(n);
        let values = sweep.values(points.len(), &|i| source.norm(&points[i].to_vec(n)))?;
        Ok(PolarizationOracle {
            source: source.clone(),
            points,
            values,
        })
    }

    pub fn source(&self) -> &CubicNormStructure {
        &self.source
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn certify(&self, f: &Matrix, target: &CubicNormStructure, nu: &Q, sweep: &dyn Sweep) -> Result<Certificate> {
        let n = self.source.dim();
        if target.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: target.dim(),
            });
        }
        if f.rows() != n || f.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if f.rows() != n { f.rows() } else { f.cols() },
            });
        }
        // Clearing denominators once keeps the per-point arithmetic integral;
        // N is cubic, so the scaled check is against `d³ ν N_1`.
        let d = (0..n)
            .flat_map(|r| f.row(r).iter())
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let d = Q::from_integer(d);
        let d3 = &d * &d * &d;
        let columns: Vec<Vec<Q>> = (0..n)
            .map(|j| f.column(j).iter().map(|v| v * &d).collect())
            .collect();
        let scaled_lhs = |i: usize| target.norm(&self.points[i].image(&columns));
        let lhs = |i: usize| scaled_lhs(i).map(|v| v / &d3);
        let rhs = |i: usize| {
            let v = &self.values[i];
            if v.is_zero() {
                Q::zero()
            } else {
                nu * v
            }
        };
        let fail = sweep.first_failure(self.points.len(), &|i| Ok(scaled_lhs(i)? == &rhs(i) * &d3))?;
        Ok(match fail {
            None => Certificate {
                holds: true,
                nu: nu.clone(),
                evaluations: self.points.len(),
                witness: None,
                witness_values: None,
            },
            Some(i) => Certificate {
                holds: false,
                nu: nu.clone(),
                evaluations: i + 1,
                witness: Some(self.points[i].to_vec(n)),
                witness_values: Some((lhs(i)?, rhs(i))),
            },
        })
    }
}

/// Decides `N_2(f(x)) = ν N_1(x)` identically in `x`.
pub fn cubic_form_equal(
    f: &Matrix,
    s1: &CubicNormStructure,
    s2: &CubicNormStructure,
    nu: &Q,
    sweep: &dyn Sweep,
) -> Result<Certificate> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    PolarizationOracle::new(s1, sweep)?.certify(f, s2, nu, sweep)
}

//! Dense coefficient tables of cubic forms, used as an independent oracle
//! for [`super::cubic_form_equal`] in small dimension.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use super::certify::polarization_points;
use super::CubicNormStructure;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Q;

/// Largest dimension accepted by [`symbolic_expand`].
pub const MAX_SYMBOLIC_DIM: usize = 9;

/// `Σ coeff[i,j,k] x_i x_j x_k` over sorted index triples `i ≤ j ≤ k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicPoly {
    n: usize,
    terms: BTreeMap<[usize; 3], Q>,
}

fn sorted(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

impl CubicPoly {
    pub fn zero(n: usize) -> Self {
        CubicPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> Q {
        self.terms.get(&sorted([i, j, k])).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, i: usize, j: usize, k: usize, c: &Q) {
        if c.is_zero() {
            return;
        }
        let key = sorted([i, j, k]);
        let e = self.terms.entry(key).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Nonzero terms in index order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize; 3], &Q)> {
        self.terms.iter()
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|([i, j, k], c)| c * &x[*i] * &x[*j] * &x[*k])
            .sum()
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = CubicPoly::zero(self.n);
        for ([i, j, k], c) in &self.terms {
            out.add_term(*i, *j, *k, &(c * s));
        }
        out
    }

    /// The form `x ↦ P(f x)`, expanded monomial by monomial.
    pub fn substitute(&self, f: &Matrix) -> Self {
        let n = f.cols();
        let rows: Vec<Vec<(usize, Q)>> = (0..f.rows())
            .map(|r| {
                f.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        let mut dense = alloc::vec![Q::zero(); n * n * n];
        for ([i, j, k], c) in &self.terms {
            for (a, fa) in &rows[*i] {
                let ca = c * fa;
                for (b, fb) in &rows[*j] {
                    let cab = &ca * fb;
                    for (d, fd) in &rows[*k] {
                        let t = sorted([*a, *b, *d]);
                        dense[(t[0] * n + t[1]) * n + t[2]] += &cab * fd;
                    }
                }
            }
        }
        let mut out = CubicPoly::zero(n);
        for a in 0..n {
            for b in a..n {
                for d in b..n {
                    let v = &dense[(a * n + b) * n + d];
                    if !v.is_zero() {
                        out.terms.insert([a, b, d], v.clone());
                    }
                }
            }
        }
        out
    }

    /// Recovers the coefficients from values on the evaluation set of
    /// [`polarization_points`], in that order.
    pub fn from_polarization_values(n: usize, values: &[Q]) -> Self {
        let pts = polarization_points(n);
        let mut at = BTreeMap::new();
        for (p, v) in pts.iter().zip(values) {
            at.insert((p.idx, p.signs, p.len), v.clone());
        }
        let single = |i: usize| at[&([i, 0, 0], [1, 0, 0], 1)].clone();
        let pair = |i: usize, j: usize, s: i8| at[&([i, j, 0], [1, s, 0], 2)].clone();
        let mut poly = CubicPoly::zero(n);
        let cube: Vec<Q> = (0..n).map(single).collect();
        for (i, v) in cube.iter().enumerate() {
            poly.add_term(i, i, i, v);
        }
        let half = Q::new(1.into(), 2.into());
        // sq[i][j] = coefficient of x_i² x_j
        let mut sq = alloc::vec![alloc::vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let (p, m) = (pair(i, j, 1), pair(i, j, -1));
                let ijj = (&p + &m) * &half - &cube[i];
                let iij = (&p - &m) * &half - &cube[j];
                poly.add_term(i, j, j, &ijj);
                poly.add_term(i, i, j, &iij);
                sq[j][i] = ijj;
                sq[i][j] = iij;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = at[&([i, j, k], [1, 1, 1], 3)].clone();
                    let lower = &cube[i] + &cube[j] + &cube[k] + &sq[i][j] + &sq[j][i] + &sq[i][k] + &sq[k][i] + &sq[j][k] + &sq[k][j];
                    poly.add_term(i, j, k, &(v - lower));
                }
            }
        }
        poly
    }
}

/// Coefficient table of the norm of `s`.
pub fn symbolic_expand(s: &CubicNormStructure) -> Result<CubicPoly> {
    let n = s.dim();
    if n > MAX_SYMBOLIC_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let values = polarization_points(n)
        .iter()
        .map(|p| s.norm(&p.to_vec(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CubicPoly::from_polarization_values(n, &values))
}

/// Compares the tables of `N_2 ∘ f` (by substitution) and `ν N_1`.
pub fn symbolic_form_equal(f: &Matrix, s1: &CubicNormStructure, s2: &CubicNormStructure, nu: &Q) -> Result<bool> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    let p1 = symbolic_expand(s1)?;
    let p2 = symbolic_expand(s2)?;
    Ok(p2.substitute(f) == p1.scale(nu))
}

/// `(Σ x_i)³`, whose coefficients are multinomial.
#[cfg(test)]
fn sum_cubed(n: usize) -> CubicPoly {
    let mut p = CubicPoly::zero(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                p.add_term(i, j, k, &crate::rational::q(1));
            }
        }
    }
    p
}

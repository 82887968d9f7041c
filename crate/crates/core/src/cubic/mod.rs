//! Cubic norm structures `(N, #, c)` on `Q^n`.
//!
//! A model supplies the cubic form, the adjoint and the base point; the
//! trace form, `×`, `U`-operators and inverses are derived here. Exact
//! certification of norm similarities lives in [`certify`], the axiom
//! suite in [`axioms`].

pub mod axioms;
pub mod certify;
pub mod symbolic;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{add_vec, q, scale_vec, sub_vec, unit_vector, Q};

pub use axioms::{axiom_suite, AxiomCheck, AxiomReport};
pub use certify::{cubic_form_equal, Certificate, PolarizationOracle, SequentialSweep, Sweep};
pub use symbolic::{symbolic_expand, symbolic_form_equal, CubicPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Etale,
    Hermitian,
    TitsProcess,
    Isotope,
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Etale => "etale",
            Provenance::Hermitian => "hermitian",
            Provenance::TitsProcess => "titsProcess",
            Provenance::Isotope => "isotope",
            Provenance::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Evaluators behind a cubic norm structure. Implementations must be pure.
pub trait CubicNormModel: Send + Sync {
    fn dim(&self) -> usize;
    fn norm(&self, x: &[Q]) -> Result<Q>;
    fn adjoint(&self, x: &[Q]) -> Result<Vec<Q>>;
    fn base_point(&self) -> Vec<Q>;
    fn provenance(&self) -> Provenance;

    fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("e{i}")).collect()
    }

    fn describe(&self) -> String {
        format!("{} structure of dimension {}", self.provenance(), self.dim())
    }
}

/// Symmetric Gram matrix of `T(x, y) = (D_x N)(c)(D_y N)(c) - (D_x D_y N)(c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceForm {
    pub gram: Matrix,
    /// `T(e_i) = T(e_i, c)`.
    pub linear: Vec<Q>,
}

impl TraceForm {
    pub fn bilinear(&self, x: &[Q], y: &[Q]) -> Q {
        let n = x.len();
        let mut acc = Q::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let row = self.gram.row(i);
            let mut s = Q::zero();
            for j in 0..n {
                if !y[j].is_zero() && !row[j].is_zero() {
                    s += &row[j] * &y[j];
                }
            }
            acc += &x[i] * s;
        }
        acc
    }

    pub fn trace(&self, x: &[Q]) -> Q {
        x.iter()
            .zip(&self.linear)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.gram.determinant().is_zero()
    }
}

/// Trace form read off exactly from the cubic polynomial along lines and
/// planes through `c`.
pub fn derive_trace(model: &dyn CubicNormModel) -> Result<TraceForm> {
    let n = model.dim();
    let c = model.base_point();
    let at = |dir: &[(usize, Q)]| -> Result<Q> {
        let mut p = c.clone();
        for (i, t) in dir {
            p[*i] += t;
        }
        model.norm(&p)
    };
    let n0 = model.norm(&c)?;
    let mut grad = Vec::with_capacity(n);
    let mut hess = Matrix::zero(n, n);
    for i in 0..n {
        let g1 = at(&[(i, q(1))])?;
        let gm1 = at(&[(i, q(-1))])?;
        let g2 = at(&[(i, q(2))])?;
        let gm2 = at(&[(i, q(-2))])?;
        // N(c + t e_i) = a0 + a1 t + a2 t² + a3 t³
        let a1 = (q(8) * (&g1 - &gm1) - (&g2 - &gm2)) / q(12);
        hess.set(i, i, &g1 + &gm1 - q(2) * &n0);
        grad.push(a1);
    }
    for i in 0..n {
        for j in i + 1..n {
            let pp = at(&[(i, q(1)), (j, q(1))])?;
            let pm = at(&[(i, q(1)), (j, q(-1))])?;
            let mp = at(&[(i, q(-1)), (j, q(1))])?;
            let mm = at(&[(i, q(-1)), (j, q(-1))])?;
            let h = (pp - pm - mp + mm) / q(4);
            hess.set(i, j, h.clone());
            hess.set(j, i, h);
        }
    }
    let mut gram = Matrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            gram.set(i, j, &grad[i] * &grad[j] - hess.get(i, j));
        }
    }
    let linear = gram.apply(&c);
    Ok(TraceForm { gram, linear })
}

#[derive(Clone)]
pub struct CubicNormStructure {
    model: Arc<dyn CubicNormModel>,
    base: Arc<Vec<Q>>,
    trace: Arc<TraceForm>,
}

impl fmt::Debug for CubicNormStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubicNormStructure")
            .field("model", &self.model.describe())
            .finish()
    }
}

impl CubicNormStructure {
    pub fn new(model: Arc<dyn CubicNormModel>) -> Result<Self> {
        let base = model.base_point();
        if base.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: base.len(),
            });
        }
        let trace = derive_trace(model.as_ref())?;
        Ok(CubicNormStructure {
            model,
            base: Arc::new(base),
            trace: Arc::new(trace),
        })
    }

    pub fn from_model<M: CubicNormModel + 'static>(model: M) -> Result<Self> {
        Self::new(Arc::new(model))
    }

    pub fn model(&self) -> &Arc<dyn CubicNormModel> {
        &self.model
    }

    /// Same underlying model instance.
    pub fn same_as(&self, other: &CubicNormStructure) -> bool {
        core::ptr::addr_eq(Arc::as_ptr(&self.model), Arc::as_ptr(&other.model))
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn labels(&self) -> Vec<String> {
        self.model.labels()
    }

    pub fn provenance(&self) -> Provenance {
        self.model.provenance()
    }

    pub fn describe(&self) -> String {
        self.model.describe()
    }

    pub fn base_point(&self) -> &[Q] {
        &self.base
    }

    pub fn trace_form(&self) -> &TraceForm {
        &self.trace
    }

    fn check_len(&self, x: &[Q]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    pub fn norm(&self, x: &[Q]) -> Result<Q> {
        self.check_len(x)?;
        self.model.norm(x)
    }

    pub fn adjoint(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.check_len(x)?;
        self.model.adjoint(x)
    }

    pub fn trace_bilinear(&self, x: &[Q], y: &[Q]) -> Q {
        self.trace.bilinear(x, y)
    }

    pub fn trace(&self, x: &[Q]) -> Q {
        self.trace.trace(x)
    }

    /// `x × y = (x + y)^# - x^# - y^#`.
    pub fn sharp_bilinear(&self, x: &[Q], y: &[Q]) -> Result<Vec<Q>> {
        let s = self.adjoint(&add_vec(x, y))?;
        Ok(sub_vec(&sub_vec(&s, &self.adjoint(x)?), &self.adjoint(y)?))
    }

    /// `U_x(y) = T(x, y) x - x^# × y`.
    pub fn u_operator(&self, x: &[Q], y: &[Q]) -> Result<Vec<Q>> {
        let xs = self.adjoint(x)?;
        self.u_with_sharp(x, &xs, y)
    }

    fn u_with_sharp(&self, x: &[Q], xs: &[Q], y: &[Q]) -> Result<Vec<Q>> {
        let t = self.trace_bilinear(x, y);
        let cross = sub_vec(&sub_vec(&self.adjoint(&add_vec(xs, y))?, &self.adjoint(xs)?), &self.adjoint(y)?);
        Ok(sub_vec(&scale_vec(&t, x), &cross))
    }

    /// Matrix of `U_x` in the coordinate basis.
    pub fn u_matrix(&self, x: &[Q]) -> Result<Matrix> {
        let xs = self.adjoint(x)?;
        Matrix::from_fn_on_basis(self.dim(), |e| self.u_with_sharp(x, &xs, e))
    }

    /// `x ∘ y` with `2 x∘y = x×y + T(x) y + T(y) x - T(x×y) c`.
    pub fn jordan_product(&self, x: &[Q], y: &[Q]) -> Result<Vec<Q>> {
        let cross = self.sharp_bilinear(x, y)?;
        let tc = self.trace(&cross);
        let mut v = add_vec(&cross, &scale_vec(&self.trace(x), y));
        v = add_vec(&v, &scale_vec(&self.trace(y), x));
        v = sub_vec(&v, &scale_vec(&tc, &self.base));
        Ok(scale_vec(&Q::new(1.into(), 2.into()), &v))
    }

    /// `x⁻¹ = N(x)⁻¹ x^#`.
    pub fn invert(&self, x: &[Q]) -> Result<Vec<Q>> {
        let n = self.norm(x)?;
        if n.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(scale_vec(&n.recip(), &self.adjoint(x)?))
    }

    pub fn is_invertible(&self, x: &[Q]) -> Result<bool> {
        Ok(!self.norm(x)?.is_zero())
    }

    pub fn unit(&self, i: usize) -> Vec<Q> {
        unit_vector(self.dim(), i)
    }

    pub fn scalar(&self, s: &Q) -> Vec<Q> {
        scale_vec(s, &self.base)
    }

    pub fn is_unit_norm(&self) -> Result<bool> {
        Ok(self.norm(&self.base)?.is_one())
    }
}


#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use crate::rational::{qvec, Sampler};

    #[test]
    fn split_trace_form() {
        let s = split();
        assert!(s.trace_form().gram.is_identity());
        assert_eq!(s.trace_bilinear(&qvec(&[1, 2, 3]), &qvec(&[1, 1, 1])), q(6));
        assert_eq!(s.trace_bilinear(s.base_point(), s.base_point()), q(3));
        assert_eq!(s.trace(&qvec(&[1, 2, 3])), q(6));
    }

    #[test]
    fn split_cross_and_u() {
        let s = split();
        let c = s.base_point().to_vec();
        assert_eq!(s.sharp_bilinear(&c, &c).unwrap(), qvec(&[2, 2, 2]));
        assert_eq!(
            s.sharp_bilinear(&qvec(&[1, 0, 0]), &qvec(&[0, 1, 0])).unwrap(),
            qvec(&[0, 0, 1])
        );
        let x = qvec(&[1, 2, 3]);
        let u = s.u_operator(&x, &qvec(&[1, 1, 1])).unwrap();
        assert_eq!(u, qvec(&[1, 4, 9]));
        assert_eq!(s.norm(&u).unwrap(), q(36));
        assert_eq!(
            s.invert(&x).unwrap(),
            alloc::vec![q(1), Q::new(1.into(), 2.into()), Q::new(1.into(), 3.into())]
        );
        assert_eq!(s.invert(&c).unwrap(), c);
        assert_eq!(s.invert(&qvec(&[1, 0, 2])), Err(Error::NotInvertible));
        assert_eq!(s.jordan_product(&x, &qvec(&[2, 1, 1])).unwrap(), qvec(&[2, 2, 3]));
    }

    #[test]
    fn random_split_identities() {
        let s = split();
        let mut rng = Sampler::new(11);
        for _ in 0..100 {
            let x = rng.vector(3);
            let y = rng.vector(3);
            assert_eq!(s.sharp_bilinear(&x, &x).unwrap(), scale_vec(&q(2), &s.adjoint(&x).unwrap()));
            assert_eq!(s.u_operator(s.base_point(), &y).unwrap(), y);
            let expect: Vec<Q> = (0..3).map(|i| &x[i] * &x[i] * &y[i]).collect();
            assert_eq!(s.u_operator(&x, &y).unwrap(), expect);
            assert_eq!(s.u_matrix(&x).unwrap().apply(&y), expect);
            assert_eq!(s.jordan_product(&x, &y).unwrap(), (0..3).map(|i| &x[i] * &y[i]).collect::<Vec<_>>());
            if !s.norm(&x).unwrap().is_zero() {
                assert_eq!(s.invert(&s.invert(&x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn line_trace() {
        let s = CubicNormStructure::from_model(Line).unwrap();
        assert_eq!(s.trace_form().gram.get(0, 0), &q(3));
    }
}

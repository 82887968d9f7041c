//! Deliberately corrupted structures, for checking that the suites notice.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cubic::{CubicNormModel, CubicNormStructure, Provenance};
use crate::error::Result;
use crate::rational::Q;

/// Swaps outputs `i` and `j` of the adjoint.
pub struct AdjointSwap {
    pub inner: CubicNormStructure,
    pub i: usize,
    pub j: usize,
}

impl CubicNormModel for AdjointSwap {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn norm(&self, x: &[Q]) -> Result<Q> {
        self.inner.norm(x)
    }
    fn adjoint(&self, x: &[Q]) -> Result<Vec<Q>> {
        let mut a = self.inner.adjoint(x)?;
        a.swap(self.i, self.j);
        Ok(a)
    }
    fn base_point(&self) -> Vec<Q> {
        self.inner.base_point().to_vec()
    }
    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
    fn describe(&self) -> String {
        format!("{} with adjoint outputs {} and {} swapped", self.inner.describe(), self.i, self.j)
    }
}

/// Adds `delta * x_a x_b x_c` to the norm.
pub struct NormPerturbation {
    pub inner: CubicNormStructure,
    pub monomial: [usize; 3],
    pub delta: Q,
}

impl CubicNormModel for NormPerturbation {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn norm(&self, x: &[Q]) -> Result<Q> {
        let [a, b, c] = self.monomial;
        Ok(self.inner.norm(x)? + &self.delta * &x[a] * &x[b] * &x[c])
    }
    fn adjoint(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.inner.adjoint(x)
    }
    fn base_point(&self) -> Vec<Q> {
        self.inner.base_point().to_vec()
    }
    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
    fn describe(&self) -> String {
        format!("{} with norm coefficient {:?} perturbed by {}", self.inner.describe(), self.monomial, self.delta)
    }
}

//! The shipped constructions.

use alloc::sync::Arc;

use crate::assoc::{AssocAlgebra, AssocElement, BaseInvolution};
use crate::cubic::{CubicNormStructure, Sweep};
use crate::error::Result;
use crate::etale::{EtaleElement, EtaleKind, EtaleSpec};
use crate::rational::{q, Q};
use crate::tits::{
    build_first_construction, build_tits, etale_structure, hermitian_structure, inner_automorphism,
    CertifiedOperator, TitsProcessAlgebra,
};

pub fn sqrt2() -> Arc<EtaleSpec> {
    EtaleSpec::new(EtaleKind::quadratic_field(q(2))).expect("2 is not a square")
}

pub fn split_cubic_spec() -> Arc<EtaleSpec> {
    EtaleSpec::new(EtaleKind::SplitCubic).expect("valid")
}

/// `Q[θ]/(θ³ - 3θ - 1)` with `ρ(θ) = 2 - θ²`.
pub fn cyclic_field() -> Arc<EtaleSpec> {
    EtaleSpec::new(EtaleKind::cyclic_cubic([q(-1), q(-3), q(0), q(1)], [q(2), q(0), q(-1)])).expect("valid")
}

/// `3 + 2√2`, of norm 1.
pub fn mu_unit() -> EtaleElement {
    EtaleElement::from_ints(&sqrt2(), &[3, 2]).expect("dims")
}

/// `L = Q³` with `N = x1 x2 x3`.
pub fn split_cubic() -> Result<CubicNormStructure> {
    etale_structure(&split_cubic_spec())
}

/// Symmetric 3x3 rational matrices, `N = det`.
pub fn mat3_hermitian() -> Result<CubicNormStructure> {
    hermitian_structure(&AssocAlgebra::mat3(&EtaleSpec::rational(), BaseInvolution::ConjTranspose)?)
}

/// `J(LK, *, 1, μ)` with `L = Q³`, `K = Q(√2)`.
pub fn nine_dim(mu: &EtaleElement) -> Result<TitsProcessAlgebra> {
    let lk = EtaleSpec::composite(&split_cubic_spec(), &sqrt2())?;
    let b = AssocAlgebra::etale(&lk)?;
    build_tits(&b, &AssocElement::one(&b), mu)
}

/// First construction `J(M3(Q), μ)`.
pub fn first_mat3(mu: &Q) -> Result<TitsProcessAlgebra> {
    let d = AssocAlgebra::mat3(&EtaleSpec::rational(), BaseInvolution::ConjTranspose)?;
    build_first_construction(&d, mu, None)
}

/// Second construction `J(M3(Q(√2)), x̄ᵀ, 1, 3 + 2√2)`.
pub fn second_mat3() -> Result<TitsProcessAlgebra> {
    let b = AssocAlgebra::mat3(&sqrt2(), BaseInvolution::ConjTranspose)?;
    build_tits(&b, &AssocElement::one(&b), &mu_unit())
}

/// The crossed product `(L/Q, ρ, γ)` over the cyclic field.
pub fn crossed_division(gamma: &Q) -> Result<Arc<AssocAlgebra>> {
    let g = EtaleElement::scalar(&EtaleSpec::rational(), gamma);
    AssocAlgebra::crossed_without_involution(&cyclic_field(), &g)
}

/// First construction over [`crossed_division`].
pub fn first_crossed(gamma: &Q, mu: &Q) -> Result<TitsProcessAlgebra> {
    build_first_construction(&crossed_division(gamma)?, mu, None)
}

/// On a first construction over `M3(Q)` with `u = 1`: conjugation by
/// `g = (P, P⁻¹)`, `P` the cyclic permutation matrix. Order 3.
pub fn cyclic_permutation_automorphism(j: &TitsProcessAlgebra, sweep: &dyn Sweep) -> Result<CertifiedOperator> {
    let (o, z) = (q(1), q(0));
    let rows = [[z.clone(), z.clone(), o.clone()], [o.clone(), z.clone(), z.clone()], [z.clone(), o.clone(), z.clone()]];
    let d = match j.algebra().model() {
        crate::assoc::AssocModel::DoubleOpposite { inner } => inner.clone(),
        _ => return Err(crate::Error::InvalidAlgebra("expected a first construction".into())),
    };
    let p = AssocElement::from_rational_rows(&d, rows)?;
    let pinv = p.inverse()?;
    let g = AssocElement::pair(j.algebra(), &p, &pinv)?;
    inner_automorphism(j, &g, sweep)
}

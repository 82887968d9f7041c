//! Degree-3 associative algebras with involution.
//!
//! Four models share one coordinate convention (exact rationals over `Q`):
//!
//! * `Mat3`: 3x3 matrices over a base étale algebra (`Q`, `QxQ` or `Q(√d)`),
//!   entry `(r, c)` stored at `(3r + c) * dim(base)`;
//! * `Crossed`: `Σ l_i z^i` with `z l = ρ(l) z`, `z³ = γ`, over a cubic
//!   étale algebra `E` whose base is the center;
//! * `DoubleOpposite`: `E × E°` stored as `[x, y]`;
//! * `Etale`: a cubic étale algebra over its base, e.g. `L/Q` or `LK/K`.
//!
//! Reduced norms and traces take values in the center, returned as
//! [`EtaleElement`]s of the center spec.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::etale::{EtaleElement, EtaleKind, EtaleSpec, GaloisMap};
use crate::linalg::{det3, Matrix};
use crate::rational::{add_vec, scale_vec, sub_vec, unit_vector, zeros, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssocModel {
    Mat3 { base: Arc<EtaleSpec> },
    Crossed { cubic: Arc<EtaleSpec>, gamma: EtaleElement },
    DoubleOpposite { inner: Arc<AssocAlgebra> },
    Etale { field: Arc<EtaleSpec> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseInvolution {
    /// `x ↦ x̄ᵀ` on `Mat3` (plain transpose when the base is `Q`).
    ConjTranspose,
    /// `x ↦ xᵀ` on `Mat3`, without conjugating entries.
    Transpose,
    /// On crossed products: `*` on the étale part and `z ↦ z⁻¹`.
    StandardCrossed,
    /// `(x, y) ↦ (y, x)` on `E × E°`.
    Switch,
    /// `*` on `LK`, or the identity on `L`.
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolutionKind {
    /// Identity on the center.
    First,
    /// Nontrivial automorphism on a quadratic center.
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    pub base: BaseInvolution,
    /// `σ_t(x) = t σ(x) t⁻¹`, stored as `(t, t⁻¹)`.
    twist: Option<(Vec<Q>, Vec<Q>)>,
}

impl Involution {
    pub fn new(base: BaseInvolution) -> Self {
        Involution { base, twist: None }
    }

    pub fn twist(&self) -> Option<&[Q]> {
        self.twist.as_ref().map(|(t, _)| &t[..])
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct AssocAlgebra {
    model: AssocModel,
    center: Arc<EtaleSpec>,
    involution: Option<Involution>,
    dim: usize,
}

impl fmt::Debug for AssocAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AssocAlgebra")
            .field("model", &self.model_label())
            .field("involution", &self.involution.as_ref().map(|i| i.base))
            .field("twisted", &self.involution.as_ref().is_some_and(|i| i.twist.is_some()))
            .field("dim", &self.dim)
            .finish()
    }
}

impl AssocAlgebra {
    pub fn mat3(base: &Arc<EtaleSpec>, inv: BaseInvolution) -> Result<Arc<Self>> {
        if !matches!(
            base.kind(),
            EtaleKind::Rational | EtaleKind::SplitQuadratic | EtaleKind::QuadraticField { .. }
        ) {
            return Err(Error::InvalidAlgebra(
                "matrix entries must lie in Q or a quadratic étale algebra".to_string(),
            ));
        }
        Self::assemble(AssocModel::Mat3 { base: base.clone() }, base.clone(), inv)
    }

    /// Cyclic crossed product `(E, ρ, γ)` with `γ` in the base of `E`.
    pub fn crossed(cubic: &Arc<EtaleSpec>, gamma: &EtaleElement, inv: BaseInvolution) -> Result<Arc<Self>> {
        if cubic.degree() != 3 || !cubic.has_map(GaloisMap::Rho) {
            return Err(Error::InvalidAlgebra(
                "crossed product needs a cubic étale algebra with rho".to_string(),
            ));
        }
        let center = cubic.base();
        if gamma.spec().as_ref() != center.as_ref() {
            return Err(Error::InvalidAlgebra("gamma must lie in the center".to_string()));
        }
        if gamma.inverse().is_err() {
            return Err(Error::InvalidAlgebra("gamma must be a unit".to_string()));
        }
        Self::assemble(
            AssocModel::Crossed {
                cubic: cubic.clone(),
                gamma: gamma.clone(),
            },
            center,
            inv,
        )
    }

    /// Crossed product used only for its arithmetic; `involve` is undefined.
    pub fn crossed_without_involution(cubic: &Arc<EtaleSpec>, gamma: &EtaleElement) -> Result<Arc<Self>> {
        if cubic.degree() != 3 || !cubic.has_map(GaloisMap::Rho) {
            return Err(Error::InvalidAlgebra(
                "crossed product needs a cubic étale algebra with rho".to_string(),
            ));
        }
        let center = cubic.base();
        if gamma.spec().as_ref() != center.as_ref() || gamma.inverse().is_err() {
            return Err(Error::InvalidAlgebra("gamma must be a unit of the center".to_string()));
        }
        Ok(Arc::new(AssocAlgebra {
            dim: 3 * cubic.dim(),
            model: AssocModel::Crossed {
                cubic: cubic.clone(),
                gamma: gamma.clone(),
            },
            center,
            involution: None,
        }))
    }

    /// `E × E°` with the switch involution; `E` must have center `Q`.
    pub fn double_opposite(inner: &Arc<AssocAlgebra>) -> Result<Arc<Self>> {
        if inner.center.kind() != &EtaleKind::Rational {
            return Err(Error::InvalidAlgebra(
                "double opposite needs an algebra with center Q".to_string(),
            ));
        }
        let center = EtaleSpec::new(EtaleKind::SplitQuadratic)?;
        Self::assemble(
            AssocModel::DoubleOpposite {
                inner: inner.clone(),
            },
            center,
            BaseInvolution::Switch,
        )
    }

    pub fn etale(field: &Arc<EtaleSpec>) -> Result<Arc<Self>> {
        if field.degree() != 3 {
            return Err(Error::InvalidAlgebra(
                "étale model needs a cubic algebra over its base".to_string(),
            ));
        }
        Self::assemble(
            AssocModel::Etale {
                field: field.clone(),
            },
            field.base(),
            BaseInvolution::Star,
        )
    }

    fn assemble(model: AssocModel, center: Arc<EtaleSpec>, inv: BaseInvolution) -> Result<Arc<Self>> {
        let allowed = match &model {
            AssocModel::Mat3 { .. } => {
                matches!(inv, BaseInvolution::ConjTranspose | BaseInvolution::Transpose)
            }
            AssocModel::Crossed { .. } => inv == BaseInvolution::StandardCrossed,
            AssocModel::DoubleOpposite { .. } => inv == BaseInvolution::Switch,
            AssocModel::Etale { .. } => inv == BaseInvolution::Star,
        };
        if !allowed {
            return Err(Error::InvalidAlgebra(format!(
                "involution {inv:?} does not apply to this model"
            )));
        }
        let dim = match &model {
            AssocModel::Mat3 { base } => 9 * base.dim(),
            AssocModel::Crossed { cubic, .. } => 3 * cubic.dim(),
            AssocModel::DoubleOpposite { inner } => 2 * inner.dim,
            AssocModel::Etale { field } => field.dim(),
        };
        let alg = AssocAlgebra {
            model,
            center,
            involution: Some(Involution::new(inv)),
            dim,
        };
        alg.check_involution()?;
        Ok(Arc::new(alg))
    }

    pub fn model(&self) -> &AssocModel {
        &self.model
    }

    pub fn model_label(&self) -> String {
        match &self.model {
            AssocModel::Mat3 { base } => format!("mat3({})", base.kind()),
            AssocModel::Crossed { cubic, .. } => format!("crossed({})", cubic.kind()),
            AssocModel::DoubleOpposite { inner } => format!("{} x op", inner.model_label()),
            AssocModel::Etale { field } => format!("etale({})", field.kind()),
        }
    }

    pub fn center(&self) -> &Arc<EtaleSpec> {
        &self.center
    }

    pub fn involution(&self) -> Option<&Involution> {
        self.involution.as_ref()
    }

    fn require_involution(&self) -> Result<&Involution> {
        self.involution
            .as_ref()
            .ok_or_else(|| Error::InvalidAlgebra("algebra carries no involution".to_string()))
    }

    /// Dimension over `Q`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension over the center.
    pub fn center_dim(&self) -> usize {
        self.dim / self.center.dim()
    }

    pub fn same_algebra(&self, other: &AssocAlgebra) -> bool {
        self.model == other.model
    }

    // ---- raw coordinate arithmetic ---------------------------------------

    pub fn one_raw(&self) -> Vec<Q> {
        match &self.model {
            AssocModel::Mat3 { base } => {
                let d = base.dim();
                let mut out = zeros(9 * d);
                for i in 0..3 {
                    out[(4 * i) * d..(4 * i + 1) * d].clone_from_slice(base.one_coords());
                }
                out
            }
            AssocModel::Crossed { cubic, .. } => {
                let mut out = zeros(3 * cubic.dim());
                out[..cubic.dim()].clone_from_slice(cubic.one_coords());
                out
            }
            AssocModel::DoubleOpposite { inner } => {
                let one = inner.one_raw();
                [one.clone(), one].concat()
            }
            AssocModel::Etale { field } => field.one_coords().to_vec(),
        }
    }

    pub fn mul_raw(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        match &self.model {
            AssocModel::Mat3 { base } => {
                let d = base.dim();
                let mut out = zeros(9 * d);
                for r in 0..3 {
                    for c in 0..3 {
                        let slot = &mut out[(3 * r + c) * d..(3 * r + c + 1) * d];
                        for k in 0..3 {
                            let a = &x[(3 * r + k) * d..(3 * r + k + 1) * d];
                            let b = &y[(3 * k + c) * d..(3 * k + c + 1) * d];
                            if a.iter().all(Zero::is_zero) || b.iter().all(Zero::is_zero) {
                                continue;
                            }
                            if d == 1 {
                                slot[0] += &a[0] * &b[0];
                                continue;
                            }
                            for (s, v) in slot.iter_mut().zip(base.mul(a, b)) {
                                *s += v;
                            }
                        }
                    }
                }
                out
            }
            AssocModel::Crossed { cubic, gamma } => {
                let d = cubic.dim();
                let g = EtaleElement::embed_base(cubic, gamma).expect("gamma in center");
                let mut out = zeros(3 * d);
                for i in 0..3 {
                    let a = &x[i * d..(i + 1) * d];
                    if a.iter().all(Zero::is_zero) {
                        continue;
                    }
                    for j in 0..3 {
                        let b = &y[j * d..(j + 1) * d];
                        if b.iter().all(Zero::is_zero) {
                            continue;
                        }
                        let rb = rho_power(cubic, b, i);
                        let mut term = cubic.mul(a, &rb);
                        if i + j >= 3 {
                            term = cubic.mul(&term, g.coords());
                        }
                        let m = (i + j) % 3;
                        for (s, v) in out[m * d..(m + 1) * d].iter_mut().zip(term) {
                            *s += v;
                        }
                    }
                }
                out
            }
            AssocModel::DoubleOpposite { inner } => {
                let n = inner.dim;
                let first = inner.mul_raw(&x[..n], &y[..n]);
                let second = inner.mul_raw(&y[n..], &x[n..]);
                [first, second].concat()
            }
            AssocModel::Etale { field } => field.mul(x, y),
        }
    }

    /// Embeds a center element (given by coordinates) into the algebra.
    pub fn embed_center_raw(&self, c: &[Q]) -> Vec<Q> {
        self.center_scale_raw(c, &self.one_raw())
    }

    /// `c · x` for `c` in the center.
    pub fn center_scale_raw(&self, c: &[Q], x: &[Q]) -> Vec<Q> {
        match &self.model {
            AssocModel::Mat3 { base } => {
                let d = base.dim();
                x.chunks(d).flat_map(|e| base.mul(c, e)).collect()
            }
            AssocModel::Crossed { cubic, .. } => {
                let center = EtaleElement::new(&self.center, c.to_vec()).expect("center coords");
                let g = EtaleElement::embed_base(cubic, &center).expect("center embeds");
                x.chunks(cubic.dim()).flat_map(|e| cubic.mul(g.coords(), e)).collect()
            }
            AssocModel::DoubleOpposite { inner } => {
                let n = inner.dim;
                [scale_vec(&c[0], &x[..n]), scale_vec(&c[1], &x[n..])].concat()
            }
            AssocModel::Etale { field } => {
                let center = EtaleElement::new(&self.center, c.to_vec()).expect("center coords");
                let g = EtaleElement::embed_base(field, &center).expect("center embeds");
                field.mul(g.coords(), x)
            }
        }
    }

    pub fn norm_raw(&self, x: &[Q]) -> Vec<Q> {
        match &self.model {
            AssocModel::Mat3 { base } if base.dim() == 1 => {
                let m = |r: usize, c: usize| &x[3 * r + c];
                let t0 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
                let t1 = m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0));
                let t2 = m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
                vec![t0 - t1 + t2]
            }
            AssocModel::Mat3 { base } => {
                let d = base.dim();
                let e = |r: usize, c: usize| x[(3 * r + c) * d..(3 * r + c + 1) * d].to_vec();
                let m = [
                    [e(0, 0), e(0, 1), e(0, 2)],
                    [e(1, 0), e(1, 1), e(1, 2)],
                    [e(2, 0), e(2, 1), e(2, 2)],
                ];
                det3(&m, |a, b| base.mul(a, b), |a, b| add_vec(a, b), |a, b| sub_vec(a, b))
            }
            AssocModel::Crossed { cubic, gamma } => {
                let d = cubic.dim();
                let g = EtaleElement::embed_base(cubic, gamma).expect("gamma in center");
                let mut m: [[Vec<Q>; 3]; 3] = Default::default();
                for (row, mrow) in m.iter_mut().enumerate() {
                    for (col, entry) in mrow.iter_mut().enumerate() {
                        let i = (row + 3 - col) % 3;
                        let a = &x[i * d..(i + 1) * d];
                        let mut v = rho_power(cubic, a, (3 - row) % 3);
                        if row < col {
                            v = cubic.mul(&v, g.coords());
                        }
                        *entry = v;
                    }
                }
                let det = det3(&m, |a, b| cubic.mul(a, b), |a, b| add_vec(a, b), |a, b| sub_vec(a, b));
                EtaleElement::new(cubic, det)
                    .expect("dims")
                    .project_base()
                    .expect("reduced norm of a crossed product lies in the center")
                    .into_coords()
            }
            AssocModel::DoubleOpposite { inner } => {
                let n = inner.dim;
                let a = inner.norm_raw(&x[..n]);
                let b = inner.norm_raw(&x[n..]);
                vec![a[0].clone(), b[0].clone()]
            }
            AssocModel::Etale { field } => EtaleElement::new(field, x.to_vec())
                .expect("dims")
                .norm()
                .into_coords(),
        }
    }

    pub fn trace_raw(&self, x: &[Q]) -> Vec<Q> {
        match &self.model {
            AssocModel::Mat3 { base } => {
                let d = base.dim();
                let mut acc = zeros(d);
                for i in 0..3 {
                    acc = add_vec(&acc, &x[(4 * i) * d..(4 * i + 1) * d]);
                }
                acc
            }
            AssocModel::Crossed { cubic, .. } => EtaleElement::new(cubic, x[..cubic.dim()].to_vec())
                .expect("dims")
                .trace()
                .into_coords(),
            AssocModel::DoubleOpposite { inner } => {
                let n = inner.dim;
                vec![inner.trace_raw(&x[..n])[0].clone(), inner.trace_raw(&x[n..])[0].clone()]
            }
            AssocModel::Etale { field } => EtaleElement::new(field, x.to_vec())
                .expect("dims")
                .trace()
                .into_coords(),
        }
    }

    /// `T(x y)` without forming the full product.
    pub fn trace_mul_raw(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        match &self.model {
            AssocModel::Mat3 { base } => {
                let d = base.dim();
                let mut acc = zeros(d);
                for r in 0..3 {
                    for k in 0..3 {
                        let a = &x[(3 * r + k) * d..(3 * r + k + 1) * d];
                        let b = &y[(3 * k + r) * d..(3 * k + r + 1) * d];
                        if a.iter().all(Zero::is_zero) || b.iter().all(Zero::is_zero) {
                            continue;
                        }
                        if d == 1 {
                            acc[0] += &a[0] * &b[0];
                        } else {
                            for (s, v) in acc.iter_mut().zip(base.mul(a, b)) {
                                *s += v;
                            }
                        }
                    }
                }
                acc
            }
            AssocModel::DoubleOpposite { inner } => {
                let n = inner.dim;
                let a = inner.trace_mul_raw(&x[..n], &y[..n]);
                let b = inner.trace_mul_raw(&y[n..], &x[n..]);
                vec![a[0].clone(), b[0].clone()]
            }
            _ => self.trace_raw(&self.mul_raw(x, y)),
        }
    }

    /// Adjoint `x^# = x² - T(x) x + s(x) 1` with `s(x) = (T(x)² - T(x²)) / 2`.
    pub fn sharp_raw(&self, x: &[Q]) -> Vec<Q> {
        let x2 = self.mul_raw(x, x);
        let t = self.trace_raw(x);
        let t2 = self.trace_raw(&x2);
        let tt = self.center.mul(&t, &t);
        let half = Q::new(1.into(), 2.into());
        let s: Vec<Q> = tt.iter().zip(&t2).map(|(a, b)| (a - b) * &half).collect();
        let tx = self.center_scale_raw(&t, x);
        let s1 = self.embed_center_raw(&s);
        add_vec(&sub_vec(&x2, &tx), &s1)
    }

    fn base_involve_raw(&self, inv: &Involution, x: &[Q]) -> Vec<Q> {
        match (&self.model, inv.base) {
            (AssocModel::Mat3 { base }, b) => {
                let d = base.dim();
                let conj = b == BaseInvolution::ConjTranspose && base.has_map(GaloisMap::Bar);
                let mut out = zeros(9 * d);
                for r in 0..3 {
                    for c in 0..3 {
                        let e = &x[(3 * c + r) * d..(3 * c + r + 1) * d];
                        let v = if conj {
                            EtaleElement::new(base, e.to_vec())
                                .and_then(|v| v.apply_galois(GaloisMap::Bar))
                                .expect("bar on base")
                                .into_coords()
                        } else {
                            e.to_vec()
                        };
                        out[(3 * r + c) * d..(3 * r + c + 1) * d].clone_from_slice(&v);
                    }
                }
                out
            }
            (AssocModel::Crossed { cubic, gamma }, _) => {
                let d = cubic.dim();
                // z⁻¹ = γ⁻¹ z², z⁻² = γ⁻¹ z
                let ginv = gamma.inverse().expect("gamma is a unit");
                let gi = EtaleElement::embed_base(cubic, &ginv).expect("center embeds");
                let mut out = zeros(3 * d);
                for i in 0..3 {
                    let a = &x[i * d..(i + 1) * d];
                    if a.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let star = star_or_identity(cubic, a);
                    let mut term = zeros(3 * d);
                    let (slot, coeff) = match i {
                        0 => (0, star),
                        1 => (2, cubic.mul(gi.coords(), &star)),
                        _ => (1, cubic.mul(gi.coords(), &star)),
                    };
                    // z^{-i} a* with z^{-i} = γ⁻¹ z^{3-i}: coefficient moves
                    // through z^{3-i} as ρ^{3-i}.
                    let moved = if slot == 0 { coeff } else { rho_power(cubic, &coeff, slot) };
                    term[slot * d..(slot + 1) * d].clone_from_slice(&moved);
                    out = add_vec(&out, &term);
                }
                out
            }
            (AssocModel::DoubleOpposite { inner }, _) => {
                let n = inner.dim;
                [x[n..].to_vec(), x[..n].to_vec()].concat()
            }
            (AssocModel::Etale { field }, _) => star_or_identity(field, x),
        }
    }

    /// Applies the involution. Panics if the algebra carries none; use
    /// [`AssocElement::involve`] for the checked form.
    pub fn involve_raw(&self, x: &[Q]) -> Vec<Q> {
        let inv = self.involution.as_ref().expect("algebra carries an involution");
        let s = self.base_involve_raw(inv, x);
        match &inv.twist {
            None => s,
            Some((t, ti)) => self.mul_raw(&self.mul_raw(t, &s), ti),
        }
    }

    /// Inverse via `x⁻¹ = N(x)⁻¹ x^#`.
    pub fn inverse_raw(&self, x: &[Q]) -> Result<Vec<Q>> {
        let n = EtaleElement::new(&self.center, self.norm_raw(x))?;
        let ninv = n.inverse()?;
        Ok(self.center_scale_raw(ninv.coords(), &self.sharp_raw(x)))
    }

    fn involution_matrix(&self) -> Matrix {
        Matrix::from_fn_on_basis(self.dim, |e| Ok(self.involve_raw(e))).expect("square")
    }

    /// Checks that the involution is a `Q`-linear anti-automorphism of order
    /// two fixing `1`, and reports how it acts on the center.
    pub fn check_involution(&self) -> Result<InvolutionKind> {
        self.require_involution()?;
        let one = self.one_raw();
        if self.involve_raw(&one) != one {
            return Err(Error::InvalidAlgebra("sigma(1) != 1".to_string()));
        }
        let basis: Vec<Vec<Q>> = (0..self.dim).map(|i| unit_vector(self.dim, i)).collect();
        let images: Vec<Vec<Q>> = basis.iter().map(|e| self.involve_raw(e)).collect();
        for (i, e) in basis.iter().enumerate() {
            if self.involve_raw(&images[i]) != *e {
                return Err(Error::InvalidAlgebra(format!("sigma^2 != id on basis vector {i}")));
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let lhs = self.involve_raw(&self.mul_raw(&basis[i], &basis[j]));
                let rhs = self.mul_raw(&images[j], &images[i]);
                if lhs != rhs {
                    return Err(Error::InvalidAlgebra(format!(
                        "sigma is not anti-multiplicative on basis pair ({i}, {j})"
                    )));
                }
            }
        }
        self.involution_kind()
    }

    /// First or second kind, read off from the action on the center.
    pub fn involution_kind(&self) -> Result<InvolutionKind> {
        self.require_involution()?;
        let mut fixed = true;
        let mut conj = true;
        for i in 0..self.center.dim() {
            let c = EtaleElement::new(&self.center, unit_vector(self.center.dim(), i))?;
            let image = self.involve_raw(&self.embed_center_raw(c.coords()));
            if image != self.embed_center_raw(c.coords()) {
                fixed = false;
            }
            let bar = if self.center.has_map(GaloisMap::Bar) {
                c.apply_galois(GaloisMap::Bar)?
            } else {
                c.clone()
            };
            if image != self.embed_center_raw(bar.coords()) {
                conj = false;
            }
        }
        if self.center.has_map(GaloisMap::Bar) && conj {
            Ok(InvolutionKind::Second)
        } else if fixed {
            Ok(InvolutionKind::First)
        } else {
            Err(Error::InvalidAlgebra(
                "involution does not preserve the center".to_string(),
            ))
        }
    }

    /// `Q`-basis of `(B, σ)_+`, the fixed space of the involution.
    pub fn hermitian_basis(&self) -> Result<HermitianSpace> {
        self.require_involution()?;
        let s = self.involution_matrix().sub(&Matrix::identity(self.dim));
        let basis = s.kernel();
        let free = basis
            .iter()
            .map(|v| {
                v.iter()
                    .position(|c| c.is_one())
                    .expect("kernel vectors carry a unit at their free column")
            })
            .collect();
        Ok(HermitianSpace { basis, free })
    }

    /// The algebra with involution `σ_v(x) = v σ(x) v⁻¹`.
    pub fn twist_involution(self: &Arc<Self>, v: &AssocElement) -> Result<Arc<Self>> {
        let inv = self.require_involution()?;
        self.check_member(v)?;
        if self.involve_raw(&v.coords) != v.coords {
            return Err(Error::NotHermitian);
        }
        let vinv = self.inverse_raw(&v.coords)?;
        let twist = match &inv.twist {
            None => (v.coords.clone(), vinv),
            Some((t, ti)) => (self.mul_raw(&v.coords, t), self.mul_raw(ti, &vinv)),
        };
        let alg = AssocAlgebra {
            model: self.model.clone(),
            center: self.center.clone(),
            involution: Some(Involution {
                base: inv.base,
                twist: Some(twist),
            }),
            dim: self.dim,
        };
        Ok(Arc::new(alg))
    }

    fn check_member(&self, x: &AssocElement) -> Result<()> {
        if self.same_algebra(&x.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }
}

fn rho_power(spec: &Arc<EtaleSpec>, x: &[Q], k: usize) -> Vec<Q> {
    let mut v = EtaleElement::new(spec, x.to_vec()).expect("dims");
    for _ in 0..k % 3 {
        v = v.apply_galois(GaloisMap::Rho).expect("rho defined");
    }
    v.into_coords()
}

fn star_or_identity(spec: &Arc<EtaleSpec>, x: &[Q]) -> Vec<Q> {
    if spec.has_map(GaloisMap::Star) {
        EtaleElement::new(spec, x.to_vec())
            .and_then(|v| v.apply_galois(GaloisMap::Star))
            .expect("star defined")
            .into_coords()
    } else {
        x.to_vec()
    }
}

/// `Q`-basis of the hermitian elements. Coordinates of a hermitian element
/// are its entries at the `free` positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianSpace {
    pub basis: Vec<Vec<Q>>,
    pub free: Vec<usize>,
}

impl HermitianSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords_of(&self, x: &[Q]) -> Vec<Q> {
        self.free.iter().map(|&i| x[i].clone()).collect()
    }

    pub fn element(&self, coords: &[Q]) -> Vec<Q> {
        let n = self.basis.first().map_or(0, Vec::len);
        let mut out = zeros(n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(b) {
                if !v.is_zero() {
                    *o += c * v;
                }
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct AssocElement {
    algebra: Arc<AssocAlgebra>,
    coords: Vec<Q>,
}

impl fmt::Debug for AssocElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AssocElement(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl AssocElement {
    pub fn new(algebra: &Arc<AssocAlgebra>, coords: Vec<Q>) -> Result<Self> {
        if coords.len() != algebra.dim {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim,
                found: coords.len(),
            });
        }
        Ok(AssocElement {
            algebra: algebra.clone(),
            coords,
        })
    }

    pub fn one(algebra: &Arc<AssocAlgebra>) -> Self {
        AssocElement {
            algebra: algebra.clone(),
            coords: algebra.one_raw(),
        }
    }

    pub fn zero(algebra: &Arc<AssocAlgebra>) -> Self {
        AssocElement {
            algebra: algebra.clone(),
            coords: zeros(algebra.dim),
        }
    }

    /// `Mat3` element from its nine entries, row-major.
    pub fn from_entries(algebra: &Arc<AssocAlgebra>, entries: &[EtaleElement]) -> Result<Self> {
        let AssocModel::Mat3 { .. } = &algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        if entries.len() != 9 {
            return Err(Error::DimensionMismatch {
                expected: 9,
                found: entries.len(),
            });
        }
        Self::new(algebra, entries.iter().flat_map(|e| e.coords().to_vec()).collect())
    }

    /// `Mat3` element with rational entries embedded in the base.
    pub fn from_rational_rows(algebra: &Arc<AssocAlgebra>, rows: [[Q; 3]; 3]) -> Result<Self> {
        let AssocModel::Mat3 { base } = &algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        let entries: Vec<EtaleElement> = rows
            .iter()
            .flat_map(|r| r.iter().map(|v| EtaleElement::scalar(base, v)))
            .collect();
        Self::from_entries(algebra, &entries)
    }

    /// Crossed-product element `l0 + l1 z + l2 z²`.
    pub fn crossed(algebra: &Arc<AssocAlgebra>, parts: [&EtaleElement; 3]) -> Result<Self> {
        let AssocModel::Crossed { cubic, .. } = &algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        if parts.iter().any(|p| p.spec().as_ref() != cubic.as_ref()) {
            return Err(Error::SpecMismatch);
        }
        Self::new(algebra, parts.iter().flat_map(|p| p.coords().to_vec()).collect())
    }

    /// `(x, y) ∈ E × E°`.
    pub fn pair(algebra: &Arc<AssocAlgebra>, x: &AssocElement, y: &AssocElement) -> Result<Self> {
        let AssocModel::DoubleOpposite { inner } = &algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        inner.check_member(x)?;
        inner.check_member(y)?;
        Self::new(algebra, [x.coords.clone(), y.coords.clone()].concat())
    }

    /// Components of an element of `E × E°`.
    pub fn unpair(&self) -> Result<(AssocElement, AssocElement)> {
        let AssocModel::DoubleOpposite { inner } = &self.algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        let n = inner.dim;
        Ok((
            AssocElement::new(inner, self.coords[..n].to_vec())?,
            AssocElement::new(inner, self.coords[n..].to_vec())?,
        ))
    }

    /// Étale-model element from an étale element.
    pub fn from_etale(algebra: &Arc<AssocAlgebra>, x: &EtaleElement) -> Result<Self> {
        let AssocModel::Etale { field } = &algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        if x.spec().as_ref() != field.as_ref() {
            return Err(Error::SpecMismatch);
        }
        Self::new(algebra, x.coords().to_vec())
    }

    pub fn to_etale(&self) -> Result<EtaleElement> {
        let AssocModel::Etale { field } = &self.algebra.model else {
            return Err(Error::AlgebraMismatch);
        };
        EtaleElement::new(field, self.coords.clone())
    }

    pub fn from_center(algebra: &Arc<AssocAlgebra>, c: &EtaleElement) -> Result<Self> {
        if c.spec().as_ref() != algebra.center.as_ref() {
            return Err(Error::SpecMismatch);
        }
        Self::new(algebra, algebra.embed_center_raw(c.coords()))
    }

    pub fn algebra(&self) -> &Arc<AssocAlgebra> {
        &self.algebra
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Q> {
        self.coords
    }

    fn with(&self, coords: Vec<Q>) -> Self {
        AssocElement {
            algebra: self.algebra.clone(),
            coords,
        }
    }

    pub fn mul(&self, other: &AssocElement) -> Result<Self> {
        self.algebra.check_member(other)?;
        Ok(self.with(self.algebra.mul_raw(&self.coords, &other.coords)))
    }

    pub fn add(&self, other: &AssocElement) -> Result<Self> {
        self.algebra.check_member(other)?;
        Ok(self.with(add_vec(&self.coords, &other.coords)))
    }

    pub fn sub(&self, other: &AssocElement) -> Result<Self> {
        self.algebra.check_member(other)?;
        Ok(self.with(sub_vec(&self.coords, &other.coords)))
    }

    pub fn scale(&self, s: &Q) -> Self {
        self.with(scale_vec(s, &self.coords))
    }

    pub fn center_scale(&self, c: &EtaleElement) -> Result<Self> {
        if c.spec().as_ref() != self.algebra.center.as_ref() {
            return Err(Error::SpecMismatch);
        }
        Ok(self.with(self.algebra.center_scale_raw(c.coords(), &self.coords)))
    }

    pub fn reduced_norm(&self) -> EtaleElement {
        EtaleElement::new(&self.algebra.center, self.algebra.norm_raw(&self.coords)).expect("dims")
    }

    pub fn reduced_trace(&self) -> EtaleElement {
        EtaleElement::new(&self.algebra.center, self.algebra.trace_raw(&self.coords)).expect("dims")
    }

    pub fn sharp(&self) -> Self {
        self.with(self.algebra.sharp_raw(&self.coords))
    }

    pub fn involve(&self) -> Result<Self> {
        self.algebra.require_involution()?;
        Ok(self.with(self.algebra.involve_raw(&self.coords)))
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(self.with(self.algebra.inverse_raw(&self.coords)?))
    }

    pub fn is_hermitian(&self) -> bool {
        self.involve().is_ok_and(|s| s == *self)
    }

    /// Same coordinates, read in another algebra with the same model (for
    /// example after twisting the involution).
    pub fn rebase(&self, algebra: &Arc<AssocAlgebra>) -> Result<Self> {
        algebra.check_member(self)?;
        Ok(AssocElement {
            algebra: algebra.clone(),
            coords: self.coords.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, Sampler};

    fn rat() -> Arc<EtaleSpec> {
        EtaleSpec::rational()
    }

    fn sqrt2() -> Arc<EtaleSpec> {
        EtaleSpec::new(EtaleKind::quadratic_field(q(2))).unwrap()
    }

    fn diag(alg: &Arc<AssocAlgebra>, d: [i64; 3]) -> AssocElement {
        let z = Q::zero;
        AssocElement::from_rational_rows(
            alg,
            [[q(d[0]), z(), z()], [z(), q(d[1]), z()], [z(), z(), q(d[2])]],
        )
        .unwrap()
    }

    fn split_crossed(gamma: i64) -> Arc<AssocAlgebra> {
        let l = EtaleSpec::new(EtaleKind::SplitCubic).unwrap();
        let g = EtaleElement::scalar(&rat(), &q(gamma));
        // z ↦ z⁻¹ needs γ γ̄ = 1
        AssocAlgebra::crossed(&l, &g, BaseInvolution::StandardCrossed)
            .expect_err("no involution for this gamma");
        AssocAlgebra::crossed_without_involution(&l, &g).unwrap()
    }

    #[test]
    fn mat3_basics() {
        let m = AssocAlgebra::mat3(&rat(), BaseInvolution::ConjTranspose).unwrap();
        let d = diag(&m, [1, 2, 3]);
        assert_eq!(d.mul(&AssocElement::one(&m)).unwrap(), d);
        assert_eq!(d.reduced_norm().as_rational(), Some(q(6)));
        assert_eq!(d.reduced_trace().as_rational(), Some(q(6)));
        assert_eq!(AssocElement::one(&m).reduced_trace().as_rational(), Some(q(3)));
        assert_eq!(d.sharp(), diag(&m, [6, 3, 2]));
        assert_eq!(diag(&m, [1, 1, 0]).sharp(), diag(&m, [0, 0, 1]));
        assert_eq!(AssocElement::one(&m).sharp(), AssocElement::one(&m));
        assert_eq!(AssocElement::one(&m).involve().unwrap(), AssocElement::one(&m));
    }

    #[test]
    fn crossed_product_relations() {
        let alg = split_crossed(2);
        let l = match alg.model() {
            AssocModel::Crossed { cubic, .. } => cubic.clone(),
            _ => unreachable!(),
        };
        let zero = EtaleElement::zero(&l);
        let one = EtaleElement::one(&l);
        let z = AssocElement::crossed(&alg, [&zero, &one, &zero]).unwrap();
        let lv = EtaleElement::from_ints(&l, &[1, 2, 3]).unwrap();
        let le = AssocElement::crossed(&alg, [&lv, &zero, &zero]).unwrap();
        let rl = AssocElement::crossed(&alg, [&lv.apply_galois(GaloisMap::Rho).unwrap(), &zero, &zero]).unwrap();
        assert_eq!(z.mul(&le).unwrap(), rl.mul(&z).unwrap());
        let z2 = z.mul(&z).unwrap();
        let gamma = AssocElement::from_center(&alg, &EtaleElement::scalar(&rat(), &q(2))).unwrap();
        assert_eq!(z.mul(&z2).unwrap(), gamma);
        assert_eq!(z.reduced_norm().as_rational(), Some(q(2)));
        assert_eq!(z.reduced_trace().as_rational(), Some(q(0)));
        assert_eq!(le.reduced_norm(), lv.norm());
    }

    fn models() -> Vec<Arc<AssocAlgebra>> {
        let k = sqrt2();
        let l = EtaleSpec::new(EtaleKind::SplitCubic).unwrap();
        let c = EtaleSpec::new(EtaleKind::cyclic_cubic(
            [q(-1), q(-3), q(0), q(1)],
            [q(2), q(0), q(-1)],
        ))
        .unwrap();
        let lk = EtaleSpec::composite(&c, &k).unwrap();
        let m3q = AssocAlgebra::mat3(&rat(), BaseInvolution::ConjTranspose).unwrap();
        // γ ∈ K with γ γ̄ = 1 so that z ↦ z⁻¹ is compatible with z³ = γ.
        let gamma = EtaleElement::from_ints(&k, &[3, 2]).unwrap();
        vec![
            AssocAlgebra::mat3(&k, BaseInvolution::ConjTranspose).unwrap(),
            m3q.clone(),
            AssocAlgebra::double_opposite(&m3q).unwrap(),
            AssocAlgebra::crossed(&lk, &gamma, BaseInvolution::StandardCrossed).unwrap(),
            AssocAlgebra::crossed_without_involution(&c, &EtaleElement::scalar(&rat(), &q(2))).unwrap(),
            AssocAlgebra::etale(&EtaleSpec::composite(&l, &k).unwrap()).unwrap(),
            AssocAlgebra::double_opposite(&AssocAlgebra::etale(&l).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn norm_sharp_and_involution_identities() {
        for (m, alg) in models().iter().enumerate() {
            let mut rng = Sampler::new(300 + m as u64);
            let one = AssocElement::one(alg);
            for _ in 0..100 {
                let x = AssocElement::new(alg, rng.vector(alg.dim())).unwrap();
                let y = AssocElement::new(alg, rng.vector(alg.dim())).unwrap();
                let xy = x.mul(&y).unwrap();
                assert_eq!(xy.reduced_norm(), &x.reduced_norm() * &y.reduced_norm(), "model {m}");
                let n1 = one.center_scale(&x.reduced_norm()).unwrap();
                assert_eq!(x.mul(&x.sharp()).unwrap(), n1, "model {m}");
                assert_eq!(x.sharp().mul(&x).unwrap(), n1, "model {m}");
                assert_eq!(x.sharp().sharp(), x.center_scale(&x.reduced_norm()).unwrap(), "model {m}");
                if alg.involution().is_some() {
                    assert_eq!(xy.involve().unwrap(), y.involve().unwrap().mul(&x.involve().unwrap()).unwrap(), "model {m}");
                }
            }
        }
    }

    #[test]
    fn hermitian_dimensions() {
        let k = sqrt2();
        let m3k = AssocAlgebra::mat3(&k, BaseInvolution::ConjTranspose).unwrap();
        assert_eq!(m3k.involution_kind().unwrap(), InvolutionKind::Second);
        assert_eq!(m3k.hermitian_basis().unwrap().dim(), 9);
        let m3q = AssocAlgebra::mat3(&rat(), BaseInvolution::ConjTranspose).unwrap();
        let dop = AssocAlgebra::double_opposite(&m3q).unwrap();
        assert_eq!(dop.involution_kind().unwrap(), InvolutionKind::Second);
        let h = dop.hermitian_basis().unwrap();
        assert_eq!(h.dim(), 9);
        for b in &h.basis {
            let (x, y) = AssocElement::new(&dop, b.clone()).unwrap().unpair().unwrap();
            assert_eq!(x, y);
        }
        assert_eq!(m3q.hermitian_basis().unwrap().dim(), 6);
        let first = AssocAlgebra::mat3(&k, BaseInvolution::Transpose).unwrap();
        assert_eq!(first.involution_kind().unwrap(), InvolutionKind::First);
    }

    #[test]
    fn twisted_involution() {
        let k = sqrt2();
        let m3k = AssocAlgebra::mat3(&k, BaseInvolution::ConjTranspose).unwrap();
        let v = {
            let z = Q::zero;
            AssocElement::from_rational_rows(&m3k, [[q(1), z(), z()], [z(), q(1), z()], [z(), z(), q(2)]]).unwrap()
        };
        let tw = m3k.twist_involution(&v).unwrap();
        assert_eq!(tw.check_involution().unwrap(), InvolutionKind::Second);
        let vt = v.rebase(&tw).unwrap();
        assert_eq!(vt.involve().unwrap(), vt);
        assert_eq!(tw.hermitian_basis().unwrap().dim(), 9);
        let id = m3k.twist_involution(&AssocElement::one(&m3k)).unwrap();
        let mut rng = Sampler::new(9);
        for _ in 0..20 {
            let x = AssocElement::new(&m3k, rng.vector(18)).unwrap();
            assert_eq!(x.rebase(&id).unwrap().involve().unwrap().coords(), x.involve().unwrap().coords());
        }
        let nonherm = AssocElement::new(&m3k, rng.vector(18)).unwrap();
        assert_eq!(m3k.twist_involution(&nonherm), Err(Error::NotHermitian));
        let singular = diag(&AssocAlgebra::mat3(&k, BaseInvolution::ConjTranspose).unwrap(), [1, 0, 1]);
        assert_eq!(m3k.twist_involution(&singular), Err(Error::NotInvertible));
    }

    #[test]
    fn mismatched_algebras() {
        let a = AssocAlgebra::mat3(&rat(), BaseInvolution::ConjTranspose).unwrap();
        let b = AssocAlgebra::mat3(&sqrt2(), BaseInvolution::ConjTranspose).unwrap();
        assert_eq!(
            AssocElement::one(&a).mul(&AssocElement::one(&b)),
            Err(Error::AlgebraMismatch)
        );
    }

    #[test]
    fn inverse_of_crossed_element() {
        let alg = split_crossed(2);
        let mut rng = Sampler::new(4);
        for _ in 0..20 {
            let x = AssocElement::new(&alg, rng.vector(9)).unwrap();
            let inv = x.inverse().unwrap();
            assert_eq!(x.mul(&inv).unwrap(), AssocElement::one(&alg));
        }
    }

    #[test]
    fn involution_fixes_one_and_is_order_two() {
        for alg in models().into_iter().filter(|a| a.involution().is_some()) {
            let s = alg.involution_matrix();
            assert!(s.mul(&s).is_identity());
            let one = AssocElement::one(&alg);
            assert_eq!(one.involve().unwrap(), one);
        }
    }
}

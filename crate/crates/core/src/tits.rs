//! Jordan structures built from associative algebras: hermitian parts,
//! the Tits process `J(B, σ, u, μ)` and its specializations, isotopes,
//! and the explicit isomorphisms between them.
//!
//! The carrier of `J(B, σ, u, μ)` is `(B, σ)_+ ⊕ B`: first the coordinates
//! of `b` in the hermitian basis of `B` (see [`HermitianSpace`]), then the
//! `Q`-coordinates of `x ∈ B`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::assoc::{AssocAlgebra, AssocElement, AssocModel, HermitianSpace, InvolutionKind};
use crate::cubic::{cubic_form_equal, Certificate, CubicNormModel, CubicNormStructure, Provenance, Sweep};
use crate::error::{Error, Result};
use crate::etale::{EtaleElement, EtaleSpec, GaloisMap};
use crate::linalg::Matrix;
use crate::rational::{scale_vec, show, sub_vec, zeros, Q};

fn base_valued(c: &EtaleElement, what: &str) -> Result<Q> {
    c.as_rational()
        .ok_or_else(|| Error::NotBaseValued(format!("{what} = {}", show(c.coords()))))
}

// ---- hermitian parts -----------------------------------------------------

/// `(B, σ)_+` with the restricted reduced norm and adjoint.
pub struct HermitianModel {
    alg: Arc<AssocAlgebra>,
    herm: HermitianSpace,
}

impl HermitianModel {
    pub fn new(alg: &Arc<AssocAlgebra>) -> Result<Self> {
        Ok(HermitianModel {
            herm: alg.hermitian_basis()?,
            alg: alg.clone(),
        })
    }

    pub fn algebra(&self) -> &Arc<AssocAlgebra> {
        &self.alg
    }

    pub fn space(&self) -> &HermitianSpace {
        &self.herm
    }
}

impl CubicNormModel for HermitianModel {
    fn dim(&self) -> usize {
        self.herm.dim()
    }

    fn norm(&self, x: &[Q]) -> Result<Q> {
        let b = self.herm.element(x);
        let n = EtaleElement::new(self.alg.center(), self.alg.norm_raw(&b))?;
        base_valued(&n, "N_B on a hermitian element")
    }

    fn adjoint(&self, x: &[Q]) -> Result<Vec<Q>> {
        Ok(self.herm.coords_of(&self.alg.sharp_raw(&self.herm.element(x))))
    }

    fn base_point(&self) -> Vec<Q> {
        self.herm.coords_of(&self.alg.one_raw())
    }

    fn provenance(&self) -> Provenance {
        match self.alg.model() {
            AssocModel::Etale { .. } => Provenance::Etale,
            _ => Provenance::Hermitian,
        }
    }

    fn describe(&self) -> String {
        format!("({})_+ of dimension {}", self.alg.model_label(), self.herm.dim())
    }
}

pub fn hermitian_structure(alg: &Arc<AssocAlgebra>) -> Result<CubicNormStructure> {
    CubicNormStructure::from_model(HermitianModel::new(alg)?)
}

/// The cubic étale algebra `L` as a cubic norm structure: `N_L`, `l^#`, `1`.
pub fn etale_structure(l: &Arc<EtaleSpec>) -> Result<CubicNormStructure> {
    if l.kind().is_quadratic() || l.base().dim() != 1 {
        return Err(Error::InvalidSpec("étale structure needs a cubic algebra over Q".to_string()));
    }
    hermitian_structure(&AssocAlgebra::etale(l)?)
}

// ---- Tits process ----------------------------------------------------------

/// An admissible pair `(u, μ)`: `σ(u) = u`, `N_B(u) = μ μ̄`, `μ` a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePair {
    pub u: AssocElement,
    pub mu: EtaleElement,
}

pub struct TitsProcess {
    alg: Arc<AssocAlgebra>,
    herm: HermitianSpace,
    u: Vec<Q>,
    u_inv: Vec<Q>,
    u_is_one: bool,
    mu: EtaleElement,
    mu_bar: EtaleElement,
}

impl TitsProcess {
    pub fn algebra(&self) -> &Arc<AssocAlgebra> {
        &self.alg
    }

    pub fn hermitian_space(&self) -> &HermitianSpace {
        &self.herm
    }

    pub fn pair(&self) -> AdmissiblePair {
        AdmissiblePair {
            u: AssocElement::new(&self.alg, self.u.clone()).expect("dims"),
            mu: self.mu.clone(),
        }
    }

    pub fn u_is_one(&self) -> bool {
        self.u_is_one
    }

    pub fn hermitian_dim(&self) -> usize {
        self.herm.dim()
    }

    /// `(b, x)` with `b` expanded to full `B`-coordinates.
    pub fn split(&self, v: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let h = self.herm.dim();
        (self.herm.element(&v[..h]), v[h..].to_vec())
    }

    /// Carrier coordinates of `(b, x)`; `b` must be hermitian.
    pub fn join(&self, b: &[Q], x: &[Q]) -> Vec<Q> {
        [self.herm.coords_of(b), x.to_vec()].concat()
    }

    fn x_u_sigma_x(&self, x: &[Q]) -> Vec<Q> {
        let sx = self.alg.involve_raw(x);
        if self.u_is_one {
            self.alg.mul_raw(x, &sx)
        } else {
            self.alg.mul_raw(&self.alg.mul_raw(x, &self.u), &sx)
        }
    }
}

impl CubicNormModel for TitsProcess {
    fn dim(&self) -> usize {
        self.herm.dim() + self.alg.dim()
    }

    /// `N_B(b) + T_K(μ N_B(x)) - T_B(b x u σ(x))`.
    fn norm(&self, v: &[Q]) -> Result<Q> {
        let (b, x) = self.split(v);
        let center = self.alg.center();
        let nb = base_valued(&EtaleElement::new(center, self.alg.norm_raw(&b))?, "N_B(b)")?;
        let nx = EtaleElement::new(center, self.alg.norm_raw(&x))?;
        let second = base_valued(&(&self.mu * &nx).trace(), "T_K(mu N_B(x))")?;
        let third = if x.iter().all(Zero::is_zero) {
            Q::zero()
        } else {
            let t = self.alg.trace_mul_raw(&b, &self.x_u_sigma_x(&x));
            base_valued(&EtaleElement::new(center, t)?, "T_B(b x u sigma(x))")?
        };
        Ok(nb + second - third)
    }

    /// `(b^# - x u σ(x), μ̄ σ(x)^# u⁻¹ - b x)`.
    fn adjoint(&self, v: &[Q]) -> Result<Vec<Q>> {
        let (b, x) = self.split(v);
        let first = sub_vec(&self.alg.sharp_raw(&b), &self.x_u_sigma_x(&x));
        let mut sxs = self.alg.sharp_raw(&self.alg.involve_raw(&x));
        if !self.u_is_one {
            sxs = self.alg.mul_raw(&sxs, &self.u_inv);
        }
        let second = sub_vec(&self.alg.center_scale_raw(self.mu_bar.coords(), &sxs), &self.alg.mul_raw(&b, &x));
        Ok(self.join(&first, &second))
    }

    fn base_point(&self) -> Vec<Q> {
        self.join(&self.alg.one_raw(), &zeros(self.alg.dim()))
    }

    fn provenance(&self) -> Provenance {
        Provenance::TitsProcess
    }

    fn labels(&self) -> Vec<String> {
        let h = self.herm.dim();
        (0..h)
            .map(|i| format!("b{i}"))
            .chain((0..self.alg.dim()).map(|j| format!("x{j}")))
            .collect()
    }

    fn describe(&self) -> String {
        format!(
            "J({}, u, mu={}) of dimension {}",
            self.alg.model_label(),
            show(self.mu.coords()),
            self.dim()
        )
    }
}

/// A built Tits process together with its cubic norm structure.
#[derive(Clone)]
pub struct TitsProcessAlgebra {
    process: Arc<TitsProcess>,
    structure: CubicNormStructure,
}

impl core::fmt::Debug for TitsProcessAlgebra {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.process.describe())
    }
}

impl TitsProcessAlgebra {
    pub fn process(&self) -> &Arc<TitsProcess> {
        &self.process
    }

    pub fn structure(&self) -> &CubicNormStructure {
        &self.structure
    }

    pub fn algebra(&self) -> &Arc<AssocAlgebra> {
        &self.process.alg
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// Carrier coordinates of `(b, x)` for `b ∈ (B, σ)_+`, `x ∈ B`.
    pub fn element(&self, b: &AssocElement, x: &AssocElement) -> Result<Vec<Q>> {
        if !self.process.alg.same_algebra(b.algebra()) || !self.process.alg.same_algebra(x.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        if self.process.alg.involve_raw(b.coords()) != b.coords() {
            return Err(Error::NotHermitian);
        }
        Ok(self.process.join(b.coords(), x.coords()))
    }

    pub fn parts(&self, v: &[Q]) -> Result<(AssocElement, AssocElement)> {
        let (b, x) = self.process.split(v);
        Ok((AssocElement::new(&self.process.alg, b)?, AssocElement::new(&self.process.alg, x)?))
    }
}

fn admissibility(alg: &Arc<AssocAlgebra>, u: &AssocElement, mu: &EtaleElement) -> Result<EtaleElement> {
    if !alg.same_algebra(u.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    if alg.involution_kind()? != InvolutionKind::Second {
        let moved = (0..alg.center().dim()).find_map(|i| {
            let e = crate::rational::unit_vector(alg.center().dim(), i);
            let img = alg.involve_raw(&alg.embed_center_raw(&e));
            (img == alg.embed_center_raw(&e) && !alg.center().one_coords().eq(&e[..]))
                .then(|| alg.center().labels()[i].clone())
        });
        return Err(Error::NotAdmissible(format!(
            "involution is not of the second kind: sigma fixes the central element {}",
            moved.unwrap_or_else(|| "of the center".to_string())
        )));
    }
    if alg.involve_raw(u.coords()) != u.coords() {
        return Err(Error::NotAdmissible(format!("sigma(u) != u for u = {}", show(u.coords()))));
    }
    if mu.spec().as_ref() != alg.center().as_ref() {
        return Err(Error::NotAdmissible("mu must lie in the center".to_string()));
    }
    let nu = u.reduced_norm();
    if nu.inverse().is_err() {
        return Err(Error::NotAdmissible("N_B(u) is not a unit".to_string()));
    }
    if mu.inverse().is_err() {
        return Err(Error::NotAdmissible("mu is not a unit".to_string()));
    }
    let mu_bar = mu.apply_galois(GaloisMap::Bar)?;
    let mm = mu * &mu_bar;
    if nu != mm {
        return Err(Error::NotAdmissible(format!(
            "N_B(u) ≠ μμ̄: N_B(u) = {}, mu mu-bar = {}",
            show(nu.coords()),
            show(mm.coords())
        )));
    }
    Ok(mu_bar)
}

/// `J(B, σ, u, μ)`; `σ` must be of the second kind and `(u, μ)` admissible.
pub fn build_tits(alg: &Arc<AssocAlgebra>, u: &AssocElement, mu: &EtaleElement) -> Result<TitsProcessAlgebra> {
    let mu_bar = admissibility(alg, u, mu)?;
    let u_inv = alg.inverse_raw(u.coords())?;
    let process = Arc::new(TitsProcess {
        herm: alg.hermitian_basis()?,
        alg: alg.clone(),
        u_is_one: u.coords() == alg.one_raw().as_slice(),
        u: u.coords().to_vec(),
        u_inv,
        mu: mu.clone(),
        mu_bar,
    });
    let structure = CubicNormStructure::new(process.clone())?;
    Ok(TitsProcessAlgebra { process, structure })
}

/// First construction: `J(D × D°, ε, (u, u), (μ, N(u)/μ))` for `D` with
/// center `Q`; `u` defaults to `1`.
pub fn build_first_construction(d: &Arc<AssocAlgebra>, mu: &Q, u: Option<&AssocElement>) -> Result<TitsProcessAlgebra> {
    if mu.is_zero() {
        return Err(Error::NotAdmissible("mu is not a unit".to_string()));
    }
    let b = AssocAlgebra::double_opposite(d)?;
    let u0 = match u {
        Some(u) => u.clone(),
        None => AssocElement::one(d),
    };
    let nu = base_valued(&u0.reduced_norm(), "N(u)")?;
    let uu = AssocElement::pair(&b, &u0, &u0)?;
    let mu_pair = EtaleElement::new(b.center(), alloc::vec![mu.clone(), nu / mu])?;
    build_tits(&b, &uu, &mu_pair)
}

// ---- carrier maps and certificates --------------------------------------

/// Linear map between Tits carriers from its action on `(b, x)` in full
/// `B`-coordinates.
pub fn carrier_map<F>(src: &TitsProcess, dst: &TitsProcess, mut f: F) -> Result<Matrix>
where
    F: FnMut(&[Q], &[Q]) -> Result<(Vec<Q>, Vec<Q>)>,
{
    let n = src.dim();
    let columns = (0..n)
        .map(|j| {
            let (b, x) = src.split(&crate::rational::unit_vector(n, j));
            let (fb, fx) = f(&b, &x)?;
            if dst.alg.involve_raw(&fb) != fb {
                return Err(Error::NotHermitian);
            }
            Ok(dst.join(&fb, &fx))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(dst.dim(), &columns))
}

/// A linear operator with its norm-similarity certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedOperator {
    pub matrix: Matrix,
    pub certificate: Certificate,
    pub fixes_identity: bool,
}

impl CertifiedOperator {
    pub fn is_isomorphism(&self) -> bool {
        self.certificate.holds && self.fixes_identity && self.certificate.nu.is_one()
    }
}

/// Certifies `f: S1 → S2` as an isomorphism: `f(c_1) = c_2` and
/// `N_2 ∘ f = N_1`.
pub fn certify_isomorphism(
    f: &Matrix,
    s1: &CubicNormStructure,
    s2: &CubicNormStructure,
    sweep: &dyn Sweep,
) -> Result<CertifiedOperator> {
    let certificate = cubic_form_equal(f, s1, s2, &Q::one(), sweep)?;
    let fixes_identity = f.apply(s1.base_point()) == s2.base_point();
    Ok(CertifiedOperator {
        matrix: f.clone(),
        certificate,
        fixes_identity,
    })
}

fn require_isomorphism(op: CertifiedOperator, what: &str) -> Result<CertifiedOperator> {
    if op.is_isomorphism() {
        Ok(op)
    } else if !op.fixes_identity {
        Err(Error::CertificationFailure(format!("{what}: identity is not preserved")))
    } else {
        Err(Error::CertificationFailure(format!(
            "{what}: norms differ at {}",
            show(op.certificate.witness.as_deref().unwrap_or(&[]))
        )))
    }
}

// ---- isotopes ------------------------------------------------------------

/// `N^(v) = N(v) N`, `x^#(v) = N(v) U_v⁻¹(x^#)`, `c^(v) = v⁻¹`.
pub struct IsotopeModel {
    parent: CubicNormStructure,
    v: Vec<Q>,
    nv: Q,
    u_inv: Matrix,
    unit: Vec<Q>,
}

impl IsotopeModel {
    pub fn parent(&self) -> &CubicNormStructure {
        &self.parent
    }

    pub fn v(&self) -> &[Q] {
        &self.v
    }
}

impl CubicNormModel for IsotopeModel {
    fn dim(&self) -> usize {
        self.parent.dim()
    }

    fn norm(&self, x: &[Q]) -> Result<Q> {
        Ok(&self.nv * self.parent.norm(x)?)
    }

    fn adjoint(&self, x: &[Q]) -> Result<Vec<Q>> {
        Ok(scale_vec(&self.nv, &self.u_inv.apply(&self.parent.adjoint(x)?)))
    }

    fn base_point(&self) -> Vec<Q> {
        self.unit.clone()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Isotope
    }

    fn labels(&self) -> Vec<String> {
        self.parent.labels()
    }

    fn describe(&self) -> String {
        format!("isotope of [{}] at {}", self.parent.describe(), show(&self.v))
    }
}

pub fn isotope(s: &CubicNormStructure, v: &[Q]) -> Result<CubicNormStructure> {
    let nv = s.norm(v)?;
    if nv.is_zero() {
        return Err(Error::NotInvertible);
    }
    let u_inv = s.u_matrix(v)?.inverse().map_err(|_| Error::NotInvertible)?;
    let unit = s.invert(v)?;
    CubicNormStructure::from_model(IsotopeModel {
        parent: s.clone(),
        v: v.to_vec(),
        nv,
        u_inv,
        unit,
    })
}

/// `J^(v) ≅ J(B, σ_v, u v^#, N(v) μ)` via `(b, x) ↦ (v b, x)`.
#[derive(Clone, Debug)]
pub struct IsotopeIsomorphism {
    pub isotope: CubicNormStructure,
    pub target: TitsProcessAlgebra,
    pub target_u: AssocElement,
    pub target_mu: EtaleElement,
    pub map: CertifiedOperator,
}

fn isotope_replay(j: &TitsProcessAlgebra, v: &AssocElement, twist: bool, sweep: &dyn Sweep) -> Result<IsotopeIsomorphism> {
    let p = j.process();
    let alg = &p.alg;
    if !alg.same_algebra(v.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    if alg.involve_raw(v.coords()) != v.coords() {
        return Err(Error::NotHermitian);
    }
    let nv_c = v.reduced_norm();
    if nv_c.inverse().is_err() {
        return Err(Error::NotInvertible);
    }
    let target_alg = if twist { alg.twist_involution(v)? } else { alg.clone() };
    let pair = p.pair();
    let target_u = pair.u.mul(&v.sharp())?.rebase(&target_alg)?;
    let target_mu = &nv_c * &pair.mu;
    let target = build_tits(&target_alg, &target_u, &target_mu)?;
    let carrier_v = p.join(v.coords(), &zeros(alg.dim()));
    let iso = isotope(j.structure(), &carrier_v)?;
    let f = carrier_map(p, target.process(), |b, x| Ok((alg.mul_raw(v.coords(), b), x.to_vec())))?;
    let op = certify_isomorphism(&f, &iso, target.structure(), sweep)?;
    Ok(IsotopeIsomorphism {
        isotope: iso,
        target,
        target_u,
        target_mu,
        map: require_isomorphism(op, "isotope map")?,
    })
}

/// Étale case `J(LK, *, u, μ)^(v) ≅ J(LK, *, u v^#, N(v) μ)` via
/// `(l, x) ↦ (l v, x)`; `v` is a hermitian element, i.e. lies in `L`.
pub fn isotope_params(j: &TitsProcessAlgebra, v: &AssocElement, sweep: &dyn Sweep) -> Result<IsotopeIsomorphism> {
    if !matches!(j.algebra().model(), AssocModel::Etale { .. }) {
        return Err(Error::InvalidAlgebra(
            "isotope_params expects a Tits process over an étale algebra".to_string(),
        ));
    }
    isotope_replay(j, v, false, sweep)
}

/// `J(B, σ, u, μ)^(v) ≅ J(B, σ_v, u v^#, N(v) μ)` via `(b, x) ↦ (v b, x)`.
pub fn isotope_params_albert(j: &TitsProcessAlgebra, v: &AssocElement, sweep: &dyn Sweep) -> Result<IsotopeIsomorphism> {
    isotope_replay(j, v, true, sweep)
}

// ---- automorphisms -------------------------------------------------------

/// `ρ̃((l, x)) = (ρ(l), ρ(x))` on `J(LK, *, 1, μ)`.
pub fn extend_galois(j: &TitsProcessAlgebra, sweep: &dyn Sweep) -> Result<CertifiedOperator> {
    let p = j.process();
    let AssocModel::Etale { field } = p.alg.model() else {
        return Err(Error::HypothesisViolation(
            "Galois extension needs a Tits process over an étale algebra".to_string(),
        ));
    };
    if !p.u_is_one {
        return Err(Error::HypothesisViolation("the first parameter u is not 1".to_string()));
    }
    let rho = |v: &[Q]| -> Result<Vec<Q>> {
        Ok(EtaleElement::new(field, v.to_vec())?.apply_galois(GaloisMap::Rho)?.into_coords())
    };
    let f = carrier_map(p, p, |b, x| Ok((rho(b)?, rho(x)?)))?;
    let op = certify_isomorphism(&f, j.structure(), j.structure(), sweep)?;
    require_isomorphism(op, "extended Galois map")
}

/// `(b, x) ↦ (g b g⁻¹, g x g⁻¹)` for `σ(g) g = 1` commuting with `u`.
pub fn inner_automorphism(j: &TitsProcessAlgebra, g: &AssocElement, sweep: &dyn Sweep) -> Result<CertifiedOperator> {
    let p = j.process();
    let alg = &p.alg;
    if !alg.same_algebra(g.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    let gi = alg.involve_raw(g.coords());
    if alg.mul_raw(&gi, g.coords()) != alg.one_raw() {
        return Err(Error::HypothesisViolation("sigma(g) g != 1".to_string()));
    }
    if alg.mul_raw(g.coords(), &p.u) != alg.mul_raw(&p.u, g.coords()) {
        return Err(Error::HypothesisViolation("g does not commute with u".to_string()));
    }
    let conj = |v: &[Q]| alg.mul_raw(&alg.mul_raw(g.coords(), v), &gi);
    let f = carrier_map(p, p, |b, x| Ok((conj(b), conj(x))))?;
    let op = certify_isomorphism(&f, j.structure(), j.structure(), sweep)?;
    require_isomorphism(op, "inner automorphism")
}

/// `v = λ u` with `λ² = N(u)⁻¹` normalizes the first parameter of an étale
/// Tits process to `λ² u u^# = 1`. Returns `v` when `N(u)⁻¹` is a rational
/// square and `None` otherwise.
pub fn normalizing_element(j: &TitsProcessAlgebra) -> Result<Option<AssocElement>> {
    let pair = j.process().pair();
    let nu = base_valued(&pair.u.reduced_norm(), "N(u)")?;
    if nu.is_zero() {
        return Err(Error::NotInvertible);
    }
    let inv = nu.recip();
    Ok(rational_sqrt(&inv).map(|lambda| pair.u.scale(&lambda)))
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    if x < &Q::zero() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Q::new(rn, rd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::BaseInvolution;
    use crate::cubic::{axiom_suite, SequentialSweep};
    use crate::etale::EtaleKind;
    use crate::rational::{q, Sampler};

    fn k2() -> Arc<EtaleSpec> {
        EtaleSpec::new(EtaleKind::quadratic_field(q(2))).unwrap()
    }

    fn l3() -> Arc<EtaleSpec> {
        EtaleSpec::new(EtaleKind::SplitCubic).unwrap()
    }

    /// `J(LK, *, 1, 3+2√2)` with `L = Q³`, `K = Q(√2)`.
    fn nine() -> TitsProcessAlgebra {
        let lk = EtaleSpec::composite(&l3(), &k2()).unwrap();
        let b = AssocAlgebra::etale(&lk).unwrap();
        let mu = EtaleElement::from_ints(&k2(), &[3, 2]).unwrap();
        build_tits(&b, &AssocElement::one(&b), &mu).unwrap()
    }

    fn lk_elem(j: &TitsProcessAlgebra, l: &[i64]) -> AssocElement {
        let AssocModel::Etale { field } = j.algebra().model() else { unreachable!() };
        let le = EtaleElement::from_ints(&l3(), l).unwrap();
        AssocElement::from_etale(j.algebra(), &EtaleElement::embed_cubic(field, &le).unwrap()).unwrap()
    }

    #[test]
    fn nine_dim_norm_examples() {
        let j = nine();
        assert_eq!(j.dim(), 9);
        let s = j.structure();
        let zero = AssocElement::zero(j.algebra());
        let one = AssocElement::one(j.algebra());
        assert_eq!(s.norm(&j.element(&zero, &one).unwrap()).unwrap(), q(6));
        assert_eq!(s.norm(&j.element(&one, &zero).unwrap()).unwrap(), q(1));
        assert_eq!(s.norm(&j.element(&one, &one).unwrap()).unwrap(), q(4));
        assert_eq!(s.base_point(), j.element(&one, &zero).unwrap().as_slice());
        assert_eq!(s.trace_bilinear(s.base_point(), s.base_point()), q(3));
    }

    #[test]
    fn nine_dim_axioms() {
        let r = axiom_suite(nine().structure(), 100, 3);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn admissibility_failures() {
        let lk = EtaleSpec::composite(&l3(), &k2()).unwrap();
        let b = AssocAlgebra::etale(&lk).unwrap();
        let mu = EtaleElement::from_ints(&k2(), &[1, 1]).unwrap();
        match build_tits(&b, &AssocElement::one(&b), &mu) {
            Err(Error::NotAdmissible(m)) => assert!(m.contains("N_B(u) ≠ μμ̄"), "{m}"),
            other => panic!("{other:?}"),
        }
        let m3 = AssocAlgebra::mat3(&k2(), BaseInvolution::Transpose).unwrap();
        let mu = EtaleElement::from_ints(&k2(), &[3, 2]).unwrap();
        assert!(matches!(
            build_tits(&m3, &AssocElement::one(&m3), &mu),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn hermitian_matrices() {
        let m3 = AssocAlgebra::mat3(&EtaleSpec::rational(), BaseInvolution::ConjTranspose).unwrap();
        let s = hermitian_structure(&m3).unwrap();
        assert_eq!(s.dim(), 6);
        assert!(axiom_suite(&s, 100, 4).passed());
        // Trace form agrees with T_B(xy).
        let h = HermitianModel::new(&m3).unwrap();
        let mut rng = Sampler::new(8);
        for _ in 0..20 {
            let x = rng.vector(6);
            let y = rng.vector(6);
            let xy = m3.mul_raw(&h.space().element(&x), &h.space().element(&y));
            assert_eq!(s.trace_bilinear(&x, &y), m3.trace_raw(&xy)[0]);
        }
    }

    #[test]
    fn etale_trace_matches_algebra_trace() {
        let l = EtaleSpec::new(EtaleKind::cyclic_cubic([q(-1), q(-3), q(0), q(1)], [q(2), q(0), q(-1)])).unwrap();
        let s = etale_structure(&l).unwrap();
        let mut rng = Sampler::new(2);
        for _ in 0..20 {
            let x = EtaleElement::new(&l, rng.vector(3)).unwrap();
            let y = EtaleElement::new(&l, rng.vector(3)).unwrap();
            let cx = HermitianModel::new(&AssocAlgebra::etale(&l).unwrap()).unwrap();
            let (xc, yc) = (cx.space().coords_of(x.coords()), cx.space().coords_of(y.coords()));
            assert_eq!(s.trace_bilinear(&xc, &yc), (&x * &y).trace().as_rational().unwrap());
        }
    }

    #[test]
    fn isotope_examples() {
        let s = etale_structure(&l3()).unwrap();
        let iso = isotope(&s, &crate::rational::qvec(&[1, 1, 2])).unwrap();
        assert_eq!(iso.base_point(), &[q(1), q(1), crate::rational::frac(1, 2)]);
        assert_eq!(iso.norm(&crate::rational::qvec(&[1, 1, 1])).unwrap(), q(2));
        assert!(axiom_suite(&iso, 50, 5).passed());
        let unit = isotope(&s, s.base_point()).unwrap();
        let mut rng = Sampler::new(1);
        for _ in 0..10 {
            let x = rng.vector(3);
            assert_eq!(unit.norm(&x).unwrap(), s.norm(&x).unwrap());
            assert_eq!(unit.adjoint(&x).unwrap(), s.adjoint(&x).unwrap());
        }
        assert_eq!(isotope(&s, &crate::rational::qvec(&[1, 0, 2])).err(), Some(Error::NotInvertible));
    }

    #[test]
    fn isotope_params_split() {
        let j = nine();
        let v = lk_elem(&j, &[1, 1, 2]);
        let r = isotope_params(&j, &v, &SequentialSweep).unwrap();
        assert!(r.map.is_isomorphism());
        assert_eq!(r.map.certificate.evaluations, 165);
        assert_eq!(r.target_u.coords(), lk_elem(&j, &[2, 2, 1]).coords());
        assert_eq!(r.target_mu, EtaleElement::from_ints(&k2(), &[6, 4]).unwrap());
        let unit = isotope_params(&j, &AssocElement::one(j.algebra()), &SequentialSweep).unwrap();
        assert!(unit.map.matrix.is_identity());
    }

    #[test]
    fn galois_extension() {
        let j = nine();
        let op = extend_galois(&j, &SequentialSweep).unwrap();
        assert!(op.is_isomorphism());
        assert!(op.matrix.pow(3).is_identity());
        assert!(!op.matrix.is_identity());
        // (1,2,3) ↦ (2,3,1) on the L part
        let l = lk_elem(&j, &[1, 2, 3]);
        let v = j.element(&l, &AssocElement::zero(j.algebra())).unwrap();
        let img = j.element(&lk_elem(&j, &[2, 3, 1]), &AssocElement::zero(j.algebra())).unwrap();
        assert_eq!(op.matrix.apply(&v), img);
        // u ≠ 1 violates the hypothesis
        let v = lk_elem(&j, &[1, 1, 2]);
        let moved = isotope_params(&j, &v, &SequentialSweep).unwrap().target;
        assert!(matches!(extend_galois(&moved, &SequentialSweep), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn normalization_to_unit_parameter() {
        let j = nine();
        let moved = isotope_params(&j, &lk_elem(&j, &[1, 1, 4]), &SequentialSweep).unwrap().target;
        // u = (4, 4, 1), N(u) = 16, λ = 1/4
        let v = normalizing_element(&moved).unwrap().unwrap();
        let back = isotope_params(&moved, &v, &SequentialSweep).unwrap();
        assert_eq!(back.target_u, AssocElement::one(moved.algebra()));
        assert!(back.map.is_isomorphism());
    }

    #[test]
    fn first_construction_matches_composite() {
        let l = l3();
        let nu = q(2);
        let d = AssocAlgebra::etale(&l).unwrap();
        let first = build_first_construction(&d, &nu, None).unwrap();
        assert_eq!(first.dim(), 9);
        let split = EtaleSpec::new(EtaleKind::SplitQuadratic).unwrap();
        let lk = EtaleSpec::composite(&l, &split).unwrap();
        let b = AssocAlgebra::etale(&lk).unwrap();
        let mu = EtaleElement::new(&split, alloc::vec![q(2), crate::rational::frac(1, 2)]).unwrap();
        let comp = build_tits(&b, &AssocElement::one(&b), &mu).unwrap();
        // (x1, x2) ↦ x1 ⊗ f1 + x2 ⊗ f2
        let to_lk = |v: &[Q]| -> Vec<Q> { (0..3).flat_map(|i| [v[i].clone(), v[3 + i].clone()]).collect() };
        let f = carrier_map(first.process(), comp.process(), |b, x| Ok((to_lk(b), to_lk(x)))).unwrap();
        let op = certify_isomorphism(&f, first.structure(), comp.structure(), &SequentialSweep).unwrap();
        assert!(op.is_isomorphism());
        assert_eq!(first.structure().norm(first.structure().base_point()).unwrap(), q(1));
    }

    #[test]
    fn twisted_isotope_on_mat3() {
        let k = k2();
        let m3 = AssocAlgebra::mat3(&k, BaseInvolution::ConjTranspose).unwrap();
        let mu = EtaleElement::from_ints(&k, &[3, 2]).unwrap();
        let j = build_tits(&m3, &AssocElement::one(&m3), &mu).unwrap();
        assert_eq!(j.dim(), 27);
        let z = Q::zero;
        let v = AssocElement::from_rational_rows(&m3, [[q(1), z(), z()], [z(), q(1), z()], [z(), z(), q(2)]]).unwrap();
        let r = isotope_params_albert(&j, &v, &SequentialSweep).unwrap();
        assert!(r.map.is_isomorphism());
        let tu = r.target_u.reduced_norm();
        let m = &r.target_mu;
        assert_eq!(tu, m * &m.apply_galois(GaloisMap::Bar).unwrap());
    }
}

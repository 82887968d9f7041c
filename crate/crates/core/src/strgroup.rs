//! Structure-group elements as certified words, and subalgebras.
//!
//! A word `[g1, ..., gk]` denotes `g1 ∘ ... ∘ gk`. Every word carries its
//! matrix and a certificate that `N(w x) = ν N(x)` identically.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::cubic::{Certificate, CubicNormStructure, PolarizationOracle, Sweep};
use crate::error::{Error, Result};
use crate::etale::{is_rational_square, rational_roots};
use crate::linalg::{Matrix, Subspace};
use crate::rational::{q, show, Q, Sampler};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `x ↦ λ x`, multiplier `λ³`.
    Scalar(Q),
    /// `U_x`, multiplier `N(x)²`.
    UOperator(Vec<Q>),
    /// A certified automorphism, multiplier `1`.
    Automorphism { label: String, matrix: Matrix },
    /// Any linear map; its multiplier is read off as `N(M c)`.
    Explicit(Matrix),
}

impl Generator {
    pub fn label(&self) -> String {
        match self {
            Generator::Scalar(l) => format!("scalar({l})"),
            Generator::UOperator(x) => format!("U{}", show(x)),
            Generator::Automorphism { label, .. } => label.clone(),
            Generator::Explicit(_) => "explicit".to_string(),
        }
    }

    fn matrix(&self, s: &CubicNormStructure) -> Result<Matrix> {
        match self {
            Generator::Scalar(l) => Ok(Matrix::scalar(s.dim(), l)),
            Generator::UOperator(x) => {
                if s.norm(x)?.is_zero() {
                    return Err(Error::NotInvertible);
                }
                s.u_matrix(x)
            }
            Generator::Automorphism { matrix, .. } | Generator::Explicit(matrix) => {
                if matrix.rows() != s.dim() || matrix.cols() != s.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: s.dim(),
                        found: matrix.rows(),
                    });
                }
                Ok(matrix.clone())
            }
        }
    }

    /// The multiplier this letter is declared to have.
    pub fn multiplier(&self, s: &CubicNormStructure) -> Result<Q> {
        match self {
            Generator::Scalar(l) => Ok(l * l * l),
            Generator::UOperator(x) => {
                let n = s.norm(x)?;
                Ok(&n * &n)
            }
            Generator::Automorphism { .. } => Ok(Q::one()),
            Generator::Explicit(m) => s.norm(&m.apply(s.base_point())),
        }
    }

    fn inverse(&self, s: &CubicNormStructure) -> Result<Generator> {
        Ok(match self {
            Generator::Scalar(l) => {
                if l.is_zero() {
                    return Err(Error::NotInvertible);
                }
                Generator::Scalar(l.recip())
            }
            Generator::UOperator(x) => Generator::UOperator(s.invert(x)?),
            Generator::Automorphism { label, matrix } => Generator::Automorphism {
                label: format!("{label}^-1"),
                matrix: matrix.inverse().map_err(|_| Error::NotInvertible)?,
            },
            Generator::Explicit(m) => Generator::Explicit(m.inverse().map_err(|_| Error::NotInvertible)?),
        })
    }
}

#[derive(Clone)]
pub struct StrWord {
    structure: CubicNormStructure,
    gens: Vec<Generator>,
    matrix: Matrix,
    nu: Q,
    certificate: Certificate,
}

impl fmt::Debug for StrWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.gens.iter().map(Generator::label).collect();
        write!(f, "StrWord[{}] nu={}", labels.join(" . "), self.nu)
    }
}

impl StrWord {
    pub fn structure(&self) -> &CubicNormStructure {
        &self.structure
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn nu(&self) -> &Q {
        &self.nu
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.matrix.apply(x)
    }

    /// `w(c)`.
    pub fn image_of_identity(&self) -> Vec<Q> {
        self.apply(self.structure.base_point())
    }

    /// `w(c) = c`; a certified word fixing `c` has `ν = 1`.
    pub fn is_automorphism(&self) -> bool {
        self.image_of_identity() == self.structure.base_point() && self.nu.is_one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariance {
    PointwiseFixed,
    Invariant,
    Neither,
}

/// A unital `#`-closed subspace.
#[derive(Debug, Clone)]
pub struct SubalgebraHandle {
    structure: CubicNormStructure,
    space: Subspace,
}

impl SubalgebraHandle {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        self.space.basis()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.space.contains(x)
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn structure(&self) -> &CubicNormStructure {
        &self.structure
    }

    /// `c ∈ S`, `b^# ∈ S` and `b × b' ∈ S` on a basis.
    pub fn is_closed(&self) -> Result<bool> {
        if !self.space.contains(self.structure.base_point()) {
            return Ok(false);
        }
        let b = self.space.basis();
        for i in 0..b.len() {
            if !self.space.contains(&self.structure.adjoint(&b[i])?) {
                return Ok(false);
            }
            for j in i + 1..b.len() {
                if !self.space.contains(&self.structure.sharp_bilinear(&b[i], &b[j])?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Dimension stratum of a subalgebra, with a diagnostic for dimension 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub dim: usize,
    pub label: &'static str,
    pub diagnostic: String,
}

/// Word factory for one structure; caches the source-side norm values of
/// the certification oracle.
pub struct StrGroup<'a> {
    oracle: PolarizationOracle,
    sweep: &'a dyn Sweep,
}

impl<'a> StrGroup<'a> {
    pub fn new(s: &CubicNormStructure, sweep: &'a dyn Sweep) -> Result<Self> {
        Ok(StrGroup {
            oracle: PolarizationOracle::new(s, sweep)?,
            sweep,
        })
    }

    pub fn structure(&self) -> &CubicNormStructure {
        self.oracle.source()
    }

    fn check_word(&self, w: &StrWord) -> Result<()> {
        if w.structure.same_as(self.structure()) {
            Ok(())
        } else {
            Err(Error::StructureMismatch)
        }
    }

    fn certified(&self, gens: Vec<Generator>, matrix: Matrix, nu: Q) -> Result<StrWord> {
        let s = self.structure();
        if nu.is_zero() {
            return Err(Error::CertificationFailure("multiplier is zero".to_string()));
        }
        let certificate = self.oracle.certify(&matrix, s, &nu, self.sweep)?;
        if !certificate.holds {
            return Err(Error::CertificationFailure(format!(
                "N(w x) != {nu} N(x) at {}",
                show(certificate.witness.as_deref().unwrap_or(&[]))
            )));
        }
        if matrix.determinant().is_zero() {
            return Err(Error::CertificationFailure("operator is singular".to_string()));
        }
        Ok(StrWord {
            structure: s.clone(),
            gens,
            matrix,
            nu,
            certificate,
        })
    }

    pub fn make_word(&self, gens: Vec<Generator>) -> Result<StrWord> {
        let s = self.structure();
        let mut matrix = Matrix::identity(s.dim());
        let mut nu = Q::one();
        for g in &gens {
            matrix = matrix.mul(&g.matrix(s)?);
            nu *= g.multiplier(s)?;
        }
        self.certified(gens, matrix, nu)
    }

    pub fn identity(&self) -> Result<StrWord> {
        self.make_word(Vec::new())
    }

    /// `w1 ∘ w2`.
    pub fn compose(&self, w1: &StrWord, w2: &StrWord) -> Result<StrWord> {
        self.check_word(w1)?;
        self.check_word(w2)?;
        let gens = [w1.gens.clone(), w2.gens.clone()].concat();
        self.certified(gens, w1.matrix.mul(&w2.matrix), &w1.nu * &w2.nu)
    }

    pub fn invert_word(&self, w: &StrWord) -> Result<StrWord> {
        self.check_word(w)?;
        let s = self.structure();
        let gens = w.gens.iter().rev().map(|g| g.inverse(s)).collect::<Result<Vec<_>>>()?;
        let matrix = w.matrix.inverse().map_err(|_| Error::NotInvertible)?;
        self.certified(gens, matrix, w.nu.recip())
    }

    /// `[scalar(N(a)⁻¹), U_a] ∘ w` with `a = w(c)`, certified with `ν = 1`.
    pub fn normalize_to_isometry(&self, w: &StrWord) -> Result<StrWord> {
        self.check_word(w)?;
        let a = w.image_of_identity();
        let na = self.structure().norm(&a)?;
        if na.is_zero() {
            return Err(Error::NotInvertible);
        }
        let prefix = self.make_word(alloc::vec![Generator::Scalar(na.recip()), Generator::UOperator(a)])?;
        let out = self.compose(&prefix, w)?;
        if !out.nu.is_one() {
            return Err(Error::CertificationFailure(format!("normalized multiplier is {}", out.nu)));
        }
        Ok(out)
    }

    /// For `w` with `w|M = R_a`, `a = w(c)`: the automorphism `w² ∘ U_{a⁻¹}`.
    pub fn aut_square_witness(&self, w: &StrWord, m: &SubalgebraHandle) -> Result<StrWord> {
        self.check_word(w)?;
        let s = self.structure();
        let a = w.image_of_identity();
        for b in m.basis() {
            if w.apply(b) != s.jordan_product(b, &a)? {
                return Err(Error::RestrictionNotHomothety);
            }
        }
        let ainv = s.invert(&a)?;
        let u = self.make_word(alloc::vec![Generator::UOperator(ainv)])?;
        let out = self.compose(&self.compose(w, w)?, &u)?;
        if !out.is_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        Ok(out)
    }

    /// `w|L = R_a ∘ γ` for `γ` among `candidates` (labelled carrier operators
    /// restricting to the Galois elements of `L`); identity is always tried.
    pub fn restriction_decompose(
        &self,
        w: &StrWord,
        l: &SubalgebraHandle,
        candidates: &[(String, Matrix)],
    ) -> Result<(Vec<Q>, String)> {
        self.check_word(w)?;
        let s = self.structure();
        for b in l.basis() {
            if !l.contains(&w.apply(b)) {
                return Err(Error::NotInvariant);
            }
        }
        let a = w.image_of_identity();
        let id = ("id".to_string(), Matrix::identity(s.dim()));
        'outer: for (label, g) in core::iter::once(&id).chain(candidates) {
            for b in l.basis() {
                let gb = g.apply(b);
                if !l.contains(&gb) || w.apply(b) != s.jordan_product(&gb, &a)? {
                    continue 'outer;
                }
            }
            return Ok((a, label.clone()));
        }
        Err(Error::NoDecomposition)
    }

    /// `ψ φ ψ⁻¹` certified as an automorphism of the `v⁻¹`-isotope, `v = ψ(c)`:
    /// it fixes `v` and has multiplier `1`.
    pub fn conjugate_aut_group_check(&self, psi: &StrWord, phi: &StrWord) -> Result<bool> {
        if !phi.is_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        let inv = self.invert_word(psi)?;
        let conj = self.compose(&self.compose(psi, phi)?, &inv)?;
        let v = psi.image_of_identity();
        Ok(conj.apply(&v) == v && conj.nu.is_one())
    }
}

/// `ker(w - 1)` for an automorphism `w`, checked to be a subalgebra.
pub fn fixed_subalgebra(w: &StrWord) -> Result<SubalgebraHandle> {
    if !w.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let n = w.structure.dim();
    let kernel = w.matrix.sub(&Matrix::identity(n)).kernel();
    let h = SubalgebraHandle {
        structure: w.structure.clone(),
        space: Subspace::span(n, &kernel),
    };
    if !h.is_closed()? {
        return Err(Error::CertificationFailure("fixed space is not #-closed".to_string()));
    }
    Ok(h)
}

pub fn invariant_check(w: &StrWord, s: &SubalgebraHandle) -> Invariance {
    let images: Vec<Vec<Q>> = s.basis().iter().map(|b| w.apply(b)).collect();
    if images.iter().zip(s.basis()).all(|(i, b)| i == b) {
        Invariance::PointwiseFixed
    } else if images.iter().all(|i| s.contains(i)) {
        Invariance::Invariant
    } else {
        Invariance::Neither
    }
}

/// Smallest unital subspace containing `elements` and closed under `#`
/// and `×`.
pub fn generated_subalgebra(s: &CubicNormStructure, elements: &[Vec<Q>]) -> Result<SubalgebraHandle> {
    let n = s.dim();
    let mut space = Subspace::zero(n);
    let mut gens: Vec<Vec<Q>> = Vec::new();
    let mut queue: Vec<Vec<Q>> = core::iter::once(s.base_point().to_vec()).chain(elements.iter().cloned()).collect();
    while let Some(v) = queue.pop() {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        if !space.insert(&v) {
            continue;
        }
        queue.push(s.adjoint(&v)?);
        for g in &gens {
            queue.push(s.sharp_bilinear(&v, g)?);
        }
        gens.push(v);
    }
    Ok(SubalgebraHandle {
        structure: s.clone(),
        space,
    })
}

/// Subalgebra spanned by given vectors, checked to be unital and `#`-closed.
pub fn subalgebra_from_basis(s: &CubicNormStructure, basis: &[Vec<Q>]) -> Result<SubalgebraHandle> {
    let h = SubalgebraHandle {
        structure: s.clone(),
        space: Subspace::span(s.dim(), basis),
    };
    if !h.is_closed()? {
        return Err(Error::InvalidSpec("span is not a unital #-closed subspace".to_string()));
    }
    Ok(h)
}

/// `1`: the base field; `3`: cubic étale; `9`: `(B, σ)_+`; `27`: Albert.
pub fn classify_subalgebra(h: &SubalgebraHandle) -> Result<Stratum> {
    let dim = h.dim();
    let label = match dim {
        1 => "k",
        3 => "cubic",
        9 => "hermitian",
        27 => "albert",
        d => return Err(Error::UnexpectedDimension(d)),
    };
    let diagnostic = if dim == 3 { cubic_diagnostic(h)? } else { String::new() };
    Ok(Stratum { dim, label, diagnostic })
}

/// Splitting type of a 3-dimensional subalgebra, read off from the generic
/// minimum polynomial `t³ - T(x) t² + S(x) t - N(x)` of an element with
/// nonzero discriminant.
fn cubic_diagnostic(h: &SubalgebraHandle) -> Result<String> {
    let s = &h.structure;
    let mut rng = Sampler::new(0x5ab);
    for _ in 0..20 {
        let coeffs: Vec<Q> = (0..h.dim()).map(|_| q(rng.small_int(-3, 3))).collect();
        let x = h.space.combine(&coeffs);
        let t = s.trace(&x);
        let sx = s.trace(&s.adjoint(&x)?);
        let nx = s.norm(&x)?;
        // p(t) = t³ + a t² + b t + c
        let (a, b, c) = (-t, sx, -nx);
        let disc = &a * &a * &b * &b - q(4) * &b * &b * &b - q(4) * &a * &a * &a * &c - q(27) * &c * &c
            + q(18) * &a * &b * &c;
        if disc.is_zero() {
            continue;
        }
        let roots = match rational_roots(&[c.clone(), b.clone(), a.clone(), Q::one()]) {
            Ok(r) => r,
            Err(_) => return Ok("etale; splitting type undetermined (coefficients too large)".to_string()),
        };
        let kind = match roots.first() {
            None => "field",
            Some(r) => {
                // p(t) = (t - r)(t² + (a + r) t + e) with e = -c / r, or b when r = 0
                let a1 = &a + r;
                let e = &b + r * &a1;
                if is_rational_square(&(&a1 * &a1 - q(4) * e)) {
                    "split"
                } else {
                    "Q x quadratic field"
                }
            }
        };
        return Ok(format!("etale, {kind}"));
    }
    Ok("not etale: every sampled element has a repeated eigenvalue".to_string())
}

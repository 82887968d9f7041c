//! Étale algebras over the rationals given by structure constants: the base
//! field itself, quadratic `K` (split or a field), cubic `L` (split or a
//! cyclic field with a declared generator of its Galois group) and the
//! composite `LK`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det3, Matrix};
use crate::rational::{q, unit_vector, zeros, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaleKind {
    /// The base field `k = Q` itself.
    Rational,
    SplitQuadratic,
    QuadraticField { d: Q },
    SplitCubic,
    /// `Q[θ]/(f)` with `f = θ³ + c2 θ² + c1 θ + c0` given low-to-high, and
    /// the image `ρ(θ) = r0 + r1 θ + r2 θ²` of a Galois generator.
    CyclicCubicField {
        min_poly: [Q; 4],
        generator_image: [Q; 3],
    },
    Composite {
        cubic: Box<EtaleKind>,
        quadratic: Box<EtaleKind>,
    },
}

impl EtaleKind {
    pub fn quadratic_field(d: Q) -> Self {
        EtaleKind::QuadraticField { d }
    }

    pub fn cyclic_cubic(min_poly: [Q; 4], generator_image: [Q; 3]) -> Self {
        EtaleKind::CyclicCubicField {
            min_poly,
            generator_image,
        }
    }

    pub fn composite(cubic: EtaleKind, quadratic: EtaleKind) -> Self {
        EtaleKind::Composite {
            cubic: Box::new(cubic),
            quadratic: Box::new(quadratic),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EtaleKind::Rational => 1,
            EtaleKind::SplitQuadratic | EtaleKind::QuadraticField { .. } => 2,
            EtaleKind::SplitCubic | EtaleKind::CyclicCubicField { .. } => 3,
            EtaleKind::Composite { cubic, quadratic } => cubic.dim() * quadratic.dim(),
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(
            self,
            EtaleKind::SplitQuadratic | EtaleKind::QuadraticField { .. }
        )
    }

    pub fn is_cubic(&self) -> bool {
        matches!(
            self,
            EtaleKind::SplitCubic | EtaleKind::CyclicCubicField { .. }
        )
    }
}

impl fmt::Display for EtaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaleKind::Rational => write!(f, "Q"),
            EtaleKind::SplitQuadratic => write!(f, "QxQ"),
            EtaleKind::QuadraticField { d } => write!(f, "Q(sqrt({d}))"),
            EtaleKind::SplitCubic => write!(f, "QxQxQ"),
            EtaleKind::CyclicCubicField { .. } => write!(f, "cyclic cubic field"),
            EtaleKind::Composite { cubic, quadratic } => write!(f, "({cubic})({quadratic})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaloisMap {
    /// Generator of `Gal(L/k)`, extended `K`-linearly to `LK`.
    Rho,
    /// Nontrivial automorphism of `K`.
    Bar,
    /// Nontrivial automorphism of `K`, extended `L`-linearly to `LK`.
    Star,
}

impl GaloisMap {
    fn name(self) -> &'static str {
        match self {
            GaloisMap::Rho => "rho",
            GaloisMap::Bar => "bar",
            GaloisMap::Star => "star",
        }
    }
}

/// Outcome of validating an [`EtaleKind`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecReport {
    pub label: String,
    pub dim: usize,
    pub checks: Vec<String>,
}

#[derive(Debug)]
pub struct EtaleSpec {
    kind: EtaleKind,
    dim: usize,
    /// `products[i * dim + j]` lists the nonzero coordinates of `e_i e_j`.
    products: Vec<Vec<(usize, Q)>>,
    one: Vec<Q>,
    rho: Option<Matrix>,
    bar: Option<Matrix>,
    /// Norm/trace target: `Q` for everything but composites, `K` for `LK`.
    base: Option<Arc<EtaleSpec>>,
    factors: Option<(Arc<EtaleSpec>, Arc<EtaleSpec>)>,
    labels: Vec<String>,
}

impl PartialEq for EtaleSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for EtaleSpec {}

impl EtaleSpec {
    /// Validates `kind` and precomputes its structure constants.
    pub fn new(kind: EtaleKind) -> Result<Arc<EtaleSpec>> {
        check_spec(&kind)?;
        Ok(Arc::new(Self::build(kind)))
    }

    pub fn rational() -> Arc<EtaleSpec> {
        Arc::new(Self::build(EtaleKind::Rational))
    }

    /// Builds the composite of two already validated specs.
    pub fn composite(cubic: &Arc<EtaleSpec>, quadratic: &Arc<EtaleSpec>) -> Result<Arc<EtaleSpec>> {
        Self::new(EtaleKind::composite(
            cubic.kind.clone(),
            quadratic.kind.clone(),
        ))
    }

    fn build(kind: EtaleKind) -> EtaleSpec {
        let dim = kind.dim();
        match &kind {
            EtaleKind::Rational => EtaleSpec {
                products: vec![vec![(0, Q::one())]],
                one: vec![Q::one()],
                rho: None,
                bar: None,
                base: None,
                factors: None,
                labels: vec!["1".to_string()],
                kind,
                dim,
            },
            EtaleKind::SplitQuadratic | EtaleKind::SplitCubic => {
                let mut products = vec![Vec::new(); dim * dim];
                for i in 0..dim {
                    products[i * dim + i].push((i, Q::one()));
                }
                let shift = Matrix::from_fn_on_basis(dim, |x| {
                    Ok((0..dim).map(|i| x[(i + 1) % dim].clone()).collect())
                })
                .expect("square");
                let (rho, bar) = if dim == 3 { (Some(shift), None) } else { (None, Some(shift)) };
                EtaleSpec {
                    products,
                    one: vec![Q::one(); dim],
                    rho,
                    bar,
                    base: Some(Self::rational()),
                    factors: None,
                    labels: (1..=dim).map(|i| format!("e{i}")).collect(),
                    kind,
                    dim,
                }
            }
            EtaleKind::QuadraticField { d } => {
                let products = vec![
                    vec![(0, Q::one())],
                    vec![(1, Q::one())],
                    vec![(1, Q::one())],
                    vec![(0, d.clone())],
                ];
                let mut bar = Matrix::identity(2);
                bar.set(1, 1, q(-1));
                EtaleSpec {
                    products,
                    one: vec![Q::one(), Q::zero()],
                    rho: None,
                    bar: Some(bar),
                    base: Some(Self::rational()),
                    factors: None,
                    labels: vec!["1".to_string(), format!("sqrt({d})")],
                    kind,
                    dim,
                }
            }
            EtaleKind::CyclicCubicField {
                min_poly,
                generator_image,
            } => {
                let monic = monic(min_poly);
                // Powers θ^0..θ^4 reduced modulo f.
                let mut powers: Vec<[Q; 3]> = Vec::with_capacity(5);
                powers.push([Q::one(), Q::zero(), Q::zero()]);
                for _ in 1..5 {
                    let prev = powers.last().expect("nonempty").clone();
                    powers.push(times_theta(&prev, &monic));
                }
                let mut products = vec![Vec::new(); 9];
                for i in 0..3 {
                    for j in 0..3 {
                        products[i * 3 + j] = powers[i + j]
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(k, c)| (k, c.clone()))
                            .collect();
                    }
                }
                let mut spec = EtaleSpec {
                    products,
                    one: vec![Q::one(), Q::zero(), Q::zero()],
                    rho: None,
                    bar: None,
                    base: Some(Self::rational()),
                    factors: None,
                    labels: vec!["1".to_string(), "t".to_string(), "t^2".to_string()],
                    kind: kind.clone(),
                    dim,
                };
                let r = generator_image.to_vec();
                let r2 = spec.mul(&r, &r);
                spec.rho = Some(Matrix::from_columns(3, &[spec.one.clone(), r, r2]));
                spec
            }
            EtaleKind::Composite { cubic, quadratic } => {
                let c = Arc::new(Self::build((**cubic).clone()));
                let qd = Arc::new(Self::build((**quadratic).clone()));
                let (dc, dq) = (c.dim, qd.dim);
                let mut products = vec![Vec::new(); dim * dim];
                for i in 0..dc {
                    for j in 0..dq {
                        for k in 0..dc {
                            for l in 0..dq {
                                let mut entry = Vec::new();
                                for (a, ca) in &c.products[i * dc + k] {
                                    for (b, cb) in &qd.products[j * dq + l] {
                                        entry.push((a * dq + b, ca * cb));
                                    }
                                }
                                products[(i * dq + j) * dim + (k * dq + l)] = entry;
                            }
                        }
                    }
                }
                let one = tensor(&c.one, &qd.one);
                let rho = c.rho.as_ref().map(|r| kron(r, &Matrix::identity(dq)));
                let bar = qd.bar.as_ref().map(|b| kron(&Matrix::identity(dc), b));
                let labels = c
                    .labels
                    .iter()
                    .flat_map(|a| qd.labels.iter().map(move |b| format!("{a}*{b}")))
                    .collect();
                EtaleSpec {
                    products,
                    one,
                    rho,
                    bar,
                    base: Some(qd.clone()),
                    factors: Some((c, qd)),
                    labels,
                    kind,
                    dim,
                }
            }
        }
    }

    pub fn kind(&self) -> &EtaleKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Spec in which norms and traces take their values.
    pub fn base(self: &Arc<Self>) -> Arc<EtaleSpec> {
        match &self.base {
            Some(b) => b.clone(),
            None => self.clone(),
        }
    }

    pub fn cubic_factor(&self) -> Option<&Arc<EtaleSpec>> {
        self.factors.as_ref().map(|(c, _)| c)
    }

    pub fn quadratic_factor(&self) -> Option<&Arc<EtaleSpec>> {
        self.factors.as_ref().map(|(_, qd)| qd)
    }

    /// Degree over the base: 1 for `Q`, 2 for quadratics, 3 for cubics and `LK/K`.
    pub fn degree(&self) -> usize {
        match &self.kind {
            EtaleKind::Composite { cubic, .. } => cubic.dim(),
            k => k.dim(),
        }
    }

    pub fn one_coords(&self) -> &[Q] {
        &self.one
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim;
        match self.kind {
            EtaleKind::Rational => return vec![&x[0] * &y[0]],
            EtaleKind::SplitQuadratic | EtaleKind::SplitCubic => {
                return x.iter().zip(y).map(|(a, b)| a * b).collect();
            }
            _ => {}
        }
        let mut out = zeros(n);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, c) in &self.products[i * n + j] {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    /// Matrix of left multiplication by `x` over `Q`.
    pub fn regular_matrix(&self, x: &[Q]) -> Matrix {
        let columns: Vec<Vec<Q>> = (0..self.dim)
            .map(|j| self.mul(x, &unit_vector(self.dim, j)))
            .collect();
        Matrix::from_columns(self.dim, &columns)
    }

    fn galois_matrix(&self, map: GaloisMap) -> Result<&Matrix> {
        let m = match (map, &self.kind) {
            (GaloisMap::Rho, _) => self.rho.as_ref(),
            (GaloisMap::Bar, k) if k.is_quadratic() => self.bar.as_ref(),
            (GaloisMap::Star, EtaleKind::Composite { .. }) => self.bar.as_ref(),
            _ => None,
        };
        m.ok_or_else(|| Error::MapUndefinedForSpec {
            map: map.name(),
            spec: self.kind.to_string(),
        })
    }

    pub fn has_map(&self, map: GaloisMap) -> bool {
        self.galois_matrix(map).is_ok()
    }
}

fn monic(f: &[Q; 4]) -> [Q; 4] {
    let lead = f[3].clone();
    [&f[0] / &lead, &f[1] / &lead, &f[2] / &lead, Q::one()]
}

/// Multiplies `a0 + a1 θ + a2 θ²` by θ modulo the monic cubic `f`.
fn times_theta(a: &[Q; 3], f: &[Q; 4]) -> [Q; 3] {
    let top = a[2].clone();
    [
        -(&top * &f[0]),
        &a[0] - &top * &f[1],
        &a[1] - &top * &f[2],
    ]
}

fn tensor(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = Matrix::zero(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out.set(i * br + k, j * bc + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    out
}

pub(crate) fn is_rational_square(d: &Q) -> bool {
    if d.is_negative() {
        return false;
    }
    let prod = d.numer() * d.denom();
    let r = prod.sqrt();
    &r * &r == prod
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n
        .abs()
        .to_u64()
        .filter(|&n| n <= 1_000_000_000_000)
        .ok_or_else(|| {
            Error::InvalidSpec("coefficients too large for the rational-root test".to_string())
        })?;
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigInt::from(i));
            if i * i != n {
                out.push(BigInt::from(n / i));
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Rational roots of a cubic, by the rational-root theorem.
pub(crate) fn rational_roots(f: &[Q; 4]) -> Result<Vec<Q>> {
    let l = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let eval = |x: &Q| {
        let mut acc = Q::zero();
        for c in ints.iter().rev() {
            acc = acc * x + Q::from_integer(c.clone());
        }
        acc
    };
    if ints[0].is_zero() {
        return Ok(vec![Q::zero()]);
    }
    let mut roots = Vec::new();
    for p in divisors(&ints[0])? {
        for d in divisors(&ints[3])? {
            for s in [1, -1] {
                let cand = Q::new(BigInt::from(s) * &p, d.clone());
                if eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    Ok(roots)
}

/// Validates the invariants of an étale spec.
pub fn check_spec(kind: &EtaleKind) -> Result<SpecReport> {
    let mut checks = Vec::new();
    match kind {
        EtaleKind::Rational | EtaleKind::SplitQuadratic | EtaleKind::SplitCubic => {}
        EtaleKind::QuadraticField { d } => {
            if is_rational_square(d) {
                return Err(Error::InvalidSpec(format!("{d} is a square in Q")));
            }
            checks.push(format!("{d} is not a square"));
        }
        EtaleKind::CyclicCubicField {
            min_poly,
            generator_image,
        } => {
            if min_poly[3].is_zero() {
                return Err(Error::InvalidSpec("minimal polynomial has degree < 3".to_string()));
            }
            let roots = rational_roots(min_poly)?;
            if let Some(r) = roots.first() {
                return Err(Error::InvalidSpec(format!(
                    "minimal polynomial is reducible: {r} is a root"
                )));
            }
            checks.push("minimal polynomial has no rational root".to_string());
            let spec = EtaleSpec::build(kind.clone());
            let theta = vec![Q::zero(), Q::one(), Q::zero()];
            let r = generator_image.to_vec();
            // f(r(θ)) must vanish for θ -> r(θ) to define an automorphism.
            let f = monic(min_poly);
            let mut acc = zeros(3);
            for c in f.iter().rev() {
                acc = spec.mul(&acc, &r);
                acc[0] += c;
            }
            if acc.iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidSpec(
                    "generator image is not a root of the minimal polynomial".to_string(),
                ));
            }
            if r == theta {
                return Err(Error::InvalidSpec(
                    "generator image is the identity; rho must have order 3".to_string(),
                ));
            }
            let rho = spec.rho.as_ref().expect("cyclic spec has rho");
            let cubed = rho.pow(3);
            if !cubed.is_identity() {
                return Err(Error::InvalidSpec("rho^3 is not the identity".to_string()));
            }
            checks.push("rho(theta) is a root of f".to_string());
            checks.push("rho^3 = id and rho != id".to_string());
        }
        EtaleKind::Composite { cubic, quadratic } => {
            if !cubic.is_cubic() || !quadratic.is_quadratic() {
                return Err(Error::InvalidSpec(
                    "composite needs a cubic and a quadratic factor".to_string(),
                ));
            }
            check_spec(cubic)?;
            check_spec(quadratic)?;
            checks.push(format!("dimension {} = {} x {}", kind.dim(), cubic.dim(), quadratic.dim()));
        }
    }
    Ok(SpecReport {
        label: kind.to_string(),
        dim: kind.dim(),
        checks,
    })
}

/// Element of an étale algebra, stored as exact coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct EtaleElement {
    spec: Arc<EtaleSpec>,
    coords: Vec<Q>,
}

impl fmt::Debug for EtaleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.spec.kind)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
}

impl EtaleElement {
    pub fn new(spec: &Arc<EtaleSpec>, coords: Vec<Q>) -> Result<Self> {
        if coords.len() != spec.dim {
            return Err(Error::DimensionMismatch {
                expected: spec.dim,
                found: coords.len(),
            });
        }
        Ok(EtaleElement {
            spec: spec.clone(),
            coords,
        })
    }

    pub fn from_ints(spec: &Arc<EtaleSpec>, coords: &[i64]) -> Result<Self> {
        Self::new(spec, coords.iter().map(|&c| q(c)).collect())
    }

    pub fn zero(spec: &Arc<EtaleSpec>) -> Self {
        EtaleElement {
            spec: spec.clone(),
            coords: zeros(spec.dim),
        }
    }

    pub fn one(spec: &Arc<EtaleSpec>) -> Self {
        EtaleElement {
            spec: spec.clone(),
            coords: spec.one.clone(),
        }
    }

    pub fn scalar(spec: &Arc<EtaleSpec>, s: &Q) -> Self {
        EtaleElement {
            spec: spec.clone(),
            coords: spec.one.iter().map(|c| c * s).collect(),
        }
    }

    pub fn spec(&self) -> &Arc<EtaleSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Q> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn same_spec(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        Ok(self.with(crate::rational::add_vec(&self.coords, &other.coords)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        Ok(self.with(self.spec.mul(&self.coords, &other.coords)))
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = self.spec.regular_matrix(&self.coords);
        let x = m.solve(&self.spec.one).map_err(|_| Error::NotInvertible)?;
        Ok(self.with(x))
    }

    /// `x op y`; `y` is ignored for [`ArithOp::Inv`].
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        match op {
            ArithOp::Add => self.checked_add(other),
            ArithOp::Mul => self.checked_mul(other),
            ArithOp::Inv => self.inverse(),
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        self.with(self.coords.iter().map(|c| c * s).collect())
    }

    fn with(&self, coords: Vec<Q>) -> Self {
        EtaleElement {
            spec: self.spec.clone(),
            coords,
        }
    }

    /// Left-regular matrix over the base: `Q` for non-composites, `K` for `LK`.
    fn base_regular(&self) -> Vec<Vec<EtaleElement>> {
        let spec = &self.spec;
        match &spec.factors {
            None => {
                let m = spec.regular_matrix(&self.coords);
                let rat = spec.base();
                (0..spec.dim)
                    .map(|i| {
                        (0..spec.dim)
                            .map(|j| EtaleElement::scalar(&rat, m.get(i, j)))
                            .collect()
                    })
                    .collect()
            }
            Some((c, k)) => {
                let (dc, dk) = (c.dim, k.dim);
                let mut rows = vec![Vec::with_capacity(dc); dc];
                for j in 0..dc {
                    let basis = tensor(&unit_vector(dc, j), &k.one);
                    let col = spec.mul(&self.coords, &basis);
                    for (i, row) in rows.iter_mut().enumerate() {
                        row.push(EtaleElement {
                            spec: k.clone(),
                            coords: col[i * dk..(i + 1) * dk].to_vec(),
                        });
                    }
                }
                rows
            }
        }
    }

    /// Norm over the base (`N_L`, `N_K`, or `N_{LK/K}` with values in `K`).
    pub fn norm(&self) -> EtaleElement {
        let m = self.base_regular();
        match m.len() {
            1 => m[0][0].clone(),
            2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
            3 => {
                let arr = [
                    [m[0][0].clone(), m[0][1].clone(), m[0][2].clone()],
                    [m[1][0].clone(), m[1][1].clone(), m[1][2].clone()],
                    [m[2][0].clone(), m[2][1].clone(), m[2][2].clone()],
                ];
                det3(&arr, |a, b| a * b, |a, b| a + b, |a, b| a - b)
            }
            _ => unreachable!("étale degrees are 1, 2 or 3"),
        }
    }

    /// Trace over the base.
    pub fn trace(&self) -> EtaleElement {
        let m = self.base_regular();
        let mut acc = EtaleElement::zero(&m[0][0].spec);
        for (i, row) in m.iter().enumerate() {
            acc = &acc + &row[i];
        }
        acc
    }

    /// Value as a rational, if the element lies in `Q·1`.
    pub fn as_rational(&self) -> Option<Q> {
        let s = self.spec.one.iter().zip(&self.coords).find(|(o, _)| !o.is_zero());
        let (o, c) = s?;
        let r = c / o;
        (self.spec.one.iter().map(|o| o * &r).collect::<Vec<_>>() == self.coords).then_some(r)
    }

    pub fn apply_galois(&self, map: GaloisMap) -> Result<Self> {
        let m = self.spec.galois_matrix(map)?;
        Ok(self.with(m.apply(&self.coords)))
    }

    /// Embeds an element of the base (`Q`, or `K` for a composite).
    pub fn embed_base(spec: &Arc<EtaleSpec>, b: &EtaleElement) -> Result<Self> {
        match &spec.factors {
            Some((c, k)) => {
                b.same_spec(&EtaleElement::zero(k))?;
                Ok(EtaleElement {
                    spec: spec.clone(),
                    coords: tensor(&c.one, &b.coords),
                })
            }
            None => {
                let r = b.as_rational().ok_or(Error::SpecMismatch)?;
                Ok(EtaleElement::scalar(spec, &r))
            }
        }
    }

    /// Inverse of [`EtaleElement::embed_base`], if the element lies in the base.
    pub fn project_base(&self) -> Option<EtaleElement> {
        match &self.spec.factors {
            Some((c, k)) => {
                let dk = k.dim;
                let pivot = c.one.iter().position(|o| !o.is_zero())?;
                let scale = c.one[pivot].clone();
                let coords: Vec<Q> = self.coords[pivot * dk..(pivot + 1) * dk]
                    .iter()
                    .map(|x| x / &scale)
                    .collect();
                let b = EtaleElement {
                    spec: k.clone(),
                    coords,
                };
                (tensor(&c.one, &b.coords) == self.coords).then_some(b)
            }
            None => self
                .as_rational()
                .map(|r| EtaleElement::scalar(&self.spec.base(), &r)),
        }
    }

    /// Embeds `l ∈ L` into the composite `LK` as `l ⊗ 1`.
    pub fn embed_cubic(spec: &Arc<EtaleSpec>, l: &EtaleElement) -> Result<Self> {
        let (c, k) = spec.factors.as_ref().ok_or(Error::SpecMismatch)?;
        l.same_spec(&EtaleElement::zero(c))?;
        Ok(EtaleElement {
            spec: spec.clone(),
            coords: tensor(&l.coords, &k.one),
        })
    }

    /// Writes an element of `LK` as `Σ l_j ⊗ f_j` over the basis `f_j` of `K`.
    pub fn cubic_components(&self) -> Option<Vec<EtaleElement>> {
        let (c, k) = self.spec.factors.as_ref()?;
        let (dc, dk) = (c.dim, k.dim);
        Some(
            (0..dk)
                .map(|j| EtaleElement {
                    spec: c.clone(),
                    coords: (0..dc).map(|i| self.coords[i * dk + j].clone()).collect(),
                })
                .collect(),
        )
    }

    /// Inverse of [`EtaleElement::cubic_components`].
    pub fn from_cubic_components(spec: &Arc<EtaleSpec>, parts: &[EtaleElement]) -> Result<Self> {
        let (c, k) = spec.factors.as_ref().ok_or(Error::SpecMismatch)?;
        let (dc, dk) = (c.dim, k.dim);
        if parts.len() != dk {
            return Err(Error::DimensionMismatch {
                expected: dk,
                found: parts.len(),
            });
        }
        let mut coords = zeros(dc * dk);
        for (j, p) in parts.iter().enumerate() {
            p.same_spec(&EtaleElement::zero(c))?;
            for i in 0..dc {
                coords[i * dk + j] = p.coords[i].clone();
            }
        }
        Ok(EtaleElement {
            spec: spec.clone(),
            coords,
        })
    }
}

impl Add for &EtaleElement {
    type Output = EtaleElement;
    fn add(self, rhs: Self) -> EtaleElement {
        self.checked_add(rhs).expect("étale spec mismatch")
    }
}

impl Sub for &EtaleElement {
    type Output = EtaleElement;
    fn sub(self, rhs: Self) -> EtaleElement {
        self.same_spec(rhs).expect("étale spec mismatch");
        self.with(crate::rational::sub_vec(&self.coords, &rhs.coords))
    }
}

impl Mul for &EtaleElement {
    type Output = EtaleElement;
    fn mul(self, rhs: Self) -> EtaleElement {
        self.checked_mul(rhs).expect("étale spec mismatch")
    }
}

impl Neg for &EtaleElement {
    type Output = EtaleElement;
    fn neg(self) -> EtaleElement {
        self.with(crate::rational::neg_vec(&self.coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, qvec, Sampler};

    fn split_cubic() -> Arc<EtaleSpec> {
        EtaleSpec::new(EtaleKind::SplitCubic).unwrap()
    }

    fn sqrt2() -> Arc<EtaleSpec> {
        EtaleSpec::new(EtaleKind::quadratic_field(q(2))).unwrap()
    }

    // θ³ - 3θ - 1 has roots θ, 2 - θ², θ² - θ - 2.
    fn cyclic9() -> EtaleKind {
        EtaleKind::cyclic_cubic([q(-1), q(-3), q(0), q(1)], [q(2), q(0), q(-1)])
    }

    fn el(spec: &Arc<EtaleSpec>, c: &[i64]) -> EtaleElement {
        EtaleElement::from_ints(spec, c).unwrap()
    }

    #[test]
    fn split_cubic_arithmetic() {
        let l = split_cubic();
        let x = el(&l, &[1, 2, 3]);
        assert_eq!(&x * &EtaleElement::one(&l), x);
        let inv = x.inverse().unwrap();
        assert_eq!(inv.coords(), &[q(1), frac(1, 2), frac(1, 3)]);
        assert_eq!(x.norm().as_rational(), Some(q(6)));
        assert_eq!(x.trace().as_rational(), Some(q(6)));
        assert_eq!(EtaleElement::one(&l).trace().as_rational(), Some(q(3)));
        assert_eq!(x.apply_galois(GaloisMap::Rho).unwrap(), el(&l, &[2, 3, 1]));
        assert_eq!(el(&l, &[1, 0, 2]).inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn quadratic_field_arithmetic() {
        let k = sqrt2();
        let a = el(&k, &[3, 2]);
        let b = el(&k, &[3, -2]);
        assert_eq!(&a * &b, EtaleElement::one(&k));
        assert_eq!(a.norm().as_rational(), Some(q(1)));
        assert_eq!(a.trace().as_rational(), Some(q(6)));
        assert_eq!(a.apply_galois(GaloisMap::Bar).unwrap(), b);
        assert!(matches!(
            a.apply_galois(GaloisMap::Rho),
            Err(Error::MapUndefinedForSpec { .. })
        ));
    }

    #[test]
    fn spec_mismatch_is_reported() {
        let a = el(&split_cubic(), &[1, 1, 1]);
        let b = el(&sqrt2(), &[1, 0]);
        assert_eq!(a.checked_mul(&b), Err(Error::SpecMismatch));
        assert_eq!(a.arith(&b, ArithOp::Add), Err(Error::SpecMismatch));
    }

    #[test]
    fn cyclic_cubic_validation() {
        let report = check_spec(&cyclic9()).unwrap();
        assert_eq!(report.dim, 3);
        let reducible = EtaleKind::cyclic_cubic([q(-1), q(0), q(0), q(1)], [q(0), q(0), q(1)]);
        assert!(matches!(check_spec(&reducible), Err(Error::InvalidSpec(m)) if m.contains("reducible")));
        let identity = EtaleKind::cyclic_cubic([q(-1), q(-3), q(0), q(1)], [q(0), q(1), q(0)]);
        assert!(matches!(check_spec(&identity), Err(Error::InvalidSpec(m)) if m.contains("identity")));
        let broken = EtaleKind::cyclic_cubic([q(-1), q(-3), q(0), q(1)], [q(-2), q(0), q(1)]);
        assert!(matches!(check_spec(&broken), Err(Error::InvalidSpec(m)) if m.contains("not a root")));
        let plus = EtaleKind::cyclic_cubic([q(1), q(-3), q(0), q(1)], [q(-2), q(0), q(1)]);
        assert!(check_spec(&plus).is_ok());
        let other = EtaleKind::cyclic_cubic([q(-1), q(-3), q(0), q(1)], [q(-2), q(-1), q(1)]);
        assert!(check_spec(&other).is_ok());
        assert!(check_spec(&EtaleKind::quadratic_field(frac(9, 4))).is_err());
        assert!(check_spec(&EtaleKind::quadratic_field(q(-1))).is_ok());
    }

    #[test]
    fn rho_cubed_on_cyclic_generator() {
        let l = EtaleSpec::new(cyclic9()).unwrap();
        let theta = el(&l, &[0, 1, 0]);
        let r1 = theta.apply_galois(GaloisMap::Rho).unwrap();
        assert_eq!(r1, el(&l, &[2, 0, -1]));
        let r3 = r1
            .apply_galois(GaloisMap::Rho)
            .unwrap()
            .apply_galois(GaloisMap::Rho)
            .unwrap();
        assert_eq!(r3, theta);
        // θ is a root of θ³ - 3θ - 1, so N(θ) = 1 and T(θ) = 0.
        assert_eq!(theta.norm().as_rational(), Some(q(1)));
        assert_eq!(theta.trace().as_rational(), Some(q(0)));
    }

    #[test]
    fn composite_star_fixes_cubic_part() {
        let l = split_cubic();
        let lk = EtaleSpec::composite(&l, &sqrt2()).unwrap();
        assert_eq!(lk.dim(), 6);
        let x = EtaleElement::embed_cubic(&lk, &el(&l, &[1, 2, 3])).unwrap();
        assert_eq!(x.apply_galois(GaloisMap::Star).unwrap(), x);
        let n = x.norm();
        assert_eq!(n.spec().kind(), &EtaleKind::quadratic_field(q(2)));
        assert_eq!(n.as_rational(), Some(q(6)));
        let k = EtaleElement::embed_base(&lk, &el(&sqrt2(), &[0, 1])).unwrap();
        assert_eq!(k.project_base().unwrap(), el(&sqrt2(), &[0, 1]));
        assert_eq!(k.norm(), el(&sqrt2(), &[0, 2]));
    }

    fn all_specs() -> Vec<Arc<EtaleSpec>> {
        let l = split_cubic();
        let c = EtaleSpec::new(cyclic9()).unwrap();
        let ks = EtaleSpec::new(EtaleKind::SplitQuadratic).unwrap();
        vec![
            l.clone(),
            c.clone(),
            sqrt2(),
            ks.clone(),
            EtaleSpec::composite(&l, &sqrt2()).unwrap(),
            EtaleSpec::composite(&c, &sqrt2()).unwrap(),
            EtaleSpec::composite(&c, &ks).unwrap(),
        ]
    }

    #[test]
    fn norm_is_multiplicative_and_trace_additive() {
        for (s, spec) in all_specs().iter().enumerate() {
            let mut rng = Sampler::new(100 + s as u64);
            for _ in 0..100 {
                let x = EtaleElement::new(spec, rng.vector(spec.dim())).unwrap();
                let y = EtaleElement::new(spec, rng.vector(spec.dim())).unwrap();
                assert_eq!((&x * &y).norm(), &x.norm() * &y.norm());
                assert_eq!((&x + &y).trace(), &x.trace() + &y.trace());
            }
        }
    }

    #[test]
    fn galois_orders_and_commutation() {
        for (s, spec) in all_specs().iter().enumerate() {
            let mut rng = Sampler::new(200 + s as u64);
            for _ in 0..100 {
                let x = EtaleElement::new(spec, rng.vector(spec.dim())).unwrap();
                if spec.has_map(GaloisMap::Rho) {
                    let r = |v: &EtaleElement| v.apply_galois(GaloisMap::Rho).unwrap();
                    assert_eq!(r(&r(&r(&x))), x);
                    assert_eq!(r(&x).norm(), x.norm());
                }
                if spec.has_map(GaloisMap::Bar) {
                    let b = |v: &EtaleElement| v.apply_galois(GaloisMap::Bar).unwrap();
                    assert_eq!(b(&b(&x)), x);
                }
                if spec.has_map(GaloisMap::Star) {
                    let st = |v: &EtaleElement| v.apply_galois(GaloisMap::Star).unwrap();
                    let r = |v: &EtaleElement| v.apply_galois(GaloisMap::Rho).unwrap();
                    assert_eq!(st(&st(&x)), x);
                    assert_eq!(r(&st(&x)), st(&r(&x)));
                    let conj = x.norm().apply_galois(GaloisMap::Bar).unwrap();
                    assert_eq!(st(&x).norm(), conj);
                }
            }
        }
    }

    #[test]
    fn split_model_matches_componentwise_oracle() {
        let l = split_cubic();
        let mut rng = Sampler::new(5);
        for _ in 0..100 {
            let a = rng.vector(3);
            let b = rng.vector(3);
            let x = EtaleElement::new(&l, a.clone()).unwrap();
            let y = EtaleElement::new(&l, b.clone()).unwrap();
            let prod: Vec<Q> = a.iter().zip(&b).map(|(u, v)| u * v).collect();
            assert_eq!((&x * &y).coords(), &prod[..]);
            assert_eq!(x.norm().as_rational(), Some(&a[0] * &a[1] * &a[2]));
            assert_eq!(x.trace().as_rational(), Some(&a[0] + &a[1] + &a[2]));
            if a.iter().all(|c| !c.is_zero()) {
                let inv: Vec<Q> = a.iter().map(|c| c.recip()).collect();
                assert_eq!(x.inverse().unwrap().coords(), &inv[..]);
            }
        }
        let _ = qvec(&[0]);
    }
}

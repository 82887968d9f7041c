use std::sync::LazyLock;

use albert_core::assoc::{AssocAlgebra, AssocElement, BaseInvolution};
use albert_core::catalog::*;
use albert_core::conformal::{ConformalWord, Letter};
use albert_core::cubic::{cubic_form_equal, symbolic_form_equal, CubicNormStructure, SequentialSweep};
use albert_core::etale::{EtaleElement, GaloisMap};
use albert_core::linalg::Matrix;
use albert_core::rational::{add_vec, frac, scale_vec, Q};
use albert_core::tits::isotope;
use num_traits::{One, Zero};
use proptest::prelude::*;

static SPLIT: LazyLock<CubicNormStructure> = LazyLock::new(|| split_cubic().unwrap());
static SYM3: LazyLock<CubicNormStructure> = LazyLock::new(|| mat3_hermitian().unwrap());
static NINE: LazyLock<CubicNormStructure> = LazyLock::new(|| nine_dim(&mu_unit()).unwrap().structure().clone());

fn rat() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=3).prop_map(|(n, d)| frac(n, d))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rat(), n)
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn shipped(i: usize) -> &'static CubicNormStructure {
    match i {
        0 => &SPLIT,
        1 => &SYM3,
        _ => &NINE,
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn sharp_sharp_is_norm_times_x(which in 0usize..3, seed in vector(9)) {
        let s = shipped(which);
        let x = &seed[..s.dim()];
        let xss = s.adjoint(&s.adjoint(x).unwrap()).unwrap();
        prop_assert_eq!(xss, scale_vec(&s.norm(x).unwrap(), x));
    }

    #[test]
    fn norm_of_adjoint_is_norm_squared(which in 0usize..3, seed in vector(9)) {
        let s = shipped(which);
        let x = &seed[..s.dim()];
        let n = s.norm(x).unwrap();
        prop_assert_eq!(s.norm(&s.adjoint(x).unwrap()).unwrap(), &n * &n);
    }

    #[test]
    fn u_operator_multiplies_norm(which in 0usize..3, a in vector(9), b in vector(9)) {
        let s = shipped(which);
        let (x, y) = (&a[..s.dim()], &b[..s.dim()]);
        let nx = s.norm(x).unwrap();
        let lhs = s.norm(&s.u_operator(x, y).unwrap()).unwrap();
        prop_assert_eq!(lhs, &nx * &nx * s.norm(y).unwrap());
    }

    #[test]
    fn norm_is_cubic(which in 0usize..3, seed in vector(9), t in rat()) {
        let s = shipped(which);
        let x = &seed[..s.dim()];
        prop_assert_eq!(s.norm(&scale_vec(&t, x)).unwrap(), &t * &t * &t * s.norm(x).unwrap());
    }

    #[test]
    fn trace_of_base_point_is_three(which in 0usize..3) {
        let s = shipped(which);
        prop_assert_eq!(s.trace(s.base_point()), frac(3, 1));
        prop_assert_eq!(s.norm(s.base_point()).unwrap(), Q::one());
    }

    #[test]
    fn inverse_is_inverse(which in 0usize..3, seed in vector(9)) {
        let s = shipped(which);
        let x = &seed[..s.dim()];
        prop_assume!(!s.norm(x).unwrap().is_zero());
        let inv = s.invert(x).unwrap();
        prop_assert_eq!(s.u_operator(x, &inv).unwrap(), x.to_vec());
        prop_assert_eq!(s.invert(&inv).unwrap(), x.to_vec());
    }

    /// `U_x` is a norm similarity with multiplier `N(x)²`, as a polynomial
    /// identity in the argument.
    #[test]
    fn u_matrix_certifies(which in 0usize..3, seed in vector(9)) {
        let s = shipped(which);
        let x = &seed[..s.dim()];
        let nx = s.norm(x).unwrap();
        let u = s.u_matrix(x).unwrap();
        let cert = cubic_form_equal(&u, s, s, &(&nx * &nx), &SequentialSweep).unwrap();
        prop_assert!(cert.holds);
        prop_assert_eq!(cert.evaluations, s.dim() * (s.dim() + 1) * (s.dim() + 2) / 6);
    }

    /// Genuine similarities, optionally with a corrupted multiplier or a
    /// perturbed entry, judged the same way by both oracles.
    #[test]
    fn polarization_agrees_with_symbolic(which in 0usize..2, x in vector(6), t in rat(), corrupt in 0usize..3, entry in rat()) {
        let s = shipped(which);
        let n = s.dim();
        let x = &x[..n];
        let nx = s.norm(x).unwrap();
        let mut f = s.u_matrix(x).unwrap().scale(&t);
        let mut nu = &nx * &nx * &t * &t * &t;
        match corrupt {
            1 => nu += Q::one(),
            2 => {
                let mut rows: Vec<Vec<Q>> = (0..n).map(|r| f.row(r).to_vec()).collect();
                rows[0][n - 1] += &entry;
                f = Matrix::from_rows(rows);
            }
            _ => {}
        }
        let by_points = cubic_form_equal(&f, s, s, &nu, &SequentialSweep).unwrap().holds;
        let by_terms = symbolic_form_equal(&f, s, s, &nu).unwrap();
        prop_assert_eq!(by_points, by_terms);
        if corrupt == 0 {
            prop_assert!(by_points);
        }
    }

    #[test]
    fn isotope_norm_scales(which in 0usize..3, v in vector(9), x in vector(9)) {
        let s = shipped(which);
        let n = s.dim();
        let nv = s.norm(&v[..n]).unwrap();
        prop_assume!(!nv.is_zero());
        let iso = isotope(s, &v[..n]).unwrap();
        prop_assert_eq!(iso.norm(&x[..n]).unwrap(), &nv * &s.norm(&x[..n]).unwrap());
        prop_assert_eq!(iso.base_point().to_vec(), s.invert(&v[..n]).unwrap());
    }

    #[test]
    fn inversion_is_an_involution(which in 0usize..3, seed in vector(9)) {
        let s = shipped(which);
        let x = &seed[..s.dim()];
        let jj = ConformalWord::new(s, vec![Letter::InvertJ, Letter::InvertJ]).unwrap();
        match s.norm(x).unwrap().is_zero() {
            true => prop_assert!(jj.eval(x).is_err()),
            false => prop_assert_eq!(jj.eval(x).unwrap(), x.to_vec()),
        }
    }

    #[test]
    fn translations_compose(which in 0usize..3, a in vector(9), b in vector(9), x in vector(9)) {
        let s = shipped(which);
        let n = s.dim();
        let (a, b, x) = (&a[..n], &b[..n], &x[..n]);
        let tt = ConformalWord::new(s, vec![Letter::Translate(a.to_vec()), Letter::Translate(b.to_vec())]).unwrap();
        let t = ConformalWord::new(s, vec![Letter::Translate(add_vec(a, b))]).unwrap();
        prop_assert_eq!(tt.eval(x).unwrap(), t.eval(x).unwrap());
    }

    #[test]
    fn reduced_norm_is_multiplicative(a in vector(18), b in vector(18)) {
        let alg = AssocAlgebra::mat3(&sqrt2(), BaseInvolution::ConjTranspose).unwrap();
        let x = AssocElement::new(&alg, a).unwrap();
        let y = AssocElement::new(&alg, b).unwrap();
        let lhs = x.mul(&y).unwrap().reduced_norm();
        prop_assert_eq!(lhs, &x.reduced_norm() * &y.reduced_norm());
        prop_assert_eq!(x.mul(&x.sharp()).unwrap(), AssocElement::from_center(&alg, &x.reduced_norm()).unwrap());
    }

    #[test]
    fn involution_reverses_products(a in vector(18), b in vector(18)) {
        let alg = AssocAlgebra::mat3(&sqrt2(), BaseInvolution::ConjTranspose).unwrap();
        let x = AssocElement::new(&alg, a).unwrap();
        let y = AssocElement::new(&alg, b).unwrap();
        let lhs = x.mul(&y).unwrap().involve().unwrap();
        prop_assert_eq!(lhs, y.involve().unwrap().mul(&x.involve().unwrap()).unwrap());
    }

    #[test]
    fn cyclic_field_norm_is_multiplicative_and_galois_stable(a in vector(3), b in vector(3)) {
        let l = cyclic_field();
        let x = EtaleElement::new(&l, a).unwrap();
        let y = EtaleElement::new(&l, b).unwrap();
        prop_assert_eq!((&x * &y).norm(), &x.norm() * &y.norm());
        let rx = x.apply_galois(GaloisMap::Rho).unwrap();
        prop_assert_eq!(rx.norm(), x.norm());
        let r3 = rx.apply_galois(GaloisMap::Rho).unwrap().apply_galois(GaloisMap::Rho).unwrap();
        prop_assert_eq!(r3, x);
    }

    #[test]
    fn crossed_product_norm_is_multiplicative(a in vector(9), b in vector(9)) {
        let d = crossed_division(&frac(2, 1)).unwrap();
        let x = AssocElement::new(&d, a).unwrap();
        let y = AssocElement::new(&d, b).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().reduced_norm(), &x.reduced_norm() * &y.reduced_norm());
    }
}

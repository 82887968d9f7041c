//! Rational scalars and seeded sampling of rational test points.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact scalar of the base field.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&n| q(n)).collect()
}

pub fn zeros(n: usize) -> Vec<Q> {
    (0..n).map(|_| Q::zero()).collect()
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Q> {
    let mut v = zeros(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(s: &Q, a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| s * x).collect()
}

/// `[a, b/c, ...]` for diagnostics.
pub fn show(v: &[Q]) -> alloc::string::String {
    let parts: Vec<alloc::string::String> = v.iter().map(|x| alloc::format!("{x}")).collect();
    alloc::format!("[{}]", parts.join(", "))
}

pub fn neg_vec(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

/// Deterministic source of random rational points.
///
/// Coordinates are drawn uniformly from `{-9, ..., 9}` with a denominator
/// drawn from `{1, 2, 3}`.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for the `index`-th sub-task of a run.
    pub fn split(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index.wrapping_add(1));
        Sampler { rng }
    }

    pub fn coordinate(&mut self) -> Q {
        let num: i64 = self.rng.gen_range(-9..=9);
        let den: i64 = self.rng.gen_range(1..=3);
        frac(num, den)
    }

    pub fn nonzero_coordinate(&mut self) -> Q {
        loop {
            let c = self.coordinate();
            if !c.is_zero() {
                return c;
            }
        }
    }

    pub fn vector(&mut self, n: usize) -> Vec<Q> {
        (0..n).map(|_| self.coordinate()).collect()
    }

    pub fn nonzero_vector(&mut self, n: usize) -> Vec<Q> {
        loop {
            let v = self.vector(n);
            if !is_zero_vec(&v) {
                return v;
            }
        }
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    pub fn small_int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let a = Sampler::new(7).vector(20);
        let b = Sampler::new(7).vector(20);
        assert_eq!(a, b);
        let c = Sampler::split(7, 3).vector(20);
        assert_ne!(a, c);
    }

    #[test]
    fn coordinates_stay_in_range() {
        let mut s = Sampler::new(1);
        for _ in 0..500 {
            let c = s.coordinate();
            assert!(c.numer().magnitude() <= &num_bigint::BigUint::from(9u8));
            assert!(*c.denom() <= BigInt::from(3));
        }
    }
}

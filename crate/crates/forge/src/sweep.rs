use albert_core::cubic::Sweep;
use albert_core::{Result, Q};
use rayon::prelude::*;

/// Fans the evaluation set out over the rayon pool. Results are the same
/// as the sequential sweep: the reported failure is always the smallest
/// failing index.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonSweep;

impl Sweep for RayonSweep {
    fn first_failure(&self, count: usize, check: &(dyn Fn(usize) -> Result<bool> + Sync)) -> Result<Option<usize>> {
        let hit = (0..count).into_par_iter().find_first(|&i| !matches!(check(i), Ok(true)));
        match hit {
            None => Ok(None),
            Some(i) => check(i).map(|_| Some(i)),
        }
    }

    fn values(&self, count: usize, eval: &(dyn Fn(usize) -> Result<Q> + Sync)) -> Result<Vec<Q>> {
        (0..count).into_par_iter().map(eval).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use albert_core::cubic::SequentialSweep;
    use albert_core::Error;

    #[test]
    fn agrees_with_sequential() {
        let check = |i: usize| -> Result<bool> {
            match i {
                700 => Err(Error::Singular),
                _ => Ok(i % 97 != 13 || i < 300),
            }
        };
        assert_eq!(RayonSweep.first_failure(1000, &check), SequentialSweep.first_failure(1000, &check));
        assert_eq!(RayonSweep.first_failure(300, &check).unwrap(), None);
        let err = |i: usize| -> Result<bool> { if i == 5 { Err(Error::Singular) } else { Ok(i != 9) } };
        assert_eq!(RayonSweep.first_failure(20, &err), Err(Error::Singular));
    }
}

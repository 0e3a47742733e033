//! Independent (Wigner) schemes.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Law of the independent upper-triangle entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerDist {
    /// Uniform on `{-1, +1}`.
    Rademacher,
    StandardNormal,
}

impl fmt::Display for WignerDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WignerDist::Rademacher => "rademacher",
            WignerDist::StandardNormal => "standard-normal",
        })
    }
}

impl std::str::FromStr for WignerDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "rademacher" => Ok(WignerDist::Rademacher),
            "standard-normal" | "normal" | "gaussian" => Ok(WignerDist::StandardNormal),
            other => Err(Error::InvalidParameter(format!("unknown Wigner distribution '{other}'"))),
        }
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn sample_entries<R: Rng + ?Sized>(dist: WignerDist, n: usize, rng: &mut R) -> SquareMatrix {
    match dist {
        WignerDist::Rademacher => super::symmetric_from_upper(n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 }),
        WignerDist::StandardNormal => super::symmetric_from_upper(n, |_, _| rng.sample(StandardNormal)),
    }
}

pub fn wigner_scheme<R: Rng + ?Sized>(dist: WignerDist, n: usize, rng: &mut R) -> Result<SquareMatrix> {
    check_dim(n)?;
    Ok(sample_entries(dist, n, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::mean_and_stderr;
    use crate::rng::rng_from_seed;

    #[test]
    fn rademacher_entries_are_signs() {
        let mut rng = rng_from_seed(1);
        let a = wigner_scheme(WignerDist::Rademacher, 30, &mut rng).unwrap();
        assert!(a.as_slice().iter().all(|&v| v == 1.0 || v == -1.0));
        assert!(a.is_symmetric(0.0));
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = rng_from_seed(1);
        assert!(wigner_scheme(WignerDist::Rademacher, 0, &mut rng).is_err());
    }

    #[test]
    fn normal_second_moment_and_independence() {
        let mut rng = rng_from_seed(2);
        let mut sq = Vec::with_capacity(10_000);
        let mut cross = Vec::with_capacity(10_000);
        for _ in 0..10_000 {
            let a = wigner_scheme(WignerDist::StandardNormal, 100, &mut rng).unwrap();
            sq.push(a[(0, 1)] * a[(0, 1)]);
            cross.push(a[(0, 1)] * a[(2, 3)]);
        }
        let (m, se) = mean_and_stderr(&sq);
        assert!((m - 1.0).abs() < 4.0 * se, "{m} (se {se})");
        let (m, se) = mean_and_stderr(&cross);
        assert!(m.abs() < 4.0 * se, "{m} (se {se})");
    }

    #[test]
    fn parses_names() {
        assert_eq!("standard_normal".parse::<WignerDist>().unwrap(), WignerDist::StandardNormal);
        assert_eq!("rademacher".parse::<WignerDist>().unwrap(), WignerDist::Rademacher);
        assert!("cauchy".parse::<WignerDist>().is_err());
    }
}

//! Bessel oracles: J₀, J₁ and the positive zeros of J₀.
//!
//! The first Dirichlet eigenpair of the disk is λ₁ = j₀,₁², φ₁ ∝ J₀(j₀,₁ r),
//! so these closed forms validate the discrete eigen module and seed
//! reference forcing profiles. Evaluation is delegated to libm's f64
//! implementations (absolute error well under 1e-12 on [0, 50]); zeros are
//! found by bracketing bisection, which is unconditionally convergent.

use crate::error::{Error, Result};

/// 1-based index of a positive zero of J₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselZeroIndex(u32);

impl BesselZeroIndex {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            Err(Error::Domain("Bessel zero index must be >= 1"))
        } else {
            Ok(Self(k))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// J₀(x), absolute error ≤ 1e-12 on [0, 50].
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("bessel_j0 requires finite input"));
    }
    Ok(libm::j0(x))
}

/// J₁(x), absolute error ≤ 1e-12 on [0, 50].
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("bessel_j1 requires finite input"));
    }
    Ok(libm::j1(x))
}

/// The k-th positive zero of J₀, to absolute error ≤ 1e-12.
///
/// Brackets are seeded from McMahon's expansion (zeros are ~π apart, the
/// estimate is good to 1e-3 already at k = 1) and refined by bisection to a
/// width of 1e-13.
pub fn j0_zero(k: BesselZeroIndex) -> f64 {
    let beta = (f64::from(k.get()) - 0.25) * core::f64::consts::PI;
    let guess = beta + 1.0 / (8.0 * beta) - 124.0 / (3.0 * libm::pow(8.0 * beta, 3.0));

    let mut lo = guess - 0.5;
    let mut hi = guess + 0.5;
    debug_assert!(libm::j0(lo) * libm::j0(hi) < 0.0);

    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if libm::j0(lo) * libm::j0(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// λ₁ of the unit disk in closed form, j₀,₁².
pub fn lambda1_reference() -> f64 {
    let j = j0_zero(BesselZeroIndex::new(1).expect("1 >= 1"));
    j * j
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Independent oracle: the alternating power series with its remainder
    // bound. Terms decrease once m > x/2, so the truncation error is below
    // the first omitted term.
    fn j0_series(x: f64) -> f64 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            term *= q / ((m * m) as f64);
            sum += term;
            if term.abs() < 1e-18 && m as f64 > 0.5 * x {
                break;
            }
        }
        sum
    }

    fn j1_series(x: f64) -> f64 {
        let q = -0.25 * x * x;
        let mut term = 0.5 * x;
        let mut sum = term;
        for m in 1..200 {
            term *= q / ((m * (m + 1)) as f64);
            sum += term;
            if term.abs() < 1e-18 && m as f64 > 0.5 * x {
                break;
            }
        }
        sum
    }

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn j1_at_zero_is_zero() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn j0_at_one_matches_series_oracle() {
        let frozen = 0.7651976865579666;
        assert!((j0_series(1.0) - frozen).abs() < 1e-15);
        assert!((bessel_j0(1.0).unwrap() - frozen).abs() < 1e-13);
    }

    #[test]
    fn j1_at_one_matches_series_oracle() {
        let frozen = 0.4400505857449335;
        assert!((j1_series(1.0) - frozen).abs() < 1e-15);
        assert!((bessel_j1(1.0).unwrap() - frozen).abs() < 1e-13);
    }

    #[test]
    fn j0_vanishes_at_first_zero() {
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-12);
    }

    #[test]
    fn j1_at_first_j0_zero() {
        let frozen = 0.5191474972894669;
        assert!((j1_series(2.404825557695773) - frozen).abs() < 1e-14);
        assert!((bessel_j1(2.404825557695773).unwrap() - frozen).abs() < 1e-13);
    }

    #[test]
    fn non_finite_inputs_are_domain_errors() {
        assert!(matches!(bessel_j0(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(bessel_j0(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(bessel_j1(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_index_rejects_zero() {
        assert!(matches!(BesselZeroIndex::new(0), Err(Error::Domain(_))));
        assert_eq!(BesselZeroIndex::new(3).unwrap().get(), 3);
    }

    #[test]
    fn first_three_zeros_match_bisection_oracle() {
        // Frozen from bisection of the series oracle on [2,3], [5,6], [8,9].
        let expected = [2.404825557695773, 5.520078110286311, 8.653727912911013];
        for (k, want) in expected.iter().enumerate() {
            let z = j0_zero(BesselZeroIndex::new(k as u32 + 1).unwrap());
            assert!(
                (z - want).abs() < 1e-12,
                "zero {}: got {z}, want {want}",
                k + 1
            );
        }
    }

    #[test]
    fn zeros_interlace_and_annihilate_j0() {
        let mut prev = 0.0;
        for k in 1..=10 {
            let z = j0_zero(BesselZeroIndex::new(k).unwrap());
            assert!(z > prev, "zeros must increase: z_{k} = {z} <= {prev}");
            assert!(bessel_j0(z).unwrap().abs() < 1e-11);
            prev = z;
        }
    }

    #[test]
    fn derivative_identity_j0_prime_is_minus_j1() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let delta = 1e-6;
        for _ in 0..100 {
            let x: f64 = rng.random_range(delta..20.0);
            let fd =
                (bessel_j0(x + delta).unwrap() - bessel_j0(x - delta).unwrap()) / (2.0 * delta);
            let j1 = bessel_j1(x).unwrap();
            assert!((fd + j1).abs() < 1e-8, "J0'({x}) = {fd} vs -J1 = {}", -j1);
        }
    }

    #[test]
    fn lambda1_reference_squares_first_zero() {
        assert!((lambda1_reference() - 5.783185962946785).abs() < 1e-12);
    }
}

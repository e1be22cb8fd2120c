//! Parameter selection: the prime base `t`, the shift `sigma` and base-`t`
//! digit vectors.

use crate::error::{Error, Result};

/// Trial division up to `sqrt(x)`.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x < 4 {
        return true;
    }
    if x.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `ceil(n^(1/h))`, computed exactly: the smallest `r` with `r^h >= n`.
pub fn ceil_root(n: u64, h: usize) -> u64 {
    if n <= 1 {
        return n;
    }
    let reaches = |r: u64| match r.checked_pow(h as u32) {
        Some(p) => p >= n,
        None => true,
    };
    let mut r = ((n as f64).powf(1.0 / h as f64).ceil() as u64).max(1);
    while r > 1 && reaches(r - 1) {
        r -= 1;
    }
    while !reaches(r) {
        r += 1;
    }
    r
}

/// Base-`t` digits of a value, most significant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaryDigits(pub Vec<u64>);

impl TaryDigits {
    /// Digit of weight `t^r`.
    pub fn digit(&self, r: usize) -> u64 {
        self.0[self.0.len() - 1 - r]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, t: u64) -> u64 {
        self.0.iter().fold(0, |acc, &s| acc * t + s)
    }
}

/// The `h`-digit base-`t` representation of `j`. Fails if `j >= t^h`.
pub fn tary_digits(j: u64, t: u64, h: usize) -> Result<TaryDigits> {
    let mut digits = vec![0; h];
    let mut rest = j;
    for slot in digits.iter_mut().rev() {
        *slot = rest % t;
        rest /= t;
    }
    if rest != 0 {
        return Err(Error::DigitOverflow {
            value: j,
            base: t,
            digits: h,
        });
    }
    Ok(TaryDigits(digits))
}

/// The tuple `(n, h, t, sigma)` fixing the pseudo-distance construction,
/// plus the base-`t` digits of `n - sigma - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    pub h: usize,
    pub t: u64,
    pub sigma: usize,
    pub sprime: TaryDigits,
}

impl Params {
    /// `n - sigma`, the modulus the construction works in.
    pub fn modulus(&self) -> usize {
        self.n - self.sigma
    }

    /// Upper bound on distinct queries: `(n - sigma)(t + 1)`.
    pub fn query_bound(&self) -> u64 {
        self.modulus() as u64 * (self.t + 1)
    }

    /// `1 + sum_{r < m} s'_r t^r`, the number of capped digit tuples whose
    /// digit `m` equals `s'_m`.
    pub fn capped_prefix(&self, m: usize) -> u64 {
        1 + (0..m)
            .rev()
            .fold(0, |acc, r| acc * self.t + self.sprime.digit(r))
    }
}

/// Picks the smallest prime `t` in `[ceil(n^(1/h)), 2 ceil(n^(1/h))]` and
/// `sigma = 0` when `gcd(t, n) = 1`, else `sigma = 1`.
pub fn choose_params(n: usize, h: usize) -> Result<Params> {
    if h < 2 {
        return Err(Error::DepthTooSmall(h));
    }
    if n < 2 {
        return Err(Error::InvalidInstance(format!(
            "parameter selection needs n >= 2, got {n}"
        )));
    }
    if n as u64 > u32::MAX as u64 {
        return Err(Error::TooManyPoints(n));
    }
    let low = ceil_root(n as u64, h);
    let t = (low..=2 * low)
        .find(|&c| is_prime(c))
        .expect("Bertrand's postulate guarantees a prime in [k, 2k]");
    let sigma = if gcd(t, n as u64) == 1 { 0 } else { 1 };
    let sprime = tary_digits((n - sigma - 1) as u64, t, h)?;
    Ok(Params {
        n,
        h,
        t,
        sigma,
        sprime,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..40).filter(|&x| is_prime(x)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn roots() {
        assert_eq!(ceil_root(100, 2), 10);
        assert_eq!(ceil_root(101, 2), 11);
        assert_eq!(ceil_root(2, 2), 2);
        assert_eq!(ceil_root(1024, 5), 4);
        assert_eq!(ceil_root(1025, 5), 5);
        assert_eq!(ceil_root(1000, 3), 10);
        assert_eq!(ceil_root(5, 100), 2);
    }

    #[test]
    fn params_examples() {
        let p = choose_params(100, 2).unwrap();
        assert_eq!((p.t, p.sigma), (11, 0));
        assert_eq!(p.sprime, TaryDigits(vec![9, 0]));

        let p = choose_params(121, 2).unwrap();
        assert_eq!((p.t, p.sigma), (11, 1));
        assert_eq!(p.sprime, TaryDigits(vec![10, 9]));

        let p = choose_params(2, 2).unwrap();
        assert_eq!((p.t, p.sigma), (2, 1));
        assert_eq!(p.sprime, TaryDigits(vec![0, 0]));

        let p = choose_params(1024, 5).unwrap();
        assert_eq!((p.t, p.sigma), (5, 0));
    }

    #[test]
    fn params_errors() {
        assert!(matches!(choose_params(10, 1), Err(Error::DepthTooSmall(1))));
        assert!(choose_params(1, 2).is_err());
    }

    #[test]
    fn huge_depth_is_accepted() {
        let p = choose_params(50, 80).unwrap();
        assert_eq!(p.t, 2);
        assert_eq!(p.sprime.value(2), 48);
        assert_eq!(p.capped_prefix(80), 49);
    }

    #[test]
    fn digit_examples() {
        assert_eq!(tary_digits(0, 7, 3).unwrap(), TaryDigits(vec![0, 0, 0]));
        assert_eq!(tary_digits(99, 11, 2).unwrap(), TaryDigits(vec![9, 0]));
        assert_eq!(tary_digits(5, 3, 3).unwrap(), TaryDigits(vec![0, 1, 2]));
        assert!(matches!(
            tary_digits(27, 3, 3),
            Err(Error::DigitOverflow { .. })
        ));
    }

    #[test]
    fn capped_prefix_counts() {
        // n = 100, t = 11, s' = (9, 0): one tuple with s_0 <= 0; 1 + 0 = 1
        let p = choose_params(100, 2).unwrap();
        assert_eq!(p.capped_prefix(0), 1);
        assert_eq!(p.capped_prefix(1), 1);
        let p = choose_params(121, 2).unwrap();
        assert_eq!(p.capped_prefix(1), 10);
    }

    proptest! {
        #[test]
        fn digits_reconstruct(t in 2u64..40, h in 1usize..6, seed in any::<u64>()) {
            let cap = t.pow(h as u32);
            let j = seed % cap;
            let d = tary_digits(j, t, h).unwrap();
            prop_assert_eq!(d.len(), h);
            prop_assert!(d.0.iter().all(|&s| s < t));
            prop_assert_eq!(d.value(t), j);
        }

        #[test]
        fn params_invariants(n in 2usize..200_000, h in 2usize..8) {
            let p = choose_params(n, h).unwrap();
            let low = ceil_root(n as u64, h);
            prop_assert!(is_prime(p.t));
            prop_assert!(low <= p.t && p.t <= 2 * low);
            prop_assert!((low..p.t).all(|c| !is_prime(c)));
            prop_assert_eq!(gcd(p.t, p.modulus() as u64), 1);
            prop_assert_eq!(p.sprime.value(p.t), (p.modulus() - 1) as u64);
            if p.sigma == 1 {
                prop_assert!(gcd(p.t, n as u64) != 1);
            }
        }
    }
}

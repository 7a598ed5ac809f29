//! Closed-form anchors for the classical rule.

use num_bigint::BigUint;

use crate::error::{ParkError, Result};
use crate::rule::PreferenceList;

/// A list in `[n]^n` is a classical parking function iff its increasing
/// rearrangement `b` satisfies `b_i <= i` for every `i`.
pub fn stanley_check(prefs: &PreferenceList) -> Result<bool> {
    let n = prefs.len();
    for (i, &v) in prefs.as_slice().iter().enumerate() {
        if v < 1 || v > n {
            return Err(ParkError::PreferenceOutOfRange {
                car: i + 1,
                value: v,
                spots: n,
            });
        }
    }
    let mut sorted = prefs.as_slice().to_vec();
    sorted.sort_unstable();
    Ok(sorted.iter().enumerate().all(|(i, &b)| b <= i + 1))
}

/// Number of classical parking functions of length `n`: `(n+1)^(n-1)`.
pub fn kw_count(n: u32) -> BigUint {
    assert!(n >= 1, "kw_count needs n >= 1");
    BigUint::from(n + 1).pow(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(v: &[usize]) -> bool {
        stanley_check(&v.to_vec().into()).unwrap()
    }

    #[test]
    fn preface_examples() {
        assert!(check(&[1, 2, 4, 2, 2]));
        assert!(!check(&[1, 2, 2, 5, 5]));
        assert!(check(&[1; 9]));
    }

    #[test]
    fn out_of_range() {
        assert!(stanley_check(&vec![1, 3].into()).is_err());
        assert!(stanley_check(&vec![0].into()).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(kw_count(1), BigUint::from(1u32));
        assert_eq!(kw_count(3), BigUint::from(16u32));
        assert_eq!(kw_count(7), BigUint::from(262_144u32));
        // 31^29 does not fit in a u64
        assert_eq!(kw_count(30).to_string(), "17761887753093897979823770061456102763834271");
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// An archimedean (rank-1) ordered abelian group used as one position of a
/// lexicographic sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    /// The integers.
    Z,
    /// The rationals.
    Q,
    /// Rationals whose denominator is coprime to the given prime.
    ZLoc(u32),
    /// Integers with the given prime inverted.
    ZInv(u32),
}

impl Component {
    /// Whether every element of the component is `p` times another element.
    pub fn is_p_divisible(self, p: u32) -> bool {
        match self {
            Component::Z => false,
            Component::Q => true,
            Component::ZLoc(q) => p != q,
            Component::ZInv(q) => p == q,
        }
    }

    pub fn is_divisible(self) -> bool {
        matches!(self, Component::Q)
    }

    /// No prime divides the group, i.e. not q-divisible for any prime q.
    pub fn is_nowhere_divisible(self) -> bool {
        matches!(self, Component::Z)
    }

    /// `[C : pC]`, always `1` or `p` for these components.
    pub fn index_mod_p(self, p: u32) -> u32 {
        if self.is_p_divisible(p) {
            1
        } else {
            p
        }
    }

    /// The prime this component is parameterised by, if any.
    pub fn prime(self) -> Option<u32> {
        match self {
            Component::ZLoc(q) | Component::ZInv(q) => Some(q),
            Component::Z | Component::Q => None,
        }
    }

    /// Whether `x` is an element of the component.
    pub fn admits(self, x: &BigRational) -> bool {
        let den = x.denom();
        match self {
            Component::Z => den.is_one(),
            Component::Q => true,
            Component::ZLoc(q) => !(den % BigInt::from(q)).is_zero(),
            Component::ZInv(q) => {
                let q = BigInt::from(q);
                let mut d = den.clone();
                while (&d % &q).is_zero() {
                    d /= &q;
                }
                d.is_one()
            }
        }
    }

    /// Whether `x` lies in `p` times the component.
    pub fn admits_multiple(self, p: u32, x: &BigRational) -> bool {
        self.admits(&(x / BigRational::from_integer(BigInt::from(p))))
    }

    pub fn is_known_prime_parameter(self) -> bool {
        self.prime().map(is_prime).unwrap_or(true)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Z => write!(f, "Z"),
            Component::Q => write!(f, "Q"),
            Component::ZLoc(p) => write!(f, "Z_({p})"),
            Component::ZInv(p) => write!(f, "Z[1/{p}]"),
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The smallest prime not contained in `avoid`.
pub fn smallest_prime_outside(avoid: &[u32]) -> u32 {
    (2u32..).find(|&q| is_prime(q) && !avoid.contains(&q)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn divisibility_table() {
        for p in [2, 3, 5, 7] {
            assert!(!Component::Z.is_p_divisible(p));
            assert!(Component::Q.is_p_divisible(p));
        }
        assert!(Component::ZLoc(3).is_p_divisible(2));
        assert!(!Component::ZLoc(3).is_p_divisible(3));
        assert!(Component::ZInv(3).is_p_divisible(3));
        assert!(!Component::ZInv(3).is_p_divisible(2));
    }

    #[test]
    fn membership() {
        assert!(Component::Z.admits(&r(4, 1)));
        assert!(!Component::Z.admits(&r(1, 2)));
        assert!(Component::ZLoc(3).admits(&r(1, 2)));
        assert!(!Component::ZLoc(3).admits(&r(1, 3)));
        assert!(Component::ZInv(2).admits(&r(3, 8)));
        assert!(!Component::ZInv(2).admits(&r(1, 6)));
        assert!(Component::ZLoc(3).admits_multiple(3, &r(3, 2)));
        assert!(!Component::ZLoc(3).admits_multiple(3, &r(1, 2)));
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(7) && !is_prime(9) && !is_prime(1));
        assert_eq!(smallest_prime_outside(&[2, 3]), 5);
        assert_eq!(smallest_prime_outside(&[]), 2);
    }
}

use crate::error::{Error, Result};

/// The Mersenne prime 2^61 - 1, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n == b {
            return true;
        }
        if n.is_multiple_of(b) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Arithmetic modulo a prime `p < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    mersenne: bool,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self {
            p,
            mersenne: p == MERSENNE_61,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let prod = a as u128 * b as u128;
        if self.mersenne {
            let folded = (prod as u64 & MERSENNE_61) + (prod >> 61) as u64;
            let folded = (folded & MERSENNE_61) + (folded >> 61);
            if folded >= MERSENNE_61 {
                folded - MERSENNE_61
            } else {
                folded
            }
        } else {
            (prod % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }

    pub fn reduce_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(MERSENNE_61));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(MERSENNE_61 - 2));
        // strong pseudoprime to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(PrimeField::new(15).is_err());
    }

    #[test]
    fn mersenne_mul_matches_generic() {
        let f = PrimeField::new(MERSENNE_61).unwrap();
        let xs = [
            0,
            1,
            2,
            MERSENNE_61 - 1,
            1 << 60,
            123_456_789_012_345,
            MERSENNE_61 / 3,
        ];
        for &a in &xs {
            for &b in &xs {
                let expect = ((a as u128 * b as u128) % MERSENNE_61 as u128) as u64;
                assert_eq!(f.mul(a, b), expect);
            }
        }
    }

    #[test]
    fn inverses() {
        for p in [2u64, 3, 101, MERSENNE_61] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p.min(200) {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }
}

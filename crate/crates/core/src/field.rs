// SPDX-License-Identifier: Apache-2.0

//! Arithmetic in a prime field F_p with a runtime modulus.
//!
//! Residues are plain `u64` values in `[0, p)`. The modulus is restricted to
//! `p < 2^32` so that a product of two residues fits in a `u64`, and a sum of
//! a residue with such a product fits as well.

use rand::Rng;

use crate::error::{Error, Result};

/// The Mersenne prime 2^31 - 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..1 << 32).contains(&p) {
            return Err(Error::Modulus(format!("modulus {p} must be an odd prime below 2^32")));
        }
        if !is_prime(p) {
            return Err(Error::Modulus(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    #[inline]
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
        a * b % self.p
    }

    /// `a + b*c` reduced.
    #[inline]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        (a + b * c) % self.p
    }

    /// `a - b*c` reduced.
    #[inline]
    pub fn mul_sub(&self, a: u64, b: u64, c: u64) -> u64 {
        (a + self.p * self.p - b * c) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero, which always indicates a bug
    /// in the caller.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }

    /// Maps a signed integer to its residue.
    pub fn from_i64(&self, v: i64) -> u64 {
        let p = self.p as i64;
        (((v % p) + p) % p) as u64
    }

    /// Symmetric representative in `(-p/2, p/2]`, for display.
    pub fn to_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }

    /// Binomial coefficient reduced mod p.
    pub fn binomial(&self, n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..k {
            num = self.mul(num, (n - i) % self.p);
            den = self.mul(den, (i + 1) % self.p);
        }
        if den == 0 {
            // only possible when p <= k; callers guard against that
            return 0;
        }
        self.mul(num, self.inv(den))
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Ternary forms in `x0, x1, x2` and plane points.
//!
//! Monomials of degree `k` are ordered with the exponent of `x0` descending,
//! then that of `x1` descending. The position of `x0^a x1^b x2^c` is
//! `u(u+1)/2 + c` with `u = b + c`, independent of `k`; multiplying by a
//! variable therefore has a closed-form index map.

use serde::{Deserialize, Serialize};

use crate::binform::BinForm;
use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Number of monomials of degree `k` in three variables.
pub fn monomial_count(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

#[inline]
pub fn monomial_index(b: usize, c: usize) -> usize {
    let u = b + c;
    u * (u + 1) / 2 + c
}

/// Exponent triples of degree `k` in basis order.
pub fn monomials(k: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(monomial_count(k));
    for u in 0..=k {
        for c in 0..=u {
            out.push([k - u, u - c, c]);
        }
    }
    out
}

/// A point of the projective plane, normalized so that its first nonzero
/// coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanePoint(pub [u64; 3]);

impl PlanePoint {
    pub fn new(coords: [u64; 3], field: PrimeField) -> Result<Self> {
        let p = field.modulus();
        let c = coords.map(|x| x % p);
        let Some(&lead) = c.iter().find(|&&x| x != 0) else {
            return Err(Error::Domain("the zero vector is not a projective point".into()));
        };
        let inv = field.inv(lead);
        Ok(PlanePoint(c.map(|x| field.mul(x, inv))))
    }

    pub fn coords(&self) -> [u64; 3] {
        self.0
    }
}

pub fn cross(a: [u64; 3], b: [u64; 3], f: PrimeField) -> [u64; 3] {
    [
        f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
        f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
        f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
    ]
}

pub fn dot(a: [u64; 3], b: [u64; 3], f: PrimeField) -> u64 {
    f.add(f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1])), f.mul(a[2], b[2]))
}

pub fn det3(a: [u64; 3], b: [u64; 3], c: [u64; 3], f: PrimeField) -> u64 {
    dot(a, cross(b, c, f), f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneForm {
    field: PrimeField,
    degree: usize,
    coeffs: Vec<u64>,
}

impl PlaneForm {
    pub fn new(degree: usize, coeffs: Vec<u64>, field: PrimeField) -> Result<Self> {
        if coeffs.len() != monomial_count(degree) {
            return Err(Error::Dimension(format!(
                "degree {degree} needs {} coefficients, got {}",
                monomial_count(degree),
                coeffs.len()
            )));
        }
        let p = field.modulus();
        Ok(PlaneForm {
            field,
            degree,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        })
    }

    pub fn zero(degree: usize, field: PrimeField) -> Self {
        PlaneForm {
            field,
            degree,
            coeffs: vec![0; monomial_count(degree)],
        }
    }

    /// The linear form `l[0] x0 + l[1] x1 + l[2] x2`.
    pub fn linear(l: [u64; 3], field: PrimeField) -> Self {
        // order for k = 1: x0, x1, x2
        PlaneForm::new(1, l.to_vec(), field).expect("three coefficients")
    }

    /// The variable `x_j`.
    pub fn variable(j: usize, field: PrimeField) -> Self {
        let mut l = [0u64; 3];
        l[j] = 1;
        PlaneForm::linear(l, field)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &PlaneForm) -> Result<PlaneForm> {
        if self.degree != other.degree {
            return Err(Error::Dimension("adding plane forms of different degree".into()));
        }
        let f = self.field;
        Ok(PlaneForm {
            field: f,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: u64) -> PlaneForm {
        let f = self.field;
        PlaneForm {
            field: f,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Product with the variable `x_j`.
    pub fn times_variable(&self, j: usize) -> PlaneForm {
        let mut out = vec![0u64; monomial_count(self.degree + 1)];
        for (idx, [_, b, c]) in monomials(self.degree).into_iter().enumerate() {
            let target = match j {
                0 => monomial_index(b, c),
                1 => monomial_index(b + 1, c),
                _ => monomial_index(b, c + 1),
            };
            out[target] = self.coeffs[idx];
        }
        PlaneForm {
            field: self.field,
            degree: self.degree + 1,
            coeffs: out,
        }
    }

    pub fn mul(&self, other: &PlaneForm) -> PlaneForm {
        let f = self.field;
        let p = f.modulus();
        let deg = self.degree + other.degree;
        let mut out = vec![0u64; monomial_count(deg)];
        let ma = monomials(self.degree);
        let mb = monomials(other.degree);
        for (i, ea) in ma.iter().enumerate() {
            let a = self.coeffs[i];
            if a == 0 {
                continue;
            }
            for (j, eb) in mb.iter().enumerate() {
                let idx = monomial_index(ea[1] + eb[1], ea[2] + eb[2]);
                out[idx] = (out[idx] + a * other.coeffs[j]) % p;
            }
        }
        PlaneForm {
            field: f,
            degree: deg,
            coeffs: out,
        }
    }

    pub fn eval(&self, x: [u64; 3]) -> u64 {
        let f = self.field;
        let pw: Vec<[u64; 3]> = (0..=self.degree)
            .map(|e| [f.pow(x[0], e as u64), f.pow(x[1], e as u64), f.pow(x[2], e as u64)])
            .collect();
        monomials(self.degree)
            .iter()
            .zip(&self.coeffs)
            .fold(0, |acc, ([a, b, c], &coef)| {
                let m = f.mul(f.mul(pw[*a][0], pw[*b][1]), pw[*c][2]);
                f.add(acc, f.mul(coef, m))
            })
    }

    /// Substitutes a triple of binary forms of common degree `d`, giving a
    /// binary form of degree `d * self.degree`.
    pub fn compose(&self, phi: &[BinForm; 3]) -> Result<BinForm> {
        let d = phi[0].degree();
        if phi.iter().any(|g| g.degree() != d) {
            return Err(Error::Dimension("substituting forms of unequal degree".into()));
        }
        let q = self.degree;
        let powers: Vec<Vec<BinForm>> = phi
            .iter()
            .map(|g| {
                let mut v = vec![BinForm::one(self.field)];
                for e in 1..=q {
                    let next = v[e - 1].mul(g)?;
                    v.push(next);
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        let mut acc = BinForm::zero(d * q, self.field);
        for (idx, [a, b, c]) in monomials(q).into_iter().enumerate() {
            let coef = self.coeffs[idx];
            if coef == 0 {
                continue;
            }
            let term = powers[0][a].mul(&powers[1][b])?.mul(&powers[2][c])?;
            acc = acc.add(&term.scale(coef))?;
        }
        Ok(acc)
    }
}

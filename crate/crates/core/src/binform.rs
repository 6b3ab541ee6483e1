// SPDX-License-Identifier: Apache-2.0

//! Homogeneous forms in `s, t` over F_p and parameterization triples.
//!
//! A form of degree `d` stores `d + 1` coefficients; index `i` holds the
//! coefficient of `s^(d-i) t^i`. The zero form keeps its nominal degree so
//! that graded objects (syzygy components, for instance) stay well typed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::MatFp;
use crate::field::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinForm {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl BinForm {
    pub fn new(coeffs: Vec<u64>, field: PrimeField) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("a form needs at least one coefficient".into()));
        }
        let p = field.modulus();
        Ok(BinForm {
            field,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        })
    }

    pub fn from_i64(coeffs: &[i64], field: PrimeField) -> Result<Self> {
        BinForm::new(coeffs.iter().map(|&c| field.from_i64(c)).collect(), field)
    }

    pub fn zero(degree: usize, field: PrimeField) -> Self {
        BinForm {
            field,
            coeffs: vec![0; degree + 1],
        }
    }

    pub fn one(field: PrimeField) -> Self {
        BinForm { field, coeffs: vec![1] }
    }

    /// The monomial `c * s^(degree - j) t^j`.
    pub fn monomial(degree: usize, j: usize, c: u64, field: PrimeField) -> Self {
        let mut f = BinForm::zero(degree, field);
        f.coeffs[j] = c % field.modulus();
        f
    }

    /// `a*s + b*t`.
    pub fn linear(a: u64, b: u64, field: PrimeField) -> Self {
        let p = field.modulus();
        BinForm {
            field,
            coeffs: vec![a % p, b % p],
        }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_field(&self, other: &BinForm) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Modulus("forms over different fields".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &BinForm) -> Result<BinForm> {
        self.check_field(other)?;
        if self.degree() != other.degree() {
            return Err(Error::Dimension(format!(
                "adding forms of degree {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        let f = self.field;
        Ok(BinForm {
            field: f,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &BinForm) -> Result<BinForm> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u64) -> BinForm {
        let f = self.field;
        BinForm {
            field: f,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Schoolbook product; degrees add.
    pub fn mul(&self, other: &BinForm) -> Result<BinForm> {
        self.check_field(other)?;
        let f = self.field;
        let p = f.modulus();
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Ok(BinForm { field: f, coeffs: out })
    }

    pub fn pow(&self, e: usize) -> BinForm {
        let mut acc = BinForm::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Value at `(s0, t0)`.
    pub fn eval(&self, s0: u64, t0: u64) -> u64 {
        let f = self.field;
        let d = self.degree() as u64;
        // sum c_i s^(d-i) t^i, accumulated by powers of t and s separately
        let mut acc = 0u64;
        let mut tp = 1u64;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let sp = f.pow(s0, d - i as u64);
            acc = f.add(acc, f.mul(c, f.mul(sp, tp)));
            tp = f.mul(tp, t0);
        }
        acc
    }

    /// Multiplies by a power of `t`, shifting coefficients up.
    fn times_t_pow(&self, e: usize) -> BinForm {
        let mut coeffs = vec![0u64; e];
        coeffs.extend_from_slice(&self.coeffs);
        BinForm {
            field: self.field,
            coeffs,
        }
    }

    /// Exponent of the largest power of `t` dividing a nonzero form.
    fn t_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0).count()
    }

    /// Divides by the leading (first nonzero) coefficient.
    pub fn monic(&self) -> BinForm {
        match self.coeffs.iter().find(|&&c| c != 0) {
            Some(&lead) => self.scale(self.field.inv(lead)),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    ///
    /// Powers of `t` are split off first; what remains is dehomogenized at
    /// `t = 1`, run through the univariate Euclidean algorithm and then
    /// rehomogenized.
    pub fn gcd(&self, other: &BinForm) -> Result<BinForm> {
        self.check_field(other)?;
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Err(Error::Domain("gcd of two zero forms".into())),
            (true, false) => return Ok(other.monic()),
            (false, true) => return Ok(self.monic()),
            _ => {}
        }
        let f = self.field;
        let (va, vb) = (self.t_valuation(), other.t_valuation());
        // Dehomogenized at t = 1: low-to-high coefficients in s.
        let ua: Vec<u64> = self.coeffs[va..].iter().rev().copied().collect();
        let ub: Vec<u64> = other.coeffs[vb..].iter().rev().copied().collect();
        let g = upoly::gcd(&ua, &ub, f);
        // Rehomogenize: with e = deg g, the coefficient of s^k t^(e-k) sits
        // at index e - k.
        let coeffs: Vec<u64> = g.iter().rev().copied().collect();
        Ok(BinForm { field: f, coeffs }.times_t_pow(va.min(vb)))
    }

    /// Exact quotient `self / divisor`.
    pub fn div_exact(&self, divisor: &BinForm) -> Result<BinForm> {
        self.check_field(divisor)?;
        if divisor.is_zero() {
            return Err(Error::Domain("division by the zero form".into()));
        }
        if divisor.degree() > self.degree() {
            return Err(Error::NotDivisible(format!(
                "degree {} by degree {}",
                self.degree(),
                divisor.degree()
            )));
        }
        let f = self.field;
        let qdeg = self.degree() - divisor.degree();
        let j0 = divisor.t_valuation();
        let lead_inv = f.inv(divisor.coeffs[j0]);
        let g = &divisor.coeffs;
        let mut q = vec![0u64; qdeg + 1];
        for i in 0..=qdeg {
            let mut acc = if i + j0 < self.coeffs.len() {
                self.coeffs[i + j0]
            } else {
                0
            };
            for k in (j0 + 1)..g.len() {
                if k > i + j0 {
                    break;
                }
                acc = f.mul_sub(acc, g[k], q[i + j0 - k]);
            }
            q[i] = f.mul(acc, lead_inv);
        }
        let quotient = BinForm { field: f, coeffs: q };
        if quotient.mul(divisor)? != *self {
            return Err(Error::NotDivisible(format!("degree {}", self.degree())));
        }
        Ok(quotient)
    }

    /// Text form `c0*s^d + c1*s^(d-1)*t + ...`, coefficients shown as
    /// symmetric residues.
    pub fn to_text(&self) -> String {
        let d = self.degree();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let c = self.field.to_signed(c);
                let mono = match (d - i, i) {
                    (0, 0) => String::new(),
                    (a, 0) => format!("*{}", power("s", a)),
                    (0, b) => format!("*{}", power("t", b)),
                    (a, b) => format!("*{}*{}", power("s", a), power("t", b)),
                };
                format!("{c}{mono}")
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn to_json(&self) -> FormJson {
        FormJson(self.degree(), self.coeffs.clone())
    }

    pub fn from_json(j: &FormJson, field: PrimeField) -> Result<Self> {
        if j.1.len() != j.0 + 1 {
            return Err(Error::Parse(format!("degree {} with {} coefficients", j.0, j.1.len())));
        }
        BinForm::new(j.1.clone(), field)
    }
}

fn power(var: &str, e: usize) -> String {
    if e == 1 {
        var.to_string()
    } else {
        format!("{var}^{e}")
    }
}

impl fmt::Display for BinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// JSON shape `[degree, [coeffs]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson(pub usize, pub Vec<u64>);

/// Univariate helpers, coefficients stored low-to-high.
mod upoly {
    use crate::field::PrimeField;

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn rem(a: &[u64], b: &[u64], f: PrimeField) -> Vec<u64> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let inv = f.inv(b[db]);
        while r.len() > db && !is_zero(&r) {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let q = f.mul(lead, inv);
                let shift = r.len() - 1 - db;
                for (k, &bk) in b.iter().enumerate() {
                    r[shift + k] = f.mul_sub(r[shift + k], q, bk);
                }
            }
            r.pop();
        }
        trim(if r.is_empty() { vec![0] } else { r })
    }

    /// Monic gcd of two nonzero polynomials.
    pub fn gcd(a: &[u64], b: &[u64], f: PrimeField) -> Vec<u64> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !is_zero(&y) {
            let r = rem(&x, &y, f);
            x = y;
            y = r;
        }
        let inv = f.inv(*x.last().unwrap());
        x.iter().map(|&c| f.mul(c, inv)).collect()
    }
}

/// Three forms of a common degree defining a map P^1 -> P^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamTriple {
    phi: [BinForm; 3],
}

impl ParamTriple {
    /// Validates: common degree >= 1, same field, no common factor, and the
    /// image is a curve (the forms are not all proportional).
    pub fn new(phi: [BinForm; 3]) -> Result<Self> {
        let d = phi[0].degree();
        if d == 0 {
            return Err(Error::InvalidParam("degree 0".into()));
        }
        if phi.iter().any(|f| f.degree() != d) {
            return Err(Error::InvalidParam("components of different degree".into()));
        }
        let field = phi[0].field();
        if phi.iter().any(|f| f.field() != field) {
            return Err(Error::Modulus("components over different fields".into()));
        }
        let nz: Vec<&BinForm> = phi.iter().filter(|f| !f.is_zero()).collect();
        if nz.is_empty() {
            return Err(Error::InvalidParam("all components vanish".into()));
        }
        let mut g = nz[0].clone();
        for f in &nz[1..] {
            g = g.gcd(f)?;
        }
        if g.degree() > 0 {
            return Err(Error::InvalidParam(format!(
                "components share a factor of degree {}",
                g.degree()
            )));
        }
        let rows: Vec<Vec<u64>> = phi.iter().map(|f| f.coeffs().to_vec()).collect();
        if MatFp::from_rows(&rows, field)?.rank() < 2 {
            return Err(Error::InvalidParam("image is a point".into()));
        }
        Ok(ParamTriple { phi })
    }

    pub fn degree(&self) -> usize {
        self.phi[0].degree()
    }

    pub fn field(&self) -> PrimeField {
        self.phi[0].field()
    }

    pub fn components(&self) -> &[BinForm; 3] {
        &self.phi
    }

    pub fn eval(&self, s0: u64, t0: u64) -> [u64; 3] {
        [
            self.phi[0].eval(s0, t0),
            self.phi[1].eval(s0, t0),
            self.phi[2].eval(s0, t0),
        ]
    }

    pub fn to_json(&self) -> [FormJson; 3] {
        [self.phi[0].to_json(), self.phi[1].to_json(), self.phi[2].to_json()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f() -> PrimeField {
        PrimeField::default()
    }

    fn s() -> BinForm {
        BinForm::linear(1, 0, f())
    }

    fn t() -> BinForm {
        BinForm::linear(0, 1, f())
    }

    fn random_form(deg: usize, rng: &mut ChaCha8Rng) -> BinForm {
        BinForm::new((0..=deg).map(|_| f().random(rng)).collect(), f()).unwrap()
    }

    #[test]
    fn products_of_linear_forms() {
        assert_eq!(s().mul(&t()).unwrap().coeffs(), &[0, 1, 0]);
        let sum = s().add(&t()).unwrap();
        let diff = s().sub(&t()).unwrap();
        let prod = sum.mul(&diff).unwrap();
        assert_eq!(prod, BinForm::from_i64(&[1, 0, -1], f()).unwrap());
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_form(5, &mut rng);
        let b = random_form(5, &mut rng);
        let ab = a.mul(&b).unwrap();
        for _ in 0..20 {
            let (s0, t0) = (f().random(&mut rng), f().random(&mut rng));
            assert_eq!(ab.eval(s0, t0), f().mul(a.eval(s0, t0), b.eval(s0, t0)));
        }
    }

    #[test]
    fn gcd_examples() {
        let s4 = s().pow(4);
        let s3t = s().pow(3).mul(&t()).unwrap();
        assert_eq!(s4.gcd(&s3t).unwrap(), s().pow(3));

        let sum = s().add(&t()).unwrap();
        let diff = s().sub(&t()).unwrap();
        assert_eq!(sum.gcd(&diff).unwrap(), BinForm::one(f()));

        // pure powers of t on both sides
        let t2 = t().pow(2);
        let t3s = t().pow(3).mul(&s()).unwrap();
        assert_eq!(t2.gcd(&t3s).unwrap(), t2);
    }

    #[test]
    fn gcd_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_form(4, &mut rng);
            let b = random_form(6, &mut rng);
            let h = random_form(3, &mut rng).mul(&t()).unwrap();
            let lhs = a.mul(&h).unwrap().gcd(&b.mul(&h).unwrap()).unwrap();
            let rhs = h.mul(&a.gcd(&b).unwrap()).unwrap().monic();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn exact_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_form(4, &mut rng);
        let b = random_form(3, &mut rng).mul(&t().pow(2)).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.div_exact(&b).unwrap(), a);
        assert_eq!(ab.div_exact(&a).unwrap(), b);
        assert_eq!(s().pow(3).div_exact(&s()).unwrap(), s().pow(2));
        assert!(matches!(s().pow(2).div_exact(&t()), Err(Error::NotDivisible(_))));
        assert!(t().div_exact(&s().pow(2)).is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(s().pow(2).eval(2, 0), 4);
        assert_eq!(s().mul(&t()).unwrap().eval(1, 1), 1);
        // linearity: (a + b)(P) = a(P) + b(P), and the sum of coefficients is the value at (1,1)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_form(7, &mut rng);
        let b = random_form(7, &mut rng);
        let total = a.coeffs().iter().fold(0, |acc, &c| f().add(acc, c));
        assert_eq!(a.eval(1, 1), total);
        assert_eq!(a.add(&b).unwrap().eval(3, 5), f().add(a.eval(3, 5), b.eval(3, 5)));
    }

    #[test]
    fn text_and_json() {
        let g = BinForm::from_i64(&[1, 0, -2], f()).unwrap();
        assert_eq!(g.to_text(), "1*s^2 + -2*t^2");
        let j = g.to_json();
        assert_eq!(BinForm::from_json(&j, f()).unwrap(), g);
        assert_eq!(BinForm::zero(3, f()).to_text(), "0");
    }

    #[test]
    fn param_triple_invariants() {
        let conic = ParamTriple::new([s().pow(2), s().mul(&t()).unwrap(), t().pow(2)]);
        assert!(conic.is_ok());
        let common = ParamTriple::new([s().pow(2), s().mul(&t()).unwrap(), s().pow(2)]);
        assert!(matches!(common, Err(Error::InvalidParam(_))));
        let point = ParamTriple::new([s(), s().scale(2), s().scale(3)]);
        assert!(point.is_err());
    }

    proptest! {
        #[test]
        fn ring_axioms(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_form(3, &mut rng);
            let b = random_form(4, &mut rng);
            let c = random_form(4, &mut rng);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let l2 = a.mul(&b).unwrap().mul(&c).unwrap();
            let r2 = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l2, r2);
        }

        #[test]
        fn gcd_lcm_degrees(seed in any::<u64>(), da in 1usize..6, db in 1usize..6, dh in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_form(dh, &mut rng);
            let a = random_form(da, &mut rng).mul(&h).unwrap();
            let b = random_form(db, &mut rng).mul(&h).unwrap();
            let g = a.gcd(&b).unwrap();
            let lcm = a.mul(&b).unwrap().div_exact(&g).unwrap();
            prop_assert_eq!(g.degree() + lcm.degree(), a.degree() + b.degree());
            prop_assert!(a.div_exact(&g).is_ok());
            prop_assert!(b.div_exact(&g).is_ok());
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Splitting type `(a, b)` of a parameterized plane curve.
//!
//! Everything is read off the multiplication map
//! `(b0, b1, b2) -> b0 phi0 + b1 phi1 + b2 phi2` from `S_k^3` to `S_(k+d)`,
//! whose kernel is the degree-`k` piece of the syzygy module
//! `S(-a) + S(-b)`.

use serde::Serialize;

use crate::binform::{BinForm, ParamTriple};
use crate::error::{Error, Result};
use crate::exactla::MatFp;
use crate::planeform::PlaneForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitType {
    pub a: usize,
    pub b: usize,
}

impl SplitType {
    pub fn new(a: usize, b: usize) -> Self {
        SplitType {
            a: a.min(b),
            b: a.max(b),
        }
    }

    pub fn gap(&self) -> usize {
        self.b - self.a
    }

    pub fn degree(&self) -> usize {
        self.a + self.b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syzygy {
    pub degree: usize,
    pub alpha: [BinForm; 3],
}

impl Syzygy {
    /// Whether `sum alpha_i phi_i` vanishes identically.
    pub fn annihilates(&self, phi: &ParamTriple) -> Result<bool> {
        let c = phi.components();
        let sum = self.alpha[0]
            .mul(&c[0])?
            .add(&self.alpha[1].mul(&c[1])?)?
            .add(&self.alpha[2].mul(&c[2])?)?;
        Ok(sum.is_zero())
    }
}

/// Matrix of `S_k^3 -> S_(k+d)`: `(k+d+1) x 3(k+1)`, column `3w+i` holding
/// the coefficients of `s^(k-w) t^w phi_i`.
pub fn syzygy_matrix(phi: &ParamTriple, k: usize) -> MatFp {
    let d = phi.degree();
    let f = phi.field();
    let mut m = MatFp::zeros(k + d + 1, 3 * (k + 1), f);
    for (i, comp) in phi.components().iter().enumerate() {
        for w in 0..=k {
            for (j, &c) in comp.coeffs().iter().enumerate() {
                if c != 0 {
                    m.set(w + j, 3 * w + i, c);
                }
            }
        }
    }
    m
}

fn half_degree(phi: &ParamTriple) -> Result<usize> {
    let d = phi.degree();
    if d < 2 {
        return Err(Error::Precondition(format!("degree {d} < 2")));
    }
    Ok(d / 2)
}

/// The `(n+d) x 3n` moving-line matrix, `d = 2n + delta`.
pub fn moving_line_matrix(phi: &ParamTriple) -> Result<MatFp> {
    let n = half_degree(phi)?;
    Ok(syzygy_matrix(phi, n - 1))
}

/// `a = n - p` with `p` the nullity of the moving-line matrix, `b = d - a`.
pub fn splitting_moving_lines(phi: &ParamTriple) -> Result<SplitType> {
    let d = phi.degree();
    if d == 1 {
        return Ok(SplitType::new(0, 1));
    }
    let n = half_degree(phi)?;
    let p = moving_line_matrix(phi)?.nullity();
    if p > n {
        return Err(Error::InvalidParam(format!("nullity {p} exceeds n = {n}")));
    }
    Ok(SplitType::new(n - p, d - (n - p)))
}

/// `dim J_k` for `k >= d`.
pub fn ideal_degree_dim(phi: &ParamTriple, k: usize) -> usize {
    let d = phi.degree();
    assert!(k >= d, "J_k is spanned by phi only from degree d on");
    syzygy_matrix(phi, k - d).rank()
}

/// Least `k` in `[d, 2d-2]` with `J_k = S_k`.
pub fn saturation_degree(phi: &ParamTriple) -> Result<usize> {
    let d = phi.degree();
    let full = |k: usize| ideal_degree_dim(phi, k) == k + 1;
    let (mut lo, mut hi) = (d, (2 * d).saturating_sub(2).max(d));
    if !full(hi) {
        return Err(Error::InvalidParam(format!(
            "J_k never fills S_k up to k = {hi}: components share a factor or the map is not birational"
        )));
    }
    // J_k = S_k propagates upward, so the predicate is monotone
    while lo < hi {
        let mid = (lo + hi) / 2;
        if full(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// `b = sigma - d + 1`.
pub fn splitting_saturation(phi: &ParamTriple) -> Result<(SplitType, usize)> {
    let d = phi.degree();
    if d == 1 {
        return Ok((SplitType::new(0, 1), 1));
    }
    let sigma = saturation_degree(phi)?;
    let b = sigma + 1 - d;
    Ok((SplitType::new(d - b, b), sigma))
}

fn syzygy_from_kernel(phi: &ParamTriple, k: usize, v: &[u64]) -> Syzygy {
    let f = phi.field();
    let alpha =
        [0, 1, 2].map(|i| BinForm::new((0..=k).map(|w| v[3 * w + i]).collect(), f).expect("k + 1 coefficients"));
    Syzygy { degree: k, alpha }
}

/// A syzygy of least degree; its degree is `a`.
pub fn min_syzygy(phi: &ParamTriple) -> Result<Syzygy> {
    let d = phi.degree();
    for k in 0..=d {
        let ker = syzygy_matrix(phi, k).kernel_basis();
        if let Some(v) = ker.first() {
            return Ok(syzygy_from_kernel(phi, k, v));
        }
    }
    Err(Error::InvalidParam("no syzygy up to degree d".into()))
}

/// A syzygy obtained by substituting `phi` into a plane relation
/// `A0 x0 + A1 x1 + A2 x2 = 0`, with the common factor of the substituted
/// forms returned as the cofactor.
#[derive(Clone, Debug)]
pub struct PlaneSyzygy {
    pub syzygy: Syzygy,
    pub cofactor: BinForm,
}

pub fn syzygy_from_plane(phi: &ParamTriple, a_forms: &[PlaneForm; 3]) -> Result<PlaneSyzygy> {
    let q = a_forms[0].degree();
    if a_forms.iter().any(|a| a.degree() != q) {
        return Err(Error::Dimension("plane forms of unequal degree".into()));
    }
    let relation = a_forms[0]
        .times_variable(0)
        .add(&a_forms[1].times_variable(1))?
        .add(&a_forms[2].times_variable(2))?;
    if !relation.is_zero() {
        return Err(Error::Precondition(
            "A0 x0 + A1 x1 + A2 x2 is not identically zero".into(),
        ));
    }
    let comps = phi.components();
    let psi = [
        a_forms[0].compose(comps)?,
        a_forms[1].compose(comps)?,
        a_forms[2].compose(comps)?,
    ];
    let nz: Vec<&BinForm> = psi.iter().filter(|g| !g.is_zero()).collect();
    let Some(first) = nz.first() else {
        return Err(Error::Degenerate("every A_i vanishes on the curve".into()));
    };
    let mut g = (*first).clone();
    for h in &nz[1..] {
        g = g.gcd(h)?;
    }
    let k = psi[0].degree() - g.degree();
    let f = phi.field();
    let div = |h: &BinForm| {
        if h.is_zero() {
            Ok(BinForm::zero(k, f))
        } else {
            h.div_exact(&g)
        }
    };
    Ok(PlaneSyzygy {
        syzygy: Syzygy {
            degree: k,
            alpha: [div(&psi[0])?, div(&psi[1])?, div(&psi[2])?],
        },
        cofactor: g,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub a: usize,
    pub b: usize,
    pub gap: usize,
    pub sigma: usize,
    pub syzygy_degree: usize,
}

/// Runs all three methods and fails unless they agree.
pub fn split_all(phi: &ParamTriple) -> Result<(SplitReport, Syzygy)> {
    let ml = splitting_moving_lines(phi)?;
    let (sat, sigma) = splitting_saturation(phi)?;
    let syz = min_syzygy(phi)?;
    if ml != sat || syz.degree != ml.a {
        return Err(Error::InvalidParam(format!(
            "methods disagree: moving lines {ml:?}, saturation {sat:?}, minimal syzygy degree {}",
            syz.degree
        )));
    }
    Ok((
        SplitReport {
            a: ml.a,
            b: ml.b,
            gap: ml.gap(),
            sigma,
            syzygy_degree: syz.degree,
        },
        syz,
    ))
}

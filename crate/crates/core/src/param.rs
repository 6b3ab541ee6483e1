// SPDX-License-Identifier: Apache-2.0

//! Explicit parameterizations of rational plane curves through random points.
//!
//! A class is pushed down by greedy quadratic transformations until it is a
//! line or a monoidal curve (degree `d` with a point of multiplicity `d - 1`).
//! The base curve is parameterized directly and pulled back step by step.
//!
//! Each quadratic transformation is written as `T = sigma . l`, where `l`
//! sends the three centers to the coordinate points and
//! `sigma(z) = (z1 z2, z0 z2, z0 z1)` is the standard involution. Pulling a
//! parameterization back through `T` uses `adj(l) . sigma`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::binform::{BinForm, ParamTriple};
use crate::error::{Error, Result};
use crate::exactla::MatFp;
use crate::field::PrimeField;
use crate::lattice::{DivClass, Reflection, WeylWord};
use crate::planeform::{cross, det3, dot, monomials, PlaneForm, PlanePoint};

pub const DEFAULT_RETRIES: u32 = 8;

/// SplitMix64 finalizer, used to derive independent streams from one seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, f: PrimeField) -> [u64; 3] {
    loop {
        let c = [f.random(rng), f.random(rng), f.random(rng)];
        if let Ok(p) = PlanePoint::new(c, f) {
            return p.coords();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointSet {
    points: Vec<PlanePoint>,
    seed: u64,
    attempt: u32,
    #[serde(skip)]
    field: PrimeField,
}

impl PointSet {
    /// `r` random points with a genericity certificate: no three collinear
    /// and no six on a conic. Failing sets are regenerated from the next
    /// retry stream.
    pub fn random(r: usize, seed: u64, field: PrimeField) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("a point set needs r >= 1".into()));
        }
        let mut last = String::new();
        for attempt in 0..DEFAULT_RETRIES {
            let mut rng = seeded_rng(seed, u64::from(attempt));
            let points: Vec<PlanePoint> = (0..r).map(|_| PlanePoint(random_point(&mut rng, field))).collect();
            let set = PointSet {
                points,
                seed,
                attempt,
                field,
            };
            match set.certify() {
                Ok(()) => return Ok(set),
                Err(e) => last = e.to_string(),
            }
        }
        Err(Error::RetriesExhausted {
            attempts: DEFAULT_RETRIES,
            last,
        })
    }

    /// Wraps explicit points; no certificate is run.
    pub fn from_points(points: Vec<PlanePoint>, field: PrimeField) -> Self {
        PointSet {
            points,
            seed: 0,
            attempt: 0,
            field,
        }
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn attempt(&self) -> u32 {
        self.attempt
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn certify(&self) -> Result<()> {
        let f = self.field;
        let pts: Vec<[u64; 3]> = self.points.iter().map(|p| p.coords()).collect();
        let r = pts.len();
        for i in 0..r {
            for j in (i + 1)..r {
                if pts[i] == pts[j] {
                    return Err(Error::Degenerate(format!("points {} and {} coincide", i + 1, j + 1)));
                }
                for k in (j + 1)..r {
                    if det3(pts[i], pts[j], pts[k], f) == 0 {
                        return Err(Error::Degenerate(format!(
                            "points {}, {}, {} are collinear",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        if r >= 6 {
            let rows: Vec<Vec<u64>> = pts.iter().map(|p| conic_row(*p, f)).collect();
            let mut idx = [0usize, 1, 2, 3, 4, 5];
            loop {
                let sub: Vec<Vec<u64>> = idx.iter().map(|&i| rows[i].clone()).collect();
                if MatFp::from_rows(&sub, f)?.rank() < 6 {
                    return Err(Error::Degenerate(format!("six points {idx:?} on a conic")));
                }
                if !next_combination(&mut idx, r) {
                    break;
                }
            }
        }
        Ok(())
    }
}

fn conic_row(p: [u64; 3], f: PrimeField) -> Vec<u64> {
    monomials(2)
        .iter()
        .map(|e| {
            f.mul(
                f.mul(f.pow(p[0], e[0] as u64), f.pow(p[1], e[1] as u64)),
                f.pow(p[2], e[2] as u64),
            )
        })
        .collect()
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// One quadratic transformation centered at points `i, j, k` of a
/// configuration.
#[derive(Clone, Debug, Serialize)]
pub struct CremonaStep {
    /// Zero-based center indices.
    #[serde(serialize_with = "one_based")]
    pub triple: (usize, usize, usize),
    /// `H_ij`, `H_ik`, `H_jk` as coefficient vectors.
    pub lines: [[u64; 3]; 3],
    /// `(H_ij H_ik, H_ij H_jk, H_ik H_jk)` as degree-2 coefficient vectors.
    pub forms: [Vec<u64>; 3],
    pub before: Vec<PlanePoint>,
    pub after: Vec<PlanePoint>,
    #[serde(skip)]
    field: PrimeField,
}

fn one_based<S: serde::Serializer>(t: &(usize, usize, usize), s: S) -> std::result::Result<S::Ok, S::Error> {
    [t.0 + 1, t.1 + 1, t.2 + 1].serialize(s)
}

impl CremonaStep {
    /// Rows of `l`: `(H_jk, H_ik, H_ij)`.
    fn ell(&self) -> [[u64; 3]; 3] {
        [self.lines[2], self.lines[1], self.lines[0]]
    }

    /// Image of a point off the three fundamental lines.
    pub fn map_point(&self, x: [u64; 3]) -> Result<PlanePoint> {
        let f = self.field;
        let z = self.ell().map(|row| dot(row, x, f));
        if z.contains(&0) {
            return Err(Error::Degenerate("point on a fundamental line".into()));
        }
        PlanePoint::new(sigma_point(z, f), f)
    }

    /// The plane forms of `T` as [`PlaneForm`] values.
    pub fn plane_forms(&self) -> [PlaneForm; 3] {
        let f = self.field;
        self.forms
            .clone()
            .map(|c| PlaneForm::new(2, c, f).expect("six coefficients"))
    }

    /// Pulls a parameterization of the image curve back through `T` and
    /// strips the common factor.
    pub fn pull_back(&self, psi: &[BinForm; 3]) -> Result<[BinForm; 3]> {
        let f = self.field;
        let sig = [psi[1].mul(&psi[2])?, psi[0].mul(&psi[2])?, psi[0].mul(&psi[1])?];
        let adj = adjugate(self.ell(), f);
        let mut out = Vec::with_capacity(3);
        for row in adj {
            let mut acc = BinForm::zero(sig[0].degree(), f);
            for (c, s) in row.iter().zip(&sig) {
                acc = acc.add(&s.scale(*c))?;
            }
            out.push(acc);
        }
        let out: [BinForm; 3] = out.try_into().expect("three rows");
        strip_common_factor(&out)
    }
}

fn sigma_point(z: [u64; 3], f: PrimeField) -> [u64; 3] {
    [f.mul(z[1], z[2]), f.mul(z[0], z[2]), f.mul(z[0], z[1])]
}

/// Transposed cofactor matrix of a 3x3 matrix given by rows.
fn adjugate(m: [[u64; 3]; 3], f: PrimeField) -> [[u64; 3]; 3] {
    // column c of adj(M) is the cross product of the other two rows
    let c0 = cross(m[1], m[2], f);
    let c1 = cross(m[2], m[0], f);
    let c2 = cross(m[0], m[1], f);
    [[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]]
}

fn mat_vec(m: [[u64; 3]; 3], v: [u64; 3], f: PrimeField) -> [u64; 3] {
    m.map(|row| dot(row, v, f))
}

/// Divides three forms by their monic gcd.
pub fn strip_common_factor(phi: &[BinForm; 3]) -> Result<[BinForm; 3]> {
    let nz: Vec<&BinForm> = phi.iter().filter(|g| !g.is_zero()).collect();
    let Some(first) = nz.first() else {
        return Err(Error::Degenerate("all components vanish".into()));
    };
    let mut g = (*first).clone();
    for h in &nz[1..] {
        g = g.gcd(h)?;
    }
    if g.degree() == 0 {
        return Ok(phi.clone());
    }
    let d = phi[0].degree() - g.degree();
    let f = phi[0].field();
    let div = |h: &BinForm| {
        if h.is_zero() {
            Ok(BinForm::zero(d, f))
        } else {
            h.div_exact(&g)
        }
    };
    Ok([div(&phi[0])?, div(&phi[1])?, div(&phi[2])?])
}

/// Quadratic transformation centered at points `i, j, k` (zero-based).
///
/// Non-center points are mapped through `T`; the center slots receive the
/// coordinate points `(1,0,0)`, `(0,1,0)`, `(0,0,1)`, the images of the
/// lines `H_jk`, `H_ik`, `H_ij`.
pub fn cremona_apply(points: &[PlanePoint], i: usize, j: usize, k: usize, field: PrimeField) -> Result<CremonaStep> {
    let r = points.len();
    if !(i < j && j < k && k < r) {
        return Err(Error::Index(format!("centers ({i},{j},{k}) on {r} points")));
    }
    let f = field;
    let (pi, pj, pk) = (points[i].coords(), points[j].coords(), points[k].coords());
    if det3(pi, pj, pk, f) == 0 {
        return Err(Error::Degenerate("collinear centers".into()));
    }
    let hij = cross(pi, pj, f);
    let hik = cross(pi, pk, f);
    let hjk = cross(pj, pk, f);
    let lij = PlaneForm::linear(hij, f);
    let lik = PlaneForm::linear(hik, f);
    let ljk = PlaneForm::linear(hjk, f);
    let forms = [
        lij.mul(&lik).coeffs().to_vec(),
        lij.mul(&ljk).coeffs().to_vec(),
        lik.mul(&ljk).coeffs().to_vec(),
    ];
    let mut step = CremonaStep {
        triple: (i, j, k),
        lines: [hij, hik, hjk],
        forms,
        before: points.to_vec(),
        after: Vec::with_capacity(r),
        field: f,
    };
    for (idx, p) in points.iter().enumerate() {
        let img = if idx == i {
            PlanePoint([1, 0, 0])
        } else if idx == j {
            PlanePoint([0, 1, 0])
        } else if idx == k {
            PlanePoint([0, 0, 1])
        } else {
            step.map_point(p.coords())?
        };
        step.after.push(img);
    }
    Ok(step)
}

/// Number of parameter values, with multiplicity, sent to `p`.
///
/// With `c` the first nonzero coordinate of `p` (normalized to 1) this is
/// `deg gcd(phi_a - p_a phi_c, phi_b - p_b phi_c)`.
pub fn multiplicity_at(phi: &ParamTriple, p: &PlanePoint) -> usize {
    let f = phi.field();
    let pc = PlanePoint::new(p.coords(), f).expect("nonzero point").coords();
    let c = pc.iter().position(|&x| x != 0).expect("nonzero point");
    let comps = phi.components();
    let others: Vec<usize> = (0..3).filter(|&x| x != c).collect();
    let g1 = comps[others[0]]
        .sub(&comps[c].scale(pc[others[0]]))
        .expect("equal degrees");
    let g2 = comps[others[1]]
        .sub(&comps[c].scale(pc[others[1]]))
        .expect("equal degrees");
    if g1.is_zero() && g2.is_zero() {
        return phi.degree();
    }
    g1.gcd(&g2).expect("not both zero").degree()
}

#[derive(Clone, Debug)]
pub struct ParamOptions {
    pub max_retries: u32,
    pub trace: bool,
}

impl Default for ParamOptions {
    fn default() -> Self {
        ParamOptions {
            max_retries: DEFAULT_RETRIES,
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Parameterization {
    pub class: DivClass,
    pub phi: ParamTriple,
    /// The points actually used; differs from the input after a retry.
    pub points: PointSet,
    pub word: WeylWord,
    pub base: DivClass,
    pub attempts: u32,
    pub steps: Vec<CremonaStep>,
}

/// Parameterizes the curve of class `class` through the first `r` points
/// of `points`.
///
/// Degenerate random data (a point on a fundamental line, a reducible base
/// curve) triggers a retry with fresh points derived from the point set's
/// seed and the retry counter.
pub fn parameterize(class: &DivClass, points: &PointSet, seed: u64, opts: &ParamOptions) -> Result<Parameterization> {
    check_class(class, points)?;
    let mut last = String::new();
    for attempt in 0..opts.max_retries.max(1) {
        let pts = if attempt == 0 {
            points.clone()
        } else {
            PointSet::random(
                points.len(),
                derive_seed(points.seed(), u64::from(attempt)),
                points.field(),
            )?
        };
        let mut rng = seeded_rng(seed, u64::from(attempt));
        match attempt_once(class, &pts, &mut rng, opts.trace) {
            Ok((phi, word, base, steps)) => {
                return Ok(Parameterization {
                    class: class.clone(),
                    phi,
                    points: pts,
                    word,
                    base,
                    attempts: attempt + 1,
                    steps,
                })
            }
            Err(Error::Degenerate(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted {
        attempts: opts.max_retries.max(1),
        last,
    })
}

fn check_class(class: &DivClass, points: &PointSet) -> Result<()> {
    if class.degree() < 1 {
        return Err(Error::Precondition(format!("{class}: degree must be at least 1")));
    }
    if class.mults().iter().any(|&m| m < 0) {
        return Err(Error::Precondition(format!("{class}: negative multiplicity")));
    }
    if !class.smooth_rational_numerics_ok() {
        return Err(Error::Precondition(format!("{class} fails the genus-zero test")));
    }
    if points.len() < class.r() {
        return Err(Error::Precondition(format!(
            "{} points for a class on {}",
            points.len(),
            class.r()
        )));
    }
    Ok(())
}

type Attempt = (ParamTriple, WeylWord, DivClass, Vec<CremonaStep>);

fn attempt_once(class: &DivClass, points: &PointSet, rng: &mut ChaCha8Rng, trace: bool) -> Result<Attempt> {
    let f = points.field();
    let r = class.r();
    let original: Vec<PlanePoint> = points.points()[..r].to_vec();
    let (word, base) = class.reduce_to_base();

    let mut classes = vec![class.clone()];
    let mut steps = Vec::with_capacity(word.len());
    let mut cur = original.clone();
    for refl in &word.0 {
        let Reflection::Quad(i, j, k) = *refl else {
            unreachable!("greedy reduction only emits quadratic reflections")
        };
        let step = cremona_apply(&cur, i, j, k, f)?;
        cur = step.after.clone();
        classes.push(classes.last().unwrap().apply(*refl)?);
        steps.push(step);
    }

    let base_pts: Vec<[u64; 3]> = cur.iter().map(|p| p.coords()).collect();
    let mut psi = parameterize_base(&base, &base_pts, rng, f)?;
    for (step, cls) in steps.iter().zip(&classes).rev() {
        psi = step.pull_back(&psi)?;
        if psi[0].degree() != cls.degree() as usize {
            return Err(Error::Degenerate(format!(
                "pull-back has degree {} instead of {}",
                psi[0].degree(),
                cls.degree()
            )));
        }
    }
    let phi = ParamTriple::new(psi).map_err(|e| Error::Degenerate(e.to_string()))?;
    for (p, &m) in original.iter().zip(class.mults()) {
        let got = multiplicity_at(&phi, p);
        if got as i64 != m {
            return Err(Error::Degenerate(format!(
                "multiplicity {got} at {:?}, expected {m}",
                p.coords()
            )));
        }
    }
    Ok((phi, word, base, if trace { steps } else { Vec::new() }))
}

/// Base cases: a line through at most two assigned points, or a monoidal
/// curve `(d; d-1, 1, ..., 1)` with at most `2d` simple points.
fn parameterize_base(base: &DivClass, pts: &[[u64; 3]], rng: &mut ChaCha8Rng, f: PrimeField) -> Result<[BinForm; 3]> {
    let d = base.degree();
    let m = base.mults();
    let unsupported = || {
        Error::Domain(format!(
            "{base} is neither a line nor monoidal; no curve of this type through generic points"
        ))
    };
    if m.iter().any(|&x| x < 0 || x >= d.max(2)) {
        return Err(unsupported());
    }
    if d == 1 {
        let mut through: Vec<[u64; 3]> = pts.iter().zip(m).filter(|(_, &x)| x == 1).map(|(p, _)| *p).collect();
        if through.len() > 2 {
            return Err(unsupported());
        }
        while through.len() < 2 {
            through.push(random_point(rng, f));
        }
        if cross(through[0], through[1], f) == [0, 0, 0] {
            return Err(Error::Degenerate("line through coincident points".into()));
        }
        let comps: Vec<BinForm> = (0..3)
            .map(|c| BinForm::linear(through[0][c], through[1][c], f))
            .collect();
        return Ok(comps.try_into().expect("three components"));
    }

    let heavy: Vec<usize> = (0..m.len()).filter(|&i| m[i] == d - 1).collect();
    let center_idx = match (d, heavy.first()) {
        (_, Some(&i)) if d > 2 && heavy.len() == 1 => Some(i),
        (2, first) => first.copied(),
        _ => return Err(unsupported()),
    };
    if m.iter().enumerate().any(|(i, &x)| Some(i) != center_idx && x > 1) {
        return Err(unsupported());
    }
    let center = match center_idx {
        Some(i) => pts[i],
        None => random_point(rng, f),
    };
    let simple: Vec<[u64; 3]> = (0..m.len())
        .filter(|&i| Some(i) != center_idx && m[i] == 1)
        .map(|i| pts[i])
        .collect();
    monoidal(d as usize, center, &simple, rng, f)
}

/// Parameterizes a general curve of degree `d` with a `(d-1)`-fold point at
/// `center` through the `simple` points.
///
/// In coordinates `x = a P + b U + c V` the curve is
/// `a g(b,c) + h(b,c) = 0` with `deg g = d-1`, `deg h = d`, and the line
/// through `P` in direction `(s:t)` meets it again at
/// `(-h(s,t), s g(s,t), t g(s,t))`.
fn monoidal(
    d: usize,
    center: [u64; 3],
    simple: &[[u64; 3]],
    rng: &mut ChaCha8Rng,
    f: PrimeField,
) -> Result<[BinForm; 3]> {
    if simple.len() > 2 * d {
        return Err(Error::Domain(format!(
            "{} simple points exceed the {} conditions a monoidal curve of degree {d} can meet",
            simple.len(),
            2 * d
        )));
    }
    let (u, v) = loop {
        let u = random_point(rng, f);
        let v = random_point(rng, f);
        if det3(center, u, v, f) != 0 {
            break (u, v);
        }
    };
    // columns P, U, V
    let n = [
        [center[0], u[0], v[0]],
        [center[1], u[1], v[1]],
        [center[2], u[2], v[2]],
    ];
    let n_adj = adjugate(n, f);
    let unknowns = 2 * d + 1;
    let mut rows = Vec::with_capacity(simple.len());
    for q in simple {
        let [a, b, c] = mat_vec(n_adj, *q, f);
        if b == 0 && c == 0 {
            return Err(Error::Degenerate("simple point equals the center".into()));
        }
        let mut row = Vec::with_capacity(unknowns);
        for i in 0..d {
            let mono = f.mul(f.pow(b, (d - 1 - i) as u64), f.pow(c, i as u64));
            row.push(f.mul(a, mono));
        }
        for i in 0..=d {
            row.push(f.mul(f.pow(b, (d - i) as u64), f.pow(c, i as u64)));
        }
        rows.push(row);
    }
    let ker = if rows.is_empty() {
        (0..unknowns)
            .map(|i| (0..unknowns).map(|j| u64::from(i == j)).collect())
            .collect()
    } else {
        MatFp::from_rows(&rows, f)?.kernel_basis()
    };
    let mut coeffs = vec![0u64; unknowns];
    for vec in &ker {
        let lambda = f.random(rng);
        for (c, x) in coeffs.iter_mut().zip(vec) {
            *c = f.mul_add(*c, lambda, *x);
        }
    }
    let g = BinForm::new(coeffs[..d].to_vec(), f)?;
    let h = BinForm::new(coeffs[d..].to_vec(), f)?;
    if g.is_zero() {
        return Err(Error::Degenerate("monoidal curve splits off the center".into()));
    }
    let local = [
        h.scale(f.neg(1)),
        g.mul(&BinForm::linear(1, 0, f))?,
        g.mul(&BinForm::linear(0, 1, f))?,
    ];
    let mut out = Vec::with_capacity(3);
    for row in n {
        let mut acc = BinForm::zero(d, f);
        for (coef, comp) in row.iter().zip(&local) {
            acc = acc.add(&comp.scale(*coef))?;
        }
        out.push(acc);
    }
    Ok(out.try_into().expect("three rows"))
}

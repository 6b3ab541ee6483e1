// SPDX-License-Identifier: Apache-2.0

//! The divisor class lattice of a blow up of the plane at `r` points.
//!
//! A class `dL - m_1 E_1 - ... - m_r E_r` is stored as `(d; m_1, ..., m_r)`,
//! so `E_i` is `(0; ..., -1, ...)` and `-K` is `(3; 1, ..., 1)`. The
//! intersection form has `L^2 = 1`, `E_i^2 = -1` and the basis is orthogonal.
//!
//! Weyl group elements act through two kinds of reflections: transpositions
//! of the `E_i` and the quadratic reflection in `L - E_i - E_j - E_k`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivClass {
    d: i64,
    m: Vec<i64>,
}

impl DivClass {
    pub fn new(d: i64, m: Vec<i64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::Dimension("a class needs r >= 1 points".into()));
        }
        Ok(DivClass { d, m })
    }

    /// Parses `d,m1,...,mr`.
    pub fn parse(text: &str) -> Result<Self> {
        let vals: Vec<i64> = text
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<_>>()?;
        match vals.split_first() {
            Some((&d, m)) => DivClass::new(d, m.to_vec()),
            None => Err(Error::Parse("empty class".into())),
        }
    }

    /// Builds a class from a slice `[d, m1, ..., mr]`.
    pub fn from_slice(v: &[i64]) -> Result<Self> {
        match v.split_first() {
            Some((&d, m)) => DivClass::new(d, m.to_vec()),
            None => Err(Error::Parse("empty class".into())),
        }
    }

    pub fn canonical(r: usize) -> Self {
        DivClass { d: -3, m: vec![-1; r] }
    }

    pub fn line(r: usize) -> Self {
        DivClass { d: 1, m: vec![0; r] }
    }

    /// The exceptional class `E_i`, with `i` zero-based.
    pub fn exceptional(i: usize, r: usize) -> Self {
        let mut m = vec![0; r];
        m[i] = -1;
        DivClass { d: 0, m }
    }

    #[inline]
    pub fn degree(&self) -> i64 {
        self.d
    }

    #[inline]
    pub fn mults(&self) -> &[i64] {
        &self.m
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.m.len()
    }

    /// Pads with zero multiplicities up to `r` points.
    pub fn extended(&self, r: usize) -> DivClass {
        let mut m = self.m.clone();
        if m.len() < r {
            m.resize(r, 0);
        }
        DivClass { d: self.d, m }
    }

    fn check_r(&self, other: &DivClass) -> Result<()> {
        if self.r() != other.r() {
            return Err(Error::Dimension(format!(
                "classes on {} and {} points",
                self.r(),
                other.r()
            )));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &DivClass) -> Result<i64> {
        self.check_r(other)?;
        Ok(self.d * other.d - self.m.iter().zip(&other.m).map(|(a, b)| a * b).sum::<i64>())
    }

    pub fn self_intersection(&self) -> i64 {
        self.d * self.d - self.m.iter().map(|a| a * a).sum::<i64>()
    }

    /// `K . D`.
    pub fn canonical_degree(&self) -> i64 {
        -3 * self.d + self.m.iter().sum::<i64>()
    }

    pub fn scale(&self, c: i64) -> DivClass {
        DivClass {
            d: c * self.d,
            m: self.m.iter().map(|x| c * x).collect(),
        }
    }

    pub fn num_type(&self) -> NumType {
        NumType::new(self.d, self.m.clone())
    }

    pub fn reflect(&self, w: &WeylWord) -> Result<DivClass> {
        let mut out = self.clone();
        for refl in &w.0 {
            out = out.apply(*refl)?;
        }
        Ok(out)
    }

    pub fn apply(&self, refl: Reflection) -> Result<DivClass> {
        refl.check(self.r())?;
        let mut out = self.clone();
        match refl {
            Reflection::Swap(i, j) => out.m.swap(i, j),
            Reflection::Quad(i, j, k) => {
                let e = self.d - self.m[i] - self.m[j] - self.m[k];
                out.d += e;
                out.m[i] += e;
                out.m[j] += e;
                out.m[k] += e;
            }
        }
        Ok(out)
    }

    /// `D^2 = K.D = -1`; a numerical test only.
    pub fn is_exceptional_class(&self) -> bool {
        self.self_intersection() == -1 && self.canonical_degree() == -1
    }

    /// Adjunction with genus zero: `D^2 = -2 - K.D`.
    pub fn smooth_rational_numerics_ok(&self) -> bool {
        self.self_intersection() == -2 - self.canonical_degree()
    }

    /// `A` with `2A = E + K + L`, which exists exactly when `d` is even and
    /// every `m_i` is odd.
    pub fn semi_adjoint(&self) -> Option<DivClass> {
        if self.d % 2 != 0 || self.m.iter().any(|x| x.rem_euclid(2) != 1) {
            return None;
        }
        Some(DivClass {
            d: (self.d - 2) / 2,
            m: self.m.iter().map(|x| (x - 1) / 2).collect(),
        })
    }

    /// For an exceptional class with `m_1 >= ... >= m_r >= 0` and
    /// `d >= 2 m_1 - 1`, returns `A = E + E_1 - sK` (with `s = d - 2 m_1 + 1`)
    /// and `C_A = 2A - K - L`, an exceptional class whose semi-adjoint is `A`.
    pub fn unbalanced_companion(&self) -> Result<(DivClass, DivClass)> {
        if !self.is_exceptional_class() {
            return Err(Error::Precondition(format!("{self} is not exceptional")));
        }
        if self.m.windows(2).any(|w| w[0] < w[1]) || *self.m.last().unwrap() < 0 {
            return Err(Error::Precondition(format!(
                "{self} must have non-increasing, non-negative multiplicities"
            )));
        }
        let m1 = self.m[0];
        if self.d < 2 * m1 - 1 {
            return Err(Error::Precondition(format!("{self} has d < 2 m_1 - 1")));
        }
        let r = self.r();
        let s = self.d - 2 * m1 + 1;
        let k = DivClass::canonical(r);
        let a = self.clone() + DivClass::exceptional(0, r) - k.scale(s);
        let c = a.scale(2) - k - DivClass::line(r);
        Ok((a, c))
    }

    /// Greedy Cremona reduction.
    ///
    /// While `d >= 2` and some triple has `m_i + m_j + m_k > d`, apply the
    /// quadratic reflection on a triple of maximal sum (ties go to the
    /// lexicographically least triple). The degree drops at every step, so
    /// the loop runs at most `d` times.
    pub fn reduce_to_base(&self) -> (WeylWord, DivClass) {
        let mut cur = self.clone();
        let mut word = Vec::new();
        let r = cur.r();
        while cur.d >= 2 && r >= 3 {
            let mut best: Option<((usize, usize, usize), i64)> = None;
            for i in 0..r {
                for j in (i + 1)..r {
                    for k in (j + 1)..r {
                        let s = cur.m[i] + cur.m[j] + cur.m[k];
                        if best.is_none_or(|(_, b)| s > b) {
                            best = Some(((i, j, k), s));
                        }
                    }
                }
            }
            let ((i, j, k), s) = best.expect("r >= 3");
            if s <= cur.d {
                break;
            }
            let refl = Reflection::Quad(i, j, k);
            cur = cur.apply(refl).expect("indices in range");
            word.push(refl);
        }
        (WeylWord(word), cur)
    }
}

impl Add for DivClass {
    type Output = DivClass;

    fn add(self, rhs: DivClass) -> DivClass {
        assert_eq!(self.r(), rhs.r(), "adding classes on different blow ups");
        DivClass {
            d: self.d + rhs.d,
            m: self.m.iter().zip(&rhs.m).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for DivClass {
    type Output = DivClass;

    fn sub(self, rhs: DivClass) -> DivClass {
        self + (-rhs)
    }
}

impl Neg for DivClass {
    type Output = DivClass;

    fn neg(self) -> DivClass {
        self.scale(-1)
    }
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.m.iter().map(|x| x.to_string()).collect();
        write!(f, "({}; {})", self.d, m.join(","))
    }
}

impl Serialize for DivClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut v = vec![self.d];
        v.extend_from_slice(&self.m);
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivClass {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(de)?;
        DivClass::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// A numerical type: degree plus multiplicities sorted non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumType {
    d: i64,
    m: Vec<i64>,
}

impl NumType {
    pub fn new(d: i64, mut m: Vec<i64>) -> Self {
        m.sort_unstable_by(|a, b| b.cmp(a));
        NumType { d, m }
    }

    pub fn degree(&self) -> i64 {
        self.d
    }

    pub fn mults(&self) -> &[i64] {
        &self.m
    }

    pub fn max_mult(&self) -> i64 {
        self.m.first().copied().unwrap_or(0)
    }

    pub fn to_class(&self) -> DivClass {
        DivClass {
            d: self.d,
            m: self.m.clone(),
        }
    }

    /// Drops trailing zero multiplicities, matching how published lists
    /// abbreviate types.
    pub fn trimmed(&self) -> Vec<i64> {
        let mut v = vec![self.d];
        v.extend_from_slice(&self.m);
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        v
    }

    /// Number of distinct orderings of the multiplicities, i.e. how many
    /// classes this type stands for.
    pub fn permutation_count(&self) -> u128 {
        let mut count: u128 = 1;
        let mut seen = 0u128;
        let mut i = 0;
        while i < self.m.len() {
            let mut j = i;
            while j < self.m.len() && self.m[j] == self.m[i] {
                j += 1;
            }
            for run in 1..=(j - i) as u128 {
                seen += 1;
                count = count * seen / run;
            }
            i = j;
        }
        count
    }
}

impl fmt::Display for NumType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_class())
    }
}

impl Serialize for NumType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_class().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NumType {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        Ok(DivClass::deserialize(de)?.num_type())
    }
}

/// Reflection generators; indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reflection {
    Swap(usize, usize),
    Quad(usize, usize, usize),
}

impl Reflection {
    fn check(&self, r: usize) -> Result<()> {
        let ok = match *self {
            Reflection::Swap(i, j) => i < r && j < r && i != j,
            Reflection::Quad(i, j, k) => i < j && j < k && k < r,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Index(format!("{self:?} on {r} points")))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ReflectionJson {
    op: String,
    idx: Vec<usize>,
}

impl Serialize for Reflection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match *self {
            Reflection::Swap(i, j) => ReflectionJson {
                op: "swap".into(),
                idx: vec![i + 1, j + 1],
            },
            Reflection::Quad(i, j, k) => ReflectionJson {
                op: "quad".into(),
                idx: vec![i + 1, j + 1, k + 1],
            },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Reflection {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = ReflectionJson::deserialize(de)?;
        if j.idx.contains(&0) {
            return Err(serde::de::Error::custom("indices are 1-based"));
        }
        match (j.op.as_str(), j.idx.as_slice()) {
            ("swap", &[i, k]) => Ok(Reflection::Swap(i - 1, k - 1)),
            ("quad", &[i, k, l]) => Ok(Reflection::Quad(i - 1, k - 1, l - 1)),
            _ => Err(serde::de::Error::custom(format!("bad reflection {:?}", j.op))),
        }
    }
}

/// Reflections applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeylWord(pub Vec<Reflection>);

impl WeylWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AscenziClass {
    NotAscenzi,
    Ascenzi { a: i64, b: i64 },
}

/// Classifies by the largest multiplicity `m`. A curve of positive degree
/// has points of multiplicity 1, so `m` is taken to be at least 1.
///
/// Ascenzi iff `d <= 2m + 1`; the splitting is then `(d - m, m)` when
/// `d <= 2m` and `(m, m + 1)` when `d = 2m + 1`.
pub fn ascenzi_classify(t: &NumType) -> AscenziClass {
    let d = t.degree();
    let m = t.max_mult().max(if d >= 1 { 1 } else { 0 });
    if d > 2 * m + 1 {
        AscenziClass::NotAscenzi
    } else if d <= 2 * m {
        AscenziClass::Ascenzi { a: d - m, b: m }
    } else {
        AscenziClass::Ascenzi { a: m, b: m + 1 }
    }
}

/// Upper bound `3j + floor(4 sqrt(4j + 8)) + 10` on the degree of an
/// exceptional class with `d - 2 m_1 <= j` on nine points.
pub fn ascenzi_degree_bound(j: i64) -> Result<i64> {
    let x = 4 * j + 8;
    if x < 0 {
        return Err(Error::Domain(format!("4j + 8 < 0 for j = {j}")));
    }
    // floor(4 sqrt(x)) = floor(sqrt(16 x)), computed exactly
    Ok(3 * j + isqrt(16 * x as u64) as i64 + 10)
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn quad_neighbours(t: &NumType) -> impl Iterator<Item = NumType> + '_ {
    let r = t.m.len();
    // on a sorted representative, triples differing only by swapping equal
    // entries give the same type; dedup happens in the caller's visited set
    (0..r).flat_map(move |i| {
        ((i + 1)..r).flat_map(move |j| {
            ((j + 1)..r).map(move |k| {
                t.to_class()
                    .apply(Reflection::Quad(i, j, k))
                    .expect("indices in range")
                    .num_type()
            })
        })
    })
}

/// All numerical types of exceptional classes on `r` points with degree at
/// most `dmax`, by closing the type of `E_1` under quadratic reflections.
///
/// For `r <= 8` the closure is finite and `dmax` may be `None`.
pub fn enum_exceptional(r: usize, dmax: Option<i64>) -> Result<BTreeSet<NumType>> {
    if !(3..=9).contains(&r) {
        return Err(Error::Domain(format!("r = {r} outside 3..=9")));
    }
    if r == 9 && dmax.is_none() {
        return Err(Error::Domain("r = 9 needs a degree cap".into()));
    }
    let seed = DivClass::exceptional(0, r).num_type();
    Ok(closure(seed, |t| dmax.is_none_or(|cap| t.d <= cap)))
}

fn closure(seed: NumType, keep: impl Fn(&NumType) -> bool) -> BTreeSet<NumType> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    if keep(&seed) {
        seen.insert(seed.clone());
        queue.push_back(seed);
    }
    while let Some(t) = queue.pop_front() {
        for n in quad_neighbours(&t) {
            if keep(&n) && !seen.contains(&n) {
                seen.insert(n.clone());
                queue.push_back(n);
            }
        }
    }
    seen
}

/// The Weyl group orbit of `d` as a set of numerical types.
///
/// For `r <= 8` the group is finite and no cap is needed; for `r >= 9` a cap
/// is mandatory and bounds `|d|`.
pub fn orbit_closure(d: &DivClass, dmax: Option<i64>) -> Result<BTreeSet<NumType>> {
    let r = d.r();
    if r >= 9 && dmax.is_none() {
        return Err(Error::Domain(format!("orbit on {r} points needs a degree cap")));
    }
    if r < 3 {
        // no quadratic reflections: the orbit is the permutation class
        return Ok([d.num_type()].into_iter().collect());
    }
    Ok(closure(d.num_type(), |t| dmax.is_none_or(|cap| t.d.abs() <= cap)))
}

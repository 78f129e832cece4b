//! Exact arithmetic in the Picard lattice of the blowup of the plane at ten
//! points.
//!
//! Classes live in the rank-11 lattice with basis `(H, E1, ..., E10)` and
//! intersection form `diag(1, -1, ..., -1)`. All arithmetic is checked
//! 64-bit: overflow panics, it never wraps.

use serde::{Deserialize, Serialize};
use std::fmt;

pub const NUM_POINTS: usize = 10;

/// A divisor class `h*H + sum_i e[i]*E_i`.
///
/// The classical view `dH - sum_i m_i E_i` is offered through
/// [`DivisorClass::from_deg_mults`] and [`DivisorClass::mults`]; storage is
/// always in the `(H, E)` basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub h: i64,
    pub e: [i64; NUM_POINTS],
}

/// Classes serialize as the 11-entry array `[h, e1, ..., e10]`.
impl Serialize for DivisorClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut v = [0i64; NUM_POINTS + 1];
        v[0] = self.h;
        v[1..].copy_from_slice(&self.e);
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <Vec<i64>>::deserialize(d)?;
        if v.len() != NUM_POINTS + 1 {
            return Err(serde::de::Error::invalid_length(v.len(), &"11 integers [h, e1..e10]"));
        }
        let mut e = [0i64; NUM_POINTS];
        e.copy_from_slice(&v[1..]);
        Ok(DivisorClass { h: v[0], e })
    }
}

#[inline]
fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("overflow in lattice arithmetic")
}

#[inline]
fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("overflow in lattice arithmetic")
}

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass { h: 0, e: [0; NUM_POINTS] };

    pub fn new(h: i64, e: [i64; NUM_POINTS]) -> Self {
        DivisorClass { h, e }
    }

    /// `dH - sum m_i E_i` in the classical plane-curve notation.
    pub fn from_deg_mults(d: i64, m: [i64; NUM_POINTS]) -> Self {
        DivisorClass { h: d, e: m.map(|x| x.checked_neg().expect("overflow in lattice arithmetic")) }
    }

    /// Homogeneous class `dH - m*(E1+...+E10)`.
    pub fn homogeneous(d: i64, m: i64) -> Self {
        Self::from_deg_mults(d, [m; NUM_POINTS])
    }

    /// The hyperplane class H.
    pub fn hyperplane() -> Self {
        DivisorClass { h: 1, e: [0; NUM_POINTS] }
    }

    /// The exceptional class `E_i` (1-based index).
    pub fn exceptional(i: usize) -> Self {
        assert!((1..=NUM_POINTS).contains(&i), "exceptional index out of range");
        let mut e = [0; NUM_POINTS];
        e[i - 1] = 1;
        DivisorClass { h: 0, e }
    }

    /// The canonical class `K = -3H + sum E_i`.
    pub fn canonical() -> Self {
        DivisorClass { h: -3, e: [1; NUM_POINTS] }
    }

    /// `D_i = -6H + 2*sum E_j - E_i` (1-based index).
    pub fn d_class(i: usize) -> Self {
        assert!((1..=NUM_POINTS).contains(&i), "D_i index out of range");
        let mut e = [2; NUM_POINTS];
        e[i - 1] = 1;
        DivisorClass { h: -6, e }
    }

    /// `F = -19H + 6*sum E_i`, the image of H under the reflection.
    pub fn f_class() -> Self {
        DivisorClass { h: -19, e: [6; NUM_POINTS] }
    }

    /// Degree in the `(d, m)` view (the H-coefficient).
    pub fn degree(&self) -> i64 {
        self.h
    }

    /// Multiplicities `m_i = -e_i` in the `(d, m)` view.
    pub fn mults(&self) -> [i64; NUM_POINTS] {
        self.e.map(|x| x.checked_neg().expect("overflow in lattice arithmetic"))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.e.iter().all(|&x| x == self.e[0])
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        let mut e = [0; NUM_POINTS];
        for i in 0..NUM_POINTS {
            e[i] = ck_add(self.e[i], other.e[i]);
        }
        DivisorClass { h: ck_add(self.h, other.h), e }
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass { h: ck_mul(self.h, k), e: self.e.map(|x| ck_mul(x, k)) }
    }

    /// Multiplicities sorted descending, as used by Cremona reduction.
    pub fn sorted_mults(&self) -> [i64; NUM_POINTS] {
        let mut m = self.mults();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    /// Canonical representative of the S10-orbit: multiplicities sorted
    /// descending. Step logs report classes in this form.
    pub fn canonical_form(&self) -> DivisorClass {
        DivisorClass::from_deg_mults(self.h, self.sorted_mults())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}H", self.h)?;
        if self.is_homogeneous() {
            let m = -self.e[0];
            if m != 0 {
                if m >= 0 {
                    write!(f, "-{m}*E")?;
                } else {
                    write!(f, "+{}*E", -m)?;
                }
            }
            return Ok(());
        }
        for (i, &c) in self.e.iter().enumerate() {
            let m = -c;
            if m > 0 {
                write!(f, "-{}E{}", m, i + 1)?;
            } else if m < 0 {
                write!(f, "+{}E{}", -m, i + 1)?;
            }
        }
        Ok(())
    }
}

/// The intersection form: `H.H = 1`, `E_i.E_j = -delta_ij`, `H.E_i = 0`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> i64 {
    let mut acc = ck_mul(a.h, b.h);
    for i in 0..NUM_POINTS {
        acc = ck_add(acc, ck_mul(a.e[i], b.e[i]).checked_neg().expect("overflow in lattice arithmetic"));
    }
    acc
}

/// Riemann-Roch: `chi(D) = 1 + (D.D - D.K) / 2`.
pub fn euler_char(d: &DivisorClass) -> i64 {
    let k = DivisorClass::canonical();
    let dd = intersect(d, d);
    let dk = intersect(d, &k);
    let num = ck_add(dd, dk.checked_neg().expect("overflow in lattice arithmetic"));
    assert!(num % 2 == 0, "D.D - D.K must be even on this lattice");
    ck_add(1, num / 2)
}

/// The lattice reflection sending `H -> F` and `E_i -> D_i`; it preserves
/// the intersection form, fixes K, and is an involution.
pub fn reflection_r(d: &DivisorClass) -> DivisorClass {
    let mut out = DivisorClass::f_class().scale(d.h);
    for i in 0..NUM_POINTS {
        out = out.add(&DivisorClass::d_class(i + 1).scale(d.e[i]));
    }
    out
}

/// A bijection of `{1..10}` acting on the exceptional classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    /// `map[i]` is the 0-based image of 0-based index `i`.
    map: [usize; NUM_POINTS],
}

impl Permutation {
    pub fn identity() -> Self {
        let mut map = [0; NUM_POINTS];
        for (i, slot) in map.iter_mut().enumerate() {
            *slot = i;
        }
        Permutation { map }
    }

    /// Build from 0-based images; fails unless it is a bijection.
    pub fn from_images(map: [usize; NUM_POINTS]) -> Option<Self> {
        let mut seen = [false; NUM_POINTS];
        for &img in &map {
            if img >= NUM_POINTS || seen[img] {
                return None;
            }
            seen[img] = true;
        }
        Some(Permutation { map })
    }

    /// The transposition of 1-based indices `i` and `j`.
    pub fn transposition(i: usize, j: usize) -> Self {
        let mut p = Self::identity();
        p.map.swap(i - 1, j - 1);
        p
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.map[i]
    }
}

/// `sigma(H) = H`, `sigma(E_i) = E_{sigma(i)}`.
pub fn permute(s: &Permutation, d: &DivisorClass) -> DivisorClass {
    let mut e = [0; NUM_POINTS];
    for i in 0..NUM_POINTS {
        e[s.apply_index(i)] = d.e[i];
    }
    DivisorClass { h: d.h, e }
}

/// One Cremona reduction step on the (1-based) indices `i, j, k`:
/// `d' = 2d - (m_i + m_j + m_k)`, `m_t' = d - (m_i + m_j + m_k) + m_t`
/// for `t` among the chosen indices. An isometry fixing K.
pub fn cremona_step(d: &DivisorClass, i: usize, j: usize, k: usize) -> DivisorClass {
    assert!(i != j && j != k && i != k, "cremona_step needs distinct indices");
    for idx in [i, j, k] {
        assert!((1..=NUM_POINTS).contains(&idx), "cremona_step index out of range");
    }
    let mut m = d.mults();
    let deg = d.degree();
    let s = ck_add(ck_add(m[i - 1], m[j - 1]), m[k - 1]);
    let shift = ck_add(deg, s.checked_neg().expect("overflow in lattice arithmetic"));
    for idx in [i, j, k] {
        m[idx - 1] = ck_add(shift, m[idx - 1]);
    }
    DivisorClass::from_deg_mults(ck_add(deg, shift), m)
}

/// One entry in a Cremona reduction log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionStep {
    /// A Cremona step was applied on the three largest multiplicities;
    /// the class is recorded in multiplicity-sorted canonical form.
    Cremona { result: DivisorClass },
    /// Negative multiplicities produced by a step were clamped to zero.
    Clamp { result: DivisorClass },
}

impl ReductionStep {
    pub fn class(&self) -> &DivisorClass {
        match self {
            ReductionStep::Cremona { result } | ReductionStep::Clamp { result } => result,
        }
    }
}

/// Outcome of [`cremona_reduce`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub result: DivisorClass,
    pub log: Vec<ReductionStep>,
    /// True when the loop stopped because the next step would make the
    /// degree negative (so the linear system is empty, the Cremona image
    /// being a class of negative degree).
    pub stuck_negative: bool,
}

/// Iterated Cremona reduction on the three largest multiplicities.
///
/// Ties among multiplicities are broken towards the lowest indices, and the
/// class is re-sorted to canonical (descending-multiplicity) form after each
/// step, so the log is deterministic. Negative multiplicities appearing
/// after a step are clamped to zero and logged: a `+kE_i` summand does not
/// change `h^0`. The loop stops once the three largest multiplicities no
/// longer exceed the degree, or when the next step would drive the degree
/// negative.
pub fn cremona_reduce(d: &DivisorClass) -> Reduction {
    let mut cur = d.canonical_form();
    let mut log = Vec::new();
    loop {
        let m = cur.mults();
        let deg = cur.degree();
        let s = m[0] + m[1] + m[2];
        if s <= deg {
            return Reduction { result: cur, log, stuck_negative: false };
        }
        if 2 * deg - s < 0 {
            return Reduction { result: cur, log, stuck_negative: true };
        }
        let stepped = cremona_step(&cur, 1, 2, 3).canonical_form();
        log.push(ReductionStep::Cremona { result: stepped });
        cur = stepped;
        if cur.mults().iter().any(|&x| x < 0) {
            let clamped = DivisorClass::from_deg_mults(
                cur.degree(),
                cur.mults().map(|x| x.max(0)),
            )
            .canonical_form();
            log.push(ReductionStep::Clamp { result: clamped });
            cur = clamped;
        }
    }
}

/// The formal sum of a class over all of S10:
/// `aH - sum b_i E_i  ->  10!*a H - 9!*(sum b_j) * sum E_i`.
pub fn symmetrize_full(d: &DivisorClass) -> DivisorClass {
    const FACT_10: i64 = 3_628_800;
    const FACT_9: i64 = 362_880;
    let msum: i64 = d.mults().iter().try_fold(0i64, |acc, &x| acc.checked_add(x))
        .expect("overflow in lattice arithmetic");
    DivisorClass::from_deg_mults(ck_mul(FACT_10, d.degree()), [ck_mul(FACT_9, msum); NUM_POINTS])
}

//! Graded dimensions of Hom-spaces between line bundles, skyscraper
//! sheaves, and pushforwards of generic line bundles on curves in `|-nF|`.
//!
//! Answers involving a curve sheaf encode "for a generic line bundle L";
//! the self-extension dimensions of the curve object are left as the
//! symbolic parameters `ext1`, `ext2`, constrained by
//! `ext1 - ext2 = n^2 + 1`.

use crate::picard::{euler_char, intersect, DivisorClass};
use crate::systems::{decide, h2_vanishes, VerdictKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectSpec {
    LineBundle(DivisorClass),
    Skyscraper(String),
    CurveSheaf { n: i64, genus: i64, degree: i64 },
}

impl ObjectSpec {
    pub fn line(class: DivisorClass) -> Self {
        ObjectSpec::LineBundle(class)
    }

    pub fn sky(label: impl Into<String>) -> Self {
        ObjectSpec::Skyscraper(label.into())
    }

    /// `iota_* L` for a smooth curve in `|-nF|` with `L` generic of degree
    /// `g - 1`; the genus comes from the adjunction formula for `-nF`.
    pub fn curve(n: i64) -> Self {
        assert!(n >= 3, "curve sheaves need n >= 3");
        let genus = curve_genus(n);
        ObjectSpec::CurveSheaf { n, genus, degree: genus - 1 }
    }
}

/// Genus of a smooth member of `|-nF|`: `(n^2 + 3n + 2) / 2`.
pub fn curve_genus(n: i64) -> i64 {
    (n * n + 3 * n + 2) / 2
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomError {
    #[error("linear system for {0} is undecidable")]
    Undecidable(DivisorClass),
    #[error("unsupported object pair: {0}")]
    Unsupported(String),
}

/// One graded entry, linear in the symbolic parameters ext1 and ext2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Entry {
    pub c: i64,
    pub ext1: i64,
    pub ext2: i64,
}

impl Entry {
    pub const ZERO: Entry = Entry { c: 0, ext1: 0, ext2: 0 };

    pub fn num(c: i64) -> Entry {
        Entry { c, ext1: 0, ext2: 0 }
    }

    pub fn is_zero(&self) -> bool {
        *self == Entry::ZERO
    }

    pub fn is_numeric(&self) -> bool {
        self.ext1 == 0 && self.ext2 == 0
    }

    pub fn add(&self, o: &Entry) -> Entry {
        Entry { c: self.c + o.c, ext1: self.ext1 + o.ext1, ext2: self.ext2 + o.ext2 }
    }

    pub fn scale(&self, k: i64) -> Entry {
        Entry { c: self.c * k, ext1: self.ext1 * k, ext2: self.ext2 * k }
    }

    /// Product of dimension counts; fails when both factors are symbolic
    /// (the result would be quadratic in the parameters).
    pub fn mul(&self, o: &Entry) -> Result<Entry, HomError> {
        if self.is_numeric() {
            return Ok(o.scale(self.c));
        }
        if o.is_numeric() {
            return Ok(self.scale(o.c));
        }
        Err(HomError::Unsupported("product of two parametric entries".into()))
    }

    /// Whether the entry vanishes identically once `ext1 = ext2 + n^2 + 1`
    /// is substituted.
    pub fn vanishes_under_constraint(&self, n: i64) -> bool {
        self.ext1 + self.ext2 == 0 && self.c + self.ext1 * (n * n + 1) == 0
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_numeric() {
            return write!(f, "{}", self.c);
        }
        let mut out = String::new();
        if self.c != 0 {
            out.push_str(&self.c.to_string());
        }
        for (coeff, name) in [(self.ext1, "ext1"), (self.ext2, "ext2")] {
            if coeff == 0 {
                continue;
            }
            if coeff > 0 && !out.is_empty() {
                out.push('+');
            }
            match coeff {
                1 => {}
                -1 => out.push('-'),
                c => {
                    out.push_str(&c.to_string());
                    out.push('*');
                }
            }
            out.push_str(name);
        }
        f.write_str(&out)
    }
}

impl Serialize for Entry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_numeric() {
            s.serialize_i64(self.c)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

/// Finitely supported map from cohomological degree to [`Entry`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedDim(pub BTreeMap<i32, Entry>);

impl GradedDim {
    pub fn zero() -> GradedDim {
        GradedDim(BTreeMap::new())
    }

    pub fn from_pairs(pairs: &[(i32, i64)]) -> GradedDim {
        let mut g = GradedDim::zero();
        for &(deg, c) in pairs {
            g.insert(deg, Entry::num(c));
        }
        g
    }

    pub fn insert(&mut self, deg: i32, e: Entry) {
        if !e.is_zero() {
            let slot = self.0.entry(deg).or_default();
            *slot = slot.add(&e);
            if slot.is_zero() {
                self.0.remove(&deg);
            }
        }
    }

    pub fn get(&self, deg: i32) -> Entry {
        self.0.get(&deg).copied().unwrap_or(Entry::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &GradedDim) -> GradedDim {
        let mut out = self.clone();
        for (&d, e) in &o.0 {
            out.insert(d, *e);
        }
        out
    }

    pub fn shift(&self, by: i32) -> GradedDim {
        GradedDim(self.0.iter().map(|(&d, &e)| (d + by, e)).collect())
    }

    /// Graded tensor-product dimensions (convolution).
    pub fn convolve(&self, o: &GradedDim) -> Result<GradedDim, HomError> {
        let mut out = GradedDim::zero();
        for (&d1, e1) in &self.0 {
            for (&d2, e2) in &o.0 {
                out.insert(d1 + d2, e1.mul(e2)?);
            }
        }
        Ok(out)
    }

    /// `sum (-1)^deg entry`.
    pub fn alternating_sum(&self) -> Entry {
        let mut acc = Entry::ZERO;
        for (&d, e) in &self.0 {
            acc = acc.add(&e.scale(if d.rem_euclid(2) == 0 { 1 } else { -1 }));
        }
        acc
    }
}

/// `h^0` and `h^1` of a generic line bundle of degree `e` on a smooth
/// genus-`g` curve: no sections below degree `g`, non-special above.
pub fn generic_line_bundle_h(g: i64, e: i64) -> (i64, i64) {
    assert!(g >= 0, "genus must be nonnegative");
    let h0 = (e + 1 - g).max(0);
    let h1 = h0 - (e + 1 - g);
    (h0, h1)
}

/// `D . C` for `C` a member of `|-nF|`.
pub fn curve_intersection_degree(d: &DivisorClass, n: i64) -> i64 {
    -n * intersect(d, &DivisorClass::f_class())
}

fn line_h0(d: &DivisorClass) -> Result<i64, HomError> {
    match decide(d).kind {
        VerdictKind::Empty => Ok(0),
        VerdictKind::Dim(k) => Ok(k + 1),
        VerdictKind::Unknown => Err(HomError::Undecidable(*d)),
    }
}

fn memo() -> &'static RwLock<HashMap<DivisorClass, (i64, i64, i64)>> {
    static MEMO: OnceLock<RwLock<HashMap<DivisorClass, (i64, i64, i64)>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `(h0, h1, h2)` of a line bundle `O(D)`, memoized. Safe for concurrent
/// readers; concurrent inserts are idempotent because the value is a pure
/// function of the class.
pub fn line_cohomology(d: &DivisorClass) -> Result<(i64, i64, i64), HomError> {
    if let Some(hit) = memo().read().expect("memo poisoned").get(d) {
        return Ok(*hit);
    }
    let h0 = line_h0(d)?;
    let h2 = if h2_vanishes(d) {
        0
    } else {
        line_h0(&DivisorClass::canonical().sub(d))?
    };
    let h1 = h0 + h2 - euler_char(d);
    assert!(h1 >= 0, "negative h1 for {d}: decision rules are inconsistent");
    let triple = (h0, h1, h2);
    memo().write().expect("memo poisoned").insert(*d, triple);
    Ok(triple)
}

/// Graded Hom dimensions between two objects.
pub fn hom(a: &ObjectSpec, b: &ObjectSpec) -> Result<GradedDim, HomError> {
    use ObjectSpec::*;
    match (a, b) {
        (LineBundle(x), LineBundle(y)) => {
            let (h0, h1, h2) = line_cohomology(&y.sub(x))?;
            Ok(GradedDim::from_pairs(&[(0, h0), (1, h1), (2, h2)]))
        }
        (LineBundle(_), Skyscraper(_)) => Ok(GradedDim::from_pairs(&[(0, 1)])),
        (Skyscraper(_), LineBundle(_)) => Ok(GradedDim::from_pairs(&[(2, 1)])),
        (Skyscraper(x), Skyscraper(y)) => {
            if x == y {
                Ok(GradedDim::from_pairs(&[(0, 1), (1, 2), (2, 1)]))
            } else {
                Ok(GradedDim::zero())
            }
        }
        (LineBundle(x), CurveSheaf { n, genus, degree }) => {
            // Hom*(O(D), iota_* L) = H*(C, L(-D.C))
            let e = degree - curve_intersection_degree(x, *n);
            let (h0, h1) = generic_line_bundle_h(*genus, e);
            Ok(GradedDim::from_pairs(&[(0, h0), (1, h1)]))
        }
        (CurveSheaf { n, genus, degree }, LineBundle(y)) => {
            // Serre duality: Hom^k(iota_* L, O(D)) = Hom^{2-k}(O(D), iota_*(L) tensor omega)^*
            let twist = DivisorClass::canonical().sub(y);
            let e = degree + curve_intersection_degree(&twist, *n);
            let (h0, h1) = generic_line_bundle_h(*genus, e);
            Ok(GradedDim::from_pairs(&[(2, h0), (1, h1)]))
        }
        (CurveSheaf { .. }, CurveSheaf { .. }) => {
            let mut g = GradedDim::zero();
            g.insert(0, Entry::num(1));
            g.insert(1, Entry { c: 0, ext1: 1, ext2: 0 });
            g.insert(2, Entry { c: 0, ext1: 0, ext2: 1 });
            Ok(g)
        }
        _ => Err(HomError::Unsupported(format!("{a:?} / {b:?}"))),
    }
}

/// `a tensor omega` at the class level; skyscrapers are fixed by the twist.
pub fn twist_by_canonical(a: &ObjectSpec) -> Result<ObjectSpec, HomError> {
    match a {
        ObjectSpec::LineBundle(x) => Ok(ObjectSpec::LineBundle(x.add(&DivisorClass::canonical()))),
        ObjectSpec::Skyscraper(l) => Ok(ObjectSpec::Skyscraper(l.clone())),
        ObjectSpec::CurveSheaf { .. } => {
            Err(HomError::Unsupported("canonical twist of a curve sheaf".into()))
        }
    }
}

//! The composition table on Hom^1 of the projected skyscraper, the hull's
//! quadratic generators, the quadratic-order dimension bound, and the
//! special-locus classification.
//!
//! Basis conventions: T^1 has basis {s1, s2, b1, ..., b12}; T^2 has the
//! 78-element basis {xi_i xi_j : 1 <= i < j <= 13}. The products
//! {b_i^2, b_i b_j}_{i<j} form a second basis of T^2.
//!
//! The source text contains "xi_0^2" in the expansion of b_i^2 where
//! context calls for xi_13^2; we record the reading here and use xi_13^2
//! (which cancels in the displayed computation either way).

use crate::picard::DivisorClass;
use crate::systems::{decide, enumerate_split_cases, CaseConstraint, SystemVerdict, VerdictKind};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub const NUM_B: usize = 12;
/// dim T^2 = C(13, 2).
pub const T2_DIM: usize = 78;

/// Basis label of T^1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T1Label {
    S(u8),
    B(u8),
}

impl T1Label {
    pub fn s(i: u8) -> T1Label {
        assert!((1..=2).contains(&i), "s index out of range");
        T1Label::S(i)
    }

    pub fn b(i: u8) -> T1Label {
        assert!((1..=NUM_B as u8).contains(&i), "b index out of range");
        T1Label::B(i)
    }
}

/// Index of xi_i xi_j (1 <= i < j <= 13) in the T^2 coordinate vector.
pub fn xi_index(i: usize, j: usize) -> usize {
    assert!(1 <= i && i < j && j <= 13, "xi pair out of range");
    // pairs ordered (1,2), (1,3), ..., (1,13), (2,3), ...
    let skipped: usize = (0..i - 1).map(|k| 12 - k).sum();
    skipped + (j - i - 1)
}

/// Integer vector over the xi_i xi_j basis of T^2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T2Vec(pub Vec<i64>);

impl T2Vec {
    pub fn zero() -> T2Vec {
        T2Vec(vec![0; T2_DIM])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, o: &T2Vec) -> T2Vec {
        T2Vec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> T2Vec {
        T2Vec(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for T2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 1..=13 {
            for j in (i + 1)..=13 {
                let c = self.0[xi_index(i, j)];
                if c == 0 {
                    continue;
                }
                if !first && c > 0 {
                    write!(f, "+")?;
                }
                first = false;
                match c {
                    1 => {}
                    -1 => write!(f, "-")?,
                    _ => write!(f, "{c}*")?,
                }
                write!(f, "xi{i}xi{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The composition product on T^1: s-directions annihilate everything
/// (including s_i s_j, which the source leaves unstated), and the
/// b-products expand through b_i = xi_i - xi_13 with xi_i xi_j nonzero
/// only for i < j.
pub fn product(u: T1Label, v: T1Label) -> T2Vec {
    let mut out = T2Vec::zero();
    let (i, j) = match (u, v) {
        (T1Label::S(_), _) | (_, T1Label::S(_)) => return out,
        (T1Label::B(i), T1Label::B(j)) => (i as usize, j as usize),
    };
    if i < j {
        // b_i b_j = xi_i xi_j - xi_i xi_13
        out.0[xi_index(i, j)] += 1;
        out.0[xi_index(i, 13)] -= 1;
    } else if i == j {
        // b_i^2 = -xi_i xi_13
        out.0[xi_index(i, 13)] -= 1;
    } else {
        // b_j b_i = -xi_j xi_13 (= b_j^2) for i < j, reading (u,v) = (b_j, b_i)
        out.0[xi_index(i, 13)] -= 1;
    }
    out
}

/// A formal integer combination of T^1 basis labels.
pub type FormalT1 = Vec<(i64, T1Label)>;

/// Bilinear extension of [`product`].
pub fn product_formal(u: &FormalT1, v: &FormalT1) -> T2Vec {
    let mut out = T2Vec::zero();
    for &(cu, lu) in u {
        for &(cv, lv) in v {
            out = out.add(&product(lu, lv).scale(cu * cv));
        }
    }
    out
}

/// Index of the b-product basis vector: 0..12 are b_1^2..b_12^2, then
/// b_i b_j for i < j in lexicographic order.
pub fn bprod_index(i: usize, j: usize) -> usize {
    assert!(1 <= i && i <= j && j <= NUM_B, "b-product pair out of range");
    if i == j {
        return i - 1;
    }
    let skipped: usize = (0..i - 1).map(|k| NUM_B - 1 - k).sum();
    NUM_B + skipped + (j - i - 1)
}

/// Rewrite a T^2 vector from xi coordinates to the {b_i^2, b_i b_j} basis.
/// Uses xi_i xi_j = b_i b_j - b_i^2 (i < j <= 12) and xi_i xi_13 = -b_i^2.
pub fn to_bprod_basis(v: &T2Vec) -> Vec<i64> {
    let mut out = vec![0i64; T2_DIM];
    for i in 1..=NUM_B {
        for j in (i + 1)..=NUM_B {
            let c = v.0[xi_index(i, j)];
            out[bprod_index(i, j)] += c;
            out[bprod_index(i, i)] -= c;
        }
        out[bprod_index(i, i)] -= v.0[xi_index(i, 13)];
    }
    out
}

/// A quadratic form with integer coefficients in the hull variables
/// y0, y1, x1..x12; keys are variable-id pairs (a <= b) with ids
/// 0, 1 for y0, y1 and 2..=13 for x1..x12.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Quadric(pub BTreeMap<(u8, u8), i64>);

impl Quadric {
    pub fn insert(&mut self, a: u8, b: u8, c: i64) {
        if c == 0 {
            return;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        let slot = self.0.entry(key).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.0.remove(&key);
        }
    }

    pub fn uses_only_x(&self) -> bool {
        self.0.keys().all(|&(a, b)| a >= 2 && b >= 2)
    }
}

fn var_name(id: u8) -> String {
    match id {
        0 => "y0".into(),
        1 => "y1".into(),
        v => format!("x{}", v - 1),
    }
}

impl fmt::Display for Quadric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&(a, b), &c) in &self.0 {
            if !first && c > 0 {
                write!(f, "+")?;
            }
            first = false;
            match c {
                1 => {}
                -1 => write!(f, "-")?,
                _ => write!(f, "{c}*")?,
            }
            if a == b {
                write!(f, "{}^2", var_name(a))?;
            } else {
                write!(f, "{}*{}", var_name(a), var_name(b))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Generators of the hull's quadratic ideal; all homogeneous of degree 2
/// in the x-variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadricIdeal {
    pub generators: Vec<Quadric>,
}

const X0: u8 = 2; // variable id of x1

/// Images f_i, f_{i,j} of the dual basis of T^2 (dual to {b_i^2, b_i b_j})
/// under the symmetrized product map t t' -> t o t' + t' o t:
/// f_i = 2 x_i^2 + sum_{k<i} x_k x_i and f_{i,j} = x_i x_j.
///
/// The cross-term sum runs over k < i: the map sends b_k b_i (k < i) to
/// b_i^2 + b_k b_i, so every earlier index feeds the b_i^2 coordinate.
pub fn hull_quadrics() -> QuadricIdeal {
    let mut generators = Vec::with_capacity(T2_DIM);
    for i in 1..=NUM_B {
        let mut q = Quadric::default();
        let xi = X0 + (i as u8) - 1;
        q.insert(xi, xi, 2);
        for k in 1..i {
            q.insert(X0 + (k as u8) - 1, xi, 1);
        }
        generators.push(q);
    }
    for i in 1..=NUM_B {
        for j in (i + 1)..=NUM_B {
            let mut q = Quadric::default();
            q.insert(X0 + (i as u8) - 1, X0 + (j as u8) - 1, 1);
            generators.push(q);
        }
    }
    QuadricIdeal { generators }
}

/// Independent route: assemble the same quadrics from the product table.
/// For each Sym^2(T^1) basis vector b_k b_l compute its symmetrized image
/// in the b-product basis, then read the dual pairings off as quadric
/// coefficients.
pub fn hull_quadrics_assembled() -> QuadricIdeal {
    // images[(k,l)] = coordinates of b_k o b_l + b_l o b_k (k < l),
    // or of 2 b_k o b_k (k = l), in the b-product basis
    let mut coeffs = vec![Quadric::default(); T2_DIM];
    for k in 1..=NUM_B {
        for l in k..=NUM_B {
            let u = T1Label::b(k as u8);
            let v = T1Label::b(l as u8);
            let image = if k == l {
                product(u, v).scale(2)
            } else {
                product(u, v).add(&product(v, u))
            };
            let image_b = to_bprod_basis(&image);
            for (w, &c) in image_b.iter().enumerate() {
                coeffs[w].insert(X0 + (k as u8) - 1, X0 + (l as u8) - 1, c);
            }
        }
    }
    // order to match hull_quadrics(): the 12 f_i then the 66 f_{i,j}
    let mut generators = Vec::with_capacity(T2_DIM);
    for i in 1..=NUM_B {
        generators.push(coeffs[bprod_index(i, i)].clone());
    }
    for i in 1..=NUM_B {
        for j in (i + 1)..=NUM_B {
            generators.push(coeffs[bprod_index(i, j)].clone());
        }
    }
    QuadricIdeal { generators }
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination
/// in 128-bit arithmetic; overflow panics rather than wrapping.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> =
        rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    let mut prev: i128 = 1;
    let mut row = 0;
    for col in 0..ncols {
        let Some(pivot) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pivot);
        for r in (row + 1)..m.len() {
            for c in (col + 1)..ncols {
                let num = m[row][col]
                    .checked_mul(m[r][c])
                    .and_then(|a| m[r][col].checked_mul(m[row][c]).map(|b| a - b))
                    .expect("overflow in exact elimination");
                m[r][c] = num / prev;
            }
            m[r][col] = 0;
        }
        prev = m[row][col];
        rank += 1;
        row += 1;
        if row == m.len() {
            break;
        }
    }
    rank
}

fn quadric_row(q: &Quadric) -> Vec<i64> {
    // columns: x-monomials x_k x_l (k <= l), then y0^2, y0 y1, y1^2
    let mut row = vec![0i64; T2_DIM + 3];
    for (&(a, b), &c) in &q.0 {
        if a >= 2 && b >= 2 {
            row[bprod_index((a - X0 + 1) as usize, (b - X0 + 1) as usize)] = c;
        } else if a < 2 && b < 2 {
            row[T2_DIM + (a + b) as usize] = c;
        } else {
            panic!("mixed x/y monomial in hull quadric");
        }
    }
    row
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HullReport {
    /// Rank of the 78 product vectors {b_i^2, b_i b_j} in T^2.
    pub product_rank: usize,
    /// Rank of the quadric coefficient matrix over the degree-2 monomials.
    pub quadric_rank: usize,
    pub all_x_monomials_in_span: bool,
    pub y0_y1_in_span: bool,
    pub surviving_directions: Vec<String>,
    pub pass: bool,
}

/// The quadratic-order dimension bound: the quadric span contains every
/// x_i x_j, no y-monomials, so the x-directions are obstructed at order 2
/// and exactly {y0, y1} survive.
pub fn quadratic_dimension_bound() -> HullReport {
    let mut product_rows = Vec::with_capacity(T2_DIM);
    for i in 1..=NUM_B {
        product_rows.push(product(T1Label::b(i as u8), T1Label::b(i as u8)).0);
    }
    for i in 1..=NUM_B {
        for j in (i + 1)..=NUM_B {
            product_rows.push(product(T1Label::b(i as u8), T1Label::b(j as u8)).0);
        }
    }
    let product_rank = exact_rank(&product_rows);

    let ideal = hull_quadrics();
    let rows: Vec<Vec<i64>> = ideal.generators.iter().map(quadric_row).collect();
    let quadric_rank = exact_rank(&rows);

    // span contains a monomial iff adjoining it does not raise the rank
    let mut all_x = true;
    for i in 1..=NUM_B {
        for j in i..=NUM_B {
            let mut probe = vec![0i64; T2_DIM + 3];
            probe[bprod_index(i, j)] = 1;
            let mut with = rows.clone();
            with.push(probe);
            if exact_rank(&with) != quadric_rank {
                all_x = false;
            }
        }
    }
    let mut probe = vec![0i64; T2_DIM + 3];
    probe[T2_DIM + 1] = 1; // y0 y1
    let mut with = rows.clone();
    with.push(probe);
    let y0_y1_in_span = exact_rank(&with) == quadric_rank;

    let pass = product_rank == T2_DIM && quadric_rank == T2_DIM && all_x && !y0_y1_in_span;
    HullReport {
        product_rank,
        quadric_rank,
        all_x_monomials_in_span: all_x,
        y0_y1_in_span,
        surviving_directions: vec!["y0".into(), "y1".into()],
        pass,
    }
}

/// One candidate base-locus component in a special-locus system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: (i64, i64, i64),
    pub component: DivisorClass,
    pub component_verdict: SystemVerdict,
    pub complement: DivisorClass,
    pub complement_verdict: SystemVerdict,
    /// True when the component or its complement is certified empty.
    pub refuted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemReport {
    pub name: String,
    pub total: DivisorClass,
    pub cases: Vec<CaseReport>,
    pub all_refuted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialLocusReport {
    /// The ten classes -K + E_i with their Dim(0) verdicts.
    pub divisorial: Vec<(DivisorClass, SystemVerdict)>,
    pub systems: Vec<SystemReport>,
    pub pass: bool,
}

fn case_class(total_mp_index: usize, d: i64, m: i64, mp: i64) -> DivisorClass {
    let mut mults = [m; 10];
    mults[total_mp_index] += mp;
    DivisorClass::from_deg_mults(d, mults)
}

fn run_system(name: &str, total: DivisorClass, constraint: &CaseConstraint) -> SystemReport {
    let cases = enumerate_split_cases(constraint);
    let mut reports = Vec::with_capacity(cases.len());
    for (d, m, mp) in cases {
        let component = case_class(0, d, m, mp);
        let complement = total.sub(&component);
        let component_verdict = decide(&component);
        let complement_verdict = decide(&complement);
        let refuted = component_verdict.kind == VerdictKind::Empty
            || complement_verdict.kind == VerdictKind::Empty;
        reports.push(CaseReport {
            case: (d, m, mp),
            component,
            component_verdict,
            complement,
            complement_verdict,
            refuted,
        });
    }
    let all_refuted = reports.iter().all(|c| c.refuted);
    SystemReport { name: name.into(), total, cases: reports, all_refuted }
}

/// Classify the special locus: the ten anticanonical-plus-exceptional
/// classes carry the unique divisors; every split case of the remaining
/// candidate systems is refuted with a trace.
pub fn special_locus_report() -> SpecialLocusReport {
    let k = DivisorClass::canonical();
    let f = DivisorClass::f_class();
    let mut divisorial = Vec::new();
    let mut pass = true;
    for i in 1..=10 {
        let class = k.scale(-1).add(&DivisorClass::exceptional(i));
        let verdict = decide(&class);
        pass &= verdict.kind == VerdictKind::Dim(0);
        divisorial.push((class, verdict));
    }

    let mut systems = Vec::new();
    // |K - F| = |16H - 5*E|: the slope scan leaves nothing
    let kf = k.sub(&f);
    systems.push(run_system("K-F", kf, &CaseConstraint::homogeneous_split(16, 5, 0..=16, 0..=5)));
    // |K - 2F| = |35H - 11*E|
    let k2f = k.sub(&f.scale(2));
    systems.push(run_system(
        "K-2F",
        k2f,
        &CaseConstraint::homogeneous_split(35, 11, 0..=35, 0..=11),
    ));
    // |K - F + D_i| = |10H - 3*E - E_i|
    let kfd = kf.add(&DivisorClass::d_class(1));
    systems.push(run_system(
        "K-F+D_i",
        kfd,
        &CaseConstraint::distinguished_split(10, 3, 1, 0..=5, 0..=3, 0..=4),
    ));
    // |K - 2F + D_i| = |29H - 9*E - E_i|, scanned over the full half-degree box
    let k2fd = k2f.add(&DivisorClass::d_class(1));
    systems.push(run_system(
        "K-2F+D_i",
        k2fd,
        &CaseConstraint::distinguished_split(29, 9, 1, 0..=14, 0..=9, 0..=10),
    ));

    pass &= systems.iter().all(|s| s.all_refuted);
    SpecialLocusReport { divisorial, systems, pass }
}

/// The effectiveness criterion for a composition through collection slots
/// i < j: the class of E_j^dual tensor E_i tensor omega and its verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionCheck {
    pub class: DivisorClass,
    pub verdict: SystemVerdict,
}

pub fn composition_criterion(a_i: &DivisorClass, a_j: &DivisorClass) -> CompositionCheck {
    let class = a_i.sub(a_j).add(&DivisorClass::canonical());
    let verdict = decide(&class);
    CompositionCheck { class, verdict }
}

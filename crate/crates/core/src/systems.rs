//! Sound decision procedures for emptiness and dimension of linear systems
//! `|dH - sum m_i E_i|` at general points.
//!
//! The decision cascade is organized as an ordered registry of named rules
//! implementing [`DecisionRule`]; each rule may decide the system, rewrite
//! the class (recording the rewrite in the trace), or pass. The default
//! registry order is normative for traces: clamp, degree sign, Cremona
//! reduction, degree sign again, Cremona-image sign, homogeneous slopes,
//! standard form. `Unknown` is a legitimate fallback, never an error: the
//! module refuses to guess dimensions the rules cannot certify.

use crate::picard::{cremona_reduce, euler_char, DivisorClass, ReductionStep, NUM_POINTS};
use serde::{Deserialize, Serialize};
use std::ops::RangeInclusive;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Empty,
    /// `dim |D| = k >= 0`; certified non-special, so `k = chi - 1`.
    Dim(i64),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub class: DivisorClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemVerdict {
    pub kind: VerdictKind,
    pub trace: Vec<TraceStep>,
}

impl SystemVerdict {
    pub fn is_empty(&self) -> bool {
        self.kind == VerdictKind::Empty
    }

    pub fn dim(&self) -> Option<i64> {
        match self.kind {
            VerdictKind::Dim(k) => Some(k),
            _ => None,
        }
    }

    /// Projective dimension as the oracle reports it: -1 for empty.
    pub fn projective_dim(&self) -> Option<i64> {
        match self.kind {
            VerdictKind::Empty => Some(-1),
            VerdictKind::Dim(k) => Some(k),
            VerdictKind::Unknown => None,
        }
    }
}

/// What a single rule did with the current class.
pub enum RuleOutcome {
    Decided(VerdictKind),
    /// Class rewritten without changing `h^0`; cascade continues.
    Rewritten(DivisorClass),
    Pass,
}

/// One named step of the decision cascade. Rules must be sound at general
/// points: `Decided` verdicts are only returned when the rule's hypothesis
/// holds exactly.
pub trait DecisionRule: Sync {
    fn name(&self) -> &'static str;
    fn apply(&self, class: &DivisorClass, trace: &mut Vec<TraceStep>) -> RuleOutcome;
}

fn chi_verdict(class: &DivisorClass) -> VerdictKind {
    let chi = euler_char(class);
    if chi >= 1 {
        VerdictKind::Dim(chi - 1)
    } else {
        VerdictKind::Empty
    }
}

/// A `+kE_i` summand (negative multiplicity) splits off the exceptional
/// base locus without changing `h^0`; drop it.
struct ClampNegativeMults;

impl DecisionRule for ClampNegativeMults {
    fn name(&self) -> &'static str {
        "clamp-negative-multiplicities"
    }

    fn apply(&self, class: &DivisorClass, _trace: &mut Vec<TraceStep>) -> RuleOutcome {
        if class.mults().iter().any(|&m| m < 0) {
            let clamped = DivisorClass::from_deg_mults(class.degree(), class.mults().map(|m| m.max(0)));
            RuleOutcome::Rewritten(clamped)
        } else {
            RuleOutcome::Pass
        }
    }
}

/// A class with negative H-degree has no effective representative: its
/// pushforward would be a plane curve of negative degree.
struct NegativeDegree;

impl DecisionRule for NegativeDegree {
    fn name(&self) -> &'static str {
        "negative-degree"
    }

    fn apply(&self, class: &DivisorClass, _trace: &mut Vec<TraceStep>) -> RuleOutcome {
        if class.degree() < 0 {
            RuleOutcome::Decided(VerdictKind::Empty)
        } else {
            RuleOutcome::Pass
        }
    }
}

/// Dimension-preserving Cremona reduction; every step lands in the trace.
struct CremonaReduce;

impl DecisionRule for CremonaReduce {
    fn name(&self) -> &'static str {
        "cremona-reduce"
    }

    fn apply(&self, class: &DivisorClass, trace: &mut Vec<TraceStep>) -> RuleOutcome {
        let red = cremona_reduce(class);
        if red.log.is_empty() {
            return RuleOutcome::Pass;
        }
        for step in &red.log {
            let rule = match step {
                ReductionStep::Cremona { .. } => "cremona-step",
                ReductionStep::Clamp { .. } => "clamp-negative-multiplicities",
            };
            trace.push(TraceStep { rule: rule.to_string(), class: *step.class() });
        }
        RuleOutcome::Rewritten(red.result)
    }
}

/// If the three largest multiplicities still exceed twice the degree, the
/// next Cremona image would have negative degree, so the system is empty.
struct CremonaImageNegative;

impl DecisionRule for CremonaImageNegative {
    fn name(&self) -> &'static str {
        "cremona-image-negative"
    }

    fn apply(&self, class: &DivisorClass, _trace: &mut Vec<TraceStep>) -> RuleOutcome {
        let m = class.sorted_mults();
        if m[0] + m[1] + m[2] > 2 * class.degree() {
            RuleOutcome::Decided(VerdictKind::Empty)
        } else {
            RuleOutcome::Pass
        }
    }
}

/// Slope rules for homogeneous classes `dH - m*sum E_i` with `m >= 1`:
/// empty below slope 2280/721, non-special at or above slope 174/55.
struct HomogeneousSlope;

impl DecisionRule for HomogeneousSlope {
    fn name(&self) -> &'static str {
        "homogeneous-slope"
    }

    fn apply(&self, class: &DivisorClass, _trace: &mut Vec<TraceStep>) -> RuleOutcome {
        let m = class.mults();
        if !class.is_homogeneous() || m[0] < 1 || class.degree() < 0 {
            return RuleOutcome::Pass;
        }
        if empty_by_slope(class.degree(), m[0]) {
            return RuleOutcome::Decided(VerdictKind::Empty);
        }
        if nonspecial_by_slope(class.degree(), m[0]) {
            return RuleOutcome::Decided(chi_verdict(class));
        }
        RuleOutcome::Pass
    }
}

/// Standard-form rule: degree at least the sum of the three largest
/// multiplicities and every multiplicity in `[0, 11]` gives non-speciality.
struct StandardForm;

impl DecisionRule for StandardForm {
    fn name(&self) -> &'static str {
        "standard-form"
    }

    fn apply(&self, class: &DivisorClass, _trace: &mut Vec<TraceStep>) -> RuleOutcome {
        if nonspecial_standard_form(class) {
            RuleOutcome::Decided(chi_verdict(class))
        } else {
            RuleOutcome::Pass
        }
    }
}

/// The normative rule order. Names are stable and may be used to select
/// sub-cascades from the CLI.
pub fn default_registry() -> Vec<Box<dyn DecisionRule>> {
    vec![
        Box::new(ClampNegativeMults),
        Box::new(NegativeDegree),
        Box::new(CremonaReduce),
        Box::new(NegativeDegree),
        Box::new(CremonaImageNegative),
        Box::new(HomogeneousSlope),
        Box::new(StandardForm),
    ]
}

pub fn registry_rule_names() -> Vec<&'static str> {
    default_registry().iter().map(|r| r.name()).collect()
}

/// Run the full default cascade.
pub fn decide(class: &DivisorClass) -> SystemVerdict {
    decide_with(class, &default_registry())
}

/// Run an explicit rule list in order. Rewrites loop back to the start of
/// the list so that, e.g., clamping after a Cremona step is re-examined by
/// the sign rules.
pub fn decide_with(class: &DivisorClass, rules: &[Box<dyn DecisionRule>]) -> SystemVerdict {
    let mut trace = Vec::new();
    let mut cur = *class;
    'restart: loop {
        for rule in rules {
            match rule.apply(&cur, &mut trace) {
                RuleOutcome::Decided(kind) => {
                    trace.push(TraceStep { rule: rule.name().to_string(), class: cur });
                    return SystemVerdict { kind, trace };
                }
                RuleOutcome::Rewritten(next) => {
                    if next != cur {
                        if rule.name() != "cremona-reduce" {
                            // cremona-reduce logs its own per-step entries
                            trace.push(TraceStep { rule: rule.name().to_string(), class: next });
                        }
                        cur = next;
                        continue 'restart;
                    }
                }
                RuleOutcome::Pass => {}
            }
        }
        trace.push(TraceStep { rule: "no-rule-applies".to_string(), class: cur });
        return SystemVerdict { kind: VerdictKind::Unknown, trace };
    }
}

/// Serre duality sign check: `h^2(D) = h^0(K - D)` vanishes whenever the
/// H-coefficient of `K - D` is negative. Abstains (false) otherwise.
pub fn h2_vanishes(d: &DivisorClass) -> bool {
    DivisorClass::canonical().sub(d).h < 0
}

/// `|dH - m*sum E_i|` is empty when `d/m < 2280/721`, exactly.
pub fn empty_by_slope(d: i64, m: i64) -> bool {
    assert!(m > 0, "empty_by_slope needs m > 0");
    assert!(d >= 0, "empty_by_slope needs d >= 0");
    721 * d < 2280 * m
}

/// `|dH - m*sum E_i|` is non-special when `d/m >= 174/55`, exactly.
pub fn nonspecial_by_slope(d: i64, m: i64) -> bool {
    assert!(m > 0, "nonspecial_by_slope needs m > 0");
    55 * d >= 174 * m
}

/// Non-speciality for standard-form classes: degree at least the sum of the
/// three largest multiplicities, all multiplicities in `[0, 11]`.
pub fn nonspecial_standard_form(d: &DivisorClass) -> bool {
    let m = d.sorted_mults();
    if m[NUM_POINTS - 1] < 0 || m[0] > 11 {
        return false;
    }
    d.degree() >= m[0] + m[1] + m[2]
}

/// Linear form `c0 + cd*d + cm*m + cmp*m'` in the scanned variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinForm {
    pub c0: i64,
    pub cd: i64,
    pub cm: i64,
    pub cmp: i64,
}

impl LinForm {
    pub fn eval(&self, d: i64, m: i64, mp: i64) -> i64 {
        self.c0 + self.cd * d + self.cm * m + self.cmp * mp
    }
}

/// Exact rational constraint `p/q <= num/den` on the scanned triple, checked
/// by cross-multiplication. A zero denominator with nonnegative numerator
/// counts as satisfied (the slope condition is vacuous for a component with
/// no multiplicity); a negative denominator fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioBound {
    pub p: i64,
    pub q: i64,
    pub num: LinForm,
    pub den: LinForm,
}

impl RatioBound {
    pub fn holds(&self, d: i64, m: i64, mp: i64) -> bool {
        let num = self.num.eval(d, m, mp);
        let den = self.den.eval(d, m, mp);
        if den > 0 {
            self.q * num >= self.p * den
        } else if den == 0 {
            num >= 0
        } else {
            false
        }
    }
}

/// Finite scan box and slope constraints for base-locus component
/// candidates `B = dH - m*sum E - m'E_i` inside a fixed total class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseConstraint {
    pub d_range: RangeInclusive<i64>,
    pub m_range: RangeInclusive<i64>,
    /// Range of `m + m'`; `m'` itself is unconstrained except through this.
    pub s_range: RangeInclusive<i64>,
    /// Extra filter on `m'` alone (used by homogeneous scans: `Some(0..=0)`).
    pub mp_range: Option<RangeInclusive<i64>>,
    pub bounds: Vec<RatioBound>,
    /// The total class, excluded along with 0 from the output.
    pub total: (i64, i64, i64),
}

const SLOPE_P: i64 = 2280;
const SLOPE_Q: i64 = 721;

impl CaseConstraint {
    /// Homogeneous split scan for `total = DH - M*sum E`: both `B` and
    /// `total - B` must satisfy the effectiveness slope `d/m >= 2280/721`.
    pub fn homogeneous_split(total_d: i64, total_m: i64, d_range: RangeInclusive<i64>, m_range: RangeInclusive<i64>) -> Self {
        let s_range = m_range.clone();
        CaseConstraint {
            d_range,
            m_range,
            s_range,
            mp_range: Some(0..=0),
            bounds: vec![
                RatioBound {
                    p: SLOPE_P,
                    q: SLOPE_Q,
                    num: LinForm { c0: 0, cd: 1, cm: 0, cmp: 0 },
                    den: LinForm { c0: 0, cd: 0, cm: 1, cmp: 0 },
                },
                RatioBound {
                    p: SLOPE_P,
                    q: SLOPE_Q,
                    num: LinForm { c0: total_d, cd: -1, cm: 0, cmp: 0 },
                    den: LinForm { c0: total_m, cd: 0, cm: -1, cmp: 0 },
                },
            ],
            total: (total_d, total_m, 0),
        }
    }

    /// Scan for `total = DH - M*sum E - M'E_i` with one distinguished point:
    /// the averaged slopes `10d/(10m+m')` and the complementary one must
    /// both clear `2280/721`.
    pub fn distinguished_split(
        total_d: i64,
        total_m: i64,
        total_mp: i64,
        d_range: RangeInclusive<i64>,
        m_range: RangeInclusive<i64>,
        s_range: RangeInclusive<i64>,
    ) -> Self {
        let tsum = 10 * total_m + total_mp;
        CaseConstraint {
            d_range,
            m_range,
            s_range,
            mp_range: None,
            bounds: vec![
                RatioBound {
                    p: SLOPE_P,
                    q: SLOPE_Q,
                    num: LinForm { c0: 0, cd: 10, cm: 0, cmp: 0 },
                    den: LinForm { c0: 0, cd: 0, cm: 10, cmp: 1 },
                },
                RatioBound {
                    p: SLOPE_P,
                    q: SLOPE_Q,
                    num: LinForm { c0: 10 * total_d, cd: -10, cm: 0, cmp: 0 },
                    den: LinForm { c0: tsum, cd: 0, cm: -10, cmp: -1 },
                },
            ],
            total: (total_d, total_m, total_mp),
        }
    }
}

/// Brute-force integer scan over the constraint box; returns exactly the
/// surviving `(d, m, m')` triples in lexicographic order, excluding the
/// zero class and the total itself.
pub fn enumerate_split_cases(constraint: &CaseConstraint) -> Vec<(i64, i64, i64)> {
    assert!(
        !constraint.d_range.is_empty() && !constraint.m_range.is_empty() && !constraint.s_range.is_empty(),
        "empty scan box"
    );
    let mut out = Vec::new();
    for d in constraint.d_range.clone() {
        for m in constraint.m_range.clone() {
            for s in constraint.s_range.clone() {
                let mp = s - m;
                if let Some(r) = &constraint.mp_range {
                    if !r.contains(&mp) {
                        continue;
                    }
                }
                if (d, m, mp) == (0, 0, 0) || (d, m, mp) == constraint.total {
                    continue;
                }
                if constraint.bounds.iter().all(|b| b.holds(d, m, mp)) {
                    out.push((d, m, mp));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub orbit_size: i64,
    pub union_class: DivisorClass,
    /// Whether `orbit_size * deg(b)` divides the total degree, the
    /// divisibility constraint a symmetric irreducible member must satisfy.
    pub consistent: bool,
}

/// S10-orbit bookkeeping for a candidate component `b` inside `total`.
pub fn orbit_divisor_argument(b: &DivisorClass, total: &DivisorClass) -> OrbitReport {
    let mut sorted = b.mults();
    sorted.sort_unstable();
    // multinomial 10!/prod(count!)
    let mut orbit_size: i64 = 3_628_800;
    let mut i = 0;
    while i < NUM_POINTS {
        let mut j = i;
        while j < NUM_POINTS && sorted[j] == sorted[i] {
            j += 1;
        }
        let mut fact = 1i64;
        for k in 2..=(j - i) as i64 {
            fact *= k;
        }
        orbit_size /= fact;
        i = j;
    }
    let msum: i64 = b.mults().iter().sum();
    let union_class = DivisorClass::homogeneous(
        orbit_size.checked_mul(b.degree()).expect("overflow in orbit class"),
        orbit_size.checked_mul(msum).expect("overflow in orbit class") / 10,
    );
    let covered = orbit_size.checked_mul(b.degree()).expect("overflow in orbit degree");
    let consistent = covered > 0 && total.degree() % covered == 0;
    OrbitReport { orbit_size, union_class, consistent }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpleReport {
    /// 7210*6 < 2280*19, the exact form of 7210/2280 < 19/6.
    pub slope_strict: bool,
    pub f_squared: i64,
    pub minus_f_dot_e: i64,
    pub pass: bool,
}

/// The exact comparisons behind ampleness of `-F`.
pub fn ample_slope_check() -> AmpleReport {
    let f = DivisorClass::f_class();
    let slope_strict = 7210i64 * 6 < 2280i64 * 19;
    let f_squared = crate::picard::intersect(&f, &f);
    let minus_f_dot_e = crate::picard::intersect(&f.scale(-1), &DivisorClass::exceptional(1));
    let uniform = (1..=NUM_POINTS)
        .all(|i| crate::picard::intersect(&f.scale(-1), &DivisorClass::exceptional(i)) == minus_f_dot_e);
    let pass = slope_strict && f_squared > 0 && minus_f_dot_e > 0 && uniform;
    AmpleReport { slope_strict, f_squared, minus_f_dot_e, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::DivisorClass as D;

    fn f() -> D {
        D::f_class()
    }

    fn k() -> D {
        D::canonical()
    }

    #[test]
    fn h2_vanishes_signs() {
        assert!(h2_vanishes(&f().scale(-3)));
        assert!(h2_vanishes(&D::ZERO));
        assert!(!h2_vanishes(&D::new(-5, [0; 10])));
    }

    #[test]
    fn slope_rules_exact() {
        assert!(empty_by_slope(57, 19));
        assert!(!empty_by_slope(19, 6)); // 13699 >= 13680
        assert!(!empty_by_slope(16, 5));
        assert!(nonspecial_by_slope(57, 18));
        assert!(nonspecial_by_slope(19, 6)); // 1045 >= 1044, exactly above threshold
        assert!(!nonspecial_by_slope(3, 1)); // 165 < 174
    }

    #[test]
    fn standard_form_rule() {
        let a = D::from_deg_mults(26, [10, 8, 8, 8, 8, 8, 8, 8, 8, 8]);
        assert!(nonspecial_standard_form(&a));
        assert!(nonspecial_standard_form(&D::homogeneous(19, 6)));
        assert!(!nonspecial_standard_form(&D::from_deg_mults(2, [1, 1, 1, 1, 1, 1, 1, 0, 0, 0])));
        assert!(!nonspecial_standard_form(&D::homogeneous(57, 18))); // 18 > 11
    }

    #[test]
    fn decide_named_classes() {
        assert_eq!(decide(&f().scale(-3)).kind, VerdictKind::Dim(0));
        assert_eq!(decide(&f().scale(-1)).kind, VerdictKind::Empty);
        assert_eq!(decide(&f().scale(-2)).kind, VerdictKind::Empty);
        assert_eq!(decide(&D::homogeneous(57, 19)).kind, VerdictKind::Empty);
        let line4 = D::from_deg_mults(1, [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(decide(&line4).kind, VerdictKind::Empty);
        for i in 1..=10 {
            let c = k().scale(-1).add(&D::exceptional(i));
            assert_eq!(decide(&c).kind, VerdictKind::Dim(0));
        }
        // 26H-8*E-2E_i, chi = 0: non-special standard form, empty.
        let a = D::from_deg_mults(26, [10, 8, 8, 8, 8, 8, 8, 8, 8, 8]);
        assert_eq!(decide(&a).kind, VerdictKind::Empty);
        // plain plane curves
        assert_eq!(decide(&D::new(3, [0; 10])).kind, VerdictKind::Dim(9));
    }

    #[test]
    fn decide_traces_name_certifying_rules() {
        let v = decide(&f().scale(-1));
        assert_eq!(v.trace.last().unwrap().rule, "homogeneous-slope");
        let v = decide(&D::from_deg_mults(1, [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]));
        assert_eq!(v.trace.last().unwrap().rule, "cremona-image-negative");
        let v = decide(&D::homogeneous(57, 19));
        assert_eq!(v.trace.last().unwrap().rule, "homogeneous-slope");
    }

    #[test]
    fn decide_unknown_when_no_rule_fits() {
        // 57H-18*E-E_1: not homogeneous, multiplicities exceed 11.
        let c = D::from_deg_mults(57, [19, 18, 18, 18, 18, 18, 18, 18, 18, 18]);
        assert_eq!(decide(&c).kind, VerdictKind::Unknown);
    }

    #[test]
    fn decide_uses_paper_cremona_chain() {
        let start = D::from_deg_mults(7, [4, 2, 2, 2, 2, 2, 2, 2, 2, 2]);
        let v = decide(&start);
        assert_eq!(v.kind, VerdictKind::Empty);
        let steps: Vec<&str> = v.trace.iter().map(|t| t.rule.as_str()).collect();
        assert_eq!(steps.iter().filter(|r| **r == "cremona-step").count(), 5);
        assert_eq!(*steps.last().unwrap(), "cremona-image-negative");
    }

    #[test]
    fn homogeneous_split_scan_degree_57() {
        let c = CaseConstraint::homogeneous_split(57, 18, 0..=57, 0..=18);
        let got = enumerate_split_cases(&c);
        assert_eq!(got, vec![(19, 6, 0), (38, 12, 0)]);
    }

    #[test]
    fn distinguished_split_scan_k_minus_f_plus_d() {
        // total K - F + D_i = 10H - 3*E - E_i
        let c = CaseConstraint::distinguished_split(10, 3, 1, 0..=5, 0..=3, 0..=4);
        let got = enumerate_split_cases(&c);
        assert_eq!(got, vec![(1, 0, 3), (3, 1, -1)]);
    }

    #[test]
    fn distinguished_split_scan_k_minus_2f_plus_d() {
        // total K - 2F + D_i = 29H - 9*E - E_i; the low-degree window
        // carries the five classically itemized cases.
        let c = CaseConstraint::distinguished_split(29, 9, 1, 0..=5, 0..=9, 0..=10);
        let got = enumerate_split_cases(&c);
        assert_eq!(got, vec![(1, 0, 3), (2, 0, 6), (3, 0, 9), (3, 1, -1), (4, 1, 2)]);
    }

    #[test]
    fn distinguished_split_full_box_superset() {
        let c = CaseConstraint::distinguished_split(29, 9, 1, 0..=14, 0..=9, 0..=10);
        let got = enumerate_split_cases(&c);
        // the wider box keeps the five low-degree cases and adds the
        // higher-degree candidates, all of which decide() refutes
        for t in [(1, 0, 3), (2, 0, 6), (3, 0, 9), (3, 1, -1), (4, 1, 2)] {
            assert!(got.contains(&t));
        }
        assert_eq!(got.len(), 12);
    }

    #[test]
    fn orbit_reports() {
        let r = orbit_divisor_argument(&D::homogeneous(57, 18), &f().scale(-3));
        assert_eq!(r.orbit_size, 1);
        assert!(r.consistent);
        let b = D::from_deg_mults(3, [2, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        let r = orbit_divisor_argument(&b, &f().scale(-3));
        assert_eq!(r.orbit_size, 10);
        assert_eq!(r.union_class, D::homogeneous(30, 11));
        assert!(!r.consistent); // 30 does not divide 57
        let r = orbit_divisor_argument(&D::homogeneous(19, 6), &f().scale(-3));
        assert_eq!(r.orbit_size, 1);
        assert!(r.consistent); // 19 | 57
    }

    #[test]
    fn ample_report() {
        let r = ample_slope_check();
        assert!(r.pass);
        assert_eq!(r.f_squared, 1);
        assert_eq!(r.minus_f_dot_e, 6);
    }
}

//! Commutator suites: each case evaluates both sides of an identity between
//! mode words on one insertion and records the exact residual.

use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Combination, Generator, ModeEvaluator};
use crate::correlator::{Geometry, Sector};
use crate::lattice::{ClassSet, Site};
use crate::scalar::{format_rational, int, rat, PiScalar, Rational};

/// One identity `lhs = rhs` to be checked on one insertion.
#[derive(Clone, Debug)]
pub struct Case {
    pub identity: String,
    pub indices: Vec<i64>,
    pub fields: Vec<Site>,
    pub lhs: Combination,
    pub rhs: Combination,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub identity: String,
    pub indices: Vec<i64>,
    pub insertion: Vec<[i64; 2]>,
    pub kind: &'static str,
    pub residual: PiScalar,
    pub pass: bool,
    #[serde(skip)]
    pub lhs: PiScalar,
    #[serde(skip)]
    pub rhs: PiScalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    pub suite: String,
    pub parameters: Value,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl CommutatorReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

/// All multisets of at most `max_degree` vertices with `‖x‖₁ ≤ window`
/// (restricted to `Im x > 0` in the half-plane), lowest degree first.
pub fn insertion_family(geometry: Geometry, max_degree: usize, window: i64) -> Vec<Vec<Site>> {
    let mut points: Vec<Site> = Site::ball(ClassSet::VERTEX, 4 * window);
    if geometry == Geometry::HalfPlane {
        points.retain(|p| p.qy > 0);
    }
    let mut out = vec![Vec::new()];
    let mut layer: Vec<(usize, Vec<Site>)> = vec![(0, Vec::new())];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (start, ms) in &layer {
            for (i, &p) in points.iter().enumerate().skip(*start) {
                let mut m = ms.clone();
                m.push(p);
                next.push((i, m));
            }
        }
        out.extend(next.iter().map(|(_, m)| m.clone()));
        layer = next;
    }
    out
}

fn indices(max: i64) -> impl Iterator<Item = (i64, i64)> {
    (-max..=max).flat_map(move |m| (-max..=max).map(move |n| (m, n)))
}

fn delta(a: i64, b: i64) -> bool {
    a + b == 0
}

/// `[X_m, X_n] = m δ_{m+n,0}` for current modes of one sector.
pub fn heisenberg_cases(sector: Sector, max: i64, family: &[Vec<Site>]) -> Vec<Case> {
    let mut out = Vec::new();
    let name = if sector == Sector::Analytic { "[a_m, a_n] = m delta_{m+n,0}" } else { "[abar_m, abar_n] = m delta_{m+n,0}" };
    for p in family {
        for (m, n) in indices(max) {
            let gm = Generator::Current(sector, m);
            let gn = Generator::Current(sector, n);
            let rhs = if delta(m, n) { Combination::identity().scaled(&int(m)) } else { Combination::default() };
            out.push(Case { identity: name.into(), indices: vec![m, n], fields: p.clone(), lhs: Combination::commutator(&gm, &gn), rhs });
        }
    }
    out
}

/// `[a_m, abar_n] = 0`.
pub fn mixed_current_cases(max: i64, family: &[Vec<Site>]) -> Vec<Case> {
    let mut out = Vec::new();
    for p in family {
        for (m, n) in indices(max) {
            out.push(Case {
                identity: "[a_m, abar_n] = 0".into(),
                indices: vec![m, n],
                fields: p.clone(),
                lhs: Combination::commutator(&Generator::a(m), &Generator::abar(n)),
                rhs: Combination::default(),
            });
        }
    }
    out
}

/// `[L_m, Lbar_n] = 0`.
pub fn mixed_virasoro_cases(max: i64, family: &[Vec<Site>]) -> Vec<Case> {
    let mut out = Vec::new();
    for p in family {
        for (m, n) in indices(max) {
            out.push(Case {
                identity: "[L_m, Lbar_n] = 0".into(),
                indices: vec![m, n],
                fields: p.clone(),
                lhs: Combination::commutator(&Generator::l(m), &Generator::lbar(n)),
                rhs: Combination::default(),
            });
        }
    }
    out
}

/// The Virasoro generator used by a suite: `L_n` or `L_n + b(n+1)a_n`.
fn vir(b: Option<&Rational>, n: i64) -> Generator {
    match b {
        None => Generator::l(n),
        Some(b) => Generator::Coulomb(b.clone(), n),
    }
}

/// Central charge `1 − 12b²`.
pub fn central_charge(b: Option<&Rational>) -> Rational {
    match b {
        None => Rational::one(),
        Some(b) => Rational::one() - int(12) * b * b,
    }
}

/// `[L_m, L_n] = (m−n)L_{m+n} + (c/12)(m³−m)δ_{m+n,0}`.
pub fn virasoro_cases(b: Option<&Rational>, max: i64, family: &[Vec<Site>]) -> Vec<Case> {
    let c = central_charge(b);
    let label = format!("[L_m, L_n] = (m-n) L_(m+n) + ({}/12)(m^3-m) delta_(m+n,0)", format_rational(&c));
    let mut out = Vec::new();
    for p in family {
        for (m, n) in indices(max) {
            let mut rhs = Combination::word(vec![vir(b, m + n)]).scaled(&int(m - n));
            if delta(m, n) {
                rhs = rhs.plus(Combination::identity().scaled(&(&c * rat(m * m * m - m, 12))));
            }
            out.push(Case {
                identity: label.clone(),
                indices: vec![m, n],
                fields: p.clone(),
                lhs: Combination::commutator(&vir(b, m), &vir(b, n)),
                rhs,
            });
        }
    }
    out
}

/// `[L_n, a_m] = −m a_{n+m}`, plus `b(n+1)·n·δ_{n+m,0}` for the Coulomb generator.
pub fn virasoro_current_cases(b: Option<&Rational>, max: i64, family: &[Vec<Site>]) -> Vec<Case> {
    let mut out = Vec::new();
    for p in family {
        for (n, m) in indices(max) {
            let mut rhs = Combination::word(vec![Generator::a(n + m)]).scaled(&int(-m));
            let mut label = "[L_n, a_m] = -m a_(n+m)".to_string();
            if let Some(b) = b {
                label.push_str(" + b(n+1) n delta_(n+m,0)");
                if delta(n, m) {
                    rhs = rhs.plus(Combination::identity().scaled(&(b * int((n + 1) * n))));
                }
            }
            out.push(Case { identity: label, indices: vec![n, m], fields: p.clone(), lhs: Combination::commutator(&vir(b, n), &Generator::a(m)), rhs });
        }
    }
    out
}

/// `⟨[L_2, L_{−2}]·1⟩ − 4⟨L_0·1⟩ = c/2`, and separately `⟨[L_2, L_{−2}]·1⟩ = c/2`.
pub fn central_value_cases(b: Option<&Rational>) -> Vec<Case> {
    let c = central_charge(b);
    let half_c = &c * rat(1, 2);
    vec![
        Case {
            identity: "<[L_2, L_-2] 1> - 4 <L_0 1> = c/2".into(),
            indices: vec![2, -2],
            fields: vec![],
            lhs: Combination::commutator(&vir(b, 2), &vir(b, -2)).minus(Combination::word(vec![vir(b, 0)]).scaled(&int(4))),
            rhs: Combination::identity().scaled(&half_c),
        },
        Case {
            identity: "<[L_2, L_-2] 1> = c/2".into(),
            indices: vec![2, -2],
            fields: vec![],
            lhs: Combination::commutator(&vir(b, 2), &vir(b, -2)),
            rhs: Combination::identity().scaled(&half_c),
        },
    ]
}

/// `[L_m, Lb_n] = 0` with the deformed analytic generator.
pub fn coulomb_mixed_cases(b: &Rational, max: i64, family: &[Vec<Site>]) -> Vec<Case> {
    let mut out = Vec::new();
    for p in family {
        for (m, n) in indices(max) {
            out.push(Case {
                identity: "[Lb_m, Lbar_n] = 0".into(),
                indices: vec![m, n],
                fields: p.clone(),
                lhs: Combination::commutator(&vir(Some(b), m), &Generator::lbar(n)),
                rhs: Combination::default(),
            });
        }
    }
    out
}

pub fn evaluate_case(ev: &ModeEvaluator, case: &Case) -> CaseResult {
    let lhs = ev.combination(&case.lhs, &case.fields);
    let rhs = ev.combination(&case.rhs, &case.fields);
    let residual = &lhs - &rhs;
    CaseResult {
        identity: case.identity.clone(),
        indices: case.indices.clone(),
        insertion: case.fields.iter().map(|s| [s.qx, s.qy]).collect(),
        kind: "exact",
        pass: residual.is_zero(),
        residual,
        lhs,
        rhs,
    }
}

pub fn run_cases(ev: &ModeEvaluator, suite: &str, parameters: Value, cases: &[Case]) -> CommutatorReport {
    let results: Vec<CaseResult> = cases.iter().map(|c| evaluate_case(ev, c)).collect();
    let passed = results.iter().filter(|r| r.pass).count();
    CommutatorReport {
        suite: suite.into(),
        parameters,
        summary: Summary { total: results.len(), passed, failed: results.len() - passed },
        cases: results,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    Heisenberg,
    Virasoro,
    Coulomb(Rational),
    Mixed,
    HalfPlane,
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub max_index: i64,
    /// Index range of the secondary identities (`[L,Lbar]`, half-plane Virasoro).
    pub secondary_max_index: i64,
    pub max_degree: usize,
    pub window: i64,
    pub growth: u32,
}

impl SuiteKind {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Heisenberg => "heisenberg",
            SuiteKind::Virasoro => "virasoro",
            SuiteKind::Coulomb(_) => "coulomb",
            SuiteKind::Mixed => "mixed",
            SuiteKind::HalfPlane => "halfplane",
        }
    }

    pub fn geometry(&self) -> Geometry {
        if *self == SuiteKind::HalfPlane {
            Geometry::HalfPlane
        } else {
            Geometry::FullPlane
        }
    }

    pub fn cases(&self, p: &SuiteParams) -> Vec<Case> {
        let fam = insertion_family(self.geometry(), p.max_degree, p.window);
        match self {
            SuiteKind::Heisenberg => {
                let mut v = heisenberg_cases(Sector::Analytic, p.max_index, &fam);
                v.extend(heisenberg_cases(Sector::Antianalytic, p.max_index, &fam));
                v
            }
            SuiteKind::Mixed => {
                let mut v = mixed_current_cases(p.max_index, &fam);
                v.extend(mixed_virasoro_cases(p.secondary_max_index, &fam));
                v
            }
            SuiteKind::Virasoro => {
                let mut v = central_value_cases(None);
                v.extend(virasoro_cases(None, p.max_index, &fam));
                v.extend(virasoro_current_cases(None, p.max_index, &fam));
                v.extend(mixed_virasoro_cases(p.secondary_max_index, &fam));
                v
            }
            SuiteKind::Coulomb(b) => {
                let mut v = central_value_cases(Some(b));
                v.extend(virasoro_cases(Some(b), p.max_index, &fam));
                v.extend(virasoro_current_cases(Some(b), p.max_index, &fam));
                v.extend(coulomb_mixed_cases(b, p.secondary_max_index, &fam));
                v
            }
            SuiteKind::HalfPlane => {
                let mut v = heisenberg_cases(Sector::Analytic, p.max_index, &fam);
                v.extend(virasoro_cases(None, p.secondary_max_index, &fam));
                v
            }
        }
    }

    pub fn run(&self, p: &SuiteParams) -> CommutatorReport {
        let ev = ModeEvaluator::with_options(self.geometry(), p.growth, 0);
        let mut params = json!({
            "max_index": p.max_index,
            "secondary_max_index": p.secondary_max_index,
            "max_degree": p.max_degree,
            "window": p.window,
            "contour_growth": p.growth,
            "geometry": self.geometry(),
        });
        if let SuiteKind::Coulomb(b) = self {
            params["b"] = json!(format_rational(b));
            params["central_charge"] = json!(format_rational(&central_charge(Some(b))));
        }
        run_cases(&ev, self.name(), params, &self.cases(p))
    }
}

/// Indices of cases whose left or right value differs between two runs of the
/// same case list.
pub fn value_mismatches(a: &CommutatorReport, b: &CommutatorReport) -> Vec<usize> {
    assert_eq!(a.cases.len(), b.cases.len(), "reports cover different cases");
    (0..a.cases.len()).filter(|&i| a.cases[i].lhs != b.cases[i].lhs || a.cases[i].rhs != b.cases[i].rhs).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(insertion_family(Geometry::FullPlane, 2, 2).len(), 1 + 13 + 91);
        assert_eq!(insertion_family(Geometry::HalfPlane, 2, 2).len(), 1 + 4 + 10);
        assert!(insertion_family(Geometry::FullPlane, 0, 5) == vec![Vec::<Site>::new()]);
    }

    #[test]
    fn central_charge_of_coulomb() {
        use num_traits::Zero;
        assert_eq!(central_charge(Some(&rat(1, 2))), int(-2));
        assert!(central_charge(None).is_one());
        assert!(!central_charge(Some(&rat(1, 3))).is_zero());
    }
}

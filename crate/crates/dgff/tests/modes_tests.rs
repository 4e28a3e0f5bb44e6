use dgff::contour::Contour;
use dgff::correlator::{cov_j_phi, CurrentPoint, Geometry, Sector};
use dgff::lattice::Site;
use dgff::modes::suite::{central_value_cases, evaluate_case, insertion_family, SuiteKind, SuiteParams};
use dgff::modes::{
    auto_contours, auto_radii, expand, half_plane_single_folded, is_wick_odd, mode_action, parity_vanishes,
    sugawara_action, truncation_bound, Combination, Generator, ModeEvaluator,
};
use dgff::monomials::monomial;
use dgff::scalar::{rat, GaussianRational, PiScalar};

const A: Sector = Sector::Analytic;
const B: Sector = Sector::Antianalytic;

fn v(x: i64, y: i64) -> Site {
    Site::vertex(x, y)
}

/// `π^{−1/2} Σ_edges (v−u)·z_⋄^[n]·⟨J(z_m)φ(x)⟩`, summed edge by edge.
fn single_mode_by_hand(geometry: Geometry, sector: Sector, n: i64, r: u32, x: Site) -> PiScalar {
    let mut acc = PiScalar::zero();
    for e in Contour::rectangle(r).edges() {
        let mut c = monomial(n, e.diamond).unwrap().mul_gaussian(&e.weight());
        if sector == B {
            c = c.conj();
        }
        acc += &(&c * &cov_j_phi(geometry, CurrentPoint { site: e.medial, sector }, x));
    }
    acc.shift(-1)
}

#[test]
fn truncation_examples() {
    assert_eq!(truncation_bound(&[]), 1);
    assert_eq!(truncation_bound(&[v(1, 0)]), 3);
    assert_eq!(truncation_bound(&[v(2, 1)]), 7);
    assert_eq!(truncation_bound(&[v(1, 0), v(0, -2)]), 5);
}

#[test]
fn contour_sizing() {
    assert!(auto_radii(&[(A, 0)], &[v(1, 0)], 0)[0] >= 1);
    assert!(auto_radii(&[(A, -4)], &[], 0)[0] >= 2);
    let two = auto_contours(&[(A, 0), (A, 0)], &[], 0);
    assert!(two[1].encloses(&two[0]));
    for word in [vec![(A, -3), (B, 2), (A, -5)], vec![(A, 4), (A, -6)]] {
        let fields = [v(2, 0), v(-1, -1)];
        let cs = auto_contours(&word, &fields, 0);
        assert!(cs[0].separates_ball_q(8));
        for (i, &(_, n)) in word.iter().enumerate() {
            assert!(cs[i].separates_ball_q(2 * (-n).max(0)));
            if i > 0 {
                assert!(cs[i].encloses(&cs[i - 1]));
            }
        }
        let grown = auto_radii(&word, &fields, 2);
        assert!(grown.iter().zip(auto_radii(&word, &fields, 0)).all(|(g, r)| *g == r + 2));
    }
}

#[test]
fn action_examples() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    for n in -4..=4 {
        assert!(mode_action(&ev, &[Generator::a(n)], &[]).is_zero());
        assert!(mode_action(&ev, &[Generator::a(n)], &[Site::ORIGIN]).is_zero());
    }
    assert!(ev.action(&[Generator::a(0)], &[v(1, 0)]).is_zero());
    assert!(ev.action_reference(&[Generator::a(0)], &[v(1, 0)]).is_zero());
    let c = ev.combination(&Combination::commutator(&Generator::a(1), &Generator::a(-1)), &[]);
    assert_eq!(c, PiScalar::one());
    let minus_i_over_sqrt_pi = PiScalar::term(-1, GaussianRational::imag(rat(-1, 1)));
    assert_eq!(ev.action(&[Generator::a(1)], &[v(1, 0)]), minus_i_over_sqrt_pi);
    assert!(ev.action(&[Generator::a(-1)], &[v(1, 0)]).is_zero());
    assert_eq!(ev.action(&[Generator::abar(1)], &[v(1, 0)]), minus_i_over_sqrt_pi.conj());
}

#[test]
fn single_modes_match_a_direct_edge_sum() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    for x in [v(1, 0), v(0, 1), v(1, 1), v(-2, 1), v(0, -2)] {
        for n in -4..=4 {
            for s in [A, B] {
                let r = auto_radii(&[(s, n)], &[x], 0)[0];
                let want = single_mode_by_hand(Geometry::FullPlane, s, n, r, x);
                assert_eq!(ev.action(&[Generator::Current(s, n)], &[x]), want, "{s:?} {n} {x}");
                let bigger = single_mode_by_hand(Geometry::FullPlane, s, n, r + 3, x);
                assert_eq!(bigger, want);
            }
        }
    }
    assert!(ev.action(&[Generator::a(0)], &[v(2, 1)]).is_zero());
}

#[test]
fn half_plane_folded_contours() {
    let ev = ModeEvaluator::new(Geometry::HalfPlane);
    for x in [v(0, 1), v(1, 1), v(-1, 1), v(0, 2), v(2, 1)] {
        for n in -3..=4 {
            let r = auto_radii(&[(A, n)], &[x], 0)[0];
            let direct = ev.action(&[Generator::a(n)], &[x]);
            assert_eq!(direct, single_mode_by_hand(Geometry::HalfPlane, A, n, r, x));
            for rr in [r, r + 1, r + 2] {
                assert_eq!(half_plane_single_folded(n, rr, x), direct, "n={n} x={x} r={rr}");
            }
        }
    }
}

#[test]
fn sugawara_examples() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    assert!(sugawara_action(&ev, 0, A, &[]).is_zero());
    assert!(sugawara_action(&ev, 0, B, &[]).is_zero());
    for x in [v(1, 0), v(1, 1)] {
        // L_{−1} unfolded by hand: ½Σ_{j=0}^{M} a_{−1−j}a_j + ½Σ_{j=−1−M}^{−1} a_j a_{−1−j}
        let m = truncation_bound(&[x, x]);
        let fields = [x, x];
        let mut hand = PiScalar::zero();
        for j in 0..=m {
            hand += &ev.word_value(&[(A, j), (A, -1 - j)], &fields);
        }
        for j in -1 - m..=-1 {
            hand += &ev.word_value(&[(A, -1 - j), (A, j)], &fields);
        }
        assert_eq!(sugawara_action(&ev, -1, A, &fields), hand.scale(&rat(1, 2)));
        assert!(sugawara_action(&ev, -1, A, &[x]).is_zero());
    }
    let central = central_value_cases(None);
    for c in &central {
        assert!(evaluate_case(&ev, c).pass, "{}", c.identity);
    }
    let l2 = Generator::l(2);
    let lm2 = Generator::l(-2);
    assert_eq!(ev.combination(&Combination::commutator(&l2, &lm2), &[]), PiScalar::from_ratio(1, 2));
}

#[test]
fn coulomb_central_value() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    let b = rat(1, 2);
    let c = Combination::commutator(&Generator::Coulomb(b.clone(), 2), &Generator::Coulomb(b.clone(), -2));
    assert_eq!(ev.combination(&c, &[]), PiScalar::from_int(-1));
    for case in central_value_cases(Some(&b)) {
        assert!(evaluate_case(&ev, &case).pass);
    }
    // the Coulomb term itself
    let x = [v(1, 0)];
    let l = ev.action(&[Generator::l(1)], &x);
    let a = ev.action(&[Generator::a(1)], &x);
    assert_eq!(ev.action(&[Generator::Coulomb(b, 1)], &x), &l + &a);
}

#[test]
fn parity() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    let (x, y) = (v(1, 0), v(-1, 1));
    for n in -3..=3 {
        assert!(parity_vanishes(&[Generator::a(n)], &[x, y]));
        assert!(ev.action(&[Generator::a(n)], &[x, y]).is_zero());
        assert!(ev.action_reference(&[Generator::a(n)], &[x, y]).is_zero());
        assert!(parity_vanishes(&[Generator::l(n)], &[x]));
        assert!(ev.action(&[Generator::l(n)], &[x]).is_zero());
        assert!(!parity_vanishes(&[Generator::a(n)], &[x]));
        assert!(!parity_vanishes(&[Generator::l(n)], &[x, y]));
    }
    assert!(!ev.action(&[Generator::a(1)], &[x]).is_zero());
    assert!(is_wick_odd(&[(A, 1), (B, 2), (A, 0)], &[]));
    // Coulomb generators mix parities
    assert!(!parity_vanishes(&[Generator::Coulomb(rat(1, 2), 1)], &[x]));
    // a word with an odd total count vanishes through the reference evaluator too
    assert!(ev.word_value_reference(&[(A, 1), (A, -1)], &[x]).is_zero());
}

#[test]
fn truncation_stability() {
    let base = ModeEvaluator::new(Geometry::FullPlane);
    let more = ModeEvaluator::with_options(Geometry::FullPlane, 0, 2);
    let fams: Vec<Vec<Site>> = vec![vec![], vec![v(1, 0)], vec![v(1, 0), v(0, 1)], vec![v(1, 1), v(1, 1)]];
    for f in &fams {
        for m in -2..=2 {
            for n in -2..=2 {
                let w = [Generator::l(m), Generator::l(n)];
                assert_eq!(base.action(&w, f), more.action(&w, f), "{m} {n} {f:?}");
                let w = [Generator::l(m), Generator::a(n)];
                assert_eq!(base.action(&w, f), more.action(&w, f));
            }
        }
    }
    assert!(expand(&[Generator::l(0)], &[], 2).len() > expand(&[Generator::l(0)], &[], 0).len());
}

#[test]
fn fast_equals_reference_small() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    let fields = [vec![], vec![v(1, 0)], vec![v(1, 0), v(0, -1)], vec![v(0, 1), v(1, 1), v(-1, 0)]];
    let words: Vec<Vec<(Sector, i64)>> = vec![
        vec![(A, 1), (A, -1)],
        vec![(A, 2), (B, -2)],
        vec![(B, -1), (A, 1), (A, 0)],
        vec![(A, 0)],
        vec![(A, -2), (A, 1), (B, 1)],
    ];
    for w in &words {
        for f in fields.iter().filter(|f| w.len() + f.len() <= 4) {
            assert_eq!(ev.word_value(w, f), ev.word_value_reference(w, f), "{w:?} {f:?}");
        }
    }
}

#[test]
fn order_sensitivity_is_the_commutator() {
    let ev = ModeEvaluator::new(Geometry::FullPlane);
    let x = vec![v(1, 1), v(-1, 0)];
    for m in -3..=3 {
        for n in -3..=3 {
            let ab = ev.action(&[Generator::a(m), Generator::a(n)], &x);
            let ba = ev.action(&[Generator::a(n), Generator::a(m)], &x);
            let want = if m + n == 0 { ev.action(&[], &x).scale(&rat(m, 1)) } else { PiScalar::zero() };
            assert_eq!(&ab - &ba, want);
        }
    }
}

#[test]
fn reports() {
    let p = SuiteParams { max_index: 1, secondary_max_index: 1, max_degree: 1, window: 1, growth: 0 };
    let r1 = SuiteKind::Heisenberg.run(&p);
    let r2 = SuiteKind::Heisenberg.run(&p);
    assert!(r1.all_pass());
    let fam = insertion_family(Geometry::FullPlane, 1, 1);
    assert_eq!(r1.summary.total, 2 * 9 * fam.len());
    let j1 = serde_json::to_value(&r1).unwrap();
    assert_eq!(j1, serde_json::to_value(&r2).unwrap());
    assert_eq!(j1["suite"], "heisenberg");
    let case = &j1["cases"][0];
    for key in ["identity", "indices", "insertion", "residual", "pass", "kind"] {
        assert!(case.get(key).is_some(), "missing {key}");
    }
    assert_eq!(case["kind"], "exact");
    assert_eq!(j1["summary"]["failed"], 0);
    let c = SuiteKind::Coulomb(rat(1, 2)).run(&SuiteParams { max_index: 1, ..p });
    assert!(c.all_pass());
    assert_eq!(serde_json::to_value(&c).unwrap()["parameters"]["central_charge"], "-2");
}

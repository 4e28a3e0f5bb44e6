//! Current modes `𝔞ₙ`, `𝔞̄ₙ`, Sugawara modes `𝔏ₙ`, `𝔏̄ₙ` and Coulomb-gas modes
//! `𝔏ₙᵇ = 𝔏ₙ + b(n+1)𝔞ₙ` acting on insertions by nested discrete contour integrals.
//!
//! A word `𝔞_{n_j} ⋯ 𝔞_{n_1}` acts on `P = φ(x₁)⋯φ(x_k)` by
//!
//! ```text
//! π^{−j/2} ∮_{γ_j} ⋯ ∮_{γ_1} ⟨J(z_j)⋯J(z_1) P⟩ z_1^[n_1] dz_1 ⋯ z_j^[n_j] dz_j
//! ```
//!
//! with `γ_1` innermost. Generators in a [`ModeWord`] are written left to right
//! as in operator notation, so the rightmost one is applied first.

pub mod suite;

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::contour::Contour;
use crate::correlator::{cov_j_j, cov_j_phi, cov_phi, pair_partitions, wick, CurrentPoint, Geometry, Sector, Slot};
use crate::lattice::Site;
use crate::monomials::MonomialFamily;
use crate::scalar::{int, rat, PiScalar, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `𝔞ₙ` or `𝔞̄ₙ`.
    Current(Sector, i64),
    /// `𝔏ₙ` or `𝔏̄ₙ`.
    Virasoro(Sector, i64),
    /// `𝔏ₙ + b(n+1)𝔞ₙ` in the analytic sector.
    Coulomb(Rational, i64),
}

impl Generator {
    pub fn a(n: i64) -> Self {
        Generator::Current(Sector::Analytic, n)
    }
    pub fn abar(n: i64) -> Self {
        Generator::Current(Sector::Antianalytic, n)
    }
    pub fn l(n: i64) -> Self {
        Generator::Virasoro(Sector::Analytic, n)
    }
    pub fn lbar(n: i64) -> Self {
        Generator::Virasoro(Sector::Antianalytic, n)
    }

    pub fn index(&self) -> i64 {
        match self {
            Generator::Current(_, n) | Generator::Virasoro(_, n) | Generator::Coulomb(_, n) => *n,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Generator::Current(Sector::Analytic, n) => format!("a[{n}]"),
            Generator::Current(Sector::Antianalytic, n) => format!("abar[{n}]"),
            Generator::Virasoro(Sector::Analytic, n) => format!("L[{n}]"),
            Generator::Virasoro(Sector::Antianalytic, n) => format!("Lbar[{n}]"),
            Generator::Coulomb(b, n) => format!("Lb[{n};b={b}]"),
        }
    }
}

/// A product of generators, leftmost outermost.
pub type ModeWord = Vec<Generator>;

/// A word of current modes, innermost first.
pub type CurrentWord = Vec<(Sector, i64)>;

/// Formal rational combination of mode words (the identity is the empty word).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Combination(pub Vec<(Rational, ModeWord)>);

impl Combination {
    pub fn word(w: ModeWord) -> Self {
        Combination(vec![(Rational::one(), w)])
    }

    pub fn identity() -> Self {
        Self::word(Vec::new())
    }

    /// `[A, B] = AB − BA` for single generators.
    pub fn commutator(a: &Generator, b: &Generator) -> Self {
        Combination(vec![(Rational::one(), vec![a.clone(), b.clone()]), (-Rational::one(), vec![b.clone(), a.clone()])])
    }

    pub fn scaled(mut self, c: &Rational) -> Self {
        for t in &mut self.0 {
            t.0 = &t.0 * c;
        }
        self
    }

    pub fn plus(mut self, o: Combination) -> Self {
        self.0.extend(o.0);
        self
    }

    pub fn minus(self, o: Combination) -> Self {
        self.plus(o.scaled(&-Rational::one()))
    }
}

/// `M = 1 + 2·max ‖x‖₁` over field points (0 for an empty list); fractional norms
/// of dual points are rounded up.
pub fn truncation_bound(fields: &[Site]) -> i64 {
    let max_q = fields.iter().map(|f| f.norm1_q()).max().unwrap_or(0);
    1 + 2 * ((max_q + 3) / 4)
}

/// Truncation bound for a Sugawara mode applied after the current modes `inner`:
/// besides the field points, an outer mode `𝔞_j` of the same sector can only pair
/// with an inner `𝔞_k` when `j = −k`.
pub fn composite_bound(fields: &[Site], inner: &[(Sector, i64)], sector: Sector) -> i64 {
    let mut m = truncation_bound(fields);
    for &(s, k) in inner {
        if s == sector {
            m = m.max(-k);
        }
    }
    m
}

/// Expands a mode word into current words. `extra` enlarges every truncation
/// bound, which must not change any value.
pub fn expand(word: &[Generator], fields: &[Site], extra: i64) -> Vec<(Rational, CurrentWord)> {
    let mut terms: Vec<(Rational, CurrentWord)> = vec![(Rational::one(), Vec::new())];
    let half = rat(1, 2);
    for g in word.iter().rev() {
        let mut next: HashMap<CurrentWord, Rational> = HashMap::new();
        let mut push = |c: Rational, w: CurrentWord| {
            let e = next.entry(w).or_insert_with(Rational::zero);
            *e += c;
        };
        for (c, w) in &terms {
            let (sector, n, b) = match g {
                Generator::Current(s, n) => {
                    let mut w2 = w.clone();
                    w2.push((*s, *n));
                    push(c.clone(), w2);
                    continue;
                }
                Generator::Virasoro(s, n) => (*s, *n, None),
                Generator::Coulomb(b, n) => (Sector::Analytic, *n, Some(b)),
            };
            let m = composite_bound(fields, w, sector) + extra;
            let hc = c * &half;
            for j in 0..=m {
                let mut w2 = w.clone();
                w2.push((sector, j));
                w2.push((sector, n - j));
                push(hc.clone(), w2);
            }
            for j in n - m..0 {
                let mut w2 = w.clone();
                w2.push((sector, n - j));
                w2.push((sector, j));
                push(hc.clone(), w2);
            }
            if let Some(b) = b {
                let mut w2 = w.clone();
                w2.push((sector, n));
                push(c * b * int(n + 1), w2);
            }
        }
        let mut v: Vec<(Rational, CurrentWord)> = next.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c, w)).collect();
        v.sort_by(|a, b| a.1.cmp(&b.1));
        terms = v;
    }
    terms
}

/// Total number of current insertions plus field points is odd, so Wick's
/// formula forces the action to vanish.
pub fn is_wick_odd(word: &[(Sector, i64)], fields: &[Site]) -> bool {
    (word.len() + fields.len()) % 2 == 1
}

/// Parity of `⟨word · P⟩`: `true` if the action vanishes by Wick parity for
/// every current word in the expansion.
pub fn parity_vanishes(word: &[Generator], fields: &[Site]) -> bool {
    expand(word, fields, 0).iter().all(|(_, w)| is_wick_odd(w, fields))
}

/// Smallest rectangle radius separating `B̄(q/4)` (quarter units) from infinity.
fn rect_radius_for_ball_q(q: i64) -> u32 {
    ((q - 2).max(0) as u32).div_ceil(4)
}

/// Nested rectangle radii for a current word: the innermost contour separates the
/// field points and `B̄(max(0, −n₁/2))` from infinity, and each later contour
/// encloses the previous closure and its own ball. All radii are then enlarged
/// by `growth`.
pub fn auto_radii(word: &[(Sector, i64)], fields: &[Site], growth: u32) -> Vec<u32> {
    let field_q = fields.iter().map(|f| f.norm1_q()).max().unwrap_or(0);
    let mut out = Vec::with_capacity(word.len());
    for (i, &(_, n)) in word.iter().enumerate() {
        let ball = rect_radius_for_ball_q(2 * (-n).max(0));
        let r = if i == 0 { ball.max(rect_radius_for_ball_q(field_q)) } else { ball.max(out[i - 1] + 1) };
        out.push(r);
    }
    out.into_iter().map(|r| r + growth).collect()
}

pub fn auto_contours(word: &[(Sector, i64)], fields: &[Site], growth: u32) -> Vec<Contour> {
    auto_radii(word, fields, growth).into_iter().map(Contour::rectangle).collect()
}

type Weights = Arc<Vec<(PiScalar, Site)>>;

/// Evaluates mode actions, caching every contour integral it computes.
pub struct ModeEvaluator {
    geometry: Geometry,
    growth: u32,
    extra_truncation: i64,
    monomials: &'static MonomialFamily,
    contours: RwLock<HashMap<u32, Arc<Contour>>>,
    weights: RwLock<HashMap<(Sector, i64, u32), Weights>>,
    singles: RwLock<HashMap<(Sector, i64, u32, Site), PiScalar>>,
    inner_fields: RwLock<HashMap<(Sector, i64, u32, Sector, u32), Arc<Vec<PiScalar>>>>,
    doubles: RwLock<HashMap<(Sector, i64, u32, Sector, i64, u32), PiScalar>>,
    words: RwLock<HashMap<(CurrentWord, Vec<Site>), PiScalar>>,
}

impl ModeEvaluator {
    pub fn new(geometry: Geometry) -> Self {
        Self::with_options(geometry, 0, 0)
    }

    /// `growth` enlarges every contour radius; `extra_truncation` enlarges every
    /// Sugawara truncation bound.
    pub fn with_options(geometry: Geometry, growth: u32, extra_truncation: i64) -> Self {
        ModeEvaluator {
            geometry,
            growth,
            extra_truncation,
            monomials: MonomialFamily::global(),
            contours: RwLock::new(HashMap::new()),
            weights: RwLock::new(HashMap::new()),
            singles: RwLock::new(HashMap::new()),
            inner_fields: RwLock::new(HashMap::new()),
            doubles: RwLock::new(HashMap::new()),
            words: RwLock::new(HashMap::new()),
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn growth(&self) -> u32 {
        self.growth
    }

    fn contour(&self, r: u32) -> Arc<Contour> {
        if let Some(c) = self.contours.read().get(&r) {
            return c.clone();
        }
        let c = Arc::new(Contour::rectangle(r));
        self.contours.write().entry(r).or_insert(c).clone()
    }

    /// Per-edge factors `(v − u)·z_⋄^[n]` (conjugated for the antianalytic sector)
    /// paired with the edge's medial site.
    fn weights(&self, sector: Sector, n: i64, r: u32) -> Weights {
        if let Some(w) = self.weights.read().get(&(sector, n, r)) {
            return w.clone();
        }
        let gamma = self.contour(r);
        let v: Vec<(PiScalar, Site)> = gamma
            .edges()
            .iter()
            .map(|e| {
                let m = self.monomials.get(n, e.diamond).mul_gaussian(&e.weight());
                (if sector == Sector::Antianalytic { m.conj() } else { m }, e.medial)
            })
            .collect();
        let v = Arc::new(v);
        self.weights.write().entry((sector, n, r)).or_insert(v).clone()
    }

    /// `∮ ⟨J(z)φ(x)⟩ z^[n] dz` (without the `π^{−1/2}` prefactor).
    fn single(&self, sector: Sector, n: i64, r: u32, x: Site) -> PiScalar {
        if let Some(v) = self.singles.read().get(&(sector, n, r, x)) {
            return v.clone();
        }
        let mut acc = PiScalar::zero();
        for (c, m) in self.weights(sector, n, r).iter() {
            acc.add_mul(c, &cov_j_phi(self.geometry, CurrentPoint { site: *m, sector }, x));
        }
        self.singles.write().entry((sector, n, r, x)).or_insert(acc).clone()
    }

    /// For each edge `w` of the outer contour, `∮_inner ⟨J(w)J(z)⟩ z^[n] dz`.
    fn inner_field(&self, si: Sector, ni: i64, ri: u32, sl: Sector, rl: u32) -> Arc<Vec<PiScalar>> {
        let key = (si, ni, ri, sl, rl);
        if let Some(v) = self.inner_fields.read().get(&key) {
            return v.clone();
        }
        let inner = self.weights(si, ni, ri);
        let outer = self.contour(rl);
        let v: Vec<PiScalar> = outer
            .edges()
            .iter()
            .map(|e| {
                let w = CurrentPoint { site: e.medial, sector: sl };
                let mut acc = PiScalar::zero();
                for (c, m) in inner.iter() {
                    let k = cov_j_j(self.geometry, w, CurrentPoint { site: *m, sector: si });
                    if !k.is_zero() {
                        acc.add_mul(c, &k);
                    }
                }
                acc
            })
            .collect();
        let v = Arc::new(v);
        self.inner_fields.write().entry(key).or_insert(v).clone()
    }

    /// `∮_outer ∮_inner ⟨J(w)J(z)⟩ z^[n_i] dz w^[n_l] dw` (without prefactors).
    fn double(&self, si: Sector, ni: i64, ri: u32, sl: Sector, nl: i64, rl: u32) -> PiScalar {
        let key = (si, ni, ri, sl, nl, rl);
        if let Some(v) = self.doubles.read().get(&key) {
            return v.clone();
        }
        let f = self.inner_field(si, ni, ri, sl, rl);
        let mut acc = PiScalar::zero();
        for ((c, _), fv) in self.weights(sl, nl, rl).iter().zip(f.iter()) {
            acc.add_mul(c, fv);
        }
        self.doubles.write().entry(key).or_insert(acc).clone()
    }

    /// Fast evaluation of a current word: Wick pairings are expanded first, so the
    /// integral factorizes into cached single and double contour integrals.
    pub fn word_value(&self, word: &[(Sector, i64)], fields: &[Site]) -> PiScalar {
        if is_wick_odd(word, fields) {
            return PiScalar::zero();
        }
        let mut sorted = fields.to_vec();
        sorted.sort();
        let key = (word.to_vec(), sorted);
        if let Some(v) = self.words.read().get(&key) {
            return v.clone();
        }
        let radii = auto_radii(word, fields, self.growth);
        let j = word.len();
        let mut total = PiScalar::zero();
        for matching in pair_partitions(j + fields.len()) {
            let mut prod = PiScalar::one();
            for (a, b) in matching {
                let f = match (a < j, b < j) {
                    (true, true) => {
                        let (i, l) = (a, b);
                        self.double(word[i].0, word[i].1, radii[i], word[l].0, word[l].1, radii[l])
                    }
                    (true, false) => self.single(word[a].0, word[a].1, radii[a], fields[b - j]),
                    _ => cov_phi(self.geometry, fields[a - j], fields[b - j]),
                };
                if f.is_zero() {
                    prod = PiScalar::zero();
                    break;
                }
                prod = &prod * &f;
            }
            total += &prod;
        }
        let v = total.shift(-(j as i32));
        self.words.write().entry(key).or_insert(v).clone()
    }

    /// Reference evaluation: literal nested sum over all edge tuples with Wick's
    /// formula applied to the full insertion at each tuple.
    pub fn word_value_reference(&self, word: &[(Sector, i64)], fields: &[Site]) -> PiScalar {
        let radii = auto_radii(word, fields, self.growth);
        let weights: Vec<Weights> = word.iter().zip(&radii).map(|(&(s, n), &r)| self.weights(s, n, r)).collect();
        let mut slots: Vec<Slot> = Vec::with_capacity(word.len() + fields.len());
        let mut total = PiScalar::zero();
        self.reference_rec(word, &weights, fields, 0, PiScalar::one(), &mut slots, &mut total);
        total.shift(-(word.len() as i32))
    }

    #[allow(clippy::too_many_arguments)]
    fn reference_rec(
        &self,
        word: &[(Sector, i64)],
        weights: &[Weights],
        fields: &[Site],
        depth: usize,
        coeff: PiScalar,
        slots: &mut Vec<Slot>,
        total: &mut PiScalar,
    ) {
        if depth == word.len() {
            let mut all = slots.clone();
            all.extend(fields.iter().map(|&f| Slot::Field(f)));
            let w = wick(self.geometry, &all);
            total.add_mul(&coeff, &w);
            return;
        }
        for (c, m) in weights[depth].iter() {
            if c.is_zero() {
                continue;
            }
            slots.push(Slot::Current(CurrentPoint { site: *m, sector: word[depth].0 }));
            self.reference_rec(word, weights, fields, depth + 1, &coeff * c, slots, total);
            slots.pop();
        }
    }

    /// `⟨word · P⟩` for a word of arbitrary generators.
    pub fn action(&self, word: &[Generator], fields: &[Site]) -> PiScalar {
        let mut acc = PiScalar::zero();
        for (c, w) in expand(word, fields, self.extra_truncation) {
            let v = self.word_value(&w, fields);
            if !v.is_zero() {
                acc += &v.scale(&c);
            }
        }
        acc
    }

    pub fn combination(&self, comb: &Combination, fields: &[Site]) -> PiScalar {
        let mut acc = PiScalar::zero();
        for (c, w) in &comb.0 {
            let v = self.action(w, fields);
            if !v.is_zero() {
                acc += &v.scale(c);
            }
        }
        acc
    }

    /// Action of a word by the reference evaluator (used only for small cases).
    pub fn action_reference(&self, word: &[Generator], fields: &[Site]) -> PiScalar {
        let mut acc = PiScalar::zero();
        for (c, w) in expand(word, fields, self.extra_truncation) {
            acc += &self.word_value_reference(&w, fields).scale(&c);
        }
        acc
    }
}

/// `⟨𝔞ₙ φ^ℍ(x)⟩` in the half-plane with the lower part of the contour folded onto
/// the upper half-plane through `J^ℍ(z̄) = −J̄^ℍ(z)`, i.e.
/// `⟨J^ℍ(z̄)φ^ℍ(x)⟩ = −conj⟨J^ℍ(z)φ^ℍ(x)⟩`. Cross-check for the direct evaluation.
pub fn half_plane_single_folded(n: i64, r: u32, x: Site) -> PiScalar {
    let gamma = Contour::rectangle(r);
    let fam = MonomialFamily::global();
    let mut acc = PiScalar::zero();
    for e in gamma.edges() {
        let c = fam.get(n, e.diamond).mul_gaussian(&e.weight());
        let cov = if e.medial.qy < 0 {
            -cov_j_phi(Geometry::HalfPlane, CurrentPoint { site: e.medial.conj(), sector: Sector::Analytic }, x).conj()
        } else {
            cov_j_phi(Geometry::HalfPlane, CurrentPoint { site: e.medial, sector: Sector::Analytic }, x)
        };
        acc.add_mul(&c, &cov);
    }
    acc.shift(-1)
}

/// `⟨𝔏ₙ · P⟩` (or `𝔏̄ₙ`).
pub fn sugawara_action(ev: &ModeEvaluator, n: i64, sector: Sector, fields: &[Site]) -> PiScalar {
    ev.action(&[Generator::Virasoro(sector, n)], fields)
}

/// `⟨word · P⟩` for a word of current modes.
pub fn mode_action(ev: &ModeEvaluator, word: &[Generator], fields: &[Site]) -> PiScalar {
    ev.action(word, fields)
}

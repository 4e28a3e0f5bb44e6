//! Sites of the refined grid `(¼ℤ)²` and the finite-difference operators
//! `∂`, `∂̄` and `Δ`.
//!
//! A [`Site`] stores integer quarter-unit coordinates, so the primal lattice,
//! its dual, the medial lattice and the contour grid all live on one integer
//! grid without fractions.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use parking_lot::RwLock;

use crate::scalar::{rat, GaussianRational, PiScalar};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site {
    pub qx: i64,
    pub qy: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteClass {
    Vertex,
    Dual,
    MedialH,
    MedialV,
    ContourNode,
    /// Midpoints of contour edges (one coordinate odd, the other even).
    Other,
}

impl Site {
    pub const ORIGIN: Site = Site { qx: 0, qy: 0 };

    pub const fn new(qx: i64, qy: i64) -> Site {
        Site { qx, qy }
    }

    /// The primal vertex `x + iy`.
    pub const fn vertex(x: i64, y: i64) -> Site {
        Site { qx: 4 * x, qy: 4 * y }
    }

    /// Point given in half units, `(hx + i·hy)/2`.
    pub const fn half(hx: i64, hy: i64) -> Site {
        Site { qx: 2 * hx, qy: 2 * hy }
    }

    pub fn class(self) -> SiteClass {
        let (x, y) = (self.qx.rem_euclid(4), self.qy.rem_euclid(4));
        match (x, y) {
            (0, 0) => SiteClass::Vertex,
            (2, 2) => SiteClass::Dual,
            (2, 0) => SiteClass::MedialH,
            (0, 2) => SiteClass::MedialV,
            _ if x % 2 == 1 && y % 2 == 1 => SiteClass::ContourNode,
            _ => SiteClass::Other,
        }
    }

    pub fn is_diamond(self) -> bool {
        matches!(self.class(), SiteClass::Vertex | SiteClass::Dual)
    }

    pub fn is_medial(self) -> bool {
        matches!(self.class(), SiteClass::MedialH | SiteClass::MedialV)
    }

    /// `‖z‖₁` in quarter units.
    pub fn norm1_q(self) -> i64 {
        self.qx.abs() + self.qy.abs()
    }

    /// `‖z‖₁ ≤ r_q / 4`.
    pub fn in_ball_q(self, r_q: i64) -> bool {
        self.norm1_q() <= r_q
    }

    pub fn conj(self) -> Site {
        Site { qx: self.qx, qy: -self.qy }
    }

    /// Multiplication by `i`.
    pub fn rot(self) -> Site {
        Site { qx: -self.qy, qy: self.qx }
    }

    /// The complex number this site represents.
    pub fn value(self) -> GaussianRational {
        GaussianRational::new(rat(self.qx, 4), rat(self.qy, 4))
    }

    pub fn scalar(self) -> PiScalar {
        PiScalar::from_gaussian(self.value())
    }

    pub fn shifted(self, dqx: i64, dqy: i64) -> Site {
        Site { qx: self.qx + dqx, qy: self.qy + dqy }
    }

    /// All sites of the given classes with `‖z‖₁ ≤ r_q/4`, in lexicographic order.
    pub fn ball(classes: ClassSet, r_q: i64) -> Vec<Site> {
        let mut out = Vec::new();
        for qx in -r_q..=r_q {
            let rest = r_q - qx.abs();
            for qy in -rest..=rest {
                let s = Site::new(qx, qy);
                if classes.contains(s.class()) {
                    out.push(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}/4, {}/4)", self.qx, self.qy)
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site { qx: self.qx + o.qx, qy: self.qy + o.qy }
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site { qx: self.qx - o.qx, qy: self.qy - o.qy }
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site { qx: -self.qx, qy: -self.qy }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassSet(u8);

impl ClassSet {
    pub const VERTEX: ClassSet = ClassSet(1);
    pub const DUAL: ClassSet = ClassSet(2);
    pub const MEDIAL_H: ClassSet = ClassSet(4);
    pub const MEDIAL_V: ClassSet = ClassSet(8);
    pub const DIAMOND: ClassSet = ClassSet(1 | 2);
    pub const MEDIAL: ClassSet = ClassSet(4 | 8);
    pub const ALL: ClassSet = ClassSet(15);

    pub fn of(c: SiteClass) -> ClassSet {
        match c {
            SiteClass::Vertex => Self::VERTEX,
            SiteClass::Dual => Self::DUAL,
            SiteClass::MedialH => Self::MEDIAL_H,
            SiteClass::MedialV => Self::MEDIAL_V,
            _ => ClassSet(0),
        }
    }

    pub fn contains(self, c: SiteClass) -> bool {
        let o = Self::of(c).0;
        o != 0 && self.0 & o == o
    }

    pub fn union(self, o: ClassSet) -> ClassSet {
        ClassSet(self.0 | o.0)
    }
}

impl fmt::Display for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["vertex", "dual", "medial-h", "medial-v"];
        let v: Vec<&str> = (0..4).filter(|i| self.0 & (1 << i) != 0).map(|i| names[i]).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// A function on some of the four site classes.
pub trait LatticeFunction {
    fn domain(&self) -> ClassSet;

    /// Value at a site already known to be in the domain.
    fn value(&self, z: Site) -> PiScalar;

    fn eval(&self, z: Site) -> Result<PiScalar, Error> {
        if self.domain().contains(z.class()) {
            Ok(self.value(z))
        } else {
            Err(Error::Domain { site: z.to_string(), domain: self.domain().to_string() })
        }
    }
}

impl<T: LatticeFunction + ?Sized> LatticeFunction for &T {
    fn domain(&self) -> ClassSet {
        (**self).domain()
    }
    fn value(&self, z: Site) -> PiScalar {
        (**self).value(z)
    }
}

/// A lattice function given by a closure.
pub struct FnLattice<F> {
    domain: ClassSet,
    f: F,
}

impl<F: Fn(Site) -> PiScalar> FnLattice<F> {
    pub fn new(domain: ClassSet, f: F) -> Self {
        FnLattice { domain, f }
    }
}

impl<F: Fn(Site) -> PiScalar> LatticeFunction for FnLattice<F> {
    fn domain(&self) -> ClassSet {
        self.domain
    }
    fn value(&self, z: Site) -> PiScalar {
        (self.f)(z)
    }
}

/// Memoizing wrapper. Concurrent evaluations of the same site may both compute
/// it; the first insertion wins and both results are equal.
pub struct Memo<F> {
    inner: F,
    cache: RwLock<HashMap<Site, PiScalar>>,
}

impl<F: LatticeFunction> Memo<F> {
    pub fn new(inner: F) -> Self {
        Memo { inner, cache: RwLock::new(HashMap::new()) }
    }
}

impl<F: LatticeFunction> LatticeFunction for Memo<F> {
    fn domain(&self) -> ClassSet {
        self.inner.domain()
    }
    fn value(&self, z: Site) -> PiScalar {
        if let Some(v) = self.cache.read().get(&z) {
            return v.clone();
        }
        let v = self.inner.value(z);
        self.cache.write().entry(z).or_insert(v).clone()
    }
}

/// The offsets `a ∈ {½, −½, i/2, −i/2}` in quarter units.
pub const HALF_STEPS: [(i64, i64); 4] = [(2, 0), (-2, 0), (0, 2), (0, -2)];

/// The unit steps `ξ ∈ {1, −1, i, −i}` in quarter units.
pub const UNIT_STEPS: [(i64, i64); 4] = [(4, 0), (-4, 0), (0, 4), (0, -4)];

/// `Σ_a w(a)·f(z+a)` where `w(a) = ā` for `∂` and `a` for `∂̄`.
fn half_step_sum<F: Fn(Site) -> PiScalar>(f: F, z: Site, bar: bool) -> PiScalar {
    let [p, m, u, d] = HALF_STEPS.map(|(dx, dy)| f(z.shifted(dx, dy)));
    let horizontal = (&p - &m).scale(&rat(1, 2));
    let vertical = (&u - &d).mul_gaussian(&GaussianRational::imag(rat(if bar { 1 } else { -1 }, 2)));
    horizontal + vertical
}

/// `[∂f](z)` for an unchecked evaluator.
pub fn dee_with<F: Fn(Site) -> PiScalar>(f: F, z: Site) -> PiScalar {
    half_step_sum(f, z, false)
}

/// `[∂̄f](z)` for an unchecked evaluator.
pub fn dbar_with<F: Fn(Site) -> PiScalar>(f: F, z: Site) -> PiScalar {
    half_step_sum(f, z, true)
}

fn check_neighbors<L: LatticeFunction + ?Sized>(f: &L, z: Site, steps: &[(i64, i64)]) -> Result<(), Error> {
    for &(dx, dy) in steps {
        let s = z.shifted(dx, dy);
        if !f.domain().contains(s.class()) {
            return Err(Error::Domain { site: s.to_string(), domain: f.domain().to_string() });
        }
    }
    Ok(())
}

/// `[∂f](z) = Σ_a ā f(z+a)`.
pub fn dee<L: LatticeFunction + ?Sized>(f: &L, z: Site) -> Result<PiScalar, Error> {
    check_neighbors(f, z, &HALF_STEPS)?;
    Ok(dee_with(|s| f.value(s), z))
}

/// `[∂̄f](z) = Σ_a a f(z+a)`.
pub fn dbar<L: LatticeFunction + ?Sized>(f: &L, z: Site) -> Result<PiScalar, Error> {
    check_neighbors(f, z, &HALF_STEPS)?;
    Ok(dbar_with(|s| f.value(s), z))
}

/// `[Δf](z) = ¼ Σ_ξ f(z+ξ) − f(z)`.
pub fn laplacian<L: LatticeFunction + ?Sized>(f: &L, z: Site) -> Result<PiScalar, Error> {
    check_neighbors(f, z, &UNIT_STEPS)?;
    let here = f.eval(z)?;
    let nb: PiScalar = UNIT_STEPS.iter().map(|&(dx, dy)| f.value(z.shifted(dx, dy))).sum();
    Ok(nb.scale(&rat(1, 4)) - here)
}

/// `∂f` as a new lattice function (on medial sites if `f` lives on the diamond
/// and vice versa).
pub struct Dee<L>(pub L, pub bool);

impl<L: LatticeFunction> LatticeFunction for Dee<L> {
    fn domain(&self) -> ClassSet {
        let d = self.0.domain();
        let mut out = ClassSet(0);
        if d.contains(SiteClass::Vertex) && d.contains(SiteClass::Dual) {
            out = out.union(ClassSet::MEDIAL);
        }
        if d.contains(SiteClass::MedialH) && d.contains(SiteClass::MedialV) {
            out = out.union(ClassSet::DIAMOND);
        }
        out
    }
    fn value(&self, z: Site) -> PiScalar {
        half_step_sum(|s| self.0.value(s), z, self.1)
    }
}

/// Checks `Σ_{ℤ²_m} f·[∂g] = −Σ_{ℤ²_⋄} [∂f]·g` and the `∂̄` analogue exactly,
/// assuming `f` or `g` vanishes outside `‖z‖₁ ≤ window_q/4`.
pub fn transpose_identity_check<F, G>(f: &F, g: &G, window_q: i64) -> Result<bool, Error>
where
    F: LatticeFunction + ?Sized,
    G: LatticeFunction + ?Sized,
{
    let reach = window_q + 4;
    let medial = Site::ball(ClassSet::MEDIAL, reach);
    let diamond = Site::ball(ClassSet::DIAMOND, reach);
    for bar in [false, true] {
        let mut lhs = PiScalar::zero();
        for &z in &medial {
            let dg = if bar { dbar(g, z)? } else { dee(g, z)? };
            lhs.add_mul(&f.eval(z)?, &dg);
        }
        let mut rhs = PiScalar::zero();
        for &w in &diamond {
            let df = if bar { dbar(f, w)? } else { dee(f, w)? };
            rhs.add_mul(&df, &g.eval(w)?);
        }
        if lhs != -rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn classification() {
        assert_eq!(Site::vertex(1, -2).class(), SiteClass::Vertex);
        assert_eq!(Site::half(1, 1).class(), SiteClass::Dual);
        assert_eq!(Site::half(1, 0).class(), SiteClass::MedialH);
        assert_eq!(Site::half(0, -1).class(), SiteClass::MedialV);
        assert_eq!(Site::new(3, -1).class(), SiteClass::ContourNode);
        assert_eq!(Site::new(2, 1).class(), SiteClass::Other);
        assert_eq!(Site::half(3, 1).norm1_q(), 8);
    }

    #[test]
    fn dee_of_identity_and_constants() {
        let id = FnLattice::new(ClassSet::ALL, |s: Site| s.scalar());
        let one = FnLattice::new(ClassSet::ALL, |_| PiScalar::one());
        let cj = FnLattice::new(ClassSet::ALL, |s: Site| s.conj().scalar());
        for z in [Site::half(1, 0), Site::half(0, 3), Site::vertex(2, 1), Site::half(1, 1)] {
            assert_eq!(dee(&id, z).unwrap(), PiScalar::one());
            assert!(dbar(&id, z).unwrap().is_zero());
            assert!(dee(&one, z).unwrap().is_zero());
            assert_eq!(dbar(&cj, z).unwrap(), PiScalar::one());
        }
    }

    #[test]
    fn domain_errors() {
        let f = FnLattice::new(ClassSet::DIAMOND, |_| PiScalar::one());
        assert!(dee(&f, Site::vertex(0, 0)).is_err());
        assert!(f.eval(Site::half(1, 0)).is_err());
    }

    #[test]
    fn transpose_single_sites() {
        let m0 = Site::half(1, 0);
        let f = FnLattice::new(ClassSet::MEDIAL, move |s| PiScalar::from_int((s == m0) as i64));
        let g = FnLattice::new(ClassSet::DIAMOND, |s: Site| PiScalar::from_int((s == Site::vertex(1, 0)) as i64));
        assert!(transpose_identity_check(&f, &g, 4).unwrap());
        let ones = FnLattice::new(ClassSet::DIAMOND, |_| PiScalar::from_rational(int(1)));
        assert!(transpose_identity_check(&f, &ones, 4).unwrap());
    }
}

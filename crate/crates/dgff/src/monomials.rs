//! Discrete Laurent monomials `z^[k]` on the diamond and medial lattices.
//!
//! * `z^[0] = 1`, `z^[1] = z`;
//! * `z^[−1] = 2π𝖪(z)` on medial sites and `(π/2) Σ_a 𝖪(z−a)` on the diamond;
//! * `z^[k−1] = −(1/(−k)) [∂z^[k]]` for `k ≤ −1`, i.e. iterated derivatives of `z^[−1]`;
//! * for `k ≥ 2`, `z^[k]` is the discrete primitive of `k·z^[k−1]`, integrated
//!   along axis-first staircases from `0`, `½`, `i/2` or `(1+i)/2` depending on
//!   the sublattice. The dual-lattice constant is fixed by requiring
//!   `Σ_{a = ±(1±i)/2} a^[k] = 0`.

use std::collections::HashMap;
use std::sync::OnceLock;

use parking_lot::RwLock;

use crate::kernel::PotentialKernel;
use crate::lattice::{dee_with, ClassSet, LatticeFunction, Site, SiteClass, HALF_STEPS};
use crate::scalar::{int, rat, GaussianRational, PiScalar};
use crate::Error;

pub struct MonomialFamily {
    kernel: &'static PotentialKernel,
    cache: RwLock<HashMap<(i64, Site), PiScalar>>,
    dual_constants: RwLock<HashMap<i64, PiScalar>>,
    /// Added to every computed dual constant; only nonzero in mutation tests.
    dual_perturbation: Option<(i64, PiScalar)>,
}

fn class_error(z: Site) -> Error {
    Error::Domain { site: z.to_string(), domain: ClassSet::ALL.to_string() }
}

impl MonomialFamily {
    pub fn new(kernel: &'static PotentialKernel) -> Self {
        MonomialFamily {
            kernel,
            cache: RwLock::new(HashMap::new()),
            dual_constants: RwLock::new(HashMap::new()),
            dual_perturbation: None,
        }
    }

    pub fn global() -> &'static MonomialFamily {
        static M: OnceLock<MonomialFamily> = OnceLock::new();
        M.get_or_init(|| MonomialFamily::new(PotentialKernel::global()))
    }

    /// A deliberately broken family whose order-`k` dual constant is shifted by `delta`.
    pub fn with_dual_perturbation(kernel: &'static PotentialKernel, k: i64, delta: PiScalar) -> Self {
        let mut m = Self::new(kernel);
        m.dual_perturbation = Some((k, delta));
        m
    }

    pub fn monomial(&self, k: i64, z: Site) -> Result<PiScalar, Error> {
        if ClassSet::ALL.contains(z.class()) {
            Ok(self.get(k, z))
        } else {
            Err(class_error(z))
        }
    }

    /// `z^[k]` for a site known to be in `ℤ²_⋄ ∪ ℤ²_m`.
    pub fn get(&self, k: i64, z: Site) -> PiScalar {
        match k {
            0 => return PiScalar::one(),
            1 => return z.scalar(),
            _ => {}
        }
        if let Some(v) = self.cache.read().get(&(k, z)) {
            return v.clone();
        }
        let v = if k < 0 { self.negative(k, z) } else { self.positive(k, z) };
        self.cache.write().entry((k, z)).or_insert(v).clone()
    }

    fn negative(&self, k: i64, z: Site) -> PiScalar {
        if k == -1 {
            if z.is_medial() {
                return self.kernel.k(z).shift(2).scale(&int(2));
            }
            let s: PiScalar = HALF_STEPS.iter().map(|&(dx, dy)| self.kernel.k(z.shifted(-dx, -dy))).sum();
            return s.shift(2).scale(&rat(1, 2));
        }
        dee_with(|s| self.get(k + 1, s), z).scale(&rat(-1, -k - 1))
    }

    fn basepoint(class: SiteClass) -> Site {
        match class {
            SiteClass::Vertex => Site::ORIGIN,
            SiteClass::MedialH => Site::half(1, 0),
            SiteClass::MedialV => Site::half(0, 1),
            _ => Site::half(1, 1),
        }
    }

    /// `(w−u)·k·z^[k−1]((u+w)/2)` for one unit edge.
    fn edge(&self, k: i64, u: Site, w: Site) -> PiScalar {
        let mid = Site::new((u.qx + w.qx) / 2, (u.qy + w.qy) / 2);
        let step = (w - u).value();
        self.get(k - 1, mid).mul_gaussian(&step.scale(&int(k)))
    }

    /// Walks the axis-first staircase from the basepoint, caching each point.
    fn integrate_from_base(&self, k: i64, z: Site, base_value: PiScalar) -> PiScalar {
        let b = Self::basepoint(z.class());
        let mut cur = b;
        let mut acc = base_value;
        let walk = |cur: &mut Site, acc: &mut PiScalar, dx: i64, dy: i64| {
            let next = cur.shifted(dx, dy);
            *acc += &self.edge(k, *cur, next);
            *cur = next;
            if cur.class() != SiteClass::Dual || self.dual_constants.read().contains_key(&k) {
                self.cache.write().entry((k, *cur)).or_insert_with(|| acc.clone());
            }
        };
        while cur.qx != z.qx {
            let s = 4 * (z.qx - cur.qx).signum();
            walk(&mut cur, &mut acc, s, 0);
        }
        while cur.qy != z.qy {
            let s = 4 * (z.qy - cur.qy).signum();
            walk(&mut cur, &mut acc, 0, s);
        }
        acc
    }

    fn dual_constant(&self, k: i64) -> PiScalar {
        if let Some(c) = self.dual_constants.read().get(&k) {
            return c.clone();
        }
        let corners = [Site::half(1, 1), Site::half(-1, 1), Site::half(-1, -1), Site::half(1, -1)];
        let sum: PiScalar = corners.iter().map(|&c| self.integrate_from_base(k, c, PiScalar::zero())).sum();
        let mut c = sum.scale(&rat(-1, 4));
        if let Some((kk, delta)) = &self.dual_perturbation {
            if *kk == k {
                c += delta;
            }
        }
        self.dual_constants.write().entry(k).or_insert(c).clone()
    }

    fn positive(&self, k: i64, z: Site) -> PiScalar {
        // Basepoint values vanish: 0^[k] = 0, and (½)^[k] = −(−½)^[k] together with the
        // edge integral k·0^[k−1] = 0 between them gives (½)^[k] = 0 (likewise i/2).
        let base = if z.class() == SiteClass::Dual { self.dual_constant(k) } else { PiScalar::zero() };
        self.integrate_from_base(k, z, base)
    }

    /// `Σ (w−u)·k·z^[k−1]((u+w)/2)` along a path on a single translate of ℤ².
    pub fn path_integral(&self, k: i64, path: &[Site]) -> Result<PiScalar, Error> {
        let mut acc = PiScalar::zero();
        if let Some(first) = path.first() {
            if !ClassSet::ALL.contains(first.class()) {
                return Err(Error::Path(first.to_string()));
            }
        }
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            let d = v - u;
            if v.class() != u.class() || d.qx.abs() + d.qy.abs() != 4 {
                return Err(Error::Path(v.to_string()));
            }
            acc += &self.edge(k, u, v);
        }
        Ok(acc)
    }

    /// `z ↦ z^[k]` as a lattice function.
    pub fn function(&self, k: i64) -> Monomial<'_> {
        Monomial { family: self, k }
    }
}

pub struct Monomial<'a> {
    family: &'a MonomialFamily,
    k: i64,
}

impl LatticeFunction for Monomial<'_> {
    fn domain(&self) -> ClassSet {
        ClassSet::ALL
    }
    fn value(&self, z: Site) -> PiScalar {
        self.family.get(self.k, z)
    }
}

pub fn monomial(k: i64, z: Site) -> Result<PiScalar, Error> {
    MonomialFamily::global().monomial(k, z)
}

pub fn path_integral_monomial(k: i64, path: &[Site]) -> Result<PiScalar, Error> {
    MonomialFamily::global().path_integral(k, path)
}

/// `i^k` as a Gaussian rational.
pub fn i_pow(k: i64) -> GaussianRational {
    GaussianRational::one().mul_i_pow(k)
}

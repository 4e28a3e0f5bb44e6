//! Discrete contours on `(½ℤ + ¼)²`, product integrals of a medial function
//! against a diamond function, the discrete Stokes formula and the residue
//! pairing of Laurent monomials.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lattice::{dbar_with, ClassSet, LatticeFunction, Site, SiteClass};
use crate::monomials::MonomialFamily;
use crate::scalar::{GaussianRational, PiScalar};
use crate::Error;

/// One oriented step `u → v` with its flanking medial and diamond sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: Site,
    pub v: Site,
    pub medial: Site,
    pub diamond: Site,
}

impl Edge {
    /// `v − u`.
    pub fn weight(&self) -> GaussianRational {
        (self.v - self.u).value()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contour {
    nodes: Vec<Site>,
    edges: Vec<Edge>,
    int_m: BTreeSet<Site>,
    int_d: BTreeSet<Site>,
    closure_m: BTreeSet<Site>,
    closure_d: BTreeSet<Site>,
}

impl Contour {
    /// Validates a closed, simple, counterclockwise node cycle.
    pub fn new(nodes: Vec<Site>) -> Result<Contour, Error> {
        if nodes.len() < 4 {
            return Err(Error::Contour("fewer than four nodes".into()));
        }
        let mut seen = BTreeSet::new();
        for &n in &nodes {
            if n.class() != SiteClass::ContourNode {
                return Err(Error::Contour(format!("{n} is not a contour node")));
            }
            if !seen.insert(n) {
                return Err(Error::Contour(format!("{n} is visited twice")));
            }
        }
        let mut edges = Vec::with_capacity(nodes.len());
        let mut area2 = 0i64;
        for (i, &u) in nodes.iter().enumerate() {
            let v = nodes[(i + 1) % nodes.len()];
            let d = v - u;
            if d.qx.abs() + d.qy.abs() != 2 {
                return Err(Error::Contour(format!("step {u} -> {v} is not of length 1/2")));
            }
            area2 += u.qx * v.qy - v.qx * u.qy;
            let mid = Site::new((u.qx + v.qx) / 2, (u.qy + v.qy) / 2);
            let (a, b) = if d.qx != 0 { (mid.shifted(0, 1), mid.shifted(0, -1)) } else { (mid.shifted(1, 0), mid.shifted(-1, 0)) };
            let (medial, diamond) = if a.is_medial() { (a, b) } else { (b, a) };
            debug_assert!(medial.is_medial() && diamond.is_diamond());
            edges.push(Edge { u, v, medial, diamond });
        }
        if area2 <= 0 {
            return Err(Error::Contour("contour is not positively oriented".into()));
        }
        let mut c = Contour {
            nodes,
            edges,
            int_m: BTreeSet::new(),
            int_d: BTreeSet::new(),
            closure_m: BTreeSet::new(),
            closure_d: BTreeSet::new(),
        };
        let (lo_x, hi_x) = minmax(c.nodes.iter().map(|n| n.qx));
        let (lo_y, hi_y) = minmax(c.nodes.iter().map(|n| n.qy));
        for qx in lo_x..=hi_x {
            for qy in lo_y..=hi_y {
                let s = Site::new(qx, qy);
                if !ClassSet::ALL.contains(s.class()) {
                    continue;
                }
                match c.winding(s) {
                    0 => {}
                    1 => {
                        if s.is_medial() {
                            c.int_m.insert(s);
                        } else {
                            c.int_d.insert(s);
                        }
                    }
                    w => return Err(Error::Contour(format!("winding number {w} at {s}"))),
                }
            }
        }
        c.closure_m = c.int_m.clone();
        c.closure_d = c.int_d.clone();
        for e in &c.edges {
            c.closure_m.insert(e.medial);
            c.closure_d.insert(e.diamond);
        }
        Ok(c)
    }

    /// Winding number of the node polygon around a site with even coordinates.
    pub fn winding(&self, p: Site) -> i64 {
        let mut w = 0;
        for e in &self.edges {
            if e.u.qx != e.v.qx || e.u.qx < p.qx {
                continue;
            }
            let (y0, y1) = (e.u.qy, e.v.qy);
            if y0 < p.qy && p.qy < y1 {
                w += 1;
            } else if y1 < p.qy && p.qy < y0 {
                w -= 1;
            }
        }
        w
    }

    /// Axis-aligned square through the nodes `±(r + ¾)`, traversed counterclockwise
    /// from the lower left corner.
    pub fn rectangle(r: u32) -> Contour {
        let c = 4 * r as i64 + 3;
        let mut nodes = Vec::new();
        let mut push_side = |from: (i64, i64), step: (i64, i64)| {
            for k in 0..c {
                nodes.push(Site::new(from.0 + 2 * k * step.0, from.1 + 2 * k * step.1));
            }
        };
        push_side((-c, -c), (1, 0));
        push_side((c, -c), (0, 1));
        push_side((c, c), (-1, 0));
        push_side((-c, c), (0, -1));
        Contour::new(nodes).expect("rectangles are valid contours")
    }

    /// Boundary of a union of half-unit cells centred at the given even-coordinate
    /// sites. Fails unless the union is simply connected with a simple boundary.
    pub fn from_cells(cells: &[Site]) -> Result<Contour, Error> {
        let mut edges: BTreeSet<(Site, Site)> = BTreeSet::new();
        for c in cells {
            if c.qx % 2 != 0 || c.qy % 2 != 0 {
                return Err(Error::Contour(format!("cell centre {c} is not on the even grid")));
            }
            let k = [c.shifted(-1, -1), c.shifted(1, -1), c.shifted(1, 1), c.shifted(-1, 1)];
            for i in 0..4 {
                let (u, v) = (k[i], k[(i + 1) % 4]);
                if !edges.remove(&(v, u)) && !edges.insert((u, v)) {
                    return Err(Error::Contour(format!("cell {c} listed twice")));
                }
            }
        }
        let mut next = std::collections::BTreeMap::new();
        for &(u, v) in &edges {
            if next.insert(u, v).is_some() {
                return Err(Error::Contour(format!("boundary touches itself at {u}")));
            }
        }
        let Some((&start, _)) = next.iter().next() else {
            return Err(Error::Contour("no cells".into()));
        };
        let mut nodes = vec![start];
        let mut cur = next[&start];
        while cur != start {
            nodes.push(cur);
            cur = next[&cur];
        }
        if nodes.len() != edges.len() {
            return Err(Error::Contour("cell union is not simply connected".into()));
        }
        Contour::new(nodes)
    }

    pub fn nodes(&self) -> &[Site] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn int_m(&self) -> &BTreeSet<Site> {
        &self.int_m
    }

    pub fn int_d(&self) -> &BTreeSet<Site> {
        &self.int_d
    }

    pub fn closure_m(&self) -> &BTreeSet<Site> {
        &self.closure_m
    }

    pub fn closure_d(&self) -> &BTreeSet<Site> {
        &self.closure_d
    }

    /// Whether every diamond and medial site with `‖z‖₁ ≤ r_q/4` is encircled.
    pub fn separates_ball_q(&self, r_q: i64) -> bool {
        if r_q < 0 {
            return true;
        }
        Site::ball(ClassSet::ALL, r_q).into_iter().all(|s| self.int_m.contains(&s) || self.int_d.contains(&s))
    }

    /// Whether `inner`'s closure lies in this contour's interior.
    pub fn encloses(&self, inner: &Contour) -> bool {
        inner.closure_m.iter().all(|s| self.int_m.contains(s)) && inner.closure_d.iter().all(|s| self.int_d.contains(s))
    }
}

fn minmax(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

impl Serialize for Contour {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[i64; 2]> = self.nodes.iter().map(|n| [n.qx, n.qy]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Contour {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<[i64; 2]> = Vec::deserialize(d)?;
        Contour::new(v.into_iter().map(|[x, y]| Site::new(x, y)).collect()).map_err(serde::de::Error::custom)
    }
}

fn oriented_integral<F, G>(f: &F, g: &G, gamma: &Contour, reversed: bool) -> Result<PiScalar, Error>
where
    F: LatticeFunction + ?Sized,
    G: LatticeFunction + ?Sized,
{
    let mut acc = PiScalar::zero();
    for e in gamma.edges() {
        let fg = &f.eval(e.medial)? * &g.eval(e.diamond)?;
        let w = if reversed { -&e.weight() } else { e.weight() };
        acc += &fg.mul_gaussian(&w);
    }
    Ok(acc)
}

/// `∮ f g dz = Σ_edges (v − u)·f(z_m)·g(z_⋄)`.
pub fn product_integral<F, G>(f: &F, g: &G, gamma: &Contour) -> Result<PiScalar, Error>
where
    F: LatticeFunction + ?Sized,
    G: LatticeFunction + ?Sized,
{
    oriented_integral(f, g, gamma, false)
}

/// The same sum along the contour traversed clockwise.
pub fn product_integral_reversed<F, G>(f: &F, g: &G, gamma: &Contour) -> Result<PiScalar, Error>
where
    F: LatticeFunction + ?Sized,
    G: LatticeFunction + ?Sized,
{
    oriented_integral(f, g, gamma, true)
}

/// `i Σ_{int_m} f·[∂̄g] + i Σ_{int_d} [∂̄f]·g`.
pub fn stokes_sum<F, G>(f: &F, g: &G, gamma: &Contour) -> Result<PiScalar, Error>
where
    F: LatticeFunction + ?Sized,
    G: LatticeFunction + ?Sized,
{
    let mut acc = PiScalar::zero();
    for &z in gamma.int_m() {
        let fz = f.eval(z)?;
        if fz.is_zero() {
            continue;
        }
        acc.add_mul(&fz, &dbar_checked(g, z)?);
    }
    for &w in gamma.int_d() {
        let gw = g.eval(w)?;
        if gw.is_zero() {
            continue;
        }
        acc.add_mul(&dbar_checked(f, w)?, &gw);
    }
    Ok(acc.mul_gaussian(&GaussianRational::i()))
}

fn dbar_checked<L: LatticeFunction + ?Sized>(f: &L, z: Site) -> Result<PiScalar, Error> {
    crate::lattice::dbar(f, z)?;
    Ok(dbar_with(|s| f.value(s), z))
}

/// `ρ(m, n) = max(0, −m/2, −n/2)` in quarter units.
pub fn residue_ball_q(m: i64, n: i64) -> i64 {
    2 * 0.max(-m).max(-n)
}

/// Smallest rectangle radius whose interior contains `B̄(ρ(m, n))`.
pub fn residue_min_radius(m: i64, n: i64) -> u32 {
    let rq = residue_ball_q(m, n);
    // The rectangle of radius r encircles exactly |qx|, |qy| ≤ 4r + 2.
    ((rq - 2).max(0) as u32).div_ceil(4)
}

/// `(1/2πi) ∮ z^[m] z^[n] dz`, with `z^[m]` read on medial and `z^[n]` on diamond sites.
pub fn residue_pairing(m: i64, n: i64, gamma: &Contour) -> Result<PiScalar, Error> {
    let rq = residue_ball_q(m, n);
    if !gamma.separates_ball_q(rq) {
        return Err(Error::ContourTooSmall(format!("contour does not enclose the ball of radius {}/4", rq)));
    }
    let fam = MonomialFamily::global();
    let v = product_integral(&fam.function(m), &fam.function(n), gamma)?;
    let two_pi_i = PiScalar::term(2, GaussianRational::imag(crate::scalar::int(2)));
    v.checked_div(&two_pi_i)
}

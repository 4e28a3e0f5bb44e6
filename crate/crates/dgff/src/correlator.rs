//! Gaussian correlations of the pinned full-plane field, the Dirichlet
//! half-plane field and their currents, via Wick's formula.
//!
//! The field is extended by zero to the dual lattice. The two-point functions
//! of the currents `J = [∂φ]`, `J̄ = [∂̄φ]` used here are
//!
//! * `⟨J(z)φ(x)⟩ = 𝖪(z) − 𝖪(z−x)` (and its conjugate for `J̄`),
//! * `⟨J(z)J(w)⟩ = ½[∂𝖪](w−z) + ½ s(z) δ_{z,w}` with `s = +1` on horizontal and
//!   `−1` on vertical medial sites, which is `∂_z ∂_w` of the field covariance,
//! * `⟨J(z)J̄(w)⟩ = ½[∂̄𝖪](w−z) = ½ δ_{z,w}`,
//!
//! and in the half-plane `φ^ℍ` has covariance `𝖺(x−ȳ) − 𝖺(x−y)`, so
//! `⟨J^ℍ(z)φ^ℍ(x)⟩ = 𝖪(z−x̄) − 𝖪(z−x)` and
//! `⟨J^ℍ(z)J^ℍ(w)⟩ = ⟨J(z)J(w)⟩ − ½ δ_{z,w̄}`.

use serde::{Deserialize, Serialize};

use crate::kernel::{solve_box, PotentialKernel};
use crate::lattice::{Site, SiteClass};
use crate::scalar::{rat, PiScalar};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    FullPlane,
    HalfPlane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Analytic,
    Antianalytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurrentPoint {
    pub site: Site,
    pub sector: Sector,
}

/// Currents (in radial order, innermost first) and field points sharing one geometry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertionList {
    pub geometry: Geometry,
    #[serde(default)]
    pub currents: Vec<CurrentJson>,
    #[serde(default)]
    pub fields: Vec<[i64; 2]>,
}

/// JSON form of a current: medial site in quarter units plus sector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurrentJson {
    pub site: [i64; 2],
    #[serde(default = "analytic")]
    pub sector: Sector,
}

fn analytic() -> Sector {
    Sector::Analytic
}

impl InsertionList {
    pub fn new(geometry: Geometry, currents: &[CurrentPoint], fields: &[Site]) -> Result<Self, Error> {
        let l = InsertionList {
            geometry,
            currents: currents.iter().map(|c| CurrentJson { site: [c.site.qx, c.site.qy], sector: c.sector }).collect(),
            fields: fields.iter().map(|s| [s.qx, s.qy]).collect(),
        };
        l.validate()?;
        Ok(l)
    }

    pub fn current_points(&self) -> Vec<CurrentPoint> {
        self.currents.iter().map(|c| CurrentPoint { site: Site::new(c.site[0], c.site[1]), sector: c.sector }).collect()
    }

    pub fn field_points(&self) -> Vec<Site> {
        self.fields.iter().map(|f| Site::new(f[0], f[1])).collect()
    }

    pub fn validate(&self) -> Result<(), Error> {
        for c in self.current_points() {
            if !c.site.is_medial() {
                return Err(Error::Insertion(format!("current at non-medial site {}", c.site)));
            }
            if self.geometry == Geometry::HalfPlane && c.sector == Sector::Antianalytic {
                return Err(Error::Insertion("antianalytic currents are not defined in the half-plane".into()));
            }
        }
        for f in self.field_points() {
            if !f.is_diamond() {
                return Err(Error::Insertion(format!("field at non-diamond site {f}")));
            }
            if self.geometry == Geometry::HalfPlane && f.qy <= 0 {
                return Err(Error::Insertion(format!("half-plane field point {f} is not in the upper half-plane")));
            }
        }
        Ok(())
    }
}

fn kern() -> &'static PotentialKernel {
    PotentialKernel::global()
}

/// `⟨φ(x)φ(y)⟩`.
pub fn cov_phi(geometry: Geometry, x: Site, y: Site) -> PiScalar {
    if x.class() != SiteClass::Vertex || y.class() != SiteClass::Vertex {
        return PiScalar::zero();
    }
    let k = kern();
    let (ax, ay) = (x.qx / 4, x.qy / 4);
    let (bx, by) = (y.qx / 4, y.qy / 4);
    match geometry {
        Geometry::FullPlane => &(&k.a(ax, ay) + &k.a(bx, by)) - &k.a(ax - bx, ay - by),
        Geometry::HalfPlane => &k.a(ax - bx, ay + by) - &k.a(ax - bx, ay - by),
    }
}

/// `⟨J(z)φ(x)⟩` (or `⟨J̄(z)φ(x)⟩`).
pub fn cov_j_phi(geometry: Geometry, z: CurrentPoint, x: Site) -> PiScalar {
    if x.class() != SiteClass::Vertex {
        return PiScalar::zero();
    }
    let k = kern();
    let v = match geometry {
        Geometry::FullPlane => &k.k(z.site) - &k.k(z.site - x),
        Geometry::HalfPlane => &k.k(z.site - x.conj()) - &k.k(z.site - x),
    };
    match z.sector {
        Sector::Analytic => v,
        Sector::Antianalytic => v.conj(),
    }
}

fn orientation_sign(z: Site) -> i64 {
    if z.class() == SiteClass::MedialH {
        1
    } else {
        -1
    }
}

/// `⟨J(z)J(w)⟩` for any pair of sectors.
pub fn cov_j_j(geometry: Geometry, z: CurrentPoint, w: CurrentPoint) -> PiScalar {
    let half = rat(1, 2);
    if z.sector != w.sector {
        return if z.site == w.site { PiScalar::from_rational(half) } else { PiScalar::zero() };
    }
    let mut v = kern().dk(w.site - z.site).scale(&half);
    if z.site == w.site {
        v += &PiScalar::from_ratio(orientation_sign(z.site), 2);
    }
    if geometry == Geometry::HalfPlane && z.site == w.site.conj() {
        v -= &PiScalar::from_rational(half);
    }
    match z.sector {
        Sector::Analytic => v,
        Sector::Antianalytic => v.conj(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Current(CurrentPoint),
    Field(Site),
}

pub fn covariance(geometry: Geometry, a: Slot, b: Slot) -> PiScalar {
    match (a, b) {
        (Slot::Field(x), Slot::Field(y)) => cov_phi(geometry, x, y),
        (Slot::Current(z), Slot::Field(x)) | (Slot::Field(x), Slot::Current(z)) => cov_j_phi(geometry, z, x),
        (Slot::Current(z), Slot::Current(w)) => cov_j_j(geometry, z, w),
    }
}

/// All perfect matchings of `0..n`, each as a list of pairs `(i, j)` with `i < j`,
/// built by pairing the first unpaired slot with each later one.
pub fn pair_partitions(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(cur.clone());
            return;
        };
        for (i, &partner) in tail.iter().enumerate() {
            let remaining: Vec<usize> = tail.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &s)| s).collect();
            cur.push((first, partner));
            rec(&remaining, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        rec(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    }
    out
}

/// `⟨Π slots⟩` by summing products of covariances over pair partitions.
pub fn wick(geometry: Geometry, slots: &[Slot]) -> PiScalar {
    let mut total = PiScalar::zero();
    for p in pair_partitions(slots.len()) {
        let mut prod = PiScalar::one();
        for (i, j) in p {
            prod = &prod * &covariance(geometry, slots[i], slots[j]);
            if prod.is_zero() {
                break;
            }
        }
        total += &prod;
    }
    total
}

pub fn wick_correlator(ins: &InsertionList) -> Result<PiScalar, Error> {
    ins.validate()?;
    let mut slots: Vec<Slot> = ins.current_points().into_iter().map(Slot::Current).collect();
    slots.extend(ins.field_points().into_iter().map(Slot::Field));
    Ok(wick(ins.geometry, &slots))
}

/// Dirichlet Green's function of `−Δ` on the box `|x| ≤ half_width`,
/// `1 ≤ y ≤ height`, zero outside, evaluated at vertices `z`, `w`.
pub fn dirichlet_box_green(z: (i64, i64), w: (i64, i64), half_width: i64, height: i64) -> Result<f64, Error> {
    let sol = solve_box((-half_width, half_width), (1, height), 0.0, w)?;
    Ok(sol.at(z.0, z.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_covariances() {
        let f = Geometry::FullPlane;
        assert!(cov_phi(f, Site::ORIGIN, Site::ORIGIN).is_zero());
        assert_eq!(cov_phi(f, Site::vertex(1, 0), Site::vertex(1, 0)), PiScalar::from_int(2));
        let want = &PiScalar::from_int(2) - &PiScalar::pi_pow(-2).scale(&rat(4, 1));
        assert_eq!(cov_phi(f, Site::vertex(1, 0), Site::vertex(0, 1)), want);
        assert!(cov_phi(f, Site::half(1, 1), Site::vertex(1, 0)).is_zero());
        assert!(cov_phi(Geometry::HalfPlane, Site::vertex(3, 0), Site::vertex(1, 2)).is_zero());
    }

    #[test]
    fn current_field() {
        let z = CurrentPoint { site: Site::half(3, 0), sector: Sector::Analytic };
        assert!(cov_j_phi(Geometry::FullPlane, z, Site::ORIGIN).is_zero());
        assert!(cov_j_phi(Geometry::FullPlane, z, Site::half(1, 1)).is_zero());
    }

    #[test]
    fn partitions() {
        let df = [1, 1, 3, 15, 105, 945, 10395];
        for n in 0..7 {
            assert_eq!(pair_partitions(2 * n).len(), df[n]);
        }
        assert!(pair_partitions(5).is_empty());
    }

    #[test]
    fn four_equal_fields() {
        let x = Site::vertex(1, 1);
        let c = cov_phi(Geometry::FullPlane, x, x);
        let v = wick(Geometry::FullPlane, &[Slot::Field(x); 4]);
        assert_eq!(v, (&c * &c).scale(&rat(3, 1)));
        assert!(wick(Geometry::FullPlane, &[Slot::Field(x)]).is_zero());
    }

    #[test]
    fn json_insertions() {
        let s = r#"{"geometry":"half_plane","currents":[{"site":[2,4]}],"fields":[[4,4]]}"#;
        let l: InsertionList = serde_json::from_str(s).unwrap();
        l.validate().unwrap();
        let bad = r#"{"geometry":"half_plane","fields":[[4,0]]}"#;
        let l: InsertionList = serde_json::from_str(bad).unwrap();
        assert!(l.validate().is_err());
    }
}

//! The potential kernel `𝖺` of simple random walk on ℤ², the discrete Cauchy
//! kernel `𝖪 = [∂𝖺]`, and a numeric massive Green's function for validation.
//!
//! Exact values lie in `ℚ + ℚ·π⁻¹`. They are produced by the classical
//! propagation scheme: the diagonal `𝖺(n,n) = (4/π) Σ_{j≤n} 1/(2j−1)` is known in
//! closed form, and every other value in the octant `0 ≤ y ≤ x` follows from the
//! equation `[Δ𝖺] = δ₀` solved one `‖·‖₁`-shell at a time.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use num_traits::Zero;
use parking_lot::RwLock;

use crate::lattice::{dbar_with, dee_with, Site, SiteClass};
use crate::scalar::{format_rational, int, parse_rational, rat, GaussianRational, PiScalar, Rational};
use crate::Error;

/// `p + q/π`, the working representation during propagation.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    p: Rational,
    q: Rational,
}

impl Affine {
    fn lin(terms: &[(i64, &Affine)]) -> Affine {
        let mut p = Rational::zero();
        let mut q = Rational::zero();
        for (c, a) in terms {
            let c = int(*c);
            p += &c * &a.p;
            q += &c * &a.q;
        }
        Affine { p, q }
    }

    fn scalar(&self) -> PiScalar {
        PiScalar::from_terms([
            (0, GaussianRational::real(self.p.clone())),
            (-2, GaussianRational::real(self.q.clone())),
        ])
    }
}

fn octant(x: i64, y: i64) -> (i64, i64) {
    let (x, y) = (x.abs(), y.abs());
    if y > x {
        (y, x)
    } else {
        (x, y)
    }
}

/// Exact values of `𝖺` on the octant `0 ≤ y ≤ x`, `x + y ≤ radius`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialKernelTable {
    radius: i64,
    values: HashMap<(i64, i64), Affine>,
}

pub const CACHE_HEADER: &str = "POTKERNEL v1";

impl Default for PotentialKernelTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PotentialKernelTable {
    pub fn new() -> Self {
        let mut values = HashMap::new();
        values.insert((0, 0), Affine { p: Rational::zero(), q: Rational::zero() });
        PotentialKernelTable { radius: 0, values }
    }

    pub fn with_radius(radius: i64) -> Self {
        let mut t = Self::new();
        t.extend_to(radius);
        t
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn at(&self, x: i64, y: i64) -> &Affine {
        &self.values[&octant(x, y)]
    }

    /// `𝖺(x + iy)` if `|x| + |y| ≤ radius`.
    pub fn get(&self, x: i64, y: i64) -> Option<PiScalar> {
        self.values.get(&octant(x, y)).map(Affine::scalar)
    }

    /// Fills every shell `radius < ‖z‖₁ ≤ n`.
    pub fn extend_to(&mut self, n: i64) {
        for s in self.radius + 1..=n {
            for d in (s % 2..=s).step_by(2) {
                let (x, y) = ((s + d) / 2, (s - d) / 2);
                let v = if d == 0 {
                    let mut h = Rational::zero();
                    for j in 1..=x {
                        h += rat(1, 2 * j - 1);
                    }
                    Affine { p: Rational::zero(), q: h * int(4) }
                } else if d == 1 && y == 0 {
                    Affine { p: int(1), q: Rational::zero() }
                } else if d == 1 {
                    // [Δ𝖺](y, y) = 0 with the reflection (y, y+1) ~ (y+1, y).
                    Affine::lin(&[(2, self.at(y, y)), (-1, self.at(y, y - 1))])
                } else {
                    // [Δ𝖺](x−1, y) = 0 solved for the outermost neighbour.
                    Affine::lin(&[
                        (4, self.at(x - 1, y)),
                        (-1, self.at(x - 2, y)),
                        (-1, self.at(x - 1, y + 1)),
                        (-1, self.at(x - 1, y - 1)),
                    ])
                };
                self.values.insert((x, y), v);
            }
            self.radius = s;
        }
    }

    /// Checks `[Δ𝖺] = δ₀` at every octant point with `‖z‖₁ < radius` and that the
    /// table holds exactly the octant points up to the radius.
    pub fn verify(&self) -> Result<(), Error> {
        let expected = octant_count(self.radius);
        if self.values.len() != expected {
            return Err(Error::Cache(format!(
                "table has {} entries, radius {} requires {expected}",
                self.values.len(),
                self.radius
            )));
        }
        for (&(x, y), v) in &self.values {
            if x + y >= self.radius {
                continue;
            }
            let sum = Affine::lin(&[
                (1, self.at(x + 1, y)),
                (1, self.at(x - 1, y)),
                (1, self.at(x, y + 1)),
                (1, self.at(x, y - 1)),
                (-4, v),
            ]);
            let want = if (x, y) == (0, 0) { int(4) } else { Rational::zero() };
            if sum.p != want || !sum.q.is_zero() {
                return Err(Error::Cache(format!("Laplacian fails at ({x}, {y})")));
            }
        }
        Ok(())
    }

    pub fn to_cache_string(&self) -> String {
        let mut keys: Vec<_> = self.values.keys().copied().collect();
        keys.sort();
        let mut out = format!("{CACHE_HEADER} radius={}\n", self.radius);
        for (x, y) in keys {
            let v = &self.values[&(x, y)];
            let _ = writeln!(out, "{x} {y} {} {}", format_rational(&v.p), format_rational(&v.q));
        }
        out
    }

    pub fn from_cache_str(s: &str) -> Result<Self, Error> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| Error::Cache("empty file".into()))?;
        let radius = header
            .strip_prefix(CACHE_HEADER)
            .and_then(|r| r.trim().strip_prefix("radius="))
            .ok_or_else(|| Error::Cache(format!("unsupported header {header:?}")))?
            .parse::<i64>()
            .map_err(|e| Error::Cache(format!("bad radius: {e}")))?;
        let mut values = HashMap::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Cache(format!("line {}: {m}: {line:?}", i + 2));
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let x: i64 = f[0].parse().map_err(|_| bad("bad x"))?;
            let y: i64 = f[1].parse().map_err(|_| bad("bad y"))?;
            if !(0 <= y && y <= x && x + y <= radius) {
                return Err(bad("point outside the octant"));
            }
            let p = parse_rational(f[2]).map_err(|_| bad("bad rational"))?;
            let q = parse_rational(f[3]).map_err(|_| bad("bad rational"))?;
            if values.insert((x, y), Affine { p, q }).is_some() {
                return Err(bad("duplicate point"));
            }
        }
        let t = PotentialKernelTable { radius, values };
        t.verify()?;
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_cache_string())?;
        Ok(())
    }

    /// Loads a cache file, refusing anything truncated, corrupted or from
    /// another format version.
    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::from_cache_str(&std::fs::read_to_string(path)?)
    }
}

fn octant_count(radius: i64) -> usize {
    (0..=radius).map(|s| (s / 2 + 1) as usize).sum()
}

/// Shared, lazily extended potential kernel with memoized Cauchy kernel values.
pub struct PotentialKernel {
    table: RwLock<PotentialKernelTable>,
    cauchy: RwLock<HashMap<Site, PiScalar>>,
    dcauchy: RwLock<HashMap<Site, PiScalar>>,
}

impl Default for PotentialKernel {
    fn default() -> Self {
        Self::new()
    }
}

impl PotentialKernel {
    pub fn new() -> Self {
        Self::from_table(PotentialKernelTable::new())
    }

    pub fn from_table(t: PotentialKernelTable) -> Self {
        PotentialKernel {
            table: RwLock::new(t),
            cauchy: RwLock::new(HashMap::new()),
            dcauchy: RwLock::new(HashMap::new()),
        }
    }

    /// The process-wide instance used by the free functions of this crate.
    pub fn global() -> &'static PotentialKernel {
        static G: OnceLock<PotentialKernel> = OnceLock::new();
        G.get_or_init(PotentialKernel::new)
    }

    pub fn snapshot(&self) -> PotentialKernelTable {
        self.table.read().clone()
    }

    pub fn radius(&self) -> i64 {
        self.table.read().radius
    }

    /// Adopts a (verified) table if it reaches further than the current one.
    pub fn install(&self, t: PotentialKernelTable) {
        let mut cur = self.table.write();
        if t.radius > cur.radius {
            *cur = t;
        }
    }

    pub fn ensure(&self, radius: i64) {
        if self.table.read().radius >= radius {
            return;
        }
        let mut t = self.table.write();
        let target = radius.max(t.radius + t.radius / 2);
        t.extend_to(target);
    }

    /// `𝖺(x + iy)`.
    pub fn a(&self, x: i64, y: i64) -> PiScalar {
        if let Some(v) = self.table.read().get(x, y) {
            return v;
        }
        self.ensure(x.abs() + y.abs());
        self.table.read().get(x, y).expect("table was extended")
    }

    /// `𝖺` on a vertex site.
    pub fn vertex(&self, z: Site) -> Result<PiScalar, Error> {
        match z.class() {
            SiteClass::Vertex => Ok(self.a(z.qx / 4, z.qy / 4)),
            _ => Err(Error::Domain { site: z.to_string(), domain: "{vertex}".into() }),
        }
    }

    /// `𝖺` extended by zero to the dual lattice.
    pub fn diamond(&self, z: Site) -> Result<PiScalar, Error> {
        match z.class() {
            SiteClass::Vertex => Ok(self.a(z.qx / 4, z.qy / 4)),
            SiteClass::Dual => Ok(PiScalar::zero()),
            _ => Err(Error::Domain { site: z.to_string(), domain: "{vertex,dual}".into() }),
        }
    }

    fn diamond_unchecked(&self, z: Site) -> PiScalar {
        if z.class() == SiteClass::Vertex {
            self.a(z.qx / 4, z.qy / 4)
        } else {
            PiScalar::zero()
        }
    }

    /// `𝖪(z) = [∂𝖺](z)` on medial sites.
    pub fn cauchy(&self, z: Site) -> Result<PiScalar, Error> {
        if !z.is_medial() {
            return Err(Error::Domain { site: z.to_string(), domain: "{medial-h,medial-v}".into() });
        }
        Ok(self.k(z))
    }

    pub(crate) fn k(&self, z: Site) -> PiScalar {
        if let Some(v) = self.cauchy.read().get(&z) {
            return v.clone();
        }
        let v = dee_with(|s| self.diamond_unchecked(s), z);
        self.cauchy.write().entry(z).or_insert(v).clone()
    }

    /// `[∂𝖪](y)` on diamond sites.
    pub fn dee_cauchy(&self, y: Site) -> Result<PiScalar, Error> {
        if !y.is_diamond() {
            return Err(Error::Domain { site: y.to_string(), domain: "{vertex,dual}".into() });
        }
        Ok(self.dk(y))
    }

    pub(crate) fn dk(&self, y: Site) -> PiScalar {
        if let Some(v) = self.dcauchy.read().get(&y) {
            return v.clone();
        }
        let v = dee_with(|s| self.k(s), y);
        self.dcauchy.write().entry(y).or_insert(v).clone()
    }

    /// `[∂̄𝖪](y)` on diamond sites (equal to `δ₀` on the populated window).
    pub fn dbar_cauchy(&self, y: Site) -> Result<PiScalar, Error> {
        if !y.is_diamond() {
            return Err(Error::Domain { site: y.to_string(), domain: "{vertex,dual}".into() });
        }
        Ok(dbar_with(|s| self.k(s), y))
    }
}

pub fn potential_kernel(z: Site) -> Result<PiScalar, Error> {
    PotentialKernel::global().vertex(z)
}

pub fn potential_kernel_diamond(z: Site) -> Result<PiScalar, Error> {
    PotentialKernel::global().diamond(z)
}

pub fn cauchy_kernel(z: Site) -> Result<PiScalar, Error> {
    PotentialKernel::global().cauchy(z)
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Leading asymptotics `(2/π) log|z| + (2γ + log 8)/π`.
pub fn asymptotic(x: f64, y: f64) -> f64 {
    use std::f64::consts::PI;
    (2.0 / PI) * x.hypot(y).ln() + (2.0 * EULER_GAMMA + 8f64.ln()) / PI
}

/// Solves `(𝔪² − Δ)G = δ_source` on the rectangle `x ∈ [x0, x1]`, `y ∈ [y0, y1]`
/// with zero values outside, by conjugate gradients. Returns the grid row by row.
pub(crate) fn solve_box(
    (x0, x1): (i64, i64),
    (y0, y1): (i64, i64),
    mass2: f64,
    source: (i64, i64),
) -> Result<BoxSolution, Error> {
    let nx = (x1 - x0 + 1) as usize;
    let ny = (y1 - y0 + 1) as usize;
    let n = nx * ny;
    let idx = |x: i64, y: i64| (y - y0) as usize * nx + (x - x0) as usize;
    let apply = |v: &[f64], out: &mut [f64]| {
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let mut nb = 0.0;
                if i > 0 {
                    nb += v[k - 1];
                }
                if i + 1 < nx {
                    nb += v[k + 1];
                }
                if j > 0 {
                    nb += v[k - nx];
                }
                if j + 1 < ny {
                    nb += v[k + nx];
                }
                out[k] = (1.0 + mass2) * v[k] - 0.25 * nb;
            }
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut g = vec![0.0; n];
    let mut r = vec![0.0; n];
    r[idx(source.0, source.1)] = 1.0;
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let tol = 1e-26;
    let max_iter = 20 * (nx + ny) + 1000;
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for k in 0..n {
            g[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        if rr_new < tol {
            return Ok(BoxSolution { x0, y0, nx, values: g });
        }
        let beta = rr_new / rr;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
    }
    Err(Error::Solver(format!("conjugate gradients stalled after {max_iter} iterations")))
}

pub(crate) struct BoxSolution {
    x0: i64,
    y0: i64,
    nx: usize,
    values: Vec<f64>,
}

impl BoxSolution {
    pub(crate) fn at(&self, x: i64, y: i64) -> f64 {
        self.values[(y - self.y0) as usize * self.nx + (x - self.x0) as usize]
    }
}

/// `G_𝔪(0) − G_𝔪(z)` for the massive Green's function on the box
/// `[−R, R]²` with zero boundary values, which tends to `𝖺(z)`.
pub fn massive_green_oracle(z: (i64, i64), mass: f64, box_radius: i64) -> Result<f64, Error> {
    if !(mass > 0.0) {
        return Err(Error::Solver("mass must be positive".into()));
    }
    if z.0.abs() >= box_radius || z.1.abs() >= box_radius {
        return Err(Error::Solver("point outside the box".into()));
    }
    let sol = solve_box((-box_radius, box_radius), (-box_radius, box_radius), mass * mass, (0, 0))?;
    Ok(sol.at(0, 0) - sol.at(z.0, z.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine(p: Rational, q: Rational) -> PiScalar {
        Affine { p, q }.scalar()
    }

    #[test]
    fn first_values() {
        let t = PotentialKernelTable::with_radius(6);
        assert_eq!(t.get(0, 0).unwrap(), PiScalar::zero());
        assert_eq!(t.get(1, 0).unwrap(), PiScalar::one());
        assert_eq!(t.get(-1, -1).unwrap(), affine(int(0), int(4)));
        assert_eq!(t.get(0, 2).unwrap(), affine(int(4), int(-8)));
        assert_eq!(t.get(2, 1).unwrap(), affine(int(-1), int(8)));
        t.verify().unwrap();
    }

    #[test]
    fn incremental_matches_direct() {
        let mut a = PotentialKernelTable::with_radius(5);
        a.extend_to(17);
        assert_eq!(a, PotentialKernelTable::with_radius(17));
    }

    #[test]
    fn cauchy_basics() {
        let k = PotentialKernel::new();
        assert_eq!(k.cauchy(Site::half(1, 0)).unwrap(), PiScalar::from_ratio(1, 2));
        assert_eq!(k.cauchy(Site::half(0, 1)).unwrap(), PiScalar::i().scale(&rat(-1, 2)));
        assert!(k.cauchy(Site::ORIGIN).is_err());
        assert_eq!(k.diamond(Site::half(1, 1)).unwrap(), PiScalar::zero());
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let t = PotentialKernelTable::with_radius(12);
        let s = t.to_cache_string();
        assert_eq!(PotentialKernelTable::from_cache_str(&s).unwrap(), t);
        let truncated: String = s.lines().take(20).map(|l| format!("{l}\n")).collect();
        assert!(PotentialKernelTable::from_cache_str(&truncated).is_err());
        let stale = s.replacen("POTKERNEL v1", "POTKERNEL v0", 1);
        assert!(PotentialKernelTable::from_cache_str(&stale).is_err());
        let corrupt = s.replacen("\n2 1 -1 8\n", "\n2 1 -1 9\n", 1);
        assert_ne!(corrupt, s);
        assert!(PotentialKernelTable::from_cache_str(&corrupt).is_err());
    }
}

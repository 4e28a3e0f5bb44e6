#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use dgff::contour::Contour;
use dgff::lattice::{ClassSet, LatticeFunction, Site};
use dgff::scalar::{rat, GaussianRational, PiScalar};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_gaussian(r: &mut impl Rng) -> GaussianRational {
    let re = rat(r.gen_range(-9..=9), r.gen_range(1..=6));
    let im = rat(r.gen_range(-9..=9), r.gen_range(1..=6));
    GaussianRational::new(re, im)
}

/// A random element with π-powers among `π^{-1}, π^{-1/2}, 1, π`.
pub fn random_scalar(r: &mut impl Rng) -> PiScalar {
    let n = r.gen_range(0..=3);
    PiScalar::from_terms((0..n).map(|_| (*[-2, -1, 0, 2].choose(r).unwrap(), random_gaussian(r))))
}

/// Finitely supported function with random values.
pub struct Table {
    pub domain: ClassSet,
    pub values: HashMap<Site, PiScalar>,
}

impl Table {
    pub fn random(r: &mut impl Rng, domain: ClassSet, radius_q: i64, density: f64) -> Table {
        let mut values = HashMap::new();
        for s in Site::ball(domain, radius_q) {
            if r.gen_bool(density) {
                values.insert(s, random_scalar(r));
            }
        }
        Table { domain, values }
    }
}

impl LatticeFunction for Table {
    fn domain(&self) -> ClassSet {
        self.domain
    }
    fn value(&self, z: Site) -> PiScalar {
        self.values.get(&z).cloned().unwrap_or_else(PiScalar::zero)
    }
}

/// Random simple contour: the boundary of a randomly grown hole-free cell union.
pub fn random_contour(r: &mut impl Rng, cells: usize) -> Contour {
    loop {
        let mut set: BTreeSet<Site> = BTreeSet::new();
        let start = Site::new(2 * r.gen_range(-3..=3), 2 * r.gen_range(-3..=3));
        set.insert(start);
        while set.len() < cells {
            let v: Vec<Site> = set.iter().copied().collect();
            let c = *v.choose(r).unwrap();
            let (dx, dy) = *[(2, 0), (-2, 0), (0, 2), (0, -2)].choose(r).unwrap();
            set.insert(c.shifted(dx, dy));
        }
        let v: Vec<Site> = set.into_iter().collect();
        if let Ok(c) = Contour::from_cells(&v) {
            return c;
        }
    }
}

/// Random lattice path with unit steps from `a` to `b` (same sublattice), with an
/// optional random detour.
pub fn random_path(r: &mut impl Rng, a: Site, b: Site, detour: usize) -> Vec<Site> {
    let mut path = vec![a];
    let mut cur = a;
    for _ in 0..detour {
        let (dx, dy) = *[(4, 0), (-4, 0), (0, 4), (0, -4)].choose(r).unwrap();
        cur = cur.shifted(dx, dy);
        path.push(cur);
    }
    let d = b - cur;
    let mut steps: Vec<(i64, i64)> = Vec::new();
    steps.extend(std::iter::repeat((4 * d.qx.signum(), 0)).take((d.qx.abs() / 4) as usize));
    steps.extend(std::iter::repeat((0, 4 * d.qy.signum())).take((d.qy.abs() / 4) as usize));
    steps.shuffle(r);
    for (dx, dy) in steps {
        cur = cur.shifted(dx, dy);
        path.push(cur);
    }
    assert_eq!(cur, b);
    path
}

//! Finite pointed sets, skeletal: the object `n` is `{*, 1, ..., n}`.

use serde::{Deserialize, Serialize};

use crate::category::{
    pushout_factor_via_coequalizer, pushout_via_coequalizer, Category, Cocomplete, CoeqWitness,
    Coequalizer, Pushout, Waldhausen,
};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// A pointed map `{*,1..dom} -> {*,1..cod}`; `img[i]` is the image of point `i+1`, `0` is the basepoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PMap {
    pub cod: u32,
    pub img: Vec<u32>,
}

impl PMap {
    pub fn new(cod: u32, img: Vec<u32>) -> Result<Self> {
        if img.iter().any(|&x| x > cod) {
            return Err(Error::Malformed(format!(
                "pointed map image out of range: {img:?} into {cod}"
            )));
        }
        Ok(PMap { cod, img })
    }

    pub fn dom(&self) -> u32 {
        self.img.len() as u32
    }

    pub fn apply(&self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.img[x as usize - 1]
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod as usize + 1];
        for &y in &self.img {
            if y == 0 || seen[y as usize] {
                return false;
            }
            seen[y as usize] = true;
        }
        true
    }

    pub fn is_bijective(&self) -> bool {
        self.dom() == self.cod && self.is_injective()
    }
}

/// The category of finite pointed sets with cofibrations the injections and
/// weak equivalences the bijections. `max_points` bounds the enumerated skeleton
/// (basepoint included); colimits are computed without that bound.
#[derive(Debug, Clone)]
pub struct PointedSets {
    pub max_points: usize,
    pub label: String,
    pub limits: Limits,
}

impl PointedSets {
    pub fn new(max_points: usize) -> Self {
        PointedSets {
            max_points: max_points.max(1),
            label: "finset_pointed".into(),
            limits: Limits::default(),
        }
    }

    /// The skeleton `ℕ★` with objects `0̄, ..., n̄`.
    pub fn nstar(max_n: usize) -> Self {
        PointedSets {
            max_points: max_n + 1,
            label: "nstar".into(),
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn map(&self, cod: u32, img: &[u32]) -> PMap {
        PMap::new(cod, img.to_vec()).expect("valid pointed map")
    }

    fn check_size(&self, n: usize) -> Result<()> {
        Limits::check("pointed set size", n, self.limits.max_set_size)
    }
}

impl Category for PointedSets {
    type Obj = u32;
    type Mor = PMap;
    type Witness = CoeqWitness<u32, PMap>;

    fn name(&self) -> String {
        if self.label == "nstar" {
            format!("nstar({})", self.max_points - 1)
        } else {
            format!("{}({})", self.label, self.max_points)
        }
    }

    fn dom(&self, f: &PMap) -> u32 {
        f.dom()
    }

    fn cod(&self, f: &PMap) -> u32 {
        f.cod
    }

    fn identity(&self, a: &u32) -> PMap {
        PMap {
            cod: *a,
            img: (1..=*a).collect(),
        }
    }

    fn compose(&self, g: &PMap, f: &PMap) -> Result<PMap> {
        if f.cod != g.dom() {
            return Err(Error::Malformed(format!(
                "cannot compose {} after {}",
                self.mor_label(g),
                self.mor_label(f)
            )));
        }
        Ok(PMap {
            cod: g.cod,
            img: f.img.iter().map(|&x| g.apply(x)).collect(),
        })
    }

    fn is_iso(&self, f: &PMap) -> bool {
        f.is_bijective()
    }

    fn objects(&self) -> Result<Vec<u32>> {
        Limits::check("skeleton objects", self.max_points, self.limits.max_objects)?;
        Ok((0..self.max_points as u32).collect())
    }

    fn hom(&self, a: &u32, b: &u32) -> Result<Vec<PMap>> {
        let count = (*b as usize + 1).checked_pow(*a).unwrap_or(usize::MAX);
        Limits::check("hom-set size", count, self.limits.max_morphisms)?;
        let mut out = Vec::with_capacity(count);
        let mut img = vec![0u32; *a as usize];
        loop {
            out.push(PMap {
                cod: *b,
                img: img.clone(),
            });
            // odometer, last point fastest
            let mut i = img.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if img[i] < *b {
                    img[i] += 1;
                    for x in img.iter_mut().skip(i + 1) {
                        *x = 0;
                    }
                    break;
                }
            }
        }
    }

    fn pushout(&self, f: &PMap, g: &PMap) -> Result<Option<Pushout<Self>>> {
        pushout_via_coequalizer(self, f, g).map(Some)
    }

    fn pushout_factor(&self, p: &Pushout<Self>, u: &PMap, v: &PMap) -> Result<PMap> {
        pushout_factor_via_coequalizer(self, p, u, v)
    }

    fn obj_label(&self, a: &u32) -> String {
        a.to_string()
    }

    fn mor_label(&self, f: &PMap) -> String {
        let img: Vec<String> = f.img.iter().map(|x| x.to_string()).collect();
        format!("{}->{}[{}]", f.dom(), f.cod, img.join(","))
    }

    fn find_iso_under(&self, x: &u32, y: &u32, xs: &[PMap], ys: &[PMap]) -> Result<Option<PMap>> {
        if x != y {
            return Ok(None);
        }
        let n = *x as usize;
        let mut phi = vec![u32::MAX; n + 1];
        phi[0] = 0;
        for (a, b) in xs.iter().zip(ys) {
            if a.dom() != b.dom() || a.cod != *x || b.cod != *y {
                return Ok(None);
            }
            for p in 1..=a.dom() {
                let (s, t) = (a.apply(p) as usize, b.apply(p));
                if phi[s] == u32::MAX {
                    phi[s] = t;
                } else if phi[s] != t {
                    return Ok(None);
                }
            }
        }
        // points not hit by any leg are unconstrained
        let mut used = vec![false; n + 1];
        for &t in &phi {
            if t != u32::MAX {
                if used[t as usize] {
                    return Ok(None);
                }
                used[t as usize] = true;
            }
        }
        let free: Vec<usize> = (1..=n).filter(|&i| phi[i] == u32::MAX).collect();
        let spare: Vec<u32> = (1..=n as u32).filter(|&t| !used[t as usize]).collect();
        for (i, t) in free.into_iter().zip(spare) {
            phi[i] = t;
        }
        let f = PMap {
            cod: *y,
            img: phi[1..].to_vec(),
        };
        Ok(f.is_bijective().then_some(f))
    }
}

impl Cocomplete for PointedSets {
    fn coproduct(&self, objects: &[u32]) -> Result<(u32, Vec<PMap>)> {
        let total: u32 = objects.iter().sum();
        self.check_size(total as usize + 1)?;
        let mut offset = 0;
        let mut inj = Vec::with_capacity(objects.len());
        for &n in objects {
            inj.push(PMap {
                cod: total,
                img: (offset + 1..=offset + n).collect(),
            });
            offset += n;
        }
        Ok((total, inj))
    }

    fn copair(&self, summands: &[u32], maps: &[PMap], target: &u32) -> Result<PMap> {
        if summands.len() != maps.len() {
            return Err(Error::Malformed("copair needs one map per summand".into()));
        }
        let mut img = Vec::new();
        for (&n, m) in summands.iter().zip(maps) {
            if m.dom() != n || m.cod != *target {
                return Err(Error::Malformed(format!(
                    "copair leg {} has the wrong type",
                    self.mor_label(m)
                )));
            }
            img.extend_from_slice(&m.img);
        }
        Ok(PMap { cod: *target, img })
    }

    fn coequalizer(&self, f: &PMap, g: &PMap) -> Result<Coequalizer<Self>> {
        if f.dom() != g.dom() || f.cod != g.cod {
            return Err(Error::Malformed("coequalizer needs a parallel pair".into()));
        }
        let b = f.cod as usize;
        let mut parent: Vec<usize> = (0..=b).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for p in 1..=f.dom() {
            let (x, y) = (
                find(&mut parent, f.apply(p) as usize),
                find(&mut parent, g.apply(p) as usize),
            );
            if x != y {
                let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                parent[hi] = lo;
            }
        }
        // relabel classes by first appearance; the basepoint class is 0
        let mut label = vec![u32::MAX; b + 1];
        let mut reps = Vec::new();
        let mut next = 0u32;
        let mut quotient = Vec::with_capacity(b);
        for p in 0..=b {
            let r = find(&mut parent, p);
            if label[r] == u32::MAX {
                label[r] = next;
                if next > 0 {
                    reps.push(p as u32);
                }
                next += 1;
            }
            if p > 0 {
                quotient.push(label[r]);
            }
        }
        let q = next - 1;
        Ok(Coequalizer {
            object: q,
            quotient: PMap {
                cod: q,
                img: quotient,
            },
            section: PMap {
                cod: f.cod,
                img: reps,
            },
        })
    }
}

impl Waldhausen for PointedSets {
    fn zero(&self) -> u32 {
        0
    }

    fn from_zero(&self, a: &u32) -> PMap {
        PMap {
            cod: *a,
            img: Vec::new(),
        }
    }

    fn to_zero(&self, a: &u32) -> PMap {
        PMap {
            cod: 0,
            img: vec![0; *a as usize],
        }
    }

    fn is_cofibration(&self, f: &PMap) -> bool {
        f.is_injective()
    }

    fn is_weq(&self, f: &PMap) -> bool {
        f.is_bijective()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_counts() {
        let c = PointedSets::new(4);
        for a in 0..3u32 {
            for b in 0..3u32 {
                assert_eq!(c.hom(&a, &b).unwrap().len(), (b as usize + 1).pow(a));
            }
        }
    }

    #[test]
    fn wedge_pushout_over_zero() {
        let c = PointedSets::new(4);
        let p = c
            .pushout(&c.from_zero(&1), &c.from_zero(&1))
            .unwrap()
            .unwrap();
        assert_eq!(p.object, 2);
        assert_eq!(p.left.img, vec![1]);
        assert_eq!(p.right.img, vec![2]);
    }

    #[test]
    fn pushout_along_identity_is_the_other_leg() {
        let c = PointedSets::new(4);
        let f = c.map(2, &[1, 1]);
        let p = c.pushout(&f, &c.identity(&2)).unwrap().unwrap();
        assert_eq!(p.object, 2);
        assert!(c.is_iso(&p.left));
    }

    #[test]
    fn coequalizer_section_is_a_section() {
        let c = PointedSets::new(4);
        let f = c.map(3, &[1, 2]);
        let g = c.map(3, &[2, 0]);
        let q = c.coequalizer(&f, &g).unwrap();
        // 1 ~ 2 ~ *, so only 3 survives
        assert_eq!(q.object, 1);
        let qs = c.compose(&q.quotient, &q.section).unwrap();
        assert_eq!(qs, c.identity(&q.object));
    }

    #[test]
    fn cofibrations_are_injections() {
        let c = PointedSets::new(4);
        assert!(c.is_cofibration(&c.map(3, &[2, 3])));
        assert!(!c.is_cofibration(&c.map(3, &[2, 2])));
        assert!(!c.is_cofibration(&c.map(3, &[0, 1])));
    }
}

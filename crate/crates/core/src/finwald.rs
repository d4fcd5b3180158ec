//! Finite Waldhausen categories given by tables, and materialization of bounded
//! skeleta of oracle categories into that form.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{Category, Pushout, Waldhausen};
use crate::error::{malformed, Error, Result};
use crate::index::{FinCat, FinCatJson, MorphismData, SmallCat};
use crate::limits::Limits;

/// A finite category with cofibration and weak-equivalence flags, a chosen zero
/// object and a table of the pushouts it provides.
#[derive(Debug, Clone)]
pub struct FinWald {
    name: String,
    cat: Arc<FinCat>,
    cof: Vec<bool>,
    weq: Vec<bool>,
    iso: Vec<bool>,
    zero: usize,
    pushouts: HashMap<(usize, usize), (usize, usize, usize)>,
}

impl FinWald {
    /// Builds a finite Waldhausen category; pushouts along cofibrations are found
    /// by searching for a universal cocone.
    pub fn new(
        name: impl Into<String>,
        cat: FinCat,
        cofibrations: impl IntoIterator<Item = usize>,
        weak_equivalences: impl IntoIterator<Item = usize>,
        zero: usize,
    ) -> Result<Self> {
        let mut w = Self::bare(
            name.into(),
            Arc::new(cat),
            cofibrations,
            weak_equivalences,
            zero,
        )?;
        let m = w.cat.num_morphisms();
        for f in 0..m {
            for g in w.cat.morphisms_from(w.cat.dom(f)) {
                if w.cof[f] || w.cof[g] {
                    if let Some(p) = w.search_pushout(f, g) {
                        w.pushouts.insert((f, g), p);
                    }
                }
            }
        }
        Ok(w)
    }

    fn bare(
        name: String,
        cat: Arc<FinCat>,
        cofibrations: impl IntoIterator<Item = usize>,
        weak_equivalences: impl IntoIterator<Item = usize>,
        zero: usize,
    ) -> Result<Self> {
        let m = cat.num_morphisms();
        if zero >= cat.num_objects() {
            return malformed("zero object is out of range");
        }
        let mut cof = vec![false; m];
        let mut weq = vec![false; m];
        for f in cofibrations {
            *cof.get_mut(f)
                .ok_or_else(|| Error::Malformed(format!("unknown cofibration {f}")))? = true;
        }
        for f in weak_equivalences {
            *weq.get_mut(f)
                .ok_or_else(|| Error::Malformed(format!("unknown weak equivalence {f}")))? = true;
        }
        let iso = (0..m)
            .map(|f| {
                cat.hom(cat.cod(f), cat.dom(f)).into_iter().any(|g| {
                    cat.compose(g, f) == Some(cat.identity(cat.dom(f)))
                        && cat.compose(f, g) == Some(cat.identity(cat.cod(f)))
                })
            })
            .collect();
        Ok(FinWald {
            name,
            cat,
            cof,
            weq,
            iso,
            zero,
            pushouts: HashMap::new(),
        })
    }

    pub fn fincat(&self) -> &Arc<FinCat> {
        &self.cat
    }

    pub fn num_objects(&self) -> usize {
        self.cat.num_objects()
    }

    pub fn num_morphisms(&self) -> usize {
        self.cat.num_morphisms()
    }

    pub fn cofibrations(&self) -> Vec<usize> {
        (0..self.cof.len()).filter(|&f| self.cof[f]).collect()
    }

    pub fn weak_equivalences(&self) -> Vec<usize> {
        (0..self.weq.len()).filter(|&f| self.weq[f]).collect()
    }

    pub fn object_id(&self, label: &str) -> Option<usize> {
        self.cat.object_id(label)
    }

    pub fn morphism_id(&self, label: &str) -> Option<usize> {
        self.cat.morphism_id(label)
    }

    /// The stored pushout `(P, left, right)` of `B <-f- A -g-> C`, if any.
    pub fn pushout_entry(&self, f: usize, g: usize) -> Option<(usize, usize, usize)> {
        self.pushouts.get(&(f, g)).copied()
    }

    /// Every stored pushout as `((f, g), (P, left, right))`, sorted.
    pub fn pushout_entries(&self) -> Vec<((usize, usize), (usize, usize, usize))> {
        let mut v: Vec<_> = self.pushouts.iter().map(|(&k, &v)| (k, v)).collect();
        v.sort_unstable();
        v
    }

    fn cocones(&self, f: usize, g: usize) -> Vec<(usize, usize, usize)> {
        let (b, c) = (self.cat.cod(f), self.cat.cod(g));
        let mut out = Vec::new();
        for z in 0..self.cat.num_objects() {
            for u in self.cat.hom(b, z) {
                for v in self.cat.hom(c, z) {
                    if self.cat.compose(u, f) == self.cat.compose(v, g) {
                        out.push((z, u, v));
                    }
                }
            }
        }
        out
    }

    fn factorizations(&self, p: usize, l: usize, r: usize, z: usize, u: usize, v: usize) -> usize {
        self.cat
            .hom(p, z)
            .into_iter()
            .filter(|&m| self.cat.compose(m, l) == Some(u) && self.cat.compose(m, r) == Some(v))
            .count()
    }

    fn search_pushout(&self, f: usize, g: usize) -> Option<(usize, usize, usize)> {
        let cocones = self.cocones(f, g);
        cocones.iter().copied().find(|&(p, l, r)| {
            cocones
                .iter()
                .all(|&(z, u, v)| self.factorizations(p, l, r, z, u, v) == 1)
        })
    }

    /// JSON description with explicit cofibration and weak-equivalence lists.
    pub fn to_json(&self) -> FinWaldJson {
        let label = |f: usize| self.cat.morphism_label(f);
        FinWaldJson {
            name: self.name.clone(),
            base: self.cat.to_json(),
            cofibrations: self.cofibrations().into_iter().map(label).collect(),
            weak_equivalences: self.weak_equivalences().into_iter().map(label).collect(),
            zero: self.cat.object_label(self.zero),
        }
    }

    pub fn from_json(j: &FinWaldJson) -> Result<Self> {
        let cat = FinCat::from_json(&j.base)?;
        let look = |s: &String| {
            cat.morphism_id(s)
                .ok_or_else(|| Error::Malformed(format!("unknown morphism {s}")))
        };
        let cof = j
            .cofibrations
            .iter()
            .map(look)
            .collect::<Result<Vec<_>>>()?;
        let weq = j
            .weak_equivalences
            .iter()
            .map(look)
            .collect::<Result<Vec<_>>>()?;
        let zero = cat
            .object_id(&j.zero)
            .ok_or_else(|| Error::Malformed(format!("unknown zero {}", j.zero)))?;
        FinWald::new(j.name.clone(), cat, cof, weq, zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinWaldJson {
    pub name: String,
    pub base: FinCatJson,
    pub cofibrations: Vec<String>,
    pub weak_equivalences: Vec<String>,
    pub zero: String,
}

impl Category for FinWald {
    type Obj = usize;
    type Mor = usize;
    type Witness = ();

    fn name(&self) -> String {
        self.name.clone()
    }

    fn dom(&self, f: &usize) -> usize {
        self.cat.dom(*f)
    }

    fn cod(&self, f: &usize) -> usize {
        self.cat.cod(*f)
    }

    fn identity(&self, a: &usize) -> usize {
        self.cat.identity(*a)
    }

    fn compose(&self, g: &usize, f: &usize) -> Result<usize> {
        self.cat.compose(*g, *f).ok_or_else(|| {
            Error::Malformed(format!(
                "cannot compose {} after {}",
                self.cat.morphism_label(*g),
                self.cat.morphism_label(*f)
            ))
        })
    }

    fn is_iso(&self, f: &usize) -> bool {
        self.iso[*f]
    }

    fn objects(&self) -> Result<Vec<usize>> {
        Ok((0..self.cat.num_objects()).collect())
    }

    fn hom(&self, a: &usize, b: &usize) -> Result<Vec<usize>> {
        Ok(self.cat.hom(*a, *b))
    }

    fn pushout(&self, f: &usize, g: &usize) -> Result<Option<Pushout<Self>>> {
        Ok(self.pushouts.get(&(*f, *g)).map(|&(p, l, r)| Pushout {
            object: p,
            left: l,
            right: r,
            witness: (),
        }))
    }

    fn pushout_factor(&self, p: &Pushout<Self>, u: &usize, v: &usize) -> Result<usize> {
        self.cat
            .hom(p.object, self.cat.cod(*u))
            .into_iter()
            .find(|&m| {
                self.cat.compose(m, p.left) == Some(*u) && self.cat.compose(m, p.right) == Some(*v)
            })
            .ok_or_else(|| Error::Malformed("cocone does not factor through the pushout".into()))
    }

    fn obj_label(&self, a: &usize) -> String {
        self.cat.object_label(*a)
    }

    fn mor_label(&self, f: &usize) -> String {
        self.cat.morphism_label(*f)
    }
}

impl Waldhausen for FinWald {
    fn zero(&self) -> usize {
        self.zero
    }

    fn from_zero(&self, a: &usize) -> usize {
        self.cat.hom(self.zero, *a)[0]
    }

    fn to_zero(&self, a: &usize) -> usize {
        self.cat.hom(*a, self.zero)[0]
    }

    fn is_cofibration(&self, f: &usize) -> bool {
        self.cof[*f]
    }

    fn is_weq(&self, f: &usize) -> bool {
        self.weq[*f]
    }
}

/// A bounded skeleton of an oracle category as a [`FinWald`], with the maps
/// between table ids and oracle values.
#[derive(Debug, Clone)]
pub struct Materialized<C: Category> {
    pub wald: Arc<FinWald>,
    pub objects: Vec<C::Obj>,
    pub morphisms: Vec<C::Mor>,
    pub object_ids: HashMap<C::Obj, usize>,
    pub morphism_ids: HashMap<C::Mor, usize>,
}

impl<C: Category> Materialized<C> {
    pub fn object_id(&self, a: &C::Obj) -> Option<usize> {
        self.object_ids.get(a).copied()
    }

    pub fn morphism_id(&self, f: &C::Mor) -> Option<usize> {
        self.morphism_ids.get(f).copied()
    }
}

/// Tabulates the full subcategory on `c.objects()`. Pushouts along cofibrations
/// are copied from the oracle whenever they land in the skeleton.
pub fn materialize<C: Waldhausen>(c: &C, limits: &Limits) -> Result<Materialized<C>> {
    let objects = c.objects()?;
    Limits::check("materialized objects", objects.len(), limits.max_objects)?;
    let object_ids: HashMap<C::Obj, usize> = objects
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, o)| (o, i))
        .collect();
    let mut morphisms = Vec::new();
    let mut data = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for (j, b) in objects.iter().enumerate() {
            for f in c.hom(a, b)? {
                data.push(MorphismData {
                    label: c.mor_label(&f),
                    dom: i,
                    cod: j,
                });
                morphisms.push(f);
                Limits::check(
                    "materialized morphisms",
                    morphisms.len(),
                    limits.max_morphisms,
                )?;
            }
        }
    }
    let morphism_ids: HashMap<C::Mor, usize> = morphisms
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, f)| (f, i))
        .collect();
    let look = |f: &C::Mor| {
        morphism_ids.get(f).copied().ok_or_else(|| {
            Error::Malformed(format!("{} is missing from the skeleton", c.mor_label(f)))
        })
    };
    let identities = objects
        .iter()
        .map(|a| look(&c.identity(a)))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); objects.len()];
    for (i, d) in data.iter().enumerate() {
        out[d.dom].push(i);
    }
    let mut compose = Vec::new();
    for (fi, f) in morphisms.iter().enumerate() {
        for &gi in &out[data[fi].cod] {
            compose.push((gi, fi, look(&c.compose(&morphisms[gi], f)?)?));
        }
    }
    let doms: Vec<usize> = data.iter().map(|d| d.dom).collect();
    let labels = objects.iter().map(|a| c.obj_label(a)).collect();
    let cat = Arc::new(FinCat::assemble(
        c.name(),
        labels,
        data,
        identities,
        compose,
    )?);
    let zero = *object_ids
        .get(&c.zero())
        .ok_or_else(|| Error::Malformed("the zero object is not in the skeleton".into()))?;
    let cof: Vec<usize> = (0..morphisms.len())
        .filter(|&i| c.is_cofibration(&morphisms[i]))
        .collect();
    let weq: Vec<usize> = (0..morphisms.len())
        .filter(|&i| c.is_weq(&morphisms[i]))
        .collect();
    let mut wald = FinWald::bare(c.name(), cat, cof, weq, zero)?;
    for fi in 0..morphisms.len() {
        for &gi in &out[doms[fi]] {
            if !(wald.cof[fi] || wald.cof[gi]) {
                continue;
            }
            let Some(p) = c.pushout(&morphisms[fi], &morphisms[gi])? else {
                continue;
            };
            if let (Some(&o), Some(&l), Some(&r)) = (
                object_ids.get(&p.object),
                morphism_ids.get(&p.left),
                morphism_ids.get(&p.right),
            ) {
                wald.pushouts.insert((fi, gi), (o, l, r));
            }
        }
    }
    Ok(Materialized {
        wald: Arc::new(wald),
        objects,
        morphisms,
        object_ids,
        morphism_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointed::PointedSets;

    #[test]
    fn materialized_pointed_sets() {
        let c = PointedSets::new(3);
        let m = materialize(&c, &Limits::default()).unwrap();
        assert_eq!(m.wald.num_objects(), 3);
        // 1 + 1 + 1 + 1 + 2 + 3 + 1 + 4 + 9
        assert_eq!(m.wald.num_morphisms(), 23);
        m.wald.fincat().validate().unwrap();
        // 2 v 2 is outside the skeleton, 1 v 1 is not
        let z1 = m.morphism_id(&c.from_zero(&1)).unwrap();
        let z2 = m.morphism_id(&c.from_zero(&2)).unwrap();
        assert!(m.wald.pushout_entry(z2, z2).is_none());
        assert!(m.wald.pushout_entry(z1, z1).is_some());
        let z0 = m.morphism_id(&c.from_zero(&0)).unwrap();
        let (p, _, _) = m.wald.pushout_entry(z0, z1).unwrap();
        assert_eq!(m.objects[p], 1);
    }

    #[test]
    fn searched_pushouts_agree_with_oracle() {
        let c = PointedSets::new(3);
        let m = materialize(&c, &Limits::default()).unwrap();
        let w = FinWald::from_json(&m.wald.to_json()).unwrap();
        for f in 0..w.num_morphisms() {
            for g in w.fincat().morphisms_from(w.dom(&f)) {
                assert_eq!(
                    w.pushout_entry(f, g).map(|e| e.0),
                    m.wald.pushout_entry(f, g).map(|e| e.0)
                );
            }
        }
    }
}

//! Colimits of finite diagrams as coequalizers of coproducts:
//! `colim F = coeq(∐_{f} dom f ⇉ ∐_{A} A)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::category::{Category, Cocomplete};
use crate::cubes::Cube;
use crate::diagram::Diagram;
use crate::error::{malformed, Result};
use crate::index::{span, FinCat, Index, SmallCat, Subcategory};

/// A colimit with its cocone and enough data to factor other cocones through it.
pub struct Colimit<C: Category> {
    pub object: C::Obj,
    /// Leg from each index object.
    pub legs: Vec<C::Mor>,
    summands: Vec<C::Obj>,
    section: C::Mor,
}

impl<C: Category> Clone for Colimit<C> {
    fn clone(&self) -> Self {
        Colimit {
            object: self.object.clone(),
            legs: self.legs.clone(),
            summands: self.summands.clone(),
            section: self.section.clone(),
        }
    }
}

impl<C: Category> std::fmt::Debug for Colimit<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Colimit")
            .field("object", &self.object)
            .field("legs", &self.legs)
            .finish()
    }
}

impl<C: Cocomplete> Colimit<C> {
    /// The unique map to `target` restricting to `cocone[o]` on each index object.
    pub fn factor(&self, cat: &C, target: &C::Obj, cocone: &[C::Mor]) -> Result<C::Mor> {
        if cocone.len() != self.summands.len() {
            return malformed("cocone has the wrong number of legs");
        }
        let h = cat.copair(&self.summands, cocone, target)?;
        cat.compose(&h, &self.section)
    }
}

/// The colimit of `d` by the coequalizer formula. Labels of the result are the
/// canonical ones produced by the target's coproduct and coequalizer.
pub fn colimit<C: Cocomplete>(cat: &C, d: &Diagram<C>) -> Result<Colimit<C>> {
    let s = d.small();
    let summands: Vec<C::Obj> = d.objects.clone();
    let (total, inj) = cat.coproduct(&summands)?;
    let doms: Vec<C::Obj> = (0..s.num_morphisms())
        .map(|m| d.objects[s.dom(m)].clone())
        .collect();
    let src: Vec<C::Mor> = (0..s.num_morphisms())
        .map(|m| inj[s.dom(m)].clone())
        .collect();
    let tgt = (0..s.num_morphisms())
        .map(|m| cat.compose(&inj[s.cod(m)], &d.morphisms[m]))
        .collect::<Result<Vec<_>>>()?;
    let sm = cat.copair(&doms, &src, &total)?;
    let tm = cat.copair(&doms, &tgt, &total)?;
    let q = cat.coequalizer(&sm, &tm)?;
    let legs = inj
        .iter()
        .map(|i| cat.compose(&q.quotient, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Colimit {
        object: q.object,
        legs,
        summands,
        section: q.section,
    })
}

/// Pushout of `B <-f- A -g-> C` as the colimit over the span shape. Returns the
/// object and the legs `B -> P`, `C -> P`.
pub fn pushout<C: Cocomplete>(cat: &C, f: &C::Mor, g: &C::Mor) -> Result<(C::Obj, C::Mor, C::Mor)> {
    if cat.dom(f) != cat.dom(g) {
        return malformed("span legs must share a domain");
    }
    let shape = span();
    let (ab, ac) = (
        SmallCat::hom(&shape, 0, 1)[0],
        SmallCat::hom(&shape, 0, 2)[0],
    );
    let gens = HashMap::from([(ab, f.clone()), (ac, g.clone())]);
    let objects = vec![cat.dom(f), cat.cod(f), cat.cod(g)];
    let d = Diagram::generate(cat, Index::Fin(Arc::new(shape)), objects, &gens)?;
    let c = colimit(cat, &d)?;
    Ok((c.object, c.legs[1].clone(), c.legs[2].clone()))
}

/// `F` restricted to a subcategory of its (finite) index.
pub fn restrict<C: Category>(d: &Diagram<C>, cat: &FinCat, sub: &Subcategory) -> Diagram<C> {
    let (fc, objs, mors) = sub.to_fincat(cat);
    d.precompose(Index::Fin(Arc::new(fc)), &objs, &mors)
}

/// The n-cube with `I(ε) = colim F|_{∩_{ε_i = 0} A_i}` for `ε != (1,...,1)` and
/// `I(1,...,1) = colim F`, with the induced comparison maps as edges.
pub fn restricted_colimit_cube<C: Cocomplete>(
    cat: &C,
    d: &Diagram<C>,
    covers: &[Subcategory],
) -> Result<Cube<C>> {
    let Index::Fin(index) = &d.index else {
        return malformed("restricted colimit cubes need a finite index");
    };
    let n = covers.len();
    let all: BTreeSet<usize> = (0..index.num_morphisms()).collect();
    let union: BTreeSet<usize> = covers
        .iter()
        .flat_map(|c| c.morphisms().iter().copied())
        .collect();
    if union != all {
        return malformed("the covers do not exhaust the index category");
    }
    let full = (1usize << n) - 1;
    let sub_for = |mask: usize| -> Subcategory {
        if mask == full {
            return Subcategory::whole(index);
        }
        let mut s = Subcategory::whole(index);
        for (i, c) in covers.iter().enumerate() {
            if mask >> i & 1 == 0 {
                s = s.intersect(c);
            }
        }
        s
    };
    let subs: Vec<Subcategory> = (0..=full).map(sub_for).collect();
    let mut colims = Vec::with_capacity(full + 1);
    let mut old_objs = Vec::with_capacity(full + 1);
    for s in &subs {
        let (_, objs, _) = s.to_fincat(index);
        colims.push(colimit(cat, &restrict(d, index, s))?);
        old_objs.push(objs);
    }
    let vertices: Vec<C::Obj> = colims.iter().map(|c| c.object.clone()).collect();
    let mut edges = HashMap::new();
    for mask in 0..=full {
        for k in 0..n {
            if mask >> k & 1 == 1 {
                continue;
            }
            let to = mask | 1 << k;
            // legs of the larger colimit restricted to the smaller subcategory's objects
            let pos: HashMap<usize, usize> = old_objs[to]
                .iter()
                .enumerate()
                .map(|(i, &o)| (o, i))
                .collect();
            let cocone: Vec<C::Mor> = old_objs[mask]
                .iter()
                .map(|o| colims[to].legs[pos[o]].clone())
                .collect();
            let e = colims[mask].factor(cat, &vertices[to], &cocone)?;
            edges.insert((mask, k), e);
        }
    }
    Cube::from_edges(cat, n, vertices, &edges)
}

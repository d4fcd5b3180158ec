//! Exhaustive enumeration of functors from a finite index into the bounded
//! skeleton of a target category.

use rayon::prelude::*;

use crate::category::Category;
use crate::diagram::Diagram;
use crate::error::Result;
use crate::index::{Index, SmallCat};
use crate::limits::Limits;

/// Pruning predicates for [`enumerate_functors`]. Filters must only reject
/// assignments that no valid result can contain.
pub struct Filters<'a, C: Category> {
    /// Allowed values of an index object.
    pub object: Box<dyn Fn(usize, &C::Obj) -> bool + Send + Sync + 'a>,
    /// Allowed values of an index morphism.
    pub morphism: Box<dyn Fn(usize, &C::Mor) -> bool + Send + Sync + 'a>,
}

impl<'a, C: Category> Default for Filters<'a, C> {
    fn default() -> Self {
        Filters {
            object: Box::new(|_, _| true),
            morphism: Box::new(|_, _| true),
        }
    }
}

struct Plan {
    order: Vec<usize>,
    position: Vec<usize>,
    // (g, f, h) with g ∘ f = h, none an identity, filed under the latest of the three in `order`
    triples: Vec<Vec<(usize, usize, usize)>>,
    // for each h, the (g, f) factorizations
    factorizations: Vec<Vec<(usize, usize)>>,
}

fn plan(s: &dyn SmallCat) -> Plan {
    let n = s.num_morphisms();
    let mut factorizations = vec![Vec::new(); n];
    let mut all = Vec::new();
    for f in 0..n {
        if s.is_identity(f) {
            continue;
        }
        for g in s.morphisms_from(s.cod(f)) {
            if s.is_identity(g) {
                continue;
            }
            let h = s.compose(g, f).expect("composable");
            all.push((g, f, h));
            if !s.is_identity(h) {
                factorizations[h].push((g, f));
            }
        }
    }
    // irreducible morphisms first so that composites are forced
    let mut order: Vec<usize> = (0..n).filter(|&m| !s.is_identity(m)).collect();
    order.sort_by_key(|&m| (!factorizations[m].is_empty(), m));
    let mut position = vec![usize::MAX; n];
    for (i, &m) in order.iter().enumerate() {
        position[m] = i;
    }
    let mut triples = vec![Vec::new(); order.len()];
    for (g, f, h) in all {
        let last = [g, f, h]
            .iter()
            .filter(|&&x| !s.is_identity(x))
            .map(|&x| position[x])
            .max()
            .unwrap();
        triples[last].push((g, f, h));
    }
    Plan {
        order,
        position,
        triples,
        factorizations,
    }
}

struct Search<'s, 'f, C: Category> {
    cat: &'s C,
    s: &'s dyn SmallCat,
    plan: &'s Plan,
    filters: &'s Filters<'f, C>,
    skeleton: &'s [C::Obj],
    limits: &'s Limits,
}

struct State<C: Category> {
    objects: Vec<usize>,
    morphisms: Vec<Option<C::Mor>>,
    nodes: usize,
    out: Vec<(Vec<C::Obj>, Vec<C::Mor>)>,
}

impl<'s, 'f, C: Category> Search<'s, 'f, C> {
    fn objects(&self, st: &mut State<C>, o: usize) -> Result<()> {
        if o == self.s.num_objects() {
            for x in 0..self.s.num_objects() {
                let id = self.s.identity(x);
                st.morphisms[id] = Some(self.cat.identity(&self.skeleton[st.objects[x]]));
            }
            return self.morphisms(st, 0);
        }
        for (k, v) in self.skeleton.iter().enumerate() {
            if !(self.filters.object)(o, v) {
                continue;
            }
            st.nodes += 1;
            Limits::check("functor search nodes", st.nodes, self.limits.max_search)?;
            st.objects.push(k);
            self.objects(st, o + 1)?;
            st.objects.pop();
        }
        Ok(())
    }

    fn value(&self, st: &State<C>, m: usize) -> C::Mor {
        st.morphisms[m].clone().expect("assigned")
    }

    fn consistent(&self, st: &State<C>, i: usize) -> Result<bool> {
        for &(g, f, h) in &self.plan.triples[i] {
            let gf = self.cat.compose(&self.value(st, g), &self.value(st, f))?;
            if gf != self.value(st, h) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn morphisms(&self, st: &mut State<C>, i: usize) -> Result<()> {
        if i == self.plan.order.len() {
            let objects = st
                .objects
                .iter()
                .map(|&k| self.skeleton[k].clone())
                .collect();
            let morphisms = st
                .morphisms
                .iter()
                .map(|m| m.clone().expect("assigned"))
                .collect();
            st.out.push((objects, morphisms));
            return Limits::check("enumerated functors", st.out.len(), self.limits.max_results);
        }
        let m = self.plan.order[i];
        let a = &self.skeleton[st.objects[self.s.dom(m)]];
        let b = &self.skeleton[st.objects[self.s.cod(m)]];
        let forced = self.plan.factorizations[m]
            .iter()
            .find(|(g, f)| self.plan.position[*g] < i && self.plan.position[*f] < i);
        let candidates = match forced {
            Some(&(g, f)) => vec![self.cat.compose(&self.value(st, g), &self.value(st, f))?],
            None => self.cat.hom(a, b)?,
        };
        for c in candidates {
            if !(self.filters.morphism)(m, &c) {
                continue;
            }
            st.nodes += 1;
            Limits::check("functor search nodes", st.nodes, self.limits.max_search)?;
            st.morphisms[m] = Some(c);
            if self.consistent(st, i)? {
                self.morphisms(st, i + 1)?;
            }
        }
        st.morphisms[m] = None;
        Ok(())
    }
}

/// Every functor `index -> C` whose objects lie in `C`'s skeleton, in
/// lexicographic order of (object choices, morphism choices). Caps from `limits`
/// are hard errors.
pub fn enumerate_functors<C: Category>(
    cat: &C,
    index: &Index,
    filters: &Filters<'_, C>,
    limits: &Limits,
) -> Result<Vec<Diagram<C>>> {
    let s = index.as_small();
    let skeleton = cat.objects()?;
    let plan = plan(s);
    let search = Search {
        cat,
        s,
        plan: &plan,
        filters,
        skeleton: &skeleton,
        limits,
    };
    let n = s.num_morphisms();
    let first: Vec<usize> = if s.num_objects() == 0 {
        vec![usize::MAX]
    } else {
        (0..skeleton.len())
            .filter(|&k| (filters.object)(0, &skeleton[k]))
            .collect()
    };
    // split on the first object's value; each branch is searched independently
    let branches: Vec<Result<Vec<(Vec<C::Obj>, Vec<C::Mor>)>>> = first
        .par_iter()
        .map(|&k| {
            let mut st = State {
                objects: Vec::new(),
                morphisms: vec![None; n],
                nodes: 0,
                out: Vec::new(),
            };
            if k == usize::MAX {
                search.objects(&mut st, 0)?;
            } else {
                st.objects.push(k);
                search.objects(&mut st, 1)?;
            }
            Ok(st.out)
        })
        .collect();
    let mut out = Vec::new();
    for b in branches {
        for (objects, morphisms) in b? {
            out.push(Diagram::unchecked(index.clone(), objects, morphisms)?);
        }
        Limits::check("enumerated functors", out.len(), limits.max_results)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::diagram::check_functor;
    use crate::index::{build_index, parallel_pair, span, Shape};
    use crate::pointed::PointedSets;

    /// Brute force: every assignment of objects and morphisms, filtered by functoriality.
    fn naive<C: Category>(cat: &C, index: &Index) -> Vec<Diagram<C>> {
        let s = index.as_small();
        let skel = cat.objects().unwrap();
        let mut out = Vec::new();
        let no = s.num_objects();
        let total = skel.len().pow(no as u32);
        for code in 0..total {
            let mut c = code;
            let mut objs = vec![skel[0].clone(); no];
            for o in (0..no).rev() {
                objs[o] = skel[c % skel.len()].clone();
                c /= skel.len();
            }
            let homs: Vec<Vec<C::Mor>> = (0..s.num_morphisms())
                .map(|m| cat.hom(&objs[s.dom(m)], &objs[s.cod(m)]).unwrap())
                .collect();
            let count: usize = homs.iter().map(|h| h.len()).product();
            for code in 0..count {
                let mut c = code;
                let mut mors = Vec::new();
                for h in homs.iter().rev() {
                    mors.push(h[c % h.len()].clone());
                    c /= h.len();
                }
                mors.reverse();
                let d = Diagram::unchecked(index.clone(), objs.clone(), mors).unwrap();
                if check_functor(cat, &d).is_empty() {
                    out.push(d);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn matches_brute_force_on_small_shapes() {
        let c = PointedSets::new(3);
        let shapes = vec![
            build_index(&Shape::Interval, &Limits::default()).unwrap(),
            build_index(&Shape::Ordinal(2), &Limits::default()).unwrap(),
            span(),
            parallel_pair(),
        ];
        for shape in shapes {
            let idx = Index::Fin(Arc::new(shape));
            let mut fast =
                enumerate_functors(&c, &idx, &Filters::default(), &Limits::default()).unwrap();
            fast.sort();
            assert_eq!(fast, naive(&c, &idx));
        }
    }

    #[test]
    fn interval_functors_are_morphisms() {
        let c = PointedSets::new(3);
        let idx = Index::Fin(Arc::new(
            build_index(&Shape::Interval, &Limits::default()).unwrap(),
        ));
        let all = enumerate_functors(&c, &idx, &Filters::default(), &Limits::default()).unwrap();
        assert_eq!(all.len(), 23);
    }

    #[test]
    fn caps_are_errors() {
        let c = PointedSets::new(3);
        let idx = Index::Fin(Arc::new(
            build_index(&Shape::Cube(2), &Limits::default()).unwrap(),
        ));
        let tight = Limits {
            max_results: 10,
            ..Limits::default()
        };
        assert!(enumerate_functors(&c, &idx, &Filters::default(), &tight).is_err());
    }
}

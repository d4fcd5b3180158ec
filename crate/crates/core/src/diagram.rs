//! Functors from finite index categories into a target, stored as full tables,
//! and natural transformations between them.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{Category, Pushout};
use crate::error::{malformed, Result};
use crate::index::{Index, SmallCat};
use crate::limits::Limits;

/// A functor `index -> C`: the image of every object and every morphism.
pub struct Diagram<C: Category> {
    pub index: Index,
    pub objects: Vec<C::Obj>,
    pub morphisms: Vec<C::Mor>,
}

impl<C: Category> Clone for Diagram<C> {
    fn clone(&self) -> Self {
        Diagram {
            index: self.index.clone(),
            objects: self.objects.clone(),
            morphisms: self.morphisms.clone(),
        }
    }
}

impl<C: Category> fmt::Debug for Diagram<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diagram")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms)
            .finish()
    }
}

// Equality and order only look at the tables; diagrams are compared over a common index.
impl<C: Category> PartialEq for Diagram<C> {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects && self.morphisms == other.morphisms
    }
}

impl<C: Category> Eq for Diagram<C> {}

impl<C: Category> Hash for Diagram<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.objects.hash(state);
        self.morphisms.hash(state);
    }
}

impl<C: Category> PartialOrd for Diagram<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Category> Ord for Diagram<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.objects
            .cmp(&other.objects)
            .then_with(|| self.morphisms.cmp(&other.morphisms))
    }
}

/// One failure of functoriality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// `F(m)` does not go from `F(dom m)` to `F(cod m)`.
    Endpoints { morphism: String },
    /// `F(id_o)` is not an identity.
    Identity { object: String },
    /// `F(g ∘ f) != F(g) ∘ F(f)`.
    Composition {
        g: String,
        f: String,
        composite: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Endpoints { morphism } => {
                write!(f, "image of {morphism} has the wrong endpoints")
            }
            Violation::Identity { object } => {
                write!(f, "identity of {object} is not sent to an identity")
            }
            Violation::Composition {
                g,
                f: ff,
                composite,
            } => {
                write!(f, "F({composite}) != F({g}) F({ff})")
            }
        }
    }
}

impl<C: Category> Diagram<C> {
    /// Builds a diagram and checks that it is a functor.
    pub fn new(
        cat: &C,
        index: Index,
        objects: Vec<C::Obj>,
        morphisms: Vec<C::Mor>,
    ) -> Result<Self> {
        let d = Self::unchecked(index, objects, morphisms)?;
        let report = check_functor(cat, &d);
        if let Some(v) = report.first() {
            return malformed(format!("not a functor: {v}"));
        }
        Ok(d)
    }

    /// Builds a diagram checking only that the tables have the right length.
    pub fn unchecked(index: Index, objects: Vec<C::Obj>, morphisms: Vec<C::Mor>) -> Result<Self> {
        let s = index.as_small();
        if objects.len() != s.num_objects() || morphisms.len() != s.num_morphisms() {
            return malformed(format!(
                "diagram tables have {} objects and {} morphisms, index has {} and {}",
                objects.len(),
                morphisms.len(),
                s.num_objects(),
                s.num_morphisms()
            ));
        }
        Ok(Diagram {
            index,
            objects,
            morphisms,
        })
    }

    /// Extends values on objects and on a generating set of morphisms to the
    /// whole index by composing; identities go to identities.
    pub fn generate(
        cat: &C,
        index: Index,
        objects: Vec<C::Obj>,
        gens: &HashMap<usize, C::Mor>,
    ) -> Result<Self> {
        let s = index.as_small();
        let n = s.num_morphisms();
        let mut table: Vec<Option<C::Mor>> = vec![None; n];
        for o in 0..s.num_objects() {
            table[s.identity(o)] = Some(cat.identity(&objects[o]));
        }
        for (&m, f) in gens {
            if m >= n {
                return malformed(format!("generator {m} is not a morphism of the index"));
            }
            table[m] = Some(f.clone());
        }
        loop {
            let mut progress = false;
            for f in 0..n {
                let Some(ff) = table[f].clone() else { continue };
                for g in s.morphisms_from(s.cod(f)) {
                    let Some(gg) = table[g].clone() else { continue };
                    let h = s.compose(g, f).expect("composable");
                    if table[h].is_none() {
                        table[h] = Some(cat.compose(&gg, &ff)?);
                        progress = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        let mut morphisms = Vec::with_capacity(n);
        for (m, v) in table.into_iter().enumerate() {
            match v {
                Some(v) => morphisms.push(v),
                None => {
                    return malformed(format!("morphism {} is not generated", s.morphism_label(m)))
                }
            }
        }
        Self::new(cat, index, objects, morphisms)
    }

    pub fn small(&self) -> &dyn SmallCat {
        self.index.as_small()
    }

    pub fn obj(&self, o: usize) -> &C::Obj {
        &self.objects[o]
    }

    pub fn mor(&self, m: usize) -> &C::Mor {
        &self.morphisms[m]
    }

    /// `self ∘ u` for a functor `u: index' -> index` given by its tables.
    pub fn precompose(&self, index: Index, obj_map: &[usize], mor_map: &[usize]) -> Self {
        Diagram {
            index,
            objects: obj_map.iter().map(|&o| self.objects[o].clone()).collect(),
            morphisms: mor_map.iter().map(|&m| self.morphisms[m].clone()).collect(),
        }
    }

    /// The constant diagram at `a`.
    pub fn constant(cat: &C, index: Index, a: &C::Obj) -> Self {
        let s = index.as_small();
        let (no, nm) = (s.num_objects(), s.num_morphisms());
        Diagram {
            index,
            objects: vec![a.clone(); no],
            morphisms: vec![cat.identity(a); nm],
        }
    }

    /// Labels of the object table, for reports.
    pub fn object_labels(&self, cat: &C) -> Vec<String> {
        self.objects.iter().map(|o| cat.obj_label(o)).collect()
    }
}

/// Every functoriality violation of `d`, in index order.
pub fn check_functor<C: Category>(cat: &C, d: &Diagram<C>) -> Vec<Violation> {
    let s = d.small();
    let mut out = Vec::new();
    for m in 0..s.num_morphisms() {
        let f = &d.morphisms[m];
        if cat.dom(f) != d.objects[s.dom(m)] || cat.cod(f) != d.objects[s.cod(m)] {
            out.push(Violation::Endpoints {
                morphism: s.morphism_label(m),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for o in 0..s.num_objects() {
        if !cat.is_identity(&d.morphisms[s.identity(o)]) {
            out.push(Violation::Identity {
                object: s.object_label(o),
            });
        }
    }
    for f in 0..s.num_morphisms() {
        for g in s.morphisms_from(s.cod(f)) {
            let h = s.compose(g, f).expect("index composition is total");
            match cat.compose(&d.morphisms[g], &d.morphisms[f]) {
                Ok(v) if v == d.morphisms[h] => {}
                _ => out.push(Violation::Composition {
                    g: s.morphism_label(g),
                    f: s.morphism_label(f),
                    composite: s.morphism_label(h),
                }),
            }
        }
    }
    out
}

/// A natural transformation `dom => cod` given by its components.
pub struct NatTrans<C: Category> {
    pub dom: Arc<Diagram<C>>,
    pub cod: Arc<Diagram<C>>,
    pub components: Vec<C::Mor>,
}

impl<C: Category> Clone for NatTrans<C> {
    fn clone(&self) -> Self {
        NatTrans {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            components: self.components.clone(),
        }
    }
}

impl<C: Category> fmt::Debug for NatTrans<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NatTrans")
            .field("components", &self.components)
            .finish()
    }
}

impl<C: Category> PartialEq for NatTrans<C> {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && self.dom == other.dom && self.cod == other.cod
    }
}

impl<C: Category> Eq for NatTrans<C> {}

impl<C: Category> Hash for NatTrans<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dom.hash(state);
        self.cod.hash(state);
        self.components.hash(state);
    }
}

impl<C: Category> PartialOrd for NatTrans<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Category> Ord for NatTrans<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dom
            .cmp(&other.dom)
            .then_with(|| self.cod.cmp(&other.cod))
            .then_with(|| self.components.cmp(&other.components))
    }
}

impl<C: Category> NatTrans<C> {
    /// Builds a transformation and checks naturality.
    pub fn new(
        cat: &C,
        dom: Arc<Diagram<C>>,
        cod: Arc<Diagram<C>>,
        components: Vec<C::Mor>,
    ) -> Result<Self> {
        if components.len() != dom.objects.len() || dom.objects.len() != cod.objects.len() {
            return malformed("component table has the wrong length");
        }
        for (o, c) in components.iter().enumerate() {
            if cat.dom(c) != dom.objects[o] || cat.cod(c) != cod.objects[o] {
                return malformed(format!(
                    "component at {} has the wrong endpoints",
                    dom.small().object_label(o)
                ));
            }
        }
        if let Some(m) = naturality_failures(cat, &dom, &cod, &components).first() {
            return malformed(format!("not natural at {}", dom.small().morphism_label(*m)));
        }
        Ok(NatTrans {
            dom,
            cod,
            components,
        })
    }

    pub fn identity(cat: &C, d: Arc<Diagram<C>>) -> Self {
        let components = d.objects.iter().map(|o| cat.identity(o)).collect();
        NatTrans {
            dom: d.clone(),
            cod: d,
            components,
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, cat: &C, other: &NatTrans<C>) -> Result<Self> {
        if *self.cod != *other.dom {
            return malformed("transformations are not composable");
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(f, g)| cat.compose(g, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(NatTrans {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            components,
        })
    }
}

/// Index morphisms at which the square `β_cod ∘ F(m) = G(m) ∘ β_dom` fails.
pub fn naturality_failures<C: Category>(
    cat: &C,
    f: &Diagram<C>,
    g: &Diagram<C>,
    comps: &[C::Mor],
) -> Vec<usize> {
    let s = f.small();
    (0..s.num_morphisms())
        .filter(|&m| {
            let lhs = cat.compose(&comps[s.cod(m)], &f.morphisms[m]);
            let rhs = cat.compose(&g.morphisms[m], &comps[s.dom(m)]);
            !matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
        })
        .collect()
}

/// All natural transformations `f => g`, in lexicographic order of component tables.
pub fn enumerate_nat_trans<C: Category>(
    cat: &C,
    f: &Diagram<C>,
    g: &Diagram<C>,
    limits: &Limits,
) -> Result<Vec<Vec<C::Mor>>> {
    let s = f.small();
    let n = s.num_objects();
    // morphisms to check once both endpoints are assigned, keyed by the later endpoint
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in 0..s.num_morphisms() {
        if !s.is_identity(m) {
            checks[s.dom(m).max(s.cod(m))].push(m);
        }
    }
    let choices = (0..n)
        .map(|o| cat.hom(&f.objects[o], &g.objects[o]))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut current: Vec<C::Mor> = Vec::with_capacity(n);
    let mut nodes = 0usize;
    fn go<C: Category>(
        cat: &C,
        s: &dyn SmallCat,
        f: &Diagram<C>,
        g: &Diagram<C>,
        choices: &[Vec<C::Mor>],
        checks: &[Vec<usize>],
        current: &mut Vec<C::Mor>,
        out: &mut Vec<Vec<C::Mor>>,
        nodes: &mut usize,
        limits: &Limits,
    ) -> Result<()> {
        let o = current.len();
        if o == choices.len() {
            out.push(current.clone());
            return Limits::check("natural transformations", out.len(), limits.max_results);
        }
        for c in &choices[o] {
            *nodes += 1;
            Limits::check("transformation search nodes", *nodes, limits.max_search)?;
            current.push(c.clone());
            let ok = checks[o].iter().all(|&m| {
                let lhs = cat.compose(&current[s.cod(m)], &f.morphisms[m]);
                let rhs = cat.compose(&g.morphisms[m], &current[s.dom(m)]);
                matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
            });
            if ok {
                go(cat, s, f, g, choices, checks, current, out, nodes, limits)?;
            }
            current.pop();
        }
        Ok(())
    }
    go(
        cat,
        s,
        f,
        g,
        &choices,
        &checks,
        &mut current,
        &mut out,
        &mut nodes,
        limits,
    )?;
    Ok(out)
}

/// Objectwise pushout of `G <=α F =>β H`.
pub struct LevelwisePushout<C: Category> {
    pub object: Diagram<C>,
    /// `G => P`.
    pub left: Vec<C::Mor>,
    /// `H => P`.
    pub right: Vec<C::Mor>,
    pub pushouts: Vec<Pushout<C>>,
}

impl<C: Category> fmt::Debug for LevelwisePushout<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelwisePushout")
            .field("object", &self.object)
            .finish()
    }
}

/// Computes the pushout of diagrams objectwise. Returns `None` if the target
/// does not provide one of the objectwise pushouts.
pub fn levelwise_pushout<C: Category>(
    cat: &C,
    g: &Diagram<C>,
    h: &Diagram<C>,
    alpha: &[C::Mor],
    beta: &[C::Mor],
) -> Result<Option<LevelwisePushout<C>>> {
    let s = g.small();
    let mut pushouts = Vec::with_capacity(alpha.len());
    for (a, b) in alpha.iter().zip(beta) {
        match cat.pushout(a, b)? {
            Some(p) => pushouts.push(p),
            None => return Ok(None),
        }
    }
    let mut morphisms = Vec::with_capacity(s.num_morphisms());
    for m in 0..s.num_morphisms() {
        let (x, y) = (s.dom(m), s.cod(m));
        let u = cat.compose(&pushouts[y].left, &g.morphisms[m])?;
        let v = cat.compose(&pushouts[y].right, &h.morphisms[m])?;
        morphisms.push(cat.pushout_factor(&pushouts[x], &u, &v)?);
    }
    let objects = pushouts.iter().map(|p| p.object.clone()).collect();
    let object = Diagram::unchecked(g.index.clone(), objects, morphisms)?;
    let left = pushouts.iter().map(|p| p.left.clone()).collect();
    let right = pushouts.iter().map(|p| p.right.clone()).collect();
    Ok(Some(LevelwisePushout {
        object,
        left,
        right,
        pushouts,
    }))
}

/// The objectwise factorization of a cocone `(u: G => Z, v: H => Z)` through a levelwise pushout.
pub fn levelwise_factor<C: Category>(
    cat: &C,
    p: &LevelwisePushout<C>,
    u: &[C::Mor],
    v: &[C::Mor],
) -> Result<Vec<C::Mor>> {
    p.pushouts
        .iter()
        .zip(u.iter().zip(v))
        .map(|(po, (a, b))| cat.pushout_factor(po, a, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_index, interval, Shape};
    use crate::pointed::PointedSets;

    fn chain3() -> Index {
        Index::Fin(Arc::new(
            build_index(&Shape::Ordinal(2), &Limits::default()).unwrap(),
        ))
    }

    #[test]
    fn inclusion_of_interval_is_a_functor() {
        let c = PointedSets::new(3);
        let i = interval();
        let f = c.map(2, &[1]);
        let mut mors = vec![c.identity(&1); 3];
        mors[i.hom(0, 0)[0]] = c.identity(&1);
        mors[i.hom(1, 1)[0]] = c.identity(&2);
        mors[i.hom(0, 1)[0]] = f;
        let d = Diagram::<PointedSets>::new(&c, Index::Fin(Arc::new(i)), vec![1, 2], mors).unwrap();
        assert!(check_functor(&c, &d).is_empty());
    }

    #[test]
    fn collapsing_functor_is_fine() {
        let c = PointedSets::new(3);
        let d = Diagram::constant(&c, Index::Fin(Arc::new(interval())), &2);
        assert!(check_functor(&c, &d).is_empty());
    }

    #[test]
    fn composition_violation_names_the_triple() {
        let c = PointedSets::new(4);
        let idx = chain3();
        let s = idx.as_small();
        let objs = vec![1u32, 1, 1];
        let mut mors = vec![c.identity(&1); s.num_morphisms()];
        // send the composite 0->2 to the zero map while 0->1 and 1->2 stay identities
        let m02 = s.hom(0, 2)[0];
        mors[m02] = c.map(1, &[0]);
        let d = Diagram::<PointedSets>::unchecked(idx, objs, mors).unwrap();
        let report = check_functor(&c, &d);
        assert_eq!(report.len(), 1);
        assert!(
            matches!(&report[0], Violation::Composition { composite, .. } if composite == "0->2")
        );
    }

    #[test]
    fn nat_trans_enumeration_counts() {
        // transformations between two constant interval diagrams at 1 are the 2 maps 1 -> 1
        let c = PointedSets::new(3);
        let idx = Index::Fin(Arc::new(interval()));
        let d = Diagram::constant(&c, idx, &1);
        let all = enumerate_nat_trans(&c, &d, &d, &Limits::default()).unwrap();
        assert_eq!(all.len(), 2);
    }
}

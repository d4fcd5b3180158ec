//! Categories of diagrams `index -> D` over an enumerated skeleton, with levelwise
//! weak equivalences and cofibrations detected by goodness of cubes. Internal
//! hom categories and the S-dot levels are instances.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::category::{Category, Pushout, Waldhausen};
use crate::cubes::{arrow_cube, is_good, Cube};
use crate::diagram::{
    enumerate_nat_trans, levelwise_factor, levelwise_pushout, Diagram, LevelwisePushout, NatTrans,
};
use crate::error::{malformed, Result};
use crate::index::Index;
use crate::limits::Limits;

/// A cube in the index category: vertex objects and axis-edge morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCube {
    pub label: String,
    pub n: usize,
    pub vertices: Vec<usize>,
    /// `(mask, k) -> index morphism`, k 0-based.
    pub edges: HashMap<(usize, usize), usize>,
}

impl IndexCube {
    /// `X ∘ I`.
    pub fn apply<D: Category>(&self, x: &Diagram<D>) -> Cube<D> {
        let vertices = self
            .vertices
            .iter()
            .map(|&o| x.objects[o].clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(&k, &m)| (k, x.morphisms[m].clone()))
            .collect();
        Cube::from_parts(self.n, vertices, &edges)
    }

    /// `α ∘ I`, by vertex.
    pub fn components<D: Category>(&self, alpha: &[D::Mor]) -> Vec<D::Mor> {
        self.vertices.iter().map(|&o| alpha[o].clone()).collect()
    }

    /// The product of cubes in the factors of a product index, axes concatenated.
    pub fn product(
        parts: &[IndexCube],
        encode_object: impl Fn(&[usize]) -> usize,
        encode_morphism: impl Fn(&[usize]) -> usize,
        identity: impl Fn(usize, usize) -> usize,
    ) -> IndexCube {
        let n: usize = parts.iter().map(|p| p.n).sum();
        let offsets: Vec<usize> = parts
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.n;
                Some(o)
            })
            .collect();
        let split = |mask: usize| -> Vec<usize> {
            parts
                .iter()
                .zip(&offsets)
                .map(|(p, &o)| (mask >> o) & ((1 << p.n) - 1))
                .collect()
        };
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..1usize << n {
            let sub = split(mask);
            let objs: Vec<usize> = parts
                .iter()
                .zip(&sub)
                .map(|(p, &s)| p.vertices[s])
                .collect();
            vertices.push(encode_object(&objs));
        }
        let mut edges = HashMap::new();
        for mask in 0..1usize << n {
            let sub = split(mask);
            for (f, (p, &o)) in parts.iter().zip(&offsets).enumerate() {
                for k in 0..p.n {
                    if sub[f] >> k & 1 == 1 {
                        continue;
                    }
                    let mors: Vec<usize> = parts
                        .iter()
                        .zip(&sub)
                        .enumerate()
                        .map(|(g, (q, &s))| {
                            if g == f {
                                q.edges[&(s, k)]
                            } else {
                                identity(g, q.vertices[s])
                            }
                        })
                        .collect();
                    edges.insert((mask, o + k), encode_morphism(&mors));
                }
            }
        }
        let label = parts
            .iter()
            .map(|p| p.label.as_str())
            .collect::<Vec<_>>()
            .join(" x ");
        IndexCube {
            label,
            n,
            vertices,
            edges,
        }
    }
}

/// Diagrams `index -> D` from a fixed skeleton, as a Waldhausen category.
pub struct DiagramCat<D: Waldhausen> {
    name: String,
    pub base: Arc<D>,
    pub index: Index,
    skeleton: Vec<Arc<Diagram<D>>>,
    positions: HashMap<Arc<Diagram<D>>, usize>,
    test_cubes: Vec<IndexCube>,
    zero: Arc<Diagram<D>>,
    limits: Limits,
}

impl<D: Waldhausen> fmt::Debug for DiagramCat<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiagramCat")
            .field("name", &self.name)
            .field("objects", &self.skeleton.len())
            .finish()
    }
}

impl<D: Waldhausen> DiagramCat<D> {
    /// `skeleton` must contain the constant zero diagram.
    pub fn new(
        name: impl Into<String>,
        base: Arc<D>,
        index: Index,
        skeleton: Vec<Arc<Diagram<D>>>,
        test_cubes: Vec<IndexCube>,
        limits: Limits,
    ) -> Result<Self> {
        let zero = Arc::new(Diagram::constant(
            base.as_ref(),
            index.clone(),
            &base.zero(),
        ));
        let positions: HashMap<Arc<Diagram<D>>, usize> = skeleton
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, d)| (d, i))
            .collect();
        if !positions.contains_key(&zero) {
            return malformed("the skeleton does not contain the zero diagram");
        }
        Ok(DiagramCat {
            name: name.into(),
            base,
            index,
            skeleton,
            positions,
            test_cubes,
            zero,
            limits,
        })
    }

    pub fn skeleton(&self) -> &[Arc<Diagram<D>>] {
        &self.skeleton
    }

    pub fn position(&self, d: &Diagram<D>) -> Option<usize> {
        self.positions.get(d).copied()
    }

    pub fn test_cubes(&self) -> &[IndexCube] {
        &self.test_cubes
    }

    /// The first test cube `I` for which `(X∘I ⇒α Y∘I)` is not good, with the reason.
    pub fn cofibration_failure(&self, alpha: &NatTrans<D>) -> Option<(String, String)> {
        let base = self.base.as_ref();
        for c in &self.test_cubes {
            let i = c.apply(&alpha.dom);
            let j = c.apply(&alpha.cod);
            let a = c.components::<D>(&alpha.components);
            let verdict = match arrow_cube(base, &i, &j, &a) {
                Ok(cube) => {
                    let g = is_good(base, &cube);
                    if g.good {
                        continue;
                    }
                    format!(
                        "{}: {}",
                        g.failing_face.map(|f| f.to_string()).unwrap_or_default(),
                        g.reason.unwrap_or_default()
                    )
                }
                Err(e) => e.to_string(),
            };
            return Some((c.label.clone(), verdict));
        }
        None
    }

    fn trans(
        &self,
        dom: Arc<Diagram<D>>,
        cod: Arc<Diagram<D>>,
        components: Vec<D::Mor>,
    ) -> NatTrans<D> {
        NatTrans {
            dom,
            cod,
            components,
        }
    }
}

impl<D: Waldhausen> Category for DiagramCat<D> {
    type Obj = Arc<Diagram<D>>;
    type Mor = NatTrans<D>;
    type Witness = Arc<LevelwisePushout<D>>;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn dom(&self, f: &NatTrans<D>) -> Arc<Diagram<D>> {
        f.dom.clone()
    }

    fn cod(&self, f: &NatTrans<D>) -> Arc<Diagram<D>> {
        f.cod.clone()
    }

    fn identity(&self, a: &Arc<Diagram<D>>) -> NatTrans<D> {
        NatTrans::identity(self.base.as_ref(), a.clone())
    }

    fn compose(&self, g: &NatTrans<D>, f: &NatTrans<D>) -> Result<NatTrans<D>> {
        f.then(self.base.as_ref(), g)
    }

    fn is_iso(&self, f: &NatTrans<D>) -> bool {
        f.components.iter().all(|c| self.base.is_iso(c))
    }

    fn objects(&self) -> Result<Vec<Arc<Diagram<D>>>> {
        Ok(self.skeleton.clone())
    }

    fn hom(&self, a: &Arc<Diagram<D>>, b: &Arc<Diagram<D>>) -> Result<Vec<NatTrans<D>>> {
        Ok(enumerate_nat_trans(self.base.as_ref(), a, b, &self.limits)?
            .into_iter()
            .map(|c| self.trans(a.clone(), b.clone(), c))
            .collect())
    }

    fn pushout(&self, f: &NatTrans<D>, g: &NatTrans<D>) -> Result<Option<Pushout<Self>>> {
        if *f.dom != *g.dom {
            return malformed("pushout legs must share a domain");
        }
        if !(self.is_cofibration(f) || self.is_cofibration(g)) {
            return Ok(None);
        }
        let Some(lp) = levelwise_pushout(
            self.base.as_ref(),
            &f.cod,
            &g.cod,
            &f.components,
            &g.components,
        )?
        else {
            return Ok(None);
        };
        let object = Arc::new(lp.object.clone());
        let left = self.trans(f.cod.clone(), object.clone(), lp.left.clone());
        let right = self.trans(g.cod.clone(), object.clone(), lp.right.clone());
        Ok(Some(Pushout {
            object,
            left,
            right,
            witness: Arc::new(lp),
        }))
    }

    fn pushout_factor(
        &self,
        p: &Pushout<Self>,
        u: &NatTrans<D>,
        v: &NatTrans<D>,
    ) -> Result<NatTrans<D>> {
        let comps = levelwise_factor(self.base.as_ref(), &p.witness, &u.components, &v.components)?;
        Ok(self.trans(p.object.clone(), u.cod.clone(), comps))
    }

    fn obj_label(&self, a: &Arc<Diagram<D>>) -> String {
        match self.position(a) {
            Some(i) => format!("#{i}"),
            None => {
                let s = a.small();
                let objs: Vec<String> = a.objects.iter().map(|o| self.base.obj_label(o)).collect();
                let mors: Vec<String> = (0..s.num_morphisms())
                    .filter(|&m| !s.is_identity(m))
                    .map(|m| self.base.mor_label(&a.morphisms[m]))
                    .collect();
                format!("{{{}; {}}}", objs.join(","), mors.join(","))
            }
        }
    }

    fn mor_label(&self, f: &NatTrans<D>) -> String {
        let comps: Vec<String> = f
            .components
            .iter()
            .map(|c| self.base.mor_label(c))
            .collect();
        format!(
            "{}=>{}[{}]",
            self.obj_label(&f.dom),
            self.obj_label(&f.cod),
            comps.join(",")
        )
    }
}

impl<D: Waldhausen> Waldhausen for DiagramCat<D> {
    fn zero(&self) -> Arc<Diagram<D>> {
        self.zero.clone()
    }

    fn from_zero(&self, a: &Arc<Diagram<D>>) -> NatTrans<D> {
        let comps = a.objects.iter().map(|o| self.base.from_zero(o)).collect();
        self.trans(self.zero.clone(), a.clone(), comps)
    }

    fn to_zero(&self, a: &Arc<Diagram<D>>) -> NatTrans<D> {
        let comps = a.objects.iter().map(|o| self.base.to_zero(o)).collect();
        self.trans(a.clone(), self.zero.clone(), comps)
    }

    fn is_cofibration(&self, f: &NatTrans<D>) -> bool {
        self.cofibration_failure(f).is_none()
    }

    fn is_weq(&self, f: &NatTrans<D>) -> bool {
        f.components.iter().all(|c| self.base.is_weq(c))
    }
}

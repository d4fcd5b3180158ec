//! n-cubes in a Waldhausen category: faces, punctured colimits, southern arrows,
//! goodness and pushouts of good cubes.
//!
//! Vertices are indexed by bitmasks; axis `k` (1-based) is bit `k-1`, so axis `n`
//! is the highest bit.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{Category, Pushout, Waldhausen};
use crate::diagram::Diagram;
use crate::enumerate::{enumerate_functors, Filters};
use crate::error::{malformed, Error, Result};
use crate::index::{build_index, mask_label, Index, Shape, SmallCat};
use crate::limits::Limits;

/// A functor `𝕀ⁿ -> C`, stored as its vertices and its axis edges.
pub struct Cube<C: Category> {
    pub n: usize,
    vertices: Vec<C::Obj>,
    // edges[mask * n + k] for masks with bit k clear
    edges: Vec<Option<C::Mor>>,
}

impl<C: Category> Clone for Cube<C> {
    fn clone(&self) -> Self {
        Cube {
            n: self.n,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        }
    }
}

impl<C: Category> fmt::Debug for Cube<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cube")
            .field("n", &self.n)
            .field("vertices", &self.vertices)
            .field("edges", &self.edges)
            .finish()
    }
}

impl<C: Category> PartialEq for Cube<C> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl<C: Category> Eq for Cube<C> {}

impl<C: Category> Hash for Cube<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.vertices.hash(state);
        self.edges.hash(state);
    }
}

impl<C: Category> Cube<C> {
    /// Builds a cube from its vertices and the edges `(mask, k)` for every mask
    /// with bit `k` clear (k 0-based). Checks endpoints and that every 2-face commutes.
    pub fn from_edges(
        cat: &C,
        n: usize,
        vertices: Vec<C::Obj>,
        edges: &HashMap<(usize, usize), C::Mor>,
    ) -> Result<Self> {
        if vertices.len() != 1 << n {
            return malformed(format!("an {n}-cube needs {} vertices", 1usize << n));
        }
        let mut table = vec![None; (1 << n) * n];
        for mask in 0..1usize << n {
            for k in 0..n {
                if mask >> k & 1 == 1 {
                    continue;
                }
                let e = edges.get(&(mask, k)).ok_or_else(|| {
                    Error::Malformed(format!(
                        "missing edge at {} along axis {}",
                        mask_label(mask, n),
                        k + 1
                    ))
                })?;
                if cat.dom(e) != vertices[mask] || cat.cod(e) != vertices[mask | 1 << k] {
                    return malformed(format!(
                        "edge at {} along axis {} has the wrong endpoints",
                        mask_label(mask, n),
                        k + 1
                    ));
                }
                table[mask * n + k] = Some(e.clone());
            }
        }
        let cube = Cube {
            n,
            vertices,
            edges: table,
        };
        cube.check_commutes(cat)?;
        Ok(cube)
    }

    fn check_commutes(&self, cat: &C) -> Result<()> {
        let n = self.n;
        for mask in 0..1usize << n {
            for j in 0..n {
                for k in j + 1..n {
                    if mask >> j & 1 == 1 || mask >> k & 1 == 1 {
                        continue;
                    }
                    let a = cat.compose(self.edge(mask | 1 << j, k), self.edge(mask, j))?;
                    let b = cat.compose(self.edge(mask | 1 << k, j), self.edge(mask, k))?;
                    if a != b {
                        return malformed(format!(
                            "the 2-face at {} on axes {} and {} does not commute",
                            mask_label(mask, n),
                            j + 1,
                            k + 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Like [`Cube::from_edges`] for data already known to form a cube.
    pub(crate) fn from_parts(
        n: usize,
        vertices: Vec<C::Obj>,
        edges: &HashMap<(usize, usize), C::Mor>,
    ) -> Self {
        let mut table = vec![None; (1 << n) * n];
        for (&(mask, k), e) in edges {
            table[mask * n + k] = Some(e.clone());
        }
        Cube {
            n,
            vertices,
            edges: table,
        }
    }

    /// The 0-cube at `a`.
    pub fn point(a: C::Obj) -> Self {
        Cube {
            n: 0,
            vertices: vec![a],
            edges: Vec::new(),
        }
    }

    /// The 1-cube `f`.
    pub fn arrow(cat: &C, f: &C::Mor) -> Self {
        Cube {
            n: 1,
            vertices: vec![cat.dom(f), cat.cod(f)],
            edges: vec![Some(f.clone()), None],
        }
    }

    /// The square with edges `top: I(00) -> I(10)` (axis 1), `left: I(00) -> I(01)` (axis 2),
    /// `right: I(10) -> I(11)` and `bottom: I(01) -> I(11)`.
    pub fn square(
        cat: &C,
        top: &C::Mor,
        left: &C::Mor,
        right: &C::Mor,
        bottom: &C::Mor,
    ) -> Result<Self> {
        let vertices = vec![cat.dom(top), cat.cod(top), cat.cod(left), cat.cod(right)];
        let edges = HashMap::from([
            ((0, 0), top.clone()),
            ((0, 1), left.clone()),
            ((1, 1), right.clone()),
            ((2, 0), bottom.clone()),
        ]);
        Cube::from_edges(cat, 2, vertices, &edges)
    }

    pub fn vertex(&self, mask: usize) -> &C::Obj {
        &self.vertices[mask]
    }

    pub fn vertices(&self) -> &[C::Obj] {
        &self.vertices
    }

    /// Edge out of `mask` along 0-based axis `k`.
    pub fn edge(&self, mask: usize, k: usize) -> &C::Mor {
        self.edges[mask * self.n + k]
            .as_ref()
            .expect("edge along a clear bit")
    }

    /// All edges keyed by `(mask, k)`, k 0-based.
    pub fn edge_map(&self) -> HashMap<(usize, usize), C::Mor> {
        let mut out = HashMap::new();
        for mask in 0..1usize << self.n {
            for k in 0..self.n {
                if let Some(e) = &self.edges[mask * self.n + k] {
                    out.insert((mask, k), e.clone());
                }
            }
        }
        out
    }

    pub fn full(&self) -> usize {
        (1 << self.n) - 1
    }

    /// The composite `I(from) -> I(to)` for `from ⊆ to`, walking axes in increasing order.
    pub fn path(&self, cat: &C, from: usize, to: usize) -> Result<C::Mor> {
        if from & !to != 0 {
            return malformed("no cube morphism between these vertices");
        }
        let mut acc = cat.identity(&self.vertices[from]);
        let mut cur = from;
        for k in 0..self.n {
            if to >> k & 1 == 1 && cur >> k & 1 == 0 {
                acc = cat.compose(self.edge(cur, k), &acc)?;
                cur |= 1 << k;
            }
        }
        Ok(acc)
    }

    /// The face `I_{kε}`: axis `k` (1-based) fixed at `eps`. Remaining axes keep their order.
    pub fn face(&self, k: usize, eps: u8) -> Result<Self> {
        if k == 0 || k > self.n {
            return Err(Error::Malformed(format!(
                "axis {k} is out of range for an {}-cube",
                self.n
            )));
        }
        Ok(self.subcube(1 << (k - 1), if eps == 0 { 0 } else { 1 << (k - 1) }))
    }

    /// Restriction to the vertices agreeing with `values` on the axes in `fixed`
    /// (both bitmasks over the original axes).
    pub fn subcube(&self, fixed: usize, values: usize) -> Self {
        let free: Vec<usize> = (0..self.n).filter(|k| fixed >> k & 1 == 0).collect();
        let m = free.len();
        let lift = |sub: usize| -> usize {
            let mut mask = values & fixed;
            for (i, &k) in free.iter().enumerate() {
                if sub >> i & 1 == 1 {
                    mask |= 1 << k;
                }
            }
            mask
        };
        let vertices = (0..1usize << m)
            .map(|s| self.vertices[lift(s)].clone())
            .collect();
        let mut edges = vec![None; (1 << m) * m];
        for s in 0..1usize << m {
            for (i, &k) in free.iter().enumerate() {
                if s >> i & 1 == 0 {
                    edges[s * m + i] = Some(self.edge(lift(s), k).clone());
                }
            }
        }
        Cube {
            n: m,
            vertices,
            edges,
        }
    }

    /// The cube as a diagram over the index category `𝕀ⁿ`.
    pub fn to_diagram(&self, cat: &C, limits: &Limits) -> Result<Diagram<C>> {
        let index = build_index(&Shape::Cube(self.n), limits)?;
        let mut gens = HashMap::new();
        for ((mask, k), e) in self.edge_map() {
            gens.insert(index.hom(mask, mask | 1 << k)[0], e);
        }
        Diagram::generate(
            cat,
            Index::Fin(Arc::new(index)),
            self.vertices.clone(),
            &gens,
        )
    }

    /// Reads a cube off a diagram over `𝕀ⁿ`.
    pub fn from_diagram(cat: &C, n: usize, d: &Diagram<C>) -> Result<Self> {
        let s = d.small();
        if s.num_objects() != 1 << n {
            return malformed("diagram is not indexed by a cube");
        }
        let mut edges = HashMap::new();
        for mask in 0..1usize << n {
            for k in 0..n {
                if mask >> k & 1 == 0 {
                    let m = *s
                        .hom(mask, mask | 1 << k)
                        .first()
                        .ok_or_else(|| Error::Malformed("not a cube index".into()))?;
                    edges.insert((mask, k), d.morphisms[m].clone());
                }
            }
        }
        Cube::from_edges(cat, n, d.objects.clone(), &edges)
    }

    /// Applies a vertexwise map of values (used to push cubes along functors).
    pub fn map<D: Category>(
        &self,
        target: &D,
        obj: impl Fn(&C::Obj) -> Result<D::Obj>,
        mor: impl Fn(&C::Mor) -> Result<D::Mor>,
    ) -> Result<Cube<D>> {
        let vertices = self.vertices.iter().map(obj).collect::<Result<Vec<_>>>()?;
        let mut edges = HashMap::new();
        for ((mask, k), e) in self.edge_map() {
            edges.insert((mask, k), mor(&e)?);
        }
        Cube::from_edges(target, self.n, vertices, &edges)
    }
}

/// The (n+1)-cube `(I ⇒α J)`: `I` at last coordinate 0, `J` at 1, `α` along the last axis.
pub fn arrow_cube<C: Category>(
    cat: &C,
    i: &Cube<C>,
    j: &Cube<C>,
    alpha: &[C::Mor],
) -> Result<Cube<C>> {
    if i.n != j.n || alpha.len() != 1 << i.n {
        return malformed(
            "arrow cube needs two cubes of the same dimension and one component per vertex",
        );
    }
    let n = i.n;
    let top = 1 << n;
    let mut vertices = i.vertices.clone();
    vertices.extend(j.vertices.iter().cloned());
    let mut edges = HashMap::new();
    for ((mask, k), e) in i.edge_map() {
        edges.insert((mask, k), e);
    }
    for ((mask, k), e) in j.edge_map() {
        edges.insert((mask | top, k), e);
    }
    for (mask, a) in alpha.iter().enumerate() {
        edges.insert((mask, n), a.clone());
    }
    Cube::from_edges(cat, n + 1, vertices, &edges).map_err(|e| match e {
        Error::Malformed(m) => Error::Malformed(format!("transformation is not natural: {m}")),
        other => other,
    })
}

/// `colim I'` for the punctured cube, with its cocone and the data to factor through it.
pub struct Punctured<C: Category> {
    pub n: usize,
    pub object: C::Obj,
    /// Leg from each vertex other than `(1,...,1)`, indexed by mask.
    pub legs: Vec<C::Mor>,
    shape: Shape_<C>,
}

enum Shape_<C: Category> {
    Zero,
    Single,
    Pushout {
        upper: Box<Punctured<C>>,
        pushout: Pushout<C>,
    },
}

impl<C: Waldhausen> Punctured<C> {
    /// The unique map `colim I' -> target` restricting to `cocone[mask]` at each vertex.
    pub fn factor(&self, cat: &C, target: &C::Obj, cocone: &[C::Mor]) -> Result<C::Mor> {
        match &self.shape {
            Shape_::Zero => Ok(cat.from_zero(target)),
            Shape_::Single => Ok(cocone[0].clone()),
            Shape_::Pushout { upper, pushout } => {
                let top = 1 << (self.n - 1);
                let full0 = top - 1;
                let upper_cocone: Vec<C::Mor> =
                    (0..full0).map(|m| cocone[m | top].clone()).collect();
                let m1 = upper.factor(cat, target, &upper_cocone)?;
                cat.pushout_factor(pushout, &m1, &cocone[full0])
            }
        }
    }
}

/// Computes `colim I'` by splitting on the last axis:
/// `colim I' = colim (I_{n1})' ∪_{colim (I_{n0})'} I(1,...,1,0)`.
pub fn punctured_colimit<C: Waldhausen>(cat: &C, cube: &Cube<C>) -> Result<Punctured<C>> {
    let n = cube.n;
    if n == 0 {
        return Ok(Punctured {
            n,
            object: cat.zero(),
            legs: Vec::new(),
            shape: Shape_::Zero,
        });
    }
    if n == 1 {
        let a = cube.vertex(0).clone();
        return Ok(Punctured {
            n,
            legs: vec![cat.identity(&a)],
            object: a,
            shape: Shape_::Single,
        });
    }
    let top = 1 << (n - 1);
    let full0 = top - 1;
    let lower_face = cube.face(n, 0)?;
    let upper_face = cube.face(n, 1)?;
    let lower = punctured_colimit(cat, &lower_face)?;
    let upper = punctured_colimit(cat, &upper_face)?;
    // c: colim (I_{n0})' -> colim (I_{n1})'
    let c_cocone = (0..full0)
        .map(|m| cat.compose(&upper.legs[m], cube.edge(m, n - 1)))
        .collect::<Result<Vec<_>>>()?;
    let c = lower.factor(cat, &upper.object, &c_cocone)?;
    // s0: the southern arrow of I_{n0}
    let s_cocone = (0..full0)
        .map(|m| lower_face.path(cat, m, full0))
        .collect::<Result<Vec<_>>>()?;
    let s0 = lower.factor(cat, lower_face.vertex(full0), &s_cocone)?;
    let pushout = cat.pushout(&c, &s0)?.ok_or_else(|| {
        Error::NoColimit(format!(
            "{} provides no pushout of {} and {}",
            cat.name(),
            cat.mor_label(&c),
            cat.mor_label(&s0)
        ))
    })?;
    let mut legs = Vec::with_capacity(cube.full());
    for m in 0..cube.full() {
        let leg = if m & top != 0 {
            cat.compose(&pushout.left, &upper.legs[m & !top])?
        } else {
            cat.compose(&pushout.right, &cube.path(cat, m, full0)?)?
        };
        legs.push(leg);
    }
    Ok(Punctured {
        n,
        object: pushout.object.clone(),
        legs,
        shape: Shape_::Pushout {
            upper: Box::new(upper),
            pushout,
        },
    })
}

/// The comparison `colim I' -> I(1,...,1)`.
pub fn southern_arrow<C: Waldhausen>(cat: &C, cube: &Cube<C>) -> Result<C::Mor> {
    let p = punctured_colimit(cat, cube)?;
    let full = cube.full();
    let cocone = (0..full)
        .map(|m| cube.path(cat, m, full))
        .collect::<Result<Vec<_>>>()?;
    p.factor(cat, cube.vertex(full), &cocone)
}

/// A face of a cube given by fixed axes (1-based) and their values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceId {
    pub fixed: Vec<(usize, u8)>,
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fixed.is_empty() {
            return write!(f, "the whole cube");
        }
        let parts: Vec<String> = self
            .fixed
            .iter()
            .map(|(k, e)| format!("axis {k}={e}"))
            .collect();
        write!(f, "face [{}]", parts.join(", "))
    }
}

/// Result of [`is_good`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goodness {
    pub good: bool,
    /// The deepest failing face, if any.
    pub failing_face: Option<FaceId>,
    pub reason: Option<String>,
}

impl Goodness {
    fn ok() -> Self {
        Goodness {
            good: true,
            failing_face: None,
            reason: None,
        }
    }
}

/// A cube is good if its southern arrow is a cofibration and all its faces are good.
pub fn is_good<C: Waldhausen>(cat: &C, cube: &Cube<C>) -> Goodness {
    let mut memo = HashMap::new();
    good_rec(cat, cube, 0, 0, &mut memo)
}

fn good_rec<C: Waldhausen>(
    cat: &C,
    cube: &Cube<C>,
    fixed: usize,
    values: usize,
    memo: &mut HashMap<(usize, usize), Goodness>,
) -> Goodness {
    if let Some(g) = memo.get(&(fixed, values)) {
        return g.clone();
    }
    let mut result = Goodness::ok();
    let free: Vec<usize> = (0..cube.n).filter(|k| fixed >> k & 1 == 0).collect();
    if !free.is_empty() {
        'faces: for &k in &free {
            for e in 0..2usize {
                let g = good_rec(cat, cube, fixed | 1 << k, values | e << k, memo);
                if !g.good {
                    result = g;
                    break 'faces;
                }
            }
        }
        if result.good {
            let sub = cube.subcube(fixed, values);
            let face = FaceId {
                fixed: (0..cube.n)
                    .filter(|k| fixed >> k & 1 == 1)
                    .map(|k| (k + 1, (values >> k & 1) as u8))
                    .collect(),
            };
            match southern_arrow(cat, &sub) {
                Ok(s) if cat.is_cofibration(&s) => {}
                Ok(s) => {
                    result = Goodness {
                        good: false,
                        failing_face: Some(face),
                        reason: Some(format!(
                            "southern arrow {} is not a cofibration",
                            cat.mor_label(&s)
                        )),
                    }
                }
                Err(e) => {
                    result = Goodness {
                        good: false,
                        failing_face: Some(face),
                        reason: Some(e.to_string()),
                    }
                }
            }
        }
    }
    memo.insert((fixed, values), result.clone());
    result
}

/// A natural transformation between cubes, by vertex.
pub type CubeMap<C> = Vec<<C as Category>::Mor>;

/// Output of [`good_pushout`].
pub struct GoodPushout<C: Category> {
    /// `J ∪_I K`.
    pub cube: Cube<C>,
    /// `β: K ⇒ J ∪_I K`.
    pub beta: CubeMap<C>,
    /// `J ⇒ J ∪_I K`.
    pub other: CubeMap<C>,
}

/// Vertexwise pushout of `K ⇐γ I ⇒α J` for good `I, J, K` and good `[α]`. With
/// `verify`, checks that `J ∪_I K` and `[β]` are good.
pub fn good_pushout<C: Waldhausen>(
    cat: &C,
    i: &Cube<C>,
    j: &Cube<C>,
    k: &Cube<C>,
    alpha: &[C::Mor],
    gamma: &[C::Mor],
    verify: bool,
) -> Result<GoodPushout<C>> {
    for (name, c) in [("I", i), ("J", j), ("K", k)] {
        let g = is_good(cat, c);
        if !g.good {
            return Err(Error::Hypothesis(format!(
                "{name} is not good at {}: {}",
                g.failing_face.unwrap(),
                g.reason.unwrap_or_default()
            )));
        }
    }
    let a = arrow_cube(cat, i, j, alpha)?;
    let g = is_good(cat, &a);
    if !g.good {
        return Err(Error::Hypothesis(format!(
            "[α] is not good at {}: {}",
            g.failing_face.unwrap(),
            g.reason.unwrap_or_default()
        )));
    }
    arrow_cube(cat, i, k, gamma)?;
    let n = i.n;
    let mut pushouts = Vec::with_capacity(1 << n);
    for mask in 0..1usize << n {
        let p = cat.pushout(&alpha[mask], &gamma[mask])?.ok_or_else(|| {
            Error::NoColimit(format!("no pushout at vertex {}", mask_label(mask, n)))
        })?;
        pushouts.push(p);
    }
    let mut edges = HashMap::new();
    for mask in 0..1usize << n {
        for ax in 0..n {
            if mask >> ax & 1 == 1 {
                continue;
            }
            let to = mask | 1 << ax;
            let u = cat.compose(&pushouts[to].left, j.edge(mask, ax))?;
            let v = cat.compose(&pushouts[to].right, k.edge(mask, ax))?;
            edges.insert((mask, ax), cat.pushout_factor(&pushouts[mask], &u, &v)?);
        }
    }
    let vertices = pushouts.iter().map(|p| p.object.clone()).collect();
    let cube = Cube::from_edges(cat, n, vertices, &edges)?;
    let beta: Vec<C::Mor> = pushouts.iter().map(|p| p.right.clone()).collect();
    let other: Vec<C::Mor> = pushouts.iter().map(|p| p.left.clone()).collect();
    if verify {
        let g = is_good(cat, &cube);
        if !g.good {
            return Err(Error::Verification(format!(
                "J ∪_I K is not good: {}",
                g.reason.unwrap_or_default()
            )));
        }
        let b = arrow_cube(cat, k, &cube, &beta)?;
        let g = is_good(cat, &b);
        if !g.good {
            return Err(Error::Verification(format!(
                "[β] is not good: {}",
                g.reason.unwrap_or_default()
            )));
        }
    }
    Ok(GoodPushout { cube, beta, other })
}

/// Every n-cube with vertices in the skeleton, in enumeration order.
pub fn enumerate_cubes<C: Category>(cat: &C, n: usize, limits: &Limits) -> Result<Vec<Cube<C>>> {
    let index = Index::Fin(Arc::new(build_index(&Shape::Cube(n), limits)?));
    let s = index.as_small();
    let axis_maps: Vec<(usize, usize, usize)> = (0..1usize << n)
        .flat_map(|mask| {
            (0..n)
                .filter(move |k| mask >> k & 1 == 0)
                .map(move |k| (mask, k))
        })
        .map(|(mask, k)| (mask, k, s.hom(mask, mask | 1 << k)[0]))
        .collect();
    let diagrams = enumerate_functors(cat, &index, &Filters::default(), limits)?;
    Ok(diagrams
        .into_iter()
        .map(|d| {
            let edges = axis_maps
                .iter()
                .map(|&(mask, k, m)| ((mask, k), d.morphisms[m].clone()))
                .collect();
            Cube::from_parts(n, d.objects, &edges)
        })
        .collect())
}

/// Every natural transformation `I ⇒ J`, by vertex.
pub fn enumerate_cube_maps<C: Category>(
    cat: &C,
    i: &Cube<C>,
    j: &Cube<C>,
    limits: &Limits,
) -> Result<Vec<CubeMap<C>>> {
    if i.n != j.n {
        return Ok(Vec::new());
    }
    let homs = (0..1usize << i.n)
        .map(|m| cat.hom(i.vertex(m), j.vertex(m)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut chosen: Vec<C::Mor> = Vec::with_capacity(homs.len());
    cube_maps_rec(cat, i, j, &homs, &mut chosen, &mut out, limits)?;
    Ok(out)
}

fn cube_maps_rec<C: Category>(
    cat: &C,
    i: &Cube<C>,
    j: &Cube<C>,
    homs: &[Vec<C::Mor>],
    chosen: &mut Vec<C::Mor>,
    out: &mut Vec<CubeMap<C>>,
    limits: &Limits,
) -> Result<()> {
    let m = chosen.len();
    if m == homs.len() {
        out.push(chosen.clone());
        return Limits::check("cube maps", out.len(), limits.max_results);
    }
    'next: for a in &homs[m] {
        for k in (0..i.n).filter(|k| m >> k & 1 == 1) {
            let from = m & !(1 << k);
            if cat.compose(a, i.edge(from, k))? != cat.compose(j.edge(from, k), &chosen[from])? {
                continue 'next;
            }
        }
        chosen.push(a.clone());
        cube_maps_rec(cat, i, j, homs, chosen, out, limits)?;
        chosen.pop();
    }
    Ok(())
}

impl<C: Category> Cube<C> {
    /// Vertex labels in mask order, then the non-identity edges.
    pub fn label(&self, cat: &C) -> String {
        let vs: Vec<String> = self.vertices.iter().map(|v| cat.obj_label(v)).collect();
        let mut es = Vec::new();
        for mask in 0..1usize << self.n {
            for k in 0..self.n {
                if let Some(e) = &self.edges[mask * self.n + k] {
                    if !cat.is_identity(e) {
                        es.push(format!("{}:{}", mask_label(mask, self.n), cat.mor_label(e)));
                    }
                }
            }
        }
        format!("[{} | {}]", vs.join(","), es.join(","))
    }
}

/// Outcome of [`check_good_pushouts`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodPushoutReport {
    pub n: usize,
    /// Good n-cubes in the skeleton.
    pub good_cubes: usize,
    /// Triples `K ⇐γ I ⇒α J` with `I`, `J`, `K`, `[α]` good.
    pub triples: usize,
    pub failures: Vec<String>,
}

/// Runs [`good_pushout`] in verification mode on every good input triple of
/// n-cubes with vertices in the skeleton.
pub fn check_good_pushouts<C: Waldhausen>(
    cat: &C,
    n: usize,
    limits: &Limits,
) -> Result<GoodPushoutReport> {
    let cubes = enumerate_cubes(cat, n, limits)?;
    let verdicts: Vec<bool> = cubes.par_iter().map(|c| is_good(cat, c).good).collect();
    let inputs: Vec<&Cube<C>> = cubes
        .iter()
        .zip(&verdicts)
        .filter(|(_, &g)| g)
        .map(|(c, _)| c)
        .collect();
    let results = inputs
        .par_iter()
        .map(|&i| -> Result<(usize, Vec<String>)> {
            let mut alphas = Vec::new();
            let mut gammas = Vec::new();
            for &j in &inputs {
                for comps in enumerate_cube_maps(cat, i, j, limits)? {
                    if is_good(cat, &arrow_cube(cat, i, j, &comps)?).good {
                        alphas.push((j, comps.clone()));
                    }
                    gammas.push((j, comps));
                }
            }
            let mut failures = Vec::new();
            for (j, alpha) in &alphas {
                for (k, gamma) in &gammas {
                    if let Err(e) = good_pushout(cat, i, j, k, alpha, gamma, true) {
                        if failures.len() < crate::wald::MAX_WITNESSES {
                            failures.push(format!(
                                "I={} J={} K={}: {e}",
                                i.label(cat),
                                j.label(cat),
                                k.label(cat)
                            ));
                        }
                    }
                }
            }
            Ok((alphas.len() * gammas.len(), failures))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = GoodPushoutReport {
        n,
        good_cubes: inputs.len(),
        ..Default::default()
    };
    for (count, fs) in results {
        rep.triples += count;
        for f in fs {
            if rep.failures.len() < crate::wald::MAX_WITNESSES {
                rep.failures.push(f);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colimit::colimit;
    use crate::index::Subcategory;
    use crate::pointed::PointedSets;

    fn c() -> PointedSets {
        PointedSets::new(6)
    }

    fn wedge_square(c: &PointedSets) -> Cube<PointedSets> {
        // 0 -> 1, 0 -> 1, pushout 2
        let z = c.from_zero(&1);
        Cube::square(c, &z, &z, &c.map(2, &[1]), &c.map(2, &[2])).unwrap()
    }

    #[test]
    fn zero_and_one_cubes() {
        let c = c();
        let p = Cube::<PointedSets>::point(2);
        assert_eq!(southern_arrow(&c, &p).unwrap(), c.from_zero(&2));
        assert!(is_good(&c, &p).good);
        let f = c.map(2, &[1]);
        assert_eq!(southern_arrow(&c, &Cube::arrow(&c, &f)).unwrap(), f);
        assert!(is_good(&c, &Cube::arrow(&c, &f)).good);
        assert!(!is_good(&c, &Cube::arrow(&c, &c.map(1, &[1, 1]))).good);
    }

    #[test]
    fn faces_commute() {
        let c = c();
        let sq = wedge_square(&c);
        let a = sq.face(1, 0).unwrap().face(1, 0).unwrap();
        let b = sq.face(2, 0).unwrap().face(1, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(sq.face(1, 0).unwrap().vertices(), &[0, 1]);
        assert!(sq.face(3, 0).is_err());
    }

    #[test]
    fn pushout_square_has_iso_southern_arrow() {
        let c = c();
        let s = southern_arrow(&c, &wedge_square(&c)).unwrap();
        assert!(c.is_iso(&s));
        assert!(is_good(&c, &wedge_square(&c)).good);
    }

    #[test]
    fn degenerate_square_is_not_good() {
        // 0 -> A, 0 -> B into A v B, but then fold both into a single point:
        // A = B = 1, I(11) = 1 with both maps the identity. The corner map 1 v 1 -> 1 merges points.
        let c = c();
        let z = c.from_zero(&1);
        let id = c.identity(&1);
        let sq = Cube::square(&c, &z, &z, &id, &id).unwrap();
        let g = is_good(&c, &sq);
        assert!(!g.good);
        assert_eq!(g.failing_face, Some(FaceId { fixed: vec![] }));
    }

    #[test]
    fn arrow_cube_axes() {
        let c = c();
        let sq = wedge_square(&c);
        let alpha: Vec<_> = sq.vertices().iter().map(|v| c.identity(v)).collect();
        let a = arrow_cube(&c, &sq, &sq, &alpha).unwrap();
        assert_eq!(a.n, 3);
        assert_eq!(a.vertices().len(), 8);
        assert_eq!(a.face(3, 0).unwrap(), sq);
        assert_eq!(a.face(3, 1).unwrap(), sq);
        for m in 0..4 {
            assert!(c.is_identity(a.edge(m, 2)));
        }
    }

    #[test]
    fn punctured_colimit_matches_coequalizer_formula_on_a_3_cube() {
        let c = c();
        let sq = wedge_square(&c);
        let alpha = vec![
            c.from_zero(&1),
            c.map(2, &[1]),
            c.map(2, &[2]),
            c.map(3, &[1, 3]),
        ];
        let big = Cube::square(
            &c,
            &c.map(2, &[1]),
            &c.map(2, &[1]),
            &c.map(3, &[1, 2]),
            &c.map(3, &[1, 3]),
        )
        .unwrap();
        let cube = arrow_cube(&c, &sq, &big, &alpha).unwrap();
        let p = punctured_colimit(&c, &cube).unwrap();
        let d = cube.to_diagram(&c, &Limits::default()).unwrap();
        let Index::Fin(idx) = &d.index else {
            unreachable!()
        };
        let objs = (0..7).collect();
        let sub = Subcategory::full(idx, &objs);
        let direct = colimit(&c, &crate::colimit::restrict(&d, idx, &sub)).unwrap();
        assert_eq!(p.object, direct.object);
        assert!(c
            .find_iso_under(&p.object, &direct.object, &p.legs, &direct.legs)
            .unwrap()
            .is_some());
    }

    #[test]
    fn good_pushout_of_arrows() {
        // n = 1: I = 0 -> 1, J = 1 -> 2, K = 0 -> 0
        let c = c();
        let i = Cube::arrow(&c, &c.from_zero(&1));
        let j = Cube::arrow(&c, &c.map(2, &[1]));
        let k = Cube::arrow(&c, &c.from_zero(&0));
        let alpha = vec![c.from_zero(&1), c.map(2, &[2])];
        let gamma = vec![c.to_zero(&0), c.to_zero(&1)];
        let out = good_pushout(&c, &i, &j, &k, &alpha, &gamma, true).unwrap();
        assert_eq!(out.cube.vertices(), &[1, 1]);
    }

    #[test]
    fn cube_counts() {
        let c = PointedSets::new(2);
        let l = Limits::default();
        // objects 0, 1; one map 0->0, 0->1, 1->0 and two maps 1->1
        assert_eq!(enumerate_cubes(&c, 0, &l).unwrap().len(), 2);
        assert_eq!(enumerate_cubes(&c, 1, &l).unwrap().len(), 5);
    }

    #[test]
    fn good_pushouts_low_dimensions() {
        let c = PointedSets::new(3);
        let l = Limits::default();
        for n in 0..2 {
            let r = check_good_pushouts(&c, n, &l).unwrap();
            assert!(r.failures.is_empty(), "{r:?}");
            assert!(r.triples > 0);
        }
    }
}

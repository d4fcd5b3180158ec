//! Multivariable functors out of finite Waldhausen categories: box cubes, the
//! kE1–kE4 checker, composition, the symmetric-group action and the
//! multicategory axioms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::category::{Category, Waldhausen, ZeroTest};
use crate::cubes::{is_good, southern_arrow, Cube};
use crate::diagram::{check_functor, Diagram};
use crate::error::{malformed, Error, Result};
use crate::finwald::{FinWald, Materialized};
use crate::index::{Index, ProductIndex, SmallCat};
use crate::limits::Limits;
use crate::pointed::{PMap, PointedSets};
use crate::wald::MAX_WITNESSES;

/// Whether two table categories are the same source (pointer or name and size).
pub fn same_wald(a: &FinWald, b: &FinWald) -> bool {
    std::ptr::eq(a, b)
        || (a.name() == b.name()
            && a.num_objects() == b.num_objects()
            && a.num_morphisms() == b.num_morphisms())
}

/// A functor `C_1 × ... × C_k -> D` with finite table sources, stored as a diagram
/// over the product index.
pub struct MultiFunctor<D: Category> {
    pub name: String,
    pub sources: Vec<Arc<FinWald>>,
    pub target: Arc<D>,
    pub index: Arc<ProductIndex>,
    pub diagram: Diagram<D>,
}

impl<D: Category> Clone for MultiFunctor<D> {
    fn clone(&self) -> Self {
        MultiFunctor {
            name: self.name.clone(),
            sources: self.sources.clone(),
            target: self.target.clone(),
            index: self.index.clone(),
            diagram: self.diagram.clone(),
        }
    }
}

impl<D: Category> fmt::Debug for MultiFunctor<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiFunctor")
            .field("name", &self.name)
            .field("arity", &self.arity())
            .finish()
    }
}

pub fn product_index(sources: &[Arc<FinWald>], limits: &Limits) -> Result<Arc<ProductIndex>> {
    Ok(Arc::new(ProductIndex::new(
        sources.iter().map(|s| s.fincat().clone()).collect(),
        limits,
    )?))
}

impl<D: Category> MultiFunctor<D> {
    /// Tabulates `obj` and `mor` over every object and morphism tuple. Functoriality
    /// is not checked here; see [`MultiFunctor::functor_violations`].
    pub fn from_fn(
        name: impl Into<String>,
        sources: Vec<Arc<FinWald>>,
        target: Arc<D>,
        limits: &Limits,
        obj: impl Fn(&[usize]) -> Result<D::Obj>,
        mor: impl Fn(&[usize]) -> Result<D::Mor>,
    ) -> Result<Self> {
        let index = product_index(&sources, limits)?;
        let objects = (0..index.num_objects())
            .map(|o| obj(&index.decode_object(o)))
            .collect::<Result<Vec<_>>>()?;
        let morphisms = (0..index.num_morphisms())
            .map(|m| mor(&index.decode_morphism(m)))
            .collect::<Result<Vec<_>>>()?;
        let diagram = Diagram::unchecked(Index::Product(index.clone()), objects, morphisms)?;
        Ok(MultiFunctor {
            name: name.into(),
            sources,
            target,
            index,
            diagram,
        })
    }

    /// Tabulates a functor given on oracle values of materialized sources.
    pub fn from_oracle<C: Category>(
        name: impl Into<String>,
        sources: &[&Materialized<C>],
        target: Arc<D>,
        limits: &Limits,
        obj: impl Fn(&[C::Obj]) -> Result<D::Obj>,
        mor: impl Fn(&[C::Mor]) -> Result<D::Mor>,
    ) -> Result<Self> {
        let walds = sources.iter().map(|m| m.wald.clone()).collect();
        MultiFunctor::from_fn(
            name,
            walds,
            target,
            limits,
            |t| {
                obj(&t
                    .iter()
                    .zip(sources)
                    .map(|(&x, m)| m.objects[x].clone())
                    .collect::<Vec<_>>())
            },
            |t| {
                mor(&t
                    .iter()
                    .zip(sources)
                    .map(|(&x, m)| m.morphisms[x].clone())
                    .collect::<Vec<_>>())
            },
        )
    }

    /// Wraps a diagram over the product of the sources.
    pub fn from_diagram(
        name: impl Into<String>,
        sources: Vec<Arc<FinWald>>,
        target: Arc<D>,
        diagram: Diagram<D>,
    ) -> Result<Self> {
        let Index::Product(index) = diagram.index.clone() else {
            return malformed("a multifunctor needs a product index");
        };
        if index.arity() != sources.len() {
            return malformed("index arity does not match the sources");
        }
        Ok(MultiFunctor {
            name: name.into(),
            sources,
            target,
            index,
            diagram,
        })
    }

    pub fn arity(&self) -> usize {
        self.sources.len()
    }

    pub fn obj(&self, tuple: &[usize]) -> &D::Obj {
        &self.diagram.objects[self.index.encode_object(tuple)]
    }

    pub fn mor(&self, tuple: &[usize]) -> &D::Mor {
        &self.diagram.morphisms[self.index.encode_morphism(tuple)]
    }

    pub fn functor_violations(&self) -> Vec<String> {
        check_functor(self.target.as_ref(), &self.diagram)
            .into_iter()
            .map(|v| v.to_string())
            .collect()
    }

    /// Same sources and equal tables.
    pub fn same_as(&self, other: &Self) -> bool {
        self.arity() == other.arity()
            && self
                .sources
                .iter()
                .zip(&other.sources)
                .all(|(a, b)| same_wald(a, b))
            && self.diagram == other.diagram
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The same functor with values replaced by their ids in a materialized target.
    pub fn into_fin(&self, m: &Materialized<D>) -> Result<MultiFunctor<FinWald>> {
        let objects = self
            .diagram
            .objects
            .iter()
            .map(|o| {
                m.object_id(o).ok_or_else(|| {
                    Error::Malformed(format!("{} leaves the skeleton", self.target.obj_label(o)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let morphisms = self
            .diagram
            .morphisms
            .iter()
            .map(|f| {
                m.morphism_id(f).ok_or_else(|| {
                    Error::Malformed(format!("{} leaves the skeleton", self.target.mor_label(f)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let diagram = Diagram::unchecked(self.diagram.index.clone(), objects, morphisms)?;
        Ok(MultiFunctor {
            name: self.name.clone(),
            sources: self.sources.clone(),
            target: m.wald.clone(),
            index: self.index.clone(),
            diagram,
        })
    }

    /// Identity padding: `F(id, ..., f_i, ..., id)` at the given objects.
    pub fn in_variable(&self, objects: &[usize], i: usize, f: usize) -> D::Mor {
        let mut t: Vec<usize> = objects
            .iter()
            .zip(&self.sources)
            .map(|(&o, s)| s.fincat().identity(o))
            .collect();
        t[i] = f;
        self.mor(&t).clone()
    }
}

impl<D: Waldhausen> MultiFunctor<D> {
    /// `[f̄]_F`: vertex `ε` is `F(A_{1ε_1}, ..., A_{kε_k})`, axis `i` carries `f_i`.
    pub fn box_cube(&self, fbar: &[usize]) -> Result<Cube<D>> {
        if fbar.len() != self.arity() {
            return malformed(format!(
                "box cube needs {} morphisms, got {}",
                self.arity(),
                fbar.len()
            ));
        }
        let k = self.arity();
        let ends = |mask: usize| -> Vec<usize> {
            fbar.iter()
                .zip(&self.sources)
                .enumerate()
                .map(|(i, (&f, s))| {
                    if mask >> i & 1 == 1 {
                        s.fincat().cod(f)
                    } else {
                        s.fincat().dom(f)
                    }
                })
                .collect()
        };
        let vertices = (0..1usize << k)
            .map(|m| self.obj(&ends(m)).clone())
            .collect();
        let mut edges = HashMap::new();
        for mask in 0..1usize << k {
            let objs = ends(mask);
            for i in 0..k {
                if mask >> i & 1 == 0 {
                    edges.insert((mask, i), self.in_variable(&objs, i, fbar[i]));
                }
            }
        }
        Ok(Cube::from_parts(k, vertices, &edges))
    }

    /// The southern arrow of `[f̄]_F`.
    pub fn box_product(&self, fbar: &[usize]) -> Result<D::Mor> {
        southern_arrow(self.target.as_ref(), &self.box_cube(fbar)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KAxiom {
    KE1,
    KE2,
    KE3,
    KE4,
}

impl fmt::Display for KAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KAxiom::KE1 => "kE1",
            KAxiom::KE2 => "kE2",
            KAxiom::KE3 => "kE3",
            KAxiom::KE4 => "kE4",
        };
        f.write_str(s)
    }
}

/// How kE4 is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExactMode {
    /// Every box cube of a cofibration tuple is good.
    #[default]
    Full,
    /// Only the southern arrows of those cubes are cofibrations.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExactWitness {
    pub axiom: KAxiom,
    /// Labels of the objects or morphisms of the offending tuple.
    pub tuple: Vec<String>,
    pub message: String,
}

impl fmt::Display for ExactWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at ({}): {}",
            self.axiom,
            self.tuple.join(", "),
            self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactReport {
    pub functor: String,
    pub arity: usize,
    pub mode: ExactMode,
    /// At most [`MAX_WITNESSES`] per axiom, sorted.
    pub witnesses: Vec<ExactWitness>,
}

impl ExactReport {
    pub fn exact(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn fails(&self, a: KAxiom) -> bool {
        self.witnesses.iter().any(|w| w.axiom == a)
    }
}

struct Witnesses {
    list: Vec<ExactWitness>,
    counts: HashMap<KAxiom, usize>,
}

impl Witnesses {
    fn push(&mut self, axiom: KAxiom, tuple: Vec<String>, message: String) {
        let c = self.counts.entry(axiom).or_default();
        if *c < MAX_WITNESSES {
            *c += 1;
            self.list.push(ExactWitness {
                axiom,
                tuple,
                message,
            });
        }
    }
}

pub(crate) fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    lists_product(&sizes.iter().map(|&n| (0..n).collect()).collect::<Vec<_>>())
}

pub fn lists_product(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    if lists.is_empty() {
        return vec![Vec::new()];
    }
    lists
        .iter()
        .map(|l| l.iter().copied())
        .multi_cartesian_product()
        .collect()
}

/// Checks kE1–kE4 exhaustively over the sources' tables, reading kE1 strictly.
pub fn check_k_exact<D: Waldhausen>(f: &MultiFunctor<D>, mode: ExactMode) -> Result<ExactReport> {
    check_k_exact_with(f, mode, ZeroTest::Strict)
}

pub fn check_k_exact_with<D: Waldhausen>(
    f: &MultiFunctor<D>,
    mode: ExactMode,
    zero: ZeroTest,
) -> Result<ExactReport> {
    let d = f.target.as_ref();
    let k = f.arity();
    let srcs: Vec<&FinWald> = f.sources.iter().map(|s| s.as_ref()).collect();
    let obj_label = |t: &[usize]| -> Vec<String> {
        t.iter().zip(&srcs).map(|(&o, s)| s.obj_label(&o)).collect()
    };
    let mor_label = |t: &[usize]| -> Vec<String> {
        t.iter().zip(&srcs).map(|(&m, s)| s.mor_label(&m)).collect()
    };
    let mut w = Witnesses {
        list: Vec::new(),
        counts: HashMap::new(),
    };
    let sizes: Vec<usize> = srcs.iter().map(|s| s.num_objects()).collect();
    let all_objects = tuples(&sizes);

    // kE1
    for t in &all_objects {
        if t.iter().zip(&srcs).any(|(&o, s)| s.is_zero(&o)) && !zero.holds(d, f.obj(t)) {
            w.push(
                KAxiom::KE1,
                obj_label(t),
                format!("value {} is not zero", d.obj_label(f.obj(t))),
            );
        }
    }

    // kE2: pushouts along cofibrations in each variable, the others fixed
    for i in 0..k {
        let entries = srcs[i].pushout_entries();
        let others: Vec<usize> = (0..k).map(|j| if j == i { 1 } else { sizes[j] }).collect();
        for rest in tuples(&others) {
            for &((pf, pg), (_, pl, pr)) in &entries {
                let mut objs = rest.clone();
                objs[i] = srcs[i].dom(&pf);
                let ff = f.in_variable(&objs, i, pf);
                let fg = f.in_variable(&objs, i, pg);
                let fl = f.in_variable(&objs, i, pl);
                let fr = f.in_variable(&objs, i, pr);
                let mut lbl = obj_label(&objs);
                lbl[i] = format!(
                    "{} <- {} -> {}",
                    srcs[i].mor_label(&pf),
                    srcs[i].obj_label(&objs[i]),
                    srcs[i].mor_label(&pg)
                );
                match d.pushout(&ff, &fg)? {
                    None => w.push(
                        KAxiom::KE2,
                        lbl,
                        "the target provides no pushout of the image span".into(),
                    ),
                    Some(p) => {
                        let m = d.pushout_factor(&p, &fl, &fr)?;
                        if !d.is_iso(&m) {
                            w.push(
                                KAxiom::KE2,
                                lbl,
                                format!("comparison {} is not an isomorphism", d.mor_label(&m)),
                            );
                        }
                    }
                }
            }
        }
    }

    // kE3
    let weqs: Vec<Vec<usize>> = srcs.iter().map(|s| s.weak_equivalences()).collect();
    for t in lists_product(&weqs) {
        let v = f.mor(&t);
        if !d.is_weq(v) {
            w.push(
                KAxiom::KE3,
                mor_label(&t),
                format!("image {} is not a weak equivalence", d.mor_label(v)),
            );
        }
    }

    // kE4
    let cofs: Vec<Vec<usize>> = srcs.iter().map(|s| s.cofibrations()).collect();
    for t in lists_product(&cofs) {
        let cube = f.box_cube(&t)?;
        match mode {
            ExactMode::Full => {
                let g = is_good(d, &cube);
                if !g.good {
                    let face = g.failing_face.map(|x| x.to_string()).unwrap_or_default();
                    w.push(
                        KAxiom::KE4,
                        mor_label(&t),
                        format!(
                            "box cube not good at {face}: {}",
                            g.reason.unwrap_or_default()
                        ),
                    );
                }
            }
            ExactMode::Reduced => match southern_arrow(d, &cube) {
                Ok(s) if d.is_cofibration(&s) => {}
                Ok(s) => w.push(
                    KAxiom::KE4,
                    mor_label(&t),
                    format!("southern arrow {} is not a cofibration", d.mor_label(&s)),
                ),
                Err(e) => w.push(
                    KAxiom::KE4,
                    mor_label(&t),
                    format!("no southern arrow: {e}"),
                ),
            },
        }
    }
    let mut witnesses = w.list;
    witnesses.sort();
    Ok(ExactReport {
        functor: f.name.clone(),
        arity: k,
        mode,
        witnesses,
    })
}

/// `F ∘ (G_1, ..., G_k)`: sources concatenated, `H(x̄_1, ..., x̄_k) = F(G_1(x̄_1), ..., G_k(x̄_k))`.
pub fn compose_multi<E: Category>(
    f: &MultiFunctor<E>,
    gs: &[MultiFunctor<FinWald>],
    limits: &Limits,
) -> Result<MultiFunctor<E>> {
    if gs.len() != f.arity() {
        return malformed(format!(
            "{} takes {} inputs, got {}",
            f.name,
            f.arity(),
            gs.len()
        ));
    }
    for (i, g) in gs.iter().enumerate() {
        if !same_wald(&g.target, &f.sources[i]) {
            return malformed(format!(
                "target {} of {} does not match input {} ({}) of {}",
                g.target.name(),
                g.name,
                i + 1,
                f.sources[i].name(),
                f.name
            ));
        }
    }
    let sources: Vec<Arc<FinWald>> = gs.iter().flat_map(|g| g.sources.iter().cloned()).collect();
    let bounds: Vec<(usize, usize)> = gs
        .iter()
        .scan(0, |acc, g| {
            let s = *acc;
            *acc += g.arity();
            Some((s, *acc))
        })
        .collect();
    let name = format!(
        "{}∘({})",
        f.name,
        gs.iter().map(|g| g.name.as_str()).join(", ")
    );
    MultiFunctor::from_fn(
        name,
        sources,
        f.target.clone(),
        limits,
        |t| {
            let y: Vec<usize> = gs
                .iter()
                .zip(&bounds)
                .map(|(g, &(a, b))| *g.obj(&t[a..b]))
                .collect();
            Ok(f.obj(&y).clone())
        },
        |t| {
            let y: Vec<usize> = gs
                .iter()
                .zip(&bounds)
                .map(|(g, &(a, b))| *g.mor(&t[a..b]))
                .collect();
            Ok(f.mor(&y).clone())
        },
    )
}

/// Checks that `sigma` is a permutation of `0..k`.
pub fn check_permutation(sigma: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if sigma.len() != k {
        return malformed(format!(
            "permutation has length {}, expected {k}",
            sigma.len()
        ));
    }
    for &s in sigma {
        if s >= k || seen[s] {
            return malformed(format!("{sigma:?} is not a permutation"));
        }
        seen[s] = true;
    }
    Ok(())
}

/// `(σ∘τ)(i) = σ(τ(i))`.
pub fn compose_perm(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&t| sigma[t]).collect()
}

pub fn invert_perm(sigma: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    inv
}

/// The right action `(F·σ)(x_1, ..., x_k) = F(x_{σ⁻¹(1)}, ..., x_{σ⁻¹(k)})`, so that
/// `F·(σ∘τ) = (F·σ)·τ`. Input `m` of `F·σ` is input `σ(m)` of `F`.
pub fn sigma_action<D: Category>(
    f: &MultiFunctor<D>,
    sigma: &[usize],
    limits: &Limits,
) -> Result<MultiFunctor<D>> {
    let k = f.arity();
    check_permutation(sigma, k)?;
    let inv = invert_perm(sigma);
    let sources = sigma.iter().map(|&s| f.sources[s].clone()).collect();
    let name = format!("{}·{:?}", f.name, sigma);
    MultiFunctor::from_fn(
        name,
        sources,
        f.target.clone(),
        limits,
        |x| {
            Ok(f.obj(&(0..k).map(|j| x[inv[j]]).collect::<Vec<_>>())
                .clone())
        },
        |x| {
            Ok(f.mor(&(0..k).map(|j| x[inv[j]]).collect::<Vec<_>>())
                .clone())
        },
    )
}

/// The identity functor of a table category.
pub fn unit(c: &Arc<FinWald>, limits: &Limits) -> Result<MultiFunctor<FinWald>> {
    MultiFunctor::from_fn(
        format!("1[{}]", c.name()),
        vec![c.clone()],
        c.clone(),
        limits,
        |t| Ok(t[0]),
        |t| Ok(t[0]),
    )
}

/// The constant (0-ary) functor at an object.
pub fn constant<D: Category>(
    target: Arc<D>,
    a: D::Obj,
    limits: &Limits,
) -> Result<MultiFunctor<D>> {
    let name = format!("const[{}]", target.obj_label(&a));
    let id = target.identity(&a);
    MultiFunctor::from_fn(
        name,
        Vec::new(),
        target,
        limits,
        |_| Ok(a.clone()),
        |_| Ok(id.clone()),
    )
}

fn smash_objects(a: &[u32]) -> u32 {
    a.iter().product()
}

fn smash_maps(fs: &[PMap]) -> PMap {
    let doms: Vec<u32> = fs.iter().map(|f| f.dom()).collect();
    let cods: Vec<u32> = fs.iter().map(|f| f.cod).collect();
    let cod = smash_objects(&cods);
    let mut img = Vec::with_capacity(smash_objects(&doms) as usize);
    // points of a smash are tuples of non-basepoints, first coordinate slowest
    let ranges: Vec<Vec<u32>> = doms.iter().map(|&d| (1..=d).collect()).collect();
    let pts: Vec<Vec<u32>> = if ranges.is_empty() {
        vec![Vec::new()]
    } else {
        ranges
            .iter()
            .map(|r| r.iter().copied())
            .multi_cartesian_product()
            .collect()
    };
    for p in pts {
        let ys: Vec<u32> = p.iter().zip(fs).map(|(&x, f)| f.apply(x)).collect();
        if ys.contains(&0) {
            img.push(0);
        } else {
            let mut v = 0u32;
            for (y, c) in ys.iter().zip(&cods) {
                v = v * c + (y - 1);
            }
            img.push(v + 1);
        }
    }
    PMap { cod, img }
}

/// The smash product of pointed sets, in any number of variables.
pub fn smash(
    sources: &[&Materialized<PointedSets>],
    target: Arc<PointedSets>,
    limits: &Limits,
) -> Result<MultiFunctor<PointedSets>> {
    MultiFunctor::from_oracle(
        "smash",
        sources,
        target,
        limits,
        |a| Ok(smash_objects(a)),
        |fs| Ok(smash_maps(fs)),
    )
}

/// `A ↦ A ∨ A`.
pub fn doubling(
    source: &Materialized<PointedSets>,
    target: Arc<PointedSets>,
    limits: &Limits,
) -> Result<MultiFunctor<PointedSets>> {
    MultiFunctor::from_oracle(
        "double",
        &[source],
        target,
        limits,
        |a| Ok(2 * a[0]),
        |fs| {
            let f = &fs[0];
            let (d, c) = (f.dom(), f.cod);
            let img = (1..=2 * d)
                .map(|x| {
                    let (copy, p) = if x <= d { (0, x) } else { (1, x - d) };
                    match f.apply(p) {
                        0 => 0,
                        y => y + copy * c,
                    }
                })
                .collect();
            Ok(PMap { cod: 2 * c, img })
        },
    )
}

/// The inclusion of one skeleton of pointed sets into a larger category.
pub fn inclusion(
    source: &Materialized<PointedSets>,
    target: Arc<PointedSets>,
    limits: &Limits,
) -> Result<MultiFunctor<PointedSets>> {
    MultiFunctor::from_oracle(
        "incl",
        &[source],
        target,
        limits,
        |a| Ok(a[0]),
        |fs| Ok(fs[0].clone()),
    )
}

/// `(A, B) ↦ A`; not exact, since it does not send `(A, 0)` to zero.
pub fn projection(
    sources: [&Materialized<PointedSets>; 2],
    target: Arc<PointedSets>,
    limits: &Limits,
) -> Result<MultiFunctor<PointedSets>> {
    MultiFunctor::from_oracle(
        "proj",
        &sources,
        target,
        limits,
        |a| Ok(a[0]),
        |fs| Ok(fs[0].clone()),
    )
}

/// Whether there is an isomorphism `φ: dom s -> dom t` with `t ∘ φ = s` (so `s`
/// and `t` agree up to canonical isomorphism over their common codomain).
pub fn iso_over<D: Category>(d: &D, s: &D::Mor, t: &D::Mor) -> Result<bool> {
    if d.cod(s) != d.cod(t) {
        return Ok(false);
    }
    for phi in d.hom(&d.dom(s), &d.dom(t))? {
        if d.is_iso(&phi) && d.compose(t, &phi)? == *s {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Box products through a composite, on one instance: the southern arrow of `[f̄]_H` for
/// `H = F∘(G_1..G_k)` against the southern arrow of `[ḡ]_F`, where `g_i` is the
/// box product of the i-th block of `f̄`. Returns whether they agree up to
/// canonical isomorphism.
pub fn composition_good_instance<E: Waldhausen>(
    f: &MultiFunctor<E>,
    gs: &[MultiFunctor<FinWald>],
    h: &MultiFunctor<E>,
    fbar: &[usize],
) -> Result<bool> {
    let e = f.target.as_ref();
    let lhs = h.box_product(fbar)?;
    let mut gbar = Vec::with_capacity(gs.len());
    let mut at = 0;
    for g in gs {
        let block = &fbar[at..at + g.arity()];
        at += g.arity();
        gbar.push(g.box_product(block)?);
    }
    let rhs = f.box_product(&gbar)?;
    iso_over(e, &lhs, &rhs)
}

/// One variable commutes with southern arrows: with the other inputs fixed at `objects`,
/// applying `F` in variable `i` to the southern arrow of a cube `I` in that
/// source agrees with the southern arrow of `F(..., I, ...)`.
pub fn codiag_instance<D: Waldhausen>(
    f: &MultiFunctor<D>,
    objects: &[usize],
    i: usize,
    cube: &Cube<FinWald>,
) -> Result<bool> {
    let src = f.sources[i].as_ref();
    let d = f.target.as_ref();
    let s = southern_arrow(src, cube)?;
    let at = |o: usize| {
        let mut t = objects.to_vec();
        t[i] = o;
        f.obj(&t).clone()
    };
    let image = cube.map(
        d,
        |&o| Ok(at(o)),
        |&m| {
            let mut t = objects.to_vec();
            t[i] = src.dom(&m);
            Ok(f.in_variable(&t, i, m))
        },
    )?;
    let mut t = objects.to_vec();
    t[i] = src.dom(&s);
    let fs = f.in_variable(&t, i, s);
    let s2 = southern_arrow(d, &image)?;
    iso_over(d, &s2, &fs)
}

/// Outcome of [`check_multicategory_axioms`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiReport {
    pub checked: usize,
    pub unit: Vec<String>,
    pub associativity: Vec<String>,
    pub equivariance: Vec<String>,
}

impl MultiReport {
    pub fn holds(&self) -> bool {
        self.unit.is_empty() && self.associativity.is_empty() && self.equivariance.is_empty()
    }
}

type Composer<'a> =
    dyn Fn(&MultiFunctor<FinWald>, &[MultiFunctor<FinWald>]) -> Result<MultiFunctor<FinWald>> + 'a;

fn push(list: &mut Vec<String>, msg: String) {
    if list.len() < MAX_WITNESSES {
        list.push(msg);
    }
}

/// All ways to feed the inputs of `f` from `pool`, with total arity at most `max`.
fn feeds<'a>(
    f: &MultiFunctor<FinWald>,
    pool: &'a [MultiFunctor<FinWald>],
    max: usize,
) -> Vec<Vec<&'a MultiFunctor<FinWald>>> {
    let mut out = vec![(Vec::new(), 0usize)];
    for s in &f.sources {
        let mut next = Vec::new();
        for (chosen, used) in &out {
            for g in pool.iter().filter(|g| same_wald(&g.target, s)) {
                if used + g.arity() <= max {
                    let mut c = chosen.clone();
                    c.push(g);
                    next.push((c, used + g.arity()));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(c, _)| c).collect()
}

/// Unit laws, associativity and equivariance of composition on the fragment
/// generated by `generators` plus identities, up to total arity `max_arity`,
/// using `compose` as the composition law.
pub fn check_multicategory_axioms_with(
    generators: &[MultiFunctor<FinWald>],
    max_arity: usize,
    compose: &Composer<'_>,
    limits: &Limits,
) -> Result<MultiReport> {
    let mut rep = MultiReport::default();
    let mut cats: Vec<Arc<FinWald>> = Vec::new();
    for g in generators {
        for c in g.sources.iter().chain(std::iter::once(&g.target)) {
            if !cats.iter().any(|x| same_wald(x, c)) {
                cats.push(c.clone());
            }
        }
    }
    let units = cats
        .iter()
        .map(|c| unit(c, limits))
        .collect::<Result<Vec<_>>>()?;
    let mut pool: Vec<MultiFunctor<FinWald>> = generators.to_vec();
    pool.extend(units.iter().cloned());
    let unit_for = |c: &FinWald| {
        units
            .iter()
            .find(|u| same_wald(&u.target, c))
            .expect("unit exists")
    };

    // unit laws
    for f in generators {
        rep.checked += 2;
        let ones: Vec<MultiFunctor<FinWald>> =
            f.sources.iter().map(|s| unit_for(s).clone()).collect();
        if !compose(f, &ones)?.same_as(f) {
            push(
                &mut rep.unit,
                format!("{} ∘ (1, ..., 1) != {}", f.name, f.name),
            );
        }
        if !compose(unit_for(&f.target), std::slice::from_ref(f))?.same_as(f) {
            push(&mut rep.unit, format!("1 ∘ {} != {}", f.name, f.name));
        }
    }

    // associativity: F ∘ (G_i ∘ H̄_i) = (F ∘ Ḡ) ∘ (H̄_1, ..., H̄_k)
    for f in &pool {
        for gs in feeds(f, &pool, max_arity) {
            let gs: Vec<MultiFunctor<FinWald>> = gs.into_iter().cloned().collect();
            let fg = compose(f, &gs)?;
            let mut per_g: Vec<Vec<Vec<&MultiFunctor<FinWald>>>> = Vec::new();
            for g in &gs {
                per_g.push(feeds(g, &pool, max_arity));
            }
            for choice in per_g.iter().map(|v| v.iter()).multi_cartesian_product() {
                let total: usize = choice
                    .iter()
                    .flat_map(|hs| hs.iter())
                    .map(|h| h.arity())
                    .sum();
                if total > max_arity {
                    continue;
                }
                rep.checked += 1;
                Limits::check("associativity instances", rep.checked, limits.max_results)?;
                let inner = gs
                    .iter()
                    .zip(&choice)
                    .map(|(g, hs)| compose(g, &hs.iter().map(|h| (*h).clone()).collect::<Vec<_>>()))
                    .collect::<Result<Vec<_>>>()?;
                let left = compose(f, &inner)?;
                let flat: Vec<MultiFunctor<FinWald>> = choice
                    .iter()
                    .flat_map(|hs| hs.iter().map(|h| (*h).clone()))
                    .collect();
                let right = compose(&fg, &flat)?;
                if !left.same_as(&right) {
                    push(
                        &mut rep.associativity,
                        format!("{} != {}", left.name, right.name),
                    );
                }
            }
        }
    }

    // equivariance
    for f in generators {
        for gs in feeds(f, &pool, max_arity) {
            let gs: Vec<MultiFunctor<FinWald>> = gs.into_iter().cloned().collect();
            let h = compose(f, &gs)?;
            let k = f.arity();
            let lens: Vec<usize> = gs.iter().map(|g| g.arity()).collect();
            for sigma in (0..k).permutations(k) {
                rep.checked += 1;
                let fs = sigma_action(f, &sigma, limits)?;
                let permuted: Vec<MultiFunctor<FinWald>> =
                    sigma.iter().map(|&s| gs[s].clone()).collect();
                let left = compose(&fs, &permuted)?;
                let right = sigma_action(&h, &block_permutation(&lens, &sigma), limits)?;
                if !left.same_as(&right) {
                    push(
                        &mut rep.equivariance,
                        format!(
                            "({}·{:?}) ∘ permuted inputs != ({})·{:?}",
                            f.name, sigma, h.name, sigma
                        ),
                    );
                }
            }
            // permuting inside each input
            let inner: Vec<Vec<Vec<usize>>> = lens
                .iter()
                .map(|&l| (0..l).permutations(l).collect())
                .collect();
            for taus in inner.iter().map(|v| v.iter()).multi_cartesian_product() {
                rep.checked += 1;
                let acted = gs
                    .iter()
                    .zip(&taus)
                    .map(|(g, t)| sigma_action(g, t, limits))
                    .collect::<Result<Vec<_>>>()?;
                let left = compose(f, &acted)?;
                let mut sum = Vec::new();
                for t in &taus {
                    let base = sum.len();
                    sum.extend(t.iter().map(|x| x + base));
                }
                let right = sigma_action(&h, &sum, limits)?;
                if !left.same_as(&right) {
                    push(
                        &mut rep.equivariance,
                        format!("{} ∘ (G_i·τ_i) != ({})·(⊕τ_i)", f.name, h.name),
                    );
                }
            }
        }
    }
    Ok(rep)
}

/// The permutation of the flattened inputs of `F ∘ (G_1..G_k)` induced by `σ`:
/// `(F∘Ḡ)·π = (F·σ) ∘ (G_{σ(1)}, ..., G_{σ(k)})`.
pub fn block_permutation(lens: &[usize], sigma: &[usize]) -> Vec<usize> {
    let starts: Vec<usize> = lens
        .iter()
        .scan(0, |a, &l| {
            let s = *a;
            *a += l;
            Some(s)
        })
        .collect();
    let new_lens: Vec<usize> = sigma.iter().map(|&s| lens[s]).collect();
    let new_starts: Vec<usize> = new_lens
        .iter()
        .scan(0, |a, &l| {
            let s = *a;
            *a += l;
            Some(s)
        })
        .collect();
    let inv_sigma = invert_perm(sigma);
    let total: usize = lens.iter().sum();
    // π⁻¹(start_j + t) = new_start(σ⁻¹(j)) + t
    let mut pi_inv = vec![0; total];
    for (j, (&s, &l)) in starts.iter().zip(lens).enumerate() {
        for t in 0..l {
            pi_inv[s + t] = new_starts[inv_sigma[j]] + t;
        }
    }
    invert_perm(&pi_inv)
}

/// [`check_multicategory_axioms_with`] using [`compose_multi`].
pub fn check_multicategory_axioms(
    generators: &[MultiFunctor<FinWald>],
    max_arity: usize,
    limits: &Limits,
) -> Result<MultiReport> {
    check_multicategory_axioms_with(
        generators,
        max_arity,
        &|f, gs| compose_multi(f, gs, limits),
        limits,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finwald::materialize;

    fn mat(n: usize) -> Materialized<PointedSets> {
        materialize(&PointedSets::new(n), &Limits::default()).unwrap()
    }

    #[test]
    fn smash_box_cube_corner_has_five_points() {
        let l = Limits::default();
        let m = mat(3);
        let f = smash(&[&m, &m], Arc::new(PointedSets::new(6)), &l).unwrap();
        assert!(f.functor_violations().is_empty());
        let c = PointedSets::new(3);
        let inc = m.morphism_id(&c.map(2, &[1])).unwrap();
        let cube = f.box_cube(&[inc, inc]).unwrap();
        assert_eq!(*cube.vertex(3), 4);
        // 3-point pointed sets smash to 5 points, basepoint included
        assert_eq!(cube.vertex(3) + 1, 5);
        let s = f.box_product(&[inc, inc]).unwrap();
        assert!(s.is_injective());
    }

    #[test]
    fn box_product_with_an_identity_is_an_iso() {
        let l = Limits::default();
        let m = mat(3);
        let c = PointedSets::new(3);
        let f = smash(&[&m, &m], Arc::new(PointedSets::new(6)), &l).unwrap();
        let inc = m.morphism_id(&c.map(2, &[1])).unwrap();
        let id = m.morphism_id(&c.identity(&2)).unwrap();
        let s = f.box_product(&[inc, id]).unwrap();
        assert!(s.is_bijective());
    }

    #[test]
    fn smash_is_biexact_and_projection_is_not() {
        let l = Limits::default();
        let m = mat(3);
        let t = Arc::new(PointedSets::new(6));
        let f = smash(&[&m, &m], t.clone(), &l).unwrap();
        assert!(check_k_exact(&f, ExactMode::Full).unwrap().exact());
        let p = projection([&m, &m], t, &l).unwrap();
        let r = check_k_exact(&p, ExactMode::Full).unwrap();
        assert!(r.fails(KAxiom::KE1));
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.axiom == KAxiom::KE1 && w.tuple == vec!["1".to_string(), "0".to_string()]));
    }

    #[test]
    fn identity_is_exact() {
        let l = Limits::default();
        let m = mat(3);
        let u = unit(&m.wald, &l).unwrap();
        assert!(check_k_exact(&u, ExactMode::Full).unwrap().exact());
        assert!(check_k_exact(&u, ExactMode::Reduced).unwrap().exact());
    }

    #[test]
    fn right_action_law() {
        let l = Limits::default();
        let m2 = mat(2);
        let m3 = mat(3);
        let f = smash(&[&m2, &m3, &m2], Arc::new(PointedSets::new(6)), &l).unwrap();
        for s in (0..3).permutations(3) {
            for t in (0..3).permutations(3) {
                let a = sigma_action(&f, &compose_perm(&s, &t), &l).unwrap();
                let b = sigma_action(&sigma_action(&f, &s, &l).unwrap(), &t, &l).unwrap();
                assert!(a.same_as(&b));
            }
        }
        assert!(sigma_action(&f, &[0, 1, 2], &l).unwrap().same_as(&f));
        assert!(sigma_action(&f, &[0, 0, 1], &l).is_err());
    }

    fn fragment(l: &Limits) -> Vec<MultiFunctor<FinWald>> {
        let m2 = mat(2);
        let m3 = mat(3);
        let p2 = Arc::new(PointedSets::new(2));
        let p3 = Arc::new(PointedSets::new(3));
        vec![
            smash(&[&m2, &m2], p2, l).unwrap().into_fin(&m2).unwrap(),
            smash(&[&m2, &m3], p3.clone(), l)
                .unwrap()
                .into_fin(&m3)
                .unwrap(),
            doubling(&m2, p3.clone(), l).unwrap().into_fin(&m3).unwrap(),
            inclusion(&m2, p3, l).unwrap().into_fin(&m3).unwrap(),
        ]
    }

    #[test]
    fn generated_fragment_is_a_multicategory() {
        let l = Limits::default();
        let gens = fragment(&l);
        for g in &gens {
            assert!(
                check_k_exact(g, ExactMode::Full).unwrap().exact(),
                "{}",
                g.name
            );
        }
        let r = check_multicategory_axioms(&gens, 3, &l).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.checked > 50);
    }

    #[test]
    fn corrupted_composition_breaks_associativity() {
        let l = Limits::default();
        let gens = fragment(&l);
        let corrupt = |f: &MultiFunctor<FinWald>, gs: &[MultiFunctor<FinWald>]| {
            let mut h = compose_multi(f, gs, &l)?;
            if gs.iter().any(|g| g.name.contains('∘')) && !h.diagram.objects.is_empty() {
                let last = h.diagram.objects.len() - 1;
                h.diagram.objects[last] = (h.diagram.objects[last] + 1) % h.target.num_objects();
            }
            Ok(h)
        };
        let r = check_multicategory_axioms_with(&gens, 3, &corrupt, &l).unwrap();
        assert!(!r.associativity.is_empty());
        assert!(r.unit.is_empty() && r.equivariance.is_empty());
    }

    #[test]
    fn composite_of_smash_is_exact_and_composition_good_holds() {
        let l = Limits::default();
        let m2 = mat(2);
        let m3 = mat(3);
        let s23 = smash(&[&m2, &m3], Arc::new(PointedSets::new(3)), &l)
            .unwrap()
            .into_fin(&m3)
            .unwrap();
        let f = smash(&[&m2, &m3], Arc::new(PointedSets::new(6)), &l).unwrap();
        let u2 = unit(&m2.wald, &l).unwrap();
        let h = compose_multi(&f, &[u2.clone(), s23.clone()], &l).unwrap();
        assert_eq!(h.arity(), 3);
        assert!(check_k_exact(&h, ExactMode::Full).unwrap().exact());
        let cofs: Vec<Vec<usize>> = h.sources.iter().map(|s| s.cofibrations()).collect();
        for t in lists_product(&cofs) {
            assert!(composition_good_instance(&f, &[u2.clone(), s23.clone()], &h, &t).unwrap());
        }
    }

    #[test]
    fn codiag_one_variable() {
        let l = Limits::default();
        let m3 = mat(3);
        let c = PointedSets::new(3);
        let f = smash(&[&m3, &m3], Arc::new(PointedSets::new(6)), &l).unwrap();
        let inc = m3.morphism_id(&c.map(2, &[1])).unwrap();
        let z1 = m3.morphism_id(&c.from_zero(&1)).unwrap();
        let id1 = m3.morphism_id(&c.identity(&1)).unwrap();
        let sq = Cube::square(
            m3.wald.as_ref(),
            &z1,
            &z1,
            &inc,
            &m3.morphism_id(&c.map(2, &[2])).unwrap(),
        )
        .unwrap();
        let _ = id1;
        for other in 0..3 {
            for i in 0..2 {
                let mut objs = vec![0, 0];
                objs[1 - i] = other;
                assert!(codiag_instance(&f, &objs, i, &sq).unwrap());
            }
        }
    }
}

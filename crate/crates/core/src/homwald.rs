//! Internal hom Waldhausen categories `Hom(C_1, ..., C_k; D)`, evaluation,
//! currying, and the closed-multicategory checks.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{Category, Waldhausen};
use crate::diagcat::{DiagramCat, IndexCube};
use crate::diagram::{Diagram, NatTrans};
use crate::enumerate::{enumerate_functors, Filters};
use crate::error::{malformed, Error, Result};
use crate::finwald::{materialize, FinWald, Materialized};
use crate::index::{Index, ProductIndex, SmallCat};
use crate::limits::Limits;
use crate::multiexact::{
    check_k_exact, compose_multi, invert_perm, lists_product, product_index, same_wald,
    sigma_action, unit, ExactMode, MultiFunctor,
};
use crate::wald::MAX_WITNESSES;

fn hom_name<D: Category>(sources: &[Arc<FinWald>], target: &D) -> String {
    format!(
        "Hom({};{})",
        sources.iter().map(|s| s.name()).join(","),
        target.name()
    )
}

/// All k-exact functors `C_1 × ... × C_k -> D` into the skeleton of `D`, in
/// lexicographic order of their tables.
pub fn enumerate_k_exact<D: Waldhausen>(
    sources: &[Arc<FinWald>],
    target: Arc<D>,
    limits: &Limits,
) -> Result<Vec<MultiFunctor<D>>> {
    let index = product_index(sources, limits)?;
    let zeros: Vec<bool> = (0..index.num_objects())
        .map(|o| {
            index
                .decode_object(o)
                .iter()
                .zip(sources)
                .any(|(&x, s)| s.is_zero(&x))
        })
        .collect();
    let t = target.clone();
    let filters = Filters {
        object: Box::new(move |o: usize, v: &D::Obj| !zeros[o] || t.is_zero(v)),
        morphism: Box::new(|_, _| true),
    };
    let all = enumerate_functors(target.as_ref(), &Index::Product(index), &filters, limits)?;
    exact_only(all, sources, target)
}

/// Wraps diagrams as functors and keeps the k-exact ones, preserving order.
pub fn exact_only<D: Waldhausen>(
    diagrams: Vec<Diagram<D>>,
    sources: &[Arc<FinWald>],
    target: Arc<D>,
) -> Result<Vec<MultiFunctor<D>>> {
    let kept: Vec<Result<Option<MultiFunctor<D>>>> = diagrams
        .into_par_iter()
        .enumerate()
        .map(|(i, d)| {
            let f =
                MultiFunctor::from_diagram(format!("F{i}"), sources.to_vec(), target.clone(), d)?;
            Ok(check_k_exact(&f, ExactMode::Full)?.exact().then_some(f))
        })
        .collect();
    let mut out = Vec::new();
    for k in kept {
        if let Some(mut f) = k? {
            f.name = format!("F{}", out.len());
            out.push(f);
        }
    }
    Ok(out)
}

/// The box cubes `[f̄]` of the product index, one per cofibration tuple.
pub fn box_index_cubes(index: &ProductIndex, sources: &[Arc<FinWald>]) -> Vec<IndexCube> {
    let k = sources.len();
    let cofs: Vec<Vec<usize>> = sources.iter().map(|s| s.cofibrations()).collect();
    lists_product(&cofs)
        .into_iter()
        .map(|fbar| {
            let ends = |mask: usize| -> Vec<usize> {
                fbar.iter()
                    .zip(sources)
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
                .map(|m| index.encode_object(&ends(m)))
                .collect();
            let mut edges = HashMap::new();
            for mask in 0..1usize << k {
                let objs = ends(mask);
                for i in 0..k {
                    if mask >> i & 1 == 0 {
                        let t: Vec<usize> = (0..k)
                            .map(|j| {
                                if j == i {
                                    fbar[i]
                                } else {
                                    sources[j].fincat().identity(objs[j])
                                }
                            })
                            .collect();
                        edges.insert((mask, i), index.encode_morphism(&t));
                    }
                }
            }
            let label = format!(
                "[{}]",
                fbar.iter()
                    .zip(sources)
                    .map(|(&f, s)| s.mor_label(&f))
                    .join(",")
            );
            IndexCube {
                label,
                n: k,
                vertices,
                edges,
            }
        })
        .collect()
}

/// `Hom(C_1, ..., C_k; D)` with its enumerated objects.
pub struct HomWald<D: Waldhausen> {
    pub sources: Vec<Arc<FinWald>>,
    pub target: Arc<D>,
    pub index: Arc<ProductIndex>,
    pub functors: Vec<MultiFunctor<D>>,
    pub cat: Arc<DiagramCat<D>>,
}

/// Builds the hom category: objects are the k-exact functors, weak equivalences
/// are levelwise, and `α: F => G` is a cofibration when every cube
/// `([f̄]_F =α=> [f̄]_G)` over a cofibration tuple is good.
pub fn build_hom<D: Waldhausen>(
    sources: &[Arc<FinWald>],
    target: Arc<D>,
    limits: &Limits,
) -> Result<HomWald<D>> {
    let index = product_index(sources, limits)?;
    let functors = enumerate_k_exact(sources, target.clone(), limits)?;
    let skeleton = functors
        .iter()
        .map(|f| Arc::new(f.diagram.clone()))
        .collect();
    let cubes = box_index_cubes(&index, sources);
    let cat = DiagramCat::new(
        hom_name(sources, target.as_ref()),
        target.clone(),
        Index::Product(index.clone()),
        skeleton,
        cubes,
        *limits,
    )?;
    Ok(HomWald {
        sources: sources.to_vec(),
        target,
        index,
        functors,
        cat: Arc::new(cat),
    })
}

impl<D: Waldhausen> HomWald<D> {
    pub fn arity(&self) -> usize {
        self.sources.len()
    }

    /// The hom as a finite table category.
    pub fn materialize(&self, limits: &Limits) -> Result<Materialized<DiagramCat<D>>> {
        materialize(self.cat.as_ref(), limits)
    }

    /// A hom object viewed as a multifunctor.
    pub fn functor(&self, d: &Diagram<D>, name: impl Into<String>) -> Result<MultiFunctor<D>> {
        MultiFunctor::from_diagram(name, self.sources.clone(), self.target.clone(), d.clone())
    }

    fn identities(&self, tuple: &[usize]) -> Vec<usize> {
        tuple
            .iter()
            .zip(&self.sources)
            .map(|(&o, s)| s.fincat().identity(o))
            .collect()
    }
}

/// `ev(A_1, ..., A_k, F) = F(A_1, ..., A_k)`, with the materialized hom as last input.
pub fn evaluation<D: Waldhausen>(
    h: &HomWald<D>,
    m: &Materialized<DiagramCat<D>>,
    limits: &Limits,
) -> Result<MultiFunctor<D>> {
    let k = h.arity();
    let d = h.target.as_ref();
    let mut sources = h.sources.clone();
    sources.push(m.wald.clone());
    MultiFunctor::from_fn(
        format!("ev[{}]", m.wald.name()),
        sources,
        h.target.clone(),
        limits,
        |t| Ok(m.objects[t[k]].objects[h.index.encode_object(&t[..k])].clone()),
        |t| {
            // G(f̄) ∘ α at the domain tuple
            let alpha = &m.morphisms[t[k]];
            let doms: Vec<usize> = t[..k]
                .iter()
                .zip(&h.sources)
                .map(|(&f, s)| s.fincat().dom(f))
                .collect();
            let g = &alpha.cod.morphisms[h.index.encode_morphism(&t[..k])];
            d.compose(g, &alpha.components[h.index.encode_object(&doms)])
        },
    )
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// `F ↦ (C̄ ↦ F(-, C̄))`: the first `k` inputs of `F` must be the hom's sources.
pub fn curry<D: Waldhausen>(
    f: &MultiFunctor<D>,
    h: &HomWald<D>,
    m: &Materialized<DiagramCat<D>>,
    limits: &Limits,
) -> Result<MultiFunctor<FinWald>> {
    let k = h.arity();
    if f.arity() < k {
        return malformed(format!("cannot split {} inputs at {k}", f.arity()));
    }
    for (i, s) in h.sources.iter().enumerate() {
        if !same_wald(&f.sources[i], s) {
            return malformed(format!("input {} of {} is not {}", i + 1, f.name, s.name()));
        }
    }
    let rest: Vec<Arc<FinWald>> = f.sources[k..].to_vec();
    let hi = h.index.as_ref();
    let partial = |c: &[usize]| -> Result<Arc<Diagram<D>>> {
        let objects = (0..hi.num_objects())
            .map(|a| f.obj(&concat(&hi.decode_object(a), c)).clone())
            .collect();
        let ids: Vec<usize> = c
            .iter()
            .zip(&rest)
            .map(|(&o, s)| s.fincat().identity(o))
            .collect();
        let morphisms = (0..hi.num_morphisms())
            .map(|x| f.mor(&concat(&hi.decode_morphism(x), &ids)).clone())
            .collect();
        Ok(Arc::new(Diagram::unchecked(
            Index::Product(h.index.clone()),
            objects,
            morphisms,
        )?))
    };
    let locate = |c: &[usize]| -> Result<usize> {
        let d = partial(c)?;
        m.object_id(&d).ok_or_else(|| {
            let labels = c.iter().zip(&rest).map(|(&o, s)| s.obj_label(&o)).join(",");
            Error::Malformed(format!(
                "{}(-, {labels}) is not an object of {}",
                f.name,
                m.wald.name()
            ))
        })
    };
    MultiFunctor::from_fn(
        format!("curry({})", f.name),
        rest.clone(),
        m.wald.clone(),
        limits,
        |c| locate(c),
        |g| {
            let doms: Vec<usize> = g
                .iter()
                .zip(&rest)
                .map(|(&x, s)| s.fincat().dom(x))
                .collect();
            let cods: Vec<usize> = g
                .iter()
                .zip(&rest)
                .map(|(&x, s)| s.fincat().cod(x))
                .collect();
            let components = (0..hi.num_objects())
                .map(|a| {
                    f.mor(&concat(&h.identities(&hi.decode_object(a)), g))
                        .clone()
                })
                .collect();
            let alpha = NatTrans {
                dom: partial(&doms)?,
                cod: partial(&cods)?,
                components,
            };
            m.morphism_id(&alpha).ok_or_else(|| {
                Error::Malformed(format!(
                    "{} is not a morphism of {}",
                    h.cat.mor_label(&alpha),
                    m.wald.name()
                ))
            })
        },
    )
}

/// `G ↦ ev ∘ (1, ..., 1, G)`.
pub fn uncurry<D: Waldhausen>(
    g: &MultiFunctor<FinWald>,
    ev: &MultiFunctor<D>,
    limits: &Limits,
) -> Result<MultiFunctor<D>> {
    let k = ev.arity() - 1;
    let mut inner = ev.sources[..k]
        .iter()
        .map(|s| unit(s, limits))
        .collect::<Result<Vec<_>>>()?;
    inner.push(g.clone());
    Ok(compose_multi(ev, &inner, limits)?.renamed(format!("uncurry({})", g.name)))
}

/// A functor into a materialized hom, with values replaced by the hom's own objects
/// and transformations.
pub fn lift<D: Waldhausen>(
    g: &MultiFunctor<FinWald>,
    h: &HomWald<D>,
    m: &Materialized<DiagramCat<D>>,
    limits: &Limits,
) -> Result<MultiFunctor<DiagramCat<D>>> {
    MultiFunctor::from_fn(
        g.name.clone(),
        g.sources.clone(),
        h.cat.clone(),
        limits,
        |t| Ok(m.objects[*g.obj(t)].clone()),
        |t| Ok(m.morphisms[*g.mor(t)].clone()),
    )
}

/// Precomposition with a permutation, `F' ↦ F'·σ`, as a functor between homs.
pub fn permute_inputs<D: Waldhausen>(
    h: &HomWald<D>,
    m: &Materialized<DiagramCat<D>>,
    hs: &HomWald<D>,
    ms: &Materialized<DiagramCat<D>>,
    sigma: &[usize],
    limits: &Limits,
) -> Result<MultiFunctor<FinWald>> {
    let k = h.arity();
    let inv = invert_perm(sigma);
    let permuted = |d: &Diagram<D>| -> Result<Arc<Diagram<D>>> {
        Ok(Arc::new(
            sigma_action(&h.functor(d, "F")?, sigma, limits)?.diagram,
        ))
    };
    MultiFunctor::from_fn(
        format!("(-)·{sigma:?}"),
        vec![m.wald.clone()],
        ms.wald.clone(),
        limits,
        |t| {
            let d = permuted(&m.objects[t[0]])?;
            ms.object_id(&d).ok_or_else(|| {
                Error::Malformed("a permuted functor is missing from the hom".into())
            })
        },
        |t| {
            let a = &m.morphisms[t[0]];
            let components = (0..hs.index.num_objects())
                .map(|x| {
                    let xs = hs.index.decode_object(x);
                    let y: Vec<usize> = (0..k).map(|j| xs[inv[j]]).collect();
                    a.components[h.index.encode_object(&y)].clone()
                })
                .collect();
            let b = NatTrans {
                dom: permuted(&a.dom)?,
                cod: permuted(&a.cod)?,
                components,
            };
            ms.morphism_id(&b).ok_or_else(|| {
                Error::Malformed("a permuted transformation is missing from the hom".into())
            })
        },
    )
}

/// Outcome of [`check_closed_axioms`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedReport {
    /// Number of `(k+ℓ)`-exact functors `Ā, B̄ -> D`.
    pub functors: usize,
    /// Number of `ℓ`-exact functors `B̄ -> Hom(Ā; D)`.
    pub curried: usize,
    pub cm1: Vec<String>,
    pub cm2_checked: usize,
    pub cm2: Vec<String>,
}

impl ClosedReport {
    pub fn holds(&self) -> bool {
        self.cm1.is_empty() && self.cm2.is_empty()
    }
}

fn push(list: &mut Vec<String>, msg: String) {
    if list.len() < MAX_WITNESSES {
        list.push(msg);
    }
}

/// CM1: currying is a bijection between `(k+ℓ)`-exact functors `Ā, B̄ -> D` and
/// `ℓ`-exact functors `B̄ -> Hom(Ā; D)`, with `uncurry` as inverse. CM2: for all
/// `σ ∈ Σ_k`, `τ ∈ Σ_ℓ`, `curry(F·(σ⊕τ)) = ((-)·σ ∘ curry(F))·τ`.
pub fn check_closed_axioms<D: Waldhausen>(
    sources: &[Arc<FinWald>],
    middles: &[Arc<FinWald>],
    target: Arc<D>,
    limits: &Limits,
) -> Result<ClosedReport> {
    let (k, l) = (sources.len(), middles.len());
    let h = build_hom(sources, target.clone(), limits)?;
    let m = h.materialize(limits)?;
    let ev = evaluation(&h, &m, limits)?;
    let all: Vec<Arc<FinWald>> = sources.iter().chain(middles).cloned().collect();
    let fs = enumerate_k_exact(&all, target.clone(), limits)?;
    let gs = enumerate_k_exact(middles, m.wald.clone(), limits)?;
    let mut rep = ClosedReport {
        functors: fs.len(),
        curried: gs.len(),
        ..Default::default()
    };

    let mut curried = Vec::with_capacity(fs.len());
    for f in &fs {
        let c = match curry(f, &h, &m, limits) {
            Ok(c) => c,
            Err(e) => {
                push(&mut rep.cm1, format!("curry({}) failed: {e}", f.name));
                continue;
            }
        };
        if !uncurry(&c, &ev, limits)?.same_as(f) {
            push(
                &mut rep.cm1,
                format!("uncurry(curry({})) != {}", f.name, f.name),
            );
        }
        curried.push(c);
    }
    let images: HashSet<&Diagram<FinWald>> = curried.iter().map(|c| &c.diagram).collect();
    if images.len() != curried.len() {
        push(&mut rep.cm1, "curry is not injective".into());
    }
    let targets: HashSet<&Diagram<FinWald>> = gs.iter().map(|g| &g.diagram).collect();
    if let Some(c) = curried.iter().find(|c| !targets.contains(&c.diagram)) {
        push(
            &mut rep.cm1,
            format!("{} is not an exact functor into the hom", c.name),
        );
    }
    if images.len() != targets.len() {
        push(
            &mut rep.cm1,
            format!(
                "{} functors curry to {} of {} exact functors",
                fs.len(),
                images.len(),
                gs.len()
            ),
        );
    }
    for g in &gs {
        match uncurry(g, &ev, limits).and_then(|u| curry(&u, &h, &m, limits)) {
            Ok(c) if c.diagram == g.diagram => {}
            Ok(_) => push(
                &mut rep.cm1,
                format!("curry(uncurry({})) != {}", g.name, g.name),
            ),
            Err(e) => push(
                &mut rep.cm1,
                format!("curry(uncurry({})) failed: {e}", g.name),
            ),
        }
    }

    for sigma in (0..k).permutations(k) {
        let permuted: Vec<Arc<FinWald>> = sigma.iter().map(|&s| sources[s].clone()).collect();
        let hs = build_hom(&permuted, target.clone(), limits)?;
        let ms = hs.materialize(limits)?;
        let post = permute_inputs(&h, &m, &hs, &ms, &sigma, limits)?;
        for tau in (0..l).permutations(l) {
            let sum: Vec<usize> = sigma
                .iter()
                .copied()
                .chain(tau.iter().map(|t| t + k))
                .collect();
            for (f, c) in fs.iter().zip(&curried) {
                rep.cm2_checked += 1;
                let left = curry(&sigma_action(f, &sum, limits)?, &hs, &ms, limits)?;
                let right = sigma_action(
                    &compose_multi(&post, std::slice::from_ref(c), limits)?,
                    &tau,
                    limits,
                )?;
                if left.diagram != right.diagram {
                    push(
                        &mut rep.cm2,
                        format!("square fails for {} at σ={sigma:?}, τ={tau:?}", f.name),
                    );
                }
            }
        }
    }
    Ok(rep)
}

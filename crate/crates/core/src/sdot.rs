//! The S-dot construction: `S_n C` as diagrams `Ar<n> -> C`, its simplicial
//! structure on bounded levels, iterated versions, the staircase objects `ρ_ni`
//! and the pairing induced by a biexact functor.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{Category, Waldhausen};
use crate::cubes::is_good;
use crate::diagcat::{DiagramCat, IndexCube};
use crate::diagram::{Diagram, NatTrans};
use crate::enumerate::{enumerate_functors, Filters};
use crate::error::{malformed, Error, Result};
use crate::finwald::Materialized;
use crate::index::{build_index, FinCat, Index, ProductIndex, Shape, SmallCat};
use crate::limits::Limits;
use crate::multiexact::{lists_product, MultiFunctor};

/// `Ar<n>` with lookup by pair.
#[derive(Debug, Clone)]
pub struct ArrowIndex {
    pub n: usize,
    pub cat: Arc<FinCat>,
    pub pairs: Vec<(usize, usize)>,
    positions: HashMap<(usize, usize), usize>,
}

impl ArrowIndex {
    pub fn new(n: usize, limits: &Limits) -> Result<Self> {
        let cat = Arc::new(build_index(&Shape::ArrowOrdinal(n), limits)?);
        let pairs = crate::index::arrow_ordinal_objects(n);
        let positions = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Ok(ArrowIndex {
            n,
            cat,
            pairs,
            positions,
        })
    }

    pub fn index(&self) -> Index {
        Index::Fin(self.cat.clone())
    }

    pub fn object(&self, j: usize, i: usize) -> usize {
        self.positions[&(j, i)]
    }

    /// The morphism `a -> b`; `a <= b` componentwise.
    pub fn arrow(&self, a: usize, b: usize) -> usize {
        self.cat.hom(a, b)[0]
    }

    /// Row morphisms `(j,a) -> (j,b)` with `b > j`, identities included, as 1-cubes.
    pub fn row_cubes(&self) -> Vec<IndexCube> {
        let mut out = Vec::new();
        for (x, &(j, a)) in self.pairs.iter().enumerate() {
            for b in a.max(j + 1)..=self.n {
                let y = self.object(j, b);
                out.push(IndexCube {
                    label: format!("{j}<={a} -> {j}<={b}"),
                    n: 1,
                    vertices: vec![x, y],
                    edges: HashMap::from([((0, 0), self.arrow(x, y))]),
                });
            }
        }
        out
    }

    /// Object and morphism maps of `Ar(θ)` for a monotone `θ: <m> -> <n>`, as
    /// index maps out of `Ar<m>` (given by `source`).
    pub fn operator(
        &self,
        source: &ArrowIndex,
        theta: impl Fn(usize) -> usize,
    ) -> (Vec<usize>, Vec<usize>) {
        let objs: Vec<usize> = source
            .pairs
            .iter()
            .map(|&(j, i)| self.object(theta(j), theta(i)))
            .collect();
        let mors = source
            .cat
            .morphisms()
            .iter()
            .map(|m| self.arrow(objs[m.dom], objs[m.cod]))
            .collect();
        (objs, mors)
    }
}

/// Violations of the three `S_n` conditions.
pub fn sn_violations<D: Waldhausen>(
    cat: &D,
    ar: &ArrowIndex,
    x: &Diagram<D>,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let n = ar.n;
    for i in 0..=n {
        if !cat.is_zero(&x.objects[ar.object(i, i)]) {
            out.push(format!("X({i}={i}) is not zero"));
        }
    }
    for j in 0..=n {
        for a in j..=n {
            for b in a + 1..=n {
                let f = &x.morphisms[ar.arrow(ar.object(j, a), ar.object(j, b))];
                if !cat.is_cofibration(f) {
                    out.push(format!("X({j}<{a}) -> X({j}<{b}) is not a cofibration"));
                }
            }
        }
    }
    for (i, j, k) in (0..=n).tuple_combinations() {
        let (ij, ik, jj, jk) = (
            ar.object(i, j),
            ar.object(i, k),
            ar.object(j, j),
            ar.object(j, k),
        );
        let top = &x.morphisms[ar.arrow(ij, ik)];
        let left = &x.morphisms[ar.arrow(ij, jj)];
        match cat.pushout(top, left)? {
            None => out.push(format!("no pushout for the square at {i}<{j}<{k}")),
            Some(p) => {
                let m = cat.pushout_factor(
                    &p,
                    &x.morphisms[ar.arrow(ik, jk)],
                    &x.morphisms[ar.arrow(jj, jk)],
                )?;
                if !cat.is_iso(&m) {
                    out.push(format!("the square at {i}<{j}<{k} is not a pushout"));
                }
            }
        }
    }
    Ok(out)
}

/// Every object of `S_n C` with values in the skeleton of `C`, sorted. Row 0 is a
/// chain of cofibrations; every other entry is a skeleton object isomorphic to the
/// quotient, with each identification enumerated; the remaining maps are forced.
pub fn enumerate_sn<D: Waldhausen>(cat: &D, n: usize, limits: &Limits) -> Result<Vec<Diagram<D>>> {
    let ar = ArrowIndex::new(n, limits)?;
    let skeleton = cat.objects()?;
    let zero = cat.zero();
    // chains X(0<1) ↣ ... ↣ X(0<n), as (objects, successive maps)
    let mut chains: Vec<(Vec<D::Obj>, Vec<D::Mor>)> = vec![(vec![zero.clone()], Vec::new())];
    for _ in 1..=n {
        let mut next = Vec::new();
        for (objs, maps) in &chains {
            let last = objs.last().expect("chain starts at zero");
            for b in &skeleton {
                for f in cat.hom(last, b)? {
                    if cat.is_cofibration(&f) {
                        let (mut o, mut m) = (objs.clone(), maps.clone());
                        o.push(b.clone());
                        m.push(f);
                        next.push((o, m));
                    }
                }
            }
            Limits::check("S_n row chains", next.len(), limits.max_results)?;
        }
        chains = next;
    }
    let results: Vec<Result<Vec<Diagram<D>>>> = chains
        .par_iter()
        .map(|(objs, maps)| complete_chain(cat, &ar, &skeleton, objs, maps, limits))
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
        Limits::check("S_n objects", out.len(), limits.max_results)?;
    }
    out.sort();
    Ok(out)
}

fn complete_chain<D: Waldhausen>(
    cat: &D,
    ar: &ArrowIndex,
    skeleton: &[D::Obj],
    row: &[D::Obj],
    maps: &[D::Mor],
    limits: &Limits,
) -> Result<Vec<Diagram<D>>> {
    // row(a -> b)
    let row_map = |a: usize, b: usize| -> Result<D::Mor> {
        if a == b {
            return Ok(cat.identity(&row[a]));
        }
        if a == 0 {
            return Ok(cat.from_zero(&row[b]));
        }
        cat.compose_all(&maps[a..b])
    };
    // entries (j, i) with 1 <= j < i: candidate quotient maps X(0<i) -> Q
    let slots: Vec<(usize, usize)> = ar
        .pairs
        .iter()
        .copied()
        .filter(|&(j, i)| j >= 1 && j < i)
        .collect();
    let mut options: Vec<Vec<D::Mor>> = Vec::with_capacity(slots.len());
    for &(j, i) in &slots {
        let f = row_map(j, i)?;
        let p = cat
            .pushout(&f, &cat.to_zero(&row[j]))?
            .ok_or_else(|| Error::NoColimit(format!("quotient X(0<{i})/X(0<{j})")))?;
        let mut qs = Vec::new();
        for q in skeleton {
            for phi in cat.hom(&p.object, q)? {
                if cat.is_iso(&phi) {
                    qs.push(cat.compose(&phi, &p.left)?);
                }
            }
        }
        options.push(qs);
    }
    let total: usize = options.iter().map(|o| o.len()).product();
    Limits::check("S_n quotient choices", total, limits.max_search)?;
    let choices = lists_product(
        &options
            .iter()
            .map(|o| (0..o.len()).collect())
            .collect::<Vec<_>>(),
    );
    let mut out = Vec::with_capacity(choices.len());
    for choice in choices {
        let quotient: HashMap<(usize, usize), &D::Mor> = slots
            .iter()
            .zip(&choice)
            .zip(&options)
            .map(|((&s, &c), o)| (s, &o[c]))
            .collect();
        // X(0<i) -> X(j<i)
        let leg = |j: usize, i: usize| -> D::Mor {
            if j == 0 {
                cat.identity(&row[i])
            } else if j == i {
                cat.to_zero(&row[i])
            } else {
                quotient[&(j, i)].clone()
            }
        };
        let value = |j: usize, i: usize| -> D::Obj { cat.cod(&leg(j, i)) };
        let objects: Vec<D::Obj> = ar.pairs.iter().map(|&(j, i)| value(j, i)).collect();
        let mut morphisms = Vec::with_capacity(ar.cat.num_morphisms());
        for m in ar.cat.morphisms() {
            let ((j, i), (j2, i2)) = (ar.pairs[m.dom], ar.pairs[m.cod]);
            let f = if m.dom == m.cod {
                cat.identity(&objects[m.dom])
            } else if j2 == i2 {
                cat.to_zero(&objects[m.dom])
            } else if j == i {
                cat.from_zero(&objects[m.cod])
            } else {
                // the unique u with u ∘ leg(j,i) = leg(j2,i2) ∘ row(i -> i2)
                let v = cat.compose(&leg(j2, i2), &row_map(i, i2)?)?;
                if j == 0 {
                    v
                } else {
                    let l = leg(j, i);
                    let mut found = None;
                    for u in cat.hom(&objects[m.dom], &objects[m.cod])? {
                        if cat.compose(&u, &l)? == v {
                            found = Some(u);
                            break;
                        }
                    }
                    found.ok_or_else(|| {
                        Error::Malformed(format!("no induced map X({j}<{i}) -> X({j2}<{i2})"))
                    })?
                }
            };
            morphisms.push(f);
        }
        out.push(Diagram::unchecked(ar.index(), objects, morphisms)?);
    }
    Ok(out)
}

/// Brute force: every functor `Ar<n> -> C` into the skeleton, filtered by the three conditions.
pub fn enumerate_sn_brute<D: Waldhausen>(
    cat: &D,
    n: usize,
    limits: &Limits,
) -> Result<Vec<Diagram<D>>> {
    let ar = ArrowIndex::new(n, limits)?;
    let diag: Vec<bool> = ar.pairs.iter().map(|&(j, i)| j == i).collect();
    let filters = Filters {
        object: Box::new(move |o: usize, v: &D::Obj| !diag[o] || cat.is_zero(v)),
        morphism: Box::new(|_, _| true),
    };
    let all = enumerate_functors(cat, &ar.index(), &filters, limits)?;
    let mut out = Vec::new();
    for x in all {
        if sn_violations(cat, &ar, &x)?.is_empty() {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}

/// `S_n C` as a Waldhausen category: levelwise weak equivalences, and `α: X => Y` a
/// cofibration when the square `(X∘I =α=> Y∘I)` is good for every row morphism `I`.
pub fn sn_category<D: Waldhausen>(
    base: Arc<D>,
    n: usize,
    limits: &Limits,
) -> Result<DiagramCat<D>> {
    let ar = ArrowIndex::new(n, limits)?;
    let skeleton = enumerate_sn(base.as_ref(), n, limits)?
        .into_iter()
        .map(Arc::new)
        .collect();
    DiagramCat::new(
        format!("S{n}({})", base.name()),
        base,
        ar.index(),
        skeleton,
        ar.row_cubes(),
        *limits,
    )
}

/// `Ar<n_1> × ... × Ar<n_k>` with its conditions for iterated S-objects.
pub struct MultiArrow {
    pub factors: Vec<ArrowIndex>,
    pub index: Arc<ProductIndex>,
}

impl MultiArrow {
    pub fn new(ns: &[usize], limits: &Limits) -> Result<Self> {
        let factors = ns
            .iter()
            .map(|&n| ArrowIndex::new(n, limits))
            .collect::<Result<Vec<_>>>()?;
        let index = Arc::new(ProductIndex::new(
            factors.iter().map(|f| f.cat.clone()).collect(),
            limits,
        )?);
        Ok(MultiArrow { factors, index })
    }

    /// Products of row morphisms (identities included), one cube per tuple.
    pub fn row_cubes(&self) -> Vec<IndexCube> {
        let parts: Vec<Vec<IndexCube>> = self.factors.iter().map(|f| f.row_cubes()).collect();
        let choices = lists_product(
            &parts
                .iter()
                .map(|p| (0..p.len()).collect())
                .collect::<Vec<_>>(),
        );
        choices
            .into_iter()
            .map(|c| {
                let picked: Vec<IndexCube> =
                    c.iter().zip(&parts).map(|(&i, p)| p[i].clone()).collect();
                IndexCube::product(
                    &picked,
                    |t| self.index.encode_object(t),
                    |t| self.index.encode_morphism(t),
                    |f, o| self.factors[f].cat.identity(o),
                )
            })
            .collect()
    }
}

/// Violations of the iterated-S conditions: zero when any coordinate is diagonal,
/// a pushout square in each coordinate with the others fixed, and goodness of
/// `X∘I` for every product `I` of row morphisms.
pub fn iterated_violations<D: Waldhausen>(
    cat: &D,
    ma: &MultiArrow,
    x: &Diagram<D>,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let idx = ma.index.as_ref();
    for o in 0..idx.num_objects() {
        let t = idx.decode_object(o);
        let diagonal = t
            .iter()
            .zip(&ma.factors)
            .any(|(&a, f)| f.pairs[a].0 == f.pairs[a].1);
        if diagonal && !cat.is_zero(&x.objects[o]) {
            out.push(format!("X{} is not zero", idx.object_label(o)));
        }
    }
    let sizes: Vec<usize> = ma.factors.iter().map(|f| f.pairs.len()).collect();
    for (c, f) in ma.factors.iter().enumerate() {
        let others = lists_product(
            &sizes
                .iter()
                .enumerate()
                .map(|(d, &s)| if d == c { vec![0] } else { (0..s).collect() })
                .collect::<Vec<_>>(),
        );
        for rest in others {
            let at = |a: usize| {
                let mut t = rest.clone();
                t[c] = a;
                t
            };
            let arrow = |a: usize, b: usize| -> &D::Mor {
                let ms: Vec<usize> = (0..ma.factors.len())
                    .map(|d| {
                        if d == c {
                            f.arrow(a, b)
                        } else {
                            ma.factors[d].cat.identity(rest[d])
                        }
                    })
                    .collect();
                &x.morphisms[idx.encode_morphism(&ms)]
            };
            for (i, j, k) in (0..=f.n).tuple_combinations() {
                let (ij, ik, jj, jk) = (
                    f.object(i, j),
                    f.object(i, k),
                    f.object(j, j),
                    f.object(j, k),
                );
                let p = cat.pushout(arrow(ij, ik), arrow(ij, jj))?;
                let ok = match p {
                    None => false,
                    Some(p) => cat.is_iso(&cat.pushout_factor(&p, arrow(ik, jk), arrow(jj, jk))?),
                };
                if !ok {
                    let t = at(ij);
                    out.push(format!(
                        "square {i}<{j}<{k} in coordinate {} at {} is not a pushout",
                        c + 1,
                        idx.object_label(idx.encode_object(&t))
                    ));
                }
            }
        }
    }
    for cube in ma.row_cubes() {
        let g = is_good(cat, &cube.apply(x));
        if !g.good {
            out.push(format!(
                "cube {} is not good: {}",
                cube.label,
                g.reason.unwrap_or_default()
            ));
        }
    }
    Ok(out)
}

/// Every iterated S-object on `Ar<n_1> × ... × Ar<n_k>` with skeleton values, sorted.
pub fn iterated_s<D: Waldhausen>(
    cat: &D,
    ns: &[usize],
    limits: &Limits,
) -> Result<Vec<Diagram<D>>> {
    let ma = MultiArrow::new(ns, limits)?;
    let idx = ma.index.clone();
    let diag: Vec<bool> = (0..idx.num_objects())
        .map(|o| {
            idx.decode_object(o)
                .iter()
                .zip(&ma.factors)
                .any(|(&a, f)| f.pairs[a].0 == f.pairs[a].1)
        })
        .collect();
    let filters = Filters {
        object: Box::new(move |o: usize, v: &D::Obj| !diag[o] || cat.is_zero(v)),
        morphism: Box::new(|_, _| true),
    };
    let all = enumerate_functors(cat, &Index::Product(ma.index.clone()), &filters, limits)?;
    let mut out = Vec::new();
    for x in all {
        if iterated_violations(cat, &ma, &x)?.is_empty() {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}

/// `δ_j: <n-1> -> <n>`, skipping `j`.
pub fn coface(j: usize) -> impl Fn(usize) -> usize {
    move |x| if x < j { x } else { x + 1 }
}

/// `σ_j: <n+1> -> <n>`, hitting `j` twice.
pub fn codegeneracy(j: usize) -> impl Fn(usize) -> usize {
    move |x| if x <= j { x } else { x - 1 }
}

/// `∂_j X = X ∘ Ar(δ_j)`.
pub fn face<D: Category>(
    x: &Diagram<D>,
    n: usize,
    j: usize,
    limits: &Limits,
) -> Result<Diagram<D>> {
    if n == 0 || j > n {
        return malformed(format!("face {j} of level {n}"));
    }
    let (big, small) = (ArrowIndex::new(n, limits)?, ArrowIndex::new(n - 1, limits)?);
    let (o, m) = big.operator(&small, coface(j));
    Ok(x.precompose(small.index(), &o, &m))
}

/// `s_j X = X ∘ Ar(σ_j)`.
pub fn degeneracy<D: Category>(
    x: &Diagram<D>,
    n: usize,
    j: usize,
    limits: &Limits,
) -> Result<Diagram<D>> {
    if j > n {
        return malformed(format!("degeneracy {j} of level {n}"));
    }
    let (small, big) = (ArrowIndex::new(n, limits)?, ArrowIndex::new(n + 1, limits)?);
    let (o, m) = small.operator(&big, codegeneracy(j));
    Ok(x.precompose(big.index(), &o, &m))
}

/// The same operators on a natural transformation.
pub fn face_trans<D: Category>(
    a: &NatTrans<D>,
    n: usize,
    j: usize,
    limits: &Limits,
) -> Result<NatTrans<D>> {
    let (big, small) = (ArrowIndex::new(n, limits)?, ArrowIndex::new(n - 1, limits)?);
    let (o, _) = big.operator(&small, coface(j));
    Ok(NatTrans {
        dom: Arc::new(face(&a.dom, n, j, limits)?),
        cod: Arc::new(face(&a.cod, n, j, limits)?),
        components: o.iter().map(|&x| a.components[x].clone()).collect(),
    })
}

pub fn degeneracy_trans<D: Category>(
    a: &NatTrans<D>,
    n: usize,
    j: usize,
    limits: &Limits,
) -> Result<NatTrans<D>> {
    let (small, big) = (ArrowIndex::new(n, limits)?, ArrowIndex::new(n + 1, limits)?);
    let (o, _) = small.operator(&big, codegeneracy(j));
    Ok(NatTrans {
        dom: Arc::new(degeneracy(&a.dom, n, j, limits)?),
        cod: Arc::new(degeneracy(&a.cod, n, j, limits)?),
        components: o.iter().map(|&x| a.components[x].clone()).collect(),
    })
}

/// Levels `0..=top` of `S_• C` with faces and degeneracies as index maps.
pub struct SimplicialTruncation<D: Category> {
    pub levels: Vec<Vec<Diagram<D>>>,
    /// `faces[n][j]`: level n -> level n-1 (empty for n = 0).
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `degeneracies[n][j]`: level n -> level n+1 (empty at the top level).
    pub degeneracies: Vec<Vec<Vec<usize>>>,
}

fn locate<D: Category>(
    level: &HashMap<&Diagram<D>, usize>,
    x: &Diagram<D>,
    what: &str,
) -> Result<usize> {
    level
        .get(x)
        .copied()
        .ok_or_else(|| Error::Malformed(format!("{what} leaves the enumerated level")))
}

pub fn truncation<D: Waldhausen>(
    cat: &D,
    top: usize,
    limits: &Limits,
) -> Result<SimplicialTruncation<D>> {
    let levels = (0..=top)
        .map(|n| enumerate_sn(cat, n, limits))
        .collect::<Result<Vec<_>>>()?;
    let lookup: Vec<HashMap<&Diagram<D>, usize>> = levels
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, x)| (x, i)).collect())
        .collect();
    let mut faces = Vec::new();
    let mut degeneracies = Vec::new();
    for n in 0..=top {
        let mut fs = Vec::new();
        if n > 0 {
            for j in 0..=n {
                let map = levels[n]
                    .iter()
                    .map(|x| locate(&lookup[n - 1], &face(x, n, j, limits)?, "a face"))
                    .collect::<Result<Vec<_>>>()?;
                fs.push(map);
            }
        }
        faces.push(fs);
        let mut ds = Vec::new();
        if n < top {
            for j in 0..=n {
                let map = levels[n]
                    .iter()
                    .map(|x| {
                        locate(
                            &lookup[n + 1],
                            &degeneracy(x, n, j, limits)?,
                            "a degeneracy",
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                ds.push(map);
            }
        }
        degeneracies.push(ds);
    }
    Ok(SimplicialTruncation {
        levels,
        faces,
        degeneracies,
    })
}

fn then(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&x| second[x]).collect()
}

impl<D: Category> SimplicialTruncation<D> {
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Failures of the simplicial identities, as readable equations. Also returns
    /// the number of equations checked.
    pub fn identity_failures(&self) -> (usize, Vec<String>) {
        let mut bad = Vec::new();
        let mut checked = 0;
        let d = |n: usize, j: usize| &self.faces[n][j];
        let s = |n: usize, j: usize| &self.degeneracies[n][j];
        let mut check = |ok: bool, eq: String| {
            checked += 1;
            if !ok {
                bad.push(eq);
            }
        };
        let top = self.top();
        for n in 2..=top {
            for j in 0..=n {
                for i in 0..j {
                    // ∂_i ∂_j = ∂_{j-1} ∂_i on level n
                    check(
                        then(d(n, j), d(n - 1, i)) == then(d(n, i), d(n - 1, j - 1)),
                        format!("d{i}d{j} = d{}d{i} on S{n}", j - 1),
                    );
                }
            }
        }
        for n in 0..top.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    // s_i s_j = s_{j+1} s_i on level n
                    check(
                        then(s(n, j), s(n + 1, i)) == then(s(n, i), s(n + 1, j + 1)),
                        format!("s{i}s{j} = s{}s{i} on S{n}", j + 1),
                    );
                }
            }
        }
        for n in 0..top {
            let id: Vec<usize> = (0..self.levels[n].len()).collect();
            for j in 0..=n {
                for i in 0..=n + 1 {
                    // ∂_i s_j on level n
                    let lhs = then(s(n, j), d(n + 1, i));
                    let rhs = if i < j {
                        then(d(n, i), s(n - 1, j - 1))
                    } else if i == j || i == j + 1 {
                        id.clone()
                    } else {
                        then(d(n, i - 1), s(n - 1, j))
                    };
                    check(lhs == rhs, format!("d{i}s{j} on S{n}"));
                }
            }
        }
        (checked, bad)
    }
}

/// `ρ_ni(A)`: `A` at `(j<k)` when `j <= n-i < k`, zero elsewhere.
pub fn rho<D: Waldhausen>(
    cat: &D,
    n: usize,
    i: usize,
    a: &D::Obj,
    limits: &Limits,
) -> Result<Diagram<D>> {
    rho_trans(cat, n, i, &cat.identity(a), limits).map(|t| (*t.dom).clone())
}

fn rho_hit(n: usize, i: usize, j: usize, k: usize) -> bool {
    j + i <= n && n < k + i
}

/// `ρ_ni(f)`: `f` on the staircase, identities of zero elsewhere.
pub fn rho_trans<D: Waldhausen>(
    cat: &D,
    n: usize,
    i: usize,
    f: &D::Mor,
    limits: &Limits,
) -> Result<NatTrans<D>> {
    if i > n {
        return malformed(format!("ρ index {i} exceeds level {n}"));
    }
    let ar = ArrowIndex::new(n, limits)?;
    let zero = cat.zero();
    let side = |a: &D::Obj| -> Result<Diagram<D>> {
        let objects: Vec<D::Obj> = ar
            .pairs
            .iter()
            .map(|&(j, k)| {
                if rho_hit(n, i, j, k) {
                    a.clone()
                } else {
                    zero.clone()
                }
            })
            .collect();
        let morphisms = ar
            .cat
            .morphisms()
            .iter()
            .map(|m| {
                let (s, t) = (ar.pairs[m.dom], ar.pairs[m.cod]);
                match (rho_hit(n, i, s.0, s.1), rho_hit(n, i, t.0, t.1)) {
                    (true, true) => cat.identity(a),
                    (true, false) => cat.to_zero(a),
                    (false, true) => cat.from_zero(a),
                    (false, false) => cat.identity(&zero),
                }
            })
            .collect();
        Diagram::unchecked(ar.index(), objects, morphisms)
    };
    let components = ar
        .pairs
        .iter()
        .map(|&(j, k)| {
            if rho_hit(n, i, j, k) {
                f.clone()
            } else {
                cat.identity(&zero)
            }
        })
        .collect();
    Ok(NatTrans {
        dom: Arc::new(side(&cat.dom(f))?),
        cod: Arc::new(side(&cat.cod(f))?),
        components,
    })
}

/// Faces of the simplicial circle: `∂_j i`.
pub fn circle_face(n: usize, i: usize, j: usize) -> usize {
    if (j == 0 && i == n) || (j == n && i == 1) {
        0
    } else if j + i <= n {
        i
    } else {
        i - 1
    }
}

/// Degeneracies of the simplicial circle: `s_j i`.
pub fn circle_degeneracy(n: usize, i: usize, j: usize) -> usize {
    if j + i <= n {
        i
    } else {
        i + 1
    }
}

/// Result of [`check_p`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// `P: C × S¹ -> S_• C` is simplicial: `∂_j ρ_ni = ρ_{n-1, ∂_j i}` and
/// `s_j ρ_ni = ρ_{n+1, s_j i}` on every skeleton morphism, `ρ_ni` lands in `S_n`,
/// and `ρ_n0` and `ρ_ni(0)` are zero.
pub fn check_p<D: Waldhausen>(cat: &D, top: usize, limits: &Limits) -> Result<PReport> {
    let mut rep = PReport::default();
    let fail = |rep: &mut PReport, ok: bool, msg: String| {
        rep.checked += 1;
        if !ok && rep.failures.len() < crate::wald::MAX_WITNESSES {
            rep.failures.push(msg);
        }
    };
    let objects = cat.objects()?;
    let mut morphisms = Vec::new();
    for a in &objects {
        for b in &objects {
            morphisms.extend(cat.hom(a, b)?);
        }
    }
    for n in 0..=top {
        let ar = ArrowIndex::new(n, limits)?;
        let zero = Diagram::constant(cat, ar.index(), &cat.zero());
        for i in 0..=n {
            fail(
                &mut rep,
                rho(cat, n, i, &cat.zero(), limits)? == zero,
                format!("ρ_{n}{i}(0) is not zero"),
            );
            for f in &morphisms {
                let r = rho_trans(cat, n, i, f, limits)?;
                let lbl = cat.mor_label(f);
                if i == 0 {
                    fail(
                        &mut rep,
                        *r.dom == zero && *r.cod == zero,
                        format!("ρ_{n}0({lbl}) is not zero"),
                    );
                }
                if cat.is_identity(f) {
                    let v = sn_violations(cat, &ar, &r.dom)?;
                    fail(
                        &mut rep,
                        v.is_empty(),
                        format!(
                            "ρ_{n}{i}({}) is not in S{n}: {}",
                            cat.obj_label(&cat.dom(f)),
                            v.join("; ")
                        ),
                    );
                }
                if n > 0 {
                    for j in 0..=n {
                        let lhs = face_trans(&r, n, j, limits)?;
                        let rhs = rho_trans(cat, n - 1, circle_face(n, i, j), f, limits)?;
                        fail(
                            &mut rep,
                            lhs == rhs,
                            format!(
                                "d{j} ρ_{n}{i}({lbl}) != ρ_{}{}({lbl})",
                                n - 1,
                                circle_face(n, i, j)
                            ),
                        );
                    }
                }
                if n < top {
                    for j in 0..=n {
                        let lhs = degeneracy_trans(&r, n, j, limits)?;
                        let rhs = rho_trans(cat, n + 1, circle_degeneracy(n, i, j), f, limits)?;
                        fail(
                            &mut rep,
                            lhs == rhs,
                            format!(
                                "s{j} ρ_{n}{i}({lbl}) != ρ_{}{}({lbl})",
                                n + 1,
                                circle_degeneracy(n, i, j)
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(rep)
}

fn factors_of(index: &Index) -> Vec<Arc<FinCat>> {
    match index {
        Index::Fin(c) => vec![c.clone()],
        Index::Product(p) => p.factors().to_vec(),
    }
}

/// `F ∘ (X_1 × X_2)` on the product of the two indexes. `X_i` must take values in
/// the skeleton that `F`'s i-th source materializes.
pub fn pairing<C: Waldhausen, D: Waldhausen>(
    f: &MultiFunctor<D>,
    x1: &Diagram<C>,
    x2: &Diagram<C>,
    m1: &Materialized<C>,
    m2: &Materialized<C>,
    limits: &Limits,
) -> Result<Diagram<D>> {
    if f.arity() != 2 {
        return malformed("pairing needs a functor of two variables");
    }
    let factors: Vec<Arc<FinCat>> = factors_of(&x1.index)
        .into_iter()
        .chain(factors_of(&x2.index))
        .collect();
    let index = Arc::new(ProductIndex::new(factors, limits)?);
    let (no, nm) = (x1.small().num_objects(), x1.small().num_morphisms());
    let oid = |m: &Materialized<C>, a: &C::Obj| {
        m.object_id(a)
            .ok_or_else(|| Error::Malformed("a value lies outside the source skeleton".into()))
    };
    let mid = |m: &Materialized<C>, a: &C::Mor| {
        m.morphism_id(a)
            .ok_or_else(|| Error::Malformed("a map lies outside the source skeleton".into()))
    };
    let objects = (0..index.num_objects())
        .map(|o| {
            Ok(
                f.obj(&[oid(m1, &x1.objects[o % no])?, oid(m2, &x2.objects[o / no])?])
                    .clone(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let morphisms = (0..index.num_morphisms())
        .map(|x| {
            Ok(f.mor(&[
                mid(m1, &x1.morphisms[x % nm])?,
                mid(m2, &x2.morphisms[x / nm])?,
            ])
            .clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Diagram::unchecked(Index::Product(index), objects, morphisms)
}

/// Result of [`check_pairing`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    pub pairs: usize,
    pub coherence_checked: usize,
    pub failures: Vec<String>,
}

/// For a biexact `F` with sources materialized from `cat`: every pairing of
/// `S_{n1}` and `S_{n2}` objects (levels up to `top`) is an iterated S-object that
/// is zero when either input is, and `ρ_ni(F(f,g)) = F(f, ρ_ni g) = F(ρ_ni f, g)`
/// on all morphisms `f`, `g` and `n <= top`.
pub fn check_pairing<C: Waldhausen, D: Waldhausen>(
    f: &MultiFunctor<D>,
    cat: &C,
    m1: &Materialized<C>,
    m2: &Materialized<C>,
    top: usize,
    limits: &Limits,
) -> Result<PairingReport> {
    let d = f.target.as_ref();
    let mut rep = PairingReport::default();
    let fail = |rep: &mut PairingReport, msg: String| {
        if rep.failures.len() < crate::wald::MAX_WITNESSES {
            rep.failures.push(msg);
        }
    };
    let levels = (0..=top)
        .map(|n| enumerate_sn(cat, n, limits))
        .collect::<Result<Vec<_>>>()?;
    for n1 in 0..=top {
        for n2 in 0..=top {
            let ma = MultiArrow::new(&[n1, n2], limits)?;
            let z1 = Diagram::constant(cat, ArrowIndex::new(n1, limits)?.index(), &cat.zero());
            let z2 = Diagram::constant(cat, ArrowIndex::new(n2, limits)?.index(), &cat.zero());
            let zero = Diagram::constant(d, Index::Product(ma.index.clone()), &d.zero());
            for x1 in &levels[n1] {
                for x2 in &levels[n2] {
                    rep.pairs += 1;
                    let p = pairing(f, x1, x2, m1, m2, limits)?;
                    let v = iterated_violations(d, &ma, &p)?;
                    if !v.is_empty() {
                        fail(
                            &mut rep,
                            format!(
                                "pairing at levels ({n1},{n2}) is not an iterated S-object: {}",
                                v.join("; ")
                            ),
                        );
                    }
                    if (*x1 == z1 || *x2 == z2) && p != zero {
                        fail(
                            &mut rep,
                            format!("pairing with zero at levels ({n1},{n2}) is not zero"),
                        );
                    }
                }
            }
        }
    }
    let all = |m: &Materialized<C>| (0..m.morphisms.len()).collect::<Vec<usize>>();
    for n in 0..=top {
        for i in 0..=n {
            for &g1 in &all(m1) {
                for &g2 in &all(m2) {
                    rep.coherence_checked += 1;
                    let whole = rho_trans(d, n, i, f.mor(&[g1, g2]), limits)?;
                    let r2 = rho_trans(cat, n, i, &m2.morphisms[g2], limits)?;
                    let r1 = rho_trans(cat, n, i, &m1.morphisms[g1], limits)?;
                    let right = apply_in_variable(f, m1, m2, Side::Second(g1), &r2)?;
                    let left = apply_in_variable(f, m1, m2, Side::First(g2), &r1)?;
                    if whole != right || whole != left {
                        fail(
                            &mut rep,
                            format!(
                                "coherence fails for ρ_{n}{i} at ({}, {})",
                                m1.wald.mor_label(&g1),
                                m2.wald.mor_label(&g2)
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(rep)
}

enum Side {
    /// Vary the first input; the second is fixed at this morphism.
    First(usize),
    /// Vary the second input; the first is fixed at this morphism.
    Second(usize),
}

/// `F(f, α)` or `F(α, g)` for a transformation `α` of diagrams in a source.
fn apply_in_variable<C: Waldhausen, D: Waldhausen>(
    f: &MultiFunctor<D>,
    m1: &Materialized<C>,
    m2: &Materialized<C>,
    side: Side,
    alpha: &NatTrans<C>,
) -> Result<NatTrans<D>> {
    let (m, fixed) = match side {
        Side::First(g) => (m1, g),
        Side::Second(g) => (m2, g),
    };
    let fw = if matches!(side, Side::First(_)) {
        &m2.wald
    } else {
        &m1.wald
    };
    let pair = |x: usize, y: usize| {
        if matches!(side, Side::First(_)) {
            [x, y]
        } else {
            [y, x]
        }
    };
    let mid = |a: &C::Mor| {
        m.morphism_id(a)
            .ok_or_else(|| Error::Malformed("a map lies outside the source skeleton".into()))
    };
    let fixed_dom = fw.identity(&fw.dom(&fixed));
    let fixed_cod = fw.identity(&fw.cod(&fixed));
    let side_diagram = |x: &Diagram<C>, fid: usize| -> Result<Diagram<D>> {
        let objects = x
            .objects
            .iter()
            .map(|o| {
                let id = m.object_id(o).ok_or_else(|| {
                    Error::Malformed("a value lies outside the source skeleton".into())
                })?;
                Ok(f.obj(&pair(id, fw.dom(&fid))).clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let morphisms = x
            .morphisms
            .iter()
            .map(|g| Ok(f.mor(&pair(mid(g)?, fid)).clone()))
            .collect::<Result<Vec<_>>>()?;
        Diagram::unchecked(x.index.clone(), objects, morphisms)
    };
    let dom = side_diagram(&alpha.dom, fixed_dom)?;
    let cod = side_diagram(&alpha.cod, fixed_cod)?;
    let components = alpha
        .components
        .iter()
        .map(|c| Ok(f.mor(&pair(mid(c)?, fixed)).clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(NatTrans {
        dom: Arc::new(dom),
        cod: Arc::new(cod),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finwald::materialize;
    use crate::multiexact::smash;
    use crate::pointed::PointedSets;
    use crate::vect::VectFp;
    use crate::wald::check_wald_axioms;

    #[test]
    fn low_levels() {
        let l = Limits::default();
        let c = PointedSets::new(3);
        assert_eq!(enumerate_sn(&c, 0, &l).unwrap().len(), 1);
        let s1 = enumerate_sn(&c, 1, &l).unwrap();
        let ar = ArrowIndex::new(1, &l).unwrap();
        let tops: Vec<u32> = s1.iter().map(|x| x.objects[ar.object(0, 1)]).collect();
        assert_eq!(tops, vec![0, 1, 2]);
    }

    #[test]
    fn level_two_matches_brute_force() {
        let l = Limits::default();
        for size in [2, 3] {
            let c = PointedSets::new(size);
            let fast = enumerate_sn(&c, 2, &l).unwrap();
            let slow = enumerate_sn_brute(&c, 2, &l).unwrap();
            assert_eq!(fast, slow);
            let ar = ArrowIndex::new(2, &l).unwrap();
            for x in &fast {
                assert!(sn_violations(&c, &ar, x).unwrap().is_empty());
            }
        }
        // sets with at most two points: 0↣0, 0↣1, 1↣1 (twice: quotient 1 or 0... ) counted by hand
        let c = PointedSets::new(3);
        // chains a ↣ b with b ≤ 2 points, times automorphisms of the quotient
        // (0,0):1 (0,1):1 (0,2):2 (1,1):1 (1,2):2·1 (2,2):2
        assert_eq!(enumerate_sn(&c, 2, &l).unwrap().len(), 9);
    }

    #[test]
    fn level_three_matches_brute_force() {
        let l = Limits::default();
        let c = PointedSets::new(3);
        assert_eq!(
            enumerate_sn(&c, 3, &l).unwrap(),
            enumerate_sn_brute(&c, 3, &l).unwrap()
        );
        let v = VectFp::new(2, 1).unwrap();
        assert_eq!(
            enumerate_sn(&v, 2, &l).unwrap(),
            enumerate_sn_brute(&v, 2, &l).unwrap()
        );
    }

    #[test]
    fn faces_on_level_two() {
        let l = Limits::default();
        let c = PointedSets::new(4);
        let ar2 = ArrowIndex::new(2, &l).unwrap();
        let ar1 = ArrowIndex::new(1, &l).unwrap();
        for x in enumerate_sn(&c, 2, &l).unwrap() {
            let at = |j, i| x.objects[ar2.object(j, i)];
            let top = |y: &Diagram<PointedSets>| y.objects[ar1.object(0, 1)];
            assert_eq!(top(&face(&x, 2, 0, &l).unwrap()), at(1, 2));
            assert_eq!(top(&face(&x, 2, 1, &l).unwrap()), at(0, 2));
            assert_eq!(top(&face(&x, 2, 2, &l).unwrap()), at(0, 1));
        }
    }

    #[test]
    fn simplicial_identities() {
        let l = Limits::default();
        let t = truncation(&PointedSets::new(3), 3, &l).unwrap();
        let (checked, bad) = t.identity_failures();
        assert!(bad.is_empty(), "{bad:?}");
        assert!(checked > 30);
        // s_0 then d_0 is the identity on S_1, checked directly
        for (k, _) in t.levels[1].iter().enumerate() {
            assert_eq!(t.faces[2][0][t.degeneracies[1][0][k]], k);
        }
    }

    #[test]
    fn a_broken_face_map_is_caught() {
        let l = Limits::default();
        let mut t = truncation(&PointedSets::new(3), 3, &l).unwrap();
        let last = t.levels[1].len() - 1;
        t.faces[2][1][0] = last;
        assert!(!t.identity_failures().1.is_empty());
    }

    #[test]
    fn sn_categories_are_waldhausen() {
        let l = Limits::default();
        for n in 0..=2 {
            let c = sn_category(Arc::new(PointedSets::new(3)), n, &l).unwrap();
            let r = check_wald_axioms(&c, &l).unwrap();
            assert!(r.holds(), "S{n}: {r:?}");
        }
    }

    #[test]
    fn iterated_levels() {
        let l = Limits::default();
        let c = PointedSets::new(3);
        for n in 0..=2 {
            assert_eq!(iterated_s(&c, &[n], &l).unwrap(), {
                let ar = ArrowIndex::new(n, &l).unwrap();
                let ma = MultiArrow::new(&[n], &l).unwrap();
                enumerate_sn(&c, n, &l)
                    .unwrap()
                    .into_iter()
                    .map(|x| {
                        Diagram::unchecked(Index::Product(ma.index.clone()), x.objects, x.morphisms)
                            .unwrap()
                    })
                    .inspect(|_| {
                        let _ = &ar;
                    })
                    .collect::<Vec<_>>()
            });
        }
        assert_eq!(iterated_s(&c, &[1, 1], &l).unwrap().len(), 3);
        assert_eq!(iterated_s(&c, &[0, 2], &l).unwrap().len(), 1);
        assert_eq!(iterated_s(&c, &[2, 0], &l).unwrap().len(), 1);
    }

    #[test]
    fn p_is_simplicial() {
        let l = Limits::default();
        let r = check_p(&PointedSets::new(3), 3, &l).unwrap();
        assert!(r.failures.is_empty(), "{r:?}");
        assert!(r.checked > 500);
    }

    #[test]
    fn the_printed_staircase_is_not_an_s_object() {
        // "* if j <= n-i or k >= i", read literally, puts A on the diagonal
        let n = 2;
        let literal = |i: usize, j: usize, k: usize| !(j + i <= n || k >= i);
        assert!(arrow_ordinal_pairs(n).any(|(j, k)| j == k && literal(2, j, k)));
        for i in 0..=n {
            assert!(arrow_ordinal_pairs(n).all(|(j, k)| j < k || !rho_hit(n, i, j, k)));
        }
    }

    fn arrow_ordinal_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
        crate::index::arrow_ordinal_objects(n).into_iter()
    }

    #[test]
    fn smash_pairing() {
        let l = Limits::default();
        let c = PointedSets::new(2);
        let m = materialize(&c, &l).unwrap();
        let f = smash(&[&m, &m], Arc::new(PointedSets::new(2)), &l).unwrap();
        let r = check_pairing(&f, &c, &m, &m, 2, &l).unwrap();
        assert!(r.failures.is_empty(), "{r:?}");
        assert!(r.coherence_checked > 0);
        let c3 = PointedSets::new(3);
        let m3 = materialize(&c3, &l).unwrap();
        let f = smash(&[&m3, &m3], Arc::new(PointedSets::new(5)), &l).unwrap();
        let r = check_pairing(&f, &c3, &m3, &m3, 2, &l).unwrap();
        assert!(r.failures.is_empty(), "{r:?}");
    }

    #[test]
    fn smash_of_two_arrows_is_a_good_square() {
        let l = Limits::default();
        let c = PointedSets::new(3);
        let m = materialize(&c, &l).unwrap();
        let f = smash(&[&m, &m], Arc::new(PointedSets::new(5)), &l).unwrap();
        let s1 = enumerate_sn(&c, 1, &l).unwrap();
        let ma = MultiArrow::new(&[1, 1], &l).unwrap();
        let x = &s1[2];
        let p = pairing(&f, x, x, &m, &m, &l).unwrap();
        assert!(iterated_violations(f.target.as_ref(), &ma, &p)
            .unwrap()
            .is_empty());
        let mid = ma.index.encode_object(&[1, 1]);
        assert_eq!(p.objects[mid], 4);
    }
}

//! Finite categories used as diagram shapes and as materialized sources.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};
use crate::limits::Limits;

/// Read-only access to a small category whose objects and morphisms are dense indices.
pub trait SmallCat: fmt::Debug + Send + Sync {
    fn num_objects(&self) -> usize;
    fn num_morphisms(&self) -> usize;
    fn dom(&self, m: usize) -> usize;
    fn cod(&self, m: usize) -> usize;
    fn identity(&self, o: usize) -> usize;
    /// `g ∘ f`, or `None` when `cod f != dom g`.
    fn compose(&self, g: usize, f: usize) -> Option<usize>;
    fn hom(&self, a: usize, b: usize) -> Vec<usize>;
    fn morphisms_from(&self, o: usize) -> Vec<usize>;
    fn object_label(&self, o: usize) -> String;
    fn morphism_label(&self, m: usize) -> String;

    fn is_identity(&self, m: usize) -> bool {
        self.identity(self.dom(m)) == m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismData {
    pub label: String,
    pub dom: usize,
    pub cod: usize,
}

/// A finite category given by explicit tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCat {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<MorphismData>,
    identities: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
    homs: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
}

impl FinCat {
    /// Builds and fully validates a finite category. `compose` lists `(g, f, g∘f)`
    /// for every composable pair where neither side is an identity; identity
    /// composites are filled in automatically.
    pub fn new(
        name: impl Into<String>,
        objects: Vec<String>,
        morphisms: Vec<MorphismData>,
        identities: Vec<usize>,
        compose: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let cat = Self::assemble(name, objects, morphisms, identities, compose)?;
        cat.validate()?;
        Ok(cat)
    }

    pub(crate) fn assemble(
        name: impl Into<String>,
        objects: Vec<String>,
        morphisms: Vec<MorphismData>,
        identities: Vec<usize>,
        compose: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let n = objects.len();
        if identities.len() != n {
            return malformed("identity table must list one morphism per object");
        }
        for (i, m) in morphisms.iter().enumerate() {
            if m.dom >= n || m.cod >= n {
                return malformed(format!("morphism {i} has an out-of-range endpoint"));
            }
        }
        for (o, &id) in identities.iter().enumerate() {
            let Some(m) = morphisms.get(id) else {
                return malformed(format!("identity of object {o} is not a morphism"));
            };
            if m.dom != o || m.cod != o {
                return malformed(format!(
                    "identity of object {o} is not an endomorphism of it"
                ));
            }
        }
        let mut table = HashMap::new();
        for (g, f, h) in compose {
            if g >= morphisms.len() || f >= morphisms.len() || h >= morphisms.len() {
                return malformed("composition entry references an unknown morphism");
            }
            if let Some(prev) = table.insert((g, f), h) {
                if prev != h {
                    return malformed(format!("composition of ({g}, {f}) is listed twice"));
                }
            }
        }
        for (m, data) in morphisms.iter().enumerate() {
            table.insert((identities[data.cod], m), m);
            table.insert((m, identities[data.dom]), m);
        }
        let mut homs = vec![Vec::new(); n * n];
        let mut out = vec![Vec::new(); n];
        for (i, m) in morphisms.iter().enumerate() {
            homs[m.dom * n + m.cod].push(i);
            out[m.dom].push(i);
        }
        Ok(FinCat {
            name: name.into(),
            objects,
            morphisms,
            identities,
            compose: table,
            homs,
            out,
        })
    }

    /// Checks totality and closure of composition, unit laws and associativity.
    pub fn validate(&self) -> Result<()> {
        let m = self.morphisms.len();
        for f in 0..m {
            for &g in &self.out[self.morphisms[f].cod] {
                let Some(&h) = self.compose.get(&(g, f)) else {
                    return malformed(format!(
                        "composition table is not total: {} ∘ {} missing",
                        self.morphism_label(g),
                        self.morphism_label(f)
                    ));
                };
                if self.morphisms[h].dom != self.morphisms[f].dom
                    || self.morphisms[h].cod != self.morphisms[g].cod
                {
                    return malformed(format!(
                        "{} ∘ {} has the wrong endpoints",
                        self.morphism_label(g),
                        self.morphism_label(f)
                    ));
                }
            }
        }
        if self.compose.len() != self.count_composable_pairs() {
            return malformed("composition table lists non-composable pairs");
        }
        for f in 0..m {
            for &g in &self.out[self.morphisms[f].cod] {
                let gf = self.compose[&(g, f)];
                for &h in &self.out[self.morphisms[g].cod] {
                    let lhs = self.compose[&(h, gf)];
                    let rhs = self.compose[&(self.compose[&(h, g)], f)];
                    if lhs != rhs {
                        return malformed(format!(
                            "associativity fails on ({}, {}, {})",
                            self.morphism_label(h),
                            self.morphism_label(g),
                            self.morphism_label(f)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn count_composable_pairs(&self) -> usize {
        (0..self.morphisms.len())
            .map(|f| self.out[self.morphisms[f].cod].len())
            .sum()
    }

    /// The category of a finite preorder that is a partial order: one morphism `i -> j` whenever `leq(i, j)`.
    pub fn from_poset(
        name: impl Into<String>,
        labels: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let n = labels.len();
        let mut morphisms = Vec::new();
        let mut ids = HashMap::new();
        let mut identities = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    if i != j && leq(j, i) {
                        return malformed("poset relation is not antisymmetric");
                    }
                    let label = if i == j {
                        format!("id[{}]", labels[i])
                    } else {
                        format!("{}->{}", labels[i], labels[j])
                    };
                    ids.insert((i, j), morphisms.len());
                    if i == j {
                        identities[i] = morphisms.len();
                    }
                    morphisms.push(MorphismData {
                        label,
                        dom: i,
                        cod: j,
                    });
                }
            }
        }
        for i in 0..n {
            if !leq(i, i) {
                return malformed("poset relation is not reflexive");
            }
        }
        let mut compose = Vec::new();
        for (&(i, j), &f) in &ids {
            for k in 0..n {
                if let Some(&g) = ids.get(&(j, k)) {
                    let Some(&h) = ids.get(&(i, k)) else {
                        return malformed("poset relation is not transitive");
                    };
                    compose.push((g, f, h));
                }
            }
        }
        Self::assemble(name, labels, morphisms, identities, compose)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[MorphismData] {
        &self.morphisms
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn object_id(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn morphism_id(&self, label: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.label == label)
    }

    /// All `(g, f, g∘f)` entries, sorted.
    pub fn composition_entries(&self) -> Vec<(usize, usize, usize)> {
        let mut v: Vec<_> = self.compose.iter().map(|(&(g, f), &h)| (g, f, h)).collect();
        v.sort_unstable();
        v
    }

    /// Renames the category.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// A terminal object, if one exists.
    pub fn terminal_object(&self) -> Option<usize> {
        (0..self.objects.len())
            .find(|&t| (0..self.objects.len()).all(|a| self.hom(a, t).len() == 1))
    }
}

impl SmallCat for FinCat {
    fn num_objects(&self) -> usize {
        self.objects.len()
    }
    fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }
    fn dom(&self, m: usize) -> usize {
        self.morphisms[m].dom
    }
    fn cod(&self, m: usize) -> usize {
        self.morphisms[m].cod
    }
    fn identity(&self, o: usize) -> usize {
        self.identities[o]
    }
    fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }
    fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        self.homs[a * self.objects.len() + b].clone()
    }
    fn morphisms_from(&self, o: usize) -> Vec<usize> {
        self.out[o].clone()
    }
    fn object_label(&self, o: usize) -> String {
        self.objects[o].clone()
    }
    fn morphism_label(&self, m: usize) -> String {
        self.morphisms[m].label.clone()
    }
}

/// The product of finitely many finite categories, indexed in mixed radix with
/// the first factor least significant. Composition is computed componentwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductIndex {
    factors: Vec<Arc<FinCat>>,
    obj_strides: Vec<usize>,
    mor_strides: Vec<usize>,
    num_objects: usize,
    num_morphisms: usize,
}

impl ProductIndex {
    pub fn new(factors: Vec<Arc<FinCat>>, limits: &Limits) -> Result<Self> {
        let mut obj_strides = Vec::with_capacity(factors.len());
        let mut mor_strides = Vec::with_capacity(factors.len());
        let (mut no, mut nm) = (1usize, 1usize);
        for f in &factors {
            obj_strides.push(no);
            mor_strides.push(nm);
            no = no
                .checked_mul(f.num_objects())
                .ok_or_else(|| cap("product objects", limits.max_objects))?;
            nm = nm
                .checked_mul(f.num_morphisms())
                .ok_or_else(|| cap("product morphisms", limits.max_morphisms))?;
        }
        Limits::check("product objects", no, limits.max_objects)?;
        Limits::check("product morphisms", nm, limits.max_morphisms)?;
        Ok(ProductIndex {
            factors,
            obj_strides,
            mor_strides,
            num_objects: no,
            num_morphisms: nm,
        })
    }

    pub fn factors(&self) -> &[Arc<FinCat>] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn encode_object(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.obj_strides)
            .map(|(x, s)| x * s)
            .sum()
    }

    pub fn decode_object(&self, mut idx: usize) -> Vec<usize> {
        self.factors
            .iter()
            .map(|f| {
                let d = idx % f.num_objects();
                idx /= f.num_objects();
                d
            })
            .collect()
    }

    pub fn encode_morphism(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.mor_strides)
            .map(|(x, s)| x * s)
            .sum()
    }

    pub fn decode_morphism(&self, mut idx: usize) -> Vec<usize> {
        self.factors
            .iter()
            .map(|f| {
                let d = idx % f.num_morphisms();
                idx /= f.num_morphisms();
                d
            })
            .collect()
    }

    /// Every tuple in the cartesian product of the given per-factor lists, encoded.
    fn encode_all(&self, lists: &[Vec<usize>]) -> Vec<usize> {
        let mut out = vec![0usize];
        for (i, list) in lists.iter().enumerate() {
            let stride = self.mor_strides[i];
            let mut next = Vec::with_capacity(out.len() * list.len());
            for &base in &out {
                for &x in list {
                    next.push(base + x * stride);
                }
            }
            out = next;
        }
        out.sort_unstable();
        out
    }
}

fn cap(what: &str, limit: usize) -> Error {
    Error::CapExceeded {
        what: what.to_string(),
        limit,
    }
}

impl SmallCat for ProductIndex {
    fn num_objects(&self) -> usize {
        self.num_objects
    }
    fn num_morphisms(&self) -> usize {
        self.num_morphisms
    }
    fn dom(&self, m: usize) -> usize {
        let t: Vec<usize> = self
            .decode_morphism(m)
            .iter()
            .zip(&self.factors)
            .map(|(&x, f)| f.dom(x))
            .collect();
        self.encode_object(&t)
    }
    fn cod(&self, m: usize) -> usize {
        let t: Vec<usize> = self
            .decode_morphism(m)
            .iter()
            .zip(&self.factors)
            .map(|(&x, f)| f.cod(x))
            .collect();
        self.encode_object(&t)
    }
    fn identity(&self, o: usize) -> usize {
        let t: Vec<usize> = self
            .decode_object(o)
            .iter()
            .zip(&self.factors)
            .map(|(&x, f)| f.identity(x))
            .collect();
        self.encode_morphism(&t)
    }
    fn compose(&self, g: usize, f: usize) -> Option<usize> {
        let (gs, fs) = (self.decode_morphism(g), self.decode_morphism(f));
        let mut t = Vec::with_capacity(gs.len());
        for ((&a, &b), c) in gs.iter().zip(&fs).zip(&self.factors) {
            t.push(c.compose(a, b)?);
        }
        Some(self.encode_morphism(&t))
    }
    fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        let (ta, tb) = (self.decode_object(a), self.decode_object(b));
        let lists: Vec<Vec<usize>> = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.hom(ta[i], tb[i]))
            .collect();
        self.encode_all(&lists)
    }
    fn morphisms_from(&self, o: usize) -> Vec<usize> {
        let ta = self.decode_object(o);
        let lists: Vec<Vec<usize>> = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.morphisms_from(ta[i]))
            .collect();
        self.encode_all(&lists)
    }
    fn object_label(&self, o: usize) -> String {
        let t = self.decode_object(o);
        let parts: Vec<String> = t
            .iter()
            .zip(&self.factors)
            .map(|(&x, f)| f.object_label(x))
            .collect();
        format!("({})", parts.join(","))
    }
    fn morphism_label(&self, m: usize) -> String {
        let t = self.decode_morphism(m);
        let parts: Vec<String> = t
            .iter()
            .zip(&self.factors)
            .map(|(&x, f)| f.morphism_label(x))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// The shape of a diagram: either a finite category or a product of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Index {
    Fin(Arc<FinCat>),
    Product(Arc<ProductIndex>),
}

impl Index {
    pub fn as_small(&self) -> &dyn SmallCat {
        match self {
            Index::Fin(c) => c.as_ref(),
            Index::Product(p) => p.as_ref(),
        }
    }

    pub fn same_as(&self, other: &Index) -> bool {
        match (self, other) {
            (Index::Fin(a), Index::Fin(b)) => Arc::ptr_eq(a, b) || a == b,
            (Index::Product(a), Index::Product(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

/// Named diagram shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// `0 -> 1`.
    Interval,
    /// The n-fold power of the interval; object ids are bitmasks with axis `k` at bit `k-1`.
    Cube(usize),
    /// `0 < 1 < ... < n`.
    Ordinal(usize),
    /// The arrow category of `0 < ... < n`: objects `j<=i`.
    ArrowOrdinal(usize),
    Product(Vec<FinCat>),
}

pub fn build_index(shape: &Shape, limits: &Limits) -> Result<FinCat> {
    match shape {
        Shape::Interval => {
            FinCat::from_poset("interval", vec!["0".into(), "1".into()], |a, b| a <= b)
        }
        Shape::Cube(n) => cube(*n, limits),
        Shape::Ordinal(n) => {
            Limits::check("ordinal objects", n + 1, limits.max_objects)?;
            FinCat::from_poset(
                format!("ordinal({n})"),
                (0..=*n).map(|i| i.to_string()).collect(),
                |a, b| a <= b,
            )
        }
        Shape::ArrowOrdinal(n) => arrow_ordinal(*n, limits),
        Shape::Product(list) => product(list, limits),
    }
}

pub fn interval() -> FinCat {
    build_index(&Shape::Interval, &Limits::default()).expect("interval is valid")
}

/// Bitstring label of a cube vertex, axis 1 first.
pub fn mask_label(mask: usize, n: usize) -> String {
    (0..n)
        .map(|k| if mask >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn cube(n: usize, limits: &Limits) -> Result<FinCat> {
    Limits::check("cube dimension", n, limits.max_dim.max(12))?;
    let count = 1usize << n;
    Limits::check("cube objects", count, limits.max_objects)?;
    let labels = (0..count)
        .map(|m| {
            if n == 0 {
                "()".to_string()
            } else {
                mask_label(m, n)
            }
        })
        .collect();
    FinCat::from_poset(format!("cube({n})"), labels, |a, b| a & b == a)
}

/// Objects of `Ar<n>` in canonical order: `(j, i)` with `j <= i`, lexicographic.
pub fn arrow_ordinal_objects(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for j in 0..=n {
        for i in j..=n {
            v.push((j, i));
        }
    }
    v
}

fn arrow_ordinal(n: usize, limits: &Limits) -> Result<FinCat> {
    let objs = arrow_ordinal_objects(n);
    Limits::check("arrow category objects", objs.len(), limits.max_objects)?;
    let labels = objs.iter().map(|(j, i)| format!("{j}<={i}")).collect();
    FinCat::from_poset(format!("ar({n})"), labels, |a, b| {
        objs[a].0 <= objs[b].0 && objs[a].1 <= objs[b].1
    })
}

fn product(list: &[FinCat], limits: &Limits) -> Result<FinCat> {
    let p = ProductIndex::new(list.iter().cloned().map(Arc::new).collect(), limits)?;
    let objects = (0..p.num_objects()).map(|o| p.object_label(o)).collect();
    let morphisms = (0..p.num_morphisms())
        .map(|m| MorphismData {
            label: p.morphism_label(m),
            dom: p.dom(m),
            cod: p.cod(m),
        })
        .collect();
    let identities = (0..p.num_objects()).map(|o| p.identity(o)).collect();
    let mut compose = Vec::new();
    for f in 0..p.num_morphisms() {
        for g in p.morphisms_from(p.cod(f)) {
            compose.push((g, f, p.compose(g, f).expect("composable")));
        }
    }
    let names: Vec<&str> = list.iter().map(|c| c.name()).collect();
    FinCat::assemble(
        format!("product({})", names.join(",")),
        objects,
        morphisms,
        identities,
        compose,
    )
}

/// Discrete category on `n` objects.
pub fn discrete(n: usize) -> FinCat {
    FinCat::from_poset(
        format!("discrete({n})"),
        (0..n).map(|i| format!("x{i}")).collect(),
        |a, b| a == b,
    )
    .expect("discrete category is valid")
}

/// `b <- a -> c` with objects ordered `a, b, c`.
pub fn span() -> FinCat {
    FinCat::from_poset("span", vec!["a".into(), "b".into(), "c".into()], |x, y| {
        x == y || x == 0
    })
    .expect("span is valid")
}

/// Two parallel arrows `f, g: a => b`.
pub fn parallel_pair() -> FinCat {
    FinCat::new(
        "parallel",
        vec!["a".into(), "b".into()],
        vec![
            MorphismData {
                label: "id[a]".into(),
                dom: 0,
                cod: 0,
            },
            MorphismData {
                label: "id[b]".into(),
                dom: 1,
                cod: 1,
            },
            MorphismData {
                label: "f".into(),
                dom: 0,
                cod: 1,
            },
            MorphismData {
                label: "g".into(),
                dom: 0,
                cod: 1,
            },
        ],
        vec![0, 1],
        [],
    )
    .expect("parallel pair is valid")
}

/// A subcategory, as a set of morphism ids closed under composition and identities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subcategory {
    morphisms: BTreeSet<usize>,
}

impl Subcategory {
    /// Validates closure under identities and composition.
    pub fn new(cat: &FinCat, morphisms: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = morphisms.into_iter().collect();
        for &m in &set {
            if m >= cat.num_morphisms() {
                return malformed(format!("subcategory references unknown morphism {m}"));
            }
            for o in [cat.dom(m), cat.cod(m)] {
                if !set.contains(&cat.identity(o)) {
                    return malformed(format!(
                        "subcategory contains {} but not the identity of {}",
                        cat.morphism_label(m),
                        cat.object_label(o)
                    ));
                }
            }
        }
        for &f in &set {
            for &g in &set {
                if let Some(h) = cat.compose(g, f) {
                    if !set.contains(&h) {
                        return malformed(format!(
                            "subcategory is not closed: {} ∘ {} missing",
                            cat.morphism_label(g),
                            cat.morphism_label(f)
                        ));
                    }
                }
            }
        }
        Ok(Subcategory { morphisms: set })
    }

    /// The smallest subcategory containing the given morphisms.
    pub fn generated_by(cat: &FinCat, gens: impl IntoIterator<Item = usize>) -> Self {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        for m in gens {
            set.insert(m);
            set.insert(cat.identity(cat.dom(m)));
            set.insert(cat.identity(cat.cod(m)));
        }
        loop {
            let mut added = Vec::new();
            for &f in &set {
                for &g in &set {
                    if let Some(h) = cat.compose(g, f) {
                        if !set.contains(&h) {
                            added.push(h);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            set.extend(added);
        }
        Subcategory { morphisms: set }
    }

    /// The full subcategory on the given objects.
    pub fn full(cat: &FinCat, objects: &BTreeSet<usize>) -> Self {
        let morphisms = (0..cat.num_morphisms())
            .filter(|&m| objects.contains(&cat.dom(m)) && objects.contains(&cat.cod(m)))
            .collect();
        Subcategory { morphisms }
    }

    pub fn whole(cat: &FinCat) -> Self {
        Subcategory {
            morphisms: (0..cat.num_morphisms()).collect(),
        }
    }

    pub fn morphisms(&self) -> &BTreeSet<usize> {
        &self.morphisms
    }

    pub fn objects(&self, cat: &FinCat) -> BTreeSet<usize> {
        self.morphisms
            .iter()
            .filter(|&&m| cat.is_identity(m))
            .map(|&m| cat.dom(m))
            .collect()
    }

    pub fn intersect(&self, other: &Subcategory) -> Subcategory {
        Subcategory {
            morphisms: self
                .morphisms
                .intersection(&other.morphisms)
                .copied()
                .collect(),
        }
    }

    /// Materializes the subcategory; returns it with the maps new id -> old id.
    pub fn to_fincat(&self, cat: &FinCat) -> (FinCat, Vec<usize>, Vec<usize>) {
        let objs: Vec<usize> = self.objects(cat).into_iter().collect();
        let obj_new: BTreeMap<usize, usize> =
            objs.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mors: Vec<usize> = self.morphisms.iter().copied().collect();
        let mor_new: BTreeMap<usize, usize> =
            mors.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let morphisms = mors
            .iter()
            .map(|&m| MorphismData {
                label: cat.morphism_label(m),
                dom: obj_new[&cat.dom(m)],
                cod: obj_new[&cat.cod(m)],
            })
            .collect();
        let identities = objs.iter().map(|&o| mor_new[&cat.identity(o)]).collect();
        let mut compose = Vec::new();
        for &f in &mors {
            for &g in &mors {
                if let Some(h) = cat.compose(g, f) {
                    compose.push((mor_new[&g], mor_new[&f], mor_new[&h]));
                }
            }
        }
        let labels = objs.iter().map(|&o| cat.object_label(o)).collect();
        let sub = FinCat::assemble(
            format!("{}|sub", cat.name()),
            labels,
            morphisms,
            identities,
            compose,
        )
        .expect("a closed subcategory of a valid category is valid");
        (sub, objs, mors)
    }
}

/// JSON form of a finite category: objects as strings, morphisms as `{id, dom, cod}`,
/// composition as explicit `(g, f) -> h` entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCatJson {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismJson>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<CompositionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionJson {
    pub g: String,
    pub f: String,
    pub result: String,
}

impl FinCat {
    pub fn to_json(&self) -> FinCatJson {
        let mor = |m: usize| self.morphisms[m].label.clone();
        FinCatJson {
            name: self.name.clone(),
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismJson {
                    id: m.label.clone(),
                    dom: self.objects[m.dom].clone(),
                    cod: self.objects[m.cod].clone(),
                })
                .collect(),
            identities: self
                .identities
                .iter()
                .enumerate()
                .map(|(o, &m)| (self.objects[o].clone(), mor(m)))
                .collect(),
            compose: self
                .composition_entries()
                .into_iter()
                .filter(|&(g, f, _)| !self.is_identity(g) && !self.is_identity(f))
                .map(|(g, f, h)| CompositionJson {
                    g: mor(g),
                    f: mor(f),
                    result: mor(h),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FinCatJson) -> Result<Self> {
        let obj: HashMap<&str, usize> = j
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        if obj.len() != j.objects.len() {
            return malformed("duplicate object names");
        }
        let mor: HashMap<&str, usize> = j
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), i))
            .collect();
        if mor.len() != j.morphisms.len() {
            return malformed("duplicate morphism ids");
        }
        let look_o = |s: &str| {
            obj.get(s)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("unknown object {s}")))
        };
        let look_m = |s: &str| {
            mor.get(s)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("unknown morphism {s}")))
        };
        let morphisms = j
            .morphisms
            .iter()
            .map(|m| {
                Ok(MorphismData {
                    label: m.id.clone(),
                    dom: look_o(&m.dom)?,
                    cod: look_o(&m.cod)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut identities = vec![usize::MAX; j.objects.len()];
        for (o, m) in &j.identities {
            identities[look_o(o)?] = look_m(m)?;
        }
        if identities.contains(&usize::MAX) {
            return malformed("every object needs an identity");
        }
        let compose = j
            .compose
            .iter()
            .map(|c| Ok((look_m(&c.g)?, look_m(&c.f)?, look_m(&c.result)?)))
            .collect::<Result<Vec<_>>>()?;
        FinCat::new(
            j.name.clone(),
            j.objects.clone(),
            morphisms,
            identities,
            compose,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_has_one_non_identity_arrow() {
        let i = interval();
        assert_eq!(i.num_objects(), 2);
        assert_eq!(i.num_morphisms(), 3);
        assert_eq!(i.hom(0, 1).len(), 1);
        assert!(i.hom(1, 0).is_empty());
    }

    #[test]
    fn cube_zero_is_terminal_category() {
        let c = build_index(&Shape::Cube(0), &Limits::default()).unwrap();
        assert_eq!((c.num_objects(), c.num_morphisms()), (1, 1));
    }

    #[test]
    fn cube_n_has_two_to_the_n_objects() {
        for n in 0..5 {
            let c = build_index(&Shape::Cube(n), &Limits::default()).unwrap();
            assert_eq!(c.num_objects(), 1 << n);
            assert_eq!(c.num_morphisms(), 3usize.pow(n as u32));
        }
    }

    #[test]
    fn arrow_ordinal_two_matches_enumerated_pairs() {
        // brute force: all pairs (j, i) over {0,1,2} with j <= i
        let mut pairs = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                if j <= i {
                    pairs.push(format!("{j}<={i}"));
                }
            }
        }
        let ar = build_index(&Shape::ArrowOrdinal(2), &Limits::default()).unwrap();
        assert_eq!(ar.objects(), pairs.as_slice());
        assert_eq!(ar.num_objects(), 6);
    }

    #[test]
    fn product_of_intervals_is_the_square() {
        let p = build_index(
            &Shape::Product(vec![interval(), interval()]),
            &Limits::default(),
        )
        .unwrap();
        let c = build_index(&Shape::Cube(2), &Limits::default()).unwrap();
        assert_eq!(p.num_objects(), c.num_objects());
        assert_eq!(p.num_morphisms(), c.num_morphisms());
        p.validate().unwrap();
    }

    #[test]
    fn size_cap_is_a_hard_error() {
        let limits = Limits {
            max_objects: 10,
            ..Limits::default()
        };
        assert!(matches!(
            build_index(&Shape::Cube(4), &limits),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn subcategory_closure_is_checked() {
        let c = build_index(&Shape::Ordinal(2), &Limits::default()).unwrap();
        let f = c.morphism_id("0->1").unwrap();
        let g = c.morphism_id("1->2").unwrap();
        let ids: Vec<usize> = c.identities().to_vec();
        let mut gens = ids.clone();
        gens.extend([f, g]);
        assert!(Subcategory::new(&c, gens.clone()).is_err());
        let closed = Subcategory::generated_by(&c, [f, g]);
        assert!(closed.morphisms().contains(&c.morphism_id("0->2").unwrap()));
        assert!(Subcategory::new(&c, closed.morphisms().iter().copied()).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let c = build_index(&Shape::ArrowOrdinal(2), &Limits::default()).unwrap();
        let back = FinCat::from_json(&c.to_json()).unwrap();
        assert_eq!(back.objects(), c.objects());
        assert_eq!(back.composition_entries(), c.composition_entries());
    }

    #[test]
    fn broken_associativity_is_rejected() {
        // one object, morphisms id, a, b with a∘a = b, a∘b = a, b∘a = b, b∘b = b
        let ms = vec![
            MorphismData {
                label: "id".into(),
                dom: 0,
                cod: 0,
            },
            MorphismData {
                label: "a".into(),
                dom: 0,
                cod: 0,
            },
            MorphismData {
                label: "b".into(),
                dom: 0,
                cod: 0,
            },
        ];
        let r = FinCat::new(
            "bad",
            vec!["x".into()],
            ms,
            vec![0],
            [(1, 1, 2), (1, 2, 1), (2, 1, 2), (2, 2, 2)],
        );
        assert!(r.is_err());
    }
}

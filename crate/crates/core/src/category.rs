//! The oracle interface for target categories and their Waldhausen structure.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Bounds shared by object and morphism values.
pub trait Value: Clone + Eq + Ord + Hash + Debug + Send + Sync + 'static {}
impl<T: Clone + Eq + Ord + Hash + Debug + Send + Sync + 'static> Value for T {}

/// A pushout `B -> P <- C` of a span `B <-f- A -g-> C`, with whatever the
/// category needs to factor cocones through it.
pub struct Pushout<C: Category + ?Sized> {
    pub object: C::Obj,
    /// `B -> P`.
    pub left: C::Mor,
    /// `C -> P`.
    pub right: C::Mor,
    pub witness: C::Witness,
}

/// A category accessed through an oracle. It may be infinite; `objects` only
/// enumerates a bounded skeleton.
pub trait Category: Send + Sync + 'static {
    type Obj: Value;
    type Mor: Value;
    type Witness: Clone + Debug + Send + Sync;

    fn name(&self) -> String;
    fn dom(&self, f: &Self::Mor) -> Self::Obj;
    fn cod(&self, f: &Self::Mor) -> Self::Obj;
    fn identity(&self, a: &Self::Obj) -> Self::Mor;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor>;
    fn is_iso(&self, f: &Self::Mor) -> bool;
    /// The bounded skeleton, in canonical order.
    fn objects(&self) -> Result<Vec<Self::Obj>>;
    /// Every morphism `a -> b`, in canonical order.
    fn hom(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Vec<Self::Mor>>;
    /// The pushout of `B <-f- A -g-> C`, or `None` when the category does not
    /// provide this one.
    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Result<Option<Pushout<Self>>>;
    /// The unique `P -> Z` with `m ∘ left = u` and `m ∘ right = v`.
    fn pushout_factor(&self, p: &Pushout<Self>, u: &Self::Mor, v: &Self::Mor) -> Result<Self::Mor>;
    /// Injective text label of an object.
    fn obj_label(&self, a: &Self::Obj) -> String;
    /// Injective text label of a morphism.
    fn mor_label(&self, f: &Self::Mor) -> String;

    fn is_identity(&self, f: &Self::Mor) -> bool {
        *f == self.identity(&self.dom(f))
    }

    fn compose_all(&self, chain: &[Self::Mor]) -> Result<Self::Mor> {
        // chain is in application order: chain[0] first
        let mut it = chain.iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Malformed("empty composite".into()))?
            .clone();
        it.try_fold(first, |acc, g| self.compose(g, &acc))
    }

    /// An isomorphism `a -> b` if one exists.
    fn find_iso(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Option<Self::Mor>> {
        Ok(self.hom(a, b)?.into_iter().find(|f| self.is_iso(f)))
    }

    /// An isomorphism `φ: x -> y` with `φ ∘ xs[i] = ys[i]` for every i. Used to compare
    /// colimits up to canonical isomorphism.
    fn find_iso_under(
        &self,
        x: &Self::Obj,
        y: &Self::Obj,
        xs: &[Self::Mor],
        ys: &[Self::Mor],
    ) -> Result<Option<Self::Mor>> {
        for phi in self.hom(x, y)? {
            if !self.is_iso(&phi) {
                continue;
            }
            let mut ok = true;
            for (a, b) in xs.iter().zip(ys) {
                if self.compose(&phi, a)? != *b {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(phi));
            }
        }
        Ok(None)
    }
}

impl<C: Category + ?Sized> Clone for Pushout<C> {
    fn clone(&self) -> Self {
        Pushout {
            object: self.object.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
            witness: self.witness.clone(),
        }
    }
}

impl<C: Category + ?Sized> Debug for Pushout<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pushout")
            .field("object", &self.object)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

/// Categories with all finite coproducts and coequalizers.
pub trait Cocomplete: Category {
    /// The coproduct with its injections.
    fn coproduct(&self, objects: &[Self::Obj]) -> Result<(Self::Obj, Vec<Self::Mor>)>;
    /// The map out of `coproduct(summands)` restricting to `maps[i]` on summand i.
    fn copair(
        &self,
        summands: &[Self::Obj],
        maps: &[Self::Mor],
        target: &Self::Obj,
    ) -> Result<Self::Mor>;
    /// Coequalizer of `f, g: A => B` as a quotient `q: B -> Q` and a section `s: Q -> B`
    /// with `q ∘ s = id`; any `h` coequalizing `f, g` factors as `(h ∘ s) ∘ q`.
    fn coequalizer(&self, f: &Self::Mor, g: &Self::Mor) -> Result<Coequalizer<Self>>;
}

#[derive(Debug, Clone)]
pub struct Coequalizer<C: Category + ?Sized> {
    pub object: C::Obj,
    pub quotient: C::Mor,
    pub section: C::Mor,
}

/// Witness for pushouts built from a coproduct and a coequalizer.
#[derive(Debug, Clone)]
pub struct CoeqWitness<O, M> {
    pub summands: [O; 2],
    pub section: M,
}

/// Pushout as the coequalizer of `in_B ∘ f, in_C ∘ g: A => B ⊔ C`.
pub fn pushout_via_coequalizer<C>(cat: &C, f: &C::Mor, g: &C::Mor) -> Result<Pushout<C>>
where
    C: Cocomplete<Witness = CoeqWitness<<C as Category>::Obj, <C as Category>::Mor>>,
{
    if cat.dom(f) != cat.dom(g) {
        return Err(Error::Malformed("pushout legs must share a domain".into()));
    }
    let summands = [cat.cod(f), cat.cod(g)];
    let (_, inj) = cat.coproduct(&summands)?;
    let a = cat.compose(&inj[0], f)?;
    let b = cat.compose(&inj[1], g)?;
    let q = cat.coequalizer(&a, &b)?;
    Ok(Pushout {
        left: cat.compose(&q.quotient, &inj[0])?,
        right: cat.compose(&q.quotient, &inj[1])?,
        object: q.object,
        witness: CoeqWitness {
            summands,
            section: q.section,
        },
    })
}

pub fn pushout_factor_via_coequalizer<C>(
    cat: &C,
    p: &Pushout<C>,
    u: &C::Mor,
    v: &C::Mor,
) -> Result<C::Mor>
where
    C: Cocomplete<Witness = CoeqWitness<<C as Category>::Obj, <C as Category>::Mor>>,
{
    let z = cat.cod(u);
    let h = cat.copair(&p.witness.summands, &[u.clone(), v.clone()], &z)?;
    cat.compose(&h, &p.witness.section)
}

/// A Waldhausen category: cofibrations, weak equivalences and a chosen zero object.
pub trait Waldhausen: Category {
    fn zero(&self) -> Self::Obj;
    /// The unique map `0 -> a`.
    fn from_zero(&self, a: &Self::Obj) -> Self::Mor;
    /// The unique map `a -> 0`.
    fn to_zero(&self, a: &Self::Obj) -> Self::Mor;
    fn is_cofibration(&self, f: &Self::Mor) -> bool;
    fn is_weq(&self, f: &Self::Mor) -> bool;

    fn is_zero(&self, a: &Self::Obj) -> bool {
        *a == self.zero()
    }
}

/// How an equation "F(A) = 0" is read: strict equality with the chosen zero, or
/// isomorphism to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum ZeroTest {
    #[default]
    Strict,
    UpToIso,
}

impl ZeroTest {
    pub fn holds<C: Waldhausen>(self, cat: &C, a: &C::Obj) -> bool {
        match self {
            ZeroTest::Strict => cat.is_zero(a),
            ZeroTest::UpToIso => cat.is_zero(a) || cat.is_iso(&cat.to_zero(a)),
        }
    }
}

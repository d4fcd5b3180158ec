//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use waldcat_core::colimit::{colimit, restrict, restricted_colimit_cube};
use waldcat_core::cubes::{check_good_pushouts, enumerate_cubes, southern_arrow};
use waldcat_core::diagram::Diagram;
use waldcat_core::enumerate::{enumerate_functors, Filters};
use waldcat_core::finwald::{materialize, FinWald, Materialized};
use waldcat_core::homwald::{
    build_hom, check_closed_axioms, curry, enumerate_k_exact, evaluation, uncurry,
};
use waldcat_core::index::{
    build_index, discrete, interval, parallel_pair, span, FinCat, Index, Shape, SmallCat,
    Subcategory,
};
use waldcat_core::k0::k0_presentation;
use waldcat_core::multiexact::{
    check_k_exact, compose_multi, composition_good_instance, lists_product, product_index, smash,
    ExactMode, MultiFunctor,
};
use waldcat_core::pointed::{PMap, PointedSets};
use waldcat_core::sdot::{check_p, check_pairing, truncation};
use waldcat_core::vect::{rank, VectFp};
use waldcat_core::wald::check_wald_axioms;
use waldcat_core::{Category, Limits};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn limits() -> Limits {
    Limits::default()
}

fn p(n: usize) -> PointedSets {
    PointedSets::new(n)
}

fn mat(n: usize) -> Materialized<PointedSets> {
    materialize(&p(n), &limits()).expect("small pointed sets materialize")
}

fn within(what: &str, t: Duration, budget: Duration) -> Result<(), String> {
    ensure!(
        t < budget,
        "{what} took {:.1}s, budget {:.0}s",
        t.as_secs_f64(),
        budget.as_secs_f64()
    );
    Ok(())
}

fn fin(c: FinCat) -> Index {
    Index::Fin(Arc::new(c))
}

fn all_diagrams(cat: &PointedSets, index: &Index) -> Vec<Diagram<PointedSets>> {
    enumerate_functors(cat, index, &Filters::default(), &limits())
        .expect("diagram enumeration fits the caps")
}

// 1

fn wald_axioms() -> Outcome {
    let budget = Duration::from_secs(10);
    let mut names = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut run = |name: String, check: &dyn Fn() -> Result<bool, String>| -> Result<(), String> {
        let t = Instant::now();
        ensure!(check()?, "axioms fail on {name}");
        let dt = t.elapsed();
        within(&name, dt, budget)?;
        slowest = slowest.max(dt);
        names.push(name);
        Ok(())
    };
    for n in 1..=3 {
        run(format!("finset_pointed({n})"), &|| {
            Ok(ok(check_wald_axioms(&p(n), &limits()))?.holds())
        })?;
    }
    for n in 0..=3 {
        run(format!("nstar({n})"), &|| {
            Ok(ok(check_wald_axioms(&PointedSets::nstar(n), &limits()))?.holds())
        })?;
    }
    for d in 0..=2 {
        run(format!("vect_fp(2,{d})"), &|| {
            Ok(ok(check_wald_axioms(&ok(VectFp::new(2, d))?, &limits()))?.holds())
        })?;
    }
    Ok(format!(
        "{} categories, slowest {:.2}s",
        names.len(),
        slowest.as_secs_f64()
    ))
}

// 2

/// Every compatible family of maps `d(o) -> t`, by backtracking over index objects.
fn cocones(cat: &PointedSets, d: &Diagram<PointedSets>, t: u32) -> Vec<Vec<PMap>> {
    let s = d.small();
    let homs: Vec<Vec<PMap>> = (0..s.num_objects())
        .map(|o| cat.hom(d.obj(o), &t).unwrap())
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<PMap> = Vec::new();
    fn go(
        cat: &PointedSets,
        d: &Diagram<PointedSets>,
        homs: &[Vec<PMap>],
        cur: &mut Vec<PMap>,
        out: &mut Vec<Vec<PMap>>,
    ) {
        let s = d.small();
        let o = cur.len();
        if o == homs.len() {
            out.push(cur.clone());
            return;
        }
        for f in &homs[o] {
            cur.push(f.clone());
            let fits = (0..s.num_morphisms()).all(|m| {
                let (a, b) = (s.dom(m), s.cod(m));
                a.max(b) != o || cat.compose(&cur[b], d.mor(m)).unwrap() == cur[a]
            });
            if fits {
                go(cat, d, homs, cur, out);
            }
            cur.pop();
        }
    }
    go(cat, d, &homs, &mut cur, &mut out);
    out
}

fn colimit_formula() -> Outcome {
    let cat = p(3);
    let shapes = vec![
        discrete(1),
        discrete(2),
        discrete(3),
        discrete(4),
        interval(),
        span(),
        parallel_pair(),
        ok(build_index(&Shape::Ordinal(2), &limits()))?,
        ok(build_index(&Shape::Ordinal(3), &limits()))?,
        ok(build_index(&Shape::Cube(2), &limits()))?,
    ];
    let mut diagrams = 0;
    let mut factorizations = 0;
    for shape in shapes {
        let name = shape.name().to_string();
        let index = fin(shape);
        for d in all_diagrams(&cat, &index) {
            diagrams += 1;
            let c = ok(colimit(&cat, &d))?;
            let s = d.small();
            let labels = || d.object_labels(&cat).join(",");
            for m in 0..s.num_morphisms() {
                ensure!(
                    cat.compose(&c.legs[s.cod(m)], d.mor(m)).unwrap() == c.legs[s.dom(m)],
                    "{name} [{}]: legs are not a cocone",
                    labels()
                );
            }
            // maps into S⁰ are subsets of the non-basepoint points
            let into_s0 = cocones(&cat, &d, 1).len();
            ensure!(
                into_s0 == 1usize << c.object,
                "{name} [{}]: {into_s0} cocones into S0 but colimit has {} points",
                labels(),
                c.object
            );
            for t in 1..=2u32 {
                let family = cocones(&cat, &d, t);
                let mut hits: HashMap<Vec<PMap>, usize> = HashMap::new();
                for h in cat.hom(&c.object, &t).unwrap() {
                    let restricted: Vec<PMap> =
                        c.legs.iter().map(|l| cat.compose(&h, l).unwrap()).collect();
                    *hits.entry(restricted).or_default() += 1;
                }
                ensure!(
                    hits.len() == family.len(),
                    "{name} [{}]: {} cocones into {t}, {} maps out of the colimit",
                    labels(),
                    family.len(),
                    hits.len()
                );
                for k in &family {
                    ensure!(
                        hits.get(k) == Some(&1),
                        "{name} [{}]: a cocone into {t} does not factor uniquely",
                        labels()
                    );
                    let h = ok(c.factor(&cat, &t, k))?;
                    let back: Vec<PMap> =
                        c.legs.iter().map(|l| cat.compose(&h, l).unwrap()).collect();
                    ensure!(
                        &back == k,
                        "{name} [{}]: factor() returned the wrong map",
                        labels()
                    );
                    factorizations += 1;
                }
            }
        }
    }
    ensure!(diagrams >= 500, "only {diagrams} diagrams");
    Ok(format!(
        "{diagrams} diagrams, {factorizations} cocones factored uniquely"
    ))
}

// 3

/// Every subcategory, as the closure of each subset of morphisms.
fn subcategories(c: &FinCat) -> Vec<Subcategory> {
    let n = c.num_morphisms();
    assert!(n <= 12, "too many morphisms to enumerate subsets");
    let all: BTreeSet<Subcategory> = (0u32..1 << n)
        .map(|bits| Subcategory::generated_by(c, (0..n).filter(|&m| bits >> m & 1 == 1)))
        .collect();
    all.into_iter().collect()
}

/// Multisets of 1 to 3 subcategories whose union is everything.
fn covers(c: &FinCat) -> Vec<Vec<Subcategory>> {
    let subs = subcategories(c);
    let whole = Subcategory::whole(c);
    let covers_all = |cs: &[&Subcategory]| {
        let u: BTreeSet<usize> = cs
            .iter()
            .flat_map(|s| s.morphisms().iter().copied())
            .collect();
        &u == whole.morphisms()
    };
    let mut out = Vec::new();
    for i in 0..subs.len() {
        if covers_all(&[&subs[i]]) {
            out.push(vec![subs[i].clone()]);
        }
        for j in i..subs.len() {
            if covers_all(&[&subs[i], &subs[j]]) {
                out.push(vec![subs[i].clone(), subs[j].clone()]);
            }
            for k in j..subs.len() {
                if covers_all(&[&subs[i], &subs[j], &subs[k]]) {
                    out.push(vec![subs[i].clone(), subs[j].clone(), subs[k].clone()]);
                }
            }
        }
    }
    out
}

fn pushout_lemma() -> Outcome {
    let l = limits();
    let mut cubes = 0;
    let check = |d: &Diagram<PointedSets>,
                 cat: &PointedSets,
                 cover: &[Subcategory],
                 what: &str|
     -> Result<(), String> {
        let cube = ok(restricted_colimit_cube(cat, d, cover))?;
        let s = ok(southern_arrow(cat, &cube))?;
        ensure!(
            cat.is_iso(&s),
            "{what} [{}]: southern arrow {} is not invertible",
            d.object_labels(cat).join(","),
            cat.mor_label(&s)
        );
        Ok(())
    };
    let small = [
        (discrete(2), 3),
        (interval(), 3),
        (span(), 3),
        (parallel_pair(), 3),
        (ok(build_index(&Shape::Ordinal(2), &l))?, 3),
        (ok(build_index(&Shape::Cube(2), &l))?, 2),
        (ok(build_index(&Shape::Ordinal(3), &l))?, 2),
    ];
    for (shape, size) in small {
        let cat = p(size);
        let cs = covers(&shape);
        let name = shape.name().to_string();
        let index = fin(shape);
        let ds = all_diagrams(&cat, &index);
        cs.par_iter().try_for_each(|cover| {
            let what = format!("{name} with {} covers", cover.len());
            ds.iter().try_for_each(|d| check(d, &cat, cover, &what))
        })?;
        cubes += cs.len() * ds.len();
    }
    // punctured 3-cubes: the two-piece cover used for southern arrows, and the three lower faces
    let cat = p(2);
    let cube3 = ok(build_index(&Shape::Cube(3), &l))?;
    let full = 7;
    let punctured = Subcategory::full(&cube3, &(0..full).collect());
    let (pc, objs, _) = punctured.to_fincat(&cube3);
    let keep = |pred: &dyn Fn(usize) -> bool| {
        Subcategory::full(&pc, &(0..objs.len()).filter(|&i| pred(objs[i])).collect())
    };
    let special = vec![
        vec![keep(&|m| m != 3), keep(&|m| m & 4 == 0)],
        (0..3).map(|k| keep(&|m| m >> k & 1 == 0)).collect(),
    ];
    for cube in ok(enumerate_cubes(&cat, 3, &l))? {
        let d = ok(cube.to_diagram(&cat, &l))?;
        let Index::Fin(idx) = &d.index else {
            return Err("cubes should have finite indices".into());
        };
        let pd = restrict(&d, idx, &punctured);
        for cover in &special {
            check(&pd, &cat, cover, "punctured 3-cube")?;
            cubes += 1;
        }
    }
    Ok(format!("{cubes} restricted colimit cubes"))
}

// 4

fn cofinality() -> Outcome {
    let l = limits();
    let bases = vec![
        discrete(1),
        discrete(2),
        discrete(3),
        interval(),
        span(),
        parallel_pair(),
        ok(build_index(&Shape::Ordinal(2), &l))?,
    ];
    let shapes = vec![interval(), ok(build_index(&Shape::Ordinal(2), &l))?];
    let mut checked = 0;
    for a in &bases {
        for dshape in &shapes {
            let star = dshape.terminal_object().ok_or("no terminal object")?;
            let prod = ok(build_index(
                &Shape::Product(vec![a.clone(), dshape.clone()]),
                &l,
            ))?;
            let na = a.num_objects();
            let slice: BTreeSet<usize> = (0..na).map(|x| x + na * star).collect();
            let sub = Subcategory::full(&prod, &slice);
            let (_, objs, _) = sub.to_fincat(&prod);
            let size = if prod.num_objects() <= 4 { 3 } else { 2 };
            let cat = p(size);
            let idx = Arc::new(prod.clone());
            for d in all_diagrams(&cat, &Index::Fin(idx.clone())) {
                let c = ok(colimit(&cat, &d))?;
                let r = ok(colimit(&cat, &restrict(&d, &idx, &sub)))?;
                let cocone: Vec<PMap> = objs.iter().map(|&o| c.legs[o].clone()).collect();
                let phi = ok(r.factor(&cat, &c.object, &cocone))?;
                let what = || {
                    format!(
                        "{} x {} [{}]",
                        a.name(),
                        dshape.name(),
                        d.object_labels(&cat).join(",")
                    )
                };
                ensure!(
                    cat.is_iso(&phi),
                    "{}: comparison {} is not invertible",
                    what(),
                    cat.mor_label(&phi)
                );
                for (i, leg) in r.legs.iter().enumerate() {
                    ensure!(
                        cat.compose(&phi, leg).unwrap() == cocone[i],
                        "{}: comparison does not commute with legs",
                        what()
                    );
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} product diagrams"))
}

// 5

/// Pointed maps from `a` to `b` points that are injective, counted by brute force.
fn injections(a: u32, b: u32) -> usize {
    lists_product(&vec![(0..=b as usize).collect::<Vec<_>>(); a as usize])
        .into_iter()
        .filter(|img| {
            let nonzero: BTreeSet<usize> = img.iter().copied().filter(|&x| x != 0).collect();
            nonzero.len() == a as usize
        })
        .count()
}

fn good_pushouts() -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    for size in 1..=3usize {
        let objects = size as u32;
        let arrows: usize = (0..objects)
            .flat_map(|a| (0..objects).map(move |b| injections(a, b)))
            .sum();
        for n in 0..=2 {
            let r = ok(check_good_pushouts(&p(size), n, &limits()))?;
            ensure!(
                r.failures.is_empty(),
                "finset_pointed({size}) n={n}: {}",
                r.failures[0]
            );
            match n {
                0 => ensure!(
                    r.good_cubes == size,
                    "finset_pointed({size}): {} good points, expected {size}",
                    r.good_cubes
                ),
                1 => ensure!(
                    r.good_cubes == arrows,
                    "finset_pointed({size}): {} good arrows, expected {arrows}",
                    r.good_cubes
                ),
                _ => {}
            }
            triples += r.triples;
        }
    }
    within("good pushouts", start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{triples} good triples"))
}

// 6

fn restricted_three() -> Outcome {
    let l = limits();
    let mut functors = 0;
    for k in 0..=2usize {
        for sizes in lists_product(&vec![vec![1, 2]; k]) {
            let srcs: Vec<Arc<FinWald>> = sizes.iter().map(|&s| mat(s).wald.clone()).collect();
            for target in 1..=2 {
                let t = Arc::new(p(target));
                let index = ok(product_index(&srcs, &l))?;
                let ds = ok(enumerate_functors(
                    t.as_ref(),
                    &Index::Product(index),
                    &Filters::default(),
                    &l,
                ))?;
                let mut exact = 0;
                for (i, d) in ds.into_iter().enumerate() {
                    let f = ok(MultiFunctor::from_diagram(
                        format!("F{i}"),
                        srcs.clone(),
                        t.clone(),
                        d,
                    ))?;
                    let full = ok(check_k_exact(&f, ExactMode::Full))?.exact();
                    let reduced = ok(check_k_exact(&f, ExactMode::Reduced))?.exact();
                    ensure!(
                        full == reduced,
                        "{sizes:?} -> {target}, F{i}: full {full}, reduced {reduced}"
                    );
                    exact += usize::from(full);
                    functors += 1;
                }
                // the zero functor and the identity
                if sizes == [2] && target == 2 {
                    ensure!(
                        exact == 2,
                        "expected 2 exact endofunctors of finset_pointed(2), found {exact}"
                    );
                }
            }
        }
    }
    Ok(format!("{functors} functors, verdicts agree"))
}

// 7

fn composites() -> Outcome {
    let l = limits();
    let m2 = mat(2);
    let src = m2.wald.clone();
    let pool: Vec<Vec<MultiFunctor<FinWald>>> = (0..=3)
        .map(|k| ok(enumerate_k_exact(&vec![src.clone(); k], src.clone(), &l)))
        .collect::<Result<_, _>>()?;
    // wider targets through the smash product
    let m3 = mat(3);
    let wide = ok(ok(smash(&[&m2, &m3], Arc::new(p(3)), &l))?.into_fin(&m3))?;
    let mut composites = 0;
    let mut instances = 0;
    let mut check =
        |f: &MultiFunctor<FinWald>, gs: &[MultiFunctor<FinWald>]| -> Result<(), String> {
            let h = ok(compose_multi(f, gs, &l))?;
            let r = ok(check_k_exact(&h, ExactMode::Full))?;
            ensure!(r.exact(), "{} is not exact: {}", h.name, r.witnesses[0]);
            let cofs: Vec<Vec<usize>> = h.sources.iter().map(|s| s.cofibrations()).collect();
            for t in lists_product(&cofs) {
                ensure!(
                    ok(composition_good_instance(f, gs, &h, &t))?,
                    "{}: southern arrows differ at {t:?}",
                    h.name
                );
                instances += 1;
            }
            composites += 1;
            Ok(())
        };
    for k in 1..=3usize {
        for f in &pool[k] {
            for arities in lists_product(&vec![(0..=3).collect::<Vec<_>>(); k]) {
                if arities.iter().sum::<usize>() > 3 {
                    continue;
                }
                let choices: Vec<Vec<usize>> = arities
                    .iter()
                    .map(|&a| (0..pool[a].len()).collect())
                    .collect();
                for pick in lists_product(&choices) {
                    let gs: Vec<MultiFunctor<FinWald>> = arities
                        .iter()
                        .zip(&pick)
                        .map(|(&a, &i)| pool[a][i].clone())
                        .collect();
                    check(f, &gs)?;
                }
            }
        }
    }
    let into_p3: Vec<MultiFunctor<FinWald>> = (0..=1)
        .map(|k| {
            ok(enumerate_k_exact(
                &vec![src.clone(); k],
                m3.wald.clone(),
                &l,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?
        .concat();
    for g in pool[1].iter().chain(&pool[2]) {
        for g2 in &into_p3 {
            check(&wide, &[g.clone(), g2.clone()])?;
        }
    }
    Ok(format!(
        "{composites} composites exact, {instances} box instances agree"
    ))
}

// 8

fn closed_structure() -> Outcome {
    let l = limits();
    let target = Arc::new(p(2));
    let mut homs = 0;
    let mut round_trips = 0;
    let mut squares = 0;
    for k in 1..=2usize {
        for sizes in lists_product(&vec![vec![1, 2]; k]) {
            let srcs: Vec<Arc<FinWald>> = sizes.iter().map(|&s| mat(s).wald.clone()).collect();
            let h = ok(build_hom(&srcs, target.clone(), &l))?;
            ensure!(
                ok(check_wald_axioms(h.cat.as_ref(), &l))?.holds(),
                "Hom{sizes:?} fails W1-W5"
            );
            let m = ok(h.materialize(&l))?;
            let ev = ok(evaluation(&h, &m, &l))?;
            ensure!(ev.arity() == k + 1, "ev has arity {}", ev.arity());
            let r = ok(check_k_exact(&ev, ExactMode::Full))?;
            ensure!(
                r.exact(),
                "ev on Hom{sizes:?} is not exact: {}",
                r.witnesses[0]
            );
            homs += 1;
            if sizes == [2] {
                ensure!(
                    m.wald.num_objects() == 2,
                    "Hom(P2;P2) has {} objects, expected 2",
                    m.wald.num_objects()
                );
            }
            for lsz in 1..=2usize {
                let mids: Vec<Arc<FinWald>> = vec![mat(2).wald.clone(); lsz];
                let all: Vec<Arc<FinWald>> = srcs.iter().chain(&mids).cloned().collect();
                for f in ok(enumerate_k_exact(&all, target.clone(), &l))? {
                    let c = ok(curry(&f, &h, &m, &l))?;
                    ensure!(
                        ok(uncurry(&c, &ev, &l))?.same_as(&f),
                        "uncurry(curry({})) differs",
                        f.name
                    );
                    round_trips += 1;
                }
                let rep = ok(check_closed_axioms(&srcs, &mids, target.clone(), &l))?;
                ensure!(rep.cm1.is_empty(), "CM1 on {sizes:?};{lsz}: {}", rep.cm1[0]);
                ensure!(rep.cm2.is_empty(), "CM2 on {sizes:?};{lsz}: {}", rep.cm2[0]);
                ensure!(
                    rep.functors == rep.curried,
                    "{} functors but {} into the hom",
                    rep.functors,
                    rep.curried
                );
                squares += rep.cm2_checked;
            }
        }
    }
    Ok(format!(
        "{homs} homs, {round_trips} round trips, {squares} CM2 squares"
    ))
}

// 9

fn factorial(n: u32) -> usize {
    (1..=n as usize).product()
}

/// `|S_n|` for pointed sets: a chain of injections `A_{0,1} ↣ ... ↣ A_{0,n}`, and
/// for every `1 <= j < i <= n` a choice of quotient `A_{j,i}`, which is free up to
/// the `(a_i - a_j)!` automorphisms of the canonical one.
fn sn_size(objects: u32, n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    lists_product(&vec![(0..objects as usize).collect::<Vec<_>>(); n])
        .into_iter()
        .map(|a| {
            let a: Vec<u32> = a.into_iter().map(|x| x as u32).collect();
            let arrows: usize = a.windows(2).map(|w| injections(w[0], w[1])).product();
            let quotients: usize = (0..n)
                .flat_map(|j| (j + 1..n).map(move |i| (j, i)))
                .map(|(j, i)| {
                    if a[i] >= a[j] {
                        factorial(a[i] - a[j])
                    } else {
                        0
                    }
                })
                .product();
            arrows * quotients
        })
        .sum()
}

fn sdot_layer() -> Outcome {
    let l = limits();
    let mut identities = 0;
    let mut rho = 0;
    for size in 1..=3usize {
        let cat = p(size);
        let t = ok(truncation(&cat, 3, &l))?;
        for (n, level) in t.levels.iter().enumerate() {
            let want = sn_size(size as u32, n);
            ensure!(
                level.len() == want,
                "S_{n} of finset_pointed({size}) has {} objects, expected {want}",
                level.len()
            );
        }
        let (checked, failures) = t.identity_failures();
        ensure!(
            failures.is_empty(),
            "finset_pointed({size}): {}",
            failures[0]
        );
        identities += checked;
        let r = ok(check_p(&cat, 3, &l))?;
        ensure!(
            r.failures.is_empty(),
            "rho on finset_pointed({size}): {}",
            r.failures[0]
        );
        rho += r.checked;
    }
    let v = ok(VectFp::new(2, 1))?;
    let t = ok(truncation(&v, 3, &l))?;
    let (checked, failures) = t.identity_failures();
    ensure!(failures.is_empty(), "vect_fp(2,1): {}", failures[0]);
    identities += checked;
    let r = ok(check_p(&v, 3, &l))?;
    ensure!(
        r.failures.is_empty(),
        "rho on vect_fp(2,1): {}",
        r.failures[0]
    );
    rho += r.checked;
    let mut coherence = 0;
    for size in 1..=2usize {
        let m = mat(size);
        let f = ok(smash(
            &[&m, &m],
            Arc::new(p((size - 1) * (size - 1) + 1)),
            &l,
        ))?;
        let r = ok(check_pairing(&f, &p(size), &m, &m, 3, &l))?;
        ensure!(
            r.failures.is_empty(),
            "pairing on finset_pointed({size}): {}",
            r.failures[0]
        );
        coherence += r.coherence_checked;
    }
    Ok(format!(
        "{identities} simplicial identities, {rho} rho equations, {coherence} pairing equations"
    ))
}

// 10

fn k0() -> Outcome {
    let start = Instant::now();
    let l = limits();
    let mut groups = Vec::new();
    for size in 1..=4usize {
        let pr = ok(k0_presentation(&p(size), &l))?;
        if size == 1 {
            ensure!(pr.is_trivial(), "K0 of finset_pointed(1) is {pr}");
        } else {
            ensure!(
                pr.to_string() == "Z",
                "K0 of finset_pointed({size}) is {pr}"
            );
            // the class map is the point count, up to sign
            let sign = pr.kernel[0][pr.generator("1").ok_or("no generator 1")?];
            for (i, g) in pr.generators.iter().enumerate() {
                let points: i64 = g.parse().map_err(|_| format!("unexpected generator {g}"))?;
                ensure!(
                    pr.kernel[0][i] == sign * points,
                    "K0 functional on {g} is {}",
                    pr.kernel[0][i]
                );
            }
        }
        groups.push(format!("finset_pointed({size})={pr}"));
    }
    for d in 0..=3u32 {
        let v = ok(VectFp::new(2, d))?;
        let pr = ok(k0_presentation(&v, &l))?;
        if d == 0 {
            ensure!(pr.is_trivial(), "K0 of vect_fp(2,0) is {pr}");
        } else {
            ensure!(pr.to_string() == "Z", "K0 of vect_fp(2,{d}) is {pr}");
            // one class per dimension, and dimension is additive
            ensure!(
                pr.generators.len() == d as usize + 1,
                "vect_fp(2,{d}) has {} classes",
                pr.generators.len()
            );
            let id = |n: u32| v.identity(&n);
            let sign = pr.kernel[0][pr
                .generator(&v.obj_label(&1))
                .ok_or("no generator for dimension 1")?];
            for n in 0..=d {
                let g = pr
                    .generator(&v.obj_label(&n))
                    .ok_or("missing dimension class")?;
                ensure!(
                    rank(&id(n), 2) == n as usize,
                    "identity on dimension {n} has the wrong rank"
                );
                ensure!(
                    pr.kernel[0][g] == sign * i64::from(n),
                    "K0 functional on dimension {n} is {}",
                    pr.kernel[0][g]
                );
            }
        }
        groups.push(format!("vect_fp(2,{d})={pr}"));
    }
    within("K0", start.elapsed(), Duration::from_secs(30))?;
    Ok(groups.join(" "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Waldhausen axioms on the builtins", wald_axioms),
        (
            "colimit formula against cocone enumeration",
            colimit_formula,
        ),
        (
            "restricted colimit cubes have invertible southern arrows",
            pushout_lemma,
        ),
        ("colimits over A x D reduce to A x {*}", cofinality),
        ("good pushouts of good cubes are good", good_pushouts),
        ("full and reduced exactness agree", restricted_three),
        ("composites of exact functors", composites),
        ("closed structure on hom categories", closed_structure),
        ("S-dot identities, rho equations and pairing", sdot_layer),
        ("K0 from S_2", k0),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Named verification suites. Every check is a serializable [`CheckSpec`], so a
//! failing result can be written out and replayed to the same verdict.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{Category, Cocomplete, Waldhausen};
use crate::colimit::{restrict, restricted_colimit_cube};
use crate::cubes::{check_good_pushouts, enumerate_cubes, southern_arrow};
use crate::enumerate::{enumerate_functors, Filters};
use crate::error::{Error, Result};
use crate::finwald::{materialize, FinWald, Materialized};
use crate::homwald::{build_hom, check_closed_axioms, enumerate_k_exact, evaluation};
use crate::index::{Index, Subcategory};
use crate::k0::k0_presentation;
use crate::limits::Limits;
use crate::multiexact::{
    check_k_exact, check_multicategory_axioms, check_multicategory_axioms_with, compose_multi,
    composition_good_instance, doubling, inclusion, lists_product, product_index, projection,
    smash, ExactMode, MultiFunctor,
};
use crate::pointed::PointedSets;
use crate::sdot::{check_p, check_pairing, truncation};
use crate::wald::{check_wald_axioms, Builtin, BuiltinCat, WithPredicates, MAX_WITNESSES};

/// Engine version stamped on reports and witness files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    WaldAxioms,
    Cubes,
    Multiexact,
    Closed,
    Sdot,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "wald-axioms",
        "cubes",
        "multiexact",
        "closed",
        "sdot",
        "all",
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::WaldAxioms,
            Suite::Cubes,
            Suite::Multiexact,
            Suite::Closed,
            Suite::Sdot,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .expect("listed");
        f.write_str(Suite::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "wald-axioms" => Suite::WaldAxioms,
            "cubes" => Suite::Cubes,
            "multiexact" => Suite::Multiexact,
            "closed" => Suite::Closed,
            "sdot" => Suite::Sdot,
            "all" => Suite::All,
            _ => {
                return Err(Error::Unknown(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Deliberate defects, for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Only identities count as cofibrations (breaks W3).
    IdentityCofibrations,
    /// The projection `(A, B) ↦ A` stands in for the smash product (breaks kE1).
    Projection,
    /// Composition is corrupted on nested composites (breaks associativity).
    CorruptComposition,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identity-cofibrations" => Fault::IdentityCofibrations,
            "projection" => Fault::Projection,
            "corrupt-composition" => Fault::CorruptComposition,
            _ => return Err(Error::Unknown(format!("unknown fault {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Builtin family name (`finset_pointed`, `nstar`, `vect_fp`, `zero`) or a full builtin.
    pub builtin: Option<String>,
    pub size: usize,
    /// Cube dimension and top S-level.
    pub n: usize,
    /// Largest total arity for multiexact and closed checks.
    pub arity: usize,
    pub fault: Option<Fault>,
    pub limits: Limits,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            builtin: None,
            size: 2,
            n: 2,
            arity: 2,
            fault: None,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Smash,
    Projection,
}

/// One replayable check. Pointed-set sizes count the basepoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    WaldAxioms {
        category: Builtin,
        identity_cofibrations: bool,
    },
    /// Every good triple of n-cubes has a good pushout.
    GoodPushouts {
        category: Builtin,
        n: usize,
    },
    /// The pushout square computing `colim I'` has an invertible southern arrow,
    /// for every m-cube with `2 <= m <= n`.
    PushoutLemma {
        category: Builtin,
        n: usize,
    },
    KExact {
        sizes: Vec<usize>,
        target: usize,
        functor: Generator,
        mode: ExactMode,
    },
    /// Full and reduced kE4 agree on every functor between pointed sets.
    ExactModes {
        sizes: Vec<usize>,
        target: usize,
    },
    /// Composites of exact functors into pointed sets of this size are exact,
    /// and the two southern arrows of each composite agree.
    Composites {
        size: usize,
        max_arity: usize,
    },
    Multicategory {
        size: usize,
        max_arity: usize,
        corrupt: bool,
    },
    Closed {
        sources: Vec<usize>,
        middles: Vec<usize>,
        target: usize,
    },
    HomAxioms {
        sources: Vec<usize>,
        target: usize,
    },
    Evaluation {
        sources: Vec<usize>,
        target: usize,
    },
    Simplicial {
        category: Builtin,
        top: usize,
    },
    RhoEquations {
        category: Builtin,
        top: usize,
    },
    Pairing {
        size: usize,
        top: usize,
    },
    K0 {
        category: Builtin,
    },
}

fn sizes_label(s: &[usize]) -> String {
    s.iter()
        .map(|n| format!("P{n}"))
        .collect::<Vec<_>>()
        .join("×")
}

impl fmt::Display for CheckSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckSpec::WaldAxioms {
                category,
                identity_cofibrations,
            } => {
                write!(
                    f,
                    "wald-axioms {category}{}",
                    if *identity_cofibrations {
                        " [identity cofibrations]"
                    } else {
                        ""
                    }
                )
            }
            CheckSpec::GoodPushouts { category, n } => write!(f, "good-pushouts {category} n={n}"),
            CheckSpec::PushoutLemma { category, n } => write!(f, "pushout-lemma {category} n<={n}"),
            CheckSpec::KExact {
                sizes,
                target,
                functor,
                mode,
            } => {
                write!(
                    f,
                    "k-exact {functor:?} {} -> P{target} {mode:?}",
                    sizes_label(sizes)
                )
            }
            CheckSpec::ExactModes { sizes, target } => {
                write!(f, "exact-modes {} -> P{target}", sizes_label(sizes))
            }
            CheckSpec::Composites { size, max_arity } => {
                write!(f, "composites P{size} arity<={max_arity}")
            }
            CheckSpec::Multicategory {
                size,
                max_arity,
                corrupt,
            } => {
                write!(
                    f,
                    "multicategory P{size} arity<={max_arity}{}",
                    if *corrupt {
                        " [corrupt composition]"
                    } else {
                        ""
                    }
                )
            }
            CheckSpec::Closed {
                sources,
                middles,
                target,
            } => {
                write!(
                    f,
                    "closed {} ; {} -> P{target}",
                    sizes_label(sources),
                    sizes_label(middles)
                )
            }
            CheckSpec::HomAxioms { sources, target } => {
                write!(f, "hom-axioms Hom({};P{target})", sizes_label(sources))
            }
            CheckSpec::Evaluation { sources, target } => {
                write!(f, "evaluation Hom({};P{target})", sizes_label(sources))
            }
            CheckSpec::Simplicial { category, top } => {
                write!(f, "simplicial {category} levels<={top}")
            }
            CheckSpec::RhoEquations { category, top } => write!(f, "rho {category} n<={top}"),
            CheckSpec::Pairing { size, top } => write!(f, "pairing smash P{size} levels<={top}"),
            CheckSpec::K0 { category } => write!(f, "k0 {category}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not run to completion because a cap was hit.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub spec: CheckSpec,
    pub status: Status,
    pub detail: String,
    /// Serialized counterexamples; non-empty whenever the status is `Fail`.
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
    pub per_check_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub version: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckResult>,
    /// Wall-clock times; the only nondeterministic part of a report.
    pub timing: Timing,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn skipped(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Skipped)
    }

    /// One witness file per failing check.
    pub fn witness_files(&self) -> Vec<WitnessFile> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| WitnessFile {
                version: VERSION.into(),
                result: c.clone(),
            })
            .collect()
    }

    /// The report without timing, for byte comparisons.
    pub fn without_timing(&self) -> SuiteReport {
        SuiteReport {
            timing: Timing {
                total_ms: 0.0,
                per_check_ms: Vec::new(),
            },
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub version: String,
    pub result: CheckResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replay {
    pub original: CheckResult,
    pub rerun: CheckResult,
    /// Same status and same witnesses.
    pub identical: bool,
}

/// Re-executes the check recorded in `w`.
pub fn replay(w: &WitnessFile, limits: &Limits) -> Result<Replay> {
    if w.version != VERSION {
        return Err(Error::Malformed(format!(
            "witness written by engine {} but this is {VERSION}",
            w.version
        )));
    }
    let rerun = run_check(&w.result.spec, limits);
    let identical = rerun.status == w.result.status && rerun.witnesses == w.result.witnesses;
    Ok(Replay {
        original: w.result.clone(),
        rerun,
        identical,
    })
}

fn families(cfg: &SuiteConfig, default: &[&str]) -> Result<Vec<Builtin>> {
    match &cfg.builtin {
        Some(name) => Ok(vec![Builtin::with_size(name, cfg.size)?]),
        None => default
            .iter()
            .map(|name| Builtin::with_size(name, cfg.size))
            .collect(),
    }
}

/// The checks making up a suite under `cfg`.
pub fn plan(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckSpec>> {
    if cfg.size == 0 {
        return Err(Error::Malformed("size must be at least 1".into()));
    }
    let fault = cfg.fault;
    let mut out = Vec::new();
    let small = cfg.size.min(2);
    match suite {
        Suite::WaldAxioms => {
            for category in families(cfg, &["finset_pointed", "nstar", "vect_fp"])? {
                out.push(CheckSpec::WaldAxioms {
                    category,
                    identity_cofibrations: fault == Some(Fault::IdentityCofibrations),
                });
            }
        }
        Suite::Cubes => {
            for category in families(cfg, &["finset_pointed"])? {
                for n in 0..=cfg.n {
                    out.push(CheckSpec::GoodPushouts { category, n });
                }
                if cfg.n >= 2 {
                    out.push(CheckSpec::PushoutLemma { category, n: cfg.n });
                }
            }
        }
        Suite::Multiexact => {
            let s = cfg.size;
            let functor = if fault == Some(Fault::Projection) {
                Generator::Projection
            } else {
                Generator::Smash
            };
            for mode in [ExactMode::Full, ExactMode::Reduced] {
                out.push(CheckSpec::KExact {
                    sizes: vec![s, s],
                    target: (s - 1) * (s - 1) + 1,
                    functor,
                    mode,
                });
            }
            for k in 1..=cfg.arity.min(2) {
                out.push(CheckSpec::ExactModes {
                    sizes: vec![small; k],
                    target: small,
                });
            }
            out.push(CheckSpec::Composites {
                size: small,
                max_arity: cfg.arity.clamp(1, 3),
            });
            out.push(CheckSpec::Multicategory {
                size: small,
                max_arity: cfg.arity.clamp(1, 3),
                corrupt: fault == Some(Fault::CorruptComposition),
            });
        }
        Suite::Closed => {
            let max = cfg.arity.max(2);
            for k in 1..max {
                for l in 1..=max - k {
                    out.push(CheckSpec::Closed {
                        sources: vec![small; k],
                        middles: vec![small; l],
                        target: small,
                    });
                }
            }
            for k in 1..=cfg.arity.clamp(1, 2) {
                out.push(CheckSpec::HomAxioms {
                    sources: vec![small; k],
                    target: small,
                });
                out.push(CheckSpec::Evaluation {
                    sources: vec![small; k],
                    target: small,
                });
            }
        }
        Suite::Sdot => {
            let top = cfg.n.min(3);
            for category in families(cfg, &["finset_pointed"])? {
                out.push(CheckSpec::Simplicial { category, top });
                out.push(CheckSpec::RhoEquations { category, top });
                out.push(CheckSpec::K0 { category });
            }
            out.push(CheckSpec::Pairing {
                size: small,
                top: top.min(2),
            });
        }
        Suite::All => {
            for s in [
                Suite::WaldAxioms,
                Suite::Cubes,
                Suite::Multiexact,
                Suite::Closed,
                Suite::Sdot,
            ] {
                out.extend(plan(s, cfg)?);
            }
        }
    }
    Ok(out)
}

/// Runs every check of the suite, in parallel; results keep plan order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let specs = plan(suite, cfg)?;
    let start = Instant::now();
    let results: Vec<(CheckResult, f64)> = specs
        .par_iter()
        .map(|spec| {
            let t = Instant::now();
            let r = run_check(spec, &cfg.limits);
            (r, t.elapsed().as_secs_f64() * 1000.0)
        })
        .collect();
    let per_check_ms = results.iter().map(|(_, t)| *t).collect();
    Ok(SuiteReport {
        suite,
        version: VERSION.into(),
        config: cfg.clone(),
        checks: results.into_iter().map(|(r, _)| r).collect(),
        timing: Timing {
            total_ms: start.elapsed().as_secs_f64() * 1000.0,
            per_check_ms,
        },
    })
}

struct Outcome {
    detail: String,
    witnesses: Vec<String>,
}

/// Executes one check. Cap errors become `Skipped`; any other error is a failure
/// with the error as its witness.
pub fn run_check(spec: &CheckSpec, limits: &Limits) -> CheckResult {
    let (status, detail, witnesses) = match execute(spec, limits) {
        Ok(o) if o.witnesses.is_empty() => (Status::Pass, o.detail, o.witnesses),
        Ok(o) => (Status::Fail, o.detail, o.witnesses),
        Err(e @ Error::CapExceeded { .. }) => (Status::Skipped, e.to_string(), Vec::new()),
        Err(e) => (Status::Fail, "error".into(), vec![e.to_string()]),
    };
    CheckResult {
        name: spec.to_string(),
        spec: spec.clone(),
        status,
        detail,
        witnesses,
    }
}

fn mat(n: usize, limits: &Limits) -> Result<Materialized<PointedSets>> {
    if n == 0 {
        return Err(Error::Malformed(
            "pointed sets need at least the basepoint".into(),
        ));
    }
    materialize(&PointedSets::new(n).with_limits(*limits), limits)
}

fn mats(sizes: &[usize], limits: &Limits) -> Result<Vec<Materialized<PointedSets>>> {
    sizes.iter().map(|&n| mat(n, limits)).collect()
}

fn walds(ms: &[Materialized<PointedSets>]) -> Vec<Arc<FinWald>> {
    ms.iter().map(|m| m.wald.clone()).collect()
}

fn capped(mut v: Vec<String>) -> Vec<String> {
    v.truncate(MAX_WITNESSES);
    v
}

macro_rules! with_builtin {
    ($b:expr, $limits:expr, |$c:ident| $body:expr) => {
        match $b.build($limits)? {
            BuiltinCat::Pointed($c) => $body,
            BuiltinCat::Vect($c) => $body,
        }
    };
}

fn execute(spec: &CheckSpec, limits: &Limits) -> Result<Outcome> {
    match spec {
        CheckSpec::WaldAxioms {
            category,
            identity_cofibrations,
        } => with_builtin!(category, limits, |c| {
            if *identity_cofibrations {
                let name = format!("{} [identity cofibrations]", c.name());
                wald_outcome(
                    &WithPredicates::new(c, name, |c, f| c.is_identity(f), |c, f| c.is_iso(f)),
                    limits,
                )
            } else {
                wald_outcome(&c, limits)
            }
        }),
        CheckSpec::GoodPushouts { category, n } => with_builtin!(category, limits, |c| {
            let r = check_good_pushouts(&c, *n, limits)?;
            Ok(Outcome {
                detail: format!("{} good cubes, {} triples", r.good_cubes, r.triples),
                witnesses: r.failures,
            })
        }),
        CheckSpec::PushoutLemma { category, n } => {
            with_builtin!(category, limits, |c| pushout_lemma(&c, *n, limits))
        }
        CheckSpec::KExact {
            sizes,
            target,
            functor,
            mode,
        } => {
            let ms = mats(sizes, limits)?;
            let refs: Vec<&Materialized<PointedSets>> = ms.iter().collect();
            let t = Arc::new(PointedSets::new(*target).with_limits(*limits));
            let f = match functor {
                Generator::Smash => smash(&refs, t, limits)?,
                Generator::Projection => {
                    let [a, b] = refs.as_slice() else {
                        return Err(Error::Malformed("the projection has two inputs".into()));
                    };
                    projection([a, b], t, limits)?
                }
            };
            let r = check_k_exact(&f, *mode)?;
            Ok(Outcome {
                detail: format!("{} exact: {}", f.name, r.exact()),
                witnesses: r.witnesses.iter().map(|w| w.to_string()).collect(),
            })
        }
        CheckSpec::ExactModes { sizes, target } => exact_modes(sizes, *target, limits),
        CheckSpec::Composites { size, max_arity } => composites(*size, *max_arity, limits),
        CheckSpec::Multicategory {
            size,
            max_arity,
            corrupt,
        } => {
            let gens = fragment(*size, limits)?;
            let r = if *corrupt {
                let bad = |f: &MultiFunctor<FinWald>, gs: &[MultiFunctor<FinWald>]| {
                    let mut h = compose_multi(f, gs, limits)?;
                    if gs.iter().any(|g| g.name.contains('∘')) && !h.diagram.objects.is_empty() {
                        let last = h.diagram.objects.len() - 1;
                        h.diagram.objects[last] =
                            (h.diagram.objects[last] + 1) % h.target.num_objects();
                    }
                    Ok(h)
                };
                check_multicategory_axioms_with(&gens, *max_arity, &bad, limits)?
            } else {
                check_multicategory_axioms(&gens, *max_arity, limits)?
            };
            let mut w = Vec::new();
            w.extend(r.unit.iter().map(|s| format!("unit: {s}")));
            w.extend(
                r.associativity
                    .iter()
                    .map(|s| format!("associativity: {s}")),
            );
            w.extend(r.equivariance.iter().map(|s| format!("equivariance: {s}")));
            Ok(Outcome {
                detail: format!("{} instances", r.checked),
                witnesses: w,
            })
        }
        CheckSpec::Closed {
            sources,
            middles,
            target,
        } => {
            let (a, b) = (mats(sources, limits)?, mats(middles, limits)?);
            let t = Arc::new(PointedSets::new(*target).with_limits(*limits));
            let r = check_closed_axioms(&walds(&a), &walds(&b), t, limits)?;
            let mut w: Vec<String> = r.cm1.iter().map(|s| format!("CM1: {s}")).collect();
            w.extend(r.cm2.iter().map(|s| format!("CM2: {s}")));
            Ok(Outcome {
                detail: format!(
                    "{} functors, {} curried, {} CM2 squares",
                    r.functors, r.curried, r.cm2_checked
                ),
                witnesses: w,
            })
        }
        CheckSpec::HomAxioms { sources, target } => {
            let a = mats(sources, limits)?;
            let t = Arc::new(PointedSets::new(*target).with_limits(*limits));
            let h = build_hom(&walds(&a), t, limits)?;
            wald_outcome(h.cat.as_ref(), limits)
        }
        CheckSpec::Evaluation { sources, target } => {
            let a = mats(sources, limits)?;
            let t = Arc::new(PointedSets::new(*target).with_limits(*limits));
            let h = build_hom(&walds(&a), t, limits)?;
            let m = h.materialize(limits)?;
            let ev = evaluation(&h, &m, limits)?;
            let r = check_k_exact(&ev, ExactMode::Full)?;
            Ok(Outcome {
                detail: format!(
                    "ev has arity {} over {} hom objects",
                    ev.arity(),
                    m.wald.num_objects()
                ),
                witnesses: r.witnesses.iter().map(|w| w.to_string()).collect(),
            })
        }
        CheckSpec::Simplicial { category, top } => with_builtin!(category, limits, |c| {
            let t = truncation(&c, *top, limits)?;
            let sizes: Vec<String> = t.levels.iter().map(|l| l.len().to_string()).collect();
            let (checked, failures) = t.identity_failures();
            Ok(Outcome {
                detail: format!("levels [{}], {checked} identities", sizes.join(", ")),
                witnesses: failures,
            })
        }),
        CheckSpec::RhoEquations { category, top } => with_builtin!(category, limits, |c| {
            let r = check_p(&c, *top, limits)?;
            Ok(Outcome {
                detail: format!("{} equations", r.checked),
                witnesses: r.failures,
            })
        }),
        CheckSpec::Pairing { size, top } => {
            let m = mat(*size, limits)?;
            let t = Arc::new(PointedSets::new((size - 1) * (size - 1) + 1).with_limits(*limits));
            let f = smash(&[&m, &m], t, limits)?;
            let r = check_pairing(
                &f,
                &PointedSets::new(*size).with_limits(*limits),
                &m,
                &m,
                *top,
                limits,
            )?;
            Ok(Outcome {
                detail: format!(
                    "{} pairs, {} coherence equations",
                    r.pairs, r.coherence_checked
                ),
                witnesses: r.failures,
            })
        }
        CheckSpec::K0 { category } => with_builtin!(category, limits, |c| {
            let p = k0_presentation(&c, limits)?;
            let expected_trivial = c.objects()?.len() == 1;
            let ok = if expected_trivial {
                p.is_trivial()
            } else {
                p.free_rank == 1 && p.torsion().is_empty()
            };
            let witnesses = if ok {
                Vec::new()
            } else {
                vec![format!("K0 of {} is {p}", c.name())]
            };
            Ok(Outcome {
                detail: format!(
                    "K0 = {p} on {} generators, {} relations",
                    p.generators.len(),
                    p.relations.len()
                ),
                witnesses,
            })
        }),
    }
}

fn wald_outcome<C: Waldhausen>(c: &C, limits: &Limits) -> Result<Outcome> {
    let r = check_wald_axioms(c, limits)?;
    let counts: Vec<String> = r
        .axioms
        .iter()
        .map(|a| format!("{} {}", a.axiom, a.checked))
        .collect();
    let witnesses = r
        .axioms
        .iter()
        .flat_map(|a| a.witnesses.iter().map(move |w| format!("{}: {w}", a.axiom)))
        .collect();
    Ok(Outcome {
        detail: format!("{} objects; checked {}", r.objects, counts.join(", ")),
        witnesses,
    })
}

/// For each m-cube `I`, covers of `𝕀^m` minus its terminal vertex by the upper
/// face's punctured part and the lower face; the restricted colimit square has
/// an invertible southern arrow.
fn pushout_lemma<C: Cocomplete + Waldhausen>(c: &C, n: usize, limits: &Limits) -> Result<Outcome> {
    let mut checked = 0;
    let mut w = Vec::new();
    for m in 2..=n {
        let top = 1usize << (m - 1);
        let full = (1usize << m) - 1;
        for cube in enumerate_cubes(c, m, limits)? {
            let d = cube.to_diagram(c, limits)?;
            let Index::Fin(idx) = &d.index else {
                unreachable!("cubes are indexed by finite categories")
            };
            let punctured = Subcategory::full(idx, &(0..full).collect());
            let (pc, objs, _) = punctured.to_fincat(idx);
            let pd = restrict(&d, idx, &punctured);
            let keep = |pred: &dyn Fn(usize) -> bool| -> Subcategory {
                Subcategory::full(&pc, &(0..objs.len()).filter(|&i| pred(objs[i])).collect())
            };
            let a1 = keep(&|mask| mask != full & !top);
            let a2 = keep(&|mask| mask & top == 0);
            let sq = restricted_colimit_cube(c, &pd, &[a1, a2])?;
            checked += 1;
            let s = southern_arrow(c, &sq)?;
            if !c.is_iso(&s) && w.len() < MAX_WITNESSES {
                w.push(format!(
                    "{}: southern arrow {} is not invertible",
                    cube.label(c),
                    c.mor_label(&s)
                ));
            }
        }
    }
    Ok(Outcome {
        detail: format!("{checked} cubes"),
        witnesses: w,
    })
}

fn exact_modes(sizes: &[usize], target: usize, limits: &Limits) -> Result<Outcome> {
    let ms = mats(sizes, limits)?;
    let srcs = walds(&ms);
    let t = Arc::new(PointedSets::new(target).with_limits(*limits));
    let index = product_index(&srcs, limits)?;
    let all = enumerate_functors(
        t.as_ref(),
        &Index::Product(index),
        &Filters::default(),
        limits,
    )?;
    let verdicts = all
        .into_par_iter()
        .enumerate()
        .map(|(i, d)| -> Result<Option<String>> {
            let f = MultiFunctor::from_diagram(format!("F{i}"), srcs.clone(), t.clone(), d)?;
            let full = check_k_exact(&f, ExactMode::Full)?.exact();
            let reduced = check_k_exact(&f, ExactMode::Reduced)?.exact();
            Ok((full != reduced)
                .then(|| format!("{}: full says {full}, reduced says {reduced}", f.name)))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = verdicts.len();
    Ok(Outcome {
        detail: format!("{total} functors"),
        witnesses: capped(verdicts.into_iter().flatten().collect()),
    })
}

/// Smash products, doubling and inclusion between small pointed sets.
fn fragment(size: usize, limits: &Limits) -> Result<Vec<MultiFunctor<FinWald>>> {
    if size < 2 {
        let m1 = mat(1, limits)?;
        return Ok(vec![smash(
            &[&m1, &m1],
            Arc::new(PointedSets::new(1)),
            limits,
        )?
        .into_fin(&m1)?]);
    }
    let (m2, m3) = (mat(2, limits)?, mat(3, limits)?);
    let p2 = Arc::new(PointedSets::new(2).with_limits(*limits));
    let p3 = Arc::new(PointedSets::new(3).with_limits(*limits));
    Ok(vec![
        smash(&[&m2, &m2], p2, limits)?.into_fin(&m2)?,
        smash(&[&m2, &m3], p3.clone(), limits)?.into_fin(&m3)?,
        doubling(&m2, p3.clone(), limits)?.into_fin(&m3)?,
        inclusion(&m2, p3, limits)?.into_fin(&m3)?,
    ])
}

/// `F ∘ (G_1, ..., G_k)` for every exact `F` of arity 1 or 2 and exact `G_i` of
/// arity 0 to 2 with total arity at most `max_arity`, all on pointed sets of
/// `size`.
fn composites(size: usize, max_arity: usize, limits: &Limits) -> Result<Outcome> {
    let m = mat(size, limits)?;
    let src = m.wald.clone();
    let fin = |k: usize| enumerate_k_exact(&vec![src.clone(); k], src.clone(), limits);
    let pool: Vec<Vec<MultiFunctor<FinWald>>> =
        (0..=max_arity.min(2)).map(fin).collect::<Result<_>>()?;
    let mut instances = 0;
    let mut checked = 0;
    let mut w = Vec::new();
    for k in 1..=2.min(max_arity) {
        for f in &pool[k] {
            for arities in lists_product(&vec![(0..=max_arity.min(2)).collect::<Vec<_>>(); k]) {
                if arities.iter().sum::<usize>() > max_arity {
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
                    let h = compose_multi(f, &gs, limits)?;
                    checked += 1;
                    let r = check_k_exact(&h, ExactMode::Full)?;
                    if let Some(x) = r.witnesses.first() {
                        w.push(format!("{} is not exact: {x}", h.name));
                    }
                    let cofs: Vec<Vec<usize>> =
                        h.sources.iter().map(|s| s.cofibrations()).collect();
                    for t in lists_product(&cofs) {
                        instances += 1;
                        if !composition_good_instance(f, &gs, &h, &t)? {
                            w.push(format!("{}: southern arrows differ at {t:?}", h.name));
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome {
        detail: format!("{checked} composites, {instances} box instances"),
        witnesses: capped(w),
    })
}

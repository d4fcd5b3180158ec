use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use waldcat_core::cubes::{enumerate_cubes, Cube};
use waldcat_core::export::{cube_dot, cube_json, diagram_dot, fincat_dot, multi_json, to_json};
use waldcat_core::finwald::{materialize, FinWald, Materialized};
use waldcat_core::homwald::{build_hom, check_closed_axioms, curry, enumerate_k_exact};
use waldcat_core::index::{build_index, Shape};
use waldcat_core::k0::k0_presentation;
use waldcat_core::multiexact::{
    check_k_exact, compose_multi, composition_good_instance, lists_product, projection, smash,
    ExactMode,
};
use waldcat_core::pointed::PointedSets;
use waldcat_core::sdot::{check_p, check_pairing, enumerate_sn};
use waldcat_core::suites::{
    self, replay, run_suite, Fault, Status, Suite, SuiteConfig, SuiteReport, WitnessFile,
};
use waldcat_core::wald::{check_wald_axioms, Builtin, BuiltinCat, WaldCatJson};
use waldcat_core::{Category, Error, Limits, Waldhausen};

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;
const CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "waldcat",
    version,
    about = "Checks finite Waldhausen categories, multiexact functors and the S-dot construction"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cap overrides, e.g. `max_objects=500,max_results=10000`.
    #[arg(long, global = true, env = "WALDCAT_CAPS")]
    caps: Option<String>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args, Clone)]
struct CatArgs {
    /// finset_pointed, nstar, vect_fp or zero; or a full builtin such as `vect_fp(3,2)`.
    #[arg(long, default_value = "finset_pointed")]
    builtin: String,
    #[arg(long, default_value_t = 2)]
    size: usize,
}

impl CatArgs {
    fn builtin(&self) -> Result<Builtin> {
        Ok(Builtin::with_size(&self.builtin, self.size)?)
    }
}

#[derive(Args, Clone)]
struct HomArgs {
    /// Sizes of the source pointed sets, basepoint included.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    sources: Vec<usize>,
    /// Sizes of the middle inputs (for currying).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    middles: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    target: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctorName {
    Smash,
    Projection,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Reduced,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Run {
        #[arg(value_parser = Suite::NAMES)]
        suite: String,
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Inject a defect: identity-cofibrations, projection or corrupt-composition.
        #[arg(long)]
        fault: Option<String>,
        /// Directory for one witness file per failing check.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Re-execute the checks recorded in a witness file or a report.
    Replay { file: PathBuf },
    /// Export an index category, a builtin, a cube or a K0 presentation.
    Export {
        #[command(subcommand)]
        what: ExportWhat,
    },
    /// Check W1-W5 on a builtin or a JSON category file.
    CheckWald {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Check kE1-kE4 for a named functor on pointed sets.
    CheckExact {
        #[arg(long, value_enum, default_value_t = FunctorName::Smash)]
        functor: FunctorName,
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        sizes: Vec<usize>,
        /// Target size; defaults to the smallest that holds the smash product.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
    },
    /// Compose smash products: the outer smash takes one input per block.
    Compose {
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// Arity of each inner smash, e.g. `2,1`.
        #[arg(long, value_delimiter = ',', default_value = "2,1")]
        blocks: Vec<usize>,
    },
    /// The box cube of the smash product at a tuple of morphisms.
    Box {
        #[arg(long, value_delimiter = ',', default_value = "3,3")]
        sizes: Vec<usize>,
        /// Morphism labels, one per input.
        #[arg(long, value_delimiter = ';')]
        maps: Vec<String>,
    },
    /// Build an internal hom category.
    BuildHom {
        #[command(flatten)]
        hom: HomArgs,
    },
    /// Curry every exact functor of the sources and middles.
    Curry {
        #[command(flatten)]
        hom: HomArgs,
    },
    /// Check the closed-multicategory axioms CM1 and CM2.
    CheckClosed {
        #[command(flatten)]
        hom: HomArgs,
    },
    /// Enumerate S_n objects.
    EnumerateS {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// K0 presentation read off S_2.
    K0 {
        #[command(flatten)]
        cat: CatArgs,
    },
    /// Check that the staircase map P is simplicial.
    CheckP {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Check the smash pairing and its coherence equations.
    CheckPairing {
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum ExportWhat {
    /// interval, cube:N, ordinal:N or arrow:N.
    Index { shape: String },
    /// A builtin as an explicit table category.
    Category {
        #[command(flatten)]
        cat: CatArgs,
    },
    /// The i-th enumerated n-cube of a builtin.
    Cube {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        which: usize,
    },
    K0 {
        #[command(flatten)]
        cat: CatArgs,
    },
}

/// Output of a command: text, JSON and DOT renderings and the exit code.
struct Output {
    text: String,
    json: Option<Value>,
    dot: Option<String>,
    code: u8,
}

impl Output {
    fn new(text: String, json: Value, ok: bool) -> Self {
        Output {
            text,
            json: Some(json),
            dot: None,
            code: if ok { PASS } else { FAIL },
        }
    }
}

fn parse_caps(spec: Option<&str>) -> Result<Limits> {
    let mut l = Limits::default();
    let Some(spec) = spec else { return Ok(l) };
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("cap override {part:?} is not key=value"))?;
        let v: usize = v
            .trim()
            .parse()
            .with_context(|| format!("cap {k} needs a number"))?;
        let slot = match k.trim() {
            "max_objects" => &mut l.max_objects,
            "max_morphisms" => &mut l.max_morphisms,
            "max_set_size" => &mut l.max_set_size,
            "max_dim" => &mut l.max_dim,
            "max_results" => &mut l.max_results,
            "max_search" => &mut l.max_search,
            other => bail!("unknown cap {other:?}"),
        };
        *slot = v;
    }
    Ok(l)
}

fn pointed(n: usize, l: &Limits) -> Result<Materialized<PointedSets>> {
    if n == 0 {
        bail!("pointed sets need at least the basepoint");
    }
    Ok(materialize(&PointedSets::new(n).with_limits(*l), l)?)
}

fn pointed_all(sizes: &[usize], l: &Limits) -> Result<Vec<Materialized<PointedSets>>> {
    sizes.iter().map(|&n| pointed(n, l)).collect()
}

fn walds(ms: &[Materialized<PointedSets>]) -> Vec<Arc<FinWald>> {
    ms.iter().map(|m| m.wald.clone()).collect()
}

fn smash_target(sizes: &[usize]) -> usize {
    sizes.iter().map(|s| s.saturating_sub(1)).product::<usize>() + 1
}

macro_rules! with_builtin {
    ($b:expr, $limits:expr, |$c:ident| $body:expr) => {
        match $b.build($limits)? {
            BuiltinCat::Pointed($c) => $body,
            BuiltinCat::Vect($c) => $body,
        }
    };
}

fn run(cli: Cli) -> Result<Output> {
    let limits = parse_caps(cli.global.caps.as_deref())?;
    let l = &limits;
    match cli.command {
        Command::Run {
            suite,
            builtin,
            size,
            n,
            arity,
            fault,
            witnesses,
        } => {
            let cfg = SuiteConfig {
                builtin,
                size,
                n,
                arity,
                fault: fault.as_deref().map(str::parse::<Fault>).transpose()?,
                limits,
            };
            let report = run_suite(suite.parse()?, &cfg)?;
            if let Some(dir) = witnesses {
                fs::create_dir_all(&dir)?;
                for (i, w) in report.witness_files().iter().enumerate() {
                    fs::write(dir.join(format!("witness-{i}.json")), to_json(w)?)?;
                }
            }
            Ok(report_output(&report))
        }
        Command::Replay { file } => replay_file(&file, l),
        Command::Export { what } => export(what, l),
        Command::CheckWald { cat, file } => {
            let report = match file {
                Some(path) => {
                    let j: WaldCatJson = serde_json::from_str(&fs::read_to_string(&path)?)
                        .with_context(|| format!("{} is not a category file", path.display()))?;
                    match j {
                        WaldCatJson::Finite(f) => check_wald_axioms(&FinWald::from_json(&f)?, l)?,
                        WaldCatJson::Builtin { name, .. } => {
                            let b: Builtin = name.parse()?;
                            with_builtin!(b, l, |c| check_wald_axioms(&c, l)?)
                        }
                    }
                }
                None => with_builtin!(cat.builtin()?, l, |c| check_wald_axioms(&c, l)?),
            };
            let mut text = format!("{} ({} objects)\n", report.category, report.objects);
            for a in &report.axioms {
                text.push_str(&format!(
                    "  {} {} checked, {} failures\n",
                    a.axiom,
                    a.checked,
                    a.witnesses.len()
                ));
                for w in &a.witnesses {
                    text.push_str(&format!("    {w}\n"));
                }
            }
            Ok(Output::new(
                text,
                serde_json::to_value(&report)?,
                report.holds(),
            ))
        }
        Command::CheckExact {
            functor,
            sizes,
            target,
            mode,
        } => {
            let ms = pointed_all(&sizes, l)?;
            let refs: Vec<&Materialized<PointedSets>> = ms.iter().collect();
            let t = Arc::new(
                PointedSets::new(target.unwrap_or_else(|| smash_target(&sizes))).with_limits(*l),
            );
            let f = match functor {
                FunctorName::Smash => smash(&refs, t, l)?,
                FunctorName::Projection => {
                    let [a, b] = refs.as_slice() else {
                        bail!("the projection takes exactly two sizes")
                    };
                    projection([a, b], t, l)?
                }
            };
            let mode = match mode {
                ModeArg::Full => ExactMode::Full,
                ModeArg::Reduced => ExactMode::Reduced,
            };
            let r = check_k_exact(&f, mode)?;
            let mut text = format!(
                "{} ({}-ary, {:?}): {}\n",
                r.functor,
                r.arity,
                r.mode,
                if r.exact() { "exact" } else { "not exact" }
            );
            for w in &r.witnesses {
                text.push_str(&format!("  {w}\n"));
            }
            Ok(Output::new(text, serde_json::to_value(&r)?, r.exact()))
        }
        Command::Compose { size, blocks } => {
            let m = pointed(size, l)?;
            let mut inner = Vec::new();
            let mut mids = Vec::new();
            for &b in &blocks {
                let t = smash_target(&vec![size; b]);
                let mt = pointed(t, l)?;
                let refs = vec![&m; b];
                inner.push(
                    smash(&refs, Arc::new(PointedSets::new(t).with_limits(*l)), l)?
                        .into_fin(&mt)?,
                );
                mids.push(mt);
            }
            let mid_sizes: Vec<usize> = blocks
                .iter()
                .map(|&b| smash_target(&vec![size; b]))
                .collect();
            let refs: Vec<&Materialized<PointedSets>> = mids.iter().collect();
            let outer = smash(
                &refs,
                Arc::new(PointedSets::new(smash_target(&mid_sizes)).with_limits(*l)),
                l,
            )?;
            let h = compose_multi(&outer, &inner, l)?;
            let exact = check_k_exact(&h, ExactMode::Full)?;
            let cofs: Vec<Vec<usize>> = h.sources.iter().map(|s| s.cofibrations()).collect();
            let mut instances = 0;
            let mut bad = Vec::new();
            for t in lists_product(&cofs) {
                instances += 1;
                if !composition_good_instance(&outer, &inner, &h, &t)? {
                    bad.push(t);
                }
            }
            let ok = exact.exact() && bad.is_empty();
            let text = format!(
                "{} has arity {}; {}; composition-good on {}/{} box instances\n",
                h.name,
                h.arity(),
                if exact.exact() { "exact" } else { "not exact" },
                instances - bad.len(),
                instances
            );
            let j = json!({
                "functor": multi_json(&h),
                "exact": exact.exact(),
                "witnesses": exact.witnesses,
                "box_instances": instances,
                "composition_good_failures": bad,
            });
            Ok(Output::new(text, j, ok))
        }
        Command::Box { sizes, maps } => {
            let ms = pointed_all(&sizes, l)?;
            if maps.len() != ms.len() {
                bail!(
                    "give one morphism label per input ({} inputs, {} labels)",
                    ms.len(),
                    maps.len()
                );
            }
            let refs: Vec<&Materialized<PointedSets>> = ms.iter().collect();
            let target = PointedSets::new(smash_target(&sizes)).with_limits(*l);
            let f = smash(&refs, Arc::new(target.clone()), l)?;
            let fbar = maps
                .iter()
                .zip(&ms)
                .map(|(label, m)| {
                    m.wald
                        .morphism_id(label)
                        .ok_or_else(|| anyhow!("no morphism labelled {label:?}"))
                })
                .collect::<Result<Vec<_>>>()?;
            let cube = f.box_cube(&fbar)?;
            let s = f.box_product(&fbar)?;
            let mut out = cube_output(&target, &cube);
            out.text.push_str(&format!(
                "box product {} ({})\n",
                target.mor_label(&s),
                if target.is_cofibration(&s) {
                    "cofibration"
                } else {
                    "not a cofibration"
                }
            ));
            Ok(out)
        }
        Command::BuildHom { hom } => {
            let ms = pointed_all(&hom.sources, l)?;
            let h = build_hom(
                &walds(&ms),
                Arc::new(PointedSets::new(hom.target).with_limits(*l)),
                l,
            )?;
            let m = h.materialize(l)?;
            let report = check_wald_axioms(h.cat.as_ref(), l)?;
            let text = format!(
                "{}: {} objects, {} morphisms; W1-W5 {}\n",
                m.wald.name(),
                m.wald.num_objects(),
                m.wald.num_morphisms(),
                if report.holds() { "hold" } else { "fail" }
            );
            let j = json!({ "category": WaldCatJson::finite(&m.wald), "axioms": report });
            Ok(Output::new(text, j, report.holds()))
        }
        Command::Curry { hom } => {
            let (a, b) = (pointed_all(&hom.sources, l)?, pointed_all(&hom.middles, l)?);
            let target = Arc::new(PointedSets::new(hom.target).with_limits(*l));
            let h = build_hom(&walds(&a), target.clone(), l)?;
            let m = h.materialize(l)?;
            let all: Vec<Arc<FinWald>> = walds(&a).into_iter().chain(walds(&b)).collect();
            let mut text = String::new();
            let mut rows = Vec::new();
            for f in enumerate_k_exact(&all, target, l)? {
                let c = curry(&f, &h, &m, l)?;
                let j = multi_json(&c);
                text.push_str(&format!(
                    "{}: {}\n",
                    f.name,
                    j.objects
                        .iter()
                        .map(|e| format!("({})->{}", e.tuple.join(","), e.value))
                        .collect::<Vec<_>>()
                        .join(" ")
                ));
                rows.push(json!({ "functor": multi_json(&f), "curried": j }));
            }
            Ok(Output::new(text, Value::Array(rows), true))
        }
        Command::CheckClosed { hom } => {
            let (a, b) = (pointed_all(&hom.sources, l)?, pointed_all(&hom.middles, l)?);
            let r = check_closed_axioms(
                &walds(&a),
                &walds(&b),
                Arc::new(PointedSets::new(hom.target).with_limits(*l)),
                l,
            )?;
            let mut text = format!(
                "{} exact functors, {} curried; CM1 {}; CM2 {} on {} squares\n",
                r.functors,
                r.curried,
                if r.cm1.is_empty() { "holds" } else { "fails" },
                if r.cm2.is_empty() { "holds" } else { "fails" },
                r.cm2_checked
            );
            for w in r.cm1.iter().chain(&r.cm2) {
                text.push_str(&format!("  {w}\n"));
            }
            Ok(Output::new(text, serde_json::to_value(&r)?, r.holds()))
        }
        Command::EnumerateS { cat, n } => with_builtin!(cat.builtin()?, l, |c| {
            let xs = enumerate_sn(&c, n, l)?;
            let mut text = format!("S_{n} {}: {} objects\n", c.name(), xs.len());
            let labels: Vec<String> = xs.iter().map(|x| x.object_labels(&c).join(",")).collect();
            for s in &labels {
                text.push_str(&format!("  {s}\n"));
            }
            let mut out = Output::new(
                text,
                json!({ "level": n, "category": c.name(), "objects": labels }),
                true,
            );
            out.dot = xs.first().map(|x| diagram_dot(&c, x));
            Ok(out)
        }),
        Command::K0 { cat } => with_builtin!(cat.builtin()?, l, |c| {
            let p = k0_presentation(&c, l)?;
            let text = format!(
                "K0({}) = {p} ({} generators, {} relations)\n",
                p.category,
                p.generators.len(),
                p.relations.len()
            );
            Ok(Output::new(text, serde_json::to_value(&p)?, true))
        }),
        Command::CheckP { cat, n } => with_builtin!(cat.builtin()?, l, |c| {
            let r = check_p(&c, n, l)?;
            let mut text = format!(
                "P on {} up to level {n}: {} equations, {} failures\n",
                c.name(),
                r.checked,
                r.failures.len()
            );
            for f in &r.failures {
                text.push_str(&format!("  {f}\n"));
            }
            Ok(Output::new(
                text,
                serde_json::to_value(&r)?,
                r.failures.is_empty(),
            ))
        }),
        Command::CheckPairing { size, n } => {
            let m = pointed(size, l)?;
            let f = smash(
                &[&m, &m],
                Arc::new(PointedSets::new(smash_target(&[size, size])).with_limits(*l)),
                l,
            )?;
            let r = check_pairing(&f, &PointedSets::new(size).with_limits(*l), &m, &m, n, l)?;
            let mut text = format!(
                "smash pairing: {} pairs, {} coherence equations, {} failures\n",
                r.pairs,
                r.coherence_checked,
                r.failures.len()
            );
            for f in &r.failures {
                text.push_str(&format!("  {f}\n"));
            }
            Ok(Output::new(
                text,
                serde_json::to_value(&r)?,
                r.failures.is_empty(),
            ))
        }
    }
}

fn cube_output<C: Category>(cat: &C, cube: &Cube<C>) -> Output {
    let j = cube_json(cat, cube);
    let mut text = format!("{}-cube in {}\n", j.dimension, j.category);
    for (k, v) in &j.vertices {
        text.push_str(&format!("  {k}: {v}\n"));
    }
    for e in &j.edges {
        text.push_str(&format!(
            "  {} -> {} (axis {}): {}\n",
            e.from, e.to, e.axis, e.label
        ));
    }
    Output {
        text,
        json: serde_json::to_value(&j).ok(),
        dot: Some(cube_dot(cat, cube)),
        code: PASS,
    }
}

fn export(what: ExportWhat, l: &Limits) -> Result<Output> {
    match what {
        ExportWhat::Index { shape } => {
            let shape = parse_shape(&shape)?;
            let c = build_index(&shape, l)?;
            let j = c.to_json();
            let text = format!(
                "{}: {} objects, {} morphisms\n",
                j.name,
                j.objects.len(),
                j.morphisms.len()
            );
            Ok(Output {
                text,
                json: Some(serde_json::to_value(&j)?),
                dot: Some(fincat_dot(&c)),
                code: PASS,
            })
        }
        ExportWhat::Category { cat } => with_builtin!(cat.builtin()?, l, |c| {
            let m = materialize(&c, l)?;
            let text = format!(
                "{}: {} objects, {} morphisms\n",
                c.name(),
                m.wald.num_objects(),
                m.wald.num_morphisms()
            );
            let mut out = Output::new(
                text,
                serde_json::to_value(WaldCatJson::finite(&m.wald))?,
                true,
            );
            out.dot = Some(fincat_dot(m.wald.fincat()));
            Ok(out)
        }),
        ExportWhat::Cube { cat, n, which } => with_builtin!(cat.builtin()?, l, |c| {
            let cubes = enumerate_cubes(&c, n, l)?;
            let cube = cubes
                .get(which)
                .ok_or_else(|| anyhow!("only {} cubes of dimension {n}", cubes.len()))?;
            Ok(cube_output(&c, cube))
        }),
        ExportWhat::K0 { cat } => with_builtin!(cat.builtin()?, l, |c| {
            let p = k0_presentation(&c, l)?;
            Ok(Output::new(
                format!("K0({}) = {p}\n", p.category),
                serde_json::to_value(&p)?,
                true,
            ))
        }),
    }
}

fn parse_shape(s: &str) -> Result<Shape> {
    if s == "interval" {
        return Ok(Shape::Interval);
    }
    let (name, n) = s
        .split_once(':')
        .ok_or_else(|| Error::Unknown(format!("unknown shape {s:?}")))?;
    let n: usize = n
        .parse()
        .with_context(|| format!("shape size {n:?} is not a number"))?;
    Ok(match name {
        "cube" => Shape::Cube(n),
        "ordinal" => Shape::Ordinal(n),
        "arrow" => Shape::ArrowOrdinal(n),
        _ => return Err(Error::Unknown(format!("unknown shape {s:?}")).into()),
    })
}

fn report_output(r: &SuiteReport) -> Output {
    let mut text = String::new();
    for c in &r.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        text.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        for w in &c.witnesses {
            text.push_str(&format!("     {w}\n"));
        }
    }
    let (pass, total) = (
        r.checks.iter().filter(|c| c.status == Status::Pass).count(),
        r.checks.len(),
    );
    text.push_str(&format!(
        "{} {}: {pass}/{total} checks pass\n",
        r.suite,
        suites::VERSION
    ));
    let code = if r.failed() {
        FAIL
    } else if r.skipped() {
        CAP
    } else {
        PASS
    };
    Output {
        text,
        json: serde_json::to_value(r).ok(),
        dot: None,
        code,
    }
}

fn replay_file(path: &Path, l: &Limits) -> Result<Output> {
    let raw: Value = serde_json::from_str(&fs::read_to_string(path)?)
        .with_context(|| format!("{} is not JSON", path.display()))?;
    let files: Vec<WitnessFile> = if raw.get("checks").is_some() {
        let report: SuiteReport = serde_json::from_value(raw).context("malformed report")?;
        report
            .checks
            .into_iter()
            .map(|c| WitnessFile {
                version: report.version.clone(),
                result: c,
            })
            .collect()
    } else {
        vec![serde_json::from_value(raw).context("malformed witness file")?]
    };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut all_identical = true;
    for w in &files {
        let r = replay(w, l)?;
        all_identical &= r.identical;
        text.push_str(&format!(
            "{} {:?} -> {:?}{}\n",
            r.original.name,
            r.original.status,
            r.rerun.status,
            if r.identical {
                ""
            } else {
                " (verdict changed)"
            }
        ));
        for w in &r.rerun.witnesses {
            text.push_str(&format!("     {w}\n"));
        }
        results.push(r);
    }
    let any_fail = results.iter().any(|r| r.rerun.status == Status::Fail);
    let code = if !all_identical || any_fail {
        FAIL
    } else {
        PASS
    };
    Ok(Output {
        text,
        json: serde_json::to_value(&results).ok(),
        dot: None,
        code,
    })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::CapExceeded { .. }) => CAP,
        Some(Error::Malformed(_) | Error::Unknown(_)) => USAGE,
        Some(_) => FAIL,
        None => USAGE,
    }
}

fn emit(out: &Output, format: Format, path: Option<&Path>) -> Result<()> {
    let body = match format {
        Format::Text => out.text.clone(),
        Format::Json => to_json(
            out.json
                .as_ref()
                .ok_or_else(|| anyhow!("no JSON form for this output"))?,
        )?,
        Format::Dot => out
            .dot
            .clone()
            .ok_or_else(|| Error::Unknown("no DOT form for this output".into()))?,
    };
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { PASS });
        }
    };
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    let format = cli.global.format;
    let path = cli.global.out.clone();
    match run(cli).and_then(|out| emit(&out, format, path.as_deref()).map(|_| out.code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

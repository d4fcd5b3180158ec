//! JSON and DOT renderings. Output depends only on the value, so identical
//! inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::category::Category;
use crate::cubes::Cube;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::index::{mask_label, FinCat, SmallCat};
use crate::multiexact::MultiFunctor;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Malformed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeJson {
    pub category: String,
    pub dimension: usize,
    /// Vertex labels keyed by bitstring, axis 1 first.
    pub vertices: BTreeMap<String, String>,
    pub edges: Vec<CubeEdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeEdgeJson {
    pub from: String,
    pub to: String,
    /// 1-based.
    pub axis: usize,
    pub label: String,
}

fn vertex_key(mask: usize, n: usize) -> String {
    if n == 0 {
        "()".into()
    } else {
        mask_label(mask, n)
    }
}

pub fn cube_json<C: Category>(cat: &C, cube: &Cube<C>) -> CubeJson {
    let n = cube.n;
    let vertices = (0..1usize << n)
        .map(|m| (vertex_key(m, n), cat.obj_label(cube.vertex(m))))
        .collect();
    let mut edges = Vec::new();
    for mask in 0..1usize << n {
        for k in (0..n).filter(|k| mask >> k & 1 == 0) {
            edges.push(CubeEdgeJson {
                from: vertex_key(mask, n),
                to: vertex_key(mask | 1 << k, n),
                axis: k + 1,
                label: cat.mor_label(cube.edge(mask, k)),
            });
        }
    }
    CubeJson {
        category: cat.name(),
        dimension: n,
        vertices,
        edges,
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A layered digraph: one rank per number of 1s in the vertex bitstring.
pub fn cube_dot<C: Category>(cat: &C, cube: &Cube<C>) -> String {
    let j = cube_json(cat, cube);
    let mut s = String::from("digraph cube {\n  rankdir=TB;\n");
    let mut ranks: BTreeMap<usize, Vec<&String>> = BTreeMap::new();
    for (key, label) in &j.vertices {
        let _ = writeln!(
            s,
            "  {} [label={}];",
            quote(key),
            quote(&format!("{key}: {label}"))
        );
        ranks.entry(key.matches('1').count()).or_default().push(key);
    }
    for keys in ranks.values() {
        let names: Vec<String> = keys.iter().map(|k| quote(k)).collect();
        let _ = writeln!(s, "  {{ rank=same; {}; }}", names.join("; "));
    }
    for e in &j.edges {
        let _ = writeln!(
            s,
            "  {} -> {} [label={}];",
            quote(&e.from),
            quote(&e.to),
            quote(&format!("{}: {}", e.axis, e.label))
        );
    }
    s.push_str("}\n");
    s
}

/// Non-identity morphisms that are not composites of two non-identities.
fn generators(s: &dyn SmallCat) -> Vec<usize> {
    let n = s.num_morphisms();
    let mut composite = vec![false; n];
    for g in (0..n).filter(|&g| !s.is_identity(g)) {
        for f in (0..n).filter(|&f| !s.is_identity(f)) {
            if let Some(h) = s.compose(g, f) {
                composite[h] = true;
            }
        }
    }
    (0..n)
        .filter(|&m| !s.is_identity(m) && !composite[m])
        .collect()
}

/// Objects and generating morphisms of a finite category.
pub fn fincat_dot(cat: &FinCat) -> String {
    let mut s = format!("digraph {} {{\n", quote(cat.name()));
    for o in 0..cat.num_objects() {
        let _ = writeln!(s, "  n{o} [label={}];", quote(&cat.object_label(o)));
    }
    for m in generators(cat) {
        let _ = writeln!(
            s,
            "  n{} -> n{} [label={}];",
            cat.dom(m),
            cat.cod(m),
            quote(&cat.morphism_label(m))
        );
    }
    s.push_str("}\n");
    s
}

/// A diagram drawn over its index: nodes show the value at each index object,
/// edges the value at each generating index morphism.
pub fn diagram_dot<C: Category>(cat: &C, d: &Diagram<C>) -> String {
    let shape = d.small();
    let mut s = String::from("digraph diagram {\n");
    for o in 0..shape.num_objects() {
        let label = format!(
            "{}: {}",
            shape.object_label(o),
            cat.obj_label(&d.objects[o])
        );
        let _ = writeln!(s, "  n{o} [label={}];", quote(&label));
    }
    for m in generators(shape) {
        let label = cat.mor_label(&d.morphisms[m]);
        let _ = writeln!(
            s,
            "  n{} -> n{} [label={}];",
            shape.dom(m),
            shape.cod(m),
            quote(&label)
        );
    }
    s.push_str("}\n");
    s
}

/// A multivariable functor as explicit tables keyed by tuples of source labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiFunctorJson {
    pub name: String,
    pub sources: Vec<String>,
    pub target: String,
    pub objects: Vec<TupleEntry>,
    pub morphisms: Vec<TupleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleEntry {
    pub tuple: Vec<String>,
    pub value: String,
}

pub fn multi_json<D: Category>(f: &MultiFunctor<D>) -> MultiFunctorJson {
    let d = f.target.as_ref();
    let objects = (0..f.index.num_objects())
        .map(|o| {
            let t = f.index.decode_object(o);
            TupleEntry {
                tuple: t
                    .iter()
                    .zip(&f.sources)
                    .map(|(&x, s)| s.fincat().object_label(x))
                    .collect(),
                value: d.obj_label(&f.diagram.objects[o]),
            }
        })
        .collect();
    let morphisms = (0..f.index.num_morphisms())
        .map(|m| {
            let t = f.index.decode_morphism(m);
            TupleEntry {
                tuple: t
                    .iter()
                    .zip(&f.sources)
                    .map(|(&x, s)| s.fincat().morphism_label(x))
                    .collect(),
                value: d.mor_label(&f.diagram.morphisms[m]),
            }
        })
        .collect();
    MultiFunctorJson {
        name: f.name.clone(),
        sources: f.sources.iter().map(|s| s.name()).collect(),
        target: d.name(),
        objects,
        morphisms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::interval;
    use crate::k0::{k0_presentation, K0Presentation};
    use crate::limits::Limits;
    use crate::pointed::PointedSets;
    use crate::Waldhausen;

    /// Reads back `"a" -> "b" [label="..."]` lines and node declarations.
    fn parse_dot(s: &str) -> (Vec<String>, Vec<(String, String, String)>) {
        let unq = |t: &str| t.trim().trim_matches('"').replace("\\\"", "\"");
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for line in s.lines().map(str::trim) {
            if line.starts_with('{')
                || line.starts_with("digraph")
                || line == "}"
                || !line.ends_with("];")
            {
                continue;
            }
            let (head, attrs) = line.split_once(" [label=").unwrap();
            let label = unq(attrs.trim_end_matches("];"));
            match head.split_once(" -> ") {
                Some((a, b)) => edges.push((unq(a), unq(b), label)),
                None => nodes.push(unq(head)),
            }
        }
        (nodes, edges)
    }

    #[test]
    fn interval_json_schema() {
        let j = to_json(&interval().to_json()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["objects"], serde_json::json!(["0", "1"]));
        assert_eq!(v["morphisms"].as_array().unwrap().len(), 3);
        assert!(v["compose"].as_array().unwrap().is_empty());
        let back = FinCat::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(to_json(&back.to_json()).unwrap(), j);
    }

    #[test]
    fn square_renders_as_four_nodes() {
        let c = PointedSets::new(4);
        let z = c.from_zero(&1);
        let sq = Cube::square(&c, &z, &z, &c.map(2, &[1]), &c.map(2, &[2])).unwrap();
        let dot = cube_dot(&c, &sq);
        let (nodes, edges) = parse_dot(&dot);
        assert_eq!(nodes, vec!["00", "01", "10", "11"]);
        assert_eq!(edges.len(), 4);
        assert!(edges.iter().all(|(_, _, l)| !l.is_empty()));
        assert!(edges.contains(&("00".into(), "10".into(), format!("1: {}", c.mor_label(&z)))));
        assert_eq!(dot, cube_dot(&c, &sq.clone()));
    }

    #[test]
    fn cube_json_round_trips() {
        let c = PointedSets::new(3);
        let sq = Cube::square(
            &c,
            &c.from_zero(&1),
            &c.from_zero(&1),
            &c.map(2, &[1]),
            &c.map(2, &[1]),
        )
        .unwrap();
        let j = cube_json(&c, &sq);
        let back: CubeJson = serde_json::from_str(&to_json(&j).unwrap()).unwrap();
        assert_eq!(back, j);
        assert_eq!(back.vertices.len(), 4);
        assert_eq!(back.vertices["11"], "2");
    }

    #[test]
    fn k0_json_round_trips() {
        let p = k0_presentation(&PointedSets::new(3), &Limits::default()).unwrap();
        let s = to_json(&p).unwrap();
        let back: K0Presentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["generators"].is_array() && v["relations"].is_array());
    }

    #[test]
    fn fincat_dot_draws_generators_only() {
        let ord = crate::index::build_index(&crate::index::Shape::Ordinal(2), &Limits::default())
            .unwrap();
        let (nodes, edges) = parse_dot(&fincat_dot(&ord));
        assert_eq!(nodes.len(), 3);
        assert_eq!(edges.len(), 2);
    }
}

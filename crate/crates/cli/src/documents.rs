//! JSON document schemas and conversions to the in-memory types. Documents
//! are written in a canonical form: families in ascending mask order, order
//! relations in row-major element order, map and mass keys sorted, so
//! regenerating a file is byte-identical.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use convtop::instances::{FiniteMetric, MeasureSpace};
use convtop::sets::{Ground, SetFamily, Subset};
use convtop::spaces::{PreconvexSpace, SpaceMap, TopConvexSpace};
use convtop::stone::{FiniteLattice, PointedLattice};
use convtop::suplat::PartialSupLattice;
use convtop::GroundSet;

/// Untyped but schema-tagged on-disk document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Document {
    Topconvex {
        ground: Vec<String>,
        closed: Vec<Vec<String>>,
        convex: Vec<Vec<String>>,
    },
    Preconvex {
        ground: Vec<String>,
        preconvex: Vec<Vec<String>>,
    },
    Lattice {
        elements: Vec<String>,
        leq: Vec<(String, String)>,
    },
    PointedLattice {
        elements: Vec<String>,
        leq: Vec<(String, String)>,
        chosen: Vec<String>,
    },
    PartialSup {
        elements: Vec<String>,
        leq: Vec<(String, String)>,
        j: Vec<Vec<String>>,
    },
    Map {
        dom: Vec<String>,
        cod: Vec<String>,
        map: BTreeMap<String, String>,
    },
    Metric {
        points: Vec<String>,
        d: Vec<Vec<String>>,
    },
    Measure {
        atoms: Vec<String>,
        mass: BTreeMap<String, String>,
    },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Topconvex { .. } => "topconvex",
            Document::Preconvex { .. } => "preconvex",
            Document::Lattice { .. } => "lattice",
            Document::PointedLattice { .. } => "pointed_lattice",
            Document::PartialSup { .. } => "partial_sup",
            Document::Map { .. } => "map",
            Document::Metric { .. } => "metric",
            Document::Measure { .. } => "measure",
        }
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents serialize");
        out.push('\n');
        out
    }
}

pub fn parse_rational(text: &str) -> Result<Rational64, String> {
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: i64 = numer
        .parse()
        .map_err(|_| format!("bad rational `{text}`"))?;
    let d: i64 = denom
        .parse()
        .map_err(|_| format!("bad rational `{text}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational64::new(n, d))
}

pub fn format_rational(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ground_from_labels(labels: &[String]) -> Result<Ground, String> {
    GroundSet::new(labels.iter().cloned()).map_err(|e| e.to_string())
}

fn family_from_lists(ground: &Ground, lists: &[Vec<String>]) -> Result<SetFamily, String> {
    let mut members = Vec::with_capacity(lists.len());
    for list in lists {
        let subset = Subset::from_labels(ground, list.iter().map(String::as_str))
            .map_err(|e| e.to_string())?;
        members.push(subset);
    }
    SetFamily::new(ground, members).map_err(|e| e.to_string())
}

fn family_to_lists(fam: &SetFamily) -> Vec<Vec<String>> {
    fam.members()
        .map(|s| s.member_labels().into_iter().map(str::to_string).collect())
        .collect()
}

fn lattice_from_parts(
    elements: &[String],
    leq: &[(String, String)],
) -> Result<Arc<FiniteLattice>, String> {
    let n = elements.len();
    let index = |label: &str| {
        elements
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| format!("unknown element `{label}` in order relation"))
    };
    let mut matrix = vec![false; n * n];
    for (a, b) in leq {
        matrix[index(a)? * n + index(b)?] = true;
    }
    FiniteLattice::from_leq(elements.to_vec(), matrix)
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

fn lattice_to_parts(l: &FiniteLattice) -> (Vec<String>, Vec<(String, String)>) {
    let elements: Vec<String> = l.labels().to_vec();
    let mut leq = Vec::new();
    for a in 0..l.size() {
        for b in 0..l.size() {
            if l.leq(a, b) {
                leq.push((elements[a].clone(), elements[b].clone()));
            }
        }
    }
    (elements, leq)
}

pub fn doc_from_topconvex(x: &TopConvexSpace) -> Document {
    Document::Topconvex {
        ground: x.ground().labels().to_vec(),
        closed: family_to_lists(x.closed()),
        convex: family_to_lists(x.convex()),
    }
}

#[allow(dead_code)] // exercised by the round-trip tests
pub fn doc_from_preconvex(p: &PreconvexSpace) -> Document {
    Document::Preconvex {
        ground: p.ground().labels().to_vec(),
        preconvex: family_to_lists(p.preconvex()),
    }
}

pub fn doc_from_lattice(l: &FiniteLattice) -> Document {
    let (elements, leq) = lattice_to_parts(l);
    Document::Lattice { elements, leq }
}

#[allow(dead_code)] // exercised by the round-trip tests
pub fn doc_from_pointed(pl: &PointedLattice) -> Document {
    let (elements, leq) = lattice_to_parts(pl.lattice());
    let chosen = pl.chosen().iter().map(|&i| elements[i].clone()).collect();
    Document::PointedLattice {
        elements,
        leq,
        chosen,
    }
}

#[allow(dead_code)] // exercised by the round-trip tests
pub fn doc_from_partial_sup(psl: &PartialSupLattice) -> Document {
    let (elements, leq) = lattice_to_parts(psl.lattice());
    let j = psl
        .j()
        .iter()
        .map(|&mask| {
            (0..elements.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| elements[i].clone())
                .collect()
        })
        .collect();
    Document::PartialSup { elements, leq, j }
}

pub fn doc_from_metric(m: &FiniteMetric) -> Document {
    let n = m.points().size();
    Document::Metric {
        points: m.points().labels().to_vec(),
        d: (0..n)
            .map(|i| (0..n).map(|j| format_rational(m.distance(i, j))).collect())
            .collect(),
    }
}

#[allow(dead_code)] // exercised by the round-trip tests
pub fn doc_from_measure(ms: &MeasureSpace) -> Document {
    Document::Measure {
        atoms: ms.atoms().labels().to_vec(),
        mass: ms
            .atoms()
            .labels()
            .iter()
            .cloned()
            .zip(ms.mass().iter().map(|&m| format_rational(m)))
            .collect(),
    }
}

pub fn topconvex_from_doc(doc: &Document) -> Result<TopConvexSpace, String> {
    let Document::Topconvex {
        ground,
        closed,
        convex,
    } = doc
    else {
        return Err(format!("expected a topconvex document, got {}", doc.kind()));
    };
    let g = ground_from_labels(ground)?;
    let closed = family_from_lists(&g, closed)?;
    let convex = family_from_lists(&g, convex)?;
    TopConvexSpace::new(closed, convex).map_err(|e| e.to_string())
}

pub fn preconvex_from_doc(doc: &Document) -> Result<PreconvexSpace, String> {
    let Document::Preconvex { ground, preconvex } = doc else {
        return Err(format!("expected a preconvex document, got {}", doc.kind()));
    };
    let g = ground_from_labels(ground)?;
    Ok(PreconvexSpace::new(family_from_lists(&g, preconvex)?))
}

pub fn lattice_from_doc(doc: &Document) -> Result<Arc<FiniteLattice>, String> {
    match doc {
        Document::Lattice { elements, leq }
        | Document::PointedLattice { elements, leq, .. }
        | Document::PartialSup { elements, leq, .. } => lattice_from_parts(elements, leq),
        _ => Err(format!(
            "expected a lattice-bearing document, got {}",
            doc.kind()
        )),
    }
}

pub fn pointed_from_doc(doc: &Document) -> Result<PointedLattice, String> {
    let Document::PointedLattice {
        elements,
        leq,
        chosen,
    } = doc
    else {
        return Err(format!(
            "expected a pointed_lattice document, got {}",
            doc.kind()
        ));
    };
    let lattice = lattice_from_parts(elements, leq)?;
    let chosen: Vec<usize> = chosen
        .iter()
        .map(|label| {
            lattice
                .index_of(label)
                .ok_or_else(|| format!("unknown chosen element `{label}`"))
        })
        .collect::<Result<_, _>>()?;
    PointedLattice::new(&lattice, chosen).map_err(|e| e.to_string())
}

pub fn partial_sup_from_doc(doc: &Document) -> Result<PartialSupLattice, String> {
    let Document::PartialSup { elements, leq, j } = doc else {
        return Err(format!(
            "expected a partial_sup document, got {}",
            doc.kind()
        ));
    };
    let lattice = lattice_from_parts(elements, leq)?;
    let mut masks = Vec::with_capacity(j.len());
    for member in j {
        let mut mask = 0u128;
        for label in member {
            let i = lattice
                .index_of(label)
                .ok_or_else(|| format!("unknown element `{label}` in join family"))?;
            mask |= 1 << i;
        }
        masks.push(mask);
    }
    PartialSupLattice::new(&lattice, masks).map_err(|e| e.to_string())
}

pub fn space_map_from_doc(doc: &Document) -> Result<SpaceMap, String> {
    let Document::Map { dom, cod, map } = doc else {
        return Err(format!("expected a map document, got {}", doc.kind()));
    };
    let dom_g = ground_from_labels(dom)?;
    let cod_g = ground_from_labels(cod)?;
    let pairs: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    SpaceMap::from_labels(&dom_g, &cod_g, &pairs).map_err(|e| e.to_string())
}

pub fn metric_from_doc(doc: &Document) -> Result<FiniteMetric, String> {
    let Document::Metric { points, d } = doc else {
        return Err(format!("expected a metric document, got {}", doc.kind()));
    };
    let g = ground_from_labels(points)?;
    let n = g.size();
    if d.len() != n || d.iter().any(|row| row.len() != n) {
        return Err("distance matrix must be n*n".to_string());
    }
    let mut matrix = Vec::with_capacity(n * n);
    for row in d {
        for cell in row {
            matrix.push(parse_rational(cell)?);
        }
    }
    FiniteMetric::new(&g, matrix).map_err(|e| e.to_string())
}

pub fn measure_from_doc(doc: &Document) -> Result<MeasureSpace, String> {
    let Document::Measure { atoms, mass } = doc else {
        return Err(format!("expected a measure document, got {}", doc.kind()));
    };
    let g = ground_from_labels(atoms)?;
    let mut masses = Vec::with_capacity(atoms.len());
    for label in atoms {
        let text = mass
            .get(label)
            .ok_or_else(|| format!("missing mass for atom `{label}`"))?;
        masses.push(parse_rational(text)?);
    }
    MeasureSpace::new(&g, masses).map_err(|e| e.to_string())
}

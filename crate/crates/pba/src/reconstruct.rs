//! Rebuild an exclusive algebra from a candidate atom graph, or prove that
//! none exists.
//!
//! Candidate elements are pairs `(maximal clique, subset)`; two pairs denote
//! the same join exactly when swapping the subsets against the complements
//! again yields maximal cliques. The identification is required to be an
//! equivalence, negation/meet/join must be well defined on the classes, the
//! resulting tables must validate as an exclusive algebra, and its atom graph
//! must reproduce the input vertex for vertex. The first failed condition is
//! reported; there is never a silent partial algebra.

use std::collections::{HashMap, HashSet};

use crate::algebra::{PartialBooleanAlgebra, DEFAULT_ELEMENT_CAP};
use crate::builder::{Amalgam, Part};
use crate::graph::{AtomGraph, GraphError};

/// Cap on candidate `(clique, subset)` pairs; the quadratic identification
/// scan stays desk-sized below it.
pub const RECONSTRUCT_PAIR_CAP: usize = 4096;
/// Vertex cap: subsets are stored in machine words.
pub const RECONSTRUCT_VERTEX_CAP: usize = 64;
/// Cap on maximal cliques of the candidate graph.
pub const RECONSTRUCT_CLIQUE_CAP: usize = 10_000;

/// Why a graph admits no exclusive algebra with that atom graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealizabilityFailure {
    /// No algebra has an empty atom graph; the bounds alone already have
    /// atom `1`.
    EmptyGraph,
    /// The join identification is not transitive.
    NotTransitive { first: String, second: String },
    /// Meet, join or negation would differ across shared contexts.
    IllDefined(String),
    /// The assembled tables violate an algebra axiom.
    NotBoolean {
        axiom: String,
        witnesses: Vec<String>,
    },
    /// The assembled algebra has an exclusive but incompatible pair.
    NotExclusive,
    /// Two vertices collapse into one atom.
    AtomCollapsed { first: String, second: String },
    /// The assembled algebra has atoms beyond the input vertices.
    ExtraAtoms { count: usize },
    /// Adjacency of the rebuilt atom graph differs from the input.
    EdgeMismatch { first: String, second: String },
}

impl std::fmt::Display for RealizabilityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealizabilityFailure::EmptyGraph => write!(f, "graph has no vertices"),
            RealizabilityFailure::NotTransitive { first, second } => write!(
                f,
                "join identification is not transitive: {first} and {second} fall in one class without being directly identified"
            ),
            RealizabilityFailure::IllDefined(what) => write!(f, "{what}"),
            RealizabilityFailure::NotBoolean { axiom, witnesses } => write!(
                f,
                "assembled tables violate `{axiom}` (witnesses: {})",
                witnesses.join(", ")
            ),
            RealizabilityFailure::NotExclusive => {
                write!(f, "assembled algebra has an exclusive incompatible pair")
            }
            RealizabilityFailure::AtomCollapsed { first, second } => {
                write!(f, "vertices {first} and {second} collapse into one atom")
            }
            RealizabilityFailure::ExtraAtoms { count } => {
                write!(f, "assembled algebra has {count} atoms not among the vertices")
            }
            RealizabilityFailure::EdgeMismatch { first, second } => write!(
                f,
                "adjacency of {first} and {second} differs between input and rebuilt atom graph"
            ),
        }
    }
}

/// Outcome of [`reconstruct`].
#[derive(Debug, Clone)]
pub enum ReconstructionResult {
    Realizable {
        algebra: PartialBooleanAlgebra,
        /// `atom_map[vertex] = element index` of the corresponding atom.
        atom_map: Vec<usize>,
    },
    NotRealizable(RealizabilityFailure),
}

impl ReconstructionResult {
    pub fn realizable(&self) -> Option<(&PartialBooleanAlgebra, &[usize])> {
        match self {
            ReconstructionResult::Realizable { algebra, atom_map } => Some((algebra, atom_map)),
            ReconstructionResult::NotRealizable(_) => None,
        }
    }
}

pub fn reconstruct(graph: &AtomGraph) -> Result<ReconstructionResult, GraphError> {
    reconstruct_capped(graph, RECONSTRUCT_PAIR_CAP)
}

pub fn reconstruct_capped(
    graph: &AtomGraph,
    pair_cap: usize,
) -> Result<ReconstructionResult, GraphError> {
    use ReconstructionResult::{NotRealizable, Realizable};

    if graph.is_empty() {
        return Ok(NotRealizable(RealizabilityFailure::EmptyGraph));
    }
    if graph.len() > RECONSTRUCT_VERTEX_CAP {
        return Err(GraphError::CapExceeded(format!(
            "reconstruction capped at {RECONSTRUCT_VERTEX_CAP} vertices"
        )));
    }
    let cover = graph.maximal_cliques()?;
    let cliques = &cover.cliques;
    if cliques.len() > RECONSTRUCT_CLIQUE_CAP {
        return Err(GraphError::CapExceeded(format!(
            "more than {RECONSTRUCT_CLIQUE_CAP} maximal cliques"
        )));
    }
    let clique_masks: Vec<u64> = cliques.iter().map(|c| mask_of(c)).collect();
    let clique_set: HashSet<u64> = clique_masks.iter().copied().collect();

    let total_pairs: usize = cliques.iter().map(|c| 1usize << c.len()).sum();
    if total_pairs > pair_cap {
        return Err(GraphError::CapExceeded(format!(
            "{total_pairs} candidate (clique, subset) pairs exceed cap {pair_cap}"
        )));
    }

    // All candidate pairs, as global vertex masks.
    let mut pairs: Vec<(usize, u64)> = Vec::with_capacity(total_pairs);
    for (ci, &cm) in clique_masks.iter().enumerate() {
        let mut sub = cm;
        loop {
            pairs.push((ci, sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & cm;
        }
    }
    pairs.sort_unstable();

    // Two pairs denote one element iff both swapped unions are maximal cliques.
    let related = |&(c1, a1): &(usize, u64), &(c2, a2): &(usize, u64)| -> bool {
        let u = (clique_masks[c1] & !a1) | a2;
        let w = a1 | (clique_masks[c2] & !a2);
        clique_set.contains(&u) && clique_set.contains(&w)
    };

    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if related(&pairs[i], &pairs[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }

    // The union must already be transitive: members of a class are pairwise
    // related directly.
    let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..pairs.len() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    let mut roots: Vec<usize> = classes.keys().copied().collect();
    roots.sort_unstable();
    for &r in &roots {
        let members = &classes[&r];
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                if !related(&pairs[i], &pairs[j]) {
                    return Ok(NotRealizable(RealizabilityFailure::NotTransitive {
                        first: describe_pair(graph, cliques, pairs[i]),
                        second: describe_pair(graph, cliques, pairs[j]),
                    }));
                }
            }
        }
    }

    // Assemble tables through the shared context builder. Identifications
    // link every class member to the class representative.
    let contexts: Vec<Vec<String>> = cliques
        .iter()
        .map(|c| c.iter().map(|&v| graph.label(v).to_string()).collect())
        .collect();
    let to_part = |&(ci, gmask): &(usize, u64)| -> Part {
        let mut local = 0u64;
        for (bit, &v) in cliques[ci].iter().enumerate() {
            if gmask >> v & 1 == 1 {
                local |= 1 << bit;
            }
        }
        (ci, local)
    };
    let mut identifications = Vec::new();
    for &r in &roots {
        let members = &classes[&r];
        let rep = to_part(&pairs[members[0]]);
        for &m in &members[1..] {
            identifications.push((rep, to_part(&pairs[m])));
        }
    }
    let assembled = match (Amalgam {
        contexts,
        identifications,
        overrides: vec![],
    })
    .assemble_with_lookup()
    {
        Ok(a) => a,
        Err(e) => {
            return Ok(NotRealizable(RealizabilityFailure::IllDefined(
                e.to_string(),
            )))
        }
    };
    let algebra = assembled.algebra;

    // Post checks: the tables must validate, satisfy exclusivity, and give
    // back exactly the input graph.
    let report = algebra
        .validate(DEFAULT_ELEMENT_CAP)
        .map_err(|e| GraphError::CapExceeded(e.to_string()))?;
    if let Some(v) = report.violations.first() {
        return Ok(NotRealizable(RealizabilityFailure::NotBoolean {
            axiom: v.axiom.to_string(),
            witnesses: v.witnesses.clone(),
        }));
    }
    if !algebra.satisfies_lep() {
        return Ok(NotRealizable(RealizabilityFailure::NotExclusive));
    }

    let mut atom_map = Vec::with_capacity(graph.len());
    for v in 0..graph.len() {
        let ci = cliques
            .iter()
            .position(|c| c.contains(&v))
            .expect("clique cover spans all vertices");
        let bit = cliques[ci].iter().position(|&u| u == v).unwrap();
        atom_map.push(assembled.lookup[ci][1usize << bit]);
    }
    for (u, &eu) in atom_map.iter().enumerate() {
        for (v, &ev) in atom_map.iter().enumerate().skip(u + 1) {
            if eu == ev {
                return Ok(NotRealizable(RealizabilityFailure::AtomCollapsed {
                    first: graph.label(u).to_string(),
                    second: graph.label(v).to_string(),
                }));
            }
        }
    }
    let atoms: HashSet<usize> = algebra.atoms().into_iter().collect();
    let mapped: HashSet<usize> = atom_map.iter().copied().collect();
    if atoms != mapped {
        return Ok(NotRealizable(RealizabilityFailure::ExtraAtoms {
            count: atoms.difference(&mapped).count(),
        }));
    }
    for u in 0..graph.len() {
        for v in u + 1..graph.len() {
            if graph.adjacent(u, v) != algebra.compat(atom_map[u], atom_map[v]) {
                return Ok(NotRealizable(RealizabilityFailure::EdgeMismatch {
                    first: graph.label(u).to_string(),
                    second: graph.label(v).to_string(),
                }));
            }
        }
    }

    Ok(Realizable { algebra, atom_map })
}

fn mask_of(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0u64, |m, &v| m | 1 << v)
}

fn describe_pair(graph: &AtomGraph, cliques: &[Vec<usize>], (ci, mask): (usize, u64)) -> String {
    let names: Vec<&str> = (0..64)
        .filter(|&v| mask >> v & 1 == 1)
        .map(|v| graph.label(v))
        .collect();
    let clique: Vec<&str> = cliques[ci].iter().map(|&v| graph.label(v)).collect();
    format!(
        "[{{{}}} in clique {{{}}}]",
        names.join(","),
        clique.join(",")
    )
}

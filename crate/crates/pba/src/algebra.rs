//! Finite partial Boolean algebras with explicit operation tables.
//!
//! An algebra is a finite carrier with a reflexive symmetric compatibility
//! relation, meet/join tables defined exactly on compatible pairs, a total
//! negation, and distinguished `zero`/`one`. Every maximal pairwise-compatible
//! subset must close into a Boolean algebra; [`PartialBooleanAlgebra::validate`]
//! decides this exhaustively.

use std::collections::HashMap;

use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::graph::{enumerate_cliques_on, AtomGraph};

/// Sentinel for "table entry undefined".
const NONE: u32 = u32::MAX;

/// Default cap on carrier size for validation and construction.
pub const DEFAULT_ELEMENT_CAP: usize = 4096;

/// Default node budget for the isomorphism search.
pub const DEFAULT_ISO_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("{op} defined on non-compatible pair ({a}, {b})")]
    MalformedTable {
        op: &'static str,
        a: String,
        b: String,
    },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("search budget exceeded after {0} nodes")]
    SearchBudgetExceeded(u64),
}

/// A finite partial Boolean algebra. Elements are dense indices `0..n`;
/// labels carry the external identity.
#[derive(Debug, Clone)]
pub struct PartialBooleanAlgebra {
    labels: Vec<String>,
    by_label: HashMap<String, usize>,
    zero: usize,
    one: usize,
    compat: BitMatrix,
    meet: Vec<u32>,
    join: Vec<u32>,
    neg: Vec<u32>,
}

/// A Boolean subalgebra, stored as its member indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub members: Vec<usize>,
    pub is_maximal: bool,
}

/// One failed axiom with the elements that witness the failure.
#[derive(Debug, Clone)]
pub struct Violation {
    pub axiom: &'static str,
    pub witnesses: Vec<String>,
}

/// Outcome of [`PartialBooleanAlgebra::validate`]. `ok` iff no violations.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Raw table-level description, as parsed from JSON or assembled by builders.
/// Pairs are unordered and listed once; reflexive compatibility is implicit.
#[derive(Debug, Clone, Default)]
pub struct RawAlgebra {
    pub elements: Vec<String>,
    pub zero: String,
    pub one: String,
    pub compat: Vec<(String, String)>,
    pub meet: Vec<(String, String, String)>,
    pub join: Vec<(String, String, String)>,
    pub neg: Vec<(String, String)>,
}

impl PartialBooleanAlgebra {
    /// Assemble an algebra from raw tables. Fails on unknown labels,
    /// duplicate labels, conflicting entries, or meet/join entries off the
    /// compatibility relation. Axiom-level checking is left to `validate`.
    pub fn from_raw(raw: &RawAlgebra) -> Result<Self, AlgebraError> {
        let n = raw.elements.len();
        let mut by_label = HashMap::with_capacity(n);
        for (i, l) in raw.elements.iter().enumerate() {
            if by_label.insert(l.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateLabel(l.clone()));
            }
        }
        let id = |l: &String| -> Result<usize, AlgebraError> {
            by_label
                .get(l)
                .copied()
                .ok_or_else(|| AlgebraError::UnknownElement(l.clone()))
        };
        let zero = id(&raw.zero)?;
        let one = id(&raw.one)?;

        let mut compat = BitMatrix::new(n);
        for i in 0..n {
            compat.set(i, i, true);
        }
        for (a, b) in &raw.compat {
            let (a, b) = (id(a)?, id(b)?);
            compat.set(a, b, true);
            compat.set(b, a, true);
        }

        let mut meet = vec![NONE; n * n];
        let mut join = vec![NONE; n * n];
        let fill = |table: &mut Vec<u32>,
                    op: &'static str,
                    entries: &[(String, String, String)]|
         -> Result<(), AlgebraError> {
            for (a, b, r) in entries {
                let (a, b, r) = (id(a)?, id(b)?, id(r)?);
                if !compat.get(a, b) || (table[a * n + b] != NONE && table[a * n + b] != r as u32) {
                    return Err(AlgebraError::MalformedTable {
                        op,
                        a: raw.elements[a].clone(),
                        b: raw.elements[b].clone(),
                    });
                }
                table[a * n + b] = r as u32;
                table[b * n + a] = r as u32;
            }
            Ok(())
        };
        fill(&mut meet, "meet", &raw.meet)?;
        fill(&mut join, "join", &raw.join)?;

        // Entries forced by the axioms may be omitted from the input:
        // idempotent diagonals and the rows against the bounds.
        for x in 0..n {
            if meet[x * n + x] == NONE {
                meet[x * n + x] = x as u32;
            }
            if join[x * n + x] == NONE {
                join[x * n + x] = x as u32;
            }
            for (bound, meet_result, join_result) in [(zero, zero, x), (one, x, one)] {
                if compat.get(x, bound) {
                    for (table, result) in [(&mut meet, meet_result), (&mut join, join_result)] {
                        if table[x * n + bound] == NONE {
                            table[x * n + bound] = result as u32;
                            table[bound * n + x] = result as u32;
                        }
                    }
                }
            }
        }

        let mut neg = vec![NONE; n];
        for (a, r) in &raw.neg {
            let (a, r) = (id(a)?, id(r)?);
            if neg[a] != NONE && neg[a] != r as u32 {
                return Err(AlgebraError::MalformedTable {
                    op: "neg",
                    a: raw.elements[a].clone(),
                    b: raw.elements[r].clone(),
                });
            }
            neg[a] = r as u32;
        }
        if let Some(missing) = neg.iter().position(|&x| x == NONE) {
            return Err(AlgebraError::UnknownElement(format!(
                "neg undefined for `{}`",
                raw.elements[missing]
            )));
        }

        Ok(PartialBooleanAlgebra {
            labels: raw.elements.clone(),
            by_label,
            zero,
            one,
            compat,
            meet,
            join,
            neg,
        })
    }

    /// Direct constructor for in-crate builders that already hold dense
    /// tables. Invariants are the caller's responsibility; `validate` stays
    /// available for checking.
    pub(crate) fn from_parts(
        labels: Vec<String>,
        zero: usize,
        one: usize,
        compat: BitMatrix,
        meet: Vec<u32>,
        join: Vec<u32>,
        neg: Vec<u32>,
    ) -> Self {
        let by_label = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        PartialBooleanAlgebra {
            labels,
            by_label,
            zero,
            one,
            compat,
            meet,
            join,
            neg,
        }
    }

    /// Export back to the raw table form (sorted, unordered pairs once).
    pub fn to_raw(&self) -> RawAlgebra {
        let n = self.len();
        let mut raw = RawAlgebra {
            elements: self.labels.clone(),
            zero: self.labels[self.zero].clone(),
            one: self.labels[self.one].clone(),
            ..Default::default()
        };
        for a in 0..n {
            for b in a + 1..n {
                if self.compat.get(a, b) {
                    raw.compat
                        .push((self.labels[a].clone(), self.labels[b].clone()));
                }
            }
        }
        for a in 0..n {
            for b in a..n {
                if let Some(r) = self.meet(a, b) {
                    raw.meet.push((
                        self.labels[a].clone(),
                        self.labels[b].clone(),
                        self.labels[r].clone(),
                    ));
                }
                if let Some(r) = self.join(a, b) {
                    raw.join.push((
                        self.labels[a].clone(),
                        self.labels[b].clone(),
                        self.labels[r].clone(),
                    ));
                }
            }
        }
        for a in 0..n {
            raw.neg
                .push((self.labels[a].clone(), self.labels[self.neg(a)].clone()));
        }
        raw
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    pub fn element_checked(&self, label: &str) -> Result<usize, AlgebraError> {
        self.element(label)
            .ok_or_else(|| AlgebraError::UnknownElement(label.to_string()))
    }

    /// Relabel one element; the new label must be unused.
    pub fn rename_element(&mut self, e: usize, label: String) -> Result<(), AlgebraError> {
        if self.by_label.contains_key(&label) {
            return Err(AlgebraError::DuplicateLabel(label));
        }
        self.by_label.remove(&self.labels[e]);
        self.by_label.insert(label.clone(), e);
        self.labels[e] = label;
        Ok(())
    }

    pub fn compat(&self, a: usize, b: usize) -> bool {
        self.compat.get(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let r = self.meet[a * self.len() + b];
        (r != NONE).then_some(r as usize)
    }

    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let r = self.join[a * self.len() + b];
        (r != NONE).then_some(r as usize)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    /// Partial order: `a ≤ b` iff the pair is compatible and `a ∧ b = a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.compat.get(a, b) && self.meet[a * self.len() + b] == a as u32
    }

    /// `a ⊥ b`: some `c` has `a ≤ c` and `b ≤ ¬c`. Exhaustive scan.
    pub fn exclusive(&self, a: usize, b: usize) -> bool {
        (0..self.len()).any(|c| self.leq(a, c) && self.leq(b, self.neg(c)))
    }

    fn up_row(&self, a: usize) -> Vec<u64> {
        let n = self.len();
        let mut row = vec![0u64; crate::bits::blocks_for(n)];
        for c in 0..n {
            if self.leq(a, c) {
                row[c / 64] |= 1 << (c % 64);
            }
        }
        row
    }

    fn upn_row(&self, b: usize) -> Vec<u64> {
        let n = self.len();
        let mut row = vec![0u64; crate::bits::blocks_for(n)];
        for c in 0..n {
            if self.leq(b, self.neg(c)) {
                row[c / 64] |= 1 << (c % 64);
            }
        }
        row
    }

    /// Up-set rows of the partial order: `up[a] = { c : a ≤ c }`.
    pub(crate) fn up_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.len(), crate::exec::map(self.len(), |a| self.up_row(a)))
    }

    /// Rows `upn[b] = { c : b ≤ ¬c }`, so that `a ⊥ b` iff `up[a] ∩ upn[b] ≠ ∅`.
    pub(crate) fn upn_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(
            self.len(),
            crate::exec::map(self.len(), |b| self.upn_row(b)),
        )
    }

    /// Sequential builds for the reference paths.
    pub(crate) fn up_matrix_serial(&self) -> BitMatrix {
        BitMatrix::from_rows(
            self.len(),
            (0..self.len()).map(|a| self.up_row(a)).collect(),
        )
    }

    pub(crate) fn upn_matrix_serial(&self) -> BitMatrix {
        BitMatrix::from_rows(
            self.len(),
            (0..self.len()).map(|b| self.upn_row(b)).collect(),
        )
    }

    pub(crate) fn lep_row_ok(&self, up: &BitMatrix, upn: &BitMatrix, a: usize) -> bool {
        (0..self.len()).all(|b| self.compat.get(a, b) || !bits::intersects(up.row(a), upn.row(b)))
    }

    pub(crate) fn transitive_row_ok(&self, up: &BitMatrix, a: usize) -> bool {
        bits::ones(up.row(a)).all(|b| bits::is_subset(up.row(b), up.row(a)))
    }

    /// Exclusivity (every exclusive pair is compatible).
    pub fn satisfies_lep(&self) -> bool {
        let up = self.up_matrix();
        let upn = self.upn_matrix();
        crate::exec::all(self.len(), |a| self.lep_row_ok(&up, &upn, a))
    }

    /// Transitivity of the partial order over all triples.
    pub fn is_transitive(&self) -> bool {
        let up = self.up_matrix();
        crate::exec::all(self.len(), |a| self.transitive_row_ok(&up, a))
    }

    /// Minimal nonzero elements: `x ≤ a` forces `x ∈ {0, a}`.
    pub fn atoms(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| {
                a != self.zero
                    && (0..self.len()).all(|x| !self.leq(x, a) || x == self.zero || x == a)
            })
            .collect()
    }

    /// Atoms of a context: minimal nonzero members under the order restricted
    /// to the context.
    pub fn context_atoms(&self, ctx: &Context) -> Vec<usize> {
        ctx.members
            .iter()
            .copied()
            .filter(|&a| {
                a != self.zero
                    && ctx
                        .members
                        .iter()
                        .all(|&x| !self.leq(x, a) || x == self.zero || x == a)
            })
            .collect()
    }

    /// All maximal pairwise-compatible subsets, each of which must be (and in
    /// a valid algebra is) a maximal Boolean subalgebra. Deterministic order.
    pub fn maximal_contexts(&self) -> Result<Vec<Context>, AlgebraError> {
        self.maximal_contexts_capped(1_000_000)
    }

    pub fn maximal_contexts_capped(&self, clique_cap: usize) -> Result<Vec<Context>, AlgebraError> {
        let sets = enumerate_cliques_on(&self.compat, true, clique_cap)
            .map_err(|_| AlgebraError::CapExceeded(format!("more than {clique_cap} contexts")))?;
        Ok(sets
            .into_iter()
            .map(|members| Context {
                members,
                is_maximal: true,
            })
            .collect())
    }

    /// Check every algebra invariant, including the Boolean-subalgebra
    /// condition on all maximal pairwise-compatible sets.
    pub fn validate(&self, cap: usize) -> Result<ValidationReport, AlgebraError> {
        let n = self.len();
        if n > cap {
            return Err(AlgebraError::CapExceeded(format!(
                "{n} elements exceed cap {cap}"
            )));
        }
        let mut violations = Vec::new();
        let mut push = |axiom: &'static str, ws: &[usize]| {
            violations.push(Violation {
                axiom,
                witnesses: ws.iter().map(|&w| self.labels[w].clone()).collect(),
            });
        };

        if self.zero == self.one {
            push("zero_ne_one", &[self.zero]);
        }
        for a in 0..n {
            if !self.compat.get(a, a) {
                push("compat_reflexive", &[a]);
            }
            if self.neg(self.neg(a)) != a {
                push("neg_involution", &[a]);
            }
            if !self.compat.get(a, self.zero) || !self.compat.get(a, self.one) {
                push("compat_with_bounds", &[a]);
            }
            if !self.compat.get(a, self.neg(a)) {
                push("compat_with_negation", &[a]);
            }
            for b in a..n {
                if self.compat.get(a, b) != self.compat.get(b, a) {
                    push("compat_symmetric", &[a, b]);
                }
                if self.compat.get(a, b) {
                    if self.meet(a, b).is_none() {
                        push("meet_total_on_compat", &[a, b]);
                    }
                    if self.join(a, b).is_none() {
                        push("join_total_on_compat", &[a, b]);
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Ok(ValidationReport { violations });
        }

        let contexts = self.maximal_contexts()?;
        let results =
            crate::exec::map(contexts.len(), |i| self.check_boolean(&contexts[i].members));
        for r in results {
            if let Err(v) = r {
                violations.push(v);
            }
        }
        Ok(ValidationReport { violations })
    }

    /// Verify that the member set, with the algebra's tables, is exactly the
    /// power-set algebra of its minimal nonzero members.
    fn check_boolean(&self, members: &[usize]) -> Result<(), Violation> {
        let fail = |axiom: &'static str, ws: &[usize]| {
            Err(Violation {
                axiom,
                witnesses: ws.iter().map(|&w| self.labels[w].clone()).collect(),
            })
        };
        let inside: std::collections::HashSet<usize> = members.iter().copied().collect();
        if !inside.contains(&self.zero) || !inside.contains(&self.one) {
            return fail("context_contains_bounds", members);
        }
        for &x in members {
            if !inside.contains(&self.neg(x)) {
                return fail("context_closed_under_neg", &[x]);
            }
            for &y in members {
                match (self.meet(x, y), self.join(x, y)) {
                    (Some(m), Some(j)) => {
                        if !inside.contains(&m) || !inside.contains(&j) {
                            return fail("context_closed_under_ops", &[x, y]);
                        }
                    }
                    _ => return fail("context_ops_defined", &[x, y]),
                }
            }
        }
        // Atoms within the member set.
        let atoms: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&a| {
                a != self.zero
                    && members
                        .iter()
                        .all(|&x| !self.leq(x, a) || x == self.zero || x == a)
            })
            .collect();
        if atoms.len() > 60 || members.len() != 1usize << atoms.len() {
            return fail("context_powerset_cardinality", members);
        }
        // Element -> atom-set bitmask; must be a bijection matching the tables.
        let mut mask_of = HashMap::new();
        for &e in members {
            let mut mask = 0u64;
            for (i, &a) in atoms.iter().enumerate() {
                if self.leq(a, e) {
                    mask |= 1 << i;
                }
            }
            if mask_of.insert(e, mask).is_some() {
                return fail("context_duplicate_member", &[e]);
            }
        }
        let mut seen = std::collections::HashSet::new();
        if !mask_of.values().all(|&m| seen.insert(m)) {
            return fail("context_atoms_separate_elements", members);
        }
        let full = if atoms.is_empty() {
            0
        } else {
            (1u64 << atoms.len()) - 1
        };
        for (&e, &me) in &mask_of {
            if self.neg(e) != self.zero && mask_of[&self.neg(e)] != full & !me {
                return fail("context_complement", &[e]);
            }
            for (&f, &mf) in &mask_of {
                if mask_of[&self.meet(e, f).unwrap()] != me & mf {
                    return fail("context_meet_is_intersection", &[e, f]);
                }
                if mask_of[&self.join(e, f).unwrap()] != me | mf {
                    return fail("context_join_is_union", &[e, f]);
                }
            }
        }
        if mask_of[&self.zero] != 0 || mask_of[&self.one] != full {
            return fail("context_bounds_are_extremes", members);
        }
        Ok(())
    }

    /// Atom graph: vertices are atoms, edges join distinct compatible atoms.
    pub fn atom_graph(&self) -> AtomGraph {
        let atoms = self.atoms();
        let labels: Vec<String> = atoms.iter().map(|&a| self.labels[a].clone()).collect();
        let mut g = AtomGraph::new(labels);
        for (i, &a) in atoms.iter().enumerate() {
            for (j, &b) in atoms.iter().enumerate().skip(i + 1) {
                if self.compat.get(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

//! Structure-preserving bijections between partial Boolean algebras.
//!
//! Backtracking over elements with invariant pruning. Assigning an element
//! propagates: negations map together, and meets/joins of already-mapped
//! compatible pairs force further images. On powerset-like algebras the
//! search therefore branches only on atoms.

use crate::algebra::{AlgebraError, PartialBooleanAlgebra};

/// Element cap for the isomorphism search.
pub const ISO_ELEMENT_CAP: usize = 2048;

const UNSET: usize = usize::MAX;

type Inv = (usize, usize, usize, bool, usize);

fn invariants(b: &PartialBooleanAlgebra) -> Vec<Inv> {
    let n = b.len();
    let mut down = vec![0usize; n];
    let mut up = vec![0usize; n];
    let mut cdeg = vec![0usize; n];
    for a in 0..n {
        for x in 0..n {
            if b.compat(a, x) {
                cdeg[a] += 1;
            }
            if b.leq(x, a) {
                down[a] += 1;
            }
            if b.leq(a, x) {
                up[a] += 1;
            }
        }
    }
    let atoms: std::collections::HashSet<usize> = b.atoms().into_iter().collect();
    (0..n)
        .map(|a| (cdeg[a], down[a], up[a], atoms.contains(&a), down[b.neg(a)]))
        .collect()
}

struct Search<'a> {
    b1: &'a PartialBooleanAlgebra,
    b2: &'a PartialBooleanAlgebra,
    inv1: Vec<Inv>,
    inv2: Vec<Inv>,
    mapping: Vec<usize>,
    rev: Vec<usize>,
    trail: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Map `v -> w` and everything it forces. `Ok(false)` leaves a partial
    /// trail behind; the caller unwinds to its checkpoint.
    fn assign(&mut self, v: usize, w: usize) -> Result<bool, AlgebraError> {
        let mut queue = vec![(v, w)];
        while let Some((v, w)) = queue.pop() {
            if self.mapping[v] != UNSET {
                if self.mapping[v] == w {
                    continue;
                }
                return Ok(false);
            }
            if self.rev[w] != UNSET || self.inv1[v] != self.inv2[w] {
                return Ok(false);
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(AlgebraError::SearchBudgetExceeded(self.budget));
            }
            self.mapping[v] = w;
            self.rev[w] = v;
            self.trail.push(v);
            queue.push((self.b1.neg(v), self.b2.neg(w)));
            for idx in 0..self.trail.len() {
                let u = self.trail[idx];
                let mu = self.mapping[u];
                if self.b1.compat(v, u) != self.b2.compat(w, mu) {
                    return Ok(false);
                }
                if self.b1.compat(v, u) {
                    match (self.b1.meet(v, u), self.b2.meet(w, mu)) {
                        (Some(m1), Some(m2)) => queue.push((m1, m2)),
                        (None, None) => {}
                        _ => return Ok(false),
                    }
                    match (self.b1.join(v, u), self.b2.join(w, mu)) {
                        (Some(j1), Some(j2)) => queue.push((j1, j2)),
                        (None, None) => {}
                        _ => return Ok(false),
                    }
                }
            }
        }
        Ok(true)
    }

    fn unwind(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let w = self.mapping[v];
            self.mapping[v] = UNSET;
            self.rev[w] = UNSET;
        }
    }

    fn search(&mut self, order: &[usize]) -> Result<bool, AlgebraError> {
        let v = match order.iter().find(|&&v| self.mapping[v] == UNSET) {
            Some(&v) => v,
            None => return Ok(true),
        };
        for w in 0..self.b2.len() {
            if self.rev[w] != UNSET || self.inv2[w] != self.inv1[v] {
                continue;
            }
            let mark = self.trail.len();
            match self.assign(v, w) {
                Ok(true) => {
                    if self.search(order)? {
                        return Ok(true);
                    }
                    self.unwind(mark);
                }
                Ok(false) => self.unwind(mark),
                Err(e) => return Err(e),
            }
        }
        Ok(false)
    }
}

/// A bijection preserving compatibility, meet, join, negation and the bounds,
/// if one exists. Returned as `mapping[element of b1] = element of b2`.
pub fn are_isomorphic(
    b1: &PartialBooleanAlgebra,
    b2: &PartialBooleanAlgebra,
    budget: u64,
) -> Result<Option<Vec<usize>>, AlgebraError> {
    if b1.len() > ISO_ELEMENT_CAP || b2.len() > ISO_ELEMENT_CAP {
        return Err(AlgebraError::CapExceeded(format!(
            "isomorphism search capped at {ISO_ELEMENT_CAP} elements"
        )));
    }
    if b1.len() != b2.len() {
        return Ok(None);
    }
    let inv1 = invariants(b1);
    let inv2 = invariants(b2);
    {
        let mut s1 = inv1.clone();
        let mut s2 = inv2.clone();
        s1.sort_unstable();
        s2.sort_unstable();
        if s1 != s2 {
            return Ok(None);
        }
    }
    let n = b1.len();
    let mut class_size = std::collections::HashMap::new();
    for i in &inv1 {
        *class_size.entry(*i).or_insert(0usize) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class_size[&inv1[v]], v));

    let mut s = Search {
        b1,
        b2,
        inv1,
        inv2,
        mapping: vec![UNSET; n],
        rev: vec![UNSET; n],
        trail: Vec::new(),
        nodes: 0,
        budget,
    };
    if !s.assign(b1.zero(), b2.zero())? || !s.assign(b1.one(), b2.one())? {
        return Ok(None);
    }
    if !s.search(&order)? {
        return Ok(None);
    }
    let mapping = s.mapping;
    debug_assert!(verify(b1, b2, &mapping));
    Ok(Some(mapping))
}

/// Full structure-preservation check for a candidate bijection.
pub fn verify(b1: &PartialBooleanAlgebra, b2: &PartialBooleanAlgebra, mapping: &[usize]) -> bool {
    let n = b1.len();
    if mapping.len() != n || b2.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &w in mapping {
        if w >= n || seen[w] {
            return false;
        }
        seen[w] = true;
    }
    if mapping[b1.zero()] != b2.zero() || mapping[b1.one()] != b2.one() {
        return false;
    }
    for a in 0..n {
        if mapping[b1.neg(a)] != b2.neg(mapping[a]) {
            return false;
        }
        for b in 0..n {
            if b1.compat(a, b) != b2.compat(mapping[a], mapping[b]) {
                return false;
            }
            if b1.meet(a, b).map(|m| mapping[m]) != b2.meet(mapping[a], mapping[b]) {
                return false;
            }
            if b1.join(a, b).map(|j| mapping[j]) != b2.join(mapping[a], mapping[b]) {
                return false;
            }
        }
    }
    true
}

//! Assembly of partial Boolean algebras from glued Boolean contexts.
//!
//! A context is given by its ordered atom labels; its elements are the
//! subsets of those atoms. Distinct contexts are glued by identifying
//! subset pairs. The builder closes identifications under complement,
//! derives element labels, and checks that meet, join and negation are
//! well defined across every shared context.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::PartialBooleanAlgebra;
use crate::bits::BitMatrix;

/// A `(context, subset)` pair; the subset is a bitmask over the context's
/// atom list.
pub(crate) type Part = (usize, u64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum AmalgamError {
    MeetInconsistent { x: String, y: String },
    JoinInconsistent { x: String, y: String },
    NegInconsistent { x: String },
    LabelClash(String),
}

impl std::fmt::Display for AmalgamError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AmalgamError::MeetInconsistent { x, y } => {
                write!(f, "meet of {x} and {y} differs across shared contexts")
            }
            AmalgamError::JoinInconsistent { x, y } => {
                write!(f, "join of {x} and {y} differs across shared contexts")
            }
            AmalgamError::NegInconsistent { x } => {
                write!(f, "negation of {x} differs across contexts")
            }
            AmalgamError::LabelClash(l) => {
                write!(f, "two distinct elements would be labeled `{l}`")
            }
        }
    }
}

pub(crate) struct Amalgam {
    /// Ordered atom labels per context.
    pub contexts: Vec<Vec<String>>,
    /// Subset pairs to identify across contexts.
    pub identifications: Vec<(Part, Part)>,
    /// Label overrides, applied before automatic naming.
    pub overrides: Vec<(Part, String)>,
}

/// Assembled algebra plus the `(context, subset) -> element` lookup.
pub(crate) struct Assembled {
    pub algebra: PartialBooleanAlgebra,
    /// `lookup[ctx][subset mask] = element index`.
    pub lookup: Vec<Vec<usize>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeping representatives lexicographically least
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl Amalgam {
    pub fn assemble(&self) -> Result<PartialBooleanAlgebra, AmalgamError> {
        self.assemble_with_lookup().map(|a| a.algebra)
    }

    pub fn assemble_with_lookup(&self) -> Result<Assembled, AmalgamError> {
        let k = self.contexts.len();
        assert!(k > 0, "at least one context required");
        let sizes: Vec<usize> = self.contexts.iter().map(|c| c.len()).collect();
        assert!(sizes.iter().all(|&s| s > 0 && s <= 60));
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0usize, |acc, &s| {
                let o = *acc;
                *acc += 1usize << s;
                Some(o)
            })
            .collect();
        let total: usize = sizes.iter().map(|&s| 1usize << s).sum();
        assert!(
            total <= 1 << 20,
            "amalgam too large; cap candidate parts upstream"
        );
        let index = |(c, m): Part| offsets[c] + m as usize;
        let full = |c: usize| (1u64 << sizes[c]) - 1;

        let mut uf = UnionFind::new(total);
        let link = |uf: &mut UnionFind, a: Part, b: Part| {
            uf.union(index(a), index(b));
            uf.union(
                index((a.0, full(a.0) & !a.1)),
                index((b.0, full(b.0) & !b.1)),
            );
        };
        for c in 1..k {
            link(&mut uf, (0, 0), (c, 0));
        }
        for &(a, b) in &self.identifications {
            link(&mut uf, a, b);
        }

        // Classes in representative order.
        let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut members: Vec<Vec<Part>> = Vec::new();
        for c in 0..k {
            for m in 0..=full(c) {
                let root = uf.find(index((c, m)));
                let next = members.len();
                let id = *class_of_root.entry(root).or_insert(next);
                if id == members.len() {
                    members.push(Vec::new());
                }
                members[id].push((c, m));
            }
        }
        let n = members.len();
        let class_of = |uf: &mut UnionFind, p: Part| class_of_root[&uf.find(index(p))];

        // Per-class context -> subset map; a class may hold one subset per context.
        let mut in_ctx: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
        for (id, parts) in members.iter().enumerate() {
            for &(c, m) in parts {
                if let Some(&prev) = in_ctx[id].get(&c) {
                    if prev != m {
                        // two subsets of one context collapsed; negation cannot
                        // stay a function
                        return Err(AmalgamError::NegInconsistent {
                            x: describe(&self.contexts, (c, m)),
                        });
                    }
                } else {
                    in_ctx[id].insert(c, m);
                }
            }
        }

        let zero = class_of(&mut uf, (0, 0));
        let one = class_of(&mut uf, (0, full(0)));

        // Labels. Explicit overrides must be consistent and unique; derived
        // names fall back to an indexed form on collision, so naming can
        // never make an otherwise consistent gluing fail.
        let override_map: HashMap<Part, &str> = self
            .overrides
            .iter()
            .map(|(p, l)| (*p, l.as_str()))
            .collect();
        let mut labels = vec![String::new(); n];
        let mut taken: HashMap<String, usize> = HashMap::new();
        for (id, parts) in members.iter().enumerate() {
            let explicit: Vec<&str> = parts
                .iter()
                .filter_map(|p| override_map.get(p).copied())
                .collect();
            let (label, is_explicit) = if let Some(&l) = explicit.first() {
                if explicit.iter().any(|&o| o != l) {
                    return Err(AmalgamError::LabelClash(l.to_string()));
                }
                (l.to_string(), true)
            } else if id == zero {
                ("0".to_string(), false)
            } else if id == one {
                ("1".to_string(), false)
            } else if let Some(&(c, m)) = parts.iter().find(|&&(_, m)| m.count_ones() == 1) {
                (self.contexts[c][m.trailing_zeros() as usize].clone(), false)
            } else if let Some(&(c, m)) = parts
                .iter()
                .find(|&&(c, m)| (full(c) & !m).count_ones() == 1)
            {
                let a = (full(c) & !m).trailing_zeros() as usize;
                (format!("~{}", self.contexts[c][a]), false)
            } else {
                (describe(&self.contexts, parts[0]), false)
            };
            let mut label = label;
            if taken.contains_key(&label) {
                if is_explicit {
                    return Err(AmalgamError::LabelClash(label));
                }
                label = format!("e{id}");
                while taken.contains_key(&label) {
                    label.push('\'');
                }
            }
            taken.insert(label.clone(), id);
            labels[id] = label;
        }

        // Tables.
        let mut compat = BitMatrix::new(n);
        let mut meet = vec![u32::MAX; n * n];
        let mut join = vec![u32::MAX; n * n];
        let mut neg = vec![u32::MAX; n];

        for (id, parts) in members.iter().enumerate() {
            for &(c, m) in parts {
                let nid = class_of(&mut uf, (c, full(c) & !m));
                if neg[id] != u32::MAX && neg[id] != nid as u32 {
                    return Err(AmalgamError::NegInconsistent {
                        x: labels[id].clone(),
                    });
                }
                neg[id] = nid as u32;
            }
        }

        for x in 0..n {
            for y in x..n {
                let mut m_res: Option<usize> = None;
                let mut j_res: Option<usize> = None;
                let mut shared = false;
                for (&c, &mx) in &in_ctx[x] {
                    if let Some(&my) = in_ctx[y].get(&c) {
                        shared = true;
                        let m = class_of(&mut uf, (c, mx & my));
                        let j = class_of(&mut uf, (c, mx | my));
                        if *m_res.get_or_insert(m) != m {
                            return Err(AmalgamError::MeetInconsistent {
                                x: labels[x].clone(),
                                y: labels[y].clone(),
                            });
                        }
                        if *j_res.get_or_insert(j) != j {
                            return Err(AmalgamError::JoinInconsistent {
                                x: labels[x].clone(),
                                y: labels[y].clone(),
                            });
                        }
                    }
                }
                if shared {
                    compat.set(x, y, true);
                    compat.set(y, x, true);
                    meet[x * n + y] = m_res.unwrap() as u32;
                    meet[y * n + x] = m_res.unwrap() as u32;
                    join[x * n + y] = j_res.unwrap() as u32;
                    join[y * n + x] = j_res.unwrap() as u32;
                }
            }
        }

        let mut lookup: Vec<Vec<usize>> = Vec::with_capacity(k);
        for (c, &size) in sizes.iter().enumerate() {
            let mut per_ctx = Vec::with_capacity(1 << size);
            for m in 0..=full(c) {
                per_ctx.push(class_of(&mut uf, (c, m)));
            }
            lookup.push(per_ctx);
        }

        Ok(Assembled {
            algebra: PartialBooleanAlgebra::from_parts(labels, zero, one, compat, meet, join, neg),
            lookup,
        })
    }
}

fn describe(contexts: &[Vec<String>], (c, m): Part) -> String {
    let names: Vec<&str> = (0..contexts[c].len())
        .filter(|&i| m >> i & 1 == 1)
        .map(|i| contexts[c][i].as_str())
        .collect();
    format!("({})", names.join("|"))
}

//! Deduplication of polynomials into affine classes.

use std::collections::HashMap;

use serde::Serialize;

use crate::rmpoly::{minimize_monomials, AffineMap, Equivalence, EquivalenceSearch, Fingerprint, RMPolynomial};

/// One affine class found by a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceClass {
    #[serde(serialize_with = "as_string")]
    pub representative: RMPolynomial,
    pub m: usize,
    pub weight: usize,
    pub fingerprint: Fingerprint,
    /// Search hits attributed to this class.
    pub member_count_seen: usize,
    /// Set when an equivalence test against another class with the same
    /// invariants ran out of budget.
    pub unresolved: bool,
}

fn as_string<S: serde::Serializer>(p: &RMPolynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

type Key = (usize, usize, usize, Vec<usize>);

fn key_of(p: &RMPolynomial) -> Key {
    let mut d: Vec<usize> = (1..1usize << p.m()).map(|e| p.derivative_weight(e)).collect();
    d.sort_unstable();
    (p.m(), p.weight(), p.degree(), d)
}

/// Renames variables in order of first appearance, higher degrees first.
fn relabel(p: &RMPolynomial) -> RMPolynomial {
    let m = p.m();
    let mut cur = p.clone();
    for _ in 0..3 {
        let mut monos = cur.monomials();
        monos.sort_by_key(|&s| (std::cmp::Reverse(s.count_ones()), (0..32).filter(|i| s >> i & 1 == 1).collect::<Vec<u32>>()));
        let mut order: Vec<usize> = Vec::with_capacity(m);
        for s in monos {
            for i in 0..m {
                if s >> i & 1 == 1 && !order.contains(&i) {
                    order.push(i);
                }
            }
        }
        order.extend((0..m).filter(|i| !order.contains(i)).collect::<Vec<_>>());
        let cols: Vec<usize> = order.iter().map(|&i| 1 << i).collect();
        let a = AffineMap::from_columns(m, cols, 0).expect("permutation");
        let next = cur.apply_affine(&a).expect("same size");
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

struct Entry {
    rep: RMPolynomial,
    members: usize,
    unresolved: bool,
}

/// Accumulates polynomials, merging affine-equivalent ones.
pub struct ClassBook {
    search: EquivalenceSearch,
    entries: Vec<Entry>,
    by_key: HashMap<Key, Vec<usize>>,
}

impl Default for ClassBook {
    fn default() -> Self {
        Self::new(EquivalenceSearch::default())
    }
}

impl ClassBook {
    pub fn new(search: EquivalenceSearch) -> Self {
        Self { search, entries: Vec::new(), by_key: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `members` hits for the class of `p`; returns the class index.
    pub fn insert(&mut self, p: RMPolynomial, members: usize) -> usize {
        let key = key_of(&p);
        let ids = self.by_key.entry(key).or_default();
        let mut undecided = Vec::new();
        for &id in ids.iter() {
            match self.search.find(&self.entries[id].rep, &p) {
                Equivalence::Found(_) => {
                    self.entries[id].members += members;
                    return id;
                }
                Equivalence::Unknown => undecided.push(id),
                Equivalence::NotEquivalent => {}
            }
        }
        let id = self.entries.len();
        ids.push(id);
        for &u in &undecided {
            self.entries[u].unresolved = true;
        }
        self.entries.push(Entry { rep: p, members, unresolved: !undecided.is_empty() });
        id
    }

    /// Classes with minimized representatives, sorted by size then
    /// variable count.
    pub fn finish(self) -> Vec<EquivalenceClass> {
        let mut out: Vec<EquivalenceClass> = self
            .entries
            .into_iter()
            .map(|e| {
                let rep = relabel(&minimize_monomials(&e.rep, 20_000, 0));
                EquivalenceClass {
                    m: rep.m(),
                    weight: rep.weight(),
                    fingerprint: rep.affine_fingerprint(),
                    representative: rep,
                    member_count_seen: e.members,
                    unresolved: e.unresolved,
                }
            })
            .collect();
        out.sort_by(|a, b| {
            (a.weight, a.m, a.representative.num_monomials(), a.representative.to_string())
                .cmp(&(b.weight, b.m, b.representative.num_monomials(), b.representative.to_string()))
        });
        out
    }
}

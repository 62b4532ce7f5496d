//! XOR constraint systems `phi(a) ⊕ phi(b) = c` over F_2 unknowns.
//!
//! Solved with a union-find that tracks parity to the root. A conflicting
//! constraint closes a cycle in the spanning forest; that cycle, oriented as a
//! closed walk, is returned as the certificate of inconsistency.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::bitvec::BitVec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParityError {
    #[error("constraint endpoint {0} is not an unknown of the system")]
    UnknownEndpoint(BitVec),
    #[error("certificate is empty")]
    EmptyCertificate,
    #[error("certificate step {0} does not start where step {} ended", .0 - 1)]
    Broken(usize),
    #[error("certificate walk does not close")]
    NotClosed,
    #[error("certificate parities sum to 0")]
    EvenParity,
    #[error("certificate step {0} is not a constraint of the system")]
    Foreign(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub a: BitVec,
    pub b: BitVec,
    pub parity: bool,
}

impl Constraint {
    pub fn new(a: BitVec, b: BitVec, parity: bool) -> Self {
        Constraint { a, b, parity }
    }

    pub fn reversed(self) -> Self {
        Constraint {
            a: self.b,
            b: self.a,
            parity: self.parity,
        }
    }

    fn undirected(self) -> Constraint {
        if self.a <= self.b {
            self
        } else {
            self.reversed()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySystem {
    unknowns: Vec<BitVec>,
    constraints: Vec<Constraint>,
}

impl ParitySystem {
    pub fn new(unknowns: Vec<BitVec>, constraints: Vec<Constraint>) -> Result<Self, ParityError> {
        let unknowns: Vec<BitVec> = unknowns
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for c in &constraints {
            for end in [c.a, c.b] {
                if unknowns.binary_search(&end).is_err() {
                    return Err(ParityError::UnknownEndpoint(end));
                }
            }
        }
        Ok(ParitySystem {
            unknowns,
            constraints,
        })
    }

    /// Unknowns in ascending order.
    pub fn unknowns(&self) -> &[BitVec] {
        &self.unknowns
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        let key = c.undirected();
        self.constraints.iter().any(|x| x.undirected() == key)
    }

    /// Checks an assignment against every constraint.
    pub fn satisfied_by(&self, assignment: &BTreeMap<BitVec, bool>) -> bool {
        self.constraints
            .iter()
            .all(|c| match (assignment.get(&c.a), assignment.get(&c.b)) {
                (Some(x), Some(y)) => (x ^ y) == c.parity,
                _ => false,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub assignment: BTreeMap<BitVec, bool>,
    /// Connected components of the constraint graph; there are `2^components` solutions.
    pub components: usize,
}

/// Closed walk of constraints whose parities sum to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub cycle: Vec<Constraint>,
}

impl Certificate {
    /// Validates the walk structure and parity; with a system, also checks
    /// that every step is one of its constraints.
    pub fn check(&self, system: Option<&ParitySystem>) -> Result<(), ParityError> {
        let first = self.cycle.first().ok_or(ParityError::EmptyCertificate)?;
        for (idx, pair) in self.cycle.windows(2).enumerate() {
            if pair[0].b != pair[1].a {
                return Err(ParityError::Broken(idx + 1));
            }
        }
        if self.cycle.last().map(|c| c.b) != Some(first.a) {
            return Err(ParityError::NotClosed);
        }
        if !self.cycle.iter().fold(false, |acc, c| acc ^ c.parity) {
            return Err(ParityError::EvenParity);
        }
        if let Some(sys) = system {
            if let Some(idx) = self.cycle.iter().position(|c| !sys.contains(c)) {
                return Err(ParityError::Foreign(idx));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParityOutcome {
    Consistent(Solution),
    Inconsistent(Certificate),
}

struct ParityDsu {
    parent: Vec<usize>,
    // parity from node to its parent
    up: Vec<bool>,
    rank: Vec<u8>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu {
            parent: (0..n).collect(),
            up: vec![false; n],
            rank: vec![0; n],
        }
    }

    /// Root of `x` and the parity `phi(x) ⊕ phi(root)`.
    fn find(&mut self, x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // compress, walking back from the node nearest the root
        let mut acc = false;
        for &node in path.iter().rev() {
            acc ^= self.up[node];
            self.up[node] = acc;
            self.parent[node] = root;
        }
        (root, if path.is_empty() { false } else { self.up[x] })
    }

    /// Merges the sets of `a` and `b` under `phi(a) ⊕ phi(b) = parity`.
    /// Returns `Err(implied)` if they are already joined with parity `implied != parity`.
    fn union(&mut self, a: usize, b: usize, parity: bool) -> Result<bool, bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            let implied = pa ^ pb;
            return if implied == parity {
                Ok(false)
            } else {
                Err(implied)
            };
        }
        let link = pa ^ pb ^ parity;
        let (child, root) = if self.rank[ra] < self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[child] = root;
        self.up[child] = link;
        if self.rank[child] == self.rank[root] {
            self.rank[root] += 1;
        }
        Ok(true)
    }
}

/// Solves the system. Consistent systems get the assignment that sets the
/// smallest unknown of each component to 0.
pub fn solve_parity(sys: &ParitySystem) -> ParityOutcome {
    let index: HashMap<BitVec, usize> = sys
        .unknowns
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let n = sys.unknowns.len();
    let mut dsu = ParityDsu::new(n);
    let mut tree: Vec<Vec<(usize, Constraint)>> = vec![Vec::new(); n];

    for c in &sys.constraints {
        let (a, b) = (index[&c.a], index[&c.b]);
        if a == b {
            if c.parity {
                return ParityOutcome::Inconsistent(Certificate { cycle: vec![*c] });
            }
            continue;
        }
        match dsu.union(a, b, c.parity) {
            Ok(true) => {
                tree[a].push((b, *c));
                tree[b].push((a, c.reversed()));
            }
            Ok(false) => {}
            Err(_) => {
                let mut cycle = tree_path(&tree, b, a);
                cycle.insert(0, *c);
                return ParityOutcome::Inconsistent(Certificate { cycle });
            }
        }
    }

    let mut assignment = BTreeMap::new();
    let mut anchor: HashMap<usize, bool> = HashMap::new();
    // unknowns are sorted, so the first member seen per root is the smallest
    for (i, &v) in sys.unknowns.iter().enumerate() {
        let (root, par) = dsu.find(i);
        let base = *anchor.entry(root).or_insert(par);
        assignment.insert(v, par ^ base);
    }
    ParityOutcome::Consistent(Solution {
        assignment,
        components: anchor.len(),
    })
}

/// Constraints along the spanning-forest path `from -> to`, oriented along the walk.
fn tree_path(tree: &[Vec<(usize, Constraint)>], from: usize, to: usize) -> Vec<Constraint> {
    let mut prev: Vec<Option<(usize, Constraint)>> = vec![None; tree.len()];
    let mut seen = vec![false; tree.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &(v, c) in &tree[u] {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some((u, c));
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, c) = prev[cur].expect("endpoints share a component");
        path.push(c);
        cur = p;
    }
    path.reverse();
    path
}

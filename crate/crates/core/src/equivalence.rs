//! Equivalence operations and the canonical form of
//! `[C(2m,m-1), 2m-1, C(2m-1,m-1)]` designs.
//!
//! The canonical form is computed in five steps:
//!
//! 1. conjugate every variable whose non-conjugated instances sit in rows
//!    with `m` nonzero entries, so rows become uniformly conjugated or not;
//! 2. keep the column order (the normalized form does not depend on it, see
//!    [`canonicalize`]);
//! 3. rename each variable to `α⊕e_i` (or `α⊕e_i⊕e` on a conjugated row),
//!    where `α` is the row identifier of any instance at column `i`;
//! 4. fix signs variable by variable in ascending order: an instance that is
//!    the smallest variable of its row is made positive with a row negation,
//!    the others are tied to already fixed variables through Alamouti blocks
//!    and made positive as a group with a variable negation;
//! 5. sort rows by identifier.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitvec::BitVec;
use crate::design::{verify_symbolic, CodMatrix, Entry, Sign, Term, VarId};
use crate::generator::{cell_variable, family_params};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("{what} index {index} out of range (size {size})")]
    Range {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("{0} permutation is not a bijection of the right size")]
    BadPermutation(&'static str),
    #[error("variable {0} does not occur in the design")]
    UnknownVar(VarId),
    #[error("rename target {0} is already in use")]
    NameClash(VarId),
    #[error("scramble needs at least one operation")]
    ZeroCount,
    #[error("parameters [{p}, {n}, {k}] are not [C(2m,m-1), 2m-1, C(2m-1,m-1)]")]
    Parameters { p: usize, n: usize, k: usize },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("cannot parse operation {0:?}")]
    Parse(String),
}

/// One of the seven equivalence operations. Indices are 0-based; the text
/// form (`negrow 3`, `colperm 2 1 3`, `conjvar 1100`) is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EquivOp {
    /// Row `r` of the result is row `perm[r]` of the input.
    RowPerm(Vec<usize>),
    /// Column `c` of the result is column `perm[c]` of the input.
    ColPerm(Vec<usize>),
    ConjVar(VarId),
    NegVar(VarId),
    RenameVar {
        from: VarId,
        to: VarId,
    },
    NegRow(usize),
    NegCol(usize),
}

fn check_perm(perm: &[usize], size: usize, what: &'static str) -> Result<(), EquivError> {
    let mut seen = vec![false; size];
    if perm.len() != size {
        return Err(EquivError::BadPermutation(what));
    }
    for &x in perm {
        if x >= size || std::mem::replace(&mut seen[x], true) {
            return Err(EquivError::BadPermutation(what));
        }
    }
    Ok(())
}

fn check_var(cod: &CodMatrix, var: VarId) -> Result<(), EquivError> {
    if cod
        .cells()
        .iter()
        .any(|e| e.as_term().is_some_and(|t| t.var == var))
    {
        Ok(())
    } else {
        Err(EquivError::UnknownVar(var))
    }
}

fn map_terms(cod: &CodMatrix, var: VarId, f: impl Fn(Term) -> Term) -> CodMatrix {
    cod.map_cells(|_, _, e| match e {
        Entry::Term(t) if t.var == var => Entry::Term(f(*t)),
        other => *other,
    })
}

pub fn apply_op(cod: &CodMatrix, op: &EquivOp) -> Result<CodMatrix, EquivError> {
    match op {
        EquivOp::RowPerm(perm) => {
            check_perm(perm, cod.p(), "row")?;
            Ok(cod.map_cells(|r, c, _| *cod.get(perm[r], c)))
        }
        EquivOp::ColPerm(perm) => {
            check_perm(perm, cod.n(), "column")?;
            Ok(cod.map_cells(|r, c, _| *cod.get(r, perm[c])))
        }
        EquivOp::ConjVar(var) => {
            check_var(cod, *var)?;
            Ok(map_terms(cod, *var, |t| Term { conj: !t.conj, ..t }))
        }
        EquivOp::NegVar(var) => {
            check_var(cod, *var)?;
            Ok(map_terms(cod, *var, |t| Term { sign: -t.sign, ..t }))
        }
        EquivOp::RenameVar { from, to } => {
            check_var(cod, *from)?;
            if from != to && check_var(cod, *to).is_ok() {
                return Err(EquivError::NameClash(*to));
            }
            Ok(map_terms(cod, *from, |t| Term { var: *to, ..t }))
        }
        EquivOp::NegRow(row) => {
            if *row >= cod.p() {
                return Err(EquivError::Range {
                    what: "row",
                    index: *row,
                    size: cod.p(),
                });
            }
            Ok(cod.map_cells(|r, _, e| if r == *row { e.negated() } else { *e }))
        }
        EquivOp::NegCol(col) => {
            if *col >= cod.n() {
                return Err(EquivError::Range {
                    what: "column",
                    index: *col,
                    size: cod.n(),
                });
            }
            Ok(cod.map_cells(|_, c, e| if c == *col { e.negated() } else { *e }))
        }
    }
}

impl fmt::Display for EquivOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm = |f: &mut fmt::Formatter<'_>, name: &str, p: &[usize]| {
            f.write_str(name)?;
            p.iter().try_for_each(|x| write!(f, " {}", x + 1))
        };
        match self {
            EquivOp::RowPerm(p) => perm(f, "rowperm", p),
            EquivOp::ColPerm(p) => perm(f, "colperm", p),
            EquivOp::ConjVar(v) => write!(f, "conjvar {}", v.0),
            EquivOp::NegVar(v) => write!(f, "negvar {}", v.0),
            EquivOp::RenameVar { from, to } => write!(f, "renamevar {} {}", from.0, to.0),
            EquivOp::NegRow(r) => write!(f, "negrow {}", r + 1),
            EquivOp::NegCol(c) => write!(f, "negcol {}", c + 1),
        }
    }
}

impl FromStr for EquivOp {
    type Err = EquivError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || EquivError::Parse(line.to_string());
        let mut words = line.split_whitespace();
        let name = words.next().ok_or_else(bad)?;
        let rest: Vec<&str> = words.collect();
        let index = |s: &str| -> Result<usize, EquivError> {
            s.parse::<usize>()
                .ok()
                .and_then(|x| x.checked_sub(1))
                .ok_or_else(bad)
        };
        let var = |s: &str| -> Result<VarId, EquivError> {
            s.parse::<BitVec>().map(VarId).map_err(|_| bad())
        };
        fn single<'a>(rest: &[&'a str], line: &str) -> Result<&'a str, EquivError> {
            match rest {
                [x] => Ok(x),
                _ => Err(EquivError::Parse(line.to_string())),
            }
        }
        match name {
            "rowperm" | "colperm" => {
                let p = rest
                    .iter()
                    .map(|s| index(s))
                    .collect::<Result<Vec<_>, _>>()?;
                if p.is_empty() {
                    return Err(bad());
                }
                Ok(if name == "rowperm" {
                    EquivOp::RowPerm(p)
                } else {
                    EquivOp::ColPerm(p)
                })
            }
            "conjvar" => Ok(EquivOp::ConjVar(var(single(&rest, line)?)?)),
            "negvar" => Ok(EquivOp::NegVar(var(single(&rest, line)?)?)),
            "renamevar" => match rest.as_slice() {
                [a, b] => Ok(EquivOp::RenameVar {
                    from: var(a)?,
                    to: var(b)?,
                }),
                _ => Err(bad()),
            },
            "negrow" => Ok(EquivOp::NegRow(index(single(&rest, line)?)?)),
            "negcol" => Ok(EquivOp::NegCol(index(single(&rest, line)?)?)),
            _ => Err(bad()),
        }
    }
}

/// Applies `count` operations drawn uniformly over the seven kinds, with
/// uniform parameters, from a `ChaCha8Rng` seeded with `seed`.
pub fn scramble(
    cod: &CodMatrix,
    seed: u64,
    count: usize,
) -> Result<(CodMatrix, Vec<EquivOp>), EquivError> {
    if count == 0 {
        return Err(EquivError::ZeroCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = cod.clone();
    let mut log = Vec::with_capacity(count);
    while log.len() < count {
        let vars = cur.variables();
        let op = match rng.gen_range(0..7) {
            0 => {
                let mut p: Vec<usize> = (0..cur.p()).collect();
                p.shuffle(&mut rng);
                EquivOp::RowPerm(p)
            }
            1 => {
                let mut p: Vec<usize> = (0..cur.n()).collect();
                p.shuffle(&mut rng);
                EquivOp::ColPerm(p)
            }
            kind @ 2..=4 => {
                let Some(&var) = vars.choose(&mut rng) else {
                    continue;
                };
                match kind {
                    2 => EquivOp::ConjVar(var),
                    3 => EquivOp::NegVar(var),
                    _ => {
                        let len = var.0.len();
                        let taken: HashSet<VarId> = vars.iter().copied().collect();
                        if len < 20 && (1usize << len) <= taken.len() {
                            continue;
                        }
                        let to = loop {
                            let key = rng.gen_range(0..1u64 << len) << 1;
                            let cand = VarId(BitVec::from_order_key(len, key).expect("in range"));
                            if !taken.contains(&cand) {
                                break cand;
                            }
                        };
                        EquivOp::RenameVar { from: var, to }
                    }
                }
            }
            5 => EquivOp::NegRow(rng.gen_range(0..cur.p())),
            _ => EquivOp::NegCol(rng.gen_range(0..cur.n())),
        };
        cur = apply_op(&cur, &op)?;
        log.push(op);
    }
    Ok((cur, log))
}

/// Family parameter `m` when `cod` has parameters `[C(2m,m-1), 2m-1, C(2m-1,m-1)]`.
pub fn odd_family_m(cod: &CodMatrix) -> Option<usize> {
    let n = cod.n();
    if n.is_multiple_of(2) || n > 2 * crate::generator::MAX_M - 1 {
        return None;
    }
    let m = n.div_ceil(2);
    (family_params(m) == cod.params()).then_some(m)
}

fn invalid(msg: impl Into<String>) -> EquivError {
    EquivError::InvalidDesign(msg.into())
}

/// Signs of a design laid out on the `G_{2m-1}` skeleton, rows ascending by id.
struct Skeleton {
    m: usize,
    rows: Vec<BitVec>,
    index: HashMap<BitVec, usize>,
    signs: Vec<Sign>,
    fixed: Vec<bool>,
}

impl Skeleton {
    fn n(&self) -> usize {
        2 * self.m - 1
    }

    fn cell(&self, alpha: BitVec, i: usize) -> usize {
        self.index[&alpha] * self.n() + (i - 1)
    }

    fn flip(&mut self, cell: usize) -> Result<(), EquivError> {
        if self.fixed[cell] {
            return Err(invalid(
                "sign normalization would change an already fixed sign",
            ));
        }
        self.signs[cell] = -self.signs[cell];
        Ok(())
    }

    /// Row whose column-`i` cell holds variable `gamma`.
    fn holder(&self, gamma: BitVec, i: usize) -> BitVec {
        let row = gamma.flip(i);
        if gamma.get(i) {
            row.complement()
        } else {
            row
        }
    }

    fn normalize(&mut self) -> Result<(), EquivError> {
        let (m, n) = (self.m, self.n());
        let vars: Vec<BitVec> = BitVec::all_of_weight(2 * m, m)
            .expect("length in range")
            .into_iter()
            .filter(|g| !g.get(2 * m))
            .collect();
        for gamma in vars {
            let holders: Vec<BitVec> = (1..=n).map(|i| self.holder(gamma, i)).collect();
            let row_smallest = |i: usize| {
                let alpha = holders[i - 1];
                (1..=n)
                    .filter(|&j| j != i && alpha.get(j))
                    .all(|j| cell_variable(alpha, j).0.order_key() > gamma.order_key())
            };
            let (smallest, tied): (Vec<usize>, Vec<usize>) =
                (1..=n).partition(|&i| row_smallest(i));

            if let Some(&anchor) = tied.iter().min_by_key(|&&i| holders[i - 1].order_key()) {
                let rel = self.tie_signs(gamma, &holders, &tied, anchor)?;
                let anchor_sign = self.signs[self.cell(holders[anchor - 1], anchor)];
                for &i in &tied {
                    if self.signs[self.cell(holders[i - 1], i)] != anchor_sign * rel[&i] {
                        return Err(invalid(format!(
                            "signs of variable {gamma} contradict its Alamouti partners"
                        )));
                    }
                }
                if anchor_sign == Sign::Minus {
                    for i in 1..=n {
                        let cell = self.cell(holders[i - 1], i);
                        self.flip(cell)?;
                    }
                }
                for &i in &tied {
                    let cell = self.cell(holders[i - 1], i);
                    self.fixed[cell] = true;
                }
            }

            for &i in &smallest {
                let alpha = holders[i - 1];
                let cell = self.cell(alpha, i);
                if self.signs[cell] == Sign::Minus {
                    for j in alpha.ones_positions().filter(|&j| j < 2 * m) {
                        let c = self.cell(alpha, j);
                        self.flip(c)?;
                    }
                }
                self.fixed[cell] = true;
            }
        }
        Ok(())
    }

    /// Relative signs of `gamma`'s non-row-smallest instances, propagated
    /// through Alamouti blocks whose other variable is already fixed.
    fn tie_signs(
        &self,
        gamma: BitVec,
        holders: &[BitVec],
        tied: &[usize],
        anchor: usize,
    ) -> Result<BTreeMap<usize, Sign>, EquivError> {
        let mut rel = BTreeMap::from([(anchor, Sign::Plus)]);
        let mut queue = VecDeque::from([anchor]);
        while let Some(i) = queue.pop_front() {
            for &j in tied {
                if rel.contains_key(&j) || gamma.get(i) == gamma.get(j) {
                    continue;
                }
                let partner = gamma.flip(i).flip(j);
                if partner.order_key() > gamma.order_key() {
                    continue;
                }
                // s(a_i,i) s(a_j,j) = -s(a_i,j) s(a_j,i)
                let off = self.signs[self.cell(holders[i - 1], j)]
                    * self.signs[self.cell(holders[j - 1], i)];
                rel.insert(j, rel[&i] * -off);
                queue.push_back(j);
            }
        }
        if rel.len() != tied.len() {
            return Err(invalid(format!(
                "sign relations of variable {gamma} are not determined by smaller variables"
            )));
        }
        Ok(rel)
    }

    fn into_matrix(self) -> CodMatrix {
        let (m, n) = (self.m, self.n());
        let mut cells = Vec::with_capacity(self.rows.len() * n);
        for (r, &alpha) in self.rows.iter().enumerate() {
            for i in 1..=n {
                cells.push(if alpha.get(i) {
                    Entry::term(
                        cell_variable(alpha, i),
                        self.signs[r * n + i - 1],
                        alpha.get(2 * m),
                    )
                } else {
                    Entry::Zero
                });
            }
        }
        CodMatrix::new(m, self.rows.len(), n, cells).expect("skeleton shape")
    }
}

/// Restores conjugation separation and lays the design on the skeleton.
fn to_skeleton(cod: &CodMatrix, m: usize) -> Result<Skeleton, EquivError> {
    let n = cod.n();
    let weights: Vec<usize> = (0..cod.p()).map(|r| cod.row_weight(r)).collect();
    if let Some(r) = weights.iter().position(|&w| w != m && w != m + 1) {
        return Err(invalid(format!(
            "row {} has {} nonzero entries",
            r + 1,
            weights[r]
        )));
    }

    // step 1: per-variable conjugation flips
    for var in cod.variables() {
        let wrong: Vec<bool> = cod
            .instances(var)
            .iter()
            .map(|&(r, _, t)| t.conj != (weights[r] == m))
            .collect();
        // all wrong means one ConjVar fixes it; the skeleton records conjugation per row
        if wrong.iter().any(|&w| w) && !wrong.iter().all(|&w| w) {
            return Err(invalid(format!(
                "variable {var} cannot be made conjugation separated"
            )));
        }
    }

    // step 3: row identifiers and variable renaming
    let mut rows = Vec::with_capacity(cod.p());
    for (row, &weight) in cod.rows().zip(&weights) {
        let mut bits: Vec<bool> = row.iter().map(|e| !e.is_zero()).collect();
        bits.push(weight == m);
        rows.push(BitVec::from_bits(&bits).expect("length in range"));
    }
    let mut rename: HashMap<VarId, VarId> = HashMap::new();
    for (r, &alpha) in rows.iter().enumerate() {
        for c in 0..n {
            if let Entry::Term(t) = cod.get(r, c) {
                let id = cell_variable(alpha, c + 1);
                if *rename.entry(t.var).or_insert(id) != id {
                    return Err(invalid(format!(
                        "instances of {} disagree on their position pattern",
                        t.var
                    )));
                }
            }
        }
    }
    if rename.values().collect::<HashSet<_>>().len() != rename.len() {
        return Err(invalid("two variables share a position pattern"));
    }

    let mut sorted: Vec<(BitVec, usize)> = rows.iter().copied().zip(0..).collect();
    sorted.sort_by_key(|(id, _)| id.order_key());
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(invalid("two rows share a zero pattern"));
    }
    let index: HashMap<BitVec, usize> = sorted
        .iter()
        .enumerate()
        .map(|(i, &(id, _))| (id, i))
        .collect();
    let mut signs = Vec::with_capacity(cod.p() * n);
    for &(_, src) in &sorted {
        for c in 0..n {
            signs.push(cod.get(src, c).as_term().map_or(Sign::Plus, |t| t.sign));
        }
    }
    Ok(Skeleton {
        m,
        rows: sorted.into_iter().map(|(id, _)| id).collect(),
        index,
        fixed: vec![false; signs.len()],
        signs,
    })
}

/// Canonical form of a `[C(2m,m-1), 2m-1, C(2m-1,m-1)]` design.
///
/// After steps 1 and 3 every such design sits on the same skeleton of zero
/// patterns, variable positions and conjugations, for any column order; the
/// sign normalization then leaves no freedom. So column order never has to be
/// searched, and the result is invariant under all seven operations.
pub fn canonicalize(cod: &CodMatrix) -> Result<CodMatrix, EquivError> {
    let (p, n, k) = cod.params();
    let m = odd_family_m(cod).ok_or(EquivError::Parameters { p, n, k })?;
    let report = verify_symbolic(cod);
    if !report.ok {
        return Err(invalid(format!(
            "not orthogonal ({} failing locations)",
            report.failures.len()
        )));
    }
    let mut skel = to_skeleton(cod, m)?;
    skel.normalize()?;
    Ok(skel.into_matrix())
}

/// Whether two designs have the same canonical form. Differing parameters give `false`.
pub fn equivalent(a: &CodMatrix, b: &CodMatrix) -> Result<bool, EquivError> {
    if a.params() != b.params() {
        return Ok(false);
    }
    Ok(canonicalize(a)? == canonicalize(b)?)
}

//! Exhaustive enumeration of tiny designs.
//!
//! Two search modes:
//!
//! * `Forced`: zero patterns and variable positions are those of `G_{2m-1}`
//!   (or of its extension for `n = 2m`); only the sign and conjugation of each
//!   nonzero cell are searched.
//! * `Free`: every cell ranges over `0, ±z_j, ±z_j*`. Only usable for very
//!   small `p * n`.
//!
//! Valid designs are grouped into equivalence classes. Members of the
//! `[C(2m,m-1), 2m-1, C(2m-1,m-1)]` family are keyed by their canonical form;
//! anything else is keyed by a brute-force orbit minimum over row and column
//! permutations and negations, which is independent of the canonicalizer.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::bitvec::BitVec;
use crate::design::{verify_symbolic, CodMatrix, Entry, Sign, VarId};
use crate::equivalence::{canonicalize, odd_family_m, EquivError};
use crate::generator::{construct_g, family_params};

/// Default ceiling on the number of candidates examined.
pub const DEFAULT_BUDGET: u64 = 1 << 26;
/// Environment variable the CLI reads to override [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "COD_ORACLE_BUDGET";
/// Ceiling on `p! n! 2^(p+n-1)` for the orbit-minimum key.
const ORBIT_LIMIT: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("search space of about {estimate:.3e} candidates exceeds the budget of {budget}")]
    BudgetExceeded { estimate: f64, budget: u64 },
    #[error("unsupported search: {0}")]
    Unsupported(String),
    #[error("a valid design could not be canonicalized: {0}")]
    Canonical(#[from] EquivError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Support and variable positions taken from the explicit construction.
    Forced,
    /// Every cell free.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub p: usize,
    pub n: usize,
    pub k: usize,
    pub placement: Placement,
    pub budget: u64,
}

impl SearchSpec {
    pub fn new(p: usize, n: usize, k: usize, placement: Placement) -> Self {
        SearchSpec {
            p,
            n,
            k,
            placement,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(self, budget: u64) -> Self {
        SearchSpec { budget, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Canonical form (family members) or orbit-minimum representative.
    pub key: CodMatrix,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub candidates: u64,
    pub valid: usize,
    pub classes: Vec<EquivalenceClass>,
}

impl Enumeration {
    /// Whether `cod` belongs to one of the enumerated classes.
    pub fn contains(&self, cod: &CodMatrix) -> Result<bool, OracleError> {
        let key = class_key(cod)?;
        Ok(self.classes.iter().any(|c| c.key == key))
    }
}

/// Key used to group valid designs.
pub fn class_key(cod: &CodMatrix) -> Result<CodMatrix, OracleError> {
    if odd_family_m(cod).is_some() {
        Ok(canonicalize(cod)?)
    } else {
        orbit_key(cod)
    }
}

fn check_budget(estimate: f64, budget: u64) -> Result<(), OracleError> {
    if estimate > budget as f64 {
        Err(OracleError::BudgetExceeded { estimate, budget })
    } else {
        Ok(())
    }
}

pub fn enumerate_cods(spec: &SearchSpec) -> Result<Enumeration, OracleError> {
    if spec.p == 0 || spec.n == 0 || spec.k == 0 {
        return Err(OracleError::Unsupported("empty parameters".into()));
    }
    let (candidates, designs) = match spec.placement {
        Placement::Free => free_search(spec)?,
        Placement::Forced => forced_search(spec)?,
    };
    let valid = designs.len();
    let keyed: Vec<CodMatrix> = designs
        .par_iter()
        .map(class_key)
        .collect::<Result<_, _>>()?;
    let mut counts: HashMap<CodMatrix, usize> = HashMap::new();
    for key in keyed {
        *counts.entry(key).or_insert(0) += 1;
    }
    let mut classes: Vec<EquivalenceClass> = counts
        .into_iter()
        .map(|(key, members)| EquivalenceClass { key, members })
        .collect();
    classes.sort_by_key(|c| c.key.to_string());
    Ok(Enumeration {
        candidates,
        valid,
        classes,
    })
}

/// Cells of the forced support as `(cell index, variable)`.
type Support = Vec<(usize, VarId)>;

fn odd_support(m: usize) -> Support {
    let g = construct_g(m).expect("m in range");
    g.cells()
        .iter()
        .enumerate()
        .filter_map(|(idx, e)| e.as_term().map(|t| (idx, t.var)))
        .collect()
}

/// Fills the support from the low `2 * support.len()` bits of `code`:
/// bit `2t` is the sign, bit `2t + 1` the conjugation of cell `t`.
fn fill(m: usize, p: usize, n: usize, support: &Support, code: u64) -> CodMatrix {
    let mut cells = vec![Entry::Zero; p * n];
    for (t, &(idx, var)) in support.iter().enumerate() {
        let sign = Sign::from_parity(code >> (2 * t) & 1 == 1);
        let conj = code >> (2 * t + 1) & 1 == 1;
        cells[idx] = Entry::term(var, sign, conj);
    }
    CodMatrix::new(m, p, n, cells).expect("support fits the shape")
}

fn forced_search(spec: &SearchSpec) -> Result<(u64, Vec<CodMatrix>), OracleError> {
    let m = spec.n.div_ceil(2);
    if m == 0 || m > 4 {
        return Err(OracleError::Unsupported(format!(
            "no forced support for n = {}",
            spec.n
        )));
    }
    let (p, n_odd, k) = family_params(m);
    if (spec.p, spec.k) != (p, k) {
        return Err(OracleError::Unsupported(format!(
            "forced support needs [{p}, {}, {k}]",
            spec.n
        )));
    }
    let support = odd_support(m);
    let base_space = 4f64.powi(support.len() as i32);
    let extra: Vec<usize> = if spec.n == n_odd {
        Vec::new()
    } else {
        let g = construct_g(m).expect("m in range");
        (0..g.p())
            .filter(|&r| {
                g.row_id(r)
                    .expect("generated rows are separated")
                    .get(2 * m)
            })
            .collect()
    };
    let extension_space = if extra.is_empty() {
        0.0
    } else {
        4f64.powi(extra.len() as i32)
    };
    check_budget(base_space * (1.0 + extension_space), spec.budget)?;

    let base_count = 1u64 << (2 * support.len());
    let base: Vec<CodMatrix> = (0..base_count)
        .into_par_iter()
        .map(|code| fill(m, p, n_odd, &support, code))
        .filter(|cod| verify_symbolic(cod).ok)
        .collect();
    if spec.n == n_odd {
        return Ok((base_count, base));
    }

    // extension column: rows with α(2m) = 1 hold z_{α⊕e_{2m}}
    let g = construct_g(m).expect("m in range");
    let column_support: Vec<(usize, VarId)> = extra
        .iter()
        .map(|&r| {
            let alpha = g.row_id(r).expect("separated");
            (r, VarId(alpha.flip(2 * m)))
        })
        .collect();
    let per_member = 1u64 << (2 * column_support.len());
    let extended: Vec<CodMatrix> = base
        .par_iter()
        .flat_map_iter(|member| {
            let column_support = &column_support;
            (0..per_member).filter_map(move |code| {
                let mut column = vec![Entry::Zero; p];
                for (t, &(r, var)) in column_support.iter().enumerate() {
                    let sign = Sign::from_parity(code >> (2 * t) & 1 == 1);
                    let conj = code >> (2 * t + 1) & 1 == 1;
                    column[r] = Entry::term(var, sign, conj);
                }
                let cod = member.with_column(&column).expect("column length");
                verify_symbolic(&cod).ok.then_some(cod)
            })
        })
        .collect();
    Ok((base_count + base.len() as u64 * per_member, extended))
}

fn indexed_var(j: usize, k: usize) -> VarId {
    let len = (usize::BITS - k.leading_zeros()).max(1) as usize;
    VarId(BitVec::from_order_key(len, (j as u64) << 1).expect("index fits"))
}

fn free_search(spec: &SearchSpec) -> Result<(u64, Vec<CodMatrix>), OracleError> {
    let (p, n, k) = (spec.p, spec.n, spec.k);
    let radix = 1 + 4 * k as u64;
    let cells = (p * n) as i32;
    check_budget((radix as f64).powi(cells), spec.budget)?;
    let total = radix.pow(cells as u32);
    let m = n.div_ceil(2);
    let vars: Vec<VarId> = (1..=k).map(|j| indexed_var(j, k)).collect();
    let designs = (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut entries = Vec::with_capacity(p * n);
            for _ in 0..p * n {
                let digit = code % radix;
                code /= radix;
                entries.push(if digit == 0 {
                    Entry::Zero
                } else {
                    let d = digit - 1;
                    Entry::term(
                        vars[(d / 4) as usize],
                        Sign::from_parity(d & 1 == 1),
                        d & 2 == 2,
                    )
                });
            }
            let cod = CodMatrix::new(m, p, n, entries).expect("shape");
            (cod.k() == k && verify_symbolic(&cod).ok).then_some(cod)
        })
        .collect();
    Ok((total, designs))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..size).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, size - 1);
                    q
                })
            })
            .collect();
    }
    out
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Lexicographically smallest image of `cod` under row/column permutations
/// and negations, with variables conjugated, negated and renamed so that each
/// first appearance (row-major) is `+z_j` with `j` counting up from 1.
pub fn orbit_key(cod: &CodMatrix) -> Result<CodMatrix, OracleError> {
    let (p, n, k) = cod.params();
    let cost = (factorial(p) * factorial(n)) << (p + n - 1);
    if cost > ORBIT_LIMIT {
        return Err(OracleError::Unsupported(format!(
            "orbit search over [{p}, {n}, {k}] is too large"
        )));
    }
    let index: BTreeMap<VarId, usize> = cod.variables().into_iter().zip(0..).collect();
    // (var, sign, conj) per cell, var = usize::MAX for zero
    let raw: Vec<(usize, bool, bool)> = cod
        .cells()
        .iter()
        .map(|e| match e {
            Entry::Zero => (usize::MAX, false, false),
            Entry::Term(t) => (index[&t.var], t.sign.is_minus(), t.conj),
        })
        .collect();
    let row_perms = permutations(p);
    let col_perms = permutations(n);

    let mut best: Option<Vec<u32>> = None;
    let mut image = vec![0u32; p * n];
    let mut rename = vec![usize::MAX; k];
    let mut var_flip = vec![(false, false); k];
    for rp in &row_perms {
        for cp in &col_perms {
            for row_neg in 0u64..1 << p {
                // negating every row and every column is the identity
                for col_neg in (0u64..1 << n).filter(|c| c & 1 == 0) {
                    rename.iter_mut().for_each(|x| *x = usize::MAX);
                    let mut next = 0;
                    let mut state = std::cmp::Ordering::Equal;
                    for r in 0..p {
                        for c in 0..n {
                            let (var, neg, conj) = raw[rp[r] * n + cp[c]];
                            let code = if var == usize::MAX {
                                0
                            } else {
                                let neg = neg ^ (row_neg >> r & 1 == 1) ^ (col_neg >> c & 1 == 1);
                                if rename[var] == usize::MAX {
                                    rename[var] = next;
                                    next += 1;
                                    var_flip[var] = (neg, conj);
                                }
                                let (fn_, fc) = var_flip[var];
                                1 + 4 * rename[var] as u32
                                    + 2 * (conj ^ fc) as u32
                                    + (neg ^ fn_) as u32
                            };
                            let pos = r * n + c;
                            image[pos] = code;
                            if state == std::cmp::Ordering::Equal {
                                if let Some(b) = &best {
                                    state = code.cmp(&b[pos]);
                                    if state == std::cmp::Ordering::Greater {
                                        break;
                                    }
                                }
                            }
                        }
                        if state == std::cmp::Ordering::Greater {
                            break;
                        }
                    }
                    if best.is_none() || state == std::cmp::Ordering::Less {
                        best = Some(image.clone());
                    }
                }
            }
        }
    }
    let best = best.expect("at least one group element");
    let cells = best
        .into_iter()
        .map(|code| {
            if code == 0 {
                Entry::Zero
            } else {
                let d = code - 1;
                Entry::term(
                    indexed_var(d as usize / 4 + 1, k),
                    Sign::from_parity(d & 1 == 1),
                    d & 2 == 2,
                )
            }
        })
        .collect();
    Ok(CodMatrix::new(cod.m(), p, n, cells).expect("shape"))
}

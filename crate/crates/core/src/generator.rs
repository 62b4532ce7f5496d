//! The explicit design `G_{2m-1}` and its column-extension problem.
//!
//! Rows are indexed by the weight-`(m+1)` vectors `α ∈ F_2^{2m}` and columns by
//! `1..=2m-1`. Where `α(i) = 1` the cell holds
//!
//! * `(-1)^θ(α,i) z_{α⊕e_i}` if `α(2m) = 0`,
//! * `(-1)^θ(α,i) z*_{α⊕e_i⊕e}` if `α(2m) = 1`,
//!
//! and zero otherwise, with
//! `θ(α,i) = wt_{i,2m}(α) + i/2` for even `i` and
//! `θ(α,i) = wt_{i,2m}(α) + (i-1)/2 + α(2m)` for odd `i` (mod 2).
//!
//! A `2m`-th column must be `L(α) = α(2m) (-1)^φ(α) z_{α⊕e_{2m}}`; the signs
//! `φ` are constrained by XOR relations that are solvable exactly when `m` is even.

use std::collections::BTreeMap;

use num_integer::binomial;
use thiserror::Error;

use crate::bitvec::{BitVec, BitVecError};
use crate::design::{CodMatrix, DesignError, Entry, Sign, VarId};
use crate::parity::{solve_parity, Certificate, Constraint, ParityOutcome, ParitySystem};

/// Largest `m` accepted by the generator (`p = C(16, 7) = 11440` rows).
pub const MAX_M: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("m = {0} is outside 1..={MAX_M}")]
    MOutOfRange(usize),
    #[error("theta is only defined where α(i) = 1 (α = {alpha}, i = {i})")]
    ZeroBit { alpha: BitVec, i: usize },
    #[error("column index {i} is outside 1..={max}")]
    Column { i: usize, max: usize },
    #[error("row identifiers must have even length, got {0}")]
    OddLength(usize),
    #[error("design is not the explicit G_(2m-1) for m = {0}")]
    NotCanonical(usize),
    #[error(transparent)]
    Bits(#[from] BitVecError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

fn check_m(m: usize) -> Result<(), GeneratorError> {
    if (1..=MAX_M).contains(&m) {
        Ok(())
    } else {
        Err(GeneratorError::MOutOfRange(m))
    }
}

/// `(p, n, k) = (C(2m, m-1), 2m-1, C(2m-1, m-1))`.
pub fn family_params(m: usize) -> (usize, usize, usize) {
    let m64 = m as u64;
    (
        binomial(2 * m64, m64 - 1) as usize,
        2 * m - 1,
        binomial(2 * m64 - 1, m64 - 1) as usize,
    )
}

/// Sign exponent of cell `(α, i)`; `α` has length `2m`, `i` is 1-based.
pub fn theta(alpha: BitVec, i: usize) -> Result<bool, GeneratorError> {
    let len = alpha.len();
    if !len.is_multiple_of(2) {
        return Err(GeneratorError::OddLength(len));
    }
    if i == 0 || i >= len {
        return Err(GeneratorError::Column { i, max: len - 1 });
    }
    if !alpha.get(i) {
        return Err(GeneratorError::ZeroBit { alpha, i });
    }
    let tail = alpha.partial_weight(i, len)?;
    let value = if i.is_multiple_of(2) {
        tail + i / 2
    } else {
        tail + (i - 1) / 2 + alpha.get(len) as usize
    };
    Ok(value % 2 == 1)
}

/// Row identifiers of `G_{2m-1}` in ascending order-key order.
pub fn row_ids(m: usize) -> Result<Vec<BitVec>, GeneratorError> {
    check_m(m)?;
    Ok(BitVec::all_of_weight(2 * m, m + 1)?)
}

/// Variable sitting at `(α, i)` of `G_{2m-1}`: `α⊕e_i`, or `α⊕e_i⊕e` on conjugated rows.
pub fn cell_variable(alpha: BitVec, i: usize) -> VarId {
    let v = alpha.flip(i);
    VarId(if alpha.get(alpha.len()) {
        v.complement()
    } else {
        v
    })
}

/// Builds `G_{2m-1}`.
pub fn construct_g(m: usize) -> Result<CodMatrix, GeneratorError> {
    let rows = row_ids(m)?;
    let n = 2 * m - 1;
    let mut cells = Vec::with_capacity(rows.len() * n);
    for &alpha in &rows {
        let conj = alpha.get(2 * m);
        for i in 1..=n {
            cells.push(if alpha.get(i) {
                Entry::term(
                    cell_variable(alpha, i),
                    Sign::from_parity(theta(alpha, i)?),
                    conj,
                )
            } else {
                Entry::Zero
            });
        }
    }
    Ok(CodMatrix::new(m, rows.len(), n, cells)?)
}

/// XOR system on `φ` for a `2m`-th column of `g = G_{2m-1}`.
///
/// Unknowns are the conjugated rows. Each unknown `α` and column `i` with
/// `α(i) = 1` links `α` to `α⊕e_i⊕e_{2m}⊕e` with parity `i mod 2`. Each
/// undirected constraint is listed once.
pub fn build_extension_system(g: &CodMatrix) -> Result<ParitySystem, GeneratorError> {
    let m = g.m();
    check_m(m)?;
    if g.params() != family_params(m) {
        return Err(GeneratorError::NotCanonical(m));
    }
    let ids = (0..g.p())
        .map(|r| g.row_id(r))
        .collect::<Result<Vec<_>, _>>()?;
    let last = 2 * m;
    let unknowns: Vec<BitVec> = ids.into_iter().filter(|a| a.get(last)).collect();
    let mut constraints = Vec::new();
    for &alpha in &unknowns {
        for i in (1..last).filter(|&i| alpha.get(i)) {
            let beta = alpha.flip(i).flip(last).complement();
            if alpha.order_key() <= beta.order_key() {
                constraints.push(Constraint::new(alpha, beta, i % 2 == 1));
            }
        }
    }
    Ok(ParitySystem::new(unknowns, constraints).expect("endpoints are conjugated rows"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionResult {
    Column {
        /// The new column, one entry per row of `G_{2m-1}`.
        column: Vec<Entry>,
        /// log2 of the number of sign assignments `φ`.
        solution_count_log2: usize,
        phi: BTreeMap<BitVec, bool>,
    },
    Certificate(Certificate),
}

/// Decides whether `G_{2m-1}` extends by one orthogonal column.
pub fn extend_g(m: usize) -> Result<ExtensionResult, GeneratorError> {
    let g = construct_g(m)?;
    let sys = build_extension_system(&g)?;
    match solve_parity(&sys) {
        ParityOutcome::Inconsistent(cert) => Ok(ExtensionResult::Certificate(cert)),
        ParityOutcome::Consistent(sol) => {
            let last = 2 * m;
            let column = (0..g.p())
                .map(|r| {
                    let alpha = g.row_id(r)?;
                    Ok(if alpha.get(last) {
                        let var = VarId(alpha.flip(last));
                        Entry::term(var, Sign::from_parity(sol.assignment[&alpha]), false)
                    } else {
                        Entry::Zero
                    })
                })
                .collect::<Result<Vec<_>, GeneratorError>>()?;
            Ok(ExtensionResult::Column {
                column,
                solution_count_log2: sol.components,
                phi: sol.assignment,
            })
        }
    }
}

/// `G_{2m-1}` with the extension column appended, when it exists.
pub fn extended_design(m: usize) -> Result<Option<CodMatrix>, GeneratorError> {
    match extend_g(m)? {
        ExtensionResult::Column { column, .. } => Ok(Some(construct_g(m)?.with_column(&column)?)),
        ExtensionResult::Certificate(_) => Ok(None),
    }
}

//! Structural inspection and rate/delay bounds.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::binomial;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::bitvec::BitVec;
use crate::design::{family_m, CodMatrix, Entry, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("variable {0} does not occur in the design")]
    NotFound(VarId),
    #[error("variable {var} occurs more than once in {what} {index}")]
    Repeated {
        var: VarId,
        what: &'static str,
        index: usize,
    },
    #[error("variable {var} occupies {found} of {n} columns")]
    Incomplete { var: VarId, found: usize, n: usize },
    #[error("bounds need at least one antenna")]
    NoAntennas,
}

/// All rows holding one variable, split by conjugation.
///
/// Top rows hold `z_j` and bottom rows hold `z_j*`; each list is ordered by
/// the column of that instance, so the instances form the two diagonal blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BjForm {
    pub var: VarId,
    pub n1: usize,
    pub n2: usize,
    pub top_rows: Vec<usize>,
    pub bottom_rows: Vec<usize>,
    pub top_cols: Vec<usize>,
    pub bottom_cols: Vec<usize>,
    /// Entries of the top rows in the bottom columns (`n1 x n2`).
    pub m_block: Vec<Vec<Entry>>,
}

impl BjForm {
    pub fn m_block_full(&self) -> bool {
        self.m_block.iter().flatten().all(|e| !e.is_zero())
    }

    /// `(m, m-1)` or `(m-1, m)` for `n = 2m-1`, `(m, m)` for `n = 2m`, with a full `M` block.
    pub fn has_maximal_shape(&self, n: usize) -> bool {
        let m = family_m(n);
        let shape = (self.n1, self.n2);
        let ok = if n % 2 == 1 {
            shape == (m, m - 1) || shape == (m - 1, m)
        } else {
            shape == (m, m)
        };
        ok && self.m_block_full()
    }
}

pub fn extract_bj(cod: &CodMatrix, var: VarId) -> Result<BjForm, AnalysisError> {
    let inst = cod.instances(var);
    if inst.is_empty() {
        return Err(AnalysisError::NotFound(var));
    }
    let mut rows = BTreeSet::new();
    let mut cols = BTreeSet::new();
    for &(r, c, _) in &inst {
        if !rows.insert(r) {
            return Err(AnalysisError::Repeated {
                var,
                what: "row",
                index: r,
            });
        }
        if !cols.insert(c) {
            return Err(AnalysisError::Repeated {
                var,
                what: "column",
                index: c,
            });
        }
    }
    if cols.len() != cod.n() {
        return Err(AnalysisError::Incomplete {
            var,
            found: cols.len(),
            n: cod.n(),
        });
    }
    let mut top: Vec<(usize, usize)> = Vec::new();
    let mut bottom: Vec<(usize, usize)> = Vec::new();
    for &(r, c, t) in &inst {
        if t.conj {
            bottom.push((c, r));
        } else {
            top.push((c, r));
        }
    }
    top.sort_unstable();
    bottom.sort_unstable();
    let bottom_cols: Vec<usize> = bottom.iter().map(|&(c, _)| c).collect();
    let m_block = top
        .iter()
        .map(|&(_, r)| bottom_cols.iter().map(|&c| *cod.get(r, c)).collect())
        .collect();
    Ok(BjForm {
        var,
        n1: top.len(),
        n2: bottom.len(),
        top_rows: top.iter().map(|&(_, r)| r).collect(),
        bottom_rows: bottom.iter().map(|&(_, r)| r).collect(),
        top_cols: top.iter().map(|&(c, _)| c).collect(),
        bottom_cols,
        m_block,
    })
}

/// Columns `(i, j)`, `i < j`, where rows `a` and `b` meet in an Alamouti block
/// `((x, y), (-y*, x*))` up to negating or conjugating `x` or `y`.
pub fn shares_alamouti(cod: &CodMatrix, a: usize, b: usize) -> Option<(usize, usize)> {
    if a == b || a >= cod.p() || b >= cod.p() {
        return None;
    }
    for i in 0..cod.n() {
        for j in i + 1..cod.n() {
            let (Some(ai), Some(aj), Some(bi), Some(bj)) = (
                cod.get(a, i).as_term(),
                cod.get(a, j).as_term(),
                cod.get(b, i).as_term(),
                cod.get(b, j).as_term(),
            ) else {
                continue;
            };
            let placed = ai.var == bj.var && aj.var == bi.var && ai.var != aj.var;
            let conjugated = bj.conj != ai.conj && bi.conj != aj.conj;
            let signed = (ai.sign * aj.sign * bi.sign * bj.sign).is_minus();
            if placed && conjugated && signed {
                return Some((i, j));
            }
        }
    }
    None
}

/// `(m+1)/(2m)` with `m = ceil(n/2)`.
pub fn max_rate(n: usize) -> Result<Ratio<u64>, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::NoAntennas);
    }
    let m = family_m(n) as u64;
    Ok(Ratio::new(m + 1, 2 * m))
}

/// Smallest delay of a maximal-rate design: `C(2m, m-1)`, doubled when `n ≡ 2 (mod 4)`.
pub fn min_delay(n: usize) -> Result<u64, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::NoAntennas);
    }
    let m = family_m(n) as u64;
    let base = binomial(2 * m, m - 1);
    Ok(if n % 4 == 2 { 2 * base } else { base })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub n: usize,
    pub m: usize,
    pub max_rate: Ratio<u64>,
    pub min_delay: u64,
}

pub fn bounds(n: usize) -> Result<BoundsReport, AnalysisError> {
    Ok(BoundsReport {
        n,
        m: family_m(n),
        max_rate: max_rate(n)?,
        min_delay: min_delay(n)?,
    })
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {} (m = {})", self.n, self.m)?;
        writeln!(f, "max rate: {}", self.max_rate)?;
        writeln!(f, "min delay: {}", self.min_delay)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub witnesses: Vec<String>,
}

impl Check {
    fn from_witnesses(name: &'static str, witnesses: Vec<String>) -> Check {
        let status = if witnesses.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Check {
            name,
            status,
            witnesses,
        }
    }

    fn not_applicable(name: &'static str, why: String) -> Check {
        Check {
            name,
            status: CheckStatus::NotApplicable,
            witnesses: vec![why],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub p: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub maximal_rate: bool,
    pub zero_pattern_relations: Check,
    pub zero_pattern_completeness: Check,
    pub block_shape: Check,
}

impl StructuralReport {
    pub fn checks(&self) -> [&Check; 3] {
        [
            &self.zero_pattern_relations,
            &self.zero_pattern_completeness,
            &self.block_shape,
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|c| c.status == CheckStatus::Pass)
    }
}

impl fmt::Display for StructuralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}, {}, {}]  m = {}  maximal rate: {}",
            self.p,
            self.n,
            self.k,
            self.m,
            if self.maximal_rate { "yes" } else { "no" }
        )?;
        for check in self.checks() {
            let status = match check.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::NotApplicable => "n/a",
            };
            writeln!(f, "{:<26} {status}", check.name)?;
            for w in check.witnesses.iter().take(10) {
                writeln!(f, "    {w}")?;
            }
            if check.witnesses.len() > 10 {
                writeln!(f, "    ... {} more", check.witnesses.len() - 10)?;
            }
        }
        Ok(())
    }
}

fn pattern(cod: &CodMatrix, row: usize) -> BitVec {
    cod.zero_pattern(row).expect("row in range")
}

/// Same-variable instances at `(α, i)` and `(β, j)`: equal conjugation means
/// the zero patterns differ exactly at `{i, j}`, opposite conjugation means
/// they agree exactly at `{i, j}`.
fn zero_pattern_relations(cod: &CodMatrix) -> Vec<String> {
    let mut witnesses = Vec::new();
    for var in cod.variables() {
        let inst = cod.instances(var);
        for (x, &(ra, ca, ta)) in inst.iter().enumerate() {
            for &(rb, cb, tb) in &inst[x + 1..] {
                let diff = pattern(cod, ra) ^ pattern(cod, rb);
                let ok = if ca == cb {
                    false
                } else {
                    let ij = BitVec::unit(cod.n(), ca + 1).unwrap()
                        ^ BitVec::unit(cod.n(), cb + 1).unwrap();
                    if ta.conj == tb.conj {
                        diff == ij
                    } else {
                        diff == ij.complement()
                    }
                };
                if !ok {
                    witnesses.push(format!(
                        "{var} at ({}, {}) and ({}, {})",
                        ra + 1,
                        ca + 1,
                        rb + 1,
                        cb + 1
                    ));
                }
            }
        }
    }
    witnesses
}

/// Every zero pattern of weight `m` or `m+1` (`n = 2m-1`), or `m+1` (`n = 2m`),
/// must occur, and `p >= C(2m, m-1)`.
fn zero_pattern_completeness(cod: &CodMatrix) -> Vec<String> {
    let n = cod.n();
    let m = family_m(n);
    let present: BTreeSet<BitVec> = (0..cod.p()).map(|r| pattern(cod, r)).collect();
    let weights: Vec<usize> = if n % 2 == 1 {
        vec![m, m + 1]
    } else {
        vec![m + 1]
    };
    let mut witnesses = Vec::new();
    let bound = binomial(2 * m as u64, m as u64 - 1) as usize;
    if cod.p() < bound {
        witnesses.push(format!(
            "p = {} is below C({}, {}) = {bound}",
            cod.p(),
            2 * m,
            m - 1
        ));
    }
    for w in weights {
        for pat in BitVec::all_of_weight(n, w).expect("length in range") {
            if !present.contains(&pat) {
                witnesses.push(format!("missing zero pattern {pat}"));
            }
        }
    }
    witnesses
}

fn block_shape(cod: &CodMatrix) -> Vec<String> {
    cod.variables()
        .into_iter()
        .filter_map(|var| match extract_bj(cod, var) {
            Ok(bj) if bj.has_maximal_shape(cod.n()) => None,
            Ok(bj) => Some(format!(
                "{var}: ({}, {}) block{}",
                bj.n1,
                bj.n2,
                if bj.m_block_full() {
                    ""
                } else {
                    " with zero entries in M"
                }
            )),
            Err(e) => Some(e.to_string()),
        })
        .collect()
}

pub fn structural_report(cod: &CodMatrix) -> StructuralReport {
    let n = cod.n();
    let m = family_m(n);
    let rate = Ratio::new(cod.k() as u64, cod.p() as u64);
    let maximal_rate = max_rate(n).is_ok_and(|r| r == rate);
    let why = || format!("rate {rate} is not the maximal {}", max_rate(n).unwrap());
    StructuralReport {
        p: cod.p(),
        n,
        k: cod.k(),
        m,
        maximal_rate,
        zero_pattern_relations: if maximal_rate {
            Check::from_witnesses("zero-pattern relations", zero_pattern_relations(cod))
        } else {
            Check::not_applicable("zero-pattern relations", why())
        },
        zero_pattern_completeness: Check::from_witnesses(
            "zero-pattern completeness",
            zero_pattern_completeness(cod),
        ),
        block_shape: if maximal_rate {
            Check::from_witnesses("block shape", block_shape(cod))
        } else {
            Check::not_applicable("block shape", why())
        },
    }
}

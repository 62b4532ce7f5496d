//! Symbolic complex orthogonal designs.
//!
//! A [`CodMatrix`] is a `p x n` grid whose cells are either zero or a signed,
//! possibly conjugated instance of a variable. Orthogonality is checked
//! formally: `O^H O` is expanded with `z_j` and `z_j*` treated as independent
//! commuting symbols, so cancellation becomes an integer multiset test.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitvec::{BitVec, BitVecError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("design shape {p}x{n} does not match {cells} cells")]
    Shape { p: usize, n: usize, cells: usize },
    #[error("design must have at least one row and one column")]
    Empty,
    #[error("row {row} out of range (p = {p})")]
    RowRange { row: usize, p: usize },
    #[error("row {row} mixes conjugated and non-conjugated entries")]
    NotConjugationSeparated { row: usize },
    #[error("row identifiers need n = 2m-1 columns (n = {n}, m = {m})")]
    NotOddFamily { n: usize, m: usize },
    #[error(transparent)]
    Bits(#[from] BitVecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^bit`.
    pub fn from_parity(bit: bool) -> Sign {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Variable identifier. Canonical designs use weight-`m` vectors of length
/// `2m` with the last bit clear; other designs may use any distinct vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub BitVec);

impl VarId {
    pub fn bits(&self) -> BitVec {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z[{}]", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub var: VarId,
    pub sign: Sign,
    pub conj: bool,
}

impl Term {
    pub fn symbol(&self) -> Symbol {
        Symbol {
            var: self.var,
            conj: self.conj,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Entry {
    #[default]
    Zero,
    Term(Term),
}

impl Entry {
    pub fn term(var: VarId, sign: Sign, conj: bool) -> Entry {
        Entry::Term(Term { var, sign, conj })
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Entry::Zero => None,
            Entry::Term(t) => Some(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Entry::Zero)
    }

    pub fn negated(self) -> Entry {
        match self {
            Entry::Zero => Entry::Zero,
            Entry::Term(t) => Entry::Term(Term { sign: -t.sign, ..t }),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Zero => f.write_str("0"),
            Entry::Term(t) => write!(f, "{}{}{}", t.sign, t.var, if t.conj { "*" } else { "" }),
        }
    }
}

/// A `p x n` design over `k` variables. `m` is the family parameter
/// (`n = 2m` or `2m - 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodMatrix {
    m: usize,
    p: usize,
    n: usize,
    k: usize,
    cells: Vec<Entry>,
}

/// `m` such that `n = 2m` or `n = 2m - 1`.
pub fn family_m(n: usize) -> usize {
    n.div_ceil(2)
}

impl CodMatrix {
    /// Builds a design from row-major cells. `k` is the number of distinct variables.
    pub fn new(m: usize, p: usize, n: usize, cells: Vec<Entry>) -> Result<Self, DesignError> {
        if p == 0 || n == 0 {
            return Err(DesignError::Empty);
        }
        if cells.len() != p * n {
            return Err(DesignError::Shape {
                p,
                n,
                cells: cells.len(),
            });
        }
        let k = cells
            .iter()
            .filter_map(|e| e.as_term().map(|t| t.var))
            .collect::<BTreeSet<_>>()
            .len();
        Ok(CodMatrix { m, p, n, k, cells })
    }

    pub fn from_rows(m: usize, rows: Vec<Vec<Entry>>) -> Result<Self, DesignError> {
        let p = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(DesignError::Shape {
                p,
                n,
                cells: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(m, p, n, rows.into_iter().flatten().collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }

    /// `(p, n, k)`.
    pub fn params(&self) -> (usize, usize, usize) {
        (self.p, self.n, self.k)
    }

    /// Cell at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &Entry {
        &self.cells[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.cells[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Entry]> {
        self.cells.chunks(self.n)
    }

    pub fn cells(&self) -> &[Entry] {
        &self.cells
    }

    /// Distinct variables, ascending.
    pub fn variables(&self) -> Vec<VarId> {
        self.cells
            .iter()
            .filter_map(|e| e.as_term().map(|t| t.var))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// All `(row, col, term)` instances of `var`, row-major.
    pub fn instances(&self, var: VarId) -> Vec<(usize, usize, Term)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(idx, e)| match e {
                Entry::Term(t) if t.var == var => Some((idx / self.n, idx % self.n, *t)),
                _ => None,
            })
            .collect()
    }

    /// Number of nonzero cells in `row`.
    pub fn row_weight(&self, row: usize) -> usize {
        self.row(row).iter().filter(|e| !e.is_zero()).count()
    }

    pub(crate) fn map_cells(&self, mut f: impl FnMut(usize, usize, &Entry) -> Entry) -> CodMatrix {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(idx, e)| f(idx / self.n, idx % self.n, e))
            .collect();
        CodMatrix::new(self.m, self.p, self.n, cells).expect("shape preserved")
    }

    /// Zero pattern of a 0-based row: bit `i` set iff column `i` is nonzero.
    pub fn zero_pattern(&self, row: usize) -> Result<BitVec, DesignError> {
        if row >= self.p {
            return Err(DesignError::RowRange { row, p: self.p });
        }
        let bits: Vec<bool> = self.row(row).iter().map(|e| !e.is_zero()).collect();
        Ok(BitVec::from_bits(&bits)?)
    }

    /// Row identifier: zero pattern in bits `1..2m-1`, shared conjugation flag in bit `2m`.
    pub fn row_id(&self, row: usize) -> Result<BitVec, DesignError> {
        if self.n + 1 != 2 * self.m {
            return Err(DesignError::NotOddFamily {
                n: self.n,
                m: self.m,
            });
        }
        let pattern = self.zero_pattern(row)?;
        let mut conj = None;
        for t in self.row(row).iter().filter_map(Entry::as_term) {
            match conj {
                None => conj = Some(t.conj),
                Some(c) if c != t.conj => return Err(DesignError::NotConjugationSeparated { row }),
                _ => {}
            }
        }
        let mut bits: Vec<bool> = (1..=self.n).map(|i| pattern.get(i)).collect();
        bits.push(conj.unwrap_or(false));
        Ok(BitVec::from_bits(&bits)?)
    }

    /// Returns the matrix with `column` appended on the right.
    pub fn with_column(&self, column: &[Entry]) -> Result<CodMatrix, DesignError> {
        if column.len() != self.p {
            return Err(DesignError::Shape {
                p: self.p,
                n: self.n + 1,
                cells: self.cells.len() + column.len(),
            });
        }
        let rows = self
            .rows()
            .zip(column)
            .map(|(r, e)| r.iter().copied().chain(std::iter::once(*e)).collect())
            .collect();
        CodMatrix::from_rows(self.m, rows)
    }

    /// Returns the matrix with 0-based `row` removed.
    pub fn without_row(&self, row: usize) -> Result<CodMatrix, DesignError> {
        if row >= self.p {
            return Err(DesignError::RowRange { row, p: self.p });
        }
        let rows = self
            .rows()
            .enumerate()
            .filter(|(r, _)| *r != row)
            .map(|(_, r)| r.to_vec())
            .collect();
        CodMatrix::from_rows(self.m, rows)
    }
}

impl fmt::Display for CodMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", cells.join("  "))?;
        }
        Ok(())
    }
}

/// `z_j` or `z_j*` as a formal symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub var: VarId,
    pub conj: bool,
}

impl Symbol {
    fn conjugate(self) -> Symbol {
        Symbol {
            conj: !self.conj,
            ..self
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.var, if self.conj { "*" } else { "" })
    }
}

/// Commutative product of two symbols, stored with `.0 <= .1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Symbol, pub Symbol);

impl Monomial {
    pub fn new(a: Symbol, b: Symbol) -> Monomial {
        if a <= b {
            Monomial(a, b)
        } else {
            Monomial(b, a)
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.0, self.1)
    }
}

/// 0-based location inside `O^H O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Diagonal(usize),
    Pair(usize, usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Diagonal(c) => write!(f, "column {}", c + 1),
            Location::Pair(a, b) => write!(f, "columns ({}, {})", a + 1, b + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub location: Location,
    /// Nonzero coefficients left after subtracting the expected value.
    pub residual: Vec<(Monomial, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    pub failures: Vec<Failure>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return writeln!(f, "orthogonal: yes");
        }
        writeln!(
            f,
            "orthogonal: no ({} failing locations)",
            self.failures.len()
        )?;
        for fail in &self.failures {
            let terms: Vec<String> = fail
                .residual
                .iter()
                .map(|(mono, c)| format!("{c:+}·{mono}"))
                .collect();
            writeln!(f, "  {}: {}", fail.location, terms.join(" "))?;
        }
        Ok(())
    }
}

fn column_product(cod: &CodMatrix, a: usize, b: usize) -> BTreeMap<Monomial, i64> {
    let mut acc = BTreeMap::new();
    for r in 0..cod.p() {
        if let (Entry::Term(x), Entry::Term(y)) = (cod.get(r, a), cod.get(r, b)) {
            // conj(s_x x) * s_y y
            let mono = Monomial::new(x.symbol().conjugate(), y.symbol());
            *acc.entry(mono).or_insert(0) += (x.sign * y.sign).as_i64();
        }
    }
    acc.retain(|_, c| *c != 0);
    acc
}

/// Formal check of `O^H O = (sum |z_j|^2) I`.
pub fn verify_symbolic(cod: &CodMatrix) -> VerificationReport {
    let vars = cod.variables();
    let mut failures = Vec::new();
    for a in 0..cod.n() {
        let mut diag = column_product(cod, a, a);
        for &var in &vars {
            let plain = Symbol { var, conj: false };
            let mono = Monomial::new(plain.conjugate(), plain);
            *diag.entry(mono).or_insert(0) -= 1;
        }
        diag.retain(|_, c| *c != 0);
        if !diag.is_empty() {
            failures.push(Failure {
                location: Location::Diagonal(a),
                residual: diag.into_iter().collect(),
            });
        }
        for b in a + 1..cod.n() {
            let off = column_product(cod, a, b);
            if !off.is_empty() {
                failures.push(Failure {
                    location: Location::Pair(a, b),
                    residual: off.into_iter().collect(),
                });
            }
        }
    }
    failures.sort_by_key(|f| f.location);
    VerificationReport {
        ok: failures.is_empty(),
        failures,
    }
}

/// Outcome of the floating-point cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericReport {
    pub ok: bool,
    pub max_residual: f64,
    pub trials: usize,
    pub seed: u64,
    pub generator: &'static str,
}

pub const NUMERIC_GENERATOR: &str = "ChaCha8Rng";

/// Substitutes seeded random complex values (real and imaginary parts
/// uniform on [-1, 1]) and checks `max |O^H O - (sum |z|^2) I| < tol` on every trial.
pub fn verify_numeric(cod: &CodMatrix, trials: usize, seed: u64, tol: f64) -> NumericReport {
    let vars = cod.variables();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0f64;
    let mut ok = true;
    for _ in 0..trials {
        let values: BTreeMap<VarId, Complex64> = vars
            .iter()
            .map(|&v| {
                (
                    v,
                    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
                )
            })
            .collect();
        let energy: f64 = values.values().map(|z| z.norm_sqr()).sum();
        let numeric: Vec<Complex64> = cod
            .cells()
            .iter()
            .map(|e| match e {
                Entry::Zero => Complex64::new(0.0, 0.0),
                Entry::Term(t) => {
                    let z = values[&t.var];
                    let z = if t.conj { z.conj() } else { z };
                    z * t.sign.as_i64() as f64
                }
            })
            .collect();
        let n = cod.n();
        let mut trial_max = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..cod.p() {
                    acc += numeric[r * n + a].conj() * numeric[r * n + b];
                }
                if a == b {
                    acc -= energy;
                }
                trial_max = trial_max.max(acc.norm());
            }
        }
        max_residual = max_residual.max(trial_max);
        if trial_max.is_nan() || trial_max >= tol {
            ok = false;
        }
    }
    NumericReport {
        ok: ok && trials > 0,
        max_residual,
        trials,
        seed,
        generator: NUMERIC_GENERATOR,
    }
}

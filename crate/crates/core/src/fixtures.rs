//! The worked `[4, 3, 3]` design, entered cell by cell:
//!
//! ```text
//!  z1    z2    z3
//! -z2*   z1*   0
//! -z3*   0     z1*
//!  0     z3*  -z2*
//! ```

use crate::bitvec::BitVec;
use crate::design::{CodMatrix, Entry, Sign, VarId};

/// `z_j` for `1 <= j <= 4`, named by the unit vector `e_j` of length 4.
pub fn z(j: usize) -> VarId {
    VarId(BitVec::unit(4, j).expect("fixture variable index in 1..=4"))
}

pub fn example_433() -> CodMatrix {
    use Sign::{Minus, Plus};
    let t = |j, sign, conj| Entry::term(z(j), sign, conj);
    let o = Entry::Zero;
    CodMatrix::from_rows(
        2,
        vec![
            vec![t(1, Plus, false), t(2, Plus, false), t(3, Plus, false)],
            vec![t(2, Minus, true), t(1, Plus, true), o],
            vec![t(3, Minus, true), o, t(1, Plus, true)],
            vec![o, t(3, Plus, true), t(2, Minus, true)],
        ],
    )
    .expect("fixture shape")
}

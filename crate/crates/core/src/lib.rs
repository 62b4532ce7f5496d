//! Maximum-rate, minimum-delay complex orthogonal designs.
//!
//! * [`generator`] builds the explicit design `G_{2m-1}` and decides whether it
//!   extends by one more orthogonal column.
//! * [`design`] holds the symbolic matrix type and its orthogonality checks.
//! * [`equivalence`] applies the seven equivalence operations and computes the
//!   canonical form of a `[C(2m,m-1), 2m-1, C(2m-1,m-1)]` design.
//! * [`analysis`] inspects block structure and computes rate/delay bounds.
//! * [`oracle`] enumerates small designs exhaustively.
//! * [`io`] reads and writes the versioned file formats.

pub mod analysis;
pub mod bitvec;
pub mod design;
pub mod equivalence;
pub mod fixtures;
pub mod generator;
pub mod io;
pub mod oracle;
pub mod parity;

pub use bitvec::BitVec;
pub use design::{verify_numeric, verify_symbolic, CodMatrix, Entry, Sign, VarId};

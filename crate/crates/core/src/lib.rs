//! Desk-scale numerical laboratory for the variational structure of the
//! critical Adams inequality on R^4 and the Trudinger-Moser inequality on
//! R^2: sharp Gagliardo-Nirenberg constants and their closed-form bounds,
//! ground states, the explicit blow-up bubble and Green functions, the
//! concentration and vanishing energy levels, and threshold sweeps over the
//! subtraction coefficient.

pub mod banded;
pub mod bessel;
pub mod bubble_green;
pub mod constants;
pub mod error;
pub mod extremal;
pub mod field;
pub mod grid;
pub mod ground_state;
pub mod operators;
pub mod opt;
pub mod rearrange;

pub use error::{Error, Result};
pub use field::{critical_constant, ExpFunctionalValue, FunctionalSpec, RadialField};
pub use grid::{GridMapping, RadialGrid};

//! Grids, field containers, z-differentiation, norms and half-line interpolation.

pub mod deriv;
pub mod grid;
pub mod interp;
pub mod modal;
pub mod norms;

pub use deriv::{ddz_slice, d2z_slice, ZDerivative};
pub use grid::{BlGrid, ChannelGrid, Wall};
pub use interp::{interp_halfline, ComplexPchip, Pchip};
pub use modal::{from_modal, line_modes, to_modal, ModalField, PhysicalField, Profile1D};
pub use norms::{norms, FieldRef, NormKind, NormTriple};

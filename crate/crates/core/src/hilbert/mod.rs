//! Composite Hilbert spaces and the operator algebra on them.

pub mod operator;
pub mod ops;
pub mod space;
pub mod state;

pub use operator::{anticommutator, commutator, Operator, Storage};
pub use ops::{embed_local, kron, partial_transpose, trace_norm, OperatorJson};
pub use space::SpaceDescriptor;
pub use state::StateVector;

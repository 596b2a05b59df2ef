mod dense;
mod grid;
mod observables;
mod trajectories;

pub use dense::{evolve_dense, evolve_dense_with, BlockPropagator, DenseOptions, DenseRun, StateVisitor};
pub use grid::{TimeGrid, TimeSeries};
pub use observables::{expectation, reduced_correlator, Observable};
pub use trajectories::{evolve_trajectories, run_trajectory, Trajectory, TrajectoryConfig};
pub(crate) use grid::fmt_num;

//! Two-subsystem negative-feedback loops: hypothesis checks, the attractive
//! set of the loop and its validation by closed-loop simulation.

mod interconnection;
pub mod registry;
mod verify;

pub use interconnection::{box_grid, box_grid_shape, ClosedLoop, Interconnection};
pub use registry::{builtin_examples, lookup, Entry, Example};
pub use verify::{
    attractive_set, image_check, loop_equilibria, sweep, validate_convergence, verify_hypotheses, AttractivePair,
    BoundednessCheck, Budget, CharacteristicCondition, ConvergenceRecord, ConvergenceReport, ImageCheck, LoopCondition,
    MonotonicityCondition, SingletonCheck, SweepRecord, VerificationReport,
};

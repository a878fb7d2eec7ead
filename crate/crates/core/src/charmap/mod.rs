//! Set-valued maps and the characteristics of scalar systems: evaluation,
//! branch-count profiles, order-theoretic checks and sampled verification of
//! the characteristic properties.

mod checks;
mod map;
mod profile;
mod roots;
mod verify;

pub use checks::{
    check_antimonotone, check_no_cycles_by_order, check_weakly_nondecreasing, AntimonotoneReport, AntimonotoneWitness,
    MissingSelection, NoCycles, OrderCheckReport, OrderWitness,
};
pub use map::{compose_maps, linspace, MapKind, MultiMap};
pub use profile::{cardinality_profile, BranchSample, Profile};
pub use roots::{equilibria_at_input, equilibria_with, scalar_roots, EquilibriumPair, RootSearch, Stability};
pub use verify::{
    verify_characteristic, CharacteristicCheckOptions, CharacteristicReport, ConditionResult, InputReport,
    LyapunovRecord, Verdict, Witness,
};

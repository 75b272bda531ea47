//! Analysis toolkit: knapsack densities, `k` bounds, attack-cost estimates,
//! ASPP to ASSP conversion with discrete logs, a meet-in-the-middle subset-sum
//! solver, and the exhaustive uniqueness census for desk-scale keys.

pub mod assp;
pub mod census;
pub mod costs;
pub mod density;
pub mod dlog;
pub mod mitm;

pub use assp::{aspp_to_assp, CompactSequence};
pub use census::{uniqueness_census, CensusReport};
pub use costs::{attack_cost_estimates, CostEstimates};
pub use density::{bit_length, density_bit, density_bitpair, k_bounds, Density, KBounds};
pub use mitm::{brute_force_ssp, mitm_ssp};

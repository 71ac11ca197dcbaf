//! Simulation library for a wirelessly powered communication network: one
//! multi-antenna energy access point (E-AP) beams RF power to K multi-antenna
//! energy receivers (E-Rs) over i.i.d. Rayleigh-fading timeslots, and —
//! optionally — the E-Rs spend the harvested energy on uplink information
//! transfer back to the E-AP.
//!
//! Four per-slot transmission policies are provided:
//!
//! * `Optimal` — threshold rule on the top eigenvalue of the summed channel
//!   Gram matrix, with the threshold calibrated from an empirical quantile of
//!   Monte-Carlo channel draws ([`policy_wpt`]).
//! * `MDPP` — the drift-plus-penalty online rule, replacing the calibrated
//!   threshold with a virtual-queue comparison Z/V ([`policy_wpt`]).
//! * `QF-WPT` — utility-driven fair power transfer with minimum-power
//!   guarantees via virtual queues G_i, Z_i, Z_AP ([`policy_fair`]).
//! * `QGF-IT` — joint downlink power / uplink information policy with a
//!   per-receiver closed-form water-filling solution through the Lambert W
//!   function ([`policy_wpcn`]).
//!
//! The [`sim`] module wires channel draws, policy decisions, and queue
//! updates into reproducible scenario runs with CSV/JSON export; [`numerics`]
//! holds the dense linear algebra underneath.

pub mod channel;
pub mod numerics;
pub mod policy_fair;
pub mod policy_wpt;
pub mod policy_wpcn;
pub mod sim;

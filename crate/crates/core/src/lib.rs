//! Exact-arithmetic engine for the wall-and-chamber computations attached to
//! weak stability conditions on Clifford-module categories over `P^3`.
//!
//! The crate works entirely with truncated Chern characters over arbitrary
//! precision rationals. It provides:
//!
//! * [`character`]: the character algebra (modification, twisting, Clifford
//!   classes, homological shift);
//! * [`lattice`]: the integral character lattice with Hermite-form membership;
//! * [`stability`]: central charges, slopes, weak positivity and the
//!   second-tilt rotation;
//! * [`walls`]: exhaustive enumeration of numerical walls at fixed `beta`;
//! * [`mukai`]: the rank-two lattice of the orthogonal component, its pairing
//!   and its character embedding;
//! * [`euler`]: Euler characteristics on `P^3` and the twisted-pairing chain;
//! * [`vanishing`]: a tri-state constraint engine replaying Hom-vanishing
//!   arguments from slopes, Serre duality, heart bounds, semiorthogonality and
//!   Euler bookkeeping;
//! * [`cartoon`]: SVG rendering of the per-rank character plane.

pub mod cartoon;
pub mod character;
pub mod euler;
pub mod lattice;
pub mod mukai;
pub mod rational;
pub mod stability;
pub mod vanishing;
pub mod walls;

pub use character::{b_char, modify, parse_character, preset, Character};
pub use lattice::{condition_iv, condition_iv_single, CharLattice};
pub use mukai::MukaiVector;
pub use rational::Rat;
pub use stability::{central_charge, slope, Slope, StabilityParams};
pub use walls::{enumerate_walls, wall_between, SearchConfig, WallBetween};

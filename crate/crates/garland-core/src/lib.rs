//! Exact computation in restricted wreath products `H ≀ ⟨t⟩` and direct
//! products `H × ⟨t⟩`.
//!
//! The crate provides:
//!
//! * [`coordgroup`] — the pluggable coordinate group `H` (cyclic, table,
//!   free, integers) with exact arithmetic and geodesic lengths;
//! * [`wreath`] — sparse elements `g = g̃ tᵖ` of `N ⋊ ⟨t⟩` with exact
//!   multiplication, inversion and t-conjugation;
//! * [`cayley`] — breadth-first enumeration of balls `B_S(n)` with
//!   deterministic geodesic witnesses and growth statistics;
//! * [`itinerary`] — the `(ι, σ)` calculus attached to S-expressions,
//!   itinerary products/splits and coordinate insertions;
//! * [`constructions`] — reduced towers, the `ġ(j)` perturbations with
//!   recovery, the x/y/z split at extremal itinerary points and the
//!   two-point J-variants `g̈(J)` with recovery and injectivity;
//! * [`normalform`] — minimal-length normal forms for base-group elements
//!   under `S = S₀ ∪ {t, t⁻¹}`;
//! * [`analysis`] — commuting-pair densities, subset densities, R-set
//!   partitions, centralizer fractions and the asymptotic utilities;
//! * [`verify`] — seeded property suites with JSON reports;
//! * [`presets`], [`config`], [`literal`], [`export`], [`cache`] — the
//!   external interfaces (group configs, element literals, CSV series,
//!   ball cache files).

pub mod analysis;
pub mod cache;
pub mod cayley;
pub mod config;
pub mod constructions;
pub mod coordgroup;
pub mod export;
pub mod itinerary;
pub mod literal;
pub mod normalform;
pub mod presets;
pub mod verify;
pub mod wreath;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("element cap {cap} exceeded; last completed radius {last_radius}")]
    CapExceeded { cap: u64, last_radius: u32 },
    #[error("generating set is not symmetric: no inverse for generator {0}")]
    NonSymmetric(String),
    #[error("generator index {0} out of range 1..={1}")]
    IndexOutOfRange(u16, u16),
    #[error("element not in enumerated ball")]
    NotInBall,
    #[error("split point {0} out of range 0..={1}")]
    SplitOutOfRange(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed variant: {0}")]
    MalformedVariant(String),
    #[error("degenerate tower: coordinate reduces to the empty product")]
    DegenerateTower,
    #[error("ball radius {have} too small, need {need}")]
    InsufficientRadius { need: u32, have: u32 },
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Exact combinatorics of the multiplication map `m_n(t) = nt mod 1`.
//!
//! Everything here is integer-rational; there are no tolerances.

mod angle;
mod cycles;
mod interval;
mod words;

pub use angle::{mn_apply, mn_iterate, RationalAngle};
pub use cycles::{cycle_invariants, enumerate_cycles, goldberg_realize, CycleInvariants, MnCycle, MAX_PERIOD, MAX_POINTS};
pub use interval::{gen_interval, itinerary, partition_points, ItineraryInterval};
pub use words::{parse_word, word_classify, word_shift, AdmissibleWord, Symbol, WordClass};

use num_rational::Ratio;

/// Exact rational used for deployment vectors and interval endpoints.
pub type Q = Ratio<i64>;

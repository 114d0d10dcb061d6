//! Radial Dirac-Coulomb channels on B-spline bases.
//!
//! Units `m = c = 1`; the free operator has spectrum `(-∞, -1] ∪ [1, ∞)` and
//! the gap `(-1, 1)` hosts the bound states of `-ν/r`.

mod bspline;
mod certify;
mod channel;
mod oracle;
mod pollution;
mod quadrature;
mod solve;

pub use bspline::RadialBasis;
pub use certify::{epsilon_continuation, gap_state_components, kato_certificate, ContinuationReport, ContinuationRow, KatoReport, KATO_CONSTANT};
pub use channel::{assemble_channel, ChannelConfig, KappaChannel};
pub use oracle::{regime_classify, sommerfeld_levels, sommerfeld_oracle, CouplingRegime, Thresholds};
pub use pollution::{pollution_demo, PollutionReport, MINIMAX_TOLERANCE, SPURIOUS_DISTANCE};
pub use quadrature::gauss_legendre;
pub use solve::{
    channel_pair, check_coupling, solve_channel, ChannelSolution, ChannelSolveOptions, SplitKind, GAP_TOP, WARN_NU,
};

//! Pairs of Hermitian forms with an orthogonal splitting, and the matrix-level
//! checks of the form-perturbation conditions (1)–(8).
//!
//! Numbering of the conditions:
//!
//! 1. the split maps the form domain into itself (here: the split bases span
//!    the space with a bounded condition number),
//! 2. `q > 0` on `D+`,
//! 3. `q <= 0` on `D-`,
//! 4. `q` does not couple `D+` and `D-`,
//! 5. completeness of the `α`-inner product (automatic in finite dimension),
//! 6. `D[v] ⊇ D[q]` (automatic at matrix level),
//! 7. `v` is bounded in the `α`-norm,
//! 8. `U + V_α` is boundedly invertible for `α` large enough, with
//!    `U = 1 ⊕ (-1)`.

mod conditions;
mod pair;
mod report;

pub use conditions::{
    alpha_gram, build_v_alpha, check_all, check_decoupling, check_sign_conditions, check_spectral_split_consistency,
    check_u_plus_v_invertible, default_tolerance, form_bound_constant, u_plus_v_margin, AlphaMetric,
    InvertibilityReport, ALPHA_GRID,
};
pub use pair::{Blocks, FormPair, SplitSpace, MAX_SPLIT_CONDITION};
pub use report::{ConditionCheck, ConditionReport};

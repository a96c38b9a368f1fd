//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by the symbolic kernel, the profile evaluators, the ODE
/// layer, and the spectrum machinery.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// A symbol had no binding in the evaluation context.
    #[error("unbound symbol `{symbol}` during numeric evaluation")]
    UnboundSymbol { symbol: String },

    /// Numeric evaluation hit a zero denominator; the offending denominator is
    /// carried verbatim.
    #[error("singular evaluation: denominator `{denominator}` vanished in `{expression}`")]
    SingularEvaluation {
        denominator: String,
        expression: String,
    },

    /// A formal η-derivative would exceed the configured cap.
    #[error("η-derivative order {requested} exceeds the configured cap {cap}")]
    EtaOrderExceeded { requested: u32, cap: u32 },

    /// The η-derivative atom was evaluated at a point with a nonzero imaginary
    /// part; window profiles are real-valued.
    #[error("η-derivative evaluated at non-real argument {value}")]
    EtaComplexArgument { value: String },

    /// A window profile was evaluated outside its domain.
    #[error("profile `{profile}` is undefined at {chart} = {value}")]
    ProfileDomain {
        profile: String,
        chart: &'static str,
        value: f64,
    },

    /// Derivative order request beyond the profile's configured cap.
    #[error("derivative order {requested} exceeds the profile cap {cap}")]
    ProfileOrderExceeded { requested: usize, cap: usize },

    /// A chart transform was applied to a profile that does not live in a
    /// radial chart (the interior quadratic profile is a function of the
    /// window radius and never enters the radial pipeline).
    #[error("profile `{profile}` lives in the window-radius chart; no r/ε transform exists")]
    ChartMismatch { profile: String },

    /// The constraint matrix Δ is symbolically singular, so the set is not
    /// second-class and no Dirac bracket exists.
    #[error("constraint set is not second-class: det Δ = 0 identically")]
    NotSecondClass,

    /// Singularity classification could not settle on a growth exponent.
    #[error(
        "inconclusive singularity classification at {point}: exponent drift \
         p = {drift_p:.3e}, q = {drift_q:.3e}"
    )]
    InconclusiveFit {
        point: f64,
        drift_p: f64,
        drift_q: f64,
    },

    /// The adaptive integrator underflowed its step size.
    #[error("integrator step underflow at ε = {location} (step {step:.3e})")]
    StepUnderflow { location: f64, step: f64 },

    /// The adaptive integrator exceeded its step budget.
    #[error("integrator exceeded {max_steps} steps at ε = {location}")]
    StepBudgetExceeded { location: f64, max_steps: usize },

    /// A series recurrence hit a genuine logarithmic case: the pivot vanished
    /// while the accumulated equation did not.
    #[error("logarithmic series case at order {order}: pivot vanished with residual {residual:.3e}")]
    LogarithmicCase { order: usize, residual: f64 },

    /// An indicial/series request was made at a point that is not ordinary or
    /// regular-singular; the report that led to the refusal is rendered in.
    #[error("point is an irregular singularity; series machinery refused: {report}")]
    IrregularPoint { report: String },

    /// The truncated determinant vanished identically: the system is
    /// structurally degenerate and roots are meaningless.
    #[error("determinant is identically zero at truncation {truncation}: structural degeneracy")]
    StructuralDegeneracy { truncation: usize },

    /// Root-finding on a one-dimensional residual failed to converge.
    #[error("root search for `{what}` did not converge after {iterations} iterations")]
    RootSearchFailed { what: String, iterations: usize },

    /// An operation received an out-of-range argument.
    #[error("invalid argument: {message}")]
    InvalidArgument { message: String },
}

impl CoreError {
    /// Shorthand for [`CoreError::InvalidArgument`].
    pub fn invalid(message: impl Into<String>) -> Self {
        CoreError::InvalidArgument {
            message: message.into(),
        }
    }
}

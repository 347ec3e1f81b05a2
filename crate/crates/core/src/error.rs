use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("quadrature did not converge{}: estimate {estimate:e}, error bound {error:e}", edge_suffix(*.edge))]
    Accuracy {
        estimate: f64,
        error: f64,
        /// Hexagon edge (1-based) being integrated, when known.
        edge: Option<usize>,
    },

    #[error("iteration limit reached in {0}")]
    IterationLimit(&'static str),

    #[error("no sign change of Q for t in ({t_lo:e}, {t_hi:e}); {} samples", samples.len())]
    Bracket {
        t_lo: f64,
        t_hi: f64,
        samples: Vec<(f64, f64)>,
    },

    #[error("not found: {reason}")]
    NotFound {
        reason: String,
        scan: Vec<(f64, f64)>,
    },

    #[error(
        "period conditions inconsistent: relative residual {residual:e} exceeds {tolerance:e}"
    )]
    Inconsistent { residual: f64, tolerance: f64 },

    #[error("period problem not solved: bottom segment off-centre by {dy:e}, top segment by {dx:e} (height units)")]
    OffCentre { dx: f64, dy: f64 },

    #[error("validation gate failed: {0}")]
    Gate(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn edge_suffix(edge: Option<usize>) -> String {
    edge.map(|k| format!(" on edge {k}")).unwrap_or_default()
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Tags an accuracy error with the hexagon edge it came from.
    pub(crate) fn on_edge(self, k: usize) -> Self {
        match self {
            Error::Accuracy {
                estimate, error, ..
            } => Error::Accuracy {
                estimate,
                error,
                edge: Some(k),
            },
            other => other,
        }
    }
}

/// Non-fatal diagnostics attached to results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Two branch parameters are closer than the conditioning threshold;
    /// periods on the adjacent edges degrade in accuracy.
    NearCoalescence { which: &'static str, gap: f64 },
    /// Input was given with `a > b` and has been swapped.
    Canonicalized,
    /// The tetragonal branch met the classical family at the bifurcation point.
    Bifurcation,
}

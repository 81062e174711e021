use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("complete elliptic integral K diverges at k = 1")]
    Divergent,

    #[error("root solve failed after {iterations} iterations: bracket [{lo}, {hi}], residual {residual:e}")]
    RootSolve {
        lo: f64,
        hi: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("field diverged during imaginary-time evolution (dtau = {dtau}); reduce the step")]
    Divergence { dtau: f64 },

    #[error("real-time step unstable at t = {time}: norm drift {drift:e} (dt = {dt})")]
    Instability { time: f64, drift: f64, dt: f64 },

    #[error("density contrast collapsed to {contrast:e} at t = {time}; no lump left to track")]
    ContrastCollapse { time: f64, contrast: f64 },

    #[error("sampled state fails normalization: |norm - 1| = {deviation:e}")]
    Normalization { deviation: f64 },

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            expected,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

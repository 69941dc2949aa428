use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A gridded field was queried outside its spatial extent.
    OutOfDomain { x: f64, y: f64 },
    /// A query coordinate or time was NaN or infinite.
    NonFinite,
    /// Gridded field axes or arrays are inconsistent.
    InvalidField(&'static str),
    /// A configuration value violates its invariant.
    InvalidConfig(&'static str),
    /// A perturbed vehicle speed dropped to zero or below.
    NonPositiveSpeed(f64),
    /// An edge with coincident endpoints.
    DegenerateEdge,
    /// A vertex id that does not exist in the graph.
    UnknownVertex(usize),
    /// Path reconstruction was asked for a vertex the search never reached.
    Unreached(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfDomain { x, y } => write!(f, "position ({x}, {y}) lies outside the field domain"),
            Error::NonFinite => f.write_str("non-finite query coordinate"),
            Error::InvalidField(msg) => write!(f, "invalid gridded field: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::NonPositiveSpeed(s) => write!(f, "perturbed vehicle speed {s} is not positive"),
            Error::DegenerateEdge => f.write_str("edge endpoints coincide"),
            Error::UnknownVertex(v) => write!(f, "vertex {v} is not part of the graph"),
            Error::Unreached(v) => write!(f, "vertex {v} was not reached"),
        }
    }
}

impl core::error::Error for Error {}

use thiserror::Error;

/// Errors raised by the surface kernel.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("edge {tri}.{edge} is not glued")]
    UngluedEdge { tri: usize, edge: u8 },
    #[error("edge {tri}.{edge} is glued more than once")]
    DoubleGlued { tri: usize, edge: u8 },
    #[error("edge {tri}.{edge} is glued to itself")]
    SelfGlued { tri: usize, edge: u8 },
    #[error("glued edges {a} (length {la}) and {b} (length {lb}) differ in length")]
    LengthMismatch { a: String, b: String, la: f64, lb: f64 },
    #[error("triangle {tri} violates the strict triangle inequality")]
    DegenerateTriangle { tri: usize },
    #[error("surface is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unfolding budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("inconsistent surface: {0}")]
    Inconsistent(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("kite does not embed: {0}")]
    NotEmbedded(String),
    #[error("kite is not admissible: {0}")]
    Inadmissible(String),
    #[error("no surgery case applies: {0}")]
    NoCase(String),
    #[error("kernel defect: {0}")]
    KernelDefect(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::UngluedEdge { .. } => "unglued_edge",
            Error::DoubleGlued { .. } => "double_glued_edge",
            Error::SelfGlued { .. } => "self_glued_edge",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DegenerateTriangle { .. } => "degenerate_triangle",
            Error::Disconnected { .. } => "disconnected",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Inconsistent(_) => "inconsistent_surface",
            Error::Degenerate(_) => "degenerate_geometry",
            Error::NotEmbedded(_) => "not_embedded",
            Error::Inadmissible(_) => "inadmissible_kite",
            Error::NoCase(_) => "no_case",
            Error::KernelDefect(_) => "kernel_defect",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

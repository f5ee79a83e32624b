use alloc::string::String;

/// Errors raised by the processing chain.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A value lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),
    /// Shapes or lengths of the inputs do not agree.
    #[error("structural error: {0}")]
    Structural(String),
    /// A radar or scene configuration cannot be simulated faithfully.
    #[error("configuration error: {0}")]
    Configuration(String),
    /// A numerical routine failed an internal accuracy check.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! structural {
    ($($arg:tt)*) => { $crate::Error::Structural(alloc::format!($($arg)*)) };
}
macro_rules! configuration {
    ($($arg:tt)*) => { $crate::Error::Configuration(alloc::format!($($arg)*)) };
}

pub(crate) use {configuration, domain, structural};

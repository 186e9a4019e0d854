//! Errors with their process exit codes.

use holecov::Error;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// Unreadable or inconsistent input: exit 1.
    Input,
    /// The computation itself failed: exit 2.
    Numerical,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Input, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Numerical, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Input => 1,
            FailureKind::Numerical => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::DuplicateLocation(..)
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Empty(_)
            | Error::NotCertified(_)
            | Error::NotDifferentiable { .. }
            | Error::NoSpectralDensity(..) => FailureKind::Input,
            Error::Domain { .. }
            | Error::Overflow { .. }
            | Error::NonConvergence { .. }
            | Error::Factorization { .. }
            | Error::DegenerateVariogram { .. }
            | Error::RankDeficient(_) => FailureKind::Numerical,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}

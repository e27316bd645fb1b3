use std::fmt;

use crate::linalg::{bloch_vector, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact,
    Limit,
    ClosedForm,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Limit => "limit",
            Method::ClosedForm => "closed_form",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "exact" => Some(Method::Exact),
            "limit" => Some(Method::Limit),
            "closed_form" => Some(Method::ClosedForm),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One sampled instant.
#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    /// Propagated operator in the method's working space (unnormalized for
    /// selective dynamics, where its trace is the success probability).
    pub state: ComplexMatrix,
    /// Normalized reduced system state.
    pub system: ComplexMatrix,
    /// Trace of `state` before normalization.
    pub trace: f64,
}

impl Sample {
    pub fn p_up(&self) -> f64 {
        self.system[(0, 0)].re
    }

    pub fn purity(&self) -> f64 {
        self.system.purity()
    }

    pub fn p_err(&self) -> f64 {
        1.0 - self.trace
    }

    pub fn bloch(&self) -> Option<[f64; 3]> {
        (self.system.dim() == 2).then(|| bloch_vector(&self.system))
    }
}

/// Why a trajectory stopped before its last requested time.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub t: f64,
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub method: Method,
    pub samples: Vec<Sample>,
    pub truncated: Option<Truncation>,
}

impl Trajectory {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            samples: Vec::new(),
            truncated: None,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

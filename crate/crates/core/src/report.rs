use std::fmt;

use serde::Serialize;

/// Axioms checked by this crate: copula (D), subcopula (S) and stochastic
/// array (A) conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    /// Grounded: zero whenever some coordinate is zero.
    D1,
    /// Uniform margins.
    D2,
    /// L-increasing on unit cells.
    D3,
    S1,
    S2,
    /// L-increasing on boxes between adjacent domain points.
    S3,
    /// Nonnegative entries.
    A1,
    /// Every axis-aligned hyperplane sums to one.
    A2,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The location that witnesses a violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A single grid point (grid coordinates, or 1-based array indices).
    Point { index: Vec<usize> },
    /// A box given by its lower and upper corners in grid coordinates.
    Cell { lower: Vec<usize>, upper: Vec<usize> },
    /// Hyperplane `index` (1-based) orthogonal to axis `axis` (1-based).
    Line { axis: usize, index: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Point { index } => write!(f, "point {index:?}"),
            Witness::Cell { lower, upper } => write!(f, "cell [{lower:?}, {upper:?}]"),
            Witness::Line { axis, index } => write!(f, "axis {axis} line {index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Witness,
    pub observed: f64,
    /// Human-readable form of the relation that should have held.
    pub required: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}: observed {}, required {}",
            self.axiom, self.witness, self.observed, self.required
        )
    }
}

/// Result of an axiom check. `passed` holds exactly when `violations` is empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub(crate) fn from_violations(violations: Vec<Violation>) -> Self {
        AxiomReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    /// Violations of one particular axiom.
    pub fn of(&self, axiom: Axiom) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            return write!(f, "all axioms hold");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        if let Some(first) = self.violations.first() {
            write!(f, ", first: {first}")?;
        }
        Ok(())
    }
}

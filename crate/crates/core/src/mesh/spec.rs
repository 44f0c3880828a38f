use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Orientation of an edge or l-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("degree must be at least 1 (got d1={d1}, d2={d2})")]
    DegreeTooSmall { d1: usize, d2: usize },
    #[error("smoothness alpha={alpha} must be below d1={d1}")]
    AlphaTooLarge { d1: usize, alpha: usize },
    #[error("smoothness beta={beta} must be below d2={d2}")]
    BetaTooLarge { d2: usize, beta: usize },
}

/// Bi-degree `(d1, d2)` and smoothness `(alpha, beta)` of a spline space.
///
/// `alpha` is the order of continuity across vertical edges (in the x
/// direction), `beta` across horizontal edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct SplineSpaceSpec {
    d1: usize,
    d2: usize,
    alpha: usize,
    beta: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    d1: usize,
    d2: usize,
    alpha: usize,
    beta: usize,
}

impl TryFrom<RawSpec> for SplineSpaceSpec {
    type Error = SpecError;
    fn try_from(r: RawSpec) -> Result<Self, SpecError> {
        SplineSpaceSpec::new(r.d1, r.d2, r.alpha, r.beta)
    }
}

impl From<SplineSpaceSpec> for RawSpec {
    fn from(s: SplineSpaceSpec) -> Self {
        RawSpec {
            d1: s.d1,
            d2: s.d2,
            alpha: s.alpha,
            beta: s.beta,
        }
    }
}

impl SplineSpaceSpec {
    pub fn new(d1: usize, d2: usize, alpha: usize, beta: usize) -> Result<Self, SpecError> {
        if d1 == 0 || d2 == 0 {
            return Err(SpecError::DegreeTooSmall { d1, d2 });
        }
        if alpha >= d1 {
            return Err(SpecError::AlphaTooLarge { d1, alpha });
        }
        if beta >= d2 {
            return Err(SpecError::BetaTooLarge { d2, beta });
        }
        Ok(SplineSpaceSpec {
            d1,
            d2,
            alpha,
            beta,
        })
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// `d1 - alpha`: cofactor degree budget in x, plus one.
    pub fn gap_x(&self) -> usize {
        self.d1 - self.alpha
    }

    /// `d2 - beta`.
    pub fn gap_y(&self) -> usize {
        self.d2 - self.beta
    }

    /// Number of coefficients of a single vertex cofactor.
    pub fn vertex_cofactor_len(&self) -> usize {
        self.gap_x() * self.gap_y()
    }

    /// Smallest vertex counts `(N^h, N^v)` at which an interior l-edge
    /// block has as many columns as rows.
    pub fn thresholds(&self) -> (usize, usize) {
        (
            (self.d1 + 1).div_ceil(self.gap_x()),
            (self.d2 + 1).div_ceil(self.gap_y()),
        )
    }

    pub fn threshold(&self, orientation: Orientation) -> usize {
        let (h, v) = self.thresholds();
        match orientation {
            Orientation::Horizontal => h,
            Orientation::Vertical => v,
        }
    }

    /// Rows contributed by one interior l-edge of the given orientation.
    pub fn ledge_rows(&self, orientation: Orientation) -> usize {
        match orientation {
            Orientation::Horizontal => (self.d1 + 1) * self.gap_y(),
            Orientation::Vertical => (self.d2 + 1) * self.gap_x(),
        }
    }

    /// Degrees of freedom carried by one cross-cut of the given orientation.
    pub fn crosscut_freedom(&self, orientation: Orientation) -> usize {
        self.ledge_rows(orientation)
    }

    /// An interior l-edge with `m` vertices is vanished when its own
    /// conformality block has a trivial kernel.
    pub fn is_vanished(&self, orientation: Orientation, m: usize) -> bool {
        match orientation {
            Orientation::Horizontal => m * self.gap_x() <= self.d1 + 1,
            Orientation::Vertical => m * self.gap_y() <= self.d2 + 1,
        }
    }

    /// True when `d1 >= 2 alpha + 1` and `d2 >= 2 beta + 1`.
    pub fn is_reduced_regularity(&self) -> bool {
        self.d1 > 2 * self.alpha && self.d2 > 2 * self.beta
    }
}

impl std::fmt::Display for SplineSpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S({},{},{},{})", self.d1, self.d2, self.alpha, self.beta)
    }
}

/// Free-function form of [`SplineSpaceSpec::thresholds`].
pub fn thresholds(spec: &SplineSpaceSpec) -> (usize, usize) {
    spec.thresholds()
}

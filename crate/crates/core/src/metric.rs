//! One entry point for the four distance flavors: shape space S₁ or S₂,
//! fixed parameterization or a search over start points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contour::NormalizedCurve;
use crate::grassmann::{self, GrassmannPoint};
use crate::srvf::{self, DpGrid, ElasticOptions, RotationMode, SrvfCurve};
use crate::Error;

/// Shape space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// Grassmannian of 2-planes.
    S1,
    /// Square-root velocity functions.
    S2,
}

/// Parameterization handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Canonical start points and poses are taken as given.
    Fixed,
    /// The second curve's start point is searched.
    Reparam,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::S1 => "S1",
            Space::S2 => "S2",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fixed => "fixed",
            Method::Reparam => "reparam",
        })
    }
}

impl FromStr for Space {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Space::S1),
            "S2" => Ok(Space::S2),
            _ => Err(format!("unknown space `{s}` (expected S1 or S2)")),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(Method::Fixed),
            "reparam" => Ok(Method::Reparam),
            _ => Err(format!("unknown method `{s}` (expected fixed or reparam)")),
        }
    }
}

/// A fully specified distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub space: Space,
    pub method: Method,
    /// Start-point stride for [`Method::Reparam`].
    pub shift_step: usize,
    /// Rotations searched in S₂.
    pub rotation: RotationMode,
    /// Dynamic-programming refinement for S₂ with [`Method::Reparam`].
    pub use_dp: bool,
    pub dp_grid: DpGrid,
}

impl MetricSpec {
    /// Defaults: stride 5, half-turn alignment for the fixed method and full
    /// rotation alignment for the start-point search, no DP.
    pub fn new(space: Space, method: Method) -> Self {
        let rotation = match method {
            Method::Fixed => RotationMode::FlipOnly,
            Method::Reparam => RotationMode::Procrustes,
        };
        Self { space, method, shift_step: 5, rotation, use_dp: false, dp_grid: DpGrid::Banded }
    }

    pub fn with_shift_step(mut self, step: usize) -> Self {
        self.shift_step = step;
        self
    }

    pub fn with_rotation(mut self, rotation: RotationMode) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn with_dp(mut self, use_dp: bool) -> Self {
        self.use_dp = use_dp;
        self
    }

    /// Whether `distance(a, b) == distance(b, a)` by construction. Searches
    /// over the second curve only are not.
    pub fn is_symmetric(&self) -> bool {
        self.method == Method::Fixed
    }

    /// Converts a curve once so it can enter many distances.
    pub fn prepare(&self, curve: &NormalizedCurve) -> Result<Prepared, Error> {
        Ok(match self.space {
            Space::S1 => Prepared::S1(grassmann::to_grassmann(curve)),
            Space::S2 => Prepared::S2(srvf::closed_srvf(curve)?),
        })
    }

    /// Distance from `a` to `b`; the search, if any, moves `b`.
    pub fn distance(&self, a: &Prepared, b: &Prepared) -> Result<f64, Error> {
        match (a, b) {
            (Prepared::S1(a), Prepared::S1(b)) => Ok(match self.method {
                Method::Fixed => grassmann::grassmann_distance(a, b)?.d,
                Method::Reparam => grassmann::grassmann_distance_minshift(a, b, self.shift_step)?.d,
            }),
            (Prepared::S2(a), Prepared::S2(b)) => Ok(match self.method {
                Method::Fixed => srvf::fixed_distance(a, b, self.rotation)?,
                Method::Reparam => {
                    let opts = ElasticOptions {
                        shift_step: self.shift_step,
                        rotation: self.rotation,
                        use_dp: self.use_dp,
                        dp_grid: self.dp_grid,
                    };
                    srvf::elastic_distance(a, b, &opts)?.d
                }
            }),
            _ => Err(Error::SpaceMismatch),
        }
    }

    /// Symmetrized distance: the smaller of both directions for methods that
    /// search over one curve only.
    pub fn symmetric_distance(&self, a: &Prepared, b: &Prepared) -> Result<f64, Error> {
        let ab = self.distance(a, b)?;
        if self.is_symmetric() {
            Ok(ab)
        } else {
            Ok(ab.min(self.distance(b, a)?))
        }
    }

    /// Distance between two canonical curves.
    pub fn curve_distance(&self, a: &NormalizedCurve, b: &NormalizedCurve) -> Result<f64, Error> {
        self.distance(&self.prepare(a)?, &self.prepare(b)?)
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.space, self.method)
    }
}

/// A curve converted into the representation of its shape space.
#[derive(Debug, Clone)]
pub enum Prepared {
    S1(GrassmannPoint),
    S2(SrvfCurve),
}

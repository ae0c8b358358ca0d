//! Shape-space distances and classifiers for planar closed contours.
//!
//! Contours are first brought to a canonical form ([`contour::normalize`]):
//! equally spaced samples, unit length, centered, counterclockwise, major
//! axis along `x` and a fixed start point. Two shape spaces then measure
//! distances between canonical curves:
//!
//! - [`grassmann`]: curves as 2-planes of functions, distance from Jordan
//!   angles;
//! - [`srvf`]: square-root velocity functions on the unit sphere.
//!
//! Either can use the canonical parameterization as is or search over start
//! points ([`metric`]). Distances to a circle and an ellipse
//! ([`templates`]) give a two-number description of a cell, and
//! [`analysis`] turns distances into k-NN, LDA and k-medoids results with
//! the usual confusion-matrix metrics.
//!
//! ```
//! use cellshape::contour::{normalize, Label, RawContour};
//! use cellshape::metric::{Method, MetricSpec, Space};
//! use cellshape::synthetic::{circle_points, ellipse_points};
//!
//! let circle = RawContour::new("c", circle_points(400, 3.0), Label::Normal)?;
//! let ellipse = RawContour::new("e", ellipse_points(400, 2.0, 0.5), Label::Sickle)?;
//! let (a, b) = (normalize(&circle, 295)?, normalize(&ellipse, 295)?);
//!
//! let spec = MetricSpec::new(Space::S2, Method::Fixed);
//! let d = spec.curve_distance(&a, &b)?;
//! assert!(d > 0.1 && d < std::f64::consts::PI);
//! assert!(spec.curve_distance(&a, &a)? < 1e-6);
//! # Ok::<(), cellshape::Error>(())
//! ```

pub mod analysis;
pub mod contour;
pub mod geometry;
pub mod grassmann;
pub mod metric;
pub mod srvf;
pub mod synthetic;
pub mod templates;

use thiserror::Error;

/// Any failure in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Contour(#[from] contour::ContourError),
    #[error(transparent)]
    Grassmann(#[from] grassmann::GrassmannError),
    #[error(transparent)]
    Srvf(#[from] srvf::SrvfError),
    #[error(transparent)]
    Template(#[from] templates::TemplateError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error("curves prepared for different shape spaces")]
    SpaceMismatch,
    #[error("distance between `{a}` and `{b}`: {source}")]
    Pair {
        a: String,
        b: String,
        #[source]
        source: Box<Error>,
    },
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/contours.md")]
    mod contours {}
    #[doc = include_str!("../../../book/src/grassmann.md")]
    mod grassmann {}
    #[doc = include_str!("../../../book/src/srvf.md")]
    mod srvf {}
    #[doc = include_str!("../../../book/src/parameterization.md")]
    mod parameterization {}
    #[doc = include_str!("../../../book/src/templates.md")]
    mod templates {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

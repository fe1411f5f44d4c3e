//! Direction sets of finite point clouds.
//!
//! For a set `E ⊂ ℝ^d`, its direction set is every unit vector
//! `(y − x)/|y − x|` with `x ≠ y` in `E`, and identifying `u` with `−u`
//! gives a subset of projective space `RP^{d−1}`. How much of projective
//! space that subset fills decides whether `E` is a Lipschitz graph, a graph
//! that is not Lipschitz, or not a graph in any direction.
//!
//! ```
//! use dirset::{classify, generate, Generator, GeneratorSpec, Verdict};
//!
//! let cloud = generate(&GeneratorSpec::new(Generator::AbsoluteValue { n: 201 }, 0)?)?;
//! let result = classify(&cloud, dirset::DEFAULT_EPS_HOLE, dirset::DEFAULT_EPS_COVER, 1e-9)?;
//! assert_eq!(result.verdict, Verdict::ClassI);
//! # Ok::<(), dirset::Error>(())
//! ```

mod cap;
mod cloud;
mod direction_set;
mod error;
mod generators;
mod geometry;
mod hull;
mod index;
mod nets;
mod secant;
mod trichotomy;

pub use cap::{
    coverage_fraction, default_net_density, eps_cover_test, largest_empty_arc, largest_empty_cap,
    CapMethod, CapQuality, CapReport, CapSearch, CoverageCertificate, COVERAGE_NET_LIMIT,
    DEFAULT_CAP_SAMPLES,
};
pub use cloud::PointCloud;
pub use direction_set::{
    collinearity_test, count_distinct_directions, direction_set_with_oriented, oriented_directions,
    unoriented_directions, Collinearity, DirectionSet, DirectionSetRecord, OrientedDirections,
    DEFAULT_DEDUP_TOL,
};
pub use error::{Error, Result};
pub use generators::{generate, weierstrass_terms, Generator, GeneratorSpec, GENERATOR_KINDS, MAX_DEPTH};
pub use geometry::{
    apply_rotation, pair_direction, projective_canonical, projective_distance, rotation_to_pole,
    rp1_distance, ProjectiveDirection, Rotation, UnitDirection, COINCIDENCE_THRESHOLD,
    SIGN_THRESHOLD, UNIT_TOLERANCE,
};
pub use secant::{
    fill_eps, refinement_study, secant_slopes, slope_connected_hull, slope_fill_test, FillOutcome,
    FunctionSpec, RefinementRow, SlopeHull, SlopeSet,
};
pub use trichotomy::{
    classify, extract_graph, lipschitz_constant, vertical_line_test, Classification, Evidence,
    GraphVerdict, GraphWitness, RefinementNote, Verdict, DEFAULT_EPS_COVER, DEFAULT_EPS_HOLE,
    DEFAULT_TOL,
};

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/directions.md")]
    mod directions {}
    #[doc = include_str!("../../../book/src/caps.md")]
    mod caps {}
    #[doc = include_str!("../../../book/src/classify.md")]
    mod classify {}
    #[doc = include_str!("../../../book/src/secants.md")]
    mod secants {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

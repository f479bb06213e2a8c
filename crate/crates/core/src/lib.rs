//! Geometry and verification toolkit for Cantor comb domains.
//!
//! The comb domain removes from the square `(-1,1)^2` the set of points at
//! height at most the distance to a Cantor set on the positive axis. The
//! crate builds that geometry exactly, integrates boundary-distance powers
//! along complement curves, detects two-sided boundary points by multiscale
//! flood fill, estimates fractal dimension by box counting and separated-net
//! hierarchies, and evaluates the dimension bound and its sharpness calculus
//! numerically.

pub mod bounds;
pub mod cantor;
pub mod comb;
pub mod curve;
pub mod dimension;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod render;
pub mod twosided;

pub use bounds::{
    c_threshold, f_p_eval, lambda_for_c, lemma41_bound, m1_floor, main_bound, verify_sharpness,
    BoundReport, SharpnessReport,
};
pub use cantor::{
    cantor_distance, endpoints, gap_intervals, level_intervals, CantorParams, CertifiedDist,
    IntervalKind, LevelInterval,
};
pub use comb::{CombDomain, Occupancy, RasterBall, Region};
pub use curve::{
    connect, estimate_c, estimate_c_detailed, gap_closed_form, interval_series_closed_form,
    polyline_integral, profile_integral, segment_profile_integral, CEstimate, Exponent, PairCase,
    PairRecord, QuadResult,
};
pub use dimension::{
    box_count, build_hierarchy, net_dimension_bound, net_dimension_bound_checked, separated_net,
    DimensionEstimate, NetHierarchy, PointSet,
};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentArtifacts, ExperimentConfig, ExperimentReport};
pub use geom::{Point2, Polyline};
pub use twosided::{
    components_in_ball, count_meeting_half, detect, detect_corpus, ComponentLabeling,
    TwoSidedCertificate, Verdict,
};

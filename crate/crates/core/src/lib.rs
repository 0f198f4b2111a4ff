//! Stratified discrete Morse theory on finite regular CW complexes.
//!
//! A complex is given by its face poset ([`Complex`]). On top of it sit
//! stratifications and their frontier order ([`stratification`]), collapse
//! certificates ([`collapse`]), halos, stratified discrete Morse functions and
//! the sublevel sweep ([`morse`]), barycentric subdivisions with upper
//! envelopes and lower links ([`subdivision`]), integer homology
//! ([`homology`]) and Conley indices of multivector fields ([`conley`]).
//! Values are exact rationals throughout.

pub mod collapse;
pub mod complex;
pub mod conley;
pub mod cwx;
pub mod error;
pub mod fixtures;
pub mod homology;
pub mod morse;
pub mod stratification;
pub mod subdivision;
pub mod value;

pub use collapse::{
    find_collapse, free_face_pairs, replay, CollapseCertificate, CollapseOutcome, FreeFacePair,
    DEFAULT_BUDGET,
};
pub use complex::{Cell, CellSet, Complex, ComplexViolation, ValidationReport};
pub use conley::{
    conley_index, e1_page, exit_set, mvf_order, validate_mvf, E1Page, MultivectorField,
    MvfOrdering,
};
pub use cwx::Document;
pub use error::{Error, Result};
pub use homology::{relative_homology, smith_normal_form, GradedHomology, IntegerMatrix};
pub use morse::{
    classify, delta, halo, lower_star, sublevel_closure, sweep, upper_closure, validate_sdmf,
    CellStatus, HaloResult, MorseReport, SweepEvent, ValueMap, Verdict,
};
pub use stratification::{
    check_frontier, compute_strata, stratum_order, LevelMap, Stratification, StratumId,
};
pub use subdivision::{barycentric_subdivide, upper_envelope, SdComplex};
pub use value::{format_value, parse_value, Value};

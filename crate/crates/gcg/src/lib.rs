//! Verifier and constructor toolkit for graphical complexes of groups.
//!
//! The pipeline runs bottom-up: finite [`groups`] and 1-dimensional
//! [`poset`]s combine into a [`gcog::GraphicalComplexOfGroups`]; [`develop`]
//! builds balls of its development by link saturation; [`smallcancel`],
//! [`wise`] and [`flats`] certify curvature, small cancellation, nerve and flat
//! properties on those balls; [`examples`] generates the standard families.

pub mod develop;
pub mod examples;
pub mod flats;
pub mod gcog;
pub mod graph;
pub mod groups;
pub mod poset;
pub mod smallcancel;
pub mod wise;

pub use develop::{develop_ball, develop_ball_capped, develop_focused, DevelopedBall, GroupWord};
pub use gcog::{classify, validate, GraphicalComplexOfGroups, Verdict};
pub use groups::{FiniteGroup, Monomorphism};
pub use poset::{OneDimPoset, VertexId, VertexKind};

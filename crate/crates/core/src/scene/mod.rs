//! Serialization of placed networks: VRML97 worlds and the JSON interchange
//! format.

pub mod interchange;
pub mod vrml;

pub use interchange::{
    emit_graph_interchange, parse_graph_interchange, GraphDocument, InterchangeError,
};
pub use vrml::{emit_vrml, lint_vrml, SceneOptions, VrmlSummary, VRML_HEADER};

//! Collatz trajectories, the G-cell construction of the inverse 3x+1 tree,
//! planar grid layout and scene export.

pub mod collatz;
pub mod dyadic;
pub mod gcell;
pub mod layout;
pub mod network;
pub mod oracle;
pub mod region;
pub mod scene;
pub mod verify;

pub use collatz::{collatz_step, trajectory, CollatzError, CollatzValue, Trajectory};
pub use dyadic::Dyadic;
pub use gcell::{build_gcell, right_abutment, Abutment, Arc, ArcKind, GCell, GCellError};
pub use layout::{layout_network, GridPos, LayoutError, PlacedNetwork};
pub use network::{generate_network, GCellNetwork, NetworkError};
pub use oracle::{oracle_reverse_graph, ReverseGraph};
pub use region::{render_region, RegionFormat, RegionLimits, RegionRequest};
pub use scene::{emit_graph_interchange, emit_vrml, parse_graph_interchange, SceneOptions};
pub use verify::{verify_range, RangeReport};

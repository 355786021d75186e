//! Versioned JSON form of a placed network.
//!
//! ```json
//! {
//!   "metadata": { "format_version": 1, "root_seed": 1, "max_value": 32, ... },
//!   "nodes": [ { "value": 21, "x": "2", "y": 5, "generation": 1, "phantom": false }, ... ],
//!   "arcs": [ { "from": 21, "to": 32, "kind": "odd" }, ... ]
//! }
//! ```
//!
//! `x` is an exact fraction `n/d` with `d` a power of two. Phantom nodes
//! repeat a value that also has an ordinary record.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::gcell::{Arc, ArcKind};
use crate::layout::{GridPos, PlacedNetwork};
use crate::network::{GCellNetwork, NetworkBounds, NodeInfo};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub format_version: u32,
    pub root_seed: u64,
    pub max_value: u64,
    pub max_generation: Option<u32>,
    pub base_width: Dyadic,
    pub cell_widths: Vec<CellWidth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellWidth {
    pub generation: u32,
    pub width: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub value: u64,
    pub x: Dyadic,
    pub y: u64,
    pub generation: u32,
    pub phantom: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcRecord {
    pub from: u64,
    pub to: u64,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub metadata: Metadata,
    pub nodes: Vec<NodeRecord>,
    pub arcs: Vec<ArcRecord>,
}

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("malformed interchange document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("node {0} listed twice")]
    DuplicateNode(u64),
    #[error("arc {0} -> {1} has the wrong kind")]
    ArcKind(u64, u64),
}

impl GraphDocument {
    pub fn from_placed(placed: &PlacedNetwork) -> GraphDocument {
        let net = placed.network();
        let bounds = net.bounds();
        let mut nodes = Vec::with_capacity(net.nodes().len() + net.phantoms().len());
        for (v, info) in net.nodes() {
            let pos = &placed.positions()[v];
            nodes.push(NodeRecord {
                value: *v,
                x: pos.x.clone(),
                y: pos.y,
                generation: info.generation,
                phantom: false,
            });
        }
        for (v, info) in net.phantoms() {
            let pos = &placed.phantom_positions()[v];
            nodes.push(NodeRecord {
                value: *v,
                x: pos.x.clone(),
                y: pos.y,
                generation: info.generation,
                phantom: true,
            });
        }
        GraphDocument {
            metadata: Metadata {
                format_version: FORMAT_VERSION,
                root_seed: net.root_seed(),
                max_value: bounds.max_value,
                max_generation: bounds.max_generation,
                base_width: placed.base_width().clone(),
                cell_widths: placed
                    .cell_widths()
                    .iter()
                    .map(|(g, w)| CellWidth {
                        generation: *g,
                        width: w.clone(),
                    })
                    .collect(),
            },
            nodes,
            arcs: net
                .arcs()
                .iter()
                .map(|a| ArcRecord {
                    from: a.from,
                    to: a.to,
                    kind: a.kind,
                })
                .collect(),
        }
    }

    /// Rebuilds the placed network. The expansion record (which seeds were
    /// visited) is not part of the format and comes back empty.
    pub fn to_placed(&self) -> Result<PlacedNetwork, InterchangeError> {
        let mut nodes = BTreeMap::new();
        let mut phantoms = BTreeMap::new();
        let mut positions = BTreeMap::new();
        let mut phantom_positions = BTreeMap::new();
        for r in &self.nodes {
            let (infos, places) = if r.phantom {
                (&mut phantoms, &mut phantom_positions)
            } else {
                (&mut nodes, &mut positions)
            };
            if infos
                .insert(
                    r.value,
                    NodeInfo {
                        generation: r.generation,
                    },
                )
                .is_some()
            {
                return Err(InterchangeError::DuplicateNode(r.value));
            }
            places.insert(r.value, GridPos::new(r.x.clone(), r.y));
        }
        let mut arcs = BTreeSet::new();
        for r in &self.arcs {
            let arc = Arc::new(r.from, r.to);
            if arc.kind != r.kind {
                return Err(InterchangeError::ArcKind(r.from, r.to));
            }
            arcs.insert(arc);
        }
        let m = &self.metadata;
        let net = GCellNetwork::from_parts(
            m.root_seed,
            NetworkBounds {
                max_value: m.max_value,
                max_generation: m.max_generation,
            },
            nodes,
            phantoms,
            arcs,
            BTreeMap::new(),
        );
        let cell_widths = m
            .cell_widths
            .iter()
            .map(|c| (c.generation, c.width.clone()))
            .collect();
        Ok(PlacedNetwork::from_parts(
            net,
            positions,
            phantom_positions,
            cell_widths,
            m.base_width.clone(),
        ))
    }
}

pub fn emit_graph_interchange(placed: &PlacedNetwork) -> String {
    let mut out = serde_json::to_string_pretty(&GraphDocument::from_placed(placed))
        .expect("plain data always serializes");
    out.push('\n');
    out
}

pub fn parse_graph_interchange(text: &str) -> Result<GraphDocument, InterchangeError> {
    // Check the version before the full schema so old or future documents
    // get a clear message.
    #[derive(Deserialize)]
    struct Probe {
        metadata: VersionOnly,
    }
    #[derive(Deserialize)]
    struct VersionOnly {
        format_version: u32,
    }
    let probe: Probe = serde_json::from_str(text)?;
    if probe.metadata.format_version != FORMAT_VERSION {
        return Err(InterchangeError::Version(probe.metadata.format_version));
    }
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::layout_network;
    use crate::network::generate_network;

    fn placed(max_value: u64) -> PlacedNetwork {
        let net = generate_network(1, max_value, None).unwrap();
        layout_network(net, Dyadic::from_integer(4)).unwrap()
    }

    #[test]
    fn root_only() {
        let doc = GraphDocument::from_placed(&placed(2));
        let values: Vec<(u64, bool)> = doc.nodes.iter().map(|n| (n.value, n.phantom)).collect();
        assert_eq!(values, vec![(1, false), (2, false)]);
        assert_eq!(doc.arcs.len(), 2);
        assert_eq!(doc.arcs[0].kind, ArcKind::Odd);
        assert_eq!(doc.arcs[1].kind, ArcKind::Halving);
    }

    #[test]
    fn node_twenty_one() {
        let text = emit_graph_interchange(&placed(32));
        let doc = parse_graph_interchange(&text).unwrap();
        let n = doc.nodes.iter().find(|n| n.value == 21).unwrap();
        assert_eq!((n.generation, n.x.to_string(), n.y), (1, "2".into(), 5));
        assert_eq!(doc.nodes.iter().filter(|n| n.phantom).count(), 2);
        assert!(text.contains("\"kind\": \"halving\""));
    }

    #[test]
    fn round_trip_is_exact() {
        let p = placed(1024);
        let text = emit_graph_interchange(&p);
        let doc = parse_graph_interchange(&text).unwrap();
        assert_eq!(doc, GraphDocument::from_placed(&p));
        let back = doc.to_placed().unwrap();
        assert_eq!(back.positions(), p.positions());
        assert_eq!(back.phantom_positions(), p.phantom_positions());
        assert_eq!(back.cell_widths(), p.cell_widths());
        assert_eq!(back.network().nodes(), p.network().nodes());
        assert_eq!(back.network().arcs(), p.network().arcs());
        assert_eq!(emit_graph_interchange(&back), text);
        assert!(back.violations().is_empty());
    }

    #[test]
    fn fractions_survive() {
        let p = placed(4000);
        let text = emit_graph_interchange(&p);
        assert!(p
            .positions()
            .values()
            .any(|pos| pos.x.denominator_exponent() > 30));
        let back = parse_graph_interchange(&text).unwrap().to_placed().unwrap();
        assert_eq!(back.positions(), p.positions());
    }

    #[test]
    fn rejects_bad_documents() {
        let text = emit_graph_interchange(&placed(8));
        let v2 = text.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(
            parse_graph_interchange(&v2),
            Err(InterchangeError::Version(2))
        ));
        assert!(matches!(
            parse_graph_interchange("{"),
            Err(InterchangeError::Syntax(_))
        ));
        let third = text.replacen("\"x\": \"0\"", "\"x\": \"1/3\"", 1);
        assert!(matches!(
            parse_graph_interchange(&third),
            Err(InterchangeError::Syntax(_))
        ));

        let mut doc = parse_graph_interchange(&text).unwrap();
        doc.arcs[0].kind = ArcKind::Halving;
        assert!(matches!(
            doc.to_placed(),
            Err(InterchangeError::ArcKind(1, 2))
        ));
        let mut doc = parse_graph_interchange(&text).unwrap();
        let dup = doc.nodes[3].clone();
        doc.nodes.push(dup);
        assert!(matches!(
            doc.to_placed(),
            Err(InterchangeError::DuplicateNode(_))
        ));
    }
}

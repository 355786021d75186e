//! Planar grid placement of a G-cell network.
//!
//! The root sits at the origin with the powers of two stacked above it on
//! `x = 0`. A cell seeded at `(x, y)` with width `w` puts its A column at `x`,
//! its B column at `x + w` and its top node at `(x + w/2, y + 2)`. The
//! next-generation cell above it and its same-generation right neighbor both
//! get width `w/2`, so a cell's whole subtree stays inside `[x, x + 2w)`. That
//! nesting is what keeps the drawing planar.
//!
//! Coordinates are exact dyadic rationals; `y` counts halvings from the root.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::gcell::{
    build_gcell, odd_predecessor, right_abutment, Abutment, Arc, ArcKind, ROOT_SEED,
};
use crate::network::GCellNetwork;

pub const DEFAULT_BASE_WIDTH: i64 = 4;
pub const DEFAULT_MAX_DENOMINATOR_EXPONENT: u32 = 512;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPos {
    pub x: Dyadic,
    pub y: u64,
}

impl GridPos {
    pub fn new(x: Dyadic, y: u64) -> GridPos {
        GridPos { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutOptions {
    /// Width of the first generation-1 cell (the cell seeded at 8 when rooted).
    pub base_width: Dyadic,
    /// Cells narrower than `2^-limit` are refused.
    pub max_denominator_exponent: u32,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            base_width: Dyadic::from_integer(DEFAULT_BASE_WIDTH),
            max_denominator_exponent: DEFAULT_MAX_DENOMINATOR_EXPONENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("base width must be positive")]
    NonPositiveWidth,
    #[error("cell at seed {seed} needs width 2^-{exponent}, below the 2^-{limit} limit; request a smaller region")]
    WidthUnderflow {
        seed: u64,
        exponent: u32,
        limit: u32,
    },
    #[error("node {0} was not reached by the placement walk")]
    Unplaced(u64),
    #[error("node {0} placed at two different positions")]
    Conflict(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedNetwork {
    network: GCellNetwork,
    positions: BTreeMap<u64, GridPos>,
    phantom_positions: BTreeMap<u64, GridPos>,
    cell_widths: BTreeMap<u32, Dyadic>,
    base_width: Dyadic,
}

impl PlacedNetwork {
    pub fn network(&self) -> &GCellNetwork {
        &self.network
    }

    pub fn positions(&self) -> &BTreeMap<u64, GridPos> {
        &self.positions
    }

    pub fn position(&self, v: u64) -> Option<&GridPos> {
        self.positions.get(&v)
    }

    pub fn phantom_positions(&self) -> &BTreeMap<u64, GridPos> {
        &self.phantom_positions
    }

    /// Width of the leading cell of each generation along the seed column.
    pub fn cell_widths(&self) -> &BTreeMap<u32, Dyadic> {
        &self.cell_widths
    }

    pub fn base_width(&self) -> &Dyadic {
        &self.base_width
    }

    pub fn from_parts(
        network: GCellNetwork,
        positions: BTreeMap<u64, GridPos>,
        phantom_positions: BTreeMap<u64, GridPos>,
        cell_widths: BTreeMap<u32, Dyadic>,
        base_width: Dyadic,
    ) -> PlacedNetwork {
        PlacedNetwork {
            network,
            positions,
            phantom_positions,
            cell_widths,
            base_width,
        }
    }

    /// Everything wrong with this placement; empty for a valid layout.
    pub fn violations(&self) -> Vec<LayoutViolation> {
        check_layout(self)
    }
}

pub fn layout_network(net: GCellNetwork, base_width: Dyadic) -> Result<PlacedNetwork, LayoutError> {
    layout_network_with(
        net,
        &LayoutOptions {
            base_width,
            ..LayoutOptions::default()
        },
    )
}

struct Frame {
    seed: u64,
    x: Dyadic,
    y: u64,
    width: Dyadic,
}

struct Placer<'a> {
    net: &'a GCellNetwork,
    limit: u32,
    positions: BTreeMap<u64, GridPos>,
    stack: Vec<Frame>,
}

impl Placer<'_> {
    fn put(&mut self, v: u64, x: &Dyadic, y: u64) -> Result<(), LayoutError> {
        if !self.net.contains_node(v) {
            return Ok(());
        }
        let pos = GridPos::new(x.clone(), y);
        match self.positions.get(&v) {
            Some(prev) if *prev != pos => Err(LayoutError::Conflict(v)),
            Some(_) => Ok(()),
            None => {
                self.positions.insert(v, pos);
                Ok(())
            }
        }
    }

    fn visit(&mut self, seed: u64, x: Dyadic, y: u64, width: Dyadic) -> Result<(), LayoutError> {
        if !self.net.seeds().contains_key(&seed) {
            return Ok(());
        }
        if width.denominator_exponent() > self.limit {
            return Err(LayoutError::WidthUnderflow {
                seed,
                exponent: width.denominator_exponent(),
                limit: self.limit,
            });
        }
        self.stack.push(Frame { seed, x, y, width });
        Ok(())
    }

    fn place_root(&mut self, width: &Dyadic) -> Result<(), LayoutError> {
        let zero = Dyadic::zero();
        self.put(1, &zero, 0)?;
        for (k, v) in [2u64, 4, 8].into_iter().enumerate() {
            self.put(v, &zero, k as u64 + 1)?;
        }
        self.put(5, &width.half(), 3)?;
        self.visit(8, zero, 3, width.half())
    }

    fn place(&mut self, f: Frame) -> Result<(), LayoutError> {
        let Frame {
            seed: c,
            x,
            y,
            width: w,
        } = f;
        match c % 3 {
            2 => {
                let cell = build_gcell(c, 0).expect("expanded seeds fit in 64 bits");
                let [a, a2, a4] = cell.left();
                let [b, b2, b4] = cell.right().expect("C = 2 mod 3 has a B column");
                let bx = &x + &w;
                let half = w.half();
                self.put(a, &x, y)?;
                self.put(a2, &x, y + 1)?;
                self.put(a4, &x, y + 2)?;
                self.put(b, &bx, y)?;
                self.put(b2, &bx, y + 1)?;
                self.put(b4, &bx, y + 2)?;
                self.put(b4 + 1, &(&x + &half), y + 2)?;
                self.visit(a4, x, y + 2, half.clone())?;
                match right_abutment(&cell).expect("full cell") {
                    Abutment::AtBase(s) => self.visit(s, bx, y, half)?,
                    Abutment::AtDouble(s) => self.visit(s, bx, y + 1, half)?,
                    Abutment::DeadBranch => self.visit(b4, bx, y + 2, w)?,
                }
            }
            1 => {
                debug_assert!(odd_predecessor(c).is_none());
                self.put(c, &x, y)?;
                self.visit(2 * c, x, y + 1, w)?;
            }
            _ => {
                self.put(c, &x, y)?;
                self.put(2 * c, &x, y + 1)?;
                self.put(4 * c, &x, y + 2)?;
                self.visit(4 * c, x, y + 2, w)?;
            }
        }
        Ok(())
    }
}

pub fn layout_network_with(
    net: GCellNetwork,
    opts: &LayoutOptions,
) -> Result<PlacedNetwork, LayoutError> {
    let base = opts.base_width.clone();
    if base.is_negative() || base.is_zero() {
        return Err(LayoutError::NonPositiveWidth);
    }
    let rooted = net.is_rooted();
    let root_width = if rooted { base.double() } else { base.clone() };

    let mut placer = Placer {
        net: &net,
        limit: opts.max_denominator_exponent,
        positions: BTreeMap::new(),
        stack: Vec::new(),
    };
    if rooted {
        if net.seeds().contains_key(&ROOT_SEED) {
            placer.place_root(&root_width)?;
        }
    } else {
        placer.visit(net.root_seed(), Dyadic::zero(), 0, base.clone())?;
    }
    while let Some(frame) = placer.stack.pop() {
        placer.place(frame)?;
    }
    let positions = placer.positions;
    if let Some(v) = net.nodes().keys().find(|v| !positions.contains_key(v)) {
        return Err(LayoutError::Unplaced(*v));
    }

    // Root cell's ghost column sits where B, 2B, 4B would be: x = root width.
    let phantom_positions = net
        .phantoms()
        .keys()
        .map(|&v| {
            let row = if v == 2 { 2 } else { 3 };
            (v, GridPos::new(root_width.clone(), row))
        })
        .collect();

    let top_generation = net.nodes().values().map(|n| n.generation).max();
    let mut cell_widths = BTreeMap::new();
    if let Some(top) = top_generation {
        let mut w = root_width;
        for g in 0..=top {
            cell_widths.insert(g, w.clone());
            w = w.half();
        }
    }

    Ok(PlacedNetwork {
        network: net,
        positions,
        phantom_positions,
        cell_widths,
        base_width: base,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutViolation {
    Unplaced(u64),
    Collision { first: u64, second: u64 },
    NotAxisAligned(Arc),
    Overlap(Arc, Arc),
    NodeOnArc { node: u64, arc: Arc },
    OffTrunk(u64),
}

fn is_root_cycle(a: &Arc) -> bool {
    (a.from, a.to) == (1, 2)
}

fn check_layout(p: &PlacedNetwork) -> Vec<LayoutViolation> {
    let mut out = Vec::new();
    let net = &p.network;

    let mut seen: HashMap<&GridPos, u64> = HashMap::new();
    for v in net.nodes().keys() {
        match p.positions.get(v) {
            None => out.push(LayoutViolation::Unplaced(*v)),
            Some(pos) => {
                if let Some(first) = seen.insert(pos, *v) {
                    out.push(LayoutViolation::Collision { first, second: *v });
                }
            }
        }
    }

    // per-row horizontal segments and per-column vertical segments
    let mut rows: BTreeMap<u64, Vec<(Dyadic, Dyadic, Arc)>> = BTreeMap::new();
    let mut columns: HashMap<(&Dyadic, u64), Arc> = HashMap::new();
    for arc in net.arcs() {
        if is_root_cycle(arc) {
            continue;
        }
        let (Some(from), Some(to)) = (p.positions.get(&arc.from), p.positions.get(&arc.to)) else {
            continue; // reported as unplaced
        };
        match arc.kind {
            ArcKind::Halving => {
                if from.x != to.x || from.y != to.y + 1 {
                    out.push(LayoutViolation::NotAxisAligned(*arc));
                } else if let Some(other) = columns.insert((&to.x, to.y), *arc) {
                    out.push(LayoutViolation::Overlap(other, *arc));
                }
            }
            ArcKind::Odd => {
                if from.y != to.y || from.x <= to.x {
                    out.push(LayoutViolation::NotAxisAligned(*arc));
                } else {
                    rows.entry(to.y)
                        .or_default()
                        .push((to.x.clone(), from.x.clone(), *arc));
                }
            }
        }
    }

    let mut nodes_by_row: BTreeMap<u64, Vec<(&Dyadic, u64)>> = BTreeMap::new();
    for (v, pos) in &p.positions {
        nodes_by_row.entry(pos.y).or_default().push((&pos.x, *v));
    }
    for row in nodes_by_row.values_mut() {
        row.sort();
    }

    for (y, segments) in rows.iter_mut() {
        segments.sort();
        let mut reach: Option<(&Dyadic, Arc)> = None;
        for (lo, hi, arc) in segments.iter() {
            if let Some((end, prev)) = reach {
                if lo < end {
                    out.push(LayoutViolation::Overlap(prev, *arc));
                }
            }
            if reach.as_ref().is_none_or(|(end, _)| hi > *end) {
                reach = Some((hi, *arc));
            }
            if let Some(row) = nodes_by_row.get(y) {
                let start = row.partition_point(|(x, _)| *x <= lo);
                for (x, v) in &row[start..] {
                    if *x >= hi {
                        break;
                    }
                    out.push(LayoutViolation::NodeOnArc {
                        node: *v,
                        arc: *arc,
                    });
                }
            }
        }
    }

    if net.is_rooted() {
        for (v, pos) in &p.positions {
            if v.is_power_of_two() {
                let k = u64::from(v.trailing_zeros());
                if !pos.x.is_zero() || pos.y != k {
                    out.push(LayoutViolation::OffTrunk(*v));
                }
            }
        }
    }
    out
}

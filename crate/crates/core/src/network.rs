//! Expansion of a seed into a deduplicated network of abutting G-cells.
//!
//! Every pending seed `(C, g)` is dispatched on `C mod 3`:
//!
//! * `2`: a full cell. Up-seeds `(4C, g+1)` and `(4B+1, g+1)` start the next
//!   generation; the right neighbor (`B` or `2B`) keeps generation `g`; a dead
//!   branch continues as the bare column `(4B, g+1)`.
//! * `1`: no odd predecessor. Emit `C` and continue at `(2C, g)`.
//! * `0`: a bare column `C, 2C, 4C` that never branches; continue at `(4C, g+1)`.
//!
//! Seeds 1 and 2 produce the root cell; the `1 <-> 2` cycle is never re-entered.
//!
//! Nodes above `max_value` are pruned from the output, but their seeds are
//! still expanded when some start `n <= max_value` passes through them on its
//! way to 1. Without that, arcs such as `27 -> 41` (both below 100) would be
//! unreachable at `max_value = 100`, since 27 only joins the root through 9232.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collatz::{step_u64, DEFAULT_ITERATION_CAP};
use crate::gcell::{
    build_gcell, odd_predecessor, right_abutment, Abutment, Arc, GCell, GCellError, ROOT_SEED,
};
use crate::oracle::oracle_reverse_graph;

/// Largest accepted `max_value`; every cell built below it fits in 64 bits.
pub const MAX_VALUE_LIMIT: u64 = u64::MAX / 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub generation: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkBounds {
    pub max_value: u64,
    /// `None` is unbounded.
    pub max_generation: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("root seed must be a positive integer")]
    ZeroSeed,
    #[error("max_value {0} exceeds the supported limit {MAX_VALUE_LIMIT}")]
    ValueTooLarge(u64),
    #[error(transparent)]
    Cell(#[from] GCellError),
}

/// Queue discipline for the expansion worklist. The result does not depend
/// on it; the alternatives exist so that can be tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorklistOrder {
    /// Lowest generation first, then lowest seed.
    #[default]
    Generation,
    Fifo,
    Lifo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GCellNetwork {
    root_seed: u64,
    bounds: NetworkBounds,
    nodes: BTreeMap<u64, NodeInfo>,
    phantoms: BTreeMap<u64, NodeInfo>,
    arcs: BTreeSet<Arc>,
    seeds: BTreeMap<u64, u32>,
}

impl GCellNetwork {
    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn bounds(&self) -> NetworkBounds {
        self.bounds
    }

    /// True when the expansion started from the root cell.
    pub fn is_rooted(&self) -> bool {
        self.root_seed <= ROOT_SEED
    }

    pub fn nodes(&self) -> &BTreeMap<u64, NodeInfo> {
        &self.nodes
    }

    /// Ghost slots of the root cell; their values also appear in `nodes`.
    pub fn phantoms(&self) -> &BTreeMap<u64, NodeInfo> {
        &self.phantoms
    }

    pub fn arcs(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    /// Every seed that was expanded, including ones above `max_value`,
    /// with the generation it was expanded at.
    pub fn seeds(&self) -> &BTreeMap<u64, u32> {
        &self.seeds
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, v: u64) -> bool {
        self.nodes.contains_key(&v)
    }

    pub fn contains_arc(&self, from: u64, to: u64) -> bool {
        self.arcs.contains(&Arc::new(from, to))
    }

    pub fn arc_pairs(&self) -> BTreeSet<(u64, u64)> {
        self.arcs.iter().map(|a| (a.from, a.to)).collect()
    }

    /// All of the cell's nodes and arcs are present.
    pub fn contains_cell(&self, cell: &GCell) -> bool {
        cell.nodes().iter().all(|v| self.contains_node(*v))
            && cell.arcs().iter().all(|a| self.arcs.contains(a))
    }

    /// Assembles a network from parts, e.g. after parsing an interchange
    /// document. No consistency checks are made.
    pub fn from_parts(
        root_seed: u64,
        bounds: NetworkBounds,
        nodes: BTreeMap<u64, NodeInfo>,
        phantoms: BTreeMap<u64, NodeInfo>,
        arcs: BTreeSet<Arc>,
        seeds: BTreeMap<u64, u32>,
    ) -> GCellNetwork {
        GCellNetwork {
            root_seed,
            bounds,
            nodes,
            phantoms,
            arcs,
            seeds,
        }
    }
}

/// Values above `max_value` lying on the trajectory of some start `<= max_value`.
struct Envelope {
    max_value: u64,
    above: HashSet<u64>,
}

impl Envelope {
    fn build(max_value: u64) -> Envelope {
        let mut above = HashSet::new();
        for n in 1..=max_value {
            let mut x = n;
            for _ in 0..DEFAULT_ITERATION_CAP {
                x = match step_u64(x) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                // values <= max_value are starts in their own right
                if x <= max_value || !above.insert(x) {
                    break;
                }
            }
        }
        Envelope { max_value, above }
    }

    fn admits(&self, seed: u64) -> bool {
        seed <= self.max_value || self.above.contains(&seed)
    }
}

enum Worklist {
    Generation(BinaryHeap<Reverse<(u32, u64)>>),
    Fifo(VecDeque<(u64, u32)>),
    Lifo(Vec<(u64, u32)>),
}

impl Worklist {
    fn new(order: WorklistOrder) -> Worklist {
        match order {
            WorklistOrder::Generation => Worklist::Generation(BinaryHeap::new()),
            WorklistOrder::Fifo => Worklist::Fifo(VecDeque::new()),
            WorklistOrder::Lifo => Worklist::Lifo(Vec::new()),
        }
    }

    fn push(&mut self, seed: u64, gen: u32) {
        match self {
            Worklist::Generation(h) => h.push(Reverse((gen, seed))),
            Worklist::Fifo(q) => q.push_back((seed, gen)),
            Worklist::Lifo(s) => s.push((seed, gen)),
        }
    }

    fn pop(&mut self) -> Option<(u64, u32)> {
        match self {
            Worklist::Generation(h) => h.pop().map(|Reverse((g, s))| (s, g)),
            Worklist::Fifo(q) => q.pop_front(),
            Worklist::Lifo(s) => s.pop(),
        }
    }
}

struct Builder {
    bounds: NetworkBounds,
    envelope: Envelope,
    work: Worklist,
    nodes: BTreeMap<u64, NodeInfo>,
    phantoms: BTreeMap<u64, NodeInfo>,
    arcs: BTreeSet<Arc>,
    seeds: BTreeMap<u64, u32>,
}

impl Builder {
    fn node(&mut self, v: u64, generation: u32) {
        if v > self.bounds.max_value {
            return;
        }
        let info = self.nodes.entry(v).or_insert(NodeInfo { generation });
        info.generation = info.generation.min(generation);
    }

    fn arc(&mut self, arc: Arc) {
        if arc.from <= self.bounds.max_value && arc.to <= self.bounds.max_value {
            self.arcs.insert(arc);
        }
    }

    fn enqueue(&mut self, seed: u64, gen: u32) {
        if seed <= ROOT_SEED {
            return; // cycle guard
        }
        if self.bounds.max_generation.is_some_and(|m| gen > m) || !self.envelope.admits(seed) {
            return;
        }
        self.work.push(seed, gen);
    }

    fn emit_cell(&mut self, cell: &GCell) {
        let g = cell.generation();
        for v in cell.nodes() {
            self.node(v, g);
        }
        for a in cell.arcs() {
            self.arc(a);
        }
    }

    fn expand(&mut self, c: u64, g: u32) -> Result<(), NetworkError> {
        if c == ROOT_SEED {
            let root = build_gcell(ROOT_SEED, g)?;
            self.emit_cell(&root);
            // the pair only makes sense when both slots fit
            if root.phantom().iter().all(|v| *v <= self.bounds.max_value) {
                for &v in root.phantom() {
                    let info = self.phantoms.entry(v).or_insert(NodeInfo { generation: g });
                    info.generation = info.generation.min(g);
                }
            }
            let [_, _, a4] = root.left();
            self.enqueue(a4, g + 1);
            self.enqueue(root.top().expect("root cell has a top node"), g + 1);
            return Ok(());
        }
        match c % 3 {
            2 => {
                let cell = build_gcell(c, g)?;
                self.emit_cell(&cell);
                let [_, _, a4] = cell.left();
                let [_, _, b4] = cell.right().expect("C = 2 mod 3 has a B column");
                self.enqueue(a4, g + 1);
                self.enqueue(b4 + 1, g + 1);
                match right_abutment(&cell)? {
                    Abutment::AtBase(s) | Abutment::AtDouble(s) => self.enqueue(s, g),
                    Abutment::DeadBranch => self.enqueue(b4, g + 1),
                }
            }
            1 => {
                debug_assert!(odd_predecessor(c).is_none());
                let c2 = c.checked_mul(2).ok_or(GCellError::Overflow(c))?;
                self.node(c, g);
                self.arc(Arc::new(c2, c));
                self.enqueue(c2, g);
            }
            _ => {
                let column = build_gcell(c, g)?;
                self.emit_cell(&column);
                self.enqueue(column.left()[2], g + 1);
            }
        }
        Ok(())
    }
}

pub fn generate_network(
    root_seed: u64,
    max_value: u64,
    max_generation: Option<u32>,
) -> Result<GCellNetwork, NetworkError> {
    generate_network_with(
        root_seed,
        max_value,
        max_generation,
        WorklistOrder::default(),
    )
}

pub fn generate_network_with(
    root_seed: u64,
    max_value: u64,
    max_generation: Option<u32>,
    order: WorklistOrder,
) -> Result<GCellNetwork, NetworkError> {
    if root_seed == 0 {
        return Err(NetworkError::ZeroSeed);
    }
    if max_value > MAX_VALUE_LIMIT {
        return Err(NetworkError::ValueTooLarge(max_value));
    }
    let bounds = NetworkBounds {
        max_value,
        max_generation,
    };
    let mut b = Builder {
        bounds,
        envelope: Envelope::build(max_value),
        work: Worklist::new(order),
        nodes: BTreeMap::new(),
        phantoms: BTreeMap::new(),
        arcs: BTreeSet::new(),
        seeds: BTreeMap::new(),
    };
    // Seed 1 is the B node of the root cell.
    let start = root_seed.max(ROOT_SEED);
    if b.envelope.admits(root_seed) {
        b.work.push(start, 0);
    }
    while let Some((c, g)) = b.work.pop() {
        // Re-expand only when reached at a lower generation than before.
        if b.seeds.get(&c).is_some_and(|&seen| seen <= g) {
            continue;
        }
        b.seeds.insert(c, g);
        b.expand(c, g)?;
    }
    Ok(GCellNetwork {
        root_seed,
        bounds,
        nodes: b.nodes,
        phantoms: b.phantoms,
        arcs: b.arcs,
        seeds: b.seeds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub bound: u64,
    /// In the oracle but not the network.
    pub missing: Vec<(u64, u64)>,
    /// In the network but not the oracle.
    pub extra: Vec<(u64, u64)>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Compares the network's arcs with both ends `<= bound` against the
/// brute-force reverse graph. Meaningful when the network was generated
/// from the root with `max_value >= bound` and no generation limit.
pub fn check_against_oracle(net: &GCellNetwork, bound: u64) -> OracleReport {
    let oracle = oracle_reverse_graph(bound.max(2))
        .map(|g| g.arcs().clone())
        .unwrap_or_default();
    let ours: BTreeSet<(u64, u64)> = net
        .arcs
        .iter()
        .filter(|a| a.from <= bound && a.to <= bound)
        .map(|a| (a.from, a.to))
        .collect();
    OracleReport {
        bound,
        missing: oracle.difference(&ours).copied().collect(),
        extra: ours.difference(&oracle).copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(max_value: u64) -> GCellNetwork {
        generate_network(1, max_value, None).unwrap()
    }

    #[test]
    fn root_cycle_only() {
        let n = net(2);
        assert_eq!(n.nodes().keys().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(
            n.arc_pairs().into_iter().collect::<Vec<_>>(),
            vec![(1, 2), (2, 1)]
        );
        assert!(n.phantoms().is_empty());
    }

    #[test]
    fn small_network_holds_the_first_cells() {
        let n = generate_network(1, 32, Some(2)).unwrap();
        assert!(n.contains_cell(&build_gcell(8, 1).unwrap()));
        assert!(n.contains_cell(&build_gcell(2, 0).unwrap()));
        assert_eq!(n.nodes()[&21].generation, 1);
        assert_eq!(n.phantoms().keys().copied().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn degenerate_bounds() {
        assert!(net(0).is_empty());
        assert_eq!(net(1).nodes().keys().copied().collect::<Vec<_>>(), vec![1]);
        assert!(net(1).arcs().is_empty());
        let n = generate_network(1, 1 << 20, Some(0)).unwrap();
        assert_eq!(
            n.nodes().keys().copied().collect::<Vec<_>>(),
            vec![1, 2, 4, 5, 8]
        );
        assert_eq!(generate_network(0, 10, None), Err(NetworkError::ZeroSeed));
        assert!(matches!(
            generate_network(1, u64::MAX, None),
            Err(NetworkError::ValueTooLarge(_))
        ));
    }

    #[test]
    fn hundred_matches_oracle_including_detached_arcs() {
        let n = net(100);
        let report = check_against_oracle(&n, 100);
        assert!(report.passed(), "{report:?}");
        // 27 -> 41 only reaches the root through values above 100.
        assert!(n.contains_arc(27, 41));
        assert!(!n.contains_node(9232));
    }

    #[test]
    fn oracle_equivalence() {
        for bound in [8, 64, 1024, 10_000] {
            let report = check_against_oracle(&net(bound), bound);
            assert!(report.passed(), "bound {bound}: {report:?}");
        }
    }

    #[test]
    fn corrupted_network_is_caught() {
        let mut n = net(64);
        assert!(n.arcs.remove(&Arc::new(5, 8)));
        let report = check_against_oracle(&n, 64);
        assert!(!report.passed());
        assert_eq!(report.missing, vec![(5, 8)]);
        assert!(report.extra.is_empty());

        let mut n = net(64);
        n.arcs.insert(Arc::new(7, 10));
        assert_eq!(check_against_oracle(&n, 64).extra, vec![(7, 10)]);
    }

    #[test]
    fn arcs_are_map_steps_and_nodes_unique() {
        let n = net(10_000);
        for a in n.arcs() {
            assert_eq!(step_u64(a.from).unwrap(), a.to);
            assert!(n.contains_node(a.from) && n.contains_node(a.to));
        }
        // every value at most once by construction of the map; all of 1..=N present
        assert_eq!(n.nodes().len(), 10_000);
        assert_eq!(n.phantoms().len(), 2);
    }

    #[test]
    fn worklist_order_does_not_matter() {
        for (seed, max, gens) in [
            (1, 2_000, None),
            (1, 5_000, Some(4)),
            (21, 10_000, Some(3)),
            (7, 500, None),
        ] {
            let base = generate_network_with(seed, max, gens, WorklistOrder::Generation).unwrap();
            for order in [WorklistOrder::Fifo, WorklistOrder::Lifo] {
                let other = generate_network_with(seed, max, gens, order).unwrap();
                assert_eq!(other, base, "seed {seed} max {max} gens {gens:?} {order:?}");
            }
        }
    }

    #[test]
    fn only_cycle_is_the_root() {
        let n = net(4_096);
        for a in n.arcs() {
            if a.to > a.from {
                // odd arcs climb; the only one that returns to its own source is 1 -> 2
                let back = Arc::new(a.to, a.from);
                assert!(!n.arcs().contains(&back) || (a.from, a.to) == (1, 2));
            }
        }
        let without_root = generate_network(8, 4_096, None).unwrap();
        assert!(!without_root.contains_arc(1, 2));
    }

    #[test]
    fn dead_branch_region() {
        let n = generate_network(21, 10_000, Some(2)).unwrap();
        for v in [21, 42, 84, 168, 336, 672, 1344] {
            assert!(n.contains_node(v), "{v}");
        }
        assert!(!n.contains_node(2688));
        assert!(n
            .arcs()
            .iter()
            .all(|a| a.kind == crate::gcell::ArcKind::Halving));
    }
}

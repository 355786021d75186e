//! Brute-force form of the 3x+1 tree: every arc `(n, T(n))` with both ends
//! within a bound. This is the ground truth the G-cell generator is checked
//! against.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::collatz::step_u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseGraph {
    bound: u64,
    arcs: BTreeSet<(u64, u64)>,
}

impl ReverseGraph {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Directed `(from, to)` pairs with `to = T(from)`.
    pub fn arcs(&self) -> &BTreeSet<(u64, u64)> {
        &self.arcs
    }

    pub fn contains(&self, from: u64, to: u64) -> bool {
        self.arcs.contains(&(from, to))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle bound must be at least 2, got {0}")]
pub struct BoundTooSmall(pub u64);

pub fn oracle_reverse_graph(bound: u64) -> Result<ReverseGraph, BoundTooSmall> {
    if bound < 2 {
        return Err(BoundTooSmall(bound));
    }
    let arcs = (1..=bound)
        .filter_map(|n| match step_u64(n) {
            Ok(t) if t <= bound => Some((n, t)),
            // an overflowing image is certainly above the bound
            _ => None,
        })
        .collect();
    Ok(ReverseGraph { bound, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use petgraph::algo::tarjan_scc;
    use petgraph::graphmap::DiGraphMap;

    #[test]
    fn bound_eight() {
        let g = oracle_reverse_graph(8).unwrap();
        let expected: BTreeSet<_> = [(1, 2), (2, 1), (3, 5), (4, 2), (5, 8), (6, 3), (8, 4)]
            .into_iter()
            .collect();
        assert_eq!(g.arcs(), &expected);
    }

    #[test]
    fn bound_two_is_the_cycle() {
        let g = oracle_reverse_graph(2).unwrap();
        assert_eq!(
            g.arcs().iter().copied().collect::<Vec<_>>(),
            vec![(1, 2), (2, 1)]
        );
        assert_eq!(oracle_reverse_graph(1), Err(BoundTooSmall(1)));
    }

    #[test]
    fn arcs_of_seven_present() {
        let g = oracle_reverse_graph(26).unwrap();
        assert!(g.contains(17, 26));
        assert!(g.contains(13, 20));
        assert!(g.contains(7, 11));
        assert!(!oracle_reverse_graph(8).unwrap().contains(7, 11));
    }

    #[test]
    fn only_cycle_is_one_two() {
        let g = oracle_reverse_graph(10_000).unwrap();
        let graph: DiGraphMap<u64, ()> = DiGraphMap::from_edges(g.arcs().iter().copied());
        let big: Vec<Vec<u64>> = tarjan_scc(&graph)
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        assert_eq!(big, vec![vec![1, 2]]);
    }
}

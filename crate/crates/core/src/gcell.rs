//! The G-cell: a seven-node, six-arc generator of the 3x+1 tree.
//!
//! ```text
//!   4A ---- E    4B          E = 4B + 1, arc E -> 4A
//!   |             |
//!   2A           2B
//!   |             |
//!   A  --------  B           3B = 2A - 1, arc B -> A
//! ```
//!
//! Arcs point down (halving) or left (odd step). The B column exists only
//! when `2A - 1` is divisible by 3.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seed of the degenerate root cell (A = 2, B = 1).
pub const ROOT_SEED: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    /// `2v -> v`, drawn vertically.
    Halving,
    /// `p -> (3p + 1) / 2` for odd `p`, drawn horizontally.
    Odd,
}

impl ArcKind {
    pub fn of(from: u64) -> ArcKind {
        if from % 2 == 0 {
            ArcKind::Halving
        } else {
            ArcKind::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: u64,
    pub to: u64,
    pub kind: ArcKind,
}

impl Arc {
    pub fn new(from: u64, to: u64) -> Arc {
        Arc {
            from,
            to,
            kind: ArcKind::of(from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GCellError {
    #[error("G-cell seed must be at least 2, got {0}")]
    SeedTooSmall(u64),
    #[error("G-cell seeded at {0} does not fit in 64 bits")]
    Overflow(u64),
    #[error("G-cell seeded at {0} has no B column")]
    NoRightColumn(u64),
}

/// `(2m - 1) / 3` when it is an integer: the odd value whose `T` image is `m`.
pub fn odd_predecessor(m: u64) -> Option<u64> {
    // 2m - 1 ≡ 0 (mod 3)  <=>  m ≡ 2 (mod 3); avoids computing 2m.
    (m % 3 == 2).then(|| (m / 3) * 2 + 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GCell {
    seed: u64,
    left: [u64; 3],
    right: Option<[u64; 3]>,
    top: Option<u64>,
    generation: u32,
    phantom: Vec<u64>,
}

impl GCell {
    /// The A node.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `[A, 2A, 4A]`.
    pub fn left(&self) -> [u64; 3] {
        self.left
    }

    /// `[B, 2B, 4B]`, present iff `(2A - 1) mod 3 = 0`.
    pub fn right(&self) -> Option<[u64; 3]> {
        self.right
    }

    /// The seventh node, `4B + 1`.
    pub fn top(&self) -> Option<u64> {
        self.top
    }

    pub fn b(&self) -> Option<u64> {
        self.right.map(|r| r[0])
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn is_root(&self) -> bool {
        self.seed == ROOT_SEED
    }

    /// Node slots that only duplicate trunk values (root cell: 2B = 2, 4B = 4).
    pub fn phantom(&self) -> &[u64] {
        &self.phantom
    }

    /// Real (non-phantom) node values, without duplicates.
    pub fn nodes(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.left.to_vec();
        match self.right {
            Some(_) if self.is_root() => out.push(1),
            Some(r) => out.extend(r),
            None => {}
        }
        out.extend(self.top);
        out
    }

    /// The cell's arcs. For the root cell the phantom column's arcs coincide
    /// with trunk arcs, so only the distinct ones are returned and the
    /// `1 -> 2` cycle arc is included.
    pub fn arcs(&self) -> Vec<Arc> {
        let [a, a2, a4] = self.left;
        let mut out = vec![Arc::new(a2, a), Arc::new(a4, a2)];
        if let (Some([b, b2, b4]), Some(e)) = (self.right, self.top) {
            out.push(Arc::new(b, a));
            out.push(Arc::new(b2, b));
            if !self.is_root() {
                out.push(Arc::new(b4, b2));
            }
            out.push(Arc::new(e, a4));
        }
        out
    }
}

/// Builds the cell whose lower-left node is `a`.
///
/// `a = 2` yields the root cell: B = 1, the `1 -> 2` arc closes the only
/// cycle, and the slots above B (2 and 4) are phantoms.
pub fn build_gcell(a: u64, generation: u32) -> Result<GCell, GCellError> {
    if a < 2 {
        return Err(GCellError::SeedTooSmall(a));
    }
    let a4 = a.checked_mul(4).ok_or(GCellError::Overflow(a))?;
    let left = [a, 2 * a, a4];
    let right = odd_predecessor(a).map(|b| [b, 2 * b, 4 * b]);
    // 4B + 1 = (8A - 1) / 3 < 4A, so no overflow once 4A fits.
    let top = right.map(|[_, _, b4]| b4 + 1);
    let phantom = if a == ROOT_SEED {
        vec![2, 4]
    } else {
        Vec::new()
    };
    Ok(GCell {
        seed: a,
        left,
        right,
        top,
        generation,
        phantom,
    })
}

/// How the next same-generation cell attaches to a cell's B column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "neighbor_seed", rename_all = "snake_case")]
pub enum Abutment {
    /// `B ≡ 2 (mod 3)`: the neighbor is seeded at B and shares nodes B..4B.
    AtBase(u64),
    /// `B ≡ 1 (mod 3)`: the neighbor is seeded at 2B and shares 2B..8B.
    AtDouble(u64),
    /// `B = 3(2k + 1)`: every node above B is a multiple of 3; no branching.
    DeadBranch,
}

impl Abutment {
    pub fn neighbor_seed(self) -> Option<u64> {
        match self {
            Abutment::AtBase(s) | Abutment::AtDouble(s) => Some(s),
            Abutment::DeadBranch => None,
        }
    }
}

pub fn right_abutment(cell: &GCell) -> Result<Abutment, GCellError> {
    let b = cell.b().ok_or(GCellError::NoRightColumn(cell.seed))?;
    // B is odd, so B mod 3 = 0 means B is an odd multiple of 3.
    Ok(match b % 3 {
        2 => Abutment::AtBase(b),
        1 => Abutment::AtDouble(2 * b),
        _ => Abutment::DeadBranch,
    })
}

/// Seed of the cell to the left, in which this cell's A plays the B role.
/// Only odd seeds have one; even seeds connect downward.
pub fn left_abutment_seed(cell: &GCell) -> Option<u64> {
    let a = cell.seed;
    // (3a + 1) / 2 for odd a; 4a fits, so 3a does too.
    (a % 2 == 1).then(|| 3 * a / 2 + 1)
}

//! Triangular-grid geometry: axial coordinates, the six clockwise edge
//! directions, direction arithmetic, and the discrete turn value used by
//! boundary identification.
//!
//! Coordinates are axial with the y-axis at 60 degrees to the x-axis, so
//! every node has exactly six neighbors and all turn math is exact integer
//! arithmetic. This embedding exists only inside the simulator and the
//! oracle; agents never observe global coordinates.

use thiserror::Error;

/// A node of the infinite triangular grid, in axial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeCoord {
    pub x: i32,
    pub y: i32,
}

impl NodeCoord {
    pub const fn new(x: i32, y: i32) -> Self {
        NodeCoord { x, y }
    }

    /// The six adjacent nodes in clockwise direction order.
    pub fn neighbors(self) -> [NodeCoord; 6] {
        let mut out = [self; 6];
        for (i, v) in DIRECTION_VECTORS.iter().enumerate() {
            out[i] = NodeCoord::new(self.x + v.0, self.y + v.1);
        }
        out
    }

    pub fn step(self, dir: Direction) -> NodeCoord {
        let (dx, dy) = DIRECTION_VECTORS[dir.index() as usize];
        NodeCoord::new(self.x + dx, self.y + dy)
    }

    /// Hex distance to the origin in this axial basis.
    pub fn norm(self) -> u32 {
        let (x, y) = (self.x, self.y);
        if (x >= 0) == (y >= 0) {
            x.unsigned_abs() + y.unsigned_abs()
        } else {
            x.unsigned_abs().max(y.unsigned_abs())
        }
    }

    pub fn distance(self, other: NodeCoord) -> u32 {
        NodeCoord::new(self.x - other.x, self.y - other.y).norm()
    }
}

impl std::fmt::Display for NodeCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Direction vectors indexed clockwise: with the y-axis at 60 degrees to the
/// x-axis, successive indices rotate 60 degrees clockwise.
pub const DIRECTION_VECTORS: [(i32, i32); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// One of the six edge directions, indexed clockwise in `[0, 5]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction(u8);

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
    ];

    /// Wraps an arbitrary signed index into `[0, 5]`.
    pub fn from_index(i: i32) -> Direction {
        Direction(i.rem_euclid(6) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn opposite(self) -> Direction {
        Direction((self.0 + 3) % 6)
    }

    /// Rotates clockwise by `steps` sixths of a full turn.
    pub fn rotated(self, steps: i32) -> Direction {
        Direction::from_index(self.0 as i32 + steps)
    }

    pub fn vector(self) -> (i32, i32) {
        DIRECTION_VECTORS[self.0 as usize]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(NodeCoord, NodeCoord),
    #[error("empty-sequence length {0} outside [1, 5]")]
    TurnLengthOutOfRange(u8),
}

/// Direction `d` with `a.step(d) == b`, or `NotAdjacent`.
pub fn direction_between(a: NodeCoord, b: NodeCoord) -> Result<Direction, GridError> {
    let delta = (b.x - a.x, b.y - a.y);
    DIRECTION_VECTORS
        .iter()
        .position(|v| *v == delta)
        .map(|i| Direction(i as u8))
        .ok_or(GridError::NotAdjacent(a, b))
}

/// Turn taken by a boundary traversal at an agent whose empty sequence has
/// length `empty_seq_len`, in units of 60 degrees.
///
/// With the predecessor at clockwise position 0 and the successor at
/// position `k + 1` around the particle, the outgoing direction differs from
/// the incoming one by `k - 2` (mod 6); the geometric turn is the
/// representative in `[-1, 3]`. A straight boundary segment (`k = 2`) turns
/// by 0, a line endpoint (`k = 5`) reverses by 180 degrees.
pub fn turn_value(empty_seq_len: u8) -> Result<i8, GridError> {
    if !(1..=5).contains(&empty_seq_len) {
        return Err(GridError::TurnLengthOutOfRange(empty_seq_len));
    }
    Ok(empty_seq_len as i8 - 2)
}

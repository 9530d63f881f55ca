//! Row-partitioned evaluation with a parallel and a sequential backend.

#[cfg(feature = "rayon")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving order.
///
/// With the `rayon` feature and `parallel` set, rows are distributed over the
/// global thread pool; otherwise they run in order on the calling thread.
/// Both paths return identical vectors for pure `f`.
pub fn map_rows<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "rayon")]
    if parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// A search candidate at angular position `pos` (θ₁, θ₂ and an optional
/// third coordinate). Ties in value go to the lexicographically smallest
/// position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub value: f64,
    pub pos: [f64; 3],
}

impl Cell {
    pub fn new(value: f64, t1: f64, t2: f64) -> Self {
        Self { value, pos: [t1, t2, 0.0] }
    }

    #[inline]
    fn pos_before(&self, other: &Cell) -> bool {
        for (a, b) in self.pos.iter().zip(&other.pos) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
        false
    }

    /// Whether `self` should replace `other` when maximizing.
    #[inline]
    pub fn beats_max(&self, other: &Cell) -> bool {
        self.value > other.value || (self.value == other.value && self.pos_before(other))
    }

    #[inline]
    pub fn beats_min(&self, other: &Cell) -> bool {
        self.value < other.value || (self.value == other.value && self.pos_before(other))
    }

    pub fn beats(&self, other: &Cell, maximize: bool) -> bool {
        if maximize {
            self.beats_max(other)
        } else {
            self.beats_min(other)
        }
    }
}

/// The `count` best row winners, best first. The reduction depends only on
/// the values and the position tie-break, so row order does not matter.
pub fn top_cells(mut rows: Vec<Cell>, count: usize, maximize: bool) -> Vec<Cell> {
    rows.sort_by(|a, b| {
        if a.beats(b, maximize) {
            std::cmp::Ordering::Less
        } else if b.beats(a, maximize) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    rows.truncate(count);
    rows
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `{-1, 1}^n`, stored as a bit mask: bit `i` set means
/// coordinate `i` is `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    n: usize,
    words: Vec<u64>,
}

impl Vertex {
    /// The all-minus-ones vertex.
    pub fn new(n: usize) -> Self {
        Vertex { n, words: vec![0; n.div_ceil(64)] }
    }

    /// Builds a vertex from the low `n` bits of `mask` (requires `n <= 64`).
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidArgument(format!("mask vertex needs n <= 64, got {n}")));
        }
        let mut v = Vertex::new(n);
        if n > 0 {
            let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            if mask & !keep != 0 {
                return Err(Error::InvalidArgument(format!("mask {mask:#x} has bits above {n}")));
            }
            v.words[0] = mask;
        }
        Ok(v)
    }

    /// Builds a vertex from `±1` entries.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut v = Vertex::new(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => v.set(i, true),
                -1 => {}
                _ => return Err(Error::InvalidArgument(format!("sign {s} at {i} is not ±1"))),
            }
        }
        Ok(v)
    }

    pub fn from_bools(plus: impl IntoIterator<Item = bool>) -> Self {
        let plus: Vec<bool> = plus.into_iter().collect();
        let mut v = Vertex::new(plus.len());
        for (i, p) in plus.into_iter().enumerate() {
            v.set(i, p);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Low 64 bits of the mask.
    pub fn mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn is_plus(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Coordinate `i` as `±1`.
    #[inline]
    pub fn sign(&self, i: usize) -> i8 {
        if self.is_plus(i) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, plus: bool) {
        let bit = 1u64 << (i % 64);
        if plus {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    /// Copy with coordinate `i` negated.
    pub fn flipped(&self, i: usize) -> Self {
        let mut v = self.clone();
        v.words[i / 64] ^= 1u64 << (i % 64);
        v
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.sign(i)).collect()
    }

    /// Number of `+1` coordinates.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

/// An edge of the cube: the segment from `base` along `axis` to the vertex
/// with that coordinate negated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    base: Vertex,
    axis: usize,
}

impl Edge {
    pub fn new(base: Vertex, axis: usize) -> Result<Self> {
        if axis >= base.dim() {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", base.dim())));
        }
        Ok(Edge { base, axis })
    }

    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `(u, u')` with `u' = u ± 2 e_axis`.
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.base.clone(), self.base.flipped(self.axis))
    }

    /// Representation with the `axis` coordinate of the base equal to `-1`.
    pub fn canonical(&self) -> Edge {
        if self.base.is_plus(self.axis) {
            Edge { base: self.base.flipped(self.axis), axis: self.axis }
        } else {
            self.clone()
        }
    }
}

/// Serialized edge: base signs and 0-based axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub base: Vec<i8>,
    pub axis: usize,
}

impl From<&Edge> for EdgeRecord {
    fn from(e: &Edge) -> Self {
        EdgeRecord { base: e.base.signs(), axis: e.axis }
    }
}

/// Endpoints of `e` (free-function form).
pub fn edge_endpoints(e: &Edge) -> (Vertex, Vertex) {
    e.endpoints()
}

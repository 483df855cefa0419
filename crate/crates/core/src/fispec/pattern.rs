use smallvec::SmallVec;

/// Vertex label tuple, in canonical form once stored in a graph.
pub type Tuple = SmallVec<[u16; 8]>;

/// Slot identifications between a left and a right tuple.
pub type Matching = SmallVec<[(u8, u8); 8]>;

/// Orbit of ordered vertex pairs: for which slots `(i, j)` the left label
/// `i` equals the right label `j`. All other labels are pairwise distinct.
/// Stored canonically, so equal patterns mean equal orbits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PairPattern {
    pub left: usize,
    pub right: usize,
    pub matches: Matching,
}

/// A pattern whose right vertex is the roof of a roofed chain.
pub type StableOrbitId = PairPattern;

impl PairPattern {
    /// Number of distinct labels used by one representative pair.
    pub fn symbols(&self, left_arity: usize, right_arity: usize) -> usize {
        left_arity + right_arity - self.matches.len()
    }
}

/// A vertex of a concrete graph: orbit index and canonical label tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex {
    pub orbit: usize,
    pub labels: Tuple,
}

impl Vertex {
    pub fn new(orbit: usize, labels: &[u16]) -> Self {
        Vertex {
            orbit,
            labels: labels.iter().copied().collect(),
        }
    }
}

/// Matching between two concrete tuples.
pub fn raw_matching(a: &[u16], b: &[u16]) -> Matching {
    let mut m = Matching::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if x == y {
                m.push((i as u8, j as u8));
            }
        }
    }
    m
}

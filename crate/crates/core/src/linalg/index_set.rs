use crate::error::{GpcgError, Result};

/// Strictly increasing list of indices into `0..dim`.
///
/// Used for active, free and binding sets. The free set of an iterate also plays the role of
/// the column selection that maps reduced vectors back into the full space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: Vec<usize>,
    dim: usize,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        for (p, w) in indices.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(GpcgError::UnsortedIndexSet { position: p + 1 });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(GpcgError::IndexOutOfRange { index: last, dim });
            }
        }
        Ok(Self { indices, dim })
    }

    pub fn full(dim: usize) -> Self {
        Self {
            indices: (0..dim).collect(),
            dim,
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            indices: Vec::new(),
            dim,
        }
    }

    /// Contiguous range `start..end`.
    pub fn range(start: usize, end: usize, dim: usize) -> Result<Self> {
        Self::new((start..end).collect(), dim)
    }

    /// Indices whose mask entry is `true`.
    pub fn from_mask(mask: &[bool]) -> Self {
        Self {
            indices: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
            dim: mask.len(),
        }
    }

    pub fn complement(&self) -> Self {
        let mut mask = vec![true; self.dim];
        for &i in &self.indices {
            mask[i] = false;
        }
        Self::from_mask(&mask)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Size of the universe `0..dim` the indices live in.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

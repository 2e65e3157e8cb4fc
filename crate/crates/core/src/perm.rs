use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{0, ..., L-1}` stored as its forward table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    /// Validates that `forward` hits every value in `0..len` exactly once.
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut seen = vec![false; n];
        for &y in &forward {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidPermutation(n));
            }
        }
        Ok(Self { forward })
    }

    pub(crate) fn from_forward_unchecked(forward: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(forward.clone()).is_ok());
        Self { forward }
    }

    pub fn identity(len: usize) -> Self {
        Self {
            forward: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.forward[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.forward.len()];
        for (x, &y) in self.forward.iter().enumerate() {
            inv[y] = x;
        }
        Self { forward: inv }
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Self {
            forward: other.forward.iter().map(|&x| self.forward[x]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &y)| i == y)
    }
}

/// Inverse of a permutation.
pub fn inverse_permutation(perm: &Permutation) -> Permutation {
    perm.inverse()
}

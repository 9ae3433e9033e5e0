//! Fixed-N occupation-number basis.
//!
//! Vectors are enumerated in descending lexicographic order: `|N,0,…,0⟩`
//! first and `|0,…,0,N⟩` last. For two modes the index `i` therefore maps to
//! `|N−i, i⟩`. Amplitude files and all index arithmetic rely on this order.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::binomial;

/// Default upper bound on the number of basis states.
pub const DEFAULT_BASIS_CAP: usize = 2_000_000;

/// Atoms per site for one basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::invalid("counts", "at least two modes are required"));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Number of ways to place `particles` bosons in `modes` modes.
pub fn basis_dimension(particles: u32, modes: usize) -> Option<u128> {
    if modes == 0 {
        return Some(u128::from(particles == 0));
    }
    binomial(u64::from(particles) + modes as u64 - 1, modes as u64 - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    particles: u32,
    modes: usize,
    // row-major, `modes` entries per basis vector
    occupations: Vec<u32>,
}

impl FockBasis {
    pub fn new(particles: u32, modes: usize) -> Result<Self> {
        Self::with_cap(particles, modes, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(particles: u32, modes: usize, cap: usize) -> Result<Self> {
        if modes < 2 {
            return Err(Error::invalid("M", "at least two modes are required"));
        }
        let size = basis_dimension(particles, modes).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::BasisTooLarge { size, cap });
        }
        let size = size as usize;
        let mut occupations = Vec::with_capacity(size * modes);
        let mut current = vec![0u32; modes];
        current[0] = particles;
        loop {
            occupations.extend_from_slice(&current);
            if !advance(&mut current) {
                break;
            }
        }
        debug_assert_eq!(occupations.len(), size * modes);
        Ok(Self {
            particles,
            modes,
            occupations,
        })
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.occupations.len() / self.modes
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    /// Occupations of basis vector `index`.
    pub fn get(&self, index: usize) -> &[u32] {
        &self.occupations[index * self.modes..(index + 1) * self.modes]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.occupations.chunks_exact(self.modes)
    }

    /// Position of `counts` in the enumeration order, by combinatorial ranking.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        if counts.len() != self.modes || counts.iter().sum::<u32>() != self.particles {
            return None;
        }
        let mut rank: u128 = 0;
        let mut remaining = u64::from(self.particles);
        for (pos, &n) in counts[..self.modes - 1].iter().enumerate() {
            let n = u64::from(n);
            let tail_modes = (self.modes - pos - 1) as u64;
            // vectors sharing the prefix but with a larger entry at `pos`
            if remaining > n {
                rank += binomial(remaining - n - 1 + tail_modes, tail_modes)?;
            }
            remaining -= n;
        }
        Some(rank as usize)
    }
}

/// Step to the next vector in descending lexicographic order.
fn advance(v: &mut [u32]) -> bool {
    let m = v.len();
    let Some(i) = (0..m - 1).rev().find(|&i| v[i] > 0) else {
        return false;
    };
    let tail: u32 = v[i + 1..].iter().sum();
    v[i] -= 1;
    v[i + 1] = tail + 1;
    for x in &mut v[i + 2..] {
        *x = 0;
    }
    true
}

use serde::{Deserialize, Serialize};

use crate::model::ln_factorial;

/// Per-particle Hermite degrees of a basis element.
///
/// The canonical representative of an orbit under permutations of the
/// thermostated block `0..m` and of the free block `m..N` has each block
/// sorted ascending, which is the lexicographically smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HermiteBasisIndex(pub Vec<u32>);

impl HermiteBasisIndex {
    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn canonical(mut self, m: usize) -> Self {
        self.0[..m].sort_unstable();
        self.0[m..].sort_unstable();
        self
    }

    pub fn is_canonical(&self, m: usize) -> bool {
        self.0[..m].windows(2).all(|w| w[0] <= w[1]) && self.0[m..].windows(2).all(|w| w[0] <= w[1])
    }

    /// Number of distinct index vectors in the orbit.
    pub fn orbit_size(&self, m: usize) -> f64 {
        (ln_multinomial(&self.0[..m]) + ln_multinomial(&self.0[m..])).exp().round()
    }
}

/// ln of k!/∏(multiplicity!) for a sorted block.
fn ln_multinomial(sorted: &[u32]) -> f64 {
    let mut ln = ln_factorial(sorted.len());
    let mut run = 1;
    for k in 1..=sorted.len() {
        if k < sorted.len() && sorted[k] == sorted[k - 1] {
            run += 1;
        } else {
            ln -= ln_factorial(run);
            run = 1;
        }
    }
    ln
}

/// Canonical representatives of total degree exactly `degree`, in lexicographic order.
pub fn enumerate_sector(n: usize, m: usize, degree: u32) -> Vec<HermiteBasisIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut current, 0, m, degree, 0, &mut out);
    out.sort();
    out
}

/// Fills slot `pos` onward with non-decreasing values inside each block.
fn fill(cur: &mut [u32], pos: usize, m: usize, remaining: u32, floor: u32, out: &mut Vec<HermiteBasisIndex>) {
    let n = cur.len();
    if pos == n {
        if remaining == 0 {
            out.push(HermiteBasisIndex(cur.to_vec()));
        }
        return;
    }
    let lo = if pos == m { 0 } else { floor };
    // Remaining slots in this block must each take at least the current value.
    let block_end = if pos < m { m } else { n };
    let slots_left = (block_end - pos) as u32;
    let mut d = lo;
    while d * slots_left <= remaining {
        cur[pos] = d;
        fill(cur, pos + 1, m, remaining - d, d, out);
        d += 1;
    }
}

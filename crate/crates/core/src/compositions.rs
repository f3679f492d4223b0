//! Weighted compositions `Ω(k, n) = {(x₁,…,x_k) ∈ ℕ₀^k : Σ j·x_j = n}`.
//!
//! Enumeration is lazy. Tuples are produced with `x_k` varying slowest and `x₂` fastest,
//! `x₁` being fixed by the remaining weight, so `Ω(2, 2)` yields `(2,0)` then `(0,1)`.

use serde::{Deserialize, Serialize};

/// One element `(x₁,…,x_k)` of `Ω(k, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition {
    pub counts: Vec<usize>,
}

impl Composition {
    /// `Σ j·x_j`.
    pub fn weight(&self) -> usize {
        self.counts.iter().enumerate().map(|(j, &x)| (j + 1) * x).sum()
    }

    /// `Σ x_j`, the number of jumps.
    pub fn parts(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Lazy iterator over `Ω(k, n)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    n: usize,
    // counts of sizes 2..=k; x₁ is implied
    upper: Vec<usize>,
    used: usize,
    done: bool,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        if self.done {
            return None;
        }
        let mut counts = Vec::with_capacity(self.upper.len() + 1);
        counts.push(self.n - self.used);
        counts.extend_from_slice(&self.upper);
        // advance the odometer
        let mut pos = 0;
        loop {
            if pos == self.upper.len() {
                self.done = true;
                break;
            }
            let size = pos + 2;
            if self.used + size <= self.n {
                self.upper[pos] += 1;
                self.used += size;
                break;
            }
            self.used -= size * self.upper[pos];
            self.upper[pos] = 0;
            pos += 1;
        }
        Some(Composition { counts })
    }
}

/// All `(x₁,…,x_k)` with `Σ j·x_j = n`, in the canonical order. `k` must be at least 1.
pub fn enumerate_compositions(k: usize, n: usize) -> Compositions {
    assert!(k >= 1, "compositions need k ≥ 1");
    Compositions { n, upper: vec![0; k - 1], used: 0, done: false }
}

/// One composition per component, indexing a term of a joint pmf series.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointCompositionIndex {
    pub per_component: Vec<Composition>,
}

impl JointCompositionIndex {
    /// Total number of jumps `Σ_i Σ_j x_ij`.
    pub fn parts(&self) -> usize {
        self.per_component.iter().map(Composition::parts).sum()
    }
}

/// Lazy Cartesian product of `Ω(k_i, n_i)`, last component varying fastest.
#[derive(Debug, Clone)]
pub struct JointCompositions {
    sets: Vec<Vec<Composition>>,
    cursor: Vec<usize>,
    done: bool,
}

impl Iterator for JointCompositions {
    type Item = JointCompositionIndex;

    fn next(&mut self) -> Option<JointCompositionIndex> {
        if self.done {
            return None;
        }
        let item = JointCompositionIndex {
            per_component: self.cursor.iter().zip(&self.sets).map(|(&c, s)| s[c].clone()).collect(),
        };
        let mut pos = self.sets.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.cursor[pos] += 1;
            if self.cursor[pos] < self.sets[pos].len() {
                break;
            }
            self.cursor[pos] = 0;
        }
        Some(item)
    }
}

/// The product `Ω(k₁,n₁) × … × Ω(k_q,n_q)`. Panics when the lengths differ.
pub fn joint_compositions(ks: &[usize], ns: &[usize]) -> JointCompositions {
    assert_eq!(ks.len(), ns.len(), "ks and ns must have equal length");
    let sets: Vec<Vec<Composition>> =
        ks.iter().zip(ns).map(|(&k, &n)| enumerate_compositions(k, n).collect()).collect();
    let cursor = vec![0; sets.len()];
    JointCompositions { sets, cursor, done: ks.is_empty() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(k: usize, n: usize) -> Vec<Vec<usize>> {
        enumerate_compositions(k, n).map(|c| c.counts).collect()
    }

    #[test]
    fn small_sets() {
        assert_eq!(list(2, 2), vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(list(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(list(1, 5), vec![vec![5]]);
        assert_eq!(list(2, 3), vec![vec![3, 0], vec![1, 1]]);
    }

    #[test]
    fn joint_product() {
        let v: Vec<_> = joint_compositions(&[1, 2], &[1, 2])
            .map(|j| j.per_component.into_iter().map(|c| c.counts).collect::<Vec<_>>())
            .collect();
        assert_eq!(v, vec![vec![vec![1], vec![2, 0]], vec![vec![1], vec![0, 1]]]);
        assert_eq!(joint_compositions(&[1, 1], &[0, 0]).count(), 1);
    }
}

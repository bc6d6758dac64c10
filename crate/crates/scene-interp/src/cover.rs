//! Exact cover over a dense universe `{0, .., n-1}`.
//!
//! A solution is a set of rows that are pairwise disjoint and whose
//! union is the whole universe. [`solve_all`] enumerates every solution
//! with Knuth's Algorithm X on a plain row-set representation: the
//! instances here are small (one row per scene, one column per image),
//! so the dancing-links machinery would buy nothing.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("universe must be non-empty")]
    EmptyUniverse,
    #[error("row {index} is empty")]
    EmptyRow { index: usize },
    #[error("row {index} contains element {element} outside the universe of size {universe}")]
    ElementOutOfRange {
        index: usize,
        element: usize,
        universe: usize,
    },
    #[error("brute-force oracle limited to 20 rows, instance has {0}")]
    OracleTooLarge(usize),
}

/// One candidate row: the universe elements it covers, tagged with an
/// opaque key that names the row in solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverRow<K> {
    pub key: K,
    pub elements: BTreeSet<usize>,
}

impl<K> CoverRow<K> {
    pub fn new(key: K, elements: impl IntoIterator<Item = usize>) -> Self {
        CoverRow {
            key,
            elements: elements.into_iter().collect(),
        }
    }
}

/// An exact-cover instance over `{0, .., universe-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverInstance<K> {
    universe: usize,
    rows: Vec<CoverRow<K>>,
}

/// A solution, canonicalized: row keys in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoverSolution<K> {
    pub keys: Vec<K>,
}

impl<K: Clone + Ord> CoverInstance<K> {
    pub fn new(universe: usize, rows: Vec<CoverRow<K>>) -> Result<Self, CoverError> {
        if universe == 0 {
            return Err(CoverError::EmptyUniverse);
        }
        for (index, row) in rows.iter().enumerate() {
            if row.elements.is_empty() {
                return Err(CoverError::EmptyRow { index });
            }
            if let Some(&element) = row.elements.iter().find(|&&e| e >= universe) {
                return Err(CoverError::ElementOutOfRange {
                    index,
                    element,
                    universe,
                });
            }
        }
        Ok(CoverInstance { universe, rows })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn rows(&self) -> &[CoverRow<K>] {
        &self.rows
    }
}

/// Enumerate every exact cover.
///
/// Search order: pick the still-uncovered column with the fewest active
/// rows (lowest index on ties); a column no active row covers prunes
/// the branch; try the covering rows in ascending row order; succeed
/// when no column remains. Solutions are then canonicalized: keys
/// sorted within a solution, solutions sorted lexicographically.
pub fn solve_all<K: Clone + Ord>(instance: &CoverInstance<K>) -> Vec<CoverSolution<K>> {
    let n = instance.universe;
    let rows = &instance.rows;
    let mut covered = vec![false; n];
    let mut active = vec![true; rows.len()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut solutions: Vec<Vec<usize>> = Vec::new();

    fn search<K>(
        rows: &[CoverRow<K>],
        covered: &mut Vec<bool>,
        active: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        solutions: &mut Vec<Vec<usize>>,
    ) {
        // column with the fewest active covering rows
        let mut best: Option<(usize, usize)> = None;
        for (col, _) in covered.iter().enumerate().filter(|(_, &done)| !done) {
            let count = rows
                .iter()
                .enumerate()
                .filter(|(i, r)| active[*i] && r.elements.contains(&col))
                .count();
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((col, count));
            }
        }
        let (col, count) = match best {
            None => {
                solutions.push(chosen.clone());
                return;
            }
            Some(b) => b,
        };
        if count == 0 {
            return;
        }
        let candidates: Vec<usize> = (0..rows.len())
            .filter(|&i| active[i] && rows[i].elements.contains(&col))
            .collect();
        for row_idx in candidates {
            let mut disabled: Vec<usize> = Vec::new();
            for e in &rows[row_idx].elements {
                covered[*e] = true;
            }
            for (i, r) in rows.iter().enumerate() {
                if active[i] && !r.elements.is_disjoint(&rows[row_idx].elements) {
                    active[i] = false;
                    disabled.push(i);
                }
            }
            chosen.push(row_idx);
            search(rows, covered, active, chosen, solutions);
            chosen.pop();
            for e in &rows[row_idx].elements {
                covered[*e] = false;
            }
            for i in disabled {
                active[i] = true;
            }
        }
    }

    search(rows, &mut covered, &mut active, &mut chosen, &mut solutions);

    let mut out: Vec<CoverSolution<K>> = solutions
        .into_iter()
        .map(|idxs| {
            let mut keys: Vec<K> = idxs.into_iter().map(|i| rows[i].key.clone()).collect();
            keys.sort();
            CoverSolution { keys }
        })
        .collect();
    out.sort();
    debug_assert!(out.iter().all(|s| solution_is_exact(instance, s)));
    out
}

/// Check both exact-cover conditions for a solution given as row keys.
pub fn solution_is_exact<K: Clone + Ord>(
    instance: &CoverInstance<K>,
    solution: &CoverSolution<K>,
) -> bool {
    let mut hit = vec![0usize; instance.universe];
    for key in &solution.keys {
        let row = match instance.rows.iter().find(|r| &r.key == key) {
            Some(r) => r,
            None => return false,
        };
        for &e in &row.elements {
            hit[e] += 1;
        }
    }
    hit.iter().all(|&c| c == 1)
}

/// Independent reference: test all `2^rows` subsets. Only for small
/// instances; refuses more than 20 rows.
pub fn brute_force_oracle<K: Clone + Ord>(
    instance: &CoverInstance<K>,
) -> Result<Vec<CoverSolution<K>>, CoverError> {
    let m = instance.rows.len();
    if m > 20 {
        return Err(CoverError::OracleTooLarge(m));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let mut hit = vec![0usize; instance.universe];
        for (i, row) in instance.rows.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for &e in &row.elements {
                    hit[e] += 1;
                }
            }
        }
        if hit.iter().all(|&c| c == 1) {
            let mut keys: Vec<K> = instance
                .rows
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, r)| r.key.clone())
                .collect();
            keys.sort();
            out.push(CoverSolution { keys });
        }
    }
    out.sort();
    Ok(out)
}

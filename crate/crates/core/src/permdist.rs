//! Distances between rankings, viewed as permutations.
//!
//! A ranking lists items best-first. The Cayley distance counts the fewest
//! swaps turning one ranking into the other; the weighted variant charges a
//! swap of positions `i < j` the weight `w(i)`, so disturbing the top of the
//! ranking costs more when `w` decreases.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::PermError;
use crate::network::EdgeId;
use crate::scores::EdgeScores;

/// Largest `n` accepted by the exact weighted search (`8! = 40320` states).
pub const MAX_EXACT_N: usize = 8;

/// One-line notation over `0..n`; entry `i` is the item at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(items: Vec<usize>) -> Result<Self, PermError> {
        let n = items.len();
        let mut seen = vec![false; n];
        for &x in &items {
            if x >= n || seen[x] {
                return Err(PermError::NotPermutation(format!("{items:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation(items))
    }

    /// From values `1..=n`.
    pub fn from_one_based(items: &[usize]) -> Result<Self, PermError> {
        if items.contains(&0) {
            return Err(PermError::NotPermutation(format!("{items:?}")));
        }
        Self::new(items.iter().map(|&x| x - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut cycles = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
            }
        }
        cycles
    }

    pub fn swap_positions(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }
}

/// Position weights `w(1) >= w(2) >= ... >= w(n) > 0`, stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction(Vec<f64>);

impl WeightFunction {
    pub fn new(weights: Vec<f64>) -> Result<Self, PermError> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(PermError::BadWeights(format!("{w} is not a positive real")));
        }
        if let Some(i) = weights.windows(2).position(|p| p[1] > p[0]) {
            return Err(PermError::BadWeights(format!(
                "w({}) = {} exceeds w({}) = {}",
                i + 2,
                weights[i + 1],
                i + 1,
                weights[i]
            )));
        }
        Ok(WeightFunction(weights))
    }

    pub fn uniform(n: usize) -> Self {
        WeightFunction(vec![1.0; n])
    }

    /// `w(i) = 1 / i`.
    pub fn harmonic(n: usize) -> Self {
        WeightFunction((1..=n).map(|i| 1.0 / i as f64).collect())
    }

    /// One decimal per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, PermError> {
        let weights = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.parse::<f64>()
                    .map_err(|_| PermError::BadWeights(format!("not a number: {l:?}")))
            })
            .collect::<Result<_, _>>()?;
        Self::new(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weight of 0-based position `i`.
    pub fn at(&self, i: usize) -> f64 {
        self.0[i]
    }
}

/// Edges by descending score, ties by ascending id.
pub fn ranking_from_scores(scores: &EdgeScores) -> Permutation {
    let p = scores.values();
    let mut order: Vec<EdgeId> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    Permutation(order)
}

fn same_length(a: &Permutation, b: &Permutation) -> Result<(), PermError> {
    if a.len() != b.len() {
        return Err(PermError::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// `n - c(σ⁻¹ σ̂)`.
pub fn cayley_distance(sigma: &Permutation, sigma_hat: &Permutation) -> Result<usize, PermError> {
    same_length(sigma, sigma_hat)?;
    Ok(sigma.len() - sigma.inverse().compose(sigma_hat).cycle_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedMethod {
    /// Uniform-cost search over all arrangements; `n <= MAX_EXACT_N`.
    Exact,
    /// Greedy cycle-by-cycle repair; an upper bound on the exact value.
    Bound,
    /// Exact when small enough, otherwise the bound.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedDistance {
    pub value: f64,
    /// False when `value` is only an upper bound.
    pub exact: bool,
}

pub fn weighted_cayley_distance(
    sigma: &Permutation,
    sigma_hat: &Permutation,
    weights: &WeightFunction,
    method: WeightedMethod,
) -> Result<WeightedDistance, PermError> {
    same_length(sigma, sigma_hat)?;
    let n = sigma.len();
    if weights.len() < n {
        return Err(PermError::BadWeights(format!(
            "{} weights for {n} positions",
            weights.len()
        )));
    }
    // relabel items by their target position so the goal is the identity
    let target = sigma_hat.inverse();
    let start: Vec<usize> = sigma.0.iter().map(|&x| target.0[x]).collect();
    match method {
        WeightedMethod::Exact if n > MAX_EXACT_N => Err(PermError::TooLarge {
            n,
            max: MAX_EXACT_N,
        }),
        WeightedMethod::Exact => Ok(WeightedDistance {
            value: exact_search(&start, weights),
            exact: true,
        }),
        WeightedMethod::Auto if n <= MAX_EXACT_N => Ok(WeightedDistance {
            value: exact_search(&start, weights),
            exact: true,
        }),
        WeightedMethod::Bound | WeightedMethod::Auto => Ok(WeightedDistance {
            value: greedy_bound(start, weights),
            exact: false,
        }),
    }
}

/// Fix positions left to right, each by one swap with the position holding
/// the item that belongs there. Uses exactly `n - cycles` swaps.
fn greedy_bound(mut state: Vec<usize>, weights: &WeightFunction) -> f64 {
    let mut at = vec![0; state.len()];
    for (pos, &item) in state.iter().enumerate() {
        at[item] = pos;
    }
    let mut cost = 0.0;
    for p in 0..state.len() {
        if state[p] != p {
            let q = at[p];
            cost += weights.at(p);
            let displaced = state[p];
            state.swap(p, q);
            at[displaced] = q;
            at[p] = p;
        }
    }
    cost
}

// 4 bits per position; n <= 8 fits in a u32
fn encode(state: &[usize]) -> u32 {
    state
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (x as u32) << (4 * i))
}

fn swap_code(code: u32, i: usize, j: usize) -> u32 {
    let a = (code >> (4 * i)) & 0xf;
    let b = (code >> (4 * j)) & 0xf;
    let cleared = code & !(0xf << (4 * i)) & !(0xf << (4 * j));
    cleared | b << (4 * i) | a << (4 * j)
}

#[derive(PartialEq)]
struct Frontier {
    cost: f64,
    code: u32,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.code.cmp(&self.code))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn exact_search(start: &[usize], weights: &WeightFunction) -> f64 {
    let n = start.len();
    let goal = encode(&(0..n).collect::<Vec<_>>());
    let mut best: HashMap<u32, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let first = encode(start);
    best.insert(first, 0.0);
    heap.push(Frontier {
        cost: 0.0,
        code: first,
    });
    while let Some(Frontier { cost, code }) = heap.pop() {
        if code == goal {
            return cost;
        }
        if best.get(&code).is_some_and(|&b| cost > b) {
            continue;
        }
        for i in 0..n {
            for j in i + 1..n {
                let next = swap_code(code, i, j);
                let c = cost + weights.at(i);
                if best.get(&next).is_none_or(|&b| c < b) {
                    best.insert(next, c);
                    heap.push(Frontier {
                        cost: c,
                        code: next,
                    });
                }
            }
        }
    }
    unreachable!("every arrangement reaches the identity")
}

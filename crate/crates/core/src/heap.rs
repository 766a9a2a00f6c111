//! Max-heap of edge scores with lazy deletion.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::network::EdgeId;
use crate::scores::EdgeScores;

#[derive(Debug, Clone, Copy)]
struct Entry {
    score: f64,
    edge: EdgeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // higher score first, then lower edge id
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.edge.cmp(&self.edge))
    }
}

/// Edges ordered by score. Dead edges stay in the heap until popped and are
/// skipped then; reviving an edge reuses its original score.
#[derive(Debug, Clone)]
pub struct ScoreHeap {
    heap: BinaryHeap<Entry>,
    scores: Vec<f64>,
    live: Vec<bool>,
    queued: Vec<bool>,
}

impl ScoreHeap {
    /// Builds the heap with every edge queued; `live(e)` decides initial liveness.
    pub fn new(scores: &EdgeScores, live: impl Fn(EdgeId) -> bool) -> Self {
        let scores = scores.values().to_vec();
        let heap = scores
            .iter()
            .enumerate()
            .map(|(edge, &score)| Entry { score, edge })
            .collect();
        let live = (0..scores.len()).map(live).collect();
        let queued = vec![true; scores.len()];
        ScoreHeap {
            heap,
            scores,
            live,
            queued,
        }
    }

    /// Removes and returns the live edge with the highest score.
    pub fn pop(&mut self) -> Option<EdgeId> {
        while let Some(Entry { edge, .. }) = self.heap.pop() {
            self.queued[edge] = false;
            if self.live[edge] {
                return Some(edge);
            }
        }
        None
    }

    pub fn peek(&mut self) -> Option<EdgeId> {
        while let Some(&Entry { edge, .. }) = self.heap.peek() {
            if self.live[edge] {
                return Some(edge);
            }
            self.heap.pop();
            self.queued[edge] = false;
        }
        None
    }

    pub fn kill(&mut self, edge: EdgeId) {
        self.live[edge] = false;
    }

    /// Marks `edge` live and makes sure it is queued at its original score.
    pub fn revive(&mut self, edge: EdgeId) {
        self.live[edge] = true;
        if !self.queued[edge] {
            self.queued[edge] = true;
            self.heap.push(Entry {
                score: self.scores[edge],
                edge,
            });
        }
    }

    pub fn is_live(&self, edge: EdgeId) -> bool {
        self.live[edge]
    }

    pub fn live_count(&self) -> usize {
        (0..self.live.len())
            .filter(|&e| self.live[e] && self.queued[e])
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heap(values: &[f64]) -> ScoreHeap {
        ScoreHeap::new(&EdgeScores::new(values.to_vec()).unwrap(), |_| true)
    }

    #[test]
    fn pops_by_score_then_edge_id() {
        let mut h = heap(&[0.5, 0.9, 0.5, 0.1]);
        let order: Vec<_> = std::iter::from_fn(|| h.pop()).collect();
        assert_eq!(order, vec![1, 0, 2, 3]);
    }

    #[test]
    fn dead_entries_are_skipped() {
        let mut h = heap(&[0.5, 0.9, 0.7]);
        h.kill(1);
        assert_eq!(h.peek(), Some(2));
        assert_eq!(h.pop(), Some(2));
        assert_eq!(h.pop(), Some(0));
        assert_eq!(h.pop(), None);
    }

    #[test]
    fn revive_restores_relative_position() {
        let mut h = heap(&[0.5, 0.9, 0.7]);
        h.kill(1);
        assert_eq!(h.pop(), Some(2));
        // lazily dead entry 1 is still queued; revival flips the flag only
        h.revive(1);
        assert_eq!(h.pop(), Some(1));
        h.revive(2);
        h.revive(1);
        assert_eq!(h.live_count(), 3);
        let order: Vec<_> = std::iter::from_fn(|| h.pop()).collect();
        assert_eq!(order, vec![1, 2, 0]);
    }

    #[test]
    fn initial_liveness() {
        let scores = EdgeScores::new(vec![0.9, 0.8]).unwrap();
        let mut h = ScoreHeap::new(&scores, |e| e == 1);
        assert!(!h.is_live(0));
        assert_eq!(h.pop(), Some(1));
        assert_eq!(h.pop(), None);
        h.revive(0);
        assert_eq!(h.pop(), Some(0));
    }
}

use std::collections::BinaryHeap;

use super::brute::check_query;
use super::{into_list, squared_distance, Candidate, NeighborList};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Immutable kd-tree over a dataset's points.
///
/// Points are copied into tree order so leaves scan contiguous memory.
/// Pruning only discards a subtree when its lower bound is strictly larger
/// than the current worst candidate, so equal-distance points with smaller
/// indices are never lost.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    dim: usize,
    coords: Vec<f64>,
    ids: Vec<usize>,
    nodes: Vec<Node>,
}

impl NeighborIndex {
    pub fn build(ds: &LabeledDataset) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let dim = ds.dim();
        let mut ids: Vec<usize> = (0..ds.len()).collect();
        let mut nodes = Vec::with_capacity(2 * ds.len() / LEAF_SIZE + 1);
        build_node(ds, &mut ids, 0, &mut nodes);
        let mut coords = Vec::with_capacity(ds.len() * dim);
        for &i in &ids {
            coords.extend_from_slice(ds.point(i));
        }
        Ok(NeighborIndex { dim, coords, ids, nodes })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `k + 1` nearest training points of `q`.
    pub fn knn_query(&self, q: &[f64], k: usize) -> Result<NeighborList> {
        check_query(self.dim, self.len(), q, k)?;
        let mut heap = BinaryHeap::with_capacity(k + 2);
        self.search(0, q, k + 1, &mut heap);
        Ok(into_list(heap.into_vec(), k))
    }

    fn search(&self, node: usize, q: &[f64], want: usize, heap: &mut BinaryHeap<Candidate>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    let p = &self.coords[slot * self.dim..(slot + 1) * self.dim];
                    let cand = Candidate { dist2: squared_distance(q, p), index: self.ids[slot] };
                    if heap.len() < want {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, want, heap);
                let bound = diff * diff;
                if heap.len() < want || bound <= heap.peek().expect("heap is nonempty").dist2 {
                    self.search(far, q, want, heap);
                }
            }
        }
    }
}

/// Recursively splits `ids[..]` (which occupy tree slots starting at `offset`)
/// at the median of the widest axis; returns the node id.
fn build_node(ds: &LabeledDataset, ids: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if ids.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf { start: offset, end: offset + ids.len() });
        return id;
    }
    let axis = widest_axis(ds, ids);
    let (lo, hi) = extent(ds, ids, axis);
    if lo == hi {
        // every coordinate identical: no split separates them
        nodes.push(Node::Leaf { start: offset, end: offset + ids.len() });
        return id;
    }
    let mid = ids.len() / 2;
    ids.select_nth_unstable_by(mid, |&a, &b| {
        ds.point(a)[axis].total_cmp(&ds.point(b)[axis]).then(a.cmp(&b))
    });
    let value = ds.point(ids[mid])[axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (l, r) = ids.split_at_mut(mid);
    let left = build_node(ds, l, offset, nodes);
    let right = build_node(ds, r, offset + mid, nodes);
    nodes[id] = Node::Split { axis, value, left, right };
    id
}

fn extent(ds: &LabeledDataset, ids: &[usize], axis: usize) -> (f64, f64) {
    ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
        let v = ds.point(i)[axis];
        (lo.min(v), hi.max(v))
    })
}

fn widest_axis(ds: &LabeledDataset, ids: &[usize]) -> usize {
    (0..ds.dim())
        .map(|a| {
            let (lo, hi) = extent(ds, ids, a);
            (a, hi - lo)
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

use std::collections::BinaryHeap;

use crate::data::{l2, PointSet};

use super::Neighbor;

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum NodeKind {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

#[derive(Debug)]
struct Node {
    kind: NodeKind,
}

/// Balanced k-d tree: each split is on the dimension of widest spread, at
/// the median. Every node keeps the tight bounding box of its points.
#[derive(Debug)]
pub(super) struct KdTree {
    nodes: Vec<Node>,
    // Point ids; leaves own contiguous ranges of this permutation.
    order: Vec<usize>,
    // Flattened bounding boxes, `dims` values per node.
    lo: Vec<f64>,
    hi: Vec<f64>,
    dims: usize,
}

// Max-heap entry ordered by (distance, id).
#[derive(Debug, PartialEq)]
struct HeapItem(Neighbor);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp_key(&other.0)
    }
}

impl KdTree {
    pub(super) fn build(data: &PointSet) -> Self {
        let mut tree = KdTree {
            nodes: Vec::new(),
            order: (0..data.len()).collect(),
            lo: Vec::new(),
            hi: Vec::new(),
            dims: data.dims(),
        };
        tree.build_node(data, 0, data.len());
        tree
    }

    fn build_node(&mut self, data: &PointSet, start: usize, end: usize) -> usize {
        let m = self.dims;
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for &id in &self.order[start..end] {
            for (d, &v) in data.row(id).iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }

        let node = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Leaf { start, end },
        });
        self.lo.extend_from_slice(&lo);
        self.hi.extend_from_slice(&hi);

        if end - start <= LEAF_SIZE {
            return node;
        }

        let mut dim = 0;
        let mut widest = f64::NEG_INFINITY;
        for d in 0..m {
            let spread = hi[d] - lo[d];
            if spread > widest {
                widest = spread;
                dim = d;
            }
        }
        // All points coincide: no split can separate them.
        if widest <= 0.0 {
            return node;
        }

        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data.row(a)[dim]
                .total_cmp(&data.row(b)[dim])
                .then(a.cmp(&b))
        });
        let left = self.build_node(data, start, mid);
        let right = self.build_node(data, mid, end);
        self.nodes[node].kind = NodeKind::Split { left, right };
        node
    }

    // Lower bound on the distance from `q` to any point in the node's box.
    // Each term is computed the same way `l2` computes the true difference,
    // so by monotonicity of IEEE rounding the bound never exceeds it.
    fn min_distance(&self, node: usize, q: &[f64]) -> f64 {
        let base = node * self.dims;
        let mut acc = 0.0;
        for (d, &x) in q.iter().enumerate() {
            let lo = self.lo[base + d];
            let hi = self.hi[base + d];
            let gap = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            acc += gap * gap;
        }
        acc.sqrt()
    }

    pub(super) fn knn_inclusive(&self, data: &PointSet, query: usize, k: usize) -> Vec<Neighbor> {
        let q = data.row(query);
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.search_k(0, data, query, q, k, &mut heap);
        let radius = heap.peek().map(|h| h.0.distance).unwrap_or(f64::INFINITY);

        let mut out = Vec::with_capacity(k);
        self.search_radius(0, data, query, q, radius, &mut out);
        out.sort_unstable_by(Neighbor::cmp_key);
        out
    }

    fn search_k(
        &self,
        node: usize,
        data: &PointSet,
        query: usize,
        q: &[f64],
        k: usize,
        heap: &mut BinaryHeap<HeapItem>,
    ) {
        match self.nodes[node].kind {
            NodeKind::Leaf { start, end } => {
                for &id in &self.order[start..end] {
                    if id == query {
                        continue;
                    }
                    let cand = Neighbor {
                        id,
                        distance: l2(q, data.row(id)),
                    };
                    if heap.len() < k {
                        heap.push(HeapItem(cand));
                    } else if cand.cmp_key(&heap.peek().unwrap().0).is_lt() {
                        heap.pop();
                        heap.push(HeapItem(cand));
                    }
                }
            }
            NodeKind::Split { left, right } => {
                let dl = self.min_distance(left, q);
                let dr = self.min_distance(right, q);
                let (first, df, second, ds) = if dl <= dr {
                    (left, dl, right, dr)
                } else {
                    (right, dr, left, dl)
                };
                for (child, bound) in [(first, df), (second, ds)] {
                    if heap.len() == k && bound > heap.peek().unwrap().0.distance {
                        continue;
                    }
                    self.search_k(child, data, query, q, k, heap);
                }
            }
        }
    }

    fn search_radius(
        &self,
        node: usize,
        data: &PointSet,
        query: usize,
        q: &[f64],
        radius: f64,
        out: &mut Vec<Neighbor>,
    ) {
        if self.min_distance(node, q) > radius {
            return;
        }
        match self.nodes[node].kind {
            NodeKind::Leaf { start, end } => {
                for &id in &self.order[start..end] {
                    if id == query {
                        continue;
                    }
                    let distance = l2(q, data.row(id));
                    if distance <= radius {
                        out.push(Neighbor { id, distance });
                    }
                }
            }
            NodeKind::Split { left, right } => {
                self.search_radius(left, data, query, q, radius, out);
                self.search_radius(right, data, query, q, radius, out);
            }
        }
    }
}

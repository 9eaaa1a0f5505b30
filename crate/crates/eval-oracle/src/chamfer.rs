use kinematics_core::{PointCloud, Vec3};

/// KD-tree nearest-neighbor index over a point set.
pub struct NearestIndex {
    nodes: Vec<Node>,
    root: Option<usize>,
}

struct Node {
    point: Vec3,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

impl NearestIndex {
    pub fn build(points: &[Vec3]) -> Self {
        let mut index = NearestIndex { nodes: Vec::with_capacity(points.len()), root: None };
        let mut order: Vec<Vec3> = points.to_vec();
        let len = order.len();
        index.root = index.build_range(&mut order, 0..len, 0);
        index
    }

    fn build_range(
        &mut self,
        points: &mut [Vec3],
        range: std::ops::Range<usize>,
        depth: usize,
    ) -> Option<usize> {
        if range.is_empty() {
            return None;
        }
        let axis = depth % 3;
        let slice = &mut points[range.clone()];
        slice.sort_by(|a, b| a.component(axis).partial_cmp(&b.component(axis)).unwrap());
        let mid = slice.len() / 2;
        let point = slice[mid];
        let id = self.nodes.len();
        self.nodes.push(Node { point, axis, left: None, right: None });
        let left = self.build_range(points, range.start..range.start + mid, depth + 1);
        let right = self.build_range(points, range.start + mid + 1..range.end, depth + 1);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        Some(id)
    }

    /// Distance to the nearest indexed point.
    pub fn nearest_distance(&self, query: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        if let Some(root) = self.root {
            self.search(root, query, &mut best);
        }
        best.sqrt()
    }

    fn search(&self, id: usize, query: Vec3, best_sq: &mut f64) {
        let node = &self.nodes[id];
        let d = (node.point - query).norm_squared();
        if d < *best_sq {
            *best_sq = d;
        }
        let delta = query.component(node.axis) - node.point.component(node.axis);
        let (near, far) = if delta < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
        if let Some(n) = near {
            self.search(n, query, best_sq);
        }
        if delta * delta < *best_sq {
            if let Some(f) = far {
                self.search(f, query, best_sq);
            }
        }
    }
}

/// Symmetric mean nearest-neighbor distance, halved:
/// `(mean_a min‖a−b‖ + mean_b min‖b−a‖) / 2`.
///
/// Panics on empty clouds; the evaluation layer guards its inputs.
pub fn chamfer(a: &PointCloud, b: &PointCloud) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "chamfer needs non-empty clouds");
    let index_b = NearestIndex::build(&b.points);
    let index_a = NearestIndex::build(&a.points);
    let sum_a: f64 = a.points.iter().map(|&p| index_b.nearest_distance(p)).sum();
    let sum_b: f64 = b.points.iter().map(|&p| index_a.nearest_distance(p)).sum();
    (sum_a / a.len() as f64 + sum_b / b.len() as f64) / 2.0
}

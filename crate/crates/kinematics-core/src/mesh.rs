use crate::{Pose, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index} but mesh has {vertex_count} vertices")]
    IndexOutOfRange { triangle: usize, index: usize, vertex_count: usize },
    #[error("mesh has zero total surface area")]
    ZeroArea,
}

/// Indexed triangle mesh. The optional color tag is carried through to
/// renders so a link can pin its own segmentation color.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub color_tag: Option<[u8; 3]>,
}

impl TriMesh {
    /// Builds a mesh, validating that all triangle indices are in range.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        vertex_count: vertices.len(),
                    });
                }
            }
        }
        Ok(Self { vertices, triangles, color_tag: None })
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Axis-aligned box `[-hx,hx]×[-hy,hy]×[-hz,hz]` centered on the origin.
    pub fn cuboid(half_extents: Vec3) -> Self {
        let h = half_extents;
        let v = |sx: f64, sy: f64, sz: f64| Vec3::new(sx * h.x, sy * h.y, sz * h.z);
        let vertices = vec![
            v(-1.0, -1.0, -1.0),
            v(1.0, -1.0, -1.0),
            v(1.0, 1.0, -1.0),
            v(-1.0, 1.0, -1.0),
            v(-1.0, -1.0, 1.0),
            v(1.0, -1.0, 1.0),
            v(1.0, 1.0, 1.0),
            v(-1.0, 1.0, 1.0),
        ];
        // Outward-facing CCW winding per face.
        let triangles = vec![
            [0, 2, 1], [0, 3, 2], // -z
            [4, 5, 6], [4, 6, 7], // +z
            [0, 1, 5], [0, 5, 4], // -y
            [2, 3, 7], [2, 7, 6], // +y
            [1, 2, 6], [1, 6, 5], // +x
            [3, 0, 4], [3, 4, 7], // -x
        ];
        Self { vertices, triangles, color_tag: None }
    }

    /// Vertices of triangle `t`.
    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Componentwise-scaled copy (mesh-local frame).
    pub fn scaled(&self, s: Vec3) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| v.scale(s)).collect(),
            triangles: self.triangles.clone(),
            color_tag: self.color_tag,
        }
    }

    /// Copy with every vertex mapped through `pose`.
    pub fn transformed(&self, pose: Pose) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|&v| pose.transform_point(v)).collect(),
            triangles: self.triangles.clone(),
            color_tag: self.color_tag,
        }
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| triangle_area(self.triangle(t))).sum()
    }

    /// Tight bounds in the mesh's own frame. Errors on an empty mesh.
    pub fn aabb(&self) -> Result<Aabb, MeshError> {
        aabb_of(self, Pose::IDENTITY)
    }
}

pub fn triangle_area([a, b, c]: [Vec3; 3]) -> f64 {
    (b - a).cross(c - a).norm() / 2.0
}

/// Axis-aligned bounding box, `min ≤ max` componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        debug_assert!(min.x <= max.x && min.y <= max.y && min.z <= max.z);
        Self { min, max }
    }

    /// Smallest box containing all points. `None` for an empty iterator.
    pub fn from_points<I: IntoIterator<Item = Vec3>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut min = first;
        let mut max = first;
        for p in it {
            min = min.min(p);
            max = max.max(p);
        }
        Some(Self { min, max })
    }

    pub fn center(self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extents(self) -> Vec3 {
        self.max - self.min
    }

    pub fn union(self, other: Aabb) -> Aabb {
        Aabb { min: self.min.min(other.min), max: self.max.max(other.max) }
    }

    pub fn contains(self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn intersects(self, other: Aabb) -> bool {
        self.min.x <= other.max.x
            && self.max.x >= other.min.x
            && self.min.y <= other.max.y
            && self.max.y >= other.min.y
            && self.min.z <= other.max.z
            && self.max.z >= other.min.z
    }
}

/// Non-empty set of 3D points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn transformed(&self, pose: Pose) -> PointCloud {
        PointCloud { points: self.points.iter().map(|&p| pose.transform_point(p)).collect() }
    }
}

/// Tight bounds of all vertices of `mesh` mapped through `transform`.
pub fn aabb_of(mesh: &TriMesh, transform: Pose) -> Result<Aabb, MeshError> {
    if mesh.vertices.is_empty() {
        return Err(MeshError::Empty);
    }
    Ok(Aabb::from_points(mesh.vertices.iter().map(|&v| transform.transform_point(v)))
        .expect("non-empty vertex list"))
}

/// Samples `n` points on the mesh surface, area-proportionally across
/// triangles and barycentric-uniform within each.
///
/// Sampling uses an explicitly seeded counter-based stream (ChaCha8), so the
/// result is identical across platforms for a fixed `(mesh, n, seed)`.
pub fn sample_surface(mesh: &TriMesh, n: usize, seed: u64) -> Result<PointCloud, MeshError> {
    if mesh.is_empty() {
        return Err(MeshError::Empty);
    }
    assert!(n >= 1, "sample_surface needs n >= 1");

    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        total += triangle_area(mesh.triangle(t));
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(MeshError::ZeroArea);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.gen_range(0.0..total);
        let t = match cumulative.binary_search_by(|c| c.partial_cmp(&r).unwrap()) {
            Ok(i) => (i + 1).min(mesh.triangles.len() - 1),
            Err(i) => i.min(mesh.triangles.len() - 1),
        };
        let [a, b, c] = mesh.triangle(t);
        // Uniform barycentric point: fold (u, v) back into the triangle.
        let mut u: f64 = rng.gen();
        let mut v: f64 = rng.gen();
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        points.push(a + (b - a) * u + (c - a) * v);
    }
    Ok(PointCloud::new(points))
}

//! Triangle meshes with a bounding-volume hierarchy for first-hit queries.

use crate::error::{Error, Result};
use crate::scene::{Mat3, Vec3};

/// Triangles smaller than this are rejected as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Hits closer than this along the ray are ignored.
pub const T_EPSILON: f64 = 1e-9;

const BARY_EPSILON: f64 = 1e-12;
const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Ray { origin, direction }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub point: Vec3,
    pub triangle: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Vec3,
    max: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    fn merge(&mut self, o: &Aabb) {
        self.min = self.min.inf(&o.min);
        self.max = self.max.sup(&o.max);
    }

    /// Entry distance along the ray, or `None` when the box is missed or lies
    /// beyond `t_max`.
    fn hit(&self, origin: &Vec3, inv_dir: &Vec3, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0_f64;
        let mut t1 = t_max;
        for a in 0..3 {
            let mut near = (self.min[a] - origin[a]) * inv_dir[a];
            let mut far = (self.max[a] - origin[a]) * inv_dir[a];
            if near > far {
                std::mem::swap(&mut near, &mut far);
            }
            // NaN (0 * inf) leaves the bound unchanged.
            if near > t0 {
                t0 = near;
            }
            if far < t1 {
                t1 = far;
            }
            // Small slack so hits exactly on a box face are not culled.
            if t0 > t1 * (1.0 + 1e-12) + 1e-12 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bounds: Aabb, start: usize, len: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

#[derive(Debug, Clone)]
struct Bvh {
    nodes: Vec<Node>,
    /// Triangle ids in leaf order.
    order: Vec<usize>,
}

impl Bvh {
    fn build(vertices: &[Vec3], triangles: &[[u32; 3]]) -> Self {
        let centroids: Vec<Vec3> = triangles
            .iter()
            .map(|t| (vertices[t[0] as usize] + vertices[t[1] as usize] + vertices[t[2] as usize]) / 3.0)
            .collect();
        let boxes: Vec<Aabb> = triangles
            .iter()
            .map(|t| {
                let mut b = Aabb::empty();
                for &i in t {
                    b.grow(&vertices[i as usize]);
                }
                b
            })
            .collect();
        let mut bvh = Bvh {
            nodes: Vec::with_capacity(2 * triangles.len() / LEAF_SIZE + 1),
            order: (0..triangles.len()).collect(),
        };
        bvh.build_node(0, triangles.len(), &centroids, &boxes);
        bvh
    }

    fn build_node(&mut self, start: usize, end: usize, centroids: &[Vec3], boxes: &[Aabb]) -> usize {
        let mut bounds = Aabb::empty();
        let mut cbounds = Aabb::empty();
        for &t in &self.order[start..end] {
            bounds.merge(&boxes[t]);
            cbounds.grow(&centroids[t]);
        }
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                bounds,
                start,
                len: end - start,
            });
            return id;
        }
        let extent = cbounds.max - cbounds.min;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        if extent[axis] <= 0.0 {
            self.nodes.push(Node::Leaf {
                bounds,
                start,
                len: end - start,
            });
            return id;
        }
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b))
        });
        self.nodes.push(Node::Leaf {
            bounds,
            start: 0,
            len: 0,
        });
        let left = self.build_node(start, mid, centroids, boxes);
        let right = self.build_node(mid, end, centroids, boxes);
        self.nodes[id] = Node::Inner { bounds, left, right };
        id
    }
}

/// Möller–Trumbore intersection with a small barycentric slack so that rays
/// through shared edges do not fall into cracks. Returns `t`.
fn intersect_triangle(ray: &Ray, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = ray.direction.cross(&e2);
    let det = e1.dot(&p);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - a;
    let u = s.dot(&p) * inv;
    if !(-BARY_EPSILON..=1.0 + BARY_EPSILON).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = ray.direction.dot(&q) * inv;
    if v < -BARY_EPSILON || u + v > 1.0 + BARY_EPSILON {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > T_EPSILON).then_some(t)
}

/// Smaller `t` wins; exact ties go to the smaller triangle id.
fn better(t: f64, tri: usize, best: &Option<(f64, usize)>) -> bool {
    match best {
        None => true,
        Some((bt, bi)) => t < *bt || (t == *bt && tri < *bi),
    }
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    areas: Vec<f64>,
    bvh: Bvh,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let mut areas = Vec::with_capacity(triangles.len());
        for (ti, t) in triangles.iter().enumerate() {
            for &v in t {
                if v as usize >= vertices.len() {
                    return Err(Error::IndexOutOfRange {
                        triangle: ti,
                        vertex: v as usize,
                    });
                }
            }
            let (a, b, c) = (
                &vertices[t[0] as usize],
                &vertices[t[1] as usize],
                &vertices[t[2] as usize],
            );
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            if !(area >= MIN_TRIANGLE_AREA) {
                return Err(Error::DegenerateTriangle { triangle: ti, area });
            }
            areas.push(area);
        }
        let bvh = Bvh::build(&vertices, &triangles);
        Ok(TriangleMesh {
            vertices,
            triangles,
            areas,
            bvh,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn corners(&self, tri: usize) -> [Vec3; 3] {
        let t = self.triangles[tri];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    /// Applies `x ↦ rot·x + shift` and rebuilds the hierarchy.
    pub fn transformed(&self, rot: &Mat3, shift: &Vec3) -> Result<Self> {
        TriangleMesh::new(
            self.vertices.iter().map(|v| rot * v + shift).collect(),
            self.triangles.clone(),
        )
    }

    /// First intersection along `ray` (smallest `t > 1e-9`).
    pub fn first_hit(&self, ray: &Ray) -> Option<Hit> {
        if ray.direction.norm_squared() == 0.0 {
            return None;
        }
        let inv = Vec3::new(1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z);
        let mut best: Option<(f64, usize)> = None;
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        if let Some(t) = self.bvh.nodes[0].bounds().hit(&ray.origin, &inv, f64::INFINITY) {
            stack.push((0, t));
        }
        while let Some((node, entry)) = stack.pop() {
            let limit = best.map_or(f64::INFINITY, |b| b.0);
            if entry > limit {
                continue;
            }
            match &self.bvh.nodes[node] {
                Node::Leaf { start, len, .. } => {
                    for &tri in &self.bvh.order[*start..start + len] {
                        let [a, b, c] = self.corners(tri);
                        if let Some(t) = intersect_triangle(ray, &a, &b, &c) {
                            if better(t, tri, &best) {
                                best = Some((t, tri));
                            }
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let lt = self.bvh.nodes[*left].bounds().hit(&ray.origin, &inv, limit);
                    let rt = self.bvh.nodes[*right].bounds().hit(&ray.origin, &inv, limit);
                    // Push the farther child first so the nearer one is visited next.
                    match (lt, rt) {
                        (Some(l), Some(r)) if l <= r => {
                            stack.push((*right, r));
                            stack.push((*left, l));
                        }
                        (Some(l), Some(r)) => {
                            stack.push((*left, l));
                            stack.push((*right, r));
                        }
                        (Some(l), None) => stack.push((*left, l)),
                        (None, Some(r)) => stack.push((*right, r)),
                        (None, None) => {}
                    }
                }
            }
        }
        best.map(|(t, triangle)| Hit {
            point: ray.at(t),
            triangle,
            t,
        })
    }

    /// First intersection by testing every triangle; reference for [`Self::first_hit`].
    pub fn first_hit_brute_force(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<(f64, usize)> = None;
        for tri in 0..self.triangles.len() {
            let [a, b, c] = self.corners(tri);
            if let Some(t) = intersect_triangle(ray, &a, &b, &c) {
                if better(t, tri, &best) {
                    best = Some((t, tri));
                }
            }
        }
        best.map(|(t, triangle)| Hit {
            point: ray.at(t),
            triangle,
            t,
        })
    }

    /// Subdivided icosahedron projected onto a sphere.
    pub fn icosphere(subdivisions: u32, radius: f64, center: Vec3) -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ]
        .iter()
        .map(|p| Vec3::from(*p).normalize())
        .collect();
        let mut faces: Vec<[u32; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut cache = std::collections::HashMap::new();
            let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Vec3>| -> u32 {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    verts.push(((verts[a as usize] + verts[b as usize]) / 2.0).normalize());
                    (verts.len() - 1) as u32
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = midpoint(a, b, &mut verts);
                let bc = midpoint(b, c, &mut verts);
                let ca = midpoint(c, a, &mut verts);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        let verts = verts.into_iter().map(|v| center + v * radius).collect();
        TriangleMesh::new(verts, faces).expect("icosphere is well formed")
    }
}

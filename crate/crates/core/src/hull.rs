//! Incremental 3D convex hull, used only for inside/outside tests.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scene::Vec3;

#[derive(Debug, Clone)]
struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    alive: bool,
}

/// Convex hull stored as outward-facing planes `n·x ≤ d`.
#[derive(Debug, Clone)]
pub struct ConvexHull {
    planes: Vec<(Vec3, f64)>,
    min: Vec3,
    max: Vec3,
    eps: f64,
}

fn make_face(points: &[Vec3], v: [usize; 3]) -> Face {
    let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
    let normal = (b - a).cross(&(c - a)).normalize();
    Face {
        v,
        normal,
        offset: normal.dot(&a),
        alive: true,
    }
}

impl ConvexHull {
    pub fn new(points: &[Vec3]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::DegenerateHull);
        }
        let mut min = Vec3::repeat(f64::INFINITY);
        let mut max = Vec3::repeat(f64::NEG_INFINITY);
        for p in points {
            min = min.inf(p);
            max = max.sup(p);
        }
        let scale = (max - min).norm();
        if !(scale > 0.0) {
            return Err(Error::DegenerateHull);
        }
        let eps = 1e-9 * scale;

        // Initial tetrahedron from extreme points.
        let i0 = (0..points.len())
            .min_by(|&a, &b| points[a].x.total_cmp(&points[b].x))
            .unwrap();
        let i1 = (0..points.len())
            .max_by(|&a, &b| {
                (points[a] - points[i0])
                    .norm()
                    .total_cmp(&(points[b] - points[i0]).norm())
            })
            .unwrap();
        let line = (points[i1] - points[i0]).normalize();
        let off_line = |p: &Vec3| {
            let d = p - points[i0];
            (d - line * d.dot(&line)).norm()
        };
        let i2 = (0..points.len())
            .max_by(|&a, &b| off_line(&points[a]).total_cmp(&off_line(&points[b])))
            .unwrap();
        if off_line(&points[i2]) <= eps {
            return Err(Error::DegenerateHull);
        }
        let plane_n = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalize();
        let off_plane = |p: &Vec3| (p - points[i0]).dot(&plane_n).abs();
        let i3 = (0..points.len())
            .max_by(|&a, &b| off_plane(&points[a]).total_cmp(&off_plane(&points[b])))
            .unwrap();
        if off_plane(&points[i3]) <= eps {
            return Err(Error::DegenerateHull);
        }

        let interior = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
        let mut faces: Vec<Face> = Vec::new();
        for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
            let mut f = make_face(points, tri);
            if f.normal.dot(&interior) - f.offset > 0.0 {
                f = make_face(points, [tri[0], tri[2], tri[1]]);
            }
            faces.push(f);
        }

        let seeds = [i0, i1, i2, i3];
        for (pi, p) in points.iter().enumerate() {
            if seeds.contains(&pi) {
                continue;
            }
            let visible: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| f.alive && f.normal.dot(p) - f.offset > eps)
                .map(|(i, _)| i)
                .collect();
            if visible.is_empty() {
                continue;
            }
            let mut edges: HashSet<(usize, usize)> = HashSet::new();
            for &fi in &visible {
                let v = faces[fi].v;
                for k in 0..3 {
                    edges.insert((v[k], v[(k + 1) % 3]));
                }
                faces[fi].alive = false;
            }
            let horizon: Vec<(usize, usize)> = edges
                .iter()
                .copied()
                .filter(|&(a, b)| !edges.contains(&(b, a)))
                .collect();
            for (a, b) in horizon {
                faces.push(make_face(points, [a, b, pi]));
            }
        }

        let planes = faces
            .into_iter()
            .filter(|f| f.alive)
            .map(|f| (f.normal, f.offset))
            .collect();
        Ok(ConvexHull { planes, min, max, eps })
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.planes.iter().all(|(n, d)| n.dot(p) - d <= self.eps)
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        (self.min, self.max)
    }

    pub fn face_count(&self) -> usize {
        self.planes.len()
    }
}

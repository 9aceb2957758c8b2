//! Small geometric helpers shared across modules.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::scene::{Mat3, Vec3};

/// Two unit vectors completing `axis` to a right-handed orthonormal frame.
pub fn orthonormal_basis(axis: &Vec3) -> (Vec3, Vec3) {
    // Branchless construction (Duff et al.).
    let sign = 1.0_f64.copysign(axis.z);
    let a = -1.0 / (sign + axis.z);
    let b = axis.x * axis.y * a;
    let e1 = Vec3::new(1.0 + sign * axis.x * axis.x * a, sign * b, -sign * axis.x);
    let e2 = Vec3::new(b, sign + axis.y * axis.y * a, -axis.y);
    (e1, e2)
}

/// Largest absolute entry of `RᵀR − I`.
pub fn orthonormality_error(r: &Mat3) -> f64 {
    (r.transpose() * r - Mat3::identity()).abs().max()
}

/// Nearest orthogonal matrix with positive determinant (polar factor).
pub fn polar_rotation(r: &Mat3) -> Mat3 {
    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut q = u * v_t;
    if q.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        q = u * v_t;
    }
    q
}

/// Rotation about +z by `angle` radians.
pub fn rotation_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Uniform point on the unit sphere via normalized Gaussians.
pub fn uniform_on_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Uniform hash grid over a fixed point set, for radius and nearest queries.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    cell: f64,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl SpatialGrid {
    pub fn new(points: &[Vec3], cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "grid cell size must be positive");
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key_for(cell, p)).or_default().push(i as u32);
        }
        SpatialGrid { cell, cells }
    }

    fn key_for(cell: f64, p: &Vec3) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    /// Calls `f` with the index of every point within closed distance
    /// `radius` of `q`. `radius` must not exceed the cell size.
    pub fn visit_within(&self, points: &[Vec3], q: &Vec3, radius: f64, mut f: impl FnMut(usize)) {
        debug_assert!(radius <= self.cell * (1.0 + 1e-12));
        let r2 = radius * radius;
        let (kx, ky, kz) = Self::key_for(self.cell, q);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &i in ids {
                            if (points[i as usize] - q).norm_squared() <= r2 {
                                f(i as usize);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Number of `points` within closed distance `radius` of `q`.
    pub fn count_within(&self, points: &[Vec3], q: &Vec3, radius: f64) -> usize {
        let mut count = 0;
        self.visit_within(points, q, radius, |_| count += 1);
        count
    }

    /// Index and distance of the nearest point to `q`, skipping `exclude`.
    pub fn nearest(&self, points: &[Vec3], q: &Vec3, exclude: Option<usize>) -> Option<(usize, f64)> {
        if self.cells.is_empty() {
            return None;
        }
        let (kx, ky, kz) = Self::key_for(self.cell, q);
        let mut best: Option<(usize, f64)> = None;
        let total: usize = self.cells.values().map(Vec::len).sum();
        let mut visited = 0usize;
        let mut ring = 0i64;
        loop {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for dz in -ring..=ring {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        if let Some(ids) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                            for &i in ids {
                                visited += 1;
                                let i = i as usize;
                                if Some(i) == exclude {
                                    continue;
                                }
                                let d = (points[i] - q).norm();
                                if best.is_none_or(|(bi, bd)| d < bd || (d == bd && i < bi)) {
                                    best = Some((i, d));
                                }
                            }
                        }
                    }
                }
            }
            // Unscanned cells are at least `ring * cell` away from `q`.
            let bound_ok = best.is_some_and(|(_, d)| d <= ring as f64 * self.cell);
            if bound_ok || visited >= total {
                break;
            }
            ring += 1;
        }
        best
    }
}

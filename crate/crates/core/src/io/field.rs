//! Coverage field files.
//!
//! Binary layout, all little-endian: `M: u64`, `ℓ: f64`, `κ_cov: f64`, then
//! `M` records of `x, y, z, raw` as `f64`.

use std::io::{Read, Write};
use std::path::Path;

use crate::coverage::{colormap, CoverageField};
use crate::error::{Error, Result};
use crate::geometry::SpatialGrid;
use crate::mesh::TriangleMesh;
use crate::scene::Vec3;

use super::mesh_io::write_ply;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub radius: f64,
    pub kappa: f64,
    pub points: Vec<Vec3>,
    pub raw: Vec<f64>,
}

pub fn write_field(path: impl AsRef<Path>, field: &CoverageField) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(&(field.raw.len() as u64).to_le_bytes())?;
    out.write_all(&field.samples.radius().to_le_bytes())?;
    out.write_all(&field.kappa.to_le_bytes())?;
    for (p, r) in field.samples.points().iter().zip(&field.raw) {
        for x in [p.x, p.y, p.z, *r] {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<FieldFile> {
    let path = path.as_ref();
    let bytes = match std::fs::File::open(path) {
        Ok(mut f) => {
            let mut b = Vec::new();
            f.read_to_end(&mut b)?;
            b
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingFile(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    if bytes.len() < 24 {
        return Err(Error::parse(path, 0, "truncated header"));
    }
    let word = |i: usize| -> [u8; 8] { bytes[i * 8..i * 8 + 8].try_into().expect("8 bytes") };
    let m = u64::from_le_bytes(word(0));
    let expected = 24u64.saturating_add(m.saturating_mul(32));
    if bytes.len() as u64 != expected {
        return Err(Error::parse(
            path,
            0,
            format!("{m} records need {expected} bytes, file has {}", bytes.len()),
        ));
    }
    let f = |i: usize| f64::from_le_bytes(word(i));
    let (mut points, mut raw) = (Vec::with_capacity(m as usize), Vec::with_capacity(m as usize));
    for r in 0..m as usize {
        let base = 3 + 4 * r;
        points.push(Vec3::new(f(base), f(base + 1), f(base + 2)));
        raw.push(f(base + 3));
    }
    Ok(FieldFile {
        radius: f(1),
        kappa: f(2),
        points,
        raw,
    })
}

/// Normalized field value at each mesh vertex, taken from the nearest sample.
pub fn vertex_values(mesh: &TriangleMesh, field: &CoverageField) -> Vec<f64> {
    let points = field.samples.points();
    if points.is_empty() {
        return vec![0.0; mesh.vertices().len()];
    }
    let normalized = field.normalized();
    let grid = SpatialGrid::new(points, field.samples.radius());
    mesh.vertices()
        .iter()
        .map(|v| grid.nearest(points, v, None).map_or(0.0, |(i, _)| normalized[i]))
        .collect()
}

/// Mesh colored by the normalized field through [`colormap`].
pub fn write_coverage_ply(path: impl AsRef<Path>, mesh: &TriangleMesh, field: &CoverageField) -> Result<()> {
    let colors: Vec<[u8; 3]> = vertex_values(mesh, field).into_iter().map(colormap).collect();
    write_ply(path, mesh, Some(&colors))
}

//! Wavefront OBJ input and binary PLY output for triangle meshes.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::scene::Vec3;

use super::read_text;

/// Reads `v` and `f` records; polygons are fan-triangulated and texture or
/// normal indices (`f 1/2/3 …`) are ignored. Negative indices count from
/// the end, as in the format.
pub fn read_obj(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let xyz: Vec<f64> = tok
                    .take(3)
                    .map(|t| {
                        t.parse()
                            .map_err(|_| Error::parse(path, n, format!("invalid coordinate `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                if xyz.len() != 3 {
                    return Err(Error::parse(path, n, "vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = tok
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let k: i64 = head
                            .parse()
                            .map_err(|_| Error::parse(path, n, format!("invalid index `{t}`")))?;
                        let resolved = if k < 0 { vertices.len() as i64 + k } else { k - 1 };
                        if k == 0 || resolved < 0 || resolved >= vertices.len() as i64 {
                            return Err(Error::parse(path, n, format!("vertex index {k} out of range")));
                        }
                        Ok(resolved as u32)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(Error::parse(path, n, "face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles)
}

/// Binary little-endian PLY, optionally with per-vertex RGB.
pub fn write_ply(path: impl AsRef<Path>, mesh: &TriangleMesh, colors: Option<&[[u8; 3]]>) -> Result<()> {
    if let Some(c) = colors {
        if c.len() != mesh.vertices().len() {
            return Err(Error::InvalidConfig(format!(
                "{} colors for {} vertices",
                c.len(),
                mesh.vertices().len()
            )));
        }
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n",
        mesh.vertices().len()
    )?;
    out.write_all(b"property double x\nproperty double y\nproperty double z\n")?;
    if colors.is_some() {
        out.write_all(b"property uchar red\nproperty uchar green\nproperty uchar blue\n")?;
    }
    write!(
        out,
        "element face {}\nproperty list uchar uint vertex_indices\nend_header\n",
        mesh.triangles().len()
    )?;
    for (i, v) in mesh.vertices().iter().enumerate() {
        for c in v.iter() {
            out.write_all(&c.to_le_bytes())?;
        }
        if let Some(colors) = colors {
            out.write_all(&colors[i])?;
        }
    }
    for t in mesh.triangles() {
        out.write_all(&[3u8])?;
        for i in t {
            out.write_all(&i.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

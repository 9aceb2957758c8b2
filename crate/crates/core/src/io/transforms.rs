//! NeRF-synthetic `transforms.json` files.
//!
//! Recognized keys: `camera_angle_x` (required unless `fl_x` is given),
//! optional `fl_x`, `fl_y`, `cx`, `cy`, `w`, `h`, and `frames[]` with
//! `file_path` and a 4×4 camera-to-world `transform_matrix`. Image size
//! defaults to 800×800, the size of the synthetic scenes.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{orthonormality_error, polar_rotation};
use crate::scene::{CameraView, Intrinsics, Mat3, Vec3, ViewSet, ROTATION_TOLERANCE};

use super::read_text;

pub const DEFAULT_IMAGE_SIZE: u32 = 800;

/// Largest `‖R − polar(R)‖` (max-abs entry) repaired with a warning.
pub const REPAIR_TOLERANCE: f64 = 1e-3;

fn number(obj: &Map<String, Value>, key: &str, path: &Path, ctx: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::parse(path, 0, format!("{ctx}`{key}` must be a number"))),
    }
}

fn size(obj: &Map<String, Value>, key: &str, path: &Path) -> Result<u32> {
    match number(obj, key, path, "")? {
        None => Ok(DEFAULT_IMAGE_SIZE),
        Some(x) if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => Ok(x as u32),
        Some(x) => Err(Error::parse(
            path,
            0,
            format!("`{key}` must be a positive integer, got {x}"),
        )),
    }
}

/// Rotation accepted as is, repaired (with a warning) or rejected.
pub(crate) fn checked_rotation(r: Mat3, id: &str) -> Result<Mat3> {
    if orthonormality_error(&r) <= ROTATION_TOLERANCE && r.determinant() > 0.0 {
        return Ok(r);
    }
    let q = polar_rotation(&r);
    let deviation = (r - q).abs().max();
    if !deviation.is_finite() || deviation > REPAIR_TOLERANCE {
        return Err(Error::NonOrthonormalRotation {
            id: id.to_string(),
            deviation,
        });
    }
    log::warn!("camera `{id}`: rotation off by {deviation:.2e}, re-orthonormalized");
    Ok(q)
}

pub fn read_transforms(path: impl AsRef<Path>) -> Result<ViewSet> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let root: Value = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse(path, 1, "top level must be an object"))?;

    let width = size(obj, "w", path)?;
    let height = size(obj, "h", path)?;
    let fx = match (number(obj, "fl_x", path, "")?, number(obj, "camera_angle_x", path, "")?) {
        (Some(f), _) => f,
        (None, Some(angle)) => width as f64 / (2.0 * (angle / 2.0).tan()),
        (None, None) => return Err(Error::parse(path, 0, "missing `camera_angle_x`")),
    };
    let intrinsics = Intrinsics {
        fx,
        fy: number(obj, "fl_y", path, "")?.unwrap_or(fx),
        cx: number(obj, "cx", path, "")?.unwrap_or(width as f64 / 2.0),
        cy: number(obj, "cy", path, "")?.unwrap_or(height as f64 / 2.0),
        width,
        height,
    };

    let frames = obj
        .get("frames")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(path, 0, "missing `frames` array"))?;
    let mut views = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let ctx = format!("frame {i}: ");
        let frame = frame
            .as_object()
            .ok_or_else(|| Error::parse(path, 0, format!("{ctx}not an object")))?;
        let id = match frame.get("file_path") {
            Some(Value::String(s)) => s.clone(),
            None => format!("frame_{i:04}"),
            Some(_) => return Err(Error::parse(path, 0, format!("{ctx}`file_path` must be a string"))),
        };
        let m = frame
            .get("transform_matrix")
            .ok_or_else(|| Error::parse(path, 0, format!("{ctx}missing `transform_matrix`")))?;
        let rows = m
            .as_array()
            .filter(|r| r.len() == 4)
            .ok_or_else(|| Error::parse(path, 0, format!("{ctx}`transform_matrix` must be 4×4")))?;
        let mut t = [[0.0; 4]; 4];
        for (r, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|row| row.len() == 4)
                .ok_or_else(|| Error::parse(path, 0, format!("{ctx}`transform_matrix` must be 4×4")))?;
            for (c, x) in row.iter().enumerate() {
                t[r][c] = x
                    .as_f64()
                    .ok_or_else(|| Error::parse(path, 0, format!("{ctx}non-numeric matrix entry")))?;
            }
        }
        let rotation = Mat3::new(
            t[0][0], t[0][1], t[0][2], t[1][0], t[1][1], t[1][2], t[2][0], t[2][1], t[2][2],
        );
        let rotation = checked_rotation(rotation, &id)?;
        let center = Vec3::new(t[0][3], t[1][3], t[2][3]);
        views.push(CameraView::new(id.clone(), center, rotation, Some(intrinsics))?.with_image_path(id));
    }
    ViewSet::new(views)
}

/// Writes `set` in the layout [`read_transforms`] accepts. All views must
/// share one set of intrinsics.
pub fn write_transforms(path: impl AsRef<Path>, set: &ViewSet) -> Result<()> {
    let k = set.views()[0]
        .intrinsics()
        .copied()
        .ok_or_else(|| Error::MissingIntrinsics(set.views()[0].id().to_string()))?;
    for v in set.views() {
        if v.intrinsics() != Some(&k) {
            return Err(Error::InvalidConfig(format!(
                "view `{}` has different intrinsics",
                v.id()
            )));
        }
    }
    let frames: Vec<Value> = set
        .views()
        .iter()
        .map(|v| {
            let (r, c) = (v.rotation(), v.center());
            let rows: Vec<Value> = (0..3)
                .map(|i| json!([r[(i, 0)], r[(i, 1)], r[(i, 2)], c[i]]))
                .chain([json!([0.0, 0.0, 0.0, 1.0])])
                .collect();
            json!({ "file_path": v.id(), "transform_matrix": rows })
        })
        .collect();
    let doc = json!({
        "camera_angle_x": k.fov_x(),
        "fl_x": k.fx,
        "fl_y": k.fy,
        "cx": k.cx,
        "cy": k.cy,
        "w": k.width,
        "h": k.height,
        "frames": frames,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

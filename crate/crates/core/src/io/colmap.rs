//! COLMAP sparse models in text form (`cameras.txt`, `images.txt`,
//! `points3D.txt`).
//!
//! COLMAP stores world-to-camera poses in the OpenCV camera frame (+y down,
//! +z forward). They are inverted and flipped to the camera-to-world,
//! −z-forward convention used everywhere else. View ids are image names.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Quaternion, Rotation3, UnitQuaternion};

use crate::error::{Error, Result};
use crate::scene::{CameraView, CovisibilityMatrix, Intrinsics, Mat3, Vec3, ViewSet};

use super::read_text;
use super::transforms::checked_rotation;

/// OpenCV ↔ OpenGL camera axes.
fn flip() -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0))
}

/// Camera-to-world rotation and center from a COLMAP world-to-camera pose.
pub fn pose_from_colmap(q: [f64; 4], t: Vec3) -> (Mat3, Vec3) {
    let w2c = UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]));
    let r_w2c = w2c.to_rotation_matrix().into_inner();
    let r_c2w = r_w2c.transpose();
    (r_c2w * flip(), -(r_c2w * t))
}

/// Inverse of [`pose_from_colmap`]: quaternion `[w, x, y, z]` and translation.
pub fn pose_to_colmap(rotation: &Mat3, center: &Vec3) -> ([f64; 4], Vec3) {
    let r_w2c = (rotation * flip()).transpose();
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(r_w2c));
    let t = -(r_w2c * center);
    ([q.w, q.i, q.j, q.k], t)
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(tok: Option<&str>, what: &str, path: &Path, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(path, line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(path, line, format!("invalid {what} `{tok}`")))
}

fn read_cameras(path: &Path) -> Result<HashMap<u64, Intrinsics>> {
    let text = read_text(path)?;
    let mut out = HashMap::new();
    for (n, line) in data_lines(&text) {
        let mut tok = line.split_whitespace();
        let id: u64 = field(tok.next(), "camera id", path, n)?;
        let model: String = field(tok.next(), "camera model", path, n)?;
        let width: u32 = field(tok.next(), "width", path, n)?;
        let height: u32 = field(tok.next(), "height", path, n)?;
        let params: Vec<f64> = tok
            .map(|t| field(Some(t), "parameter", path, n))
            .collect::<Result<_>>()?;
        let (fx, fy, cx, cy) = match model.as_str() {
            "SIMPLE_PINHOLE" | "SIMPLE_RADIAL" | "RADIAL" | "SIMPLE_RADIAL_FISHEYE" | "RADIAL_FISHEYE"
                if params.len() >= 3 =>
            {
                (params[0], params[0], params[1], params[2])
            }
            "PINHOLE" | "OPENCV" | "FULL_OPENCV" | "OPENCV_FISHEYE" | "FOV" | "THIN_PRISM_FISHEYE"
                if params.len() >= 4 =>
            {
                (params[0], params[1], params[2], params[3])
            }
            _ => {
                return Err(Error::parse(
                    path,
                    n,
                    format!("unsupported camera model {model} with {} parameters", params.len()),
                ))
            }
        };
        out.insert(
            id,
            Intrinsics {
                fx,
                fy,
                cx,
                cy,
                width,
                height,
            },
        );
    }
    Ok(out)
}

/// Reads poses and the co-visibility matrix. `cameras.txt` is optional;
/// without it views carry no intrinsics.
pub fn read_colmap_text(dir: impl AsRef<Path>) -> Result<(ViewSet, CovisibilityMatrix)> {
    let dir = dir.as_ref();
    let cameras_path = dir.join("cameras.txt");
    let cameras = if cameras_path.exists() {
        Some(read_cameras(&cameras_path)?)
    } else {
        None
    };

    let images_path = dir.join("images.txt");
    let text = read_text(&images_path)?;
    // Image records span two lines; the second (2D points) may be empty, so
    // only comments are skipped here.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'))
        .collect();
    let mut views = Vec::new();
    let mut image_index: HashMap<u64, usize> = HashMap::new();
    let mut i = 0;
    while i < lines.len() {
        let (n, line) = lines[i];
        if line.is_empty() {
            i += 1;
            continue;
        }
        let mut tok = line.split_whitespace();
        let image_id: u64 = field(tok.next(), "image id", &images_path, n)?;
        let mut q = [0.0; 4];
        for (k, name) in ["qw", "qx", "qy", "qz"].iter().enumerate() {
            q[k] = field(tok.next(), name, &images_path, n)?;
        }
        let mut t = Vec3::zeros();
        for (k, name) in ["tx", "ty", "tz"].iter().enumerate() {
            t[k] = field(tok.next(), name, &images_path, n)?;
        }
        let camera_id: u64 = field(tok.next(), "camera id", &images_path, n)?;
        let name: String = field(tok.next(), "image name", &images_path, n)?;
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::parse(&images_path, n, "zero quaternion"));
        }
        let (rotation, center) = pose_from_colmap(q, t);
        let rotation = checked_rotation(rotation, &name)?;
        let intrinsics = match &cameras {
            None => None,
            Some(map) => Some(
                *map.get(&camera_id)
                    .ok_or_else(|| Error::parse(&images_path, n, format!("unknown camera id {camera_id}")))?,
            ),
        };
        if image_index.insert(image_id, views.len()).is_some() {
            return Err(Error::parse(&images_path, n, format!("duplicate image id {image_id}")));
        }
        views.push(CameraView::new(name.clone(), center, rotation, intrinsics)?.with_image_path(name));
        i += 2;
    }
    let set = ViewSet::new(views)?;

    let points_path = dir.join("points3D.txt");
    let text = read_text(&points_path)?;
    let mut covis = CovisibilityMatrix::zeros(set.views().iter().map(|v| v.id().to_string()).collect())?;
    for (n, line) in data_lines(&text) {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < 8 || !(tok.len() - 8).is_multiple_of(2) {
            return Err(Error::parse(
                &points_path,
                n,
                "expected id, xyz, rgb, error and (image, point2d) pairs",
            ));
        }
        let mut track = BTreeSet::new();
        for pair in tok[8..].chunks(2) {
            let image_id: u64 = field(Some(pair[0]), "track image id", &points_path, n)?;
            let idx = image_index
                .get(&image_id)
                .ok_or_else(|| Error::parse(&points_path, n, format!("track references unknown image {image_id}")))?;
            track.insert(*idx);
        }
        let track: Vec<usize> = track.into_iter().collect();
        for (a, &i) in track.iter().enumerate() {
            for &j in &track[a + 1..] {
                covis.bump(i, j, 1);
            }
        }
    }
    if !covis.is_symmetric() {
        return Err(Error::Parse {
            path: points_path,
            line: 0,
            message: "co-visibility is not symmetric".into(),
        });
    }
    Ok((set, covis))
}

/// Writes a text model that [`read_colmap_text`] reads back to the same
/// poses and co-visibility. Each co-visible pair becomes `A_ij` two-view
/// tracks at the origin.
pub fn write_colmap_text(dir: impl AsRef<Path>, set: &ViewSet, covis: &CovisibilityMatrix) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let with_k = set.views().iter().filter(|v| v.intrinsics().is_some()).count();
    if with_k != 0 && with_k != set.len() {
        return Err(Error::InvalidConfig(
            "either all or no views must carry intrinsics".into(),
        ));
    }
    if with_k > 0 {
        let mut cams = String::from("# CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]\n");
        for (i, v) in set.views().iter().enumerate() {
            let k = v.intrinsics().expect("checked");
            writeln!(
                cams,
                "{} PINHOLE {} {} {:?} {:?} {:?} {:?}",
                i + 1,
                k.width,
                k.height,
                k.fx,
                k.fy,
                k.cx,
                k.cy
            )
            .expect("string write");
        }
        std::fs::write(dir.join("cameras.txt"), cams)?;
    }
    let mut images =
        String::from("# IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n# POINTS2D[] as (X, Y, POINT3D_ID)\n");
    for (i, v) in set.views().iter().enumerate() {
        if v.id().contains(char::is_whitespace) {
            return Err(Error::InvalidConfig(format!(
                "image name `{}` contains whitespace",
                v.id()
            )));
        }
        let (q, t) = pose_to_colmap(v.rotation(), v.center());
        writeln!(
            images,
            "{} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {} {}\n",
            i + 1,
            q[0],
            q[1],
            q[2],
            q[3],
            t.x,
            t.y,
            t.z,
            i + 1,
            v.id()
        )
        .expect("string write");
    }
    std::fs::write(dir.join("images.txt"), images)?;

    let mut points = String::from("# POINT3D_ID X Y Z R G B ERROR TRACK[] as (IMAGE_ID, POINT2D_IDX)\n");
    let mut next = 1;
    for (i, a) in set.views().iter().enumerate() {
        for (j, b) in set.views().iter().enumerate().skip(i + 1) {
            let count = covis.count(a.id(), b.id())?;
            for _ in 0..count {
                writeln!(points, "{next} 0 0 0 0 0 0 0 {} 0 {} 0", i + 1, j + 1).expect("string write");
                next += 1;
            }
        }
    }
    std::fs::write(dir.join("points3D.txt"), points)?;
    Ok(())
}

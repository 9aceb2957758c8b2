//! Core domain types: posed cameras, view sets with selection state,
//! surface samples, co-visibility counts and quality reports.
//!
//! Cameras follow the camera-to-world convention with the optical axis
//! along −z and +y up (the NeRF synthetic layout). Readers for other
//! conventions convert at ingestion.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, EvaluatorError, Result};
use crate::geometry::orthonormality_error;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Tolerance on `‖RᵀR − I‖∞` for a valid camera rotation.
pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Intrinsics {
    /// Centered principal point, square pixels.
    pub fn from_fov_x(width: u32, height: u32, fov_x: f64) -> Self {
        let fx = width as f64 / (2.0 * (fov_x / 2.0).tan());
        Intrinsics {
            fx,
            fy: fx,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
        }
    }

    pub fn fov_x(&self) -> f64 {
        2.0 * (self.width as f64 / (2.0 * self.fx)).atan()
    }

    fn check(&self) -> std::result::Result<(), String> {
        if !(self.fx > 0.0 && self.fy > 0.0 && self.fx.is_finite() && self.fy.is_finite()) {
            return Err(format!(
                "focal lengths must be positive (fx={}, fy={})",
                self.fx, self.fy
            ));
        }
        if !(self.cx > 0.0 && self.cx < self.width as f64) {
            return Err(format!("cx={} outside (0, {})", self.cx, self.width));
        }
        if !(self.cy > 0.0 && self.cy < self.height as f64) {
            return Err(format!("cy={} outside (0, {})", self.cy, self.height));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCameraView", into = "RawCameraView")]
pub struct CameraView {
    id: String,
    center: Vec3,
    rotation: Mat3,
    intrinsics: Option<Intrinsics>,
    image_path: Option<String>,
}

/// Serialized layout of a camera; rotation rows are stored row-major.
#[derive(Serialize, Deserialize)]
struct RawCameraView {
    id: String,
    center: [f64; 3],
    rotation: [[f64; 3]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    intrinsics: Option<Intrinsics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    image_path: Option<String>,
}

impl TryFrom<RawCameraView> for CameraView {
    type Error = Error;

    fn try_from(raw: RawCameraView) -> Result<Self> {
        let r = raw.rotation;
        let rotation = Mat3::new(
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
        );
        let mut view = CameraView::new(raw.id, Vec3::from(raw.center), rotation, raw.intrinsics)?;
        view.image_path = raw.image_path;
        Ok(view)
    }
}

impl From<CameraView> for RawCameraView {
    fn from(v: CameraView) -> Self {
        let r = &v.rotation;
        RawCameraView {
            id: v.id,
            center: [v.center.x, v.center.y, v.center.z],
            rotation: [
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ],
            intrinsics: v.intrinsics,
            image_path: v.image_path,
        }
    }
}

impl CameraView {
    pub fn new(id: impl Into<String>, center: Vec3, rotation: Mat3, intrinsics: Option<Intrinsics>) -> Result<Self> {
        let id = id.into();
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidConfig(format!("camera `{id}` has a non-finite center")));
        }
        let deviation = orthonormality_error(&rotation);
        if !(deviation < ROTATION_TOLERANCE) {
            return Err(Error::NonOrthonormalRotation { id, deviation });
        }
        if let Some(k) = &intrinsics {
            if let Err(reason) = k.check() {
                return Err(Error::InvalidIntrinsics { id, reason });
            }
        }
        Ok(CameraView {
            id,
            center,
            rotation,
            intrinsics,
            image_path: None,
        })
    }

    pub fn with_image_path(mut self, path: impl Into<String>) -> Self {
        self.image_path = Some(path.into());
        self
    }

    /// Same camera moved to `center`.
    pub fn with_center(&self, center: Vec3) -> Self {
        CameraView { center, ..self.clone() }
    }

    /// Applies the rigid motion `x ↦ rot·x + shift` to the camera.
    pub fn transformed(&self, rot: &Mat3, shift: &Vec3) -> Result<Self> {
        let mut out = CameraView::new(
            self.id.clone(),
            rot * self.center + shift,
            rot * self.rotation,
            self.intrinsics,
        )?;
        out.image_path = self.image_path.clone();
        Ok(out)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn center(&self) -> &Vec3 {
        &self.center
    }

    /// Camera-to-world rotation.
    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn intrinsics(&self) -> Option<&Intrinsics> {
        self.intrinsics.as_ref()
    }

    pub fn image_path(&self) -> Option<&str> {
        self.image_path.as_deref()
    }

    /// World-space optical axis (−z of the camera frame).
    pub fn forward(&self) -> Vec3 {
        -self.rotation.column(2).into_owned()
    }

    /// World-space unit direction through pixel coordinates `(u, v)`
    /// (`u` along the width, origin at the top-left corner).
    pub fn pixel_direction(&self, k: &Intrinsics, u: f64, v: f64) -> Vec3 {
        let d = Vec3::new((u - k.cx) / k.fx, -(v - k.cy) / k.fy, -1.0);
        (self.rotation * d).normalize()
    }
}

/// An ordered pool of cameras plus the ordered selection `S`.
///
/// Values are immutable; selection changes produce new sets.
#[derive(Debug, Clone)]
pub struct ViewSet {
    views: Vec<CameraView>,
    index: HashMap<String, usize>,
    /// Rank of each view's id in lexicographic order, for tie-breaking.
    lex_rank: Vec<usize>,
    selected: Vec<usize>,
    selected_mask: Vec<bool>,
}

impl PartialEq for ViewSet {
    fn eq(&self, other: &Self) -> bool {
        self.views == other.views && self.selected == other.selected
    }
}

#[derive(Serialize, Deserialize)]
struct RawViewSet {
    v: u64,
    views: Vec<CameraView>,
    selected: Vec<String>,
}

impl ViewSet {
    /// Builds a pool with an empty selection.
    pub fn new(views: Vec<CameraView>) -> Result<Self> {
        if views.len() < 2 {
            return Err(Error::TooFewViews(views.len()));
        }
        let mut index = HashMap::with_capacity(views.len());
        for (i, v) in views.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.id.clone()));
            }
        }
        let mut order: Vec<usize> = (0..views.len()).collect();
        order.sort_by(|&a, &b| views[a].id.cmp(&views[b].id));
        let mut lex_rank = vec![0; views.len()];
        for (rank, &i) in order.iter().enumerate() {
            lex_rank[i] = rank;
        }
        let n = views.len();
        Ok(ViewSet {
            views,
            index,
            lex_rank,
            selected: Vec::new(),
            selected_mask: vec![false; n],
        })
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn views(&self) -> &[CameraView] {
        &self.views
    }

    pub fn view(&self, idx: usize) -> &CameraView {
        &self.views[idx]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownView(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Option<&CameraView> {
        self.index.get(id).map(|&i| &self.views[i])
    }

    pub fn lex_rank(&self, idx: usize) -> usize {
        self.lex_rank[idx]
    }

    pub fn centers(&self) -> Vec<Vec3> {
        self.views.iter().map(|v| v.center).collect()
    }

    /// Selected view indices, in selection order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn selected_ids(&self) -> Vec<&str> {
        self.selected.iter().map(|&i| self.views[i].id.as_str()).collect()
    }

    pub fn is_selected(&self, idx: usize) -> bool {
        self.selected_mask[idx]
    }

    /// Unselected view indices, in pool order.
    pub fn candidates(&self) -> Vec<usize> {
        (0..self.views.len()).filter(|&i| !self.selected_mask[i]).collect()
    }

    pub fn candidate_ids(&self) -> Vec<&str> {
        self.candidates()
            .into_iter()
            .map(|i| self.views[i].id.as_str())
            .collect()
    }

    /// New set with `indices` appended to the selection.
    pub fn with_selected(&self, indices: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &i in indices {
            let view = self.views.get(i).ok_or_else(|| Error::UnknownView(format!("#{i}")))?;
            if out.selected_mask[i] {
                return Err(Error::DuplicateId(view.id.clone()));
            }
            out.selected_mask[i] = true;
            out.selected.push(i);
        }
        Ok(out)
    }

    pub fn with_selected_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let indices = ids
            .iter()
            .map(|id| self.index_of(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.with_selected(&indices)
    }

    /// Same pool with an empty selection.
    pub fn cleared(&self) -> Self {
        let mut out = self.clone();
        out.selected.clear();
        out.selected_mask.iter_mut().for_each(|m| *m = false);
        out
    }

    /// Recentres every camera on `origin` and scales its center to unit
    /// distance; orientation and intrinsics are kept.
    pub fn project_to_unit_sphere(&self, origin: &Vec3) -> Result<Self> {
        let mut out = self.clone();
        for view in &mut out.views {
            let offset = view.center - origin;
            let dist = offset.norm();
            if !(dist > 1e-9) {
                return Err(Error::DegenerateCenter(view.id.clone()));
            }
            view.center = offset / dist;
        }
        Ok(out)
    }

    /// Whether every center lies on the unit sphere within `tol`.
    pub fn on_unit_sphere(&self, tol: f64) -> bool {
        self.views.iter().all(|v| (v.center.norm() - 1.0).abs() <= tol)
    }

    /// Sub-pool of the given indices (selection dropped).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        ViewSet::new(indices.iter().map(|&i| self.views[i].clone()).collect())
    }

    /// Canonical JSON encoding; floats use the shortest representation that
    /// parses back to the same bits.
    pub fn to_json(&self) -> Result<String> {
        let raw = RawViewSet {
            v: 1,
            views: self.views.clone(),
            selected: self.selected_ids().into_iter().map(String::from).collect(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawViewSet = serde_json::from_str(text)?;
        if raw.v != 1 {
            return Err(Error::SchemaVersionMismatch {
                found: raw.v,
                expected: 1,
            });
        }
        ViewSet::new(raw.views)?.with_selected_ids(&raw.selected)
    }
}

/// Symmetric counts of co-triangulated sparse points between view pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CovisibilityMatrix {
    ids: Vec<String>,
    view_index: HashMap<String, usize>,
    counts: Vec<u64>,
}

impl CovisibilityMatrix {
    /// `counts` is row-major `n × n`.
    pub fn new(ids: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        let n = ids.len();
        if counts.len() != n * n {
            return Err(Error::InvalidConfig(format!(
                "co-visibility matrix needs {} entries, got {}",
                n * n,
                counts.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if counts[i * n + j] != counts[j * n + i] {
                    return Err(Error::AsymmetricCovisibility(i, j));
                }
            }
        }
        let mut view_index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if view_index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(CovisibilityMatrix {
            ids,
            view_index,
            counts,
        })
    }

    pub fn zeros(ids: Vec<String>) -> Result<Self> {
        let n = ids.len();
        Self::new(ids, vec![0; n * n])
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.view_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownView(id.to_string()))
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.ids.len() + j]
    }

    pub fn count(&self, a: &str, b: &str) -> Result<u64> {
        Ok(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    /// Adds `by` to both `(i, j)` and `(j, i)`.
    pub(crate) fn bump(&mut self, i: usize, j: usize, by: u64) {
        let n = self.ids.len();
        self.counts[i * n + j] += by;
        if i != j {
            self.counts[j * n + i] += by;
        }
    }

    /// Largest off-diagonal count.
    pub fn max_off_diagonal(&self) -> u64 {
        let n = self.ids.len();
        let mut best = 0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    best = best.max(self.counts[i * n + j]);
                }
            }
        }
        best
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.ids.len();
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Uniform point cloud on a mesh surface together with the ball radius used
/// by the coverage measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSamples {
    pub(crate) points: Vec<Vec3>,
    pub(crate) triangles: Vec<u32>,
    pub(crate) radius: f64,
    pub(crate) seed: u64,
}

impl SurfaceSamples {
    /// Samples restored from storage; `triangles` may be empty when unknown.
    pub fn from_parts(points: Vec<Vec3>, triangles: Vec<u32>, radius: f64, seed: u64) -> Result<Self> {
        if !triangles.is_empty() && triangles.len() != points.len() {
            return Err(Error::InvalidConfig("one triangle id per sample point expected".into()));
        }
        SurfaceSamples {
            points,
            triangles,
            radius: 1.0,
            seed,
        }
        .with_radius(radius)
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Triangle each point was drawn from.
    pub fn triangles(&self) -> &[u32] {
        &self.triangles
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Quadrature weight of each sample, `1/M`.
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len().max(1) as f64
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(SurfaceSamples { radius, ..self.clone() })
    }

    /// Applies `x ↦ rot·x + shift` to every point.
    pub fn transformed(&self, rot: &Mat3, shift: &Vec3) -> Self {
        SurfaceSamples {
            points: self.points.iter().map(|p| rot * p + shift).collect(),
            ..self.clone()
        }
    }

    /// Whether two sample sets are the same discretization (seed, count, radius).
    pub fn same_identity(&self, other: &Self) -> bool {
        self.seed == other.seed && self.points.len() == other.points.len() && self.radius == other.radius
    }
}

/// Per-view quality `m_i`, higher is better.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub scores: BTreeMap<String, f64>,
}

impl QualityReport {
    pub fn new(scores: BTreeMap<String, f64>) -> Self {
        QualityReport { scores }
    }

    pub fn score(&self, id: &str) -> Option<f64> {
        self.scores.get(id).copied()
    }

    /// Checks that every id in `ids` has one finite score.
    pub fn validate_for<S: AsRef<str>>(&self, ids: &[S]) -> Result<(), EvaluatorError> {
        for id in ids {
            let id = id.as_ref();
            match self.scores.get(id) {
                None => return Err(EvaluatorError::IncompleteScores(id.to_string())),
                Some(s) if !s.is_finite() => return Err(EvaluatorError::NonFiniteScore(id.to_string())),
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Scores for `ids` in that order; assumes [`Self::validate_for`] passed.
    pub fn scores_for<S: AsRef<str>>(&self, ids: &[S]) -> Vec<f64> {
        ids.iter().map(|id| self.scores[id.as_ref()]).collect()
    }
}

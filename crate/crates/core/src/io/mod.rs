//! Reading and writing datasets, selections and results.

pub mod colmap;
pub mod field;
pub mod manifest;
pub mod mesh_io;
pub mod runlog;
pub mod transforms;

use std::path::Path;

use crate::error::{Error, Result};

pub use colmap::{read_colmap_text, write_colmap_text};
pub use field::{read_field, vertex_values, write_coverage_ply, write_field, FieldFile};
pub use manifest::{read_manifest, write_manifest, ManifestEntry, SelectionManifest};
pub use mesh_io::{read_obj, write_ply};
pub use runlog::{read_run_log, write_run_log};
pub use transforms::{read_transforms, write_transforms};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingFile(path.to_path_buf())),
        Err(e) => Err(e.into()),
    }
}

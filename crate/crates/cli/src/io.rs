//! OFF files on disk.

use std::fs;
use std::path::Path;

use capacitary_core::geometry::{format_off, parse_off, TriMesh};
use capacitary_core::Error as CoreError;

use crate::error::CliError;

/// Reads and parses an OFF file. Unreadable or malformed files are
/// [`CliError::Unreadable`]; degenerate panels are validation failures.
pub fn load_off(path: &Path) -> Result<TriMesh, CliError> {
    let unreadable = |message: String| CliError::Unreadable {
        path: path.display().to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| unreadable(e.to_string()))?;
    parse_off(&text).map_err(|e| match e {
        CoreError::Parse { .. } => unreadable(e.to_string()),
        other => CliError::from_core(other),
    })
}

pub fn save_off(mesh: &TriMesh, path: &Path) -> Result<(), CliError> {
    write_text(path, &format_off(mesh))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use capacitary_core::geometry::make_sphere_mesh;

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.off");
        let m = make_sphere_mesh(1.5, 2).unwrap();
        save_off(&m, &p).unwrap();
        let back = load_off(&p).unwrap();
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.vertices(), m.vertices());
        let missing = load_off(&dir.path().join("none.off")).unwrap_err();
        assert_eq!(missing.exit_code(), 4);
        std::fs::write(&p, "OFF\n1 1 0\n0 0 0\n4 0 0 0 0\n").unwrap();
        let e = load_off(&p).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("line 4"));
    }
}

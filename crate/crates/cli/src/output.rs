//! Atomic artifact output: bytes land in a temporary sibling file first and
//! are renamed into place.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

/// Writes `contents` to `path`, creating parent directories as needed.
///
/// The write goes to a `.tmp` sibling which is then renamed over `path`, so
/// an interrupted run never leaves a half-written artifact and a concurrent
/// reader sees either the previous file or the new one, never a mixture.
///
/// # Errors
/// Any I/O failure, with the offending path in the message.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(parent)
        .with_context(|| format!("creating output directory {}", parent.display()))?;
    let file_name = path
        .file_name()
        .ok_or_else(|| anyhow!("output path {} has no file name", path.display()))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("moving {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_the_contents_and_creates_missing_directories() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/deeper/result.csv");
        write_atomic(&path, "a,b\n1,2\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
    }

    #[test]
    fn overwrites_an_existing_file_and_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("result.csv");
        write_atomic(&path, "old\n").unwrap();
        write_atomic(&path, "new\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "new\n");

        let names: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(names, vec!["result.csv".to_string()]);
    }

    #[test]
    fn reports_the_path_when_the_target_is_not_writable() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("occupied");
        fs::write(&blocker, "file, not a directory").unwrap();
        let err = write_atomic(&blocker.join("result.csv"), "x")
            .unwrap_err()
            .to_string();
        assert!(err.contains("occupied"), "{err}");
    }
}

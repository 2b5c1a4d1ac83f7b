//! All-or-nothing output writing: every file goes to a temporary name first
//! and is renamed only once all of them were written.

use crate::CliError;
use std::fs;
use std::path::{Path, PathBuf};

pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, contents) in files {
        let dest = dir.join(name);
        let tmp = dir.join(format!(".{name}.partial-{}", std::process::id()));
        if let Err(e) = fs::write(&tmp, contents) {
            let _ = fs::remove_file(&tmp);
            cleanup(&staged);
            return Err(CliError::Io(format!("{}: {e}", tmp.display())));
        }
        staged.push((tmp, dest));
    }
    for (tmp, dest) in &staged {
        fs::rename(tmp, dest).map_err(|e| CliError::Io(format!("{}: {e}", dest.display())))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_every_file_and_leaves_no_temporaries() {
        let root = tempfile::tempdir().unwrap();
        let d = root.path().join("nested");
        write_all(&d, &[("a.txt".into(), "1".into()), ("b.txt".into(), "2".into())]).unwrap();
        let mut names: Vec<String> =
            fs::read_dir(&d).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        names.sort();
        assert_eq!(names, vec!["a.txt", "b.txt"]);
    }
}

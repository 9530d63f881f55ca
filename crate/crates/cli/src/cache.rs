//! Append-only `runs.jsonl` store guarded by an advisory file lock.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::emit::to_json;
use crate::record::{RunKey, RunRecord};

pub const DATA_DIR_ENV: &str = "BANACH_DATA_DIR";
pub const DEFAULT_DATA_DIR: &str = ".banach-cache";
pub const FILE_NAME: &str = "runs.jsonl";

pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { path: dir.join(FILE_NAME) })
    }

    /// Directory from `BANACH_DATA_DIR`, else `./.banach-cache`.
    pub fn from_env() -> io::Result<Self> {
        let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
        Self::open(&dir)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Most recent record with this key. Lines that fail to parse are
    /// skipped with a warning.
    pub fn lookup(&self, key: &RunKey) -> io::Result<Option<RunRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        file.lock_shared()?;
        let mut found = None;
        for (n, line) in BufReader::new(&file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<RunRecord>(&line) {
                Ok(r) if r.key() == *key => found = Some(r),
                Ok(_) => {}
                Err(e) => log::warn!("{}:{}: skipping unreadable record: {e}", self.path.display(), n + 1),
            }
        }
        file.unlock()?;
        Ok(found)
    }

    /// Appends one line under an exclusive lock so concurrent writers never
    /// interleave.
    pub fn append(&self, record: &RunRecord) -> io::Result<()> {
        let mut line = to_json(record).map_err(io::Error::other)?;
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.lock()?;
        let res = file.write_all(line.as_bytes()).and_then(|_| file.flush());
        file.unlock()?;
        res
    }
}

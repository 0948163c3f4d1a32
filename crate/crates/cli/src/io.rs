use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Failure classes mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Compute(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<aperiodic::Error> for Failure {
    fn from(e: aperiodic::Error) -> Self {
        // the budget is a precondition on the arguments
        if e.is_validation() || matches!(e, aperiodic::Error::BudgetExceeded(_)) {
            Failure::Validation(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(format!("i/o: {e}"))
    }
}

pub fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

/// Files written by one job, in order.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new() })
    }

    /// Write via a temporary sibling and rename, so readers never see a
    /// partial file.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn manifest<P: Serialize>(
        &mut self,
        command: &str,
        params: &P,
        seed: Option<u64>,
        summary: serde_json::Value,
    ) -> Result<(), Failure> {
        let m = serde_json::json!({
            "command": command,
            "parameters": params,
            "seed": seed,
            "summary": summary,
            "outputs": self.written,
            "versions": {
                "aperiodic": aperiodic::VERSION,
                "aperiodic-cli": env!("CARGO_PKG_VERSION"),
            },
        });
        let text = serde_json::to_string_pretty(&m).map_err(|e| Failure::Compute(e.to_string()))? + "\n";
        self.write("manifest.json", &text)
    }
}

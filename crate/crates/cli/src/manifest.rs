//! Run manifests: enough to regenerate an output byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::jobs::{Format, Job};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub job: Job,
    pub master_seed: Option<u64>,
    pub format: Format,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(job: Job, master_seed: Option<u64>, format: Format, output: &Path) -> Self {
        RunManifest {
            tool: "latic".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            job,
            master_seed,
            format,
            outputs: vec![output.display().to_string()],
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("malformed manifest {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jobs::DofCurve;

    #[test]
    fn round_trip_keeps_command_name_at_top_level() {
        let m = RunManifest::new(
            Job::DofCurve(DofCurve {
                a2_min: 0.01,
                a2_max: 100.0,
                steps: 5,
                log_axis: true,
            }),
            Some(7),
            Format::Csv,
            Path::new("out/curve.csv"),
        );
        let text = m.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "dof-curve");
        assert_eq!(v["params"]["steps"], 5);
        assert_eq!(serde_json::from_str::<RunManifest>(&text).unwrap(), m);
        assert_eq!(manifest_path(Path::new("a/b.csv")), PathBuf::from("a/b.csv.manifest.json"));
    }
}

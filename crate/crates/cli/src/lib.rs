//! Config-driven experiment runner: one JSON config per example, reports
//! as `summary.json`, `widths.csv` and `lipschitz.csv`.

pub mod config;
pub mod runner;

pub use config::{validate_config, validate_config_str, ConfigErrors, ConfigIssue, ExperimentConfig};
pub use runner::{report_table1, run, table1_csv, Check, RunBundle, RunError, RunOptions, RunSummary, Table1Row};

/// Caps the global rayon pool at `WIDTHLAB_THREADS` when set.
pub fn init_threads() -> Result<(), String> {
    match std::env::var("WIDTHLAB_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| format!("WIDTHLAB_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("WIDTHLAB_THREADS must be positive".into());
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}

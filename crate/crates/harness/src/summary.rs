//! Per-seed summaries and cross-arm comparison.
//!
//! A summary file is one `key=value` pair per line, in this order:
//!
//! ```text
//! algorithm=PHPIP
//! seed=7
//! horizon=700
//! rows=699
//! final_phi=0.5823...
//! optimum=0.6011...
//! optimum_method=exact
//! success=true
//! optimal_fraction=0.41
//! tracking_median=0.93        # only for time-varying densities
//! checkpoint.100=0.38
//! checkpoint.200=0.52
//! wall_clock_ms=12.5
//! ```
//!
//! Blank lines and lines starting with `#` are ignored when reading.

use std::fmt::{self, Write as _};
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Fraction of the optimum a final potential must reach to count as a success.
pub const SUCCESS_FRACTION: f64 = 0.95;

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSummary {
    pub algorithm: String,
    pub seed: u64,
    pub horizon: u64,
    pub rows: usize,
    pub final_phi: f64,
    pub optimum: f64,
    pub optimum_method: String,
    pub success: bool,
    pub optimal_fraction: f64,
    pub tracking_median: Option<f64>,
    pub checkpoints: Vec<(u64, f64)>,
    pub wall_clock_ms: f64,
}

impl SeedSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "algorithm={}", self.algorithm);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "horizon={}", self.horizon);
        let _ = writeln!(s, "rows={}", self.rows);
        let _ = writeln!(s, "final_phi={}", self.final_phi);
        let _ = writeln!(s, "optimum={}", self.optimum);
        let _ = writeln!(s, "optimum_method={}", self.optimum_method);
        let _ = writeln!(s, "success={}", self.success);
        let _ = writeln!(s, "optimal_fraction={}", self.optimal_fraction);
        if let Some(m) = self.tracking_median {
            let _ = writeln!(s, "tracking_median={m}");
        }
        for (t, phi) in &self.checkpoints {
            let _ = writeln!(s, "checkpoint.{t}={phi}");
        }
        let _ = writeln!(s, "wall_clock_ms={}", self.wall_clock_ms);
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| HarnessError::Summary {
            path: path.to_path_buf(),
            reason,
        };
        let mut fields = std::collections::HashMap::new();
        let mut checkpoints = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("no '=' in {line:?}")))?;
            if let Some(t) = key.strip_prefix("checkpoint.") {
                let t = t
                    .parse()
                    .map_err(|e| bad(format!("checkpoint time {t:?}: {e}")))?;
                let v = value
                    .parse()
                    .map_err(|e| bad(format!("checkpoint value {value:?}: {e}")))?;
                checkpoints.push((t, v));
            } else if fields.insert(key.to_string(), value.to_string()).is_some() {
                return Err(bad(format!("duplicate key {key}")));
            }
        }
        fn take<T: std::str::FromStr>(
            fields: &std::collections::HashMap<String, String>,
            key: &str,
        ) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            let raw = fields.get(key).ok_or_else(|| format!("missing {key}"))?;
            raw.parse().map_err(|e| format!("{key}={raw}: {e}"))
        }
        let tracking_median = match fields.get("tracking_median") {
            Some(_) => Some(take(&fields, "tracking_median").map_err(bad)?),
            None => None,
        };
        Ok(SeedSummary {
            algorithm: take(&fields, "algorithm").map_err(bad)?,
            seed: take(&fields, "seed").map_err(bad)?,
            horizon: take(&fields, "horizon").map_err(bad)?,
            rows: take(&fields, "rows").map_err(bad)?,
            final_phi: take(&fields, "final_phi").map_err(bad)?,
            optimum: take(&fields, "optimum").map_err(bad)?,
            optimum_method: take(&fields, "optimum_method").map_err(bad)?,
            success: take(&fields, "success").map_err(bad)?,
            optimal_fraction: take(&fields, "optimal_fraction").map_err(bad)?,
            tracking_median,
            checkpoints,
            wall_clock_ms: take(&fields, "wall_clock_ms").map_err(bad)?,
        })
    }
}

/// Linear-interpolation quantile of sorted data (`q ∈ [0, 1]`).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Median of arbitrary data; `None` when empty.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(quantile(&v, 0.5))
}

/// One algorithm's results.
#[derive(Clone, Debug)]
pub struct Arm {
    pub config: ExperimentConfig,
    pub summaries: Vec<SeedSummary>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmStats {
    pub algorithm: String,
    pub seeds: usize,
    pub median_final: f64,
    pub q1_final: f64,
    pub q3_final: f64,
    pub success_rate: f64,
    pub median_optimal_fraction: f64,
    /// Median over seeds of each seed's median tracking ratio.
    pub median_tracking: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub arms: Vec<ArmStats>,
}

impl Comparison {
    pub fn arm(&self, algorithm: &str) -> Option<&ArmStats> {
        self.arms
            .iter()
            .find(|a| a.algorithm.eq_ignore_ascii_case(algorithm))
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<8} {:>6} {:>12} {:>12} {:>12} {:>9} {:>9} {:>9}",
            "arm", "seeds", "median_phi", "q1", "q3", "success", "optimal", "tracking"
        )?;
        for a in &self.arms {
            let tracking = a
                .median_tracking
                .map_or("-".to_string(), |m| format!("{m:.4}"));
            writeln!(
                f,
                "{:<8} {:>6} {:>12.6} {:>12.6} {:>12.6} {:>9.3} {:>9.3} {:>9}",
                a.algorithm,
                a.seeds,
                a.median_final,
                a.q1_final,
                a.q3_final,
                a.success_rate,
                a.median_optimal_fraction,
                tracking
            )?;
        }
        Ok(())
    }
}

/// Medians, quartiles and success rates per arm. All arms must describe
/// the same world and run settings.
pub fn aggregate(arms: &[Arm]) -> Result<Comparison> {
    if arms.is_empty() {
        return Err(HarnessError::Aggregate("no arms".into()));
    }
    for arm in arms {
        if !arm.config.comparable(&arms[0].config) {
            return Err(HarnessError::Aggregate(format!(
                "arm {} was run with a different world or run settings than arm {}",
                arm.config.learning.algorithm, arms[0].config.learning.algorithm
            )));
        }
    }
    let stats = arms
        .iter()
        .map(|arm| {
            if arm.summaries.is_empty() {
                return Err(HarnessError::Aggregate(format!(
                    "arm {} has no seeds",
                    arm.config.learning.algorithm
                )));
            }
            let mut finals: Vec<f64> = arm.summaries.iter().map(|s| s.final_phi).collect();
            finals.sort_by(f64::total_cmp);
            let fractions: Vec<f64> = arm.summaries.iter().map(|s| s.optimal_fraction).collect();
            let tracking: Vec<f64> = arm
                .summaries
                .iter()
                .filter_map(|s| s.tracking_median)
                .collect();
            let successes = arm.summaries.iter().filter(|s| s.success).count();
            Ok(ArmStats {
                algorithm: arm.summaries[0].algorithm.clone(),
                seeds: arm.summaries.len(),
                median_final: quantile(&finals, 0.5),
                q1_final: quantile(&finals, 0.25),
                q3_final: quantile(&finals, 0.75),
                success_rate: successes as f64 / arm.summaries.len() as f64,
                median_optimal_fraction: median(&fractions).expect("nonempty arm"),
                median_tracking: median(&tracking),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Comparison { arms: stats })
}

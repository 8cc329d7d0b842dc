//! Chain-analysis certification of the built-in toy games.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use pipip_core::chain::{
    min_resistance_paths, optimal_mass, recurrent_classes_unperturbed, stationary_distribution,
    stochastic_potentials, write_resistance_graph, write_stationary,
};
use pipip_core::game::{check_assumption2, optimal_nash};
use pipip_core::toys;

use crate::error::{HarnessError, Result};

pub const CERTIFY_KAPPA: f64 = 0.5;
pub const CERTIFY_EPSILONS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];

#[derive(Clone, Debug)]
pub struct Check {
    pub game: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Certification {
    pub checks: Vec<Check>,
    /// Stationary mass on the optimal diagonal per game and `ε`.
    pub masses: Vec<(String, Vec<(f64, f64)>)>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{verdict} {:<16} {:<28} {}", c.game, c.name, c.detail)?;
        }
        for (game, masses) in &self.masses {
            let cells: Vec<String> = masses
                .iter()
                .map(|(e, m)| format!("eps={e}: {m:.4}"))
                .collect();
            writeln!(f, "mass {:<16} {}", game, cells.join(", "))?;
        }
        Ok(())
    }
}

/// Runs the suite; with `export`, also writes per-game resistance graphs
/// and stationary distributions at the smallest `ε` as CSV.
pub fn certify(export: Option<&Path>) -> Result<Certification> {
    if let Some(dir) = export {
        std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    }
    let mut out = Certification::default();
    for (name, game) in toys::certification_games() {
        let mut check = |check: &str, passed: bool, detail: String| {
            out.checks.push(Check {
                game: name.to_string(),
                name: check.to_string(),
                passed,
                detail,
            })
        };
        let a2 = check_assumption2(&game)?;
        check(
            "bounded deviations",
            a2.passed(),
            format!("largest change {:.4}", a2.max_deviation),
        );

        match recurrent_classes_unperturbed(&game) {
            Ok(classes) => check(
                "recurrent classes",
                true,
                format!("{} diagonal singletons", classes.len()),
            ),
            Err(e) => check("recurrent classes", false, e.to_string()),
        }

        let graph = min_resistance_paths(&game)?;
        let mut single = Vec::new();
        for l in 0..graph.len() {
            for k in 0..graph.len() {
                if graph.is_single(l, k) {
                    single.push(graph.weight(l, k));
                }
            }
        }
        let in_range = single.iter().all(|w| (1.0..2.0).contains(w));
        let (lo, hi) = single
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &w| {
                (a.min(w), b.max(w))
            });
        check(
            "single edges in [1, 2)",
            in_range,
            format!("{} edges, range [{lo}, {hi}]", single.len()),
        );

        let sp = stochastic_potentials(&game)?;
        let optimal = optimal_nash(&game)?;
        let stable = sp.stable();
        check(
            "stable states optimal",
            stable.iter().all(|a| optimal.contains(a)),
            format!(
                "stable {:?}, optimal {:?}",
                stable.iter().map(|a| a.indices()).collect::<Vec<_>>(),
                optimal.iter().map(|a| a.indices()).collect::<Vec<_>>()
            ),
        );

        let mut masses = Vec::new();
        let mut monotone = true;
        let mut worst_residual: f64 = 0.0;
        for eps in CERTIFY_EPSILONS {
            let dist = stationary_distribution(&game, eps, CERTIFY_KAPPA)?;
            worst_residual = worst_residual.max(dist.residual());
            let m = optimal_mass(&dist, &game)?;
            if masses.last().is_some_and(|&(_, prev)| m < prev) {
                monotone = false;
            }
            masses.push((eps, m));
            if let (Some(dir), true) = (export, eps == CERTIFY_EPSILONS[CERTIFY_EPSILONS.len() - 1])
            {
                let path = dir.join(format!("{name}-stationary.csv"));
                let f = File::create(&path).map_err(HarnessError::io(&path))?;
                write_stationary(&dist, &mut BufWriter::new(f)).map_err(HarnessError::io(&path))?;
            }
        }
        check(
            "monotone optimal mass",
            monotone,
            format!("max residual {worst_residual:.1e}"),
        );
        if let Some(dir) = export {
            let path = dir.join(format!("{name}-resistance.csv"));
            let f = File::create(&path).map_err(HarnessError::io(&path))?;
            write_resistance_graph(&graph, &mut BufWriter::new(f))
                .map_err(HarnessError::io(&path))?;
        }
        out.masses.push((name.to_string(), masses));
    }
    Ok(out)
}

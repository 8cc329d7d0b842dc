//! Acceptance criteria, shared by the acceptance report and the strict tests.
//!
//! Every check pairs the library result with a value computed here from
//! first principles.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pipip_core::chain::{
    min_resistance_paths, recurrent_classes_unperturbed, route_reversal_check, state_space,
    stationary_distribution, stochastic_potentials, straight_route_resistance,
    transition_probability, transition_resistance, ChainState,
};
use pipip_core::coverage::{
    build_coverage_game, CoverageGame, CoverageWorld, DensityField, GridSpec,
};
use pipip_core::game::verify_potential_identity;
use pipip_core::learning::{pipip_step, AgentMemory, Environment};
use pipip_core::{toys, ActionId, AgentId, GameDefinition, JointAction};
use pipip_harness::config::AlgorithmChoice;
use pipip_harness::presets;
use pipip_harness::run::{read_trace, run_experiment, OptimumTable, RunReport, TRACKING_START};
use pipip_harness::summary::{aggregate, median};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
    /// The parts of the criterion this implementation is expected to meet.
    /// Equal to `pass` except where a criterion is documented as unattainable.
    pub guard: Result<(), String>,
}

impl Outcome {
    fn strict(pass: bool, detail: String) -> Outcome {
        let guard = if pass { Ok(()) } else { Err(detail.clone()) };
        Outcome {
            pass,
            detail,
            guard,
        }
    }
}

/// Brute-force `max |ΔU_i - Δφ|` over every profile and every unilateral change.
fn identity_residual(game: &GameDefinition) -> f64 {
    let counts = game.action_counts();
    let total: usize = counts.iter().product();
    let mut worst: f64 = 0.0;
    for code in 0..total {
        let mut rest = code;
        let a = JointAction::from_indices(
            &counts
                .iter()
                .map(|&m| {
                    let x = rest % m;
                    rest /= m;
                    x
                })
                .collect::<Vec<_>>(),
        );
        let phi = game.potential(&a).unwrap();
        for (i, &m) in counts.iter().enumerate() {
            let agent = AgentId(i);
            let u = game.utility(agent, &a);
            for x in 0..m {
                let b = a.with(agent, ActionId(x));
                let du = game.utility(agent, &b) - u;
                let dphi = game.potential(&b).unwrap() - phi;
                worst = worst.max((du - dphi).abs());
            }
        }
    }
    worst
}

pub fn criterion1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut library: f64 = 0.0;
    for density in [
        DensityField::Uniform(1.0),
        DensityField::gaussian([0.45, 0.45]),
    ] {
        let world = CoverageWorld::new(GridSpec::with_size(3, 3).unwrap(), density).unwrap();
        let g = build_coverage_game(&world, 2).unwrap();
        worst = worst.max(identity_residual(g.game()));
        library = library.max(verify_potential_identity(g.game()).unwrap().max_deviation);
    }
    Outcome::strict(
        worst <= 1e-12 && library <= 1e-12,
        format!("max residual {worst:.2e} (library sweep {library:.2e})"),
    )
}

pub fn criterion2() -> Outcome {
    let (delta, eps, kappa) = (0.5f64, 0.15f64, 0.5f64);
    let expected = [
        eps,
        (1.0 - eps) * kappa * eps.powf(delta),
        (1.0 - eps) * (1.0 - kappa * eps.powf(delta)),
    ];
    let listed = [0.15, 0.16460, 0.68540];
    let oracle_ok = expected
        .iter()
        .zip(listed)
        .all(|(a, b)| (a - b).abs() < 5e-6);

    let memory = AgentMemory::from_history(ActionId(0), 0.75, ActionId(1), 0.75 - delta);
    let restricted: Vec<ActionId> = (0..4).map(ActionId).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 100_000;
    let mut counts = [0usize; 3];
    for _ in 0..n {
        match pipip_step(AgentId(0), &memory, &restricted, eps, kappa, &mut rng).unwrap() {
            ActionId(1) => counts[1] += 1,
            ActionId(0) => counts[2] += 1,
            _ => counts[0] += 1,
        }
    }
    let z: Vec<f64> = counts
        .iter()
        .zip(expected)
        .map(|(&c, p)| (c as f64 / n as f64 - p).abs() / (p * (1.0 - p) / n as f64).sqrt())
        .collect();
    let worst = z.iter().copied().fold(0.0, f64::max);
    Outcome::strict(
        oracle_ok && worst <= 3.0,
        format!(
            "freqs {:.5} {:.5} {:.5}, expected {:.5} {:.5} {:.5}, max |z| {worst:.2}",
            counts[0] as f64 / n as f64,
            counts[1] as f64 / n as f64,
            counts[2] as f64 / n as f64,
            expected[0],
            expected[1],
            expected[2]
        ),
    )
}

/// Simulates one synchronous step from `z1` with every agent's memory set
/// to the pair of profiles in `z1`.
fn simulate_step(
    z1: &ChainState,
    game: &GameDefinition,
    eps: f64,
    kappa: f64,
    rng: &mut ChaCha8Rng,
) -> JointAction {
    let older = game.utilities(&z1.prev);
    let recent = game.utilities(&z1.curr);
    let mut next = z1.curr.clone();
    for i in 0..game.num_agents() {
        let agent = AgentId(i);
        let memory =
            AgentMemory::from_history(z1.prev.get(agent), older[i], z1.curr.get(agent), recent[i]);
        let restricted = game.constraints().set(agent, z1.curr.get(agent));
        next.set(
            agent,
            pipip_step(agent, &memory, restricted, eps, kappa, rng).unwrap(),
        );
    }
    next
}

pub fn criterion3() -> Outcome {
    let game = toys::coordination_3x3();
    let (eps, kappa) = (0.2, 0.5);
    let space = state_space(&game).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 100_000;
    let mut worst: f64 = 0.0;
    let mut outside = 0;
    for _ in 0..100 {
        let z1 = space.states().choose(&mut rng).unwrap().clone();
        // Any profile reachable in one step from z1 under the constraints.
        let curr: Vec<usize> = (0..2)
            .map(|i| {
                game.constraints()
                    .set(AgentId(i), z1.curr.get(AgentId(i)))
                    .choose(&mut rng)
                    .unwrap()
                    .0
            })
            .collect();
        let z2 = ChainState::new(z1.curr.clone(), JointAction::from_indices(&curr));
        let p = transition_probability(&z1, &z2, eps, kappa, &game).unwrap();
        let hits = (0..trials)
            .filter(|_| simulate_step(&z1, &game, eps, kappa, &mut rng) == z2.curr)
            .count();
        let freq = hits as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let z = if sigma > 0.0 {
            (freq - p).abs() / sigma
        } else if hits == 0 {
            0.0
        } else {
            f64::INFINITY
        };
        if z > 3.0 {
            outside += 1;
        }
        worst = worst.max(z);
    }
    Outcome::strict(
        outside == 0,
        format!("{outside}/100 transitions outside 3 sigma, max |z| {worst:.2}"),
    )
}

pub const RESISTANCE_EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

pub struct ResistanceScan {
    pub transitions: usize,
    pub within: usize,
    pub worst_variation: f64,
    pub worst_slope_error: f64,
}

/// `P(ε)/ε^χ` over every positive-probability transition of every toy game.
pub fn resistance_scan() -> ResistanceScan {
    let kappa = 0.5;
    let mut scan = ResistanceScan {
        transitions: 0,
        within: 0,
        worst_variation: 0.0,
        worst_slope_error: 0.0,
    };
    for (_, game) in toys::certification_games() {
        let space = state_space(&game).unwrap();
        for z1 in space.states() {
            for z2 in space.states() {
                let p = |e: f64| transition_probability(z1, z2, e, kappa, &game).unwrap();
                if z2.prev != z1.curr || p(RESISTANCE_EPSILONS[0]) == 0.0 {
                    continue;
                }
                let chi = transition_resistance(z1, z2, &game).unwrap();
                let ratios: Vec<f64> = RESISTANCE_EPSILONS
                    .iter()
                    .map(|&e| p(e) / e.powf(chi))
                    .collect();
                let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().copied().fold(0.0, f64::max);
                let variation = (hi - lo) / lo;
                // Local exponent deep in the limit.
                let slope = (p(1e-9) / p(1e-11)).ln() / 100f64.ln();
                scan.transitions += 1;
                if variation < 0.01 {
                    scan.within += 1;
                }
                scan.worst_variation = scan.worst_variation.max(variation);
                scan.worst_slope_error = scan.worst_slope_error.max((slope - chi).abs());
            }
        }
    }
    scan
}

/// Largest tolerated gap between the local exponent at `ε ∈ [1e-11, 1e-9]`
/// and the analytic resistance.
pub const SLOPE_TOLERANCE: f64 = 0.05;

pub fn criterion4() -> Outcome {
    let scan = resistance_scan();
    let pass = scan.within == scan.transitions;
    let detail = format!(
        "{}/{} transitions vary < 1%, worst {:.1}%; exponent at eps ~ 1e-10 within {:.3} of resistance",
        scan.within,
        scan.transitions,
        100.0 * scan.worst_variation,
        scan.worst_slope_error
    );
    let guard = if scan.worst_slope_error <= SLOPE_TOLERANCE {
        Ok(())
    } else {
        Err(format!(
            "exponent error {} > {SLOPE_TOLERANCE}",
            scan.worst_slope_error
        ))
    };
    Outcome {
        pass,
        detail,
        guard,
    }
}

pub fn criterion5() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, game) in toys::certification_games() {
        let diagonal: Vec<ChainState> = state_space(&game)
            .unwrap()
            .states()
            .iter()
            .filter(|z| z.prev == z.curr)
            .cloned()
            .collect();
        match recurrent_classes_unperturbed(&game) {
            Ok(classes) => {
                let singletons = classes
                    .iter()
                    .all(|c| c.len() == 1 && c[0].prev == c[0].curr);
                let mut found: Vec<ChainState> = classes.into_iter().flatten().collect();
                found.sort_by_key(|z| z.curr.indices());
                let mut want = diagonal.clone();
                want.sort_by_key(|z| z.curr.indices());
                let ok = singletons && found == want;
                pass &= ok;
                notes.push(format!("{name}: {} classes", found.len()));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    Outcome::strict(pass, notes.join(", "))
}

pub fn criterion6() -> Outcome {
    let mut edges = 0;
    let mut bad_edges = 0;
    for (_, game) in toys::certification_games() {
        let graph = min_resistance_paths(&game).unwrap();
        for l in 0..graph.len() {
            for k in 0..graph.len() {
                if graph.is_single(l, k) {
                    edges += 1;
                    let w = graph.weight(l, k);
                    if !(1.0..2.0).contains(&w) {
                        bad_edges += 1;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let games = [
        toys::coordination_2x2(toys::COORDINATION_2X2_SCALE),
        toys::coordination_3x3(),
    ];
    let mut worst: f64 = 0.0;
    for r in 0..100 {
        let game = &games[r % 2];
        let m = game.num_actions(AgentId(0));
        let mut route = vec![JointAction::from_indices(&[
            rng.random_range(0..m),
            rng.random_range(0..m),
        ])];
        for _ in 0..rng.random_range(1..=6) {
            let last = route.last().unwrap().clone();
            let agent = AgentId(rng.random_range(0..2));
            let choices: Vec<usize> = (0..m).filter(|&x| x != last.get(agent).0).collect();
            route.push(last.with(agent, ActionId(*choices.choose(&mut rng).unwrap())));
        }
        // λ of a straight route is 1 plus the mover's utility loss, if any.
        let lambda = |a: &JointAction, b: &JointAction| {
            let agent = (0..2).map(AgentId).find(|&i| a.get(i) != b.get(i)).unwrap();
            1.0 + (game.utility(agent, a) - game.utility(agent, b)).max(0.0)
        };
        let forward: f64 = route.windows(2).map(|w| lambda(&w[0], &w[1])).sum();
        let reverse: f64 = route.windows(2).map(|w| lambda(&w[1], &w[0])).sum();
        let gap =
            game.potential(&route[0]).unwrap() - game.potential(route.last().unwrap()).unwrap();
        worst = worst.max((forward - reverse - gap).abs());
        let library = route_reversal_check(&route, game).map(|c| c.forward);
        let same = route.windows(2).all(|w| {
            (straight_route_resistance(&w[0], &w[1], game).unwrap() - lambda(&w[0], &w[1])).abs()
                < 1e-15
        });
        if library.map_or(true, |f| (f - forward).abs() > 1e-12) || !same {
            worst = f64::INFINITY;
        }
    }
    Outcome::strict(
        bad_edges == 0 && worst <= 1e-9,
        format!("{edges} single edges, {bad_edges} outside [1, 2); reversal residual {worst:.1e} over 100 routes"),
    )
}

/// Profiles of a two-agent game maximizing `φ`, by enumeration.
fn argmax(game: &GameDefinition) -> Vec<JointAction> {
    let m: Vec<usize> = game.action_counts();
    let mut all = Vec::new();
    for x in 0..m[0] {
        for y in 0..m[1] {
            all.push(JointAction::from_indices(&[x, y]));
        }
    }
    let best = all
        .iter()
        .map(|a| game.potential(a).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    all.into_iter()
        .filter(|a| game.potential(a).unwrap() >= best - 1e-12)
        .collect()
}

pub const CHAIN_EPSILONS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];
pub const CHAIN_KAPPA: f64 = 0.5;

pub struct ChainCertificate {
    pub masses: Vec<(&'static str, Vec<f64>)>,
    pub monotone: bool,
    pub stable_optimal: bool,
    pub worst_balance: f64,
}

pub fn chain_certificate() -> ChainCertificate {
    let games = [
        ("2x2", toys::coordination_2x2(toys::COORDINATION_2X2_SCALE)),
        ("3x3", toys::coordination_3x3()),
    ];
    let mut cert = ChainCertificate {
        masses: Vec::new(),
        monotone: true,
        stable_optimal: true,
        worst_balance: 0.0,
    };
    for (name, game) in games {
        let optimal = argmax(&game);
        let mut masses = Vec::new();
        for eps in CHAIN_EPSILONS {
            let dist = stationary_distribution(&game, eps, CHAIN_KAPPA).unwrap();
            let states = dist.space().states();
            // Global balance with the pairwise transition formula.
            for (k, z2) in states.iter().enumerate() {
                let inflow: f64 = states
                    .iter()
                    .zip(dist.mass())
                    .filter(|(z1, _)| z1.curr == z2.prev)
                    .map(|(z1, &m)| {
                        m * transition_probability(z1, z2, eps, CHAIN_KAPPA, &game).unwrap()
                    })
                    .sum();
                cert.worst_balance = cert.worst_balance.max((inflow - dist.mass()[k]).abs());
            }
            let mass: f64 = states
                .iter()
                .zip(dist.mass())
                .filter(|(z, _)| z.prev == z.curr && optimal.contains(&z.curr))
                .map(|(_, &m)| m)
                .sum();
            masses.push(mass);
        }
        cert.monotone &= masses.windows(2).all(|w| w[1] >= w[0]);
        cert.stable_optimal &= stochastic_potentials(&game)
            .unwrap()
            .stable()
            .iter()
            .all(|a| optimal.contains(a));
        cert.masses.push((name, masses));
    }
    cert
}

pub const MASS_THRESHOLD: f64 = 0.9;

pub fn criterion7() -> Outcome {
    let cert = chain_certificate();
    let final_masses: Vec<f64> = cert
        .masses
        .iter()
        .map(|(_, m)| *m.last().unwrap())
        .collect();
    let above = final_masses.iter().all(|&m| m > MASS_THRESHOLD);
    let structural = cert.monotone && cert.stable_optimal && cert.worst_balance <= 1e-12;
    let detail = format!(
        "{}; monotone {}, stable ⊆ optimal {}, balance {:.1e}",
        cert.masses
            .iter()
            .map(|(n, m)| format!(
                "{n} mass {}",
                m.iter()
                    .map(|x| format!("{x:.4}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            ))
            .collect::<Vec<_>>()
            .join("; "),
        cert.monotone,
        cert.stable_optimal,
        cert.worst_balance
    );
    let guard = if structural {
        Ok(())
    } else {
        Err(detail.clone())
    };
    Outcome {
        pass: structural && above,
        detail,
        guard,
    }
}

pub struct Comparison8 {
    pub phpip: RunReport,
    pub disl: RunReport,
}

pub fn experiment1_runs(out: &Path, threads: Option<usize>) -> Comparison8 {
    let mut base = presets::experiment1();
    base.run.output = out.to_path_buf();
    let run = |alg| run_experiment(&base.with_algorithm(alg), threads).unwrap();
    Comparison8 {
        phpip: run(AlgorithmChoice::Phpip),
        disl: run(AlgorithmChoice::Disl),
    }
}

pub fn criterion8(runs: &Comparison8) -> Outcome {
    let finals = |r: &RunReport| {
        r.seeds
            .iter()
            .map(|s| s.summary.final_phi)
            .collect::<Vec<_>>()
    };
    let success = |r: &RunReport| {
        r.seeds.iter().filter(|s| s.summary.success).count() as f64 / r.seeds.len() as f64
    };
    let (mp, md) = (
        median(&finals(&runs.phpip)).unwrap(),
        median(&finals(&runs.disl)).unwrap(),
    );
    let (sp, sd) = (success(&runs.phpip), success(&runs.disl));
    let comparison = aggregate(&[runs.phpip.arm(), runs.disl.arm()]).unwrap();
    let consistent = (comparison.arm("PHPIP").unwrap().median_final - mp).abs() < 1e-15
        && (comparison.arm("DISL").unwrap().median_final - md).abs() < 1e-15;
    let complete = [&runs.phpip, &runs.disl]
        .iter()
        .all(|r| r.seeds.len() == 50 && r.seeds.iter().all(|s| s.summary.rows == 699));
    let optimum = runs.phpip.seeds[0].summary.optimum;
    let detail = format!(
        "median final phi PHPIP {mp:.4} vs DISL {md:.4}; success {sp:.2} vs {sd:.2} (optimum {optimum:.4})"
    );
    let guard = if consistent && complete {
        Ok(())
    } else {
        Err("incomplete or inconsistent runs".into())
    };
    Outcome {
        pass: mp >= md && sp > sd,
        detail,
        guard,
    }
}

/// `φ_t` of a placement computed from cell geometry alone.
fn direct_potential(world: &CoverageWorld, scale: f64, cells: &[usize], mean: [f64; 2]) -> f64 {
    let grid = world.grid();
    let r = world.sensing_radius() * (1.0 + 1e-9);
    (0..grid.cell_count())
        .map(|q| {
            let c = grid.center(q);
            let n = cells
                .iter()
                .filter(|&&a| {
                    let p = grid.center(a);
                    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() <= r
                })
                .count();
            let w = (-25.0 / 9.0 * ((c[0] - mean[0]).powi(2) + (c[1] - mean[1]).powi(2))).exp();
            scale * w * (1..=n).map(|l| 1.0 / l as f64).sum::<f64>()
        })
        .sum()
}

/// Brute-force optimum of the moving field at `t = 500`, mean (1.2, 0.9).
fn optimum_at_500(game: &CoverageGame) -> f64 {
    let world = game.world();
    let cells = world.action_cells();
    let m = cells.len();
    let mut best = f64::NEG_INFINITY;
    for a in 0..m {
        for b in a..m {
            for c in b..m {
                for d in c..m {
                    let v = direct_potential(
                        world,
                        game.scale(),
                        &[cells[a], cells[b], cells[c], cells[d]],
                        [1.2, 0.9],
                    );
                    best = best.max(v);
                }
            }
        }
    }
    best
}

pub fn criterion9(out: &Path) -> Outcome {
    let mut config = presets::experiment2();
    config.run.output = out.to_path_buf();
    let report = run_experiment(&config, None).unwrap();
    let prepared = config.prepare().unwrap();
    let table = OptimumTable::build(&prepared.game, config.run.horizon);
    let brute = optimum_at_500(&prepared.game);
    let oracle_gap = (brute - table.at(500)).abs();
    // Ratios recomputed from the trace files on disk.
    let mut pooled = Vec::new();
    let mut conservation: f64 = 0.0;
    for seed in &report.seeds {
        for row in read_trace(&seed.trace_path).unwrap() {
            let phi = prepared.game.potential_at(row.t, &row.actions).unwrap();
            conservation = conservation.max((phi - row.phi).abs());
            if row.t > TRACKING_START {
                pooled.push(phi / table.at(row.t));
            }
        }
    }
    let m = median(&pooled).unwrap();
    let in_memory = report.pooled_tracking_median().unwrap();
    let detail = format!(
        "pooled median phi/max phi_t after step {TRACKING_START}: {m:.4} over {} samples; optimum oracle gap {oracle_gap:.1e}",
        pooled.len()
    );
    Outcome::strict(
        m >= 0.6 && oracle_gap <= 1e-9 && conservation <= 1e-9 && (m - in_memory).abs() < 1e-12,
        detail,
    )
}

/// Byte-compares every trace file under two run directories.
pub fn compare_traces(a: &Path, b: &Path) -> Result<usize, String> {
    let collect = |root: &Path| -> BTreeMap<PathBuf, Vec<u8>> {
        let mut files = BTreeMap::new();
        for arm in std::fs::read_dir(root).unwrap().flatten() {
            if !arm.path().is_dir() {
                continue;
            }
            for f in std::fs::read_dir(arm.path()).unwrap().flatten() {
                if f.path().extension().is_some_and(|x| x == "csv") {
                    let rel = f.path().strip_prefix(root).unwrap().to_path_buf();
                    files.insert(rel, std::fs::read(f.path()).unwrap());
                }
            }
        }
        files
    };
    let (x, y) = (collect(a), collect(b));
    if x.keys().ne(y.keys()) {
        return Err("different trace file sets".into());
    }
    match x.iter().find(|(k, v)| y[*k] != **v) {
        Some((k, _)) => Err(format!("{} differs", k.display())),
        None => Ok(x.len()),
    }
}

pub fn criterion10(first: &Path, second: &Path) -> Outcome {
    experiment1_runs(second, Some(1));
    match compare_traces(first, second) {
        Ok(n) => Outcome::strict(
            n == 100,
            format!("{n} trace files byte-identical across runs (all cores vs 1 thread)"),
        ),
        Err(e) => Outcome::strict(false, e),
    }
}

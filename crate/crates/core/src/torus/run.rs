//! Solver run with budget series, vorticity snapshots and material lines
//! advected in lockstep.

use std::f64::consts::TAU;

use super::sampler::{GridFlow, TimeInterpolated};
use super::solver::{SolverState, TorusSolver};
use super::spectral::GridField;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lagrangian::{advance_points, init_material_line, material_line_energy, MaterialLine};

#[derive(Debug, Clone, PartialEq)]
pub struct TorusRunConfig {
    pub t_end: f64,
    /// Budget rows every this many steps.
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
    pub line_seeds: Vec<Point>,
    pub line_s0: f64,
    pub line_segments: usize,
    pub line_t_end: f64,
    /// Runs with `max |q|` above this are treated as blown up.
    pub blowup_q: f64,
}

impl TorusRunConfig {
    /// Seeds at `(0.25, 0.70)`, `(0.30, 0.70)`, `(0.35, 0.70)` in units of 2π.
    pub fn default_seeds() -> Vec<Point> {
        [0.25, 0.30, 0.35].iter().map(|&f| Point::new(f * TAU, 0.70 * TAU)).collect()
    }
}

impl Default for TorusRunConfig {
    fn default() -> Self {
        Self {
            t_end: 5.0,
            record_every: 10,
            snapshot_times: vec![0.0, 1.0, 2.0, 5.0],
            line_seeds: Vec::new(),
            line_s0: 0.1,
            line_segments: 100,
            line_t_end: 2.0,
            blowup_q: 1e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetRow {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub palinstrophy: f64,
    pub dissipated: f64,
    pub g_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineRow {
    pub t: f64,
    pub energies: Vec<f64>,
}

#[derive(Debug)]
pub struct TorusRun {
    pub budget: Vec<BudgetRow>,
    pub line_energy: Vec<LineRow>,
    pub line_snapshots: Vec<(f64, Vec<MaterialLine>)>,
    pub snapshots: Vec<(f64, GridField)>,
    /// Last state that passed the blow-up checks.
    pub last_good: SolverState,
    pub failure: Option<Error>,
}

impl TorusRun {
    pub fn normalized_line_energy(&self, line: usize) -> Vec<(f64, f64)> {
        let e0 = self.line_energy.first().map(|r| r.energies[line]).unwrap_or(f64::NAN);
        self.line_energy.iter().map(|r| (r.t, r.energies[line] / e0)).collect()
    }
}

fn near(t: f64, target: f64, dt: f64) -> bool {
    (t - target).abs() < 0.5 * dt
}

pub fn simulate(
    solver: &mut TorusSolver,
    init: SolverState,
    cfg: &TorusRunConfig,
    mut progress: impl FnMut(f64),
) -> Result<TorusRun> {
    if cfg.record_every == 0 {
        return Err(Error::Usage("record_every must be positive".into()));
    }
    let p = *solver.params();
    let chart = p.chart();
    let dt = p.dt;
    let steps = (cfg.t_end / dt).round() as usize;
    let line_steps = if cfg.line_seeds.is_empty() { 0 } else { ((cfg.line_t_end / dt).round() as usize).min(steps) };

    let mut flow: Option<GridFlow> = None;
    let mut lines = Vec::new();
    if !cfg.line_seeds.is_empty() {
        let f = solver.grid_flow(&init)?;
        for &x0 in &cfg.line_seeds {
            lines.push(init_material_line(&f, x0, cfg.line_s0, cfg.line_segments)?);
        }
        flow = Some(f);
    }
    let energies = |lines: &[MaterialLine]| -> Result<Vec<f64>> {
        lines.iter().map(|l| material_line_energy(l, &chart)).collect()
    };

    let mut run = TorusRun {
        budget: Vec::new(),
        line_energy: Vec::new(),
        line_snapshots: Vec::new(),
        snapshots: Vec::new(),
        last_good: init.clone(),
        failure: None,
    };
    let record = |solver: &mut TorusSolver, st: &SolverState, run: &mut TorusRun| -> Result<()> {
        let b = solver.budget(st)?;
        run.budget.push(BudgetRow {
            t: st.t,
            energy: b.energy,
            enstrophy: b.enstrophy,
            palinstrophy: b.palinstrophy,
            dissipated: st.dissipated,
            g_mean: solver.g_weighted_mean(st),
        });
        Ok(())
    };
    record(solver, &init, &mut run)?;
    if !lines.is_empty() {
        run.line_energy.push(LineRow { t: init.t, energies: energies(&lines)? });
        run.line_snapshots.push((init.t, lines.clone()));
    }
    if cfg.snapshot_times.iter().any(|&s| near(init.t, s, dt)) {
        run.snapshots.push((init.t, solver.vorticity_grid(&init)));
    }

    let t0 = init.t;
    let mut state = init;
    for n in 0..steps {
        let outcome = (|| -> Result<(SolverState, Option<GridFlow>)> {
            let next = solver.step_rk4(&state)?;
            let mut next_flow = None;
            if n < line_steps {
                let nf = solver.grid_flow(&next)?;
                let a = flow.as_ref().expect("flow present while lines advance");
                let tf = TimeInterpolated { a, b: &nf };
                for l in lines.iter_mut() {
                    advance_points(&tf, &mut l.nodes, state.t, dt)?;
                }
                next_flow = Some(nf);
            }
            Ok((next, next_flow))
        })();
        let (next, next_flow) = match outcome {
            Ok(v) => v,
            Err(e) => {
                run.failure = Some(e);
                break;
            }
        };
        state = next;
        // Clock from the step count so long runs land on snapshot times.
        state.t = t0 + (n + 1) as f64 * dt;
        if next_flow.is_some() {
            flow = next_flow;
        }
        let last = n + 1 == steps;
        if (n + 1) % cfg.record_every == 0 || last {
            let q = solver.vorticity_grid(&state);
            let qmax = q.max_abs();
            if !(qmax <= cfg.blowup_q) {
                run.failure = Some(Error::BlowUp { t: state.t, max_abs_q: qmax, enstrophy: f64::NAN });
                break;
            }
            if let Err(e) = record(solver, &state, &mut run) {
                run.failure = Some(e);
                break;
            }
            run.last_good = state.clone();
            progress(state.t);
        }
        if n < line_steps {
            match energies(&lines) {
                Ok(e) => run.line_energy.push(LineRow { t: state.t, energies: e }),
                Err(e) => {
                    run.failure = Some(e);
                    break;
                }
            }
        }
        for &s in &cfg.snapshot_times {
            if near(state.t, s, dt) {
                run.snapshots.push((state.t, solver.vorticity_grid(&state)));
                if n < line_steps {
                    run.line_snapshots.push((state.t, lines.clone()));
                }
            }
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::initial::initial_condition;
    use crate::torus::solver::TorusParams;

    #[test]
    fn short_run_records_everything() {
        let mut s = TorusSolver::new(TorusParams { k_max: 21, nx: 64, ny: 64, dt: 1e-2, ..TorusParams::desk() }).unwrap();
        let init = initial_condition(&mut s).unwrap();
        let cfg = TorusRunConfig {
            t_end: 0.1,
            record_every: 5,
            snapshot_times: vec![0.0, 0.05],
            line_seeds: TorusRunConfig::default_seeds(),
            line_segments: 20,
            line_t_end: 0.05,
            ..TorusRunConfig::default()
        };
        let run = simulate(&mut s, init, &cfg, |_| {}).unwrap();
        assert!(run.failure.is_none());
        assert_eq!(run.budget.len(), 3);
        assert_eq!(run.line_energy.len(), 6);
        assert_eq!(run.snapshots.len(), 2);
        assert_eq!(run.line_snapshots.len(), 2);
        assert!((run.last_good.t - 0.1).abs() < 1e-12);
        assert!(run.normalized_line_energy(1).iter().all(|&(_, e)| e.is_finite()));
    }

    #[test]
    fn blowup_threshold_stops_and_keeps_last_good() {
        let mut s = TorusSolver::new(TorusParams { k_max: 10, nx: 32, ny: 32, dt: 1e-2, ..TorusParams::desk() }).unwrap();
        let init = initial_condition(&mut s).unwrap();
        let cfg = TorusRunConfig { t_end: 0.1, record_every: 1, blowup_q: 1e-3, ..TorusRunConfig::default() };
        let run = simulate(&mut s, init, &cfg, |_| {}).unwrap();
        assert!(matches!(run.failure, Some(Error::BlowUp { .. })));
        assert_eq!(run.last_good.t, 0.0);
    }
}

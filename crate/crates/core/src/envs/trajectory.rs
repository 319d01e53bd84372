//! Golden trajectory files for cross-checking environment dynamics.
//!
//! CSV with header `t,<state columns>,action,reward,terminal`. Row `t = 0` holds
//! the initial state with `action = -1`, `reward = 0`, `terminal = 0`; row
//! `t ≥ 1` holds the state after the `t`-th step, the action that produced it,
//! its reward and terminal flag. Discrete environments have one state column
//! (`s`); mountain car has `position,velocity`; acrobot has
//! `theta1,theta2,dtheta1,dtheta2` (the internal coordinates, not the
//! observation).

use std::path::Path;

use super::{Acrobot, CliffWalking, EnvKind, Environment, MountainCar, Taxi};
use crate::error::{Error, Result};
use crate::fmt::format_g17;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub t: usize,
    pub state: Vec<f64>,
    pub action: Option<usize>,
    pub reward: f64,
    pub terminal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub state_columns: Vec<String>,
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    pub fn actions(&self) -> Vec<usize> {
        self.rows.iter().filter_map(|r| r.action).collect()
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.rows[0].state
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Csv {
            path: path.into(),
            source: e,
        })?;
        let headers = reader
            .headers()
            .map_err(|e| Error::Csv {
                path: path.into(),
                source: e,
            })?
            .clone();
        let n = headers.len();
        if n < 5 || &headers[0] != "t" || &headers[n - 3] != "action" {
            return Err(Error::domain(format!(
                "{} is not a trajectory file",
                path.display()
            )));
        }
        let state_columns = headers.iter().skip(1).take(n - 4).map(String::from).collect();
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::domain(format!("bad number {s:?} in {}: {e}", path.display())))
        };
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Csv {
                path: path.into(),
                source: e,
            })?;
            let action = parse(&rec[n - 3])?;
            rows.push(TrajectoryRow {
                t: parse(&rec[0])? as usize,
                state: (1..n - 3).map(|i| parse(&rec[i])).collect::<Result<_>>()?,
                action: (action >= 0.0).then_some(action as usize),
                reward: parse(&rec[n - 2])?,
                terminal: parse(&rec[n - 1])? != 0.0,
            });
        }
        if rows.is_empty() {
            return Err(Error::domain(format!("{} has no rows", path.display())));
        }
        Ok(Trajectory {
            state_columns,
            rows,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::from("t,");
        out.push_str(&self.state_columns.join(","));
        out.push_str(",action,reward,terminal\n");
        for r in &self.rows {
            out.push_str(&r.t.to_string());
            for x in &r.state {
                out.push(',');
                out.push_str(&format_g17(*x));
            }
            let action = r.action.map_or("-1".to_string(), |a| a.to_string());
            out.push_str(&format!(
                ",{action},{},{}\n",
                format_g17(r.reward),
                u8::from(r.terminal)
            ));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Discrepancies found by [`replay`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReplayReport {
    pub steps: usize,
    /// Largest absolute per-coordinate state difference over all rows.
    pub max_state_error: f64,
    pub reward_mismatches: usize,
    pub terminal_mismatches: usize,
}

impl ReplayReport {
    pub fn within(&self, state_tol: f64) -> bool {
        self.max_state_error <= state_tol && self.reward_mismatches == 0 && self.terminal_mismatches == 0
    }
}

fn raw_state(env: &dyn std::any::Any) -> Vec<f64> {
    if let Some(e) = env.downcast_ref::<MountainCar>() {
        e.raw_state().to_vec()
    } else if let Some(e) = env.downcast_ref::<Acrobot>() {
        e.raw_state().to_vec()
    } else if let Some(e) = env.downcast_ref::<CliffWalking>() {
        vec![e.state().index().expect("discrete") as f64]
    } else if let Some(e) = env.downcast_ref::<Taxi>() {
        vec![e.state().index().expect("discrete") as f64]
    } else {
        unreachable!("unknown environment type")
    }
}

/// Starts `kind` in the trajectory's initial state, replays its actions and
/// compares every resulting state, reward and terminal flag.
pub fn replay(kind: EnvKind, traj: &Trajectory) -> Result<ReplayReport> {
    let s0 = traj.initial_state();
    let expect_dim = match kind {
        EnvKind::CliffWalking | EnvKind::Taxi => 1,
        EnvKind::MountainCar => 2,
        EnvKind::Acrobot => 4,
    };
    if s0.len() != expect_dim {
        return Err(Error::domain(format!(
            "{kind} trajectories have {expect_dim} state columns, got {}",
            s0.len()
        )));
    }
    let mut env: Box<dyn EnvAny> = match kind {
        EnvKind::CliffWalking => {
            let mut e = CliffWalking::new();
            e.set_state(s0[0] as usize);
            Box::new(e)
        }
        EnvKind::Taxi => {
            let mut e = Taxi::new();
            e.set_state(s0[0] as usize);
            Box::new(e)
        }
        EnvKind::MountainCar => {
            let mut e = MountainCar::new();
            e.set_state(s0[0], s0[1]);
            Box::new(e)
        }
        EnvKind::Acrobot => {
            let mut e = Acrobot::new();
            e.set_state([s0[0], s0[1], s0[2], s0[3]]);
            Box::new(e)
        }
    };
    let mut report = ReplayReport::default();
    for row in &traj.rows[1..] {
        let action = row
            .action
            .ok_or_else(|| Error::domain(format!("row {} has no action", row.t)))?;
        let tr = env.step(action)?;
        let got = raw_state(env.as_any());
        for (a, b) in got.iter().zip(&row.state) {
            report.max_state_error = report.max_state_error.max((a - b).abs());
        }
        report.reward_mismatches += usize::from(tr.reward != row.reward);
        report.terminal_mismatches += usize::from(tr.terminal != row.terminal);
        report.steps += 1;
    }
    Ok(report)
}

trait EnvAny: Environment {
    fn as_any(&self) -> &dyn std::any::Any;
}

impl<T: Environment + 'static> EnvAny for T {
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_read_is_identity() {
        let traj = Trajectory {
            state_columns: vec!["position".into(), "velocity".into()],
            rows: vec![
                TrajectoryRow {
                    t: 0,
                    state: vec![-0.5, 0.0],
                    action: None,
                    reward: 0.0,
                    terminal: false,
                },
                TrajectoryRow {
                    t: 1,
                    state: vec![-0.49912, 1.0 / 3.0],
                    action: Some(2),
                    reward: -1.0,
                    terminal: true,
                },
            ],
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("traj.csv");
        traj.write(&p).unwrap();
        assert_eq!(Trajectory::read(&p).unwrap(), traj);
        assert_eq!(traj.actions(), vec![2]);
    }
}

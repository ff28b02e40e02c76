//! A passive tracer that hops to the nearest particle in a fixed direction between flow steps.
//!
//! Positions are unwrapped: on a ring the tracer may lap, and its position keeps counting.

use crate::dynamics::{step_fast, Direction};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Density};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TracerDirection {
    /// Towards increasing indices, with the flow.
    Along,
    Against,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracerState {
    pub config: Configuration,
    pub position: isize,
    pub direction: TracerDirection,
    pub displacement: i64,
    pub steps: usize,
}

impl TracerState {
    pub fn new(config: Configuration, position: isize, direction: TracerDirection) -> Self {
        Self { config, position, direction, displacement: 0, steps: 0 }
    }

    /// `S(t) / t`, or zero before the first step.
    pub fn velocity(&self) -> Density {
        if self.steps == 0 {
            return Density::from_integer(0);
        }
        Density::new(self.displacement, self.steps as i64)
    }
}

/// Nearest occupied site strictly beyond `i` in the given direction.
pub fn tau(x: &Configuration, i: isize, direction: TracerDirection) -> Result<isize> {
    if x.lanes() != 1 {
        return Err(Error::LaneMismatch { expected: 1, found: x.lanes() });
    }
    let sign: isize = match direction {
        TracerDirection::Along => 1,
        TracerDirection::Against => -1,
    };
    let len = x.len() as isize;
    let reach = match x.boundary() {
        Boundary::Ring => len,
        Boundary::Padded { left, right } => {
            let fill = if sign > 0 { right } else { left };
            let to_edge = if sign > 0 { len - i } else { i + 1 };
            if fill > 0 {
                to_edge.max(1)
            } else {
                to_edge.max(0)
            }
        }
    };
    (1..=reach)
        .map(|d| i + sign * d)
        .find(|&j| x.get(j) > 0)
        .ok_or(Error::TracerStranded)
}

/// Tracer hop, then one step of the `v`-particle flow.
pub fn tracer_step(s: &TracerState, v: u32) -> Result<TracerState> {
    let next = tau(&s.config, s.position, s.direction)?;
    Ok(TracerState {
        config: step_fast(&s.config, v, Direction::Forward)?,
        position: next,
        direction: s.direction,
        displacement: s.displacement + (next - s.position) as i64,
        steps: s.steps + 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracerRun {
    /// Position after each step; entry 0 is the start.
    pub positions: Vec<isize>,
    pub displacement: i64,
    pub velocity: Density,
    pub final_state: TracerState,
}

/// `t` tracer steps from `start`; the velocity is `S(t) / t`.
pub fn tracer_run(x: &Configuration, start: isize, direction: TracerDirection, v: u32, t: usize) -> Result<TracerRun> {
    if t == 0 {
        return Err(Error::NoSteps);
    }
    let mut state = TracerState::new(x.clone(), start, direction);
    let mut positions = Vec::with_capacity(t + 1);
    positions.push(start);
    for _ in 0..t {
        state = tracer_step(&state, v)?;
        positions.push(state.position);
    }
    Ok(TracerRun { positions, displacement: state.displacement, velocity: state.velocity(), final_state: state })
}

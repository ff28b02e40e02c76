//! Update maps, local velocities, fluxes and the fundamental diagram.

use crate::error::{Error, Result};
use crate::lattice::{dual, ring_pattern_density, Boundary, Configuration, Density, WindowSpec, Word};
use crate::sawtooth;

/// Maximal per-step displacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Velocity {
    Finite(u32),
    /// Every particle moves by its full headway.
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlowParams {
    pub velocity: Velocity,
    pub lanes: u32,
    pub direction: Direction,
}

impl FlowParams {
    pub fn forward(v: u32, lanes: u32) -> Self {
        Self { velocity: Velocity::Finite(v), lanes, direction: Direction::Forward }
    }
}

/// Measured and predicted flux of one ring after a fixed number of steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxReport {
    pub rho: Density,
    pub flux_measured: Density,
    pub flux_predicted: Density,
    /// First step from which the per-step flux stays at its final value.
    pub transient_steps: usize,
}

fn require_binary(x: &Configuration) -> Result<()> {
    if x.lanes() != 1 {
        return Err(Error::LaneMismatch { expected: 1, found: x.lanes() });
    }
    Ok(())
}

fn require_velocity(v: u32) -> Result<()> {
    if v == 0 {
        return Err(Error::ZeroVelocity);
    }
    Ok(())
}

/// Per-site displacements of a binary configuration for one forward step.
struct Moves {
    displacement: Vec<u32>,
    /// Landing site of the particle entering from a full left fill.
    inflow: Option<usize>,
}

/// `cap = None` means uncapped (superfast); an unbounded headway is then an error.
fn forward_moves(x: &Configuration, cap: Option<u32>) -> Result<Moves> {
    let n = x.len();
    let positions: Vec<usize> = (0..n).filter(|&i| x.cells()[i] == 1).collect();
    let mut displacement = vec![0u32; n];
    let capped = |headway: Option<usize>| -> Result<u32> {
        match (headway, cap) {
            (Some(h), Some(c)) => Ok((h as u64).min(u64::from(c)) as u32),
            (Some(h), None) => Ok(h as u32),
            (None, Some(c)) => Ok(c),
            (None, None) => Err(Error::SuperfastUndefined),
        }
    };
    let mut inflow = None;
    match x.boundary() {
        Boundary::Ring => {
            for (k, &p) in positions.iter().enumerate() {
                let next = if k + 1 < positions.len() { positions[k + 1] } else { positions[0] + n };
                displacement[p] = capped(Some(next - p - 1))?;
            }
        }
        Boundary::Padded { left, right } => {
            for (k, &p) in positions.iter().enumerate() {
                let headway = if k + 1 < positions.len() {
                    Some(positions[k + 1] - p - 1)
                } else if right == 1 {
                    Some(n - p - 1)
                } else {
                    None
                };
                displacement[p] = capped(headway)?;
            }
            if left == 1 {
                let headway = match positions.first() {
                    Some(&p) => Some(p),
                    None if right == 1 => Some(n),
                    None => None,
                };
                let d = capped(headway)?;
                if d > 0 {
                    inflow = Some(d as usize - 1);
                }
            }
        }
    }
    Ok(Moves { displacement, inflow })
}

fn apply_moves(x: &Configuration, moves: &Moves) -> Configuration {
    let n = x.len();
    let mut cells = vec![0u32; n];
    for (p, &d) in moves.displacement.iter().enumerate() {
        if x.cells()[p] == 0 {
            continue;
        }
        let target = p + d as usize;
        if x.is_ring() {
            cells[target % n] = 1;
        } else if target < n {
            cells[target] = 1;
        }
    }
    if let Some(site) = moves.inflow.filter(|&s| s < n) {
        cells[site] = 1;
    }
    x.with_cells(cells)
}

/// One step of the `M`-lane slow map: `x_i + min(x_{i-1}, M - x_i) - min(x_i, M - x_{i+1})`.
pub fn step_multilane(x: &Configuration) -> Configuration {
    let m = x.lanes();
    let cells = (0..x.len() as isize)
        .map(|i| {
            let c = x.get(i);
            c + x.get(i - 1).min(m - c) - c.min(m - x.get(i + 1))
        })
        .collect();
    x.with_cells(cells)
}

/// Slow particles (`v = 1`); for one lane this is the classical exclusion rule.
pub fn step_slow(x: &Configuration) -> Configuration {
    step_multilane(x)
}

/// Every particle moves `min(v, headway)` sites in `direction`, simultaneously.
pub fn step_fast(x: &Configuration, v: u32, direction: Direction) -> Result<Configuration> {
    require_binary(x)?;
    require_velocity(v)?;
    match direction {
        Direction::Forward => Ok(apply_moves(x, &forward_moves(x, Some(v))?)),
        Direction::Backward => Ok(step_fast(&x.reversed(), v, Direction::Forward)?.reversed()),
    }
}

/// Slow particles with look-ahead `m`: holes jump backward up to `m` sites.
pub fn step_smart(x: &Configuration, m: u32) -> Result<Configuration> {
    Ok(dual(&step_fast(&dual(x), m, Direction::Backward)?))
}

/// Every particle moves by its full headway.
pub fn step_superfast(x: &Configuration) -> Result<Configuration> {
    require_binary(x)?;
    match x.boundary() {
        Boundary::Ring => {
            let n = x.particles() as usize;
            if n == 0 || n == x.len() {
                return Err(Error::SuperfastUndefined);
            }
        }
        Boundary::Padded { right, .. } => {
            if right != 1 {
                return Err(Error::SuperfastUndefined);
            }
        }
    }
    Ok(apply_moves(x, &forward_moves(x, None)?))
}

/// Sawtooth-redirect at anchor 0, move every lane with `step_fast`, merge.
pub fn step_general(x: &Configuration, v: u32) -> Result<Configuration> {
    require_velocity(v)?;
    if x.lanes() == 1 {
        return step_fast(x, v, Direction::Forward);
    }
    sawtooth::step_lanes(x, 0, v)
}

/// One step of the map selected by `params`.
pub fn step(x: &Configuration, params: &FlowParams) -> Result<Configuration> {
    if x.lanes() != params.lanes {
        return Err(Error::LaneMismatch { expected: params.lanes, found: x.lanes() });
    }
    if params.direction == Direction::Backward {
        let forward = FlowParams { direction: Direction::Forward, ..*params };
        return Ok(step(&x.reversed(), &forward)?.reversed());
    }
    match params.velocity {
        Velocity::Infinite => step_superfast(x),
        Velocity::Finite(v) if x.lanes() == 1 => step_fast(x, v, Direction::Forward),
        Velocity::Finite(1) => Ok(step_multilane(x)),
        Velocity::Finite(v) => step_general(x, v),
    }
}

/// `t`-fold composition of [`step`].
pub fn evolve(x: &Configuration, params: &FlowParams, t: usize) -> Result<Configuration> {
    let mut y = x.clone();
    for _ in 0..t {
        y = step(&y, params)?;
    }
    if t == 0 && x.lanes() != params.lanes {
        return Err(Error::LaneMismatch { expected: params.lanes, found: x.lanes() });
    }
    Ok(y)
}

/// Distance covered by the particles of every stored site during the next step.
pub fn site_velocities(x: &Configuration, v: Velocity) -> Result<Vec<u32>> {
    match v {
        Velocity::Infinite => {
            require_binary(x)?;
            step_superfast(x)?;
            Ok(forward_moves(x, None)?.displacement)
        }
        Velocity::Finite(v) => {
            require_velocity(v)?;
            if x.lanes() == 1 {
                Ok(forward_moves(x, Some(v))?.displacement)
            } else if v == 1 {
                let m = x.lanes();
                Ok((0..x.len() as isize).map(|i| x.get(i).min(m - x.get(i + 1))).collect())
            } else {
                let bundle = sawtooth::redirect(x, 0);
                let mut total = vec![0u32; x.len()];
                for lane in bundle.lanes() {
                    let moves = forward_moves(lane, Some(v))?;
                    for (t, d) in total.iter_mut().zip(&moves.displacement) {
                        *t += d;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Velocities on a window; padded configurations are materialized far enough to cover it.
fn window_velocities(x: &Configuration, w: WindowSpec, v: Velocity) -> Result<Vec<u32>> {
    match x.boundary() {
        Boundary::Ring => {
            let vel = site_velocities(x, v)?;
            let n = x.len() as isize;
            Ok((w.start..=w.end).map(|i| vel[i.rem_euclid(n) as usize]).collect())
        }
        Boundary::Padded { .. } => {
            let left = (-w.start).max(0) as usize;
            let right = (w.end - (x.len() as isize - 1)).max(0) as usize;
            let ext = x.extended(left, right);
            let vel = site_velocities(&ext, v)?;
            Ok((w.start..=w.end).map(|i| vel[(i + left as isize) as usize]).collect())
        }
    }
}

/// Summed displacement of the particles at site `i` on the next step.
pub fn local_velocity(x: &Configuration, i: isize, v: Velocity) -> Result<u32> {
    Ok(window_velocities(x, WindowSpec { start: i, end: i }, v)?[0])
}

/// Mean local velocity over a window.
pub fn flux_window(x: &Configuration, w: WindowSpec, v: Velocity) -> Result<Density> {
    let total: i64 = window_velocities(x, w, v)?.iter().map(|&d| i64::from(d)).sum();
    Ok(Density::new(total, w.len() as i64))
}

/// `Σ_{i=1..v} ρ(x, 1 0^i)` on a binary ring.
pub fn flux_pattern_sum(x: &Configuration, v: u32) -> Result<Density> {
    require_binary(x)?;
    if !x.is_ring() {
        return Err(Error::NotRing);
    }
    let mut total = Density::from_integer(0);
    for i in 1..=v as usize {
        let mut symbols = vec![0u32; i + 1];
        symbols[0] = 1;
        total += ring_pattern_density(x, &Word::new(symbols, 1)?)?;
    }
    Ok(total)
}

/// Limit flux: `v ρ` up to the critical density `M/(v+1)`, `M - ρ` beyond.
pub fn fundamental_flux(rho: Density, v: u32, lanes: u32) -> Result<Density> {
    let m = Density::from_integer(i64::from(lanes));
    if rho < Density::from_integer(0) || rho > m {
        return Err(Error::DensityOutOfRange(rho.to_string()));
    }
    if rho * i64::from(v + 1) <= m {
        Ok(rho * i64::from(v))
    } else {
        Ok(m - rho)
    }
}

/// Evolves a ring for `steps` steps and compares the final per-step flux with the prediction.
pub fn fundamental_diagram_point(x: &Configuration, v: u32, steps: usize) -> Result<FluxReport> {
    if !x.is_ring() {
        return Err(Error::NotRing);
    }
    let params = FlowParams::forward(v, x.lanes());
    let full = WindowSpec::full(x);
    let mut fluxes = Vec::with_capacity(steps + 1);
    let mut y = x.clone();
    for s in 0..=steps {
        fluxes.push(flux_window(&y, full, Velocity::Finite(v))?);
        if s < steps {
            y = step(&y, &params)?;
        }
    }
    let last = fluxes[steps];
    let transient_steps = fluxes.iter().rposition(|&f| f != last).map_or(0, |p| p + 1);
    let rho = x.density();
    Ok(FluxReport {
        rho,
        flux_measured: last,
        flux_predicted: fundamental_flux(rho, v, x.lanes())?,
        transient_steps,
    })
}

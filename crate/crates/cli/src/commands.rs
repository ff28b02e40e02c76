use std::fs::File;
use std::io::{self, Write};

use trafficflow::clusters::{
    enumerate_minimal_words, free_violation_radius, minimal_index, predict_lifetime, simulated_lifetime, ClusterSpan, Radius,
};
use trafficflow::dynamics::{evolve, fundamental_diagram_point, step, Direction, FlowParams, Velocity};
use trafficflow::measures::{
    bernoulli_config, decimal_string, ensemble_seed, fixed_count_config, pushforward_distribution,
    pushforward_iterated, to_big, SampleSpec,
};
use trafficflow::sawtooth::{redirect, redirection_report};
use trafficflow::tracer::{tracer_run, TracerDirection};
use trafficflow::{BigRational, Boundary, Configuration, Density, Error, Word};

use crate::options::{
    Cli, Command, Common, ConvergeArgs, DirectionArg, FundamentalDiagramArgs, LifetimeArgs, PushforwardArgs,
    RedirectArgs, SimulateArgs, TracerArgs,
};
use crate::Failure;

const DIGITS: usize = 10;
const LIFETIME_MAX_HALF_LENGTH: usize = 10;

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn dec(r: Density) -> String {
    decimal_string(&to_big(r), DIGITS)
}

fn dec_big(r: &BigRational) -> String {
    decimal_string(r, DIGITS)
}

fn finite_v(common: &Common, default: u32) -> Result<u32, Failure> {
    match common.v {
        None => Ok(default),
        Some(Velocity::Finite(v)) => Ok(v),
        Some(Velocity::Infinite) => Err(usage("this command needs a finite --v")),
    }
}

fn check_lanes(lanes: u32) -> Result<u32, Failure> {
    if lanes == 0 {
        return Err(usage("--lanes must be at least 1"));
    }
    Ok(lanes)
}

/// Particles for site density `rho` on `length` sites, rounded to the nearest integer.
fn particle_count(rho: Density, length: usize, lanes: u32) -> Result<usize, Failure> {
    if rho < Density::from_integer(0) || rho > Density::from_integer(i64::from(lanes)) {
        return Err(usage(format!("density {rho} outside [0, {lanes}]")));
    }
    Ok((rho * length as i64).round().to_integer() as usize)
}

fn write_table(table: &Table, common: &Common) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match &common.output {
        Some(path) => Box::new(
            File::create(path).map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let io_failure = |e: csv::Error| Failure::Compute(format!("cannot write output: {e}"));
    writer.write_record(&table.header).map_err(io_failure)?;
    for row in &table.rows {
        writer.write_record(row).map_err(io_failure)?;
    }
    writer.flush().map_err(|e| Failure::Compute(format!("cannot write output: {e}")))
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let common = cli.command.common().clone();
    let (table, check) = match &cli.command {
        Command::FundamentalDiagram(a) => (fundamental_diagram(a)?, Ok(())),
        Command::Lifetime(a) => lifetime(a)?,
        Command::Converge(a) => (converge(a)?, Ok(())),
        Command::Tracer(a) => (tracer(a)?, Ok(())),
        Command::Pushforward(a) => (pushforward(a)?, Ok(())),
        Command::Redirect(a) => (redirect_lanes(a)?, Ok(())),
        Command::Simulate(a) => (simulate(a)?, Ok(())),
    };
    write_table(&table, &common)?;
    check
}

fn fundamental_diagram(a: &FundamentalDiagramArgs) -> Result<Table, Failure> {
    let c = &a.common;
    let v_list = if a.v_list.is_empty() { vec![finite_v(c, 1)?] } else { a.v_list.clone() };
    let lanes_list = if a.lanes_list.is_empty() { vec![c.lanes.unwrap_or(1)] } else { a.lanes_list.clone() };
    if v_list.contains(&0) {
        return Err(usage("velocities must be positive"));
    }
    let length = c.length.unwrap_or(600);
    if length < 10 {
        return Err(usage("--length must be at least 10"));
    }
    if a.densities.is_empty() && a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let steps = c.steps.unwrap_or(2 * length);
    let seed = c.seed.unwrap_or(0);
    let mut table =
        Table::new(&["v", "M", "L", "density", "flux_measured", "flux_predicted", "transient_steps"]);
    let mut index = 0;
    for &v in &v_list {
        for &lanes in &lanes_list {
            let lanes = check_lanes(lanes)?;
            let grid: Vec<Density> = if a.densities.is_empty() {
                (0..a.points).map(|k| Density::new(k as i64 * i64::from(lanes), a.points as i64 - 1)).collect()
            } else {
                a.densities.clone()
            };
            for rho in grid {
                let n = particle_count(rho, length, lanes)?;
                let x = fixed_count_config(length, lanes, n, ensemble_seed(seed, index))?;
                index += 1;
                let report = fundamental_diagram_point(&x, v, steps)?;
                table.push(vec![
                    v.to_string(),
                    lanes.to_string(),
                    length.to_string(),
                    dec(report.rho),
                    dec(report.flux_measured),
                    dec(report.flux_predicted),
                    report.transient_steps.to_string(),
                ]);
            }
        }
    }
    Ok(table)
}

fn lifetime(a: &LifetimeArgs) -> Result<(Table, Result<(), Failure>), Failure> {
    if finite_v(&a.common, 1)? != 1 || a.common.lanes.unwrap_or(1) != 1 {
        return Err(usage("life-times are defined for one lane and v = 1"));
    }
    if a.n_max > LIFETIME_MAX_HALF_LENGTH {
        return Err(Error::EnumerationBudget { sites: 2 * a.n_max, limit: 2 * LIFETIME_MAX_HALF_LENGTH }.into());
    }
    let mut table = Table::new(&["word", "length", "ones", "minimal_index", "predicted", "simulated", "match"]);
    let mut mismatches = 0;
    for n in 1..=a.n_max {
        for word in enumerate_minimal_words(n) {
            let len = word.len() as isize;
            let x = Configuration::padded(word.symbols().to_vec(), 1, 0, 0)?;
            let end = len - 1;
            let rear = (0..=end).rev().take_while(|&i| x.get(i) == 1).last().unwrap_or(end);
            let span = ClusterSpan { start: rear, end, size: (end - rear + 1) as u64 };
            let index = minimal_index(&x, end)?;
            let predicted = predict_lifetime(&x, &span)?;
            let room = x.extended(0, 2 * n + 2);
            let simulated = simulated_lifetime(&room, rear, 1, 4 * n + 8)?;
            let matched = simulated == Some(predicted) && predicted + 1 == n;
            if !matched {
                mismatches += 1;
            }
            table.push(vec![
                word.to_string(),
                word.len().to_string(),
                word.ones().to_string(),
                index.map_or_else(|| "none".to_string(), |k| k.to_string()),
                predicted.to_string(),
                simulated.map_or_else(|| "none".to_string(), |s| s.to_string()),
                matched.to_string(),
            ]);
        }
    }
    let check = if mismatches == 0 {
        Ok(())
    } else {
        Err(Failure::Compute(format!("{mismatches} life-time mismatches")))
    };
    Ok((table, check))
}

fn median(mut values: Vec<Density>) -> Density {
    values.sort();
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2
    }
}

fn converge(a: &ConvergeArgs) -> Result<Table, Failure> {
    let c = &a.common;
    let v = finite_v(c, 1)?;
    let lanes = check_lanes(c.lanes.unwrap_or(1))?;
    let p = c.density.unwrap_or(Density::new(3, 10));
    let length = c.length.unwrap_or(4096);
    let t_max = c.steps.unwrap_or(500);
    let seed = c.seed.unwrap_or(0);
    if a.every == 0 || a.seeds == 0 {
        return Err(usage("--every and --seeds must be positive"));
    }
    let resolvable = (length / 2) as i64;
    let params = FlowParams::forward(v, lanes);
    let mut table = Table::new(&["seed", "t", "radius", "slope"]);
    let mut finals = Vec::new();
    let mut slopes = Vec::new();
    for s in 0..a.seeds {
        let sample_seed = ensemble_seed(seed, s);
        let mut x = bernoulli_config(&SampleSpec { p, lanes, length, seed: sample_seed })?;
        for t in 0..=t_max {
            if t % a.every == 0 || t == t_max {
                let radius = free_violation_radius(&x, 0, v)?;
                let (text, value) = match radius {
                    Radius::Clean => ("CLEAN".to_string(), resolvable),
                    Radius::At(r) => (r.to_string(), r as i64),
                };
                let slope = if t == 0 { String::new() } else { dec(Density::new(value, t as i64)) };
                table.push(vec![sample_seed.to_string(), t.to_string(), text, slope]);
                if t == t_max {
                    finals.push(Density::from_integer(value));
                    if t > 0 {
                        slopes.push(Density::new(value, t as i64));
                    }
                }
            }
            if t < t_max {
                x = step(&x, &params)?;
            }
        }
    }
    let slope = if slopes.is_empty() { String::new() } else { dec(median(slopes)) };
    table.push(vec!["median".to_string(), t_max.to_string(), dec(median(finals)), slope]);
    Ok(table)
}

fn tracer(a: &TracerArgs) -> Result<Table, Failure> {
    let c = &a.common;
    let v = finite_v(c, 1)?;
    if c.lanes.unwrap_or(1) != 1 {
        return Err(usage("the tracer runs on one-lane rings"));
    }
    let x = match &a.initial {
        Some(text) => Configuration::parse(text, 1, Boundary::Ring)?,
        None => {
            let length = c.length.unwrap_or(3000);
            let rho = c.density.unwrap_or(Density::new(1, 4));
            fixed_count_config(length, 1, particle_count(rho, length, 1)?, c.seed.unwrap_or(0))?
        }
    };
    let steps = c.steps.unwrap_or(2000);
    if steps == 0 || a.every == 0 {
        return Err(usage("--steps and --every must be positive"));
    }
    let warm = evolve(&x, &FlowParams::forward(v, 1), a.warmup.unwrap_or(2 * x.len()))?;
    let direction = match a.direction {
        DirectionArg::Along => TracerDirection::Along,
        DirectionArg::Against => TracerDirection::Against,
    };
    let run = tracer_run(&warm, a.start, direction, v, steps)?;
    let mut table = Table::new(&["step", "position", "displacement", "running_velocity"]);
    for (t, &position) in run.positions.iter().enumerate() {
        if t % a.every != 0 && t != steps {
            continue;
        }
        let displacement = (position - a.start) as i64;
        let velocity = if t == 0 { Density::from_integer(0) } else { Density::new(displacement, t as i64) };
        table.push(vec![t.to_string(), position.to_string(), displacement.to_string(), dec(velocity)]);
    }
    Ok(table)
}

fn pushforward(a: &PushforwardArgs) -> Result<Table, Failure> {
    let c = &a.common;
    let v = finite_v(c, 1)?;
    if c.lanes.unwrap_or(1) != 1 {
        return Err(usage("pushforward is defined for one lane"));
    }
    let p = c.density.unwrap_or(Density::new(1, 2));
    let t = c.steps.unwrap_or(1);
    let mut table = Table::new(&["v", "word", "p", "t", "probability", "probability_exact"]);
    let mut push = |word: &Word, value: &BigRational| {
        table.push(vec![v.to_string(), word.to_string(), dec(p), t.to_string(), dec_big(value), value.to_string()]);
    };
    match &a.word {
        Some(text) => {
            let word = Word::parse(text, 1)?;
            push(&word, &pushforward_iterated(v, &word, p, t)?);
        }
        None => {
            if a.k == 0 {
                return Err(usage("--k must be positive"));
            }
            for (word, value) in &pushforward_distribution(v, a.k, p, t)?.weights {
                push(word, value);
            }
        }
    }
    Ok(table)
}

fn redirect_lanes(a: &RedirectArgs) -> Result<Table, Failure> {
    let c = &a.common;
    let lanes = check_lanes(c.lanes.unwrap_or(1))?;
    let x = Configuration::parse(&a.initial, lanes, c.boundary.unwrap_or(Boundary::Ring))?;
    if a.assignments {
        if a.anchor != 0 {
            return Err(usage("--assignments uses the anchor at site 0"));
        }
        let report = redirection_report(&x, 1)?;
        let mut table = Table::new(&["site", "slot", "lane"]);
        for p in &report.assignments {
            table.push(vec![p.site.to_string(), p.slot.to_string(), p.lane.to_string()]);
        }
        return Ok(table);
    }
    let bundle = redirect(&x, a.anchor);
    let mut table = Table::new(&["lane", "cells", "density", "density_exact"]);
    for (j, lane) in bundle.lanes().iter().enumerate() {
        let rho = lane.density();
        table.push(vec![j.to_string(), lane.to_string(), dec(rho), rho.to_string()]);
    }
    Ok(table)
}

fn simulate(a: &SimulateArgs) -> Result<Table, Failure> {
    let c = &a.common;
    let lanes = check_lanes(c.lanes.unwrap_or(1))?;
    let x = match &a.initial {
        Some(text) => Configuration::parse(text, lanes, c.boundary.unwrap_or(Boundary::Ring))?,
        None => {
            if matches!(c.boundary, Some(Boundary::Padded { .. })) {
                return Err(usage("sampled configurations are rings; pass --initial for padded runs"));
            }
            let length = c.length.ok_or_else(|| usage("--length or --initial is required"))?;
            let rho = c.density.ok_or_else(|| usage("--density or --initial is required"))?;
            fixed_count_config(length, lanes, particle_count(rho, length, lanes)?, c.seed.unwrap_or(0))?
        }
    };
    let params =
        FlowParams { velocity: c.v.unwrap_or(Velocity::Finite(1)), lanes, direction: Direction::Forward };
    let mut table = Table::new(&["step", "configuration", "particles", "density", "density_exact"]);
    let mut y = x;
    let steps = c.steps.unwrap_or(10);
    for t in 0..=steps {
        let rho = y.density();
        table.push(vec![t.to_string(), y.to_string(), y.particles().to_string(), dec(rho), rho.to_string()]);
        if t < steps {
            y = step(&y, &params)?;
        }
    }
    Ok(table)
}

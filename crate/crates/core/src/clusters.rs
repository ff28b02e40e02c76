//! Jammed clusters, minimal words, exact life-times, and distance-to-attractor diagnostics.

use crate::dynamics::{site_velocities, step, step_fast, Direction, FlowParams, Velocity};
use crate::error::{Error, Result};
use crate::lattice::{dual, Boundary, Configuration, Density, WindowSpec, Word};

/// A jammed cluster: slow particles followed by the full-speed particle that ends them.
///
/// On rings `end` may exceed the length; read it modulo the length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClusterSpan {
    pub start: isize,
    pub end: isize,
    pub size: u64,
}

/// Shortest balanced word `x[k, n]` ending at the last particle of a cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimalWordRecord {
    pub k: isize,
    pub n: isize,
    pub ones: usize,
    pub predicted_lifetime: usize,
}

impl MinimalWordRecord {
    pub fn len(&self) -> usize {
        (self.n - self.k + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Distance from the origin at which the configuration stops looking free or hole-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Radius {
    At(usize),
    /// No violation of one of the two conditions within the resolvable range.
    Clean,
}

/// `ψ(n) = c · n^(-α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay {
    pub c: f64,
    pub alpha: f64,
}

impl Decay {
    pub fn eval(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.alpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    /// First window `[start, end]` violating the bound, shortest first.
    pub witness: Option<WindowSpec>,
}

fn require_binary(x: &Configuration) -> Result<()> {
    if x.lanes() != 1 {
        return Err(Error::LaneMismatch { expected: 1, found: x.lanes() });
    }
    Ok(())
}

/// Maximal spans of slow particles, each closed by the next particle moving at full speed.
///
/// A particle is slow when its site velocity is below `v` times the occupancy. For one lane and
/// `v = 1` the spans are exactly the runs of two or more consecutive particles.
pub fn find_jammed_clusters(x: &Configuration, v: u32) -> Result<Vec<ClusterSpan>> {
    let vel = site_velocities(x, Velocity::Finite(v))?;
    let cells = x.cells();
    let occupied: Vec<usize> = (0..x.len()).filter(|&i| cells[i] > 0).collect();
    let slow = |i: usize| vel[i] < v * cells[i];
    let mut spans = Vec::new();
    if occupied.is_empty() {
        return Ok(spans);
    }
    let n = x.len() as isize;
    let order: Vec<isize> = if x.is_ring() {
        match occupied.iter().position(|&i| !slow(i)) {
            None => {
                let size = x.particles();
                let start = occupied[0] as isize;
                let end = *occupied.last().unwrap_or(&occupied[0]) as isize;
                return Ok(vec![ClusterSpan { start, end, size }]);
            }
            Some(f) => (1..=occupied.len())
                .map(|k| {
                    let idx = (f + k) % occupied.len();
                    let wrap = if f + k >= occupied.len() { n } else { 0 };
                    occupied[idx] as isize + wrap
                })
                .collect(),
        }
    } else {
        occupied.iter().map(|&i| i as isize).collect()
    };
    let mut open: Option<(isize, u64)> = None;
    let mut last = 0;
    for &p in &order {
        let site = p.rem_euclid(n) as usize;
        let c = u64::from(cells[site]);
        if slow(site) {
            open = Some(match open {
                Some((s, size)) => (s, size + c),
                None => (p, c),
            });
        } else if let Some((s, size)) = open.take() {
            spans.push(ClusterSpan { start: s, end: p, size: size + c });
        }
        last = p;
    }
    if let Some((s, size)) = open {
        spans.push(ClusterSpan { start: s, end: last, size });
    }
    if x.is_ring() {
        for span in &mut spans {
            if span.start >= n {
                span.start -= n;
                span.end -= n;
            }
        }
        spans.sort_by_key(|s| s.start);
    }
    Ok(spans)
}

/// Largest `k < n` with `x[k, n]` balanced, or `None` if no such `k` is resolvable.
///
/// Rings are searched at most one full turn to the left.
pub fn minimal_index(x: &Configuration, n: isize) -> Result<Option<isize>> {
    require_binary(x)?;
    let len = x.len() as isize;
    let left_fill = match x.boundary() {
        Boundary::Padded { left, .. } => Some(left),
        Boundary::Ring => None,
    };
    let mut excess: i64 = 0;
    let mut k = n;
    loop {
        excess += if x.get(k) == 1 { 1 } else { -1 };
        if k < n && excess == 0 {
            return Ok(Some(k));
        }
        k -= 1;
        match left_fill {
            None if n - k >= len => return Ok(None),
            Some(fill) if k < 0 && (fill == 1 || excess <= 0) => return Ok(None),
            _ => {}
        }
    }
}

/// `(end - I - 1) / 2` steps for slow particles, `I` the minimal index at the cluster end.
pub fn predict_lifetime(x: &Configuration, cluster: &ClusterSpan) -> Result<usize> {
    let k = minimal_index(x, cluster.end)?.ok_or(Error::UnboundedMinimalWord)?;
    Ok(((cluster.end - k - 1) / 2) as usize)
}

/// Steps until the run of particles starting at the tracked rear has length at most one.
///
/// The rear moves left whenever a particle joins behind it. Returns `None` if the cluster
/// survives `max_steps` steps.
pub fn simulated_lifetime(x: &Configuration, rear: isize, v: u32, max_steps: usize) -> Result<Option<usize>> {
    require_binary(x)?;
    let len = x.len();
    let run = |y: &Configuration, r: isize| (0..len as isize).take_while(|&d| y.get(r + d) == 1).count();
    let mut y = x.clone();
    let mut rear = rear;
    for t in 0..=max_steps {
        if run(&y, rear) <= 1 {
            return Ok(Some(t));
        }
        if t == max_steps {
            break;
        }
        y = step_fast(&y, v, Direction::Forward)?;
        for _ in 0..len {
            if y.get(rear - 1) != 1 {
                break;
            }
            rear -= 1;
        }
    }
    Ok(None)
}

/// One slow step of a binary word, keeping only the positions that do not need outside context.
pub fn gamma_step(a: &Word) -> Result<Word> {
    let s = a.symbols();
    if a.alphabet_max() != 1 && s.iter().any(|&c| c > 1) {
        return Err(Error::SymbolOutOfRange { value: *s.iter().max().unwrap_or(&0), max: 1 });
    }
    if s.len() < 3 {
        return Err(Error::WordTooShort { needed: 3, found: s.len() });
    }
    let out = (1..s.len() - 1)
        .map(|i| s[i] + s[i - 1].min(1 - s[i]) - s[i].min(1 - s[i + 1]))
        .collect();
    Word::new(out, 1)
}

/// Whether a binary word is minimal: it ends in a particle and no proper suffix is balanced.
pub fn is_minimal_word(a: &Word) -> bool {
    let s = a.symbols();
    if s.last() != Some(&1) || s.iter().any(|&c| c > 1) {
        return false;
    }
    let mut excess = 0i64;
    for (k, &c) in s.iter().enumerate().rev() {
        excess += if c == 1 { 1 } else { -1 };
        if excess == 0 {
            return k == 0;
        }
    }
    false
}

/// All minimal words of length `2n`, in lexicographic order.
pub fn enumerate_minimal_words(n: usize) -> Vec<Word> {
    let len = 2 * n;
    (0u64..1 << len)
        .map(|b| (0..len).map(|i| ((b >> (len - 1 - i)) & 1) as u32).collect::<Vec<_>>())
        .filter_map(|s| Word::new(s, 1).ok())
        .filter(is_minimal_word)
        .collect()
}

/// One record per cluster end whose minimal word is finite.
pub fn minimal_words(x: &Configuration) -> Result<Vec<MinimalWordRecord>> {
    require_binary(x)?;
    let mut records = Vec::new();
    for n in 0..x.len() as isize {
        let end = x.get(n) == 1 && x.get(n - 1) == 1 && x.get(n + 1) == 0;
        if !end {
            continue;
        }
        if let Some(k) = minimal_index(x, n)? {
            let ones = ((n - k + 1) / 2) as usize;
            records.push(MinimalWordRecord { k, n, ones, predicted_lifetime: ones - 1 });
        }
    }
    Ok(records)
}

/// Steps a ring needs to become free, read off its longest minimal word.
pub fn predicted_transient(x: &Configuration) -> Result<usize> {
    Ok(minimal_words(x)?.iter().map(|r| r.predicted_lifetime).max().unwrap_or(0))
}

/// First step at which the evolved configuration is free, within `max_steps`.
pub fn steps_to_free(x: &Configuration, v: u32, max_steps: usize) -> Result<Option<usize>> {
    let params = FlowParams::forward(v, x.lanes());
    let mut y = x.clone();
    for t in 0..=max_steps {
        if is_free(&y, v)? {
            return Ok(Some(t));
        }
        if t < max_steps {
            y = step(&y, &params)?;
        }
    }
    Ok(None)
}

/// Sites (in the original indexing) where particles do not move at full speed.
fn free_violations(x: &Configuration, v: u32) -> Result<Vec<isize>> {
    let margin = v as usize + 1;
    let (ext, shift) = match x.boundary() {
        Boundary::Ring => (x.clone(), 0),
        Boundary::Padded { .. } => (x.extended(margin, margin), margin as isize),
    };
    let vel = site_velocities(&ext, Velocity::Finite(v))?;
    Ok(ext
        .cells()
        .iter()
        .zip(&vel)
        .enumerate()
        .filter(|(_, (&c, &d))| d != v * c)
        .map(|(i, _)| i as isize - shift)
        .collect())
}

/// Every particle moves `v` sites on the next step.
pub fn is_free(x: &Configuration, v: u32) -> Result<bool> {
    Ok(free_violations(x, v)?.is_empty())
}

/// The complement configuration is free.
pub fn is_dual_free(x: &Configuration, v: u32) -> Result<bool> {
    is_free(&dual(x), v)
}

/// `max(d_free, d_dual)` with `d` the distance from `origin` to the nearest violation of each
/// condition; `Clean` when either condition holds throughout the resolvable range.
pub fn free_violation_radius(x: &Configuration, origin: isize, v: u32) -> Result<Radius> {
    let n = x.len() as isize;
    let distance = |i: isize| -> usize {
        if x.is_ring() {
            let d = (i - origin).rem_euclid(n);
            d.min(n - d) as usize
        } else {
            (i - origin).unsigned_abs()
        }
    };
    let nearest = |sites: Vec<isize>| sites.into_iter().map(distance).min();
    let free = nearest(free_violations(x, v)?);
    let hole_free = nearest(free_violations(&dual(x), v)?);
    Ok(match (free, hole_free) {
        (Some(a), Some(b)) => Radius::At(a.max(b)),
        _ => Radius::Clean,
    })
}

/// Checks `|ρ(x[-n, m], 1) - r| ≤ ψ(n + m)` on every resolvable window around site 0.
///
/// Rings use windows shorter than one turn; padded configurations use windows reaching at most
/// one core length into each fill.
pub fn regular_membership(x: &Configuration, r: Density, psi: Decay) -> Result<Regularity> {
    let len = x.len() as isize;
    let (max_left, max_right, max_total) = match x.boundary() {
        Boundary::Ring => (len - 1, len - 1, len),
        Boundary::Padded { .. } => (len, 2 * len - 1, 3 * len),
    };
    let lo = -max_left;
    let prefix: Vec<i64> = std::iter::once(0)
        .chain((lo..=max_right).scan(0i64, |acc, i| {
            *acc += i64::from(x.get(i));
            Some(*acc)
        }))
        .collect();
    let count = |a: isize, b: isize| prefix[(b - lo + 1) as usize] - prefix[(a - lo) as usize];
    let target = *r.numer() as f64 / *r.denom() as f64;
    for total in 2..=max_total {
        let spread = (total - 1) as usize;
        let bound = psi.eval(spread);
        for left in 0..total {
            let right = total - 1 - left;
            if left > max_left || right > max_right {
                continue;
            }
            let rho = count(-left, right) as f64 / total as f64;
            if (rho - target).abs() > bound {
                return Ok(Regularity { regular: false, witness: Some(WindowSpec { start: -left, end: right }) });
            }
        }
    }
    Ok(Regularity { regular: true, witness: None })
}

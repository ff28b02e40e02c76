//! Sawtooth redirection of an `M`-lane configuration into `M` binary lanes.
//!
//! Particles are numbered from the anchor site: the lowest particle at the anchor is 0, numbers
//! increase to the right (bottom-up within a site) and decrease to the left. Particle `n` goes to
//! lane `M - 1 - (n mod M)`, so lane 0 is the top row of the usual staircase picture.
//!
//! On a ring whose particle count is not a multiple of `M` the staircase is only consistent over
//! several turns; such rings are unrolled `M / gcd(N, M)` times and every lane lives on the
//! unrolled ring. [`merge`] folds the lanes back and rejects sums that are not periodic.

use num_integer::Integer;

use crate::dynamics::{fundamental_flux, step_fast, step_multilane, Direction};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Density, WindowSpec};

/// `M` aligned binary lanes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaneBundle {
    lanes: Vec<Configuration>,
    anchor: isize,
    period: usize,
}

impl LaneBundle {
    /// Validates that all lanes are binary, aligned, and a whole number of periods long.
    pub fn new(lanes: Vec<Configuration>, anchor: isize, period: usize) -> Result<Self> {
        let first = lanes.first().ok_or(Error::NoLanes)?;
        let (len, boundary) = (first.len(), first.boundary());
        let aligned = lanes
            .iter()
            .all(|l| l.lanes() == 1 && l.len() == len && l.boundary() == boundary);
        if !aligned || period == 0 || len % period != 0 {
            return Err(Error::InvalidBundle);
        }
        if boundary != Boundary::Ring && len != period {
            return Err(Error::InvalidBundle);
        }
        Ok(Self { lanes, anchor, period })
    }

    pub fn lanes(&self) -> &[Configuration] {
        &self.lanes
    }

    pub fn anchor(&self) -> isize {
        self.anchor
    }

    /// Length of the configuration the bundle was built from.
    pub fn period(&self) -> usize {
        self.period
    }

    /// How many copies of the base ring each lane spans.
    pub fn repeats(&self) -> usize {
        self.lanes[0].len() / self.period
    }

    /// Applies `f` to every lane.
    pub fn map_lanes(&self, f: impl Fn(&Configuration) -> Result<Configuration>) -> Result<Self> {
        let lanes = self.lanes.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(lanes, self.anchor, self.period)
    }
}

fn lane_of(number: i64, m: u32) -> usize {
    (i64::from(m) - 1 - number.rem_euclid(i64::from(m))) as usize
}

/// Number of the lowest particle at site 0 when counting from anchor `l` of a padded configuration.
fn padded_offset(x: &Configuration, l: isize) -> i64 {
    let (left, right) = match x.boundary() {
        Boundary::Padded { left, right } => (i64::from(left), i64::from(right)),
        Boundary::Ring => unreachable!("padded only"),
    };
    let n = x.len() as isize;
    if l <= 0 {
        left * (-l) as i64
    } else {
        let inside: i64 = x.cells()[..l.min(n) as usize].iter().map(|&c| i64::from(c)).sum();
        let beyond = right * (l - n).max(0) as i64;
        -(inside + beyond)
    }
}

/// Ring unrolling factor `M / gcd(N, M)`.
fn ring_repeats(x: &Configuration) -> usize {
    let m = u64::from(x.lanes());
    (m / x.particles().gcd(&m)) as usize
}

/// Splits `x` into binary lanes along the staircase anchored at site `l`.
pub fn redirect(x: &Configuration, l: isize) -> LaneBundle {
    let m = x.lanes();
    let n = x.len();
    match x.boundary() {
        Boundary::Ring => {
            let len = n * ring_repeats(x);
            let mut lanes = vec![vec![0u32; len]; m as usize];
            let start = l.rem_euclid(n as isize) as usize;
            let mut count: i64 = 0;
            for step in 0..len {
                let site = (start + step) % len;
                let height = x.cells()[site % n];
                for slot in 0..height {
                    lanes[lane_of(count + i64::from(slot), m)][site] = 1;
                }
                count += i64::from(height);
            }
            let lanes = lanes.into_iter().map(|c| Configuration::ring(c, 1).expect("binary lane")).collect();
            LaneBundle { lanes, anchor: l, period: n }
        }
        Boundary::Padded { left, right } => {
            let mut lanes = vec![vec![0u32; n]; m as usize];
            let mut count = padded_offset(x, l);
            for (site, &height) in x.cells().iter().enumerate() {
                for slot in 0..height {
                    lanes[lane_of(count + i64::from(slot), m)][site] = 1;
                }
                count += i64::from(height);
            }
            let (lf, rf) = (left / m, right / m);
            let lanes = lanes
                .into_iter()
                .map(|c| Configuration::padded(c, 1, lf, rf).expect("binary lane"))
                .collect();
            LaneBundle { lanes, anchor: l, period: n }
        }
    }
}

/// Sitewise sum of the lanes, folded back to the base period.
pub fn merge(b: &LaneBundle) -> Result<Configuration> {
    let m = b.lanes.len() as u32;
    let len = b.lanes[0].len();
    let mut sum = vec![0u32; len];
    for lane in &b.lanes {
        for (s, &c) in sum.iter_mut().zip(lane.cells()) {
            *s += c;
        }
    }
    if sum.iter().any(|&s| s > m) {
        return Err(Error::InvalidBundle);
    }
    let period = b.period;
    if sum.iter().enumerate().any(|(i, &s)| s != sum[i % period]) {
        return Err(Error::InvalidBundle);
    }
    sum.truncate(period);
    match b.lanes[0].boundary() {
        Boundary::Ring => Configuration::ring(sum, m),
        Boundary::Padded { .. } => {
            let fill = |side: fn(Boundary) -> u32| -> u32 {
                b.lanes.iter().map(|l| side(l.boundary())).sum()
            };
            let left = fill(|bd| match bd {
                Boundary::Padded { left, .. } => left,
                Boundary::Ring => 0,
            });
            let right = fill(|bd| match bd {
                Boundary::Padded { right, .. } => right,
                Boundary::Ring => 0,
            });
            Configuration::padded(sum, m, left, right).map_err(|_| Error::InvalidBundle)
        }
    }
}

/// Largest density gap between any two lanes on a window.
pub fn lane_balance(b: &LaneBundle, w: WindowSpec) -> Density {
    let k = w.len() as i64;
    let counts: Vec<i64> = b
        .lanes
        .iter()
        .map(|lane| (w.start..=w.end).map(|i| i64::from(lane.get(i))).sum())
        .collect();
    let hi = counts.iter().max().copied().unwrap_or(0);
    let lo = counts.iter().min().copied().unwrap_or(0);
    Density::new(hi - lo, k)
}

/// The rotation `s` with `b.lanes[(j + s) mod M] == a.lanes[j]` for every lane `j`, if any.
pub fn lane_rotation(a: &LaneBundle, b: &LaneBundle) -> Option<usize> {
    let m = a.lanes.len();
    if b.lanes.len() != m {
        return None;
    }
    (0..m).find(|&s| (0..m).all(|j| b.lanes[(j + s) % m].cells() == a.lanes[j].cells()))
}

/// Moving the anchor by `k` sites only relabels the lanes cyclically.
pub fn anchor_shift_check(x: &Configuration, l: isize, k: isize) -> bool {
    lane_rotation(&redirect(x, l), &redirect(x, l + k)).is_some()
}

/// Whether the lanes are a cyclic relabeling of the staircase of their own merge.
pub fn is_staircase(b: &LaneBundle) -> bool {
    match merge(b) {
        Ok(x) => {
            let fresh = redirect(&x, b.anchor);
            fresh.lanes[0].len() == b.lanes[0].len() && lane_rotation(&fresh, b).is_some()
        }
        Err(_) => false,
    }
}

/// Redirect at anchor `l`, move every lane with `step_fast`, merge.
pub fn step_lanes(x: &Configuration, l: isize, v: u32) -> Result<Configuration> {
    let moved = redirect(x, l).map_lanes(|lane| step_fast(lane, v, Direction::Forward))?;
    merge(&moved)
}

/// Per-lane dynamics against the multilane map (`v = 1`) and anchor independence (any `v`).
pub fn commutation_check(x: &Configuration, v: u32) -> Result<bool> {
    let base = step_lanes(x, 0, v)?;
    if v == 1 && base != step_multilane(x) {
        return Ok(false);
    }
    for l in 1..x.len() as isize {
        if step_lanes(x, l, v)? != base {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lane of one particle, identified by its site and its bottom-up slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaneAssignment {
    pub site: usize,
    pub slot: u32,
    pub lane: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedirectionReport {
    pub assignments: Vec<LaneAssignment>,
    pub lane_densities: Vec<Density>,
    pub predicted_flux: Density,
}

/// Lane of every particle under the staircase anchored at site 0, with the limit flux.
pub fn redirection_report(x: &Configuration, v: u32) -> Result<RedirectionReport> {
    let m = x.lanes();
    let mut count = match x.boundary() {
        Boundary::Ring => 0,
        Boundary::Padded { .. } => padded_offset(x, 0),
    };
    let mut assignments = Vec::with_capacity(x.particles() as usize);
    for (site, &height) in x.cells().iter().enumerate() {
        for slot in 0..height {
            assignments.push(LaneAssignment { site, slot, lane: lane_of(count + i64::from(slot), m) as u32 });
        }
        count += i64::from(height);
    }
    let bundle = redirect(x, 0);
    let lane_densities = bundle.lanes.iter().map(Configuration::density).collect();
    Ok(RedirectionReport { assignments, lane_densities, predicted_flux: fundamental_flux(x.density(), v, m)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::step_general;
    use proptest::prelude::*;

    fn rows(b: &LaneBundle) -> Vec<String> {
        b.lanes().iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn staircase_example_three_lanes() {
        let x = Configuration::padded(vec![1, 1, 2, 1, 1, 2, 2, 1], 3, 0, 0).unwrap();
        let b = redirect(&x, 3);
        assert_eq!(rows(&b), ["10100110", "00101010", "01010101"]);
        assert_eq!(merge(&b).unwrap(), x);

        let ring = Configuration::ring(x.cells().to_vec(), 3).unwrap();
        let b = redirect(&ring, 3);
        assert_eq!(b.repeats(), 3);
        let first: Vec<String> = b.lanes().iter().map(|l| l.to_string()[..8].to_string()).collect();
        assert_eq!(first, ["10100110", "00101010", "01010101"]);
        assert_eq!(merge(&b).unwrap(), ring);
    }

    #[test]
    fn small_examples() {
        let x = Configuration::ring(vec![1, 0, 1, 1], 1).unwrap();
        assert_eq!(redirect(&x, 2).lanes(), &[x.clone()]);
        let x = Configuration::ring(vec![2, 0], 2).unwrap();
        assert_eq!(rows(&redirect(&x, 0)), ["10", "10"]);
        let lane = Configuration::ring(vec![1, 1], 1).unwrap();
        let b = LaneBundle::new(vec![lane.clone(), lane], 0, 2).unwrap();
        assert_eq!(merge(&b).unwrap().cells(), &[2, 2]);
    }

    #[test]
    fn merge_rejects_aperiodic_and_misaligned() {
        let aperiodic = LaneBundle::new(vec![Configuration::ring(vec![1, 0, 0, 0], 1).unwrap()], 0, 2).unwrap();
        assert_eq!(merge(&aperiodic), Err(Error::InvalidBundle));
        let lanes = vec![Configuration::ring(vec![1], 1).unwrap(), Configuration::ring(vec![1, 0], 1).unwrap()];
        assert_eq!(LaneBundle::new(lanes, 0, 1), Err(Error::InvalidBundle));
        assert_eq!(LaneBundle::new(vec![], 0, 1), Err(Error::NoLanes));
    }

    #[test]
    fn merge_accepts_full_lanes_and_rejects_mixed_fills() {
        let full = Configuration::ring(vec![1, 1], 1).unwrap();
        let empty = Configuration::ring(vec![0, 0], 1).unwrap();
        let b = LaneBundle::new(vec![full.clone(), full.clone(), empty], 0, 2).unwrap();
        assert_eq!(merge(&b).unwrap().cells(), &[2, 2]);
        let padded_full = Configuration::padded(vec![1], 1, 1, 0).unwrap();
        let padded_empty = Configuration::padded(vec![0], 1, 0, 0).unwrap();
        assert_eq!(LaneBundle::new(vec![padded_full, padded_empty], 0, 1), Err(Error::InvalidBundle));
    }

    #[test]
    fn anchor_shift_rotates_by_mass() {
        let x = Configuration::padded(vec![1, 1, 2, 1, 1, 2, 2, 1], 3, 0, 0).unwrap();
        let a = redirect(&x, 3);
        assert_eq!(lane_rotation(&a, &a), Some(0));
        assert_eq!(lane_rotation(&a, &redirect(&x, 4)), Some(1));
        assert_eq!(lane_rotation(&a, &redirect(&x, 6)), Some(1));
        assert_eq!(lane_rotation(&redirect(&x, 5), &redirect(&x, 6)), Some(2));
        assert!(anchor_shift_check(&x, 3, -2));
    }

    #[test]
    fn commutation_examples() {
        let x = Configuration::ring(vec![2, 1, 0], 2).unwrap();
        assert_eq!(step_lanes(&x, 0, 1).unwrap().cells(), &[1, 1, 1]);
        assert!(commutation_check(&x, 1).unwrap());
        assert!(commutation_check(&Configuration::ring(vec![1, 0, 1], 1).unwrap(), 3).unwrap());
    }

    #[test]
    fn report_examples() {
        let x = Configuration::padded(vec![1, 1, 2, 1, 1, 2, 2, 1], 3, 0, 0).unwrap();
        let r = redirection_report(&x, 1).unwrap();
        assert_eq!(r.assignments.len(), 11);
        assert_eq!(r.assignments[2], LaneAssignment { site: 2, slot: 0, lane: 0 });
        let empty = Configuration::ring(vec![0, 0, 0], 2).unwrap();
        assert!(redirection_report(&empty, 1).unwrap().assignments.is_empty());

        let half = Configuration::ring(vec![1; 8], 2).unwrap();
        let r = redirection_report(&half, 2).unwrap();
        assert_eq!(r.lane_densities, vec![Density::new(1, 2); 2]);
        assert_eq!(r.predicted_flux, Density::from_integer(1));
    }

    #[test]
    fn exhaustive_small_rings() {
        for m in 1..=3u32 {
            for len in 1..=6usize {
                let total = (m as usize + 1).pow(len as u32);
                for code in 0..total {
                    let mut c = code;
                    let cells: Vec<u32> = (0..len)
                        .map(|_| {
                            let d = (c % (m as usize + 1)) as u32;
                            c /= m as usize + 1;
                            d
                        })
                        .collect();
                    let x = Configuration::ring(cells, m).unwrap();
                    for l in 0..len as isize {
                        let b = redirect(&x, l);
                        assert_eq!(merge(&b).unwrap(), x);
                        assert!(is_staircase(&b));
                        let lane_len = b.lanes()[0].len() as isize;
                        for s in 0..lane_len {
                            for e in s..s + lane_len {
                                let w = WindowSpec::new(s, e).unwrap();
                                assert!(lane_balance(&b, w) <= Density::new(1, w.len() as i64), "{x} l={l} {w:?}");
                            }
                        }
                    }
                    for v in 1..=2 {
                        assert!(commutation_check(&x, v).unwrap(), "{x} v={v}");
                    }
                }
            }
        }
    }

    fn multilane() -> impl Strategy<Value = Configuration> {
        (1u32..=4).prop_flat_map(|m| {
            proptest::collection::vec(0..=m, 1..40).prop_map(move |c| Configuration::ring(c, m).unwrap())
        })
    }

    proptest! {
        #[test]
        fn merge_inverts_redirect(x in multilane(), l in -50isize..50) {
            prop_assert_eq!(merge(&redirect(&x, l)).unwrap(), x);
        }

        #[test]
        fn lane_steps_keep_staircase(x in multilane(), v in 1u32..4) {
            let moved = redirect(&x, 0).map_lanes(|lane| step_fast(lane, v, Direction::Forward)).unwrap();
            prop_assert!(is_staircase(&moved));
            prop_assert_eq!(merge(&moved).unwrap(), step_general(&x, v).unwrap());
        }

        #[test]
        fn padded_redirect_round_trips(cells in proptest::collection::vec(0u32..=3, 1..30), l in -10isize..40, lf in 0u32..2, rf in 0u32..2) {
            let x = Configuration::padded(cells, 3, lf * 3, rf * 3).unwrap();
            let b = redirect(&x, l);
            prop_assert_eq!(merge(&b).unwrap(), x.clone());
            prop_assert!(anchor_shift_check(&x, l, 3));
        }
    }
}

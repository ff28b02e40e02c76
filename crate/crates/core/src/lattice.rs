//! Configurations, words, pattern densities, duality and the sequence metric.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact density or flux value.
pub type Density = Ratio<i64>;

/// How sites outside the stored cells are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Indices wrap modulo the length.
    Ring,
    /// Constant tails to the left and right of the stored core.
    Padded { left: u32, right: u32 },
}

/// A finite stand-in for a bi-infinite occupancy sequence with values in `0..=lanes`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    cells: Vec<u32>,
    lanes: u32,
    boundary: Boundary,
}

impl Configuration {
    pub fn new(cells: Vec<u32>, lanes: u32, boundary: Boundary) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if lanes == 0 {
            return Err(Error::NoLanes);
        }
        if let Some((site, &value)) = cells.iter().enumerate().find(|(_, &c)| c > lanes) {
            return Err(Error::CellOutOfRange { site, value, lanes });
        }
        if let Boundary::Padded { left, right } = boundary {
            for fill in [left, right] {
                if fill != 0 && fill != lanes {
                    return Err(Error::InvalidFill(fill));
                }
            }
        }
        Ok(Self { cells, lanes, boundary })
    }

    pub fn ring(cells: Vec<u32>, lanes: u32) -> Result<Self> {
        Self::new(cells, lanes, Boundary::Ring)
    }

    pub fn padded(cells: Vec<u32>, lanes: u32, left: u32, right: u32) -> Result<Self> {
        Self::new(cells, lanes, Boundary::Padded { left, right })
    }

    /// Parses a digit string such as `"0210"`, or a comma-separated list for larger lane counts.
    pub fn parse(text: &str, lanes: u32, boundary: Boundary) -> Result<Self> {
        let text = text.trim();
        let cells = if text.contains(',') {
            text.split(',')
                .map(|t| {
                    let t = t.trim();
                    t.parse::<u32>()
                        .map_err(|_| Error::InvalidDigit(t.chars().next().unwrap_or(',')))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).ok_or(Error::InvalidDigit(c)))
                .collect::<Result<Vec<_>>>()?
        };
        Self::new(cells, lanes, boundary)
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn lanes(&self) -> u32 {
        self.lanes
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_ring(&self) -> bool {
        self.boundary == Boundary::Ring
    }

    /// Value at any integer index, resolving wraparound or fills.
    pub fn get(&self, i: isize) -> u32 {
        let n = self.cells.len() as isize;
        match self.boundary {
            Boundary::Ring => self.cells[i.rem_euclid(n) as usize],
            Boundary::Padded { left, right } => {
                if i < 0 {
                    left
                } else if i >= n {
                    right
                } else {
                    self.cells[i as usize]
                }
            }
        }
    }

    /// Total particles in the stored cells.
    pub fn particles(&self) -> u64 {
        self.cells.iter().map(|&c| u64::from(c)).sum()
    }

    /// Exact mean occupancy of the stored cells.
    pub fn density(&self) -> Density {
        Density::new(self.particles() as i64, self.len() as i64)
    }

    /// Same lanes and boundary, new cells. Caller guarantees validity.
    pub(crate) fn with_cells(&self, cells: Vec<u32>) -> Self {
        debug_assert_eq!(cells.len(), self.cells.len());
        debug_assert!(cells.iter().all(|&c| c <= self.lanes));
        Self { cells, lanes: self.lanes, boundary: self.boundary }
    }

    /// Materializes `left` fill sites before and `right` after the core. Rings are returned unchanged.
    pub fn extended(&self, left: usize, right: usize) -> Self {
        match self.boundary {
            Boundary::Ring => self.clone(),
            Boundary::Padded { left: lf, right: rf } => {
                let mut cells = Vec::with_capacity(self.len() + left + right);
                cells.extend(std::iter::repeat(lf).take(left));
                cells.extend_from_slice(&self.cells);
                cells.extend(std::iter::repeat(rf).take(right));
                Self { cells, lanes: self.lanes, boundary: self.boundary }
            }
        }
    }

    /// Mirror image: site `i` goes to `len - 1 - i`, fills swap sides.
    pub fn reversed(&self) -> Self {
        let cells = self.cells.iter().rev().copied().collect();
        let boundary = match self.boundary {
            Boundary::Ring => Boundary::Ring,
            Boundary::Padded { left, right } => Boundary::Padded { left: right, right: left },
        };
        Self { cells, lanes: self.lanes, boundary }
    }

    /// The subword on an inclusive window.
    pub fn window(&self, w: WindowSpec) -> Word {
        let symbols = (w.start..=w.end).map(|i| self.get(i)).collect();
        Word { symbols, alphabet_max: self.lanes }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lanes <= 9 {
            for &c in &self.cells {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// A finite occupancy sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<u32>,
    alphabet_max: u32,
}

impl Word {
    pub fn new(symbols: Vec<u32>, alphabet_max: u32) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&value) = symbols.iter().find(|&&s| s > alphabet_max) {
            return Err(Error::SymbolOutOfRange { value, max: alphabet_max });
        }
        Ok(Self { symbols, alphabet_max })
    }

    pub fn binary(symbols: &[u32]) -> Result<Self> {
        Self::new(symbols.to_vec(), 1)
    }

    pub fn parse(text: &str, alphabet_max: u32) -> Result<Self> {
        let symbols = text
            .trim()
            .chars()
            .map(|c| c.to_digit(10).ok_or(Error::InvalidDigit(c)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols, alphabet_max)
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_max(&self) -> u32 {
        self.alphabet_max
    }

    pub fn ones(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == 1).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Inclusive index window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub start: isize,
    pub end: isize,
}

impl WindowSpec {
    pub fn new(start: isize, end: isize) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidWindow { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The window covering every stored cell of `x`.
    pub fn full(x: &Configuration) -> Self {
        Self { start: 0, end: x.len() as isize - 1 }
    }
}

/// `⌊b/a⌋` with `0/0 = 1` and `b/0 = 0` for `b > 0`.
fn symbol_quotient(b: u32, a: u32) -> u32 {
    match (b, a) {
        (0, 0) => 1,
        (_, 0) => 0,
        _ => b / a,
    }
}

fn match_weight(text: impl Fn(usize) -> u32, pattern: &[u32]) -> u32 {
    pattern
        .iter()
        .enumerate()
        .map(|(j, &a)| symbol_quotient(text(j), a))
        .min()
        .unwrap_or(0)
}

/// Weighted occurrence density of `a` inside `b`, averaged over `|b|`.
pub fn pattern_density(b: &Word, a: &Word) -> Result<Density> {
    if a.len() > b.len() {
        return Err(Error::PatternTooLong);
    }
    let total: i64 = (0..=b.len() - a.len())
        .map(|i| i64::from(match_weight(|j| b.symbols[i + j], &a.symbols)))
        .sum();
    Ok(Density::new(total, b.len() as i64))
}

/// Pattern density over all `L` cyclic start positions of a ring.
pub fn ring_pattern_density(x: &Configuration, a: &Word) -> Result<Density> {
    if !x.is_ring() {
        return Err(Error::NotRing);
    }
    let total: i64 = (0..x.len() as isize)
        .map(|i| i64::from(match_weight(|j| x.get(i + j as isize), &a.symbols)))
        .sum();
    Ok(Density::new(total, x.len() as i64))
}

/// Pattern density of the subword extracted on `w`.
pub fn window_density(x: &Configuration, w: WindowSpec, a: &Word) -> Result<Density> {
    pattern_density(&x.window(w), a)
}

/// Sitewise complement `c -> lanes - c`, fills included.
pub fn dual(x: &Configuration) -> Configuration {
    let m = x.lanes;
    let cells = x.cells.iter().map(|&c| m - c).collect();
    let boundary = match x.boundary {
        Boundary::Ring => Boundary::Ring,
        Boundary::Padded { left, right } => Boundary::Padded { left: m - left, right: m - right },
    };
    Configuration { cells, lanes: m, boundary }
}

/// Truncated sequence distance with a bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance {
    pub value: f64,
    pub bound: f64,
}

/// `Σ_{|i|≤W} (M+1)^{-|i|} |x_{o+i} - y_{o+i}|`; the true distance lies in `[value, value + bound]`.
pub fn metric_distance(
    x: &Configuration,
    y: &Configuration,
    origin: isize,
    half_width: usize,
) -> Result<Distance> {
    if x.lanes != y.lanes {
        return Err(Error::LaneMismatch { expected: x.lanes, found: y.lanes });
    }
    let base = f64::from(x.lanes + 1);
    let w = half_width as isize;
    let value = (-w..=w)
        .map(|i| {
            let d = x.get(origin + i).abs_diff(y.get(origin + i));
            f64::from(d) * base.powi(-(i.unsigned_abs() as i32))
        })
        .sum();
    let m = f64::from(x.lanes);
    let bound = 2.0 * m * base.powi(-(half_width as i32)) / (1.0 - 1.0 / base);
    Ok(Distance { value, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &[u32]) -> Word {
        Word::new(s.to_vec(), *s.iter().max().unwrap_or(&1).max(&1)).unwrap()
    }

    fn ring(s: &[u32]) -> Configuration {
        Configuration::ring(s.to_vec(), 1).unwrap()
    }

    #[test]
    fn pattern_density_examples() {
        assert_eq!(pattern_density(&w(&[2, 5, 5]), &w(&[1, 2])).unwrap(), Density::new(4, 3));
        assert_eq!(pattern_density(&w(&[0, 0, 1, 1]), &w(&[1])).unwrap(), Density::new(1, 2));
        assert_eq!(pattern_density(&w(&[1, 0, 1]), &w(&[1, 0])).unwrap(), Density::new(1, 3));
        assert_eq!(pattern_density(&w(&[1, 1]), &w(&[1, 0])).unwrap(), Density::from_integer(0));
        assert_eq!(pattern_density(&w(&[1]), &w(&[1, 0])), Err(Error::PatternTooLong));
    }

    #[test]
    fn ring_pattern_density_examples() {
        assert_eq!(ring_pattern_density(&ring(&[1, 0]), &w(&[1])).unwrap(), Density::new(1, 2));
        assert_eq!(
            ring_pattern_density(&ring(&[1, 0, 0, 1, 0, 0]), &w(&[1, 0, 0])).unwrap(),
            Density::new(2, 6)
        );
        assert_eq!(ring_pattern_density(&ring(&[1, 1, 1]), &w(&[1, 0])).unwrap(), Density::from_integer(0));
        let padded = Configuration::padded(vec![1], 1, 0, 0).unwrap();
        assert_eq!(ring_pattern_density(&padded, &w(&[1])), Err(Error::NotRing));
    }

    #[test]
    fn window_density_examples() {
        let x = Configuration::padded(vec![1, 1, 0, 0], 1, 0, 0).unwrap();
        assert_eq!(window_density(&x, WindowSpec::full(&x), &w(&[1])).unwrap(), Density::new(1, 2));
        let x = Configuration::padded(vec![0], 1, 0, 1).unwrap();
        let win = WindowSpec::new(0, 4).unwrap();
        assert_eq!(window_density(&x, win, &w(&[1])).unwrap(), Density::new(4, 5));
        let x = ring(&[1, 0, 1, 1]);
        assert_eq!(window_density(&x, WindowSpec::new(1, 2).unwrap(), &w(&[1])).unwrap(), Density::new(1, 2));
        assert_eq!(
            window_density(&x, WindowSpec::new(1, 1).unwrap(), &w(&[1, 0])),
            Err(Error::PatternTooLong)
        );
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&ring(&[1, 0, 1])), ring(&[0, 1, 0]));
        let x = Configuration::ring(vec![0, 2, 1], 2).unwrap();
        assert_eq!(dual(&x).cells(), &[2, 0, 1]);
        let p = Configuration::padded(vec![0, 1], 1, 0, 1).unwrap();
        assert_eq!(dual(&p).boundary(), Boundary::Padded { left: 1, right: 0 });
    }

    #[test]
    fn metric_examples() {
        let x = Configuration::padded(vec![0; 9], 1, 0, 0).unwrap();
        let d = metric_distance(&x, &x, 4, 20).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.bound < 1e-5);

        let mut cells = vec![0; 9];
        cells[4] = 1;
        let y = Configuration::padded(cells.clone(), 1, 0, 0).unwrap();
        assert_eq!(metric_distance(&x, &y, 4, 10).unwrap().value, 1.0);

        cells[4] = 0;
        cells[1] = 1;
        cells[6] = 1;
        let y = Configuration::padded(cells, 1, 0, 0).unwrap();
        let d = metric_distance(&x, &y, 4, 10).unwrap();
        assert!((d.value - (0.125 + 0.25)).abs() < 1e-15);

        let z = Configuration::padded(vec![0; 9], 2, 0, 0).unwrap();
        assert!(matches!(metric_distance(&x, &z, 0, 3), Err(Error::LaneMismatch { .. })));
    }

    #[test]
    fn constructors_validate() {
        assert_eq!(Configuration::ring(vec![], 1), Err(Error::EmptyConfiguration));
        assert!(matches!(Configuration::ring(vec![2], 1), Err(Error::CellOutOfRange { .. })));
        assert_eq!(Configuration::padded(vec![0], 2, 1, 0), Err(Error::InvalidFill(1)));
        assert_eq!(Configuration::parse("0210", 2, Boundary::Ring).unwrap().cells(), &[0, 2, 1, 0]);
        assert_eq!(Configuration::parse("3,10", 10, Boundary::Ring).unwrap().cells(), &[3, 10]);
        assert_eq!(Configuration::parse("0x", 1, Boundary::Ring), Err(Error::InvalidDigit('x')));
        assert!(WindowSpec::new(3, 2).is_err());
    }

    #[test]
    fn enclosure_exhaustive() {
        for len in 1..=10usize {
            for bits in 0u32..(1 << len) {
                let x = ring(&(0..len).map(|i| (bits >> i) & 1).collect::<Vec<_>>());
                for blen in 1..=4usize {
                    for bb in 0u32..(1 << blen) {
                        let b = Word::binary(&(0..blen).map(|i| (bb >> i) & 1).collect::<Vec<_>>()).unwrap();
                        let rb = ring_pattern_density(&x, &b).unwrap();
                        for alen in 1..=blen {
                            for start in 0..=blen - alen {
                                let a = Word::binary(&b.symbols()[start..start + alen]).unwrap();
                                let ra = ring_pattern_density(&x, &a).unwrap();
                                assert!(ra >= rb * pattern_density(&b, &a).unwrap(), "x={x} a={a} b={b}");
                            }
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn ones_and_zeros_sum_to_one(bits in proptest::collection::vec(0u32..=1, 1..40)) {
            let b = Word::binary(&bits).unwrap();
            let total = pattern_density(&b, &w(&[1])).unwrap()
                + pattern_density(&b, &Word::binary(&[0]).unwrap()).unwrap();
            prop_assert_eq!(total, Density::from_integer(1));
        }

        #[test]
        fn dual_is_involution(m in 1u32..5, raw in proptest::collection::vec(0u32..100, 1..30)) {
            let cells: Vec<u32> = raw.iter().map(|c| c % (m + 1)).collect();
            let x = Configuration::ring(cells, m).unwrap();
            prop_assert_eq!(dual(&dual(&x)), x.clone());
            let one = Word::new(vec![1], m).unwrap();
            let rho = ring_pattern_density(&x, &one).unwrap();
            let rho_dual = ring_pattern_density(&dual(&x), &one).unwrap();
            if m == 1 {
                prop_assert_eq!(rho + rho_dual, Density::from_integer(1));
            }
            prop_assert_eq!(x.density() + dual(&x).density(), Density::from_integer(i64::from(m)));
        }

        #[test]
        fn metric_axioms(
            a in proptest::collection::vec(0u32..=2, 12),
            b in proptest::collection::vec(0u32..=2, 12),
            c in proptest::collection::vec(0u32..=2, 12),
        ) {
            let x = Configuration::padded(a, 2, 0, 0).unwrap();
            let y = Configuration::padded(b, 2, 0, 0).unwrap();
            let z = Configuration::padded(c, 2, 0, 0).unwrap();
            let d = |p: &Configuration, q: &Configuration| metric_distance(p, q, 6, 8).unwrap().value;
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert_eq!(d(&x, &y) == 0.0, x.window(WindowSpec::new(-2, 14).unwrap()) == y.window(WindowSpec::new(-2, 14).unwrap()));
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
        }
    }
}

//! Gap coding of fast-particle configurations over the alphabet `{1, 0_1, .., 0_v}`.
//!
//! A gap of `g` empty sites between two particles is written as `⌊g/v⌋` copies of `0_v` followed
//! by `0_{g mod v}` (omitted when zero). On padded words the run before the first particle is
//! written remainder-first, so that the full blocks sit against the particle, and the run after
//! the last particle is written like an internal gap. Under this coding one step of the fast map
//! becomes the swap rule `1 0_i -> 0_i 1`.

use std::fmt;

use crate::clusters::simulated_lifetime;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FastSymbol {
    One,
    /// A block of `i` empty sites.
    Zero(u32),
}

impl FastSymbol {
    /// Number of lattice sites the symbol stands for.
    pub fn width(self) -> usize {
        match self {
            FastSymbol::One => 1,
            FastSymbol::Zero(i) => i as usize,
        }
    }
}

impl fmt::Display for FastSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FastSymbol::One => write!(f, "1"),
            FastSymbol::Zero(i) => write!(f, "0_{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FastBoundary {
    Ring,
    /// Surrounded by `0_v` on both sides.
    Padded,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FastWord {
    symbols: Vec<FastSymbol>,
    v: u32,
    boundary: FastBoundary,
    /// Ring site at which the first symbol starts.
    offset: usize,
}

impl FastWord {
    pub fn new(symbols: Vec<FastSymbol>, v: u32, boundary: FastBoundary) -> Result<Self> {
        if v == 0 {
            return Err(Error::ZeroVelocity);
        }
        for s in &symbols {
            if let FastSymbol::Zero(i) = *s {
                if i == 0 || i > v {
                    return Err(Error::ZeroIndexOutOfRange { index: i, v });
                }
            }
        }
        Ok(Self { symbols, v, boundary, offset: 0 })
    }

    /// Parses whitespace-separated tokens `1` and `0_i`.
    pub fn parse(text: &str, v: u32, boundary: FastBoundary) -> Result<Self> {
        let symbols = text
            .split_whitespace()
            .map(|tok| match tok {
                "1" => Ok(FastSymbol::One),
                _ => tok
                    .strip_prefix("0_")
                    .and_then(|i| i.parse::<u32>().ok())
                    .map(FastSymbol::Zero)
                    .ok_or(Error::InvalidDigit(tok.chars().next().unwrap_or(' '))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols, v, boundary)
    }

    pub fn symbols(&self) -> &[FastSymbol] {
        &self.symbols
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn boundary(&self) -> FastBoundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == FastSymbol::One).count()
    }

    /// Number of lattice sites the word expands to.
    pub fn decoded_len(&self) -> usize {
        self.symbols.iter().map(|s| s.width()).sum()
    }

    fn with_symbols(&self, symbols: Vec<FastSymbol>, offset: usize) -> Self {
        Self { symbols, v: self.v, boundary: self.boundary, offset }
    }
}

impl fmt::Display for FastWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn gap_code(g: usize, v: u32, out: &mut Vec<FastSymbol>) {
    let v_us = v as usize;
    out.extend(std::iter::repeat(FastSymbol::Zero(v)).take(g / v_us));
    if g % v_us > 0 {
        out.push(FastSymbol::Zero((g % v_us) as u32));
    }
}

fn lead_code(g: usize, v: u32, out: &mut Vec<FastSymbol>) {
    let v_us = v as usize;
    if g % v_us > 0 {
        out.push(FastSymbol::Zero((g % v_us) as u32));
    }
    out.extend(std::iter::repeat(FastSymbol::Zero(v)).take(g / v_us));
}

/// Canonical coding of a binary configuration.
pub fn encode(x: &Configuration, v: u32) -> Result<FastWord> {
    if x.lanes() != 1 {
        return Err(Error::LaneMismatch { expected: 1, found: x.lanes() });
    }
    if v == 0 {
        return Err(Error::ZeroVelocity);
    }
    let n = x.len();
    let positions: Vec<usize> = (0..n).filter(|&i| x.cells()[i] == 1).collect();
    let mut symbols = Vec::with_capacity(n);
    match x.boundary() {
        Boundary::Ring => {
            let first = *positions.first().ok_or(Error::NoGapAnchor)?;
            for (k, &p) in positions.iter().enumerate() {
                let next = positions.get(k + 1).copied().unwrap_or(first + n);
                symbols.push(FastSymbol::One);
                gap_code(next - p - 1, v, &mut symbols);
            }
            Ok(FastWord { symbols, v, boundary: FastBoundary::Ring, offset: first })
        }
        Boundary::Padded { left, right } => {
            if left != 0 || right != 0 {
                return Err(Error::FastFill);
            }
            let first = positions.first().copied().unwrap_or(n);
            lead_code(first, v, &mut symbols);
            for (k, &p) in positions.iter().enumerate() {
                let next = positions.get(k + 1).copied().unwrap_or(n);
                symbols.push(FastSymbol::One);
                gap_code(next - p - 1, v, &mut symbols);
            }
            Ok(FastWord { symbols, v, boundary: FastBoundary::Padded, offset: 0 })
        }
    }
}

/// Expands every symbol into sites.
pub fn decode(y: &FastWord) -> Result<Configuration> {
    let mut expanded = Vec::with_capacity(y.decoded_len());
    for s in &y.symbols {
        match *s {
            FastSymbol::One => expanded.push(1),
            FastSymbol::Zero(i) => expanded.extend(std::iter::repeat(0).take(i as usize)),
        }
    }
    match y.boundary {
        FastBoundary::Ring => {
            let n = expanded.len();
            if n == 0 {
                return Err(Error::EmptyConfiguration);
            }
            let mut cells = vec![0u32; n];
            for (j, c) in expanded.into_iter().enumerate() {
                cells[(y.offset + j) % n] = c;
            }
            Configuration::ring(cells, 1)
        }
        FastBoundary::Padded => Configuration::padded(expanded, 1, 0, 0),
    }
}

/// Re-encodes the decoded word into canonical form.
pub fn normalize(y: &FastWord) -> Result<FastWord> {
    encode(&decode(y)?, y.v)
}

fn is_swap_pair(a: FastSymbol, b: FastSymbol) -> bool {
    a == FastSymbol::One && matches!(b, FastSymbol::Zero(_))
}

/// Swaps the pairs `(1, 0_i)` that lie inside the word.
fn swap_interior(symbols: &[FastSymbol]) -> Vec<FastSymbol> {
    let mut out = symbols.to_vec();
    for k in 0..symbols.len().saturating_sub(1) {
        if is_swap_pair(symbols[k], symbols[k + 1]) {
            out.swap(k, k + 1);
        }
    }
    out
}

/// Applies `1 0_i -> 0_i 1` to every pair of the pre-step word at once.
///
/// On rings the pair formed by the last and first symbols also swaps. On padded words a final
/// `1` meets the `0_v` fill and leaves the word, leaving one empty site behind.
pub fn step_substitution(y: &FastWord) -> FastWord {
    let n = y.symbols.len();
    let mut out = swap_interior(&y.symbols);
    let mut offset = y.offset;
    match y.boundary {
        FastBoundary::Ring => {
            if n >= 2 && is_swap_pair(y.symbols[n - 1], y.symbols[0]) {
                out.swap(0, n - 1);
                let width = y.symbols[0].width();
                offset = (offset + width - 1) % y.decoded_len();
            }
        }
        FastBoundary::Padded => {
            if n >= 1 && y.symbols[n - 1] == FastSymbol::One {
                out[n - 1] = FastSymbol::Zero(1);
            }
        }
    }
    y.with_symbols(out, offset)
}

/// One step inside the coded space: swap, then recode.
pub fn step_tilde(y: &FastWord) -> Result<FastWord> {
    normalize(&step_substitution(y))
}

/// `-v` for a particle, `i` for `0_i`.
pub fn ind(s: FastSymbol, v: u32) -> i64 {
    match s {
        FastSymbol::One => -i64::from(v),
        FastSymbol::Zero(i) => i64::from(i),
    }
}

/// Start of the shortest word ending at `i` whose index sum exceeds `-v`, scanning leftward.
///
/// For `v = 1` this is the start of the shortest balanced word ending at `i`.
pub fn fast_minimal_index(a: &FastWord, i: usize) -> Option<usize> {
    let v = a.v;
    let mut sum = ind(*a.symbols.get(i)?, v);
    for k in (0..i).rev() {
        sum += ind(a.symbols[k], v);
        if sum > -i64::from(v) {
            return Some(k);
        }
    }
    None
}

fn require_minimal(a: &FastWord) -> Result<()> {
    let n = a.symbols.len();
    if n == 0 || a.symbols[n - 1] != FastSymbol::One || fast_minimal_index(a, n - 1) != Some(0) {
        return Err(Error::NotMinimalFastWord);
    }
    Ok(())
}

/// Life-time of the cluster at the end of a minimal fast word: its particle count minus one.
pub fn fast_lifetime(a: &FastWord) -> Result<usize> {
    require_minimal(a)?;
    Ok(a.ones() - 1)
}

/// Steps until the terminal cluster of the decoded word, embedded in empty space, has size ≤ 1.
pub fn simulated_fast_lifetime(a: &FastWord) -> Result<Option<usize>> {
    let word = FastWord { boundary: FastBoundary::Padded, offset: 0, ..a.clone() };
    let x = decode(&word)?;
    let n = x.len();
    let ones = x.cells().iter().rev().take_while(|&&c| c == 1).count();
    if ones == 0 {
        return Err(Error::NotMinimalFastWord);
    }
    // Room for every particle to drive away without touching the right edge.
    let x = x.extended(0, n * (a.v as usize + 1) + 2);
    simulated_lifetime(&x, (n - ones) as isize, a.v, 4 * n + 8)
}

/// Steps the word, drops its first and last symbols, and recodes the rest.
pub fn gamma_step_fast(a: &FastWord) -> Result<FastWord> {
    let n = a.symbols.len();
    if n < 3 {
        return Err(Error::WordTooShort { needed: 3, found: n });
    }
    let moved = swap_interior(&a.symbols);
    let inner = FastWord { symbols: moved[1..n - 1].to_vec(), v: a.v, boundary: FastBoundary::Padded, offset: 0 };
    normalize(&inner)
}

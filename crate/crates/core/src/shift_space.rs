//! Chains of full shifts linked by one-block factor maps, cylinders, the
//! self-affine metric and the cylinder structure of its balls.
//!
//! Levels are indexed from 0: level 0 is the base shift `X_1`, and
//! `factor_maps[l]` sends symbols of level `l` to symbols of level `l + 1`.
//! The composed projection `tau(l)` maps level 0 to level `l`, with `tau(0)`
//! the identity. Symbols are dense codes `0..alphabet_size(l)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u32;

/// Relative tolerance used to snap `A_i n / a_1` onto an integer.
const SNAP_TOL: f64 = 1e-9;

/// JSON form of a factor chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub alphabets: Vec<usize>,
    #[serde(default)]
    pub factor_maps: Vec<Vec<Symbol>>,
}

/// `X_1 -> X_2 -> ... -> X_k`, full shifts with one-block factor maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainSpec", into = "ChainSpec")]
pub struct FactorChain {
    alphabet_sizes: Vec<usize>,
    factor_maps: Vec<Vec<Symbol>>,
    /// `fibers[l][j]`: symbols of level `l` sent to `j` at level `l + 1`.
    fibers: Vec<Vec<Vec<Symbol>>>,
    /// `taus[l][s]`: image of base symbol `s` at level `l`.
    taus: Vec<Vec<Symbol>>,
}

impl TryFrom<ChainSpec> for FactorChain {
    type Error = Error;
    fn try_from(spec: ChainSpec) -> Result<Self> {
        FactorChain::new(spec.alphabets, spec.factor_maps)
    }
}

impl From<FactorChain> for ChainSpec {
    fn from(chain: FactorChain) -> Self {
        ChainSpec {
            alphabets: chain.alphabet_sizes,
            factor_maps: chain.factor_maps,
        }
    }
}

impl FactorChain {
    pub fn new(alphabet_sizes: Vec<usize>, factor_maps: Vec<Vec<Symbol>>) -> Result<Self> {
        let k = alphabet_sizes.len();
        if k == 0 {
            return Err(Error::InvalidChain("at least one level is required".into()));
        }
        if let Some(l) = alphabet_sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidChain(format!("alphabet {l} is empty")));
        }
        if factor_maps.len() != k - 1 {
            return Err(Error::InvalidChain(format!(
                "{k} levels need {} factor maps, got {}",
                k - 1,
                factor_maps.len()
            )));
        }
        let mut fibers = Vec::with_capacity(k - 1);
        for (l, map) in factor_maps.iter().enumerate() {
            if map.len() != alphabet_sizes[l] {
                return Err(Error::InvalidChain(format!(
                    "factor map {l} must list a target for each of {} symbols, got {}",
                    alphabet_sizes[l],
                    map.len()
                )));
            }
            let mut fib = vec![Vec::new(); alphabet_sizes[l + 1]];
            for (s, &t) in map.iter().enumerate() {
                if t as usize >= alphabet_sizes[l + 1] {
                    return Err(Error::InvalidChain(format!(
                        "factor map {l} sends symbol {s} to {t}, outside alphabet of size {}",
                        alphabet_sizes[l + 1]
                    )));
                }
                fib[t as usize].push(s as Symbol);
            }
            if let Some(j) = fib.iter().position(Vec::is_empty) {
                return Err(Error::InvalidChain(format!(
                    "factor map {l} is not onto: symbol {j} of level {} has an empty fiber",
                    l + 1
                )));
            }
            fibers.push(fib);
        }
        let mut taus = Vec::with_capacity(k);
        taus.push((0..alphabet_sizes[0] as Symbol).collect::<Vec<_>>());
        for map in &factor_maps {
            let prev: &Vec<Symbol> = taus.last().expect("non-empty");
            let next = prev.iter().map(|&s| map[s as usize]).collect();
            taus.push(next);
        }
        Ok(Self {
            alphabet_sizes,
            factor_maps,
            fibers,
            taus,
        })
    }

    /// A single full shift over `n` symbols.
    pub fn full_shift(n: usize) -> Result<Self> {
        Self::new(vec![n], vec![])
    }

    /// Number of levels `k`.
    pub fn levels(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_size(&self, level: usize) -> usize {
        self.alphabet_sizes[level]
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn factor_map(&self, level: usize) -> &[Symbol] {
        &self.factor_maps[level]
    }

    /// Symbols of `level` mapped onto `target` of `level + 1`.
    pub fn fiber(&self, level: usize, target: Symbol) -> &[Symbol] {
        &self.fibers[level][target as usize]
    }

    pub fn fibers(&self, level: usize) -> &[Vec<Symbol>] {
        &self.fibers[level]
    }

    /// `tau_level` applied to a single base symbol.
    #[inline]
    pub fn tau_symbol(&self, level: usize, s: Symbol) -> Symbol {
        self.taus[level][s as usize]
    }

    /// Projects a symbol from level `from` down the chain to level `to >= from`.
    pub fn project_symbol(&self, from: usize, to: usize, mut s: Symbol) -> Symbol {
        for l in from..to {
            s = self.factor_maps[l][s as usize];
        }
        s
    }

    /// Symbol-wise projection of a raw word from level `from` to level `to`.
    pub fn project_symbols(&self, from: usize, to: usize, word: &[Symbol]) -> Vec<Symbol> {
        if from == 0 {
            word.iter().map(|&s| self.taus[to][s as usize]).collect()
        } else {
            word.iter().map(|&s| self.project_symbol(from, to, s)).collect()
        }
    }

    pub fn check_symbols(&self, level: usize, symbols: &[Symbol]) -> Result<()> {
        if level >= self.levels() {
            return Err(Error::InvalidWord(format!(
                "level {level} does not exist (chain has {} levels)",
                self.levels()
            )));
        }
        let size = self.alphabet_sizes[level];
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= size) {
            return Err(Error::InvalidWord(format!(
                "symbol {bad} out of range for level {level} (alphabet size {size})"
            )));
        }
        Ok(())
    }
}

/// Exponent vector `a = (a_1, ..., a_k)` with `a_1 > 0`, `a_i >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    a: Vec<f64>,
    /// `cumulative[i] = a_1 + ... + a_i`, with `cumulative[0] = 0`.
    cumulative: Vec<f64>,
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(a: Vec<f64>) -> Result<Self> {
        WeightVector::new(a)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.a
    }
}

impl WeightVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidWeights("weight vector is empty".into()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidWeights("weights must be finite".into()));
        }
        if a[0] <= 0.0 {
            return Err(Error::InvalidWeights(format!("a_1 = {} must be positive", a[0])));
        }
        if let Some(i) = a.iter().position(|&x| x < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "a_{} = {} must be non-negative",
                i + 1,
                a[i]
            )));
        }
        let mut cumulative = Vec::with_capacity(a.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for &x in &a {
            acc += x;
            cumulative.push(acc);
        }
        Ok(Self { a, cumulative })
    }

    /// Weights of a self-affine carpet-type system with contraction ratios
    /// `1/m_1 <= 1/m_2 <= ... <= 1/m_k`: `a_1 = 1/ln m_1` and
    /// `a_i = 1/ln m_i - 1/ln m_{i-1}`.
    pub fn from_log_scales(m: &[f64]) -> Result<Self> {
        if m.iter().any(|&x| !(x > 1.0)) {
            return Err(Error::InvalidWeights("scales must exceed 1".into()));
        }
        let inv: Vec<f64> = m.iter().map(|x| 1.0 / x.ln()).collect();
        let mut a = Vec::with_capacity(m.len());
        for (i, &v) in inv.iter().enumerate() {
            a.push(if i == 0 { v } else { v - inv[i - 1] });
        }
        if a.iter().skip(1).any(|&x| x < 0.0) {
            return Err(Error::InvalidWeights("scales must be non-increasing".into()));
        }
        Self::new(a)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// `a_i`, 1-based.
    pub fn weight(&self, i: usize) -> f64 {
        self.a[i - 1]
    }

    /// `A_i = a_1 + ... + a_i`; `A_0 = 0`.
    pub fn cumulative(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    /// `A_k`.
    pub fn total(&self) -> f64 {
        self.cumulative[self.a.len()]
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a.iter().map(|x| x * lambda).collect())
    }

    pub fn check_against(&self, chain: &FactorChain) -> Result<()> {
        if self.len() != chain.levels() {
            return Err(Error::InvalidWeights(format!(
                "weight vector has {} entries but chain has {} levels",
                self.len(),
                chain.levels()
            )));
        }
        Ok(())
    }
}

/// A finite word over the alphabet of one level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    level: usize,
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(chain: &FactorChain, level: usize, symbols: Vec<Symbol>) -> Result<Self> {
        chain.check_symbols(level, &symbols)?;
        Ok(Self { level, symbols })
    }

    /// Parses a string of decimal digits, one per symbol.
    pub fn parse(chain: &FactorChain, level: usize, digits: &str) -> Result<Self> {
        let symbols = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| Error::InvalidWord(format!("'{c}' is not a digit")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chain, level, symbols)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            level: self.level,
            symbols: self.symbols[..n.min(self.symbols.len())].to_vec(),
        }
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_symbols(&self.symbols))
    }
}

/// Digits when every symbol is below 10, dot-separated codes otherwise.
pub fn format_symbols(symbols: &[Symbol]) -> String {
    if symbols.iter().all(|&s| s < 10) {
        symbols.iter().map(|s| char::from(b'0' + *s as u8)).collect()
    } else {
        symbols
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// `l_i(n) = min { p : p >= A_i n / a_1 }`, with `l_0(n) = 0`.
pub fn ell(n: usize, i: usize, a: &WeightVector) -> usize {
    if i == 0 {
        return 0;
    }
    let x = (a.cumulative(i) / a.weight(1)) * n as f64;
    let r = x.round();
    if (x - r).abs() <= SNAP_TOL * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Applies `tau_i` symbol-wise to a base-level word.
pub fn tau_word(chain: &FactorChain, i: usize, w: &Word) -> Result<Word> {
    if w.level != 0 {
        return Err(Error::LevelMismatch {
            expected: 0,
            found: w.level,
        });
    }
    if i >= chain.levels() {
        return Err(Error::InvalidWord(format!("no level {i} in a {}-level chain", chain.levels())));
    }
    Ok(Word {
        level: i,
        symbols: chain.project_symbols(0, i, &w.symbols),
    })
}

/// Cylinder description of the closed ball `B(x, e^{-n/a_1})`.
///
/// `constraints[l]` is the level-`l` word `tau_l(x_1 ... x_{l_{l+1}(n)})`; a
/// point lies in the ball exactly when its level-`l` image starts with
/// `constraints[l]` for every level.
#[derive(Debug, Clone, PartialEq)]
pub struct BallShape {
    pub n: usize,
    pub constraints: Vec<Word>,
}

impl BallShape {
    /// Whether the base-level word `y` (at least as long as the deepest
    /// constraint) satisfies every constraint.
    pub fn contains(&self, chain: &FactorChain, y: &[Symbol]) -> bool {
        self.constraints.iter().enumerate().all(|(l, c)| {
            c.len() <= y.len()
                && y[..c.len()]
                    .iter()
                    .zip(c.symbols())
                    .all(|(&s, &t)| chain.tau_symbol(l, s) == t)
        })
    }

    /// Length of the base prefix that determines membership.
    pub fn depth(&self) -> usize {
        self.constraints.last().map_or(0, Word::len)
    }
}

pub fn ball_shape(
    chain: &FactorChain,
    a: &WeightVector,
    x_prefix: &Word,
    n: usize,
) -> Result<BallShape> {
    a.check_against(chain)?;
    if x_prefix.level != 0 {
        return Err(Error::LevelMismatch {
            expected: 0,
            found: x_prefix.level,
        });
    }
    let k = chain.levels();
    let needed = ell(n, k, a);
    if x_prefix.len() < needed {
        return Err(Error::PrefixTooShort {
            needed,
            got: x_prefix.len(),
        });
    }
    let constraints = (0..k)
        .map(|l| Word {
            level: l,
            symbols: chain.project_symbols(0, l, &x_prefix.symbols[..ell(n, l + 1, a)]),
        })
        .collect();
    Ok(BallShape { n, constraints })
}

/// Length of the common prefix of two equal-length words.
fn agreement(x: &[Symbol], y: &[Symbol]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

/// `log d_a(x, y) = max_i ( -|tau_{i-1} x ^ tau_{i-1} y| / A_i )` on finite
/// words, full agreement counting as agreement length `L`.
pub fn log_metric_d_a(chain: &FactorChain, a: &WeightVector, x: &Word, y: &Word) -> Result<f64> {
    a.check_against(chain)?;
    for w in [x, y] {
        if w.level != 0 {
            return Err(Error::LevelMismatch {
                expected: 0,
                found: w.level,
            });
        }
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut xi = x.symbols.clone();
    let mut yi = y.symbols.clone();
    for l in 0..chain.levels() {
        if l > 0 {
            let map = chain.factor_map(l - 1);
            xi.iter_mut().for_each(|s| *s = map[*s as usize]);
            yi.iter_mut().for_each(|s| *s = map[*s as usize]);
        }
        let v = -(agreement(&xi, &yi) as f64) / a.cumulative(l + 1);
        best = best.max(v);
    }
    Ok(best)
}

pub fn metric_d_a(chain: &FactorChain, a: &WeightVector, x: &Word, y: &Word) -> Result<f64> {
    log_metric_d_a(chain, a, x, y).map(f64::exp)
}

/// `d_a(x, y) <= e^{-n/a_1}`, compared in log scale with the same integer
/// snapping tolerance used by [`ell`].
pub fn in_closed_ball(
    chain: &FactorChain,
    a: &WeightVector,
    x: &Word,
    y: &Word,
    n: usize,
) -> Result<bool> {
    let log_d = log_metric_d_a(chain, a, x, y)?;
    let radius = -(n as f64) / a.weight(1);
    Ok(log_d <= radius + SNAP_TOL * radius.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn carpet() -> (FactorChain, WeightVector) {
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap();
        let a = WeightVector::from_log_scales(&[3.0, 2.0]).unwrap();
        (chain, a)
    }

    #[test]
    fn ell_examples() {
        let (_, a) = carpet();
        assert_eq!(ell(5, 0, &a), 0);
        assert_eq!(ell(5, 1, &a), 5);
        // 7 * ln 3 / ln 2 = 11.09...
        assert_eq!(ell(7, 2, &a), 12);
        let b = WeightVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(ell(3, 2, &b), 6);
        let c = WeightVector::new(vec![0.1, 0.2]).unwrap();
        assert_eq!(ell(1, 2, &c), 3);
    }

    #[test]
    fn tau_examples() {
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap();
        let w = Word::parse(&chain, 0, "0120").unwrap();
        assert_eq!(tau_word(&chain, 0, &w).unwrap().to_string(), "0120");
        assert_eq!(tau_word(&chain, 1, &w).unwrap().to_string(), "0010");
        let chain3 = FactorChain::new(vec![3, 2, 1], vec![vec![0, 0, 1], vec![0, 0]]).unwrap();
        assert_eq!(tau_word(&chain3, 2, &w).unwrap().to_string(), "0000");
        let lvl1 = Word::parse(&chain, 1, "01").unwrap();
        assert!(matches!(
            tau_word(&chain, 1, &lvl1),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn chain_validation() {
        assert!(FactorChain::new(vec![], vec![]).is_err());
        assert!(FactorChain::new(vec![2, 2], vec![vec![0, 2]]).is_err());
        assert!(FactorChain::new(vec![2, 2], vec![vec![0, 0]]).is_err());
        assert!(FactorChain::new(vec![2, 2], vec![]).is_err());
        assert!(WeightVector::new(vec![0.0, 1.0]).is_err());
        assert!(WeightVector::new(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn ball_shape_examples() {
        let chain = FactorChain::full_shift(2).unwrap();
        let a = WeightVector::new(vec![1.0]).unwrap();
        let x = Word::parse(&chain, 0, "01010").unwrap();
        let b = ball_shape(&chain, &a, &x, 4).unwrap();
        assert_eq!(b.constraints.len(), 1);
        assert_eq!(b.constraints[0].to_string(), "0101");

        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap();
        let a = WeightVector::new(vec![1.0, 1.0]).unwrap();
        let x = Word::parse(&chain, 0, "012012").unwrap();
        let b = ball_shape(&chain, &a, &x, 3).unwrap();
        assert_eq!(b.constraints[0].to_string(), "012");
        assert_eq!(b.constraints[1].to_string(), "001001");
        assert!(matches!(
            ball_shape(&chain, &a, &x.prefix(5), 3),
            Err(Error::PrefixTooShort { needed: 6, got: 5 })
        ));

        let a0 = WeightVector::new(vec![1.0, 0.0]).unwrap();
        let b = ball_shape(&chain, &a0, &x, 3).unwrap();
        assert_eq!(b.constraints[0].to_string(), "012");
        assert_eq!(b.constraints[1].to_string(), "001");
    }

    #[test]
    fn metric_examples() {
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 1, 1]]).unwrap();
        let a = WeightVector::new(vec![1.0, 1.0]).unwrap();
        let x = Word::parse(&chain, 0, "01").unwrap();
        let y = Word::parse(&chain, 0, "02").unwrap();
        let d = metric_d_a(&chain, &a, &x, &y).unwrap();
        assert!((d - (-1f64).exp()).abs() < 1e-15);
        assert!((metric_d_a(&chain, &a, &x, &x).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let z = Word::parse(&chain, 0, "21").unwrap();
        assert_eq!(metric_d_a(&chain, &a, &x, &z).unwrap(), 1.0);
        assert!(metric_d_a(&chain, &a, &x, &x.prefix(1)).is_err());
    }
}

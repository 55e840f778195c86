use crate::error::{Error, Result};
use crate::shift_space::Symbol;

/// Largest number of (word, completion) pairs scanned when tabulating the
/// boundary maxima of a finite-depth potential.
const TAIL_SCAN_LIMIT: u128 = 1 << 28;

/// Additive potential generated by a strictly positive function of `m`
/// consecutive symbols: `log phi_n(x) = sum_{j<n} g(x_{j+1} ... x_{j+m})`.
///
/// `log_table` is row-major over `A^m`, first symbol most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDepth {
    level: usize,
    alphabet: usize,
    depth: usize,
    log_table: Vec<f64>,
    /// `tail_max[r][u]` for `u` in `A^r`, `r < depth`: the largest total of the
    /// `r` windows starting inside `u` over all completions of `u`.
    tail_max: Vec<Vec<f64>>,
    qm: f64,
}

impl FiniteDepth {
    pub fn new(level: usize, alphabet: usize, depth: usize, log_table: Vec<f64>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidPotential("depth must be at least 1".into()));
        }
        if alphabet == 0 {
            return Err(Error::InvalidPotential("alphabet is empty".into()));
        }
        let expected = (alphabet as u128).checked_pow(depth as u32);
        if expected != Some(log_table.len() as u128) {
            return Err(Error::InvalidPotential(format!(
                "table for depth {depth} over {alphabet} symbols needs {alphabet}^{depth} entries, got {}",
                log_table.len()
            )));
        }
        if let Some(i) = log_table.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidPotential(format!("table entry {i} is not finite")));
        }
        let scan = (alphabet as u128).saturating_pow(2 * depth as u32 - 2);
        if scan > TAIL_SCAN_LIMIT {
            return Err(Error::Unsupported(format!(
                "depth {depth} over {alphabet} symbols is too large to tabulate"
            )));
        }
        let mut p = Self {
            level,
            alphabet,
            depth,
            log_table,
            tail_max: Vec::new(),
            qm: 0.0,
        };
        p.tail_max = (0..depth).map(|r| p.tabulate_tail(r)).collect();
        p.qm = p.distortion_constant();
        Ok(p)
    }

    /// The zero potential (`phi == 1`) at `level`.
    pub fn zero(level: usize, alphabet: usize) -> Self {
        Self::new(level, alphabet, 1, vec![0.0; alphabet]).expect("valid zero table")
    }

    /// Depth-1 potential with per-symbol log weights.
    pub fn depth_one(level: usize, log_weights: Vec<f64>) -> Result<Self> {
        let n = log_weights.len();
        Self::new(level, n, 1, log_weights)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_table
    }

    /// Largest minus smallest table entry.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = min_max(&self.log_table);
        hi - lo
    }

    /// Almost-additivity constant of the sup-over-cylinder weights.
    pub fn qm_log_constant(&self) -> f64 {
        self.qm
    }

    /// The depth-`d` table this one extends, if the entries ignore the last
    /// `depth - d` symbols of every block.
    pub fn truncated(&self, d: usize) -> Option<FiniteDepth> {
        if d == 0 || d > self.depth {
            return None;
        }
        let block = self.alphabet.pow((self.depth - d) as u32);
        let mut table = Vec::with_capacity(self.log_table.len() / block);
        for row in self.log_table.chunks(block) {
            if row.iter().any(|&v| v != row[0]) {
                return None;
            }
            table.push(row[0]);
        }
        FiniteDepth::new(self.level, self.alphabet, d, table).ok()
    }

    /// Same additive potential written as a depth-`d` table, `d >= depth`;
    /// the extra trailing symbols are ignored.
    pub fn broadcast(&self, d: usize) -> Result<FiniteDepth> {
        if d < self.depth {
            return Err(Error::InvalidPotential(format!(
                "cannot broadcast depth {} down to {d}",
                self.depth
            )));
        }
        let block = self.alphabet.pow((d - self.depth) as u32);
        let table = self
            .log_table
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, block))
            .collect();
        FiniteDepth::new(self.level, self.alphabet, d, table)
    }

    #[inline]
    pub fn g(&self, block_index: usize) -> f64 {
        self.log_table[block_index]
    }

    #[inline]
    pub(crate) fn tail(&self, r: usize, index: usize) -> f64 {
        self.tail_max[r][index]
    }

    /// `log sup_{x in [I]} phi_n(x)` for `n = |I|`.
    pub fn log_phi(&self, word: &[Symbol]) -> f64 {
        let n = word.len();
        let m = self.depth;
        let na = self.alphabet;
        let mut total = 0.0;
        if n >= m {
            let modulus = na.pow(m as u32 - 1);
            let mut idx = 0usize;
            for &s in &word[..m - 1] {
                idx = idx * na + s as usize;
            }
            for &s in &word[m - 1..] {
                idx = idx * na + s as usize;
                total += self.log_table[idx];
                idx %= modulus;
            }
        }
        let r = n.min(m - 1);
        total + self.tail_max[r][index_of(&word[n - r..], na)]
    }

    /// Birkhoff sum of `g` along the word, evaluating only windows that fit.
    pub fn exact_windows(&self, word: &[Symbol]) -> f64 {
        let m = self.depth;
        if word.len() < m {
            return 0.0;
        }
        word.windows(m)
            .map(|w| self.log_table[index_of(w, self.alphabet)])
            .sum()
    }

    fn tabulate_tail(&self, r: usize) -> Vec<f64> {
        let na = self.alphabet;
        let m = self.depth;
        if r == 0 {
            return vec![0.0];
        }
        let words = na.pow(r as u32);
        let completions = na.pow(m as u32 - 1);
        let mut buf = vec![0 as Symbol; r + m - 1];
        (0..words)
            .map(|u| {
                decode(u, na, &mut buf[..r]);
                let mut best = f64::NEG_INFINITY;
                for c in 0..completions {
                    decode(c, na, &mut buf[r..]);
                    let v: f64 = (0..r)
                        .map(|j| self.log_table[index_of(&buf[j..j + m], na)])
                        .sum();
                    best = best.max(v);
                }
                best
            })
            .collect()
    }

    /// `sum_{r=1}^{m-1} max_{u in A^r} (spread of g over blocks starting with u)`.
    fn distortion_constant(&self) -> f64 {
        let na = self.alphabet;
        let m = self.depth;
        (1..m)
            .map(|r| {
                let block = na.pow((m - r) as u32);
                self.log_table
                    .chunks(block)
                    .map(|row| {
                        let (lo, hi) = min_max(row);
                        hi - lo
                    })
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Base-`na` index of a word, first symbol most significant.
#[inline]
pub(crate) fn index_of(word: &[Symbol], na: usize) -> usize {
    word.iter().fold(0, |acc, &s| acc * na + s as usize)
}

#[inline]
pub(crate) fn decode(mut index: usize, na: usize, out: &mut [Symbol]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % na) as Symbol;
        index /= na;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_sum() {
        let p = FiniteDepth::depth_one(0, vec![0.5, -1.0, 2.0]).unwrap();
        assert_eq!(p.log_phi(&[0, 2, 2, 1]), 0.5 + 2.0 + 2.0 - 1.0);
        assert_eq!(p.log_phi(&[]), 0.0);
        assert_eq!(p.qm_log_constant(), 0.0);
    }

    #[test]
    fn depth_two_boundary() {
        // g(00)=0.1 g(01)=0.7 g(10)=-0.3 g(11)=0.4
        let p = FiniteDepth::new(0, 2, 2, vec![0.1, 0.7, -0.3, 0.4]).unwrap();
        assert!((p.log_phi(&[0]) - 0.7).abs() < 1e-15);
        assert!((p.log_phi(&[1]) - 0.4).abs() < 1e-15);
        assert!((p.log_phi(&[0, 1]) - (0.7 + 0.4)).abs() < 1e-15);
        assert!((p.qm_log_constant() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn depth_three_tail_is_joint() {
        let table: Vec<f64> = (0..8).map(|i| ((i * 37 % 11) as f64) * 0.1 - 0.4).collect();
        let p = FiniteDepth::new(0, 2, 3, table).unwrap();
        for w in [[0u32, 1, 1].as_slice(), &[1, 0], &[1], &[0, 0, 1, 0]] {
            let mut best = f64::NEG_INFINITY;
            for c in 0..4usize {
                let mut x = w.to_vec();
                x.push((c >> 1) as u32);
                x.push((c & 1) as u32);
                let v: f64 = (0..w.len()).map(|j| p.g(index_of(&x[j..j + 3], 2))).sum();
                best = best.max(v);
            }
            assert!((p.log_phi(w) - best).abs() < 1e-14);
        }
    }

    #[test]
    fn broadcast_and_truncate() {
        let p = FiniteDepth::depth_one(0, vec![0.3, -0.2]).unwrap();
        let b = p.broadcast(3).unwrap();
        assert_eq!(b.qm_log_constant(), 0.0);
        assert!((b.log_phi(&[0, 1, 1, 0]) - p.log_phi(&[0, 1, 1, 0])).abs() < 1e-15);
        assert_eq!(b.truncated(1).unwrap(), p);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteDepth::new(0, 2, 2, vec![0.0; 3]).is_err());
        assert!(FiniteDepth::new(0, 2, 1, vec![0.0, f64::NAN]).is_err());
        assert!(FiniteDepth::new(0, 2, 0, vec![]).is_err());
    }
}

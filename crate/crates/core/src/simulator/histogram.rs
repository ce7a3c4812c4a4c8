use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shot counts keyed by classical bitstring (bit 0 first).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub n_bits: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn new(n_bits: usize) -> Self {
        Self {
            n_bits,
            shots: 0,
            counts: BTreeMap::new(),
        }
    }

    /// Builds a histogram, checking bitstring widths and characters.
    pub fn from_counts(n_bits: usize, counts: BTreeMap<String, u64>) -> Result<Self> {
        for key in counts.keys() {
            if key.len() != n_bits || !key.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::InvalidState(format!(
                    "'{key}' is not a {n_bits}-bit outcome"
                )));
            }
        }
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        let shots = counts.values().sum();
        Ok(Self {
            n_bits,
            shots,
            counts,
        })
    }

    pub fn add(&mut self, bitstring: String, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(bitstring).or_default() += count;
        self.shots += count;
    }

    pub fn count(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }

    /// Relative frequency; 0 for an empty histogram.
    pub fn frequency(&self, bitstring: &str) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        self.count(bitstring) as f64 / self.shots as f64
    }

    /// Shots with classical bit `bit` equal to 0 and to 1.
    pub fn marginal(&self, bit: usize) -> Result<[u64; 2]> {
        self.check_bit(bit)?;
        let mut out = [0u64; 2];
        for (key, n) in &self.counts {
            out[(key.as_bytes()[bit] - b'0') as usize] += n;
        }
        Ok(out)
    }

    fn check_bit(&self, bit: usize) -> Result<()> {
        if bit >= self.n_bits {
            return Err(Error::UnknownClassicalBit {
                bit,
                n_bits: self.n_bits,
            });
        }
        Ok(())
    }

    /// Keeps only shots whose bits match every `(bit, value)` constraint.
    pub fn post_select(&self, constraints: &[(usize, u8)]) -> Result<Histogram> {
        for &(bit, value) in constraints {
            self.check_bit(bit)?;
            if value > 1 {
                return Err(Error::InvalidState(format!(
                    "required value {value} for bit {bit} is not 0 or 1"
                )));
            }
        }
        let mut out = Histogram::new(self.n_bits);
        for (key, &n) in &self.counts {
            let bytes = key.as_bytes();
            if constraints
                .iter()
                .all(|&(bit, value)| bytes[bit] == b'0' + value)
            {
                out.add(key.clone(), n);
            }
        }
        Ok(out)
    }
}

pub fn post_select(h: &Histogram, constraints: &[(usize, u8)]) -> Result<Histogram> {
    h.post_select(constraints)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(n_bits: usize, entries: &[(&str, u64)]) -> Histogram {
        Histogram::from_counts(
            n_bits,
            entries.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constraint_satisfied_by_all() {
        let h = hist(2, &[("00", 50), ("01", 50)]);
        assert_eq!(h.post_select(&[(0, 0)]).unwrap(), h);
    }

    #[test]
    fn two_bit_filter() {
        let h = hist(3, &[("000", 2048), ("011", 2048), ("101", 2048), ("110", 2048)]);
        let sel = h.post_select(&[(0, 0), (1, 1)]).unwrap();
        assert_eq!(sel, hist(3, &[("011", 2048)]));
        assert_eq!(sel.shots, 2048);
    }

    #[test]
    fn empty_selection_is_allowed() {
        let h = hist(2, &[("00", 10)]);
        let sel = h.post_select(&[(1, 1)]).unwrap();
        assert_eq!(sel.shots, 0);
        assert!(sel.counts.is_empty());
        assert_eq!(sel.frequency("01"), 0.0);
    }

    #[test]
    fn unknown_bits_are_errors() {
        let h = hist(2, &[("00", 10)]);
        assert!(matches!(
            h.post_select(&[(2, 0)]),
            Err(Error::UnknownClassicalBit { bit: 2, n_bits: 2 })
        ));
        assert!(h.post_select(&[(0, 2)]).is_err());
        assert!(h.marginal(5).is_err());
    }

    #[test]
    fn partition_conserves_shots() {
        let h = hist(3, &[("000", 7), ("011", 3), ("101", 11), ("110", 1), ("111", 9)]);
        let mut total = 0;
        for a in 0..2 {
            for b in 0..2 {
                total += h.post_select(&[(0, a), (2, b)]).unwrap().shots;
            }
        }
        assert_eq!(total, h.shots);
        assert_eq!(h.marginal(0).unwrap(), [10, 21]);
    }

    #[test]
    fn malformed_keys_rejected() {
        let bad = [("0a".to_string(), 1u64)].into_iter().collect();
        assert!(Histogram::from_counts(2, bad).is_err());
        let short = [("0".to_string(), 1u64)].into_iter().collect();
        assert!(Histogram::from_counts(2, short).is_err());
    }
}

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use std::fmt::Write as _;
use std::io;

use crate::{Error, Result};

const SUM_TOL: f64 = 1e-10;

/// A probability distribution over `num_bits`-bit strings with an alias
/// table for O(1) draws.
#[derive(Debug, Clone)]
pub struct Distribution {
    num_bits: usize,
    probabilities: Vec<f64>,
    table: WeightedAliasIndex<f64>,
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.num_bits == other.num_bits && self.probabilities == other.probabilities
    }
}

impl Distribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let len = probabilities.len();
        if !len.is_power_of_two() {
            return Err(Error::validation(format!(
                "support size {len} is not a power of two"
            )));
        }
        if let Some(p) = probabilities
            .iter()
            .find(|p| p.is_nan() || **p < 0.0 || !p.is_finite())
        {
            return Err(Error::validation(format!("invalid probability {p}")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::validation(format!("probabilities sum to {sum}")));
        }
        let table = WeightedAliasIndex::new(probabilities.clone())
            .map_err(|e| Error::validation(format!("alias table: {e}")))?;
        Ok(Self {
            num_bits: len.trailing_zeros() as usize,
            probabilities,
            table,
        })
    }

    pub fn point_mass(num_bits: usize, index: usize) -> Self {
        let mut p = vec![0.0; 1 << num_bits];
        p[index] = 1.0;
        Self::new(p).expect("point mass is a distribution")
    }

    pub fn uniform(num_bits: usize) -> Self {
        let len = 1usize << num_bits;
        Self::new(vec![1.0 / len as f64; len]).expect("uniform is a distribution")
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// One i.i.d. draw, returned as a basis index.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rand::distr::Distribution::sample(&self.table, rng) as u64
    }

    /// Write `index,probability` rows with a header.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,probability")?;
        for (i, p) in self.probabilities.iter().enumerate() {
            writeln!(out, "{i},{p:e}")?;
        }
        Ok(())
    }
}

/// Apply an independent bit flip with probability `eps` to every bit.
pub fn flip_channel(dist: &Distribution, eps: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::validation(format!("flip rate {eps} outside [0,1]")));
    }
    let mut p = dist.probabilities.clone();
    for k in 0..dist.num_bits {
        let stride = 1 << k;
        for block in (0..p.len()).step_by(2 * stride) {
            for i in block..block + stride {
                let (a, b) = (p[i], p[i + stride]);
                p[i] = (1.0 - eps) * a + eps * b;
                p[i + stride] = (1.0 - eps) * b + eps * a;
            }
        }
    }
    Distribution::new(p)
}

/// Render a basis index as a bit string, qubit 0 first.
pub fn format_bits(bits: u64, num_bits: usize) -> String {
    let mut s = String::with_capacity(num_bits);
    for k in 0..num_bits {
        let _ = write!(s, "{}", (bits >> k) & 1);
    }
    s
}

/// Inverse of [`format_bits`].
pub fn parse_bits(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::validation("bit string longer than 64"));
    }
    s.chars()
        .enumerate()
        .try_fold(0u64, |acc, (k, ch)| match ch {
            '0' => Ok(acc),
            '1' => Ok(acc | (1 << k)),
            other => Err(Error::validation(format!("invalid bit '{other}'"))),
        })
}

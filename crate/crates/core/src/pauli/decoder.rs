//! Erasure-aware maximum-likelihood coset decoding for one CSS sector.

use serde::{Deserialize, Serialize};

use super::code::{CodeSpec, BLOCK};
use crate::error::{Error, Result};

/// Likelihood ratio at or below which the two cosets count as tied.
pub const EXACT_TIE: f64 = 1.0;

/// Relative slack absorbing summation-order rounding in an exact tie.
const TIE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub correction: u8,
    /// The two logical cosets are indistinguishable.
    pub located_failure: bool,
}

/// Lookup table over every (syndrome, erasure pattern) pair. An error
/// pattern `e` has weight `r^w`, with `w` the number of its non-erased
/// positions; erased positions are free. Cosets differing by a logical are
/// told apart by the parity of `e`.
#[derive(Clone, Debug)]
pub struct Decoder {
    code: CodeSpec,
    table: Vec<Decision>,
    ratio: f64,
    tie_ratio: f64,
}

impl Decoder {
    pub fn new(code: &CodeSpec, ratio: f64, tie_ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Domain(format!("decoder error ratio must be in (0,1), got {ratio}")));
        }
        if !(tie_ratio >= 1.0) {
            return Err(Error::Domain(format!("tie ratio must be >= 1, got {tie_ratio}")));
        }
        let patterns = 1usize << BLOCK;
        let mut table = Vec::with_capacity(8 * patterns);
        for s in 0..8u8 {
            for erased in 0..patterns as u8 {
                table.push(decide(code, s, erased, ratio, tie_ratio));
            }
        }
        Ok(Decoder { code: code.clone(), table, ratio, tie_ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn tie_ratio(&self) -> f64 {
        self.tie_ratio
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn decode(&self, syndrome: u8, erasures: u8) -> Decision {
        self.table[(syndrome as usize) << BLOCK | erasures as usize]
    }

    /// Decodes an error word and reports whether a logical flip remains
    /// after the correction, and whether the decision was a tie.
    pub fn logical_flip(&self, errors: u8, erasures: u8) -> (bool, bool) {
        let d = self.decode(self.code.syndrome(errors), erasures);
        ((errors ^ d.correction).count_ones() % 2 == 1, d.located_failure)
    }
}

fn decide(code: &CodeSpec, s: u8, erased: u8, r: f64, tie_ratio: f64) -> Decision {
    let mut lik = [0.0f64; 2];
    let mut best = [(u32::MAX, 0u8); 2];
    for e in 0..1u8 << BLOCK {
        if code.syndrome(e) != s {
            continue;
        }
        let w = (e & !erased).count_ones();
        let class = (e.count_ones() % 2) as usize;
        lik[class] += r.powi(w as i32);
        if w < best[class].0 {
            best[class] = (w, e);
        }
    }
    let (hi, lo) = if lik[0] >= lik[1] { (0, 1) } else { (1, 0) };
    let tied = lik[hi] <= lik[lo] * tie_ratio * (1.0 + TIE_SLACK);
    Decision { correction: best[hi].1, located_failure: tied }
}

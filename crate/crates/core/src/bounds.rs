//! Counting bounds in terms of the genus.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Bounds on the number of systolic classes, domains, edges and cone
/// points of an extremal surface of genus `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub genus: u64,
    /// `x = 8 (g - 1)(2g - 1)`.
    pub x: u64,
    /// `8 x log2 x`.
    pub chain: f64,
    /// Classes meeting pairwise at most once: `floor(8 x log2 x)`.
    pub q: u128,
    /// All systolic classes: `32 (g - 1)^2 + Q`.
    pub q_bar: u128,
    /// Domains and edges: `4 Q̄^2`.
    pub n: u128,
    /// Cone points: `20 Q̄^2`.
    pub n0: u128,
    /// `2^9 g^2 log g` with base-2 and natural logarithms.
    pub q_stated_log2: f64,
    pub q_stated_ln: f64,
    /// `2^22 g^4 log^2 g`, both log conventions.
    pub n_stated_log2: f64,
    pub n_stated_ln: f64,
    /// `2^25 g^4 log^2 g`, both log conventions.
    pub n0_stated_log2: f64,
    pub n0_stated_ln: f64,
}

pub fn bounds(g: u64) -> Result<Bounds> {
    if g < 2 {
        return Err(Error::InvalidArgument(format!("genus {g} is below 2")));
    }
    if g > 10_000_000 {
        return Err(Error::InvalidArgument(format!("genus {g} is too large to tabulate")));
    }
    let x = 8 * (g - 1) * (2 * g - 1);
    let xf = x as f64;
    let chain = 8.0 * xf * xf.log2();
    let q = chain.floor() as u128;
    let q_bar = 32 * ((g - 1) as u128).pow(2) + q;
    let n = 4 * q_bar * q_bar;
    let n0 = 20 * q_bar * q_bar;
    let gf = g as f64;
    let (l2, ln) = (gf.log2(), gf.ln());
    let g2 = gf * gf;
    let g4 = g2 * g2;
    Ok(Bounds {
        genus: g,
        x,
        chain,
        q,
        q_bar,
        n,
        n0,
        q_stated_log2: 512.0 * g2 * l2,
        q_stated_ln: 512.0 * g2 * ln,
        n_stated_log2: 4_194_304.0 * g4 * l2 * l2,
        n_stated_ln: 4_194_304.0 * g4 * ln * ln,
        n0_stated_log2: 33_554_432.0 * g4 * l2 * l2,
        n0_stated_ln: 33_554_432.0 * g4 * ln * ln,
    })
}

//! Structural checks expected of a surface the optimizer cannot improve.

use crate::bounds::bounds;
use crate::decompose::{check_domain_geometry, decompose, systolic_part_connected, SystolicDecomposition};
use crate::error::Result;
use crate::geom::PI;
use crate::surface::ConeSurface;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub id: usize,
    pub area: f64,
    pub euler: i64,
    pub singularities: usize,
    pub small_singularities: usize,
    /// Small cone points inside each boundary edge.
    pub edge_small: Vec<usize>,
    pub disk: bool,
    pub convex: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub genus: usize,
    /// False for genus below two, where the counting bounds do not apply.
    pub in_theory: bool,
    pub systole: f64,
    pub area: f64,
    pub sigma: f64,
    pub classes: usize,
    pub domains: Vec<DomainReport>,
    pub systolic_part_connected: bool,
    pub singularities: usize,
    /// Cone points lying in the systolic part with every face around them
    /// in a band.
    pub special: usize,
    pub singularity_bound: Option<u128>,
    pub criteria: Vec<Criterion>,
}

impl ExtremalityReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.criteria.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Lower bound on the systolic area in genus two.
pub fn genus_two_sigma_bound() -> f64 {
    3.0 * (PI / 8.0).tan()
}

pub fn extremality_report(s: &ConeSurface, tol: f64) -> Result<ExtremalityReport> {
    let dec = decompose(s, tol)?;
    Ok(report_from(s, &dec))
}

/// The report for a surface whose decomposition is already known.
pub fn report_from(s: &ConeSurface, dec: &SystolicDecomposition) -> ExtremalityReport {
    let genus = s.genus();
    let in_theory = genus >= 2;
    let domains: Vec<DomainReport> = dec
        .domains
        .iter()
        .map(|d| {
            let g = check_domain_geometry(d);
            DomainReport {
                id: d.id,
                area: d.area,
                euler: d.euler,
                singularities: d.singularities.len(),
                small_singularities: d.small_singularities(),
                edge_small: d.edges.iter().map(|e| e.small).collect(),
                disk: g.is_disk,
                convex: g.convex,
            }
        })
        .collect();
    let singularities = s.cone_points().len();
    let bound = if in_theory { bounds(genus as u64).ok().map(|b| b.n0) } else { None };
    let sigma = s.area() / (dec.systole * dec.systole);
    let mut criteria = Vec::new();
    let mut add = |name: &str, pass: bool, detail: String| {
        criteria.push(Criterion { name: name.into(), pass, detail });
    };
    add("genus-in-range", in_theory, format!("genus {genus}"));
    let bad: Vec<usize> = domains.iter().filter(|d| d.small_singularities > 1).map(|d| d.id).collect();
    add("one-small-per-domain", bad.is_empty(), format!("domains {bad:?}"));
    let bad: Vec<usize> = domains.iter().filter(|d| d.edge_small.iter().any(|&n| n > 1)).map(|d| d.id).collect();
    add("one-small-per-edge", bad.is_empty(), format!("domains {bad:?}"));
    let bad: Vec<usize> = domains.iter().filter(|d| d.singularities > 1).map(|d| d.id).collect();
    add("one-singularity-per-domain", bad.is_empty(), format!("domains {bad:?}"));
    let bad: Vec<usize> = domains.iter().filter(|d| !d.disk).map(|d| d.id).collect();
    add("domains-are-disks", bad.is_empty(), format!("domains {bad:?}"));
    let bad: Vec<usize> = domains.iter().filter(|d| !d.disk && !d.convex).map(|d| d.id).collect();
    add("other-domains-convex", bad.is_empty(), format!("domains {bad:?}"));
    let connected = systolic_part_connected(dec);
    add("systolic-part-connected", connected, format!("{} pieces", dec.systolic_domains.len()));
    match bound {
        Some(n0) => add(
            "singularities-within-bound",
            (singularities as u128) <= n0,
            format!("{singularities} of at most {n0}"),
        ),
        None => add("singularities-within-bound", false, "no bound below genus two".into()),
    }
    if genus == 2 {
        let b = genus_two_sigma_bound();
        add("genus-two-sigma", sigma >= b - 1e-6, format!("sigma {sigma} against {b}"));
    }
    ExtremalityReport {
        genus,
        in_theory,
        systole: dec.systole,
        area: s.area(),
        sigma,
        classes: dec.classes.len(),
        domains,
        systolic_part_connected: connected,
        singularities,
        special: dec.special.len(),
        singularity_bound: bound,
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octagon, torus};
    use crate::kite::{insert_kite, KiteInsertion};

    #[test]
    fn torus_is_flagged() {
        let r = extremality_report(&torus(1.0, 1.0, 0.0).unwrap(), 1e-9).unwrap();
        assert!(!r.in_theory);
        assert!(r.failed().contains(&"genus-in-range"));
    }

    #[test]
    fn octagon_passes() {
        let r = extremality_report(&octagon(1.0).unwrap(), 1e-9).unwrap();
        assert!(r.all_pass(), "{:?}", r.failed());
        assert!(r.sigma >= genus_two_sigma_bound());
    }

    #[test]
    fn inserted_pair_is_named() {
        let s = octagon(1.0).unwrap();
        let ins = KiteInsertion { vertex: 0, direction: 0.3, length: 0.3, a: 0.15, h: 0.02 };
        let t = insert_kite(&s, &ins).unwrap().surface;
        let r = extremality_report(&t, 1e-9).unwrap();
        assert!(r.failed().contains(&"one-singularity-per-domain"));
        assert!(r.failed().contains(&"one-small-per-domain"));
    }
}

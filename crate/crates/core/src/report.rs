//! JSON reports shared by the command-line tools.

use crate::bounds::bounds;
use crate::decompose::{Corner, SystolicDecomposition};
use crate::error::Result;
use crate::geodesic::{systole, LoopJson};
use crate::structure::BandKind;
use crate::surface::{ConeSurface, SingularityClass};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceInfo {
    pub schema: u32,
    pub triangles: usize,
    pub edges: usize,
    pub vertices: usize,
    pub genus: usize,
    pub area: f64,
    pub residual: f64,
    pub npc: bool,
    pub in_theory: bool,
    pub singularities: Vec<SingularityClass>,
}

pub fn surface_info(s: &ConeSurface) -> SurfaceInfo {
    SurfaceInfo {
        schema: SCHEMA,
        triangles: s.num_triangles(),
        edges: s.num_edges(),
        vertices: s.num_vertices(),
        genus: s.genus(),
        area: s.area(),
        residual: s.gauss_bonnet_residual(),
        npc: s.is_npc(),
        in_theory: s.genus() >= 2,
        singularities: s.classify_singularities().into_iter().filter(|c| s.is_cone_point(c.vertex)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystoleReport {
    pub schema: u32,
    pub systole: f64,
    pub area: f64,
    pub sigma: f64,
    pub witness: LoopJson,
}

pub fn systole_report(s: &ConeSurface, tol: f64) -> Result<SystoleReport> {
    let (sys, lp) = systole(s, tol)?;
    Ok(SystoleReport {
        schema: SCHEMA,
        systole: sys,
        area: s.area(),
        sigma: s.systolic_area(sys),
        witness: lp.to_json(s)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub id: usize,
    pub band: BandKind,
    pub length: f64,
    pub width: f64,
    pub loops: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSummary {
    pub id: usize,
    pub faces: Vec<usize>,
    pub area: f64,
    pub euler: i64,
    pub singularities: Vec<usize>,
    pub boundary: Vec<Corner>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Count {
    pub value: usize,
    pub bound: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub schema: u32,
    pub systole: f64,
    pub systolic_area: f64,
    pub classes: Vec<ClassReport>,
    pub domains: Vec<DomainSummary>,
    pub special: Vec<usize>,
    pub class_count: Count,
    pub domain_count: Count,
    pub singularity_count: Count,
}

pub fn decomposition_report(s: &ConeSurface, dec: &SystolicDecomposition) -> DecompositionReport {
    let b = if s.genus() >= 2 { bounds(s.genus() as u64).ok() } else { None };
    DecompositionReport {
        schema: SCHEMA,
        systole: dec.systole,
        systolic_area: dec.systolic_area,
        classes: dec
            .classes
            .iter()
            .map(|c| ClassReport { id: c.id, band: c.band.kind, length: c.length, width: c.band.width, loops: c.loops.len() })
            .collect(),
        domains: dec
            .domains
            .iter()
            .map(|d| DomainSummary {
                id: d.id,
                faces: d.faces.clone(),
                area: d.area,
                euler: d.euler,
                singularities: d.singularities.clone(),
                boundary: d.corners.clone(),
            })
            .collect(),
        special: dec.special.clone(),
        class_count: Count { value: dec.classes.len(), bound: b.map(|b| b.q_bar) },
        domain_count: Count { value: dec.domains.len(), bound: b.map(|b| b.n) },
        singularity_count: Count { value: s.cone_points().len(), bound: b.map(|b| b.n0) },
    }
}

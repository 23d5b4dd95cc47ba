//! Systolic loops, their homotopy classes and how the classes meet.

use crate::beam::{freely_homotopic, sweep_strip, Side, Strip};
use crate::bounds::bounds;
use crate::connections::{mesh_segments, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::geodesic::{piece_of, systole, turn_ok, GeodesicLoop};
use crate::overlay::{overlay, Overlay, OverlaySegment};
use crate::surface::{ConeSurface, CornerRef};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandKind {
    Isolated,
    Fat,
}

/// The union of the systolic loops of one class.
#[derive(Clone, Debug)]
pub struct Band {
    pub kind: BandKind,
    /// Distance between the two limit loops; zero when isolated.
    pub width: f64,
    /// Boundary loops. One loop for an isolated band, or for a fat band
    /// that closes up on itself.
    pub limits: Vec<GeodesicLoop>,
    /// The swept strip of a fat band.
    pub strip: Option<Strip>,
}

#[derive(Clone, Debug)]
pub struct SystolicClass {
    pub id: usize,
    pub length: f64,
    pub representative: GeodesicLoop,
    /// Every systolic loop found in the class.
    pub loops: Vec<GeodesicLoop>,
    pub band: Band,
}

/// Every closed geodesic through a mesh vertex with length at most
/// `sys + tol`, one per trace.
pub fn systolic_loops(s: &ConeSurface, sys: f64, tol: f64) -> Result<Vec<GeodesicLoop>> {
    let budget = sys + tol;
    let table = mesh_segments(s, budget, DEFAULT_CAP)?;
    let cones = s.cone_points();
    let bases: Vec<usize> = if cones.is_empty() { (0..s.num_vertices()).collect() } else { cones };
    let mut found: Vec<GeodesicLoop> = Vec::new();
    for &v in &bases {
        let mut stack: Vec<(Vec<usize>, f64)> = table.outgoing(v).iter().map(|&i| (vec![i], table.segments[i].length)).collect();
        while let Some((chain, len)) = stack.pop() {
            let last = &table.segments[*chain.last().unwrap()];
            if last.to == v {
                let first = &table.segments[chain[0]];
                if !turn_ok(s.angle(v), last.end, first.start) {
                    continue;
                }
                let lp = GeodesicLoop::from_pieces(s, chain.iter().map(|&i| piece_of(&table, i)).collect());
                // keep each trace once, found from its smallest base vertex
                let lowest = lp.vertices().into_iter().filter(|u| bases.contains(u)).min();
                if lowest == Some(v) && !found.iter().any(|f| f.same_trace(s, &lp)) {
                    found.push(lp);
                }
                continue;
            }
            let w = last.to;
            for &j in table.outgoing(w) {
                let nl = len + table.segments[j].length;
                if nl <= budget * (1.0 + 1e-12) && turn_ok(s.angle(w), last.end, table.segments[j].start) {
                    let mut c = chain.clone();
                    c.push(j);
                    stack.push((c, nl));
                }
            }
        }
    }
    found.sort_by(|a, b| a.length.total_cmp(&b.length).then(a.vertices().cmp(&b.vertices())));
    Ok(found)
}

fn band_of(s: &ConeSurface, loops: &[GeodesicLoop]) -> Result<(GeodesicLoop, Band)> {
    for lp in loops {
        for side in [Side::Left, Side::Right] {
            let Some(strip) = sweep_strip(s, lp, side, DEFAULT_CAP)? else {
                continue;
            };
            if strip.width <= 1e-9 * strip.length {
                continue;
            }
            let mut limits = vec![strip.base.clone()];
            if let Some(far) = strip.limit_loop(s) {
                let far = loops.iter().find(|l| l.same_trace(s, &far)).cloned().unwrap_or(far);
                if !far.same_trace(s, &limits[0]) {
                    limits.push(far);
                }
            }
            let band = Band { kind: BandKind::Fat, width: strip.width, limits, strip: Some(strip) };
            return Ok((lp.clone(), band));
        }
    }
    let rep = loops[0].clone();
    Ok((rep.clone(), Band { kind: BandKind::Isolated, width: 0.0, limits: vec![rep], strip: None }))
}

/// Systolic loops grouped by free homotopy, each class with its band.
pub fn systolic_classes(s: &ConeSurface, tol: f64) -> Result<(f64, Vec<SystolicClass>)> {
    let (sys, _) = systole(s, tol)?;
    let loops = systolic_loops(s, sys, tol)?;
    let mut groups: Vec<Vec<GeodesicLoop>> = Vec::new();
    for lp in loops {
        let mut home = None;
        for (i, g) in groups.iter().enumerate() {
            if freely_homotopic(s, &g[0], &lp)? || freely_homotopic(s, &lp, &g[0])? {
                home = Some(i);
                break;
            }
        }
        match home {
            Some(i) => groups[i].push(lp),
            None => groups.push(vec![lp]),
        }
    }
    let mut out = Vec::new();
    for (id, g) in groups.into_iter().enumerate() {
        let (representative, band) = band_of(s, &g)?;
        out.push(SystolicClass { id, length: representative.length, representative, loops: g, band });
    }
    Ok((sys, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub count: usize,
    pub bound: u128,
    pub ok: bool,
}

/// Compares the number of classes with the bound for the genus.
pub fn count_classes_vs_bound(s: &ConeSurface, classes: &[SystolicClass]) -> Result<ClassCount> {
    let b = bounds(s.genus() as u64)?;
    let count = classes.len();
    Ok(ClassCount { count, bound: b.q_bar, ok: (count as u128) <= b.q_bar })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "pattern")]
pub enum Intersection {
    Disjoint,
    OnePoint { vertex: usize, angle: f64 },
    TwoPoints {
        /// Cone angles at the two points.
        angles: [f64; 2],
        /// Lengths of the two arcs of each loop between the points.
        arcs: [f64; 4],
    },
    Arc { length: f64 },
    /// More than two isolated points; never expected for systolic loops.
    Many { count: usize },
}

/// Overlays the given loops. Segment `k` of loop `i` gets id
/// `first[i] + k`.
pub(crate) fn overlay_loops(s: &ConeSurface, loops: &[&GeodesicLoop]) -> Result<(Overlay, Vec<usize>)> {
    let mut segs = Vec::new();
    let mut first = Vec::new();
    for lp in loops {
        first.push(segs.len());
        for p in &lp.pieces {
            segs.push(OverlaySegment::from_vertex(s, p.from, p.start, p.length));
        }
    }
    Ok((overlay(s, &segs, &[])?, first))
}

/// Positions along each loop of the overlay vertices it passes through.
fn stations(ov: &Overlay, lp: &GeodesicLoop, first: usize) -> Vec<(usize, f64)> {
    let sf = &ov.surface;
    let mut out = Vec::new();
    let mut acc = 0.0;
    for (k, p) in lp.pieces.iter().enumerate() {
        for (e, tag) in ov.segment_edges(first + k) {
            out.push((sf.vertex_of(CornerRef::new(e.tri, e.edge)), acc + tag.from));
        }
        acc += p.length;
    }
    out
}

/// How the representatives of two classes meet.
pub fn intersection_pattern(s: &ConeSurface, a: &SystolicClass, b: &SystolicClass) -> Result<Intersection> {
    if a.id == b.id {
        return Err(Error::InvalidArgument("a class compared with itself".into()));
    }
    loops_meet(s, &a.representative, &b.representative)
}

/// How two closed geodesics meet.
pub fn loops_meet(s: &ConeSurface, a: &GeodesicLoop, b: &GeodesicLoop) -> Result<Intersection> {
    let (ov, first) = overlay_loops(s, &[a, b])?;
    let sf = &ov.surface;
    let na = a.pieces.len();
    let shared: f64 = ov
        .tags
        .iter()
        .filter(|(_, t)| t.iter().any(|x| x.seg < na && x.to > x.from) && t.iter().any(|x| x.seg >= na))
        .map(|(e, _)| sf.edge_length(*e))
        .sum();
    if shared > 0.0 {
        return Ok(Intersection::Arc { length: shared });
    }
    let sa = stations(&ov, a, first[0]);
    let sb = stations(&ov, b, first[1]);
    let mut common: Vec<(usize, f64, f64)> = Vec::new();
    for &(v, x) in &sa {
        if common.iter().any(|c| c.0 == v) {
            continue;
        }
        if let Some(&(_, y)) = sb.iter().find(|(w, _)| *w == v) {
            common.push((v, x, y));
        }
    }
    match common.len() {
        0 => Ok(Intersection::Disjoint),
        1 => Ok(Intersection::OnePoint { vertex: common[0].0, angle: sf.angle(common[0].0) }),
        2 => {
            let (u, v) = (common[0], common[1]);
            let da = (u.1 - v.1).abs();
            let db = (u.2 - v.2).abs();
            Ok(Intersection::TwoPoints {
                angles: [sf.angle(u.0), sf.angle(v.0)],
                arcs: [da, a.length - da, db, b.length - db],
            })
        }
        n => Ok(Intersection::Many { count: n }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octagon, torus};

    #[test]
    fn square_torus_has_two_fat_classes() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let (sys, classes) = systolic_classes(&s, 1e-7).unwrap();
        assert_eq!(sys, 1.0);
        assert_eq!(classes.len(), 2);
        for c in &classes {
            assert_eq!(c.band.kind, BandKind::Fat);
            assert!(c.band.strip.as_ref().unwrap().wrapped);
        }
    }

    #[test]
    fn octagon_sides_are_isolated_classes() {
        let s = octagon(1.0).unwrap();
        let (sys, classes) = systolic_classes(&s, 1e-7).unwrap();
        assert!((sys - 1.0).abs() < 1e-12);
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.band.kind == BandKind::Isolated));
        let count = count_classes_vs_bound(&s, &classes).unwrap();
        assert!(count.ok);
        // all four sides pass through the single vertex
        for i in 0..4 {
            for j in i + 1..4 {
                let m = intersection_pattern(&s, &classes[i], &classes[j]).unwrap();
                assert!(matches!(m, Intersection::OnePoint { .. }), "{m:?}");
            }
        }
        assert!(intersection_pattern(&s, &classes[0], &classes[0]).is_err());
    }
}

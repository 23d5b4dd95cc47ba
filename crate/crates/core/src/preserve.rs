//! Which systole-preserving situation a kite is in, and the widest kite
//! whose removal keeps the systole.

use crate::decompose::SystolicDecomposition;
use crate::error::{Error, Result};
use crate::geodesic::systole;
use crate::geom::{cross, point_segment_distance, Motion, Pt2, PI, TAU};
use crate::kite::{check_admissible, excise, max_admissible_width, ExcisionResult, Kite, KiteBase, KiteKind};
use crate::surface::{next3, prev3, ConeSurface, CornerRef, EdgeRef};
use crate::trace::trace_from_vertex;
use crate::connections::{sweep, Node, Seed, SweepHit, DEFAULT_CAP};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Diamond with `[p, q]` inside a domain.
    #[serde(rename = "D1")]
    D1,
    /// Diamond with `q` on the boundary at a reflex corner.
    #[serde(rename = "D1'")]
    D1Prime,
    /// Diamond with both ends on the boundary at reflex corners.
    #[serde(rename = "D1''")]
    D1Second,
    /// Exact kite with `[p, q]` inside a domain.
    #[serde(rename = "E1")]
    E1,
    /// Exact kite with `q` on the boundary at a reflex corner.
    #[serde(rename = "E1'")]
    E1Prime,
    /// Exact kite along the interior of a boundary edge.
    #[serde(rename = "E2")]
    E2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    pub domain: usize,
    /// Boundary edge of the domain holding `[p, q]`, for the edge case.
    pub edge: Option<usize>,
    /// Angle of the domain at `q` when `q` is on its boundary.
    pub angle_q: Option<f64>,
}

/// Where the open segment `(p, q)` runs in the refined mesh.
struct Span {
    /// Refined triangles met, with the triangle edge the segment runs
    /// along if it does.
    pieces: Vec<(usize, Option<EdgeRef>)>,
    /// Refined vertices strictly inside the segment.
    inner_vertices: Vec<usize>,
    /// Triangle and corner at `p` and at `q` holding the ends.
    start: (usize, u8),
    end: (usize, u8),
}

/// Parameter interval of `a + t (b - a)` inside a triangle.
fn clip(a: &Pt2, b: &Pt2, tri: &[Pt2; 3]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = b - a;
    let scale = (tri[1] - tri[0]).norm().max((tri[2] - tri[1]).norm());
    for k in 0..3 {
        let (u, v) = (tri[k], tri[(k + 1) % 3]);
        let e = v - u;
        let f0 = cross(&e, &(a - u)) + 1e-12 * scale * e.norm();
        let df = cross(&e, &d);
        if df.abs() < 1e-300 {
            if f0 < 0.0 {
                return None;
            }
            continue;
        }
        let t = -f0 / df;
        if df > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
    }
    (hi - lo > 1e-9).then_some((lo, hi))
}

fn span(s: &ConeSurface, dec: &SystolicDecomposition, base: &KiteBase) -> Result<Span> {
    let ov = &dec.overlay;
    let sf = &ov.surface;
    let tr = trace_from_vertex(s, base.p, base.start, base.length)?;
    let tol = 1e-9 * base.length.max(1.0);
    let mut hits: Vec<(f64, usize, Option<EdgeRef>, f64, f64)> = Vec::new();
    for piece in &tr.pieces {
        for t in (0..sf.num_triangles()).filter(|&t| ov.origin[t] == piece.tri) {
            let pl = &ov.placement[t];
            let Some((lo, hi)) = clip(&piece.start, &piece.end, pl) else {
                continue;
            };
            let at = |x: f64| piece.start + (piece.end - piece.start) * x;
            let mid = at(0.5 * (lo + hi));
            let along = (0..3u8).find(|&k| point_segment_distance(&mid, &pl[k as usize], &pl[next3(k) as usize]) < tol);
            let len = piece.len();
            hits.push((piece.offset + lo * len, t, along.map(|k| EdgeRef::new(t, k)), piece.offset + lo * len, piece.offset + hi * len));
        }
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if hits.is_empty() {
        return Err(Error::KernelDefect("base segment not found in the refined mesh".into()));
    }
    let vertex_at = |t: usize, x: &Pt2| -> Option<u8> {
        (0..3u8).find(|&k| (ov.placement[t][k as usize] - x).norm() < tol)
    };
    let point = |off: f64| -> (usize, Pt2) {
        let p = tr.pieces.iter().rev().find(|p| p.offset <= off + tol).unwrap_or(&tr.pieces[0]);
        let x = if p.len() > 0.0 { (off - p.offset) / p.len() } else { 0.0 };
        (p.tri, p.start + (p.end - p.start) * x.clamp(0.0, 1.0))
    };
    let mut inner_vertices = Vec::new();
    for h in &hits {
        for off in [h.3, h.4] {
            if off > tol && off < base.length - tol {
                let (_, x) = point(off);
                if let Some(k) = vertex_at(h.1, &x) {
                    let v = sf.vertex_of(CornerRef::new(h.1, k));
                    if !inner_vertices.contains(&v) {
                        inner_vertices.push(v);
                    }
                }
            }
        }
    }
    let first = hits.iter().find(|h| h.3 <= tol).ok_or_else(|| Error::KernelDefect("base start not found".into()))?;
    let last = hits
        .iter()
        .rev()
        .find(|h| h.4 >= base.length - tol)
        .ok_or_else(|| Error::KernelDefect("base end not found".into()))?;
    let ck = |h: &(f64, usize, Option<EdgeRef>, f64, f64), off: f64| -> Result<(usize, u8)> {
        let (_, x) = point(off);
        vertex_at(h.1, &x).map(|k| (h.1, k)).ok_or_else(|| Error::KernelDefect("base end is not a corner".into()))
    };
    Ok(Span {
        start: ck(first, 0.0)?,
        end: ck(last, base.length)?,
        pieces: hits.iter().map(|h| (h.1, h.2)).collect(),
        inner_vertices,
    })
}

/// Angle of the domain `id` at the corner `(t, c)`, summed over the
/// corners reachable without crossing its boundary.
fn sector_angle(dec: &SystolicDecomposition, id: usize, t: usize, c: u8) -> f64 {
    let sf = &dec.overlay.surface;
    let d = &dec.domains[id];
    let in_d = |t: usize| d.faces.binary_search(&t).is_ok();
    let tagged = |e: EdgeRef| dec.overlay.tags.get(&e).is_some_and(|v| !v.is_empty());
    let wall = |e: EdgeRef| tagged(e) || !in_d(sf.glued(e).tri);
    let cap = 4 * sf.num_triangles();
    let mut angle = sf.corner_angle(CornerRef::new(t, c));
    let (mut tt, mut cc) = (t, c);
    for _ in 0..cap {
        let e = EdgeRef::new(tt, cc);
        if wall(e) {
            break;
        }
        let o = sf.glued(e);
        (tt, cc) = (o.tri, next3(o.edge));
        if (tt, cc) == (t, c) {
            return sf.angle(sf.vertex_of(CornerRef::new(t, c)));
        }
        angle += sf.corner_angle(CornerRef::new(tt, cc));
    }
    let (mut tt, mut cc) = (t, c);
    for _ in 0..cap {
        let e = EdgeRef::new(tt, prev3(cc));
        if wall(e) {
            break;
        }
        let o = sf.glued(e);
        (tt, cc) = (o.tri, o.edge);
        angle += sf.corner_angle(CornerRef::new(tt, cc));
    }
    angle
}

fn is_small(theta: f64) -> bool {
    theta > TAU + 1e-9 && theta < 3.0 * PI
}

/// The case a kite on `base` falls in, relative to a decomposition of `s`.
pub fn classify_case(s: &ConeSurface, dec: &SystolicDecomposition, k: &Kite) -> Result<CaseLabel> {
    let base = &k.base;
    let sp = span(s, dec, base)?;
    let ov = &dec.overlay;
    let sf = &ov.surface;
    let tagged = |e: EdgeRef| ov.tags.get(&e).is_some_and(|v| !v.is_empty());
    let exact = k.kind == KiteKind::Exact;
    let p_small = is_small(s.angle(base.p));
    let none = |why: &str| Error::NoCase(format!("kite on {} -> {}: {why}", base.p, base.q));

    let along: Vec<Option<EdgeRef>> = sp.pieces.iter().map(|(_, e)| e.filter(|e| tagged(*e))).collect();
    if along.iter().all(|e| e.is_some()) {
        if !exact || !p_small {
            return Err(none("runs along a systolic loop but is not exact at a small point"));
        }
        if sp.inner_vertices.iter().any(|&v| dec.polygon_vertex[v] || sf.is_cone_point(v)) {
            return Err(none("crosses a polygon vertex of the boundary"));
        }
        let (pv, qv) = (sf.vertex_of(CornerRef::new(sp.start.0, sp.start.1)), sf.vertex_of(CornerRef::new(sp.end.0, sp.end.1)));
        if dec.polygon_vertex[pv] || dec.polygon_vertex[qv] {
            return Err(none("an end is a polygon vertex"));
        }
        let e = along[0].unwrap();
        for t in [e.tri, sf.glued(e).tri] {
            if let Some(id) = dec.domain_of_face(t) {
                let edge = dec.domains[id]
                    .edges
                    .iter()
                    .position(|de| de.singularities.contains(&pv) && de.singularities.contains(&qv));
                if let Some(edge) = edge {
                    return Ok(CaseLabel { case: Case::E2, domain: id, edge: Some(edge), angle_q: None });
                }
            }
        }
        return Err(none("not inside one boundary edge of a nonsystolic domain"));
    }
    if along.iter().any(|e| e.is_some()) {
        return Err(none("partly runs along a systolic loop"));
    }
    let ids: Vec<Option<usize>> = sp.pieces.iter().map(|(t, _)| dec.domain_of_face(*t)).collect();
    let Some(id) = ids[0] else {
        return Err(none("starts inside a systolic band"));
    };
    if ids.iter().any(|&d| d != Some(id)) || sp.inner_vertices.iter().any(|&v| dec.polygon_vertex[v]) {
        return Err(none("leaves its domain"));
    }
    let d = &dec.domains[id];
    let pv = sf.vertex_of(CornerRef::new(sp.start.0, sp.start.1));
    let qv = sf.vertex_of(CornerRef::new(sp.end.0, sp.end.1));
    let p_in = d.singularities.contains(&pv);
    let q_in = d.singularities.contains(&qv);
    let ang_p = sector_angle(dec, id, sp.start.0, sp.start.1);
    let ang_q = sector_angle(dec, id, sp.end.0, sp.end.1);
    let reflex = |a: f64| a > PI + 1e-9;
    let label = |case| Ok(CaseLabel { case, domain: id, edge: None, angle_q: (!q_in).then_some(ang_q) });
    match (exact, p_in, q_in) {
        (false, true, true) => label(Case::D1),
        (false, true, false) if reflex(ang_q) => label(Case::D1Prime),
        (false, false, false) if reflex(ang_p) && reflex(ang_q) => label(Case::D1Second),
        (true, true, true) if p_small => label(Case::E1),
        (true, true, false) if p_small && reflex(ang_q) => label(Case::E1Prime),
        _ => Err(none("no case applies")),
    }
}

/// Cone points seen from `v` within `radius`, as (angle from `dir`,
/// distance) pairs.
fn seen_cones(s: &ConeSurface, v: usize, dir: f64, radius: f64) -> Result<Vec<(f64, f64)>> {
    let vx = s.vertex(v);
    let theta = vx.angle;
    let mut seeds = Vec::new();
    let mut ranges = Vec::new();
    for (k, &c) in vx.corners.iter().enumerate() {
        let rel = (vx.offsets[k] - dir).rem_euclid(theta);
        let p = s.layout(c.tri);
        let pc = p[c.corner as usize];
        let e0 = p[next3(c.corner) as usize] - pc;
        let rot = nalgebra::UnitComplex::new(rel - e0.y.atan2(e0.x));
        let frame = Motion::from_parts(nalgebra::Translation2::from(-(rot * pc.coords)), rot);
        seeds.push(Seed { corner: c, lo: 0.0, hi: s.corner_angle(c), frame });
        ranges.push((rel, rel + s.corner_angle(c)));
    }
    let mut out = Vec::new();
    let prune = |src: &Pt2, xr: &Pt2, xl: &Pt2| point_segment_distance(src, xr, xl) > radius;
    let mut on_hit = |h: &SweepHit, _: &[Node]| {
        let w = s.vertex_of(h.apex);
        let d = h.pos - h.src;
        if !s.is_cone_point(w) || d.norm() > radius {
            return;
        }
        let (lo, hi) = ranges[h.seed];
        let mut phi = d.y.atan2(d.x);
        while phi < lo - 1e-9 {
            phi += TAU;
        }
        while phi > hi + 1e-9 {
            phi -= TAU;
        }
        out.push((phi, d.norm()));
    };
    sweep(s, &seeds, DEFAULT_CAP, &prune, &mut on_hit)?;
    Ok(out)
}

/// Distance from the segment `[p, q]` to the nearest cone point other
/// than its two ends, capped at `|pq|`. Only points seen from `p` or `q`
/// are considered.
pub fn base_clearance(s: &ConeSurface, base: &KiteBase) -> Result<f64> {
    let l = base.length;
    let mut best = l;
    for (v, dir) in [(base.p, base.start), (base.q, base.end)] {
        let theta = s.angle(v);
        for (phi, r) in seen_cones(s, v, dir, 1.5 * l)? {
            let signed = if phi <= 0.5 * PI {
                phi
            } else if phi >= theta - 0.5 * PI {
                phi - theta
            } else {
                best = best.min(r);
                continue;
            };
            let x = Pt2::new(r * signed.cos(), r * signed.sin());
            // the far end itself, seen straight along the base
            if (x - Pt2::new(l, 0.0)).norm() < 1e-9 * l.max(1.0) {
                continue;
            }
            best = best.min(point_segment_distance(&x, &Pt2::origin(), &Pt2::new(l, 0.0)));
        }
    }
    Ok(best)
}

/// A kite kept by the width search, with the surface left after removing it.
#[derive(Clone, Debug)]
pub struct PreservingCut {
    pub kite: Kite,
    pub width: f64,
    pub result: ExcisionResult,
    /// Systole before and after.
    pub systole: (f64, f64),
    /// Widths tried, largest first.
    pub tried: Vec<f64>,
}

pub(crate) fn build(s: &ConeSurface, base: &KiteBase, kind: KiteKind, w: f64) -> Result<Kite> {
    match kind {
        KiteKind::Diamond => crate::kite::build_diamond(s, base, w),
        KiteKind::Exact => crate::kite::build_exact(s, base, w),
    }
}

/// Starting width of the search.
pub fn initial_width(s: &ConeSurface, base: &KiteBase, kind: KiteKind) -> Result<f64> {
    let clear = base_clearance(s, base)?;
    let w = 0.25 * clear.min(base.length);
    Ok(w.min(0.9 * max_admissible_width(s, base, kind)))
}

/// Largest width `w0 / 2^k`, `k < 40`, whose kite embeds and whose removal
/// changes the systole by at most `tol`. `domain_angle_q` is the angle of
/// the domain at `q` when `q` lies on its boundary; the kite angle at `q`
/// must then stay below that angle minus π.
pub fn max_systole_preserving_width(
    s: &ConeSurface,
    base: &KiteBase,
    kind: KiteKind,
    tol: f64,
    domain_angle_q: Option<f64>,
) -> Result<PreservingCut> {
    search_width(s, base, kind, tol, domain_angle_q, 0.5, 40)
}

/// The width search with its shrink factor and number of tries given.
pub fn search_width(
    s: &ConeSurface,
    base: &KiteBase,
    kind: KiteKind,
    tol: f64,
    domain_angle_q: Option<f64>,
    shrink: f64,
    tries: usize,
) -> Result<PreservingCut> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidArgument(format!("shrink factor {shrink}")));
    }
    let (sys, _) = systole(s, tol)?;
    let mut w = initial_width(s, base, kind)?;
    if !(w > 0.0) {
        return Err(Error::KernelDefect(format!("no room for a kite on {} -> {}", base.p, base.q)));
    }
    let mut tried = Vec::new();
    let mut why = String::new();
    for _ in 0..tries {
        tried.push(w);
        match probe(s, base, kind, w, sys, tol, domain_angle_q) {
            Ok((kite, result, after)) => {
                return Ok(PreservingCut { kite, width: w, result, systole: (sys, after), tried });
            }
            Err(e) => why = e.to_string(),
        }
        w *= shrink;
    }
    Err(Error::KernelDefect(format!(
        "no width down to {w:e} keeps the systole on {} -> {}: {why}",
        base.p, base.q
    )))
}

/// Exact kite at `p` whose angle at `q` uses up the whole excess of `q`,
/// so that both ends become regular and only the merged apex stays
/// singular. `None` when `q` is not small or `p` is not a cone point.
pub fn merging_width(s: &ConeSurface, base: &KiteBase) -> Option<f64> {
    if base.p == base.q {
        return None;
    }
    let (tp, tq) = (s.angle(base.p), s.angle(base.q));
    if !(is_small(tp) && is_small(tq)) {
        return None;
    }
    let w = max_admissible_width(s, base, KiteKind::Exact);
    (w > 0.0).then_some(w)
}

/// The merging kite on `base`, if it embeds and keeps the systole.
pub fn merging_cut(s: &ConeSurface, base: &KiteBase, tol: f64, domain_angle_q: Option<f64>) -> Result<PreservingCut> {
    let w = merging_width(s, base).ok_or_else(|| Error::Inadmissible("ends cannot be merged".into()))?;
    let (sys, _) = systole(s, tol)?;
    let (kite, result, after) = probe(s, base, KiteKind::Exact, w, sys, tol, domain_angle_q)?;
    Ok(PreservingCut { kite, width: w, result, systole: (sys, after), tried: vec![w] })
}

fn probe(
    s: &ConeSurface,
    base: &KiteBase,
    kind: KiteKind,
    w: f64,
    sys: f64,
    tol: f64,
    domain_angle_q: Option<f64>,
) -> Result<(Kite, ExcisionResult, f64)> {
    let k = build(s, base, kind, w)?;
    check_admissible(s, &k)?;
    if let Some(lq) = domain_angle_q {
        if k.angle_q() >= lq - PI {
            return Err(Error::Inadmissible(format!("angle {} at q exceeds the margin {}", k.angle_q(), lq - PI)));
        }
    }
    let r = excise(s, &k)?;
    let (after, _) = systole(&r.surface, tol)?;
    if (after - sys).abs() > tol {
        return Err(Error::Inadmissible(format!("systole moved from {sys} to {after}")));
    }
    Ok((k, r, after))
}

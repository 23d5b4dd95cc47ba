//! Lowering the height of a flat cylinder that carries no systolic loop.

use crate::beam::{sweep_strip, Side, Strip};
use crate::connections::{mesh_segments, DEFAULT_CAP};
use crate::decompose::SystolicDecomposition;
use crate::error::{Error, Result};
use crate::geodesic::{piece_of, systole, turn_ok, GeodesicLoop};
use crate::geom::{point_in_polygon, point_segment_distance, Pt2, Vec2};
use crate::optimize::{Move, MoveKind, OptimizeConfig};
use crate::overlay::{overlay, EdgeTag, Overlay, OverlaySegment};
use crate::structure::systolic_loops;
use crate::surface::{ConeSurface, CornerRef, EdgeRef};

/// The strip swept by a closed geodesic whose region is the domain.
pub fn cylinder_strip(s: &ConeSurface, dec: &SystolicDecomposition, id: usize, tol: f64) -> Result<Strip> {
    let d = dec.domains.get(id).ok_or_else(|| Error::InvalidArgument(format!("no domain {id}")))?;
    if d.euler != 0 || !d.singularities.is_empty() {
        return Err(Error::InvalidArgument(format!("domain {id} is not a flat cylinder")));
    }
    let perimeter: f64 = d.edges.iter().map(|e| e.length).sum();
    let ov = &dec.overlay;
    let probe = |strip: &Strip| {
        d.faces.iter().all(|&t| {
            let p = &ov.placement[t];
            let c = Pt2::from((p[0].coords + p[1].coords + p[2].coords) / 3.0);
            strip.locate(ov.origin[t], &c).is_some_and(|(_, y)| y > 0.0 && y < strip.width)
        })
    };
    for lp in closed_geodesics(s, 0.5 * perimeter + tol)? {
        for side in [Side::Left, Side::Right] {
            let Some(strip) = sweep_strip(s, &lp, side, DEFAULT_CAP)? else {
                continue;
            };
            if strip.wrapped || strip.width <= 0.0 {
                continue;
            }
            if (strip.area() - d.area).abs() <= 1e-7 * d.area.max(1.0) && probe(&strip) {
                return Ok(strip);
            }
        }
    }
    Err(Error::InvalidArgument(format!("domain {id} is not swept by a closed geodesic")))
}

/// Closed geodesics through cone points up to `budget`, allowed to pass
/// through their base point more than once.
pub fn closed_geodesics(s: &ConeSurface, budget: f64) -> Result<Vec<GeodesicLoop>> {
    let table = mesh_segments(s, budget, DEFAULT_CAP)?;
    let mut found: Vec<GeodesicLoop> = Vec::new();
    for v in s.cone_points() {
        let mut stack: Vec<(Vec<usize>, f64)> = table.outgoing(v).iter().map(|&i| (vec![i], table.segments[i].length)).collect();
        while let Some((chain, len)) = stack.pop() {
            let last = &table.segments[*chain.last().unwrap()];
            let w = last.to;
            if w == v && turn_ok(s.angle(v), last.end, table.segments[chain[0]].start) {
                let lp = GeodesicLoop::from_pieces(s, chain.iter().map(|&i| piece_of(&table, i)).collect());
                if !found.iter().any(|f| f.same_trace(s, &lp)) {
                    found.push(lp);
                }
            }
            for &j in table.outgoing(w) {
                let nl = len + table.segments[j].length;
                if nl <= budget && turn_ok(s.angle(w), last.end, table.segments[j].start) {
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

/// Triangle and layout position of the strip point `(x, y)`.
fn strip_point(s: &ConeSurface, strip: &Strip, x: f64, y: f64) -> Option<(usize, Pt2, Vec2)> {
    strip
        .beams
        .iter()
        .filter(|b| x > b.x0 && x < b.x1 && y > b.lower(x) && y < strip.width)
        .map(|b| (b.tri, b.motion * Pt2::new(x, y), b.motion.rotation * Vec2::new(1.0, 0.0)))
        .find(|(t, p, _)| point_in_polygon(p, s.layout(*t)))
}

/// True when `p` is inside triangle `t` away from its sides.
fn off_edges(s: &ConeSurface, t: usize, p: &Pt2) -> bool {
    let l = s.layout(t);
    let scale = s.lengths(t).iter().fold(0.0f64, |a, &b| a.max(b));
    (0..3).all(|k| point_segment_distance(p, &l[k], &l[(k + 1) % 3]) > 1e-6 * scale)
}

/// Two parallels at heights `y1 < y2`, each split in two halves.
fn parallels(s: &ConeSurface, strip: &Strip, x: f64, ys: [f64; 2], marks: &[Vec<f64>; 4]) -> Result<Vec<OverlaySegment>> {
    let half = 0.5 * strip.length;
    let mut out = Vec::new();
    for (k, y) in ys.into_iter().enumerate() {
        for j in 0..2 {
            let (tri, start, dir) = strip_point(s, strip, x + j as f64 * half, y)
                .ok_or_else(|| Error::KernelDefect(format!("height {y} is off the strip")))?;
            out.push(OverlaySegment { tri, start, dir, length: half, marks: marks[2 * k + j].clone() });
        }
    }
    Ok(out)
}

fn offsets(ov: &Overlay, seg: usize) -> Vec<f64> {
    let mut v: Vec<f64> = ov.segment_edges(seg).iter().flat_map(|(_, t)| [t.from, t.to]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    v
}

fn merged(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    v
}

/// Cuts out the slab between heights `y1` and `y2` and glues its sides.
fn remove_slab(s: &ConeSurface, strip: &Strip, ys: [f64; 2]) -> Result<(ConeSurface, f64)> {
    let half = 0.5 * strip.length;
    let clear = |x: f64| {
        [ys[0], ys[1]].iter().all(|&y| {
            [x, x + half].iter().all(|&x| strip_point(s, strip, x, y).is_some_and(|(t, p, _)| off_edges(s, t, &p)))
        })
    };
    let x = (1..64).map(|k| (k as f64 * 0.618_033_988_749_895).fract() * half).find(|&x| clear(x));
    let x = x.ok_or_else(|| Error::KernelDefect("no common abscissa for the cut".into()))?;
    let mut marks: [Vec<f64>; 4] = Default::default();
    let mut cut = None;
    for _ in 0..4 {
        let ov = overlay(s, &parallels(s, strip, x, ys, &marks)?, &[])?;
        let offs: Vec<Vec<f64>> = (0..4).map(|i| offsets(&ov, i)).collect();
        let a = merged(&offs[0], &offs[2]);
        let b = merged(&offs[1], &offs[3]);
        if offs[0].len() == a.len() && offs[2].len() == a.len() && offs[1].len() == b.len() && offs[3].len() == b.len() {
            cut = Some(ov);
            break;
        }
        marks = [a.clone(), b.clone(), a, b];
    }
    let ov = cut.ok_or_else(|| Error::KernelDefect("parallels cannot be subdivided alike".into()))?;
    let sf = &ov.surface;
    let n = sf.num_triangles();
    let inside: Vec<bool> = (0..n)
        .map(|t| {
            let p = &ov.placement[t];
            let c = Pt2::from((p[0].coords + p[1].coords + p[2].coords) / 3.0);
            strip.locate(ov.origin[t], &c).is_some_and(|(_, y)| y > ys[0] && y < ys[1])
        })
        .collect();
    let keep: Vec<usize> = (0..n).filter(|&t| !inside[t]).collect();
    let mut newid = vec![usize::MAX; n];
    for (i, &t) in keep.iter().enumerate() {
        newid[t] = i;
    }
    let map = |e: EdgeRef| EdgeRef::new(newid[e.tri], e.edge);
    let mut pairs = Vec::new();
    let mut open: [Vec<(EdgeRef, f64, f64)>; 2] = Default::default();
    for &t in &keep {
        for j in 0..3u8 {
            let e = EdgeRef::new(t, j);
            let o = sf.glued(e);
            if !inside[o.tri] {
                if (e.tri, e.edge) < (o.tri, o.edge) {
                    pairs.push((map(e), map(o)));
                }
                continue;
            }
            let tag: EdgeTag = ov
                .tags
                .get(&e)
                .and_then(|v| v.first().copied())
                .ok_or_else(|| Error::KernelDefect("open edge off the cut".into()))?;
            let shift = if tag.seg % 2 == 1 { half } else { 0.0 };
            open[tag.seg / 2].push((map(e), tag.from + shift, tag.to + shift));
        }
    }
    if open[0].len() != open[1].len() {
        return Err(Error::KernelDefect("the two sides of the cut differ".into()));
    }
    for &(e, a, b) in &open[0] {
        let m = open[1]
            .iter()
            .find(|u| (u.1 - b).abs() < 1e-9 && (u.2 - a).abs() < 1e-9)
            .ok_or_else(|| Error::KernelDefect("the two sides of the cut differ".into()))?;
        pairs.push((e, m.0));
    }
    let lengths: Vec<[f64; 3]> = keep.iter().map(|&t| sf.lengths(t)).collect();
    let out = ConeSurface::from_pairs(lengths, &pairs)?;
    let keep_v: Vec<usize> = (0..s.num_vertices())
        .filter_map(|v| ov.new_vertex_of(v))
        .filter_map(|w| sf.vertex(w).corners.iter().find(|c| !inside[c.tri]).map(|c| out.vertex_of(CornerRef::new(newid[c.tri], c.corner))))
        .collect();
    // points on the seam are regular up to rounding in the thin slivers
    let (out, _) = crate::simplify::simplify_within(&out, &keep_v, 1e-6)?;
    let removed = s.area() - out.area();
    Ok((out, removed))
}

/// Shrinks the height of cylinder domain `id` by the largest tried amount
/// that keeps the systole at `reference`.
pub fn shrink_cylinder(
    s: &ConeSurface,
    dec: &SystolicDecomposition,
    id: usize,
    cfg: &OptimizeConfig,
    reference: f64,
) -> Result<(ConeSurface, Move)> {
    let strip = cylinder_strip(s, dec, id, cfg.tol)?;
    let sys = dec.systole;
    let h = strip.width;
    let next = systolic_loops(s, sys + h, cfg.tol)?
        .iter()
        .map(|l| l.length)
        .filter(|&l| l > sys + cfg.tol)
        .fold(sys + h, f64::min);
    // a loop of length at most `next` crosses the cylinder at most next / h times
    let rate = (next / h - 1e-9).ceil().max(1.0);
    // the full step can bring the next loop down to the systole exactly
    let mut delta = ((next - sys) / rate).min(0.5 * h);
    for _ in 0..cfg.tries {
        if delta < 1e-9 * sys {
            break;
        }
        // a cut along a mesh edge fails, so try a few heights
        let slab = [0.5, 0.447, 0.553, 0.382, 0.618]
            .iter()
            .map(|f| f * h)
            .filter(|m| m - 0.5 * delta > 0.0 && m + 0.5 * delta < h)
            .find_map(|m| remove_slab(s, &strip, [m - 0.5 * delta, m + 0.5 * delta]).ok());
        if let Some((out, removed)) = slab {
            let (after, _) = systole(&out, cfg.tol)?;
            if (after - reference).abs() <= cfg.tol && removed > 0.0 {
                let m = Move {
                    kind: MoveKind::CylinderShrink,
                    p: None,
                    q: None,
                    domain: Some(id),
                    base_length: strip.length,
                    width: delta,
                    removed_area: removed,
                    area: [s.area(), out.area()],
                    systole: [sys, after],
                    singularities: [s.cone_points().len(), out.cone_points().len()],
                };
                return Ok((out, m));
            }
        }
        delta *= cfg.shrink;
    }
    Err(Error::Degenerate(format!("no height change of cylinder {id} keeps the systole")))
}

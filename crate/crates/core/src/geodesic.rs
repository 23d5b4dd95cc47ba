//! Closed geodesics, systoles and contractibility.

use crate::connections::{mesh_segments, sweep, Seed, SegmentTable, SweepHit, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::geom::{cross, wrap, Motion, Pt2, Vec2, PI, TAU};
use crate::surface::{ConeSurface, CornerRef, EdgeRef, EPS};
use crate::trace::trace_from_vertex;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// A straight segment between two mesh vertices. `start` is the angle
/// position of its direction at `from`; `end` is the angle position at `to`
/// of the direction pointing back along it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub start: f64,
    pub end: f64,
}

impl Piece {
    pub fn reversed(&self) -> Piece {
        Piece { from: self.to, to: self.from, length: self.length, start: self.end, end: self.start }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopKind {
    /// Passes through at least one cone point.
    ConePolygon,
    /// Avoids every cone point; lies inside a flat cylinder.
    CylinderCore,
}

/// Rotation angles of a loop at one of its vertices: `left` is swept
/// counterclockwise from the outgoing to the incoming direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub vertex: usize,
    pub right: f64,
    pub left: f64,
}

/// A closed path made of straight pieces joined at mesh vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicLoop {
    pub kind: LoopKind,
    pub length: f64,
    pub pieces: Vec<Piece>,
}

/// Rigid motion accumulated by developing a loop along its left side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Holonomy {
    pub rotation: f64,
    pub translation: [f64; 2],
}

impl Holonomy {
    pub fn is_translation(&self) -> bool {
        let r = wrap(self.rotation, TAU);
        r < 1e-9 || TAU - r < 1e-9
    }
}

/// Angle swept counterclockwise at a vertex of total angle `theta` from the
/// outgoing direction `out` to the incoming direction `back`.
pub fn left_angle(theta: f64, back: f64, out: f64) -> f64 {
    wrap(back - out, theta)
}

impl GeodesicLoop {
    pub fn from_pieces(s: &ConeSurface, pieces: Vec<Piece>) -> Self {
        let length = pieces.iter().map(|p| p.length).sum();
        let kind = if pieces.iter().any(|p| s.is_cone_point(p.from)) {
            LoopKind::ConePolygon
        } else {
            LoopKind::CylinderCore
        };
        GeodesicLoop { kind, length, pieces }
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.from).collect()
    }

    pub fn reversed(&self) -> GeodesicLoop {
        let pieces = self.pieces.iter().rev().map(|p| p.reversed()).collect();
        GeodesicLoop { kind: self.kind, length: self.length, pieces }
    }

    /// Rotation angles at the start of each piece.
    pub fn rotations(&self, s: &ConeSurface) -> Vec<Rotation> {
        let n = self.pieces.len();
        (0..n)
            .map(|i| {
                let prev = &self.pieces[(i + n - 1) % n];
                let cur = &self.pieces[i];
                let theta = s.angle(cur.from);
                let left = left_angle(theta, prev.end, cur.start);
                Rotation { vertex: cur.from, right: theta - left, left }
            })
            .collect()
    }

    /// Both rotation angles at least π (within slack) at every vertex.
    pub fn is_geodesic(&self, s: &ConeSurface) -> bool {
        self.rotations(s).iter().all(|r| r.left >= PI - EPS && r.right >= PI - EPS)
    }

    pub fn holonomy(&self, s: &ConeSurface) -> Holonomy {
        let rot = self.rotations(s);
        let n = self.pieces.len();
        let mut heading = 0.0f64;
        let mut pos = Vec2::zeros();
        for i in 0..n {
            let p = &self.pieces[i];
            pos += Vec2::new(heading.cos(), heading.sin()) * p.length;
            heading += PI - rot[(i + 1) % n].left;
        }
        Holonomy { rotation: wrap(heading, TAU), translation: [pos.x, pos.y] }
    }

    /// Triangle edges crossed, in order.
    pub fn crossings(&self, s: &ConeSurface) -> Result<Vec<EdgeRef>> {
        let mut out = Vec::new();
        for p in &self.pieces {
            out.extend(trace_from_vertex(s, p.from, p.start, p.length)?.crossings);
        }
        Ok(out)
    }

    /// Rotates the piece list so the loop starts at its lexicographically
    /// smallest (vertex, angle) position.
    pub fn canonical_start(&self) -> GeodesicLoop {
        let n = self.pieces.len();
        let k = (0..n)
            .min_by(|&a, &b| {
                let (pa, pb) = (&self.pieces[a], &self.pieces[b]);
                pa.from.cmp(&pb.from).then(pa.start.total_cmp(&pb.start))
            })
            .unwrap_or(0);
        let mut pieces = self.pieces.clone();
        pieces.rotate_left(k);
        GeodesicLoop { pieces, ..self.clone() }
    }

    /// Sorted directions occupied by the loop at its vertices; equal for two
    /// loops exactly when they have the same trace, in either orientation.
    pub fn signature(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for p in &self.pieces {
            out.push((p.from, p.start));
            out.push((p.to, p.end));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        out
    }

    pub fn same_trace(&self, s: &ConeSurface, other: &GeodesicLoop) -> bool {
        let (a, b) = (self.signature(), other.signature());
        if a.len() != b.len() || (self.length - other.length).abs() > 1e-7 * self.length.max(1.0) {
            return false;
        }
        a.iter().zip(&b).all(|(x, y)| {
            let theta = s.angle(x.0);
            let d = (x.1 - y.1).rem_euclid(theta);
            x.0 == y.0 && (d < 1e-7 || theta - d < 1e-7)
        })
    }

    pub fn to_json(&self, s: &ConeSurface) -> Result<LoopJson> {
        Ok(LoopJson {
            kind: self.kind,
            length: self.length,
            vertices: self.vertices(),
            rotations: self.rotations(s).iter().map(|r| [r.right, r.left]).collect(),
            crossings: self.crossings(s)?.iter().map(|e| format!("{}.{}", e.tri, e.edge)).collect(),
        })
    }
}

/// Serialized form of a loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopJson {
    pub kind: LoopKind,
    pub length: f64,
    pub vertices: Vec<usize>,
    /// `[right, left]` rotation angles per vertex.
    pub rotations: Vec<[f64; 2]>,
    pub crossings: Vec<String>,
}

pub(crate) fn piece_of(table: &SegmentTable, i: usize) -> Piece {
    let g = &table.segments[i];
    Piece { from: g.from, to: g.to, length: g.length, start: g.start, end: g.end }
}

pub(crate) fn turn_ok(theta: f64, back: f64, out: f64) -> bool {
    let l = left_angle(theta, back, out);
    l >= PI - EPS && theta - l >= PI - EPS
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Shortest chain of segments from `v` back to `v` that is straight (both
/// rotation angles ≥ π) at every interior vertex, within the table budget.
pub(crate) fn shortest_based_loop(s: &ConeSurface, table: &SegmentTable, v: usize) -> Option<(f64, Vec<usize>)> {
    let n = table.segments.len();
    let budget = table.budget * (1.0 + 1e-12);
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    for &i in table.outgoing(v) {
        dist[i] = table.segments[i].length;
        heap.push(Item(dist[i], i));
    }
    while let Some(Item(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let seg = &table.segments[i];
        if seg.to == v {
            let mut chain = vec![i];
            let mut k = i;
            while pred[k] != usize::MAX {
                k = pred[k];
                chain.push(k);
            }
            chain.reverse();
            return Some((d, chain));
        }
        let w = seg.to;
        let theta = s.angle(w);
        for &j in table.outgoing(w) {
            let nd = d + table.segments[j].length;
            if nd <= budget && nd < dist[j] && turn_ok(theta, seg.end, table.segments[j].start) {
                dist[j] = nd;
                pred[j] = i;
                heap.push(Item(nd, j));
            }
        }
    }
    None
}

/// Search settings shared by the systole routines.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub cap: usize,
    /// Initial length budget; defaults to twice the shortest edge.
    pub initial_budget: Option<f64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { cap: DEFAULT_CAP, initial_budget: None }
    }
}

fn check_npc(s: &ConeSurface) -> Result<()> {
    if !s.is_npc() {
        return Err(Error::InvalidArgument("surface is not nonpositively curved".into()));
    }
    if s.genus() >= 2 && s.cone_points().is_empty() {
        return Err(Error::Inconsistent("genus at least 2 without cone points".into()));
    }
    Ok(())
}

fn min_edge(s: &ConeSurface) -> f64 {
    (0..s.num_triangles())
        .flat_map(|t| s.lengths(t))
        .fold(f64::INFINITY, f64::min)
}

/// Runs `f` on segment tables of doubling budget until it returns a value.
pub(crate) fn with_growing_budget<T>(
    s: &ConeSurface,
    opts: &SearchOptions,
    mut f: impl FnMut(&SegmentTable) -> Option<T>,
) -> Result<T> {
    let mut budget = opts.initial_budget.unwrap_or(2.0 * min_edge(s));
    let diam_bound = (0..s.num_triangles()).flat_map(|t| s.lengths(t)).sum::<f64>() * 2.0;
    loop {
        let table = mesh_segments(s, budget, opts.cap)?;
        if let Some(x) = f(&table) {
            return Ok(x);
        }
        if budget > 4.0 * diam_bound {
            return Err(Error::KernelDefect("no closed geodesic found below the diameter bound".into()));
        }
        budget *= 2.0;
    }
}

/// Length of the shortest noncontractible loop based at vertex `v`.
pub fn based_systole(s: &ConeSurface, v: usize, tol: f64) -> Result<f64> {
    based_systole_with(s, v, tol, &SearchOptions::default()).map(|(l, _)| l)
}

pub fn based_systole_with(s: &ConeSurface, v: usize, _tol: f64, opts: &SearchOptions) -> Result<(f64, GeodesicLoop)> {
    if v >= s.num_vertices() {
        return Err(Error::UnknownVertex(v));
    }
    check_npc(s)?;
    with_growing_budget(s, opts, |table| {
        shortest_based_loop(s, table, v)
            .map(|(d, chain)| (d, GeodesicLoop::from_pieces(s, chain.iter().map(|&i| piece_of(table, i)).collect())))
    })
}

/// Length of the shortest noncontractible loop based at the point `x` of
/// triangle `tri` (layout frame). The point is first made a mesh vertex.
pub fn based_systole_at(s: &ConeSurface, tri: usize, x: Pt2, tol: f64) -> Result<f64> {
    let ov = crate::overlay::overlay(s, &[], &[(tri, x)])?;
    based_systole(&ov.surface, ov.point_vertex[0], tol)
}

fn base_points(s: &ConeSurface) -> Vec<usize> {
    let cones = s.cone_points();
    if cones.is_empty() {
        (0..s.num_vertices()).collect()
    } else {
        cones
    }
}

/// The systole and a shortest closed geodesic realizing it.
pub fn systole(s: &ConeSurface, tol: f64) -> Result<(f64, GeodesicLoop)> {
    systole_with(s, tol, &SearchOptions::default())
}

pub fn systole_with(s: &ConeSurface, _tol: f64, opts: &SearchOptions) -> Result<(f64, GeodesicLoop)> {
    check_npc(s)?;
    let bases = base_points(s);
    let found = with_growing_budget(s, opts, |table| {
        let mut best: Option<(f64, Vec<EdgeRef>, GeodesicLoop)> = None;
        for &v in &bases {
            if let Some((d, chain)) = shortest_based_loop(s, table, v) {
                let cross: Vec<EdgeRef> = chain.iter().flat_map(|&i| table.segments[i].crossings.clone()).collect();
                let better = match &best {
                    None => true,
                    Some((bd, bc, _)) => {
                        d < bd - 1e-12 * bd.max(1.0) || ((d - bd).abs() <= 1e-12 * bd.max(1.0) && cross < *bc)
                    }
                };
                if better {
                    let lp = GeodesicLoop::from_pieces(s, chain.iter().map(|&i| piece_of(table, i)).collect());
                    best = Some((d, cross, lp));
                }
            }
        }
        best.map(|(d, _, lp)| (d, lp))
    })?;
    Ok(found)
}

/// A closed path to be tested for contractibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedPath {
    /// Consecutive oriented triangle edges (edge `e` runs from corner `e` to
    /// corner `e + 1`).
    Edges(Vec<EdgeRef>),
    Pieces(Vec<Piece>),
}

impl ClosedPath {
    pub fn to_pieces(&self, s: &ConeSurface) -> Result<Vec<Piece>> {
        let pieces = match self {
            ClosedPath::Pieces(p) => p.clone(),
            ClosedPath::Edges(edges) => edges
                .iter()
                .map(|e| {
                    if e.tri >= s.num_triangles() || e.edge > 2 {
                        return Err(Error::InvalidArgument(format!("no edge {}.{}", e.tri, e.edge)));
                    }
                    let a = CornerRef::new(e.tri, e.edge);
                    let b = CornerRef::new(e.tri, (e.edge + 1) % 3);
                    Ok(Piece {
                        from: s.vertex_of(a),
                        to: s.vertex_of(b),
                        length: s.edge_length(*e),
                        start: s.abs_angle(a, 0.0),
                        end: s.abs_angle(b, s.corner_angle(b)),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let n = pieces.len();
        for i in 0..n {
            if pieces[i].to != pieces[(i + 1) % n].from {
                return Err(Error::InvalidArgument(format!("path is not closed at step {i}")));
            }
        }
        Ok(pieces)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Contractible,
    Noncontractible,
}

/// Outcome of tightening a closed path. A noncontractible path carries its
/// tightened geodesic representative and that loop's holonomy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyCertificate {
    pub verdict: Verdict,
    pub steps: usize,
    pub tightened: Option<GeodesicLoop>,
    pub holonomy: Option<Holonomy>,
}

const MAX_TIGHTEN: usize = 20_000;

/// Decides contractibility by shortening the path to a geodesic. On a
/// nonpositively curved surface a closed local geodesic never bounds a disk,
/// so the path is contractible exactly when it shrinks to nothing.
pub fn is_contractible(s: &ConeSurface, path: &ClosedPath) -> Result<HomotopyCertificate> {
    check_npc(s)?;
    let mut pieces = path.to_pieces(s)?;
    let scale: f64 = pieces.iter().map(|p| p.length).sum::<f64>().max(1e-300);
    for step in 0..MAX_TIGHTEN {
        let total: f64 = pieces.iter().map(|p| p.length).sum();
        if pieces.is_empty() || total <= 1e-12 * scale {
            return Ok(HomotopyCertificate {
                verdict: Verdict::Contractible,
                steps: step,
                tightened: None,
                holonomy: None,
            });
        }
        let n = pieces.len();
        let mut worst: Option<(f64, usize)> = None;
        for i in 0..n {
            let prev = &pieces[(i + n - 1) % n];
            let cur = &pieces[i];
            let theta = s.angle(cur.from);
            let l = left_angle(theta, prev.end, cur.start);
            let m = l.min(theta - l);
            if m < PI - EPS && worst.is_none_or(|(w, _)| m < w) {
                worst = Some((m, i));
            }
        }
        let Some((_, i)) = worst else {
            let lp = GeodesicLoop::from_pieces(s, pieces);
            let h = lp.holonomy(s);
            return Ok(HomotopyCertificate {
                verdict: Verdict::Noncontractible,
                steps: step,
                tightened: Some(lp),
                holonomy: Some(h),
            });
        };
        tighten_at(s, &mut pieces, i)?;
    }
    Err(Error::Degenerate("path tightening did not converge".into()))
}

/// A vertex seen from the apex of a tightening step, in the apex frame.
struct Seen {
    pos: Pt2,
    /// Angle position at the vertex of the direction towards the apex.
    toward_apex: f64,
    vertex: usize,
}

fn signed_angle(a: &Vec2, b: &Vec2) -> f64 {
    cross(a, b).atan2(a.dot(b))
}

/// Vertices visible from `v` inside the triangle spanned by `v` (at the
/// origin, direction `a0` along +x), `u` and `w`, over the sweep `phi < π`.
fn visible_in_triangle(s: &ConeSurface, v: usize, a0: f64, phi: f64, u: Pt2, w: Pt2) -> Result<Vec<Seen>> {
    let origin = Pt2::origin();
    let base = w - u;
    let sigma = cross(&base, &(origin - u)).signum();
    let scale = base.norm().max(u.coords.norm()).max(w.coords.norm());
    let tol = 1e-12 * scale;
    let side = move |p: &Pt2| sigma * cross(&base, &(p - u)) / base.norm();
    let vx = s.vertex(v);
    let (c0, within0) = s.locate_angle(v, a0);
    let slot0 = vx.corners.iter().position(|c| *c == c0).unwrap();
    let mut seeds = Vec::new();
    let mut out = Vec::new();
    let mut rel = -within0;
    let mut k = slot0;
    while rel < phi {
        let c = vx.corners[k];
        let ang = s.corner_angle(c);
        let p = s.layout(c.tri);
        let pc = p[c.corner as usize];
        let e0 = p[(c.corner as usize + 1) % 3] - pc;
        if rel > 0.0 {
            // edge leaving v at relative angle `rel`
            let len = e0.norm();
            let pos = Pt2::new(rel.cos() * len, rel.sin() * len);
            if side(&pos) >= -tol {
                let far = CornerRef::new(c.tri, (c.corner + 1) % 3);
                out.push(Seen {
                    pos,
                    toward_apex: s.abs_angle(far, s.corner_angle(far)),
                    vertex: s.vertex_of(far),
                });
            }
        }
        let lo = (0.0f64).max(rel) - rel;
        let hi = phi.min(rel + ang) - rel;
        if hi > lo {
            let rot = nalgebra::UnitComplex::new(rel - e0.y.atan2(e0.x));
            let frame = Motion::from_parts(nalgebra::Translation2::from(-(rot * pc.coords)), rot);
            seeds.push(Seed { corner: c, lo, hi, frame });
        }
        rel += ang;
        k = (k + 1) % vx.corners.len();
    }
    let prune = |_: &Pt2, xr: &Pt2, xl: &Pt2| side(xr) < -tol && side(xl) < -tol;
    let mut on_hit = |h: &SweepHit, _: &[crate::connections::Node]| {
        if side(&h.pos) >= -tol {
            out.push(Seen {
                pos: h.pos,
                toward_apex: s.abs_angle(h.apex, crate::trace::angle_in_corner(s, h.apex, &h.back_dir)),
                vertex: s.vertex_of(h.apex),
            });
        }
    };
    sweep(s, &seeds, DEFAULT_CAP, &prune, &mut on_hit)?;
    Ok(out)
}

/// Convex chain from `u` to `w` bulging towards the origin and supported by
/// the given points (collinear points are kept).
fn taut_chain(u: Pt2, w: Pt2, pts: &[Pt2]) -> Vec<usize> {
    let origin = Pt2::origin();
    let sigma = cross(&(w - u), &(origin - u)).signum();
    let scale = (w - u).norm().max(u.coords.norm()).max(w.coords.norm());
    let tol = 1e-12 * scale * scale;
    // index pts.len() stands for w
    let at = |i: usize| if i == pts.len() { w } else { pts[i] };
    let mut used = vec![false; pts.len()];
    let mut cur = u;
    let mut chain = Vec::new();
    for _ in 0..=pts.len() {
        let mut best: Option<usize> = None;
        for i in 0..=pts.len() {
            if i < pts.len() && (used[i] || (pts[i] - cur).norm() <= 1e-12 * scale) {
                continue;
            }
            let p = at(i);
            match best {
                None => best = Some(i),
                Some(b) => {
                    let bp = at(b);
                    let c = sigma * cross(&(bp - cur), &(p - cur));
                    let ahead = (bp - cur).dot(&(p - cur)) > 0.0;
                    if c > tol || (c.abs() <= tol && ahead && (p - cur).norm() < (bp - cur).norm()) {
                        best = Some(i);
                    }
                }
            }
        }
        let b = best.unwrap();
        if b == pts.len() {
            return chain;
        }
        used[b] = true;
        chain.push(b);
        cur = pts[b];
    }
    chain
}

fn tighten_at(s: &ConeSurface, pieces: &mut Vec<Piece>, i: usize) -> Result<()> {
    let n = pieces.len();
    let ip = (i + n - 1) % n;
    let p = pieces[ip];
    let q = pieces[i];
    let v = q.from;
    let theta = s.angle(v);
    let l = left_angle(theta, p.end, q.start);
    let r = theta - l;
    if l.min(r) < 1e-12 && n >= 2 {
        // the path doubles back along one segment
        if ip < i {
            pieces.drain(ip..=i);
        } else {
            pieces.remove(i);
            pieces.pop();
        }
        return Ok(());
    }
    let (a0, phi, u, w) = if l < r {
        (q.start, l, Pt2::new(p.length * l.cos(), p.length * l.sin()), Pt2::new(q.length, 0.0))
    } else {
        (p.end, r, Pt2::new(p.length, 0.0), Pt2::new(q.length * r.cos(), q.length * r.sin()))
    };
    let seen = visible_in_triangle(s, v, a0, phi, u, w)?;
    let pts: Vec<Pt2> = seen.iter().map(|x| x.pos).collect();
    let chain = taut_chain(u, w, &pts);
    let origin = Pt2::origin();
    // chain nodes: (vertex, position, angle position towards the origin)
    let mut nodes = vec![(p.from, u, p.start)];
    for &k in &chain {
        nodes.push((seen[k].vertex, seen[k].pos, seen[k].toward_apex));
    }
    nodes.push((q.to, w, q.end));
    let mut fresh = Vec::new();
    for win in nodes.windows(2) {
        let (va, pa, ra) = win[0];
        let (vb, pb, rb) = win[1];
        let d = pb - pa;
        let start = wrap(ra + signed_angle(&(origin - pa), &d), s.angle(va));
        let end = wrap(rb + signed_angle(&(origin - pb), &(-d)), s.angle(vb));
        fresh.push(Piece { from: va, to: vb, length: d.norm(), start, end });
    }
    if n == 1 {
        *pieces = fresh;
    } else if ip < i {
        pieces.splice(ip..=i, fresh);
    } else {
        pieces.remove(i);
        pieces.pop();
        pieces.extend(fresh);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octagon, torus};

    #[test]
    fn unit_torus_systole_is_one() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let (v, w) = systole(&s, 1e-9).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(w.kind, LoopKind::CylinderCore);
        assert!(w.holonomy(&s).is_translation());
    }

    #[test]
    fn octagon_systole_is_a_side() {
        let s = octagon(1.0).unwrap();
        let (v, w) = systole(&s, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(w.kind, LoopKind::ConePolygon);
        assert!(w.is_geodesic(&s));
        assert!((based_systole(&s, 0, 1e-9).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_boundary_is_contractible() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let path = ClosedPath::Edges(vec![EdgeRef::new(0, 0), EdgeRef::new(0, 1), EdgeRef::new(0, 2)]);
        let c = is_contractible(&s, &path).unwrap();
        assert_eq!(c.verdict, Verdict::Contractible);
    }

    #[test]
    fn torus_horizontal_loop_translates_by_one() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let c = is_contractible(&s, &ClosedPath::Edges(vec![EdgeRef::new(0, 0)])).unwrap();
        assert_eq!(c.verdict, Verdict::Noncontractible);
        let h = c.holonomy.unwrap();
        assert!(h.is_translation());
        assert!((h.translation[0] - 1.0).abs() < 1e-12 && h.translation[1].abs() < 1e-12);
    }

    #[test]
    fn octagon_side_and_diagonal_loops() {
        let s = octagon(1.0).unwrap();
        // a side of the octagon
        let c = is_contractible(&s, &ClosedPath::Edges(vec![EdgeRef::new(0, 0)])).unwrap();
        assert_eq!(c.verdict, Verdict::Noncontractible);
        // a side followed by the same side backwards
        let c = is_contractible(
            &s,
            &ClosedPath::Edges(vec![EdgeRef::new(0, 0), EdgeRef::new(3, 1)]),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Contractible);
        // boundary of a fan triangle
        let c = is_contractible(
            &s,
            &ClosedPath::Edges(vec![EdgeRef::new(2, 0), EdgeRef::new(2, 1), EdgeRef::new(2, 2)]),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Contractible);
    }

    #[test]
    fn based_value_at_points() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let p = s.layout(1);
        let x = Pt2::from(p[0].coords * 0.2 + p[1].coords * 0.5 + p[2].coords * 0.3);
        let v = based_systole_at(&s, 1, x, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let s = octagon(1.0).unwrap();
        let (t, k) = (0..s.num_triangles())
            .flat_map(|t| (0..3u8).map(move |k| (t, k)))
            .find(|&(t, k)| (s.lengths(t)[k as usize] - 1.0).abs() < 1e-12)
            .unwrap();
        let p = s.layout(t);
        let mid = Pt2::from((p[k as usize].coords + p[crate::surface::next3(k) as usize].coords) / 2.0);
        let v = based_systole_at(&s, t, mid, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn systole_scales_linearly() {
        let s = octagon(1.0).unwrap();
        let t = s.scaled(2.5).unwrap();
        let (a, _) = systole(&s, 1e-9).unwrap();
        let (b, _) = systole(&t, 1e-9).unwrap();
        assert!((b - 2.5 * a).abs() < 1e-9);
    }
}

//! Flat strips swept from a closed geodesic.
//!
//! When a loop has rotation angle exactly π along one side, the parallels on
//! that side form a flat strip. The strip is parametrized by `x` (arc length
//! along the loop) and `y` (distance from it) and grows until a cone point
//! is reached or the strip has covered the whole area.

use crate::error::Result;
use crate::geodesic::{GeodesicLoop, Piece};
use crate::geom::{cross, wrap, Motion, Pt2, Vec2, PI};
use crate::surface::{next3, ConeSurface, CornerRef, EdgeRef, EPS};
use crate::trace::{angle_in_corner, trace_from_vertex};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

/// A vertex met by the strip, in strip coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripHit {
    pub vertex: usize,
    pub corner: CornerRef,
    pub x: f64,
    pub y: f64,
    /// Angle position at the vertex of the direction pointing back into the
    /// strip (towards decreasing `y`).
    pub down: f64,
}

/// Part of the strip inside one triangle: the region above the line through
/// `lo_a`, `lo_b` with `x0 <= x <= x1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beam {
    pub tri: usize,
    /// Strip coordinates into the triangle's layout frame.
    pub motion: Motion,
    pub x0: f64,
    pub x1: f64,
    pub lo_a: Pt2,
    pub lo_b: Pt2,
    pub y_min: f64,
}

impl Beam {
    pub(crate) fn lower(&self, x: f64) -> f64 {
        let d = self.lo_b - self.lo_a;
        if d.x.abs() < 1e-300 {
            return self.lo_a.y.min(self.lo_b.y);
        }
        self.lo_a.y + (x - self.lo_a.x) * d.y / d.x
    }
}

#[derive(Clone, Debug)]
pub struct Strip {
    /// The loop swept from, oriented so the strip lies on its left.
    pub base: GeodesicLoop,
    pub length: f64,
    pub width: f64,
    /// True when no cone point bounds the strip and it covers the area.
    pub wrapped: bool,
    pub hits: Vec<StripHit>,
    pub beams: Vec<Beam>,
}

struct Queued(f64, usize);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn motion_from(origin: Pt2, dir: Vec2) -> Motion {
    let rot = nalgebra::UnitComplex::new(dir.y.atan2(dir.x));
    Motion::from_parts(nalgebra::Translation2::from(origin.coords), rot)
}

/// True when the loop turns by exactly π on the given side everywhere.
pub fn side_is_flat(s: &ConeSurface, lp: &GeodesicLoop, side: Side) -> bool {
    lp.rotations(s).iter().all(|r| {
        let a = if side == Side::Left { r.left } else { r.right };
        (a - PI).abs() <= EPS
    })
}

/// Sweeps the flat strip on one side of a loop. Returns `None` when the loop
/// does not turn by exactly π on that side.
pub fn sweep_strip(s: &ConeSurface, lp: &GeodesicLoop, side: Side, cap: usize) -> Result<Option<Strip>> {
    if !side_is_flat(s, lp, side) {
        return Ok(None);
    }
    let base = if side == Side::Left { lp.clone() } else { lp.reversed() };
    let length = base.length;
    let y_max = s.area() / length;
    let scale = length.max(y_max);
    let tol = 1e-10 * scale;
    let mut beams: Vec<Beam> = Vec::new();
    let mut queue = BinaryHeap::new();
    let mut x_start = 0.0;
    for p in &base.pieces {
        let tr = trace_from_vertex(s, p.from, p.start, p.length)?;
        for tp in &tr.pieces {
            let len = tp.len();
            if len <= tol {
                continue;
            }
            let d = (tp.end - tp.start) / len;
            let x_a = x_start + tp.offset;
            let mut tri = tp.tri;
            let mut motion = motion_from(tp.start - d * x_a, d);
            // a piece running along an edge may be reported in the triangle on
            // its right; the strip needs the one on its left
            let pts = s.layout(tri);
            let on_line = |k: usize| cross(&d, &(pts[k] - tp.start)).abs() <= tol;
            if let Some(k) = (0..3u8).find(|&k| on_line(k as usize) && on_line(next3(k) as usize)) {
                let third = pts[next3(next3(k)) as usize];
                if cross(&d, &(third - tp.start)) < 0.0 {
                    let o = s.glued(EdgeRef::new(tri, k));
                    motion = s.neighbor_motion(o) * motion;
                    tri = o.tri;
                }
            }
            beams.push(Beam {
                tri,
                motion,
                x0: x_a,
                x1: x_a + len,
                lo_a: Pt2::new(x_a, 0.0),
                lo_b: Pt2::new(x_a + len, 0.0),
                y_min: 0.0,
            });
            queue.push(Queued(0.0, beams.len() - 1));
        }
        x_start += p.length;
    }
    let mut hits: Vec<StripHit> = Vec::new();
    let mut best = f64::INFINITY;
    let mut processed = 0usize;
    while let Some(Queued(ymin, bi)) = queue.pop() {
        if ymin > best.min(y_max) + tol {
            continue;
        }
        processed += 1;
        if processed > cap {
            return Err(crate::Error::BudgetExceeded { budget: cap });
        }
        let b = beams[bi];
        let inv = b.motion.inverse();
        let pts = s.layout(b.tri);
        let q: Vec<Pt2> = (0..3).map(|k| inv * pts[k]).collect();
        // vertices above the lower boundary
        for j in 0..3u8 {
            let c = q[j as usize];
            if c.x < b.x0 - tol || c.x > b.x1 + tol || c.y <= b.lower(c.x) + tol {
                continue;
            }
            let corner = CornerRef::new(b.tri, j);
            let v = s.vertex_of(corner);
            let down = b.motion.rotation * Vec2::new(0.0, -1.0);
            let dup = hits.iter().any(|h| h.vertex == v && (h.x - c.x).abs() <= 1e-9 * scale && (h.y - c.y).abs() <= 1e-9 * scale);
            if !dup {
                hits.push(StripHit {
                    vertex: v,
                    corner,
                    x: c.x,
                    y: c.y,
                    down: s.abs_angle(corner, angle_in_corner(s, corner, &down)),
                });
            }
            if s.is_cone_point(v) && c.y < best {
                best = c.y;
            }
        }
        // exits through edges running leftwards (the triangle lies below them)
        for k in 0..3u8 {
            let a = q[k as usize];
            let c = q[next3(k) as usize];
            if c.x >= a.x - tol {
                continue;
            }
            let lo = c.x.max(b.x0);
            let hi = a.x.min(b.x1);
            if hi - lo <= tol {
                continue;
            }
            let y_at = |x: f64| a.y + (x - a.x) * (c.y - a.y) / (c.x - a.x);
            // keep only the part of the edge above the lower boundary
            let f = |x: f64| y_at(x) - b.lower(x);
            let (flo, fhi) = (f(lo), f(hi));
            if flo <= tol && fhi <= tol {
                continue;
            }
            let (mut lo, mut hi) = (lo, hi);
            if flo < -tol {
                lo += (hi - lo) * (-flo) / (fhi - flo);
            } else if fhi < -tol {
                hi -= (hi - lo) * (-fhi) / (flo - fhi);
            }
            if hi - lo <= tol {
                continue;
            }
            let o = s.glued(EdgeRef::new(b.tri, k));
            let motion = s.neighbor_motion(o) * b.motion;
            let y_min = y_at(lo).min(y_at(hi));
            beams.push(Beam { tri: o.tri, motion, x0: lo, x1: hi, lo_a: c, lo_b: a, y_min });
            queue.push(Queued(y_min, beams.len() - 1));
        }
    }
    let wrapped = !(best <= y_max + tol);
    let width = if wrapped { y_max } else { best };
    hits.retain(|h| h.y <= width + 1e-9 * scale);
    hits.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    Ok(Some(Strip { base, length, width, wrapped, hits, beams }))
}

impl Strip {
    /// Strip coordinates of a point of triangle `tri`, if the closed strip
    /// covers it.
    pub fn locate(&self, tri: usize, p: &Pt2) -> Option<(f64, f64)> {
        self.locate_beam(tri, p).map(|(_, x, y)| (x, y))
    }

    fn locate_beam(&self, tri: usize, p: &Pt2) -> Option<(usize, f64, f64)> {
        let tol = 1e-9 * self.length.max(self.width);
        for (i, b) in self.beams.iter().enumerate().filter(|(_, b)| b.tri == tri) {
            let q = b.motion.inverse() * p;
            if q.x >= b.x0 - tol && q.x <= b.x1 + tol && q.y >= b.lower(q.x) - tol && q.y <= self.width + tol {
                return Some((i, q.x, q.y));
            }
        }
        None
    }

    /// The parallel at the far edge of the strip, through the vertices found
    /// there. `None` for a strip that wrapped around.
    pub fn limit_loop(&self, s: &ConeSurface) -> Option<GeodesicLoop> {
        if self.wrapped {
            return None;
        }
        let tol = 1e-9 * self.length.max(self.width);
        let mut top: Vec<&StripHit> = self.hits.iter().filter(|h| (h.y - self.width).abs() <= tol).collect();
        top.sort_by(|a, b| a.x.total_cmp(&b.x));
        top.dedup_by(|a, b| (a.x - b.x).abs() <= tol);
        if top.len() > 1 && (top[0].x + self.length - top[top.len() - 1].x).abs() <= tol {
            top.pop();
        }
        if top.is_empty() {
            return None;
        }
        let n = top.len();
        let mut pieces = Vec::new();
        for i in 0..n {
            let a = top[i];
            let b = top[(i + 1) % n];
            let mut dx = b.x - a.x;
            if i + 1 == n {
                dx += self.length;
            }
            pieces.push(Piece {
                from: a.vertex,
                to: b.vertex,
                length: dx,
                start: wrap(a.down + PI / 2.0, s.angle(a.vertex)),
                end: wrap(b.down - PI / 2.0, s.angle(b.vertex)),
            });
        }
        Some(GeodesicLoop::from_pieces(s, pieces))
    }

    /// Area of the swept region.
    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// True when every piece of `other` runs inside the closed strip
    /// parallel to its base at one fixed height.
    pub fn contains_parallel(&self, s: &ConeSurface, other: &GeodesicLoop) -> Result<bool> {
        if (other.length - self.length).abs() > 1e-7 * self.length.max(1.0) {
            return Ok(false);
        }
        let mut height: Option<f64> = None;
        for p in &other.pieces {
            let tr = trace_from_vertex(s, p.from, p.start, p.length)?;
            for tp in &tr.pieces {
                let mid = Pt2::from((tp.start.coords + tp.end.coords) / 2.0);
                let Some((bi, _, y)) = self.locate_beam(tp.tri, &mid) else {
                    return Ok(false);
                };
                let d = self.beams[bi].motion.inverse().rotation * (tp.end - tp.start);
                if cross(&Vec2::new(1.0, 0.0), &d).abs() > 1e-7 * d.norm() {
                    return Ok(false);
                }
                match height {
                    None => height = Some(y),
                    Some(h) if (h - y).abs() > 1e-7 * self.length.max(1.0) => return Ok(false),
                    _ => {}
                }
            }
        }
        Ok(true)
    }
}

/// True when the two geodesic loops are equal as point sets or are
/// parallels of one flat strip.
pub fn freely_homotopic(s: &ConeSurface, a: &GeodesicLoop, b: &GeodesicLoop) -> Result<bool> {
    if a.same_trace(s, b) {
        return Ok(true);
    }
    if (a.length - b.length).abs() > 1e-7 * a.length.max(1.0) {
        return Ok(false);
    }
    for side in [Side::Left, Side::Right] {
        if let Some(strip) = sweep_strip(s, a, side, crate::connections::DEFAULT_CAP)? {
            if strip.contains_parallel(s, b)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octagon, torus};
    use crate::geodesic::ClosedPath;
    use crate::surface::EdgeRef as E;

    fn edge_loop(s: &ConeSurface, edges: &[(usize, u8)]) -> GeodesicLoop {
        let path = ClosedPath::Edges(edges.iter().map(|&(t, k)| E::new(t, k)).collect());
        GeodesicLoop::from_pieces(s, path.to_pieces(s).unwrap())
    }

    /// Two unit squares stacked into a 1 x 2 torus with two vertices.
    fn tall_torus() -> ConeSurface {
        let d = 2f64.sqrt();
        let lengths = vec![[1.0, 1.0, d], [d, 1.0, 1.0], [1.0, 1.0, d], [d, 1.0, 1.0]];
        ConeSurface::from_pairs(
            lengths,
            &[
                (E::new(0, 2), E::new(1, 0)),
                (E::new(2, 2), E::new(3, 0)),
                (E::new(0, 1), E::new(1, 2)),
                (E::new(2, 1), E::new(3, 2)),
                (E::new(0, 0), E::new(3, 1)),
                (E::new(1, 1), E::new(2, 0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn torus_strip_wraps_around() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let h = edge_loop(&s, &[(0, 0)]);
        let strip = sweep_strip(&s, &h, Side::Left, 100_000).unwrap().unwrap();
        assert!(strip.wrapped);
        assert!((strip.width - 1.0).abs() < 1e-12);
        let v = edge_loop(&s, &[(0, 1)]);
        assert!(!freely_homotopic(&s, &h, &v).unwrap());
        assert!(freely_homotopic(&s, &h, &h).unwrap());
    }

    #[test]
    fn parallel_cores_of_a_cylinder_are_homotopic() {
        let s = tall_torus();
        assert_eq!(s.num_vertices(), 2);
        let low = edge_loop(&s, &[(0, 0)]);
        let high = edge_loop(&s, &[(2, 0)]);
        assert!(!low.same_trace(&s, &high));
        assert!(freely_homotopic(&s, &low, &high).unwrap());
        let vertical = edge_loop(&s, &[(0, 1), (2, 1)]);
        assert!(!freely_homotopic(&s, &low, &vertical).unwrap());
    }

    #[test]
    fn octagon_sides_are_not_flat_on_either_side() {
        let s = octagon(1.0).unwrap();
        let side = edge_loop(&s, &[(0, 0)]);
        assert!(!side_is_flat(&s, &side, Side::Left));
        assert!(!side_is_flat(&s, &side, Side::Right));
    }
}

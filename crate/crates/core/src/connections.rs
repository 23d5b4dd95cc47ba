//! Enumeration of straight segments between mesh vertices.
//!
//! Every mesh vertex emits a fan of wedges which are propagated across the
//! triangulation in developed coordinates. A vertex strictly inside a wedge
//! is the first thing a straight ray meets in that direction, so it closes a
//! segment and splits the wedge. Saddle connections are chains of such
//! segments that run straight through regular vertices.

use crate::error::{Error, Result};
use crate::geom::{cross, point_segment_distance, rotate, Motion, Pt2, Vec2, PI};
use crate::surface::{next3, prev3, ConeSurface, CornerRef, EdgeRef};
use crate::trace::angle_in_corner;
use serde::{Deserialize, Serialize};

/// Default limit on the number of propagated wedges.
pub const DEFAULT_CAP: usize = 1_000_000;

/// An oriented straight segment between two mesh vertices with no vertex in
/// its interior.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshSegment {
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// Angle position of the departing direction around `from`.
    pub start: f64,
    /// Angle position around `to` of the direction pointing back along the
    /// segment.
    pub end: f64,
    pub crossings: Vec<EdgeRef>,
}

/// All oriented mesh segments up to a length budget, indexed by their
/// starting vertex.
#[derive(Clone, Debug)]
pub struct SegmentTable {
    pub budget: f64,
    pub segments: Vec<MeshSegment>,
    outgoing: Vec<Vec<usize>>,
}

impl SegmentTable {
    /// Segments leaving `v`, sorted by departure angle.
    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    /// The segment leaving `v` in direction `angle`, if any.
    pub fn find(&self, s: &ConeSurface, v: usize, angle: f64) -> Option<usize> {
        let theta = s.angle(v);
        self.outgoing[v].iter().copied().find(|&i| {
            let d = (self.segments[i].start - angle).rem_euclid(theta);
            d < 1e-9 || theta - d < 1e-9
        })
    }
}

pub(crate) struct Node {
    parent: usize,
    crossed: EdgeRef,
}

struct Wedge {
    tri: usize,
    exit: u8,
    src: Pt2,
    right: Vec2,
    left: Vec2,
    back: Motion,
    node: usize,
    seed: usize,
}

const ROOT: usize = usize::MAX;
const SIDE_TOL: f64 = 1e-12;

fn strictly_ccw(a: &Vec2, b: &Vec2) -> bool {
    cross(a, b) > SIDE_TOL * a.norm() * b.norm()
}

pub(crate) fn crossings_of(arena: &[Node], mut node: usize) -> Vec<EdgeRef> {
    let mut out = Vec::new();
    while node != ROOT {
        out.push(arena[node].crossed);
        node = arena[node].parent;
    }
    out.reverse();
    out
}

/// Start of a wedge sweep: the directions `lo..hi` inside a corner, with a
/// motion from the corner's triangle frame into the sweep frame.
pub(crate) struct Seed {
    pub corner: CornerRef,
    pub lo: f64,
    pub hi: f64,
    pub frame: Motion,
}

/// A vertex met by a sweep, with positions in the sweep frame.
pub(crate) struct SweepHit {
    pub seed: usize,
    pub apex: CornerRef,
    pub src: Pt2,
    pub pos: Pt2,
    /// Direction from the apex back to the source, in the apex triangle frame.
    pub back_dir: Vec2,
    pub node: usize,
}

/// Propagates wedges from the seeds. `prune` receives the visible part of
/// an edge about to be crossed (source, two endpoints, all in the sweep
/// frame) and returns true to stop there. `hit` is called for every vertex
/// strictly inside a wedge.
pub(crate) fn sweep(
    s: &ConeSurface,
    seeds: &[Seed],
    cap: usize,
    prune: &dyn Fn(&Pt2, &Pt2, &Pt2) -> bool,
    hit: &mut dyn FnMut(&SweepHit, &[Node]),
) -> Result<()> {
    let mut arena: Vec<Node> = Vec::new();
    let mut stack: Vec<Wedge> = Vec::new();
    for (k, sd) in seeds.iter().enumerate() {
        let c = sd.corner;
        let p = s.layout(c.tri);
        let src = p[c.corner as usize];
        let e0 = p[next3(c.corner) as usize] - src;
        stack.push(Wedge {
            tri: c.tri,
            exit: next3(c.corner),
            src,
            right: rotate(&e0, sd.lo),
            left: rotate(&e0, sd.hi),
            back: sd.frame,
            node: ROOT,
            seed: k,
        });
    }
    let mut processed = 0usize;
    while let Some(w) = stack.pop() {
        processed += 1;
        if processed > cap {
            return Err(Error::BudgetExceeded { budget: cap });
        }
        if !strictly_ccw(&w.right, &w.left) {
            continue;
        }
        let p = s.layout(w.tri);
        let a = p[w.exit as usize];
        let b = p[next3(w.exit) as usize];
        let hit_edge = |d: &Vec2| -> Pt2 {
            let e = b - a;
            let den = cross(d, &e);
            if den.abs() < 1e-300 {
                return a;
            }
            let t = cross(&(a - w.src), &e) / den;
            w.src + d * t
        };
        let xr = w.back * hit_edge(&w.right);
        let xl = w.back * hit_edge(&w.left);
        if prune(&(w.back * w.src), &xr, &xl) {
            continue;
        }
        let e = EdgeRef::new(w.tri, w.exit);
        let o = s.glued(e);
        let m = s.neighbor_motion(o);
        let src = m * w.src;
        let right = m.rotation * w.right;
        let left = m.rotation * w.left;
        let back = w.back * m.inverse();
        arena.push(Node { parent: w.node, crossed: e });
        let node = arena.len() - 1;
        let t = o.tri;
        let j = prev3(o.edge);
        let apex = s.layout(t)[j as usize];
        let av = apex - src;
        let right_of_apex = strictly_ccw(&right, &av);
        let left_of_apex = strictly_ccw(&av, &left);
        let mk = |exit: u8, r: Vec2, l: Vec2| Wedge {
            tri: t,
            exit,
            src,
            right: r,
            left: l,
            back,
            node,
            seed: w.seed,
        };
        if right_of_apex && left_of_apex {
            hit(
                &SweepHit {
                    seed: w.seed,
                    apex: CornerRef::new(t, j),
                    src: back * src,
                    pos: back * apex,
                    back_dir: -av,
                    node,
                },
                &arena,
            );
            stack.push(mk(next3(o.edge), right, av));
            stack.push(mk(prev3(o.edge), av, left));
        } else if !right_of_apex {
            stack.push(mk(prev3(o.edge), right, left));
        } else {
            stack.push(mk(next3(o.edge), right, left));
        }
    }
    Ok(())
}

/// Enumerates every oriented mesh segment of length at most `budget`.
pub fn mesh_segments(s: &ConeSurface, budget: f64, cap: usize) -> Result<SegmentTable> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidArgument(format!("length budget {budget}")));
    }
    let slack = 1e-12 * budget.max(1.0);
    let mut segments = Vec::new();
    let mut seeds = Vec::new();
    for v in 0..s.num_vertices() {
        for &c in &s.vertex(v).corners {
            let i = c.corner;
            let l = s.lengths(c.tri)[i as usize];
            let nc = CornerRef::new(c.tri, next3(i));
            if l <= budget + slack {
                segments.push(MeshSegment {
                    from: v,
                    to: s.vertex_of(nc),
                    length: l,
                    start: s.abs_angle(c, 0.0),
                    end: s.abs_angle(nc, s.corner_angle(nc)),
                    crossings: Vec::new(),
                });
            }
            seeds.push(Seed { corner: c, lo: 0.0, hi: s.corner_angle(c), frame: Motion::identity() });
        }
    }
    let prune = |src: &Pt2, xr: &Pt2, xl: &Pt2| point_segment_distance(src, xr, xl) > budget + slack;
    let mut on_hit = |h: &SweepHit, arena: &[Node]| {
        let d0 = h.pos - h.src;
        let len = d0.norm();
        if len > budget + slack {
            return;
        }
        let c0 = seeds[h.seed].corner;
        let p0 = s.layout(c0.tri);
        let e0 = p0[next3(c0.corner) as usize] - p0[c0.corner as usize];
        let within = cross(&e0, &d0).atan2(e0.dot(&d0));
        segments.push(MeshSegment {
            from: s.vertex_of(c0),
            to: s.vertex_of(h.apex),
            length: len,
            start: s.abs_angle(c0, within),
            end: s.abs_angle(h.apex, angle_in_corner(s, h.apex, &h.back_dir)),
            crossings: crossings_of(arena, h.node),
        });
    };
    sweep(s, &seeds, cap, &prune, &mut on_hit)?;
    let mut outgoing = vec![Vec::new(); s.num_vertices()];
    for (i, seg) in segments.iter().enumerate() {
        outgoing[seg.from].push(i);
    }
    for list in &mut outgoing {
        list.sort_by(|&a, &b| segments[a].start.total_cmp(&segments[b].start));
    }
    Ok(SegmentTable { budget, segments, outgoing })
}

/// A straight segment between cone points with no cone point in its
/// interior. Regular mesh vertices it passes through are listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleConnection {
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub start_angle: f64,
    pub end_angle: f64,
    /// Unit direction at `from` in the layout frame of the corner holding it.
    pub start_dir: [f64; 2],
    pub end_dir: [f64; 2],
    pub crossings: Vec<EdgeRef>,
    pub through: Vec<usize>,
}

fn unit_dir(s: &ConeSurface, v: usize, angle: f64) -> [f64; 2] {
    let (c, within) = s.locate_angle(v, angle);
    let d = crate::trace::corner_direction(s, c, within);
    [d.x, d.y]
}

/// Follows `seg` straight through regular vertices until a cone point.
pub(crate) fn extend_straight(
    s: &ConeSurface,
    table: &SegmentTable,
    seg: usize,
    budget: f64,
) -> Option<(Vec<usize>, f64)> {
    let mut chain = vec![seg];
    let mut len = table.segments[seg].length;
    loop {
        let last = &table.segments[*chain.last().unwrap()];
        if s.is_cone_point(last.to) {
            return Some((chain, len));
        }
        let next = table.find(s, last.to, last.end + PI)?;
        len += table.segments[next].length;
        if len > budget + 1e-12 * budget.max(1.0) || chain.len() > table.segments.len() {
            return None;
        }
        chain.push(next);
    }
}

/// Every saddle connection of length at most `budget`, each unoriented
/// segment once, sorted by length and then crossing sequence.
pub fn saddle_connections(s: &ConeSurface, budget: f64) -> Result<Vec<SaddleConnection>> {
    saddle_connections_capped(s, budget, DEFAULT_CAP)
}

pub fn saddle_connections_capped(s: &ConeSurface, budget: f64, cap: usize) -> Result<Vec<SaddleConnection>> {
    let cones = s.cone_points();
    if cones.is_empty() {
        return Ok(Vec::new());
    }
    let table = mesh_segments(s, budget, cap)?;
    let mut out = Vec::new();
    for &v in &cones {
        for &i in table.outgoing(v) {
            let Some((chain, length)) = extend_straight(s, &table, i, budget) else {
                continue;
            };
            let first = &table.segments[chain[0]];
            let last = &table.segments[*chain.last().unwrap()];
            let (from, to) = (first.from, last.to);
            let keep = from < to || (from == to && first.start < last.end);
            if !keep {
                continue;
            }
            let mut crossings = Vec::new();
            let mut through = Vec::new();
            for (k, &c) in chain.iter().enumerate() {
                crossings.extend_from_slice(&table.segments[c].crossings);
                if k > 0 {
                    through.push(table.segments[c].from);
                }
            }
            out.push(SaddleConnection {
                from,
                to,
                length,
                start_angle: first.start,
                end_angle: last.end,
                start_dir: unit_dir(s, from, first.start),
                end_dir: unit_dir(s, to, last.end),
                crossings,
                through,
            });
        }
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.crossings.cmp(&b.crossings)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octagon, torus};

    #[test]
    fn flat_torus_has_no_saddle_connections() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        assert!(saddle_connections(&s, 3.0).unwrap().is_empty());
    }

    #[test]
    fn octagon_sides_are_the_shortest_connections() {
        let s = octagon(1.0).unwrap();
        let list = saddle_connections(&s, 1.0 + 1e-9).unwrap();
        assert_eq!(list.len(), 4);
        for c in &list {
            assert!((c.length - 1.0).abs() < 1e-12);
            assert_eq!((c.from, c.to), (0, 0));
        }
    }

    #[test]
    fn unit_torus_segments_through_its_vertex() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let t = mesh_segments(&s, 1.0 + 1e-9, DEFAULT_CAP).unwrap();
        // four axis directions, each found once as an oriented segment
        assert_eq!(t.segments.len(), 4);
        let t = mesh_segments(&s, 1.5, DEFAULT_CAP).unwrap();
        // plus the four diagonals of length √2
        assert_eq!(t.segments.len(), 8);
    }

    #[test]
    fn memory_cap_is_reported() {
        let s = octagon(1.0).unwrap();
        assert_eq!(
            mesh_segments(&s, 50.0, 1000).unwrap_err(),
            Error::BudgetExceeded { budget: 1000 }
        );
    }
}

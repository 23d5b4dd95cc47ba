//! Straight-line tracing through the triangulation.
//!
//! A trace follows a geodesic ray from a point of a triangle, crossing edges
//! through the gluing isometries. Regular vertices (total angle 2π) are
//! passed straight through; cone points stop the trace.

use crate::error::{Error, Result};
use crate::geom::{cross, rotate, Pt2, Vec2, PI};
use crate::surface::{next3, prev3, ConeSurface, CornerRef, EdgeRef};
use serde::{Deserialize, Serialize};

/// Position of a point relative to the triangle it is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Loc {
    Corner(u8),
    /// Edge index and parameter from corner `e` towards corner `e + 1`.
    Edge(u8, f64),
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePiece {
    pub tri: usize,
    pub start: Pt2,
    pub end: Pt2,
    pub start_loc: Loc,
    pub end_loc: Loc,
    /// Arc-length position of `start` along the whole trace.
    pub offset: f64,
}

impl TracePiece {
    pub fn len(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub pieces: Vec<TracePiece>,
    pub crossings: Vec<EdgeRef>,
    /// Regular vertices passed through, with their arc-length position.
    pub passed: Vec<(usize, f64)>,
    /// Set when the trace stopped early at a cone point.
    pub blocked: Option<(CornerRef, f64)>,
    /// Direction of travel at the end, in the frame of the last piece.
    pub end_dir: Vec2,
}

impl Trace {
    pub fn last(&self) -> &TracePiece {
        self.pieces.last().expect("trace has pieces")
    }

    pub fn end_vertex(&self, s: &ConeSurface) -> Option<usize> {
        let p = self.last();
        match p.end_loc {
            Loc::Corner(c) => Some(s.vertex_of(CornerRef::new(p.tri, c))),
            _ => None,
        }
    }
}

const MAX_STEPS: usize = 2_000_000;

fn scale(s: &ConeSurface, t: usize) -> f64 {
    let l = s.lengths(t);
    l[0].max(l[1]).max(l[2])
}

/// Unit direction inside corner `c` at angle `within` from its first edge.
pub fn corner_direction(s: &ConeSurface, c: CornerRef, within: f64) -> Vec2 {
    let p = s.layout(c.tri);
    let i = c.corner as usize;
    let u = (p[(i + 1) % 3] - p[i]).normalize();
    rotate(&u, within)
}

/// Angle of direction `d` inside corner `c`, measured from its first edge.
pub fn angle_in_corner(s: &ConeSurface, c: CornerRef, d: &Vec2) -> f64 {
    let p = s.layout(c.tri);
    let i = c.corner as usize;
    let u = p[(i + 1) % 3] - p[i];
    let a = cross(&u, d).atan2(u.dot(d));
    // directions just clockwise of the first edge come back as small negatives
    if a < -PI / 2.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Traces a straight ray of the given length from a vertex, leaving in the
/// direction at angle position `abs` around it.
pub fn trace_from_vertex(s: &ConeSurface, v: usize, abs: f64, length: f64) -> Result<Trace> {
    let (c, within) = s.locate_angle(v, abs);
    let d = corner_direction(s, c, within);
    trace(s, c.tri, s.corner_pos(c), Loc::Corner(c.corner), d, length)
}

/// Traces a straight segment. `dir` must be a unit vector in the layout frame
/// of `tri` pointing into the triangle (or along one of its edges).
pub fn trace(s: &ConeSurface, tri: usize, start: Pt2, loc: Loc, dir: Vec2, length: f64) -> Result<Trace> {
    let mut t = tri;
    let mut p = start;
    let mut loc = loc;
    let mut d = dir.normalize();
    let mut remaining = length;
    let mut travelled = 0.0;
    let mut out = Trace {
        pieces: Vec::new(),
        crossings: Vec::new(),
        passed: Vec::new(),
        blocked: None,
        end_dir: d,
    };
    for _ in 0..MAX_STEPS {
        let pts = s.layout(t);
        let tol = 1e-10 * scale(s, t);
        // vertex hits
        let mut best_v: Option<(u8, f64)> = None;
        for j in 0..3u8 {
            if loc == Loc::Corner(j) {
                continue;
            }
            let w = pts[j as usize] - p;
            let along = w.dot(&d);
            if along <= tol {
                continue;
            }
            if cross(&d, &w).abs() <= tol && best_v.is_none_or(|(_, b)| along < b) {
                best_v = Some((j, along));
            }
        }
        // edge exits
        let mut best_e: Option<(u8, f64, f64)> = None;
        for k in 0..3u8 {
            let skip = match loc {
                Loc::Edge(e, _) => e == k,
                Loc::Corner(c) => c == k || prev3(c) == k,
                Loc::Interior => false,
            };
            if skip {
                continue;
            }
            let a = pts[k as usize];
            let b = pts[next3(k) as usize];
            let e = b - a;
            let den = cross(&d, &e);
            if den.abs() < 1e-300 {
                continue;
            }
            let w = a - p;
            let sd = cross(&w, &e) / den;
            let u = cross(&w, &d) / den;
            if sd > tol && (-1e-12..=1.0 + 1e-12).contains(&u) && best_e.is_none_or(|(_, b, _)| sd < b) {
                best_e = Some((k, sd, u.clamp(0.0, 1.0)));
            }
        }
        let next_event = match (best_v, best_e) {
            (Some((_, sv)), Some((_, se, _))) => sv.min(se),
            (Some((_, sv)), None) => sv,
            (None, Some((_, se, _))) => se,
            (None, None) => {
                return Err(Error::Degenerate(format!(
                    "trace cannot leave triangle {t} (direction {:?})",
                    d
                )));
            }
        };
        let vertex_first = match (best_v, best_e) {
            (Some((_, sv)), Some((_, se, _))) => sv <= se + tol,
            (Some(_), None) => true,
            _ => false,
        };
        if remaining <= next_event + tol.min(1e-12) && !(vertex_first && (remaining - next_event).abs() <= tol) {
            // ends inside the triangle (or on an edge it was about to cross)
            let end = p + d * remaining;
            let end_loc = classify_point(s, t, &end);
            out.pieces.push(TracePiece { tri: t, start: p, end, start_loc: loc, end_loc, offset: travelled });
            out.end_dir = d;
            return Ok(out);
        }
        if vertex_first {
            let (j, sv) = best_v.unwrap();
            let end = pts[j as usize];
            out.pieces.push(TracePiece {
                tri: t,
                start: p,
                end,
                start_loc: loc,
                end_loc: Loc::Corner(j),
                offset: travelled,
            });
            travelled += sv;
            remaining -= sv;
            let c = CornerRef::new(t, j);
            let v = s.vertex_of(c);
            if remaining <= tol || s.is_cone_point(v) {
                out.end_dir = d;
                if remaining > tol {
                    out.blocked = Some((c, remaining));
                }
                return Ok(out);
            }
            out.passed.push((v, travelled));
            let arrive = s.abs_angle(c, angle_in_corner(s, c, &(-d)));
            let (c2, within) = s.locate_angle(v, arrive + PI);
            t = c2.tri;
            p = s.corner_pos(c2);
            loc = Loc::Corner(c2.corner);
            d = corner_direction(s, c2, within);
            continue;
        }
        let (k, se, u) = best_e.unwrap();
        let a = pts[k as usize];
        let b = pts[next3(k) as usize];
        let end = a + (b - a) * u;
        out.pieces.push(TracePiece {
            tri: t,
            start: p,
            end,
            start_loc: loc,
            end_loc: Loc::Edge(k, u),
            offset: travelled,
        });
        travelled += se;
        remaining -= se;
        let e = EdgeRef::new(t, k);
        out.crossings.push(e);
        let o = s.glued(e);
        let m = s.neighbor_motion(o);
        d = (m.rotation * d).normalize();
        t = o.tri;
        loc = Loc::Edge(o.edge, 1.0 - u);
        let ol = s.layout(t);
        p = ol[o.edge as usize] + (ol[next3(o.edge) as usize] - ol[o.edge as usize]) * (1.0 - u);
    }
    Err(Error::BudgetExceeded { budget: MAX_STEPS })
}

/// Snaps a layout point of triangle `t` to a corner or edge when it lies
/// within tolerance of one.
pub fn classify_point(s: &ConeSurface, t: usize, x: &Pt2) -> Loc {
    let pts = s.layout(t);
    let tol = 1e-10 * scale(s, t);
    for j in 0..3u8 {
        if (pts[j as usize] - x).norm() <= tol {
            return Loc::Corner(j);
        }
    }
    for k in 0..3u8 {
        let a = pts[k as usize];
        let b = pts[next3(k) as usize];
        let e = b - a;
        let dist = cross(&e, &(x - a)) / e.norm();
        if dist.abs() <= tol {
            let u = (x - a).dot(&e) / e.norm_squared();
            return Loc::Edge(k, u.clamp(0.0, 1.0));
        }
    }
    Loc::Interior
}

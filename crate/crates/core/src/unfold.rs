//! Breadth-first development of triangle copies around a base point.

use crate::error::{Error, Result};
use crate::geom::{point_in_polygon, point_segment_distance, Motion, Pt2};
use crate::surface::{ConeSurface, CornerRef, EdgeRef};
use std::collections::HashMap;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BasePoint {
    Vertex(usize),
    /// A point of triangle `tri` in its layout frame.
    Interior { tri: usize, x: f64, y: f64 },
}

/// One developed triangle copy.
#[derive(Clone, Debug, PartialEq)]
pub struct Copy {
    pub tri: usize,
    /// Layout frame of `tri` into the developing plane.
    pub placement: Motion,
    pub parent: Option<usize>,
    /// Edge of the parent copy crossed to reach this one.
    pub via: Option<EdgeRef>,
}

impl Copy {
    pub fn corners(&self, s: &ConeSurface) -> [Pt2; 3] {
        let p = s.layout(self.tri);
        [self.placement * p[0], self.placement * p[1], self.placement * p[2]]
    }
}

#[derive(Clone, Debug)]
pub struct UnfoldingTree {
    pub base: Pt2,
    pub radius: f64,
    pub copies: Vec<Copy>,
}

impl UnfoldingTree {
    /// Developed positions of the copies of vertex `v`, without repeats.
    pub fn lifts_of_vertex(&self, s: &ConeSurface, v: usize) -> Vec<Pt2> {
        let mut out: Vec<Pt2> = Vec::new();
        for c in &self.copies {
            let pts = c.corners(s);
            for k in 0..3u8 {
                if s.vertex_of(CornerRef::new(c.tri, k)) == v {
                    let p = pts[k as usize];
                    if !out.iter().any(|q| (q - p).norm() < 1e-9) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

fn meets_disk(pts: &[Pt2; 3], c: &Pt2, r: f64) -> bool {
    if point_in_polygon(c, pts) {
        return true;
    }
    (0..3).any(|k| point_segment_distance(c, &pts[k], &pts[(k + 1) % 3]) < r)
}

fn same_copy(s: &ConeSurface, a: &Copy, tri: usize, m: &Motion) -> bool {
    if a.tri != tri {
        return false;
    }
    let p = s.layout(tri);
    (0..3).all(|k| (a.placement * p[k] - m * p[k]).norm() < 1e-9)
}

fn cell(s: &ConeSurface, tri: usize, m: &Motion) -> (i64, i64) {
    let p = s.layout(tri);
    let c = m * Pt2::from((p[0].coords + p[1].coords + p[2].coords) / 3.0);
    ((c.x * 1e6).floor() as i64, (c.y * 1e6).floor() as i64)
}

/// Develops every triangle copy whose image meets the open disk of the
/// given radius about the base point. The root copy is always present.
pub fn unfold_ball(s: &ConeSurface, base: BasePoint, radius: f64, cap: usize) -> Result<UnfoldingTree> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius {radius}")));
    }
    let (tri, b) = match base {
        BasePoint::Vertex(v) => {
            if v >= s.num_vertices() {
                return Err(Error::UnknownVertex(v));
            }
            let c = s.vertex(v).corners[0];
            (c.tri, s.corner_pos(c))
        }
        BasePoint::Interior { tri, x, y } => {
            if tri >= s.num_triangles() {
                return Err(Error::InvalidArgument(format!("no triangle {tri}")));
            }
            (tri, Pt2::new(x, y))
        }
    };
    let mut copies = vec![Copy { tri, placement: Motion::identity(), parent: None, via: None }];
    let mut index: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    index.entry(cell(s, tri, &Motion::identity())).or_default().push(0);
    let mut head = 0;
    while head < copies.len() {
        let cur = copies[head].clone();
        for k in 0..3u8 {
            let e = EdgeRef::new(cur.tri, k);
            if cur.via.map(|v| s.glued(v)) == Some(e) {
                continue;
            }
            let o = s.glued(e);
            // neighbour frame -> current frame -> plane
            let m = cur.placement * s.neighbor_motion(e);
            let p = s.layout(o.tri);
            let pts = [m * p[0], m * p[1], m * p[2]];
            if !meets_disk(&pts, &b, radius) {
                continue;
            }
            let (cx, cy) = cell(s, o.tri, &m);
            let seen = (-1..=1).any(|dx| {
                (-1..=1).any(|dy| {
                    index
                        .get(&(cx + dx, cy + dy))
                        .is_some_and(|l| l.iter().any(|&i| same_copy(s, &copies[i], o.tri, &m)))
                })
            });
            if seen {
                continue;
            }
            if copies.len() >= cap {
                return Err(Error::BudgetExceeded { budget: cap });
            }
            index.entry((cx, cy)).or_default().push(copies.len());
            copies.push(Copy { tri: o.tri, placement: m, parent: Some(head), via: Some(e) });
        }
        head += 1;
    }
    Ok(UnfoldingTree { base: b, radius, copies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::torus;

    #[test]
    fn small_radius_keeps_the_center_cell() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let t = unfold_ball(&s, BasePoint::Interior { tri: 0, x: 0.7, y: 0.2 }, 0.0, 100).unwrap();
        assert_eq!(t.copies.len(), 1);
    }

    #[test]
    fn lattice_lifts_of_the_torus_vertex() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let t = unfold_ball(&s, BasePoint::Vertex(0), 1.5, 10_000).unwrap();
        let lifts = t.lifts_of_vertex(&s, 0);
        let at_one = lifts.iter().filter(|p| (p.coords.norm() - 1.0).abs() < 1e-9).count();
        assert_eq!(at_one, 4);
        // every lattice point inside the disk is a lift
        for i in -1..=1i32 {
            for j in -1..=1i32 {
                let p = Pt2::new(i as f64, j as f64);
                if p.coords.norm() < 1.5 {
                    assert!(lifts.iter().any(|q| (q - p).norm() < 1e-9));
                }
            }
        }
    }
}

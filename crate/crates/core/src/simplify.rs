//! Removal of regular vertices.
//!
//! The star of a vertex with total angle 2π develops into a simple planar
//! polygon around it. The vertex is dropped by re-triangulating that
//! polygon with ears.

use crate::error::{Error, Result};
use crate::geom::{cross, Pt2, TAU};
use crate::surface::{next3, prev3, ConeSurface, CornerRef, EdgeRef, EPS};

struct Mesh {
    len: Vec<[f64; 3]>,
    glue: Vec<[EdgeRef; 3]>,
    /// Old vertex id carried by each corner.
    label: Vec<[usize; 3]>,
    alive: Vec<bool>,
}

fn corner_angle(l: [f64; 3], i: u8) -> f64 {
    let (a, b, c) = (l[i as usize], l[prev3(i) as usize], l[next3(i) as usize]);
    ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0).acos()
}

fn proper(a: &Pt2, b: &Pt2, c: &Pt2) -> bool {
    let l = [(b - a).norm(), (c - b).norm(), (a - c).norm()];
    cross(&(b - a), &(c - a)) > 0.0 && l[0] < l[1] + l[2] && l[1] < l[0] + l[2] && l[2] < l[0] + l[1]
}

fn inside_closed(p: &Pt2, a: &Pt2, b: &Pt2, c: &Pt2) -> bool {
    let tol = 1e-12 * ((b - a).norm() + (c - b).norm());
    cross(&(b - a), &(p - a)) >= -tol && cross(&(c - b), &(p - b)) >= -tol && cross(&(a - c), &(p - c)) >= -tol
}

fn min_angle(a: &Pt2, b: &Pt2, c: &Pt2) -> f64 {
    let ang = |p: &Pt2, q: &Pt2, r: &Pt2| {
        let (u, v) = (q - p, r - p);
        cross(&u, &v).abs().atan2(u.dot(&v))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}

/// Ear clipping of a simple counterclockwise polygon.
fn triangulate(pos: &[Pt2]) -> Option<Vec<[usize; 3]>> {
    let mut f: Vec<usize> = (0..pos.len()).collect();
    let mut out = Vec::new();
    while f.len() > 3 {
        let n = f.len();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n {
            let (a, b, c) = (f[(i + n - 1) % n], f[i], f[(i + 1) % n]);
            if !proper(&pos[a], &pos[b], &pos[c]) {
                continue;
            }
            let blocked = f
                .iter()
                .any(|&j| j != a && j != b && j != c && inside_closed(&pos[j], &pos[a], &pos[b], &pos[c]));
            if blocked {
                continue;
            }
            let q = min_angle(&pos[a], &pos[b], &pos[c]);
            if best.is_none_or(|(bq, _)| q > bq) {
                best = Some((q, i));
            }
        }
        let (_, i) = best?;
        let n = f.len();
        out.push([f[(i + n - 1) % n], f[i], f[(i + 1) % n]]);
        f.remove(i);
    }
    if !proper(&pos[f[0]], &pos[f[1]], &pos[f[2]]) {
        return None;
    }
    out.push([f[0], f[1], f[2]]);
    Some(out)
}

impl Mesh {
    fn star(&self, c0: CornerRef) -> Vec<CornerRef> {
        let mut out = vec![c0];
        let mut c = c0;
        loop {
            let o = self.glue[c.tri][prev3(c.corner) as usize];
            c = CornerRef::new(o.tri, o.edge);
            if c == c0 || out.len() > self.len.len() {
                return out;
            }
            out.push(c);
        }
    }

    /// Removes the vertex at corner `c0` if its star re-triangulates.
    fn remove(&mut self, c0: CornerRef) -> bool {
        let star = self.star(c0);
        let d = star.len();
        let mut tris: Vec<usize> = star.iter().map(|c| c.tri).collect();
        tris.sort();
        tris.dedup();
        if d < 3 || tris.len() != d {
            return false;
        }
        let total: f64 = star.iter().map(|c| corner_angle(self.len[c.tri], c.corner)).sum();
        if (total - TAU).abs() > EPS {
            return false;
        }
        let mut pos = Vec::with_capacity(d);
        let mut acc = 0.0f64;
        for c in &star {
            let r = self.len[c.tri][c.corner as usize];
            pos.push(Pt2::new(r * acc.cos(), r * acc.sin()));
            acc += corner_angle(self.len[c.tri], c.corner);
        }
        let Some(ears) = triangulate(&pos) else {
            return false;
        };
        let link = |j: usize| EdgeRef::new(star[j].tri, next3(star[j].corner));
        let slots: Vec<usize> = star.iter().map(|c| c.tri).take(d - 2).collect();
        let mut new_len = Vec::new();
        let mut new_label = Vec::new();
        let mut link_new = vec![EdgeRef::new(0, 0); d];
        let mut diag: std::collections::BTreeMap<(usize, usize), EdgeRef> = Default::default();
        let mut new_glue = vec![[EdgeRef::new(0, 0); 3]; d - 2];
        for (k, ear) in ears.iter().enumerate() {
            let mut l = [0.0; 3];
            let mut lab = [0usize; 3];
            for j in 0..3 {
                let (u, v) = (ear[j], ear[(j + 1) % 3]);
                let e = EdgeRef::new(slots[k], j as u8);
                let s = star[u];
                lab[j] = self.label[s.tri][next3(s.corner) as usize];
                if v == (u + 1) % d {
                    let le = link(u);
                    l[j] = self.len[le.tri][le.edge as usize];
                    link_new[u] = e;
                } else {
                    l[j] = (pos[v] - pos[u]).norm();
                    if let Some(o) = diag.remove(&(v, u)) {
                        new_glue[k][j] = o;
                        let ko = slots.iter().position(|&x| x == o.tri).unwrap();
                        new_glue[ko][o.edge as usize] = e;
                    } else {
                        diag.insert((u, v), e);
                    }
                }
            }
            new_len.push(l);
            new_label.push(lab);
        }
        let in_star = |e: EdgeRef| (0..d).find(|&j| link(j) == e);
        let mut outer = Vec::new();
        for j in 0..d {
            let p = self.glue[link(j).tri][link(j).edge as usize];
            let target = match in_star(p) {
                Some(k) => link_new[k],
                None => p,
            };
            outer.push((link_new[j], target, in_star(p).is_none()));
        }
        for (k, &t) in slots.iter().enumerate() {
            self.len[t] = new_len[k];
            self.label[t] = new_label[k];
            for j in 0..3 {
                let is_link = (0..d).any(|u| link_new[u] == EdgeRef::new(t, j as u8));
                if !is_link {
                    self.glue[t][j] = new_glue[k][j];
                }
            }
        }
        for &t in star.iter().map(|c| &c.tri).skip(d - 2) {
            self.alive[t] = false;
        }
        for (e, target, external) in outer {
            self.glue[e.tri][e.edge as usize] = target;
            if external {
                self.glue[target.tri][target.edge as usize] = e;
            }
        }
        true
    }
}

/// Drops every regular vertex not listed in `keep` whose star can be
/// re-triangulated. Returns the new surface and the new id of each old
/// vertex that survives.
pub fn simplify(s: &ConeSurface, keep: &[usize]) -> Result<(ConeSurface, Vec<Option<usize>>)> {
    simplify_within(s, keep, EPS)
}

/// As [`simplify`], treating vertices within `tol` of 2π as regular.
pub fn simplify_within(s: &ConeSurface, keep: &[usize], tol: f64) -> Result<(ConeSurface, Vec<Option<usize>>)> {
    let n = s.num_triangles();
    let mut m = Mesh {
        len: (0..n).map(|t| s.lengths(t)).collect(),
        glue: s.gluing_table().to_vec(),
        label: (0..n)
            .map(|t| [0u8, 1, 2].map(|i| s.vertex_of(CornerRef::new(t, i))))
            .collect(),
        alive: vec![true; n],
    };
    let removable: Vec<usize> = (0..s.num_vertices())
        .filter(|v| (s.angle(*v) - TAU).abs() <= tol && !keep.contains(v))
        .collect();
    let mut done = vec![false; s.num_vertices()];
    loop {
        let mut progress = false;
        for &v in &removable {
            if done[v] {
                continue;
            }
            let corner = (0..n)
                .filter(|&t| m.alive[t])
                .find_map(|t| (0..3u8).find(|&i| m.label[t][i as usize] == v).map(|i| CornerRef::new(t, i)));
            let Some(c) = corner else {
                done[v] = true;
                continue;
            };
            if m.remove(c) {
                done[v] = true;
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let ids: Vec<usize> = (0..n).filter(|&t| m.alive[t]).collect();
    let mut newid = vec![usize::MAX; n];
    for (i, &t) in ids.iter().enumerate() {
        newid[t] = i;
    }
    let lengths: Vec<[f64; 3]> = ids.iter().map(|&t| m.len[t]).collect();
    let glue: Vec<[EdgeRef; 3]> = ids
        .iter()
        .map(|&t| m.glue[t].map(|e| EdgeRef::new(newid[e.tri], e.edge)))
        .collect();
    let out = ConeSurface::new(lengths, glue)?;
    let mut map = vec![None; s.num_vertices()];
    for (i, &t) in ids.iter().enumerate() {
        for k in 0..3u8 {
            map[m.label[t][k as usize]] = Some(out.vertex_of(CornerRef::new(i, k)));
        }
    }
    if (out.area() - s.area()).abs() > 1e-9 * s.area().max(1.0) {
        return Err(Error::KernelDefect(format!(
            "simplification changed the area by {}",
            out.area() - s.area()
        )));
    }
    Ok((out, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::octagon;
    use crate::overlay::{overlay, OverlaySegment};

    #[test]
    fn overlay_vertices_are_removed_again() {
        let s = octagon(1.0).unwrap();
        let segs = vec![OverlaySegment::from_vertex(&s, 0, 0.3, 0.9), OverlaySegment::from_vertex(&s, 0, 2.0, 0.7)];
        let ov = overlay(&s, &segs, &[]).unwrap();
        assert!(ov.surface.num_vertices() > 1);
        let (out, map) = simplify(&ov.surface, &[]).unwrap();
        assert_eq!(out.num_vertices(), 1);
        assert_eq!(out.num_triangles(), s.num_triangles());
        assert!((out.area() - s.area()).abs() < 1e-9);
        assert!((out.angle(0) - s.angle(0)).abs() < 1e-9);
        let cone = ov.new_vertex_of(0).unwrap();
        assert_eq!(map[cone], Some(0));
    }

    #[test]
    fn kept_vertices_stay() {
        let s = octagon(1.0).unwrap();
        let ov = overlay(&s, &[OverlaySegment::from_vertex(&s, 0, 0.3, 0.9)], &[]).unwrap();
        let end = ov.vertex_on_segment(0, 0.9).unwrap();
        let (out, map) = simplify(&ov.surface, &[end]).unwrap();
        assert_eq!(out.num_vertices(), 2);
        assert!(map[end].is_some());
    }
}

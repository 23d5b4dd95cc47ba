//! Insertion of straight segments into a triangulation as mesh edges.
//!
//! Each segment is traced through the mesh. Inside every original triangle
//! the traced chords are extended to full lines across the triangle, which
//! cuts it into convex faces. Points that neighbouring triangles place on a
//! shared edge are inserted on both sides, and every face is ear-clipped
//! into proper triangles. Sub-edges are matched across the old gluing by
//! their parameters on the shared edge.

use crate::error::{Error, Result};
use crate::geom::{cross, point_in_polygon, Pt2, Vec2};
use crate::surface::{next3, prev3, ConeSurface, CornerRef, EdgeRef};
use crate::trace::{classify_point, corner_direction, trace, Loc};
use std::collections::BTreeMap;

/// A straight segment to insert, starting at a point of `tri` (layout
/// frame) and heading into the triangle along `dir`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlaySegment {
    pub tri: usize,
    pub start: Pt2,
    pub dir: Vec2,
    pub length: f64,
    /// Arc-length positions that must become mesh vertices.
    pub marks: Vec<f64>,
}

impl OverlaySegment {
    /// Segment leaving vertex `v` at angle position `abs`.
    pub fn from_vertex(s: &ConeSurface, v: usize, abs: f64, length: f64) -> Self {
        let (c, within) = s.locate_angle(v, abs);
        OverlaySegment {
            tri: c.tri,
            start: s.corner_pos(c),
            dir: corner_direction(s, c, within),
            length,
            marks: Vec::new(),
        }
    }
}

/// Position of an inserted segment edge: segment id and the arc-length
/// positions of the edge's start and end along it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeTag {
    pub seg: usize,
    pub from: f64,
    pub to: f64,
}

/// The refined surface with its bookkeeping.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub surface: ConeSurface,
    /// Old triangle holding each new triangle.
    pub origin: Vec<usize>,
    /// Corners of each new triangle in the layout frame of its origin.
    pub placement: Vec<[Pt2; 3]>,
    /// Half-edges lying on inserted segments.
    pub tags: BTreeMap<EdgeRef, Vec<EdgeTag>>,
    /// Old vertex id of each new vertex, if it is an old vertex.
    pub vertex_origin: Vec<Option<usize>>,
    /// New vertex created for each requested extra point.
    pub point_vertex: Vec<usize>,
}

impl Overlay {
    /// New vertex at arc-length `offset` along segment `seg`.
    pub fn vertex_on_segment(&self, seg: usize, offset: f64) -> Option<usize> {
        let tol = 1e-8 * offset.abs().max(1.0);
        let s = &self.surface;
        let mut best: Option<(f64, usize)> = None;
        for (e, tag) in self.tags.iter().flat_map(|(e, v)| v.iter().map(move |t| (e, t))) {
            if tag.seg != seg {
                continue;
            }
            for (o, c) in [(tag.from, e.edge), (tag.to, next3(e.edge))] {
                let d = (o - offset).abs();
                if d <= tol && best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, s.vertex_of(CornerRef::new(e.tri, c))));
                }
            }
        }
        best.map(|(_, v)| v)
    }

    /// New vertex corresponding to old vertex `v`.
    pub fn new_vertex_of(&self, v: usize) -> Option<usize> {
        self.vertex_origin.iter().position(|o| *o == Some(v))
    }

    /// Half-edges of segment `seg` ordered by position, running forward.
    pub fn segment_edges(&self, seg: usize) -> Vec<(EdgeRef, EdgeTag)> {
        let mut v: Vec<(EdgeRef, EdgeTag)> = self
            .tags
            .iter()
            .flat_map(|(e, v)| v.iter().map(move |t| (*e, *t)))
            .filter(|(_, t)| t.seg == seg && t.to > t.from)
            .collect();
        v.sort_by(|a, b| a.1.from.total_cmp(&b.1.from).then(a.0.cmp(&b.0)));
        v
    }
}

struct Chord {
    a: Pt2,
    b: Pt2,
    seg: usize,
    offset: f64,
}

#[derive(Default)]
struct Local {
    chords: Vec<Chord>,
    lines: Vec<(Pt2, Vec2)>,
    marks: Vec<Pt2>,
    isolated: Vec<Pt2>,
}

fn scale(s: &ConeSurface, t: usize) -> f64 {
    let l = s.lengths(t);
    l[0].max(l[1]).max(l[2])
}

fn edges_of(loc: Loc) -> Vec<u8> {
    match loc {
        Loc::Corner(c) => vec![c, prev3(c)],
        Loc::Edge(k, _) => vec![k],
        Loc::Interior => Vec::new(),
    }
}

/// The canonical orientation of the edge through `e` and whether `e` is it.
fn canon(s: &ConeSurface, e: EdgeRef) -> (EdgeRef, bool) {
    let o = s.glued(e);
    if (e.tri, e.edge) <= (o.tri, o.edge) {
        (e, true)
    } else {
        (o, false)
    }
}

fn same_line(lines: &[(Pt2, Vec2)], o: &Pt2, d: &Vec2, tol: f64) -> bool {
    lines
        .iter()
        .any(|(p, e)| cross(e, d).abs() < 1e-12 && cross(e, &(o - p)).abs() < tol)
}

/// Points where a line meets the boundary of triangle `t`.
fn clip_line(s: &ConeSurface, t: usize, o: &Pt2, d: &Vec2) -> Vec<Loc> {
    let pts = s.layout(t);
    let tol = 1e-10 * scale(s, t);
    let mut out: Vec<(Loc, Pt2)> = Vec::new();
    for k in 0..3u8 {
        let a = pts[k as usize];
        let e = pts[next3(k) as usize] - a;
        let den = cross(d, &e);
        if den.abs() < 1e-14 * e.norm() {
            continue;
        }
        let u = cross(&(a - o), d) / den;
        if !(-1e-9..=1.0 + 1e-9).contains(&u) {
            continue;
        }
        let x = a + e * u.clamp(0.0, 1.0);
        if out.iter().all(|(_, y)| (x - y).norm() > tol) {
            out.push((classify_point(s, t, &x), x));
        }
    }
    out.into_iter().map(|(l, _)| l).collect()
}

fn register(reg: &mut BTreeMap<EdgeRef, Vec<f64>>, s: &ConeSurface, t: usize, loc: Loc) {
    if let Loc::Edge(k, u) = loc {
        let (c, fwd) = canon(s, EdgeRef::new(t, k));
        reg.entry(c).or_default().push(if fwd { u } else { 1.0 - u });
    }
}

fn cluster(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|u| *u > 1e-10 && *u < 1.0 - 1e-10);
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out = vec![0.0];
    for u in v {
        if u - out.last().unwrap() > 1e-10 {
            out.push(u);
        }
    }
    out.push(1.0);
    out
}

/// Parameter lists along the three edges of `t` in its own orientation.
fn local_params(s: &ConeSurface, reg: &BTreeMap<EdgeRef, Vec<f64>>, t: usize) -> [Vec<f64>; 3] {
    let get = |k: u8| {
        let (c, fwd) = canon(s, EdgeRef::new(t, k));
        let v = reg.get(&c).cloned().unwrap_or_else(|| vec![0.0, 1.0]);
        if fwd {
            v
        } else {
            v.iter().rev().map(|u| 1.0 - u).collect()
        }
    };
    [get(0), get(1), get(2)]
}

fn nearest(list: &[f64], u: f64) -> Result<usize> {
    let (j, d) = list
        .iter()
        .enumerate()
        .map(|(j, x)| (j, (x - u).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    if d > 1e-7 {
        return Err(Error::Degenerate(format!("edge point {u} is not registered")));
    }
    Ok(j)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum PKind {
    Corner(u8),
    Edge(u8, usize),
    Inside,
}

/// Convex subdivision of one old triangle.
struct Arrangement<'a> {
    corners: [Pt2; 3],
    params: &'a [Vec<f64>; 3],
    tol: f64,
    pos: Vec<Pt2>,
    kind: Vec<PKind>,
    bnd: BTreeMap<(u8, usize), usize>,
    faces: Vec<Vec<usize>>,
}

impl<'a> Arrangement<'a> {
    fn new(corners: [Pt2; 3], params: &'a [Vec<f64>; 3], tol: f64) -> Self {
        let mut a = Arrangement {
            corners,
            params,
            tol,
            pos: corners.to_vec(),
            kind: vec![PKind::Corner(0), PKind::Corner(1), PKind::Corner(2)],
            bnd: BTreeMap::new(),
            faces: vec![vec![0, 1, 2]],
        };
        for k in 0..3u8 {
            let n = params[k as usize].len();
            a.bnd.insert((k, 0), k as usize);
            a.bnd.insert((k, n - 1), next3(k) as usize);
        }
        a
    }

    /// Index of point `p` along edge `k`, if it lies on that edge.
    fn index_on(&self, p: usize, k: u8) -> Option<usize> {
        let n = self.params[k as usize].len();
        match self.kind[p] {
            PKind::Corner(c) if c == k => Some(0),
            PKind::Corner(c) if prev3(c) == k => Some(n - 1),
            PKind::Edge(e, j) if e == k => Some(j),
            _ => None,
        }
    }

    fn common_edge(&self, a: usize, b: usize) -> Option<u8> {
        (0..3u8).find(|&k| self.index_on(a, k).is_some() && self.index_on(b, k).is_some())
    }

    fn boundary_point(&mut self, k: u8, j: usize) -> usize {
        if let Some(&p) = self.bnd.get(&(k, j)) {
            return p;
        }
        let a = self.corners[k as usize];
        let b = self.corners[next3(k) as usize];
        let u = self.params[k as usize][j];
        self.pos.push(a + (b - a) * u);
        self.kind.push(PKind::Edge(k, j));
        let id = self.pos.len() - 1;
        self.bnd.insert((k, j), id);
        id
    }

    fn interior_point(&mut self, x: Pt2) -> usize {
        if let Some(i) = (0..self.pos.len()).find(|&i| (self.pos[i] - x).norm() <= self.tol) {
            return i;
        }
        self.pos.push(x);
        self.kind.push(PKind::Inside);
        self.pos.len() - 1
    }

    fn crossing(&mut self, a: usize, b: usize, o: &Pt2, d: &Vec2) -> Result<usize> {
        let pa = self.pos[a];
        let e = self.pos[b] - pa;
        let t = cross(&(o - pa), d) / cross(&e, d);
        let x = pa + e * t.clamp(0.0, 1.0);
        if let Some(k) = self.common_edge(a, b) {
            let c0 = self.corners[k as usize];
            let ek = self.corners[next3(k) as usize] - c0;
            let u = (x - c0).dot(&ek) / ek.norm_squared();
            let j = nearest(&self.params[k as usize], u)?;
            return Ok(self.boundary_point(k, j));
        }
        Ok(self.interior_point(x))
    }

    /// Cuts every face crossed by the line through `o` along `d`.
    fn split(&mut self, o: &Pt2, d: &Vec2) -> Result<()> {
        let faces = std::mem::take(&mut self.faces);
        for f in faces {
            let side: Vec<i8> = f
                .iter()
                .map(|&i| {
                    let c = cross(d, &(self.pos[i] - o));
                    if c > self.tol {
                        1
                    } else if c < -self.tol {
                        -1
                    } else {
                        0
                    }
                })
                .collect();
            if !side.contains(&1) || !side.contains(&-1) {
                self.faces.push(f);
                continue;
            }
            let (mut left, mut right) = (Vec::new(), Vec::new());
            let n = f.len();
            for i in 0..n {
                let (a, b) = (f[i], f[(i + 1) % n]);
                match side[i] {
                    1 => left.push(a),
                    -1 => right.push(a),
                    _ => {
                        left.push(a);
                        right.push(a);
                    }
                }
                if side[i] * side[(i + 1) % n] == -1 {
                    let x = self.crossing(a, b, o, d)?;
                    left.push(x);
                    right.push(x);
                }
            }
            self.faces.push(left);
            self.faces.push(right);
        }
        Ok(())
    }

    /// Makes `x` a vertex of the faces whose boundary passes through it.
    fn insert_mark(&mut self, x: Pt2) -> Result<()> {
        if self.pos.iter().any(|p| (p - x).norm() <= self.tol) {
            return Ok(());
        }
        let mut id = None;
        for fi in 0..self.faces.len() {
            let n = self.faces[fi].len();
            for i in 0..n {
                let (a, b) = (self.pos[self.faces[fi][i]], self.pos[self.faces[fi][(i + 1) % n]]);
                let e = b - a;
                let t = (x - a).dot(&e) / e.norm_squared();
                if t > 0.0 && t < 1.0 && cross(&e, &(x - a)).abs() / e.norm() <= self.tol {
                    let p = *id.get_or_insert_with(|| {
                        self.pos.push(x);
                        self.kind.push(PKind::Inside);
                        self.pos.len() - 1
                    });
                    self.faces[fi].insert(i + 1, p);
                    break;
                }
            }
        }
        if id.is_none() {
            return Err(Error::Degenerate("marked point is not on an inserted segment".into()));
        }
        Ok(())
    }

    /// Inserts every registered point of the old triangle's edges into the
    /// faces running along them.
    fn fill_boundary(&mut self) {
        let faces = std::mem::take(&mut self.faces);
        for f in faces {
            let n = f.len();
            let mut g = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (f[i], f[(i + 1) % n]);
                g.push(a);
                if let Some(k) = self.common_edge(a, b) {
                    let ja = self.index_on(a, k).unwrap();
                    let jb = self.index_on(b, k).unwrap();
                    if ja < jb {
                        for j in ja + 1..jb {
                            g.push(self.boundary_point(k, j));
                        }
                    } else {
                        for j in (jb + 1..ja).rev() {
                            g.push(self.boundary_point(k, j));
                        }
                    }
                }
            }
            self.faces.push(g);
        }
    }

    fn triangulate(&self) -> Result<Vec<[usize; 3]>> {
        let mut out = Vec::new();
        for f in &self.faces {
            ear_clip(&self.pos, f.clone(), &mut out)?;
        }
        Ok(out)
    }
}

fn tri_area(a: &Pt2, b: &Pt2, c: &Pt2) -> f64 {
    0.5 * cross(&(b - a), &(c - a))
}

fn proper(a: &Pt2, b: &Pt2, c: &Pt2) -> bool {
    let l = [(b - a).norm(), (c - b).norm(), (a - c).norm()];
    tri_area(a, b, c) > 0.0 && l[0] < l[1] + l[2] && l[1] < l[0] + l[2] && l[2] < l[0] + l[1]
}

fn min_angle(a: &Pt2, b: &Pt2, c: &Pt2) -> f64 {
    let ang = |p: &Pt2, q: &Pt2, r: &Pt2| {
        let (u, v) = (q - p, r - p);
        cross(&u, &v).abs().atan2(u.dot(&v))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}

/// Triangulates a convex polygon that may carry straight-angle vertices,
/// never producing a degenerate triangle.
pub(crate) fn ear_clip(pos: &[Pt2], mut f: Vec<usize>, out: &mut Vec<[usize; 3]>) -> Result<()> {
    let poly_area = |f: &[usize]| {
        let n = f.len();
        (0..n).map(|i| cross(&pos[f[i]].coords, &pos[f[(i + 1) % n]].coords)).sum::<f64>() * 0.5
    };
    let mut area = poly_area(&f);
    while f.len() > 3 {
        let n = f.len();
        let mut best: Option<(f64, usize, f64)> = None;
        for i in 0..n {
            let (a, b, c) = (&pos[f[(i + n - 1) % n]], &pos[f[i]], &pos[f[(i + 1) % n]]);
            if !proper(a, b, c) {
                continue;
            }
            let ear = tri_area(a, b, c);
            let rest: Vec<usize> = f.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
            if poly_area(&rest) <= 1e-13 * area.abs() || !has_proper_triangle(pos, &rest) {
                continue;
            }
            let q = min_angle(a, b, c);
            if best.is_none_or(|(bq, _, _)| q > bq) {
                best = Some((q, i, ear));
            }
        }
        let Some((_, i, ear)) = best else {
            return Err(Error::Degenerate("face cannot be triangulated".into()));
        };
        let n = f.len();
        out.push([f[(i + n - 1) % n], f[i], f[(i + 1) % n]]);
        f.remove(i);
        area -= ear;
    }
    if !proper(&pos[f[0]], &pos[f[1]], &pos[f[2]]) {
        return Err(Error::Degenerate("face cannot be triangulated".into()));
    }
    out.push([f[0], f[1], f[2]]);
    Ok(())
}

fn has_proper_triangle(pos: &[Pt2], f: &[usize]) -> bool {
    let n = f.len();
    (0..n).any(|i| proper(&pos[f[(i + n - 1) % n]], &pos[f[i]], &pos[f[(i + 1) % n]]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum HKey {
    /// Sub-edge of an old edge: canonical edge and parameter indices.
    Bnd(EdgeRef, usize, usize),
    /// Edge inside an old triangle: triangle and local point ids.
    Int(usize, usize, usize),
}

impl HKey {
    fn partner(self) -> HKey {
        match self {
            HKey::Bnd(c, a, b) => HKey::Bnd(c, b, a),
            HKey::Int(t, a, b) => HKey::Int(t, b, a),
        }
    }
}

fn hkey(s: &ConeSurface, arr: &Arrangement, t: usize, a: usize, b: usize) -> HKey {
    match arr.common_edge(a, b) {
        Some(k) => {
            let (c, fwd) = canon(s, EdgeRef::new(t, k));
            let n = arr.params[k as usize].len();
            let (ja, jb) = (arr.index_on(a, k).unwrap(), arr.index_on(b, k).unwrap());
            if fwd {
                HKey::Bnd(c, ja, jb)
            } else {
                HKey::Bnd(c, n - 1 - ja, n - 1 - jb)
            }
        }
        None => HKey::Int(t, a, b),
    }
}

fn chord_offset(c: &Chord, x: &Pt2, tol: f64) -> Option<f64> {
    let e = c.b - c.a;
    let l = e.norm();
    let u = (x - c.a).dot(&e) / l;
    if cross(&e, &(x - c.a)).abs() / l <= tol && u >= -tol && u <= l + tol {
        Some(c.offset + u.clamp(0.0, l))
    } else {
        None
    }
}

fn collect(s: &ConeSurface, segs: &[OverlaySegment], points: &[(usize, Pt2)]) -> Result<Vec<Local>> {
    let mut local: Vec<Local> = (0..s.num_triangles()).map(|_| Local::default()).collect();
    for (i, sg) in segs.iter().enumerate() {
        if !(sg.length > 0.0 && sg.length.is_finite()) {
            return Err(Error::InvalidArgument(format!("segment {i} has length {}", sg.length)));
        }
        let loc = classify_point(s, sg.tri, &sg.start);
        let tr = trace(s, sg.tri, sg.start, loc, sg.dir, sg.length)?;
        if tr.blocked.is_some() {
            return Err(Error::Degenerate(format!("segment {i} runs into a cone point")));
        }
        for p in &tr.pieces {
            if p.len() > 0.0 {
                local[p.tri].chords.push(Chord { a: p.start, b: p.end, seg: i, offset: p.offset });
            }
        }
        let mut marks = sg.marks.clone();
        marks.extend([0.0, sg.length]);
        for m in marks {
            let m = m.clamp(0.0, sg.length);
            let p = tr
                .pieces
                .iter()
                .find(|p| m <= p.offset + p.len() + 1e-12)
                .unwrap_or_else(|| tr.last());
            let l = p.len();
            let x = if l > 0.0 { p.start + (p.end - p.start) * ((m - p.offset) / l).clamp(0.0, 1.0) } else { p.start };
            local[p.tri].marks.push(x);
        }
    }
    for &(t, x) in points {
        if t >= s.num_triangles() {
            return Err(Error::InvalidArgument(format!("no triangle {t}")));
        }
        if classify_point(s, t, &x) == Loc::Interior && !point_in_polygon(&x, s.layout(t)) {
            return Err(Error::InvalidArgument(format!("point {x} lies outside triangle {t}")));
        }
        local[t].marks.push(x);
        local[t].isolated.push(x);
    }
    for (t, l) in local.iter_mut().enumerate() {
        let tol = 1e-10 * scale(s, t);
        let mut lines: Vec<(Pt2, Vec2)> = Vec::new();
        for c in &l.chords {
            let eb = edges_of(classify_point(s, t, &c.b));
            if edges_of(classify_point(s, t, &c.a)).iter().any(|k| eb.contains(k)) {
                continue;
            }
            let d = (c.b - c.a).normalize();
            if !same_line(&lines, &c.a, &d, tol) {
                lines.push((c.a, d));
            }
        }
        for x in &l.isolated {
            let on_line = lines.iter().any(|(o, d)| cross(d, &(x - o)).abs() < tol);
            if !on_line && classify_point(s, t, x) == Loc::Interior {
                lines.push((*x, Vec2::new(1.0, 0.0)));
            }
        }
        l.lines = lines;
    }
    Ok(local)
}

/// Inserts the segments and extra points as mesh edges and vertices.
/// Area and the cone angles of old vertices are unchanged; new vertices
/// are regular.
pub fn overlay(s: &ConeSurface, segs: &[OverlaySegment], points: &[(usize, Pt2)]) -> Result<Overlay> {
    let local = collect(s, segs, points)?;
    let n = s.num_triangles();
    let mut reg: BTreeMap<EdgeRef, Vec<f64>> = BTreeMap::new();
    for (t, l) in local.iter().enumerate() {
        for (o, d) in &l.lines {
            for loc in clip_line(s, t, o, d) {
                register(&mut reg, s, t, loc);
            }
        }
        for x in &l.marks {
            register(&mut reg, s, t, classify_point(s, t, x));
        }
    }
    for v in reg.values_mut() {
        *v = cluster(std::mem::take(v));
    }

    let mut lengths = Vec::new();
    let mut origin = Vec::new();
    let mut placement = Vec::new();
    let mut corner_old: Vec<[Option<usize>; 3]> = Vec::new();
    let mut index: BTreeMap<HKey, EdgeRef> = BTreeMap::new();
    for t in 0..n {
        let params = local_params(s, &reg, t);
        let tol = 1e-10 * scale(s, t);
        let lay = s.layout(t);
        let mut arr = Arrangement::new([lay[0], lay[1], lay[2]], &params, tol);
        for (o, d) in &local[t].lines {
            arr.split(o, d)?;
        }
        for x in &local[t].marks {
            if classify_point(s, t, x) == Loc::Interior {
                arr.insert_mark(*x)?;
            }
        }
        arr.fill_boundary();
        for tri in arr.triangulate()? {
            let i = lengths.len();
            let pos = [arr.pos[tri[0]], arr.pos[tri[1]], arr.pos[tri[2]]];
            let mut l = [0.0; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = hkey(s, &arr, t, a, b);
                l[k] = match key {
                    HKey::Bnd(c, x, y) => {
                        let list = reg.get(&c).map(|v| v.as_slice()).unwrap_or(&[0.0, 1.0]);
                        (list[y] - list[x]).abs() * s.edge_length(c)
                    }
                    HKey::Int(..) => (pos[(k + 1) % 3] - pos[k]).norm(),
                };
                if index.insert(key, EdgeRef::new(i, k as u8)).is_some() {
                    return Err(Error::Degenerate(format!("sub-edge repeated in triangle {t}")));
                }
            }
            let old = tri.map(|p| match arr.kind[p] {
                PKind::Corner(c) => Some(s.vertex_of(CornerRef::new(t, c))),
                _ => None,
            });
            lengths.push(l);
            origin.push(t);
            placement.push(pos);
            corner_old.push(old);
        }
    }
    let mut pairs = Vec::new();
    for (key, &e) in &index {
        let Some(&o) = index.get(&key.partner()) else {
            return Err(Error::Degenerate(format!("unmatched sub-edge {key:?}")));
        };
        if e < o {
            pairs.push((e, o));
        }
    }
    pairs.sort();
    let surface = ConeSurface::from_pairs(lengths, &pairs)?;

    let mut vertex_origin = vec![None; surface.num_vertices()];
    for (i, old) in corner_old.iter().enumerate() {
        for k in 0..3u8 {
            if let Some(v) = old[k as usize] {
                vertex_origin[surface.vertex_of(CornerRef::new(i, k))] = Some(v);
            }
        }
    }
    let mut point_vertex = Vec::new();
    for &(t, x) in points {
        let tol = 1e-9 * scale(s, t);
        let found = (0..surface.num_triangles())
            .filter(|&i| origin[i] == t)
            .find_map(|i| (0..3u8).find(|&k| (placement[i][k as usize] - x).norm() <= tol).map(|k| (i, k)));
        let Some((i, k)) = found else {
            return Err(Error::Degenerate("extra point was not inserted".into()));
        };
        point_vertex.push(surface.vertex_of(CornerRef::new(i, k)));
    }
    let mut tags: BTreeMap<EdgeRef, Vec<EdgeTag>> = BTreeMap::new();
    for i in 0..surface.num_triangles() {
        let t = origin[i];
        let tol = 1e-9 * scale(s, t);
        for k in 0..3u8 {
            let (a, b) = (placement[i][k as usize], placement[i][next3(k) as usize]);
            for c in &local[t].chords {
                if let (Some(from), Some(to)) = (chord_offset(c, &a, tol), chord_offset(c, &b, tol)) {
                    if (to - from).abs() > 0.0 {
                        let e = EdgeRef::new(i, k);
                        let tag = EdgeTag { seg: c.seg, from, to };
                        for (h, tg) in [(e, tag), (surface.glued(e), EdgeTag { seg: c.seg, from: to, to: from })] {
                            let list = tags.entry(h).or_default();
                            if !list.iter().any(|x| x.seg == tg.seg && (x.from - tg.from).abs() < tol) {
                                list.push(tg);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Overlay { surface, origin, placement, tags, vertex_origin, point_vertex })
}

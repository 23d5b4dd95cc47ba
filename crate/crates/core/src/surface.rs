//! Closed oriented flat surfaces with conical singularities, stored as glued
//! Euclidean triangles.
//!
//! Triangle `t` has corners `0, 1, 2` laid out counterclockwise; local edge
//! `e` runs from corner `e` to corner `e + 1 (mod 3)`. Two glued edges are
//! identified with opposite orientations, so every gluing table describes an
//! orientable surface.

use crate::error::{Error, Result};
use crate::geom::{ccw_angle, heron, motion_between, Motion, Pt2, TAU};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Tolerance used for every metric comparison in the kernel.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub tri: usize,
    pub edge: u8,
}

impl EdgeRef {
    pub fn new(tri: usize, edge: u8) -> Self {
        EdgeRef { tri, edge }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CornerRef {
    pub tri: usize,
    pub corner: u8,
}

impl CornerRef {
    pub fn new(tri: usize, corner: u8) -> Self {
        CornerRef { tri, corner }
    }
}

/// A vertex of the triangulation with its corners in counterclockwise order.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub corners: Vec<CornerRef>,
    /// Cumulative angle at which each corner starts.
    pub offsets: Vec<f64>,
    pub angle: f64,
}

#[derive(Clone, Debug)]
pub struct ConeSurface {
    lengths: Vec<[f64; 3]>,
    glue: Vec<[EdgeRef; 3]>,
    layout: Vec<[Pt2; 3]>,
    corner_angle: Vec<[f64; 3]>,
    corner_vertex: Vec<[usize; 3]>,
    corner_slot: Vec<[usize; 3]>,
    vertices: Vec<Vertex>,
    area: f64,
    genus: usize,
}

#[inline]
pub(crate) fn next3(i: u8) -> u8 {
    (i + 1) % 3
}

#[inline]
pub(crate) fn prev3(i: u8) -> u8 {
    (i + 2) % 3
}

fn strict_triangle(l: [f64; 3]) -> bool {
    l.iter().all(|x| x.is_finite() && *x > 0.0)
        && l[0] < l[1] + l[2]
        && l[1] < l[0] + l[2]
        && l[2] < l[0] + l[1]
}

fn length_tol(a: f64, b: f64) -> f64 {
    EPS * a.abs().max(b.abs()).max(1.0)
}

impl ConeSurface {
    /// Builds a surface from per-triangle edge lengths and a complete gluing
    /// table (`glue[t][e]` is the edge glued to `t.e`).
    pub fn new(lengths: Vec<[f64; 3]>, glue: Vec<[EdgeRef; 3]>) -> Result<Self> {
        let n = lengths.len();
        if n == 0 || glue.len() != n {
            return Err(Error::Inconsistent("empty or mismatched triangle list".into()));
        }
        for (t, l) in lengths.iter().enumerate() {
            if !strict_triangle(*l) {
                return Err(Error::DegenerateTriangle { tri: t });
            }
        }
        for t in 0..n {
            for e in 0..3u8 {
                let o = glue[t][e as usize];
                if o.tri >= n || o.edge > 2 {
                    return Err(Error::UngluedEdge { tri: t, edge: e });
                }
                if o == EdgeRef::new(t, e) {
                    return Err(Error::SelfGlued { tri: t, edge: e });
                }
                if glue[o.tri][o.edge as usize] != EdgeRef::new(t, e) {
                    return Err(Error::DoubleGlued { tri: o.tri, edge: o.edge });
                }
                let (la, lb) = (lengths[t][e as usize], lengths[o.tri][o.edge as usize]);
                if (la - lb).abs() > length_tol(la, lb) {
                    return Err(Error::LengthMismatch {
                        a: format!("{}.{}", t, e),
                        b: format!("{}.{}", o.tri, o.edge),
                        la,
                        lb,
                    });
                }
            }
        }
        let components = count_components(&glue);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }

        let layout: Vec<[Pt2; 3]> = lengths.iter().map(|l| triangle_layout(*l)).collect();
        let corner_angle: Vec<[f64; 3]> = layout
            .iter()
            .map(|p| {
                let mut a = [0.0; 3];
                for i in 0..3 {
                    let u = p[(i + 1) % 3] - p[i];
                    let v = p[(i + 2) % 3] - p[i];
                    a[i] = ccw_angle(&u, &v);
                }
                a
            })
            .collect();

        let mut corner_vertex = vec![[usize::MAX; 3]; n];
        let mut corner_slot = vec![[0usize; 3]; n];
        let mut vertices = Vec::new();
        for t in 0..n {
            for i in 0..3u8 {
                if corner_vertex[t][i as usize] != usize::MAX {
                    continue;
                }
                let vid = vertices.len();
                let mut corners = Vec::new();
                let mut offsets = Vec::new();
                let mut acc = 0.0;
                let mut c = CornerRef::new(t, i);
                loop {
                    corner_vertex[c.tri][c.corner as usize] = vid;
                    corner_slot[c.tri][c.corner as usize] = corners.len();
                    corners.push(c);
                    offsets.push(acc);
                    acc += corner_angle[c.tri][c.corner as usize];
                    let o = glue[c.tri][prev3(c.corner) as usize];
                    c = CornerRef::new(o.tri, o.edge);
                    if c == CornerRef::new(t, i) {
                        break;
                    }
                    if corners.len() > 3 * n {
                        return Err(Error::Inconsistent("vertex link does not close".into()));
                    }
                }
                vertices.push(Vertex {
                    corners,
                    offsets,
                    angle: acc,
                });
            }
        }
        let v = vertices.len() as i64;
        let f = n as i64;
        let e = 3 * f / 2;
        let chi = v - e + f;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::Inconsistent(format!("Euler characteristic {chi}")));
        }
        let genus = ((2 - chi) / 2) as usize;
        let area = lengths.iter().map(|l| heron(*l)).sum();
        Ok(ConeSurface {
            lengths,
            glue,
            layout,
            corner_angle,
            corner_vertex,
            corner_slot,
            vertices,
            area,
            genus,
        })
    }

    /// Builds a surface from an explicit list of glued edge pairs.
    pub fn from_pairs(lengths: Vec<[f64; 3]>, pairs: &[(EdgeRef, EdgeRef)]) -> Result<Self> {
        let n = lengths.len();
        let unset = EdgeRef::new(usize::MAX, 0);
        let mut glue = vec![[unset; 3]; n];
        for &(a, b) in pairs {
            for x in [a, b] {
                if x.tri >= n || x.edge > 2 {
                    return Err(Error::InvalidArgument(format!(
                        "edge {}.{} does not exist",
                        x.tri, x.edge
                    )));
                }
            }
            if a == b {
                return Err(Error::SelfGlued { tri: a.tri, edge: a.edge });
            }
            for (x, y) in [(a, b), (b, a)] {
                if glue[x.tri][x.edge as usize] != unset {
                    return Err(Error::DoubleGlued { tri: x.tri, edge: x.edge });
                }
                glue[x.tri][x.edge as usize] = y;
            }
        }
        for t in 0..n {
            for e in 0..3u8 {
                if glue[t][e as usize] == unset {
                    return Err(Error::UngluedEdge { tri: t, edge: e });
                }
            }
        }
        ConeSurface::new(lengths, glue)
    }

    pub fn num_triangles(&self) -> usize {
        self.lengths.len()
    }

    pub fn num_edges(&self) -> usize {
        3 * self.lengths.len() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn lengths(&self, t: usize) -> [f64; 3] {
        self.lengths[t]
    }

    pub fn edge_length(&self, e: EdgeRef) -> f64 {
        self.lengths[e.tri][e.edge as usize]
    }

    pub fn glued(&self, e: EdgeRef) -> EdgeRef {
        self.glue[e.tri][e.edge as usize]
    }

    pub fn gluing_table(&self) -> &[[EdgeRef; 3]] {
        &self.glue
    }

    /// Canonical planar layout of a triangle: corner 0 at the origin and
    /// corner 1 on the positive x-axis.
    pub fn layout(&self, t: usize) -> &[Pt2; 3] {
        &self.layout[t]
    }

    pub fn corner_pos(&self, c: CornerRef) -> Pt2 {
        self.layout[c.tri][c.corner as usize]
    }

    pub fn corner_angle(&self, c: CornerRef) -> f64 {
        self.corner_angle[c.tri][c.corner as usize]
    }

    pub fn vertex_of(&self, c: CornerRef) -> usize {
        self.corner_vertex[c.tri][c.corner as usize]
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn cone_angle(&self, v: usize) -> Result<f64> {
        self.vertices
            .get(v)
            .map(|x| x.angle)
            .ok_or(Error::UnknownVertex(v))
    }

    /// Total angle of `v`; panics on unknown ids.
    pub fn angle(&self, v: usize) -> f64 {
        self.vertices[v].angle
    }

    pub fn is_cone_point(&self, v: usize) -> bool {
        (self.vertices[v].angle - TAU).abs() > EPS
    }

    pub fn cone_points(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.is_cone_point(v)).collect()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    /// Angle position (in `[0, θ_v)`) of a direction lying `within` radians
    /// counterclockwise from the first edge of corner `c`.
    pub fn abs_angle(&self, c: CornerRef, within: f64) -> f64 {
        let v = self.vertex_of(c);
        let slot = self.corner_slot[c.tri][c.corner as usize];
        let vx = &self.vertices[v];
        crate::geom::wrap(vx.offsets[slot] + within, vx.angle)
    }

    /// Inverse of [`abs_angle`](Self::abs_angle): the corner holding the
    /// direction at angle position `abs` around `v`, and the offset inside it.
    pub fn locate_angle(&self, v: usize, abs: f64) -> (CornerRef, f64) {
        let vx = &self.vertices[v];
        let a = crate::geom::wrap(abs, vx.angle);
        let k = match vx
            .offsets
            .binary_search_by(|o| o.partial_cmp(&a).unwrap())
        {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1),
        };
        (vx.corners[k], a - vx.offsets[k])
    }

    /// Isometry from the layout frame of the triangle across `e` into the
    /// layout frame of `e.tri`, matching the shared edge.
    pub fn neighbor_motion(&self, e: EdgeRef) -> Motion {
        let o = self.glued(e);
        let p = &self.layout[e.tri];
        let q = &self.layout[o.tri];
        motion_between(
            &q[next3(o.edge) as usize],
            &q[o.edge as usize],
            &p[e.edge as usize],
            &p[next3(e.edge) as usize],
        )
    }

    pub fn scaled(&self, lambda: f64) -> Result<ConeSurface> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {lambda}")));
        }
        let lengths = self
            .lengths
            .iter()
            .map(|l| [l[0] * lambda, l[1] * lambda, l[2] * lambda])
            .collect();
        ConeSurface::new(lengths, self.glue.clone())
    }

    /// `area / sys²`.
    pub fn systolic_area(&self, systole: f64) -> f64 {
        self.area / (systole * systole)
    }

    /// Σ_v (θ_v − 2π) − 4π(g − 1).
    pub fn gauss_bonnet_residual(&self) -> f64 {
        let total: f64 = self.vertices.iter().map(|v| v.angle - TAU).sum();
        total - 2.0 * TAU * (self.genus as f64 - 1.0)
    }

    pub fn is_npc(&self) -> bool {
        self.vertices.iter().all(|v| v.angle >= TAU - EPS)
    }

    pub fn classify_singularities(&self) -> Vec<SingularityClass> {
        (0..self.vertices.len())
            .map(|v| SingularityClass::of(v, self.vertices[v].angle))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut notes = Vec::new();
        for t in 0..self.num_triangles() {
            for e in 0..3u8 {
                let a = EdgeRef::new(t, e);
                let b = self.glued(a);
                let (la, lb) = (self.edge_length(a), self.edge_length(b));
                if a < b && (la - lb).abs() > length_tol(la, lb) {
                    violations.push(format!("length mismatch between {t}.{e} and {}.{}", b.tri, b.edge));
                }
            }
        }
        let residual = self.gauss_bonnet_residual();
        if residual.abs() >= EPS {
            violations.push(format!("Gauss-Bonnet residual {residual:e}"));
        }
        let chi = self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64;
        if chi != self.euler_characteristic() {
            violations.push(format!("Euler characteristic {chi} does not match genus"));
        }
        let mut flagged = Vec::new();
        for (v, vx) in self.vertices.iter().enumerate() {
            if vx.angle < TAU - EPS {
                flagged.push(v);
                violations.push(format!(
                    "vertex {v} has total angle {:.12} < 2π (positive curvature)",
                    vx.angle
                ));
            }
        }
        if self.genus < 2 {
            notes.push(format!("genus {} is outside theory scope (genus >= 2 required)", self.genus));
        }
        ValidationReport {
            schema: 1,
            valid: violations.is_empty(),
            genus: self.genus,
            area: self.area,
            residual,
            npc: flagged.is_empty(),
            positively_curved_vertices: flagged,
            violations,
            notes,
        }
    }

    /// Serializes to the CFS text format.
    pub fn to_cfs(&self) -> String {
        let mut out = String::from("cfs 1\n");
        for (t, l) in self.lengths.iter().enumerate() {
            let _ = writeln!(out, "t {} {:?} {:?} {:?}", t, l[0], l[1], l[2]);
        }
        for t in 0..self.num_triangles() {
            for e in 0..3u8 {
                let a = EdgeRef::new(t, e);
                let b = self.glued(a);
                if a < b {
                    let _ = writeln!(out, "g {}.{} {}.{}", a.tri, a.edge, b.tri, b.edge);
                }
            }
        }
        out
    }
}

fn count_components(glue: &[[EdgeRef; 3]]) -> usize {
    let n = glue.len();
    let mut seen = vec![false; n];
    let mut comps = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        comps += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(t) = stack.pop() {
            for e in 0..3 {
                let o = glue[t][e].tri;
                if !seen[o] {
                    seen[o] = true;
                    stack.push(o);
                }
            }
        }
    }
    comps
}

/// Counterclockwise layout with corner 0 at the origin, corner 1 on +x.
pub fn triangle_layout(l: [f64; 3]) -> [Pt2; 3] {
    let (a, b, c) = (l[0], l[1], l[2]);
    let x = (a * a + c * c - b * b) / (2.0 * a);
    let y = (c * c - x * x).max(0.0).sqrt();
    [Pt2::new(0.0, 0.0), Pt2::new(a, 0.0), Pt2::new(x, y)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    /// θ < 2π: positive curvature, never produced on valid inputs.
    Elliptic,
    Regular,
    Small,
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityClass {
    pub vertex: usize,
    pub angle: f64,
    pub kind: SingularityKind,
    pub npc: bool,
}

impl SingularityClass {
    pub fn of(vertex: usize, angle: f64) -> Self {
        let kind = if (angle - TAU).abs() <= EPS {
            SingularityKind::Regular
        } else if angle < TAU {
            SingularityKind::Elliptic
        } else if angle < 3.0 * PI - EPS {
            SingularityKind::Small
        } else {
            SingularityKind::Large
        };
        SingularityClass {
            vertex,
            angle,
            kind,
            npc: angle >= TAU - EPS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema: u32,
    pub valid: bool,
    pub genus: usize,
    pub area: f64,
    pub residual: f64,
    pub npc: bool,
    pub positively_curved_vertices: Vec<usize>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

/// Parses the CFS text format.
pub fn parse_surface(text: &str) -> Result<ConeSurface> {
    let syntax = |line: usize, column: usize, message: String| Error::Syntax {
        line,
        column,
        message,
    };
    let mut header = false;
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut names: Vec<u64> = Vec::new();
    let mut lengths: Vec<[f64; 3]> = Vec::new();
    let mut pairs: Vec<((usize, u8), (usize, u8), usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let lineno = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks: Vec<(usize, &str)> = Vec::new();
        let mut col = 0;
        for piece in content.split_inclusive(char::is_whitespace) {
            let tok = piece.trim_end();
            let lead = tok.len() - tok.trim_start().len();
            if !tok.trim().is_empty() {
                toks.push((col + lead + 1, tok.trim()));
            }
            col += piece.len();
        }
        if toks.is_empty() {
            continue;
        }
        if !header {
            if toks.len() == 2 && toks[0].1 == "cfs" && toks[1].1 == "1" {
                header = true;
                continue;
            }
            return Err(syntax(lineno, toks[0].0, "expected header `cfs 1`".into()));
        }
        match toks[0].1 {
            "t" => {
                if toks.len() != 5 {
                    return Err(syntax(lineno, toks[0].0, "expected `t <id> <l01> <l12> <l20>`".into()));
                }
                let id: u64 = toks[1]
                    .1
                    .parse()
                    .map_err(|_| syntax(lineno, toks[1].0, format!("bad triangle id `{}`", toks[1].1)))?;
                if ids.contains_key(&id) {
                    return Err(syntax(lineno, toks[1].0, format!("duplicate triangle id {id}")));
                }
                let mut l = [0.0; 3];
                for k in 0..3 {
                    let (c, s) = toks[2 + k];
                    l[k] = s
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| syntax(lineno, c, format!("bad length `{s}`")))?;
                }
                ids.insert(id, lengths.len());
                names.push(id);
                lengths.push(l);
            }
            "g" => {
                if toks.len() != 3 {
                    return Err(syntax(lineno, toks[0].0, "expected `g <t>.<e> <t'>.<e'>`".into()));
                }
                let mut refs = [(0usize, 0u8); 2];
                for k in 0..2 {
                    let (c, s) = toks[1 + k];
                    let bad = || syntax(lineno, c, format!("bad edge reference `{s}`"));
                    let (a, b) = s.split_once('.').ok_or_else(bad)?;
                    let id: u64 = a.parse().map_err(|_| bad())?;
                    let e: u8 = b.parse().map_err(|_| bad())?;
                    if e > 2 {
                        return Err(bad());
                    }
                    let t = *ids
                        .get(&id)
                        .ok_or_else(|| syntax(lineno, c, format!("unknown triangle {id}")))?;
                    refs[k] = (t, e);
                }
                pairs.push((refs[0], refs[1], lineno));
            }
            other => {
                return Err(syntax(lineno, toks[0].0, format!("unknown record `{other}`")));
            }
        }
    }
    if !header {
        return Err(syntax(1, 1, "missing header `cfs 1`".into()));
    }
    let n = lengths.len();
    let unset = EdgeRef::new(usize::MAX, 0);
    let mut glue = vec![[unset; 3]; n];
    let name = |t: usize, e: u8| format!("{}.{}", names[t], e);
    for &((ta, ea), (tb, eb), _) in &pairs {
        if (ta, ea) == (tb, eb) {
            return Err(Error::SelfGlued { tri: names[ta] as usize, edge: ea });
        }
        for (x, y) in [((ta, ea), (tb, eb)), ((tb, eb), (ta, ea))] {
            if glue[x.0][x.1 as usize] != unset {
                return Err(Error::DoubleGlued { tri: names[x.0] as usize, edge: x.1 });
            }
            glue[x.0][x.1 as usize] = EdgeRef::new(y.0, y.1);
        }
        let (la, lb) = (lengths[ta][ea as usize], lengths[tb][eb as usize]);
        if (la - lb).abs() > length_tol(la, lb) {
            return Err(Error::LengthMismatch { a: name(ta, ea), b: name(tb, eb), la, lb });
        }
    }
    for t in 0..n {
        for e in 0..3u8 {
            if glue[t][e as usize] == unset {
                return Err(Error::UngluedEdge { tri: names[t] as usize, edge: e });
            }
        }
    }
    ConeSurface::new(lengths, glue)
}

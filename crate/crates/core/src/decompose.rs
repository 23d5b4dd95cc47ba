//! Splitting a surface along its systolic bands.
//!
//! Every isolated loop and every boundary loop of a fat band is inserted
//! into the mesh. Faces inside a fat band form the systolic part. The
//! remaining faces are flood-filled, without crossing inserted loops, into
//! nonsystolic domains.

use crate::error::Result;
use crate::geodesic::GeodesicLoop;
use crate::geom::{heron, PI};
use crate::overlay::Overlay;
use crate::structure::{overlay_loops, systolic_classes, SystolicClass};
use crate::surface::{next3, ConeSurface, CornerRef, EdgeRef, EPS};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One visit of the boundary walk of a domain at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    /// Vertex of the refined mesh.
    pub vertex: usize,
    /// Vertex of the input surface, when the corner sits on one.
    pub origin: Option<usize>,
    /// Angle of the domain at this visit.
    pub angle: f64,
    pub cone_angle: f64,
    /// Where two different systolic loops meet or part.
    pub polygon_vertex: bool,
}

impl Corner {
    pub fn singular(&self) -> bool {
        (self.cone_angle - 2.0 * PI).abs() > EPS
    }
}

/// A piece of the boundary between two polygon vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainEdge {
    pub length: f64,
    /// Cone points inside the edge, as refined-mesh vertices.
    pub singularities: Vec<usize>,
    pub small: usize,
    /// True for a boundary cycle without polygon vertices.
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub id: usize,
    /// Triangles of the refined mesh.
    pub faces: Vec<usize>,
    pub area: f64,
    pub euler: i64,
    /// Cone points inside the open domain, as refined-mesh vertices.
    pub singularities: Vec<usize>,
    /// Cone angles of those points.
    pub singular_angles: Vec<f64>,
    pub corners: Vec<Corner>,
    pub edges: Vec<DomainEdge>,
}

impl Domain {
    pub fn small_singularities(&self) -> usize {
        self.singular_angles.iter().filter(|&&a| a < 3.0 * PI).count()
    }
}

/// Connected piece of the union of the closed bands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystolicDomain {
    pub faces: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SystolicDecomposition {
    pub systole: f64,
    pub classes: Vec<SystolicClass>,
    pub overlay: Overlay,
    /// Loops inserted into the mesh and their classes.
    pub loops: Vec<GeodesicLoop>,
    pub loop_class: Vec<usize>,
    /// Fat band holding each refined triangle.
    pub face_band: Vec<Option<usize>>,
    pub domains: Vec<Domain>,
    pub systolic_domains: Vec<SystolicDomain>,
    pub systolic_area: f64,
    /// Cone points of the input surface covered by closed fat bands.
    pub special: Vec<usize>,
    /// Refined-mesh vertices where two different loops meet or part.
    pub polygon_vertex: Vec<bool>,
}

impl SystolicDecomposition {
    pub fn domain_of_face(&self, t: usize) -> Option<usize> {
        self.domains.iter().position(|d| d.faces.binary_search(&t).is_ok())
    }
}

/// Decomposes with a fresh class computation.
pub fn decompose(s: &ConeSurface, tol: f64) -> Result<SystolicDecomposition> {
    let (sys, classes) = systolic_classes(s, tol)?;
    decompose_classes(s, sys, classes)
}

struct Find(Vec<usize>);

impl Find {
    fn root(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn join(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn decompose_classes(s: &ConeSurface, sys: f64, classes: Vec<SystolicClass>) -> Result<SystolicDecomposition> {
    let mut loops = Vec::new();
    let mut loop_class = Vec::new();
    for c in &classes {
        for l in &c.band.limits {
            loops.push(l.clone());
            loop_class.push(c.id);
        }
    }
    let refs: Vec<&GeodesicLoop> = loops.iter().collect();
    let (ov, first) = overlay_loops(s, &refs)?;
    let mut seg_loop = Vec::new();
    for (i, l) in loops.iter().enumerate() {
        debug_assert_eq!(first[i], seg_loop.len());
        seg_loop.extend(std::iter::repeat_n(i, l.pieces.len()));
    }
    let sf = &ov.surface;
    let n = sf.num_triangles();
    let face_band: Vec<Option<usize>> = (0..n)
        .map(|t| {
            let p = ov.placement[t];
            let c = crate::geom::Pt2::from((p[0].coords + p[1].coords + p[2].coords) / 3.0);
            classes.iter().find_map(|cl| {
                let strip = cl.band.strip.as_ref()?;
                if strip.wrapped {
                    return Some(cl.id);
                }
                let (_, y) = strip.locate(ov.origin[t], &c)?;
                (y > 0.0 && y < strip.width).then_some(cl.id)
            })
        })
        .collect();
    let edge_loops = |e: EdgeRef| -> BTreeSet<usize> {
        ov.tags.get(&e).map(|v| v.iter().map(|t| seg_loop[t.seg]).collect()).unwrap_or_default()
    };
    let tagged = |e: EdgeRef| ov.tags.get(&e).is_some_and(|v| !v.is_empty());

    // polygon vertices: met by two loops whose edge sets differ there
    let nv = sf.num_vertices();
    let mut vertex_sets: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new(); nv];
    for t in 0..n {
        for k in 0..3u8 {
            let e = EdgeRef::new(t, k);
            if tagged(e) {
                vertex_sets[sf.vertex_of(CornerRef::new(t, k))].push(edge_loops(e));
            }
        }
    }
    let polygon_vertex: Vec<bool> = vertex_sets
        .iter()
        .map(|sets| {
            let all: BTreeSet<usize> = sets.iter().flatten().copied().collect();
            all.len() >= 2 && sets.iter().any(|x| *x != sets[0])
        })
        .collect();

    // nonsystolic domains by flood fill
    let mut domain_of = vec![usize::MAX; n];
    let mut domains = Vec::new();
    for t0 in 0..n {
        if face_band[t0].is_some() || domain_of[t0] != usize::MAX {
            continue;
        }
        let id = domains.len();
        let mut faces = vec![t0];
        domain_of[t0] = id;
        let mut i = 0;
        while i < faces.len() {
            let t = faces[i];
            i += 1;
            for k in 0..3u8 {
                let e = EdgeRef::new(t, k);
                let o = sf.glued(e);
                if !tagged(e) && face_band[o.tri].is_none() && domain_of[o.tri] == usize::MAX {
                    domain_of[o.tri] = id;
                    faces.push(o.tri);
                }
            }
        }
        faces.sort();
        domains.push(faces);
    }
    let in_d = |t: usize, id: usize| domain_of[t] == id;
    let boundary = |e: EdgeRef, id: usize| tagged(e) || !in_d(sf.glued(e).tri, id);

    let mut out = Vec::new();
    for (id, faces) in domains.into_iter().enumerate() {
        let area: f64 = faces.iter().map(|&t| heron(sf.lengths(t))).sum();
        // Euler characteristic with compact support of the open domain
        let mut inner_edges = 0i64;
        let mut inner_vertices = BTreeSet::new();
        let mut touched = BTreeSet::new();
        for &t in &faces {
            for k in 0..3u8 {
                let e = EdgeRef::new(t, k);
                if !boundary(e, id) && (e.tri, e.edge) < (sf.glued(e).tri, sf.glued(e).edge) {
                    inner_edges += 1;
                }
                touched.insert(sf.vertex_of(CornerRef::new(t, k)));
            }
        }
        for &v in &touched {
            let inside = sf.vertex(v).corners.iter().all(|c| {
                in_d(c.tri, id) && !tagged(EdgeRef::new(c.tri, c.corner))
            });
            if inside {
                inner_vertices.insert(v);
            }
        }
        let euler = faces.len() as i64 - inner_edges + inner_vertices.len() as i64;
        let singularities: Vec<usize> = inner_vertices.iter().copied().filter(|&v| sf.is_cone_point(v)).collect();
        let singular_angles = singularities.iter().map(|&v| sf.angle(v)).collect();
        let (corners, edges) = walk_boundary(&ov, &faces, &|e| boundary(e, id), &polygon_vertex);
        out.push(Domain { id, faces, area, euler, singularities, singular_angles, corners, edges });
    }

    // systolic part: closed bands and inserted loops, joined through vertices
    let mut uf = Find((0..nv).collect());
    let mut used = vec![false; nv];
    for t in 0..n {
        let vs = [0u8, 1, 2].map(|k| sf.vertex_of(CornerRef::new(t, k)));
        if face_band[t].is_some() {
            for k in 0..3 {
                used[vs[k]] = true;
                uf.join(vs[k], vs[(k + 1) % 3]);
            }
        }
        for k in 0..3 {
            if tagged(EdgeRef::new(t, k as u8)) {
                used[vs[k]] = true;
                used[vs[(k + 1) % 3]] = true;
                uf.join(vs[k], vs[(k + 1) % 3]);
            }
        }
    }
    let mut systolic_domains: Vec<SystolicDomain> = Vec::new();
    let mut root_index = std::collections::BTreeMap::new();
    for v in 0..nv {
        if used[v] {
            let r = uf.root(v);
            let i = *root_index.entry(r).or_insert_with(|| {
                systolic_domains.push(SystolicDomain { faces: Vec::new(), vertices: Vec::new() });
                systolic_domains.len() - 1
            });
            systolic_domains[i].vertices.push(v);
        }
    }
    for t in 0..n {
        if face_band[t].is_some() {
            let r = uf.root(sf.vertex_of(CornerRef::new(t, 0)));
            systolic_domains[root_index[&r]].faces.push(t);
        }
    }
    let systolic_area = (0..n).filter(|&t| face_band[t].is_some()).map(|t| heron(sf.lengths(t))).sum();
    let special = (0..nv)
        .filter(|&v| sf.is_cone_point(v) && sf.vertex(v).corners.iter().all(|c| face_band[c.tri].is_some()))
        .filter_map(|v| ov.vertex_origin[v])
        .collect();
    Ok(SystolicDecomposition {
        systole: sys,
        classes,
        loops,
        loop_class,
        face_band,
        domains: out,
        systolic_domains,
        systolic_area,
        special,
        polygon_vertex,
        overlay: ov,
    })
}

/// Boundary cycles of a domain, cut into edges at polygon vertices.
fn walk_boundary(
    ov: &Overlay,
    faces: &[usize],
    boundary: &dyn Fn(EdgeRef) -> bool,
    polygon_vertex: &[bool],
) -> (Vec<Corner>, Vec<DomainEdge>) {
    let sf = &ov.surface;
    let mut starts: Vec<EdgeRef> = Vec::new();
    for &t in faces {
        for k in 0..3u8 {
            let e = EdgeRef::new(t, k);
            if boundary(e) {
                starts.push(e);
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut corners = Vec::new();
    let mut edges = Vec::new();
    for &e0 in &starts {
        if seen.contains(&e0) {
            continue;
        }
        // one boundary cycle: (half-edge, corner at its end)
        let mut cycle: Vec<(EdgeRef, Corner)> = Vec::new();
        let mut e = e0;
        loop {
            seen.insert(e);
            let mut t = e.tri;
            let mut c = next3(e.edge);
            let v = sf.vertex_of(CornerRef::new(t, c));
            let mut angle = 0.0;
            let next = loop {
                angle += sf.corner_angle(CornerRef::new(t, c));
                let out = EdgeRef::new(t, c);
                if boundary(out) {
                    break out;
                }
                let o = sf.glued(out);
                t = o.tri;
                c = next3(o.edge);
            };
            let corner = Corner {
                vertex: v,
                origin: ov.vertex_origin[v],
                angle,
                cone_angle: sf.angle(v),
                polygon_vertex: polygon_vertex[v],
            };
            cycle.push((e, corner));
            e = next;
            if e == e0 || cycle.len() > 4 * sf.num_triangles() {
                break;
            }
        }
        let m = cycle.len();
        let cuts: Vec<usize> = (0..m).filter(|&i| cycle[i].1.polygon_vertex).collect();
        if cuts.is_empty() {
            edges.push(edge_from(sf, &cycle, 0, m, true));
        } else {
            for (j, &a) in cuts.iter().enumerate() {
                let b = if j + 1 < cuts.len() { cuts[j + 1] } else { cuts[0] + m };
                edges.push(edge_from(sf, &cycle, a + 1, b + 1, false));
            }
        }
        corners.extend(cycle.into_iter().map(|(_, c)| c));
    }
    (corners, edges)
}

/// The edge made of cycle half-edges `a..b` (indices mod the cycle size).
fn edge_from(sf: &ConeSurface, cycle: &[(EdgeRef, Corner)], a: usize, b: usize, closed: bool) -> DomainEdge {
    let m = cycle.len();
    let mut length = 0.0;
    let mut singularities = Vec::new();
    let mut small = 0;
    for i in a..b {
        let (e, c) = cycle[i % m];
        length += sf.edge_length(e);
        // the corner at the end of the last half-edge is a polygon vertex
        if (i + 1 < b || closed) && c.singular() {
            singularities.push(c.vertex);
            if c.cone_angle < 3.0 * PI {
                small += 1;
            }
        }
    }
    DomainEdge { length, singularities, small, closed }
}

/// Convexity and topology of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainGeometry {
    pub euler: i64,
    pub is_disk: bool,
    /// Angles at most π at boundary points that are not cone points.
    pub convex_at_regular: bool,
    /// Angles at most π everywhere on the boundary.
    pub convex: bool,
}

pub fn check_domain_geometry(d: &Domain) -> DomainGeometry {
    let ok = |c: &Corner| c.angle <= PI + 1e-9;
    DomainGeometry {
        euler: d.euler,
        is_disk: d.euler == 1,
        convex_at_regular: d.corners.iter().filter(|c| !c.singular()).all(ok),
        convex: d.corners.iter().all(ok),
    }
}

/// True when the union of the closed bands is connected.
pub fn systolic_part_connected(dec: &SystolicDecomposition) -> bool {
    dec.systolic_domains.len() <= 1
}

//! Kites on a saddle connection and the surgeries that remove or insert
//! them.
//!
//! A kite is the union of two congruent triangles mirrored across a saddle
//! connection `[p, q]`. In the kite frame `p = (0, 0)`, `q = (L, 0)`, the
//! apexes are `r = (a, h)` on the left of `p -> q` and `r' = (a, -h)`.

use crate::connections::{saddle_connections, SaddleConnection};
use crate::error::{Error, Result};
use crate::geom::{Pt2, PI, TAU};
use crate::overlay::{overlay, EdgeTag, Overlay, OverlaySegment};
use crate::surface::{ConeSurface, CornerRef, EdgeRef, EPS};
use std::collections::VecDeque;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KiteKind {
    Diamond,
    Exact,
}

/// An oriented saddle connection carrying a kite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KiteBase {
    pub p: usize,
    pub q: usize,
    /// Angle position at `p` of the direction towards `q`.
    pub start: f64,
    /// Angle position at `q` of the direction towards `p`.
    pub end: f64,
    pub length: f64,
}

impl KiteBase {
    pub fn from_connection(c: &SaddleConnection) -> Self {
        KiteBase { p: c.from, q: c.to, start: c.start_angle, end: c.end_angle, length: c.length }
    }

    pub fn reversed(&self) -> Self {
        KiteBase { p: self.q, q: self.p, start: self.end, end: self.start, length: self.length }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kite {
    pub base: KiteBase,
    pub kind: KiteKind,
    /// Foot of the apexes along `[p, q]`.
    pub a: f64,
    /// Half of the width `|r r'|`.
    pub h: f64,
}

impl Kite {
    pub fn p(&self) -> usize {
        self.base.p
    }

    pub fn q(&self) -> usize {
        self.base.q
    }

    pub fn width(&self) -> f64 {
        2.0 * self.h
    }

    /// The angle `r p r'`.
    pub fn angle_p(&self) -> f64 {
        2.0 * self.h.atan2(self.a)
    }

    /// The angle `r q r'`.
    pub fn angle_q(&self) -> f64 {
        2.0 * self.h.atan2(self.base.length - self.a)
    }

    /// Interior angle at either apex.
    pub fn apex_angle(&self) -> f64 {
        PI - 0.5 * (self.angle_p() + self.angle_q())
    }

    pub fn side_p(&self) -> f64 {
        self.a.hypot(self.h)
    }

    pub fn side_q(&self) -> f64 {
        (self.base.length - self.a).hypot(self.h)
    }

    pub fn area(&self) -> f64 {
        self.base.length * self.h
    }

    pub fn r(&self) -> Pt2 {
        Pt2::new(self.a, self.h)
    }

    pub fn r_prime(&self) -> Pt2 {
        Pt2::new(self.a, -self.h)
    }

    /// Same base and shape rule at another width.
    pub fn with_width(&self, s: &ConeSurface, w: f64) -> Result<Kite> {
        match self.kind {
            KiteKind::Diamond => build_diamond(s, &self.base, w),
            KiteKind::Exact => build_exact(s, &self.base, w),
        }
    }
}

/// Checks that all four angles are below π and that removing the kite
/// leaves angles of at least 2π at `p` and `q`.
pub fn check_admissible(s: &ConeSurface, k: &Kite) -> Result<()> {
    let (ap, aq) = (k.angle_p(), k.angle_q());
    if !(k.h > 0.0 && k.a > 0.0 && k.a < k.base.length) {
        return Err(Error::Inadmissible(format!("apex foot {} outside (0, {})", k.a, k.base.length)));
    }
    if ap >= PI || aq >= PI {
        return Err(Error::Inadmissible(format!("main angles {ap} and {aq} must be below π")));
    }
    let room = |v: usize, taken: f64| -> f64 { s.angle(v) - TAU - taken };
    if k.p() == k.q() {
        if room(k.p(), ap + aq) < -EPS {
            return Err(Error::Inadmissible(format!("angle at {} would drop below 2π", k.p())));
        }
    } else {
        if room(k.p(), ap) < -EPS {
            return Err(Error::Inadmissible(format!("angle at p = {} would drop below 2π", k.p())));
        }
        if room(k.q(), aq) < -EPS {
            return Err(Error::Inadmissible(format!("angle at q = {} would drop below 2π", k.q())));
        }
    }
    Ok(())
}

fn check_width(w: f64) -> Result<()> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidArgument(format!("kite width {w}")));
    }
    Ok(())
}

/// Kite with `|pr| = |qr|`.
pub fn build_diamond(s: &ConeSurface, base: &KiteBase, w: f64) -> Result<Kite> {
    check_width(w)?;
    let k = Kite { base: *base, kind: KiteKind::Diamond, a: 0.5 * base.length, h: 0.5 * w };
    check_admissible(s, &k)?;
    Ok(k)
}

/// Kite whose angle at `p` is `θ_p - 2π`, so `p` becomes regular once the
/// kite is removed.
pub fn build_exact(s: &ConeSurface, base: &KiteBase, w: f64) -> Result<Kite> {
    check_width(w)?;
    let theta = s.angle(base.p);
    if theta >= 3.0 * PI {
        return Err(Error::Inadmissible(format!("angle {theta} at p is not below 3π")));
    }
    let alpha = theta - TAU;
    if alpha <= EPS {
        return Err(Error::Inadmissible(format!("p = {} is not a cone point", base.p)));
    }
    let h = 0.5 * w;
    let k = Kite { base: *base, kind: KiteKind::Exact, a: h / (0.5 * alpha).tan(), h };
    check_admissible(s, &k)?;
    Ok(k)
}

/// Largest width accepted by the builder, from the angle constraints alone.
pub fn max_admissible_width(s: &ConeSurface, base: &KiteBase, kind: KiteKind) -> f64 {
    let l = base.length;
    let cap = |v: usize| (s.angle(v) - TAU).min(PI);
    match kind {
        KiteKind::Diamond => {
            let m = if base.p == base.q {
                (0.5 * (s.angle(base.p) - TAU)).min(PI)
            } else {
                cap(base.p).min(cap(base.q))
            };
            l * (0.5 * m).tan()
        }
        KiteKind::Exact => {
            let alpha = s.angle(base.p) - TAU;
            let beta = if base.p == base.q { cap(base.p) - alpha } else { cap(base.q) };
            if alpha <= 0.0 || beta <= 0.0 {
                return 0.0;
            }
            // h = a tan(α/2) = (L - a) tan(β/2)
            let (ta, tb) = ((0.5 * alpha).tan(), (0.5 * beta.min(PI)).tan());
            2.0 * l * ta * tb / (ta + tb)
        }
    }
}

/// Shortest saddle connection from `p` to `q`, oriented from `p`.
pub fn base_between(s: &ConeSurface, p: usize, q: usize) -> Result<KiteBase> {
    for v in [p, q] {
        if v >= s.num_vertices() {
            return Err(Error::UnknownVertex(v));
        }
        if !s.is_cone_point(v) {
            return Err(Error::InvalidArgument(format!("vertex {v} is not a cone point")));
        }
    }
    let total: f64 = (0..s.num_triangles()).flat_map(|t| s.lengths(t)).sum();
    let mut budget = (0..s.num_triangles())
        .flat_map(|t| s.lengths(t))
        .fold(f64::INFINITY, f64::min)
        * 2.0;
    loop {
        let list = saddle_connections(s, budget)?;
        for c in &list {
            if (c.from, c.to) == (p, q) {
                return Ok(KiteBase::from_connection(c));
            }
            if (c.from, c.to) == (q, p) {
                return Ok(KiteBase::from_connection(c).reversed());
            }
        }
        if budget > 2.0 * total {
            return Err(Error::InvalidArgument(format!("no saddle connection joins {p} and {q}")));
        }
        budget *= 2.0;
    }
}

/// Outcome of removing a kite and gluing `[p,r]` to `[p,r']` and `[q,r]`
/// to `[q,r']`.
#[derive(Clone, Debug)]
pub struct ExcisionResult {
    pub surface: ConeSurface,
    /// New id of each old vertex, if it survives.
    pub vertex_map: Vec<Option<usize>>,
    pub removed_area: f64,
    pub p: usize,
    pub q: usize,
    /// The point where `r` and `r'` are merged.
    pub r: usize,
    /// Angles at `p` and `q` before and after.
    pub angle_p: (f64, f64),
    pub angle_q: (f64, f64),
    /// Angles at the two apexes before, and at the merged point after.
    pub apex_before: (f64, f64),
    pub angle_r: f64,
}

/// Segments p->r, p->r', q->r, q->r'.
fn side_segments(s: &ConeSurface, k: &Kite, marks: &[Vec<f64>; 4]) -> Vec<OverlaySegment> {
    let (fp, fq) = (0.5 * k.angle_p(), 0.5 * k.angle_q());
    let b = &k.base;
    let mut v = vec![
        OverlaySegment::from_vertex(s, b.p, b.start + fp, k.side_p()),
        OverlaySegment::from_vertex(s, b.p, b.start - fp, k.side_p()),
        OverlaySegment::from_vertex(s, b.q, b.end - fq, k.side_q()),
        OverlaySegment::from_vertex(s, b.q, b.end + fq, k.side_q()),
    ];
    for (seg, m) in v.iter_mut().zip(marks) {
        seg.marks = m.clone();
    }
    v
}

fn offsets(ov: &Overlay, seg: usize) -> Vec<f64> {
    let v: Vec<f64> = ov.segment_edges(seg).iter().flat_map(|(_, t)| [t.from, t.to]).collect();
    merge(&v, &[])
}

fn merge(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    v
}

fn same_offsets(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
}

fn side_tag(ov: &Overlay, e: EdgeRef) -> Option<EdgeTag> {
    ov.tags.get(&e).and_then(|v| v.iter().find(|t| t.seg < 4).copied())
}

/// Overlay of the kite sides with equal subdivisions on mirrored sides,
/// and the triangles inside the kite.
pub(crate) fn cut_kite(s: &ConeSurface, k: &Kite) -> Result<(Overlay, Vec<bool>)> {
    let not_embedded = |e: Error| Error::NotEmbedded(e.to_string());
    let mut marks: [Vec<f64>; 4] = Default::default();
    for _ in 0..4 {
        let ov = overlay(s, &side_segments(s, k, &marks), &[]).map_err(not_embedded)?;
        let offs: Vec<Vec<f64>> = (0..4).map(|i| offsets(&ov, i)).collect();
        if same_offsets(&offs[0], &offs[1]) && same_offsets(&offs[2], &offs[3]) {
            let inside = interior(k, &ov)?;
            return Ok((ov, inside));
        }
        let pr = merge(&offs[0], &offs[1]);
        let qr = merge(&offs[2], &offs[3]);
        marks = [pr.clone(), pr, qr.clone(), qr];
    }
    Err(Error::NotEmbedded("kite sides cannot be subdivided alike".into()))
}

fn interior(k: &Kite, ov: &Overlay) -> Result<Vec<bool>> {
    let sf = &ov.surface;
    let end = |seg: usize, len: f64| {
        ov.vertex_on_segment(seg, len)
            .ok_or_else(|| Error::NotEmbedded(format!("side {seg} has no end vertex")))
    };
    let (r0, r1) = (end(0, k.side_p())?, end(2, k.side_q())?);
    let (s0, s1) = (end(1, k.side_p())?, end(3, k.side_q())?);
    if r0 != r1 || s0 != s1 || r0 == s0 {
        return Err(Error::NotEmbedded("kite sides do not close up".into()));
    }
    let n = sf.num_triangles();
    let mut state = vec![0i8; n];
    for t in 0..n {
        for e in 0..3u8 {
            if let Some(tag) = side_tag(ov, EdgeRef::new(t, e)) {
                let forward = tag.to > tag.from;
                let inside = if matches!(tag.seg, 1 | 2) { forward } else { !forward };
                let val = if inside { 1 } else { -1 };
                if state[t] != 0 && state[t] != val {
                    return Err(Error::NotEmbedded("kite overlaps itself".into()));
                }
                state[t] = val;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&t| state[t] == 1).collect();
    let mut inside = vec![false; n];
    for &t in &queue {
        inside[t] = true;
    }
    while let Some(t) = queue.pop_front() {
        for e in 0..3u8 {
            let e = EdgeRef::new(t, e);
            if side_tag(ov, e).is_some() {
                continue;
            }
            let o = sf.glued(e).tri;
            if state[o] == -1 {
                return Err(Error::NotEmbedded("kite interior leaks outside".into()));
            }
            if !inside[o] {
                inside[o] = true;
                queue.push_back(o);
            }
        }
    }
    let area: f64 = (0..n).filter(|&t| inside[t]).map(|t| crate::geom::heron(sf.lengths(t))).sum();
    if (area - k.area()).abs() > 1e-7 * k.area().max(1e-12) + 1e-12 {
        return Err(Error::NotEmbedded(format!("kite area {} but {} enclosed", k.area(), area)));
    }
    for v in 0..sf.num_vertices() {
        let vx = sf.vertex(v);
        if vx.corners.iter().all(|c| inside[c.tri]) && sf.is_cone_point(v) {
            return Err(Error::NotEmbedded(format!("kite covers a cone point (old {:?})", ov.vertex_origin[v])));
        }
    }
    Ok(inside)
}

/// True if the kite is admissible, simple, and free of cone points.
pub fn kite_embeds(s: &ConeSurface, k: &Kite) -> bool {
    check_admissible(s, k).is_ok() && cut_kite(s, k).is_ok()
}

fn kept_vertex(sf: &ConeSurface, inside: &[bool], newid: &[usize], out: &ConeSurface, v: usize) -> Option<usize> {
    sf.vertex(v)
        .corners
        .iter()
        .find(|c| !inside[c.tri])
        .map(|c| out.vertex_of(CornerRef::new(newid[c.tri], c.corner)))
}

/// Removes the kite and glues its mirrored sides.
pub fn excise(s: &ConeSurface, k: &Kite) -> Result<ExcisionResult> {
    check_admissible(s, k)?;
    let (ov, inside) = cut_kite(s, k)?;
    let sf = &ov.surface;
    let n = sf.num_triangles();
    let keep: Vec<usize> = (0..n).filter(|&t| !inside[t]).collect();
    let mut newid = vec![usize::MAX; n];
    for (i, &t) in keep.iter().enumerate() {
        newid[t] = i;
    }
    let map = |e: EdgeRef| EdgeRef::new(newid[e.tri], e.edge);
    let mut pairs = Vec::new();
    let mut open: [Vec<(EdgeRef, EdgeTag)>; 4] = Default::default();
    for &t in &keep {
        for j in 0..3u8 {
            let e = EdgeRef::new(t, j);
            let o = sf.glued(e);
            if !inside[o.tri] {
                if (e.tri, e.edge) < (o.tri, o.edge) {
                    pairs.push((map(e), map(o)));
                }
            } else {
                let tag = side_tag(&ov, e).ok_or_else(|| Error::KernelDefect("open edge off the kite".into()))?;
                open[tag.seg].push((map(e), tag));
            }
        }
    }
    for (a, b) in [(0usize, 1usize), (3, 2)] {
        if open[a].len() != open[b].len() {
            return Err(Error::KernelDefect("mirrored kite sides differ".into()));
        }
        for (e, t) in &open[a] {
            let m = open[b]
                .iter()
                .find(|(_, u)| (u.from - t.to).abs() < 1e-9 && (u.to - t.from).abs() < 1e-9)
                .ok_or_else(|| Error::KernelDefect("mirrored kite sides differ".into()))?;
            pairs.push((*e, m.0));
        }
    }
    let lengths: Vec<[f64; 3]> = keep.iter().map(|&t| sf.lengths(t)).collect();
    let out = ConeSurface::from_pairs(lengths, &pairs)?;
    let r_ov = ov.vertex_on_segment(0, k.side_p()).unwrap();
    let r2_ov = ov.vertex_on_segment(1, k.side_p()).unwrap();
    let find = |v: usize| kept_vertex(sf, &inside, &newid, &out, v);
    let vertex_map: Vec<Option<usize>> = (0..s.num_vertices())
        .map(|v| ov.new_vertex_of(v).and_then(find))
        .collect();
    let missing = || Error::KernelDefect("kite corner vanished".into());
    let (p, q, r) = (
        vertex_map[k.p()].ok_or_else(missing)?,
        vertex_map[k.q()].ok_or_else(missing)?,
        find(r_ov).ok_or_else(missing)?,
    );
    let mut keep: Vec<usize> = vertex_map.iter().flatten().copied().collect();
    keep.extend([p, q, r]);
    let (out, tidy) = crate::simplify::simplify(&out, &keep)?;
    let vertex_map: Vec<Option<usize>> = vertex_map.iter().map(|v| v.and_then(|v| tidy[v])).collect();
    let (p, q, r) = (tidy[p].ok_or_else(missing)?, tidy[q].ok_or_else(missing)?, tidy[r].ok_or_else(missing)?);
    Ok(ExcisionResult {
        removed_area: s.area() - out.area(),
        angle_p: (s.angle(k.p()), out.angle(p)),
        angle_q: (s.angle(k.q()), out.angle(q)),
        apex_before: (sf.angle(r_ov), sf.angle(r2_ov)),
        angle_r: out.angle(r),
        surface: out,
        vertex_map,
        p,
        q,
        r,
    })
}

/// Recipe for the inverse surgery: open two slits at cone point `vertex`
/// and glue in a kite with diagonal `length`, apex foot `a` and half
/// width `h`. The slit towards the new `q` leaves at angle position
/// `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KiteInsertion {
    pub vertex: usize,
    pub direction: f64,
    pub length: f64,
    pub a: f64,
    pub h: f64,
}

impl KiteInsertion {
    pub fn angle_p(&self) -> f64 {
        2.0 * self.h.atan2(self.a)
    }

    pub fn angle_q(&self) -> f64 {
        2.0 * self.h.atan2(self.length - self.a)
    }
}

#[derive(Clone, Debug)]
pub struct InsertionResult {
    pub surface: ConeSurface,
    pub vertex_map: Vec<Option<usize>>,
    /// New main vertices of the kite.
    pub p: usize,
    pub q: usize,
    /// The two points the old vertex splits into.
    pub r: [usize; 2],
}

fn slit_vertices(ov: &Overlay, seg: usize) -> Vec<usize> {
    let sf = &ov.surface;
    let mut v: Vec<usize> = ov
        .segment_edges(seg)
        .iter()
        .flat_map(|(e, _)| {
            [sf.vertex_of(CornerRef::new(e.tri, e.edge)), sf.vertex_of(CornerRef::new(e.tri, crate::surface::next3(e.edge)))]
        })
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Glues a kite into two slits cut from cone point `ins.vertex`. One of
/// the two points the vertex splits into becomes regular.
pub fn insert_kite(s: &ConeSurface, ins: &KiteInsertion) -> Result<InsertionResult> {
    let KiteInsertion { vertex: rv, direction, length: l, a, h } = *ins;
    if rv >= s.num_vertices() {
        return Err(Error::UnknownVertex(rv));
    }
    if !(h > 0.0 && a > 0.0 && a < l && l.is_finite()) {
        return Err(Error::InvalidArgument(format!("kite shape L = {l}, a = {a}, h = {h}")));
    }
    let (ap, aq) = (ins.angle_p(), ins.angle_q());
    if s.angle(rv) - ap - aq < TAU - EPS {
        return Err(Error::Inadmissible(format!(
            "splitting angle {} leaves less than 2π",
            s.angle(rv)
        )));
    }
    let (side_p, side_q) = (a.hypot(h), (l - a).hypot(h));
    let opening = PI + 0.5 * (ap + aq);
    let segs = [
        OverlaySegment::from_vertex(s, rv, direction, side_q),
        OverlaySegment::from_vertex(s, rv, direction + opening, side_p),
    ];
    let ov = overlay(s, &segs, &[]).map_err(|e| Error::NotEmbedded(e.to_string()))?;
    let sf = &ov.surface;
    let r_new = ov.new_vertex_of(rv).ok_or_else(|| Error::KernelDefect("slit vertex lost".into()))?;
    let qv = ov.vertex_on_segment(0, side_q);
    let pv = ov.vertex_on_segment(1, side_p);
    let (Some(qv), Some(pv)) = (qv, pv) else {
        return Err(Error::NotEmbedded("slit ends are not vertices".into()));
    };
    if sf.is_cone_point(pv) || sf.is_cone_point(qv) || pv == qv || pv == r_new || qv == r_new {
        return Err(Error::NotEmbedded("slit ends on a cone point".into()));
    }
    let (va, vb) = (slit_vertices(&ov, 0), slit_vertices(&ov, 1));
    if va.iter().filter(|v| vb.contains(v)).count() != 1 {
        return Err(Error::NotEmbedded("slits meet away from the cone point".into()));
    }

    let (pp, qq, rr, rr2) = (Pt2::new(0.0, 0.0), Pt2::new(l, 0.0), Pt2::new(a, h), Pt2::new(a, -h));
    let inner = |seg: usize| -> Vec<f64> {
        let len = if seg == 0 { side_q } else { side_p };
        offsets(&ov, seg).into_iter().filter(|d| *d > 1e-9 && *d < len - 1e-9).collect()
    };
    let (oa, ob) = (inner(0), inner(1));
    // polygon P, R', Q, R with the slit subdivisions; each edge remembers
    // the slit and the two distances from the split vertex
    let mut poly: Vec<Pt2> = Vec::new();
    let mut edge_key: Vec<Option<(usize, f64, f64)>> = Vec::new();
    let mut side = |from: Pt2, to: Pt2, seg: usize, len: f64, ds: &[f64], towards_r: bool| {
        let mut d: Vec<f64> = vec![len];
        d.extend(ds.iter().rev());
        d.push(0.0);
        if !towards_r {
            d.reverse();
        }
        let (apex, other) = if towards_r { (to, from) } else { (from, to) };
        for w in d.windows(2) {
            poly.push(apex + (other - apex) * (w[0] / len));
            edge_key.push(Some((seg, w[0], w[1])));
        }
    };
    side(pp, rr2, 1, side_p, &ob, true);
    side(rr2, qq, 0, side_q, &oa, false);
    side(qq, rr, 0, side_q, &oa, true);
    side(rr, pp, 1, side_p, &ob, false);
    let mut tris = Vec::new();
    crate::overlay::ear_clip(&poly, (0..poly.len()).collect(), &mut tris)?;

    let base = sf.num_triangles();
    let mut lengths: Vec<[f64; 3]> = (0..base).map(|t| sf.lengths(t)).collect();
    let mut pairs = Vec::new();
    let mut slit: Vec<(EdgeRef, EdgeTag)> = Vec::new();
    for t in 0..base {
        for j in 0..3u8 {
            let e = EdgeRef::new(t, j);
            match ov.tags.get(&e).and_then(|v| v.iter().find(|t| t.seg < 2)) {
                Some(tag) => slit.push((e, *tag)),
                None => {
                    let o = sf.glued(e);
                    if (e.tri, e.edge) < (o.tri, o.edge) {
                        pairs.push((e, o));
                    }
                }
            }
        }
    }
    let n = poly.len();
    let mut diag = std::collections::BTreeMap::new();
    for (i, tri) in tris.iter().enumerate() {
        let t = base + i;
        let mut len = [0.0; 3];
        for j in 0..3 {
            let (u, v) = (tri[j], tri[(j + 1) % 3]);
            len[j] = (poly[v] - poly[u]).norm();
            let e = EdgeRef::new(t, j as u8);
            if v == (u + 1) % n {
                let (seg, d1, d2) = edge_key[u].unwrap();
                let m = slit
                    .iter()
                    .find(|(_, g)| g.seg == seg && (g.from - d2).abs() < 1e-9 && (g.to - d1).abs() < 1e-9)
                    .ok_or_else(|| Error::KernelDefect("slit sub-edge without a partner".into()))?;
                pairs.push((e, m.0));
            } else if let Some(o) = diag.remove(&(v, u)) {
                pairs.push((e, o));
            } else {
                diag.insert((u, v), e);
            }
        }
        lengths.push(len);
    }
    if pairs.len() * 2 != lengths.len() * 3 {
        return Err(Error::KernelDefect("kite insertion left unglued edges".into()));
    }
    let out = ConeSurface::from_pairs(lengths, &pairs)?;
    let corner_of = |v: usize| sf.vertex(v).corners[0];
    let new_of = |v: usize| {
        let c = corner_of(v);
        out.vertex_of(c)
    };
    let mut r = [usize::MAX; 2];
    let rc = &sf.vertex(r_new).corners;
    r[0] = out.vertex_of(rc[0]);
    r[1] = rc.iter().map(|c| out.vertex_of(*c)).find(|&v| v != r[0]).unwrap_or(r[0]);
    let vertex_map: Vec<Option<usize>> = (0..s.num_vertices())
        .map(|v| if v == rv { None } else { ov.new_vertex_of(v).map(new_of) })
        .collect();
    let (p, q) = (new_of(pv), new_of(qv));
    let mut keep: Vec<usize> = vertex_map.iter().flatten().copied().collect();
    keep.extend([p, q, r[0], r[1]]);
    let (out, tidy) = crate::simplify::simplify(&out, &keep)?;
    let lost = || Error::KernelDefect("kite corner vanished".into());
    let vertex_map = vertex_map.iter().map(|v| v.and_then(|v| tidy[v])).collect();
    let r = [tidy[r[0]].ok_or_else(lost)?, tidy[r[1]].ok_or_else(lost)?];
    Ok(InsertionResult {
        p: tidy[p].ok_or_else(lost)?,
        q: tidy[q].ok_or_else(lost)?,
        r,
        vertex_map,
        surface: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::octagon;

    #[test]
    fn diamond_on_an_octagon_side() {
        let s = octagon(1.0).unwrap();
        let base = base_between(&s, 0, 0).unwrap();
        assert!((base.length - 1.0).abs() < 1e-12);
        let k = build_diamond(&s, &base, 0.2).unwrap();
        let res = excise(&s, &k).unwrap();
        let out = &res.surface;
        assert!(out.validate().valid, "{:?}", out.validate());
        assert_eq!(out.genus(), 2);
        assert!((res.removed_area - k.area()).abs() < 1e-9);
        let taken = k.angle_p() + k.angle_q();
        assert_eq!(res.p, res.q);
        assert!((res.angle_p.1 - (6.0 * PI - taken)).abs() < 1e-9);
        assert!((res.angle_r - (TAU + taken)).abs() < 1e-9);
        assert!((res.apex_before.0 - TAU).abs() < 1e-9 && (res.apex_before.1 - TAU).abs() < 1e-9);
        assert_eq!(out.cone_points().len(), 2);
    }

    #[test]
    fn oversized_kites_are_rejected() {
        let s = octagon(1.0).unwrap();
        let base = base_between(&s, 0, 0).unwrap();
        assert!(matches!(build_diamond(&s, &base, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_exact(&s, &base, 0.1), Err(Error::Inadmissible(_))));
    }

    fn cone_angles(s: &ConeSurface) -> Vec<f64> {
        let mut v: Vec<f64> = s.cone_points().iter().map(|&c| s.angle(c)).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    #[test]
    fn insertion_splits_the_octagon_vertex_and_excision_undoes_it() {
        let s = octagon(1.0).unwrap();
        let ins = KiteInsertion { vertex: 0, direction: 0.3, length: 0.3, a: 0.1, h: 0.04 };
        let res = insert_kite(&s, &ins).unwrap();
        let m = &res.surface;
        assert!(m.validate().valid);
        assert_eq!(m.genus(), 2);
        assert!((m.area() - s.area() - 0.3 * 0.04).abs() < 1e-12);
        assert_eq!(m.cone_points().len(), 3);
        assert!((m.angle(res.p) - TAU - ins.angle_p()).abs() < 1e-9);
        assert!((m.angle(res.q) - TAU - ins.angle_q()).abs() < 1e-9);
        assert!(res.r.iter().any(|&v| (m.angle(v) - TAU).abs() < 1e-9));

        let base = base_between(m, res.p, res.q).unwrap();
        assert!((base.length - 0.3).abs() < 1e-9);
        let k = build_exact(m, &base, 0.08).unwrap();
        assert!((k.a - 0.1).abs() < 1e-9);
        let back = excise(m, &k).unwrap();
        assert!((back.surface.area() - s.area()).abs() < 1e-9);
        let (a0, a1) = (cone_angles(&s), cone_angles(&back.surface));
        assert_eq!(a0.len(), a1.len());
        assert!(a0.iter().zip(&a1).all(|(x, y)| (x - y).abs() < 1e-9));
    }

    #[test]
    fn insertion_needs_enough_angle() {
        let s = octagon(1.0).unwrap();
        let m = insert_kite(&s, &KiteInsertion { vertex: 0, direction: 0.3, length: 0.3, a: 0.1, h: 0.04 }).unwrap();
        let p = m.p;
        let ins = KiteInsertion { vertex: p, direction: 0.0, length: 0.05, a: 0.025, h: 0.02 };
        assert!(matches!(insert_kite(&m.surface, &ins), Err(Error::Inadmissible(_))));
        let base = base_between(&m.surface, m.p, m.q).unwrap();
        assert!(matches!(build_diamond(&m.surface, &base, 0.2), Err(Error::Inadmissible(_))));
    }
}

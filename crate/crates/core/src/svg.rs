//! SVG drawings of developed nets with optional overlays.

use crate::decompose::SystolicDecomposition;
use crate::error::Result;
use crate::geom::{Motion, Pt2, PI};
use crate::kite::{cut_kite, Kite};
use crate::surface::{ConeSurface, EdgeRef, SingularityKind};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

const FILLS: [&str; 8] = ["#d9e8f5", "#f6dcc4", "#d8efd3", "#eed6ee", "#f3efc2", "#d2ecec", "#f1d2d2", "#e2e2e2"];

/// Extra content drawn on top of the net.
#[derive(Clone, Debug, Default)]
pub struct NetOverlays {
    /// Fill class of each face, empty for no fills.
    pub fill: Vec<Option<usize>>,
    /// Half-edges drawn as heavy strokes.
    pub strokes: BTreeSet<EdgeRef>,
}

/// A developed net: one motion per triangle into the drawing plane.
#[derive(Clone, Debug)]
pub struct Net {
    pub motions: Vec<Motion>,
    /// Half-edges crossed by the spanning tree.
    pub tree: BTreeSet<EdgeRef>,
}

impl Net {
    pub fn corners(&self, s: &ConeSurface, t: usize) -> [Pt2; 3] {
        let l = s.layout(t);
        [self.motions[t] * l[0], self.motions[t] * l[1], self.motions[t] * l[2]]
    }
}

/// Breadth-first unfolding from triangle 0, crossing longer edges first.
pub fn develop(s: &ConeSurface) -> Net {
    let n = s.num_triangles();
    let mut motions: Vec<Option<Motion>> = vec![None; n];
    let mut tree = BTreeSet::new();
    motions[0] = Some(Motion::identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        let m = motions[t].unwrap();
        // crossing long edges first keeps fans and squares in one piece
        let mut order = [0u8, 1, 2];
        let l = s.lengths(t);
        order.sort_by(|&a, &b| l[b as usize].total_cmp(&l[a as usize]).then(a.cmp(&b)));
        for j in order {
            let e = EdgeRef::new(t, j);
            let o = s.glued(e);
            if motions[o.tri].is_none() {
                motions[o.tri] = Some(m * s.neighbor_motion(e));
                tree.insert(e);
                tree.insert(o);
                queue.push_back(o.tri);
            }
        }
    }
    Net { motions: motions.into_iter().map(|m| m.unwrap_or_else(Motion::identity)).collect(), tree }
}

fn fmt(x: f64) -> String {
    let v = if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{v:.6}")
}

/// Deterministic SVG 1.1 document of the net of `s`.
pub fn export_svg(s: &ConeSurface, ov: &NetOverlays) -> String {
    let net = develop(s);
    let pts: Vec<[Pt2; 3]> = (0..s.num_triangles()).map(|t| net.corners(s, t)).collect();
    let (mut lo, mut hi) = (Pt2::new(f64::MAX, f64::MAX), Pt2::new(f64::MIN, f64::MIN));
    for p in pts.iter().flatten() {
        lo = Pt2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Pt2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let size = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let pad = 0.05 * size;
    let thin = 0.002 * size;
    let font = 0.025 * size;
    // the drawing flips y so that layouts keep their orientation
    let pos = |p: &Pt2| (fmt(p.x - lo.x + pad), fmt(hi.y - p.y + pad));
    let mut out = String::new();
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt(800.0 * w / w.max(h)),
        fmt(800.0 * h / w.max(h)),
        fmt(w),
        fmt(h)
    );
    let _ = writeln!(out, "<g id=\"faces\" stroke=\"#888888\" stroke-width=\"{}\">", fmt(thin));
    for (t, p) in pts.iter().enumerate() {
        let fill = ov.fill.get(t).copied().flatten().map_or("#ffffff", |c| FILLS[c % FILLS.len()]);
        let (a, b, c) = (pos(&p[0]), pos(&p[1]), pos(&p[2]));
        let _ = writeln!(
            out,
            "<polygon id=\"t{t}\" fill=\"{fill}\" points=\"{},{} {},{} {},{}\"/>",
            a.0, a.1, b.0, b.1, c.0, c.1
        );
    }
    let _ = writeln!(out, "</g>");
    // cut edges carry the index of their gluing pair on both sides
    let mut label: BTreeMap<EdgeRef, usize> = BTreeMap::new();
    for t in 0..s.num_triangles() {
        for j in 0..3u8 {
            let e = EdgeRef::new(t, j);
            if !net.tree.contains(&e) && !label.contains_key(&e) {
                let k = label.len() / 2;
                label.insert(e, k);
                label.insert(s.glued(e), k);
            }
        }
    }
    let _ = writeln!(out, "<g id=\"cuts\" stroke=\"#333333\" stroke-width=\"{}\" font-size=\"{}\" text-anchor=\"middle\">", fmt(2.0 * thin), fmt(font));
    for (e, k) in &label {
        let p = &pts[e.tri];
        let (a, b) = (p[e.edge as usize], p[(e.edge as usize + 1) % 3]);
        let c = p[(e.edge as usize + 2) % 3];
        let m = Pt2::from((a.coords + b.coords) / 2.0);
        // nudge the label towards the inside of its triangle
        let at = m + (c - m) * 0.15;
        let (x1, y1) = pos(&a);
        let (x2, y2) = pos(&b);
        let (lx, ly) = pos(&at);
        let _ = writeln!(out, "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>");
        let _ = writeln!(out, "<text x=\"{lx}\" y=\"{ly}\" stroke=\"none\" fill=\"#333333\">{k}</text>");
    }
    let _ = writeln!(out, "</g>");
    if !ov.strokes.is_empty() {
        let _ = writeln!(out, "<g id=\"loops\" stroke=\"#c0392b\" stroke-width=\"{}\">", fmt(4.0 * thin));
        for e in &ov.strokes {
            let p = &pts[e.tri];
            let (x1, y1) = pos(&p[e.edge as usize]);
            let (x2, y2) = pos(&p[(e.edge as usize + 1) % 3]);
            let _ = writeln!(out, "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>");
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "<g id=\"singularities\" font-size=\"{}\">", fmt(font));
    for c in s.classify_singularities() {
        if c.kind == SingularityKind::Regular {
            continue;
        }
        let colour = if c.kind == SingularityKind::Small { "#2c7fb8" } else { "#d95f0e" };
        for (i, corner) in s.vertex(c.vertex).corners.iter().enumerate() {
            let (x, y) = pos(&pts[corner.tri][corner.corner as usize]);
            let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{}\" fill=\"{colour}\"/>", fmt(3.0 * thin));
            if i == 0 {
                let _ = writeln!(out, "<text x=\"{x}\" y=\"{y}\" fill=\"{colour}\">v{} {}π</text>", c.vertex, fmt(c.angle / PI));
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

/// The refined mesh of a decomposition with bands and domains filled and
/// the systolic loops stroked.
pub fn decomposition_view(dec: &SystolicDecomposition) -> (ConeSurface, NetOverlays) {
    let sf = &dec.overlay.surface;
    let fill = (0..sf.num_triangles())
        .map(|t| match dec.face_band[t] {
            Some(_) => Some(0),
            None => dec.domain_of_face(t).map(|d| d + 1),
        })
        .collect();
    let strokes = dec.overlay.tags.keys().copied().collect();
    (sf.clone(), NetOverlays { fill, strokes })
}

/// The mesh cut along the kite outline with the kite filled.
pub fn kite_view(s: &ConeSurface, k: &Kite) -> Result<(ConeSurface, NetOverlays)> {
    let (ov, inside) = cut_kite(s, k)?;
    let fill = inside.iter().map(|&i| i.then_some(1)).collect();
    let strokes = ov.tags.keys().copied().collect();
    Ok((ov.surface, NetOverlays { fill, strokes }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octagon, torus};

    #[test]
    fn torus_net_is_the_unit_square() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        let net = develop(&s);
        let all: Vec<Pt2> = (0..s.num_triangles()).flat_map(|t| net.corners(&s, t)).collect();
        let mut distinct: Vec<Pt2> = Vec::new();
        for p in all {
            if distinct.iter().all(|q| (p - q).norm() > 1e-9) {
                distinct.push(p);
            }
        }
        assert_eq!(distinct.len(), 4);
        let mut d: Vec<f64> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| (distinct[i] - distinct[j]).norm()).collect();
        d.sort_by(f64::total_cmp);
        assert!(d[..4].iter().all(|x| (x - 1.0).abs() < 1e-9));
        assert!(d[4..].iter().all(|x| (x - 2f64.sqrt()).abs() < 1e-9));
        let svg = export_svg(&s, &NetOverlays::default());
        assert_eq!(svg.matches("<text").count(), 4);
    }

    #[test]
    fn net_is_isometric() {
        let s = octagon(1.0).unwrap();
        let net = develop(&s);
        for t in 0..s.num_triangles() {
            let p = net.corners(&s, t);
            let l = s.lengths(t);
            for k in 0..3 {
                assert!(((p[(k + 1) % 3] - p[k]).norm() - l[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn octagon_marks_its_cone_point() {
        let s = octagon(1.0).unwrap();
        let svg = export_svg(&s, &NetOverlays::default());
        assert!(svg.contains("6.000000π"));
        assert_eq!(svg, export_svg(&s, &NetOverlays::default()));
    }

    #[test]
    fn decomposition_view_fills_bands() {
        let s = octagon(1.0).unwrap();
        let dec = crate::decompose::decompose(&s, 1e-9).unwrap();
        let (sf, ov) = decomposition_view(&dec);
        assert_eq!(ov.fill.len(), sf.num_triangles());
        assert!(!ov.strokes.is_empty());
        assert!(export_svg(&sf, &ov).contains("id=\"loops\""));
    }
}

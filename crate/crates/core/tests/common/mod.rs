//! Shared corpus and a brute-force systole oracle for integration tests.
#![allow(dead_code)]

use conesys::generate::{four_cylinder, octagon, perturbed, torus};
use conesys::kite::KiteInsertion;
use conesys::{ConeSurface, CornerRef, EdgeRef};
use std::f64::consts::PI;

/// Named surfaces: two tori, the octagon, the four-cylinder surface and
/// twenty perturbed variants.
pub fn corpus() -> Vec<(String, ConeSurface)> {
    let mut out = vec![
        ("torus".to_string(), torus(1.0, 1.0, 0.0).unwrap()),
        ("torus-sheared".to_string(), torus(1.0, 1.3, 0.4).unwrap()),
        ("octagon".to_string(), octagon(1.0).unwrap()),
        ("example-4-10".to_string(), four_cylinder(PI / 4.0).unwrap()),
    ];
    let mut found = 0;
    for k in 0..200usize {
        if found == 20 {
            break;
        }
        let (name, base) = if k % 2 == 0 {
            ("octagon", octagon(1.0).unwrap())
        } else {
            ("example-4-10", four_cylinder(PI / 4.0).unwrap())
        };
        let vertex = base.cone_points()[(k / 2) % base.cone_points().len()];
        let length = 0.12 + 0.013 * (k % 7) as f64;
        let ins = KiteInsertion {
            vertex,
            direction: 0.37 * k as f64,
            length,
            a: length * (0.35 + 0.05 * (k % 4) as f64),
            h: 0.01 + 0.002 * (k % 5) as f64,
        };
        if let Ok(s) = perturbed(&base, &[ins]) {
            if s.validate().valid {
                out.push((format!("{name}-perturbed-{k}"), s));
                found += 1;
            }
        }
    }
    assert_eq!(found, 20, "corpus needs twenty perturbed variants");
    out
}

type V2 = [f64; 2];

fn sub(a: V2, b: V2) -> V2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: V2, b: V2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: V2) -> f64 {
    a[0].hypot(a[1])
}

fn ccw(a: V2, b: V2) -> f64 {
    cross(a, b).atan2(a[0] * b[0] + a[1] * b[1]).rem_euclid(2.0 * PI)
}

fn seg_dist(p: V2, a: V2, b: V2) -> f64 {
    let d = sub(b, a);
    let t = ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
    let t = t.clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * d[0], a[1] + t * d[1]]))
}

/// Places the layout of triangle `t` so that its corners `i` and `i + 1`
/// land on `x` and `y`.
fn place(s: &ConeSurface, t: usize, i: usize, x: V2, y: V2) -> [V2; 3] {
    let l = s.layout(t);
    let p: Vec<V2> = l.iter().map(|q| [q.x, q.y]).collect();
    let (u, w) = (sub(p[(i + 1) % 3], p[i]), sub(y, x));
    let ang = cross(u, w).atan2(u[0] * w[0] + u[1] * w[1]);
    let (c, sn) = (ang.cos(), ang.sin());
    let m = |q: V2| {
        let d = sub(q, p[i]);
        [x[0] + c * d[0] - sn * d[1], x[1] + sn * d[0] + c * d[1]]
    };
    [m(p[0]), m(p[1]), m(p[2])]
}

/// A straight segment between mesh vertices.
#[derive(Clone, Copy, Debug)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// Angle positions of the segment at its two ends.
    pub out: f64,
    pub back: f64,
}

fn intersect(lo: V2, hi: V2, a: V2, b: V2) -> Option<(V2, V2)> {
    let (a, b) = if cross(a, b) > 0.0 { (a, b) } else { (b, a) };
    let inside = |d: V2, l: V2, h: V2| cross(l, d) >= 0.0 && cross(d, h) >= 0.0;
    let nlo = if inside(a, lo, hi) { a } else if inside(lo, a, b) { lo } else { return None };
    let nhi = if inside(b, lo, hi) { b } else if inside(hi, a, b) { hi } else { return None };
    (cross(nlo, nhi) > 0.0).then_some((nlo, nhi))
}

/// Every segment of length at most `budget` leaving a vertex, found by
/// unfolding corridors of triangles.
pub fn links(s: &ConeSurface, budget: f64) -> Vec<Link> {
    let mut out = Vec::new();
    // segments along mesh edges bound the corridors and are added directly
    for t in 0..s.num_triangles() {
        for e in 0..3u8 {
            let (a, b) = (CornerRef::new(t, e), CornerRef::new(t, (e + 1) % 3));
            let length = s.lengths(t)[e as usize];
            if length <= budget {
                let back = s.abs_angle(b, s.corner_angle(b));
                out.push(Link { from: s.vertex_of(a), to: s.vertex_of(b), length, out: s.abs_angle(a, 0.0), back });
            }
        }
    }
    for t in 0..s.num_triangles() {
        for c in 0..3usize {
            let start = CornerRef::new(t, c as u8);
            let l = s.layout(t);
            let p: [V2; 3] = [[l[0].x, l[0].y], [l[1].x, l[1].y], [l[2].x, l[2].y]];
            let v = p[c];
            let first = sub(p[(c + 1) % 3], v);
            let ctx = (start, v, first);
            let lo = sub(p[(c + 1) % 3], v);
            let hi = sub(p[(c + 2) % 3], v);
            let e = EdgeRef::new(t, ((c + 1) % 3) as u8);
            let o = s.glued(e);
            let q = place(s, o.tri, o.edge as usize, p[(c + 2) % 3], p[(c + 1) % 3]);
            walk(s, budget, &ctx, o.tri, o.edge as usize, q, lo, hi, 0, &mut out);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(s: &ConeSurface, budget: f64, ctx: &(CornerRef, V2, V2), t: usize, j: usize, p: [V2; 3], lo: V2, hi: V2, depth: usize, out: &mut Vec<Link>) {
    let (start, v, first) = *ctx;
    if depth > 400 || seg_dist(v, p[j], p[(j + 1) % 3]) > budget {
        return;
    }
    let k = (j + 2) % 3;
    let dc = sub(p[k], v);
    if cross(lo, dc) > 0.0 && cross(dc, hi) > 0.0 && norm(dc) <= budget {
        let back_corner = CornerRef::new(t, k as u8);
        out.push(Link {
            from: s.vertex_of(start),
            to: s.vertex_of(back_corner),
            length: norm(dc),
            out: s.abs_angle(start, ccw(first, dc)),
            back: s.abs_angle(back_corner, ccw(sub(p[j], p[k]), sub(v, p[k]))),
        });
    }
    // the two far edges: k -> j and (j + 1) -> k
    for (edge, a, b) in [(k, p[k], p[j]), ((j + 1) % 3, p[(j + 1) % 3], p[k])] {
        if let Some((nlo, nhi)) = intersect(lo, hi, sub(a, v), sub(b, v)) {
            let o = s.glued(EdgeRef::new(t, edge as u8));
            let q = place(s, o.tri, o.edge as usize, b, a);
            walk(s, budget, ctx, o.tri, o.edge as usize, q, nlo, nhi, depth + 1, out);
        }
    }
}

fn straight_enough(theta: f64, back: f64, out: f64) -> bool {
    let d = (out - back).rem_euclid(theta);
    d >= PI - 1e-9 && theta - d >= PI - 1e-9
}

/// The shortest closed chain of segments turning by at least π on both
/// sides at every vertex, below `budget`.
pub fn shortest_chain(s: &ConeSurface, budget: f64) -> Option<(f64, Vec<Link>)> {
    let all = links(s, budget);
    let mut best: Option<(f64, Vec<Link>)> = None;
    for v0 in 0..s.num_vertices() {
        let mut stack: Vec<(Vec<Link>, f64)> = all.iter().filter(|l| l.from == v0).map(|l| (vec![*l], l.length)).collect();
        while let Some((chain, len)) = stack.pop() {
            if best.as_ref().is_some_and(|b| len >= b.0) {
                continue;
            }
            let (head, last) = (chain[0], chain[chain.len() - 1]);
            if last.to == v0 && straight_enough(s.angle(v0), last.back, head.out) {
                best = Some((len, chain));
                continue;
            }
            for l in all.iter().filter(|l| l.from == last.to) {
                if len + l.length <= budget && straight_enough(s.angle(last.to), last.back, l.out) {
                    let mut c = chain.clone();
                    c.push(*l);
                    stack.push((c, len + l.length));
                }
            }
        }
    }
    best
}

/// Systole by doubling the search length until a closed chain appears.
pub fn oracle_systole(s: &ConeSurface) -> f64 {
    let mut budget = (0..s.num_triangles()).flat_map(|t| s.lengths(t)).fold(f64::INFINITY, f64::min);
    for _ in 0..40 {
        if let Some((l, _)) = shortest_chain(s, budget) {
            return l;
        }
        budget *= 2.0;
    }
    panic!("no closed geodesic found");
}

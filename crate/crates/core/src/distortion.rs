//! Piecewise affine comparison maps between a surface with a small kite
//! removed and one with a larger kite on the same base removed.
//!
//! The map fixes the outer region pointwise on its boundary. In the upper
//! half the outer region is the polygon `p, q, R, S` where `R` is the outer
//! apex and `S` lies beyond `[p, R]`, outside the outer kite. The inner
//! apex `r` goes to its foot `m = (a, 0)` on `[p, q]`. The lower half is
//! the mirror image.

use crate::error::{Error, Result};
use crate::geom::{cross, Pt2, Vec2, PI, TAU};
use crate::kite::{Kite, KiteKind};
use crate::surface::{triangle_layout, ConeSurface};
use nalgebra::Matrix2;

/// One affine piece, from a triangle of the excised side onto a triangle
/// of the comparison side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub from: [Pt2; 3],
    pub to: [Pt2; 3],
}

impl Piece {
    fn linear(&self) -> Option<Matrix2<f64>> {
        let f = Matrix2::from_columns(&[self.from[1] - self.from[0], self.from[2] - self.from[0]]);
        let t = Matrix2::from_columns(&[self.to[1] - self.to[0], self.to[2] - self.to[0]]);
        f.try_inverse().map(|fi| t * fi)
    }

    /// Image of `x` under the affine extension of this piece.
    pub fn apply(&self, x: &Pt2) -> Option<Pt2> {
        let m = self.linear()?;
        Some(self.to[0] + m * (x - self.from[0]))
    }

    pub fn contains(&self, x: &Pt2) -> bool {
        let [a, b, c] = self.from;
        let tol = 1e-12 * ((b - a).norm() + (c - b).norm());
        cross(&(b - a), &(x - a)) >= -tol && cross(&(c - b), &(x - b)) >= -tol && cross(&(a - c), &(x - c)) >= -tol
    }
}

fn twice_area(t: &[Pt2; 3]) -> f64 {
    cross(&(t[1] - t[0]), &(t[2] - t[0]))
}

/// The comparison map and its bilipschitz constant.
#[derive(Clone, Debug)]
pub struct Distortion {
    pub constant: f64,
    pub pieces: Vec<Piece>,
    /// Whether all pieces share the kite frame. Otherwise each piece is
    /// laid out on its own.
    pub global_frame: bool,
}

impl Distortion {
    /// Image of a point of the outer region, if it lies in some piece.
    pub fn map(&self, x: &Pt2) -> Option<Pt2> {
        if !self.global_frame {
            return None;
        }
        self.pieces.iter().find(|p| p.contains(x)).and_then(|p| p.apply(x))
    }
}

fn nested(inner: &Kite, outer: &Kite) -> Result<()> {
    let (a, b) = (&inner.base, &outer.base);
    let same_base = a.p == b.p
        && a.q == b.q
        && (a.start - b.start).abs() < 1e-12
        && (a.end - b.end).abs() < 1e-12
        && (a.length - b.length).abs() < 1e-12;
    if !same_base || inner.kind != outer.kind {
        return Err(Error::InvalidArgument("kites do not share a base and a kind".into()));
    }
    if !(inner.h >= 0.0 && inner.h <= outer.h && outer.h > 0.0) {
        return Err(Error::InvalidArgument(format!("width {} does not fit in {}", inner.width(), outer.width())));
    }
    let (p, q, r, big) = (Pt2::origin(), Pt2::new(b.length, 0.0), inner.r(), outer.r());
    let tol = 1e-12 * b.length;
    let inside = cross(&(q - p), &(r - p)) >= -tol
        && cross(&(big - q), &(r - q)) >= -tol
        && cross(&(p - big), &(r - big)) >= -tol;
    if !inside {
        return Err(Error::InvalidArgument("inner apex lies outside the outer kite".into()));
    }
    Ok(())
}

/// Bilipschitz constant of the comparison map between the surfaces with
/// `inner` and with `outer` excised. Both kites must share base and kind,
/// and `inner` must lie in `outer`.
pub fn lipschitz_distortion(s: &ConeSurface, inner: &Kite, outer: &Kite) -> Result<Distortion> {
    nested(inner, outer)?;
    if inner.h == 0.0 {
        return Ok(Distortion { constant: 1.0, pieces: Vec::new(), global_frame: true });
    }
    let pieces = match outer.kind {
        KiteKind::Diamond => diamond_pieces(s, inner, outer)?,
        KiteKind::Exact => exact_pieces(inner, outer)?,
    };
    let l = outer.base.length;
    let mut constant: f64 = 1.0;
    for pc in &pieces {
        let (fa, ta) = (twice_area(&pc.from), twice_area(&pc.to));
        if fa <= 1e-14 * l * l || ta <= 1e-14 * l * l {
            return Err(Error::Degenerate("comparison piece collapses".into()));
        }
        let lin = pc.linear().ok_or_else(|| Error::Degenerate("singular comparison piece".into()))?;
        let sv = lin.singular_values();
        constant = constant.max(sv.max()).max(1.0 / sv.min());
    }
    Ok(Distortion { constant, pieces, global_frame: outer.kind == KiteKind::Diamond })
}

fn with_mirror(upper: &[Piece]) -> Vec<Piece> {
    let flip = |x: Pt2| Pt2::new(x.x, -x.y);
    let mut out = Vec::new();
    for pc in upper {
        out.push(*pc);
        out.push(Piece {
            from: [flip(pc.from[0]), flip(pc.from[2]), flip(pc.from[1])],
            to: [flip(pc.to[0]), flip(pc.to[2]), flip(pc.to[1])],
        });
    }
    out
}

/// Diamond kites: `p` and `q` stay put and `r` goes to its foot.
fn diamond_pieces(s: &ConeSurface, inner: &Kite, outer: &Kite) -> Result<Vec<Piece>> {
    let spare = if outer.p() == outer.q() {
        s.angle(outer.p()) - outer.angle_p() - outer.angle_q()
    } else {
        s.angle(outer.p()) - outer.angle_p()
    };
    let beta = (0.25 * spare).min(0.25 * PI);
    if beta <= 0.0 {
        return Err(Error::Inadmissible("no room beside the outer kite at p".into()));
    }
    let (p, q, big) = (Pt2::origin(), Pt2::new(outer.base.length, 0.0), outer.r());
    let dir = 0.5 * outer.angle_p() + beta;
    let far = p + Vec2::new(dir.cos(), dir.sin()) * (big - p).norm();
    let (r, m) = (inner.r(), Pt2::new(inner.a, 0.0));
    Ok(with_mirror(&[
        Piece { from: [r, q, big], to: [m, q, big] },
        Piece { from: [r, big, far], to: [m, big, far] },
        Piece { from: [p, r, far], to: [p, m, far] },
    ]))
}

/// Planar triangle with the given corners, from its side lengths.
fn shape(a: Pt2, b: Pt2, c: Pt2) -> [Pt2; 3] {
    triangle_layout([(b - a).norm(), (c - b).norm(), (a - c).norm()])
}

/// Exact kites: after excision `p` is regular and the merged apex carries
/// the curvature, so the map sends the merged apex to `p` and `p` to a
/// point at the same distance on the far side.
///
/// Both sides are fans over the ring `q, R, S_1, .., S_7, R'` where the
/// `S_j` sit at radius `|pR|` and split the 2π outside the outer kite into
/// eight equal sectors. The excised side is developed around `p`, where
/// the outside closes up into a plane.
fn exact_pieces(inner: &Kite, outer: &Kite) -> Result<Vec<Piece>> {
    if outer.p() == outer.q() {
        return Err(Error::InvalidArgument("exact kites on a loop have no comparison map here".into()));
    }
    const SECTORS: usize = 8;
    let l = outer.base.length;
    let big = outer.r();
    let rho = big.coords.norm();
    let delta = inner.r().coords.norm();
    let step = TAU / SECTORS as f64;
    // excised side: plane around the regular p, ray 0 holding r and R
    let ring = |j: usize| {
        let t = step * j as f64;
        Pt2::new(rho * t.cos(), rho * t.sin())
    };
    let apex = Pt2::new(delta, 0.0);
    let moved = Pt2::origin();
    // comparison side: one sector of the cone at p at a time
    let center = Pt2::origin();
    let away = Pt2::new(-delta, 0.0);
    let mut pieces = Vec::new();
    let q = Pt2::new(l, 0.0);
    // kite remainders: (r, q, R) against (p, q, R), and the mirror
    let upper = Piece {
        from: triangle_layout([inner.side_q(), (q - big).norm(), rho - delta]),
        to: shape(Pt2::origin(), q, big),
    };
    pieces.push(upper);
    let lower = Piece {
        from: triangle_layout([rho - delta, (q - big).norm(), inner.side_q()]),
        to: shape(Pt2::origin(), outer.r_prime(), q),
    };
    pieces.push(lower);
    let half = SECTORS / 2;
    for j in 0..SECTORS {
        let (a, b) = (ring(j), ring(j + 1));
        let (am, bm) = (a, b);
        if j + 1 == half {
            pieces.push(Piece { from: shape(apex, a, moved), to: shape(center, am, away) });
            pieces.push(Piece { from: shape(moved, a, b), to: shape(away, am, bm) });
        } else if j == half {
            pieces.push(Piece { from: shape(apex, moved, b), to: shape(center, away, bm) });
            pieces.push(Piece { from: shape(moved, a, b), to: shape(away, am, bm) });
        } else {
            pieces.push(Piece { from: shape(apex, a, b), to: shape(center, am, bm) });
        }
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::octagon;
    use crate::kite::{base_between, build_diamond, build_exact, insert_kite, KiteInsertion};

    #[test]
    fn zero_width_is_the_identity() {
        let s = octagon(1.0).unwrap();
        let base = base_between(&s, 0, 0).unwrap();
        let outer = build_diamond(&s, &base, 0.2).unwrap();
        let inner = Kite { h: 0.0, ..outer };
        let d = lipschitz_distortion(&s, &inner, &outer).unwrap();
        assert!((d.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constants_decrease_towards_one() {
        let s = octagon(1.0).unwrap();
        let ins = KiteInsertion { vertex: 0, direction: 0.3, length: 0.3, a: 0.1, h: 0.04 };
        let t = insert_kite(&s, &ins).unwrap().surface;
        let p = t.cone_points().into_iter().find(|&v| t.angle(v) < 3.0 * PI).unwrap();
        let q = t.cone_points().into_iter().find(|&v| v != p && t.angle(v) < 3.0 * PI).unwrap();
        let base = base_between(&t, p, q).unwrap();
        let outer = build_exact(&t, &base, 0.02).unwrap();
        let mut last = f64::INFINITY;
        let mut w = 0.02;
        for _ in 0..8 {
            w *= 0.5;
            let inner = build_exact(&t, &base, w).unwrap();
            let c = lipschitz_distortion(&t, &inner, &outer).unwrap().constant;
            assert!(c < last && c >= 1.0);
            last = c;
        }
        assert!(last < 1.0 + 0.05);
    }

    #[test]
    fn diamond_constants_tend_to_one() {
        let s = octagon(1.0).unwrap();
        let base = base_between(&s, 0, 0).unwrap();
        let outer = build_diamond(&s, &base, 0.2).unwrap();
        let mut last = f64::INFINITY;
        let mut w = 0.2;
        for _ in 0..10 {
            w *= 0.5;
            let c = lipschitz_distortion(&s, &build_diamond(&s, &base, w).unwrap(), &outer).unwrap().constant;
            assert!(c < last);
            last = c;
        }
        assert!(last < 1.01, "{last}");
    }

    #[test]
    fn sampled_pairs_respect_the_constant() {
        use rand::{Rng, SeedableRng};
        let s = octagon(1.0).unwrap();
        let base = base_between(&s, 0, 0).unwrap();
        let outer = build_diamond(&s, &base, 0.2).unwrap();
        let d = lipschitz_distortion(&s, &build_diamond(&s, &base, 0.05).unwrap(), &outer).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let pc = &d.pieces[rng.gen_range(0..d.pieces.len())];
            let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
            if u + v > 1.0 {
                (u, v) = (1.0 - u, 1.0 - v);
            }
            pc.from[0] + (pc.from[1] - pc.from[0]) * u + (pc.from[2] - pc.from[0]) * v
        };
        let mut tested = 0;
        while tested < 100 {
            let (x, y) = (sample(&mut rng), sample(&mut rng));
            // the upper and lower halves of the image are convex
            if x.y * y.y <= 0.0 {
                continue;
            }
            let (fx, fy) = (d.map(&x).unwrap(), d.map(&y).unwrap());
            let ratio = (fx - fy).norm() / (x - y).norm();
            assert!(ratio >= 1.0 / d.constant - 1e-12, "{ratio}");
            let visible = (0..=50).all(|i| d.map(&(x + (y - x) * (i as f64 / 50.0))).is_some());
            if visible {
                assert!(ratio <= d.constant + 1e-12, "{ratio}");
            }
            tested += 1;
        }
    }

    #[test]
    fn mismatched_kites_are_refused() {
        let s = octagon(1.0).unwrap();
        let base = base_between(&s, 0, 0).unwrap();
        let small = build_diamond(&s, &base, 0.1).unwrap();
        let big = build_diamond(&s, &base, 0.2).unwrap();
        assert!(lipschitz_distortion(&s, &big, &small).is_err());
    }
}

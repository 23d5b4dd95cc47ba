use conesys::decompose::decompose;
use conesys::generate::{octagon, torus};
use conesys::geodesic::{based_systole_at, systole};
use conesys::geom::Pt2;
use conesys::kite::{base_between, build_exact, excise, insert_kite, KiteInsertion};
use conesys::overlay::{overlay, OverlaySegment};
use conesys::surface::SingularityKind;
use conesys::{parse_surface, ConeSurface};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn sorted_angles(s: &ConeSurface) -> Vec<f64> {
    let mut v: Vec<f64> = s.cone_points().iter().map(|&v| s.angle(v)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn inserted(direction: f64, length: f64, frac: f64, h: f64) -> Option<(ConeSurface, usize, usize)> {
    let ins = KiteInsertion { vertex: 0, direction, length, a: frac * length, h };
    insert_kite(&octagon(1.0).unwrap(), &ins).ok().map(|r| (r.surface, r.p, r.q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_invariants(a in 0.5f64..2.0, b in 0.5f64..2.0, shear in -0.4f64..0.4, lambda in 0.2f64..5.0) {
        let s = torus(a, b, shear).unwrap();
        prop_assert!(s.validate().valid);
        prop_assert!(s.gauss_bonnet_residual().abs() < 1e-9);
        prop_assert_eq!(s.genus(), 1);
        let t = s.scaled(lambda).unwrap();
        prop_assert!((t.area() - lambda * lambda * s.area()).abs() < 1e-9 * t.area().max(1.0));
        for v in 0..s.num_vertices() {
            prop_assert!((t.angle(v) - s.angle(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn systole_scales_and_round_trips(side in 0.3f64..3.0, lambda in 0.2f64..5.0) {
        let s = octagon(side).unwrap();
        let (sys, lp) = systole(&s, 1e-9).unwrap();
        let (scaled, _) = systole(&s.scaled(lambda).unwrap(), 1e-9).unwrap();
        prop_assert!((scaled - lambda * sys).abs() < 1e-9 * scaled.max(1.0));
        let rotations = lp.rotations(&s);
        prop_assert!(rotations.iter().all(|r| r.left >= std::f64::consts::PI - 1e-9 && r.right >= std::f64::consts::PI - 1e-9));
        let back = parse_surface(&s.to_cfs()).unwrap();
        prop_assert!((back.area() - s.area()).abs() < 1e-9);
        prop_assert_eq!(sorted_angles(&back).len(), sorted_angles(&s).len());
        for (x, y) in sorted_angles(&back).iter().zip(sorted_angles(&s)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert!((systole(&back, 1e-9).unwrap().0 - sys).abs() < 1e-9);
    }

    #[test]
    fn insertion_keeps_curvature(dir in 0.0f64..TAU, length in 0.1f64..0.35, frac in 0.3f64..0.7, h in 0.005f64..0.03) {
        if let Some((s, p, q)) = inserted(dir, length, frac, h) {
            prop_assert!(s.validate().valid);
            prop_assert!(s.gauss_bonnet_residual().abs() < 1e-9);
            prop_assert_eq!(s.genus(), 2);
            prop_assert!(s.is_npc());
            prop_assert!(s.is_cone_point(p) && s.is_cone_point(q));
            let large = s.classify_singularities().iter().filter(|c| c.kind == SingularityKind::Large).count();
            prop_assert!(large <= 4 * (s.genus() - 1));
        }
    }

    #[test]
    fn overlay_preserves_the_metric(dir in 0.0f64..TAU, length in 0.05f64..1.5) {
        let s = octagon(1.0).unwrap();
        let seg = OverlaySegment::from_vertex(&s, 0, dir, length);
        if let Ok(ov) = overlay(&s, &[seg], &[]) {
            let t = &ov.surface;
            prop_assert!((t.area() - s.area()).abs() < 1e-9);
            prop_assert_eq!(t.genus(), s.genus());
            let (a, b) = (sorted_angles(t), sorted_angles(&s));
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            prop_assert!((systole(t, 1e-9).unwrap().0 - systole(&s, 1e-9).unwrap().0).abs() < 1e-9);
        }
    }

    #[test]
    fn based_systole_bounds_the_systole(tri in 0usize..6, u in 0.05f64..0.9, w in 0.05f64..0.9) {
        let s = octagon(1.0).unwrap();
        let l = s.layout(tri);
        let x = Pt2::from(l[0].coords + (l[1] - l[0]) * u + (l[2] - l[0]) * (w * (1.0 - u)));
        let sys = systole(&s, 1e-9).unwrap().0;
        prop_assert!(based_systole_at(&s, tri, x, 1e-9).unwrap() >= sys - 1e-9);
    }

    #[test]
    fn excision_invariants(dir in 0.0f64..TAU, length in 0.15f64..0.35, frac in 0.35f64..0.65, h in 0.01f64..0.03, wf in 0.05f64..0.95) {
        if let Some((s, p, q)) = inserted(dir, length, frac, h) {
            let Ok(base) = base_between(&s, p, q) else { return Ok(()) };
            let Ok(k) = build_exact(&s, &base, wf * 2.0 * h) else { return Ok(()) };
            let Ok(r) = excise(&s, &k) else { return Ok(()) };
            let t = &r.surface;
            prop_assert_eq!(t.genus(), s.genus());
            prop_assert!(t.is_npc());
            prop_assert!(t.gauss_bonnet_residual().abs() < 1e-9);
            prop_assert!((s.area() - t.area() - r.removed_area).abs() < 1e-9);
            let lhs = r.angle_p.1 + r.angle_q.1 + r.angle_r;
            let rhs = r.angle_p.0 + r.angle_q.0 + TAU;
            prop_assert!((lhs - rhs).abs() < 1e-9, "{} against {}", lhs, rhs);
            prop_assert!(systole(t, 1e-9).unwrap().0 <= systole(&s, 1e-9).unwrap().0 + 1e-9);
        }
    }

    #[test]
    fn decomposition_conserves_area(dir in 0.0f64..TAU, length in 0.15f64..0.35, frac in 0.35f64..0.65, h in 0.01f64..0.03) {
        if let Some((s, _, _)) = inserted(dir, length, frac, h) {
            let dec = decompose(&s, 1e-9).unwrap();
            let domains: f64 = dec.domains.iter().map(|d| d.area).sum();
            prop_assert!((dec.systolic_area + domains - s.area()).abs() < 1e-6);
            for c in &dec.classes {
                prop_assert!((c.length - dec.systole).abs() <= 1e-9);
            }
        }
    }
}

use conesys::bounds::bounds;
use conesys::extremal::genus_two_sigma_bound;
use conesys::generate::{four_cylinder, octagon};
use conesys::geodesic::systole;
use conesys::structure::{loops_meet, systolic_loops, Intersection};
use std::f64::consts::PI;

#[test]
fn counting_bounds_match_frozen_values() {
    // (g, x, Q, Q̄, N, N0), evaluated independently
    let table: [(u64, u64, u128, u128, u128, u128); 4] = [
        (2, 24, 880, 912, 3_326_976, 16_634_880),
        (3, 80, 4046, 4174, 69_689_104, 348_445_520),
        (10, 1368, 114_012, 116_604, 54_385_971_264, 271_929_856_320),
        (1000, 15_976_008, 3_058_370_749, 3_090_306_781, 38_199_984_002_778_327_844, 190_999_920_013_891_639_220),
    ];
    for (g, x, q, q_bar, n, n0) in table {
        let b = bounds(g).unwrap();
        assert_eq!((b.x, b.q, b.q_bar, b.n, b.n0), (x, q, q_bar, n, n0), "genus {g}");
    }
    let b = bounds(2).unwrap();
    assert!((b.chain - 880.312800138462).abs() < 1e-9);
    assert!((b.q_stated_log2 - 2048.0).abs() < 1e-9);
    assert!((b.n0_stated_log2 - 536_870_912.0).abs() < 1e-3);
}

#[test]
fn genus_two_sigma_constant() {
    assert!((genus_two_sigma_bound() - 1.2426406871192852).abs() < 1e-15);
}

#[test]
fn regular_octagon_surface() {
    let s = octagon(1.0).unwrap();
    assert_eq!(s.genus(), 2);
    assert!((s.area() - 2.0 * (1.0 + 2f64.sqrt())).abs() < 1e-12);
    let cones = s.cone_points();
    assert_eq!(cones.len(), 1);
    assert!((s.angle(cones[0]) - 6.0 * PI).abs() < 1e-9);
}

#[test]
fn four_cylinder_surface_has_loops_meeting_twice() {
    let s = four_cylinder(PI / 4.0).unwrap();
    assert_eq!(s.genus(), 3);
    assert!(s.is_npc());
    assert!(s.cone_points().iter().all(|&v| (s.angle(v) - 4.0 * PI).abs() < 1e-9));
    let (sys, _) = systole(&s, 1e-9).unwrap();
    let loops = systolic_loops(&s, sys, 1e-9).unwrap();
    let twice = (0..loops.len())
        .flat_map(|i| (i + 1..loops.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| !loops[i].same_trace(&s, &loops[j]))
        .any(|(i, j)| matches!(loops_meet(&s, &loops[i], &loops[j]), Ok(Intersection::TwoPoints { .. })));
    assert!(twice);
}

#[test]
fn short_cylinders_are_refused() {
    assert!(four_cylinder(0.7).is_err());
}

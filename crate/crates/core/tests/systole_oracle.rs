mod common;

use common::{corpus, oracle_systole};
use conesys::geodesic::systole;

#[test]
fn corpus_matches_the_unfolding_oracle() {
    let mut checked = 0;
    for (name, s) in corpus() {
        if s.num_triangles() > 12 {
            continue;
        }
        let (fast, _) = systole(&s, 1e-9).unwrap();
        let slow = oracle_systole(&s);
        assert!((fast - slow).abs() < 1e-9, "{name}: {fast} against {slow}");
        checked += 1;
    }
    assert!(checked >= 3);
}

#[test]
fn square_torus_is_exactly_one() {
    let s = conesys::generate::torus(1.0, 1.0, 0.0).unwrap();
    assert_eq!(systole(&s, 1e-9).unwrap().0, 1.0);
    assert!((oracle_systole(&s) - 1.0).abs() < 1e-12);
}

#[test]
fn larger_corpus_surfaces_match_too() {
    for (name, s) in corpus().into_iter().filter(|(_, s)| s.num_triangles() > 12) {
        let (fast, _) = systole(&s, 1e-9).unwrap();
        let slow = oracle_systole(&s);
        assert!((fast - slow).abs() < 1e-9, "{name}: {fast} against {slow}");
    }
}

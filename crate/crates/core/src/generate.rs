//! Corpus generators.

use crate::error::{Error, Result};
use crate::kite::{insert_kite, KiteInsertion};
use crate::surface::{ConeSurface, EdgeRef};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Named surface families used for testing and for the CLI `gen` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Torus { a: f64, b: f64, shear: f64 },
    Octagon { side: f64 },
    /// Doubled four-holed sphere: four flat cylinders of circumference π.
    #[serde(rename = "example-4-10")]
    FourCylinder { height: f64 },
    /// A base surface with kites glued in one after another.
    Perturbed { base: Box<GeneratorSpec>, kites: Vec<KiteInsertion> },
}

pub fn generate(spec: &GeneratorSpec) -> Result<ConeSurface> {
    match spec {
        GeneratorSpec::Torus { a, b, shear } => torus(*a, *b, *shear),
        GeneratorSpec::Octagon { side } => octagon(*side),
        GeneratorSpec::FourCylinder { height } => four_cylinder(*height),
        GeneratorSpec::Perturbed { base, kites } => perturbed(&generate(base)?, kites),
    }
}

/// Inserts the kites in order. Vertex ids refer to the surface at the
/// time of each insertion.
pub fn perturbed(base: &ConeSurface, kites: &[KiteInsertion]) -> Result<ConeSurface> {
    let mut s = base.clone();
    for k in kites {
        s = insert_kite(&s, k)?.surface;
    }
    Ok(s)
}

/// Axis-parallel rectangles, two triangles each. `pairs` glue sides
/// given as (rectangle, side) with sides 0 bottom, 1 right, 2 top, 3 left.
fn rectangles(sizes: &[(f64, f64)], pairs: &[((usize, u8), (usize, u8))]) -> Result<ConeSurface> {
    let mut lengths = Vec::new();
    let mut glue = Vec::new();
    for (r, &(w, h)) in sizes.iter().enumerate() {
        let d = w.hypot(h);
        lengths.push([w, h, d]);
        lengths.push([d, w, h]);
        glue.push((e(2 * r, 2), e(2 * r + 1, 0)));
    }
    let side = |(r, k): (usize, u8)| match k {
        0 => e(2 * r, 0),
        1 => e(2 * r, 1),
        2 => e(2 * r + 1, 1),
        _ => e(2 * r + 1, 2),
    };
    for &(a, b) in pairs {
        glue.push((side(a), side(b)));
    }
    ConeSurface::from_pairs(lengths, &glue)
}

/// Genus two: two unit cylinders joined through a cylinder of
/// circumference 2 and the given height.
pub fn three_cylinders(height: f64) -> Result<ConeSurface> {
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::InvalidArgument("height must be positive".into()));
    }
    // 0 on top of 1, 1 beside 2, 3 below 2
    let sizes = [(1.0, 1.0), (1.0, height), (1.0, height), (1.0, 1.0)];
    let pairs = [
        ((0, 1), (0, 3)),
        ((1, 1), (2, 3)),
        ((2, 1), (1, 3)),
        ((3, 1), (3, 3)),
        ((0, 2), (1, 0)),
        ((1, 2), (0, 0)),
        ((2, 2), (3, 0)),
        ((3, 2), (2, 0)),
    ];
    rectangles(&sizes, &pairs)
}

fn e(t: usize, k: u8) -> EdgeRef {
    EdgeRef::new(t, k)
}

/// Flat torus spanned by `(a, 0)` and `(shear, b)`.
pub fn torus(a: f64, b: f64, shear: f64) -> Result<ConeSurface> {
    if !(a > 0.0 && b > 0.0 && shear.is_finite()) {
        return Err(Error::InvalidArgument("torus needs a > 0, b > 0".into()));
    }
    let v = (shear * shear + b * b).sqrt();
    let d = ((a + shear).powi(2) + b * b).sqrt();
    // T0 = (0, u, u+v), T1 = (0, u+v, v)
    let lengths = vec![[a, v, d], [d, a, v]];
    ConeSurface::from_pairs(
        lengths,
        &[(e(0, 2), e(1, 0)), (e(0, 0), e(1, 1)), (e(0, 1), e(1, 2))],
    )
}

/// Regular octagon of the given side with opposite sides glued by
/// translation, triangulated as a fan from one corner.
pub fn octagon(side: f64) -> Result<ConeSurface> {
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::InvalidArgument("octagon side must be positive".into()));
    }
    let radius = side / (2.0 * (PI / 8.0).sin());
    let chord = |k: usize| 2.0 * radius * (k as f64 * PI / 8.0).sin();
    // triangle i-1 has corners (P0, Pi, Pi+1), i = 1..=6
    let mut lengths = Vec::new();
    for i in 1..=6usize {
        lengths.push([chord(i), side, chord(i + 1)]);
    }
    lengths[0][0] = side;
    lengths[5][2] = side;
    let side_edge = |k: usize| -> EdgeRef {
        match k {
            0 => e(0, 0),
            7 => e(5, 2),
            k => e(k - 1, 1),
        }
    };
    let mut pairs = Vec::new();
    for i in 2..=6usize {
        pairs.push((e(i - 2, 2), e(i - 1, 0)));
    }
    for k in 0..4 {
        pairs.push((side_edge(k), side_edge(k + 4)));
    }
    ConeSurface::from_pairs(lengths, &pairs)
}

/// Four flat cylinders of circumference π and height `2h`, each attached
/// along a pair of meridians (length π/2) of two theta graphs. Every cylinder
/// bottom runs along meridian `m_i` and back along `m_{i+1}`; the tops do the
/// same on the second copy. The result has genus 3 and four cone points of
/// total angle 4π (the former poles of both halves).
pub fn four_cylinder(h: f64) -> Result<ConeSurface> {
    if !(h >= PI / 4.0 - 1e-12 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "cylinder altitude {h} must be at least π/4"
        )));
    }
    let w = PI / 2.0;
    let ht = 2.0 * h;
    let diag = (w * w + ht * ht).sqrt();
    let mut lengths = Vec::new();
    // per cylinder i, four triangles over [0,w] and [w,2w]:
    //   A (bottom-left, bottom-right, top-right), B (bottom-left, top-right, top-left)
    for _ in 0..4 {
        for _ in 0..2 {
            lengths.push([w, ht, diag]);
            lengths.push([diag, w, ht]);
        }
    }
    let tri = |cyl: usize, half: usize, which: usize| 4 * cyl + 2 * half + which;
    let mut pairs = Vec::new();
    for cyl in 0..4 {
        for half in 0..2 {
            // diagonal
            pairs.push((e(tri(cyl, half, 0), 2), e(tri(cyl, half, 1), 0)));
        }
        // interior vertical x = w: right side of half 0 with left side of half 1
        pairs.push((e(tri(cyl, 0, 0), 1), e(tri(cyl, 1, 1), 2)));
        // seam x = 2w with x = 0
        pairs.push((e(tri(cyl, 1, 0), 1), e(tri(cyl, 0, 1), 2)));
    }
    for cyl in 0..4 {
        let next = (cyl + 1) % 4;
        // bottom: half 0 is m_cyl (N->S), half 1 of cylinder `cyl` is m_next reversed
        pairs.push((e(tri(cyl, 1, 0), 0), e(tri(next, 0, 0), 0)));
        // top edges run right-to-left; the same pattern on the other copy
        pairs.push((e(tri(cyl, 1, 1), 1), e(tri(next, 0, 1), 1)));
    }
    ConeSurface::from_pairs(lengths, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::TAU;

    #[test]
    fn unit_torus() {
        let s = torus(1.0, 1.0, 0.0).unwrap();
        assert_eq!(s.genus(), 1);
        assert_eq!(s.num_vertices(), 1);
        assert!((s.area() - 1.0).abs() < 1e-12);
        assert!(s.cone_points().is_empty());
    }

    #[test]
    fn octagon_single_vertex() {
        let s = octagon(1.0).unwrap();
        assert_eq!(s.genus(), 2);
        assert_eq!(s.num_vertices(), 1);
        assert!((s.angle(0) - 3.0 * TAU).abs() < 1e-9);
        assert!((s.area() - 2.0 * (1.0 + 2f64.sqrt())).abs() < 1e-9);
        assert!(s.gauss_bonnet_residual().abs() < 1e-9);
    }

    #[test]
    fn four_cylinder_surface() {
        let s = four_cylinder(PI / 4.0).unwrap();
        assert_eq!(s.genus(), 3);
        let cones = s.cone_points();
        assert_eq!(cones.len(), 4);
        for v in cones {
            assert!((s.angle(v) - 2.0 * TAU).abs() < 1e-9);
        }
        assert!((s.area() - 8.0 * PI * PI / 4.0).abs() < 1e-9);
        assert!(four_cylinder(0.5).is_err());
    }

    #[test]
    fn three_cylinder_surface() {
        let s = three_cylinders(2.0).unwrap();
        assert_eq!(s.genus(), 2);
        assert!((s.area() - 6.0).abs() < 1e-12);
        assert!(s.gauss_bonnet_residual().abs() < 1e-9);
    }

    #[test]
    fn perturbed_spec_round_trips() {
        let spec = GeneratorSpec::Perturbed {
            base: Box::new(GeneratorSpec::Octagon { side: 1.0 }),
            kites: vec![KiteInsertion { vertex: 0, direction: 0.3, length: 0.3, a: 0.15, h: 0.02 }],
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let s = generate(&spec).unwrap();
        assert_eq!(s.cone_points().len(), 3);
    }
}

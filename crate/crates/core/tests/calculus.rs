use nalgebra::Vector3;
use proptest::prelude::*;
use zbw_core::fieldcalc::{curl, divergence, gradient, laplacian, Grid, NodeMask, ScalarField, VectorField3};
use zbw_core::numeric::convergence_slope;

fn interior_max(values: impl Iterator<Item = f64>, grid: &Grid) -> f64 {
    let mask = NodeMask::interior(grid, 1);
    values
        .enumerate()
        .filter(|(i, _)| mask.is_valid(*i))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

#[test]
fn gradient_and_laplacian_converge_at_second_order() {
    let f = |p: [f64; 3]| (p[0]).sin() * (2.0 * p[1]).cos();
    let mut hs = Vec::new();
    let (mut grad_err, mut lap_err) = (Vec::new(), Vec::new());
    for n in [33, 65, 129] {
        let grid = Grid::square(n, -2.0, 2.0).unwrap();
        let field = ScalarField::from_fn(grid, f);
        let g = gradient(&field);
        let l = laplacian(&field);
        let ge = g.values().iter().enumerate().map(|(i, v)| {
            let [x, y, _] = grid.position(i);
            (v - Vector3::new(x.cos() * (2.0 * y).cos(), -2.0 * x.sin() * (2.0 * y).sin(), 0.0)).norm()
        });
        let le = l
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v + 5.0 * f(grid.position(i)));
        grad_err.push(interior_max(ge, &grid));
        lap_err.push(interior_max(le, &grid));
        hs.push(grid.spacing()[0]);
    }
    assert!(convergence_slope(&hs, &grad_err).unwrap() > 1.9);
    assert!(convergence_slope(&hs, &lap_err).unwrap() > 1.9);
}

#[test]
fn quadratic_fields_are_differentiated_exactly() {
    let grid = Grid::cube(9, -1.0, 1.0).unwrap();
    let field = ScalarField::from_fn(grid, |p| p[0] * p[0] + 3.0 * p[1] * p[2] - p[2]);
    let lap = laplacian(&field);
    assert!(interior_max(lap.values().iter().map(|v| v - 2.0), &grid) < 1e-12);
    let v = VectorField3::from_fn(grid, |p| Vector3::new(p[0] * p[1], p[1] * p[2], p[2] * p[2]));
    let div = divergence(&v);
    let err = div.values().iter().enumerate().map(|(i, d)| {
        let [_, y, z] = grid.position(i);
        d - (y + z + 2.0 * z)
    });
    assert!(interior_max(err, &grid) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn curl_of_gradient_vanishes(a in -2.0..2.0f64, b in -2.0..2.0f64, c in 0.5..3.0f64) {
        let grid = Grid::cube(10, -1.0, 1.0).unwrap();
        let field = ScalarField::from_fn(grid, |p| (a * p[0] + b * p[1]).sin() * (c * p[2]).cos());
        let cg = curl(&gradient(&field));
        let m = NodeMask::interior(&grid, 2);
        let worst = (0..grid.len()).filter(|&i| m.is_valid(i)).map(|i| cg.values()[i].norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12, "curl grad = {worst}");
    }

    #[test]
    fn divergence_of_curl_vanishes(a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let grid = Grid::cube(10, -1.0, 1.0).unwrap();
        let v = VectorField3::from_fn(grid, |p| {
            Vector3::new((a * p[1]).sin(), p[0] * p[2] * b, (p[0] + b * p[1]).cos())
        });
        let dc = divergence(&curl(&v));
        let m = NodeMask::interior(&grid, 2);
        let worst = (0..grid.len()).filter(|&i| m.is_valid(i)).map(|i| dc.values()[i].abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12, "div curl = {worst}");
    }
}

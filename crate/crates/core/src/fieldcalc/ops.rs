use std::ops::{Add, Mul, Sub};

use super::{Grid, ScalarField, VectorField3};

/// First derivative along `axis`: central differences inside, second-order
/// one-sided stencils on the two end nodes. Zero along inactive axes.
pub fn partial<T>(grid: &Grid, values: &[T], axis: usize) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    debug_assert_eq!(values.len(), grid.len());
    if !grid.is_active(axis) {
        return vec![T::default(); values.len()];
    }
    let n = grid.dims()[axis];
    let s = grid.strides()[axis];
    let inv2h = 0.5 / grid.spacing()[axis];
    (0..values.len())
        .map(|idx| {
            let c = (idx / s) % n;
            let f = |k: isize| values[(idx as isize + k * s as isize) as usize];
            if c == 0 {
                (f(1) * 4.0 - f(0) * 3.0 - f(2)) * inv2h
            } else if c == n - 1 {
                (f(0) * 3.0 - f(-1) * 4.0 + f(-2)) * inv2h
            } else {
                (f(1) - f(-1)) * inv2h
            }
        })
        .collect()
}

/// Second derivative along `axis`: three-point stencil inside, four-point
/// second-order one-sided stencil on the end nodes.
pub fn second_partial<T>(grid: &Grid, values: &[T], axis: usize) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    if !grid.is_active(axis) {
        return vec![T::default(); values.len()];
    }
    let n = grid.dims()[axis];
    let s = grid.strides()[axis];
    let h = grid.spacing()[axis];
    let inv_h2 = 1.0 / (h * h);
    (0..values.len())
        .map(|idx| {
            let c = (idx / s) % n;
            let f = |k: isize| values[(idx as isize + k * s as isize) as usize];
            if c == 0 {
                (f(0) * 2.0 - f(1) * 5.0 + f(2) * 4.0 - f(3)) * inv_h2
            } else if c == n - 1 {
                (f(0) * 2.0 - f(-1) * 5.0 + f(-2) * 4.0 - f(-3)) * inv_h2
            } else {
                (f(1) - f(0) * 2.0 + f(-1)) * inv_h2
            }
        })
        .collect()
}

pub fn gradient(f: &ScalarField) -> VectorField3 {
    let g = f.grid();
    let c = [0, 1, 2].map(|a| partial(g, f.values(), a));
    VectorField3::from_components(*g, c)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let mut acc = vec![0.0; g.len()];
    for a in (0..3).filter(|&a| g.is_active(a)) {
        for (o, d) in acc.iter_mut().zip(second_partial(g, f.values(), a)) {
            *o += d;
        }
    }
    ScalarField::new(*g, acc).expect("length preserved")
}

pub fn divergence(v: &VectorField3) -> ScalarField {
    let g = v.grid();
    let mut acc = vec![0.0; g.len()];
    for a in (0..3).filter(|&a| g.is_active(a)) {
        for (o, d) in acc.iter_mut().zip(partial(g, &v.component(a), a)) {
            *o += d;
        }
    }
    ScalarField::new(*g, acc).expect("length preserved")
}

pub fn curl(v: &VectorField3) -> VectorField3 {
    let g = v.grid();
    let comp = [0, 1, 2].map(|a| v.component(a));
    // d[i][j] = d v_i / d x_j
    let d = |i: usize, j: usize| partial(g, &comp[i], j);
    let (dzy, dyz) = (d(2, 1), d(1, 2));
    let (dxz, dzx) = (d(0, 2), d(2, 0));
    let (dyx, dxy) = (d(1, 0), d(0, 1));
    let n = g.len();
    let cx = (0..n).map(|i| dzy[i] - dyz[i]).collect();
    let cy = (0..n).map(|i| dxz[i] - dzx[i]).collect();
    let cz = (0..n).map(|i| dyx[i] - dxy[i]).collect();
    VectorField3::from_components(*g, [cx, cy, cz])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcalc::{NodeMask, Norms, BOUNDARY_LAYER};
    use nalgebra::Vector3;

    fn square(n: usize) -> Grid {
        Grid::square(n, -1.0, 1.0).unwrap()
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let f = ScalarField::constant(square(9), 3.5);
        assert!(gradient(&f).values().iter().all(|v| v.norm() == 0.0));
        assert!(laplacian(&f).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_exact_for_affine() {
        let g = Grid::cube(7, -1.0, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |p| 0.3 * p[0] - 1.7 * p[1] + 2.2 * p[2] + 5.0);
        for v in gradient(&f).values() {
            assert!((v - Vector3::new(0.3, -1.7, 2.2)).norm() < 1e-12);
        }
    }

    #[test]
    fn laplacian_exact_for_quadratic() {
        let f = ScalarField::from_fn(square(11), |p| p[0] * p[0] + p[1] * p[1]);
        for &v in laplacian(&f).values() {
            assert!((v - 4.0).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn rotation_field_curl_and_divergence() {
        let g = Grid::cube(9, -1.0, 1.0).unwrap();
        let rot = VectorField3::from_fn(g, |p| Vector3::new(-p[1], p[0], 0.0));
        for c in curl(&rot).values() {
            assert!((c - Vector3::new(0.0, 0.0, 2.0)).norm() < 1e-10);
        }
        let radial = VectorField3::from_fn(g, |p| Vector3::new(p[0], p[1], p[2]));
        for &d in divergence(&radial).values() {
            assert!((d - 3.0).abs() < 1e-10);
        }
        let c = VectorField3::constant(g, Vector3::new(1.0, -2.0, 3.0));
        assert!(curl(&c).values().iter().all(|v| v.norm() < 1e-12));
        assert!(divergence(&c).values().iter().all(|v| v.abs() < 1e-12));
    }

    fn gaussian_error(n: usize) -> (f64, f64, f64) {
        let s2 = 0.09_f64;
        let g = Grid::line(n, -1.5, 1.5).unwrap();
        let f = ScalarField::from_fn(g, |p| (-p[0] * p[0] / (2.0 * s2)).exp());
        let mask = NodeMask::all(&g);
        let grad_err = ScalarField::from_fn(g, |p| -p[0] / s2 * (-p[0] * p[0] / (2.0 * s2)).exp())
            .zip_with(&ScalarField::new(g, gradient(&f).component(0)).unwrap(), |a, b| a - b)
            .unwrap();
        let lap_err = ScalarField::from_fn(g, |p| {
            (p[0] * p[0] / (s2 * s2) - 1.0 / s2) * (-p[0] * p[0] / (2.0 * s2)).exp()
        })
        .zip_with(&laplacian(&f), |a, b| a - b)
        .unwrap();
        (
            g.max_spacing(),
            Norms::of_scalar(&grad_err, &mask).max,
            Norms::of_scalar(&lap_err, &mask).max,
        )
    }

    #[test]
    fn gaussian_derivatives_converge_second_order() {
        let runs: Vec<_> = [41, 81, 161].iter().map(|&n| gaussian_error(n)).collect();
        let h: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let eg: Vec<f64> = runs.iter().map(|r| r.1).collect();
        let el: Vec<f64> = runs.iter().map(|r| r.2).collect();
        let sg = crate::numeric::convergence_slope(&h, &eg).unwrap();
        let sl = crate::numeric::convergence_slope(&h, &el).unwrap();
        assert!(sg >= 1.9, "gradient slope {sg}");
        assert!(sl >= 1.9, "laplacian slope {sl}");
    }

    #[test]
    fn curl_of_scalar_times_zhat() {
        // v = rho(x, y) z^  =>  curl v = (d_y rho, -d_x rho, 0)
        let g = Grid::square(81, -2.0, 2.0).unwrap();
        let rho = |x: f64, y: f64| (-(x * x + 2.0 * y * y)).exp();
        let v = VectorField3::from_fn(g, |p| Vector3::new(0.0, 0.0, rho(p[0], p[1])));
        let c = curl(&v);
        let mask = NodeMask::interior(&g, BOUNDARY_LAYER);
        let err: Vec<f64> = (0..g.len())
            .map(|i| {
                let p = g.position(i);
                let r = rho(p[0], p[1]);
                let exact = Vector3::new(-4.0 * p[1] * r, 2.0 * p[0] * r, 0.0);
                (c.values()[i] - exact).norm()
            })
            .collect();
        let max = Norms::of(&err, &mask, g.cell_volume()).max;
        assert!(max < 2e-2, "{max}");
    }
}

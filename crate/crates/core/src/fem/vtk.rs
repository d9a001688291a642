//! Legacy-VTK ASCII and CSV dumps on the P-node lattice.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::fem::mesh::{ObstacleQuadrature, StripMesh};
use crate::model::MaterialField;

/// Cell-averaged ρ spread to lattice nodes (mean over adjacent elements).
pub fn nodal_rho(mesh: &StripMesh, quad: &ObstacleQuadrature, rho: &MaterialField) -> Vec<f64> {
    let mut num = vec![0.0; mesh.num_nodes()];
    let mut den = vec![0.0; mesh.num_nodes()];
    let area = mesh.element_area();
    for e in 0..mesh.num_elements() {
        for &n in mesh.element_nodes(e) {
            den[n] += area;
        }
    }
    let nq = quad.points_per_element();
    for (t, &e) in quad.elements().iter().enumerate() {
        let s: f64 = (0..nq).map(|q| quad.weights()[t * nq + q] * rho.values()[t * nq + q]).sum();
        for &n in mesh.element_nodes(e) {
            num[n] += s;
        }
    }
    num.iter().zip(&den).map(|(a, b)| a / b).collect()
}

/// Structured grid with point fields "rho", "re_u", "im_u".
pub fn structured_grid(title: &str, mesh: &StripMesh, rho: &[f64], u: &[Complex64]) -> String {
    let (lx, ly) = mesh.lattice();
    let n = lx * ly;
    assert_eq!(rho.len(), n);
    assert_eq!(u.len(), n);
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.replace('\n', " "));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_GRID");
    let _ = writeln!(s, "DIMENSIONS {lx} {ly} 1");
    let _ = writeln!(s, "POINTS {n} double");
    let order: Vec<usize> = (0..ly).flat_map(|j| (0..lx).map(move |i| (i, j))).map(|(i, j)| mesh.node_index(i, j)).collect();
    for &idx in &order {
        let p = mesh.node(idx);
        let _ = writeln!(s, "{:.12e} {:.12e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    let scalar = |s: &mut String, name: &str, f: &dyn Fn(usize) -> f64| {
        let _ = writeln!(s, "SCALARS {name} double 1");
        let _ = writeln!(s, "LOOKUP_TABLE default");
        for &idx in &order {
            let _ = writeln!(s, "{:.12e}", f(idx));
        }
    };
    scalar(&mut s, "rho", &|i| rho[i]);
    scalar(&mut s, "re_u", &|i| u[i].re);
    scalar(&mut s, "im_u", &|i| u[i].im);
    s
}

/// CSV fallback with columns x,y,rho,re_u,im_u.
pub fn lattice_csv(mesh: &StripMesh, rho: &[f64], u: &[Complex64]) -> String {
    let mut s = String::from("x,y,rho,re_u,im_u\n");
    for idx in 0..mesh.num_nodes() {
        let p = mesh.node(idx);
        let _ = writeln!(s, "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}", p[0], p[1], rho[idx], u[idx].re, u[idx].im);
    }
    s
}

use std::f64::consts::TAU;
use std::sync::OnceLock;

use cloak_core::constraints::Partition;
use cloak_core::fem::band::BandMatrix;
use cloak_core::fem::Discretization;
use cloak_core::invisibility::{kernel_element, FunctionalSpec, GramBasis, Reference, Variant};
use cloak_core::model::modes::branch_sqrt;
use cloak_core::model::{MaterialField, Region, ScatteringMatrix, Shape, WaveguideConfig};
use cloak_core::oracles::{slab_scattering_1d, unitary_symmetric_2x2};
use cloak_core::scattering::{FieldBundle, Scatterer};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

/// Small two-mode problem shared by the field-dependent properties.
fn bundle() -> &'static FieldBundle {
    static B: OnceLock<FieldBundle> = OnceLock::new();
    B.get_or_init(|| {
        let o = Region::new(vec![Shape::rectangle(-0.8, 0.8, 0.0, 1.0)]);
        let cfg = WaveguideConfig::new(4.0, 1.5, o);
        let sc = Scatterer::new(&cfg, Discretization { nx: 60, ny: 12, order: 2, dtn_terms: 8 }).unwrap();
        let rho = sc.sample(|x, y| 0.3 * (2.0 * x).cos() + 0.2 * y);
        sc.scattering_matrix(&rho).unwrap()
    })
}

/// Smooth field from six coefficients.
fn field(c: &[f64]) -> MaterialField {
    bundle().quadrature().sample(|x, y| c[0] + c[1] * x + c[2] * y + c[3] * x * y + c[4] * (3.0 * x).sin() + c[5] * y * y)
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 6)
}

fn cplx() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn matrix(n: usize) -> impl Strategy<Value = ScatteringMatrix> {
    prop::collection::vec(cplx(), 4 * n * n)
        .prop_map(move |v| ScatteringMatrix::new(n, DMatrix::from_vec(2 * n, 2 * n, v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_is_linear(a in coeffs(), b in coeffs(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let (fa, fb) = (field(&a), field(&b));
        let combo = &fa.scaled(s) + &fb.scaled(t);
        let lhs = bundle().differential(&combo);
        let rhs = bundle().differential(&fa).entries() * Complex64::from(s) + bundle().differential(&fb).entries() * Complex64::from(t);
        let scale = 1.0 + rhs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        prop_assert!((lhs.entries() - rhs).iter().all(|z| z.norm() < 1e-12 * scale));
    }

    #[test]
    fn differential_is_symmetric(a in coeffs()) {
        let d = bundle().differential(&field(&a));
        prop_assert!(d.symmetry_residual() < 1e-14);
    }

    #[test]
    fn functionals_are_real_linear(s1 in matrix(2), s2 in matrix(2), a in -3.0f64..3.0) {
        for v in [Variant::ReflectionOnly, Variant::FullInvisibility, Variant::SingleModeEnergy(1), Variant::SingleModePhase(0)] {
            let f = FunctionalSpec::new(v, 2).unwrap();
            let combo = ScatteringMatrix::new(2, s1.entries() * Complex64::from(a) + s2.entries());
            let lhs = f.evaluate(&combo).unwrap();
            let (f1, f2) = (f.evaluate(&s1).unwrap(), f.evaluate(&s2).unwrap());
            for i in 0..lhs.len() {
                prop_assert!((lhs[i] - (a * f1[i] + f2[i])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn densities_reproduce_differential(a in coeffs()) {
        let b = bundle();
        let mu = field(&a);
        let f = FunctionalSpec::new(Variant::FullInvisibility, b.n()).unwrap();
        let direct = f.evaluate(&b.differential(&mu)).unwrap();
        let dens = f.densities(b).unwrap();
        for (d, g) in direct.iter().zip(&dens) {
            prop_assert!((d - b.quadrature().inner(&mu, g)).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_basis_is_a_right_inverse(seed in coeffs()) {
        let b = bundle();
        let q = b.quadrature();
        let f = FunctionalSpec::new(Variant::ReflectionOnly, b.n()).unwrap();
        let basis = GramBasis::from_densities(f.densities(b).unwrap(), q, None).unwrap();
        prop_assert!(basis.right_inverse_residual(q) < 1e-9);
        let mu0 = kernel_element(&basis, &field(&seed), q).unwrap();
        let lin = basis.linearization(&mu0, q);
        prop_assert!(lin.iter().all(|v| v.abs() < 1e-9 * (1.0 + q.l2_norm(&mu0))));
    }

    #[test]
    fn relative_functionals_vanish_at_reference(t in 0.0f64..1.0, a in 0.0f64..TAU, c in 0.0f64..TAU, neg: bool) {
        let s0 = unitary_symmetric_2x2(t, a, c, neg);
        prop_assert!(s0.unitarity_residual() < 1e-12 && s0.symmetry_residual() < 1e-15);
        let generic = FunctionalSpec::relative(Variant::RelativeGeneric, &s0).unwrap();
        prop_assert!(generic.evaluate(&s0).unwrap().iter().all(|x| x.abs() < 1e-12));
        let s00 = unitary_symmetric_2x2(0.0, a, c, neg);
        let tzero = FunctionalSpec::relative(Variant::RelativeTZero, &s00).unwrap();
        prop_assert!(tzero.evaluate(&s00).unwrap().iter().all(|x| x.abs() < 1e-12));
        let rt = FunctionalSpec::relative(Variant::RelativeRealT, &s0).unwrap();
        let r = Reference::from_matrix(&s0).unwrap();
        let e = rt.evaluate(&s0).unwrap();
        prop_assert!((e[2] - r.t.im).abs() < 1e-15);
    }

    #[test]
    fn projection_is_idempotent(a in coeffs(), cut in -0.6f64..0.6) {
        let q = bundle().quadrature();
        let p = Partition::new(
            vec![(1, Shape::rectangle(-0.8, cut, 0.0, 1.0)), (2, Shape::rectangle(cut, 0.8, 0.0, 0.5)), (3, Shape::rectangle(cut, 0.8, 0.5, 1.0))],
            q,
        ).unwrap();
        let f = field(&a);
        let pf = p.project(&f, q);
        prop_assert!((&p.project(&pf, q) - &pf).norm_inf() < 1e-12);
        prop_assert_eq!(p.within_cell_spread(&pf), 0.0);
        prop_assert!((p.areas().iter().sum::<f64>() - q.measure()).abs() < 1e-12);
        // residual orthogonal to every indicator
        let r = &f - &pf;
        for s in 0..p.len() {
            let psi = p.field_from_cells(&(0..p.len()).map(|t| if t == s { 1.0 } else { 0.0 }).collect::<Vec<_>>());
            prop_assert!(q.inner(&r, &psi).abs() < 1e-12);
        }
    }

    #[test]
    fn slab_oracle_conserves_flux(k in 0.05f64..3.1, rho in -0.95f64..3.0, a in -2.0f64..0.0, w in 0.01f64..3.0) {
        let (r, t) = slab_scattering_1d(k, rho, a, a + w).unwrap();
        prop_assert!((r.norm_sqr() + t.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_sqrt_squares_back(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let g = Complex64::new(re, im);
        let s = branch_sqrt(g);
        prop_assert!((s * s - g).norm() < 1e-12 * (1.0 + g.norm()));
        prop_assert!(s.im >= 0.0);
    }

    #[test]
    fn band_solve_matches_dense(vals in prop::collection::vec(cplx(), 40 * 5), rhs in prop::collection::vec(cplx(), 40)) {
        let (n, kl, ku) = (40, 2, 2);
        let mut band = BandMatrix::zeros(n, kl, ku);
        let mut dense = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for (o, j) in (i.saturating_sub(kl)..=(i + ku).min(n - 1)).enumerate() {
                let v = vals[i * 5 + o] + if i == j { Complex64::from(4.0) } else { Complex64::from(0.0) };
                band.add(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let x = band.factorize().unwrap().solve(&rhs);
        let y = dense.lu().solve(&DVector::from_vec(rhs)).unwrap();
        prop_assert!(x.iter().zip(y.iter()).all(|(a, b)| (a - b).norm() < 1e-10));
    }
}

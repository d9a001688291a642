//! Scattering matrix of ρ from the discrete total fields.
//!
//! Two extraction routes are computed. The trace route reads the modal
//! coefficients on Σ_{±ℓ} through the same moments that build the DtN
//! terms; the volume route evaluates
//!
//!   S(ρ) = S(0) + ik² ∫ ρ U Wᵀ,
//!
//! with W the discrete fields of the empty guide. Both are congruently
//! normalised by the unitary factor V of the empty-guide trace matrix,
//! S_trace(0) = V J Vᵀ with J = (0 Id; Id 0), so that the discrete S(0)
//! equals J and ik² ∫ μ Ũ Ũᵀ is the exact derivative of the discrete map
//! ρ ↦ S(ρ).

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::{DiscreteField, Discretization, HelmholtzProblem, ObstacleQuadrature, StripMesh};
use crate::model::{Direction, MaterialField, ModeBasis, ScatteringMatrix, WaveguideConfig};

/// Solver context: the ρ-independent problem plus the empty-guide data.
#[derive(Debug)]
pub struct Scatterer {
    problem: HelmholtzProblem,
    raw_background: ScatteringMatrix,
    /// V^H, applied to raw fields.
    calibration: DMatrix<Complex64>,
    /// Calibrated empty-guide fields at the obstacle quadrature points.
    background_quad: Vec<Vec<Complex64>>,
}

/// The 2N total fields for one ρ together with its scattering matrix.
#[derive(Clone, Debug)]
pub struct FieldBundle {
    config: WaveguideConfig,
    modes: ModeBasis,
    mesh: Arc<StripMesh>,
    quad: Arc<ObstacleQuadrature>,
    rho: MaterialField,
    fields: Vec<DiscreteField>,
    quad_values: Vec<Vec<Complex64>>,
    s: ScatteringMatrix,
    s_trace: ScatteringMatrix,
    raw_trace: ScatteringMatrix,
}

impl Scatterer {
    pub fn new(config: &WaveguideConfig, disc: Discretization) -> Result<Self> {
        let problem = HelmholtzProblem::new(config, disc)?;
        let zero = problem.quadrature().zeros();
        let raw = problem.assemble(&zero)?.solve_all()?;
        let raw_background = trace_matrix(&problem, &raw);
        let calibration = unitary_factor(&raw_background)?.adjoint();
        let mesh = problem.mesh().clone();
        let quad = problem.quadrature().clone();
        let background_quad =
            combine(&calibration, &raw).iter().map(|c| quad.evaluate(&mesh, c)).collect();
        Ok(Scatterer { problem, raw_background, calibration, background_quad })
    }

    /// Default discretisation for the configuration.
    pub fn with_defaults(config: &WaveguideConfig) -> Result<Self> {
        Self::new(config, Discretization::default_for(config.ell))
    }

    pub fn problem(&self) -> &HelmholtzProblem {
        &self.problem
    }

    pub fn config(&self) -> &WaveguideConfig {
        self.problem.config()
    }

    pub fn modes(&self) -> &ModeBasis {
        self.problem.modes()
    }

    pub fn n(&self) -> usize {
        self.problem.modes().n()
    }

    pub fn mesh(&self) -> &Arc<StripMesh> {
        self.problem.mesh()
    }

    pub fn quadrature(&self) -> &Arc<ObstacleQuadrature> {
        self.problem.quadrature()
    }

    /// Uncalibrated trace-route matrix of the empty guide; its distance to J
    /// measures the discretisation error of the transparent boundaries.
    pub fn raw_background(&self) -> &ScatteringMatrix {
        &self.raw_background
    }

    /// Samples a function on the obstacle quadrature set.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> MaterialField {
        self.quadrature().sample(f)
    }

    pub fn zero_field(&self) -> MaterialField {
        self.quadrature().zeros()
    }

    /// Solves the 2N scattering problems for ρ and extracts S(ρ).
    pub fn scattering_matrix(&self, rho: &MaterialField) -> Result<FieldBundle> {
        let raw = self.problem.assemble(rho)?.solve_all()?;
        let raw_trace = trace_matrix(&self.problem, &raw);
        let n = self.n();
        let vh = &self.calibration;
        let s_trace = ScatteringMatrix::new(n, vh * raw_trace.entries() * vh.transpose());

        let mesh = self.mesh().clone();
        let quad = self.quadrature().clone();
        let coeffs = combine(vh, &raw);
        let fields: Vec<DiscreteField> = coeffs
            .into_iter()
            .zip(&raw)
            .map(|(c, f)| DiscreteField { coeffs: c, mesh: mesh.clone(), mode: f.mode, direction: f.direction })
            .collect();
        let quad_values: Vec<Vec<Complex64>> = fields.iter().map(|f| quad.evaluate(&mesh, &f.coeffs)).collect();

        let k2 = self.config().k * self.config().k;
        let mut s = ScatteringMatrix::transparent(n).into_entries();
        let w = quad.weights();
        let r = rho.values();
        for a in 0..2 * n {
            for b in 0..2 * n {
                let ua = &quad_values[a];
                let wb = &self.background_quad[b];
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..quad.len() {
                    if r[q] != 0.0 {
                        acc += ua[q] * wb[q] * (w[q] * r[q]);
                    }
                }
                s[(a, b)] += Complex64::i() * k2 * acc;
            }
        }
        Ok(FieldBundle {
            config: self.config().clone(),
            modes: self.modes().clone(),
            mesh,
            quad,
            rho: rho.clone(),
            fields,
            quad_values,
            s: ScatteringMatrix::new(n, s),
            s_trace,
            raw_trace,
        })
    }
}

/// Free-function form of [`Scatterer::scattering_matrix`].
pub fn scattering_matrix(scatterer: &Scatterer, rho: &MaterialField) -> Result<FieldBundle> {
    scatterer.scattering_matrix(rho)
}

/// Trace-route matrix S_{αβ} = i b_βᵀ u_α − δ_{αβ} e^{−2iβ_m ℓ}, where b_β is
/// the load vector of incident field β.
fn trace_matrix(problem: &HelmholtzProblem, fields: &[DiscreteField]) -> ScatteringMatrix {
    let n = problem.modes().n();
    let ell = problem.config().ell;
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for (a, u) in fields.iter().enumerate() {
        for b in 0..2 * n {
            let load = problem.load(b);
            let dtn = problem.dtn(if b < n { Direction::Minus } else { Direction::Plus });
            let mut acc = Complex64::new(0.0, 0.0);
            for &node in dtn.nodes() {
                acc += load[node] * u.coeffs[node];
            }
            s[(a, b)] = Complex64::i() * acc;
        }
        let m = a % n;
        s[(a, a)] -= (Complex64::new(0.0, -2.0) * problem.modes().beta(m) * ell).exp();
    }
    ScatteringMatrix::new(n, s)
}

/// Coefficient vectors of Σ_β C_{αβ} u_β.
fn combine(c: &DMatrix<Complex64>, fields: &[DiscreteField]) -> Vec<Vec<Complex64>> {
    let len = fields[0].coeffs.len();
    (0..fields.len())
        .map(|a| {
            let mut out = vec![Complex64::new(0.0, 0.0); len];
            for (b, f) in fields.iter().enumerate() {
                let cab = c[(a, b)];
                for (o, v) in out.iter_mut().zip(&f.coeffs) {
                    *o += cab * v;
                }
            }
            out
        })
        .collect()
}

/// Unitary V with S0 = V J Vᵀ, taken as the principal square root of S0 J.
fn unitary_factor(s0: &ScatteringMatrix) -> Result<DMatrix<Complex64>> {
    let j = ScatteringMatrix::transparent(s0.n()).into_entries();
    let sym = (s0.entries() + s0.entries().transpose()) * Complex64::new(0.5, 0.0);
    sqrtm(&(sym * j))
}

/// Principal square root by the Denman–Beavers iteration.
pub(crate) fn sqrtm(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<Complex64>::identity(n, n);
    let half = Complex64::new(0.5, 0.0);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().ok_or_else(|| Error::Solver("singular iterate in matrix square root".into()))?;
        let zi = z.clone().try_inverse().ok_or_else(|| Error::Solver("singular iterate in matrix square root".into()))?;
        let y1 = (&y + zi) * half;
        let z1 = (&z + yi) * half;
        let change = (&y1 - &y).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        y = y1;
        z = z1;
        if change < 1e-15 {
            return Ok(y);
        }
    }
    Err(Error::Solver("matrix square root did not converge".into()))
}

impl FieldBundle {
    pub fn config(&self) -> &WaveguideConfig {
        &self.config
    }

    pub fn modes(&self) -> &ModeBasis {
        &self.modes
    }

    pub fn k(&self) -> f64 {
        self.config.k
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn mesh(&self) -> &Arc<StripMesh> {
        &self.mesh
    }

    pub fn quadrature(&self) -> &Arc<ObstacleQuadrature> {
        &self.quad
    }

    pub fn rho(&self) -> &MaterialField {
        &self.rho
    }

    /// Scattering matrix from the volume formulas.
    pub fn s(&self) -> &ScatteringMatrix {
        &self.s
    }

    /// Scattering matrix read on the boundaries (cross-check).
    pub fn s_trace(&self) -> &ScatteringMatrix {
        &self.s_trace
    }

    /// Trace-route matrix before normalisation.
    pub fn raw_trace(&self) -> &ScatteringMatrix {
        &self.raw_trace
    }

    /// max |S_volume − S_trace|.
    pub fn extraction_mismatch(&self) -> f64 {
        self.s.max_abs_diff(&self.s_trace)
    }

    /// Fields ordered as the rows of S.
    pub fn fields(&self) -> &[DiscreteField] {
        &self.fields
    }

    /// Field values at the obstacle quadrature points.
    pub fn quad_values(&self) -> &[Vec<Complex64>] {
        &self.quad_values
    }

    /// Scattered part u_α − w_α evaluated at a point.
    pub fn scattered(&self, alpha: usize, x: f64, y: f64) -> Option<Complex64> {
        let f = &self.fields[alpha];
        Some(f.eval(x, y)? - self.modes.mode(f.mode, f.direction, x, y))
    }

    /// L²(Σ) norm of the scattered part of field α on x = ±ℓ.
    pub fn scattered_trace_norm(&self, alpha: usize, right: bool) -> f64 {
        let x = if right { self.config.ell } else { -self.config.ell };
        let ny = self.mesh.ny();
        let mut acc = 0.0;
        for e in 0..ny {
            let (y0, y1) = (e as f64 / ny as f64, (e + 1) as f64 / ny as f64);
            for (y, w) in crate::fem::quadrature::gauss_interval(6, y0, y1) {
                acc += w * self.scattered(alpha, x, y).map_or(0.0, |v| v.norm_sqr());
            }
        }
        acc.sqrt()
    }
}

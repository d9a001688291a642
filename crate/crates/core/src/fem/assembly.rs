//! Weak form of the truncated scattering problem
//!
//!   a(u, v) = ∫ ∇u·∇v − k²(1+ρ) u v − Σ_± ∫_{Σ±} Λ^±(u) v,
//!
//! complex bilinear (no conjugation), so the matrix is complex symmetric.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::band::{BandLu, BandMatrix};
use crate::fem::basis::{shape_gradients, shape_values};
use crate::fem::dtn::DtnOperator;
use crate::fem::mesh::{build_mesh, Discretization, ObstacleQuadrature, StripMesh, TriangleKind};
use crate::fem::quadrature::triangle_rule;
use crate::model::smatrix::field_index;
use crate::model::{Direction, MaterialField, ModeBasis, WaveguideConfig};

/// Discrete total field u_m^± on the strip.
#[derive(Clone, Debug)]
pub struct DiscreteField {
    pub coeffs: Vec<Complex64>,
    pub mesh: Arc<StripMesh>,
    pub mode: usize,
    pub direction: Direction,
}

impl DiscreteField {
    pub fn eval(&self, x: f64, y: f64) -> Option<Complex64> {
        self.mesh.evaluate(&self.coeffs, x, y)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Everything that does not depend on ρ: mesh, DtN maps, the ρ-free
/// matrix K − k²M − DtN and the incident load vectors.
#[derive(Clone, Debug)]
pub struct HelmholtzProblem {
    config: WaveguideConfig,
    disc: Discretization,
    modes: ModeBasis,
    mesh: Arc<StripMesh>,
    quad: Arc<ObstacleQuadrature>,
    dtn: [DtnOperator; 2],
    base: BandMatrix,
    loads: Arc<Vec<Vec<Complex64>>>,
}

/// Local stiffness and mass matrices of one triangle kind.
fn element_matrices(mesh: &StripMesh, kind: TriangleKind) -> (Vec<f64>, Vec<f64>) {
    let npe = mesh.nodes_per_element();
    let gl = mesh.barycentric_gradients(kind);
    let area = mesh.element_area();
    let mut k = vec![0.0; npe * npe];
    let mut m = vec![0.0; npe * npe];
    for (l, w) in triangle_rule() {
        let g = shape_gradients(mesh.order(), l, gl);
        let v = shape_values(mesh.order(), l);
        for a in 0..npe {
            for b in 0..npe {
                k[a * npe + b] += w * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                m[a * npe + b] += w * area * v[a] * v[b];
            }
        }
    }
    (k, m)
}

impl HelmholtzProblem {
    pub fn new(config: &WaveguideConfig, disc: Discretization) -> Result<Self> {
        let modes = config.validate()?;
        if disc.dtn_terms < modes.n() {
            return Err(Error::InvalidConfig(format!(
                "dtn_terms = {} is below the number of propagating modes {}",
                disc.dtn_terms,
                modes.n()
            )));
        }
        let mesh = Arc::new(build_mesh(config, disc.nx, disc.ny, disc.order)?);
        let quad = ObstacleQuadrature::new(&mesh, &config.obstacle);
        if quad.measure() <= 0.0 {
            return Err(Error::InvalidConfig("obstacle region misses every quadrature point".into()));
        }
        let k2 = config.k * config.k;
        let npe = mesh.nodes_per_element();
        let bw = mesh.bandwidth();
        let mut base = BandMatrix::zeros(mesh.num_nodes(), bw, bw);

        let local = [element_matrices(&mesh, TriangleKind::A), element_matrices(&mesh, TriangleKind::B)];
        for e in 0..mesh.num_elements() {
            let (ke, me) = &local[(mesh.element_kind(e) == TriangleKind::B) as usize];
            let nodes = mesh.element_nodes(e);
            for a in 0..npe {
                for b in 0..npe {
                    let v = ke[a * npe + b] - k2 * me[a * npe + b];
                    base.add(nodes[a], nodes[b], Complex64::new(v, 0.0));
                }
            }
        }

        let dtn = [
            DtnOperator::new(&mesh, &modes, Direction::Minus, disc.dtn_terms),
            DtnOperator::new(&mesh, &modes, Direction::Plus, disc.dtn_terms),
        ];
        for op in &dtn {
            let nodes = op.nodes();
            for j in 0..op.terms() {
                let c = op.coefficient(j);
                let mj = op.moment(j);
                for a in 0..nodes.len() {
                    for b in 0..nodes.len() {
                        base.add(nodes[a], nodes[b], -c * (mj[a] * mj[b]));
                    }
                }
            }
        }

        let n = modes.n();
        let mut loads = vec![Vec::new(); 2 * n];
        for m in 0..n {
            let beta = modes.beta(m);
            let amp = Complex64::new(0.0, -2.0) * beta * modes.amplitude(m) * (-Complex64::i() * beta * config.ell).exp();
            for (dir, op) in [(Direction::Plus, &dtn[0]), (Direction::Minus, &dtn[1])] {
                let mut b = vec![Complex64::new(0.0, 0.0); mesh.num_nodes()];
                for (a, &node) in op.nodes().iter().enumerate() {
                    b[node] = amp * op.moment(m)[a];
                }
                loads[field_index(n, m, dir)] = b;
            }
        }

        Ok(HelmholtzProblem {
            config: config.clone(),
            disc,
            modes,
            mesh,
            quad: Arc::new(quad),
            dtn,
            base,
            loads: Arc::new(loads),
        })
    }

    pub fn config(&self) -> &WaveguideConfig {
        &self.config
    }

    pub fn discretization(&self) -> Discretization {
        self.disc
    }

    pub fn modes(&self) -> &ModeBasis {
        &self.modes
    }

    pub fn mesh(&self) -> &Arc<StripMesh> {
        &self.mesh
    }

    pub fn quadrature(&self) -> &Arc<ObstacleQuadrature> {
        &self.quad
    }

    /// DtN operator on Σ_{−ℓ} (`Direction::Minus`) or Σ_{+ℓ}.
    pub fn dtn(&self, side: Direction) -> &DtnOperator {
        match side {
            Direction::Minus => &self.dtn[0],
            Direction::Plus => &self.dtn[1],
        }
    }

    /// Load vector of the incident mode with global index α.
    pub fn load(&self, alpha: usize) -> &[Complex64] {
        &self.loads[alpha]
    }

    /// Unfactorised matrix of a(·,·) for the given ρ.
    pub fn operator(&self, rho: &MaterialField) -> Result<BandMatrix> {
        let quad = &self.quad;
        if rho.len() != quad.len() {
            return Err(Error::Dimension(format!(
                "rho has {} values, obstacle quadrature has {}",
                rho.len(),
                quad.len()
            )));
        }
        if !rho.is_finite() {
            return Err(Error::InvalidConfig("rho has non-finite values".into()));
        }
        let mut mat = self.base.clone();
        let k2 = self.config.k * self.config.k;
        let npe = self.mesh.nodes_per_element();
        let nq = quad.points_per_element();
        let refv = quad.reference_values();
        let (w, r) = (quad.weights(), rho.values());
        let mut local = vec![0.0; npe * npe];
        for (t, &e) in quad.elements().iter().enumerate() {
            local.iter_mut().for_each(|v| *v = 0.0);
            let mut any = false;
            for q in 0..nq {
                let wr = w[t * nq + q] * r[t * nq + q];
                if wr == 0.0 {
                    continue;
                }
                any = true;
                let v = &refv[q];
                for a in 0..npe {
                    for b in 0..npe {
                        local[a * npe + b] += wr * v[a] * v[b];
                    }
                }
            }
            if !any {
                continue;
            }
            let nodes = self.mesh.element_nodes(e);
            for a in 0..npe {
                for b in 0..npe {
                    mat.add(nodes[a], nodes[b], Complex64::new(-k2 * local[a * npe + b], 0.0));
                }
            }
        }
        Ok(mat)
    }

    /// Assembles and factorises the system for ρ.
    pub fn assemble(&self, rho: &MaterialField) -> Result<AssembledSystem> {
        let lu = self.operator(rho)?.factorize()?;
        Ok(AssembledSystem { lu, loads: Arc::clone(&self.loads), mesh: Arc::clone(&self.mesh), n: self.modes.n() })
    }
}

/// Factorised system for one ρ; immutable and shareable.
#[derive(Debug)]
pub struct AssembledSystem {
    lu: BandLu,
    loads: Arc<Vec<Vec<Complex64>>>,
    mesh: Arc<StripMesh>,
    n: usize,
}

impl AssembledSystem {
    pub fn pivot_ratio(&self) -> f64 {
        self.lu.pivot_ratio()
    }

    /// Total field u_m^± for the incident mode (m, dir).
    pub fn solve_scattering(&self, m: usize, dir: Direction) -> Result<DiscreteField> {
        if m >= self.n {
            return Err(Error::InvalidConfig(format!("mode {m} is not propagating (N = {})", self.n)));
        }
        let coeffs = self.lu.solve(&self.loads[field_index(self.n, m, dir)]);
        let f = DiscreteField { coeffs, mesh: Arc::clone(&self.mesh), mode: m, direction: dir };
        if !f.is_finite() {
            return Err(Error::Solver("solution contains non-finite values".into()));
        }
        Ok(f)
    }

    /// All 2N fields ordered (u_0^+, …, u_{N−1}^+, u_0^−, …, u_{N−1}^−).
    pub fn solve_all(&self) -> Result<Vec<DiscreteField>> {
        let mut out = Vec::with_capacity(2 * self.n);
        for dir in [Direction::Plus, Direction::Minus] {
            for m in 0..self.n {
                out.push(self.solve_scattering(m, dir)?);
            }
        }
        Ok(out)
    }
}

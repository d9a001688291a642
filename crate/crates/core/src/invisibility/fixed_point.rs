//! Fixed-point solve for τ and the outer continuation loop.

use serde::{Deserialize, Serialize};

use crate::constraints::Partition;
use crate::error::{Error, Result};
use crate::model::MaterialField;
use crate::scattering::{FieldBundle, Scatterer};

use super::functional::FunctionalSpec;
use super::gram::{gram_basis, kernel_element, GramBasis};
use super::seed::SeedPolicy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationOptions {
    pub epsilon0: f64,
    /// Stopping threshold on |τ^{p+1} − τ^p|_∞.
    pub eta: f64,
    pub max_iter: usize,
    pub trust_radius: f64,
    pub max_halvings: usize,
    pub growth: f64,
    /// Iteration count at or below which ε grows.
    pub fast_iterations: usize,
    /// Bound on |F(ρ_n) − F(ρ₀)|_∞ at accepted steps.
    pub acceptance_tol: f64,
    /// Lower bound on ‖μ^sol‖_{L²}.
    pub min_solution_norm: f64,
    pub seed: SeedPolicy,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            epsilon0: 0.5,
            eta: 1e-8,
            max_iter: 50,
            trust_radius: 10.0,
            max_halvings: 6,
            growth: 1.5,
            fast_iterations: 3,
            acceptance_tol: 1e-6,
            min_solution_norm: 1e-6,
            seed: SeedPolicy::default(),
        }
    }
}

impl ContinuationOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("continuation: {what}")));
        if !(self.epsilon0 > 0.0 && self.epsilon0.is_finite()) {
            return bad("epsilon0 must be positive");
        }
        if !(self.eta > 0.0) || !(self.acceptance_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(self.trust_radius > 0.0) || !(self.growth >= 1.0) {
            return bad("trust_radius must be positive and growth at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub p: usize,
    pub tau_norm: f64,
    pub update_norm: f64,
    pub f_residual: f64,
}

#[derive(Clone, Debug)]
pub struct FixedPointOutcome {
    pub rho: MaterialField,
    pub bundle: FieldBundle,
    pub tau: Vec<f64>,
    /// μ^sol = μ₀ + K(τ).
    pub mu: MaterialField,
    pub iterations: Vec<IterationRecord>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn residual(spec: &FunctionalSpec, bundle: &FieldBundle, target: &[f64]) -> Result<f64> {
    let f = spec.evaluate(bundle.s())?;
    Ok(f.iter().zip(target).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Iterates τ^{p+1} = τ^p + ε⁻¹(F(ρ₀) − F(ρ_n + εμ^p)) from τ⁰ = 0. The
/// returned ρ is the last evaluated iterate, whose bundle is included.
#[allow(clippy::too_many_arguments)]
pub fn fixed_point_step(
    scatterer: &Scatterer,
    rho_n: &MaterialField,
    target: &[f64],
    spec: &FunctionalSpec,
    basis: &GramBasis,
    mu0: &MaterialField,
    epsilon: f64,
    eta: f64,
    max_iter: usize,
    trust_radius: f64,
) -> Result<FixedPointOutcome> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = basis.dimension();
    if target.len() != d {
        return Err(Error::Dimension(format!("target has {} entries, basis has {d}", target.len())));
    }
    let mut tau = vec![0.0; d];
    let mut log = Vec::new();
    for p in 0..max_iter {
        let mut mu = mu0.clone();
        mu.axpy(1.0, &basis.right_inverse(&tau));
        let mut rho = rho_n.clone();
        rho.axpy(epsilon, &mu);
        let bundle = scatterer.scattering_matrix(&rho)?;
        let f = spec.evaluate(bundle.s())?;
        let diff: Vec<f64> = target.iter().zip(&f).map(|(a, b)| a - b).collect();
        let update = inf_norm(&diff) / epsilon;
        log.push(IterationRecord { p, tau_norm: inf_norm(&tau), update_norm: update, f_residual: inf_norm(&diff) });
        if !update.is_finite() {
            return Err(Error::Divergence(format!("non-finite update at iteration {p}")));
        }
        if update <= eta {
            return Ok(FixedPointOutcome { rho, bundle, tau, mu, iterations: log });
        }
        for (t, r) in tau.iter_mut().zip(&diff) {
            *t += r / epsilon;
        }
        if inf_norm(&tau) > trust_radius {
            return Err(Error::Divergence(format!(
                "|tau| = {:.3e} left the trust radius {trust_radius} at iteration {p} (epsilon {epsilon})",
                inf_norm(&tau)
            )));
        }
    }
    Err(Error::Divergence(format!("no convergence in {max_iter} iterations (epsilon {epsilon})")))
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub n: usize,
    pub epsilon: f64,
    pub halvings: usize,
    pub iterations: usize,
    pub tau_norm: f64,
    pub f_residual: f64,
    pub gram_condition: f64,
    pub right_inverse_residual: f64,
    pub kernel_residual: f64,
    pub mu_norm: f64,
    pub rho_norm_inf: f64,
}

/// Continuation state after n accepted steps.
#[derive(Clone, Debug)]
pub struct ContinuationState {
    pub n: usize,
    pub rho: MaterialField,
    pub bundle: FieldBundle,
    pub epsilon: f64,
    pub tau_history: Vec<Vec<f64>>,
    pub log: Vec<StepRecord>,
}

#[derive(Debug)]
pub struct ContinuationRun {
    pub target: Vec<f64>,
    pub state: ContinuationState,
    /// ρ_1, …, ρ_n for the accepted steps.
    pub snapshots: Vec<MaterialField>,
    /// Error that stopped the run before aleph steps.
    pub aborted: Option<Error>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbortReport {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub variant: String,
    pub dimension: usize,
    pub target: Vec<f64>,
    pub requested_steps: usize,
    pub accepted_steps: usize,
    pub final_residual: f64,
    pub steps: Vec<StepRecord>,
    pub aborted: Option<AbortReport>,
}

impl ContinuationRun {
    pub fn is_complete(&self) -> bool {
        self.aborted.is_none()
    }

    pub fn final_rho(&self) -> &MaterialField {
        &self.state.rho
    }

    pub fn final_bundle(&self) -> &FieldBundle {
        &self.state.bundle
    }

    pub fn report(&self, spec: &FunctionalSpec, aleph: usize) -> RunReport {
        RunReport {
            variant: spec.variant().name(),
            dimension: spec.dimension(),
            target: self.target.clone(),
            requested_steps: aleph,
            accepted_steps: self.state.n,
            final_residual: residual(spec, &self.state.bundle, &self.target).unwrap_or(f64::NAN),
            steps: self.state.log.clone(),
            aborted: self.aborted.as_ref().map(|e| AbortReport { kind: e.kind(), message: e.to_string() }),
        }
    }
}

/// Runs `aleph` continuation steps from ρ₀ on the level set F = F(ρ₀).
/// Errors inside a step stop the run and are returned in
/// [`ContinuationRun::aborted`] together with the accepted prefix.
pub fn continuation_run(
    scatterer: &Scatterer,
    rho0: &MaterialField,
    spec: &FunctionalSpec,
    aleph: usize,
    options: &ContinuationOptions,
    partition: Option<&Partition>,
) -> Result<ContinuationRun> {
    options.validate()?;
    if let Some(p) = partition {
        if p.len() < spec.dimension() {
            return Err(Error::SingularGram {
                condition: f64::INFINITY,
                detail: format!(
                    "infeasible: partition has {} cells for {} constraints",
                    p.len(),
                    spec.dimension()
                ),
            });
        }
    }
    let bundle = scatterer.scattering_matrix(rho0)?;
    let target = spec.evaluate(bundle.s())?;
    let mut state = ContinuationState {
        n: 0,
        rho: rho0.clone(),
        bundle,
        epsilon: options.epsilon0,
        tau_history: Vec::new(),
        log: Vec::new(),
    };
    let mut snapshots = Vec::new();
    let mut aborted = None;
    for n in 1..=aleph {
        match continuation_step(scatterer, &state, &target, spec, options, partition, n) {
            Ok((outcome, record)) => {
                state.epsilon = if outcome.iterations.len() <= options.fast_iterations {
                    (record.epsilon * options.growth).min(options.epsilon0)
                } else {
                    record.epsilon
                };
                state.n = n;
                state.rho = outcome.rho;
                state.bundle = outcome.bundle;
                state.tau_history.push(outcome.tau);
                state.log.push(record);
                snapshots.push(state.rho.clone());
            }
            Err(e) => {
                aborted = Some(e);
                break;
            }
        }
    }
    Ok(ContinuationRun { target, state, snapshots, aborted })
}

fn continuation_step(
    scatterer: &Scatterer,
    state: &ContinuationState,
    target: &[f64],
    spec: &FunctionalSpec,
    options: &ContinuationOptions,
    partition: Option<&Partition>,
    n: usize,
) -> Result<(FixedPointOutcome, StepRecord)> {
    let quad = state.bundle.quadrature();
    let basis = gram_basis(spec, &state.bundle, partition)?;
    let mut seed = options.seed.seed_for_step(n, quad, &scatterer.config().obstacle);
    if seed.len() != quad.len() {
        return Err(Error::Dimension(format!(
            "seed has {} values, quadrature set has {}",
            seed.len(),
            quad.len()
        )));
    }
    if let Some(p) = partition {
        seed = p.project(&seed, quad);
    }
    let mu0 = kernel_element(&basis, &seed, quad)?;
    let kernel_residual = inf_norm(&basis.linearization(&mu0, quad)) / quad.l2_norm(&mu0);
    let mut epsilon = state.epsilon;
    let mut halvings = 0;
    loop {
        let attempt = fixed_point_step(
            scatterer,
            &state.rho,
            target,
            spec,
            &basis,
            &mu0,
            epsilon,
            options.eta,
            options.max_iter,
            options.trust_radius,
        )
        .and_then(|out| {
            let r = residual(spec, &out.bundle, target)?;
            if r > options.acceptance_tol {
                return Err(Error::Divergence(format!("accepted residual {r:.3e} above tolerance")));
            }
            let mu_norm = quad.l2_norm(&out.mu);
            if !(mu_norm > options.min_solution_norm) {
                return Err(Error::Divergence(format!("trivial step, |mu| = {mu_norm:.3e}")));
            }
            Ok((out, r, mu_norm))
        });
        match attempt {
            Ok((out, r, mu_norm)) => {
                let record = StepRecord {
                    n,
                    epsilon,
                    halvings,
                    iterations: out.iterations.len(),
                    tau_norm: inf_norm(&out.tau),
                    f_residual: r,
                    gram_condition: basis.condition(),
                    right_inverse_residual: basis.right_inverse_residual(quad),
                    kernel_residual,
                    mu_norm,
                    rho_norm_inf: out.rho.norm_inf(),
                };
                return Ok((out, record));
            }
            Err(Error::Divergence(_)) if halvings < options.max_halvings => {
                epsilon *= 0.5;
                halvings += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

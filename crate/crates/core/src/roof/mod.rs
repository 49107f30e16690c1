//! Convex- and concave-roof extensions of pure-state functions.
//!
//! A density operator `ρ = Σ_j p_j |e_j⟩⟨e_j|` of rank `r` has exactly the
//! decompositions `χ_i = Σ_j V[i][j] √p_j |e_j⟩` for `m × r` isometries `V`.
//! [`solve_roof`] searches that manifold from several seeded random starts
//! and returns the best ensemble found. For minimization the returned value
//! is an upper bound on the roof; for maximization a lower bound.

mod ensemble;
mod stiefel;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use ensemble::{ensemble_from_isometry, Ensemble, DROP_WEIGHT};

use crate::error::{Error, Result};
use crate::linalg::{schmidt_weights, BipartiteDims, ComplexMatrix, DensityOperator, PureState};
use crate::measures::{von_neumann_entropy, von_neumann_entropy_unchecked, LogBase, MeasureSpec};
use crate::random;
use crate::scalar::Real;
use ensemble::EigenBasis;
use stiefel::Landscape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Function of pure states whose roof is taken.
#[derive(Clone, Debug, PartialEq)]
pub enum PureObjective<R> {
    Measure(MeasureSpec),
    /// `sup_ψ μ(ψ) − μ(ψ)`, mapping increasing monotones to decreasing ones
    /// and back.
    Complement(MeasureSpec),
    /// `H(Φ(|ψ⟩⟨ψ|))` for the channel with the given Kraus operators.
    ChannelOutputEntropy {
        kraus: Vec<ComplexMatrix<R>>,
        base: LogBase,
    },
}

impl<R: Real> PureObjective<R> {
    pub fn validate(&self, dims: BipartiteDims) -> Result<()> {
        match self {
            PureObjective::Measure(spec) | PureObjective::Complement(spec) => spec.validate(dims),
            PureObjective::ChannelOutputEntropy { kraus, .. } => validate_channel(kraus, dims.total()),
        }
    }

    /// Value on a normalized pure state.
    pub fn evaluate(&self, psi: &PureState<R>) -> Result<R> {
        self.validate(psi.dims())?;
        Ok(self.eval_raw(psi.amplitudes(), psi.dims()))
    }

    /// Value on the normalization of a nonzero amplitude vector. Measures go
    /// through Schmidt weights; the geometric measure uses its closed form.
    pub(crate) fn eval_raw(&self, chi: &[Complex<R>], dims: BipartiteDims) -> R {
        match self {
            PureObjective::Measure(spec) => spec.from_weights(&schmidt_weights(chi, dims), dims),
            PureObjective::Complement(spec) => {
                (spec.supremum::<R>(dims) - spec.from_weights(&schmidt_weights(chi, dims), dims)).max(R::zero())
            }
            PureObjective::ChannelOutputEntropy { kraus, base } => {
                let n2: R = chi.iter().map(|z| z.norm_sqr()).sum();
                let out = apply_channel_to_vector(kraus, chi).scale(R::one() / n2);
                von_neumann_entropy_unchecked(&out, *base)
            }
        }
    }
}

fn apply_channel_to_vector<R: Real>(kraus: &[ComplexMatrix<R>], chi: &[Complex<R>]) -> ComplexMatrix<R> {
    let d_out = kraus[0].rows();
    let mut out = ComplexMatrix::zeros(d_out, d_out);
    for k in kraus {
        let kv = k.apply(chi).expect("validated Kraus shape");
        out = &out + &ComplexMatrix::outer(&kv, &kv);
    }
    out
}

/// Checks `Σ K†K = I` within 1e-10 for Kraus operators acting on dimension `d_in`.
pub fn validate_channel<R: Real>(kraus: &[ComplexMatrix<R>], d_in: usize) -> Result<()> {
    let first = kraus.first().ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
    if kraus.iter().any(|k| k.cols() != d_in || k.rows() != first.rows()) {
        return Err(Error::DimensionMismatch(format!("Kraus operators must all be d_out x {d_in}")));
    }
    let mut sum = ComplexMatrix::zeros(d_in, d_in);
    for k in kraus {
        sum = &sum + &k.adjoint().mul_unchecked(k);
    }
    let residual = sum.max_abs_diff(&ComplexMatrix::identity(d_in));
    if residual > R::tol(1e-10) {
        return Err(Error::InvalidKraus(residual.as_f64()));
    }
    Ok(())
}

/// Optimizer settings shared by every roof computation.
#[derive(Clone, Debug, PartialEq)]
pub struct RoofOptions {
    /// Number of ensemble members `m`; `None` means `rank(ρ)²`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Central-difference step for gradients.
    pub fd_step: f64,
    /// Run restarts on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self { ensemble_size: None, restarts: 32, max_iters: 2000, tol: 1e-9, seed: 0, fd_step: 1e-6, parallel: true }
    }
}

impl RoofOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!("tol = {} must be positive", self.tol)));
        }
        if !(self.fd_step > 0.0) || !self.fd_step.is_finite() {
            return Err(Error::InvalidParameter(format!("fd_step = {} must be positive", self.fd_step)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RoofProblem<R> {
    pub rho: DensityOperator<R>,
    pub objective: PureObjective<R>,
    pub direction: Direction,
    pub options: RoofOptions,
}

impl<R: Real> RoofProblem<R> {
    pub fn minimize(rho: DensityOperator<R>, measure: MeasureSpec, options: RoofOptions) -> Self {
        Self { rho, objective: PureObjective::Measure(measure), direction: Direction::Minimize, options }
    }

    pub fn maximize(rho: DensityOperator<R>, measure: MeasureSpec, options: RoofOptions) -> Self {
        Self { rho, objective: PureObjective::Measure(measure), direction: Direction::Maximize, options }
    }

    /// The ensemble size actually used.
    pub fn ensemble_size(&self) -> Result<usize> {
        let r = EigenBasis::new(&self.rho).rank();
        let m = self.options.ensemble_size.unwrap_or(r * r);
        if m < r || m > r * r {
            return Err(Error::InvalidParameter(format!(
                "ensemble size {m} outside [rank, rank^2] = [{r}, {}]",
                r * r
            )));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoofResult<R> {
    /// `Σ λ_i f(ψ_i)` of the returned ensemble.
    pub value: R,
    pub ensemble: Ensemble<R>,
    /// Objective per accepted iterate of the winning restart.
    pub objective_trace: Vec<R>,
    pub converged: bool,
    /// Distance between the best and second-best restart values. Heuristic.
    pub gap_estimate: R,
    /// Final value of every restart, in restart order.
    pub restart_values: Vec<R>,
    /// Stalled line searches resolved by a tiny random move (all restarts).
    pub perturbations: usize,
    /// Whether the squared-surrogate polish improved the winning restart.
    pub polished: bool,
}

struct RestartOutcome<R> {
    point: ComplexMatrix<R>,
    value: R,
    trace: Vec<R>,
    converged: bool,
    perturbations: usize,
}

/// Optimizes `Σ λ_i f(ψ_i)` over decompositions of `ρ` in the requested direction.
pub fn solve_roof<R: Real>(problem: &RoofProblem<R>) -> Result<RoofResult<R>> {
    let opts = &problem.options;
    opts.validate()?;
    problem.objective.validate(problem.rho.dims())?;
    let m = problem.ensemble_size()?;
    let basis = EigenBasis::new(&problem.rho);
    let r = basis.rank();
    let sign = match problem.direction {
        Direction::Minimize => R::one(),
        Direction::Maximize => -R::one(),
    };
    let landscape =
        Landscape { basis: &basis, objective: &problem.objective, sign, fd_step: R::lit(opts.fd_step), squared: false };

    let run = |index: usize| -> RestartOutcome<R> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(index as u64);
        if r == 1 {
            let point = ComplexMatrix::identity(1);
            let value = sign * landscape.value(&point);
            return RestartOutcome { point, value, trace: vec![value], converged: true, perturbations: 0 };
        }
        let start = random::isometry::<R, _>(m, r, &mut rng);
        let d = landscape.descend(start, opts.max_iters, R::lit(opts.tol), &mut rng);
        let value = *d.trace.last().expect("trace starts with the initial value");
        RestartOutcome { point: d.point, value, trace: d.trace, converged: d.converged, perturbations: d.perturbations }
    };

    let outcomes: Vec<RestartOutcome<R>> = if opts.parallel {
        (0..opts.restarts).into_par_iter().map(run).collect()
    } else {
        (0..opts.restarts).map(run).collect()
    };

    let better = |a: R, b: R| match problem.direction {
        Direction::Minimize => a < b,
        Direction::Maximize => a > b,
    };
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate().skip(1) {
        if better(o.value, outcomes[best].value) {
            best = i;
        }
    }
    let gap_estimate = outcomes
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, o)| (o.value - outcomes[best].value).abs())
        .fold(None, |acc: Option<R>, g| Some(acc.map_or(g, |a| a.min(g))))
        .unwrap_or(R::zero());

    let winner = &outcomes[best];
    let mut point = winner.point.clone();
    let mut trace = winner.trace.clone();
    let mut perturbations: usize = outcomes.iter().map(|o| o.perturbations).sum();
    let mut polished = false;
    // Measures such as e behave like |x| near product decompositions, where
    // finite differences stall a step or so away from zero. Descending on the
    // per-member square is smooth there; keep the result only if the true
    // objective improves.
    if r > 1 && problem.direction == Direction::Minimize {
        let smooth = Landscape { squared: true, ..landscape };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(opts.restarts as u64);
        let tol = R::lit(opts.tol);
        let d = smooth.descend(point.clone(), opts.max_iters, tol * tol, &mut rng);
        perturbations += d.perturbations;
        let value = landscape.value(&d.point);
        if value < winner.value {
            point = d.point;
            trace.push(value);
            polished = true;
        }
    }

    let ensemble = basis.ensemble(&point)?;
    let value = ensemble_value(&ensemble, &problem.objective);
    Ok(RoofResult {
        value,
        ensemble,
        objective_trace: trace,
        converged: winner.converged,
        gap_estimate,
        restart_values: outcomes.iter().map(|o| o.value).collect(),
        perturbations,
        polished,
    })
}

/// `Σ λ_i f(ψ_i)` for an ensemble.
pub fn ensemble_value<R: Real>(ensemble: &Ensemble<R>, objective: &PureObjective<R>) -> R {
    ensemble
        .weights()
        .iter()
        .zip(ensemble.states())
        .map(|(w, s)| *w * objective.eval_raw(s.amplitudes(), s.dims()))
        .sum()
}

/// Concave roof: [`solve_roof`] with the direction forced to maximize.
pub fn concave_roof<R: Real>(problem: &RoofProblem<R>) -> Result<RoofResult<R>> {
    let mut p = problem.clone();
    p.direction = Direction::Maximize;
    solve_roof(&p)
}

/// Convex roof of the entanglement number.
pub fn entanglement_number_mixed<R: Real>(rho: &DensityOperator<R>, options: &RoofOptions) -> Result<RoofResult<R>> {
    solve_roof(&RoofProblem::minimize(rho.clone(), MeasureSpec::EntanglementNumber, options.clone()))
}

/// Entropy of a channel with respect to a state:
/// `H(Φ(ρ)) − inf Σ λ_i H(Φ(|ψ_i⟩⟨ψ_i|))`.
#[derive(Clone, Debug)]
pub struct ChannelEntropy<R> {
    pub value: R,
    pub output_entropy: R,
    pub roof: RoofResult<R>,
}

pub fn channel_entropy<R: Real>(
    rho: &DensityOperator<R>,
    kraus: &[ComplexMatrix<R>],
    base: LogBase,
    options: &RoofOptions,
) -> Result<ChannelEntropy<R>> {
    validate_channel(kraus, rho.dims().total())?;
    let mut output = ComplexMatrix::zeros(kraus[0].rows(), kraus[0].rows());
    for k in kraus {
        output = &output + &k.conjugate_onto(rho.matrix())?;
    }
    let output_entropy = von_neumann_entropy(&output, base)?;
    let problem = RoofProblem {
        rho: rho.clone(),
        objective: PureObjective::ChannelOutputEntropy { kraus: kraus.to_vec(), base },
        direction: Direction::Minimize,
        options: options.clone(),
    };
    let roof = solve_roof(&problem)?;
    Ok(ChannelEntropy { value: output_entropy - roof.value, output_entropy, roof })
}

//! Numerical search for intrinsic codes: minimize the summed squared KL
//! residual of a K-dimensional subspace of irrep `n` over target sectors.
//!
//! Candidates live on the complex Stiefel manifold (orthonormal n×K
//! matrices). Each restart runs Polak-Ribière conjugate gradient with Armijo
//! backtracking and a Gram-Schmidt retraction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intrinsic::{intrinsic_distance, sector_reports, Code, KlReport, DEFAULT_KL_TOL};
use crate::isotypic::sector_basis;
use crate::linalg::{identity, orthonormalize_columns, trace, CMat, C64};
use crate::spaces::{build_space, SpaceSpec};

/// A restart counts as converged below this objective value.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-8;

/// Descent stops early once the objective reaches this value.
const POLISH_TARGET: f64 = 1e-26;

/// Riemannian gradient norm below which a restart is stationary.
const STATIONARY_GRAD: f64 = 1e-15;

const ARMIJO: f64 = 1e-4;

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_MAX_ITERS: usize = 3000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub irrep_dim: usize,
    pub code_dim: usize,
    /// Sector labels L to protect.
    pub targets: Vec<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Iteration budget per restart.
    pub max_iters: usize,
}

impl SearchProblem {
    /// Problem for intrinsic distance `d`: targets `L = 1..d−1`.
    pub fn for_distance(irrep_dim: usize, code_dim: usize, distance: usize, restarts: usize, seed: u64) -> Self {
        SearchProblem {
            irrep_dim,
            code_dim,
            targets: (1..distance).collect(),
            restarts,
            seed,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.irrep_dim < 2 {
            return Err(Error::InvalidDimension(self.irrep_dim));
        }
        if self.code_dim == 0 || self.code_dim > self.irrep_dim {
            return Err(Error::InvalidSpec(format!(
                "code dimension {} must lie in 1..={}",
                self.code_dim, self.irrep_dim
            )));
        }
        if self.targets.is_empty() {
            return Err(Error::InvalidSpec("no target sectors".into()));
        }
        if let Some(&l) = self.targets.iter().find(|&&l| l >= self.irrep_dim) {
            return Err(Error::InvalidAngularMomentum(format!(
                "sector L = {l} does not occur in L(V) for irrep {}",
                self.irrep_dim
            )));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidSpec("restarts and max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    #[serde(serialize_with = "serialize_matrix")]
    pub codewords: CMat,
    pub objective: f64,
    pub converged: bool,
    pub sector_reports: Vec<KlReport>,
    /// Intrinsic distance of the returned code.
    pub distance: usize,
    /// Index of the winning restart.
    pub restart: usize,
    /// Objective after each iteration of the winning restart.
    pub trace: Vec<f64>,
    pub restart_objectives: Vec<f64>,
}

fn serialize_matrix<S: serde::Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::codefile::matrix_json(m).serialize(s)
}

/// Dense sector operators for the target sectors of irrep `n`.
struct Objective {
    ops: Vec<CMat>,
}

impl Objective {
    fn new(n: usize, targets: &[usize]) -> Result<Self> {
        let space = build_space(&SpaceSpec::irrep(n))?;
        let mut ops = Vec::new();
        for &l in targets {
            let basis = sector_basis(&space, l)?;
            ops.extend((0..basis.len()).map(|i| basis.dense(i)));
        }
        Ok(Objective { ops })
    }

    fn value(&self, b: &CMat) -> f64 {
        self.ops
            .iter()
            .map(|f| traceless(&(b.adjoint() * f * b)).norm_squared())
            .sum()
    }

    /// Value and Euclidean gradient `Σ 2(F B R† + F† B R)`, R the traceless
    /// part of `B†FB`.
    fn value_and_gradient(&self, b: &CMat) -> (f64, CMat) {
        let mut value = 0.0;
        let mut grad = CMat::zeros(b.nrows(), b.ncols());
        for f in &self.ops {
            let fb = f * b;
            let r = traceless(&(b.adjoint() * &fb));
            value += r.norm_squared();
            grad += (&fb * r.adjoint() + f.adjoint() * b * &r) * C64::new(2.0, 0.0);
        }
        (value, grad)
    }
}

fn traceless(m: &CMat) -> CMat {
    let k = m.nrows();
    m - identity(k) * (trace(m) / C64::new(k as f64, 0.0))
}

/// Σ_sectors Σ_F ‖ΩFΩ − c_F Ω‖_F² for orthonormal codewords in irrep `n`.
pub fn objective(codewords: &CMat, targets: &[usize]) -> Result<f64> {
    let b = orthonormalize_columns(codewords, 1e-12);
    if b.ncols() != codewords.ncols() {
        return Err(Error::NotOrthonormal(f64::INFINITY));
    }
    Ok(Objective::new(codewords.nrows(), targets)?.value(&b))
}

/// Projection onto the tangent space at `b`: `G − B·sym(B†G)`.
fn tangent(b: &CMat, g: &CMat) -> CMat {
    let h = b.adjoint() * g;
    let sym = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    g - b * sym
}

fn retract(m: &CMat) -> Option<CMat> {
    let q = orthonormalize_columns(m, 1e-12);
    (q.ncols() == m.ncols()).then_some(q)
}

fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

struct Descent {
    codewords: CMat,
    objective: f64,
    trace: Vec<f64>,
}

fn random_start(n: usize, k: usize, rng: &mut ChaCha8Rng) -> CMat {
    loop {
        let m = CMat::from_fn(n, k, |_, _| {
            C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
        });
        if let Some(q) = retract(&m) {
            return q;
        }
    }
}

fn descend(obj: &Objective, start: CMat, max_iters: usize) -> Descent {
    let mut b = start;
    let (mut f, g) = obj.value_and_gradient(&b);
    let mut rg = tangent(&b, &g);
    let mut dir = -&rg;
    let mut step = 0.5;
    let mut trace = Vec::with_capacity(max_iters);
    for _ in 0..max_iters {
        trace.push(f);
        let gnorm2 = rg.norm_squared();
        if f < POLISH_TARGET || gnorm2.sqrt() < STATIONARY_GRAD {
            break;
        }
        let mut slope = real_inner(&rg, &dir);
        if slope >= 0.0 {
            dir = -&rg;
            slope = -gnorm2;
        }
        let mut alpha = 2.0 * step;
        let mut accepted = None;
        while alpha > 1e-18 {
            if let Some(cand) = retract(&(&b + &dir * C64::new(alpha, 0.0))) {
                let fc = obj.value(&cand);
                if fc <= f + ARMIJO * alpha * slope {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((next, _)) = accepted else {
            if slope == -gnorm2 {
                break;
            }
            dir = -&rg;
            continue;
        };
        step = alpha;
        let (f_next, g_next) = obj.value_and_gradient(&next);
        let rg_next = tangent(&next, &g_next);
        let moved_rg = tangent(&next, &rg);
        let beta = (real_inner(&rg_next, &(&rg_next - &moved_rg)) / gnorm2).max(0.0);
        dir = tangent(&next, &dir) * C64::new(beta, 0.0) - &rg_next;
        b = next;
        f = f_next;
        rg = rg_next;
    }
    Descent {
        codewords: b,
        objective: f,
        trace,
    }
}

/// Multi-restart search; deterministic for a given seed.
pub fn search(problem: &SearchProblem) -> Result<SearchResult> {
    problem.validate()?;
    let obj = Objective::new(problem.irrep_dim, &problem.targets)?;
    let runs: Vec<Descent> = (0..problem.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
            rng.set_stream(r as u64);
            let start = random_start(problem.irrep_dim, problem.code_dim, &mut rng);
            descend(&obj, start, problem.max_iters)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.objective < runs[best].objective {
            best = i;
        }
    }
    let restart_objectives = runs.iter().map(|r| r.objective).collect();
    let winner = runs.into_iter().nth(best).expect("at least one restart");
    let code = Code::in_irrep(problem.irrep_dim, winner.codewords.clone())?;
    let reports = sector_reports(&code, &problem.targets, DEFAULT_KL_TOL)?;
    let distance = intrinsic_distance(&code)?;
    let verified = reports.iter().all(|r| r.pass);
    let converged = winner.objective < CONVERGENCE_THRESHOLD && verified;
    if !converged {
        log::warn!("search did not converge: best objective {:.3e}", winner.objective);
    }
    Ok(SearchResult {
        codewords: winner.codewords,
        objective: winner.objective,
        converged,
        sector_reports: reports,
        distance,
        restart: best,
        trace: winner.trace,
        restart_objectives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};

    fn five_two_two() -> CMat {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut b = CMat::zeros(5, 2);
        b[(0, 0)] = c(s, 0.0);
        b[(4, 0)] = c(s, 0.0);
        b[(2, 1)] = ONE;
        b
    }

    #[test]
    fn objective_vanishes_on_known_code() {
        assert!(objective(&five_two_two(), &[1]).unwrap() < 1e-14);
        assert!(objective(&five_two_two(), &[2]).unwrap() > 1e-3);
    }

    #[test]
    fn objective_is_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_start(7, 3, &mut rng);
        let u = crate::linalg::orthonormalize_columns(&random_start(3, 3, &mut rng), 1e-12);
        let f0 = objective(&b, &[1, 2]).unwrap();
        let f1 = objective(&(&b * u), &[1, 2]).unwrap();
        assert!((f0 - f1).abs() < 1e-12 * f0.max(1.0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = random_start(5, 2, &mut rng);
        let obj = Objective::new(5, &[1, 2]).unwrap();
        let (_, g) = obj.value_and_gradient(&b);
        let dir = CMat::from_fn(5, 2, |i, j| c((i + j) as f64 * 0.1 - 0.2, 0.3 - j as f64 * 0.1));
        let h = 1e-6;
        let fd = (obj.value(&(&b + &dir * c(h, 0.0))) - obj.value(&(&b - &dir * c(h, 0.0)))) / (2.0 * h);
        assert!((fd - real_inner(&g, &dir)).abs() < 1e-6);
    }

    #[test]
    fn rediscovers_a_distance_two_code() {
        let p = SearchProblem::for_distance(5, 2, 2, 8, 7);
        let r = search(&p).unwrap();
        assert!(r.converged && r.objective < CONVERGENCE_THRESHOLD);
        assert_eq!(r.distance, 2);
        let again = search(&p).unwrap();
        assert_eq!(r.trace, again.trace);
    }

    #[test]
    fn whole_space_is_infeasible() {
        let r = search(&SearchProblem::for_distance(2, 2, 2, 4, 1)).unwrap();
        assert!(!r.converged);
        assert!(r.objective > 0.1);
    }

    #[test]
    fn invalid_problems() {
        assert!(search(&SearchProblem::for_distance(5, 6, 2, 4, 1)).is_err());
        assert!(search(&SearchProblem::for_distance(5, 2, 1, 4, 1)).is_err());
        assert!(search(&SearchProblem::for_distance(5, 2, 6, 4, 1)).is_err());
    }
}

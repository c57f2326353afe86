//! Bounded derivative-free minimization.
//!
//! Nelder-Mead with adaptive coefficients, every trial point projected onto
//! the box, and restarts from the incumbent with a freshly oriented simplex
//! until a restart stops paying off.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Evaluation budget per free parameter.
pub const DEFAULT_EVALS_PER_DIM: usize = 500;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Initial simplex edge as a fraction of each coordinate's range.
const SIMPLEX_SCALE: f64 = 0.1;
/// Consecutive non-improving restarts before giving up.
const STALE_RESTARTS: usize = 2;

pub struct OptProblem<'a> {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub initial: Vec<f64>,
    pub cost: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub max_evals: usize,
    /// Absolute cost-change stopping threshold.
    pub tolerance: f64,
    pub seed: u64,
}

impl OptProblem<'_> {
    pub fn dimension(&self) -> usize {
        self.initial.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dimension();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidParameters(format!(
                "bounds have lengths {}/{} for dimension {n}",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for i in 0..n {
            let (lo, hi, x) = (self.lower[i], self.upper[i], self.initial[i]);
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidParameters(format!("bad bounds [{lo}, {hi}] on coordinate {i}")));
            }
            if !(lo..=hi).contains(&x) {
                return Err(Error::InvalidParameters(format!("initial coordinate {i} = {x} outside [{lo}, {hi}]")));
            }
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameters("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptResult {
    pub best_point: Vec<f64>,
    pub best_cost: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// `(evaluation index, cost)` for every evaluation.
    pub trace: Vec<(usize, f64)>,
}

struct Evaluator<'a, 'p> {
    problem: &'p OptProblem<'a>,
    trace: Vec<(usize, f64)>,
    best: (Vec<f64>, f64),
}

impl Evaluator<'_, '_> {
    fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.problem.lower[i], self.problem.upper[i]);
        }
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= self.problem.max_evals
    }

    fn eval(&mut self, x: &mut [f64]) -> Result<f64> {
        self.project(x);
        let value = (self.problem.cost)(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteCost { value, point: x.to_vec() });
        }
        self.trace.push((self.trace.len(), value));
        if value < self.best.1 {
            self.best = (x.to_vec(), value);
        }
        Ok(value)
    }
}

pub fn minimize(problem: &OptProblem) -> Result<OptResult> {
    problem.validate()?;
    let mut ev = Evaluator { problem, trace: Vec::new(), best: (problem.initial.clone(), f64::INFINITY) };
    let mut start = problem.initial.clone();
    ev.eval(&mut start)?;
    if problem.dimension() == 0 {
        return Ok(finish(ev, true));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let mut stale = 0;
    let mut converged = false;
    let mut first = true;
    while !ev.exhausted() {
        let before = ev.best.1;
        let origin = ev.best.0.clone();
        let outcome = nelder_mead(&mut ev, origin, before, &mut rng, first)?;
        first = false;
        if ev.best.1 > before - problem.tolerance {
            stale += 1;
        } else {
            stale = 0;
        }
        if outcome && stale >= STALE_RESTARTS {
            converged = true;
            break;
        }
    }
    Ok(finish(ev, converged))
}

fn finish(ev: Evaluator, converged: bool) -> OptResult {
    OptResult {
        evaluations: ev.trace.len(),
        best_point: ev.best.0,
        best_cost: ev.best.1,
        converged,
        trace: ev.trace,
    }
}

/// One Nelder-Mead run; returns whether it met the tolerance before the
/// budget ran out.
fn nelder_mead(ev: &mut Evaluator, x0: Vec<f64>, f0: f64, rng: &mut ChaCha8Rng, axis_aligned: bool) -> Result<bool> {
    let p = ev.problem;
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let gamma = gamma.max(0.5);
    let delta = if n == 1 { 0.5 } else { delta };

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), f0)];
    for i in 0..n {
        let width = p.upper[i] - p.lower[i];
        let mut v = x0.clone();
        let mut step = SIMPLEX_SCALE * width;
        if !axis_aligned {
            step *= rng.gen_range(0.5..1.5);
            // small off-axis components so restarts explore new directions
            for (j, vj) in v.iter_mut().enumerate() {
                if j != i {
                    *vj += 0.1 * step * rng.gen_range(-1.0..1.0) * (p.upper[j] - p.lower[j]) / width.max(f64::MIN_POSITIVE);
                }
            }
        }
        if step == 0.0 {
            continue;
        }
        let step = if x0[i] + step <= p.upper[i] || x0[i] - step < p.lower[i] { step } else { -step };
        v[i] += step;
        if ev.exhausted() {
            return Ok(false);
        }
        let f = ev.eval(&mut v)?;
        simplex.push((v, f));
    }
    if simplex.len() < 2 {
        return Ok(true);
    }
    let m = simplex.len() - 1;

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[m].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= p.tolerance * 1e-2 || size <= 1e-12 {
            return Ok(true);
        }
        if ev.exhausted() {
            return Ok(false);
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..m].iter().map(|(x, _)| x[j]).sum::<f64>() / m as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[m].0).map(|(c, w)| c + t * (c - w)).collect()
        };

        let mut xr = along(alpha);
        let fr = ev.eval(&mut xr)?;
        if fr < simplex[0].1 {
            let mut xe = along(alpha * beta);
            let fe = if ev.exhausted() { f64::INFINITY } else { ev.eval(&mut xe)? };
            simplex[m] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[m - 1].1 {
            simplex[m] = (xr, fr);
            continue;
        }
        if ev.exhausted() {
            return Ok(false);
        }
        let (mut xc, outside) = if fr < simplex[m].1 { (along(alpha * gamma), true) } else { (along(-gamma), false) };
        let fc = ev.eval(&mut xc)?;
        if (outside && fc <= fr) || (!outside && fc < simplex[m].1) {
            simplex[m] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if ev.exhausted() {
                return Ok(false);
            }
            let mut x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + delta * (v - b)).collect();
            let f = ev.eval(&mut x)?;
            *vertex = (x, f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem<'a>(
        cost: &'a (dyn Fn(&[f64]) -> f64 + Sync),
        lower: Vec<f64>,
        upper: Vec<f64>,
        initial: Vec<f64>,
    ) -> OptProblem<'a> {
        let n = initial.len();
        OptProblem {
            lower,
            upper,
            initial,
            cost,
            max_evals: DEFAULT_EVALS_PER_DIM * n.max(1),
            tolerance: DEFAULT_TOLERANCE,
            seed: 7,
        }
    }

    #[test]
    fn quadratic_in_one_dimension() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2);
        let res = minimize(&problem(&f, vec![0.0], vec![1.0], vec![0.9])).unwrap();
        assert!((res.best_point[0] - 0.3).abs() < 1e-4, "{:?}", res.best_point);
        assert!(res.converged);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let res = minimize(&problem(&f, vec![-2.0, -2.0], vec![2.0, 2.0], vec![-1.0, 1.0])).unwrap();
        assert!((res.best_point[0] - 1.0).abs() < 1e-3, "{:?}", res.best_point);
        assert!((res.best_point[1] - 1.0).abs() < 1e-3, "{:?}", res.best_point);
    }

    #[test]
    fn optimum_on_the_boundary() {
        let f = |x: &[f64]| x[0] + (x[1] - 0.5).powi(2);
        let res = minimize(&problem(&f, vec![0.0, 0.0], vec![1.0, 1.0], vec![0.5, 0.9])).unwrap();
        assert!(res.best_point[0].abs() < 1e-6);
        assert!((res.best_point[1] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn zero_dimensional_problem_evaluates_once() {
        let f = |_: &[f64]| 4.2;
        let res = minimize(&problem(&f, vec![], vec![], vec![])).unwrap();
        assert_eq!(res.evaluations, 1);
        assert_eq!(res.best_cost, 4.2);
    }

    #[test]
    fn evaluations_stay_in_bounds_and_trace_is_complete() {
        use std::sync::Mutex;
        let seen = Mutex::new(Vec::new());
        let f = |x: &[f64]| {
            seen.lock().unwrap().push(x.to_vec());
            (x[0] + 3.0).powi(2) + (x[1] - 9.0).powi(2) + x[2].sin()
        };
        let res = minimize(&problem(&f, vec![-1.0, 0.0, -2.0], vec![1.0, 2.0, 2.0], vec![0.0, 1.0, 0.0])).unwrap();
        let seen = seen.into_inner().unwrap();
        assert_eq!(seen.len(), res.evaluations);
        assert_eq!(res.trace.len(), res.evaluations);
        for x in &seen {
            assert!((-1.0..=1.0).contains(&x[0]) && (0.0..=2.0).contains(&x[1]) && (-2.0..=2.0).contains(&x[2]));
        }
        assert!(res.best_cost <= res.trace[0].1);
        assert!(res.evaluations <= 1500);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = |x: &[f64]| (x[0] * 3.0).cos() + (x[1] - 0.2).powi(2) + 0.1 * x[0] * x[1];
        let a = minimize(&problem(&f, vec![-2.0; 2], vec![2.0; 2], vec![0.5, 0.5])).unwrap();
        let b = minimize(&problem(&f, vec![-2.0; 2], vec![2.0; 2], vec![0.5, 0.5])).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best_point, b.best_point);
    }

    #[test]
    fn non_finite_cost_is_reported() {
        let f = |x: &[f64]| if x[0] > 0.55 { f64::NAN } else { -x[0] };
        let err = minimize(&problem(&f, vec![0.0], vec![1.0], vec![0.5])).unwrap_err();
        match err {
            Error::NonFiniteCost { point, .. } => assert!(point[0] > 0.55),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_problems() {
        let f = |x: &[f64]| x[0];
        assert!(minimize(&problem(&f, vec![0.0], vec![1.0], vec![2.0])).is_err());
        assert!(minimize(&problem(&f, vec![f64::NEG_INFINITY], vec![1.0], vec![0.0])).is_err());
        assert!(minimize(&problem(&f, vec![0.0, 0.0], vec![1.0], vec![0.0])).is_err());
    }
}

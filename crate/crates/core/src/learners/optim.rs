use std::collections::VecDeque;

use nalgebra::DVector;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions<T> {
    pub max_iterations: usize,
    /// Stop once the gradient's Euclidean norm falls to this value.
    pub gradient_tolerance: T,
    pub memory: usize,
}

#[derive(Clone, Debug)]
pub struct OptimOutcome<T: Real> {
    pub x: DVector<T>,
    pub value: T,
    pub gradient_norm: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Limited-memory BFGS with Armijo backtracking. Deterministic for a given
/// objective and starting point.
pub fn minimize_lbfgs<T, F>(mut objective: F, x0: DVector<T>, opts: LbfgsOptions<T>) -> OptimOutcome<T>
where
    T: Real,
    F: FnMut(&DVector<T>) -> (T, DVector<T>),
{
    let c1 = T::lit(1e-4);
    let half = T::lit(0.5);
    let mut x = x0;
    let (mut fx, mut g) = objective(&x);
    let mut history: VecDeque<(DVector<T>, DVector<T>, T)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        let gnorm = g.norm();
        if gnorm <= opts.gradient_tolerance {
            return OptimOutcome { x, value: fx, gradient_norm: gnorm, iterations, converged: true };
        }

        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = *rho * s.dot(&q);
            q.axpy(-a, y, T::one());
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            q *= s.dot(y) / y.dot(y);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = *rho * y.dot(&q);
            q.axpy(a - b, s, T::one());
        }
        let mut direction = -q;
        let mut slope = g.dot(&direction);
        if !(slope < T::zero()) {
            history.clear();
            direction = -g.clone();
            slope = -gnorm * gnorm;
        }

        let mut step = if history.is_empty() { (T::one() / gnorm).min(T::one()) } else { T::one() };
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &x + &direction * step;
            let (fc, gc) = objective(&candidate);
            if fc.finite() && fc <= fx + c1 * step * slope {
                accepted = Some((candidate, fc, gc));
                break;
            }
            step *= half;
        }
        iterations += 1;
        let Some((xn, fn_, gn)) = accepted else {
            break;
        };
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > T::default_epsilon() * y.norm_squared() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, T::one() / sy));
        }
        x = xn;
        fx = fn_;
        g = gn;
    }
    let gnorm = g.norm();
    OptimOutcome {
        converged: gnorm <= opts.gradient_tolerance,
        x,
        value: fx,
        gradient_norm: gnorm,
        iterations,
    }
}

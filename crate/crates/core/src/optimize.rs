//! Nelder-Mead simplex minimization.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Stop once `f(worst) - f(best)` over the simplex drops below this.
    pub ftol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iters: 500, ftol: 1e-10, initial_step: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            f(x)
        };
        if n == 0 {
            let value = eval(x0);
            return Minimum { point: Vec::new(), value, iterations: 0, evaluations, converged: true };
        }

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

        let mut iterations = 0;
        let mut converged = false;
        let mut order: Vec<usize> = (0..=n).collect();
        let mut centroid = vec![0.0; n];
        while iterations < self.max_iters {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let worst = order[n];
            let second_worst = order[n - 1];
            if (values[worst] - values[best]).abs() < self.ftol {
                converged = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &k in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                    *c += x / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
            };

            let reflected = along(REFLECT);
            let f_r = eval(&reflected);
            if f_r < values[best] {
                let expanded = along(EXPAND);
                let f_e = eval(&expanded);
                if f_e < f_r {
                    simplex[worst] = expanded;
                    values[worst] = f_e;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = f_r;
                }
                continue;
            }
            if f_r < values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = f_r;
                continue;
            }
            let (candidate, f_c) = if f_r < values[worst] {
                let x = along(REFLECT * CONTRACT);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(-CONTRACT);
                let v = eval(&x);
                (x, v)
            };
            if f_c < values[worst].min(f_r) {
                simplex[worst] = candidate;
                values[worst] = f_c;
                continue;
            }
            let anchor = simplex[best].clone();
            for &k in &order[1..] {
                for (x, a) in simplex[k].iter_mut().zip(&anchor) {
                    *x = a + SHRINK * (*x - a);
                }
                values[k] = eval(&simplex[k]);
            }
        }

        let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
        Minimum { point: simplex[best].clone(), value: values[best], iterations, evaluations, converged }
    }
}

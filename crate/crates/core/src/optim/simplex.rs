//! Nelder–Mead simplex descent with dimension-adaptive coefficients and
//! automatic re-seeding of a collapsed simplex.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Budget of iterations, shared across re-seeded rounds.
    pub max_iters: usize,
    /// Stop when the spread of vertex values falls below this.
    pub f_tol: f64,
    /// ... or when every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_iters: 2000, f_tol: 1e-9, x_tol: 1e-10, initial_step: 0.5 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Error raised when the objective returns a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonFinite {
    pub value: f64,
}

struct Counted<'a, F> {
    f: &'a F,
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, NonFinite> {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NonFinite { value: v })
        }
    }
}

fn build_simplex<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<'_, F>,
    x0: &[f64],
    x0_value: Option<f64>,
    step: f64,
) -> Result<Vec<(Vec<f64>, f64)>, NonFinite> {
    let n = x0.len();
    let mut simplex = Vec::with_capacity(n + 1);
    let v0 = match x0_value {
        Some(v) => v,
        None => f.eval(x0)?,
    };
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f.eval(&x)?;
        simplex.push((x, v));
    }
    Ok(simplex)
}

/// Minimises `f` from `x0`.
///
/// Whenever the simplex meets a tolerance before the budget runs out it is
/// rebuilt around the best vertex; the search stops once a rebuilt simplex
/// converges without improving the best value by more than `f_tol`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    opts: &SimplexOptions,
) -> Result<SimplexResult, NonFinite> {
    let n = x0.len();
    let mut counted = Counted { f, evaluations: 0 };
    if n == 0 {
        let v = counted.eval(x0)?;
        return Ok(SimplexResult { x: vec![], value: v, iterations: 0, evaluations: 1, converged: true });
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) =
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut simplex = build_simplex(&mut counted, x0, None, opts.initial_step)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut round_start_best = f64::INFINITY;
    let mut step = opts.initial_step;

    while iterations < opts.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let x_spread = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if worst - best <= opts.f_tol || x_spread <= opts.x_tol {
            if round_start_best - best <= opts.f_tol {
                converged = true;
                break;
            }
            // Re-seed around the incumbent with a shrinking edge.
            round_start_best = best;
            step = (step * 0.5).max(1e-3);
            let (xb, vb) = simplex[0].clone();
            simplex = build_simplex(&mut counted, &xb, Some(vb), step)?;
            continue;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(alpha);
        let fr = counted.eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = along(alpha * beta);
            let fe = counted.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let xc = along(alpha * gamma);
                let fc = counted.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(-gamma);
                let fc = counted.eval(&xc)?;
                (xc, fc)
            };
            if fc < fr.min(worst) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> =
                        x_best.iter().zip(&vertex.0).map(|(b, v)| b + delta * (v - b)).collect();
                    let fx = counted.eval(&x)?;
                    *vertex = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(SimplexResult { x, value, iterations, evaluations: counted.evaluations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let r = nelder_mead(&f, &[0.0, 0.0], &SimplexOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.value < 1e-9);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let opts = SimplexOptions { max_iters: 5000, ..Default::default() };
        let r = nelder_mead(&f, &[-1.2, 1.0], &opts).unwrap();
        assert!(r.value < 1e-8, "{}", r.value);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs().sqrt()).sum::<f64>();
        let r = nelder_mead(&f, &[0.0; 5], &SimplexOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn reports_non_finite() {
        let f = |x: &[f64]| if x[0] > 0.2 { f64::NAN } else { -x[0] };
        assert!(nelder_mead(&f, &[0.0], &SimplexOptions::default()).is_err());
    }
}

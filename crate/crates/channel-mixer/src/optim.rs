//! Derivative-free minimisation with a Nelder-Mead simplex.

/// Outcome of a simplex run. `history` records the best objective value
/// after each iteration and is non-increasing.
#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` starting from `x0`. Converges when the spread of objective
/// values across the simplex drops below `tol * (1 + |best|)` and the
/// simplex diameter below `sqrt(tol)` relative to the best point (the
/// objective spread alone stalls on symmetric valleys, where opposite
/// points share a value while straddling the minimum); gives up after
/// `max_iters` iterations with `converged = false`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], tol: f64, max_iters: usize) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n > 0, "empty parameter vector");

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        if p[i].abs() > 1e-12 {
            p[i] *= 1.05;
        } else {
            p[i] = 0.00025;
        }
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| f(p)).collect();

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let second_worst = order[n - 1];
        let worst = order[n];

        let spread = values[worst] - values[best];
        let scale = points[best].iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let diameter = points
            .iter()
            .flat_map(|p| {
                p.iter()
                    .zip(points[best].iter())
                    .map(|(a, b)| (a - b).abs())
            })
            .fold(0.0f64, f64::max);
        if spread.abs() <= tol * (1.0 + values[best].abs()) && diameter <= tol.sqrt() * scale {
            converged = true;
            break;
        }

        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &idx in &order[..n] {
            for (c, xi) in centroid.iter_mut().zip(points[idx].iter()) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let blend = |alpha: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from.iter())
                .map(|(c, x)| c + alpha * (c - x))
                .collect()
        };

        let reflected = blend(REFLECT, &points[worst]);
        let f_reflected = f(&reflected);

        if f_reflected < values[best] {
            let expanded = blend(EXPAND, &points[worst]);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                points[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                points[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            points[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let (contracted, f_contracted) = if f_reflected < values[worst] {
                // outside contraction, between centroid and reflection
                let p: Vec<f64> = centroid
                    .iter()
                    .zip(reflected.iter())
                    .map(|(c, r)| c + CONTRACT * (r - c))
                    .collect();
                let v = f(&p);
                (p, v)
            } else {
                // inside contraction, between centroid and worst
                let p: Vec<f64> = centroid
                    .iter()
                    .zip(points[worst].iter())
                    .map(|(c, w)| c + CONTRACT * (w - c))
                    .collect();
                let v = f(&p);
                (p, v)
            };
            if f_contracted < values[worst].min(f_reflected) {
                points[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                let anchor = points[best].clone();
                for idx in 0..=n {
                    if idx == best {
                        continue;
                    }
                    for (x, a) in points[idx].iter_mut().zip(anchor.iter()) {
                        *x = a + SHRINK * (*x - a);
                    }
                    values[idx] = f(&points[idx]);
                }
            }
        }

        let current_best = values.iter().cloned().fold(f64::INFINITY, f64::min);
        history.push(current_best);
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("simplex is non-empty");
    SimplexResult {
        x: points[best].clone(),
        objective: values[best],
        iterations,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl_converges() {
        let target = [1.0, -2.0, 0.5, 3.0];
        let result = nelder_mead(
            |x| {
                x.iter()
                    .zip(target.iter())
                    .map(|(xi, ti)| (xi - ti) * (xi - ti))
                    .sum()
            },
            &[0.0, 0.0, 0.0, 0.0],
            1e-12,
            5000,
        );
        assert!(result.converged);
        for (xi, ti) in result.x.iter().zip(target.iter()) {
            assert!((xi - ti).abs() < 1e-4, "{xi} vs {ti}");
        }
        assert!(result.objective < 1e-8);
    }

    #[test]
    fn banana_valley_is_followed() {
        let rosenbrock =
            |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let result = nelder_mead(rosenbrock, &[-1.2, 1.0], 1e-12, 10_000);
        assert!(result.converged);
        assert!((result.x[0] - 1.0).abs() < 1e-3);
        assert!((result.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn history_is_monotone() {
        let result = nelder_mead(
            |x| x.iter().map(|v| v * v).sum::<f64>() + 1.0,
            &[3.0, -4.0, 5.0],
            1e-10,
            2000,
        );
        for pair in result.history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
        assert!(result.converged);
    }

    #[test]
    fn iteration_budget_is_respected() {
        let result = nelder_mead(
            |x| (x[0] - 100.0).powi(2) + (x[1] + 50.0).powi(2),
            &[0.0, 0.0],
            1e-15,
            3,
        );
        assert!(!result.converged);
        assert_eq!(result.iterations, 3);
    }

    #[test]
    fn infinite_regions_are_avoided() {
        let result = nelder_mead(
            |x| {
                if x[0] < 0.0 {
                    f64::INFINITY
                } else {
                    (x[0] - 2.0).powi(2)
                }
            },
            &[0.5],
            1e-12,
            2000,
        );
        assert!(result.converged);
        assert!((result.x[0] - 2.0).abs() < 1e-4);
    }
}

//! Derivative-free local minimizers with hard evaluation caps.

/// Result of a local minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

/// Nelder–Mead simplex search from `x0` with initial edge `step`.
///
/// Stops after `max_evals` evaluations or once the simplex has collapsed to
/// width `xtol` with value spread below `ftol`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, max_evals: usize, xtol: f64, ftol: f64) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        if evals >= max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }
    if simplex.len() < n + 1 {
        let best = simplex.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
        return Minimum { x: best.0, f: best.1, evals };
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let width = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if width <= xtol && spread.abs() <= ftol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            if evals >= max_evals {
                simplex[n] = (xr, fr);
                break;
            }
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            if evals >= max_evals {
                break;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    if evals >= max_evals {
                        break;
                    }
                    let x: Vec<f64> = best.iter().zip(&entry.0).map(|(b, x)| b + sigma * (x - b)).collect();
                    let fx = eval(&x, &mut evals);
                    *entry = (x, fx);
                }
            }
        }
    }
    let best = simplex.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
    Minimum { x: best.0, f: best.1, evals }
}

/// Compass pattern search. A trial point replaces the incumbent only when it
/// strictly improves the value, so the accepted sequence is nonincreasing.
/// The step halves after a full unsuccessful poll. `history` receives every
/// accepted value, starting with `f(x0)`.
pub fn pattern_search<F>(
    mut f: F,
    x0: &[f64],
    step: f64,
    min_step: f64,
    max_evals: usize,
    history: Option<&mut Vec<f64>>,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut sink = Vec::new();
    let history = history.unwrap_or(&mut sink);
    let mut x = x0.to_vec();
    if max_evals == 0 {
        return Minimum { x, f: f64::INFINITY, evals: 0 };
    }
    let mut fx = f(&x);
    let mut evals = 1;
    history.push(fx);
    let mut h = step;
    'outer: while h >= min_step {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                if evals >= max_evals {
                    break 'outer;
                }
                let old = x[i];
                x[i] = old + sign * h;
                let ft = f(&x);
                evals += 1;
                if ft < fx {
                    fx = ft;
                    history.push(fx);
                    improved = true;
                } else {
                    x[i] = old;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Minimum { x, f: fx, evals }
}

/// Golden-section search for a minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nelder_mead_finds_rosenbrock_minimum() {
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], 0.5, 5000, 1e-10, 1e-14);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{m:?}");
        assert!(m.evals <= 5000);
    }

    #[test]
    fn nelder_mead_respects_cap() {
        let mut count = 0;
        let m = nelder_mead(
            |x| {
                count += 1;
                rosenbrock(x)
            },
            &[-1.2, 1.0],
            0.5,
            17,
            0.0,
            0.0,
        );
        assert_eq!(m.evals, 17);
        assert_eq!(count, 17);
    }

    #[test]
    fn pattern_search_is_monotone() {
        let mut hist = Vec::new();
        let m = pattern_search(
            |x| (x[0] - 3.0).abs() + (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            1.0,
            1e-9,
            10_000,
            Some(&mut hist),
        );
        assert!(hist.windows(2).all(|w| w[1] < w[0]));
        assert!((m.x[0] - 3.0).abs() < 1e-6 && (m.x[1] + 1.0).abs() < 1e-4);
        let capped = pattern_search(|x| x[0] * x[0], &[5.0], 1.0, 1e-9, 1, None);
        assert_eq!(capped.evals, 1);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 2.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (fx - 2.0).abs() < 1e-12);
    }
}

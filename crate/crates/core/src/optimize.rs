//! Derivative-free local maximisation: compass search and Nelder–Mead.
//!
//! Both routines maximise `f` and count every evaluation against `max_evals`.
//! Constraints are the caller's business (project inside `f`).

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Compass search: try `+-step` along each axis, halve the step when no axis
/// improves, stop at `min_step` or the evaluation budget.
pub fn coordinate_search(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    min_step: f64,
    max_evals: usize,
) -> Optimum {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1;
    let mut h = step;
    while h >= min_step && evals < max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                if evals >= max_evals {
                    break;
                }
                let old = x[i];
                x[i] = old + dir * h;
                let v = f(&x);
                evals += 1;
                if v > fx {
                    fx = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Optimum { x, value: fx, evals }
}

/// Nelder–Mead with standard coefficients (1, 2, 1/2, 1/2), maximising.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, ftol: f64, max_evals: usize) -> Optimum {
    let d = x0.len();
    if d == 0 {
        let v = f(x0);
        return Optimum {
            x: Vec::new(),
            value: v,
            evals: 1,
        };
    }
    // Work with g = -f so the textbook minimisation steps apply unchanged.
    let mut evals = 0;
    let mut g = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = -f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = g(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = g(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|(x, _)| x[k]).sum::<f64>() / d as f64)
            .collect();
        let along =
            |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0, &simplex[d].0);
        let fr = g(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0, &simplex[d].0);
            let fe = g(&xe, &mut evals);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[d].1 {
            let xc = along(0.5, &simplex[d].0);
            let fc = g(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5, &simplex[d].0);
            let fc = g(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[d].1.min(fr) {
            simplex[d] = (xc, fc);
            continue;
        }
        // Shrink towards the best vertex.
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let v = g(&x, &mut evals);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Optimum { x, value: -v, evals }
}

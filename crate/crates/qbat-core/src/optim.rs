//! Derivative-free minimization (Nelder–Mead) with seeded restarts.
//!
//! The objectives in this crate — retrieved charge over measurement frames,
//! average marginal entropy over decomposition isometries — are smooth,
//! low-dimensional (≤ ~30 parameters), periodic in every coordinate, and
//! multimodal. Nelder–Mead with a handful of random restarts is reliable and
//! fast here; the restart layer lives with the callers, which know how to
//! seed and combine runs deterministically.

/// Options for a single Nelder–Mead run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NmOptions {
    /// Iteration cap.
    pub max_iters: usize,
    /// Terminate when the simplex's best–worst value spread falls below this.
    pub ftol: f64,
    /// Initial simplex step added to each coordinate of the start point.
    pub step: f64,
}

/// Result of a single Nelder–Mead run.
#[derive(Debug, Clone)]
pub(crate) struct NmResult {
    /// Best point ever evaluated (not merely the final simplex best).
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub fx: f64,
    /// True when the run stopped on the spread tolerance rather than the cap.
    #[cfg_attr(not(test), allow(dead_code))]
    pub converged: bool,
}

/// Minimizes `f` from `x0` with the standard Nelder–Mead moves
/// (reflection 1, expansion 2, contraction ½, shrink ½).
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NmOptions,
) -> NmResult {
    let n = x0.len();
    if n == 0 {
        let fx = f(x0);
        return NmResult {
            x: Vec::new(),
            fx,
            converged: true,
        };
    }

    // Initial simplex: x0 plus a step along each coordinate.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut best_x = simplex[0].clone();
    let mut best_f = values[0];
    let note_best = |x: &[f64], fx: f64, best_x: &mut Vec<f64>, best_f: &mut f64| {
        if fx < *best_f {
            *best_f = fx;
            best_x.clear();
            best_x.extend_from_slice(x);
        }
    };
    for (v, &fv) in simplex.iter().zip(&values) {
        note_best(v, fv, &mut best_x, &mut best_f);
    }

    let mut converged = false;
    for _ in 0..opts.max_iters {
        // Order the simplex: best first, worst last.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        if values[n] - values[0] < opts.ftol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for v in simplex.iter().take(n) {
            for (c, &vi) in centroid.iter_mut().zip(v) {
                *c += vi;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let worst = simplex[n].clone();
        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let reflected = lerp(1.0);
        let fr = f(&reflected);
        note_best(&reflected, fr, &mut best_x, &mut best_f);

        if fr < values[0] {
            // Try to expand past the reflection.
            let expanded = lerp(2.0);
            let fe = f(&expanded);
            note_best(&expanded, fe, &mut best_x, &mut best_f);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        // Contract toward the centroid, outside or inside.
        let contracted = if fr < values[n] {
            lerp(0.5)
        } else {
            lerp(-0.5)
        };
        let fc = f(&contracted);
        note_best(&contracted, fc, &mut best_x, &mut best_f);
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        // Shrink everything toward the best vertex.
        let anchor = simplex[0].clone();
        for k in 1..=n {
            for (xi, &ai) in simplex[k].iter_mut().zip(&anchor) {
                *xi = ai + 0.5 * (*xi - ai);
            }
            let v = simplex[k].clone();
            values[k] = f(&v);
            note_best(&v, values[k], &mut best_x, &mut best_f);
        }
    }

    NmResult {
        x: best_x,
        fx: best_f,
        converged,
    }
}

//! Nelder-Mead simplex maximization inside a box, with reflection at the
//! box faces.

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub lower: f64,
    pub upper: f64,
    /// Stop when the largest vertex-to-vertex distance falls below this.
    pub diameter_tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            lower: 0.0,
            upper: 1.2,
            diameter_tolerance: 1e-4,
            max_evaluations: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub best: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Folds a coordinate back into `[lower, upper]` by mirror reflection. The
/// lower face is open: a point landing exactly on it is nudged inside.
pub fn reflect_into(x: f64, lower: f64, upper: f64) -> f64 {
    let width = upper - lower;
    let mut y = x;
    // at most a couple of folds for any sane step
    for _ in 0..8 {
        if y < lower {
            y = 2.0 * lower - y;
        } else if y > upper {
            y = 2.0 * upper - y;
        } else {
            break;
        }
    }
    let y = y.clamp(lower, upper);
    if y <= lower {
        lower + 1e-9 * width
    } else {
        y
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in simplex.iter().enumerate() {
        for b in &simplex[i + 1..] {
            let dist = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Maximizes `f` from the simplex `start, start + steps[i] e_i`.
pub fn maximize(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    steps: &[f64],
    opts: &Options,
) -> Run {
    let dim = start.len();
    let fix = |v: Vec<f64>| -> Vec<f64> {
        v.into_iter()
            .map(|x| reflect_into(x, opts.lower, opts.upper))
            .collect()
    };
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(fix(start.to_vec()));
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += steps[i];
        simplex.push(fix(v));
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evaluations)).collect();
    let mut converged = false;

    while evaluations < opts.max_evaluations {
        // descending by value: best first
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < opts.diameter_tolerance {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let along = |coef: f64| -> Vec<f64> {
            fix(centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect())
        };

        let reflected = along(1.0);
        let fr = eval(&reflected, &mut evaluations);
        if fr > values[0] {
            let expanded = along(2.0);
            let fe = eval(&expanded, &mut evaluations);
            if fe > fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr > values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr > values[dim] {
            let c = along(0.5);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        } else {
            let c = along(-0.5);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        };
        if fc > values[dim].max(fr) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].clone();
        for i in 1..=dim {
            simplex[i] = fix(best
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect());
            values[i] = eval(&simplex[i], &mut evaluations);
        }
    }

    let best = (0..=dim)
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Run {
        best: simplex[best].clone(),
        value: values[best],
        evaluations,
        converged,
    }
}

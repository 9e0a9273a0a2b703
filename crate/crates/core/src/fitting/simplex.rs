//! Nelder-Mead on the unit box. Callers map physical bounds onto [0, 1]
//! per coordinate. The simplex lives in unbounded angles z with
//! x = (1 + sin z)/2, so it cannot collapse onto a face of the box.

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub max_evaluations: usize,
    /// Simplex diameter (box coordinates) below which the search stops.
    pub x_tolerance: f64,
    /// Relative spread of vertex values below which the search stops.
    pub f_tolerance: f64,
    /// Initial simplex edge in angle units.
    pub initial_step: f64,
    pub max_restarts: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn to_box(z: &[f64]) -> Vec<f64> {
    z.iter().map(|z| 0.5 * (1.0 + z.sin())).collect()
}

fn from_box(x: &[f64]) -> Vec<f64> {
    x.iter().map(|x| (2.0 * x.clamp(0.0, 1.0) - 1.0).asin()).collect()
}

fn initial_simplex(z0: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut simplex = vec![z0.to_vec()];
    for i in 0..z0.len() {
        let mut v = z0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    simplex
}

/// Largest coordinate spread of the simplex, measured in the box.
fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = to_box(&simplex[0]);
    simplex[1..]
        .iter()
        .map(|v| to_box(v).iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

struct Counter<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, z: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(&to_box(z));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

fn descend<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counter<F>,
    x0: &[f64],
    step: f64,
    opts: &SimplexOptions,
    iterations: &mut usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex = initial_simplex(x0, step);
    let mut values: Vec<f64> = simplex.iter().map(|v| obj.eval(v)).collect();

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = diameter(&simplex);
        if size < opts.x_tolerance || (spread <= opts.f_tolerance * values[0].abs() && size < 1e-4) {
            return (simplex.swap_remove(0), values[0], true);
        }
        if obj.evaluations >= opts.max_evaluations {
            return (simplex.swap_remove(0), values[0], false);
        }
        *iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let towards = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = towards(REFLECT);
        let fr = obj.eval(&xr);
        if fr < values[0] {
            let xe = towards(REFLECT * EXPAND);
            let fe = obj.eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = towards(REFLECT * CONTRACT);
            let fc = obj.eval(&xc);
            (xc, fc)
        } else {
            let xc = towards(-CONTRACT);
            let fc = obj.eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            values[i] = obj.eval(&shrunk);
            simplex[i] = shrunk;
        }
    }
}

/// Minimise `f` over [0, 1]^n from `x0`. After each convergence the search
/// restarts from the best point with a fresh simplex; it stops once a
/// restart no longer improves the value.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum {
    let mut obj = Counter { f, evaluations: 0 };
    let mut iterations = 0;
    let start = from_box(x0);
    if start.is_empty() {
        obj.eval(&start);
        return Minimum {
            x: start,
            evaluations: obj.evaluations,
            iterations: 0,
            converged: true,
        };
    }

    let (mut x, mut value, mut converged) = descend(&mut obj, &start, opts.initial_step, opts, &mut iterations);
    for _ in 0..opts.max_restarts {
        if !converged {
            break;
        }
        let (x2, v2, c2) = descend(&mut obj, &x, opts.initial_step, opts, &mut iterations);
        let improved = v2 < value - opts.f_tolerance * value.abs();
        if v2 <= value {
            x = x2;
            value = v2;
        }
        converged = c2;
        if !improved {
            break;
        }
    }
    Minimum {
        x: to_box(&x),
        evaluations: obj.evaluations,
        iterations,
        converged,
    }
}

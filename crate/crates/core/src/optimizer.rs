//! Bounded Nelder–Mead with seeded restarts.
//!
//! Every trial point is projected onto the box before it is evaluated, so
//! the search never leaves the feasible set. Expansion, contraction and
//! shrink coefficients follow the dimension-adaptive choice of Gao and Han,
//! which behaves much better than the textbook constants once the decision
//! vector has more than a handful of entries. Candidates whose objective is
//! not finite are treated as `+inf` and therefore never accepted.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidInput(format!(
                "bound lengths differ: {} vs {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("box bounds"));
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidInput(format!(
                "lower bound exceeds upper bound at index {i}: {} > {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }

    pub fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    pub max_evals: usize,
    /// Simplex diameter (inf-norm, absolute) below which a run has converged.
    pub x_tol: f64,
    /// Spread of simplex values, relative to `max(1, |f_best|)`.
    pub f_tol: f64,
    /// Additional runs restarted from the incumbent after convergence.
    pub restarts: usize,
    pub seed: u64,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
}

impl OptimizerOptions {
    /// Default options for a `dim`-dimensional problem: 500 evaluations per
    /// dimension.
    pub fn for_dim(dim: usize) -> Self {
        Self { max_evals: 500 * dim.max(1), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(Error::InvalidInput("max_evals must be at least 1".into()));
        }
        if !(self.x_tol > 0.0 && self.f_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step <= 1.0) {
            return Err(Error::InvalidInput("initial_step must be in (0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { max_evals: 500, x_tol: 1e-6, f_tol: 1e-9, restarts: 1, seed: 0, initial_step: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// The final run met both tolerances before the budget ran out.
    pub converged: bool,
}

struct Counted<'a, F> {
    f: &'a mut F,
    evals: usize,
    max: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<'_, F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.max
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }
}

/// Minimizes `objective` over `bounds` starting from `x0`.
///
/// The returned point is feasible and never worse than `x0`. Identical
/// inputs and `opts.seed` give identical results.
pub fn minimize<F>(mut objective: F, x0: &[f64], bounds: &BoxBounds, opts: &OptimizerOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    opts.validate()?;
    if x0.len() != bounds.dim() {
        return Err(Error::InvalidInput(format!(
            "start point has {} entries, bounds have {}",
            x0.len(),
            bounds.dim()
        )));
    }
    if !bounds.contains(x0) {
        return Err(Error::InvalidInput("start point lies outside the bounds".into()));
    }
    let mut fun = Counted { f: &mut objective, evals: 0, max: opts.max_evals };
    let f0 = fun.eval(x0);
    if !f0.is_finite() {
        return Err(Error::NonFinite("objective at the start point"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_x = x0.to_vec();
    let mut best_f = f0;
    let mut converged = false;
    for run in 0..=opts.restarts {
        if fun.exhausted() {
            break;
        }
        let signs: Option<Vec<f64>> = (run > 0).then(|| {
            (0..bounds.dim())
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 } * rng.gen_range(0.5..1.0))
                .collect()
        });
        let before = best_f;
        let (x, f, conv) = nelder_mead(&mut fun, &best_x, best_f, bounds, opts, signs.as_deref());
        converged = conv;
        if f < best_f {
            best_f = f;
            best_x = x;
        }
        // A restart that finds nothing new ends the search.
        if run > 0 && before - best_f <= opts.f_tol * best_f.abs().max(1.0) {
            break;
        }
    }
    Ok(Minimum { x: best_x, f: best_f, evals: fun.evals, converged })
}

/// One Nelder–Mead run from `x0` (already evaluated to `f0`). `steps`
/// scales and orients the initial simplex edges on restarts.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    fun: &mut Counted<'_, F>,
    x0: &[f64],
    f0: f64,
    bounds: &BoxBounds,
    opts: &OptimizerOptions,
    steps: Option<&[f64]>,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f0, true);
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    vals.push(f0);
    for i in 0..n {
        if fun.exhausted() {
            return best_of(&pts, &vals, false);
        }
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let width = hi - lo;
        let mut v = x0.to_vec();
        let mut step = opts.initial_step * width * steps.map_or(1.0, |s| s[i]);
        if width > 0.0 && step == 0.0 {
            step = opts.initial_step * width;
        }
        let up = x0[i] + step;
        v[i] = if up <= hi && up >= lo { up } else { x0[i] - step };
        v[i] = v[i].clamp(lo, hi);
        let f = fun.eval(&v);
        pts.push(v);
        vals.push(f);
    }

    let mut sum = vec![0.0; n];
    let recompute_sum = |pts: &[Vec<f64>], sum: &mut [f64]| {
        sum.iter_mut().for_each(|s| *s = 0.0);
        for p in pts {
            for (s, v) in sum.iter_mut().zip(p) {
                *s += v;
            }
        }
    };
    recompute_sum(&pts, &mut sum);

    let mut centroid = vec![0.0; n];
    let mut xr = vec![0.0; n];
    let mut xe = vec![0.0; n];
    let mut xc = vec![0.0; n];
    let mut iters_since_sum = 0usize;

    loop {
        let (best, worst, second) = rank(&vals);
        let spread = vals[worst] - vals[best];
        let f_ok = spread.is_finite() && spread <= opts.f_tol * vals[best].abs().max(1.0);
        let x_ok = pts.iter().all(|p| {
            p.iter().zip(&pts[best]).all(|(a, b)| (a - b).abs() <= opts.x_tol)
        });
        if f_ok && x_ok {
            return best_of(&pts, &vals, true);
        }
        if fun.exhausted() {
            return best_of(&pts, &vals, false);
        }
        // limit drift of the running sum
        iters_since_sum += 1;
        if iters_since_sum > 4 * n {
            recompute_sum(&pts, &mut sum);
            iters_since_sum = 0;
        }
        for j in 0..n {
            centroid[j] = (sum[j] - pts[worst][j]) / nf;
        }
        for j in 0..n {
            xr[j] = centroid[j] + alpha * (centroid[j] - pts[worst][j]);
        }
        bounds.project(&mut xr);
        let fr = fun.eval(&xr);

        let replace = |pts: &mut Vec<Vec<f64>>, vals: &mut Vec<f64>, sum: &mut Vec<f64>, x: &[f64], f: f64| {
            for j in 0..n {
                sum[j] += x[j] - pts[worst][j];
            }
            pts[worst].copy_from_slice(x);
            vals[worst] = f;
        };

        if fr < vals[best] {
            if fun.exhausted() {
                replace(&mut pts, &mut vals, &mut sum, &xr, fr);
                continue;
            }
            for j in 0..n {
                xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            }
            bounds.project(&mut xe);
            let fe = fun.eval(&xe);
            if fe < fr {
                replace(&mut pts, &mut vals, &mut sum, &xe, fe);
            } else {
                replace(&mut pts, &mut vals, &mut sum, &xr, fr);
            }
            continue;
        }
        if fr < vals[second] {
            replace(&mut pts, &mut vals, &mut sum, &xr, fr);
            continue;
        }
        if fun.exhausted() {
            continue;
        }
        let outside = fr < vals[worst];
        for j in 0..n {
            xc[j] = if outside {
                centroid[j] + rho * (xr[j] - centroid[j])
            } else {
                centroid[j] + rho * (pts[worst][j] - centroid[j])
            };
        }
        bounds.project(&mut xc);
        let fc = fun.eval(&xc);
        if (outside && fc <= fr) || (!outside && fc < vals[worst]) {
            replace(&mut pts, &mut vals, &mut sum, &xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let anchor = pts[best].clone();
        for i in 0..=n {
            if i == best {
                continue;
            }
            if fun.exhausted() {
                break;
            }
            for j in 0..n {
                pts[i][j] = anchor[j] + sigma * (pts[i][j] - anchor[j]);
            }
            vals[i] = fun.eval(&pts[i]);
        }
        recompute_sum(&pts, &mut sum);
        iters_since_sum = 0;
    }
}

/// Indices of the best, worst and second-worst vertices.
fn rank(vals: &[f64]) -> (usize, usize, usize) {
    let mut best = 0;
    let mut worst = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v < vals[best] {
            best = i;
        }
        if v >= vals[worst] {
            worst = i;
        }
    }
    let mut second = if worst == 0 { 1 } else { 0 };
    for (i, &v) in vals.iter().enumerate() {
        if i != worst && v > vals[second] {
            second = i;
        }
    }
    (best, worst, second)
}

fn best_of(pts: &[Vec<f64>], vals: &[f64], converged: bool) -> (Vec<f64>, f64, bool) {
    let (best, _, _) = rank(vals);
    (pts[best].clone(), vals[best], converged)
}

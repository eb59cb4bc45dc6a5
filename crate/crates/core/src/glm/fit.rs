//! Node-conditional maximum-likelihood fits.
//!
//! Gaussian targets use ordinary least squares with the error variance
//! profiled out; binary and count targets use Newton-Raphson / IRLS for the
//! logistic and Poisson log-link models.

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, VarKind};
use crate::error::{Error, Result};

/// Lower bound on the profiled Gaussian error variance.
pub const VARIANCE_FLOOR: f64 = 1e-8;
pub const MAX_IRLS_ITERATIONS: usize = 50;
pub const IRLS_TOLERANCE: f64 = 1e-8;
/// Added to the diagonal of the weighted normal equations.
pub const IRLS_RIDGE: f64 = 1e-6;
/// Coefficients are clamped to `[-COEF_CLAMP, COEF_CLAMP]`.
pub const COEF_CLAMP: f64 = 30.0;

// Relative pivot below which the scaled Gram matrix counts as singular.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmFit {
    /// Intercept first, then one coefficient per neighbour in input order.
    pub coefficients: Vec<f64>,
    /// Maximised conditional log-likelihood of the target column.
    pub loglik: f64,
    /// Neighbour count.
    pub k: usize,
    pub converged: bool,
    pub iterations: usize,
}

/// Fits the conditional model of `target` given `neighbours`, dispatching on
/// the target's kind.
pub fn fit_node(data: &Dataset, target: usize, neighbours: &[usize]) -> Result<GlmFit> {
    let design = Design::new(data, target, neighbours)?;
    design.check_rank()?;
    match data.kind(target) {
        VarKind::Gaussian => Ok(fit_gaussian(&design)),
        VarKind::Binary | VarKind::Count => Ok(fit_irls(&design)),
    }
}

/// Conditional log-likelihood of `target` at the given coefficients. For a
/// Gaussian target the error variance is profiled at its maximiser given the
/// coefficients (and floored).
pub fn conditional_loglik(
    data: &Dataset,
    target: usize,
    neighbours: &[usize],
    coefficients: &[f64],
) -> Result<f64> {
    let design = Design::new(data, target, neighbours)?;
    design.check_coefficients(coefficients)?;
    Ok(design.loglik(coefficients))
}

/// Analytic gradient of [`conditional_loglik`] in the coefficients.
pub fn conditional_gradient(
    data: &Dataset,
    target: usize,
    neighbours: &[usize],
    coefficients: &[f64],
) -> Result<Vec<f64>> {
    let design = Design::new(data, target, neighbours)?;
    design.check_coefficients(coefficients)?;
    let eta = design.linear_predictor(coefficients);
    let resid: Vec<f64> = match design.kind {
        VarKind::Gaussian => {
            let r: Vec<f64> = design.y.iter().zip(&eta).map(|(y, e)| y - e).collect();
            let rss: f64 = r.iter().map(|x| x * x).sum();
            let sigma2 = (rss / design.n as f64).max(VARIANCE_FLOOR);
            r.into_iter().map(|x| x / sigma2).collect()
        }
        VarKind::Binary => design.y.iter().zip(&eta).map(|(y, &e)| y - logistic(e)).collect(),
        VarKind::Count => design.y.iter().zip(&eta).map(|(y, &e)| y - e.exp()).collect(),
    };
    Ok(design.xt_vec(&resid))
}

struct Design<'a> {
    kind: VarKind,
    target: usize,
    neighbours: &'a [usize],
    y: &'a [f64],
    xs: Vec<&'a [f64]>,
    n: usize,
    ln_fact_sum: f64,
}

impl<'a> Design<'a> {
    fn new(data: &'a Dataset, target: usize, neighbours: &'a [usize]) -> Result<Self> {
        let p = data.p();
        if target >= p {
            return Err(Error::invalid(format!("target {target} out of range for p={p}")));
        }
        for (i, &u) in neighbours.iter().enumerate() {
            if u >= p {
                return Err(Error::invalid(format!("neighbour {u} out of range for p={p}")));
            }
            if u == target {
                return Err(Error::invalid(format!("target {target} listed as its own neighbour")));
            }
            if neighbours[..i].contains(&u) {
                return Err(Error::invalid(format!("neighbour {u} listed twice")));
            }
        }
        let k = neighbours.len();
        if data.n() < k + 2 {
            return Err(Error::invalid(format!(
                "n={} too small for {k} neighbours (need n >= k+2)",
                data.n()
            )));
        }
        Ok(Design {
            kind: data.kind(target),
            target,
            neighbours,
            y: data.column(target),
            xs: neighbours.iter().map(|&u| data.column(u)).collect(),
            n: data.n(),
            ln_fact_sum: data.ln_fact_sum(target),
        })
    }

    fn dim(&self) -> usize {
        self.xs.len() + 1
    }

    fn check_coefficients(&self, beta: &[f64]) -> Result<()> {
        if beta.len() != self.dim() {
            return Err(Error::invalid(format!(
                "{} coefficients supplied, model has {}",
                beta.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn rank_error(&self) -> Error {
        Error::RankDeficient {
            target: self.target,
            neighbours: self.neighbours.to_vec(),
        }
    }

    fn linear_predictor(&self, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![beta[0]; self.n];
        for (x, &b) in self.xs.iter().zip(&beta[1..]) {
            for (e, &xi) in eta.iter_mut().zip(x.iter()) {
                *e += b * xi;
            }
        }
        eta
    }

    /// `X' v` with the intercept column first.
    fn xt_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.push(v.iter().sum());
        for x in &self.xs {
            out.push(x.iter().zip(v).map(|(a, b)| a * b).sum());
        }
        out
    }

    /// Lower triangle of `X' W X` (unit weights when `w` is `None`), packed
    /// into a dense row-major `d x d` matrix with both triangles filled.
    fn gram(&self, w: Option<&[f64]>) -> Vec<f64> {
        let d = self.dim();
        let mut g = vec![0.0; d * d];
        let col = |j: usize| -> &[f64] { self.xs[j - 1] };
        for a in 0..d {
            for b in 0..=a {
                let s: f64 = match (a, b, w) {
                    (0, 0, None) => self.n as f64,
                    (0, 0, Some(w)) => w.iter().sum(),
                    (a, 0, None) => col(a).iter().sum(),
                    (a, 0, Some(w)) => col(a).iter().zip(w).map(|(x, w)| x * w).sum(),
                    (a, b, None) => col(a).iter().zip(col(b)).map(|(x, z)| x * z).sum(),
                    (a, b, Some(w)) => col(a)
                        .iter()
                        .zip(col(b))
                        .zip(w)
                        .map(|((x, z), w)| x * z * w)
                        .sum(),
                };
                g[a * d + b] = s;
                g[b * d + a] = s;
            }
        }
        g
    }

    /// Rejects designs whose columns (with intercept) are linearly dependent.
    fn check_rank(&self) -> Result<()> {
        let d = self.dim();
        let mut g = self.gram(None);
        let scale: Vec<f64> = (0..d).map(|i| g[i * d + i].sqrt()).collect();
        if scale.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(self.rank_error());
        }
        for a in 0..d {
            for b in 0..d {
                g[a * d + b] /= scale[a] * scale[b];
            }
        }
        match cholesky(&mut g, d) {
            Some(min_pivot) if min_pivot > RANK_TOLERANCE => Ok(()),
            _ => Err(self.rank_error()),
        }
    }

    fn loglik(&self, beta: &[f64]) -> f64 {
        let eta = self.linear_predictor(beta);
        match self.kind {
            VarKind::Gaussian => {
                let rss: f64 = self.y.iter().zip(&eta).map(|(y, e)| (y - e) * (y - e)).sum();
                gaussian_loglik(rss, self.n)
            }
            VarKind::Binary => self
                .y
                .iter()
                .zip(&eta)
                .map(|(&y, &e)| y * e - softplus(e))
                .sum(),
            VarKind::Count => {
                let s: f64 = self.y.iter().zip(&eta).map(|(&y, &e)| y * e - e.exp()).sum();
                s - self.ln_fact_sum
            }
        }
    }
}

fn gaussian_loglik(rss: f64, n: usize) -> f64 {
    let n = n as f64;
    let sigma2 = (rss / n).max(VARIANCE_FLOOR);
    -0.5 * n * (2.0 * std::f64::consts::PI * sigma2).ln() - rss / (2.0 * sigma2)
}

fn logistic(e: f64) -> f64 {
    if e >= 0.0 {
        1.0 / (1.0 + (-e).exp())
    } else {
        let z = e.exp();
        z / (1.0 + z)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn fit_gaussian(design: &Design<'_>) -> GlmFit {
    let d = design.dim();
    let mut g = design.gram(None);
    let rhs = design.xt_vec(design.y);
    cholesky(&mut g, d).expect("rank already checked");
    let beta = cholesky_solve(&g, d, &rhs);
    let loglik = design.loglik(&beta);
    GlmFit {
        coefficients: beta,
        loglik,
        k: d - 1,
        converged: loglik.is_finite(),
        iterations: 1,
    }
}

fn fit_irls(design: &Design<'_>) -> GlmFit {
    let d = design.dim();
    let n = design.n as f64;
    let mut beta = vec![0.0; d];
    if design.kind == VarKind::Count {
        let mean = design.y.iter().sum::<f64>() / n;
        beta[0] = if mean > 0.0 { mean.ln() } else { -COEF_CLAMP };
    }
    let mut ll = design.loglik(&beta);
    let mut converged = false;
    let mut clamped = beta.iter().any(|b| b.abs() >= COEF_CLAMP);
    let mut iterations = 0;

    while !clamped && iterations < MAX_IRLS_ITERATIONS {
        iterations += 1;
        let eta = design.linear_predictor(&beta);
        let (mu, w): (Vec<f64>, Vec<f64>) = match design.kind {
            VarKind::Binary => eta
                .iter()
                .map(|&e| {
                    let m = logistic(e);
                    (m, m * (1.0 - m))
                })
                .unzip(),
            _ => eta
                .iter()
                .map(|&e| {
                    let m = e.exp();
                    (m, m)
                })
                .unzip(),
        };
        let resid: Vec<f64> = design.y.iter().zip(&mu).map(|(y, m)| y - m).collect();
        let grad = design.xt_vec(&resid);
        let mut h = design.gram(Some(&w));
        for i in 0..d {
            h[i * d + i] += IRLS_RIDGE;
        }
        if cholesky(&mut h, d).is_none() {
            break;
        }
        let mut step = cholesky_solve(&h, d, &grad);

        // Step halving keeps the log-likelihood non-decreasing.
        let mut candidate: Vec<f64>;
        let mut cand_ll;
        let mut halvings = 0;
        loop {
            candidate = beta.iter().zip(&step).map(|(b, s)| b + s).collect();
            cand_ll = design.loglik(&candidate);
            if cand_ll.is_finite() && cand_ll >= ll - 1e-12 * ll.abs().max(1.0) {
                break;
            }
            halvings += 1;
            if halvings > 40 {
                break;
            }
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
        if !cand_ll.is_finite() {
            break;
        }
        for c in candidate.iter_mut() {
            if c.abs() > COEF_CLAMP {
                *c = c.signum() * COEF_CLAMP;
                clamped = true;
            }
        }
        let change = beta
            .iter()
            .zip(&candidate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta = candidate;
        ll = if clamped { design.loglik(&beta) } else { cand_ll };
        if !clamped && change < IRLS_TOLERANCE {
            converged = true;
            break;
        }
    }

    GlmFit {
        coefficients: beta,
        loglik: ll,
        k: d - 1,
        converged: converged && ll.is_finite(),
        iterations,
    }
}

/// In-place Cholesky of a dense row-major SPD matrix (lower triangle).
/// Returns the smallest pivot `L_ii^2`, or `None` if a pivot is not positive.
fn cholesky(a: &mut [f64], d: usize) -> Option<f64> {
    let mut min_pivot = f64::INFINITY;
    for j in 0..d {
        let mut s = a[j * d + j];
        for k in 0..j {
            s -= a[j * d + k] * a[j * d + k];
        }
        if !(s > 0.0) {
            return None;
        }
        min_pivot = min_pivot.min(s);
        let l = s.sqrt();
        a[j * d + j] = l;
        for i in j + 1..d {
            let mut t = a[i * d + j];
            for k in 0..j {
                t -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = t / l;
        }
    }
    Some(min_pivot)
}

fn cholesky_solve(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            y[i] -= l[i * d + k] * y[k];
        }
        y[i] /= l[i * d + i];
    }
    for i in (0..d).rev() {
        for k in i + 1..d {
            y[i] -= l[k * d + i] * y[k];
        }
        y[i] /= l[i * d + i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(columns: Vec<Vec<f64>>, kinds: Vec<VarKind>) -> Dataset {
        Dataset::new(columns, kinds).unwrap()
    }

    #[test]
    fn gaussian_exact_fit_hits_variance_floor() {
        let data = ds(vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]], vec![VarKind::Gaussian; 2]);
        let fit = fit_node(&data, 0, &[1]).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-10);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-10);
        assert!(fit.converged);
        // rss ~ 0, so loglik is pinned by the floor
        let expected = -1.5 * (2.0 * std::f64::consts::PI * VARIANCE_FLOOR).ln();
        assert!((fit.loglik - expected).abs() < 1e-6, "{} vs {expected}", fit.loglik);
    }

    #[test]
    fn balanced_bernoulli_intercept() {
        let data = ds(vec![vec![0.0, 1.0, 0.0, 1.0]], vec![VarKind::Binary]);
        let fit = fit_node(&data, 0, &[]).unwrap();
        assert!(fit.converged);
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.loglik - 4.0 * 0.5f64.ln()).abs() < 1e-12);
        assert!((fit.loglik + 2.7726).abs() < 1e-4);
    }

    #[test]
    fn gaussian_intercept_only_closed_form() {
        let y = vec![0.3, -1.2, 2.5, 0.7, 1.1, -0.4];
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let data = ds(vec![y], vec![VarKind::Gaussian]);
        let fit = fit_node(&data, 0, &[]).unwrap();
        let expected = -(n / 2.0) * ((2.0 * std::f64::consts::PI * var).ln() + 1.0);
        assert!((fit.coefficients[0] - mean).abs() < 1e-12);
        assert!((fit.loglik - expected).abs() < 1e-10);
    }

    #[test]
    fn poisson_intercept_only_closed_form() {
        let y = vec![0.0, 3.0, 1.0, 2.0, 5.0, 1.0];
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let lnfact: f64 = [0.0, 6f64.ln(), 0.0, 2f64.ln(), 120f64.ln(), 0.0].iter().sum();
        let expected = y.iter().sum::<f64>() * mean.ln() - n * mean - lnfact;
        let data = ds(vec![y], vec![VarKind::Count]);
        let fit = fit_node(&data, 0, &[]).unwrap();
        assert!(fit.converged);
        assert!((fit.coefficients[0] - mean.ln()).abs() < 1e-10);
        assert!((fit.loglik - expected).abs() < 1e-10);
    }

    #[test]
    fn collinear_neighbours_are_rank_deficient() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let y = vec![0.1, 0.5, -0.3, 0.8, 0.2];
        let data = ds(vec![y, x, x2, vec![3.0; 5]], vec![VarKind::Gaussian; 4]);
        assert!(matches!(fit_node(&data, 0, &[1, 2]), Err(Error::RankDeficient { .. })));
        // constant column duplicates the intercept
        assert!(matches!(fit_node(&data, 0, &[3]), Err(Error::RankDeficient { .. })));
        assert!(fit_node(&data, 0, &[1]).is_ok());
    }

    #[test]
    fn separation_signals_non_convergence() {
        let x = vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let data = ds(vec![y, x], vec![VarKind::Binary, VarKind::Gaussian]);
        let fit = fit_node(&data, 0, &[1]).unwrap();
        assert!(!fit.converged);
        assert!(fit.coefficients.iter().all(|c| c.abs() <= COEF_CLAMP));
    }

    #[test]
    fn all_zero_counts_do_not_converge() {
        let data = ds(vec![vec![0.0; 5]], vec![VarKind::Count]);
        let fit = fit_node(&data, 0, &[]).unwrap();
        assert!(!fit.converged);
    }

    #[test]
    fn precondition_errors() {
        let data = ds(vec![vec![1.0, 2.0, 4.0], vec![0.0, 1.0, 1.0], vec![2.0, 1.0, 3.0]], vec![VarKind::Gaussian; 3]);
        assert!(matches!(fit_node(&data, 0, &[0]), Err(Error::InvalidInput(_))));
        assert!(matches!(fit_node(&data, 0, &[1, 1]), Err(Error::InvalidInput(_))));
        assert!(matches!(fit_node(&data, 0, &[5]), Err(Error::InvalidInput(_))));
        // n=3 < k+2=4
        assert!(matches!(fit_node(&data, 0, &[1, 2]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gradient_vanishes_at_mle() {
        let x = vec![0.2, -1.3, 0.8, 1.7, -0.4, 0.0, 1.1, -0.9];
        let yb = vec![0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let yc = vec![2.0, 0.0, 1.0, 4.0, 1.0, 1.0, 3.0, 0.0];
        let data = ds(vec![x, yb, yc], vec![VarKind::Gaussian, VarKind::Binary, VarKind::Count]);
        for (t, nb) in [(0usize, vec![1usize, 2]), (1, vec![0, 2]), (2, vec![0, 1])] {
            let fit = fit_node(&data, t, &nb).unwrap();
            assert!(fit.converged);
            let g = conditional_gradient(&data, t, &nb, &fit.coefficients).unwrap();
            assert!(g.iter().all(|v| v.abs() < 1e-6), "target {t}: {g:?}");
            let ll = conditional_loglik(&data, t, &nb, &fit.coefficients).unwrap();
            assert_eq!(ll, fit.loglik);
        }
    }
}

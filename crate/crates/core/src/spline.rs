//! Cubic B-spline feature map over the staircase knot grid, plus the
//! second-derivative penalty matrix Ω with Ω_ij = ∫ Φ″_i Φ″_j.
//!
//! The basis is the clamped (open) cubic B-spline family on the breakpoints
//! {j−ε, j, j+ε : j = 0..s−1}: four-fold end knots, simple interior knots,
//! giving 3s + 2 basis functions. Evaluation outside the breakpoint range is
//! an error rather than an extrapolation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hash::Fingerprint;

const ORDER: usize = 4; // cubic
const DEGREE: usize = 3;
/// Slack allowed before an evaluation point counts as off-domain.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SplineBasis {
    /// Breakpoints τ: three per stair, strictly increasing.
    knots: Vec<f64>,
    /// Clamped knot vector with four-fold repeated ends.
    padded: Vec<f64>,
    dim: usize,
}

impl SplineBasis {
    pub fn order(&self) -> usize {
        ORDER
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The breakpoint grid τ.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new("spline-basis");
        fp.push_u64(self.dim as u64).push_f64s(&self.knots);
        fp.finish()
    }

    /// Greville abscissae: the coefficient vector θ_i = a·ξ_i + b represents
    /// the affine function a·x + b exactly.
    pub fn greville_abscissae(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (self.padded[i + 1] + self.padded[i + 2] + self.padded[i + 3]) / 3.0)
            .collect()
    }

    fn clamp_to_domain(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if x < lo - DOMAIN_TOL || x > hi + DOMAIN_TOL {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        Ok(x.clamp(lo, hi))
    }

    /// Index μ into the padded knots with padded[μ] ≤ x < padded[μ+1]
    /// (the last nonempty span is used at the right endpoint).
    fn find_span(&self, x: f64) -> usize {
        let last = self.knots.len() - 1;
        let seg = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(last - 1),
        };
        seg + DEGREE
    }

    /// Basis values and derivatives up to order `nu` (≤ 2) for the four
    /// basis functions supported on the span of x. Returns the global index
    /// of the first of them and the table ders[k][j] for derivative k.
    fn ders_on_span(&self, span: usize, x: f64, nu: usize) -> (usize, [[f64; ORDER]; 3]) {
        let t = &self.padded;
        let p = DEGREE;
        let mut ndu = [[0.0f64; ORDER]; ORDER];
        let mut left = [0.0f64; ORDER];
        let mut right = [0.0f64; ORDER];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = [[0.0f64; ORDER]; 3];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = [[0.0f64; ORDER]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0] = [0.0; ORDER];
            a[1] = [0.0; ORDER];
            a[0][0] = 1.0;
            for k in 1..=nu {
                let mut d = 0.0;
                let rk = r as i64 - k as i64;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as i64 - 1 <= pk as i64 { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let col = (rk + j as i64) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][col];
                    d += a[s2][j] * ndu[col][pk];
                }
                if r as i64 <= pk as i64 {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for k in 1..=nu {
            for j in 0..=p {
                ders[k][j] *= factor;
            }
            factor *= (p - k) as f64;
        }
        (span - p, ders)
    }

    /// The four nonzero basis values at x, with the global index of the
    /// first. Fast path used by the fitters.
    pub(crate) fn eval_local(&self, x: f64) -> Result<(usize, [f64; ORDER])> {
        let x = self.clamp_to_domain(x)?;
        let span = self.find_span(x);
        let (offset, ders) = self.ders_on_span(span, x, 0);
        Ok((offset, ders[0]))
    }

    pub(crate) fn eval_second_derivative_local(&self, x: f64) -> Result<(usize, [f64; ORDER])> {
        let x = self.clamp_to_domain(x)?;
        let span = self.find_span(x);
        let (offset, ders) = self.ders_on_span(span, x, 2);
        Ok((offset, ders[2]))
    }
}

/// Symmetric positive semidefinite penalty Ω with a two-dimensional affine
/// null space.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMatrix {
    omega: DMatrix<f64>,
}

impl PenaltyMatrix {
    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    /// θᵀΩθ, the squared second-derivative seminorm of the spline.
    pub fn quadratic_form(&self, theta: &[f64]) -> f64 {
        let d = self.dim();
        assert_eq!(theta.len(), d, "coefficient length mismatch");
        let mut total = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.omega[(i, j)] * theta[j];
            }
            total += theta[i] * row;
        }
        total
    }
}

/// Build the clamped cubic basis on the staircase grid: breakpoints
/// {j−ε, j, j+ε} for j = 0..s−1, dimension 3s + 2.
pub fn build_basis(s: usize, epsilon: f64) -> Result<SplineBasis> {
    if s == 0 {
        return Err(Error::InvalidParams("s must be at least 1".to_string()));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParams(format!(
            "epsilon must lie in (0, 0.5) (got {epsilon})"
        )));
    }
    let mut knots = Vec::with_capacity(3 * s);
    for j in 0..s {
        let a = j as f64;
        knots.push(a - epsilon);
        knots.push(a);
        knots.push(a + epsilon);
    }
    let mut padded = Vec::with_capacity(knots.len() + 6);
    for _ in 0..DEGREE {
        padded.push(knots[0]);
    }
    padded.extend_from_slice(&knots);
    for _ in 0..DEGREE {
        padded.push(*knots.last().unwrap());
    }
    let dim = knots.len() + 2;
    Ok(SplineBasis { knots, padded, dim })
}

/// The feature vector Φ(x): all basis values at x (at most four nonzero).
pub fn eval_features(basis: &SplineBasis, x: f64) -> Result<Vec<f64>> {
    let (offset, local) = basis.eval_local(x)?;
    let mut out = vec![0.0; basis.dim()];
    out[offset..offset + ORDER].copy_from_slice(&local);
    Ok(out)
}

/// Second derivatives Φ″(x) of every basis function at x.
pub fn eval_second_derivative(basis: &SplineBasis, x: f64) -> Result<Vec<f64>> {
    let (offset, local) = basis.eval_second_derivative_local(x)?;
    let mut out = vec![0.0; basis.dim()];
    out[offset..offset + ORDER].copy_from_slice(&local);
    Ok(out)
}

/// Assemble Ω per breakpoint interval with Simpson's rule, which is exact
/// here: the integrand is a product of piecewise-linear second derivatives.
pub fn build_penalty(basis: &SplineBasis) -> PenaltyMatrix {
    let d = basis.dim();
    let mut omega = DMatrix::<f64>::zeros(d, d);
    let bps = basis.knots();
    for r in 0..bps.len() - 1 {
        let (a, b) = (bps[r], bps[r + 1]);
        let h = b - a;
        let span = r + DEGREE;
        let (off, d2a) = basis.ders_on_span(span, a, 2);
        let (_, d2m) = basis.ders_on_span(span, 0.5 * (a + b), 2);
        let (_, d2b) = basis.ders_on_span(span, b, 2);
        for i in 0..ORDER {
            for j in 0..ORDER {
                let integral = h / 6.0
                    * (d2a[2][i] * d2a[2][j]
                        + 4.0 * d2m[2][i] * d2m[2][j]
                        + d2b[2][i] * d2b[2][j]);
                omega[(off + i, off + j)] += integral;
            }
        }
    }
    PenaltyMatrix { omega }
}

/// Model prediction Φ(x)ᵀθ.
pub fn predict(basis: &SplineBasis, theta: &[f64], x: f64) -> Result<f64> {
    if theta.len() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "theta has length {} but the basis has dimension {}",
            theta.len(),
            basis.dim()
        )));
    }
    let (offset, local) = basis.eval_local(x)?;
    Ok(local
        .iter()
        .enumerate()
        .map(|(k, &v)| v * theta[offset + k])
        .sum())
}

//! Closed-form transfer entropy for linear Gaussian systems.
//!
//! For a stationary bivariate AR(1) process every entropy is a function of
//! a lag-block covariance matrix, so transfer entropies and predictive
//! asymmetries can be evaluated without sampling.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::asymmetry::AsymmetryCurve;
use crate::embedding::EmbeddingParams;
use crate::error::{Error, Result};
use crate::estimators::TESpectrum;

/// Bivariate linear Gaussian models with known lag covariances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ARModel {
    /// `x_t = a x_{t−1} + w_t`, `y_t = c x_{t−1} + v_t`, with
    /// `w ~ N(0, σ_x²)`, `v ~ N(0, σ_y²)`.
    UnidirAr1 { a: f64, c: f64, sigma_x: f64, sigma_y: f64 },
    /// `x' = a x + s b y + u`, `y' = a y + s c x + v`; eigenvalues `a ± √(bc)`.
    BidirDistinctEigen { a: f64, b: f64, c: f64, s: f64, sigma_u: f64, sigma_v: f64 },
    /// `x' = (λ + a) x − b y + u`, `y' = (λ − a) y + (a²/b) x + v`; a single
    /// eigenvalue `λ` with a nontrivial Jordan block.
    BidirJordan { lambda: f64, a: f64, b: f64, sigma_u: f64, sigma_v: f64 },
}

impl ARModel {
    pub fn validate(&self) -> Result<()> {
        let sigmas_ok = |s: &[f64]| s.iter().all(|v| v.is_finite() && *v >= 0.0);
        match *self {
            ARModel::UnidirAr1 { a, c, sigma_x, sigma_y } => {
                if !(a.is_finite() && c.is_finite() && sigmas_ok(&[sigma_x, sigma_y])) {
                    return Err(Error::InvalidParams("coefficients must be finite, sigmas >= 0".into()));
                }
                if a.abs() >= 1.0 {
                    return Err(Error::NotStationary(alloc::format!("|a| = {} >= 1", a.abs())));
                }
            }
            ARModel::BidirDistinctEigen { a, b, c, s, sigma_u, sigma_v } => {
                if !(b > 0.0 && c > 0.0) || s * s != 1.0 || !sigmas_ok(&[sigma_u, sigma_v]) {
                    return Err(Error::InvalidKind("needs b, c > 0 and s = ±1".into()));
                }
                let r = libm::sqrt(b * c);
                if (a + r).abs() >= 1.0 || (a - r).abs() >= 1.0 {
                    return Err(Error::NotStationary(alloc::format!(
                        "eigenvalues {} and {} must lie in (−1, 1)",
                        a + r,
                        a - r
                    )));
                }
            }
            ARModel::BidirJordan { lambda, a, b, sigma_u, sigma_v } => {
                if b == 0.0 || a == 0.0 || !b.is_finite() || !a.is_finite() || !sigmas_ok(&[sigma_u, sigma_v]) {
                    return Err(Error::InvalidKind("needs finite a != 0 and b != 0".into()));
                }
                if lambda.abs() >= 1.0 {
                    return Err(Error::NotStationary(alloc::format!("|λ| = {} >= 1", lambda.abs())));
                }
            }
        }
        Ok(())
    }

    /// Transition matrix `A` of `X_{t+1} = A X_t + W_{t+1}`, row-major.
    pub fn transition(&self) -> [[f64; 2]; 2] {
        match *self {
            ARModel::UnidirAr1 { a, c, .. } => [[a, 0.0], [c, 0.0]],
            ARModel::BidirDistinctEigen { a, b, c, s, .. } => [[a, s * b], [s * c, a]],
            ARModel::BidirJordan { lambda, a, b, .. } => [[lambda + a, -b], [a * a / b, lambda - a]],
        }
    }

    /// Innovation variances `(Var u, Var v)`.
    pub fn noise_variances(&self) -> (f64, f64) {
        match *self {
            ARModel::UnidirAr1 { sigma_x, sigma_y, .. } => (sigma_x * sigma_x, sigma_y * sigma_y),
            ARModel::BidirDistinctEigen { sigma_u, sigma_v, .. }
            | ARModel::BidirJordan { sigma_u, sigma_v, .. } => (sigma_u * sigma_u, sigma_v * sigma_v),
        }
    }

    /// `Γ(k)[i][j] = Cov(X_i(t+k), X_j(t))` for `k ≥ 0`, variables ordered `(x, y)`.
    fn autocov(&self, k: usize) -> [[f64; 2]; 2] {
        match *self {
            ARModel::UnidirAr1 { a, c, sigma_x, sigma_y } => {
                let vx = sigma_x * sigma_x / (1.0 - a * a);
                let ak = libm::pow(a, k as f64);
                let xx = ak * vx;
                let yy = c * c * ak * vx + if k == 0 { sigma_y * sigma_y } else { 0.0 };
                // Cov(x_{t+k}, y_{t+l}) = c·a^{|l−1−k|}·Var(x).
                let xy = c * libm::pow(a, (k + 1) as f64) * vx;
                let yx = c * libm::pow(a, k.abs_diff(1) as f64) * vx;
                [[xx, xy], [yx, yy]]
            }
            ARModel::BidirDistinctEigen { a, b, c, s, sigma_u, sigma_v } => {
                let (su2, sv2) = (sigma_u * sigma_u, sigma_v * sigma_v);
                let (al, be, ga, de) =
                    (0.5 / libm::sqrt(b), s * 0.5 / libm::sqrt(c), -0.5 / libm::sqrt(b), s * 0.5 / libm::sqrt(c));
                let (l1, l2) = (a + libm::sqrt(b * c), a - libm::sqrt(b * c));
                let (p1, p2) = (libm::pow(l1, k as f64), libm::pow(l2, k as f64));
                let cross = (al * ga * su2 + de * be * sv2) / (1.0 - l1 * l2);
                let hat = Hat {
                    xx: p1 / (1.0 - l1 * l1) * (al * al * su2 + be * be * sv2),
                    yy: p2 / (1.0 - l2 * l2) * (ga * ga * su2 + de * de * sv2),
                    yx: p2 * cross,
                    xy: p1 * cross,
                };
                hat.to_original(al, be, ga, de)
            }
            ARModel::BidirJordan { lambda, a, b, sigma_u, sigma_v } => {
                let (su2, sv2) = (sigma_u * sigma_u, sigma_v * sigma_v);
                let n2 = a * a + b * b;
                let (al, be, ga, de) = (a / b, -1.0, b / n2, a / n2);
                let q = 1.0 - lambda * lambda;
                let psi = (al * al * su2 + be * be * sv2) / q;
                let phi = lambda / q * psi + (al * ga * su2 + de * be * sv2) / q;
                let theta = 2.0 * lambda / q * phi + psi / q + (ga * ga * su2 + de * de * sv2) / q;
                let lk = libm::pow(lambda, k as f64);
                let dk = if k == 0 { 0.0 } else { k as f64 * libm::pow(lambda, (k - 1) as f64) };
                let hat = Hat { xx: lk * psi, yy: lk * theta + dk * phi, yx: lk * phi + dk * psi, xy: lk * phi };
                hat.to_original(al, be, ga, de)
            }
        }
    }
}

/// Lag-`k` covariances of the transformed variables `x̂ = αx + βy`, `ŷ = γx + δy`.
struct Hat {
    /// `Cov(x̂_{t+k}, x̂_t)`
    xx: f64,
    /// `Cov(ŷ_{t+k}, ŷ_t)`
    yy: f64,
    /// `Cov(ŷ_{t+k}, x̂_t)`
    yx: f64,
    /// `Cov(x̂_{t+k}, ŷ_t)`
    xy: f64,
}

impl Hat {
    fn to_original(&self, al: f64, be: f64, ga: f64, de: f64) -> [[f64; 2]; 2] {
        let d2 = (al * de - be * ga) * (al * de - be * ga);
        let xx = de * de * self.xx + be * be * self.yy - de * be * (self.xy + self.yx);
        let yy = al * al * self.yy + ga * ga * self.xx - al * ga * (self.xy + self.yx);
        let yx = al * de * self.yx + ga * be * self.xy - al * be * self.yy - ga * de * self.xx;
        let xy = al * de * self.xy + ga * be * self.yx - al * be * self.yy - ga * de * self.xx;
        [[xx / d2, xy / d2], [yx / d2, yy / d2]]
    }
}

/// Which of the two model variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Var {
    X,
    Y,
}

impl Var {
    fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
        }
    }

    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

/// Joint covariance of `x` and `y` at lags `−η_max..=η_max`.
///
/// Row `v·(2η_max+1) + (lag + η_max)` holds variable `v` at `lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagCovariance {
    matrix: DMatrix<f64>,
    eta_max: usize,
}

impl LagCovariance {
    pub fn new(model: &ARModel, eta_max: usize) -> Result<Self> {
        model.validate()?;
        let w = 2 * eta_max + 1;
        let gammas: Vec<[[f64; 2]; 2]> = (0..w).map(|k| model.autocov(k)).collect();
        let matrix = DMatrix::from_fn(2 * w, 2 * w, |r, c| {
            let (vi, li) = (r / w, (r % w) as i64);
            let (vj, lj) = (c / w, (c % w) as i64);
            let d = li - lj;
            if d >= 0 {
                gammas[d as usize][vi][vj]
            } else {
                gammas[(-d) as usize][vj][vi]
            }
        });
        Ok(LagCovariance { matrix, eta_max })
    }

    pub fn eta_max(&self) -> usize {
        self.eta_max
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Row of `var` at `lag`, if the lag is covered.
    pub fn index(&self, var: Var, lag: i64) -> Option<usize> {
        let m = self.eta_max as i64;
        (lag.abs() <= m).then(|| var.index() * (2 * self.eta_max + 1) + (lag + m) as usize)
    }

    /// `Cov(a at lag_a, b at lag_b)`.
    pub fn get(&self, a: Var, lag_a: i64, b: Var, lag_b: i64) -> Option<f64> {
        Some(self.matrix[(self.index(a, lag_a)?, self.index(b, lag_b)?)])
    }

    fn submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])])
    }
}

/// `½ log₂((2πe)^d det Σ)` in bits.
///
/// Fails with [`Error::SingularCovariance`] when `det Σ` is at most
/// `1e−12` times the `d`-th power of the diagonal's geometric mean.
pub fn gaussian_entropy(cov: &DMatrix<f64>) -> Result<f64> {
    let d = cov.nrows();
    if d != cov.ncols() {
        return Err(Error::InvalidInput("covariance must be square".into()));
    }
    if d == 0 {
        return Ok(0.0);
    }
    if (0..d).any(|i| !(cov[(i, i)] > 0.0)) {
        return Err(Error::SingularCovariance);
    }
    let chol = Cholesky::new(cov.clone()).ok_or(Error::SingularCovariance)?;
    let l = chol.l_dirty();
    let ln_det: f64 = 2.0 * (0..d).map(|i| libm::log(l[(i, i)])).sum::<f64>();
    let ln_diag: f64 = (0..d).map(|i| libm::log(cov[(i, i)])).sum();
    if !ln_det.is_finite() || ln_det - ln_diag <= libm::log(1e-12) {
        return Err(Error::SingularCovariance);
    }
    let ln_2pie = libm::log(2.0 * core::f64::consts::PI * core::f64::consts::E);
    Ok(0.5 * (d as f64 * ln_2pie + ln_det) / core::f64::consts::LN_2)
}

/// `I(S; T_ν | T_pp) = h(S,T_pp) + h(T_ν,T_pp) − h(T_pp) − h(S,T_ν,T_pp)` in bits.
pub fn exact_cmi(cov: &LagCovariance, source: &[usize], future: &[usize], cond: &[usize]) -> Result<f64> {
    let n = cov.matrix.nrows();
    let mut all: Vec<usize> = source.iter().chain(future).chain(cond).copied().collect();
    if all.iter().any(|&i| i >= n) {
        return Err(Error::InvalidInput("index outside the covariance matrix".into()));
    }
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("index sets must be disjoint".into()));
    }
    let join = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
    let h = |idx: &[usize]| gaussian_entropy(&cov.submatrix(idx));
    Ok(h(&join(source, cond))? + h(&join(future, cond))? - h(cond)? - h(&join(&join(source, future), cond))?)
}

/// Exact `TE_{source→target}(ν)` with the target future at lag `ν` and past
/// blocks at lags `0, −τ, …` as given by `params` (`k = 1`, no conditionals).
pub fn exact_te(cov: &LagCovariance, source: Var, nu: i64, params: &EmbeddingParams) -> Result<f64> {
    if nu == 0 {
        return Err(Error::InvalidInput("prediction lag must be nonzero".into()));
    }
    if params.k != 1 || params.n != 0 {
        return Err(Error::InvalidInput("exact TE supports k = 1 without conditionals".into()));
    }
    params.validate()?;
    let target = source.other();
    let range_err = || Error::LagOutOfRange { eta: nu.unsigned_abs() as usize, max: cov.eta_max };
    let lags = |count: usize| (0..count as i64).map(move |i| -i * params.tau as i64);
    let src: Vec<usize> =
        lags(params.m).map(|l| cov.index(source, l).ok_or_else(range_err)).collect::<Result<_>>()?;
    let fut = [cov.index(target, nu).ok_or_else(range_err)?];
    // The future coordinate may coincide with a past lag for negative ν;
    // it is then dropped from the conditioning block, giving zero TE.
    let cond: Vec<usize> = lags(params.l)
        .map(|l| cov.index(target, l).ok_or_else(range_err))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&i| i != fut[0])
        .collect();
    if cond.len() < params.l {
        return Ok(0.0);
    }
    exact_cmi(cov, &src, &fut, &cond)
}

/// Exact transfer-entropy spectrum from `source` to the other variable.
pub fn exact_spectrum(model: &ARModel, source: Var, eta_max: usize, params: &EmbeddingParams) -> Result<TESpectrum> {
    if eta_max == 0 {
        return Err(Error::InvalidInput("eta_max must be at least 1".into()));
    }
    let depth = (params.l.max(params.m) - 1) * params.tau;
    let cov = LagCovariance::new(model, eta_max.max(depth))?;
    let m = eta_max as i32;
    let lags: Vec<i32> = (-m..=m).filter(|&l| l != 0).collect();
    let values = lags
        .iter()
        .map(|&nu| exact_te(&cov, source, nu as i64, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(TESpectrum { estimator: "exact".into(), params: *params, lags, values })
}

/// Exact asymmetry curves in both directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactAsymmetry {
    pub x_to_y: AsymmetryCurve,
    pub y_to_x: AsymmetryCurve,
}

/// Exact 𝔸 and 𝒜^f for `η = 1..=eta_max` with `k = l = m = 1`.
pub fn exact_asymmetry(model: &ARModel, eta_max: usize, f: f64) -> Result<ExactAsymmetry> {
    let p = EmbeddingParams::default();
    Ok(ExactAsymmetry {
        x_to_y: AsymmetryCurve::from_spectrum(&exact_spectrum(model, Var::X, eta_max, &p)?, f)?,
        y_to_x: AsymmetryCurve::from_spectrum(&exact_spectrum(model, Var::Y, eta_max, &p)?, f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use rand_distr::{Distribution, StandardNormal};

    const UNI: ARModel = ARModel::UnidirAr1 { a: 0.8, c: 0.8, sigma_x: 1.0, sigma_y: 1.0 };

    /// Lag covariances by iterating `Σ ← AΣAᵀ + Q` and `Γ(k) = A^k Σ`.
    fn lyapunov_autocov(model: &ARModel, k: usize) -> [[f64; 2]; 2] {
        let a = model.transition();
        let (qu, qv) = model.noise_variances();
        let mul = |p: [[f64; 2]; 2], q: [[f64; 2]; 2]| {
            let mut r = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
                }
            }
            r
        };
        let t = |p: [[f64; 2]; 2]| [[p[0][0], p[1][0]], [p[0][1], p[1][1]]];
        let mut s = [[0.0; 2]; 2];
        for _ in 0..20_000 {
            let n = mul(mul(a, s), t(a));
            s = [[n[0][0] + qu, n[0][1]], [n[1][0], n[1][1] + qv]];
        }
        let mut g = s;
        for _ in 0..k {
            g = mul(a, g);
        }
        g
    }

    fn models() -> [ARModel; 6] {
        [
            UNI,
            ARModel::UnidirAr1 { a: -0.5, c: 1.3, sigma_x: 0.7, sigma_y: 1.4 },
            ARModel::BidirDistinctEigen { a: 0.3, b: 0.2, c: 0.3, s: 1.0, sigma_u: 1.0, sigma_v: 0.5 },
            ARModel::BidirDistinctEigen { a: 0.5, b: 0.1, c: 0.4, s: -1.0, sigma_u: 0.8, sigma_v: 1.2 },
            ARModel::BidirJordan { lambda: 0.6, a: 0.3, b: 0.5, sigma_u: 1.0, sigma_v: 1.0 },
            ARModel::BidirJordan { lambda: -0.4, a: -0.2, b: 1.5, sigma_u: 0.6, sigma_v: 1.1 },
        ]
    }

    #[test]
    fn closed_forms_match_lyapunov_iteration() {
        for m in models() {
            for k in 0..8 {
                let (g, o) = (m.autocov(k), lyapunov_autocov(&m, k));
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((g[i][j] - o[i][j]).abs() < 1e-9, "{m:?} k={k} [{i}][{j}]: {} vs {}", g[i][j], o[i][j]);
                    }
                }
            }
        }
    }

    #[test]
    fn unidirectional_values() {
        let c = LagCovariance::new(&UNI, 3).unwrap();
        assert!((c.get(Var::X, 0, Var::X, 0).unwrap() - 2.777_777_777_8).abs() < 1e-9);
        assert!((c.get(Var::X, 2, Var::X, 0).unwrap() - 1.777_777_777_8).abs() < 1e-9);
        let dec = LagCovariance::new(&ARModel::UnidirAr1 { a: 0.8, c: 0.0, sigma_x: 1.0, sigma_y: 1.0 }, 3).unwrap();
        for l1 in -3..=3 {
            for l2 in -3..=3 {
                assert_eq!(dec.get(Var::X, l1, Var::Y, l2), Some(0.0));
            }
        }
    }

    #[test]
    fn matrices_are_symmetric_psd() {
        for m in models() {
            let c = LagCovariance::new(&m, 6).unwrap();
            let mat = c.matrix();
            assert_eq!(mat, &mat.transpose());
            let eig = nalgebra::SymmetricEigen::new(mat.clone());
            let tr = mat.trace();
            assert!(eig.eigenvalues.iter().all(|&e| e >= -1e-9 * tr), "{m:?}");
            assert!((0..mat.nrows()).all(|i| mat[(i, i)] > 0.0));
        }
    }

    #[test]
    fn symmetric_example_one_has_no_hat_cross_covariance() {
        let m = ARModel::BidirDistinctEigen { a: 0.2, b: 0.4, c: 0.4, s: 1.0, sigma_u: 0.9, sigma_v: 0.9 };
        let ARModel::BidirDistinctEigen { b, c, s, sigma_u, sigma_v, .. } = m else { unreachable!() };
        let (al, ga) = (0.5 / libm::sqrt(b), -0.5 / libm::sqrt(b));
        let (be, de) = (s * 0.5 / libm::sqrt(c), s * 0.5 / libm::sqrt(c));
        let cross = al * ga * sigma_u * sigma_u + de * be * sigma_v * sigma_v;
        assert!(cross.abs() < 1e-15);
    }

    #[test]
    fn invalid_models() {
        let jordan = ARModel::BidirJordan { lambda: 0.5, a: 0.0, b: 1.0, sigma_u: 1.0, sigma_v: 1.0 };
        assert!(matches!(jordan.validate(), Err(Error::InvalidKind(_))));
        let unstable = ARModel::UnidirAr1 { a: 1.0, c: 0.5, sigma_x: 1.0, sigma_y: 1.0 };
        assert!(matches!(unstable.validate(), Err(Error::NotStationary(_))));
        let eig = ARModel::BidirDistinctEigen { a: 0.5, b: 0.5, c: 0.5, s: 1.0, sigma_u: 1.0, sigma_v: 1.0 };
        assert!(matches!(eig.validate(), Err(Error::NotStationary(_))));
    }

    #[test]
    fn entropy_closed_forms() {
        let one = DMatrix::from_element(1, 1, 1.0);
        assert!((gaussian_entropy(&one).unwrap() - 2.047_095_585_180_641).abs() < 1e-12);
        let two = DMatrix::<f64>::identity(2, 2);
        assert!((gaussian_entropy(&two).unwrap() - 4.094_191_170_361_282).abs() < 1e-12);
        let sing = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(gaussian_entropy(&sing), Err(Error::SingularCovariance));
    }

    #[test]
    fn exact_te_hand_value() {
        // Var(y_{t+1} | y_t) = V − Cov(y_{t+1}, y_t)²/V with V = 25/9 and
        // Cov = 0.64·0.8·25/9; Var(y_{t+1} | x_t, y_t) = 1.
        let v = 25.0 / 9.0;
        let cv = 0.512 * v;
        let expected = 0.5 * libm::log2(v - cv * cv / v);
        let s = exact_spectrum(&UNI, Var::X, 1, &EmbeddingParams::default()).unwrap();
        assert!((s.get(1).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn decoupled_model_is_exactly_zero() {
        let m = ARModel::UnidirAr1 { a: 0.8, c: 0.0, sigma_x: 1.0, sigma_y: 1.0 };
        let e = exact_asymmetry(&m, 20, 1.0).unwrap();
        for curve in [&e.x_to_y, &e.y_to_x] {
            assert!(curve.a.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn exact_te_is_nonnegative() {
        for m in models() {
            for src in [Var::X, Var::Y] {
                let s = exact_spectrum(&m, src, 8, &EmbeddingParams::default()).unwrap();
                assert!(s.values.iter().all(|&v| v >= -1e-10), "{m:?} {src:?}");
            }
        }
    }

    #[test]
    fn richer_histories_are_supported() {
        let p = EmbeddingParams { l: 2, m: 2, ..EmbeddingParams::default() };
        let s = exact_spectrum(&UNI, Var::X, 4, &p).unwrap();
        assert!(s.values.iter().all(|v| v.is_finite() && *v >= -1e-10));
        // The source is Markov of order 1, so a second source lag adds nothing.
        let base = exact_spectrum(&UNI, Var::X, 4, &EmbeddingParams { l: 2, ..EmbeddingParams::default() }).unwrap();
        assert!((s.get(1).unwrap() - base.get(1).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn matches_sample_covariance_of_simulation() {
        // Gaussian CMI evaluated on the empirical covariance of 10⁶ samples.
        let n = 1_000_000;
        let mut r = Seed(17).rng();
        let mut x = 0.0f64;
        let mut rows: Vec<[f64; 3]> = Vec::with_capacity(n);
        let mut prev = (0.0, 0.0);
        for t in 0..n + 100 {
            let (w, v): (f64, f64) = (StandardNormal.sample(&mut r), StandardNormal.sample(&mut r));
            let (nx, ny) = (0.8 * x + w, 0.8 * x + v);
            if t >= 100 {
                // (source x_t, target y_t, future y_{t+1})
                rows.push([prev.0, prev.1, ny]);
            }
            prev = (nx, ny);
            x = nx;
        }
        let mean: Vec<f64> = (0..3).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
        let cov = DMatrix::from_fn(3, 3, |i, j| {
            rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / (n - 1) as f64
        });
        let sub = |idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |a, b| cov[(idx[a], idx[b])]);
        let h = |idx: &[usize]| gaussian_entropy(&sub(idx)).unwrap();
        let sim = h(&[0, 1]) + h(&[2, 1]) - h(&[1]) - h(&[0, 2, 1]);
        let exact = exact_spectrum(&UNI, Var::X, 1, &EmbeddingParams::default()).unwrap().get(1).unwrap();
        assert!((sim - exact).abs() < 0.02, "sim {sim}, exact {exact}");
    }
}

//! Weak majorisation of singular-value vectors.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compound, svd_values, Matrix, SingularValues};
use crate::numerics::{real_to_string, PrecisionConfig, Real};

/// Outcome of `left ≺_w right`.
#[derive(Clone, Debug)]
pub struct MajorisationReport {
    pub left: SingularValues,
    pub right: SingularValues,
    /// `sum_{j<=k} right_j - sum_{j<=k} left_j` for `k = 1..=d`.
    pub partial_margins: Vec<Real>,
    pub verdict: bool,
    /// 1-based index of the smallest margin.
    pub worst_k: usize,
    /// The smallest margin is within tolerance of zero.
    pub boundary: bool,
    /// `max(1, sum(right))`.
    pub scale: Real,
}

impl MajorisationReport {
    pub fn min_margin(&self) -> &Real {
        &self.partial_margins[self.worst_k - 1]
    }

    /// Margin divided by the scale, as a double (diagnostics only).
    pub fn relative_min_margin(&self) -> f64 {
        Float::with_val(self.scale.prec(), self.min_margin() / &self.scale).to_f64()
    }

    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            verdict: self.verdict,
            boundary: self.boundary,
            margins: self.partial_margins.iter().map(real_to_string).collect(),
            worst_k: self.worst_k,
            left: self.left.to_strings(),
            right: self.right.to_strings(),
        }
    }
}

/// Wire format of a [`MajorisationReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub verdict: bool,
    pub boundary: bool,
    pub margins: Vec<String>,
    pub worst_k: usize,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

/// Decides `a ≺_w b`: every partial sum of `a` is at most the matching
/// partial sum of `b`, within `tau * max(1, sum b)`.
pub fn weak_majorisation_leq(a: &SingularValues, b: &SingularValues, cfg: &PrecisionConfig) -> Result<MajorisationReport> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::DimensionMismatch("empty value lists".into()));
    }
    let prec = cfg.bits();
    let mut sa = Float::new(prec);
    let mut sb = Float::new(prec);
    let mut margins = Vec::with_capacity(a.len());
    for (x, y) in a.values().iter().zip(b.values()) {
        sa += x;
        sb += y;
        margins.push(Float::with_val(prec, &sb - &sa));
    }
    let mut worst = 0;
    for (k, m) in margins.iter().enumerate() {
        if *m < margins[worst] {
            worst = k;
        }
    }
    let scale = if sb > 1 { sb } else { Float::with_val(prec, 1) };
    let tol = Float::with_val(prec, &scale * cfg.tau());
    let min = &margins[worst];
    let verdict = *min >= Float::with_val(prec, -&tol);
    let boundary = Float::with_val(prec, min.abs_ref()) < tol;
    Ok(MajorisationReport {
        left: a.clone(),
        right: b.clone(),
        partial_margins: margins,
        verdict,
        worst_k: worst + 1,
        boundary,
        scale,
    })
}

/// One order `k` of the compound cross-check.
#[derive(Clone, Debug)]
pub struct WeylOrder {
    pub k: usize,
    /// `sigma_1(C_k(X))` and `sigma_1(C_k(Y))`.
    pub compound_norms: (Real, Real),
    /// `prod_{j<=k} sigma_j(X)` and the same for `Y`.
    pub top_products: (Real, Real),
    pub agree: bool,
}

fn le_within(x: &Real, y: &Real, tol: &Real) -> bool {
    Float::with_val(x.prec(), x - y) <= *tol
}

/// Compares, for every `k`, the verdict of `sigma_1(C_k(X)) <= sigma_1(C_k(Y))`
/// with the verdict on the products of the `k` largest singular values.
/// Comparisons sitting within tolerance of equality count as agreeing.
pub fn weyl_crosscheck_orders(x: &Matrix, y: &Matrix, cfg: &PrecisionConfig) -> Result<Vec<WeylOrder>> {
    if x.dim() != y.dim() || !x.is_square() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", x.dim(), y.dim())));
    }
    let sx = svd_values(x, cfg)?;
    let sy = svd_values(y, cfg)?;
    let mut out = Vec::with_capacity(x.rows());
    for k in 1..=x.rows() {
        let cx = svd_values(&compound(x, k)?, cfg)?.values()[0].clone();
        let cy = svd_values(&compound(y, k)?, cfg)?.values()[0].clone();
        let px = sx.top_product(k);
        let py = sy.top_product(k);
        let tol = cfg.tol(&cx.clone().max(&cy).max(&px).max(&py));
        let near = |a: &Real, b: &Real| Float::with_val(a.prec(), a - b).abs() <= tol;
        let compound_route = le_within(&cx, &cy, &tol);
        let product_route = le_within(&px, &py, &tol);
        let agree = compound_route == product_route || near(&cx, &cy) || near(&px, &py);
        out.push(WeylOrder { k, compound_norms: (cx, cy), top_products: (px, py), agree });
    }
    Ok(out)
}

/// True when the compound route and the direct singular-value route give
/// the same verdict for every order.
pub fn weyl_crosscheck(x: &Matrix, y: &Matrix, cfg: &PrecisionConfig) -> Result<bool> {
    Ok(weyl_crosscheck_orders(x, y, cfg)?.iter().all(|o| o.agree))
}

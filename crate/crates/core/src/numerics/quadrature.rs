use std::collections::BTreeMap;
use std::f64::consts::PI;

use rug::Float;

use super::precision::{PrecisionConfig, Real};
use crate::error::{Error, Result};

/// Gauss–Legendre rule with `n` nodes mapped to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<Real>,
    weights: Vec<Real>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, polished by Newton's method at working
    /// precision from double-precision starting values.
    pub fn new(n: usize, cfg: &PrecisionConfig) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("Gauss-Legendre needs >= 2 nodes, got {n}")));
        }
        let prec = cfg.bits();
        let stop = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
        let mut nodes = vec![Float::new(prec); n];
        let mut weights = vec![Float::new(prec); n];
        for i in 0..n.div_ceil(2) {
            let mut x0 = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_f64(n, x0);
                let dx = p / dp;
                x0 -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let mut x = Float::with_val(prec, x0);
            let mut converged = false;
            for _ in 0..100 {
                let (p, d) = legendre(n, &x);
                let dx = Float::with_val(prec, &p / &d);
                x -= &dx;
                if dx.abs() <= stop {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NoConvergence(format!("Legendre root {i} of P_{n}")));
            }
            let (_, dp) = legendre(n, &x);
            // w = 2 / ((1 - x^2) P_n'(x)^2), halved for [0, 1].
            let one_minus_x2 = Float::with_val(prec, 1) - Float::with_val(prec, &x * &x);
            let w = Float::with_val(prec, 1) / (one_minus_x2 * Float::with_val(prec, &dp * &dp));
            let half = Float::with_val(prec, 0.5);
            let x_half = Float::with_val(prec, &x * &half);
            nodes[i] = Float::with_val(prec, &half - &x_half);
            nodes[n - 1 - i] = Float::with_val(prec, &half + &x_half);
            weights[i] = w.clone();
            weights[n - 1 - i] = w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Real] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    /// Estimate of `int_a^b f(t) dt`.
    pub fn integrate<F: Fn(&Real) -> Real>(&self, f: F, a: &Real, b: &Real) -> Real {
        let prec = a.prec();
        let width = Float::with_val(prec, b - a);
        let mut acc = Float::new(prec);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            let x = Float::with_val(prec, a + Float::with_val(prec, &width * t));
            acc += Float::with_val(prec, w * f(&x));
        }
        acc * width
    }
}

fn legendre(n: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(prec, (2 * k - 1) as u32) * x * &p1;
        let b = Float::with_val(prec, (k - 1) as u32) * &p0;
        let p2 = (a - b) / k as u32;
        p0 = std::mem::replace(&mut p1, p2);
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = Float::with_val(prec, x * &p1) - &p0;
    let den = Float::with_val(prec, x * x) - 1u32;
    let dp = num * n as u32 / den;
    (p1, dp)
}

fn legendre_f64(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// `n`-node Gauss–Legendre estimate of `int_0^1 f(t) dt`.
pub fn gauss_legendre<F: Fn(&Real) -> Real>(f: F, nodes: usize, cfg: &PrecisionConfig) -> Result<Real> {
    let rule = GaussLegendre::new(nodes, cfg)?;
    Ok(rule.integrate(f, &cfg.zero(), &cfg.one()))
}

#[derive(Clone, Debug)]
pub struct QuadratureEstimate {
    pub value: Real,
    /// Nodes per piece at which two successive estimates agreed.
    pub nodes: usize,
    /// Difference between the last two estimates.
    pub change: Real,
}

/// Composite Gauss–Legendre integration that doubles the node count until two
/// successive estimates agree within `tol`. Rules are computed once and
/// kept for the lifetime of the value.
#[derive(Debug)]
pub struct Integrator {
    cfg: PrecisionConfig,
    rules: BTreeMap<usize, GaussLegendre>,
    start_nodes: usize,
    max_nodes: usize,
}

impl Integrator {
    pub fn new(cfg: PrecisionConfig) -> Self {
        Integrator { cfg, rules: BTreeMap::new(), start_nodes: 8, max_nodes: 1024 }
    }

    pub fn with_node_range(mut self, start_nodes: usize, max_nodes: usize) -> Self {
        self.start_nodes = start_nodes.max(2);
        self.max_nodes = max_nodes.max(self.start_nodes);
        self
    }

    pub fn config(&self) -> &PrecisionConfig {
        &self.cfg
    }

    fn rule(&mut self, n: usize) -> Result<&GaussLegendre> {
        if !self.rules.contains_key(&n) {
            let rule = GaussLegendre::new(n, &self.cfg)?;
            self.rules.insert(n, rule);
        }
        Ok(&self.rules[&n])
    }

    fn composite<F: Fn(&Real) -> Real>(&mut self, f: &F, breakpoints: &[Real], n: usize) -> Result<Real> {
        let prec = self.cfg.bits();
        let rule = self.rule(n)?;
        let mut acc = Float::new(prec);
        for w in breakpoints.windows(2) {
            acc += rule.integrate(f, &w[0], &w[1]);
        }
        Ok(acc)
    }

    /// Integrates `f` over `[breakpoints[0], breakpoints[last]]`.
    pub fn integrate_until_stable<F: Fn(&Real) -> Real>(
        &mut self,
        f: F,
        breakpoints: &[Real],
        tol: &Real,
    ) -> Result<QuadratureEstimate> {
        if breakpoints.len() < 2 {
            return Err(Error::OutOfRange("need at least two breakpoints".into()));
        }
        let mut n = self.start_nodes;
        let mut previous = self.composite(&f, breakpoints, n)?;
        while n * 2 <= self.max_nodes {
            n *= 2;
            let current = self.composite(&f, breakpoints, n)?;
            let change = Float::with_val(self.cfg.bits(), &current - &previous).abs();
            if change <= *tol {
                return Ok(QuadratureEstimate { value: current, nodes: n, change });
            }
            previous = current;
        }
        Err(Error::NoConvergence(format!("quadrature not stable at {} nodes", self.max_nodes)))
    }
}

/// Breakpoints in `[0, 1]` graded geometrically toward an endpoint whose
/// distance to the nearest singularity of the integrand is `distance`.
/// Each piece is no longer than its distance to the singularity, so a fixed
/// node count converges geometrically on every piece.
pub fn graded_breakpoints(distance: &Real, toward_zero: bool, cfg: &PrecisionConfig) -> Vec<Real> {
    let prec = cfg.bits();
    let floor = cfg.epsilon();
    let delta = if *distance < floor { floor } else { distance.clone() };
    let mut points = vec![Float::new(prec)];
    let mut a = Float::new(prec);
    loop {
        let next = Float::with_val(prec, &a * 2u32) + &delta;
        if next >= 1 {
            points.push(cfg.one());
            break;
        }
        points.push(next.clone());
        a = next;
    }
    if toward_zero {
        points
    } else {
        points.iter().rev().map(|p| Float::with_val(prec, 1) - p).collect()
    }
}

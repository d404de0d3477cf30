//! The objectives `f`, `G`, `F` and the maps between their variables.
//!
//! With `s = a∘a − b∘b`:
//!
//! ```text
//! f(x)    = h(x) + μ‖x‖₁
//! G(u, v) = h(u∘v) + (μ/2)(‖u‖² + ‖v‖²)
//! F(a, b) = h(s) + μ(‖a‖² + ‖b‖²) = f(s) + 2μ‖min{a², b²}‖₁
//! ```

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::losses::{Flipped, Loss, SmoothLoss};
use crate::{Error, Result};

/// `f = h + μ‖·‖₁` together with its parametrizations.
#[derive(Debug, Clone)]
pub struct L1Problem {
    loss: SmoothLoss,
    mu: f64,
}

/// A point `(a, b)` of the difference parametrization with `s = a² − b²` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct HdpPoint {
    a: DVector<f64>,
    b: DVector<f64>,
    s: DVector<f64>,
}

impl HdpPoint {
    pub fn new(a: DVector<f64>, b: DVector<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "a has length {} but b has length {}",
                a.len(),
                b.len()
            )));
        }
        let s = a.component_mul(&a) - b.component_mul(&b);
        Ok(Self { a, b, s })
    }

    /// From the flat layout `[a₁ … aₙ, b₁ … bₙ]`.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::invalid("flat point must have even length"));
        }
        let n = flat.len() / 2;
        Self::new(
            DVector::from_column_slice(&flat[..n]),
            DVector::from_column_slice(&flat[n..]),
        )
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            a: DVector::zeros(n),
            b: DVector::zeros(n),
            s: DVector::zeros(n),
        }
    }

    /// The canonical lift `a = √s₊`, `b = √s₋` of `s`.
    pub fn lift(s: &DVector<f64>) -> Self {
        let a = s.map(|v| v.max(0.0).sqrt());
        let b = s.map(|v| (-v).max(0.0).sqrt());
        Self::new(a, b).expect("same length")
    }

    /// Lift `s` choosing the signs of `a` and `b` to agree with `like`.
    pub fn lift_like(s: &DVector<f64>, like: &HdpPoint) -> Self {
        let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
        let a = DVector::from_fn(s.len(), |i, _| sign(like.a[i]) * s[i].max(0.0).sqrt());
        let b = DVector::from_fn(s.len(), |i, _| sign(like.b[i]) * (-s[i]).max(0.0).sqrt());
        Self::new(a, b).expect("same length")
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// `a∘a − b∘b`
    pub fn s(&self) -> &DVector<f64> {
        &self.s
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.a.iter().chain(self.b.iter()).copied().collect()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_vec(self.to_flat())
    }

    /// `‖min{a², b²}‖∞`
    pub fn min_ab_product(&self) -> f64 {
        self.a
            .iter()
            .zip(self.b.iter())
            .map(|(x, y)| (x * x).min(y * y))
            .fold(0.0, f64::max)
    }

    /// Euclidean distance in ℝ²ⁿ.
    pub fn distance(&self, other: &HdpPoint) -> f64 {
        ((&self.a - &other.a).norm_squared() + (&self.b - &other.b).norm_squared()).sqrt()
    }

    /// `self − step·direction`, with `direction` in the flat layout.
    pub fn step(&self, direction: &DVector<f64>, step: f64) -> Self {
        let n = self.dim();
        let a = &self.a - direction.rows(0, n) * step;
        let b = &self.b - direction.rows(n, n) * step;
        Self::new(a, b).expect("same length")
    }
}

/// `a = (u+v)/2`, `b = (u−v)/2`, so that `a² − b² = u∘v`.
pub fn uv_to_ab(u: &DVector<f64>, v: &DVector<f64>) -> Result<HdpPoint> {
    if u.len() != v.len() {
        return Err(Error::invalid("u and v must have the same length"));
    }
    HdpPoint::new((u + v) * 0.5, (u - v) * 0.5)
}

/// Inverse of [`uv_to_ab`]: `u = a + b`, `v = a − b`.
pub fn ab_to_uv(p: &HdpPoint) -> (DVector<f64>, DVector<f64>) {
    (&p.a + &p.b, &p.a - &p.b)
}

impl L1Problem {
    pub fn new(loss: SmoothLoss, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { loss, mu })
    }

    pub fn loss(&self) -> &SmoothLoss {
        &self.loss
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dim(&self) -> usize {
        self.loss.dim()
    }

    /// `f(x) = h(x) + μ‖x‖₁`
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.loss.value(x) + self.mu * x.lp_norm(1)
    }

    /// `dist(0, ∇h(x) + μ∂‖x‖₁)`, computed coordinatewise.
    pub fn subdiff_dist(&self, x: &DVector<f64>) -> f64 {
        self.subdiff_dist_tol(x, 0.0)
    }

    /// [`L1Problem::subdiff_dist`] with coordinates `|xᵢ| ≤ zero_tol` treated as zero.
    pub fn subdiff_dist_tol(&self, x: &DVector<f64>, zero_tol: f64) -> f64 {
        let g = self.loss.grad(x);
        x.iter()
            .zip(g.iter())
            .map(|(&xi, &gi)| {
                let d = if xi.abs() > zero_tol {
                    (gi + self.mu * xi.signum()).abs()
                } else {
                    (gi.abs() - self.mu).max(0.0)
                };
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `G(u, v) = h(u∘v) + (μ/2)(‖u‖² + ‖v‖²)`
    pub fn product_value(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.loss.value(&u.component_mul(v)) + 0.5 * self.mu * (u.norm_squared() + v.norm_squared())
    }

    /// `F(a, b) = h(a² − b²) + μ(‖a‖² + ‖b‖²)`
    pub fn hdp_value(&self, p: &HdpPoint) -> f64 {
        self.loss.value(&p.s) + self.mu * (p.a.norm_squared() + p.b.norm_squared())
    }

    /// `∇F(a, b) = [2a∘(∇h(s) + μ); 2b∘(μ − ∇h(s))]` in the flat layout.
    pub fn hdp_grad(&self, p: &HdpPoint) -> DVector<f64> {
        let g = self.loss.grad(&p.s);
        self.grad_from(p, &g.add_scalar(self.mu), &(-&g).add_scalar(self.mu))
    }

    fn grad_from(&self, p: &HdpPoint, plus: &DVector<f64>, minus: &DVector<f64>) -> DVector<f64> {
        let n = p.dim();
        let mut out = DVector::zeros(2 * n);
        for i in 0..n {
            out[i] = 2.0 * p.a[i] * plus[i];
            out[n + i] = 2.0 * p.b[i] * minus[i];
        }
        out
    }

    /// `∇²F(a, b) = 4J∇²h(s)Jᵀ + 2·blkdiag(diag(∇h(s)) + μI, −diag(∇h(s)) + μI)`
    /// with `J = [diag(a); −diag(b)]`.
    pub fn hdp_hess(&self, p: &HdpPoint) -> DMatrix<f64> {
        let n = p.dim();
        let g = self.loss.grad(&p.s);
        let h = self.loss.hess(&p.s);
        let j = DVector::from_iterator(2 * n, p.a.iter().copied().chain(p.b.iter().map(|v| -v)));
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..2 * n {
            for c in 0..2 * n {
                out[(r, c)] = 4.0 * j[r] * h[(r % n, c % n)] * j[c];
            }
        }
        for i in 0..n {
            out[(i, i)] += 2.0 * (g[i] + self.mu);
            out[(n + i, n + i)] += 2.0 * (self.mu - g[i]);
        }
        out
    }

    /// `F(p) − F(anchor)` evaluated through the Bregman divergence of `h`.
    ///
    /// Algebraically identical to the plain difference, but the affine parts
    /// of `h` and the penalty cancel symbolically, so the result keeps full
    /// relative accuracy for gaps far below the size of `F` itself.
    pub fn hdp_gap(&self, p: &HdpPoint, anchor: &HdpPoint) -> f64 {
        let g = self.loss.grad(&anchor.s);
        let mut gap = self.loss.bregman(&p.s, &anchor.s);
        for i in 0..p.dim() {
            gap += (self.mu + g[i]) * ((p.a[i] - anchor.a[i]) * (p.a[i] + anchor.a[i]));
            gap += (self.mu - g[i]) * ((p.b[i] - anchor.b[i]) * (p.b[i] + anchor.b[i]));
        }
        gap
    }

    /// `∇F(p)` with `∇h(s)` split as `(∇h(s) − ∇h(s̄)) + ∇h(s̄)` around `anchor`.
    pub fn hdp_grad_anchored(&self, p: &HdpPoint, anchor: &HdpPoint) -> DVector<f64> {
        let g_bar = self.loss.grad(&anchor.s);
        let dg = self.loss.grad_diff(&p.s, &anchor.s);
        let plus = DVector::from_fn(p.dim(), |i, _| dg[i] + (g_bar[i] + self.mu));
        let minus = DVector::from_fn(p.dim(), |i, _| (self.mu - g_bar[i]) - dg[i]);
        self.grad_from(p, &plus, &minus)
    }

    /// `F` viewed as a function of the flat vector `[a; b]`.
    pub fn lifted(&self) -> SmoothLoss {
        Arc::new(Lifted(self.clone()))
    }

    /// Same `μ` with a different loss.
    pub fn with_loss(&self, loss: SmoothLoss) -> Result<Self> {
        if loss.dim() != self.dim() {
            return Err(Error::invalid("replacement loss has a different dimension"));
        }
        Self::new(loss, self.mu)
    }
}

/// Block of the reduction partition an index falls in.
#[derive(Debug)]
struct Lifted(L1Problem);

impl Lifted {
    fn point(x: &DVector<f64>) -> HdpPoint {
        HdpPoint::from_flat(x.as_slice()).expect("flat vector of even length")
    }
}

impl Loss for Lifted {
    fn dim(&self) -> usize {
        2 * self.0.dim()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.0.hdp_value(&Self::point(x))
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.hdp_grad(&Self::point(x))
    }

    fn hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.0.hdp_hess(&Self::point(x))
    }

    fn is_convex(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        format!("F[{}, mu={}]", self.0.loss.label(), self.0.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Block {
    /// `aᵢ > 0`, or `aᵢ = bᵢ = 0` with `∇h(s)ᵢ ≠ μ`: unchanged.
    Keep,
    /// `bᵢ > 0`, or `aᵢ = bᵢ = 0` with `∇h(s)ᵢ = μ`: swap `a` and `b`.
    Swap,
    /// `aᵢ < 0`: negate `a`.
    NegateA,
    /// `bᵢ < 0`: `(aᵢ, bᵢ) ↦ (−bᵢ, aᵢ)`.
    SwapNegate,
}

/// Per-index linear maps `H` on `(a, b)` and `P` on `s` that move a stationary
/// point to one with `a ≥ 0`, `b = 0` and `∇h = −μ` on tied zero coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionMap {
    blocks: Vec<Block>,
}

impl ReductionMap {
    pub fn new(blocks: Vec<Block>) -> Self {
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn indices(&self, block: Block) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i] == block).collect()
    }

    /// Coordinates where `P` flips the sign (`Swap` and `SwapNegate`).
    pub fn flips(&self) -> Vec<bool> {
        self.blocks
            .iter()
            .map(|b| matches!(b, Block::Swap | Block::SwapNegate))
            .collect()
    }

    /// `H(a, b)`
    pub fn forward(&self, p: &HdpPoint) -> HdpPoint {
        let n = p.dim();
        let mut c = DVector::zeros(n);
        let mut d = DVector::zeros(n);
        for (i, blk) in self.blocks.iter().enumerate() {
            let (a, b) = (p.a[i], p.b[i]);
            (c[i], d[i]) = match blk {
                Block::Keep => (a, b),
                Block::Swap => (b, a),
                Block::NegateA => (-a, b),
                Block::SwapNegate => (-b, a),
            };
        }
        HdpPoint::new(c, d).expect("same length")
    }

    /// `H⁻¹(c, d)`. `H` is its own inverse except on `SwapNegate`, where
    /// `H∘H = −id`.
    pub fn inverse(&self, p: &HdpPoint) -> HdpPoint {
        let n = p.dim();
        let mut a = DVector::zeros(n);
        let mut b = DVector::zeros(n);
        for (i, blk) in self.blocks.iter().enumerate() {
            let (c, d) = (p.a[i], p.b[i]);
            (a[i], b[i]) = match blk {
                Block::Keep => (c, d),
                Block::Swap => (d, c),
                Block::NegateA => (-c, d),
                Block::SwapNegate => (d, -c),
            };
        }
        HdpPoint::new(a, b).expect("same length")
    }

    /// `P(s)`; an involution.
    pub fn flip(&self, s: &DVector<f64>) -> DVector<f64> {
        let flips = self.flips();
        DVector::from_fn(s.len(), |i, _| if flips[i] { -s[i] } else { s[i] })
    }
}

/// Result of [`reduce`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub map: ReductionMap,
    /// `H(a, b)`
    pub point: HdpPoint,
    /// Same `μ`, loss `h∘P`.
    pub problem: L1Problem,
}

/// Build the sign/swap reduction at an (approximately) stationary point of `F`.
///
/// Zero tests use the absolute tolerance `tol`; the tie `∇h(s)ᵢ = μ` is
/// `|∇h(s)ᵢ − μ| ≤ tol`. Fails with [`Error::NotStationary`] when
/// `‖∇F(a, b)‖ > tol`.
pub fn reduce(prob: &L1Problem, p: &HdpPoint, tol: f64) -> Result<Reduction> {
    let residual = prob.hdp_grad(p).norm();
    if residual > tol {
        return Err(Error::NotStationary { residual, tol });
    }
    let g = prob.loss.grad(&p.s);
    let blocks = (0..p.dim())
        .map(|i| {
            let (a, b) = (p.a[i], p.b[i]);
            if a.abs() <= tol && b.abs() <= tol {
                if (g[i] - prob.mu).abs() <= tol {
                    Block::Swap
                } else {
                    Block::Keep
                }
            } else if a.abs() >= b.abs() {
                if a > 0.0 {
                    Block::Keep
                } else {
                    Block::NegateA
                }
            } else if b > 0.0 {
                Block::Swap
            } else {
                Block::SwapNegate
            }
        })
        .collect();
    let map = ReductionMap::new(blocks);
    let point = map.forward(p);
    let loss: SmoothLoss = Arc::new(Flipped::new(prob.loss.clone(), &map.flips()));
    let problem = prob.with_loss(loss)?;
    Ok(Reduction { map, point, problem })
}

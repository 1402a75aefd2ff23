//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A [`Jet`] of order `K` in `n` variables stores the Taylor coefficients
//! `c_α` of `f(x0 + δ) = Σ_{|α| ≤ K} c_α δ^α`. Arithmetic on jets propagates
//! every partial derivative up to order `K` exactly (up to rounding), which is
//! what Christoffel symbols and curvature need: a metric evaluated on order-2
//! jets yields `g`, `∂g` and `∂²g` with no finite-difference error.
//!
//! Scalar jets (zero variables, order zero) broadcast against any layout, so
//! plain constants can be mixed freely into jet expressions.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

/// Monomial bookkeeping shared by all jets with the same `(nvars, order)`.
pub struct Layout {
    nvars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    products: Vec<[u32; 3]>,
    derivs: Vec<Vec<(u32, u32, f64)>>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut exps = Vec::new();
        for deg in 0..=order {
            let mut cur = vec![0u8; nvars];
            push_degree(&mut exps, &mut cur, 0, deg);
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degree: Vec<usize> = exps.iter().map(|e| e.iter().map(|&v| v as usize).sum()).collect();

        let mut products = Vec::new();
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let sum: Vec<u8> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                products.push([i as u32, j as u32, index[&sum] as u32]);
            }
        }

        let mut derivs = Vec::with_capacity(nvars);
        if order > 0 {
            let lower = layout(nvars, order - 1);
            for var in 0..nvars {
                let mut table = Vec::new();
                for (src, e) in exps.iter().enumerate() {
                    if e[var] == 0 {
                        continue;
                    }
                    let mut d = e.clone();
                    d[var] -= 1;
                    table.push((src as u32, lower.index[&d] as u32, e[var] as f64));
                }
                derivs.push(table);
            }
        }

        Layout {
            nvars,
            order,
            exps,
            index,
            products,
            derivs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, remaining: usize) {
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == cur.len() - 1 {
        cur[var] = remaining as u8;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[var] = k as u8;
        push_degree(out, cur, var + 1, remaining - k);
    }
    cur[var] = 0;
}

thread_local! {
    static LAYOUTS: RefCell<HashMap<(usize, usize), Arc<Layout>>> = RefCell::new(HashMap::new());
}

/// Shared layout for `nvars` variables truncated at `order`.
pub fn layout(nvars: usize, order: usize) -> Arc<Layout> {
    let order = if nvars == 0 { 0 } else { order };
    if let Some(l) = LAYOUTS.with(|m| m.borrow().get(&(nvars, order)).cloned()) {
        return l;
    }
    let built = Arc::new(Layout::build(nvars, order));
    LAYOUTS.with(|m| {
        m.borrow_mut()
            .entry((nvars, order))
            .or_insert_with(|| built.clone())
            .clone()
    })
}

/// Truncated Taylor polynomial in several variables.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(value: f64) -> Jet {
        Jet {
            layout: layout(0, 0),
            coeffs: vec![value],
        }
    }

    fn zeros(layout: Arc<Layout>) -> Jet {
        let n = layout.len();
        Jet {
            layout,
            coeffs: vec![0.0; n],
        }
    }

    /// Constant with the same layout as `like`.
    pub fn constant_like(value: f64, like: &Jet) -> Jet {
        let mut j = Jet::zeros(like.layout.clone());
        j.coeffs[0] = value;
        j
    }

    /// Independent variables seeded at `point`: `x_i = point_i + δ_i`.
    pub fn variables(point: &[f64], order: usize) -> Vec<Jet> {
        let l = layout(point.len(), order);
        (0..point.len())
            .map(|i| {
                let mut j = Jet::zeros(l.clone());
                j.coeffs[0] = point[i];
                if l.order >= 1 {
                    let mut e = vec![0u8; point.len()];
                    e[i] = 1;
                    j.coeffs[l.index[&e]] = 1.0;
                }
                j
            })
            .collect()
    }

    /// First-order jet with the given value and gradient.
    pub fn linear(value: f64, grad: &[f64]) -> Jet {
        let l = layout(grad.len(), 1);
        let mut j = Jet::zeros(l.clone());
        j.coeffs[0] = value;
        for (i, g) in grad.iter().enumerate() {
            let mut e = vec![0u8; grad.len()];
            e[i] = 1;
            j.coeffs[l.index[&e]] = *g;
        }
        j
    }

    /// Jet from raw coefficients in the graded monomial order of `layout(nvars, order)`.
    pub fn from_coeffs(nvars: usize, order: usize, coeffs: Vec<f64>) -> Jet {
        let l = layout(nvars, order);
        assert_eq!(coeffs.len(), l.len(), "coefficient count does not match layout");
        Jet { layout: l, coeffs }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_scalar(&self) -> bool {
        self.layout.nvars == 0
    }

    /// Taylor coefficient of the monomial with exponent vector `exps`.
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        if self.is_scalar() {
            return if exps.iter().all(|&e| e == 0) { self.coeffs[0] } else { 0.0 };
        }
        self.layout.index.get(exps).map_or(0.0, |&i| self.coeffs[i])
    }

    /// Partial derivative with respect to the listed variables (with repeats).
    pub fn partial(&self, vars: &[usize]) -> f64 {
        if vars.len() > self.order() {
            return 0.0;
        }
        if self.is_scalar() {
            return if vars.is_empty() { self.coeffs[0] } else { 0.0 };
        }
        let mut e = vec![0u8; self.nvars()];
        for &v in vars {
            e[v] += 1;
        }
        let fact: f64 = e.iter().map(|&k| factorial(k as usize)).product();
        self.coeff(&e) * fact
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.nvars()).map(|i| self.partial(&[i])).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<f64>> {
        let n = self.nvars();
        (0..n)
            .map(|i| (0..n).map(|j| self.partial(&[i, j])).collect())
            .collect()
    }

    /// `∂/∂x_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        if self.is_scalar() || self.order() == 0 {
            return Jet::constant(0.0);
        }
        let lower = layout(self.nvars(), self.order() - 1);
        let mut out = Jet::zeros(lower);
        for &(src, dst, f) in &self.layout.derivs[var] {
            out.coeffs[dst as usize] += f * self.coeffs[src as usize];
        }
        out
    }

    /// Drop every term above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if self.is_scalar() || order >= self.order() {
            return self.clone();
        }
        let l = layout(self.nvars(), order);
        let coeffs = self.coeffs[..l.len()].to_vec();
        Jet { layout: l, coeffs }
    }

    /// `f(self)` where `derivs[k] = f^(k)(self.value())`.
    pub fn compose_univariate(&self, derivs: &[f64]) -> Jet {
        let k = self.order();
        if self.is_scalar() || k == 0 {
            return Jet::constant_like(derivs[0], self);
        }
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut r = Jet::constant_like(derivs[k] / factorial(k), self);
        for j in (0..k).rev() {
            r = &r * &h;
            r.coeffs[0] += derivs[j] / factorial(j);
        }
        r
    }

    /// Substitute `δ_i = inner_i − inner_i.value()` into this polynomial.
    ///
    /// This chains a Taylor expansion computed around a fixed point with
    /// jets that carry derivatives in other variables.
    pub fn compose(&self, inner: &[Jet]) -> Jet {
        if self.is_scalar() {
            return self.clone();
        }
        assert_eq!(inner.len(), self.nvars(), "compose arity mismatch");
        let reference = inner
            .iter()
            .find(|j| !j.is_scalar())
            .cloned()
            .unwrap_or_else(|| Jet::constant(0.0));
        let k = self.order();
        // powers[i][p] = (inner_i - v_i)^p
        let powers: Vec<Vec<Jet>> = inner
            .iter()
            .map(|j| {
                let mut d = j.clone();
                d.coeffs[0] = 0.0;
                let mut ps = vec![Jet::constant_like(1.0, &reference)];
                for p in 1..=k {
                    let next = &ps[p - 1] * &d;
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut out = Jet::constant_like(0.0, &reference);
        for (idx, e) in self.layout.exps.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0.0 {
                continue;
            }
            let mut term = Jet::constant_like(c, &reference);
            for (var, &p) in e.iter().enumerate() {
                if p > 0 {
                    term = &term * &powers[var][p as usize];
                }
            }
            out += &term;
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let k = self.order();
        let mut d = Vec::with_capacity(k + 1);
        let mut f = 1.0 / a;
        for j in 0..=k {
            d.push(f);
            f *= -((j + 1) as f64) / a;
        }
        self.compose_univariate(&d)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose_univariate(&vec![e; self.order() + 1])
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let mut d = vec![a.ln()];
        for j in 1..=self.order() {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign * factorial(j - 1) / a.powi(j as i32));
        }
        self.compose_univariate(&d)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order()).map(|j| cycle[j % 4]).collect();
        self.compose_univariate(&d)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order()).map(|j| cycle[j % 4]).collect();
        self.compose_univariate(&d)
    }

    pub fn tan(&self) -> Jet {
        &self.sin() / &self.cos()
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let d: Vec<f64> = (0..=self.order()).map(|j| if j % 2 == 0 { s } else { c }).collect();
        self.compose_univariate(&d)
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let d: Vec<f64> = (0..=self.order()).map(|j| if j % 2 == 0 { c } else { s }).collect();
        self.compose_univariate(&d)
    }

    pub fn atan(&self) -> Jet {
        // atan' = 1/(1+x²); higher orders through jet arithmetic on the derivative.
        let k = self.order();
        if k == 0 || self.is_scalar() {
            return Jet::constant_like(self.value().atan(), self);
        }
        let x = Jet::variables(&[self.value()], k - 1).remove(0);
        let dprime = (&x * &x + 1.0).recip();
        let mut d = vec![self.value().atan()];
        for j in 0..k {
            d.push(dprime.partial(&vec![0; j]));
        }
        self.compose_univariate(&d)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Jet::constant_like(1.0, self);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn powf(&self, p: f64) -> Jet {
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            return self.powi(p as i32);
        }
        let a = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut coef = 1.0;
        for j in 0..=self.order() {
            d.push(coef * a.powf(p - j as f64));
            coef *= p - j as f64;
        }
        self.compose_univariate(&d)
    }

    /// `self^other` for a jet exponent.
    pub fn pow(&self, other: &Jet) -> Jet {
        if other.is_scalar() || other.coeffs[1..].iter().all(|&c| c == 0.0) {
            return self.powf(other.value());
        }
        (other * &self.ln()).exp()
    }

    fn unify(a: &Jet, b: &Jet) -> (Arc<Layout>, Option<usize>) {
        match (a.is_scalar(), b.is_scalar()) {
            (true, true) => (a.layout.clone(), None),
            (true, false) => (b.layout.clone(), None),
            (false, true) => (a.layout.clone(), None),
            (false, false) => {
                assert_eq!(a.nvars(), b.nvars(), "jets over different variable sets");
                if a.order() == b.order() {
                    (a.layout.clone(), None)
                } else {
                    let o = a.order().min(b.order());
                    (layout(a.nvars(), o), Some(o))
                }
            }
        }
    }

    fn zip_with(a: &Jet, b: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (l, _) = Jet::unify(a, b);
        let n = l.len();
        let get = |j: &Jet, i: usize| {
            if j.is_scalar() {
                if i == 0 {
                    j.coeffs[0]
                } else {
                    0.0
                }
            } else {
                j.coeffs[i]
            }
        };
        let coeffs = (0..n).map(|i| f(get(a, i), get(b, i))).collect();
        Jet { layout: l, coeffs }
    }

    fn mul_jets(a: &Jet, b: &Jet) -> Jet {
        if a.is_scalar() {
            return b.scale(a.coeffs[0]);
        }
        if b.is_scalar() {
            return a.scale(b.coeffs[0]);
        }
        let (l, trunc) = Jet::unify(a, b);
        let (a, b) = match trunc {
            Some(o) => (a.truncate(o), b.truncate(o)),
            None => (a.clone(), b.clone()),
        };
        let mut out = vec![0.0; l.len()];
        for &[i, j, k] in &l.products {
            out[k as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
        Jet {
            layout: l,
            coeffs: out,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Jet {
        Jet::constant(v)
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                self.$method(&Jet::constant(rhs))
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(&Jet::constant(rhs))
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&Jet::constant(self)).$method(rhs)
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&Jet::constant(self)).$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| Jet::zip_with(a, b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| Jet::zip_with(a, b, |x, y| x - y));
jet_binop!(Mul, mul, Jet::mul_jets);
jet_binop!(Div, div, |a, b| {
    if b.is_scalar() {
        a.scale(1.0 / b.coeffs[0])
    } else {
        Jet::mul_jets(a, &b.recip())
    }
});

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        if !self.is_scalar() && (rhs.is_scalar() || Arc::ptr_eq(&self.layout, &rhs.layout)) {
            if rhs.is_scalar() {
                self.coeffs[0] += rhs.coeffs[0];
            } else {
                for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                    *a += b;
                }
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl AddAssign<f64> for Jet {
    fn add_assign(&mut self, rhs: f64) {
        self.coeffs[0] += rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self += &(-rhs);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        for c in &mut self.coeffs {
            *c *= rhs;
        }
    }
}

impl Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        let mut acc = Jet::constant(0.0);
        for j in iter {
            acc += &j;
        }
        acc
    }
}

/// Solve `a x = b` for a row-major `n×n` jet matrix by Gaussian elimination
/// with partial pivoting on the values. Returns `None` when a pivot vanishes.
pub fn solve(a: &[Jet], b: &[Jet]) -> Option<Vec<Jet>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut m: Vec<Vec<Jet>> = (0..n).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
    let mut rhs = b.to_vec();
    let scale = a.iter().map(|j| j.value().abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].value().abs().total_cmp(&m[j][col].value().abs()))?;
        if m[piv][col].value().abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip();
        for row in col + 1..n {
            let factor = &m[row][col] * &inv;
            for k in col..n {
                let t = &factor * &m[col][k];
                m[row][k] -= &t;
            }
            let t = &factor * &rhs[col];
            rhs[row] -= &t;
        }
    }
    let mut x = vec![Jet::constant(0.0); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc -= &(&m[row][k] * &x[k]);
        }
        x[row] = &acc / &m[row][row];
    }
    Some(x)
}

/// Inverse of a row-major `n×n` jet matrix.
pub fn inverse(a: &[Jet], n: usize) -> Option<Vec<Jet>> {
    let like = a.iter().find(|j| !j.is_scalar()).cloned().unwrap_or_else(|| Jet::constant(0.0));
    let mut out = vec![Jet::constant(0.0); n * n];
    for col in 0..n {
        let e: Vec<Jet> = (0..n)
            .map(|i| Jet::constant_like(if i == col { 1.0 } else { 0.0 }, &like))
            .collect();
        let x = solve(a, &e)?;
        for (row, v) in x.into_iter().enumerate() {
            out[row * n + col] = v;
        }
    }
    Some(out)
}

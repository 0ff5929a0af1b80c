use super::{SafeFootholdFunction, VpaError};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    /// Sum of squares.
    Sum,
    /// Product of squares.
    Prod,
    /// Sum of squared two-point integrals over `[z − m, z + m]`.
    Int,
    /// Sum of squared moving averages over `[z − m, z + m]`.
    Smooth,
}

impl CostKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::Sum => "sum",
            CostKind::Prod => "prod",
            CostKind::Int => "int",
            CostKind::Smooth => "smooth",
        }
    }
}

impl std::str::FromStr for CostKind {
    type Err = VpaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(CostKind::Sum),
            "prod" => Ok(CostKind::Prod),
            "int" => Ok(CostKind::Int),
            "smooth" => Ok(CostKind::Smooth),
            _ => Err(VpaError::UnknownCost(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams<T> {
    pub kind: CostKind,
    /// Scalar weight inside every norm.
    pub q: T,
    /// Integration / averaging half-width.
    pub margin: T,
    /// Number of averaging offsets on each side for [`CostKind::Smooth`].
    pub smooth_eps: usize,
}

impl<T: Scalar> Default for CostParams<T> {
    fn default() -> Self {
        Self { kind: CostKind::Int, q: T::one(), margin: T::lit(0.025), smooth_eps: 2 }
    }
}

impl<T: Scalar> CostParams<T> {
    pub fn new(kind: CostKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), VpaError> {
        if !(self.q > T::zero()) {
            return Err(VpaError::Cost("q must be positive"));
        }
        if matches!(self.kind, CostKind::Int | CostKind::Smooth) && !(self.margin > T::zero()) {
            return Err(VpaError::Cost("margin must be positive"));
        }
        if self.kind == CostKind::Smooth && self.smooth_eps == 0 {
            return Err(VpaError::Cost("smooth_eps must be at least 1"));
        }
        Ok(())
    }

    /// Per-leg term inside the norm and its derivative in `z`.
    fn term(&self, f: &SafeFootholdFunction<T>, z: T) -> (T, T) {
        match self.kind {
            CostKind::Sum | CostKind::Prod => f.eval_with_derivative(z),
            CostKind::Int => {
                let m = self.margin;
                let (a, da) = f.eval_with_derivative(z - m);
                let (b, db) = f.eval_with_derivative(z + m);
                (m * (a + b), m * (da + db))
            }
            CostKind::Smooth => {
                let eps = self.smooth_eps as i64;
                let step = self.margin / T::from_count(self.smooth_eps);
                let (mut s, mut ds) = (T::zero(), T::zero());
                for i in -eps..=eps {
                    let (v, d) = f.eval_with_derivative(z + step * T::lit(i as f64));
                    s = s + v;
                    ds = ds + d;
                }
                let k = T::one() / T::from_count(2 * self.smooth_eps);
                (s * k, ds * k)
            }
        }
    }

    /// Cost at the per-leg hip heights `z`.
    pub fn value(&self, fs: &[SafeFootholdFunction<T>], z: &[T]) -> T {
        self.value_and_gradient(fs, z, None)
    }

    /// Cost and, if `grad` is given, `dC/dz_l` for every leg.
    pub fn value_and_gradient(&self, fs: &[SafeFootholdFunction<T>], z: &[T], mut grad: Option<&mut [T]>) -> T {
        debug_assert_eq!(fs.len(), z.len());
        let mut terms = [(T::zero(), T::zero()); 8];
        let terms = &mut terms[..fs.len()];
        for (t, (f, &zl)) in terms.iter_mut().zip(fs.iter().zip(z)) {
            *t = self.term(f, zl);
        }
        let two = T::lit(2.0);
        match self.kind {
            CostKind::Prod => {
                let sq: Vec<T> = terms.iter().map(|&(a, _)| self.q * a * a).collect();
                if let Some(g) = grad.as_deref_mut() {
                    for l in 0..fs.len() {
                        let others: T = sq.iter().enumerate().filter(|&(k, _)| k != l).fold(T::one(), |p, (_, &v)| p * v);
                        g[l] = others * two * self.q * terms[l].0 * terms[l].1;
                    }
                }
                sq.iter().fold(T::one(), |p, &v| p * v)
            }
            _ => {
                if let Some(g) = grad {
                    for (gl, &(a, da)) in g.iter_mut().zip(terms.iter()) {
                        *gl = two * self.q * a * da;
                    }
                }
                terms.iter().map(|&(a, _)| self.q * a * a).sum()
            }
        }
    }
}

pub fn cost_sum<T: Scalar>(fs: &[SafeFootholdFunction<T>], z: &[T], q: T) -> T {
    CostParams { q, ..CostParams::new(CostKind::Sum) }.value(fs, z)
}

pub fn cost_prod<T: Scalar>(fs: &[SafeFootholdFunction<T>], z: &[T], q: T) -> T {
    CostParams { q, ..CostParams::new(CostKind::Prod) }.value(fs, z)
}

pub fn cost_int<T: Scalar>(fs: &[SafeFootholdFunction<T>], z: &[T], q: T, margin: T) -> T {
    CostParams { q, margin, ..CostParams::new(CostKind::Int) }.value(fs, z)
}

pub fn cost_smooth<T: Scalar>(fs: &[SafeFootholdFunction<T>], z: &[T], q: T, margin: T, eps: usize) -> T {
    CostParams { kind: CostKind::Smooth, q, margin, smooth_eps: eps }.value(fs, z)
}

/// Summed envelope thickness `|F(z + m) − F(z − m)|` over legs.
pub fn envelope_error<T: Scalar>(fs: &[SafeFootholdFunction<T>], z: &[T], margin: T) -> T {
    fs.iter().zip(z).map(|(f, &zl)| (f.eval(zl + margin) - f.eval(zl - margin)).abs()).sum()
}

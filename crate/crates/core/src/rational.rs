//! Polynomial and rational-function arithmetic over complex coefficients,
//! Blaschke products, Moebius substitution, and H-infinity norm estimation
//! on the imaginary axis.
//!
//! Coefficients are stored ascending by degree. Rational functions are kept
//! coprime (common roots within a relative tolerance are cancelled) with a
//! monic denominator, so structurally equal functions compare equal
//! coefficient-wise.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for cancelling a common num/den root pair.
pub const COPRIME_TOL: f64 = 1e-8;

/// Relative pole-proximity threshold below which evaluation errors out.
pub const POLE_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

/// Dense polynomial with complex coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Trailing (leading-degree) zero coefficients are trimmed; the zero
    /// polynomial is kept as a single zero coefficient.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |v| v.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::default());
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&x| c(x)).collect())
    }

    pub fn constant(value: Complex64) -> Self {
        Polynomial::new(vec![value])
    }

    pub fn zero() -> Self {
        Polynomial::constant(Complex64::default())
    }

    pub fn one() -> Self {
        Polynomial::constant(c(1.0))
    }

    /// Monic product of (x - r) over the given roots, times `lead`.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut p = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::default(); p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            p = next;
        }
        Polynomial::new(p)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|v| v.norm() == 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for &a in self.coeffs.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Magnitude scale of the evaluation at `x`: sum of |a_k| |x|^k.
    /// Used to decide whether an evaluated value is "small" relative to
    /// the size of the terms that produced it.
    pub fn eval_scale(&self, x: Complex64) -> f64 {
        let r = x.norm();
        let mut acc = 0.0;
        let mut pw = 1.0;
        for a in &self.coeffs {
            acc += a.norm() * pw;
            pw *= r;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &a)| a * c((k + 1) as f64))
                .collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * factor).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::default(); n];
        for (k, &a) in self.coeffs.iter().enumerate() {
            out[k] += a;
        }
        for (k, &b) in other.coeffs.iter().enumerate() {
            out[k] += b;
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Largest |Im| over the coefficients, relative to the largest |coeff|.
    pub fn relative_imag(&self) -> f64 {
        let mx = self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if mx == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().map(|a| a.im.abs()).fold(0.0, f64::max) / mx
    }

    /// Drops imaginary parts. Callers check `relative_imag` first.
    pub fn realified(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| c(a.re)).collect())
    }

    /// Substitutes x -> -x (flips the sign of odd coefficients).
    pub fn reflect(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &a)| if k % 2 == 1 { -a } else { a })
                .collect(),
        )
    }

    /// Entry-wise complex conjugate of the coefficients.
    pub fn conj_coeffs(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a.conj()).collect())
    }

    /// All roots, via the Aberth-Ehrlich simultaneous iteration. Globally
    /// convergent in practice for the small degrees handled here; roots are
    /// polished with Newton steps afterwards.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::DegeneratePolynomial);
        }
        if self.degree() == 0 {
            return Ok(vec![]);
        }
        // Deflate exact zero roots at the origin.
        let mut low = 0;
        while low < self.coeffs.len() - 1 && self.coeffs[low].norm() == 0.0 {
            low += 1;
        }
        let work: Vec<Complex64> = self.coeffs[low..].to_vec();
        let mut roots = vec![Complex64::default(); low];
        let n = work.len() - 1;
        if n == 0 {
            return Ok(roots);
        }
        if n == 1 {
            roots.push(-work[0] / work[1]);
            return Ok(roots);
        }
        if n == 2 {
            let (a, b, cc) = (work[2], work[1], work[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            // Pick the sign that avoids cancellation in -b +/- disc.
            let q = if (b + disc).norm() >= (b - disc).norm() {
                -0.5 * (b + disc)
            } else {
                -0.5 * (b - disc)
            };
            roots.push(q / a);
            roots.push(cc / q);
            return Ok(roots);
        }

        let p = Polynomial::new(work.clone());
        let dp = p.derivative();
        let lead = p.leading();
        // Cauchy-style radius bound for initial placement.
        let radius = 1.0
            + work[..n]
                .iter()
                .map(|a| (a / lead).norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
                Complex64::from_polar(radius * 0.7, ang)
            })
            .collect();

        for _ in 0..300 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = p.eval(z[i]);
                let dv = dp.eval(z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let newton = if dv.norm() > 0.0 { pv / dv } else { pv };
                let mut rep = Complex64::default();
                for k in 0..n {
                    if k != i {
                        let d = z[i] - z[k];
                        if d.norm() > 1e-300 {
                            rep += 1.0 / d;
                        }
                    }
                }
                let denom = 1.0 - newton * rep;
                let step = if denom.norm() > 1e-300 {
                    newton / denom
                } else {
                    newton
                };
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        // Newton polish.
        for zi in z.iter_mut() {
            for _ in 0..4 {
                let dv = dp.eval(*zi);
                if dv.norm() < 1e-300 {
                    break;
                }
                *zi -= p.eval(*zi) / dv;
            }
        }
        roots.extend(z);
        Ok(roots)
    }
}

// ---------------------------------------------------------------------------
// RationalFn
// ---------------------------------------------------------------------------

/// Ratio of polynomials, stored coprime with monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFn {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegeneratePolynomial);
        }
        if num.is_zero() {
            return Ok(RationalFn {
                num: Polynomial::zero(),
                den: Polynomial::one(),
            });
        }
        let mut f = RationalFn { num, den };
        f.cancel_common_roots()?;
        let lead = f.den.leading();
        f.num = f.num.scale(1.0 / lead);
        f.den = f.den.scale(1.0 / lead);
        Ok(f)
    }

    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        RationalFn::new(Polynomial::from_real(num), Polynomial::from_real(den))
    }

    pub fn constant(value: Complex64) -> Self {
        RationalFn {
            num: Polynomial::constant(value),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        RationalFn::constant(c(1.0))
    }

    pub fn zero() -> Self {
        RationalFn::constant(Complex64::default())
    }

    fn cancel_common_roots(&mut self) -> Result<()> {
        if self.num.degree() == 0 || self.den.degree() == 0 {
            return Ok(());
        }
        let nroots = self.num.roots()?;
        let droots = self.den.roots()?;
        let mut keep_d = vec![true; droots.len()];
        let mut keep_n = vec![true; nroots.len()];
        for (i, rn) in nroots.iter().enumerate() {
            for (k, rd) in droots.iter().enumerate() {
                if keep_d[k] && (rn - rd).norm() <= COPRIME_TOL * (1.0 + rn.norm().max(rd.norm()))
                {
                    keep_n[i] = false;
                    keep_d[k] = false;
                    break;
                }
            }
        }
        if keep_n.iter().all(|&k| k) {
            return Ok(());
        }
        let nkeep: Vec<Complex64> = nroots
            .iter()
            .zip(&keep_n)
            .filter(|(_, &k)| k)
            .map(|(r, _)| *r)
            .collect();
        let dkeep: Vec<Complex64> = droots
            .iter()
            .zip(&keep_d)
            .filter(|(_, &k)| k)
            .map(|(r, _)| *r)
            .collect();
        self.num = Polynomial::from_roots(&nkeep, self.num.leading());
        self.den = Polynomial::from_roots(&dkeep, self.den.leading());
        Ok(())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree() || self.num.is_zero()
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let dv = self.den.eval(s);
        let scale = self.den.eval_scale(s).max(1e-300);
        if dv.norm() < POLE_TOL * scale {
            return Err(Error::EvaluationAtPole(s));
        }
        Ok(self.num.eval(s) / dv)
    }

    pub fn derivative(&self) -> Result<RationalFn> {
        let n = self.num.derivative().mul(&self.den);
        let d = self.num.mul(&self.den.derivative());
        RationalFn::new(n.sub(&d), self.den.mul(&self.den))
    }

    /// Substitutes s -> -s.
    pub fn reflect(&self) -> Result<RationalFn> {
        RationalFn::new(self.num.reflect(), self.den.reflect())
    }

    pub fn mul(&self, other: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn add(&self, other: &RationalFn) -> Result<RationalFn> {
        let n = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        RationalFn::new(n, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RationalFn) -> Result<RationalFn> {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn scale(&self, factor: Complex64) -> RationalFn {
        RationalFn {
            num: self.num.scale(factor),
            den: self.den.clone(),
        }
    }

    pub fn inverse(&self) -> Result<RationalFn> {
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        if self.num.degree() == 0 {
            return Ok(vec![]);
        }
        self.num.roots()
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.den.degree() == 0 {
            return Ok(vec![]);
        }
        self.den.roots()
    }

    /// Largest relative |Im| over both coefficient vectors.
    pub fn relative_imag(&self) -> f64 {
        self.num.relative_imag().max(self.den.relative_imag())
    }

    pub fn realified(&self) -> Result<RationalFn> {
        RationalFn::new(self.num.realified(), self.den.realified())
    }

    /// Conjugate-coefficient function: s -> conj(f(conj(s))).
    pub fn conj_coeffs(&self) -> RationalFn {
        RationalFn {
            num: self.num.conj_coeffs(),
            den: self.den.conj_coeffs(),
        }
    }

    /// Conjugate-symmetrization (f(s) + conj(f(conj(s)))) / 2. Produces a
    /// real-coefficient function when the imaginary parts cancel.
    pub fn symmetrize(&self) -> Result<RationalFn> {
        let refl = self.conj_coeffs();
        let sum = self.add(&refl)?;
        let sym = sum.scale(c(0.5));
        if sym.relative_imag() < 1e-9 {
            sym.realified()
        } else {
            Ok(sym)
        }
    }
}

// ---------------------------------------------------------------------------
// BlaschkeProduct
// ---------------------------------------------------------------------------

/// Finite all-pass product over right-half-plane zeros:
/// B(s) = sign * prod (s - z_i) / (s + conj(z_i)).
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    sign: f64,
}

impl BlaschkeProduct {
    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        for &z in &zeros {
            if z.re <= 0.0 {
                return Err(Error::NotInteriorRhp(z));
            }
        }
        Ok(BlaschkeProduct { zeros, sign: 1.0 })
    }

    pub fn one() -> Self {
        BlaschkeProduct {
            zeros: vec![],
            sign: 1.0,
        }
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_one(&self) -> bool {
        self.zeros.is_empty() && self.sign > 0.0
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = c(self.sign);
        for &z in &self.zeros {
            let den = s + z.conj();
            if den.norm() < POLE_TOL * (1.0 + s.norm() + z.norm()) {
                return Err(Error::EvaluationAtPole(s));
            }
            acc *= (s - z) / den;
        }
        Ok(acc)
    }

    pub fn to_rational(&self) -> Result<RationalFn> {
        let num = Polynomial::from_roots(&self.zeros, c(self.sign));
        let mirrored: Vec<Complex64> = self.zeros.iter().map(|z| -z.conj()).collect();
        let den = Polynomial::from_roots(&mirrored, c(1.0));
        RationalFn::new(num, den)
    }
}

// ---------------------------------------------------------------------------
// Moebius substitution
// ---------------------------------------------------------------------------

/// Composes f (a function of z) with z = (s - 1)/(s + 1), returning a
/// rational function of s. Numerator and denominator are homogenized to the
/// same degree so the substitution is exact.
pub fn mobius_substitute(f: &RationalFn) -> Result<RationalFn> {
    let d = f.num().degree().max(f.den().degree());
    let sub = |p: &Polynomial| -> Polynomial {
        // sum_k p_k (s-1)^k (s+1)^(d-k)
        let mut acc = Polynomial::zero();
        for (k, &a) in p.coeffs().iter().enumerate() {
            let mut term = Polynomial::constant(a);
            for _ in 0..k {
                term = term.mul(&Polynomial::from_real(&[-1.0, 1.0]));
            }
            for _ in 0..(d - k) {
                term = term.mul(&Polynomial::from_real(&[1.0, 1.0]));
            }
            acc = acc.add(&term);
        }
        acc
    };
    RationalFn::new(sub(f.num()), sub(f.den()))
}

/// phi: C+ -> D, phi(s) = (s-1)/(s+1).
pub fn phi(s: Complex64) -> Complex64 {
    (s - 1.0) / (s + 1.0)
}

/// phi^{-1}: D -> C+, phi^{-1}(z) = (1+z)/(1-z).
pub fn phi_inv(z: Complex64) -> Complex64 {
    (1.0 + z) / (1.0 - z)
}

// ---------------------------------------------------------------------------
// H-infinity norm on the imaginary axis
// ---------------------------------------------------------------------------

/// Frequency grid and refinement controls for axis-norm estimation.
#[derive(Debug, Clone)]
pub struct AxisNormConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub refine_iters: usize,
}

impl Default for AxisNormConfig {
    fn default() -> Self {
        AxisNormConfig {
            omega_min: 1e-4,
            omega_max: 1e4,
            points: 2000,
            refine_iters: 80,
        }
    }
}

/// Supremum of |f(j w)| over the axis, by logarithmic grid sampling with
/// golden-section refinement around the grid maximum. Includes w = 0 and
/// high-frequency probe samples. `f` returns None at frequencies it cannot
/// evaluate (e.g. pole proximity); those are skipped.
pub fn hinf_norm_axis<F>(f: F, cfg: &AxisNormConfig) -> Result<f64>
where
    F: Fn(f64) -> Option<Complex64>,
{
    let mags = |w: f64| -> Result<Option<f64>> {
        match f(w) {
            Some(v) => {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::UnboundedOnAxis(w));
                }
                Ok(Some(v.norm()))
            }
            None => Ok(None),
        }
    };

    let n = cfg.points.max(8);
    let lmin = cfg.omega_min.ln();
    let lmax = cfg.omega_max.ln();
    let mut grid: Vec<f64> = Vec::with_capacity(n + 4);
    grid.push(0.0);
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        grid.push((lmin + t * (lmax - lmin)).exp());
    }
    // High-frequency probes for the limit toward infinity.
    for hf in [1e6, 1e7, 1e8, 1e9] {
        if hf > cfg.omega_max {
            grid.push(hf);
        }
    }

    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0usize;
    let mut any = false;
    for (i, &w) in grid.iter().enumerate() {
        if let Some(m) = mags(w)? {
            any = true;
            if m > best {
                best = m;
                best_idx = i;
            }
        }
    }
    if !any {
        return Err(Error::Numerical("no evaluable axis samples".into()));
    }

    // Golden-section refinement on the bracket around the grid maximum,
    // in log frequency (linear near w = 0).
    let lo = if best_idx == 0 {
        0.0
    } else {
        grid[best_idx - 1]
    };
    let hi = if best_idx + 1 < grid.len() {
        grid[best_idx + 1]
    } else {
        grid[best_idx] * 10.0
    };
    let to_t = |w: f64| -> f64 { w };
    let (mut a, mut b) = (to_t(lo), to_t(hi));
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - gr * (b - a);
    let mut x2 = a + gr * (b - a);
    let mut f1 = mags(x1)?.unwrap_or(f64::NEG_INFINITY);
    let mut f2 = mags(x2)?.unwrap_or(f64::NEG_INFINITY);
    for _ in 0..cfg.refine_iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = mags(x2)?.unwrap_or(f64::NEG_INFINITY);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = mags(x1)?.unwrap_or(f64::NEG_INFINITY);
        }
    }
    Ok(best.max(f1).max(f2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((r[0] - cx(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - cx(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_unit_numerator() {
        // numerator of the third-order unit: 295.84 + 21.45 s + 3.77 s^2 + 0.068 s^3
        let p = Polynomial::from_real(&[295.84, 21.45, 3.77, 0.068]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap().then(a.re.partial_cmp(&b.re).unwrap()));
        let expect = [
            cx(-2.2583, -8.9628),
            cx(-50.9245, 0.0),
            cx(-2.2583, 8.9628),
        ];
        for (got, want) in r.iter().zip(expect.iter()) {
            assert!((got - want).norm() < 1e-3, "{got} vs {want}");
        }
    }

    #[test]
    fn degenerate_polynomial_errors() {
        assert!(Polynomial::zero().roots().is_err());
        assert!(Polynomial::one().roots().unwrap().is_empty());
    }

    #[test]
    fn eval_weight_at_zero_and_j() {
        let w = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
        assert!((w.eval(cx(0.0, 0.0)).unwrap() - cx(1.0, 0.0)).norm() < 1e-15);
        let got = w.eval(cx(0.0, 1.0)).unwrap();
        let want = cx(1.0, 0.1) / cx(1.0, 1.0);
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn eval_at_pole_errors() {
        let f = RationalFn::from_real(&[1.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(
            f.eval(cx(-1.0, 0.0)),
            Err(Error::EvaluationAtPole(_))
        ));
    }

    #[test]
    fn coprime_normalization_cancels() {
        // (s-1)(s+2) / (s+2)(s+3) -> (s-1)/(s+3)
        let num = Polynomial::from_roots(&[cx(1.0, 0.0), cx(-2.0, 0.0)], cx(1.0, 0.0));
        let den = Polynomial::from_roots(&[cx(-2.0, 0.0), cx(-3.0, 0.0)], cx(1.0, 0.0));
        let f = RationalFn::new(num, den).unwrap();
        assert_eq!(f.num().degree(), 1);
        assert_eq!(f.den().degree(), 1);
        let got = f.eval(cx(2.0, 0.0)).unwrap();
        assert!((got - cx(0.2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn blaschke_single_zero() {
        let b = BlaschkeProduct::from_zeros(vec![cx(1.0, 0.0)]).unwrap();
        let r = b.to_rational().unwrap();
        assert!((r.eval(cx(0.0, 0.0)).unwrap() - cx(-1.0, 0.0)).norm() < 1e-14);
        assert!(b.eval(cx(1.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn blaschke_rejects_lhp_zero() {
        assert!(BlaschkeProduct::from_zeros(vec![cx(-0.5, 1.0)]).is_err());
    }

    #[test]
    fn blaschke_empty_is_one() {
        let b = BlaschkeProduct::one();
        assert!(b.is_one());
        assert!((b.eval(cx(3.0, 4.0)).unwrap() - cx(1.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn blaschke_paper_pair_allpass() {
        let z = cx(0.3125, 0.8548);
        let b = BlaschkeProduct::from_zeros(vec![z, z.conj()]).unwrap();
        for k in 0..500 {
            let w = -50.0 + (k as f64) * 0.2004;
            let v = b.eval(cx(0.0, w)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-10, "w={w}");
        }
    }

    #[test]
    fn mobius_identity_map() {
        let f = RationalFn::from_real(&[0.0, 1.0], &[1.0]).unwrap(); // f(z)=z
        let g = mobius_substitute(&f).unwrap();
        for s in [cx(2.0, 0.3), cx(0.5, -1.2), cx(10.0, 5.0)] {
            let want = phi(s);
            assert!((g.eval(s).unwrap() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn mobius_constant() {
        let f = RationalFn::constant(cx(2.5, -0.5));
        let g = mobius_substitute(&f).unwrap();
        assert!((g.eval(cx(4.0, 1.0)).unwrap() - cx(2.5, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn hinf_weight_is_one_at_dc() {
        let w = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
        let norm = hinf_norm_axis(
            |om| w.eval(cx(0.0, om)).ok(),
            &AxisNormConfig::default(),
        )
        .unwrap();
        assert!((norm - 1.0).abs() < 1e-9, "norm={norm}");
    }

    #[test]
    fn hinf_third_order_unit_and_inverse() {
        let f = RationalFn::from_real(
            &[295.84, 21.45, 3.77, 0.068],
            &[296.27, 187.25, 62.77, 9.93],
        )
        .unwrap();
        let cfg = AxisNormConfig::default();
        let nf = hinf_norm_axis(|om| f.eval(cx(0.0, om)).ok(), &cfg).unwrap();
        assert!((nf - 295.84 / 296.27).abs() < 1e-3, "|F| = {nf}");
        let fi = f.inverse().unwrap();
        let ni = hinf_norm_axis(|om| fi.eval(cx(0.0, om)).ok(), &cfg).unwrap();
        assert!((ni - 146.0).abs() < 5.0, "|1/F| = {ni}");
    }

    proptest! {
        #[test]
        fn root_coeff_roundtrip(coeffs in proptest::collection::vec(-3.0f64..3.0, 3..11)) {
            prop_assume!(coeffs.last().map_or(false, |&l| l.abs() > 0.05));
            let p = Polynomial::from_real(&coeffs);
            let roots = p.roots().unwrap();
            let q = Polynomial::from_roots(&roots, p.leading());
            let scale = p.coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max);
            for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a - b).norm() < 1e-8 * scale.max(1.0));
            }
        }

        #[test]
        fn blaschke_allpass_on_grid(res in proptest::collection::vec(0.05f64..4.0, 1..4),
                                    ims in proptest::collection::vec(-4.0f64..4.0, 1..4),
                                    w in -100.0f64..100.0) {
            let zeros: Vec<Complex64> = res.iter().zip(ims.iter())
                .map(|(&re, &im)| cx(re, im)).collect();
            let b = BlaschkeProduct::from_zeros(zeros).unwrap();
            let v = b.eval(cx(0.0, w)).unwrap();
            prop_assert!((v.norm() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn mobius_commutes_with_eval(nc in proptest::collection::vec(-2.0f64..2.0, 1..4),
                                     dc in proptest::collection::vec(-2.0f64..2.0, 1..4),
                                     re in 0.2f64..5.0, im in -5.0f64..5.0) {
            prop_assume!(nc.last().map_or(false, |&l| l.abs() > 0.05));
            prop_assume!(dc.last().map_or(false, |&l| l.abs() > 0.05));
            let f = match RationalFn::from_real(&nc, &dc) { Ok(f) => f, Err(_) => return Ok(()) };
            let g = mobius_substitute(&f).unwrap();
            let s = cx(re, im);
            let z = phi(s);
            if let (Ok(lhs), Ok(rhs)) = (g.eval(s), f.eval(z)) {
                prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
            }
        }

        #[test]
        fn hinf_scales_linearly(alpha in 0.1f64..10.0) {
            let f = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
            let cfg = AxisNormConfig { points: 200, ..Default::default() };
            let n1 = hinf_norm_axis(|om| f.eval(cx(0.0, om)).ok(), &cfg).unwrap();
            let n2 = hinf_norm_axis(|om| f.eval(cx(0.0, om)).ok().map(|v| v * alpha), &cfg).unwrap();
            prop_assert!((n2 - alpha * n1).abs() < 1e-12 * alpha.max(1.0));
        }
    }
}

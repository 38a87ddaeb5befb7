//! Inner/inner/outer plant factorization P = (Mn / Md) No for the two
//! supported plant classes, plus outer regularization N_eps.
//!
//! Case ii.a (R an F-system, T an I-system with F-system conjugate):
//!   Mn = M_R,  Md = M_Tbar * T / Tbar,  No = (R / M_R) * (M_Tbar / Tbar).
//! Case ii.b (R and T both F-systems):
//!   Mn = M_R,  Md = M_T,  No = (R / M_R) * (M_T / T).
//!
//! Md and No stay composite evaluables; T / Tbar is irrational so no closed
//! rational form exists. Downstream consumers only evaluate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quasipoly::{QuasiPolynomial, SystemClass, ZeroBox};
use crate::rational::{hinf_norm_axis, AxisNormConfig, BlaschkeProduct};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorizationCase {
    /// R F-system, T I-system: denominator handled through the conjugate.
    IIa,
    /// R and T both F-systems.
    IIb,
}

/// Inner/inner/outer decomposition of a delay plant, kept evaluable.
#[derive(Debug, Clone)]
pub struct PlantFactorization {
    pub case: FactorizationCase,
    pub mn: BlaschkeProduct,
    /// M_Tbar in case ii.a, M_T in case ii.b.
    pub m_den: BlaschkeProduct,
    pub n_o: u32,
    pub epsilon: f64,
    r: QuasiPolynomial,
    t: QuasiPolynomial,
    tbar: Option<QuasiPolynomial>,
}

impl PlantFactorization {
    pub fn r(&self) -> &QuasiPolynomial {
        &self.r
    }

    pub fn t(&self) -> &QuasiPolynomial {
        &self.t
    }

    pub fn tbar(&self) -> Option<&QuasiPolynomial> {
        self.tbar.as_ref()
    }

    pub fn eval_plant(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.r.eval(s)? / self.t.eval(s)?)
    }

    /// Inner denominator factor Md.
    pub fn eval_md(&self, s: Complex64) -> Result<Complex64> {
        match self.case {
            FactorizationCase::IIa => {
                let tbar = self.tbar.as_ref().unwrap();
                Ok(self.m_den.eval(s)? * self.t.eval(s)? / tbar.eval(s)?)
            }
            FactorizationCase::IIb => self.m_den.eval(s),
        }
    }

    /// Outer factor No.
    pub fn eval_no(&self, s: Complex64) -> Result<Complex64> {
        match self.case {
            FactorizationCase::IIa => {
                let tbar = self.tbar.as_ref().unwrap();
                Ok(self.r.eval(s)? / self.mn.eval(s)? * self.m_den.eval(s)? / tbar.eval(s)?)
            }
            FactorizationCase::IIb => {
                Ok(self.r.eval(s)? / self.mn.eval(s)? * self.m_den.eval(s)? / self.t.eval(s)?)
            }
        }
    }

    /// Regularized outer N_eps = No (1 + eps s)^{n_o}.
    pub fn eval_n_eps(&self, s: Complex64) -> Result<Complex64> {
        let mut v = self.eval_no(s)?;
        for _ in 0..self.n_o {
            v *= 1.0 + self.epsilon * s;
        }
        Ok(v)
    }

    /// Relative reconstruction residual max |Mn/Md*No - P| / |P| over a
    /// right-half-plane sample grid, avoiding zero/pole neighborhoods.
    pub fn reconstruction_residual(&self, samples: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        let mut used = 0usize;
        let mut k = 0usize;
        while used < samples && k < samples * 8 {
            k += 1;
            // deterministic low-discrepancy-ish sweep over a C+ patch
            let a = 0.07 + 3.9 * ((k as f64 * 0.6180339887).fract());
            let b = -12.0 + 24.0 * ((k as f64 * 0.3819660113).fract());
            let s = cx(a, b);
            let p = match self.eval_plant(s) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if p.norm() < 1e-6 {
                continue;
            }
            let (mn, md, no) = match (self.mn.eval(s), self.eval_md(s), self.eval_no(s)) {
                (Ok(a1), Ok(a2), Ok(a3)) => (a1, a2, a3),
                _ => continue,
            };
            if md.norm() < 1e-9 {
                continue;
            }
            let rec = mn / md * no;
            worst = worst.max((rec - p).norm() / p.norm());
            used += 1;
        }
        if used == 0 {
            return Err(Error::Numerical("no usable reconstruction samples".into()));
        }
        Ok(worst)
    }
}

/// Fits the decay slope of 20 log10 |No(j w)| over the top decades of the
/// frequency grid and snaps it to -20 n_o dB/decade.
pub fn relative_degree<F>(no: F) -> Result<u32>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (lo, hi, n) = (1e2_f64, 1e4_f64, 400usize);
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut m = 0.0;
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let w = lo * (hi / lo).powf(t);
        let v = no(cx(0.0, w))?;
        if v.norm() <= 0.0 {
            continue;
        }
        let x = w.log10();
        let y = 20.0 * v.norm().log10();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::Numerical("degenerate slope fit".into()));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let k = (-slope / 20.0).round();
    if (slope + 20.0 * k).abs() > 0.2 || k < 0.0 {
        return Err(Error::NonIntegerRelativeDegree(slope));
    }
    Ok(k as u32)
}

/// Produces the inner/inner/outer factorization for a plant P = R / T whose
/// right-half-plane zeros are searched inside `zero_box`.
pub fn factorize(
    r: &QuasiPolynomial,
    t: &QuasiPolynomial,
    zero_box: &ZeroBox,
    epsilon: f64,
) -> Result<PlantFactorization> {
    if r.classify()? != SystemClass::FSystem {
        return Err(Error::InfinitelyManyPlantZeros);
    }
    let r_zeros = r.rhp_zeros(zero_box, 40)?;
    let mn = BlaschkeProduct::from_zeros(r_zeros.zeros.clone())?;

    let (case, m_den, tbar) = match t.classify()? {
        SystemClass::FSystem => {
            let t_zeros = t.rhp_zeros(zero_box, 40)?;
            (
                FactorizationCase::IIb,
                BlaschkeProduct::from_zeros(t_zeros.zeros)?,
                None,
            )
        }
        SystemClass::ISystem => {
            let tbar = t.conjugate()?;
            if tbar.classify()? != SystemClass::FSystem {
                return Err(Error::MarginalChain);
            }
            let tb_zeros = tbar.rhp_zeros(zero_box, 40)?;
            (
                FactorizationCase::IIa,
                BlaschkeProduct::from_zeros(tb_zeros.zeros)?,
                Some(tbar),
            )
        }
    };

    let mut fact = PlantFactorization {
        case,
        mn,
        m_den,
        n_o: 0,
        epsilon,
        r: r.clone(),
        t: t.clone(),
        tbar,
    };
    fact.n_o = relative_degree(|s| fact.eval_no(s))?;
    Ok(fact)
}

/// Axis infimum of |No(j w)|, used by the controller norm bound.
pub fn outer_axis_infimum<F>(no: F) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let inv_sup = hinf_norm_axis(
        |w| {
            no(cx(0.0, w)).ok().and_then(|v| {
                if v.norm() > 1e-300 {
                    Some(Complex64::new(1.0 / v.norm(), 0.0))
                } else {
                    None
                }
            })
        },
        &AxisNormConfig::default(),
    )?;
    Ok(1.0 / inv_sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasipoly::example_plant;
    use crate::rational::RationalFn;

    #[test]
    fn example_plant_factorization() {
        let (r, t) = example_plant();
        let fact = factorize(&r, &t, &ZeroBox::new(0.0, 5.0, -2.0, 2.0), 1e-3).unwrap();
        assert_eq!(fact.case, FactorizationCase::IIa);
        assert_eq!(fact.mn.degree(), 2);
        // M_Tbar = 1: Tbar is bounded away from zero in the right half plane.
        assert!(fact.m_den.is_one());
        assert_eq!(fact.n_o, 0);
        let s1 = cx(0.3125216091850, 0.8547797280480);
        assert!(fact
            .mn
            .zeros()
            .iter()
            .any(|z| (z - s1).norm() < 1e-6));
        let resid = fact.reconstruction_residual(100).unwrap();
        assert!(resid < 1e-8, "reconstruction residual {resid}");
    }

    #[test]
    fn inner_factors_allpass_on_axis() {
        let (r, t) = example_plant();
        let fact = factorize(&r, &t, &ZeroBox::new(0.0, 5.0, -2.0, 2.0), 1e-3).unwrap();
        for k in 0..200 {
            let w = -40.0 + 0.4 * k as f64;
            let s = cx(0.0, w);
            let mn = fact.mn.eval(s).unwrap();
            let md = fact.eval_md(s).unwrap();
            assert!((mn.norm() - 1.0).abs() < 1e-8);
            assert!((md.norm() - 1.0).abs() < 1e-8);
            // outer modulus equals plant modulus on the axis
            let no = fact.eval_no(s).unwrap();
            let p = fact.eval_plant(s).unwrap();
            assert!((no.norm() - p.norm()).abs() < 1e-8 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn trivial_rational_plant() {
        // R = (s-1)/(s+1), T = 1: Mn = (s-1)/(s+1) zeros {1}, Md = 1, No = R/Mn.
        let rr = QuasiPolynomial::from_rational(
            RationalFn::from_real(&[-1.0, 1.0], &[1.0, 1.0]).unwrap(),
        );
        let tt = QuasiPolynomial::from_rational(RationalFn::one());
        let fact = factorize(&rr, &tt, &ZeroBox::new(0.0, 4.0, -3.0, 3.0), 1e-3).unwrap();
        assert_eq!(fact.case, FactorizationCase::IIb);
        assert_eq!(fact.mn.degree(), 1);
        assert!((fact.mn.zeros()[0] - cx(1.0, 0.0)).norm() < 1e-9);
        assert!(fact.m_den.is_one());
        let resid = fact.reconstruction_residual(60).unwrap();
        assert!(resid < 1e-9);
    }

    #[test]
    fn stable_minimum_phase_plant_is_outer() {
        let rr = QuasiPolynomial::from_rational(
            RationalFn::from_real(&[2.0, 1.0], &[3.0, 1.0]).unwrap(),
        );
        let tt = QuasiPolynomial::from_rational(RationalFn::one());
        let fact = factorize(&rr, &tt, &ZeroBox::new(0.0, 4.0, -3.0, 3.0), 1e-3).unwrap();
        assert!(fact.mn.is_one());
        assert!(fact.m_den.is_one());
        let s = cx(0.5, 0.2);
        let no = fact.eval_no(s).unwrap();
        let p = fact.eval_plant(s).unwrap();
        assert!((no - p).norm() < 1e-12);
    }

    #[test]
    fn relative_degree_detection() {
        let one_pole = RationalFn::from_real(&[1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(relative_degree(|s| one_pole.eval(s)).unwrap(), 1);
        let two_pole = RationalFn::from_real(&[1.0], &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(relative_degree(|s| two_pole.eval(s)).unwrap(), 2);
        let biproper = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
        assert_eq!(relative_degree(|s| biproper.eval(s)).unwrap(), 0);
    }

    #[test]
    fn regularization_flattens_slope() {
        // No = 1/(s+1), eps = 0.1: N_eps = (1+0.1s)/(s+1), relative degree 0.
        let rr = QuasiPolynomial::from_rational(
            RationalFn::from_real(&[1.0], &[1.0, 1.0]).unwrap(),
        );
        let tt = QuasiPolynomial::from_rational(RationalFn::one());
        let mut fact = factorize(&rr, &tt, &ZeroBox::new(0.0, 4.0, -3.0, 3.0), 0.1).unwrap();
        assert_eq!(fact.n_o, 1);
        let expected = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
        for s in [cx(0.0, 0.5), cx(1.0, 2.0), cx(0.3, -4.0)] {
            let got = fact.eval_n_eps(s).unwrap();
            let want = expected.eval(s).unwrap();
            assert!((got - want).norm() < 1e-12);
        }
        assert_eq!(relative_degree(|s| fact.eval_n_eps(s)).unwrap(), 0);
        // n_o = 0 case: N_eps = No for any eps
        fact.n_o = 0;
        let s = cx(0.4, 1.1);
        assert!((fact.eval_n_eps(s).unwrap() - fact.eval_no(s).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn outer_infimum_of_example() {
        let (r, t) = example_plant();
        let fact = factorize(&r, &t, &ZeroBox::new(0.0, 5.0, -2.0, 2.0), 1e-3).unwrap();
        let inf = outer_axis_infimum(|s| fact.eval_no(s)).unwrap();
        assert!(inf > 0.1, "inf |No| = {inf}");
    }
}

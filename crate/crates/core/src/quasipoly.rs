//! Quasi-polynomials Q(s) = sum_i C_i(s) exp(-h_i s) with stable proper
//! rational coefficients and rational delays: evaluation, conjugation,
//! right-half-plane zero location by the argument principle, and
//! F-system / I-system classification.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rational::{BlaschkeProduct, RationalFn};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Finite sum of stable proper rational transfer functions times delay
/// exponentials. Terms are kept sorted by strictly increasing delay; the
/// first delay must be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPolynomial {
    terms: Vec<(RationalFn, Rational64)>,
}

/// Rectangle in the complex plane used as a zero search region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ZeroBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        ZeroBox {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    fn expanded(&self, eps: f64) -> ZeroBox {
        let dx = eps * (1.0 + self.re_max - self.re_min);
        let dy = eps * (1.0 + self.im_max - self.im_min);
        ZeroBox {
            re_min: self.re_min - dx,
            re_max: self.re_max + dx,
            im_min: self.im_min - dy,
            im_max: self.im_max + dy,
        }
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

/// Zeros found in a search box together with the argument-principle count.
#[derive(Debug, Clone)]
pub struct RhpZeroReport {
    pub zeros: Vec<Complex64>,
    pub count: usize,
    pub search_box: ZeroBox,
    pub classification_hint: ChainHint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainHint {
    Finite,
    ChainDetected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemClass {
    FSystem,
    ISystem,
}

impl QuasiPolynomial {
    /// Terms are sorted by delay; equal delays are merged by adding their
    /// coefficients.
    pub fn new(terms: Vec<(RationalFn, Rational64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidQuasiPolynomial("no terms".into()));
        }
        let mut terms = terms;
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(RationalFn, Rational64)> = Vec::with_capacity(terms.len());
        for (coeff, delay) in terms {
            if delay < Rational64::from_integer(0) {
                return Err(Error::InvalidQuasiPolynomial(format!(
                    "negative delay {delay}"
                )));
            }
            match merged.last_mut() {
                Some((acc, d)) if *d == delay => *acc = acc.add(&coeff)?,
                _ => merged.push((coeff, delay)),
            }
        }
        if merged[0].1 != Rational64::from_integer(0) {
            return Err(Error::InvalidQuasiPolynomial(
                "first delay must be zero".into(),
            ));
        }
        Ok(QuasiPolynomial { terms: merged })
    }

    /// Single delay-free rational term.
    pub fn from_rational(f: RationalFn) -> Self {
        QuasiPolynomial {
            terms: vec![(f, Rational64::from_integer(0))],
        }
    }

    pub fn terms(&self) -> &[(RationalFn, Rational64)] {
        &self.terms
    }

    pub fn max_delay(&self) -> Rational64 {
        self.terms.last().unwrap().1
    }

    pub fn is_delay_free(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1 == Rational64::from_integer(0)
    }

    /// Checks conditions on the class: stable proper coefficients and no
    /// imaginary-axis zeros (grid check).
    pub fn validate(&self) -> Result<()> {
        for (coeff, delay) in &self.terms {
            if !coeff.is_proper() {
                return Err(Error::InvalidQuasiPolynomial(format!(
                    "coefficient at delay {delay} is improper"
                )));
            }
            for p in coeff.poles()? {
                if p.re >= -1e-12 {
                    return Err(Error::InvalidQuasiPolynomial(format!(
                        "coefficient at delay {delay} has unstable pole {p}"
                    )));
                }
            }
        }
        // Condition (ii): no zeros on the imaginary axis, checked on a grid.
        let mut min_rel = f64::INFINITY;
        for k in 0..4001 {
            let w = -100.0 + 0.05 * k as f64;
            let s = cx(0.0, w);
            let (v, scale) = match self.eval_with_scale(s) {
                Ok(p) => p,
                Err(_) => continue,
            };
            min_rel = min_rel.min(v.norm() / scale.max(1e-300));
        }
        if min_rel <= 1e-6 {
            return Err(Error::ImaginaryAxisZero(min_rel));
        }
        Ok(())
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.eval_with_scale(s)?.0)
    }

    /// Value together with the sum of term magnitudes (a natural local scale
    /// for "is this value near zero").
    pub fn eval_with_scale(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let mut acc = Complex64::default();
        let mut scale = 0.0;
        for (coeff, delay) in &self.terms {
            let h = delay.to_f64().unwrap();
            let term = coeff.eval(s)? * (-h * s).exp();
            scale += term.norm();
            acc += term;
        }
        Ok((acc, scale))
    }

    pub fn derivative(&self) -> Result<QuasiPolynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (coeff, delay) in &self.terms {
            let h = delay.to_f64().unwrap();
            let d = coeff
                .derivative()?
                .sub(&coeff.scale(cx(h, 0.0)))?;
            terms.push((d, *delay));
        }
        Ok(QuasiPolynomial { terms })
    }

    /// Conjugate system: Tbar(s) = exp(-tau_max s) T(-s) M_C(s), with M_C the
    /// finite Blaschke product over the mirrored poles of the coefficients,
    /// making every conjugated term stable and proper. Delays become
    /// tau_max - tau_j, re-sorted ascending.
    pub fn conjugate(&self) -> Result<QuasiPolynomial> {
        let tau_max = self.max_delay();
        let mut mirrored: Vec<Complex64> = Vec::new();
        for (coeff, _) in &self.terms {
            for p in coeff.poles()? {
                mirrored.push(-p);
            }
        }
        let m_c = BlaschkeProduct::from_zeros(mirrored)?.to_rational()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (coeff, delay) in &self.terms {
            let refl = coeff.reflect()?;
            let new_coeff = refl.mul(&m_c)?;
            let new_coeff = if new_coeff.relative_imag() < 1e-12 {
                new_coeff.realified()?
            } else {
                new_coeff
            };
            terms.push((new_coeff, tau_max - delay));
        }
        QuasiPolynomial::new(terms)
    }

    /// Winding number of Q around the box boundary, by adaptive phase
    /// stepping (phase change per accepted step below pi/4).
    fn winding_number(&self, b: &ZeroBox) -> Result<i64> {
        let corners = [
            cx(b.re_min, b.im_min),
            cx(b.re_max, b.im_min),
            cx(b.re_max, b.im_max),
            cx(b.re_min, b.im_max),
            cx(b.re_min, b.im_min),
        ];
        // Cap the absolute arc-length of an accepted step so that the delay
        // exponentials cannot wrap a full turn unnoticed between samples.
        let h_max = self.max_delay().to_f64().unwrap();
        let max_step = std::f64::consts::FRAC_PI_4 / (1.0 + h_max);
        let mut total = 0.0f64;
        for seg in corners.windows(2) {
            let (p0, p1) = (seg[0], seg[1]);
            let seg_len = (p1 - p0).norm();
            let frac_cap = (max_step / seg_len).min(0.26);
            let fval = |t: f64| -> Result<Complex64> {
                let s = p0 + (p1 - p0) * t;
                let (v, scale) = self.eval_with_scale(s)?;
                if v.norm() < 1e-11 * scale.max(1e-300) {
                    return Err(Error::BoundaryZeroSuspected);
                }
                Ok(v)
            };
            let mut stack = vec![(0.0f64, 1.0f64, fval(0.0)?, fval(1.0)?, 0u32)];
            while let Some((t0, t1, f0, f1, depth)) = stack.pop() {
                let dphi = (f1 / f0).arg();
                if dphi.abs() < std::f64::consts::FRAC_PI_4 && (t1 - t0) <= frac_cap {
                    total += dphi;
                } else {
                    if depth > 40 {
                        return Err(Error::BoundaryZeroSuspected);
                    }
                    let tm = 0.5 * (t0 + t1);
                    let fm = fval(tm)?;
                    stack.push((t0, tm, f0, fm, depth + 1));
                    stack.push((tm, t1, fm, f1, depth + 1));
                }
            }
        }
        let w = total / (2.0 * std::f64::consts::PI);
        let rounded = w.round();
        if (w - rounded).abs() > 0.25 {
            return Err(Error::Numerical(format!(
                "winding number {w:.4} far from integer"
            )));
        }
        Ok(rounded as i64)
    }

    fn winding_with_perturbation(&self, b: &ZeroBox) -> Result<(i64, ZeroBox)> {
        let mut eps = 0.0;
        for _ in 0..4 {
            let bb = if eps == 0.0 { *b } else { b.expanded(eps) };
            match self.winding_number(&bb) {
                Ok(w) => return Ok((w, bb)),
                Err(Error::BoundaryZeroSuspected) => {
                    eps = if eps == 0.0 { 1e-6 } else { eps * 8.0 };
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::BoundaryZeroSuspected)
    }

    fn newton_refine(
        &self,
        start: Complex64,
        dq: &QuasiPolynomial,
        clamp: f64,
    ) -> Option<Complex64> {
        let mut z = start;
        for _ in 0..100 {
            let v = self.eval(z).ok()?;
            let d = dq.eval(z).ok()?;
            if d.norm() < 1e-300 {
                return None;
            }
            let mut step = v / d;
            if step.norm() > clamp {
                step *= clamp / step.norm();
            }
            z -= step;
            if step.norm() < 1e-13 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        Some(z)
    }

    /// True when z is a fresh, verified zero inside the box; pushes it.
    fn accept_zero(&self, z: Complex64, bx: &ZeroBox, zeros: &mut Vec<Complex64>) -> bool {
        let Ok((v, scale)) = self.eval_with_scale(z) else {
            return false;
        };
        if v.norm() >= 1e-8 * scale.max(1e-300) || !bx.contains(z, 1e-9) {
            return false;
        }
        if zeros
            .iter()
            .any(|zz| (zz - z).norm() < 1e-7 * (1.0 + z.norm()))
        {
            return false;
        }
        zeros.push(z);
        true
    }

    /// Locates all zeros in the box: argument-principle count, then
    /// quadtree subdivision with Newton refinement until every counted zero
    /// is resolved.
    pub fn rhp_zeros(&self, search: &ZeroBox, max_subdiv: u32) -> Result<RhpZeroReport> {
        let dq = self.derivative()?;
        let (count, eff_box) = self.winding_with_perturbation(search)?;
        if count < 0 {
            return Err(Error::Numerical("negative winding number".into()));
        }
        let count = count as usize;
        let mut zeros: Vec<Complex64> = Vec::new();
        if count > 0 {
            let mut queue = vec![(eff_box, count, 0u32)];
            while let Some((bx, cnt, depth)) = queue.pop() {
                #[cfg(feature = "trace-zeros")]
                eprintln!(
                    "cell [{:.3},{:.3}]x[{:.3},{:.3}] cnt={} depth={}",
                    bx.re_min, bx.re_max, bx.im_min, bx.im_max, cnt, depth
                );
                if cnt == 0 {
                    continue;
                }
                let w = bx.re_max - bx.re_min;
                let h = bx.im_max - bx.im_min;
                let diag = w.hypot(h);
                // Keep splitting until the cell is small enough for Newton to
                // have a trustworthy basin, then polish from cell points.
                if diag < 0.4 || depth >= max_subdiv {
                    let mut found_here = 0usize;
                    for (fx, fy) in [
                        (0.5, 0.5),
                        (0.25, 0.25),
                        (0.75, 0.75),
                        (0.25, 0.75),
                        (0.75, 0.25),
                    ] {
                        let st = cx(bx.re_min + fx * w, bx.im_min + fy * h);
                        if let Some(z) = self.newton_refine(st, &dq, diag.max(0.2)) {
                            if self.accept_zero(z, &eff_box, &mut zeros) {
                                found_here += 1;
                                if found_here >= cnt {
                                    break;
                                }
                            }
                        }
                    }
                    continue;
                }
                // Split along the longer edge, nudging the split line when a
                // zero sits on it; children tile the parent exactly so the
                // counts stay conserved.
                let mut split_done = false;
                for frac in [0.5, 0.53, 0.47, 0.57, 0.43, 0.61] {
                    let (b1, b2) = if w > h {
                        let mid = bx.re_min + frac * w;
                        (
                            ZeroBox::new(bx.re_min, mid, bx.im_min, bx.im_max),
                            ZeroBox::new(mid, bx.re_max, bx.im_min, bx.im_max),
                        )
                    } else {
                        let mid = bx.im_min + frac * h;
                        (
                            ZeroBox::new(bx.re_min, bx.re_max, bx.im_min, mid),
                            ZeroBox::new(bx.re_min, bx.re_max, mid, bx.im_max),
                        )
                    };
                    let c1 = match self.winding_number(&b1) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    let c2 = match self.winding_number(&b2) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    if c1 < 0 || c2 < 0 || (c1 + c2) as usize != cnt {
                        continue;
                    }
                    queue.push((b1, c1 as usize, depth + 1));
                    queue.push((b2, c2 as usize, depth + 1));
                    split_done = true;
                    break;
                }
                if !split_done {
                    // No clean split line found: raid the cell with a grid of
                    // Newton starts.
                    let k = 7;
                    for i in 0..k {
                        for jj in 0..k {
                            let st = cx(
                                bx.re_min + (i as f64 + 0.5) / k as f64 * w,
                                bx.im_min + (jj as f64 + 0.5) / k as f64 * h,
                            );
                            if let Some(z) = self.newton_refine(st, &dq, diag) {
                                self.accept_zero(z, &eff_box, &mut zeros);
                            }
                        }
                    }
                }
            }
        }
        if zeros.len() != count {
            // Last resort: grid raid over the whole effective box.
            let w = eff_box.re_max - eff_box.re_min;
            let h = eff_box.im_max - eff_box.im_min;
            let k = 32usize;
            'raid: for i in 0..k {
                for jj in 0..k {
                    let st = cx(
                        eff_box.re_min + (i as f64 + 0.5) / k as f64 * w,
                        eff_box.im_min + (jj as f64 + 0.5) / k as f64 * h,
                    );
                    if let Some(z) = self.newton_refine(st, &dq, 0.5 * w.hypot(h)) {
                        self.accept_zero(z, &eff_box, &mut zeros);
                        if zeros.len() == count {
                            break 'raid;
                        }
                    }
                }
            }
        }
        if zeros.len() != count {
            return Err(Error::UnresolvedCluster {
                expected: count,
                found: zeros.len(),
            });
        }
        zeros.sort_by(|a, b| {
            a.im.abs()
                .partial_cmp(&b.im.abs())
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        let hint = match self.chain_real_part()? {
            Some(sigma) if sigma > 1e-6 => ChainHint::ChainDetected,
            _ => ChainHint::Finite,
        };
        Ok(RhpZeroReport {
            zeros,
            count,
            search_box: eff_box,
            classification_hint: hint,
        })
    }

    /// Asymptotic real part of the rightmost high-frequency zero chain, from
    /// pairwise balances of the terms' leading behaviors g_j s^{d_j}.
    /// Returns None when the value is within the marginal band of zero, and
    /// +/- infinity encodes chains drifting right/left.
    fn chain_real_part(&self) -> Result<Option<f64>> {
        if self.terms.len() < 2 {
            return Ok(Some(f64::NEG_INFINITY));
        }
        // Leading behavior of each coefficient: (relative degree d <= 0, |gain|).
        let mut lead: Vec<(i64, f64, f64)> = Vec::new(); // (d, ln|g|, tau)
        for (coeff, delay) in &self.terms {
            let d = coeff.num().degree() as i64 - coeff.den().degree() as i64;
            let g = coeff.num().leading().norm() / coeff.den().leading().norm();
            lead.push((d, g.ln(), delay.to_f64().unwrap()));
        }
        let mut best = f64::NEG_INFINITY;
        for j in 0..lead.len() {
            for k in (j + 1)..lead.len() {
                let (dj, gj, tj) = lead[j];
                let (dk, gk, tk) = lead[k];
                let dt = tk - tj;
                if dt <= 0.0 {
                    continue;
                }
                let sigma = if dk > dj {
                    f64::INFINITY
                } else if dk < dj {
                    f64::NEG_INFINITY
                } else {
                    (gk - gj) / dt
                };
                best = best.max(sigma);
            }
        }
        if best.is_finite() && best.abs() <= 1e-6 {
            return Ok(None);
        }
        Ok(Some(best))
    }

    /// I-system iff the quasi-polynomial has infinitely many zeros in the
    /// closed right half plane. Primary test: asymptotic chain real part;
    /// fallback for the marginal band: zero-count growth over expanding
    /// boxes.
    pub fn classify(&self) -> Result<SystemClass> {
        match self.chain_real_part()? {
            Some(sigma) if sigma > 1e-6 => Ok(SystemClass::ISystem),
            Some(_) => Ok(SystemClass::FSystem),
            None => {
                // Growth fallback over expanding boxes.
                let sigma_max = self.default_sigma_max();
                let mut counts = Vec::new();
                for om in [10.0, 20.0, 40.0] {
                    let b = ZeroBox::new(0.0, sigma_max, 0.0, om);
                    let (cnt, _) = self.winding_with_perturbation(&b)?;
                    counts.push(cnt);
                }
                if counts[2] > counts[1] && counts[1] > counts[0] && counts[2] >= counts[0] + 2 {
                    Ok(SystemClass::ISystem)
                } else if counts[0] == counts[1] && counts[1] == counts[2] {
                    Ok(SystemClass::FSystem)
                } else {
                    Err(Error::MarginalChain)
                }
            }
        }
    }

    /// Safe overestimate for the real extent of the zero search region:
    /// 1 + the largest coefficient gain ratio against the first term.
    pub fn default_sigma_max(&self) -> f64 {
        let mut max_gain: f64 = 1.0;
        for (coeff, _) in &self.terms {
            let g = coeff
                .num()
                .coeffs()
                .iter()
                .map(|a| a.norm())
                .fold(0.0, f64::max)
                / coeff.den().coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max);
            max_gain = max_gain.max(g);
        }
        1.0 + max_gain.max(1.0).ln().max(max_gain.min(10.0))
    }

    /// Default search box: [0, sigma_max] x [-omega_max, omega_max].
    pub fn default_box(&self, omega_max: f64) -> ZeroBox {
        ZeroBox::new(0.0, self.default_sigma_max(), -omega_max, omega_max)
    }
}

/// The worked plant: R(s) = 1 + (4/(s+1)) e^{-3s},
/// T(s) = 1 + ((2s-2)/(s+1)) e^{-2s}.
#[cfg(test)]
pub(crate) fn example_plant() -> (QuasiPolynomial, QuasiPolynomial) {
    let one = RationalFn::from_real(&[1.0], &[1.0]).unwrap();
    let r2 = RationalFn::from_real(&[4.0], &[1.0, 1.0]).unwrap();
    let t2 = RationalFn::from_real(&[-2.0, 2.0], &[1.0, 1.0]).unwrap();
    let r = QuasiPolynomial::new(vec![
        (one.clone(), Rational64::from_integer(0)),
        (r2, Rational64::from_integer(3)),
    ])
    .unwrap();
    let t = QuasiPolynomial::new(vec![
        (one, Rational64::from_integer(0)),
        (t2, Rational64::from_integer(2)),
    ])
    .unwrap();
    (r, t)
}

//! Classical Nevanlinna-Pick machinery: interpolation data at the plant's
//! right-half-plane zeros, the branch-integer Pick matrix, bisection for the
//! optimal level gamma_ss, optimal/central interpolant extraction, and the
//! linear-fractional parametrization of all suboptimal solutions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorization::PlantFactorization;
use crate::rational::{mobius_substitute, phi, Polynomial, RationalFn};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Relative PSD tolerance: lambda_min >= -PSD_TOL * ||P|| counts as feasible.
pub const PSD_TOL: f64 = 1e-10;


// ---------------------------------------------------------------------------
// Interpolation data
// ---------------------------------------------------------------------------

/// Per-zero interpolation record threading the conformal maps.
#[derive(Debug, Clone)]
pub struct InterpPoint {
    /// Plant zero in the open right half plane.
    pub s: Complex64,
    /// Disc image z = phi(s).
    pub z: Complex64,
    /// omega = W(s) / Md(s).
    pub omega: Complex64,
    /// Branch integer of the complex logarithm.
    pub ell: i32,
    /// nu = ln(gamma) - ln(omega) - j 2 pi ell.
    pub nu: Complex64,
    /// Disc image of nu under the classical map phi.
    pub zeta: Complex64,
}

/// Interpolation data for one performance level gamma. Conjugate pairs are
/// stored adjacently (positive imaginary part first), ordered by ascending
/// |z|.
#[derive(Debug, Clone)]
pub struct InterpData {
    pub points: Vec<InterpPoint>,
    pub gamma: f64,
}

/// Pairing layout of the ordered points: indices into `points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairGroup {
    Pair(usize, usize),
    Single(usize),
}

/// Orders zeros with conjugate pairs adjacent (Im > 0 first), ascending |phi(s)|.
fn order_zeros(zeros: &[Complex64]) -> Result<(Vec<Complex64>, Vec<PairGroup>)> {
    let mut remaining: Vec<Complex64> = zeros.to_vec();
    for i in 0..remaining.len() {
        for k in (i + 1)..remaining.len() {
            if (remaining[i] - remaining[k]).norm() < 1e-9 * (1.0 + remaining[i].norm()) {
                return Err(Error::RepeatedInterpolationPoint);
            }
        }
    }
    let mut groups: Vec<(f64, Vec<Complex64>)> = Vec::new();
    while let Some(s) = remaining.pop() {
        if s.im.abs() < 1e-12 * (1.0 + s.re.abs()) {
            groups.push((phi(s).norm(), vec![cx(s.re, 0.0)]));
            continue;
        }
        let mate = remaining
            .iter()
            .position(|t| (t - s.conj()).norm() < 1e-9 * (1.0 + s.norm()));
        match mate {
            Some(idx) => {
                let t = remaining.remove(idx);
                let (hi, lo) = if s.im > 0.0 { (s, t) } else { (t, s) };
                groups.push((phi(hi).norm(), vec![hi, lo]));
            }
            None => groups.push((phi(s).norm(), vec![s])),
        }
    }
    groups.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut ordered = Vec::new();
    let mut layout = Vec::new();
    for (_, g) in groups {
        match g.len() {
            1 => {
                layout.push(PairGroup::Single(ordered.len()));
                ordered.push(g[0]);
            }
            _ => {
                layout.push(PairGroup::Pair(ordered.len(), ordered.len() + 1));
                ordered.push(g[0]);
                ordered.push(g[1]);
            }
        }
    }
    Ok((ordered, layout))
}

/// Builds the interpolation data of the weighted-sensitivity problem at
/// level `gamma`: omega_i = W(s_i)/Md(s_i), nu_i = ln gamma - ln omega_i
/// - j 2 pi ell_i, zeta_i = phi(nu_i). `ells` must respect conjugate
/// symmetry (opposite integers within a pair, zero on real zeros).
pub fn interp_data(
    w: &RationalFn,
    fact: &PlantFactorization,
    zeros: &[Complex64],
    gamma: f64,
    ells: &[i32],
) -> Result<InterpData> {
    if gamma <= 0.0 {
        return Err(Error::InfeasibleGamma);
    }
    let (ordered, layout) = order_zeros(zeros)?;
    if ells.len() != ordered.len() {
        return Err(Error::Numerical("ell list length mismatch".into()));
    }
    for g in &layout {
        match *g {
            PairGroup::Pair(i, k) => {
                if ells[i] != -ells[k] {
                    return Err(Error::Numerical(
                        "conjugate pair requires opposite branch integers".into(),
                    ));
                }
            }
            PairGroup::Single(i) => {
                if ells[i] != 0 {
                    return Err(Error::Numerical(
                        "real interpolation point requires zero branch integer".into(),
                    ));
                }
            }
        }
    }
    let mut points = Vec::with_capacity(ordered.len());
    for (idx, &s) in ordered.iter().enumerate() {
        let z = phi(s);
        if z.norm() >= 1.0 {
            return Err(Error::PointOutsideDisc);
        }
        let omega = w.eval(s)? / fact.eval_md(s)?;
        let nu = cx(gamma.ln(), 0.0) - omega.ln() - cx(0.0, TWO_PI * ells[idx] as f64);
        let zeta = phi(nu);
        points.push(InterpPoint {
            s,
            z,
            omega,
            ell: ells[idx],
            nu,
            zeta,
        });
    }
    Ok(InterpData { points, gamma })
}

impl InterpData {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn layout(&self) -> Vec<PairGroup> {
        let zeros: Vec<Complex64> = self.points.iter().map(|p| p.s).collect();
        order_zeros(&zeros).expect("data already validated").1
    }

    /// True when the s/omega data is closed under conjugation.
    pub fn is_conjugate_symmetric(&self) -> bool {
        self.points.iter().all(|p| {
            self.points.iter().any(|q| {
                (q.s - p.s.conj()).norm() < 1e-9 * (1.0 + p.s.norm())
                    && (q.omega - p.omega.conj()).norm() < 1e-7 * (1.0 + p.omega.norm())
            })
        })
    }
}

// ---------------------------------------------------------------------------
// Pick matrices and the Hermitian eigenproblem
// ---------------------------------------------------------------------------

/// Branch-integer Pick matrix of the logarithmic interpolation problem:
/// entry (i,k) = (nu_i + conj(nu_k)) / (1 - z_i conj(z_k)).
pub fn pick_matrix(data: &InterpData) -> Vec<Vec<Complex64>> {
    let n = data.n();
    let mut m = vec![vec![Complex64::default(); n]; n];
    for i in 0..n {
        for k in 0..n {
            let num = data.points[i].nu + data.points[k].nu.conj();
            let den = 1.0 - data.points[i].z * data.points[k].z.conj();
            m[i][k] = num / den;
        }
    }
    m
}

/// Schur-class Pick matrix for disc data (z_i -> zeta_i):
/// entry (i,k) = (1 - zeta_i conj(zeta_k)) / (1 - z_i conj(z_k)).
pub fn pick_matrix_schur(zs: &[Complex64], zetas: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = zs.len();
    let mut m = vec![vec![Complex64::default(); n]; n];
    for i in 0..n {
        for k in 0..n {
            m[i][k] = (1.0 - zetas[i] * zetas[k].conj()) / (1.0 - zs[i] * zs[k].conj());
        }
    }
    m
}

pub fn frobenius_norm(m: &[Vec<Complex64>]) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Jacobi eigenvalue iteration for a real symmetric matrix. Returns
/// (eigenvalues, eigenvectors as columns).
fn jacobi_sym_eig(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for k in (i + 1)..n {
                off += a[i][k] * a[i][k];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frob_real(&a)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[i][i]).collect();
    (evals, v)
}

fn frob_real(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Minimum eigenvalue of a Hermitian matrix with an eigenvector, via the
/// real symmetric 2n x 2n embedding [[X, -Y], [Y, X]].
pub fn hermitian_min_eig(m: &[Vec<Complex64>]) -> (f64, Vec<Complex64>) {
    let n = m.len();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for k in 0..n {
            a[i][k] = m[i][k].re;
            a[i][n + k] = -m[i][k].im;
            a[n + i][k] = m[i][k].im;
            a[n + i][n + k] = m[i][k].re;
        }
    }
    let (evals, evecs) = jacobi_sym_eig(a);
    let (mut best, mut idx) = (f64::INFINITY, 0);
    for (i, &l) in evals.iter().enumerate() {
        if l < best {
            best = l;
            idx = i;
        }
    }
    let vec = (0..n)
        .map(|i| cx(evecs[i][idx], evecs[n + i][idx]))
        .collect();
    (best, vec)
}

// ---------------------------------------------------------------------------
// gamma_ss search
// ---------------------------------------------------------------------------

/// Enumerates conjugate-symmetric branch-integer assignments with entries
/// bounded by ell_max.
fn ell_assignments(layout: &[PairGroup], n: usize, ell_max: i32) -> Vec<Vec<i32>> {
    let pairs: Vec<(usize, usize)> = layout
        .iter()
        .filter_map(|g| match g {
            PairGroup::Pair(i, k) => Some((*i, *k)),
            PairGroup::Single(_) => None,
        })
        .collect();
    let mut out = Vec::new();
    let range: Vec<i32> = (-ell_max..=ell_max).collect();
    let mut stack = vec![(0usize, vec![0i32; n])];
    while let Some((d, cur)) = stack.pop() {
        if d == pairs.len() {
            out.push(cur);
            continue;
        }
        for &l in &range {
            let mut next = cur.clone();
            next[pairs[d].0] = l;
            next[pairs[d].1] = -l;
            stack.push((d + 1, next));
        }
    }
    out
}

/// Feasibility of level gamma: some bounded branch-integer assignment makes
/// the Pick matrix positive semidefinite. Returns the best assignment.
fn best_assignment(
    w: &RationalFn,
    fact: &PlantFactorization,
    zeros: &[Complex64],
    gamma: f64,
    ell_max: i32,
) -> Result<Option<(Vec<i32>, f64)>> {
    let (ordered, layout) = order_zeros(zeros)?;
    let n = ordered.len();
    let mut best: Option<(Vec<i32>, f64)> = None;
    for ells in ell_assignments(&layout, n, ell_max) {
        let data = interp_data(w, fact, &ordered, gamma, &ells)?;
        let p = pick_matrix(&data);
        let norm = frobenius_norm(&p).max(1e-300);
        let (lmin, _) = hermitian_min_eig(&p);
        if lmin >= -PSD_TOL * norm {
            let better = match &best {
                Some((_, l)) => lmin > *l,
                None => true,
            };
            if better {
                best = Some((ells, lmin));
            }
        }
    }
    Ok(best)
}

/// Smallest gamma for which the Pick matrix is positive semidefinite for
/// some branch-integer assignment with |ell_i| <= ell_max, by bisection.
pub fn gamma_ss(
    w: &RationalFn,
    fact: &PlantFactorization,
    zeros: &[Complex64],
    ell_max: i32,
    tol: f64,
) -> Result<(f64, Vec<i32>)> {
    let (ordered, _) = order_zeros(zeros)?;
    let base = interp_data(w, fact, &ordered, 1.0, &vec![0; ordered.len()])?;
    let omega_max = base
        .points
        .iter()
        .map(|p| p.omega.norm())
        .fold(0.0, f64::max);
    let mut lo = omega_max * (1.0 + 1e-14);
    let mut hi = lo;
    let mut found = false;
    for _ in 0..40 {
        if best_assignment(w, fact, zeros, hi, ell_max)?.is_some() {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::InfeasibleEllRange);
    }
    // The 1x1 case is feasible down to |omega| itself.
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if best_assignment(w, fact, zeros, mid, ell_max)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (ells, _) = best_assignment(w, fact, zeros, hi, ell_max)?
        .ok_or(Error::InfeasibleEllRange)?;
    Ok((hi, ells))
}

/// Unrestricted weighted-sensitivity optimum: smallest gamma making the
/// Schur-class Pick matrix of the direct data f(z_i) = omega_i / gamma
/// positive semidefinite. No unit requirement, no branch integers.
pub fn gamma_wsm(
    w: &RationalFn,
    fact: &PlantFactorization,
    zeros: &[Complex64],
    tol: f64,
) -> Result<f64> {
    let (ordered, _) = order_zeros(zeros)?;
    let data = interp_data(w, fact, &ordered, 1.0, &vec![0; ordered.len()])?;
    let zs: Vec<Complex64> = data.points.iter().map(|p| p.z).collect();
    let feasible = |gamma: f64| -> bool {
        let ws: Vec<Complex64> = data.points.iter().map(|p| p.omega / gamma).collect();
        let p = pick_matrix_schur(&zs, &ws);
        let norm = frobenius_norm(&p).max(1e-300);
        hermitian_min_eig(&p).0 >= -PSD_TOL * norm
    };
    let mut lo = 1e-9;
    let mut hi = data
        .points
        .iter()
        .map(|p| p.omega.norm())
        .fold(0.0, f64::max)
        * 2.0
        + 1e-9;
    while !feasible(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InfeasibleGamma);
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

// ---------------------------------------------------------------------------
// Interpolant extraction
// ---------------------------------------------------------------------------

/// Interpolating function F with evaluation in the closed right half plane.
#[derive(Debug, Clone)]
pub enum Interpolant {
    /// F(s) = exp(-G(s)) with rational G mapping C+ into C+. The optimal
    /// pure delay e^{-ks} corresponds to G(s) = k s.
    Exponential { g: RationalFn },
    /// Strip-composed interpolant: F from Gtil and the strip height sigma_o.
    StripComposed { gtil: RationalFn, sigma_o: f64 },
    /// Finite-dimensional unit from the free-parameter search.
    Rational { f: RationalFn },
}

impl Interpolant {
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        match self {
            Interpolant::Exponential { g } => Ok((-g.eval(s)?).exp()),
            Interpolant::StripComposed { gtil, sigma_o } => {
                let u = gtil.eval(s)?;
                let ratio = (1.0 + u) / (1.0 - u);
                // |u| < 1 keeps the ratio in the right half plane, where the
                // principal logarithm is continuous.
                let ln = ratio.ln();
                Ok((-cx(sigma_o / 2.0, 0.0) - cx(0.0, sigma_o / std::f64::consts::PI) * ln).exp())
            }
            Interpolant::Rational { f } => f.eval(s),
        }
    }
}

/// Result of the classical interpolation step.
#[derive(Debug, Clone)]
pub struct NpInterpolant {
    /// Disc-level interpolant gtilde(z).
    pub gtilde: RationalFn,
    /// G(s) = phi^{-1}(gtilde(phi(s))).
    pub g: RationalFn,
    pub interpolant: Interpolant,
    /// Whether the degenerate (singular Pick) branch was taken.
    pub degenerate: bool,
    /// |F(s_i) - omega_i / gamma| per point.
    pub residuals: Vec<f64>,
}

/// Degenerate Schur-class interpolant from the Pick null vector:
/// g(z) = [sum xi_k / (1 - conj(z_k) z)] / [sum conj(zeta_k) xi_k / (1 - conj(z_k) z)].
pub fn degenerate_interpolant(
    zs: &[Complex64],
    zetas: &[Complex64],
    xi: &[Complex64],
) -> Result<RationalFn> {
    let n = zs.len();
    let mut num = Polynomial::zero();
    let mut den = Polynomial::zero();
    for k in 0..n {
        let mut prod = Polynomial::constant(cx(1.0, 0.0));
        for m in 0..n {
            if m != k {
                prod = prod.mul(&Polynomial::new(vec![cx(1.0, 0.0), -zs[m].conj()]));
            }
        }
        num = num.add(&prod.scale(xi[k]));
        den = den.add(&prod.scale(zetas[k].conj() * xi[k]));
    }
    RationalFn::new(num, den)
}

/// Nevanlinna (Schur) recursion on disc data: returns the 2x2 polynomial
/// coefficient matrix [Ptil, Qtil; Q, P] of the linear-fractional
/// parametrization f = (Ptil q + Qtil) / (P + Q q).
pub fn schur_recursion(
    zs: &[Complex64],
    ws: &[Complex64],
) -> Result<(Polynomial, Polynomial, Polynomial, Polynomial)> {
    let n = zs.len();
    let mut levels: Vec<Complex64> = Vec::with_capacity(n);
    let mut cur: Vec<Complex64> = ws.to_vec();
    for i in 0..n {
        let wi = cur[i];
        if wi.norm() >= 1.0 - 1e-13 {
            return Err(Error::NotStrictlySuboptimal);
        }
        levels.push(wi);
        let zi = zs[i];
        let mut next = cur.clone();
        for (k, item) in next.iter_mut().enumerate().take(n).skip(i + 1) {
            let b = (zs[k] - zi) / (1.0 - zi.conj() * zs[k]);
            *item = ((cur[k] - wi) / (1.0 - wi.conj() * cur[k])) / b;
        }
        cur = next;
    }
    let mut m = [
        [Polynomial::one(), Polynomial::zero()],
        [Polynomial::zero(), Polynomial::one()],
    ];
    for i in 0..n {
        let wi = levels[i];
        let b = Polynomial::new(vec![-zs[i], cx(1.0, 0.0)]); // z - z_i
        let e = Polynomial::new(vec![cx(1.0, 0.0), -zs[i].conj()]); // 1 - conj(z_i) z
        let blk = [
            [b.clone(), e.scale(wi)],
            [b.scale(wi.conj()), e.clone()],
        ];
        let mut out = [
            [Polynomial::zero(), Polynomial::zero()],
            [Polynomial::zero(), Polynomial::zero()],
        ];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = m[r][0].mul(&blk[0][c]).add(&m[r][1].mul(&blk[1][c]));
            }
        }
        m = out;
    }
    let [[ptil, qtil], [q, p]] = m;
    Ok((ptil, qtil, q, p))
}

/// Schur-class solve on data (z_i, zeta_i): degenerate extraction at a
/// singular Pick matrix, central solution otherwise. `symmetrize` selects
/// the reflection used to restore coefficient symmetry: plain conjugation
/// for the classical problem, the twisted reflection -conj(g(conj z)) for
/// the strip problem.
pub(crate) fn disc_interpolant(
    zs: &[Complex64],
    zetas: &[Complex64],
    twisted: bool,
    check_symmetry: bool,
) -> Result<(RationalFn, bool)> {
    let p = pick_matrix_schur(zs, zetas);
    let norm = frobenius_norm(&p).max(1e-300);
    let (lmin, xi) = hermitian_min_eig(&p);
    if lmin < -PSD_TOL * norm.max(1.0) {
        return Err(Error::InfeasibleGamma);
    }
    // Central solution whenever the recursion stays strictly inside the
    // disc; at (numerically) singular data the recursion degenerates and the
    // unique boundary interpolant comes from the Pick null vector instead.
    let (mut g, degenerate) = match schur_recursion(zs, zetas) {
        Ok((_, qtil, _, pden)) => (RationalFn::new(qtil, pden)?, false),
        Err(Error::NotStrictlySuboptimal) => {
            (degenerate_interpolant(zs, zetas, &xi)?, true)
        }
        Err(e) => return Err(e),
    };
    if check_symmetry {
        let reflected = if twisted {
            g.conj_coeffs().scale(cx(-1.0, 0.0))
        } else {
            g.conj_coeffs()
        };
        let mut worst = 0.0f64;
        for k in 0..64 {
            let ang = TWO_PI * k as f64 / 64.0;
            let z = Complex64::from_polar(0.83, ang);
            if let (Ok(a), Ok(b)) = (g.eval(z), reflected.eval(z)) {
                worst = worst.max((a - b).norm());
            }
        }
        if worst > 1e-8 {
            let sym = g.add(&reflected)?.scale(cx(0.5, 0.0));
            let sym = if sym.relative_imag() < 1e-9 && !twisted {
                sym.realified()?
            } else {
                sym
            };
            // Interpolation is preserved because the data has the matching
            // symmetry; re-verify before replacing.
            let mut ok = true;
            for (z, zeta) in zs.iter().zip(zetas.iter()) {
                match sym.eval(*z) {
                    Ok(v) if (v - zeta).norm() < 1e-6 => {}
                    _ => ok = false,
                }
            }
            if ok {
                g = sym;
            }
        }
    }
    Ok((g, degenerate))
}

/// Optimal or central interpolant for the classical problem, composed back
/// to F(s) = exp(-G(s)).
pub fn np_interpolant(data: &InterpData) -> Result<NpInterpolant> {
    // Feasibility decision on the branch-integer Pick matrix.
    let p = pick_matrix(data);
    let norm = frobenius_norm(&p).max(1e-300);
    let (lmin, _) = hermitian_min_eig(&p);
    if lmin < -PSD_TOL * norm {
        return Err(Error::InfeasibleGamma);
    }
    let zs: Vec<Complex64> = data.points.iter().map(|p| p.z).collect();
    let zetas: Vec<Complex64> = data.points.iter().map(|p| p.zeta).collect();
    let (gtilde, degenerate) =
        disc_interpolant(&zs, &zetas, false, data.is_conjugate_symmetric())?;
    // G = phi^{-1} o gtilde o phi
    let u = mobius_substitute(&gtilde)?;
    let one = RationalFn::one();
    let g = one.add(&u)?.div(&one.sub(&u)?)?;
    let interpolant = Interpolant::Exponential { g: g.clone() };
    let mut residuals = Vec::with_capacity(data.n());
    for pt in &data.points {
        let f = interpolant.eval(pt.s)?;
        residuals.push((f - pt.omega / data.gamma).norm());
    }
    Ok(NpInterpolant {
        gtilde,
        g,
        interpolant,
        degenerate,
        residuals,
    })
}

// ---------------------------------------------------------------------------
// Suboptimal linear-fractional parametrization
// ---------------------------------------------------------------------------

/// Coefficient matrix of f = (Ptil q + Qtil) / (P + Q q) parameterizing all
/// suboptimal solutions with ||q|| <= 1 at the data's gamma.
#[derive(Debug, Clone)]
pub struct NpParametrization {
    pub ptil: Polynomial,
    pub qtil: Polynomial,
    pub q: Polynomial,
    pub p: Polynomial,
    pub gamma: f64,
    pub data: InterpData,
    /// Whether the coefficients were reduced to real numbers.
    pub realified: bool,
}

impl NpParametrization {
    /// f(z) for a given free parameter value q(z).
    pub fn eval_with_q(&self, z: Complex64, qval: Complex64) -> Result<Complex64> {
        let num = self.ptil.eval(z) * qval + self.qtil.eval(z);
        let den = self.p.eval(z) + self.q.eval(z) * qval;
        if den.norm() < 1e-300 {
            return Err(Error::EvaluationAtPole(z));
        }
        Ok(num / den)
    }
}

fn eval_matrix(
    m: &(Polynomial, Polynomial, Polynomial, Polynomial),
    z: Complex64,
) -> [[Complex64; 2]; 2] {
    [
        [m.0.eval(z), m.1.eval(z)],
        [m.2.eval(z), m.3.eval(z)],
    ]
}

fn mat_inv(a: [[Complex64; 2]; 2]) -> Option<[[Complex64; 2]; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.norm() < 1e-300 {
        return None;
    }
    Some([
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ])
}

fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::default(); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// Right-multiplies the polynomial matrix by a constant matrix.
fn apply_right(
    m: &(Polynomial, Polynomial, Polynomial, Polynomial),
    w: [[Complex64; 2]; 2],
) -> (Polynomial, Polynomial, Polynomial, Polynomial) {
    let row = |a: &Polynomial, b: &Polynomial, c0: Complex64, c1: Complex64| {
        a.scale(c0).add(&b.scale(c1))
    };
    (
        row(&m.0, &m.1, w[0][0], w[1][0]),
        row(&m.0, &m.1, w[0][1], w[1][1]),
        row(&m.2, &m.3, w[0][0], w[1][0]),
        row(&m.2, &m.3, w[0][1], w[1][1]),
    )
}

/// For self-conjugate data the complex coefficient matrix differs from a
/// real one only by a constant J-unitary right factor. V = M^{-1} Msharp is
/// that factor's obstruction; W = alpha I + conj(alpha) V with
/// alpha = exp(j arg(det V) / 4) removes it.
fn realify(
    m: &(Polynomial, Polynomial, Polynomial, Polynomial),
) -> Option<(Polynomial, Polynomial, Polynomial, Polynomial)> {
    let msharp = (
        m.0.conj_coeffs(),
        m.1.conj_coeffs(),
        m.2.conj_coeffs(),
        m.3.conj_coeffs(),
    );
    let z0 = cx(0.17, 0.23);
    let z1 = cx(-0.31, 0.11);
    let v0 = mat_mul(mat_inv(eval_matrix(m, z0))?, eval_matrix(&msharp, z0));
    let v1 = mat_mul(mat_inv(eval_matrix(m, z1))?, eval_matrix(&msharp, z1));
    let scale: f64 = v0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    let diff: f64 = (0..2)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|(r, c)| (v0[r][c] - v1[r][c]).norm())
        .fold(0.0, f64::max);
    if diff > 1e-7 * scale.max(1.0) {
        return None;
    }
    let det = v0[0][0] * v0[1][1] - v0[0][1] * v0[1][0];
    let mut alpha = Complex64::from_polar(1.0, det.arg() / 4.0);
    for _ in 0..2 {
        let w = [
            [alpha + alpha.conj() * v0[0][0], alpha.conj() * v0[0][1]],
            [alpha.conj() * v0[1][0], alpha + alpha.conj() * v0[1][1]],
        ];
        let detw = w[0][0] * w[1][1] - w[0][1] * w[1][0];
        if detw.norm() < 1e-8 * scale.max(1.0) {
            alpha *= cx(0.0, 1.0);
            continue;
        }
        // J-unitarity up to a real scalar; negative scalar flips the disc,
        // fixed by swapping the columns.
        let j = [[cx(1.0, 0.0), cx(0.0, 0.0)], [cx(0.0, 0.0), cx(-1.0, 0.0)]];
        let wh = [[w[0][0].conj(), w[1][0].conj()], [w[0][1].conj(), w[1][1].conj()]];
        let g = mat_mul(mat_mul(wh, j), w);
        let lam = g[0][0].re;
        if g[0][1].norm() > 1e-7 * lam.abs().max(1.0)
            || (g[1][1].re + lam).abs() > 1e-7 * lam.abs().max(1.0)
        {
            return None;
        }
        let w = if lam < 0.0 {
            [[w[0][1], w[0][0]], [w[1][1], w[1][0]]]
        } else {
            w
        };
        let out = apply_right(m, w);
        let rel = out.0.relative_imag().max(out.1.relative_imag())
            .max(out.2.relative_imag())
            .max(out.3.relative_imag());
        if rel < 1e-8 {
            return Some((
                out.0.realified(),
                out.1.realified(),
                out.2.realified(),
                out.3.realified(),
            ));
        }
        alpha *= cx(0.0, 1.0);
    }
    None
}

/// Builds the suboptimal parametrization at the data's gamma on the direct
/// disc values f(z_i) = omega_i / gamma. Requires a strictly positive
/// definite Pick matrix (each recursion step stays inside the disc). For
/// conjugate-symmetric data the coefficients are reduced to real numbers.
pub fn np_parametrization(data: &InterpData) -> Result<NpParametrization> {
    let zs: Vec<Complex64> = data.points.iter().map(|p| p.z).collect();
    let ws: Vec<Complex64> = data.points.iter().map(|p| p.omega / data.gamma).collect();
    let m = schur_recursion(&zs, &ws)?;
    let (m, realified) = if data.is_conjugate_symmetric() {
        match realify(&m) {
            Some(r) => (r, true),
            None => (m, false),
        }
    } else {
        (m, false)
    };
    Ok(NpParametrization {
        ptil: m.0,
        qtil: m.1,
        q: m.2,
        p: m.3,
        gamma: data.gamma,
        data: data.clone(),
        realified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::factorize;
    use crate::quasipoly::example_plant;
    use crate::quasipoly::ZeroBox;

    pub(crate) fn example_setup() -> (RationalFn, PlantFactorization, Vec<Complex64>) {
        let (r, t) = example_plant();
        let fact = factorize(&r, &t, &ZeroBox::new(0.0, 5.0, -2.0, 2.0), 1e-3).unwrap();
        let w = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
        let zeros = fact.mn.zeros().to_vec();
        (w, fact, zeros)
    }

    #[test]
    fn interp_data_matches_printed_values() {
        let (w, fact, zeros) = example_setup();
        let data = interp_data(&w, &fact, &zeros, 1.0, &[0, 0]).unwrap();
        // omega_{1,2} = 0.79 -/+ 0.42j (printed to two decimals)
        let om_plus = data
            .points
            .iter()
            .find(|p| p.s.im > 0.0)
            .unwrap()
            .omega;
        assert!((om_plus - cx(0.79, -0.42)).norm() < 5e-3, "omega = {om_plus}");
        // Re nu_i = ln(gamma / |omega_i|)
        for p in &data.points {
            assert!((p.nu.re - (1.0f64 / p.omega.norm()).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn interp_data_md_one_reduces_to_weight() {
        let rr = QuasiPolynomial::from_rational(
            RationalFn::from_real(&[-1.0, 1.0], &[1.0, 1.0]).unwrap(),
        );
        let tt = QuasiPolynomial::from_rational(RationalFn::one());
        let fact = factorize(&rr, &tt, &ZeroBox::new(0.0, 4.0, -3.0, 3.0), 1e-3).unwrap();
        let w = RationalFn::from_real(&[1.0, 0.1], &[1.0, 1.0]).unwrap();
        let data = interp_data(&w, &fact, &[cx(1.0, 0.0)], 1.0, &[0]).unwrap();
        let want = w.eval(cx(1.0, 0.0)).unwrap();
        assert!((data.points[0].omega - want).norm() < 1e-12);
    }

    use crate::quasipoly::QuasiPolynomial;

    #[test]
    fn repeated_zero_rejected() {
        let (w, fact, _) = example_setup();
        let z = cx(0.5, 0.0);
        assert!(matches!(
            interp_data(&w, &fact, &[z, z], 1.0, &[0, 0]),
            Err(Error::RepeatedInterpolationPoint)
        ));
    }

    #[test]
    fn pick_singleton_boundary() {
        let (w, fact, _) = example_setup();
        let zeros = [cx(0.9, 0.0)];
        let data0 = interp_data(&w, &fact, &zeros, 1.0, &[0]).unwrap();
        let om = data0.points[0].omega.norm();
        let data = interp_data(&w, &fact, &zeros, om, &[0]).unwrap();
        let p = pick_matrix(&data);
        assert!(p[0][0].norm() < 1e-12);
    }

    #[test]
    fn gamma_ss_matches_paper_value() {
        let (w, fact, zeros) = example_setup();
        let (g, ells) = gamma_ss(&w, &fact, &zeros, 2, 1e-6).unwrap();
        assert!((g - 1.0704).abs() < 0.005, "gamma_ss = {g}");
        assert_eq!(ells, vec![0, 0]);
        // pick matrix nearly singular at the optimum
        let data = interp_data(&w, &fact, &zeros, g, &ells).unwrap();
        let p = pick_matrix(&data);
        let (lmin, _) = hermitian_min_eig(&p);
        assert!(lmin.abs() < 1e-3);
        // strictly positive definite above the optimum
        let data = interp_data(&w, &fact, &zeros, 1.2, &ells).unwrap();
        let (lmin, _) = hermitian_min_eig(&pick_matrix(&data));
        assert!(lmin > 1e-3);
    }

    #[test]
    fn gamma_ss_singleton_equals_omega_modulus() {
        let (w, fact, _) = example_setup();
        let zeros = [cx(0.9, 0.0)];
        let data = interp_data(&w, &fact, &zeros, 1.0, &[0]).unwrap();
        let om = data.points[0].omega.norm();
        let (g, _) = gamma_ss(&w, &fact, &zeros, 2, 1e-8).unwrap();
        assert!((g - om).abs() < 1e-6, "gamma_ss = {g}, |omega| = {om}");
    }

    #[test]
    fn gamma_ss_dominates_wsm_optimum() {
        let (w, fact, zeros) = example_setup();
        let (gss, _) = gamma_ss(&w, &fact, &zeros, 2, 1e-6).unwrap();
        let gwsm = gamma_wsm(&w, &fact, &zeros, 1e-6).unwrap();
        assert!(gss >= gwsm - 1e-5, "gss = {gss}, gwsm = {gwsm}");
    }

    #[test]
    fn optimal_interpolant_is_near_pure_delay() {
        let (w, fact, zeros) = example_setup();
        let (g, ells) = gamma_ss(&w, &fact, &zeros, 2, 1e-6).unwrap();
        let data = interp_data(&w, &fact, &zeros, g, &ells).unwrap();
        let sol = np_interpolant(&data).unwrap();
        for sigma in [10.0, 50.0, 100.0] {
            let gv = sol.g.eval(cx(sigma, 0.0)).unwrap();
            let ratio = gv.re / sigma;
            assert!(
                (0.55..=0.59).contains(&ratio),
                "G({sigma})/{sigma} = {ratio}"
            );
            assert!(gv.im.abs() < 1e-6 * sigma);
        }
        for r in &sol.residuals {
            assert!(*r < 1e-6);
        }
        // degenerate disc interpolant is unimodular on the circle
        for k in 0..100 {
            let z = Complex64::from_polar(1.0, TWO_PI * k as f64 / 100.0);
            let v = sol.gtilde.eval(z).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn singleton_optimal_is_unimodular_constant() {
        let (w, fact, _) = example_setup();
        let zeros = [cx(0.9, 0.0)];
        let (g, _) = gamma_ss(&w, &fact, &zeros, 2, 1e-10).unwrap();
        let data = interp_data(&w, &fact, &zeros, g, &[0]).unwrap();
        let sol = np_interpolant(&data).unwrap();
        assert!(sol.degenerate, "boundary data must take the null-vector path");
        let f0 = sol.interpolant.eval(cx(3.0, 1.0)).unwrap();
        let f1 = sol.interpolant.eval(cx(0.2, -2.0)).unwrap();
        assert!((f0 - f1).norm() < 1e-6, "not constant: {f0} vs {f1}");
        assert!((f0.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_gamma_rejected() {
        let (w, fact, zeros) = example_setup();
        let data = interp_data(&w, &fact, &zeros, 0.95, &[0, 0]).unwrap();
        assert!(matches!(np_interpolant(&data), Err(Error::InfeasibleGamma)));
    }

    #[test]
    fn parametrization_central_interpolates() {
        let (w, fact, zeros) = example_setup();
        let data = interp_data(&w, &fact, &zeros, 1.2, &[0, 0]).unwrap();
        let par = np_parametrization(&data).unwrap();
        assert!(par.realified, "expected a real-coefficient parametrization");
        for pt in &data.points {
            let f = par.eval_with_q(pt.z, Complex64::default()).unwrap();
            assert!((f - pt.omega / 1.2).norm() < 1e-8);
        }
    }

    #[test]
    fn parametrization_contractive_for_simple_q() {
        let (w, fact, zeros) = example_setup();
        let data = interp_data(&w, &fact, &zeros, 1.2, &[0, 0]).unwrap();
        let par = np_parametrization(&data).unwrap();
        // q(z) = z is Schur; f must interpolate and stay bounded by one.
        for pt in &data.points {
            let f = par.eval_with_q(pt.z, pt.z).unwrap();
            assert!((f - pt.omega / 1.2).norm() < 1e-8);
        }
        let mut sup = 0.0f64;
        for k in 0..720 {
            let z = Complex64::from_polar(1.0, TWO_PI * k as f64 / 720.0);
            sup = sup.max(par.eval_with_q(z, z).unwrap().norm());
        }
        assert!(sup <= 1.0 + 1e-6, "sup |f| = {sup}");
    }

    #[test]
    fn single_point_recursion_closed_form() {
        // One interpolation point: f = (b1 q + w1) / (1 + conj(w1) b1 q).
        let z1 = cx(0.3, 0.1);
        let w1 = cx(0.4, -0.2);
        let (ptil, qtil, q, p) = schur_recursion(&[z1], &[w1]).unwrap();
        for (zv, qv) in [
            (cx(0.1, 0.2), cx(0.3, 0.3)),
            (cx(-0.5, 0.1), cx(-0.7, 0.1)),
        ] {
            let b = (zv - z1) / (1.0 - z1.conj() * zv);
            let want = (b * qv + w1) / (1.0 + w1.conj() * b * qv);
            let got = (ptil.eval(zv) * qv + qtil.eval(zv)) / (p.eval(zv) + q.eval(zv) * qv);
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn pick_monotone_in_gamma() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (w, fact, _) = example_setup();
        for _ in 0..100 {
            let re = rng.gen_range(0.05..2.0);
            let im = rng.gen_range(0.05..2.5);
            let zeros = [cx(re, im), cx(re, -im)];
            let ells = [rng.gen_range(-1..=1), 0];
            let ells = [ells[0], -ells[0]];
            let g1: f64 = rng.gen_range(0.9..2.0);
            let g2 = g1 * rng.gen_range(1.05..2.0);
            let d1 = interp_data(&w, &fact, &zeros, g1, &ells).unwrap();
            let d2 = interp_data(&w, &fact, &zeros, g2, &ells).unwrap();
            let (l1, _) = hermitian_min_eig(&pick_matrix(&d1));
            let (l2, _) = hermitian_min_eig(&pick_matrix(&d2));
            let n1 = frobenius_norm(&pick_matrix(&d1));
            if l1 >= -PSD_TOL * n1 {
                assert!(
                    l2 >= -1e-9 * frobenius_norm(&pick_matrix(&d2)).max(1.0),
                    "PSD lost when gamma grew: l1={l1}, l2={l2}"
                );
            }
        }
    }
}

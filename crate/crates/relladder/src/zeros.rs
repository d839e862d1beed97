//! Reliability polynomials in p, their complex zeros, limiting curves, and
//! the critical node-reliability transitions.

use crate::ladder::Preset;
use crate::scalar::mp::{log2_magnitude, mp_from_f64, MpComplex, MpFloat};
use crate::scalar::{rat_from_f64, FromRational, One, Rat, UniPoly, Zero};
use crate::spectral::{gf_extract_poly, gf_undirected_reference, PolyGf, SpectralError};
use crate::transfer::{rel2_cells_3, rel2_cells_5};
use crate::{Destination, LadderConfig};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZerosError {
    #[error("root iteration failed to converge at {bits} bits")]
    NoConvergence { bits: usize },
    #[error("polynomial has no roots (degree < 1)")]
    NoRoots,
    #[error("no accumulation segment on the positive real axis")]
    NoSegment,
    #[error("critical-value predicate not bracketed: {0}")]
    NotBracketed(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Exact reliability polynomial in the edge reliability p at fixed rho.
pub fn poly_in_p(preset: Preset, n: usize, rho: &Rat) -> UniPoly<Rat> {
    let cells = crate::ladder::uniform_cells::<UniPoly<Rat>>(
        preset,
        n,
        UniPoly::x(),
        UniPoly::constant(rho.clone()),
    );
    if preset == Preset::AngeleDirected {
        rel2_cells_3(&cells).expect("directed Angele cells satisfy the reduced form")
    } else {
        rel2_cells_5(&cells, Destination::S)
    }
}

/// Certified roots of one polynomial.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<MpComplex>,
    /// normalized residuals |P(z)| / sum_k |a_k| |z|^k
    pub residuals: Vec<f64>,
    pub precision_bits: usize,
}

impl RootSet {
    pub fn roots_c64(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.to_c64()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Zeros of a ladder's reliability polynomial.
#[derive(Clone, Debug)]
pub struct LadderZeros {
    pub preset: Preset,
    pub n: usize,
    pub rho: Rat,
    pub degree: usize,
    pub set: RootSet,
}

/// All complex roots by simultaneous (Aberth-Ehrlich) iteration at the given
/// precision. Zero roots are stripped exactly beforehand and re-attached
/// with zero residual; on non-convergence the precision is doubled twice
/// before giving up.
pub fn find_roots(poly: &UniPoly<Rat>, precision_bits: usize) -> Result<RootSet, ZerosError> {
    let Some(degree) = poly.degree() else {
        return Err(ZerosError::NoRoots);
    };
    if degree < 1 {
        return Err(ZerosError::NoRoots);
    }
    let zeros_at_origin = poly.valuation().unwrap();
    let reduced = poly.shift_down(zeros_at_origin);

    let mut bits = precision_bits;
    for _ in 0..3 {
        match aberth_mp(&reduced, bits) {
            Ok(mut roots) => {
                for _ in 0..zeros_at_origin {
                    roots.push(MpComplex::zero(bits));
                }
                roots.sort_by(|a, b| {
                    a.re.partial_cmp(&b.re)
                        .unwrap()
                        .then(a.im.partial_cmp(&b.im).unwrap())
                });
                let residuals = roots
                    .iter()
                    .map(|z| normalized_residual(poly, z, bits))
                    .collect();
                return Ok(RootSet {
                    roots,
                    residuals,
                    precision_bits: bits,
                });
            }
            Err(_) => bits *= 2,
        }
    }
    Err(ZerosError::NoConvergence { bits })
}

/// Compute and certify the zeros of a ladder's reliability polynomial.
pub fn ladder_zeros(
    preset: Preset,
    n: usize,
    rho: &Rat,
    precision_bits: usize,
) -> Result<LadderZeros, ZerosError> {
    let poly = poly_in_p(preset, n, rho);
    let degree = poly.degree().unwrap_or(0);
    let set = find_roots(&poly, precision_bits)?;
    Ok(LadderZeros {
        preset,
        n,
        rho: rho.clone(),
        degree,
        set,
    })
}

fn normalized_residual(poly: &UniPoly<Rat>, z: &MpComplex, bits: usize) -> f64 {
    let coeffs: Vec<MpComplex> = poly
        .coeffs()
        .iter()
        .map(|c| MpComplex::from_rat(c, bits))
        .collect();
    let value = crate::scalar::mp::horner(&coeffs, z);
    let zmag = z.abs();
    let mut scale = crate::scalar::mp::mp_zero(bits);
    let mut pow = mp_from_f64(1.0, bits);
    for c in &coeffs {
        scale += c.abs() * pow.clone();
        pow *= zmag.clone();
    }
    if scale.repr().is_zero() {
        return 0.0;
    }
    let ratio = value.abs() / scale;
    if ratio.repr().is_zero() {
        0.0
    } else {
        2f64.powf(log2_magnitude(&ratio))
    }
}

fn aberth_mp(poly: &UniPoly<Rat>, bits: usize) -> Result<Vec<MpComplex>, ZerosError> {
    let degree = poly.degree().unwrap();
    let coeffs: Vec<MpComplex> = poly
        .coeffs()
        .iter()
        .map(|c| MpComplex::from_rat(c, bits))
        .collect();
    if degree == 1 {
        return Ok(vec![coeffs[0].div(&coeffs[1]).neg()]);
    }
    let deriv: Vec<MpComplex> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul(&MpComplex::from_f64(k as f64, 0.0, bits)))
        .collect();

    // Fujiwara-style bound in log space handles extreme coefficient ranges
    let lead_mag = log2_magnitude(&coeffs[degree].abs());
    let mut log_radius = -1.0f64;
    for (k, c) in coeffs.iter().enumerate().take(degree) {
        let mag = log2_magnitude(&c.abs());
        if mag == f64::NEG_INFINITY {
            continue;
        }
        let bound = (mag - lead_mag + 1.0) / (degree - k) as f64;
        log_radius = log_radius.max(bound);
    }
    let radius = 2f64.powf(log_radius.min(60.0)).max(1e-6);

    let mut roots: Vec<MpComplex> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.43;
            MpComplex::from_f64(radius * angle.cos(), radius * angle.sin(), bits)
        })
        .collect();

    // converged when a full sweep moves every root by < 2^-(bits-8) relative
    let tol_log2 = -(bits as f64) + 8.0;
    let max_iter = 600;
    for _ in 0..max_iter {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..degree {
            let z = roots[i].clone();
            let p_val = crate::scalar::mp::horner(&coeffs, &z);
            if p_val.is_zero() {
                continue;
            }
            let dp_val = crate::scalar::mp::horner(&deriv, &z);
            if dp_val.is_zero() {
                // nudge off a critical point deterministically
                roots[i] = z.add(&MpComplex::from_f64(1e-3 * radius, 2e-3 * radius, bits));
                worst = worst.max(0.0);
                continue;
            }
            let newton = p_val.div(&dp_val);
            let mut repulsion = MpComplex::zero(bits);
            for (j, other) in roots.iter().enumerate() {
                if j == i {
                    continue;
                }
                let diff = z.sub(other);
                if diff.is_zero() {
                    continue;
                }
                repulsion = repulsion.add(&MpComplex::from_f64(1.0, 0.0, bits).div(&diff));
            }
            let denom = MpComplex::from_f64(1.0, 0.0, bits).sub(&newton.mul(&repulsion));
            let step = if denom.is_zero() {
                newton
            } else {
                newton.div(&denom)
            };
            let rel = log2_magnitude(&step.abs())
                - log2_magnitude(&z.abs()).max(log2_magnitude(&mp_from_f64(1e-30, bits)));
            worst = worst.max(rel);
            roots[i] = z.sub(&step);
        }
        if worst < tol_log2 {
            return Ok(roots);
        }
    }
    Err(ZerosError::NoConvergence { bits })
}

/// Roots of a small complex-coefficient polynomial in double precision
/// (ascending coefficients, leading nonzero).
pub(crate) fn polyroots_c64(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |v| v.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return vec![];
    }
    let degree = c.len() - 1;
    if degree == 1 {
        return vec![-c[0] / c[1]];
    }
    if degree == 2 {
        let disc = (c[1] * c[1] - 4.0 * c[2] * c[0]).sqrt();
        let q = if (c[1] + disc).norm() >= (c[1] - disc).norm() {
            -(c[1] + disc) / 2.0
        } else {
            -(c[1] - disc) / 2.0
        };
        // q = -(b ± sqrt)/2; roots q/a and c/q, stable against cancellation
        let r1 = q / c[2];
        let r2 = if q.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c[0] / q
        };
        return vec![r1, r2];
    }
    let deriv: Vec<Complex64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v * k as f64)
        .collect();
    let lead = c[degree].norm();
    let radius = c
        .iter()
        .take(degree)
        .enumerate()
        .map(|(k, v)| (2.0 * v.norm() / lead).powf(1.0 / (degree - k) as f64))
        .fold(0.5, f64::max);
    let horner = |cs: &[Complex64], z: Complex64| -> Complex64 {
        cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, v| acc * z + v)
    };
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.43;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    for _ in 0..300 {
        let mut worst: f64 = 0.0;
        for i in 0..degree {
            let z = roots[i];
            let pv = horner(&c, z);
            let dv = horner(&deriv, z);
            if pv.norm() == 0.0 {
                continue;
            }
            let newton = if dv.norm() == 0.0 {
                Complex64::new(1e-12, 1e-12)
            } else {
                pv / dv
            };
            let mut rep = Complex64::new(0.0, 0.0);
            for (j, other) in roots.iter().enumerate() {
                if i != j {
                    let d = z - other;
                    if d.norm() > 0.0 {
                        rep += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * rep;
            let step = if denom.norm() == 0.0 { newton } else { newton / denom };
            roots[i] = z - step;
            worst = worst.max(step.norm() / z.norm().max(1e-30));
        }
        if worst < 1e-14 {
            break;
        }
    }
    roots
}

// ---------------------------------------------------------------------------
// Limiting curves
// ---------------------------------------------------------------------------

/// Rectangle in the complex p plane.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// Sampled equimodularity structure: the gap `|lambda_1| - |lambda_2|` on a
/// grid and refined points where the two dominant eigenvalue moduli cross.
#[derive(Clone, Debug)]
pub struct LimitCurveSample {
    pub grid: Vec<(Complex64, f64)>,
    pub contour: Vec<Complex64>,
    pub gap_tol: f64,
}

/// Eigenvalues of the uniform family at a complex edge reliability,
/// backed by the interpolated generating-function denominator.
pub struct EigenEngine {
    gf: PolyGf,
}

impl EigenEngine {
    pub fn new(preset: Preset, rho: &Rat) -> Result<Self, ZerosError> {
        Ok(EigenEngine {
            gf: gf_extract_poly(preset, rho)?,
        })
    }

    /// Eigenvalues sorted by modulus, largest first.
    pub fn eigenvalues(&self, p: Complex64) -> Vec<Complex64> {
        let coeffs_desc = self.gf.eigen_poly_at(p);
        // eigen_poly_at returns ascending-lambda coefficients
        let mut roots = polyroots_c64(&coeffs_desc);
        roots.sort_by(|a, b| b.norm_sqr().partial_cmp(&a.norm_sqr()).unwrap());
        roots
    }

    /// `|lambda_1| - |lambda_2|` (zero marks the limiting curve).
    pub fn gap(&self, p: Complex64) -> f64 {
        let ev = self.eigenvalues(p);
        match ev.len() {
            0 => 0.0,
            1 => ev[0].norm(),
            _ => ev[0].norm() - ev[1].norm(),
        }
    }
}

/// Sample the equimodularity locus of the two dominant eigenvalues over a
/// grid; contour points are refined to `gap <= gap_tol * |lambda_1|`.
pub fn limit_curve(
    preset: Preset,
    rho: &Rat,
    region: Region,
    resolution: usize,
) -> Result<LimitCurveSample, ZerosError> {
    let engine = EigenEngine::new(preset, rho)?;
    limit_curve_with(&engine, region, resolution)
}

pub fn limit_curve_with(
    engine: &EigenEngine,
    region: Region,
    resolution: usize,
) -> Result<LimitCurveSample, ZerosError> {
    let gap_tol = 1e-9;
    let nx = resolution.max(2);
    let ny = resolution.max(2);
    let dx = (region.re_max - region.re_min) / (nx - 1) as f64;
    let dy = (region.im_max - region.im_min) / (ny - 1) as f64;
    let point = |i: usize, j: usize| {
        Complex64::new(region.re_min + dx * i as f64, region.im_min + dy * j as f64)
    };

    let mut grid = Vec::with_capacity(nx * ny);
    let mut eigen_grid = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = point(i, j);
            let ev = engine.eigenvalues(p);
            let gap = match ev.len() {
                0 => 0.0,
                1 => ev[0].norm(),
                _ => ev[0].norm() - ev[1].norm(),
            };
            grid.push((p, gap));
            eigen_grid.push(ev);
        }
    }

    let mut contour = Vec::new();
    let idx = |i: usize, j: usize| j * nx + i;
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                refine_edge(
                    engine,
                    &eigen_grid[idx(i, j)],
                    &eigen_grid[idx(i + 1, j)],
                    point(i, j),
                    point(i + 1, j),
                    gap_tol,
                    &mut contour,
                );
            }
            if j + 1 < ny {
                refine_edge(
                    engine,
                    &eigen_grid[idx(i, j)],
                    &eigen_grid[idx(i, j + 1)],
                    point(i, j),
                    point(i, j + 1),
                    gap_tol,
                    &mut contour,
                );
            }
        }
    }
    Ok(LimitCurveSample {
        grid,
        contour,
        gap_tol,
    })
}

/// Does the branch dominant at `u` stay dominant at `v`? Branches are matched
/// by proximity, which is reliable when the step is small relative to the
/// eigenvalue separation.
fn dominant_switches(eu: &[Complex64], ev: &[Complex64]) -> bool {
    if eu.len() < 2 || ev.len() < 2 {
        return false;
    }
    let du = eu[0];
    let nearest = ev
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (du - *a)
                .norm_sqr()
                .partial_cmp(&(du - *b).norm_sqr())
                .unwrap()
        })
        .map(|(k, _)| k)
        .unwrap();
    nearest != 0
}

fn refine_edge(
    engine: &EigenEngine,
    eu: &[Complex64],
    ev: &[Complex64],
    u: Complex64,
    v: Complex64,
    gap_tol: f64,
    contour: &mut Vec<Complex64>,
) {
    if !dominant_switches(eu, ev) {
        return;
    }
    let mut lo = u;
    let mut hi = v;
    let mut e_lo = eu.to_vec();
    for _ in 0..60 {
        let mid = (lo + hi) / 2.0;
        let e_mid = engine.eigenvalues(mid);
        if dominant_switches(&e_lo, &e_mid) {
            hi = mid;
        } else {
            lo = mid;
            e_lo = e_mid;
        }
        if (hi - lo).norm() < 1e-13 * (1.0 + lo.norm()) {
            break;
        }
    }
    let p = (lo + hi) / 2.0;
    let ev_final = engine.eigenvalues(p);
    if ev_final.len() >= 2 {
        let gap = ev_final[0].norm() - ev_final[1].norm();
        if gap <= gap_tol.max(1e-7) * ev_final[0].norm().max(1e-300) {
            contour.push(p);
        }
    }
}

// ---------------------------------------------------------------------------
// Real-axis structure of the directed family
// ---------------------------------------------------------------------------

/// The eigenvalue-pair discriminant of the directed family as an exact
/// polynomial in p at fixed rho.
pub fn directed_disc_poly(rho: &Rat) -> UniPoly<Rat> {
    let x = UniPoly::<Rat>::x();
    let c = |v: i64| UniPoly::constant(Rat::from_rational(&crate::scalar::rat(v, 1)));
    let rho_c = UniPoly::constant(rho.clone());
    let chi = c(2) - c(4) * x.clone() + x.clone() * x.clone();
    let quad = c(2) - c(2) * x.clone() + x.clone() * x.clone();
    c(4) - c(4) * x.clone() * rho_c.clone() * quad
        + x.clone() * x * rho_c.clone() * rho_c * chi.clone() * chi
}

/// Real-axis accumulation segment of the directed family: the bracketing
/// positive real roots of the pair discriminant (the interval where the two
/// eigenvalues form a complex-conjugate pair).
pub fn segment_endpoints_directed(rho: &Rat) -> Result<(f64, f64), ZerosError> {
    let disc = directed_disc_poly(rho);
    let roots = find_roots(&disc, 128)?;
    let mut real_positive: Vec<f64> = roots
        .roots
        .iter()
        .map(|z| z.to_c64())
        .filter(|z| z.im.abs() < 1e-12 * z.norm().max(1e-12) && z.re > 0.0)
        .map(|z| z.re)
        .collect();
    real_positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eval = |p: f64| {
        disc.eval_map(&rat_from_f64(p), |c| c.clone())
            .to_f64()
            .unwrap_or(f64::NAN)
    };
    // rightmost interval on which the discriminant is negative
    let mut best = None;
    for w in real_positive.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if eval(mid) < 0.0 {
            best = Some((w[0], w[1]));
        }
    }
    best.ok_or(ZerosError::NoSegment)
}

// ---------------------------------------------------------------------------
// Asymptotic loci and critical node reliabilities
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalCase {
    Directed,
    Undirected,
}

/// Small-rho asymptotics of the zero structures: segment endpoints and the
/// modulus of the circle branch.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticLoci {
    pub p_minus: f64,
    pub p_plus: f64,
    pub circle_radius: f64,
}

pub fn asymptotic_loci(case: CriticalCase, rho: f64) -> AsymptoticLoci {
    match case {
        CriticalCase::Directed => {
            let base = (2.0 / rho).powf(1.0 / 3.0);
            let mid = (2.0 / 3.0) * (2.0 / rho).powf(1.0 / 6.0);
            AsymptoticLoci {
                p_minus: base - mid + 4.0 / 3.0,
                p_plus: base + mid + 4.0 / 3.0,
                circle_radius: base,
            }
        }
        CriticalCase::Undirected => {
            let s17 = 17f64.sqrt();
            let base = ((s17 - 3.0) / (2.0 * rho)).powf(1.0 / 3.0);
            let mid = ((34.0 - 2.0 * s17) / 153.0).sqrt()
                * ((s17 - 3.0) / (2.0 * rho)).powf(1.0 / 6.0);
            let shift = 2.0 / 51.0 * (23.0 - s17);
            AsymptoticLoci {
                p_minus: base - mid + shift,
                p_plus: base + mid + shift,
                circle_radius: base,
            }
        }
    }
}

/// Denominator of the undirected generating function at double precision,
/// as the monic eigenvalue cubic's ascending coefficients.
fn undirected_eigen_cubic(p: f64, rho: f64) -> Vec<Complex64> {
    let gf = gf_undirected_reference(&rat_from_f64(p), &rat_from_f64(rho));
    let order = gf.denominator.degree().unwrap_or(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
    for k in 0..=order {
        coeffs[order - k] = Complex64::from_rational(&gf.denominator.coeff(k));
    }
    coeffs
}

/// Is there a real interval (within the window) on which the two dominant
/// eigenvalues of the undirected family form a complex-conjugate pair?
fn undirected_segment_exists(rho: f64, window: (f64, f64), steps: usize) -> bool {
    undirected_segment_min(rho, window, steps).1 < 0.0
}

/// Minimize the conjugate-pair indicator over the window; returns the
/// minimizing p and a signed indicator (< 0 means a dominant pair exists).
fn undirected_segment_min(rho: f64, window: (f64, f64), steps: usize) -> (f64, f64) {
    let f = |p: f64| undirected_pair_indicator(p, rho);
    let h = (window.1 - window.0) / steps as f64;
    let mut best = (window.0, f(window.0));
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let p = window.0 + h * k as f64;
        let v = f(p);
        samples.push((p, v));
        if v < best.1 {
            best = (p, v);
        }
    }
    // golden-section refine around each local minimum
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    for w in samples.windows(3) {
        if w[1].1 <= w[0].1 && w[1].1 <= w[2].1 {
            let (mut a, mut b) = (w[0].0, w[2].0);
            for _ in 0..80 {
                let x1 = a + golden * (b - a);
                let x2 = b - golden * (b - a);
                if f(x1) < f(x2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            let m = 0.5 * (a + b);
            let v = f(m);
            if v < best.1 {
                best = (m, v);
            }
        }
    }
    best
}

/// Signed indicator of a dominant conjugate pair at real p: the cubic's
/// discriminant sign selects complex eigenvalues, and when the pair is not
/// dominant the indicator is forced positive by the dominance deficit.
fn undirected_pair_indicator(p: f64, rho: f64) -> f64 {
    let cubic = undirected_eigen_cubic(p, rho);
    if cubic.len() < 4 {
        // degenerate (quadratic) family: no three-eigenvalue pair structure
        return discriminant_f64(&cubic);
    }
    let a = cubic[2].re / cubic[3].re;
    let b = cubic[1].re / cubic[3].re;
    let c = cubic[0].re / cubic[3].re;
    let disc = 18.0 * a * b * c - 4.0 * a.powi(3) * c + a.powi(2) * b.powi(2)
        - 4.0 * b.powi(3)
        - 27.0 * c.powi(2);
    // disc < 0: one real root and one conjugate pair
    if disc >= 0.0 {
        return disc.max(1e-300);
    }
    let roots = polyroots_c64(&cubic);
    let mut real_root = roots[0];
    let mut pair_norm: f64 = 0.0;
    for r in &roots {
        if r.im.abs() < real_root.im.abs() {
            real_root = *r;
        }
        if r.im.abs() > 1e-12 {
            pair_norm = pair_norm.max(r.norm());
        }
    }
    if pair_norm >= real_root.norm() {
        disc
    } else {
        // pair exists but is subdominant: not part of the limiting structure
        (real_root.norm() - pair_norm).max(1e-300)
    }
}

fn discriminant_f64(quad: &[Complex64]) -> f64 {
    if quad.len() < 3 {
        return 1.0;
    }
    let a = quad[2].re;
    let b = quad[1].re;
    let c = quad[0].re;
    b * b - 4.0 * a * c
}

/// The point where the undirected limiting curve meets the positive real
/// axis at the critical rho: the minimizer of the conjugate-pair indicator.
pub fn undirected_axis_touch(rho: f64) -> f64 {
    undirected_segment_min(rho, (1.0, 2.5), 600).0
}

/// Critical node reliabilities where the zero structures change.
///
/// Undirected: bisection on the existence of the real accumulation segment
/// near the axis-touch point. Directed: the repeated-root locus of the pair
/// discriminant (two branch points of the eigenvalue surface collide), found
/// as the repeated factor of the discriminant-of-the-discriminant in rho.
pub fn critical_rho(case: CriticalCase) -> Result<f64, ZerosError> {
    match case {
        CriticalCase::Undirected => critical_rho_undirected(),
        CriticalCase::Directed => critical_rho_directed(),
    }
}

fn critical_rho_undirected() -> Result<f64, ZerosError> {
    let window = (1.0, 2.5);
    let steps = 400;
    let (mut lo, mut hi) = (0.85, 0.999);
    let lo_exists = undirected_segment_exists(lo, window, steps);
    let hi_exists = undirected_segment_exists(hi, window, steps);
    if lo_exists == hi_exists {
        return Err(ZerosError::NotBracketed(format!(
            "segment existence is {lo_exists} at both rho={lo} and rho={hi}"
        )));
    }
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        let exists = undirected_segment_exists(mid, window, steps);
        if exists == lo_exists {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn critical_rho_directed() -> Result<f64, ZerosError> {
    // discriminant of the pair discriminant, interpolated exactly in rho
    let mut points = Vec::new();
    for j in 1..=40i64 {
        let rho = crate::scalar::rat(j, 41);
        let disc = crate::scalar::discriminant(&directed_disc_poly(&rho));
        points.push((rho, disc));
    }
    let (fit, check) = points.split_at(34);
    let poly = crate::scalar::interpolate(fit);
    for (rho, expect) in check {
        if &poly.eval(rho) != expect {
            return Err(ZerosError::NotBracketed(
                "discriminant interpolation failed verification".into(),
            ));
        }
    }
    // a double root in rho marks the collision of two branch points
    let repeated = poly.gcd(&poly.derivative());
    let candidates = |f: &UniPoly<Rat>| -> Result<Vec<f64>, ZerosError> {
        let roots = find_roots(f, 192)?;
        Ok(roots
            .roots
            .iter()
            .map(|z| z.to_c64())
            .filter(|z| z.im.abs() < 1e-9 && z.re > 0.3 && z.re < 0.9)
            .map(|z| z.re)
            .collect())
    };
    let mut found = if repeated.degree().unwrap_or(0) >= 1 {
        candidates(&repeated)?
    } else {
        vec![]
    };
    if found.is_empty() {
        // fall back to clustering plain roots of the discriminant
        let mut all = candidates(&poly)?;
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut clusters: Vec<f64> = Vec::new();
        let mut k = 0;
        while k < all.len() {
            let mut j = k + 1;
            while j < all.len() && all[j] - all[k] < 1e-6 {
                j += 1;
            }
            if j - k >= 2 {
                clusters.push(all[k..j].iter().sum::<f64>() / (j - k) as f64);
            }
            k = j;
        }
        found = clusters;
    }
    // the structural transition is the one above the trace-zero collision at 1/2
    found.retain(|r| *r > 0.505 && *r < 0.6);
    match found.as_slice() {
        [r] => Ok(*r),
        other => Err(ZerosError::NotBracketed(format!(
            "expected one repeated discriminant root in (0.505, 0.6), found {other:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// Roots as CSV: `n, rho, re, im, residual`.
pub fn roots_csv(zeros: &LadderZeros) -> String {
    let mut out = String::from("n,rho,re,im,residual\n");
    let rho = crate::ladder::format_rational(&zeros.rho);
    for (root, residual) in zeros.set.roots.iter().zip(&zeros.set.residuals) {
        let (re, im) = root.decimal_parts(30);
        out.push_str(&format!("{},{},{},{},{:e}\n", zeros.n, rho, re, im, residual));
    }
    out
}

/// Limit-curve contour as CSV: `re, im`.
pub fn curve_csv(sample: &LimitCurveSample) -> String {
    let mut pts = sample.contour.clone();
    pts.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let mut out = String::from("re,im\n");
    for p in pts {
        out.push_str(&format!("{},{}\n", p.re, p.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::transfer::rel2_exact;

    #[test]
    fn poly_in_p_directed_small_cases() {
        // n=1, rho=1: P(p) = p
        let p1 = poly_in_p(Preset::AngeleDirected, 1, &Rat::one());
        assert_eq!(p1, UniPoly::x());
        // n=2, rho=1: 2p^2 - p^4
        let p2 = poly_in_p(Preset::AngeleDirected, 2, &Rat::one());
        assert_eq!(
            p2,
            UniPoly::new(vec![rat(0, 1), rat(0, 1), rat(2, 1), rat(0, 1), rat(-1, 1)])
        );
    }

    #[test]
    fn poly_in_p_matches_scalar_evaluation() {
        let rho = rat(3, 4);
        for preset in Preset::ALL {
            let poly = poly_in_p(preset, 3, &rho);
            for pn in [rat(1, 5), rat(2, 3), rat(9, 10)] {
                let cfg = LadderConfig::uniform(preset, 3, &pn, &rho).unwrap();
                assert_eq!(poly.eval(&pn), rel2_exact(&cfg), "{preset} p={pn}");
            }
        }
    }

    #[test]
    fn degree_grows_linearly_directed_perfect_nodes() {
        for n in 1..=8 {
            let p = poly_in_p(Preset::AngeleDirected, n, &Rat::one());
            assert_eq!(p.degree(), Some(2 * n), "n={n}");
        }
    }

    #[test]
    fn find_roots_quadratic_times_square() {
        // 2p^2 - p^4 = p^2 (2 - p^2): roots 0, 0, +-sqrt(2)
        let poly = poly_in_p(Preset::AngeleDirected, 2, &Rat::one());
        let set = find_roots(&poly, 256).unwrap();
        assert_eq!(set.roots.len(), 4);
        let mut res: Vec<Complex64> = set.roots_c64();
        res.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let sqrt2 = 2f64.sqrt();
        assert!((res[0].re + sqrt2).abs() < 1e-14);
        assert!(res[1].norm() < 1e-14 && res[2].norm() < 1e-14);
        assert!((res[3].re - sqrt2).abs() < 1e-14);
        assert!(set.max_residual() <= 1e-20);
    }

    #[test]
    fn find_roots_certifies_random_factored_polynomial() {
        // (p-1)(p-2)(p-3)(p+1/2) expanded
        let mut poly = UniPoly::one();
        for r in [rat(1, 1), rat(2, 1), rat(3, 1), rat(-1, 2)] {
            poly = poly * UniPoly::new(vec![-r, Rat::one()]);
        }
        let set = find_roots(&poly, 256).unwrap();
        assert!(set.max_residual() <= 1e-20);
        let mut re: Vec<f64> = set.roots_c64().iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, expect) in re.iter().zip([-0.5, 1.0, 2.0, 3.0]) {
            assert!((got - expect).abs() < 1e-30_f64.max(1e-15 * expect.abs()));
        }
    }

    #[test]
    fn roots_conjugate_symmetry() {
        let rho = rat(9, 10);
        let zeros = ladder_zeros(Preset::AngeleDirected, 8, &rho, 256).unwrap();
        let roots = zeros.set.roots_c64();
        for z in &roots {
            let conj = Complex64::new(z.re, -z.im);
            let nearest = roots
                .iter()
                .map(|w| (w - conj).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-12 * z.norm().max(1.0), "conjugate of {z} missing");
        }
        assert_eq!(roots.len(), zeros.degree);
        assert!(zeros.set.max_residual() <= 1e-20);
    }

    #[test]
    fn precision_doubling_is_stable() {
        let poly = poly_in_p(Preset::AngeleDirected, 6, &rat(9, 10));
        let a = find_roots(&poly, 256).unwrap();
        let b = find_roots(&poly, 512).unwrap();
        for (x, y) in a.roots_c64().iter().zip(b.roots_c64().iter()) {
            assert!((x - y).norm() <= 1e-15 * x.norm().max(1e-10));
        }
    }

    #[test]
    fn segment_endpoints_match_asymptotics_at_tiny_rho() {
        let rho = rat(1, 10000);
        let (lo, hi) = segment_endpoints_directed(&rho).unwrap();
        let loci = asymptotic_loci(CriticalCase::Directed, 1e-4);
        assert!((lo - loci.p_minus).abs() / loci.p_minus < 0.02, "{lo} vs {}", loci.p_minus);
        assert!((hi - loci.p_plus).abs() / loci.p_plus < 0.02, "{hi} vs {}", loci.p_plus);
    }

    #[test]
    fn asymptotic_loci_values() {
        let d = asymptotic_loci(CriticalCase::Directed, 0.002);
        assert!((d.circle_radius - 10.0).abs() < 1e-12);
        let d2 = asymptotic_loci(CriticalCase::Directed, 2.0);
        assert!((d2.circle_radius - 1.0).abs() < 1e-12);
        let u = asymptotic_loci(CriticalCase::Undirected, 0.1);
        assert!((u.circle_radius - 1.840).abs() < 5e-4, "{}", u.circle_radius);
    }
}

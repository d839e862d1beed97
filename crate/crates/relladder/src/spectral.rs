//! Generating functions, eigenvalue/amplitude closed forms, asymptotic
//! scaling, and failure frequency/rate for uniform (p, rho) ladders.

use crate::ladder::{ComponentId, LadderConfig, Preset};
use crate::scalar::{
    minimal_recurrence, rat, rat_from_f64, Dual, FromRational, One, Rat, RecurrenceError, Ring,
    SqrtRing, UniPoly, Zero,
};
use crate::transfer::{rel2_exact, rel2_gradient};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("recurrence extraction failed: {0}")]
    Recurrence(#[from] RecurrenceError),
    #[error("extracted fraction does not reproduce the reliability sequence")]
    NoRecurrence,
    #[error("degenerate spectrum: eigenvalues too close to separate")]
    DegenerateSpectrum,
    #[error("amplitude formula singular at this parameter")]
    SingularAmplitude,
    #[error("no rate supplied for component {0}")]
    MissingRate(ComponentId),
    #[error("coefficient interpolation failed: {0}")]
    Interpolation(String),
}

/// Rational generating function `sum_n Rel2(n) z^n = N(z) / D(z)`, exact
/// coefficients, `D(0) = 1`. Valid for `n >= 1`; the constant term is the
/// backward extension of the recurrence, not the length-zero reliability.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalGf {
    pub numerator: UniPoly<Rat>,
    pub denominator: UniPoly<Rat>,
}

impl RationalGf {
    /// First `len` series coefficients of N/D (index = power of z).
    pub fn series(&self, len: usize) -> Vec<Rat> {
        let order = self.denominator.degree().unwrap_or(0);
        let mut out: Vec<Rat> = Vec::with_capacity(len);
        for m in 0..len {
            let mut v = self.numerator.coeff(m);
            for i in 1..=order.min(m) {
                v = v - self.denominator.coeff(i) * out[m - i].clone();
            }
            out.push(v);
        }
        out
    }
}

/// Extract the generating function at an exact rational parameter point by
/// computing the first reliabilities and reconstructing the minimal
/// recurrence. The spurious transfer-matrix eigenvalues cancel automatically
/// because the recurrence is minimal.
pub fn gf_extract(preset: Preset, p: &Rat, rho: &Rat) -> Result<RationalGf, SpectralError> {
    const TERMS: usize = 12;
    const MAX_ORDER: usize = 5;
    let mut seq = Vec::with_capacity(TERMS);
    for n in 1..=TERMS {
        let cfg = LadderConfig::uniform(preset, n, p, rho)
            .expect("uniform parameters validated by caller");
        seq.push(rel2_exact(&cfg));
    }
    let denominator = minimal_recurrence(&seq, MAX_ORDER)?;
    let order = denominator.degree().unwrap_or(0);

    let numerator = if order == 0 {
        UniPoly::zero()
    } else {
        // fictitious constant term extending the recurrence down to n = order
        let lead = denominator.coeff(order);
        let mut acc = seq[order - 1].clone(); // s_order
        for i in 1..order {
            acc = acc + denominator.coeff(i) * seq[order - 1 - i].clone();
        }
        let s0 = -acc / lead;
        let mut series_poly = UniPoly::constant(s0);
        for (m, s) in seq.iter().enumerate() {
            series_poly = series_poly + UniPoly::monomial(s.clone(), m + 1);
        }
        (denominator.clone() * series_poly).truncated(order.saturating_sub(1))
    };

    let gf = RationalGf {
        numerator,
        denominator,
    };
    // the fraction must reproduce every computed reliability
    let series = gf.series(TERMS + 1);
    for (n, s) in seq.iter().enumerate() {
        if &series[n + 1] != s {
            return Err(SpectralError::NoRecurrence);
        }
    }
    Ok(gf)
}

fn pw(base: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k {
        acc *= base;
    }
    acc
}

/// Closed-form generating function of the undirected family (valid for
/// rho != 1, where the denominator is cubic).
pub fn gf_undirected_reference(p: &Rat, rho: &Rat) -> RationalGf {
    let one = Rat::one();
    assert!(rho != &one, "undirected closed form is singular at rho = 1");
    let prefactor = rho / (rat(2, 1) * (&one - rho));
    // N coefficients
    let n1 = -(p * (rat(2, 1) + rat(2, 1) * p - rat(6, 1) * pw(p, 2) + rat(3, 1) * pw(p, 3))
        * pw(rho, 2));
    let n2 = rat(2, 1)
        * pw(&(&one - p), 2)
        * (rat(2, 1) - p)
        * pw(p, 3)
        * (&one - p + pw(p, 2))
        * pw(rho, 4);
    let numerator = UniPoly::new(vec![one.clone(), n1, n2]).scale(&prefactor);
    // D coefficients
    let d1 = -(p
        * rho
        * (rat(2, 1) + rat(2, 1) * p * rho - rat(6, 1) * pw(p, 2) * rho
            + rat(3, 1) * pw(p, 3) * rho));
    let d2 = rat(2, 1)
        * (&one - p)
        * pw(p, 3)
        * pw(rho, 3)
        * (rat(2, 1) - rat(3, 1) * p - rat(2, 1) * p * rho + rat(6, 1) * pw(p, 2) * rho
            - rat(4, 1) * pw(p, 3) * rho
            + pw(p, 4) * rho);
    let d3 = -(rat(4, 1)
        * pw(&(&one - p), 2)
        * (rat(2, 1) - p)
        * pw(p, 6)
        * (&one - rho)
        * pw(rho, 5));
    let denominator = UniPoly::new(vec![one, d1, d2, d3]);
    RationalGf {
        numerator,
        denominator,
    }
}

/// Closed-form generating function of the directed family (quadratic
/// denominator for every rho).
pub fn gf_directed_reference(p: &Rat, rho: &Rat) -> RationalGf {
    let one = Rat::one();
    let chi = rat(2, 1) - rat(4, 1) * p + pw(p, 2);
    let numerator = UniPoly::new(vec![one.clone(), -(pw(p, 2) * pw(rho, 2) * &chi)])
        .scale(&(rho / rat(2, 1)));
    let d1 = -(p * rho * (rat(2, 1) + p * rho * &chi));
    let d2 = rat(2, 1) * pw(p, 3) * pw(rho, 3) * (&one - p) * (rat(2, 1) - p);
    let denominator = UniPoly::new(vec![one, d1, d2]);
    RationalGf {
        numerator,
        denominator,
    }
}

/// Generating function with coefficients as exact polynomials in p, at fixed
/// rational rho, reconstructed by interpolation through sample points.
#[derive(Clone, Debug)]
pub struct PolyGf {
    /// denominator coefficients by power of z; index 0 is the constant 1
    pub denom_coeffs: Vec<UniPoly<Rat>>,
    /// numerator coefficients by power of z
    pub numer_coeffs: Vec<UniPoly<Rat>>,
}

impl PolyGf {
    pub fn order(&self) -> usize {
        self.denom_coeffs.len() - 1
    }

    /// Evaluate the denominator coefficients at a complex point, returning
    /// the eigenvalue polynomial `lambda^L + d1 lambda^{L-1} + ... + dL`
    /// (ascending coefficient order).
    pub fn eigen_poly_at(&self, p: Complex64) -> Vec<Complex64> {
        let order = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (k, cpoly) in self.denom_coeffs.iter().enumerate() {
            // z^k coefficient of D becomes lambda^{L-k}
            coeffs[order - k] = cpoly.eval_map(&p, |c| Complex64::from_rational(c));
        }
        coeffs
    }
}

/// Interpolate the generating function's dependence on p at fixed rho.
pub fn gf_extract_poly(preset: Preset, rho: &Rat) -> Result<PolyGf, SpectralError> {
    const SAMPLES: usize = 36;
    const VERIFY: usize = 4;
    let mut extracted = Vec::new();
    for j in 0..SAMPLES + VERIFY {
        let p = rat(2 * j as i64 + 1, 97);
        match gf_extract(preset, &p, rho) {
            Ok(gf) => extracted.push((p, gf)),
            Err(SpectralError::Recurrence(_)) => continue, // degenerate sample
            Err(e) => return Err(e),
        }
    }
    if extracted.len() < SAMPLES {
        return Err(SpectralError::Interpolation(format!(
            "only {} usable samples",
            extracted.len()
        )));
    }
    let order = extracted
        .iter()
        .map(|(_, gf)| gf.denominator.degree().unwrap_or(0))
        .max()
        .unwrap();
    extracted.retain(|(_, gf)| gf.denominator.degree().unwrap_or(0) == order);
    if extracted.len() < SAMPLES {
        return Err(SpectralError::Interpolation(
            "too many degenerate samples".into(),
        ));
    }
    let (fit, check) = extracted.split_at(SAMPLES);

    let interp_coeff = |select: &dyn Fn(&RationalGf) -> Rat| -> UniPoly<Rat> {
        let pts: Vec<(Rat, Rat)> = fit
            .iter()
            .map(|(p, gf)| (p.clone(), select(gf)))
            .collect();
        crate::scalar::interpolate(&pts)
    };

    let mut denom_coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        denom_coeffs.push(interp_coeff(&|gf: &RationalGf| gf.denominator.coeff(k)));
    }
    let mut numer_coeffs = Vec::with_capacity(order);
    for k in 0..order.max(1) {
        numer_coeffs.push(interp_coeff(&|gf: &RationalGf| gf.numerator.coeff(k)));
    }

    // held-out verification: interpolants must reproduce unseen samples exactly
    for (p, gf) in check {
        for k in 0..=order {
            if denom_coeffs[k].eval(p) != gf.denominator.coeff(k) {
                return Err(SpectralError::Interpolation(format!(
                    "denominator coefficient {k} mismatch at p={p}"
                )));
            }
        }
        for (k, pol) in numer_coeffs.iter().enumerate() {
            if pol.eval(p) != gf.numerator.coeff(k) {
                return Err(SpectralError::Interpolation(format!(
                    "numerator coefficient {k} mismatch at p={p}"
                )));
            }
        }
    }
    Ok(PolyGf {
        denom_coeffs,
        numer_coeffs,
    })
}

// ---------------------------------------------------------------------------
// Spectral forms
// ---------------------------------------------------------------------------

/// Eigenvalue/amplitude pairs such that `Rel2(n) = sum_i alpha_i zeta_i^n`
/// for `n >= 2` (the closed forms are also valid at n = 1 for these
/// families, but n = 1 is better served by a direct contraction).
#[derive(Clone, Debug)]
pub struct SpectralForm {
    pub eigenvalues: Vec<Complex64>,
    pub amplitudes: Vec<Complex64>,
}

impl SpectralForm {
    pub fn eval(&self, n: usize) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.amplitudes)
            .map(|(z, a)| a * z.powu(n as u32))
            .sum()
    }

    /// Real-valued reconstruction (imaginary parts cancel for real data).
    pub fn eval_real(&self, n: usize) -> f64 {
        self.eval(n).re
    }

    /// Largest-modulus eigenvalue.
    pub fn dominant(&self) -> Complex64 {
        self.eigenvalues[0]
    }

    fn sort(mut self) -> Self {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&i, &j| {
            self.eigenvalues[j]
                .norm_sqr()
                .partial_cmp(&self.eigenvalues[i].norm_sqr())
                .unwrap()
        });
        self.eigenvalues = idx.iter().map(|&i| self.eigenvalues[i]).collect();
        self.amplitudes = idx.iter().map(|&i| self.amplitudes[i]).collect();
        self
    }
}

/// chi = 2 - 4p + p^2, the recurring directed-cell factor.
fn chi_poly<T: SqrtRing>(p: &T) -> T {
    T::from_f64(2.0) - T::from_f64(4.0) * p.clone() + p.clone() * p.clone()
}

/// Discriminant of the directed eigenvalue pair.
pub fn directed_disc<T: SqrtRing>(p: &T, rho: &T) -> T {
    let chi = chi_poly(p);
    let quad = T::from_f64(2.0) - T::from_f64(2.0) * p.clone() + p.clone() * p.clone();
    T::from_f64(4.0) - T::from_f64(4.0) * p.clone() * rho.clone() * quad
        + p.clone() * p.clone() * rho.clone() * rho.clone() * chi.clone() * chi
}

/// Directed eigenvalues and amplitudes, generic over the scalar.
pub fn directed_pair<T: SqrtRing>(p: &T, rho: &T) -> ((T, T), (T, T)) {
    let chi = chi_poly(p);
    let root = directed_disc(p, rho).sqrt_val();
    let half = T::from_f64(0.5);
    let quarter = T::from_f64(0.25);
    let two = T::from_f64(2.0);
    let base = two.clone() + p.clone() * rho.clone() * chi.clone();
    let scale = p.clone() * rho.clone() * half;
    let zeta_p = scale.clone() * (base.clone() + root.clone());
    let zeta_m = scale * (base - root.clone());
    let ratio = (two - p.clone() * rho.clone() * chi) / root;
    let one = T::from_f64(1.0);
    let alpha_p = rho.clone() * quarter.clone() * (one.clone() + ratio.clone());
    let alpha_m = rho.clone() * quarter * (one - ratio);
    ((zeta_p, zeta_m), (alpha_p, alpha_m))
}

/// Discriminant of the undirected perfect-node pair.
pub fn undirected_disc<T: SqrtRing>(p: &T) -> T {
    let c = |x: f64| T::from_f64(x);
    let p1 = p.clone();
    let p2 = p1.clone() * p1.clone();
    let p3 = p2.clone() * p1.clone();
    let p4 = p3.clone() * p1.clone();
    let p5 = p4.clone() * p1.clone();
    let p6 = p5.clone() * p1.clone();
    c(4.0) - c(8.0) * p1 + c(36.0) * p2 - c(100.0) * p3 + c(128.0) * p4 - c(76.0) * p5
        + c(17.0) * p6
}

/// Undirected perfect-node eigenvalues and amplitudes, generic.
pub fn undirected_pair<T: SqrtRing>(p: &T) -> ((T, T), (T, T)) {
    let c = |x: f64| T::from_f64(x);
    let p1 = p.clone();
    let p2 = p1.clone() * p1.clone();
    let p3 = p2.clone() * p1.clone();
    let p4 = p3.clone() * p1.clone();
    let p5 = p4.clone() * p1.clone();
    let root = undirected_disc(p).sqrt_val();
    let poly = c(2.0) + c(2.0) * p1.clone() - c(6.0) * p2.clone() + c(3.0) * p3.clone();
    let zeta_p = p1.clone() * c(0.5) * (poly.clone() + root.clone());
    let zeta_m = p1.clone() * c(0.5) * (poly - root.clone());
    let big_b = c(2.0) - c(10.0) * p1.clone() + c(38.0) * p2.clone() - c(59.0) * p3.clone()
        + c(40.0) * p4 - c(10.0) * p5;
    let lin = c(1.0) - c(4.0) * p1.clone() + c(2.0) * p2.clone();
    let one_m = c(1.0) - p1.clone();
    let quad = c(1.0) - p1.clone() + p2;
    let denom = c(4.0) * one_m.clone() * one_m * quad.clone() * quad * root.clone();
    let a_p = (big_b.clone() + lin.clone() * root.clone()) / denom.clone();
    let a_m = (big_b - lin * root) / denom;
    ((zeta_p, zeta_m), (a_p, a_m))
}

fn pair_to_form(p: f64, rho: f64, disc: f64, directed: bool) -> SpectralForm {
    if disc >= 0.0 {
        let ((zp, zm), (ap, am)) = if directed {
            directed_pair(&p, &rho)
        } else {
            undirected_pair(&p)
        };
        SpectralForm {
            eigenvalues: vec![Complex64::new(zp, 0.0), Complex64::new(zm, 0.0)],
            amplitudes: vec![Complex64::new(ap, 0.0), Complex64::new(am, 0.0)],
        }
        .sort()
    } else {
        let pc = Complex64::new(p, 0.0);
        let rc = Complex64::new(rho, 0.0);
        let ((zp, zm), (ap, am)) = if directed {
            directed_pair(&pc, &rc)
        } else {
            undirected_pair(&pc)
        };
        SpectralForm {
            eigenvalues: vec![zp, zm],
            amplitudes: vec![ap, am],
        }
        .sort()
    }
}

/// Two-eigenvalue closed form for the directed family, any node reliability.
pub fn closed_form_directed(p: f64, rho: f64) -> Result<SpectralForm, SpectralError> {
    let disc = directed_disc(&p, &rho);
    if disc.abs() < 1e-12 {
        return Err(SpectralError::DegenerateSpectrum);
    }
    Ok(pair_to_form(p, rho, disc, true))
}

/// Two-eigenvalue closed form for the undirected family with perfect nodes.
/// At p = 1 the amplitudes are singular; the limit is `R_n = 1`.
pub fn closed_form_undirected_perfect(p: f64) -> Result<SpectralForm, SpectralError> {
    if (1.0 - p).abs() < 1e-12 {
        return Err(SpectralError::SingularAmplitude);
    }
    let disc = undirected_disc(&p);
    if disc.abs() < 1e-12 {
        return Err(SpectralError::DegenerateSpectrum);
    }
    Ok(pair_to_form(p, 1.0, disc, false))
}

/// Spectrum from the extracted generating function: eigenvalues are the
/// reciprocals of the denominator roots, amplitudes come from the partial
/// fraction decomposition.
pub fn numeric_spectrum(preset: Preset, p: &Rat, rho: &Rat) -> Result<SpectralForm, SpectralError> {
    let gf = gf_extract(preset, p, rho)?;
    spectrum_from_gf(&gf)
}

/// Partial-fraction spectrum of an explicit rational generating function.
pub fn spectrum_from_gf(gf: &RationalGf) -> Result<SpectralForm, SpectralError> {
    let order = gf.denominator.degree().unwrap_or(0);
    if order == 0 {
        return Ok(SpectralForm {
            eigenvalues: vec![],
            amplitudes: vec![],
        });
    }
    let d64: Vec<Complex64> = (0..=order)
        .map(|k| Complex64::from_rational(&gf.denominator.coeff(k)))
        .collect();
    let roots = crate::zeros::polyroots_c64(&d64);
    let scale = roots.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    for i in 0..roots.len() {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() < 1e-9 * scale.max(1e-300) {
                return Err(SpectralError::DegenerateSpectrum);
            }
        }
    }
    let dprime = gf.denominator.derivative();
    let eval_c = |poly: &UniPoly<Rat>, z: Complex64| -> Complex64 {
        poly.eval_map(&z, |c| Complex64::from_rational(c))
    };
    let mut eigenvalues = Vec::with_capacity(order);
    let mut amplitudes = Vec::with_capacity(order);
    for z in roots {
        eigenvalues.push(Complex64::new(1.0, 0.0) / z);
        let num = eval_c(&gf.numerator, z);
        let den = z * eval_c(&dprime, z);
        amplitudes.push(-num / den);
    }
    Ok(SpectralForm {
        eigenvalues,
        amplitudes,
    }
    .sort())
}

// ---------------------------------------------------------------------------
// Failure frequency and rate
// ---------------------------------------------------------------------------

/// Failure and repair rates for one component.
#[derive(Clone, Debug)]
pub struct RateSpec {
    pub lambda: Rat,
    pub mu: Option<Rat>,
}

/// Per-class default rates with per-component overrides.
#[derive(Clone, Debug, Default)]
pub struct ComponentRates {
    pub edge: Option<RateSpec>,
    pub node: Option<RateSpec>,
    pub overrides: BTreeMap<ComponentId, RateSpec>,
}

impl ComponentRates {
    pub fn uniform(edge_lambda: Rat, node_lambda: Rat) -> Self {
        ComponentRates {
            edge: Some(RateSpec {
                lambda: edge_lambda,
                mu: None,
            }),
            node: Some(RateSpec {
                lambda: node_lambda,
                mu: None,
            }),
            overrides: BTreeMap::new(),
        }
    }

    pub fn rate_for(&self, id: &ComponentId) -> Option<&RateSpec> {
        self.overrides.get(id).or(if id.is_node() {
            self.node.as_ref()
        } else {
            self.edge.as_ref()
        })
    }
}

/// Steady-state availability, failure frequency, and failure rate.
#[derive(Clone, Debug)]
pub struct FrequencyResult {
    pub availability: Rat,
    /// `sum_i lambda_i p_i dA/dp_i`
    pub frequency: Rat,
    /// `frequency / availability`; undefined when the system is down surely
    pub rate: Option<Rat>,
    /// `sum_i mu_i q_i dU/dq_i`, present when every component has a repair
    /// rate; equals `frequency` in steady state
    pub repair_frequency: Option<Rat>,
}

/// Failure frequency by contracting the exact Rel2 gradient with the
/// component failure rates.
pub fn failure_frequency(
    config: &LadderConfig,
    rates: &ComponentRates,
) -> Result<FrequencyResult, SpectralError> {
    let availability = rel2_exact(config);
    let grad = rel2_gradient::<Rat>(config);
    let mut frequency = Rat::zero();
    let mut repair = Some(Rat::zero());
    for (id, g) in &grad {
        let spec = rates
            .rate_for(id)
            .ok_or(SpectralError::MissingRate(*id))?;
        let p_i = config.component_value(*id);
        frequency += &spec.lambda * p_i * g;
        match (&mut repair, &spec.mu) {
            (Some(acc), Some(mu)) => *acc += mu * (Rat::one() - p_i) * g,
            _ => repair = None,
        }
    }
    let rate = if availability.is_zero() {
        None
    } else {
        Some(&frequency / &availability)
    };
    Ok(FrequencyResult {
        availability,
        frequency,
        rate,
        repair_frequency: repair,
    })
}

// ---------------------------------------------------------------------------
// Asymptotic failure rate
// ---------------------------------------------------------------------------

/// `(intercept, slope)` of the large-n failure rate
/// `lambda_bar(n) ~ intercept + slope * n`, with
/// `slope = lambda d ln zeta_+ / d ln p` and
/// `intercept = lambda d ln alpha_+ / d ln p`. The effective network behaves
/// like n components in series, each with availability `zeta_+`.
pub fn asymptotic_rate(
    preset: Preset,
    p: f64,
    rho: f64,
    lambda: f64,
) -> Result<(f64, f64), SpectralError> {
    match preset {
        Preset::AngeleDirected => {
            let disc = directed_disc(&p, &rho);
            if disc <= 0.0 {
                return Err(SpectralError::DegenerateSpectrum);
            }
            let pd = Dual::seed(p);
            let rd = Dual::constant(rho);
            let ((zp, _), (ap, _)) = directed_pair(&pd, &rd);
            Ok(log_derivatives(p, lambda, zp, ap))
        }
        Preset::AngeleUndirected if rho == 1.0 => {
            if (1.0 - p).abs() < 1e-12 {
                return Err(SpectralError::SingularAmplitude);
            }
            let disc = undirected_disc(&p);
            if disc <= 0.0 {
                return Err(SpectralError::DegenerateSpectrum);
            }
            let pd = Dual::seed(p);
            let ((zp, _), (ap, _)) = undirected_pair(&pd);
            Ok(log_derivatives(p, lambda, zp, ap))
        }
        _ => {
            // no closed form: central differences through the numeric spectrum
            let h = (p.abs() * 1e-6).max(1e-9);
            let rho_r = rat_from_f64(rho);
            let value = |x: f64| -> Result<(f64, f64), SpectralError> {
                let form = numeric_spectrum(preset, &rat_from_f64(x), &rho_r)?;
                let z = form.dominant();
                let a = form.amplitudes[0];
                if z.im.abs() > 1e-9 * z.norm() || z.re <= 0.0 {
                    return Err(SpectralError::DegenerateSpectrum);
                }
                Ok((z.re, a.re))
            };
            let (z_hi, a_hi) = value(p + h)?;
            let (z_lo, a_lo) = value(p - h)?;
            let dlnp = ((p + h) / (p - h)).ln();
            let slope = lambda * (z_hi / z_lo).ln() / dlnp;
            let intercept = lambda * (a_hi / a_lo).ln() / dlnp;
            Ok((intercept, slope))
        }
    }
}

fn log_derivatives(p: f64, lambda: f64, zeta: Dual<f64>, alpha: Dual<f64>) -> (f64, f64) {
    let slope = lambda * p * zeta.deriv / zeta.value;
    let intercept = lambda * p * alpha.deriv / alpha.value;
    (intercept, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{EdgeKind, NodeKind};
    use crate::transfer::rel2;
    use rand::{Rng, SeedableRng};

    fn uniform(preset: Preset, n: usize, p: (i64, i64), rho: (i64, i64)) -> LadderConfig {
        LadderConfig::uniform(preset, n, &rat(p.0, p.1), &rat(rho.0, rho.1)).unwrap()
    }

    #[test]
    fn gf_matches_reference_directed() {
        let p = rat(1, 3);
        let rho = rat(1, 2);
        let gf = gf_extract(Preset::AngeleDirected, &p, &rho).unwrap();
        let reference = gf_directed_reference(&p, &rho);
        assert_eq!(
            gf.numerator.clone() * reference.denominator.clone(),
            reference.numerator.clone() * gf.denominator.clone()
        );
        assert_eq!(gf.denominator.degree(), Some(2));
    }

    #[test]
    fn gf_matches_reference_undirected() {
        let p = rat(1, 3);
        let rho = rat(1, 2);
        let gf = gf_extract(Preset::AngeleUndirected, &p, &rho).unwrap();
        let reference = gf_undirected_reference(&p, &rho);
        assert_eq!(
            gf.numerator.clone() * reference.denominator.clone(),
            reference.numerator.clone() * gf.denominator.clone()
        );
        assert_eq!(gf.denominator.degree(), Some(3));
    }

    #[test]
    fn gf_first_order_term() {
        let p = rat(2, 7);
        let rho = rat(3, 5);
        for preset in [Preset::AngeleDirected, Preset::AngeleUndirected] {
            let gf = gf_extract(preset, &p, &rho).unwrap();
            assert_eq!(gf.series(2)[1], &p * &rho * &rho, "{preset}");
        }
    }

    #[test]
    fn gf_zero_p_collapses() {
        let gf = gf_extract(Preset::AngeleDirected, &rat(0, 1), &rat(1, 2)).unwrap();
        assert!(gf.numerator.is_zero());
        assert_eq!(gf.denominator, UniPoly::one());
    }

    #[test]
    fn directed_closed_form_values() {
        // p=0.9, rho=1: disc = 0.869521, zeta+ ~ 0.999667, zeta- ~ 0.160434
        let disc = directed_disc(&0.9, &1.0);
        assert!((disc - 0.869521).abs() < 1e-6, "{disc}");
        let form = closed_form_directed(0.9, 1.0).unwrap();
        assert!((form.eigenvalues[0].re - 0.999667).abs() < 1e-6);
        assert!((form.eigenvalues[1].re - 0.160434).abs() < 1e-6);
    }

    #[test]
    fn directed_perfect_components() {
        let form = closed_form_directed(1.0, 1.0).unwrap();
        assert!((form.eigenvalues[0].re - 1.0).abs() < 1e-14);
        assert!(form.eigenvalues[1].norm() < 1e-14);
        for n in 2..6 {
            assert!((form.eval_real(n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn directed_form_reproduces_rel2() {
        let p = rat(9, 10);
        let rho = Rat::one();
        let form = closed_form_directed(0.9, 1.0).unwrap();
        for n in [2usize, 5, 10] {
            let cfg = uniform(Preset::AngeleDirected, n, (9, 10), (1, 1));
            let direct = rel2(&cfg);
            assert!(
                (form.eval_real(n) - direct).abs() <= 1e-12 * direct,
                "n={n}: {} vs {direct}",
                form.eval_real(n)
            );
        }
        let _ = (p, rho);
    }

    #[test]
    fn undirected_disc_at_one_is_one() {
        assert!((undirected_disc(&1.0) - 1.0).abs() < 1e-12);
        let ((zp, zm), _) = undirected_pair(&(1.0 + 1e-9));
        assert!((zp - 1.0).abs() < 1e-6 && zm.abs() < 1e-6);
    }

    #[test]
    fn undirected_form_reproduces_rel2() {
        let form = closed_form_undirected_perfect(0.5).unwrap();
        for n in [2usize, 3, 5, 8] {
            let cfg = uniform(Preset::AngeleUndirected, n, (1, 2), (1, 1));
            let direct = rel2(&cfg);
            assert!(
                (form.eval_real(n) - direct).abs() <= 1e-10 * direct.max(1e-30),
                "n={n}"
            );
        }
    }

    #[test]
    fn numeric_spectrum_agrees_with_closed_forms() {
        let p = rat(7, 10);
        let rho = rat(9, 10);
        let numeric = numeric_spectrum(Preset::AngeleDirected, &p, &rho).unwrap();
        let closed = closed_form_directed(0.7, 0.9).unwrap();
        for (a, b) in numeric.eigenvalues.iter().zip(&closed.eigenvalues) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
        // undirected with imperfect nodes has three eigenvalues
        let numeric = numeric_spectrum(Preset::AngeleUndirected, &p, &rho).unwrap();
        assert_eq!(numeric.eigenvalues.len(), 3);
        for n in 2..=30 {
            let cfg = uniform(Preset::AngeleUndirected, n, (7, 10), (9, 10));
            let direct = rel2(&cfg);
            assert!(
                (numeric.eval_real(n) - direct).abs() <= 1e-10 * direct.max(1e-30),
                "n={n}"
            );
        }
    }

    #[test]
    fn frequency_n1_directed_formula() {
        // R_1 = p rho^2: nu = p rho^2 (lambda_e + 2 lambda_n)
        let p = rat(1, 2);
        let rho = rat(1, 3);
        let cfg = uniform(Preset::AngeleDirected, 1, (1, 2), (1, 3));
        let le = rat(3, 100);
        let ln_ = rat(1, 100);
        let rates = ComponentRates::uniform(le.clone(), ln_.clone());
        let out = failure_frequency(&cfg, &rates).unwrap();
        let expect = &p * &rho * &rho * (le + rat(2, 1) * ln_);
        assert_eq!(out.frequency, expect);
        assert_eq!(out.availability, &p * &rho * &rho);
        assert_eq!(out.rate.unwrap(), expect / (&p * &rho * &rho));
    }

    #[test]
    fn frequency_zero_rates() {
        let cfg = uniform(Preset::AngeleUndirected, 2, (1, 2), (1, 3));
        let rates = ComponentRates::uniform(Rat::zero(), Rat::zero());
        let out = failure_frequency(&cfg, &rates).unwrap();
        assert!(out.frequency.is_zero());
    }

    #[test]
    fn frequency_matches_dual_directional_derivative() {
        // with class-uniform rates, one dual pass seeded with lambda_i p_i on
        // every slot gives the same contraction
        use crate::ladder::uniform_cells;
        use crate::transfer::rel2_cells_5;
        let p = rat(3, 5);
        let rho = rat(2, 3);
        let le = rat(7, 1000);
        let ln_ = rat(3, 1000);
        let cfg = uniform(Preset::AngeleDirected, 4, (3, 5), (2, 3));
        let rates = ComponentRates::uniform(le.clone(), ln_.clone());
        let nu = failure_frequency(&cfg, &rates).unwrap().frequency;

        let cells = uniform_cells::<Dual<Rat>>(
            Preset::AngeleDirected,
            4,
            Dual::new(p.clone(), &le * &p),
            Dual::new(rho.clone(), &ln_ * &rho),
        );
        let dual = rel2_cells_5(&cells, crate::ladder::Destination::S);
        assert_eq!(dual.deriv, nu);
    }

    #[test]
    fn missing_rate_is_reported() {
        let cfg = uniform(Preset::AngeleDirected, 2, (1, 2), (1, 3));
        let rates = ComponentRates {
            edge: None,
            node: Some(RateSpec {
                lambda: Rat::one(),
                mu: None,
            }),
            overrides: BTreeMap::new(),
        };
        assert!(matches!(
            failure_frequency(&cfg, &rates),
            Err(SpectralError::MissingRate(ComponentId::Edge { .. }))
        ));
        let _ = (EdgeKind::A, NodeKind::S);
    }

    #[test]
    fn asymptotic_rate_directed_matches_finite_difference() {
        let (intercept, slope) = asymptotic_rate(Preset::AngeleDirected, 0.9, 1.0, 1.0).unwrap();
        let h = 1e-6;
        let z = |p: f64| closed_form_directed(p, 1.0).unwrap().eigenvalues[0].re;
        let fd = 0.9 * (z(0.9 + h) - z(0.9 - h)) / (2.0 * h) / z(0.9);
        assert!((slope - fd).abs() < 1e-6, "{slope} vs {fd}");
        assert!(intercept.is_finite());
    }

    #[test]
    fn asymptotic_rate_zero_lambda() {
        let (i, s) = asymptotic_rate(Preset::AngeleDirected, 0.8, 0.9, 0.0).unwrap();
        assert_eq!((i, s), (0.0, 0.0));
    }

    #[test]
    fn asymptotic_rate_numeric_route() {
        // undirected with imperfect nodes goes through the numeric spectrum
        let (_, slope) = asymptotic_rate(Preset::AngeleUndirected, 0.8, 0.9, 1.0).unwrap();
        assert!(slope.is_finite() && slope > 0.0);
    }

    #[test]
    fn gf_extract_poly_directed_matches_reference() {
        let rho = rat(1, 2);
        let pg = gf_extract_poly(Preset::AngeleDirected, &rho).unwrap();
        assert_eq!(pg.order(), 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = rat(rng.gen_range(1i64..=30), 31);
            let reference = gf_directed_reference(&p, &rho);
            for k in 0..=2 {
                assert_eq!(pg.denom_coeffs[k].eval(&p), reference.denominator.coeff(k));
            }
        }
    }
}

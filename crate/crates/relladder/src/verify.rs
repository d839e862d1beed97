//! Self-check suites: oracle equivalence and reference-formula agreement.
//!
//! `run_all` backs the CLI `verify` subcommand; the same checks are exercised
//! with larger budgets by the acceptance test suite.

use crate::ladder::{
    expand_graph, CellParams, ComponentId, Destination, EdgeKind, LadderConfig, NodeKind, Preset,
};
use crate::oracle::{oracle_enumerate, oracle_factoring};
use crate::scalar::{rat, FromRational, One, Rat, Zero};
use crate::transfer::rel2_exact;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Uniform random rational in [0, 1] with a small denominator.
pub fn random_unit_rational<R: Rng + ?Sized>(rng: &mut R) -> Rat {
    let den = rng.gen_range(1i64..=12);
    let num = rng.gen_range(0i64..=den);
    rat(num, den)
}

/// A random valid configuration for a preset: independent rational values on
/// every live slot, boundary and preset constraints applied.
pub fn random_config(rng: &mut impl Rng, preset: Preset, n: usize) -> LadderConfig {
    random_config_with(rng, preset, n, |rng| random_unit_rational(rng))
}

fn random_config_with(
    rng: &mut impl Rng,
    preset: Preset,
    n: usize,
    mut value: impl FnMut(&mut dyn rand::RngCore) -> Rat,
) -> LadderConfig {
    let mut cells = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut cell = CellParams {
            a: Rat::one(),
            a_rev: Rat::one(),
            b: value(rng),
            b_rev: value(rng),
            c: Rat::zero(),
            c_rev: Rat::zero(),
            d: Rat::one(),
            d_rev: Rat::one(),
            e: Rat::zero(),
            e_rev: Rat::zero(),
            s: value(rng),
            t: value(rng),
        };
        if i > 0 {
            for kind in EdgeKind::ALL {
                *cell.edge_mut(kind) = value(rng);
            }
        }
        if preset.is_undirected() {
            cell.a_rev = cell.a.clone();
            cell.b_rev = cell.b.clone();
            cell.c_rev = cell.c.clone();
            cell.d_rev = cell.d.clone();
            cell.e_rev = cell.e.clone();
        }
        if preset.is_angele() {
            cell.b = Rat::zero();
            cell.b_rev = Rat::zero();
            if i == 0 || i == n {
                cell.t = Rat::zero();
            }
        }
        if preset == Preset::AngeleDirected {
            for kind in [EdgeKind::ARev, EdgeKind::CRev, EdgeKind::DRev, EdgeKind::ERev] {
                *cell.edge_mut(kind) = Rat::zero();
            }
        }
        cells.push(cell);
    }
    LadderConfig::new(preset, Destination::S, cells).expect("generated config is valid")
}

/// Random config with enough components pinned to 0 or 1 that at most
/// `max_open` imperfect components remain (keeps exact enumeration cheap).
pub fn random_pinned_config(
    rng: &mut impl Rng,
    preset: Preset,
    n: usize,
    max_open: usize,
) -> LadderConfig {
    let cfg = random_config(rng, preset, n);
    let mut ids: Vec<ComponentId> = expand_graph(&cfg).component_ids();
    // count imperfect components and pin a random selection
    ids.retain(|id| !cfg.component_value(*id).is_one());
    if ids.len() <= max_open {
        return cfg;
    }
    let excess = ids.len() - max_open;
    let mut cfg = cfg;
    for _ in 0..excess {
        let ids_now: Vec<ComponentId> = expand_graph(&cfg)
            .component_ids()
            .into_iter()
            .filter(|id| !cfg.component_value(*id).is_one())
            .collect();
        if ids_now.len() <= max_open {
            break;
        }
        let pick = ids_now[rng.gen_range(0..ids_now.len())];
        // avoid killing the source/destination outright too often
        let pin_one = rng.gen_bool(0.6)
            || pick == ComponentId::node(0, NodeKind::S)
            || pick == ComponentId::node(cfg.n(), NodeKind::S);
        let value = if pin_one { Rat::one() } else { Rat::zero() };
        cfg = cfg.with_component(pick, value).expect("pin keeps config valid");
    }
    cfg
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn push(checks: &mut Vec<CheckResult>, name: &str, passed: bool, detail: String) {
    checks.push(CheckResult {
        name: name.to_string(),
        passed,
        detail,
    });
}

/// Oracle-equivalence suite: the transfer-matrix contraction against exact
/// enumeration and factoring, plus the three structural anchors of the
/// edge-endpoint mapping.
pub fn oracle_equivalence_suite(rng: &mut impl Rng, configs_per_preset: usize) -> Vec<CheckResult> {
    let mut checks = Vec::new();

    // anchor 1: single-cell directed ladder reduces to one arc: p rho^2
    {
        let p = rat(3, 7);
        let rho = rat(2, 5);
        let cfg = LadderConfig::uniform(Preset::AngeleDirected, 1, &p, &rho).unwrap();
        let expect = &p * &rho * &rho;
        let got = rel2_exact(&cfg);
        let oracle = oracle_enumerate(&expand_graph(&cfg)).unwrap();
        push(
            &mut checks,
            "anchor n=1 single edge",
            got == expect && oracle == expect,
            format!("rel2 {got}, oracle {oracle}, expect {expect}"),
        );
    }

    // anchor 2: two-cell directed ladder: 2 p^2 rho^3 - p^4 rho^4
    {
        let p = rat(1, 2);
        let rho = rat(1, 2);
        let cfg = LadderConfig::uniform(Preset::AngeleDirected, 2, &p, &rho).unwrap();
        let expect = rat(15, 256);
        let got = rel2_exact(&cfg);
        let oracle = oracle_enumerate(&expand_graph(&cfg)).unwrap();
        push(
            &mut checks,
            "anchor n=2 nominal plus backup",
            got == expect && oracle == expect,
            format!("rel2 {got}, oracle {oracle}, expect {expect}"),
        );
    }

    // anchor 3: destination permutation symmetry (S <-> T swap of last cell)
    {
        let mut ok = true;
        let mut detail = String::new();
        for _ in 0..5 {
            let cfg = random_config(rng, Preset::GeneralDirected, 2);
            let swapped = swap_last_cell(&cfg);
            let via_t = {
                let mut c = cfg.clone();
                c.destination = Destination::T;
                rel2_exact(&c)
            };
            let via_s_swapped = rel2_exact(&swapped);
            if via_t != via_s_swapped {
                ok = false;
                detail = format!("mismatch: {via_t} vs {via_s_swapped}");
                break;
            }
        }
        push(&mut checks, "anchor destination permutation", ok, detail);
    }

    for preset in Preset::ALL {
        let mut ok = 0usize;
        let mut first_fail = String::new();
        for k in 0..configs_per_preset {
            let n = 1 + k % 3;
            let cfg = random_pinned_config(rng, preset, n, 14);
            let graph = expand_graph(&cfg);
            let exact = rel2_exact(&cfg);
            let enumerated = oracle_enumerate(&graph).unwrap();
            let factored = oracle_factoring(&graph).unwrap();
            if exact == enumerated && exact == factored {
                ok += 1;
            } else if first_fail.is_empty() {
                first_fail = format!(
                    "n={n}: rel2 {exact} enumerate {enumerated} factoring {factored}"
                );
            }
        }
        push(
            &mut checks,
            &format!("oracle equivalence {preset}"),
            ok == configs_per_preset,
            if first_fail.is_empty() {
                format!("{ok}/{configs_per_preset} exact matches")
            } else {
                first_fail
            },
        );
    }
    checks
}

/// Swap a_n <-> e_n, c_n <-> d_n (and primes), S_n <-> T_n on the last cell.
pub fn swap_last_cell(config: &LadderConfig) -> LadderConfig {
    let mut cells = config.cells().to_vec();
    let last = cells.last_mut().unwrap();
    std::mem::swap(&mut last.a, &mut last.e);
    std::mem::swap(&mut last.a_rev, &mut last.e_rev);
    std::mem::swap(&mut last.c, &mut last.d);
    std::mem::swap(&mut last.c_rev, &mut last.d_rev);
    std::mem::swap(&mut last.b, &mut last.b_rev);
    std::mem::swap(&mut last.s, &mut last.t);
    LadderConfig::new(config.preset, config.destination, cells)
        .expect("permuted config stays valid")
}

/// Reference-formula suite: extracted generating functions against the
/// closed-form numerator/denominator pairs, closed-form spectra against the
/// transfer matrix.
pub fn reference_formula_suite(rng: &mut impl Rng, points: usize) -> Vec<CheckResult> {
    use crate::spectral;
    let mut checks = Vec::new();

    let mut gf_ok = true;
    let mut gf_detail = String::new();
    for k in 0..points {
        let p = rat(1 + (k as i64 * 3) % 17, 19);
        let rho = rat(1 + (k as i64 * 5) % 13, 17);
        for (preset, reference) in [
            (
                Preset::AngeleDirected,
                spectral::gf_directed_reference(&p, &rho),
            ),
            (
                Preset::AngeleUndirected,
                spectral::gf_undirected_reference(&p, &rho),
            ),
        ] {
            let extracted = match spectral::gf_extract(preset, &p, &rho) {
                Ok(gf) => gf,
                Err(e) => {
                    gf_ok = false;
                    gf_detail = format!("{preset} p={p} rho={rho}: {e}");
                    continue;
                }
            };
            // equality as rational functions: cross-multiplication
            let lhs = extracted.numerator.clone() * reference.denominator.clone();
            let rhs = reference.numerator.clone() * extracted.denominator.clone();
            if lhs != rhs {
                gf_ok = false;
                gf_detail = format!("{preset} p={p} rho={rho}: N/D mismatch");
            }
            // first-order coefficient p rho^2
            let series = extracted.series(2);
            if series[1] != &p * &rho * &rho {
                gf_ok = false;
                gf_detail = format!("{preset} p={p} rho={rho}: z^1 coefficient");
            }
        }
    }
    push(
        &mut checks,
        "generating functions match reference forms",
        gf_ok,
        gf_detail,
    );

    let mut spec_ok = true;
    let mut spec_detail = String::new();
    for _ in 0..points.min(10) {
        let p = rat(rng.gen_range(1i64..=9), 10);
        let rho = rat(rng.gen_range(1i64..=9), 10);
        let pf = f64::from_rational(&p);
        let rf = f64::from_rational(&rho);
        if let Ok(form) = spectral::closed_form_directed(pf, rf) {
            let cfg = LadderConfig::uniform(Preset::AngeleDirected, 12, &p, &rho).unwrap();
            let direct = crate::transfer::rel2(&cfg);
            let predicted = form.eval_real(12);
            if (predicted - direct).abs() > 1e-10 * direct.abs().max(1e-30) {
                spec_ok = false;
                spec_detail = format!("p={p} rho={rho}: {predicted} vs {direct}");
            }
        }
    }
    push(
        &mut checks,
        "closed-form spectrum reproduces Rel2",
        spec_ok,
        spec_detail,
    );

    checks
}

/// The full verification run used by the CLI.
pub fn run_all(seed: u64) -> VerifyReport {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checks = oracle_equivalence_suite(&mut rng, 25);
    checks.extend(reference_formula_suite(&mut rng, 12));
    VerifyReport { checks }
}

//! Per-cell transfer matrices and the Rel2 contraction, generic over the
//! scalar ring.
//!
//! The two-terminal reliability of an (n+1)-cell ladder is
//! `l . M_n M_{n-1} ... M_1 M_0 . e1` with `l = e1` for destination `S_n`
//! and `l = e2` for `T_n`. Matrix products are evaluated right-to-left as
//! matrix-vector products so a length-n ladder costs O(n) ring operations.

use crate::ladder::{
    component_slots, CellValues, ComponentId, Destination, EdgeKind, LadderConfig, NodeKind,
    Preset,
};
use crate::scalar::{Dual, FromRational, One, Rat, Ring, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TransferError {
    #[error("reduced 3x3 matrix requires b = 0 and all reversed arcs zero")]
    PresetViolation,
}

/// The 19 independent entries of the 5x5 transfer matrix, kept under their
/// original sparse indices (there is no `x16`).
#[derive(Clone, Debug)]
pub struct XValues<T> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
    pub x4: T,
    pub x5: T,
    pub x6: T,
    pub x7: T,
    pub x8: T,
    pub x9: T,
    pub x10: T,
    pub x11: T,
    pub x12: T,
    pub x13: T,
    pub x14: T,
    pub x15: T,
    pub x17: T,
    pub x18: T,
    pub x19: T,
    pub x20: T,
}

/// Evaluate the multilinear entry formulas for one cell.
pub fn build_xs<T: Ring>(cell: &CellValues<T>) -> XValues<T> {
    let CellValues {
        a,
        a_rev,
        b,
        b_rev,
        c,
        c_rev,
        d,
        d_rev,
        e,
        e_rev,
        s,
        t,
    } = cell;
    let one = T::one();
    let ca = one.clone() - a.clone(); // 1 - a
    let cb = one.clone() - b.clone();
    let cbr = one.clone() - b_rev.clone();
    let cc = one.clone() - c.clone();
    let cd = one.clone() - d.clone();
    let ce = one.clone() - e.clone();
    let st = s.clone() * t.clone();

    let x1 = s.clone()
        * (a.clone() + b_rev.clone() * e.clone() * t.clone()
            - a.clone() * b_rev.clone() * e.clone() * t.clone());
    let x2 = s.clone()
        * (d.clone() + b_rev.clone() * c.clone() * t.clone()
            - b_rev.clone() * c.clone() * d.clone() * t.clone());
    let x3 = s.clone()
        * (a.clone() * d.clone()
            + a.clone() * b_rev.clone() * c.clone() * t.clone()
            - a.clone() * b_rev.clone() * c.clone() * d.clone() * t.clone()
            + b_rev.clone() * c.clone() * e.clone() * t.clone()
            - a.clone() * b_rev.clone() * c.clone() * e.clone() * t.clone()
            + ca.clone() * b_rev.clone() * cc.clone() * d.clone() * e.clone() * t.clone());
    let x4 = ca.clone() * cbr.clone() * c_rev.clone() * d.clone() * e.clone() * st.clone();
    let x5 = a.clone() * cbr.clone() * c.clone() * cd.clone() * e_rev.clone() * st.clone();
    let x6 = (e.clone() + a.clone() * b.clone() * s.clone()
        - a.clone() * b.clone() * e.clone() * s.clone())
        * t.clone();
    let x7 = (c.clone() + b.clone() * d.clone() * s.clone()
        - b.clone() * c.clone() * d.clone() * s.clone())
        * t.clone();
    let x8 = (c.clone() * e.clone()
        + a.clone() * b.clone() * c.clone() * s.clone()
        + a.clone() * b.clone() * d.clone() * s.clone()
        - a.clone() * b.clone() * c.clone() * d.clone() * s.clone()
        - a.clone() * b.clone() * c.clone() * e.clone() * s.clone()
        + ca.clone() * b.clone() * cc.clone() * d.clone() * e.clone() * s.clone())
        * t.clone();
    let x9 = a.clone() * cb.clone() * c.clone() * d_rev.clone() * ce.clone() * st.clone();
    let x10 = a_rev.clone() * cb.clone() * cc.clone() * d.clone() * e.clone() * st.clone();
    let x11 = ca.clone() * cbr.clone() * e.clone() * st.clone();
    let x12 = cbr.clone() * c.clone() * cd.clone() * st.clone();
    // shared multilinear core of x13/x14
    let core_rev = a.clone() * c.clone() - a.clone() * c.clone() * d.clone()
        + c.clone() * e.clone()
        - a.clone() * c.clone() * e.clone()
        + ca.clone() * cc.clone() * d.clone() * e.clone();
    let x13 = cbr.clone() * core_rev.clone() * st.clone();
    let x14 = cbr.clone() * core_rev * st.clone()
        - (a.clone() * b.clone() * c.clone()
            + a.clone() * b.clone() * d.clone()
            - a.clone() * b.clone() * c.clone() * d.clone()
            + c.clone() * e.clone()
            - a.clone() * b.clone() * c.clone() * e.clone()
            + ca.clone() * b.clone() * cc.clone() * d.clone() * e.clone())
            * st.clone();
    let x15 = cb.clone()
        * (a.clone() * c.clone() + a.clone() * d.clone()
            - a.clone() * c.clone() * d.clone()
            - a.clone() * c.clone() * e.clone()
            + ca.clone() * cc.clone() * d.clone() * e.clone())
        * st.clone();
    let x17 = -((c.clone() * (b_rev.clone() + d.clone() - b_rev.clone() * d.clone())
        + b.clone() * d.clone() * cc.clone())
        * st.clone());
    let x18 = -((a.clone() * (b.clone() + e.clone() - b.clone() * e.clone())
        + b_rev.clone() * e.clone() * ca.clone())
        * st.clone());
    let x19 = cb.clone() * cc.clone() * d.clone() * st.clone();
    let x20 = a.clone() * cb.clone() * ce.clone() * st;

    XValues {
        x1,
        x2,
        x3,
        x4,
        x5,
        x6,
        x7,
        x8,
        x9,
        x10,
        x11,
        x12,
        x13,
        x14,
        x15,
        x17,
        x18,
        x19,
        x20,
    }
}

/// Assemble the full 5x5 matrix, row-major.
pub fn build_matrix_5<T: Ring>(cell: &CellValues<T>) -> [[T; 5]; 5] {
    let x = build_xs(cell);
    [
        [x.x1, x.x2, x.x3, x.x4.clone(), x.x5.clone()],
        [x.x6, x.x7, x.x8, x.x9.clone(), x.x10.clone()],
        [
            x.x18,
            x.x17,
            x.x14,
            -(x.x4.clone() + x.x9.clone()),
            -(x.x5.clone() + x.x10.clone()),
        ],
        [x.x20, x.x19, x.x15, -x.x9, -x.x10],
        [x.x11, x.x12, x.x13, -x.x4, -x.x5],
    ]
}

/// The reduced 3x3 matrix available when `b` and all reversed arcs vanish.
pub fn build_matrix_3<T: Ring>(cell: &CellValues<T>) -> Result<[[T; 3]; 3], TransferError> {
    for v in [
        &cell.b,
        &cell.b_rev,
        &cell.a_rev,
        &cell.c_rev,
        &cell.d_rev,
        &cell.e_rev,
    ] {
        if !v.is_zero() {
            return Err(TransferError::PresetViolation);
        }
    }
    let (a, c, d, e, s, t) = (
        cell.a.clone(),
        cell.c.clone(),
        cell.d.clone(),
        cell.e.clone(),
        cell.s.clone(),
        cell.t.clone(),
    );
    let one = T::one();
    let chi = a.clone() * c.clone() * (one.clone() - d.clone()) * (one.clone() - e.clone())
        + d.clone() * e.clone() * (one - a.clone() - c.clone());
    let st = s.clone() * t.clone();
    Ok([
        [
            a.clone() * s.clone(),
            d.clone() * s.clone(),
            a.clone() * d.clone() * s.clone(),
        ],
        [
            e.clone() * t.clone(),
            c.clone() * t.clone(),
            c.clone() * e.clone() * t.clone(),
        ],
        [
            -(a.clone() * e.clone() * st.clone()),
            -(c * d * st.clone()),
            chi * st,
        ],
    ])
}

fn matvec<T: Ring, const N: usize>(m: &[[T; N]; N], v: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for j in 0..N {
            if m[i][j].is_zero() || v[j].is_zero() {
                continue;
            }
            acc = acc + m[i][j].clone() * v[j].clone();
        }
        acc
    })
}

fn basis<T: Ring, const N: usize>(idx: usize) -> [T; N] {
    std::array::from_fn(|i| if i == idx { T::one() } else { T::zero() })
}

/// Contract cell values against the 5x5 matrices.
pub fn rel2_cells_5<T: Ring>(cells: &[CellValues<T>], destination: Destination) -> T {
    let mut v: [T; 5] = basis(0);
    for cell in cells {
        let m = build_matrix_5(cell);
        v = matvec(&m, &v);
    }
    match destination {
        Destination::S => v[0].clone(),
        Destination::T => v[1].clone(),
    }
}

/// Contract cell values against the reduced 3x3 matrices.
pub fn rel2_cells_3<T: Ring>(cells: &[CellValues<T>]) -> Result<T, TransferError> {
    let mut v: [T; 3] = basis(0);
    for cell in cells {
        let m = build_matrix_3(cell)?;
        v = matvec(&m, &v);
    }
    Ok(v[0].clone())
}

/// Generic Rel2: dispatches to the reduced 3x3 contraction for the directed
/// Angele preset (destination `S`), the full 5x5 otherwise.
pub fn rel2_generic<T: FromRational>(config: &LadderConfig) -> T {
    let cells = config.cell_values::<T>();
    if config.preset == Preset::AngeleDirected && config.destination == Destination::S {
        rel2_cells_3(&cells).expect("preset validated at construction")
    } else {
        rel2_cells_5(&cells, config.destination)
    }
}

/// Rel2 in double precision.
pub fn rel2(config: &LadderConfig) -> f64 {
    rel2_generic::<f64>(config)
}

/// Rel2 as an exact rational.
pub fn rel2_exact(config: &LadderConfig) -> Rat {
    rel2_generic::<Rat>(config)
}

/// Full gradient of Rel2 with respect to every structural component slot,
/// via prefix/suffix product accumulation: the derivative against cell `i`
/// is `L_i . dM_i . R_i` with `R_i = M_{i-1}..M_0 e1` and `L_i = l M_n..M_{i+1}`,
/// so the whole map costs O(n) matrix products. Per-cell matrix derivatives
/// come from a dual-number pass over the entry formulas. Undirected presets
/// treat an edge and its reverse as one component (both slots seeded).
///
/// Always contracts through the 5x5 form, which is valid for every preset.
pub fn rel2_gradient<T: FromRational>(config: &LadderConfig) -> BTreeMap<ComponentId, T> {
    let cells = config.cell_values::<T>();
    let n = config.n();
    let dest = config.destination;

    // R_i = M_{i-1} ... M_0 e1  (R_0 = e1)
    let mut right: Vec<[T; 5]> = Vec::with_capacity(n + 2);
    right.push(basis(0));
    for cell in &cells {
        let m = build_matrix_5(cell);
        let prev = right.last().unwrap();
        right.push(matvec(&m, prev));
    }

    // L_i = l^T M_n ... M_{i+1}  (L_n = l^T); build by multiplying from the left
    let l_idx = match dest {
        Destination::S => 0,
        Destination::T => 1,
    };
    let mut left: Vec<[T; 5]> = vec![basis(l_idx); n + 1];
    for i in (0..n).rev() {
        let m = build_matrix_5(&cells[i + 1]);
        let next = left[i + 1].clone();
        // row vector times matrix
        left[i] = std::array::from_fn(|j| {
            let mut acc = T::zero();
            for k in 0..5 {
                if next[k].is_zero() || m[k][j].is_zero() {
                    continue;
                }
                acc = acc + next[k].clone() * m[k][j].clone();
            }
            acc
        });
    }

    let undirected = config.preset.is_undirected();
    let mut out = BTreeMap::new();
    for id in component_slots(config.preset, n) {
        let i = id.cell();
        // build dM_i/d(slot) with a dual pass seeded on this component
        let mut dual_cell: CellValues<Dual<T>> = CellValues {
            a: Dual::constant(cells[i].a.clone()),
            a_rev: Dual::constant(cells[i].a_rev.clone()),
            b: Dual::constant(cells[i].b.clone()),
            b_rev: Dual::constant(cells[i].b_rev.clone()),
            c: Dual::constant(cells[i].c.clone()),
            c_rev: Dual::constant(cells[i].c_rev.clone()),
            d: Dual::constant(cells[i].d.clone()),
            d_rev: Dual::constant(cells[i].d_rev.clone()),
            e: Dual::constant(cells[i].e.clone()),
            e_rev: Dual::constant(cells[i].e_rev.clone()),
            s: Dual::constant(cells[i].s.clone()),
            t: Dual::constant(cells[i].t.clone()),
        };
        match id {
            ComponentId::Node { kind, .. } => dual_cell.node_mut(kind).deriv = T::one(),
            ComponentId::Edge { kind, .. } => {
                dual_cell.edge_mut(kind).deriv = T::one();
                if undirected && (i > 0 || kind == EdgeKind::B) {
                    let rev = match kind {
                        EdgeKind::A => EdgeKind::ARev,
                        EdgeKind::B => EdgeKind::BRev,
                        EdgeKind::C => EdgeKind::CRev,
                        EdgeKind::D => EdgeKind::DRev,
                        EdgeKind::E => EdgeKind::ERev,
                        rev => rev,
                    };
                    dual_cell.edge_mut(rev).deriv = T::one();
                }
            }
        }
        let dm = build_matrix_5(&dual_cell);
        // L_i . dM . R_i, using only derivative parts of dM
        let mut total = T::zero();
        for r in 0..5 {
            if left[i][r].is_zero() {
                continue;
            }
            for c in 0..5 {
                if dm[r][c].deriv.is_zero() || right[i][c].is_zero() {
                    continue;
                }
                total = total
                    + left[i][r].clone() * dm[r][c].deriv.clone() * right[i][c].clone();
            }
        }
        out.insert(id, total);
    }
    out
}

/// Gradient in double precision.
pub fn rel2_gradient_f64(config: &LadderConfig) -> BTreeMap<ComponentId, f64> {
    rel2_gradient::<f64>(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::uniform_cells;
    use crate::scalar::{rat, Rat, UniPoly};
    use crate::Destination;

    fn uniform(preset: Preset, n: usize, p: (i64, i64), rho: (i64, i64)) -> LadderConfig {
        LadderConfig::uniform(preset, n, &rat(p.0, p.1), &rat(rho.0, rho.1)).unwrap()
    }

    fn all_value_cell(v: Rat) -> CellValues<Rat> {
        CellValues {
            a: v.clone(),
            a_rev: v.clone(),
            b: v.clone(),
            b_rev: v.clone(),
            c: v.clone(),
            c_rev: v.clone(),
            d: v.clone(),
            d_rev: v.clone(),
            e: v.clone(),
            e_rev: v.clone(),
            s: v.clone(),
            t: v,
        }
    }

    #[test]
    fn xs_vanish_on_zero_cell() {
        let x = build_xs(&all_value_cell(rat(0, 1)));
        assert!(x.x1.is_zero() && x.x8.is_zero() && x.x14.is_zero() && x.x20.is_zero());
    }

    #[test]
    fn xs_at_all_ones() {
        let x = build_xs(&all_value_cell(rat(1, 1)));
        assert_eq!(x.x1, rat(1, 1)); // 1 * (1 + 1 - 1)
        assert!(x.x4.is_zero()); // carries a (1-a) factor
    }

    #[test]
    fn x4_at_all_halves() {
        let x = build_xs(&all_value_cell(rat(1, 2)));
        // (1-a)(1-b')c'deST = (1/2)^7
        assert_eq!(x.x4, rat(1, 128));
    }

    #[test]
    fn matrix5_row_dependencies() {
        // entries (3,4) = (4,4) + (5,4) and (3,5) = (4,5) + (5,5) by layout;
        // check against independently computed x values on a generic cell
        let cell = CellValues {
            a: rat(1, 3),
            a_rev: rat(2, 5),
            b: rat(1, 7),
            b_rev: rat(3, 4),
            c: rat(2, 9),
            c_rev: rat(1, 2),
            d: rat(5, 6),
            d_rev: rat(1, 5),
            e: rat(4, 7),
            e_rev: rat(2, 3),
            s: rat(9, 10),
            t: rat(7, 8),
        };
        let x = build_xs(&cell);
        let m = build_matrix_5(&cell);
        assert_eq!(m[2][3], -(x.x4.clone() + x.x9.clone()));
        assert_eq!(m[4][3], -x.x4.clone());
        assert_eq!(m[3][4], -x.x10.clone());
        assert_eq!(
            m[2][3],
            m[3][3].clone() + m[4][3].clone(),
            "row 3 is the sum of rows 4 and 5 in column 4"
        );
        assert_eq!(m[2][4], m[3][4].clone() + m[4][4].clone());
    }

    #[test]
    fn reduced_matrix_at_uniform_point() {
        // p = 0.9, rho = 1: rows [[.9,.9,.81],[.9,.9,.81],[-.81,-.81,-.6399]]
        let cells = uniform_cells::<f64>(Preset::AngeleDirected, 2, 0.9, 1.0);
        let m = build_matrix_3(&cells[1]).unwrap();
        let expect = [
            [0.9, 0.9, 0.81],
            [0.9, 0.9, 0.81],
            [-0.81, -0.81, 0.81 * (2.0 - 3.6 + 0.81)],
        ];
        for r in 0..3 {
            for c in 0..3 {
                assert!((m[r][c] - expect[r][c]).abs() < 1e-15, "({r},{c})");
            }
        }
    }

    #[test]
    fn reduced_matrix_rejects_live_reversed_arcs() {
        let cells = uniform_cells::<f64>(Preset::AngeleUndirected, 2, 0.5, 0.5);
        assert_eq!(
            build_matrix_3(&cells[1]).unwrap_err(),
            TransferError::PresetViolation
        );
    }

    #[test]
    fn reduced_matrix_zero_cell_is_zero() {
        let mut cells = uniform_cells::<Rat>(Preset::AngeleDirected, 1, rat(0, 1), rat(1, 2));
        cells[1].a = rat(0, 1);
        let m = build_matrix_3(&cells[1]).unwrap();
        // a = c = d = e = 0 leaves an all-zero matrix
        assert!(m.iter().flatten().all(|v| v.is_zero()));
    }

    #[test]
    fn angele_directed_first_values() {
        // R_1 = p rho^2 and R_2 = 2 p^2 rho^3 - p^4 rho^4
        let p = rat(1, 2);
        let rho = rat(1, 3);
        let cfg1 = uniform(Preset::AngeleDirected, 1, (1, 2), (1, 3));
        assert_eq!(rel2_exact(&cfg1), &p * &rho * &rho);

        let cfg2 = uniform(Preset::AngeleDirected, 2, (1, 2), (1, 3));
        let expect = rat(2, 1) * &p * &p * &rho * &rho * &rho
            - &p * &p * &p * &p * &rho * &rho * &rho * &rho;
        assert_eq!(rel2_exact(&cfg2), expect);
    }

    #[test]
    fn rel2_value_at_paper_point() {
        // n=2 directed uniform, p=0.9, rho=1 -> 2 p^2 - p^4 = 0.9639
        let cfg = LadderConfig::uniform(
            Preset::AngeleDirected,
            2,
            &rat(9, 10),
            &rat(1, 1),
        )
        .unwrap();
        assert_eq!(rel2_exact(&cfg), rat(9639, 10000));
    }

    #[test]
    fn reduced_and_full_paths_agree_on_angele_directed() {
        for (num_p, num_r) in [(1i64, 1i64), (3, 2), (7, 9)] {
            for n in 1..=6 {
                let cfg = uniform(Preset::AngeleDirected, n, (num_p, 10), (num_r, 10));
                let cells = cfg.cell_values::<Rat>();
                let full = rel2_cells_5(&cells, Destination::S);
                let reduced = rel2_cells_3(&cells).unwrap();
                assert_eq!(full, reduced, "n={n} p={num_p}/10 rho={num_r}/10");
            }
        }
    }

    #[test]
    fn perfect_components_give_certain_connection() {
        for preset in Preset::ALL {
            let cfg = uniform(preset, 3, (1, 1), (1, 1));
            assert_eq!(rel2_exact(&cfg), rat(1, 1), "{preset}");
        }
    }

    #[test]
    fn dead_source_gives_zero() {
        let mut cells = uniform(Preset::GeneralDirected, 2, (1, 2), (2, 3))
            .cells()
            .to_vec();
        cells[0].s = rat(0, 1);
        let cfg = LadderConfig::new(Preset::GeneralDirected, Destination::S, cells).unwrap();
        assert!(rel2_exact(&cfg).is_zero());
    }

    #[test]
    fn polynomial_ring_evaluation_matches_scalar() {
        // evaluate Rel2 with p as an indeterminate, then substitute
        let rho = rat(1, 3);
        for preset in Preset::ALL {
            let cells = uniform_cells::<UniPoly<Rat>>(
                preset,
                3,
                UniPoly::x(),
                UniPoly::constant(rho.clone()),
            );
            let poly = rel2_cells_5(&cells, Destination::S);
            let p = rat(4, 7);
            let direct = rel2_exact(&uniform(preset, 3, (4, 7), (1, 3)));
            assert_eq!(poly.eval(&p), direct, "{preset}");
        }
    }

    #[test]
    fn gradient_n1_angele_directed() {
        let cfg = uniform(Preset::AngeleDirected, 1, (1, 2), (1, 3));
        let grad = rel2_gradient::<Rat>(&cfg);
        let p = rat(1, 2);
        let rho = rat(1, 3);
        assert_eq!(grad[&ComponentId::edge(1, EdgeKind::A)], &rho * &rho);
        assert_eq!(
            grad[&ComponentId::node(0, NodeKind::S)],
            &p * &rho
        );
        assert_eq!(
            grad[&ComponentId::node(1, NodeKind::S)],
            &p * &rho
        );
        // c1 connects two dead nodes: zero sensitivity
        assert!(grad[&ComponentId::edge(1, EdgeKind::C)].is_zero());
    }

    #[test]
    fn gradient_matches_finite_difference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for preset in Preset::ALL {
            let cfg = random_config(&mut rng, preset, 3);
            let grad = rel2_gradient_f64(&cfg);
            for (id, g) in &grad {
                let x0 = cfg.component_value(*id).clone();
                let h = rat(1, 1_000_000);
                let lo = if x0 > h.clone() { &x0 - &h } else { rat(0, 1) };
                let hi = if &x0 + &h <= rat(1, 1) { &x0 + &h } else { rat(1, 1) };
                let f_lo = rel2(&cfg.with_component(*id, lo.clone()).unwrap());
                let f_hi = rel2(&cfg.with_component(*id, hi.clone()).unwrap());
                let denom = f64::from_rational(&(&hi - &lo));
                if denom == 0.0 {
                    continue;
                }
                let fd = (f_hi - f_lo) / denom;
                let scale = 1.0f64.max(fd.abs());
                assert!(
                    (g - fd).abs() <= 1e-6 * scale,
                    "{preset} {id}: grad {g} vs fd {fd}"
                );
            }
        }
    }

    use crate::verify::random_config;
}

//! Minimal linear recurrences of exact rational sequences.

use super::{One, Rat, UniPoly, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RecurrenceError {
    #[error("sequence of length {len} too short to certify order {max_order}")]
    TooShort { len: usize, max_order: usize },
    #[error("no linear recurrence of order <= {max_order} fits the sequence")]
    NoRecurrence { max_order: usize },
}

/// Berlekamp-Massey over the rationals.
///
/// Returns the connection polynomial `D(z)` with `D(0) = 1` of minimal degree
/// `L <= max_order` such that `sum_k D_k s_{j-k} = 0` for all `j >= L`.
pub fn minimal_recurrence(
    seq: &[Rat],
    max_order: usize,
) -> Result<UniPoly<Rat>, RecurrenceError> {
    if seq.len() < 2 * max_order + 1 {
        return Err(RecurrenceError::TooShort {
            len: seq.len(),
            max_order,
        });
    }
    let mut conn = UniPoly::one();
    let mut prev = UniPoly::one();
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = Rat::one();

    for n in 0..seq.len() {
        let mut disc = seq[n].clone();
        for i in 1..=len {
            disc += conn.coeff(i) * &seq[n - i];
        }
        if disc.is_zero() {
            shift += 1;
        } else if 2 * len <= n {
            let saved = conn.clone();
            let ratio = &disc / &prev_disc;
            conn = conn - prev.scale(&ratio).shift_up(shift);
            len = n + 1 - len;
            prev = saved;
            prev_disc = disc;
            shift = 1;
        } else {
            let ratio = &disc / &prev_disc;
            conn = conn - prev.scale(&ratio).shift_up(shift);
            shift += 1;
        }
    }

    if len > max_order {
        return Err(RecurrenceError::NoRecurrence { max_order });
    }
    // the exit gate: rerunning the recurrence must reproduce the sequence
    if !satisfies(seq, &conn, len) {
        return Err(RecurrenceError::NoRecurrence { max_order });
    }
    Ok(conn)
}

/// Check that `seq` obeys the recurrence encoded by `conn` from index `order` on.
pub fn satisfies(seq: &[Rat], conn: &UniPoly<Rat>, order: usize) -> bool {
    for j in order..seq.len() {
        let mut acc = Rat::zero();
        for i in 0..=order {
            acc += conn.coeff(i) * &seq[j - i];
        }
        if !acc.is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn constant_sequence() {
        let seq: Vec<Rat> = (0..5).map(|_| rat(1, 1)).collect();
        let d = minimal_recurrence(&seq, 2).unwrap();
        assert_eq!(d, UniPoly::new(vec![rat(1, 1), rat(-1, 1)]));
    }

    #[test]
    fn geometric_sequence() {
        let r = rat(3, 7);
        let mut seq = vec![rat(1, 1)];
        for _ in 0..8 {
            seq.push(seq.last().unwrap() * &r);
        }
        let d = minimal_recurrence(&seq, 3).unwrap();
        assert_eq!(d, UniPoly::new(vec![rat(1, 1), -r]));
    }

    #[test]
    fn fibonacci_like() {
        // s_n = 2 s_{n-1} + 3 s_{n-2}  =>  D = 1 - 2z - 3z^2
        let mut seq = vec![rat(1, 1), rat(1, 1)];
        for n in 2..12 {
            let v = rat(2, 1) * &seq[n - 1] + rat(3, 1) * &seq[n - 2];
            seq.push(v);
        }
        let d = minimal_recurrence(&seq, 4).unwrap();
        assert_eq!(d, UniPoly::new(vec![rat(1, 1), rat(-2, 1), rat(-3, 1)]));
    }

    #[test]
    fn rejects_when_order_exceeded() {
        // strictly order-3 sequence offered with max_order 2
        let mut seq = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        for n in 3..12 {
            let v = seq[n - 1].clone() + seq[n - 2].clone() + seq[n - 3].clone();
            seq.push(v);
        }
        assert_eq!(
            minimal_recurrence(&seq, 2),
            Err(RecurrenceError::NoRecurrence { max_order: 2 })
        );
        assert!(minimal_recurrence(&seq, 3).is_ok());
    }

    #[test]
    fn too_short_is_reported() {
        let seq = vec![rat(1, 1); 4];
        assert_eq!(
            minimal_recurrence(&seq, 2),
            Err(RecurrenceError::TooShort { len: 4, max_order: 2 })
        );
    }

    #[test]
    fn longer_prefix_gives_same_connection() {
        let mut seq = vec![rat(2, 3), rat(-1, 5)];
        for n in 2..20 {
            let v = rat(1, 2) * &seq[n - 1] - rat(1, 3) * &seq[n - 2];
            seq.push(v);
        }
        let d1 = minimal_recurrence(&seq[..9], 4).unwrap();
        let d2 = minimal_recurrence(&seq, 4).unwrap();
        assert_eq!(d1, d2);
    }
}

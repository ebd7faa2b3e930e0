//! Mathieu characteristic values `a_ν(q)` for real, generally fractional,
//! order `ν`.
//!
//! The Floquet solution `y(z) = Σ_m c_{2m} e^{i(ν+2m)z}` of
//! `y'' + (a − 2q cos 2z) y = 0` turns the equation into the symmetric
//! tridiagonal eigenproblem
//!
//! ```text
//! (ν+2m)² c_{2m} + q (c_{2m−2} + c_{2m+2}) = a c_{2m}
//! ```
//!
//! [`char_value_matrix`] solves a truncation of it and follows the branch
//! that starts at `a = ν²` when `q = 0`. [`char_value_series`] is the
//! second-order small-`q` expansion.

use crate::error::{Error, Result};
use crate::tridiagonal::SymTridiagonal;

/// Default distance of `ν²` from 1 below which the series refuses.
pub const SINGULAR_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuCharacteristic {
    pub nu: f64,
    pub q: f64,
    pub a: f64,
    pub method: Method,
    /// Half-width `M` of the Floquet basis `m = −M..M` (matrix method only).
    pub truncation: Option<usize>,
    /// `|ν|` lies within 1e-3 of an odd integer, where low-order
    /// perturbation theory breaks down.
    pub near_odd_integer: bool,
}

/// `a = ν² + q²/(2(ν² − 1))`, accurate to O(q⁴).
pub fn char_value_series(nu: f64, q: f64) -> Result<f64> {
    char_value_series_with_tolerance(nu, q, SINGULAR_TOLERANCE)
}

pub fn char_value_series_with_tolerance(nu: f64, q: f64, tolerance: f64) -> Result<f64> {
    let nu_sq = nu * nu;
    if (nu_sq - 1.0).abs() <= tolerance {
        return Err(Error::SingularOrder { nu_sq, tolerance });
    }
    Ok(nu_sq + q * q / (2.0 * (nu_sq - 1.0)))
}

/// Tuning knobs for [`char_value_matrix_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixOptions {
    /// Initial half-width `M`.
    pub truncation: usize,
    pub max_truncation: usize,
    /// Largest continuation step in `q`.
    pub max_q_step: f64,
    /// Convergence threshold on `|a_M − a_2M|`.
    pub tolerance: f64,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        MatrixOptions {
            truncation: 20,
            max_q_step: 0.5,
            max_truncation: 512,
            tolerance: 1e-10,
        }
    }
}

/// Characteristic value from the truncated Floquet matrix, doubling the
/// truncation starting at `truncation` until converged.
pub fn char_value_matrix(nu: f64, q: f64, truncation: usize) -> Result<MathieuCharacteristic> {
    char_value_matrix_with(
        nu,
        q,
        &MatrixOptions {
            truncation,
            ..MatrixOptions::default()
        },
    )
}

pub fn char_value_matrix_with(nu: f64, q: f64, opts: &MatrixOptions) -> Result<MathieuCharacteristic> {
    if !(nu.is_finite() && q.is_finite()) {
        return Err(Error::Domain(format!("non-finite Mathieu arguments nu = {nu}, q = {q}")));
    }
    if opts.truncation < 10 {
        return Err(Error::Domain(format!(
            "truncation must be >= 10, got {}",
            opts.truncation
        )));
    }
    let mut m = opts.truncation.max((nu.abs() / 2.0).ceil() as usize + 10);
    if m > opts.max_truncation {
        return Err(Error::Numeric(format!(
            "order {nu} needs a truncation above the maximum {}",
            opts.max_truncation
        )));
    }
    let mut a = track_branch(nu, q, m, opts.max_q_step)?;
    loop {
        let doubled = 2 * m;
        if doubled > opts.max_truncation {
            return Err(Error::Numeric(format!(
                "Mathieu matrix did not converge by truncation {} (nu = {nu}, q = {q})",
                opts.max_truncation
            )));
        }
        let next = track_branch(nu, q, doubled, opts.max_q_step)?;
        let change = (next - a).abs();
        m = doubled;
        a = next;
        if change < opts.tolerance * a.abs().max(1.0) {
            break;
        }
    }
    Ok(MathieuCharacteristic {
        nu,
        q,
        a,
        method: Method::Matrix,
        truncation: Some(m),
        near_odd_integer: near_odd_integer(nu),
    })
}

/// `a_ν(q)` by the requested method.
pub fn char_value(nu: f64, q: f64, method: Method) -> Result<MathieuCharacteristic> {
    match method {
        Method::Series => Ok(MathieuCharacteristic {
            nu,
            q,
            a: char_value_series(nu, q)?,
            method,
            truncation: None,
            near_odd_integer: near_odd_integer(nu),
        }),
        Method::Matrix => char_value_matrix_with(nu, q, &MatrixOptions::default()),
    }
}

fn near_odd_integer(nu: f64) -> bool {
    let x = nu.abs();
    let nearest_odd = 2.0 * ((x - 1.0) / 2.0).round() + 1.0;
    (x - nearest_odd).abs() < 1e-3
}

/// Eigenvalue at fixed truncation `m`, continued from `q = 0` in steps of
/// at most `max_step`, halving the step whenever the eigenvector overlap
/// does not single out one branch.
pub(crate) fn track_branch(nu: f64, q: f64, m: usize, max_step: f64) -> Result<f64> {
    let size = 2 * m + 1;
    let mut matrix = SymTridiagonal {
        diag: (0..size)
            .map(|i| {
                let k = nu + 2.0 * (i as f64 - m as f64);
                k * k
            })
            .collect(),
        off: 0.0,
    };
    let nu_sq = nu * nu;
    if q == 0.0 {
        return Ok(nu_sq);
    }
    let mut rank = matrix.diag.iter().filter(|&&d| d < nu_sq).count();
    let mut vector = vec![0.0; size];
    vector[m] = 1.0;
    let mut value = nu_sq;
    let mut q_now = 0.0;
    let full_step = max_step.min(q.abs()).copysign(q);
    let mut step = full_step;
    let min_step = 1e-9 * q.abs().max(1.0);

    while q_now != q {
        let q_next = if (q - q_now).abs() <= step.abs() * (1.0 + 1e-12) {
            q
        } else {
            q_now + step
        };
        matrix.off = q_next;
        let lo = rank.saturating_sub(2);
        let hi = (rank + 2).min(size - 1);
        let mut best = (0.0, rank, value, Vec::new());
        let mut runner_up = 0.0;
        for k in lo..=hi {
            let lam = matrix.eigenvalue(k);
            let v = matrix.eigenvector(lam, &vector);
            let overlap = v.iter().zip(&vector).map(|(a, b)| a * b).sum::<f64>().abs();
            if overlap > best.0 {
                runner_up = best.0;
                best = (overlap, k, lam, v);
            } else if overlap > runner_up {
                runner_up = overlap;
            }
        }
        if best.0 * best.0 >= 0.75 {
            let (_, k, lam, v) = best;
            rank = k;
            value = lam;
            vector = v;
            q_now = q_next;
            step = full_step;
        } else {
            step *= 0.5;
            if step.abs() < min_step {
                return Err(Error::BranchAmbiguity {
                    q: q_next,
                    best: best.0,
                    runner_up,
                });
            }
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Fourth-order term of the small-q expansion,
    /// (5ν² + 7) q⁴ / (32 (ν² − 1)³ (ν² − 4)).
    fn fourth_order(nu: f64) -> f64 {
        let s = nu * nu;
        (5.0 * s + 7.0) / (32.0 * (s - 1.0).powi(3) * (s - 4.0))
    }

    #[test]
    fn series_examples() {
        assert_eq!(char_value_series(0.4, 0.0).unwrap(), 0.16000000000000003);
        assert_relative_eq!(char_value_series(0.4, 0.1).unwrap(), 0.154_047_619_047_619, max_relative = 1e-14);
        assert!(matches!(char_value_series(1.0, 0.1), Err(Error::SingularOrder { .. })));
        assert!(matches!(char_value_series(-1.0 + 1e-8, 0.1), Err(Error::SingularOrder { .. })));
    }

    #[test]
    fn matrix_at_zero_q_is_nu_squared() {
        let c = char_value_matrix(0.4, 0.0, 20).unwrap();
        assert_eq!(c.a, 0.4 * 0.4);
        assert_eq!(c.method, Method::Matrix);
    }

    #[test]
    fn matrix_matches_series_examples() {
        // The gap to the q² series is the q⁴ term, 1.07e-5 here.
        let c = char_value_matrix(0.4, 0.1, 40).unwrap();
        let expected = 0.154_047_619_047_619 + fourth_order(0.4) * 1e-4;
        assert!((c.a - expected).abs() < 1e-7, "{}", c.a);
        let c = char_value_matrix(0.2, 0.05, 40).unwrap();
        assert!((c.a - 0.038_698).abs() < 1e-5, "{}", c.a);
    }

    #[test]
    fn matrix_reproduces_fourth_order_expansion() {
        for nu in [0.2, 0.4, 0.6] {
            let q: f64 = 0.05;
            let a = char_value_matrix(nu, q, 20).unwrap().a;
            let series = char_value_series(nu, q).unwrap();
            let predicted = fourth_order(nu) * q.powi(4);
            // the next term is O(q⁶)
            assert!(((a - series) - predicted).abs() < 50.0 * q.powi(6), "nu={nu}");
        }
    }

    #[test]
    fn known_integer_order_values() {
        // a_0(1) = −0.4551386041 and a_2(1) = 4.3713009827 (even-periodic branches)
        let a0 = char_value_matrix(0.0, 1.0, 20).unwrap().a;
        assert_relative_eq!(a0, -0.455_138_604_107_414, max_relative = 1e-10);
    }

    #[test]
    fn degenerate_start_is_a_branch_ambiguity() {
        // ν = 1: e^{iz} and e^{-iz} are degenerate at q = 0
        let err = char_value_matrix(1.0, 0.3, 20).unwrap_err();
        assert!(matches!(err, Error::BranchAmbiguity { .. }), "{err}");
    }

    #[test]
    fn near_one_is_flagged_but_solved() {
        let c = char_value_matrix(1.0 + 5e-4, 0.1, 20).unwrap();
        assert!(c.near_odd_integer);
        assert!(c.a.is_finite());
        assert!(!char_value_matrix(0.4, 0.1, 20).unwrap().near_odd_integer);
    }

    #[test]
    fn continuation_step_does_not_matter() {
        for (nu, q) in [(0.4, 2.0), (2.6, 3.3), (-7.5, 12.0)] {
            let coarse = char_value_matrix_with(nu, q, &MatrixOptions::default()).unwrap().a;
            let fine = char_value_matrix_with(
                nu,
                q,
                &MatrixOptions {
                    max_q_step: 0.1,
                    ..MatrixOptions::default()
                },
            )
            .unwrap()
            .a;
            assert!((coarse - fine).abs() < 1e-9, "nu={nu} q={q}: {coarse} vs {fine}");
        }
    }

    #[test]
    fn truncation_error_shrinks() {
        let (nu, q) = (0.6, 6.0);
        let exact = char_value_matrix(nu, q, 64).unwrap().a;
        let mut last = f64::INFINITY;
        for m in [3, 4, 5, 6, 8] {
            let err = (track_branch(nu, q, m, 0.5).unwrap() - exact).abs();
            assert!(err < last, "M={m}: {err} !< {last}");
            last = err;
        }
        assert!(last < 1e-10);
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(matches!(char_value_matrix(0.4, 0.1, 5), Err(Error::Domain(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn even_in_nu(nu in -3.7f64..3.7, q in 0.0f64..3.0) {
            prop_assume!(!near_integer(nu));
            let a = char_value_matrix(nu, q, 20).unwrap().a;
            let b = char_value_matrix(-nu, q, 20).unwrap().a;
            prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        }

        #[test]
        fn even_in_q(nu in 0.05f64..0.95, q in 0.0f64..3.0) {
            let a = char_value_matrix(nu, q, 20).unwrap().a;
            let b = char_value_matrix(nu, -q, 20).unwrap().a;
            prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        }
    }

    fn near_integer(x: f64) -> bool {
        (x - x.round()).abs() < 0.05
    }
}

//! Centered finite differences of `|x|^a` at integer points.
//!
//! The fGn autocovariance is a second difference of `|k|^{2H}` and the
//! second-increment covariances are fourth differences. Evaluated directly,
//! both cancel catastrophically once `|k|` is large (the terms are of order
//! `k^a` while the result is of order `k^{a-order}`). Past a cutoff we switch
//! to the binomial expansion
//!
//! ```text
//! Δ^{2p} |l|^a = |l|^a · Σ_{j even, j ≥ 2p} C(a, j) · M_j · l^{-j},   M_j = Σ_k w_k k^j
//! ```
//!
//! where `w_k` are the stencil weights; the moments below `2p` vanish.

const SERIES_CUTOFF: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stencil {
    /// Weights (1, -2, 1) at offsets (-1, 0, 1).
    Second,
    /// Weights (1, -4, 6, -4, 1) at offsets (-2..=2).
    Fourth,
}

impl Stencil {
    fn taps(self) -> &'static [(f64, f64)] {
        match self {
            Stencil::Second => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            Stencil::Fourth => &[
                (-2.0, 1.0),
                (-1.0, -4.0),
                (0.0, 6.0),
                (1.0, -4.0),
                (2.0, 1.0),
            ],
        }
    }

    /// `Σ_k w_k k^j` for even `j ≥ order`.
    fn even_moment(self, j: i32) -> f64 {
        match self {
            Stencil::Second => 2.0,
            Stencil::Fourth => 2f64.powi(j + 1) - 8.0,
        }
    }

    fn order(self) -> i32 {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }
}

/// `Σ_k w_k |l + k|^a` for the given stencil.
pub(crate) fn central_difference(stencil: Stencil, a: f64, l: f64) -> f64 {
    let x = l.abs();
    if x < SERIES_CUTOFF {
        return stencil
            .taps()
            .iter()
            .map(|&(k, w)| w * (x + k).abs().powf(a))
            .sum();
    }

    let inv2 = 1.0 / (x * x);
    // Generalized binomial coefficient C(a, j), advanced two steps at a time.
    let mut binom = 1.0;
    for i in 0..stencil.order() {
        binom *= (a - i as f64) / (i as f64 + 1.0);
    }
    let mut j = stencil.order();
    let mut scale = inv2.powi(j / 2);
    let mut sum = 0.0;
    for _ in 0..60 {
        let term = binom * stencil.even_moment(j) * scale;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        binom *= (a - j as f64) / (j as f64 + 1.0) * (a - j as f64 - 1.0) / (j as f64 + 2.0);
        j += 2;
        scale *= inv2;
    }
    x.powf(a) * sum
}

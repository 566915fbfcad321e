//! Rational coefficients of the potential corrections `V₂, V₄, V₆` and of the
//! generating-function terms `G₃ … G₈`.
//!
//! The kick uses `V_eff = V + τ²V₂ + τ⁴V₄ + τ⁶V₆`. The move uses the type-2
//! generating function `G = qᵃPₐ + τ·½PᵀMP + Σₖ τᵏ Gₖ(q, P)`, whose `Gₖ` carry
//! the kinetic corrections `T₂, T₄, T₆` integrated over one step. Every `𝒟`
//! inside `Gₖ` is taken along the new momentum `P`.

use num_rational::Ratio;

use crate::config::Order;
use crate::real::Real;
use crate::word::Word;

type Q = Ratio<i64>;

/// One `τᵏ` slice: the power and its `(word, coefficient)` terms.
pub type Slice = (u32, Vec<(Word, Q)>);

fn terms(scale: (i64, i64), entries: &[(&str, i64)]) -> Vec<(Word, Q)> {
    let s = Q::new(scale.0, scale.1);
    entries
        .iter()
        .map(|&(w, c)| (w.parse().expect("valid word literal"), s * Q::from_integer(c)))
        .collect()
}

fn v2() -> Slice {
    (2, terms((1, 24), &[("Dg", 1)]))
}

fn v4() -> Slice {
    (4, terms((1, 480), &[("DgDg", 1)]))
}

fn v6() -> Slice {
    (6, terms((1, 161280), &[("DgDgDg", 17), ("Dbar3", -10)]))
}

fn g3() -> Slice {
    (3, terms((-1, 12), &[("DpDp", 1)]))
}

fn g4() -> Slice {
    (4, terms((-1, 24), &[("DpDpDp", 1)]))
}

fn g5() -> Slice {
    (
        5,
        terms(
            (-1, 240),
            &[("DpDpDpDp", 3), ("DgDpDp", 3), ("DpDgDp", -1)],
        ),
    )
}

fn g6() -> Slice {
    (
        6,
        terms(
            (-1, 720),
            &[("DpDpDpDpDp", 2), ("DgDpDpDp", 8), ("DpDgDpDp", -5)],
        ),
    )
}

fn g7() -> Slice {
    (
        7,
        terms(
            (-1, 20160),
            &[
                ("DpDpDpDpDpDp", 10),
                ("DgDpDpDpDp", 10),
                ("DpDgDpDpDp", 90),
                ("DpDpDgDpDp", -75),
                ("DgDgDpDp", 18),
                ("DgDpDgDp", -3),
                ("DpDgDgDp", -14),
                ("DpDpDgDg", 4),
            ],
        ),
    )
}

fn g8() -> Slice {
    (
        8,
        terms(
            (-1, 40320),
            &[
                ("DpDpDpDpDpDpDp", 3),
                ("DgDpDpDpDpDp", -87),
                ("DpDgDpDpDpDp", 231),
                ("DpDpDgDpDpDp", -133),
                ("DgDgDpDpDp", 63),
                ("DpDgDgDpDp", -3),
                ("DpDpDgDgDp", -21),
                ("DpDpDpDgDg", 4),
                ("DgDpDgDpDp", -63),
                ("DpDgDpDgDp", 25),
            ],
        ),
    )
}

/// Slices of `V_eff − V` consumed by the kick at `order`.
pub fn potential_corrections(order: Order) -> Vec<Slice> {
    match order {
        Order::Two => vec![],
        Order::Four => vec![v2()],
        Order::Six => vec![v2(), v4()],
        Order::Eight => vec![v2(), v4(), v6()],
    }
}

/// Slices `G₃ … G_K` of the generating function consumed by the move at
/// `order`, with `K = order` (and none at order 2).
pub fn generating_terms(order: Order) -> Vec<Slice> {
    match order {
        Order::Two => vec![],
        Order::Four => vec![g3(), g4()],
        Order::Six => vec![g3(), g4(), g5(), g6()],
        Order::Eight => vec![g3(), g4(), g5(), g6(), g7(), g8()],
    }
}

/// The coefficient tables of one order converted to floating point.
#[derive(Debug, Clone)]
pub struct EffectiveCoefficients<T> {
    pub order: Order,
    /// `(power of τ, [(word, coefficient)])` for `V₂ₖ`.
    pub v_coeffs: Vec<(u32, Vec<(Word, T)>)>,
    /// `(power of τ, [(word, coefficient)])` for `Gₖ`, `k ≥ 3`.
    pub t_g_coeffs: Vec<(u32, Vec<(Word, T)>)>,
}

impl<T: Real> EffectiveCoefficients<T> {
    pub fn new(order: Order) -> Self {
        let convert = |slices: Vec<Slice>| {
            slices
                .into_iter()
                .map(|(k, ts)| (k, ts.into_iter().map(|(w, c)| (w, T::from_ratio(c))).collect()))
                .collect()
        };
        Self {
            order,
            v_coeffs: convert(potential_corrections(order)),
            t_g_coeffs: convert(generating_terms(order)),
        }
    }
}

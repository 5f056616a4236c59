//! Exponent ranges in which the inequalities are known to hold.
//!
//! Every test is decided on the exact rational exponent.

use super::Direction;
use crate::numerics::Exponent;

fn d_minus(d: usize, k: i64) -> i64 {
    d as i64 - k
}

/// `q` is a natural number or at least `d - offset`.
fn natural_or_at_least(q: &Exponent, d: usize, offset: i64) -> bool {
    q.is_natural() || q.ge_int(d_minus(d, offset))
}

/// Range of `sigma(B^p A^p) ≺_w sigma((BA)^p)` (forward) and of its
/// reverse. Forward: `p <= 1/2`, `p <= 1` when `d <= 2`, or `1/p` natural or
/// at least `d - 1`. Reversed: `p >= 1` with `p` natural or at least `d - 1`.
pub fn split_power_proven(d: usize, p: &Exponent, direction: Direction) -> bool {
    if !p.is_positive() {
        return false;
    }
    if d <= 1 {
        return true;
    }
    match direction {
        Direction::Forward => {
            if !p.le_int(1) {
                return false;
            }
            if p.cmp_ratio(1, 2).is_le() || d == 2 {
                return true;
            }
            p.recip().map(|r| natural_or_at_least(&r, d, 1)).unwrap_or(false)
        }
        Direction::Reversed => p.ge_int(1) && natural_or_at_least(p, d, 1),
    }
}

/// `sigma(A^p B^p)` against `sigma^p(AB)` holds for every `p > 0`, with the
/// direction fixed by `p <= 1`.
pub fn power_product_direction(p: &Exponent) -> Direction {
    if p.le_int(1) {
        Direction::Forward
    } else {
        Direction::Reversed
    }
}

/// Condition for `sigma^p(X) ≺_w sigma(X^p)` (p <= 1) and the reverse
/// (p >= 1), where `X` has nonnegative spectrum.
pub fn similarity_power_proven(d: usize, p: &Exponent) -> bool {
    if !p.is_positive() {
        return false;
    }
    if d <= 1 {
        return true;
    }
    if p.le_int(1) {
        p.recip().map(|r| natural_or_at_least(&r, d, 1)).unwrap_or(false)
    } else {
        natural_or_at_least(p, d, 1)
    }
}

/// The power-quotient kernel is PSD when `alpha` is natural or `alpha >= d - 1`.
pub fn power_quotient_proven(d: usize, alpha: &Exponent) -> bool {
    natural_or_at_least(alpha, d, 1)
}

/// Entrywise `q`-th powers of nonnegative PSD matrices stay PSD when `q` is
/// natural or `q >= d - 2`.
pub fn entrywise_power_proven(d: usize, q: &Exponent) -> bool {
    natural_or_at_least(q, d, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn split_forward() {
        assert!(split_power_proven(5, &e("0.5"), Direction::Forward));
        assert!(split_power_proven(5, &e("1/4"), Direction::Forward));
        assert!(split_power_proven(2, &e("0.95"), Direction::Forward));
        assert!(split_power_proven(3, &e("1"), Direction::Forward));
        assert!(!split_power_proven(3, &e("0.95"), Direction::Forward));
        // 1/p = 2.5 >= d - 1 = 2
        assert!(split_power_proven(3, &e("0.4"), Direction::Forward));
        assert!(!split_power_proven(5, &e("0.6"), Direction::Forward));
        assert!(split_power_proven(5, &e("1/3"), Direction::Forward));
        assert!(!split_power_proven(3, &e("1.5"), Direction::Forward));
    }

    #[test]
    fn split_reversed() {
        assert!(split_power_proven(3, &e("2"), Direction::Reversed));
        assert!(split_power_proven(4, &e("3.5"), Direction::Reversed));
        assert!(!split_power_proven(4, &e("2.5"), Direction::Reversed));
        assert!(!split_power_proven(3, &e("1.15"), Direction::Reversed));
        assert!(split_power_proven(2, &e("1.15"), Direction::Reversed));
        assert!(!split_power_proven(3, &e("0.5"), Direction::Reversed));
    }

    #[test]
    fn similarity_and_kernels() {
        assert!(similarity_power_proven(4, &e("1/2")));
        assert!(similarity_power_proven(4, &e("2/7")));
        assert!(!similarity_power_proven(4, &e("0.4")));
        assert!(similarity_power_proven(4, &e("3")));
        assert!(!similarity_power_proven(4, &e("2.5")));
        assert!(power_quotient_proven(3, &e("2.3")));
        assert!(!power_quotient_proven(3, &e("1.5")));
        assert!(power_quotient_proven(6, &e("0")));
        assert!(entrywise_power_proven(3, &e("1")));
        assert!(!entrywise_power_proven(3, &e("0.5")));
        assert!(entrywise_power_proven(4, &e("2.5")));
        assert_eq!(power_product_direction(&e("1")), Direction::Forward);
        assert_eq!(power_product_direction(&e("1.01")), Direction::Reversed);
    }
}

//! Exact comparisons against `c · n · log2(n)` bounds.

use num_bigint::BigUint;

/// Decides `lhs <= (num/den) · n · log2(n)` exactly for integers.
///
/// Equivalent to `2^(lhs·den) <= n^(num·n)`. A float comparison settles
/// clear cases; near-ties fall back to big integers.
pub fn le_scaled_nlog2n(lhs: i128, num: u64, den: u64, n: u64) -> bool {
    if lhs <= 0 {
        return true;
    }
    if n <= 1 {
        return false;
    }
    let a = lhs as f64 * den as f64;
    let b = num as f64 * n as f64 * (n as f64).log2();
    let margin = 1e-9 * a.max(b);
    if a + margin < b {
        return true;
    }
    if a > b + margin {
        return false;
    }
    let exp_left = (lhs as u128 * den as u128) as u64;
    let left = BigUint::from(1u8) << exp_left;
    let right = BigUint::from(n).pow((num as u128 * n as u128) as u32);
    left <= right
}

/// `edges <= 14/5 · n log2 n + 600 n`.
pub fn edge_bound_holds(edges: u64, n: u64) -> bool {
    le_scaled_nlog2n(5 * edges as i128 - 3000 * n as i128, 14, 1, n)
}

/// `arcs <= 14/5 · n log2 n + 18 n`.
pub fn arc_bound_holds(arcs: u64, n: u64) -> bool {
    le_scaled_nlog2n(5 * arcs as i128 - 90 * n as i128, 14, 1, n)
}

/// `14/5 · n log2 n + extra · n` as a float, for reports.
pub fn bound_value(n: u64, extra: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    2.8 * n as f64 * (n as f64).log2() + (extra * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_powers_of_two() {
        // 14/5 · 8 · 3 = 67.2
        assert!(le_scaled_nlog2n(67, 14, 5, 8));
        assert!(!le_scaled_nlog2n(68, 14, 5, 8));
        // 2 · 4 · 2 = 16 exactly: tie goes through the big-integer path
        assert!(le_scaled_nlog2n(16, 2, 1, 4));
        assert!(!le_scaled_nlog2n(17, 2, 1, 4));
    }

    #[test]
    fn non_power_boundary() {
        // 3 · log2 3 = 4.754887...
        assert!(le_scaled_nlog2n(4, 1, 1, 3));
        assert!(!le_scaled_nlog2n(5, 1, 1, 3));
        assert!(!le_scaled_nlog2n(1, 5, 1, 1));
        assert!(le_scaled_nlog2n(0, 5, 1, 1));
    }
}

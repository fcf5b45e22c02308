//! The Walsh-Paley and Walsh-Kaczmarz systems.
//!
//! Both systems are enumerations of the same character group. With the
//! Rademacher functions `r_k(x) = (-1)^{x_k}` and the binary digits
//! `n = sum n_k 2^k`, the Paley enumeration is
//!
//! ```text
//! w_n(x) = prod_k r_k(x)^{n_k},
//! ```
//!
//! while the Kaczmarz enumeration reverses the digit block below the top
//! bit. Writing `|n|` for the position of the highest set bit,
//!
//! ```text
//! kappa_0 = 1,
//! kappa_n(x) = r_{|n|}(x) * prod_{k=0}^{|n|-1} ( r_{|n|-1-k}(x) )^{n_k}.
//! ```
//!
//! Within every dyadic block `2^k <= n < 2^{k+1}` the two enumerations list
//! the same set of functions; [`kaczmarz_perm`] is the explicit
//! block-preserving bijection `pi` with `kappa_n = w_{pi(n)}`. It amounts to
//! bit-reversing the digits of `n` below the top bit, and equivalently
//! `kappa_n(x) = r_{|n|}(x) * w_{n - 2^{|n|}}(tau_{|n|}(x))` with the
//! coordinate reversal `tau` of [`GroupPoint::tau`]. The three routes
//! (digit product, tau factorization, permutation) are implemented
//! independently and cross-checked in the test suite.

use crate::point::GroupPoint;

/// Which enumeration of the Walsh characters to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Paley,
    Kaczmarz,
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemKind::Paley => write!(f, "paley"),
            SystemKind::Kaczmarz => write!(f, "kaczmarz"),
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paley" | "walsh-paley" | "w" => Ok(SystemKind::Paley),
            "kaczmarz" | "walsh-kaczmarz" | "k" => Ok(SystemKind::Kaczmarz),
            other => Err(format!("unknown system '{other}' (expected 'paley' or 'kaczmarz')")),
        }
    }
}

impl SystemKind {
    /// Evaluates the `n`-th function of this system at `x`.
    pub fn eval(&self, n: usize, x: &GroupPoint) -> f64 {
        match self {
            SystemKind::Paley => walsh_paley(n, x),
            SystemKind::Kaczmarz => kaczmarz(n, x),
        }
    }

    /// The Paley index of this system's `n`-th function.
    pub fn paley_index(&self, n: usize) -> usize {
        match self {
            SystemKind::Paley => n,
            SystemKind::Kaczmarz => kaczmarz_perm(n),
        }
    }
}

/// The Rademacher function `r_k(x) = (-1)^{x_k}`.
pub fn rademacher(k: u32, x: &GroupPoint) -> f64 {
    if x.bit(k) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The Walsh-Paley function `w_n(x)`. Needs `n < 2^resolution` so every
/// digit of `n` addresses a stored coordinate.
pub fn walsh_paley(n: usize, x: &GroupPoint) -> f64 {
    assert!(
        index_fits(n, x.resolution()),
        "w_{n} is not resolvable at resolution {}",
        x.resolution()
    );
    parity_sign((n as u64 & x.bits()).count_ones())
}

/// The order `|n|` of `n >= 1`: the position of the highest set bit, so
/// `2^|n| <= n < 2^{|n|+1}`. The order of 0 is undefined and panics.
pub fn order(n: usize) -> u32 {
    assert!(n >= 1, "the order |0| is undefined");
    usize::BITS - 1 - n.leading_zeros()
}

/// The Walsh-Kaczmarz function `kappa_n(x)`, evaluated from the defining
/// digit product.
pub fn kaczmarz(n: usize, x: &GroupPoint) -> f64 {
    assert!(
        index_fits(n, x.resolution()),
        "kappa_{n} is not resolvable at resolution {}",
        x.resolution()
    );
    if n == 0 {
        return 1.0;
    }
    let t = order(n);
    let mut exponent = x.bit(t);
    for k in 0..t {
        if (n >> k) & 1 == 1 {
            exponent ^= x.bit(t - 1 - k);
        }
    }
    parity_sign(exponent as u32)
}

/// The block-preserving rearrangement `pi` with `kappa_n = w_{pi(n)}`:
/// keep the top bit of `n` and bit-reverse the remaining `|n|` digits.
/// `pi` is an involution and fixes 0, 1, and every `2^k` and `2^k - 1`.
pub fn kaczmarz_perm(n: usize) -> usize {
    if n <= 1 {
        return n;
    }
    let t = order(n);
    let low = n & !(1usize << t);
    let reversed = low.reverse_bits() >> (usize::BITS - t);
    (1usize << t) | reversed
}

fn parity_sign(ones: u32) -> f64 {
    if ones % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn index_fits(n: usize, resolution: u32) -> bool {
    resolution >= usize::BITS || n < (1usize << resolution)
}

// ===== tests

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rademacher_reads_single_coordinates() {
        let x = GroupPoint::new(0b101, 3);
        assert_eq!(rademacher(0, &x), -1.0);
        assert_eq!(rademacher(1, &x), 1.0);
        assert_eq!(rademacher(2, &x), -1.0);
    }

    #[test]
    fn walsh_paley_small_indices() {
        for j in 0..8usize {
            let x = GroupPoint::from_index(j, 3);
            assert_eq!(walsh_paley(0, &x), 1.0);
            // w_3 = r_0 r_1, w_5 = r_0 r_2
            assert_eq!(walsh_paley(3, &x), rademacher(0, &x) * rademacher(1, &x));
            assert_eq!(walsh_paley(5, &x), rademacher(0, &x) * rademacher(2, &x));
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(order(1), 0);
        assert_eq!(order(5), 2);
        for k in 0..60 {
            assert_eq!(order(1usize << k), k);
        }
    }

    #[test]
    #[should_panic(expected = "undefined")]
    fn order_of_zero_panics() {
        let _ = order(0);
    }

    #[test]
    fn kaczmarz_agrees_with_paley_below_four() {
        // The first two blocks are too short to rearrange.
        for n in 0..4usize {
            for j in 0..8usize {
                let x = GroupPoint::from_index(j, 3);
                assert_eq!(kaczmarz(n, &x), walsh_paley(n, &x), "n = {n}, cell {j}");
            }
        }
    }

    #[test]
    fn kaczmarz_five_is_paley_six() {
        for j in 0..8usize {
            let x = GroupPoint::from_index(j, 3);
            assert_eq!(kaczmarz(5, &x), walsh_paley(6, &x));
            assert_eq!(kaczmarz(6, &x), walsh_paley(5, &x));
        }
    }

    #[test]
    fn kaczmarz_is_one_at_the_identity() {
        let zero = GroupPoint::zero(10);
        for n in 0..1024usize {
            assert_eq!(kaczmarz(n, &zero), 1.0);
        }
    }

    #[test]
    fn perm_found_by_exhaustive_matching() {
        // Independent derivation of pi: for each n, find the unique Paley
        // index whose samples match kappa_n everywhere on a rank-6 grid.
        let m = 6u32;
        let cells: Vec<GroupPoint> = (0..1usize << m).map(|j| GroupPoint::from_index(j, m)).collect();
        for n in 0..1usize << m {
            let target: Vec<f64> = cells.iter().map(|x| kaczmarz(n, x)).collect();
            let matches: Vec<usize> = (0..1usize << m)
                .filter(|&w| cells.iter().map(|x| walsh_paley(w, x)).eq(target.iter().copied()))
                .collect();
            assert_eq!(matches, vec![kaczmarz_perm(n)], "n = {n}");
        }
    }

    #[test]
    fn perm_fixed_points_in_the_first_blocks() {
        for n in [0usize, 1, 2, 3, 4, 7] {
            assert_eq!(kaczmarz_perm(n), n);
        }
        assert_eq!(kaczmarz_perm(5), 6);
        assert_eq!(kaczmarz_perm(6), 5);
    }

    #[test]
    fn perm_is_a_block_preserving_involution() {
        for n in 1..(1usize << 12) {
            let p = kaczmarz_perm(n);
            assert_eq!(order(p), order(n), "pi must stay in the block of {n}");
            assert_eq!(kaczmarz_perm(p), n, "pi must be an involution at {n}");
        }
    }

    #[test]
    fn tau_factorization_of_kaczmarz() {
        // kappa_n(x) = r_{|n|}(x) * w_{n - 2^{|n|}}(tau_{|n|}(x)), checked
        // exhaustively on a rank-7 grid.
        let m = 7u32;
        for n in 1..1usize << m {
            let t = order(n);
            let rest = n - (1usize << t);
            for j in 0..1usize << m {
                let x = GroupPoint::from_index(j, m);
                let direct = kaczmarz(n, &x);
                let factored = rademacher(t, &x) * walsh_paley(rest, &x.tau(t));
                assert_eq!(direct, factored, "n = {n}, cell {j}");
            }
        }
    }

    proptest! {
        #[test]
        fn walsh_paley_is_a_character(n in 0usize..1 << 16, a in any::<u64>(), b in any::<u64>()) {
            let res = 16;
            let mask = (1u64 << res) - 1;
            let x = GroupPoint::new(a & mask, res);
            let y = GroupPoint::new(b & mask, res);
            prop_assert_eq!(
                walsh_paley(n, &x.xor_add(&y)),
                walsh_paley(n, &x) * walsh_paley(n, &y)
            );
        }

        #[test]
        fn rademacher_is_a_character(k in 0u32..16, a in any::<u64>(), b in any::<u64>()) {
            let res = 16;
            let mask = (1u64 << res) - 1;
            let x = GroupPoint::new(a & mask, res);
            let y = GroupPoint::new(b & mask, res);
            prop_assert_eq!(
                rademacher(k, &x.xor_add(&y)),
                rademacher(k, &x) * rademacher(k, &y)
            );
        }

        #[test]
        fn kaczmarz_matches_its_permuted_paley_index(n in 0usize..1 << 14, bits in any::<u64>()) {
            let res = 14;
            let x = GroupPoint::new(bits & ((1u64 << res) - 1), res);
            prop_assert_eq!(kaczmarz(n, &x), walsh_paley(kaczmarz_perm(n), &x));
        }
    }
}

//! Square-factor extraction for radicands.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_prime::nt_funcs::{factorize64, primes};
use num_traits::{One, ToPrimitive, Zero};

/// Trial-division bound applied before falling back to 64-bit factorization.
const TRIAL_LIMIT: u64 = 1 << 12;

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes(TRIAL_LIMIT))
}

/// Splits `n = root^2 * core`.
///
/// Inputs below 2^64 are factored completely, so `core` is squarefree.
/// Wider inputs are trial-divided by primes below 2^12; what remains is
/// factored if it fits in 64 bits, absorbed into `root` if it is a perfect
/// square, and otherwise kept in `core` as is.
pub fn square_decompose(n: &BigUint) -> (BigUint, BigUint) {
    let mut root = BigUint::one();
    let mut core = BigUint::one();
    if n <= &BigUint::one() {
        return (root, n.clone());
    }
    let mut rest = n.clone();
    if rest.to_u64().is_none() {
        for &p in small_primes() {
            let p = BigUint::from(p);
            let mut e = 0u32;
            loop {
                let (q, r) = rest.div_rem(&p);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            root *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= &p;
            }
        }
    }
    if let Some(m) = rest.to_u64() {
        for (p, e) in factorize64(m) {
            root *= BigUint::from(p).pow((e / 2) as u32);
            if e % 2 == 1 {
                core *= p;
            }
        }
    } else {
        let s = rest.sqrt();
        if &s * &s == rest {
            root *= s;
        } else {
            core *= rest;
        }
    }
    (root, core)
}

/// Exact perfect-square test.
pub fn is_square(n: &BigUint) -> bool {
    let s = n.sqrt();
    &s * &s == *n
}

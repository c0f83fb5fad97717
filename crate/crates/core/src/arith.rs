//! Scalar arithmetic modulo a prime power `p^N`.
//!
//! Every coefficient in this crate is a `u64` interpreted as an element of
//! `Z/p^N`. Intermediate products are computed in `u128`, so arithmetic never
//! overflows for any supported modulus (construction enforces `p^N < 2^62`).

use crate::error::{Error, Result};

/// `(a + b) mod m`.
#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

/// `(a - b) mod m`.
#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + (m - b % m) as u128;
    (s % m as u128) as u64
}

/// `(a * b) mod m`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `(-a) mod m`.
#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a % m == 0 {
        0
    } else {
        m - a % m
    }
}

/// `b^e mod m` by square-and-multiply.
pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// `p^k` as a `u64`, or an error if it does not fit comfortably (products of
/// two reduced values must fit in `u128`, so we cap the modulus at `2^62`).
pub fn p_pow(p: u64, k: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p).ok_or_else(|| {
            Error::PrecisionExhausted(format!("{p}^{k} does not fit in u64"))
        })?;
        if acc >= (1u64 << 62) {
            return Err(Error::PrecisionExhausted(format!(
                "{p}^{k} exceeds the 2^62 modulus cap"
            )));
        }
    }
    Ok(acc)
}

/// Greatest common divisor; `gcd(0, b) = b`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// p-adic valuation of `x` as a residue (None for `x == 0`, which is
/// indistinguishable from valuation >= N at working precision).
pub fn val_p(mut x: u64, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// p-adic valuation of an exact integer (None for 0).
pub fn val_p_i128(mut x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    if x < 0 {
        x = -x;
    }
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// Inverse of `x` modulo `m = p^N`. Fails on zero or on multiples of `p`.
pub fn inv_mod_ppow(x: u64, p: u64, m: u64) -> Result<u64> {
    let x = x % m;
    if x == 0 {
        return Err(Error::ZeroInverse);
    }
    if x % p == 0 {
        return Err(Error::NonUnitInverse {
            val: val_p(x, p).unwrap_or(0) as u64,
        });
    }
    // Extended Euclid on (x, m); gcd is 1 because x is a p-unit and m = p^N.
    let (mut r0, mut r1) = (m as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "x must be coprime to p^N");
    let mut t = t0 % m as i128;
    if t < 0 {
        t += m as i128;
    }
    Ok(t as u64)
}

/// Teichmüller lift of `a mod p` to `Z/p^N`: the unique `(p-1)q`-th root of
/// unity type representative fixed by `t -> t^p` (or 0). Computed by iterating
/// the Frobenius on the naive lift; each step gains at least one p-adic digit.
pub fn teich_scalar(a: u64, p: u64, m: u64) -> u64 {
    let mut t = a % m;
    // N+2 iterations always reach the fixed point for m = p^N <= 2^62.
    for _ in 0..66 {
        let next = pow_mod(t, p, m);
        if next == t {
            break;
        }
        t = next;
    }
    debug_assert_eq!(pow_mod(t, p, m), t);
    t
}

/// Exact division `x / p^k` of a residue modulo `p^N` that is known to be
/// divisible by `p^k`. The result is well-defined modulo `p^{N-k}` and is
/// returned as that smaller residue (top digits zero).
pub fn exact_div_p(x: u64, p: u64, k: u32) -> Result<u64> {
    let mut x = x;
    for _ in 0..k {
        if x % p != 0 {
            return Err(Error::InternalInconsistency(format!(
                "exact division by {p}^{k} of a residue not divisible by it"
            )));
        }
        x /= p;
    }
    Ok(x)
}

/// Smallest primitive root modulo an odd prime `p` (brute force; `p` is tiny).
pub fn smallest_primitive_root(p: u64) -> u64 {
    'cand: for g in 2..p {
        let mut seen = 1u64;
        let mut t = g;
        // g is primitive iff its order is p-1: check g^((p-1)/q) != 1 for
        // prime divisors q of p-1 by direct order computation (p is small).
        while t != 1 {
            t = t * g % p;
            seen += 1;
            if seen > p {
                continue 'cand;
            }
        }
        if seen == p - 1 {
            return g;
        }
    }
    unreachable!("every odd prime has a primitive root")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = 3u64.pow(10);
        for x in [1u64, 2, 4, 5, 7, 100, 59048] {
            let y = inv_mod_ppow(x, 3, m).unwrap();
            assert_eq!(mul_mod(x, y, m), 1);
        }
        assert_eq!(inv_mod_ppow(0, 3, m), Err(Error::ZeroInverse));
        assert!(matches!(
            inv_mod_ppow(9, 3, m),
            Err(Error::NonUnitInverse { .. })
        ));
    }

    #[test]
    fn teichmuller_fixed_points() {
        // mod 3^N the nontrivial Teichmüller representative of 2 is -1.
        let m = 3u64.pow(10);
        assert_eq!(teich_scalar(2, 3, m), m - 1);
        assert_eq!(teich_scalar(1, 3, m), 1);
        assert_eq!(teich_scalar(0, 3, m), 0);
        // mod 5^6: the lift of 2 must satisfy t^4 = 1, t = 2 mod 5.
        let m5 = 5u64.pow(6);
        let t = teich_scalar(2, 5, m5);
        assert_eq!(t % 5, 2);
        assert_eq!(pow_mod(t, 4, m5), 1);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(smallest_primitive_root(3), 2);
        assert_eq!(smallest_primitive_root(5), 2);
        assert_eq!(smallest_primitive_root(7), 3);
        assert_eq!(smallest_primitive_root(11), 2);
    }

    #[test]
    fn valuations() {
        assert_eq!(val_p(45, 3), Some(2));
        assert_eq!(val_p(0, 3), None);
        assert_eq!(val_p_i128(-54, 3), Some(3));
        assert_eq!(val_p_i128(0, 3), None);
    }
}

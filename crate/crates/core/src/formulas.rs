//! Closed-form conductor evaluators on exact integer data.
//!
//! Every function here is pure integer arithmetic: the inputs are exponents
//! (p-adic integers represented exactly as `i128` scalars, or length-`f`
//! coefficient vectors over the group ring `Z_p[Φ]` of the unramified part)
//! and the outputs are conductor exponents of Kummer extensions
//! `F(x^{1/p^n})/F`.  No field arithmetic happens in this module; the
//! verification layer pairs these values against the norm-group conductor
//! computed from first principles in [`crate::conductor`].
//!
//! Exponents act on classes modulo `p^n`-th powers, so an exponent divisible
//! by `p^n` (or `p^k` for the root-of-unity generator of order `p^k`) is the
//! zero exponent; inputs are canonicalised by clamping such exponents to
//! exactly `0` before any valuation is taken.  Without the clamp the literal
//! case analysis produces wrong values on non-canonical representatives
//! (e.g. a pure `p^n`-th power would get a positive conductor).

use crate::error::{Error, Result};

/// p-adic valuation of an exact integer; `None` encodes `v_p(0) = +∞`.
pub fn vp(x: i128, p: u64) -> Option<u32> {
    assert!(p >= 2);
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut x = x;
    let mut v = 0u32;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// Element of the group ring `Z_p[Φ]`, `Φ = Gal(E/Q_p)` cyclic of order `f`
/// generated by the Frobenius `φ`.  Coefficients are exact integers:
/// `coeffs[i]` is the coefficient of `φ^i`.
///
/// Only the operations the conductor formulas consume are provided: content
/// valuation, multiplication by the norm element `N_Φ = Σ_i φ^i`, application
/// of `φ − 1`, and scalar combinations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiElt {
    pub coeffs: Vec<i128>,
}

impl PhiElt {
    /// The zero element of `Z_p[Φ]` with `Φ` of order `f`.
    pub fn zero(f: usize) -> Self {
        assert!(f >= 1);
        PhiElt { coeffs: vec![0; f] }
    }

    /// The scalar `c` (coefficient of `φ^0`).
    pub fn scalar(c: i128, f: usize) -> Self {
        assert!(f >= 1);
        let mut coeffs = vec![0; f];
        coeffs[0] = c;
        PhiElt { coeffs }
    }

    /// The norm element `N_Φ = Σ_{i<f} φ^i`.
    pub fn norm_elt(f: usize) -> Self {
        assert!(f >= 1);
        PhiElt { coeffs: vec![1; f] }
    }

    pub fn f(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Content valuation `ν(x)`: the largest `ν` with `x ∈ p^ν Z_p[Φ]`,
    /// i.e. the minimum of the coefficient valuations.  `None` is `+∞`.
    pub fn content(&self, p: u64) -> Option<u32> {
        self.coeffs.iter().filter_map(|&c| vp(c, p)).min()
    }

    /// `(φ − 1)·x`, with `φ` acting by the cyclic coefficient shift
    /// (`φ·φ^i = φ^{i+1}`, `φ^f = 1`).
    pub fn phi_minus_one(&self) -> Self {
        let f = self.f();
        let mut coeffs = vec![0i128; f];
        for i in 0..f {
            coeffs[(i + 1) % f] += self.coeffs[i];
            coeffs[i] -= self.coeffs[i];
        }
        PhiElt { coeffs }
    }

    /// `N_Φ·x`.  In the group ring this is the constant vector whose entries
    /// all equal the coefficient sum of `x`.
    pub fn norm_mul(&self) -> Self {
        let s: i128 = self.coeffs.iter().sum();
        PhiElt { coeffs: vec![s; self.f()] }
    }

    /// `a·x + b·y` with scalar `a, b`.
    pub fn lin(a: i128, x: &Self, b: i128, y: &Self) -> Self {
        assert_eq!(x.f(), y.f());
        PhiElt {
            coeffs: (0..x.f()).map(|i| a * x.coeffs[i] + b * y.coeffs[i]).collect(),
        }
    }

    /// Clamp to zero when the content valuation reaches `bound` (the exponent
    /// then acts trivially on classes modulo `p^bound`-th powers).
    fn clamped(&self, p: u64, bound: u32) -> Self {
        match self.content(p) {
            Some(v) if v < bound => self.clone(),
            _ => PhiElt::zero(self.f()),
        }
    }
}

/// Clamp a scalar exponent to zero once `v_p` reaches `bound`.
fn clamp_scalar(x: i128, p: u64, bound: u32) -> i128 {
    match vp(x, p) {
        Some(v) if v < bound => x,
        _ => 0,
    }
}

fn p_pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("conductor value overflows u64")
}

/// Conductor exponent `f_m(x) = p^{m−1}·t` for the metacyclic eigenvalue
/// classes `r ≢ 0, 1 mod p−1`, where `t` is the smallest positive integer
/// with `t ≡ 2−r mod p−1`.  The value is independent of the nontrivial
/// class `x` itself.
///
/// Errors with `BadResidueClass` for `r ≡ 0, 1 mod p−1` (those classes have
/// genuinely element-dependent conductors; see [`f_condr0`], [`f_condr1`]).
pub fn f_metcond(p: u64, m: u32, r: u64) -> Result<u64> {
    assert!(p >= 3 && p % 2 == 1, "p must be an odd prime");
    assert!(m >= 1);
    let rr = r % (p - 1);
    if rr == 0 || rr == 1 {
        return Err(Error::BadResidueClass(format!(
            "r = {r} ≡ {rr} mod {} is outside the metacyclic range",
            p - 1
        )));
    }
    // smallest positive t ≡ 2 − r mod p−1; lands in 1..=p−1
    let t = (2 + (p - 1) - rr) % (p - 1);
    let t = if t == 0 { p - 1 } else { t };
    Ok(p_pow_u64(p, m - 1) * t)
}

/// Exponent data for a class `t_r^α · v^β · x_r^δ` in the `r ≡ 0 mod p−1`
/// eigenspace, together with the parameters `(p, n, f, k)` of the ambient
/// field (`k` maximal with `r ≡ 0 mod p^{k−1}`, `1 ≤ k ≤ n`).
///
/// Hypotheses checked on construction:
/// - `β ∈ p^{n−k} Z_p[Φ]`;
/// - `δ = 0`, or `ν(δ) ≤ n−k−1` and `(φ−1)δ ≠ 0`.
#[derive(Debug, Clone)]
pub struct FormulaInputR0 {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub alpha: i128,
    pub beta: PhiElt,
    pub delta: PhiElt,
}

impl FormulaInputR0 {
    pub fn new(p: u64, n: u32, k: u32, alpha: i128, beta: PhiElt, delta: PhiElt) -> Result<Self> {
        assert!(p >= 3 && n >= 1 && (1..=n).contains(&k));
        assert_eq!(beta.f(), delta.f());
        // Canonical representatives first: exponents of order-p^n classes.
        let alpha = clamp_scalar(alpha, p, n);
        let beta = beta.clamped(p, n);
        let delta = delta.clamped(p, n);
        if let Some(v) = beta.content(p) {
            if v < n - k {
                return Err(Error::HypothesisViolated(format!(
                    "β has content valuation {v} < n−k = {}",
                    n - k
                )));
            }
        }
        if !delta.is_zero() {
            let v = delta.content(p).expect("nonzero δ has finite content");
            if k >= n || v > n - k - 1 {
                return Err(Error::HypothesisViolated(format!(
                    "δ ≠ 0 needs ν(δ) ≤ n−k−1, got ν = {v} with n−k−1 = {}",
                    n as i64 - k as i64 - 1
                )));
            }
            if delta.phi_minus_one().is_zero() {
                return Err(Error::HypothesisViolated(
                    "δ ≠ 0 needs (φ−1)δ ≠ 0 (impossible for f = 1)".into(),
                ));
            }
        }
        Ok(FormulaInputR0 { p, n, k, alpha, beta, delta })
    }
}

/// Conductor exponent of `t_r^α · v^β · x_r^δ` for `r ≡ 0 mod p−1`.
///
/// With `i = n − min{ν(α), ν(β)+1, ν(δ)+1}` and `j = n − ν(pβ − N_Φ α)`:
///
/// - `p^{i−1}(p+1)` if `i = n`, or `δ = 0` and `j < i`;
/// - `2p^i`         if `i ≤ n−1` and either `δ ≠ 0` or `j = i`;
/// - `0`            otherwise.
///
/// The first case condition is stated in its source with `i = 0` in place of
/// `i = n`; that reading makes the value `p^{−1}(p+1)` non-integral and
/// contradicts the unit-exponent anchor `p^{n−1}(p+1)`, so `i = n` is
/// evaluated here and the discrepancy is surfaced in verification reports.
pub fn f_condr0(input: &FormulaInputR0) -> Result<u64> {
    let FormulaInputR0 { p, n, alpha, beta, delta, .. } = input;
    let (p, n) = (*p, *n);
    if *alpha == 0 && beta.is_zero() && delta.is_zero() {
        return Ok(0); // trivial class
    }
    // i = n − min{ν(α), ν(β)+1, ν(δ)+1}; inputs are canonical, so the min is
    // finite and ≤ n (it equals n exactly when only β survives, at content
    // n−1, which lands in the 2p^0 case below).
    let cand = [
        vp(*alpha, p),
        beta.content(p).map(|v| v + 1),
        delta.content(p).map(|v| v + 1),
    ];
    let m = cand.iter().flatten().min().copied().expect("nontrivial class");
    assert!(m <= n, "canonical exponent data keeps the level index in range");
    let i = n - m;
    // j = n − ν(pβ − N_Φ α), as an i64 with None (ν = ∞) mapping below any i.
    let discrep = PhiElt::lin(p as i128, beta, -alpha, &PhiElt::norm_elt(beta.f()));
    let j: Option<i64> = discrep.content(p).map(|v| n as i64 - v as i64);
    let j_lt_i = j.map_or(true, |j| j < i as i64);
    let j_eq_i = j == Some(i as i64);
    if i == n || (delta.is_zero() && j_lt_i) {
        // i = 0 cannot reach this branch: it forces α = δ = 0 and
        // ν(β) = n−1, whence j = n − ν(pβ) = 0 = i, not j < i.
        assert!(i >= 1, "first conductor case needs a positive level index");
        Ok(p_pow_u64(p, i - 1) * (p + 1))
    } else if i <= n - 1 && (!delta.is_zero() || j_eq_i) {
        Ok(2 * p_pow_u64(p, i))
    } else {
        Ok(0)
    }
}

/// Exponent data for a class `x_r^α · z_r^β · κ_r^δ` in the `r ≡ 1 mod p−1`
/// eigenspace (`k` maximal with `r ≡ 1 mod p^{k−1}`, `1 ≤ k ≤ n`; `κ_r` has
/// order `p^k`).
///
/// Hypothesis checked on construction: `(φ−1)β ≠ 0` whenever `β ≠ 0` (at
/// `f = 1` this forces `β = 0`).
#[derive(Debug, Clone)]
pub struct FormulaInputR1 {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub alpha: i128,
    pub beta: PhiElt,
    pub delta: i128,
}

impl FormulaInputR1 {
    pub fn new(p: u64, n: u32, k: u32, alpha: i128, beta: PhiElt, delta: i128) -> Result<Self> {
        assert!(p >= 3 && n >= 1 && (1..=n).contains(&k));
        let alpha = clamp_scalar(alpha, p, n);
        let beta = beta.clamped(p, n);
        // κ_r has exact order p^k, so its exponent is a class mod p^k.
        let delta = clamp_scalar(delta, p, k);
        if !beta.is_zero() && beta.phi_minus_one().is_zero() {
            return Err(Error::HypothesisViolated(
                "β ≠ 0 needs (φ−1)β ≠ 0 (impossible for f = 1)".into(),
            ));
        }
        Ok(FormulaInputR1 { p, n, k, alpha, beta, delta })
    }
}

/// Conductor exponent of `x_r^α · z_r^β · κ_r^δ` for `r ≡ 1 mod p−1`.
///
/// With `i = k − ν(δ)` and `j = n − min{ν(β), ν(α)+k}`:
///
/// - `p^{n−1}(i(p−1)+1)` if `i ≥ 1`;
/// - `p^j`               if `i ≤ 0` and `j ≥ 1`;
/// - `0`                 otherwise.
pub fn f_condr1(input: &FormulaInputR1) -> Result<u64> {
    let FormulaInputR1 { p, n, k, alpha, beta, delta } = input;
    let (p, n, k) = (*p, *n, *k);
    // i = k − ν(δ); canonical δ is either 0 (i = −∞) or has ν(δ) < k (i ≥ 1).
    if let Some(v) = vp(*delta, p) {
        assert!(v < k, "canonical nonzero κ_r-exponent has valuation < k");
        let i = k - v;
        return Ok(p_pow_u64(p, n - 1) * (u64::from(i) * (p - 1) + 1));
    }
    // i ≤ 0 branch: j = n − min{ν(β), ν(α)+k}.
    let m = [beta.content(p), vp(*alpha, p).map(|v| v + k)]
        .iter()
        .flatten()
        .min()
        .copied();
    match m {
        Some(m) if m < n => Ok(p_pow_u64(p, n - m)),
        _ => Ok(0),
    }
}

/// Conductor exponent of `x` in the `r ≡ 0` eigenspace from its pairing
/// profile against the two distinguished generators of the complementary
/// eigenspace: `i` is the symbol order of `(x, y_1)` and `j` that of
/// `(x, w_1)` (orders as exponents of `p`).
///
/// - `p^n + p^{n−1}`     if `i = n`;
/// - `2p^i`              if `1 ≤ i ≤ n−1` and `j ≤ i+1`;
/// - `p^{j−1} + p^{j−2}` if `2 ≤ j ≤ n` and `i+2 ≤ j`.
///
/// Combinations outside these cases (`i = 0` with `j ≤ 1`) are not assigned
/// a value by the case analysis; they return `UncoveredCase` explicitly
/// rather than a silent default, so an oracle disagreement cannot hide here.
pub fn f_galcondr0(i: u32, j: u32, n: u32, p: u64) -> Result<u64> {
    assert!(n >= 1 && i <= n && j <= n);
    if i == n {
        Ok(p_pow_u64(p, n) + p_pow_u64(p, n - 1))
    } else if (1..n).contains(&i) && j <= i + 1 {
        Ok(2 * p_pow_u64(p, i))
    } else if (2..=n).contains(&j) && j >= i + 2 {
        Ok(p_pow_u64(p, j - 1) + p_pow_u64(p, j - 2))
    } else {
        Err(Error::UncoveredCase(format!(
            "pairing profile i = {i}, j = {j} (n = {n}) has no assigned conductor case"
        )))
    }
}

/// Conductor exponent of `x` in the `r ≡ 1` eigenspace from its pairing
/// profile: `i` is the symbol order of `(x, u_0)` and `j` that of `(x, v)`.
///
/// - `p^{n−1}(j(p−1)+1)` if `j ≥ 1`;
/// - `p^i`               if `j = 0` and `i ≥ 1`;
/// - `0`                 if `i = j = 0` (x pairs trivially against both
///   generators, hence is a `p^n`-th power and the extension is trivial).
pub fn f_galcondr1(i: u32, j: u32, n: u32, p: u64) -> Result<u64> {
    assert!(n >= 1 && i <= n && j <= n);
    if j >= 1 {
        Ok(p_pow_u64(p, n - 1) * (u64::from(j) * (p - 1) + 1))
    } else if i >= 1 {
        Ok(p_pow_u64(p, i))
    } else {
        Ok(0)
    }
}

/// Congruence every conductor exponent in the `r`-eigenspace must satisfy:
/// `f = 0` or `f ≡ 2−r mod p−1` (that is, `s+1` for `s = 1−r`).
pub fn condmod_check(f_val: u64, r: u64, p: u64) -> bool {
    assert!(p >= 3);
    if f_val == 0 {
        return true;
    }
    let want = (2 + (p - 1) - r % (p - 1)) % (p - 1);
    f_val % (p - 1) == want
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc(c: i128) -> PhiElt {
        PhiElt::scalar(c, 1)
    }

    fn r0(p: u64, n: u32, k: u32, a: i128, b: i128, d: i128) -> u64 {
        f_condr0(&FormulaInputR0::new(p, n, k, a, sc(b), sc(d)).unwrap()).unwrap()
    }

    fn r1(p: u64, n: u32, k: u32, a: i128, b: i128, d: i128) -> u64 {
        f_condr1(&FormulaInputR1::new(p, n, k, a, sc(b), d).unwrap()).unwrap()
    }

    #[test]
    fn metcond_anchor_values() {
        assert_eq!(f_metcond(5, 1, 2).unwrap(), 4);
        assert_eq!(f_metcond(5, 1, 3).unwrap(), 3);
        assert_eq!(f_metcond(5, 2, 2).unwrap(), 20);
        assert_eq!(f_metcond(7, 2, 4).unwrap(), 28);
        assert!(matches!(f_metcond(5, 1, 4), Err(Error::BadResidueClass(_))));
        assert!(matches!(f_metcond(5, 1, 5), Err(Error::BadResidueClass(_))));
        assert!(matches!(f_metcond(3, 1, 2), Err(Error::BadResidueClass(_))));
    }

    #[test]
    fn metcond_depth_scaling() {
        for p in [5u64, 7, 11] {
            for r in 2..p - 1 {
                if r % (p - 1) == 1 {
                    continue;
                }
                for m in 2..=3u32 {
                    assert_eq!(
                        f_metcond(p, m, r).unwrap(),
                        p * f_metcond(p, m - 1, r).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn condr0_anchor_values() {
        // unit exponent on the prime-power generator: i = n branch
        assert_eq!(r0(3, 1, 1, 1, 0, 0), 4);
        assert_eq!(r0(3, 2, 2, 1, 0, 0), 12);
        // pure v: i = j = n−1 branch, 2p^{n−1}
        assert_eq!(r0(3, 1, 1, 0, 1, 0), 2);
        assert_eq!(r0(3, 2, 2, 0, 1, 0), 6);
        assert_eq!(r0(5, 2, 2, 0, 1, 0), 10);
        // the exceptional cancelling pair t_r^p · v^{N_Φ}: p^{n−2}(p+1)
        assert_eq!(r0(3, 2, 2, 3, 1, 0), 4);
        assert_eq!(r0(5, 2, 2, 5, 1, 0), 6);
        // deeper t_r powers: 2p^{n−ν(α)}
        assert_eq!(r0(3, 2, 2, 3, 0, 0), 6);
        // trivial class and p^n-th powers
        assert_eq!(r0(3, 2, 2, 0, 0, 0), 0);
        assert_eq!(r0(3, 2, 2, 9, 0, 0), 0);
        assert_eq!(r0(3, 2, 2, 9, 9, 0), 0);
    }

    #[test]
    fn condr0_cancellation_needs_canonical_inputs() {
        // α = p^n (trivial) with ν(β) = n−1: the class is v^{p^{n−1}}, so the
        // conductor is 2, even though unclamped exponents would cancel in
        // pβ − N_Φα and misreport 0.
        assert_eq!(r0(3, 2, 2, 9, 3, 0), 2);
    }

    #[test]
    fn condr0_delta_branch_formula_level() {
        // f = 2 inputs with δ ≠ 0 exercise the 2p^i branch via ν(δ)+1.
        let p = 3;
        let (n, k) = (2, 1);
        let delta = PhiElt { coeffs: vec![1, 0] };
        let input =
            FormulaInputR0::new(p, n, k, 0, PhiElt::zero(2), delta).unwrap();
        assert_eq!(f_condr0(&input).unwrap(), 2 * 3); // i = n − 1 = 1
        // δ with (φ−1)δ = 0 must be rejected.
        let bad = PhiElt { coeffs: vec![1, 1] };
        assert!(matches!(
            FormulaInputR0::new(p, n, k, 0, PhiElt::zero(2), bad),
            Err(Error::HypothesisViolated(_))
        ));
        // at f = 1 a nonzero δ can never satisfy (φ−1)δ ≠ 0.
        assert!(matches!(
            FormulaInputR0::new(3, 2, 1, 0, sc(0), sc(1)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn condr0_beta_content_hypothesis() {
        // k = 1, n = 2 requires β ∈ p Z_p[Φ].
        assert!(matches!(
            FormulaInputR0::new(3, 2, 1, 0, sc(1), sc(0)),
            Err(Error::HypothesisViolated(_))
        ));
        assert_eq!(r0(3, 2, 1, 0, 3, 0), 2); // ν(β) = 1 = n−1 → 2p^0
    }

    #[test]
    fn condr1_anchor_values() {
        // κ_r itself at k = 1 (primitive p-th root): p^{n−1}·p = f
        assert_eq!(r1(3, 1, 1, 0, 0, 1), 3);
        // primitive p^2-th root at n = k = 2: i = 2 → p(2(p−1)+1) = 15
        assert_eq!(r1(3, 2, 2, 0, 0, 1), 15);
        assert_eq!(r1(3, 2, 2, 0, 0, 3), 9); // ν(δ) = 1 → i = 1
        // pure x_r at r with k = 1, n = 2: j = n−k = 1 → p
        assert_eq!(r1(3, 2, 1, 1, 0, 0), 3);
        // x_r at k = n: j = n−k = 0 → conductor 0
        assert_eq!(r1(3, 2, 2, 1, 0, 0), 0);
        assert_eq!(r1(3, 1, 1, 1, 0, 0), 0);
        // trivial class
        assert_eq!(r1(3, 2, 2, 0, 0, 0), 0);
        assert_eq!(r1(3, 2, 1, 9, 0, 9), 0);
    }

    #[test]
    fn condr1_beta_branch_formula_level() {
        // f = 2: z_r^β with (φ−1)β ≠ 0 → p^{n−ν(β)}.
        let beta = PhiElt { coeffs: vec![1, 0] };
        let input = FormulaInputR1::new(3, 2, 1, 0, beta, 0).unwrap();
        assert_eq!(f_condr1(&input).unwrap(), 9); // j = n − 0 = 2
        let bad = PhiElt { coeffs: vec![2, 2] };
        assert!(matches!(
            FormulaInputR1::new(3, 2, 1, 0, bad, 0),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            FormulaInputR1::new(3, 2, 1, 0, sc(1), 0),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn galcond_tables() {
        assert_eq!(f_galcondr0(1, 0, 1, 3).unwrap(), 4); // i = n
        assert_eq!(f_galcondr0(2, 1, 2, 3).unwrap(), 12);
        assert_eq!(f_galcondr0(1, 2, 2, 3).unwrap(), 6); // 2p^i
        assert_eq!(f_galcondr0(0, 2, 2, 3).unwrap(), 4); // p^{j−1}+p^{j−2}
        assert!(matches!(f_galcondr0(0, 1, 2, 3), Err(Error::UncoveredCase(_))));
        assert!(matches!(f_galcondr0(0, 0, 1, 3), Err(Error::UncoveredCase(_))));

        assert_eq!(f_galcondr1(0, 1, 1, 3).unwrap(), 3);
        assert_eq!(f_galcondr1(0, 2, 2, 3).unwrap(), 15);
        assert_eq!(f_galcondr1(1, 0, 1, 5).unwrap(), 5);
        assert_eq!(f_galcondr1(0, 0, 2, 3).unwrap(), 0);
    }

    #[test]
    fn condmod_examples() {
        assert!(condmod_check(4, 0, 3));
        assert!(condmod_check(3, 1, 3));
        assert!(!condmod_check(5, 2, 5));
        assert!(condmod_check(0, 2, 5));
        assert!(condmod_check(4, 2, 5));
    }

    proptest! {
        /// Every conductor the r ≡ 0 formula emits satisfies the congruence
        /// class constraint for its eigenvalue.
        #[test]
        fn condr0_respects_condmod(
            n in 1u32..=3,
            a_unit in 1i128..50,
            va in 0u32..5,
            b_unit in 1i128..50,
            vb in 0u32..5,
        ) {
            let p = 3u64;
            let k = n;
            let alpha = a_unit * (p as i128).pow(va);
            let beta = b_unit * (p as i128).pow(vb);
            let f = r0(p, n, k, alpha, beta, 0);
            prop_assert!(condmod_check(f, 0, p));
        }

        /// Same for the r ≡ 1 formula, over both k values at n = 2.
        #[test]
        fn condr1_respects_condmod(
            k_is_n in proptest::bool::ANY,
            a_unit in 1i128..50,
            va in 0u32..5,
            d_unit in 1i128..50,
            vd in 0u32..4,
        ) {
            let (p, n) = (3u64, 2u32);
            let k = if k_is_n { n } else { 1 };
            let alpha = a_unit * (p as i128).pow(va);
            let delta = d_unit * (p as i128).pow(vd);
            let f = r1(p, n, k, alpha, 0, delta);
            prop_assert!(condmod_check(f, 1, p));
        }

        /// Scaling all exponents by a p-adic unit leaves the value unchanged
        /// (only valuations enter the case analysis).
        #[test]
        fn unit_scaling_invariance(
            u in prop::sample::select(vec![1i128, 2, 4, 5, 7, 8]),
            a in 0i128..30,
            b in 0i128..30,
            d in 0i128..30,
        ) {
            let (p, n, k) = (3u64, 2u32, 2u32);
            prop_assert_eq!(r0(p, n, k, a, b, 0), r0(p, n, k, u * a, u * b, 0));
            prop_assert_eq!(r1(p, n, k, a, b * 0, d), r1(p, n, k, u * a, 0, u * d));
        }

        /// metcond values always pass condmod for their own r.
        #[test]
        fn metcond_respects_condmod(r in 2u64..4, m in 1u32..=3) {
            let p = 5u64;
            let f = f_metcond(p, m, r).unwrap();
            prop_assert!(condmod_check(f, r, p));
        }
    }
}

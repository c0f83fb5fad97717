//! Coordinates on the Kummer quotient `Q_m = F^× / (F^×)^{p^m}`.
//!
//! `Q_m` is a free `Z/p^m`-module of rank `d + 2` (`d = ef`), with basis
//! represented by:
//!
//! * index `0`: the uniformizer `λ`;
//! * index `1`: the boundary unit `ε* = 1 + τ*·λ^{p^n}` where `τ*` generates
//!   the cokernel of the Artin–Schreier map `ψ(a) = a^p − a` on the residue
//!   field;
//! * index `2 + jidx·f + s`: the principal units `1 + ω^s·λ^j` for the `e`
//!   exponents `1 ≤ j < p^n` prime to `p` and the `f` residue basis elements
//!   `ω^s`.
//!
//! The discrete logarithm clears one filtration level at a time. At level `t`
//! the graded piece `U_t/U_{t+1} ≅ F_q` is hit by:
//! * basis generators directly when `p ∤ t`, `t < p^n`;
//! * p-th powers of level-`t/p` elements when `p | t`, `t < p^n` (the induced
//!   graded map is `α ↦ α^p`, a bijection);
//! * `ε*`-multiples of p-th powers of level-`p^{n-1}` elements at `t = p^n`
//!   (the graded map is `ψ`, with cokernel spanned by `τ*`);
//! * p-th powers of level-`t−e` elements for `t > p^n` (the graded map is
//!   `α ↦ κ·α = −α`, bijective).
//!
//! Everything at level `> m·e + p^{n-1}` is a `p^m`-th power and dies in `Q_m`.

use crate::arith::{add_mod, inv_mod_ppow, mul_mod, p_pow, sub_mod, val_p};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::zq::FqEl;

impl FieldCtx {
    /// Rank of `Q_m` as a free `Z/p^m`-module.
    pub fn basis_dim(&self) -> usize {
        self.d + 2
    }

    /// Materialize a basis generator of `Q_m`.
    pub fn basis_element(&self, idx: usize) -> FieldElement {
        assert!(idx < self.basis_dim(), "basis index out of range");
        match idx {
            0 => self.el_lambda(),
            1 => self.eps_gen(),
            _ => {
                let f = self.par.f;
                let jidx = (idx - 2) / f;
                let s = (idx - 2) % f;
                let mut tau = self.zq.fq_zero();
                tau[s] = 1;
                self.principal_gen(&tau, self.basis_j[jidx])
            }
        }
    }

    /// Discrete logarithm of a nonzero element in `Q_m`: the coordinate
    /// vector mod `p^m` on the basis above.
    pub fn dlog(&self, x: &FieldElement, m: u32) -> Result<Vec<u64>> {
        assert!(m >= 1 && m <= self.par.n, "need 1 <= m <= n");
        let pm = p_pow(self.par.p, m)?;
        let parts = self.unit_decompose(x)?;
        let mut coords = vec![0u64; self.basis_dim()];
        coords[0] = parts.val % pm;
        // The Teichmüller part is p^m-divisible (its order is prime to p),
        // so only the principal part contributes beyond the valuation.
        let cutoff = self.power_cutoff(m);
        let mut u = parts.principal;
        let mut guard = 0usize;
        while let Some(t) = self.level(&u) {
            if t > cutoff {
                break;
            }
            guard += 1;
            if guard > 4 * cutoff as usize + 16 {
                return Err(Error::InternalInconsistency(
                    "discrete logarithm failed to terminate".into(),
                ));
            }
            let alpha = self.leading_at_level(&u, t);
            let (el, cv) = self.clear_unit_level(t, &alpha, pm, 0)?;
            u = self.mul(&u, &self.inv(&el)?);
            for (ci, add) in coords.iter_mut().zip(cv.iter()) {
                *ci = add_mod(*ci, *add, pm);
            }
            debug_assert!(self.level(&u).map_or(true, |nt| nt > t));
        }
        Ok(coords)
    }

    /// Element of exact level `t` and leading residue `alpha` expressed as a
    /// product of basis generators (with the same class in `Q_m`), together
    /// with its coordinate vector mod `pm`. A zero `alpha` yields `(1, 0)`.
    fn clear_unit_level(
        &self,
        t: u64,
        alpha: &FqEl,
        pm: u64,
        depth: usize,
    ) -> Result<(FieldElement, Vec<u64>)> {
        let p = self.par.p;
        let f = self.par.f;
        let mut coords = vec![0u64; self.basis_dim()];
        if self.zq.fq_is_zero(alpha) {
            return Ok((self.el_one(), coords));
        }
        if depth > 4 * self.par.n as usize + self.e + 8 {
            return Err(Error::InternalInconsistency(
                "level clearing recursion too deep".into(),
            ));
        }
        if t < self.pn && t % p != 0 {
            // Direct hit by the basis generators 1 + ω^s λ^t.
            let jidx = self
                .basis_j
                .binary_search(&t)
                .expect("exponents prime to p below p^n are basis exponents");
            let mut el = self.el_one();
            for s in 0..f {
                let c = alpha[s] % p;
                if c == 0 {
                    continue;
                }
                let gen = self.basis_element(2 + jidx * f + s);
                el = self.mul(&el, &self.pow_u64(&gen, c));
                coords[2 + jidx * f + s] = c % pm;
            }
            Ok((el, coords))
        } else if t < self.pn {
            // p-th powers of level t/p; graded map α ↦ α^p.
            let beta = self.zq.fq_pth_root(alpha);
            let (el0, cv0) = self.clear_unit_level(t / p, &beta, pm, depth + 1)?;
            let el = self.pow_u64(&el0, p);
            for (ci, c0) in coords.iter_mut().zip(cv0.iter()) {
                *ci = mul_mod(p, *c0, pm);
            }
            Ok((el, coords))
        } else if t == self.pn {
            // ε*-component plus a p-th power; graded map ψ with cokernel τ*.
            let (c, a) = self.artin_schreier_split(alpha);
            let (el_a, cv_a) = self.clear_unit_level(self.pn / p, &a, pm, depth + 1)?;
            let mut el = self.pow_u64(&el_a, p);
            if c != 0 {
                el = self.mul(&el, &self.pow_u64(&self.eps_gen(), c));
            }
            for (ci, ca) in coords.iter_mut().zip(cv_a.iter()) {
                *ci = mul_mod(p, *ca, pm);
            }
            coords[1] = add_mod(coords[1], c % pm, pm);
            Ok((el, coords))
        } else {
            // t > p^n: p-th powers of level t−e; graded map α ↦ κα.
            let kinv = inv_mod_ppow(self.kappa, p, p)?;
            let aprime = self.zq.fq_scale(kinv, alpha);
            let (el0, cv0) = self.clear_unit_level(t - self.e as u64, &aprime, pm, depth + 1)?;
            let el = self.pow_u64(&el0, p);
            for (ci, c0) in coords.iter_mut().zip(cv0.iter()) {
                *ci = mul_mod(p, *c0, pm);
            }
            Ok((el, coords))
        }
    }
}

/// A subgroup of `(Z/p^m)^dim` kept in Howell-style echelon form, supporting
/// exact membership tests and size computation.
#[derive(Debug, Clone)]
pub struct Subgroup {
    p: u64,
    m: u32,
    pm: u64,
    dim: usize,
    /// Echelon rows ordered by strictly increasing pivot column; each pivot
    /// entry is exactly p^a for some 0 <= a < m, and the row set is closed
    /// under the annihilator construction, so greedy reduction decides
    /// membership.
    rows: Vec<Vec<u64>>,
}

impl Subgroup {
    pub fn new(p: u64, m: u32, dim: usize) -> Result<Self> {
        let pm = p_pow(p, m)?;
        Ok(Subgroup {
            p,
            m,
            pm,
            dim,
            rows: Vec::new(),
        })
    }

    fn leading(&self, v: &[u64]) -> Option<(usize, u32)> {
        v.iter()
            .position(|&c| c % self.pm != 0)
            .map(|c| (c, val_p(v[c] % self.pm, self.p).unwrap()))
    }

    fn row_at(&self, col: usize) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| self.leading(r).map(|(c, _)| c) == Some(col))
    }

    fn scale_row(&self, s: u64, v: &[u64]) -> Vec<u64> {
        v.iter().map(|&c| mul_mod(s, c, self.pm)).collect()
    }

    fn sub_scaled(&self, v: &mut [u64], s: u64, row: &[u64]) {
        for (vi, &ri) in v.iter_mut().zip(row.iter()) {
            *vi = sub_mod(*vi, mul_mod(s, ri, self.pm), self.pm);
        }
    }

    /// Normalize so the pivot entry is exactly p^a.
    fn normalize(&self, v: &[u64]) -> Result<Vec<u64>> {
        let (c, a) = self.leading(v).expect("normalize needs a nonzero vector");
        let unit = v[c] / p_pow(self.p, a)?;
        let inv = inv_mod_ppow(unit % self.pm, self.p, self.pm)?;
        Ok(self.scale_row(inv, v))
    }

    /// Add a vector (and the closure it requires) to the span.
    pub fn insert(&mut self, v: &[u64]) -> Result<()> {
        assert_eq!(v.len(), self.dim, "vector dimension mismatch");
        let mut work: Vec<Vec<u64>> = vec![v.iter().map(|&c| c % self.pm).collect()];
        let mut guard = 0usize;
        while let Some(mut v) = work.pop() {
            loop {
                guard += 1;
                if guard > 64 * self.dim * self.m as usize + 64 {
                    return Err(Error::InternalInconsistency(
                        "echelon insertion failed to terminate".into(),
                    ));
                }
                let Some((c, a_v)) = self.leading(&v) else {
                    break; // reduced to zero: already in span
                };
                match self.row_at(c) {
                    None => {
                        let nv = self.normalize(&v)?;
                        if a_v > 0 {
                            // Annihilator closure: p^{m-a}·row has its pivot
                            // further right and must be spanned too.
                            work.push(self.scale_row(p_pow(self.p, self.m - a_v)?, &nv));
                        }
                        let pos = self
                            .rows
                            .iter()
                            .position(|r| self.leading(r).map(|(rc, _)| rc > c).unwrap_or(true))
                            .unwrap_or(self.rows.len());
                        self.rows.insert(pos, nv);
                        break;
                    }
                    Some(i) => {
                        let (_, a_row) = self.leading(&self.rows[i]).unwrap();
                        if a_v >= a_row {
                            let q = v[c] / p_pow(self.p, a_row)?;
                            let row = self.rows[i].clone();
                            self.sub_scaled(&mut v, q, &row);
                            debug_assert_eq!(v[c], 0);
                        } else {
                            // The new vector is a better pivot: swap it in and
                            // keep reducing the displaced row.
                            let nv = self.normalize(&v)?;
                            let displaced = std::mem::replace(&mut self.rows[i], nv.clone());
                            if a_v > 0 {
                                work.push(self.scale_row(p_pow(self.p, self.m - a_v)?, &nv));
                            }
                            v = displaced;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Greedy remainder of `v` against the echelon rows; zero iff `v` is in
    /// the span.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = v.iter().map(|&c| c % self.pm).collect();
        for row in &self.rows {
            let (c, a) = self.leading(row).unwrap();
            if v[c] % self.pm == 0 {
                continue;
            }
            let av = val_p(v[c], self.p).unwrap();
            if av >= a {
                let q = v[c] / p_pow(self.p, a).unwrap();
                self.sub_scaled(&mut v, q, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    /// log_p of the subgroup order.
    pub fn size_log_p(&self) -> u32 {
        self.rows
            .iter()
            .map(|r| self.m - self.leading(r).unwrap().1)
            .sum()
    }

    /// log_p of the index in the full module (Z/p^m)^dim.
    pub fn index_log_p(&self) -> u32 {
        self.m * self.dim as u32 - self.size_log_p()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64, n: u32, f: usize) -> FieldCtx {
        FieldCtx::new(FieldParams {
            p,
            n,
            f,
            prec: n + 6,
        })
        .unwrap()
    }

    #[test]
    fn dlog_of_basis_elements_is_the_standard_basis() {
        for (p, n, f) in [(3u64, 1u32, 1usize), (3, 2, 1), (5, 1, 2), (3, 1, 2)] {
            let c = ctx(p, n, f);
            for m in 1..=n {
                for idx in 0..c.basis_dim() {
                    let x = c.basis_element(idx);
                    let coords = c.dlog(&x, m).unwrap();
                    let mut expect = vec![0u64; c.basis_dim()];
                    expect[idx] = 1;
                    assert_eq!(coords, expect, "p={p} n={n} f={f} m={m} idx={idx}");
                }
            }
        }
    }

    #[test]
    fn dlog_is_a_homomorphism() {
        for (p, n, f) in [(3u64, 2u32, 1usize), (5, 1, 2)] {
            let c = ctx(p, n, f);
            let m = n;
            let pm = c.par.p.pow(m);
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            for _ in 0..25 {
                let x = c.random_principal_unit(&mut rng);
                let y = c.random_principal_unit(&mut rng);
                // also exercise a λ-power and a Teichmüller factor
                let x = c.mul(&x, &c.lam_pow(rng.gen_range(0..4)));
                let x = c.scale_zq(&c.zq.pow(&c.zq.omega(), rng.gen_range(0..c.zq.q)), &x);
                let dx = c.dlog(&x, m).unwrap();
                let dy = c.dlog(&y, m).unwrap();
                let dxy = c.dlog(&c.mul(&x, &y), m).unwrap();
                let sum: Vec<u64> = dx
                    .iter()
                    .zip(dy.iter())
                    .map(|(&a, &b)| add_mod(a, b, pm))
                    .collect();
                assert_eq!(dxy, sum);
            }
        }
    }

    #[test]
    fn dlog_kills_pm_th_powers() {
        let c = ctx(3, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=2u32 {
            for _ in 0..10 {
                let x = c.random_principal_unit(&mut rng);
                let xp = c.pow_u64(&x, c.par.p.pow(m));
                let coords = c.dlog(&xp, m).unwrap();
                assert!(coords.iter().all(|&v| v == 0), "m={m}");
            }
        }
    }

    #[test]
    fn dlog_of_p_matches_lambda_power_times_unit() {
        // p = λ^e · μ, so dlog(p) = e·dlog(λ) + dlog(μ).
        let c = ctx(3, 1, 1);
        let m = 1;
        let d = c.dlog(&c.el_from_u64(3), m).unwrap();
        assert_eq!(d[0], (c.e as u64) % 3);
        // consistency with the homomorphism property against λ^e:
        let mu_coords = c.dlog(&c.div_lambda_k(&c.el_from_u64(3), 2).unwrap(), m).unwrap();
        assert_eq!(d[1..], mu_coords[1..]);
    }

    #[test]
    fn subgroup_membership_matches_brute_force() {
        let p = 3u64;
        let m = 2u32;
        let pm = 9u64;
        let dim = 3usize;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _trial in 0..40 {
            let k = rng.gen_range(1..=3usize);
            let gens: Vec<Vec<u64>> = (0..k)
                .map(|_| (0..dim).map(|_| rng.gen_range(0..pm)).collect())
                .collect();
            let mut s = Subgroup::new(p, m, dim).unwrap();
            for g in &gens {
                s.insert(g).unwrap();
            }
            // Brute-force span: all Z/9-combinations of the generators.
            let mut span = std::collections::HashSet::new();
            let mut counters = vec![0u64; k];
            loop {
                let mut v = vec![0u64; dim];
                for (ci, g) in counters.iter().zip(gens.iter()) {
                    for (vj, &gj) in v.iter_mut().zip(g.iter()) {
                        *vj = add_mod(*vj, mul_mod(*ci, gj, pm), pm);
                    }
                }
                span.insert(v);
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    counters[i] += 1;
                    if counters[i] < pm {
                        break;
                    }
                    counters[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
            assert_eq!(
                (p as u64).pow(s.size_log_p()),
                span.len() as u64,
                "echelon size must match brute-force span size"
            );
            for _ in 0..30 {
                let v: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..pm)).collect();
                assert_eq!(s.contains(&v), span.contains(&v));
            }
            for v in span.iter().take(20) {
                assert!(s.contains(v));
            }
        }
    }
}

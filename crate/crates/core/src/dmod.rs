//! The Galois module `D = λ^{Z_p} × U_1` of p-completed principal parts.
//!
//! The pro-p completion of `F^×` splits as `λ^{Z_p} × U_1(F)`: Teichmüller
//! roots of unity die (their order is prime to p), the valuation becomes a
//! formal `Z_p`-exponent on `λ`, and principal units carry honest
//! `Z_p`-exponents. `Z_p`-exponents are represented mod `p^prec`; for a
//! principal unit `u`, `u^{p^prec}` has level at least `e·(prec−n)`, far
//! beyond every level this library inspects, so the truncation is harmless.
//!
//! Galois acts through `σ(λ) = λ·τ_a·s_a` — in `D` the Teichmüller factor
//! `τ_a` disappears and only the principal factor `s_a` survives:
//! `σ(λ^c·u) = λ^c · s_a^c · σ(u)`.
//!
//! On top of the raw action this module provides:
//! * the normalized eigenprojections `e_r = (p−1)^{-1} Σ_δ ω(δ)^{-r} δ` of
//!   the tame quotient Δ (order p−1, prime to p, so the averaging weight is
//!   invertible);
//! * the twisted norm `N_r(x) = ∏_{i<p^{n-1}} γ^i(x)^{χ(γ)^{-ir}}`, which
//!   maps the `e_r`-eigenspace into the twist module
//!   `F^r = {x : σ(x) = x^{χ(σ)^r} for all σ ∈ Σ}` (mod p^n-th powers);
//! * a membership test for `F^r` (checking the single generator σ₀ of the
//!   cyclic group Σ suffices);
//! * the generator system (λ-derived uniformizer π with N_Σ(π) = p, its
//!   coboundary u = π^{σ₀−1} placed at filtration level 2 — or, where the
//!   frozen level-2 slot at p = 3 makes that unreachable, at level p with
//!   e₁(u) ∈ V'_p — the eigencomponents u_r, and the deeper generator y₁)
//!   used by the symbol computations. Generators are only constructed for
//!   f = 1.

use rand::Rng;

use crate::arith::{add_mod, inv_mod_ppow, mul_mod, p_pow, pow_mod, sub_mod, teich_scalar};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};

/// `λ^lam · unit` with `lam` a Z_p-exponent mod p^prec and `unit` principal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DElement {
    pub lam: u64,
    pub unit: FieldElement,
}

/// The generator system over `F` (f = 1 only).
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    /// The scalar 1 + p.
    pub v: DElement,
    /// ζ = ζ_{p^n}.
    pub w: DElement,
    /// Uniformizer-type element π = λ·z^{σ₀−1} with N_Σ(π) = p.
    pub pi: DElement,
    /// u = π^{σ₀−1}. Generic placement is filtration level exactly 2; at
    /// p = 3 the level-2 graded slot of the coboundary square vanishes
    /// identically ((ā²−1) ≡ 0 mod 3) and level 2 can be unreachable over
    /// the whole search space — then u is placed so that e₁(u) has level
    /// exactly p, the property every downstream use depends on.
    pub u: DElement,
    /// Filtration level at which u landed (2 generic, p in the fallback).
    pub u_level: u64,
    /// True when u sits at the generic level 2.
    pub u_exact_placement: bool,
    /// Search choices made during construction, for report provenance.
    pub provenance: Vec<String>,
    /// w₁ = e₁(ζ) = ζ (the normalized projection fixes ζ exactly).
    pub w1: DElement,
    /// u₀ = e₀(u).
    pub u0: DElement,
    /// u₁ = e₁(u).
    pub u1: DElement,
    /// π₀ = e₀(π).
    pub pi0: DElement,
    /// y₁: u₁ with the level-p component removed by a ζ^{p}-power twist;
    /// level exactly 2p−1 for n ≥ 2, and y₁ = u₁ for n = 1.
    pub y1: DElement,
}

impl FieldCtx {
    // ---- basic D-element calculus --------------------------------------------

    pub fn d_one(&self) -> DElement {
        DElement {
            lam: 0,
            unit: self.el_one(),
        }
    }

    pub fn d_lambda(&self) -> DElement {
        DElement {
            lam: 1,
            unit: self.el_one(),
        }
    }

    /// Image of a nonzero field element in `D` (Teichmüller part dropped).
    pub fn d_of(&self, x: &FieldElement) -> Result<DElement> {
        let parts = self.unit_decompose(x)?;
        Ok(DElement {
            lam: parts.val % self.modulus,
            unit: parts.principal,
        })
    }

    pub fn d_mul(&self, a: &DElement, b: &DElement) -> DElement {
        DElement {
            lam: add_mod(a.lam, b.lam, self.modulus),
            unit: self.mul(&a.unit, &b.unit),
        }
    }

    pub fn d_inv(&self, a: &DElement) -> Result<DElement> {
        Ok(DElement {
            lam: sub_mod(0, a.lam, self.modulus),
            unit: self.inv(&a.unit)?,
        })
    }

    /// Z_p-power with the exponent given mod p^prec.
    pub fn d_pow(&self, a: &DElement, k: u64) -> DElement {
        DElement {
            lam: mul_mod(a.lam, k, self.modulus),
            unit: self.pow_u64(&a.unit, k),
        }
    }

    /// Signed power: negative exponents go through the inverse.
    pub fn d_pow_i(&self, a: &DElement, k: i64) -> Result<DElement> {
        if k >= 0 {
            Ok(self.d_pow(a, k as u64))
        } else {
            Ok(self.d_pow(&self.d_inv(a)?, (-k) as u64))
        }
    }

    /// Galois action on `D`: `σ_{a,b}(λ^c u) = λ^c · s_a^c · σ_{a,b}(u)`.
    pub fn d_galois(&self, x: &DElement, a: u64, b: usize) -> DElement {
        let mut unit = self.galois(&x.unit, a, b);
        if x.lam != 0 {
            let s = self.pow_u64(self.sigma_lambda_unit(a), x.lam);
            unit = self.mul(&unit, &s);
        }
        DElement { lam: x.lam, unit }
    }

    /// `x^{σ−1}` for the Galois element `(a, b)`.
    pub fn d_coboundary(&self, x: &DElement, a: u64, b: usize) -> Result<DElement> {
        Ok(self.d_mul(&self.d_galois(x, a, b), &self.d_inv(x)?))
    }

    /// Equality up to the inherent λ-division noise floor.
    pub fn d_eq(&self, a: &DElement, b: &DElement) -> bool {
        a.lam == b.lam
            && self.eq_to_level(
                &a.unit,
                &b.unit,
                self.e as u64 * (self.par.prec as u64 - 1),
            )
    }

    /// Materialize mod p^m-th powers: λ^{lam mod p^m}·unit. Only the Kummer
    /// class mod (F^×)^{p^m} is preserved.
    pub fn d_materialize(&self, x: &DElement, m: u32) -> FieldElement {
        let pm = p_pow(self.par.p, m).expect("precision bound");
        self.mul(&self.lam_pow(x.lam % pm), &x.unit)
    }

    /// Discrete logarithm of a D-element in `Q_m`.
    pub fn d_dlog(&self, x: &DElement, m: u32) -> Result<Vec<u64>> {
        let pm = p_pow(self.par.p, m)?;
        let mut coords = self.dlog(&x.unit, m)?;
        debug_assert_eq!(coords[0], 0, "principal units have valuation 0");
        coords[0] = x.lam % pm;
        Ok(coords)
    }

    // ---- exponent lifts ---------------------------------------------------------

    /// `(1+p)^k mod p^prec` for signed `k` (the order of 1+p is p^{prec-1}).
    pub fn chi_gamma_pow(&self, k: i64) -> u64 {
        let ord = self.modulus / self.par.p; // p^{prec-1}
        let k_red = k.rem_euclid(ord as i64) as u64;
        pow_mod((1 + self.par.p) % self.modulus, k_red, self.modulus)
    }

    /// `ω(δ_gen)^k mod p^prec` for signed `k` (ω-lift has order p−1).
    pub fn omega_gen_pow(&self, k: i64) -> u64 {
        let ord = (self.par.p - 1) as i64;
        let k_red = k.rem_euclid(ord) as u64;
        pow_mod(self.omega_lift(self.delta_gen_a), k_red, self.modulus)
    }

    /// Exact cyclotomic character of σ₀ = δ_gen·γ raised to the signed power
    /// `r`, as a Z_p-scalar mod p^prec.
    pub fn chi_sigma0_pow(&self, r: i64) -> u64 {
        mul_mod(self.omega_gen_pow(r), self.chi_gamma_pow(r), self.modulus)
    }

    // ---- eigenprojections and twisted norms --------------------------------------

    /// Normalized tame eigenprojection `e_r(x) = ∏_i (δ^i x)^{(p−1)^{-1} ω(δ)^{-ri}}`.
    pub fn d_idem(&self, x: &DElement, r: i64) -> Result<DElement> {
        let winv = inv_mod_ppow(self.par.p - 1, self.par.p, self.modulus)?;
        let mut acc = self.d_one();
        for (i, &a) in self.delta_as.clone().iter().enumerate() {
            let dx = self.d_galois(x, a, 0);
            let wi = mul_mod(winv, self.omega_gen_pow(-(i as i64) * r), self.modulus);
            acc = self.d_mul(&acc, &self.d_pow(&dx, wi));
        }
        Ok(acc)
    }

    /// Twisted norm `N_r(x) = ∏_{i=0}^{p^{n-1}-1} γ^i(x)^{χ(γ)^{-ir}}`; it is
    /// the identity for n = 1 and maps `e_r`-eigenvectors into `F^r` modulo
    /// `p^n`-th powers.
    pub fn d_twisted_norm(&self, x: &DElement, r: i64) -> DElement {
        let reps = self.pn / self.par.p; // p^{n-1}
        let mut acc = self.d_one();
        let mut ga = 1u64;
        for i in 0..reps {
            let gx = self.d_galois(x, ga, 0);
            let c = self.chi_gamma_pow(-(i as i64) * r);
            acc = self.d_mul(&acc, &self.d_pow(&gx, c));
            ga = mul_mod(ga, self.gamma_a, self.pn);
        }
        acc
    }

    /// Membership in the twist module `F^r` (mod p^n-th powers): checks the
    /// defining relation on the generator σ₀ of Σ; the relation for powers of
    /// σ₀ follows by twisted telescoping.
    pub fn d_in_fr(&self, x: &DElement, r: i64) -> Result<bool> {
        let c = self.chi_sigma0_pow(r);
        let sx = self.d_galois(x, self.sigma_a, 0);
        let y = self.d_mul(&sx, &self.d_inv(&self.d_pow(x, c))?);
        if y.lam % self.pn != 0 {
            return Ok(false);
        }
        let mut w = y.unit;
        for _ in 0..self.par.n {
            match self.root_p(&w)? {
                Some(next) => w = next,
                None => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Filtration level of a λ-free D-element: the `V`-level when it lies in
    /// an eigenspace. `None` means trivial at working precision.
    pub fn eig_filtration_level(&self, x: &DElement) -> Result<Option<u64>> {
        if x.lam != 0 {
            return Err(Error::NotPrincipalUnit(format!(
                "filtration level needs a unit, got λ-exponent {}",
                x.lam
            )));
        }
        Ok(self.level(&x.unit))
    }

    /// `x^{T^j}` for `T = γ−1`: the j-fold coboundary by the wild generator.
    pub fn d_t_pow(&self, x: &DElement, j: u32) -> Result<DElement> {
        let mut y = x.clone();
        for _ in 0..j {
            y = self.d_coboundary(&y, self.gamma_a, 0)?;
        }
        Ok(y)
    }

    /// `x^{N_Γ} = ∏_{i<p^{n−1}} γ^i(x)`.
    pub fn d_gamma_norm(&self, x: &DElement) -> DElement {
        let reps = self.pn / self.par.p;
        let mut acc = self.d_one();
        let mut ga = 1u64;
        for _ in 0..reps {
            acc = self.d_mul(&acc, &self.d_galois(x, ga, 0));
            ga = mul_mod(ga, self.gamma_a, self.pn);
        }
        acc
    }

    /// `x^{N_Φ} = ∏_{b<f} φ^b(x)`.
    pub fn d_phi_norm(&self, x: &DElement) -> DElement {
        let mut acc = self.d_one();
        for b in 0..self.par.f {
            acc = self.d_mul(&acc, &self.d_galois(x, 1, b));
        }
        acc
    }

    /// Random element of `F^r`: project a random unit to the e_r-eigenspace,
    /// then apply the twisted norm.
    pub fn d_sample_fr<R: Rng>(&self, rng: &mut R, r: i64) -> Result<DElement> {
        let u = self.random_principal_unit(rng);
        let proj = self.d_idem(
            &DElement {
                lam: 0,
                unit: u,
            },
            r,
        )?;
        Ok(self.d_twisted_norm(&proj, r))
    }

    // ---- generator system ----------------------------------------------------------

    /// The depth index k(r): how deep the congruence class of r sits.
    pub fn k_of_r(&self, r: i64) -> u32 {
        let n = self.par.n;
        let pm1 = (self.par.p - 1) as i64;
        if r.rem_euclid(pm1) == 0 {
            if r == 0 {
                n
            } else {
                n.min(val_p_i64(r, self.par.p) + 1)
            }
        } else if r.rem_euclid(pm1) == 1 {
            if r == 1 {
                n
            } else {
                n.min(val_p_i64(r - 1, self.par.p) + 1)
            }
        } else {
            n
        }
    }

    /// κ_r = ζ^{p^{n−k(r)}}, a root of unity of exact order p^{k(r)}.
    pub fn gen_kappa_r(&self, r: i64) -> FieldElement {
        let k = self.k_of_r(r);
        self.pow_u64(
            &self.el_zeta(),
            p_pow(self.par.p, self.par.n - k).expect("n >= k"),
        )
    }

    /// Build the full generator system. Requires f = 1: the generator theory
    /// is stated over base fields with trivial unramified part.
    pub fn build_generators(&self) -> Result<GeneratorSet> {
        if self.par.f != 1 {
            return Err(Error::UnsupportedBase(
                "the generator system is constructed only for f = 1".into(),
            ));
        }
        let p = self.par.p;
        let sig = self.sigma_a;
        let a_bar = sig % p;

        // v = 1 + p and w = ζ are exact.
        let v = DElement {
            lam: 0,
            unit: self.el_from_u64(1 + p),
        };
        let w = DElement {
            lam: 0,
            unit: self.el_zeta(),
        };

        // π = λ·x^{σ₀−1} for x = λ^j·z with z a unit: then N_Σ(π) = N_Σ(λ) = p
        // automatically (σ₀-coboundaries are norm-one), and since every
        // norm-one element of F^× is a σ₀-coboundary, every admissible π is
        // of this shape. The index j matters modulo p^{n−1}: coboundaries of
        // non-unit x fall outside the unit-coboundary classes. We need
        // u = π^{σ₀−1} = λ^{σ₀−1}·(λ^{(σ₀−1)²})^j·z^{(σ₀−1)²} at level 2,
        // and, for n ≥ 2, a twist c with y₁ = u₁·ζ^{pc} at level exactly
        // 2p−1 (u₁ = e₁(u)).
        //
        // On graded pieces (σ₀−1) multiplies the level-t leading coefficient
        // by (ā^t − 1); the coboundary square scales a level-1 coefficient by
        // (ā−1)² ≠ 0, so for each j the level-1 residue of z is pinned at
        // β₁ = −ℓ₁/(ā−1)² with ℓ₁ the level-1 leading term of the j-branch
        // base. The remaining knobs swept below: the ζ-power k (it passes
        // through the coboundary square as ζ^{k(a−1)²}), the lift of the
        // pinned residue (perturbs deeper terms), and a level-(2p−1)
        // component c₅ (its square multiplier (ā^{2p−1}−1)² is a unit, so it
        // steers the slot y₁ must occupy).
        let base = self.d_coboundary(&self.d_lambda(), sig, 0)?;
        debug_assert_eq!(base.lam, 0);
        let bb = self.d_coboundary(&base, sig, 0)?;
        let am1_inv = inv_mod_ppow(sub_mod(a_bar, 1, p), p, p)?;
        let deep = 2 * p - 1;
        let pn1 = p_pow(p, self.par.n - 1)?;
        let c5_range: Vec<u64> = if self.par.n >= 2 { (0..p).collect() } else { vec![0] };

        let z_cand = |k: u64, c: u64, c5: u64| -> Result<DElement> {
            let mut zf = self.mul(
                &self.pow_u64(&self.el_zeta(), k),
                &self.add(&self.el_one(), &self.scale_u64(c, &self.el_lambda())),
            );
            if c5 != 0 {
                zf = self.mul(
                    &zf,
                    &self.add(&self.el_one(), &self.scale_u64(c5, &self.lam_pow(deep))),
                );
            }
            self.d_of(&zf)
        };
        // y₁ = u₁·ζ^{pc}: scan c for the twist landing at level exactly 2p−1
        // (n = 1 needs no twist: y₁ = u₁ by definition).
        let try_y1 = |u1: &DElement| -> Option<(DElement, u64)> {
            if self.par.n == 1 {
                return Some((u1.clone(), 0));
            }
            let wp = self.pow_u64(&self.el_zeta(), p);
            for c in 0..p {
                let cand = self.mul(&u1.unit, &self.pow_u64(&wp, c));
                if self.level(&cand) == Some(deep) {
                    return Some((DElement { lam: 0, unit: cand }, c));
                }
            }
            None
        };

        struct Branch {
            z: DElement,
            u: DElement,
            u1: DElement,
            y1: DElement,
            j: u64,
            exact: bool,
            note: String,
        }
        let mut chosen: Option<Branch> = None;
        let mut fallback: Option<Branch> = None;
        let mut base_j = base.clone();
        'search: for j in 0..pn1 {
            if j > 0 {
                base_j = self.d_mul(&base_j, &bb);
            }
            let l1 = match self.level(&base_j.unit) {
                Some(1) => self.leading_at_level(&base_j.unit, 1)[0],
                _ => 0,
            };
            let beta1 = mul_mod(sub_mod(0, l1, p), mul_mod(am1_inv, am1_inv, p), p);
            for k in 0..p {
                let c0 = (beta1 + k) % p;
                let mut lifts: Vec<u64> = (0..p).map(|i| c0 + i * p).collect();
                lifts.push(teich_scalar(c0, p, self.modulus));
                for c in lifts {
                    for &c5 in &c5_range {
                        let z = z_cand(k, c, c5)?;
                        let zc = self.d_coboundary(&z, sig, 0)?;
                        let zcc = self.d_coboundary(&zc, sig, 0)?;
                        let u = self.d_mul(&base_j, &zcc);
                        let ul = self.level(&u.unit);
                        if ul == Some(2) {
                            let u1 = self.d_idem(&u, 1)?;
                            if let Some((y1, tw)) = try_y1(&u1) {
                                chosen = Some(Branch {
                                    z,
                                    u,
                                    u1,
                                    y1,
                                    j,
                                    exact: true,
                                    note: format!(
                                        "z = zeta^{k}*(1+{c}*lambda)*(1+{c5}*lambda^{deep}), \
                                         j = {j}, u level 2, y1 twist {tw}"
                                    ),
                                });
                                break 'search;
                            }
                        } else if p == 3 && ul == Some(p) && fallback.is_none() {
                            // p = 3 fallback: the level-2 slot of the
                            // coboundary square is frozen ((ā²−1) ≡ 0 mod 3)
                            // and can be unreachable; accept u at level p
                            // provided the consumed components still place:
                            // e₁(u) ∈ V'_p and y₁ constructible.
                            let u1 = self.d_idem(&u, 1)?;
                            if self.level(&u1.unit) == Some(p) {
                                if let Some((y1, tw)) = try_y1(&u1) {
                                    fallback = Some(Branch {
                                        z,
                                        u,
                                        u1,
                                        y1,
                                        j,
                                        exact: false,
                                        note: format!(
                                            "z = zeta^{k}*(1+{c}*lambda)*(1+{c5}*lambda^{deep}), \
                                             j = {j}, u level {p} (frozen level-2 slot), \
                                             y1 twist {tw}"
                                        ),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }

        let branch = match (chosen, fallback) {
            (Some(b), _) => b,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(Error::SearchFailed(
                    "no coboundary branch places u at level 2 (or level p for the p = 3 \
                     fallback) together with a valid y1 twist"
                        .into(),
                ));
            }
        };
        let Branch {
            z,
            u,
            u1,
            y1,
            j,
            exact: u_exact_placement,
            note,
        } = branch;
        let u_level = self.level(&u.unit).expect("placed u is nontrivial");
        let pi = self.d_mul(
            &self.d_lambda(),
            &self.d_mul(&self.d_pow(&base, j), &self.d_coboundary(&z, sig, 0)?),
        );
        debug_assert!(self.d_eq(&u, &self.d_coboundary(&pi, sig, 0)?));

        // Exactness check: N_Σ(π) = p in D.
        let mut nrm = self.d_one();
        for &(a, b) in &self.sigma_elements() {
            nrm = self.d_mul(&nrm, &self.d_galois(&pi, a, b));
        }
        let p_d = self.d_of(&self.el_from_u64(p))?;
        if !self.d_eq(&nrm, &p_d) {
            return Err(Error::InternalInconsistency(
                "Σ-norm of the uniformizer generator is not p".into(),
            ));
        }

        let w1 = self.d_idem(&w, 1)?;
        // The normalized projection fixes ζ exactly: its exponent is ≡ 1 mod p^n.
        if self.d_materialize(&w1, self.par.n) != self.el_zeta() {
            return Err(Error::InternalInconsistency(
                "normalized e₁ does not fix ζ".into(),
            ));
        }
        let w1 = w.clone(); // use the exact representative
        let u0 = self.d_idem(&u, 0)?;
        let pi0 = self.d_idem(&pi, 0)?;

        Ok(GeneratorSet {
            v,
            w,
            pi,
            u,
            u_level,
            u_exact_placement,
            provenance: vec![note],
            w1,
            u0,
            u1,
            pi0,
            y1,
        })
    }

    /// t_r = N_r(π₀).
    pub fn gen_t_r(&self, gs: &GeneratorSet, r: i64) -> DElement {
        self.d_twisted_norm(&gs.pi0, r)
    }

    /// x_r = N_r(u₀) for r ≡ 0 and N_r(u₁) for r ≡ 1 (mod p−1).
    pub fn gen_x_r(&self, gs: &GeneratorSet, r: i64) -> DElement {
        let pm1 = (self.par.p - 1) as i64;
        if r.rem_euclid(pm1) == 0 {
            self.d_twisted_norm(&gs.u0, r)
        } else {
            self.d_twisted_norm(&gs.u1, r)
        }
    }

    /// z_r = N_r(w₁).
    pub fn gen_z_r(&self, gs: &GeneratorSet, r: i64) -> DElement {
        self.d_twisted_norm(&gs.w1, r)
    }
}

fn val_p_i64(x: i64, p: u64) -> u32 {
    let mut x = x.unsigned_abs();
    debug_assert!(x > 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
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
    fn d_galois_is_multiplicative_and_respects_lambda() {
        let c = ctx(3, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = c.d_of(&c.mul(&c.lam_pow(3), &c.random_principal_unit(&mut rng))).unwrap();
        let y = c.d_of(&c.random_principal_unit(&mut rng)).unwrap();
        let a = c.sigma_a;
        let lhs = c.d_galois(&c.d_mul(&x, &y), a, 0);
        let rhs = c.d_mul(&c.d_galois(&x, a, 0), &c.d_galois(&y, a, 0));
        assert!(c.d_eq(&lhs, &rhs));
        // Materialized at depth n, d_galois(λ) agrees with galois(λ) up to
        // the dropped Teichmüller factor — check the cube kills it (p^n-th
        // power classes): dlog comparison instead.
        let dl = c.d_dlog(&c.d_galois(&c.d_lambda(), a, 0), 2).unwrap();
        let direct = c.dlog(&c.galois(&c.el_lambda(), a, 0), 2).unwrap();
        assert_eq!(dl, direct, "D-action matches the field action in Q_m");
    }

    #[test]
    fn idempotents_decompose_units() {
        // ∏_r e_r(x) = x for principal units (the normalized weights sum to
        // the identity of the group algebra).
        let c = ctx(5, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = DElement {
            lam: 0,
            unit: c.random_principal_unit(&mut rng),
        };
        let mut prod = c.d_one();
        for r in 0..4 {
            prod = c.d_mul(&prod, &c.d_idem(&x, r).unwrap());
        }
        assert!(c.d_eq(&prod, &x));
    }

    #[test]
    fn idempotent_eigen_levels_follow_residue_classes() {
        // e_r(1 + τλ^t) has level exactly t iff t ≡ r (mod p−1); otherwise
        // the level-t component is annihilated.
        for (p, n) in [(3u64, 2u32), (5, 1)] {
            let c = ctx(p, n, 1);
            for t in 1..(p - 1) * 2 {
                let x = DElement {
                    lam: 0,
                    unit: c.principal_gen(&vec![1], t),
                };
                for r in 0..(p - 1) as i64 {
                    let proj = c.d_idem(&x, r).unwrap();
                    let lvl = c.level(&proj.unit);
                    if (t as i64 - r).rem_euclid((p - 1) as i64) == 0 {
                        assert_eq!(lvl, Some(t), "p={p} t={t} r={r}");
                    } else {
                        assert!(lvl.map_or(true, |l| l > t), "p={p} t={t} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn twisted_norm_lands_in_twist_module() {
        let c = ctx(3, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for r in [0i64, 1, 2, 3, 5] {
            let x = c.d_sample_fr(&mut rng, r).unwrap();
            assert!(c.d_in_fr(&x, r).unwrap(), "r={r}");
        }
        // a random unit is (generically) not in F^r for r with nontrivial twist
        let y = DElement {
            lam: 0,
            unit: c.random_principal_unit(&mut rng),
        };
        assert!(!c.d_in_fr(&y, 2).unwrap());
    }

    #[test]
    fn generator_system_builds_and_is_placed_correctly() {
        for (p, n) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 1)] {
            let c = ctx(p, n, 1);
            let gs = c.build_generators().unwrap();
            if gs.u_exact_placement {
                assert_eq!(c.level(&gs.u.unit), Some(2), "u placement p={p} n={n}");
            } else {
                // Fallback placements occur only at p = 3 and still pin the
                // consumed component: e₁(u) at level exactly p.
                assert_eq!(p, 3, "fallback placement only at p=3, got p={p} n={n}");
                assert_eq!(c.level(&gs.u.unit), Some(p), "u fallback p={p} n={n}");
            }
            assert_eq!(gs.u_level, c.level(&gs.u.unit).unwrap());
            assert_eq!(gs.pi.lam, 1);
            // p ≥ 5 always admits the level-2 placement (the level-2 slot of
            // the coboundary square is invertible there).
            if p >= 5 {
                assert!(gs.u_exact_placement, "exact placement p={p} n={n}");
            }
            // w₁ is exactly ζ.
            assert_eq!(gs.w1.unit, c.el_zeta());
            if n >= 2 {
                assert_eq!(
                    c.level(&gs.y1.unit),
                    Some(2 * p - 1),
                    "y₁ placement p={p} n={n}"
                );
                // u₁ lies in V_p (the twist construction needs no more).
                assert!(
                    c.level(&gs.u1.unit).map_or(false, |t| t >= p),
                    "u₁ containment p={p} n={n}"
                );
            }
            // u₀ is trivial at n = 1 (it is a (p−1)-th root of N_Δ(u) = 1).
            if n == 1 {
                assert!(c.d_eq(&gs.u0, &c.d_one()), "u₀ trivial at n=1, p={p}");
            }
        }
    }

    #[test]
    fn k_of_r_table() {
        let c = ctx(3, 2, 1);
        // r ≡ 0 (mod 2): k = n for r = 0; otherwise min(n, v_p(r)+1).
        assert_eq!(c.k_of_r(0), 2);
        assert_eq!(c.k_of_r(2), 1);
        assert_eq!(c.k_of_r(6), 2);
        assert_eq!(c.k_of_r(18), 2); // min(2, 2+1)
        // r ≡ 1 (mod 2): k = n for r = 1; otherwise min(n, v_p(r−1)+1).
        assert_eq!(c.k_of_r(1), 2);
        assert_eq!(c.k_of_r(3), 1);
        assert_eq!(c.k_of_r(7), 2); // v_3(6) = 1, so k = min(2, 1+1)
        assert_eq!(c.k_of_r(9), 1);
        assert_eq!(c.k_of_r(19), 2); // v_3(18) = 2
    }
}


//! First-principles conductor computation for Kummer extensions via local
//! class field theory.
//!
//! For `z ∈ F^×` not a p-th power and `1 <= m <= n`, the extension
//! `L = F(z^{1/p^m})` is cyclic of degree `p^m` (all p^m-th roots of unity lie
//! in `F`). Class field theory says its norm group `N = N_{L/F}(L^×)` has
//! index `p^m` in `F^×` and the conductor exponent of `L/F` is the smallest
//! `c` with `U_c ⊆ N` (`U_0 = O_F^×`).
//!
//! Both sides live naturally in the Kummer quotient `Q_m = F^×/(F^×)^{p^m}`
//! (as `N ⊇ (F^×)^{p^m}`), where everything is finite linear algebra over
//! `Z/p^m`:
//! * the span of `N` is generated by discrete logarithms of norms of explicit
//!   integral elements of `L`, computed as products of the conjugates
//!   `h(Y) ↦ h(ζ_{p^m}^i Y)` in the quotient ring `F[Y]/(Y^{p^m} − z)`;
//! * the certificate that the span is all of `N` is its index reaching
//!   exactly `p^m` — less is impossible, so exceeding the generator budget
//!   without reaching it is reported, never silently accepted;
//! * the image of `U_t` is spanned by the vectors of `1 + ω^s λ^t` for
//!   `t` up to the cutoff `m·e + p^{n-1}` (deeper levels are `p^m`-th powers),
//!   so the conductor is read off by scanning levels downward.

use std::collections::HashMap;

use rand::Rng;

use crate::arith::{gcd, mul_mod, p_pow};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::kummer::Subgroup;
use crate::zq::FqEl;

/// Norm-group span of `F(z^{1/p^m})/F` inside `Q_m`, with the certificate
/// bookkeeping.
#[derive(Debug, Clone)]
pub struct NormGroupInfo {
    pub span: Subgroup,
    /// Norms inserted before the index certificate was reached.
    pub generators_used: usize,
    /// log_p of the span index after each inserted norm; the certificate is
    /// reached when the trace hits m (class field theory forbids less).
    pub index_trace: Vec<u64>,
}

/// Outcome of a conductor computation.
#[derive(Debug, Clone)]
pub struct ConductorResult {
    /// Conductor exponent of F(z^{1/p^m})/F.
    pub conductor: u64,
    /// Effective Kummer depth after stripping p-th powers from z.
    pub m_eff: u32,
    /// Norm generators needed for the certificate (0 for trivial extensions).
    pub generators_used: usize,
    /// The level t = conductor − 1 whose unit is not a norm (minimality
    /// witness), when the extension is ramified.
    pub witness_level: Option<u64>,
    /// Certificate trace from the norm-group computation (see
    /// [`NormGroupInfo::index_trace`]); empty for trivial extensions.
    pub index_trace: Vec<u64>,
}

/// Conductor oracle: owns a field context plus caches for unit-filtration
/// profiles and norm-group spans.
pub struct ConductorEngine {
    pub ctx: FieldCtx,
    /// Budget of norm generators tried before giving up on the certificate.
    pub family_budget: usize,
    /// For each depth m: dlog vectors of `1 + ω^s λ^t`, indexed [t-1][s].
    profiles: HashMap<u32, Vec<Vec<Vec<u64>>>>,
    /// Norm-group spans keyed by (z, m), so repeated symbol computations
    /// against the same extension are cheap.
    span_cache: HashMap<(Vec<u64>, u32), NormGroupInfo>,
}

impl ConductorEngine {
    pub fn new(ctx: FieldCtx, family_budget: usize) -> Self {
        ConductorEngine {
            ctx,
            family_budget,
            profiles: HashMap::new(),
            span_cache: HashMap::new(),
        }
    }

    /// dlog vectors of the filtration generators `1 + ω^s λ^t` mod p^m,
    /// `1 <= t <= cutoff(m)`, computed once per depth.
    pub fn profile(&mut self, m: u32) -> Result<Vec<Vec<Vec<u64>>>> {
        if let Some(p) = self.profiles.get(&m) {
            return Ok(p.clone());
        }
        let ctx = &self.ctx;
        let cutoff = ctx.power_cutoff(m);
        let mut prof = Vec::with_capacity(cutoff as usize);
        for t in 1..=cutoff {
            let mut per_s = Vec::with_capacity(ctx.par.f);
            for s in 0..ctx.par.f {
                let mut tau = ctx.zq.fq_zero();
                tau[s] = 1;
                let gen = ctx.principal_gen(&tau, t);
                per_s.push(ctx.dlog(&gen, m)?);
            }
            prof.push(per_s);
        }
        self.profiles.insert(m, prof.clone());
        Ok(prof)
    }

    /// Replace `(z, m)` by `(z', m')` with `F(z^{1/p^m}) = F(z'^{1/p^{m'}})`
    /// and `z'` not a p-th power (or `m' = 0` when the extension is trivial).
    /// Valid because `μ_{p^m} ⊆ F`: if `z = w^p` then the two root fields
    /// coincide.
    pub fn kummer_normalize(&self, z: &FieldElement, m: u32) -> Result<(FieldElement, u32)> {
        let mut z = z.clone();
        let mut m_eff = m;
        while m_eff > 0 {
            match self.ctx.pth_power_test(&z, 1)? {
                Some(w) => {
                    z = w;
                    m_eff -= 1;
                }
                None => break,
            }
        }
        Ok((z, m_eff))
    }

    /// Norm-group span of `F(z^{1/p^m})/F` in `Q_m`. Requires `z` not a p-th
    /// power and `1 <= m <= n`.
    pub fn norm_group<R: Rng>(
        &mut self,
        z: &FieldElement,
        m: u32,
        rng: &mut R,
    ) -> Result<NormGroupInfo> {
        assert!(m >= 1 && m <= self.ctx.par.n, "need 1 <= m <= n");
        let key = (z.coeffs().to_vec(), m);
        if let Some(info) = self.span_cache.get(&key) {
            return Ok(info.clone());
        }
        debug_assert!(
            self.ctx.pth_power_test(z, 1)?.is_none(),
            "norm_group requires a p-th-power-free radicand"
        );
        let ctx = &self.ctx;
        let p = ctx.par.p;
        let pm = p_pow(p, m)? as usize;
        let dim = ctx.basis_dim();
        let mut span = Subgroup::new(p, m, dim)?;

        // ζ of exact order p^m, acting on Y-coordinates of L = F[Y]/(Y^{p^m} − z).
        let zeta_m = ctx.pow_u64(&ctx.el_zeta(), p_pow(p, ctx.par.n - m)?);
        let zeta_pows: Vec<FieldElement> = {
            let mut v = Vec::with_capacity(pm);
            let mut acc = ctx.el_one();
            for _ in 0..pm {
                v.push(acc.clone());
                acc = ctx.mul(&acc, &zeta_m);
            }
            v
        };

        let l_mul = |a: &[FieldElement], b: &[FieldElement]| -> Vec<FieldElement> {
            let mut out = vec![ctx.el_zero(); pm];
            for (i, ai) in a.iter().enumerate() {
                if ctx.is_zero(ai) {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    if ctx.is_zero(bj) {
                        continue;
                    }
                    let prod = ctx.mul(ai, bj);
                    let k = i + j;
                    if k < pm {
                        out[k] = ctx.add(&out[k], &prod);
                    } else {
                        let folded = ctx.mul(&prod, z);
                        out[k - pm] = ctx.add(&out[k - pm], &folded);
                    }
                }
            }
            out
        };

        // N(h) = ∏_i h(ζ^i Y), which must be a constant polynomial: the
        // product over the full conjugate orbit has exactly the F-coordinates
        // of the field norm.
        let norm = |h: &[FieldElement]| -> Result<FieldElement> {
            let mut acc = vec![ctx.el_zero(); pm];
            acc[0] = ctx.el_one();
            for i in 0..pm {
                let conj: Vec<FieldElement> = h
                    .iter()
                    .enumerate()
                    .map(|(k, hk)| ctx.mul(hk, &zeta_pows[(i * k) % pm]))
                    .collect();
                acc = l_mul(&acc, &conj);
            }
            for (k, c) in acc.iter().enumerate().skip(1) {
                if !ctx.is_zero(c) {
                    return Err(Error::NormCongruenceFailed(format!(
                        "conjugate product has a nonzero Y^{k} coordinate"
                    )));
                }
            }
            Ok(acc[0].clone())
        };

        let mut used = 0usize;
        let mut trace: Vec<u64> = Vec::new();
        let mut done = false;
        let check = |span: &mut Subgroup,
                         used: &mut usize,
                         trace: &mut Vec<u64>,
                         nrm: FieldElement|
         -> Result<bool> {
            if ctx.is_zero(&nrm) {
                // A norm can vanish at working precision only for very deep
                // elements; skip such degenerate generators.
                return Ok(false);
            }
            span.insert(&ctx.dlog(&nrm, m)?)?;
            *used += 1;
            let idx = span.index_log_p() as u64;
            trace.push(idx);
            if idx < m as u64 {
                return Err(Error::InternalInconsistency(format!(
                    "norm span has index p^{idx} < p^{m}, violating class field theory"
                )));
            }
            Ok(idx == m as u64)
        };

        // h = Y: N(Y) = z (up to the root-of-unity product, which is trivial
        // for odd p) — the radicand itself.
        let mut h = vec![ctx.el_zero(); pm];
        h[1 % pm] = ctx.el_one();
        if check(&mut span, &mut used, &mut trace, norm(&h)?)? {
            done = true;
        }

        // Binomial norms: for gcd(i, p) = 1 the conjugate product of the
        // linear element u − Y^i collapses to the closed form
        // ∏_k (u − ζ^k Y^i) = u^{p^m} − z^i, so these cost one power and one
        // subtraction each — no polynomial arithmetic.  Sweep u over the
        // filtration generators and small scalars, pass by pass in i, and
        // stop after one pass that no longer cuts the span's index.
        let pm_u64 = p_pow(p, m)?;
        let mut u_pool: Vec<FieldElement> = vec![ctx.el_one()];
        for idx in 0..dim {
            u_pool.push(ctx.basis_element(idx));
        }
        for t in 1..=ctx.power_cutoff(m) {
            for s in 0..ctx.par.f {
                let mut tau = ctx.zq.fq_zero();
                tau[s] = 1;
                u_pool.push(ctx.principal_gen(&tau, t));
            }
        }
        for a in 2..p.min(6) {
            u_pool.push(ctx.el_from_u64(a));
        }
        u_pool.push(ctx.el_zeta());

        let mut zi = ctx.el_one();
        let mut pass_was_dry = false;
        'binomial: for i in 1..pm as u64 {
            zi = ctx.mul(&zi, z);
            if i % p == 0 {
                continue;
            }
            if pass_was_dry {
                break;
            }
            let before = span.index_log_p();
            for u in &u_pool {
                if done || used >= self.family_budget {
                    break 'binomial;
                }
                let nrm = ctx.sub(&ctx.pow_u64(u, pm_u64), &zi);
                if check(&mut span, &mut used, &mut trace, nrm)? {
                    done = true;
                }
            }
            pass_was_dry = span.index_log_p() == before;
        }

        // Monomials λ^a Y^k only reach valuations of L in the lattice
        // generated by v_L(λ) and v_L(Y), whose index in Z is
        // g = gcd(v_F(z), p^m) when g > 1.  The deep principal units of L
        // whose norms fill the last classes of the norm group then require
        // leading-digit cancellations that blind sampling hits with only
        // exponentially small probability.  Construct deep elements by an
        // explicit cancellation ladder instead.  Two facts make the ladder
        // computable without a uniformizer of L:
        // * D(x) = v_F(N(x)) = f(L/F)·v_L(x) is a scaled valuation on L;
        // * for a unit quotient u of O_L, res N(u) = N_{k_L/k_F}(ū)^{e(L/F)},
        //   which on F_q-scalar digits is the p^m-th power map — invertible
        //   because gcd(p^m, q − 1) = 1 — so the scalar t cancelling the
        //   leading digit of x against a monomial of equal D-value is solved
        //   exactly from the two norm residues.
        // Each time the ladder's D-value leaves the lattice spanned so far,
        // the lattice refines and a new ladder starts from the power of the
        // fresh element that the old lattice can match (for the first stage
        // this is Y^{p^m/g}, matched by λ^{v_F(z)/g}).  It ends at lattice
        // index 1, or early when no monomial matches a digit that sits in a
        // proper residue extension of L over F.
        let gauge_hi = m as u64 * ctx.e as u64;
        let w_val = ctx.val(z).ok_or(Error::ZeroElement)?;
        let g = gcd(w_val, pm_u64);
        let k0 = (pm_u64 / g) as usize;
        let depth_cap = ctx.e as u64 * (ctx.par.prec as u64).saturating_sub(2);
        let d_of = |x: &[FieldElement]| -> Result<Option<u64>> { Ok(ctx.val(&norm(x)?)) };
        let lead = |y: &FieldElement, d: u64| -> Result<FqEl> {
            Ok(ctx.residue(&ctx.div_lambda_k(y, d)?))
        };
        let ypow = |k: u64| -> Vec<FieldElement> {
            let mut v = vec![ctx.el_zero(); pm];
            v[(k as usize) % pm] = ctx.el_one();
            v
        };
        let q1 = ctx.zq.q - 1;
        let mut pm_inv = 1u64;
        while (pm_inv * (pm_u64 % q1)) % q1 != 1 {
            pm_inv += 1;
        }
        // Deep elements with their D-values and the power range each
        // contributes to the sampling basis (the lattice index it refined).
        let mut deep: Vec<(Vec<FieldElement>, u64, u64)> = Vec::new();
        if g > 1 {
            let kcap = 2 * p as usize + 2;
            let modl = pm_u64 / g;
            let mut lat = g;
            let mut lat_prev = g;
            'stage: for _ in 0..=m {
                if lat == 1 {
                    break;
                }
                // Ladder start whose D-value the current matcher pool can hit.
                let last: Option<(Vec<FieldElement>, u64)> =
                    deep.last().map(|(w, dw, _)| (w.clone(), *dw));
                let mut x = match &last {
                    None => ypow(k0 as u64),
                    Some((wp, dw)) => {
                        let l = dw / gcd(*dw, lat_prev) * lat_prev;
                        if l > depth_cap {
                            break;
                        }
                        let mut acc = ypow(0);
                        for _ in 0..(l / dw) {
                            acc = l_mul(&acc, wp);
                        }
                        acc
                    }
                };
                // Matcher pool: powers of the last deep element (stage one
                // has none, so only the identity — pure λ^a Y^k monomials).
                let w_pows: Vec<Vec<FieldElement>> = match &last {
                    None => vec![ypow(0)],
                    Some((wp, dw)) => {
                        let jcap = (depth_cap / dw).min(2 * p + 2) as usize;
                        let mut pows = Vec::with_capacity(jcap + 1);
                        let mut acc = ypow(0);
                        for _ in 0..=jcap {
                            pows.push(acc.clone());
                            acc = l_mul(&acc, wp);
                        }
                        pows
                    }
                };
                for _ in 0..(3 * m as usize + 10) {
                    let nx = norm(&x)?;
                    let dx = match ctx.val(&nx) {
                        Some(d) if d <= depth_cap => d,
                        _ => {
                            if deep.is_empty() {
                                deep.push((x, depth_cap, p));
                            }
                            break 'stage;
                        }
                    };
                    if dx % lat != 0 {
                        let nl = gcd(lat, dx);
                        lat_prev = lat;
                        deep.push((x, dx, lat / nl));
                        lat = nl;
                        continue 'stage;
                    }
                    let rho_x = lead(&nx, dx)?;
                    let mut improved = false;
                    'matcher: for (j, wj) in w_pows.iter().enumerate() {
                        let jd = j as u64 * last.as_ref().map_or(0, |(_, dw)| *dw);
                        if jd > dx {
                            break;
                        }
                        let rem = dx - jd;
                        if rem % g != 0 {
                            continue;
                        }
                        // Solve rem = p^m·a + v_F(z)·k; k is determined
                        // modulo p^m/g, and stepping it by that modulus
                        // multiplies the matcher's digit by the residue of
                        // the fundamental lattice unit — the variants sweep
                        // digit classes a plain scalar cannot reach.
                        let mut k = 0u64;
                        if modl > 1 {
                            let target = (rem / g) % modl;
                            while (k * (w_val / g)) % modl != target {
                                k += 1;
                            }
                        }
                        let mut vars = 0usize;
                        while k < pm_u64 && k * w_val <= rem && vars < kcap {
                            let a = (rem - k * w_val) / pm_u64;
                            let mut base = if k > 0 { l_mul(wj, &ypow(k)) } else { wj.clone() };
                            if a > 0 {
                                let la = ctx.lam_pow(a);
                                for c in base.iter_mut() {
                                    *c = ctx.mul(c, &la);
                                }
                            }
                            let nb = norm(&base)?;
                            if ctx.val(&nb) == Some(dx) {
                                let rho_b = lead(&nb, dx)?;
                                let ratio = ctx.zq.fq_mul(&rho_x, &ctx.zq.fq_inv(&rho_b)?);
                                let tbar = ctx.zq.fq_pow(&ratio, pm_inv);
                                let tel = ctx.scale_zq(&ctx.zq.teich_lift(&tbar), &ctx.el_one());
                                let cand: Vec<FieldElement> = x
                                    .iter()
                                    .zip(base.iter())
                                    .map(|(xc, bc)| ctx.sub(xc, &ctx.mul(&tel, bc)))
                                    .collect();
                                if let Some(dc) = d_of(&cand)? {
                                    if dc > dx {
                                        x = cand;
                                        improved = true;
                                        break 'matcher;
                                    }
                                }
                            }
                            k += modl;
                            vars += 1;
                        }
                    }
                    if !improved {
                        // Digit outside every matcher class: L has a proper
                        // residue extension here; keep the depth gained.
                        if deep.is_empty() {
                            deep.push((x, dx, p));
                        }
                        break 'stage;
                    }
                }
                break;
            }
        }
        // Table range: twice the refined lattice index, so sums of terms with
        // equal valuation realize enough independent digit lines to span the
        // residue field of L when it extends k_F (digits multiply by a power
        // of the fundamental-unit residue per power step).
        let deep_tables: Vec<Vec<Vec<FieldElement>>> = deep
            .iter()
            .map(|(wp, _, cap)| {
                let r = (2 * *cap).clamp(2, pm_u64) as usize;
                let mut tbl = Vec::with_capacity(r);
                let mut acc = ypow(0);
                for _ in 0..r {
                    tbl.push(acc.clone());
                    acc = l_mul(&acc, wp);
                }
                tbl
            })
            .collect();

        // Dense random polynomials h.  Sparse shapes norm into the subgroup
        // the binomial family generates, so every coefficient is drawn
        // uniformly from the ring of integers.  Three alternating shapes:
        // plain Y-power coordinates; λ-gauged coefficients, which spread the
        // term valuations once m·e is large; and gauged coordinates against a
        // random product of deep-element powers, which walk the filtration of
        // L instead of sitting on the monomial valuation lattice.
        let mut draw = 0usize;
        while !done && used < self.family_budget && draw < 16 * self.family_budget {
            let shape = draw % 3;
            let variant = (draw / 3) % 3;
            draw += 1;
            let h: Vec<FieldElement> = if shape == 0 {
                (0..pm).map(|_| ctx.random_element(rng)).collect()
            } else if shape == 1 || deep_tables.is_empty() {
                (0..pm)
                    .map(|_| {
                        ctx.mul(
                            &ctx.random_element(rng),
                            &ctx.lam_pow(rng.gen_range(0..gauge_hi)),
                        )
                    })
                    .collect()
            } else {
                // Sparse sums over the deep-element basis: a few independent
                // random power-products, each times a random gauged
                // Y-polynomial.  Single products walk every valuation class
                // of L; sums of two or three let term pairs realize unit
                // parts at the small off-lattice levels, which is where the
                // norms of the shallow unit filtration of L come from.
                let mut acc = vec![ctx.el_zero(); pm];
                for _ in 0..=variant {
                    let mut b = ypow(0);
                    for tbl in &deep_tables {
                        b = l_mul(&b, &tbl[rng.gen_range(0..tbl.len())]);
                    }
                    let mut cpoly = vec![ctx.el_zero(); pm];
                    for slot in cpoly.iter_mut().take(k0) {
                        *slot = ctx.mul(
                            &ctx.random_element(rng),
                            &ctx.lam_pow(rng.gen_range(0..gauge_hi)),
                        );
                    }
                    let term = l_mul(&cpoly, &b);
                    for (a, t) in acc.iter_mut().zip(term.iter()) {
                        *a = ctx.add(a, t);
                    }
                }
                acc
            };
            if h.iter().all(|c| ctx.is_zero(c)) {
                continue;
            }
            if check(&mut span, &mut used, &mut trace, norm(&h)?)? {
                done = true;
            }
        }

        // Rescue scan.  If the random families stall, the missing classes
        // are norms of unit-filtration generators of L at specific levels,
        // and the remaining work is deterministic: manufacture an integral
        // element of minimal valuation, then walk the valuation levels of L
        // and insert the norms of 1 + t·M for a representative monomial M of
        // each level and every Teichmüller digit t, plus the monomial norms
        // themselves (uniformizer classes).  Random sums realize these only
        // with vanishing probability once the missing directions are few.
        if !done {
            // Euclidean reduction toward the minimal reachable valuation.
            // For integral x, y with D(x) = dx ≥ k·D(y), the combination
            //   x · ∏_{i≥1} σ_i(y^k) / N(y^k)
            // is x/y^k written as an integral polynomial: the numerator is
            // N(y^k)·(x/y^k) and the norm is an F-scalar, so dividing every
            // coefficient by it is exact and leaves D = dx − k·D(y).  Each
            // division burns D(y^k) λ-digits of working precision, so a
            // budget keeps enough digits for the conductor scan; if the
            // budget stops the reduction early the certificate may stay out
            // of reach, and the caller retries with a deeper context.
            let sigma = |h: &[FieldElement], i: usize| -> Vec<FieldElement> {
                h.iter()
                    .enumerate()
                    .map(|(k, hk)| ctx.mul(hk, &zeta_pows[(i * k) % pm]))
                    .collect()
            };
            let mut pool: Vec<(Vec<FieldElement>, u64)> = Vec::new();
            {
                let mut lam_poly = vec![ctx.el_zero(); pm];
                lam_poly[0] = ctx.lam_pow(1);
                pool.push((lam_poly, pm_u64));
            }
            if w_val > 0 {
                pool.push((ypow(1), w_val));
            }
            for (w, dw, _) in &deep {
                pool.push((w.clone(), *dw));
            }
            let scan_margin = ctx.power_cutoff(m) + ctx.e as u64 + 2;
            let mut digit_budget =
                (ctx.e as u64 * ctx.par.prec as u64).saturating_sub(scan_margin);
            loop {
                pool.sort_by_key(|(_, d)| *d);
                pool.dedup_by_key(|(_, d)| *d);
                let ymin = pool[0].0.clone();
                let dmin = pool[0].1;
                let mut next: Option<(Vec<FieldElement>, u64)> = None;
                for (x, dx) in pool.iter().skip(1) {
                    let k = dx / dmin;
                    let r = dx % dmin;
                    if r == 0 {
                        continue;
                    }
                    let cost = k * dmin;
                    if cost > digit_budget {
                        continue;
                    }
                    let mut yk = ypow(0);
                    for _ in 0..k {
                        yk = l_mul(&yk, &ymin);
                    }
                    let mut num = x.clone();
                    for i in 1..pm {
                        num = l_mul(&num, &sigma(&yk, i));
                    }
                    let scalar = norm(&yk)?;
                    if ctx.val(&scalar) != Some(cost) {
                        continue;
                    }
                    let sinv = ctx.inv(&ctx.div_lambda_k(&scalar, cost)?)?;
                    let red: Result<Vec<FieldElement>> = num
                        .iter()
                        .map(|c| Ok(ctx.mul(&ctx.div_lambda_k(c, cost)?, &sinv)))
                        .collect();
                    digit_budget -= cost;
                    next = Some((red?, r));
                    break;
                }
                match next {
                    Some(entry) => pool.push(entry),
                    None => break,
                }
            }

            // Levels reachable as sums of pool valuations, with up to three
            // alternative first factors per level so that distinct
            // factorizations contribute distinct residue digit lines.
            let teich_list: Vec<FieldElement> = ctx
                .zq
                .fq_enumerate()
                .filter(|r| !ctx.zq.fq_is_zero(r))
                .map(|r| ctx.scale_zq(&ctx.zq.teich_lift(&r), &ctx.el_one()))
                .collect();
            let dmax = depth_cap.min(pm_u64 * ctx.power_cutoff(m));
            let mut steps: Vec<Vec<usize>> = vec![Vec::new(); (dmax + 1) as usize];
            for delta in 1..=dmax as usize {
                for (i, (_, d)) in pool.iter().enumerate() {
                    let d = *d as usize;
                    if d >= 1
                        && d <= delta
                        && (delta == d || !steps[delta - d].is_empty())
                        && steps[delta].len() < 3
                    {
                        steps[delta].push(i);
                    }
                }
            }
            // When Y is a unit its residue generates the residue extension
            // of L, so Y-power twists sweep every digit line at a level.
            let kvar = if w_val == 0 { pm } else { 1 };
            'rescue: for delta in 1..=dmax as usize {
                for (alt, first) in steps[delta].clone().into_iter().enumerate() {
                    if alt > 0 && span.index_log_p() as u32 == m {
                        break;
                    }
                    let mut mono = pool[first].0.clone();
                    let mut rem = delta - pool[first].1 as usize;
                    while rem > 0 {
                        let i = steps[rem][0];
                        mono = l_mul(&mono, &pool[i].0);
                        rem -= pool[i].1 as usize;
                    }
                    if check(&mut span, &mut used, &mut trace, norm(&mono)?)? {
                        done = true;
                        break 'rescue;
                    }
                    for k in 0..kvar {
                        let base = if k == 0 {
                            mono.clone()
                        } else {
                            l_mul(&mono, &ypow(k as u64))
                        };
                        for t in &teich_list {
                            let mut u: Vec<FieldElement> =
                                base.iter().map(|c| ctx.mul(t, c)).collect();
                            u[0] = ctx.add(&u[0], &ctx.el_one());
                            if check(&mut span, &mut used, &mut trace, norm(&u)?)? {
                                done = true;
                                break 'rescue;
                            }
                        }
                    }
                }
            }
        }

        if !done {
            eprintln!(
                "DEBUG ladder summary: w_val={w_val} g={g} m={m} deep={:?} zdl={:?}",
                deep.iter().map(|(_, d, c)| (*d, *c)).collect::<Vec<_>>(),
                &ctx.dlog(z, m)?[..]
            );
            let cutoff = ctx.power_cutoff(m);
            for t in 1..=cutoff {
                for s in 0..ctx.par.f {
                    let mut tau = ctx.zq.fq_zero();
                    tau[s] = 1;
                    let gen = ctx.principal_gen(&tau, t);
                    let dl = ctx.dlog(&gen, m)?;
                    if !span.contains(&dl) {
                        let sc: Vec<u64> = dl.iter().map(|c| (c * p) % pm_u64).collect();
                        eprintln!(
                            "DEBUG missing: principal t={t} s={s} (p-mult inside: {})",
                            span.contains(&sc)
                        );
                    }
                }
            }
            for (nm, gen) in [("lambda", ctx.lam_pow(1)), ("zeta", ctx.el_zeta())] {
                let dl = ctx.dlog(&gen, m)?;
                if !span.contains(&dl) {
                    let sc: Vec<u64> = dl.iter().map(|c| (c * p) % pm_u64).collect();
                    eprintln!(
                        "DEBUG missing: {nm} (p-mult inside: {})",
                        span.contains(&sc)
                    );
                }
            }
            return Err(Error::CertificateNotReached {
                target: m as u64,
                achieved: span.index_log_p() as u64,
                used,
            });
        }
        eprintln!(
            "DEBUG ok: w_val={w_val} g={g} m={m} used={used} deep={:?} zdl={:?}",
            deep.iter().map(|(_, d, c)| (*d, *c)).collect::<Vec<_>>(),
            &ctx.dlog(z, m)?[..]
        );
        let info = NormGroupInfo {
            span,
            generators_used: used,
            index_trace: trace,
        };
        self.span_cache.insert(key, info.clone());
        Ok(info)
    }

    /// Conductor exponent of `F(z^{1/p^m})/F` from first principles.
    pub fn conductor<R: Rng>(
        &mut self,
        z: &FieldElement,
        m: u32,
        rng: &mut R,
    ) -> Result<ConductorResult> {
        assert!(m >= 1 && m <= self.ctx.par.n, "need 1 <= m <= n");
        let (z, m_eff) = self.kummer_normalize(z, m)?;
        if m_eff == 0 {
            return Ok(ConductorResult {
                conductor: 0,
                m_eff,
                generators_used: 0,
                witness_level: None,
                index_trace: Vec::new(),
            });
        }
        let info = self.norm_group(&z, m_eff, rng)?;
        let prof = self.profile(m_eff)?;
        let cutoff = self.ctx.power_cutoff(m_eff);
        for t in (1..=cutoff).rev() {
            for s in 0..self.ctx.par.f {
                if !info.span.contains(&prof[(t - 1) as usize][s]) {
                    return Ok(ConductorResult {
                        conductor: t + 1,
                        m_eff,
                        generators_used: info.generators_used,
                        witness_level: Some(t),
                        index_trace: info.index_trace.clone(),
                    });
                }
            }
        }
        // Every unit is a norm: unramified, conductor 0. (U_0 and U_1 have
        // the same image in Q_m since Teichmüller units are p^m-divisible.)
        Ok(ConductorResult {
            conductor: 0,
            m_eff,
            generators_used: info.generators_used,
            witness_level: None,
            index_trace: info.index_trace.clone(),
        })
    }

    /// Order exponent of the norm-residue symbol class of `b` for the
    /// extension tower over `a`: the least `k >= 0` such that `p^k·dlog(b)`
    /// lies in the norm span of `F(a^{1/p^m})` (after normalizing `a`).
    /// Always at most the effective depth.
    pub fn symbol_order<R: Rng>(
        &mut self,
        a: &FieldElement,
        b: &FieldElement,
        m: u32,
        rng: &mut R,
    ) -> Result<u32> {
        let (z, m_eff) = self.kummer_normalize(a, m)?;
        if m_eff == 0 {
            return Ok(0);
        }
        let info = self.norm_group(&z, m_eff, rng)?;
        let pm = p_pow(self.ctx.par.p, m_eff)?;
        let d = self.ctx.dlog(b, m_eff)?;
        for k in 0..=m_eff {
            let scaled: Vec<u64> = d
                .iter()
                .map(|&c| mul_mod(p_pow(self.ctx.par.p, k).unwrap(), c, pm))
                .collect();
            if info.span.contains(&scaled) {
                return Ok(k);
            }
        }
        Err(Error::InternalInconsistency(
            "symbol order exceeded the extension depth".into(),
        ))
    }

    /// Symbol order maximized over Frobenius twists of the second argument
    /// (all twists agree when f = 1).
    pub fn twisted_symbol_order<R: Rng>(
        &mut self,
        a: &FieldElement,
        b: &FieldElement,
        m: u32,
        rng: &mut R,
    ) -> Result<u32> {
        let mut best = 0;
        for i in 0..self.ctx.par.f {
            let tw = self.ctx.galois(b, 1, i);
            best = best.max(self.symbol_order(a, &tw, m, rng)?);
        }
        Ok(best)
    }

    /// Explicit cyclotomic symbol value: for a principal unit `x`,
    /// `N_{F/Q_p}(x) ≡ 1 mod p^n`, and the class of `(N(x) − 1)/p^n mod p^n`
    /// controls the symbol against ζ. Returns that value.
    pub fn zeta_symbol_value(&self, x: &FieldElement) -> Result<u64> {
        let ctx = &self.ctx;
        if ctx.residue(x) != ctx.zq.fq_one() || ctx.val(x) != Some(0) {
            return Err(Error::NotPrincipalUnit(
                "the cyclotomic symbol value needs a principal unit".into(),
            ));
        }
        let nrm = ctx.norm_over(&ctx.group_elements(), x);
        // The norm must be a scalar (Galois-fixed).
        for i in 0..ctx.e {
            for j in 0..ctx.par.f {
                if (i, j) != (0, 0) && nrm.coeffs()[i * ctx.par.f + j] != 0 {
                    return Err(Error::FixedFieldCheckFailed(
                        "norm over the full Galois group is not a scalar".into(),
                    ));
                }
            }
        }
        let scalar = nrm.coeffs()[0];
        let pn = self.ctx.pn;
        if scalar % pn != 1 {
            return Err(Error::InternalInconsistency(format!(
                "norm of a principal unit is {scalar}, not 1 mod p^n"
            )));
        }
        let value = (scalar - 1) / pn;
        Ok(value % pn)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine(p: u64, n: u32, f: usize) -> ConductorEngine {
        let ctx = FieldCtx::new(FieldParams {
            p,
            n,
            f,
            prec: n + 6,
        })
        .unwrap();
        ConductorEngine::new(ctx, 400)
    }

    #[test]
    fn worked_conductor_of_cube_root_of_three() {
        // At (p,n,f) = (3,1,1): F = Q_3(ζ_3), L = F(3^{1/3}). The norm span
        // certificate gives index 3 and the conductor is 4.
        let mut eng = engine(3, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = eng.ctx.el_from_u64(3);
        let res = eng.conductor(&z, 1, &mut rng).unwrap();
        assert_eq!(res.conductor, 4);
        assert_eq!(res.m_eff, 1);
        assert_eq!(res.witness_level, Some(3));
    }

    #[test]
    fn worked_conductor_of_cube_root_of_zeta() {
        // At (3,1,1): L = F(ζ_3^{1/3}) = Q_3(ζ_9), with conductor 3.
        let mut eng = engine(3, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = eng.ctx.el_zeta();
        let res = eng.conductor(&z, 1, &mut rng).unwrap();
        assert_eq!(res.conductor, 3);
        assert_eq!(res.witness_level, Some(2));
    }

    #[test]
    fn trivial_extension_has_conductor_zero() {
        let mut eng = engine(3, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = eng.ctx.add(&eng.ctx.el_one(), &eng.ctx.el_lambda());
        let z = eng.ctx.pow_u64(&u, 3);
        let res = eng.conductor(&z, 1, &mut rng).unwrap();
        assert_eq!(res.conductor, 0);
        assert_eq!(res.m_eff, 0);
    }

    #[test]
    fn unramified_extension_has_conductor_zero() {
        // The boundary unit ε* = 1 + τ*λ^{p^n} is not a p-th power (τ* is
        // outside the Artin–Schreier image), yet all units are norms from
        // F(ε*^{1/p}): the extension is unramified and the conductor is 0.
        for (p, n, f) in [(3u64, 1u32, 1usize), (3, 1, 2)] {
            let mut eng = engine(p, n, f);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let eps = eng.ctx.eps_gen();
            let res = eng.conductor(&eps, 1, &mut rng).unwrap();
            assert_eq!(res.m_eff, 1, "ε* is not a p-th power");
            assert_eq!(res.conductor, 0, "p={p} f={f}");
        }
    }

    #[test]
    fn zeta_symbol_anchor_value() {
        // (3,1,1): N_G(4) = 16, (16 − 1)/3 = 5 ≡ 2 mod 3.
        let eng = engine(3, 1, 1);
        let v = eng.zeta_symbol_value(&eng.ctx.el_from_u64(4)).unwrap();
        assert_eq!(v, 2);
    }

    #[test]
    fn symbol_order_of_norms_is_zero_and_nonnorms_positive() {
        let mut eng = engine(3, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let z = eng.ctx.el_from_u64(3);
        // p itself is a norm from F(p^{1/p}) (it is N(Y) up to sign), so the
        // symbol (p, p) has order 0... compute honestly instead for λ:
        // N_Σ(λ) = p means λ^... — use the oracle itself as ground truth:
        let k_self = eng.symbol_order(&z, &z, 1, &mut rng).unwrap();
        assert_eq!(k_self, 0, "z is always a norm of its own extension");
        // The witness level unit is not a norm: symbol order must be 1.
        let wit = eng.ctx.principal_gen(&eng.ctx.zq.fq_one(), 3);
        let k = eng.symbol_order(&z, &wit, 1, &mut rng).unwrap();
        assert_eq!(k, 1);
    }
}

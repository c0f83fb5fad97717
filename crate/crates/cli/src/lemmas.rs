//! Structural property suite.
//!
//! Each property is a falsifiable statement about the unit filtration, the
//! eigenspace decomposition, the group-ring action, the generator system, or
//! the norm-residue pairing.  A property runs many sampled checks and emits
//! a single report row: `match = true` iff every check passed, with the
//! sample count and the first few failures in the note.  Properties that do
//! not apply to a cell (wrong n, f, or p) emit an explicit skip row.

use std::time::Instant;

use conductor_core::arith::pow_mod;
use conductor_core::conductor::ConductorEngine;
use conductor_core::dmod::{DElement, GeneratorSet};
use conductor_core::report::ConductorReport;
use conductor_core::zq::FqEl;
use conductor_core::{Error, FieldCtx, FieldElement, FieldParams, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::suites::sample_fr_nonpower;
use crate::{row_rng, row_seed, RunConfig};

/// Result of one property over one cell.
enum Outcome {
    Ran {
        samples: usize,
        failed: usize,
        msgs: Vec<String>,
    },
    Skip(String),
}

/// Check accumulator.
struct Tally {
    samples: usize,
    failed: usize,
    msgs: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            samples: 0,
            failed: 0,
            msgs: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failed += 1;
            if self.msgs.len() < 4 {
                self.msgs.push(msg());
            }
        }
    }

    fn outcome(self) -> Outcome {
        Outcome::Ran {
            samples: self.samples,
            failed: self.failed,
            msgs: self.msgs,
        }
    }
}

fn prop_row(par: FieldParams, name: &str, out: Result<Outcome>, seed: u64, ms: u128) -> ConductorReport {
    let (matches, note) = match out {
        Err(e) => (None, format!("error: {name}: {e}")),
        Ok(Outcome::Skip(reason)) => (None, format!("skipped: {name}: {reason}")),
        Ok(Outcome::Ran {
            samples,
            failed,
            msgs,
        }) => {
            if failed == 0 {
                (Some(true), format!("{name}: {samples} checks passed"))
            } else {
                (
                    Some(false),
                    format!(
                        "{name}: {failed}/{samples} checks failed; first: {}",
                        msgs.join(" | ")
                    ),
                )
            }
        }
    };
    ConductorReport {
        suite: "lemmas".to_string(),
        p: par.p,
        n: par.n,
        f: par.f,
        prec: par.prec,
        element: None,
        r: None,
        m: None,
        formula_f: None,
        oracle_f: None,
        matches,
        index_trace: Vec::new(),
        seed,
        ms,
        note: Some(note),
    }
}

/// Run every property over the engine's cell.
pub fn run(eng: &mut ConductorEngine, cfg: &RunConfig) -> Result<Vec<ConductorReport>> {
    let par = eng.ctx.par;
    let gs = if par.f == 1 {
        Some(eng.ctx.build_generators()?)
    } else {
        None
    };
    let mut rows = Vec::new();
    // Each property draws from its own keyed stream so that adding or
    // reordering properties cannot change another property's samples.
    macro_rules! prop {
        ($name:literal, $body:expr) => {{
            let key = format!("lemmas:{}:{}:{}:{}", par.p, par.n, par.f, $name);
            let seed = row_seed(cfg.seed, &key);
            let mut rng = row_rng(cfg.seed, &key);
            let t0 = Instant::now();
            #[allow(clippy::redundant_closure_call)]
            let out = ($body)(&mut rng);
            rows.push(prop_row(par, $name, out, seed, t0.elapsed().as_millis()));
        }};
    }

    prop!("eigmod", |rng: &mut ChaCha8Rng| prop_eigmod(&eng.ctx, rng));
    prop!("moving", |rng: &mut ChaCha8Rng| prop_moving(&eng.ctx, rng));
    prop!("repeat", |rng: &mut ChaCha8Rng| prop_repeat(&eng.ctx, rng));
    prop!("powers", |rng: &mut ChaCha8Rng| prop_powers(&eng.ctx, rng));
    prop!("pair", |rng: &mut ChaCha8Rng| prop_pair(eng, rng));
    prop!("nondegen", |rng: &mut ChaCha8Rng| prop_nondegen(
        eng,
        gs.as_ref(),
        rng
    ));
    prop!("unnondegen", |rng: &mut ChaCha8Rng| prop_unnondegen(
        eng,
        gs.as_ref(),
        rng
    ));
    prop!("trivsyms", |rng: &mut ChaCha8Rng| prop_trivsyms(eng, rng));
    prop!("struct", |rng: &mut ChaCha8Rng| prop_struct(
        &eng.ctx,
        gs.as_ref(),
        rng
    ));
    prop!("newgen", |rng: &mut ChaCha8Rng| prop_newgen(
        &eng.ctx,
        gs.as_ref(),
        rng
    ));
    prop!("2ideals", |rng: &mut ChaCha8Rng| prop_2ideals(
        &eng.ctx,
        gs.as_ref(),
        rng
    ));
    prop!("2idealsr1", |rng: &mut ChaCha8Rng| prop_2idealsr1(
        &eng.ctx,
        gs.as_ref(),
        rng
    ));
    prop!("2idealsr0", |rng: &mut ChaCha8Rng| prop_2idealsr0(
        &eng.ctx,
        gs.as_ref(),
        rng
    ));
    prop!("symbolsr0", |rng: &mut ChaCha8Rng| prop_symbolsr0(
        eng,
        gs.as_ref(),
        rng
    ));
    prop!("symbolsr1", |rng: &mut ChaCha8Rng| prop_symbolsr1(
        eng,
        gs.as_ref(),
        rng
    ));
    Ok(rows)
}

// ---- sampling helpers -------------------------------------------------------

fn rand_fq_nonzero<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> FqEl {
    loop {
        let mut t = ctx.zq.fq_zero();
        let mut any = false;
        for c in t.iter_mut() {
            *c = rng.gen_range(0..ctx.par.p);
            any |= *c != 0;
        }
        if any {
            return t;
        }
    }
}

/// Random unit with filtration level exactly `t` (nonzero leading plus a
/// random deeper tail).
fn unit_at_level<R: Rng>(ctx: &FieldCtx, rng: &mut R, t: u64) -> FieldElement {
    let mut x = ctx.principal_gen(&rand_fq_nonzero(ctx, rng), t);
    for _ in 0..2 {
        let t2 = t + 1 + rng.gen_range(0..ctx.e as u64);
        x = ctx.mul(&x, &ctx.principal_gen(&rand_fq_nonzero(ctx, rng), t2));
    }
    x
}

fn as_unit(x: &FieldElement) -> DElement {
    DElement {
        lam: 0,
        unit: x.clone(),
    }
}

/// Normalized eigenspace projection of a unit.
fn idem_unit(ctx: &FieldCtx, x: &FieldElement, r: i64) -> Result<FieldElement> {
    Ok(ctx.d_idem(&as_unit(x), r)?.unit)
}

/// Eigenspace unit with level exactly `t` (lands in the class `t mod p−1`).
fn sample_vprime<R: Rng>(ctx: &FieldCtx, rng: &mut R, t: u64) -> Result<FieldElement> {
    let r = (t % (ctx.par.p - 1)) as i64;
    for _ in 0..32 {
        let z = idem_unit(ctx, &unit_at_level(ctx, rng, t), r)?;
        if ctx.level(&z) == Some(t) {
            return Ok(z);
        }
    }
    Err(Error::SearchFailed(format!(
        "no eigenspace unit at exact level {t}"
    )))
}

/// Random unit exponent mod p^n.
fn rand_unit_exp<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> u64 {
    loop {
        let a = rng.gen_range(1..ctx.pn);
        if a % ctx.par.p != 0 {
            return a;
        }
    }
}

/// Random power of the wild generator γ (a Galois exponent).
fn rand_gamma_power<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> u64 {
    let reps = ctx.pn / ctx.par.p; // |Γ| = p^{n−1}
    pow_mod(ctx.gamma_a, rng.gen_range(0..reps.max(1)), ctx.pn)
}

// ---- filtration / eigenspace properties --------------------------------------

/// Eigenspace projections respect the filtration grading: e_r(1 + τλ^t) has
/// level exactly t when r ≡ t (mod p−1), with leading coefficient injective
/// in τ, and strictly deeper level otherwise.
fn prop_eigmod<R: Rng>(ctx: &FieldCtx, _rng: &mut R) -> Result<Outcome> {
    let p = ctx.par.p;
    let pm1 = p - 1;
    let mut tl = Tally::new();
    for t in 1..=(2 * ctx.e as u64 + p) {
        let rm = t % pm1;
        let mut leadings: Vec<FqEl> = Vec::new();
        for dir in 0..ctx.par.f {
            for c in 1..p {
                let mut tau = ctx.zq.fq_zero();
                tau[dir] = c;
                let x = ctx.principal_gen(&tau, t);
                for rp in 0..pm1 {
                    let y = idem_unit(ctx, &x, rp as i64)?;
                    let lvl = ctx.level(&y);
                    if rp == rm {
                        tl.check(lvl == Some(t), || {
                            format!("e_{rp}(1+τλ^{t}) at level {lvl:?}, want exactly {t}")
                        });
                        if lvl == Some(t) {
                            let lead = ctx.leading_at_level(&y, t);
                            tl.check(!leadings.contains(&lead), || {
                                format!("leading at level {t} repeats across τ")
                            });
                            leadings.push(lead);
                        }
                    } else {
                        tl.check(lvl.map_or(true, |l| l > t), || {
                            format!("e_{rp}(1+τλ^{t}) at level {lvl:?}, want > {t}")
                        });
                    }
                }
            }
        }
    }
    Ok(tl.outcome())
}

/// The coboundary by the wild generator moves a level-t eigenspace unit to
/// level exactly t + (p−1) when p ∤ t, and at least t + 2(p−1) when p | t.
fn prop_moving<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> Result<Outcome> {
    if ctx.par.n == 1 {
        return Ok(Outcome::Skip("the wild generator is trivial at n = 1".into()));
    }
    let p = ctx.par.p;
    let pm1 = p - 1;
    let mut tl = Tally::new();
    for t in 1..=(ctx.e as u64 + p) {
        for _ in 0..3 {
            let z = sample_vprime(ctx, rng, t)?;
            let zc = ctx.d_coboundary(&as_unit(&z), ctx.gamma_a, 0)?.unit;
            let lvl = ctx.level(&zc);
            if t % p != 0 {
                tl.check(lvl == Some(t + pm1), || {
                    format!("coboundary of level {t} lands at {lvl:?}, want exactly {}", t + pm1)
                });
            } else {
                tl.check(lvl.map_or(true, |l| l >= t + 2 * pm1), || {
                    format!("coboundary of level {t} lands at {lvl:?}, want ≥ {}", t + 2 * pm1)
                });
            }
        }
    }
    Ok(tl.outcome())
}

/// Iterating T = γ−1 from level t (with i = t mod p) gains exactly p−1 per
/// step for the first i steps, then at least the floor-corrected bound.
fn prop_repeat<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> Result<Outcome> {
    if ctx.par.n == 1 {
        return Ok(Outcome::Skip("the wild generator is trivial at n = 1".into()));
    }
    let p = ctx.par.p;
    let pm1 = p - 1;
    let mut tl = Tally::new();
    for t in 1..=(ctx.e as u64) {
        for _ in 0..2 {
            let z = sample_vprime(ctx, rng, t)?;
            let i = t % p;
            let jmax = (i + 2).min(p);
            let mut cur = as_unit(&z);
            for j in 1..=jmax {
                cur = ctx.d_coboundary(&cur, ctx.gamma_a, 0)?;
                let lvl = ctx.level(&cur.unit);
                if j <= i {
                    tl.check(lvl == Some(t + j * pm1), || {
                        format!(
                            "T^{j} from level {t} (i = {i}) lands at {lvl:?}, want exactly {}",
                            t + j * pm1
                        )
                    });
                } else {
                    let bound = t + (j + (j - i) / pm1) * pm1;
                    tl.check(lvl.map_or(true, |l| l >= bound), || {
                        format!("T^{j} from level {t} (i = {i}) lands at {lvl:?}, want ≥ {bound}")
                    });
                }
            }
        }
    }
    Ok(tl.outcome())
}

/// p^j-th powers push level a+b (a < p^{n−j}) to at least p^j·a + b.
fn prop_powers<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> Result<Outcome> {
    if ctx.par.n == 1 {
        return Ok(Outcome::Skip(
            "power scaling below depth needs n ≥ 2".into(),
        ));
    }
    let p = ctx.par.p;
    let n = ctx.par.n;
    let mut tl = Tally::new();
    for j in 1..n {
        let pj = p.pow(j);
        let amax = p.pow(n - j).min(4);
        for a in 1..amax {
            for b in 0..=(ctx.e as u64).min(8) {
                for _ in 0..2 {
                    let z = unit_at_level(ctx, rng, a + b);
                    let w = ctx.pow_u64(&z, pj);
                    let lvl = ctx.level(&w);
                    tl.check(lvl.map_or(true, |l| l >= pj * a + b), || {
                        format!(
                            "level {}^(p^{j}) lands at {lvl:?}, want ≥ {}",
                            a + b,
                            pj * a + b
                        )
                    });
                }
            }
        }
    }
    Ok(tl.outcome())
}

// ---- pairing properties -------------------------------------------------------

/// Classes of F^r pair trivially against every eigenspace except the
/// complementary one (s ≡ 1 − r mod p−1).
fn prop_pair(eng: &mut ConductorEngine, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if eng.ctx.par.f != 1 {
        return Ok(Outcome::Skip(
            "the eigenspace pairing suite is untwisted (f = 1)".into(),
        ));
    }
    let p = eng.ctx.par.p;
    let n = eng.ctx.par.n;
    let pm1 = p - 1;
    let combos = (pm1 * (pm1 - 1)) as usize;
    let reps = ((25 + combos - 1) / combos).max(3);
    let mut tl = Tally::new();
    for _ in 0..reps {
        for r in 0..pm1 {
            let x = sample_fr_nonpower(&eng.ctx, rng, r as i64)?;
            for s in 0..pm1 {
                if (r + s) % pm1 == 1 {
                    continue;
                }
                let y = idem_unit(&eng.ctx, &eng.ctx.random_principal_unit(rng), s as i64)?;
                let ord = eng.symbol_order(&x, &y, n, rng)?;
                tl.check(ord == 0, || {
                    format!("order of an e_{s} partner against F^{r} is {ord}, want 0")
                });
            }
        }
    }
    Ok(tl.outcome())
}

/// Every p-th-power-free class of F^r pairs to full order n with some
/// generator of the complementary eigenspace module.
fn prop_nondegen(
    eng: &mut ConductorEngine,
    gs: Option<&GeneratorSet>,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = eng.ctx.par.p;
    let n = eng.ctx.par.n;
    let pm1 = p - 1;
    let pi0m = eng.ctx.d_materialize(&gs.pi0, n);
    let u0m = eng.ctx.d_materialize(&gs.u0, n);
    let vm = eng.ctx.d_materialize(&gs.v, n);
    let w1m = eng.ctx.d_materialize(&gs.w1, n);
    let u1m = eng.ctx.d_materialize(&gs.u1, n);
    let mut us: Vec<Option<FieldElement>> = vec![None; pm1 as usize];
    for s in 2..pm1 {
        us[s as usize] = Some(eng.ctx.d_idem(&gs.u, s as i64)?.unit);
    }
    let reps = ((25 + pm1 as usize - 1) / pm1 as usize).max(3);
    let mut tl = Tally::new();
    for _ in 0..reps {
        for r in 0..pm1 {
            let x = sample_fr_nonpower(&eng.ctx, rng, r as i64)?;
            let s = (1 + pm1 - r) % pm1;
            let partners: Vec<&FieldElement> = match s {
                0 => vec![&pi0m, &u0m, &vm],
                1 => vec![&w1m, &u1m],
                _ => vec![us[s as usize].as_ref().expect("filled above")],
            };
            let mut best = 0;
            for y in partners {
                best = best.max(eng.symbol_order(&x, y, n, rng)?);
            }
            tl.check(best == n, || {
                format!("best pairing order for F^{r} against the e_{s} module is {best}, want {n}")
            });
        }
    }
    Ok(tl.outcome())
}

/// In the residue class r ≡ 1 the pairing against (u₀, v) reaches at least
/// order n − k(r).
fn prop_unnondegen(
    eng: &mut ConductorEngine,
    gs: Option<&GeneratorSet>,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = eng.ctx.par.p;
    let n = eng.ctx.par.n;
    let r_list = crate::suites::r1_list(p, n);
    let u0m = eng.ctx.d_materialize(&gs.u0, n);
    let vm = eng.ctx.d_materialize(&gs.v, n);
    let reps = (25 / r_list.len()).max(13);
    let mut tl = Tally::new();
    for _ in 0..reps {
        for &r in &r_list {
            let k = eng.ctx.k_of_r(r);
            let bound = n - k;
            let x = sample_fr_nonpower(&eng.ctx, rng, r)?;
            let a = eng.symbol_order(&x, &u0m, n, rng)?;
            let b = eng.symbol_order(&x, &vm, n, rng)?;
            tl.check(a.max(b) >= bound, || {
                format!(
                    "pairing of F^{r} against (u₀, v) reaches {}, want ≥ {bound}",
                    a.max(b)
                )
            });
        }
    }
    Ok(tl.outcome())
}

/// Symbol orders drop by at least m against (T^{m−k} y)^{p^k}.
fn prop_trivsyms(eng: &mut ConductorEngine, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if eng.ctx.par.f != 1 {
        return Ok(Outcome::Skip(
            "the order-drop suite is untwisted (f = 1)".into(),
        ));
    }
    let p = eng.ctx.par.p;
    let n = eng.ctx.par.n;
    let pm1 = p - 1;
    let reps = if n == 1 { 7 } else { 4 };
    let mut tl = Tally::new();
    for _ in 0..reps {
        for r in 0..pm1 {
            let x = sample_fr_nonpower(&eng.ctx, rng, r as i64)?;
            let s = (1 + pm1 - r) % pm1;
            let y = idem_unit(&eng.ctx, &eng.ctx.random_principal_unit(rng), s as i64)?;
            let o = eng.symbol_order(&x, &y, n, rng)?;
            for m in 1..=n {
                for k in 0..=m {
                    let yt = eng.ctx.d_t_pow(&as_unit(&y), m - k)?;
                    let y2 = eng.ctx.pow_u64(&yt.unit, p.pow(k));
                    let o2 = eng.symbol_order(&x, &y2, n, rng)?;
                    tl.check(o2 <= o.saturating_sub(m), || {
                        format!(
                            "order against (T^{}y)^(p^{k}) is {o2}, want ≤ {} (base order {o})",
                            m - k,
                            o.saturating_sub(m)
                        )
                    });
                }
            }
        }
    }
    Ok(tl.outcome())
}

// ---- generator-system properties ----------------------------------------------

/// Defining relations and placements of the generator system, all asserted
/// through discrete logarithms at depth n.
fn prop_struct<R: Rng>(ctx: &FieldCtx, gs: Option<&GeneratorSet>, rng: &mut R) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = ctx.par.p;
    let n = ctx.par.n;
    let mut tl = Tally::new();
    let triv = |d: &DElement| -> Result<bool> { Ok(ctx.d_dlog(d, n)?.iter().all(|&c| c == 0)) };
    let same = |a: &DElement, b: &DElement| -> Result<bool> {
        let q = ctx.d_mul(a, &ctx.d_inv(b)?);
        Ok(ctx.d_dlog(&q, n)?.iter().all(|&c| c == 0))
    };
    let sigma_norm = |x: &DElement| -> DElement {
        let mut acc = ctx.d_one();
        for (a, b) in ctx.sigma_elements() {
            acc = ctx.d_mul(&acc, &ctx.d_galois(x, a, b));
        }
        acc
    };

    // Norm and coboundary relations.
    let p_elt = ctx.d_of(&ctx.el_from_u64(p))?;
    tl.check(same(&sigma_norm(&gs.pi), &p_elt)?, || {
        "N_Σ(π) differs from p".into()
    });
    tl.check(triv(&sigma_norm(&gs.u))?, || {
        "N_Σ(u) is nontrivial".into()
    });
    tl.check(
        same(&gs.u, &ctx.d_coboundary(&gs.pi, ctx.sigma_a, 0)?)?,
        || "u differs from π^{σ−1}".into(),
    );
    tl.check(same(&ctx.d_galois(&gs.v, ctx.sigma_a, 0), &gs.v)?, || {
        "σ(v) differs from v".into()
    });
    let chi_inv = conductor_core::arith::inv_mod_ppow(ctx.sigma_a % ctx.pn, p, n as u64)?;
    tl.check(
        same(
            &ctx.d_pow(&ctx.d_galois(&gs.w, ctx.sigma_a, 0), chi_inv),
            &gs.w,
        )?,
        || "σ(ζ)^{χ(σ)^{-1}} differs from ζ".into(),
    );
    tl.check(
        same(&ctx.d_galois(&gs.w, ctx.gamma_a, 0), &ctx.d_pow(&gs.w, ctx.gamma_a))?,
        || "γ(ζ) differs from ζ^{1+p}".into(),
    );
    tl.check(
        same(
            &ctx.d_coboundary(&gs.w1, ctx.gamma_a, 0)?,
            &ctx.d_pow(&gs.w1, p),
        )?,
        || "w₁^{γ−1} differs from w₁^p".into(),
    );
    tl.check(
        same(&gs.u0, &ctx.d_coboundary(&gs.pi0, ctx.gamma_a, 0)?)?,
        || "u₀ differs from π₀^{γ−1}".into(),
    );
    tl.check(triv(&ctx.d_gamma_norm(&gs.u0))?, || {
        "N_Γ(u₀) is nontrivial".into()
    });
    tl.check(same(&gs.v, &ctx.d_of(&ctx.el_from_u64(1 + p))?)?, || {
        "v differs from the scalar 1 + p".into()
    });

    // Eigenspace idempotency of the projected generators.
    tl.check(same(&ctx.d_idem(&gs.pi0, 0)?, &gs.pi0)?, || {
        "π₀ is not e₀-fixed".into()
    });
    tl.check(same(&ctx.d_idem(&gs.u0, 0)?, &gs.u0)?, || {
        "u₀ is not e₀-fixed".into()
    });
    tl.check(same(&ctx.d_idem(&gs.u1, 1)?, &gs.u1)?, || {
        "u₁ is not e₁-fixed".into()
    });

    // Filtration placements.
    tl.check(gs.pi.lam == 1, || {
        format!("π has uniformizer exponent {}, want 1", gs.pi.lam)
    });
    tl.check(ctx.level(&gs.w1.unit) == Some(1), || {
        format!("ζ sits at level {:?}, want 1", ctx.level(&gs.w1.unit))
    });
    tl.check(ctx.level(&gs.v.unit) == Some(ctx.e as u64), || {
        format!("v sits at level {:?}, want {}", ctx.level(&gs.v.unit), ctx.e)
    });
    tl.check(ctx.level(&gs.u.unit) == Some(gs.u_level), || {
        "recorded u level disagrees with the element".into()
    });
    tl.check(gs.u_exact_placement == (gs.u_level == 2), || {
        "u placement flag is inconsistent".into()
    });
    let lvl_u0 = ctx.level(&gs.u0.unit);
    if gs.u_exact_placement {
        tl.check(lvl_u0 == Some(p - 1), || {
            format!("u₀ sits at level {lvl_u0:?}, want exactly {}", p - 1)
        });
    } else {
        tl.check(lvl_u0.map_or(true, |l| l >= p - 1), || {
            format!("u₀ sits at level {lvl_u0:?}, want ≥ {}", p - 1)
        });
    }
    let lvl_u1 = ctx.level(&gs.u1.unit);
    if n >= 2 {
        tl.check(lvl_u1 == Some(p), || {
            format!("u₁ sits at level {lvl_u1:?}, want exactly {p}")
        });
        tl.check(ctx.level(&gs.y1.unit) == Some(2 * p - 1), || {
            format!(
                "y₁ sits at level {:?}, want exactly {}",
                ctx.level(&gs.y1.unit),
                2 * p - 1
            )
        });
    } else {
        tl.check(lvl_u1.map_or(true, |l| l >= p), || {
            format!("u₁ sits at level {lvl_u1:?}, want ≥ {p}")
        });
    }

    // Cocycle triviality: Σ-norms of coboundaries vanish.
    for _ in 0..15 {
        let x = as_unit(&ctx.random_principal_unit(rng));
        let cob = ctx.d_coboundary(&x, ctx.sigma_a, 0)?;
        tl.check(triv(&sigma_norm(&cob))?, || {
            "N_Σ of a σ-coboundary is nontrivial".into()
        });
    }
    Ok(tl.outcome())
}

/// The replacement generator y₁ sits at level exactly 2p−1, is e₁-fixed,
/// moves exactly under T, and the module it generates with ζ has the
/// expected graded levels.
fn prop_newgen<R: Rng>(ctx: &FieldCtx, gs: Option<&GeneratorSet>, rng: &mut R) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = ctx.par.p;
    let n = ctx.par.n;
    if n == 1 {
        return Ok(Outcome::Skip(
            "the replacement generator only differs from u₁ for n ≥ 2".into(),
        ));
    }
    let mut tl = Tally::new();
    let y1m = ctx.d_materialize(&gs.y1, n);
    tl.check(ctx.level(&y1m) == Some(2 * p - 1), || {
        format!("y₁ sits at level {:?}, want {}", ctx.level(&y1m), 2 * p - 1)
    });
    let same = |a: &DElement, b: &DElement| -> Result<bool> {
        let q = ctx.d_mul(a, &ctx.d_inv(b)?);
        Ok(ctx.d_dlog(&q, n)?.iter().all(|&c| c == 0))
    };
    tl.check(same(&ctx.d_idem(&gs.y1, 1)?, &gs.y1)?, || {
        "y₁ is not e₁-fixed".into()
    });
    // Exact T-moves through the first p−1 steps (i = (2p−1) mod p = p−1).
    let mut cur = gs.y1.clone();
    for j in 1..p {
        cur = ctx.d_coboundary(&cur, ctx.gamma_a, 0)?;
        let lvl = ctx.level(&cur.unit);
        let want = 2 * p - 1 + j * (p - 1);
        tl.check(lvl == Some(want), || {
            format!("T^{j} y₁ sits at level {lvl:?}, want exactly {want}")
        });
    }
    // p-th power bound via the scaling property with a = p−1, b = p.
    let lvl_pow = ctx.level(&ctx.pow_u64(&y1m, p));
    tl.check(lvl_pow.map_or(true, |l| l >= p * p), || {
        format!("y₁^p sits at level {lvl_pow:?}, want ≥ {}", p * p)
    });
    // Graded structure of ⟨ζ, y₁⟩: the level of ζ^b·y₁^a is decided by the
    // p-adic valuation of b (levels 1, p, then y₁'s own 2p−1).
    for _ in 0..25 {
        let a = rand_unit_exp(ctx, rng);
        let b = rng.gen_range(0..ctx.pn);
        let z = ctx.mul(&ctx.pow_u64(&y1m, a), &ctx.pow_u64(&ctx.el_zeta(), b));
        let c = if b == 0 {
            n
        } else {
            let mut v = 0u32;
            let mut bb = b;
            while bb % p == 0 {
                bb /= p;
                v += 1;
            }
            v
        };
        let want = match c {
            0 => 1,
            1 => p,
            _ => 2 * p - 1,
        };
        let lvl = ctx.level(&z);
        tl.check(lvl == Some(want), || {
            format!("ζ^{b}·y₁^{a} sits at level {lvl:?}, want {want}")
        });
    }
    Ok(tl.outcome())
}

/// Ideal generators of the level filtration in the generic eigenspace
/// modules: each generator (and its Galois translates) lands at or beyond
/// the stated level.
fn prop_2ideals<R: Rng>(ctx: &FieldCtx, gs: Option<&GeneratorSet>, rng: &mut R) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = ctx.par.p;
    let n = ctx.par.n;
    if p == 3 {
        return Ok(Outcome::Skip(
            "no residue class away from 0 and 1 at p = 3".into(),
        ));
    }
    let mut tl = Tally::new();
    let variants = if n == 1 { 6 } else { 3 };
    for s in 2..(p - 1) {
        let us = ctx.d_idem(&gs.u, s as i64)?;
        let t = s + 1; // smallest positive level ≡ s+1 (mod p−1)
        tl.check(ctx.level(&us.unit) == Some(t - 1), || {
            format!(
                "u_{s} sits at level {:?}, want exactly {}",
                ctx.level(&us.unit),
                t - 1
            )
        });
        for m in 0..n {
            let target = p.pow(m) * t + p - 2;
            let mut gens: Vec<(u32, u64)> = vec![(m + 1, 0), (m, 1)];
            for k in 1..=m {
                gens.push((m - k, p.pow(k - 1) * t));
            }
            for &(c, d) in &gens {
                for _ in 0..variants {
                    let g = rand_gamma_power(ctx, rng);
                    let z = ctx.d_galois(&us, g, 0);
                    let z = ctx.d_t_pow(&z, d as u32)?;
                    let w = ctx.d_pow(&z, p.pow(c));
                    let lvl = ctx.level(&w.unit);
                    tl.check(lvl.map_or(true, |l| l >= target), || {
                        format!(
                            "(T^{d} u_{s})^(p^{c}) sits at level {lvl:?}, want ≥ {target} (m = {m})"
                        )
                    });
                }
            }
        }
    }
    Ok(tl.outcome())
}

/// Ideal generators for the cyclotomic eigenspace module ⟨w₁, y₁⟩.
fn prop_2idealsr1<R: Rng>(
    ctx: &FieldCtx,
    gs: Option<&GeneratorSet>,
    rng: &mut R,
) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = ctx.par.p;
    let n = ctx.par.n;
    if n == 1 {
        return Ok(Outcome::Skip(
            "the cyclotomic-layer ideals need n ≥ 2".into(),
        ));
    }
    let mut tl = Tally::new();
    let variants = 5usize;
    for m in 1..n {
        // part a: level p^m + p^{m−1} + p − 2
        let target_a = p.pow(m) + p.pow(m - 1) + p - 2;
        let mut gens_a: Vec<(&DElement, u32, u64)> = vec![(&gs.w1, m + 1, 0), (&gs.y1, m - 1, 0)];
        for k in 2..=m {
            gens_a.push((&gs.y1, m - k, p.pow(k - 1) + p.pow(k - 2) - 1));
        }
        // part b: level 2p^m + p − 2
        let target_b = 2 * p.pow(m) + p - 2;
        let mut gens_b: Vec<(&DElement, u32, u64)> = vec![(&gs.w1, m + 1, 0), (&gs.y1, m, 0)];
        for k in 1..=m {
            gens_b.push((&gs.y1, m - k, 2 * p.pow(k - 1) - 1));
        }
        for (target, gens) in [(target_a, gens_a), (target_b, gens_b)] {
            for (base, c, d) in gens {
                for _ in 0..variants {
                    let g = rand_gamma_power(ctx, rng);
                    let z = ctx.d_galois(base, g, 0);
                    let z = ctx.d_t_pow(&z, d as u32)?;
                    let w = ctx.d_pow(&z, p.pow(c));
                    let lvl = ctx.level(&w.unit);
                    tl.check(lvl.map_or(true, |l| l >= target), || {
                        format!("(T^{d}·)^(p^{c}) generator sits at level {lvl:?}, want ≥ {target}")
                    });
                }
            }
        }
    }
    Ok(tl.outcome())
}

/// Ideal generators for the invariant eigenspace module ⟨v, u₀⟩.
fn prop_2idealsr0<R: Rng>(
    ctx: &FieldCtx,
    gs: Option<&GeneratorSet>,
    rng: &mut R,
) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = ctx.par.p;
    let n = ctx.par.n;
    let mut tl = Tally::new();
    let variants = if n == 1 { 10 } else { 4 };
    let mut families: Vec<(u64, Vec<(&DElement, u32, u64)>)> = Vec::new();
    for m in 1..n {
        let target = p.pow(m) + p - 2;
        let mut gens: Vec<(&DElement, u32, u64)> = vec![(&gs.v, 0, 0), (&gs.u0, m, 0)];
        for k in 1..=m {
            gens.push((&gs.u0, m - k, p.pow(k - 1)));
        }
        families.push((target, gens));
    }
    {
        let target = p.pow(n) + p - 2;
        let mut gens: Vec<(&DElement, u32, u64)> = vec![(&gs.v, 1, 0), (&gs.u0, n, 0)];
        for k in 1..n {
            gens.push((&gs.u0, n - k, p.pow(k - 1)));
        }
        families.push((target, gens));
    }
    for (target, gens) in &families {
        for &(base, c, d) in gens {
            for _ in 0..variants {
                let g = rand_gamma_power(ctx, rng);
                let z = ctx.d_galois(base, g, 0);
                let z = ctx.d_t_pow(&z, d as u32)?;
                let w = ctx.d_pow(&z, p.pow(c));
                let lvl = ctx.level(&w.unit);
                tl.check(lvl.map_or(true, |l| l >= *target), || {
                    format!("(T^{d}·)^(p^{c}) generator sits at level {lvl:?}, want ≥ {target}")
                });
            }
        }
        // Products of ideal elements stay in the ideal.
        for _ in 0..6 {
            let (b1, c1, d1) = gens[rng.gen_range(0..gens.len())];
            let (b2, c2, d2) = gens[rng.gen_range(0..gens.len())];
            let z1 = ctx.d_pow(&ctx.d_t_pow(b1, d1 as u32)?, p.pow(c1));
            let z2 = ctx.d_pow(&ctx.d_t_pow(b2, d2 as u32)?, p.pow(c2));
            let w = ctx.d_mul(&z1, &z2);
            let lvl = ctx.level(&w.unit);
            tl.check(lvl.map_or(true, |l| l >= *target), || {
                format!("product of ideal generators sits at level {lvl:?}, want ≥ {target}")
            });
        }
    }
    Ok(tl.outcome())
}

// ---- generator pairing tables ---------------------------------------------------

/// Pairing table for the invariant-class generators: t_r pairs to full
/// order with y₁ and trivially with w₁; powers of v pair to order n−1 with
/// y₁ and full order with w₁.
fn prop_symbolsr0(
    eng: &mut ConductorEngine,
    gs: Option<&GeneratorSet>,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = eng.ctx.par.p;
    let n = eng.ctx.par.n;
    let y1m = eng.ctx.d_materialize(&gs.y1, n);
    let w1m = eng.ctx.d_materialize(&gs.w1, n);
    let vm = eng.ctx.d_materialize(&gs.v, n);
    let (t_draws, v_draws) = if n == 1 { (8, 5) } else { (5, 3) };
    let mut tl = Tally::new();
    for r in crate::suites::r0_list(p, n) {
        let trm = {
            let t_r = eng.ctx.gen_t_r(gs, r);
            eng.ctx.d_materialize(&t_r, n)
        };
        for i in 0..t_draws {
            let a = if i == 0 { 1 } else { rand_unit_exp(&eng.ctx, rng) };
            let x = eng.ctx.pow_u64(&trm, a);
            let oy = eng.symbol_order(&x, &y1m, n, rng)?;
            tl.check(oy == n, || {
                format!("order of y₁ against t_{r}^{a} is {oy}, want {n}")
            });
            let ow = eng.symbol_order(&x, &w1m, n, rng)?;
            tl.check(ow == 0, || {
                format!("order of w₁ against t_{r}^{a} is {ow}, want 0")
            });
        }
        for i in 0..v_draws {
            let a = if i == 0 { 1 } else { rand_unit_exp(&eng.ctx, rng) };
            let x = eng.ctx.pow_u64(&vm, a);
            let oy = eng.symbol_order(&x, &y1m, n, rng)?;
            tl.check(oy == n - 1, || {
                format!("order of y₁ against v^{a} is {oy}, want {}", n - 1)
            });
            let ow = eng.symbol_order(&x, &w1m, n, rng)?;
            tl.check(ow == n, || {
                format!("order of w₁ against v^{a} is {ow}, want {n}")
            });
        }
    }
    Ok(tl.outcome())
}

/// Pairing table for the cyclotomic-class generators: x_r pairs trivially
/// with v and to order n−k with u₀; z_r pairs to order 1 with v; ζ pairs to
/// full order with v and trivially with u₀.
fn prop_symbolsr1(
    eng: &mut ConductorEngine,
    gs: Option<&GeneratorSet>,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let Some(gs) = gs else {
        return Ok(Outcome::Skip(
            "needs the exact generator system (f = 1)".into(),
        ));
    };
    let p = eng.ctx.par.p;
    let n = eng.ctx.par.n;
    let u0m = eng.ctx.d_materialize(&gs.u0, n);
    let vm = eng.ctx.d_materialize(&gs.v, n);
    let zeta = eng.ctx.el_zeta();
    let draws = if n == 1 { 8 } else { 4 };
    let mut tl = Tally::new();
    for r in crate::suites::r1_list(p, n) {
        let k = eng.ctx.k_of_r(r);
        let xrm = {
            let x_r = eng.ctx.gen_x_r(gs, r);
            eng.ctx.d_materialize(&x_r, n)
        };
        let zrm = {
            let z_r = eng.ctx.gen_z_r(gs, r);
            eng.ctx.d_materialize(&z_r, n)
        };
        for i in 0..draws {
            let a = if i == 0 { 1 } else { rand_unit_exp(&eng.ctx, rng) };
            let x = eng.ctx.pow_u64(&xrm, a);
            let ov = eng.symbol_order(&x, &vm, n, rng)?;
            tl.check(ov == 0, || {
                format!("order of v against x_{r}^{a} is {ov}, want 0")
            });
            let ou = eng.symbol_order(&x, &u0m, n, rng)?;
            tl.check(ou == n - k, || {
                format!("order of u₀ against x_{r}^{a} is {ou}, want {}", n - k)
            });
            let z = eng.ctx.pow_u64(&zrm, a);
            let oz = eng.symbol_order(&z, &vm, n, rng)?;
            tl.check(oz == 1, || {
                format!("order of v against z_{r}^{a} is {oz}, want 1")
            });
        }
    }
    let ov = eng.symbol_order(&zeta, &vm, n, rng)?;
    tl.check(ov == n, || {
        format!("order of v against ζ is {ov}, want {n}")
    });
    let ou = eng.symbol_order(&zeta, &u0m, n, rng)?;
    tl.check(ou == 0, || {
        format!("order of u₀ against ζ is {ou}, want 0")
    });
    Ok(tl.outcome())
}

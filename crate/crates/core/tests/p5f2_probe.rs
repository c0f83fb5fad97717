use conductor_core::kummer::Subgroup;
use conductor_core::{FieldCtx, FieldElement, FieldParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn f2_escape_shapes() {
    let ctx = FieldCtx::new(FieldParams {
        p: 5,
        n: 1,
        f: 2,
        prec: 7,
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let z = loop {
        let d = ctx.d_sample_fr(&mut rng, 2).unwrap();
        let x = ctx.d_materialize(&d, 1);
        if ctx.pth_power_test(&x, 1).unwrap().is_none() {
            break x;
        }
    };
    println!("z level {:?}", ctx.level(&z));

    let m = 1u32;
    let pm = 5usize;
    let dim = ctx.basis_dim();
    let zeta_pows: Vec<FieldElement> = {
        let mut v = Vec::with_capacity(pm);
        let mut acc = ctx.el_one();
        for _ in 0..pm {
            v.push(acc.clone());
            acc = ctx.mul(&acc, &ctx.el_zeta());
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
                    out[k - pm] = ctx.add(&out[k - pm], &ctx.mul(&prod, &z));
                }
            }
        }
        out
    };
    let norm = |h: &[FieldElement]| -> FieldElement {
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
            assert!(ctx.is_zero(c), "nonzero Y^{k} coordinate in norm");
        }
        acc[0].clone()
    };

    // Saturate: binomials + 400 dense randoms.
    let mut span = Subgroup::new(5, m, dim).unwrap();
    let mut us: Vec<FieldElement> = vec![ctx.el_zero(), ctx.el_one()];
    for idx in 0..dim {
        us.push(ctx.basis_element(idx));
    }
    for t in 1..=ctx.power_cutoff(m) {
        for s in 0..ctx.par.f {
            let mut tau = ctx.zq.fq_zero();
            tau[s] = 1;
            us.push(ctx.principal_gen(&tau, t));
        }
    }
    for a in 2..5u64 {
        us.push(ctx.el_from_u64(a));
    }
    us.push(ctx.el_zeta());
    let mut zi = ctx.el_one();
    for _ in 1..=4u32 {
        zi = ctx.mul(&zi, &z);
        for u in &us {
            let nrm = ctx.sub(&ctx.pow_u64(u, 5), &zi);
            if !ctx.is_zero(&nrm) {
                span.insert(&ctx.dlog(&nrm, m).unwrap()).unwrap();
            }
        }
    }
    for _ in 0..400 {
        let h: Vec<FieldElement> = (0..pm).map(|_| ctx.random_element(&mut rng)).collect();
        let nrm = norm(&h);
        if !ctx.is_zero(&nrm) {
            span.insert(&ctx.dlog(&nrm, m).unwrap()).unwrap();
        }
    }
    println!("stalled span index: 5^{}", span.index_log_p());

    // Which filtration directions are outside the stalled span?
    for t in 1..=ctx.power_cutoff(m) {
        for s in 0..ctx.par.f {
            let mut tau = ctx.zq.fq_zero();
            tau[s] = 1;
            let g = ctx.principal_gen(&tau, t);
            if !span.contains(&ctx.dlog(&g, m).unwrap()) {
                println!("outside span: principal unit level {t} dir {s}");
            }
        }
    }
    if !span.contains(&ctx.dlog(&ctx.el_lambda(), m).unwrap()) {
        println!("outside span: lambda");
    }

    // Escape-rate per sampling shape.
    let e = ctx.e as u64;
    let mut measure = |label: &str, rng: &mut ChaCha8Rng, gauge: bool, shifted: bool| {
        let mut esc = 0usize;
        let trials = 300usize;
        for _ in 0..trials {
            let mut h: Vec<FieldElement> = (0..pm)
                .map(|_| {
                    let c = ctx.random_element(rng);
                    if gauge {
                        ctx.mul(&c, &ctx.lam_pow(rng.gen_range(0..e)))
                    } else {
                        c
                    }
                })
                .collect();
            if shifted {
                // Interpret coefficients in powers of (Y − 1): expand.
                let mut acc = vec![ctx.el_zero(); pm];
                let mut wpow = vec![ctx.el_zero(); pm];
                wpow[0] = ctx.el_one();
                let mut wbase = vec![ctx.el_zero(); pm];
                wbase[0] = ctx.neg(&ctx.el_one());
                wbase[1] = ctx.el_one();
                for c in h.iter() {
                    for (a, wk) in acc.iter_mut().zip(wpow.iter()) {
                        *a = ctx.add(a, &ctx.mul(c, wk));
                    }
                    wpow = l_mul(&wpow, &wbase);
                }
                h = acc;
            }
            let nrm = norm(&h);
            if ctx.is_zero(&nrm) {
                continue;
            }
            if !span.contains(&ctx.dlog(&nrm, m).unwrap()) {
                esc += 1;
            }
        }
        println!("{label}: {esc}/{trials}");
    };
    measure("dense Y-coords", &mut rng, false, false);
    measure("dense + lambda gauge", &mut rng, true, false);
    measure("dense (Y-1)-coords", &mut rng, false, true);
    measure("dense (Y-1)-coords + gauge", &mut rng, true, true);
}

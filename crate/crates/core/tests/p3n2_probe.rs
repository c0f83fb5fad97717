use conductor_core::kummer::Subgroup;
use conductor_core::{FieldCtx, FieldElement, FieldParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn m2_escape_shapes() {
    let ctx = FieldCtx::new(FieldParams {
        p: 3,
        n: 2,
        f: 1,
        prec: 8,
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gs = ctx.build_generators().unwrap();
    let z = ctx.d_materialize(&ctx.gen_t_r(&gs, 0), 2);
    println!("z val {:?} level {:?}", ctx.val(&z), ctx.level(&z));

    let m = 2u32;
    let pm = 9usize;
    let dim = ctx.basis_dim();
    let zeta_m = ctx.el_zeta();
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

    let mut span = Subgroup::new(3, m, dim).unwrap();
    let mut us: Vec<FieldElement> = vec![ctx.el_zero(), ctx.el_one()];
    for idx in 0..dim {
        us.push(ctx.basis_element(idx));
    }
    for t in 1..=ctx.power_cutoff(m) {
        let mut tau = ctx.zq.fq_zero();
        tau[0] = 1;
        us.push(ctx.principal_gen(&tau, t));
    }
    us.push(ctx.el_from_u64(2));
    us.push(ctx.el_zeta());
    let mut zi = ctx.el_one();
    for i in 1..pm as u64 {
        zi = ctx.mul(&zi, &z);
        if i % 3 == 0 {
            continue;
        }
        for u in &us {
            let nrm = ctx.sub(&ctx.pow_u64(u, pm as u64), &zi);
            if !ctx.is_zero(&nrm) {
                span.insert(&ctx.dlog(&nrm, m).unwrap()).unwrap();
            }
        }
    }
    println!("after binomials: index 3^{}", span.index_log_p());
    for _ in 0..400 {
        let h: Vec<FieldElement> = (0..pm).map(|_| ctx.random_element(&mut rng)).collect();
        let nrm = norm(&h);
        if !ctx.is_zero(&nrm) {
            span.insert(&ctx.dlog(&nrm, m).unwrap()).unwrap();
        }
    }
    println!("after dense Y-coords: index 3^{}", span.index_log_p());

    let e = ctx.e as u64;
    let mut measure = |label: &str,
                       rng: &mut ChaCha8Rng,
                       span: &Subgroup,
                       gauge_hi: u64,
                       shift: Option<&FieldElement>| {
        let mut esc = 0usize;
        let trials = 300usize;
        for _ in 0..trials {
            let mut wbase = vec![ctx.el_zero(); pm];
            wbase[0] = shift.map_or(ctx.el_zero(), |s| ctx.neg(s));
            wbase[1] = ctx.el_one();
            let mut acc = vec![ctx.el_zero(); pm];
            let mut wpow = vec![ctx.el_zero(); pm];
            wpow[0] = ctx.el_one();
            for _k in 0..pm {
                let mut c = ctx.random_element(rng);
                if gauge_hi > 0 {
                    c = ctx.mul(&c, &ctx.lam_pow(rng.gen_range(0..gauge_hi)));
                }
                for (a, w) in acc.iter_mut().zip(wpow.iter()) {
                    *a = ctx.add(a, &ctx.mul(&c, w));
                }
                wpow = l_mul(&wpow, &wbase);
            }
            let nrm = norm(&acc);
            if ctx.is_zero(&nrm) {
                continue;
            }
            if !span.contains(&ctx.dlog(&nrm, m).unwrap()) {
                esc += 1;
            }
        }
        println!("{label}: {esc}/{trials}");
    };
    measure("gauge 0..e, no shift", &mut rng, &span, e, None);
    measure("gauge 0..2e, no shift", &mut rng, &span, 2 * e, None);
    let one = ctx.el_one();
    measure("gauge 0..e, shift 1", &mut rng, &span, e, Some(&one));
    measure("gauge 0..2e, shift 1", &mut rng, &span, 2 * e, Some(&one));

    // Saturate further with gauged draws, then list what is still missing.
    let mut saturate = |span: &mut Subgroup, rng: &mut ChaCha8Rng, rounds: usize| {
        for _ in 0..rounds {
            let mut acc = vec![ctx.el_zero(); pm];
            let mut is_zero_h = true;
            for k in 0..pm {
                let c = ctx.mul(
                    &ctx.random_element(rng),
                    &ctx.lam_pow(rng.gen_range(0..2 * e)),
                );
                if !ctx.is_zero(&c) {
                    is_zero_h = false;
                }
                acc[k] = c;
            }
            if is_zero_h {
                continue;
            }
            // Plain gauged Y-coordinates.
            let nrm = norm(&acc);
            if !ctx.is_zero(&nrm) {
                span.insert(&ctx.dlog(&nrm, m).unwrap()).unwrap();
            }
        }
    };
    saturate(&mut span, &mut rng, 600);
    println!("after 600 more gauged draws: index 3^{}", span.index_log_p());

    let describe = |span: &Subgroup, label: &str, x: &FieldElement| {
        let dl = ctx.dlog(x, m).unwrap();
        let full = span.contains(&dl);
        let cube: Vec<u64> = dl.iter().map(|&c| (c * 3) % 9).collect();
        let as_cube = span.contains(&cube);
        if !full {
            println!(
                "outside span: {label} (cube class {})",
                if as_cube { "inside" } else { "outside" }
            );
        }
    };
    for t in 1..=ctx.power_cutoff(m) {
        let mut tau = ctx.zq.fq_zero();
        tau[0] = 1;
        describe(&span, &format!("principal level {t}"), &ctx.principal_gen(&tau, t));
    }
    describe(&span, "lambda", &ctx.el_lambda());
    describe(&span, "zeta", &ctx.el_zeta());
    describe(&span, "2", &ctx.el_from_u64(2));
    describe(&span, "1+p", &ctx.el_from_u64(4));
    describe(&span, "z", &z);

    // Graded principal units of L: h = 1 + t·λ^a·Y^k.
    let mut hits = 0usize;
    for a in 0..=(2 * e) {
        for k in 0..pm {
            for t in 1..3u64 {
                let mut h = vec![ctx.el_zero(); pm];
                h[0] = ctx.el_one();
                let c = ctx.mul(&ctx.el_from_u64(t), &ctx.lam_pow(a));
                if k == 0 {
                    h[0] = ctx.add(&h[0], &c);
                } else {
                    h[k] = c;
                }
                let nrm = norm(&h);
                if ctx.is_zero(&nrm) {
                    continue;
                }
                let dl = ctx.dlog(&nrm, m).unwrap();
                if !span.contains(&dl) {
                    hits += 1;
                    println!("graded unit escape: 1 + {t}·λ^{a}·Y^{k}");
                    span.insert(&dl).unwrap();
                }
            }
        }
    }
    println!(
        "graded principal-unit family: {hits} escapes, final index 3^{}",
        span.index_log_p()
    );
}

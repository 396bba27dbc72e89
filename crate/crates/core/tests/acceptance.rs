//! End-to-end acceptance run. Prints one line per criterion and fails if any
//! gated sub-check fails. Set `MES_STRETCH=1` to include weights 15 to 17.

use std::time::Instant;

use mes_core::drop1::drop1;
use mes_core::linalg::default_primes;
use mes_core::lincomb::{lc, q, zw};
use mes_core::moulds::formula::tautological;
use mes_core::moulds::fourier::closed_form;
use mes_core::moulds::mould::compositions_up_to;
use mes_core::moulds::*;
use mes_core::operators::{der, r_bracket};
use mes_core::products::{harmonic, shuffle};
use mes_core::relspaces::checks::{run_check, CheckId};
use mes_core::relspaces::diamond::diamond_defect;
use mes_core::relspaces::sums::truncated_sums_harness;
use mes_core::relspaces::{conj_dim, ge2_dimension, ideal_span, table_row, Family, RankMethod};
use mes_core::{LinComb, ZWord, Q};

const TABLE: [usize; 9] = [1, 1, 4, 6, 13, 23, 42, 74, 129];
const CONJ: [i128; 15] = [1, 0, 1, 1, 2, 3, 4, 7, 9, 15, 21, 32, 47, 70, 104];

struct Sub {
    label: String,
    ok: bool,
    gated: bool,
}

struct Criterion {
    id: u32,
    title: &'static str,
    subs: Vec<Sub>,
    skipped: Option<String>,
    reported_only: bool,
    seconds: f64,
}

impl Criterion {
    fn status(&self) -> &'static str {
        if self.skipped.is_some() {
            "SKIPPED"
        } else if self.subs.iter().all(|s| s.ok) {
            "PASS"
        } else {
            "FAIL"
        }
    }

    fn line(&self) -> String {
        let mut line = format!("criterion {:>2} {:<7} {} ({:.1}s)", self.id, self.status(), self.title, self.seconds);
        if self.reported_only {
            line.push_str(" [reported, not gated]");
        }
        if let Some(why) = &self.skipped {
            line.push_str(&format!(": {why}"));
        }
        for s in self.subs.iter().filter(|s| !s.ok) {
            line.push_str(&format!("\n    failed: {}{}", s.label, if s.gated { "" } else { " (not gated)" }));
        }
        line
    }
}

fn sub(label: impl Into<String>, ok: bool) -> Sub {
    Sub { label: label.into(), ok, gated: true }
}

fn run(id: u32, title: &'static str, f: impl FnOnce() -> Vec<Sub>) -> Criterion {
    let t = Instant::now();
    let subs = f();
    Criterion { id, title, subs, skipped: None, reported_only: false, seconds: t.elapsed().as_secs_f64() }
}

fn z2_power(r: usize) -> LinComb<ZWord> {
    LinComb::from_word(ZWord::power(2, r))
}

fn word(parts: &[&[u8]]) -> ZWord {
    ZWord::from_letters(&parts.concat())
}

fn relation_tables() -> Vec<Sub> {
    let mut subs = Vec::new();
    for (i, k) in (6..=14).enumerate() {
        let r = ideal_span(k, Family::R).unwrap().rank();
        let dr = ideal_span(k, Family::Dr).unwrap().rank();
        subs.push(sub(format!("weight {k}: R {r}, DR {dr}, expected {}", TABLE[i]), r == TABLE[i] && dr == TABLE[i]));
    }
    subs
}

fn stretch() -> Vec<Sub> {
    let method = RankMethod::Modular(default_primes(3, 0));
    [(15, 224, 224), (16, 382, 382), (17, 650, 651)]
        .into_iter()
        .map(|(k, r, dr)| {
            let row = table_row(k, &method).unwrap();
            sub(
                format!("weight {k}: R {} (want {r}), DR {} (want {dr})", row.rank_r, row.rank_dr),
                row.rank_r == r && row.rank_dr == dr,
            )
        })
        .collect()
}

fn dimensions() -> Vec<Sub> {
    let mut subs = Vec::new();
    for k in 0..=14u32 {
        let rank = if k >= 6 { ideal_span(k, Family::Dr).unwrap().rank() as i128 } else { 0 };
        let lhs = ge2_dimension(k) as i128 - rank;
        subs.push(sub(
            format!("weight {k}: F - rank = {lhs}, series {}, listed {}", conj_dim(k), CONJ[k as usize]),
            lhs == conj_dim(k) && lhs == CONJ[k as usize],
        ));
    }
    subs
}

fn named_relations() -> Vec<Sub> {
    let r6 = lc(&[(6, &[3, 3]), (-3, &[4, 2]), (-1, &[6])]);
    let r7 = lc(&[(4, &[3, 4]), (3, &[4, 3]), (-2, &[5, 2]), (-1, &[7])]);
    vec![
        sub("6z3z3 - 3z4z2 - z6 in R(6)", ideal_span(6, Family::R).unwrap().contains(&r6).unwrap()),
        sub("4z3z4 + 3z4z3 - 2z5z2 - z7 in R(7)", ideal_span(7, Family::R).unwrap().contains(&r7).unwrap()),
    ]
}

fn operator_closed_forms() -> Vec<Sub> {
    let mut subs = Vec::new();
    for k in 2..=10u8 {
        let mut want = LinComb::term(ZWord::letter(k + 2), q(2 * i64::from(k) - 1));
        for j in 2..=k {
            want.add_term(ZWord::from_letters(&[k - j + 2, j]), q(-(i64::from(k) + i64::from(j) - 1)));
        }
        want.add_term(ZWord::from_letters(&[2, k]), q(-1));
        subs.push(sub(format!("der(z{k})"), der(&zw(&[u32::from(k)])).unwrap() == want));
    }
    let z2 = zw(&[2]);
    for r in 0..=5usize {
        let c = q(-(((r + 1) * (2 * r + 3)) as i64));
        let mut want = harmonic(&z2_power(r), &z2).scale(&q(3));
        want.add_scaled(&z2_power(r + 1), &c);
        if r >= 1 {
            subs.push(sub(format!("der(z2^{r})"), der(&z2_power(r)).unwrap() == want));
        }
        let mut want = harmonic(&z2_power(r), &z2).scale(&q(4));
        want.add_scaled(&z2_power(r + 1), &c);
        subs.push(sub(format!("D(z2^{r} sh z2)"), drop1(&shuffle(&z2_power(r), &z2)).unwrap() == want));
    }
    for r in 2..=4usize {
        for i in 2..=r {
            for j in 2..=i {
                let p = |n: usize| vec![2u8; n];
                let input = word(&[&p(j - 1), &[1], &p(i - j), &[3], &p(r - i)]);
                let mut want = LinComb::zero();
                want.add_term(word(&[&p(i - j), &[3], &p(j - 2), &[3], &p(r - i)]), q(1));
                want.add_term(word(&[&p(i - j), &[3], &p(r - i), &[3], &p(j - 2)]), q(1));
                want.add_term(ZWord::power(2, r + 1), q(1));
                let got = drop1(&LinComb::from_word(input.clone())).unwrap();
                subs.push(sub(format!("Seki r={r} i={i} j={j}: D{input}"), got == want));
            }
        }
    }
    subs
}

fn kernel() -> Vec<Sub> {
    let mut subs = Vec::new();
    for k in [8, 10] {
        let report = run_check(CheckId::Drop1HoffmanKernel, k).unwrap();
        let n = report.instances.len();
        let all: usize = (2..=k).map(|j| 1usize << (j - 2)).sum();
        subs.push(sub(format!("D(ds(w, z1)) = 0 on all {n} words of weight <= {k}"), report.passed() && n == all));
    }
    subs
}

fn sl2_suite() -> Vec<Sub> {
    let mut subs = Vec::new();
    for (id, k, gated) in [
        (CheckId::Sl2Phi, 10, true),
        (CheckId::Sl2Der, 10, true),
        (CheckId::DeltaLeibnizR, 10, true),
        (CheckId::DeltaDerPower, 8, false),
        (CheckId::DeltaDerPowerCorrected, 8, true),
    ] {
        let report = run_check(id, k).unwrap();
        let mut label = format!("{} up to weight {k} ({} instances)", id.name(), report.instances.len());
        if !report.passed() {
            if let Some(c) = &report.counterexample {
                label.push_str(&format!(", first counterexample {c}"));
            }
        }
        subs.push(Sub { label, ok: report.passed(), gated });
    }
    subs
}

fn sym<C: CoeffRing>(tag: char, n: &[u8]) -> Poly<C> {
    if n.is_empty() {
        Poly::ring_one()
    } else {
        Poly::symbol(Symbol::new(tag, ZWord::from_letters(n)))
    }
}

fn mould_equivalence() -> Vec<Sub> {
    let (depth, weight) = (3, 7);
    let indices: Vec<Vec<u8>> = (0..=depth).flat_map(|r| compositions_up_to(r, weight)).collect();
    let conv = SignConvention::Derived;

    let a = free_mould::<Q>('a', depth, weight);
    let b = free_mould::<Q>('b', depth, weight);
    let gila = a.gila(&b).unwrap();
    let gilat = a.gilat(&b).unwrap();
    let formula_ok = indices.iter().all(|k| gila.coeff(k) == gila_coeff(k, conv, |n| sym('a', n), |n| sym('b', n)));
    let gilat_ok = indices.iter().all(|k| gilat.coeff(k) == gilat_coeff(k, conv, |n| sym('a', n), |n| sym('b', n)));

    let a = free_mould::<ShuffleRing>('a', depth, weight);
    let bf = |n: &[u8]| Poly::constant(tautological(&ZWord::from_letters(n)));
    let b = Mould::from_fn(depth, weight, bf);
    let gila = a.gila(&b).unwrap();
    let conv_ok = indices.iter().all(|k| {
        gila.coeff(k)
            == convolution(
                &ZWord::from_letters(k),
                conv,
                |w: &ZWord| sym('a', w.letters()),
                |w: &ZWord| bf(w.letters()),
            )
    });
    let n = indices.len();
    vec![
        sub(format!("gila by definition = coefficient formula on {n} indices"), formula_ok),
        sub(format!("gila by definition = convolution with a shuffle character on {n} indices"), conv_ok),
        sub(format!("gilat by definition = closed formula on {n} indices"), gilat_ok),
    ]
}

fn fourier() -> Vec<Sub> {
    let f = fourier_expansion(&[4, 2]).unwrap();
    let mut five = f.terms.len() == 5;
    five &= f.coeff(&[]) == zw(&[4, 2]);
    five &= f.coeff(&[4]) == lc(&[(2, &[2])]);
    five &= f.coeff(&[3]) == lc(&[(2, &[3])]);
    five &= f.coeff(&[2]) == lc(&[(4, &[4])]);
    five &= f.coeff(&[4, 2]) == zw(&[]);
    let mut subs = vec![sub(format!("(4,2): {f}"), five)];
    let mut depth_two = true;
    let mut admissible = true;
    for k in compositions_up_to(2, 8) {
        if k.iter().any(|&x| x < 2) {
            continue;
        }
        let f = fourier_expansion(&k).unwrap();
        depth_two &= f == closed_form(&k).unwrap();
        admissible &= f.admissible();
    }
    subs.push(sub("depth two, k1 + k2 <= 8, against the closed coefficients", depth_two));
    subs.push(sub("all zeta coefficients admissible", admissible));
    subs
}

fn truncated_sums() -> Vec<Sub> {
    let report = truncated_sums_harness(6, 5).unwrap();
    vec![sub(format!("F, coF, F* on weight <= 5, cutoff <= 6: {}", report.to_json()["checked"]), report.passed())]
}

fn diamond() -> Vec<Sub> {
    let w = ZWord::from_letters(&[2, 1]);
    let report = diamond_defect(&w, &w).unwrap();
    let minus_r = -r_bracket(&zw(&[2]), &zw(&[2]));
    vec![
        sub(format!("defect {} = -R(z2, z2)", report.defect.to_plain()), report.defect == minus_r),
        sub("defect lies in DR(6)", report.member),
    ]
}

fn main() {
    let stretch_on = std::env::var("MES_STRETCH").is_ok_and(|v| v == "1");
    let mut results = vec![
        run(1, "relation table, weights 6-14, exact", relation_tables),
        if stretch_on {
            run(2, "relation table, weights 15-17, modular", stretch)
        } else {
            Criterion {
                id: 2,
                title: "relation table, weights 15-17, modular",
                subs: Vec::new(),
                skipped: Some("opt-in, set MES_STRETCH=1".into()),
                reported_only: false,
                seconds: 0.0,
            }
        },
        run(3, "dimension consistency up to weight 14", dimensions),
        run(4, "named relations in the R span", named_relations),
        run(5, "operator closed forms", operator_closed_forms),
        run(6, "Drop1 kills ds(w, z1)", kernel),
        run(7, "sl2 suite", sl2_suite),
        run(8, "mould equivalence, depth <= 3, weight <= 7", mould_equivalence),
        run(9, "Fourier expansions", fourier),
        run(10, "truncated harmonic sums harness", truncated_sums),
    ];
    let mut c11 = run(11, "diamond defect evidence", diamond);
    c11.reported_only = true;
    results.push(c11);

    for c in &results {
        println!("{}", c.line());
    }
    let gated_failures: Vec<String> = results
        .iter()
        .filter(|c| !c.reported_only)
        .flat_map(|c| c.subs.iter().filter(|s| s.gated && !s.ok).map(move |s| format!("{}: {}", c.id, s.label)))
        .collect();
    if !gated_failures.is_empty() {
        eprintln!("gated failures: {gated_failures:#?}");
        std::process::exit(1);
    }
}

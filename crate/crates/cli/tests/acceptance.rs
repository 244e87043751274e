//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every threshold below is fixed.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use apw_core::antipower::{is_anti_power, min_block_length, AntiPowerQuery};
use apw_core::fixtures::{CANTOR, PERIODIC, PERIOD_DOUBLING, THUE_MORSE};
use apw_core::recognizability::{
    check_power_recognizability, derive_n_prime, estimate_recognizability_constant, PowerVerdict,
};
use apw_core::theorem::{proof_constant, verify_theorem, TheoremReport};
use apw_core::{FixedPointStream, Letter, RecognizabilityConfig, RecognizabilityError, Substitution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn stream(text: &str) -> FixedPointStream {
    FixedPointStream::first(Substitution::parse_spec(text).unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn naive_is_anti_power(w: &[u8], k: usize, ell: usize) -> bool {
    (0..k).all(|i| (i + 1..k).all(|j| w[i * ell..(i + 1) * ell] != w[j * ell..(j + 1) * ell]))
}

fn naive_expand(s: &Substitution, seed: u8, n: usize) -> Vec<u8> {
    let mut w = vec![seed];
    while w.len() < n {
        w = w.iter().flat_map(|&c| s.image(Letter(c)).to_vec()).collect();
    }
    w.truncate(n);
    w
}

fn naive_congruent(x: &[u8], len: usize, modulus: usize) -> bool {
    let mut first: HashMap<&[u8], usize> = HashMap::new();
    (0..=x.len() - len).all(|p| {
        let f = *first.entry(&x[p..p + len]).or_insert(p);
        (p - f) % modulus == 0
    })
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut checks = 0usize;
    for _ in 0..10_000 {
        let r: u8 = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=64);
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..r)).collect();
        for k in 1..=len {
            for ell in 1..=len / k {
                let fast = is_anti_power(&w, k, ell).map_err(|e| e.to_string())?;
                ensure(fast == naive_is_anti_power(&w, k, ell), || {
                    format!("disagreement on {w:?} k={k} ell={ell}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("10000 words, {checks} (k, ell) checks, 0 disagreements"))
}

fn criterion_2() -> Outcome {
    const N: usize = 100_000;
    for (name, text) in [("thue-morse", THUE_MORSE), ("period-doubling", PERIOD_DOUBLING), ("cantor", CANTOR)] {
        let mut x = stream(text);
        let m = x.m();
        // σ(x[..N]) = x[..mN] gives σ(x[..n]) = x[..mn] for every n ≤ N
        let prefix = x.prefix(N);
        let image = x.substitution().apply(&prefix);
        ensure(image == x.prefix(m * N).letters(), || format!("{name}: F1 fails at n={N}"))?;
        for n in [1, 2, 3, 10, 999, 12_345, 77_777] {
            let p = x.prefix(n);
            ensure(x.substitution().apply(&p) == x.prefix(m * n).letters(), || {
                format!("{name}: F1 fails at n={n}")
            })?;
        }
        let naive = naive_expand(x.substitution(), x.seed().0, N);
        ensure(prefix.letters() == &naive[..], || format!("{name}: prefix differs from naive expansion"))?;
        for i in 0..N {
            ensure(x.letter_at(i as u64).0 == prefix[i], || format!("{name}: F2 fails at i={i}"))?;
        }
    }
    Ok("F1 and F2 up to 1e5 on 3 fixtures".into())
}

fn criterion_3() -> Outcome {
    let mut tm = stream(THUE_MORSE);
    let window = 1 << 16;
    let est = estimate_recognizability_constant(&mut tm, 16, window).map_err(|e| e.to_string())?;
    ensure(est.n == 4, || format!("N = {}, expected 4", est.n))?;
    let c = est.counterexample.ok_or("no length-3 counterexample recorded")?;
    let prefix = tm.prefix(window);
    ensure(
        c.factor.len() == 3
            && c.aligned % 2 == 0
            && c.unaligned % 2 == 1
            && prefix[c.aligned..c.aligned + 3] == *c.factor.letters()
            && prefix[c.unaligned..c.unaligned + 3] == *c.factor.letters(),
        || format!("bad counterexample {c:?}"),
    )?;
    Ok(format!(
        "N=4; length-3 factor {:?} at {} (even) and {} (odd)",
        c.factor.letters(),
        c.aligned,
        c.unaligned
    ))
}

fn criterion_4() -> Outcome {
    let window = 1 << 18;
    let mut notes = Vec::new();
    for (name, text) in [("thue-morse", THUE_MORSE), ("period-doubling", PERIOD_DOUBLING)] {
        let mut x = stream(text);
        let report = derive_n_prime(&mut x, 1 << 16, &RecognizabilityConfig::default())
            .map_err(|e| format!("{name}: {e}"))?;
        let prefix = x.prefix(window);
        for i in [1usize, 2] {
            let modulus = x.m().pow(i as u32);
            let bound = report.n_prime * modulus;
            let verdict = check_power_recognizability(&mut x, i, bound, window)
                .map_err(|e| format!("{name}: {e}"))?;
            ensure(verdict == PowerVerdict::Holds, || format!("{name} i={i}: {verdict:?}"))?;
            ensure(naive_congruent(&prefix, bound, modulus), || {
                format!("{name} i={i}: naive census finds an incongruent pair")
            })?;
            notes.push(format!("{name} i={i} bound={bound}"));
        }
    }
    Ok(notes.join(", "))
}

struct GridRun {
    tm: TheoremReport,
}

fn criterion_5(store: &mut Option<GridRun>) -> Outcome {
    let ns: Vec<usize> = (0..2000).collect();
    let ks: Vec<usize> = (1..=32).collect();
    let mut notes = Vec::new();
    for (name, text) in [("thue-morse", THUE_MORSE), ("period-doubling", PERIOD_DOUBLING)] {
        let mut x = stream(text);
        let report = derive_n_prime(&mut x, 1 << 16, &RecognizabilityConfig::default())
            .map_err(|e| format!("{name}: {e}"))?;
        let c = proof_constant(&mut x, &report).map_err(|e| format!("{name}: {e}"))?;
        let grid = verify_theorem(&mut x, &ns, &ks, c, Some(report.n_prime));
        ensure(grid.rows.len() == ns.len() * ks.len(), || format!("{name}: grid incomplete"))?;
        ensure(grid.violations.is_empty(), || {
            format!("{name}: {} violations, first {:?}", grid.violations.len(), grid.violations[0])
        })?;
        ensure(grid.rows.iter().all(|r| r.min_ell.is_some()), || format!("{name}: bound violated"))?;
        ensure(grid.rows.iter().all(|r| r.construction == Some(true)), || {
            format!("{name}: construction blocks not distinct")
        })?;
        let c_emp = grid.c_empirical.unwrap_or(0);
        ensure(c_emp <= c, || format!("{name}: C_empirical {c_emp} > C_proof {c}"))?;
        notes.push(format!("{name} C_proof={c} C_empirical={c_emp}"));
        if name == "thue-morse" {
            *store = Some(GridRun { tm: grid });
        }
    }
    Ok(format!("64000 cells each, 0 violations; {}", notes.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut per = stream(PERIODIC);
    for n in 0..64 {
        let r = min_block_length(&mut per, AntiPowerQuery::new(n, 3, 64));
        ensure(r.min_ell.is_none(), || format!("(01)^inf has a 3-anti-power at n={n}: {r:?}"))?;
    }
    // independent route: only two distinct factors of each length exist
    let prefix = per.prefix(64 + 3 * 64);
    for ell in 1..=64 {
        let distinct: HashSet<&[u8]> = prefix.windows(ell).collect();
        ensure(distinct.len() <= 2, || format!("{} factors of length {ell}", distinct.len()))?;
    }

    let cantor_sub = Substitution::parse_spec(CANTOR).unwrap();
    ensure(!cantor_sub.is_primitive().is_primitive(), || "Cantor reported primitive".into())?;
    let mut cantor = stream(CANTOR);
    let gate = derive_n_prime(&mut cantor, 1 << 12, &RecognizabilityConfig::default());
    ensure(gate == Err(RecognizabilityError::NotPrimitive), || format!("Cantor gate: {gate:?}"))?;
    let mut lens = Vec::new();
    for j in [2u32, 3, 4] {
        let run = 3usize.pow(j);
        let r = min_block_length(&mut cantor, AntiPowerQuery::new(run, 2, 2 * run));
        let ell = r.min_ell.ok_or_else(|| format!("no 2-anti-power at n={run}"))?;
        ensure(4 * ell > run, || format!("j={j}: min_ell {ell} <= 3^j/4"))?;
        lens.push(ell);
    }
    ensure(lens.windows(2).all(|w| w[0] < w[1]), || format!("no growth: {lens:?}"))?;
    Ok(format!("no 3-anti-power for n<64; Cantor not primitive; T4 min_ell {lens:?}"))
}

fn criterion_7(store: &Option<GridRun>) -> Outcome {
    let grid = &store.as_ref().ok_or("criterion 5 produced no Thue-Morse grid")?.tm;
    let mut pairs = 0;
    for row in grid.rows.windows(2) {
        let (a, b) = (&row[0], &row[1]);
        if a.n != b.n || b.k != a.k + 1 {
            continue;
        }
        if let (Some(x), Some(y)) = (a.min_ell, b.min_ell) {
            ensure(x <= y, || format!("min_ell(n={}, k={}) = {x} > min_ell(k+1) = {y}", a.n, a.k))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} adjacent (k, k+1) pairs monotone"))
}

fn criterion_8() -> Outcome {
    let spec = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs/thue_morse.sub");
    let run = |jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_apw"))
            .arg("--jobs")
            .arg(jobs)
            .arg("scan")
            .arg(&spec)
            .args(["-n", "0..300", "-k", "1..=24"])
            .output()
            .map_err(|e| e.to_string())
    };
    let one = run("1")?;
    let eight = run("8")?;
    ensure(one.status.success() && eight.status.success(), || {
        format!("scan failed: {}", String::from_utf8_lossy(&one.stderr))
    })?;
    ensure(one.stdout.len() > 1000, || "scan output suspiciously short".into())?;
    ensure(one.stdout == eight.stdout, || "--jobs 1 and --jobs 8 outputs differ".into())?;
    Ok(format!("{} bytes identical", one.stdout.len()))
}

fn main() {
    let mut grid = None;
    let criteria: Vec<(&str, Duration, Box<dyn FnMut() -> Outcome>)> = vec![
        ("1 anti-power oracle equivalence", Duration::from_secs(30), Box::new(criterion_1)),
        ("2 fixed-point laws F1/F2", Duration::from_secs(10), Box::new(criterion_2)),
        ("3 Thue-Morse recognizability constant", Duration::from_secs(5), Box::new(criterion_3)),
        ("4 power recognizability congruence", Duration::from_secs(120), Box::new(criterion_4)),
    ];
    let mut failed = 0;
    let mut report = |name: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed > limit => Err(format!("{note}; took {elapsed:.2?} > {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("PASS criterion {name} ({elapsed:.2?}): {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    };
    for (name, limit, mut f) in criteria {
        report(name, limit, &mut *f);
    }
    report("5 main theorem grid", Duration::from_secs(300), &mut || criterion_5(&mut grid));
    report("6 tightness negatives", Duration::from_secs(60), &mut criterion_6);
    report("7 monotonicity in k", Duration::from_secs(60), &mut || criterion_7(&grid));
    report("8 scan determinism across --jobs", Duration::from_secs(120), &mut criterion_8);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}

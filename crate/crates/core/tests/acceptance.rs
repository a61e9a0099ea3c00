//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use ordmatch::clique::{full_report, is_clique, CliqueReport};
use ordmatch::es::{construct_point_set, es_upper_check, longest_monotone, random_point_set};
use ordmatch::extract::{extract_clique, guaranteed_size};
use ordmatch::extremal::{build_extremal, build_uniform};
use ordmatch::matching::{blow_up, random_matching, random_r_partite};
use ordmatch::oracle::{exact_ramsey, theorem_sweep, DEFAULT_BUDGET};
use ordmatch::partition::{chains, lower_bound_value, sharpness_constant, upper_bound};
use ordmatch::pattern::collectable_patterns;
use ordmatch::{BudgetTable, Matching, Pattern, PartitionChain, SignFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LIMIT_1: Duration = Duration::from_secs(30 * 60);
const LIMIT_SHORT: Duration = Duration::from_secs(60);
const LIMIT_LONG: Duration = Duration::from_secs(10 * 60);
const SHARPNESS_FLOOR: f64 = 0.95;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Smallest q with q^k >= n, by counting up.
fn ceil_root(n: u64, k: u32) -> u64 {
    (1..).find(|q: &u64| q.pow(k) >= n).unwrap()
}

/// Whether every pattern respects its cap, with cap 1 off `chain_set`.
fn caps_respected(report: &CliqueReport, caps: &BTreeMap<Pattern, u64>) -> bool {
    report
        .cliques
        .iter()
        .all(|(p, c)| c.size as u64 <= caps.get(p).copied().unwrap_or(1))
}

fn criterion_1() -> Outcome {
    let mut got = Vec::new();
    let mut ok = true;
    for n in 1..=9usize {
        let res = exact_ramsey(n, 2, DEFAULT_BUDGET).expect("within budget");
        let want = ceil_root(n as u64, 3) as usize;
        ok &= res.value == want && full_report(&res.witness).unwrap().overall.size == want;
        got.push(res.value);
    }
    outcome(ok, format!("L_2(1..9) = {got:?}"))
}

fn criterion_2() -> Outcome {
    let m = build_uniform(3, 2).unwrap();
    let report = full_report(&m).unwrap();
    let caps: BTreeMap<Pattern, u64> = collectable_patterns(3).into_iter().map(|p| (p, 2)).collect();
    let ok = m.len() == 128 && caps_respected(&report, &caps);
    outcome(ok, format!("{} edges, L = {}", m.len(), report.overall.size))
}

fn criterion_3() -> Outcome {
    let chain: PartitionChain = "2>1,1".parse().unwrap();
    let names = ["AABB", "ABAB", "ABBA"];
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for code in 0..27u64 {
        let values = [code % 3 + 1, code / 3 % 3 + 1, code / 9 + 1];
        let caps: BTreeMap<Pattern, u64> = names.iter().map(|s| Pattern::new(s).unwrap()).zip(values).collect();
        let table = BudgetTable::new(2, caps.clone()).unwrap();
        let (lower, best) = lower_bound_value(2, &table).unwrap();
        let upper = upper_bound(2, &table).unwrap();
        let m = build_extremal(&best, &table).unwrap();
        let product: u64 = values.iter().product();
        ok &= best == chain;
        ok &= lower == product.into() && m.len() as u64 == product;
        ok &= caps_respected(&full_report(&m).unwrap(), &caps);
        let ratio = upper.to_string().parse::<f64>().unwrap() / lower.to_string().parse::<f64>().unwrap();
        worst_ratio = worst_ratio.max(ratio);
        ok &= upper <= lower * 2u32;
    }
    outcome(ok, format!("27 cap triples, max upper/lower = {worst_ratio}"))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut sets = 0;
    for s in 1..=3usize {
        let taus = SignFunction::all(s);
        let k = taus.len() as u32;
        for code in 0..3u64.pow(k) {
            let caps: BTreeMap<SignFunction, u64> = taus
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), code / 3u64.pow(i as u32) % 3 + 1))
                .collect();
            let z = construct_point_set(s, &caps).unwrap();
            ok &= z.len() as u64 == caps.values().product::<u64>();
            for (t, &m) in &caps {
                ok &= longest_monotone(&z, t).unwrap().len() as u64 == m;
            }
            sets += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..500u64 {
        let s = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=100);
        let z = random_point_set(n, s, 1000 + i).unwrap();
        let check = es_upper_check(&z);
        let product: u128 = check.longest.values().map(|&m| m as u128).product();
        ok &= check.holds && z.len() as u128 <= product;
    }
    outcome(ok, format!("{sets} constructions exact, 500 random point sets within the product bound"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let mut total = 0;
    for r in [2usize, 3] {
        let instances: Vec<Matching> = (0..250u64)
            .map(|i| random_matching(rng.gen_range(1..=40), r, 5000 + i).unwrap())
            .collect();
        let report = theorem_sweep(r, &instances).unwrap();
        failures += report.failures();
        total += report.rows.len();
    }
    outcome(failures == 0, format!("{total} instances, {failures} failures"))
}

fn criterion_6() -> Outcome {
    let guarantee = guaranteed_size(3, 200);
    let mut ok = guarantee == 2;
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    let mut compared = 0;
    for seed in 0..200u64 {
        let m = random_matching(200, 3, 6000 + seed).unwrap();
        let res = extract_clique(&m, guarantee - 1).unwrap();
        ok &= is_clique(&m, &res.pattern, &res.clique) && res.clique.len() == res.size;
        ok &= res.size as u64 >= guarantee;
        *sizes.entry(res.size).or_default() += 1;
        ok &= res.size <= full_report(&m).unwrap().overall.size;
        // exact comparison on a 30-edge prefix
        let sub = m.select(&(0..30).collect::<Vec<_>>()).unwrap();
        let small = extract_clique(&sub, 1).unwrap();
        ok &= is_clique(&sub, &small.pattern, &small.clique);
        ok &= small.size <= full_report(&sub).unwrap().overall.size;
        compared += 1;
    }
    outcome(ok, format!("sizes {sizes:?}, guarantee {guarantee}, exact comparisons on all 200 and {compared} prefixes of 30 edges"))
}

fn criterion_7() -> Outcome {
    let values: Vec<f64> = (2..=12).map(sharpness_constant).collect();
    let above = values[5..].iter().all(|&v| v > SHARPNESS_FLOOR);
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    outcome(
        above && increasing,
        format!("r=2..12: [{}]; > {SHARPNESS_FLOOR} on 7..12: {above}; increasing: {increasing}", shown.join(", ")),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    for i in 0..50u64 {
        let r = rng.gen_range(2..=3);
        let h = random_matching(rng.gen_range(1..=6), r, 8000 + i).unwrap();
        let hr = random_r_partite(rng.gen_range(1..=4), r, 9000 + i).unwrap();
        let b = blow_up(&h, &hr).unwrap();
        ok &= b.len() == h.len() * hr.len();
        let (rb, rh, rr) = (full_report(&b).unwrap(), full_report(&h).unwrap(), full_report(&hr).unwrap());
        for p in Pattern::all(r) {
            ok &= rb.size_of(&p) <= rh.size_of(&p) * rr.size_of(&p);
        }
    }
    outcome(ok, "50 random pairs")
}

fn criterion_9() -> Outcome {
    let counts: Vec<usize> = (1..=5).map(|r| collectable_patterns(r).len()).collect();
    let mut ok = counts == [1, 3, 9, 27, 81];
    for r in 1..=6usize {
        let factorial: usize = (1..r).product();
        let cs = chains(r);
        ok &= cs.len() == factorial;
        ok &= cs.iter().all(|c| c.pattern_set().len() == (1 << r) - 1);
    }
    outcome(ok, format!("collectable counts {counts:?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact Ramsey table r=2", criterion_1, LIMIT_1),
        ("extremal construction caps", criterion_2, LIMIT_SHORT),
        ("multi-parameter sharpness sandwich", criterion_3, LIMIT_SHORT),
        ("ES tightness", criterion_4, LIMIT_SHORT),
        ("size bound as a property", criterion_5, LIMIT_LONG),
        ("extractor soundness and guarantee", criterion_6, LIMIT_LONG),
        ("constant-factor claim", criterion_7, LIMIT_SHORT),
        ("blow-up law", criterion_8, LIMIT_SHORT),
        ("pattern census", criterion_9, LIMIT_SHORT),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *limit;
        println!(
            "{} criterion {}: {name} ({}; {:.2?}, limit {:?})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed,
            limit
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

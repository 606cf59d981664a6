//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cbv_cost::bench::{self, is_affine, BenchConfig, Suite};
use cbv_cost::encodings::fixpoint_h;
use cbv_cost::enumerate::enumerate_closed_terms;
use cbv_cost::gen::TermGen;
use cbv_cost::reduce::{find_redexes, normalize, step_at, EngineError, ReductionOutcome, Strategy};
use cbv_cost::theta::{deep_reference_family, true_length};
use cbv_cost::Term;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

/// Every one-step reduct of `t` with its cost.
fn reducts(t: &Term) -> Vec<(Term, u64)> {
    find_redexes(t)
        .iter()
        .map(|p| step_at(t, p).expect("positions come from find_redexes"))
        .collect()
}

/// Divergent one-step pairs must join in one step each, with the costs of
/// the two sides swapped.
fn diamond_over(max_size: u64) -> Result<usize, String> {
    let terms = enumerate_closed_terms(max_size).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for m in &terms {
        let rs = reducts(m);
        for (i, (n, cn)) in rs.iter().enumerate() {
            for (l, cl) in &rs[i + 1..] {
                if n == l {
                    continue;
                }
                pairs += 1;
                let from_n: Vec<(Term, u64)> = reducts(n);
                let from_l: HashMap<Term, u64> = reducts(l).into_iter().collect();
                let joined = from_n
                    .iter()
                    .any(|(p, c)| c == cl && from_l.get(p) == Some(cn));
                if !joined {
                    return Err(format!(
                        "{m} -> {n} / {l} does not close with swapped costs"
                    ));
                }
            }
        }
    }
    Ok(pairs)
}

fn criterion_1() -> Verdict {
    let at_9 = diamond_over(9)?;
    let at_12 = diamond_over(12)?;
    Ok(format!(
        "{at_9} divergent pairs up to size 9, {at_12} up to size 12, all close with swapped costs"
    ))
}

type Summary = Option<(Term, usize, u64)>;

fn summarize(t: &Term, s: Strategy, fuel: u64) -> Result<Summary, EngineError> {
    Ok(match normalize(t, s, fuel)? {
        ReductionOutcome::NormalForm { term, trace } => {
            Some((term, trace.step_count(), trace.total_cost()))
        }
        ReductionOutcome::FuelExhausted { .. } => None,
    })
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gen = TermGen {
        free: &["a", "b"],
        abs_bias: 0.35,
    };
    let (mut normalizing, mut divergent) = (0, 0);
    for i in 0..1000 {
        let size = rng.random_range(3..=40);
        let t = gen.term(&mut rng, size, 0);
        let results: Vec<_> = [Strategy::Leftmost, Strategy::Rightmost, Strategy::Random(i)]
            .into_iter()
            .map(|s| summarize(&t, s, 10_000))
            .collect();
        let fine: Vec<&Summary> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        let any_normal = fine.iter().any(|r| r.is_some());
        if !any_normal {
            divergent += 1;
            continue;
        }
        normalizing += 1;
        if fine.len() != 3 || fine.iter().any(|r| *r != fine[0]) {
            return Err(format!("term {i} ({t}): strategies disagree"));
        }
    }
    Ok(format!(
        "{normalizing} normalizing terms agree on normal form, steps and cost ({divergent} out of fuel)"
    ))
}

fn suite(s: Suite) -> Verdict {
    let rep = bench::run_suite(s, BenchConfig::default());
    if rep.passed() {
        Ok(format!("{} rows", rep.rows.len()))
    } else {
        Err(rep.violations.join("; "))
    }
}

fn criterion_3() -> Verdict {
    let points: Vec<_> = bench::cost_growth(5..=13, 100_000)
        .into_iter()
        .collect::<Option<_>>()
        .ok_or("some E_n did not normalize")?;
    let points: Vec<bench::GrowthPoint> = points;
    let ratios: Vec<f64> = points
        .windows(2)
        .map(|w| w[1].time as f64 / w[0].time as f64)
        .collect();
    let steps: Vec<u64> = points.iter().map(|p| p.steps).collect();
    if let Some(r) = ratios.iter().find(|r| !(1.8..=2.2).contains(*r)) {
        return Err(format!("Time ratio {r:.4} outside [1.8, 2.2]"));
    }
    if !is_affine(&steps) {
        return Err(format!("step counts {steps:?} not affine"));
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    Ok(format!(
        "Time ratios in [{lo:.4}, {hi:.4}], steps {steps:?}"
    ))
}

fn criterion_4() -> Verdict {
    let ratios: Vec<f64> = (2..=10)
        .map(|k| {
            let m = deep_reference_family(1 << k);
            let size = m.size() as f64;
            true_length(&m) as f64 / (size * size.log2())
        })
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    let msg = format!("band [{lo:.4}, {hi:.4}], c2/c1 = {:.3}", hi / lo);
    if hi / lo <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Verdict {
    let h = fixpoint_h();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gen = TermGen::default();
    let mut costs = Vec::new();
    for size in 5..=50u64 {
        let mut seen = None;
        for _ in 0..3 {
            let n = gen.value(&mut rng, size);
            let target = Term::app(
                n.clone(),
                Term::abs(Term::apps(h.clone(), [n.clone(), Term::bound(0)])),
            );
            let mut t = Term::app(h.clone(), n.clone());
            let mut cost = 0;
            for _ in 0..10 {
                if t == target {
                    break;
                }
                let pos = find_redexes(&t)
                    .into_iter()
                    .next()
                    .ok_or_else(|| format!("H {n} stuck before N(λz.HNz)"))?;
                let (next, c) = step_at(&t, &pos).map_err(|e| e.to_string())?;
                t = next;
                cost += c;
            }
            if t != target {
                return Err(format!("H {n} does not reach N(λz.HNz)"));
            }
            if seen.is_some_and(|c| c != cost) {
                return Err(format!("size {size}: cost depends on more than size(N)"));
            }
            seen = Some(cost);
        }
        costs.extend(seen);
    }
    if is_affine(&costs) {
        Ok(format!(
            "cost {} + {} per symbol",
            costs[0] as i64 - 5 * (costs[1] as i64 - costs[0] as i64),
            costs[1] as i64 - costs[0] as i64
        ))
    } else {
        Err(format!("costs {costs:?} not affine"))
    }
}

fn criterion_10() -> Verdict {
    let terms = enumerate_closed_terms(9).map_err(|e| e.to_string())?;
    match terms.iter().find(|t| t.is_normal() != t.is_abs()) {
        Some(t) => Err(format!(
            "{t}: normal = {}, abstraction = {}",
            t.is_normal(),
            t.is_abs()
        )),
        None => Ok(format!("{} closed terms", terms.len())),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("diamond property", criterion_1),
        ("strategy invariance", criterion_2),
        ("exponential cost growth", criterion_3),
        ("true-length band", criterion_4),
        ("append/convert cost shapes", || suite(Suite::AppendCosts)),
        ("TM simulation", || suite(Suite::TmOverhead)),
        ("H fixed-point cost", criterion_7),
        ("machine R agreement and bounds", || {
            suite(Suite::MachineRBounds)
        }),
        ("PCA exact costs", || suite(Suite::PcaCosts)),
        ("closed normal forms are abstractions", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {}: {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

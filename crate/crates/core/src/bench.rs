//! Measurement suites. Each one gathers rows deterministically from a seed,
//! checks its own invariants, and can be written out as CSV.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::encodings::{
    build_append, build_convert, encode_string, encode_symbol, exponential_term, Alphabet,
    AppendKind, ConvertKind,
};
use crate::gen::TermGen;
use crate::machine_r::{mr_normalize, MrOutcome};
use crate::pca::{measure, Combinator, XiValue};
use crate::reduce::{normalize, ReductionOutcome, Strategy};
use crate::term::Term;
use crate::theta::encode_theta;
use crate::tm::{parse_tm, run_compiled, samples};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hand-verified per-stage PCA costs, `constant,value` per line.
pub const PCA_GOLDEN: &str = include_str!("../tests/golden/pca_costs.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    CostGrowth,
    AppendCosts,
    TmOverhead,
    MachineRBounds,
    PcaCosts,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::CostGrowth,
        Suite::AppendCosts,
        Suite::TmOverhead,
        Suite::MachineRBounds,
        Suite::PcaCosts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CostGrowth => "cost-growth",
            Suite::AppendCosts => "append-costs",
            Suite::TmOverhead => "tm-overhead",
            Suite::MachineRBounds => "machine-r-bounds",
            Suite::PcaCosts => "pca-costs",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown suite '{0}'")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    /// Accepts `cost-growth`, `cost_growth` and `CostGrowth` alike.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name().replace('-', "") == key)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub experiment: String,
    pub parameter: String,
    pub value: f64,
    pub ratio: Option<f64>,
}

impl BenchRow {
    fn new(
        experiment: impl Into<String>,
        parameter: impl Into<String>,
        value: impl Into<f64>,
    ) -> Self {
        BenchRow {
            experiment: experiment.into(),
            parameter: parameter.into(),
            value: value.into(),
            ratio: None,
        }
    }

    fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = Some(ratio);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub suite: Suite,
    pub seed: u64,
    pub fuel: u64,
    pub rows: Vec<BenchRow>,
    /// One line per failed invariant; empty when the suite passed.
    pub violations: Vec<String>,
}

impl BenchReport {
    fn new(suite: Suite, cfg: BenchConfig) -> Self {
        BenchReport {
            suite,
            seed: cfg.seed,
            fuel: cfg.fuel,
            rows: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }

    /// CSV with header `suite,experiment,parameter,value,ratio`. The first
    /// rows carry the seed, fuel and tool version under experiment `meta`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["suite", "experiment", "parameter", "value", "ratio"])?;
        let suite = self.suite.name();
        for (k, v) in [
            ("seed", self.seed.to_string()),
            ("fuel", self.fuel.to_string()),
            ("version", VERSION.to_string()),
        ] {
            w.write_record([suite, "meta", k, &v, ""])?;
        }
        for r in &self.rows {
            let ratio = r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default();
            w.write_record([
                suite,
                &r.experiment,
                &r.parameter,
                &r.value.to_string(),
                &ratio,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub seed: u64,
    pub fuel: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 42,
            fuel: 100_000,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: BenchConfig) -> BenchReport {
    match suite {
        Suite::CostGrowth => cost_growth_suite(cfg),
        Suite::AppendCosts => append_costs_suite(cfg),
        Suite::TmOverhead => tm_overhead_suite(cfg),
        Suite::MachineRBounds => machine_r_suite(cfg),
        Suite::PcaCosts => pca_suite(cfg),
    }
}

/// Whether equally spaced samples lie on a line (all second differences zero).
pub fn is_affine(ys: &[u64]) -> bool {
    ys.windows(3)
        .all(|w| i128::from(w[2]) - 2 * i128::from(w[1]) + i128::from(w[0]) == 0)
}

// ---- growth

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthPoint {
    pub n: u64,
    pub steps: u64,
    pub time: u64,
}

/// Steps and Time of `⌜n⌝ ⌜2⌝ c` for each `n` in the range.
pub fn cost_growth(ns: impl IntoIterator<Item = u64>, fuel: u64) -> Vec<Option<GrowthPoint>> {
    ns.into_iter()
        .map(
            |n| match normalize(&exponential_term(n), Strategy::Leftmost, fuel) {
                Ok(ReductionOutcome::NormalForm { trace, .. }) => Some(GrowthPoint {
                    n,
                    steps: trace.step_count() as u64,
                    time: trace.time().ok()?,
                }),
                _ => None,
            },
        )
        .collect()
}

fn cost_growth_suite(cfg: BenchConfig) -> BenchReport {
    let mut rep = BenchReport::new(Suite::CostGrowth, cfg);
    let points = cost_growth(5..=13, cfg.fuel);
    let mut prev: Option<GrowthPoint> = None;
    let mut steps = Vec::new();
    for (p, n) in points.iter().zip(5u64..) {
        let Some(p) = *p else {
            rep.violations
                .push(format!("E_{n} did not normalize within fuel"));
            prev = None;
            continue;
        };
        steps.push(p.steps);
        rep.rows
            .push(BenchRow::new("steps", format!("n={n}"), p.steps as f64));
        let mut row = BenchRow::new("time", format!("n={n}"), p.time as f64);
        if let Some(q) = prev {
            let ratio = p.time as f64 / q.time as f64;
            row = row.with_ratio(ratio);
            rep.check((1.8..=2.2).contains(&ratio), || {
                format!(
                    "Time(E_{n})/Time(E_{}) = {ratio:.4} outside [1.8, 2.2]",
                    n - 1
                )
            });
        }
        rep.rows.push(row);
        prev = Some(p);
    }
    rep.check(is_affine(&steps), || {
        format!("step counts {steps:?} are not affine in n")
    });
    rep
}

// ---- append

/// Strings of length `len` over `{a, b}` with different contents.
pub fn sample_strings(len: usize) -> Vec<String> {
    let mut out = vec!["a".repeat(len), "b".repeat(len)];
    out.push(
        (0..len)
            .map(|i| if i % 2 == 0 { 'a' } else { 'b' })
            .collect(),
    );
    out.push(
        (0..len)
            .map(|i| if i % 3 == 1 { 'a' } else { 'b' })
            .collect(),
    );
    out.sort();
    out.dedup();
    out
}

/// `‖α‖` of normalizing `f` applied to `args`.
pub fn reduction_cost(f: &Term, args: &[Term], fuel: u64) -> Option<u64> {
    let t = Term::apps(f.clone(), args.iter().cloned());
    match normalize(&t, Strategy::Leftmost, fuel).ok()? {
        ReductionOutcome::NormalForm { trace, .. } => Some(trace.total_cost()),
        ReductionOutcome::FuelExhausted { .. } => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCell {
    pub kind: &'static str,
    pub u: String,
    pub v: String,
    pub cost: u64,
}

/// Costs of the append and convert combinators over every pair of sample
/// strings with lengths up to `max_len`. For `append_char` the `u` column
/// holds the prepended symbol.
pub fn append_grid(max_len: usize, fuel: u64) -> Vec<GridCell> {
    let a = Alphabet::parse_list("a,b").expect("static alphabet");
    let enc = |s: &str| encode_string(&a, s).expect("sample strings use a and b");
    let ch = build_append(&a, AppendKind::Char);
    let st = build_append(&a, AppendKind::String);
    let rv = build_append(&a, AppendKind::Reverse);
    let conv = build_convert(&a, &a, ConvertKind::String);
    let mut cells = Vec::new();
    let mut push = |kind, u: &str, v: &str, cost: Option<u64>| {
        cells.push(GridCell {
            kind,
            u: u.to_string(),
            v: v.to_string(),
            cost: cost.unwrap_or(u64::MAX),
        })
    };
    for lv in 0..=max_len {
        for v in sample_strings(lv) {
            for sym in ["a", "b"] {
                let s = encode_symbol(&a, sym).expect("static symbol");
                push(
                    "append_char",
                    sym,
                    &v,
                    reduction_cost(&ch, &[s, enc(&v)], fuel),
                );
            }
            for lu in 0..=max_len {
                for u in sample_strings(lu) {
                    push(
                        "append_string",
                        &u,
                        &v,
                        reduction_cost(&st, &[enc(&u), enc(&v)], fuel),
                    );
                    push(
                        "append_reverse",
                        &u,
                        &v,
                        reduction_cost(&rv, &[enc(&u), enc(&v)], fuel),
                    );
                }
            }
        }
    }
    for lu in 0..=max_len {
        for u in sample_strings(lu) {
            push(
                "convert_string",
                &u,
                "",
                reduction_cost(&conv, &[enc(&u)], fuel),
            );
        }
    }
    cells
}

/// Per-kind checks on the grid; returns the failed ones.
pub fn check_append_grid(cells: &[GridCell], max_len: usize) -> Vec<String> {
    let mut bad = Vec::new();
    let of = |kind: &'static str| cells.iter().filter(move |c| c.kind == kind);

    let char_costs: Vec<u64> = of("append_char").map(|c| c.cost).collect();
    if char_costs.windows(2).any(|w| w[0] != w[1]) {
        bad.push(format!(
            "append_char costs are not constant: {char_costs:?}"
        ));
    }
    for kind in ["append_string", "append_reverse", "convert_string"] {
        let mut by_len = vec![None; max_len + 1];
        for c in of(kind) {
            let slot = &mut by_len[c.u.len()];
            match *slot {
                None => *slot = Some(c.cost),
                Some(k) if k != c.cost => {
                    bad.push(format!(
                        "{kind}: cost at |u|={} varies ({k} vs {} for u={:?}, v={:?})",
                        c.u.len(),
                        c.cost,
                        c.u,
                        c.v
                    ));
                    return bad;
                }
                Some(_) => {}
            }
        }
        let col: Vec<u64> = by_len.iter().map(|c| c.unwrap_or(u64::MAX)).collect();
        if !is_affine(&col) {
            bad.push(format!("{kind}: costs by |u| {col:?} are not affine"));
        }
    }
    bad
}

fn append_costs_suite(cfg: BenchConfig) -> BenchReport {
    let mut rep = BenchReport::new(Suite::AppendCosts, cfg);
    let cells = append_grid(8, cfg.fuel);
    for c in &cells {
        rep.rows.push(BenchRow::new(
            c.kind,
            format!("u={};v={}", c.u, c.v),
            c.cost as f64,
        ));
    }
    rep.violations = check_append_grid(&cells, 8);
    rep
}

// ---- TM

#[derive(Debug, Clone, PartialEq)]
pub struct TmPoint {
    pub machine: &'static str,
    pub input: String,
    pub output: String,
    pub tm_steps: u64,
    pub lambda_cost: u64,
    pub ratio: f64,
}

/// Every binary input of length up to `max_len`, shortest first.
pub fn binary_inputs(max_len: u32) -> Vec<String> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for code in 0..(1u32 << len) {
            out.push(
                (0..len)
                    .rev()
                    .map(|k| if code >> k & 1 == 1 { '1' } else { '0' })
                    .collect(),
            );
        }
    }
    out
}

/// Runs both sample machines on every input up to `max_len` through the
/// compiler. Errors (including oracle mismatches) are reported as strings.
pub fn tm_overhead(max_len: u32, fuel: u64) -> Vec<Result<TmPoint, String>> {
    let mut out = Vec::new();
    for (name, src) in [
        ("flip", samples::FLIP),
        ("even_palindrome", samples::EVEN_PALINDROME),
    ] {
        let m = parse_tm(src).expect("bundled machines parse");
        let io = m.io_alphabet();
        for input in binary_inputs(max_len) {
            out.push(
                run_compiled(&m, &io, &input, fuel)
                    .map(|r| TmPoint {
                        machine: name,
                        ratio: r.overhead(input.len()),
                        input: input.clone(),
                        output: r.output,
                        tm_steps: r.tm_steps,
                        lambda_cost: r.lambda_cost,
                    })
                    .map_err(|e| format!("{name} on {input:?}: {e}")),
            );
        }
    }
    out
}

/// `max / min` of the overhead ratios of one machine.
pub fn overhead_band(points: &[TmPoint], machine: &str) -> f64 {
    let rs = points
        .iter()
        .filter(|p| p.machine == machine)
        .map(|p| p.ratio);
    let (lo, hi) = rs.fold((f64::INFINITY, 0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    hi / lo
}

fn tm_overhead_suite(cfg: BenchConfig) -> BenchReport {
    let mut rep = BenchReport::new(Suite::TmOverhead, cfg);
    let mut points = Vec::new();
    for r in tm_overhead(6, cfg.fuel) {
        match r {
            Ok(p) => {
                rep.rows.push(
                    BenchRow::new(
                        format!("{}_cost", p.machine),
                        format!("input={}", p.input),
                        p.lambda_cost as f64,
                    )
                    .with_ratio(p.ratio),
                );
                rep.rows.push(BenchRow::new(
                    format!("{}_steps", p.machine),
                    format!("input={}", p.input),
                    p.tm_steps as f64,
                ));
                points.push(p);
            }
            Err(e) => rep.violations.push(e),
        }
    }
    for m in ["flip", "even_palindrome"] {
        let band = overhead_band(&points, m);
        rep.rows
            .push(BenchRow::new(format!("{m}_band"), "max/min", band));
        rep.check(band <= 2.0, || {
            format!("{m}: overhead band {band:.3} exceeds 2")
        });
    }
    rep
}

// ---- machine R

#[derive(Debug, Clone, PartialEq)]
pub struct MrPoint {
    pub size: u64,
    pub steps: u64,
    pub time: u64,
    pub op_count: u64,
    /// Largest `ops / (tl_before + tl_after)²` over the iterations.
    pub c_iter: f64,
    /// `op_count / Time⁴`
    pub c_total: f64,
    pub agrees: bool,
}

/// Draws `count` closed terms with sizes in `sizes` that normalize within
/// `fuel` engine steps, and runs each through the engine and machine R.
pub fn machine_r_corpus(
    seed: u64,
    count: usize,
    sizes: std::ops::RangeInclusive<u64>,
    fuel: u64,
) -> Vec<MrPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = TermGen {
        free: &[],
        abs_bias: 0.3,
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let size = rng.random_range(sizes.clone());
        let t = gen.term(&mut rng, size, 0);
        let Ok(ReductionOutcome::NormalForm { term, trace }) =
            normalize(&t, Strategy::Leftmost, fuel)
        else {
            continue;
        };
        let Ok(time) = trace.time() else { continue };
        let steps = trace.step_count() as u64;
        let Ok(MrOutcome::Normal(run)) = mr_normalize(&encode_theta(&t), steps + 1) else {
            out.push(MrPoint {
                size,
                steps,
                time,
                op_count: 0,
                c_iter: f64::NAN,
                c_total: f64::NAN,
                agrees: false,
            });
            continue;
        };
        let agrees = run.output == encode_theta(&term) && run.iterations.len() as u64 == steps;
        let c_iter = run
            .iterations
            .iter()
            .map(|r| r.ops as f64 / ((r.tl_before + r.tl_after) as f64).powi(2))
            .fold(0.0, f64::max);
        out.push(MrPoint {
            size,
            steps,
            time,
            op_count: run.op_count,
            c_iter,
            c_total: run.op_count as f64 / (time as f64).powi(4),
            agrees,
        });
    }
    out
}

/// Largest constants observed in a corpus.
pub fn max_constants(points: &[MrPoint]) -> (f64, f64) {
    points.iter().fold((0.0, 0.0), |(a, b), p| {
        (f64::max(a, p.c_iter), f64::max(b, p.c_total))
    })
}

pub const MR_SMALL: std::ops::RangeInclusive<u64> = 8..=16;
pub const MR_LARGE: std::ops::RangeInclusive<u64> = 16..=32;

fn machine_r_suite(cfg: BenchConfig) -> BenchReport {
    let mut rep = BenchReport::new(Suite::MachineRBounds, cfg);
    let fuel = cfg.fuel.min(1_000);
    let small = machine_r_corpus(cfg.seed, 250, MR_SMALL, fuel);
    let large = machine_r_corpus(cfg.seed.wrapping_add(1), 250, MR_LARGE, fuel);
    for (label, corpus) in [("small", &small), ("large", &large)] {
        for (i, p) in corpus.iter().enumerate() {
            rep.check(p.agrees, || {
                format!("{label} term {i}: machine R disagrees with the engine")
            });
            rep.rows.push(
                BenchRow::new(
                    format!("{label}_ops"),
                    format!("term={i};size={};steps={};time={}", p.size, p.steps, p.time),
                    p.op_count as f64,
                )
                .with_ratio(p.c_total),
            );
        }
        let (c, c2) = max_constants(corpus);
        rep.rows.push(BenchRow::new(
            format!("{label}_max_C"),
            "ops/(tl_before+tl_after)^2",
            c,
        ));
        rep.rows.push(BenchRow::new(
            format!("{label}_max_C'"),
            "op_count/Time^4",
            c2,
        ));
    }
    let (cs, cs2) = max_constants(&small);
    let (cl, cl2) = max_constants(&large);
    rep.rows
        .push(BenchRow::new("C_stability", "large/small", cl / cs));
    rep.rows
        .push(BenchRow::new("C'_stability", "large/small", cl2 / cs2));
    // C is a tight quadratic fit and must stay put in both directions. The
    // quartic bound is loose, so C' is only required not to grow.
    rep.check(cl / cs <= 2.0 && cs / cl <= 2.0, || {
        format!("max C moved from {cs:.4} to {cl:.4}")
    });
    rep.check(cl2 / cs2 <= 2.0, || {
        format!("max C' grew from {cs2:.3e} to {cl2:.3e}")
    });
    rep
}

// ---- PCA

/// Reads [`PCA_GOLDEN`].
pub fn pca_golden() -> Vec<(String, i64)> {
    let mut r = csv::Reader::from_reader(PCA_GOLDEN.as_bytes());
    r.records()
        .map(|rec| {
            let rec = rec.expect("golden file is valid CSV");
            (
                rec[0].to_string(),
                rec[1].parse().expect("golden values are integers"),
            )
        })
        .collect()
}

/// Value triples with sizes in `2..=max_size` such that every application
/// the combinators perform on them terminates within `fuel`.
pub fn value_triples(seed: u64, count: usize, max_size: u64, fuel: u64) -> Vec<[XiValue; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = TermGen::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draw = || {
            let size = rng.random_range(2..=max_size);
            XiValue::new(gen.value(&mut rng, size)).expect("generated values are closed")
        };
        let triple = [draw(), draw(), draw()];
        let [v, u, w] = &triple;
        let defined = Combinator::ALL
            .iter()
            .all(|&c| measure(c, v, u, w, fuel).is_ok());
        if defined {
            out.push(triple);
        }
    }
    out
}

fn pca_suite(cfg: BenchConfig) -> BenchReport {
    let mut rep = BenchReport::new(Suite::PcaCosts, cfg);
    let golden = pca_golden();
    let gold = |k: &str| golden.iter().find(|(n, _)| n == k).map(|(_, v)| *v);
    let triples = value_triples(cfg.seed, 60, 100, cfg.fuel.min(500));
    for (i, [v, u, w]) in triples.iter().enumerate() {
        let param = format!("triple={i};sizes={}/{}/{}", v.size(), u.size(), w.size());
        for c in Combinator::ALL {
            let m = match measure(c, v, u, w, cfg.fuel.min(500)) {
                Ok(m) => m,
                Err(e) => {
                    rep.violations.push(format!("{c} on {param}: {e}"));
                    continue;
                }
            };
            for (k, s) in m.stages.iter().enumerate() {
                rep.rows.push(BenchRow::new(
                    format!("{c}_stage{}", k + 1),
                    param.clone(),
                    *s as f64,
                ));
            }
            rep.rows.push(BenchRow::new(
                format!("{c}_overhead"),
                param.clone(),
                m.overhead as f64,
            ));
            let expect: Vec<(&str, i64, i64)> = match c {
                Combinator::Id => vec![("id", 1, m.overhead)],
                Combinator::Swap => vec![("swap", 5, m.overhead)],
                Combinator::Eval => vec![("eval overhead", 4, m.overhead)],
                Combinator::Cont => {
                    vec![("cont", (v.size() as i64 - 4).max(1), m.overhead)]
                }
                Combinator::Assl => vec![("assl", gold("assl").unwrap_or(-1), m.overhead)],
                Combinator::Tens => vec![
                    (
                        "tens stage 1",
                        gold("tens_stage1").unwrap_or(-1),
                        m.stages[0] as i64,
                    ),
                    (
                        "tens stage 2 overhead",
                        gold("tens_stage2_overhead").unwrap_or(-1),
                        m.overhead,
                    ),
                ],
                Combinator::Conc => vec![
                    (
                        "conc stage 1",
                        gold("conc_stage1").unwrap_or(-1),
                        m.stages[0] as i64,
                    ),
                    (
                        "conc stage 2 overhead",
                        gold("conc_stage2_overhead").unwrap_or(-1),
                        m.overhead,
                    ),
                ],
                Combinator::Curry => vec![
                    (
                        "curry stage 1",
                        gold("curry_stage1").unwrap_or(-1),
                        m.stages[0] as i64,
                    ),
                    (
                        "curry stage 2",
                        gold("curry_stage2").unwrap_or(-1),
                        m.stages[1] as i64,
                    ),
                    (
                        "curry stage 3 overhead",
                        gold("curry_stage3_overhead").unwrap_or(-1),
                        m.overhead,
                    ),
                ],
            };
            for (what, want, got) in expect {
                rep.check(want == got, || {
                    format!("{what}: expected {want}, measured {got} ({param})")
                });
            }
        }
    }
    // One line per distinct violation text is plenty.
    rep.violations.sort();
    rep.violations
        .dedup_by(|a, b| a.split(" (").next() == b.split(" (").next());
    rep
}

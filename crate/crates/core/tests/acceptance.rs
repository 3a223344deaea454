//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redgreen::cli::report::to_json;
use redgreen::cli::spec::{ModelSpecDocument, StrategySpec};
use redgreen::cli::{self, records::write_records, SimulateOptions};
use redgreen::models::{
    generate_compliant_model, worked_example, AdaptiveStrategy, ConstantStrategy, GeneratorParams,
    InstructionMixture, LeastSameStrategy, NonlocalControl, ParityStrategy, QuantumReference,
};
use redgreen::rational::{ratio, Ratio};
use redgreen::referee::{
    locality_replay_check, run_adaptive_experiment, run_experiment_sharded, LocalityVerdict,
};
use redgreen::stats::{tally, TallyTable};
use redgreen::verifier::{
    collapse_analysis, derive_effective_instruction_set, enumerate_instruction_sets,
    exact_same_fraction, incompatibility_certificate, min_same_fraction_over_mixtures,
    mixture_same_fraction, same_fraction, Verdict,
};
use redgreen::{ExperimentConfig, InstructionSet, MicrosettingModel, RunRecord, SettingPair, Wing};

const TRIALS: u64 = 100_000;
const SHARDS: usize = 8;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    check(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn random_mixture(rng: &mut ChaCha8Rng) -> InstructionMixture {
    loop {
        let raw: Vec<i64> = (0..8).map(|_| rng.random_range(0..=20)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return InstructionMixture::new(raw.iter().map(|&w| ratio(w, total)).collect())
                .unwrap();
        }
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> GeneratorParams {
    let mut p = GeneratorParams::new(
        rng.random_range(1..=3),
        rng.random_range(1..=3),
        rng.random_range(1..=5),
    );
    p.stationary = rng.random();
    p
}

fn same_fraction_of(t: &TallyTable) -> f64 {
    t.same_count() as f64 / t.total() as f64
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let rows = enumerate_instruction_sets();
    let report = cli::enumerate();
    let five_ninths = rows
        .iter()
        .filter(|r| r.same_fraction == ratio(5, 9))
        .count();
    let ones = rows
        .iter()
        .filter(|r| r.same_fraction == ratio(1, 1))
        .count();
    check(rows.len() == 8, format!("{} rows", rows.len()))?;
    check(
        five_ninths == 6 && ones == 2,
        format!("{five_ninths} at 5/9, {ones} at 1"),
    )?;
    check(
        rows.iter()
            .all(|r| (r.same_fraction == ratio(1, 1)) == r.set.is_pure()),
        "fraction 1 exactly for the pure sets",
    )?;
    check(
        report.instruction_sets.len() == 8,
        "report lists eight sets",
    )?;
    let took = within_time(start, Duration::from_secs(1))?;
    Ok(format!("6 sets at 5/9, 2 at 1 ({took:?})"))
}

fn bound() -> Outcome {
    let start = Instant::now();
    let b = min_same_fraction_over_mixtures();
    check(b.minimum == ratio(5, 9), format!("minimum {}", b.minimum))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..1000 {
        let m = random_mixture(&mut rng);
        let f = mixture_same_fraction(&m);
        check(f >= ratio(5, 9), format!("mixture {i} gives {f}"))?;
    }
    let took = within_time(start, Duration::from_secs(5))?;
    Ok(format!("minimum 5/9, 1000 mixtures all >= 5/9 ({took:?})"))
}

fn incompatibility() -> Outcome {
    let c = incompatibility_certificate();
    check(
        c.instruction_sets_agree_on_equal_settings,
        "equal settings disagree",
    )?;
    check(c.bound == ratio(5, 9), format!("bound {}", c.bound))?;
    check(c.target == ratio(1, 2), format!("target {}", c.target))?;
    check(
        c.quantum_same_fraction == ratio(1, 2),
        format!("quantum {}", c.quantum_same_fraction),
    )?;
    check(c.gap == ratio(1, 18), format!("gap {}", c.gap))?;
    check(c.incompatible, "not flagged incompatible")?;
    Ok("bound 5/9 vs target 1/2, gap 1/18".into())
}

/// Feature (i) exactly, overall same-color within 0.0065 of 1/2, and every
/// off-diagonal pair within 4 sigma of 1/4.
fn quantum_like(t: &TallyTable) -> Result<String, String> {
    let (same_eq, n_eq) = t.equal_setting_counts();
    check(
        same_eq == n_eq && n_eq > 0,
        format!("equal settings agree {same_eq}/{n_eq}"),
    )?;
    let same = same_fraction_of(t);
    check(
        (same - 0.5).abs() <= 0.0065,
        format!("same-color {same:.5}"),
    )?;
    let mut worst: f64 = 0.0;
    for pair in SettingPair::all().filter(|p| !p.is_same()) {
        let n = t.pair_count(pair);
        let f = t.pair_same_count(pair) as f64 / n as f64;
        let z = (f - 0.25).abs() / sigma(0.25, n);
        worst = worst.max(z);
        check(
            z <= 4.0,
            format!(
                "pair {}{} same {f:.4} ({z:.2} sigma)",
                pair.a.label(),
                pair.b.label()
            ),
        )?;
    }
    Ok(format!(
        "feature-i 1, same-color {same:.4}, worst pair {worst:.2} sigma"
    ))
}

fn quantum_reference() -> Outcome {
    let start = Instant::now();
    let records = run_experiment_sharded(
        &QuantumReference::default(),
        &ExperimentConfig::new(TRIALS, 4),
        SHARDS,
    )
    .map_err(|e| e.to_string())?;
    let detail = quantum_like(&tally(&records))?;
    let took = within_time(start, Duration::from_secs(10))?;
    Ok(format!("{detail} ({took:?})"))
}

fn lhv_floor(name: &str, records: &[RunRecord], exact: &Ratio) -> Result<(), String> {
    let t = tally(records);
    let same = same_fraction_of(&t);
    let floor = 5.0 / 9.0 - 4.0 * sigma(5.0 / 9.0, t.total());
    check(
        same >= floor,
        format!("{name}: same-color {same:.5} below {floor:.5}"),
    )?;
    check(*exact >= ratio(5, 9), format!("{name}: exact {exact}"))
}

/// Average exact same-color fraction of the sets an adaptive strategy chose.
fn adaptive_exact<S: AdaptiveStrategy>(s: &S, records: &[RunRecord]) -> Ratio {
    let sum: Ratio = (0..records.len())
        .map(|t| mixture_same_fraction(&InstructionMixture::new(s.next(&records[..t])).unwrap()))
        .sum();
    sum / Ratio::from_integer(records.len().into())
}

fn run_adaptive<S: AdaptiveStrategy>(s: &S, seed: u64) -> (Vec<RunRecord>, Ratio) {
    let records = run_adaptive_experiment(s, TRIALS, seed).unwrap();
    let exact = adaptive_exact(s, &records);
    (records, exact)
}

fn lhv_simulations() -> Outcome {
    let cfg = |seed| ExperimentConfig::new(TRIALS, seed);
    let mut models = 0;
    for set in InstructionSet::all() {
        let records = run_experiment_sharded(&set, &cfg(10), SHARDS).map_err(|e| e.to_string())?;
        lhv_floor(&format!("set {set}"), &records, &same_fraction(set))?;
        models += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mixtures = vec![InstructionMixture::uniform()];
    mixtures.extend((0..4).map(|_| random_mixture(&mut rng)));
    for (i, m) in mixtures.iter().enumerate() {
        let records =
            run_experiment_sharded(m, &cfg(11 + i as u64), SHARDS).map_err(|e| e.to_string())?;
        lhv_floor(&format!("mixture {i}"), &records, &mixture_same_fraction(m))?;
        models += 1;
    }
    let ggr: InstructionSet = "GGR".parse().unwrap();
    let constant = ConstantStrategy(ggr);
    let parity = ParityStrategy {
        even: "RRR".parse().unwrap(),
        odd: "RGR".parse().unwrap(),
    };
    let adaptive = [
        ("constant", run_adaptive(&constant, 20)),
        ("parity", run_adaptive(&parity, 21)),
        ("least-same", run_adaptive(&LeastSameStrategy, 22)),
    ];
    for (name, (records, exact)) in &adaptive {
        lhv_floor(&format!("adaptive {name}"), records, exact)?;
        models += 1;
    }
    for i in 0..6 {
        let m = generate_compliant_model(random_params(&mut rng), &mut rng);
        let exact = exact_same_fraction(&m).map_err(|e| e.to_string())?;
        let records =
            run_experiment_sharded(&m, &cfg(30 + i), SHARDS).map_err(|e| e.to_string())?;
        lhv_floor(&format!("generated model {i}"), &records, &exact)?;
        models += 1;
    }
    Ok(format!(
        "{models} local models at {TRIALS} trials all at or above the floor"
    ))
}

fn worked() -> Outcome {
    let m = worked_example();
    let tau = m
        .ambient()
        .find("II-I-II")
        .ok_or("missing condition II-I-II")?;
    let eff = derive_effective_instruction_set(&m, tau).map_err(|e| e.to_string())?;
    check(
        eff == "RGG".parse().unwrap(),
        format!("effective set {eff}"),
    )?;
    let plain = m.ambient().find("all-I").ok_or("missing condition all-I")?;
    let base = derive_effective_instruction_set(&m, plain).map_err(|e| e.to_string())?;
    check(base == "GGR".parse().unwrap(), format!("base set {base}"))?;
    let exact = exact_same_fraction(&m).map_err(|e| e.to_string())?;
    check(exact == ratio(5, 9), format!("exact {exact}"))?;
    Ok("II-I-II behaves as RGG, exact same-fraction 5/9".into())
}

fn collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 250;
    for i in 0..n {
        let mut p = random_params(&mut rng);
        p.full_support = true;
        let m = generate_compliant_model(p, &mut rng);
        let r = collapse_analysis(&m);
        check(
            r.verdict == Verdict::FullyCollapsed,
            format!("model {i}: verdict {}", r.verdict),
        )?;
        let first = r
            .effective_by_tau
            .first()
            .map(|(_, s)| *s)
            .ok_or("no effective sets")?;
        check(
            r.effective_by_tau.iter().all(|(_, s)| *s == first),
            format!("model {i}: effective set depends on the condition"),
        )?;
        check(
            r.effective_distribution.len() == 1,
            format!("model {i}: several effective sets"),
        )?;
    }
    Ok(format!(
        "{n} full-support models fully collapsed to one set"
    ))
}

fn equivalent(m: &MicrosettingModel) -> Result<usize, String> {
    let mut checked = 0;
    for tau in m.ambient().support() {
        let eff = derive_effective_instruction_set(m, tau).map_err(|e| e.to_string())?;
        for pair in SettingPair::all() {
            let micro = (
                m.respond_at(Wing::A, pair.a, tau),
                m.respond_at(Wing::B, pair.b, tau),
            );
            check(
                micro == (eff.color(pair.a), eff.color(pair.b)),
                format!(
                    "condition {} pair {}{}",
                    m.ambient().label(tau),
                    pair.a.label(),
                    pair.b.label()
                ),
            )?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn effective_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 600;
    let mut cells = 0;
    for i in 0..n {
        let m = generate_compliant_model(random_params(&mut rng), &mut rng);
        cells += equivalent(&m).map_err(|e| format!("model {i}: {e}"))?;
    }
    cells += equivalent(&worked_example())?;
    Ok(format!("{n} models, {cells} (condition, pair) cells agree"))
}

fn locality() -> Outcome {
    let probes = 64;
    for set in InstructionSet::all() {
        check(
            locality_replay_check(&set, 1, probes).passed(),
            format!("set {set} flagged"),
        )?;
    }
    check(
        locality_replay_check(&InstructionMixture::uniform(), 1, probes).passed(),
        "uniform mixture flagged",
    )?;
    check(
        locality_replay_check(&worked_example(), 1, probes).passed(),
        "worked example flagged",
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..20 {
        let m = generate_compliant_model(random_params(&mut rng), &mut rng);
        check(
            locality_replay_check(&m, i, probes).passed(),
            format!("generated model {i} flagged"),
        )?;
    }
    let control = NonlocalControl::default();
    let witness = match locality_replay_check(&control, 1, probes) {
        LocalityVerdict::Fail(w) => w,
        LocalityVerdict::Pass => return Err("nonlocal control passed".into()),
    };
    check(witness.colors.0 != witness.colors.1, "witness colors agree")?;
    let records = run_experiment_sharded(&control, &ExperimentConfig::new(TRIALS, 12), SHARDS)
        .map_err(|e| e.to_string())?;
    let detail = quantum_like(&tally(&records)).map_err(|e| format!("nonlocal control: {e}"))?;
    Ok(format!(
        "local models pass; control caught at probe {} (wing {:?}, setting {}); control {detail}",
        witness.probe,
        witness.wing,
        witness.own.label()
    ))
}

fn reproducibility() -> Outcome {
    let docs = vec![
        ModelSpecDocument::QuantumReference,
        ModelSpecDocument::NonlocalControl,
        ModelSpecDocument::InstructionSet { set: "GGR".into() },
        ModelSpecDocument::InstructionMixture {
            weights: ["1/8", "0", "1/4", "0", "1/8", "1/4", "1/4", "0"]
                .map(String::from)
                .to_vec(),
        },
        ModelSpecDocument::from_microsetting(&worked_example()),
    ];
    let render = |doc: &ModelSpecDocument, shards: usize| -> Result<(String, String), String> {
        let mut opts = SimulateOptions::new(20_000, 99);
        opts.shards = shards;
        let (report, records) = cli::simulate(doc, &opts).map_err(|e| e.to_string())?;
        Ok((to_json(&report), write_records(&records)))
    };
    for doc in &docs {
        let base = render(doc, 1)?;
        check(
            render(doc, 1)? == base,
            format!("{}: second run differs", doc.kind()),
        )?;
        for shards in [2, 3, 7] {
            check(
                render(doc, shards)? == base,
                format!("{}: {shards} shards differ", doc.kind()),
            )?;
        }
    }
    let adaptive = ModelSpecDocument::Adaptive {
        strategy: StrategySpec::LeastSame,
    };
    check(
        render(&adaptive, 1)? == render(&adaptive, 1)?,
        "adaptive: second run differs",
    )?;
    Ok(format!(
        "{} models byte-identical across runs and shard counts",
        docs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("enumeration exactness", enumeration),
        ("mixture bound", bound),
        ("incompatibility certificate", incompatibility),
        ("quantum reference statistics", quantum_reference),
        ("local simulations respect the bound", lhv_simulations),
        ("worked microsetting example", worked),
        ("collapse under full support", collapse),
        ("effective-set equivalence", effective_equivalence),
        ("locality harness", locality),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

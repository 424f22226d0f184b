//! Acceptance suite. One test per criterion, each printing a `criterion NN:
//! PASS` line on success; failures carry the full context in the assertion
//! message.
//!
//! Criteria 11-15 share a single desk-scale experiment grid (two agent
//! counts, five binary issues, four radii, 1,000 profiles per cell) computed
//! once; criterion 15 recomputes it under a different worker count and
//! compares CSV bytes.

mod common;

use std::sync::OnceLock;

use common::brute_beats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ivsim_core::{
    build_uncertainty_set, check_step_containment, fixtures, nonatomic, run_experiment,
    sample_impartial_culture, sample_o_legal, write_aggregate_csv, write_raw_csv, Alternative,
    DistanceMetric, DynamicsConfig, DynamicsKind, ExperimentGrid, ExperimentOutput, IssueDomain,
    IssueOrder, MassProfile, NonatomicConfig, NonatomicScheduler, NonatomicUncertainty, Radius,
    Ranking, SchedulerPolicy, ScoreTuple, StepContext, Terminal, TypeSet, UncertaintyMode,
    UncertaintySpec, VoteProfile, DEFAULT_ROUND_CAP,
};

const GRID_MASTER_SEED: u64 = 42;

fn desk_grid() -> &'static ExperimentOutput {
    static GRID: OnceLock<ExperimentOutput> = OnceLock::new();
    GRID.get_or_init(|| run_experiment(&ExperimentGrid::desk(GRID_MASTER_SEED)))
}

fn assert_fixture_passes(criterion: usize, name: &str) {
    let report = fixtures::run_fixture(name).expect("bundled fixture");
    let failures: Vec<String> = report
        .failed_checks()
        .map(|c| format!("{}: {}", c.label, c.detail))
        .collect();
    assert!(
        failures.is_empty(),
        "criterion {criterion:02} ({name}): FAIL\n{}",
        failures.join("\n")
    );
    println!("criterion {criterion:02} ({name}): PASS");
}

fn random_ranking(domain: &IssueDomain, rng: &mut ChaCha8Rng) -> Ranking {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..domain.num_alternatives()).collect();
    order.shuffle(rng);
    Ranking::from_order(order).unwrap()
}

fn random_votes(domain: &IssueDomain, n: usize, rng: &mut ChaCha8Rng) -> VoteProfile {
    VoteProfile::new(
        (0..n)
            .map(|_| {
                Alternative::new(
                    domain.sizes().iter().map(|&k| rng.gen_range(0..k)).collect(),
                )
            })
            .collect(),
    )
}

fn linf_radii(radii: &[i64]) -> UncertaintySpec {
    UncertaintySpec::new(
        DistanceMetric::LInf,
        radii.iter().map(|&r| Radius::integer(r).unwrap()).collect(),
    )
    .unwrap()
}

// ----------------------------------------------------------- fixtures ----

#[test]
fn criterion_01_example1_exact() {
    assert_fixture_passes(1, "example1");
}

#[test]
fn criterion_02_example2_exact() {
    assert_fixture_passes(2, "example2");
}

#[test]
fn criterion_03_table1_br_cycle_exact() {
    assert_fixture_passes(3, "table1_br_cycle");
}

#[test]
fn criterion_04_table2_ldi_cycle_exact() {
    assert_fixture_passes(4, "table2_ldi_cycle");
}

#[test]
fn criterion_05_example4_steps_exact() {
    assert_fixture_passes(5, "example4");
}

#[test]
fn criterion_06_example5_radii_table_exact() {
    assert_fixture_passes(6, "example5_radii_table");
}

// -------------------------------------------------- convergence suites ----

#[test]
fn criterion_07_containment_on_10k_binary_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0701);
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let p = rng.gen_range(2..=4);
        let domain = IssueDomain::binary(p).unwrap();
        let ranking = random_ranking(&domain, &mut rng);
        let n = rng.gen_range(2..=11);
        let votes = random_votes(&domain, n, &mut rng);
        let agent = rng.gen_range(0..n);
        let issue = rng.gen_range(0..p);
        let base: Vec<i64> = (0..p).map(|_| rng.gen_range(0..=3)).collect();
        let off_target = loop {
            let k = rng.gen_range(0..p);
            if k != issue {
                break k;
            }
        };
        let mut off = base.clone();
        off[off_target] += rng.gen_range(1..=2);
        let mut on = base.clone();
        on[issue] += rng.gen_range(1..=2);
        let report = check_step_containment(
            &domain,
            &ranking,
            &votes,
            agent,
            issue,
            &linf_radii(&base),
            &linf_radii(&off),
            &linf_radii(&on),
        )
        .unwrap();
        if !report.lower_holds() || !report.upper_holds() {
            violations += 1;
        }
    }
    assert_eq!(violations, 0, "criterion 07: FAIL ({violations} violations)");
    println!("criterion 07 (containment on 10,000 binary instances): PASS");
}

#[test]
fn criterion_08_o_legal_binary_instances_converge() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0801);
    let mut cap_hits = 0usize;
    for _ in 0..1_000 {
        let p = rng.gen_range(2..=4);
        let domain = IssueDomain::binary(p).unwrap();
        let n = 2 * rng.gen_range(1..=9) + 1; // odd, 3..=19
        let mut order_vec: Vec<usize> = (0..p).collect();
        use rand::seq::SliceRandom;
        order_vec.shuffle(&mut rng);
        let order = IssueOrder::new(order_vec, &domain).unwrap();
        let prefs = sample_o_legal(n, &domain, &order, &mut rng);
        let specs: Vec<UncertaintySpec> = (0..n)
            .map(|_| linf_radii(&(0..p).map(|_| rng.gen_range(0..=3)).collect::<Vec<_>>()))
            .collect();
        let config = DynamicsConfig::new(
            DynamicsKind::LocalDominance,
            UncertaintyMode::Fixed(specs),
            SchedulerPolicy::UniformRandom { seed: rng.gen() },
        );
        let initial = random_votes(&domain, n, &mut rng);
        let result = ivsim_core::dynamics::run(&prefs, initial, &config).unwrap();
        if result.terminal != Terminal::Equilibrium {
            cap_hits += 1;
        }
    }
    assert_eq!(cap_hits, 0, "criterion 08: FAIL ({cap_hits} cap hits)");
    println!("criterion 08 (1,000 common-order binary instances converge): PASS");
}

#[test]
fn criterion_09_alternating_and_nonatomic_convergence() {
    // alternating uncertainty, atomic
    let mut rng = ChaCha8Rng::seed_from_u64(0x0901);
    let mut cap_hits = 0usize;
    for _ in 0..1_000 {
        let p = rng.gen_range(2..=4);
        let domain = IssueDomain::binary(p).unwrap();
        let n = rng.gen_range(3..=13);
        let prefs = sample_impartial_culture(n, &domain, &mut rng);
        let pairs: Vec<(Radius, Radius)> = (0..n)
            .map(|_| {
                let rc = rng.gen_range(0..=2);
                let ro = rc + rng.gen_range(1..=2);
                (Radius::integer(rc).unwrap(), Radius::integer(ro).unwrap())
            })
            .collect();
        let config = DynamicsConfig::new(
            DynamicsKind::LocalDominance,
            UncertaintyMode::alternating(DistanceMetric::LInf, pairs).unwrap(),
            SchedulerPolicy::UniformRandom { seed: rng.gen() },
        );
        let initial = random_votes(&domain, n, &mut rng);
        let result = ivsim_core::dynamics::run(&prefs, initial, &config).unwrap();
        if result.terminal != Terminal::Equilibrium {
            cap_hits += 1;
        }
    }
    assert_eq!(
        cap_hits, 0,
        "criterion 09 (alternating): FAIL ({cap_hits} cap hits)"
    );

    // nonatomic analogues at epsilon = 1/n with batch moves: common-order
    // populations with per-type radii, and arbitrary populations with
    // alternating uncertainty
    let mut na_cap_hits = 0usize;
    for case in 0..1_000 {
        let p = rng.gen_range(2..=3);
        let domain = IssueDomain::binary(p).unwrap();
        let n = rng.gen_range(3..=9);
        let mass = |units: i64| Radius::new(num_rational::Rational64::new(units, n as i64)).unwrap();
        let o_legal = case % 2 == 0;
        let rankings: Vec<Ranking> = if o_legal {
            let mut order_vec: Vec<usize> = (0..p).collect();
            use rand::seq::SliceRandom;
            order_vec.shuffle(&mut rng);
            let order = IssueOrder::new(order_vec, &domain).unwrap();
            sample_o_legal(n, &domain, &order, &mut rng)
                .rankings()
                .to_vec()
        } else {
            (0..n).map(|_| random_ranking(&domain, &mut rng)).collect()
        };
        let sets: Vec<TypeSet> = rankings
            .into_iter()
            .map(|ranking| {
                let radii: Vec<Radius> = (0..p).map(|_| mass(rng.gen_range(0..=3))).collect();
                let vote = Alternative::new(
                    domain.sizes().iter().map(|&k| rng.gen_range(0..k)).collect(),
                );
                TypeSet {
                    ranking,
                    spec: UncertaintySpec::new(DistanceMetric::LInf, radii).unwrap(),
                    vote,
                }
            })
            .collect();
        let profile = MassProfile::new(domain, sets).unwrap();
        let mut config =
            NonatomicConfig::new(NonatomicScheduler::BatchRandom { seed: rng.gen() });
        if !o_legal {
            let pairs: Vec<(Radius, Radius)> = (0..n)
                .map(|_| {
                    let rc = rng.gen_range(0..=2);
                    (mass(rc), mass(rc + rng.gen_range(1..=2)))
                })
                .collect();
            config = config.with_uncertainty(
                NonatomicUncertainty::alternating(DistanceMetric::LInf, pairs).unwrap(),
            );
        }
        let result = nonatomic::run(&profile, &config).unwrap();
        if result.terminal != Terminal::Equilibrium {
            na_cap_hits += 1;
        }
    }
    assert_eq!(
        na_cap_hits, 0,
        "criterion 09 (nonatomic analogues): FAIL ({na_cap_hits} cap hits)"
    );
    println!("criterion 09 (alternating + nonatomic convergence): PASS");
}

#[test]
fn criterion_10_factored_beats_equal_brute_force_on_10k_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1001);
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    while checked < 10_000 {
        let p = rng.gen_range(1..=3);
        let sizes: Vec<usize> = (0..p).map(|_| rng.gen_range(2..=4)).collect();
        let domain = IssueDomain::new(sizes.clone()).unwrap();
        let ranking = random_ranking(&domain, &mut rng);
        let scores = ScoreTuple::new(
            sizes
                .iter()
                .map(|&k| (0..k).map(|_| rng.gen_range(0..=6)).collect())
                .collect(),
        );
        let radii: Vec<i64> = (0..p).map(|_| rng.gen_range(0..=2)).collect();
        let spec = linf_radii(&radii);
        let set = build_uncertainty_set(&scores, &spec);
        if set.product_size() > 1_000_000 {
            continue;
        }
        let current = Alternative::new(sizes.iter().map(|&k| rng.gen_range(0..k)).collect());
        let issue = rng.gen_range(0..p);
        let ctx = StepContext::from_adjusted(
            &domain,
            &ranking,
            scores.clone(),
            current.clone(),
            issue,
            &spec,
        );
        let x = current.with_candidate(issue, rng.gen_range(0..sizes[issue]));
        let y = current.with_candidate(issue, rng.gen_range(0..sizes[issue]));
        if ctx.beats(&x, &y) != brute_beats(&domain, &ranking, &set, &x, &y, false) {
            mismatches += 1;
        }
        checked += 1;
    }
    assert_eq!(mismatches, 0, "criterion 10: FAIL ({mismatches} mismatches)");
    println!("criterion 10 (factored beat test vs enumeration, 10,000 instances): PASS");
}

// ------------------------------------------------------ experiment grid ----

#[test]
fn criterion_11_non_equilibrium_fraction_decreases_in_radius() {
    let grid = desk_grid();
    for &n in &[7usize, 11] {
        let mut fracs = Vec::new();
        for r in 0..=3i64 {
            let cell = grid
                .cells
                .iter()
                .find(|c| c.n == n && c.r == r)
                .expect("cell exists");
            fracs.push(1.0 - cell.truthful_equilibrium as f64 / cell.profiles as f64);
        }
        for w in fracs.windows(2) {
            assert!(
                w[0] > w[1],
                "criterion 11: FAIL (n={n}, fractions {fracs:?} not strictly decreasing)"
            );
        }
        println!("criterion 11 detail: n={n} non-equilibrium fractions {fracs:?}");
    }
    println!("criterion 11 (non-equilibrium fraction decreases in r): PASS");
}

#[test]
fn criterion_12_cycles_vanish_with_uncertainty() {
    let grid = desk_grid();
    let caps_r0: usize = grid
        .cells
        .iter()
        .filter(|c| c.r == 0)
        .map(|c| c.cycled_or_capped)
        .sum();
    assert!(caps_r0 > 0, "criterion 12: FAIL (no cycles at r=0)");
    let (caps_rpos, total_rpos) = grid
        .cells
        .iter()
        .filter(|c| c.r >= 1)
        .fold((0usize, 0usize), |(c, t), cell| {
            (c + cell.cycled_or_capped, t + cell.profiles)
        });
    let frac = caps_rpos as f64 / total_rpos as f64;
    assert!(
        frac <= 0.001,
        "criterion 12: FAIL ({caps_rpos}/{total_rpos} = {frac} cycled at r>=1)"
    );
    println!(
        "criterion 12 (cycles at r=0: {caps_r0}; at r>=1: {caps_rpos}/{total_rpos}): PASS"
    );
}

#[test]
fn criterion_13_steps_to_converge_decrease_in_radius() {
    let grid = desk_grid();
    for &n in &[7usize, 11] {
        let means: Vec<f64> = (1..=3i64)
            .map(|r| {
                grid.cells
                    .iter()
                    .find(|c| c.n == n && c.r == r)
                    .expect("cell exists")
                    .mean_steps
            })
            .collect();
        assert!(
            means[0] > means[1] && means[1] > means[2],
            "criterion 13: FAIL (n={n}, mean steps {means:?} not decreasing)"
        );
        println!("criterion 13 detail: n={n} mean steps r=1..3 {means:?}");
    }
    println!("criterion 13 (steps to converge decrease in r): PASS");
}

#[test]
fn criterion_14_welfare_gain_positive_and_decreasing_in_radius() {
    let grid = desk_grid();
    // pooled across n per radius: converged (>= 1 step) runs with a defined
    // percent change
    let mut means = Vec::new();
    for r in 0..=3i64 {
        let pcts: Vec<f64> = grid
            .rows
            .iter()
            .filter(|row| {
                row.r == r && row.terminal.is_equilibrium() && !row.truthful_is_equilibrium
            })
            .filter_map(|row| row.welfare_pct_change)
            .collect();
        assert!(
            !pcts.is_empty(),
            "criterion 14: FAIL (no converged runs at r={r})"
        );
        means.push(pcts.iter().sum::<f64>() / pcts.len() as f64);
    }
    println!("criterion 14 detail: mean welfare change by r {means:?}");
    for (r, m) in means.iter().enumerate() {
        assert!(*m > 0.0, "criterion 14: FAIL (mean at r={r} is {m} <= 0)");
    }
    for w in means.windows(2) {
        assert!(
            w[0] > w[1],
            "criterion 14: FAIL (means {means:?} not decreasing)"
        );
    }
    println!("criterion 14 (welfare gain positive, decreasing in r): PASS");
}

#[test]
fn criterion_15_grid_output_is_byte_identical_across_reruns() {
    let first = desk_grid();
    let second = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_experiment(&ExperimentGrid::desk(GRID_MASTER_SEED)));
    let mut raw_a = Vec::new();
    let mut raw_b = Vec::new();
    write_raw_csv(&mut raw_a, &first.rows).unwrap();
    write_raw_csv(&mut raw_b, &second.rows).unwrap();
    assert_eq!(raw_a, raw_b, "criterion 15: FAIL (raw CSV differs)");
    let mut agg_a = Vec::new();
    let mut agg_b = Vec::new();
    write_aggregate_csv(&mut agg_a, &first.cells).unwrap();
    write_aggregate_csv(&mut agg_b, &second.cells).unwrap();
    assert_eq!(agg_a, agg_b, "criterion 15: FAIL (aggregate CSV differs)");
    println!(
        "criterion 15 (byte-identical CSVs across reruns and worker counts, {} bytes): PASS",
        raw_a.len()
    );
}

#[test]
fn desk_grid_cap_sanity() {
    // the shared grid honors the standard stopping condition
    assert_eq!(ExperimentGrid::desk(GRID_MASTER_SEED).cap, DEFAULT_ROUND_CAP);
}

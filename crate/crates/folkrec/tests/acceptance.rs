//! Acceptance suite: one test per release criterion. Each test prints as its
//! own pass/fail line in the cargo test output.
//!
//! The oracles here are deliberately naive re-implementations (exhaustive
//! search, dense linear algebra, rational arithmetic written from scratch)
//! and share no code with the library paths they check.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use folkrec::config::{ConfigOverlay, CorpusInput};
use folkrec::run::{evaluate_parallel, run_experiment};
use folkrec::synth::{generate_synthetic, SynthParams};
use folkrec_core::evaluate::default_cutoffs;
use folkrec_core::frequency::mp_u;
use folkrec_core::graph::{adapted_pagerank, build_graph, FolksonomyGraph, PreferenceVector};
use folkrec_core::temporal::{bla, bll_recommend, softmax_in_place, DecayParams};
use folkrec_core::{
    build_index, build_recommender, evaluate, leave_one_out_split, p_core, AlgorithmKind,
    AlgorithmParams, Folksonomy, Post, Recommender, TestCase,
};

fn frac(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_folksonomy(rng: &mut ChaCha8Rng, max_users: usize, max_posts: usize) -> Folksonomy {
    let wanted = rng.gen_range(2..=max_posts);
    let mut posts: BTreeMap<(usize, usize), (BTreeSet<usize>, i64)> = BTreeMap::new();
    let mut attempts = 0;
    while posts.len() < wanted && attempts < wanted * 4 {
        attempts += 1;
        let key = (rng.gen_range(0..max_users), rng.gen_range(0..max_posts + 2));
        let n_tags = rng.gen_range(1..=3);
        let tags: BTreeSet<usize> = (0..n_tags).map(|_| rng.gen_range(0..8)).collect();
        let ts = rng.gen_range(0..5_000);
        posts.entry(key).or_insert((tags, ts));
    }
    let posts = posts
        .into_iter()
        .map(|((u, r), (tags, ts))| {
            Post::new(
                format!("u{u}"),
                format!("r{r}"),
                tags.into_iter().map(|t| format!("t{t}")),
                ts,
            )
            .unwrap()
        })
        .collect();
    Folksonomy::from_posts(posts).unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1: the batch evaluator matches a naive rational-arithmetic
// evaluator exactly on randomized small folksonomies.
// ---------------------------------------------------------------------------

struct NaiveAggregate {
    precision: Vec<f64>,
    recall: Vec<f64>,
    f1: Vec<f64>,
    mrr: f64,
    map: f64,
}

/// Straight-line reference evaluator: per-case fractions, exact sums,
/// floats only at the very end.
fn naive_evaluate(
    recommender: &dyn Recommender,
    test: &[TestCase],
    cutoffs: &[usize],
) -> NaiveAggregate {
    let mut p_sums = vec![BigRational::zero(); cutoffs.len()];
    let mut r_sums = vec![BigRational::zero(); cutoffs.len()];
    let mut rr_sum = BigRational::zero();
    let mut ap_sum = BigRational::zero();

    for case in test {
        let top: Vec<String> = recommender
            .recommend(&case.user, &case.resource, case.timestamp, 10)
            .tags()
            .map(str::to_string)
            .collect();
        let truth = &case.true_tags;
        for (ci, &k) in cutoffs.iter().enumerate() {
            let hits = top
                .iter()
                .take(k)
                .filter(|t| truth.contains(t.as_str()))
                .count();
            p_sums[ci] += frac(hits, k);
            r_sums[ci] += frac(hits, truth.len());
        }
        let mut rr = BigRational::zero();
        let mut ap = BigRational::zero();
        let mut hits = 0;
        for (i, tag) in top.iter().take(10).enumerate() {
            if truth.contains(tag.as_str()) {
                hits += 1;
                rr += frac(1, i + 1);
                ap += frac(hits, i + 1);
            }
        }
        rr_sum += rr / BigInt::from(truth.len());
        ap_sum += ap / BigInt::from(truth.len());
    }

    let n = BigInt::from(test.len());
    let mut precision = Vec::new();
    let mut recall = Vec::new();
    let mut f1 = Vec::new();
    for ci in 0..cutoffs.len() {
        let p = &p_sums[ci] / &n;
        let r = &r_sums[ci] / &n;
        let f = if (&p + &r).is_zero() {
            BigRational::zero()
        } else {
            BigRational::from(BigInt::from(2)) * &p * &r / (&p + &r)
        };
        precision.push(p.to_f64().unwrap());
        recall.push(r.to_f64().unwrap());
        f1.push(f.to_f64().unwrap());
    }
    NaiveAggregate {
        precision,
        recall,
        f1,
        mrr: (rr_sum / &n).to_f64().unwrap(),
        map: (ap_sum / &n).to_f64().unwrap(),
    }
}

#[test]
fn criterion_1_evaluator_matches_rational_oracle() {
    let started = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cutoffs = default_cutoffs();
    let algorithms = [
        AlgorithmKind::Mp,
        AlgorithmKind::MpU,
        AlgorithmKind::MpR,
        AlgorithmKind::MpUr,
        AlgorithmKind::Cf,
        AlgorithmKind::Bll,
        AlgorithmKind::BllC,
        AlgorithmKind::Girp,
        AlgorithmKind::Girptm,
        AlgorithmKind::Apr,
        AlgorithmKind::Fr,
    ];
    let params = AlgorithmParams::default();

    let mut checked = 0;
    while checked < 100 {
        let f = random_folksonomy(&mut rng, 10, 15);
        let split = leave_one_out_split(f);
        if split.test.is_empty() {
            continue;
        }
        let index = build_index(&split.train);
        let kind = algorithms[checked % algorithms.len()];
        let recommender = build_recommender(kind, &params, &index);

        let report = evaluate(recommender.as_ref(), &split.test, &cutoffs).unwrap();
        let parallel = evaluate_parallel(recommender.as_ref(), &split.test, &cutoffs).unwrap();
        assert_eq!(report, parallel, "parallel evaluation must be identical");

        let oracle = naive_evaluate(recommender.as_ref(), &split.test, &cutoffs);
        assert_eq!(report.precision, oracle.precision, "{kind:?} precision");
        assert_eq!(report.recall, oracle.recall, "{kind:?} recall");
        assert_eq!(report.f1, oracle.f1, "{kind:?} f1");
        assert_eq!(report.mrr, oracle.mrr, "{kind:?} mrr");
        assert_eq!(report.map, oracle.map, "{kind:?} map");
        checked += 1;
    }
    assert!(
        started.elapsed().as_secs() < 60,
        "criterion 1 must finish within a minute"
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: p-core equals the exhaustive-search maximal subset.
// ---------------------------------------------------------------------------

/// Largest subset of posts in which every user, resource and tag occurs at
/// least `p` times, found by trying all 2^n subsets. Also verifies that the
/// maximum is unique, which the iterated-removal algorithm relies on.
fn exhaustive_p_core(posts: &[Post], p: usize) -> Vec<Post> {
    let mut best: u32 = 0; // the empty subset is always valid
    let mut ties_at_best = 0usize;

    for mask in 1u32..(1 << posts.len()) {
        let mut user_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut resource_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut tag_count: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, post) in posts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                *user_count.entry(post.user.as_str()).or_default() += 1;
                *resource_count.entry(post.resource.as_str()).or_default() += 1;
                for t in post.tags() {
                    *tag_count.entry(t.as_str()).or_default() += 1;
                }
            }
        }
        let valid = user_count.values().all(|&c| c >= p)
            && resource_count.values().all(|&c| c >= p)
            && tag_count.values().all(|&c| c >= p);
        if valid {
            if mask.count_ones() > best.count_ones() {
                best = mask;
                ties_at_best = 1;
            } else if mask.count_ones() == best.count_ones() {
                ties_at_best += 1;
            }
        }
    }
    assert!(ties_at_best <= 1, "maximal valid subset is not unique");
    posts
        .iter()
        .enumerate()
        .filter(|(i, _)| best & (1 << i) != 0)
        .map(|(_, post)| post.clone())
        .collect()
}

#[test]
fn criterion_2_p_core_matches_exhaustive_search() {
    let started = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for round in 0..110 {
        let f = random_folksonomy(&mut rng, 5, 12);
        let p = rng.gen_range(1..=3);
        let expected = exhaustive_p_core(f.posts(), p);
        let actual = p_core(f, p);
        assert_eq!(
            actual.posts(),
            expected.as_slice(),
            "round {round} disagrees with exhaustive search at p = {p}"
        );
    }
    assert!(
        started.elapsed().as_secs() < 60,
        "criterion 2 must finish within a minute"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: with d = 0, BLL degenerates to most-popular-by-user,
// tie-breaks included.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_bll_with_zero_decay_equals_mp_u() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let params = DecayParams {
        d: 0.0,
        ..DecayParams::default()
    };
    for _ in 0..100 {
        let f = random_folksonomy(&mut rng, 8, 20);
        let index = build_index(&f);
        let ref_time = 5_000 + rng.gen_range(0..1_000);
        for user in index.users() {
            let bll: Vec<String> = bll_recommend(&index, user, ref_time, 10, &params)
                .tags()
                .map(str::to_string)
                .collect();
            let popular: Vec<String> = mp_u(&index, user, 10).tags().map(str::to_string).collect();
            assert_eq!(bll, popular, "user {user} ranked differently");
        }
    }
}

// ---------------------------------------------------------------------------
// Criterion 4: recency monotonicity of BLL at d = 0.5.
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn criterion_4_more_recent_equal_frequency_tag_ranks_higher(
        shared in prop::collection::vec(1i64..10_000_000, 0..15),
        recent in 1i64..5_000_000,
        delta in 1i64..5_000_000,
    ) {
        let ref_time = 50_000_000i64;
        let stale = recent + delta;
        let mut posts = Vec::new();
        // Both tags share every usage except one: `fresh` is used `recent`
        // seconds before ref_time, `old` is used `stale` seconds before.
        for (i, &r) in shared.iter().enumerate() {
            posts.push(Post::new("u", format!("rs{i}"), ["fresh", "old"], ref_time - r).unwrap());
        }
        posts.push(Post::new("u", "ra", ["fresh"], ref_time - recent).unwrap());
        posts.push(Post::new("u", "rb", ["old"], ref_time - stale).unwrap());
        let index = build_index(&Folksonomy::from_posts(posts).unwrap());

        let params = DecayParams::default();
        let fresh = bla(&index, "u", "fresh", ref_time, &params).unwrap();
        let old = bla(&index, "u", "old", ref_time, &params).unwrap();
        prop_assert!(fresh > old, "BLA {fresh} must exceed {old}");

        let ranked: Vec<String> =
            bll_recommend(&index, "u", ref_time, 2, &params).tags().map(str::to_string).collect();
        prop_assert_eq!(ranked, vec!["fresh".to_string(), "old".to_string()]);
    }
}

// ---------------------------------------------------------------------------
// Criterion 5: on a narrow folksonomy (every test resource unseen in
// training), BLL+C's report equals BLL's report.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_hybrid_equals_pure_bll_when_resources_are_unseen() {
    let corpus = generate_synthetic(&SynthParams {
        users: 300,
        base_tags: 150,
        reuse_bias: 0.8,
        recency_bias: 0.6,
        seed: 505,
        max_posts_per_user: 30,
        resource_pool: 0,
    });
    let split = leave_one_out_split(corpus);
    assert!(split.test.len() > 200);
    let index = build_index(&split.train);
    for case in &split.test {
        assert!(
            index.resource_id(&case.resource).is_none(),
            "narrow corpus must not share resources"
        );
    }
    let params = AlgorithmParams::default();
    let cutoffs = default_cutoffs();
    let bll = build_recommender(AlgorithmKind::Bll, &params, &index);
    let hybrid = build_recommender(AlgorithmKind::BllC, &params, &index);
    let bll_report = evaluate(bll.as_ref(), &split.test, &cutoffs).unwrap();
    let hybrid_report = evaluate(hybrid.as_ref(), &split.test, &cutoffs).unwrap();
    assert_eq!(bll_report, hybrid_report);
}

// ---------------------------------------------------------------------------
// Criterion 6: power iteration against a dense linear solve, differential
// conservation, and the zero differential of an unboosted preference.
// ---------------------------------------------------------------------------

fn random_graph(rng: &mut ChaCha8Rng) -> FolksonomyGraph {
    let users = rng.gen_range(1..=6);
    let resources = rng.gen_range(1..=12);
    let tags = rng.gen_range(1..=12);
    let n = users + resources + tags;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < 0.25 {
                edges.push((i, j, rng.gen_range(1..6) as f64));
            }
        }
    }
    FolksonomyGraph::from_parts(
        (0..users).map(|i| format!("u{i}")).collect(),
        (0..resources).map(|i| format!("r{i}")).collect(),
        (0..tags).map(|i| format!("t{i}")).collect(),
        &edges,
    )
    .unwrap()
}

/// Solves (I - damping * A) w = (1 - damping) p densely.
fn dense_pagerank_solve(graph: &FolksonomyGraph, preference: &[f64], damping: f64) -> Vec<f64> {
    let n = graph.node_count();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let entry = graph.transition(i, j);
        if i == j {
            1.0 - damping * entry
        } else {
            -damping * entry
        }
    });
    let b = DVector::from_fn(n, |i, _| (1.0 - damping) * preference[i]);
    let solved = a.lu().solve(&b).expect("I - dA is nonsingular for d < 1");
    solved.iter().copied().collect()
}

#[test]
fn criterion_6_power_iteration_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut checked = 0;
    while checked < 50 {
        // Alternate synthetic graphs and graphs built from folksonomies.
        let graph = if checked % 2 == 0 {
            random_graph(&mut rng)
        } else {
            let f = random_folksonomy(&mut rng, 4, 8);
            let index = build_index(&f);
            build_graph(&index)
        };
        let n = graph.node_count();
        if n == 0 || n > 30 {
            continue;
        }
        let damping = [0.5, 0.7, 0.85][checked % 3];

        // Random valid preference vector.
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let normalized: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let preference = PreferenceVector::from_weights(normalized.clone()).unwrap();

        let pr = adapted_pagerank(&graph, &preference, damping, 1e-10, 5_000);
        assert!(pr.converged, "power iteration should converge on {n} nodes");
        let exact = dense_pagerank_solve(&graph, &normalized, damping);
        let l1: f64 = pr
            .weights
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(l1 < 1e-6, "L1 distance {l1} from dense solve (n = {n})");

        // FolkRank differential over all nodes sums to ~0.
        let uniform = PreferenceVector::uniform(n);
        let w0 = adapted_pagerank(&graph, &uniform, damping, 1e-10, 5_000);
        let w1 = adapted_pagerank(&graph, &preference, damping, 1e-10, 5_000);
        let diff_sum: f64 = w1.weights.iter().zip(&w0.weights).map(|(a, b)| a - b).sum();
        assert!(diff_sum.abs() < 1e-8, "differential sum {diff_sum}");

        // An unboosted "boost" (no query entities) is the uniform preference
        // and must produce an identically zero differential.
        let unboosted = PreferenceVector::boosted(&graph, None, None);
        assert_eq!(unboosted.as_slice(), uniform.as_slice());
        let w1_unboosted = adapted_pagerank(&graph, &unboosted, damping, 1e-10, 5_000);
        for (a, b) in w1_unboosted.weights.iter().zip(&w0.weights) {
            assert_eq!(a, b, "unboosted run must match the baseline bitwise");
        }
        checked += 1;
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: trend reproduction on a recency-biased synthetic corpus.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_time_decay_beats_frequency_on_recency_biased_corpus() {
    let started = std::time::Instant::now();
    let corpus = generate_synthetic(&SynthParams {
        users: 500,
        base_tags: 400,
        reuse_bias: 0.9,
        recency_bias: 0.75,
        seed: 11,
        max_posts_per_user: 100,
        resource_pool: 0,
    });
    let split = leave_one_out_split(corpus);
    let index = build_index(&split.train);
    let params = AlgorithmParams::default();
    let cutoffs = default_cutoffs();

    let f1_at_5 = |kind: AlgorithmKind| -> f64 {
        let recommender = build_recommender(kind, &params, &index);
        let report = evaluate_parallel(recommender.as_ref(), &split.test, &cutoffs).unwrap();
        report.f1[4]
    };
    let mp_u = f1_at_5(AlgorithmKind::MpU);
    let girp = f1_at_5(AlgorithmKind::Girp);
    let bll = f1_at_5(AlgorithmKind::Bll);
    let bll_c = f1_at_5(AlgorithmKind::BllC);
    println!("F1@5: mp_u = {mp_u:.4}, girp = {girp:.4}, bll = {bll:.4}, bll_c = {bll_c:.4}");

    assert!(
        bll > mp_u,
        "time-decay scoring must beat plain user frequency: bll {bll} vs mp_u {mp_u}"
    );
    assert!(
        bll_c >= bll,
        "the hybrid must not fall below pure BLL: bll_c {bll_c} vs bll {bll}"
    );
    assert!(
        started.elapsed().as_secs() < 600,
        "criterion 7 must finish within ten minutes"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: softmax normalization invariants under fuzzing.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_softmax_sums_to_one_and_is_shift_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=50);
        let scores: Vec<f64> = (0..len).map(|_| rng.gen_range(-700.0..700.0)).collect();
        let shift = rng.gen_range(-700.0..700.0);

        let mut normalized = scores.clone();
        softmax_in_place(&mut normalized);
        let total: f64 = normalized.iter().sum();
        assert!(
            (total - 1.0).abs() < 1e-9,
            "sum {total} for input {scores:?}"
        );

        let mut shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
        softmax_in_place(&mut shifted);
        for (a, b) in normalized.iter().zip(&shifted) {
            assert!(
                (a - b).abs() < 1e-12,
                "shift changed output: {a} vs {b} (shift {shift})"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical experiment outputs, independent of threads.
// ---------------------------------------------------------------------------

fn read_ignoring_timings(path: &std::path::Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("# wall_time_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_9_experiment_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("synthetic.tsv");
    let corpus = generate_synthetic(&SynthParams {
        users: 60,
        base_tags: 40,
        reuse_bias: 0.7,
        recency_bias: 0.5,
        seed: 909,
        max_posts_per_user: 15,
        resource_pool: 0,
    });
    let mut text = String::new();
    for post in corpus.posts() {
        for tag in post.tags() {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                post.user, post.resource, tag, post.timestamp
            ));
        }
    }
    std::fs::write(&dataset, text).unwrap();

    let run = |label: &str, threads: usize| {
        let overlay = ConfigOverlay {
            dataset: Some(dataset.clone()),
            algorithms: Some(
                [
                    "mp", "mp_u", "mp_r", "mp_ur", "cf", "bll", "bll_c", "girp", "girptm", "apr",
                    "fr",
                ]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            ),
            output_dir: Some(dir.path().join(label)),
            p_core: Some(0),
            threads: Some(threads),
            ..ConfigOverlay::default()
        };
        let config = overlay.resolve_experiment().unwrap();
        assert!(matches!(config.corpus.input, CorpusInput::Dataset(_)));
        run_experiment(&config).unwrap()
    };

    let single = run("single", 1);
    let four = run("four", 4);

    // Metric, stats and curve files must be byte-identical across thread
    // counts.
    assert_eq!(
        std::fs::read(&single.stats).unwrap(),
        std::fs::read(&four.stats).unwrap()
    );
    assert_eq!(
        std::fs::read(&single.metrics).unwrap(),
        std::fs::read(&four.metrics).unwrap()
    );
    assert_eq!(
        std::fs::read(&single.pr_curve).unwrap(),
        std::fs::read(&four.pr_curve).unwrap()
    );

    // Rerunning the exact same config (including the output directory)
    // must reproduce every output byte; only wall-time comments in the
    // manifest may differ.
    let first_stats = std::fs::read(&four.stats).unwrap();
    let first_metrics = std::fs::read(&four.metrics).unwrap();
    let first_curve = std::fs::read(&four.pr_curve).unwrap();
    let first_manifest = read_ignoring_timings(&four.manifest);
    let rerun = run("four", 4);
    assert_eq!(std::fs::read(&rerun.stats).unwrap(), first_stats);
    assert_eq!(std::fs::read(&rerun.metrics).unwrap(), first_metrics);
    assert_eq!(std::fs::read(&rerun.pr_curve).unwrap(), first_curve);
    assert_eq!(read_ignoring_timings(&rerun.manifest), first_manifest);
}

//! End-to-end acceptance checks. Each test prints one line:
//! `criterion N [name]: PASS|FAIL (details)`.

use std::io::Write as _;
use std::time::{Duration, Instant};

use cobdetect::cob::{BuiltinBasis, CoBasis};
use cobdetect::correlations::{correlation_tensor, reconstruct_matrix};
use cobdetect::criteria::{
    evaluate_tensor, Competitor, CriterionSpec, PartitionSpec, TripartiteCoefficients,
};
use cobdetect::numerics::{trace_norm, trace_norm_oracle, RMatrix};
use cobdetect::oracle::{
    default_bases, sample_state, verify_bound_suite, SampleFamily, SamplerConfig,
};
use cobdetect::scan::{example_pins, scan, Grid, ScanResult, THRESHOLD_MATCH};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const SEED: u64 = 20240917;

/// Written straight to stderr so the line shows without `--nocapture`.
fn report(n: u8, name: &str, passed: bool, detail: &str, elapsed: Duration) {
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n} [{name}]: {} ({detail}; {:.2}s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(passed, "criterion {n} failed: {detail}");
}

fn threshold(result: &ScanResult) -> Option<f64> {
    result.threshold.map(|t| t.x)
}

fn within(found: Option<f64>, target: f64, tol: f64) -> bool {
    found.is_some_and(|x| (x - target).abs() <= tol)
}

fn show(found: Option<f64>) -> String {
    found.map_or("none".into(), |x| format!("{x:.5}"))
}

/// max |margin(x) − f(x)| on x = 0, 0.05, …, 1.
fn closed_form_gap(pin: &cobdetect::scan::ExamplePin, f: impl Fn(f64) -> f64) -> f64 {
    let setup = pin.setup().unwrap();
    (0..=20)
        .map(|k| {
            let x = k as f64 / 20.0;
            (setup.margin(x).unwrap() - f(x)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_1_basis_fidelity() {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = vec![];
    for which in BuiltinBasis::ALL {
        let r = cobdetect::validate_cob(&which.operators::<f64>(), 1e-10).unwrap();
        let worst = r
            .orthogonality_residual
            .max(r.completeness_residual)
            .max(r.hermiticity_residual)
            .max(r.trace_residual);
        parts.push(format!("{} worst residual {worst:.1e}", which.name()));
        ok &= r.passed && worst <= 1e-10;
    }
    let elapsed = start.elapsed();
    report(
        1,
        "basis fidelity",
        ok && elapsed < Duration::from_secs(1),
        &parts.join(", "),
        elapsed,
    );
}

#[test]
fn criterion_2_reconstruction_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut states = 0;
    for (k, dims) in [vec![2, 2, 2], vec![3, 3, 2], vec![2, 2, 2, 2]]
        .into_iter()
        .enumerate()
    {
        let bases = default_bases(&dims).unwrap();
        let cfg = SamplerConfig::new(SEED + k as u64, 50, dims, SampleFamily::MixedConvex);
        for i in 0..cfg.count {
            let rho = sample_state(&cfg, i).unwrap();
            let back =
                reconstruct_matrix(&correlation_tensor(&rho, &bases).unwrap(), &bases).unwrap();
            worst = worst.max((back - rho.matrix()).camax());
            states += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        "reconstruction identity",
        worst <= 1e-10 && elapsed < Duration::from_secs(10),
        &format!("{states} states, max entry error {worst:.1e}"),
        elapsed,
    );
}

#[test]
fn criterion_3_example1() {
    let start = Instant::now();
    let pin = &example_pins(1).unwrap()[0];
    let found = threshold(&scan(&pin.setup().unwrap(), &Grid::default(), 1e-8, &[]).unwrap());
    let bound = (2.0 * 0.5f64.sqrt() + (1.0f64 / 8.0).sqrt()) / 3.0;
    let f1 = |x: f64| {
        (x * x - 2.0 * x + 2.0).sqrt() / 8.0 + 3.0 * 2f64.sqrt() * (x - 1.0).abs() / 8.0 - bound
    };
    let gap = closed_form_gap(pin, f1);
    let elapsed = start.elapsed();
    report(
        3,
        "example 1",
        within(found, 0.1919, THRESHOLD_MATCH) && gap <= 1e-9 && elapsed < Duration::from_secs(5),
        &format!(
            "threshold {} vs 0.1919, max |margin - f1| {gap:.1e}",
            show(found)
        ),
        elapsed,
    );
}

#[test]
fn criterion_4_example2() {
    let start = Instant::now();
    let pins = example_pins(2).unwrap();
    let bipartite =
        threshold(&scan(&pins[0].setup().unwrap(), &Grid::default(), 1e-8, &[]).unwrap());
    let gme = threshold(&scan(&pins[1].setup().unwrap(), &Grid::default(), 1e-8, &[]).unwrap());
    let elapsed = start.elapsed();
    report(
        4,
        "example 2",
        within(bipartite, 0.496, THRESHOLD_MATCH)
            && within(gme, 0.7152, THRESHOLD_MATCH)
            && elapsed < Duration::from_secs(10),
        &format!(
            "B^{{3|12}} threshold {} vs 0.496, GME threshold {} vs 0.7152",
            show(bipartite),
            show(gme)
        ),
        elapsed,
    );
}

#[test]
fn criterion_5_example3() {
    let start = Instant::now();
    let pins = example_pins(3).unwrap();
    let mode = threshold(&scan(&pins[0].setup().unwrap(), &Grid::default(), 1e-8, &[]).unwrap());
    let split = threshold(&scan(&pins[1].setup().unwrap(), &Grid::default(), 1e-8, &[]).unwrap());
    let f2 = |x: f64| 3.0 * x / 8.0 + (3.0 * x * x + 1.0).sqrt() / 16.0 - 0.25;
    let f3 =
        |x: f64| (x * x + 1.0).sqrt() / 16.0 + 7.0 * 2f64.sqrt() * x / 16.0 - (1.0f64 / 8.0).sqrt();
    let gap2 = closed_form_gap(&pins[0], f2);
    let gap3 = closed_form_gap(&pins[1], f3);
    let elapsed = start.elapsed();
    report(
        5,
        "example 3",
        within(mode, 0.4545, THRESHOLD_MATCH)
            && within(split, 0.4602, THRESHOLD_MATCH)
            && gap2 <= 1e-9
            && gap3 <= 1e-9
            && elapsed < Duration::from_secs(10),
        &format!(
            "1|234 threshold {} vs 0.4545, 12|34 threshold {} vs 0.4602, max gaps {gap2:.1e} / {gap3:.1e}",
            show(mode),
            show(split)
        ),
        elapsed,
    );
}

#[test]
fn criterion_6_example4() {
    let start = Instant::now();
    let pin = &example_pins(4).unwrap()[0];
    let found = threshold(&scan(&pin.setup().unwrap(), &Grid::default(), 1e-8, &[]).unwrap());
    let elapsed = start.elapsed();
    report(
        6,
        "example 4",
        within(found, 0.4891, THRESHOLD_MATCH) && elapsed < Duration::from_secs(5),
        &format!("threshold {} vs 0.4891", show(found)),
        elapsed,
    );
}

/// Root of a sign-changing function on [lo, hi] by plain bisection.
fn root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_sign = f(lo) > 0.0;
    assert_ne!(lo_sign, f(hi) > 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_7_competitor_roots() {
    let start = Instant::now();
    let roots = [
        (Competitor::G1, 0.134),
        (Competitor::G3, 0.6667),
        (Competitor::G5, 0.783),
    ]
    .map(|(c, target)| (c, target, root(|x| c.evaluate(x), 0.0, 1.0)));
    let ok = roots
        .iter()
        .all(|(_, target, r)| (r - target).abs() <= 1e-3);
    let detail = roots
        .iter()
        .map(|(c, target, r)| format!("{} root {r:.5} vs {target}", c.name()))
        .collect::<Vec<_>>()
        .join(", ");
    report(7, "competitor roots", ok, &detail, start.elapsed());
}

struct Sweep {
    label: String,
    cfg: SamplerConfig,
    bases: Vec<CoBasis<f64>>,
    specs: Vec<CriterionSpec>,
}

fn sweep(label: &str, cfg: SamplerConfig, specs: Vec<CriterionSpec>) -> Sweep {
    Sweep {
        label: label.into(),
        bases: default_bases(&cfg.dims).unwrap(),
        cfg,
        specs,
    }
}

fn theorem1_sweeps() -> Vec<Sweep> {
    let coefficient_pairs = [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8)];
    let mut out = vec![];
    for (k, dims) in [[2, 2, 2], [3, 3, 2], [2, 3, 4]].into_iter().enumerate() {
        for s in 1..=3 {
            let p = PartitionSpec::single(s, 3).unwrap();
            let cfg = SamplerConfig::new(
                SEED + 10 * k as u64 + s as u64,
                500,
                dims.to_vec(),
                SampleFamily::ProductPure,
            )
            .with_partition(p.clone());
            let mut specs = vec![];
            for f in 1..=3 {
                for (c1, c2) in coefficient_pairs {
                    specs.push(CriterionSpec::Theorem1 {
                        party: f,
                        c1,
                        c2,
                        separable: s,
                    });
                }
            }
            out.push(sweep(&format!("thm1 {dims:?} {p}"), cfg, specs));
        }
    }
    out
}

#[test]
fn criterion_8_soundness() {
    let start = Instant::now();
    let mut sweeps = theorem1_sweeps();
    sweeps.push(sweep(
        "thm2 qubits",
        SamplerConfig::new(
            SEED + 100,
            500,
            vec![2, 2, 2],
            SampleFamily::BiseparableMixture,
        ),
        vec![
            CriterionSpec::Theorem2 {
                coefficients: TripartiteCoefficients::default(),
            },
            CriterionSpec::Theorem2 {
                coefficients: TripartiteCoefficients::parse("1,0.5,-0.3,1,0.8,0.2").unwrap(),
            },
        ],
    ));
    sweeps.push(sweep(
        "thm2 3x3x2",
        SamplerConfig::new(
            SEED + 101,
            500,
            vec![3, 3, 2],
            SampleFamily::BiseparableMixture,
        ),
        vec![CriterionSpec::Theorem2 {
            coefficients: TripartiteCoefficients::uniform(1.0, 1.0),
        }],
    ));
    sweeps.push(sweep(
        "cor1 symmetrized qubits",
        SamplerConfig::new(
            SEED + 102,
            500,
            vec![2, 2, 2],
            SampleFamily::BiseparableMixture,
        )
        .symmetrized(),
        vec![
            CriterionSpec::Corollary1 { c11: 1.0, c12: 0.0 },
            CriterionSpec::Corollary1 { c11: 1.0, c12: 1.0 },
            CriterionSpec::Corollary1 { c11: 0.0, c12: 1.0 },
        ],
    ));
    for (k, p) in ["1|2|3", "1|2|3|4"].into_iter().enumerate() {
        let p = PartitionSpec::parse(p).unwrap();
        let n = p.party_count();
        sweeps.push(sweep(
            &format!("thm3 {p}"),
            SamplerConfig::new(
                SEED + 110 + k as u64,
                500,
                vec![2; n],
                SampleFamily::KSeparableMixture,
            )
            .with_partition(p),
            vec![CriterionSpec::Theorem3],
        ));
    }
    for (k, (p, l1)) in [("1|234", 1), ("3|124", 3)].into_iter().enumerate() {
        sweeps.push(sweep(
            &format!("thm4i {p}"),
            SamplerConfig::new(
                SEED + 120 + k as u64,
                500,
                vec![2; 4],
                SampleFamily::KSeparableMixture,
            )
            .with_partition(PartitionSpec::parse(p).unwrap()),
            vec![CriterionSpec::Theorem4i { l1 }],
        ));
    }
    for (k, p) in ["12|34", "14|23", "1|2|34"].into_iter().enumerate() {
        let p = PartitionSpec::parse(p).unwrap();
        sweeps.push(sweep(
            &format!("thm4ii {p}"),
            SamplerConfig::new(
                SEED + 130 + k as u64,
                500,
                vec![2; 4],
                SampleFamily::KSeparableMixture,
            )
            .with_partition(p.clone()),
            vec![CriterionSpec::Theorem4ii { partition: p }],
        ));
    }

    let mut failures = vec![];
    let mut worst = f64::NEG_INFINITY;
    let mut checks = 0;
    for s in &sweeps {
        for spec in &s.specs {
            let r = verify_bound_suite(&s.cfg, &s.bases, spec).unwrap();
            worst = worst.max(r.max_margin);
            checks += r.samples;
            if !r.passed {
                failures.push(format!(
                    "{} {}: {} violations",
                    s.label,
                    spec.id(),
                    r.violating_indices.len()
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = if failures.is_empty() {
        format!(
            "{checks} evaluations over {} classes, worst margin {worst:.2e}",
            sweeps.len()
        )
    } else {
        failures.join("; ")
    };
    report(
        8,
        "soundness sweeps",
        failures.is_empty() && elapsed < Duration::from_secs(60),
        &detail,
        elapsed,
    );
}

#[test]
fn criterion_9_trace_norm_cross_check() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shapes = [(4, 32), (8, 32), (9, 162), (4, 64)];
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let (r, c) = if k % 5 == 4 {
            (rng.random_range(1..=12), rng.random_range(1..=40))
        } else {
            shapes[k % 5]
        };
        let mut m = RMatrix::<f64>::from_fn(r, c, |_, _| StandardNormal.sample(&mut rng));
        if k % 3 == 0 {
            // Low-rank matrices exercise the singular-value cutoff.
            let rank = rng.random_range(1..=r.min(c));
            let left = RMatrix::<f64>::from_fn(r, rank, |_, _| StandardNormal.sample(&mut rng));
            let right = RMatrix::<f64>::from_fn(rank, c, |_, _| StandardNormal.sample(&mut rng));
            m = left * right / 16.0;
        }
        worst = worst.max((trace_norm(&m) - trace_norm_oracle(&m)).abs());
    }
    let elapsed = start.elapsed();
    report(
        9,
        "trace norm cross-check",
        worst <= 1e-9,
        &format!("1000 matrices, max disagreement {worst:.1e}"),
        elapsed,
    );
}

#[test]
fn margins_on_real_b_matrices_match_oracle() {
    // The same cross-check on the matrices the criteria actually build.
    let pin = &example_pins(2).unwrap()[0];
    let setup = pin.setup().unwrap();
    for k in 0..=10 {
        let rho = setup.family.evaluate(k as f64 / 10.0).unwrap();
        let t = correlation_tensor(&rho, &setup.bases).unwrap();
        for f in 1..=3 {
            let b = cobdetect::criteria::b_matrix_tripartite(&t, f, 0.7, 0.4).unwrap();
            assert!((trace_norm(&b) - trace_norm_oracle(&b)).abs() < 1e-12);
        }
        let r = evaluate_tensor(&t, &pin.criterion).unwrap();
        assert!(r.statistic.is_finite());
    }
}

//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use orlicz_approx::bestapprox::{best_approx, best_approx_from, SolverOptions};
use orlicz_approx::config::{Experiment, PsiSpec};
use orlicz_approx::psi::{psi_beta, psi_derivative, psi_integral, PsiSequence};
use orlicz_approx::smoothness::{modulus, ModulusQuery};
use orlicz_approx::theorems::{self, Verdict};
use orlicz_approx::weights::{ap_constant, ApVerdict, IntervalFamily};
use orlicz_approx::{FunctionFamily, OrliczSpace, PeriodicFunction, UniformGrid, Weight, YoungFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const L2_VALUE_RTOL: f64 = 1e-5;
const L2_COEFF_TOL: f64 = 1e-4;
const ROUND_TRIP_TOL: f64 = 1e-12;
const BERNSTEIN_TOL: f64 = 1e-6;
const TELESCOPING_SLACK: f64 = -1e-6;
const MONOTONE_SLACK: f64 = -1e-9;
const SUBADDITIVE_SLACK: f64 = -1e-6;
const CLOSED_FORM_TOL: f64 = 1e-4;
const A2_CONST_TOL: f64 = 1e-9;
const EQUIV_SLACK: f64 = 1e-6;
const LP_TOL: f64 = 1e-6;

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

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn experiment(name: &str) -> Experiment {
    Experiment::load(&configs().join(format!("{name}.json"))).expect("shipped config loads")
}

fn space(young: YoungFunction, weight: Weight) -> OrliczSpace {
    OrliczSpace::new(young, weight, UniformGrid::default()).expect("space builds")
}

fn l2() -> OrliczSpace {
    space(YoungFunction::power(2.0), Weight::constant(1.0))
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> PeriodicFunction {
    let a0 = rng.gen_range(-1.0..1.0);
    let coeffs = (0..degree)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PeriodicFunction::new(a0, coeffs)
}

fn corpus() -> Vec<PeriodicFunction> {
    let mut out: Vec<PeriodicFunction> = [
        "harmonic 1",
        "harmonic 5",
        "poly-decay 1 8",
        "poly-decay 2 12",
        "poly-decay 4 16",
        "alternating 1 10",
        "alternating 2 6",
    ]
    .iter()
    .map(|s| s.parse::<FunctionFamily>().unwrap().build())
    .collect();
    out.push(PeriodicFunction::sin(3, 2.0) + PeriodicFunction::constant(0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for d in [3, 6, 9, 12] {
        out.push(random_poly(&mut rng, d));
    }
    out
}

fn coeff_diff(a: &PeriodicFunction, b: &PeriodicFunction) -> f64 {
    let deg = a.degree().max(b.degree());
    let mut d = (a.a0_half - b.a0_half).abs();
    for k in 1..=deg {
        let (x, y) = (a.harmonic(k), b.harmonic(k));
        d = d.max((x.0 - y.0).abs()).max((x.1 - y.1).abs());
    }
    d
}

fn parseval_tail(f: &PeriodicFunction, n: usize) -> f64 {
    let s: f64 = (n..=f.degree())
        .map(|k| {
            let (a, b) = f.harmonic(k);
            a * a + b * b
        })
        .sum();
    (PI * s).sqrt()
}

fn l2_oracle() -> Outcome {
    let sp = l2();
    let mut worst_val = 0.0f64;
    let mut worst_coeff = 0.0f64;
    let fs = corpus();
    for f in &fs {
        for n in 1..=f.degree() + 1 {
            let want = parseval_tail(f, n);
            let cold = best_approx_from(&sp, f, n, &PeriodicFunction::zero(), &SolverOptions::default()).unwrap();
            for r in [best_approx(&sp, f, n).unwrap(), cold] {
                let err = if want > 0.0 {
                    (r.value - want).abs() / want
                } else {
                    r.value.abs()
                };
                worst_val = worst_val.max(err);
                worst_coeff = worst_coeff.max(coeff_diff(&r.minimizer, &f.partial_sum(n - 1)));
            }
        }
    }
    outcome(
        fs.len() >= 10 && worst_val <= L2_VALUE_RTOL && worst_coeff <= L2_COEFF_TOL,
        format!(
            "{} functions, warm and cold starts, max rel err {worst_val:.2e}, max coeff err {worst_coeff:.2e}",
            fs.len()
        ),
    )
}

fn psi_round_trips() -> Outcome {
    let families = [
        ("power 1", 1.0),
        ("power 2.5", 0.7),
        ("exp 0.5", 0.0),
        ("log-power 1 1", 1.5),
        ("log-power 0.5 2 2", 3.0),
        ("const 2", 0.25),
    ];
    let fs = corpus();
    let fs = &fs[..10];
    let a0_new = 0.75;
    let mut worst = 0.0f64;
    for (fam, beta) in families {
        let pair = psi_beta(fam.parse::<PsiSequence>().unwrap(), beta);
        for f in fs {
            let scale = 1.0f64.max(f.coeffs.iter().fold(f.a0_half.abs(), |m, c| m.max(c.0.abs()).max(c.1.abs())));
            let di = psi_derivative(&psi_integral(f, &pair, 3.0), &pair).unwrap();
            let mut want = f.clone();
            want.a0_half = 0.0;
            worst = worst.max(coeff_diff(&di, &want) / scale);
            let id = psi_integral(&psi_derivative(f, &pair).unwrap(), &pair, a0_new);
            let mut want = f.clone();
            want.a0_half = a0_new;
            worst = worst.max(coeff_diff(&id, &want) / scale);
        }
    }
    outcome(
        worst <= ROUND_TRIP_TOL,
        format!("{} families x {} functions, max err {worst:.2e}", families.len(), fs.len()),
    )
}

fn bernstein_sharpness() -> Outcome {
    let mut worst = 0.0f64;
    let mut rows = 0;
    for r in [1.0, 2.0] {
        let mut exp = experiment("bernstein_15");
        exp.psi = PsiSpec {
            family: format!("power {r}"),
            beta: r,
            a0: 0.0,
        };
        exp.run.n_range = [1, 32];
        let rep = theorems::run(&exp).unwrap();
        for row in &rep.rows {
            worst = worst.max((row.ratio - 1.0).abs());
            rows += 1;
        }
    }
    outcome(
        rows == 64 && worst <= BERNSTEIN_TOL,
        format!("r in {{1, 2}}, n in 1..32, max |ratio - 1| {worst:.2e}"),
    )
}

fn direct_trend() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["direct_16", "direct_16_t3", "direct_16_weighted"] {
        let rep = theorems::run(&experiment(name)).unwrap();
        pass &= rep.verdict == Verdict::Bounded && rep.rows.len() == 8;
        parts.push(format!(
            "{} {:?} slope {:.4} max {:.4}",
            rep.provenance.experiment.space.young.clone() + " / " + &rep.provenance.experiment.space.weight,
            rep.verdict,
            rep.ratio_trend,
            rep.ratio_max
        ));
    }
    outcome(pass, parts.join("; "))
}

fn inverse_trend() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut chains = 0;
    for name in ["inverse_21", "inverse_41_3"] {
        let rep = theorems::run(&experiment(name)).unwrap();
        pass &= rep.verdict == Verdict::Bounded;
        pass &= rep.provenance.tail.as_deref() == Some("exact-zero");
        let tele = match &rep.telescoping {
            Some(t) => {
                chains += 1;
                pass &= t.min_slack >= TELESCOPING_SLACK;
                format!(
                    "chain min slack {:.3e} (constant needed {:.4})",
                    t.min_slack, t.required_constant
                )
            }
            None => "no chain".to_string(),
        };
        parts.push(format!("{name} {:?} slope {:.3}, {tele}", rep.verdict, rep.ratio_trend));
    }
    outcome(pass && chains > 0, parts.join("; "))
}

fn moduli() -> Outcome {
    let sp = l2();
    let f = PeriodicFunction::cos(1, 1.0) + PeriodicFunction::cos(5, 0.5) + PeriodicFunction::sin(3, 0.3);
    let g = "poly-decay 2 8".parse::<FunctionFamily>().unwrap().build();
    let deltas = [0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.0];
    let mut mono = f64::INFINITY;
    let mut sub = f64::INFINITY;
    for r in 1..=2 {
        let mut prev: Option<f64> = None;
        for &d in &deltas {
            let q = ModulusQuery::new(r, d).unwrap();
            let (mf, mg) = (modulus(&sp, &f, &q).unwrap(), modulus(&sp, &g, &q).unwrap());
            let mfg = modulus(&sp, &(f.clone() + g.clone()), &q).unwrap();
            sub = sub.min(mf + mg - mfg);
            if let Some(p) = prev {
                mono = mono.min(mf - p);
            }
            prev = Some(mf);
        }
    }
    let q = ModulusQuery::new(1, PI / 2.0).unwrap();
    let closed = modulus(&sp, &PeriodicFunction::cos(1, 1.0), &q).unwrap();
    let closed_err = (closed - (1.0 - 2.0 / PI) * PI.sqrt()).abs();
    let lemma = theorems::run(&experiment("lemmaA_8")).unwrap();
    outcome(
        mono >= MONOTONE_SLACK
            && sub >= SUBADDITIVE_SLACK
            && closed_err <= CLOSED_FORM_TOL
            && lemma.verdict == Verdict::Bounded,
        format!(
            "monotone slack {mono:.2e}, subadditive slack {sub:.2e}, closed form err {closed_err:.2e}, smooth-family ratio {:?} (max {:.4})",
            lemma.verdict, lemma.ratio_max
        ),
    )
}

fn weights() -> Outcome {
    let fam = IntervalFamily::default();
    let c = ap_constant(&Weight::constant(1.0), 2.0, &fam).unwrap();
    let half = ap_constant(&Weight::abs_power(0.5, PI), 2.0, &fam).unwrap();
    let three_halves = ap_constant(&Weight::abs_power(1.5, PI), 2.0, &fam).unwrap();
    let err = (c.constant_estimate - 1.0).abs();
    outcome(
        err <= A2_CONST_TOL
            && half.verdict == ApVerdict::InAp
            && three_halves.verdict == ApVerdict::LikelyNotInAp,
        format!(
            "const err {err:.2e}; |t-pi|^0.5 {:?} ({:.4}); |t-pi|^1.5 {:?} ({:.4e})",
            half.verdict, half.constant_estimate, three_halves.verdict, three_halves.constant_estimate
        ),
    )
}

fn dense_lp(f: &PeriodicFunction, p: f64) -> f64 {
    let n = 1 << 18;
    let h = 2.0 * PI / n as f64;
    let s: f64 = (0..n).map(|j| f.evaluate((j as f64 + 0.5) * h).abs().powf(p)).sum();
    (s * h).powf(1.0 / p)
}

fn norm_equivalence() -> Outcome {
    let spaces = vec![
        l2(),
        space(YoungFunction::power(3.0), Weight::constant(1.0)),
        space(YoungFunction::power_log(2.0, 1.0), Weight::constant(1.0)),
        space(YoungFunction::power(2.0), Weight::abs_power(0.25, PI)),
        space(YoungFunction::power(3.0), Weight::step(1.0, 2.0, PI).unwrap()),
    ];
    let fs = corpus();
    let mut slack = f64::INFINITY;
    for sp in &spaces {
        for f in &fs {
            let lux = sp.luxemburg_norm(f).unwrap();
            let ame = sp.orlicz_norm(f).unwrap();
            slack = slack.min(ame - lux + EQUIV_SLACK).min(2.0 * lux + EQUIV_SLACK - ame);
        }
    }
    // ∫|cos x|^p over a period for even p and p = 3.
    let exact = [(2.0, PI), (3.0, 8.0 / 3.0), (4.0, 0.75 * PI), (6.0, 0.625 * PI)];
    let mut lp_err = 0.0f64;
    for (p, integral) in exact {
        let sp = space(YoungFunction::power(p), Weight::constant(1.0));
        let lux = sp.luxemburg_norm(&PeriodicFunction::cos(3, 1.0)).unwrap();
        let want: f64 = integral.powf(1.0 / p);
        lp_err = lp_err.max((lux - want).abs() / want);
    }
    for p in [1.5, 2.5, 4.0] {
        let sp = space(YoungFunction::power(p), Weight::constant(1.0));
        for f in &fs {
            let want = dense_lp(f, p);
            if want > 0.0 {
                lp_err = lp_err.max((sp.luxemburg_norm(f).unwrap() - want).abs() / want);
            }
        }
    }
    outcome(
        slack >= 0.0 && lp_err <= LP_TOL,
        format!(
            "{} spaces x {} functions, min equivalence slack {:.2e}, max L^p rel err {lp_err:.2e}",
            spaces.len(),
            fs.len(),
            slack - EQUIV_SLACK
        ),
    )
}

fn verify_csv(config: &str, seed: u64) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_orlicz-approx"))
        .args(["verify", "--format", "csv", "--seed", &seed.to_string(), "--config"])
        .arg(configs().join(format!("{config}.json")))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.code().is_some());
    let exp = experiment(config);
    std::fs::read(dir.path().join(format!("{}.csv", exp.run.theorem_id))).unwrap_or_default()
}

fn determinism() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (config, seed) in [("bernstein_random", 7), ("bernstein_random", 11), ("direct_16", 0), ("inverse_21", 3)] {
        let a = verify_csv(config, seed);
        let b = verify_csv(config, seed);
        let same = !a.is_empty() && a == b;
        pass &= same;
        parts.push(format!("{config}@{seed} {}", if same { "identical" } else { "differs" }));
    }
    let seeded_differ = verify_csv("bernstein_random", 7) != verify_csv("bernstein_random", 11);
    pass &= seeded_differ;
    parts.push(format!("seeds 7/11 differ: {seeded_differ}"));
    outcome(pass, parts.join(", "))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "L2 best approximation oracle", Duration::from_secs(60), l2_oracle),
        (2, "psi-calculus round trips", Duration::from_secs(5), psi_round_trips),
        (3, "Bernstein sharpness witness", Duration::from_secs(10), bernstein_sharpness),
        (4, "direct inequality trend", Duration::from_secs(300), direct_trend),
        (5, "inverse inequalities trend", Duration::from_secs(300), inverse_trend),
        (6, "moduli properties", Duration::from_secs(120), moduli),
        (7, "weights", Duration::from_secs(30), weights),
        (8, "norm equivalence", Duration::from_secs(60), norm_equivalence),
        (9, "determinism", Duration::from_secs(300), determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id} {} {name}: {} [{:.1}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

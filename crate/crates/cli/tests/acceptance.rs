//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use sqgame::game::{average_reward, payoff_via_witness, Game};
use sqgame::optimize::{payoff_bullet, payoff_npt, seesaw_matched, seesaw_product, upper_bound_global, SeesawOptions};
use sqgame::oracle::{brute_force_payoff, ppt_min_eigenvalue, sample_separable};
use sqgame::qops::{CVector, QuantumOperator, StateVector, SubsystemLayout, A, A0, B, B0, C64};
use sqgame::random::{haar_unitary, haar_vector, random_effect, random_kraus, random_unital_kraus, stream, StreamRng};
use sqgame::states::{apply_local_channel, bell, random_state, werner};
use sqgame::strategy::{
    bell_matched, filter_pullback, matched_one_way, product, slocc_filter, BellState, Strategy, IDENTITY_PAIRING,
};
use sqgame::witness::{decomposable_witness, evaluate, Witness};
use sqgame::protocol::run;

type Outcome = Result<String, String>;

fn w_de() -> Witness {
    decomposable_witness(&BellState::PsiMinus.vector(A0, B0)).unwrap()
}

fn entangled(first: (&str, usize), second: (&str, usize), rng: &mut StreamRng) -> StateVector {
    let layout = SubsystemLayout::pair(first, second).unwrap();
    StateVector::new(layout, haar_vector(first.1 * second.1, rng)).unwrap()
}

fn effect(labels: [(&str, usize); 2], rng: &mut StreamRng) -> QuantumOperator {
    let d = labels[0].1 * labels[1].1;
    QuantumOperator::new(SubsystemLayout::new(labels).unwrap(), random_effect(d, rng)).unwrap()
}

fn random_strategy(d: usize, rng: &mut StreamRng, matched: bool) -> Strategy {
    let (al, bl) = ([(A, d), (A0, d)], [(B0, d), (B, d)]);
    if !matched {
        return product(&effect(al, rng), &effect(bl, rng)).unwrap();
    }
    let u = haar_unitary(d * d, rng);
    let alice: Vec<QuantumOperator> = (0..d * d)
        .map(|k| {
            let v: CVector = u.column(k).into_owned();
            QuantumOperator::new(SubsystemLayout::new(al).unwrap(), &v * v.adjoint()).unwrap()
        })
        .collect();
    let bob: Vec<QuantumOperator> = (0..d * d).map(|_| effect(bl, rng)).collect();
    matched_one_way(&alice, &bob).unwrap()
}

fn cli_value(args: &[&str]) -> Result<f64, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sqgame"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot launch CLI: {e}"))?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v["value"].as_f64().ok_or_else(|| "no value in output".to_string())
}

fn criterion_1() -> Outcome {
    let plus = cli_value(&["payoff", "evaluate", "--game", "bell:psi-", "--state", "bell:phi+", "--strategy", "bell-matched:identity"])?;
    let minus = cli_value(&["payoff", "evaluate", "--game", "bell:psi-", "--state", "bell:phi-", "--strategy", "bell-matched:twisted"])?;
    let (e1, e2) = ((plus - 1.0).abs(), (minus - 1.0).abs());
    let detail = format!("|Phi+> identity pairing {plus:.15}, |Phi-> twisted pairing {minus:.15}");
    if e1 < 1e-10 && e2 < 1e-10 { Ok(detail) } else { Err(detail) }
}

fn criterion_2() -> Outcome {
    let opts = SeesawOptions::default().with_seed(2024);
    let mut parts = Vec::new();
    let mut ok = true;
    for which in [BellState::PhiPlus, BellState::PhiMinus] {
        let r = seesaw_matched(&w_de(), &bell(which), &opts).map_err(|e| e.to_string())?;
        ok &= r.value >= 1.0 - 1e-6 && r.value <= 1.0 + 1e-9 && (r.upper_bound - 1.0).abs() < 1e-12;
        parts.push(format!("{which}: {:.9} (bound {:.12})", r.value, r.upper_bound));
    }
    let detail = parts.join(", ");
    if ok { Ok(detail) } else { Err(detail) }
}

fn criterion_3() -> Outcome {
    let w = w_de();
    let opts = SeesawOptions::default();
    let mut worst = f64::NEG_INFINITY;
    for k in 0..500u64 {
        let sigma = sample_separable(2, 2, 1 + (k % 4) as usize, k).map_err(|e| e.to_string())?;
        let o = opts.with_seed(k);
        let values = [
            seesaw_product(&w, &sigma, &o).map_err(|e| e.to_string())?.value,
            seesaw_matched(&w, &sigma, &o).map_err(|e| e.to_string())?.value,
            payoff_npt(&w, &sigma, &o).map_err(|e| e.to_string())?.value,
            payoff_bullet(&sigma, &o).map_err(|e| e.to_string())?.value,
        ];
        worst = values.iter().copied().fold(worst, f64::max);
    }
    let zero = StateVector::basis(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap(), &[0, 0]).unwrap();
    let at_zero = evaluate(&w, &zero.projector()).map_err(|e| e.to_string())?;
    let detail = format!("max optimized pay-off over 500 states {worst:.3e}, Tr(W_de |00><00|) = {at_zero:e}");
    if worst <= 1e-7 && at_zero.abs() <= 1e-12 { Ok(detail) } else { Err(detail) }
}

fn criterion_4() -> Outcome {
    let w = w_de();
    let g = Game::from_witness(&w).map_err(|e| e.to_string())?;
    let s = bell_matched(IDENTITY_PAIRING).map_err(|e| e.to_string())?;
    let opts = SeesawOptions::default().with_seed(4);
    let mut failures = Vec::new();
    let mut max_err: f64 = 0.0;
    for j in 0..=10 {
        let v = j as f64 / 10.0;
        let rho = werner(v).map_err(|e| e.to_string())?;
        let reward = average_reward(&g, &rho, &s).map_err(|e| e.to_string())?;
        max_err = max_err.max((reward - (3.0 * v - 1.0) / 2.0).abs());
        let npt = payoff_npt(&w, &rho, &opts).map_err(|e| e.to_string())?.value;
        let pt_negative = ppt_min_eigenvalue(&rho).map_err(|e| e.to_string())? < -1e-9;
        let ok = if v > 1.0 / 3.0 + 1e-3 {
            npt > 1e-6 && pt_negative
        } else if v < 1.0 / 3.0 - 1e-3 {
            npt == 0.0 && !pt_negative
        } else {
            true
        };
        if !ok {
            failures.push(format!("v={v}: value {npt:e}"));
        }
    }
    let detail = format!("bell-matched max error {max_err:.2e}; boundary mismatches: {}", failures.len());
    if max_err < 1e-10 && failures.is_empty() { Ok(detail) } else { Err(format!("{detail} {failures:?}")) }
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let mut rng = stream(k, 500);
        let psi = entangled((A0, 2), (B0, 2), &mut rng);
        let phi = entangled((A0, 2), (B0, 2), &mut rng);
        let w = decomposable_witness(&psi).map_err(|e| e.to_string())?;
        let v = decomposable_witness(&phi).map_err(|e| e.to_string())?;
        let f = slocc_filter(&psi, &phi).map_err(|e| e.to_string())?;
        let (fa, fb) = f.question_filters().map_err(|e| e.to_string())?;
        let inner = random_strategy(2, &mut rng, k % 2 == 1);
        let x = filter_pullback(&inner, &fa, &fb).map_err(|e| e.to_string())?;
        let rho = random_state(2, 2, 1 + (k % 4) as usize, &mut rng).map_err(|e| e.to_string())?;
        let lhs = payoff_via_witness(&w, &rho, &x).map_err(|e| e.to_string())?;
        let rhs = f.q * payoff_via_witness(&v, &rho, &inner).map_err(|e| e.to_string())?;
        worst = worst.max((lhs - rhs).abs());
    }
    let amps = [C64::new(0.8f64.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.2f64.sqrt(), 0.0)];
    let psi = StateVector::from_slice(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap(), &amps).unwrap();
    let q = slocc_filter(&psi, &BellState::PhiPlus.vector(A0, B0)).map_err(|e| e.to_string())?.q;
    let detail = format!("max |lhs - q rhs| over 100 instances {worst:.2e}; q(0.8,0.2 -> Phi+) = {q:.15}");
    if worst < 1e-10 && (q - 0.4).abs() <= 1e-12 { Ok(detail) } else { Err(detail) }
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let mut rng = stream(k, 600);
        let w = decomposable_witness(&entangled((A0, 2), (B0, 2), &mut rng)).map_err(|e| e.to_string())?;
        let g = Game::from_witness(&w).map_err(|e| e.to_string())?;
        let rho = random_state(2, 2, 1 + (k % 4) as usize, &mut rng).map_err(|e| e.to_string())?;
        let s = random_strategy(2, &mut rng, k % 2 == 0);
        let a = average_reward(&g, &rho, &s).map_err(|e| e.to_string())?;
        let b = payoff_via_witness(&w, &rho, &s).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).abs());
    }
    let detail = format!("max |referee average - witness form| over 100 triples {worst:.2e}");
    if worst < 1e-10 { Ok(detail) } else { Err(detail) }
}

fn measure_state(k: u64) -> QuantumOperator {
    let mut rng = stream(k, 700);
    random_state(2, 2, 1 + (k % 4) as usize, &mut rng).unwrap()
}

fn criterion_7() -> Outcome {
    let opts = SeesawOptions::default().with_seed(7);
    let f = |rho: &QuantumOperator| payoff_bullet(rho, &opts).map(|r| r.value).map_err(|e| e.to_string());
    let (mut mono_fail, mut mono_worst) = (0, f64::NEG_INFINITY);
    let (mut lu_fail, mut lu_worst) = (0, 0.0f64);
    for k in 0..50u64 {
        let rho = measure_state(k);
        let base = f(&rho)?;
        let mut rng = stream(k, 701);
        for c in 0..20u64 {
            let (ka, kb) = if c % 2 == 0 {
                (random_kraus(2, 2 + (c % 3) as usize, &mut rng), random_kraus(2, 1 + (c % 2) as usize, &mut rng))
            } else {
                (random_unital_kraus(2, 2 + (c % 3) as usize, &mut rng), random_unital_kraus(2, 2, &mut rng))
            };
            let out = apply_local_channel(&rho, &ka, &kb).map_err(|e| e.to_string())?;
            let gain = f(&out)? - base;
            mono_worst = mono_worst.max(gain);
            mono_fail += (gain > 1e-4) as usize;
        }
        let u = [haar_unitary(2, &mut rng)];
        let v = [haar_unitary(2, &mut rng)];
        let rotated = apply_local_channel(&rho, &u, &v).map_err(|e| e.to_string())?;
        let diff = (f(&rotated)? - base).abs();
        lu_worst = lu_worst.max(diff);
        lu_fail += (diff > 1e-4) as usize;
    }
    let (mut cvx_fail, mut cvx_worst) = (0, f64::NEG_INFINITY);
    for k in 0..20u64 {
        let (r1, r2) = (measure_state(1000 + k), measure_state(2000 + k));
        let (f1, f2) = (f(&r1)?, f(&r2)?);
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mix = r1.scaled(p).add(&r2.scaled(1.0 - p)).map_err(|e| e.to_string())?;
            let excess = f(&mix)? - (p * f1 + (1.0 - p) * f2);
            cvx_worst = cvx_worst.max(excess);
            cvx_fail += (excess > 1e-4) as usize;
        }
    }
    let detail = format!(
        "monotonicity worst gain {mono_worst:.2e} ({mono_fail} failures / 1000), \
         LU worst {lu_worst:.2e} ({lu_fail} / 50), convexity worst excess {cvx_worst:.2e} ({cvx_fail} / 100)"
    );
    if mono_fail + lu_fail + cvx_fail == 0 { Ok(detail) } else { Err(detail) }
}

fn criterion_8() -> Outcome {
    let g = Game::from_witness(&w_de()).map_err(|e| e.to_string())?;
    let rho = bell(BellState::PhiPlus);
    let s = bell_matched(IDENTITY_PAIRING).map_err(|e| e.to_string())?;
    let exact = average_reward(&g, &rho, &s).map_err(|e| e.to_string())?;
    let mut within = 0;
    let mut clamped = 0;
    for seed in 0..100 {
        let r = run(&g, &rho, &s, 1_000_000, seed).map_err(|e| e.to_string())?;
        within += ((r.mean - exact).abs() < 5.0 * r.stderr) as usize;
        clamped += r.clamped;
    }
    let small = run(&g, &rho, &s, 10_000, 1234).map_err(|e| e.to_string())?;
    let large = run(&g, &rho, &s, 1_000_000, 1234).map_err(|e| e.to_string())?;
    let ratio = small.stderr / large.stderr;
    let detail = format!("{within}/100 seeds within 5 stderr, stderr ratio {ratio:.3}, clamps {clamped}");
    if within >= 99 && (8.0..=12.5).contains(&ratio) && clamped == 0 { Ok(detail) } else { Err(detail) }
}

fn criterion_9() -> Outcome {
    let opts = SeesawOptions::default();
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100u64 {
        let mut rng = stream(k, 900);
        let w = decomposable_witness(&entangled((A0, 2), (B0, 2), &mut rng)).map_err(|e| e.to_string())?;
        let rho = random_state(2, 2, 1 + (k % 4) as usize, &mut rng).map_err(|e| e.to_string())?;
        let brute = brute_force_payoff(&w, &rho, 1000, k).map_err(|e| e.to_string())?;
        let best = seesaw_matched(&w, &rho, &opts.with_seed(k)).map_err(|e| e.to_string())?;
        let ub = upper_bound_global(&w, &rho).map_err(|e| e.to_string())?;
        worst = worst.max(brute - best.value);
        violations += (brute > best.value + 1e-9 || best.value > ub + 1e-9) as usize;
    }
    let detail = format!(
        "restricted measure substitutes the full extremal-witness optimum; \
         worst brute - see-saw {worst:.3e}, violations {violations}/100"
    );
    if violations == 0 { Ok(detail) } else { Err(detail) }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<u64>, fn() -> Outcome); 9] = [
        (1, "worked example via CLI", Some(1), criterion_1),
        (2, "optimizer recovery", Some(10), criterion_2),
        (3, "separable ceiling", Some(120), criterion_3),
        (4, "Werner faithfulness sweep", Some(60), criterion_4),
        (5, "SLOCC pull-back identity", Some(30), criterion_5),
        (6, "referee and witness forms agree", None, criterion_6),
        (7, "measure properties", Some(600), criterion_7),
        (8, "protocol statistics", Some(300), criterion_8),
        (9, "oracle vs optimizer ordering", None, criterion_9),
    ];
    let mut failed = 0;
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= Duration::from_secs(b));
        let budget_text = budget.map_or(String::new(), |b| format!(" / {b} s"));
        let (tag, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over time budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        failed += (tag == "FAIL") as usize;
        println!("criterion {n} [{tag}] {name}: {detail} ({:.2} s{budget_text})", elapsed.as_secs_f64());
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

//! Acceptance checks. Prints one `[PASS]`/`[FAIL]` line per criterion with
//! indented measurements below it, and exits nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{bisect_star, random_admissible, rankine_hugoniot_residual, rel, sound, Prim, GAMMA};
use fvc_core::exact_riemann::{ExactRiemann, RiemannSolution, Wave};
use fvc_core::fvc::AlphaMode;
use fvc_core::harness::{
    convergence_study, find_benchmark, least_squares_rate, run_benchmark, run_observed, timing_study, Benchmark,
    RunOutcome, RunResult, TABLE_GRIDS,
};
use fvc_core::{Field, GasModel, Mesh, PrimitiveState, SchemeConfig, SchemeKind};
use fvc_validation::{max_jump_where, reference_l1, reference_seconds, steepest_jump, total_variation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BAND_CLASSIC: f64 = 0.25;
const BAND_LOOSE: f64 = 0.50;
const COARSE_BUDGET_SECONDS: f64 = 60.0;
const RATE_FVC: (f64, f64) = (0.65, 0.85);
const RATE_HLL: (f64, f64) = (0.53, 0.69);
const RATE_RUSANOV: (f64, f64) = (0.48, 0.64);
const FAN_JUMP_FACTOR: f64 = 4.0;
const OVERSHOOT: f64 = 0.01;
const OVERSHOOT_WINDOW: usize = 2;
const TV_SLACK: f64 = 0.05;
const POSITIVITY_FLOOR: f64 = 1e-12;
const POSITION_CELLS: f64 = 3.0;
const CONTACT_PRESERVATION: f64 = 1e-10;
const CONTACT_SPREAD_CELLS: usize = 2;
const CONTACT_INTERMEDIATE: f64 = 1e-6;
const TIMING_GRIDS: [usize; 2] = [1600, 3200];
const TIMING_REPETITIONS: usize = 5;
const CONSERVATION: f64 = 1e-12;
const ROUND_TRIP: f64 = 1e-13;
const RESIDUAL: f64 = 1e-10;
const NEWTON_VS_BISECTION: f64 = 1e-10;
const RANDOM_PROBLEMS: usize = 1000;

struct Verdict {
    pass: bool,
    title: &'static str,
    details: Vec<String>,
}

impl Verdict {
    fn new(title: &'static str) -> Self {
        Verdict {
            pass: true,
            title,
            details: Vec::new(),
        }
    }

    /// Records a measurement; a false `ok` fails the criterion.
    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        let mark = if ok { "ok  " } else { "FAIL" };
        self.details.push(format!("{mark} {detail}"));
    }

    fn note(&mut self, detail: String) {
        self.details.push(format!("info {detail}"));
    }
}

fn gas() -> GasModel {
    GasModel::default()
}

fn bench(name: &str) -> Benchmark {
    find_benchmark(name).expect("builtin benchmark")
}

fn tuple(q: PrimitiveState) -> Prim {
    (q.rho, q.u, q.p)
}

fn density(field: &Field) -> Vec<f64> {
    field.interior().iter().map(|w| w.rho).collect()
}

fn cell_xi(b: &Benchmark, cells: usize) -> Vec<f64> {
    let mesh = b.mesh(cells).unwrap();
    mesh.cell_centers().iter().map(|x| (x - b.x_split) / b.t_end).collect()
}

fn in_band(got: f64, want: f64, band: f64) -> bool {
    (got - want).abs() <= band * want
}

fn run(b: &Benchmark, cfg: &SchemeConfig, cells: usize) -> RunResult {
    run_benchmark(b, cfg, cells).expect("valid configuration")
}

fn criterion_1_and_2() -> (Verdict, Verdict) {
    let mut v1 = Verdict::new("1 table of L1 density errors on sod_sonic within bands");
    let mut v2 = Verdict::new("2 least-squares convergence rates and FVC ordering");
    let b = bench("sod_sonic");
    let configs: Vec<_> = SchemeKind::ALL.iter().map(|&k| b.scheme(k)).collect();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());

    let started = Instant::now();
    let coarse = convergence_study(&b, &configs, &TABLE_GRIDS[..4], jobs).unwrap();
    let coarse_seconds = started.elapsed().as_secs_f64();
    let fine = convergence_study(&b, &configs, &TABLE_GRIDS[4..], jobs).unwrap();
    v1.check(
        coarse_seconds < COARSE_BUDGET_SECONDS,
        format!("grids 100-800 took {coarse_seconds:.1} s (budget {COARSE_BUDGET_SECONDS} s)"),
    );

    let mut errors = std::collections::HashMap::new();
    for (k, &kind) in SchemeKind::ALL.iter().enumerate() {
        let mut e = coarse.columns[k].density_errors();
        e.extend(fine.columns[k].density_errors());
        let band = match kind {
            SchemeKind::Rusanov | SchemeKind::Hll => BAND_CLASSIC,
            SchemeKind::Fvc | SchemeKind::Roe => BAND_LOOSE,
        };
        let reference = reference_l1(kind);
        let worst = e
            .iter()
            .zip(&reference)
            .map(|(g, w)| (g - w) / w)
            .fold(0.0f64, |a, d| if d.abs() > a.abs() { d } else { a });
        let ok = e.iter().zip(&reference).all(|(g, w)| in_band(*g, *w, band));
        let cells: Vec<String> = e.iter().map(|x| format!("{x:.3e}")).collect();
        v1.check(
            ok,
            format!(
                "{kind:<7} [{}] worst deviation {:+.1}% (band {:.0}%)",
                cells.join(" "),
                100.0 * worst,
                100.0 * band
            ),
        );
        let monotone = e.windows(2).all(|w| w[1] < w[0]);
        v2.check(monotone, format!("{kind:<7} error decreases under every refinement"));
        errors.insert(kind, e);
    }

    for (kind, (lo, hi)) in [
        (SchemeKind::Fvc, RATE_FVC),
        (SchemeKind::Hll, RATE_HLL),
        (SchemeKind::Rusanov, RATE_RUSANOV),
    ] {
        let rate = least_squares_rate(&TABLE_GRIDS, &errors[&kind]);
        v2.check(
            (lo..=hi).contains(&rate),
            format!("{kind:<7} rate {rate:.3} in [{lo}, {hi}]"),
        );
    }
    let roe_rate = least_squares_rate(&TABLE_GRIDS, &errors[&SchemeKind::Roe]);
    v2.note(format!("roe     rate {roe_rate:.3}"));
    let fvc = &errors[&SchemeKind::Fvc];
    let below = |other: SchemeKind| fvc.iter().zip(&errors[&other]).all(|(f, o)| f < o);
    v2.check(below(SchemeKind::Hll), "fvc below hll at every grid".into());
    v2.check(below(SchemeKind::Rusanov), "fvc below rusanov at every grid".into());
    (v1, v2)
}

/// Exact head and tail speeds of the left rarefaction on `sod_sonic`.
fn sod_left_fan() -> (f64, f64) {
    let l = (1.0, 0.75, 1.0);
    let (p, u) = bisect_star(l, (0.125, 0.0, 0.1));
    let cl = sound(l.0, l.2);
    let c_star = cl * (p / l.2).powf((GAMMA - 1.0) / (2.0 * GAMMA));
    (l.1 - cl, u - c_star)
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new("3 no spurious jump inside the sonic rarefaction");
    let b = bench("sod_sonic");
    let cells = 200;
    let xi = cell_xi(&b, cells);
    let (head, tail) = sod_left_fan();
    let inside = |i: usize| xi[i] > head && xi[i] < tail;
    let exact: Vec<f64> = b.exact(&b.mesh(cells).unwrap(), &gas()).unwrap().iter().map(|q| q.rho).collect();
    let limit = FAN_JUMP_FACTOR * max_jump_where(&exact, inside);
    v.note(format!(
        "fan {head:.4} < x/t < {tail:.4}; exact max step {:.3e}, limit {limit:.3e}",
        limit / FAN_JUMP_FACTOR
    ));

    let roe_raw = SchemeConfig {
        roe_epsilon: 0.0,
        ..b.scheme(SchemeKind::Roe)
    };
    let cases = [
        ("fvc", b.scheme(SchemeKind::Fvc), false),
        ("roe", b.scheme(SchemeKind::Roe), false),
        ("roe eps=0", roe_raw, true),
    ];
    for (name, cfg, expect_jump) in cases {
        let r = run(&b, &cfg, cells);
        if !r.completed() {
            v.check(false, format!("{name}: run failed: {}", r.summary()));
            continue;
        }
        let jump = max_jump_where(&density(&r.field), inside);
        let has_jump = jump > limit;
        let expectation = if expect_jump { "must show" } else { "must not show" };
        v.check(
            has_jump == expect_jump,
            format!("{name:<9} max step in fan {jump:.3e} ({expectation} a jump)"),
        );
    }
    v
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new("4 alpha = 1/2 oscillates, alpha = 1 smears, adaptive alpha is oscillation free");
    let b = bench("sod_sonic");
    let cells = 200;
    let mesh = b.mesh(cells).unwrap();
    let exact_prims = b.exact(&mesh, &gas()).unwrap();
    let exact: Vec<f64> = exact_prims.iter().map(|q| q.rho).collect();
    let xi = cell_xi(&b, cells);
    let (_, tail) = sod_left_fan();
    let (p_star, u_star) = bisect_star((1.0, 0.75, 1.0), (0.125, 0.0, 0.1));
    let r_star = 0.125 * (p_star / 0.1 + 1.0 / 6.0) / (p_star / 0.1 / 6.0 + 1.0);
    let shock = r_star * u_star / (r_star - 0.125);
    let behind = |i: usize| xi[i] > tail && xi[i] < shock;

    let with_alpha = |mode| SchemeConfig {
        alpha_mode: mode,
        ..b.scheme(SchemeKind::Fvc)
    };
    let half = run(&b, &with_alpha(AlphaMode::Fixed(0.5)), cells);
    let one = run(&b, &with_alpha(AlphaMode::Fixed(1.0)), cells);
    let adaptive = run(&b, &b.scheme(SchemeKind::Fvc), cells);
    for r in [&half, &one, &adaptive] {
        if !r.completed() {
            v.check(false, format!("run failed: {}", r.summary()));
            return v;
        }
    }

    let rho = density(&half.field);
    let worst = (0..cells)
        .filter(|&i| behind(i))
        .map(|i| {
            let lo = i.saturating_sub(OVERSHOOT_WINDOW);
            let hi = (i + OVERSHOOT_WINDOW).min(cells - 1);
            let local = exact[lo..=hi].iter().copied().fold(f64::MIN, f64::max);
            rho[i] / local - 1.0
        })
        .fold(f64::MIN, f64::max);
    v.check(
        worst > OVERSHOOT,
        format!(
            "alpha=1/2 largest overshoot over the local exact maximum {:.2}% (need > {:.0}%)",
            100.0 * worst,
            100.0 * OVERSHOOT
        ),
    );

    let (e_one, e_ad) = (one.l1.unwrap().rho, adaptive.l1.unwrap().rho);
    v.check(
        e_one > e_ad,
        format!("alpha=1 L1 {e_one:.4e} > adaptive L1 {e_ad:.4e}"),
    );

    let tv = total_variation(&density(&adaptive.field));
    let tv_exact = total_variation(&exact);
    v.check(
        tv <= tv_exact * (1.0 + TV_SLACK),
        format!(
            "adaptive TV {tv:.4} vs exact TV {tv_exact:.4} (+{:.1}%, allowed +{:.0}%)",
            100.0 * (tv / tv_exact - 1.0),
            100.0 * TV_SLACK
        ),
    );
    v
}

fn failure_text(r: &RunResult) -> String {
    match &r.outcome {
        RunOutcome::Completed => "completed".into(),
        RunOutcome::Failed { step, time, cause } => format!("failed at step {step} (t={time:.4e}): {cause}"),
    }
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new("5 vacuum123: positivity for fvc, hll, rusanov; recorded failure for roe");
    let b = bench("vacuum123");
    for kind in [SchemeKind::Fvc, SchemeKind::Hll, SchemeKind::Rusanov] {
        let r = run(&b, &b.scheme(kind), b.cells);
        let ok = r.completed() && r.min_rho > POSITIVITY_FLOOR && r.min_p > POSITIVITY_FLOOR;
        v.check(
            ok,
            format!(
                "{kind:<7} {}; min rho {:.3e}, min p {:.3e} over completed steps",
                failure_text(&r),
                r.min_rho,
                r.min_p
            ),
        );
    }
    let roe = std::panic::catch_unwind(|| run(&b, &b.scheme(SchemeKind::Roe), b.cells));
    match roe {
        Ok(r) => v.check(!r.completed(), format!("roe     {}", failure_text(&r))),
        Err(_) => v.check(false, "roe     panicked".into()),
    }
    v
}

/// Exact (contact, shock) positions for Riemann data with exactly one
/// shock, from the bisection oracle.
fn contact_and_shock(b: &Benchmark) -> (f64, f64) {
    let (l, r) = (tuple(b.left), tuple(b.right));
    let (p, u) = bisect_star(l, r);
    let side = if p > r.2 { r } else { l };
    let g6 = (GAMMA - 1.0) / (GAMMA + 1.0);
    let ratio = p / side.2;
    let rho = side.0 * (ratio + g6) / (g6 * ratio + 1.0);
    let speed = (rho * u - side.0 * side.1) / (rho - side.0);
    (b.x_split + u * b.t_end, b.x_split + speed * b.t_end)
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new("6 blast problems at 2000 cells: positivity and wave positions");
    for name in ["blast_left", "blast_right"] {
        let b = bench(name);
        let (contact, shock) = contact_and_shock(&b);
        let mesh = b.mesh(b.cells).unwrap();
        let dx = mesh.dx();
        let face = |x: f64| ((x - mesh.x_min()) / dx).round() as usize;
        // search each wave between the midpoints to its neighbours
        let gap = (shock - contact).abs();
        let windows = [("contact", contact), ("shock", shock)];
        for kind in [SchemeKind::Fvc, SchemeKind::Hll, SchemeKind::Rusanov, SchemeKind::Roe] {
            let r = run(&b, &b.scheme(kind), b.cells);
            let positive = r.completed() && r.min_rho > POSITIVITY_FLOOR && r.min_p > POSITIVITY_FLOOR;
            let mut detail = format!("{name:<11} {kind:<7} {}", failure_text(&r));
            let mut ok = positive;
            if r.completed() {
                let rho = density(&r.field);
                for (wave, x) in windows {
                    let lo = face(x - 0.5 * gap);
                    let hi = face(x + 0.5 * gap);
                    let at = mesh.interface(steepest_jump(&rho, lo, hi) + 1);
                    let off = (at - x).abs() / dx;
                    ok &= off <= POSITION_CELLS;
                    detail.push_str(&format!("; {wave} off by {off:.1} cells"));
                }
            }
            if kind == SchemeKind::Fvc {
                v.check(ok, detail);
            } else {
                v.note(format!("{detail} (reference scheme)"));
            }
        }
    }
    v
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::new("7 contacts: stationary contact preserved, slow contact least diffused by fvc");
    let b = bench("contact_stationary");
    let (u0, p0) = (b.left.u, b.left.p);
    let g = gas();
    let mut drift = 0.0f64;
    let r = run_observed(&b, &b.scheme(SchemeKind::Fvc), b.cells, |f, _| {
        for q in f.primitives(&g).unwrap() {
            drift = drift.max((q.u - u0).abs()).max((q.p - p0).abs() / p0);
        }
    })
    .unwrap();
    v.check(
        r.completed() && drift <= CONTACT_PRESERVATION,
        format!("u and p drift {drift:.3e} over {} steps (limit {CONTACT_PRESERVATION:e})", r.steps()),
    );
    let (lo, hi) = (b.right.rho, b.left.rho);
    let spread = density(&r.field)
        .iter()
        .filter(|&&x| x > lo + CONTACT_INTERMEDIATE && x < hi - CONTACT_INTERMEDIATE)
        .count();
    v.check(
        spread <= CONTACT_SPREAD_CELLS,
        format!("{spread} intermediate cells across the jump at t={} (limit {CONTACT_SPREAD_CELLS})", r.field.time),
    );

    let b = bench("contact_slow");
    let e = |kind| run(&b, &b.scheme(kind), b.cells).l1.map_or(f64::NAN, |l| l.rho);
    let (fvc, hll, rus) = (e(SchemeKind::Fvc), e(SchemeKind::Hll), e(SchemeKind::Rusanov));
    v.check(
        fvc <= hll && fvc <= rus,
        format!("slow contact L1 fvc {fvc:.4e}, hll {hll:.4e}, rusanov {rus:.4e}"),
    );
    v
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::new("8 median wall time at 1600 and 3200 cells: fvc faster than roe and rusanov");
    let b = bench("sod_sonic");
    let configs: Vec<_> = SchemeKind::ALL.iter().map(|&k| b.scheme(k)).collect();
    let t = timing_study(&b, &configs, &TIMING_GRIDS, TIMING_REPETITIONS).unwrap();
    let secs = |kind: SchemeKind| t.column(kind.as_str()).unwrap().seconds();
    let fvc = secs(SchemeKind::Fvc);
    for (g, cells) in TIMING_GRIDS.iter().enumerate() {
        for other in [SchemeKind::Roe, SchemeKind::Rusanov] {
            let o = secs(other)[g];
            v.check(
                fvc[g] < o,
                format!("{cells} cells: fvc {:.3} s vs {other} {o:.3} s", fvc[g]),
            );
        }
        let hll = secs(SchemeKind::Hll)[g];
        v.note(format!("{cells} cells: hll {hll:.3} s"));
    }
    let reference: Vec<String> = SchemeKind::ALL
        .iter()
        .map(|&k| {
            let s = reference_seconds(k);
            format!("{k} {}/{}", s[0], s[1])
        })
        .collect();
    v.note(format!("reference seconds (other hardware): {}", reference.join(", ")));
    v.note(format!("{} repetitions, median; {}", TIMING_REPETITIONS, t.environment.unwrap_or_default()));
    v
}

fn criterion_9() -> Verdict {
    let mut v = Verdict::new("9 property suites");
    let g = gas();

    // conservation per step on every benchmark-style Riemann problem
    let mut worst = 0.0f64;
    for name in ["sod_sonic", "vacuum123", "contact_slow"] {
        let b = bench(name);
        for kind in SchemeKind::ALL {
            let mut prev = b.initial_field(100, &g).unwrap().totals();
            let _ = run_observed(&b, &b.scheme(kind), 100, |f, rep| {
                let net = rep.left_flux - rep.right_flux;
                let now = f.totals();
                let d = [
                    now.rho - prev.rho - rep.dt * net.mass,
                    now.mom - prev.mom - rep.dt * net.momentum,
                    now.ener - prev.ener - rep.dt * net.energy,
                ];
                let scale = [prev.rho, prev.mom, prev.ener];
                for k in 0..3 {
                    worst = worst.max(d[k].abs() / scale[k].abs().max(1.0));
                }
                prev = now;
            })
            .unwrap();
        }
    }
    v.check(worst <= CONSERVATION, format!("conservation residual per step {worst:.2e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut fixed = 0.0f64;
    for _ in 0..8 {
        let q = PrimitiveState::new(rng.gen_range(0.1..5.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.1..5.0));
        let w0 = g.to_conserved(&q);
        for kind in SchemeKind::ALL {
            let mut f = Field::uniform(Mesh::unit(40).unwrap(), w0);
            let mut s = SchemeConfig::of(kind).build().unwrap();
            for _ in 0..20 {
                s.step(&mut f, 100.0).unwrap();
            }
            for w in f.interior() {
                fixed = fixed.max(rel(w.rho, w0.rho)).max(rel(w.ener, w0.ener));
                fixed = fixed.max((w.mom - w0.mom).abs() / w0.ener);
            }
        }
    }
    v.check(fixed <= 4.0 * f64::EPSILON, format!("uniform field drift {fixed:.2e}"));

    let mut trip = 0.0f64;
    for _ in 0..10_000 {
        let q = PrimitiveState::new(
            10f64.powf(rng.gen_range(-3.0..3.0)),
            rng.gen_range(-10.0..10.0),
            10f64.powf(rng.gen_range(-3.0..3.0)),
        );
        let back = g.to_primitive(&g.to_conserved(&q)).unwrap();
        // pressure comes from E - rho u^2 / 2, so its error scales with E
        let c = sound(q.rho, q.p);
        let e = common::conserved((q.rho, q.u, q.p))[2];
        trip = trip
            .max(rel(back.rho, q.rho))
            .max((back.u - q.u).abs() / q.u.abs().max(c))
            .max((back.p - q.p).abs() / ((GAMMA - 1.0) * e));
    }
    v.check(trip <= ROUND_TRIP, format!("primitive/conserved round trip {trip:.2e}"));

    let (mut rh, mut inv, mut newton) = (0.0f64, 0.0f64, 0.0f64);
    let k = 2.0 / (GAMMA - 1.0);
    for _ in 0..RANDOM_PROBLEMS {
        let (l, r) = random_admissible(&mut rng);
        let s = ExactRiemann::solve(prim(l), prim(r), &g).unwrap();
        let RiemannSolution::Star { star, fan } = s.solution else {
            unreachable!("admissible data")
        };
        let (p, u) = bisect_star(l, r);
        newton = newton
            .max(rel(star.p_star, p))
            .max((star.u_star - u).abs() / u.abs().max(sound(l.0, l.2)).max(sound(r.0, r.2)));
        for (wave, side, rho_star, sign) in [(fan.left, l, star.rho_star_left, 1.0), (fan.right, r, star.rho_star_right, -1.0)] {
            match wave {
                Wave::Shock { speed } => {
                    rh = rh.max(rankine_hugoniot_residual(side, (rho_star, star.u_star, star.p_star), speed));
                }
                Wave::Rarefaction { head, tail } => {
                    let w0 = side.1 + sign * k * sound(side.0, side.2);
                    for j in 0..=8 {
                        let q = s.sample(head + (tail - head) * j as f64 / 8.0);
                        let w = q.u + sign * k * sound(q.rho, q.p);
                        inv = inv.max((w - w0).abs() / w0.abs().max(1.0));
                    }
                }
            }
        }
    }
    v.check(rh <= RESIDUAL, format!("Rankine-Hugoniot residual {rh:.2e}"));
    v.check(inv <= RESIDUAL, format!("Riemann invariant residual through fans {inv:.2e}"));
    v.check(
        newton <= NEWTON_VS_BISECTION,
        format!("Newton vs bisection on {RANDOM_PROBLEMS} problems {newton:.2e}"),
    );
    v
}

fn prim(q: Prim) -> PrimitiveState {
    PrimitiveState::new(q.0, q.1, q.2)
}

fn main() -> ExitCode {
    let started = Instant::now();
    let (v1, v2) = criterion_1_and_2();
    let verdicts = [
        v1,
        v2,
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    println!();
    for v in &verdicts {
        println!("[{}] {}", if v.pass { "PASS" } else { "FAIL" }, v.title);
        for d in &v.details {
            println!("       {d}");
        }
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!(
        "\nacceptance: {} passed, {failed} failed ({:.0} s)",
        verdicts.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

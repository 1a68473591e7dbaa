//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion followed by
//! indented details, and exits nonzero if any criterion fails.
//!
//! Run a subset with `cargo test -p naev --test acceptance -- <substring>`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use naev::harness::{
    compare_sav_naev, convergence_study, halving_sequence, run_simulation, ConvergenceTable,
    RunConfig, RunOutcome,
};
use naev::{ModelKind, SchemeKind, SchemeState};

use common::*;

struct Verdict {
    pass: bool,
    details: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        let msg = msg.into();
        self.details.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.details.push(format!("     {}", msg.into()));
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.check(false, format!("error: {e}"));
    }
}

fn table_line(label: &str, t: &ConvergenceTable) -> String {
    let cells: Vec<String> = t
        .rows
        .iter()
        .map(|r| match r.rate {
            Some(rate) => format!("{:.3e}({rate:.2})", r.err),
            None => format!("{:.3e}(-)", r.err),
        })
        .collect();
    format!("{label}: {}", cells.join(" "))
}

fn rates_within(v: &mut Verdict, label: &str, t: &ConvergenceTable, lo: f64, hi: f64) {
    let rates = t.rates();
    let ok = rates.len() == t.rows.len() - 1 && rates.iter().all(|r| (lo..=hi).contains(r));
    let shown: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
    v.check(ok, format!("{label} rates [{}] in [{lo}, {hi}]", shown.join(", ")));
}

fn errors_within_factor(v: &mut Verdict, label: &str, t: &ConvergenceTable, reference: &[f64], factor: f64) {
    let ok = t
        .rows
        .iter()
        .zip(reference)
        .all(|(r, &p)| r.err <= factor * p && r.err >= p / factor);
    let ratios: Vec<String> = t
        .rows
        .iter()
        .zip(reference)
        .map(|(r, &p)| format!("{:.2}", r.err / p))
        .collect();
    v.check(ok, format!("{label} errors within {factor}x of reference, ratios [{}]", ratios.join(", ")));
}

const EXAMPLE1_DTS: [f64; 4] = [4e-4, 2e-4, 1e-4, 5e-5];

fn example1(model: ModelKind, scheme: &str) -> RunConfig {
    RunConfig {
        scheme: scheme.into(),
        ..RunConfig::preset(if model == ModelKind::AllenCahn {
            "example1_ac"
        } else {
            "example1_ch"
        })
        .unwrap()
    }
}

fn first_order() -> Verdict {
    let mut v = Verdict::new();
    let ac_ref = [4.90e-6, 2.45e-6, 1.22e-6, 6.12e-7];
    let ch_ref = [3.24e-3, 1.68e-3, 8.58e-4, 4.32e-4];
    match convergence_study(&example1(ModelKind::AllenCahn, "naev_1st"), &EXAMPLE1_DTS) {
        Ok(t) => {
            v.note(table_line("allen_cahn", &t));
            rates_within(&mut v, "allen_cahn", &t, 0.9, 1.1);
            errors_within_factor(&mut v, "allen_cahn", &t, &ac_ref, 3.0);
        }
        Err(e) => v.error(e),
    }
    match convergence_study(&example1(ModelKind::CahnHilliard, "naev_1st"), &EXAMPLE1_DTS) {
        Ok(t) => {
            v.note(table_line("cahn_hilliard", &t));
            rates_within(&mut v, "cahn_hilliard", &t, 0.90, 1.05);
            errors_within_factor(&mut v, "cahn_hilliard", &t, &ch_ref, 3.0);
        }
        Err(e) => v.error(e),
    }
    v
}

fn crank_nicolson() -> Verdict {
    let mut v = Verdict::new();
    match convergence_study(&example1(ModelKind::AllenCahn, "naev_cn"), &EXAMPLE1_DTS) {
        Ok(t) => {
            v.note(table_line("allen_cahn", &t));
            rates_within(&mut v, "allen_cahn", &t, 1.85, 2.15);
        }
        Err(e) => v.error(e),
    }
    match convergence_study(&example1(ModelKind::CahnHilliard, "naev_cn"), &EXAMPLE1_DTS) {
        Ok(t) => {
            v.note(table_line("cahn_hilliard", &t));
            rates_within(&mut v, "cahn_hilliard", &t, 1.9, 2.3);
        }
        Err(e) => v.error(e),
    }
    v
}

fn pfc() -> Verdict {
    let mut v = Verdict::new();
    let dts = halving_sequence(1.0 / 16.0, 4);
    for (scheme, target) in [("naev_1st", 1.0), ("naev_cn", 2.0)] {
        let cfg = RunConfig {
            scheme: scheme.into(),
            ..RunConfig::preset("example3").unwrap()
        };
        match convergence_study(&cfg, &dts) {
            Ok(t) => {
                v.note(table_line(scheme, &t));
                rates_within(&mut v, scheme, &t, target - 0.1, target + 0.1);
            }
            Err(e) => v.error(e),
        }
    }
    v
}

fn sav_vs_naev() -> Verdict {
    let mut v = Verdict::new();
    let dts = halving_sequence(1.0 / 16.0, 7);
    let cfg = RunConfig::preset("example5").unwrap();
    let report = match compare_sav_naev(&cfg, &[10.0, 100.0], &dts) {
        Ok(r) => r,
        Err(e) => {
            v.error(e);
            return v;
        }
    };
    let naev = &report.naev.table;
    let sav10 = &report.sav[0].table;
    let sav100 = &report.sav[1].table;
    v.note(table_line("naev_cn", naev));
    v.note(table_line("sav_cn C=100", sav100));
    v.note(table_line("sav_cn C=10", sav10));
    v.note(format!(
        "min E1: naev {:.4}, sav C=10 {:.4}; clamps: naev {}, C=100 {}, C=10 {}",
        naev.min_e1(),
        sav10.min_e1(),
        naev.total_clamps(),
        sav100.total_clamps(),
        sav10.total_clamps()
    ));

    let fine_rates = |t: &ConvergenceTable| -> Vec<f64> {
        t.rows
            .iter()
            .filter(|r| r.dt <= 1.0 / 512.0 + 1e-15)
            .filter_map(|r| r.rate)
            .collect()
    };
    for (label, t) in [("naev_cn", naev), ("sav_cn C=100", sav100)] {
        let rates = fine_rates(t);
        let ok = !rates.is_empty() && rates.iter().all(|r| (r - 2.0).abs() <= 0.1);
        v.check(ok, format!("{label} rates at dt <= 2^-9 {rates:.3?} within 2 +- 0.1"));
    }
    let dominated = naev.rows.iter().zip(&sav100.rows).all(|(a, b)| a.err <= b.err);
    v.check(dominated, "naev_cn error <= sav_cn C=100 error at every dt");
    v.check(
        sav10.total_clamps() >= 1,
        format!("sav_cn C=10 clamp events {} >= 1", sav10.total_clamps()),
    );
    let outside = sav10.rates().iter().any(|r| !(1.5..=2.5).contains(r));
    v.check(outside, "sav_cn C=10 has a rate outside [1.5, 2.5]");
    v
}

/// Small setups used by the energy-law and positivity suites.
fn energy_suite_config(model: ModelKind) -> RunConfig {
    let base = RunConfig {
        nx: 64,
        ny: 64,
        ..RunConfig::default()
    };
    match model {
        ModelKind::AllenCahn | ModelKind::CahnHilliard => RunConfig { model, ..base },
        ModelKind::Pfc => RunConfig {
            model,
            epsilon: 0.25,
            lx: 64.0,
            ly: 64.0,
            ic: "sinpi64".into(),
            ..base
        },
        ModelKind::SwiftHohenbergQc => RunConfig {
            model,
            epsilon: 0.25,
            g: 2.0,
            lx: 64.0,
            ly: 64.0,
            ic: "sh_smooth".into(),
            ..base
        },
    }
}

struct SuiteRun {
    label: String,
    scheme: SchemeKind,
    outcome: Result<RunOutcome, naev::Error>,
}

fn energy_suite() -> &'static [SuiteRun] {
    use std::sync::OnceLock;
    static RUNS: OnceLock<Vec<SuiteRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        use rayon::prelude::*;
        let mut jobs = Vec::new();
        for model in ModelKind::ALL {
            for scheme in ALL_KINDS {
                for dt in [1e-2, 1e-1, 1.0] {
                    jobs.push((model, scheme, dt));
                }
            }
        }
        jobs.into_par_iter()
            .map(|(model, scheme, dt)| {
                let cfg = RunConfig {
                    scheme: scheme.tag().into(),
                    c: 100.0,
                    dt,
                    t_final: 200.0 * dt,
                    ..energy_suite_config(model)
                };
                SuiteRun {
                    label: format!("{model} {} dt={dt}", scheme.tag()),
                    scheme,
                    outcome: run_simulation(&cfg),
                }
            })
            .collect()
    })
}

fn energy_law() -> Verdict {
    let mut v = Verdict::new();
    for run in energy_suite() {
        match &run.outcome {
            Ok(out) => {
                let e0 = out.log[0].e_modified;
                let tol = 1e-10 * (1.0 + e0.abs());
                let worst = out
                    .log
                    .windows(2)
                    .map(|w| w[1].e_modified - w[0].e_modified)
                    .fold(f64::NEG_INFINITY, f64::max);
                let ok = worst <= tol;
                if !ok {
                    v.check(false, format!("{}: max increase {worst:.3e} > {tol:.3e}", run.label));
                }
            }
            Err(e) => v.check(false, format!("{}: {e}", run.label)),
        }
    }
    v.check(v.pass, format!("{} runs checked", energy_suite().len()));
    v
}

fn positivity() -> Verdict {
    let mut v = Verdict::new();
    let mut total = 0;
    for run in energy_suite().iter().filter(|r| !r.scheme.is_sav()) {
        if let Ok(out) = &run.outcome {
            if out.clamp_count > 0 {
                let first = out.log.iter().find(|r| r.clamped).unwrap();
                v.note(format!(
                    "counterexample {}: {} clamps, first at n={} (E_original {:.4e}, min denominator {:.3e})",
                    run.label, out.clamp_count, first.n, first.e_original, out.min_denominator
                ));
                total += out.clamp_count;
            }
        }
    }
    v.check(total == 0, format!("NAEV clamp events across the suite: {total}"));
    v
}

fn oracle() -> Verdict {
    let mut v = Verdict::new();
    let mut worst: f64 = 0.0;
    for model_kind in ModelKind::ALL {
        let model = small_model(model_kind, 8);
        let dt = match model_kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => 1e-3,
            _ => 0.1,
        };
        for scheme in ALL_KINDS {
            let phi0 = naev::harness::centered_noise(model.grid(), 21).map(|x| 0.1 + 0.4 * x);
            let mut state = SchemeState::new(model.clone(), phi0, dt, scheme).unwrap();
            for _ in 0..3 {
                let (phi_ref, r_ref) = dense_step(&state);
                if let Err(e) = state.step() {
                    v.error(e);
                    continue;
                }
                let d = (vec_of(state.phi()) - phi_ref).amax().max((state.r() - r_ref).abs());
                worst = worst.max(d);
            }
        }
    }
    v.check(worst <= 1e-10, format!("max deviation from dense solve {worst:.3e} <= 1e-10"));
    v
}

fn conservation() -> Verdict {
    let mut v = Verdict::new();
    let ch = RunConfig {
        t_final: 1000.0 * 4e-4,
        ..RunConfig::preset("example1_ch").unwrap()
    };
    let pfc = RunConfig {
        t_final: 1000.0 / 64.0,
        ..RunConfig::preset("example3").unwrap()
    };
    for (label, cfg) in [("cahn_hilliard", ch), ("pfc", pfc)] {
        let area = cfg.lx * cfg.ly;
        let mut m0 = None;
        let mut drift: f64 = 0.0;
        let res = naev::harness::run_simulation_with(&cfg, |s, _| {
            let m = s.phi().integral();
            let m0 = *m0.get_or_insert(m);
            drift = drift.max((m - m0).abs());
        });
        match res {
            Ok(out) => v.check(
                drift <= 1e-11 * area,
                format!("{label}: {} steps, mass drift {drift:.3e} <= {:.3e}", out.log.len() - 1, 1e-11 * area),
            ),
            Err(e) => v.error(e),
        }
    }

    let ac = RunConfig::preset("example2_ac").unwrap();
    let mut masses = Vec::new();
    let res = naev::harness::run_simulation_with(&ac, |s, _| masses.push((s.time(), s.phi().integral())));
    match res {
        Ok(_) => {
            let after: Vec<&(f64, f64)> = masses.iter().filter(|(t, _)| *t >= 1.0 - 1e-9).collect();
            let violation = after.windows(2).find(|w| w[1].1 >= w[0].1);
            let last = masses.last().unwrap().1;
            match violation {
                None => v.check(true, format!("allen_cahn example 2 mass strictly decreasing after t=1, final {last:.6}")),
                Some(w) => v.check(
                    false,
                    format!(
                        "allen_cahn example 2 mass not decreasing at t={:.1}: {:.17e} -> {:.17e}",
                        w[1].0, w[0].1, w[1].1
                    ),
                ),
            }
        }
        Err(e) => v.error(e),
    }
    v
}

fn example6_check(v: &mut Verdict, cfg: &RunConfig) {
    let naev = RunConfig {
        scheme: "naev_cn".into(),
        ..cfg.clone()
    };
    let sav = RunConfig {
        scheme: "sav_cn".into(),
        c: 1e4,
        ..cfg.clone()
    };
    let (a, b) = match (run_simulation(&naev), run_simulation(&sav)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            v.error(e);
            return;
        }
    };
    v.check(a.min_e1 < -1000.0, format!("naev_cn min E1 {:.1} < -1000", a.min_e1));
    let min_rad = a.log.iter().map(|r| r.radicand).fold(f64::INFINITY, f64::min);
    v.check(
        a.clamp_count == 0,
        format!("naev_cn radicand positive: {} clamps, min radicand {min_rad:.4e}", a.clamp_count),
    );
    v.check(
        b.clamp_count == 0,
        format!("sav_cn C=1e4 clamp-free: {} clamps, min E1 {:.1}", b.clamp_count, b.min_e1),
    );
    for t in [20.0, 60.0, 120.0] {
        let n = (t / cfg.dt).round() as usize;
        let (ea, eb) = (a.log[n].e_original, b.log[n].e_original);
        let rel = (ea - eb).abs() / ea.abs();
        v.check(rel <= 0.01, format!("t={t}: E naev {ea:.4} vs sav {eb:.4}, relative gap {rel:.4} <= 0.01"));
    }
}

fn example6() -> Verdict {
    let mut v = Verdict::new();
    example6_check(&mut v, &RunConfig::preset("example6").unwrap());
    v
}

/// Same criterion on the `[−50, 50]²` domain of Example 4.
fn example6_domain_100() -> Verdict {
    let mut v = Verdict::new();
    example6_check(
        &mut v,
        &RunConfig {
            lx: 100.0,
            ly: 100.0,
            ..RunConfig::preset("example6").unwrap()
        },
    );
    v
}

fn imaginary_equivalence() -> Verdict {
    let mut v = Verdict::new();
    let configs = [
        RunConfig::preset("example1_ac").unwrap(),
        RunConfig::preset("example1_ch").unwrap(),
        RunConfig {
            t_final: 10.0,
            snapshot_times: Vec::new(),
            ..RunConfig::preset("example4").unwrap()
        },
        RunConfig::preset("example5").unwrap(),
    ];
    for cfg in configs {
        let mut fields = Vec::new();
        for scheme in ["naev_cn", "naev_cn_imag"] {
            let mut traj = Vec::new();
            let res = naev::harness::run_simulation_with(
                &RunConfig {
                    scheme: scheme.into(),
                    ..cfg.clone()
                },
                |s, _| traj.push(s.phi().clone()),
            );
            if let Err(e) = res {
                v.error(e);
            }
            fields.push(traj);
        }
        let same = fields[0].len() == fields[1].len() && fields[0] == fields[1];
        v.check(same, format!("{} {} steps bitwise identical", cfg.model, fields[0].len().saturating_sub(1)));
    }
    v
}

type Criterion = (&'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 11] = [
    ("first_order_rates", first_order),
    ("crank_nicolson_rates", crank_nicolson),
    ("pfc_rates", pfc),
    ("sav_vs_naev_rates", sav_vs_naev),
    ("energy_law_suite", energy_law),
    ("naev_radicand_positivity", positivity),
    ("oracle_equivalence", oracle),
    ("conservation", conservation),
    ("example6_unbounded_e1", example6),
    ("example6_unbounded_e1_domain_100 (supplementary)", example6_domain_100),
    ("naev_cn_imag_equivalence", imaginary_equivalence),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (name, run) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let verdict = run();
        println!(
            "{} {name} ({:.1}s)",
            if verdict.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for d in &verdict.details {
            println!("    {d}");
        }
        if !verdict.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} failed: {}", failed.len(), failed.join(", "));
        ExitCode::FAILURE
    }
}

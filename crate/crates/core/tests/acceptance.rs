//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::{PI, TAU};
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use energy_exchange::analysis::{
    conditioned_energy_deficit, conservation_audit, energy_ledger, simulate, transition_probability, Target,
};
use energy_exchange::constants::ConstantsTable;
use energy_exchange::dynamics::{
    coherent_amplitude_beta, dyson_first_order, pn1_from_beta, semiclassical_pn1, EvolutionConfig, Method,
};
use energy_exchange::models::{
    gravito_classical_params_with, gravito_vacuum_coupling_with, gw_energy_density_with, BeamSplitterParams,
    DrivenOscillatorParams, FieldState, GravitoParams, ModelSpec, QubitSemiClassicalParams,
};
use energy_exchange::scenario::{bundled, execute, find_bundled, ScenarioConfig};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn scenario(name: &str) -> (ScenarioConfig, &'static str) {
    let b = find_bundled(name).unwrap_or_else(|| panic!("bundled scenario {name}"));
    (ScenarioConfig::parse(b.text).expect("bundled scenarios parse"), b.text)
}

fn oracle_triangle() -> Outcome {
    let start = Instant::now();
    let (g, alpha) = (1e-3, 2.0);
    let times = [2.0, 4.0, 6.0, 8.0, 10.0];
    let mut worst = 0.0f64;
    let mut compared = 0;
    for delta in [0.0, 0.05, 0.1, 0.2, 0.3] {
        let p = BeamSplitterParams {
            nu: 1.0 + delta,
            omega: 1.0,
            g,
            field_cutoff: 26,
            detector_cutoff: 4,
            field: FieldState::coherent(alpha),
        };
        let model = ModelSpec::BeamSplitter(p);
        let traj = simulate(&model, &EvolutionConfig::new(0.5, 10.0, Method::MatrixExponential))
            .map_err(|e| e.to_string())?;
        let exact = transition_probability(&traj, Target::DetectorLevel(1)).map_err(|e| e.to_string())?;
        for t in times {
            let k = traj
                .times
                .iter()
                .position(|s| (s - t).abs() < 1e-9)
                .ok_or("readout time missing from the grid")?;
            let d = dyson_first_order(&p, t);
            if d.closed_form >= 0.01 {
                continue;
            }
            let pair = [
                rel(d.closed_form, d.double_integral),
                rel(d.closed_form, exact[k]),
                rel(d.double_integral, exact[k]),
            ];
            let m = pair.iter().copied().fold(0.0, f64::max);
            ensure(m <= 0.02, || {
                format!("delta={delta} t={t}: closed {} dyson {} exact {}", d.closed_form, d.double_integral, exact[k])
            })?;
            worst = worst.max(m);
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{compared} points, worst pairwise relative gap {worst:.2e}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn conservation() -> Outcome {
    let mut lines = Vec::new();
    for b in bundled() {
        let cfg = ScenarioConfig::parse(b.text).map_err(|e| e.to_string())?;
        if !cfg.model.is_full_quantum() {
            continue;
        }
        let traj = simulate(&cfg.model, &cfg.evolution).map_err(|e| e.to_string())?;
        let audit = conservation_audit(&traj, &cfg.model).map_err(|e| e.to_string())?;
        ensure(audit.excitation_drift.is_some(), || format!("{}: no excitation operator", b.name))?;
        ensure(audit.max_drift() <= 1e-8, || format!("{}: {audit:?}", b.name))?;
        lines.push(format!("{} {:.1e}", b.name, audit.max_drift()));
    }
    ensure(!lines.is_empty(), || "no full-quantum scenarios bundled".into())?;
    Ok(format!("max drift per scenario: {}", lines.join(", ")))
}

fn semiclassical_deficit() -> Outcome {
    let mut out = Vec::new();
    for name in ["energy_audit_semiclassical", "energy_audit_semiclassical_detuned"] {
        let (cfg, _) = scenario(name);
        let traj = simulate(&cfg.model, &cfg.evolution).map_err(|e| e.to_string())?;
        let ledger = energy_ledger(&traj, &cfg.model).map_err(|e| e.to_string())?;
        let first = ledger.e_classical[0];
        ensure(ledger.e_classical.iter().all(|e| e.to_bits() == first.to_bits()), || {
            format!("{name}: e_classical varies")
        })?;
        let report = conditioned_energy_deficit(&traj, &cfg.model).map_err(|e| e.to_string())?;
        let omega = cfg.model.detector_frequency();
        let delta = cfg.model.field_frequency() - omega;
        ensure((report.deficit - omega).abs() <= 1e-9, || format!("{name}: deficit {}", report.deficit))?;
        ensure((report.e_diff - delta).abs() <= 1e-9, || format!("{name}: e_diff {} vs {delta}", report.e_diff))?;
        out.push(format!("{name}: deficit {:.12} e_diff {:.12}", report.deficit, report.e_diff));
    }
    Ok(out.join("; "))
}

fn neo_classical() -> Outcome {
    let qubit = QubitSemiClassicalParams {
        omega: 1.0,
        nu: 1.0,
        lambda: 0.05,
        x0: 1.0,
    };
    let osc = DrivenOscillatorParams {
        omega: 1.0,
        nu: 1.0,
        lambda: 0.01,
        x0: 1.0,
        detector_cutoff: 8,
    };
    let cases = [
        (ModelSpec::NeoClassicalQubit(qubit), ModelSpec::QubitDrive(qubit)),
        (ModelSpec::NeoClassicalOscillator(osc), ModelSpec::DrivenOscillator(osc)),
    ];
    let mut out = Vec::new();
    for (neo, semi) in cases {
        let residual = |dt: f64| -> Result<f64, String> {
            let traj = simulate(&neo, &EvolutionConfig::new(dt, 10.0, Method::MidpointPiecewise))
                .map_err(|e| e.to_string())?;
            let ledger = energy_ledger(&traj, &neo).map_err(|e| e.to_string())?;
            ledger.max_edot_residual().ok_or_else(|| "no residual column".to_string())
        };
        let (coarse, fine) = (residual(2e-3)?, residual(1e-3)?);
        let order = (coarse / fine).log2();
        ensure(order >= 1.9, || format!("{}: observed order {order}", neo.tag()))?;

        let cfg = EvolutionConfig::new(1e-3, 50.0, Method::MidpointPiecewise);
        let traj = simulate(&neo, &cfg).map_err(|e| e.to_string())?;
        let drift = energy_ledger(&traj, &neo).map_err(|e| e.to_string())?.total_drift();
        let semi_traj = simulate(&semi, &cfg).map_err(|e| e.to_string())?;
        let deficit = conditioned_energy_deficit(&semi_traj, &semi)
            .map_err(|e| e.to_string())?
            .deficit;
        ensure(drift * 100.0 <= deficit.abs(), || {
            format!("{}: drift {drift} vs semi-classical deficit {deficit}", neo.tag())
        })?;
        out.push(format!(
            "{}: order {order:.3}, drift {drift:.1e} vs deficit {deficit:.3}",
            neo.tag()
        ));
    }
    Ok(out.join("; "))
}

fn signatures() -> Outcome {
    let k = ConstantsTable::codata_2018();
    let mut out = Vec::new();
    for name in ["beam_splitter_resonance", "energy_audit_semiclassical", "qubit_semiclassical_drive"] {
        let (cfg, text) = scenario(name);
        let t = cfg.analysis.signature_tolerances;
        ensure(t.intensity_slope <= 0.01 && t.t_min <= 1e-3 && t.gap <= 1e-9, || {
            format!("{name}: tolerances loosened")
        })?;
        let intensity = cfg
            .scan
            .iter()
            .find(|s| s.axis.name() == "intensity")
            .ok_or("no intensity scan")?;
        ensure(intensity.start <= 1.0 && intensity.stop >= 16.0, || {
            format!("{name}: intensity range [{}, {}]", intensity.start, intensity.stop)
        })?;
        let artifacts = execute(&cfg, text, &k).map_err(|e| e.to_string())?;
        let sig = artifacts.report.signature.ok_or("no signature report")?;
        ensure(sig.all_pass(), || format!("{name}: {sig:?}"))?;
        out.push(format!(
            "{} argmax {} slope {:.4} gap {:.1e} min P {:.1e}",
            sig.model, sig.threshold.statistic, sig.intensity_slope.statistic, sig.intensity_gap.statistic,
            sig.short_time.statistic
        ));
    }
    Ok(out.join("; "))
}

fn golden_rule() -> Outcome {
    let (cfg, text) = scenario("golden_rule_scaling");
    let artifacts = execute(&cfg, text, &ConstantsTable::codata_2018()).map_err(|e| e.to_string())?;
    let fit = artifacts.report.golden_rule_fit.ok_or("no fit")?;
    let spec = cfg.scan.first().ok_or("no scan")?;
    let lo = spec.start.min(spec.stop) / fit.rabi_frequency;
    let hi = spec.start.max(spec.stop) / fit.rabi_frequency;
    ensure(lo >= 10.0 * (1.0 - 1e-12) && hi >= 1000.0 * (1.0 - 1e-12), || {
        format!("delta/g spans [{lo}, {hi}]")
    })?;
    ensure((fit.fit.slope + 2.0).abs() <= 0.02, || format!("slope {}", fit.fit.slope))?;
    Ok(format!(
        "slope {:.4} +- {:.1e} over delta/g in [{lo:.0}, {hi:.0}]",
        fit.fit.slope, fit.fit.slope_stderr
    ))
}

fn gravito() -> Outcome {
    let k = ConstantsTable::codata_2018();
    let p = GravitoParams {
        mass: 1000.0,
        length: 1.0,
        nu: TAU * 1000.0,
        omega0: TAU * 1000.0,
        h0: 1e-21,
        volume: 1.0,
        detector_cutoff: 8,
    };
    let e = |r: Result<f64, _>| r.map_err(|e: energy_exchange::models::ModelError| e.to_string());
    let g = e(gravito_vacuum_coupling_with(&p, &k))?;
    let g4nu = e(gravito_vacuum_coupling_with(&GravitoParams { nu: 4.0 * p.nu, ..p }, &k))?;
    let g4v = e(gravito_vacuum_coupling_with(&GravitoParams { volume: 4.0, ..p }, &k))?;
    ensure(rel(g4nu, g / 2.0) <= 1e-12, || format!("nu scaling {}", g4nu / g))?;
    ensure(rel(g4v, g / 2.0) <= 1e-12, || format!("volume scaling {}", g4v / g))?;

    let m = gravito_classical_params_with(&p, &k).map_err(|e| e.to_string())?;
    let identity = p.length / (PI * PI) * (p.mass * p.nu.powi(4) * k.hbar / p.omega0).sqrt();
    ensure(rel(m.lambda_si * m.zero_point_length, identity) <= 1e-12, || {
        format!("lambda x0 = {} vs {identity}", m.lambda_si * m.zero_point_length)
    })?;
    ensure(rel(m.interaction_coefficient, identity) <= 1e-12, || "interaction coefficient".into())?;

    let doubled = GravitoParams { h0: 2.0 * p.h0, ..p };
    let ratio = gw_energy_density_with(&doubled, &k) / gw_energy_density_with(&p, &k);
    ensure(rel(ratio, 4.0) <= 1e-12, || format!("energy density ratio {ratio}"))?;
    let e_cl = |q: &GravitoParams| -> Result<f64, String> {
        let d = gravito_classical_params_with(q, &k).map_err(|e| e.to_string())?.driven;
        Ok(d.nu * d.nu * d.x0 * d.x0 / 2.0)
    };
    let ratio_cl = e_cl(&doubled)? / e_cl(&p)?;
    ensure(rel(ratio_cl, 4.0) <= 1e-12, || format!("classical energy ratio {ratio_cl}"))?;

    // independent mpmath constant folding, tools/oracle_values.py
    let oracle = [
        (
            e(gravito_vacuum_coupling_with(&GravitoParams { nu: TAU * 5000.0, ..p }, &k))?,
            7.915_260_869_150_267e-33,
        ),
        (m.lambda_si, 4.0e9),
        (m.zero_point_length, 4.096_831_916_505_138_5e-21),
        (m.interaction_coefficient, 1.638_732_766_602_055_4e-11),
        (gw_energy_density_with(&p, &k), 5.288_050_182_969_314_8e-10),
    ];
    for (value, expected) in oracle {
        ensure(rel(value, expected) <= 1e-12, || format!("{value} vs oracle {expected}"))?;
    }
    Ok(format!("g_q = {g:.6e}, lambda x0 = {identity:.6e}, 5 SI values match the oracle"))
}

fn pn1() -> Outcome {
    let p = DrivenOscillatorParams {
        omega: 1.0,
        nu: 1.0,
        lambda: 1e-3,
        x0: 1.0,
        detector_cutoff: 6,
    };
    let model = ModelSpec::DrivenOscillator(p);
    let traj = simulate(&model, &EvolutionConfig::new(0.01, 150.0, Method::MidpointPiecewise))
        .map_err(|e| e.to_string())?;
    let exact = transition_probability(&traj, Target::DetectorLevel(1)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for t in [50.0, 75.0, 100.0, 125.0, 150.0] {
        let k = traj
            .times
            .iter()
            .position(|s| (s - t).abs() < 1e-6)
            .ok_or("readout time missing from the grid")?;
        let formula = semiclassical_pn1(&p, t);
        let beta = pn1_from_beta(coherent_amplitude_beta(&p, t));
        ensure(formula < 0.01 && exact[k] < 0.01, || format!("t={t}: not weak ({formula})"))?;
        let m = [rel(formula, beta), rel(formula, exact[k]), rel(beta, exact[k])]
            .into_iter()
            .fold(0.0, f64::max);
        ensure(m <= 0.05, || format!("t={t}: formula {formula} beta {beta} exact {}", exact[k]))?;
        worst = worst.max(m);
    }
    Ok(format!("t in [50, 150], worst pairwise relative gap {worst:.2e}"))
}

fn determinism() -> Outcome {
    let k = ConstantsTable::codata_2018();
    let mut files = 0;
    for b in bundled() {
        let cfg = ScenarioConfig::parse(b.text).map_err(|e| e.to_string())?;
        let first = execute(&cfg, b.text, &k).map_err(|e| format!("{}: {e}", b.name))?;
        let second = execute(&cfg, b.text, &k).map_err(|e| format!("{}: {e}", b.name))?;
        for ((name, a), (_, b2)) in first.files.iter().zip(&second.files) {
            if name.ends_with(".csv") {
                ensure(a == b2, || format!("{}: {name} differs", b.name))?;
                files += 1;
            }
        }
        ensure(first.files == second.files, || format!("{}: artifacts differ", b.name))?;
    }
    Ok(format!("{} scenarios, {files} CSV files byte-identical", bundled().len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle triangle", oracle_triangle),
        ("unitarity and conservation", conservation),
        ("semi-classical deficit", semiclassical_deficit),
        ("neo-classical restoration", neo_classical),
        ("photo-electric signatures", signatures),
        ("golden-rule scaling", golden_rule),
        ("gravito constants", gravito),
        ("one-quantum triple check", pn1),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

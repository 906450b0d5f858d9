//! The experiments behind each subcommand. Each one is a pure function of
//! the configuration: it returns the report and artifacts, and the caller
//! decides where to write them.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ultrawave_core::determinacy::{
    b2_discrepancy_table, b2_first_principles, b2_printed, det_grid, noncharacteristic_sweep,
    z_eps_residual,
};
use ultrawave_core::extension::extend::mixed_extender;
use ultrawave_core::extension::{
    energy_bound_check, norm_identity_check, trace_check, Extender, Refinement,
};
use ultrawave_core::fd_oracle::fd_convergence;
use ultrawave_core::nonuniqueness::{nonuniqueness_demo, NONTRIVIAL_TOL, VANISH_TOL};
use ultrawave_core::propagator::constraint_residual;
use ultrawave_core::random::random_cauchy;
use ultrawave_core::{
    build_witness, conservation_check, contraction_check, growth_rate, indefinite_energy, project,
    propagate, vanish_order_audit, x_norm_sq, BumpProfile, CauchyData, ConeGeometry, FreqLattice,
    KernelSpec, KernelVariant, SignatureSpec, SpectralField, SubspaceTag, SweepConfig, TraceData,
    TraceLabel, WitnessSpec,
};

use crate::config::{
    band_limited, B2Source, Experiment, ExperimentConfig, Subspace, Variant, WitnessParams,
};
use crate::field_io::{read_field, FieldData};
use crate::report::{default_section, table_csv, Artifact, Check, Outcome, Report, Table};
use crate::CliError;

const CODIM2: SignatureSpec = SignatureSpec {
    d1: 1,
    d2: 2,
    p1: 1,
    p2: 0,
};

// Relative size of round-off in exact linear-algebra identities.
const EXACT_TOL: f64 = 1e-12;

pub fn run_experiment(cfg: &ExperimentConfig, experiment: Experiment) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut out = Outcome::new(Report::new(experiment.name(), cfg.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match experiment {
        Experiment::Propagate => propagate_exp(cfg, &mut rng, &mut out)?,
        Experiment::Project => project_exp(cfg, &mut rng, &mut out)?,
        Experiment::Conserve => conserve_exp(cfg, &mut rng, &mut out)?,
        Experiment::Contract => contract_exp(cfg, &mut rng, &mut out)?,
        Experiment::Blowup => blowup_exp(cfg, &mut out)?,
        Experiment::Extend => extend_exp(cfg, &mut rng, &mut out)?,
        Experiment::NormIdentity => norm_identity_exp(cfg, &mut out)?,
        Experiment::Witness => witness_exp(cfg, &mut out)?,
        Experiment::NonuniqueDemo => demo_exp(cfg, &mut rng, &mut out)?,
        Experiment::DeterminacySweep => sweep_exp(cfg, &mut rng, &mut out)?,
        Experiment::FdOracle => fd_exp(cfg, &mut rng, &mut out)?,
    }
    for t in out.report.tables.clone() {
        out.artifacts.push(Artifact::Csv {
            name: format!("table_{}.csv", t.name),
            content: table_csv(&t),
        });
    }
    Ok(out)
}

fn n_lattice(cfg: &ExperimentConfig) -> Result<Arc<FreqLattice>, CliError> {
    let lat = FreqLattice::new(cfg.signature, &cfg.sizes())?.with_period_scale(cfg.period_scale)?;
    Ok(Arc::new(lat))
}

fn random_data(lat: &Arc<FreqLattice>, bandwidth: f64, sub: Subspace, rng: &mut ChaCha8Rng) -> CauchyData {
    let d = random_cauchy(lat, bandwidth, rng);
    match sub.tag() {
        Some(t) => project(&d, t),
        None => d,
    }
}

fn required_tag(sub: Subspace) -> Result<SubspaceTag, CliError> {
    sub.tag()
        .ok_or_else(|| CliError::Invalid("subspace must be one of c, s, u here".into()))
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        x
    } else {
        x / scale
    }
}

fn spectral_file(path: &std::path::Path) -> Result<SpectralField, CliError> {
    match read_field(path)? {
        FieldData::Spectral(s) => Ok(s),
        FieldData::Grid(g) => Ok(g.to_spectral()),
    }
}

fn propagate_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.propagate;
    let data = match &p.u0_file {
        Some(path) => {
            let u0 = spectral_file(path)?;
            let u1 = match &p.u1_file {
                Some(path) => spectral_file(path)?,
                None => SpectralField::zeros(Arc::clone(u0.lattice())).assert_real_symmetric(0.0)?,
            };
            let d = CauchyData::new(u0, u1)?;
            match p.subspace.tag() {
                Some(t) => project(&d, t),
                None => d,
            }
        }
        None => random_data(&n_lattice(cfg)?, p.bandwidth, p.subspace, rng),
    };
    let cons = conservation_check(&data, &p.y1)?;
    out.report.check(Check::at_most("energy_mode_drift", cons.max_mode_drift, 1e-10));
    let scale = data.max_abs();
    for (i, &y) in p.y1.iter().enumerate() {
        let d = propagate(&data, y)?;
        out.report.note(format!("energy_y{y}"), indefinite_energy(&d));
        out.report.note(format!("x_norm_sq_y{y}"), x_norm_sq(&d, 0)?);
        if data.is_center() {
            let back = propagate(&d, -y)?;
            let err = relative(back.sub(&data)?.max_abs(), scale);
            out.report.check(Check::at_most(format!("round_trip_y{y}"), err, 1e-10));
        }
        out.slice(&format!("u0_y{i}"), default_section(&d.u0.to_grid()));
        out.field(format!("u0_y{i}.uhf"), FieldData::Spectral(d.u0));
        out.field(format!("u1_y{i}.uhf"), FieldData::Spectral(d.u1));
    }
    Ok(())
}

fn project_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let lat = n_lattice(cfg)?;
    let d = random_cauchy(&lat, cfg.project.bandwidth, rng);
    let scale = d.max_abs();
    let parts: Vec<(SubspaceTag, CauchyData)> = [SubspaceTag::S, SubspaceTag::U, SubspaceTag::C]
        .into_iter()
        .map(|t| (t, project(&d, t)))
        .collect();
    for (t, p) in &parts {
        let l = t.letter();
        out.report.check(Check::at_most(format!("constraint_{l}"), constraint_residual(p, *t).0, EXACT_TOL));
        let again = project(p, *t).sub(p)?.max_abs();
        out.report.check(Check::at_most(format!("idempotent_{l}"), relative(again, scale), EXACT_TOL));
        out.slice(&format!("u0_{l}"), default_section(&p.u0.to_grid()));
    }
    out.report.check(Check::holds("center_r2_support_empty", parts[2].1.r2_support().is_empty()));
    // P_S + P_U − P_C is the identity
    let sum = parts[0].1.add(&parts[1].1)?.sub(&parts[2].1)?;
    out.report.check(Check::at_most("decomposition", relative(sum.sub(&d)?.max_abs(), scale), EXACT_TOL));
    out.report.note("r2_modes", d.r2_support().len() as f64);
    Ok(())
}

fn conserve_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.conserve;
    let lat = n_lattice(cfg)?;
    for &sub in &p.subspaces {
        let data = random_data(&lat, p.bandwidth, sub, rng);
        let rep = conservation_check(&data, &p.y1)?;
        let l = sub.label();
        out.report.check(Check::at_most(format!("energy_mode_drift_{l}"), rep.max_mode_drift, p.tolerance));
        if sub == Subspace::C {
            out.report.check(Check::at_most("energy_drift_C", rep.relative_energy_drift, p.tolerance));
            let x0 = x_norm_sq(&data, 0)?;
            out.report.check(Check::at_most("x_norm_drift_C", relative(rep.max_x_drift, x0), p.tolerance));
        } else {
            out.report.note(format!("energy_drift_{l}"), rep.relative_energy_drift);
        }
        out.report.tables.push(Table {
            name: format!("energy_{l}"),
            columns: ["y1", "energy", "x_norm_sq"].map(String::from).to_vec(),
            rows: (0..rep.samples.len())
                .map(|i| vec![rep.samples[i], rep.energy[i], rep.x_norm_sq[i]])
                .collect(),
        });
    }
    Ok(())
}

fn contract_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.contract;
    let lat = n_lattice(cfg)?;
    for &sub in &p.subspaces {
        let tag = required_tag(sub)?;
        let pairs: Vec<(CauchyData, CauchyData)> = (0..p.pairs)
            .map(|_| {
                let u = random_data(&lat, p.bandwidth, sub, rng);
                let v = random_data(&lat, p.bandwidth, sub, rng);
                (u, v)
            })
            .collect();
        for &y in &p.y1 {
            let y = if tag == SubspaceTag::U { -y.abs() } else { y.abs() };
            let (mut excess, mut gap) = (f64::NEG_INFINITY, 0.0f64);
            for (u, v) in &pairs {
                let r = contraction_check(u, v, tag, y)?;
                excess = excess.max(relative(r.lhs - r.rhs, r.rhs));
                gap = gap.max(r.equality_gap.unwrap_or(0.0));
            }
            let l = tag.letter();
            out.report.check(Check::at_most(format!("contraction_{l}_y{y}"), excess, 1e-10));
            if tag == SubspaceTag::C {
                out.report.check(Check::at_most(format!("isometry_C_y{y}"), gap, 1e-10));
            }
        }
    }
    Ok(())
}

fn blowup_exp(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.blowup;
    let lat = n_lattice(cfg)?;
    if p.grid_points < 3 || !(p.grid_end > p.grid_start) {
        return Err(CliError::Invalid("blowup grid needs 3 points and grid_end > grid_start".into()));
    }
    let step = (p.grid_end - p.grid_start) / (p.grid_points - 1) as f64;
    let grid: Vec<f64> = (0..p.grid_points).map(|i| p.grid_start + step * i as f64).collect();
    let scale = lat.period_scale() as i64;
    for (i, case) in p.cases.iter().enumerate() {
        let mut modes = Vec::new();
        let mut expected: Option<f64> = None;
        for freq in &case.modes {
            if freq.len() != lat.dim() {
                return Err(CliError::Invalid(format!(
                    "blowup mode {freq:?} needs {} frequencies",
                    lat.dim()
                )));
            }
            let bins: Vec<i64> = freq.iter().map(|j| j * scale).collect();
            let flat = lat
                .flat_of(&bins)
                .ok_or_else(|| CliError::Invalid(format!("blowup mode {freq:?} does not fit on the lattice")))?;
            let disc = lat.mode(flat).dispersion_sq();
            if disc < 0.0 {
                let l = (-disc).sqrt();
                expected = Some(expected.map_or(l, |e| e.max(l)));
            }
            modes.push((bins.clone(), Complex64::new(1.0, 0.0)));
            modes.push((bins.iter().map(|j| -j).collect(), Complex64::new(1.0, 0.0)));
        }
        let u0 = SpectralField::from_modes(Arc::clone(&lat), &modes)?;
        let data = CauchyData::new(u0, SpectralField::zeros(Arc::clone(&lat)))?;
        let rate = growth_rate(&data, &grid)?;
        let expected = expected.expect("growth_rate rejects data without growing modes");
        let tol = case.tolerance.unwrap_or(if case.modes.len() == 1 { 1e-6 } else { 1e-4 });
        out.report.check(Check::at_most(format!("growth_rate_error_case{i}"), (rate - expected).abs(), tol));
        out.report.note(format!("growth_rate_case{i}"), rate);
        out.report.note(format!("expected_rate_case{i}"), expected);
        let mut rows = Vec::with_capacity(grid.len());
        for &y in &grid {
            let d = propagate(&data, y)?;
            rows.push(vec![y, 0.5 * (d.u0.sum_sq() + d.u1.sum_sq()).ln()]);
        }
        out.report.tables.push(Table {
            name: format!("growth_case{i}"),
            columns: vec!["y1".into(), "log_norm".into()],
            rows,
        });
    }
    Ok(())
}

fn resolve_variant(v: Variant, sig: SignatureSpec) -> Variant {
    match v {
        Variant::Auto if sig == CODIM2 => Variant::Codim2,
        Variant::Auto if sig.p1 == sig.d1 && sig.p2 == 0 => Variant::Spacelike,
        Variant::Auto => Variant::Mixed,
        v => v,
    }
}

fn extender(
    variant: Variant,
    profile: &BumpProfile,
    margin: u32,
    lat: &Arc<FreqLattice>,
) -> Result<Extender, CliError> {
    let spec = |v| KernelSpec::new(v, profile.clone(), margin);
    let ext = match resolve_variant(variant, lat.signature()) {
        Variant::Codim2 => Extender::new(&[spec(KernelVariant::Codim2)], lat)?,
        Variant::Spacelike => Extender::new(&[spec(KernelVariant::Spacelike)], lat)?,
        _ => mixed_extender(&spec(KernelVariant::MixedChi1), &spec(KernelVariant::MixedChi2), lat)?,
    };
    Ok(ext)
}

fn extend_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.extend;
    let sig = cfg.signature;
    let profile = p.profile.build()?;
    let lat = n_lattice(cfg)?;
    let ext = extender(p.variant, &profile, p.margin, &lat)?;
    let labels = TraceLabel::all(sig);
    let mut per_label = vec![0.0f64; labels.len()];
    let mut r2 = 0usize;
    for i in 0..p.count {
        let w = ext.random_trace_data(p.bandwidth, rng);
        let u = ext.extend(&w)?;
        let tr = trace_check(&w, &u)?;
        for (slot, (_, e)) in per_label.iter_mut().zip(&tr.errors) {
            *slot = slot.max(*e);
        }
        r2 += tr.r2_modes;
        if i == 0 {
            out.slice("u0", default_section(&u.u0.to_grid()));
            out.field("u0.uhf", FieldData::Spectral(u.u0));
            out.field("u1.uhf", FieldData::Spectral(u.u1));
        }
    }
    let max_err = per_label.iter().copied().fold(0.0, f64::max);
    out.report.check(Check::at_most("trace_max_error", max_err, p.tolerance));
    out.report.check(Check::at_most("r2_modes", r2 as f64, 0.0));
    for (l, e) in labels.iter().zip(&per_label) {
        out.report.note(format!("trace_error_{}", l.name(sig)), *e);
    }

    if p.energy_inputs.is_empty() {
        return Ok(());
    }
    let base = p.energy_sizes.clone().unwrap_or_else(|| cfg.sizes());
    let mut rows = Vec::new();
    for (level, r) in Refinement::sweep(&base, p.energy_levels).iter().enumerate() {
        let lat = r.lattice(sig)?;
        let ext = extender(p.variant, &profile, p.margin, &lat)?;
        let m = ext.m_lattice();
        let mut w = TraceData::new(Arc::clone(m))?;
        for input in &p.energy_inputs {
            let label = TraceLabel::parse(&input.label, sig)?;
            w.insert(label, band_limited(&input.terms).to_spectral(m)?)?;
        }
        let u = ext.extend(&w)?;
        let e = energy_bound_check(&w, &u)?;
        let rhs: f64 = e.rhs_terms.iter().map(|t| t.1).sum();
        rows.push(vec![level as f64, r.sizes[0] as f64, r.period_scale as f64, e.lhs, rhs, e.ratio]);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r[5]).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let spread = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    out.report.check(Check::holds("energy_ratio_finite", finite));
    out.report.check(Check::at_most("energy_ratio_spread", spread, p.energy_spread));
    out.report.tables.push(Table {
        name: "energy_bound".into(),
        columns: ["level", "size", "period_scale", "lhs", "rhs", "ratio"].map(String::from).to_vec(),
        rows,
    });
    Ok(())
}

fn norm_identity_exp(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.norm_identity;
    if cfg.signature != CODIM2 {
        return Err(CliError::Invalid(format!(
            "norm-identity runs on signature {CODIM2}, got {}",
            cfg.signature
        )));
    }
    let spec = KernelSpec::new(KernelVariant::Codim2, p.profile.build()?, 0);
    let w = band_limited(&p.terms);
    let rep = norm_identity_check(&w, &spec, &Refinement::sweep(&cfg.sizes(), p.levels))?;
    out.report.check(Check::holds("gap_monotone", rep.monotone));
    out.report.check(Check::at_most("final_gap", rep.final_gap, p.gap_tolerance));
    out.report.check(Check::at_most("final_weighted_gap", rep.final_weighted_gap, p.weighted_gap_tolerance));
    out.report.note("weighted_gap_monotone", if rep.weighted_monotone { 1.0 } else { 0.0 });
    out.report.tables.push(Table {
        name: "norm_identity".into(),
        columns: ["size", "period_scale", "lhs", "rhs", "gap", "weighted_lhs", "weighted_rhs", "weighted_gap"]
            .map(String::from)
            .to_vec(),
        rows: rep
            .levels
            .iter()
            .map(|l| {
                vec![
                    l.sizes[0] as f64,
                    l.period_scale as f64,
                    l.lhs,
                    l.rhs,
                    l.gap,
                    l.weighted_lhs,
                    l.weighted_rhs,
                    l.weighted_gap,
                ]
            })
            .collect(),
    });
    Ok(())
}

fn witness_spec(p: &WitnessParams, sig: SignatureSpec) -> Result<WitnessSpec, CliError> {
    let axis = match p.factor_axis {
        Some(a) => a,
        None => *sig
            .complement_axes()
            .first()
            .ok_or_else(|| CliError::Invalid("M has no complement coordinate".into()))?,
    };
    Ok(p.seeds
        .iter()
        .fold(WitnessSpec::new(p.k, axis), |s, seed| s.seed(seed.freq.clone(), seed.amp())))
}

fn witness_exp(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let lat = n_lattice(cfg)?;
    let spec = witness_spec(&cfg.witness, cfg.signature)?;
    let data = build_witness(&spec, &lat)?;
    let audit = vanish_order_audit(&data, spec.k, spec.factor_axis)?;
    let k = spec.k as usize;
    let low = audit.residuals[..=k].iter().copied().fold(0.0, f64::max);
    out.report.check(Check::at_most("vanishing_orders_residual", low, VANISH_TOL));
    out.report.check(Check::at_most("u1_residual", audit.u1_residual, VANISH_TOL));
    out.report.check(Check::at_least("first_nonvanishing_order_residual", audit.residuals[k + 1], NONTRIVIAL_TOL));
    out.report.check(Check::at_most("r2_modes", data.r2_support().len() as f64, 0.0));
    for (j, r) in audit.residuals.iter().enumerate() {
        out.report.note(format!("order{j}_residual"), *r);
    }
    out.slice("witness_u0", default_section(&data.u0.to_grid()));
    out.field("witness_u0.uhf", FieldData::Spectral(data.u0));
    Ok(())
}

fn demo_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.nonunique_demo;
    let lat = n_lattice(cfg)?;
    let ext = extender(p.variant, &p.profile.build()?, p.margin, &lat)?;
    let w = ext.random_trace_data(p.bandwidth, rng);
    let base = ext.extend(&w)?;
    let spec = witness_spec(&p.witness, cfg.signature)?;
    let rep = nonuniqueness_demo(&base, &spec, p.y1)?;
    let low = rep.agreement.residuals[..=spec.k as usize].iter().copied().fold(0.0, f64::max);
    out.report.check(Check::at_most("data_agreement_residual", low, VANISH_TOL));
    out.report.check(Check::at_most("u1_agreement_residual", rep.agreement.u1_residual, VANISH_TOL));
    out.report.check(Check::at_least("relative_divergence", rep.relative_divergence, NONTRIVIAL_TOL));
    let other = base.add(&build_witness(&spec, &lat)?)?;
    let traces = trace_check(&w, &other)?;
    // the witness never changes the value trace; derivatives only for k = 0
    out.report.check(Check::at_most("value_trace_error", traces.errors[0].1, EXACT_TOL));
    out.report.note("all_trace_error", traces.max_error);
    out.report.note("divergence", rep.divergence);
    let a = propagate(&base, p.y1)?;
    let b = propagate(&other, p.y1)?;
    out.slice("difference", default_section(&b.u0.sub(&a.u0)?.to_grid()));
    out.field("base_u0.uhf", FieldData::Spectral(base.u0));
    out.field("other_u0.uhf", FieldData::Spectral(other.u0));
    Ok(())
}

fn sweep_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.determinacy_sweep;
    let sig = cfg.signature;
    let sc = SweepConfig {
        epsilons: p.epsilons.clone(),
        thetas: p.thetas.clone(),
        lambdas: p.lambdas.clone(),
        samples_per_cell: p.samples_per_cell,
    };
    let sweep = noncharacteristic_sweep(&sc, sig, rng)?;
    out.report.check(Check::at_most("form_disagreement", sweep.max_disagreement, 1e-10));
    out.report.check(Check::at_least("min_form_minus_bound", sweep.min_form - sweep.bound, -1e-10));
    out.report.check(Check::at_most("sweep_failures", sweep.failure_count as f64, 0.0));
    out.report.note("min_form", sweep.min_form);
    out.report.note("min_form_over_lambda", sweep.min_form_over_lambda);
    out.report.note("sweep_surface_residual", sweep.max_surface_residual);

    let grid = det_grid(p.det_grid, p.det_grid, p.theta_max)?;
    out.report.check(Check::at_most("det_closed_form_error", grid.printed_max_err, EXACT_TOL));
    out.report.check(Check::holds("q2_lorentz_signature", grid.signature_ok));
    out.report.note("det_explicit_product_error", grid.explicit_max_err);
    out.report.note("closed_form_vs_explicit", grid.forms_max_diff);
    out.report.note("explicit_product_psd", if grid.explicit_psd { 1.0 } else { 0.0 });

    let mut worst: f64 = 0.0;
    for &eps in &p.epsilons {
        for &theta in &p.thetas {
            let g = ConeGeometry::new(eps, theta, 0.0)?;
            let b2 = match p.b2_source {
                B2Source::FirstPrinciples => b2_first_principles(&g),
                B2Source::Printed => b2_printed(&g),
            };
            worst = worst.max(z_eps_residual(&g, &b2, sig, p.boundary_samples, rng)?);
        }
    }
    out.report.check(Check::at_most("z_eps_boundary_residual", worst, EXACT_TOL));

    let rows = b2_discrepancy_table(&p.epsilons, &p.thetas)?;
    out.report.tables.push(Table {
        name: "b11_discrepancy".into(),
        columns: ["epsilon", "theta", "printed_b11", "first_principles_b11", "abs_diff"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|r| vec![r.epsilon, r.theta, r.printed_b11, r.first_principles_b11, r.abs_diff])
            .collect(),
    });
    Ok(())
}

fn fd_exp(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), CliError> {
    let p = &cfg.fd_oracle;
    let lat = n_lattice(cfg)?;
    let data = random_data(&lat, p.bandwidth, p.subspace, rng);
    let rep = fd_convergence(&data, p.y1, p.h_coarse)?;
    let scale = propagate(&data, p.y1)?.u0.to_grid().max_abs();
    out.report.check(Check::within("error_ratio", rep.ratio, p.ratio_min, p.ratio_max));
    out.report.note("error_coarse", rep.error_coarse);
    out.report.note("error_fine", rep.error_fine);
    out.report.note("relative_error_fine", relative(rep.error_fine, scale));
    out.report.note("h_coarse", rep.h_coarse);
    Ok(())
}

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use nag_core::condition::{k_estimate, k_local, kappa_local, m_local, mu_norm, NormUsed};
use nag_core::ensembles::{
    condition_ratio_statistics, homotopy_step_statistics, pv_box_count_experiment, ratio_statistics, tail_statistics,
    EnsembleSpec, Law, TrialRecord,
};
use nag_core::homology::{polybetti, BettiMode};
use nag_core::homotopy::{solve_with, AlhOptions, FastPath, PathNorm};
use nag_core::linalg::normalize;
use nag_core::norms::{linf_norm_complex, linf_norm_real};
use nag_core::pv::{pv_subdivide, Clause};
use nag_core::{AffinePoly, AnySystem, Field, NagError, PolyDocument, PolySystem, Scalar};

use crate::args::{
    BettiArgs, Command, ConditionArgs, ExperimentArgs, ExperimentKind, FastPathArg, NormArgs, PvArgs, SolveArgs,
};
use crate::output::{format_real, parse_real, to_json, CsvTable, Real, SCHEMA_VERSION};
use crate::records::{
    BettiRecord, ConditionRecord, ExperimentRecord, GlobalRecord, LevelOut, NormRecord, PointRecord, PvRecord,
    SolveRecord, TailRowOut,
};
use crate::{CliError, Outcome};

/// Reads and validates a polynomial JSON document.
pub fn load_poly(path: &Path) -> Result<AnySystem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: PolyDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.display().to_string(), source: e })?;
    doc.to_system().map_err(|e| CliError::Invalid { path: path.display().to_string(), source: e })
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn outcome(json: String, inputs: &[&Path]) -> Outcome {
    Outcome {
        json,
        inputs: inputs.iter().map(|p| path_string(p)).collect(),
        outputs: Vec::new(),
        seed: None,
        max_depth: None,
        max_steps: None,
        bounds: BTreeMap::new(),
    }
}

pub(crate) fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Norm(a) => norm(a),
        Command::Condition(a) => condition(a),
        Command::Betti(a) => betti(a),
        Command::Pv(a) => pv(a),
        Command::Solve(a) => solve(a),
        Command::Experiment(a) => experiment(a),
        Command::Rerun(_) | Command::Schema => unreachable!("handled before dispatch"),
    }
}

fn norm(a: &NormArgs) -> Result<Outcome, CliError> {
    let sys = load_poly(&a.poly)?;
    let (field, cn, weyl) = match (&sys, a.complex) {
        (AnySystem::Real(f), false) => (Field::Real, linf_norm_real(f, a.k)?, f.weyl_norm()),
        (AnySystem::Real(f), true) => (Field::Complex, linf_norm_complex(f, a.k)?, f.weyl_norm()),
        (AnySystem::Complex(f), _) => (Field::Complex, linf_norm_complex(f, a.k)?, f.weyl_norm()),
    };
    let rec = NormRecord {
        schema_version: SCHEMA_VERSION,
        field,
        n: sys.n(),
        degrees: sys.degrees(),
        norm: Real(cn.upper),
        lower: Real(cn.lower),
        upper: Real(cn.upper),
        k: cn.k,
        grid_level: cn.grid_level,
        grid_size: cn.grid_size,
        weyl: Real(weyl),
    };
    Ok(outcome(to_json(&rec)?, &[&a.poly]))
}

fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| parse_real(t).filter(|x| x.is_finite()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CliError::Usage(format!("{what}: `{s}` is not a list of finite numbers")))
}

/// Coordinates for a system on `S^n`: `n + 1` reals, or `n + 1` interleaved `re, im` pairs.
fn to_point<T: Scalar>(coords: &[f64], n: usize, what: &str) -> Result<Vec<T>, CliError> {
    let pairs = T::FIELD == Field::Complex;
    let expected = if pairs { 2 * (n + 1) } else { n + 1 };
    if coords.len() != expected {
        return Err(CliError::Usage(format!("{what}: expected {expected} coordinates, got {}", coords.len())));
    }
    let v: Vec<T> = if pairs {
        coords.chunks(2).map(|c| T::from_re_im(c[0], c[1])).collect()
    } else {
        coords.iter().map(|&x| T::from_re_im(x, 0.0)).collect()
    };
    normalize(&v).ok_or_else(|| CliError::Usage(format!("{what}: zero vector has no direction")))
}

fn pair(z: Complex64) -> [Real; 2] {
    [Real(z.re), Real(z.im)]
}

fn condition(a: &ConditionArgs) -> Result<Outcome, CliError> {
    let sys = load_poly(&a.poly)?;
    let mut raw: Vec<(String, Vec<f64>)> =
        a.point.iter().map(|s| Ok((format!("--point {s}"), parse_numbers(s, "--point")?))).collect::<Result<_, CliError>>()?;
    let mut inputs = vec![a.poly.as_path()];
    if let Some(p) = &a.points {
        let table = CsvTable::read(p)?;
        for (i, row) in table.rows.iter().enumerate() {
            let what = format!("{} row {}", p.display(), i + 1);
            raw.push((what.clone(), parse_numbers(&row.join(","), &what)?));
        }
        inputs.push(p);
    }
    if raw.is_empty() && !a.global {
        return Err(CliError::Usage("condition needs --point, --points or --global".into()));
    }
    let rec = match &sys {
        AnySystem::Real(f) => {
            let k = a.k.unwrap_or(7);
            let norm = linf_norm_real(f, k)?;
            let global = a.global.then(|| k_estimate(f, k, None)).transpose()?;
            let k_hat = global.as_ref().map(|g| Real(g.k_hat));
            let points = raw
                .iter()
                .map(|(what, c)| {
                    let x: Vec<f64> = to_point(c, f.n(), what)?;
                    let kappa = kappa_local(f, &x)?;
                    let kk = k_local(f, &x, &norm)?;
                    Ok(PointRecord {
                        point: x.iter().map(|&v| pair(Complex64::new(v, 0.0))).collect(),
                        kappa: Real(kappa.value),
                        k_value: Real(kk.value),
                        k_hat,
                        branch: kk.branch,
                        sigma_q: Real(kk.sigma_q),
                        residual: Real(kk.residual),
                    })
                })
                .collect::<Result<_, CliError>>()?;
            ConditionRecord {
                schema_version: SCHEMA_VERSION,
                field: Field::Real,
                k,
                norm_upper: Real(norm.upper),
                norm_lower: Real(norm.lower),
                weyl: Real(f.weyl_norm()),
                points,
                global: global.map(|g| GlobalRecord {
                    k_hat: Real(g.k_hat),
                    grid_max: Real(g.grid_max),
                    levels: g
                        .levels
                        .iter()
                        .map(|l| LevelOut { level: l.level, points: l.points, grid_max: Real(l.grid_max) })
                        .collect(),
                }),
            }
        }
        AnySystem::Complex(f) => {
            if a.global {
                return Err(CliError::Usage("--global needs a real system".into()));
            }
            let k = a.k.unwrap_or(3);
            let norm = linf_norm_complex(f, k)?;
            let points = raw
                .iter()
                .map(|(what, c)| {
                    let z: Vec<Complex64> = to_point(c, f.n(), what)?;
                    let mu = mu_norm(f, &z)?;
                    let m = m_local(f, &z, NormUsed::Certified(norm))?;
                    Ok(PointRecord {
                        point: z.iter().copied().map(pair).collect(),
                        kappa: Real(mu.value),
                        k_value: Real(m.value),
                        k_hat: None,
                        branch: m.branch,
                        sigma_q: Real(m.sigma_q),
                        residual: Real(m.residual),
                    })
                })
                .collect::<Result<_, CliError>>()?;
            ConditionRecord {
                schema_version: SCHEMA_VERSION,
                field: Field::Complex,
                k,
                norm_upper: Real(norm.upper),
                norm_lower: Real(norm.lower),
                weyl: Real(f.weyl_norm()),
                points,
                global: None,
            }
        }
    };
    Ok(outcome(to_json(&rec)?, &inputs))
}

fn betti(a: &BettiArgs) -> Result<Outcome, CliError> {
    let f = load_poly(&a.poly)?.into_real()?;
    let mode = match &a.relaxed {
        None => BettiMode::Full,
        Some(v) => {
            let level = v[0].parse::<u32>().map_err(|_| CliError::Usage(format!("--relaxed: bad level `{}`", v[0])))?;
            let epsilon = parse_real(&v[1])
                .filter(|e| e.is_finite() && *e > 0.0)
                .ok_or_else(|| CliError::Usage(format!("--relaxed: bad epsilon `{}`", v[1])))?;
            BettiMode::Relaxed { level, epsilon }
        }
    };
    let r = polybetti(&f, mode)?;
    let mut out = outcome(String::new(), &[&a.poly]);
    if let Some(p) = &a.dump_cloud {
        let mut t = CsvTable::new((0..=f.n()).map(|i| format!("x{i}")));
        for x in &r.cloud.points {
            t.push(x.iter().map(|&v| format_real(v)).collect());
        }
        t.write(p)?;
        out.outputs.push(path_string(p));
    }
    let rec = BettiRecord {
        schema_version: SCHEMA_VERSION,
        betti: r.betti.0.clone(),
        q_norm: Real(r.norm.upper),
        k_hat: Real(r.k_hat),
        ell: r.level,
        epsilon: Real(r.epsilon),
        cloud_size: r.cloud.len(),
        mode: match r.mode {
            BettiMode::Full => "full".into(),
            BettiMode::Relaxed { .. } => "relaxed".into(),
        },
        k: r.norm.k,
        delta: Real(r.cloud.source_mesh),
        window_lower: Real(r.window.lower),
        window_upper: Real(r.window.upper),
        density: Real(r.window.density),
        simplex_counts: r.nerve.simplex_counts.clone(),
        cloud_file: a.dump_cloud.as_deref().map(path_string),
    };
    out.json = to_json(&rec)?;
    Ok(out)
}

fn box_table(n: usize) -> CsvTable {
    let mut h: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
    h.extend(["width", "clause", "depth"].map(String::from));
    CsvTable::new(h)
}

fn box_row(center: &[f64], width: f64, clause: &str, depth: String) -> Vec<String> {
    let mut row: Vec<String> = center.iter().map(|&c| format_real(c)).collect();
    row.extend([format_real(width), clause.into(), depth]);
    row
}

fn pv(a: &PvArgs) -> Result<Outcome, CliError> {
    let f = load_poly(&a.poly)?.into_real()?;
    if f.q() != 1 {
        return Err(CliError::Usage(format!("pv needs a single equation (q = {})", f.q())));
    }
    let aff = AffinePoly::dehomogenize(&f.components()[0]);
    let mut out = outcome(String::new(), &[&a.poly]);
    out.max_depth = Some(a.max_depth);
    let result = match pv_subdivide(&aff, a.a, a.knorm, a.max_depth) {
        Ok(r) => r,
        Err(NagError::MaxDepth { max_depth, boxes }) => {
            // The unresolved boxes are the useful part of the failure.
            if let Some(p) = &a.boxes {
                let mut t = box_table(aff.n());
                for b in &boxes {
                    t.push(box_row(&b.center, b.width, "unresolved", max_depth.to_string()));
                }
                t.write(p)?;
            }
            return Err(NagError::MaxDepth { max_depth, boxes }.into());
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &a.boxes {
        let mut t = box_table(aff.n());
        for b in &result.accepted {
            let clause = match b.clause {
                Clause::Value => "value",
                Clause::Gradient => "gradient",
            };
            t.push(box_row(&b.cell.center, b.cell.width, clause, b.depth.to_string()));
        }
        t.write(p)?;
        out.outputs.push(path_string(p));
    }
    let value_clause = result.accepted.iter().filter(|b| b.clause == Clause::Value).count() as u64;
    let rec = PvRecord {
        schema_version: SCHEMA_VERSION,
        n: aff.n(),
        degree: aff.degree(),
        a: Real(a.a),
        knorm: a.knorm,
        max_depth: a.max_depth,
        processed: result.stats.processed,
        accepted: result.stats.accepted,
        depth_reached: result.stats.max_depth,
        value_clause,
        gradient_clause: result.stats.accepted - value_clause,
        norm_upper: Real(result.stats.norm.upper),
        norm_lower: Real(result.stats.norm.lower),
        boxes_file: a.boxes.as_deref().map(path_string),
    };
    out.json = to_json(&rec)?;
    Ok(out)
}

fn fast_path(f: FastPathArg) -> FastPath {
    match f {
        FastPathArg::Auto => FastPath::Auto,
        FastPathArg::On => FastPath::On,
        FastPathArg::Off => FastPath::Off,
    }
}

fn solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let f: PolySystem<Complex64> = load_poly(&a.poly)?.to_complex();
    let sol = solve_with(&f, a.seed, fast_path(a.quadratic_fastpath), AlhOptions { max_steps: a.max_steps })?;
    let mut out = outcome(String::new(), &[&a.poly]);
    out.seed = Some(a.seed);
    out.max_steps = Some(a.max_steps);
    if let Some(p) = &a.trace {
        let mut t = CsvTable::new(["step", "t", "dt", "m", "norm_upper", "norm_lower", "displacement"]);
        for (i, s) in sol.trace.steps.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend([s.t, s.dt, s.m, s.norm_upper, s.norm_lower, s.displacement].map(format_real));
            t.push(row);
        }
        t.write(p)?;
        out.outputs.push(path_string(p));
    }
    let step_bound = sol.trace.step_bound();
    out.bounds.insert("step_bound".into(), Real(step_bound));
    let rec = SolveRecord {
        schema_version: SCHEMA_VERSION,
        zero: sol.zero.iter().copied().map(pair).collect(),
        residual: Real(sol.certificate.residual),
        iterations: sol.trace.iterations,
        trace_file: a.trace.as_deref().map(path_string),
        accepted: sol.certificate.accepted,
        displacements: sol.certificate.displacements.iter().copied().map(Real).collect(),
        seed: a.seed,
        path_norm: match sol.trace.path_norm {
            PathNorm::General => "general".into(),
            PathNorm::Quadratic => "quadratic".into(),
        },
        step_bound: Real(step_bound),
        speed_violations: sol.trace.speed_violations(),
    };
    out.json = to_json(&rec)?;
    Ok(out)
}

fn experiment(a: &ExperimentArgs) -> Result<Outcome, CliError> {
    let law: Law = a.law.parse()?;
    let spec = EnsembleSpec::new(law);
    let degrees: Vec<u32> = match a.d.as_slice() {
        // The box-count experiment has one equation.
        [d] if a.kind == ExperimentKind::PvCount => vec![*d],
        [d] => vec![*d; a.q.unwrap_or(a.n)],
        ds => {
            if a.q.is_some_and(|q| q != ds.len()) {
                return Err(CliError::Usage(format!("--q {} disagrees with {} degrees", a.q.unwrap_or(0), ds.len())));
            }
            ds.to_vec()
        }
    };
    let metrics_of = |pairs: &[(&str, f64)]| pairs.iter().map(|(k, v)| (k.to_string(), Real(*v))).collect::<BTreeMap<_, _>>();
    let mut tail = Vec::new();
    let mut law_name = law.name().to_string();
    let (metrics, bounds, holds, values): (BTreeMap<String, Real>, BTreeMap<String, Real>, bool, Vec<TrialRecord>) =
        match a.kind {
            ExperimentKind::Ratio => {
                let s = ratio_statistics(a.n, &degrees, &spec, a.trials, a.seed)?;
                let m = metrics_of(&[
                    ("mean", s.mean),
                    ("std_error", s.std_error),
                    ("second_moment", s.second_moment),
                    ("q10", s.q10),
                    ("median", s.median),
                    ("q90", s.q90),
                    ("max", s.max),
                ]);
                (m, metrics_of(&[("ratio_mean_bound", s.bound)]), s.holds, s.values)
            }
            ExperimentKind::Tail => {
                if a.thresholds.is_empty() {
                    return Err(CliError::Usage("tail experiment needs --thresholds".into()));
                }
                let t = tail_statistics(a.n, &degrees, &spec, a.trials, &a.thresholds, a.seed)?;
                let vals: Vec<f64> = t.values.iter().map(|r| r.value).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let bounds = t.rows.iter().enumerate().map(|(i, r)| (format!("tail_bound_{i}"), Real(r.bound))).collect();
                tail = t
                    .rows
                    .iter()
                    .map(|r| TailRowOut {
                        t: Real(r.t),
                        bound: Real(r.bound),
                        exceedances: r.exceedances,
                        empirical: Real(r.empirical),
                        margin: Real(r.margin),
                        vacuous: r.vacuous,
                        holds: r.holds,
                    })
                    .collect();
                (metrics_of(&[("mean_norm", mean), ("max_norm", max)]), bounds, t.holds(), t.values)
            }
            ExperimentKind::CondRatio => {
                let s = condition_ratio_statistics(a.n, &degrees, &spec, a.trials, a.seed)?;
                let m = metrics_of(&[
                    ("mean", s.mean),
                    ("std_error", s.std_error),
                    ("sandwich_violations", s.sandwich_violations as f64),
                ]);
                (m, metrics_of(&[("ratio_mean_bound", s.bound)]), s.holds, s.values)
            }
            ExperimentKind::PvCount => {
                let [d] = degrees[..] else {
                    return Err(CliError::Usage("pv-count takes a single degree in --d".into()));
                };
                let s = pv_box_count_experiment(a.n, d, &spec, a.trials, a.a, a.seed)?;
                let m = metrics_of(&[("mean", s.mean), ("std_error", s.std_error), ("single_box", s.single_box as f64)]);
                let b = metrics_of(&[("box_count_bound", s.bound), ("weyl_box_count_bound", s.weyl_bound)]);
                (m, b, s.holds, s.values)
            }
            ExperimentKind::HomotopySteps => {
                law_name = Law::KssComplex.name().into();
                let s = homotopy_step_statistics(a.n, &degrees, a.trials, fast_path(a.quadratic_fastpath), a.seed)?;
                let m = metrics_of(&[
                    ("accepted", s.accepted as f64),
                    ("mean_iterations", s.mean_iterations),
                    ("std_error", s.std_error),
                    ("max_iterations", s.max_iterations as f64),
                    ("step_bound_violations", s.step_bound_violations as f64),
                ]);
                let holds = s.accepted == s.trials && s.step_bound_violations == 0;
                (m, metrics_of(&[("shape_n3_d2_log_ed", s.shape)]), holds, s.values)
            }
        };
    let mut out = outcome(String::new(), &[]);
    out.seed = Some(a.seed);
    if let Some(p) = &a.csv {
        let mut t = CsvTable::new(["trial", "value"]);
        for r in &values {
            t.push(vec![r.trial.to_string(), format_real(r.value)]);
        }
        t.write(p)?;
        out.outputs.push(path_string(p));
    }
    out.bounds = bounds.clone();
    let rec = ExperimentRecord {
        schema_version: SCHEMA_VERSION,
        kind: kind_name(a.kind).into(),
        n: a.n,
        degrees,
        law: law_name,
        trials: a.trials,
        seed: a.seed,
        metrics,
        bounds,
        tail,
        holds,
        csv_file: a.csv.as_deref().map(path_string),
    };
    out.json = to_json(&rec)?;
    Ok(out)
}

fn kind_name(k: ExperimentKind) -> &'static str {
    match k {
        ExperimentKind::Ratio => "ratio",
        ExperimentKind::Tail => "tail",
        ExperimentKind::CondRatio => "cond-ratio",
        ExperimentKind::PvCount => "pv-count",
        ExperimentKind::HomotopySteps => "homotopy-steps",
    }
}

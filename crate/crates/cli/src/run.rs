//! Dispatch from a configuration to the library operations.

use std::time::Instant;

use ffkr::kakeya::{self, KakeyaWitness, LineSpec, WolffMode};
use ffkr::restriction::{self, FieldId, PowerConfig, WitnessSpec};
use ffkr::varieties::{self, SurfaceId, SurfaceKind, SurfaceMeasure};
use ffkr::{Exponent, FieldElement, FieldSpec, Grid, Side};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::config::*;
use crate::report::{num, Check, ExperimentReport};
use crate::HarnessError;

/// Runs one experiment and returns its report; checks that fail are recorded, not raised.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let start = Instant::now();
    let mut report = ExperimentReport::new(config);
    match &config.command {
        Command::Restriction(cmd) => restriction_cmd(cmd, config, &mut report)?,
        Command::Verify(VerifyCmd::Identities {
            suite,
            fields,
            trials,
        }) => {
            let fields = fields.clone().unwrap_or_else(FieldList::suite_default);
            verify_identities(*suite, &fields, *trials, config.seed, &mut report)?
        }
        Command::Kakeya(cmd) => kakeya_cmd(cmd, config, &mut report)?,
        Command::Table(TableCmd::Figure1 {
            fields,
            restarts,
            iters,
        }) => crate::figure::figure1_table(fields, *restarts, *iters, config, &mut report)?,
        Command::Cache(CacheCmd::Gc) => return cache_gc(config, &Cache::from_env()),
    }
    report.runtime_ms = start.elapsed().as_millis().to_string();
    Ok(report)
}

pub fn cache_gc(
    config: &ExperimentConfig,
    cache: &Cache,
) -> Result<ExperimentReport, HarnessError> {
    let mut report = ExperimentReport::new(config);
    let removed = cache.gc()?;
    report.data =
        json!({ "directory": cache.dir().display().to_string(), "removed": removed.to_string() });
    Ok(report)
}

fn budget_or(config: &ExperimentConfig, default: u128) -> Result<u128, HarnessError> {
    Ok(config.budget()?.unwrap_or(default))
}

fn build_surface(opts: &SurfaceOpts) -> Result<(FieldSpec, SurfaceMeasure), HarnessError> {
    if opts.surface == SurfaceArg::Parabola && opts.dim != 2 {
        return Err(HarnessError::Config(format!(
            "the parabola lives in dimension 2, got --dim {}",
            opts.dim
        )));
    }
    if opts.include_origin && opts.surface != SurfaceArg::Cone {
        return Err(HarnessError::Config(
            "--include-origin applies to the cone only".into(),
        ));
    }
    let field = opts.field.spec()?;
    let id = SurfaceId {
        kind: opts.surface.kind(),
        n: opts.dim,
        include_origin: opts.include_origin,
    };
    if id.kind == SurfaceKind::Cone && opts.dim != 3 {
        return Err(HarnessError::Config(format!(
            "the cone lives in dimension 3, got --dim {}",
            opts.dim
        )));
    }
    let surface = id.build(&field)?;
    Ok((field, surface))
}

fn describe_surface(
    report: &mut ExperimentReport,
    field: &FieldSpec,
    surface: &SurfaceMeasure,
    p: Exponent,
    q: Exponent,
) {
    report.field = Some(FieldId::of(field));
    report.n = Some(surface.n());
    report.surface = Some(surface.label());
    report.p = Some(p);
    report.q = Some(q);
}

fn push_rechecks(report: &mut ExperimentReport) -> Result<(), HarnessError> {
    let mut checks = Vec::new();
    for c in &report.certificates {
        if let Some(w) = &c.witness {
            let v = c.recheck()?;
            let dev = (v - c.value).abs() / c.value.abs().max(1.0);
            checks.push(Check::within(
                format!("recheck {} {:?} ({} -> {})", w.name, c.method, c.p, c.q),
                dev,
                restriction::RECHECK_TOLERANCE,
            ));
        }
    }
    report.checks.extend(checks);
    Ok(())
}

fn consistency(report: &mut ExperimentReport) {
    let pass = restriction::consistency_check(&report.certificates).is_ok();
    report
        .checks
        .push(Check::new("lower bounds do not exceed upper bounds", pass));
}

fn even_k(p: Exponent, q: Exponent) -> Option<usize> {
    match q.is_even_integer() {
        Some(e) if p == Exponent::int(2) && e >= 2 => Some(e as usize / 2),
        _ => None,
    }
}

fn restriction_cmd(
    cmd: &RestrictionCmd,
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
) -> Result<(), HarnessError> {
    match cmd {
        RestrictionCmd::Estimate {
            surface,
            p,
            q,
            method,
            witness,
            power,
        } => {
            let (field, s) = build_surface(surface)?;
            describe_surface(report, &field, &s, *p, *q);
            let budget = budget_or(config, varieties::DEFAULT_BUDGET)?;
            let cfg = PowerConfig {
                restarts: power.restarts,
                max_iters: power.iters,
                tol: power.tol,
                seed: config.seed,
            };
            match method {
                MethodArg::Closed => report
                    .certificates
                    .push(restriction::rstar_exact_closed(*p, *q, &s)?),
                MethodArg::Even => {
                    let k = even_k(*p, *q).ok_or_else(|| {
                        HarnessError::Config("counting needs p = 2 and an even integer q".into())
                    })?;
                    report
                        .certificates
                        .push(restriction::rstar_upper_even(&s, k, budget)?);
                }
                MethodArg::Power => report
                    .certificates
                    .push(restriction::rstar_lower_power(*p, *q, &s, &cfg)?),
                MethodArg::Witness => {
                    let name = witness.as_deref().ok_or_else(|| {
                        HarnessError::Config("--method witness needs --witness".into())
                    })?;
                    let spec: WitnessSpec = name.parse()?;
                    report
                        .certificates
                        .push(restriction::rstar_lower_witness(*p, *q, &s, &spec)?);
                }
                MethodArg::All => {
                    match restriction::rstar_exact_closed(*p, *q, &s) {
                        Ok(c) => report.certificates.push(c),
                        Err(ffkr::Error::NoClosedForm { .. }) => {}
                        Err(e) => return Err(e.into()),
                    }
                    if let Some(k) = even_k(*p, *q) {
                        report
                            .certificates
                            .push(restriction::rstar_upper_even(&s, k, budget)?);
                    }
                    report
                        .certificates
                        .push(restriction::rstar_lower_power(*p, *q, &s, &cfg)?);
                    report.certificates.push(restriction::rstar_lower_witness(
                        *p,
                        *q,
                        &s,
                        &WitnessSpec::Dirac(0),
                    )?);
                }
            }
            push_rechecks(report)?;
            consistency(report);
        }
        RestrictionCmd::Region { dim, d, k, p, q } => {
            let region = restriction::necessary_region(*dim, *d, *k)?;
            let constraints: Vec<Value> = region
                .constraints
                .iter()
                .map(|c| json!({ "condition": c.describe(), "holds": c.holds(*p, *q) }))
                .collect();
            report.p = Some(*p);
            report.q = Some(*q);
            report.n = Some(*dim as usize);
            report.data = json!({
                "constraints": constraints,
                "in_region": restriction::region_test(&region, *p, *q),
                "on_boundary": restriction::region_boundary(&region, *p, *q),
            });
        }
        RestrictionCmd::Witness {
            surface,
            p,
            q,
            witness,
        } => {
            let (field, s) = build_surface(surface)?;
            describe_surface(report, &field, &s, *p, *q);
            let spec: WitnessSpec = witness.parse()?;
            report
                .certificates
                .push(restriction::rstar_lower_witness(*p, *q, &s, &spec)?);
            if let WitnessSpec::Dirac(_) = spec {
                report.data =
                    json!({ "closed_form": num(restriction::dirac_ratio_formula(&s, *p, *q)) });
            }
            push_rechecks(report)?;
        }
    }
    Ok(())
}

fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn field_label(f: &FieldArg) -> String {
    format!("F_{f}")
}

/// Runs the named identity suites over `fields`, one check per (identity, field, dimension).
pub fn verify_identities(
    suite: Suite,
    fields: &FieldList,
    trials: usize,
    seed: u64,
    report: &mut ExperimentReport,
) -> Result<(), HarnessError> {
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let trials = trials.max(1);
    for fa in &fields.0 {
        let field = fa.spec()?;
        let label = field_label(fa);
        let q = field.order() as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (q << 32));
        if wants(Suite::Gauss) {
            let dev = field
                .elements()
                .skip(1)
                .map(|x| (varieties::gauss_sum(&field, x).norm_sqr() - q as f64).abs())
                .fold(0.0, f64::max);
            report.checks.push(Check::within(
                format!("gauss |S(x)|^2 = |F| {label}"),
                dev,
                1e-6,
            ));
        }
        if wants(Suite::Parseval) {
            for n in 1..=3usize {
                if q.pow(n as u32) > 3000 {
                    continue;
                }
                let (mut defect, mut trip) = (0.0f64, 0.0f64);
                for _ in 0..trials.min(5) {
                    let len = field.space_size(n);
                    let f =
                        Grid::from_values(&field, n, Side::Space, random_complex(&mut rng, len))?;
                    let g =
                        Grid::from_values(&field, n, Side::Space, random_complex(&mut rng, len))?;
                    let scale = f.lp_norm(Exponent::int(2)) * g.lp_norm(Exponent::int(2));
                    defect = defect.max(ffkr::parseval_defect(&f, &g)? / scale);
                    let back = f.fourier_forward()?.fourier_inverse()?;
                    let scale = f.max_abs().max(1.0);
                    let d = f
                        .values()
                        .iter()
                        .zip(back.values())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    trip = trip.max(d / scale);
                }
                report.checks.push(Check::within(
                    format!("parseval {label} n={n}"),
                    defect,
                    1e-9,
                ));
                report.checks.push(Check::within(
                    format!("round trip {label} n={n}"),
                    trip,
                    1e-10,
                ));
            }
        }
        if wants(Suite::ParaboloidKernel) {
            for n in [2usize, 3] {
                if n == 3 && q > 13 {
                    continue;
                }
                let dev = varieties::paraboloid_kernel_formula_check(&field, n)?.max();
                report.checks.push(Check::within(
                    format!("paraboloid kernel closed form {label} n={n}"),
                    dev,
                    1e-9,
                ));
            }
        }
        if wants(Suite::Bridge) && q <= 7 {
            let r = restriction::bridge_identity_checks(&field, 2, trials, rng.gen())?;
            report.checks.push(Check::within(
                format!("bridge embedding {label} n=2"),
                r.embedding,
                1e-8,
            ));
            report.checks.push(Check::within(
                format!("bridge line sum {label} n=2"),
                r.line_sum,
                1e-8,
            ));
            report.checks.push(Check::within(
                format!("bridge cap {label} n=2"),
                r.cap,
                1e-8,
            ));
        }
        if wants(Suite::Pseudoconformal) && q <= 11 {
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let mut g = Grid::zeros(&field, 3, Side::Space);
                let slice = field.space_size(2);
                g.values_mut()[..slice].copy_from_slice(&random_complex(&mut rng, slice));
                worst = worst.max(restriction::br_pseudoconformal_check(&g)?.relative);
            }
            report.checks.push(Check::within(
                format!("pseudo-conformal identity {label} n=3"),
                worst,
                1e-8,
            ));
        }
    }
    Ok(())
}

fn element(field: &FieldSpec, i: u32) -> Result<FieldElement, HarnessError> {
    Ok(field.element(i)?)
}

fn kakeya_set(field: &FieldSpec, n: usize, set: SetArg, seed: u64) -> Result<Grid, HarnessError> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match set {
        SetArg::Besicovitch => kakeya::besicovitch_squares(field, n)?.indicator(field),
        SetArg::Full => Grid::constant(field, n, Side::Space, one),
        SetArg::Point => Grid::delta(field, n, Side::Space, &vec![FieldElement::ZERO; n]),
        SetArg::Line => {
            let line = LineSpec::new(
                vec![FieldElement::ZERO; n - 1],
                vec![FieldElement::ZERO; n - 1],
            )?;
            let mut g = Grid::zeros(field, n, Side::Space);
            for i in line.point_indices(field) {
                g.values_mut()[i] = one;
            }
            g
        }
        SetArg::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals = (0..field.space_size(n))
                .map(|_| {
                    if rng.gen::<bool>() {
                        one
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            Grid::from_values(field, n, Side::Space, vals)?
        }
    })
}

fn kakeya_cmd(
    cmd: &KakeyaCmd,
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
) -> Result<(), HarnessError> {
    match cmd {
        KakeyaCmd::Maximal {
            field,
            dim,
            set,
            points,
            horizontal,
        } => {
            let f = field.spec()?;
            report.field = Some(FieldId::of(&f));
            report.n = Some(*dim);
            let g = match points {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let mut g = Grid::zeros(&f, *dim, Side::Space);
                    for i in kakeya::import_points(&f, *dim, &text)? {
                        g.values_mut()[i] = Complex64::new(1.0, 0.0);
                    }
                    g
                }
                None => kakeya_set(&f, *dim, *set, config.seed)?,
            };
            let star = kakeya::kakeya_maximal(&g)?;
            let q = f.order() as f64;
            let integral = star.iter().all(|v| v.fract() == 0.0 && *v <= q);
            report.checks.push(Check::new(
                "indicator maximal function is an integer at most |F|",
                integral,
            ));
            if points.is_none() && matches!(set, SetArg::Besicovitch | SetArg::Full) {
                report.checks.push(Check::new(
                    "maximal function equals |F| in every direction",
                    star.iter().all(|&v| v == q),
                ));
            }
            let mut data = json!({
                "directions": star.len().to_string(),
                "min": num(star.iter().copied().fold(f64::INFINITY, f64::min)),
                "max": num(star.iter().copied().fold(0.0, f64::max)),
                "values": star.iter().map(|&v| num(v)).collect::<Vec<_>>(),
            });
            if *horizontal {
                let h = kakeya::kakeya_maximal_horizontal(&g)?;
                data["horizontal"] = h
                    .iter()
                    .map(|(w, v)| json!({ "direction": f.point_index(w).to_string(), "value": num(*v) }))
                    .collect();
            }
            report.data = data;
        }
        KakeyaCmd::Besicovitch {
            construct,
            field,
            dim,
            export,
        } => {
            let f = field.spec()?;
            if *construct == Construction::TwoD && *dim != 2 {
                return Err(HarnessError::Config(
                    "the 2d construction needs --dim 2".into(),
                ));
            }
            report.field = Some(FieldId::of(&f));
            report.n = Some(*dim);
            let w = match construct {
                Construction::TwoD => kakeya::besicovitch_2d(&f)?,
                Construction::Squares => kakeya::besicovitch_squares(&f, *dim)?,
            };
            let q = f.order() as u64;
            let expected = q * q.div_ceil(2).pow(*dim as u32 - 1);
            let check = kakeya::verify_besicovitch(&w.set, &f, *dim)?;
            report.checks.push(Check::new(
                format!("|E| = {expected}"),
                w.set.len() as u64 == expected,
            ));
            report.checks.push(Check::new(
                "contains a line in every direction",
                check.is_besicovitch,
            ));
            let contained = w.lines(&f).iter().all(|l| {
                l.point_indices(&f)
                    .iter()
                    .all(|i| w.set.binary_search(i).is_ok())
            });
            report.checks.push(Check::new(
                "every line of the assignment lies in E",
                contained,
            ));
            if let Some(path) = export {
                std::fs::write(path, kakeya::export_points(&w.set))?;
            }
            report.data = json!({
                "size": w.set.len().to_string(),
                "expected": expected.to_string(),
                "density": num(w.set.len() as f64 / f.space_size(*dim) as f64),
                "missing_directions": check.missing.len().to_string(),
            });
        }
        KakeyaCmd::Cordoba { field, dim, trials } => {
            let f = field.spec()?;
            report.field = Some(FieldId::of(&f));
            report.n = Some(*dim);
            let n = *dim;
            let m = f.space_size(n - 1);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut worst = f64::INFINITY;
            for _ in 0..*trials {
                let g: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
                let x0: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
                worst = worst.min(kakeya::cordoba_check(&g, &x0, &f, n)?);
            }
            report.checks.push(Check::new(
                "sqrt 2 bound deficit is non-negative",
                worst >= -1e-9,
            ));
            let p = Exponent::int(2);
            let q = Exponent::int(2 * n as i64 - 2);
            report.p = Some(p);
            report.q = Some(q);
            report
                .certificates
                .push(kakeya::cordoba_upper_certificate(&f, n)?);
            report.certificates.extend(kakeya::kakeya_norm_certificates(
                p,
                q,
                &f,
                n,
                &[
                    KakeyaWitness::Point,
                    KakeyaWitness::Line,
                    KakeyaWitness::FullSpace,
                    KakeyaWitness::BesicovitchIndicator,
                    KakeyaWitness::RandomSets {
                        seed: config.seed,
                        count: 8,
                    },
                ],
            )?);
            push_rechecks(report)?;
            consistency(report);
            report.data = json!({ "trials": trials.to_string(), "min_deficit": num(worst) });
        }
        KakeyaCmd::WolffCheck {
            field,
            family,
            mode,
        } => {
            let f = field.spec()?;
            report.field = Some(FieldId::of(&f));
            report.n = Some(3);
            let lines: Vec<LineSpec> = match family {
                FamilyArg::Heisenberg => kakeya::heisenberg_example(&f)?.lines,
                FamilyArg::Besicovitch => kakeya::besicovitch_squares(&f, 3)?.lines(&f),
                FamilyArg::Parallel => f
                    .elements()
                    .map(|a| {
                        LineSpec::new(vec![a, FieldElement::ZERO], vec![FieldElement::ZERO; 2])
                    })
                    .collect::<Result<_, _>>()?,
            };
            let mode = match mode {
                ModeArg::Pairs => WolffMode::Pairs,
                ModeArg::Exhaustive => WolffMode::Exhaustive,
            };
            let r = kakeya::wolff_axiom_check(&lines, &f, 3, mode)?;
            if *family == FamilyArg::Parallel {
                report.checks.push(Check::new(
                    "parallel family fills one plane",
                    r.max_lines == f.order() as usize,
                ));
            }
            report.data = json!({
                "lines": lines.len().to_string(),
                "max_lines_in_plane": r.max_lines.to_string(),
                "ratio_to_field": num(r.ratio_to_field),
                "planes_examined": r.planes_examined.to_string(),
                "plane": r.plane,
                "mode": r.mode,
            });
        }
        KakeyaCmd::Heisenberg { field } => {
            let f = field.spec()?;
            report.field = Some(FieldId::of(&f));
            report.n = Some(3);
            let h = kakeya::heisenberg_example(&f)?;
            let target = (f.order() as f64).powf(2.5);
            let np = h.points.len() as f64;
            report
                .checks
                .push(Check::new("every line lies in P", h.lines_in_p));
            report.checks.push(Check::new(
                "|P| within a factor 4 of |F|^(5/2)",
                np >= target / 4.0 && np <= 4.0 * target,
            ));
            report.checks.push(Check::new(
                "two lines share a direction",
                h.repeated_direction.is_some(),
            ));
            report.data = json!({
                "points": h.points.len().to_string(),
                "lines": h.lines.len().to_string(),
                "point_ratio": num(h.point_ratio),
                "line_ratio": num(h.line_ratio),
                "distinct_directions": h.distinct_directions.to_string(),
                "repeated_direction": h.repeated_direction.map(|(a, b)| vec![a.to_text(&f), b.to_text(&f)]),
            });
        }
        KakeyaCmd::Sd { field, set, slopes } => {
            let f = field.spec()?;
            report.field = Some(FieldId::of(&f));
            let g: kakeya::PairSet = f
                .elements()
                .map(|x| match set {
                    PairSetArg::Graph => (vec![x], vec![f.mul(x, x)]),
                    PairSetArg::Axis => (vec![x], vec![FieldElement::ZERO]),
                })
                .collect();
            let r = kakeya::slope_projections(&f, &g, &slopes.0)?;
            report.checks.push(Check::new(
                "two-slope bound |G| <= |pi_r(G)| |pi_r'(G)|",
                true,
            ));
            report.data = json!({
                "size": r.size.to_string(),
                "projections": r.projections.iter().map(|(s, k)| json!({ "slope": s.to_string(), "size": k.to_string() })).collect::<Vec<_>>(),
                "alpha_emp": r.alpha_emp.map(num),
                "warnings": r.warnings,
            });
        }
        KakeyaCmd::Slices {
            field,
            dim,
            t0,
            tinf,
            slopes,
        } => {
            let f = field.spec()?;
            report.field = Some(FieldId::of(&f));
            report.n = Some(*dim);
            let w = kakeya::besicovitch_squares(&f, *dim)?;
            let r = kakeya::slices_construction(
                &f,
                &w,
                element(&f, *t0)?,
                element(&f, *tinf)?,
                &slopes.0,
            )?;
            report.checks.push(Check::new(
                "|G| = |F|^(n-1)",
                r.g.len() == f.space_size(dim - 1),
            ));
            report
                .checks
                .push(Check::new("pi_-1 is one-to-one on G", r.injective));
            report.checks.push(Check::new(
                "|pi_r(G)| at most the slice at height t_r",
                r.all_within_slices,
            ));
            report.data = json!({
                "slices": r.slices.iter().map(|(s, t, a, b)| json!({
                    "slope": s.to_string(),
                    "height": t.index().to_string(),
                    "projection": a.to_string(),
                    "slice": b.to_string(),
                })).collect::<Vec<_>>(),
            });
        }
        KakeyaCmd::Implic { a, b, c, dim } => {
            let parse = |s: &str| {
                s.parse::<Rational64>()
                    .map_err(|_| HarnessError::Config(format!("`{s}` is not a rational number")))
            };
            let (p, q) = kakeya::exponent_calculus_implic(parse(a)?, parse(b)?, parse(c)?, *dim)?;
            report.n = Some(*dim as usize);
            report.p = Some(p);
            report.q = Some(q);
            report.data = json!({ "p": p.to_string(), "q": q.to_string() });
        }
    }
    Ok(())
}

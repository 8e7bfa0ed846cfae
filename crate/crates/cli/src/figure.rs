//! The surface summary table: best known exponents next to desk-scale certificates.

use ffkr::restriction::{self, NormCertificate, PowerConfig, WitnessSpec};
use ffkr::varieties::{SurfaceId, SurfaceKind, SurfaceMeasure};
use ffkr::{Exponent, FieldSpec};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, FieldList};
use crate::report::{num, Check, ExperimentReport};
use crate::HarnessError;

const COLUMNS: [&str; 8] = [
    "surface",
    "field",
    "theorem",
    "counterexample",
    "upper",
    "lower",
    "witness",
    "witness_ratio",
];

struct RowSpec {
    label: &'static str,
    id: SurfaceId,
    theorem: &'static str,
    counterexample: &'static str,
    upper: (Exponent, Exponent),
    lowers: Vec<(Exponent, Exponent)>,
    witness: (WitnessSpec, Exponent, Exponent),
}

fn e(n: i64) -> Exponent {
    Exponent::int(n)
}

fn rows_for(field: &FieldSpec) -> Vec<RowSpec> {
    let id = |kind, n| SurfaceId {
        kind,
        n,
        include_origin: false,
    };
    let mut rows = vec![RowSpec {
        label: "n=2, parabola",
        id: id(SurfaceKind::Paraboloid, 2),
        theorem: "R*(2 -> 4)",
        counterexample: "R*(2 -> 4)",
        upper: (e(2), e(4)),
        lowers: vec![(e(2), e(4))],
        witness: (WitnessSpec::Dirac(0), e(2), e(4)),
    }];
    if field.characteristic() > 3 {
        rows.push(RowSpec {
            label: "n=3, moment curve",
            id: id(SurfaceKind::MomentCurve, 3),
            theorem: "R*(2 -> 6)",
            counterexample: "R*(2 -> 6)",
            upper: (e(2), e(6)),
            lowers: vec![(e(2), e(6))],
            witness: (WitnessSpec::Dirac(0), e(2), e(6)),
        });
    }
    if field.minus_one_is_square() {
        rows.push(RowSpec {
            label: "n=3, paraboloid, -1 square",
            id: id(SurfaceKind::Paraboloid, 3),
            theorem: "R*(2 -> 4)",
            counterexample: "R*(3 -> 3)",
            upper: (e(2), e(4)),
            lowers: vec![(e(2), e(4)), (e(3), e(3))],
            witness: (WitnessSpec::Subspace(None), e(3), e(3)),
        });
    } else {
        rows.push(RowSpec {
            label: "n=3, paraboloid, -1 non-square",
            id: id(SurfaceKind::Paraboloid, 3),
            theorem: "R*(8/5 -> 4), R*(2 -> 18/5+)",
            counterexample: "R*(2 -> 3)",
            upper: (e(2), e(4)),
            lowers: vec![(Exponent::ratio(8, 5), e(4)), (e(2), e(4)), (e(2), e(3))],
            witness: (WitnessSpec::Dirac(0), e(2), e(3)),
        });
    }
    rows.push(RowSpec {
        label: "n=3, cone",
        id: id(SurfaceKind::Cone, 3),
        theorem: "R*(2 -> 4)",
        counterexample: "R*(2 -> 4)",
        upper: (e(2), e(4)),
        lowers: vec![(e(2), e(4))],
        witness: (WitnessSpec::DualConeX, e(2), e(4)),
    });
    rows
}

fn cert_summary(c: &NormCertificate) -> String {
    format!(
        "R*({} -> {}) {}",
        c.p,
        c.q,
        ffkr::decimal::to_string(c.value)
    )
}

fn field_name(field: &FieldSpec) -> String {
    format!("F_{}", field.order())
}

/// Builds one row per surface and field, pushing certificates and checks into `report`.
pub fn figure1_table(
    fields: &FieldList,
    restarts: usize,
    iters: usize,
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
) -> Result<(), HarnessError> {
    if fields.0.iter().any(|f| f.k != 1) {
        return Err(HarnessError::Config(
            "the table uses prime fields only".into(),
        ));
    }
    let residues: Vec<u32> = fields.0.iter().map(|f| f.p % 4).collect();
    if !residues.contains(&1) || !residues.contains(&3) {
        return Err(HarnessError::Config(
            "the table needs a prime p = 1 (mod 4) and a prime p = 3 (mod 4)".into(),
        ));
    }
    let budget = config.budget()?.unwrap_or(ffkr::varieties::DEFAULT_BUDGET);
    let power = PowerConfig {
        restarts,
        max_iters: iters,
        tol: 1e-10,
        seed: config.seed,
    };
    let mut rows = Vec::new();
    for fa in &fields.0 {
        let field = fa.spec()?;
        for spec in rows_for(&field) {
            let surface: SurfaceMeasure = spec.id.build(&field)?;
            let (_, uq) = spec.upper;
            let k = uq.is_even_integer().expect("table uppers are even") as usize / 2;
            let mut certs = vec![restriction::rstar_upper_even(&surface, k, budget)?];
            for &(p, q) in &spec.lowers {
                certs.push(restriction::rstar_lower_power(p, q, &surface, &power)?);
            }
            let (w, wp, wq) = &spec.witness;
            let witness = restriction::rstar_lower_witness(*wp, *wq, &surface, w)?;

            let tag = format!("{} {}", spec.label, field_name(&field));
            let mut all = certs.clone();
            all.push(witness.clone());
            report.checks.push(Check::new(
                format!("{tag}: lower bounds do not exceed upper bounds"),
                restriction::consistency_check(&all).is_ok(),
            ));
            let recheck = witness.recheck()?;
            report.checks.push(Check::within(
                format!("{tag}: witness recheck"),
                (recheck - witness.value).abs() / witness.value.max(1.0),
                restriction::RECHECK_TOLERANCE,
            ));

            rows.push(json!({
                "surface": spec.label,
                "field": field_name(&field),
                "theorem": spec.theorem,
                "counterexample": spec.counterexample,
                "upper": cert_summary(&certs[0]),
                "lower": certs[1..].iter().map(cert_summary).collect::<Vec<_>>().join("; "),
                "witness": format!("{} at ({} -> {})", witness.witness.as_ref().map_or("", |w| w.name.as_str()), wp, wq),
                "witness_ratio": num(witness.value),
            }));
            report.certificates.extend(all);
        }
    }
    report.data = json!({ "columns": COLUMNS, "rows": rows });
    Ok(())
}

fn cell(row: &Value, col: &str) -> String {
    match row.get(col) {
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

pub fn render_rows_text(rows: &[Value]) -> String {
    let widths: Vec<usize> = COLUMNS
        .iter()
        .map(|c| {
            rows.iter()
                .map(|r| cell(r, c).chars().count())
                .chain([c.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(COLUMNS.iter().map(|c| c.to_string()).collect());
    out += &line(widths.iter().map(|w| "-".repeat(*w)).collect());
    for r in rows {
        out += &line(COLUMNS.iter().map(|c| cell(r, c)).collect());
    }
    out
}

pub fn render_rows_csv(rows: &[Value]) -> String {
    let quote = |s: String| {
        if s.contains([',', '"', '\n', ';']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    };
    let mut out = COLUMNS.join(",") + "\n";
    for r in rows {
        let cells: Vec<String> = COLUMNS.iter().map(|c| quote(cell(r, c))).collect();
        out += &cells.join(",");
        out.push('\n');
    }
    out
}

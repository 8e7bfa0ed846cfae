//! Lines, Besicovitch sets and the Kakeya maximal operator over `F^n`.
//!
//! A non-horizontal line is `l(x0, v) = {(x0 + v t, t) : t in F}` with base
//! point `x0` and direction `v` in `F^{n-1}`. Directions carry the measure
//! `dv = |F|^{-(n-1)}` times counting measure.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::{FieldElement, FieldSpec};
use crate::grid::{weighted_lp, Grid, Side};
use crate::polynomial::Polynomial;
use crate::restriction::{
    BoundKind, FieldId, Method, NormCertificate, Quantity, WitnessDomain, WitnessRecord,
};
use crate::varieties::collect_indexed;

/// Default cap on enumerated tuples in the incidence counters.
pub const DEFAULT_COUNT_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineSpec {
    pub x0: Vec<FieldElement>,
    pub v: Vec<FieldElement>,
}

impl LineSpec {
    pub fn new(x0: Vec<FieldElement>, v: Vec<FieldElement>) -> Result<Self> {
        if x0.len() != v.len() {
            return Err(Error::ShapeMismatch(
                "base point and direction differ in length".into(),
            ));
        }
        Ok(LineSpec { x0, v })
    }

    /// Ambient dimension `n`.
    pub fn n(&self) -> usize {
        self.x0.len() + 1
    }

    pub fn point_at(&self, field: &FieldSpec, t: FieldElement) -> Vec<FieldElement> {
        let mut p = field.add_vec(&self.x0, &field.scale_vec(t, &self.v));
        p.push(t);
        p
    }

    /// The `|F|` points in order of the parameter `t`.
    pub fn points(&self, field: &FieldSpec) -> Vec<Vec<FieldElement>> {
        field.elements().map(|t| self.point_at(field, t)).collect()
    }

    pub fn point_indices(&self, field: &FieldSpec) -> Vec<usize> {
        field
            .elements()
            .map(|t| field.point_index(&self.point_at(field, t)))
            .collect()
    }

    pub fn contains(&self, field: &FieldSpec, point: &[FieldElement]) -> bool {
        let (x, t) = point.split_at(point.len() - 1);
        self.point_at(field, t[0])
            == x.iter()
                .copied()
                .chain(std::iter::once(t[0]))
                .collect::<Vec<_>>()
    }

    /// `"x0_index v_index"`.
    pub fn to_text(&self, field: &FieldSpec) -> String {
        format!(
            "{} {}",
            field.point_index(&self.x0),
            field.point_index(&self.v)
        )
    }

    pub fn from_text(field: &FieldSpec, n: usize, line: &str) -> Result<Self> {
        let mut it = line.split_whitespace().map(|s| s.parse::<usize>());
        let limit = field.space_size(n - 1);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) if a < limit && b < limit => {
                LineSpec::new(field.point_coords(a, n - 1), field.point_coords(b, n - 1))
            }
            _ => Err(Error::Decode(format!("bad line record `{line}`"))),
        }
    }
}

/// One point index per line.
pub fn export_points(points: &[usize]) -> String {
    points.iter().map(|i| format!("{i}\n")).collect()
}

pub fn import_points(field: &FieldSpec, n: usize, text: &str) -> Result<Vec<usize>> {
    let limit = field.space_size(n);
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| match l.parse::<usize>() {
            Ok(i) if i < limit => Ok(i),
            _ => Err(Error::Decode(format!("bad point record `{l}`"))),
        })
        .collect()
}

pub fn export_lines(field: &FieldSpec, lines: &[LineSpec]) -> String {
    lines.iter().map(|l| l.to_text(field) + "\n").collect()
}

pub fn import_lines(field: &FieldSpec, n: usize, text: &str) -> Result<Vec<LineSpec>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| LineSpec::from_text(field, n, l))
        .collect()
}

/// A set containing the line `l(x0(v), v)` for every direction `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesicovitchWitness {
    pub field: FieldId,
    pub n: usize,
    /// Base point index of the line in direction `v`, listed in direction index order.
    pub assignment: Vec<usize>,
    /// Sorted point indices of the set.
    pub set: Vec<usize>,
}

impl BesicovitchWitness {
    pub fn line(&self, field: &FieldSpec, direction: usize) -> LineSpec {
        LineSpec {
            x0: field.point_coords(self.assignment[direction], self.n - 1),
            v: field.point_coords(direction, self.n - 1),
        }
    }

    pub fn lines(&self, field: &FieldSpec) -> Vec<LineSpec> {
        (0..self.assignment.len())
            .map(|d| self.line(field, d))
            .collect()
    }

    pub fn indicator(&self, field: &FieldSpec) -> Grid {
        let mut g = Grid::zeros(field, self.n, Side::Space);
        for &i in &self.set {
            g.values_mut()[i] = Complex64::new(1.0, 0.0);
        }
        g
    }

    /// Number of points of the set at height `t`.
    pub fn slice_size(&self, field: &FieldSpec, t: FieldElement) -> usize {
        self.set
            .iter()
            .filter(|&&i| field.point_coords(i, self.n)[self.n - 1] == t)
            .count()
    }

    /// The assignment as one base-point index per line.
    pub fn export_assignment(&self) -> String {
        export_points(&self.assignment)
    }
}

/// `E = {(x, t) : x_i + t^2 is a square for every i}`, which contains
/// `l(v^2/4, v)` (squares taken coordinatewise) since
/// `v_i^2/4 + v_i t + t^2 = (t + v_i/2)^2`.
pub fn besicovitch_squares(field: &FieldSpec, n: usize) -> Result<BesicovitchWitness> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(format!("need n >= 2, got {n}")));
    }
    let quarter = field.inv(field.from_int(4))?;
    let m = n - 1;
    let set: Vec<usize> = (0..field.space_size(n))
        .filter(|&i| {
            let c = field.point_coords(i, n);
            let t2 = field.mul(c[m], c[m]);
            c[..m].iter().all(|&x| field.is_square(field.add(x, t2)))
        })
        .collect();
    let assignment = (0..field.space_size(m))
        .map(|d| {
            let v = field.point_coords(d, m);
            let x0: Vec<FieldElement> = v
                .iter()
                .map(|&c| field.mul(field.mul(c, c), quarter))
                .collect();
            field.point_index(&x0)
        })
        .collect();
    Ok(BesicovitchWitness {
        field: FieldId::of(field),
        n,
        assignment,
        set,
    })
}

/// The planar set `{(x, t) : x + t^2 is a square}` of size `(|F|^2 + |F|)/2`.
pub fn besicovitch_2d(field: &FieldSpec) -> Result<BesicovitchWitness> {
    besicovitch_squares(field, 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesicovitchCheck {
    pub is_besicovitch: bool,
    /// Direction indices with no contained line.
    pub missing: Vec<usize>,
    /// Base point index for each direction, when every direction is covered.
    pub assignment: Option<Vec<usize>>,
}

/// Searches, for every direction, the base points in lexicographic order of
/// their coordinates and keeps the first whose line lies in `set`.
pub fn verify_besicovitch(set: &[usize], field: &FieldSpec, n: usize) -> Result<BesicovitchCheck> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(format!("need n >= 2, got {n}")));
    }
    let total = field.space_size(n);
    let mut member = vec![false; total];
    for &i in set {
        if i >= total {
            return Err(Error::InvalidInput(format!(
                "point index {i} outside F^{n}"
            )));
        }
        member[i] = true;
    }
    let m = n - 1;
    let bases = field.space_size(m);
    let lex = |i: usize| -> Vec<FieldElement> {
        let mut c = field.point_coords(i, m);
        c.reverse();
        c
    };
    let found: Vec<Option<usize>> = collect_indexed(bases, |d| {
        let v = field.point_coords(d, m);
        (0..bases).map(&lex).find_map(|x0| {
            let line = LineSpec { x0, v: v.clone() };
            line.point_indices(field)
                .iter()
                .all(|&p| member[p])
                .then(|| field.point_index(&line.x0))
        })
    });
    let missing: Vec<usize> = found
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_none())
        .map(|(d, _)| d)
        .collect();
    let assignment = missing
        .is_empty()
        .then(|| found.into_iter().map(Option::unwrap).collect());
    Ok(BesicovitchCheck {
        is_besicovitch: missing.is_empty(),
        missing,
        assignment,
    })
}

/// Runs [`verify_besicovitch`] on the union of the zero sets of `polys`.
/// Each polynomial must be non-zero of degree at most `polys.len()`.
pub fn variety_besicovitch_probe(
    polys: &[Polynomial],
    field: &FieldSpec,
    n: usize,
) -> Result<BesicovitchCheck> {
    let bound = polys.len() as u32;
    for p in polys {
        if p.is_zero() {
            return Err(Error::NonZeroRequired);
        }
        if p.nvars() != n {
            return Err(Error::ShapeMismatch(format!(
                "polynomial in {} variables, expected {n}",
                p.nvars()
            )));
        }
        if p.degree() > bound {
            return Err(Error::PolynomialDegree {
                degree: p.degree(),
                bound,
            });
        }
    }
    let set: Vec<usize> = (0..field.space_size(n))
        .filter(|&i| {
            let x = field.point_coords(i, n);
            polys.iter().any(|p| p.eval(field, &x).is_zero())
        })
        .collect();
    verify_besicovitch(&set, field, n)
}

fn check_maximal_budget(field: &FieldSpec, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(format!("need n >= 2, got {n}")));
    }
    if n >= 4 && field.order() > 31 {
        let q = field.order() as u128;
        return Err(Error::BudgetExceeded {
            needed: q.pow(2 * (n as u32 - 1) + 1),
            budget: 31u128.pow(2 * (n as u32 - 1) + 1),
        });
    }
    Ok(())
}

/// `f*(v) = max_{x0} sum_{x in l(x0, v)} |f(x)|`, indexed by direction.
pub fn kakeya_maximal(f: &Grid) -> Result<Vec<f64>> {
    if f.side() != Side::Space {
        return Err(Error::WrongSide {
            expected: Side::Space,
            found: f.side(),
        });
    }
    let field = f.field();
    let n = f.n();
    check_maximal_budget(field, n)?;
    let m = n - 1;
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let bases = field.space_size(m);
    let coords: Vec<Vec<FieldElement>> = (0..bases).map(|i| field.point_coords(i, m)).collect();
    Ok(collect_indexed(bases, |d| {
        let v = &coords[d];
        coords
            .iter()
            .map(|x0| {
                field
                    .elements()
                    .map(|t| {
                        let mut p = field.add_vec(x0, &field.scale_vec(t, v));
                        p.push(t);
                        abs[field.point_index(&p)]
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }))
}

/// Maximal line sums along horizontal lines `{(y + w s, t) : s in F}`, one
/// entry per projective direction `w` (last non-zero coordinate equal to 1).
pub fn kakeya_maximal_horizontal(f: &Grid) -> Result<Vec<(Vec<FieldElement>, f64)>> {
    let field = f.field();
    let n = f.n();
    check_maximal_budget(field, n)?;
    let m = n - 1;
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let mut out = Vec::new();
    for wi in 1..field.space_size(m) {
        let w = field.point_coords(wi, m);
        if w.iter().rev().find(|c| !c.is_zero()) != Some(&FieldElement::ONE) {
            continue;
        }
        let mut best = 0.0f64;
        for yi in 0..field.space_size(m) {
            let y = field.point_coords(yi, m);
            for t in field.elements() {
                let s: f64 = field
                    .elements()
                    .map(|s| {
                        let mut p = field.add_vec(&y, &field.scale_vec(s, &w));
                        p.push(t);
                        abs[field.point_index(&p)]
                    })
                    .sum();
                best = best.max(s);
            }
        }
        out.push((w, best));
    }
    Ok(out)
}

fn direction_weight(field: &FieldSpec, n: usize) -> f64 {
    1.0 / field.space_size(n - 1) as f64
}

/// `||f*||_{L^q(dv)} / ||f||_{L^p(dx)}`.
pub fn kakeya_primal_ratio(f: &Grid, p: Exponent, q: Exponent) -> Result<f64> {
    let star: Vec<Complex64> = kakeya_maximal(f)?
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    let num = weighted_lp(&star, direction_weight(f.field(), f.n()), q.to_f64());
    Ok(num / f.lp_norm(p))
}

/// `sum_v g(v) chi_{l(x0(v), v)} dv` as a function on `F^n`.
pub fn line_superposition(field: &FieldSpec, n: usize, g: &[f64], x0map: &[usize]) -> Result<Grid> {
    let m = field.space_size(n - 1);
    if g.len() != m || x0map.len() != m {
        return Err(Error::ShapeMismatch(
            "g and x0 must be indexed by F^{n-1}".into(),
        ));
    }
    if x0map.iter().any(|&i| i >= m) {
        return Err(Error::InvalidInput("base point index out of range".into()));
    }
    let w = direction_weight(field, n);
    let mut out = vec![Complex64::new(0.0, 0.0); field.space_size(n)];
    for d in 0..m {
        let line = LineSpec {
            x0: field.point_coords(x0map[d], n - 1),
            v: field.point_coords(d, n - 1),
        };
        for i in line.point_indices(field) {
            out[i] += g[d] * w;
        }
    }
    Grid::from_values(field, n, Side::Space, out)
}

/// `||sum_v g chi_l dv||_{L^{p'}(dx)} / ||g||_{L^{q'}(dv)}`, the dual form of the estimate.
pub fn kakeya_dual_ratio(
    field: &FieldSpec,
    n: usize,
    g: &[f64],
    x0map: &[usize],
    p: Exponent,
    q: Exponent,
) -> Result<f64> {
    let sup = line_superposition(field, n, g, x0map)?;
    let gc: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let den = weighted_lp(&gc, direction_weight(field, n), q.dual().to_f64());
    Ok(sup.lp_norm(p.dual()) / den)
}

pub(crate) fn recheck_kakeya_witness(
    witness: &WitnessRecord,
    field: &FieldSpec,
    n: usize,
    p: Exponent,
    q: Exponent,
) -> Result<f64> {
    match witness.domain {
        WitnessDomain::Space => {
            let f = witness.grid()?;
            if f.field() != field || f.n() != n {
                return Err(Error::ShapeMismatch(
                    "witness grid does not match the certificate".into(),
                ));
            }
            kakeya_primal_ratio(&f, p, q)
        }
        WitnessDomain::Directions => {
            let g = witness.grid()?;
            let x0map = witness
                .x0map
                .as_ref()
                .ok_or_else(|| Error::Decode("direction witness without base points".into()))?;
            let gv: Vec<f64> = g.values().iter().map(|v| v.re).collect();
            kakeya_dual_ratio(field, n, &gv, x0map, p, q)
        }
        WitnessDomain::Surface => Err(Error::InvalidInput(
            "surface witnesses certify R*, not K".into(),
        )),
    }
}

/// Test functions for lower bounds on `K(p -> q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KakeyaWitness {
    Point,
    Line,
    FullSpace,
    BesicovitchIndicator,
    RandomSets { seed: u64, count: usize },
}

impl std::str::FromStr for KakeyaWitness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "point" => Ok(KakeyaWitness::Point),
            "line" => Ok(KakeyaWitness::Line),
            "full_space" => Ok(KakeyaWitness::FullSpace),
            "besicovitch_indicator" => Ok(KakeyaWitness::BesicovitchIndicator),
            "random_sets" => Ok(KakeyaWitness::RandomSets { seed: 0, count: 16 }),
            _ => Err(Error::UnknownWitness(s.to_string())),
        }
    }
}

/// Closed forms of the point, line and full-space test functions:
/// `1`, `|F|^{1/p' - (n-1)/q}` and `|F|^{1 - n/p}`. The exact line ratio is at
/// least the middle value because transverse directions also see the line.
pub fn kakeya_trivial_formulas(field: &FieldSpec, n: usize, p: Exponent, q: Exponent) -> [f64; 3] {
    let big = field.order() as f64;
    let inv = |e: Exponent| {
        let r = e.reciprocal();
        *r.numer() as f64 / *r.denom() as f64
    };
    let inv_p = inv(p);
    let inv_q = inv(q);
    [
        1.0,
        big.powf(1.0 - inv_p - (n as f64 - 1.0) * inv_q),
        big.powf(1.0 - n as f64 * inv_p),
    ]
}

fn kakeya_cert(
    field: &FieldSpec,
    n: usize,
    p: Exponent,
    q: Exponent,
    kind: BoundKind,
    method: Method,
    value: f64,
) -> NormCertificate {
    NormCertificate {
        quantity: Quantity::KakeyaK,
        p,
        q,
        kind,
        value,
        method,
        derivation: None,
        witness: None,
        seed: None,
        field: FieldId::of(field),
        n,
        surface: None,
        notes: Default::default(),
    }
}

/// Lower certificates for `K(p -> q)`, one per requested witness.
pub fn kakeya_norm_certificates(
    p: Exponent,
    q: Exponent,
    field: &FieldSpec,
    n: usize,
    witnesses: &[KakeyaWitness],
) -> Result<Vec<NormCertificate>> {
    check_maximal_budget(field, n)?;
    let one = Complex64::new(1.0, 0.0);
    let origin = vec![FieldElement::ZERO; n];
    let mut out = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        let (name, f, seed) = match *w {
            KakeyaWitness::Point => ("point", Grid::delta(field, n, Side::Space, &origin), None),
            KakeyaWitness::Line => {
                let line = LineSpec {
                    x0: vec![FieldElement::ZERO; n - 1],
                    v: vec![FieldElement::ZERO; n - 1],
                };
                let mut f = Grid::zeros(field, n, Side::Space);
                for i in line.point_indices(field) {
                    f.values_mut()[i] = one;
                }
                ("line", f, None)
            }
            KakeyaWitness::FullSpace => (
                "full_space",
                Grid::constant(field, n, Side::Space, one),
                None,
            ),
            KakeyaWitness::BesicovitchIndicator => (
                "besicovitch_indicator",
                besicovitch_squares(field, n)?.indicator(field),
                None,
            ),
            KakeyaWitness::RandomSets { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut best: Option<(f64, Grid)> = None;
                for _ in 0..count.max(1) {
                    let vals: Vec<Complex64> = (0..field.space_size(n))
                        .map(|_| {
                            if rng.gen::<bool>() {
                                one
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect();
                    let f = Grid::from_values(field, n, Side::Space, vals)?;
                    if f.max_abs() == 0.0 {
                        continue;
                    }
                    let r = kakeya_primal_ratio(&f, p, q)?;
                    if best.as_ref().is_none_or(|b| r > b.0) {
                        best = Some((r, f));
                    }
                }
                let f = best
                    .map(|b| b.1)
                    .unwrap_or_else(|| Grid::delta(field, n, Side::Space, &origin));
                ("random_sets", f, Some(seed))
            }
        };
        let value = kakeya_primal_ratio(&f, p, q)?;
        let mut cert = kakeya_cert(field, n, p, q, BoundKind::Lower, Method::Witness, value);
        cert.derivation = Some(format!(
            "||f*||_q(dv) / ||f||_p for the {name} test function"
        ));
        cert.witness = Some(WitnessRecord::space(name, &f));
        cert.seed = seed;
        out.push(cert);
    }
    Ok(out)
}

/// The explicit upper bound `K(2 -> 2n - 2) <= sqrt 2`.
pub fn cordoba_upper_certificate(field: &FieldSpec, n: usize) -> Result<NormCertificate> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(format!("need n >= 2, got {n}")));
    }
    let q = Exponent::int(2 * n as i64 - 2);
    let mut cert = kakeya_cert(
        field,
        n,
        Exponent::int(2),
        q,
        BoundKind::Upper,
        Method::ClosedForm,
        2f64.sqrt(),
    );
    cert.derivation = Some("two non-parallel lines meet in at most one point".into());
    Ok(cert)
}

/// `sqrt 2 ||g||_{L^{(2n-2)'}(dv)} - ||sum_v g chi_l dv||_{L^2(dx)}`, non-negative up to rounding.
pub fn cordoba_check(g: &[f64], x0map: &[usize], field: &FieldSpec, n: usize) -> Result<f64> {
    if g.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput("g must be non-negative".into()));
    }
    if n < 2 {
        return Err(Error::UnsupportedDimension(format!("need n >= 2, got {n}")));
    }
    let sup = line_superposition(field, n, g, x0map)?;
    let q_dual = Exponent::int(2 * n as i64 - 2).dual().to_f64();
    let gc: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let gn = weighted_lp(&gc, direction_weight(field, n), q_dual);
    Ok(2f64.sqrt() * gn - sup.lp_norm(Exponent::int(2)))
}

fn check_distinct_lines(lines: &[LineSpec]) -> Result<()> {
    let set: HashSet<&LineSpec> = lines.iter().collect();
    if set.len() != lines.len() {
        return Err(Error::InvalidInput("lines must be distinct".into()));
    }
    Ok(())
}

/// Incidences between points (given by index in `F^n`) and lines.
pub fn incidence_count(
    field: &FieldSpec,
    n: usize,
    points: &[usize],
    lines: &[LineSpec],
) -> Result<u64> {
    check_distinct_lines(lines)?;
    if lines.iter().any(|l| l.n() != n) {
        return Err(Error::ShapeMismatch("line of the wrong dimension".into()));
    }
    let member: HashSet<usize> = points.iter().copied().collect();
    Ok(lines
        .iter()
        .map(|l| {
            l.point_indices(field)
                .iter()
                .filter(|i| member.contains(i))
                .count() as u64
        })
        .sum())
}

/// `min(|P|^{1/2} |L| + |P|, |P| |L|^{1/2} + |L|)`.
pub fn incidence_bound(points: usize, lines: usize) -> f64 {
    let (p, l) = (points as f64, lines as f64);
    (p.sqrt() * l + p).min(p * l.sqrt() + l)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceBoundCheck {
    pub count: u64,
    #[serde(with = "crate::decimal")]
    pub bound: f64,
    pub holds: bool,
}

pub fn incidence_bound_check(
    field: &FieldSpec,
    n: usize,
    points: &[usize],
    lines: &[LineSpec],
) -> Result<IncidenceBoundCheck> {
    let count = incidence_count(field, n, points, lines)?;
    let bound = incidence_bound(points.len(), lines.len());
    Ok(IncidenceBoundCheck {
        count,
        bound,
        holds: count as f64 <= bound,
    })
}

/// Exact counts for the triangle and quadrilateral arguments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCounts {
    /// Incidences `(p, l)` with `p in l`.
    pub i: u64,
    /// Angles `(p, l, l')` at a common point with `l != l'`.
    pub v_prime: u64,
    /// Pointed angles `(p, l, l', p')` with `p' in l'`, `p' != p`.
    pub w: u64,
    /// Pairs of pointed angles sharing `l` and `p'` with distinct `p`.
    pub t_prime: u64,
    /// Quadrilaterals `(p, p', p1, p2, l1, l2, l1', l2')` with `p != p'`.
    pub q_prime: Option<u64>,
    pub points: usize,
    pub lines: usize,
    /// `|V| >= |I|^2 / |P|` with `|V| = |V'| + |I|`.
    pub angle_chain: bool,
    /// `|T| >= |W|^2 / (|P| |L|)` with `|T| = |T'| + |W|`.
    pub triangle_chain: bool,
    /// `|Q| >= |A|^2 / |P|^2`, checked when quadrilaterals are counted.
    pub quadrilateral_chain: Option<bool>,
}

/// Counts `I, V', W, T'` and (when `with_quadrilaterals`) `Q'` exactly.
pub fn incidence_chain_counts(
    field: &FieldSpec,
    n: usize,
    points: &[usize],
    lines: &[LineSpec],
    with_quadrilaterals: bool,
    budget: u128,
) -> Result<ChainCounts> {
    check_distinct_lines(lines)?;
    let needed = points.len() as u128 * lines.len() as u128;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let member: HashMap<usize, usize> = points.iter().enumerate().map(|(j, &i)| (i, j)).collect();
    if member.len() != points.len() {
        return Err(Error::InvalidInput("points must be distinct".into()));
    }
    // Points of P on each line, and lines through each point, as positions.
    let on_line: Vec<Vec<usize>> = lines
        .iter()
        .map(|l| {
            l.point_indices(field)
                .iter()
                .filter_map(|i| member.get(i).copied())
                .collect()
        })
        .collect();
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (li, pts) in on_line.iter().enumerate() {
        for &p in pts {
            through[p].push(li);
        }
    }
    let _ = n;
    let i: u64 = on_line.iter().map(|v| v.len() as u64).sum();
    let v_prime: u64 = through
        .iter()
        .map(|ls| (ls.len() * ls.len().saturating_sub(1)) as u64)
        .sum();
    let mut w = 0u64;
    // For T': N[(l, p')] and N[(l, p', p)].
    let mut by_key: HashMap<(usize, usize), u64> = HashMap::new();
    let mut by_key_p: HashMap<(usize, usize, usize), u64> = HashMap::new();
    for (p, ls) in through.iter().enumerate() {
        for &l in ls {
            for &l2 in ls {
                if l2 == l {
                    continue;
                }
                for &p2 in &on_line[l2] {
                    if p2 == p {
                        continue;
                    }
                    w += 1;
                    *by_key.entry((l, p2)).or_default() += 1;
                    *by_key_p.entry((l, p2, p)).or_default() += 1;
                    if w as u128 > budget {
                        return Err(Error::BudgetExceeded {
                            needed: w as u128,
                            budget,
                        });
                    }
                }
            }
        }
    }
    let t_all: u64 = by_key.values().map(|c| c * c).sum();
    let t_diag: u64 = by_key_p.values().map(|c| c * c).sum();
    let t_prime = t_all - t_diag;

    let np = points.len() as u128;
    let nl = lines.len() as u128;
    let angle_chain = np == 0 || (v_prime as u128 + i as u128) * np >= (i as u128) * (i as u128);
    let triangle_chain =
        np * nl == 0 || (t_prime as u128 + w as u128) * np * nl >= (w as u128) * (w as u128);

    let (q_prime, quadrilateral_chain) = if with_quadrilaterals {
        // A elements (p, p1, p2, l1, l2) grouped by (p1, p2) and by (p1, p2, p).
        let mut by_pair: HashMap<(usize, usize), u64> = HashMap::new();
        let mut by_pair_p: HashMap<(usize, usize, usize), u64> = HashMap::new();
        let mut a = 0u64;
        for (p, ls) in through.iter().enumerate() {
            for &l1 in ls {
                for &l2 in ls {
                    if l1 == l2 {
                        continue;
                    }
                    for &p1 in &on_line[l1] {
                        if p1 == p {
                            continue;
                        }
                        for &p2 in &on_line[l2] {
                            if p2 == p {
                                continue;
                            }
                            a += 1;
                            if a as u128 > budget {
                                return Err(Error::BudgetExceeded {
                                    needed: a as u128,
                                    budget,
                                });
                            }
                            *by_pair.entry((p1, p2)).or_default() += 1;
                            *by_pair_p.entry((p1, p2, p)).or_default() += 1;
                        }
                    }
                }
            }
        }
        let q_all: u128 = by_pair.values().map(|&c| c as u128 * c as u128).sum();
        let q_diag: u128 = by_pair_p.values().map(|&c| c as u128 * c as u128).sum();
        let chain = np == 0 || q_all * np * np >= a as u128 * a as u128;
        (Some((q_all - q_diag) as u64), Some(chain))
    } else {
        (None, None)
    };

    Ok(ChainCounts {
        i,
        v_prime,
        w,
        t_prime,
        q_prime,
        points: points.len(),
        lines: lines.len(),
        angle_chain,
        triangle_chain,
        quadrilateral_chain,
    })
}

/// A plane `{x : normal . x = offset}` in `F^3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Vec<FieldElement>,
    pub offset: FieldElement,
}

impl Plane {
    fn contains_line(&self, field: &FieldSpec, l: &LineSpec) -> bool {
        let mut base = l.x0.clone();
        base.push(FieldElement::ZERO);
        let mut dir = l.v.clone();
        dir.push(FieldElement::ONE);
        field.dot(&self.normal, &base) == self.offset && field.dot(&self.normal, &dir).is_zero()
    }

    /// Scales the normal so its last non-zero coordinate is 1.
    fn normalized(
        field: &FieldSpec,
        normal: Vec<FieldElement>,
        offset: FieldElement,
    ) -> Option<Plane> {
        let lead = *normal.iter().rev().find(|c| !c.is_zero())?;
        let inv = field.inv(lead).ok()?;
        Some(Plane {
            normal: field.scale_vec(inv, &normal),
            offset: field.mul(inv, offset),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WolffMode {
    /// Only planes spanned by two coplanar lines of the family.
    Pairs,
    /// Every plane of `F^3`.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WolffReport {
    pub mode: WolffMode,
    pub max_lines: usize,
    pub plane: Option<Plane>,
    #[serde(with = "crate::decimal")]
    pub ratio_to_field: f64,
    pub planes_examined: usize,
}

fn cross(field: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let m = |x, y| field.mul(x, y);
    vec![
        field.sub(m(a[1], b[2]), m(a[2], b[1])),
        field.sub(m(a[2], b[0]), m(a[0], b[2])),
        field.sub(m(a[0], b[1]), m(a[1], b[0])),
    ]
}

/// The most lines of `lines` lying in a single 2-plane of `F^3`. Pairs mode
/// gives a lower bound on the plane maximum; exhaustive mode is exact and
/// limited to `|F| <= 7`.
pub fn wolff_axiom_check(
    lines: &[LineSpec],
    field: &FieldSpec,
    n: usize,
    mode: WolffMode,
) -> Result<WolffReport> {
    if n != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "the plane count needs n = 3, got {n}"
        )));
    }
    let planes: Vec<Plane> = match mode {
        WolffMode::Exhaustive => {
            if field.order() > 7 {
                return Err(Error::BudgetExceeded {
                    needed: field.order() as u128,
                    budget: 7,
                });
            }
            let mut out = Vec::new();
            for ni in 1..field.space_size(3) {
                let normal = field.point_coords(ni, 3);
                if normal.iter().rev().find(|c| !c.is_zero()) != Some(&FieldElement::ONE) {
                    continue;
                }
                for c in field.elements() {
                    out.push(Plane {
                        normal: normal.clone(),
                        offset: c,
                    });
                }
            }
            out
        }
        WolffMode::Pairs => {
            let mut seen = HashSet::new();
            for (i, a) in lines.iter().enumerate() {
                let mut pa = a.x0.clone();
                pa.push(FieldElement::ZERO);
                let mut da = a.v.clone();
                da.push(FieldElement::ONE);
                for b in &lines[i + 1..] {
                    let mut pb = b.x0.clone();
                    pb.push(FieldElement::ZERO);
                    let mut db = b.v.clone();
                    db.push(FieldElement::ONE);
                    let mut normal = cross(field, &da, &db);
                    if normal.iter().all(|c| c.is_zero()) {
                        // Parallel lines span the plane through a with directions da and pb - pa.
                        normal = cross(field, &da, &field.sub_vec(&pb, &pa));
                    } else if !field.dot(&normal, &field.sub_vec(&pb, &pa)).is_zero() {
                        continue; // skew
                    }
                    if let Some(plane) =
                        Plane::normalized(field, normal.clone(), field.dot(&normal, &pa))
                    {
                        seen.insert(plane);
                    }
                }
            }
            let mut v: Vec<Plane> = seen.into_iter().collect();
            v.sort_by(|a, b| {
                (field.point_index(&a.normal), a.offset.index())
                    .cmp(&(field.point_index(&b.normal), b.offset.index()))
            });
            v
        }
    };
    let counts: Vec<usize> = collect_indexed(planes.len(), |j| {
        lines
            .iter()
            .filter(|l| planes[j].contains_line(field, l))
            .count()
    });
    let mut best: Option<(usize, usize)> = None;
    for (j, &c) in counts.iter().enumerate() {
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((j, c));
        }
    }
    let (plane, max_lines) = match best {
        Some((j, c)) => (Some(planes[j].clone()), c),
        None => (None, 0),
    };
    Ok(WolffReport {
        mode,
        max_lines,
        plane,
        ratio_to_field: max_lines as f64 / field.order() as f64,
        planes_examined: planes.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergReport {
    pub points: Vec<usize>,
    pub lines: Vec<LineSpec>,
    /// `|P| / |F|^{5/2}`.
    #[serde(with = "crate::decimal")]
    pub point_ratio: f64,
    /// `|L| / |F|^2`.
    #[serde(with = "crate::decimal")]
    pub line_ratio: f64,
    pub lines_in_p: bool,
    pub distinct_directions: usize,
    /// Two lines of the family with the same direction.
    pub repeated_direction: Option<(LineSpec, LineSpec)>,
}

/// The Heisenberg configuration over a quadratic extension: points with
/// `Im(z1 conj z2) = Im(z3)` and the lines `l((x1, x2), (v1, v2))` with
/// `Im(v1 conj v2) = Im(x1 conj x2) = 0` and `v1 conj x2 - v2 conj x1 = 1`.
pub fn heisenberg_example(field: &FieldSpec) -> Result<HeisenbergReport> {
    if field.degree() != 2 {
        return Err(Error::NotQuadraticExtension(field.degree()));
    }
    let conj = |z| field.conj(z);
    let im = |z| field.im_part(z);
    let mut points = Vec::new();
    let mut member = vec![false; field.space_size(3)];
    for (idx, slot) in member.iter_mut().enumerate() {
        let z = field.point_coords(idx, 3);
        if im(field.mul(z[0], conj(z[1])?))? == im(z[2])? {
            points.push(idx);
            *slot = true;
        }
    }
    let mut lines = Vec::new();
    for xi in 0..field.space_size(2) {
        let x = field.point_coords(xi, 2);
        if !im(field.mul(x[0], conj(x[1])?))?.is_zero() {
            continue;
        }
        for vi in 0..field.space_size(2) {
            let v = field.point_coords(vi, 2);
            if !im(field.mul(v[0], conj(v[1])?))?.is_zero() {
                continue;
            }
            let lhs = field.sub(field.mul(v[0], conj(x[1])?), field.mul(v[1], conj(x[0])?));
            if lhs == FieldElement::ONE {
                lines.push(LineSpec { x0: x.clone(), v });
            }
        }
    }
    let lines_in_p = lines
        .iter()
        .all(|l| l.point_indices(field).iter().all(|&i| member[i]));
    let mut first_with: HashMap<&[FieldElement], usize> = HashMap::new();
    let mut repeated = None;
    for (j, l) in lines.iter().enumerate() {
        match first_with.get(l.v.as_slice()) {
            Some(&k) if repeated.is_none() => repeated = Some((lines[k].clone(), l.clone())),
            Some(_) => {}
            None => {
                first_with.insert(&l.v, j);
            }
        }
    }
    let q = field.order() as f64;
    Ok(HeisenbergReport {
        point_ratio: points.len() as f64 / q.powf(2.5),
        line_ratio: lines.len() as f64 / (q * q),
        distinct_directions: first_with.len(),
        repeated_direction: repeated,
        lines_in_p,
        points,
        lines,
    })
}

/// A slope `r` for the projection `(a, b) -> a + r b`; `Infinity` means `(a, b) -> b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Slope {
    Finite(Rational64),
    Infinity,
}

impl Slope {
    pub fn int(n: i64) -> Self {
        Slope::Finite(Rational64::from_integer(n))
    }

    /// The field element `a b^{-1}`, or `None` for the infinite slope.
    pub fn to_field(&self, field: &FieldSpec) -> Result<Option<FieldElement>> {
        match self {
            Slope::Infinity => Ok(None),
            Slope::Finite(r) => {
                let (a, b) = (*r.numer(), *r.denom());
                if b <= 0 || b >= field.characteristic() as i64 {
                    return Err(Error::ImproperSlope(format!(
                        "{r}: denominator must lie in (0, char F)"
                    )));
                }
                let v = field.div(field.from_int(a), field.from_int(b))?;
                if v == field.neg(FieldElement::ONE) {
                    return Err(Error::ImproperSlope(format!("{r} reduces to -1")));
                }
                Ok(Some(v))
            }
        }
    }
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Slope::Infinity => write!(f, "inf"),
            Slope::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl From<Slope> for String {
    fn from(s: Slope) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Slope {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl std::str::FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(Slope::Infinity);
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::ImproperSlope(s.to_string()))
        };
        let r = match s.split_once('/') {
            Some((a, b)) => {
                let b = parse(b)?;
                if b == 0 {
                    return Err(Error::ImproperSlope(s.to_string()));
                }
                Rational64::new(parse(a)?, b)
            }
            None => Rational64::from_integer(parse(s)?),
        };
        Ok(Slope::Finite(r))
    }
}

pub type PairSet = Vec<(Vec<FieldElement>, Vec<FieldElement>)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub size: usize,
    /// `(slope, |pi_r(G)|)` after removing slopes that coincide in `F`.
    pub projections: Vec<(Slope, usize)>,
    #[serde(with = "crate::decimal::option")]
    pub alpha_emp: Option<f64>,
    pub warnings: Vec<String>,
}

fn project(
    field: &FieldSpec,
    r: Option<FieldElement>,
    a: &[FieldElement],
    b: &[FieldElement],
) -> Vec<FieldElement> {
    match r {
        None => b.to_vec(),
        Some(r) => field.add_vec(a, &field.scale_vec(r, b)),
    }
}

/// Projection sizes `|pi_r(G)|`, the empirical exponent
/// `log |G| / log max_r |pi_r(G)|` and the two-slope bound `|G| <= |pi_r(G)| |pi_r'(G)|`.
pub fn slope_projections(
    field: &FieldSpec,
    g: &PairSet,
    slopes: &[Slope],
) -> Result<ProjectionReport> {
    let mut diffs = HashSet::new();
    for (a, b) in g {
        if !diffs.insert(field.sub_vec(a, b)) {
            return Err(Error::NotInjective);
        }
    }
    let mut warnings = Vec::new();
    let mut seen: HashMap<Option<FieldElement>, Slope> = HashMap::new();
    let mut projections = Vec::new();
    for &s in slopes {
        let r = s.to_field(field)?;
        if let Some(prev) = seen.get(&r) {
            warnings.push(format!(
                "slope {s} coincides with {prev} in F and was dropped"
            ));
            continue;
        }
        seen.insert(r, s);
        let image: HashSet<Vec<FieldElement>> =
            g.iter().map(|(a, b)| project(field, r, a, b)).collect();
        projections.push((s, image.len()));
    }
    for (i, &(s1, n1)) in projections.iter().enumerate() {
        for &(s2, n2) in &projections[i + 1..] {
            if g.len() > n1 * n2 {
                return Err(Error::ConstraintViolated(format!(
                    "|G| = {} exceeds |pi_{s1}(G)| |pi_{s2}(G)| = {}",
                    g.len(),
                    n1 * n2
                )));
            }
        }
    }
    let max = projections.iter().map(|p| p.1).max().unwrap_or(0);
    let alpha_emp = (max > 1 && !g.is_empty()).then(|| (g.len() as f64).ln() / (max as f64).ln());
    Ok(ProjectionReport {
        size: g.len(),
        projections,
        alpha_emp,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicesReport {
    pub g: PairSet,
    pub injective: bool,
    /// `(slope, height t_r, |pi_r(G)|, slice size at t_r)`.
    pub slices: Vec<(Slope, FieldElement, usize, usize)>,
    pub all_within_slices: bool,
}

/// Builds `G = {(x0(v) + t0 v, x0(v) + t_inf v)}` from a Besicovitch witness and
/// compares each projection with the slice of the set at height
/// `t_r = t0/(r+1) + r t_inf/(r+1)`.
pub fn slices_construction(
    field: &FieldSpec,
    witness: &BesicovitchWitness,
    t0: FieldElement,
    t_inf: FieldElement,
    slopes: &[Slope],
) -> Result<SlicesReport> {
    if t0 == t_inf {
        return Err(Error::DegenerateHeights);
    }
    let m = witness.n - 1;
    let g: PairSet = (0..witness.assignment.len())
        .map(|d| {
            let v = field.point_coords(d, m);
            let x0 = field.point_coords(witness.assignment[d], m);
            (
                field.add_vec(&x0, &field.scale_vec(t0, &v)),
                field.add_vec(&x0, &field.scale_vec(t_inf, &v)),
            )
        })
        .collect();
    let diffs: HashSet<Vec<FieldElement>> = g.iter().map(|(a, b)| field.sub_vec(a, b)).collect();
    let injective = diffs.len() == g.len();
    let mut slices = Vec::new();
    for &s in slopes {
        let r = s.to_field(field)?;
        let height = match r {
            None => t_inf,
            Some(r) => {
                let denom = field.add(r, FieldElement::ONE);
                field.div(field.add(t0, field.mul(r, t_inf)), denom)?
            }
        };
        let image: HashSet<Vec<FieldElement>> =
            g.iter().map(|(a, b)| project(field, r, a, b)).collect();
        slices.push((s, height, image.len(), witness.slice_size(field, height)));
    }
    let all_within_slices = slices.iter().all(|s| s.2 <= s.3);
    Ok(SlicesReport {
        g,
        injective,
        slices,
        all_within_slices,
    })
}

/// From an incidence estimate with exponents `(a, b, c)`, the Kakeya exponents
/// `p = ((n-1) b + c)/a` and `q = min((n-1) p', ((n-1) b + c)/b)`.
pub fn exponent_calculus_implic(
    a: Rational64,
    b: Rational64,
    c: Rational64,
    n: i64,
) -> Result<(Exponent, Exponent)> {
    let zero = Rational64::zero();
    let one = Rational64::one();
    for (name, x) in [("a", a), ("b", b), ("c", c)] {
        if x.is_negative() || x > one {
            return Err(Error::ConstraintViolated(format!(
                "{name} = {x} must lie in [0, 1]"
            )));
        }
    }
    if a == zero || b == zero {
        return Err(Error::ConstraintViolated("a and b must be positive".into()));
    }
    if n < 2 {
        return Err(Error::ConstraintViolated(format!(
            "n = {n} must be at least 2"
        )));
    }
    let s = b * (n - 1) + c;
    if s < one {
        return Err(Error::ConstraintViolated(format!(
            "(n-1)b + c = {s} must be at least 1"
        )));
    }
    let p = Exponent::new(s / a)?;
    let q = match p.dual() {
        Exponent::Infinity => s / b,
        Exponent::Finite(pd) => (pd * (n - 1)).min(s / b),
    };
    Ok((p, Exponent::new(q)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn besicovitch_sizes() {
        for p in [3, 5, 7, 11] {
            let fld = f(p);
            let w = besicovitch_2d(&fld).unwrap();
            assert_eq!(w.set.len() as u32, (p * p + p) / 2);
            assert!(verify_besicovitch(&w.set, &fld, 2).unwrap().is_besicovitch);
        }
        let fld = f(5);
        let w = besicovitch_squares(&fld, 3).unwrap();
        assert_eq!(w.set.len(), 5 * 9);
        assert!(verify_besicovitch(&w.set, &fld, 3).unwrap().is_besicovitch);
    }

    #[test]
    fn single_line_misses_other_directions() {
        let fld = f(5);
        let line = LineSpec::new(vec![FieldElement(1)], vec![FieldElement(2)]).unwrap();
        let r = verify_besicovitch(&line.point_indices(&fld), &fld, 2).unwrap();
        assert_eq!(r.missing.len(), 4);
        assert!(r.assignment.is_none());
    }

    #[test]
    fn maximal_function_values() {
        let fld = f(7);
        let w = besicovitch_2d(&fld).unwrap();
        assert!(kakeya_maximal(&w.indicator(&fld))
            .unwrap()
            .iter()
            .all(|&v| v == 7.0));
        let ones = Grid::constant(&fld, 2, Side::Space, Complex64::new(1.0, 0.0));
        assert!(kakeya_maximal(&ones).unwrap().iter().all(|&v| v == 7.0));
        let big = FieldSpec::prime(37).unwrap();
        let g = Grid::zeros(&big, 4, Side::Space);
        assert!(matches!(
            kakeya_maximal(&g),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn implic_wolff() {
        let r = |a, b| Rational64::new(a, b);
        let (p, q) = exponent_calculus_implic(r(1, 2), r(1, 4), r(3, 4), 3).unwrap();
        assert_eq!((p, q), (Exponent::ratio(5, 2), Exponent::ratio(10, 3)));
        assert!(exponent_calculus_implic(r(1, 2), r(0, 1), r(1, 1), 2).is_err());
    }

    #[test]
    fn slope_parsing() {
        assert_eq!("inf".parse::<Slope>().unwrap(), Slope::Infinity);
        assert_eq!(
            "3/2".parse::<Slope>().unwrap(),
            Slope::Finite(Rational64::new(3, 2))
        );
        assert!("0.5".parse::<Slope>().is_err());
        assert!(Slope::int(-1).to_field(&f(7)).is_err());
    }

    #[test]
    fn two_lines_chain() {
        let fld = f(5);
        let l1 = LineSpec::new(vec![FieldElement(0)], vec![FieldElement(1)]).unwrap();
        let l2 = LineSpec::new(vec![FieldElement(0)], vec![FieldElement(2)]).unwrap();
        let origin = fld.point_index(&[FieldElement(0), FieldElement(0)]);
        let c = incidence_chain_counts(&fld, 2, &[origin], &[l1, l2], true, DEFAULT_COUNT_BUDGET)
            .unwrap();
        assert_eq!(
            (c.i, c.v_prime, c.w, c.t_prime, c.q_prime),
            (2, 2, 0, 0, Some(0))
        );
        assert!(c.angle_chain);
    }
}

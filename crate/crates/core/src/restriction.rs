//! Bounds on the restriction constant `R*(p -> q)` of a surface, plus the
//! exact identities and counterexamples that restriction arguments rely on.
//!
//! `R*(p -> q)` is the norm of the extension operator
//! `g -> (g d sigma)^v` from `L^p(S, d sigma)` to `L^q(F^n, dx)`. Every bound
//! is returned as a [`NormCertificate`]; lower bounds carry a witness whose
//! ratio can be re-evaluated independently with [`NormCertificate::recheck`].

use std::collections::BTreeMap;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
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
use crate::varieties::{
    bochner_riesz_kernel, collect_indexed, cone_counterexample_set, extension, extension_direct,
    surface_sum_table, SurfaceFunction, SurfaceId, SurfaceKind, SurfaceMeasure,
};

/// Relative tolerance used when re-evaluating a stored witness.
pub const RECHECK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    RStar,
    KakeyaK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    PowerIteration,
    EvenCounting,
    Witness,
    TomasStein,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldId {
    pub p: u32,
    pub k: u32,
}

impl FieldId {
    pub fn of(field: &FieldSpec) -> Self {
        FieldId {
            p: field.characteristic(),
            k: field.degree(),
        }
    }

    pub fn build(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.p, self.k)
    }
}

/// What the encoded witness is a function on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessDomain {
    /// A function on the surface (primal form of the estimate).
    Surface,
    /// A function on `F^n` (dual form for `R*`, primal form for `K`).
    Space,
    /// A function on the direction space `F^{n-1}`, paired with base points.
    Directions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub name: String,
    pub domain: WitnessDomain,
    /// Base-64 of the grid or surface-function byte encoding.
    pub data: String,
    /// Base point index for every direction (`Directions` witnesses only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0map: Option<Vec<usize>>,
}

impl WitnessRecord {
    pub fn surface(name: &str, g: &SurfaceFunction) -> Self {
        WitnessRecord {
            name: name.into(),
            domain: WitnessDomain::Surface,
            data: B64.encode(g.to_bytes()),
            x0map: None,
        }
    }

    pub fn space(name: &str, f: &Grid) -> Self {
        WitnessRecord {
            name: name.into(),
            domain: WitnessDomain::Space,
            data: B64.encode(f.to_bytes()),
            x0map: None,
        }
    }

    pub fn directions(name: &str, g: &Grid, x0map: Vec<usize>) -> Self {
        WitnessRecord {
            name: name.into(),
            domain: WitnessDomain::Directions,
            data: B64.encode(g.to_bytes()),
            x0map: Some(x0map),
        }
    }

    pub fn bytes(&self) -> Result<Vec<u8>> {
        B64.decode(&self.data)
            .map_err(|e| Error::Decode(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::from_bytes(&self.bytes()?)
    }

    pub fn surface_function(&self, surface: &SurfaceMeasure) -> Result<SurfaceFunction> {
        SurfaceFunction::from_bytes(surface, &self.bytes()?)
    }
}

/// A certified value for `R*(p -> q)` or `K(p -> q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub quantity: Quantity,
    pub p: Exponent,
    pub q: Exponent,
    pub kind: BoundKind,
    #[serde(with = "crate::decimal")]
    pub value: f64,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub field: FieldId,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl NormCertificate {
    fn rstar(
        surface: &SurfaceMeasure,
        p: Exponent,
        q: Exponent,
        kind: BoundKind,
        method: Method,
        value: f64,
    ) -> Self {
        NormCertificate {
            quantity: Quantity::RStar,
            p,
            q,
            kind,
            value,
            method,
            derivation: None,
            witness: None,
            seed: None,
            field: FieldId::of(surface.field()),
            n: surface.n(),
            surface: Some(surface.id()),
            notes: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))
    }

    /// Re-evaluates the witness ratio from scratch by direct summation.
    pub fn recheck(&self) -> Result<f64> {
        let witness = self
            .witness
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("certificate carries no witness".into()))?;
        let field = self.field.build()?;
        match self.quantity {
            Quantity::RStar => {
                let id = self
                    .surface
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("R* certificate without surface".into()))?;
                let surface = id.build(&field)?;
                match witness.domain {
                    WitnessDomain::Surface => {
                        let g = witness.surface_function(&surface)?;
                        Ok(primal_ratio_direct(&g, self.p, self.q))
                    }
                    WitnessDomain::Space => {
                        dual_ratio_direct(&witness.grid()?, &surface, self.p, self.q)
                    }
                    WitnessDomain::Directions => Err(Error::InvalidInput(
                        "direction witnesses certify K, not R*".into(),
                    )),
                }
            }
            Quantity::KakeyaK => {
                crate::kakeya::recheck_kakeya_witness(witness, &field, self.n, self.p, self.q)
            }
        }
    }

    /// True when the stored value is reproduced by [`NormCertificate::recheck`].
    pub fn verify(&self) -> Result<bool> {
        let v = self.recheck()?;
        Ok((v - self.value).abs() <= RECHECK_TOLERANCE * self.value.abs().max(1.0))
    }
}

/// Checks that no lower bound exceeds an upper bound for the same quantity.
/// Exact certificates count on both sides.
pub fn consistency_check(certs: &[NormCertificate]) -> Result<()> {
    for lo in certs.iter().filter(|c| c.kind != BoundKind::Upper) {
        for hi in certs.iter().filter(|c| c.kind != BoundKind::Lower) {
            let same = lo.quantity == hi.quantity
                && lo.p == hi.p
                && lo.q == hi.q
                && lo.field == hi.field
                && lo.n == hi.n
                && lo.surface == hi.surface;
            if same && lo.value > hi.value + 1e-9 {
                return Err(Error::ConstraintViolated(format!(
                    "{:?} {:?} value {} exceeds {:?} {:?} value {} at ({}, {})",
                    lo.kind, lo.method, lo.value, hi.kind, hi.method, hi.value, lo.p, lo.q
                )));
            }
        }
    }
    Ok(())
}

fn norm_on_surface(g: &SurfaceFunction, p: Exponent) -> f64 {
    g.lp_norm(p)
}

/// `||(g d sigma)^v||_q / ||g||_{L^p(d sigma)}` with the extension summed directly.
pub fn primal_ratio_direct(g: &SurfaceFunction, p: Exponent, q: Exponent) -> f64 {
    extension_direct(g).lp_norm(q) / norm_on_surface(g, p)
}

/// `||f^||_{L^{p'}(S, d sigma)} / ||f||_{L^{q'}(dx)}` with `f^` summed directly at the surface points.
pub fn dual_ratio_direct(
    f: &Grid,
    surface: &SurfaceMeasure,
    p: Exponent,
    q: Exponent,
) -> Result<f64> {
    if f.side() != Side::Space {
        return Err(Error::WrongSide {
            expected: Side::Space,
            found: f.side(),
        });
    }
    if f.n() != surface.n() || f.field() != surface.field() {
        return Err(Error::ShapeMismatch(
            "witness and surface dimensions differ".into(),
        ));
    }
    let field = surface.field();
    let support: Vec<(Vec<FieldElement>, Complex64)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(i, &v)| (field.point_coords(i, f.n()), v))
        .collect();
    let restricted: Vec<Complex64> = collect_indexed(surface.len(), |j| {
        let xi = surface.point(j);
        support
            .iter()
            .map(|(x, v)| v * field.e(field.neg(field.dot(x, xi))))
            .sum()
    });
    let num = weighted_lp(&restricted, 1.0 / surface.len() as f64, p.dual().to_f64());
    Ok(num / f.lp_norm(q.dual()))
}

/// Closed forms: `R*(p -> inf) = 1` and `R*(p -> 2) = (|F|^n / |S|)^{1/2}` for `p >= 2`.
pub fn rstar_exact_closed(
    p: Exponent,
    q: Exponent,
    surface: &SurfaceMeasure,
) -> Result<NormCertificate> {
    let (value, tag) = if q.is_infinite() {
        (
            1.0,
            "R*(p -> inf) = 1 by the triangle inequality, attained at x = 0 by g = 1",
        )
    } else if q == Exponent::int(2) && p >= Exponent::int(2) {
        let ratio = surface.field().space_size(surface.n()) as f64 / surface.len() as f64;
        (
            ratio.sqrt(),
            "R*(p -> 2) = (|F|^n/|S|)^{1/2} for p >= 2 by Plancherel and Holder",
        )
    } else {
        return Err(Error::NoClosedForm {
            p: p.to_string(),
            q: q.to_string(),
        });
    };
    let mut cert =
        NormCertificate::rstar(surface, p, q, BoundKind::Exact, Method::ClosedForm, value);
    cert.derivation = Some(tag.into());
    Ok(cert)
}

/// Solution counts for `eta = xi_1 + ... + xi_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenCount {
    pub k: usize,
    /// Maximum over all `eta`.
    pub a_all: u64,
    /// Maximum over `eta != 0`.
    pub a_nonzero: u64,
    /// Constant actually used in the bound.
    pub a_used: u64,
}

/// Exact solution-count maxima for the even-exponent bound. For `k = 2` the
/// `eta = 0` term is at most `||g||_2^4` by Cauchy-Schwarz, which allows
/// `A = min(a_all, a_nonzero + 1)`; this is what tames the cone.
pub fn even_count(surface: &SurfaceMeasure, k: usize, budget: u128) -> Result<EvenCount> {
    let table = surface_sum_table(surface, k, budget)?;
    let a_all = table.iter().copied().max().unwrap_or(0);
    let a_nonzero = table.iter().skip(1).copied().max().unwrap_or(0);
    let a_used = if k == 2 {
        a_all.min(a_nonzero + 1)
    } else {
        a_all
    };
    Ok(EvenCount {
        k,
        a_all,
        a_nonzero,
        a_used,
    })
}

/// `A^{1/2k} |F|^{n/2k} |S|^{-1/2}`.
pub fn even_bound_value(surface: &SurfaceMeasure, k: usize, a: u64) -> f64 {
    let q = surface.field().order() as f64;
    let n = surface.n() as f64;
    let kk = k as f64;
    (a as f64).powf(0.5 / kk) * q.powf(n / (2.0 * kk)) * (surface.len() as f64).powf(-0.5)
}

/// Upper certificate for `R*(2 -> 2k)` from the exact solution count.
pub fn rstar_upper_even(
    surface: &SurfaceMeasure,
    k: usize,
    budget: u128,
) -> Result<NormCertificate> {
    let count = even_count(surface, k, budget)?;
    let mut cert = rstar_upper_even_with_a(surface, k, count.a_used);
    cert.notes.insert("a_all".into(), count.a_all.to_string());
    cert.notes
        .insert("a_nonzero".into(), count.a_nonzero.to_string());
    Ok(cert)
}

/// Upper certificate for `R*(2 -> 2k)` from a caller-supplied solution bound `a`.
pub fn rstar_upper_even_with_a(surface: &SurfaceMeasure, k: usize, a: u64) -> NormCertificate {
    let mut cert = NormCertificate::rstar(
        surface,
        Exponent::int(2),
        Exponent::int(2 * k as i64),
        BoundKind::Upper,
        Method::EvenCounting,
        even_bound_value(surface, k, a),
    );
    cert.derivation = Some(format!(
        "A^(1/{0}) |F|^(n/{0}) |S|^(-1/2) with A = {a}",
        2 * k
    ));
    cert.notes.insert("a".into(), a.to_string());
    cert
}

/// Settings for [`rstar_lower_power`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            restarts: 32,
            max_iters: 500,
            tol: 1e-10,
            seed: 0,
        }
    }
}

struct Ascent {
    value: f64,
    g: Vec<Complex64>,
    iterations: usize,
    converged: bool,
}

fn phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Maps `v` to the extremal dual vector of `L^r`: `|v|^{r-1} phase(v)`,
/// or a unit spike at the largest entry when `r = inf`.
fn dual_direction(values: &[Complex64], r: f64) -> Vec<Complex64> {
    if r.is_infinite() {
        let (imax, _) = values.iter().enumerate().fold((0, -1.0), |acc, (i, v)| {
            if v.norm() > acc.1 {
                (i, v.norm())
            } else {
                acc
            }
        });
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        out[imax] = phase(values[imax]);
        if out[imax].norm() == 0.0 {
            out[imax] = Complex64::new(1.0, 0.0);
        }
        return out;
    }
    values
        .iter()
        .map(|&v| phase(v) * v.norm().powf(r - 1.0))
        .collect()
}

fn ascend(
    surface: &SurfaceMeasure,
    p: Exponent,
    q: Exponent,
    cfg: &PowerConfig,
    restart: usize,
) -> Result<Ascent> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let two_pi = std::f64::consts::TAU;
    let mut g = SurfaceFunction::new(
        surface,
        (0..surface.len())
            .map(|_| Complex64::from_polar(1.0, two_pi * rng.gen::<f64>()))
            .collect(),
    )?;
    let qf = q.to_f64();
    let p_dual = p.dual().to_f64();
    let ratio = |g: &SurfaceFunction| -> Result<(f64, Grid)> {
        let u = extension(g)?;
        Ok((u.lp_norm(q) / g.lp_norm(p), u))
    };
    let (mut value, mut u) = ratio(&g)?;
    let mut best = Ascent {
        value,
        g: g.values.clone(),
        iterations: 0,
        converged: false,
    };
    for it in 1..=cfg.max_iters {
        let w = Grid::from_values(
            surface.field(),
            surface.n(),
            Side::Space,
            dual_direction(u.values(), qf),
        )?;
        let h = crate::varieties::restriction(&w.fourier_forward()?, surface)?;
        let mut next = dual_direction(&h.values, p_dual);
        let norm = weighted_lp(&next, 1.0 / next.len() as f64, p.to_f64());
        if norm == 0.0 {
            break;
        }
        for v in &mut next {
            *v /= norm;
        }
        g = SurfaceFunction::new(surface, next)?;
        let (new_value, new_u) = ratio(&g)?;
        let change = (new_value - value).abs();
        value = new_value;
        u = new_u;
        if value > best.value {
            best.value = value;
            best.g = g.values.clone();
        }
        best.iterations = it;
        if change <= cfg.tol * value {
            best.converged = true;
            break;
        }
    }
    Ok(best)
}

/// Lower bound for `R*(p -> q)` by alternating dual-norm ascent with random
/// restarts. The reported value is re-evaluated from the best witness by
/// direct summation, so it is a valid lower bound however the ascent behaves.
pub fn rstar_lower_power(
    p: Exponent,
    q: Exponent,
    surface: &SurfaceMeasure,
    cfg: &PowerConfig,
) -> Result<NormCertificate> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidInput(
            "at least one restart is required".into(),
        ));
    }
    if q.is_infinite() {
        // The plane wave e(-x0 . xi) with x0 = 0 attains |(g d sigma)^v(0)| = ||g||_p = 1.
        let g = SurfaceFunction::constant(surface, Complex64::new(1.0, 0.0));
        let mut cert = NormCertificate::rstar(
            surface,
            p,
            q,
            BoundKind::Lower,
            Method::PowerIteration,
            primal_ratio_direct(&g, p, q),
        );
        cert.witness = Some(WitnessRecord::surface("plane_wave", &g));
        cert.seed = Some(cfg.seed);
        cert.notes.insert("converged".into(), "true".into());
        cert.notes.insert("iterations".into(), "0".into());
        return Ok(cert);
    }
    let runs: Vec<Result<Ascent>> =
        collect_indexed(cfg.restarts, |r| ascend(surface, p, q, cfg, r));
    let mut best: Option<(usize, Ascent)> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        if best.as_ref().is_none_or(|(_, b)| run.value > b.value) {
            best = Some((i, run));
        }
    }
    let (index, run) = best.expect("restarts >= 1");
    let g = SurfaceFunction::new(surface, run.g)?;
    let mut cert = NormCertificate::rstar(
        surface,
        p,
        q,
        BoundKind::Lower,
        Method::PowerIteration,
        primal_ratio_direct(&g, p, q),
    );
    cert.witness = Some(WitnessRecord::surface("power_iteration", &g));
    cert.seed = Some(cfg.seed);
    cert.notes
        .insert("converged".into(), run.converged.to_string());
    cert.notes
        .insert("iterations".into(), run.iterations.to_string());
    cert.notes.insert("best_restart".into(), index.to_string());
    cert.notes
        .insert("restarts".into(), cfg.restarts.to_string());
    Ok(cert)
}

/// Named test functions for lower bounds.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessSpec {
    /// Indicator of the surface point with the given position.
    Dirac(usize),
    Constant,
    /// Indicator of an affine line `{a + t b}` inside the surface; searched for when `None`.
    Subspace(Option<(Vec<FieldElement>, Vec<FieldElement>)>),
    /// The dual witness `f = chi_X` for the cone.
    DualConeX,
}

impl std::str::FromStr for WitnessSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dirac" => Ok(WitnessSpec::Dirac(0)),
            "constant" => Ok(WitnessSpec::Constant),
            "subspace" => Ok(WitnessSpec::Subspace(None)),
            "dual_cone_x" => Ok(WitnessSpec::DualConeX),
            _ => Err(Error::UnknownWitness(s.to_string())),
        }
    }
}

/// Finds an affine line `{a + t b : t in F}` contained in the surface, scanning base
/// points in surface order and directions `b` normalized to have leading coordinate 1.
pub fn find_affine_line(
    surface: &SurfaceMeasure,
) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    if surface.len() > 10_000 {
        return Err(Error::BudgetExceeded {
            needed: surface.len() as u128,
            budget: 10_000,
        });
    }
    let field = surface.field();
    let n = surface.n();
    for a in surface.points() {
        for bi in 1..field.space_size(n) {
            let b = field.point_coords(bi, n);
            let lead = b.iter().rev().find(|c| !c.is_zero()).copied().unwrap();
            if lead != FieldElement::ONE {
                continue;
            }
            let inside = field
                .elements()
                .all(|t| surface.contains(&field.add_vec(a, &field.scale_vec(t, &b))));
            if inside {
                return Ok((a.to_vec(), b));
            }
        }
    }
    Err(Error::SubspaceNotFound)
}

/// Lower certificate from a named witness, evaluated exactly.
pub fn rstar_lower_witness(
    p: Exponent,
    q: Exponent,
    surface: &SurfaceMeasure,
    witness: &WitnessSpec,
) -> Result<NormCertificate> {
    let field = surface.field();
    let one = Complex64::new(1.0, 0.0);
    let (name, record, value) = match witness {
        WitnessSpec::Dirac(i) => {
            if *i >= surface.len() {
                return Err(Error::InvalidInput(format!("surface has no point {i}")));
            }
            let g = SurfaceFunction::delta(surface, *i);
            (
                "dirac",
                WitnessRecord::surface("dirac", &g),
                primal_ratio_direct(&g, p, q),
            )
        }
        WitnessSpec::Constant => {
            let g = SurfaceFunction::constant(surface, one);
            (
                "constant",
                WitnessRecord::surface("constant", &g),
                primal_ratio_direct(&g, p, q),
            )
        }
        WitnessSpec::Subspace(line) => {
            let (a, b) = match line {
                Some(l) => l.clone(),
                None => find_affine_line(surface)?,
            };
            let mut values = vec![Complex64::new(0.0, 0.0); surface.len()];
            for t in field.elements() {
                let pt = field.add_vec(&a, &field.scale_vec(t, &b));
                let j = surface.position(&pt).ok_or(Error::SubspaceNotFound)?;
                values[j] = one;
            }
            let g = SurfaceFunction::new(surface, values)?;
            (
                "subspace",
                WitnessRecord::surface("subspace", &g),
                primal_ratio_direct(&g, p, q),
            )
        }
        WitnessSpec::DualConeX => {
            if surface.kind() != SurfaceKind::Cone {
                return Err(Error::InvalidInput("dual_cone_X needs the cone".into()));
            }
            let mut f = Grid::zeros(field, 3, Side::Space);
            for pt in cone_counterexample_set(field) {
                f.set(&pt, one);
            }
            let value = dual_ratio_direct(&f, surface, p, q)?;
            (
                "dual_cone_X",
                WitnessRecord::space("dual_cone_X", &f),
                value,
            )
        }
    };
    let mut cert = NormCertificate::rstar(surface, p, q, BoundKind::Lower, Method::Witness, value);
    cert.derivation = Some(format!("ratio of the {name} witness"));
    cert.witness = Some(record);
    Ok(cert)
}

/// Closed-form ratio of the Dirac witness: `|S|^{1/p - 1} |F|^{n/q}`.
pub fn dirac_ratio_formula(surface: &SurfaceMeasure, p: Exponent, q: Exponent) -> f64 {
    let s = surface.len() as f64;
    let big = surface.field().space_size(surface.n()) as f64;
    s.powf(p.reciprocal_f64() - 1.0) * big.powf(q.reciprocal_f64())
}

/// Lower bound `|F|^{-n (1/2 - 1/q)_+} (|F|^n / |S|)^{1/2}` on the true constant.
pub fn junk_lower_bound(surface: &SurfaceMeasure, q: Exponent) -> f64 {
    let big = surface.field().space_size(surface.n()) as f64;
    let gap = (0.5 - q.reciprocal_f64()).max(0.0);
    big.powf(-gap) * (big / surface.len() as f64).sqrt()
}

/// `R*(2 -> q) |S|^{1/2} |F|^{-n/q}`, the quantity that stays bounded when
/// the characters of `S` behave like a Lambda(q) set.
pub fn lambda_q_ratio(surface: &SurfaceMeasure, q: Exponent, rstar: f64) -> f64 {
    let big = surface.field().space_size(surface.n()) as f64;
    rstar * (surface.len() as f64).sqrt() * big.powf(-q.reciprocal_f64())
}

trait ReciprocalF64 {
    fn reciprocal_f64(&self) -> f64;
}

impl ReciprocalF64 for Exponent {
    fn reciprocal_f64(&self) -> f64 {
        let r = self.reciprocal();
        *r.numer() as f64 / *r.denom() as f64
    }
}

/// One necessary condition for boundedness of `R*(p -> q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// `q >= 2n/d`.
    Mass { n: i64, d: i64 },
    /// `q >= n p' / d`.
    Dirac { n: i64, d: i64 },
    /// `q >= p' (n-k)/(d-k)`.
    Subspace { n: i64, d: i64, k: i64 },
}

impl Constraint {
    /// Largest admissible `1/q` as a function of `1/p`.
    fn max_inv_q(&self, inv_p: Rational64) -> Rational64 {
        let inv_p_dual = Rational64::one() - inv_p;
        match *self {
            Constraint::Mass { n, d } => Rational64::new(d, 2 * n),
            Constraint::Dirac { n, d } => inv_p_dual * Rational64::new(d, n),
            Constraint::Subspace { n, d, k } => inv_p_dual * Rational64::new(d - k, n - k),
        }
    }

    /// `Less` when violated, `Equal` on the boundary, `Greater` with slack.
    pub fn evaluate(&self, p: Exponent, q: Exponent) -> std::cmp::Ordering {
        self.max_inv_q(p.reciprocal()).cmp(&q.reciprocal())
    }

    pub fn holds(&self, p: Exponent, q: Exponent) -> bool {
        self.evaluate(p, q) != std::cmp::Ordering::Less
    }

    pub fn describe(&self) -> String {
        match *self {
            Constraint::Mass { n, d } => format!("q >= 2n/d = {}", Rational64::new(2 * n, d)),
            Constraint::Dirac { n, d } => format!("q >= n p'/d = ({}) p'", Rational64::new(n, d)),
            Constraint::Subspace { n, d, k } => {
                format!(
                    "q >= p'(n-k)/(d-k) = ({}) p'",
                    Rational64::new(n - k, d - k)
                )
            }
        }
    }
}

/// Exponent pairs allowed by the necessary conditions for a surface of
/// dimension `d` in `F^n`, optionally containing a `k`-dimensional affine subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentRegion {
    pub n: i64,
    pub d: i64,
    pub k_subspace: Option<i64>,
    pub constraints: Vec<Constraint>,
}

pub fn necessary_region(n: i64, d: i64, k_subspace: Option<i64>) -> Result<ExponentRegion> {
    if !(0 < d && d < n) {
        return Err(Error::InvalidInput(format!(
            "need 0 < d < n, got d = {d}, n = {n}"
        )));
    }
    let mut constraints = vec![Constraint::Mass { n, d }, Constraint::Dirac { n, d }];
    if let Some(k) = k_subspace {
        if !(0 <= k && k < d) {
            return Err(Error::InvalidInput(format!("need 0 <= k < d, got k = {k}")));
        }
        constraints.push(Constraint::Subspace { n, d, k });
    }
    Ok(ExponentRegion {
        n,
        d,
        k_subspace,
        constraints,
    })
}

pub fn region_test(region: &ExponentRegion, p: Exponent, q: Exponent) -> bool {
    region.constraints.iter().all(|c| c.holds(p, q))
}

/// True when `(p, q)` satisfies every constraint and at least one with equality.
pub fn region_boundary(region: &ExponentRegion, p: Exponent, q: Exponent) -> bool {
    region_test(region, p, q)
        && region
            .constraints
            .iter()
            .any(|c| c.evaluate(p, q) == std::cmp::Ordering::Equal)
}

/// Output of the interpolation step, which holds only up to an absolute constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeBound {
    pub method: Method,
    pub p: Exponent,
    /// The improved exponent `q / theta`.
    pub q: Exponent,
    #[serde(with = "crate::decimal")]
    pub value: f64,
    pub label: String,
}

/// `1 + base^theta |F|^{-d~ (1 - theta)/4}` for `R*(p -> q/theta)`.
pub fn tomas_stein_bound(
    base: &NormCertificate,
    theta: Rational64,
    d_tilde: f64,
    field_order: u32,
) -> Result<ShapeBound> {
    let zero = Rational64::zero();
    if theta <= zero || theta >= Rational64::one() {
        return Err(Error::InvalidInput(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    if base.p < Exponent::int(2) || base.q < Exponent::int(2) {
        return Err(Error::InvalidInput(
            "the interpolation step needs p, q >= 2".into(),
        ));
    }
    let th = *theta.numer() as f64 / *theta.denom() as f64;
    let value = 1.0 + base.value.powf(th) * (field_order as f64).powf(-d_tilde * (1.0 - th) / 4.0);
    let q = Exponent::from_reciprocal(base.q.reciprocal() * theta)?;
    Ok(ShapeBound {
        method: Method::TomasStein,
        p: base.p,
        q,
        value,
        label: "up to an absolute constant".into(),
    })
}

/// If `R*(p -> q) ~ |F|^beta`, the `theta` at which the two summands of the
/// interpolation bound balance, and the resulting exponent `q / theta`.
pub fn tomas_stein_balance(
    q: Rational64,
    beta: Rational64,
    d_tilde: Rational64,
) -> Result<(Rational64, Rational64)> {
    let denom = beta * 4 + d_tilde;
    if denom.is_zero() || d_tilde.is_negative() || d_tilde.is_zero() {
        return Err(Error::InvalidInput("degenerate decay exponent".into()));
    }
    let theta = d_tilde / denom;
    Ok((theta, q / theta))
}

/// Counts `{(xi, eta) in P x P : xi . eta = xi . xi}` for `P` in `F^2 \ {0}`,
/// together with the incidence bound for the lines `l(xi) = {eta : xi . eta = xi . xi}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop127Report {
    pub count: u64,
    pub points: usize,
    pub lines: usize,
    #[serde(with = "crate::decimal")]
    pub bound: f64,
    pub within_bound: bool,
}

pub fn prop127_incidence_count(
    field: &FieldSpec,
    points: &[[FieldElement; 2]],
) -> Result<Prop127Report> {
    if field.minus_one_is_square() {
        return Err(Error::MinusOneIsSquare);
    }
    if points.iter().any(|p| p[0].is_zero() && p[1].is_zero()) {
        return Err(Error::InvalidInput("the origin defines no line".into()));
    }
    let set: std::collections::HashSet<[FieldElement; 2]> = points.iter().copied().collect();
    if set.len() != points.len() {
        return Err(Error::InvalidInput("points must be distinct".into()));
    }
    let mut count = 0u64;
    for xi in points {
        let c = field.dot(xi, xi);
        // Walk the line {eta : xi . eta = c} and look each point up.
        let (a, b) = (xi[0], xi[1]);
        for t in field.elements() {
            let eta = if b.is_zero() {
                [field.div(c, a)?, t]
            } else {
                [t, field.div(field.sub(c, field.mul(a, t)), b)?]
            };
            if set.contains(&eta) {
                count += 1;
            }
        }
    }
    let np = points.len() as f64;
    let nl = np;
    let bound = (np.sqrt() * nl + np).min(np * nl.sqrt() + nl);
    Ok(Prop127Report {
        count,
        points: points.len(),
        lines: points.len(),
        bound,
        within_bound: count as f64 <= bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    #[serde(with = "crate::decimal")]
    pub lhs: f64,
    #[serde(with = "crate::decimal")]
    pub rhs: f64,
    #[serde(with = "crate::decimal")]
    pub deviation: f64,
    #[serde(with = "crate::decimal")]
    pub relative: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let deviation = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        IdentityCheck {
            lhs,
            rhs,
            deviation,
            relative: if scale > 0.0 { deviation / scale } else { 0.0 },
        }
    }
}

/// For `g` on `F^3` supported in `{x_3 = 0}`: compares `||g * K||_4^4` with
/// `|F|^-4 sum_{t != 0, z} |(G d sigma)^v(z, t)|^4`, where `K` is the
/// paraboloid kernel and `G(y, y.y) = |F|^2 g(y, 0)`.
pub fn br_pseudoconformal_check(g: &Grid) -> Result<IdentityCheck> {
    if g.n() != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "needs n = 3, got {}",
            g.n()
        )));
    }
    if g.side() != Side::Space {
        return Err(Error::WrongSide {
            expected: Side::Space,
            found: g.side(),
        });
    }
    let field = g.field();
    let slice = field.space_size(2);
    if g.values()[slice..].iter().any(|v| v.norm() != 0.0) {
        return Err(Error::SupportViolation);
    }
    let paraboloid = SurfaceMeasure::paraboloid(field, 3)?;
    let kernel = bochner_riesz_kernel(&paraboloid)?;
    let lhs: f64 = g
        .convolve(&kernel)?
        .values()
        .iter()
        .map(|v| v.norm_sqr().powi(2))
        .sum();

    let q2 = (field.order() as f64).powi(2);
    // Paraboloid points are enumerated in the same order as F^2, so G is a rescaled copy of the slice.
    let big_g = SurfaceFunction::new(
        &paraboloid,
        g.values()[..slice].iter().map(|v| v * q2).collect(),
    )?;
    let ext = extension(&big_g)?;
    let rhs: f64 = ext.values()[slice..]
        .iter()
        .map(|v| v.norm_sqr().powi(2))
        .sum::<f64>()
        / q2
        / q2;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Per-identity deviations for the restriction-Kakeya bridge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    #[serde(with = "crate::decimal")]
    pub embedding: f64,
    #[serde(with = "crate::decimal")]
    pub line_sum: f64,
    #[serde(with = "crate::decimal")]
    pub cap: f64,
}

impl BridgeReport {
    pub fn max(&self) -> f64 {
        self.embedding.max(self.line_sum).max(self.cap)
    }
}

fn max_relative(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(0.0, f64::max);
    let dev = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        dev / scale
    } else {
        dev
    }
}

/// With `f~(x, y) = f(x) delta_{y,0}` on `F^{2n}`: the transform of `f~` at
/// `(eta, eta.eta, theta, eta.theta)` equals `f^(eta, eta.eta)`. Returns the
/// maximum relative deviation.
pub fn bridge_embedding_check(f: &Grid) -> Result<f64> {
    let field = f.field();
    let n = f.n();
    let mut tilde = Grid::zeros(field, 2 * n, Side::Space);
    tilde.values_mut()[..f.len()].copy_from_slice(f.values());
    let tilde_hat = tilde.fourier_forward()?;
    let f_hat = f.fourier_forward()?;
    let big = SurfaceMeasure::double_paraboloid(field, n)?;
    let (lhs, rhs): (Vec<_>, Vec<_>) = big
        .points()
        .map(|pt| (tilde_hat.at(pt), f_hat.at(&pt[..n])))
        .unzip();
    Ok(max_relative(&lhs, &rhs))
}

/// For `h >= 0` on directions and base points `x0map`, the function
/// `h~(eta, ., theta, .) = h(-eta)^{1/2} e(-x0(-eta) . theta)` on the double
/// paraboloid satisfies
/// `(h~ d sigma)^v(x, y) = |F|^{1-n} sum_eta e(x.(eta, eta.eta)) h(-eta)^{1/2} chi_{l(x0(-eta), -eta)}(y)`.
pub fn bridge_line_sum_check(
    field: &FieldSpec,
    n: usize,
    h: &[f64],
    x0map: &[usize],
) -> Result<f64> {
    let m = field.space_size(n - 1);
    if h.len() != m || x0map.len() != m {
        return Err(Error::ShapeMismatch(
            "h and x0 must be indexed by F^{n-1}".into(),
        ));
    }
    if h.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput("h must be non-negative".into()));
    }
    let big = SurfaceMeasure::double_paraboloid(field, n)?;
    let x0 = |v: &[FieldElement]| field.point_coords(x0map[field.point_index(v)], n - 1);
    let values: Vec<Complex64> = big
        .points()
        .map(|pt| {
            let eta = &pt[..n - 1];
            let theta = &pt[n..2 * n - 1];
            let minus_eta: Vec<FieldElement> = eta.iter().map(|&c| field.neg(c)).collect();
            let amp = h[field.point_index(&minus_eta)].sqrt();
            amp * field.e(field.neg(field.dot(&x0(&minus_eta), theta)))
        })
        .collect();
    let lhs = extension(&SurfaceFunction::new(&big, values)?)?;

    let scale = (field.order() as f64).powi(1 - n as i32);
    let etas: Vec<Vec<FieldElement>> = (0..m).map(|i| field.point_coords(i, n - 1)).collect();
    let rhs: Vec<Complex64> = collect_indexed(field.space_size(2 * n), |idx| {
        let c = field.point_coords(idx, 2 * n);
        let (x, y) = c.split_at(n);
        let (y_under, y_n) = (&y[..n - 1], y[n - 1]);
        let mut acc = Complex64::new(0.0, 0.0);
        for eta in &etas {
            let v: Vec<FieldElement> = eta.iter().map(|&e| field.neg(e)).collect();
            // y lies on l(x0(v), v) iff y_under = x0(v) + y_n v.
            let on_line = field.add_vec(&x0(&v), &field.scale_vec(y_n, &v)) == y_under;
            if on_line {
                let mut lifted = eta.clone();
                lifted.push(field.dot(eta, eta));
                acc += field.e(field.dot(x, &lifted)) * h[field.point_index(&v)].sqrt();
            }
        }
        acc * scale
    });
    Ok(max_relative(lhs.values(), &rhs))
}

/// Restricting `h` on the double paraboloid to the cap `{eta = alpha}` gives
/// `(h_alpha d sigma)^v(x, y) = |F|^{1-n} e(x.(alpha, alpha.alpha)) H(alpha, y_under + y_n alpha)`
/// with `H(alpha, z) = |F|^{1-n} sum_theta e(z.theta) h(alpha, theta)`.
pub fn bridge_cap_check(h: &SurfaceFunction, alpha: &[FieldElement]) -> Result<f64> {
    let big = &h.surface;
    if big.kind() != SurfaceKind::DoubleParaboloid {
        return Err(Error::InvalidInput(
            "cap identity needs the double paraboloid".into(),
        ));
    }
    let field = big.field();
    let n = big.n() / 2;
    let m = field.space_size(n - 1);
    let a = field.point_index(alpha);
    // Caps are contiguous blocks of the point list (eta outer, theta inner).
    let mut capped = vec![Complex64::new(0.0, 0.0); big.len()];
    capped[a * m..(a + 1) * m].copy_from_slice(&h.values[a * m..(a + 1) * m]);
    let lhs = extension(&SurfaceFunction::new(big, capped)?)?;

    let scale = (field.order() as f64).powi(1 - n as i32);
    let thetas: Vec<Vec<FieldElement>> = (0..m).map(|i| field.point_coords(i, n - 1)).collect();
    let big_h: Vec<Complex64> = (0..m)
        .map(|zi| {
            let z = field.point_coords(zi, n - 1);
            thetas
                .iter()
                .enumerate()
                .map(|(ti, th)| h.values[a * m + ti] * field.e(field.dot(&z, th)))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    let mut lifted = alpha.to_vec();
    lifted.push(field.dot(alpha, alpha));
    let rhs: Vec<Complex64> = (0..field.space_size(2 * n))
        .map(|idx| {
            let c = field.point_coords(idx, 2 * n);
            let (x, y) = c.split_at(n);
            let z = field.add_vec(&y[..n - 1], &field.scale_vec(y[n - 1], alpha));
            field.e(field.dot(x, &lifted)) * big_h[field.point_index(&z)] * scale
        })
        .collect();
    Ok(max_relative(lhs.values(), &rhs))
}

/// Runs each bridge identity on `trials` random inputs and reports the worst relative deviations.
pub fn bridge_identity_checks(
    field: &FieldSpec,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<BridgeReport> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(format!(
            "bridge needs n >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BridgeReport {
        embedding: 0.0,
        line_sum: 0.0,
        cap: 0.0,
    };
    let m = field.space_size(n - 1);
    let big = SurfaceMeasure::double_paraboloid(field, n)?;
    let cplx = |rng: &mut ChaCha8Rng| {
        Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    };
    for _ in 0..trials {
        let f = Grid::from_values(
            field,
            n,
            Side::Space,
            (0..field.space_size(n)).map(|_| cplx(&mut rng)).collect(),
        )?;
        report.embedding = report.embedding.max(bridge_embedding_check(&f)?);

        let h: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        let x0map: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
        report.line_sum = report
            .line_sum
            .max(bridge_line_sum_check(field, n, &h, &x0map)?);

        let hv = SurfaceFunction::new(&big, (0..big.len()).map(|_| cplx(&mut rng)).collect())?;
        let alpha = field.point_coords(rng.gen_range(0..m), n - 1);
        report.cap = report.cap.max(bridge_cap_check(&hv, &alpha)?);
    }
    Ok(report)
}

/// `||f||_p / ||g||_p` for `|f^| <= g^` pointwise (`g^` real and non-negative).
pub fn majorant_ratio(f: &Grid, g: &Grid, p: Exponent) -> Result<f64> {
    if f.side() != Side::Space || g.side() != Side::Space {
        return Err(Error::SideMismatch);
    }
    let fh = f.fourier_forward()?;
    let gh = g.fourier_forward()?;
    let scale = gh.max_abs().max(fh.max_abs()).max(1.0);
    let tol = 1e-9 * scale;
    for (a, b) in fh.values().iter().zip(gh.values()) {
        if b.im.abs() > tol || a.norm() > b.re + tol {
            return Err(Error::NotAMajorant);
        }
    }
    Ok(f.lp_norm(p) / g.lp_norm(p))
}

/// Randomized search for a large majorant ratio: `g^ >= 0` random, `f^ = s g^`
/// with random signs `s`. Returns the largest ratio seen and the pair attaining it.
pub fn majorant_search(
    field: &FieldSpec,
    n: usize,
    p: Exponent,
    trials: usize,
    seed: u64,
) -> Result<(f64, Grid, Grid)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = field.space_size(n);
    let mut best: Option<(f64, Grid, Grid)> = None;
    for _ in 0..trials {
        let gh: Vec<Complex64> = (0..size)
            .map(|_| Complex64::new(rng.gen::<f64>(), 0.0))
            .collect();
        let fh: Vec<Complex64> = gh
            .iter()
            .map(|v| if rng.gen::<bool>() { *v } else { -*v })
            .collect();
        let g = Grid::from_values(field, n, Side::Frequency, gh)?.fourier_inverse()?;
        let f = Grid::from_values(field, n, Side::Frequency, fh)?.fourier_inverse()?;
        let r = majorant_ratio(&f, &g, p)?;
        if best.as_ref().is_none_or(|b| r > b.0) {
            best = Some((r, f, g));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("at least one trial is required".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn closed_forms() {
        let s = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        let c = rstar_exact_closed(Exponent::int(2), Exponent::int(2), &s).unwrap();
        assert!((c.value - 5f64.sqrt()).abs() < 1e-12);
        let c = rstar_exact_closed(Exponent::int(3), Exponent::Infinity, &s).unwrap();
        assert_eq!(c.value, 1.0);
        assert!(matches!(
            rstar_exact_closed(Exponent::int(2), Exponent::int(4), &s),
            Err(Error::NoClosedForm { .. })
        ));
        let cone = SurfaceMeasure::cone(&f(7)).unwrap();
        let c = rstar_exact_closed(Exponent::int(2), Exponent::int(2), &cone).unwrap();
        assert!((c.value - (343.0f64 / 48.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn even_bounds() {
        let s = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        let c = rstar_upper_even(&s, 2, u128::MAX).unwrap();
        assert!((c.value - 2f64.powf(0.25)).abs() < 1e-12);
        let mc = SurfaceMeasure::moment_curve(&f(7), 3).unwrap();
        let c = rstar_upper_even(&mc, 3, u128::MAX).unwrap();
        assert!((c.value - 6f64.powf(1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_two_two() {
        let s = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        let cfg = PowerConfig {
            restarts: 4,
            ..PowerConfig::default()
        };
        let c = rstar_lower_power(Exponent::int(2), Exponent::int(2), &s, &cfg).unwrap();
        assert!((c.value - 5f64.sqrt()).abs() < 1e-6);
        assert!(c.verify().unwrap());
        let c = rstar_lower_power(Exponent::int(2), Exponent::int(4), &s, &cfg).unwrap();
        assert!(c.value <= 2f64.powf(0.25) + 1e-9);
        let json = c.to_json();
        assert_eq!(NormCertificate::from_json(&json).unwrap(), c);
    }

    #[test]
    fn dirac_witness_formula() {
        let s = SurfaceMeasure::paraboloid(&f(5), 2).unwrap();
        for (p, q) in [(2, 4), (3, 3), (4, 6)] {
            let (p, q) = (Exponent::int(p), Exponent::int(q));
            let c = rstar_lower_witness(p, q, &s, &WitnessSpec::Dirac(2)).unwrap();
            assert!((c.value - dirac_ratio_formula(&s, p, q)).abs() < 1e-12);
        }
        assert_eq!(
            "bogus".parse::<WitnessSpec>(),
            Err(Error::UnknownWitness("bogus".into()))
        );
    }

    #[test]
    fn subspace_witness() {
        // -1 is a square mod 5, so the paraboloid in F_5^3 contains lines.
        let s = SurfaceMeasure::paraboloid(&f(5), 3).unwrap();
        let c = rstar_lower_witness(
            Exponent::int(2),
            Exponent::int(4),
            &s,
            &WitnessSpec::Subspace(None),
        )
        .unwrap();
        assert!(c.verify().unwrap());
        let s7 = SurfaceMeasure::paraboloid(&f(7), 3).unwrap();
        assert_eq!(find_affine_line(&s7), Err(Error::SubspaceNotFound));
    }

    #[test]
    fn regions() {
        let r = necessary_region(3, 2, None).unwrap();
        assert!(region_test(&r, Exponent::int(2), Exponent::int(4)));
        assert!(region_boundary(&r, Exponent::int(2), Exponent::int(3)));
        assert!(!region_test(&r, Exponent::int(2), Exponent::ratio(5, 2)));
        let r = necessary_region(3, 2, Some(1)).unwrap();
        assert!(region_boundary(&r, Exponent::int(2), Exponent::int(4)));
        assert!(!region_test(&r, Exponent::int(2), Exponent::ratio(7, 2)));
    }

    #[test]
    fn tomas_stein() {
        let s = SurfaceMeasure::paraboloid(&f(7), 3).unwrap();
        let base = rstar_exact_closed(Exponent::int(2), Exponent::int(2), &s).unwrap();
        let b = tomas_stein_bound(&base, Rational64::new(1, 2), 2.0, 7).unwrap();
        assert!((b.value - 2.0).abs() < 1e-12);
        assert_eq!(b.q, Exponent::int(4));
        // beta = (n - d)/2 = 1/2, d~ = 2: q/theta = 2 + 4(n-d)/d~ = 4.
        let (theta, qq) = tomas_stein_balance(
            Rational64::from_integer(2),
            Rational64::new(1, 2),
            Rational64::from_integer(2),
        )
        .unwrap();
        assert_eq!(theta, Rational64::new(1, 2));
        assert_eq!(qq, Rational64::from_integer(4));
    }

    #[test]
    fn prop127_small() {
        let fld = f(7);
        let r = prop127_incidence_count(&fld, &[[FieldElement(1), FieldElement(2)]]).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(
            prop127_incidence_count(&f(5), &[]).unwrap_err(),
            Error::MinusOneIsSquare
        );
    }

    #[test]
    fn pseudoconformal_delta() {
        let fld = f(7);
        let g = Grid::delta(&fld, 3, Side::Space, &[FieldElement::ZERO; 3]);
        let c = br_pseudoconformal_check(&g).unwrap();
        assert!(c.relative < 1e-9, "{c:?}");
        let bad = Grid::delta(
            &fld,
            3,
            Side::Space,
            &[FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE],
        );
        assert_eq!(
            br_pseudoconformal_check(&bad).unwrap_err(),
            Error::SupportViolation
        );
    }

    #[test]
    fn bridge_small() {
        let r = bridge_identity_checks(&f(5), 2, 3, 1).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn majorant_even() {
        let (r, _, _) = majorant_search(&f(5), 2, Exponent::int(4), 20, 3).unwrap();
        assert!(r <= 1.0 + 1e-9);
    }
}
